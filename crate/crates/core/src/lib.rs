//! Multiplicities of abelian covers of splice quotient singularities,
//! computed from a weighted resolution graph and a subgroup of its
//! discriminant group.

pub mod error;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod monomial;
pub mod pipeline;

pub use error::{Error, Result};
pub use graph::{BlowupEvent, BlowupKind, GraphDocument, GraphHistory, ResolutionGraph, VertexId};
pub use lattice::{
    discriminant_group, dual_cycles, enumerate_subgroups, flat_subgroup, intersect, subgroup,
    DiscriminantGroup, DualBasis, QCycle, SubgroupData, SubgroupDocument,
};
pub use linalg::{IntMatrix, RatMatrix, Rational};
pub use monomial::{
    base_point_set, branch_cycle, gcd_cycle, hilbert_basis, monomial_condition,
    neumann_wahl_system, EndVariables, HilbertBasis, MonomialCycle,
};
pub use pipeline::{
    check_gcd_condition, multiplicity_of_quotient, run_pipeline, subgroup_table,
    universal_abelian_cover, Mode, PipelineConfig, PipelineReport,
};
