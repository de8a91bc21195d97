//! The multiplicity loop: Hilbert basis of `M^{H1}`, gcd cycle `Z`, base
//! points at the ends, GCD checks along edges, and blowups until every
//! check passes. Then `mult = |H/H1| · (-Z·Z)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    pullback_vertex_cycle, BlowupEvent, GraphDocument, GraphHistory, ResolutionGraph, VertexId,
};
use crate::lattice::{
    discriminant_group, dual_cycles, enumerate_subgroups, flat_subgroup, intersect,
    intersections_with_vertices, to_dual_coordinates, DiscriminantGroup, QCycle, SubgroupData,
    DEFAULT_GROUP_CAP,
};
use crate::linalg::Rational;
use crate::monomial::{
    base_point_set, gcd_cycle, hilbert_basis, monomial_condition, EndVariables, HilbertBasis,
    DEFAULT_BOX_CAP, DEFAULT_SEARCH_CAP,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Blow up every base point at the ends before anything else.
    Strict,
    /// Blow up a base point only when no generator shows it is harmless.
    #[default]
    Optimized,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Optimized => "optimized",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "optimized" => Ok(Mode::Optimized),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub max_blowups: usize,
    pub box_cap: u64,
    pub group_cap: u64,
    pub search_cap: u64,
    /// Accept graphs with a contractible (-1)-curve; the report is tagged.
    pub allow_non_minimal: bool,
    /// Refuse graphs failing the monomial condition.
    pub require_monomial_condition: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mode: Mode::Optimized,
            max_blowups: 64,
            box_cap: DEFAULT_BOX_CAP,
            group_cap: DEFAULT_GROUP_CAP,
            search_cap: DEFAULT_SEARCH_CAP,
            allow_non_minimal: false,
            require_monomial_condition: true,
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(mode: Mode) -> Self {
        PipelineConfig {
            mode,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_blowups == 0 || self.box_cap == 0 || self.group_cap == 0 || self.search_cap == 0
        {
            return Err(Error::Parse("pipeline caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCheckResult {
    pub edge: (VertexId, VertexId),
    pub passed: bool,
    /// index of a generator attaining both `M_v(Z)` and `M_w(Z)`
    pub witness: Option<usize>,
    /// `Z·E_v = 0` or `Z·E_w = 0`
    pub pruned_by_zero: bool,
}

/// GCD condition along every edge. A sum of two or more generators has
/// strictly larger coefficients than `Z` everywhere, so only single
/// generators can realize the minimum.
pub fn check_gcd_condition(
    g: &ResolutionGraph,
    z: &QCycle,
    gens: &HilbertBasis,
) -> Result<Vec<EdgeCheckResult>> {
    if gens.is_empty() {
        return Err(Error::EmptySet);
    }
    if !z.is_on(g) {
        return Err(Error::IndexMismatch);
    }
    let zdot = intersections_with_vertices(g, z)?;
    g.edges()
        .iter()
        .map(|&(v, w)| {
            let (zv, zw) = (z.coefficient(v)?, z.coefficient(w)?);
            let mut witness = None;
            for (k, m) in gens.generators().iter().enumerate() {
                if m.expansion().coefficient(v)? == zv && m.expansion().coefficient(w)? == zw {
                    witness = Some(k);
                    break;
                }
            }
            let pruned_by_zero = zdot[g.index_of(v)?].is_zero() || zdot[g.index_of(w)?].is_zero();
            Ok(EdgeCheckResult {
                edge: (v, w),
                passed: witness.is_some() || pruned_by_zero,
                witness,
                pruned_by_zero,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum BasePointOutcome {
    /// no generator realizing `M_i(Z)` involves `z_i`
    Unconstrained,
    /// a generator realizes `M_i(Z)` without `z_i`
    Witness { generator: usize },
    /// `b_i` is not a base point
    NotBasePoint,
    /// `b_i` was blown up
    BlownUp { new_vertex: VertexId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePointDecision {
    pub end_index: VertexId,
    pub vertex: VertexId,
    #[serde(flatten)]
    pub outcome: BasePointOutcome,
}

/// Rational numbers keyed by vertex id, written `"p/q"` (or `"n"`).
pub type RationalMap = BTreeMap<VertexId, String>;

fn rational_map(ids: &[VertexId], values: &[Rational], skip_zero: bool) -> RationalMap {
    ids.iter()
        .zip(values)
        .filter(|(_, c)| !(skip_zero && c.is_zero()))
        .map(|(&v, c)| (v, c.to_string()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundReport {
    pub vertices: usize,
    pub hilbert_basis_size: usize,
    #[serde(rename = "Z_vertex")]
    pub z_vertex: RationalMap,
    #[serde(rename = "Z_dual")]
    pub z_dual: RationalMap,
    #[serde(rename = "ZZ")]
    pub zz: String,
    pub base_points: Vec<BasePointDecision>,
    pub edge_checks: Vec<EdgeCheckResult>,
    pub blowup: Option<BlowupEvent>,
}

#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub mode: Mode,
    pub non_minimal: bool,
    pub graph: GraphDocument,
    pub final_graph: GraphDocument,
    pub det: u64,
    pub H_invariant_factors: Vec<u64>,
    pub H1_generators: Vec<Vec<i64>>,
    pub H1_order: u64,
    pub index: u64,
    /// base points at the ends of the input graph
    pub base_point_set: Vec<VertexId>,
    pub end_indices: Vec<VertexId>,
    pub hilbert_basis: Vec<Vec<u64>>,
    pub rounds: Vec<RoundReport>,
    pub blowups: Vec<BlowupEvent>,
    pub end_map: BTreeMap<VertexId, VertexId>,
    pub Z_final: RationalMap,
    pub Z_final_dual: RationalMap,
    pub ZZ: String,
    pub multiplicity: u64,
    pub trace: Vec<String>,
}

impl PipelineReport {
    pub fn edge_blowups(&self) -> usize {
        self.blowups
            .iter()
            .filter(|e| matches!(e.kind, crate::graph::BlowupKind::Edge(..)))
            .count()
    }

    pub fn end_blowups(&self) -> usize {
        self.blowups.len() - self.edge_blowups()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `Σ c_v E_v*` rendered as `1/10 E1* + 3/10 E5*`.
pub fn render_dual(ids: &[VertexId], coords: &[Rational]) -> String {
    let terms: Vec<String> = ids
        .iter()
        .zip(coords)
        .filter(|(_, c)| !c.is_zero())
        .map(|(v, c)| {
            if c == &Rational::from_integer(1.into()) {
                format!("E{v}*")
            } else {
                format!("{c} E{v}*")
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn small_int(x: &BigInt, what: &'static str) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::cap(what, x, u64::MAX))
}

/// Base points of the ends of `g`, with vertex ids of `g`.
fn current_base_points(g: &ResolutionGraph) -> Result<BTreeSet<VertexId>> {
    base_point_set(g, &dual_cycles(g)?)
}

/// Run the multiplicity loop for `X^u / H1`.
pub fn run_pipeline(
    g: &ResolutionGraph,
    h1: &SubgroupData,
    config: &PipelineConfig,
) -> Result<PipelineReport> {
    config.validate()?;
    let non_minimal = match g.check_minimal() {
        Ok(()) => false,
        Err(e) if !config.allow_non_minimal => return Err(e),
        Err(_) => true,
    };
    if config.require_monomial_condition {
        let mc = monomial_condition(g, &dual_cycles(g)?, config.search_cap)?;
        let bad = mc.failures().next().map(|b| (b.node, b.branch[0]));
        if let Some((node, branch_root)) = bad {
            return Err(Error::MonomialConditionFails { node, branch_root });
        }
    }
    let basis0 = dual_cycles(g)?;
    let group = discriminant_group(g, &basis0)?;
    let h1_gens0 = h1.generators_on(g)?;
    let b0 = base_point_set(g, &basis0)?;
    let mut trace = vec![format!(
        "|H| = {}, |H1| = {}, |H/H1| = {}, mode {}",
        group.order(),
        h1.order(),
        h1.index(),
        config.mode
    )];
    trace.push(format!(
        "base points at ends: {:?}",
        b0.iter().collect::<Vec<_>>()
    ));

    let mut history = GraphHistory::new(g.clone());
    let mut rounds: Vec<RoundReport> = Vec::new();
    let check_budget = |history: &GraphHistory| {
        if history.events().len() >= config.max_blowups {
            Err(Error::MaxBlowupsExceeded(config.max_blowups))
        } else {
            Ok(())
        }
    };

    if config.mode == Mode::Strict {
        for &i in &b0 {
            check_budget(&history)?;
            let event = history.blowup_end(i)?.clone();
            trace.push(format!("strict: {event}"));
        }
    }

    // the monoid depends only on exponents, so one Hilbert basis serves
    // every graph in the history
    let hb_base = {
        let cur = history.current();
        let basis = dual_cycles(cur)?;
        hilbert_basis(
            &basis,
            &EndVariables::from_history(&history),
            &h1.generators_on(cur)?,
            config.box_cap,
        )?
    };
    trace.push(format!(
        "Hilbert basis ({} generators): {}",
        hb_base.len(),
        hb_base
            .generators()
            .iter()
            .map(|m| crate::monomial::render_monomial(&hb_base.ends().indices, m.exponents()))
            .collect::<Vec<_>>()
            .join(", ")
    ));

    let mut carried: Option<HilbertBasis> = None;
    let (z, final_graph) = loop {
        let cur = history.current().clone();
        let basis = dual_cycles(&cur)?;
        let ends = EndVariables::from_history(&history);
        let hb = hb_base.reexpand(&basis, &ends)?;
        if let Some(prev) = carried.take() {
            if prev.expansions() != hb.expansions() {
                return Err(Error::NonIntegerMultiplicity(
                    "pulled-back generators differ from recomputed ones".into(),
                ));
            }
        }
        let z = gcd_cycle(hb.expansions().iter())?;
        let zz = intersect(&cur, &z, &z)?;
        let z_dual = to_dual_coordinates(&cur, &z)?;
        trace.push(format!(
            "round {}: {} vertices, Z = {}, Z·Z = {}",
            rounds.len() + 1,
            cur.len(),
            render_dual(cur.ids(), &z_dual),
            zz
        ));
        let mut round = RoundReport {
            vertices: cur.len(),
            hilbert_basis_size: hb.len(),
            z_vertex: rational_map(cur.ids(), z.coefficients(), false),
            z_dual: rational_map(cur.ids(), &z_dual, true),
            zz: zz.to_string(),
            base_points: Vec::new(),
            edge_checks: Vec::new(),
            blowup: None,
        };

        if config.mode == Mode::Optimized {
            let mut blown = false;
            let mut bp_cache: Option<BTreeSet<VertexId>> = None;
            for (k, (&index, &vertex)) in ends.indices.iter().zip(&ends.vertices).enumerate() {
                let zi = z.coefficient(vertex)?;
                let attaining: Vec<(usize, u64)> = hb
                    .generators()
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| {
                        m.expansion()
                            .coefficient(vertex)
                            .map(|c| c == zi)
                            .unwrap_or(false)
                    })
                    .map(|(j, m)| (j, m.exponents()[k]))
                    .collect();
                let outcome = if attaining.iter().all(|&(_, a)| a == 0) {
                    BasePointOutcome::Unconstrained
                } else if let Some(&(j, _)) = attaining.iter().find(|&&(_, a)| a == 0) {
                    BasePointOutcome::Witness { generator: j }
                } else {
                    let bp = match &bp_cache {
                        Some(b) => b,
                        None => bp_cache.insert(current_base_points(&cur)?),
                    };
                    if !bp.contains(&vertex) {
                        BasePointOutcome::NotBasePoint
                    } else {
                        check_budget(&history)?;
                        let event = history.blowup_end(index)?.clone();
                        trace.push(format!("  end {index}: {event}"));
                        round.blowup = Some(event.clone());
                        blown = true;
                        BasePointOutcome::BlownUp {
                            new_vertex: event.new_vertex,
                        }
                    }
                };
                if matches!(
                    outcome,
                    BasePointOutcome::Witness { .. } | BasePointOutcome::NotBasePoint
                ) {
                    trace.push(format!("  end {index}: {}", describe_outcome(&outcome)));
                }
                round.base_points.push(BasePointDecision {
                    end_index: index,
                    vertex,
                    outcome,
                });
                if blown {
                    break;
                }
            }
            if blown {
                rounds.push(round);
                continue;
            }
        }

        round.edge_checks = check_gcd_condition(&cur, &z, &hb)?;
        for c in &round.edge_checks {
            if c.pruned_by_zero && c.witness.is_none() {
                return Err(Error::NonIntegerMultiplicity(format!(
                    "edge ({}, {}) pruned by Z·E = 0 but has no witness",
                    c.edge.0, c.edge.1
                )));
            }
        }
        let failing = round.edge_checks.iter().find(|c| !c.passed).map(|c| c.edge);
        match failing {
            None => {
                trace.push("  all edges pass".into());
                rounds.push(round);
                break (z, cur);
            }
            Some((v, w)) => {
                check_budget(&history)?;
                trace.push(format!("  edge ({v}, {w}) fails the GCD condition"));
                let event = history.blowup_edge(v, w)?.clone();
                trace.push(format!("  {event}"));
                let post = history.current();
                let pulled = hb
                    .expansions()
                    .iter()
                    .map(|d| pullback_vertex_cycle(&cur, post, &event, d))
                    .collect::<Result<Vec<_>>>()?;
                carried = Some(hb.with_expansions(&EndVariables::from_history(&history), pulled));
                round.blowup = Some(event);
                rounds.push(round);
            }
        }
    };

    let zz = intersect(&final_graph, &z, &z)?;
    let mult = -zz.clone() * Rational::from_integer(BigInt::from(h1.index()));
    if !mult.is_integer() || !mult.is_positive() {
        return Err(Error::NonIntegerMultiplicity(mult.to_string()));
    }
    let multiplicity = small_int(&mult.to_integer(), "multiplicity")?;
    trace.push(format!(
        "mult = {} · {} = {}",
        h1.index(),
        -zz.clone(),
        multiplicity
    ));
    let z_dual = to_dual_coordinates(&final_graph, &z)?;

    let factors = group
        .invariant_factors()
        .iter()
        .map(|f| small_int(f, "invariant factor"))
        .collect::<Result<_>>()?;
    let h1_generators = h1_gens0
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::cap("generator entry", x, i64::MAX as u64))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(PipelineReport {
        mode: config.mode,
        non_minimal,
        graph: g.to_document(),
        final_graph: final_graph.to_document(),
        det: small_int(group.order(), "|H|")?,
        H_invariant_factors: factors,
        H1_generators: h1_generators,
        H1_order: h1.order(),
        index: h1.index(),
        base_point_set: b0.into_iter().collect(),
        end_indices: hb_base.ends().indices.clone(),
        hilbert_basis: hb_base.exponent_vectors(),
        rounds,
        blowups: history.events().to_vec(),
        end_map: history.end_map().clone(),
        Z_final: rational_map(final_graph.ids(), z.coefficients(), false),
        Z_final_dual: rational_map(final_graph.ids(), &z_dual, true),
        ZZ: zz.to_string(),
        multiplicity,
        trace,
    })
}

fn describe_outcome(o: &BasePointOutcome) -> String {
    match o {
        BasePointOutcome::Unconstrained => "no constraint".into(),
        BasePointOutcome::Witness { generator } => {
            format!("accepted, generator {generator} avoids z_i")
        }
        BasePointOutcome::NotBasePoint => "accepted, not a base point".into(),
        BasePointOutcome::BlownUp { new_vertex } => format!("blown up, new end {new_vertex}"),
    }
}

fn group_of(g: &ResolutionGraph) -> Result<DiscriminantGroup> {
    discriminant_group(g, &dual_cycles(g)?)
}

/// `H1 = {0}`: the universal abelian cover.
pub fn universal_abelian_cover(
    g: &ResolutionGraph,
    config: &PipelineConfig,
) -> Result<PipelineReport> {
    let h = group_of(g)?;
    run_pipeline(g, &h.trivial_subgroup()?, config)
}

/// `H1 = H`: the singularity itself.
pub fn multiplicity_of_quotient(
    g: &ResolutionGraph,
    config: &PipelineConfig,
) -> Result<PipelineReport> {
    let h = group_of(g)?;
    run_pipeline(g, &h.whole(config.group_cap)?, config)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub generators: Vec<String>,
    pub flat_generators: Vec<String>,
    pub order: u64,
    pub flat_order: u64,
    pub elements: Vec<u64>,
    /// `Z` in dual coordinates on the final graph of the run
    #[serde(rename = "Z")]
    pub z: String,
    pub blowups: usize,
    pub multiplicity: u64,
}

fn describe_generators(s: &SubgroupData, h: &DiscriminantGroup, cap: u64) -> Result<Vec<String>> {
    s.generators()
        .iter()
        .map(|g| h.describe_code(h.code_of(g)?, cap))
        .collect()
}

/// One row per subgroup of `H`, in enumeration order. Rows are computed in
/// parallel.
pub fn subgroup_table(g: &ResolutionGraph, config: &PipelineConfig) -> Result<Vec<TableRow>> {
    let h = group_of(g)?;
    let subgroups = enumerate_subgroups(&h, config.group_cap)?;
    subgroups
        .par_iter()
        .map(|s| {
            let flat = flat_subgroup(s, &h, config.group_cap)?;
            let report = run_pipeline(g, s, config)?;
            let fg = crate::graph::ResolutionGraph::from_document(&report.final_graph)?;
            let coords: Vec<Rational> = fg
                .ids()
                .iter()
                .map(|v| {
                    report
                        .Z_final_dual
                        .get(v)
                        .map(|t| t.parse::<Rational>().expect("written by us"))
                        .unwrap_or_else(Rational::zero)
                })
                .collect();
            Ok(TableRow {
                generators: describe_generators(s, &h, config.group_cap)?,
                flat_generators: describe_generators(&flat, &h, config.group_cap)?,
                order: s.order(),
                flat_order: flat.order(),
                elements: s.elements().to_vec(),
                z: render_dual(fg.ids(), &coords),
                blowups: report.blowups.len(),
                multiplicity: report.multiplicity,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BlowupKind;
    use crate::lattice::subgroup;
    use crate::linalg::rat;

    fn example1() -> ResolutionGraph {
        ResolutionGraph::from_json(include_str!("../../../data/example1.json")).unwrap()
    }

    fn example2() -> ResolutionGraph {
        ResolutionGraph::from_json(include_str!("../../../data/example2.json")).unwrap()
    }

    fn a2() -> ResolutionGraph {
        ResolutionGraph::chain(&[-2, -2]).unwrap()
    }

    fn unit(n: usize, i: usize, k: i64) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::from(k);
        v
    }

    #[test]
    fn example1_uac() {
        let r = universal_abelian_cover(&example1(), &PipelineConfig::default()).unwrap();
        assert_eq!(r.multiplicity, 6);
        assert_eq!(r.ZZ, "-1/2");
        assert!(r.blowups.is_empty());
        assert_eq!(r.Z_final_dual, BTreeMap::from([(5, "1/2".to_string())]));
        assert!(r.rounds[0].edge_checks.iter().all(|c| c.passed));
    }

    #[test]
    fn example1_quotient() {
        let r = multiplicity_of_quotient(&example1(), &PipelineConfig::default()).unwrap();
        assert_eq!(r.multiplicity, 2);
        assert_eq!(r.Z_final_dual, BTreeMap::from([(5, "1".to_string())]));
    }

    #[test]
    fn example1_e1_witness_at_end_1() {
        let g = example1();
        let h = group_of(&g).unwrap();
        let s = subgroup(&[unit(10, 0, 1)], &h, DEFAULT_GROUP_CAP).unwrap();
        let r = run_pipeline(&g, &s, &PipelineConfig::default()).unwrap();
        assert_eq!(r.multiplicity, 6);
        assert_eq!(r.ZZ, "-1");
        assert_eq!(r.end_blowups(), 0);
        let d = &r.rounds[0].base_points[0];
        assert_eq!(d.end_index, 1);
        assert!(matches!(d.outcome, BasePointOutcome::Witness { .. }));
    }

    #[test]
    fn example1_strict_blows_up_3_and_4() {
        let r =
            universal_abelian_cover(&example1(), &PipelineConfig::with_mode(Mode::Strict)).unwrap();
        assert_eq!(r.multiplicity, 6);
        let ends: Vec<_> = r
            .blowups
            .iter()
            .filter_map(|e| match e.kind {
                BlowupKind::EndPoint { end_index, .. } => Some((end_index, e.new_vertex)),
                _ => None,
            })
            .collect();
        assert_eq!(ends, vec![(3, 11), (4, 12)]);
    }

    #[test]
    fn example2_uac() {
        let r = universal_abelian_cover(&example2(), &PipelineConfig::default()).unwrap();
        assert_eq!(r.det, 60);
        assert_eq!(r.multiplicity, 6);
        assert_eq!(r.edge_blowups(), 3);
        assert_eq!(r.end_blowups(), 0);
        let zz: Vec<_> = r.rounds.iter().map(|x| x.zz.as_str()).collect();
        assert_eq!(zz, vec!["-7/100", "-2/25", "-9/100", "-1/10"]);
        let failing: Vec<_> = r.rounds[0]
            .edge_checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.edge)
            .collect();
        assert_eq!(failing, vec![(1, 5)]);
        assert_eq!(
            r.rounds[0].z_dual,
            BTreeMap::from([(1, "1/10".to_string()), (5, "3/10".to_string())])
        );
        let last = r.blowups.last().unwrap().new_vertex;
        assert_eq!(r.Z_final_dual, BTreeMap::from([(last, "1/10".to_string())]));
    }

    #[test]
    fn a2_cases() {
        let g = a2();
        let r = universal_abelian_cover(&g, &PipelineConfig::default()).unwrap();
        assert_eq!((r.multiplicity, r.edge_blowups()), (1, 1));
        assert_eq!(r.ZZ, "-1/3");
        assert_eq!(
            r.Z_final,
            BTreeMap::from([
                (1, "1/3".to_string()),
                (2, "1/3".to_string()),
                (3, "1".to_string())
            ])
        );
        let q = multiplicity_of_quotient(&g, &PipelineConfig::default()).unwrap();
        assert_eq!(q.multiplicity, 2);
        assert_eq!(
            q.Z_final,
            BTreeMap::from([(1, "1".to_string()), (2, "1".to_string())])
        );
        assert_eq!(q.hilbert_basis, vec![vec![1, 1], vec![3, 0], vec![0, 3]]);
    }

    #[test]
    fn gcd_checks_on_a2() {
        let g = a2();
        let b = dual_cycles(&g).unwrap();
        let hb = hilbert_basis(&b, &EndVariables::of_graph(&g), &[], DEFAULT_BOX_CAP).unwrap();
        let z = gcd_cycle(hb.expansions().iter()).unwrap();
        assert_eq!(z.coefficients(), &[rat(1, 3), rat(1, 3)]);
        let checks = check_gcd_condition(&g, &z, &hb).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(!checks[0].passed && checks[0].witness.is_none() && !checks[0].pruned_by_zero);
        let empty = hb.with_expansions(&EndVariables::of_graph(&g), vec![z.clone(), z.clone()]);
        assert!(check_gcd_condition(&g, &z, &empty).unwrap()[0].passed);
    }

    #[test]
    fn blowup_budget() {
        let cfg = PipelineConfig {
            max_blowups: 2,
            ..PipelineConfig::default()
        };
        assert_eq!(
            universal_abelian_cover(&example2(), &cfg).unwrap_err(),
            Error::MaxBlowupsExceeded(2)
        );
    }

    #[test]
    fn non_minimal_input() {
        let g = ResolutionGraph::chain(&[-2, -1, -3]).unwrap();
        assert_eq!(
            universal_abelian_cover(&g, &PipelineConfig::default()).unwrap_err(),
            Error::NotMinimal(2)
        );
        let cfg = PipelineConfig {
            allow_non_minimal: true,
            ..PipelineConfig::default()
        };
        let r = universal_abelian_cover(&g, &cfg).unwrap();
        assert!(r.non_minimal);
        // the chain blows down to a smooth point
        assert_eq!(r.multiplicity, 1);
    }

    #[test]
    fn report_round_trips() {
        let r = universal_abelian_cover(&example2(), &PipelineConfig::default()).unwrap();
        let text = r.to_json();
        let back = PipelineReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn table_example1() {
        let rows = subgroup_table(&example1(), &PipelineConfig::default()).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[0].z, "1/2 E5*");
        assert!(rows.iter().all(|r| r.order * r.flat_order == 12));
        let mut mults: Vec<u64> = rows.iter().map(|r| r.multiplicity).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![2, 2, 2, 2, 4, 6, 6, 6, 6, 6]);
    }

    #[test]
    fn modes_parse() {
        assert_eq!("strict".parse::<Mode>().unwrap(), Mode::Strict);
        assert!("fast".parse::<Mode>().is_err());
        assert_eq!(Mode::default().to_string(), "optimized");
    }
}
