mod common;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use splicemult::graph::pullback_vertex_cycle;
use splicemult::lattice::{
    discriminant_group, dual_cycles, intersect, subgroup, QCycle, DEFAULT_GROUP_CAP,
};
use splicemult::monomial::{
    gcd_cycle, hilbert_basis, monomial_condition, EndVariables, DEFAULT_BOX_CAP, DEFAULT_SEARCH_CAP,
};
use splicemult::pipeline::{
    check_gcd_condition, run_pipeline, Mode, PipelineConfig, PipelineReport,
};
use splicemult::{Error, ResolutionGraph};

/// A minimal tree with small `|H|` that satisfies the monomial condition.
fn splice_tree(seed: u64) -> ResolutionGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g = some_tree(&mut rng, 7, 2..=4);
        if g.ends().len() > 5 || oracle_det(&g) > BigInt::from(40) {
            continue;
        }
        let mc = monomial_condition(&g, &dual_cycles(&g).unwrap(), DEFAULT_SEARCH_CAP).unwrap();
        if mc.is_satisfied() {
            return g;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn duals_match_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = some_tree(&mut rng, 8, 1..=5);
        let b = dual_cycles(&g).unwrap();
        let oracle = oracle_duals(&g);
        for (i, &v) in g.ids().iter().enumerate() {
            for (j, &w) in g.ids().iter().enumerate() {
                prop_assert_eq!(b.entry(v, w).unwrap(), &oracle[i][j]);
                prop_assert!(oracle[i][j].is_positive());
            }
        }
        let h = discriminant_group(&g, &b).unwrap();
        prop_assert_eq!(h.order(), &oracle_det(&g));
    }

    #[test]
    fn pullback_preserves_pairing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = some_tree(&mut rng, 7, 1..=4);
        let cycle = |rng: &mut ChaCha8Rng| QCycle::new(
            g.ids().to_vec(),
            (0..g.len()).map(|_| q(rng.gen_range(-7..=7), rng.gen_range(1..=6))).collect(),
        );
        let (d1, d2) = (cycle(&mut rng), cycle(&mut rng));
        let (v, w) = g.edges()[rng.gen_range(0..g.edges().len())];
        let (post, event) = g.blowup_edge(v, w).unwrap();
        let p1 = pullback_vertex_cycle(&g, &post, &event, &d1).unwrap();
        let p2 = pullback_vertex_cycle(&g, &post, &event, &d2).unwrap();
        prop_assert_eq!(intersect(&post, &p1, &p2).unwrap(), intersect(&g, &d1, &d2).unwrap());
        // old duals pull back to the new duals
        let b = dual_cycles(&g).unwrap();
        let bp = dual_cycles(&post).unwrap();
        for &x in g.ids() {
            prop_assert_eq!(pullback_vertex_cycle(&g, &post, &event, &b.dual(x).unwrap()).unwrap(), bp.dual(x).unwrap());
        }
    }

    #[test]
    fn gcd_is_a_lower_bound_and_pruning_is_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = some_tree(&mut rng, 7, 2..=4);
        if g.ends().len() <= 5 && oracle_det(&g) <= BigInt::from(30) {
            let b = dual_cycles(&g).unwrap();
            let gens = vec![random_dual_vector(&mut rng, g.len(), 2)];
            if box_volume(&g, &gens) <= 20_000 {
                let hb = hilbert_basis(&b, &EndVariables::of_graph(&g), &gens, DEFAULT_BOX_CAP).unwrap();
                let z = gcd_cycle(hb.expansions().iter()).unwrap();
                for d in hb.expansions() {
                    prop_assert!(z.le(&d).unwrap());
                }
                for c in check_gcd_condition(&g, &z, &hb).unwrap() {
                    prop_assert!(!c.pruned_by_zero || c.witness.is_some(), "edge {:?}", c.edge);
                }
            }
        }
    }

    #[test]
    fn pipeline_invariants(seed in any::<u64>(), pick in any::<u64>()) {
        let g = splice_tree(seed);
        let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
        let subs = splicemult::lattice::enumerate_subgroups(&h, DEFAULT_GROUP_CAP).unwrap();
        let s = &subs[(pick % subs.len() as u64) as usize];
        let opt = run_pipeline(&g, s, &PipelineConfig::default());
        let strict = run_pipeline(&g, s, &PipelineConfig::with_mode(Mode::Strict));
        match (opt, strict) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.multiplicity, b.multiplicity);
                prop_assert!(a.multiplicity >= 1);
                let zz: Q = a.ZZ.parse().unwrap();
                prop_assert!(zz.is_negative());
                prop_assert_eq!(zz * Q::from_integer(BigInt::from(a.index)), -Q::from_integer(BigInt::from(a.multiplicity)));
                prop_assert_eq!(a.H1_order * a.index, a.det);
                let back = PipelineReport::from_json(&a.to_json()).unwrap();
                prop_assert_eq!(back, a);
            }
            (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => {}
            (a, b) => prop_assert!(false, "unexpected outcome {:?} / {:?}", a.err(), b.err()),
        }
    }
}

#[test]
fn uac_of_cyclic_quotients_is_smooth() {
    // chains give cyclic quotient singularities C²/(Z/n), whose cover is smooth
    for weights in [
        vec![-2, -2, -2],
        vec![-3, -2],
        vec![-5, -2, -3],
        vec![-4, -4],
    ] {
        let g = ResolutionGraph::chain(&weights).unwrap();
        let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
        let r = run_pipeline(
            &g,
            &h.trivial_subgroup().unwrap(),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(r.multiplicity, 1, "chain {weights:?}");
    }
}

#[test]
fn quotient_of_a_n_chain_has_multiplicity_two() {
    for n in 2..=6 {
        let g = ResolutionGraph::chain(&vec![-2; n]).unwrap();
        let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
        let r = run_pipeline(
            &g,
            &h.whole(DEFAULT_GROUP_CAP).unwrap(),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(r.multiplicity, 2, "A_{n}");
    }
}

#[test]
fn rational_double_points_have_multiplicity_two() {
    // D_4, D_5, E_6, E_7, E_8 with all weights -2
    let cases: [(&[(u32, u32)], usize); 5] = [
        (&[(1, 2), (2, 3), (2, 4)], 4),
        (&[(1, 2), (2, 3), (2, 4), (4, 5)], 5),
        (&[(1, 2), (2, 3), (3, 4), (4, 5), (3, 6)], 6),
        (&[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 7)], 7),
        (&[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 8)], 8),
    ];
    for (edges, n) in cases {
        let vertices: Vec<(u32, i64)> = (1..=n as u32).map(|v| (v, -2)).collect();
        let g = ResolutionGraph::new(&vertices, edges).unwrap();
        let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
        let r = run_pipeline(
            &g,
            &h.whole(DEFAULT_GROUP_CAP).unwrap(),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(r.multiplicity, 2, "{n} vertices");
        // the binary polyhedral group is not abelian here, so the cover is
        // C² modulo its commutator subgroup: again a double point
        let u = run_pipeline(
            &g,
            &h.trivial_subgroup().unwrap(),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(u.multiplicity, 2, "{n} vertices");
    }
}

#[test]
fn subgroup_from_file_generators() {
    let g = example1();
    let text = std::fs::read_to_string(format!(
        "{}/../../data/example1_h1_e1_2e3.json",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let gens: Vec<Vec<BigInt>> = doc["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| {
            v.as_array()
                .unwrap()
                .iter()
                .map(|x| BigInt::from(x.as_i64().unwrap()))
                .collect()
        })
        .collect();
    let h = discriminant_group(&g, &dual_cycles(&g).unwrap()).unwrap();
    let s = subgroup(&gens, &h, DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(s.order(), 6);
    assert_eq!(
        run_pipeline(&g, &s, &PipelineConfig::default())
            .unwrap()
            .multiplicity,
        2
    );
}
