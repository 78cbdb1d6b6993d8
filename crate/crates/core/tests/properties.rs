mod common;

use causal_core::algebra::{enumerate_causal_sets, AlgebraError};
use causal_core::measure::*;
use causal_core::minkowski::*;
use causal_core::reconstruction::*;
use causal_core::*;
use common::{Family, OracleUnion, Poset};
use proptest::prelude::*;

/// Random order on `n` points from an upper-triangular cover relation.
fn poset(max_n: usize) -> impl Strategy<Value = Causality> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.35), n * n).prop_map(move |bits| {
            let cover: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| j > i && bits[i * n + j]).collect()).collect();
            Causality::from_cover((0..n).map(|i| format!("v{i}")).collect(), &cover).unwrap()
        })
    })
}

fn subset_of(c: &Causality, bits: u64) -> PointSet {
    let n = c.len();
    PointSet::from_indices(n, (0..n).filter(|i| bits >> i & 1 == 1))
}

/// `(u, v) ↦ (rows−1−u, cols−1−v)` on a product lattice.
fn lattice_reflection(rows: usize, cols: usize) -> Vec<usize> {
    (0..rows * cols)
        .map(|i| {
            let (u, v) = (i / cols, i % cols);
            (rows - 1 - u) * cols + (cols - 1 - v)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn classification_agrees_with_oracle(c in poset(8)) {
        let alg = CausalAlgebra::new(&c, 20).unwrap();
        let o = Poset::of(&c);
        for m in o.subsets() {
            let s = subset_of(&c, m as u64);
            let expected = o.class(m);
            prop_assert_eq!(alg.class_of(m as u64), expected);
            prop_assert_eq!(classify(&c, &s), expected);
        }
    }

    #[test]
    fn both_sets_are_in_both_collections(c in poset(8)) {
        let delta = enumerate_causal_sets(&c, CollectionKind::Delta, 20).unwrap();
        let nabla = enumerate_causal_sets(&c, CollectionKind::Nabla, 20).unwrap();
        for s in enumerate_causal_sets(&c, CollectionKind::Both, 20).unwrap() {
            prop_assert!(delta.contains(&s) && nabla.contains(&s));
        }
    }

    #[test]
    fn diamonds_are_cone_intersections(c in poset(10)) {
        for x in 0..c.len() {
            for y in 0..c.len() {
                let cones = &c.incomplete_diamond(x, Direction::Lower) & &c.incomplete_diamond(y, Direction::Upper);
                prop_assert_eq!(c.diamond(x, y), cones);
            }
        }
    }

    #[test]
    fn structural_reversal_is_an_involution(c in poset(10)) {
        prop_assert_eq!(c.reversed().reversed(), c.clone());
        let r = c.reversed();
        for m in 0..(1u64 << c.len().min(8)) {
            let s = subset_of(&c, m);
            prop_assert_eq!(c.reverse(&ReversalMap::Structural, &s).unwrap(), s.clone());
            prop_assert_eq!(c.is_convergent(&s), r.is_divergent(&s));
            prop_assert_eq!(classify(&c, &s).reversed(), classify(&r, &s));
        }
    }

    #[test]
    fn causal_union_is_the_oracle_minimum(c in poset(7)) {
        let alg = CausalAlgebra::new(&c, 20).unwrap();
        let o = Poset::of(&c);
        for (kind, fam) in [(UnionKind::Delta, Family::Delta), (UnionKind::Nabla, Family::Nabla)] {
            let members = alg.family(kind).to_vec();
            for &a in &members {
                for &b in &members {
                    let got = alg.union_masks(a, b, kind);
                    match o.union(a as u32, b as u32, fam) {
                        OracleUnion::Set(s) => prop_assert_eq!(got, Ok(s as u64)),
                        _ => prop_assert!(got.is_err()),
                    }
                    if let Ok(u) = got {
                        if u != 0 {
                            prop_assert_eq!(u & (a | b), a | b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn causal_union_is_monotone(c in poset(7)) {
        let alg = CausalAlgebra::new(&c, 20).unwrap();
        for kind in [UnionKind::Delta, UnionKind::Nabla] {
            let members = alg.family(kind).to_vec();
            for &a in &members {
                for &a2 in members.iter().filter(|&&x| a & !x == 0) {
                    for &b in &members {
                        if let (Ok(small), Ok(big)) = (alg.union_masks(a, b, kind), alg.union_masks(a2, b, kind)) {
                            // Cross-strict unions collapse to ∅ and are exempt.
                            if small != 0 && big != 0 {
                                prop_assert_eq!(small & !big, 0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intersections_stay_causal_under_crossing(c in poset(10)) {
        prop_assume!(c.crossing_property().holds());
        let alg = CausalAlgebra::new(&c, 20).unwrap();
        for kind in [UnionKind::Delta, UnionKind::Nabla] {
            let members = alg.family(kind).to_vec();
            for &a in &members {
                for &b in &members {
                    let r = alg.intersect_causal(&alg.set(a), &alg.set(b));
                    prop_assert!(!matches!(r, Err(AlgebraError::TheoremViolation(_))));
                }
            }
        }
    }

    #[test]
    fn crossing_agrees_with_oracle(c in poset(8)) {
        prop_assert_eq!(c.crossing_property().holds(), Poset::of(&c).crossing_holds());
    }

    #[test]
    fn product_lattices_cross(rows in 1usize..6, cols in 1usize..6) {
        prop_assert!(fixtures::product_lattice(rows, cols).crossing_property().holds());
    }

    #[test]
    fn ribbons_and_regularity_agree_with_oracle(c in poset(6)) {
        let e = RibbonEngine::new(&c, Caps::default()).unwrap();
        let o = Poset::of(&c);
        for p in 0..c.len() {
            let pairs: Vec<(u32, u32)> = e
                .ribbon(p)
                .pairs
                .iter()
                .map(|rp| (e.algebra().mask(&rp.upper) as u32, e.algebra().mask(&rp.lower) as u32))
                .collect();
            let mut expected = o.ribbon(p);
            let mut got = pairs.clone();
            expected.sort_unstable();
            got.sort_unstable();
            prop_assert_eq!(got, expected);
            for (rp, &pair) in e.ribbon(p).pairs.iter().zip(&pairs) {
                prop_assert_eq!(e.is_dense(p, rp).unwrap(), o.dense(p, pair));
            }
            prop_assert_eq!(e.is_regular_ribbon(p).regular, o.regular_ribbon(p));
        }
    }

    #[test]
    fn congruence_is_reflexive_and_symmetric(c in poset(8)) {
        let e = RibbonEngine::new(&c, Caps::default()).unwrap();
        for p in 0..c.len() {
            let pairs = e.ribbon(p).pairs;
            for x in &pairs {
                prop_assert!(e.congruent(p, x, x).unwrap());
                for y in &pairs {
                    match (e.congruent(p, x, y), e.congruent(p, y, x)) {
                        (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                        (Err(ReconstructionError::NotCongruentDecidable { .. }), Err(ReconstructionError::NotCongruentDecidable { .. })) => {}
                        other => prop_assert!(false, "asymmetric outcome {:?}", other),
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_output_is_a_partial_order(c in poset(8)) {
        let report = RibbonEngine::new(&c, Caps::default()).unwrap().report();
        prop_assert!(report.theorem_violations.is_empty(), "{:?}", report.theorem_violations);
        prop_assert!(verify_t_reversal(&c, Caps::default()).unwrap().all_hold());
    }

    #[test]
    fn measure_monotone_when_axioms_hold(c in poset(7), bumps in proptest::collection::vec(0.0f64..1e-10, 128)) {
        let mut i = 0;
        let sigma = CausalMeasure::from_fn(&c, MeasureKind::Divergent, Caps::default(), |s| {
            i += 1;
            if s.len() <= 1 { 1.0 } else { 1.0 + bumps[i % bumps.len()] * s.len() as f64 }
        })
        .unwrap();
        if verify_measure_axioms(&c, &sigma).unwrap().all_hold() {
            let mono = verify_monotonicity(&c, &sigma, Caps::default()).unwrap();
            prop_assert!(mono.all_hold(), "{}", mono.to_json_lines());
        }
    }

    #[test]
    fn entropy_is_additive_on_the_equality_case(sa in 1.0f64..1e6, sb in 1.0f64..1e6, k_b in 0.1f64..10.0) {
        let joint = formal_entropy(sa * sb, k_b).value;
        let parts = formal_entropy(sa, k_b).value + formal_entropy(sb, k_b).value;
        prop_assert!((joint - parts).abs() <= 1e-9 * joint.abs().max(1.0));
    }

    #[test]
    fn tsallis_with_unit_q_never_decreases(sa in 0.0f64..100.0, sb in 0.0f64..100.0) {
        prop_assert!(tsallis_compose(sa, sb, 1.0, 1.0) >= sa);
        prop_assert!(find_tsallis_violations(&[sa, sb], &[1.0], 1.0).is_empty());
    }

    #[test]
    fn sprinkled_orders_survive_boosts(seed in any::<u64>(), phi in -2.0f64..2.0) {
        let cfg = SprinkleConfig { d: 1, bounds: vec![(0.0, 1.0), (0.0, 1.0)], n: 40, seed, mode: SprinkleMode::UniformIid };
        let (c, events) = sprinkle(&cfg).unwrap();
        let boosted: Vec<Event> = events.iter().map(|e| boost(e, phi)).collect();
        prop_assert_eq!(induced_causality(&boosted).unwrap().relation_matrix(), c.relation_matrix());
        prop_assert_eq!(sprinkle(&cfg).unwrap().1, events);
    }

    #[test]
    fn truncated_cone_entropy_scales_quadratically(t in 0.01f64..100.0) {
        let origin = Event::new(vec![0.0; 4]);
        let s = |t| horizon_entropy(&ConeSetDescriptor::future_cone(origin.clone(), Some(t)), 1.0).unwrap().value;
        prop_assert!((s(2.0 * t) / s(t) - 4.0).abs() < 1e-12);
    }
}

#[test]
fn point_reversal_distributes_over_set_operations() {
    for (rows, cols) in [(2, 3), (2, 4), (3, 2)] {
        let c = fixtures::product_lattice(rows, cols);
        let t = ReversalMap::point_map(&c, lattice_reflection(rows, cols)).unwrap();
        let n = c.len();
        let all: Vec<PointSet> = (0..1u64 << n).map(|m| subset_of(&c, m)).collect();
        for a in &all {
            let ta = t.apply(a);
            assert_eq!(&t.apply(&ta), a);
            assert_eq!(c.is_convergent(a), c.is_divergent(&ta));
            for b in &all {
                let tb = t.apply(b);
                assert_eq!(t.apply(&(a & b)), &ta & &tb);
                assert_eq!(t.apply(&(a | b)), &ta | &tb);
            }
        }
    }
}

#[test]
fn congruent_pairs_cross_meet_in_the_basepoint() {
    // Exhaustive over a batch of random 8-point orders plus the lattices.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let mut orders = vec![fixtures::l33(), fixtures::l5(), fixtures::product_lattice(2, 4)];
    for _ in 0..40 {
        let n = 8;
        let cover: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| j > i && rng.gen_bool(0.3)).collect()).collect();
        orders.push(Causality::from_cover((0..n).map(|i| format!("v{i}")).collect(), &cover).unwrap());
    }
    for c in orders {
        let e = RibbonEngine::new(&c, Caps::default()).unwrap();
        for p in 0..c.len() {
            let pairs = e.ribbon(p).pairs;
            for x in &pairs {
                for y in &pairs {
                    if let Ok(true) = e.congruent(p, x, y) {
                        let bit = PointSet::singleton(c.len(), p);
                        assert_eq!(&x.upper & &y.lower, bit);
                        assert_eq!(&x.lower & &y.upper, bit);
                    }
                }
            }
        }
    }
}

#[test]
fn lattice_future_cones_are_divergent_and_complete() {
    for k in 1..=4 {
        let cfg = SprinkleConfig {
            d: 1,
            bounds: vec![(0.0, k as f64), (0.0, k as f64)],
            n: 0,
            seed: 0,
            mode: SprinkleMode::IntegerLattice,
        };
        let (c, events) = sprinkle(&cfg).unwrap();
        for apex in &events {
            for cut in 0..=2 * k {
                let y = ConeSetDescriptor::future_cone(apex.clone(), Some(cut as f64 / 2.0));
                let ys = canonical_set_points(&y, &events).unwrap();
                assert!(c.is_causally_complete(&ys) && c.is_divergent(&ys));
                let x = ConeSetDescriptor::past_cone(apex.clone(), Some(cut as f64 / 2.0));
                let xs = canonical_set_points(&x, &events).unwrap();
                assert!(c.is_causally_complete(&xs) && c.is_convergent(&xs));
            }
        }
    }
}

#[test]
fn monte_carlo_matches_analytic_areas() {
    use std::f64::consts::PI;
    for (i, r) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let y = ConeSetDescriptor::future_cone(Event::new(vec![0.0; 4]), Some(r));
        let mc = monte_carlo_cross_section(&y, r, 1_000_000, 100 + i as u64).unwrap();
        let exact = horizon_area(&y, r).unwrap();
        assert_eq!(exact, 4.0 * PI * r * r);
        assert!((mc - exact).abs() / exact < 0.01, "R = {r}: {mc} vs {exact}");
    }
}
