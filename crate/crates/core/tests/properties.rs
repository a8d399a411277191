use cvgraph::oracle::{apply_gate, graph_to_nullifiers, oracle_measure, states_equal, SymplecticGate};
use cvgraph::verify::{random_basis, random_graph, random_vertex, random_weight, rng};
use cvgraph::{
    compose_byproduct, local_complement, parse_graph, rat, serialize_graph, LocalGaussian, LocalGaussianRecord,
    OutcomeExpr, TrackedState, VertexId, WeightedGraph,
};
use proptest::prelude::*;

fn graph_and_vertex(seed: u64, max: usize) -> (WeightedGraph, VertexId) {
    let mut r = rng(seed);
    let g = random_graph(&mut r, 1, max);
    let a = random_vertex(&mut r, &g);
    (g, a)
}

fn small_rational() -> impl Strategy<Value = cvgraph::Rational> {
    (-5i64..=5, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn local_op() -> impl Strategy<Value = LocalGaussian> {
    let gen = prop_oneof![
        small_rational().prop_map(LocalGaussian::phase),
        small_rational().prop_map(LocalGaussian::phase_x),
        Just(LocalGaussian::fourier()),
        small_rational().prop_map(|s| LocalGaussian::x_shift(OutcomeExpr::constant(s))),
        small_rational().prop_map(|t| LocalGaussian::z_shift(OutcomeExpr::symbol("m").scale(&t))),
    ];
    prop::collection::vec(gen, 1..5).prop_map(|ops| ops.iter().fold(LocalGaussian::identity(), |acc, op| op.after(&acc)))
}

fn record() -> impl Strategy<Value = LocalGaussianRecord> {
    prop::collection::vec((1usize..=3, local_op()), 0..4).prop_map(|entries| {
        let mut rec = LocalGaussianRecord::identity();
        for (i, op) in entries {
            rec.push(cvgraph::v(&i.to_string()), &op);
        }
        rec
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn lc_is_undone_by_negated_delta(seed in any::<u64>(), delta in small_rational()) {
        let (g, a) = graph_and_vertex(seed, 8);
        let back = local_complement(&local_complement(&g, &a, &delta).unwrap(), &a, &-delta).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn lc_only_touches_the_neighborhood(seed in any::<u64>(), delta in small_rational()) {
        let (g, a) = graph_and_vertex(seed, 8);
        let out = local_complement(&g, &a, &delta).unwrap();
        let nbrs: Vec<VertexId> = g.neighbors(&a).unwrap().into_iter().map(|(b, _)| b).collect();
        for (x, y, w) in g.edges() {
            if !(nbrs.contains(x) && nbrs.contains(y)) {
                prop_assert_eq!(&out.weight(x, y), w);
            }
        }
        for (x, y, _) in out.edges() {
            prop_assert!(g.weight(x, y) != rat(0, 1) || (nbrs.contains(x) && nbrs.contains(y)));
        }
    }

    #[test]
    fn graph_json_round_trips(seed in any::<u64>()) {
        let (g, _) = graph_and_vertex(seed, 8);
        let text = serialize_graph(&g);
        prop_assert_eq!(parse_graph(&text).unwrap(), g.clone());
        prop_assert_eq!(serialize_graph(&parse_graph(&text).unwrap()), text);
    }

    #[test]
    fn composition_is_associative(a in record(), b in record(), c in record()) {
        let left = compose_byproduct(&compose_byproduct(&a, &b), &c);
        let right = compose_byproduct(&a, &compose_byproduct(&b, &c));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_is_a_unit_and_inverse_cancels(a in record()) {
        let id = LocalGaussianRecord::identity();
        prop_assert_eq!(compose_byproduct(&id, &a), a.clone());
        prop_assert_eq!(compose_byproduct(&a, &id), a.clone());
        prop_assert!(compose_byproduct(&a, &a.inverse()).is_identity());
        prop_assert!(compose_byproduct(&a.inverse(), &a).is_identity());
    }

    #[test]
    fn composed_byproducts_stay_symplectic(a in record(), b in record()) {
        for (_, s) in compose_byproduct(&a, &b).linear_parts() {
            let e = s.entries();
            prop_assert_eq!(&e[0][0] * &e[1][1] - &e[0][1] * &e[1][0], rat(1, 1));
        }
    }

    #[test]
    fn gate_then_inverse_is_identity(seed in any::<u64>(), eta in small_rational()) {
        let (g, a) = graph_and_vertex(seed, 6);
        let ns = graph_to_nullifiers(&g, &LocalGaussianRecord::identity()).unwrap();
        let b = g.vertices().last().unwrap().clone();
        let mut gates = vec![
            SymplecticGate::Fourier(a.clone()),
            SymplecticGate::Phase(a.clone(), eta.clone()),
            SymplecticGate::PhaseX(a.clone(), eta.clone()),
            SymplecticGate::XShift(a.clone(), OutcomeExpr::symbol("s")),
            SymplecticGate::ZShift(a.clone(), OutcomeExpr::constant(eta.clone())),
        ];
        if a != b {
            gates.push(SymplecticGate::Cz(a.clone(), b, eta));
        }
        for gate in gates {
            let there = apply_gate(&ns, &gate).unwrap();
            prop_assert!(there.is_isotropic());
            let back = apply_gate(&there, &gate.inverse()).unwrap();
            prop_assert!(states_equal(&back, &ns).unwrap());
        }
    }

    #[test]
    fn tracked_lc_keeps_the_physical_state(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 2, 7);
        let a = random_vertex(&mut r, &g);
        let basis = random_basis(&mut r);
        let (s, _) = TrackedState::new(g).measure(&a, &basis, &OutcomeExpr::symbol("m"), None).unwrap();
        let c = random_vertex(&mut r, &s.graph);
        let delta = random_weight(&mut r);
        let t = s.local_complement(&c, &delta).unwrap();
        let before = graph_to_nullifiers(&s.graph, &s.byproduct).unwrap();
        let after = graph_to_nullifiers(&t.graph, &t.byproduct).unwrap();
        prop_assert!(states_equal(&before, &after).unwrap());
    }

    #[test]
    fn measured_systems_stay_isotropic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, 1, 8);
        let a = random_vertex(&mut r, &g);
        let basis = random_basis(&mut r);
        let ns = graph_to_nullifiers(&g, &LocalGaussianRecord::identity()).unwrap();
        let m = oracle_measure(&ns, &a, &basis, &OutcomeExpr::symbol("m")).unwrap();
        prop_assert!(m.system.is_isotropic());
        prop_assert_eq!(m.system.len(), g.order() - 1);
    }
}
