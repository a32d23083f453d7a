use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stham_core::circuit::BrickworkCircuit;
use stham_core::configspace::*;
use stham_core::Error;

fn schedule(n: usize, d: usize) -> stham_core::circuit::UnraveledSchedule {
    BrickworkCircuit::identity(n, d).unwrap().unravel().unwrap()
}

#[test]
fn six_qubit_count_matches_brute_force() {
    let s = schedule(6, 4);
    let mut fast = enumerate_valid(&s).unwrap();
    let mut brute = brute_force_valid(&s);
    assert_eq!(fast.len(), 4 * 20);
    fast.sort_by(|a, b| a.0.cmp(&b.0));
    brute.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(fast, brute);
}

#[test]
fn string_coordinates_are_a_bijection() {
    for (n, d) in [(4, 4), (4, 6), (6, 4), (6, 6)] {
        let s = schedule(n, d);
        let valid = enumerate_valid(&s).unwrap();
        let mut seen = std::collections::HashSet::new();
        for t in &valid {
            let sc = to_string_coords(&t.0, &s).unwrap();
            assert!(sc.tau < d);
            let ones = sc.x.iter().filter(|&&b| b == 1).count();
            assert_eq!(2 * ones, n);
            assert!(seen.insert((sc.tau, sc.x.clone())));
            assert_eq!(&from_string_coords(&sc, &s).unwrap(), t);
        }
        assert_eq!(seen.len(), d * binomial(n, n / 2));
    }
}

#[test]
fn unbalanced_strings_are_rejected() {
    let s = schedule(4, 4);
    let sc = StringCoords {
        tau: 0,
        x: vec![1, 1, 1, 0],
    };
    assert!(matches!(
        from_string_coords(&sc, &s),
        Err(Error::Unbalanced(_))
    ));
}

#[test]
fn graphs_are_connected_with_zero_row_sums() {
    for (n, d) in [(2, 2), (4, 4), (6, 4), (6, 6)] {
        let g = ConfigGraph::build(&schedule(n, d)).unwrap();
        assert!(g.is_connected(), "n={n} D={d}");
        let lap = g.laplacian().to_dense();
        for i in 0..lap.nrows() {
            let row: f64 = lap.row(i).iter().map(|z| z.re).sum();
            assert!(row.abs() <= 1e-12);
        }
        // Every vertex moves along at least one bond.
        assert!(g.degrees().iter().all(|&k| k > 0));
    }
}

#[test]
fn frozen_loops_appear_exactly_when_n_is_a_multiple_of_2d() {
    assert!(!detect_frozen(&schedule(8, 4)).is_empty());
    assert!(!detect_frozen(&schedule(12, 2)).is_empty());
    assert!(detect_frozen(&schedule(4, 4)).is_empty());
    assert!(detect_frozen(&schedule(6, 4)).is_empty());
    assert!(matches!(
        enumerate_valid(&schedule(8, 4)),
        Err(Error::FrozenLoops { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Validity depends only on where gates act, so random gates leave the
    /// configuration set unchanged.
    #[test]
    fn valid_set_is_independent_of_the_gates(seed in any::<u64>(), deep in any::<bool>()) {
        let d = if deep { 6 } else { 4 };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random = BrickworkCircuit::random(4, d, &mut rng).unwrap().unravel().unwrap();
        let a = enumerate_valid(&random).unwrap();
        let b = enumerate_valid(&schedule(4, d)).unwrap();
        prop_assert_eq!(a, b);
    }

    /// Every edge of the graph joins two valid configurations that differ on
    /// exactly the two qubits of one gate.
    #[test]
    fn edges_move_one_gate(pick in 0usize..1000) {
        let s = schedule(6, 4);
        let g = ConfigGraph::build(&s).unwrap();
        let edges = g.edges();
        let e = &edges[pick % edges.len()];
        let (a, b) = (&g.vertices()[e.a], &g.vertices()[e.b]);
        prop_assert!(is_valid(&a.0, &s) && is_valid(&b.0, &s));
        let moved: Vec<usize> = (1..=6).filter(|&q| a.0[q - 1] != b.0[q - 1]).collect();
        let (q, p) = s.gate_times()[e.gate].qubits;
        let mut expect = vec![q, p];
        expect.sort();
        prop_assert_eq!(moved, expect);
    }

    #[test]
    fn packing_round_trips(t in proptest::collection::vec(0u16..12, 6)) {
        let bits = clock_bits(12);
        prop_assert_eq!(unpack(pack(&t, bits), 6, bits).0, t);
    }
}
