use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stham_core::circuit::*;
use stham_core::linalg::{c, random_state, random_unitary, unitarity_deviation, CMat};

fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn interval_arcs_for_depth_four() {
    let s = BrickworkCircuit::identity(4, 4).unwrap().unravel().unwrap();
    for g in s.gate_times() {
        let l = g.layer;
        assert_eq!(g.forward, l);
        if l < 4 {
            assert_eq!(g.backward, 8 - l);
            assert_eq!((g.interval.start, g.interval.end), (l, 7 - l));
            assert_eq!((g.complement.start, g.complement.end), (8 - l, l - 1));
        } else {
            assert_eq!((g.interval.start, g.interval.end), (4, 7));
            assert_eq!((g.complement.start, g.complement.end), (0, 3));
        }
        assert_eq!(g.interval.len() + g.complement.len(), 8);
        assert!((0..8).all(|t| g.interval.contains(t) != g.complement.contains(t)));
    }
}

#[test]
fn cz_square_root() {
    let half = interpolate_gate(&GateKind::Cz.matrix(), 0.5).unwrap();
    let mut expect = CMat::identity(4, 4);
    expect[(3, 3)] = c(0.0, 1.0);
    assert!(max_diff(&half, &expect) <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn interpolation_is_a_unitary_one_parameter_group(seed in any::<u64>(), a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(4, &mut rng);
        let ua = interpolate_gate(&u, a).unwrap();
        let ub = interpolate_gate(&u, b).unwrap();
        let uab = interpolate_gate(&u, a + b).unwrap();
        prop_assert!(unitarity_deviation(&ua) <= 1e-10);
        prop_assert!(max_diff(&(&ua * &ub), &uab) <= 1e-9);
        prop_assert!(max_diff(&interpolate_gate(&u, 1.0).unwrap(), &u) <= 1e-10);
        prop_assert!(max_diff(&interpolate_gate(&u, 0.0).unwrap(), &CMat::identity(4, 4)) <= 1e-12);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), wide in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = if wide { 6 } else { 4 };
        let circ = BrickworkCircuit::random(n, 4, &mut rng).unwrap();
        let back = BrickworkCircuit::from_json_str(&circ.to_json_string()).unwrap();
        prop_assert_eq!(back.n(), n);
        prop_assert_eq!(circ.gates().len(), back.gates().len());
        for x in circ.gates() {
            let y = back.gates().iter().find(|y| (y.layer, y.qubits) == (x.layer, x.qubits)).unwrap();
            let d = max_diff(&x.kind.matrix(), &y.kind.matrix());
            prop_assert!(d == 0.0, "layer {} qubits {:?}: {}", x.layer, x.qubits, d);
        }
    }

    /// Running the forward steps and then the backward steps in circular
    /// order returns every state to itself.
    #[test]
    fn full_clock_cycle_is_the_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = BrickworkCircuit::random(4, 4, &mut rng).unwrap();
        let s = circ.unravel().unwrap();
        let sched = s.schedule();
        let psi0 = random_state(16, &mut rng);
        let mut psi = psi0.clone();
        for term in &sched.terms {
            apply_gate(&mut psi, 4, &term.qubits, &term.matrix);
        }
        prop_assert!((&psi - &psi0).norm() <= 1e-10);
    }
}
