use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stham_core::circuit::{BrickworkCircuit, GateKind};
use stham_core::configspace::binomial;
use stham_core::linalg::{c, random_state, CVec};
use stham_core::qma::*;
use stham_core::Error;

fn accept4() -> &'static QmaInstance {
    static INST: OnceLock<QmaInstance> = OnceLock::new();
    INST.get_or_init(|| Toy::Accept.instance(4, 0).unwrap())
}

fn biased4() -> &'static QmaInstance {
    static INST: OnceLock<QmaInstance> = OnceLock::new();
    INST.get_or_init(|| Toy::Biased(0.7).instance(4, 0).unwrap())
}

fn basis_witness(w: usize) -> CVec {
    let mut e = CVec::zeros(4);
    e[w] = c(1.0, 0.0);
    e
}

#[test]
fn audit_passes_on_every_toy() {
    for toy in [Toy::Accept, Toy::Biased(0.3), Toy::Reject, Toy::Noisy(0.2)] {
        let inst = toy.instance(4, 1).unwrap();
        let a = &inst.audit;
        assert!(a.pass, "{}: {a:?}", toy.name());
        assert!(a.causal_circuit <= 1e-10 && a.causal_in <= 1e-10 && a.causal_out <= 1e-10);
        assert!(a.min_invalid_causal >= 1.0);
        assert_eq!(a.block_coupling, 0.0);
    }
}

#[test]
fn history_state_is_a_normalized_zero_mode() {
    let inst = accept4();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let phi = random_state(16, &mut rng);
    let h = inst.history_state(&phi).unwrap();
    assert!((h.norm - 1.0).abs() <= 1e-12);
    assert!(h.energy.abs() <= 1e-12);
    assert!(inst.history_state(&(phi * c(2.0, 0.0))).is_err());
}

#[test]
fn final_clock_count_and_marginals() {
    let inst = biased4();
    for q in 1..=4 {
        assert_eq!(inst.count_at_final(q), binomial(3, 1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi = random_state(16, &mut rng);
    let hist = inst.history_state(&phi).unwrap();
    let out = simulate(&inst.circuit, &phi);
    for q in 1..=4 {
        let direct = prob_one(&out, 4, q);
        assert!(
            (inst.output_marginal(&hist.vector, q) - direct).abs() <= 1e-12,
            "q={q}"
        );
    }
}

#[test]
fn deterministic_acceptance_has_zero_energy() {
    let inst = accept4();
    // Witness qubits (3, 4) = |01>: qubit 4 set.
    let r = yes_energy(inst, &basis_witness(1)).unwrap();
    assert!(r.energy.abs() <= 1e-12 && r.reject_probability.abs() <= 1e-12);
    // Qubit 4 unset: the verifier rejects with certainty.
    let r = yes_energy(inst, &basis_witness(0)).unwrap();
    assert!((r.energy - 1.0 / 8.0).abs() <= 1e-10, "{r:?}");
}

#[test]
fn biased_verifier_energy_matches_rejection_probability() {
    let theta: f64 = 0.7;
    let inst = biased4();
    let (p_max, _) = inst.best_witness().unwrap();
    let eps = 1.0 - p_max;
    assert!((eps - (theta / 2.0).sin().powi(2)).abs() <= 1e-12);
    let r = yes_energy(inst, &basis_witness(1)).unwrap();
    assert!((r.reject_probability - eps).abs() <= 1e-12);
    assert!((r.energy - eps / 8.0).abs() <= 1e-10);
    assert!(r.energy <= eps / 8.0 + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn energy_is_rejection_over_two_depth(seed in any::<u64>()) {
        let inst = biased4();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = yes_energy(inst, &random_state(4, &mut rng)).unwrap();
        prop_assert!(r.pass);
        prop_assert!((r.energy - r.reject_probability / 8.0).abs() <= 1e-10);
    }
}

#[test]
fn yes_reports_pass() {
    for toy in [Toy::Accept, Toy::Biased(0.4)] {
        let r = evaluate(toy, 4, 0).unwrap();
        assert_eq!(r.yes_pass, Some(true), "{r:?}");
        assert!(r.exact_lambda_min <= r.a + 1e-12);
    }
}

#[test]
fn rejecting_verifier_is_certified() {
    let inst = Toy::Reject.instance(4, 2).unwrap();
    let r = no_bound(&inst, 0.0).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.exact_lambda_min >= r.certified_bound && r.certified_bound > 0.0);
    assert!(r.lambda1_b >= 1.0);
    assert!((r.ni_worst - (1.0 - 1.0 / 8.0)).abs() <= 1e-10);
    assert_eq!(r.kernel_dim_a, 16);
    assert_eq!(r.rank_sum_first_input, 3);
}

#[test]
fn kernel_projectors_are_orthogonal_and_complete() {
    let inst = Toy::Noisy(0.3).instance(4, 0).unwrap();
    let p = nullspace_projectors(&inst);
    assert_eq!(p.overlap(), 0.0);
    assert_eq!(p.overlap_configs, 0);
    let b = inst.b_valid().unwrap().matrix().diagonal();
    for (x, k) in p.pi_b().iter().zip(&b) {
        assert_eq!(*x, if k.re == 0.0 { 1.0 } else { 0.0 });
    }
    assert_eq!(p.rank_sum_containing(1), binomial(3, 1));
}

#[test]
fn cross_term_respects_its_bound() {
    let delta: f64 = 0.3;
    let inst = Toy::Noisy(delta).instance(4, 0).unwrap();
    let eps = inst.best_witness().unwrap().0;
    assert!((eps - (delta / 2.0).sin().powi(2)).abs() <= 1e-12);
    let r = cross_term(&inst, eps, 64, 9).unwrap();
    assert!(r.pass && r.worst > 0.0, "{r:?}");
}

#[test]
fn accepting_instance_has_overlapping_kernels() {
    assert!(matches!(
        no_bound(accept4(), 0.0),
        Err(Error::KernelsOverlap { .. })
    ));
}

#[test]
fn frozen_loops_are_refused() {
    let c = BrickworkCircuit::build(4, 2, |_, _| GateKind::Cnot).unwrap();
    let err = build_instance(&c, &[1, 2], 2).unwrap_err();
    assert!(matches!(err, Error::FrozenLoops { .. }), "{err}");
}
