use proptest::prelude::*;
use stham_core::circuit::BrickworkCircuit;
use stham_core::markov::*;
use stham_core::operators::momentum_block;

fn walk(n: usize, d: usize) -> LazyWalk {
    LazyWalk::from_circuit(&BrickworkCircuit::identity(n, d).unwrap()).unwrap()
}

#[test]
fn interchange_chain_is_stochastic_with_uniform_fixed_point() {
    let chain = transition_matrix(4).unwrap();
    assert_eq!(chain.matrix.shape(), (6, 6));
    for j in 0..6 {
        let col: f64 = chain.matrix.column(j).sum();
        let row: f64 = chain.matrix.row(j).sum();
        assert!((col - 1.0).abs() <= 1e-15 && (row - 1.0).abs() <= 1e-15);
    }
    let u = nalgebra::DVector::from_element(6, 1.0 / 6.0);
    assert!((&chain.matrix * &u - &u).amax() <= 1e-15);
    assert!((chain.matrix.transpose() * &u - &u).amax() <= 1e-15);
}

#[test]
fn zero_momentum_block_is_n_times_one_minus_p() {
    for n in [4, 6] {
        let chain = transition_matrix(n).unwrap();
        let h0 = momentum_block(n, 4, 0).unwrap().to_dense();
        let dim = chain.states.len();
        let expect = (nalgebra::DMatrix::<f64>::identity(dim, dim) - &chain.matrix) * n as f64;
        let diff = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| (h0[(i, j)].re - expect[(i, j)]).abs() + h0[(i, j)].im.abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12, "n={n}: {diff}");
    }
}

#[test]
fn second_eigenvalue_bounds() {
    assert!(exact_beta1(4).unwrap() <= 0.8 + 1e-15);
    assert!((beta1_bound(4) - 0.8).abs() <= 1e-15);
    assert!((beta1_bound(6) - (1.0 - 1.0 / 14.0)).abs() <= 1e-15);
    for n in [4, 6, 8] {
        assert!(exact_beta1(n).unwrap() <= beta1_bound(n));
    }
}

#[test]
fn exact_mixing_time_tracks_the_spectral_gap() {
    let w = walk(4, 4);
    let r = mixing_estimate(&w, 0.5, 100_000).unwrap();
    assert!(r.steps > 0);
    let ratio = r.steps as f64 / r.predicted_steps;
    assert!((0.1..=10.0).contains(&ratio), "{r:?}");
    assert_eq!(mixing_estimate(&w, 1.0, 10).unwrap().steps, 0);
}

#[test]
fn fitted_decay_matches_the_second_eigenvalue() {
    let w = walk(6, 4);
    let beta1 = w.beta1();
    let curve = w.tv_curve(w.graph.origin().unwrap(), 5000);
    let rate = fitted_decay_rate(&curve).unwrap();
    assert!(((1.0 - rate) - (1.0 - beta1)).abs() <= 0.1 * (1.0 - beta1));
}

#[test]
fn simulation_is_seeded_and_approaches_uniform() {
    let w = walk(4, 4);
    let a = simulate_string(&w, 200_000, 5).unwrap();
    let b = simulate_string(&w, 200_000, 5).unwrap();
    let c = simulate_string(&w, 200_000, 6).unwrap();
    assert_eq!(a.visits, b.visits);
    assert_eq!(a.final_vertex, b.final_vertex);
    assert_ne!(a.visits, c.visits);
    assert_eq!(a.visits.len(), w.len());
    assert_eq!(a.visits.iter().sum::<u64>(), 200_000);
    assert!(a.empirical_tv < 0.05);
}

#[test]
fn frozen_instances_are_refused() {
    let c = BrickworkCircuit::identity(8, 4).unwrap();
    assert!(matches!(
        LazyWalk::from_circuit(&c),
        Err(stham_core::Error::FrozenLoops { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_preserves_probability(weights in proptest::collection::vec(0.0f64..1.0, 24), steps in 1usize..20) {
        let w = walk(4, 4);
        let total: f64 = weights.iter().sum::<f64>().max(1e-9);
        let mut p: Vec<f64> = weights.iter().map(|x| x / total).collect();
        let tv0 = tv_to_uniform(&p);
        for _ in 0..steps {
            p = w.evolve(&p);
        }
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.iter().all(|&x| x >= -1e-15));
        // A lazy reversible chain never moves away from stationarity.
        prop_assert!(tv_to_uniform(&p) <= tv0 + 1e-12);
    }
}
