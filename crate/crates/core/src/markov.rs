//! The particle interchange chain behind the periodic Heisenberg chain, and a
//! lazy random walk of the circuit string on its configuration graph.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{BrickworkCircuit, UnraveledSchedule};
use crate::configspace::ConfigGraph;
use crate::error::{Error, Result};
use crate::linalg::real_symmetric_eigen;
use crate::operators::balanced_sector;

/// Largest `n` for which the interchange matrix is built explicitly.
pub const MAX_EXPLICIT_SITES: usize = 14;

/// Largest configuration graph for exact distribution iteration.
pub const MAX_ITERATED_VERTICES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct InterchangeChain {
    pub n: usize,
    /// Balanced bit strings, ascending; qubit 1 is the most significant bit.
    pub states: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// `P(x, y) = (1/n) sum_i <y| P_{i,i+1} |x>` on the ring, over strings with
/// `n/2` ones.
pub fn transition_matrix(n: usize) -> Result<InterchangeChain> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Parity {
            what: "n",
            value: n,
        });
    }
    if n > MAX_EXPLICIT_SITES {
        return Err(Error::TooLarge(format!("interchange chain on {n} sites")));
    }
    let states = balanced_sector(n);
    let index: std::collections::HashMap<usize, usize> =
        states.iter().enumerate().map(|(i, &z)| (z, i)).collect();
    let dim = states.len();
    let mut p = DMatrix::<f64>::zeros(dim, dim);
    for (col, &x) in states.iter().enumerate() {
        for i in 1..=n {
            let j = i % n + 1;
            let (si, sj) = (n - i, n - j);
            let (bi, bj) = ((x >> si) & 1, (x >> sj) & 1);
            let y = (x & !(1 << si) & !(1 << sj)) | (bj << si) | (bi << sj);
            p[(index[&y], col)] += 1.0 / n as f64;
        }
    }
    Ok(InterchangeChain {
        n,
        states,
        matrix: p,
    })
}

/// Second largest eigenvalue of the interchange matrix.
pub fn exact_beta1(n: usize) -> Result<f64> {
    let chain = transition_matrix(n)?;
    let (vals, _) = real_symmetric_eigen(&chain.matrix);
    Ok(vals[vals.len() - 2])
}

/// `1 - 12 / ((n+1)(n/2+1) n)`.
pub fn beta1_bound(n: usize) -> f64 {
    let nf = n as f64;
    1.0 - 12.0 / ((nf + 1.0) * (nf / 2.0 + 1.0) * nf)
}

/// Lazy walk on the configuration graph: hold with probability 1/2,
/// otherwise pick one of the `n` bonds uniformly and take its move if the
/// configuration admits one. Its transition matrix is `I - L(G)/(2n)`.
#[derive(Debug, Clone)]
pub struct LazyWalk {
    pub graph: ConfigGraph,
    /// `moves[v][b]`: neighbour reached from `v` through bond `b + 1`.
    moves: Vec<Vec<Option<usize>>>,
    adjacency: Vec<Vec<usize>>,
    bonds: usize,
}

impl LazyWalk {
    pub fn new(s: &UnraveledSchedule) -> Result<Self> {
        let graph = ConfigGraph::build(s)?;
        let bonds = s.n();
        let mut moves = vec![vec![None; bonds]; graph.len()];
        for e in graph.edges() {
            let b = s.gate_times()[e.gate].bond - 1;
            for (from, to) in [(e.a, e.b), (e.b, e.a)] {
                if moves[from][b].replace(to).is_some() {
                    return Err(Error::OutOfRange(format!(
                        "bond {} has two moves at vertex {from}",
                        b + 1
                    )));
                }
            }
        }
        let adjacency = graph.adjacency();
        Ok(LazyWalk {
            graph,
            moves,
            adjacency,
            bonds,
        })
    }

    pub fn from_circuit(c: &BrickworkCircuit) -> Result<Self> {
        Self::new(&c.unravel()?)
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// One step of the exact distribution.
    pub fn evolve(&self, p: &[f64]) -> Vec<f64> {
        let w = 1.0 / (2.0 * self.bonds as f64);
        (0..p.len())
            .map(|y| {
                let deg = self.adjacency[y].len() as f64;
                let inflow: f64 = self.adjacency[y].iter().map(|&x| p[x]).sum();
                p[y] * (1.0 - w * deg) + w * inflow
            })
            .collect()
    }

    pub fn transition_dense(&self) -> DMatrix<f64> {
        let lap = self.graph.laplacian().to_dense().map(|z| z.re);
        DMatrix::identity(self.len(), self.len()) - lap / (2.0 * self.bonds as f64)
    }

    /// Second largest eigenvalue of the lazy transition matrix.
    pub fn beta1(&self) -> f64 {
        let (vals, _) = real_symmetric_eigen(&self.transition_dense());
        vals[vals.len() - 2]
    }

    /// Total-variation distance to uniform over `steps` exact iterations
    /// from `start`; entry `t` is the distance after `t` steps.
    pub fn tv_curve(&self, start: usize, steps: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.len()];
        p[start] = 1.0;
        let mut curve = Vec::with_capacity(steps + 1);
        curve.push(tv_to_uniform(&p));
        for _ in 0..steps {
            p = self.evolve(&p);
            curve.push(tv_to_uniform(&p));
        }
        curve
    }

    pub fn step<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> usize {
        if rng.gen_bool(0.5) {
            return v;
        }
        let b = rng.gen_range(0..self.bonds);
        self.moves[v][b].unwrap_or(v)
    }
}

pub fn tv_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|x| (x - u).abs()).sum::<f64>()
}

/// Least-squares slope of `ln TV` against step count over the tail where
/// `1e-3 >= TV >= 1e-11`, returned as the per-step contraction factor.
pub fn fitted_decay_rate(curve: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .enumerate()
        .filter(|(_, &v)| (1e-11..=1e-3).contains(&v))
        .map(|(t, &v)| (t as f64, v.ln()))
        .collect();
    if pts.len() < 5 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Some((num / den).exp())
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub n: usize,
    #[serde(rename = "D")]
    pub depth: usize,
    pub tv_target: f64,
    /// Smallest step count reaching the target.
    pub steps: usize,
    /// Spectral gap of the generator `L(G)/(2n)`.
    pub generator_gap: f64,
    pub relaxation_time: f64,
    /// `(1/gap) ln(1/tv_target)`.
    pub predicted_steps: f64,
    pub beta1_lazy: f64,
}

pub fn mixing_estimate(walk: &LazyWalk, tv_target: f64, max_steps: usize) -> Result<MixingReport> {
    if walk.len() > MAX_ITERATED_VERTICES {
        return Err(Error::TooLarge(format!("{} vertices", walk.len())));
    }
    let beta1 = walk.beta1();
    let gap = 1.0 - beta1;
    let start = walk.graph.origin().unwrap_or(0);
    let mut steps = 0;
    if tv_target < 1.0 {
        let mut p = vec![0.0; walk.len()];
        p[start] = 1.0;
        while tv_to_uniform(&p) > tv_target {
            if steps == max_steps {
                return Err(Error::NoConvergence {
                    iterations: steps,
                    residual: tv_to_uniform(&p),
                });
            }
            p = walk.evolve(&p);
            steps += 1;
        }
    }
    Ok(MixingReport {
        n: walk.graph.n(),
        depth: walk.graph.depth(),
        tv_target,
        steps,
        generator_gap: gap,
        relaxation_time: 1.0 / gap,
        predicted_steps: if tv_target < 1.0 {
            (1.0 / tv_target).ln() / gap
        } else {
            0.0
        },
        beta1_lazy: beta1,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub steps: u64,
    pub start: usize,
    pub visits: Vec<u64>,
    pub tau_marginal: Vec<u64>,
    pub empirical_tv: f64,
    pub final_vertex: usize,
}

/// Monte Carlo run of the lazy walk from the all-zeros configuration.
pub fn simulate_string(walk: &LazyWalk, steps: u64, seed: u64) -> Result<SimulationReport> {
    let start = walk.graph.origin().unwrap_or(0);
    if walk.graph.degrees()[start] == 0 {
        return Err(Error::FrozenLoops {
            n: walk.graph.n(),
            depth: walk.graph.depth(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visits = vec![0u64; walk.len()];
    let mut v = start;
    for _ in 0..steps {
        v = walk.step(v, &mut rng);
        visits[v] += 1;
    }
    let per_tau = walk.len() / walk.graph.depth();
    let mut tau_marginal = vec![0u64; walk.graph.depth()];
    for (i, &c) in visits.iter().enumerate() {
        tau_marginal[i / per_tau] += c;
    }
    let total = steps.max(1) as f64;
    let freq: Vec<f64> = visits.iter().map(|&c| c as f64 / total).collect();
    Ok(SimulationReport {
        seed,
        steps,
        start,
        visits,
        tau_marginal,
        empirical_tv: tv_to_uniform(&freq),
        final_vertex: v,
    })
}

/// Independent runs with seeds `seed, seed + 1, ...`, in parallel.
pub fn simulate_many(
    walk: &LazyWalk,
    steps: u64,
    seed: u64,
    runs: usize,
) -> Result<Vec<SimulationReport>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| simulate_string(walk, steps, seed.wrapping_add(i)))
        .collect()
}

pub fn tv_curve_csv(curve: &[f64]) -> String {
    let mut s = String::from("step,tv_distance\n");
    for (t, v) in curve.iter().enumerate() {
        writeln!(s, "{t},{v:.17e}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interchange_matrix_is_doubly_stochastic() {
        let chain = transition_matrix(4).unwrap();
        assert_eq!(chain.matrix.nrows(), 6);
        for i in 0..6 {
            assert!((chain.matrix.row(i).sum() - 1.0).abs() < 1e-15);
            assert!((chain.matrix.column(i).sum() - 1.0).abs() < 1e-15);
        }
        assert!((&chain.matrix - chain.matrix.transpose()).abs().max() < 1e-15);
        assert!(matches!(transition_matrix(16), Err(Error::TooLarge(_))));
    }

    #[test]
    fn lazy_walk_matches_laplacian() {
        let c = BrickworkCircuit::identity(4, 4).unwrap();
        let walk = LazyWalk::from_circuit(&c).unwrap();
        let dense = walk.transition_dense();
        let mut p = vec![0.0; walk.len()];
        p[3] = 1.0;
        let a = walk.evolve(&p);
        for (i, v) in a.iter().enumerate() {
            assert!((v - dense[(i, 3)]).abs() < 1e-15);
        }
    }

    #[test]
    fn large_target_needs_no_steps() {
        let walk = LazyWalk::from_circuit(&BrickworkCircuit::identity(4, 4).unwrap()).unwrap();
        assert_eq!(mixing_estimate(&walk, 1.0, 10).unwrap().steps, 0);
    }
}
