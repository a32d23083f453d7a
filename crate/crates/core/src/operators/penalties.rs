//! Diagonal penalty terms: input initialization, output check, and the
//! causal penalty on invalid configurations.
//!
//! The causal penalty has two parts. The interval part charges every gate
//! whose two clocks sit on opposite arcs of its circular schedule. The
//! triangle part charges, for every bond and each of its qubits at clock
//! `t`, a partner clock outside `{t, c(t)}`, where `c(t)` is the neighbouring
//! clock the partner may legitimately occupy: `t + 1` when the bond does not
//! own the step leaving `t`, and `t - 1` otherwise. Together their zero set is
//! exactly the set of valid configurations.

use std::collections::BTreeSet;

use crate::circuit::{BrickworkCircuit, UnraveledSchedule};
use crate::error::{Error, Result};
use crate::sparse::SparseHermitian;

use super::spacetime::ConfigSet;

/// Qubits that can influence `q_out` through non-identity gates.
pub fn past_causal_cone(c: &BrickworkCircuit, q_out: usize) -> Vec<bool> {
    let mut cone = vec![false; c.n() + 1];
    cone[q_out] = true;
    for layer in (1..=c.depth()).rev() {
        for (_, g) in c.gates_in_layer(layer) {
            if !g.kind.is_identity() && (cone[g.qubits.0] || cone[g.qubits.1]) {
                cone[g.qubits.0] = true;
                cone[g.qubits.1] = true;
            }
        }
    }
    cone
}

pub fn check_causal_cone(c: &BrickworkCircuit, s_in: &[usize], q_out: usize) -> Result<()> {
    let n = c.n();
    if s_in.is_empty() {
        return Err(Error::OutOfRange("empty input set".into()));
    }
    if let Some(&q) = s_in.iter().chain([&q_out]).find(|&&q| q == 0 || q > n) {
        return Err(Error::OutOfRange(format!("qubit {q}")));
    }
    let cone = past_causal_cone(c, q_out);
    match s_in.iter().find(|&&q| !cone[q]) {
        Some(&qubit) => Err(Error::CausalCone { qubit, q_out }),
        None => Ok(()),
    }
}

/// Number of gates whose clocks straddle their interval boundary.
pub fn interval_violations(t: &[u16], s: &UnraveledSchedule) -> usize {
    s.gate_times()
        .iter()
        .filter(|g| {
            let (tq, tp) = (t[g.qubits.0 - 1] as usize, t[g.qubits.1 - 1] as usize);
            (g.interval.contains(tq) && g.complement.contains(tp))
                || (g.interval.contains(tp) && g.complement.contains(tq))
        })
        .count()
}

/// Bonds of the schedule with their qubit pairs, each listed once.
pub fn bonds(s: &UnraveledSchedule) -> Vec<(usize, (usize, usize))> {
    let set: BTreeSet<(usize, (usize, usize))> =
        s.gate_times().iter().map(|g| (g.bond, g.qubits)).collect();
    let mut seen = BTreeSet::new();
    set.into_iter().filter(|(b, _)| seen.insert(*b)).collect()
}

/// Number of violated triangle conditions.
pub fn triangle_violations(t: &[u16], s: &UnraveledSchedule) -> usize {
    let m = s.clock_size();
    let mut count = 0;
    for (bond, (q, p)) in bonds(s) {
        for (top, other) in [(q, p), (p, q)] {
            let tt = t[top - 1] as usize;
            let partner = if s.bond_owns_step(bond, tt + 1) {
                (tt + m - 1) % m
            } else {
                (tt + 1) % m
            };
            let to = t[other - 1] as usize;
            if to != tt && to != partner {
                count += 1;
            }
        }
    }
    count
}

#[derive(Debug, Clone)]
pub struct Penalties {
    pub h_in: SparseHermitian,
    pub h_out: SparseHermitian,
    pub h_causal: SparseHermitian,
    pub h_interval: SparseHermitian,
    pub h_triangle: SparseHermitian,
}

/// The three penalty operators on `configs ⊗ qubits`.
pub fn penalty_terms(
    s: &UnraveledSchedule,
    configs: &ConfigSet,
    s_in: &[usize],
    q_out: usize,
) -> Result<Penalties> {
    check_causal_cone(s.circuit(), s_in, q_out)?;
    let n = s.n();
    let d = s.depth() as u16;
    let dim_q = 1usize << n;
    let len = configs.len();
    let mut h_in = vec![0.0; configs.dim()];
    let mut h_out = vec![0.0; configs.dim()];
    let mut h_interval = vec![0.0; configs.dim()];
    let mut h_triangle = vec![0.0; configs.dim()];
    for c in 0..len {
        let t = configs.config(c);
        let iv = interval_violations(&t, s) as f64;
        let tv = triangle_violations(&t, s) as f64;
        for z in 0..dim_q {
            let i = c * dim_q + z;
            h_interval[i] = iv;
            h_triangle[i] = tv;
            h_in[i] = s_in
                .iter()
                .filter(|&&p| t[p - 1] == 0 && (z >> (n - p)) & 1 == 1)
                .count() as f64;
            if t[q_out - 1] == d && (z >> (n - q_out)) & 1 == 0 {
                h_out[i] = 1.0;
            }
        }
    }
    let causal: Vec<f64> = h_interval
        .iter()
        .zip(&h_triangle)
        .map(|(a, b)| a + b)
        .collect();
    let tag = configs.tag();
    Ok(Penalties {
        h_in: SparseHermitian::from_diagonal(&h_in, tag.clone()),
        h_out: SparseHermitian::from_diagonal(&h_out, tag.clone()),
        h_causal: SparseHermitian::from_diagonal(&causal, tag.clone()),
        h_interval: SparseHermitian::from_diagonal(&h_interval, tag.clone()),
        h_triangle: SparseHermitian::from_diagonal(&h_triangle, tag),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::configspace::is_valid;

    #[test]
    fn causal_zero_set_is_the_valid_set() {
        for (n, d) in [(2, 2), (4, 4), (2, 4), (4, 2)] {
            let s = BrickworkCircuit::build(n, d, |_, _| GateKind::Cnot)
                .unwrap()
                .unravel()
                .unwrap();
            let all = ConfigSet::full(n, 2 * d).unwrap();
            for i in 0..all.len() {
                let t = all.config(i);
                let zero = interval_violations(&t, &s) + triangle_violations(&t, &s) == 0;
                assert_eq!(zero, is_valid(&t, &s), "n={n} D={d} t={t:?}");
            }
        }
    }

    #[test]
    fn interval_rule_alone_misses_folded_states() {
        let s = BrickworkCircuit::identity(4, 4).unwrap().unravel().unwrap();
        let t = [5, 2, 3, 4];
        assert_eq!(interval_violations(&t, &s), 0);
        assert!(triangle_violations(&t, &s) > 0);
    }

    #[test]
    fn causal_cone_check() {
        let c = BrickworkCircuit::identity(4, 4).unwrap();
        assert!(matches!(
            check_causal_cone(&c, &[1], 3),
            Err(Error::CausalCone { qubit: 1, q_out: 3 })
        ));
        assert!(check_causal_cone(&c, &[3], 3).is_ok());
    }
}
