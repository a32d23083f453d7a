//! Time-configurations: validity, enumeration, string coordinates, and the
//! configuration graph whose Laplacian is the gate-stripped Hamiltonian.
//!
//! Validity on the circular clock combines two conditions for every gate
//! `(q, p)`: the interval rule (no pair split across the gate's complementary
//! arcs) and a light-cone rule (the two clocks sit within circular distance
//! one). The interval rule alone admits configurations that fold around the
//! clock circle, some of them frozen, which breaks the vertex count and the
//! "no frozen loops below `n = 2D`" property; the light-cone rule removes
//! exactly those.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{ClockTerm, Schedule, UnraveledSchedule};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sparse::{BasisTag, SparseHermitian};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimeConfig(pub Vec<u16>);

impl TimeConfig {
    pub fn zeros(n: usize) -> Self {
        TimeConfig(vec![0; n])
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Clock of 1-based qubit `q`.
    pub fn at(&self, q: usize) -> usize {
        self.0[q - 1] as usize
    }
}

/// Bits per clock field when packing configurations into a `u64`.
pub fn clock_bits(clock_size: usize) -> u32 {
    usize::BITS - (clock_size.max(2) - 1).leading_zeros()
}

pub fn pack(t: &[u16], bits: u32) -> u64 {
    assert!(
        t.len() as u32 * bits <= 64,
        "configuration does not fit in 64 bits"
    );
    t.iter().fold(0u64, |acc, &v| (acc << bits) | v as u64)
}

pub fn unpack(key: u64, n: usize, bits: u32) -> TimeConfig {
    let mask = (1u64 << bits) - 1;
    TimeConfig(
        (0..n)
            .map(|i| ((key >> (bits * (n - 1 - i) as u32)) & mask) as u16)
            .collect(),
    )
}

fn circular_distance(a: usize, b: usize, m: usize) -> usize {
    let d = a.abs_diff(b) % m;
    d.min(m - d)
}

/// The interval rule for every gate.
pub fn satisfies_interval_rule(t: &[u16], s: &UnraveledSchedule) -> bool {
    s.gate_times().iter().all(|g| {
        let (tq, tp) = (t[g.qubits.0 - 1] as usize, t[g.qubits.1 - 1] as usize);
        !((g.interval.contains(tq) && g.complement.contains(tp))
            || (g.interval.contains(tp) && g.complement.contains(tq)))
    })
}

/// Every interacting pair has clocks within circular distance one.
pub fn satisfies_light_cone(t: &[u16], s: &UnraveledSchedule) -> bool {
    let m = s.clock_size();
    s.gate_times()
        .iter()
        .all(|g| circular_distance(t[g.qubits.0 - 1] as usize, t[g.qubits.1 - 1] as usize, m) <= 1)
}

pub fn is_valid(t: &[u16], s: &UnraveledSchedule) -> bool {
    t.len() == s.n()
        && t.iter().all(|&v| (v as usize) < s.clock_size())
        && satisfies_interval_rule(t, s)
        && satisfies_light_cone(t, s)
}

/// The `(tau, x)` reparametrization of a valid ring configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StringCoords {
    pub tau: usize,
    pub x: Vec<u8>,
}

impl StringCoords {
    /// `x` read as an integer with `x_1` the most significant bit.
    pub fn x_index(&self) -> usize {
        self.x.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn x_string(&self) -> String {
        self.x
            .iter()
            .map(|b| if *b == 0 { '0' } else { '1' })
            .collect()
    }
}

/// Walks the string: `y_0 = 2 tau` is the height just left of qubit 1 and
/// `y_i = y_{i-1} + (-1)^{x_i}`; qubit `i` sits at `max(y_{i-1}, y_i)`.
pub fn to_string_coords(t: &[u16], s: &UnraveledSchedule) -> Result<StringCoords> {
    if !is_valid(t, s) {
        return Err(Error::InvalidConfig(t.to_vec()));
    }
    let m = s.clock_size() as i64;
    let tau = (t[0] / 2) as usize;
    let y0 = 2 * tau as i64;
    let mut y = y0;
    let mut x = Vec::with_capacity(t.len());
    for &ti in t {
        let ti = ti as i64;
        if ti == y.rem_euclid(m) {
            y -= 1;
            x.push(1);
        } else if ti == (y + 1).rem_euclid(m) {
            y += 1;
            x.push(0);
        } else {
            return Err(Error::InvalidConfig(t.to_vec()));
        }
    }
    if y != y0 {
        return Err(Error::InvalidConfig(t.to_vec()));
    }
    Ok(StringCoords { tau, x })
}

pub fn from_string_coords(sc: &StringCoords, s: &UnraveledSchedule) -> Result<TimeConfig> {
    if sc.x.len() != s.n() || sc.x.iter().any(|&b| b > 1) {
        return Err(Error::OutOfRange(format!(
            "bit string of length {}",
            sc.x.len()
        )));
    }
    if sc.tau >= s.depth() {
        return Err(Error::OutOfRange(format!("counter tau = {}", sc.tau)));
    }
    let imbalance: i64 = sc.x.iter().map(|&b| if b == 0 { 1 } else { -1 }).sum();
    if imbalance != 0 {
        return Err(Error::Unbalanced(imbalance));
    }
    let m = s.clock_size() as i64;
    let mut y = 2 * sc.tau as i64;
    let mut t = Vec::with_capacity(sc.x.len());
    for &b in &sc.x {
        let next = if b == 0 { y + 1 } else { y - 1 };
        t.push(y.max(next).rem_euclid(m) as u16);
        y = next;
    }
    Ok(TimeConfig(t))
}

/// Balanced bit strings of length `n`, ascending as integers.
pub fn balanced_strings(n: usize) -> Vec<Vec<u8>> {
    (0usize..1 << n)
        .filter(|z| z.count_ones() as usize * 2 == n)
        .map(|z| (0..n).map(|i| ((z >> (n - 1 - i)) & 1) as u8).collect())
        .collect()
}

/// Rank of a balanced string in `balanced_strings` order.
pub fn balanced_index(n: usize) -> HashMap<usize, usize> {
    (0usize..1 << n)
        .filter(|z| z.count_ones() as usize * 2 == n)
        .enumerate()
        .map(|(i, z)| (z, i))
        .collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn check_ring_regime(s: &UnraveledSchedule) -> Result<()> {
    let (n, d) = (s.n(), s.depth());
    if n % (2 * d) == 0 {
        return Err(Error::FrozenLoops { n, depth: d });
    }
    if 2 * d <= n {
        return Err(Error::DepthTooShallow {
            depth: d,
            half: n / 2,
        });
    }
    Ok(())
}

/// Valid configurations in `(tau, x)` lexicographic order; this is the basis
/// order used by every valid-sector operator.
pub fn enumerate_valid(s: &UnraveledSchedule) -> Result<Vec<TimeConfig>> {
    check_ring_regime(s)?;
    let strings = balanced_strings(s.n());
    (0..s.depth())
        .into_par_iter()
        .map(|tau| {
            strings
                .iter()
                .map(|x| from_string_coords(&StringCoords { tau, x: x.clone() }, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()
        .map(|blocks| blocks.into_iter().flatten().collect())
}

/// Every valid configuration, found by depth-first search with pairwise
/// pruning. Works in any regime, including those with frozen loops.
pub fn enumerate_all_valid(s: &UnraveledSchedule) -> Vec<TimeConfig> {
    let n = s.n();
    let m = s.clock_size();
    let pair_ok = |t: &[u16], q: usize, p: usize| -> bool {
        s.gate_times()
            .iter()
            .filter(|g| (g.qubits == (q, p)) || (g.qubits == (p, q)))
            .all(|g| {
                let (tq, tp) = (t[g.qubits.0 - 1] as usize, t[g.qubits.1 - 1] as usize);
                circular_distance(tq, tp, m) <= 1
                    && !((g.interval.contains(tq) && g.complement.contains(tp))
                        || (g.interval.contains(tp) && g.complement.contains(tq)))
            })
    };
    let mut out = Vec::new();
    let mut t = vec![0u16; n];
    fn dfs(
        i: usize,
        t: &mut Vec<u16>,
        n: usize,
        m: usize,
        pair_ok: &dyn Fn(&[u16], usize, usize) -> bool,
        out: &mut Vec<TimeConfig>,
    ) {
        if i == n {
            if pair_ok(t, n, 1) {
                out.push(TimeConfig(t.clone()));
            }
            return;
        }
        for v in 0..m {
            t[i] = v as u16;
            if i == 0 || pair_ok(t, i, i + 1) {
                dfs(i + 1, t, n, m, pair_ok, out);
            }
        }
    }
    dfs(0, &mut t, n, m, &pair_ok, &mut out);
    out
}

/// Exhaustive filter of all `(2D)^n` configurations through `is_valid`.
pub fn brute_force_valid(s: &UnraveledSchedule) -> Vec<TimeConfig> {
    let n = s.n();
    let m = s.clock_size();
    let total = m.pow(n as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|mut code| {
            let mut t = vec![0u16; n];
            for i in (0..n).rev() {
                t[i] = (code % m) as u16;
                code /= m;
            }
            is_valid(&t, s).then_some(TimeConfig(t))
        })
        .collect()
}

/// Target of the forward move of `term` from `t`, if its clocks all read
/// `step - 1`.
pub fn forward_target(t: &[u16], term: &ClockTerm, sched: &Schedule) -> Option<Vec<u16>> {
    let from = sched.from_clock(term.step) as u16;
    if term.qubits.iter().all(|&q| t[q - 1] == from) {
        let to = sched.to_clock(term.step) as u16;
        let mut next = t.to_vec();
        for &q in &term.qubits {
            next[q - 1] = to;
        }
        Some(next)
    } else {
        None
    }
}

/// Target of the backward move of `term` from `t`, if its clocks all read
/// `step`.
pub fn backward_target(t: &[u16], term: &ClockTerm, sched: &Schedule) -> Option<Vec<u16>> {
    let to = sched.to_clock(term.step) as u16;
    if term.qubits.iter().all(|&q| t[q - 1] == to) {
        let from = sched.from_clock(term.step) as u16;
        let mut next = t.to_vec();
        for &q in &term.qubits {
            next[q - 1] = from;
        }
        Some(next)
    } else {
        None
    }
}

/// Number of term applications (forward or backward) available at `t`.
pub fn degree(t: &[u16], sched: &Schedule) -> usize {
    sched
        .terms
        .iter()
        .map(|term| {
            forward_target(t, term, sched).is_some() as usize
                + backward_target(t, term, sched).is_some() as usize
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub gate: usize,
    /// Circular step whose forward move takes `a` to `b`.
    pub step: usize,
}

#[derive(Debug, Clone)]
pub struct ConfigGraph {
    n: usize,
    depth: usize,
    bits: u32,
    vertices: Vec<TimeConfig>,
    index: HashMap<u64, usize>,
    edges: Vec<Edge>,
    degrees: Vec<usize>,
    labels: Vec<String>,
}

impl ConfigGraph {
    /// Graph on the `(tau, x)`-ordered valid configurations.
    pub fn build(s: &UnraveledSchedule) -> Result<Self> {
        let vertices = enumerate_valid(s)?;
        Ok(Self::from_vertices(s, vertices))
    }

    /// Graph on an explicit vertex list. Moves leaving the list are ignored.
    pub fn from_vertices(s: &UnraveledSchedule, vertices: Vec<TimeConfig>) -> Self {
        let sched = s.schedule();
        let bits = clock_bits(s.clock_size());
        let index: HashMap<u64, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (pack(&v.0, bits), i))
            .collect();
        let edges: Vec<Edge> = vertices
            .par_iter()
            .enumerate()
            .flat_map_iter(|(a, v)| {
                let mut local = Vec::new();
                for term in &sched.terms {
                    if let Some(w) = forward_target(&v.0, term, &sched) {
                        if let Some(&b) = index.get(&pack(&w, bits)) {
                            local.push(Edge {
                                a,
                                b,
                                gate: term.gate,
                                step: term.step,
                            });
                        }
                    }
                }
                local
            })
            .collect();
        let mut degrees = vec![0; vertices.len()];
        for e in &edges {
            degrees[e.a] += 1;
            degrees[e.b] += 1;
        }
        let labels = s
            .circuit()
            .gates()
            .iter()
            .map(|g| {
                format!(
                    "{}@{}[{},{}]",
                    g.kind.label(),
                    g.layer,
                    g.qubits.0,
                    g.qubits.1
                )
            })
            .collect();
        ConfigGraph {
            n: s.n(),
            depth: s.depth(),
            bits,
            vertices,
            index,
            edges,
            degrees,
            labels,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertices(&self) -> &[TimeConfig] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn index_of(&self, t: &[u16]) -> Option<usize> {
        self.index.get(&pack(t, self.bits)).copied()
    }

    pub fn origin(&self) -> Option<usize> {
        self.index_of(&vec![0; self.n])
    }

    pub fn basis_tag(&self) -> BasisTag {
        BasisTag::new(format!(
            "configs(n={},D={},|V|={})",
            self.n,
            self.depth,
            self.len()
        ))
    }

    /// Adjacency lists, each sorted by neighbour index.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        adj
    }

    pub fn laplacian(&self) -> SparseHermitian {
        let mut t: Vec<(usize, usize, C64)> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, i, C64::new(d as f64, 0.0)))
            .collect();
        for e in &self.edges {
            t.push((e.a, e.b, C64::new(-1.0, 0.0)));
            t.push((e.b, e.a, C64::new(-1.0, 0.0)));
        }
        SparseHermitian::from_triplets(self.len(), t, self.basis_tag())
            .expect("Laplacian is symmetric")
    }

    /// Vertices reachable from `start` by breadth-first search.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.reachable_from(0).iter().all(|&b| b)
    }

    pub fn edges_csv(&self) -> String {
        let mut s = String::from("source,target,gate\n");
        for e in &self.edges {
            writeln!(s, "{},{},{}", e.a, e.b, self.labels[e.gate]).unwrap();
        }
        s
    }

    pub fn vertices_csv(&self, sched: &UnraveledSchedule) -> String {
        let mut s = String::from("index");
        for q in 1..=self.n {
            write!(s, ",t_{q}").unwrap();
        }
        s.push_str(",tau,x\n");
        for (i, v) in self.vertices.iter().enumerate() {
            write!(s, "{i}").unwrap();
            for &c in &v.0 {
                write!(s, ",{c}").unwrap();
            }
            match to_string_coords(&v.0, sched) {
                Ok(sc) => writeln!(s, ",{},{}", sc.tau, sc.x_string()).unwrap(),
                Err(_) => s.push_str(",,\n"),
            }
        }
        s
    }
}

/// Valid configurations that no term can move.
pub fn detect_frozen(s: &UnraveledSchedule) -> Vec<TimeConfig> {
    let sched = s.schedule();
    enumerate_all_valid(s)
        .into_par_iter()
        .filter(|t| degree(&t.0, &sched) == 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BrickworkCircuit, GateKind};

    fn sched(n: usize, d: usize) -> UnraveledSchedule {
        BrickworkCircuit::build(n, d, |_, _| GateKind::Cnot)
            .unwrap()
            .unravel()
            .unwrap()
    }

    #[test]
    fn spot_validity() {
        let s = sched(4, 4);
        assert!(is_valid(&[0, 0, 0, 0], &s));
        assert!(!is_valid(&[1, 0, 0, 0], &s));
        assert!(is_valid(&[1, 1, 0, 0], &s));
        assert!(!is_valid(&[8, 0, 0, 0], &s));
    }

    #[test]
    fn folded_configuration_passes_intervals_but_not_light_cone() {
        let s = sched(4, 4);
        let t = [5, 2, 3, 4];
        assert!(satisfies_interval_rule(&t, &s));
        assert!(!satisfies_light_cone(&t, &s));
        assert_eq!(degree(&t, &s.schedule()), 0);
    }

    #[test]
    fn origin_string_pattern() {
        let s = sched(6, 4);
        let sc = to_string_coords(&[0; 6], &s).unwrap();
        assert_eq!(sc.tau, 0);
        assert_eq!(sc.x_string(), "101010");
    }

    #[test]
    fn unbalanced_string_rejected() {
        let s = sched(4, 4);
        let err = from_string_coords(
            &StringCoords {
                tau: 0,
                x: vec![0, 0, 0, 1],
            },
            &s,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Unbalanced(2)));
        assert!(matches!(
            to_string_coords(&[1, 0, 0, 0], &s),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn packing_round_trips() {
        let bits = clock_bits(12);
        assert_eq!(bits, 4);
        let t = [11u16, 0, 5, 7, 3];
        assert_eq!(unpack(pack(&t, bits), 5, bits).0, t.to_vec());
        assert_eq!(clock_bits(4), 2);
        assert_eq!(clock_bits(8), 3);
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_valid(&sched(4, 4)).unwrap().len(), 24);
        assert_eq!(enumerate_valid(&sched(2, 2)).unwrap().len(), 4);
        assert!(matches!(
            enumerate_valid(&sched(8, 4)),
            Err(Error::FrozenLoops { .. })
        ));
        assert!(matches!(
            enumerate_valid(&sched(6, 2)),
            Err(Error::DepthTooShallow { .. })
        ));
    }

    #[test]
    fn two_qubit_graph_is_a_four_cycle() {
        let g = ConfigGraph::build(&sched(2, 2)).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges().len(), 4);
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert!(g.is_connected());
    }

    #[test]
    fn csv_exports_have_headers() {
        let s = sched(2, 2);
        let g = ConfigGraph::build(&s).unwrap();
        assert!(g.edges_csv().starts_with("source,target,gate\n"));
        let v = g.vertices_csv(&s);
        assert!(v.starts_with("index,t_1,t_2,tau,x\n0,1,1,0,01\n1,0,0,0,10\n"));
    }
}
