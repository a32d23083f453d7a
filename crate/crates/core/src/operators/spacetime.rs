//! Spacetime circuit Hamiltonians: every qubit carries its own clock, and a
//! two-qubit gate term advances both clocks together while applying the gate.
//!
//! Basis index is `config_index * 2^n + z`, with `z` the computational
//! state (qubit 1 most significant).

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::circuit::{apply_gate, BrickworkCircuit, GeneralCircuit, Schedule};
use crate::configspace::{clock_bits, pack, ConfigGraph, TimeConfig};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat, CVec, C64, ONE, ZERO};
use crate::sparse::{BasisTag, CsrMatrix, SparseHermitian};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Valid configurations only, in `(tau, x)` order.
    ValidOnly,
    /// Every configuration, indexed by the base-`(clock size)` number
    /// `t_1 t_2 ... t_n`.
    Full,
}

#[derive(Debug, Clone)]
enum Layout {
    Full,
    Explicit {
        configs: Vec<TimeConfig>,
        index: HashMap<u64, usize>,
        bits: u32,
    },
}

/// An ordered set of time-configurations.
#[derive(Debug, Clone)]
pub struct ConfigSet {
    n: usize,
    clock_size: usize,
    layout: Layout,
    tag: String,
}

impl ConfigSet {
    pub fn full(n: usize, clock_size: usize) -> Result<Self> {
        let total = (clock_size as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if total > 1 << 26 {
            return Err(Error::TooLarge(format!("{clock_size}^{n} configurations")));
        }
        Ok(ConfigSet {
            n,
            clock_size,
            layout: Layout::Full,
            tag: format!("allconfigs(n={n},T={clock_size})"),
        })
    }

    pub fn explicit(n: usize, clock_size: usize, configs: Vec<TimeConfig>, label: &str) -> Self {
        let bits = clock_bits(clock_size);
        let index = configs
            .iter()
            .enumerate()
            .map(|(i, t)| (pack(&t.0, bits), i))
            .collect();
        let tag = format!("{label}(n={n},T={clock_size},|V|={})", configs.len());
        ConfigSet {
            n,
            clock_size,
            layout: Layout::Explicit {
                configs,
                index,
                bits,
            },
            tag,
        }
    }

    pub fn from_graph(g: &ConfigGraph) -> Self {
        Self::explicit(g.n(), 2 * g.depth(), g.vertices().to_vec(), "valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clock_size(&self) -> usize {
        self.clock_size
    }

    pub fn len(&self) -> usize {
        match &self.layout {
            Layout::Full => self.clock_size.pow(self.n as u32),
            Layout::Explicit { configs, .. } => configs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn config(&self, i: usize) -> Vec<u16> {
        match &self.layout {
            Layout::Full => {
                let mut t = vec![0u16; self.n];
                let mut code = i;
                for slot in t.iter_mut().rev() {
                    *slot = (code % self.clock_size) as u16;
                    code /= self.clock_size;
                }
                t
            }
            Layout::Explicit { configs, .. } => configs[i].0.clone(),
        }
    }

    pub fn index_of(&self, t: &[u16]) -> Option<usize> {
        if t.len() != self.n || t.iter().any(|&v| v as usize >= self.clock_size) {
            return None;
        }
        match &self.layout {
            Layout::Full => Some(
                t.iter()
                    .fold(0usize, |acc, &v| acc * self.clock_size + v as usize),
            ),
            Layout::Explicit { index, bits, .. } => index.get(&pack(t, *bits)).copied(),
        }
    }

    pub fn config_tag(&self) -> &str {
        &self.tag
    }

    /// Tag of the joint configuration ⊗ qubit space.
    pub fn tag(&self) -> BasisTag {
        BasisTag::new(format!("{}⊗qubits(n={})", self.tag, self.n))
    }

    pub fn dim(&self) -> usize {
        self.len() << self.n
    }
}

fn local_index(n: usize, z: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((z >> (n - q)) & 1))
}

fn with_local(n: usize, z: usize, qubits: &[usize], r: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(z, |w, (b, &q)| {
        let bit = (r >> (k - 1 - b)) & 1;
        (w & !(1 << (n - q))) | (bit << (n - q))
    })
}

/// Projection of the schedule's propagation terms onto the configuration
/// set: `-(M (x) |to><from| + h.c.) + |to><to| + |from><from|` for every term.
pub fn schedule_hamiltonian(sched: &Schedule, configs: &ConfigSet) -> Result<SparseHermitian> {
    let n = sched.n;
    let dim_q = 1usize << n;
    let blocks: Vec<Vec<(usize, usize, C64)>> = (0..configs.len())
        .into_par_iter()
        .map(|c| {
            let t = configs.config(c);
            let mut out = Vec::new();
            for term in &sched.terms {
                let from = sched.from_clock(term.step) as u16;
                let to = sched.to_clock(term.step) as u16;
                let at_from = term.qubits.iter().all(|&q| t[q - 1] == from);
                let at_to = term.qubits.iter().all(|&q| t[q - 1] == to);
                if at_from || at_to {
                    out.extend((0..dim_q).map(|z| (c * dim_q + z, c * dim_q + z, ONE)));
                }
                if !at_from {
                    continue;
                }
                let mut next = t.clone();
                for &q in &term.qubits {
                    next[q - 1] = to;
                }
                let Some(c2) = configs.index_of(&next) else {
                    continue;
                };
                let k = 1usize << term.qubits.len();
                for z in 0..dim_q {
                    let l = local_index(n, z, &term.qubits);
                    for r in 0..k {
                        let a = term.matrix[(r, l)];
                        if a != ZERO {
                            let w = with_local(n, z, &term.qubits, r);
                            out.push((c2 * dim_q + w, c * dim_q + z, -a));
                            out.push((c * dim_q + z, c2 * dim_q + w, -a.conj()));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let t = blocks.into_iter().flatten().collect();
    SparseHermitian::from_triplets(configs.dim(), t, configs.tag())
}

/// A circuit Hamiltonian together with its configuration basis.
#[derive(Debug, Clone)]
pub struct CircuitHamiltonian {
    pub operator: SparseHermitian,
    pub configs: ConfigSet,
}

/// The ring circuit Hamiltonian on the circular clock.
pub fn spacetime_hamiltonian(c: &BrickworkCircuit, kind: BasisKind) -> Result<CircuitHamiltonian> {
    let s = c.unravel()?;
    let configs = match kind {
        BasisKind::ValidOnly => ConfigSet::from_graph(&ConfigGraph::build(&s)?),
        BasisKind::Full => ConfigSet::full(c.n(), s.clock_size())?,
    };
    let operator = schedule_hamiltonian(&s.schedule(), &configs)?;
    Ok(CircuitHamiltonian { operator, configs })
}

/// Linear-clock Hamiltonian (`0..=D`) of a general circuit, either on the
/// valid configurations or on all of them.
pub fn linear_hamiltonian(c: &GeneralCircuit, kind: BasisKind) -> Result<CircuitHamiltonian> {
    let full = ConfigSet::full(c.n(), c.depth() + 1)?;
    let configs = match kind {
        BasisKind::Full => full,
        BasisKind::ValidOnly => {
            let valid = (0..full.len())
                .map(|i| full.config(i))
                .filter(|t| c.is_valid_linear(t))
                .map(TimeConfig)
                .collect();
            ConfigSet::explicit(c.n(), c.depth() + 1, valid, "linearvalid")
        }
    };
    let operator = schedule_hamiltonian(&c.linear_schedule(), &configs)?;
    Ok(CircuitHamiltonian { operator, configs })
}

/// Ring Hamiltonian with every gate replaced by its fractional power.
pub fn interpolated_hamiltonian(
    c: &BrickworkCircuit,
    eps: f64,
    kind: BasisKind,
) -> Result<CircuitHamiltonian> {
    spacetime_hamiltonian(&c.interpolated(eps)?, kind)
}

/// `L(G) (x) I_{2^n}` in the valid-configuration basis.
pub fn laplacian_tensor_identity(g: &ConfigGraph) -> SparseHermitian {
    let lap = g.laplacian();
    let dim_q = 1usize << g.n();
    let t = lap
        .matrix()
        .triplets()
        .into_iter()
        .flat_map(|(i, j, v)| (0..dim_q).map(move |z| (i * dim_q + z, j * dim_q + z, v)))
        .collect();
    let configs = ConfigSet::from_graph(g);
    SparseHermitian::from_triplets(configs.dim(), t, configs.tag()).expect("Laplacian is symmetric")
}

/// Composite unitaries `V(t <- 0)` for every valid configuration.
#[derive(Debug, Clone)]
pub struct PathUnitaryTable {
    n: usize,
    unitaries: Vec<CMat>,
    tag: BasisTag,
    /// Largest mismatch between `V(b)` and `M V(a)` over all edges.
    pub path_defect: f64,
}

fn embed(n: usize, qubits: &[usize], m: &CMat) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros(dim, dim);
    for col in 0..dim {
        let mut v = CVec::zeros(dim);
        v[col] = ONE;
        apply_gate(&mut v, n, qubits, m);
        out.set_column(col, &v);
    }
    out
}

/// Builds `V(t <- 0)` by breadth-first search from the all-zeros
/// configuration and records the worst path-dependence over every edge.
pub fn disentangle(c: &BrickworkCircuit) -> Result<PathUnitaryTable> {
    let s = c.unravel()?;
    let g = ConfigGraph::build(&s)?;
    let sched = s.schedule();
    let n = c.n();
    let origin = g.origin().ok_or_else(|| Error::InvalidConfig(vec![0; n]))?;
    let by_step: HashMap<(usize, usize), CMat> = sched
        .terms
        .iter()
        .map(|t| ((t.gate, t.step), embed(n, &t.qubits, &t.matrix)))
        .collect();
    let mut out_edges: Vec<Vec<(usize, &CMat, bool)>> = vec![Vec::new(); g.len()];
    for e in g.edges() {
        let m = &by_step[&(e.gate, e.step)];
        out_edges[e.a].push((e.b, m, true));
        out_edges[e.b].push((e.a, m, false));
    }
    let mut table: Vec<Option<CMat>> = vec![None; g.len()];
    table[origin] = Some(CMat::identity(1 << n, 1 << n));
    let mut queue = VecDeque::from([origin]);
    while let Some(v) = queue.pop_front() {
        let here = table[v].clone().unwrap();
        for &(w, m, forward) in &out_edges[v] {
            if table[w].is_none() {
                table[w] = Some(if forward {
                    m * &here
                } else {
                    m.adjoint() * &here
                });
                queue.push_back(w);
            }
        }
    }
    let unreached = table.iter().filter(|u| u.is_none()).count();
    if unreached > 0 {
        return Err(Error::Disconnected { unreached });
    }
    let unitaries: Vec<CMat> = table.into_iter().map(Option::unwrap).collect();
    let path_defect = g
        .edges()
        .par_iter()
        .map(|e| max_abs(&(&unitaries[e.b] - &by_step[&(e.gate, e.step)] * &unitaries[e.a])))
        .reduce(|| 0.0, f64::max);
    Ok(PathUnitaryTable {
        n,
        unitaries,
        tag: ConfigSet::from_graph(&g).tag(),
        path_defect,
    })
}

impl PathUnitaryTable {
    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn unitary(&self, vertex: usize) -> &CMat {
        &self.unitaries[vertex]
    }

    /// `W = sum_t V(t <- 0) (x) |t><t|` in the valid-configuration basis.
    pub fn w_matrix(&self) -> CsrMatrix {
        let d = 1usize << self.n;
        let mut t = Vec::with_capacity(self.unitaries.len() * d * d);
        for (v, u) in self.unitaries.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    if u[(i, j)] != ZERO {
                        t.push((v * d + i, v * d + j, u[(i, j)]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(d * self.len(), d * self.len(), t)
    }

    /// `W^dag H W`.
    pub fn conjugate(&self, h: &SparseHermitian) -> Result<SparseHermitian> {
        if h.basis() != &self.tag {
            return Err(Error::BasisMismatch {
                left: h.basis().to_string(),
                right: self.tag.to_string(),
            });
        }
        let w = self.w_matrix();
        let m = w.adjoint().mul(&h.matrix().mul(&w));
        // Products accumulate rounding; symmetrize before the Hermitian check.
        let sym = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
        SparseHermitian::new(sym, self.tag.clone())
    }

    /// Valid-sector history state `|V(t<-0) phi> (x) |t>` summed uniformly.
    pub fn history_state(&self, phi: &CVec) -> CVec {
        let d = 1usize << self.n;
        let norm = C64::new((self.len() as f64).sqrt().recip(), 0.0);
        let mut out = CVec::zeros(d * self.len());
        for (v, u) in self.unitaries.iter().enumerate() {
            let w = u * phi;
            for z in 0..d {
                out[v * d + z] = w[z] * norm;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn full_indexing_round_trips() {
        let cs = ConfigSet::full(3, 4).unwrap();
        assert_eq!(cs.len(), 64);
        for i in [0, 1, 17, 63] {
            assert_eq!(cs.index_of(&cs.config(i)), Some(i));
        }
        assert_eq!(cs.config(6), vec![0, 1, 2]);
    }

    #[test]
    fn identity_circuit_is_graph_laplacian() {
        let c = BrickworkCircuit::identity(2, 2).unwrap();
        let h = spacetime_hamiltonian(&c, BasisKind::ValidOnly).unwrap();
        let s = c.unravel().unwrap();
        let l = laplacian_tensor_identity(&ConfigGraph::build(&s).unwrap());
        assert_eq!(h.operator.max_diff(&l).unwrap(), 0.0);
    }

    #[test]
    fn single_cnot_disentangles() {
        let c = BrickworkCircuit::build(2, 2, |_, _| GateKind::Cnot).unwrap();
        let h = spacetime_hamiltonian(&c, BasisKind::ValidOnly).unwrap();
        let table = disentangle(&c).unwrap();
        assert!(table.path_defect < 1e-12);
        let l = laplacian_tensor_identity(&ConfigGraph::build(&c.unravel().unwrap()).unwrap());
        assert!(table.conjugate(&h.operator).unwrap().max_diff(&l).unwrap() < 1e-12);
    }
}
