//! Interacting spin-1/2 fermions on a (qubit column) x (clock site) lattice,
//! one fermion per column.
//!
//! Mode ordering is lexicographic in `(column q, site t, species)`, with
//! species `a` (qubit value 0) before `b` (qubit value 1): mode index
//! `((q - 1) T + t) 2 + s`. Operators act on occupation bitmasks with the
//! Jordan-Wigner sign `(-1)^(occupied modes below the acted mode)`.
//!
//! Because every gate term moves a fermion between neighbouring sites of its
//! own column, and a column holds a single fermion, no sign survives inside
//! the one-per-column sector: the sector matrix of every term coincides
//! entrywise with its qubit counterpart under [`equivalence_map`].

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{controlled_block, qubit_bit, Schedule, UnraveledSchedule, UNITARY_TOL};
use crate::configspace::TimeConfig;
use crate::error::{Error, Result};
use crate::linalg::{c, pauli, CMat, C64, ONE, ZERO};
use crate::operators::{bonds, ConfigSet};
use crate::sparse::{BasisTag, CsrMatrix, SparseHermitian};

/// Largest one-per-column sector handled.
pub const SECTOR_CAP: usize = 1728;

/// A column, site pair.
pub type Site = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub n: usize,
    pub clock_size: usize,
}

impl Lattice {
    pub fn new(n: usize, clock_size: usize) -> Result<Self> {
        if n == 0 || clock_size < 2 || 2 * n * clock_size > 64 {
            return Err(Error::OutOfRange(format!(
                "{n} columns of {clock_size} sites"
            )));
        }
        Ok(Lattice { n, clock_size })
    }

    pub fn modes(&self) -> usize {
        2 * self.n * self.clock_size
    }

    /// Mode of species `s` (0 = a, 1 = b) at site `t` of column `q`.
    pub fn mode(&self, q: usize, t: usize, s: usize) -> usize {
        ((q - 1) * self.clock_size + t) * 2 + s
    }

    /// `(column, site, species)` of a mode.
    pub fn locate(&self, mode: usize) -> (usize, usize, usize) {
        let s = mode % 2;
        let cell = mode / 2;
        (cell / self.clock_size + 1, cell % self.clock_size, s)
    }

    fn prev(&self, t: usize) -> usize {
        (t + self.clock_size - 1) % self.clock_size
    }

    /// `n_t[q] = a^dag a + b^dag b`.
    pub fn number(&self, (q, t): Site) -> FermionOperator {
        FermionOperator::number_mode(self.mode(q, t, 0))
            .plus(&FermionOperator::number_mode(self.mode(q, t, 1)))
    }

    /// `N[q]`, the fermion count of column `q`.
    pub fn column_number(&self, q: usize) -> FermionOperator {
        (0..self.clock_size).fold(FermionOperator::zero(), |acc, t| {
            acc.plus(&self.number((q, t)))
        })
    }

    /// `sum_ij u_ij c^dag_{to,i} c_{from,j}` on column `q`.
    fn spin_hop(&self, q: usize, to: usize, from: usize, u: &CMat) -> FermionOperator {
        let mut op = FermionOperator::zero();
        for i in 0..2 {
            for j in 0..2 {
                op.push(
                    u[(i, j)],
                    vec![
                        Op::create(self.mode(q, to, i)),
                        Op::destroy(self.mode(q, from, j)),
                    ],
                );
            }
        }
        op
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Op {
    pub mode: usize,
    pub dagger: bool,
}

impl Op {
    pub fn create(mode: usize) -> Self {
        Op { mode, dagger: true }
    }

    pub fn destroy(mode: usize) -> Self {
        Op {
            mode,
            dagger: false,
        }
    }
}

/// A sum of monomials; each monomial's operators are written left to right
/// and act right to left.
#[derive(Debug, Clone, Default)]
pub struct FermionOperator {
    pub terms: Vec<(C64, Vec<Op>)>,
}

/// `(-1)^(occupied modes below mode)`.
fn jw_sign(mask: u64, mode: usize) -> f64 {
    if (mask & ((1u64 << mode) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl FermionOperator {
    pub fn zero() -> Self {
        FermionOperator { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        FermionOperator {
            terms: vec![(ONE, Vec::new())],
        }
    }

    pub fn number_mode(mode: usize) -> Self {
        FermionOperator {
            terms: vec![(ONE, vec![Op::create(mode), Op::destroy(mode)])],
        }
    }

    pub fn push(&mut self, coef: C64, ops: Vec<Op>) {
        if coef != ZERO {
            self.terms.push((coef, ops));
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        FermionOperator { terms }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(c(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(k, ops)| (k * s, ops.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (k1, o1) in &self.terms {
            for (k2, o2) in &other.terms {
                let mut ops = o1.clone();
                ops.extend_from_slice(o2);
                terms.push((k1 * k2, ops));
            }
        }
        FermionOperator { terms }
    }

    pub fn adjoint(&self) -> Self {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(k, ops)| {
                    let rev = ops
                        .iter()
                        .rev()
                        .map(|o| Op {
                            mode: o.mode,
                            dagger: !o.dagger,
                        })
                        .collect();
                    (k.conj(), rev)
                })
                .collect(),
        }
    }

    /// `X + X^dag`.
    pub fn plus_adjoint(&self) -> Self {
        self.plus(&self.adjoint())
    }

    /// Image of a basis state under one monomial, with its sign.
    pub fn apply_monomial(ops: &[Op], mut mask: u64) -> Option<(u64, f64)> {
        let mut sign = 1.0;
        for op in ops.iter().rev() {
            let bit = 1u64 << op.mode;
            let occupied = mask & bit != 0;
            if occupied == op.dagger {
                return None;
            }
            sign *= jw_sign(mask, op.mode);
            mask ^= bit;
        }
        Some((mask, sign))
    }

    /// `sum_m |dN_q(m) coef_m|`, an upper bound on `||[N[q], H]||`; it
    /// vanishes exactly when every monomial conserves the column count.
    pub fn number_commutator_bound(&self, lat: &Lattice, q: usize) -> f64 {
        self.terms
            .iter()
            .map(|(k, ops)| {
                let delta: i64 = ops
                    .iter()
                    .filter(|o| lat.locate(o.mode).0 == q)
                    .map(|o| if o.dagger { 1 } else { -1 })
                    .sum();
                (delta as f64).abs() * k.norm()
            })
            .sum()
    }

    /// Matrix on a basis; images leaving the basis are an error.
    pub fn matrix_on(&self, basis: &FockBasis) -> Result<CsrMatrix> {
        let rows: Vec<Result<Vec<(usize, usize, C64)>>> = (0..basis.len())
            .into_par_iter()
            .map(|j| {
                let mut out: HashMap<u64, C64> = HashMap::new();
                for (k, ops) in &self.terms {
                    if let Some((m, s)) = Self::apply_monomial(ops, basis.states[j]) {
                        *out.entry(m).or_insert(ZERO) += k * s;
                    }
                }
                let mut col = Vec::with_capacity(out.len());
                for (m, v) in out {
                    if v.norm() < 1e-14 {
                        continue;
                    }
                    let i = basis.index_of(m).ok_or_else(|| {
                        Error::OutOfRange(format!("operator leaves the basis at state {m:#x}"))
                    })?;
                    col.push((i, j, v));
                }
                Ok(col)
            })
            .collect();
        let mut t = Vec::new();
        for r in rows {
            t.extend(r?);
        }
        Ok(CsrMatrix::from_triplets(basis.len(), basis.len(), t))
    }

    pub fn hermitian_on(&self, basis: &FockBasis) -> Result<SparseHermitian> {
        SparseHermitian::new(self.matrix_on(basis)?, basis.tag())
    }
}

/// Occupation basis of the one-fermion-per-column sector, ascending in the
/// bitmask, or any subset of it.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub lattice: Lattice,
    pub states: Vec<u64>,
    index: HashMap<u64, usize>,
    label: String,
}

impl FockBasis {
    /// Every state with exactly one fermion in each column.
    pub fn sector(lattice: Lattice) -> Result<Self> {
        let per = 2 * lattice.clock_size;
        let dim = per.checked_pow(lattice.n as u32).unwrap_or(usize::MAX);
        if dim > SECTOR_CAP {
            return Err(Error::TooLarge(format!(
                "sector of dimension {dim} exceeds {SECTOR_CAP}"
            )));
        }
        let mut states: Vec<u64> = (0..dim)
            .map(|code| {
                let mut rest = code;
                let mut mask = 0u64;
                for q in (1..=lattice.n).rev() {
                    let local = rest % per;
                    rest /= per;
                    mask |= 1 << lattice.mode(q, local / 2, local % 2);
                }
                mask
            })
            .collect();
        states.sort_unstable();
        Ok(Self::from_states(lattice, states, "fock"))
    }

    /// States of the sector whose clock positions satisfy `keep`.
    pub fn filtered(&self, keep: impl Fn(&[u16]) -> bool, label: &str) -> Self {
        let states = self
            .states
            .iter()
            .copied()
            .filter(|&m| {
                keep(
                    &equivalence_map(&self.lattice, m)
                        .expect("sector state")
                        .1
                         .0,
                )
            })
            .collect();
        Self::from_states(self.lattice, states, label)
    }

    fn from_states(lattice: Lattice, states: Vec<u64>, label: &str) -> Self {
        let index = states.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        FockBasis {
            lattice,
            states,
            index,
            label: format!("{label}(n={},T={})", lattice.n, lattice.clock_size),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::new(format!("{}|{}", self.label, self.states.len()))
    }

    /// `index,mask,t_1..t_n,spins` with spins as a bit string, qubit 1 first.
    pub fn to_csv(&self) -> String {
        let n = self.lattice.n;
        let mut out = String::from("index,mask");
        for q in 1..=n {
            let _ = write!(out, ",t_{q}");
        }
        out.push_str(",spins\n");
        for (i, &m) in self.states.iter().enumerate() {
            let (z, t) = equivalence_map(&self.lattice, m).expect("sector state");
            let _ = write!(out, "{i},{m:#x}");
            for v in &t.0 {
                let _ = write!(out, ",{v}");
            }
            let spins: String = (1..=n)
                .map(|q| if qubit_bit(n, z, q) == 1 { '1' } else { '0' })
                .collect();
            let _ = writeln!(out, ",{spins}");
        }
        out
    }
}

/// The qubit state index `z` and clock configuration encoded by a
/// one-per-column occupation: the site of column `q`'s fermion is `t_q` and
/// its species is qubit `q`'s value.
pub fn equivalence_map(lat: &Lattice, mask: u64) -> Result<(usize, TimeConfig)> {
    let n = lat.n;
    let mut t = vec![0u16; n];
    let mut z = 0usize;
    let mut seen = vec![false; n + 1];
    for mode in 0..lat.modes() {
        if mask >> mode & 1 == 0 {
            continue;
        }
        let (q, site, s) = lat.locate(mode);
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::OutOfRange(format!(
                "column {q} holds more than one fermion"
            )));
        }
        t[q - 1] = site as u16;
        z |= s << (n - q);
    }
    if mask >> lat.modes() != 0 || seen[1..].iter().any(|&s| !s) {
        return Err(Error::OutOfRange(format!(
            "state {mask:#x} is outside the one-per-column sector"
        )));
    }
    Ok((z, TimeConfig(t)))
}

/// Inverse of [`equivalence_map`].
pub fn fock_state(lat: &Lattice, z: usize, t: &[u16]) -> u64 {
    (1..=lat.n).fold(0u64, |m, q| {
        m | 1 << lat.mode(q, t[q - 1] as usize, qubit_bit(lat.n, z, q))
    })
}

/// For each basis state, the index `config * 2^n + z` it maps to in `configs`.
pub fn qubit_positions(basis: &FockBasis, configs: &ConfigSet) -> Result<Vec<usize>> {
    basis
        .states
        .iter()
        .map(|&m| {
            let (z, t) = equivalence_map(&basis.lattice, m)?;
            let c = configs
                .index_of(&t.0)
                .ok_or_else(|| Error::InvalidConfig(t.0.clone()))?;
            Ok((c << basis.lattice.n) + z)
        })
        .collect()
}

/// Fermionic operator rewritten in the qubit ordering of `configs`.
pub fn to_qubit_basis(
    h: &SparseHermitian,
    basis: &FockBasis,
    configs: &ConfigSet,
) -> Result<SparseHermitian> {
    let pos = qubit_positions(basis, configs)?;
    if pos.len() != configs.dim() {
        return Err(Error::BasisMismatch {
            left: h.basis().to_string(),
            right: configs.tag().to_string(),
        });
    }
    let t = h
        .matrix()
        .triplets()
        .into_iter()
        .map(|(i, j, v)| (pos[i], pos[j], v))
        .collect();
    SparseHermitian::from_triplets(configs.dim(), t, configs.tag())
}

/// `[C_t^dag - C_{t-1}^dag U^dag][C_t - U C_{t-1}]` on column `q` with
/// hopping strength 1.
pub fn hopping_term(lat: &Lattice, q: usize, t: usize, u: &CMat) -> FermionOperator {
    let prev = lat.prev(t);
    lat.number((q, t))
        .plus(&lat.number((q, prev)))
        .minus(&lat.spin_hop(q, t, prev, u).plus_adjoint())
}

/// `H^I + H^U` for control column `c` and target column `g`, hopping both
/// fermions between sites `t - 1` and `t`.
pub fn cu_term(lat: &Lattice, c: usize, g: usize, t: usize, u: &CMat) -> FermionOperator {
    let prev = lat.prev(t);
    let a = |site: usize| lat.mode(c, site, 0);
    let b = |site: usize| lat.mode(c, site, 1);
    let onsite =
        |m: usize, site: usize| FermionOperator::number_mode(m).mul(&lat.number((g, site)));
    let ctrl_hop = |to: usize, from: usize| FermionOperator {
        terms: vec![(ONE, vec![Op::create(to), Op::destroy(from)])],
    };
    let identity = onsite(a(t), t).plus(&onsite(a(prev), prev)).minus(
        &ctrl_hop(a(t), a(prev))
            .mul(&lat.spin_hop(g, t, prev, &CMat::identity(2, 2)))
            .plus_adjoint(),
    );
    let controlled = onsite(b(t), t).plus(&onsite(b(prev), prev)).minus(
        &ctrl_hop(b(t), b(prev))
            .mul(&lat.spin_hop(g, t, prev, u))
            .plus_adjoint(),
    );
    identity.plus(&controlled)
}

pub fn cnot_term(lat: &Lattice, c: usize, g: usize, t: usize) -> FermionOperator {
    cu_term(lat, c, g, t, &pauli::x())
}

/// `n_a (1 - n_b - n_c)`.
pub fn triangle_operator(lat: &Lattice, a: Site, b: Site, c: Site) -> FermionOperator {
    let na = lat.number(a);
    na.minus(&na.mul(&lat.number(b)))
        .minus(&na.mul(&lat.number(c)))
}

/// Triangles `(top, same clock, partner clock)` for every bond, both
/// orientations and every clock value of the top site. With the top fermion
/// at `t`, the partner may sit at `t` or at the one neighbouring clock the
/// bond's steps connect to `t`.
pub fn triangle_sites(s: &UnraveledSchedule) -> Vec<(Site, Site, Site)> {
    let m = s.clock_size();
    let mut out = Vec::new();
    for (bond, (q, p)) in bonds(s) {
        for (top, other) in [(q, p), (p, q)] {
            for tt in 0..m {
                let partner = if s.bond_owns_step(bond, tt + 1) {
                    (tt + m - 1) % m
                } else {
                    (tt + 1) % m
                };
                out.push(((top, tt), (other, tt), (other, partner)));
            }
        }
    }
    out
}

pub fn triangle_sum(lat: &Lattice, s: &UnraveledSchedule) -> FermionOperator {
    triangle_sites(s)
        .into_iter()
        .fold(FermionOperator::zero(), |acc, (a, b, c)| {
            acc.plus(&triangle_operator(lat, a, b, c))
        })
}

/// The propagation term of one schedule entry.
pub fn schedule_term(lat: &Lattice, sched: &Schedule, term: usize) -> Result<FermionOperator> {
    let term = &sched.terms[term];
    let to = sched.to_clock(term.step);
    if sched.from_clock(term.step) != lat.prev(to) {
        return Err(Error::OutOfRange(format!(
            "step {} does not advance by one site",
            term.step
        )));
    }
    match term.qubits.as_slice() {
        &[q] => Ok(hopping_term(lat, q, to, &term.matrix)),
        &[c, g] => {
            let u = controlled_block(&term.matrix, UNITARY_TOL).ok_or_else(|| {
                Error::NotControlled(format!("gate {} at step {}", term.gate, term.step))
            })?;
            Ok(cu_term(lat, c, g, to, &u))
        }
        other => Err(Error::OutOfRange(format!("term on {} qubits", other.len()))),
    }
}

/// Sum of every propagation term of the schedule.
pub fn circuit_operator(lat: &Lattice, sched: &Schedule) -> Result<FermionOperator> {
    (0..sched.terms.len()).try_fold(FermionOperator::zero(), |acc, i| {
        Ok(acc.plus(&schedule_term(lat, sched, i)?))
    })
}

/// `sum_{t in arc} n_t[q]`.
fn arc_number(lat: &Lattice, q: usize, arc: &crate::circuit::Arc) -> FermionOperator {
    arc.elements()
        .into_iter()
        .fold(FermionOperator::zero(), |acc, t| {
            acc.plus(&lat.number((q, t)))
        })
}

#[derive(Debug, Clone)]
pub struct FermionPenalties {
    pub h_in: FermionOperator,
    pub h_out: FermionOperator,
    pub h_causal: FermionOperator,
}

/// `H_in = sum b_0^dag b_0`, `H_out = a_D^dag a_D` and the interval form of
/// `H_causal`.
pub fn fermionic_penalties(
    lat: &Lattice,
    s: &UnraveledSchedule,
    s_in: &[usize],
    q_out: usize,
) -> FermionPenalties {
    let h_in = s_in.iter().fold(FermionOperator::zero(), |acc, &q| {
        acc.plus(&FermionOperator::number_mode(lat.mode(q, 0, 1)))
    });
    let h_out = FermionOperator::number_mode(lat.mode(q_out, s.depth(), 0));
    let h_causal = s
        .gate_times()
        .iter()
        .fold(FermionOperator::zero(), |acc, g| {
            let (q, p) = g.qubits;
            let term = arc_number(lat, q, &g.interval)
                .mul(&arc_number(lat, p, &g.complement))
                .plus(&arc_number(lat, p, &g.interval).mul(&arc_number(lat, q, &g.complement)));
            acc.plus(&term)
        });
    FermionPenalties {
        h_in,
        h_out,
        h_causal,
    }
}

/// Occupations `(n_{t-1}[c], n_t[c], n_{t-1}[g], n_t[g])` of a gate's corners.
pub fn corner_pattern(lat: &Lattice, mask: u64, c: usize, g: usize, t: usize) -> [u8; 4] {
    let prev = lat.prev(t);
    let occ = |q: usize, site: usize| {
        (((mask >> lat.mode(q, site, 0)) | (mask >> lat.mode(q, site, 1))) & 1) as u8
    };
    [occ(c, prev), occ(c, t), occ(g, prev), occ(g, t)]
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    #[serde(rename = "T")]
    pub clock_size: usize,
    pub sector_dim: usize,
    pub valid_dim: usize,
    pub qubit_valid_dim: usize,
    /// Largest entry of the fermionic minus the qubit circuit operator on the
    /// whole sector, after the equivalence map.
    pub entry_diff: f64,
    pub spectral_diff: f64,
    pub number_commutator: f64,
    pub triangle_diff: f64,
    pub triangle_commutator: f64,
    pub causal_commutator: f64,
    pub pass: bool,
}

/// Certifies the fermionic construction of a ring circuit against the qubit
/// one.
pub fn equivalence_report(circuit: &crate::circuit::BrickworkCircuit) -> Result<EquivalenceReport> {
    use crate::operators::{penalty_terms, spacetime_hamiltonian, BasisKind};
    use crate::spectra::{full_spectrum, multiset_distance};

    let s = circuit.unravel()?;
    let sched = s.schedule();
    let lat = Lattice::new(circuit.n(), s.clock_size())?;
    let sector = FockBasis::sector(lat)?;
    let h_op = circuit_operator(&lat, &sched)?;
    let h = h_op.hermitian_on(&sector)?;

    let full = spacetime_hamiltonian(circuit, BasisKind::Full)?;
    let entry_diff = to_qubit_basis(&h, &sector, &full.configs)?.max_diff(&full.operator)?;

    let valid_q = spacetime_hamiltonian(circuit, BasisKind::ValidOnly)?;
    let valid = sector.filtered(|t| crate::configspace::is_valid(t, &s), "fockvalid");
    let hv = h_op.hermitian_on(&valid)?;
    let spectral_diff = multiset_distance(&full_spectrum(&hv), &full_spectrum(&valid_q.operator));

    let number_commutator = (1..=lat.n)
        .map(|q| h_op.number_commutator_bound(&lat, q))
        .fold(0.0, f64::max);

    let tri = triangle_sum(&lat, &s).hermitian_on(&sector)?;
    let pens = penalty_terms(&s, &full.configs, &[1], 1)?;
    let triangle_diff = to_qubit_basis(&tri, &sector, &full.configs)?.max_diff(&pens.h_triangle)?;
    let mut triangle_commutator = 0.0f64;
    for i in 0..sched.terms.len() {
        let term = schedule_term(&lat, &sched, i)?.hermitian_on(&sector)?;
        triangle_commutator = triangle_commutator.max(tri.commutator(&term)?.max_abs());
    }
    let causal = fermionic_penalties(&lat, &s, &[1], 1)
        .h_causal
        .hermitian_on(&sector)?;
    let causal_commutator = causal.commutator(&h)?.max_abs();
    let pass = entry_diff <= 1e-12
        && spectral_diff <= 1e-9
        && valid.len() == valid_q.configs.dim()
        && number_commutator <= 1e-12
        && triangle_diff == 0.0
        && triangle_commutator <= 1e-12
        && causal_commutator <= 1e-10;
    Ok(EquivalenceReport {
        n: lat.n,
        clock_size: lat.clock_size,
        sector_dim: sector.len(),
        valid_dim: valid.len(),
        qubit_valid_dim: valid_q.configs.dim(),
        entry_diff,
        spectral_diff,
        number_commutator,
        triangle_diff,
        triangle_commutator,
        causal_commutator,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommuting_signs() {
        // c_0^dag c_1^dag |0> = -c_1^dag c_0^dag |0>.
        let a = FermionOperator::apply_monomial(&[Op::create(0), Op::create(1)], 0).unwrap();
        let b = FermionOperator::apply_monomial(&[Op::create(1), Op::create(0)], 0).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, -b.1);
        assert!(FermionOperator::apply_monomial(&[Op::create(0)], 1).is_none());
    }

    #[test]
    fn map_round_trips() {
        let lat = Lattice::new(2, 4).unwrap();
        let sector = FockBasis::sector(lat).unwrap();
        assert_eq!(sector.len(), 64);
        for &m in &sector.states {
            let (z, t) = equivalence_map(&lat, m).unwrap();
            assert_eq!(fock_state(&lat, z, &t.0), m);
        }
        assert!(equivalence_map(&lat, 0b11).is_err());
        assert!(equivalence_map(&lat, 0b1).is_err());
    }

    #[test]
    fn csv_header() {
        let lat = Lattice::new(2, 2).unwrap();
        let csv = FockBasis::sector(lat).unwrap().to_csv();
        assert!(
            csv.starts_with("index,mask,t_1,t_2,spins\n0,0x11,0,0,00\n"),
            "{csv}"
        );
    }
}
