//! Brickwork ring circuits, their circular-time unraveling, and the generic
//! clock schedules consumed by the Hamiltonian builders.
//!
//! Qubits and layers are 1-based throughout, matching how circuits are
//! written down. Bond `b` joins qubits `b` and `b % n + 1`; odd layers use
//! the odd bonds and even layers the even bonds, so the first gate on
//! qubit 1 pairs it with qubit 2.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, check_unitary, identity, max_abs, pauli, random_unitary, CMat, CVec, C64, ONE, ZERO,
};

/// Unitarity tolerance for every gate matrix accepted by the crate.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Identity,
    Cnot,
    Cz,
    /// Block-diagonal `diag(I, u)` on `|q,p>` with `q` the control.
    ControlledU(CMat),
    General(CMat),
}

impl GateKind {
    /// 4x4 matrix, row-major on `|q,p>` with `q` the first listed qubit.
    pub fn matrix(&self) -> CMat {
        match self {
            GateKind::Identity => identity(4),
            GateKind::Cnot => controlled(&pauli::x()),
            GateKind::Cz => controlled(&pauli::z()),
            GateKind::ControlledU(m) | GateKind::General(m) => m.clone(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            GateKind::Identity => "I",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::ControlledU(_) => "CU",
            GateKind::General(_) => "U",
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GateKind::Identity => true,
            GateKind::Cnot | GateKind::Cz => false,
            GateKind::ControlledU(m) | GateKind::General(m) => max_abs(&(m - identity(4))) == 0.0,
        }
    }

    /// The 2x2 block applied to the target when the control reads 1, when
    /// the gate has controlled form.
    pub fn controlled_target(&self) -> Option<CMat> {
        match self {
            GateKind::Identity => Some(identity(2)),
            GateKind::Cnot => Some(pauli::x()),
            GateKind::Cz => Some(pauli::z()),
            GateKind::ControlledU(m) | GateKind::General(m) => controlled_block(m, UNITARY_TOL),
        }
    }

    fn validate(&self, layer: usize, q: usize, p: usize) -> Result<()> {
        let bad = |reason: String| Error::BadGate {
            layer,
            q,
            p,
            reason,
        };
        if let GateKind::ControlledU(m) | GateKind::General(m) = self {
            if m.nrows() != 4 || m.ncols() != 4 {
                return Err(bad(format!(
                    "gate matrix must be 4x4, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_unitary(m, UNITARY_TOL)?;
            if matches!(self, GateKind::ControlledU(_))
                && controlled_block(m, UNITARY_TOL).is_none()
            {
                return Err(bad("CU matrix is not of the form diag(I, u)".into()));
            }
        }
        Ok(())
    }
}

/// `diag(I, u)` for a 2x2 `u`.
pub fn controlled(u: &CMat) -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m.view_mut((2, 2), (2, 2)).copy_from(u);
    m
}

/// Returns `u` if `m = diag(I, u)` to within `tol`.
pub fn controlled_block(m: &CMat, tol: f64) -> Option<CMat> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return None;
    }
    let ctrl = controlled(&m.view((2, 2), (2, 2)).into_owned());
    if max_abs(&(m - &ctrl)) <= tol {
        Some(m.view((2, 2), (2, 2)).into_owned())
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSpec {
    pub layer: usize,
    pub qubits: (usize, usize),
    pub kind: GateKind,
}

/// Bond joining `q` and `p` that is active in `layer`, if any.
pub fn bond_for_layer(n: usize, layer: usize, q: usize, p: usize) -> Option<usize> {
    let mut candidates = Vec::new();
    if p == q % n + 1 {
        candidates.push(q);
    }
    if q == p % n + 1 {
        candidates.push(p);
    }
    candidates.into_iter().find(|b| b % 2 == layer % 2)
}

pub fn bond_qubits(n: usize, bond: usize) -> (usize, usize) {
    (bond, bond % n + 1)
}

fn check_parity(what: &'static str, value: usize) -> Result<()> {
    if value < 2 || !value.is_multiple_of(2) {
        return Err(Error::Parity { what, value });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrickworkCircuit {
    n: usize,
    depth: usize,
    gates: Vec<GateSpec>,
}

impl BrickworkCircuit {
    /// Fills every brickwork slot from `assign(layer, bond)`; the last layer
    /// is always Identity regardless of the assignment.
    pub fn build(
        n: usize,
        depth: usize,
        assign: impl Fn(usize, usize) -> GateKind,
    ) -> Result<Self> {
        check_parity("n", n)?;
        check_parity("D", depth)?;
        let mut gates = Vec::with_capacity(n * depth / 2);
        for layer in 1..=depth {
            for bond in (1..=n).filter(|b| b % 2 == layer % 2) {
                let kind = if layer == depth {
                    GateKind::Identity
                } else {
                    assign(layer, bond)
                };
                gates.push(GateSpec {
                    layer,
                    qubits: bond_qubits(n, bond),
                    kind,
                });
            }
        }
        Self::from_gates(n, depth, gates)
    }

    pub fn identity(n: usize, depth: usize) -> Result<Self> {
        Self::build(n, depth, |_, _| GateKind::Identity)
    }

    /// Haar-random two-qubit gate in every slot below the last layer.
    pub fn random<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Result<Self> {
        check_parity("n", n)?;
        check_parity("D", depth)?;
        let mut mats = Vec::new();
        for layer in 1..depth {
            for bond in (1..=n).filter(|b| b % 2 == layer % 2) {
                mats.push(((layer, bond), random_unitary(4, rng)));
            }
        }
        Self::build(n, depth, |layer, bond| {
            let m = &mats
                .iter()
                .find(|(key, _)| *key == (layer, bond))
                .unwrap()
                .1;
            GateKind::General(m.clone())
        })
    }

    /// Validates an explicit gate list. The last layer is not required to be
    /// Identity here; `unravel` enforces that.
    pub fn from_gates(n: usize, depth: usize, mut gates: Vec<GateSpec>) -> Result<Self> {
        check_parity("n", n)?;
        check_parity("D", depth)?;
        let mut seen = vec![vec![false; n + 1]; depth + 1];
        for g in &gates {
            let (q, p) = g.qubits;
            let bad = |reason: &str| Error::BadGate {
                layer: g.layer,
                q,
                p,
                reason: reason.to_string(),
            };
            if g.layer == 0 || g.layer > depth {
                return Err(bad("layer out of range"));
            }
            if q == 0 || p == 0 || q > n || p > n {
                return Err(bad("qubit index out of range"));
            }
            if q == p {
                return Err(bad("a gate needs two distinct qubits"));
            }
            if p != q % n + 1 && q != p % n + 1 {
                return Err(bad("qubits are not ring neighbours"));
            }
            if bond_for_layer(n, g.layer, q, p).is_none() {
                return Err(bad("bond is not active in this layer of the brickwork"));
            }
            g.kind.validate(g.layer, q, p)?;
            for qubit in [q, p] {
                if seen[g.layer][qubit] {
                    return Err(Error::OverlappingSupport {
                        layer: g.layer,
                        qubit,
                    });
                }
                seen[g.layer][qubit] = true;
            }
        }
        for (layer, row) in seen.iter().enumerate().skip(1) {
            if let Some(qubit) = (1..=n).find(|&q| !row[q]) {
                return Err(Error::IdleQubit { layer, qubit });
            }
        }
        gates.sort_by_key(|g| {
            (
                g.layer,
                bond_for_layer(n, g.layer, g.qubits.0, g.qubits.1).unwrap(),
            )
        });
        Ok(BrickworkCircuit { n, depth, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    /// Number of gates, `nD/2`.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn bond_of(&self, gate: usize) -> usize {
        let g = &self.gates[gate];
        bond_for_layer(self.n, g.layer, g.qubits.0, g.qubits.1).unwrap()
    }

    pub fn gates_in_layer(&self, layer: usize) -> impl Iterator<Item = (usize, &GateSpec)> {
        self.gates
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.layer == layer)
    }

    pub fn is_real(&self) -> bool {
        self.gates
            .iter()
            .all(|g| g.kind.matrix().iter().all(|z| z.im == 0.0))
    }

    /// The same circuit with each gate replaced by `f(gate)`.
    pub fn map_gates(&self, f: impl Fn(&GateSpec) -> Result<GateKind>) -> Result<Self> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                Ok(GateSpec {
                    layer: g.layer,
                    qubits: g.qubits,
                    kind: f(g)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_gates(self.n, self.depth, gates)
    }

    /// Every gate's matrix replaced by `exp(eps log U)`.
    pub fn interpolated(&self, eps: f64) -> Result<Self> {
        self.map_gates(|g| match g.kind {
            GateKind::Identity => Ok(GateKind::Identity),
            _ => Ok(GateKind::General(interpolate_gate(&g.kind.matrix(), eps)?)),
        })
    }

    pub fn unravel(&self) -> Result<UnraveledSchedule> {
        UnraveledSchedule::new(self)
    }

    /// Linear-time schedule: clocks run over `0..=D`, step `l` carries layer `l`.
    pub fn linear_schedule(&self) -> Schedule {
        Schedule {
            n: self.n,
            clock_size: self.depth + 1,
            circular: false,
            terms: self
                .gates
                .iter()
                .enumerate()
                .map(|(i, g)| ClockTerm {
                    step: g.layer,
                    qubits: vec![g.qubits.0, g.qubits.1],
                    matrix: g.kind.matrix(),
                    gate: i,
                    inverse: false,
                })
                .collect(),
        }
    }

    pub fn to_general(&self) -> GeneralCircuit {
        GeneralCircuit {
            n: self.n,
            depth: self.depth,
            gates: self
                .gates
                .iter()
                .map(|g| LocalGate {
                    layer: g.layer,
                    qubits: vec![g.qubits.0, g.qubits.1],
                    matrix: g.kind.matrix(),
                })
                .collect(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: CircuitJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut gates = Vec::with_capacity(raw.gates.len());
        for g in raw.gates {
            let matrix = match &g.matrix {
                Some(entries) => {
                    if entries.len() != 16 {
                        return Err(Error::Parse(format!(
                            "gate at layer {}: matrix needs 16 entries, got {}",
                            g.layer,
                            entries.len()
                        )));
                    }
                    Some(CMat::from_row_iterator(
                        4,
                        4,
                        entries.iter().map(|[re, im]| c(*re, *im)),
                    ))
                }
                None => None,
            };
            let kind = match (g.kind.as_str(), matrix) {
                ("I", None) => GateKind::Identity,
                ("CNOT", None) => GateKind::Cnot,
                ("CZ", None) => GateKind::Cz,
                ("CU", Some(m)) => GateKind::ControlledU(m),
                ("U", Some(m)) => GateKind::General(m),
                ("CU" | "U", None) => {
                    return Err(Error::Parse(format!(
                        "gate at layer {}: kind {} needs a matrix",
                        g.layer, g.kind
                    )))
                }
                ("I" | "CNOT" | "CZ", Some(_)) => {
                    return Err(Error::Parse(format!(
                        "gate at layer {}: kind {} takes no matrix",
                        g.layer, g.kind
                    )))
                }
                (other, _) => return Err(Error::Parse(format!("unknown gate kind {other:?}"))),
            };
            gates.push(GateSpec {
                layer: g.layer,
                qubits: (g.qubits[0], g.qubits[1]),
                kind,
            });
        }
        Self::from_gates(raw.n, raw.depth, gates)
    }

    pub fn to_json_string(&self) -> String {
        let raw = CircuitJson {
            n: self.n,
            depth: self.depth,
            gates: self
                .gates
                .iter()
                .map(|g| GateJson {
                    layer: g.layer,
                    qubits: [g.qubits.0, g.qubits.1],
                    kind: g.kind.label().to_string(),
                    matrix: match &g.kind {
                        GateKind::ControlledU(m) | GateKind::General(m) => {
                            Some(m.transpose().iter().map(|z| [z.re, z.im]).collect())
                        }
                        _ => None,
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("circuit serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    n: usize,
    #[serde(rename = "D")]
    depth: usize,
    gates: Vec<GateJson>,
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    layer: usize,
    qubits: [usize; 2],
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

/// `exp(eps log U)` with the principal logarithm. An eigenvalue at exactly
/// `-1` is assigned phase `+pi`, so `CZ` at `eps = 1/2` becomes `diag(1,1,1,i)`.
pub fn interpolate_gate(u: &CMat, eps: f64) -> Result<CMat> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("interpolation parameter {eps}")));
    }
    check_unitary(u, UNITARY_TOL)?;
    let (q, t) = u.clone().schur().unpack();
    let dim = u.nrows();
    let mut d = CMat::zeros(dim, dim);
    for j in 0..dim {
        let mut phase = t[(j, j)].arg();
        if phase <= -std::f64::consts::PI + 1e-12 {
            phase = std::f64::consts::PI;
        }
        d[(j, j)] = C64::from_polar(1.0, eps * phase);
    }
    Ok(&q * d * q.adjoint())
}

/// A circular arc `[start, end]` of `Z_modulus`, inclusive at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub start: usize,
    pub end: usize,
    pub modulus: usize,
}

impl Arc {
    pub fn contains(&self, t: usize) -> bool {
        let m = self.modulus;
        (t % m + m - self.start) % m <= (self.end + m - self.start) % m
    }

    pub fn len(&self) -> usize {
        (self.end + self.modulus - self.start) % self.modulus + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.len())
            .map(|k| (self.start + k) % self.modulus)
            .collect()
    }
}

/// Where one gate lives on the circular clock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateTimes {
    pub gate: usize,
    pub bond: usize,
    pub qubits: (usize, usize),
    pub layer: usize,
    /// Step carrying `U`.
    pub forward: usize,
    /// Step carrying `U^dag` (or the trivial undo of the Identity layer).
    pub backward: usize,
    pub interval: Arc,
    pub complement: Arc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnraveledSchedule {
    circuit: BrickworkCircuit,
    times: Vec<GateTimes>,
}

impl UnraveledSchedule {
    fn new(c: &BrickworkCircuit) -> Result<Self> {
        let (n, d) = (c.n, c.depth);
        if c.gates_in_layer(d).any(|(_, g)| !g.kind.is_identity()) {
            return Err(Error::LastLayerNotIdentity { depth: d });
        }
        let modulus = 2 * d;
        let times = c
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let forward = g.layer;
                let backward = if g.layer == d { 2 * d } else { 2 * d - g.layer };
                GateTimes {
                    gate: i,
                    bond: bond_for_layer(n, g.layer, g.qubits.0, g.qubits.1).unwrap(),
                    qubits: g.qubits,
                    layer: g.layer,
                    forward,
                    backward,
                    interval: Arc {
                        start: forward,
                        end: backward - 1,
                        modulus,
                    },
                    complement: Arc {
                        start: backward % modulus,
                        end: forward - 1,
                        modulus,
                    },
                }
            })
            .collect();
        Ok(UnraveledSchedule {
            circuit: c.clone(),
            times,
        })
    }

    pub fn circuit(&self) -> &BrickworkCircuit {
        &self.circuit
    }

    pub fn n(&self) -> usize {
        self.circuit.n
    }

    pub fn depth(&self) -> usize {
        self.circuit.depth
    }

    /// Number of clock values, `2D`.
    pub fn clock_size(&self) -> usize {
        2 * self.circuit.depth
    }

    pub fn gate_times(&self) -> &[GateTimes] {
        &self.times
    }

    /// Gates acting at circular step `s` in `1..=2D`, with whether the step
    /// carries the inverse.
    pub fn step(&self, s: usize) -> Vec<(usize, bool)> {
        self.times
            .iter()
            .filter_map(|g| {
                if g.forward == s {
                    Some((g.gate, false))
                } else if g.backward == s {
                    Some((g.gate, true))
                } else {
                    None
                }
            })
            .collect()
    }

    /// Whether bond `bond` carries a term at step `s` (steps taken mod `2D`,
    /// with label `2D` standing for 0).
    pub fn bond_owns_step(&self, bond: usize, s: usize) -> bool {
        let m = self.clock_size();
        let s = if s.is_multiple_of(m) { m } else { s % m };
        self.times
            .iter()
            .any(|g| g.bond == bond && (g.forward == s || g.backward == s))
    }

    pub fn schedule(&self) -> Schedule {
        let mut terms = Vec::with_capacity(2 * self.times.len());
        for s in 1..=self.clock_size() {
            for (gate, inverse) in self.step(s) {
                let u = self.circuit.gates[gate].kind.matrix();
                terms.push(ClockTerm {
                    step: s,
                    qubits: vec![
                        self.circuit.gates[gate].qubits.0,
                        self.circuit.gates[gate].qubits.1,
                    ],
                    matrix: if inverse { u.adjoint() } else { u },
                    gate,
                    inverse,
                });
            }
        }
        Schedule {
            n: self.n(),
            clock_size: self.clock_size(),
            circular: true,
            terms,
        }
    }
}

/// One propagation term: advances the clocks of `qubits` from `step - 1` to
/// `step` while applying `matrix` to their state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockTerm {
    pub step: usize,
    pub qubits: Vec<usize>,
    pub matrix: CMat,
    pub gate: usize,
    pub inverse: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub n: usize,
    pub clock_size: usize,
    pub circular: bool,
    pub terms: Vec<ClockTerm>,
}

impl Schedule {
    pub fn from_clock(&self, step: usize) -> usize {
        step - 1
    }

    pub fn to_clock(&self, step: usize) -> usize {
        if self.circular {
            step % self.clock_size
        } else {
            step
        }
    }
}

/// A gate on one or two qubits in a circuit without ring structure.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGate {
    pub layer: usize,
    pub qubits: Vec<usize>,
    pub matrix: CMat,
}

/// Arbitrary-topology circuit with linear time. Idle slots are filled with
/// single-qubit identities so every clock advances every layer.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralCircuit {
    n: usize,
    depth: usize,
    gates: Vec<LocalGate>,
}

impl GeneralCircuit {
    pub fn new(n: usize, depth: usize, gates: Vec<LocalGate>) -> Result<Self> {
        if n == 0 || depth == 0 {
            return Err(Error::OutOfRange("empty circuit".into()));
        }
        let mut seen = vec![vec![false; n + 1]; depth + 1];
        for g in &gates {
            let (q, p) = (g.qubits[0], *g.qubits.get(1).unwrap_or(&g.qubits[0]));
            let bad = |reason: &str| Error::BadGate {
                layer: g.layer,
                q,
                p,
                reason: reason.into(),
            };
            if g.layer == 0 || g.layer > depth {
                return Err(bad("layer out of range"));
            }
            if g.qubits.is_empty() || g.qubits.len() > 2 {
                return Err(bad("gates act on one or two qubits"));
            }
            if g.qubits.iter().any(|&x| x == 0 || x > n) {
                return Err(bad("qubit index out of range"));
            }
            if g.qubits.len() == 2 && q == p {
                return Err(bad("a gate needs two distinct qubits"));
            }
            let dim = 1 << g.qubits.len();
            if g.matrix.nrows() != dim || g.matrix.ncols() != dim {
                return Err(bad("matrix dimension does not match the qubit count"));
            }
            check_unitary(&g.matrix, UNITARY_TOL)?;
            for &qubit in &g.qubits {
                if seen[g.layer][qubit] {
                    return Err(Error::OverlappingSupport {
                        layer: g.layer,
                        qubit,
                    });
                }
                seen[g.layer][qubit] = true;
            }
        }
        let mut gates = gates;
        for (layer, row) in seen.iter().enumerate().skip(1) {
            for q in (1..=n).filter(|&q| !row[q]) {
                gates.push(LocalGate {
                    layer,
                    qubits: vec![q],
                    matrix: identity(2),
                });
            }
        }
        gates.sort_by_key(|g| (g.layer, g.qubits[0]));
        Ok(GeneralCircuit { n, depth, gates })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn gates(&self) -> &[LocalGate] {
        &self.gates
    }

    pub fn has_single_qubit_gates(&self) -> bool {
        self.gates.iter().any(|g| g.qubits.len() == 1)
    }

    /// Theorem paths only accept circuits built from two-qubit gates.
    pub fn require_two_qubit_gates(&self) -> Result<()> {
        if self.has_single_qubit_gates() {
            return Err(Error::SingleQubitGate);
        }
        Ok(())
    }

    pub fn linear_schedule(&self) -> Schedule {
        Schedule {
            n: self.n,
            clock_size: self.depth + 1,
            circular: false,
            terms: self
                .gates
                .iter()
                .enumerate()
                .map(|(i, g)| ClockTerm {
                    step: g.layer,
                    qubits: g.qubits.clone(),
                    matrix: g.matrix.clone(),
                    gate: i,
                    inverse: false,
                })
                .collect(),
        }
    }

    /// Linear-time validity: no interacting pair has one clock past its gate
    /// while the partner has not reached it.
    pub fn is_valid_linear(&self, t: &[u16]) -> bool {
        self.gates.iter().filter(|g| g.qubits.len() == 2).all(|g| {
            let (tq, tp) = (t[g.qubits[0] - 1] as usize, t[g.qubits[1] - 1] as usize);
            let l = g.layer;
            !((tq < l && tp >= l) || (tp < l && tq >= l))
        })
    }
}

/// Apply a `2^k x 2^k` gate on 1-based `qubits` of an `n`-qubit state, with
/// qubit 1 the most significant bit.
pub fn apply_gate(state: &mut CVec, n: usize, qubits: &[usize], m: &CMat) {
    let k = qubits.len();
    let shifts: Vec<usize> = qubits.iter().map(|&q| n - q).collect();
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let dim = 1usize << n;
    let mut local = vec![ZERO; 1 << k];
    for base in 0..dim {
        if base & mask != 0 {
            continue;
        }
        let index = |l: usize| -> usize {
            let mut z = base;
            for (b, s) in shifts.iter().enumerate() {
                if (l >> (k - 1 - b)) & 1 == 1 {
                    z |= 1 << s;
                }
            }
            z
        };
        for (l, slot) in local.iter_mut().enumerate() {
            *slot = state[index(l)];
        }
        for r in 0..(1 << k) {
            let mut acc = ZERO;
            for (col, &amp) in local.iter().enumerate() {
                acc += m[(r, col)] * amp;
            }
            state[index(r)] = acc;
        }
    }
}

/// Bit of qubit `q` (1-based) in basis index `z`.
pub fn qubit_bit(n: usize, z: usize, q: usize) -> usize {
    (z >> (n - q)) & 1
}
