//! Verifier instances `H = H_circuit + H_in + H_out + H_causal` and the
//! certification of their YES/NO energy separation.
//!
//! Two bases are in play. The Full basis carries every clock configuration
//! and is where the commutation audit and the valid/invalid block structure
//! are checked. The valid sector, in `(tau, x)` order, is where history
//! states live and where the exact ground energy is computed: on the invalid
//! sector `H_causal >= 1` while the other terms are PSD, so the global
//! minimum is `min(lambda_min(valid sector), >= 1)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{
    apply_gate, controlled, qubit_bit, BrickworkCircuit, GateKind, UnraveledSchedule,
};
use crate::configspace::{binomial, ConfigGraph};
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, kron, pauli, random_state, random_unitary, CMat, CVec, ZERO,
};
use crate::operators::{
    check_causal_cone, disentangle, penalty_terms, spacetime_hamiltonian, BasisKind, ConfigSet,
    PathUnitaryTable, Penalties,
};
use crate::sparse::SparseHermitian;
use crate::spectra::{kitaev_bound, lowest_eigenpairs, norm_bound, SolverChoice, DEGENERACY_TOL};

/// Largest Full-basis dimension an instance will assemble.
pub const FULL_BASIS_CAP: usize = 1 << 22;

/// Tolerance of the commutation and block-structure audit.
pub const AUDIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct CommutationAudit {
    pub causal_circuit: f64,
    pub causal_in: f64,
    pub causal_out: f64,
    /// Smallest `H_causal` diagonal entry over invalid configurations.
    pub min_invalid_causal: f64,
    /// Largest entry of the full `H` coupling valid to invalid configurations.
    pub block_coupling: f64,
    /// Full `H` restricted to the valid sector against the directly
    /// assembled valid-sector operator.
    pub valid_restriction: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct QmaInstance {
    pub circuit: BrickworkCircuit,
    pub s_in: Vec<usize>,
    pub q_out: usize,
    pub schedule: UnraveledSchedule,
    pub graph: ConfigGraph,
    /// `V(t <- 0)` for every valid configuration.
    pub paths: PathUnitaryTable,
    pub full_configs: ConfigSet,
    pub h_circuit: SparseHermitian,
    pub penalties: Penalties,
    /// Full-basis index of each valid-sector basis vector.
    pub valid_indices: Vec<usize>,
    /// Valid-sector `H_circuit`, `H_in` and `H_out`.
    pub a_valid: SparseHermitian,
    pub h_in_valid: SparseHermitian,
    pub h_out_valid: SparseHermitian,
    pub audit: CommutationAudit,
}

/// Assembles every term on the Full basis and audits the commutation claims.
pub fn build_instance(
    circuit: &BrickworkCircuit,
    s_in: &[usize],
    q_out: usize,
) -> Result<QmaInstance> {
    check_causal_cone(circuit, s_in, q_out)?;
    let schedule = circuit.unravel()?;
    let graph = ConfigGraph::build(&schedule)?;
    let n = circuit.n();
    let full_configs = ConfigSet::full(n, schedule.clock_size())?;
    if full_configs.dim() > FULL_BASIS_CAP {
        return Err(Error::TooLarge(format!(
            "full basis of dimension {} exceeds {FULL_BASIS_CAP}",
            full_configs.dim()
        )));
    }
    let paths = disentangle(circuit)?;
    let h_circuit = spacetime_hamiltonian(circuit, BasisKind::Full)?.operator;
    let penalties = penalty_terms(&schedule, &full_configs, s_in, q_out)?;

    let dq = 1usize << n;
    let valid_indices: Vec<usize> = graph
        .vertices()
        .iter()
        .flat_map(|t| {
            let base = full_configs
                .index_of(&t.0)
                .expect("valid configuration lies in the full set")
                * dq;
            (0..dq).map(move |z| base + z)
        })
        .collect();
    let valid_configs = ConfigSet::from_graph(&graph);
    let a_valid = spacetime_hamiltonian(circuit, BasisKind::ValidOnly)?.operator;
    let valid_pen = penalty_terms(&schedule, &valid_configs, s_in, q_out)?;

    let total = h_circuit
        .add(&penalties.h_in)?
        .add(&penalties.h_out)?
        .add(&penalties.h_causal)?;
    let mut in_valid = vec![false; full_configs.dim()];
    for &i in &valid_indices {
        in_valid[i] = true;
    }
    let causal = penalties.h_causal.matrix().diagonal();
    let min_invalid_causal = causal
        .iter()
        .zip(&in_valid)
        .filter(|(_, &v)| !v)
        .map(|(x, _)| x.re)
        .fold(f64::INFINITY, f64::min);
    let restricted = total.restrict(&valid_indices, valid_configs.tag());
    let assembled = a_valid.add(&valid_pen.h_in)?.add(&valid_pen.h_out)?;
    let mut audit = CommutationAudit {
        causal_circuit: penalties.h_causal.commutator_norm(&h_circuit)?,
        causal_in: penalties.h_causal.commutator_norm(&penalties.h_in)?,
        causal_out: penalties.h_causal.commutator_norm(&penalties.h_out)?,
        min_invalid_causal,
        block_coupling: total.matrix().off_block_max(&in_valid),
        valid_restriction: restricted.max_diff(&assembled)?,
        pass: false,
    };
    audit.pass = [
        audit.causal_circuit,
        audit.causal_in,
        audit.causal_out,
        audit.block_coupling,
        audit.valid_restriction,
    ]
    .iter()
    .all(|&x| x <= AUDIT_TOL)
        && audit.min_invalid_causal >= 1.0;
    Ok(QmaInstance {
        circuit: circuit.clone(),
        s_in: s_in.to_vec(),
        q_out,
        schedule,
        graph,
        paths,
        full_configs,
        h_circuit,
        penalties,
        valid_indices,
        a_valid,
        h_in_valid: valid_pen.h_in,
        h_out_valid: valid_pen.h_out,
        audit,
    })
}

/// Applies every layer of the circuit in order.
pub fn simulate(circuit: &BrickworkCircuit, state: &CVec) -> CVec {
    let mut psi = state.clone();
    for layer in 1..=circuit.depth() {
        for (_, g) in circuit.gates_in_layer(layer) {
            apply_gate(
                &mut psi,
                circuit.n(),
                &[g.qubits.0, g.qubits.1],
                &g.kind.matrix(),
            );
        }
    }
    psi
}

/// Probability that qubit `q` reads 1.
pub fn prob_one(state: &CVec, n: usize, q: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .filter(|(z, _)| qubit_bit(n, *z, q) == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

impl QmaInstance {
    pub fn n(&self) -> usize {
        self.circuit.n()
    }

    pub fn depth(&self) -> usize {
        self.circuit.depth()
    }

    /// Qubits carrying the witness, ascending.
    pub fn witness_qubits(&self) -> Vec<usize> {
        (1..=self.n()).filter(|q| !self.s_in.contains(q)).collect()
    }

    /// `|xi>` on the witness qubits with every input qubit set to 0.
    pub fn input_state(&self, witness: &CVec) -> Result<CVec> {
        let wq = self.witness_qubits();
        if witness.len() != 1 << wq.len() {
            return Err(Error::OutOfRange(format!(
                "witness of length {} for {} witness qubits",
                witness.len(),
                wq.len()
            )));
        }
        let n = self.n();
        let mut phi = CVec::zeros(1 << n);
        for (w, &amp) in witness.iter().enumerate() {
            let z = wq.iter().enumerate().fold(0usize, |acc, (b, &q)| {
                acc | (((w >> (wq.len() - 1 - b)) & 1) << (n - q))
            });
            phi[z] = amp;
        }
        Ok(phi)
    }

    /// Hermitian operator on the witness space whose expectation is the
    /// acceptance probability `Pr[q_out = 1]`.
    pub fn acceptance_operator(&self) -> Result<CMat> {
        let k = self.witness_qubits().len();
        let outputs: Vec<CVec> = (0..1usize << k)
            .map(|w| {
                let mut e = CVec::zeros(1 << k);
                e[w] = c(1.0, 0.0);
                Ok(simulate(&self.circuit, &self.input_state(&e)?))
            })
            .collect::<Result<_>>()?;
        let n = self.n();
        Ok(CMat::from_fn(1 << k, 1 << k, |i, j| {
            outputs[i]
                .iter()
                .zip(outputs[j].iter())
                .enumerate()
                .filter(|(z, _)| qubit_bit(n, *z, self.q_out) == 1)
                .map(|(_, (a, b))| a.conj() * b)
                .sum()
        }))
    }

    /// Largest acceptance probability over witnesses, with a maximizer.
    pub fn best_witness(&self) -> Result<(f64, CVec)> {
        let e = hermitian_eigen(&self.acceptance_operator()?);
        let last = e.values.len() - 1;
        Ok((e.values[last], e.vectors.column(last).into_owned()))
    }

    /// Normalized history state of `phi_in` in the valid sector.
    pub fn history_state(&self, phi_in: &CVec) -> Result<HistoryState> {
        let norm = phi_in.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange(format!("input state of norm {norm}")));
        }
        let vector = self.paths.history_state(phi_in);
        Ok(HistoryState {
            energy: self.a_valid.expectation(&vector),
            norm: vector.norm(),
            phi_in: phi_in.clone(),
            vector,
        })
    }

    /// Valid-sector vector placed in the Full basis.
    pub fn embed_valid(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.full_configs.dim());
        for (k, &i) in self.valid_indices.iter().enumerate() {
            out[i] = v[k];
        }
        out
    }

    /// The full Hamiltonian on the Full basis.
    pub fn hamiltonian(&self) -> Result<SparseHermitian> {
        self.h_circuit
            .add(&self.penalties.h_in)?
            .add(&self.penalties.h_out)?
            .add(&self.penalties.h_causal)
    }

    /// Valid-sector `H_in + H_out`.
    pub fn b_valid(&self) -> Result<SparseHermitian> {
        self.h_in_valid.add(&self.h_out_valid)
    }

    /// Valid-sector `H`, where `H_causal` vanishes.
    pub fn h_valid(&self) -> Result<SparseHermitian> {
        self.a_valid.add(&self.b_valid()?)
    }

    /// Number of valid configurations with `t_q = D`.
    pub fn count_at_final(&self, q: usize) -> usize {
        let d = self.depth() as u16;
        self.graph
            .vertices()
            .iter()
            .filter(|t| t.0[q - 1] == d)
            .count()
    }

    /// `Pr[q = 1]` of a valid-sector state conditioned on `t_q = D`.
    pub fn output_marginal(&self, psi: &CVec, q: usize) -> f64 {
        let n = self.n();
        let dq = 1usize << n;
        let d = self.depth() as u16;
        let (mut one, mut all) = (0.0, 0.0);
        for (v, t) in self.graph.vertices().iter().enumerate() {
            if t.0[q - 1] != d {
                continue;
            }
            for z in 0..dq {
                let p = psi[v * dq + z].norm_sqr();
                all += p;
                if qubit_bit(n, z, q) == 1 {
                    one += p;
                }
            }
        }
        one / all
    }

    /// `(1/|V|) sum_t V_t^dag P(t) V_t` for a diagonal valid-sector weight
    /// `P`: the quadratic form of `P` on history states, as an operator on
    /// inputs.
    pub fn history_form(&self, weights: &[f64]) -> CMat {
        let dq = 1usize << self.n();
        let mut m = CMat::zeros(dq, dq);
        for v in 0..self.paths.len() {
            let u = self.paths.unitary(v);
            let mut du = u.clone();
            for z in 0..dq {
                du.row_mut(z).scale_mut(weights[v * dq + z]);
            }
            m += u.adjoint() * du;
        }
        m / c(self.paths.len() as f64, 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct HistoryState {
    pub phi_in: CVec,
    /// Valid-sector amplitudes.
    pub vector: CVec,
    pub norm: f64,
    /// Energy under `H_circuit`.
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct YesReport {
    pub energy: f64,
    /// `Pr[q_out = 0]` from direct simulation.
    pub reject_probability: f64,
    pub predicted: f64,
    pub circuit_energy: f64,
    pub pass: bool,
}

/// `<psi_history|H|psi_history>` for the given witness, evaluated with the
/// Full-basis Hamiltonian.
pub fn yes_energy(inst: &QmaInstance, witness: &CVec) -> Result<YesReport> {
    let phi = inst.input_state(witness)?;
    let hist = inst.history_state(&phi)?;
    let energy = inst
        .hamiltonian()?
        .expectation(&inst.embed_valid(&hist.vector));
    let reject_probability = 1.0 - prob_one(&simulate(&inst.circuit, &phi), inst.n(), inst.q_out);
    let predicted = reject_probability / (2 * inst.depth()) as f64;
    Ok(YesReport {
        energy,
        reject_probability,
        predicted,
        circuit_energy: hist.energy,
        pass: (energy - predicted).abs() <= 1e-10 && hist.energy.abs() <= 1e-12,
    })
}

/// Kernel projectors of `B = H_in + H_out` on the valid sector, all diagonal.
#[derive(Debug, Clone)]
pub struct NullspaceProjectors {
    pub pi_in: Vec<f64>,
    pub pi_out: Vec<f64>,
    pub pi_int: Vec<f64>,
    /// `(S as a list of qubits, Rank(P_S))` for every nonempty `S` in `S_in`,
    /// where `P_S` projects on configurations with exactly the clocks of `S`
    /// (among `S_in`) at 0.
    pub subset_ranks: Vec<(Vec<usize>, usize)>,
    /// Valid configurations with `t_q_out = D` and some input clock at 0.
    pub overlap_configs: usize,
}

pub fn nullspace_projectors(inst: &QmaInstance) -> NullspaceProjectors {
    let n = inst.n();
    let dq = 1usize << n;
    let d = inst.depth() as u16;
    let m = inst.s_in.len();
    let len = inst.graph.len() * dq;
    let (mut pi_in, mut pi_out, mut pi_int) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let mut ranks = vec![0usize; 1 << m];
    let mut overlap_configs = 0;
    for (v, t) in inst.graph.vertices().iter().enumerate() {
        let zero_mask = inst
            .s_in
            .iter()
            .enumerate()
            .filter(|(_, &p)| t.0[p - 1] == 0)
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        ranks[zero_mask] += 1;
        let at_final = t.0[inst.q_out - 1] == d;
        if at_final && zero_mask != 0 {
            overlap_configs += 1;
        }
        for z in 0..dq {
            let i = v * dq + z;
            if at_final {
                if qubit_bit(n, z, inst.q_out) == 1 {
                    pi_out[i] = 1.0;
                }
            } else if zero_mask != 0 {
                let zeros = inst
                    .s_in
                    .iter()
                    .enumerate()
                    .all(|(b, &p)| zero_mask >> b & 1 == 0 || qubit_bit(n, z, p) == 0);
                if zeros {
                    pi_in[i] = 1.0;
                }
            } else {
                pi_int[i] = 1.0;
            }
        }
    }
    let subset_ranks = (1..1usize << m)
        .map(|mask| {
            let s = (0..m)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| inst.s_in[b])
                .collect();
            (s, ranks[mask])
        })
        .collect();
    NullspaceProjectors {
        pi_in,
        pi_out,
        pi_int,
        subset_ranks,
        overlap_configs,
    }
}

impl NullspaceProjectors {
    pub fn pi_b(&self) -> Vec<f64> {
        self.pi_in
            .iter()
            .zip(&self.pi_out)
            .zip(&self.pi_int)
            .map(|((a, b), c)| a + b + c)
            .collect()
    }

    /// Largest entry of the pairwise products of the three projectors.
    pub fn overlap(&self) -> f64 {
        let prod = |x: &[f64], y: &[f64]| {
            x.iter()
                .zip(y)
                .map(|(a, b)| (a * b).abs())
                .fold(0.0, f64::max)
        };
        prod(&self.pi_in, &self.pi_out)
            .max(prod(&self.pi_in, &self.pi_int))
            .max(prod(&self.pi_out, &self.pi_int))
    }

    /// `sum over S containing q of Rank(P_S)`.
    pub fn rank_sum_containing(&self, q: usize) -> usize {
        self.subset_ranks
            .iter()
            .filter(|(s, _)| s.contains(&q))
            .map(|(_, r)| r)
            .sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NoReport {
    pub lambda1_a: f64,
    pub lambda1_b: f64,
    pub cos_theta: f64,
    /// `cos^2 theta` from the history-state form of the kernel projector.
    pub cos_sq_structured: f64,
    pub certified_bound: f64,
    pub exact_lambda_min: f64,
    /// `1 - cos^2 theta`, compared with the target `1/(2D)`.
    pub angle_gap: f64,
    pub angle_target: f64,
    /// Upper bound `1 - 1/(2D) + eps/(2D) + sqrt(eps)/D` on `cos^2 theta`.
    pub angle_upper_bound: f64,
    /// `max <psi_NI|Pi_B|psi_NI>` with the first input qubit flipped.
    pub ni_worst: f64,
    pub ni_expected: f64,
    pub kernel_dim_a: usize,
    pub projector_overlap: f64,
    pub projector_sum_error: f64,
    pub rank_sum_first_input: usize,
    pub rank_sum_expected: usize,
    pub pass: bool,
}

/// Certified lower bound on the ground energy of a NO instance, compared
/// against exact diagonalization of the valid sector.
pub fn no_bound(inst: &QmaInstance, epsilon: f64) -> Result<NoReport> {
    let n = inst.n();
    let d = inst.depth();
    let dq = 1usize << n;
    let a = &inst.a_valid;
    let b = inst.b_valid()?;
    let kitaev = kitaev_bound(a, &b)?;
    let h = inst.h_valid()?;
    let low = lowest_eigenpairs(&h, 1, SolverChoice::Auto, 0)?;
    // Invalid configurations sit at energy >= 1.
    let exact_lambda_min = low.values[0].min(1.0);

    let proj = nullspace_projectors(inst);
    let pi_b = proj.pi_b();
    let kernel_b: Vec<f64> = b
        .matrix()
        .diagonal()
        .iter()
        .map(|x| {
            if x.re.abs() <= DEGENERACY_TOL {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let projector_sum_error = pi_b
        .iter()
        .zip(&kernel_b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    let form = inst.history_form(&pi_b);
    let cos_sq_structured = hermitian_eigen(&form)
        .values
        .last()
        .copied()
        .unwrap_or(f64::NAN);

    // Inputs with the first input qubit at 1 and the rest of S_in at 0.
    let q1 = inst.s_in[0];
    let ni_inputs: Vec<usize> = (0..dq)
        .filter(|&z| {
            inst.s_in
                .iter()
                .all(|&p| qubit_bit(n, z, p) == usize::from(p == q1))
        })
        .collect();
    let sub = CMat::from_fn(ni_inputs.len(), ni_inputs.len(), |i, j| {
        form[(ni_inputs[i], ni_inputs[j])]
    });
    let ni_worst = hermitian_eigen(&sub)
        .values
        .last()
        .copied()
        .unwrap_or(f64::NAN);

    let spec_a = hermitian_eigen(&a.to_dense()).values;
    let thr = DEGENERACY_TOL * norm_bound(a).max(1.0);
    let kernel_dim_a = spec_a.iter().filter(|v| v.abs() <= thr).count();

    let df = d as f64;
    let rank_sum_expected = binomial(n - 1, n / 2 - 1);
    let rank_sum_first_input = proj.rank_sum_containing(q1);
    let certified_bound = kitaev.bound;
    let pass = exact_lambda_min >= certified_bound - 1e-12
        && certified_bound > 0.0
        && kitaev.lambda1_b >= 1.0 - 1e-12
        && proj.overlap() == 0.0
        && projector_sum_error == 0.0
        && proj.overlap_configs == 0
        && kernel_dim_a == dq
        && (cos_sq_structured - kitaev.cos_theta.powi(2)).abs() <= 1e-9
        && rank_sum_first_input == rank_sum_expected;
    Ok(NoReport {
        lambda1_a: kitaev.lambda1_a,
        lambda1_b: kitaev.lambda1_b,
        cos_theta: kitaev.cos_theta,
        cos_sq_structured,
        certified_bound,
        exact_lambda_min,
        angle_gap: 1.0 - cos_sq_structured,
        angle_target: 1.0 / (2.0 * df),
        angle_upper_bound: 1.0 - 1.0 / (2.0 * df) + epsilon / (2.0 * df) + epsilon.sqrt() / df,
        ni_worst,
        ni_expected: 1.0 - 1.0 / (2.0 * df),
        kernel_dim_a,
        projector_overlap: proj.overlap(),
        projector_sum_error,
        rank_sum_first_input,
        rank_sum_expected,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossTermReport {
    pub samples: usize,
    pub worst: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `|<psi_NI|Pi_final|psi_I>|` over random properly and improperly
/// initialized inputs, against `sqrt(eps)/(2D)`.
pub fn cross_term(
    inst: &QmaInstance,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<CrossTermReport> {
    let n = inst.n();
    let dq = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let final_weights: Vec<f64> = inst
        .h_out_valid
        .matrix()
        .diagonal()
        .iter()
        .map(|x| 1.0 - x.re)
        .collect();
    let form = inst.history_form(&final_weights);
    let proper = |z: usize| inst.s_in.iter().all(|&p| qubit_bit(n, z, p) == 0);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut good = random_state(dq, &mut rng);
        let mut bad = random_state(dq, &mut rng);
        for z in 0..dq {
            if proper(z) {
                bad[z] = ZERO;
            } else {
                good[z] = ZERO;
            }
        }
        let good = &good / c(good.norm(), 0.0);
        let bad = &bad / c(bad.norm(), 0.0);
        worst = worst.max(bad.dotc(&(&form * &good)).norm());
    }
    let bound = epsilon.sqrt() / (2 * inst.depth()) as f64;
    Ok(CrossTermReport {
        samples,
        worst,
        bound,
        pass: worst <= bound + 1e-12,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Yes,
    No,
}

/// Hand-built four-qubit verifiers. Every toy uses `S_in = {1, 2}`, two
/// adjacent qubits that interact in the first layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Toy {
    /// Output qubit 3 copies witness qubit 4.
    Accept,
    /// As `Accept`, with `Ry(theta)` on input qubit 2 after the first gate,
    /// so no witness is accepted with probability above `cos^2(theta/2)`.
    Biased(f64),
    /// Output qubit 2 stays at 0 regardless of the witness.
    Reject,
    /// As `Reject`, with `Ry(delta)` on qubit 2 after the first gate.
    Noisy(f64),
}

fn ry(theta: f64) -> CMat {
    let (s, co) = (theta / 2.0).sin_cos();
    CMat::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

/// CNOT with the second listed qubit as control.
fn reversed_cnot() -> CMat {
    let swap = CMat::from_fn(4, 4, |i, j| {
        let sw = |k: usize| (k >> 1) | ((k & 1) << 1);
        if sw(j) == i {
            c(1.0, 0.0)
        } else {
            ZERO
        }
    });
    &swap * controlled(&pauli::x()) * &swap
}

impl Toy {
    pub fn role(&self) -> Role {
        match self {
            Toy::Accept | Toy::Biased(_) => Role::Yes,
            Toy::Reject | Toy::Noisy(_) => Role::No,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Toy::Accept => "accept".into(),
            Toy::Biased(t) => format!("biased(theta={t})"),
            Toy::Reject => "reject".into(),
            Toy::Noisy(d) => format!("noisy(delta={d})"),
        }
    }

    pub fn q_out(&self) -> usize {
        match self.role() {
            Role::Yes => 3,
            Role::No => 2,
        }
    }

    /// The verifier circuit at depth `depth` (even, at least 4); layers
    /// past the third are identities.
    pub fn circuit(&self, depth: usize, seed: u64) -> Result<BrickworkCircuit> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u1 = random_unitary(4, &mut rng);
        let u3 = random_unitary(4, &mut rng);
        let ident = CMat::identity(2, 2);
        let toy = *self;
        BrickworkCircuit::build(4, depth, |layer, bond| match (toy, layer, bond) {
            (Toy::Biased(theta), 1, 1) => {
                GateKind::General(kron(&ident, &ry(theta)) * controlled(&pauli::x()))
            }
            (Toy::Accept | Toy::Biased(_), 1, _) => GateKind::Cnot,
            (Toy::Accept | Toy::Biased(_), 2, 2) => GateKind::Cnot,
            (Toy::Accept | Toy::Biased(_), 3, 3) => GateKind::General(reversed_cnot()),
            (Toy::Reject, 1, 1) => GateKind::Cnot,
            (Toy::Noisy(delta), 1, 1) => {
                GateKind::General(kron(&ident, &ry(delta)) * controlled(&pauli::x()))
            }
            (Toy::Reject | Toy::Noisy(_), 1, 3) => GateKind::General(u1.clone()),
            (Toy::Reject | Toy::Noisy(_), 2, _) => GateKind::Cz,
            (Toy::Reject | Toy::Noisy(_), 3, 3) => GateKind::General(u3.clone()),
            _ => GateKind::Identity,
        })
    }

    pub fn instance(&self, depth: usize, seed: u64) -> Result<QmaInstance> {
        build_instance(&self.circuit(depth, seed)?, &[1, 2], self.q_out())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QmaReport {
    pub instance: String,
    pub role: Role,
    pub n: usize,
    #[serde(rename = "D")]
    pub depth: usize,
    pub s_in: Vec<usize>,
    pub q_out: usize,
    pub seed: u64,
    /// Completeness error `1 - max Pr[accept]` for YES toys, soundness error
    /// `max Pr[accept]` for NO toys.
    pub epsilon: f64,
    pub a: f64,
    pub exact_lambda_min: f64,
    pub certified_bound: Option<f64>,
    pub yes_pass: Option<bool>,
    pub no_pass: Option<bool>,
    pub audit: CommutationAudit,
    pub yes: Option<YesReport>,
    pub no: Option<NoReport>,
    pub cross: Option<CrossTermReport>,
}

/// Builds, simulates and certifies one toy verifier.
pub fn evaluate(toy: Toy, depth: usize, seed: u64) -> Result<QmaReport> {
    let inst = toy.instance(depth, seed)?;
    let (p_max, witness) = inst.best_witness()?;
    let role = toy.role();
    let epsilon = match role {
        Role::Yes => (1.0 - p_max).max(0.0),
        Role::No => p_max,
    };
    let a = epsilon / (2 * depth) as f64;
    let mut report = QmaReport {
        instance: toy.name(),
        role,
        n: inst.n(),
        depth,
        s_in: inst.s_in.clone(),
        q_out: inst.q_out,
        seed,
        epsilon,
        a,
        exact_lambda_min: f64::NAN,
        certified_bound: None,
        yes_pass: None,
        no_pass: None,
        audit: inst.audit.clone(),
        yes: None,
        no: None,
        cross: None,
    };
    match role {
        Role::Yes => {
            let h = inst.h_valid()?;
            report.exact_lambda_min =
                lowest_eigenpairs(&h, 1, SolverChoice::Auto, seed)?.values[0].min(1.0);
            let yes = yes_energy(&inst, &witness)?;
            report.yes_pass = Some(
                yes.pass
                    && yes.energy <= a + 1e-12
                    && report.exact_lambda_min <= a + 1e-12
                    && inst.audit.pass,
            );
            report.yes = Some(yes);
        }
        Role::No => {
            let no = no_bound(&inst, epsilon)?;
            let cross = cross_term(&inst, epsilon, 32, seed)?;
            report.exact_lambda_min = no.exact_lambda_min;
            report.certified_bound = Some(no.certified_bound);
            report.no_pass = Some(no.pass && cross.pass && inst.audit.pass);
            report.no = Some(no);
            report.cross = Some(cross);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accept_toy_is_deterministic() {
        let inst = Toy::Accept.instance(4, 0).unwrap();
        let (p, _) = inst.best_witness().unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert!(inst.audit.pass, "{:?}", inst.audit);
    }

    #[test]
    fn reversed_cnot_flips_first_qubit() {
        let m = reversed_cnot();
        // |q3 q4> = |01> -> |11>.
        assert_eq!(m[(3, 1)], c(1.0, 0.0));
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn causal_cone_violation_is_refused() {
        let c = BrickworkCircuit::identity(4, 4).unwrap();
        assert!(matches!(
            build_instance(&c, &[1, 2], 3),
            Err(Error::CausalCone { .. })
        ));
    }
}
