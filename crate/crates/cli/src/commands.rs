use std::fs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use stham_core::circuit::{controlled, BrickworkCircuit, GateKind};
use stham_core::configspace::enumerate_valid;
use stham_core::fermion::{equivalence_report, EquivalenceReport, FockBasis, Lattice};
use stham_core::linalg::random_unitary;
use stham_core::markov::{
    fitted_decay_rate, mixing_estimate, simulate_string, LazyWalk, MixingReport, SimulationReport,
};
use stham_core::operators::{
    check_ring, heisenberg_form, momentum_block, spacetime_hamiltonian, BasisKind,
};
use stham_core::qma::{evaluate, QmaReport, Toy};
use stham_core::spectra::{
    angle_lemma_report, spectrum_with, theorem3_bound, verify_ds, verify_interpolation,
    verify_momentum_union, verify_openb, verify_theorem3, CheckRecord, SolverChoice, SolverInfo,
};
use stham_core::Error;

use crate::args::{Common, Family, Format, ToyName};
use crate::Failure;

/// What a command hands back to `main`: the rendered report and whether
/// every asserted check held.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn render<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn csv_unsupported(cmd: &str) -> Failure {
    Failure::Input(format!("{cmd} has no CSV form; use --format json"))
}

fn load_circuit(common: &Common) -> Result<Option<BrickworkCircuit>, Failure> {
    let Some(path) = &common.circuit else {
        return Ok(None);
    };
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let circ = BrickworkCircuit::from_json_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for (flag, given, actual) in [
        ("--n", common.n, circ.n()),
        ("--D", common.depth, circ.depth()),
    ] {
        if let Some(v) = given {
            if v != actual {
                return Err(Failure::Input(format!(
                    "{flag} {v} disagrees with the circuit file ({actual})"
                )));
            }
        }
    }
    Ok(Some(circ))
}

/// Refuses `(n, D)` pairs outside the regime where the ring construction is
/// analysed: odd sizes, `D <= n/2`, and `n = 2kD` (frozen loops).
fn check_regime(n: usize, depth: usize) -> Result<(), Failure> {
    let s = BrickworkCircuit::identity(n, depth)?.unravel()?;
    enumerate_valid(&s)?;
    check_ring(n, depth)?;
    Ok(())
}

#[derive(Serialize)]
struct GapOutput {
    command: &'static str,
    operator: &'static str,
    n: usize,
    #[serde(rename = "D")]
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    seed: u64,
    tolerance: f64,
    dim: usize,
    eigenvalues: Vec<f64>,
    ground_degeneracy: usize,
    /// First level above the kernel; for a nonzero momentum block, which has
    /// no kernel, its lowest level.
    gap: Option<f64>,
    solver: SolverInfo,
    bound: f64,
    margin: f64,
    asserted: bool,
    pass: bool,
}

pub fn gap(common: &Common) -> Result<Outcome, Failure> {
    let tol = common.tol.unwrap_or(1e-12);
    let circuit = load_circuit(common)?;
    let (n, depth) = match &circuit {
        Some(c) => (c.n(), c.depth()),
        None => (common.n.unwrap_or(4), common.depth.unwrap_or(4)),
    };
    check_regime(n, depth)?;
    let (operator, h, count) = match (&circuit, common.k) {
        (Some(_), Some(_)) => {
            return Err(Failure::Input(
                "--k selects a momentum block and cannot be combined with --circuit".into(),
            ))
        }
        (Some(c), None) => {
            let h = spacetime_hamiltonian(c, BasisKind::ValidOnly)?.operator;
            // The kernel and every level carry a 2^n-fold state degeneracy.
            let count = ((1usize << n) + 1).min(h.dim());
            ("circuit_valid_sector", h, count)
        }
        (None, Some(k)) => {
            if k >= depth {
                return Err(Failure::Input(format!("--k {k} must be below D = {depth}")));
            }
            let h = momentum_block(n, depth, k)?;
            let count = 6.min(h.dim());
            ("momentum_block", h, count)
        }
        (None, None) => {
            let h = heisenberg_form(n, depth)?;
            let count = 6.min(h.dim());
            ("string_form", h, count)
        }
    };
    let report = spectrum_with(&h, count, SolverChoice::Auto, common.seed)?;
    let value = match common.k {
        Some(k) if k != 0 => Some(report.eigenvalues[0]),
        _ => report.gap,
    };
    let bound = theorem3_bound(n, depth);
    let margin = value.map_or(f64::NAN, |v| v - bound);
    // The leading term is not claimed for two-qubit rings.
    let asserted = n >= 4;
    let holds = value.is_some_and(|v| v >= bound - tol);
    let out = GapOutput {
        command: "gap",
        operator,
        n,
        depth,
        k: common.k,
        seed: common.seed,
        tolerance: tol,
        dim: h.dim(),
        eigenvalues: report.eigenvalues,
        ground_degeneracy: report.ground_degeneracy,
        gap: value,
        solver: report.solver,
        bound,
        margin,
        asserted,
        pass: holds || !asserted,
    };
    let text = match common.format {
        Format::Json => render(&out),
        Format::Csv => {
            let mut s = String::from("index,eigenvalue\n");
            for (i, v) in out.eigenvalues.iter().enumerate() {
                s.push_str(&format!("{i},{v:.17e}\n"));
            }
            s
        }
    };
    Ok(Outcome {
        text,
        pass: out.pass,
    })
}

#[derive(Serialize)]
struct VerifyOutput {
    command: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    records: Vec<CheckRecord>,
    asserted: usize,
    failed: usize,
    pass: bool,
}

/// Checks whose bound is a numerical tolerance rather than a formula.
const TOLERANCE_CHECKS: [&str; 3] = ["momentum_union", "ds_identity", "interpolation"];

fn retolerance(mut r: CheckRecord, tol: Option<f64>) -> CheckRecord {
    if let Some(tol) = tol {
        if TOLERANCE_CHECKS.contains(&r.check.as_str()) {
            r.bound = tol;
            r.margin = tol - r.value.abs();
            r.pass = r.value.abs() <= tol;
        }
    }
    r
}

pub fn verify(common: &Common, only: Option<Family>) -> Result<Outcome, Failure> {
    if let (Some(n), Some(d)) = (common.n, common.depth) {
        check_regime(n, d)?;
    }
    if common.circuit.is_some() {
        return Err(Failure::Input(
            "verify runs on built-in grids; --circuit is used by gap".into(),
        ));
    }
    let wants = |f: Family| only.is_none_or(|o| o == f);
    // An explicit value replaces the default grid, even outside it.
    let pick = |values: &[usize], chosen: Option<usize>| {
        chosen.map_or_else(|| values.to_vec(), |v| vec![v])
    };
    let pairs = |ns: &[usize], ds: &[usize]| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for n in pick(ns, common.n) {
            for d in pick(ds, common.depth) {
                if n % (2 * d) != 0 && 2 * d > n {
                    out.push((n, d));
                }
            }
        }
        out
    };

    let mut records = Vec::new();
    if wants(Family::Theorem3) {
        for (n, d) in pairs(&[2, 4, 6], &[2, 4, 6]) {
            records.push(verify_theorem3(n, d, SolverChoice::Auto, common.seed)?);
        }
    }
    if wants(Family::Momentum) {
        for (n, d) in pairs(&[4, 6], &[4, 6]) {
            records.push(verify_momentum_union(n, d)?);
        }
    }
    if wants(Family::Openb) {
        for n in pick(&[2, 4, 6, 8], common.n) {
            records.push(verify_openb(n)?);
        }
    }
    if wants(Family::Ds) {
        for n in pick(&[4, 6, 8, 10], common.n) {
            records.extend(verify_ds(n)?);
        }
    }
    if wants(Family::Angle) {
        for (n, d) in pairs(&[4, 6], &[4, 6, 8]) {
            let ks = match common.k {
                Some(k) => vec![k],
                None => vec![1, d - 1],
            };
            for k in ks {
                records.push(angle_lemma_report(n, d, k)?.record());
            }
        }
    }
    if wants(Family::Interpolation) {
        for (n, d) in pairs(&[4], &[4]) {
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let circ = BrickworkCircuit::random(n, d, &mut rng)?;
            records.push(verify_interpolation(&circ, &[0.0, 0.3, 0.8, 1.0])?);
        }
    }
    if records.is_empty() {
        return Err(Failure::Input(
            "no check matches the requested filters".into(),
        ));
    }
    let records: Vec<CheckRecord> = records
        .into_iter()
        .map(|r| retolerance(r, common.tol))
        .collect();
    let asserted = records.iter().filter(|r| r.asserted).count();
    let failed = records.iter().filter(|r| !r.ok()).count();
    let out = VerifyOutput {
        command: "verify",
        seed: common.seed,
        tolerance: common.tol,
        records,
        asserted,
        failed,
        pass: failed == 0,
    };
    let text = match common.format {
        Format::Json => render(&out),
        Format::Csv => {
            let mut s = String::from("check,n,D,k,value,bound,margin,pass,asserted\n");
            for r in &out.records {
                let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
                s.push_str(&format!(
                    "{},{},{},{},{:.17e},{:.17e},{:.17e},{},{}\n",
                    r.check,
                    r.n,
                    opt(r.depth),
                    opt(r.k),
                    r.value,
                    r.bound,
                    r.margin,
                    r.pass,
                    r.asserted
                ));
            }
            s
        }
    };
    Ok(Outcome {
        text,
        pass: out.pass,
    })
}

#[derive(Serialize)]
struct QmaOutput {
    command: &'static str,
    seed: u64,
    tolerance: f64,
    report: QmaReport,
    pass: bool,
}

pub fn qma(common: &Common, toy: ToyName, angle: Option<f64>) -> Result<Outcome, Failure> {
    if common.format == Format::Csv {
        return Err(csv_unsupported("qma"));
    }
    if common.circuit.is_some() || common.k.is_some() {
        return Err(Failure::Input(
            "qma runs built-in toy verifiers; --circuit and --k do not apply".into(),
        ));
    }
    if let Some(n) = common.n.filter(|&n| n != 4) {
        return Err(Failure::Input(format!(
            "toy verifiers act on 4 qubits, got --n {n}"
        )));
    }
    if angle.is_some() && matches!(toy, ToyName::Accept | ToyName::Reject) {
        return Err(Failure::Input(
            "--angle applies to the biased and noisy toys".into(),
        ));
    }
    let toy = match toy {
        ToyName::Accept => Toy::Accept,
        ToyName::Biased => Toy::Biased(angle.unwrap_or(0.4)),
        ToyName::Reject => Toy::Reject,
        ToyName::Noisy => Toy::Noisy(angle.unwrap_or(0.2)),
    };
    let depth = common.depth.unwrap_or(4);
    let report = evaluate(toy, depth, common.seed)?;
    let tol = common.tol.unwrap_or(1e-10);
    let mut pass = report.yes_pass.or(report.no_pass).unwrap_or(false);
    if let Some(y) = &report.yes {
        pass &= (y.energy - y.predicted).abs() <= tol;
    }
    if let Some(no) = &report.no {
        if report.epsilon == 0.0 {
            pass &= (no.ni_worst - no.ni_expected).abs() <= tol;
        }
    }
    let out = QmaOutput {
        command: "qma",
        seed: common.seed,
        tolerance: tol,
        report,
        pass,
    };
    Ok(Outcome {
        text: render(&out),
        pass,
    })
}

#[derive(Serialize)]
struct MarkovOutput {
    command: &'static str,
    seed: u64,
    tolerance: f64,
    mixing: MixingReport,
    /// Per-step contraction of the exact TV curve, fitted on its tail.
    fitted_rate: Option<f64>,
    /// `|(1 - fitted) - (1 - beta_1)| / (1 - beta_1)`.
    rate_relative_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulation: Option<SimulationSummary>,
    pass: bool,
}

#[derive(Serialize)]
struct SimulationSummary {
    steps: u64,
    empirical_tv: f64,
    final_vertex: usize,
}

impl From<SimulationReport> for SimulationSummary {
    fn from(r: SimulationReport) -> Self {
        SimulationSummary {
            steps: r.steps,
            empirical_tv: r.empirical_tv,
            final_vertex: r.final_vertex,
        }
    }
}

/// Step cap for exact TV iteration.
const MAX_CURVE_STEPS: usize = 1_000_000;

pub fn markov(common: &Common, tv: f64, samples: u64) -> Result<Outcome, Failure> {
    if !(tv > 0.0 && tv <= 1.0) {
        return Err(Failure::Input(format!("--tv must lie in (0, 1], got {tv}")));
    }
    let circuit = match load_circuit(common)? {
        Some(c) => c,
        None => BrickworkCircuit::identity(common.n.unwrap_or(6), common.depth.unwrap_or(4))?,
    };
    let walk = LazyWalk::from_circuit(&circuit)?;
    let mixing = mixing_estimate(&walk, tv, MAX_CURVE_STEPS)?;
    let gap = mixing.generator_gap;
    // Long enough for the curve to fall through the fitting window.
    let horizon = ((1e12f64.ln() / gap).ceil() as usize).clamp(mixing.steps, MAX_CURVE_STEPS);
    let curve = walk.tv_curve(walk.graph.origin().unwrap_or(0), horizon);
    let fitted = fitted_decay_rate(&curve);
    let rel = fitted.map(|r| ((1.0 - r) - gap).abs() / gap);
    let tol = common.tol.unwrap_or(0.1);
    let simulation = if samples > 0 {
        Some(SimulationSummary::from(simulate_string(
            &walk,
            samples,
            common.seed,
        )?))
    } else {
        None
    };
    let pass = rel.is_some_and(|r| r <= tol);
    let text = match common.format {
        Format::Csv => {
            let mut s = String::from("step,tv\n");
            for (t, v) in curve.iter().enumerate() {
                s.push_str(&format!("{t},{v:.17e}\n"));
            }
            s
        }
        Format::Json => render(&MarkovOutput {
            command: "markov",
            seed: common.seed,
            tolerance: tol,
            mixing,
            fitted_rate: fitted,
            rate_relative_error: rel,
            simulation,
            pass,
        }),
    };
    Ok(Outcome { text, pass })
}

#[derive(Serialize)]
struct FermionOutput {
    command: &'static str,
    circuit: &'static str,
    seed: u64,
    tolerance: f64,
    report: EquivalenceReport,
    pass: bool,
}

/// A ring of controlled unitaries with random targets.
fn random_controlled_ring(n: usize, depth: usize, seed: u64) -> Result<BrickworkCircuit, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let us: Vec<_> = (0..n * depth)
        .map(|_| random_unitary(2, &mut rng))
        .collect();
    BrickworkCircuit::build(n, depth, |layer, bond| {
        GateKind::ControlledU(controlled(&us[n * (layer - 1) + bond - 1]))
    })
}

pub fn fermion(common: &Common, clock: usize) -> Result<Outcome, Failure> {
    if !clock.is_multiple_of(2) {
        return Err(Failure::Input(format!(
            "--T {clock} must be twice an even depth"
        )));
    }
    if let Some(d) = common.depth.filter(|&d| 2 * d != clock) {
        return Err(Failure::Input(format!(
            "--D {d} disagrees with --T {clock} (T = 2D)"
        )));
    }
    let (label, circuit) = match load_circuit(common)? {
        Some(c) => {
            if c.unravel()?.clock_size() != clock {
                return Err(Failure::Input(format!(
                    "the circuit has a {}-site clock, not --T {clock}",
                    2 * c.depth()
                )));
            }
            ("file", c)
        }
        None => (
            "random_controlled",
            random_controlled_ring(common.n.unwrap_or(2), clock / 2, common.seed)?,
        ),
    };
    let report = equivalence_report(&circuit)?;
    let tol = common.tol.unwrap_or(1e-9);
    let pass = report.pass && report.spectral_diff <= tol;
    let text = match common.format {
        Format::Csv => FockBasis::sector(Lattice::new(circuit.n(), clock)?)?.to_csv(),
        Format::Json => render(&FermionOutput {
            command: "fermion",
            circuit: label,
            seed: common.seed,
            tolerance: tol,
            report,
            pass,
        }),
    };
    Ok(Outcome { text, pass })
}
