//! Pass/fail records for the gap bounds, the momentum decomposition and the
//! isospectral interpolation.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::BrickworkCircuit;
use crate::error::Result;
use crate::markov::{beta1_bound, exact_beta1};
use crate::operators::{
    check_ring, heisenberg_form, interpolated_hamiltonian, momentum_block, open_chain, BasisKind,
};

use super::{
    first_nonzero, full_spectrum, multiset_distance, norm_bound, spectrum_with, AngleReport,
    SolverChoice,
};

/// Tolerance for bound comparisons that hold with equality.
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CheckRecord {
    pub check: String,
    pub n: usize,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
    /// False for records outside the regime where the bound is claimed.
    pub asserted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// `value >= bound`.
    pub fn at_least(check: &str, n: usize, depth: Option<usize>, value: f64, bound: f64) -> Self {
        CheckRecord {
            check: check.into(),
            n,
            depth,
            k: None,
            value,
            bound,
            margin: value - bound,
            pass: value >= bound - BOUND_SLACK,
            asserted: true,
            note: None,
        }
    }

    /// `value <= bound`.
    pub fn at_most(check: &str, n: usize, depth: Option<usize>, value: f64, bound: f64) -> Self {
        CheckRecord {
            margin: bound - value,
            pass: value <= bound + BOUND_SLACK,
            ..Self::at_least(check, n, depth, value, bound)
        }
    }

    /// `|value| <= tol`, for identities.
    pub fn within(check: &str, n: usize, depth: Option<usize>, value: f64, tol: f64) -> Self {
        CheckRecord {
            margin: tol - value.abs(),
            pass: value.abs() <= tol,
            ..Self::at_least(check, n, depth, value, tol)
        }
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn report_only(mut self, note: &str) -> Self {
        self.asserted = false;
        self.note = Some(note.into());
        self
    }

    /// Failing only counts when the record is asserted.
    pub fn ok(&self) -> bool {
        self.pass || !self.asserted
    }
}

impl AngleReport {
    pub fn record(&self) -> CheckRecord {
        CheckRecord::at_most(
            "angle_lemma",
            self.n,
            Some(self.depth),
            self.cos_theta,
            self.closed_form,
        )
        .with_k(self.k)
    }
}

/// `pi^4 / (4 D^2 (n-1) n)`.
pub fn theorem3_bound(n: usize, depth: usize) -> f64 {
    PI.powi(4) / (4.0 * (depth * depth) as f64 * (n - 1) as f64 * n as f64)
}

/// First excited level of the counter ⊗ spin operator against the leading
/// term of the gap bound. Two-qubit rings are reported but not asserted:
/// there the neglected correction dominates and the leading term exceeds the
/// true gap.
pub fn verify_theorem3(
    n: usize,
    depth: usize,
    choice: SolverChoice,
    seed: u64,
) -> Result<CheckRecord> {
    check_ring(n, depth)?;
    let h = heisenberg_form(n, depth)?;
    let report = spectrum_with(&h, 2.min(h.dim()), choice, seed)?;
    let lambda1 = report.gap.unwrap_or(f64::NAN);
    let rec = CheckRecord::at_least(
        "theorem3",
        n,
        Some(depth),
        lambda1,
        theorem3_bound(n, depth),
    );
    Ok(if n < 4 {
        rec.report_only("leading-order bound is not claimed to hold for two qubits")
    } else {
        rec
    })
}

/// `lambda_1(A) >= 2 (1 - cos(pi/n))` for the open chain.
pub fn verify_openb(n: usize) -> Result<CheckRecord> {
    let a = open_chain(n)?;
    let lambda1 = first_nonzero(&full_spectrum(&a), norm_bound(&a)).unwrap_or(f64::NAN);
    Ok(CheckRecord::at_least(
        "openb",
        n,
        None,
        lambda1,
        2.0 * (1.0 - (PI / n as f64).cos()),
    ))
}

/// Gap of the periodic chain, second eigenvalue of the interchange chain,
/// and the identity `lambda_1(H(0)) = n (1 - beta_1)`.
pub fn verify_ds(n: usize) -> Result<Vec<CheckRecord>> {
    let h0 = momentum_block(n, 1, 0)?;
    let lambda1 = first_nonzero(&full_spectrum(&h0), norm_bound(&h0)).unwrap_or(f64::NAN);
    let nf = n as f64;
    let beta1 = exact_beta1(n)?;
    Ok(vec![
        CheckRecord::at_least(
            "ds_gap",
            n,
            None,
            lambda1,
            12.0 / ((nf + 1.0) * (nf / 2.0 + 1.0)),
        ),
        CheckRecord::at_most("ds_beta1", n, None, beta1, beta1_bound(n)),
        CheckRecord::within("ds_identity", n, None, lambda1 - nf * (1.0 - beta1), 1e-10),
    ])
}

/// Spectrum of the counter ⊗ spin operator against the union of the
/// momentum-block spectra.
pub fn verify_momentum_union(n: usize, depth: usize) -> Result<CheckRecord> {
    let whole = full_spectrum(&heisenberg_form(n, depth)?);
    let mut union = Vec::with_capacity(whole.len());
    for k in 0..depth {
        union.extend(full_spectrum(&momentum_block(n, depth, k)?));
    }
    Ok(CheckRecord::within(
        "momentum_union",
        n,
        Some(depth),
        multiset_distance(&whole, &union),
        1e-9,
    ))
}

/// Largest spectral deviation across fractional powers of the gates.
pub fn verify_interpolation(c: &BrickworkCircuit, eps: &[f64]) -> Result<CheckRecord> {
    let spectra = eps
        .iter()
        .map(|&e| {
            Ok(full_spectrum(
                &interpolated_hamiltonian(c, e, BasisKind::ValidOnly)?.operator,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = spectra
        .iter()
        .skip(1)
        .map(|s| multiset_distance(&spectra[0], s))
        .fold(0.0, f64::max);
    Ok(CheckRecord::within(
        "interpolation",
        c.n(),
        Some(c.depth()),
        worst,
        1e-9,
    ))
}
