//! Eigenvalue extraction, ground-space analysis and the numerical checks of
//! every bound in the construction.

pub mod angles;
pub mod krylov;
pub mod verify;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, orthonormalize, CMat, CVec};
use crate::sparse::SparseHermitian;

pub use angles::{
    angle_lemma_report, fidelity, kitaev_bound, reduced_density, rho_a0_printed, subspace_angle,
    AngleReport, KitaevReport,
};
pub use krylov::{lanczos_lowest, norm_bound, LanczosParams, LanczosResult};
pub use verify::{
    theorem3_bound, verify_ds, verify_interpolation, verify_momentum_union, verify_openb,
    verify_theorem3, CheckRecord,
};

/// Dimension at or below which operators are diagonalized densely.
pub const DEFAULT_DENSE_THRESHOLD: usize = 2048;

/// Relative threshold separating the ground space from excited levels.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// The dense/Krylov switch point, overridable via `STHAM_DENSE_THRESHOLD`.
pub fn dense_threshold() -> usize {
    std::env::var("STHAM_DENSE_THRESHOLD")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_DENSE_THRESHOLD)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum SolverInfo {
    Dense,
    Krylov {
        iterations: usize,
        reorthogonalization: bool,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub ground_degeneracy: usize,
    /// First level above the ground space, if it was computed.
    pub gap: Option<f64>,
    pub solver: SolverInfo,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

/// Lowest eigenpairs, ascending; vectors are the columns of the matrix.
#[derive(Debug, Clone)]
pub struct LowSpectrum {
    pub values: Vec<f64>,
    pub vectors: CMat,
    pub solver: SolverInfo,
}

pub fn lowest_eigenpairs(
    h: &SparseHermitian,
    count: usize,
    choice: SolverChoice,
    seed: u64,
) -> Result<LowSpectrum> {
    let dim = h.dim();
    if count > dim {
        return Err(Error::OutOfRange(format!(
            "{count} eigenvalues of a dimension-{dim} operator"
        )));
    }
    let dense = match choice {
        SolverChoice::Dense => true,
        SolverChoice::Krylov => false,
        SolverChoice::Auto => dim <= dense_threshold(),
    };
    if dense {
        let e = hermitian_eigen(&h.to_dense());
        return Ok(LowSpectrum {
            values: e.values[..count].to_vec(),
            vectors: e.vectors.columns(0, count).into_owned(),
            solver: SolverInfo::Dense,
        });
    }
    let r = lanczos_lowest(
        h,
        count,
        LanczosParams {
            seed,
            ..LanczosParams::default()
        },
    )?;
    Ok(LowSpectrum {
        values: r.values,
        vectors: CMat::from_columns(&r.vectors),
        solver: SolverInfo::Krylov {
            iterations: r.iterations,
            reorthogonalization: true,
        },
    })
}

pub fn ground_degeneracy(values: &[f64], norm: f64) -> usize {
    let Some(&e0) = values.first() else { return 0 };
    let thr = DEGENERACY_TOL * norm.max(1.0);
    values.iter().take_while(|&&v| v - e0 <= thr).count()
}

pub fn spectrum_with(
    h: &SparseHermitian,
    count: usize,
    choice: SolverChoice,
    seed: u64,
) -> Result<SpectralReport> {
    let low = lowest_eigenpairs(h, count, choice, seed)?;
    let deg = ground_degeneracy(&low.values, norm_bound(h));
    Ok(SpectralReport {
        gap: low.values.get(deg).copied(),
        ground_degeneracy: deg,
        eigenvalues: low.values,
        solver: low.solver,
        seed,
        checks: Vec::new(),
    })
}

pub fn spectrum(h: &SparseHermitian, count: usize) -> Result<SpectralReport> {
    spectrum_with(h, count, SolverChoice::Auto, 0)
}

/// Every eigenvalue, ascending, by dense diagonalization.
pub fn full_spectrum(h: &SparseHermitian) -> Vec<f64> {
    hermitian_eigen(&h.to_dense()).values
}

/// Largest pairwise difference of two sorted spectra, infinite when their
/// lengths differ.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue exceeding the kernel threshold.
pub fn first_nonzero(values: &[f64], norm: f64) -> Option<f64> {
    let thr = DEGENERACY_TOL * norm.max(1.0);
    values.iter().copied().find(|&v| v > thr)
}

/// Orthonormal basis of the numerical kernel of a PSD operator.
pub fn kernel_basis(h: &SparseHermitian) -> CMat {
    let e = hermitian_eigen(&h.to_dense());
    let thr = DEGENERACY_TOL * norm_bound(h).max(1.0);
    let cols: Vec<CVec> = e
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.abs() <= thr)
        .map(|(i, _)| e.vectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return CMat::zeros(h.dim(), 0);
    }
    orthonormalize(&CMat::from_columns(&cols), 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::BasisTag;

    #[test]
    fn diagonal_spectrum() {
        let h = SparseHermitian::from_diagonal(&[3.0, 0.0, 1.0], BasisTag::new("d"));
        let r = spectrum(&h, 3).unwrap();
        assert_eq!(r.eigenvalues, vec![0.0, 1.0, 3.0]);
        assert_eq!(r.ground_degeneracy, 1);
        assert_eq!(r.gap, Some(1.0));
    }

    #[test]
    fn threshold_env_default() {
        if std::env::var("STHAM_DENSE_THRESHOLD").is_err() {
            assert_eq!(dense_threshold(), 2048);
        }
    }
}
