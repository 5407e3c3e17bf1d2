//! Gram matrix of the sensing codebook and its dominant eigenpair.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::Codebook;

/// Relative gap between the two largest eigenvalues below which the
/// dominant eigenvalue is treated as repeated.
pub const DEGENERACY_RTOL: f64 = 1e-6;

/// Relative Hermitian defect tolerated in `max_eigpair` input.
const HERMITIAN_RTOL: f64 = 1e-10;

/// Dominant eigenpair of `Q = AᴴA`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSpectrum {
    pub gamma_max: f64,
    /// Unit-norm, with its largest-magnitude entry real and positive.
    pub u_max: DVector<Complex64>,
    /// Second-largest eigenvalue, used for the degeneracy check.
    pub second_eigenvalue: f64,
    /// `‖Q·u − γ·u‖ / γ`.
    pub relative_residual: f64,
}

impl GramSpectrum {
    pub fn is_degenerate(&self) -> bool {
        self.gamma_max - self.second_eigenvalue < DEGENERACY_RTOL * self.gamma_max.abs()
    }
}

/// `Q = AᴴA` (`N × N`).
pub fn gram_matrix(codebook: &Codebook) -> DMatrix<Complex64> {
    let a = codebook.columns();
    a.adjoint() * a
}

fn normalize_phase(u: &mut DVector<Complex64>) {
    let norm = u.norm();
    if norm == 0.0 {
        return;
    }
    let pivot = u
        .iter()
        .copied()
        .enumerate()
        .fold((0usize, -1.0f64), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0;
    let phase = u[pivot].conj() / u[pivot].norm();
    u.apply(|z| *z = *z * phase / norm);
    u[pivot] = Complex64::new(u[pivot].re, 0.0);
}

/// Largest and second-largest eigenvalue with the leading eigenvector of a
/// Hermitian matrix, via a dense decomposition.
fn dense_top_two(q: DMatrix<Complex64>) -> (f64, f64, DVector<Complex64>) {
    let eig = q.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let top = order[0];
    let second = order.get(1).map_or(f64::NEG_INFINITY, |&i| eig.eigenvalues[i]);
    (eig.eigenvalues[top], second, eig.eigenvectors.column(top).into_owned())
}

fn check_residual(gamma: f64, residual: f64, tol: f64) -> Result<f64> {
    let rel = if gamma != 0.0 { residual / gamma.abs() } else { residual };
    if !(rel <= tol) {
        return Err(Error::NumericalFailure(format!(
            "eigenpair residual {rel:e} exceeds tolerance {tol:e}"
        )));
    }
    Ok(rel)
}

/// Dominant eigenpair of a Hermitian matrix with residual `‖Qu − γu‖ ≤ tol·γ`.
pub fn max_eigpair(q: &DMatrix<Complex64>, tol: f64) -> Result<GramSpectrum> {
    if !q.is_square() || q.nrows() == 0 {
        return Err(Error::InvalidMatrix(format!("expected a non-empty square matrix, got {:?}", q.shape())));
    }
    let defect = (q - q.adjoint()).norm();
    if defect > HERMITIAN_RTOL * q.norm() {
        return Err(Error::InvalidMatrix(format!("matrix is not Hermitian (defect {defect:e})")));
    }
    let (gamma_max, second_eigenvalue, mut u_max) = dense_top_two(q.clone());
    normalize_phase(&mut u_max);
    let residual = (q * &u_max - &u_max * Complex64::from(gamma_max)).norm();
    let relative_residual = check_residual(gamma_max, residual, tol)?;
    Ok(GramSpectrum {
        gamma_max,
        u_max,
        second_eigenvalue,
        relative_residual,
    })
}

/// Dominant eigenpair of `AᴴA` for a codebook.
///
/// When `M² < N` this decomposes the smaller `AAᴴ`, which shares the nonzero
/// spectrum of `AᴴA`, and lifts the eigenvector with `Aᴴ`. The residual is
/// always measured against `AᴴA` itself.
pub fn codebook_spectrum(codebook: &Codebook, tol: f64) -> Result<GramSpectrum> {
    let a = codebook.columns();
    let (rows, cols) = a.shape();
    if rows >= cols {
        return max_eigpair(&gram_matrix(codebook), tol);
    }
    let outer = a * a.adjoint();
    let (gamma_max, second, w) = dense_top_two(outer);
    // AAᴴ has at most `rows` eigenvalues; AᴴA pads the rest with zeros.
    let second_eigenvalue = if rows == 1 { 0.0 } else { second.max(0.0) };
    let mut u_max = a.adjoint() * w;
    normalize_phase(&mut u_max);
    let q_u = a.adjoint() * (a * &u_max);
    let residual = (q_u - &u_max * Complex64::from(gamma_max)).norm();
    let relative_residual = check_residual(gamma_max, residual, tol)?;
    Ok(GramSpectrum {
        gamma_max,
        u_max,
        second_eigenvalue,
        relative_residual,
    })
}
