//! Single-source line-of-sight signal model and the difference co-array
//! sensing codebook built from vectorised covariances.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Wavenumber under wavelength-normalised positions (`λ = 1`).
pub const NORMALIZED_WAVENUMBER: f64 = 2.0 * PI;

/// Grid size used for codebooks unless overridden.
pub const DEFAULT_GRID_SIZE: usize = 180;

/// Strictly increasing angles in `[0, π]`, in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles: Vec<f64>,
}

impl AngleGrid {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParameter("angle grid is empty".into()));
        }
        if angles.iter().any(|a| !(0.0..=PI).contains(a)) {
            return Err(Error::InvalidParameter("grid angles must lie in [0, π]".into()));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid angles must be strictly increasing".into()));
        }
        Ok(Self { angles })
    }

    /// `n` equally spaced angles `(i·π/(n−1))`, both endpoints included.
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "a uniform grid needs at least 2 points, got {n}"
            )));
        }
        let step = PI / (n - 1) as f64;
        let mut angles: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
        angles[n - 1] = PI;
        Ok(Self { angles })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Spacing of a uniform grid; `None` for a single point.
    pub fn cell_width(&self) -> Option<f64> {
        (self.angles.len() > 1)
            .then(|| (self.angles[self.angles.len() - 1] - self.angles[0]) / (self.angles.len() - 1) as f64)
    }
}

/// Received snapshots `Y` (`M × T`) with the powers used to synthesise them.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    pub data: DMatrix<Complex64>,
    pub signal_power: f64,
    pub noise_variance: f64,
}

impl SnapshotMatrix {
    pub fn port_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn snapshot_count(&self) -> usize {
        self.data.ncols()
    }
}

/// `a(θ)` with elements `exp(−j·2π·p_m·cos θ)`.
pub fn steering_vector(theta: f64, positions: &[f64]) -> DVector<Complex64> {
    steering_vector_with_wavenumber(theta, positions, NORMALIZED_WAVENUMBER)
}

/// `a(θ)` with elements `exp(−j·k·p_m·cos θ)` for positions in metres.
pub fn steering_vector_with_wavenumber(theta: f64, positions: &[f64], wavenumber: f64) -> DVector<Complex64> {
    let c = theta.cos();
    DVector::from_iterator(
        positions.len(),
        positions.iter().map(|&p| Complex64::from_polar(1.0, -wavenumber * p * c)),
    )
}

/// `∂a/∂θ = j·k·sin θ·diag(p)·a(θ)`.
pub fn steering_derivative(theta: f64, positions: &[f64], wavenumber: f64) -> DVector<Complex64> {
    let a = steering_vector_with_wavenumber(theta, positions, wavenumber);
    let s = theta.sin();
    DVector::from_iterator(
        positions.len(),
        positions
            .iter()
            .zip(a.iter())
            .map(|(&p, &am)| Complex64::new(0.0, wavenumber * p * s) * am),
    )
}

/// One circularly-symmetric complex Gaussian draw; `normal` carries the
/// per-component standard deviation, i.e. `sqrt(variance / 2)`.
fn complex_gaussian<R: Rng + ?Sized>(normal: &Normal<f64>, rng: &mut R) -> Complex64 {
    Complex64::new(normal.sample(rng), normal.sample(rng))
}

/// `y(t) = a(θ)s(t) + n(t)` for `t = 1..T` with Gaussian source and noise.
pub fn synth_snapshots<R: Rng + ?Sized>(
    theta: f64,
    positions: &[f64],
    signal_power: f64,
    noise_variance: f64,
    snapshots: usize,
    rng: &mut R,
) -> Result<SnapshotMatrix> {
    if snapshots == 0 {
        return Err(Error::InvalidParameter("snapshot count must be at least 1".into()));
    }
    if !(signal_power >= 0.0 && noise_variance >= 0.0) {
        return Err(Error::InvalidParameter("signal power and noise variance must be non-negative".into()));
    }
    let m = positions.len();
    let a = steering_vector(theta, positions);
    let source = Normal::new(0.0, (signal_power / 2.0).sqrt()).expect("finite std");
    let noise = Normal::new(0.0, (noise_variance / 2.0).sqrt()).expect("finite std");
    let mut data = DMatrix::zeros(m, snapshots);
    for t in 0..snapshots {
        let s = complex_gaussian(&source, rng);
        for i in 0..m {
            data[(i, t)] = a[i] * s + complex_gaussian(&noise, rng);
        }
    }
    Ok(SnapshotMatrix {
        data,
        signal_power,
        noise_variance,
    })
}

/// `(1/T)·Y·Yᴴ`.
pub fn sample_covariance(snapshots: &SnapshotMatrix) -> DMatrix<Complex64> {
    let t = snapshots.snapshot_count() as f64;
    let y = &snapshots.data;
    let mut r = y * y.adjoint();
    r.unscale_mut(t);
    r
}

/// `P_s·a·aᴴ + σ_n²·I`.
pub fn model_covariance(theta: f64, positions: &[f64], signal_power: f64, noise_variance: f64) -> DMatrix<Complex64> {
    let a = steering_vector(theta, positions);
    let mut r = &a * a.adjoint() * Complex64::from(signal_power);
    for i in 0..positions.len() {
        r[(i, i)] += noise_variance;
    }
    r
}

/// Column-major stacking `vec(R)`.
pub fn vectorize_covariance(r: &DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_column_slice(r.as_slice())
}

/// The `M² × N` difference co-array codebook.
///
/// Column `n` is `a(ϑ_n)* ⊗ a(ϑ_n)`; the entry at flat index `v·M + u`
/// (zero-based) is `exp(−j·2π·(p_u − p_v)·cos ϑ_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    columns: DMatrix<Complex64>,
    grid: AngleGrid,
    positions: Vec<f64>,
}

impl Codebook {
    pub fn columns(&self) -> &DMatrix<Complex64> {
        &self.columns
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn port_count(&self) -> usize {
        self.positions.len()
    }

    /// Writes `n,flat_index,real,imag` rows (zero-based indices).
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,flat_index,real,imag")?;
        for (n, col) in self.columns.column_iter().enumerate() {
            for (r, z) in col.iter().enumerate() {
                writeln!(out, "{n},{r},{},{}", crate::fmt_sig(z.re), crate::fmt_sig(z.im))?;
            }
        }
        Ok(())
    }
}

/// Pairwise differences `p_u − p_v` in flat (column-major) order.
pub(crate) fn pairwise_differences(positions: &[f64]) -> Vec<f64> {
    positions
        .iter()
        .flat_map(|&pv| positions.iter().map(move |&pu| pu - pv))
        .collect()
}

pub fn build_codebook(positions: &[f64], grid: &AngleGrid) -> Codebook {
    let m = positions.len();
    let diffs = pairwise_differences(positions);
    let mut columns = DMatrix::zeros(m * m, grid.len());
    for (n, &theta) in grid.angles().iter().enumerate() {
        let c = theta.cos();
        for (r, &d) in diffs.iter().enumerate() {
            columns[(r, n)] = Complex64::from_polar(1.0, -2.0 * PI * d * c);
        }
    }
    Codebook {
        columns,
        grid: grid.clone(),
        positions: positions.to_vec(),
    }
}

/// Grid-matched estimate: the angle maximising `|c_nᴴ·y_v|` and its score
/// normalised to `[0, 1]` by `‖c_n‖·‖y_v‖`. Ties go to the lowest index.
pub fn matched_grid_estimate(virtual_signal: &DVector<Complex64>, codebook: &Codebook) -> Result<(f64, f64)> {
    let a = codebook.columns();
    if virtual_signal.len() != a.nrows() {
        return Err(Error::InvalidParameter(format!(
            "virtual signal has length {}, codebook rows are {}",
            virtual_signal.len(),
            a.nrows()
        )));
    }
    let y_norm = virtual_signal.norm();
    let col_norm = codebook.port_count() as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for (n, col) in a.column_iter().enumerate() {
        let corr = col.dotc(virtual_signal).norm();
        if corr > best.1 {
            best = (n, corr);
        }
    }
    let score = if y_norm > 0.0 { best.1 / (col_norm * y_norm) } else { 0.0 };
    Ok((codebook.grid().angles()[best.0], score))
}
