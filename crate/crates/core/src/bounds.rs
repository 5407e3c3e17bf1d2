//! Estimation limits for a single far-field source.
//!
//! The angle FIM collapses to `J = 2·T·SNR·k²·sin²θ·L_geo(p)`, so the CRB
//! depends on the placement only through its geometric variance.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{effective_squared_aperture, geometric_variance};
use crate::signal::{steering_derivative, steering_vector_with_wavenumber, NORMALIZED_WAVENUMBER};

/// `|sin θ|` below this is treated as endfire.
const ENDFIRE_TOL: f64 = 1e-12;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrbParams {
    /// Angle of arrival in radians.
    pub theta: f64,
    /// `P_s / σ_n²`.
    pub snr_linear: f64,
    pub snapshots: usize,
    /// `2π/λ`; `2π` when positions are in wavelengths.
    pub wavenumber: f64,
}

impl CrbParams {
    pub fn new(theta: f64, snr_linear: f64, snapshots: usize) -> Result<Self> {
        Self::with_wavenumber(theta, snr_linear, snapshots, NORMALIZED_WAVENUMBER)
    }

    pub fn with_wavenumber(theta: f64, snr_linear: f64, snapshots: usize, wavenumber: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("angle must be finite, got {theta}")));
        }
        if !(snr_linear.is_finite() && snr_linear > 0.0) {
            return Err(Error::InvalidParameter(format!("SNR must be positive, got {snr_linear}")));
        }
        if snapshots == 0 {
            return Err(Error::InvalidParameter("snapshot count must be at least 1".into()));
        }
        if !(wavenumber.is_finite() && wavenumber > 0.0) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {wavenumber}")));
        }
        Ok(Self {
            theta,
            snr_linear,
            snapshots,
            wavenumber,
        })
    }

    fn scale(&self) -> f64 {
        2.0 * self.snapshots as f64 * self.snr_linear
    }
}

/// Closed-form angle FIM `2·T·SNR·k²·sin²θ·L_geo(p)`.
pub fn fim_theta(params: &CrbParams, positions: &[f64]) -> f64 {
    let s = params.theta.sin();
    params.scale() * params.wavenumber.powi(2) * s * s * geometric_variance(positions)
}

/// Angle FIM from the Slepian–Bangs quadratic form
/// `2·T·SNR·Re{ȧᴴ·(I − a·aᴴ/(aᴴa))·ȧ}`, evaluated with explicit vectors.
pub fn fim_theta_projector(params: &CrbParams, positions: &[f64]) -> f64 {
    let m = positions.len();
    let a = steering_vector_with_wavenumber(params.theta, positions, params.wavenumber);
    let a_dot = steering_derivative(params.theta, positions, params.wavenumber);
    let norm = a.dotc(&a);
    let projector = DMatrix::<Complex64>::identity(m, m) - (&a * a.adjoint()) / norm;
    let quad = a_dot.dotc(&(projector * &a_dot));
    params.scale() * quad.re
}

/// `1 / fim_theta`, in rad².
pub fn crb_theta(params: &CrbParams, positions: &[f64]) -> Result<f64> {
    if params.theta.sin().abs() < ENDFIRE_TOL {
        return Err(Error::UnboundedCrb("endfire angle (sin θ = 0)"));
    }
    let fim = fim_theta(params, positions);
    if fim <= 0.0 {
        return Err(Error::UnboundedCrb("degenerate geometry (zero position variance)"));
    }
    Ok(1.0 / fim)
}

/// CRB for positions in metres at carrier wavelength `wavelength` metres:
/// `λ²/(8π²·T·SNR·sin²θ·L_geo)`.
pub fn crb_theta_physical(
    theta: f64,
    snr_linear: f64,
    snapshots: usize,
    wavelength: f64,
    positions_m: &[f64],
) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength}")));
    }
    let params = CrbParams::with_wavenumber(theta, snr_linear, snapshots, 2.0 * PI / wavelength)?;
    crb_theta(&params, positions_m)
}

/// Interference-plus-noise variance entering the AoA-MSE bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    pub sigma_z_sq: f64,
}

impl BoundParams {
    pub fn new(sigma_z_sq: f64) -> Result<Self> {
        if !(sigma_z_sq.is_finite() && sigma_z_sq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interference-plus-noise variance must be positive, got {sigma_z_sq}"
            )));
        }
        Ok(Self { sigma_z_sq })
    }

    /// With AWGN as the only disturbance, `σ_z² = σ_n² = P_s/SNR`.
    pub fn from_noise(signal_power: f64, snr_linear: f64) -> Result<Self> {
        Self::new(signal_power / snr_linear)
    }
}

/// Cosine-domain AoA-MSE upper bound `16·σ_z⁴·γ_max / (λ̄²·M⁴)`.
pub fn aoamse_upper_bound(bound: &BoundParams, positions: &[f64], gamma_max: f64) -> Result<f64> {
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(Error::InvalidParameter(format!("γ_max must be positive, got {gamma_max}")));
    }
    let lambda_bar_sq = effective_squared_aperture(positions);
    if lambda_bar_sq <= 0.0 {
        return Err(Error::UnboundedMseBound("all ports coincide"));
    }
    let m4 = (positions.len() as f64).powi(4);
    Ok(16.0 * bound.sigma_z_sq.powi(2) * gamma_max / (lambda_bar_sq * m4))
}
