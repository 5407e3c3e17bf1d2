//! The placement objective `J(p) = ln γ_max(p) − ln λ̄²(p)` and its gradient.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::spectrum::{codebook_spectrum, GramSpectrum};
use crate::error::{Error, Result};
use crate::geometry::effective_squared_aperture;
use crate::signal::{build_codebook, AngleGrid, Codebook};

/// Default residual tolerance for the dominant eigenpair.
pub const DEFAULT_EIG_TOL: f64 = 1e-10;

/// Everything computed at one placement.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub objective: f64,
    pub gamma_max: f64,
    pub lambda_bar_sq: f64,
    pub spectrum: GramSpectrum,
    pub codebook: Codebook,
}

impl Evaluation {
    /// `∇J = ∇γ_max/γ_max − ∇λ̄²/λ̄²`.
    pub fn gradient(&self) -> Vec<f64> {
        let g_gamma = grad_gamma_max(&self.codebook, &self.spectrum);
        let g_lambda = grad_lambda_bar(self.codebook.positions());
        g_gamma
            .iter()
            .zip(&g_lambda)
            .map(|(gg, gl)| gg / self.gamma_max - gl / self.lambda_bar_sq)
            .collect()
    }
}

pub fn evaluate(positions: &[f64], grid: &AngleGrid, eig_tol: f64) -> Result<Evaluation> {
    let lambda_bar_sq = effective_squared_aperture(positions);
    if !(lambda_bar_sq > 0.0) {
        return Err(Error::UndefinedObjective("all ports coincide (zero effective aperture)"));
    }
    let codebook = build_codebook(positions, grid);
    let spectrum = codebook_spectrum(&codebook, eig_tol)?;
    if spectrum.is_degenerate() {
        log::warn!(
            "dominant Gram eigenvalue is repeated (γ₁ = {:.6e}, γ₂ = {:.6e}); gradient uses the solver's eigenvector",
            spectrum.gamma_max,
            spectrum.second_eigenvalue
        );
    }
    let gamma_max = spectrum.gamma_max;
    Ok(Evaluation {
        objective: gamma_max.ln() - lambda_bar_sq.ln(),
        gamma_max,
        lambda_bar_sq,
        spectrum,
        codebook,
    })
}

pub fn objective_j(positions: &[f64], grid: &AngleGrid) -> Result<f64> {
    evaluate(positions, grid, DEFAULT_EIG_TOL).map(|e| e.objective)
}

/// `∂λ̄²/∂p_m = (16π²/M²)·Σ_k (p_m − p_k)`.
pub fn grad_lambda_bar(positions: &[f64]) -> Vec<f64> {
    let m = positions.len() as f64;
    let sum: f64 = positions.iter().sum();
    let scale = 16.0 * PI * PI / (m * m);
    positions.iter().map(|&p| scale * (m * p - sum)).collect()
}

/// `∂γ_max/∂p_m = uᴴ·(∂Q/∂p_m)·u` with `∂Q = ∂Aᴴ·A + Aᴴ·∂A`.
///
/// Row `r = v·M + u` of `A` depends on `p_u − p_v`, so
/// `∂A[r, n]/∂p_m = −j·2π·cos ϑ_n·(𝟙[u=m] − 𝟙[v=m])·A[r, n]`. With
/// `y = A·u` and `z = A·diag(cos ϑ)·u` the quadratic form reduces to
/// `4π·Σ_r (𝟙[u=m] − 𝟙[v=m])·Im(conj(y_r)·z_r)`.
pub fn grad_gamma_max(codebook: &Codebook, spectrum: &GramSpectrum) -> Vec<f64> {
    let a = codebook.columns();
    let m = codebook.port_count();
    let u = &spectrum.u_max;
    let cos_u = DVector::from_iterator(
        u.len(),
        codebook.grid().angles().iter().zip(u.iter()).map(|(t, z)| z * t.cos()),
    );
    let y = a * u;
    let z = a * cos_u;
    let mut grad = vec![0.0; m];
    for v in 0..m {
        for uu in 0..m {
            let r = v * m + uu;
            let w = (y[r].conj() * z[r]).im;
            grad[uu] += w;
            grad[v] -= w;
        }
    }
    grad.iter_mut().for_each(|g| *g *= 4.0 * PI);
    grad
}

/// Derivative of the codebook with respect to port `port`, formed explicitly.
pub fn codebook_derivative(codebook: &Codebook, port: usize) -> nalgebra::DMatrix<Complex64> {
    let a = codebook.columns();
    let m = codebook.port_count();
    let angles = codebook.grid().angles();
    nalgebra::DMatrix::from_fn(a.nrows(), a.ncols(), |r, n| {
        let (u, v) = (r % m, r / m);
        let sel = f64::from(u8::from(u == port)) - f64::from(u8::from(v == port));
        if sel == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -2.0 * PI * angles[n].cos() * sel) * a[(r, n)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_scaled_mra, make_ula};
    use crate::optimizer::spectrum::{gram_matrix, max_eigpair};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gamma_of(p: &[f64], grid: &AngleGrid) -> f64 {
        evaluate(p, grid, DEFAULT_EIG_TOL).unwrap().gamma_max
    }

    fn random_geometry(m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let w = (m - 1) as f64 / 2.0;
        let mut p: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..w)).collect();
        p.sort_by(f64::total_cmp);
        p[0] = 0.0;
        p[m - 1] = w;
        p
    }

    #[test]
    fn lambda_gradient_values() {
        let g = grad_lambda_bar(&[0.0, 0.5, 1.0]);
        assert!(g[1].abs() < 1e-14);
        let g = grad_lambda_bar(&[0.0, 1.0]);
        assert_relative_eq!(g[0], -4.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(g[1], 4.0 * PI * PI, max_relative = 1e-14);
        let p = [0.0, 0.3, 0.35, 1.2, 2.0];
        let g = grad_lambda_bar(&p);
        assert!(g.iter().sum::<f64>().abs() < 1e-12);
        let h = 1e-6;
        for m in 0..p.len() {
            let mut hi = p;
            let mut lo = p;
            hi[m] += h;
            lo[m] -= h;
            let fd = (effective_squared_aperture(&hi) - effective_squared_aperture(&lo)) / (2.0 * h);
            assert_relative_eq!(g[m], fd, max_relative = 1e-5);
        }
    }

    #[test]
    fn aperture_term_pushes_away_from_centroid() {
        // The descent step on −ln λ̄² is +∇λ̄²/λ̄².
        let p = [0.0, 0.3, 0.35, 1.2, 1.9, 2.0];
        let mean = p.iter().sum::<f64>() / p.len() as f64;
        let lambda = effective_squared_aperture(&p);
        for (gm, pm) in grad_lambda_bar(&p).iter().zip(p) {
            let descent = -(-gm / lambda);
            assert_eq!(descent.signum(), (pm - mean).signum());
        }
    }

    #[test]
    fn gamma_gradient_matches_explicit_dq() {
        let grid = AngleGrid::uniform(60).unwrap();
        let p = [0.0, 0.35, 0.9, 1.5];
        let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
        let fast = grad_gamma_max(&e.codebook, &e.spectrum);
        let a = e.codebook.columns();
        let u = &e.spectrum.u_max;
        for m in 0..4 {
            let da = codebook_derivative(&e.codebook, m);
            let dq = da.adjoint() * a + a.adjoint() * &da;
            let quad = u.dotc(&(dq * u));
            assert!(quad.im.abs() < 1e-8 * quad.re.abs().max(1.0));
            assert_relative_eq!(fast[m], quad.re, max_relative = 1e-10, epsilon = 1e-9);
        }
    }

    #[test]
    fn gamma_gradient_matches_finite_differences() {
        let grid = AngleGrid::uniform(180).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0;
        while checked < 8 {
            let p = random_geometry(4, &mut rng);
            let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
            if e.spectrum.is_degenerate() {
                continue;
            }
            let g = grad_gamma_max(&e.codebook, &e.spectrum);
            let h = 1e-6;
            for m in 0..p.len() {
                let mut hi = p.clone();
                let mut lo = p.clone();
                hi[m] += h;
                lo[m] -= h;
                let fd = (gamma_of(&hi, &grid) - gamma_of(&lo, &grid)) / (2.0 * h);
                let scale = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
                assert!((g[m] - fd).abs() <= 1e-4 * scale, "m={m}: {} vs {fd}", g[m]);
            }
            checked += 1;
        }
    }

    #[test]
    fn gamma_gradient_translation_direction() {
        let grid = AngleGrid::uniform(180).unwrap();
        let p = [0.0, 0.45, 1.05, 1.5, 2.0];
        let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
        let g = grad_gamma_max(&e.codebook, &e.spectrum);
        let scale = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(g.iter().sum::<f64>().abs() <= 1e-6 * scale.max(1.0));
    }

    #[test]
    fn single_angle_grid() {
        let grid = AngleGrid::new(vec![1.1]).unwrap();
        let p = [0.0, 0.45, 1.05, 1.5];
        let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
        assert_relative_eq!(e.gamma_max, 16.0, max_relative = 1e-12);
        assert_relative_eq!(e.objective, 16f64.ln() - effective_squared_aperture(&p).ln(), max_relative = 1e-12);
        assert!(grad_gamma_max(&e.codebook, &e.spectrum).iter().all(|g| g.abs() < 1e-9));
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        let grid = AngleGrid::uniform(180).unwrap();
        let p = make_scaled_mra(5, 2.0).unwrap().into_positions();
        let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
        assert!(!e.spectrum.is_degenerate());
        let g = e.gradient();
        let h = 1e-6;
        for m in 0..p.len() {
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[m] += h;
            lo[m] -= h;
            let fd = (objective_j(&hi, &grid).unwrap() - objective_j(&lo, &grid).unwrap()) / (2.0 * h);
            assert!((g[m] - fd).abs() <= 1e-4 * g[m].abs().max(1e-3), "m={m}: {} vs {fd}", g[m]);
        }
    }

    #[test]
    fn log_scale_factor_only_shifts_objective() {
        // Dropping the 4π² factor from λ̄² shifts J by ln 4π² and leaves the
        // gradient of ln λ̄² unchanged.
        let grid = AngleGrid::uniform(180).unwrap();
        let p = [0.0, 0.4, 1.3, 2.0];
        let e = evaluate(&p, &grid, DEFAULT_EIG_TOL).unwrap();
        let plain = e.lambda_bar_sq / (4.0 * PI * PI);
        let j_plain = e.gamma_max.ln() - plain.ln();
        assert_relative_eq!(j_plain - e.objective, (4.0 * PI * PI).ln(), max_relative = 1e-12);
        let g = grad_lambda_bar(&p);
        for gm in g {
            let with = gm / e.lambda_bar_sq;
            let without = (gm / (4.0 * PI * PI)) / plain;
            assert_relative_eq!(with, without, max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn objective_rejects_coincident_ports() {
        let grid = AngleGrid::uniform(10).unwrap();
        assert!(matches!(objective_j(&[1.0, 1.0, 1.0], &grid), Err(Error::UndefinedObjective(_))));
    }

    #[test]
    fn ula_spectrum_matches_dense_gram() {
        let grid = AngleGrid::uniform(180).unwrap();
        let ula = make_ula(5).unwrap();
        let e = evaluate(ula.positions(), &grid, DEFAULT_EIG_TOL).unwrap();
        let dense = max_eigpair(&gram_matrix(&e.codebook), DEFAULT_EIG_TOL).unwrap();
        assert_relative_eq!(e.gamma_max, dense.gamma_max, max_relative = 1e-11);
        assert!(e.gamma_max >= 25.0);
    }
}
