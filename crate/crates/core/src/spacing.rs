//! Distribution of the minimum adjacent gap among `M` ports dropped
//! uniformly at random on `[0, W_max]`.
//!
//! With `δ_max = W_max/(M−1)`:
//!
//! * `P(Δ_min > δ) = (1 − δ/δ_max)^M`
//! * `f(δ) = (M(M−1)/W_max)·(1 − δ/δ_max)^(M−1)`
//! * `E[Δ_min] = W_max/(M² − 1)`

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Bin count used when tabulating the empirical density.
pub const DEFAULT_BINS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingDistribution {
    port_count: usize,
    aperture: f64,
}

impl SpacingDistribution {
    pub fn new(port_count: usize, aperture: f64) -> Result<Self> {
        if port_count < 2 {
            return Err(Error::InvalidPortCount(port_count));
        }
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(Error::InvalidParameter(format!("aperture must be positive, got {aperture}")));
        }
        Ok(Self { port_count, aperture })
    }

    pub fn port_count(&self) -> usize {
        self.port_count
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    /// Upper end of the support, the ULA gap `W_max/(M−1)`.
    pub fn support_max(&self) -> f64 {
        self.aperture / (self.port_count - 1) as f64
    }

    /// `1 − δ/δ_max` clamped to `[0, 1]`.
    fn slack(&self, delta: f64) -> f64 {
        (1.0 - delta / self.support_max()).clamp(0.0, 1.0)
    }

    /// Density of `Δ_min`; zero outside `[0, δ_max]`.
    pub fn pdf(&self, delta: f64) -> f64 {
        if !(0.0..=self.support_max()).contains(&delta) {
            return 0.0;
        }
        let m = self.port_count as f64;
        m * (m - 1.0) / self.aperture * self.slack(delta).powi(self.port_count as i32 - 1)
    }

    /// `P(Δ_min > δ)`, clamped to 1 below the support and 0 above it.
    pub fn ccdf(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 1.0;
        }
        self.slack(delta).powi(self.port_count as i32)
    }

    pub fn cdf(&self, delta: f64) -> f64 {
        1.0 - self.ccdf(delta)
    }

    pub fn expected_min_spacing(&self) -> f64 {
        let m = self.port_count as f64;
        self.aperture / (m * m - 1.0)
    }

    /// Draws one realisation of `Δ_min` by sorting `M` uniform positions.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut buf = vec![0.0; self.port_count];
        self.sample_into(rng, &mut buf)
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [f64]) -> f64 {
        for x in buf.iter_mut() {
            *x = rng.random::<f64>() * self.aperture;
        }
        buf.sort_unstable_by(f64::total_cmp);
        buf.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// `count` independent draws of `Δ_min`.
    pub fn sample_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        let mut buf = vec![0.0; self.port_count];
        (0..count).map(|_| self.sample_into(rng, &mut buf)).collect()
    }
}

/// One row of the empirical-versus-analytic table, evaluated at a bin centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacingRow {
    pub delta: f64,
    pub pdf_theory: f64,
    pub pdf_empirical: Option<f64>,
    pub ccdf_theory: f64,
    pub ccdf_empirical: Option<f64>,
}

/// Tabulates the analytic PDF/CCDF against a density-normalised histogram of
/// `samples`. With no samples the empirical columns are `None`.
pub fn empirical_vs_theory(dist: &SpacingDistribution, samples: &[f64], bins: usize) -> Result<Vec<SpacingRow>> {
    if bins == 0 {
        return Err(Error::InvalidParameter("bin count must be at least 1".into()));
    }
    let hi = dist.support_max();
    let width = hi / bins as f64;

    let mut counts = vec![0usize; bins];
    for &s in samples {
        let idx = ((s / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = samples.len();

    let rows = (0..bins)
        .map(|b| {
            let delta = (b as f64 + 0.5) * width;
            let (pdf_empirical, ccdf_empirical) = if n == 0 {
                (None, None)
            } else {
                let above = n - sorted.partition_point(|&x| x <= delta);
                (
                    Some(counts[b] as f64 / (n as f64 * width)),
                    Some(above as f64 / n as f64),
                )
            };
            SpacingRow {
                delta,
                pdf_theory: dist.pdf(delta),
                pdf_empirical,
                ccdf_theory: dist.ccdf(delta),
                ccdf_empirical,
            }
        })
        .collect();
    Ok(rows)
}

/// Kolmogorov–Smirnov distance between the sample and the analytic CDF.
pub fn ks_distance(dist: &SpacingDistribution, samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic 99% critical value of the one-sample KS statistic.
pub fn ks_critical_99(samples: usize) -> f64 {
    1.628 / (samples as f64).sqrt()
}

/// Monte-Carlo mean summary for one `(M, W_max)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationSummary {
    #[serde(rename = "M")]
    pub port_count: usize,
    #[serde(rename = "W_max")]
    pub aperture: f64,
    pub expected_theory: f64,
    pub expected_empirical: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl ExpectationSummary {
    pub fn from_samples(dist: &SpacingDistribution, samples: &[f64], seed: u64) -> Self {
        let expected_empirical =
            (!samples.is_empty()).then(|| samples.iter().sum::<f64>() / samples.len() as f64);
        Self {
            port_count: dist.port_count(),
            aperture: dist.aperture(),
            expected_theory: dist.expected_min_spacing(),
            expected_empirical,
            samples: samples.len(),
            seed,
        }
    }
}
