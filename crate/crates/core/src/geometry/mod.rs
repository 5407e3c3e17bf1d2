//! Port placements on a finite linear aperture.
//!
//! Positions are in wavelength units throughout. A feasible placement has its
//! first port at 0, its last port at the aperture `W_max`, strictly increasing
//! positions, and adjacent gaps of at least `d_min`.

mod mra;

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use mra::{covers_contiguous_lags, mra_indices, MRA_MAX_PORTS, MRA_MIN_PORTS};

/// Slack allowed when checking gaps and edge pinning, relative to the aperture.
const FEASIBILITY_RTOL: f64 = 1e-10;

fn feasibility_tol(aperture: f64) -> f64 {
    FEASIBILITY_RTOL * aperture.max(1.0)
}

/// A feasible placement of `M ≥ 2` ports on `[0, W_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrayGeometry {
    positions: Vec<f64>,
    aperture: f64,
    min_spacing: f64,
}

impl ArrayGeometry {
    /// Validates `positions` against the edge-pinning, ordering and
    /// minimum-spacing constraints. The aperture is the last position.
    pub fn new(positions: Vec<f64>, min_spacing: f64) -> Result<Self> {
        let m = positions.len();
        if m < 2 {
            return Err(Error::InvalidPortCount(m));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("non-finite port position".into()));
        }
        if !(min_spacing.is_finite() && min_spacing >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "minimum spacing must be finite and non-negative, got {min_spacing}"
            )));
        }
        let aperture = positions[m - 1];
        let tol = feasibility_tol(aperture);
        if positions[0] != 0.0 {
            return Err(Error::InfeasibleConstraints(format!(
                "first port must sit at 0, found {}",
                positions[0]
            )));
        }
        if (m - 1) as f64 * min_spacing > aperture + tol {
            return Err(Error::InfeasibleConstraints(format!(
                "{} gaps of {min_spacing} do not fit in aperture {aperture}",
                m - 1
            )));
        }
        for (i, w) in positions.windows(2).enumerate() {
            let gap = w[1] - w[0];
            if gap <= 0.0 || gap < min_spacing - tol {
                return Err(Error::InfeasibleConstraints(format!(
                    "gap between ports {} and {} is {gap}, minimum is {min_spacing}",
                    i + 1,
                    i + 2
                )));
            }
        }
        Ok(Self {
            positions,
            aperture,
            min_spacing,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub fn port_count(&self) -> usize {
        self.positions.len()
    }

    /// Positions in metres for a carrier wavelength given in metres.
    pub fn positions_in_metres(&self, wavelength: f64) -> Vec<f64> {
        self.positions.iter().map(|p| p * wavelength).collect()
    }

    pub fn into_positions(self) -> Vec<f64> {
        self.positions
    }
}

impl AsRef<[f64]> for ArrayGeometry {
    fn as_ref(&self) -> &[f64] {
        &self.positions
    }
}

/// How an initial placement is produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlacementSpec {
    Ula,
    ScaledMra,
    Custom { positions: Vec<f64> },
    Random { seed: u64 },
}

impl PlacementSpec {
    /// Builds the placement for `port_count` ports on `[0, aperture]`.
    ///
    /// `Ula` always uses half-wavelength spacing and ignores `aperture`.
    /// `Random` draws uniform positions from the seeded generator and
    /// projects them onto the feasible set.
    pub fn build(&self, port_count: usize, aperture: f64, min_spacing: f64) -> Result<ArrayGeometry> {
        match self {
            Self::Ula => make_ula(port_count),
            Self::ScaledMra => make_scaled_mra(port_count, aperture),
            Self::Custom { positions } => {
                if positions.len() != port_count {
                    return Err(Error::InvalidParameter(format!(
                        "custom placement has {} positions, expected {port_count}",
                        positions.len()
                    )));
                }
                ArrayGeometry::new(positions.clone(), min_spacing)
            }
            Self::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let raw = random_placement(port_count, aperture, &mut rng);
                project_feasible(&raw, aperture, min_spacing)
            }
        }
    }
}

/// Half-wavelength uniform linear array.
pub fn make_ula(port_count: usize) -> Result<ArrayGeometry> {
    if port_count < 2 {
        return Err(Error::InvalidPortCount(port_count));
    }
    let aperture = (port_count - 1) as f64 / 2.0;
    let positions = (0..port_count).map(|m| m as f64 / 2.0).collect();
    ArrayGeometry::new(positions, default_min_spacing(port_count, aperture))
}

/// Minimum-redundancy indices scaled linearly onto `[0, aperture]`.
pub fn make_scaled_mra(port_count: usize, aperture: f64) -> Result<ArrayGeometry> {
    if port_count < 2 {
        return Err(Error::InvalidPortCount(port_count));
    }
    if !(aperture.is_finite() && aperture > 0.0) {
        return Err(Error::InvalidParameter(format!("aperture must be positive, got {aperture}")));
    }
    let indices = mra_indices(port_count).ok_or(Error::UnsupportedPortCount(port_count))?;
    let max = f64::from(*indices.last().expect("table entries are non-empty"));
    let mut positions: Vec<f64> = indices.iter().map(|&i| f64::from(i) / max * aperture).collect();
    // i/max * W can round away from W for the last entry.
    positions[port_count - 1] = aperture;
    ArrayGeometry::new(positions, default_min_spacing(port_count, aperture))
}

/// `port_count` i.i.d. uniform draws on `[0, aperture]`, unsorted.
pub fn random_placement<R: Rng + ?Sized>(port_count: usize, aperture: f64, rng: &mut R) -> Vec<f64> {
    (0..port_count).map(|_| rng.random::<f64>() * aperture).collect()
}

/// Expected minimum gap of uniformly random ports, `W_max / (M² − 1)`.
pub fn default_min_spacing(port_count: usize, aperture: f64) -> f64 {
    let m = port_count as f64;
    aperture / (m * m - 1.0)
}

/// Maps an arbitrary position vector onto the feasible set.
///
/// Sorts, pins the end ports to 0 and `aperture`, then pushes interior ports
/// forward and pulls them back so every gap is at least `min_spacing`. A
/// feasible input comes back unchanged.
pub fn project_feasible(raw: &[f64], aperture: f64, min_spacing: f64) -> Result<ArrayGeometry> {
    let m = raw.len();
    if m < 2 {
        return Err(Error::InvalidPortCount(m));
    }
    if !(aperture.is_finite() && aperture > 0.0) {
        return Err(Error::InvalidParameter(format!("aperture must be positive, got {aperture}")));
    }
    if !(min_spacing.is_finite() && min_spacing >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "minimum spacing must be finite and non-negative, got {min_spacing}"
        )));
    }
    if (m - 1) as f64 * min_spacing > aperture + feasibility_tol(aperture) {
        return Err(Error::InfeasibleConstraints(format!(
            "{} gaps of {min_spacing} do not fit in aperture {aperture}",
            m - 1
        )));
    }
    if raw.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("non-finite port position".into()));
    }

    let mut p = raw.to_vec();
    p.sort_by(f64::total_cmp);
    p[0] = 0.0;
    p[m - 1] = aperture;
    for i in 1..m - 1 {
        p[i] = p[i].max(p[i - 1] + min_spacing);
    }
    for i in (1..m - 1).rev() {
        p[i] = p[i].min(p[i + 1] - min_spacing);
    }
    ArrayGeometry::new(p, min_spacing)
}

/// Sum of squared deviations from the centroid.
pub fn geometric_variance(positions: &[f64]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let mean = positions.iter().sum::<f64>() / positions.len() as f64;
    positions.iter().map(|p| (p - mean).powi(2)).sum()
}

/// Mean squared `2π`-scaled pairwise difference, `(8π²/M)·L_geo`.
pub fn effective_squared_aperture(positions: &[f64]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    8.0 * PI * PI / positions.len() as f64 * geometric_variance(positions)
}

/// Parses a placement file: one position per line, ascending. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_positions(text: &str) -> Result<Vec<f64>> {
    let mut out: Vec<f64> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let value: f64 = trimmed.parse().map_err(|e| Error::Parse {
            line: line_no,
            message: format!("cannot parse {trimmed:?} as a number: {e}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("position {trimmed:?} is not finite"),
            });
        }
        if let Some(&prev) = out.last() {
            if value <= prev {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("positions must be strictly ascending, {value} follows {prev}"),
                });
            }
        }
        out.push(value);
    }
    Ok(out)
}

pub fn load_positions(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_positions(&text)
}
