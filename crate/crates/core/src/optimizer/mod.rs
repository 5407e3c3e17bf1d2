//! Projected gradient descent on the interior port positions.
//!
//! Each iteration evaluates the codebook Gram spectrum, forms the objective
//! gradient, takes a momentum step on ports `2..M−1` and maps the result back
//! onto the feasible set.

mod objective;
mod spectrum;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{default_min_spacing, project_feasible, ArrayGeometry};
use crate::signal::{AngleGrid, DEFAULT_GRID_SIZE};

pub use objective::{
    codebook_derivative, evaluate, grad_gamma_max, grad_lambda_bar, objective_j, Evaluation, DEFAULT_EIG_TOL,
};
pub use spectrum::{codebook_spectrum, gram_matrix, max_eigpair, GramSpectrum, DEGENERACY_RTOL};

/// Maximum number of step halvings when a momentum step increases `J`.
const MAX_HALVINGS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// `v ← βv − α∇J`, `p̃ ← p + v`, with a backtracking safeguard.
    VelocityMomentum,
    /// `p̃ ← βp − α∇J`, exactly as the update line is usually written.
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinSpacing {
    /// `W_max / (M² − 1)`.
    Auto,
    Fixed(f64),
}

impl MinSpacing {
    pub fn resolve(&self, port_count: usize, aperture: f64) -> f64 {
        match *self {
            Self::Auto => default_min_spacing(port_count, aperture),
            Self::Fixed(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub step_alpha: f64,
    pub momentum_beta: f64,
    pub max_iters: usize,
    pub d_min: MinSpacing,
    pub grid_size: usize,
    pub update_rule: UpdateRule,
    pub convergence_tol: f64,
    pub convergence_patience: usize,
    pub eig_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            step_alpha: 5e-4,
            momentum_beta: 0.9,
            max_iters: 1000,
            d_min: MinSpacing::Auto,
            grid_size: DEFAULT_GRID_SIZE,
            update_rule: UpdateRule::VelocityMomentum,
            convergence_tol: 1e-8,
            convergence_patience: 10,
            eig_tol: DEFAULT_EIG_TOL,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.step_alpha.is_finite() && self.step_alpha > 0.0) {
            return bad(format!("step size must be positive, got {}", self.step_alpha));
        }
        if !(0.0..1.0).contains(&self.momentum_beta) {
            return bad(format!("momentum must lie in [0, 1), got {}", self.momentum_beta));
        }
        if self.convergence_patience == 0 {
            return bad("convergence patience must be at least 1".into());
        }
        if !(self.convergence_tol >= 0.0) {
            return bad(format!("convergence tolerance must be non-negative, got {}", self.convergence_tol));
        }
        if !(self.eig_tol > 0.0) {
            return bad(format!("eigen tolerance must be positive, got {}", self.eig_tol));
        }
        if self.grid_size < 2 {
            return bad(format!("grid size must be at least 2, got {}", self.grid_size));
        }
        if let MinSpacing::Fixed(d) = self.d_min {
            if !(d.is_finite() && d >= 0.0) {
                return bad(format!("minimum spacing must be non-negative, got {d}"));
            }
        }
        Ok(())
    }

    /// Uniform grid of `grid_size` angles.
    pub fn angle_grid(&self) -> Result<AngleGrid> {
        AngleGrid::uniform(self.grid_size)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub gamma_max: f64,
    pub lambda_bar_sq: f64,
    pub positions: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceStatus {
    Converged,
    MaxIters,
}

/// Per-iteration record of an optimizer run; record 0 is the initial point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
    pub status: TraceStatus,
}

impl ConvergenceTrace {
    pub fn initial(&self) -> &TraceRecord {
        &self.records[0]
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace always holds the initial record")
    }

    /// Number of update steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    /// Records at multiples of `every`, plus the final one.
    pub fn thinned(&self, every: usize) -> impl Iterator<Item = &TraceRecord> {
        let every = every.max(1);
        let last = self.records.len() - 1;
        self.records
            .iter()
            .enumerate()
            .filter(move |(i, _)| i % every == 0 || *i == last)
            .map(|(_, r)| r)
    }

    /// `iter,J,gamma_max,lambda_bar_sq` with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W, every: usize) -> std::io::Result<()> {
        writeln!(out, "iter,J,gamma_max,lambda_bar_sq")?;
        for r in self.thinned(every) {
            writeln!(
                out,
                "{},{},{},{}",
                r.iteration,
                crate::fmt_sig(r.objective),
                crate::fmt_sig(r.gamma_max),
                crate::fmt_sig(r.lambda_bar_sq)
            )?;
        }
        Ok(())
    }
}

fn record(iteration: usize, eval: &Evaluation) -> TraceRecord {
    TraceRecord {
        iteration,
        objective: eval.objective,
        gamma_max: eval.gamma_max,
        lambda_bar_sq: eval.lambda_bar_sq,
        positions: eval.codebook.positions().to_vec(),
    }
}

/// Runs projected gradient descent from `init`.
///
/// Only interior ports move; the end ports stay pinned at 0 and `W_max`. The
/// loop stops once `|ΔJ| < convergence_tol` holds for `convergence_patience`
/// consecutive iterations, or after `max_iters` updates.
///
/// With [`UpdateRule::VelocityMomentum`] a step that would increase `J`
/// resets the velocity and retries plain gradient steps at `α/2, α/4, …`; if
/// none of them decreases `J` the placement is left unchanged for that
/// iteration, so the final objective never exceeds the initial one.
pub fn pgd_optimize(
    init: &ArrayGeometry,
    config: &OptimizerConfig,
    grid: &AngleGrid,
) -> Result<(ArrayGeometry, ConvergenceTrace)> {
    config.validate()?;
    let m = init.port_count();
    let aperture = init.aperture();
    let d_min = config.d_min.resolve(m, aperture);
    let start = ArrayGeometry::new(init.positions().to_vec(), d_min)?;

    let mut eval = evaluate(start.positions(), grid, config.eig_tol)?;
    let mut records = vec![record(0, &eval)];
    if m <= 2 {
        return Ok((
            start,
            ConvergenceTrace {
                records,
                status: TraceStatus::Converged,
            },
        ));
    }

    let project = |raw: &[f64]| project_feasible(raw, aperture, d_min);
    let mut positions = start.into_positions();
    let mut velocity = vec![0.0; m];
    let mut stable = 0usize;
    let mut status = TraceStatus::MaxIters;

    for iteration in 1..=config.max_iters {
        let mut grad = eval.gradient();
        grad[0] = 0.0;
        grad[m - 1] = 0.0;

        let (next_positions, next_eval) = match config.update_rule {
            UpdateRule::PaperLiteral => {
                let raw: Vec<f64> = positions
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| config.momentum_beta * p - config.step_alpha * g)
                    .collect();
                let cand = project(&raw)?.into_positions();
                let cand_eval = evaluate(&cand, grid, config.eig_tol)?;
                (cand, cand_eval)
            }
            UpdateRule::VelocityMomentum => {
                let trial_velocity: Vec<f64> = velocity
                    .iter()
                    .zip(&grad)
                    .map(|(v, g)| config.momentum_beta * v - config.step_alpha * g)
                    .collect();
                let raw: Vec<f64> = positions.iter().zip(&trial_velocity).map(|(p, v)| p + v).collect();
                let cand = project(&raw)?.into_positions();
                let cand_eval = evaluate(&cand, grid, config.eig_tol)?;
                if cand_eval.objective <= eval.objective {
                    velocity = trial_velocity;
                    (cand, cand_eval)
                } else {
                    velocity.iter_mut().for_each(|v| *v = 0.0);
                    let mut accepted = None;
                    let mut step = config.step_alpha;
                    for _ in 0..MAX_HALVINGS {
                        step *= 0.5;
                        let raw: Vec<f64> = positions.iter().zip(&grad).map(|(p, g)| p - step * g).collect();
                        let cand = project(&raw)?.into_positions();
                        let cand_eval = evaluate(&cand, grid, config.eig_tol)?;
                        if cand_eval.objective <= eval.objective {
                            velocity = grad.iter().map(|g| -step * g).collect();
                            accepted = Some((cand, cand_eval));
                            break;
                        }
                    }
                    accepted.unwrap_or_else(|| (positions.clone(), eval.clone()))
                }
            }
        };

        let change = (next_eval.objective - eval.objective).abs();
        positions = next_positions;
        eval = next_eval;
        records.push(record(iteration, &eval));

        if change < config.convergence_tol {
            stable += 1;
            if stable >= config.convergence_patience {
                status = TraceStatus::Converged;
                break;
            }
        } else {
            stable = 0;
        }
    }

    let result = ArrayGeometry::new(positions, d_min)?;
    Ok((result, ConvergenceTrace { records, status }))
}
