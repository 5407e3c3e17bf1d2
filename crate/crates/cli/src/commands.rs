//! The five subcommands. Each resolves its arguments into a fully-populated
//! config (echoed into every output), runs, and writes through a [`Sink`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use aperture_forge_core::bounds::{aoamse_upper_bound, crb_theta, db_to_linear, BoundParams, CrbParams};
use aperture_forge_core::geometry::{
    geometric_variance, load_positions, make_scaled_mra, make_ula, mra_indices, ArrayGeometry, PlacementSpec,
};
use aperture_forge_core::optimizer::{evaluate, pgd_optimize, ConvergenceTrace, Evaluation, OptimizerConfig, TraceStatus};
use aperture_forge_core::signal::{
    build_codebook, matched_grid_estimate, sample_covariance, synth_snapshots, vectorize_covariance, AngleGrid,
};
use aperture_forge_core::spacing::{
    empirical_vs_theory, ks_critical_99, ks_distance, ExpectationSummary, SpacingDistribution, DEFAULT_BINS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::config::{
    parse_snr_range, resolve_optimizer, resolve_ports, resolve_seed, with_config_file, CommonArgs, CrbArgs,
    DemoArgs, DemoPlacement, DesignArgs, InitScheme, MseBoundArgs, OutputFormat, SigmaZPolicy, SpacingArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::{Provenance, Sink, Table};

fn sink_for<C: Serialize>(common: &CommonArgs, command: &'static str, seed: u64, config: &C) -> CliResult<Sink> {
    Sink::new(
        common.out.clone(),
        common.format.unwrap_or(OutputFormat::Csv),
        Provenance::new(command, seed, config),
    )
}

/// Aperture of a half-wavelength ULA with the same port count.
fn default_aperture(m: usize) -> f64 {
    (m as f64 - 1.0) / 2.0
}

/// Task seed for the `index`-th independent sweep point.
pub fn task_seed(root: u64, index: usize) -> u64 {
    root.wrapping_add(index as u64)
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}

// ---------------------------------------------------------------- spacing

#[derive(Debug, Clone, Serialize)]
pub struct SpacingConfig {
    pub ports: Vec<usize>,
    pub aperture: Option<f64>,
    pub samples: usize,
    pub bins: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

pub fn spacing(args: SpacingArgs) -> CliResult<Sink> {
    let args = with_config_file(args.clone(), args.common.config.as_deref())?;
    let cfg = SpacingConfig {
        ports: resolve_ports(args.ports.as_ref(), &[8])?,
        aperture: args.aperture.map(|w| positive("aperture", w)).transpose()?,
        samples: args.samples.unwrap_or(100_000),
        bins: args.bins.unwrap_or(DEFAULT_BINS),
        seed: resolve_seed(args.seed)?,
        out: args.common.out.clone(),
        format: args.common.format.unwrap_or(OutputFormat::Csv),
    };
    if cfg.bins == 0 {
        return Err(CliError::Config("bins must be at least 1".into()));
    }
    let mut sink = sink_for(&args.common, "spacing", cfg.seed, &cfg)?;
    let sweep = cfg.ports.len() > 1;
    let mut summary_table = Table::new(vec![
        "M",
        "W_max",
        "expected_theory",
        "expected_empirical",
        "relative_error",
        "expected_times_m_plus_1",
        "ks_distance",
        "ks_critical_99",
    ]);

    for (index, &m) in cfg.ports.iter().enumerate() {
        let w = cfg.aperture.unwrap_or_else(|| default_aperture(m));
        let dist = SpacingDistribution::new(m, w)?;
        let seed = task_seed(cfg.seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = dist.sample_many(cfg.samples, &mut rng);

        let mut table = Table::new(vec!["delta", "pdf_theory", "pdf_empirical", "ccdf_theory", "ccdf_empirical"]);
        for row in empirical_vs_theory(&dist, &samples, cfg.bins)? {
            table.push(vec![
                row.delta.into(),
                row.pdf_theory.into(),
                row.pdf_empirical.into(),
                row.ccdf_theory.into(),
                row.ccdf_empirical.into(),
            ]);
        }
        sink.table(&format!("spacing_M{m}"), &table, !sweep)?;

        let summary = ExpectationSummary::from_samples(&dist, &samples, seed);
        sink.document(&format!("spacing_summary_M{m}"), &summary, false)?;

        let (ks, ks_crit) = if samples.is_empty() {
            (None, None)
        } else {
            (Some(ks_distance(&dist, &samples)), Some(ks_critical_99(samples.len())))
        };
        summary_table.push(vec![
            m.into(),
            w.into(),
            summary.expected_theory.into(),
            summary.expected_empirical.into(),
            summary
                .expected_empirical
                .map(|e| (e - summary.expected_theory).abs() / summary.expected_theory)
                .into(),
            (summary.expected_theory * (m as f64 + 1.0)).into(),
            ks.into(),
            ks_crit.into(),
        ]);
    }
    sink.table("spacing_sweep", &summary_table, sweep)?;
    Ok(sink)
}

// ---------------------------------------------------------------- design

/// Initial placement for an optimizer run, falling back to a ULA when no MRA
/// is tabulated for `m`.
fn initial_placement(
    m: usize,
    init: InitScheme,
    custom: Option<&[f64]>,
    seed: u64,
    config: &OptimizerConfig,
) -> CliResult<(ArrayGeometry, InitScheme)> {
    let w = default_aperture(m);
    let d_min = config.d_min.resolve(m, w);
    let geometry = match init {
        InitScheme::Mra if mra_indices(m).is_none() => {
            log::warn!("no minimum-redundancy table entry for M = {m}; starting from a ULA");
            return Ok((make_ula(m)?, InitScheme::Ula));
        }
        InitScheme::Mra => make_scaled_mra(m, w)?,
        InitScheme::Ula => make_ula(m)?,
        InitScheme::Random => PlacementSpec::Random { seed }.build(m, w, d_min)?,
        InitScheme::Custom => {
            let positions = custom.ok_or_else(|| CliError::Config("--init custom needs --placement-file".into()))?;
            let spec = PlacementSpec::Custom {
                positions: positions.to_vec(),
            };
            let aperture = *positions.last().expect("custom placement is non-empty");
            spec.build(m, aperture, config.d_min.resolve(m, aperture))?
        }
    };
    Ok((geometry, init))
}

fn load_custom(path: Option<&Path>) -> CliResult<Option<Vec<f64>>> {
    let Some(path) = path else { return Ok(None) };
    let positions = load_positions(path)?;
    if positions.len() < 2 {
        return Err(CliError::Config(format!(
            "{}: placement needs at least 2 positions, found {}",
            path.display(),
            positions.len()
        )));
    }
    Ok(Some(positions))
}

#[derive(Debug, Clone, Serialize)]
pub struct PlacementMetrics {
    pub positions: Vec<f64>,
    #[serde(rename = "J")]
    pub objective: f64,
    pub gamma_max: f64,
    pub lambda_bar_sq: f64,
    #[serde(rename = "L_geo")]
    pub geometric_variance: f64,
}

impl PlacementMetrics {
    fn from_eval(eval: &Evaluation) -> Self {
        let positions = eval.codebook.positions().to_vec();
        Self {
            geometric_variance: geometric_variance(&positions),
            positions,
            objective: eval.objective,
            gamma_max: eval.gamma_max,
            lambda_bar_sq: eval.lambda_bar_sq,
        }
    }

    fn measure(positions: &[f64], grid: &AngleGrid, config: &OptimizerConfig) -> CliResult<Self> {
        Ok(Self::from_eval(&evaluate(positions, grid, config.eig_tol)?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignResult {
    #[serde(rename = "M")]
    pub port_count: usize,
    #[serde(rename = "W_max")]
    pub aperture: f64,
    pub d_min: f64,
    pub init: InitScheme,
    pub status: TraceStatus,
    pub iterations: usize,
    pub initial: PlacementMetrics,
    pub optimized: PlacementMetrics,
    pub ula: PlacementMetrics,
    pub scaled_mra: Option<PlacementMetrics>,
}

/// Runs the optimizer for `m` ports and measures the reference placements.
pub fn design_one(
    m: usize,
    init: InitScheme,
    custom: Option<&[f64]>,
    seed: u64,
    config: &OptimizerConfig,
) -> CliResult<(DesignResult, ConvergenceTrace)> {
    let grid = config.angle_grid()?;
    let (start, used) = initial_placement(m, init, custom, seed, config)?;
    let (optimized, trace) = pgd_optimize(&start, config, &grid)?;
    let ula = make_ula(m)?;
    let scaled_mra = match mra_indices(m) {
        Some(_) => Some(PlacementMetrics::measure(
            make_scaled_mra(m, start.aperture())?.positions(),
            &grid,
            config,
        )?),
        None => None,
    };
    let result = DesignResult {
        port_count: m,
        aperture: optimized.aperture(),
        d_min: optimized.min_spacing(),
        init: used,
        status: trace.status,
        iterations: trace.iterations(),
        initial: PlacementMetrics::measure(start.positions(), &grid, config)?,
        optimized: PlacementMetrics::measure(optimized.positions(), &grid, config)?,
        ula: PlacementMetrics::measure(ula.positions(), &grid, config)?,
        scaled_mra,
    };
    Ok((result, trace))
}

#[derive(Debug, Clone, Serialize)]
pub struct DesignConfig {
    pub ports: Vec<usize>,
    pub init: InitScheme,
    pub placement_file: Option<PathBuf>,
    pub seed: u64,
    pub log_every: usize,
    pub dump_codebook: bool,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Serialize)]
struct TracePlacement<'a> {
    iter: usize,
    positions: &'a [f64],
}

pub fn design(args: DesignArgs) -> CliResult<Sink> {
    let args = with_config_file(args.clone(), args.common.config.as_deref())?;
    let init = args.init.unwrap_or(InitScheme::Mra);
    let custom = load_custom(args.placement_file.as_deref())?;
    let default_ports = custom.as_ref().map_or(5, Vec::len);
    let cfg = DesignConfig {
        ports: resolve_ports(args.ports.as_ref(), &[default_ports])?,
        init,
        placement_file: args.placement_file.clone(),
        seed: resolve_seed(args.seed)?,
        log_every: args.log_every.unwrap_or(1),
        dump_codebook: args.dump_codebook.unwrap_or(false),
        optimizer: resolve_optimizer(&args.optimizer)?,
        out: args.common.out.clone(),
        format: args.common.format.unwrap_or(OutputFormat::Csv),
    };
    if cfg.log_every == 0 {
        return Err(CliError::Config("log_every must be at least 1".into()));
    }
    if let (InitScheme::Custom, Some(p)) = (init, &custom) {
        if cfg.ports.iter().any(|&m| m != p.len()) {
            return Err(CliError::Config(format!(
                "custom placement has {} ports but --ports asks for {:?}",
                p.len(),
                cfg.ports
            )));
        }
    }
    let mut sink = sink_for(&args.common, "design", cfg.seed, &cfg)?;
    let single = cfg.ports.len() == 1;

    for (index, &m) in cfg.ports.iter().enumerate() {
        let (result, trace) = design_one(m, init, custom.as_deref(), task_seed(cfg.seed, index), &cfg.optimizer)?;
        log::info!(
            "M = {m}: J {:.6} -> {:.6} after {} iterations ({:?})",
            result.initial.objective,
            result.optimized.objective,
            result.iterations,
            result.status
        );
        sink.document(&format!("design_M{m}"), &result, single)?;

        let mut table = Table::new(vec!["iter", "J", "gamma_max", "lambda_bar_sq"]);
        let mut placements = Vec::new();
        for r in trace.thinned(cfg.log_every) {
            table.push(vec![r.iteration.into(), r.objective.into(), r.gamma_max.into(), r.lambda_bar_sq.into()]);
            placements.push(TracePlacement {
                iter: r.iteration,
                positions: &r.positions,
            });
        }
        sink.table(&format!("trace_M{m}"), &table, false)?;
        sink.document(&format!("trace_M{m}_placements"), &placements, false)?;

        if cfg.dump_codebook {
            let grid = cfg.optimizer.angle_grid()?;
            let mut buf = Vec::new();
            build_codebook(&result.optimized.positions, &grid)
                .write_csv(&mut buf)
                .expect("writing to a Vec cannot fail");
            sink.raw_csv(&format!("codebook_M{m}"), &String::from_utf8(buf).expect("CSV is UTF-8"))?;
        }
    }
    Ok(sink)
}

// ---------------------------------------------------------------- crb

#[derive(Debug, Clone, Serialize)]
pub struct CrbConfig {
    pub ports: Vec<usize>,
    pub theta_deg: f64,
    pub snr_db: f64,
    pub snapshots: usize,
    pub placement_file: Option<PathBuf>,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

/// Rows of `(scheme, positions)` evaluated by `crb` and `mse-bound`.
fn schemes(
    m: usize,
    custom: Option<&[f64]>,
    config: &OptimizerConfig,
) -> CliResult<Vec<(&'static str, Vec<f64>)>> {
    let mut out = vec![("ula", make_ula(m)?.into_positions())];
    if mra_indices(m).is_some() {
        out.push(("scaled-mra", make_scaled_mra(m, default_aperture(m))?.into_positions()));
    }
    let (result, _) = design_one(m, InitScheme::Mra, None, 0, config)?;
    out.push(("optimized", result.optimized.positions));
    if let Some(p) = custom.filter(|p| p.len() == m) {
        // Validates ordering and edge pinning; spacing is not constrained here.
        ArrayGeometry::new(p.to_vec(), 0.0)?;
        out.push(("custom", p.to_vec()));
    }
    Ok(out)
}

pub fn crb(args: CrbArgs) -> CliResult<Sink> {
    let args = with_config_file(args.clone(), args.common.config.as_deref())?;
    let custom = load_custom(args.placement_file.as_deref())?;
    let cfg = CrbConfig {
        ports: resolve_ports(args.ports.as_ref(), &[3, 5, 7, 9, 11])?,
        theta_deg: finite("theta_deg", args.theta_deg.unwrap_or(15.0))?,
        snr_db: finite("snr_db", args.snr_db.unwrap_or(10.0))?,
        snapshots: args.snapshots.unwrap_or(100),
        placement_file: args.placement_file.clone(),
        seed: resolve_seed(None)?,
        optimizer: resolve_optimizer(&args.optimizer)?,
        out: args.common.out.clone(),
        format: args.common.format.unwrap_or(OutputFormat::Csv),
    };
    let theta = cfg.theta_deg.to_radians();
    if theta.sin().abs() < 1e-12 {
        return Err(CliError::Config(format!(
            "theta_deg = {} is endfire; the CRB is unbounded there",
            cfg.theta_deg
        )));
    }
    let params =
        CrbParams::new(theta, db_to_linear(cfg.snr_db), cfg.snapshots).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(p) = &custom {
        if !cfg.ports.contains(&p.len()) {
            log::warn!("custom placement has {} ports, which is not in the sweep; it is ignored", p.len());
        }
    }

    let mut sink = sink_for(&args.common, "crb", cfg.seed, &cfg)?;
    let grid = cfg.optimizer.angle_grid()?;
    let mut table = Table::new(vec!["scheme", "M", "gamma_max", "L_geo", "CRB"]);
    for &m in &cfg.ports {
        for (scheme, positions) in schemes(m, custom.as_deref(), &cfg.optimizer)? {
            let metrics = PlacementMetrics::measure(&positions, &grid, &cfg.optimizer)?;
            table.push(vec![
                scheme.into(),
                m.into(),
                metrics.gamma_max.into(),
                metrics.geometric_variance.into(),
                crb_theta(&params, &positions)?.into(),
            ]);
        }
    }
    sink.table("crb", &table, true)?;
    Ok(sink)
}

// ---------------------------------------------------------------- mse-bound

#[derive(Debug, Clone, Serialize)]
pub struct MseBoundConfig {
    pub ports: usize,
    pub snr_db_range: String,
    pub sigma_z_policy: SigmaZPolicy,
    pub signal_power: f64,
    pub placement_file: Option<PathBuf>,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Serialize)]
pub struct MseBoundSummary {
    #[serde(rename = "M")]
    pub port_count: usize,
    pub schemes: Vec<&'static str>,
    pub mean_relative_reduction: Vec<(&'static str, f64)>,
}

pub fn mse_bound(args: MseBoundArgs) -> CliResult<Sink> {
    let args = with_config_file(args.clone(), args.common.config.as_deref())?;
    let custom = load_custom(args.placement_file.as_deref())?;
    let cfg = MseBoundConfig {
        ports: args.ports.unwrap_or(5),
        snr_db_range: args.snr_db_range.clone().unwrap_or_else(|| "-10:20:2".into()),
        sigma_z_policy: args.sigma_z_policy.unwrap_or(SigmaZPolicy::Noise),
        signal_power: 1.0,
        placement_file: args.placement_file.clone(),
        seed: resolve_seed(None)?,
        optimizer: resolve_optimizer(&args.optimizer)?,
        out: args.common.out.clone(),
        format: args.common.format.unwrap_or(OutputFormat::Csv),
    };
    if cfg.ports < 2 {
        return Err(CliError::Config(format!("port count must be at least 2, got {}", cfg.ports)));
    }
    let snrs = parse_snr_range(&cfg.snr_db_range)?;
    let mut sink = sink_for(&args.common, "mse-bound", cfg.seed, &cfg)?;

    let grid = cfg.optimizer.angle_grid()?;
    let rows: Vec<(&str, Vec<f64>, f64)> = schemes(cfg.ports, custom.as_deref(), &cfg.optimizer)?
        .into_iter()
        .map(|(s, p)| {
            let gamma = PlacementMetrics::measure(&p, &grid, &cfg.optimizer)?.gamma_max;
            Ok((s, p, gamma))
        })
        .collect::<CliResult<_>>()?;

    let mut table = Table::new(vec!["scheme", "snr_db", "sigma_z_sq", "bound", "relative_reduction_vs_ula"]);
    let mut reductions = vec![0.0; rows.len()];
    for &snr_db in &snrs {
        let bound_params = match cfg.sigma_z_policy {
            SigmaZPolicy::Noise => BoundParams::from_noise(cfg.signal_power, db_to_linear(snr_db))?,
        };
        let bounds: Vec<f64> = rows
            .iter()
            .map(|(_, p, g)| aoamse_upper_bound(&bound_params, p, *g))
            .collect::<Result<_, _>>()?;
        let ula = bounds[0];
        for (i, ((scheme, _, _), bound)) in rows.iter().zip(&bounds).enumerate() {
            let reduction = 1.0 - bound / ula;
            reductions[i] += reduction / snrs.len() as f64;
            table.push(vec![
                (*scheme).into(),
                snr_db.into(),
                bound_params.sigma_z_sq.into(),
                (*bound).into(),
                reduction.into(),
            ]);
        }
    }
    sink.table("mse_bound", &table, true)?;
    let summary = MseBoundSummary {
        port_count: cfg.ports,
        schemes: rows.iter().map(|r| r.0).collect(),
        mean_relative_reduction: rows.iter().map(|r| r.0).zip(reductions).collect(),
    };
    sink.document("mse_bound_summary", &summary, false)?;
    Ok(sink)
}

// ---------------------------------------------------------------- demo-estimate

#[derive(Debug, Clone, Serialize)]
pub struct DemoConfig {
    pub ports: usize,
    pub theta_deg: f64,
    pub snr_db: f64,
    pub noiseless: bool,
    pub snapshots: usize,
    pub grid_size: usize,
    pub placement: DemoPlacement,
    pub seed: u64,
    pub dump_codebook: bool,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Serialize)]
pub struct DemoResult {
    pub positions: Vec<f64>,
    pub theta_deg: f64,
    pub theta_hat_deg: f64,
    pub abs_error_deg: f64,
    pub grid_cell_deg: f64,
    /// Grid cells between the estimate and the grid angle nearest the truth.
    pub grid_error_cells: usize,
    pub score: f64,
}

pub fn demo_estimate(args: DemoArgs) -> CliResult<Sink> {
    let args = with_config_file(args.clone(), args.common.config.as_deref())?;
    let cfg = DemoConfig {
        ports: args.ports.unwrap_or(5),
        theta_deg: finite("theta_deg", args.theta_deg.unwrap_or(60.0))?,
        snr_db: finite("snr_db", args.snr_db.unwrap_or(10.0))?,
        noiseless: args.noiseless.unwrap_or(false),
        snapshots: args.snapshots.unwrap_or(100),
        grid_size: args.grid_size.unwrap_or(180),
        placement: args.placement.unwrap_or(DemoPlacement::Ula),
        seed: resolve_seed(args.seed)?,
        dump_codebook: args.dump_codebook.unwrap_or(false),
        out: args.common.out.clone(),
        format: args.common.format.unwrap_or(OutputFormat::Csv),
    };
    if cfg.ports < 2 {
        return Err(CliError::Config(format!("port count must be at least 2, got {}", cfg.ports)));
    }
    if !(0.0..=180.0).contains(&cfg.theta_deg) {
        return Err(CliError::Config(format!("theta_deg must lie in [0, 180], got {}", cfg.theta_deg)));
    }
    if cfg.snapshots == 0 {
        return Err(CliError::Config("snapshots must be at least 1".into()));
    }
    let grid = AngleGrid::uniform(cfg.grid_size).map_err(|e| CliError::Config(e.to_string()))?;
    let geometry = match cfg.placement {
        DemoPlacement::Ula => make_ula(cfg.ports)?,
        DemoPlacement::Mra => make_scaled_mra(cfg.ports, default_aperture(cfg.ports))
            .map_err(|e| CliError::Config(e.to_string()))?,
    };
    let mut sink = sink_for(&args.common, "demo-estimate", cfg.seed, &cfg)?;

    let theta = cfg.theta_deg.to_radians();
    let noise_variance = if cfg.noiseless { 0.0 } else { 1.0 / db_to_linear(cfg.snr_db) };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let snapshots = synth_snapshots(theta, geometry.positions(), 1.0, noise_variance, cfg.snapshots, &mut rng)?;
    let virtual_signal = vectorize_covariance(&sample_covariance(&snapshots));
    let codebook = build_codebook(geometry.positions(), &grid);
    let (theta_hat, score) = matched_grid_estimate(&virtual_signal, &codebook)?;

    let angles = grid.angles();
    let nearest = |x: f64| {
        (0..angles.len())
            .min_by(|&a, &b| (angles[a] - x).abs().total_cmp(&(angles[b] - x).abs()))
            .expect("grid is non-empty")
    };
    let cell = grid.cell_width().unwrap_or(PI);
    let result = DemoResult {
        positions: geometry.positions().to_vec(),
        theta_deg: cfg.theta_deg,
        theta_hat_deg: theta_hat.to_degrees(),
        abs_error_deg: (theta_hat - theta).abs().to_degrees(),
        grid_cell_deg: cell.to_degrees(),
        grid_error_cells: nearest(theta_hat).abs_diff(nearest(theta)),
        score,
    };
    log::info!(
        "θ = {:.4}°, θ̂ = {:.4}° ({} grid cells off)",
        result.theta_deg,
        result.theta_hat_deg,
        result.grid_error_cells
    );
    sink.document("demo_estimate", &result, true)?;
    if cfg.dump_codebook {
        let mut buf = Vec::new();
        codebook.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        sink.raw_csv("codebook", &String::from_utf8(buf).expect("CSV is UTF-8"))?;
    }
    Ok(sink)
}

/// Short machine-readable report printed after a run that wrote files.
pub fn report(sink: &Sink) -> serde_json::Value {
    json!({
        "command": sink.provenance().command,
        "seed": sink.provenance().seed,
        "files": sink.written().iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    })
}
