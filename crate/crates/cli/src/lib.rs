//! Batch driver behind the `qdecide` binary.

pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use qdecide_core::analysis::{
    asymptotics, decision_time, AsymptoticsReport, DecisionOutcome, DEFAULT_EPSILON, DEFAULT_TAIL_FRACTION,
    DEFAULT_WINDOW_FRACTION,
};
use qdecide_core::dynamics::{assemble_series, propagator, PropagatorMethod};
use qdecide_core::model::{build_generator, validate_scenario};
use qdecide_core::oracle::{exact_closed_evolution, ltp_residual, propagator_residual};
use qdecide_core::presets::{FigurePreset, FIGURES};
use qdecide_core::{Error as CoreError, Scenario};

/// Largest tolerated distance of `nj(t)` from `[0, 1]`.
pub const BOUND_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Propagator(_) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSource {
    Preset(String),
    File(PathBuf),
    AllPresets,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: ScenarioSource,
    pub out_dir: PathBuf,
    pub emit_csv: bool,
    pub emit_svg: bool,
    pub run_oracles: bool,
    pub ltp_report: bool,
    pub tail_fraction: f64,
    pub epsilon: f64,
    /// Decision window; `None` means 10% of `t_max`.
    pub window: Option<f64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
}

impl RunConfig {
    pub fn new(source: ScenarioSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            out_dir: out_dir.into(),
            emit_csv: true,
            emit_svg: false,
            run_oracles: false,
            ltp_report: false,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            epsilon: DEFAULT_EPSILON,
            window: None,
            t_max: None,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LtpSummary {
    pub max_abs_residual: [f64; 2],
    pub max_deviation_from_interference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub propagator_residual: f64,
    pub propagator_residual_half_step: f64,
    /// Largest gap to the Schrödinger-picture evolution; only for closed systems.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_system_max_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub label: String,
    pub t_max: f64,
    pub dt: f64,
    pub points: usize,
    pub propagator: String,
    pub max_bound_excursion: f64,
    pub asymptotics: AsymptoticsReport,
    pub decisions: Vec<DecisionOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ltp: Option<LtpSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    pub files: Vec<String>,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# report serialization failed: {e}\n"))
    }
}

/// One-line parameter summary used in plot titles.
pub fn caption(s: &Scenario) -> String {
    let p = &s.params;
    format!(
        "{}: omega=({}, {}) Omega=({}, {}) lambda=({}, {}) mu_ex={} mu_coop={} N=({}, {})",
        s.label,
        p.omega[0],
        p.omega[1],
        p.bath_slope[0],
        p.bath_slope[1],
        p.bath_coupling[0],
        p.bath_coupling[1],
        p.mu_ex,
        p.mu_coop,
        s.reservoir.occupation[0],
        s.reservoir.occupation[1]
    )
}

fn preset_caption(fig: &FigurePreset) -> String {
    format!(
        "{}: {}, N1={}, N2={}, mu_ex={}, mu_coop={}, {}",
        fig.name, fig.params_name, fig.occupation[0], fig.occupation[1], fig.mu_ex, fig.mu_coop, fig.initial_name
    )
}

pub fn list_presets() -> String {
    let mut out = format!(
        "{:<11} {:<6} {:>4} {:>4} {:>7} {:>8} {:<8} {:>6} {:>8}\n",
        "name", "params", "N1", "N2", "mu_ex", "mu_coop", "alpha", "t_max", "dt"
    );
    for fig in &FIGURES {
        let s = fig.scenario();
        out.push_str(&format!(
            "{:<11} {:<6} {:>4} {:>4} {:>7} {:>8} {:<8} {:>6} {:>8}\n",
            fig.name,
            fig.params_name,
            fig.occupation[0],
            fig.occupation[1],
            fig.mu_ex,
            fig.mu_coop,
            fig.initial_name,
            fig.t_max,
            format!("{:e}", s.dt),
        ));
    }
    out
}

fn load_scenarios(config: &RunConfig) -> Result<Vec<(Scenario, Option<String>)>, CliError> {
    let raw: Vec<(Scenario, Option<String>)> = match &config.source {
        ScenarioSource::Preset(name) => {
            let fig = qdecide_core::presets::figure_by_name(name).ok_or_else(|| {
                let known: Vec<_> = FIGURES.iter().map(|f| f.name).collect();
                CliError::Config(format!("unknown preset `{name}` (known: {})", known.join(", ")))
            })?;
            vec![(fig.scenario(), Some(preset_caption(fig)))]
        }
        ScenarioSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read scenario file {}: {e}", path.display())))?;
            let s = Scenario::from_toml_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            vec![(s, None)]
        }
        ScenarioSource::AllPresets => FIGURES.iter().map(|f| (f.scenario(), Some(preset_caption(f)))).collect(),
    };
    raw.into_iter()
        .map(|(mut s, cap)| {
            if let Some(t_max) = config.t_max {
                s.t_max = t_max;
            }
            if let Some(dt) = config.dt {
                s.dt = dt;
            }
            let s = validate_scenario(s)?;
            Ok((s, cap))
        })
        .collect()
}

fn write_file(path: &Path, contents: &str) -> Result<String, CliError> {
    fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

/// Simulate one validated scenario and write its artifacts.
pub fn run_scenario(s: &Scenario, caption_text: Option<&str>, config: &RunConfig) -> Result<RunReport, CliError> {
    let gen = build_generator(&s.params)?;
    let grid = s.time_grid();
    let prop = propagator(&gen, grid)?;
    let series = assemble_series(&s.label, &prop, &s.params, &s.reservoir, &s.initial);
    let mut files = Vec::new();

    if config.emit_csv {
        files.push(write_file(&config.out_dir.join(format!("{}.csv", s.label)), &output::series_csv(&series))?);
    }
    if config.emit_svg {
        let title = caption_text.map(str::to_string).unwrap_or_else(|| caption(s));
        let times = series.times();
        for j in [1, 2] {
            let svg = output::line_chart_svg(&times, series.n(j), &format!("n{j}(t)  {title}"), &format!("n{j}(t)"));
            files.push(write_file(&config.out_dir.join(format!("{}_n{j}.svg", s.label)), &svg)?);
        }
    }

    let ltp = if config.ltp_report {
        let ltp = ltp_residual(s)?;
        files.push(write_file(&config.out_dir.join(format!("{}_ltp.csv", s.label)), &output::ltp_csv(&ltp))?);
        let deviation = (0..2)
            .flat_map(|j| ltp.residual[j].iter().zip(&series.players[j].dmu).map(|(r, d)| (r - d).abs()))
            .fold(0.0, f64::max);
        Some(LtpSummary {
            max_abs_residual: [ltp.max_abs(1), ltp.max_abs(2)],
            max_deviation_from_interference: deviation,
        })
    } else {
        None
    };

    let oracle = if config.run_oracles {
        let half = propagator(&gen, qdecide_core::TimeGrid::spanning(s.t_max, s.dt / 2.0))?;
        let closed_gap = if s.params.is_closed() {
            let traj = exact_closed_evolution(&s.params, &s.initial, grid)?;
            let gap = (0..2)
                .flat_map(|j| traj.n[j].iter().zip(&series.players[j].total).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            Some(gap)
        } else {
            None
        };
        Some(OracleSummary {
            propagator_residual: propagator_residual(&gen, &prop),
            propagator_residual_half_step: propagator_residual(&gen, &half),
            closed_system_max_gap: closed_gap,
        })
    } else {
        None
    };

    let window = config.window.unwrap_or(DEFAULT_WINDOW_FRACTION * series.grid.t_max());
    let report = RunReport {
        label: s.label.clone(),
        t_max: series.grid.t_max(),
        dt: s.dt,
        points: series.len(),
        propagator: match prop.method {
            PropagatorMethod::Spectral { condition } => format!("spectral (eigenvector condition {condition:.3e})"),
            PropagatorMethod::ScalingSquaring { condition } => {
                format!("scaling-and-squaring (eigenvector condition {condition:.3e})")
            }
        },
        max_bound_excursion: series.bound_excursion(),
        asymptotics: asymptotics(&series, config.tail_fraction, config.epsilon)?,
        decisions: decision_time(&series, config.epsilon, window)?.to_vec(),
        ltp,
        oracle,
        files,
    };

    if report.max_bound_excursion > BOUND_TOL {
        return Err(CliError::Numerical(format!(
            "{}: decision function leaves [0, 1] by {:.3e} (tolerance {BOUND_TOL:e}); try a smaller dt\n{}",
            s.label,
            report.max_bound_excursion,
            report.to_text()
        )));
    }
    Ok(report)
}

/// Run every scenario selected by `config`. Batch runs execute concurrently
/// and report in preset order.
pub fn run(config: &RunConfig) -> Result<Vec<RunReport>, CliError> {
    if !(config.tail_fraction > 0.0 && config.tail_fraction < 1.0) {
        return Err(CliError::Config(format!("--tail must lie in (0, 1), got {}", config.tail_fraction)));
    }
    if config.epsilon.is_nan() || config.epsilon <= 0.0 {
        return Err(CliError::Config(format!("--epsilon must be > 0, got {}", config.epsilon)));
    }
    let scenarios = load_scenarios(config)?;
    fs::create_dir_all(&config.out_dir)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", config.out_dir.display())))?;

    std::thread::scope(|scope| {
        let handles: Vec<_> =
            scenarios.iter().map(|(s, cap)| scope.spawn(move || run_scenario(s, cap.as_deref(), config))).collect();
        handles.into_iter().map(|h| h.join().expect("scenario thread panicked")).collect()
    })
}
