//! Scenario definitions (builtin and TOML), execution and parameter sweeps.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::geometry::{accumulate_phases, eta_diagnostics, holonomy_of, Holonomy};
use crate::linalg::{overlap, Vec2, C64};
use crate::model::{ep_loop_path_turns, gaussian_pulse_path, ParameterPath, PathShape, TabulatedPath};
use crate::propagator::{propagate, WaveState, DEFAULT_STEPS, MIN_STEPS};
use crate::tracking::{false_artifact_report, ArtifactReport, ArtifactThresholds, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    GaussianPulse { w0: f64, delta0: f64, sigma: f64, gamma: f64 },
    EpLoop { gamma: f64, phi: f64, turns: f64 },
    CustomTable { source: Option<PathBuf>, table: TabulatedPath },
}

impl PathSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PathSpec::GaussianPulse { .. } => "gaussian_pulse",
            PathSpec::EpLoop { .. } => "ep_loop",
            PathSpec::CustomTable { .. } => "custom_table",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Branch1,
    Branch2,
    Explicit(Vec2),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    C,
    D,
    E,
}

impl Convention {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "c" => Ok(Convention::C),
            "d" => Ok(Convention::D),
            "e" => Ok(Convention::E),
            other => Err(Error::Config(format!("unknown convention '{other}', expected c, d or e"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub path: PathSpec,
    /// Physical duration `T`.
    pub duration: f64,
    pub initial_state: InitialState,
    pub steps: usize,
    pub conventions: Vec<Convention>,
    pub output_columns: Vec<String>,
    pub thresholds: ArtifactThresholds,
    /// True for the figure scenarios shipped with the crate.
    pub builtin: bool,
}

pub const BUILTIN_NAMES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

fn pulse(gamma: f64) -> PathSpec {
    PathSpec::GaussianPulse {
        w0: 1.0,
        delta0: 0.5,
        sigma: 0.16,
        gamma,
    }
}

fn ep_loop(phi: f64) -> PathSpec {
    PathSpec::EpLoop { gamma: 0.5, phi, turns: 1.0 }
}

/// Builtin scenario keyed by figure number.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    use InitialState::{Branch1, Branch2};
    let (path, init, description) = match name {
        "fig1" => (pulse(0.1), Branch1, "gaussian_pulse parameter curves w(s), Re z(s), Γ=0.1"),
        "fig2" => (pulse(0.1), Branch1, "gaussian_pulse false inversion, Γ=0.1, initial branch1"),
        "fig3" => (pulse(0.1), Branch1, "gaussian_pulse eigenvector norm compensation, Γ=0.1, initial branch1"),
        "fig4" => (pulse(0.2), Branch2, "gaussian_pulse false adiabaticity, Γ=0.2, initial branch2"),
        "fig5" => (ep_loop(0.0), Branch1, "ep_loop symmetric, Γ=0.5, φ=0, initial branch1"),
        "fig6" => (ep_loop(0.0), Branch2, "ep_loop symmetric, Γ=0.5, φ=0, initial branch2"),
        "fig7" => (ep_loop(FRAC_PI_4), Branch1, "ep_loop non-symmetric, Γ=0.5, φ=π/4, initial branch1"),
        "fig8" => (ep_loop(FRAC_PI_4), Branch2, "ep_loop non-symmetric, Γ=0.5, φ=π/4, initial branch2"),
        _ => return None,
    };
    let mut output_columns: Vec<String> = crate::output::STANDARD_COLUMNS.iter().map(|c| c.to_string()).collect();
    if name == "fig3" {
        output_columns.extend(crate::output::NORM_COLUMNS.iter().map(|c| c.to_string()));
    }
    Some(ScenarioConfig {
        name: name.to_string(),
        description: description.to_string(),
        path,
        duration: 100.0,
        initial_state: init,
        steps: DEFAULT_STEPS,
        conventions: vec![Convention::C, Convention::D, Convention::E],
        output_columns,
        thresholds: ArtifactThresholds::default(),
        builtin: true,
    })
}

pub fn builtins() -> Vec<ScenarioConfig> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect()
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.description)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: RawScenario,
    path: Option<RawPath>,
    #[serde(default)]
    numerics: RawNumerics,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    base: Option<String>,
    description: Option<String>,
    initial_state: Option<RawInitial>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawInitial {
    Named(String),
    Explicit([f64; 4]),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    kind: Option<String>,
    w0: Option<f64>,
    delta0: Option<f64>,
    sigma: Option<f64>,
    gamma: Option<f64>,
    phi: Option<f64>,
    turns: Option<f64>,
    #[serde(alias = "T")]
    duration: Option<f64>,
    table: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    conventions: Option<Vec<String>>,
    columns: Option<Vec<String>>,
    thresholds: Option<RawThresholds>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    inversion_c: Option<f64>,
    inversion_d: Option<f64>,
    adiabatic_c: Option<f64>,
    adiabatic_d: Option<[f64; 2]>,
}

fn require(value: Option<f64>, key: &str, kind: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("path kind '{kind}' requires '{key}'")))
}

impl ScenarioConfig {
    /// Parses a TOML scenario. Relative table paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = match &raw.scenario.base {
            Some(base) => builtin(base).ok_or_else(|| Error::Config(format!("unknown base scenario '{base}'")))?,
            None => {
                if raw.path.is_none() {
                    return Err(Error::Config("missing [path] section".into()));
                }
                ScenarioConfig {
                    name: String::new(),
                    description: String::new(),
                    path: pulse(0.1),
                    duration: 100.0,
                    initial_state: InitialState::Branch1,
                    steps: DEFAULT_STEPS,
                    conventions: vec![Convention::C, Convention::D, Convention::E],
                    output_columns: crate::output::STANDARD_COLUMNS.iter().map(|c| c.to_string()).collect(),
                    thresholds: ArtifactThresholds::default(),
                    builtin: false,
                }
            }
        };
        cfg.builtin = false;
        cfg.name = match (raw.scenario.name, &raw.scenario.base) {
            (Some(n), _) => n,
            (None, Some(b)) => b.clone(),
            (None, None) => return Err(Error::Config("missing scenario.name".into())),
        };
        if !cfg.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') || cfg.name.is_empty() {
            return Err(Error::Config(format!("scenario name '{}' is not an identifier", cfg.name)));
        }
        if let Some(d) = raw.scenario.description {
            cfg.description = d;
        }
        if let Some(init) = raw.scenario.initial_state {
            cfg.initial_state = match init {
                RawInitial::Named(s) if s == "branch1" => InitialState::Branch1,
                RawInitial::Named(s) if s == "branch2" => InitialState::Branch2,
                RawInitial::Named(s) => {
                    return Err(Error::Config(format!("initial_state '{s}' is not branch1, branch2 or a 4-vector")))
                }
                RawInitial::Explicit([a, b, c, d]) => InitialState::Explicit([C64::new(a, b), C64::new(c, d)]),
            };
        }
        if let Some(p) = raw.path {
            cfg.apply_path(p, base_dir, raw.scenario.base.is_some())?;
        }
        if let Some(steps) = raw.numerics.steps {
            cfg.steps = steps;
        }
        if let Some(conv) = raw.output.conventions {
            cfg.conventions = conv.iter().map(|c| Convention::parse(c)).collect::<Result<_>>()?;
        }
        if let Some(cols) = raw.output.columns {
            cfg.output_columns = cols;
        }
        if let Some(t) = raw.output.thresholds {
            let th = &mut cfg.thresholds;
            th.inversion_c = t.inversion_c.unwrap_or(th.inversion_c);
            th.inversion_d = t.inversion_d.unwrap_or(th.inversion_d);
            th.adiabatic_c = t.adiabatic_c.unwrap_or(th.adiabatic_c);
            if let Some([lo, hi]) = t.adiabatic_d {
                th.adiabatic_d = (lo, hi);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn apply_path(&mut self, p: RawPath, base_dir: &Path, inherit: bool) -> Result<()> {
        let kind = match (&p.kind, inherit) {
            (Some(k), _) => k.clone(),
            (None, true) => self.path.kind().to_string(),
            (None, false) => return Err(Error::Config("missing path.kind".into())),
        };
        if let Some(t) = p.duration {
            self.duration = t;
        }
        // keys given for a different kind are rejected rather than ignored
        let given = |keys: &[(&str, bool)]| -> Result<()> {
            for (key, present) in keys {
                if *present {
                    return Err(Error::Config(format!("'{key}' does not apply to path kind '{kind}'")));
                }
            }
            Ok(())
        };
        let same_kind = inherit && kind == self.path.kind();
        self.path = match kind.as_str() {
            "gaussian_pulse" => {
                given(&[("phi", p.phi.is_some()), ("turns", p.turns.is_some()), ("table", p.table.is_some())])?;
                let prev = match (&self.path, same_kind) {
                    (PathSpec::GaussianPulse { w0, delta0, sigma, gamma }, true) => {
                        [Some(*w0), Some(*delta0), Some(*sigma), Some(*gamma)]
                    }
                    _ => [None; 4],
                };
                PathSpec::GaussianPulse {
                    w0: require(p.w0.or(prev[0]), "w0", &kind)?,
                    delta0: require(p.delta0.or(prev[1]), "delta0", &kind)?,
                    sigma: require(p.sigma.or(prev[2]), "sigma", &kind)?,
                    gamma: require(p.gamma.or(prev[3]), "gamma", &kind)?,
                }
            }
            "ep_loop" => {
                given(&[
                    ("w0", p.w0.is_some()),
                    ("delta0", p.delta0.is_some()),
                    ("sigma", p.sigma.is_some()),
                    ("table", p.table.is_some()),
                ])?;
                let prev = match (&self.path, same_kind) {
                    (PathSpec::EpLoop { gamma, phi, turns }, true) => [Some(*gamma), Some(*phi), Some(*turns)],
                    _ => [None, Some(0.0), Some(1.0)],
                };
                PathSpec::EpLoop {
                    gamma: require(p.gamma.or(prev[0]), "gamma", &kind)?,
                    phi: require(p.phi.or(prev[1]), "phi", &kind)?,
                    turns: require(p.turns.or(prev[2]), "turns", &kind)?,
                }
            }
            "custom_table" => {
                given(&[
                    ("w0", p.w0.is_some()),
                    ("delta0", p.delta0.is_some()),
                    ("sigma", p.sigma.is_some()),
                    ("gamma", p.gamma.is_some()),
                    ("phi", p.phi.is_some()),
                    ("turns", p.turns.is_some()),
                ])?;
                let file = p
                    .table
                    .ok_or_else(|| Error::Config("path kind 'custom_table' requires 'table'".into()))?;
                let file = if file.is_relative() { base_dir.join(file) } else { file };
                PathSpec::CustomTable {
                    table: load_table(&file)?,
                    source: Some(file),
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown path kind '{other}', expected gaussian_pulse, ep_loop or custom_table"
                )))
            }
        };
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < MIN_STEPS {
            return Err(Error::Config(format!("steps must be at least {MIN_STEPS}, got {}", self.steps)));
        }
        for col in &self.output_columns {
            if !crate::output::is_known_column(col) {
                return Err(Error::Config(format!("unknown output column '{col}'")));
            }
        }
        if let InitialState::Explicit(v) = self.initial_state {
            if crate::linalg::norm(&v) == 0.0 || !crate::linalg::is_finite(&v) {
                return Err(Error::Config("explicit initial state must be a finite nonzero vector".into()));
            }
        }
        let (lo, hi) = self.thresholds.adiabatic_d;
        if !(lo <= hi) {
            return Err(Error::Config("thresholds.adiabatic_d must be an increasing pair".into()));
        }
        self.build_path().map(|_| ())
    }

    pub fn build_path(&self) -> Result<ParameterPath> {
        match &self.path {
            PathSpec::GaussianPulse { w0, delta0, sigma, gamma } => {
                gaussian_pulse_path(*w0, *delta0, *gamma, *sigma, self.duration)
            }
            PathSpec::EpLoop { gamma, phi, turns } => ep_loop_path_turns(*gamma, *phi, self.duration, *turns),
            PathSpec::CustomTable { table, .. } => ParameterPath::new(PathShape::Table(table.clone()), self.duration),
        }
    }

    /// Copy with one named parameter replaced.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        let bad = || Error::Config(format!("parameter '{name}' does not exist for path kind '{}'", self.path.kind()));
        match (name, &mut out.path) {
            ("T" | "duration", _) => out.duration = value,
            ("steps", _) => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(Error::Config(format!("steps must be a whole number, got {value}")));
                }
                out.steps = value as usize;
            }
            ("w0", PathSpec::GaussianPulse { w0, .. }) => *w0 = value,
            ("delta0", PathSpec::GaussianPulse { delta0, .. }) => *delta0 = value,
            ("sigma", PathSpec::GaussianPulse { sigma, .. }) => *sigma = value,
            ("gamma", PathSpec::GaussianPulse { gamma, .. } | PathSpec::EpLoop { gamma, .. }) => *gamma = value,
            ("phi", PathSpec::EpLoop { phi, .. }) => *phi = value,
            ("turns", PathSpec::EpLoop { turns, .. }) => *turns = value,
            _ => return Err(bad()),
        }
        out.builtin = false;
        out.validate()?;
        Ok(out)
    }

    pub fn wants(&self, c: Convention) -> bool {
        self.conventions.contains(&c)
    }
}

/// Reads a CSV table with columns `s, re_w, im_w, re_z, im_z`.
pub fn load_table(file: &Path) -> Result<TabulatedPath> {
    let mut reader =
        csv::Reader::from_path(file).map_err(|e| Error::Config(format!("cannot read table {}: {e}", file.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(format!("table {}: {e}", file.display())))?
        .clone();
    let want = ["s", "re_w", "im_w", "re_z", "im_z"];
    let idx: Vec<usize> = want
        .iter()
        .map(|k| {
            headers
                .iter()
                .position(|h| h.trim() == *k)
                .ok_or_else(|| Error::Config(format!("table {} lacks column '{k}'", file.display())))
        })
        .collect::<Result<_>>()?;
    let (mut s, mut w, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Config(format!("table {}: {e}", file.display())))?;
        let val = |i: usize| -> Result<f64> {
            rec.get(idx[i])
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("table {} row {}: bad '{}'", file.display(), line + 2, want[i])))
        };
        s.push(val(0)?);
        w.push(C64::new(val(1)?, val(2)?));
        z.push(C64::new(val(3)?, val(4)?));
    }
    TabulatedPath::new(s, w, z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipOutcome {
    AdiabaticFlip,
    NoFlip,
    Undetermined,
}

impl FlipOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlipOutcome::AdiabaticFlip => "ADIABATIC_FLIP",
            FlipOutcome::NoFlip => "NO_FLIP",
            FlipOutcome::Undetermined => "UNDETERMINED",
        }
    }
}

impl fmt::Display for FlipOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies the end of a closed-loop trajectory: which initial eigenvector
/// the dominant final component lies along.
pub fn flip_detector(traj: &Trajectory) -> FlipOutcome {
    let first = &traj.records[0];
    let last = traj.final_record();
    let init = if first.d[0].norm() >= first.d[1].norm() { 0 } else { 1 };
    let ratio = last.d[0].norm() / last.d[1].norm();
    if (0.3..=3.0).contains(&ratio) || ratio.is_nan() {
        return FlipOutcome::Undetermined;
    }
    let dominant = if ratio > 1.0 { 0 } else { 1 };
    let k_end = traj.track.steps();
    let r_end = &traj.frame(k_end).r[dominant];
    let r0 = &traj.frame(0).r;
    if overlap(&r0[1 - init], r_end) > 0.99 {
        FlipOutcome::AdiabaticFlip
    } else if overlap(&r0[init], r_end) > 0.99 {
        FlipOutcome::NoFlip
    } else {
        FlipOutcome::Undetermined
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunDiagnostics {
    /// `max_s |‖ψ‖² − D†ηD| / ‖ψ‖²`.
    pub max_eta_norm_error: f64,
    /// `min_s 1 − |d_1|² − |d_2|²`.
    pub min_population_slack: f64,
    /// Residual of `dη/ds = Â†η + ηÂ` on the sampled grid.
    pub eta_residual: f64,
    /// `max_s ‖Â‖`.
    pub max_hat_norm: f64,
    /// Final `‖ψ‖²`; `1 − norm_sq` is the probability lost to decay.
    pub final_norm_sq: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub path: ParameterPath,
    pub trajectory: Trajectory,
    pub artifacts: ArtifactReport,
    pub holonomy: Option<Holonomy>,
    pub flip: Option<FlipOutcome>,
    pub diagnostics: RunDiagnostics,
}

fn initial_state(cfg: &ScenarioConfig, r0: &[Vec2; 2]) -> WaveState {
    let psi = match cfg.initial_state {
        InitialState::Branch1 => r0[0],
        InitialState::Branch2 => r0[1],
        InitialState::Explicit(v) => {
            let n = crate::linalg::norm(&v);
            if (n - 1.0).abs() > 1e-14 {
                info!("normalizing explicit initial state of norm {n}");
            }
            crate::linalg::scale(C64::new(1.0 / n, 0.0), &v)
        }
    };
    WaveState::new(0.0, psi)
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let name = cfg.name.as_str();
    cfg.validate().map_err(|e| e.in_scenario(name, "validate"))?;
    let path = cfg.build_path().map_err(|e| e.in_scenario(name, "build_path"))?;
    let gains = (0..=64).any(|k| path.at(k as f64 / 64.0).z.im > 0.0);
    if gains {
        warn!("scenario '{name}': Im z > 0 somewhere on the path, the system gains norm");
    }
    let track = accumulate_phases(&path, cfg.steps).map_err(|e| e.in_scenario(name, "accumulate_phases"))?;
    let psi0 = initial_state(cfg, &track.jet(0).frame.r);
    let states = propagate(&path, psi0, cfg.steps).map_err(|e| e.in_scenario(name, "propagate"))?;
    let trajectory = Trajectory::from_parts(states, track).map_err(|e| e.in_scenario(name, "decompose"))?;
    let artifacts = false_artifact_report(&trajectory.records, &cfg.thresholds).expect("non-empty trajectory");
    let (holonomy, flip) = if path.closed() {
        (Some(holonomy_of(&trajectory.track)), Some(flip_detector(&trajectory)))
    } else {
        (None, None)
    };
    let eta = eta_diagnostics(&trajectory.track);
    let mut diagnostics = RunDiagnostics {
        max_eta_norm_error: 0.0,
        min_population_slack: f64::INFINITY,
        eta_residual: eta.max_residual,
        max_hat_norm: eta.max_hat_norm,
        final_norm_sq: trajectory.final_record().norm_sq,
    };
    for r in &trajectory.records {
        diagnostics.max_eta_norm_error = diagnostics
            .max_eta_norm_error
            .max((r.norm_sq - r.eta_norm_sq()).abs() / r.norm_sq);
        diagnostics.min_population_slack = diagnostics
            .min_population_slack
            .min(1.0 - r.d[0].norm_sqr() - r.d[1].norm_sqr());
    }
    info!(
        "scenario '{name}': flags {:?}, flip {:?}, final |d| = ({:.3e}, {:.3e})",
        artifacts.flags(),
        flip,
        trajectory.final_record().d[0].norm(),
        trajectory.final_record().d[1].norm()
    );
    Ok(ScenarioRun {
        config: cfg.clone(),
        path,
        trajectory,
        artifacts,
        holonomy,
        flip,
        diagnostics,
    })
}

/// Condensed outcome of one run, as collected by [`sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub flags: Vec<&'static str>,
    pub final_abs_d: [f64; 2],
    pub final_ratio_d21: f64,
    pub flip: Option<FlipOutcome>,
    pub holonomy: Option<[C64; 2]>,
    pub exchanged: Option<bool>,
    pub final_norm_sq: f64,
}

impl RunSummary {
    pub fn of(run: &ScenarioRun) -> Self {
        let last = run.trajectory.final_record();
        RunSummary {
            flags: run.artifacts.flags(),
            final_abs_d: [last.d[0].norm(), last.d[1].norm()],
            final_ratio_d21: last.d[1].norm() / last.d[0].norm(),
            flip: run.flip,
            holonomy: run.holonomy.map(|h| h.factors),
            exchanged: run.holonomy.map(|h| h.exchanged),
            final_norm_sq: last.norm_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: String,
    pub value: f64,
    pub outcome: std::result::Result<RunSummary, Error>,
}

/// Runs `template` once per value of `parameter`, in parallel. Failures are
/// recorded per point.
pub fn sweep(template: &ScenarioConfig, parameter: &str, values: &[f64]) -> Result<Vec<SweepPoint>> {
    if let Some(&v) = values.first() {
        // reject unknown parameter names up front
        template.with_parameter(parameter, v).map(|_| ()).or_else(|e| match e {
            Error::Config(msg) if msg.contains("does not exist") => Err(Error::Config(msg)),
            _ => Ok(()),
        })?;
    }
    Ok(values
        .par_iter()
        .map(|&value| {
            let outcome = template
                .with_parameter(parameter, value)
                .and_then(|cfg| run_scenario(&cfg))
                .map(|run| RunSummary::of(&run));
            SweepPoint {
                parameter: parameter.to_string(),
                value,
                outcome,
            }
        })
        .collect())
}
