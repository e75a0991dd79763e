//! Scenario files and end-to-end runs.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! [field]
//! a = "4+cos(x1/2)+t/2"
//! b = "2+sin(x2/2)"
//! lambda = "1"
//! varphi = "t"
//! # m, n1, n2, n3 default to 2, 2, 3, 2
//!
//! [ignition]
//! x1 = 0.0
//! x2 = 0.0
//!
//! [time]
//! t0 = 0.0
//! t_end = 3.0
//! front_times = [1.0, 2.0, 3.0]
//!
//! [solver]
//! n_rays = 256
//! dt = 0.001
//! # time_dependent = true   # default: detected from the field
//!
//! [output]
//! dir = "out"
//! csv = true
//! svg = true
//! svg_rays = true
//! ```

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field_expr::{parse_expr, ExprError};
use crate::front::{extract_front, prune_crossings, shoot_fan, Fan, Front, FrontError, MIN_RAYS};
use crate::geodesic::RayStatus;
use crate::profile::{
    check_strong_convexity, ConvexityReport, ParamField, ProfileError, BASE_M, BASE_N1, BASE_N2,
    BASE_N3,
};

/// Grid used for the convexity pre-check at the ignition point.
pub const PRECHECK_GRID: usize = 4096;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid `{field}`: {msg}")]
    Invalid { field: String, msg: String },
    #[error("invalid expression for `{field}`: {source}")]
    Expr {
        field: String,
        #[source]
        source: ExprError,
    },
    #[error("profile at the ignition point is not strongly convex (min margin {:e} at theta = {})", .0.min_margin, .0.argmin_theta)]
    NotConvex(ConvexityReport),
    #[error("profile evaluation failed at the ignition point: {0}")]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Front(#[from] FrontError),
}

impl ScenarioError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. } => 4,
            ScenarioError::Parse(_)
            | ScenarioError::Invalid { .. }
            | ScenarioError::Expr { .. }
            | ScenarioError::NotConvex(_) => 2,
            ScenarioError::Profile(_) | ScenarioError::Front(_) => 3,
        }
    }
}

fn default_t0() -> f64 {
    0.0
}
fn default_rays() -> usize {
    256
}
fn default_dt() -> f64 {
    1e-3
}
fn default_true() -> bool {
    true
}
fn default_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_m() -> f64 {
    BASE_M
}
fn default_n1() -> f64 {
    BASE_N1
}
fn default_n2() -> f64 {
    BASE_N2
}
fn default_n3() -> f64 {
    BASE_N3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSection {
    a: String,
    b: String,
    lambda: String,
    varphi: String,
    #[serde(default = "default_m")]
    m: f64,
    #[serde(default = "default_n1")]
    n1: f64,
    #[serde(default = "default_n2")]
    n2: f64,
    #[serde(default = "default_n3")]
    n3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IgnitionSection {
    x1: f64,
    x2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    #[serde(default = "default_t0")]
    t0: f64,
    t_end: f64,
    #[serde(default)]
    front_times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    #[serde(default = "default_rays")]
    n_rays: usize,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time_dependent: Option<bool>,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            n_rays: default_rays(),
            dt: default_dt(),
            time_dependent: None,
        }
    }
}

/// Where and what to write after a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub csv: bool,
    #[serde(default = "default_true")]
    pub svg: bool,
    /// Draw the ray polylines in the SVG as well as the fronts.
    #[serde(default = "default_true")]
    pub svg_rays: bool,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            dir: default_dir(),
            csv: true,
            svg: true,
            svg_rays: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    field: FieldSection,
    ignition: IgnitionSection,
    time: TimeSection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    output: OutputSettings,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub field: ParamField,
    pub ignition: [f64; 2],
    pub t0: f64,
    pub t_end: f64,
    pub n_rays: usize,
    pub dt: f64,
    pub time_dependent: bool,
    /// `time_dependent` was given explicitly rather than detected.
    pub time_dependent_override: bool,
    pub front_times: Vec<f64>,
    pub output: OutputSettings,
}

fn invalid(field: &str, msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.to_string(),
        msg: msg.into(),
    }
}

fn check_solver(n_rays: usize, dt: f64) -> Result<(), ScenarioError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid("solver.dt", "must be positive"));
    }
    if n_rays < MIN_RAYS {
        return Err(invalid(
            "solver.n_rays",
            format!("must be at least {MIN_RAYS}"),
        ));
    }
    Ok(())
}

impl Scenario {
    /// Parses and validates a scenario document. No convexity check.
    pub fn from_toml_str(text: &str) -> Result<Scenario, ScenarioError> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    fn from_file(f: ScenarioFile) -> Result<Scenario, ScenarioError> {
        let parse = |name: &str, src: &str| {
            parse_expr(src).map_err(|source| ScenarioError::Expr {
                field: format!("field.{name}"),
                source,
            })
        };
        let fs = &f.field;
        for (name, x) in [("m", fs.m), ("n1", fs.n1), ("n2", fs.n2), ("n3", fs.n3)] {
            if !x.is_finite() {
                return Err(invalid(&format!("field.{name}"), "must be finite"));
            }
        }
        if fs.n1 == 0.0 {
            return Err(invalid("field.n1", "must be nonzero"));
        }
        let field = ParamField {
            a: parse("a", &fs.a)?,
            b: parse("b", &fs.b)?,
            lambda: parse("lambda", &fs.lambda)?,
            varphi: parse("varphi", &fs.varphi)?,
            m: fs.m,
            n1: fs.n1,
            n2: fs.n2,
            n3: fs.n3,
        };
        let ignition = [f.ignition.x1, f.ignition.x2];
        if ignition.iter().any(|x| !x.is_finite()) {
            return Err(invalid("ignition", "coordinates must be finite"));
        }
        let (t0, t_end) = (f.time.t0, f.time.t_end);
        if !t0.is_finite() || !t_end.is_finite() {
            return Err(invalid("time", "t0 and t_end must be finite"));
        }
        if !(t0 < t_end) {
            return Err(invalid(
                "time.t_end",
                format!("must exceed t0 ({t_end} <= {t0})"),
            ));
        }
        if let Some(t) = f
            .time
            .front_times
            .iter()
            .find(|t| !(**t >= t0 && **t <= t_end))
        {
            return Err(invalid(
                "time.front_times",
                format!("{t} lies outside [{t0}, {t_end}]"),
            ));
        }
        check_solver(f.solver.n_rays, f.solver.dt)?;
        let detected = field.depends_on_time();
        Ok(Scenario {
            time_dependent: f.solver.time_dependent.unwrap_or(detected),
            time_dependent_override: f.solver.time_dependent.is_some(),
            field,
            ignition,
            t0,
            t_end,
            n_rays: f.solver.n_rays,
            dt: f.solver.dt,
            front_times: f.time.front_times,
            output: f.output,
        })
    }

    /// Replaces the ray count and step, with the same checks as the file.
    pub fn with_solver(
        mut self,
        n_rays: Option<usize>,
        dt: Option<f64>,
    ) -> Result<Scenario, ScenarioError> {
        self.n_rays = n_rays.unwrap_or(self.n_rays);
        self.dt = dt.unwrap_or(self.dt);
        check_solver(self.n_rays, self.dt)?;
        Ok(self)
    }

    /// Convexity of the speed profile at the ignition point and `t0`.
    pub fn ignition_convexity(&self, grid: usize) -> Result<ConvexityReport, ScenarioError> {
        let params = self.field.params_at(self.t0, self.ignition)?;
        Ok(check_strong_convexity(&params, grid)?)
    }

    /// Serializes back to a scenario document.
    pub fn to_toml_string(&self) -> String {
        let f = &self.field;
        let file = ScenarioFile {
            field: FieldSection {
                a: f.a.to_string(),
                b: f.b.to_string(),
                lambda: f.lambda.to_string(),
                varphi: f.varphi.to_string(),
                m: f.m,
                n1: f.n1,
                n2: f.n2,
                n3: f.n3,
            },
            ignition: IgnitionSection {
                x1: self.ignition[0],
                x2: self.ignition[1],
            },
            time: TimeSection {
                t0: self.t0,
                t_end: self.t_end,
                front_times: self.front_times.clone(),
            },
            solver: SolverSection {
                n_rays: self.n_rays,
                dt: self.dt,
                time_dependent: self.time_dependent_override.then_some(self.time_dependent),
            },
            output: self.output.clone(),
        };
        toml::to_string(&file).expect("scenario serializes")
    }
}

/// Reads, validates and convexity-checks a scenario file.
///
/// With `strict_convexity` a non-convex profile at the ignition point is an
/// error; otherwise it is logged as a warning.
pub fn load_scenario(
    path: impl AsRef<Path>,
    strict_convexity: bool,
) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let scenario = Scenario::from_toml_str(&text)?;
    let report = scenario.ignition_convexity(PRECHECK_GRID)?;
    if !report.passed {
        if strict_convexity {
            return Err(ScenarioError::NotConvex(report));
        }
        log::warn!(
            "profile at the ignition point is not strongly convex: min margin {:e} at theta = {}",
            report.min_margin,
            report.argmin_theta
        );
    }
    Ok(scenario)
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub ray_status: Vec<RayStatus>,
    pub dead_rays: Vec<usize>,
    pub failed_rays: Vec<usize>,
    /// Smallest convexity margin met along any ray.
    pub min_margin: f64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub fan: Fan,
    pub fronts: Vec<Front>,
    pub diagnostics: Diagnostics,
}

/// Shoots the fan, prunes crossings and extracts the requested fronts.
pub fn run_scenario(s: &Scenario) -> Result<RunResult, ScenarioError> {
    let start = Instant::now();
    let fan = shoot_fan(
        &s.field,
        s.ignition,
        s.n_rays,
        s.t0,
        s.t_end,
        s.dt,
        s.time_dependent,
    )?;
    let fan = prune_crossings(fan);
    let fronts = s
        .front_times
        .iter()
        .map(|&t| extract_front(&fan, t))
        .collect::<Result<Vec<_>, _>>()?;
    let diagnostics = Diagnostics {
        ray_status: fan.trajectories.iter().map(|t| t.status.clone()).collect(),
        dead_rays: fan.dead_rays().collect(),
        failed_rays: fan.failed_rays().collect(),
        min_margin: fan
            .trajectories
            .iter()
            .map(|t| t.min_margin)
            .fold(f64::INFINITY, f64::min),
        wall_time: start.elapsed(),
    };
    for k in &diagnostics.failed_rays {
        if let RayStatus::Truncated { at, reason } = &diagnostics.ray_status[*k] {
            log::warn!("ray {k} truncated at t = {at}: {reason}");
        }
    }
    Ok(RunResult {
        fan,
        fronts,
        diagnostics,
    })
}
