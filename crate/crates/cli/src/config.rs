//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": { "name": "rayleigh-taylor", "rho_heavy": 2.0 },
//!   "domain": [[0, 1], [0, 2]],
//!   "mesh": [{ "n": 32 }, { "n": 64, "stretch": 1.0 }],
//!   "viscosity": { "law": "linear", "a": 0.002, "b": 0.004 },
//!   "solver": { "dt": 1e-3, "t_end": 0.1, "advection": "centered" },
//!   "output": { "every": 10, "vtk": true, "staggered_csv": true, "dump_matrices": false },
//!   "convergence": { "levels": [8, 16, 32, 64], "dt_over_h": 1.0, "reference": 256 }
//! }
//! ```
//!
//! `domain` and `viscosity` default to the problem's own. A mesh axis is
//! either `{"n", "stretch"}` (ratio of last to first width, default 1) or
//! `{"breakpoints": [...]}`.

use std::path::Path;

use macflow::mesh::{partition_for_axis, PartitionSpec};
use macflow::operators::{AdvectionScheme, ViscosityLaw};
use macflow::solver::{ForcingMode, SolverConfig};
use macflow::MacMesh;
use serde::Deserialize;

use crate::problems::ProblemSpec;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl ConfigError {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Key path of the offending entry.
    pub fn path(&self) -> &str {
        match self {
            ConfigError::Io { path, .. } | ConfigError::Invalid { path, .. } => path,
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub n: Option<usize>,
    pub stretch: Option<f64>,
    pub breakpoints: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LawConfig {
    Constant { mu: f64 },
    Linear { a: f64, b: f64 },
    Table { rho: Vec<f64>, mu: Vec<f64> },
}

impl LawConfig {
    pub fn to_law(&self) -> ViscosityLaw {
        match self {
            LawConfig::Constant { mu } => ViscosityLaw::Constant(*mu),
            LawConfig::Linear { a, b } => ViscosityLaw::Linear { a: *a, b: *b },
            LawConfig::Table { rho, mu } => ViscosityLaw::Table {
                rho: rho.clone(),
                mu: mu.clone(),
            },
        }
    }
}

fn default_picard_tol() -> f64 {
    1e-10
}
fn default_picard_max() -> usize {
    50
}
fn default_linear_tol() -> f64 {
    1e-10
}
fn default_advection() -> String {
    "centered".into()
}
fn default_quadrature() -> usize {
    5
}
fn default_forcing() -> String {
    "end-point".into()
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_picard_tol")]
    pub picard_tol: f64,
    #[serde(default = "default_picard_max")]
    pub picard_max: usize,
    #[serde(default = "default_linear_tol")]
    pub linear_tol: f64,
    /// `centered` or `upwind`.
    #[serde(default = "default_advection")]
    pub advection: String,
    #[serde(default = "default_quadrature")]
    pub quadrature_order: usize,
    /// `end-point` or `slab-average`.
    #[serde(default = "default_forcing")]
    pub forcing: String,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Snapshot cadence in steps, 0 for the final state only.
    #[serde(default)]
    pub every: usize,
    #[serde(default = "yes")]
    pub vtk: bool,
    #[serde(default = "yes")]
    pub staggered_csv: bool,
    #[serde(default)]
    pub dump_matrices: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            every: 0,
            vtk: true,
            staggered_csv: true,
            dump_matrices: false,
        }
    }
}

fn default_dt_over_h() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Cells per axis on each level (the first axis; others scale along).
    pub levels: Vec<usize>,
    #[serde(default = "default_dt_over_h")]
    pub dt_over_h: f64,
    /// Cells per axis of the fine self-reference, for problems without an
    /// analytic solution.
    pub reference: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub problem: ProblemSpec,
    pub domain: Option<Vec<[f64; 2]>>,
    pub mesh: Vec<AxisConfig>,
    pub viscosity: Option<LawConfig>,
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    pub convergence: Option<ConvergenceSection>,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub domain: Vec<(f64, f64)>,
    pub axes: Vec<AxisConfig>,
    pub law: ViscosityLaw,
    pub solver: SolverConfig,
    pub output: OutputSection,
    pub convergence: Option<ConvergenceSection>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::invalid(if path == "." { "<root>".into() } else { path }, e.into_inner().to_string())
    })?;
    validate(raw)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let dim = raw.mesh.len();
    if !(1..=3).contains(&dim) {
        return Err(ConfigError::invalid("mesh", format!("need 1 to 3 axes, got {dim}")));
    }
    raw.problem.check(dim)?;
    let domain: Vec<(f64, f64)> = match &raw.domain {
        Some(d) => d.iter().map(|b| (b[0], b[1])).collect(),
        None => raw.problem.default_domain(dim),
    };
    if domain.len() != dim {
        return Err(ConfigError::invalid(
            "domain",
            format!("{} intervals for a {dim}-axis mesh", domain.len()),
        ));
    }
    for (a, (lo, hi)) in domain.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(ConfigError::invalid(format!("domain[{a}]"), "need lo < hi"));
        }
    }
    raw.problem.check_domain(&domain)?;
    for (a, ax) in raw.mesh.iter().enumerate() {
        check_axis(a, ax, domain[a])?;
    }

    if raw.viscosity.is_some() && !raw.problem.allows_viscosity_override() {
        return Err(ConfigError::invalid(
            "viscosity",
            format!("{} sets its viscosity through problem.mu", raw.problem.name()),
        ));
    }
    let law = raw.viscosity.as_ref().map_or_else(|| raw.problem.default_viscosity(), |l| l.to_law());
    let (rlo, rhi) = raw.problem.density_bounds();
    if rlo.is_nan() || rlo <= 0.0 {
        return Err(ConfigError::invalid("problem", "initial density must be positive"));
    }
    if let ViscosityLaw::Table { rho, mu } = &law {
        if rho.len() != mu.len() || rho.is_empty() {
            return Err(ConfigError::invalid("viscosity.mu", "table columns differ in length"));
        }
        if rho.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::invalid("viscosity.rho", "must be increasing"));
        }
    }
    law.range(rlo, rhi).map_err(|e| ConfigError::invalid("viscosity", e.to_string()))?;

    let s = &raw.solver;
    let advection: AdvectionScheme = s
        .advection
        .parse()
        .map_err(|e: macflow::OperatorError| ConfigError::invalid("solver.advection", e.to_string()))?;
    let forcing_mode = match s.forcing.as_str() {
        "end-point" => ForcingMode::EndPoint,
        "slab-average" => ForcingMode::SlabAverage,
        other => {
            return Err(ConfigError::invalid(
                "solver.forcing",
                format!("expected end-point or slab-average, got {other}"),
            ))
        }
    };
    let solver = SolverConfig {
        dt: s.dt,
        t_end: s.t_end,
        picard_tol: s.picard_tol,
        picard_max: s.picard_max,
        linear_tol: s.linear_tol,
        advection_scheme: advection,
        quadrature_order: s.quadrature_order,
        forcing_mode,
        output_every: raw.output.every,
    };
    let key = |k: &str| format!("solver.{k}");
    if !(s.dt.is_finite() && s.dt > 0.0) {
        return Err(ConfigError::invalid(key("dt"), "must be positive"));
    }
    if !(s.t_end.is_finite() && s.t_end >= 0.0) {
        return Err(ConfigError::invalid(key("t_end"), "must be non-negative"));
    }
    for (k, v) in [("picard_tol", s.picard_tol), ("linear_tol", s.linear_tol)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(ConfigError::invalid(key(k), "must lie in (0, 1)"));
        }
    }
    for (k, v) in [("picard_max", s.picard_max), ("quadrature_order", s.quadrature_order)] {
        if v == 0 {
            return Err(ConfigError::invalid(key(k), "must be at least 1"));
        }
    }
    solver.validate().map_err(|e| ConfigError::invalid("solver", e.to_string()))?;

    if let Some(c) = &raw.convergence {
        if c.levels.len() < 3 {
            return Err(ConfigError::invalid("convergence.levels", "need at least 3 levels"));
        }
        if let Some(k) = c.levels.iter().position(|n| *n == 0) {
            return Err(ConfigError::invalid(format!("convergence.levels[{k}]"), "must be positive"));
        }
        if !(c.dt_over_h > 0.0 && c.dt_over_h.is_finite()) {
            return Err(ConfigError::invalid("convergence.dt_over_h", "must be positive"));
        }
    }

    Ok(RunConfig {
        problem: raw.problem,
        domain,
        axes: raw.mesh,
        law,
        solver,
        output: raw.output,
        convergence: raw.convergence,
    })
}

fn check_axis(a: usize, ax: &AxisConfig, (lo, hi): (f64, f64)) -> Result<(), ConfigError> {
    let key = |k: &str| format!("mesh[{a}].{k}");
    match (&ax.n, &ax.breakpoints) {
        (Some(_), Some(_)) | (None, None) => Err(ConfigError::invalid(format!("mesh[{a}]"), "give either n or breakpoints")),
        (Some(n), None) => {
            if *n == 0 {
                return Err(ConfigError::invalid(key("n"), "must be positive"));
            }
            let r = ax.stretch.unwrap_or(1.0);
            if !(r > 0.0 && r.is_finite()) {
                return Err(ConfigError::invalid(key("stretch"), "must be positive"));
            }
            Ok(())
        }
        (None, Some(bp)) => {
            if ax.stretch.is_some() {
                return Err(ConfigError::invalid(key("stretch"), "not allowed with breakpoints"));
            }
            partition_for_axis(a, PartitionSpec::Breakpoints(bp.clone()))
                .map_err(|e| ConfigError::invalid(key("breakpoints"), e.to_string()))?;
            let (f, l) = (bp[0], bp[bp.len() - 1]);
            if (f - lo).abs() > 1e-12 * (hi - lo) || (l - hi).abs() > 1e-12 * (hi - lo) {
                return Err(ConfigError::invalid(key("breakpoints"), format!("must span the domain [{lo}, {hi}]")));
            }
            Ok(())
        }
    }
}

impl RunConfig {
    /// Mesh of the configuration, or with `n` cells along the first axis
    /// (other axes scaled in proportion) when `cells` is given.
    pub fn mesh(&self, cells: Option<usize>) -> Result<MacMesh, ConfigError> {
        let base = self.axes[0].n.or_else(|| self.axes[0].breakpoints.as_ref().map(|b| b.len() - 1));
        let mut parts = Vec::new();
        for (a, ax) in self.axes.iter().enumerate() {
            let (lo, hi) = self.domain[a];
            let spec = match (cells, ax.n, &ax.breakpoints) {
                (Some(c), _, _) => {
                    let own = ax.n.or_else(|| ax.breakpoints.as_ref().map(|b| b.len() - 1)).unwrap();
                    let n = (c * own).div_ceil(base.unwrap()).max(1);
                    PartitionSpec::Stretched {
                        lo,
                        hi,
                        n,
                        ratio: ax.stretch.unwrap_or(1.0),
                    }
                }
                (None, Some(n), _) => PartitionSpec::Stretched {
                    lo,
                    hi,
                    n,
                    ratio: ax.stretch.unwrap_or(1.0),
                },
                (None, None, Some(bp)) => PartitionSpec::Breakpoints(bp.clone()),
                _ => unreachable!("validated"),
            };
            parts.push(partition_for_axis(a, spec).map_err(|e| ConfigError::invalid(format!("mesh[{a}]"), e.to_string()))?);
        }
        MacMesh::build(parts).map_err(|e| ConfigError::invalid("mesh", e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "problem": {"name": "quiescent"},
        "mesh": [{"n": 4}, {"n": 4}],
        "solver": {"dt": 0.1, "t_end": 0.5}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(BASE).unwrap();
        assert_eq!(c.domain, vec![(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(c.solver.picard_max, 50);
        assert_eq!(c.solver.n_steps(), 5);
        assert_eq!(c.mesh(None).unwrap().n_cells(), 16);
        assert_eq!(c.mesh(Some(8)).unwrap().n_cells(), 64);
    }

    #[test]
    fn errors_carry_key_paths() {
        let bad = BASE.replace(r#""dt": 0.1"#, r#""dt": "fast""#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "solver.dt");
        let bad = BASE.replace(r#""dt": 0.1"#, r#""dt": -0.1"#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "solver.dt");
        let bad = BASE.replace(r#"{"n": 4}]"#, r#"{"n": 4, "stretch": -2}]"#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "mesh[1].stretch");
        let bad = BASE.replace(r#""t_end": 0.5"#, r#""t_end": 0.5, "advection": "quick""#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "solver.advection");
        let bad = BASE.replace(r#""t_end": 0.5"#, r#""t_end": 0.5, "tolerance": 1"#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "solver.tolerance");
        let bad = BASE.replace(r#"{"n": 4}, {"n": 4}"#, r#"{"n": 4}, {"breakpoints": [0, 0.5, 0.4, 1]}"#);
        assert_eq!(parse_config(&bad).unwrap_err().path(), "mesh[1].breakpoints");
    }
}
