//! Subcommands. Each returns an [`Outcome`] or an [`AppError`] whose
//! [`AppError::exit_code`] is what the binary exits with.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use macflow::mesh::{AxisPartition, MacMesh};
use macflow::quadrature::Quadrature;
use macflow::solver::{run_from, SolverConfig, TimeState};
use macflow::verification::{check_dualities_with, check_inequalities, OperatorSuite, StandardOperators, SuiteReport, REPORT_CSV_HEADER};

use crate::config::{load_config, ConfigError, RunConfig};
use crate::harness::{analytic_errors, convergence_study, is_monotone, ConvergenceTable, HarnessError};
use crate::output::{dump_matrices, write_snapshot, FileSink};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => EXIT_CONFIG,
            AppError::Solver(_) | AppError::Io(_) => EXIT_SOLVER,
            AppError::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl From<HarnessError> for AppError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(c) => AppError::Config(c),
            HarnessError::TooFewLevels(_) | HarnessError::NoReference(_) => {
                AppError::Config(ConfigError::invalid("convergence", e.to_string()))
            }
            e @ HarnessError::Solver { .. } => AppError::Solver(e.to_string()),
        }
    }
}

/// Human-readable report plus files written.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<PathBuf>,
}

fn write_text(path: PathBuf, text: &str, files: &mut Vec<PathBuf>) -> Result<(), AppError> {
    fs::write(&path, text)?;
    files.push(path);
    Ok(())
}

/// Runs one simulation: `diagnostics.csv`, snapshots every
/// `output.every` steps, the final state under `final/`, `summary.txt`,
/// optional matrix dumps under `matrices/` and, for the manufactured
/// solution, `errors.csv`.
pub fn run(config_path: &Path, output_dir: &Path) -> Result<Outcome, AppError> {
    let config = load_config(config_path)?;
    run_config(&config, output_dir)
}

pub fn run_config(config: &RunConfig, output_dir: &Path) -> Result<Outcome, AppError> {
    let mesh = config.mesh(None)?;
    let cfg = SolverConfig {
        output_every: config.output.every,
        ..config.solver.clone()
    };
    let problem = config.problem.build(config.law.clone());
    let solver_err = |e: macflow::SolverError| AppError::Solver(e.to_string());
    let quad = Quadrature::new(cfg.quadrature_order).map_err(|e| solver_err(e.into()))?;
    let initial = TimeState::project(&mesh, problem.as_ref(), &quad).map_err(|e| solver_err(e.into()))?;

    fs::create_dir_all(output_dir)?;
    let mut files = Vec::new();
    if config.output.dump_matrices {
        files.extend(dump_matrices(
            &output_dir.join("matrices"),
            &mesh,
            &initial,
            &config.law,
            &problem.forcing(),
            &cfg,
        )?);
    }
    let mut sink = FileSink::create(output_dir, config.output.vtk, config.output.staggered_csv)?;
    files.push(output_dir.join("diagnostics.csv"));
    let result = run_from(&mesh, initial, problem.forcing(), &config.law, &cfg, &mut sink);
    sink.finish()?;
    let traj = result.map_err(solver_err)?;
    files.extend(write_snapshot(&output_dir.join("final"), &mesh, &traj.last, true, true)?);

    let s = &traj.summary;
    let mut report = format!(
        "problem {}\ncells {}\nsteps {}\nt {:e}\nmass drift {:e}\ndensity range [{:e}, {:e}] (initial [{:e}, {:e}])\nmax divergence {:e}\nmax energy residual {:e}\nmax picard iterations {}\nbv sum {:e}\nh1 time integral {:e}\n",
        config.problem.name(),
        mesh.n_cells(),
        s.steps,
        traj.last.t,
        s.total_mass_drift,
        s.rho_min,
        s.rho_max,
        s.rho_bounds.0,
        s.rho_bounds.1,
        s.max_div,
        s.max_energy_residual,
        s.max_picard_iterations,
        s.bv_sum,
        s.h1_time,
    );
    if let Some(mms) = config.problem.analytic() {
        let (u, p, r) = analytic_errors(&mesh, &traj.last, &mms, &quad).map_err(solver_err)?;
        write_text(
            output_dir.join("errors.csv"),
            &format!("t,u_l2_error,p_l2_error,rho_l2_error\n{:e},{u:e},{p:e},{r:e}\n", traj.last.t),
            &mut files,
        )?;
        report.push_str(&format!("velocity L2 error {u:e}\npressure L2 error {p:e}\ndensity L2 error {r:e}\n"));
    }
    let violations: Vec<String> = s.violations.iter().map(|(n, v)| format!("step {n}: {v}")).collect();
    report.push_str(&format!("violations {}\n", violations.len()));
    for v in &violations {
        report.push_str(&format!("  {v}\n"));
    }
    write_text(output_dir.join("summary.txt"), &report, &mut files)?;
    if !violations.is_empty() {
        return Err(AppError::Verification(format!("audit flags raised: {}", violations.join(", "))));
    }
    Ok(Outcome { report, files })
}

/// Levels from the config, or `count` levels doubling from its first.
pub fn study_levels(config: &RunConfig, count: Option<usize>) -> Result<Vec<usize>, ConfigError> {
    let base = config
        .convergence
        .as_ref()
        .map(|c| c.levels.clone())
        .ok_or_else(|| ConfigError::invalid("convergence", "missing section"))?;
    Ok(match count {
        None => base,
        Some(n) => (0..n).map(|k| base[0] << k).collect(),
    })
}

pub fn convergence(config_path: &Path, levels: Option<usize>, output_dir: &Path, threads: usize) -> Result<Outcome, AppError> {
    let config = load_config(config_path)?;
    let levels = study_levels(&config, levels)?;
    let table = convergence_study(&config, &levels, threads)?;
    fs::create_dir_all(output_dir)?;
    let mut files = Vec::new();
    write_text(output_dir.join("convergence.csv"), &table.csv(), &mut files)?;
    Ok(Outcome {
        report: convergence_report(&table),
        files,
    })
}

pub fn convergence_report(table: &ConvergenceTable) -> String {
    let mut s = format!(
        "{} against {}\n{}",
        table.problem,
        table.reference.map_or("the analytic solution".into(), |r| format!("a {r}-cell reference")),
        table.csv()
    );
    if table.any_flagged() {
        s.push_str("warning: undefined order (repeated level or zero error)\n");
    }
    for (name, e) in [("velocity", table.u_errors()), ("pressure", table.p_errors()), ("density", table.rho_errors())] {
        s.push_str(&format!("{name} errors monotone: {}\n", is_monotone(&e)));
    }
    s
}

/// Meshes checked by `verify` when no config is given.
pub fn default_verify_meshes() -> Vec<(String, MacMesh)> {
    let uniform = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[8, 8]).unwrap();
    let axis = || AxisPartition::stretched(0.0, 1.0, 16, 3.0).unwrap();
    let stretched = MacMesh::build(vec![axis(), axis()]).unwrap();
    vec![("uniform 8x8".into(), uniform), ("stretched 16x16".into(), stretched)]
}

/// Identity and inequality suites on each mesh; `ops` replaces the
/// operators under test.
pub fn verify_meshes(meshes: &[(String, MacMesh)], trials: usize, seed: u64, ops: &dyn OperatorSuite) -> Vec<(String, SuiteReport)> {
    let mut out = Vec::new();
    for (k, (label, mesh)) in meshes.iter().enumerate() {
        let s = seed.wrapping_add(k as u64);
        out.push((label.clone(), check_dualities_with(mesh, trials, s, ops)));
        out.push((label.clone(), check_inequalities(mesh, trials, s)));
    }
    out
}

pub fn verify_reports(reports: &[(String, SuiteReport)], output_dir: &Path) -> Result<Outcome, AppError> {
    fs::create_dir_all(output_dir)?;
    let path = output_dir.join("verify.csv");
    let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
    writeln!(f, "mesh,{REPORT_CSV_HEADER}")?;
    let mut report = String::new();
    let mut failed = Vec::new();
    for (label, r) in reports {
        for row in r.csv_rows() {
            writeln!(f, "{label},{row}")?;
        }
        report.push_str(&format!("{label}: {r}"));
        failed.extend(r.failures().into_iter().map(|n| format!("{n} ({label})")));
    }
    f.flush()?;
    if !failed.is_empty() {
        return Err(AppError::Verification(failed.join(", ")));
    }
    Ok(Outcome {
        report,
        files: vec![path],
    })
}

pub fn verify(config_path: Option<&Path>, trials: usize, seed: u64, output_dir: &Path) -> Result<Outcome, AppError> {
    let meshes = match config_path {
        Some(p) => vec![("config".to_string(), load_config(p)?.mesh(None)?)],
        None => default_verify_meshes(),
    };
    let reports = verify_meshes(&meshes, trials, seed, &StandardOperators);
    verify_reports(&reports, output_dir)
}
