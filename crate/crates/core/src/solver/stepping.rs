use super::config::SolverConfig;
use super::momentum::{momentum_residual, momentum_solve, MomentumInputs};
use super::state::{Forcing, Problem, TimeState};
use super::transport::transport_solve;
use crate::error::SolverError;
use crate::fields::{CellScalarField, VelocityField};
use crate::mesh::MacMesh;
use crate::operators::{dual_cell_density, mass_fluxes, viscosity_tensor, MassFluxSet, ViscosityLaw, ViscosityTensorField};
use crate::quadrature::Quadrature;
use crate::verification::{step_audit, DiagnosticsRecord, RunSummary};

/// Quantities frozen at one Picard iterate.
struct Frozen {
    rho: CellScalarField,
    rho_dual: Vec<Vec<f64>>,
    fluxes: MassFluxSet,
    mu: ViscosityTensorField,
    force: VelocityField,
}

impl Frozen {
    fn new(
        mesh: &MacMesh,
        rho: CellScalarField,
        u: &VelocityField,
        law: &ViscosityLaw,
        forcing: &Forcing,
        analytic: Option<&VelocityField>,
    ) -> Result<Self, SolverError> {
        let rho_dual = dual_cell_density(mesh, &rho);
        let fluxes = mass_fluxes(mesh, &rho, u);
        let mu = viscosity_tensor(mesh, &rho, law)?;
        let force = forcing.faces(mesh, analytic, &rho_dual);
        Ok(Self {
            rho,
            rho_dual,
            fluxes,
            mu,
            force,
        })
    }

    fn inputs<'a>(&'a self, prev: &'a TimeState, cfg: &SolverConfig) -> MomentumInputs<'a> {
        MomentumInputs {
            rho_dual_new: &self.rho_dual,
            rho_dual_old: &prev.rho_dual,
            u_old: &prev.u,
            fluxes: &self.fluxes,
            mu: &self.mu,
            force: &self.force,
            dt: cfg.dt,
            scheme: cfg.advection_scheme,
        }
    }
}

/// Diagnostics of an accepted step.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub iterations: usize,
    /// Relative nonlinear residual of the accepted iterate.
    pub residual: f64,
    /// Largest relative residual among the linear solves of the last iterate.
    pub linear_residual: f64,
    /// Momentum source used by the accepted iterate.
    pub force: VelocityField,
    pub mu: ViscosityTensorField,
}

/// One implicit step by Picard iteration on frozen fluxes.
pub fn advance_timestep(
    mesh: &MacMesh,
    state: &TimeState,
    cfg: &SolverConfig,
    forcing: &Forcing,
    law: &ViscosityLaw,
    quad: &Quadrature,
) -> Result<(TimeState, StepReport), SolverError> {
    let t1 = state.t + cfg.dt;
    let analytic = forcing.analytic_faces(mesh, quad, cfg.forcing_mode, state.t, t1)?;
    let (rho0, _) = transport_solve(mesh, &state.rho, &state.u, cfg.dt, cfg.linear_tol)?;
    let mut frozen = Frozen::new(mesh, rho0, &state.u, law, forcing, analytic.as_ref())?;
    let mut last = f64::INFINITY;
    for it in 1..=cfg.picard_max {
        let (u, p, lin_m) = momentum_solve(mesh, &frozen.inputs(state, cfg), cfg.linear_tol)?;
        let (rho, lin_t) = transport_solve(mesh, &state.rho, &u, cfg.dt, cfg.linear_tol)?;
        frozen = Frozen::new(mesh, rho, &u, law, forcing, analytic.as_ref())?;
        let (res, _) = momentum_residual(mesh, &frozen.inputs(state, cfg), &u, &p);
        last = res;
        if res <= cfg.picard_tol {
            let next = TimeState {
                step: state.step + 1,
                t: t1,
                rho: frozen.rho,
                u,
                p,
                rho_dual: frozen.rho_dual,
                rho_bounds: state.rho_bounds,
            };
            let report = StepReport {
                iterations: it,
                residual: res,
                linear_residual: lin_m.max(lin_t),
                force: frozen.force,
                mu: frozen.mu,
            };
            return Ok((next, report));
        }
    }
    Err(SolverError::PicardDiverged {
        iterations: cfg.picard_max,
        residual: last,
    })
}

/// Receives per-step diagnostics and field snapshots.
pub trait DiagnosticsSink {
    fn record(&mut self, _rec: &DiagnosticsRecord) {}
    fn snapshot(&mut self, _mesh: &MacMesh, _state: &TimeState) {}
}

/// Sink that keeps everything in memory.
#[derive(Default)]
pub struct MemorySink {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<TimeState>,
}

impl DiagnosticsSink for MemorySink {
    fn record(&mut self, rec: &DiagnosticsRecord) {
        self.records.push(rec.clone());
    }

    fn snapshot(&mut self, _mesh: &MacMesh, state: &TimeState) {
        self.snapshots.push(state.clone());
    }
}

#[derive(Debug)]
pub struct Trajectory {
    pub initial: TimeState,
    pub last: TimeState,
    pub summary: RunSummary,
}

/// Projects the initial data and steps to `t_end`.
pub fn run_simulation(
    mesh: &MacMesh,
    problem: &dyn Problem,
    cfg: &SolverConfig,
    sink: &mut dyn DiagnosticsSink,
) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    let quad = Quadrature::new(cfg.quadrature_order)?;
    let initial = TimeState::project(mesh, problem, &quad)?;
    run_from(mesh, initial, problem.forcing(), &problem.viscosity(), cfg, sink)
}

/// Steps an existing state to `t_end`.
pub fn run_from(
    mesh: &MacMesh,
    initial: TimeState,
    forcing: Forcing,
    law: &ViscosityLaw,
    cfg: &SolverConfig,
    sink: &mut dyn DiagnosticsSink,
) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    let quad = Quadrature::new(cfg.quadrature_order)?;
    let mut summary = RunSummary::start(mesh, &initial);
    if cfg.output_every > 0 {
        sink.snapshot(mesh, &initial);
    }
    let mut state = initial.clone();
    for n in 0..cfg.n_steps() {
        let (next, report) = advance_timestep(mesh, &state, cfg, &forcing, law, &quad).map_err(|e| SolverError::StepFailed {
            step: n + 1,
            source: Box::new(e),
        })?;
        let rec = step_audit(mesh, &state, &next, cfg, &report);
        summary.push(&rec);
        sink.record(&rec);
        if cfg.output_every > 0 && (n + 1) % cfg.output_every == 0 {
            sink.snapshot(mesh, &next);
        }
        state = next;
    }
    Ok(Trajectory {
        initial,
        last: state,
        summary,
    })
}
