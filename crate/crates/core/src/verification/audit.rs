use crate::fields::{cell_lp, norm_h1, velocity_l2, CellScalarField, VelocityField};
use crate::mesh::MacMesh;
use crate::operators::{divergence_mac, mass_fluxes, viscous_dissipation};
use crate::solver::{SolverConfig, StepReport, TimeState};

/// Tolerance of the exact per-step identities (mass, bounds, dual balance).
pub const EXACT_TOL: f64 = 1e-12;
/// Absolute bound on `div_M u`.
pub const DIV_TOL: f64 = 1e-10;

/// Which invariants an audited step violated. `true` means clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditFlags {
    pub max_principle: bool,
    pub mass: bool,
    pub rho_identity: bool,
    pub dual_mass: bool,
    pub divergence: bool,
    pub energy: bool,
}

impl AuditFlags {
    pub fn all_clear(&self) -> bool {
        self.max_principle && self.mass && self.rho_identity && self.dual_mass && self.divergence && self.energy
    }

    pub fn violations(&self) -> Vec<&'static str> {
        [
            ("max_principle", self.max_principle),
            ("mass", self.mass),
            ("rho_identity", self.rho_identity),
            ("dual_mass", self.dual_mass),
            ("divergence", self.divergence),
            ("energy", self.energy),
        ]
        .into_iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| n)
        .collect()
    }
}

/// Per-step diagnostics, recomputed from the two states.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    /// `½ Σ |D_σ| ρ_{D_σ} u_σ²` at the new level.
    pub kinetic_energy: f64,
    /// `δt ∫ μ D(u):D(u)`.
    pub dissipation: f64,
    /// `δt ∫ f·u`.
    pub work: f64,
    /// `½ Σ |D_σ| ρ_{D_σ}ⁿ (u_σ^{n+1} - u_σⁿ)²`.
    pub numerical_dissipation: f64,
    /// Signed kinetic energy balance divided by its largest term.
    pub energy_residual: f64,
    pub mass: f64,
    /// `|m^{n+1} - mⁿ| / mⁿ`.
    pub mass_drift: f64,
    pub rho_l2: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    /// `δt Σ_σ |σ| (ρ_L - ρ_K)² |u_σ|`.
    pub bv_increment: f64,
    pub rho_identity_residual: f64,
    /// Worst relative dual mass balance over the velocity cells.
    pub dual_mass_residual: f64,
    pub div_max: f64,
    /// `‖u^{n+1}‖²_{1,E,0}`.
    pub h1_sq: f64,
    pub u_l2: f64,
    pub p_l2: f64,
    pub p_mean: f64,
    /// `‖f_E‖²_{L²}`.
    pub force_l2_sq: f64,
    pub picard_iterations: usize,
    pub picard_residual: f64,
    pub linear_residual: f64,
    pub flags: AuditFlags,
}

pub const CSV_HEADER: &str = "step,t,kinetic_energy,dissipation,work,numerical_dissipation,energy_residual,mass,mass_drift,rho_l2,rho_min,rho_max,mu_min,mu_max,bv_increment,rho_identity_residual,dual_mass_residual,div_max,h1_sq,u_l2,p_l2,p_mean,force_l2_sq,picard_iterations,picard_residual,linear_residual,flag_max_principle,flag_mass,flag_rho_identity,flag_dual_mass,flag_divergence,flag_energy";

impl DiagnosticsRecord {
    pub fn is_finite(&self) -> bool {
        self.reals().iter().all(|v| v.is_finite()) && self.picard_residual.is_finite() && self.linear_residual.is_finite()
    }

    fn reals(&self) -> [f64; 22] {
        [
            self.t,
            self.kinetic_energy,
            self.dissipation,
            self.work,
            self.numerical_dissipation,
            self.energy_residual,
            self.mass,
            self.mass_drift,
            self.rho_l2,
            self.rho_min,
            self.rho_max,
            self.mu_min,
            self.mu_max,
            self.bv_increment,
            self.rho_identity_residual,
            self.dual_mass_residual,
            self.div_max,
            self.h1_sq,
            self.u_l2,
            self.p_l2,
            self.p_mean,
            self.force_l2_sq,
        ]
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![self.step.to_string()];
        cols.extend(self.reals().iter().map(|v| format!("{v:e}")));
        cols.push(self.picard_iterations.to_string());
        cols.push(format!("{:e}", self.picard_residual));
        cols.push(format!("{:e}", self.linear_residual));
        let f = &self.flags;
        for ok in [f.max_principle, f.mass, f.rho_identity, f.dual_mass, f.divergence, f.energy] {
            cols.push(if ok { "1" } else { "0" }.into());
        }
        cols.join(",")
    }
}

/// `½ Σ |D_σ| ρ_{D_σ} u_σ²`.
pub fn kinetic_energy(mesh: &MacMesh, rho_dual: &[Vec<f64>], u: &VelocityField) -> f64 {
    let mut e = 0.0;
    for i in 0..mesh.dim() {
        for f in mesh.interior_faces(i) {
            e += 0.5 * mesh.face_dual_volume(f) * rho_dual[i][f.index] * u.get(f).powi(2);
        }
    }
    e
}

/// `δt Σ_σ |σ| (ρ_L - ρ_K)² |u_σ|` over interior faces.
pub fn bv_increment(mesh: &MacMesh, rho: &CellScalarField, u: &VelocityField, dt: f64) -> f64 {
    let r = rho.values();
    let mut s = 0.0;
    for i in 0..mesh.dim() {
        for f in mesh.interior_faces(i) {
            let (k, l) = mesh.face_cells(f);
            s += mesh.face_area(f) * (r[l.unwrap()] - r[k.unwrap()]).powi(2) * u.get(f).abs();
        }
    }
    dt * s
}

fn weighted_dot(mesh: &MacMesh, a: &VelocityField, b: &VelocityField) -> f64 {
    let mut s = 0.0;
    for i in 0..mesh.dim() {
        for f in mesh.interior_faces(i) {
            s += mesh.face_dual_volume(f) * a.get(f) * b.get(f);
        }
    }
    s
}

/// Worst relative residual of
/// `|D_σ|(ρ_{D_σ}^{n+1} - ρ_{D_σ}ⁿ)/δt + Σ_σ̃ F_{σ,σ̃} = 0`, fluxes taken
/// from `(ρ^{n+1}, u^{n+1})`.
pub fn dual_mass_residual(
    mesh: &MacMesh,
    rho_dual_old: &[Vec<f64>],
    rho_dual_new: &[Vec<f64>],
    rho_new: &CellScalarField,
    u: &VelocityField,
    dt: f64,
) -> f64 {
    let fluxes = mass_fluxes(mesh, rho_new, u);
    let mut worst = 0.0f64;
    for i in 0..mesh.dim() {
        for f in mesh.interior_faces(i) {
            let vol = mesh.face_dual_volume(f);
            let (a, b) = (rho_dual_new[i][f.index], rho_dual_old[i][f.index]);
            let faces = mesh.dual_faces_of(f).expect("interior face");
            let mut out = 0.0;
            let mut mag = 0.0;
            for df in &faces {
                let g = fluxes.dual[df.id.i][df.id.j][df.id.index];
                out += df.normal * g;
                mag += g.abs();
            }
            let r = vol * (a - b) / dt + out;
            let scale = vol * (a.abs() + b.abs()) / dt + mag;
            if scale > 0.0 {
                worst = worst.max(r.abs() / scale);
            }
        }
    }
    worst
}

/// Audits one accepted step. Every quantity is recomputed from the two
/// states; the report only supplies the source term, the viscosity and the
/// iteration counters.
pub fn step_audit(mesh: &MacMesh, prev: &TimeState, next: &TimeState, cfg: &SolverConfig, report: &StepReport) -> DiagnosticsRecord {
    let dt = cfg.dt;
    let e0 = kinetic_energy(mesh, &prev.rho_dual, &prev.u);
    let e1 = kinetic_energy(mesh, &next.rho_dual, &next.u);
    let dissipation = dt * viscous_dissipation(mesh, &report.mu, &next.u);
    let work = dt * weighted_dot(mesh, &report.force, &next.u);
    let mut du = next.u.clone();
    du.axpy(-1.0, &prev.u);
    let numerical_dissipation = kinetic_energy(mesh, &prev.rho_dual, &du);
    let balance = e1 - e0 + numerical_dissipation + dissipation - work;
    let escale = [e0, e1, numerical_dissipation, dissipation, work.abs()]
        .into_iter()
        .fold(0.0f64, f64::max);
    let energy_residual = if escale > 0.0 { balance / escale } else { 0.0 };
    let energy_growth = e1 + dissipation - work - e0;
    let energy_ok = energy_growth <= 10.0 * cfg.picard_tol * escale;

    let m0 = prev.rho.integral(mesh);
    let m1 = next.rho.integral(mesh);
    let mass_drift = if m0 != 0.0 { (m1 - m0).abs() / m0.abs() } else { (m1 - m0).abs() };

    let (lo, hi) = prev.rho_bounds;
    let slack = EXACT_TOL * hi.abs().max(1.0);
    let (rho_min, rho_max) = (next.rho.min(), next.rho.max());
    let max_principle = rho_min >= lo - slack && rho_max <= hi + slack;

    let bv = bv_increment(mesh, &next.rho, &next.u, dt);
    let half_sq = |q: &CellScalarField| 0.5 * cell_lp(mesh, q, 2.0).powi(2);
    let mut jump = next.rho.clone();
    for (a, b) in jump.values_mut().iter_mut().zip(prev.rho.values()) {
        *a -= b;
    }
    let l2_old = half_sq(&prev.rho);
    let rho_identity_residual = if l2_old > 0.0 {
        (half_sq(&next.rho) + 0.5 * bv + half_sq(&jump) - l2_old).abs() / l2_old
    } else {
        0.0
    };

    let dual_mass = dual_mass_residual(mesh, &prev.rho_dual, &next.rho_dual, &next.rho, &next.u, dt);
    let div_max = cell_lp(mesh, &divergence_mac(mesh, &next.u), f64::INFINITY);

    let flags = AuditFlags {
        max_principle,
        mass: mass_drift <= EXACT_TOL,
        rho_identity: rho_identity_residual <= 10.0 * cfg.linear_tol,
        dual_mass: dual_mass <= EXACT_TOL,
        divergence: div_max <= DIV_TOL,
        energy: energy_ok,
    };
    DiagnosticsRecord {
        step: next.step,
        t: next.t,
        kinetic_energy: e1,
        dissipation,
        work,
        numerical_dissipation,
        energy_residual,
        mass: m1,
        mass_drift,
        rho_l2: cell_lp(mesh, &next.rho, 2.0),
        rho_min,
        rho_max,
        mu_min: report.mu.min(),
        mu_max: report.mu.max(),
        bv_increment: bv,
        rho_identity_residual,
        dual_mass_residual: dual_mass,
        div_max,
        h1_sq: norm_h1(mesh, &next.u).powi(2),
        u_l2: velocity_l2(mesh, &next.u),
        p_l2: cell_lp(mesh, &next.p, 2.0),
        p_mean: next.p.mean(mesh),
        force_l2_sq: velocity_l2(mesh, &report.force).powi(2),
        picard_iterations: report.iterations,
        picard_residual: report.residual,
        linear_residual: report.linear_residual,
        flags,
    }
}

/// Running totals over a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub last_t: f64,
    pub dt_sum: f64,
    pub initial_mass: f64,
    pub initial_energy: f64,
    pub rho_bounds: (f64, f64),
    pub u0_l2: f64,
    /// Accumulated weak BV sum.
    pub bv_sum: f64,
    /// `Σ δt ‖u^{n+1}‖²_{1,E,0}`.
    pub h1_time: f64,
    /// `max ‖u^{n+1}‖_{L²}`.
    pub max_u_l2: f64,
    /// `Σ δt ‖f_E^{n+1}‖²`.
    pub force_time: f64,
    pub max_p_l2: f64,
    pub max_mass_drift: f64,
    /// `|m^N - m⁰| / m⁰`.
    pub total_mass_drift: f64,
    pub max_rho_identity: f64,
    pub max_dual_mass: f64,
    pub max_div: f64,
    pub max_energy_residual: f64,
    pub max_picard_iterations: usize,
    pub rho_min: f64,
    pub rho_max: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub violations: Vec<(usize, &'static str)>,
}

impl RunSummary {
    pub fn start(mesh: &MacMesh, initial: &TimeState) -> Self {
        Self {
            steps: 0,
            last_t: initial.t,
            dt_sum: 0.0,
            initial_mass: initial.rho.integral(mesh),
            initial_energy: kinetic_energy(mesh, &initial.rho_dual, &initial.u),
            rho_bounds: initial.rho_bounds,
            u0_l2: velocity_l2(mesh, &initial.u),
            bv_sum: 0.0,
            h1_time: 0.0,
            max_u_l2: 0.0,
            force_time: 0.0,
            max_p_l2: 0.0,
            max_mass_drift: 0.0,
            total_mass_drift: 0.0,
            max_rho_identity: 0.0,
            max_dual_mass: 0.0,
            max_div: 0.0,
            max_energy_residual: 0.0,
            max_picard_iterations: 0,
            rho_min: initial.rho.min(),
            rho_max: initial.rho.max(),
            mu_min: f64::INFINITY,
            mu_max: f64::NEG_INFINITY,
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, rec: &DiagnosticsRecord) {
        let dt = rec.t - self.last_t;
        self.last_t = rec.t;
        self.steps += 1;
        self.dt_sum += dt;
        self.bv_sum += rec.bv_increment;
        self.h1_time += dt * rec.h1_sq;
        self.force_time += dt * rec.force_l2_sq;
        self.max_u_l2 = self.max_u_l2.max(rec.u_l2);
        self.max_p_l2 = self.max_p_l2.max(rec.p_l2);
        self.max_mass_drift = self.max_mass_drift.max(rec.mass_drift);
        self.total_mass_drift = if self.initial_mass != 0.0 {
            (rec.mass - self.initial_mass).abs() / self.initial_mass.abs()
        } else {
            rec.mass.abs()
        };
        self.max_rho_identity = self.max_rho_identity.max(rec.rho_identity_residual);
        self.max_dual_mass = self.max_dual_mass.max(rec.dual_mass_residual);
        self.max_div = self.max_div.max(rec.div_max);
        self.max_energy_residual = self.max_energy_residual.max(rec.energy_residual.abs());
        self.max_picard_iterations = self.max_picard_iterations.max(rec.picard_iterations);
        self.rho_min = self.rho_min.min(rec.rho_min);
        self.rho_max = self.rho_max.max(rec.rho_max);
        self.mu_min = self.mu_min.min(rec.mu_min);
        self.mu_max = self.mu_max.max(rec.mu_max);
        for v in rec.flags.violations() {
            self.violations.push((rec.step, v));
        }
    }

    pub fn all_clear(&self) -> bool {
        self.violations.is_empty()
    }

    /// Data-only bound `ρ_max ‖u⁰‖² + (4 diam²/μ_min) Σ δt ‖f‖²` of the
    /// velocity estimates.
    pub fn estimate_bound(&self, diameter: f64, mu_min: f64) -> f64 {
        self.rho_bounds.1 * self.u0_l2.powi(2) + 4.0 * diameter.powi(2) / mu_min * self.force_time
    }

    /// `(ρ_min max‖u‖², (μ_min/2) Σ δt ‖u‖²_{1,E,0})`, each bounded by
    /// [`RunSummary::estimate_bound`].
    pub fn estimate_terms(&self, mu_min: f64) -> (f64, f64) {
        (self.rho_bounds.0 * self.max_u_l2.powi(2), 0.5 * mu_min * self.h1_time)
    }
}
