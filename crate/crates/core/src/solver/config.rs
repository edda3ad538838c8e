use crate::error::SolverError;
use crate::operators::AdvectionScheme;

/// How the momentum source is sampled in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ForcingMode {
    /// `f(t^{n+1}, ·)`.
    #[default]
    EndPoint,
    /// Time average over `(t^n, t^{n+1}]`.
    SlabAverage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub picard_tol: f64,
    pub picard_max: usize,
    pub linear_tol: f64,
    pub advection_scheme: AdvectionScheme,
    pub quadrature_order: usize,
    pub forcing_mode: ForcingMode,
    /// Snapshot cadence in steps; zero disables snapshots.
    pub output_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1e-2,
            picard_tol: 1e-10,
            picard_max: 50,
            linear_tol: 1e-10,
            advection_scheme: AdvectionScheme::Centered,
            quadrature_order: 5,
            forcing_mode: ForcingMode::EndPoint,
            output_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::BadConfig(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        for (name, v) in [("picard_tol", self.picard_tol), ("linear_tol", self.linear_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if self.picard_max == 0 {
            return bad("picard_max must be at least 1".into());
        }
        if self.quadrature_order == 0 {
            return bad("quadrature_order must be at least 1".into());
        }
        Ok(())
    }

    /// Number of uniform steps to reach `t_end` (rounded to the nearest
    /// whole step).
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}
