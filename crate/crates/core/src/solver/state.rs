use std::sync::Arc;

use crate::error::FieldError;
use crate::fields::{project_cell, project_face_dual, CellScalarField, Point, VelocityField};
use crate::mesh::MacMesh;
use crate::operators::{dual_cell_density, ViscosityLaw};
use crate::quadrature::Quadrature;

use super::config::ForcingMode;

/// `(ρⁿ, uⁿ, pⁿ, tⁿ)` plus the dual-cell densities `ρ_{D_σ}ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeState {
    pub step: usize,
    pub t: f64,
    pub rho: CellScalarField,
    pub u: VelocityField,
    pub p: CellScalarField,
    pub rho_dual: Vec<Vec<f64>>,
    /// `[ρ_min, ρ_max]` of the initial density.
    pub rho_bounds: (f64, f64),
}

impl TimeState {
    /// Initial state from already-discrete data.
    pub fn new(mesh: &MacMesh, rho: CellScalarField, u: VelocityField) -> Self {
        let rho_dual = dual_cell_density(mesh, &rho);
        let rho_bounds = (rho.min(), rho.max());
        Self {
            step: 0,
            t: 0.0,
            p: CellScalarField::zeros(mesh),
            rho,
            u,
            rho_dual,
            rho_bounds,
        }
    }

    /// `ρ⁰ = Π_M ρ₀`, `u⁰ = Π_E u₀`.
    pub fn project(mesh: &MacMesh, problem: &dyn Problem, quad: &Quadrature) -> Result<Self, FieldError> {
        let rho = project_cell(mesh, quad, |x| problem.rho0(x))?;
        let u = project_face_dual(mesh, quad, |i, x| problem.u0(i, x))?;
        Ok(Self::new(mesh, rho, u))
    }
}

pub type VectorFn = Arc<dyn Fn(usize, f64, Point) -> f64 + Send + Sync>;

/// Momentum source.
#[derive(Clone, Default)]
pub enum Forcing {
    #[default]
    None,
    /// Component `i` of `f(t, x)`, projected onto the dual cells.
    Analytic(VectorFn),
    /// Body force `ρ g`, evaluated with the dual-cell density of the
    /// current iterate.
    Gravity([f64; 3]),
}

impl std::fmt::Debug for Forcing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Forcing::None => f.write_str("None"),
            Forcing::Analytic(_) => f.write_str("Analytic(..)"),
            Forcing::Gravity(g) => write!(f, "Gravity({g:?})"),
        }
    }
}

impl Forcing {
    /// Face values of the analytic part at the end of the step (or averaged
    /// over the step). `None` for forcings that depend on the density.
    pub fn analytic_faces(
        &self,
        mesh: &MacMesh,
        quad: &Quadrature,
        mode: ForcingMode,
        t0: f64,
        t1: f64,
    ) -> Result<Option<VelocityField>, FieldError> {
        let Forcing::Analytic(f) = self else {
            return Ok(None);
        };
        let u = match mode {
            ForcingMode::EndPoint => project_face_dual(mesh, quad, |i, x| f(i, t1, x))?,
            ForcingMode::SlabAverage => {
                let (nodes, weights) = crate::quadrature::gauss_legendre(quad.order());
                project_face_dual(mesh, quad, |i, x| {
                    nodes
                        .iter()
                        .zip(&weights)
                        .map(|(z, w)| 0.5 * w * f(i, t0 + 0.5 * (z + 1.0) * (t1 - t0), x))
                        .sum()
                })?
            }
        };
        Ok(Some(u))
    }

    /// `f_E` given the dual-cell density used in the momentum time term.
    pub fn faces(&self, mesh: &MacMesh, analytic: Option<&VelocityField>, rho_dual: &[Vec<f64>]) -> VelocityField {
        match self {
            Forcing::None => VelocityField::zeros(mesh),
            Forcing::Analytic(_) => analytic.cloned().unwrap_or_else(|| VelocityField::zeros(mesh)),
            Forcing::Gravity(g) => VelocityField::from_fn(mesh, |f| rho_dual[f.dir][f.index] * g[f.dir]),
        }
    }
}

/// Problem data: initial density and velocity, forcing and viscosity law.
pub trait Problem: Send + Sync {
    fn rho0(&self, x: Point) -> f64;
    fn u0(&self, i: usize, x: Point) -> f64;
    fn forcing(&self) -> Forcing {
        Forcing::None
    }
    fn viscosity(&self) -> ViscosityLaw;
}
