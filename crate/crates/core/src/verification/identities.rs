use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{CellScalarField, VelocityField};
use crate::mesh::{FaceId, MacMesh};
use crate::operators::{
    convection_apply, diffusion_apply, divergence_mac, dual_cell_density, dual_pair, mass_fluxes, pressure_gradient,
    strain_tensor, trilinear_reconstructed, velocity_gradient, AdvectionScheme, MassFluxSet,
    ViscosityTensorField,
};
use crate::solver::transport_solve;

use super::report::{CheckResult, SuiteReport};
use super::EXACT_TOL;

pub const DIV_GRAD: &str = "div-grad duality";
pub const DIFFUSION: &str = "diffusion duality";
pub const CONVECTION: &str = "convection duality";
pub const TRILINEAR: &str = "b_E two-path equality";
pub const DUAL_MASS: &str = "dual mass balance";

/// The operators under test. Every method defaults to the library
/// implementation; a fixture may override one to check that the suite
/// notices.
pub trait OperatorSuite {
    fn divergence(&self, mesh: &MacMesh, u: &VelocityField) -> CellScalarField {
        divergence_mac(mesh, u)
    }

    fn pressure_gradient(&self, mesh: &MacMesh, p: &CellScalarField) -> VelocityField {
        pressure_gradient(mesh, p)
    }

    fn diffusion(&self, mesh: &MacMesh, mu: &ViscosityTensorField, u: &VelocityField) -> VelocityField {
        diffusion_apply(mesh, mu, u)
    }

    fn fluxes(&self, mesh: &MacMesh, rho: &CellScalarField, u: &VelocityField) -> MassFluxSet {
        mass_fluxes(mesh, rho, u)
    }

    fn convection(&self, mesh: &MacMesh, fluxes: &MassFluxSet, v: &VelocityField, scheme: AdvectionScheme) -> VelocityField {
        convection_apply(mesh, fluxes, v, scheme)
    }
}

/// The library operators.
pub struct StandardOperators;

impl OperatorSuite for StandardOperators {}

pub(crate) fn random_velocity(mesh: &MacMesh, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> VelocityField {
    VelocityField::from_fn(mesh, |_| rng.random_range(lo..=hi))
}

pub(crate) fn random_cells(mesh: &MacMesh, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> CellScalarField {
    CellScalarField::from_fn(mesh, |_| rng.random_range(lo..=hi))
}

fn relative(a: f64, b: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        (a - b).abs() / scale
    } else {
        (a - b).abs()
    }
}

fn face_sum(mesh: &MacMesh, mut f: impl FnMut(FaceId) -> f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut m = 0.0;
    for i in 0..mesh.dim() {
        for face in mesh.interior_faces(i) {
            let v = f(face);
            s += v;
            m += v.abs();
        }
    }
    (s, m)
}

/// `∫ q div u` against `-∫ ∇q · u`.
fn div_grad(mesh: &MacMesh, ops: &dyn OperatorSuite, q: &CellScalarField, u: &VelocityField) -> f64 {
    let div = ops.divergence(mesh, u);
    let mut lhs = 0.0;
    let mut scale = 0.0;
    for k in 0..mesh.n_cells() {
        let t = mesh.cell_volume(k) * q.values()[k] * div.values()[k];
        lhs += t;
        scale += t.abs();
    }
    let g = ops.pressure_gradient(mesh, q);
    let (rhs, m) = face_sum(mesh, |f| -mesh.face_dual_volume(f) * g.get(f) * u.get(f));
    relative(lhs, rhs, scale + m)
}

/// `∫ div_E(μ D(u)) · v` against `-∫ μ D(u) : D(v)`.
fn diffusion(mesh: &MacMesh, ops: &dyn OperatorSuite, mu: &ViscosityTensorField, u: &VelocityField, v: &VelocityField) -> f64 {
    let du = ops.diffusion(mesh, mu, u);
    let (lhs, m1) = face_sum(mesh, |f| mesh.face_dual_volume(f) * du.get(f) * v.get(f));
    let (su, sv) = (strain_tensor(mesh, u), strain_tensor(mesh, v));
    let mut rhs = 0.0;
    let mut m2 = 0.0;
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            let m = mu.dual(i, j);
            for d in 0..mesh.n_duals(i, j) {
                let t = -mesh.dual_volume(i, j, d) * m[d] * su[i][j].values()[d] * sv[i][j].values()[d];
                rhs += t;
                m2 += t.abs();
            }
        }
    }
    relative(lhs, rhs, m1 + m2)
}

/// `∫ C(v) · w` against `-Σ_{i,j} Σ_σ̃ |D_σ̃| ρ_σ̃ û_σ̃ v_σ̃ ð_j w_i`.
fn convection(
    mesh: &MacMesh,
    ops: &dyn OperatorSuite,
    fluxes: &MassFluxSet,
    u: &VelocityField,
    v: &VelocityField,
    w: &VelocityField,
    scheme: AdvectionScheme,
) -> f64 {
    let cv = ops.convection(mesh, fluxes, v, scheme);
    let (lhs, m1) = face_sum(mesh, |f| mesh.face_dual_volume(f) * cv.get(f) * w.get(f));
    let mut rhs = 0.0;
    let mut m2 = 0.0;
    for i in 0..mesh.dim() {
        let grad = velocity_gradient(mesh, w.component(i), i);
        let vi = v.component(i);
        for j in 0..mesh.dim() {
            for d in 0..mesh.n_duals(i, j) {
                let (rho, uh) = dual_pair(mesh, fluxes, u, i, j, d);
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = crate::operators::dual_weight(scheme, fluxes.dual[i][j][d]);
                let val = |f: Option<FaceId>| f.map_or(0.0, |f| vi[f.index]);
                let vs = a * val(lo) + (1.0 - a) * val(hi);
                let t = -mesh.dual_volume(i, j, d) * rho * uh * vs * grad[j].values()[d];
                rhs += t;
                m2 += t.abs();
            }
        }
    }
    relative(lhs, rhs, m1 + m2)
}

/// Flux-sum `b_E` against its dual-grid reconstruction form.
pub(crate) fn two_path(
    mesh: &MacMesh,
    ops: &dyn OperatorSuite,
    fluxes: &MassFluxSet,
    u: &VelocityField,
    v: &VelocityField,
    w: &VelocityField,
    scheme: AdvectionScheme,
) -> f64 {
    let cv = ops.convection(mesh, fluxes, v, scheme);
    let (a, m) = face_sum(mesh, |f| mesh.face_dual_volume(f) * cv.get(f) * w.get(f));
    let b = trilinear_reconstructed(mesh, fluxes, u, v, w, scheme);
    relative(a, b, m.max(b.abs()))
}

/// One implicit transport step from random data, then the balance on every
/// velocity cell with fluxes at the new density.
fn dual_mass(mesh: &MacMesh, ops: &dyn OperatorSuite, rho_n: &CellScalarField, u: &VelocityField, dt: f64) -> f64 {
    let (rho, _) = match transport_solve(mesh, rho_n, u, dt, 1e-13) {
        Ok(r) => r,
        Err(_) => return f64::INFINITY,
    };
    let fluxes = ops.fluxes(mesh, &rho, u);
    let (old, new) = (dual_cell_density(mesh, rho_n), dual_cell_density(mesh, &rho));
    let mut worst = 0.0f64;
    for i in 0..mesh.dim() {
        for f in mesh.interior_faces(i) {
            let vol = mesh.face_dual_volume(f);
            let (a, b) = (new[i][f.index], old[i][f.index]);
            let mut out = 0.0;
            let mut mag = 0.0;
            for df in mesh.dual_faces_of(f).expect("interior face") {
                let g = fluxes.dual[df.id.i][df.id.j][df.id.index];
                out += df.normal * g;
                mag += g.abs();
            }
            let scale = vol * (a.abs() + b.abs()) / dt + mag;
            worst = worst.max(relative(vol * (a - b) / dt, -out, scale));
        }
    }
    worst
}

/// Runs the exact-identity suite with the library operators.
pub fn check_dualities(mesh: &MacMesh, trials: usize, seed: u64) -> SuiteReport {
    check_dualities_with(mesh, trials, seed, &StandardOperators)
}

/// Runs the exact-identity suite against `ops`. Trial fields are i.i.d.
/// uniform in `[-1, 1]`; densities and viscosities in `[0.1, 1]`.
pub fn check_dualities_with(mesh: &MacMesh, trials: usize, seed: u64, ops: &dyn OperatorSuite) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 5];
    let dt = 0.5 * (0..mesh.dim()).flat_map(|a| mesh.widths(a).to_vec()).fold(f64::INFINITY, f64::min);
    for t in 0..trials {
        let scheme = if t % 2 == 0 { AdvectionScheme::Centered } else { AdvectionScheme::Upwind };
        let q = random_cells(mesh, &mut rng, -1.0, 1.0);
        let u = random_velocity(mesh, &mut rng, -1.0, 1.0);
        let v = random_velocity(mesh, &mut rng, -1.0, 1.0);
        let w = random_velocity(mesh, &mut rng, -1.0, 1.0);
        let rho = random_cells(mesh, &mut rng, 0.1, 1.0);
        let mu = ViscosityTensorField::from_cell_values(mesh, random_cells(mesh, &mut rng, 0.1, 1.0).into_values());
        let fluxes = ops.fluxes(mesh, &rho, &u);
        let r = [
            div_grad(mesh, ops, &q, &u),
            diffusion(mesh, ops, &mu, &u, &v),
            convection(mesh, ops, &fluxes, &u, &v, &w, scheme),
            two_path(mesh, ops, &fluxes, &u, &v, &w, scheme),
            dual_mass(mesh, ops, &rho, &u, dt),
        ];
        for (a, b) in worst.iter_mut().zip(r) {
            *a = if b.is_nan() { f64::INFINITY } else { a.max(b) };
        }
    }
    let names = [DIV_GRAD, DIFFUSION, CONVECTION, TRILINEAR, DUAL_MASS];
    SuiteReport {
        suite: "identities".into(),
        seed,
        trials,
        checks: names
            .iter()
            .zip(worst)
            .map(|(n, v)| CheckResult::at_most(n, v, EXACT_TOL))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::AxisPartition;

    #[test]
    fn zero_fields_give_zero_residuals() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[4, 4]).unwrap();
        let z = VelocityField::zeros(&mesh);
        let q = CellScalarField::zeros(&mesh);
        let mu = ViscosityTensorField::constant(&mesh, 1.0);
        let fx = mass_fluxes(&mesh, &CellScalarField::constant(&mesh, 1.0), &z);
        let ops = StandardOperators;
        assert_eq!(div_grad(&mesh, &ops, &q, &z), 0.0);
        assert_eq!(diffusion(&mesh, &ops, &mu, &z, &z), 0.0);
        assert_eq!(convection(&mesh, &ops, &fx, &z, &z, &z, AdvectionScheme::Centered), 0.0);
        assert_eq!(two_path(&mesh, &ops, &fx, &z, &z, &z, AdvectionScheme::Centered), 0.0);
    }

    #[test]
    fn identities_hold_on_a_small_stretched_grid() {
        let mesh = MacMesh::build(vec![
            AxisPartition::stretched(0.0, 1.0, 5, 3.0).unwrap(),
            AxisPartition::new(vec![0.0, 0.1, 0.5, 0.6, 1.2]).unwrap(),
        ])
        .unwrap();
        let rep = check_dualities(&mesh, 10, 7);
        assert!(rep.passed(), "{rep}");
    }

    struct Corrupt;

    impl OperatorSuite for Corrupt {
        fn divergence(&self, mesh: &MacMesh, u: &VelocityField) -> CellScalarField {
            let mut d = divergence_mac(mesh, u);
            d.values_mut()[0] *= 1.01;
            d
        }
    }

    #[test]
    fn corrupted_divergence_is_named() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[4, 4]).unwrap();
        let rep = check_dualities_with(&mesh, 5, 1, &Corrupt);
        assert_eq!(rep.failures(), vec![DIV_GRAD]);
    }
}
