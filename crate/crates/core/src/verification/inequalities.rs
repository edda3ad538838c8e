use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{norm_h1, velocity_l2, VelocityField};
use crate::mesh::MacMesh;
use crate::operators::{
    divergence_mac, full_gradient, mass_fluxes, strain_tensor, trilinear, trilinear_reconstructed, viscosity_tensor,
    AdvectionScheme, ViscosityLaw,
};

use super::identities::{random_cells, random_velocity, two_path as two_path_residual, StandardOperators};
use super::report::{CheckResult, SuiteReport};
use super::EXACT_TOL;

pub const KORN: &str = "Korn ratio";
pub const KORN_IDENTITY: &str = "grad-transpose identity";
pub const POINCARE: &str = "Poincare ratio";
pub const MU_LOWER: &str = "viscosity lower bound";
pub const MU_UPPER: &str = "viscosity upper bound";
pub const B_FINITE: &str = "b_E finite";
pub const B_TWO_PATH: &str = "b_E two-path";

/// `‖D(u)‖_{L²}`.
pub fn strain_norm(mesh: &MacMesh, u: &VelocityField) -> f64 {
    let s = strain_tensor(mesh, u);
    let mut t = 0.0;
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            for (d, v) in s[i][j].values().iter().enumerate() {
                t += mesh.dual_volume(i, j, d) * v * v;
            }
        }
    }
    t.sqrt()
}

/// `‖u‖_{1,E,0} / ‖D(u)‖`, zero for `u = 0`.
pub fn korn_ratio(mesh: &MacMesh, u: &VelocityField) -> f64 {
    let d = strain_norm(mesh, u);
    let g = norm_h1(mesh, u);
    if g == 0.0 {
        0.0
    } else {
        g / d
    }
}

/// `‖u‖_{L²} / ‖u‖_{1,E,0}`, zero for `u = 0`.
pub fn poincare_ratio(mesh: &MacMesh, u: &VelocityField) -> f64 {
    let g = norm_h1(mesh, u);
    if g == 0.0 {
        0.0
    } else {
        velocity_l2(mesh, u) / g
    }
}

/// Relative residual of `Σ_{ij} ∫ ð_j u_i ð_i u_j = ∫ (div u)²`.
pub fn grad_transpose_residual(mesh: &MacMesh, u: &VelocityField) -> f64 {
    let g = full_gradient(mesh, u);
    let mut lhs = 0.0;
    let mut scale = 0.0;
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            for d in 0..mesh.n_duals(i, j) {
                let t = mesh.dual_volume(i, j, d) * g[i][j].values()[d] * g[j][i].values()[d];
                lhs += t;
                scale += t.abs();
            }
        }
    }
    let div = divergence_mac(mesh, u);
    let rhs: f64 = (0..mesh.n_cells()).map(|k| mesh.cell_volume(k) * div.values()[k].powi(2)).sum();
    let scale = scale.max(rhs);
    if scale > 0.0 {
        (lhs - rhs).abs() / scale
    } else {
        0.0
    }
}

fn random_law(rng: &mut ChaCha8Rng, t: usize) -> ViscosityLaw {
    if t.is_multiple_of(2) {
        ViscosityLaw::Linear {
            a: rng.random_range(0.2..1.0),
            b: rng.random_range(-0.05..0.5),
        }
    } else {
        let rho = vec![0.5, 1.0, 2.0, 3.0];
        let mu = rho.iter().map(|_| rng.random_range(0.05..2.0)).collect();
        ViscosityLaw::Table { rho, mu }
    }
}

/// Korn and Poincaré ratios over random velocity fields, viscosity tensor
/// bounds over random densities and laws, and finiteness plus two-path
/// agreement of `b_E`.
pub fn check_inequalities(mesh: &MacMesh, trials: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut korn, mut ident, mut poin) = (0.0f64, 0.0f64, 0.0f64);
    let (mut lower, mut upper) = (0.0f64, 0.0f64);
    let mut finite = true;
    let mut two_path = 0.0f64;
    for t in 0..trials {
        let u = random_velocity(mesh, &mut rng, -1.0, 1.0);
        korn = korn.max(korn_ratio(mesh, &u));
        poin = poin.max(poincare_ratio(mesh, &u));
        ident = ident.max(grad_transpose_residual(mesh, &u));

        let (rmin, rmax) = (0.5, 3.0);
        let rho = random_cells(mesh, &mut rng, rmin, rmax);
        let law = random_law(&mut rng, t);
        let (mlo, mhi) = law.range(rmin, rmax).expect("positive law");
        let mu = viscosity_tensor(mesh, &rho, &law).expect("positive law");
        lower = lower.max((mlo - mu.min()) / mlo);
        upper = upper.max((mu.max() - mhi) / mhi);

        let v = random_velocity(mesh, &mut rng, -1.0, 1.0);
        let w = random_velocity(mesh, &mut rng, -1.0, 1.0);
        let fx = mass_fluxes(mesh, &rho, &u);
        let scheme = if t % 2 == 0 { AdvectionScheme::Centered } else { AdvectionScheme::Upwind };
        let a = trilinear(mesh, &fx, &v, &w, scheme);
        let b = trilinear_reconstructed(mesh, &fx, &u, &v, &w, scheme);
        finite &= a.is_finite() && b.is_finite();
        two_path = two_path.max(two_path_residual(mesh, &StandardOperators, &fx, &u, &v, &w, scheme));
    }
    let diam = mesh.diameter();
    SuiteReport {
        suite: "inequalities".into(),
        seed,
        trials,
        checks: vec![
            CheckResult::at_most(KORN, korn, 2f64.sqrt() + EXACT_TOL),
            CheckResult::at_most(KORN_IDENTITY, ident, EXACT_TOL),
            CheckResult::at_most(POINCARE, poin, diam + EXACT_TOL),
            CheckResult::at_most(MU_LOWER, lower, EXACT_TOL),
            CheckResult::at_most(MU_UPPER, upper, EXACT_TOL),
            CheckResult::at_most(B_FINITE, if finite { 0.0 } else { f64::INFINITY }, 0.0),
            CheckResult::at_most(B_TWO_PATH, two_path, EXACT_TOL),
        ],
    }
}
