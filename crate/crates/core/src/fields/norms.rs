use super::{CellScalarField, DualGridField, VelocityField};
use crate::mesh::MacMesh;

fn weighted_lp(values: &[f64], weights: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    s.powf(1.0 / p)
}

/// `‖q‖_{L^p}` of a cellwise-constant function; `p = ∞` is allowed.
pub fn cell_lp(mesh: &MacMesh, q: &CellScalarField, p: f64) -> f64 {
    weighted_lp(q.values(), mesh.cell_volumes().iter().cloned(), p)
}

/// `L^p` norm of face values of direction `i`, piecewise constant on `D_σ`.
pub fn face_lp(mesh: &MacMesh, i: usize, v: &[f64], p: f64) -> f64 {
    weighted_lp(v, mesh.face_dual_volumes(i).iter().cloned(), p)
}

/// `L^p` norm of a dual-dual field, piecewise constant on `D_σ̃`.
pub fn dual_lp(mesh: &MacMesh, g: &DualGridField, p: f64) -> f64 {
    let (i, j) = (g.i, g.j);
    weighted_lp(
        g.values(),
        (0..mesh.n_duals(i, j)).map(|d| mesh.dual_volume(i, j, d)),
        p,
    )
}

pub fn velocity_l2(mesh: &MacMesh, u: &VelocityField) -> f64 {
    (0..mesh.dim())
        .map(|i| face_lp(mesh, i, u.component(i), 2.0).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// `‖u‖_{1,E,0}`: sum over every dual face of `(|σ̃|/d_σ̃)` times the squared
/// jump, with the missing side of a wall dual face taken as zero.
pub fn norm_h1(mesh: &MacMesh, u: &VelocityField) -> f64 {
    let mut s = 0.0;
    for i in 0..mesh.dim() {
        let ui = u.component(i);
        for j in 0..mesh.dim() {
            for d in 0..mesh.n_duals(i, j) {
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = lo.map_or(0.0, |f| ui[f.index]);
                let b = hi.map_or(0.0, |f| ui[f.index]);
                let dist = mesh.dual_spacing(i, j, d);
                s += mesh.dual_area(i, j, d) / dist * (b - a).powi(2);
            }
        }
    }
    s.sqrt()
}
