use crate::fields::{DualGridField, VelocityField};
use crate::mesh::MacMesh;

/// Sparse linear form over velocity unknowns: `(dof, coefficient)`.
pub type LinearForm = Vec<(usize, f64)>;

/// `ð_j u_i` on each dual-dual cell of `Ẽ^(i,j)`, `j = 0..d`:
/// `(u_upper - u_lower) / d_σ̃`, a wall side counting as zero.
pub fn velocity_gradient(mesh: &MacMesh, ui: &[f64], i: usize) -> Vec<DualGridField> {
    (0..mesh.dim())
        .map(|j| {
            let mut g = DualGridField::zeros(mesh, i, j);
            for (d, o) in g.values_mut().iter_mut().enumerate() {
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = lo.map_or(0.0, |f| ui[f.index]);
                let b = hi.map_or(0.0, |f| ui[f.index]);
                *o = (b - a) / mesh.dual_spacing(i, j, d);
            }
            g
        })
        .collect()
}

/// Full discrete gradient: `out[i][j] = ð_j u_i`.
pub fn full_gradient(mesh: &MacMesh, u: &VelocityField) -> Vec<Vec<DualGridField>> {
    (0..mesh.dim())
        .map(|i| velocity_gradient(mesh, u.component(i), i))
        .collect()
}

/// `D_ij = ½(ð_j u_i + ð_i u_j)` stored on `Ẽ^(i,j)`.
pub fn strain_tensor(mesh: &MacMesh, u: &VelocityField) -> Vec<Vec<DualGridField>> {
    let g = full_gradient(mesh, u);
    (0..mesh.dim())
        .map(|i| {
            (0..mesh.dim())
                .map(|j| {
                    let vals = g[i][j]
                        .values()
                        .iter()
                        .zip(g[j][i].values())
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    DualGridField::new(mesh, i, j, vals).expect("shared lattice")
                })
                .collect()
        })
        .collect()
}

/// Linear form of `ð_j u_i` on dual cell `d` of `Ẽ^(i,j)`.
pub fn gradient_form(mesh: &MacMesh, i: usize, j: usize, d: usize) -> LinearForm {
    let (lo, hi) = mesh.dual_neighbors(i, j, d);
    let h = mesh.dual_spacing(i, j, d);
    let mut out = Vec::with_capacity(2);
    if let Some(dof) = hi.and_then(|f| mesh.face_dof(f)) {
        out.push((dof, 1.0 / h));
    }
    if let Some(dof) = lo.and_then(|f| mesh.face_dof(f)) {
        out.push((dof, -1.0 / h));
    }
    out
}

/// Linear form of `D_ij` on dual cell `d`.
pub fn strain_form(mesh: &MacMesh, i: usize, j: usize, d: usize) -> LinearForm {
    if i == j {
        return gradient_form(mesh, i, i, d);
    }
    let mut out: LinearForm = gradient_form(mesh, i, j, d)
        .into_iter()
        .chain(gradient_form(mesh, j, i, d))
        .map(|(k, c)| (k, 0.5 * c))
        .collect();
    out.sort_by_key(|e| e.0);
    out
}
