use super::{CellScalarField, DualGridField};
use crate::mesh::{FaceId, MacMesh};

/// Cell values to direction-`i` faces with weights `α_σ = |D_{K,σ}|/|D_σ|`;
/// a boundary face copies its only neighbour.
pub fn reconstruct_cell_to_face(mesh: &MacMesh, q: &CellScalarField, i: usize) -> Vec<f64> {
    let qv = q.values();
    (0..mesh.n_faces(i))
        .map(|index| {
            let f = FaceId { dir: i, index };
            match mesh.face_cells(f) {
                (Some(k), Some(l)) => {
                    let (dk, dl) = mesh.face_half_volumes(f);
                    let a = dk / (dk + dl);
                    a * qv[k] + (1.0 - a) * qv[l]
                }
                (Some(k), None) | (None, Some(k)) => qv[k],
                (None, None) => unreachable!("every face touches a cell"),
            }
        })
        .collect()
}

/// Arithmetic mean of the two direction-`i` faces of each cell.
pub fn reconstruct_face_to_cell(mesh: &MacMesh, v: &[f64], i: usize) -> CellScalarField {
    let lat = mesh.face_lattice(i);
    CellScalarField::from_fn(mesh, |k| {
        let m = mesh.cells().multi(k);
        let mut up = m;
        up[i] += 1;
        0.5 * (v[lat.index(m)] + v[lat.index(up)])
    })
}

/// `R_Ẽ^(i,j)`: direction-`i` face values to the dual-dual cells `Ẽ^(i,j)`,
/// `α v_σ + (1 - α) v_σ'` with `σ`, `σ'` the lower and upper neighbours along
/// `e_j`. A missing neighbour (wall dual face) contributes zero.
pub fn reconstruct_face_to_dual(
    mesh: &MacMesh,
    v: &[f64],
    i: usize,
    j: usize,
    alpha: impl Fn(usize) -> f64,
) -> DualGridField {
    let mut out = DualGridField::zeros(mesh, i, j);
    for (d, o) in out.values_mut().iter_mut().enumerate() {
        let (lo, hi) = mesh.dual_neighbors(i, j, d);
        let a = alpha(d);
        *o = a * lo.map_or(0.0, |f| v[f.index]) + (1.0 - a) * hi.map_or(0.0, |f| v[f.index]);
    }
    out
}

/// Centered reconstruction, `α = ½` everywhere including wall dual faces.
pub fn reconstruct_face_to_dual_centered(mesh: &MacMesh, v: &[f64], i: usize, j: usize) -> DualGridField {
    reconstruct_face_to_dual(mesh, v, i, j, |_| 0.5)
}

/// Bound on `(|D_σ̃| + |D_σ̃'|) / |D_σ|` for the two dual-dual cells flanking
/// a dual cell along any axis, in terms of the mesh ratio `η`.
pub fn reconstruction_constant(eta: f64) -> f64 {
    1.0 + eta * eta
}
