use crate::fields::{CellScalarField, VelocityField};
use crate::mesh::{FaceId, MacMesh};
use crate::sparse::{CsrMatrix, Triplets};

/// `(div u)_K = (1/|K|) Σ_σ |σ| u_{K,σ}`.
pub fn divergence_mac(mesh: &MacMesh, u: &VelocityField) -> CellScalarField {
    CellScalarField::from_fn(mesh, |k| {
        let s: f64 = mesh
            .cell_faces(k)
            .into_iter()
            .map(|(f, sign)| sign * mesh.face_area(f) * u.get(f))
            .sum();
        s / mesh.cell_volume(k)
    })
}

/// `(∇p)_σ = (|σ|/|D_σ|)(p_L - p_K)` with `K` below `σ` along its normal;
/// zero on boundary faces.
pub fn pressure_gradient(mesh: &MacMesh, p: &CellScalarField) -> VelocityField {
    let pv = p.values();
    VelocityField::from_fn(mesh, |f| {
        let (k, l) = mesh.face_cells(f);
        let (k, l) = (k.unwrap(), l.unwrap());
        mesh.face_area(f) / mesh.face_dual_volume(f) * (pv[l] - pv[k])
    })
}

/// Divergence acting on velocity unknowns: `n_cells × n_dofs`.
pub fn divergence_matrix(mesh: &MacMesh) -> CsrMatrix {
    let mut t = Triplets::new(mesh.n_cells(), mesh.n_velocity_dofs());
    for k in 0..mesh.n_cells() {
        for (f, sign) in mesh.cell_faces(k) {
            if let Some(d) = mesh.face_dof(f) {
                t.push(k, d, sign * mesh.face_area(f) / mesh.cell_volume(k));
            }
        }
    }
    t.to_csr()
}

/// Pressure gradient onto velocity unknowns: `n_dofs × n_cells`.
pub fn pressure_gradient_matrix(mesh: &MacMesh) -> CsrMatrix {
    let mut t = Triplets::new(mesh.n_velocity_dofs(), mesh.n_cells());
    for d in 0..mesh.n_velocity_dofs() {
        let f: FaceId = mesh.dof_face(d);
        let (k, l) = mesh.face_cells(f);
        let c = mesh.face_area(f) / mesh.face_dual_volume(f);
        t.push(d, l.unwrap(), c);
        t.push(d, k.unwrap(), -c);
    }
    t.to_csr()
}
