use super::gradient::{strain_form, strain_tensor};
use super::viscosity::ViscosityTensorField;
use crate::fields::VelocityField;
use crate::mesh::MacMesh;
use crate::sparse::{CsrMatrix, Triplets};

/// `div_E(μ D(u))` on interior faces:
/// `(1/|D_σ|) Σ_σ̃ |σ̃| μ_σ̃ D_ij(u) (n_{σ,σ̃}·e_j)`.
pub fn diffusion_apply(mesh: &MacMesh, mu: &ViscosityTensorField, u: &VelocityField) -> VelocityField {
    let strain = strain_tensor(mesh, u);
    VelocityField::from_fn(mesh, |f| {
        let faces = mesh.dual_faces_of(f).expect("interior face");
        let s: f64 = faces
            .iter()
            .map(|df| {
                let (i, j, d) = (df.id.i, df.id.j, df.id.index);
                mesh.dual_area(i, j, d) * mu.dual(i, j)[d] * strain[i][j].values()[d] * df.normal
            })
            .sum();
        s / mesh.face_dual_volume(f)
    })
}

/// `∫ μ D(u) : D(u)`.
pub fn viscous_dissipation(mesh: &MacMesh, mu: &ViscosityTensorField, u: &VelocityField) -> f64 {
    let strain = strain_tensor(mesh, u);
    let mut s = 0.0;
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            let m = mu.dual(i, j);
            for (d, v) in strain[i][j].values().iter().enumerate() {
                s += mesh.dual_volume(i, j, d) * m[d] * v * v;
            }
        }
    }
    s
}

/// Assembled `div_E(μ D(·))` on velocity unknowns, built from the strain
/// forms as `-(1/|D_σ|) Σ |D_σ̃| μ_σ̃ D_ij[σ] D_ij[τ]`.
pub fn diffusion_matrix(mesh: &MacMesh, mu: &ViscosityTensorField) -> CsrMatrix {
    let n = mesh.n_velocity_dofs();
    let mut t = Triplets::new(n, n);
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            let m = mu.dual(i, j);
            for d in 0..mesh.n_duals(i, j) {
                let form = strain_form(mesh, i, j, d);
                let w = mesh.dual_volume(i, j, d) * m[d];
                for &(r, a) in &form {
                    for &(c, b) in &form {
                        t.push(r, c, -w * a * b);
                    }
                }
            }
        }
    }
    let inv: Vec<f64> = (0..n)
        .map(|k| 1.0 / mesh.face_dual_volume(mesh.dof_face(k)))
        .collect();
    t.to_csr().scale_rows(&inv)
}
