use std::str::FromStr;

use super::flux::{dual_pair, MassFluxSet};
use super::gradient::velocity_gradient;
use crate::error::OperatorError;
use crate::fields::{reconstruct_face_to_dual, VelocityField};
use crate::mesh::{FaceId, MacMesh};
use crate::sparse::{CsrMatrix, Triplets};

/// Choice of the advected dual value `v_σ̃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AdvectionScheme {
    #[default]
    Centered,
    Upwind,
}

impl FromStr for AdvectionScheme {
    type Err = OperatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "centered" => Ok(Self::Centered),
            "upwind" => Ok(Self::Upwind),
            other => Err(OperatorError::BadScheme(other.to_string())),
        }
    }
}

impl std::fmt::Display for AdvectionScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Centered => "centered",
            Self::Upwind => "upwind",
        })
    }
}

/// Weight of the lower neighbour in `v_σ̃` for a dual flux `g` along `+e_j`.
pub fn dual_weight(scheme: AdvectionScheme, g: f64) -> f64 {
    match scheme {
        AdvectionScheme::Centered => 0.5,
        AdvectionScheme::Upwind => {
            if g >= 0.0 {
                1.0
            } else {
                0.0
            }
        }
    }
}

fn lower_upper(mesh: &MacMesh, f: FaceId, j: usize, upper_side: bool) -> Option<usize> {
    mesh.dual_of_face(f, j, upper_side)
}

/// `(C v)_σ = (1/|D_σ|) Σ_σ̃ F_{σ,σ̃} v_σ̃` on interior faces.
pub fn convection_apply(mesh: &MacMesh, fluxes: &MassFluxSet, v: &VelocityField, scheme: AdvectionScheme) -> VelocityField {
    VelocityField::from_fn(mesh, |f| {
        let i = f.dir;
        let vi = v.component(i);
        let mut s = 0.0;
        for j in 0..mesh.dim() {
            for (upper, normal) in [(false, -1.0), (true, 1.0)] {
                let Some(d) = lower_upper(mesh, f, j, upper) else { continue };
                let g = fluxes.dual[i][j][d];
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = dual_weight(scheme, g);
                let vs = a * lo.map_or(0.0, |x| vi[x.index]) + (1.0 - a) * hi.map_or(0.0, |x| vi[x.index]);
                s += normal * g * vs;
            }
        }
        s / mesh.face_dual_volume(f)
    })
}

/// Assembled convection operator for frozen fluxes.
pub fn convection_matrix(mesh: &MacMesh, fluxes: &MassFluxSet, scheme: AdvectionScheme) -> CsrMatrix {
    let n = mesh.n_velocity_dofs();
    let mut t = Triplets::new(n, n);
    for i in 0..mesh.dim() {
        for j in 0..mesh.dim() {
            for d in 0..mesh.n_duals(i, j) {
                let g = fluxes.dual[i][j][d];
                if g == 0.0 {
                    continue;
                }
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = dual_weight(scheme, g);
                let lo = lo.and_then(|f| mesh.face_dof(f));
                let hi = hi.and_then(|f| mesh.face_dof(f));
                // D_σ below sees +g, D_σ' above sees -g
                for (row, sign) in [(lo, 1.0), (hi, -1.0)] {
                    let Some(r) = row else { continue };
                    if let Some(c) = lo {
                        t.push(r, c, sign * g * a);
                    }
                    if let Some(c) = hi {
                        t.push(r, c, sign * g * (1.0 - a));
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

/// `b_E = Σ_i ∫ (C v)_i w_i` by flux sums.
pub fn trilinear(mesh: &MacMesh, fluxes: &MassFluxSet, v: &VelocityField, w: &VelocityField, scheme: AdvectionScheme) -> f64 {
    let cv = convection_apply(mesh, fluxes, v, scheme);
    weighted_dot(mesh, &cv, w)
}

/// `b_E` from the assembled matrix.
pub fn trilinear_assembled(mesh: &MacMesh, fluxes: &MassFluxSet, v: &VelocityField, w: &VelocityField, scheme: AdvectionScheme) -> f64 {
    let cv = convection_matrix(mesh, fluxes, scheme).matvec(&v.to_dofs(mesh));
    let wd = w.to_dofs(mesh);
    (0..mesh.n_velocity_dofs())
        .map(|k| mesh.face_dual_volume(mesh.dof_face(k)) * cv[k] * wd[k])
        .sum()
}

/// `b_E` through dual-grid reconstructions:
/// `-Σ_{i,j} ∫ (R ρ)(R û_j)(R v_i) ð_j w_i`.
pub fn trilinear_reconstructed(
    mesh: &MacMesh,
    fluxes: &MassFluxSet,
    u: &VelocityField,
    v: &VelocityField,
    w: &VelocityField,
    scheme: AdvectionScheme,
) -> f64 {
    let mut total = 0.0;
    for i in 0..mesh.dim() {
        let grad_w = velocity_gradient(mesh, w.component(i), i);
        for j in 0..mesh.dim() {
            // ρ and û live on direction-j faces, reconstructed onto Ẽ^(j,i)
            let weights = |d: usize| {
                let (a, b) = mesh.dual_neighbors(j, i, d);
                let s = |f: Option<FaceId>| f.map_or((0.0, 0.0), |f| (mesh.face_area(f), fluxes.rho_face[j][f.index]));
                (s(a), s(b))
            };
            let rho_t = reconstruct_face_to_dual(mesh, &fluxes.rho_face[j], j, i, |d| {
                let ((sa, _), (sb, _)) = weights(d);
                sa / (sa + sb)
            });
            let u_t = reconstruct_face_to_dual(mesh, u.component(j), j, i, |d| {
                let ((sa, ra), (sb, rb)) = weights(d);
                let m = sa * ra + sb * rb;
                if m > 0.0 {
                    sa * ra / m
                } else {
                    0.5
                }
            });
            let v_t = reconstruct_face_to_dual(mesh, v.component(i), i, j, |d| dual_weight(scheme, fluxes.dual[i][j][d]));
            for d in 0..mesh.n_duals(i, j) {
                total -= mesh.dual_volume(i, j, d)
                    * rho_t.values()[d]
                    * u_t.values()[d]
                    * v_t.values()[d]
                    * grad_w[j].values()[d];
            }
        }
    }
    total
}

/// `b_E` written as the dual-face sum `-Σ |σ̃| ρ_σ̃ û_σ̃ v_σ̃ (w_σ' - w_σ)`.
pub fn trilinear_dual_sum(
    mesh: &MacMesh,
    fluxes: &MassFluxSet,
    u: &VelocityField,
    v: &VelocityField,
    w: &VelocityField,
    scheme: AdvectionScheme,
) -> f64 {
    let mut total = 0.0;
    for i in 0..mesh.dim() {
        let (vi, wi) = (v.component(i), w.component(i));
        for j in 0..mesh.dim() {
            for d in 0..mesh.n_duals(i, j) {
                let (rho, uh) = dual_pair(mesh, fluxes, u, i, j, d);
                let (lo, hi) = mesh.dual_neighbors(i, j, d);
                let a = dual_weight(scheme, fluxes.dual[i][j][d]);
                let val = |f: Option<FaceId>, x: &[f64]| f.map_or(0.0, |f| x[f.index]);
                let vs = a * val(lo, vi) + (1.0 - a) * val(hi, vi);
                total -= mesh.dual_area(i, j, d) * rho * uh * vs * (val(hi, wi) - val(lo, wi));
            }
        }
    }
    total
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
