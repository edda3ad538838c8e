use super::linear::{residual_inf, SparseLu};
use crate::error::SolverError;
use crate::fields::{CellScalarField, VelocityField};
use crate::mesh::MacMesh;
use crate::operators::{convection_matrix, diffusion_matrix, AdvectionScheme, MassFluxSet, ViscosityTensorField};
use crate::sparse::{CsrMatrix, Triplets};

/// Data of one linearized momentum/divergence solve.
pub struct MomentumInputs<'a> {
    /// `ρ_{D_σ}^{n+1}` per direction and face.
    pub rho_dual_new: &'a [Vec<f64>],
    /// `ρ_{D_σ}ⁿ`.
    pub rho_dual_old: &'a [Vec<f64>],
    pub u_old: &'a VelocityField,
    /// Fluxes frozen at the current iterate.
    pub fluxes: &'a MassFluxSet,
    pub mu: &'a ViscosityTensorField,
    pub force: &'a VelocityField,
    pub dt: f64,
    pub scheme: AdvectionScheme,
}

/// Velocity block, rows scaled by `|D_σ|`: time term, convection and
/// diffusion.
pub fn velocity_block(mesh: &MacMesh, inp: &MomentumInputs) -> CsrMatrix {
    let n = mesh.n_velocity_dofs();
    let vol: Vec<f64> = (0..n).map(|k| mesh.face_dual_volume(mesh.dof_face(k))).collect();
    let conv = convection_matrix(mesh, inp.fluxes, inp.scheme).scale_rows(&vol);
    let diff = diffusion_matrix(mesh, inp.mu).scale_rows(&vol);
    let mut t = Triplets::new(n, n);
    for (k, v) in vol.iter().enumerate() {
        let f = mesh.dof_face(k);
        t.push(k, k, v * inp.rho_dual_new[f.dir][f.index] / inp.dt);
    }
    for (r, c, v) in conv.iter() {
        t.push(r, c, v);
    }
    for (r, c, v) in diff.iter() {
        t.push(r, c, -v);
    }
    t.to_csr()
}

/// `|D_σ| (f_σ + ρ_{D_σ}ⁿ u_σⁿ / δt)`.
pub fn momentum_rhs(mesh: &MacMesh, inp: &MomentumInputs) -> Vec<f64> {
    (0..mesh.n_velocity_dofs())
        .map(|k| {
            let f = mesh.dof_face(k);
            mesh.face_dual_volume(f)
                * (inp.force.get(f) + inp.rho_dual_old[f.dir][f.index] * inp.u_old.get(f) / inp.dt)
        })
        .collect()
}

/// Pressure coupling `|σ|(p_L - p_K)` (n_dofs × n_cells); its transpose is
/// `-Σ_σ |σ| u_{K,σ}`.
pub fn coupling_block(mesh: &MacMesh) -> CsrMatrix {
    let mut t = Triplets::new(mesh.n_velocity_dofs(), mesh.n_cells());
    for d in 0..mesh.n_velocity_dofs() {
        let f = mesh.dof_face(d);
        let (k, l) = mesh.face_cells(f);
        t.push(d, l.unwrap(), mesh.face_area(f));
        t.push(d, k.unwrap(), -mesh.face_area(f));
    }
    t.to_csr()
}

/// Saddle system `[A B; Bᵀ 0]`. With `pin`, the divergence row of cell 0
/// (redundant, since the rows sum to zero) becomes `p_0 = 0`.
pub fn saddle_system(mesh: &MacMesh, inp: &MomentumInputs, pin: bool) -> (CsrMatrix, Vec<f64>) {
    let nv = mesh.n_velocity_dofs();
    let np = mesh.n_cells();
    let a = velocity_block(mesh, inp);
    let b = coupling_block(mesh);
    let mut t = Triplets::new(nv + np, nv + np);
    for (r, c, v) in a.iter() {
        t.push(r, c, v);
    }
    for (r, c, v) in b.iter() {
        t.push(r, nv + c, v);
        if !(pin && c == 0) {
            t.push(nv + c, r, v);
        }
    }
    if pin {
        t.push(nv, nv, 1.0);
    }
    let mut rhs = momentum_rhs(mesh, inp);
    rhs.resize(nv + np, 0.0);
    (t.to_csr(), rhs)
}

/// Residual of the unpinned system at `(u, p)` relative to the largest
/// individual term, plus that scale.
pub fn momentum_residual(mesh: &MacMesh, inp: &MomentumInputs, u: &VelocityField, p: &CellScalarField) -> (f64, f64) {
    let ud = u.to_dofs(mesh);
    let a = velocity_block(mesh, inp);
    let b = coupling_block(mesh);
    let rhs = momentum_rhs(mesh, inp);
    let au = a.matvec(&ud);
    let bp = b.matvec(p.values());
    let btu = b.transpose().matvec(&ud);
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut r = 0.0f64;
    for k in 0..ud.len() {
        r = r.max((au[k] + bp[k] - rhs[k]).abs());
    }
    r = r.max(inf(&btu));
    // individual term magnitudes
    let vol: Vec<f64> = (0..ud.len()).map(|k| mesh.face_dual_volume(mesh.dof_face(k))).collect();
    let time: Vec<f64> = (0..ud.len())
        .map(|k| {
            let f = mesh.dof_face(k);
            vol[k] * inp.rho_dual_new[f.dir][f.index] * ud[k] / inp.dt
        })
        .collect();
    let conv = convection_matrix(mesh, inp.fluxes, inp.scheme).scale_rows(&vol).matvec(&ud);
    let diff = diffusion_matrix(mesh, inp.mu).scale_rows(&vol).matvec(&ud);
    let flux_scale = (0..ud.len())
        .map(|k| {
            let f = mesh.dof_face(k);
            mesh.face_area(f) * ud[k].abs()
        })
        .fold(0.0f64, f64::max);
    let scale = [inf(&time), inf(&rhs), inf(&conv), inf(&diff), inf(&bp), flux_scale]
        .into_iter()
        .fold(0.0f64, f64::max);
    let rel = if scale > 0.0 { r / scale } else { r };
    (rel, scale)
}

/// Solves the linearized momentum and divergence equations for `(u, p)`
/// with zero-mean `p`; returns the relative linear residual as well.
pub fn momentum_solve(
    mesh: &MacMesh,
    inp: &MomentumInputs,
    linear_tol: f64,
) -> Result<(VelocityField, CellScalarField, f64), SolverError> {
    let nv = mesh.n_velocity_dofs();
    let (m, rhs) = saddle_system(mesh, inp, true);
    let lu = SparseLu::factor(&m).ok_or(SolverError::SingularSaddle)?;
    let x = lu.solve(&rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::SingularSaddle);
    }
    let scale = m
        .iter()
        .map(|(_, c, v)| (v * x[c]).abs())
        .chain(rhs.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max);
    let res = residual_inf(&m, &x, &rhs);
    let rel = if scale > 0.0 { res / scale } else { res };
    if rel > linear_tol {
        return Err(SolverError::LinearResidual {
            residual: rel,
            tolerance: linear_tol,
        });
    }
    let u = VelocityField::from_dofs(mesh, &x[..nv])?;
    let mut p = CellScalarField::new(mesh, x[nv..].to_vec())?;
    p.remove_mean(mesh);
    Ok((u, p, rel))
}
