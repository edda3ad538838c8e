use super::linear::{norm1, residual_inf, SparseLu};
use crate::error::SolverError;
use crate::fields::{CellScalarField, VelocityField};
use crate::mesh::MacMesh;
use crate::sparse::{CsrMatrix, Triplets};

/// Implicit upwind mass balance `(ρ_K - ρ_Kⁿ)/δt + (1/|K|) Σ_σ F_{K,σ}(ρ, u) = 0`
/// as a matrix in `ρ`, rows multiplied by `δt`.
pub fn transport_matrix(mesh: &MacMesh, u: &VelocityField, dt: f64) -> CsrMatrix {
    let n = mesh.n_cells();
    let mut t = Triplets::new(n, n);
    for k in 0..n {
        let vol = mesh.cell_volume(k);
        t.push(k, k, 1.0);
        for (f, sign) in mesh.cell_faces(k) {
            let out = sign * u.get(f);
            if out == 0.0 {
                continue;
            }
            let c = dt * mesh.face_area(f) * out / vol;
            if out >= 0.0 {
                t.push(k, k, c);
            } else {
                let (lo, hi) = mesh.face_cells(f);
                let l = if lo == Some(k) { hi } else { lo };
                t.push(k, l.expect("interior face carries the flux"), c);
            }
        }
    }
    t.to_csr()
}

/// Density at the end of the step; also returns the relative residual of
/// the linear solve.
pub fn transport_solve(
    mesh: &MacMesh,
    rho_n: &CellScalarField,
    u: &VelocityField,
    dt: f64,
    linear_tol: f64,
) -> Result<(CellScalarField, f64), SolverError> {
    let a = transport_matrix(mesh, u, dt);
    let b = rho_n.values().to_vec();
    let lu = SparseLu::factor(&a).ok_or(SolverError::SingularTransport {
        condition: f64::INFINITY,
    })?;
    let x = lu.solve(&b);
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let res = residual_inf(&a, &x, &b) / scale;
    if !res.is_finite() || res > linear_tol || x.iter().any(|v| !v.is_finite()) {
        let condition = norm1(&a) * lu.inverse_norm1_estimate();
        return Err(SolverError::SingularTransport { condition });
    }
    Ok((CellScalarField::new(mesh, x)?, res))
}
