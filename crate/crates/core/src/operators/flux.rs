use crate::fields::{reconstruct_cell_to_face, CellScalarField, VelocityField};
use crate::mesh::{DualCase, FaceId, MacMesh};

/// Primal and dual mass fluxes. Fluxes are stored once per face, oriented
/// along `+e_i` (primal) or `+e_j` (dual); the outward fluxes of a given
/// cell follow by multiplying with the normal sign.
#[derive(Clone, Debug, PartialEq)]
pub struct MassFluxSet {
    /// Upwind density `ρ_σ` per direction and face.
    pub rho_face: Vec<Vec<f64>>,
    /// `|σ| ρ_σ u_σ` per direction and face.
    pub primal: Vec<Vec<f64>>,
    /// Dual flux through each dual-dual cell face, indexed `[i][j][σ̃]`.
    pub dual: Vec<Vec<Vec<f64>>>,
}

impl MassFluxSet {
    /// `F_{K,σ}`.
    pub fn outward(&self, mesh: &MacMesh, k: usize, f: FaceId) -> f64 {
        let (lo, _) = mesh.face_cells(f);
        let g = self.primal[f.dir][f.index];
        if lo == Some(k) {
            g
        } else {
            -g
        }
    }

    /// `Σ_σ F_{K,σ}`.
    pub fn net_outflow(&self, mesh: &MacMesh, k: usize) -> f64 {
        mesh.cell_faces(k)
            .into_iter()
            .map(|(f, sign)| sign * self.primal[f.dir][f.index])
            .sum()
    }

    /// `Σ_σ̃ F_{σ,σ̃}` over the dual faces of `D_σ`.
    pub fn dual_net_outflow(&self, mesh: &MacMesh, f: FaceId) -> f64 {
        mesh.dual_faces_of(f)
            .expect("valid face")
            .iter()
            .map(|df| df.normal * self.dual[df.id.i][df.id.j][df.id.index])
            .sum()
    }
}

/// Upwind face densities and primal fluxes. At zero velocity the lower
/// cell is taken; a boundary face takes its only cell.
pub fn primal_fluxes(mesh: &MacMesh, rho: &CellScalarField, u: &VelocityField) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let r = rho.values();
    let mut rho_face = Vec::with_capacity(mesh.dim());
    let mut primal = Vec::with_capacity(mesh.dim());
    for i in 0..mesh.dim() {
        let ui = u.component(i);
        let mut rf = Vec::with_capacity(mesh.n_faces(i));
        let mut g = Vec::with_capacity(mesh.n_faces(i));
        for (index, &v) in ui.iter().enumerate() {
            let f = FaceId { dir: i, index };
            let rs = match mesh.face_cells(f) {
                (Some(k), Some(l)) => {
                    if v >= 0.0 {
                        r[k]
                    } else {
                        r[l]
                    }
                }
                (Some(k), None) | (None, Some(k)) => r[k],
                (None, None) => unreachable!(),
            };
            rf.push(rs);
            g.push(mesh.face_area(f) * rs * v);
        }
        rho_face.push(rf);
        primal.push(g);
    }
    (rho_face, primal)
}

/// Dual fluxes from primal ones: half the sum of the two primal fluxes the
/// dual face straddles (parallel: the two faces of the enclosing cell;
/// transverse: the two perpendicular faces `τ`, `τ'`).
pub fn dual_fluxes(mesh: &MacMesh, primal: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let dim = mesh.dim();
    let mut out = vec![vec![Vec::new(); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i][j] = (0..mesh.n_duals(i, j))
                .map(|d| {
                    let (a, b) = if i == j {
                        mesh.dual_neighbors(i, i, d)
                    } else {
                        mesh.dual_transverse_faces(i, j, d)
                    };
                    let ga = a.map_or(0.0, |f| primal[f.dir][f.index]);
                    let gb = b.map_or(0.0, |f| primal[f.dir][f.index]);
                    0.5 * (ga + gb)
                })
                .collect();
        }
    }
    out
}

pub fn mass_fluxes(mesh: &MacMesh, rho: &CellScalarField, u: &VelocityField) -> MassFluxSet {
    let (rho_face, primal) = primal_fluxes(mesh, rho, u);
    let dual = dual_fluxes(mesh, &primal);
    MassFluxSet { rho_face, primal, dual }
}

/// `(ρ_σ̃, û_σ̃)` with `F_{σ,σ̃} = |σ̃| ρ_σ̃ û_σ̃ (n·e_j)`.
pub fn dual_pair(mesh: &MacMesh, fluxes: &MassFluxSet, u: &VelocityField, i: usize, j: usize, d: usize) -> (f64, f64) {
    let (a, b) = if i == j {
        mesh.dual_neighbors(i, i, d)
    } else {
        mesh.dual_transverse_faces(i, j, d)
    };
    let side = |f: Option<FaceId>| match f {
        Some(f) => (mesh.face_area(f), fluxes.rho_face[f.dir][f.index], u.get(f)),
        None => (0.0, 0.0, 0.0),
    };
    let (sa, ra, ua) = side(a);
    let (sb, rb, ub) = side(b);
    let rho = (sa * ra + sb * rb) / (sa + sb);
    let m = sa * ra + sb * rb;
    let uhat = if m > 0.0 { (sa * ra * ua + sb * rb * ub) / m } else { 0.0 };
    (rho, uhat)
}

/// `ρ_{D_σ}` per direction: `|D_σ| ρ_{D_σ} = |D_{K,σ}| ρ_K + |D_{L,σ}| ρ_L`.
pub fn dual_cell_density(mesh: &MacMesh, rho: &CellScalarField) -> Vec<Vec<f64>> {
    (0..mesh.dim()).map(|i| reconstruct_cell_to_face(mesh, rho, i)).collect()
}

/// Dual flux seen from `D_σ` through one of its dual faces, computed from
/// the primal fluxes of the cells `σ` touches.
pub fn dual_flux_from_face(mesh: &MacMesh, fluxes: &MassFluxSet, f: FaceId, df: &crate::mesh::DualFace) -> f64 {
    match df.case {
        DualCase::Parallel { cell } => {
            let faces = mesh.cell_faces(cell);
            let (sa, sb) = (faces[2 * f.dir].0, faces[2 * f.dir + 1].0);
            let (s, s2) = if sa == f { (sa, sb) } else { (sb, sa) };
            0.5 * (-fluxes.outward(mesh, cell, s) + fluxes.outward(mesh, cell, s2))
        }
        DualCase::Transverse { tau, tau_prime } => {
            let (k, l) = mesh.face_cells(f);
            let fk = match (tau, k) {
                (Some(t), Some(k)) => fluxes.outward(mesh, k, t),
                _ => 0.0,
            };
            let fl = match (tau_prime, l) {
                (Some(t), Some(l)) => fluxes.outward(mesh, l, t),
                _ => 0.0,
            };
            0.5 * (fk + fl)
        }
    }
}
