//! Discrete function spaces on the MAC grid.
//!
//! * [`CellScalarField`]: one value per primal cell (`L_M`).
//! * [`VelocityField`]: one value per face of each direction, with exterior
//!   faces held at zero (`H_E,0`).
//! * [`DualGridField`]: one value per dual-dual cell of a fixed `(i, j)`.

mod norms;
mod projection;
mod reconstruct;

pub use norms::*;
pub use projection::*;
pub use reconstruct::*;

use crate::error::FieldError;
use crate::mesh::{FaceId, MacMesh};

#[derive(Clone, Debug, PartialEq)]
pub struct CellScalarField {
    values: Vec<f64>,
}

impl CellScalarField {
    pub fn new(mesh: &MacMesh, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != mesh.n_cells() {
            return Err(FieldError::LengthMismatch {
                expected: mesh.n_cells(),
                got: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(mesh: &MacMesh) -> Self {
        Self::constant(mesh, 0.0)
    }

    pub fn constant(mesh: &MacMesh, c: f64) -> Self {
        Self {
            values: vec![c; mesh.n_cells()],
        }
    }

    pub fn from_fn(mesh: &MacMesh, f: impl FnMut(usize) -> f64) -> Self {
        Self {
            values: (0..mesh.n_cells()).map(f).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Σ |K| q_K`.
    pub fn integral(&self, mesh: &MacMesh) -> f64 {
        self.values
            .iter()
            .zip(mesh.cell_volumes())
            .map(|(q, v)| q * v)
            .sum()
    }

    pub fn mean(&self, mesh: &MacMesh) -> f64 {
        self.integral(mesh) / mesh.domain_volume()
    }

    pub fn remove_mean(&mut self, mesh: &MacMesh) {
        let m = self.mean(mesh);
        for q in &mut self.values {
            *q -= m;
        }
    }

    /// Zero-mean check, relative to the discrete `L²` norm.
    pub fn has_zero_mean(&self, mesh: &MacMesh) -> bool {
        let scale = cell_lp(mesh, self, 2.0).max(f64::MIN_POSITIVE);
        self.integral(mesh).abs() <= 1e-12 * scale * mesh.domain_volume().sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    comps: Vec<Vec<f64>>,
}

impl VelocityField {
    pub fn zeros(mesh: &MacMesh) -> Self {
        Self {
            comps: (0..mesh.dim()).map(|i| vec![0.0; mesh.n_faces(i)]).collect(),
        }
    }

    /// Builds a field from full per-direction face arrays. Exterior entries
    /// are overwritten with zero.
    pub fn from_components(mesh: &MacMesh, comps: Vec<Vec<f64>>) -> Result<Self, FieldError> {
        if comps.len() != mesh.dim() {
            return Err(FieldError::LengthMismatch {
                expected: mesh.dim(),
                got: comps.len(),
            });
        }
        let mut out = Self { comps };
        for i in 0..mesh.dim() {
            if out.comps[i].len() != mesh.n_faces(i) {
                return Err(FieldError::LengthMismatch {
                    expected: mesh.n_faces(i),
                    got: out.comps[i].len(),
                });
            }
        }
        out.clear_exterior(mesh);
        Ok(out)
    }

    /// Faces evaluated through `f(face)`; exterior faces are skipped.
    pub fn from_fn(mesh: &MacMesh, mut f: impl FnMut(FaceId) -> f64) -> Self {
        let mut out = Self::zeros(mesh);
        for i in 0..mesh.dim() {
            for face in mesh.interior_faces(i) {
                out.comps[i][face.index] = f(face);
            }
        }
        out
    }

    pub fn from_dofs(mesh: &MacMesh, dofs: &[f64]) -> Result<Self, FieldError> {
        if dofs.len() != mesh.n_velocity_dofs() {
            return Err(FieldError::LengthMismatch {
                expected: mesh.n_velocity_dofs(),
                got: dofs.len(),
            });
        }
        let mut out = Self::zeros(mesh);
        for (d, v) in dofs.iter().enumerate() {
            let f = mesh.dof_face(d);
            out.comps[f.dir][f.index] = *v;
        }
        Ok(out)
    }

    pub fn to_dofs(&self, mesh: &MacMesh) -> Vec<f64> {
        (0..mesh.n_velocity_dofs())
            .map(|d| {
                let f = mesh.dof_face(d);
                self.comps[f.dir][f.index]
            })
            .collect()
    }

    fn clear_exterior(&mut self, mesh: &MacMesh) {
        for i in 0..mesh.dim() {
            for (idx, v) in self.comps[i].iter_mut().enumerate() {
                if !mesh.face_is_interior(FaceId { dir: i, index: idx }) {
                    *v = 0.0;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.comps[i]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn get(&self, f: FaceId) -> f64 {
        self.comps[f.dir][f.index]
    }

    /// Sets an interior face value; exterior faces stay at zero.
    pub fn set(&mut self, mesh: &MacMesh, f: FaceId, value: f64) {
        if mesh.face_is_interior(f) {
            self.comps[f.dir][f.index] = value;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn exterior_is_zero(&self, mesh: &MacMesh) -> bool {
        (0..mesh.dim()).all(|i| {
            self.comps[i]
                .iter()
                .enumerate()
                .all(|(idx, v)| mesh.face_is_interior(FaceId { dir: i, index: idx }) || *v == 0.0)
        })
    }

    pub fn axpy(&mut self, a: f64, other: &VelocityField) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in x.iter_mut().zip(y) {
                *x += a * y;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualGridField {
    pub i: usize,
    pub j: usize,
    values: Vec<f64>,
}

impl DualGridField {
    pub fn new(mesh: &MacMesh, i: usize, j: usize, values: Vec<f64>) -> Result<Self, FieldError> {
        let n = mesh.n_duals(i, j);
        if values.len() != n {
            return Err(FieldError::LengthMismatch {
                expected: n,
                got: values.len(),
            });
        }
        Ok(Self { i, j, values })
    }

    pub fn zeros(mesh: &MacMesh, i: usize, j: usize) -> Self {
        Self {
            i,
            j,
            values: vec![0.0; mesh.n_duals(i, j)],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_dofs_roundtrip_and_dirichlet() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[3, 2]).unwrap();
        let comps = vec![vec![1.0; mesh.n_faces(0)], vec![2.0; mesh.n_faces(1)]];
        let u = VelocityField::from_components(&mesh, comps).unwrap();
        assert!(u.exterior_is_zero(&mesh));
        let d = u.to_dofs(&mesh);
        assert_eq!(d.len(), 2 * 2 + 3);
        assert_eq!(VelocityField::from_dofs(&mesh, &d).unwrap(), u);
    }

    #[test]
    fn length_checks() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        assert!(CellScalarField::new(&mesh, vec![0.0; 3]).is_err());
        assert!(DualGridField::new(&mesh, 0, 1, vec![0.0; 9]).is_ok());
        assert!(VelocityField::from_dofs(&mesh, &[0.0]).is_err());
    }

    #[test]
    fn zero_mean_flag() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        let mut p = CellScalarField::new(&mesh, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(!p.has_zero_mean(&mesh));
        p.remove_mean(&mesh);
        assert!(p.has_zero_mean(&mesh));
    }
}
