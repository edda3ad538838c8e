use crate::error::OperatorError;
use crate::fields::CellScalarField;
use crate::mesh::MacMesh;

/// Viscosity as a continuous function of density.
#[derive(Clone, Debug, PartialEq)]
pub enum ViscosityLaw {
    Constant(f64),
    /// `μ = a + b ρ`.
    Linear { a: f64, b: f64 },
    /// Piecewise-linear interpolation, clamped outside the table.
    Table { rho: Vec<f64>, mu: Vec<f64> },
}

impl ViscosityLaw {
    pub fn eval(&self, rho: f64) -> Result<f64, OperatorError> {
        let v = match self {
            ViscosityLaw::Constant(m) => *m,
            ViscosityLaw::Linear { a, b } => a + b * rho,
            ViscosityLaw::Table { rho: xs, mu: ys } => table_lookup(xs, ys, rho),
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(OperatorError::BadViscosity { rho, value: v });
        }
        Ok(v)
    }

    /// Bounds of `μ` over `[rho_min, rho_max]`.
    pub fn range(&self, rho_min: f64, rho_max: f64) -> Result<(f64, f64), OperatorError> {
        let mut pts = vec![rho_min, rho_max];
        if let ViscosityLaw::Table { rho, .. } = self {
            pts.extend(rho.iter().cloned().filter(|r| *r > rho_min && *r < rho_max));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in pts {
            let m = self.eval(r)?;
            lo = lo.min(m);
            hi = hi.max(m);
        }
        Ok((lo, hi))
    }
}

fn table_lookup(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.is_empty() || xs.len() != ys.len() {
        return f64::NAN;
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let k = xs.partition_point(|v| *v <= x);
    let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    ys[k - 1] + t * (ys[k] - ys[k - 1])
}

/// `μ_K` per cell and `μ_σ̃` per dual-dual cell of each `(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ViscosityTensorField {
    cell: Vec<f64>,
    dual: Vec<Vec<Vec<f64>>>,
}

impl ViscosityTensorField {
    /// Transverse dual cells average the overlapping cells by volume; the
    /// `(i, i)` family takes the cell value.
    pub fn from_cell_values(mesh: &MacMesh, cell: Vec<f64>) -> Self {
        let d = mesh.dim();
        let mut dual = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            dual[i][i] = cell.clone();
            for j in (i + 1)..d {
                let vals: Vec<f64> = (0..mesh.n_duals(i, j))
                    .map(|s| {
                        let parts = mesh.dual_cell_overlaps(i, j, s);
                        let vol: f64 = parts.iter().map(|p| p.1).sum();
                        parts.iter().map(|(k, w)| w * cell[*k]).sum::<f64>() / vol
                    })
                    .collect();
                dual[j][i] = vals.clone();
                dual[i][j] = vals;
            }
        }
        Self { cell, dual }
    }

    pub fn constant(mesh: &MacMesh, mu: f64) -> Self {
        Self::from_cell_values(mesh, vec![mu; mesh.n_cells()])
    }

    pub fn cell(&self) -> &[f64] {
        &self.cell
    }

    pub fn dual(&self, i: usize, j: usize) -> &[f64] {
        &self.dual[i][j]
    }

    pub fn min(&self) -> f64 {
        self.dual.iter().flatten().flatten().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.dual.iter().flatten().flatten().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn viscosity_tensor(
    mesh: &MacMesh,
    rho: &CellScalarField,
    law: &ViscosityLaw,
) -> Result<ViscosityTensorField, OperatorError> {
    let cell = rho
        .values()
        .iter()
        .map(|r| law.eval(*r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ViscosityTensorField::from_cell_values(mesh, cell))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_law_on_constant_density() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[3, 3]).unwrap();
        let rho = CellScalarField::constant(&mesh, 1.3);
        let mu = viscosity_tensor(&mesh, &rho, &ViscosityLaw::Linear { a: 0.0, b: 1.0 }).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(mu.dual(i, j).iter().all(|m| (m - 1.3).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn interior_and_boundary_transverse_averages() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        // cells (0,0),(1,0),(0,1),(1,1) carry 1,2,3,4
        let mu = ViscosityTensorField::from_cell_values(&mesh, vec![1.0, 2.0, 3.0, 4.0]);
        let lat = mesh.dual_lattice(0, 1);
        assert!((mu.dual(0, 1)[lat.index([1, 1, 0])] - 2.5).abs() < 1e-15);
        assert_eq!(mu.dual(1, 0), mu.dual(0, 1));
        // wall node between cells 1 (left) and 2 (right) on y = 0
        let mu = ViscosityTensorField::from_cell_values(&mesh, vec![1.0, 3.0, 7.0, 9.0]);
        assert!((mu.dual(0, 1)[lat.index([1, 0, 0])] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_viscosity() {
        let law = ViscosityLaw::Linear { a: -1.0, b: 1.0 };
        assert!(matches!(law.eval(0.5), Err(OperatorError::BadViscosity { .. })));
        assert!(ViscosityLaw::Constant(f64::NAN).eval(1.0).is_err());
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let law = ViscosityLaw::Table { rho: vec![1.0, 3.0], mu: vec![0.1, 0.5] };
        assert!((law.eval(2.0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(law.eval(0.0).unwrap(), 0.1);
        assert_eq!(law.eval(9.0).unwrap(), 0.5);
        assert_eq!(law.range(1.0, 3.0).unwrap(), (0.1, 0.5));
    }
}
