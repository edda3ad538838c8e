use super::{CellScalarField, VelocityField};
use crate::error::FieldError;
use crate::mesh::{MacMesh, MAX_DIM};
use crate::quadrature::Quadrature;

pub type Point = [f64; MAX_DIM];

/// `Π_M f`: cell averages.
pub fn project_cell<F>(mesh: &MacMesh, quad: &Quadrature, f: F) -> Result<CellScalarField, FieldError>
where
    F: Fn(Point) -> f64,
{
    let mut values = Vec::with_capacity(mesh.n_cells());
    for k in 0..mesh.n_cells() {
        values.push(quad.mean(mesh.dim(), &mesh.cell_box(k), &f)?);
    }
    CellScalarField::new(mesh, values)
}

/// `Π_E f`: component `i` averaged over the dual cell `D_σ` of each interior
/// face. `f(i, x)` returns component `i` at `x`.
pub fn project_face_dual<F>(mesh: &MacMesh, quad: &Quadrature, f: F) -> Result<VelocityField, FieldError>
where
    F: Fn(usize, Point) -> f64,
{
    project_faces(mesh, |face| {
        quad.mean(mesh.dim(), &mesh.face_dual_box(face), |x| f(face.dir, x))
    })
}

/// Fortin projection `Π̃_E f`: component `i` averaged over the face itself.
pub fn project_face_fortin<F>(mesh: &MacMesh, quad: &Quadrature, f: F) -> Result<VelocityField, FieldError>
where
    F: Fn(usize, Point) -> f64,
{
    project_faces(mesh, |face| {
        quad.mean(mesh.dim(), &mesh.face_box(face), |x| f(face.dir, x))
    })
}

fn project_faces<G>(mesh: &MacMesh, g: G) -> Result<VelocityField, FieldError>
where
    G: Fn(crate::mesh::FaceId) -> Result<f64, FieldError>,
{
    let mut u = VelocityField::zeros(mesh);
    for i in 0..mesh.dim() {
        let faces: Vec<_> = mesh.interior_faces(i).collect();
        for face in faces {
            let v = g(face)?;
            u.set(mesh, face, v);
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::cell_lp;
    use crate::mesh::FaceId;

    fn unit2(n: usize) -> MacMesh {
        MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[n, n]).unwrap()
    }

    #[test]
    fn constant_projects_to_constant() {
        let mesh = unit2(3);
        let q = Quadrature::new(2).unwrap();
        let p = project_cell(&mesh, &q, |_| 2.5).unwrap();
        assert!(p.values().iter().all(|v| (v - 2.5).abs() < 1e-14));
        let u = project_face_dual(&mesh, &q, |_, _| 0.0).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn linear_x_cell_averages() {
        let mesh = unit2(2);
        let q = Quadrature::new(5).unwrap();
        let p = project_cell(&mesh, &q, |x| x[0]).unwrap();
        assert_eq!(p.values().len(), 4);
        for k in 0..4 {
            let expect = if mesh.cells().multi(k)[0] == 0 { 0.25 } else { 0.75 };
            assert!((p.values()[k] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_cell_mean_of_x() {
        let mesh = unit2(2);
        let q = Quadrature::new(5).unwrap();
        let u = project_face_dual(&mesh, &q, |i, x| if i == 0 { x[0] } else { 0.0 }).unwrap();
        for f in mesh.interior_faces(0) {
            assert!((u.get(f) - 0.5).abs() < 1e-15);
        }
        // boundary faces stay zero
        assert_eq!(u.get(FaceId { dir: 0, index: 0 }), 0.0);
    }

    #[test]
    fn projection_does_not_increase_lp() {
        // piecewise-constant data on the 2x refined mesh; an even-order rule
        // puts half its weight in each half-cell, so the averages are exact
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mesh = unit2(4);
        let fine = unit2(8);
        let q = Quadrature::new(4).unwrap();
        for _ in 0..20 {
            let data: Vec<f64> = (0..64).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = |x: Point| {
                let a = ((x[0] * 8.0) as usize).min(7);
                let b = ((x[1] * 8.0) as usize).min(7);
                data[a + 8 * b]
            };
            let p = project_cell(&mesh, &q, f).unwrap();
            let pf = CellScalarField::new(&fine, data.clone()).unwrap();
            for pw in [1.0, 2.0, f64::INFINITY] {
                assert!(cell_lp(&mesh, &p, pw) <= cell_lp(&fine, &pf, pw) + 1e-14);
            }
            assert!((p.integral(&mesh) - pf.integral(&fine)).abs() < 1e-14);
        }
    }
}
