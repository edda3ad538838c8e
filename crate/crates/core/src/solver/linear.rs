//! Sparse direct solves backed by faer's LU.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;

use crate::sparse::CsrMatrix;

pub struct SparseLu {
    n: usize,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    /// `None` when the factorization breaks down.
    pub fn factor(a: &CsrMatrix) -> Option<Self> {
        assert_eq!(a.rows(), a.cols());
        let trip: Vec<Triplet<usize, usize, f64>> = a.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(a.rows(), a.cols(), &trip).ok()?;
        let lu = m.sp_lu().ok()?;
        Some(Self { n: a.rows(), lu })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(self.n, |k| b[k]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|k| x[k]).collect()
    }

    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(self.n, |k| b[k]);
        let x = self.lu.solve_transpose(&rhs);
        (0..self.n).map(|k| x[k]).collect()
    }

    /// Hager's estimate of `‖A⁻¹‖₁`.
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let ny: f64 = y.iter().map(|v| v.abs()).sum();
            if !ny.is_finite() {
                return f64::INFINITY;
            }
            let s: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&s);
            let (jmax, zmax) = z
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            est = ny;
            if zmax <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[jmax] = 1.0;
        }
        est
    }
}

pub fn norm1(a: &CsrMatrix) -> f64 {
    let mut cols = vec![0.0; a.cols()];
    for (_, c, v) in a.iter() {
        cols[c] += v.abs();
    }
    cols.into_iter().fold(0.0, f64::max)
}

pub fn residual_inf(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    a.matvec(x)
        .iter()
        .zip(b)
        .map(|(ax, b)| (ax - b).abs())
        .fold(0.0, f64::max)
}
