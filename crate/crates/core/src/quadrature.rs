//! Tensor-product Gauss–Legendre rules on axis-aligned boxes.

use crate::error::FieldError;
use crate::mesh::{Cuboid, MAX_DIM};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[k] = -z;
        x[n - 1 - k] = z;
        let wk = 2.0 / ((1.0 - z * z) * dp * dp);
        w[k] = wk;
        w[n - 1 - k] = wk;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Reusable rule of a fixed order.
#[derive(Clone, Debug)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(order: usize) -> Result<Self, FieldError> {
        if order == 0 {
            return Err(FieldError::BadQuadratureOrder);
        }
        let (nodes, weights) = gauss_legendre(order);
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Mean of `f` over the first `dim` axes of `b`. Axes with zero extent
    /// are sampled at their single coordinate, so faces work too.
    pub fn mean<F>(&self, dim: usize, b: &Cuboid, f: F) -> Result<f64, FieldError>
    where
        F: Fn([f64; MAX_DIM]) -> f64,
    {
        let n = self.nodes.len();
        let mut counts = [1usize; MAX_DIM];
        for a in 0..dim {
            if b.hi[a] > b.lo[a] {
                counts[a] = n;
            }
        }
        let mut acc = 0.0;
        for k2 in 0..counts[2] {
            for k1 in 0..counts[1] {
                for k0 in 0..counts[0] {
                    let ks = [k0, k1, k2];
                    let mut x = [0.0; MAX_DIM];
                    let mut w = 1.0;
                    for a in 0..dim {
                        let mid = 0.5 * (b.lo[a] + b.hi[a]);
                        if counts[a] == 1 {
                            x[a] = mid;
                        } else {
                            let half = 0.5 * (b.hi[a] - b.lo[a]);
                            x[a] = mid + half * self.nodes[ks[a]];
                            w *= 0.5 * self.weights[ks[a]];
                        }
                    }
                    let v = f(x);
                    if !v.is_finite() {
                        return Err(FieldError::QuadratureFailure { point: x });
                    }
                    acc += w * v;
                }
            }
        }
        Ok(acc)
    }
}
