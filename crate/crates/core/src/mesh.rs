//! Staggered MAC geometry on tensor-product Cartesian grids.
//!
//! Every entity class lives on a lattice whose extent along each axis is
//! either cell-like (`n` entries) or node-like (`n + 1` entries):
//!
//! * primal cells `K`: cell-like on every axis;
//! * faces of `E^(i)` (and their dual cells `D_σ`): node-like along `i`;
//! * dual-dual cells of `Ẽ^(i,j)`, `i != j`: node-like along `i` and `j`.
//!   The `(i,j)` and `(j,i)` families share one lattice, so both index the
//!   same geometric cells. `Ẽ^(i,i)` is the primal cell lattice.
//!
//! Along an axis, a cell-like entry `k` spans `[x_k, x_{k+1}]` and a
//! node-like entry `k` spans `[c_{k-1}, c_k]` between neighbouring cell
//! centres, clipped to the domain at both ends.

use crate::error::MeshError;

pub const MAX_DIM: usize = 3;

/// Multi-index; entries beyond the mesh dimension are zero.
pub type Multi = [usize; MAX_DIM];

/// Strictly increasing breakpoints along one axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisPartition {
    breakpoints: Vec<f64>,
}

impl AxisPartition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self, MeshError> {
        Self::validate(&breakpoints, 0)?;
        Ok(Self { breakpoints })
    }

    fn validate(bp: &[f64], axis: usize) -> Result<(), MeshError> {
        if bp.len() < 2 {
            return Err(MeshError::TooFewBreakpoints { axis });
        }
        for (index, x) in bp.iter().enumerate() {
            if !x.is_finite() {
                return Err(MeshError::NonFinite { axis, index });
            }
        }
        for index in 1..bp.len() {
            if bp[index] <= bp[index - 1] {
                return Err(MeshError::NonIncreasing { axis, index });
            }
        }
        Ok(())
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self, MeshError> {
        Self::stretched(lo, hi, n, 1.0)
    }

    /// Geometric grading with `ratio = h_last / h_first`.
    pub fn stretched(lo: f64, hi: f64, n: usize, ratio: f64) -> Result<Self, MeshError> {
        if n == 0 {
            return Err(MeshError::TooFewBreakpoints { axis: 0 });
        }
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(MeshError::BadStretch {
                axis: 0,
                reason: format!("ratio must be positive, got {ratio}"),
            });
        }
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(MeshError::BadStretch {
                axis: 0,
                reason: format!("bounds [{lo}, {hi}] are not increasing"),
            });
        }
        let q = if n > 1 {
            ratio.powf(1.0 / (n - 1) as f64)
        } else {
            1.0
        };
        let weights: Vec<f64> = (0..n).map(|k| q.powi(k as i32)).collect();
        let total: f64 = weights.iter().sum();
        let mut bp = Vec::with_capacity(n + 1);
        bp.push(lo);
        let mut acc = 0.0;
        for w in &weights[..n - 1] {
            acc += w;
            bp.push(lo + (hi - lo) * acc / total);
        }
        bp.push(hi);
        Self::new(bp)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn n_cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn lo(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }
}

/// Lexicographic index space, axis 0 fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    counts: Multi,
}

impl Lattice {
    fn new(dim: usize, counts: Multi) -> Self {
        let mut counts = counts;
        for c in counts.iter_mut().skip(dim) {
            *c = 1;
        }
        Self { dim, counts }
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn counts(&self) -> Multi {
        self.counts
    }

    pub fn index(&self, m: Multi) -> usize {
        m[0] + self.counts[0] * (m[1] + self.counts[1] * m[2])
    }

    pub fn multi(&self, idx: usize) -> Multi {
        let m0 = idx % self.counts[0];
        let r = idx / self.counts[0];
        let m1 = r % self.counts[1];
        let m2 = r / self.counts[1];
        let mut m = [m0, m1, m2];
        for v in m.iter_mut().skip(self.dim) {
            *v = 0;
        }
        m
    }

    /// Neighbour of `m` shifted by `delta` along `axis`, if inside the lattice.
    pub fn shift(&self, m: Multi, axis: usize, delta: isize) -> Option<Multi> {
        let v = m[axis] as isize + delta;
        if v < 0 || v >= self.counts[axis] as isize {
            return None;
        }
        let mut out = m;
        out[axis] = v as usize;
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceId {
    pub dir: usize,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualId {
    pub i: usize,
    pub j: usize,
    pub index: usize,
}

/// Axis-aligned box `[lo, hi]` (only the first `dim` entries are meaningful).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cuboid {
    pub lo: [f64; MAX_DIM],
    pub hi: [f64; MAX_DIM],
}

/// How a dual face `σ̃` of `D_σ` sits relative to the primal grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DualCase {
    /// `σ̃ ⊥ e_i` lies inside the primal cell `cell`.
    Parallel { cell: usize },
    /// `σ̃ ⊥ e_j`, `j != i`: half of `tau ∈ E(K)` joined with half of
    /// `tau_prime ∈ E(L)`, both in `E^(j)`, where `σ = K|L`.
    Transverse {
        tau: Option<FaceId>,
        tau_prime: Option<FaceId>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualFace {
    pub id: DualId,
    pub case: DualCase,
    /// `n_{σ,σ̃} · e_j`.
    pub normal: f64,
    pub exterior: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshMetrics {
    /// Largest ratio `|σ| / |σ'|` over faces of different directions.
    pub eta: f64,
    /// Largest cell diameter.
    pub h: f64,
}

#[derive(Clone, Debug)]
pub struct MacMesh {
    dim: usize,
    axes: Vec<AxisPartition>,
    widths: Vec<Vec<f64>>,
    centers: Vec<Vec<f64>>,
    node_lens: Vec<Vec<f64>>,
    cells: Lattice,
    faces: Vec<Lattice>,
    duals: Vec<Vec<Lattice>>,
    cell_volume: Vec<f64>,
    face_area: Vec<Vec<f64>>,
    face_dual_volume: Vec<Vec<f64>>,
    face_dof: Vec<Vec<Option<usize>>>,
    dof_face: Vec<FaceId>,
}

impl MacMesh {
    pub fn build(partitions: Vec<AxisPartition>) -> Result<Self, MeshError> {
        let dim = partitions.len();
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(MeshError::BadDimension(dim));
        }
        for (axis, p) in partitions.iter().enumerate() {
            AxisPartition::validate(p.breakpoints(), axis)?;
        }
        let widths: Vec<Vec<f64>> = partitions
            .iter()
            .map(|p| p.breakpoints().windows(2).map(|w| w[1] - w[0]).collect())
            .collect();
        let centers: Vec<Vec<f64>> = partitions
            .iter()
            .map(|p| p.breakpoints().windows(2).map(|w| 0.5 * (w[0] + w[1])).collect())
            .collect();
        let node_lens: Vec<Vec<f64>> = widths
            .iter()
            .map(|h| {
                let n = h.len();
                (0..=n)
                    .map(|k| {
                        let left = if k > 0 { 0.5 * h[k - 1] } else { 0.0 };
                        let right = if k < n { 0.5 * h[k] } else { 0.0 };
                        left + right
                    })
                    .collect()
            })
            .collect();

        let mut n = [1usize; MAX_DIM];
        for a in 0..dim {
            n[a] = widths[a].len();
        }
        let cells = Lattice::new(dim, n);
        let faces: Vec<Lattice> = (0..dim)
            .map(|i| {
                let mut c = n;
                c[i] += 1;
                Lattice::new(dim, c)
            })
            .collect();
        let duals: Vec<Vec<Lattice>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        let mut c = n;
                        if i != j {
                            c[i] += 1;
                            c[j] += 1;
                        }
                        Lattice::new(dim, c)
                    })
                    .collect()
            })
            .collect();

        let mut mesh = Self {
            dim,
            axes: partitions,
            widths,
            centers,
            node_lens,
            cells,
            faces,
            duals,
            cell_volume: Vec::new(),
            face_area: Vec::new(),
            face_dual_volume: Vec::new(),
            face_dof: Vec::new(),
            dof_face: Vec::new(),
        };
        mesh.cell_volume = (0..cells.len())
            .map(|k| {
                let m = cells.multi(k);
                (0..dim).map(|a| mesh.widths[a][m[a]]).product()
            })
            .collect();
        for i in 0..dim {
            let lat = mesh.faces[i];
            let mut area = Vec::with_capacity(lat.len());
            let mut dvol = Vec::with_capacity(lat.len());
            let mut dof = Vec::with_capacity(lat.len());
            for idx in 0..lat.len() {
                let m = lat.multi(idx);
                let a: f64 = (0..dim)
                    .filter(|&a| a != i)
                    .map(|a| mesh.widths[a][m[a]])
                    .product();
                area.push(a);
                dvol.push(a * mesh.node_lens[i][m[i]]);
                if m[i] > 0 && m[i] < n[i] {
                    dof.push(Some(mesh.dof_face.len()));
                    mesh.dof_face.push(FaceId { dir: i, index: idx });
                } else {
                    dof.push(None);
                }
            }
            mesh.face_area.push(area);
            mesh.face_dual_volume.push(dvol);
            mesh.face_dof.push(dof);
        }
        Ok(mesh)
    }

    /// Convenience constructor for a box split uniformly.
    pub fn uniform(bounds: &[(f64, f64)], n: &[usize]) -> Result<Self, MeshError> {
        let parts = bounds
            .iter()
            .zip(n)
            .enumerate()
            .map(|(axis, (&(lo, hi), &nc))| {
                AxisPartition::uniform(lo, hi, nc).map_err(|e| reaxis(e, axis))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::build(parts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axes(&self) -> &[AxisPartition] {
        &self.axes
    }

    pub fn widths(&self, axis: usize) -> &[f64] {
        &self.widths[axis]
    }

    pub fn centers(&self, axis: usize) -> &[f64] {
        &self.centers[axis]
    }

    /// Lengths of the node-centred intervals `[c_{k-1}, c_k]` along `axis`.
    pub fn node_lengths(&self, axis: usize) -> &[f64] {
        &self.node_lens[axis]
    }

    pub fn n_cells_along(&self, axis: usize) -> usize {
        self.widths[axis].len()
    }

    pub fn cells(&self) -> Lattice {
        self.cells
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn face_lattice(&self, dir: usize) -> Lattice {
        self.faces[dir]
    }

    pub fn n_faces(&self, dir: usize) -> usize {
        self.faces[dir].len()
    }

    pub fn dual_lattice(&self, i: usize, j: usize) -> Lattice {
        self.duals[i][j]
    }

    pub fn n_duals(&self, i: usize, j: usize) -> usize {
        self.duals[i][j].len()
    }

    pub fn domain_volume(&self) -> f64 {
        self.axes.iter().map(|p| p.hi() - p.lo()).product()
    }

    pub fn diameter(&self) -> f64 {
        self.axes
            .iter()
            .map(|p| (p.hi() - p.lo()).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    // ---- cells ----

    pub fn cell_volume(&self, k: usize) -> f64 {
        self.cell_volume[k]
    }

    pub fn cell_volumes(&self) -> &[f64] {
        &self.cell_volume
    }

    pub fn cell_center(&self, k: usize) -> [f64; MAX_DIM] {
        let m = self.cells.multi(k);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.centers[a][m[a]];
        }
        x
    }

    pub fn cell_box(&self, k: usize) -> Cuboid {
        let m = self.cells.multi(k);
        let mut b = Cuboid {
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for a in 0..self.dim {
            let bp = self.axes[a].breakpoints();
            b.lo[a] = bp[m[a]];
            b.hi[a] = bp[m[a] + 1];
        }
        b
    }

    /// The `2d` faces of cell `k` with the sign of `n_{K,σ} · e_dir`.
    pub fn cell_faces(&self, k: usize) -> Vec<(FaceId, f64)> {
        let m = self.cells.multi(k);
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            let lat = self.faces[i];
            out.push((FaceId { dir: i, index: lat.index(m) }, -1.0));
            let mut up = m;
            up[i] += 1;
            out.push((FaceId { dir: i, index: lat.index(up) }, 1.0));
        }
        out
    }

    // ---- faces ----

    pub fn check_face(&self, f: FaceId) -> Result<(), MeshError> {
        if f.dir >= self.dim || f.index >= self.faces[f.dir].len() {
            return Err(MeshError::UnknownFace {
                dir: f.dir,
                index: f.index,
            });
        }
        Ok(())
    }

    pub fn face_multi(&self, f: FaceId) -> Multi {
        self.faces[f.dir].multi(f.index)
    }

    pub fn face_area(&self, f: FaceId) -> f64 {
        self.face_area[f.dir][f.index]
    }

    pub fn face_areas(&self, dir: usize) -> &[f64] {
        &self.face_area[dir]
    }

    /// `|D_σ|`.
    pub fn face_dual_volume(&self, f: FaceId) -> f64 {
        self.face_dual_volume[f.dir][f.index]
    }

    pub fn face_dual_volumes(&self, dir: usize) -> &[f64] {
        &self.face_dual_volume[dir]
    }

    /// `(|D_{K,σ}|, |D_{L,σ}|)` for the lower and upper neighbour cells
    /// (zero where the neighbour does not exist).
    pub fn face_half_volumes(&self, f: FaceId) -> (f64, f64) {
        let (lo, hi) = self.face_cells(f);
        (
            lo.map_or(0.0, |k| 0.5 * self.cell_volume[k]),
            hi.map_or(0.0, |k| 0.5 * self.cell_volume[k]),
        )
    }

    /// Lower (`K`) and upper (`L`) cells along the face normal.
    pub fn face_cells(&self, f: FaceId) -> (Option<usize>, Option<usize>) {
        let m = self.face_multi(f);
        let i = f.dir;
        let n = self.widths[i].len();
        let lower = (m[i] > 0).then(|| {
            let mut c = m;
            c[i] -= 1;
            self.cells.index(c)
        });
        let upper = (m[i] < n).then(|| self.cells.index(m));
        (lower, upper)
    }

    pub fn face_is_interior(&self, f: FaceId) -> bool {
        self.face_dof[f.dir][f.index].is_some()
    }

    pub fn face_center(&self, f: FaceId) -> [f64; MAX_DIM] {
        let m = self.face_multi(f);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = if a == f.dir {
                self.axes[a].breakpoints()[m[a]]
            } else {
                self.centers[a][m[a]]
            };
        }
        x
    }

    /// Geometric box of the face itself (degenerate along `dir`).
    pub fn face_box(&self, f: FaceId) -> Cuboid {
        let m = self.face_multi(f);
        let mut b = Cuboid {
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for a in 0..self.dim {
            let bp = self.axes[a].breakpoints();
            if a == f.dir {
                b.lo[a] = bp[m[a]];
                b.hi[a] = bp[m[a]];
            } else {
                b.lo[a] = bp[m[a]];
                b.hi[a] = bp[m[a] + 1];
            }
        }
        b
    }

    /// Box of the dual cell `D_σ`.
    pub fn face_dual_box(&self, f: FaceId) -> Cuboid {
        let m = self.face_multi(f);
        let mut b = self.face_box(f);
        let (lo, hi) = self.node_extent(f.dir, m[f.dir]);
        b.lo[f.dir] = lo;
        b.hi[f.dir] = hi;
        b
    }

    fn node_extent(&self, axis: usize, k: usize) -> (f64, f64) {
        let bp = self.axes[axis].breakpoints();
        let c = &self.centers[axis];
        let lo = if k > 0 { c[k - 1] } else { bp[0] };
        let hi = if k < c.len() { c[k] } else { bp[c.len()] };
        (lo, hi)
    }

    /// Interior velocity unknown attached to a face, if any.
    pub fn face_dof(&self, f: FaceId) -> Option<usize> {
        self.face_dof[f.dir][f.index]
    }

    pub fn n_velocity_dofs(&self) -> usize {
        self.dof_face.len()
    }

    pub fn dof_face(&self, dof: usize) -> FaceId {
        self.dof_face[dof]
    }

    pub fn interior_faces(&self, dir: usize) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.faces[dir].len())
            .filter(move |&idx| self.face_dof[dir][idx].is_some())
            .map(move |index| FaceId { dir, index })
    }

    // ---- dual-dual cells ----

    /// `|D_σ̃|` for `σ̃ ∈ Ẽ^(i,j)`.
    pub fn dual_volume(&self, i: usize, j: usize, idx: usize) -> f64 {
        let m = self.duals[i][j].multi(idx);
        (0..self.dim)
            .map(|a| {
                if i != j && (a == i || a == j) {
                    self.node_lens[a][m[a]]
                } else {
                    self.widths[a][m[a]]
                }
            })
            .product()
    }

    /// `d_σ̃`: extent of `D_σ̃` along `e_j` (the distance between the face
    /// centres it joins, or to the wall for exterior dual faces).
    pub fn dual_spacing(&self, i: usize, j: usize, idx: usize) -> f64 {
        let m = self.duals[i][j].multi(idx);
        if i == j {
            self.widths[j][m[j]]
        } else {
            self.node_lens[j][m[j]]
        }
    }

    /// `|σ̃| = |D_σ̃| / d_σ̃`.
    pub fn dual_area(&self, i: usize, j: usize, idx: usize) -> f64 {
        self.dual_volume(i, j, idx) / self.dual_spacing(i, j, idx)
    }

    pub fn dual_box(&self, i: usize, j: usize, idx: usize) -> Cuboid {
        let m = self.duals[i][j].multi(idx);
        let mut b = Cuboid {
            lo: [0.0; MAX_DIM],
            hi: [0.0; MAX_DIM],
        };
        for a in 0..self.dim {
            if i != j && (a == i || a == j) {
                let (lo, hi) = self.node_extent(a, m[a]);
                b.lo[a] = lo;
                b.hi[a] = hi;
            } else {
                let bp = self.axes[a].breakpoints();
                b.lo[a] = bp[m[a]];
                b.hi[a] = bp[m[a] + 1];
            }
        }
        b
    }

    /// Faces of `E^(i)` below and above `σ̃ ∈ Ẽ^(i,j)` along `e_j`.
    /// A missing side marks an exterior dual face.
    pub fn dual_neighbors(&self, i: usize, j: usize, idx: usize) -> (Option<FaceId>, Option<FaceId>) {
        let m = self.duals[i][j].multi(idx);
        let lat = self.faces[i];
        if i == j {
            let lo = FaceId { dir: i, index: lat.index(m) };
            let mut up = m;
            up[i] += 1;
            (Some(lo), Some(FaceId { dir: i, index: lat.index(up) }))
        } else {
            let n = self.widths[j].len();
            let lower = (m[j] > 0).then(|| {
                let mut c = m;
                c[j] -= 1;
                FaceId { dir: i, index: lat.index(c) }
            });
            let upper = (m[j] < n).then(|| FaceId { dir: i, index: lat.index(m) });
            (lower, upper)
        }
    }

    pub fn dual_is_exterior(&self, i: usize, j: usize, idx: usize) -> bool {
        let (a, b) = self.dual_neighbors(i, j, idx);
        a.is_none() || b.is_none()
    }

    /// For a transverse `σ̃ ∈ Ẽ^(i,j)`: the faces `τ ∈ E(K)`, `τ' ∈ E(L)` of
    /// `E^(j)` that `σ̃` straddles (lower and upper along `e_i`).
    pub fn dual_transverse_faces(&self, i: usize, j: usize, idx: usize) -> (Option<FaceId>, Option<FaceId>) {
        debug_assert!(i != j);
        self.dual_neighbors(j, i, idx)
    }

    /// Dual-dual cell adjacent to `D_σ` along `e_j` on the given side
    /// (`upper = true` for the `+e_j` side). `None` for the degenerate
    /// wall-coincident parallel face of a boundary `σ`.
    pub fn dual_of_face(&self, f: FaceId, j: usize, upper: bool) -> Option<usize> {
        let i = f.dir;
        let m = self.faces[i].multi(f.index);
        if i == j {
            let n = self.widths[i].len();
            let k = if upper {
                (m[i] < n).then_some(m[i])?
            } else {
                m[i].checked_sub(1)?
            };
            let mut c = m;
            c[i] = k;
            Some(self.cells.index(c))
        } else {
            let mut c = m;
            if upper {
                c[j] += 1;
            }
            Some(self.duals[i][j].index(c))
        }
    }

    /// All dual faces of `D_σ` with their geometry tags.
    pub fn dual_faces_of(&self, f: FaceId) -> Result<Vec<DualFace>, MeshError> {
        self.check_face(f)?;
        let i = f.dir;
        let mut out = Vec::with_capacity(2 * self.dim);
        for j in 0..self.dim {
            for (upper, normal) in [(false, -1.0), (true, 1.0)] {
                let Some(idx) = self.dual_of_face(f, j, upper) else {
                    continue;
                };
                let case = if i == j {
                    DualCase::Parallel { cell: idx }
                } else {
                    let (tau, tau_prime) = self.dual_transverse_faces(i, j, idx);
                    DualCase::Transverse { tau, tau_prime }
                };
                out.push(DualFace {
                    id: DualId { i, j, index: idx },
                    case,
                    normal,
                    exterior: self.dual_is_exterior(i, j, idx),
                });
            }
        }
        Ok(out)
    }

    /// Volume of `K ∩ D_σ̃` for each primal cell overlapping `σ̃ ∈ Ẽ^(i,j)`.
    pub fn dual_cell_overlaps(&self, i: usize, j: usize, idx: usize) -> Vec<(usize, f64)> {
        if i == j {
            return vec![(idx, self.cell_volume[idx])];
        }
        let m = self.duals[i][j].multi(idx);
        let mut out = Vec::with_capacity(4);
        for di in [0usize, 1] {
            for dj in [0usize, 1] {
                let (Some(ci), Some(cj)) = (
                    (m[i] + di).checked_sub(1).filter(|&c| c < self.widths[i].len()),
                    (m[j] + dj).checked_sub(1).filter(|&c| c < self.widths[j].len()),
                ) else {
                    continue;
                };
                let mut c = m;
                c[i] = ci;
                c[j] = cj;
                let k = self.cells.index(c);
                out.push((k, 0.25 * self.cell_volume[k]));
            }
        }
        out
    }

    pub fn metrics(&self) -> MeshMetrics {
        let mut eta: f64 = 1.0;
        for i in 0..self.dim {
            let max_i = self.face_area[i].iter().cloned().fold(0.0, f64::max);
            for j in 0..self.dim {
                if i == j {
                    continue;
                }
                let min_j = self.face_area[j].iter().cloned().fold(f64::INFINITY, f64::min);
                eta = eta.max(max_i / min_j);
            }
        }
        let h = (0..self.dim)
            .map(|a| self.widths[a].iter().cloned().fold(0.0, f64::max).powi(2))
            .sum::<f64>()
            .sqrt();
        MeshMetrics { eta, h }
    }
}

fn reaxis(e: MeshError, axis: usize) -> MeshError {
    match e {
        MeshError::TooFewBreakpoints { .. } => MeshError::TooFewBreakpoints { axis },
        MeshError::NonIncreasing { index, .. } => MeshError::NonIncreasing { axis, index },
        MeshError::NonFinite { index, .. } => MeshError::NonFinite { axis, index },
        MeshError::BadStretch { reason, .. } => MeshError::BadStretch { axis, reason },
        other => other,
    }
}

/// Builds a partition for `axis`, tagging errors with that axis.
pub fn partition_for_axis(axis: usize, spec: PartitionSpec) -> Result<AxisPartition, MeshError> {
    match spec {
        PartitionSpec::Breakpoints(bp) => {
            AxisPartition::validate(&bp, axis)?;
            Ok(AxisPartition { breakpoints: bp })
        }
        PartitionSpec::Stretched { lo, hi, n, ratio } => {
            AxisPartition::stretched(lo, hi, n, ratio).map_err(|e| reaxis(e, axis))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PartitionSpec {
    Breakpoints(Vec<f64>),
    Stretched { lo: f64, hi: f64, n: usize, ratio: f64 },
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh(xs: &[f64], ys: &[f64]) -> MacMesh {
        MacMesh::build(vec![
            AxisPartition::new(xs.to_vec()).unwrap(),
            AxisPartition::new(ys.to_vec()).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn counts_for_two_cells() {
        let m = mesh(&[0.0, 0.5, 1.0], &[0.0, 1.0]);
        assert_eq!(m.n_cells(), 2);
        assert_eq!(m.n_faces(0), 3);
        assert_eq!(m.n_faces(1), 4);
        assert_eq!(m.n_velocity_dofs(), 1);
    }

    #[test]
    fn uniform_two_by_two_measures() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        for k in 0..m.n_cells() {
            assert!((m.cell_volume(k) - 0.25).abs() < 1e-15);
        }
        for i in 0..2 {
            for f in m.interior_faces(i) {
                assert!((m.face_dual_volume(f) - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn nonuniform_dual_volume() {
        let m = mesh(&[0.0, 0.25, 1.0], &[0.0, 1.0]);
        let f = m.interior_faces(0).next().unwrap();
        assert!((m.face_dual_volume(f) - 0.5).abs() < 1e-15);
        let (a, b) = m.face_half_volumes(f);
        assert!((a - 0.125).abs() < 1e-15 && (b - 0.375).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_breakpoints_with_axis() {
        let err = MacMesh::build(vec![
            AxisPartition::uniform(0.0, 1.0, 2).unwrap(),
            AxisPartition { breakpoints: vec![0.0, 0.5, 0.5] },
        ])
        .unwrap_err();
        assert_eq!(err, MeshError::NonIncreasing { axis: 1, index: 2 });
        let err = partition_for_axis(2, PartitionSpec::Breakpoints(vec![1.0, 0.0])).unwrap_err();
        assert_eq!(err, MeshError::NonIncreasing { axis: 2, index: 1 });
        assert!(matches!(
            MacMesh::build(vec![AxisPartition::uniform(0.0, 1.0, 2).unwrap()]),
            Err(MeshError::BadDimension(1))
        ));
    }

    #[test]
    fn metrics_examples() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        assert_eq!(m.metrics().eta, 1.0);
        let m = mesh(&[0.0, 0.25, 1.0], &[0.0, 1.0]);
        assert!((m.metrics().eta - 4.0).abs() < 1e-14);
        let m = mesh(&[0.0, 0.5, 1.0], &[0.0, 1.0]);
        assert!((m.metrics().h - 1.25f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn metrics_match_exhaustive_pairs() {
        let m = MacMesh::build(vec![
            AxisPartition::stretched(0.0, 1.0, 5, 3.0).unwrap(),
            AxisPartition::new(vec![0.0, 0.1, 0.5, 2.0]).unwrap(),
        ])
        .unwrap();
        let mut eta: f64 = 0.0;
        for a in 0..m.n_faces(0) {
            for b in 0..m.n_faces(1) {
                let s = m.face_area(FaceId { dir: 0, index: a });
                let t = m.face_area(FaceId { dir: 1, index: b });
                eta = eta.max(s / t).max(t / s);
            }
        }
        let mut h: f64 = 0.0;
        for k in 0..m.n_cells() {
            let b = m.cell_box(k);
            h = h.max(((b.hi[0] - b.lo[0]).powi(2) + (b.hi[1] - b.lo[1]).powi(2)).sqrt());
        }
        let got = m.metrics();
        assert!((got.eta - eta).abs() < 1e-14 * eta);
        assert!((got.h - h).abs() < 1e-14);
    }

    #[test]
    fn interior_face_has_2d_dual_faces() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        let f = m.interior_faces(0).next().unwrap();
        let df = m.dual_faces_of(f).unwrap();
        assert_eq!(df.len(), 4);
        let par = df.iter().filter(|d| matches!(d.case, DualCase::Parallel { .. })).count();
        assert_eq!(par, 2);
        for d in &df {
            if let DualCase::Transverse { .. } = d.case {
                // 2x2 grid: every interior x-face touches a wall along y.
                let h = m.dual_area(d.id.i, d.id.j, d.id.index);
                assert!(h > 0.0);
            }
        }
    }

    #[test]
    fn transverse_dual_face_area_on_uniform_grid() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[4, 4]).unwrap();
        // interior x-face at x = 0.5, row 1: both transverse faces are interior
        let f = FaceId { dir: 0, index: m.face_lattice(0).index([2, 1, 0]) };
        for d in m.dual_faces_of(f).unwrap() {
            if let DualCase::Transverse { tau, tau_prime } = d.case {
                assert!(!d.exterior);
                let (t, tp) = (tau.unwrap(), tau_prime.unwrap());
                let expect = 0.5 * m.face_area(t) + 0.5 * m.face_area(tp);
                assert!((m.dual_area(d.id.i, d.id.j, d.id.index) - expect).abs() < 1e-15);
                assert!((expect - 0.25).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn wall_adjacent_faces_have_exterior_dual_faces() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[4, 4]).unwrap();
        // x-face in the bottom row: its lower transverse dual face lies on y = 0
        let f = FaceId { dir: 0, index: m.face_lattice(0).index([2, 0, 0]) };
        let df = m.dual_faces_of(f).unwrap();
        let ext: Vec<_> = df.iter().filter(|d| d.exterior).collect();
        assert_eq!(ext.len(), 1);
        assert_eq!(ext[0].id.j, 1);
        assert_eq!(ext[0].normal, -1.0);
        // boundary x-face: the wall-coincident parallel face is degenerate and omitted
        let f = FaceId { dir: 0, index: m.face_lattice(0).index([0, 2, 0]) };
        let df = m.dual_faces_of(f).unwrap();
        assert_eq!(df.len(), 3);
        assert!(m.dual_faces_of(FaceId { dir: 0, index: 999 }).is_err());
    }

    #[test]
    fn partitions_cover_domain() {
        let m = MacMesh::build(vec![
            AxisPartition::stretched(0.0, 2.0, 7, 3.0).unwrap(),
            AxisPartition::stretched(-1.0, 1.0, 5, 0.5).unwrap(),
        ])
        .unwrap();
        let vol = m.domain_volume();
        let tol = 1e-12 * vol;
        assert!((m.cell_volumes().iter().sum::<f64>() - vol).abs() < tol);
        for i in 0..2 {
            assert!((m.face_dual_volumes(i).iter().sum::<f64>() - vol).abs() < tol);
            for j in 0..2 {
                let s: f64 = (0..m.n_duals(i, j)).map(|d| m.dual_volume(i, j, d)).sum();
                assert!((s - vol).abs() < tol, "({i},{j}) {s}");
            }
        }
        // (i,j) and (j,i) describe the same boxes
        for d in 0..m.n_duals(0, 1) {
            assert_eq!(m.dual_box(0, 1, d), m.dual_box(1, 0, d));
        }
        // (i,i) reproduces the primal cells
        for k in 0..m.n_cells() {
            assert_eq!(m.dual_box(0, 0, k), m.cell_box(k));
        }
    }

    #[test]
    fn parallel_dual_spacing_matches_area_ratio() {
        let m = MacMesh::build(vec![
            AxisPartition::stretched(0.0, 1.0, 4, 2.0).unwrap(),
            AxisPartition::stretched(0.0, 1.0, 3, 3.0).unwrap(),
        ])
        .unwrap();
        for k in 0..m.n_cells() {
            for i in 0..2 {
                let (lo, hi) = m.dual_neighbors(i, i, k);
                let (lo, hi) = (lo.unwrap(), hi.unwrap());
                let d = m.face_center(hi)[i] - m.face_center(lo)[i];
                assert!((m.face_area(lo) / m.cell_volume(k) - 1.0 / d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn three_dimensional_partition() {
        let m = MacMesh::uniform(&[(0.0, 1.0), (0.0, 2.0), (0.0, 1.0)], &[2, 3, 2]).unwrap();
        assert_eq!(m.n_cells(), 12);
        assert_eq!(m.n_faces(2), 2 * 3 * 3);
        let vol = m.domain_volume();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..m.n_duals(i, j)).map(|d| m.dual_volume(i, j, d)).sum();
                assert!((s - vol).abs() < 1e-12);
            }
        }
        let f = m.interior_faces(1).next().unwrap();
        assert_eq!(m.dual_faces_of(f).unwrap().len(), 6);
    }

    #[test]
    fn stretch_ratio_is_last_over_first() {
        let p = AxisPartition::stretched(0.0, 1.0, 16, 3.0).unwrap();
        let bp = p.breakpoints();
        let first = bp[1] - bp[0];
        let last = bp[16] - bp[15];
        assert!((last / first - 3.0).abs() < 1e-12);
        assert_eq!(bp[16], 1.0);
    }
}
