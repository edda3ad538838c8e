//! Refinement studies: runs a problem on a sequence of grids with δt ∝ h and
//! tabulates L² errors and observed orders.

use std::time::Instant;

use macflow::fields::{cell_lp, project_cell, project_face_dual};
use macflow::quadrature::Quadrature;
use macflow::solver::{run_simulation, MemorySink, SolverConfig, Trajectory};
use macflow::{CellScalarField, MacMesh, SolverError, VelocityField};

use crate::config::{ConfigError, RunConfig};
use crate::problems::MmsA;

/// Errors below this are at roundoff and count as converged.
pub const ERROR_FLOOR: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("a convergence study needs at least 3 levels, got {0}")]
    TooFewLevels(usize),
    #[error("problem '{0}' has no analytic solution; set convergence.reference")]
    NoReference(&'static str),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("level n={n}: {source}")]
    Solver {
        n: usize,
        #[source]
        source: SolverError,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelResult {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub u_err: f64,
    pub p_err: f64,
    pub rho_err: f64,
    pub bv_sum: f64,
    pub h1_time: f64,
    pub all_clear: bool,
    pub seconds: f64,
}

/// Orders between consecutive levels; `None` when undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders {
    pub u: Option<f64>,
    pub p: Option<f64>,
    pub rho: Option<f64>,
}

impl Orders {
    pub fn flagged(&self) -> bool {
        self.u.is_none() || self.p.is_none() || self.rho.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub problem: String,
    pub reference: Option<usize>,
    pub levels: Vec<LevelResult>,
    pub orders: Vec<Orders>,
}

pub const TABLE_HEADER: &str = "n,h,dt,steps,u_err,p_err,rho_err,u_order,p_order,rho_order,bv_sum,h1_time,all_clear,flagged";

fn fmt_order(o: Option<f64>) -> String {
    o.map_or("undefined".into(), |v| format!("{v:.4}"))
}

impl ConvergenceTable {
    pub fn csv(&self) -> String {
        let mut s = String::from(TABLE_HEADER);
        s.push('\n');
        for (k, l) in self.levels.iter().enumerate() {
            let o = if k == 0 { None } else { Some(self.orders[k - 1]) };
            let (u, p, r) = match o {
                Some(o) => (fmt_order(o.u), fmt_order(o.p), fmt_order(o.rho)),
                None => (String::new(), String::new(), String::new()),
            };
            s.push_str(&format!(
                "{},{:e},{:e},{},{:e},{:e},{:e},{u},{p},{r},{:e},{:e},{},{}\n",
                l.n,
                l.h,
                l.dt,
                l.steps,
                l.u_err,
                l.p_err,
                l.rho_err,
                l.bv_sum,
                l.h1_time,
                l.all_clear,
                o.is_some_and(|o| o.flagged())
            ));
        }
        s
    }

    pub fn any_flagged(&self) -> bool {
        self.orders.iter().any(|o| o.flagged())
    }

    pub fn u_errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.u_err).collect()
    }
    pub fn p_errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.p_err).collect()
    }
    pub fn rho_errors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.rho_err).collect()
    }

    /// Largest over smallest of a positive per-level quantity.
    pub fn spread(values: &[f64]) -> f64 {
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Observed order `log(e_c/e_f) / log(h_c/h_f)`.
pub fn observed_order(h: (f64, f64), e: (f64, f64)) -> Option<f64> {
    let (hc, hf) = h;
    let (ec, ef) = e;
    if hc == hf || !(ec.is_finite() && ef.is_finite()) || ec <= 0.0 || ef <= 0.0 {
        return None;
    }
    let o = (ec / ef).ln() / (hc / hf).ln();
    o.is_finite().then_some(o)
}

/// Non-increasing, strictly decreasing where above [`ERROR_FLOOR`].
pub fn is_monotone(errors: &[f64]) -> bool {
    errors
        .windows(2)
        .all(|w| w[1].is_finite() && (w[1] < w[0] || (w[1] <= ERROR_FLOOR && w[0] <= ERROR_FLOOR)))
}

/// Step count and size landing exactly on `t_end`.
pub fn level_dt(t_end: f64, dt_over_h: f64, h: f64) -> f64 {
    let target = dt_over_h * h;
    t_end / (t_end / target).ceil().max(1.0)
}

/// Coarse-to-fine overlaps of two 1D partitions given by their bounds.
fn overlaps(a: &[f64], b: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i + 1 < a.len() && j + 1 < b.len() {
        let lo = a[i].max(b[j]);
        let hi = a[i + 1].min(b[j + 1]);
        if hi > lo {
            out.push((i, j, hi - lo));
        }
        if a[i + 1] <= b[j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Control-volume bounds along `axis`: cells, or the dual cells of the
/// faces normal to `axis` when `staggered`.
fn bounds(mesh: &MacMesh, axis: usize, staggered: bool) -> Vec<f64> {
    let bp = mesh.axes()[axis].breakpoints();
    if !staggered {
        return bp.to_vec();
    }
    let mut b = vec![bp[0]];
    b.extend_from_slice(mesh.centers(axis));
    b.push(*bp.last().unwrap());
    b
}

/// `‖a − b‖_{L²}` of two piecewise-constant functions on different grids.
/// `component` selects face data of that direction, `None` cell data.
fn overlap_l2(ma: &MacMesh, a: &[f64], mb: &MacMesh, b: &[f64], component: Option<usize>) -> f64 {
    let dim = ma.dim();
    let per_axis: Vec<_> = (0..dim)
        .map(|ax| {
            let st = component == Some(ax);
            overlaps(&bounds(ma, ax, st), &bounds(mb, ax, st))
        })
        .collect();
    let strides = |m: &MacMesh| {
        let mut s = vec![1usize; dim];
        for ax in 1..dim {
            let n = m.n_cells_along(ax - 1) + usize::from(component == Some(ax - 1));
            s[ax] = s[ax - 1] * n;
        }
        s
    };
    let (sa, sb) = (strides(ma), strides(mb));
    let mut sum = 0.0;
    let mut idx = vec![0usize; dim];
    loop {
        let (mut ia, mut ib, mut w) = (0, 0, 1.0);
        for ax in 0..dim {
            let (p, q, l) = per_axis[ax][idx[ax]];
            ia += p * sa[ax];
            ib += q * sb[ax];
            w *= l;
        }
        sum += w * (a[ia] - b[ib]).powi(2);
        let mut ax = 0;
        loop {
            if ax == dim {
                return sum.sqrt();
            }
            idx[ax] += 1;
            if idx[ax] < per_axis[ax].len() {
                break;
            }
            idx[ax] = 0;
            ax += 1;
        }
    }
}

fn velocity_overlap_l2(ma: &MacMesh, a: &VelocityField, mb: &MacMesh, b: &VelocityField) -> f64 {
    (0..ma.dim())
        .map(|i| overlap_l2(ma, a.component(i), mb, b.component(i), Some(i)).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct Run {
    mesh: MacMesh,
    cfg: SolverConfig,
    traj: Trajectory,
    seconds: f64,
}

fn run_level(config: &RunConfig, n: usize, dt_over_h: f64) -> Result<Run, HarnessError> {
    let mesh = config.mesh(Some(n))?;
    let h = (0..mesh.dim())
        .map(|a| mesh.widths(a).iter().cloned().fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let cfg = SolverConfig {
        dt: level_dt(config.solver.t_end, dt_over_h, h),
        output_every: 0,
        ..config.solver.clone()
    };
    let problem = config.problem.build(config.law.clone());
    let start = Instant::now();
    let traj = run_simulation(&mesh, problem.as_ref(), &cfg, &mut MemorySink::default())
        .map_err(|source| HarnessError::Solver { n, source })?;
    Ok(Run {
        mesh,
        cfg,
        traj,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// `(‖u − Π_E u(T)‖, ‖p − Π_M p(T)‖, ‖ρ − Π_M ρ(T)‖)` for the manufactured
/// solution, with the projected pressure shifted to zero mean.
pub fn analytic_errors(mesh: &MacMesh, state: &macflow::solver::TimeState, mms: &MmsA, quad: &Quadrature) -> Result<(f64, f64, f64), SolverError> {
    let t = state.t;
    let u = project_face_dual(mesh, quad, |i, x| mms.velocity(i, t, x))?;
    let mut p = project_cell(mesh, quad, |x| mms.pressure(t, x))?;
    p.remove_mean(mesh);
    let rho = CellScalarField::constant(mesh, mms.rho);
    let mut du = state.u.clone();
    du.axpy(-1.0, &u);
    let diff = |a: &CellScalarField, b: &CellScalarField| {
        CellScalarField::from_fn(mesh, |k| a.values()[k] - b.values()[k])
    };
    Ok((
        macflow::fields::velocity_l2(mesh, &du),
        cell_lp(mesh, &diff(&state.p, &p), 2.0),
        cell_lp(mesh, &diff(&state.rho, &rho), 2.0),
    ))
}

fn parallel_runs(config: &RunConfig, ns: &[usize], dt_over_h: f64, threads: usize) -> Vec<Result<Run, HarnessError>> {
    let threads = threads.max(1);
    let mut out: Vec<Option<Result<Run, HarnessError>>> = ns.iter().map(|_| None).collect();
    // largest grids first so the slowest runs start early
    let mut order: Vec<usize> = (0..ns.len()).collect();
    order.sort_by_key(|&k| std::cmp::Reverse(ns[k]));
    for chunk in order.chunks(threads) {
        let results: Vec<_> = std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&k| (k, s.spawn(move || run_level(config, ns[k], dt_over_h))))
                .collect();
            handles.into_iter().map(|(k, h)| (k, h.join().expect("level thread panicked"))).collect()
        });
        for (k, r) in results {
            out[k] = Some(r);
        }
    }
    out.into_iter().map(|r| r.unwrap()).collect()
}

/// Runs every level (and the reference, if any) and tabulates the errors.
pub fn convergence_study(config: &RunConfig, levels: &[usize], threads: usize) -> Result<ConvergenceTable, HarnessError> {
    if levels.len() < 3 {
        return Err(HarnessError::TooFewLevels(levels.len()));
    }
    let (dt_over_h, reference) = config.convergence.as_ref().map_or((1.0, None), |c| (c.dt_over_h, c.reference));
    let analytic = config.problem.analytic();
    let reference = match (&analytic, reference) {
        (Some(_), _) => None,
        (None, Some(r)) => Some(r),
        (None, None) => return Err(HarnessError::NoReference(config.problem.name())),
    };
    let mut ns = levels.to_vec();
    ns.extend(reference);
    let mut runs = parallel_runs(config, &ns, dt_over_h, threads)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let reference_run = reference.map(|_| runs.pop().unwrap());
    let quad = Quadrature::new(config.solver.quadrature_order).map_err(|e| HarnessError::Solver {
        n: levels[0],
        source: e.into(),
    })?;

    let mut results = Vec::new();
    for (run, &n) in runs.iter().zip(levels) {
        let last = &run.traj.last;
        let (u_err, p_err, rho_err) = match (&analytic, &reference_run) {
            (Some(mms), _) => analytic_errors(&run.mesh, last, mms, &quad).map_err(|source| HarnessError::Solver { n, source })?,
            (None, Some(r)) => {
                let rl = &r.traj.last;
                (
                    velocity_overlap_l2(&run.mesh, &last.u, &r.mesh, &rl.u),
                    overlap_l2(&run.mesh, last.p.values(), &r.mesh, rl.p.values(), None),
                    overlap_l2(&run.mesh, last.rho.values(), &r.mesh, rl.rho.values(), None),
                )
            }
            (None, None) => unreachable!(),
        };
        let s = &run.traj.summary;
        results.push(LevelResult {
            n,
            h: run.mesh.metrics().h,
            dt: run.cfg.dt,
            steps: s.steps,
            u_err,
            p_err,
            rho_err,
            bv_sum: s.bv_sum,
            h1_time: s.h1_time,
            all_clear: s.all_clear(),
            seconds: run.seconds,
        });
    }
    let orders = results
        .windows(2)
        .map(|w| {
            let h = (w[0].h, w[1].h);
            Orders {
                u: observed_order(h, (w[0].u_err, w[1].u_err)),
                p: observed_order(h, (w[0].p_err, w[1].p_err)),
                rho: observed_order(h, (w[0].rho_err, w[1].rho_err)),
            }
        })
        .collect();
    Ok(ConvergenceTable {
        problem: config.problem.name().into(),
        reference,
        levels: results,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert!((observed_order((0.1, 0.05), (4.0, 1.0)).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(observed_order((0.1, 0.1), (4.0, 4.0)), None);
        assert_eq!(observed_order((0.1, 0.05), (0.0, 0.0)), None);
        assert_eq!(observed_order((0.1, 0.05), (f64::NAN, 1.0)), None);
    }

    #[test]
    fn monotone() {
        assert!(is_monotone(&[1.0, 0.5, 0.1]));
        assert!(!is_monotone(&[1.0, 1.0, 0.1]));
        assert!(is_monotone(&[1e-15, 3e-15, 2e-16]));
        assert!(!is_monotone(&[1.0, f64::NAN]));
    }

    #[test]
    fn dt_lands_on_t_end() {
        let dt = level_dt(0.5, 1.0, 1.0 / 24.0);
        assert_eq!((0.5 / dt).round() as usize, 12);
        assert!(dt <= 1.0 / 24.0);
    }

    #[test]
    fn overlap_norm_of_identical_and_shifted_data() {
        let coarse = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        let fine = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[4, 4]).unwrap();
        let c = CellScalarField::from_fn(&coarse, |k| k as f64);
        // same function sampled on the fine grid
        let f = CellScalarField::from_fn(&fine, |k| {
            let (a, b) = (k % 4, k / 4);
            (a / 2 + 2 * (b / 2)) as f64
        });
        assert!(overlap_l2(&coarse, c.values(), &fine, f.values(), None) < 1e-15);
        let g = CellScalarField::from_fn(&fine, |k| f.values()[k] + 1.0);
        assert!((overlap_l2(&coarse, c.values(), &fine, g.values(), None) - 1.0).abs() < 1e-14);
        // face data: 2 on the single interior x-face, whose dual cell has area 1/2
        let u = VelocityField::from_fn(&coarse, |_| 2.0);
        let w = VelocityField::zeros(&fine);
        let e = overlap_l2(&coarse, u.component(0), &fine, w.component(0), Some(0));
        assert!((e - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn spread() {
        assert_eq!(ConvergenceTable::spread(&[1.0, 3.0, 2.0]), 3.0);
    }
}
