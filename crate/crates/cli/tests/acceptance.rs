//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! fails.

#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use macflow::mesh::AxisPartition;
use macflow::operators::{
    convection_apply, convection_matrix, diffusion_apply, diffusion_matrix, divergence_mac, divergence_matrix,
    mass_fluxes, pressure_gradient, pressure_gradient_matrix, viscosity_tensor, AdvectionScheme, ViscosityLaw,
};
use macflow::solver::{run_simulation, transport_solve, MemorySink, SolverConfig};
use macflow::verification::{check_dualities, check_inequalities, SuiteReport, KORN, POINCARE};
use macflow::{CellScalarField, FaceId, MacMesh, VelocityField};
use macflow_cli::app::default_verify_meshes;
use macflow_cli::config::{load_config, RunConfig};
use macflow_cli::harness::{convergence_study, is_monotone, ConvergenceTable};
use macflow_cli::problems::ProblemSpec;

struct Verdict {
    passed: bool,
    detail: String,
}

fn config(name: &str) -> RunConfig {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "configs", name].iter().collect();
    load_config(&p).unwrap()
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn worst(reports: &[SuiteReport]) -> f64 {
    reports
        .iter()
        .flat_map(|r| r.checks.iter())
        .map(|c| c.value)
        .fold(0.0, f64::max)
}

fn exact_identities() -> Verdict {
    let start = Instant::now();
    let reports: Vec<SuiteReport> = default_verify_meshes()
        .iter()
        .enumerate()
        .map(|(k, (_, m))| check_dualities(m, 100, 100 + k as u64))
        .collect();
    let t = start.elapsed();
    let failed: Vec<&str> = reports.iter().flat_map(|r| r.failures()).collect();
    Verdict {
        passed: failed.is_empty() && worst(&reports) <= 1e-12 && within(t, 10.0),
        detail: format!(
            "five dualities, 100 trials on uniform 8x8 and stretched 16x16, max residual {:.2e}, {:.2} s{}",
            worst(&reports),
            t.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(", failed {failed:?}") }
        ),
    }
}

fn inequalities() -> Verdict {
    let start = Instant::now();
    let reports: Vec<SuiteReport> = default_verify_meshes()
        .iter()
        .enumerate()
        .map(|(k, (_, m))| check_inequalities(m, 1000, 200 + k as u64))
        .collect();
    let t = start.elapsed();
    let failed: Vec<&str> = reports.iter().flat_map(|r| r.failures()).collect();
    let korn = reports.iter().filter_map(|r| r.get(KORN)).map(|c| c.value).fold(0.0, f64::max);
    let poincare = reports
        .iter()
        .filter_map(|r| r.get(POINCARE))
        .map(|c| c.value / c.bound)
        .fold(0.0, f64::max);
    Verdict {
        passed: failed.is_empty() && within(t, 10.0),
        detail: format!(
            "1000 fields per grid, Korn ratio {korn:.4} <= sqrt 2, Poincare ratio at {:.1}% of diam, viscosity bounds held, {:.2} s{}",
            100.0 * poincare,
            t.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!(", failed {failed:?}") }
        ),
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn wobble(k: usize, salt: f64) -> f64 {
    (1.7 * k as f64 + salt).sin()
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn oracle_equivalence() -> Verdict {
    let meshes = [
        MacMesh::build(vec![
            AxisPartition::new(vec![0.0, 0.2, 0.7, 1.0]).unwrap(),
            AxisPartition::new(vec![0.0, 0.5, 0.6, 1.0]).unwrap(),
        ])
        .unwrap(),
        MacMesh::build(vec![
            AxisPartition::stretched(0.0, 2.0, 3, 4.0).unwrap(),
            AxisPartition::new(vec![-1.0, -0.1, 0.3, 1.5]).unwrap(),
        ])
        .unwrap(),
    ];
    let (mut op_err, mut asym) = (0.0f64, 0.0f64);
    for (s, mesh) in meshes.iter().enumerate() {
        let salt = s as f64;
        let u = VelocityField::from_fn(mesh, |f| wobble(f.index + 11 * f.dir, salt));
        let ud = u.to_dofs(mesh);
        let p = CellScalarField::from_fn(mesh, |k| wobble(k, 0.3 + salt));
        let rho = CellScalarField::from_fn(mesh, |k| 1.25 + 0.75 * wobble(k, 0.9 + salt));
        let mu = viscosity_tensor(mesh, &rho, &ViscosityLaw::Linear { a: 0.1, b: 0.3 }).unwrap();
        let w = VelocityField::from_fn(mesh, |f| wobble(3 * f.index + f.dir, 2.0 + salt));
        let fluxes = mass_fluxes(mesh, &rho, &w);
        op_err = op_err
            .max(max_diff(&divergence_matrix(mesh).matvec(&ud), divergence_mac(mesh, &u).values()))
            .max(max_diff(
                &pressure_gradient_matrix(mesh).matvec(p.values()),
                &pressure_gradient(mesh, &p).to_dofs(mesh),
            ))
            .max(max_diff(&diffusion_matrix(mesh, &mu).matvec(&ud), &diffusion_apply(mesh, &mu, &u).to_dofs(mesh)));
        for scheme in [AdvectionScheme::Centered, AdvectionScheme::Upwind] {
            op_err = op_err.max(max_diff(
                &convection_matrix(mesh, &fluxes, scheme).matvec(&ud),
                &convection_apply(mesh, &fluxes, &u, scheme).to_dofs(mesh),
            ));
        }
        let vol: Vec<f64> = (0..mesh.n_velocity_dofs()).map(|k| mesh.face_dual_volume(mesh.dof_face(k))).collect();
        asym = asym.max(diffusion_matrix(mesh, &mu).scale_rows(&vol).max_asymmetry());
    }

    // four cells on [0, 0.4, 1] × [0, 0.7, 1]
    let mesh = MacMesh::build(vec![
        AxisPartition::new(vec![0.0, 0.4, 1.0]).unwrap(),
        AxisPartition::new(vec![0.0, 0.7, 1.0]).unwrap(),
    ])
    .unwrap();
    let (hx, hy) = ([0.4, 0.6], [0.7, 0.3]);
    let (ux0, ux1, uy0, uy1) = (1.5, -0.5, -2.0, 0.75);
    let u = VelocityField::from_fn(&mesh, |f: FaceId| {
        let m = mesh.face_multi(f);
        match (f.dir, m[1], m[0]) {
            (0, 0, _) => ux0,
            (0, _, _) => ux1,
            (1, _, 0) => uy0,
            _ => uy1,
        }
    });
    let dt = 0.05;
    let rho_n = vec![1.0, 2.0, 3.0, 4.0];
    let vol = [hx[0] * hy[0], hx[1] * hy[0], hx[0] * hy[1], hx[1] * hy[1]];
    let mut a = vec![vec![0.0; 4]; 4];
    let mut add = |k: usize, l: usize, g: f64| {
        if g >= 0.0 {
            a[k][k] += g / vol[k];
            a[l][k] -= g / vol[l];
        } else {
            a[k][l] += g / vol[k];
            a[l][l] -= g / vol[l];
        }
    };
    add(0, 1, hy[0] * ux0);
    add(2, 3, hy[1] * ux1);
    add(0, 2, hx[0] * uy0);
    add(1, 3, hx[1] * uy1);
    for (k, row) in a.iter_mut().enumerate() {
        row[k] += 1.0 / dt;
    }
    let b: Vec<f64> = rho_n.iter().map(|r| r / dt).collect();
    let expected = dense_solve(a, b);
    let (rho, _) = transport_solve(&mesh, &CellScalarField::new(&mesh, rho_n).unwrap(), &u, dt, 1e-12).unwrap();
    let transport_err = max_diff(rho.values(), &expected);

    Verdict {
        passed: op_err <= 1e-13 && asym <= 1e-12 && transport_err <= 1e-12,
        detail: format!(
            "matrix vs matrix-free {op_err:.2e}, diffusion asymmetry {asym:.2e}, 4-cell transport vs dense solve {transport_err:.2e}"
        ),
    }
}

fn rayleigh_taylor() -> Verdict {
    let start = Instant::now();
    let base = config("rayleigh-taylor.json");
    let mesh = base.mesh(None).unwrap();
    let mut lines = Vec::new();
    let mut passed = true;
    let energy = RunConfig {
        problem: match base.problem.clone() {
            ProblemSpec::RayleighTaylor { rho_light, rho_heavy, thickness, amplitude, .. } => ProblemSpec::RayleighTaylor {
                rho_light,
                rho_heavy,
                thickness,
                amplitude,
                gravity: [0.0, 0.0],
                vortex: 1.0,
            },
            other => other,
        },
        ..base.clone()
    };
    for (label, cfg) in [("gravity", &base), ("unforced vortex", &energy)] {
        let solver = SolverConfig {
            output_every: 0,
            ..cfg.solver.clone()
        };
        let problem = cfg.problem.build(cfg.law.clone());
        let traj = match run_simulation(&mesh, problem.as_ref(), &solver, &mut MemorySink::default()) {
            Ok(t) => t,
            Err(e) => {
                passed = false;
                lines.push(format!("{label}: {e}"));
                continue;
            }
        };
        let s = &traj.summary;
        let (lo, hi) = s.rho_bounds;
        let drift = (lo - s.rho_min).max(s.rho_max - hi).max(0.0);
        let ok = s.steps == 100
            && drift <= 1e-12 * hi.max(1.0)
            && s.max_mass_drift <= 1e-12
            && s.total_mass_drift <= 1e-12
            && s.max_rho_identity <= 10.0 * solver.linear_tol
            && s.max_div <= 1e-10
            && s.all_clear();
        passed &= ok;
        lines.push(format!(
            "{label}: {} steps, bounds drift {drift:.1e}, mass drift {:.1e}, rho identity {:.1e}, div {:.1e}, energy residual {:.1e}, flags {}",
            s.steps,
            s.total_mass_drift.max(s.max_mass_drift),
            s.max_rho_identity,
            s.max_div,
            s.max_energy_residual,
            if s.all_clear() { "clear".to_string() } else { format!("{:?}", s.violations) }
        ));
    }
    let t = start.elapsed();
    passed &= within(t, 300.0);
    Verdict {
        passed,
        detail: format!("32x64, 100 steps of 1e-3; {}; {:.1} s", lines.join("; "), t.as_secs_f64()),
    }
}

fn orders(table: &ConvergenceTable) -> String {
    table
        .orders
        .iter()
        .map(|o| o.u.map_or("undefined".into(), |v| format!("{v:.2}")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn strictly_decreasing(e: &[f64]) -> bool {
    e.windows(2).all(|w| w[1] < w[0])
}

fn convergence(mms_b: &mut Option<ConvergenceTable>) -> Verdict {
    let start = Instant::now();
    let a_cfg = config("mms-a.json");
    let a = convergence_study(&a_cfg, &a_cfg.convergence.as_ref().unwrap().levels, 1);
    let b_cfg = config("mms-b.json");
    let b = convergence_study(&b_cfg, &b_cfg.convergence.as_ref().unwrap().levels, 1);
    let t = start.elapsed();
    let (a, b) = match (a, b) {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            return Verdict {
                passed: false,
                detail: format!("study failed: {:?} {:?}", a.err(), b.err()),
            }
        }
    };
    let a_ok = a.levels.len() == 4
        && a.orders.iter().all(|o| o.u.is_some_and(|v| v >= 0.9))
        && is_monotone(&a.u_errors())
        && is_monotone(&a.p_errors())
        && is_monotone(&a.rho_errors());
    let b_ok = b.levels.len() == 3
        && b.reference == Some(256)
        && strictly_decreasing(&b.u_errors())
        && strictly_decreasing(&b.p_errors())
        && strictly_decreasing(&b.rho_errors());
    let detail = format!(
        "MMS-A 8..64 velocity orders [{}], pressure errors {:.2e} -> {:.2e}, density errors <= {:.1e}; MMS-B vs 256^2 velocity {:.2e} -> {:.2e}, pressure {:.2e} -> {:.2e}, density {:.2e} -> {:.2e}; {:.0} s",
        orders(&a),
        a.p_errors()[0],
        a.p_errors()[3],
        a.rho_errors().iter().cloned().fold(0.0, f64::max),
        b.u_errors()[0],
        b.u_errors()[2],
        b.p_errors()[0],
        b.p_errors()[2],
        b.rho_errors()[0],
        b.rho_errors()[2],
        t.as_secs_f64()
    );
    *mms_b = Some(b);
    Verdict {
        passed: a_ok && b_ok && within(t, 900.0),
        detail,
    }
}

fn boundedness(mms_b: Option<&ConvergenceTable>) -> Verdict {
    let Some(b) = mms_b else {
        return Verdict {
            passed: false,
            detail: "no MMS-B refinement available".into(),
        };
    };
    let bv: Vec<f64> = b.levels.iter().map(|l| l.bv_sum).collect();
    let h1: Vec<f64> = b.levels.iter().map(|l| l.h1_time).collect();
    let (sbv, sh1) = (ConvergenceTable::spread(&bv), ConvergenceTable::spread(&h1));
    Verdict {
        passed: sbv < 4.0 && sh1 < 4.0 && b.levels.iter().all(|l| l.all_clear),
        detail: format!("over MMS-B 16..64 BV sum varies by {sbv:.2}x, time-integrated H1 norm by {sh1:.2}x"),
    }
}

fn main() -> ExitCode {
    let mut mms_b = None;
    let verdicts = [
        ("exact identities", exact_identities()),
        ("inequalities", inequalities()),
        ("oracle equivalence", oracle_equivalence()),
        ("Rayleigh-Taylor invariants", rayleigh_taylor()),
        ("convergence", convergence(&mut mms_b)),
    ];
    let last = ("boundedness under refinement", boundedness(mms_b.as_ref()));
    let mut all = true;
    for (k, (name, v)) in verdicts.iter().chain(std::iter::once(&last)).enumerate() {
        println!("{} criterion {}: {name}: {}", if v.passed { "PASS" } else { "FAIL" }, k + 1, v.detail);
        all &= v.passed;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
