#![allow(clippy::needless_range_loop)]

use macflow::mesh::AxisPartition;
use macflow::operators::{
    convection_apply, convection_matrix, diffusion_apply, diffusion_matrix, divergence_mac, divergence_matrix,
    dual_cell_density, mass_fluxes, pressure_gradient, pressure_gradient_matrix, viscosity_tensor, AdvectionScheme,
    ViscosityLaw, ViscosityTensorField,
};
use macflow::solver::{momentum_solve, transport_solve, MomentumInputs};
use macflow::{CellScalarField, FaceId, MacMesh, VelocityField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            if m == 0.0 {
                continue;
            }
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

fn three_by_three() -> Vec<MacMesh> {
    vec![
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
        MacMesh::build(vec![
            AxisPartition::new(vec![0.0, 0.3, 0.4, 1.0]).unwrap(),
            AxisPartition::stretched(0.0, 1.0, 3, 2.0).unwrap(),
            AxisPartition::new(vec![0.0, 0.1, 0.5, 0.6]).unwrap(),
        ])
        .unwrap(),
    ]
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn random_velocity(mesh: &MacMesh, rng: &mut ChaCha8Rng) -> VelocityField {
    VelocityField::from_fn(mesh, |_| rng.random_range(-1.0..1.0))
}

#[test]
fn assembled_operators_equal_matrix_free_apply() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for mesh in three_by_three() {
        for _ in 0..5 {
            let u = random_velocity(&mesh, &mut rng);
            let ud = u.to_dofs(&mesh);
            let p = CellScalarField::from_fn(&mesh, |_| rng.random_range(-1.0..1.0));
            let rho = CellScalarField::from_fn(&mesh, |_| rng.random_range(0.5..2.0));
            let mu = viscosity_tensor(&mesh, &rho, &ViscosityLaw::Linear { a: 0.1, b: 0.3 }).unwrap();
            let fluxes = mass_fluxes(&mesh, &rho, &random_velocity(&mesh, &mut rng));

            let d = max_diff(&divergence_matrix(&mesh).matvec(&ud), divergence_mac(&mesh, &u).values());
            assert!(d <= 1e-13, "divergence {d:e}");
            let d = max_diff(
                &pressure_gradient_matrix(&mesh).matvec(p.values()),
                &pressure_gradient(&mesh, &p).to_dofs(&mesh),
            );
            assert!(d <= 1e-13, "gradient {d:e}");
            let d = max_diff(&diffusion_matrix(&mesh, &mu).matvec(&ud), &diffusion_apply(&mesh, &mu, &u).to_dofs(&mesh));
            assert!(d <= 1e-13, "diffusion {d:e}");
            for scheme in [AdvectionScheme::Centered, AdvectionScheme::Upwind] {
                let d = max_diff(
                    &convection_matrix(&mesh, &fluxes, scheme).matvec(&ud),
                    &convection_apply(&mesh, &fluxes, &u, scheme).to_dofs(&mesh),
                );
                assert!(d <= 1e-13, "convection {scheme} {d:e}");
            }
        }
    }
}

#[test]
fn weighted_diffusion_matrix_is_symmetric() {
    for mesh in three_by_three() {
        let mu = ViscosityTensorField::from_cell_values(&mesh, (0..mesh.n_cells()).map(|k| 0.1 + k as f64).collect());
        let vol: Vec<f64> = (0..mesh.n_velocity_dofs()).map(|k| mesh.face_dual_volume(mesh.dof_face(k))).collect();
        let a = diffusion_matrix(&mesh, &mu).scale_rows(&vol);
        assert!(a.max_asymmetry() <= 1e-12);
    }
}

#[test]
fn transport_step_matches_hand_built_four_cell_system() {
    // cells 0 1 / 2 3 on [0, 0.4, 1] × [0, 0.7, 1], a clockwise-ish swirl
    let mesh = MacMesh::build(vec![
        AxisPartition::new(vec![0.0, 0.4, 1.0]).unwrap(),
        AxisPartition::new(vec![0.0, 0.7, 1.0]).unwrap(),
    ])
    .unwrap();
    let (hx, hy) = ([0.4, 0.6], [0.7, 0.3]);
    // interior x-faces: between 0|1 (row 0) and 2|3 (row 1); y-faces: 0|2, 1|3
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
    // outward fluxes |σ| u_{K,σ}
    let f01 = hy[0] * ux0; // 0 → 1
    let f23 = hy[1] * ux1; // 2 → 3
    let f02 = hx[0] * uy0; // 0 → 2
    let f13 = hx[1] * uy1; // 1 → 3
    let mut a = vec![vec![0.0; 4]; 4];
    let mut add = |k: usize, l: usize, g: f64| {
        // flux g from k to l, upwinded
        if g >= 0.0 {
            a[k][k] += g / vol[k];
            a[l][k] -= g / vol[l];
        } else {
            a[k][l] += g / vol[k];
            a[l][l] -= g / vol[l];
        }
    };
    add(0, 1, f01);
    add(2, 3, f23);
    add(0, 2, f02);
    add(1, 3, f13);
    for (k, row) in a.iter_mut().enumerate() {
        row[k] += 1.0 / dt;
    }
    let b: Vec<f64> = rho_n.iter().map(|r| r / dt).collect();
    let expected = dense_solve(a, b);

    let (rho, _) = transport_solve(&mesh, &CellScalarField::new(&mesh, rho_n).unwrap(), &u, dt, 1e-12).unwrap();
    assert!(max_diff(rho.values(), &expected) <= 1e-12);
}

#[test]
fn stokes_solve_matches_dense_lagrange_multiplier_system() {
    let mesh = MacMesh::build(vec![
        AxisPartition::new(vec![0.0, 0.15, 0.5, 0.7, 1.0]).unwrap(),
        AxisPartition::stretched(0.0, 1.0, 4, 2.5).unwrap(),
    ])
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rho = CellScalarField::from_fn(&mesh, |_| rng.random_range(1.0..3.0));
    let rd = dual_cell_density(&mesh, &rho);
    let mu = viscosity_tensor(&mesh, &rho, &ViscosityLaw::Linear { a: 0.01, b: 0.05 }).unwrap();
    let u_old = random_velocity(&mesh, &mut rng);
    let force = random_velocity(&mesh, &mut rng);
    // fluxes of a zero velocity: convection off
    let fluxes = mass_fluxes(&mesh, &rho, &VelocityField::zeros(&mesh));
    let dt = 0.02;
    let inp = MomentumInputs {
        rho_dual_new: &rd,
        rho_dual_old: &rd,
        u_old: &u_old,
        fluxes: &fluxes,
        mu: &mu,
        force: &force,
        dt,
        scheme: AdvectionScheme::Centered,
    };
    let (u, p, _) = momentum_solve(&mesh, &inp, 1e-12).unwrap();

    // columns of the operators from matrix-free applies on unit vectors
    let nv = mesh.n_velocity_dofs();
    let np = mesh.n_cells();
    let n = nv + np + 1;
    let mut a = vec![vec![0.0; n]; n];
    for c in 0..nv {
        let mut e = vec![0.0; nv];
        e[c] = 1.0;
        let ec = VelocityField::from_dofs(&mesh, &e).unwrap();
        let du = diffusion_apply(&mesh, &mu, &ec).to_dofs(&mesh);
        let dv = divergence_mac(&mesh, &ec);
        for r in 0..nv {
            let f = mesh.dof_face(r);
            let time = if r == c { rd[f.dir][f.index] / dt } else { 0.0 };
            a[r][c] = time - du[r];
        }
        for k in 0..np {
            a[nv + k][c] = dv.values()[k];
        }
    }
    for k in 0..np {
        let mut e = vec![0.0; np];
        e[k] = 1.0;
        let g = pressure_gradient(&mesh, &CellScalarField::new(&mesh, e).unwrap()).to_dofs(&mesh);
        for r in 0..nv {
            a[r][nv + k] = g[r];
        }
        a[nv + k][n - 1] = mesh.cell_volume(k);
        a[n - 1][nv + k] = mesh.cell_volume(k);
    }
    let mut b = vec![0.0; n];
    for r in 0..nv {
        let f = mesh.dof_face(r);
        b[r] = force.get(f) + rd[f.dir][f.index] * u_old.get(f) / dt;
    }
    let x = dense_solve(a, b);
    assert!(max_diff(&u.to_dofs(&mesh), &x[..nv]) <= 1e-10);
    assert!(max_diff(p.values(), &x[nv..nv + np]) <= 1e-10);
    assert!(x[n - 1].abs() <= 1e-10);
}
