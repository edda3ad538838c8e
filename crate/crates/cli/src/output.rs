//! Writers: diagnostics CSV, legacy VTK rectilinear grids, raw staggered
//! values and coordinate-format matrix dumps.
//!
//! Staggered CSV layout, one row per entity:
//! `kind,component,id,x,y,z,value` where `kind` is `rho` or `p` (cells,
//! `component` empty) or `u` (faces of direction `component`, all faces
//! including walls). Coordinates are cell or face centres.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use macflow::fields::reconstruct_face_to_cell;
use macflow::mesh::FaceId;
use macflow::operators::{
    convection_matrix, diffusion_matrix, divergence_matrix, mass_fluxes, pressure_gradient_matrix, viscosity_tensor,
    ViscosityLaw,
};
use macflow::solver::{saddle_system, transport_matrix, DiagnosticsSink, Forcing, MomentumInputs, SolverConfig, TimeState};
use macflow::verification::{DiagnosticsRecord, CSV_HEADER};
use macflow::MacMesh;

pub fn write_vtk<W: Write>(mut w: W, mesh: &MacMesh, state: &TimeState) -> io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "macflow step {} t {:e}", state.step, state.t)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET RECTILINEAR_GRID")?;
    let coords: Vec<Vec<f64>> = (0..3)
        .map(|a| {
            if a < mesh.dim() {
                mesh.axes()[a].breakpoints().to_vec()
            } else {
                vec![0.0]
            }
        })
        .collect();
    writeln!(w, "DIMENSIONS {} {} {}", coords[0].len(), coords[1].len(), coords[2].len())?;
    for (name, c) in ["X", "Y", "Z"].iter().zip(&coords) {
        writeln!(w, "{name}_COORDINATES {} double", c.len())?;
        let line: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    writeln!(w, "CELL_DATA {}", mesh.n_cells())?;
    for (name, q) in [("density", &state.rho), ("pressure", &state.p)] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in q.values() {
            writeln!(w, "{v:e}")?;
        }
    }
    // cell-centred velocity, for display only
    let centred: Vec<_> = (0..mesh.dim())
        .map(|i| reconstruct_face_to_cell(mesh, state.u.component(i), i))
        .collect();
    writeln!(w, "VECTORS velocity double")?;
    for k in 0..mesh.n_cells() {
        let c = |i: usize| centred.get(i).map_or(0.0, |f| f.values()[k]);
        writeln!(w, "{:e} {:e} {:e}", c(0), c(1), c(2))?;
    }
    Ok(())
}

pub fn write_staggered_csv<W: Write>(mut w: W, mesh: &MacMesh, state: &TimeState) -> io::Result<()> {
    writeln!(w, "kind,component,id,x,y,z,value")?;
    for (kind, q) in [("rho", &state.rho), ("p", &state.p)] {
        for (k, v) in q.values().iter().enumerate() {
            let x = mesh.cell_center(k);
            writeln!(w, "{kind},,{k},{:e},{:e},{:e},{v:e}", x[0], x[1], x[2])?;
        }
    }
    for i in 0..mesh.dim() {
        for (index, v) in state.u.component(i).iter().enumerate() {
            let x = mesh.face_center(FaceId { dir: i, index });
            writeln!(w, "u,{i},{index},{:e},{:e},{:e},{v:e}", x[0], x[1], x[2])?;
        }
    }
    Ok(())
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes the VTK file and/or the staggered CSV of `state` under `dir`.
pub fn write_snapshot(dir: &Path, mesh: &MacMesh, state: &TimeState, vtk: bool, csv: bool) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    if vtk {
        let p = dir.join(format!("step_{:06}.vtk", state.step));
        let mut w = create(&p)?;
        write_vtk(&mut w, mesh, state)?;
        w.flush()?;
        out.push(p);
    }
    if csv {
        let p = dir.join(format!("step_{:06}.csv", state.step));
        let mut w = create(&p)?;
        write_staggered_csv(&mut w, mesh, state)?;
        w.flush()?;
        out.push(p);
    }
    Ok(out)
}

/// Operators at the initial state in coordinate format, one file each.
pub fn dump_matrices(
    dir: &Path,
    mesh: &MacMesh,
    state: &TimeState,
    law: &ViscosityLaw,
    forcing: &Forcing,
    cfg: &SolverConfig,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mu = viscosity_tensor(mesh, &state.rho, law).map_err(|e| io::Error::other(e.to_string()))?;
    let fluxes = mass_fluxes(mesh, &state.rho, &state.u);
    let force = forcing.faces(mesh, None, &state.rho_dual);
    let inp = MomentumInputs {
        rho_dual_new: &state.rho_dual,
        rho_dual_old: &state.rho_dual,
        u_old: &state.u,
        fluxes: &fluxes,
        mu: &mu,
        force: &force,
        dt: cfg.dt,
        scheme: cfg.advection_scheme,
    };
    let mats = [
        ("divergence", divergence_matrix(mesh)),
        ("gradient", pressure_gradient_matrix(mesh)),
        ("diffusion", diffusion_matrix(mesh, &mu)),
        ("convection", convection_matrix(mesh, &fluxes, cfg.advection_scheme)),
        ("transport", transport_matrix(mesh, &state.u, cfg.dt)),
        ("saddle", saddle_system(mesh, &inp, true).0),
    ];
    let mut out = Vec::new();
    for (name, m) in mats {
        let p = dir.join(format!("{name}.coo"));
        let mut w = create(&p)?;
        m.write_coordinate(&mut w)?;
        w.flush()?;
        out.push(p);
    }
    Ok(out)
}

/// Streams diagnostics to `diagnostics.csv` and snapshots to
/// `snapshots/`. The first I/O error is kept and later writes are skipped.
pub struct FileSink {
    dir: PathBuf,
    csv: BufWriter<File>,
    vtk: bool,
    staggered: bool,
    pub last_snapshot: Option<usize>,
    pub error: Option<io::Error>,
}

impl FileSink {
    pub fn create(dir: &Path, vtk: bool, staggered: bool) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let mut csv = create(&dir.join("diagnostics.csv"))?;
        writeln!(csv, "{CSV_HEADER}")?;
        Ok(Self {
            dir: dir.to_path_buf(),
            csv,
            vtk,
            staggered,
            last_snapshot: None,
            error: None,
        })
    }

    fn keep<T>(&mut self, r: io::Result<T>) {
        if let (Err(e), None) = (r, &self.error) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        let r = self.csv.flush();
        self.keep(r);
        match self.error {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

impl DiagnosticsSink for FileSink {
    fn record(&mut self, rec: &DiagnosticsRecord) {
        if self.error.is_none() {
            let r = writeln!(self.csv, "{}", rec.csv_row());
            self.keep(r);
        }
    }

    fn snapshot(&mut self, mesh: &MacMesh, state: &TimeState) {
        if self.error.is_none() {
            let r = write_snapshot(&self.dir.join("snapshots"), mesh, state, self.vtk, self.staggered);
            self.keep(r);
            self.last_snapshot = Some(state.step);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use macflow::{CellScalarField, VelocityField};

    #[test]
    fn vtk_layout() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 2.0)], &[2, 3]).unwrap();
        let rho = CellScalarField::from_fn(&mesh, |k| k as f64);
        let u = VelocityField::from_fn(&mesh, |_| 1.0);
        let st = TimeState::new(&mesh, rho, u);
        let mut buf = Vec::new();
        write_vtk(&mut buf, &mesh, &st).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("DIMENSIONS 3 4 1"));
        assert!(s.contains("CELL_DATA 6"));
        assert!(s.contains("SCALARS density double 1"));
        assert!(s.contains("X_COORDINATES 3 double\n0e0 5e-1 1e0\n"));
        let vectors: Vec<&str> = s.lines().skip_while(|l| !l.starts_with("VECTORS")).skip(1).collect();
        assert_eq!(vectors.len(), 6);
        assert!(vectors.iter().all(|l| l.split(' ').count() == 3));
    }

    #[test]
    fn staggered_rows() {
        let mesh = MacMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[2, 2]).unwrap();
        let st = TimeState::new(&mesh, CellScalarField::constant(&mesh, 1.0), VelocityField::zeros(&mesh));
        let mut buf = Vec::new();
        write_staggered_csv(&mut buf, &mesh, &st).unwrap();
        let s = String::from_utf8(buf).unwrap();
        // header, 4 rho, 4 p, 6 + 6 faces
        assert_eq!(s.lines().count(), 1 + 4 + 4 + 12);
        assert!(s.lines().nth(1).unwrap().starts_with("rho,,0,2.5e-1,2.5e-1,0e0,1e0"));
    }
}
