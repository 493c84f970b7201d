//! Configured simulations with CSV diagnostics and snapshots.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;

use crate::config::SimConfig;
use crate::dynamics::{DiagnosticsRecord, FluidState, Simulation};
use crate::error::{Error, Result};
use crate::snapshot::write_snapshot;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

#[derive(Clone, Debug)]
pub struct RunReport {
    pub records: Vec<DiagnosticsRecord>,
    pub csv: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Writes the state as `X0.., f0..` fields.
pub fn save_state(path: &Path, s: &FluidState) -> Result<()> {
    let x = s.x();
    let f = s.f();
    let xn: Vec<String> = (0..x.dim()).map(|i| format!("X{i}")).collect();
    let fname: Vec<String> = (0..f.dim()).map(|a| format!("f{a}")).collect();
    let mut fields: Vec<(&str, &crate::spectral::SpectralField)> = Vec::new();
    for (n, c) in xn.iter().zip(x.components()) {
        fields.push((n, c));
    }
    for (n, c) in fname.iter().zip(f.components()) {
        fields.push((n, c));
    }
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(&mut w, x.grid(), &fields)?;
    w.flush()?;
    Ok(())
}

/// Integrates the configured initial state, writing `diagnostics.csv` and
/// snapshots under `cfg.output.dir`.
pub fn run(cfg: &SimConfig) -> Result<RunReport> {
    cfg.validate()?;
    let geom = cfg.geometry()?;
    let (x, f) = cfg.initial_fields(&geom)?;
    let state = FluidState::initial(x, f, &geom)?;
    let mut sim = Simulation::new(geom, state, cfg.time.dt)?;
    if !cfg.output.timing {
        sim = sim.without_timing();
    }

    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    let csv = dir.join(DIAGNOSTICS_FILE);
    let mut out = BufWriter::new(File::create(&csv)?);
    writeln!(out, "{}", DiagnosticsRecord::CSV_HEADER)?;
    let mut report = RunReport { records: Vec::new(), csv, snapshots: Vec::new() };

    let snap = |step: usize, s: &FluidState, report: &mut RunReport| -> Result<()> {
        let path = dir.join(format!("snapshot_{step:06}.ymh"));
        save_state(&path, s)?;
        report.snapshots.push(path);
        Ok(())
    };

    let mut emit = |rec: DiagnosticsRecord, report: &mut RunReport| -> Result<()> {
        writeln!(out, "{}", rec.csv_row())?;
        out.flush()?;
        report.records.push(rec);
        Ok(())
    };

    emit(sim.diagnostics(0.0)?, &mut report)?;
    if cfg.output.snap_every > 0 {
        snap(0, sim.state(), &mut report)?;
    }
    for step in 1..=cfg.time.steps {
        let wall = match sim.advance() {
            Ok(ms) => ms,
            Err(e) => {
                let path = dir.join(format!("snapshot_failed_{:06}.ymh", step - 1));
                save_state(&path, sim.state())?;
                report.snapshots.push(path);
                return Err(e);
            }
        };
        if step % cfg.output.diag_every == 0 {
            let rec = sim.diagnostics(wall)?;
            if !rec.total.is_finite() {
                let path = dir.join(format!("snapshot_failed_{step:06}.ymh"));
                save_state(&path, sim.state())?;
                report.snapshots.push(path);
                return Err(Error::Numerical(format!("non-finite energy at step {step}")));
            }
            emit(rec, &mut report)?;
            info!("step {step}: t = {:.6}, E = {:.15e}", rec.t, rec.total);
        }
        if cfg.output.snap_every > 0 && step % cfg.output.snap_every == 0 {
            snap(step, sim.state(), &mut report)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::read_snapshot;

    fn small(dir: &Path) -> SimConfig {
        let mut c = SimConfig::template("passive").unwrap();
        c.grid.resolution = 16;
        c.time.steps = 4;
        c.time.dt = 1e-2;
        c.output.dir = dir.to_path_buf();
        c.output.diag_every = 2;
        c.output.snap_every = 4;
        c.output.timing = false;
        c
    }

    fn scratch(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("ymh-run-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn zero_steps_emit_initial_record_only() {
        let dir = scratch("zero");
        let mut c = small(&dir);
        c.time.steps = 0;
        let r = run(&c).unwrap();
        assert_eq!(r.records.len(), 1);
        let text = fs::read_to_string(&r.csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn outputs_are_reproducible() {
        let d1 = scratch("a");
        let d2 = scratch("b");
        let r1 = run(&small(&d1)).unwrap();
        let r2 = run(&small(&d2)).unwrap();
        assert_eq!(r1.records.len(), 3);
        assert_eq!(fs::read(&r1.csv).unwrap(), fs::read(&r2.csv).unwrap());
        assert_eq!(r1.snapshots.len(), 2);
        for (a, b) in r1.snapshots.iter().zip(&r2.snapshots) {
            assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
        }
        let s = read_snapshot(&mut File::open(&r1.snapshots[1]).unwrap()).unwrap();
        let names: Vec<&str> = s.fields.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["X0", "X1", "f0"]);
        fs::remove_dir_all(d1).unwrap();
        fs::remove_dir_all(d2).unwrap();
    }
}
