use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::RunResult;
use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridSpec, OccupancySet};

/// Machine-readable summary of the run-level checks.
#[derive(Debug, Clone, Serialize)]
pub struct AcceptanceReport {
    pub scenario: String,
    pub strategy: String,
    pub seed: u64,
    pub vehicles: usize,
    pub scheduled: usize,
    pub allocations_disjoint: bool,
    pub collisions: usize,
    pub collision_pairs: Vec<(u32, u32)>,
    pub incidents: usize,
    pub success: bool,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_file(path: &Path, f: impl FnOnce(BufWriter<File>) -> csv::Result<()>) -> Result<PathBuf> {
    f(create(path)?).map_err(|e| Error::csv(path, e))?;
    Ok(path.to_path_buf())
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

/// Write every artefact of `result` into `dir`; returns the files written.
pub fn export(result: &RunResult, scenario: &Scenario, dir: &Path) -> Result<Vec<PathBuf>> {
    let traj_dir = dir.join("trajectories");
    fs::create_dir_all(&traj_dir).map_err(|e| Error::io(&traj_dir, e))?;
    let mut written = Vec::new();

    written.push(csv_file(&dir.join("schedule.csv"), |w| result.schedule.write_csv(w))?);

    written.push(csv_file(&dir.join("occupancy.csv"), |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["vehicle", "j_x", "j_y", "j_t"])?;
        for a in &result.schedule.allocations {
            for c in a.occupancy.cells() {
                w.write_record([a.vehicle(), c.jx, c.jy, c.jt].map(|v| v.to_string()))?;
            }
        }
        w.flush()?;
        Ok(())
    })?);

    written.push(csv_file(&dir.join("tunnels.csv"), |w| {
        let mut w = csv::Writer::from_writer(w);
        w.write_record(["vehicle", "j_x", "j_y", "j_t"])?;
        for t in &result.schedule.tunnels {
            for c in t.cells.cells() {
                w.write_record([t.vehicle, c.jx, c.jy, c.jt].map(|v| v.to_string()))?;
            }
        }
        w.flush()?;
        Ok(())
    })?);

    for v in &result.vehicles {
        let path = traj_dir.join(format!("vehicle_{:03}.csv", v.vehicle));
        written.push(csv_file(&path, |w| {
            let mut w = csv::Writer::from_writer(w);
            w.write_record(["t", "x", "y", "theta", "v", "accel", "steer", "ref_x", "ref_y"])?;
            for s in &v.samples {
                w.write_record(
                    [s.t, s.x, s.y, s.heading, s.speed, s.accel, s.steer, s.ref_x, s.ref_y]
                        .map(fixed),
                )?;
            }
            w.flush()?;
            Ok(())
        })?);
        if let Some(r) = &v.refinement {
            let path = traj_dir.join(format!("refined_{:03}.csv", v.vehicle));
            written.push(csv_file(&path, |w| r.control_points.write_csv(w, 0.05))?);
        }
    }

    let metrics = dir.join("metrics.toml");
    let text = toml::to_string(&result.metrics).map_err(|e| Error::Serialize(e.to_string()))?;
    fs::write(&metrics, text).map_err(|e| Error::io(&metrics, e))?;
    written.push(metrics);

    let report = AcceptanceReport {
        scenario: scenario.name.clone(),
        strategy: result.strategy.to_string(),
        seed: scenario.seed,
        vehicles: result.metrics.vehicles,
        scheduled: result.metrics.scheduled,
        allocations_disjoint: result.schedule.pairwise_disjoint()?,
        collisions: result.metrics.collisions,
        collision_pairs: result.collision_pairs.clone(),
        incidents: result.metrics.incidents,
        success: result.success(),
    };
    let path = dir.join("acceptance.json");
    let mut f = create(&path)?;
    serde_json::to_writer_pretty(&mut f, &report).map_err(|e| Error::Serialize(e.to_string()))?;
    f.write_all(b"\n").map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

/// Read an `occupancy.csv` dump back into one set per vehicle.
pub fn read_allocations_csv(path: &Path, spec: &GridSpec) -> Result<BTreeMap<u32, OccupancySet>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut out: BTreeMap<u32, OccupancySet> = BTreeMap::new();
    for rec in r.deserialize::<(u32, u32, u32, u32)>() {
        let (v, jx, jy, jt) = rec.map_err(|e| Error::csv(path, e))?;
        if jx == 0 || jx > spec.nx || jy == 0 || jy > spec.ny || jt == 0 {
            return Err(Error::Config(format!(
                "{}: cell ({jx}, {jy}, {jt}) outside grid",
                path.display()
            )));
        }
        out.entry(v)
            .or_insert_with(|| OccupancySet::new(spec).with_owner(v))
            .insert(CellIndex::new(jx, jy, jt));
    }
    Ok(out)
}
