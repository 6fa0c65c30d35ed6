use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{NlssProblem, NlssTrajectory, WindowRecord};
use crate::error::{Error, Result};
use crate::operators::write_operator;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub method: String,
    pub renormalised: bool,
    pub sign: Option<f64>,
    pub tolerance: Option<f64>,
    pub dt: Option<f64>,
    pub cutoff: Option<usize>,
    pub snapshot_times: Vec<f64>,
    /// File names, relative to the manifest, of the snapshot operators.
    pub snapshot_files: Vec<String>,
    pub mesh: Vec<f64>,
    pub windows: Vec<WindowRecord>,
    pub residual: Option<f64>,
}

/// Writes `manifest.json` and `snapshot_XXXX.op` files into `dir`.
pub fn write_trajectory(traj: &NlssTrajectory, problem: Option<&NlssProblem>, dir: impl AsRef<Path>) -> Result<TrajectoryManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::with_capacity(traj.snapshots.len());
    for (j, g) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshot_{j:04}.op");
        write_operator(dir.join(&name), g)?;
        files.push(name);
    }
    let manifest = TrajectoryManifest {
        method: traj.method.clone(),
        renormalised: traj.renormalised,
        sign: problem.map(|p| p.sign.value()),
        tolerance: problem.map(|p| p.tol),
        dt: problem.map(|p| p.dt),
        cutoff: problem.map(|p| p.cutoff),
        snapshot_times: traj.snapshot_times.clone(),
        snapshot_files: files,
        mesh: traj.mesh.clone(),
        windows: traj.windows.clone(),
        residual: traj.residual,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

pub fn read_manifest(dir: impl AsRef<Path>) -> Result<TrajectoryManifest> {
    let path = dir.as_ref().join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}
