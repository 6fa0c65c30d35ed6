use num_complex::Complex64;
use rayon::prelude::*;

use super::modes::{accumulate_density, block_l2_diff, renormalise, Modes};
use super::{NlssProblem, NlssTrajectory, WindowRecord};
use crate::error::{Error, Result};
use crate::propagator::{PotentialField, Stepper};

pub const MAX_ITERATIONS: usize = 50;
/// Smallest window before the iteration is declared divergent.
pub const MIN_WINDOW: f64 = 2.0 * std::f64::consts::PI / 4096.0;

/// `Gamma[rho]` on one window: evolves every mode under `scale * rho` through
/// the local mesh and returns the end state with the new density rows.
fn gamma_map(start: &Modes, rho: Option<&[Vec<f64>]>, nodes: &[f64], scale: f64, renormalised: bool) -> (Modes, Vec<Vec<f64>>) {
    let k = start.points();
    let len = nodes[nodes.len() - 1];
    let potential = rho.map(|rows| {
        let values: Vec<f64> = rows.iter().flatten().map(|r| scale * r).collect();
        PotentialField::new(len, rows.len(), k, values).expect("window grid")
    });
    let per_mode: Vec<(Vec<Complex64>, Vec<Vec<f64>>)> = start
        .coeffs
        .par_iter()
        .zip(&start.weights)
        .map(|(c0, &w)| {
            let mut c = c0.clone();
            let mut stepper = Stepper::new(start.cutoff);
            let mut scratch = vec![Complex64::new(0.0, 0.0); k];
            let mut rows = Vec::with_capacity(nodes.len());
            let mut row = vec![0.0; k];
            accumulate_density(&c, w, &mut scratch, &mut row);
            rows.push(row);
            let mut vrow = Vec::with_capacity(k);
            for pair in nodes.windows(2) {
                let h = pair[1] - pair[0];
                stepper.kinetic(&mut c, h / 2.0);
                if let Some(v) = &potential {
                    v.row_at(0.5 * (pair[0] + pair[1]), &mut vrow);
                    stepper.potential(&mut c, &vrow, h);
                }
                stepper.kinetic(&mut c, h / 2.0);
                let mut row = vec![0.0; k];
                accumulate_density(&c, w, &mut scratch, &mut row);
                rows.push(row);
            }
            (c, rows)
        })
        .collect();
    let mut density = vec![vec![0.0; k]; nodes.len()];
    let mut coeffs = Vec::with_capacity(per_mode.len());
    for (c, rows) in per_mode {
        for (acc, r) in density.iter_mut().zip(rows) {
            acc.iter_mut().zip(r).for_each(|(a, b)| *a += b);
        }
        coeffs.push(c);
    }
    if renormalised {
        density.iter_mut().for_each(|r| renormalise(r));
    }
    let end = Modes {
        cutoff: start.cutoff,
        weights: start.weights.clone(),
        coeffs,
    };
    (end, density)
}

/// Picard iteration `rho <- Gamma[rho]` window by window, starting each window
/// from the free-evolution density.
pub fn solve_fixed_point(p: &NlssProblem) -> Result<NlssTrajectory> {
    p.validate()?;
    let mut modes = Modes::from_operator(&p.gamma0, p.cutoff)?;
    let scale = p.potential_scale();
    let snap_times = p.snapshot_times();
    let mut traj = NlssTrajectory {
        method: "fixed-point".into(),
        renormalised: p.renormalised,
        snapshot_times: snap_times.clone(),
        snapshots: vec![modes.operator()],
        mesh: Vec::new(),
        density: Vec::new(),
        windows: Vec::new(),
        residual: None,
    };
    let mut residual_sq = 0.0;
    let mut cur = 0.0;
    let mut len = p.window.min(p.horizon);
    let mut next_snap = 1;
    let mut first_row = true;
    while next_snap < snap_times.len() {
        let target = snap_times[next_snap];
        let end = if target - cur <= len * (1.0 + 1e-12) { target } else { cur + len };
        let span = end - cur;
        let steps = (span / p.dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let nodes: Vec<f64> = (0..=steps).map(|j| if j == steps { span } else { h * j as f64 }).collect();
        let tol_w = p.tol * (span / p.horizon).sqrt();

        let (_, mut rho) = gamma_map(&modes, None, &nodes, scale, p.renormalised);
        let mut history = Vec::new();
        let mut accepted = None;
        for it in 0..MAX_ITERATIONS {
            let (end_modes, next) = gamma_map(&modes, Some(&rho), &nodes, scale, p.renormalised);
            let diff = block_l2_diff(&rho, &next, h);
            history.push(diff);
            if diff < tol_w {
                accepted = Some(end_modes);
                break;
            }
            if it >= 2 && diff >= history[it - 1] {
                break;
            }
            rho = next;
        }
        traj.windows.push(WindowRecord {
            start: cur,
            end,
            accepted: accepted.is_some(),
            differences: history.clone(),
        });
        let Some(end_modes) = accepted else {
            len = span / 2.0;
            if len < MIN_WINDOW {
                return Err(Error::Divergence {
                    time: cur,
                    window: len,
                    history,
                });
            }
            continue;
        };
        residual_sq += history.last().copied().unwrap_or(0.0).powi(2);
        let skip = if first_row { 0 } else { 1 };
        first_row = false;
        for (j, row) in rho.into_iter().enumerate().skip(skip) {
            traj.mesh.push(cur + nodes[j]);
            traj.density.push(row);
        }
        modes = end_modes;
        cur = end;
        if end == target {
            traj.snapshots.push(modes.operator());
            next_snap += 1;
        }
    }
    traj.residual = Some(residual_sq.sqrt());
    Ok(traj)
}
