use serde::{Deserialize, Serialize};

use super::NlssTrajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `(alpha, max_j |S_alpha(t_j) - S_alpha(0)| / S_alpha(0))`.
    pub schatten_drift: Vec<(f64, f64)>,
    pub trace_drift: f64,
    /// Largest Hermitian asymmetry over the snapshots.
    pub asymmetry: f64,
    /// Largest singular value, at any snapshot, among directions that were
    /// numerically null at `t = 0`.
    pub rank_leak: f64,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.schatten_drift
            .iter()
            .map(|&(_, d)| d)
            .fold(self.trace_drift, f64::max)
    }
}

pub fn conservation_check(traj: &NlssTrajectory, alphas: &[f64]) -> ConservationReport {
    let Some(first) = traj.snapshots.first() else {
        return ConservationReport {
            schatten_drift: alphas.iter().map(|&a| (a, 0.0)).collect(),
            trace_drift: 0.0,
            asymmetry: 0.0,
            rank_leak: 0.0,
        };
    };
    let schatten_drift = alphas
        .iter()
        .map(|&a| {
            let s0 = first.schatten_norm(a).unwrap_or(f64::NAN);
            let drift = traj
                .snapshots
                .iter()
                .map(|g| {
                    let s = g.schatten_norm(a).unwrap_or(f64::NAN);
                    if s0 > 0.0 {
                        (s - s0).abs() / s0
                    } else {
                        s.abs()
                    }
                })
                .fold(0.0, f64::max);
            (a, drift)
        })
        .collect();
    let tr0 = first.trace();
    let scale = tr0.norm().max(1.0);
    let trace_drift = traj
        .snapshots
        .iter()
        .map(|g| (g.trace() - tr0).norm() / scale)
        .fold(0.0, f64::max);
    let asymmetry = traj
        .snapshots
        .iter()
        .map(|g| g.matrix().hermitian_asymmetry())
        .fold(0.0, f64::max);
    let null0 = first.singular_values().iter().filter(|&&s| s < 1e-12).count();
    // Singular values are sorted in decreasing order; the trailing `null0`
    // entries should stay null.
    let rank_leak = traj
        .snapshots
        .iter()
        .map(|g| {
            let sv = g.singular_values();
            sv[sv.len() - null0..].iter().copied().fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    ConservationReport {
        schatten_drift,
        trace_drift,
        asymmetry,
        rank_leak,
    }
}
