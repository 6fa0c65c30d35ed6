//! Mean-field systems `i d_t gamma = [-Delta + s V, gamma]` with `V = rho_gamma`
//! (the unrenormalised system) or `V = rho_bar_gamma` (the renormalised one),
//! `s = +1` defocusing and `s = -1` focusing.

mod conservation;
mod coupled;
mod export;
mod families;
mod fixed_point;
mod modes;

pub use conservation::{conservation_check, ConservationReport};
pub use coupled::solve_coupled;
pub use export::{read_manifest, write_trajectory, TrajectoryManifest};
pub use families::{illposed_rnlss_family, illposedness_demo, random_rank_operator, stationary_family, Mode};
pub use fixed_point::{solve_fixed_point, MAX_ITERATIONS, MIN_WINDOW};
pub use modes::RANK_THRESHOLD;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::DensityOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NlssProblem {
    pub gamma0: DensityOperator,
    pub sign: Sign,
    pub renormalised: bool,
    pub horizon: f64,
    /// Picard tolerance on the `L^2_{t,x}` change of the density over `[0, T]`.
    pub tol: f64,
    pub dt: f64,
    /// Grid cutoff of the evolution, at least the cutoff of `gamma0`.
    pub cutoff: usize,
    /// Number of equal intervals between snapshots.
    pub snapshots: usize,
    /// Initial Picard window.
    pub window: f64,
    /// Multiplies the potential; zero gives free evolution.
    pub coupling: f64,
}

impl NlssProblem {
    pub fn new(gamma0: DensityOperator, horizon: f64) -> Self {
        let cutoff = gamma0.cutoff().max(16);
        Self {
            gamma0,
            sign: Sign::Defocusing,
            renormalised: false,
            horizon,
            tol: 1e-10,
            dt: 1e-3,
            cutoff,
            snapshots: 10,
            window: 0.25,
            coupling: 1.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !self.gamma0.is_hermitian() {
            return Err(Error::NotHermitian {
                asymmetry: self.gamma0.matrix().hermitian_asymmetry(),
            });
        }
        if self.gamma0.cutoff() > self.cutoff {
            return Err(Error::CutoffMismatch {
                left: self.gamma0.cutoff(),
                right: self.cutoff,
            });
        }
        for (name, x) in [("horizon", self.horizon), ("tolerance", self.tol), ("time step", self.dt), ("window", self.window)] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} {x}")));
            }
        }
        if self.snapshots == 0 {
            return Err(Error::InvalidArgument("at least one snapshot interval".into()));
        }
        Ok(())
    }

    pub(crate) fn snapshot_times(&self) -> Vec<f64> {
        (0..=self.snapshots)
            .map(|k| {
                if k == self.snapshots {
                    self.horizon
                } else {
                    self.horizon * k as f64 / self.snapshots as f64
                }
            })
            .collect()
    }

    pub fn potential_scale(&self) -> f64 {
        self.sign.value() * self.coupling
    }
}

/// Contraction log of one accepted or rejected window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub start: f64,
    pub end: f64,
    pub accepted: bool,
    pub differences: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct NlssTrajectory {
    pub method: String,
    pub renormalised: bool,
    pub snapshot_times: Vec<f64>,
    pub snapshots: Vec<DensityOperator>,
    /// Mesh times of the density samples.
    pub mesh: Vec<f64>,
    /// The self-consistent density (`rho` or `rho_bar`) on the mesh, one row of
    /// `2 cutoff + 1` grid values per mesh time.
    pub density: Vec<Vec<f64>>,
    pub windows: Vec<WindowRecord>,
    /// `||rho - Gamma[rho]||_{L^2_{t,x}}` for the fixed-point solver.
    pub residual: Option<f64>,
}

impl NlssTrajectory {
    /// `rho_{gamma(t_j)}` (unrenormalised) at each snapshot, sampled on `points`.
    pub fn snapshot_densities(&self, points: usize) -> Vec<Vec<f64>> {
        let grid = crate::fourier::TorusGrid::new(points).expect("nonzero");
        self.snapshots
            .iter()
            .map(|g| g.density(&grid).values.iter().map(|z| z.re).collect())
            .collect()
    }

    /// Largest entrywise distance between corresponding snapshots.
    pub fn max_snapshot_distance(&self, other: &NlssTrajectory) -> f64 {
        self.snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.matrix().sub(b.matrix()).max_abs())
            .fold(0.0, f64::max)
    }

    /// `L^2_{t,x}` distance of the snapshot densities (trapezoid over snapshot times).
    pub fn density_distance(&self, other: &NlssTrajectory, points: usize) -> Result<f64> {
        if self.snapshot_times.len() != other.snapshot_times.len() {
            return Err(Error::LengthMismatch {
                left: self.snapshot_times.len(),
                right: other.snapshot_times.len(),
            });
        }
        let a = self.snapshot_densities(points);
        let b = other.snapshot_densities(points);
        let h = self.snapshot_times.get(1).copied().unwrap_or(0.0) - self.snapshot_times[0];
        Ok(modes::block_l2_diff(&a, &b, h))
    }
}

/// A solver for the mean-field system.
pub trait NlssSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, problem: &NlssProblem) -> Result<NlssTrajectory>;
}

pub struct FixedPoint;
pub struct Coupled;

impl NlssSolver for FixedPoint {
    fn name(&self) -> &'static str {
        "fixed-point"
    }
    fn solve(&self, problem: &NlssProblem) -> Result<NlssTrajectory> {
        solve_fixed_point(problem)
    }
}

impl NlssSolver for Coupled {
    fn name(&self) -> &'static str {
        "coupled"
    }
    fn solve(&self, problem: &NlssProblem) -> Result<NlssTrajectory> {
        solve_coupled(problem)
    }
}

pub fn solver_by_name(name: &str) -> Option<Box<dyn NlssSolver>> {
    match name {
        "fixed-point" => Some(Box::new(FixedPoint)),
        "coupled" => Some(Box::new(Coupled)),
        _ => None,
    }
}

#[cfg(test)]
mod tests;
