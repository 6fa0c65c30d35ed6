//! Propagators `U_V(t, s)` of `i u_t = -u_xx + V(t, x) u` for real potentials.

mod check;
mod duhamel;
mod potential;
mod split_step;

pub use check::{
    gauge_check, method_agreement, order_test, propagator_check, random_unit_field, CheckConfig,
    GaugeCheck, OrderTest,
};
pub use duhamel::{DuhamelPicard, WindowLog, MAX_HALVINGS, MAX_PICARD_ITERATIONS};
pub use potential::PotentialField;
pub use split_step::{split_step_evolve, SplitStep};
pub(crate) use split_step::Stepper;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fourier::FourierField;

/// A numerical realisation of `U_V(t, s)`.
pub trait Propagator: Send + Sync {
    fn name(&self) -> &'static str;
    fn cutoff(&self) -> usize;
    fn evolve(&self, phi: &FourierField, v: &PotentialField, s: f64, t: f64) -> Result<FourierField>;
}

impl Propagator for SplitStep {
    fn name(&self) -> &'static str {
        "split-step"
    }
    fn cutoff(&self) -> usize {
        self.cutoff
    }
    fn evolve(&self, phi: &FourierField, v: &PotentialField, s: f64, t: f64) -> Result<FourierField> {
        SplitStep::evolve(self, phi, v, s, t)
    }
}

impl Propagator for DuhamelPicard {
    fn name(&self) -> &'static str {
        "duhamel"
    }
    fn cutoff(&self) -> usize {
        self.cutoff
    }
    fn evolve(&self, phi: &FourierField, v: &PotentialField, s: f64, t: f64) -> Result<FourierField> {
        DuhamelPicard::evolve(self, phi, v, s, t)
    }
}

/// Builds a propagator by name: `split-step` or `duhamel`.
pub fn propagator_by_name(name: &str, dt: f64, cutoff: usize, tol: f64) -> Result<Box<dyn Propagator>> {
    match name {
        "split-step" => Ok(Box::new(SplitStep::new(dt, cutoff)?)),
        "duhamel" => Ok(Box::new(DuhamelPicard::new(dt, tol, 0.25, cutoff)?)),
        other => Err(crate::Error::InvalidArgument(format!("unknown propagator `{other}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorRun {
    pub method: String,
    pub window: (f64, f64),
    pub dt: f64,
    pub input_norm: f64,
    pub output: Vec<(f64, f64)>,
    /// `| ||out|| - ||in|| |`.
    pub mass_drift: f64,
}

pub fn run(p: &dyn Propagator, phi: &FourierField, v: &PotentialField, s: f64, t: f64, dt: f64) -> Result<PropagatorRun> {
    let out = p.evolve(phi, v, s, t)?;
    Ok(PropagatorRun {
        method: p.name().into(),
        window: (s, t),
        dt,
        input_norm: phi.l2_norm(),
        output: out.coeffs().iter().map(|c| (c.re, c.im)).collect(),
        mass_drift: (out.l2_norm() - phi.l2_norm()).abs(),
    })
}
