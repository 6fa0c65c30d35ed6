use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_density::propagator::{
    gauge_check, method_agreement, order_test, propagator_check, random_unit_field, CheckConfig, PotentialField,
};
use torus_density::report::{Assertion, ExperimentReport, Table};

use super::defaults;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::registry::{Budget, Experiment};

/// `cos x + sin(2x + t) / 2` on `[0, T]`, time nodes every `T / 200`.
fn benchmark_potential(horizon: f64) -> Result<PotentialField> {
    Ok(PotentialField::from_fn(horizon, 201, 64, |t, x| x.cos() + 0.5 * (2.0 * x + t).sin())?)
}

pub struct PropagatorCheck;

impl Experiment for PropagatorCheck {
    fn name(&self) -> &'static str {
        "propagator-check"
    }
    fn summary(&self) -> &'static str {
        "isometry, composition, inverse, order, method agreement and gauge phase of U_V"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("cutoff = 16\ndt = 1e-3\nhorizon = 1\nsamples = 8\nseed = 0\ncoupling = 0.7")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let cutoff = ExperimentConfig::require(&cfg.cutoff, "cutoff")?;
        let dt = ExperimentConfig::require(&cfg.dt, "dt")?;
        let horizon = ExperimentConfig::require(&cfg.horizon, "horizon")?;
        let samples = ExperimentConfig::require(&cfg.samples, "samples")?;
        let shift = ExperimentConfig::require(&cfg.coupling, "coupling")?;
        let v = benchmark_potential(horizon)?;
        let check = CheckConfig {
            cutoff,
            dt,
            samples,
            seed: cfg.seed(),
            continuity_levels: 8,
        };
        let mut report = propagator_check(&v, &check)?;
        report.experiment = self.name().into();
        budget.check("basic checks")?;

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed().wrapping_add(1));
        let phi = random_unit_field(cutoff, &mut rng);
        let order = order_test(&phi, &v, horizon, &[25, 50, 100, 200], cutoff)?;
        let mut table = Table::new("order", &["steps", "error", "order_to_next"]);
        for (j, (&n, &e)) in order.steps.iter().zip(&order.errors).enumerate() {
            let o = order.orders.get(j).copied().unwrap_or(0.0);
            table.push(vec![n as f64, e, o], Some(1.9));
        }
        report.tables.push(table);
        report.assertions.push(Assertion::at_least("split_step_order", order.min_order(), 1.9));
        budget.check("order test")?;

        let agreement = method_agreement(&phi, &v, 0.0, horizon, dt, cutoff)?;
        report.assertions.push(Assertion::at_most("split_step_vs_duhamel", agreement, 1e-5));
        budget.check("method agreement")?;

        let fields: Vec<_> = (0..3).map(|_| random_unit_field(cutoff, &mut rng)).collect();
        let gauge = gauge_check(&fields, &[0.5, 0.3, 0.2], &v, shift, 0.0, horizon, dt, cutoff)?;
        let mut g = Table::new("gauge", &["shift", "phase_error", "density_error"]);
        g.push(vec![shift, gauge.phase_error, gauge.density_error], Some(1e-12));
        report.tables.push(g);
        report.assertions.push(Assertion::at_most("gauge_phase", gauge.phase_error, 1e-12));
        report.assertions.push(Assertion::at_most("gauge_density", gauge.density_error, 1e-10));
        Ok(report)
    }
}
