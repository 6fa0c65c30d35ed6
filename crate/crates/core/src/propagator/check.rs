use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::duhamel::DuhamelPicard;
use super::potential::PotentialField;
use super::split_step::{split_step_evolve, SplitStep};
use crate::error::Result;
use crate::fourier::FourierField;
use crate::operators::DensityOperator;
use crate::report::{Assertion, ExperimentReport, Table};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub cutoff: usize,
    pub dt: f64,
    pub samples: usize,
    pub seed: u64,
    /// Number of halvings of the time increment in the continuity check.
    pub continuity_levels: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            cutoff: 16,
            dt: 2.0 * std::f64::consts::PI / 2000.0,
            samples: 8,
            seed: 0,
            continuity_levels: 8,
        }
    }
}

/// Seeded unit vector with Gaussian coefficients damped by `1 / (1 + n^2 / 16)`.
pub fn random_unit_field(cutoff: usize, rng: &mut impl Rng) -> FourierField {
    let f = FourierField::from_fn(cutoff, |n| {
        let decay = 1.0 / (1.0 + (n * n) as f64 / 16.0);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * decay
    });
    let n = f.l2_norm();
    f.scaled(Complex64::new(1.0 / n, 0.0))
}

/// Isometry, composition, inverse and continuity of the split-step
/// propagator on seeded fields and time triples. Intermediate times `r` are
/// drawn from the step mesh.
pub fn propagator_check(v: &PotentialField, cfg: &CheckConfig) -> Result<ExperimentReport> {
    let engine = SplitStep::new(cfg.dt, cfg.cutoff)?;
    let horizon = v.horizon();
    let mesh_len = (horizon / cfg.dt).floor() as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = ExperimentReport::new("propagator-check");
    report.config.insert("cutoff".into(), cfg.cutoff.to_string());
    report.config.insert("dt".into(), format!("{:e}", cfg.dt));
    report.config.insert("samples".into(), cfg.samples.to_string());
    report.config.insert("seed".into(), cfg.seed.to_string());

    let mut table = Table::new("checks", &["sample", "s", "r", "t", "isometry", "composition", "inverse"]);
    let (mut iso, mut comp, mut inv) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..cfg.samples {
        let phi = random_unit_field(cfg.cutoff, &mut rng);
        let s = rng.random_range(0.0..horizon);
        let t = rng.random_range(0.0..horizon);
        let r = rng.random_range(0..=mesh_len) as f64 * cfg.dt;
        let ts = engine.evolve(&phi, v, s, t)?;
        let via = engine.evolve(&engine.evolve(&phi, v, s, r)?, v, r, t)?;
        let back = engine.evolve(&ts, v, t, s)?;
        let e = (
            (ts.l2_norm() - phi.l2_norm()).abs(),
            ts.distance(&via),
            back.distance(&phi),
        );
        iso = iso.max(e.0);
        comp = comp.max(e.1);
        inv = inv.max(e.2);
        table.push(vec![i as f64, s, r, t, e.0, e.1, e.2], Some(1e-7));
    }
    report.tables.push(table);
    report.assertions.push(Assertion::at_most("isometry", iso, 1e-8));
    report.assertions.push(Assertion::at_most("composition", comp, 1e-7));
    report.assertions.push(Assertion::at_most("inverse", inv, 1e-7));

    let phi = random_unit_field(cfg.cutoff, &mut rng);
    let (s, t) = (0.0, horizon / 2.0);
    let base = engine.evolve(&phi, v, s, t)?;
    let mut cont = Table::new("continuity", &["delta", "increment"]);
    let mut increments = Vec::new();
    for j in 0..=cfg.continuity_levels {
        let delta = (0.1f64).min(horizon / 4.0) / 2f64.powi(j as i32);
        let moved = engine.evolve(&phi, v, s, t + delta)?;
        let inc = moved.distance(&base);
        increments.push(inc);
        cont.push(vec![delta, inc], None);
    }
    report.tables.push(cont);
    let first = increments[0];
    let last = *increments.last().expect("nonempty");
    let shrinking = increments.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    report.assertions.push(Assertion::holds(
        "continuity",
        shrinking && last <= first / 2f64.powi(cfg.continuity_levels as i32 / 2),
    ));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderTest {
    pub steps: Vec<usize>,
    pub errors: Vec<f64>,
    /// `log2(e_j / e_{j+1})` for consecutive halvings.
    pub orders: Vec<f64>,
}

impl OrderTest {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Observed order of uniform Strang steps against a reference with 64 times
/// the finest step count.
pub fn order_test(phi: &FourierField, v: &PotentialField, t: f64, steps: &[usize], cutoff: usize) -> Result<OrderTest> {
    let finest = steps.iter().copied().max().unwrap_or(1);
    let reference = split_step_evolve(phi, v, 0.0, t, 64 * finest, cutoff)?;
    let errors = steps
        .iter()
        .map(|&n| Ok(split_step_evolve(phi, v, 0.0, t, n, cutoff)?.distance(&reference)))
        .collect::<Result<Vec<f64>>>()?;
    let orders = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    Ok(OrderTest {
        steps: steps.to_vec(),
        errors,
        orders,
    })
}

/// `||split-step - Duhamel||` at time `t`.
pub fn method_agreement(phi: &FourierField, v: &PotentialField, s: f64, t: f64, dt: f64, cutoff: usize) -> Result<f64> {
    let fine = SplitStep::new(dt / 4.0, cutoff)?.evolve(phi, v, s, t)?;
    let duhamel = DuhamelPicard::new(dt, 1e-12, 0.25, cutoff)?.evolve(phi, v, s, t)?;
    Ok(fine.distance(&duhamel))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeCheck {
    /// `max_j ||U_{V+c} phi_j - e^{-ic(t-s)} U_V phi_j||`.
    pub phase_error: f64,
    /// Largest density-coefficient difference for `sum_j w_j |U phi_j><U phi_j|`.
    pub density_error: f64,
}

pub fn gauge_check(
    fields: &[FourierField],
    weights: &[f64],
    v: &PotentialField,
    c: f64,
    s: f64,
    t: f64,
    dt: f64,
    cutoff: usize,
) -> Result<GaugeCheck> {
    let engine = SplitStep::new(dt, cutoff)?;
    let shifted = v.shifted(c);
    let phase = Complex64::from_polar(1.0, -c * (t - s));
    let mut plain = Vec::with_capacity(fields.len());
    let mut gauged = Vec::with_capacity(fields.len());
    let mut phase_error = 0.0f64;
    for phi in fields {
        let a = engine.evolve(phi, v, s, t)?;
        let b = engine.evolve(phi, &shifted, s, t)?;
        phase_error = phase_error.max(b.distance(&a.scaled(phase)));
        plain.push(a);
        gauged.push(b);
    }
    let ra = DensityOperator::from_rank_one_sum(weights, &plain)?.density_coeffs();
    let rb = DensityOperator::from_rank_one_sum(weights, &gauged)?.density_coeffs();
    let density_error = ra
        .coeffs()
        .iter()
        .zip(rb.coeffs())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    Ok(GaugeCheck {
        phase_error,
        density_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_potential_checks_at_roundoff() {
        let cfg = CheckConfig {
            cutoff: 8,
            dt: 0.01,
            samples: 4,
            seed: 1,
            continuity_levels: 6,
        };
        let r = propagator_check(&PotentialField::zero(2.0), &cfg).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(r.assertion("composition").unwrap().observed < 1e-12);
    }

    #[test]
    fn cosine_potential_suite() {
        let v = PotentialField::from_fn(2.0 * PI, 401, 16, |t, x| t.cos() * x.cos()).unwrap();
        let r = propagator_check(&v, &CheckConfig::default()).unwrap();
        assert!(r.all_passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }

    #[test]
    fn second_order() {
        let v = PotentialField::from_fn(1.0, 1, 16, |_, x| x.cos()).unwrap();
        let phi = FourierField::basis(0, 8).unwrap();
        let o = order_test(&phi, &v, 1.0, &[10, 20, 40], 8).unwrap();
        assert!(o.min_order() >= 1.9, "{o:?}");
    }

    #[test]
    fn gauge_phase_and_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fields: Vec<_> = (0..3).map(|_| random_unit_field(6, &mut rng)).collect();
        let v = PotentialField::from_fn(1.0, 21, 16, |t, x| (x + t).sin()).unwrap();
        let g = gauge_check(&fields, &[0.5, 0.3, 0.2], &v, 1.7, 0.1, 0.9, 0.01, 6).unwrap();
        assert!(g.phase_error < 1e-12, "{g:?}");
        assert!(g.density_error < 1e-10, "{g:?}");
    }
}
