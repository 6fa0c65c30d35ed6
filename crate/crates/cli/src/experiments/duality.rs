use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use torus_density::fourier::{SampledField, TorusGrid};
use torus_density::operators::DensityOperator;
use torus_density::report::{Assertion, ExperimentReport, Table};
use torus_density::Complex64;

use super::defaults;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::registry::{Budget, Experiment};

/// A general (non-Hermitian) `A = H1 + i H2` and a real `V` mixing a random
/// trigonometric part with `exp(cos x)`, which is not band-limited.
fn random_pair(cutoff: usize, points: usize, seed: u64) -> Result<(DensityOperator, SampledField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h1 = DensityOperator::random_hermitian(cutoff, cutoff, &mut rng);
    let h2 = DensityOperator::random_hermitian(cutoff, cutoff, &mut rng);
    let a = DensityOperator::from_fn(cutoff, |m, n| h1.get(m, n) + Complex64::i() * h2.get(m, n));
    let modes: Vec<(f64, f64)> = (0..=2 * cutoff)
        .map(|_| (rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let weight: f64 = rng.random_range(0.0..2.0);
    let grid = TorusGrid::new(points)?;
    let v = SampledField::from_fn(grid, |x| {
        let trig: f64 = modes
            .iter()
            .enumerate()
            .map(|(k, (c, s))| c * (k as f64 * x).cos() + s * (k as f64 * x).sin())
            .sum();
        Complex64::new(trig + weight * x.cos().exp(), 0.0)
    });
    Ok((a, v))
}

pub struct DualityCheck;

impl Experiment for DualityCheck {
    fn name(&self) -> &'static str {
        "duality-check"
    }
    fn summary(&self) -> &'static str {
        "int rho_A V against Tr(A M_V) over seeded pairs"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("samples = 100\ncutoff = 8\nseed = 0\ntol = 1e-10")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let samples = ExperimentConfig::require(&cfg.samples, "samples")?;
        let cutoff = ExperimentConfig::require(&cfg.cutoff, "cutoff")?;
        let tol = ExperimentConfig::require(&cfg.tol, "tol")?;
        let points = 4 * cutoff + 9;
        let rows = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let (a, v) = random_pair(cutoff, points, cfg.seed().wrapping_add(i))?;
                let lhs = a.duality_pairing(&v)?;
                let rhs = a.trace_with_multiplier(&v)?;
                Ok(vec![i as f64, lhs.re, lhs.im, rhs.re, rhs.im, (lhs - rhs).norm()])
            })
            .collect::<Result<Vec<_>>>()?;
        budget.check("duality pairs")?;
        let mut table = Table::new("pairs", &["sample", "integral_re", "integral_im", "trace_re", "trace_im", "difference"]);
        let mut worst = 0.0f64;
        for r in rows {
            worst = worst.max(r[5]);
            table.push(r, Some(tol));
        }
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::at_most("max_pairing_difference", worst, tol));
        report.tables.push(table);
        Ok(report)
    }
}
