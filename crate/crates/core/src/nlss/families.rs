use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::TorusGrid;
use crate::operators::DensityOperator;
use crate::propagator::random_unit_field;
use crate::report::{Assertion, ExperimentReport, Table};
use crate::strichartz::{cosine_family, scaling_fit_skipping, SpaceTimeDensity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Nlss,
    Rnlss,
}

/// `N^{-1/alpha - eps} sum_{n=1}^N |e_n><e_n|`. Its density is constant, so it
/// is a stationary solution of the unrenormalised system.
pub fn stationary_family(n: usize, alpha: f64, eps: f64, cutoff: usize) -> Result<DensityOperator> {
    if n > cutoff {
        return Err(Error::CutoffViolation {
            mode: n as i64,
            cutoff,
        });
    }
    crate::fourier::check_exponent(alpha)?;
    let scale = (n as f64).powf(-1.0 / alpha - eps);
    Ok(DensityOperator::diagonal(cutoff, |k| {
        if (1..=n as i64).contains(&k) {
            scale
        } else {
            0.0
        }
    }))
}

/// Seeded Hermitian operator of the given rank with smooth random modes and
/// signed weights, scaled to unit Hilbert-Schmidt norm.
pub fn random_rank_operator(rank: usize, cutoff: usize, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<_> = (0..rank).map(|_| random_unit_field(cutoff, &mut rng)).collect();
    let weights: Vec<f64> = (0..rank)
        .map(|_| {
            let w: f64 = rng.random_range(0.2..1.0);
            if rng.random_bool(0.3) { -w } else { w }
        })
        .collect();
    let g = DensityOperator::from_rank_one_sum(&weights, &vectors)?;
    let s = g.schatten_norm(2.0)?;
    Ok(g.scaled(1.0 / s))
}

/// `N^{-1/2}` times the cosine-family projection.
pub fn illposed_rnlss_family(n: usize, cutoff: usize) -> Result<DensityOperator> {
    Ok(cosine_family(n, cutoff)?.scaled(1.0 / (n as f64).sqrt()))
}

/// Input norms tending to zero against output norms that blow up (first
/// system) or stay pinned at `1/sqrt 2` (renormalised system).
pub fn illposedness_demo(mode: Mode, alpha: f64, eps: f64, ns: &[usize], horizon: f64, skip: usize) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(match mode {
        Mode::Nlss => "illposed-nlss",
        Mode::Rnlss => "illposed-rnlss",
    });
    report.config.insert("alpha".into(), alpha.to_string());
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    match mode {
        Mode::Nlss => {
            if !(alpha > 1.0) {
                return Err(Error::IllPosedRange(format!(
                    "alpha = {alpha}: the unrenormalised system is ill-posed only for alpha > 1"
                )));
            }
            report.config.insert("eps".into(), eps.to_string());
            report.config.insert("horizon".into(), horizon.to_string());
            let mut table = Table::new("norms", &["N", "schatten", "schatten_exact", "density_l2"]);
            let mut worst = 0.0f64;
            let mut pairs = Vec::new();
            for &n in &sorted {
                let gamma = stationary_family(n, alpha, eps, n)?;
                let s = gamma.schatten_norm(alpha)?;
                let exact = (n as f64).powf(-eps);
                worst = worst.max((s - exact).abs() / exact);
                // Constant in time: ||rho||_{L^2([0,T] x T)} = sqrt(T) ||rho||_{L^2(T)}.
                let grid = TorusGrid::new(2 * n + 1)?;
                let rho = gamma.density(&grid).lp_norm(2.0)? * horizon.sqrt();
                pairs.push((n as f64, rho));
                table.push(vec![n as f64, s, exact, rho], Some(1e-12));
            }
            report.tables.push(table);
            let fit = scaling_fit_skipping(&pairs, skip)?;
            let target = 1.0 - 1.0 / alpha - eps;
            report.fits.push(fit.record("density_l2", Some(target)));
            report.assertions.push(Assertion::at_most("schatten_relative_error", worst, 1e-12));
            report
                .assertions
                .push(Assertion::within("density_exponent", fit.exponent, target, 0.02));
        }
        Mode::Rnlss => {
            if !(alpha > 2.0) {
                return Err(Error::IllPosedRange(format!(
                    "alpha = {alpha}: the renormalised system is ill-posed only for alpha > 2"
                )));
            }
            let mut table = Table::new("norms", &["N", "schatten", "schatten_exact", "renormalised_l2"]);
            let (mut worst_s, mut worst_r) = (0.0f64, 0.0f64);
            let mut pairs = Vec::new();
            for &n in &sorted {
                let gamma = illposed_rnlss_family(n, n)?;
                let s = gamma.schatten_norm(alpha)?;
                let exact = (n as f64).powf(1.0 / alpha - 0.5);
                worst_s = worst_s.max((s - exact).abs() / exact);
                let out = SpaceTimeDensity::from_operator(&gamma, n, true)?.l2_norm_exact()?;
                worst_r = worst_r.max((out - 0.5f64.sqrt()).abs());
                pairs.push((n as f64, s));
                table.push(vec![n as f64, s, exact, out], Some(1e-9));
            }
            report.tables.push(table);
            let fit = scaling_fit_skipping(&pairs, skip)?;
            report.fits.push(fit.record("schatten", Some(1.0 / alpha - 0.5)));
            report.assertions.push(Assertion::at_most("schatten_relative_error", worst_s, 1e-12));
            report.assertions.push(Assertion::at_most("renormalised_norm_deviation", worst_r, 1e-9));
        }
    }
    Ok(report)
}
