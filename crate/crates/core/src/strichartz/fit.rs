use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::FitRecord;

/// Least-squares power law `value ~ C N^exponent`, fitted in log-log coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub pairs: Vec<(f64, f64)>,
    pub exponent: f64,
    /// `log C`.
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn scaling_fit(pairs: &[(f64, f64)]) -> Result<ScalingFit> {
    if pairs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: pairs.len(),
        });
    }
    for &(n, v) in pairs {
        if !(v > 0.0) {
            return Err(Error::NonPositive(v));
        }
        if !(n > 0.0) {
            return Err(Error::NonPositive(n));
        }
    }
    let pts: Vec<(f64, f64)> = pairs.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("scaling fit needs distinct N".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - exponent * p.0).powi(2))
        .sum::<f64>()
        / len)
        .sqrt();
    Ok(ScalingFit {
        pairs: pairs.to_vec(),
        exponent,
        intercept,
        residual,
    })
}

/// Fit after dropping the `skip` smallest `N`.
pub fn scaling_fit_skipping(pairs: &[(f64, f64)], skip: usize) -> Result<ScalingFit> {
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    scaling_fit(&sorted[skip.min(sorted.len())..])
}

impl ScalingFit {
    pub fn window(&self) -> (f64, f64) {
        let lo = self.pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let hi = self.pairs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn record(&self, name: impl Into<String>, target: Option<f64>) -> FitRecord {
        FitRecord {
            name: name.into(),
            exponent: self.exponent,
            intercept: self.intercept,
            residual: self.residual,
            window: self.window(),
            points: self.pairs.clone(),
            target,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_square_root() {
        let pairs: Vec<_> = [2.0, 4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|&n: &f64| (n, n.sqrt()))
            .collect();
        let fit = scaling_fit(&pairs).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-10);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn constant_values_have_zero_slope() {
        let pairs = [(1.0, 3.0), (2.0, 3.0), (5.0, 3.0)];
        assert!(scaling_fit(&pairs).unwrap().exponent.abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(scaling_fit(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::TooFewPoints { .. })));
        assert!(matches!(
            scaling_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(Error::NonPositive(_))
        ));
    }

    #[test]
    fn skipping_drops_smallest() {
        let pairs = [(8.0, 64.0), (1.0, 100.0), (2.0, 4.0), (4.0, 16.0)];
        let fit = scaling_fit_skipping(&pairs, 1).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert_eq!(fit.window(), (2.0, 8.0));
    }

    proptest! {
        #[test]
        fn recovers_power_laws(sigma in -3.0f64..3.0, c in 0.01f64..100.0) {
            let pairs: Vec<_> = (1..7).map(|j| {
                let n = (1u32 << j) as f64;
                (n, c * n.powf(sigma))
            }).collect();
            let fit = scaling_fit(&pairs).unwrap();
            prop_assert!((fit.exponent - sigma).abs() < 1e-10);
            prop_assert!((fit.intercept - c.ln()).abs() < 1e-9);
        }
    }
}
