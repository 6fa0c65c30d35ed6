use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fourier::FourierField;
use crate::operators::DensityOperator;

/// Rank-`n` projection onto `phi_j = (e_j + e_{-j}) / sqrt 2`, `1 <= j <= n`.
///
/// Built entrywise: the `phi_j` have disjoint supports, so the Gram check
/// reduces to their norms.
pub fn cosine_family(n: usize, cutoff: usize) -> Result<DensityOperator> {
    if n > cutoff {
        return Err(Error::CutoffViolation {
            mode: n as i64,
            cutoff,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("cosine family needs N >= 1".into()));
    }
    let half = 1.0 / 2f64.sqrt();
    for j in 1..=n as i64 {
        let phi = FourierField::from_fn(cutoff, |m| {
            if m.abs() == j {
                Complex64::new(half, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let err = (phi.norm_sqr() - 1.0).abs();
        if err > 1e-14 {
            return Err(Error::InvalidArgument(format!("phi_{j} not normalised ({err:e})")));
        }
    }
    Ok(DensityOperator::from_fn(cutoff, |m, k| {
        if m != 0 && m.abs() == k.abs() && m.unsigned_abs() as usize <= n {
            Complex64::new(0.5, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `(1/2pi) sum_{n=1}^N cos(2nx) = (1/4pi) (sin((2N+1)x) / sin x - 1)`.
pub fn dirichlet_closed_form(n: usize, x: f64) -> f64 {
    let s = x.sin();
    if s.abs() < 1e-8 {
        return (1..=n).map(|j| (2.0 * j as f64 * x).cos()).sum::<f64>() / (2.0 * PI);
    }
    (((2 * n + 1) as f64 * x).sin() / s - 1.0) / (4.0 * PI)
}

/// `count` orthonormal vectors at cutoff `m`, from modified Gram-Schmidt
/// (two passes) on complex Gaussian coefficients drawn from a ChaCha8 stream.
pub fn random_orthonormal_system(count: usize, cutoff: usize, seed: u64) -> Result<Vec<FourierField>> {
    let dim = 2 * cutoff + 1;
    if count > dim {
        return Err(Error::DimensionExceeded {
            requested: count,
            dimension: dim,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(count);
    while out.len() < count {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        for _pass in 0..2 {
            for u in &out {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|c| *c /= norm);
        out.push(v);
    }
    out.into_iter()
        .map(|c| FourierField::from_coeffs(cutoff, c))
        .collect()
}

/// A sequence of operators indexed by the window size `N`.
pub trait OperatorFamily: Send + Sync {
    fn name(&self) -> &str;
    /// Operator at window `n` with cutoff `n`.
    fn build(&self, n: usize) -> Result<DensityOperator>;
}

/// `sum_{n=1}^N |e_n><e_n|`.
pub struct DiagonalFamily;

impl OperatorFamily for DiagonalFamily {
    fn name(&self) -> &str {
        "diagonal"
    }
    fn build(&self, n: usize) -> Result<DensityOperator> {
        Ok(DensityOperator::diagonal(n, |k| if (1..=n as i64).contains(&k) { 1.0 } else { 0.0 }))
    }
}

pub struct CosineFamily;

impl OperatorFamily for CosineFamily {
    fn name(&self) -> &str {
        "cosine"
    }
    fn build(&self, n: usize) -> Result<DensityOperator> {
        cosine_family(n, n)
    }
}

/// Gaussian Hermitian matrices on the full window, scaled to unit Hilbert-Schmidt norm.
pub struct RandomHsFamily {
    pub seed: u64,
}

impl OperatorFamily for RandomHsFamily {
    fn name(&self) -> &str {
        "random-hs"
    }
    fn build(&self, n: usize) -> Result<DensityOperator> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = DensityOperator::random_hermitian(n, n, &mut rng);
        let hs = g.matrix().frobenius();
        Ok(g.scaled(1.0 / hs))
    }
}

/// Positive operators `sum_j w_j |phi_j><phi_j|` over a random orthonormal basis
/// of the window, weights uniform on the simplex after normalisation: trace one.
pub struct TraceNormalisedFamily {
    pub seed: u64,
}

impl OperatorFamily for TraceNormalisedFamily {
    fn name(&self) -> &str {
        "trace-normalised"
    }
    fn build(&self, n: usize) -> Result<DensityOperator> {
        let seed = self.seed ^ (n as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        let dim = 2 * n + 1;
        let vecs = random_orthonormal_system(dim, n, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let raw: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * z
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        DensityOperator::from_rank_one_sum(&weights, &vecs)
    }
}

/// Random Hermitian operators scaled to unit Schatten-`alpha` norm.
pub struct SchattenNormalisedFamily {
    pub seed: u64,
    pub alpha: f64,
}

impl OperatorFamily for SchattenNormalisedFamily {
    fn name(&self) -> &str {
        "random-schatten"
    }
    fn build(&self, n: usize) -> Result<DensityOperator> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (n as u64).wrapping_mul(0xA076_1D64_78BD_642F));
        let g = DensityOperator::random_hermitian(n, n, &mut rng);
        let norm = g.schatten_norm(self.alpha)?;
        Ok(g.scaled(1.0 / norm))
    }
}

pub fn family_by_name(name: &str, seed: u64, alpha: f64) -> Option<Box<dyn OperatorFamily>> {
    Some(match name {
        "diagonal" => Box::new(DiagonalFamily),
        "cosine" => Box::new(CosineFamily),
        "random-hs" => Box::new(RandomHsFamily { seed }),
        "trace-normalised" => Box::new(TraceNormalisedFamily { seed }),
        "random-schatten" => Box::new(SchattenNormalisedFamily { seed, alpha }),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::TorusGrid;

    #[test]
    fn cosine_family_basics() {
        let g = cosine_family(1, 3).unwrap();
        for x in [0.0, 0.4, 2.0] {
            let rho = g.density_at(x);
            assert!((rho.re - (1.0 + (2.0 * x).cos()) / (2.0 * PI)).abs() < 1e-14);
        }
        let g = cosine_family(7, 9).unwrap();
        assert!((g.trace().re - 7.0).abs() < 1e-14);
        for alpha in [1.0, 2.0, 3.0, f64::INFINITY] {
            let s = g.schatten_norm(alpha).unwrap();
            let expected = if alpha.is_infinite() { 1.0 } else { 7f64.powf(1.0 / alpha) };
            assert!((s - expected).abs() < 1e-12);
        }
        assert!(cosine_family(5, 4).is_err());
    }

    #[test]
    fn cosine_matches_rank_one_sum() {
        let n = 4;
        let phis: Vec<_> = (1..=n as i64)
            .map(|j| {
                FourierField::from_fn(6, |m| {
                    if m.abs() == j {
                        Complex64::new(0.5f64.sqrt(), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let oracle = DensityOperator::from_rank_one_sum(&vec![1.0; n], &phis).unwrap();
        let g = cosine_family(n, 6).unwrap();
        assert!(g.matrix().sub(oracle.matrix()).max_abs() < 1e-15);
        let grid = TorusGrid::new(40).unwrap();
        let rb = g.renormalised_density(&grid);
        for (k, v) in rb.values.iter().enumerate() {
            assert!((v.re - dirichlet_closed_form(n, grid.x(k))).abs() < 1e-13);
        }
    }

    #[test]
    fn dirichlet_limits_and_direct_sum() {
        assert!((dirichlet_closed_form(9, 0.0) - 9.0 / (2.0 * PI)).abs() < 1e-13);
        assert!((dirichlet_closed_form(9, PI) - 9.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(dirichlet_closed_form(1, PI / 4.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x: f64 = rand::Rng::random_range(&mut rng, 0.0..2.0 * PI);
            let direct: f64 = (1..=17).map(|j| (2.0 * j as f64 * x).cos()).sum::<f64>() / (2.0 * PI);
            assert!((dirichlet_closed_form(17, x) - direct).abs() < 1e-12);
        }
        let near = 1e-9;
        let direct: f64 = (1..=5).map(|j| (2.0 * j as f64 * near).cos()).sum::<f64>() / (2.0 * PI);
        assert!((dirichlet_closed_form(5, near) - direct).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_system_gram() {
        let one = random_orthonormal_system(1, 3, 0).unwrap();
        assert!((one[0].l2_norm() - 1.0).abs() < 1e-14);
        let a = random_orthonormal_system(8, 16, 77).unwrap();
        let b = random_orthonormal_system(8, 16, 77).unwrap();
        assert_eq!(a, b);
        for i in 0..8 {
            for j in 0..8 {
                let g = a[i].inner(&a[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(target, 0.0)).norm() < 1e-12);
            }
        }
        let full = random_orthonormal_system(7, 3, 1).unwrap();
        assert_eq!(full.len(), 7);
        assert!(matches!(
            random_orthonormal_system(8, 3, 1),
            Err(Error::DimensionExceeded { .. })
        ));
    }

    #[test]
    fn normalised_families() {
        let hs = RandomHsFamily { seed: 3 }.build(6).unwrap();
        assert!((hs.schatten_norm(2.0).unwrap() - 1.0).abs() < 1e-12);
        let tr = TraceNormalisedFamily { seed: 3 }.build(5).unwrap();
        assert!((tr.schatten_norm(1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((tr.trace().re - 1.0).abs() < 1e-12);
        let sa = SchattenNormalisedFamily { seed: 3, alpha: 1.5 }.build(4).unwrap();
        assert!((sa.schatten_norm(1.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(family_by_name("nope", 0, 2.0).is_none());
    }
}
