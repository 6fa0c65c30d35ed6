use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{check_exponent, fft_in_place, next_smooth, wrap, SpaceTimeBlock, TimeRule, TorusGrid};
use crate::operators::DensityOperator;

/// Default cap on the number of coefficients accepted by [`SpaceTimeDensity::l4_norm_exact`].
pub const DEFAULT_L4_BUDGET: usize = 20_000;

/// Relative change at which quadrature refinement stops.
pub const REFINE_TOLERANCE: f64 = 1e-6;
pub const REFINE_MAX_LEVELS: usize = 6;

/// `rho(t, x) = c + (1/2pi) sum_{k, tau} b(k, tau) e^{ikx - i tau t}` for a
/// freely evolved, projected operator. Coefficients are keyed by
/// `(k, tau) = (m - n, m^2 - n^2)` over off-diagonal modes `|m|, |n| <= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeDensity {
    window: usize,
    constant: Complex64,
    renormalised: bool,
    coeffs: BTreeMap<(i64, i64), Complex64>,
}

/// Result of a refined quadrature run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub previous: Option<f64>,
    pub levels: usize,
    pub t_points: usize,
    pub x_points: usize,
}

impl SpaceTimeDensity {
    /// Density of `U(t) P_N gamma P_N U*(t)`, optionally renormalised.
    pub fn from_operator(gamma: &DensityOperator, window: usize, renormalise: bool) -> Result<Self> {
        if window > gamma.cutoff() {
            return Err(Error::WindowTooLarge {
                window,
                cutoff: gamma.cutoff(),
            });
        }
        let w = window as i64;
        let mut coeffs = BTreeMap::new();
        let mut trace = Complex64::new(0.0, 0.0);
        for m in -w..=w {
            for n in -w..=w {
                let g = gamma.get(m, n);
                if m == n {
                    trace += g;
                    continue;
                }
                if g == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let previous = coeffs.insert((m - n, m * m - n * n), g);
                debug_assert!(previous.is_none(), "(m, n) -> (k, tau) must be injective");
            }
        }
        let constant = if renormalise {
            Complex64::new(0.0, 0.0)
        } else {
            trace / (2.0 * PI)
        };
        Ok(Self {
            window,
            constant,
            renormalised: renormalise,
            coeffs,
        })
    }

    /// Builds a density directly from coefficients; renormalised iff `constant == 0`.
    pub fn from_coefficients(
        window: usize,
        constant: Complex64,
        coeffs: BTreeMap<(i64, i64), Complex64>,
    ) -> Self {
        Self {
            window,
            constant,
            renormalised: constant == Complex64::new(0.0, 0.0),
            coeffs,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn is_renormalised(&self) -> bool {
        self.renormalised
    }

    pub fn coeffs(&self) -> &BTreeMap<(i64, i64), Complex64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64, tau: i64) -> Complex64 {
        self.coeffs.get(&(k, tau)).copied().unwrap_or_default()
    }

    pub fn is_time_independent(&self) -> bool {
        self.coeffs.keys().all(|&(_, tau)| tau == 0)
    }

    fn max_k(&self) -> i64 {
        self.coeffs.keys().map(|&(k, _)| k.abs()).max().unwrap_or(0)
    }

    fn max_tau(&self) -> i64 {
        self.coeffs.keys().map(|&(_, t)| t.abs()).max().unwrap_or(0)
    }

    /// Direct evaluation at one point.
    pub fn eval(&self, t: f64, x: f64) -> Complex64 {
        self.constant
            + self
                .coeffs
                .iter()
                .map(|(&(k, tau), b)| b * Complex64::from_polar(1.0, k as f64 * x - tau as f64 * t))
                .sum::<Complex64>()
                / (2.0 * PI)
    }

    /// Coefficients grouped by `k`.
    fn columns(&self) -> Vec<(i64, Vec<(i64, Complex64)>)> {
        let mut cols: Vec<(i64, Vec<(i64, Complex64)>)> = Vec::new();
        for (&(k, tau), b) in &self.coeffs {
            match cols.last_mut() {
                Some((kk, col)) if *kk == k => col.push((tau, *b)),
                _ => cols.push((k, vec![(tau, *b)])),
            }
        }
        cols
    }

    /// Samples at time `t` on `grid`.
    pub fn sample_row(&self, t: f64, grid: &TorusGrid) -> Vec<Complex64> {
        let kx = grid.points();
        let mut buf = vec![Complex64::new(0.0, 0.0); kx];
        for (&(k, tau), b) in &self.coeffs {
            buf[wrap(k, kx)] += b * Complex64::from_polar(1.0, -(tau as f64) * t) / (2.0 * PI);
        }
        fft_in_place(&mut buf, true);
        for v in &mut buf {
            *v += self.constant;
        }
        buf
    }

    /// Samples on the periodic grid `t_i = 2 pi i / t_points`.
    pub fn sample_block(&self, t_points: usize, grid: &TorusGrid) -> SpaceTimeBlock {
        let rows = (0..t_points)
            .map(|i| self.sample_row(2.0 * PI * i as f64 / t_points as f64, grid))
            .collect();
        SpaceTimeBlock {
            span: 2.0 * PI,
            rule: TimeRule::Periodic,
            grid: *grid,
            rows,
        }
    }

    /// Sum over the `(t_points x x_points)` periodic grid of `f(|rho|)`,
    /// streaming one time row at a time.
    fn grid_sum(&self, t_points: usize, x_points: usize, f: impl Fn(f64) -> f64 + Sync) -> f64 {
        let columns = self.columns();
        let roots: Vec<Complex64> = (0..t_points)
            .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / t_points as f64))
            .collect();
        let nt = t_points as i64;
        let scale = 1.0 / (2.0 * PI);
        let per_row: Vec<f64> = (0..t_points)
            .into_par_iter()
            .map(|i| {
                let mut buf = vec![Complex64::new(0.0, 0.0); x_points];
                for (k, col) in &columns {
                    let mut c = Complex64::new(0.0, 0.0);
                    for (tau, b) in col {
                        c += b * roots[(tau * i as i64).rem_euclid(nt) as usize];
                    }
                    buf[wrap(*k, x_points)] += c * scale;
                }
                fft_in_place(&mut buf, true);
                buf.iter().map(|v| f((v + self.constant).norm())).sum()
            })
            .collect();
        per_row.iter().sum()
    }

    fn lp_on_grid(&self, p: f64, t_points: usize, x_points: usize) -> f64 {
        let cell = (2.0 * PI / t_points as f64) * (2.0 * PI / x_points as f64);
        if p.is_infinite() {
            return self
                .grid_max(t_points, x_points);
        }
        (cell * self.grid_sum(t_points, x_points, |v| v.powf(p))).powf(1.0 / p)
    }

    fn grid_max(&self, t_points: usize, x_points: usize) -> f64 {
        let grid = TorusGrid::new(x_points).expect("nonzero");
        (0..t_points)
            .map(|i| {
                self.sample_row(2.0 * PI * i as f64 / t_points as f64, &grid)
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.norm()))
            })
            .fold(0.0, f64::max)
    }

    /// `||rho||_{L^2(T^2)}` from the coefficients: with the `1/2pi` convention
    /// this is the `l^2` norm of `b`.
    pub fn l2_norm_exact(&self) -> Result<f64> {
        if !self.renormalised {
            return Err(Error::InvalidArgument(
                "exact L2 path needs a renormalised density; use quadrature".into(),
            ));
        }
        Ok(self.coeffs.values().map(|b| b.norm_sqr()).sum::<f64>().sqrt())
    }

    /// `g(0, 0) = sum |b|^2`.
    pub fn autocorrelation_at_origin(&self) -> f64 {
        self.coeffs.values().map(|b| b.norm_sqr()).sum()
    }

    /// `||rho||_{L^4(T^2)}` from the autocorrelation
    /// `g(a, b) = sum_{k, tau} b(k, tau) conj(b(k - a, tau - b))`:
    /// `||rho||_4^4 = (1/4pi^2) sum |g|^2`. Cost is quadratic in the number of coefficients.
    pub fn l4_norm_exact(&self, budget: usize) -> Result<f64> {
        if !self.renormalised {
            return Err(Error::InvalidArgument(
                "exact L4 path needs a renormalised density; use quadrature".into(),
            ));
        }
        if self.coeffs.len() > budget {
            return Err(Error::BudgetExceeded {
                what: "L4 autocorrelation",
                size: self.coeffs.len(),
                budget,
            });
        }
        if self.coeffs.is_empty() {
            return Ok(0.0);
        }
        let columns = self.columns();
        let kmax = self.max_k();
        let tmax = self.max_tau();
        let mut slot = vec![usize::MAX; (2 * kmax + 1) as usize];
        for (i, (k, _)) in columns.iter().enumerate() {
            slot[(k + kmax) as usize] = i;
        }
        let width = (4 * tmax + 1) as usize;
        let per_alpha: Vec<f64> = (-2 * kmax..=2 * kmax)
            .into_par_iter()
            .map(|alpha| {
                let mut row = vec![Complex64::new(0.0, 0.0); width];
                let mut touched = false;
                for (k, col) in &columns {
                    let k2 = k - alpha;
                    if k2.abs() > kmax {
                        continue;
                    }
                    let j = slot[(k2 + kmax) as usize];
                    if j == usize::MAX {
                        continue;
                    }
                    touched = true;
                    let other = &columns[j].1;
                    for (tau, b) in col {
                        for (tau2, b2) in other {
                            row[(tau - tau2 + 2 * tmax) as usize] += b * b2.conj();
                        }
                    }
                }
                if touched {
                    row.iter().map(|g| g.norm_sqr()).sum()
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = per_alpha.iter().sum();
        Ok((total / (4.0 * PI * PI)).powf(0.25))
    }

    /// Grid sizes that integrate `|rho|^p` exactly when `p` is an even integer.
    fn exact_sizes(&self, p: f64) -> (usize, usize) {
        let p_int = p.ceil() as i64;
        let t = if self.is_time_independent() {
            1
        } else {
            next_smooth((p_int * self.max_tau() + 1) as usize)
        };
        (t, next_smooth((p_int * self.max_k() + 1) as usize))
    }

    /// Default starting grid: exact sizes for even integer `p`, otherwise
    /// oversampling 8 in `x` and 4 in `t` relative to the band of `rho`.
    pub fn default_sizes(&self, p: f64) -> (usize, usize) {
        if is_even_integer(p) {
            return self.exact_sizes(p);
        }
        let x = next_smooth(8 * (2 * self.max_k() + 1) as usize);
        let t = if self.is_time_independent() {
            1
        } else {
            next_smooth(4 * (2 * self.max_tau() + 1) as usize)
        };
        (t, x)
    }

    /// `||rho||_{L^p([0, 2pi]^2)}` by the tensor rectangle rule. With `refine`,
    /// grids double until the relative change drops below [`REFINE_TOLERANCE`].
    /// Time-independent densities skip the time direction.
    pub fn lp_norm_quadrature(&self, p: f64, t_samples: Option<usize>, refine: bool) -> Result<Quadrature> {
        check_exponent(p)?;
        let (t_default, x_points) = self.default_sizes(p);
        let static_profile = self.is_time_independent();
        let mut t_points = if static_profile {
            1
        } else {
            t_samples.unwrap_or(t_default).max(1)
        };
        let mut x_points = x_points.max(1);
        let mut value = self.lp_on_grid(p, t_points, x_points);
        if !refine {
            return Ok(Quadrature {
                value,
                previous: None,
                levels: 0,
                t_points,
                x_points,
            });
        }
        for level in 1..=REFINE_MAX_LEVELS {
            if !static_profile {
                t_points *= 2;
            }
            x_points *= 2;
            let next = self.lp_on_grid(p, t_points, x_points);
            let change = (next - value).abs() / next.abs().max(f64::MIN_POSITIVE);
            let previous = value;
            value = next;
            if change < REFINE_TOLERANCE || next == 0.0 {
                return Ok(Quadrature {
                    value,
                    previous: Some(previous),
                    levels: level,
                    t_points,
                    x_points,
                });
            }
            if level == REFINE_MAX_LEVELS {
                return Err(Error::Convergence {
                    what: "space-time quadrature",
                    last: value,
                    previous,
                });
            }
        }
        unreachable!()
    }
}

fn is_even_integer(p: f64) -> bool {
    p.is_finite() && p.fract() == 0.0 && (p as i64) % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strichartz::families::cosine_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_rank(rank: usize, cutoff: usize, seed: u64) -> DensityOperator {
        let vecs = crate::strichartz::random_orthonormal_system(rank, cutoff, seed).unwrap();
        let weights: Vec<f64> = (0..rank).map(|j| 1.0 / (j + 1) as f64).collect();
        DensityOperator::from_rank_one_sum(&weights, &vecs).unwrap()
    }

    #[test]
    fn diagonal_operator_renormalises_to_zero() {
        let d = DensityOperator::diagonal(5, |n| (n * n) as f64);
        let rho = SpaceTimeDensity::from_operator(&d, 5, true).unwrap();
        assert!(rho.is_empty());
        assert_eq!(rho.eval(0.3, 1.1), Complex64::new(0.0, 0.0));
        assert_eq!(rho.l2_norm_exact().unwrap(), 0.0);
        assert_eq!(rho.l4_norm_exact(DEFAULT_L4_BUDGET).unwrap(), 0.0);
    }

    #[test]
    fn window_beyond_cutoff_is_rejected() {
        let d = DensityOperator::zero(3);
        assert!(matches!(
            SpaceTimeDensity::from_operator(&d, 4, true),
            Err(Error::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn full_support_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6usize {
            let g = DensityOperator::random_hermitian(n, n, &mut rng);
            let rho = SpaceTimeDensity::from_operator(&g, n, true).unwrap();
            let d = 2 * n + 1;
            assert_eq!(rho.len(), d * d - d);
        }
    }

    #[test]
    fn cosine_family_coefficients() {
        let n = 5;
        let rho = SpaceTimeDensity::from_operator(&cosine_family(n, 7).unwrap(), n, true).unwrap();
        assert_eq!(rho.len(), 2 * n);
        for j in 1..=n as i64 {
            assert!((rho.coeff(2 * j, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            assert!((rho.coeff(-2 * j, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        assert!(rho.is_time_independent());
        assert!((rho.l2_norm_exact().unwrap() - (n as f64 / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sampler_matches_mode_by_mode_oracle() {
        let cutoff = 6;
        let window = 4;
        let gamma = random_rank(3, cutoff, 8);
        let rho = SpaceTimeDensity::from_operator(&gamma, window, true).unwrap();
        let eig = gamma.project(window).hermitian_eig().unwrap().clone();
        let trace: f64 = (-(window as i64)..=window as i64).map(|n| gamma.get(n, n).re).sum();
        let grid = TorusGrid::new(23).unwrap();
        for t in [0.0, 0.31, 2.2] {
            let row = rho.sample_row(t, &grid);
            for (k, v) in row.iter().enumerate() {
                let x = grid.x(k);
                let oracle: f64 = eig
                    .values
                    .iter()
                    .zip(&eig.left)
                    .map(|(a, phi)| a * phi.free_evolve(t).eval(x).norm_sqr())
                    .sum::<f64>()
                    - trace / (2.0 * PI);
                assert!((v.re - oracle).abs() < 1e-10 && v.im.abs() < 1e-12);
                assert!((rho.eval(t, x) - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn l2_exact_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = DensityOperator::random_hermitian(6, 6, &mut rng);
        let rho = SpaceTimeDensity::from_operator(&g, 6, true).unwrap();
        let exact = rho.l2_norm_exact().unwrap();
        let q = rho.lp_norm_quadrature(2.0, None, false).unwrap();
        assert!((exact - q.value).abs() < 1e-9 * exact);
        let refined = rho.lp_norm_quadrature(2.0, None, true).unwrap();
        assert!((exact - refined.value).abs() < 1e-8 * exact);
    }

    #[test]
    fn l4_single_cosine_both_ways() {
        let (k, tau) = (3, 5);
        let mut map = BTreeMap::new();
        map.insert((k, tau), Complex64::new(0.5, 0.0));
        map.insert((-k, -tau), Complex64::new(0.5, 0.0));
        let rho = SpaceTimeDensity::from_coefficients(3, Complex64::new(0.0, 0.0), map);
        let analytic = (3.0f64 / 8.0).powf(0.25) * (2.0 * PI).sqrt() / (2.0 * PI);
        let exact = rho.l4_norm_exact(DEFAULT_L4_BUDGET).unwrap();
        let quad = rho.lp_norm_quadrature(4.0, None, false).unwrap().value;
        assert!((exact - analytic).abs() < 1e-12);
        assert!((quad - analytic).abs() < 1e-12);
    }

    #[test]
    fn l4_matches_quadrature_for_random_rank_two() {
        let gamma = random_rank(2, 6, 21);
        let rho = SpaceTimeDensity::from_operator(&gamma, 6, true).unwrap();
        let exact = rho.l4_norm_exact(DEFAULT_L4_BUDGET).unwrap();
        let quad = rho.lp_norm_quadrature(4.0, None, false).unwrap().value;
        assert!((exact - quad).abs() < 1e-8 * exact);
    }

    #[test]
    fn l4_budget_is_enforced() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = DensityOperator::random_hermitian(5, 5, &mut rng);
        let rho = SpaceTimeDensity::from_operator(&g, 5, true).unwrap();
        assert!(matches!(rho.l4_norm_exact(10), Err(Error::BudgetExceeded { .. })));
        let raw = SpaceTimeDensity::from_operator(&g, 5, false).unwrap();
        assert!(raw.l2_norm_exact().is_err());
    }

    #[test]
    fn constant_density_quadrature() {
        let c = 0.7;
        let rho = SpaceTimeDensity::from_coefficients(1, Complex64::new(c, 0.0), BTreeMap::new());
        for p in [1.0, 2.0, 3.0] {
            let q = rho.lp_norm_quadrature(p, None, true).unwrap();
            assert!((q.value - c * (4.0 * PI * PI).powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_independent_profiles_agree_across_times() {
        let rho = SpaceTimeDensity::from_operator(&cosine_family(6, 6).unwrap(), 6, true).unwrap();
        let grid = TorusGrid::new(64).unwrap();
        let first = rho.sample_row(0.0, &grid);
        for t in [0.5, 1.7, 4.0] {
            let row = rho.sample_row(t, &grid);
            let dev = row.iter().zip(&first).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            assert!(dev < 1e-12);
        }
    }

    #[test]
    fn l3_refinement_converges_for_random_operator() {
        let gamma = random_rank(2, 4, 5);
        let rho = SpaceTimeDensity::from_operator(&gamma, 4, true).unwrap();
        let q = rho.lp_norm_quadrature(3.0, None, true).unwrap();
        assert!(q.levels >= 1);
        let prev = q.previous.unwrap();
        assert!((q.value - prev).abs() < REFINE_TOLERANCE * q.value);
    }
}
