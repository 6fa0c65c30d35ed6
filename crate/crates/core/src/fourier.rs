//! Fourier representation on the circle.
//!
//! Fields are stored as coefficients against the orthonormal basis
//! `e_n(x) = e^{inx} / sqrt(2 pi)`, `|n| <= M`. Sampling uses the uniform
//! grid `x_k = 2 pi k / K`, on which the rectangle rule integrates every
//! trigonometric polynomial of bandwidth below `K` exactly.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_7;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalised in-place DFT. Forward uses `e^{-2 pi i jk/K}`, inverse `e^{+2 pi i jk/K}`.
pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

/// Index of frequency `n` in a length-`len` DFT buffer.
#[inline]
pub(crate) fn wrap(n: i64, len: usize) -> usize {
    n.rem_euclid(len as i64) as usize
}

/// Smallest 5-smooth integer that is at least `n`.
pub fn next_smooth(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// A trigonometric polynomial with modes in `[-M, M]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn zero(cutoff: usize) -> Self {
        Self {
            cutoff,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1],
        }
    }

    /// Coefficients listed from mode `-M` to mode `M`.
    pub fn from_coeffs(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cutoff + 1 {
            return Err(Error::LengthMismatch {
                left: coeffs.len(),
                right: 2 * cutoff + 1,
            });
        }
        Ok(Self { cutoff, coeffs })
    }

    pub fn from_fn(cutoff: usize, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let m = cutoff as i64;
        Self {
            cutoff,
            coeffs: (-m..=m).map(&mut f).collect(),
        }
    }

    /// The basis function `e_n` at cutoff `M`.
    pub fn basis(n: i64, cutoff: usize) -> Result<Self> {
        if n.unsigned_abs() as usize > cutoff {
            return Err(Error::CutoffViolation { mode: n, cutoff });
        }
        let mut f = Self::zero(cutoff);
        f.coeffs[(n + cutoff as i64) as usize] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient against `e_n`; zero outside the window.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.cutoff {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.cutoff as i64) as usize]
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.cutoff as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - m, *c))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// L² norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &FourierField) -> Complex64 {
        let m = self.cutoff.min(other.cutoff) as i64;
        (-m..=m).map(|n| self.coeff(n).conj() * other.coeff(n)).sum()
    }

    /// Zero-pads or truncates to a new cutoff.
    pub fn resized(&self, cutoff: usize) -> FourierField {
        FourierField::from_fn(cutoff, |n| self.coeff(n))
    }

    pub fn scaled(&self, s: Complex64) -> FourierField {
        FourierField {
            cutoff: self.cutoff,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// L² distance, padding the smaller field.
    pub fn distance(&self, other: &FourierField) -> f64 {
        let m = self.cutoff.max(other.cutoff) as i64;
        (-m..=m)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Point evaluation `sum_n c_n e_n(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        self.modes()
            .map(|(n, c)| c * Complex64::from_polar(1.0, n as f64 * x))
            .sum::<Complex64>()
            / SQRT_TWO_PI
    }

    /// Free Schrödinger flow: `c_n -> e^{-i t n^2} c_n`.
    pub fn free_evolve(&self, t: f64) -> FourierField {
        let m = self.cutoff as i64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(-m..=m)
            .map(|(c, n)| c * kinetic_phase(n, t))
            .collect();
        FourierField {
            cutoff: self.cutoff,
            coeffs,
        }
    }

    /// `P_{<=N}`: zero every mode with `|n| > N`.
    pub fn dirichlet_project(&self, window: usize) -> FourierField {
        let m = self.cutoff as i64;
        let w = window as i64;
        let coeffs = self
            .coeffs
            .iter()
            .zip(-m..=m)
            .map(|(c, n)| if n.abs() > w { Complex64::new(0.0, 0.0) } else { *c })
            .collect();
        FourierField {
            cutoff: self.cutoff,
            coeffs,
        }
    }

    /// Samples on `grid`. Modes beyond the grid's Nyquist band alias, which
    /// still yields exact point values.
    pub fn synthesize(&self, grid: &TorusGrid) -> SampledField {
        let k = grid.points;
        let mut buf = vec![Complex64::new(0.0, 0.0); k];
        for (n, c) in self.modes() {
            buf[wrap(n, k)] += c / SQRT_TWO_PI;
        }
        fft_in_place(&mut buf, true);
        SampledField {
            grid: *grid,
            values: buf,
        }
    }
}

/// `e^{-i t n^2}`. Time is reduced modulo 2 pi first, which is exact for
/// integer `n^2`.
#[inline]
pub fn kinetic_phase(n: i64, t: f64) -> Complex64 {
    let n2 = (n * n) as f64;
    let t = t.rem_euclid(2.0 * PI);
    Complex64::from_polar(1.0, -(n2 * t).rem_euclid(2.0 * PI))
}

/// Uniform grid `x_k = 2 pi k / K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    points: usize,
}

impl TorusGrid {
    pub fn new(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::EmptySamples);
        }
        Ok(Self { points })
    }

    /// `ceil(factor * (2M + 1))` points.
    pub fn oversampled(cutoff: usize, factor: f64) -> Result<Self> {
        if !(factor >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "oversampling factor {factor} must be >= 1"
            )));
        }
        Self::new((factor * (2 * cutoff + 1) as f64).ceil() as usize)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn x(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.points as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    /// Largest cutoff `analyze` accepts on this grid.
    pub fn max_cutoff(&self) -> usize {
        (self.points - 1) / 2
    }
}

/// Point values of a function on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: TorusGrid,
    pub values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: grid.points,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.points).map(|k| f(grid.x(k))).collect();
        Self { grid, values }
    }

    pub fn from_real(grid: TorusGrid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|v| Complex64::new(*v, 0.0)).collect())
    }

    /// Discrete transform normalised against `e_n`. Needs `K >= 2M + 1`.
    pub fn analyze(&self, cutoff: usize) -> Result<FourierField> {
        let k = self.grid.points;
        if k < 2 * cutoff + 1 {
            return Err(Error::Aliasing {
                points: k,
                cutoff,
                needed: 2 * cutoff + 1,
            });
        }
        let mut buf = self.values.clone();
        fft_in_place(&mut buf, false);
        let scale = SQRT_TWO_PI / k as f64;
        Ok(FourierField::from_fn(cutoff, |n| buf[wrap(n, k)] * scale))
    }

    /// `(int |s|^p dx)^{1/p}` by the rectangle rule; `p = inf` gives the max.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_weighted(self.values.iter().map(|v| v.norm()), p, self.grid.spacing())
    }

    /// Mean over the circle, `(1/2pi) int s dx`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }
}

/// How time samples of a [`SpaceTimeBlock`] are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeRule {
    /// `n` samples `t_i = t0 + i L / n` of an `L`-periodic function; equal weights.
    Periodic,
    /// `n` samples including both endpoints; trapezoid weights.
    Trapezoid,
}

/// Samples `s(t_i, x_k)` of a space-time function, one row per time.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeBlock {
    pub span: f64,
    pub rule: TimeRule,
    pub grid: TorusGrid,
    pub rows: Vec<Vec<Complex64>>,
}

impl SpaceTimeBlock {
    fn time_weights(&self) -> Result<Vec<f64>> {
        let n = self.rows.len();
        if n == 0 {
            return Err(Error::EmptySamples);
        }
        Ok(match self.rule {
            TimeRule::Periodic => vec![self.span / n as f64; n],
            TimeRule::Trapezoid => {
                if n == 1 {
                    return Err(Error::EmptySamples);
                }
                let h = self.span / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h })
                    .collect()
            }
        })
    }

    /// `(int int |s|^p dx dt)^{1/p}` over the block.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let weights = self.time_weights()?;
        for row in &self.rows {
            if row.len() != self.grid.points {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: self.grid.points,
                });
            }
        }
        if p.is_infinite() {
            return Ok(self
                .rows
                .iter()
                .flatten()
                .fold(0.0, |m, v| m.max(v.norm())));
        }
        let dx = self.grid.spacing();
        let total: f64 = self
            .rows
            .iter()
            .zip(&weights)
            .map(|(row, w)| w * dx * row.iter().map(|v| v.norm().powf(p)).sum::<f64>())
            .sum();
        Ok(total.powf(1.0 / p))
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

pub(crate) fn lp_norm_weighted(
    values: impl Iterator<Item = f64>,
    p: f64,
    weight: f64,
) -> Result<f64> {
    check_exponent(p)?;
    let mut any = false;
    let mut acc = 0.0;
    for v in values {
        any = true;
        if p.is_infinite() {
            acc = f64::max(acc, v);
        } else {
            acc += v.powf(p);
        }
    }
    if !any {
        return Err(Error::EmptySamples);
    }
    if p.is_infinite() {
        Ok(acc)
    } else {
        Ok((weight * acc).powf(1.0 / p))
    }
}

pub fn basis_e(n: i64, cutoff: usize) -> Result<FourierField> {
    FourierField::basis(n, cutoff)
}

pub fn free_evolve(f: &FourierField, t: f64) -> FourierField {
    f.free_evolve(t)
}

pub fn dirichlet_project(f: &FourierField, window: usize) -> FourierField {
    f.dirichlet_project(window)
}

pub fn synthesize(f: &FourierField, grid: &TorusGrid) -> SampledField {
    f.synthesize(grid)
}

pub fn analyze(s: &SampledField, cutoff: usize) -> Result<FourierField> {
    s.analyze(cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(cutoff: usize, seed: u64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FourierField::from_fn(cutoff, |_| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn basis_zero_is_constant() {
        let e0 = basis_e(0, 4).unwrap();
        for k in [3usize, 9, 17] {
            let s = e0.synthesize(&TorusGrid::new(k).unwrap());
            for v in &s.values {
                assert!((v - Complex64::new(1.0 / SQRT_TWO_PI, 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(e0.l2_norm(), 1.0);
    }

    #[test]
    fn basis_three_at_pi() {
        let v = basis_e(3, 4).unwrap().eval(PI);
        assert!((v - Complex64::new(-1.0 / SQRT_TWO_PI, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn basis_rejects_out_of_window() {
        assert!(matches!(
            basis_e(5, 4),
            Err(Error::CutoffViolation { mode: 5, cutoff: 4 })
        ));
    }

    #[test]
    fn free_evolution_of_basis_is_a_phase() {
        let t = 0.37;
        for n in -4..=4 {
            let e = basis_e(n, 4).unwrap();
            let u = free_evolve(&e, t);
            let expected = e.scaled(Complex64::from_polar(1.0, -(n * n) as f64 * t));
            assert!(u.distance(&expected) < 1e-15);
        }
        let f = random_field(6, 1);
        assert_eq!(free_evolve(&f, 0.0), f);
    }

    #[test]
    fn free_evolution_is_two_pi_periodic() {
        let f = random_field(40, 2);
        assert!(free_evolve(&f, 2.0 * PI).distance(&f) < 1e-14);
    }

    #[test]
    fn dirichlet_projection_cases() {
        let f = random_field(4, 3);
        assert_eq!(dirichlet_project(&f, 4), f);
        let p = dirichlet_project(&basis_e(3, 4).unwrap(), 2);
        assert_eq!(p.l2_norm(), 0.0);
    }

    #[test]
    fn round_trip_and_constants() {
        let f = random_field(7, 4);
        let g = TorusGrid::oversampled(7, 4.0).unwrap();
        let back = analyze(&synthesize(&f, &g), 7).unwrap();
        assert!(back.distance(&f) < 1e-13);

        let s = synthesize(&basis_e(1, 2).unwrap(), &TorusGrid::new(8).unwrap());
        assert!((s.values[0] - Complex64::new(1.0 / SQRT_TWO_PI, 0.0)).norm() < 1e-15);

        let c = Complex64::new(0.7, -0.2);
        let grid = TorusGrid::new(11).unwrap();
        let constant = SampledField::from_fn(grid, |_| c);
        let a = constant.analyze(3).unwrap();
        assert!((a.coeff(0) - c * SQRT_TWO_PI).norm() < 1e-14);
        assert!(a.coeffs().iter().enumerate().all(|(i, v)| i == 3 || v.norm() < 1e-14));
    }

    #[test]
    fn analyze_rejects_aliasing() {
        let s = SampledField::from_fn(TorusGrid::new(8).unwrap(), |_| Complex64::new(1.0, 0.0));
        assert!(matches!(s.analyze(4), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn lp_norm_reference_values() {
        let grid = TorusGrid::new(64).unwrap();
        let one = SampledField::from_fn(grid, |_| Complex64::new(1.0, 0.0));
        assert!((one.lp_norm(2.0).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-13);
        let cos = SampledField::from_fn(grid, |x| Complex64::new(x.cos(), 0.0));
        assert!((cos.lp_norm(2.0).unwrap() - PI.sqrt()).abs() < 1e-13);
        // |U(t) e_n|^2 integrates to one.
        let e = basis_e(5, 8).unwrap().free_evolve(1.3).synthesize(&grid);
        let density = SampledField::from_fn(grid, |_| Complex64::new(0.0, 0.0));
        let density = SampledField {
            values: e.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect(),
            ..density
        };
        assert!((density.lp_norm(1.0).unwrap() - 1.0).abs() < 1e-13);
        assert!(one.lp_norm(0.5).is_err());
        let block = SpaceTimeBlock {
            span: 1.0,
            rule: TimeRule::Periodic,
            grid,
            rows: vec![],
        };
        assert!(matches!(block.lp_norm(2.0), Err(Error::EmptySamples)));
    }

    #[test]
    fn spacetime_block_constant() {
        let grid = TorusGrid::new(16).unwrap();
        let rows = vec![vec![Complex64::new(2.0, 0.0); 16]; 5];
        let block = SpaceTimeBlock {
            span: 3.0,
            rule: TimeRule::Trapezoid,
            grid,
            rows,
        };
        let expected = 2.0 * (3.0 * 2.0 * PI).sqrt();
        assert!((block.lp_norm(2.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn next_smooth_values() {
        assert_eq!(next_smooth(1), 1);
        assert_eq!(next_smooth(7), 8);
        assert_eq!(next_smooth(4097), 4320);
    }

    proptest! {
        #[test]
        fn unitarity_and_group_law(seed in 0u64..1000, s in -10.0f64..10.0, t in -10.0f64..10.0) {
            let f = random_field(12, seed);
            let once = f.free_evolve(s + t);
            let twice = f.free_evolve(s).free_evolve(t);
            prop_assert!((once.l2_norm() - f.l2_norm()).abs() < 1e-13);
            prop_assert!(once.distance(&twice) < 1e-12);
        }

        #[test]
        fn projection_is_contractive_and_idempotent(seed in 0u64..1000, n in 0usize..12) {
            let f = random_field(10, seed);
            let p = f.dirichlet_project(n);
            prop_assert!(p.l2_norm() <= f.l2_norm() + 1e-15);
            prop_assert_eq!(p.dirichlet_project(n), p);
        }

        #[test]
        fn quadrature_matches_parseval(seed in 0u64..1000, m in 0usize..20) {
            let f = random_field(m, seed);
            let grid = TorusGrid::new(2 * (2 * m + 1)).unwrap();
            let q = f.synthesize(&grid).lp_norm(2.0).unwrap();
            prop_assert!((q - f.l2_norm()).abs() < 1e-12);
        }
    }
}
