use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{fft_in_place, wrap, SQRT_TWO_PI};
use crate::operators::{CMatrix, DensityOperator};

/// Eigenvalues below this fraction of the largest one are dropped.
pub const RANK_THRESHOLD: f64 = 1e-14;

/// `gamma = sum_j w_j |u_j><u_j|` with the `u_j` stored as DFT-ordered
/// coefficients on the grid `K = 2 cutoff + 1`.
#[derive(Clone, Debug)]
pub(crate) struct Modes {
    pub cutoff: usize,
    pub weights: Vec<f64>,
    pub coeffs: Vec<Vec<Complex64>>,
}

impl Modes {
    pub fn from_operator(gamma: &DensityOperator, cutoff: usize) -> Result<Self> {
        if gamma.cutoff() > cutoff {
            return Err(Error::CutoffMismatch {
                left: gamma.cutoff(),
                right: cutoff,
            });
        }
        let eig = gamma.hermitian_eig()?;
        let top = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let k = 2 * cutoff + 1;
        let mut weights = Vec::new();
        let mut coeffs = Vec::new();
        for (w, u) in eig.values.iter().zip(&eig.left) {
            if w.abs() <= RANK_THRESHOLD * top || *w == 0.0 {
                continue;
            }
            let mut c = vec![Complex64::new(0.0, 0.0); k];
            for (n, z) in u.modes() {
                c[wrap(n, k)] = z;
            }
            weights.push(*w);
            coeffs.push(c);
        }
        Ok(Self {
            cutoff,
            weights,
            coeffs,
        })
    }

    pub fn points(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn operator(&self) -> DensityOperator {
        let k = self.points();
        let m = self.cutoff as i64;
        let mut g = CMatrix::zeros(k);
        for (w, c) in self.weights.iter().zip(&self.coeffs) {
            for (i, a) in (-m..=m).enumerate() {
                let ca = c[wrap(a, k)] * *w;
                if ca == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (j, b) in (-m..=m).enumerate() {
                    g[(i, j)] += ca * c[wrap(b, k)].conj();
                }
            }
        }
        // Exact Hermitian symmetry, so the flag never depends on roundoff.
        for i in 0..k {
            g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
            for j in (i + 1)..k {
                let z = 0.5 * (g[(i, j)] + g[(j, i)].conj());
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        DensityOperator::new(self.cutoff, g).expect("dimension matches")
    }
}

/// Samples `u(x_k)` of one mode.
pub(crate) fn samples(c: &[Complex64], out: &mut [Complex64]) {
    out.copy_from_slice(c);
    fft_in_place(out, true);
    out.iter_mut().for_each(|z| *z /= SQRT_TWO_PI);
}

/// Adds `w |u(x_k)|^2` to `rho`.
pub(crate) fn accumulate_density(c: &[Complex64], w: f64, scratch: &mut [Complex64], rho: &mut [f64]) {
    samples(c, scratch);
    for (r, u) in rho.iter_mut().zip(scratch.iter()) {
        *r += w * u.norm_sqr();
    }
}

/// Subtracts the spatial mean, which on the grid equals `Tr gamma / 2pi`.
pub(crate) fn renormalise(rho: &mut [f64]) {
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    rho.iter_mut().for_each(|r| *r -= mean);
}

/// `||a - b||_{L^2}` over a block of rows on a uniform time mesh of step `h`
/// (trapezoid in time, rectangle rule in space).
pub(crate) fn block_l2_diff(a: &[Vec<f64>], b: &[Vec<f64>], h: f64) -> f64 {
    let last = a.len().saturating_sub(1);
    let mut acc = 0.0;
    for (j, (ra, rb)) in a.iter().zip(b).enumerate() {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        let dx = 2.0 * std::f64::consts::PI / ra.len() as f64;
        acc += w * dx * ra.iter().zip(rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    }
    (acc * h.abs()).sqrt()
}
