//! Finite-rank density operators on `L^2` of the circle.
//!
//! An operator is stored through its matrix `G(m, n) = <e_m, A e_n>` on the
//! modes `|m|, |n| <= M`. Its density is
//!
//! `rho_A(x) = (1/2pi) sum_{m,n} G(m, n) e^{i(m-n)x}`,
//!
//! and the renormalised density subtracts the mean `Tr A / 2pi`.

mod io;
pub mod matrix;

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fourier::{check_exponent, FourierField, SampledField, TorusGrid, SQRT_TWO_PI};
pub use io::{read_operator, write_operator};
pub use matrix::CMatrix;

/// Tolerance of the Hermitian flag, relative to the largest entry.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Singular (or eigen) data `A = sum_j a_j |phi_j><psi_j|`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub values: Vec<f64>,
    pub left: Vec<FourierField>,
    pub right: Vec<FourierField>,
}

impl SpectralData {
    /// `sum_j a_j |phi_j><psi_j|` as a matrix.
    pub fn reconstruct(&self, cutoff: usize) -> CMatrix {
        let d = 2 * cutoff + 1;
        let mut g = CMatrix::zeros(d);
        for ((a, l), r) in self.values.iter().zip(&self.left).zip(&self.right) {
            for i in 0..d {
                let li = l.coeffs()[i] * *a;
                if li == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    g[(i, j)] += li * r.coeffs()[j].conj();
                }
            }
        }
        g
    }
}

#[derive(Debug)]
pub struct DensityOperator {
    cutoff: usize,
    matrix: CMatrix,
    hermitian: bool,
    singular_values: OnceLock<Vec<f64>>,
    eigen: OnceLock<SpectralData>,
}

impl Clone for DensityOperator {
    fn clone(&self) -> Self {
        Self {
            cutoff: self.cutoff,
            matrix: self.matrix.clone(),
            hermitian: self.hermitian,
            singular_values: self.singular_values.clone(),
            eigen: self.eigen.clone(),
        }
    }
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.cutoff == other.cutoff && self.matrix == other.matrix
    }
}

impl DensityOperator {
    pub fn new(cutoff: usize, matrix: CMatrix) -> Result<Self> {
        let d = 2 * cutoff + 1;
        if matrix.dim() != d {
            return Err(Error::LengthMismatch {
                left: matrix.dim(),
                right: d,
            });
        }
        let scale = matrix.max_abs().max(1.0);
        let hermitian = matrix.hermitian_asymmetry() <= HERMITIAN_TOLERANCE * scale;
        Ok(Self {
            cutoff,
            matrix,
            hermitian,
            singular_values: OnceLock::new(),
            eigen: OnceLock::new(),
        })
    }

    /// Builds `G(m, n) = f(m, n)` for mode indices `m, n`.
    pub fn from_fn(cutoff: usize, mut f: impl FnMut(i64, i64) -> Complex64) -> Self {
        let m = cutoff as i64;
        let matrix = CMatrix::from_fn(2 * cutoff + 1, |i, j| f(i as i64 - m, j as i64 - m));
        Self::new(cutoff, matrix).expect("dimension matches by construction")
    }

    pub fn zero(cutoff: usize) -> Self {
        Self::new(cutoff, CMatrix::zeros(2 * cutoff + 1)).expect("dimension matches")
    }

    /// `sum_n a_n |e_n><e_n|`.
    pub fn diagonal(cutoff: usize, a: impl Fn(i64) -> f64) -> Self {
        Self::from_fn(cutoff, |m, n| {
            if m == n {
                Complex64::new(a(n), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `sum_j w_j |phi_j><phi_j|`.
    pub fn from_rank_one_sum(weights: &[f64], vectors: &[FourierField]) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::LengthMismatch {
                left: weights.len(),
                right: vectors.len(),
            });
        }
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidArgument("no vectors given".into()));
        };
        let cutoff = first.cutoff();
        if let Some(bad) = vectors.iter().find(|v| v.cutoff() != cutoff) {
            return Err(Error::CutoffMismatch {
                left: cutoff,
                right: bad.cutoff(),
            });
        }
        let d = 2 * cutoff + 1;
        let mut g = CMatrix::zeros(d);
        for (w, v) in weights.iter().zip(vectors) {
            let c = v.coeffs();
            for i in 0..d {
                let ci = c[i] * *w;
                if ci == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    g[(i, j)] += ci * c[j].conj();
                }
            }
        }
        Self::new(cutoff, g)
    }

    /// Hermitian matrix with i.i.d. complex Gaussian entries on the window
    /// `|m|, |n| <= window`, zero elsewhere.
    pub fn random_hermitian(cutoff: usize, window: usize, rng: &mut impl Rng) -> Self {
        let w = window.min(cutoff) as i64;
        let m0 = cutoff as i64;
        let d = 2 * cutoff + 1;
        let mut g = CMatrix::zeros(d);
        for m in -w..=w {
            for n in m..=w {
                let i = (m + m0) as usize;
                let j = (n + m0) as usize;
                if m == n {
                    let x: f64 = rng.sample(StandardNormal);
                    g[(i, i)] = Complex64::new(x, 0.0);
                } else {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let z = Complex64::new(re, im) / 2f64.sqrt();
                    g[(i, j)] = z;
                    g[(j, i)] = z.conj();
                }
            }
        }
        Self::new(cutoff, g).expect("dimension matches")
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    fn index(&self, n: i64) -> Option<usize> {
        (n.unsigned_abs() as usize <= self.cutoff).then(|| (n + self.cutoff as i64) as usize)
    }

    /// `G(m, n)`, zero outside the window.
    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        match (self.index(m), self.index(n)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.matrix.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Multiplies every entry by `s` (Schatten norms scale by `|s|`).
    pub fn scaled(&self, s: f64) -> Self {
        let d = self.matrix.dim();
        let matrix = CMatrix::from_fn(d, |i, j| self.matrix[(i, j)] * s);
        Self::new(self.cutoff, matrix).expect("dimension matches")
    }

    /// Restriction to a smaller or larger mode window.
    pub fn resized(&self, cutoff: usize) -> Self {
        Self::from_fn(cutoff, |m, n| self.get(m, n))
    }

    /// `P_{<=N} A P_{<=N}` at the same cutoff.
    pub fn project(&self, window: usize) -> Self {
        let w = window as i64;
        Self::from_fn(self.cutoff, |m, n| {
            if m.abs() <= w && n.abs() <= w {
                self.get(m, n)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `U(t) A U*(t)`: `G(m, n) -> e^{-it(m^2 - n^2)} G(m, n)`.
    pub fn conjugate_free(&self, t: f64) -> Self {
        let t = t.rem_euclid(2.0 * PI);
        Self::from_fn(self.cutoff, |m, n| {
            let g = self.get(m, n);
            let tau = (m * m - n * n) as f64;
            g * Complex64::from_polar(1.0, -(tau * t).rem_euclid(2.0 * PI))
        })
    }

    /// Applies the operator to a field at the same cutoff.
    pub fn apply(&self, f: &FourierField) -> FourierField {
        let f = f.resized(self.cutoff);
        let d = self.matrix.dim();
        let coeffs = (0..d)
            .map(|i| {
                self.matrix
                    .row(i)
                    .iter()
                    .zip(f.coeffs())
                    .map(|(g, c)| g * c)
                    .sum()
            })
            .collect();
        FourierField::from_coeffs(self.cutoff, coeffs).expect("length matches")
    }

    /// Singular values in descending order, computed block by block.
    /// Hermitian operators use `|eigenvalues|`; general ones the square roots
    /// of the eigenvalues of `A* A`.
    pub fn singular_values(&self) -> &[f64] {
        self.singular_values.get_or_init(|| {
            let mut s: Vec<f64> = if self.hermitian {
                matrix::hermitian_eigenvalues(&self.matrix)
                    .into_iter()
                    .map(f64::abs)
                    .collect()
            } else {
                let ata = self.matrix.adjoint().mul(&self.matrix);
                matrix::hermitian_eigenvalues(&ata)
                    .into_iter()
                    .map(|l| l.max(0.0).sqrt())
                    .collect()
            };
            s.sort_by(|a, b| b.total_cmp(a));
            s
        })
    }

    /// `||A||_{S^alpha}`; `alpha = inf` gives the operator norm.
    pub fn schatten_norm(&self, alpha: f64) -> Result<f64> {
        check_exponent(alpha)?;
        Ok(lp_of_values(self.singular_values(), alpha))
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Eigen-decomposition of a Hermitian operator, eigenvalues descending.
    pub fn hermitian_eig(&self) -> Result<&SpectralData> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                asymmetry: self.matrix.hermitian_asymmetry(),
            });
        }
        Ok(self.eigen.get_or_init(|| {
            let mut pairs = matrix::hermitian_eigenpairs(&self.matrix);
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
            let vectors: Vec<FourierField> = pairs
                .iter()
                .map(|(_, v)| FourierField::from_coeffs(self.cutoff, v.clone()).expect("length"))
                .collect();
            SpectralData {
                values: pairs.iter().map(|p| p.0).collect(),
                left: vectors.clone(),
                right: vectors,
            }
        }))
    }

    /// Singular triples of a general operator through `A* A`; triples with
    /// vanishing singular value are dropped.
    pub fn singular_data(&self) -> SpectralData {
        let ata = self.matrix.adjoint().mul(&self.matrix);
        let mut pairs = matrix::hermitian_eigenpairs(&ata);
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let top = pairs.first().map(|p| p.0.max(0.0).sqrt()).unwrap_or(0.0);
        let mut data = SpectralData {
            values: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
        };
        for (lambda, v) in pairs {
            let sigma = lambda.max(0.0).sqrt();
            if sigma <= 1e-12 * top || sigma == 0.0 {
                continue;
            }
            let psi = FourierField::from_coeffs(self.cutoff, v).expect("length");
            let phi = self.apply(&psi).scaled(Complex64::new(1.0 / sigma, 0.0));
            data.values.push(sigma);
            data.left.push(phi);
            data.right.push(psi);
        }
        data
    }

    /// Density in coefficient form (cutoff `2M`):
    /// `rho^(k) = (1/sqrt(2pi)) sum_{m - n = k} G(m, n)`.
    pub fn density_coeffs(&self) -> FourierField {
        let m = self.cutoff as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (4 * m + 1) as usize];
        let d = self.matrix.dim();
        for i in 0..d {
            for (j, g) in self.matrix.row(i).iter().enumerate() {
                coeffs[(i as i64 - j as i64 + 2 * m) as usize] += g;
            }
        }
        for c in &mut coeffs {
            *c /= SQRT_TWO_PI;
        }
        FourierField::from_coeffs(2 * self.cutoff, coeffs).expect("length")
    }

    /// `rho_A` sampled on `grid`.
    pub fn density(&self, grid: &TorusGrid) -> SampledField {
        self.density_coeffs().synthesize(grid)
    }

    /// `rho_A - Tr A / 2pi` sampled on `grid`.
    pub fn renormalised_density(&self, grid: &TorusGrid) -> SampledField {
        let mut s = self.density(grid);
        let shift = self.trace() / (2.0 * PI);
        for v in &mut s.values {
            *v -= shift;
        }
        s
    }

    /// `rho_A(x)` by direct summation.
    pub fn density_at(&self, x: f64) -> Complex64 {
        self.density_coeffs().eval(x)
    }

    fn check_pairing_grid(&self, v: &SampledField) -> Result<()> {
        let needed = 4 * self.cutoff + 1;
        if v.grid.points() < needed {
            return Err(Error::Aliasing {
                points: v.grid.points(),
                cutoff: 2 * self.cutoff,
                needed,
            });
        }
        Ok(())
    }

    /// `int rho_A V dx` by quadrature on the grid of `v`.
    pub fn duality_pairing(&self, v: &SampledField) -> Result<Complex64> {
        self.check_pairing_grid(v)?;
        let rho = self.density(&v.grid);
        Ok(rho
            .values
            .iter()
            .zip(&v.values)
            .map(|(r, w)| r * w)
            .sum::<Complex64>()
            * v.grid.spacing())
    }

    /// Matrix of multiplication by `v` on the modes `|m|, |n| <= M`:
    /// `<e_m, V e_n> = V^(m - n) / sqrt(2pi)`.
    pub fn multiplier_matrix(v: &SampledField, cutoff: usize) -> Result<CMatrix> {
        let vhat = v.analyze(2 * cutoff)?;
        Ok(CMatrix::from_fn(2 * cutoff + 1, |i, j| {
            vhat.coeff(i as i64 - j as i64) / SQRT_TWO_PI
        }))
    }

    /// `Tr(A M_V)` computed on the operator side.
    pub fn trace_with_multiplier(&self, v: &SampledField) -> Result<Complex64> {
        self.check_pairing_grid(v)?;
        let mv = Self::multiplier_matrix(v, self.cutoff)?;
        let d = self.matrix.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.matrix[(i, j)] * mv[(j, i)];
            }
        }
        Ok(acc)
    }
}

/// `l^alpha` norm of a list of nonnegative values; `alpha = inf` gives the max.
pub fn lp_of_values(values: &[f64], alpha: f64) -> f64 {
    if alpha.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(*v));
    }
    let top = values.iter().fold(0.0, |m: f64, v| m.max(*v));
    if top == 0.0 {
        return 0.0;
    }
    top * values
        .iter()
        .map(|v| (v / top).powf(alpha))
        .sum::<f64>()
        .powf(1.0 / alpha)
}
