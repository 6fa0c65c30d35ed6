use num_complex::Complex64;

use super::potential::PotentialField;
use crate::error::{Error, Result};
use crate::fourier::{fft_in_place, kinetic_phase, wrap, FourierField};

pub const MAX_PICARD_ITERATIONS: usize = 100;
pub const MAX_HALVINGS: usize = 12;

/// Picard iteration of the Duhamel equation in the interaction picture
/// `w(t) = U(a - t) u(t)`:
///
/// `w(t) = u(a) - i int_a^t U(a - t') V(t') U(t' - a) w(t') dt'`,
///
/// with the integral replaced by the cumulative trapezoid rule on a uniform
/// mesh of each window. Windows that fail to contract are halved.
#[derive(Clone, Debug, PartialEq)]
pub struct DuhamelPicard {
    pub dt: f64,
    pub tol: f64,
    pub window: f64,
    pub cutoff: usize,
}

/// Outcome of one window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowLog {
    pub start: f64,
    pub end: f64,
    pub iterations: usize,
    /// Successive sup-in-time differences.
    pub differences: Vec<f64>,
}

impl WindowLog {
    /// `d_2 / d_1`, the first observed contraction ratio.
    pub fn first_ratio(&self) -> Option<f64> {
        match self.differences.as_slice() {
            [a, b, ..] if *a > 0.0 => Some(b / a),
            _ => None,
        }
    }
}

struct Window<'a> {
    k: usize,
    cutoff: usize,
    v: &'a PotentialField,
    row: Vec<f64>,
    buf: Vec<Complex64>,
}

impl Window<'_> {
    /// `-i U(a - tau) V(tau) U(tau - a) w`.
    fn rhs(&mut self, w: &[Complex64], a: f64, tau: f64, out: &mut [Complex64]) {
        let m = self.cutoff as i64;
        for n in -m..=m {
            let i = wrap(n, self.k);
            self.buf[i] = w[i] * kinetic_phase(n, tau - a);
        }
        fft_in_place(&mut self.buf, true);
        self.v.row_at(tau, &mut self.row);
        let scale = 1.0 / self.k as f64;
        for (u, v) in self.buf.iter_mut().zip(&self.row) {
            *u *= Complex64::new(0.0, -v * scale);
        }
        fft_in_place(&mut self.buf, false);
        for n in -m..=m {
            let i = wrap(n, self.k);
            out[i] = self.buf[i] * kinetic_phase(n, a - tau);
        }
    }
}

fn l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

impl DuhamelPicard {
    pub fn new(dt: f64, tol: f64, window: f64, cutoff: usize) -> Result<Self> {
        for (name, x) in [("time step", dt), ("tolerance", tol), ("window", window)] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} {x}")));
            }
        }
        Ok(Self {
            dt,
            tol,
            window,
            cutoff,
        })
    }

    fn grid_points(&self) -> usize {
        2 * self.cutoff + 1
    }

    /// Runs the Picard iteration on `[a, b]` starting from `u(a) = u0`
    /// (coefficients in DFT order). Returns `u(b)` and the log.
    fn window_solve(&self, u0: &[Complex64], v: &PotentialField, a: f64, b: f64) -> Result<(Vec<Complex64>, WindowLog)> {
        let k = self.grid_points();
        let steps = ((b - a).abs() / self.dt).ceil().max(1.0) as usize;
        let h = (b - a) / steps as f64;
        let nodes: Vec<f64> = (0..=steps).map(|j| a + h * j as f64).collect();
        let mut ctx = Window {
            k,
            cutoff: self.cutoff,
            v,
            row: Vec::with_capacity(k),
            buf: vec![Complex64::new(0.0, 0.0); k],
        };
        let zero = vec![Complex64::new(0.0, 0.0); k];
        let mut w: Vec<Vec<Complex64>> = vec![u0.to_vec(); steps + 1];
        let mut f: Vec<Vec<Complex64>> = vec![zero.clone(); steps + 1];
        let mut log = WindowLog {
            start: a,
            end: b,
            iterations: 0,
            differences: Vec::new(),
        };
        for it in 1..=MAX_PICARD_ITERATIONS {
            for j in 0..=steps {
                ctx.rhs(&w[j], a, nodes[j], &mut f[j]);
            }
            let mut next = u0.to_vec();
            let mut worst = 0.0f64;
            for j in 0..=steps {
                if j > 0 {
                    for i in 0..k {
                        next[i] += (f[j - 1][i] + f[j][i]) * (h / 2.0);
                    }
                }
                worst = worst.max(l2_diff(&next, &w[j]));
                w[j].copy_from_slice(&next);
            }
            log.iterations = it;
            log.differences.push(worst);
            if worst < self.tol {
                let m = self.cutoff as i64;
                let mut out = zero.clone();
                for n in -m..=m {
                    let i = wrap(n, k);
                    out[i] = w[steps][i] * kinetic_phase(n, b - a);
                }
                return Ok((out, log));
            }
            let d = &log.differences;
            if d.len() >= 3 && d[d.len() - 1] >= d[d.len() - 2] {
                break;
            }
        }
        let d = &log.differences;
        let ratio = if d.len() >= 2 { d[d.len() - 1] / d[d.len() - 2] } else { f64::INFINITY };
        Err(Error::NonContraction {
            window: (b - a).abs(),
            ratio,
        })
    }

    pub fn evolve_logged(
        &self,
        phi: &FourierField,
        v: &PotentialField,
        s: f64,
        t: f64,
    ) -> Result<(FourierField, Vec<WindowLog>)> {
        v.covers(s, t)?;
        if phi.cutoff() > self.cutoff {
            return Err(Error::CutoffMismatch {
                left: phi.cutoff(),
                right: self.cutoff,
            });
        }
        let k = self.grid_points();
        let v = v.resampled(k);
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        for (n, z) in phi.modes() {
            c[wrap(n, k)] = z;
        }
        let dir = if t >= s { 1.0 } else { -1.0 };
        let mut len = self.window;
        let mut halvings = 0;
        let mut cur = s;
        let mut logs = Vec::new();
        while (t - cur) * dir > 1e-15 * t.abs().max(1.0) {
            let end = if (t - cur).abs() <= len { t } else { cur + dir * len };
            match self.window_solve(&c, &v, cur, end) {
                Ok((next, log)) => {
                    c = next;
                    cur = end;
                    logs.push(log);
                }
                Err(Error::NonContraction { window, ratio }) => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        return Err(Error::NonContraction { window, ratio });
                    }
                    len = window / 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        Ok((FourierField::from_fn(self.cutoff, |n| c[wrap(n, k)]), logs))
    }

    pub fn evolve(&self, phi: &FourierField, v: &PotentialField, s: f64, t: f64) -> Result<FourierField> {
        Ok(self.evolve_logged(phi, v, s, t)?.0)
    }

    /// First contraction ratio of the Picard map on the single window `[s, s + len]`.
    pub fn contraction_ratio(&self, phi: &FourierField, v: &PotentialField, s: f64, len: f64) -> Result<f64> {
        v.covers(s, s + len)?;
        let k = self.grid_points();
        let v = v.resampled(k);
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        for (n, z) in phi.resized(self.cutoff).modes() {
            c[wrap(n, k)] = z;
        }
        let log = match self.window_solve(&c, &v, s, s + len) {
            Ok((_, log)) => log,
            Err(Error::NonContraction { ratio, .. }) => return Ok(ratio),
            Err(e) => return Err(e),
        };
        log.first_ratio()
            .ok_or_else(|| Error::InvalidArgument("too few iterations for a ratio".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::split_step::split_step_evolve;

    fn field() -> FourierField {
        FourierField::from_fn(6, |n| Complex64::new(1.0 / (1 + n * n) as f64, 0.3 * n as f64 / 7.0))
    }

    #[test]
    fn zero_potential_is_free_flow() {
        let phi = field();
        let d = DuhamelPicard::new(0.05, 1e-13, 0.5, 6).unwrap();
        let out = d.evolve(&phi, &PotentialField::zero(2.0), 0.0, 1.7).unwrap();
        assert!(out.distance(&phi.free_evolve(1.7)) < 1e-12);
    }

    #[test]
    fn agrees_with_fine_split_step() {
        let phi = field();
        let v = PotentialField::from_fn(1.0, 201, 16, |t, x| t.cos() * x.cos()).unwrap();
        let d = DuhamelPicard::new(1e-3, 1e-12, 0.25, 6).unwrap();
        let a = d.evolve(&phi, &v, 0.0, 1.0).unwrap();
        let b = split_step_evolve(&phi, &v, 0.0, 1.0, 4000, 6).unwrap();
        assert!(a.distance(&b) < 1e-5, "{}", a.distance(&b));
    }

    #[test]
    fn ratios_decrease_with_window() {
        let phi = field();
        let v = PotentialField::from_fn(2.0, 101, 16, |t, x| 4.0 * (t + x).cos()).unwrap();
        let d = DuhamelPicard::new(1e-2, 1e-12, 1.0, 6).unwrap();
        let ratios: Vec<f64> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&w| d.contraction_ratio(&phi, &v, 0.0, w).unwrap())
            .collect();
        for pair in ratios.windows(2) {
            assert!(pair[1] < pair[0], "{ratios:?}");
        }
    }

    #[test]
    fn strong_potential_forces_halving() {
        let phi = field();
        let v = PotentialField::from_fn(1.0, 11, 16, |_, x| 10.0 * x.cos()).unwrap();
        let d = DuhamelPicard::new(1e-3, 1e-10, 1.0, 6).unwrap();
        let (out, logs) = d.evolve_logged(&phi, &v, 0.0, 1.0).unwrap();
        assert!(logs.iter().all(|l| l.end - l.start < 1.0));
        assert!((out.l2_norm() - phi.l2_norm()).abs() < 1e-5);
        let reference = split_step_evolve(&phi, &v, 0.0, 1.0, 20_000, 6).unwrap();
        assert!(out.distance(&reference) < 1e-4);
    }
}
