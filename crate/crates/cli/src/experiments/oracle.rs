use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use torus_density::fourier::FourierField;

/// `|u|^2` for the one-body cubic equation `i u_t = -u_xx + s |u|^2 u`, by
/// Strang splitting on its own FFT grid of `2M + 1` points (`M` the cutoff of
/// `u0`). Returns `snapshots + 1` rows at equally spaced times in `[0, T]`.
pub fn one_body_density(u0: &FourierField, s: f64, horizon: f64, snapshots: usize, steps_per: usize) -> Vec<Vec<f64>> {
    let m = u0.cutoff() as i64;
    let k = (2 * m + 1) as usize;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(k);
    let inv = planner.plan_fft_inverse(k);
    let norm = (2.0 * PI).sqrt();
    let mut hat = vec![Complex64::new(0.0, 0.0); k];
    for (n, z) in u0.modes() {
        hat[n.rem_euclid(k as i64) as usize] = Complex64::new(z.re, z.im);
    }
    let h = horizon / (snapshots * steps_per) as f64;
    let half: Vec<Complex64> = (0..k)
        .map(|i| {
            let n = if i as i64 <= m { i as f64 } else { i as f64 - k as f64 };
            Complex64::from_polar(1.0, -n * n * h / 2.0)
        })
        .collect();
    let values = |hat: &[Complex64]| {
        let mut u = hat.to_vec();
        inv.process(&mut u);
        u.iter_mut().for_each(|z| *z /= norm);
        u
    };
    let mut out = vec![values(&hat).iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()];
    for _ in 0..snapshots {
        for _ in 0..steps_per {
            hat.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
            let mut u = values(&hat);
            u.iter_mut()
                .for_each(|z| *z *= Complex64::from_polar(1.0, -s * z.norm_sqr() * h));
            fwd.process(&mut u);
            for (a, z) in hat.iter_mut().zip(&u) {
                *a = z * norm / k as f64;
            }
            hat.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
        }
        out.push(values(&hat).iter().map(|z| z.norm_sqr()).collect());
    }
    out
}

/// Trapezoid in `t`, rectangle in `x`, over rows sampled every `dt`.
pub(crate) fn l2_tx(a: &[Vec<f64>], b: &[Vec<f64>], dt: f64) -> f64 {
    let dx = 2.0 * PI / a[0].len() as f64;
    let last = a.len() - 1;
    let mut acc = 0.0;
    for (j, (ra, rb)) in a.iter().zip(b).enumerate() {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        acc += w * ra.iter().zip(rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    }
    (acc * dx * dt).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_density_is_constant() {
        let u0 = FourierField::from_fn(4, |n| if n == 2 { torus_density::Complex64::new(0.8, 0.0) } else { torus_density::Complex64::new(0.0, 0.0) });
        let rows = one_body_density(&u0, 1.0, 0.3, 3, 10);
        for row in rows {
            for r in row {
                assert!((r - 0.64 / (2.0 * PI)).abs() < 1e-14);
            }
        }
    }
}
