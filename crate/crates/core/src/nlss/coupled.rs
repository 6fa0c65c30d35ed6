use num_complex::Complex64;

use super::modes::{accumulate_density, renormalise, samples, Modes};
use super::{NlssProblem, NlssTrajectory};
use crate::error::Result;
use crate::fourier::{fft_in_place, SQRT_TWO_PI};
use crate::propagator::Stepper;

/// All modes advanced together by Strang steps. The density is recomputed
/// after the first half kinetic step; the potential step leaves every
/// `|u_j(x)|` unchanged, so the step stays time-symmetric.
pub fn solve_coupled(p: &NlssProblem) -> Result<NlssTrajectory> {
    p.validate()?;
    let mut modes = Modes::from_operator(&p.gamma0, p.cutoff)?;
    let k = modes.points();
    let scale = p.potential_scale();
    let snap_times = p.snapshot_times();
    let mut stepper = Stepper::new(p.cutoff);
    let mut scratch = vec![Complex64::new(0.0, 0.0); k];
    let mut sampled: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); k]; modes.rank()];

    let density_now = |modes: &Modes, scratch: &mut Vec<Complex64>| {
        let mut rho = vec![0.0; k];
        for (c, w) in modes.coeffs.iter().zip(&modes.weights) {
            accumulate_density(c, *w, scratch, &mut rho);
        }
        if p.renormalised {
            renormalise(&mut rho);
        }
        rho
    };

    let mut traj = NlssTrajectory {
        method: "coupled".into(),
        renormalised: p.renormalised,
        snapshot_times: snap_times.clone(),
        snapshots: vec![modes.operator()],
        mesh: vec![0.0],
        density: vec![density_now(&modes, &mut scratch)],
        windows: Vec::new(),
        residual: None,
    };

    for pair in snap_times.windows(2) {
        let span = pair[1] - pair[0];
        let steps = (span / p.dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for j in 1..=steps {
            for c in modes.coeffs.iter_mut() {
                stepper.kinetic(c, h / 2.0);
            }
            let mut rho = vec![0.0; k];
            for ((c, w), u) in modes.coeffs.iter().zip(&modes.weights).zip(sampled.iter_mut()) {
                samples(c, u);
                for (r, z) in rho.iter_mut().zip(u.iter()) {
                    *r += w * z.norm_sqr();
                }
            }
            if p.renormalised {
                renormalise(&mut rho);
            }
            for (c, u) in modes.coeffs.iter_mut().zip(sampled.iter_mut()) {
                for (z, r) in u.iter_mut().zip(&rho) {
                    *z *= Complex64::from_polar(SQRT_TWO_PI / k as f64, -scale * r * h);
                }
                fft_in_place(u, false);
                c.copy_from_slice(u);
                stepper.kinetic(c, h / 2.0);
            }
            traj.mesh.push(if j == steps { pair[1] } else { pair[0] + h * j as f64 });
            traj.density.push(density_now(&modes, &mut scratch));
        }
        traj.snapshots.push(modes.operator());
    }
    Ok(traj)
}
