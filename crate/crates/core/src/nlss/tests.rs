use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::*;
use crate::fourier::FourierField;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// One-body cubic NLS `i u_t = -u_xx + s |u|^2 u` by plain Strang splitting on
/// a rustfft grid; returns `|u|^2` at `snapshots + 1` equally spaced times.
fn one_body_oracle(u0: &FourierField, s: f64, horizon: f64, snapshots: usize, steps_per: usize) -> Vec<Vec<f64>> {
    let m = u0.cutoff() as i64;
    let k = (2 * m + 1) as usize;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(k);
    let inv = planner.plan_fft_inverse(k);
    let freq = |i: usize| if i as i64 <= m { i as f64 } else { i as f64 - k as f64 };
    // u(x_j) = sum_n c_n e^{i n x_j} / sqrt(2 pi)
    let mut hat = vec![c(0.0); k];
    for (n, z) in u0.modes() {
        hat[n.rem_euclid(k as i64) as usize] = z;
    }
    let h = horizon / (snapshots * steps_per) as f64;
    let half: Vec<Complex64> = (0..k).map(|i| Complex64::from_polar(1.0, -freq(i).powi(2) * h / 2.0)).collect();
    let to_values = |hat: &[Complex64]| {
        let mut u = hat.to_vec();
        inv.process(&mut u);
        u.iter_mut().for_each(|z| *z /= (2.0 * PI).sqrt());
        u
    };
    let mut out = vec![to_values(&hat).iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()];
    for _ in 0..snapshots {
        for _ in 0..steps_per {
            hat.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
            let mut u = to_values(&hat);
            for z in u.iter_mut() {
                *z *= Complex64::from_polar(1.0, -s * z.norm_sqr() * h);
            }
            fwd.process(&mut u);
            for (a, z) in hat.iter_mut().zip(&u) {
                *a = z * (2.0 * PI).sqrt() / k as f64;
            }
            hat.iter_mut().zip(&half).for_each(|(a, b)| *a *= b);
        }
        out.push(to_values(&hat).iter().map(|z| z.norm_sqr()).collect());
    }
    out
}

fn l2_tx(a: &[Vec<f64>], b: &[Vec<f64>], dt: f64) -> f64 {
    let dx = 2.0 * PI / a[0].len() as f64;
    let n = a.len();
    let mut acc = 0.0;
    for (j, (ra, rb)) in a.iter().zip(b).enumerate() {
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += w * ra.iter().zip(rb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    }
    (acc * dx * dt).sqrt()
}

fn problem(gamma0: DensityOperator, horizon: f64) -> NlssProblem {
    let mut p = NlssProblem::new(gamma0, horizon);
    p.cutoff = 16;
    p
}

#[test]
fn plane_wave_is_stationary() {
    let a = 1.3;
    let e0 = FourierField::basis(0, 4).unwrap().scaled(c(a));
    let g = DensityOperator::from_rank_one_sum(&[1.0], &[e0]).unwrap();
    let mut p = problem(g.clone(), 1.0);
    p.snapshots = 4;
    for solver in [solver_by_name("fixed-point").unwrap(), solver_by_name("coupled").unwrap()] {
        let traj = solver.solve(&p).unwrap();
        for row in &traj.density {
            for r in row {
                assert!((r - a * a / (2.0 * PI)).abs() < 1e-12);
            }
        }
        let g0 = g.resized(16);
        for snap in &traj.snapshots {
            assert!(snap.matrix().sub(g0.matrix()).max_abs() < 1e-8);
        }
    }
}

#[test]
fn diagonal_data_is_static_when_renormalised() {
    let g = DensityOperator::diagonal(6, |n| 1.0 / (1.0 + (n * n) as f64));
    let mut p = problem(g.clone(), 0.7);
    p.renormalised = true;
    let traj = solve_fixed_point(&p).unwrap();
    for row in &traj.density {
        assert!(row.iter().all(|r| r.abs() < 1e-13));
    }
    for snap in &traj.snapshots {
        assert!(snap.matrix().sub(g.resized(16).matrix()).max_abs() < 1e-12);
    }
}

#[test]
fn rank_one_matches_one_body_oracle() {
    let u0 = FourierField::from_fn(6, |n| Complex64::new(1.0 / (1.0 + (n * n) as f64), 0.3 * n as f64 / 7.0));
    let u0 = u0.scaled(c(1.5 / u0.l2_norm()));
    let g = DensityOperator::from_rank_one_sum(&[1.0], &[u0.clone()]).unwrap();
    let mut p = problem(g, 0.5);
    p.dt = 2.5e-4;
    p.snapshots = 20;
    p.tol = 1e-11;
    let traj = solve_fixed_point(&p).unwrap();
    let padded = u0.resized(16);
    let oracle = one_body_oracle(&padded, 1.0, 0.5, 20, 100);
    let got = traj.snapshot_densities(33);
    let err = l2_tx(&got, &oracle, 0.5 / 20.0);
    assert!(err < 1e-6, "one-body distance {err:e}");
}

#[test]
fn coupled_agrees_with_fixed_point() {
    let g = random_rank_operator(4, 6, 11).unwrap();
    let mut p = problem(g, 0.5);
    p.snapshots = 10;
    let a = solve_fixed_point(&p).unwrap();
    let b = solve_coupled(&p).unwrap();
    let d = a.density_distance(&b, 33).unwrap();
    assert!(d < 1e-5, "{d:e}");
    assert!(a.residual.unwrap() < 10.0 * p.tol);
}

#[test]
fn renormalisation_is_a_gauge() {
    let g = random_rank_operator(4, 6, 5).unwrap();
    let mut p = problem(g, 0.5);
    let a = solve_fixed_point(&p).unwrap();
    p.renormalised = true;
    let b = solve_fixed_point(&p).unwrap();
    assert!(a.max_snapshot_distance(&b) < 1e-6);
    let c = solve_coupled(&p).unwrap();
    assert!(a.max_snapshot_distance(&c) < 1e-6);
}

#[test]
fn sign_changes_the_flow() {
    let g = random_rank_operator(2, 6, 3).unwrap();
    let mut p = problem(g, 0.5);
    p.coupling = 5.0;
    let a = solve_coupled(&p).unwrap();
    p.sign = Sign::Focusing;
    let b = solve_coupled(&p).unwrap();
    let d0 = a.snapshot_densities(33)[0].iter().zip(&b.snapshot_densities(33)[0]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(d0 < 1e-14);
    let last = a.snapshots.len() - 1;
    assert!(a.snapshots[last].matrix().sub(b.snapshots[last].matrix()).max_abs() > 1e-4);
}

#[test]
fn conservation_along_trajectories() {
    let g = random_rank_operator(3, 6, 8).unwrap();
    let p = problem(g, 0.5);
    for traj in [solve_fixed_point(&p).unwrap(), solve_coupled(&p).unwrap()] {
        let r = conservation_check(&traj, &[1.0, 2.0, f64::INFINITY]);
        assert!(r.max_drift() < 1e-8, "{r:?}");
        assert!(r.asymmetry < 1e-10);
        assert!(r.rank_leak < 1e-8);
    }
    let mut free = p.clone();
    free.coupling = 0.0;
    let r = conservation_check(&solve_coupled(&free).unwrap(), &[2.0]);
    assert!(r.max_drift() < 1e-12);
}

#[test]
fn stationary_family_stays_put() {
    let g = stationary_family(8, 2.0, 0.1, 8).unwrap();
    let mut p = problem(g.clone(), 1.0);
    p.dt = 1e-2;
    let traj = solve_coupled(&p).unwrap();
    let g0 = g.resized(16);
    for snap in &traj.snapshots {
        assert!(snap.matrix().sub(g0.matrix()).max_abs() < 1e-8);
    }
}

#[test]
fn reaches_full_period() {
    let g = random_rank_operator(3, 4, 21).unwrap();
    let mut p = problem(g, 2.0 * PI);
    p.cutoff = 8;
    p.dt = 1e-2;
    p.window = 1.0;
    let traj = solve_fixed_point(&p).unwrap();
    assert_eq!(*traj.snapshot_times.last().unwrap(), 2.0 * PI);
    assert_eq!(traj.snapshots.len(), p.snapshots + 1);
    assert!(traj.residual.unwrap() < 10.0 * p.tol);
}

#[test]
fn refuses_non_hermitian() {
    let g = DensityOperator::from_fn(2, |m, n| if m == 0 && n == 1 { c(1.0) } else { c(0.0) });
    assert!(matches!(solve_fixed_point(&problem(g, 1.0)), Err(Error::NotHermitian { .. })));
}

#[test]
fn export_round_trip() {
    let g = random_rank_operator(2, 4, 1).unwrap();
    let mut p = problem(g, 0.2);
    p.snapshots = 2;
    let traj = solve_fixed_point(&p).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = write_trajectory(&traj, Some(&p), dir.path()).unwrap();
    let read = read_manifest(dir.path()).unwrap();
    assert_eq!(written, read);
    let back = crate::operators::read_operator(dir.path().join(&read.snapshot_files[2])).unwrap();
    assert!(back.matrix().sub(traj.snapshots[2].matrix()).max_abs() < 1e-15);
}
