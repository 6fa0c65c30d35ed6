use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_density::fourier::{FourierField, TorusGrid};
use torus_density::nlss::{conservation_check, random_rank_operator, solve_coupled, NlssProblem};
use torus_density::operators::DensityOperator;
use torus_density::propagator::{PotentialField, SplitStep};
use torus_density::strichartz::{spacetime_density, DEFAULT_L4_BUDGET};

fn random_op(cutoff: usize, seed: u64) -> DensityOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DensityOperator::random_hermitian(cutoff, cutoff, &mut rng)
}

fn off_diagonal_l2(g: &DensityOperator) -> f64 {
    let m = g.cutoff() as i64;
    let mut acc = 0.0;
    for a in -m..=m {
        for b in -m..=m {
            if a != b {
                acc += g.get(a, b).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn renormalised_l2_is_off_diagonal_mass(seed in any::<u64>(), cutoff in 1usize..10) {
        let g = random_op(cutoff, seed);
        let rho = spacetime_density(&g, cutoff, true).unwrap();
        let l2 = rho.l2_norm_exact().unwrap();
        prop_assert!((l2 - off_diagonal_l2(&g)).abs() <= 1e-12 * (1.0 + l2));
        prop_assert!(l2 <= g.schatten_norm(2.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn l4_routes_agree(seed in any::<u64>(), cutoff in 1usize..5) {
        let g = random_op(cutoff, seed);
        let rho = spacetime_density(&g, cutoff, true).unwrap();
        let exact = rho.l4_norm_exact(DEFAULT_L4_BUDGET).unwrap();
        let quad = rho.lp_norm_quadrature(4.0, None, false).unwrap().value;
        prop_assert!((exact - quad).abs() <= 1e-8 * (1.0 + exact));
    }

    #[test]
    fn renormalised_density_is_real_with_zero_mean(seed in any::<u64>(), cutoff in 1usize..8) {
        let g = random_op(cutoff, seed);
        let grid = TorusGrid::new(4 * cutoff + 3).unwrap();
        let rho = g.renormalised_density(&grid);
        let mean: Complex64 = rho.values.iter().sum::<Complex64>() / rho.values.len() as f64;
        prop_assert!(mean.norm() < 1e-12);
        prop_assert!(rho.values.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn density_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0) {
        let (g, h) = (random_op(4, s1), random_op(4, s2));
        let sum = DensityOperator::from_fn(4, |m, n| g.get(m, n) * a + h.get(m, n));
        for x in [0.0, 1.1, 4.2] {
            let lhs = sum.density_at(x);
            let rhs = g.density_at(x) * a + h.density_at(x);
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn free_conjugation_keeps_schatten_norms(seed in any::<u64>(), t in -7.0f64..7.0) {
        let g = random_op(5, seed);
        let u = g.conjugate_free(t);
        for alpha in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let (a, b) = (g.schatten_norm(alpha).unwrap(), u.schatten_norm(alpha).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn split_step_conserves_mass(seed in any::<u64>(), amp in 0.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DensityOperator::random_hermitian(6, 6, &mut rng);
        let phi = g.apply(&FourierField::basis(1, 6).unwrap());
        let v = PotentialField::from_fn(1.0, 17, 26, |t, x| amp * (x + t).cos()).unwrap();
        let out = SplitStep::new(1e-3, 6).unwrap().evolve(&phi, &v, 0.0, 1.0).unwrap();
        prop_assert!((out.l2_norm() - phi.l2_norm()).abs() < 1e-10 * phi.l2_norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn mean_field_flow_is_unitary(seed in any::<u64>(), rank in 1usize..4) {
        let g = random_rank_operator(rank, 4, seed).unwrap();
        let mut p = NlssProblem::new(g, 0.25);
        p.cutoff = 8;
        p.snapshots = 5;
        let traj = solve_coupled(&p).unwrap();
        let r = conservation_check(&traj, &[1.0, 2.0, f64::INFINITY]);
        prop_assert!(r.max_drift() < 1e-8);
        prop_assert!(r.asymmetry < 1e-10);
        prop_assert!(r.rank_leak < 1e-8);
    }
}

#[test]
fn cosine_density_is_time_independent() {
    let g = torus_density::strichartz::cosine_family(6, 6).unwrap();
    let rho = spacetime_density(&g, 6, true).unwrap();
    assert!(rho.is_time_independent());
    for x in [0.3, 1.7] {
        let expected: f64 = (1..=6).map(|n| (2.0 * n as f64 * x).cos()).sum::<f64>() / (2.0 * PI);
        for t in [0.0, 0.4, 2.2] {
            assert!((rho.eval(t, x).re - expected).abs() < 1e-12);
        }
    }
}
