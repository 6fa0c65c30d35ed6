//! The shift count `r(alpha, beta)` on the support of the space-time coefficients.
//!
//! The support is `S_N = {(m - n, m^2 - n^2) : |m|, |n| <= N, m != n}`.
//! Writing `k = m - n` and `s = m + n` gives `tau = k s`, with `|k| + |s| <= 2N`
//! and `s = k (mod 2)`; every such pair with `k != 0` is realised.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strichartz::SpaceTimeDensity;

/// Largest `N` accepted by [`r_max`] by default.
pub const DEFAULT_R_MAX_BUDGET: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSet {
    pub n: usize,
    pub points: BTreeSet<(i64, i64)>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, k: i64, tau: i64) -> bool {
        self.points.contains(&(k, tau))
    }

    /// Support grouped by `k`, each column sorted by `tau`.
    pub fn columns(&self) -> BTreeMap<i64, Vec<i64>> {
        let mut cols: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        for &(k, tau) in &self.points {
            cols.entry(k).or_default().push(tau);
        }
        cols
    }
}

pub fn support_set(n: usize) -> SupportSet {
    let w = n as i64;
    let mut points = BTreeSet::new();
    for m in -w..=w {
        for j in -w..=w {
            if m != j {
                points.insert((m - j, m * m - j * j));
            }
        }
    }
    SupportSet { n, points }
}

/// `{(k, ks) : k != 0, |k| + |s| <= 2N, s = k mod 2}`.
pub fn parity_characterisation(n: usize) -> BTreeSet<(i64, i64)> {
    let two_n = 2 * n as i64;
    let mut out = BTreeSet::new();
    for k in -two_n..=two_n {
        if k == 0 {
            continue;
        }
        let room = two_n - k.abs();
        for s in -room..=room {
            if (s - k).rem_euclid(2) == 0 {
                out.insert((k, k * s));
            }
        }
    }
    out
}

pub fn characterisation_holds(n: usize) -> bool {
    support_set(n).points == parity_characterisation(n)
}

/// `#{(k, tau) in S_N : (k - alpha, tau - beta) in S_N}` by hashed membership.
pub fn r_count(n: usize, alpha: i64, beta: i64) -> Result<u64> {
    if alpha == 0 && beta == 0 {
        return Err(Error::ZeroShift);
    }
    let support = support_set(n);
    let hashed: HashSet<(i64, i64)> = support.points.iter().copied().collect();
    Ok(support
        .points
        .iter()
        .filter(|&&(k, tau)| hashed.contains(&(k - alpha, tau - beta)))
        .count() as u64)
}

/// One row per shift `alpha`: the largest count over `beta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub alpha: i64,
    pub beta: i64,
    pub r: u64,
    /// `N (1 + ln N d(alpha))`; for `alpha = 0` the largest divisor count is used.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub n: usize,
    pub support_size: usize,
    pub r_max: u64,
    pub argmax: (i64, i64),
    /// Maximum over shifts with `alpha != 0`.
    pub r_max_nonzero_alpha: u64,
    /// `max_{1 <= alpha <= 4N} d(alpha)`.
    pub max_divisors: u64,
    pub bound: f64,
    /// `r_max / bound`.
    pub constant: f64,
    pub rows: Vec<AlphaRow>,
}

pub fn analytic_bound(n: usize, divisors: u64) -> f64 {
    let nf = n as f64;
    nf * (1.0 + nf.ln() * divisors as f64)
}

/// Exact `max_{(alpha, beta) != (0, 0)} r(alpha, beta)` from the histogram of
/// pairwise differences of support points, one shift `alpha` at a time.
pub fn r_max(n: usize, budget: usize) -> Result<CountReport> {
    if n > budget {
        return Err(Error::BudgetExceeded {
            what: "r_max sweep",
            size: n,
            budget,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let support = support_set(n);
    let columns = support.columns();
    let two_n = 2 * n as i64;
    let tau_max = (n * n) as i64;
    let width = (4 * tau_max + 1) as usize;
    let max_divisors = (1..=4 * n as i64)
        .map(|a| divisor_count(a).expect("nonzero"))
        .max()
        .unwrap_or(1);

    let rows: Vec<AlphaRow> = (-2 * two_n..=2 * two_n)
        .into_par_iter()
        .filter_map(|alpha| {
            let mut hist = vec![0u32; width];
            for (k, col) in &columns {
                let Some(other) = columns.get(&(k - alpha)) else {
                    continue;
                };
                for tau in col {
                    for tau2 in other {
                        hist[(tau - tau2 + 2 * tau_max) as usize] += 1;
                    }
                }
            }
            let mut best: Option<(i64, u32)> = None;
            for (i, &c) in hist.iter().enumerate() {
                let beta = i as i64 - 2 * tau_max;
                if c == 0 || (alpha == 0 && beta == 0) {
                    continue;
                }
                if best.is_none_or(|(_, b)| c > b) {
                    best = Some((beta, c));
                }
            }
            let (beta, r) = best?;
            let d = if alpha == 0 {
                max_divisors
            } else {
                divisor_count(alpha).expect("nonzero")
            };
            Some(AlphaRow {
                alpha,
                beta,
                r: r as u64,
                bound: analytic_bound(n, d),
            })
        })
        .collect();

    let top = rows
        .iter()
        .max_by(|a, b| a.r.cmp(&b.r).then(b.alpha.abs().cmp(&a.alpha.abs())).then(b.alpha.cmp(&a.alpha)))
        .ok_or_else(|| Error::InvalidArgument("empty support".into()))?;
    let r_max_nonzero_alpha = rows.iter().filter(|r| r.alpha != 0).map(|r| r.r).max().unwrap_or(0);
    let bound = analytic_bound(n, max_divisors);
    Ok(CountReport {
        n,
        support_size: support.len(),
        r_max: top.r,
        argmax: (top.alpha, top.beta),
        r_max_nonzero_alpha,
        max_divisors,
        bound,
        constant: top.r as f64 / bound,
        rows,
    })
}

/// Number of positive divisors of `|a|`, by trial division.
pub fn divisor_count(a: i64) -> Result<u64> {
    if a == 0 {
        return Err(Error::ZeroDivisorArgument);
    }
    let a = a.unsigned_abs();
    let mut count = 0;
    let mut q = 1u64;
    while q * q <= a {
        if a % q == 0 {
            count += if q * q == a { 1 } else { 2 };
        }
        q += 1;
    }
    Ok(count)
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Solutions of `k s - (k - alpha) s' = beta`: `(s0, s0') + t step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSolution {
    pub gcd: i64,
    pub s0: i64,
    pub s0_prime: i64,
    pub step: (i64, i64),
}

impl LatticeSolution {
    pub fn at(&self, t: i64) -> (i64, i64) {
        (self.s0 + t * self.step.0, self.s0_prime + t * self.step.1)
    }
}

pub fn gcd_solution_structure(k: i64, alpha: i64, beta: i64) -> Result<Option<LatticeSolution>> {
    if k == 0 || k == alpha {
        return Err(Error::DegenerateRow { k, alpha });
    }
    let (g, x, y) = extended_gcd(k, -(k - alpha));
    if beta % g != 0 {
        return Ok(None);
    }
    let scale = beta / g;
    let sol = LatticeSolution {
        gcd: g,
        s0: x * scale,
        s0_prime: y * scale,
        step: ((k - alpha) / g, k / g),
    };
    debug_assert_eq!(k * sol.s0 - (k - alpha) * sol.s0_prime, beta);
    Ok(Some(sol))
}

/// `r(alpha, beta)` by walking the solution lattice of each row `k` inside the
/// boxes `|k| + |s| <= 2N`, `|k - alpha| + |s'| <= 2N`. With `parity` the
/// congruences `s = k`, `s' = k - alpha (mod 2)` are imposed as well, and the
/// count is exact; without them it is an upper bound.
pub fn r_count_lattice(n: usize, alpha: i64, beta: i64, parity: bool) -> Result<u64> {
    if alpha == 0 && beta == 0 {
        return Err(Error::ZeroShift);
    }
    let two_n = 2 * n as i64;
    let mut count = 0u64;
    for k in -two_n..=two_n {
        let k2 = k - alpha;
        if k == 0 || k2 == 0 || k2.abs() > two_n {
            continue;
        }
        let Some(sol) = gcd_solution_structure(k, alpha, beta)? else {
            continue;
        };
        let room = two_n - k.abs();
        let room2 = two_n - k2.abs();
        // s = s0 + t step.0 with step.0 != 0 (k2 != 0).
        let (lo, hi) = t_range(sol.s0, sol.step.0, -room, room);
        for t in lo..=hi {
            let (s, s2) = sol.at(t);
            if s2.abs() > room2 {
                continue;
            }
            if parity && ((s - k).rem_euclid(2) != 0 || (s2 - k2).rem_euclid(2) != 0) {
                continue;
            }
            count += 1;
        }
    }
    Ok(count)
}

/// Integer `t` range with `lo <= s0 + t step <= hi`, for `step != 0`.
fn t_range(s0: i64, step: i64, lo: i64, hi: i64) -> (i64, i64) {
    if step < 0 {
        let (a, b) = t_range(s0, -step, lo, hi);
        return (-b, -a);
    }
    (-((s0 - lo).div_euclid(step)), (hi - s0).div_euclid(step))
}

/// Both sides of the L4 chain for a random dense coefficient array on `S_N`:
/// `||rho||_4^4` and `(g(0,0)^2 + r_max g(0,0)^2) / 4pi^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub n: usize,
    pub lhs: f64,
    pub diagonal_term: f64,
    pub off_diagonal_term: f64,
    pub rhs: f64,
}

impl ChainCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

pub fn l4_chain_check(n: usize, seed: u64) -> Result<ChainCheck> {
    let support = support_set(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = BTreeMap::new();
    for &p in &support.points {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        coeffs.insert(p, Complex64::new(re, im));
    }
    let rho = SpaceTimeDensity::from_coefficients(n, Complex64::new(0.0, 0.0), coeffs);
    let lhs = rho.l4_norm_exact(usize::MAX)?.powi(4);
    let g00 = rho.autocorrelation_at_origin();
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let r = r_max(n, usize::MAX)?.r_max as f64;
    let diagonal_term = g00 * g00 / four_pi2;
    let off_diagonal_term = r * g00 * g00 / four_pi2;
    Ok(ChainCheck {
        n,
        lhs,
        diagonal_term,
        off_diagonal_term,
        rhs: diagonal_term + off_diagonal_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_supports() {
        let s1 = support_set(1);
        assert_eq!(s1.len(), 6);
        let expected: BTreeSet<(i64, i64)> =
            [(-2, 0), (2, 0), (1, 1), (-1, -1), (1, -1), (-1, 1)].into_iter().collect();
        assert_eq!(s1.points, expected);
        assert_eq!(support_set(2).len(), 20);
        for n in 1..=12 {
            assert_eq!(support_set(n).len(), (2 * n + 1).pow(2) - (2 * n + 1));
        }
    }

    #[test]
    fn parity_excludes_odd_k_even_quotient() {
        for n in 1..=16 {
            for &(k, tau) in &support_set(n).points {
                assert!(!(k % 2 != 0 && (tau / k) % 2 == 0));
            }
        }
    }

    #[test]
    fn characterisation_small() {
        for n in 1..=10 {
            assert!(characterisation_holds(n), "N = {n}");
        }
    }

    #[test]
    fn r_count_fixtures() {
        for n in 1..=6 {
            assert_eq!(r_count(n, 8 * n as i64, 0).unwrap(), 0);
        }
        assert_eq!(r_count(2, 2, 0).unwrap(), 10);
        assert!(matches!(r_count(2, 0, 0), Err(Error::ZeroShift)));
    }

    #[test]
    fn r_count_symmetry() {
        for n in 1..=4usize {
            let w = 4 * n as i64;
            for a in -w..=w {
                for b in -w..=w {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    assert_eq!(r_count(n, a, b).unwrap(), r_count(n, -a, -b).unwrap());
                }
            }
        }
    }

    fn brute_r_max(n: usize) -> u64 {
        let s: Vec<_> = support_set(n).points.into_iter().collect();
        let mut hist: BTreeMap<(i64, i64), u64> = BTreeMap::new();
        for p in &s {
            for q in &s {
                let d = (p.0 - q.0, p.1 - q.1);
                if d != (0, 0) {
                    *hist.entry(d).or_default() += 1;
                }
            }
        }
        hist.values().copied().max().unwrap()
    }

    #[test]
    fn r_max_matches_brute_force() {
        for n in 1..=5 {
            let rep = r_max(n, DEFAULT_R_MAX_BUDGET).unwrap();
            assert_eq!(rep.r_max, brute_r_max(n), "N = {n}");
            let (a, b) = rep.argmax;
            assert_eq!(r_count(n, a, b).unwrap(), rep.r_max);
        }
        assert!(matches!(r_max(300, DEFAULT_R_MAX_BUDGET), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn r_max_reference_values() {
        // Independently enumerated.
        let expected = [(2usize, 10u64), (4, 26), (8, 92)];
        for (n, r) in expected {
            assert_eq!(r_max(n, DEFAULT_R_MAX_BUDGET).unwrap().r_max, r);
        }
    }

    #[test]
    fn divisors() {
        assert_eq!(divisor_count(1).unwrap(), 1);
        assert_eq!(divisor_count(12).unwrap(), 6);
        assert_eq!(divisor_count(-12).unwrap(), 6);
        for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            assert_eq!(divisor_count(p).unwrap(), 2);
        }
        assert!(matches!(divisor_count(0), Err(Error::ZeroDivisorArgument)));
        for a in 1..200i64 {
            let brute = (1..=a).filter(|q| a % q == 0).count() as u64;
            assert_eq!(divisor_count(a).unwrap(), brute);
        }
    }

    #[test]
    fn lattice_fixtures() {
        let sol = gcd_solution_structure(2, 1, 1).unwrap().unwrap();
        assert_eq!(sol.gcd, 1);
        assert_eq!(2 * sol.s0 - sol.s0_prime, 1);
        assert!(gcd_solution_structure(4, 2, 1).unwrap().is_none());
        assert!(matches!(gcd_solution_structure(0, 2, 1), Err(Error::DegenerateRow { .. })));
        assert!(matches!(gcd_solution_structure(3, 3, 1), Err(Error::DegenerateRow { .. })));
    }

    #[test]
    fn lattice_sweeps_brute_force_set() {
        let box_ = 12i64;
        for k in -box_..=box_ {
            for alpha in -6..=6i64 {
                if k == 0 || k == alpha {
                    continue;
                }
                for beta in -10..=10i64 {
                    let brute: BTreeSet<(i64, i64)> = (-box_..=box_)
                        .flat_map(|s| (-box_..=box_).map(move |s2| (s, s2)))
                        .filter(|&(s, s2)| k * s - (k - alpha) * s2 == beta)
                        .collect();
                    let lattice: BTreeSet<(i64, i64)> = match gcd_solution_structure(k, alpha, beta).unwrap() {
                        None => BTreeSet::new(),
                        Some(sol) => {
                            let (lo, hi) = t_range(sol.s0, sol.step.0, -box_, box_);
                            (lo..=hi)
                                .map(|t| sol.at(t))
                                .filter(|p| p.1.abs() <= box_)
                                .collect()
                        }
                    };
                    assert_eq!(brute, lattice, "k={k} alpha={alpha} beta={beta}");
                }
            }
        }
    }

    #[test]
    fn lattice_walk_against_hash() {
        for n in [1usize, 2, 3, 5] {
            let w = 4 * n as i64;
            for a in -w..=w {
                for b in [-7i64, -2, 0, 1, 4, 9] {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let hash = r_count(n, a, b).unwrap();
                    assert!(r_count_lattice(n, a, b, false).unwrap() >= hash);
                    assert_eq!(r_count_lattice(n, a, b, true).unwrap(), hash);
                }
            }
        }
    }

    #[test]
    fn chain_closes() {
        for n in 1..=6 {
            let c = l4_chain_check(n, 100 + n as u64).unwrap();
            assert!(c.holds(), "{c:?}");
        }
    }

    proptest! {
        #[test]
        fn extended_gcd_identity(a in -1000i64..1000, b in -1000i64..1000) {
            let (g, x, y) = extended_gcd(a, b);
            prop_assert_eq!(a * x + b * y, g);
            prop_assert!(g >= 0);
            if a != 0 || b != 0 {
                prop_assert!(g > 0 && a % g == 0 && b % g == 0);
            }
        }
    }
}
