use torus_density::counting::{
    characterisation_holds, l4_chain_check, r_count, r_count_lattice, r_max, support_set, DEFAULT_R_MAX_BUDGET,
};
use torus_density::report::{Assertion, ExperimentReport, Table};
use torus_density::strichartz::scaling_fit_skipping;

use super::{defaults, n_list};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::registry::{Budget, Experiment};

pub struct Counting;

impl Experiment for Counting {
    fn name(&self) -> &'static str {
        "counting"
    }
    fn summary(&self) -> &'static str {
        "brute-force r_max growth and the divisor bound N (1 + ln N max d(alpha))"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 4..64\nskip = 0")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let mut rows = Table::new("rows", &["N", "alpha", "beta", "r", "bound", "ratio"]);
        let mut summary = Table::new(
            "summary",
            &["N", "support_size", "r_max", "r_max_nonzero_alpha", "max_divisors", "bound", "constant"],
        );
        let mut pairs = Vec::new();
        let mut pairs_nonzero = Vec::new();
        let mut worst_c = 0.0f64;
        for &n in &ns {
            let rep = r_max(n, DEFAULT_R_MAX_BUDGET)?;
            for r in &rep.rows {
                rows.push(vec![n as f64, r.alpha as f64, r.beta as f64, r.r as f64, r.bound, r.r as f64 / r.bound], None);
            }
            summary.push(
                vec![
                    n as f64,
                    rep.support_size as f64,
                    rep.r_max as f64,
                    rep.r_max_nonzero_alpha as f64,
                    rep.max_divisors as f64,
                    rep.bound,
                    rep.constant,
                ],
                Some(8.0),
            );
            worst_c = worst_c.max(rep.constant);
            pairs.push((n as f64, rep.r_max as f64));
            pairs_nonzero.push((n as f64, rep.r_max_nonzero_alpha as f64));
            budget.check(format!("r_max N = {n}"))?;
        }
        let fit = scaling_fit_skipping(&pairs, cfg.skip())?;
        let fit_nonzero = scaling_fit_skipping(&pairs_nonzero, cfg.skip())?;
        let parity = (1..=32).all(characterisation_holds);
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::at_most("r_max_exponent", fit.exponent, 1.15));
        report.assertions.push(Assertion::at_most("bound_constant", worst_c, 8.0));
        report.assertions.push(Assertion::holds("parity_characterisation_n_le_32", parity));
        report.fits.push(fit.record("r_max", Some(1.0)));
        report.fits.push(fit_nonzero.record("r_max_nonzero_alpha", Some(1.0)));
        report.tables.push(rows);
        report.tables.push(summary);
        Ok(report)
    }
}

pub struct SupportSetCheck;

impl Experiment for SupportSetCheck {
    fn name(&self) -> &'static str {
        "support-set"
    }
    fn summary(&self) -> &'static str {
        "exhaustive parity description of the support, lattice-walk counts, and the L4 chain"
    }
    fn defaults(&self) -> ExperimentConfig {
        let ns: Vec<String> = (1..=32).map(|n| n.to_string()).collect();
        defaults(&format!("n_list = {}\nseed = 0", ns.join(",")))
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let mut support = Table::new("support", &["N", "support_size", "characterisation"]);
        let mut all_hold = true;
        for &n in &ns {
            let holds = characterisation_holds(n);
            all_hold &= holds;
            support.push(vec![n as f64, support_set(n).len() as f64, if holds { 1.0 } else { 0.0 }], None);
        }
        budget.check("support characterisation")?;
        let mut lattice = Table::new(
            "lattice",
            &["N", "shifts", "exact_matches", "upper_bounds", "chain_lhs", "chain_rhs"],
        );
        let (mut lattice_ok, mut chain_ok) = (true, true);
        for &n in ns.iter().filter(|&&n| n <= 16 && n.is_power_of_two()) {
            let w = 4 * n as i64;
            let stride = (n as i64 / 4).max(1);
            let nn = (n * n) as i64;
            let betas = [-nn, -7, -1, 0, 1, 4, nn, 2 * nn];
            let (mut shifts, mut exact, mut upper) = (0u64, 0u64, 0u64);
            for a in (-w..=w).step_by(stride as usize) {
                for &b in &betas {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let hash = r_count(n, a, b)?;
                    shifts += 1;
                    exact += u64::from(r_count_lattice(n, a, b, true)? == hash);
                    upper += u64::from(r_count_lattice(n, a, b, false)? >= hash);
                }
            }
            lattice_ok &= exact == shifts && upper == shifts;
            let chain = l4_chain_check(n, cfg.seed().wrapping_add(n as u64))?;
            chain_ok &= chain.holds();
            lattice.push(
                vec![n as f64, shifts as f64, exact as f64, upper as f64, chain.lhs, chain.rhs],
                None,
            );
            budget.check(format!("lattice N = {n}"))?;
        }
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::holds("parity_characterisation", all_hold));
        report.assertions.push(Assertion::holds("lattice_walk_matches_hash", lattice_ok));
        report.assertions.push(Assertion::holds("l4_chain_closes", chain_ok));
        report.tables.push(support);
        report.tables.push(lattice);
        Ok(report)
    }
}
