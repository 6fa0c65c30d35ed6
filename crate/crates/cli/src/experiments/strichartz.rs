use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use torus_density::operators::DensityOperator;
use torus_density::report::{Assertion, ExperimentReport, Table};
use torus_density::strichartz::{
    cosine_family, dirichlet_closed_form, highdim_sweep, scaling_fit_skipping, spacetime_density,
    OperatorFamily, RandomHsFamily, SchattenNormalisedFamily, TraceNormalisedFamily, DEFAULT_L4_BUDGET,
};

use super::{alpha_label, defaults, n_list};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::registry::{Budget, Experiment};

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

pub struct L2Check;

impl Experiment for L2Check {
    fn name(&self) -> &'static str {
        "l2-check"
    }
    fn summary(&self) -> &'static str {
        "renormalised L2 norm equals the off-diagonal l2 mass, for seeded random operators"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("cutoff = 32\nsamples = 200\nseed = 0\ntol = 1e-12")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let m = ExperimentConfig::require(&cfg.cutoff, "cutoff")?;
        let samples = ExperimentConfig::require(&cfg.samples, "samples")?;
        let tol = ExperimentConfig::require(&cfg.tol, "tol")?;
        let seed = cfg.seed();
        let rows = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i));
                let g = DensityOperator::random_hermitian(m, m, &mut rng);
                let l2 = spacetime_density(&g, m, true)?.l2_norm_exact()?;
                let off = off_diagonal_l2(&g);
                let s2 = g.schatten_norm(2.0)?;
                Ok(vec![i as f64, l2, off, s2, (l2 - off).abs()])
            })
            .collect::<Result<Vec<_>>>()?;
        budget.check("l2-check samples")?;
        let mut table = Table::new("samples", &["sample", "l2_norm", "off_diagonal", "schatten2", "difference"]);
        let (mut worst, mut excess) = (0.0f64, f64::NEG_INFINITY);
        for r in rows {
            worst = worst.max(r[4]);
            excess = excess.max(r[1] - r[3]);
            table.push(r, Some(tol));
        }
        let mut report = ExperimentReport::new(self.name());
        report.tables.push(table);
        report.assertions.push(Assertion::at_most("max_identity_difference", worst, tol));
        report.assertions.push(Assertion::at_most("max_excess_over_schatten2", excess, tol));
        Ok(report)
    }
}

pub struct L2Sharpness;

impl Experiment for L2Sharpness {
    fn name(&self) -> &'static str {
        "l2-sharpness"
    }
    fn summary(&self) -> &'static str {
        "cosine family: constant ratio at alpha = 2, growing ratio N^(1/2 - 1/alpha) beyond"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 4..512\nalphas = 2.5,3,inf\nskip = 1\ntol = 1e-9")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let alphas = ExperimentConfig::require(&cfg.alphas, "alphas")?;
        let tol = ExperimentConfig::require(&cfg.tol, "tol")?;
        let mut sharp = Table::new("sharpness", &["N", "l2_norm", "schatten2", "ratio"]);
        let labels: Vec<String> = alphas.iter().map(|&a| format!("ratio_alpha_{}", alpha_label(a))).collect();
        let mut cols = vec!["N"];
        cols.extend(labels.iter().map(String::as_str));
        let mut growth = Table::new("alpha_ratios", &cols);
        let mut worst = 0.0f64;
        for &n in &ns {
            let g = cosine_family(n, n)?;
            let l2 = spacetime_density(&g, n, true)?.l2_norm_exact()?;
            let s2 = g.schatten_norm(2.0)?;
            let ratio = l2 / s2;
            worst = worst.max((ratio - 0.5f64.sqrt()).abs());
            sharp.push(vec![n as f64, l2, s2, ratio], Some(tol));
            let mut row = vec![n as f64];
            for &a in &alphas {
                row.push(l2 / g.schatten_norm(a)?);
            }
            growth.push(row, Some(0.01));
            budget.check(format!("l2-sharpness N = {n}"))?;
        }
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::at_most("ratio_deviation_from_inv_sqrt2", worst, tol));
        for (&a, label) in alphas.iter().zip(&labels) {
            let values = growth.column(label).expect("column");
            let pairs: Vec<(f64, f64)> = ns.iter().map(|&n| n as f64).zip(values).collect();
            let target = 0.5 - 1.0 / a;
            let fit = scaling_fit_skipping(&pairs, cfg.skip())?;
            report
                .assertions
                .push(Assertion::within(format!("{label}_exponent"), fit.exponent, target, 0.01));
            report.fits.push(fit.record(label.clone(), Some(target)));
        }
        report.tables.push(sharp);
        report.tables.push(growth);
        Ok(report)
    }
}

/// `||f||_{L^p(T)}` for `f = sum_{n<=N} cos(2nx) / 2pi`, by the rectangle rule
/// on the closed form, doubling until the relative change is below `tol`.
fn dirichlet_lp(n: usize, p: f64, tol: f64) -> Result<(f64, usize)> {
    let mut k = (16 * (2 * n + 1)).next_power_of_two();
    let integral = |k: usize| -> f64 {
        let h = 2.0 * PI / k as f64;
        (0..k).map(|j| dirichlet_closed_form(n, j as f64 * h).abs().powf(p)).sum::<f64>() * h
    };
    let mut value = integral(k);
    for _ in 0..10 {
        k *= 2;
        let next = integral(k);
        let change = (next - value).abs() / next;
        value = next;
        if change < tol {
            return Ok((value.powf(1.0 / p), k));
        }
    }
    Err(CliError::Core(torus_density::Error::Convergence {
        what: "closed-form x quadrature",
        last: value,
        previous: f64::NAN,
    }))
}

pub struct L3Necessity;

impl Experiment for L3Necessity {
    fn name(&self) -> &'static str {
        "l3-necessity"
    }
    fn summary(&self) -> &'static str {
        "cosine family renormalised L3 growth against the 2/3 exponent"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 8..1024\np = 3\nskip = 1\ntol = 1e-6")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let p = ExperimentConfig::require(&cfg.p, "p")?;
        let tol = ExperimentConfig::require(&cfg.tol, "tol")?;
        let mut table = Table::new("norms", &["N", "closed_form", "coefficient_route", "relative_difference", "x_points"]);
        let mut worst = 0.0f64;
        let mut pairs = Vec::new();
        for &n in &ns {
            // Time-independent, so the t integral contributes (2 pi)^(1/p).
            let (x_norm, k) = dirichlet_lp(n, p, 1e-10)?;
            let closed = (2.0 * PI).powf(1.0 / p) * x_norm;
            let g = cosine_family(n, n)?;
            let rho = spacetime_density(&g, n, true)?;
            let generic = rho.lp_norm_quadrature(p, None, true)?.value;
            let rel = (closed - generic).abs() / closed;
            worst = worst.max(rel);
            pairs.push((n as f64, closed));
            table.push(vec![n as f64, closed, generic, rel, k as f64], Some(tol));
            budget.check(format!("l3-necessity N = {n}"))?;
        }
        let fit = scaling_fit_skipping(&pairs, cfg.skip())?;
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::in_range("l3_exponent", fit.exponent, 0.61, 0.72));
        report.assertions.push(Assertion::at_most("route_difference", worst, tol));
        report.fits.push(fit.record("rho_bar_l3", Some(2.0 / 3.0)));
        report.tables.push(table);
        Ok(report)
    }
}

/// Renormalised (or raw) `L^p` norm over `||gamma||_{S^alpha}` along a family.
fn ratio_sweep(
    family: &dyn OperatorFamily,
    ns: &[usize],
    alpha: f64,
    p: f64,
    renormalised: bool,
    budget: &Budget,
) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    for &n in ns {
        let g = family.build(n)?;
        let rho = spacetime_density(&g, n, renormalised)?;
        let norm = rho.lp_norm_quadrature(p, None, true)?.value;
        out.push((n, norm, g.schatten_norm(alpha)?));
        budget.check(format!("{} N = {n}", family.name()))?;
    }
    Ok(out)
}

fn ratio_table(name: &str, rows: &[(usize, f64, f64)]) -> Table {
    let mut t = Table::new(name, &["N", "lp_norm", "schatten", "ratio"]);
    for &(n, norm, s) in rows {
        t.push(vec![n as f64, norm, s, norm / s], None);
    }
    t
}

fn ratio_pairs(rows: &[(usize, f64, f64)]) -> Vec<(f64, f64)> {
    rows.iter().map(|&(n, norm, s)| (n as f64, norm / s)).collect()
}

pub struct L3Sufficiency;

impl Experiment for L3Sufficiency {
    fn name(&self) -> &'static str {
        "l3-sufficiency"
    }
    fn summary(&self) -> &'static str {
        "generic operators: renormalised L3 exponents for alpha in [2, 3] and the raw trace-class probe"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 4,8,16,32\nalphas = 2,3\np = 3\nskip = 1\nseed = 0")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let alphas = ExperimentConfig::require(&cfg.alphas, "alphas")?;
        let p = ExperimentConfig::require(&cfg.p, "p")?;
        let seed = cfg.seed();
        let mut report = ExperimentReport::new(self.name());
        for &alpha in &alphas {
            if !(2.0..=3.0).contains(&alpha) {
                return Err(CliError::Config(format!("alpha {alpha} outside [2, 3]")));
            }
            let family = SchattenNormalisedFamily { seed, alpha };
            let rows = ratio_sweep(&family, &ns, alpha, p, true, budget)?;
            let label = format!("alpha_{}", alpha_label(alpha));
            let fit = scaling_fit_skipping(&ratio_pairs(&rows), cfg.skip())?;
            let sigma = 2.0 / 3.0 - 1.0 / alpha;
            report
                .assertions
                .push(Assertion::at_most(format!("{label}_exponent"), fit.exponent, sigma + 0.05));
            report.fits.push(fit.record(format!("rho_bar_{label}"), Some(sigma)));
            report.tables.push(ratio_table(&format!("renormalised_{label}"), &rows));
        }
        let family = TraceNormalisedFamily { seed };
        let rows = ratio_sweep(&family, &ns, 1.0, p, false, budget)?;
        let fit = scaling_fit_skipping(&ratio_pairs(&rows), cfg.skip())?;
        report
            .assertions
            .push(Assertion::at_most("raw_trace_class_exponent", fit.exponent, 1.0 / 3.0 + 0.05));
        report.fits.push(fit.record("rho_raw_alpha_1", Some(1.0 / 3.0)));
        report.tables.push(ratio_table("raw_alpha_1", &rows));
        Ok(report)
    }
}

pub struct ConjectureProbe;

impl Experiment for ConjectureProbe {
    fn name(&self) -> &'static str {
        "conjecture-probe"
    }
    fn summary(&self) -> &'static str {
        "renormalised L3 exponents for alpha in [3/2, 2); data only, nothing is asserted"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 4,8,16,32\nalphas = 1.5,1.75\np = 3\nskip = 1\nseed = 0")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let alphas = ExperimentConfig::require(&cfg.alphas, "alphas")?;
        let p = ExperimentConfig::require(&cfg.p, "p")?;
        let mut report = ExperimentReport::new(self.name());
        report.label = Some("conjecture probe".into());
        for &alpha in &alphas {
            let family = SchattenNormalisedFamily { seed: cfg.seed(), alpha };
            let rows = ratio_sweep(&family, &ns, alpha, p, true, budget)?;
            let label = format!("alpha_{}", alpha_label(alpha));
            let fit = scaling_fit_skipping(&ratio_pairs(&rows), cfg.skip())?;
            report.fits.push(fit.record(format!("rho_bar_{label}"), Some(2.0 / 3.0 - 1.0 / alpha)));
            report.tables.push(ratio_table(&format!("renormalised_{label}"), &rows));
        }
        report
            .notes
            .push("exploratory: the range alpha in [3/2, 2) is open, so no assertion is made".into());
        Ok(report)
    }
}

pub struct L4Scaling;

impl Experiment for L4Scaling {
    fn name(&self) -> &'static str {
        "l4-scaling"
    }
    fn summary(&self) -> &'static str {
        "random Hilbert-Schmidt-normalised operators: renormalised L4 growth, coefficient vs quadrature"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 4..64\nskip = 1\nseed = 0\ntol = 1e-8")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let tol = ExperimentConfig::require(&cfg.tol, "tol")?;
        let family = RandomHsFamily { seed: cfg.seed() };
        let mut table = Table::new(
            "norms",
            &["N", "l4_coefficients", "l4_quadrature", "schatten2", "ratio", "relative_difference"],
        );
        let mut worst = 0.0f64;
        let mut pairs = Vec::new();
        for &n in &ns {
            let g = family.build(n)?;
            let rho = spacetime_density(&g, n, true)?;
            let exact = rho.l4_norm_exact(DEFAULT_L4_BUDGET.max(rho.len()))?;
            let quad = rho.lp_norm_quadrature(4.0, None, false)?.value;
            let s2 = g.schatten_norm(2.0)?;
            let rel = (exact - quad).abs() / exact;
            worst = worst.max(rel);
            pairs.push((n as f64, exact / s2));
            table.push(vec![n as f64, exact, quad, s2, exact / s2, rel], Some(tol));
            budget.check(format!("l4-scaling N = {n}"))?;
        }
        let fit = scaling_fit_skipping(&pairs, cfg.skip())?;
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::at_most("l4_exponent", fit.exponent, 0.30));
        report.assertions.push(Assertion::at_most("route_difference", worst, tol));
        report.fits.push(fit.record("rho_bar_l4", Some(0.25)));
        report.tables.push(table);
        Ok(report)
    }
}

pub struct HighDimNecessity;

impl Experiment for HighDimNecessity {
    fn name(&self) -> &'static str {
        "highdim-necessity"
    }
    fn summary(&self) -> &'static str {
        "necessity family on T^d, d = 2, 3: count, L^p* growth and the implied exponent constraint"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("n_list = 16..8192\ndimensions = 2,3\nskip = 1")
    }
    fn run(&self, cfg: &ExperimentConfig, _budget: &Budget) -> Result<ExperimentReport> {
        let ns = n_list(cfg)?;
        let dims = ExperimentConfig::require(&cfg.dimensions, "dimensions")?;
        let mut report = ExperimentReport::new(self.name());
        for &d in &dims {
            let sweep = highdim_sweep(d, &ns, cfg.p, cfg.skip())?;
            let mut records = Table::new(format!("records_d{d}"), &["N", "count", "count_expected", "amplitude", "lp_norm", "p_star"]);
            let mut counts_ok = true;
            for r in &sweep.records {
                let expected = ((2 * r.n + 1) as u64).pow(d as u32 - 1);
                counts_ok &= r.count == expected;
                records.push(vec![r.n as f64, r.count as f64, expected as f64, r.amplitude, r.lp_norm, r.p_star], Some(0.0));
            }
            let mut constraints = Table::new(format!("constraints_d{d}"), &["alpha", "sigma", "from_fits", "closed_form", "marginal"]);
            for c in &sweep.constraints {
                let b = |x: bool| if x { 1.0 } else { 0.0 };
                constraints.push(vec![c.alpha, c.sigma, b(c.from_fits), b(c.closed_form), b(c.marginal)], None);
            }
            let target = (d - 1) as f64;
            report.assertions.push(Assertion::holds(format!("count_d{d}"), counts_ok));
            report
                .assertions
                .push(Assertion::within(format!("norm_exponent_d{d}"), sweep.norm_fit.exponent, target, 0.01));
            report
                .assertions
                .push(Assertion::holds(format!("constraint_table_d{d}"), sweep.constraints_agree()));
            report.fits.push(sweep.norm_fit.record(format!("lp_norm_d{d}"), Some(target)));
            for (alpha, slope) in &sweep.schatten_fits {
                report.notes.push(format!("d = {d}: Schatten-{alpha} slope against #A is {slope:.6}"));
            }
            report.tables.push(records);
            report.tables.push(constraints);
        }
        Ok(report)
    }
}
