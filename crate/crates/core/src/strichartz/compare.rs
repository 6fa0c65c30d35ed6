use crate::error::Result;
use crate::report::{ExperimentReport, Table};

use super::families::OperatorFamily;
use super::fit::scaling_fit_skipping;
use super::spacetime::{SpaceTimeDensity, DEFAULT_L4_BUDGET};

/// `||rho||_{L^p(T^2)}`, through the coefficient identities when they apply
/// (renormalised, `p` in {2, 4}) and quadrature otherwise.
pub fn density_norm(rho: &SpaceTimeDensity, p: f64) -> Result<f64> {
    if rho.is_renormalised() {
        if p == 2.0 {
            return rho.l2_norm_exact();
        }
        if p == 4.0 && rho.len() <= DEFAULT_L4_BUDGET {
            return rho.l4_norm_exact(DEFAULT_L4_BUDGET);
        }
    }
    Ok(rho.lp_norm_quadrature(p, None, true)?.value)
}

/// Tabulates `||rho||_{L^p}`, `||rho_bar||_{L^p}` and `||gamma||_{S^alpha}` along
/// a family, with fitted exponents of each norm and of both ratios.
pub fn compare_densities(
    family: &dyn OperatorFamily,
    ns: &[usize],
    alpha: f64,
    p: f64,
    skip: usize,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("compare-densities");
    report.config.insert("family".into(), family.name().into());
    report.config.insert("alpha".into(), alpha.to_string());
    report.config.insert("p".into(), p.to_string());
    let mut table = Table::new(
        "norms",
        &["N", "rho_norm", "rho_bar_norm", "schatten", "ratio_raw", "ratio_renormalised"],
    );
    let mut sorted = ns.to_vec();
    sorted.sort_unstable();
    for &n in &sorted {
        let gamma = family.build(n)?;
        let raw = density_norm(&SpaceTimeDensity::from_operator(&gamma, n, false)?, p)?;
        let ren = density_norm(&SpaceTimeDensity::from_operator(&gamma, n, true)?, p)?;
        let s = gamma.schatten_norm(alpha)?;
        table.push(vec![n as f64, raw, ren, s, raw / s, ren / s], None);
    }
    for (column, name) in [
        ("rho_norm", "rho"),
        ("rho_bar_norm", "rho_bar"),
        ("schatten", "schatten"),
        ("ratio_raw", "ratio_raw"),
        ("ratio_renormalised", "ratio_renormalised"),
    ] {
        let values = table.column(column).expect("column exists");
        let pairs: Vec<(f64, f64)> = sorted.iter().map(|&n| n as f64).zip(values).collect();
        if pairs.iter().any(|p| p.1 <= 0.0) {
            report.notes.push(format!("{name}: vanishing values, no fit"));
            continue;
        }
        match scaling_fit_skipping(&pairs, skip) {
            Ok(fit) => report.fits.push(fit.record(name, None)),
            Err(e) => report.notes.push(format!("{name}: {e}")),
        }
    }
    report.tables.push(table);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strichartz::{CosineFamily, DiagonalFamily, RandomHsFamily};

    #[test]
    fn diagonal_family_renormalisation_gain() {
        let r = compare_densities(&DiagonalFamily, &[2, 4, 8, 16], 2.0, 2.0, 0).unwrap();
        let t = r.table("norms").unwrap();
        for row in &t.rows {
            let n = row.values[0];
            assert!((row.values[1] - n).abs() < 1e-10 * n);
            assert_eq!(row.values[2], 0.0);
        }
        assert!((r.fit("rho").unwrap().exponent - 1.0).abs() < 1e-9);
        assert!(r.fit("rho_bar").is_none());
    }

    #[test]
    fn cosine_ratio_is_constant() {
        let r = compare_densities(&CosineFamily, &[4, 8, 16, 32], 2.0, 2.0, 0).unwrap();
        for v in r.table("norms").unwrap().column("ratio_renormalised").unwrap() {
            assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn random_hs_ratio_bounded() {
        let r = compare_densities(&RandomHsFamily { seed: 9 }, &[8, 16, 32], 2.0, 2.0, 0).unwrap();
        for v in r.table("norms").unwrap().column("ratio_renormalised").unwrap() {
            assert!(v <= 1.0 + 1e-12 && v > 0.5);
        }
    }
}
