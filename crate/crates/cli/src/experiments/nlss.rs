use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_density::nlss::{
    conservation_check, illposedness_demo, random_rank_operator, solve_coupled, solve_fixed_point, stationary_family,
    Mode, NlssProblem, NlssTrajectory, Sign,
};
use torus_density::operators::DensityOperator;
use torus_density::propagator::random_unit_field;
use torus_density::report::{Assertion, ExperimentReport, Table};
use torus_density::Complex64;

use super::oracle::{l2_tx, one_body_density};
use super::{defaults, n_list};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::registry::{Budget, Experiment};

fn problem(cfg: &ExperimentConfig, gamma0: DensityOperator) -> Result<NlssProblem> {
    let mut p = NlssProblem::new(gamma0, ExperimentConfig::require(&cfg.horizon, "horizon")?);
    p.cutoff = ExperimentConfig::require(&cfg.cutoff, "cutoff")?.max(p.gamma0.cutoff());
    p.dt = ExperimentConfig::require(&cfg.dt, "dt")?;
    p.tol = ExperimentConfig::require(&cfg.tol, "tol")?;
    p.snapshots = ExperimentConfig::require(&cfg.samples, "samples")?;
    p.coupling = cfg.coupling.unwrap_or(1.0);
    p.sign = match cfg.sign.as_deref() {
        None | Some("defocusing") => Sign::Defocusing,
        Some("focusing") => Sign::Focusing,
        Some(other) => return Err(CliError::Config(format!("sign `{other}`"))),
    };
    Ok(p)
}

fn windows_table(traj: &NlssTrajectory) -> Table {
    let mut t = Table::new("windows", &["start", "end", "accepted", "iterations", "last_difference"]);
    for w in &traj.windows {
        t.push(
            vec![
                w.start,
                w.end,
                if w.accepted { 1.0 } else { 0.0 },
                w.differences.len() as f64,
                w.differences.last().copied().unwrap_or(0.0),
            ],
            None,
        );
    }
    t
}

pub struct NlssCheck;

impl Experiment for NlssCheck {
    fn name(&self) -> &'static str {
        "nlss"
    }
    fn summary(&self) -> &'static str {
        "mean-field solver: one-body oracle, conservation, solver cross-check, stationary family"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults(
            "horizon = 0.5\ndt = 2.5e-4\ncutoff = 16\nrank = 4\nseed = 0\ntol = 1e-11\nsamples = 20\ncoupling = 1\nsign = defocusing",
        )
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let rank = ExperimentConfig::require(&cfg.rank, "rank")?;
        let mut report = ExperimentReport::new(self.name());

        // Rank one against the one-body equation.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
        let u0 = random_unit_field(6, &mut rng).scaled(Complex64::new(1.5, 0.0));
        let g1 = DensityOperator::from_rank_one_sum(&[1.0], &[u0.clone()])?;
        let p1 = problem(cfg, g1)?;
        let traj1 = solve_fixed_point(&p1)?;
        let interval = p1.horizon / p1.snapshots as f64;
        let steps_per = (interval / p1.dt).ceil() as usize;
        let oracle = one_body_density(
            &u0.resized(p1.cutoff),
            p1.potential_scale(),
            p1.horizon,
            p1.snapshots,
            steps_per,
        );
        let got = traj1.snapshot_densities(2 * p1.cutoff + 1);
        let mut rank_one = Table::new("rank_one", &["t", "max_density_error"]);
        for ((t, a), b) in traj1.snapshot_times.iter().zip(&got).zip(&oracle) {
            let e = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            rank_one.push(vec![*t, e], Some(1e-6));
        }
        let one_body = l2_tx(&got, &oracle, interval);
        report.assertions.push(Assertion::at_most("rank_one_vs_one_body", one_body, 1e-6));
        report.tables.push(rank_one);
        budget.check("rank-one run")?;

        // Random rank-R data through both solvers.
        let g = random_rank_operator(rank, 6, cfg.seed())?;
        let p = problem(cfg, g)?;
        let fixed = solve_fixed_point(&p)?;
        let coupled = solve_coupled(&p)?;
        budget.check("rank-R runs")?;
        let alphas = [1.0, 2.0, f64::INFINITY];
        let mut drift = Table::new("drift", &["t", "schatten1", "schatten2", "schatten_inf", "trace"]);
        let s0: Vec<f64> = alphas.iter().map(|&a| fixed.snapshots[0].schatten_norm(a)).collect::<std::result::Result<_, _>>()?;
        let tr0 = fixed.snapshots[0].trace();
        for (t, snap) in fixed.snapshot_times.iter().zip(&fixed.snapshots) {
            let mut row = vec![*t];
            for (&a, &s) in alphas.iter().zip(&s0) {
                row.push((snap.schatten_norm(a)? - s).abs() / s);
            }
            row.push((snap.trace() - tr0).norm() / tr0.norm().max(1.0));
            drift.push(row, Some(1e-8));
        }
        report.tables.push(drift);
        for (name, traj) in [("fixed_point", &fixed), ("coupled", &coupled)] {
            let c = conservation_check(traj, &alphas);
            report.assertions.push(Assertion::at_most(format!("{name}_norm_and_trace_drift"), c.max_drift(), 1e-8));
            report.assertions.push(Assertion::at_most(format!("{name}_hermitian_asymmetry"), c.asymmetry, 1e-10));
            report.assertions.push(Assertion::at_most(format!("{name}_rank_leak"), c.rank_leak, 1e-8));
        }
        let residual = fixed.residual.unwrap_or(f64::INFINITY);
        report.assertions.push(Assertion::at_most("fixed_point_residual", residual, 10.0 * p.tol));
        let cross = fixed.density_distance(&coupled, 2 * p.cutoff + 1)?;
        report.assertions.push(Assertion::at_most("fixed_point_vs_coupled", cross, 1e-5));
        report.tables.push(windows_table(&fixed));

        // Stationary family over T = 1.
        let gs = stationary_family(8, 2.0, 0.1, 8)?;
        let mut ps = problem(cfg, gs.clone())?;
        ps.horizon = 1.0;
        let traj = solve_coupled(&ps)?;
        let reference = gs.resized(ps.cutoff);
        let dev = traj
            .snapshots
            .iter()
            .map(|s| s.matrix().sub(reference.matrix()).max_abs())
            .fold(0.0, f64::max);
        report.assertions.push(Assertion::at_most("stationary_family_drift", dev, 1e-8));
        Ok(report)
    }
}

pub struct RnlssCheck;

impl Experiment for RnlssCheck {
    fn name(&self) -> &'static str {
        "rnlss"
    }
    fn summary(&self) -> &'static str {
        "renormalised and unrenormalised flows give the same operators on trace-class data"
    }
    fn defaults(&self) -> ExperimentConfig {
        defaults("horizon = 0.5\ndt = 1e-3\ncutoff = 16\nrank = 4\nseed = 0\ntol = 1e-10\nsamples = 10\ncoupling = 1\nsign = defocusing")
    }
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport> {
        let rank = ExperimentConfig::require(&cfg.rank, "rank")?;
        let g = random_rank_operator(rank, 6, cfg.seed())?;
        let mut p = problem(cfg, g)?;
        let nlss_fp = solve_fixed_point(&p)?;
        let nlss_c = solve_coupled(&p)?;
        p.renormalised = true;
        let rnlss_fp = solve_fixed_point(&p)?;
        let rnlss_c = solve_coupled(&p)?;
        budget.check("solver runs")?;
        let mut table = Table::new("snapshots", &["t", "fixed_point_distance", "coupled_distance"]);
        let mut worst = 0.0f64;
        for j in 0..nlss_fp.snapshots.len() {
            let a = nlss_fp.snapshots[j].matrix().sub(rnlss_fp.snapshots[j].matrix()).max_abs();
            let b = nlss_c.snapshots[j].matrix().sub(rnlss_c.snapshots[j].matrix()).max_abs();
            worst = worst.max(a).max(b);
            table.push(vec![nlss_fp.snapshot_times[j], a, b], Some(1e-6));
        }
        let mut report = ExperimentReport::new(self.name());
        report.assertions.push(Assertion::at_most("nlss_vs_rnlss_snapshots", worst, 1e-6));
        report.tables.push(table);

        let diag = DensityOperator::diagonal(6, |n| 1.0 / (1.0 + (n * n) as f64));
        let mut pd = problem(cfg, diag.clone())?;
        pd.renormalised = true;
        let traj = solve_fixed_point(&pd)?;
        let reference = diag.resized(pd.cutoff);
        let dev = traj
            .snapshots
            .iter()
            .map(|s| s.matrix().sub(reference.matrix()).max_abs())
            .fold(0.0, f64::max);
        report.assertions.push(Assertion::at_most("diagonal_data_static", dev, 1e-12));
        Ok(report)
    }
}

pub struct IllPosed {
    pub renormalised: bool,
}

impl Experiment for IllPosed {
    fn name(&self) -> &'static str {
        if self.renormalised {
            "illposed-rnlss"
        } else {
            "illposed-nlss"
        }
    }
    fn summary(&self) -> &'static str {
        if self.renormalised {
            "input Schatten norm to zero while the renormalised output norm stays at 1/sqrt 2"
        } else {
            "stationary family: input Schatten norm to zero while the density norm grows"
        }
    }
    fn defaults(&self) -> ExperimentConfig {
        if self.renormalised {
            defaults("alpha = 3\neps = 0\nn_list = 4..512\nhorizon = 1\nskip = 1")
        } else {
            defaults("alpha = 2\neps = 0.1\nn_list = 4..256\nhorizon = 1\nskip = 1")
        }
    }
    fn run(&self, cfg: &ExperimentConfig, _budget: &Budget) -> Result<ExperimentReport> {
        let mode = if self.renormalised { Mode::Rnlss } else { Mode::Nlss };
        Ok(illposedness_demo(
            mode,
            ExperimentConfig::require(&cfg.alpha, "alpha")?,
            ExperimentConfig::require(&cfg.eps, "eps")?,
            &n_list(cfg)?,
            ExperimentConfig::require(&cfg.horizon, "horizon")?,
            cfg.skip(),
        )?)
    }
}
