use std::collections::BTreeMap;
use std::time::Instant;

use torus_density::report::ExperimentReport;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Wall-clock allowance checked between sweep points.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    start: Instant,
    seconds: Option<u64>,
}

impl Budget {
    pub fn new(seconds: Option<u64>) -> Self {
        Self {
            start: Instant::now(),
            seconds,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }

    pub fn check(&self, context: impl Into<String>) -> Result<()> {
        let Some(budget) = self.seconds else {
            return Ok(());
        };
        let elapsed = self.start.elapsed().as_secs_f64();
        if elapsed > budget as f64 {
            return Err(CliError::Budget {
                budget,
                elapsed,
                context: context.into(),
            });
        }
        Ok(())
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Values used for keys the caller leaves unset.
    fn defaults(&self) -> ExperimentConfig;
    fn run(&self, cfg: &ExperimentConfig, budget: &Budget) -> Result<ExperimentReport>;
}

#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Replaces any experiment already registered under the same name.
    pub fn register(&mut self, e: Box<dyn Experiment>) -> &mut Self {
        self.entries.insert(e.name(), e);
        self
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.entries.values().map(|b| b.as_ref())
    }

    /// The merged configuration `run` would use.
    pub fn resolve(&self, name: &str, cfg: &ExperimentConfig) -> Result<ExperimentConfig> {
        let e = self.get(name).ok_or_else(|| CliError::UnknownExperiment(name.into()))?;
        let mut merged = cfg.over(&e.defaults());
        merged.experiment = Some(name.to_string());
        Ok(merged)
    }

    /// Runs with defaults filled in; the report echoes the merged config.
    pub fn run(&self, name: &str, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
        let merged = self.resolve(name, cfg)?;
        let e = self.get(name).expect("resolved");
        let budget = Budget::new(merged.budget_seconds);
        let start = Instant::now();
        let mut report = e.run(&merged, &budget)?;
        report.experiment = name.to_string();
        report.config = merged.to_pairs();
        report.wall_clock = Some(start.elapsed());
        budget.check("after the last sweep point")?;
        Ok(report)
    }
}
