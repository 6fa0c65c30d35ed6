//! Structured experiment records.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<f64>,
    /// Tolerance the row was judged against, if any.
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, values: Vec<f64>, tolerance: Option<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(Row { values, tolerance });
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

/// A fitted power law `value ~ C N^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Smallest and largest `N` used by the fit.
    pub window: (f64, f64),
    pub points: Vec<(f64, f64)>,
    pub target: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub observed: f64,
    pub expected: String,
    pub tolerance: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            expected: format!("<= {limit}"),
            tolerance: 0.0,
            passed: observed <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            expected: format!(">= {limit}"),
            tolerance: 0.0,
            passed: observed >= limit,
        }
    }

    pub fn within(name: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            expected: format!("{target} +/- {tolerance}"),
            tolerance,
            passed: (observed - target).abs() <= tolerance,
        }
    }

    pub fn in_range(name: impl Into<String>, observed: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            observed,
            expected: format!("in [{lo}, {hi}]"),
            tolerance: 0.0,
            passed: (lo..=hi).contains(&observed),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            observed: if passed { 1.0 } else { 0.0 },
            expected: "true".into(),
            tolerance: 0.0,
            passed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub label: Option<String>,
    pub config: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    pub fits: Vec<FitRecord>,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub version: String,
    /// Not serialised: reports must be byte-identical across runs.
    #[serde(skip)]
    pub wall_clock: Option<Duration>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&FitRecord> {
        self.fits.iter().find(|f| f.name == name)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Appends another report's tables, fits and assertions.
    pub fn absorb(&mut self, other: ExperimentReport) {
        self.tables.extend(other.tables);
        self.fits.extend(other.fits);
        self.assertions.extend(other.assertions);
        self.notes.extend(other.notes);
    }
}
