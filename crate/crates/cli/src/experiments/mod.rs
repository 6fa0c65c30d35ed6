//! The registered experiments, one per acceptance check or probe.

mod counting;
mod duality;
mod nlss;
mod oracle;
mod propagator;
mod strichartz;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::registry::Registry;

pub use oracle::one_body_density;

pub fn standard_registry() -> Registry {
    let mut r = Registry::new();
    r.register(Box::new(strichartz::L2Check))
        .register(Box::new(strichartz::L2Sharpness))
        .register(Box::new(strichartz::L3Necessity))
        .register(Box::new(strichartz::L3Sufficiency))
        .register(Box::new(strichartz::ConjectureProbe))
        .register(Box::new(strichartz::L4Scaling))
        .register(Box::new(strichartz::HighDimNecessity))
        .register(Box::new(counting::Counting))
        .register(Box::new(counting::SupportSetCheck))
        .register(Box::new(propagator::PropagatorCheck))
        .register(Box::new(nlss::NlssCheck))
        .register(Box::new(nlss::RnlssCheck))
        .register(Box::new(nlss::IllPosed { renormalised: false }))
        .register(Box::new(nlss::IllPosed { renormalised: true }))
        .register(Box::new(duality::DualityCheck));
    r
}

fn defaults(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text).expect("built-in defaults parse")
}

fn n_list(cfg: &ExperimentConfig) -> Result<Vec<usize>> {
    let mut ns = ExperimentConfig::require(&cfg.n_list, "n_list")?;
    ns.sort_unstable();
    ns.dedup();
    Ok(ns)
}

/// Column-friendly label: `2.5`, `3`, `inf`.
fn alpha_label(a: f64) -> String {
    if a.is_infinite() {
        "inf".into()
    } else {
        format!("{a}")
    }
}
