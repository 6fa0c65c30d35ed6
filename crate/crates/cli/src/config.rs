//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Lists are comma separated.
//! `n_list` also accepts `a..b`, meaning `a, 2a, 4a, ...` up to `b`.
//! Floats accept `inf`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "svg" => Some(Format::Svg),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

/// Every field is optional; experiments fill in their own defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub n_list: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub eps: Option<f64>,
    pub p: Option<f64>,
    pub rank: Option<usize>,
    pub cutoff: Option<usize>,
    pub t_samples: Option<usize>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub coupling: Option<f64>,
    pub sign: Option<String>,
    pub family: Option<String>,
    pub dimensions: Option<Vec<usize>>,
    pub skip: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub budget_seconds: Option<u64>,
}

pub const KEYS: [&str; 22] = [
    "experiment",
    "n_list",
    "alpha",
    "alphas",
    "eps",
    "p",
    "rank",
    "cutoff",
    "t_samples",
    "samples",
    "tol",
    "dt",
    "horizon",
    "coupling",
    "sign",
    "family",
    "dimensions",
    "skip",
    "seed",
    "out",
    "format",
    "budget_seconds",
];

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {value}: {why}"))
}

fn parse_float(key: &str, v: &str) -> Result<f64> {
    match v {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        _ => {
            let x: f64 = v.parse().map_err(|e| bad(key, v, e))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(bad(key, v, "not a number"))
            }
        }
    }
}

fn parse_uint<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| bad(key, v, e))
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_n_list(key: &str, v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in split_list(v) {
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = parse_uint(key, a.trim())?;
            let b: usize = parse_uint(key, b.trim())?;
            if a == 0 || a > b {
                return Err(bad(key, v, "range needs 1 <= a <= b"));
            }
            let mut n = a;
            while n <= b {
                out.push(n);
                n *= 2;
            }
        } else {
            out.push(parse_uint(key, item)?);
        }
    }
    if out.is_empty() {
        return Err(bad(key, v, "empty list"));
    }
    Ok(out)
}

fn render_float(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:?}")
    }
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key from its text value. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let v = v.trim();
        match key {
            "experiment" => self.experiment = Some(v.to_string()),
            "n_list" => self.n_list = Some(parse_n_list(key, v)?),
            "alpha" => self.alpha = Some(parse_float(key, v)?),
            "alphas" => self.alphas = Some(split_list(v).map(|x| parse_float(key, x)).collect::<Result<_>>()?),
            "eps" => self.eps = Some(parse_float(key, v)?),
            "p" => self.p = Some(parse_float(key, v)?),
            "rank" => self.rank = Some(parse_uint(key, v)?),
            "cutoff" => self.cutoff = Some(parse_uint(key, v)?),
            "t_samples" => self.t_samples = Some(parse_uint(key, v)?),
            "samples" => self.samples = Some(parse_uint(key, v)?),
            "tol" => self.tol = Some(parse_float(key, v)?),
            "dt" => self.dt = Some(parse_float(key, v)?),
            "horizon" => self.horizon = Some(parse_float(key, v)?),
            "coupling" => self.coupling = Some(parse_float(key, v)?),
            "sign" => match v {
                "defocusing" | "focusing" => self.sign = Some(v.to_string()),
                _ => return Err(bad(key, v, "expected defocusing or focusing")),
            },
            "family" => self.family = Some(v.to_string()),
            "dimensions" => self.dimensions = Some(split_list(v).map(|x| parse_uint(key, x)).collect::<Result<_>>()?),
            "skip" => self.skip = Some(parse_uint(key, v)?),
            "seed" => self.seed = Some(parse_uint(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => {
                let fs = split_list(v)
                    .map(|x| Format::parse(x).ok_or_else(|| bad(key, v, "expected csv, json or svg")))
                    .collect::<Result<Vec<_>>>()?;
                self.format = Some(fs);
            }
            "budget_seconds" => self.budget_seconds = Some(parse_uint(key, v)?),
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// The set keys as text, in a fixed order; `from_pairs` inverts it.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("experiment", self.experiment.clone());
        put("n_list", self.n_list.as_ref().map(|x| join(x, |n| n.to_string())));
        put("alpha", self.alpha.map(render_float));
        put("alphas", self.alphas.as_ref().map(|x| join(x, |a| render_float(*a))));
        put("eps", self.eps.map(render_float));
        put("p", self.p.map(render_float));
        put("rank", self.rank.map(|x| x.to_string()));
        put("cutoff", self.cutoff.map(|x| x.to_string()));
        put("t_samples", self.t_samples.map(|x| x.to_string()));
        put("samples", self.samples.map(|x| x.to_string()));
        put("tol", self.tol.map(render_float));
        put("dt", self.dt.map(render_float));
        put("horizon", self.horizon.map(render_float));
        put("coupling", self.coupling.map(render_float));
        put("sign", self.sign.clone());
        put("family", self.family.clone());
        put("dimensions", self.dimensions.as_ref().map(|x| join(x, |n| n.to_string())));
        put("skip", self.skip.map(|x| x.to_string()));
        put("seed", self.seed.map(|x| x.to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.as_ref().map(|x| join(x, |f| f.as_str().to_string())));
        put("budget_seconds", self.budget_seconds.map(|x| x.to_string()));
        m
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.to_pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_pairs()).expect("string map")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("json config: {e}")))?;
        Self::from_pairs(map.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    /// Keys set in `self` win over `base`.
    pub fn over(&self, base: &ExperimentConfig) -> ExperimentConfig {
        let mut out = base.clone();
        for (k, v) in self.to_pairs() {
            out.set(&k, &v).expect("rendered values parse");
        }
        out
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn skip(&self) -> usize {
        self.skip.unwrap_or(1)
    }

    pub fn require<T: Clone>(field: &Option<T>, key: &'static str) -> Result<T> {
        field.clone().ok_or(CliError::Config(format!("missing key `{key}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_and_ranges() {
        let cfg = ExperimentConfig::parse("n_list = 4..32 # doubling\nalphas = 2, 2.5, inf\nformat = csv,svg\n").unwrap();
        assert_eq!(cfg.n_list, Some(vec![4, 8, 16, 32]));
        assert_eq!(cfg.alphas, Some(vec![2.0, 2.5, f64::INFINITY]));
        assert_eq!(cfg.format, Some(vec![Format::Csv, Format::Svg]));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(ExperimentConfig::parse("colour = red"), Err(CliError::Config(_))));
        assert!(ExperimentConfig::parse("n_list = 8..4").is_err());
        assert!(ExperimentConfig::parse("alpha = nan").is_err());
        assert!(ExperimentConfig::parse("alpha").is_err());
        assert!(ExperimentConfig::from_json(r#"{"colour": "red"}"#).is_err());
    }

    #[test]
    fn text_and_json_round_trip() {
        let cfg = ExperimentConfig::parse(
            "experiment = l2-sharpness\nn_list = 4,8,100\nalpha = 0.1\ntol = 1e-9\nalphas = 2.5,inf\nseed = 7\nout = /tmp/x\nsign = focusing\n",
        )
        .unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn overlay_prefers_explicit_keys() {
        let base = ExperimentConfig::parse("alpha = 2\nseed = 1").unwrap();
        let top = ExperimentConfig::parse("seed = 5").unwrap();
        let m = top.over(&base);
        assert_eq!((m.alpha, m.seed), (Some(2.0), Some(5)));
    }
}
