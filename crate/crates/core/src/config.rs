//! Experiment configuration and its `key = value` text form.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::descriptor::DescriptorConfig;
use crate::error::{Error, Result};
use crate::pipeline::FeatureConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    HalfSplit,
    LeaveOneOut,
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half-split" => Ok(Protocol::HalfSplit),
            "loo" | "leave-one-out" => Ok(Protocol::LeaveOneOut),
            other => Err(Error::Config(format!("unknown protocol {other:?}"))),
        }
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::HalfSplit => "half-split",
            Protocol::LeaveOneOut => "leave-one-out",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub features: FeatureConfig,
    /// Codebook size.
    pub k: usize,
    /// Neighbours per locality-constrained code.
    pub llc_k: usize,
    pub alpha: f64,
    pub epochs: usize,
    /// Parts drawn per training shape for the codebook (mirrors are added).
    pub per_shape_cap: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    /// Number of half-split repetitions.
    pub seeds: usize,
    /// First seed; repetition `i` uses `seed + i`.
    pub seed: u64,
    pub protocol: Protocol,
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            features: FeatureConfig::default(),
            k: 2500,
            llc_k: 5,
            alpha: 10.0,
            epochs: 200,
            per_shape_cap: 30,
            kmeans_max_iter: 100,
            kmeans_tol: 1e-4,
            seeds: 10,
            seed: 0,
            protocol: Protocol::HalfSplit,
            data: None,
            out: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Defaults with the smaller codebook used for the synthetic sets.
    pub fn synthetic() -> Self {
        ExperimentConfig {
            k: 500,
            ..Self::default()
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let d = &mut self.features.descriptor;
        match key {
            "n_c" => self.features.n_c = parse(key, value)?,
            "t" => self.features.t = parse(key, value)?,
            "prune_ratio" => self.features.prune_ratio = parse(key, value)?,
            "n_s" => d.n_s = parse(key, value)?,
            "n_r" => d.n_r = parse(key, value)?,
            "n_d" => d.n_d = parse(key, value)?,
            "n_o" => d.n_o = parse(key, value)?,
            "n_td" => d.n_td = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "llc_k" => self.llc_k = parse(key, value)?,
            "alpha" => self.alpha = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "per_shape_cap" => self.per_shape_cap = parse(key, value)?,
            "kmeans_max_iter" => self.kmeans_max_iter = parse(key, value)?,
            "kmeans_tol" => self.kmeans_tol = parse(key, value)?,
            "seeds" => self.seeds = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "protocol" => self.protocol = value.parse()?,
            "data" => self.data = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", no + 1)),
                other => other,
            })?;
        }
        self.validate()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.features;
        let counts = [
            ("n_c", f.n_c),
            ("t", f.t),
            ("k", self.k),
            ("llc_k", self.llc_k),
            ("epochs", self.epochs),
            ("per_shape_cap", self.per_shape_cap),
            ("kmeans_max_iter", self.kmeans_max_iter),
            ("seeds", self.seeds),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if f.t < 2 || f.t > f.n_c {
            return Err(Error::Config(format!("t must lie in 2..={}", f.n_c)));
        }
        if self.llc_k > self.k {
            return Err(Error::Config("llc_k must not exceed k".into()));
        }
        if !(self.alpha > 0.0) || !(f.prune_ratio >= 0.0) || !(self.kmeans_tol >= 0.0) {
            return Err(Error::Config(
                "alpha must be positive, prune_ratio and kmeans_tol non-negative".into(),
            ));
        }
        f.descriptor.validate().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn descriptor(&self) -> &DescriptorConfig {
        &self.features.descriptor
    }

    /// The `key = value` form read by [`ExperimentConfig::parse`].
    pub fn to_text(&self) -> String {
        let f = &self.features;
        let d = &f.descriptor;
        let mut out = String::new();
        let rows: Vec<(&str, String)> = vec![
            ("n_c", f.n_c.to_string()),
            ("t", f.t.to_string()),
            ("prune_ratio", f.prune_ratio.to_string()),
            ("n_s", d.n_s.to_string()),
            ("n_r", d.n_r.to_string()),
            ("n_d", d.n_d.to_string()),
            ("n_o", d.n_o.to_string()),
            ("n_td", d.n_td.to_string()),
            ("k", self.k.to_string()),
            ("llc_k", self.llc_k.to_string()),
            ("alpha", self.alpha.to_string()),
            ("epochs", self.epochs.to_string()),
            ("per_shape_cap", self.per_shape_cap.to_string()),
            ("kmeans_max_iter", self.kmeans_max_iter.to_string()),
            ("kmeans_tol", self.kmeans_tol.to_string()),
            ("seeds", self.seeds.to_string()),
            ("seed", self.seed.to_string()),
            ("protocol", self.protocol.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k} = {v}");
        }
        if let Some(p) = &self.data {
            let _ = writeln!(out, "data = {}", p.display());
        }
        if let Some(p) = &self.out {
            let _ = writeln!(out, "out = {}", p.display());
        }
        out
    }
}
