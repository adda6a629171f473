//! Flat `key = value` run configuration.
//!
//! ```text
//! # karate, static model
//! model = static
//! data = data/karate.txt
//! a_alpha = 5
//! chains = 3
//! ```
//!
//! `data` may be repeated or comma-separated; dynamic models take one file
//! per time point, in order. Relative paths resolve against the config
//! file's directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{ChainConfig, Hyperparameters, Model};
use crate::network::IndexBase;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub data: Vec<PathBuf>,
    /// Optional `id tag` file shown in reports.
    pub attributes: Option<PathBuf>,
    /// Optional `id name` file.
    pub labels: Option<PathBuf>,
    pub index_base: IndexBase,
    pub hyper: Hyperparameters,
    pub chains: ChainConfig,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Static,
            data: Vec::new(),
            attributes: None,
            labels: None,
            index_base: IndexBase::Auto,
            hyper: Hyperparameters::default(),
            chains: ChainConfig::default(),
            output_dir: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{value}`")))
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = RunConfig::default();
        let base = path.parent().unwrap_or(Path::new(""));
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: no + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set_in(key.trim(), value.trim(), base).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: no + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    /// Applies one override; relative paths resolve against the working
    /// directory.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_in(key, value, Path::new(""))
    }

    /// Applies a `key=value` override string.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not `key=value`")))?;
        self.set(k.trim(), v.trim())
    }

    fn set_in(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        match key {
            "model" => self.model = value.parse()?,
            "data" => self.data.extend(
                value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(resolve),
            ),
            "attributes" => self.attributes = Some(resolve(value)),
            "labels" => self.labels = Some(resolve(value)),
            "index_base" => {
                self.index_base = match value {
                    "auto" => IndexBase::Auto,
                    "0" | "zero" => IndexBase::Zero,
                    "1" | "one" => IndexBase::One,
                    _ => return Err(Error::Config(format!("index_base must be auto, 0 or 1, got `{value}`"))),
                }
            }
            "a_alpha" => self.hyper.a_alpha = parse_num(key, value)?,
            "b_alpha" => self.hyper.b_alpha = parse_num(key, value)?,
            "a_nu" => self.hyper.a_nu = parse_num(key, value)?,
            "b_nu" => self.hyper.b_nu = parse_num(key, value)?,
            "var_theta" => self.hyper.var_theta = parse_num(key, value)?,
            "var_beta" => self.hyper.var_beta = parse_num(key, value)?,
            "var_eta" => self.hyper.var_eta = parse_num(key, value)?,
            "gamma_prior" => {
                let g: f64 = parse_num(key, value)?;
                self.hyper.a_alpha = g;
                self.hyper.b_alpha = g;
                self.hyper.a_nu = g;
                self.hyper.b_nu = g;
            }
            "chains" => self.chains.chains = parse_num(key, value)?,
            "iterations" => self.chains.iterations = parse_num(key, value)?,
            "burn_in" => self.chains.burn_in = parse_num(key, value)?,
            "thin" => self.chains.thin = parse_num(key, value)?,
            "seed" => self.chains.seed = parse_num(key, value)?,
            "jobs" => self.chains.jobs = Some(parse_num(key, value)?),
            "output_dir" => self.output_dir = Some(resolve(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks everything that can be checked without reading data.
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        self.chains.validate()?;
        match (self.model, self.data.len()) {
            (_, 0) => Err(Error::Config("no `data` file given".into())),
            (Model::Static, 1) => Ok(()),
            (Model::Static, k) => Err(Error::ModelMismatch {
                model: self.model.name(),
                reason: format!("{k} data files (it takes exactly one)"),
            }),
            (_, 1) => Err(Error::ModelMismatch {
                model: self.model.name(),
                reason: "a single snapshot; it needs at least 2".into(),
            }),
            _ => Ok(()),
        }
    }

    /// Resolved configuration in the file format; loading it back gives
    /// the same settings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let h = &self.hyper;
        let c = &self.chains;
        let _ = writeln!(s, "model = {}", self.model);
        for d in &self.data {
            let _ = writeln!(s, "data = {}", d.display());
        }
        if let Some(a) = &self.attributes {
            let _ = writeln!(s, "attributes = {}", a.display());
        }
        if let Some(l) = &self.labels {
            let _ = writeln!(s, "labels = {}", l.display());
        }
        let base = match self.index_base {
            IndexBase::Auto => "auto",
            IndexBase::Zero => "0",
            IndexBase::One => "1",
        };
        let _ = writeln!(s, "index_base = {base}");
        for (k, v) in [
            ("a_alpha", h.a_alpha),
            ("b_alpha", h.b_alpha),
            ("a_nu", h.a_nu),
            ("b_nu", h.b_nu),
            ("var_theta", h.var_theta),
            ("var_beta", h.var_beta),
            ("var_eta", h.var_eta),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "chains = {}", c.chains);
        let _ = writeln!(s, "iterations = {}", c.iterations);
        let _ = writeln!(s, "burn_in = {}", c.burn_in);
        let _ = writeln!(s, "thin = {}", c.thin);
        let _ = writeln!(s, "seed = {}", c.seed);
        if let Some(j) = c.jobs {
            let _ = writeln!(s, "jobs = {j}");
        }
        s
    }
}
