//! Degree-corrected blockmodels with Dirichlet-process communities and
//! popularity clusters, and their Gibbs samplers.
//!
//! Three variants share one state layout:
//!
//! * [`Model::Static`]: one snapshot, popularity per actor.
//! * [`Model::Dynamic1`]: `T` snapshots, fixed communities, popularity per
//!   actor and time point (the popularity CRP runs over `n * T` units).
//! * [`Model::Dynamic2`]: `T` snapshots, fixed communities and popularities,
//!   plus a persistence coefficient `eta` on the previous tie.

mod chains;
mod generate;
mod init;
mod state;

use std::fmt;
use std::str::FromStr;

pub use chains::{run_chain, run_chains, sample_draws, ChainConfig, ChainOutput, Draw};
pub use generate::{generate_network, TrueParams};
pub use init::{initialize_state, initialize_state_with, prior_state, InitOptions};
pub use state::{SamplerState, SweepPlan};

use crate::error::{Error, Result};
use crate::network::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Static,
    Dynamic1,
    Dynamic2,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Static => "static",
            Model::Dynamic1 => "dynamic1",
            Model::Dynamic2 => "dynamic2",
        }
    }

    pub fn is_dynamic(self) -> bool {
        !matches!(self, Model::Static)
    }

    /// Number of popularity indicators for `n` actors over `t` time points.
    pub fn popularity_units(self, n: usize, t: usize) -> usize {
        match self {
            Model::Dynamic1 => n * t,
            _ => n,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "static" => Ok(Model::Static),
            "dynamic1" | "dynamic-1" | "dynamic_i" | "dynamic-i" => Ok(Model::Dynamic1),
            "dynamic2" | "dynamic-2" | "dynamic_ii" | "dynamic-ii" => Ok(Model::Dynamic2),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected static, dynamic1 or dynamic2)"
            ))),
        }
    }
}

/// Prior constants. Gamma priors are shape/rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub a_alpha: f64,
    pub b_alpha: f64,
    pub a_nu: f64,
    pub b_nu: f64,
    pub var_theta: f64,
    pub var_beta: f64,
    pub var_eta: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters::symmetric(5.0)
    }
}

impl Hyperparameters {
    /// All four gamma constants set to `g`, unit base variances.
    pub fn symmetric(g: f64) -> Self {
        Hyperparameters {
            a_alpha: g,
            b_alpha: g,
            a_nu: g,
            b_nu: g,
            var_theta: 1.0,
            var_beta: 1.0,
            var_eta: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a_alpha", self.a_alpha),
            ("b_alpha", self.b_alpha),
            ("a_nu", self.a_nu),
            ("b_nu", self.b_nu),
            ("var_theta", self.var_theta),
            ("var_beta", self.var_beta),
            ("var_eta", self.var_eta),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Dense tie indicators, one `n × n` symmetric matrix per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct TiePanel {
    n: usize,
    ties: Vec<Vec<bool>>,
}

impl TiePanel {
    /// Checks that `net` fits `model` and expands it to dense form.
    pub fn new(net: &Network, model: Model) -> Result<Self> {
        match (model, net) {
            (Model::Static, Network::Dynamic(d)) => {
                return Err(Error::ModelMismatch {
                    model: model.name(),
                    reason: format!("a dynamic network of {} snapshots", d.time_points()),
                })
            }
            (Model::Dynamic1 | Model::Dynamic2, Network::Static(_)) => {
                return Err(Error::ModelMismatch {
                    model: model.name(),
                    reason: "a single snapshot; it needs at least 2".into(),
                })
            }
            _ => {}
        }
        if net.n() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a network needs at least 2 nodes, got {}",
                net.n()
            )));
        }
        let ties = (0..net.time_points())
            .map(|t| net.snapshot(t).adjacency())
            .collect();
        Ok(TiePanel { n: net.n(), ties })
    }

    pub(crate) fn from_dense(n: usize, ties: Vec<Vec<bool>>) -> Self {
        TiePanel { n, ties }
    }

    pub(crate) fn set_slice(&mut self, t: usize, y: Vec<bool>) {
        self.ties[t] = y;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time_points(&self) -> usize {
        self.ties.len()
    }

    #[inline]
    pub fn tie(&self, t: usize, i: usize, j: usize) -> bool {
        self.ties[t][i * self.n + j]
    }

    pub fn edge_count(&self, t: usize) -> usize {
        self.ties[t].iter().filter(|&&b| b).count() / 2
    }

    pub fn to_network(&self) -> Network {
        let snaps: Vec<_> = (0..self.time_points())
            .map(|t| {
                let pairs = (0..self.n)
                    .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
                    .filter(|&(i, j)| self.tie(t, i, j));
                crate::network::StaticNetwork::from_edges(self.n, pairs).expect("indices in range")
            })
            .collect();
        if snaps.len() == 1 {
            Network::Static(snaps.into_iter().next().unwrap())
        } else {
            Network::Dynamic(crate::network::DynamicNetwork::new(snaps).expect("at least two snapshots"))
        }
    }
}
