//! Nonparametric Bayesian degree-corrected stochastic blockmodels for static
//! and dynamic undirected networks.
//!
//! Communities and popularity levels each follow a Dirichlet process; ties
//! are probit with latent Gaussian utilities, so every Gibbs conditional is
//! conjugate. Node indices are 0-based throughout the library; files and the
//! CLI use 1-based identifiers.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod crp;
pub mod error;
pub mod io;
pub mod model;
pub mod network;
pub mod random;
pub mod svg;

pub use error::{Error, Result};
