use std::time::Instant;

use rand::Rng;

use super::{initialize_state, Hyperparameters, Model, SamplerState, SweepPlan, TiePanel};
use crate::error::{Error, Result};
use crate::random::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Upper bound on concurrently running chains; `None` runs all at once.
    pub jobs: Option<usize>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            chains: 3,
            iterations: 40_000,
            burn_in: 30_000,
            thin: 5,
            seed: 1,
            jobs: None,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            return Err(Error::Config("chains must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Retained draws per chain.
    pub fn draws_per_chain(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// One retained sweep. Labels are 0-based and canonical (first occurrence).
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub sweep: usize,
    pub z: Vec<usize>,
    pub c: Vec<usize>,
    pub k: usize,
    pub l: usize,
    pub alpha: f64,
    pub nu: f64,
    pub eta: f64,
    pub beta_star: Vec<f64>,
    pub theta_star: Vec<f64>,
}

impl Draw {
    pub fn from_state(sweep: usize, state: &SamplerState) -> Self {
        Draw {
            sweep,
            z: state.z.assignments().to_vec(),
            c: state.c.assignments().to_vec(),
            k: state.z.num_clusters(),
            l: state.c.num_clusters(),
            alpha: state.alpha.value,
            nu: state.nu.value,
            eta: state.eta,
            beta_star: state.z.values().to_vec(),
            theta_star: state.c.values().to_vec(),
        }
    }

    /// Community rate of each actor's community.
    pub fn beta_per_actor(&self) -> Vec<f64> {
        self.z.iter().map(|&k| self.beta_star[k]).collect()
    }

    /// Popularity level of each unit.
    pub fn theta_per_unit(&self) -> Vec<f64> {
        self.c.iter().map(|&m| self.theta_star[m]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub chain: usize,
    pub model: Model,
    pub n: usize,
    pub time_points: usize,
    pub seed: u64,
    pub stream: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub wall_seconds: f64,
    pub draws: Vec<Draw>,
}

/// Runs `iterations` sweeps from `state`, keeping every `thin`-th sweep
/// after `burn_in`.
pub fn sample_draws<R: Rng + ?Sized>(
    rng: &mut R,
    panel: &TiePanel,
    state: &mut SamplerState,
    plan: &SweepPlan,
    iterations: usize,
    burn_in: usize,
    thin: usize,
) -> Result<Vec<Draw>> {
    let mut draws = Vec::with_capacity(iterations.saturating_sub(burn_in) / thin.max(1));
    for sweep in 1..=iterations {
        state.sweep_with(rng, panel, plan)?;
        if sweep > burn_in && (sweep - burn_in) % thin == 0 {
            draws.push(Draw::from_state(sweep, state));
        }
    }
    Ok(draws)
}

/// Chain `chain` of a run: stream index equals the chain index.
pub fn run_chain(
    panel: &TiePanel,
    model: Model,
    hyper: &Hyperparameters,
    config: &ChainConfig,
    chain: usize,
) -> Result<ChainOutput> {
    config.validate()?;
    let start = Instant::now();
    let mut rng = RandomSource::new(config.seed, chain as u64);
    let mut state = initialize_state(&mut rng, panel, model, hyper)?;
    let draws = sample_draws(
        &mut rng,
        panel,
        &mut state,
        &SweepPlan::default(),
        config.iterations,
        config.burn_in,
        config.thin,
    )?;
    Ok(ChainOutput {
        chain,
        model,
        n: panel.n(),
        time_points: panel.time_points(),
        seed: config.seed,
        stream: chain as u64,
        iterations: config.iterations,
        burn_in: config.burn_in,
        thin: config.thin,
        wall_seconds: start.elapsed().as_secs_f64(),
        draws,
    })
}

/// Runs all chains on scoped threads, at most `config.jobs` at a time.
/// Output is ordered by chain index.
pub fn run_chains(
    panel: &TiePanel,
    model: Model,
    hyper: &Hyperparameters,
    config: &ChainConfig,
) -> Result<Vec<ChainOutput>> {
    config.validate()?;
    hyper.validate()?;
    let jobs = config.jobs.unwrap_or(config.chains).min(config.chains);
    let mut outputs = Vec::with_capacity(config.chains);
    let indices: Vec<usize> = (0..config.chains).collect();
    for batch in indices.chunks(jobs) {
        let results: Vec<Result<ChainOutput>> = std::thread::scope(|s| {
            let handles: Vec<_> = batch
                .iter()
                .map(|&chain| s.spawn(move || run_chain(panel, model, hyper, config, chain)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("chain thread panicked"))
                .collect()
        });
        for r in results {
            outputs.push(r?);
        }
    }
    Ok(outputs)
}
