use rand::Rng;

use super::{Hyperparameters, Model, SamplerState, TiePanel};
use crate::crp::{base_normal, concentration_from_prior, Concentration, CrpState};
use crate::error::Result;
use crate::random::normal;

/// Overrides for the starting concentrations. `None` draws from the prior.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InitOptions {
    pub alpha: Option<f64>,
    pub nu: Option<f64>,
}

/// Random starting point: concentrations from their gamma priors, both
/// partitions from sequential CRP draws, cluster values from the base
/// normals, `eta` from its prior, then one utility pass.
pub fn initialize_state<R: Rng + ?Sized>(
    rng: &mut R,
    panel: &TiePanel,
    model: Model,
    hyper: &Hyperparameters,
) -> Result<SamplerState> {
    initialize_state_with(rng, panel, model, hyper, &InitOptions::default())
}

pub fn initialize_state_with<R: Rng + ?Sized>(
    rng: &mut R,
    panel: &TiePanel,
    model: Model,
    hyper: &Hyperparameters,
    opts: &InitOptions,
) -> Result<SamplerState> {
    let mut state = prior_state(rng, model, hyper, panel.n(), panel.time_points(), opts)?;
    state.check_panel(panel)?;
    state.step_zeta(rng, panel);
    Ok(state)
}

/// A draw of every parameter from the prior, with utilities left at zero.
pub fn prior_state<R: Rng + ?Sized>(
    rng: &mut R,
    model: Model,
    hyper: &Hyperparameters,
    n: usize,
    time_points: usize,
    opts: &InitOptions,
) -> Result<SamplerState> {
    hyper.validate()?;
    let alpha = match opts.alpha {
        Some(v) => Concentration::new(v, hyper.a_alpha, hyper.b_alpha)?,
        None => concentration_from_prior(rng, hyper.a_alpha, hyper.b_alpha)?,
    };
    let nu = match opts.nu {
        Some(v) => Concentration::new(v, hyper.a_nu, hyper.b_nu)?,
        None => concentration_from_prior(rng, hyper.a_nu, hyper.b_nu)?,
    };
    let z = CrpState::from_prior(rng, n, nu.value, base_normal(hyper.var_beta));
    let units = model.popularity_units(n, time_points);
    let c = CrpState::from_prior(rng, units, alpha.value, base_normal(hyper.var_theta));
    let eta = if model == Model::Dynamic2 {
        normal(rng, 0.0, hyper.var_eta)
    } else {
        0.0
    };
    SamplerState::from_parts(model, *hyper, n, time_points, z, c, alpha, nu, eta)
}
