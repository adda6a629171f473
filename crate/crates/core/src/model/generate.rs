use rand::Rng;

use super::{Model, SamplerState, TiePanel};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::random::normal;

/// Ground-truth parameters for synthetic networks. Labels are 0-based
/// indices into `beta_star` and `theta_star`; `c` has one entry per
/// popularity unit (`n * T` for [`Model::Dynamic1`], time-major).
#[derive(Debug, Clone, PartialEq)]
pub struct TrueParams {
    pub z: Vec<usize>,
    pub c: Vec<usize>,
    pub beta_star: Vec<f64>,
    pub theta_star: Vec<f64>,
    pub eta: f64,
}

impl TrueParams {
    /// `blocks` equal-ish communities over `n` actors, one popularity level.
    pub fn planted(n: usize, blocks: usize, beta: f64, theta: f64) -> Self {
        TrueParams {
            z: (0..n).map(|i| i * blocks / n.max(1)).collect(),
            c: vec![0; n],
            beta_star: vec![beta; blocks],
            theta_star: vec![theta],
            eta: 0.0,
        }
    }

    fn validate(&self, n: usize, t: usize, model: Model) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if n < 2 {
            return bad(format!("need at least 2 actors, got {n}"));
        }
        match model {
            Model::Static if t != 1 => return bad(format!("static model takes 1 time point, got {t}")),
            Model::Dynamic1 | Model::Dynamic2 if t < 2 => {
                return bad(format!("{model} needs at least 2 time points, got {t}"))
            }
            _ => {}
        }
        if self.z.len() != n {
            return bad(format!("{} community labels for {n} actors", self.z.len()));
        }
        let units = model.popularity_units(n, t);
        if self.c.len() != units {
            return bad(format!("{} popularity labels, expected {units}", self.c.len()));
        }
        if let Some(&k) = self.z.iter().find(|&&k| k >= self.beta_star.len()) {
            return bad(format!("community label {k} has no beta value"));
        }
        if let Some(&m) = self.c.iter().find(|&&m| m >= self.theta_star.len()) {
            return bad(format!("popularity label {m} has no theta value"));
        }
        let finite = self.beta_star.iter().chain(&self.theta_star).all(|v| !v.is_nan())
            && self.eta.is_finite();
        if !finite {
            return bad("parameter values must not be NaN".into());
        }
        Ok(())
    }
}

/// Samples every tie as Bernoulli(Phi(mu)), sequentially over time for the
/// persistence model. Infinite `beta_star` values are allowed.
pub fn generate_network<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    time_points: usize,
    model: Model,
    params: &TrueParams,
) -> Result<Network> {
    params.validate(n, time_points, model)?;
    let unit = |t: usize, i: usize| if model == Model::Dynamic1 { t * n + i } else { i };
    let mut ties: Vec<Vec<bool>> = Vec::with_capacity(time_points);
    for t in 0..time_points {
        let mut y = vec![false; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut mu = params.theta_star[params.c[unit(t, i)]] + params.theta_star[params.c[unit(t, j)]];
                if params.z[i] == params.z[j] {
                    mu += params.beta_star[params.z[i]];
                }
                if model == Model::Dynamic2 && t > 0 && ties[t - 1][i * n + j] {
                    mu += params.eta;
                }
                let tie = normal(rng, mu, 1.0) > 0.0;
                y[i * n + j] = tie;
                y[j * n + i] = tie;
            }
        }
        ties.push(y);
    }
    Ok(TiePanel::from_dense(n, ties).to_network())
}

impl SamplerState {
    /// Draws fresh data from the likelihood at the current parameters:
    /// each utility from N(mu, 1) and each tie as its sign. Used by the
    /// successive-conditional test to alternate data and parameter draws.
    pub fn regenerate_data<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TiePanel {
        let n = self.n;
        let mut panel = TiePanel::from_dense(n, vec![vec![false; n * n]; self.t]);
        for t in 0..self.t {
            let mut y = vec![false; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    // The lag term reads only slice t - 1, already final.
                    let mu = self.mean_utility(&panel, t, i, j);
                    let v = normal(rng, mu, 1.0);
                    self.set_zeta(t, i, j, v);
                    y[i * n + j] = v > 0.0;
                    y[j * n + i] = v > 0.0;
                }
            }
            panel.set_slice(t, y);
        }
        panel
    }
}
