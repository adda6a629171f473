use rand::Rng;

use super::{Hyperparameters, Model, TiePanel};
use crate::crp::{update_concentration, Concentration, CrpState};
use crate::error::{Error, Result};
use crate::random::{normal, sample_categorical_log, sample_utility};

/// Which updates a sweep performs. The default runs every update; the
/// conditional refit keeps both partitions and their concentrations fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepPlan {
    pub zeta: bool,
    pub communities: bool,
    pub beta: bool,
    pub alpha: bool,
    pub popularity: bool,
    pub theta: bool,
    pub nu: bool,
    pub eta: bool,
    /// Relabel clusters by first occurrence after the sweep.
    pub canonicalize: bool,
}

impl Default for SweepPlan {
    fn default() -> Self {
        SweepPlan {
            zeta: true,
            communities: true,
            beta: true,
            alpha: true,
            popularity: true,
            theta: true,
            nu: true,
            eta: true,
            canonicalize: true,
        }
    }
}

impl SweepPlan {
    /// Only the latent utilities and the cluster values move.
    pub fn fixed_partitions() -> Self {
        SweepPlan {
            communities: false,
            alpha: false,
            popularity: false,
            nu: false,
            canonicalize: false,
            ..SweepPlan::default()
        }
    }

    pub fn none() -> Self {
        SweepPlan {
            zeta: false,
            communities: false,
            beta: false,
            alpha: false,
            popularity: false,
            theta: false,
            nu: false,
            eta: false,
            canonicalize: false,
        }
    }
}

/// Full latent state of one chain.
///
/// `z` holds community labels per actor with the community rates `beta*` as
/// cluster values; `c` holds popularity labels per unit (actor, or
/// actor-time for [`Model::Dynamic1`]) with the levels `theta*` as values.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerState {
    pub(crate) model: Model,
    pub(crate) hyper: Hyperparameters,
    pub(crate) n: usize,
    pub(crate) t: usize,
    /// `t * n * n` latent utilities, symmetric within each time slice.
    pub(crate) zeta: Vec<f64>,
    pub(crate) z: CrpState,
    pub(crate) c: CrpState,
    pub(crate) alpha: Concentration,
    pub(crate) nu: Concentration,
    pub(crate) eta: f64,
}

impl SamplerState {
    /// Assembles a state from explicit parts. `zeta` starts at zero; run
    /// [`SamplerState::step_zeta`] before sampling.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        model: Model,
        hyper: Hyperparameters,
        n: usize,
        time_points: usize,
        z: CrpState,
        c: CrpState,
        alpha: Concentration,
        nu: Concentration,
        eta: f64,
    ) -> Result<Self> {
        hyper.validate()?;
        let expected_t_ok = match model {
            Model::Static => time_points == 1,
            _ => time_points >= 2,
        };
        if !expected_t_ok {
            return Err(Error::ModelMismatch {
                model: model.name(),
                reason: format!("{time_points} time points"),
            });
        }
        if z.n_units() != n {
            return Err(Error::Partition(format!(
                "{} community labels for {n} actors",
                z.n_units()
            )));
        }
        let units = model.popularity_units(n, time_points);
        if c.n_units() != units {
            return Err(Error::Partition(format!(
                "{} popularity labels, expected {units}",
                c.n_units()
            )));
        }
        Ok(SamplerState {
            model,
            hyper,
            n,
            t: time_points,
            zeta: vec![0.0; time_points * n * n],
            z,
            c,
            alpha,
            nu,
            eta: if model == Model::Dynamic2 { eta } else { 0.0 },
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time_points(&self) -> usize {
        self.t
    }

    pub fn communities(&self) -> &CrpState {
        &self.z
    }

    pub fn popularity(&self) -> &CrpState {
        &self.c
    }

    pub fn communities_mut(&mut self) -> &mut CrpState {
        &mut self.z
    }

    pub fn popularity_mut(&mut self) -> &mut CrpState {
        &mut self.c
    }

    pub fn alpha(&self) -> &Concentration {
        &self.alpha
    }

    pub fn nu(&self) -> &Concentration {
        &self.nu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn set_eta(&mut self, eta: f64) {
        if self.model == Model::Dynamic2 {
            self.eta = eta;
        }
    }

    pub fn set_alpha(&mut self, value: f64) {
        self.alpha.value = value;
    }

    pub fn set_nu(&mut self, value: f64) {
        self.nu.value = value;
    }

    #[inline]
    fn idx(&self, t: usize, i: usize, j: usize) -> usize {
        (t * self.n + i) * self.n + j
    }

    /// Latent utility of pair `(i, j)` at time `t`.
    #[inline]
    pub fn zeta(&self, t: usize, i: usize, j: usize) -> f64 {
        self.zeta[self.idx(t, i, j)]
    }

    pub fn set_zeta(&mut self, t: usize, i: usize, j: usize, value: f64) {
        let (a, b) = (self.idx(t, i, j), self.idx(t, j, i));
        self.zeta[a] = value;
        self.zeta[b] = value;
    }

    /// Index of the popularity unit of actor `i` at time `t`.
    #[inline]
    pub fn popularity_unit(&self, t: usize, i: usize) -> usize {
        match self.model {
            Model::Dynamic1 => t * self.n + i,
            _ => i,
        }
    }

    /// Popularity `theta` of actor `i` at time `t`.
    #[inline]
    pub fn theta(&self, t: usize, i: usize) -> f64 {
        self.c.value_of(self.popularity_unit(t, i))
    }

    /// Within-community term: `beta*_k` if both actors sit in community `k`.
    #[inline]
    pub fn community_term(&self, i: usize, j: usize) -> f64 {
        let zi = self.z.assignment(i);
        if zi == self.z.assignment(j) {
            self.z.values()[zi]
        } else {
            0.0
        }
    }

    /// Lagged-tie term `eta * y[t-1, ij]`, non-zero only for the persistence
    /// model at `t > 0`.
    #[inline]
    pub fn lag_term(&self, panel: &TiePanel, t: usize, i: usize, j: usize) -> f64 {
        if self.model == Model::Dynamic2 && t > 0 && panel.tie(t - 1, i, j) {
            self.eta
        } else {
            0.0
        }
    }

    /// Utility with the lagged-tie term removed; equals `zeta` for the models
    /// without persistence.
    #[inline]
    pub fn adjusted_zeta(&self, panel: &TiePanel, t: usize, i: usize, j: usize) -> f64 {
        self.zeta(t, i, j) - self.lag_term(panel, t, i, j)
    }

    /// Mean of the latent utility for pair `(i, j)` at time `t`.
    #[inline]
    pub fn mean_utility(&self, panel: &TiePanel, t: usize, i: usize, j: usize) -> f64 {
        self.lag_term(panel, t, i, j) + self.theta(t, i) + self.theta(t, j) + self.community_term(i, j)
    }

    /// Tie probability `Phi(mean)` for pair `(i, j)` at time `t`.
    pub fn tie_probability(&self, panel: &TiePanel, t: usize, i: usize, j: usize) -> f64 {
        crate::random::norm_cdf(self.mean_utility(panel, t, i, j))
    }

    pub(crate) fn check_panel(&self, panel: &TiePanel) -> Result<()> {
        if panel.n() != self.n || panel.time_points() != self.t {
            return Err(Error::ModelMismatch {
                model: self.model.name(),
                reason: format!(
                    "a network of {} nodes and {} time points (state has {} and {})",
                    panel.n(),
                    panel.time_points(),
                    self.n,
                    self.t
                ),
            });
        }
        Ok(())
    }

    /// Redraws every latent utility from its one-sided truncated normal.
    pub fn step_zeta<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) {
        for t in 0..self.t {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    let mu = self.mean_utility(panel, t, i, j);
                    let v = sample_utility(rng, mu, panel.tie(t, i, j));
                    self.set_zeta(t, i, j, v);
                }
            }
        }
    }

    /// Log-weights for placing detached actor `i` in each live community,
    /// followed by the weight of a new community.
    fn community_log_weights(&self, panel: &TiePanel, i: usize, sums: &mut Vec<f64>, sizes: &mut Vec<usize>) -> Vec<f64> {
        let k = self.z.num_clusters();
        sums.clear();
        sums.resize(k, 0.0);
        sizes.clear();
        sizes.resize(k, 0);
        for j in 0..self.n {
            if j == i {
                continue;
            }
            let kj = self.z.assignment(j);
            sizes[kj] += 1;
            for t in 0..self.t {
                sums[kj] += self.adjusted_zeta(panel, t, i, j) - self.theta(t, i) - self.theta(t, j);
            }
        }
        let tf = self.t as f64;
        let mut logw: Vec<f64> = (0..k)
            .map(|kk| {
                let m = sizes[kk] as f64;
                let b = self.z.values()[kk];
                m.ln() + b * sums[kk] - 0.5 * tf * m * b * b
            })
            .collect();
        logw.push(self.nu.value.ln());
        logw
    }

    /// Normalised conditional probabilities of actor `i`'s community given
    /// everything else: one entry per community of the other actors, then a
    /// new community. Leaves the state untouched.
    pub fn community_conditional(&self, panel: &TiePanel, i: usize) -> Vec<f64> {
        let mut scratch = self.clone();
        scratch.z.detach(i);
        let logw = scratch.community_log_weights(panel, i, &mut Vec::new(), &mut Vec::new());
        normalise(&logw)
    }

    /// Community labels of all actors except `i` after detaching `i`, in the
    /// order used by [`SamplerState::community_conditional`].
    pub fn communities_without(&self, i: usize) -> CrpState {
        let mut scratch = self.z.clone();
        scratch.detach(i);
        scratch
    }

    pub fn step_communities<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) {
        let mut sums = Vec::new();
        let mut sizes = Vec::new();
        for i in 0..self.n {
            self.z.detach(i);
            let logw = self.community_log_weights(panel, i, &mut sums, &mut sizes);
            let pick = sample_categorical_log(rng, &logw).expect("new-community weight is finite");
            if pick == self.z.num_clusters() {
                let b = normal(rng, 0.0, self.hyper.var_beta);
                self.z.attach_new(i, b);
            } else {
                self.z.attach(i, pick);
            }
        }
    }

    /// Mean and variance of the conditional of each `beta*_k`. The
    /// precision is diagonal: `1/var_beta + T * N_k`, with `N_k` the number
    /// of within-community pairs.
    pub fn beta_conditionals(&self, panel: &TiePanel) -> Vec<(f64, f64)> {
        let k = self.z.num_clusters();
        let mut sums = vec![0.0; k];
        for i in 0..self.n {
            let zi = self.z.assignment(i);
            for j in i + 1..self.n {
                if self.z.assignment(j) != zi {
                    continue;
                }
                for t in 0..self.t {
                    sums[zi] += self.adjusted_zeta(panel, t, i, j) - self.theta(t, i) - self.theta(t, j);
                }
            }
        }
        let tf = self.t as f64;
        self.z
            .counts()
            .iter()
            .zip(&sums)
            .map(|(&m, &s)| {
                let pairs = (m * (m - 1) / 2) as f64;
                let precision = 1.0 / self.hyper.var_beta + tf * pairs;
                (s / precision, 1.0 / precision)
            })
            .collect()
    }

    pub fn step_beta<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) {
        let conds = self.beta_conditionals(panel);
        for (k, (mean, var)) in conds.into_iter().enumerate() {
            self.z.values_mut()[k] = normal(rng, mean, var);
        }
    }

    pub fn step_alpha<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.alpha = update_concentration(rng, &self.alpha, self.c.num_clusters(), self.c.n_units())
            .expect("at least one popularity cluster");
    }

    pub fn step_nu<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.nu = update_concentration(rng, &self.nu, self.z.num_clusters(), self.n)
            .expect("at least one community");
    }

    /// Linear coefficient `R` and quadratic count `Q` of a detached
    /// popularity unit: the likelihood as a function of its level `x` is
    /// proportional to `exp(x R - Q x² / 2)`.
    fn popularity_sufficient(&self, panel: &TiePanel, unit: usize) -> (f64, f64) {
        let (times, i) = match self.model {
            Model::Dynamic1 => (unit / self.n..unit / self.n + 1, unit % self.n),
            _ => (0..self.t, unit),
        };
        let mut r = 0.0;
        let mut q = 0.0;
        for t in times {
            for j in 0..self.n {
                if j == i {
                    continue;
                }
                r += self.adjusted_zeta(panel, t, i, j) - self.theta(t, j) - self.community_term(i, j);
                q += 1.0;
            }
        }
        (r, q)
    }

    fn popularity_log_weights(&self, panel: &TiePanel, unit: usize) -> (Vec<f64>, f64, f64) {
        let (r, q) = self.popularity_sufficient(panel, unit);
        let mut logw: Vec<f64> = self
            .c
            .values()
            .iter()
            .zip(self.c.counts())
            .map(|(&th, &cnt)| (cnt as f64).ln() + th * r - 0.5 * q * th * th)
            .collect();
        let var_c = 1.0 / (q + 1.0 / self.hyper.var_theta);
        let mean_c = var_c * r;
        logw.push(
            self.alpha.value.ln() + 0.5 * (var_c / self.hyper.var_theta).ln() + mean_c * mean_c / (2.0 * var_c),
        );
        (logw, mean_c, var_c)
    }

    /// Normalised conditional of popularity unit `unit` over the clusters of
    /// the other units, then a new cluster. Also returns the mean and
    /// variance a new cluster's level would be drawn from.
    pub fn popularity_conditional(&self, panel: &TiePanel, unit: usize) -> (Vec<f64>, f64, f64) {
        let mut scratch = self.clone();
        scratch.c.detach(unit);
        let (logw, mean, var) = scratch.popularity_log_weights(panel, unit);
        (normalise(&logw), mean, var)
    }

    pub fn popularity_without(&self, unit: usize) -> CrpState {
        let mut scratch = self.c.clone();
        scratch.detach(unit);
        scratch
    }

    pub fn step_popularity<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) {
        for unit in 0..self.c.n_units() {
            self.c.detach(unit);
            let (logw, mean_c, var_c) = self.popularity_log_weights(panel, unit);
            let pick = sample_categorical_log(rng, &logw).expect("new-cluster weight is finite");
            if pick == self.c.num_clusters() {
                let th = normal(rng, mean_c, var_c);
                self.c.attach_new(unit, th);
            } else {
                self.c.attach(unit, pick);
            }
        }
    }

    /// Mean and variance of the conditional of `theta*_m` given the other
    /// levels. Pairs inside the cluster contribute precision 4, pairs with
    /// one endpoint inside contribute 1.
    pub fn theta_conditional(&self, panel: &TiePanel, m: usize) -> (f64, f64) {
        let mut precision = 1.0 / self.hyper.var_theta;
        let mut linear = 0.0;
        for unit in 0..self.c.n_units() {
            if self.c.assignment(unit) != m {
                continue;
            }
            let (times, i) = match self.model {
                Model::Dynamic1 => (unit / self.n..unit / self.n + 1, unit % self.n),
                _ => (0..self.t, unit),
            };
            for t in times {
                for j in 0..self.n {
                    if j == i {
                        continue;
                    }
                    let base = self.adjusted_zeta(panel, t, i, j) - self.community_term(i, j);
                    let other = self.c.assignment(self.popularity_unit(t, j));
                    if other == m {
                        // Visited once from each endpoint: 2 + 2 and base + base.
                        precision += 2.0;
                        linear += base;
                    } else {
                        precision += 1.0;
                        linear += base - self.c.values()[other];
                    }
                }
            }
        }
        (linear / precision, 1.0 / precision)
    }

    pub fn step_theta<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) {
        for m in 0..self.c.num_clusters() {
            let (mean, var) = self.theta_conditional(panel, m);
            self.c.values_mut()[m] = normal(rng, mean, var);
        }
    }

    /// Mean and variance of the conditional of `eta`.
    pub fn eta_conditional(&self, panel: &TiePanel) -> (f64, f64) {
        let mut precision = 1.0 / self.hyper.var_eta;
        let mut linear = 0.0;
        for t in 1..self.t {
            for i in 0..self.n {
                for j in i + 1..self.n {
                    if panel.tie(t - 1, i, j) {
                        precision += 1.0;
                        linear += self.zeta(t, i, j)
                            - self.theta(t, i)
                            - self.theta(t, j)
                            - self.community_term(i, j);
                    }
                }
            }
        }
        (linear / precision, 1.0 / precision)
    }

    pub fn step_eta<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) -> Result<()> {
        if self.model != Model::Dynamic2 {
            return Err(Error::ModelMismatch {
                model: self.model.name(),
                reason: "a persistence update (only dynamic2 has eta)".into(),
            });
        }
        let (mean, var) = self.eta_conditional(panel);
        self.eta = normal(rng, mean, var);
        Ok(())
    }

    /// One full Gibbs sweep in the fixed scan order: utilities, communities,
    /// community rates, alpha, popularity labels, popularity levels, nu, and
    /// eta last for the persistence model.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel) -> Result<()> {
        self.sweep_with(rng, panel, &SweepPlan::default())
    }

    pub fn sweep_with<R: Rng + ?Sized>(&mut self, rng: &mut R, panel: &TiePanel, plan: &SweepPlan) -> Result<()> {
        self.check_panel(panel)?;
        if plan.zeta {
            self.step_zeta(rng, panel);
        }
        if plan.communities {
            self.step_communities(rng, panel);
        }
        if plan.beta {
            self.step_beta(rng, panel);
        }
        if plan.alpha {
            self.step_alpha(rng);
        }
        if plan.popularity {
            self.step_popularity(rng, panel);
        }
        if plan.theta {
            self.step_theta(rng, panel);
        }
        if plan.nu {
            self.step_nu(rng);
        }
        if plan.eta && self.model == Model::Dynamic2 {
            self.step_eta(rng, panel)?;
        }
        if plan.canonicalize {
            self.z.canonicalize();
            self.c.canonicalize();
        }
        Ok(())
    }

    /// Whether every utility has the sign of its observed tie.
    pub fn signs_match(&self, panel: &TiePanel) -> bool {
        (0..self.t).all(|t| {
            (0..self.n).all(|i| {
                (i + 1..self.n).all(|j| {
                    let v = self.zeta(t, i, j);
                    if panel.tie(t, i, j) {
                        v > 0.0
                    } else {
                        v <= 0.0
                    }
                })
            })
        })
    }
}

fn normalise(logw: &[f64]) -> Vec<f64> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}
