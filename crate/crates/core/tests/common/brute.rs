//! The joint density of the latent utilities written out term by term,
//! used to check every Gaussian and categorical full conditional.

use dcsbm::crp::{Concentration, CrpState};
use dcsbm::model::{Hyperparameters, Model, SamplerState, TiePanel};
use dcsbm::network::{DynamicNetwork, Network, StaticNetwork};
use dcsbm::random::RandomSource;
use rand::Rng;

pub fn random_labels(rng: &mut RandomSource, units: usize, max_k: usize) -> Vec<usize> {
    let raw: Vec<usize> = (0..units).map(|_| rng.random_range(0..max_k)).collect();
    // First-occurrence relabel.
    let mut map = std::collections::HashMap::new();
    raw.iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn crp(rng: &mut RandomSource, labels: Vec<usize>) -> CrpState {
    let k = labels.iter().max().unwrap() + 1;
    let values = (0..k).map(|_| rng.random_range(-1.5..1.5)).collect();
    CrpState::new(labels, values).unwrap()
}

pub fn random_panel(rng: &mut RandomSource, n: usize, t: usize, model: Model) -> TiePanel {
    let snaps: Vec<StaticNetwork> = (0..t)
        .map(|_| {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect();
            let keep: Vec<(usize, usize)> = pairs.into_iter().filter(|_| rng.random_bool(0.5)).collect();
            StaticNetwork::from_edges(n, keep).unwrap()
        })
        .collect();
    let net = if t == 1 {
        Network::Static(snaps.into_iter().next().unwrap())
    } else {
        Network::Dynamic(DynamicNetwork::new(snaps).unwrap())
    };
    TiePanel::new(&net, model).unwrap()
}

pub fn random_instance(seed: u64, model: Model) -> (SamplerState, TiePanel) {
    let mut rng = RandomSource::new(seed, 0);
    let n = rng.random_range(3..7);
    let t = if model.is_dynamic() { rng.random_range(2..4) } else { 1 };
    let hyper = Hyperparameters {
        var_theta: rng.random_range(0.5..2.0),
        var_beta: rng.random_range(0.5..2.0),
        var_eta: rng.random_range(0.5..2.0),
        ..Hyperparameters::symmetric(5.0)
    };
    let zl = random_labels(&mut rng, n, 3);
    let cl = random_labels(&mut rng, model.popularity_units(n, t), 3);
    let z = crp(&mut rng, zl);
    let c = crp(&mut rng, cl);
    let alpha = Concentration::new(rng.random_range(0.3..2.0), 5.0, 5.0).unwrap();
    let nu = Concentration::new(rng.random_range(0.3..2.0), 5.0, 5.0).unwrap();
    let eta = rng.random_range(-1.0..1.0);
    let panel = random_panel(&mut rng, n, t, model);
    let mut s = SamplerState::from_parts(model, hyper, n, t, z, c, alpha, nu, eta).unwrap();
    for tt in 0..t {
        for i in 0..n {
            for j in i + 1..n {
                let mag: f64 = rng.random_range(0.01..2.0);
                s.set_zeta(tt, i, j, if panel.tie(tt, i, j) { mag } else { -mag });
            }
        }
    }
    (s, panel)
}

/// Mean utility written out from the model definition.
pub fn mu(s: &SamplerState, panel: &TiePanel, t: usize, i: usize, j: usize) -> f64 {
    let n = s.n();
    let unit = |i: usize| if s.model() == Model::Dynamic1 { t * n + i } else { i };
    let c = s.popularity();
    let z = s.communities();
    let mut m = c.values()[c.assignments()[unit(i)]] + c.values()[c.assignments()[unit(j)]];
    if z.assignments()[i] == z.assignments()[j] {
        m += z.values()[z.assignments()[i]];
    }
    if s.model() == Model::Dynamic2 && t > 0 && panel.tie(t - 1, i, j) {
        m += s.eta();
    }
    m
}

pub fn log_lik(s: &SamplerState, panel: &TiePanel) -> f64 {
    let mut l = 0.0;
    for t in 0..s.time_points() {
        for i in 0..s.n() {
            for j in i + 1..s.n() {
                let r = s.zeta(t, i, j) - mu(s, panel, t, i, j);
                l -= 0.5 * r * r;
            }
        }
    }
    l
}

/// Mean and variance of a Gaussian whose log-density (up to a constant) is
/// the quadratic `f`.
pub fn gaussian_from_quadratic(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (fm, f0, fp) = (f(-1.0), f(0.0), f(1.0));
    let precision = -(fp + fm - 2.0 * f0);
    let slope = 0.5 * (fp - fm);
    (slope / precision, 1.0 / precision)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

