//! Browser demo: fit the static model to the karate club or a planted
//! network, and explore the truncated-normal and CRP primitives.

use wasm_bindgen::prelude::*;

use dcsbm::analysis::{adjusted_rand_index, minimize_binder, similarity_matrix};
use dcsbm::crp::CrpState;
use dcsbm::model::{
    generate_network, initialize_state, sample_draws, Hyperparameters, Model, SweepPlan, TiePanel, TrueParams,
};
use dcsbm::network::{parse_edge_list, IndexBase, Network};
use dcsbm::random::{sample_trunc_normal, RandomSource};

const KARATE: &str = include_str!("../../core/data/karate.txt");

fn js_err(e: dcsbm::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Result of one single-chain static fit.
#[wasm_bindgen]
pub struct Fit {
    n: usize,
    edges: Vec<u32>,
    similarity: Vec<f64>,
    communities: Vec<u32>,
    popularity: Vec<u32>,
    theta: Vec<f64>,
    k_trace: Vec<u32>,
    truth: Vec<u32>,
    ari: f64,
}

#[wasm_bindgen]
impl Fit {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Flat `[a0, b0, a1, b1, ...]`, 0-based.
    pub fn edges(&self) -> Vec<u32> {
        self.edges.clone()
    }

    /// Row-major `n × n` posterior co-clustering probabilities.
    pub fn similarity(&self) -> Vec<f64> {
        self.similarity.clone()
    }

    /// Binder community labels, 0-based.
    pub fn communities(&self) -> Vec<u32> {
        self.communities.clone()
    }

    /// Binder popularity labels, 0-based.
    pub fn popularity(&self) -> Vec<u32> {
        self.popularity.clone()
    }

    /// Posterior mean popularity per actor.
    pub fn theta(&self) -> Vec<f64> {
        self.theta.clone()
    }

    /// Number of communities at each retained draw.
    pub fn k_trace(&self) -> Vec<u32> {
        self.k_trace.clone()
    }

    /// Planted labels; empty for the karate club.
    pub fn truth(&self) -> Vec<u32> {
        self.truth.clone()
    }

    /// Agreement with the planted labels; NaN for the karate club.
    #[wasm_bindgen(getter)]
    pub fn ari(&self) -> f64 {
        self.ari
    }
}

fn to_u32(v: &[usize]) -> Vec<u32> {
    v.iter().map(|&x| x as u32).collect()
}

fn fit_network(net: &Network, gamma: f64, sweeps: usize, seed: u64, truth: Option<&[usize]>) -> Result<Fit, JsError> {
    if sweeps < 20 {
        return Err(JsError::new("need at least 20 sweeps"));
    }
    let panel = TiePanel::new(net, Model::Static).map_err(js_err)?;
    let hyper = Hyperparameters::symmetric(gamma);
    hyper.validate().map_err(js_err)?;
    let mut rng = RandomSource::new(seed, 0);
    let mut state = initialize_state(&mut rng, &panel, Model::Static, &hyper).map_err(js_err)?;
    let burn = sweeps / 2;
    let draws = sample_draws(&mut rng, &panel, &mut state, &SweepPlan::default(), sweeps, burn, 1).map_err(js_err)?;
    let zs: Vec<&[usize]> = draws.iter().map(|d| d.z.as_slice()).collect();
    let cs: Vec<&[usize]> = draws.iter().map(|d| d.c.as_slice()).collect();
    let s = similarity_matrix(&zs).map_err(js_err)?;
    let z_hat = minimize_binder(&s, &zs).map_err(js_err)?;
    let c_hat = minimize_binder(&similarity_matrix(&cs).map_err(js_err)?, &cs).map_err(js_err)?;
    let ari = match truth {
        Some(t) => adjusted_rand_index(t, &z_hat.labels).map_err(js_err)?,
        None => f64::NAN,
    };
    let mut theta = vec![0.0; panel.n()];
    for d in &draws {
        for (t, v) in theta.iter_mut().zip(d.theta_per_unit()) {
            *t += v / draws.len() as f64;
        }
    }
    let g = net.snapshot(0);
    Ok(Fit {
        n: g.n(),
        edges: g.edges().flat_map(|(a, b)| [a as u32, b as u32]).collect(),
        similarity: s.as_slice().to_vec(),
        communities: to_u32(&z_hat.labels),
        popularity: to_u32(&c_hat.labels),
        theta,
        k_trace: draws.iter().map(|d| d.k as u32).collect(),
        truth: truth.map(to_u32).unwrap_or_default(),
        ari,
    })
}

/// Fits the karate club with all gamma hyperparameters set to `gamma`.
#[wasm_bindgen]
pub fn fit_karate(gamma: f64, sweeps: usize, seed: u64) -> Result<Fit, JsError> {
    let g = parse_edge_list(KARATE, IndexBase::One, None).map_err(js_err)?;
    fit_network(&Network::Static(g), gamma, sweeps, seed, None)
}

/// Simulates `blocks` planted communities over `n` actors and fits them.
#[wasm_bindgen]
pub fn fit_planted(n: usize, blocks: usize, beta: f64, theta: f64, sweeps: usize, seed: u64) -> Result<Fit, JsError> {
    if blocks == 0 || blocks > n {
        return Err(JsError::new("blocks must be between 1 and n"));
    }
    let params = TrueParams::planted(n, blocks, beta, theta);
    let mut rng = RandomSource::new(seed, 1);
    let net = generate_network(&mut rng, n, 1, Model::Static, &params).map_err(js_err)?;
    fit_network(&net, 5.0, sweeps, seed, Some(&params.z))
}

/// `draws` samples of N(mu, 1) truncated to (lower, upper).
#[wasm_bindgen]
pub fn truncated_normal(mu: f64, lower: f64, upper: f64, draws: usize, seed: u64) -> Result<Vec<f64>, JsError> {
    let mut rng = RandomSource::new(seed, 2);
    (0..draws)
        .map(|_| sample_trunc_normal(&mut rng, mu, lower, upper).map_err(js_err))
        .collect()
}

/// Histogram of the number of clusters over `draws` CRP partitions of
/// `units` items; entry `k` counts partitions with `k + 1` clusters.
#[wasm_bindgen]
pub fn crp_cluster_counts(units: usize, concentration: f64, draws: usize, seed: u64) -> Result<Vec<u32>, JsError> {
    if !(concentration > 0.0) || units == 0 {
        return Err(JsError::new("need a positive concentration and at least one unit"));
    }
    let mut rng = RandomSource::new(seed, 3);
    let mut hist = vec![0u32; units];
    for _ in 0..draws {
        let k = CrpState::from_prior(&mut rng, units, concentration, |_| 0.0).num_clusters();
        hist[k - 1] += 1;
    }
    Ok(hist)
}
