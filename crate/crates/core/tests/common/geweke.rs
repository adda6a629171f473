//! Successive-conditional simulation against forward prior simulation.

use dcsbm::model::{prior_state, Hyperparameters, InitOptions, Model, SamplerState};
use dcsbm::random::RandomSource;

use super::{chi_square_two_sample, ks_two_sample};

#[derive(Debug, Default, Clone)]
pub struct Sample {
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    pub alpha: Vec<f64>,
    pub nu: Vec<f64>,
    pub eta: Vec<f64>,
    pub mean_theta: Vec<f64>,
    pub mean_beta: Vec<f64>,
}

impl Sample {
    fn record(&mut self, s: &SamplerState) {
        let z = s.communities();
        let c = s.popularity();
        self.k.push(z.num_clusters());
        self.l.push(c.num_clusters());
        self.alpha.push(s.alpha().value);
        self.nu.push(s.nu().value);
        self.eta.push(s.eta());
        let units = c.n_units();
        self.mean_theta.push((0..units).map(|u| c.value_of(u)).sum::<f64>() / units as f64);
        self.mean_beta.push((0..z.n_units()).map(|i| z.value_of(i)).sum::<f64>() / z.n_units() as f64);
    }
}

#[derive(Debug)]
pub struct Outcome {
    /// `(statistic name, p-value)`.
    pub p_values: Vec<(&'static str, f64)>,
}

impl Outcome {
    pub fn min_p(&self) -> f64 {
        self.p_values.iter().map(|p| p.1).fold(1.0, f64::min)
    }
}

/// Runs both simulators with `draws` retained draws each; the
/// successive-conditional chain keeps every `thin`-th sweep.
pub fn run(model: Model, n: usize, draws: usize, thin: usize, seed: u64) -> Outcome {
    let t = if model.is_dynamic() { 2 } else { 1 };
    let hyper = Hyperparameters::symmetric(5.0);
    let opts = InitOptions::default();

    let mut rng = RandomSource::new(seed, 0);
    let mut forward = Sample::default();
    for _ in 0..draws {
        let s = prior_state(&mut rng, model, &hyper, n, t, &opts).unwrap();
        forward.record(&s);
    }

    let mut rng = RandomSource::new(seed, 1);
    let mut state = prior_state(&mut rng, model, &hyper, n, t, &opts).unwrap();
    let mut panel = state.regenerate_data(&mut rng);
    let mut successive = Sample::default();
    for sweep in 1..=draws * thin {
        state.sweep(&mut rng, &panel).unwrap();
        panel = state.regenerate_data(&mut rng);
        if sweep % thin == 0 {
            successive.record(&state);
        }
    }

    let mut p_values = vec![
        ("K", chi_square_two_sample(&forward.k, &successive.k)),
        ("L", chi_square_two_sample(&forward.l, &successive.l)),
        ("alpha", ks_two_sample(&forward.alpha, &successive.alpha)),
        ("nu", ks_two_sample(&forward.nu, &successive.nu)),
        ("mean theta", ks_two_sample(&forward.mean_theta, &successive.mean_theta)),
        ("mean beta", ks_two_sample(&forward.mean_beta, &successive.mean_beta)),
    ];
    if model == Model::Dynamic2 {
        p_values.push(("eta", ks_two_sample(&forward.eta, &successive.eta)));
    }
    Outcome { p_values }
}
