mod common;

use dcsbm::crp::{concentration_mixture, Concentration};
use dcsbm::random::{
    sample_beta, sample_categorical_log, sample_gamma, sample_normal, sample_trunc_normal, RandomSource,
};

const DRAWS: usize = 1_000_000;

fn trunc_mean(mu: f64, lower: f64, upper: f64, seed: u64) -> f64 {
    let mut rng = RandomSource::new(seed, 0);
    let mut sum = 0.0;
    for _ in 0..DRAWS {
        let x = sample_trunc_normal(&mut rng, mu, lower, upper).unwrap();
        assert!(x > lower && x < upper && x.is_finite());
        sum += x;
    }
    sum / DRAWS as f64
}

#[test]
fn half_normal_means() {
    let target = (2.0 / std::f64::consts::PI).sqrt();
    assert!((trunc_mean(0.0, 0.0, f64::INFINITY, 1) - target).abs() < 0.003);
    assert!((trunc_mean(0.0, f64::NEG_INFINITY, 0.0, 2) + target).abs() < 0.003);
}

#[test]
fn far_tail_mean_matches_mills_ratio() {
    let oracle = common::upper_tail_mean(-8.0);
    // Asymptotic expansion 1/8 - 2/8^3 + 10/8^5 - 74/8^7 as an independent check.
    let series = 1.0 / 8.0 - 2.0 / 512.0 + 10.0 / 32768.0 - 74.0 / 2097152.0;
    assert!((oracle - series).abs() < 1e-4, "oracle {oracle} vs series {series}");
    let m = trunc_mean(-8.0, 0.0, f64::INFINITY, 3);
    assert!((m - oracle).abs() < 0.002, "{m} vs {oracle}");
}

#[test]
fn two_sided_interval_mean() {
    // N(0,1) on (1, 2): (phi(1) - phi(2)) / (Phi(2) - Phi(1)).
    let oracle = (common::phi(1.0) - common::phi(2.0)) / (common::norm_cdf(2.0) - common::norm_cdf(1.0));
    let m = trunc_mean(0.0, 1.0, 2.0, 4);
    assert!((m - oracle).abs() < 0.002, "{m} vs {oracle}");
}

#[test]
fn normal_moments() {
    let mut rng = RandomSource::new(5, 0);
    let xs: Vec<f64> = (0..DRAWS).map(|_| sample_normal(&mut rng, 3.0, 1.0).unwrap()).collect();
    assert!((common::mean(&xs) - 3.0).abs() < 0.004);
    let ys: Vec<f64> = (0..DRAWS).map(|_| sample_normal(&mut rng, 0.0, 4.0).unwrap()).collect();
    assert!((common::variance(&ys) - 4.0).abs() < 0.03);
}

#[test]
fn gamma_means() {
    let mut rng = RandomSource::new(6, 0);
    let xs: Vec<f64> = (0..DRAWS).map(|_| sample_gamma(&mut rng, 5.0, 5.0).unwrap()).collect();
    assert!((common::mean(&xs) - 1.0).abs() < 0.005);
    let ys: Vec<f64> = (0..DRAWS).map(|_| sample_gamma(&mut rng, 9.0, 5.693).unwrap()).collect();
    assert!((common::mean(&ys) - 9.0 / 5.693).abs() < 0.01);
    assert!((9.0f64 / 5.693 - 1.581).abs() < 1e-3);
}

#[test]
fn uniform_beta_passes_ks() {
    let mut rng = RandomSource::new(7, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| sample_beta(&mut rng, 1.0, 1.0).unwrap()).collect();
    let p = common::ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
    assert!(p > 0.01, "p = {p}");
}

fn frequency(logw: &[f64], index: usize, seed: u64) -> f64 {
    let mut rng = RandomSource::new(seed, 0);
    let hits = (0..DRAWS)
        .filter(|_| sample_categorical_log(&mut rng, logw).unwrap() == index)
        .count();
    hits as f64 / DRAWS as f64
}

#[test]
fn categorical_frequencies() {
    assert!((frequency(&[0.0, 0.0], 0, 8) - 0.5).abs() < 0.002);
    assert!((frequency(&[700.0, 700.0 + 3f64.ln()], 1, 9) - 0.75).abs() < 0.002);
}

#[test]
fn categorical_matches_naive_normalisation() {
    let w = [0.1, 0.5, 1.7, 0.2, 2.5];
    let total: f64 = w.iter().sum();
    let logw: Vec<f64> = w.iter().map(|x: &f64| x.ln()).collect();
    let mut rng = RandomSource::new(10, 0);
    let mut counts = [0usize; 5];
    for _ in 0..DRAWS {
        counts[sample_categorical_log(&mut rng, &logw).unwrap()] += 1;
    }
    let tv: f64 = counts
        .iter()
        .zip(&w)
        .map(|(&c, &x)| (c as f64 / DRAWS as f64 - x / total).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv < 1e-3, "tv = {tv}");
}

#[test]
fn concentration_mixture_hand_values() {
    let conc = Concentration::new(1.0, 5.0, 5.0).unwrap();
    let mix = concentration_mixture(&conc, 4, 34, 0.5);
    let odds = 8.0 / (34.0 * (5.0 - 0.5f64.ln()));
    assert!((odds - 0.04133).abs() < 1e-5);
    assert!((mix.odds() - odds).abs() < 1e-12);
    assert!((mix.weight_high - 0.0397).abs() < 1e-4);
    assert_eq!(mix.shape_high, 9.0);
    assert_eq!(mix.shape_low, 8.0);
    assert!((mix.rate - 5.693).abs() < 1e-3);

    // gamma -> 1: rate -> b and odds -> (a + L - 1) / (n b).
    let lim = concentration_mixture(&conc, 1, 34, 1.0 - 1e-12);
    assert!((lim.rate - 5.0).abs() < 1e-9);
    assert!((lim.odds() - 5.0 / (34.0 * 5.0)).abs() < 1e-9);
}
