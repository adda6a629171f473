//! Seeded sampling primitives shared by every Gibbs step.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, StandardNormal};
use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{Error, Result};

/// Standardised truncation point beyond which the truncated normal switches
/// from inversion to exponential-proposal rejection.
const TAIL_SWITCH: f64 = 4.0;

/// A ChaCha8 stream identified by `(seed, stream)`. One per chain.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomSource { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn algorithm(&self) -> &'static str {
        "chacha8"
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Upper-tail probability of the standard normal.
pub(crate) fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

pub(crate) fn norm_cdf(x: f64) -> f64 {
    norm_sf(-x)
}

/// Inverse of [`norm_sf`] on `(0, 1)`.
fn norm_isf(p: f64) -> f64 {
    std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // (0, 1]
    1.0 - rng.random::<f64>()
}

/// Draw from N(0, 1) conditioned on `x > a`.
pub(crate) fn std_normal_above<R: Rng + ?Sized>(rng: &mut R, a: f64) -> f64 {
    if a < TAIL_SWITCH {
        let tail = norm_sf(a);
        loop {
            let x = norm_isf(uniform_open(rng) * tail);
            if x > a && x.is_finite() {
                return x;
            }
        }
    } else {
        let rate = 0.5 * (a + (a * a + 4.0).sqrt());
        loop {
            let e: f64 = Exp1.sample(rng);
            let x = a + e / rate;
            let log_accept = -0.5 * (x - rate) * (x - rate);
            if uniform_open(rng).ln() <= log_accept && x > a {
                return x;
            }
        }
    }
}

/// Draw from N(0, 1) conditioned on `a < x < b` with both ends finite.
fn std_normal_between<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    if a >= 0.0 || b <= 0.0 {
        // Work in the right tail; mirror if the interval lies left of zero.
        let (lo, hi, sign) = if a >= 0.0 { (a, b, 1.0) } else { (-b, -a, -1.0) };
        let rate = 0.5 * (lo + (lo * lo + 4.0).sqrt());
        if lo >= TAIL_SWITCH && rate * (hi - lo) > std::f64::consts::LN_2 {
            loop {
                let x = std_normal_above(rng, lo);
                if x < hi {
                    return sign * x;
                }
            }
        }
        // Narrow (or near-centre) interval: uniform proposal, accepts with
        // probability exp((lo² - x²) / 2).
        if rate * (hi - lo) <= std::f64::consts::LN_2 {
            loop {
                let x = lo + (hi - lo) * rng.random::<f64>();
                if x > lo && x < hi && uniform_open(rng).ln() <= 0.5 * (lo * lo - x * x) {
                    return sign * x;
                }
            }
        }
        let (plo, phi) = (norm_sf(lo), norm_sf(hi));
        loop {
            let x = norm_isf(phi + uniform_open(rng) * (plo - phi));
            if x > lo && x < hi {
                return sign * x;
            }
        }
    }
    let (pa, pb) = (norm_cdf(a), norm_cdf(b));
    loop {
        let p = pa + rng.random::<f64>() * (pb - pa);
        let x = -norm_isf(p);
        if x > a && x < b {
            return x;
        }
    }
}

/// Draw from N(mu, 1) restricted to the open interval `(lower, upper)`.
/// Either bound may be infinite.
pub fn sample_trunc_normal<R: Rng + ?Sized>(rng: &mut R, mu: f64, lower: f64, upper: f64) -> Result<f64> {
    if lower.is_nan() || upper.is_nan() || mu.is_nan() || lower >= upper {
        return Err(Error::InvalidArgument(format!(
            "truncation interval ({lower}, {upper}) is empty"
        )));
    }
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("mean {mu} is not finite")));
    }
    let (a, b) = (lower - mu, upper - mu);
    let x = match (a.is_finite(), b.is_finite()) {
        (false, false) => rng.sample::<f64, _>(StandardNormal),
        (true, false) => std_normal_above(rng, a),
        (false, true) => -std_normal_above(rng, -b),
        (true, true) => std_normal_between(rng, a, b),
    };
    Ok(mu + x)
}

/// Latent utility draw for one tie indicator: positive if the tie is present.
#[inline]
pub(crate) fn sample_utility<R: Rng + ?Sized>(rng: &mut R, mu: f64, tie: bool) -> f64 {
    if tie {
        let x = mu + std_normal_above(rng, -mu);
        if x > 0.0 {
            x
        } else {
            f64::MIN_POSITIVE
        }
    } else {
        let x = mu - std_normal_above(rng, mu);
        if x < 0.0 {
            x
        } else {
            -f64::MIN_POSITIVE
        }
    }
}

#[inline]
pub(crate) fn normal<R: Rng + ?Sized>(rng: &mut R, mu: f64, var: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mu + var.sqrt() * z
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mu: f64, var: f64) -> Result<f64> {
    if !(var >= 0.0) || !var.is_finite() {
        return Err(Error::InvalidArgument(format!("variance {var} must be non-negative")));
    }
    if var == 0.0 {
        return Ok(mu);
    }
    Ok(normal(rng, mu, var))
}

/// Gamma draw with mean `shape / rate`.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) || !shape.is_finite() || !rate.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma parameters must be positive, got shape {shape} rate {rate}"
        )));
    }
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(g.sample(rng))
}

pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta parameters must be positive, got {a}, {b}"
        )));
    }
    let d = Beta::new(a, b).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(d.sample(rng))
}

/// Index drawn with probability proportional to `exp(logw[k])`. The maximum
/// is subtracted before exponentiating.
pub fn sample_categorical_log<R: Rng + ?Sized>(rng: &mut R, logw: &[f64]) -> Result<usize> {
    let max = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::InvalidArgument(
            "categorical draw needs at least one finite log-weight".into(),
        ));
    }
    let total: f64 = logw.iter().map(|&w| (w - max).exp()).sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (k, &w) in logw.iter().enumerate() {
        let p = (w - max).exp();
        if p > 0.0 {
            last = k;
            if u < p {
                return Ok(k);
            }
            u -= p;
        }
    }
    Ok(last)
}
