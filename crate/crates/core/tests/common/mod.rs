//! Independent statistical oracles shared by the integration tests.

#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Mills ratio Q(x)/phi(x) for x > 0 by the Laplace continued fraction,
/// evaluated bottom-up with 200 terms.
pub fn mills_ratio(x: f64) -> f64 {
    let mut acc = x;
    for k in (1..=200).rev() {
        acc = x + k as f64 / acc;
    }
    1.0 / acc
}

/// Mean of N(mu, 1) truncated to (0, inf) for strongly negative mu.
pub fn upper_tail_mean(mu: f64) -> f64 {
    mu + 1.0 / mills_ratio(-mu)
}

/// Normal CDF via a high-order series of erf for |x| < 5 and the Mills
/// ratio beyond.
pub fn norm_cdf(x: f64) -> f64 {
    if x.abs() >= 3.0 {
        let tail = phi(x.abs()) * mills_ratio(x.abs());
        return if x > 0.0 { 1.0 - tail } else { tail };
    }
    // erf(z) = 2/sqrt(pi) * sum (-1)^k z^(2k+1) / (k! (2k+1))
    let z = x / std::f64::consts::SQRT_2;
    let mut term = z;
    let mut sum = z;
    for k in 1..200 {
        term *= -z * z / k as f64;
        sum += term / (2 * k + 1) as f64;
    }
    0.5 * (1.0 + 2.0 / std::f64::consts::PI.sqrt() * sum)
}

/// Asymptotic p-value of the two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    kolmogorov_sf((ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d)
}

/// One-sample KS p-value against a CDF.
pub fn ks_one_sample(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    kolmogorov_sf((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d)
}

fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..100 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * 2.0 * (-2.0 * kf * kf * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

/// Chi-square homogeneity test of two samples of small integers. Sparse
/// tail categories are pooled until every expected count is at least 5.
pub fn chi_square_two_sample(a: &[usize], b: &[usize]) -> f64 {
    let max = a.iter().chain(b).copied().max().unwrap_or(0);
    let mut ca = vec![0.0; max + 1];
    let mut cb = vec![0.0; max + 1];
    for &x in a {
        ca[x] += 1.0;
    }
    for &x in b {
        cb[x] += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    // Pool adjacent categories left to right.
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for v in 0..=max {
        acc.0 += ca[v];
        acc.1 += cb[v];
        let col = acc.0 + acc.1;
        if col * na.min(nb) / total >= 5.0 {
            cells.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => cells.push(acc),
        }
    }
    if cells.len() < 2 {
        return 1.0;
    }
    let mut stat = 0.0;
    for &(oa, ob) in &cells {
        let col = oa + ob;
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    let df = (cells.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

/// Every set partition of `n` items as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            prefix.push(l);
            rec(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

/// Pairwise Binder loss written directly from its definition.
pub fn binder_oracle(labels: &[usize], s: &[Vec<f64>]) -> f64 {
    let n = labels.len();
    let mut loss = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let same = (labels[i] == labels[j]) as u8 as f64;
            loss += (same - s[i][j]).abs();
        }
    }
    loss
}

/// Adjusted Rand index from the pair-counting definition.
pub fn ari_oracle(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut in_a, mut in_b, mut pairs) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            both += (sa && sb) as u8 as f64;
            in_a += sa as u8 as f64;
            in_b += sb as u8 as f64;
            pairs += 1.0;
        }
    }
    let expected = in_a * in_b / pairs;
    let max = 0.5 * (in_a + in_b);
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub mod brute;
pub mod geweke;
