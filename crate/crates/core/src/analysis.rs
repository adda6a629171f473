//! Posterior summaries: similarity matrices, Binder-loss point partitions,
//! scalar summaries with split-chain PSRF, and refits on fixed partitions.

use std::collections::BTreeMap;

use crate::crp::{Concentration, CrpState};
use crate::error::{Error, Result};
use crate::model::{
    sample_draws, ChainConfig, ChainOutput, Hyperparameters, Model, SamplerState, SweepPlan, TiePanel,
};
use crate::random::{normal, RandomSource};

/// Which partition a summary refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partition {
    Community,
    Popularity,
}

impl Partition {
    pub fn labels<'a>(&self, draw: &'a crate::model::Draw) -> &'a [usize] {
        match self {
            Partition::Community => &draw.z,
            Partition::Popularity => &draw.c,
        }
    }
}

/// Pairwise co-clustering frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    s: Vec<f64>,
}

impl SimilarityMatrix {
    /// Builds a matrix from explicit entries; checks symmetry, range and the
    /// unit diagonal.
    pub fn from_dense(n: usize, s: Vec<f64>) -> Result<Self> {
        if s.len() != n * n {
            return Err(Error::InvalidArgument(format!("{} entries for an {n}x{n} matrix", s.len())));
        }
        for i in 0..n {
            if (s[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = s[i * n + j];
                if !(0.0..=1.0).contains(&v) || (v - s[j * n + i]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!("entry ({i}, {j}) = {v} is invalid")));
                }
            }
        }
        Ok(SimilarityMatrix { n, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.s[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.s
    }
}

/// Fraction of partitions in which each pair shares a label.
pub fn similarity_matrix<P: AsRef<[usize]>>(partitions: &[P]) -> Result<SimilarityMatrix> {
    let first = partitions
        .first()
        .ok_or_else(|| Error::InvalidArgument("similarity matrix needs at least one draw".into()))?;
    let n = first.as_ref().len();
    let mut counts = vec![0u32; n * n];
    for p in partitions {
        let p = p.as_ref();
        if p.len() != n {
            return Err(Error::InvalidArgument(format!(
                "draws disagree on size: {} vs {n}",
                p.len()
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                if p[i] == p[j] {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let total = partitions.len() as f64;
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        s[i * n + i] = 1.0;
        for j in i + 1..n {
            let v = counts[i * n + j] as f64 / total;
            s[i * n + j] = v;
            s[j * n + i] = v;
        }
    }
    Ok(SimilarityMatrix { n, s })
}

/// Similarity matrix of one partition across all draws of all chains.
pub fn chain_similarity(chains: &[ChainOutput], which: Partition) -> Result<SimilarityMatrix> {
    let parts: Vec<&[usize]> = chains
        .iter()
        .flat_map(|c| c.draws.iter().map(|d| which.labels(d)))
        .collect();
    similarity_matrix(&parts)
}

/// Expected Binder loss of `labels`: sum over pairs of `|1{same} - S_ij|`.
pub fn binder_loss(labels: &[usize], s: &SimilarityMatrix) -> Result<f64> {
    if labels.len() != s.n {
        return Err(Error::InvalidArgument(format!(
            "{} labels for a {}-node similarity matrix",
            labels.len(),
            s.n
        )));
    }
    let mut loss = 0.0;
    for i in 0..s.n {
        for j in i + 1..s.n {
            let same = if labels[i] == labels[j] { 1.0 } else { 0.0 };
            loss += (same - s.get(i, j)).abs();
        }
    }
    Ok(loss)
}

/// A point partition with its expected loss. Labels are 0-based and in
/// first-occurrence order.
#[derive(Debug, Clone, PartialEq)]
pub struct HardClustering {
    pub labels: Vec<usize>,
    pub expected_loss: f64,
}

impl HardClustering {
    pub fn num_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each cluster, in label order.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        groups(&self.labels)
    }
}

/// Relabels to 0..K in first-occurrence order.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn groups(labels: &[usize]) -> Vec<Vec<usize>> {
    let canon = canonical_labels(labels);
    let k = canon.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); k];
    for (i, &l) in canon.iter().enumerate() {
        out[l].push(i);
    }
    out
}

fn count_clusters(labels: &[usize]) -> usize {
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Cuts of the average-linkage tree on distance `1 - S`, one per cluster
/// count from `n` down to 1.
pub fn average_linkage_cuts(s: &SimilarityMatrix) -> Vec<Vec<usize>> {
    let n = s.n;
    if n == 0 {
        return Vec::new();
    }
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 - s.get(i, j)).collect())
        .collect();
    let mut alive: Vec<bool> = vec![true; n];
    let mut cuts = Vec::with_capacity(n);
    let labels_of = |members: &[Vec<usize>], alive: &[bool]| {
        let mut labels = vec![0; n];
        for (k, m) in members.iter().enumerate() {
            if alive[k] {
                for &i in m {
                    labels[i] = k;
                }
            }
        }
        canonical_labels(&labels)
    };
    cuts.push(labels_of(&members, &alive));
    for _ in 1..n {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..n {
            if !alive[a] {
                continue;
            }
            for b in a + 1..n {
                if alive[b] && dist[a][b] < best.0 {
                    best = (dist[a][b], a, b);
                }
            }
        }
        let (_, a, b) = best;
        let (na, nb) = (members[a].len() as f64, members[b].len() as f64);
        for k in 0..n {
            if alive[k] && k != a && k != b {
                let d = (na * dist[a][k] + nb * dist[b][k]) / (na + nb);
                dist[a][k] = d;
                dist[k][a] = d;
            }
        }
        let moved = std::mem::take(&mut members[b]);
        members[a].extend(moved);
        alive[b] = false;
        cuts.push(labels_of(&members, &alive));
    }
    cuts
}

/// Greedy single-node moves (to another cluster or to a new singleton),
/// then the best cluster merge, while either lowers the loss.
pub fn refine_binder(labels: &[usize], s: &SimilarityMatrix) -> Vec<usize> {
    let n = s.n;
    let mut labels = canonical_labels(labels);
    let mut k = labels.iter().max().map_or(0, |m| m + 1);
    let mut gain = Vec::new();
    loop {
        let mut improved = false;
        for i in 0..n {
            // gain[c] = sum over j in c, j != i, of (2 S_ij - 1): the loss
            // drop from joining c minus the cost of leaving it.
            gain.clear();
            gain.resize(k, 0.0);
            for j in 0..n {
                if j != i {
                    gain[labels[j]] += 2.0 * s.get(i, j) - 1.0;
                }
            }
            let own = labels[i];
            let mut best = (0.0, own);
            for (c, &g) in gain.iter().enumerate() {
                let delta = gain[own] - g;
                if c != own && delta < best.0 - 1e-12 {
                    best = (delta, c);
                }
            }
            let singleton_delta = gain[own];
            let own_size = labels.iter().filter(|&&l| l == own).count();
            if own_size > 1 && singleton_delta < best.0 - 1e-12 {
                best = (singleton_delta, k);
            }
            if best.1 != own {
                labels[i] = best.1;
                labels = canonical_labels(&labels);
                k = labels.iter().max().map_or(0, |m| m + 1);
                improved = true;
            }
        }
        if !improved && !merge_best_pair(&mut labels, s) {
            return labels;
        }
        k = labels.iter().max().map_or(0, |m| m + 1);
    }
}

/// Merges the pair of clusters whose union lowers the loss most, if any.
fn merge_best_pair(labels: &mut Vec<usize>, s: &SimilarityMatrix) -> bool {
    let n = s.n;
    let k = labels.iter().max().map_or(0, |m| m + 1);
    // between[a][b] = sum over i in a, j in b of (2 S_ij - 1).
    let mut between = vec![0.0; k * k];
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (labels[i], labels[j]);
            if a != b {
                let v = 2.0 * s.get(i, j) - 1.0;
                between[a * k + b] += v;
                between[b * k + a] += v;
            }
        }
    }
    let mut best = (1e-12, 0, 0);
    for a in 0..k {
        for b in a + 1..k {
            if between[a * k + b] > best.0 {
                best = (between[a * k + b], a, b);
            }
        }
    }
    if best.0 <= 1e-12 {
        return false;
    }
    for l in labels.iter_mut() {
        if *l == best.2 {
            *l = best.1;
        }
    }
    *labels = canonical_labels(labels);
    true
}

/// Number of distinct low-loss partitions used as local-search starts.
const REFINE_STARTS: usize = 10;

/// Partition minimising the expected Binder loss over the candidates, all
/// average-linkage cuts of `1 - S`, and local refinements of every cut and of
/// the best few candidates, followed by single-node kicks of the incumbent.
/// Ties go to fewer clusters, then to the earliest candidate.
pub fn minimize_binder<P: AsRef<[usize]>>(s: &SimilarityMatrix, candidates: &[P]) -> Result<HardClustering> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("Binder search needs at least one candidate".into()));
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    let mut pool: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for labels in candidates.iter().map(|c| c.as_ref().to_vec()) {
        let canon = canonical_labels(&labels);
        if seen.insert(canon.clone()) {
            pool.push((binder_loss(&canon, s)?, canon));
        }
        consider_partition(&mut best, labels, s)?;
    }
    // Local search from the few best distinct candidates and from every cut.
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.truncate(REFINE_STARTS);
    for cut in average_linkage_cuts(s) {
        consider_partition(&mut best, cut.clone(), s)?;
        pool.push((0.0, cut));
    }
    for (_, start) in &pool {
        consider_partition(&mut best, refine_binder(start, s), s)?;
    }
    // Kick the incumbent: force each node into each other cluster, refine,
    // and restart from any improvement.
    loop {
        let (incumbent_loss, _, incumbent) = best.clone().expect("at least one candidate");
        let incumbent = canonical_labels(&incumbent);
        let k = incumbent.iter().max().map_or(0, |m| m + 1);
        for i in 0..s.n {
            for c in (0..=k).filter(|&c| c != incumbent[i]) {
                let mut kicked = incumbent.clone();
                kicked[i] = c;
                consider_partition(&mut best, refine_binder(&kicked, s), s)?;
            }
        }
        if best.as_ref().is_some_and(|b| b.0 >= incumbent_loss - 1e-9) {
            break;
        }
    }
    let (loss, _, labels) = best.expect("at least one candidate");
    let labels = canonical_labels(&labels);
    debug_assert!((binder_loss(&labels, s)? - loss).abs() < 1e-9);
    Ok(HardClustering { expected_loss: loss, labels })
}

fn consider_partition(best: &mut Option<(f64, usize, Vec<usize>)>, labels: Vec<usize>, s: &SimilarityMatrix) -> Result<()> {
    let loss = binder_loss(&labels, s)?;
    let k = count_clusters(&labels);
    let better = match best {
        None => true,
        Some((bl, bk, _)) => loss < *bl - 1e-9 || ((loss - *bl).abs() <= 1e-9 && k < *bk),
    };
    if better {
        *best = Some((loss, k, labels));
    }
    Ok(())
}

/// Binder partition of one partition type pooled over chains.
pub fn chain_binder(chains: &[ChainOutput], which: Partition) -> Result<(SimilarityMatrix, HardClustering)> {
    let s = chain_similarity(chains, which)?;
    let parts: Vec<&[usize]> = chains
        .iter()
        .flat_map(|c| c.draws.iter().map(|d| which.labels(d)))
        .collect();
    let hc = minimize_binder(&s, &parts)?;
    Ok((s, hc))
}

/// Exact minimiser by enumerating every set partition; `n <= 10`.
pub fn exhaustive_binder(s: &SimilarityMatrix) -> Result<HardClustering> {
    if s.n > 10 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search is limited to 10 nodes, got {}",
            s.n
        )));
    }
    let n = s.n;
    let mut labels = vec![0usize; n];
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    loop {
        let loss = binder_loss(&labels, s)?;
        let k = labels.iter().max().map_or(0, |m| m + 1);
        let better = match &best {
            None => true,
            Some((bl, bk, _)) => loss < bl - 1e-9 || ((loss - bl).abs() <= 1e-9 && k < *bk),
        };
        if better {
            best = Some((loss, k, labels.clone()));
        }
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i <= 1 {
                let (loss, _, labels) = best.expect("at least one partition");
                return Ok(HardClustering { labels, expected_loss: loss });
            }
            i -= 1;
            let prefix_max = labels[..i].iter().copied().max().unwrap_or(0);
            if labels[i] <= prefix_max {
                labels[i] += 1;
                for l in labels.iter_mut().skip(i + 1) {
                    *l = 0;
                }
                break;
            }
        }
    }
}

/// Adjusted Rand index between two partitions of the same units.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "partitions have {} and {} units",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    let (ca, cb) = (canonical_labels(a), canonical_labels(b));
    let ka = ca.iter().max().map_or(0, |m| m + 1);
    let kb = cb.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![0u64; ka * kb];
    for i in 0..n {
        table[ca[i] * kb + cb[i]] += 1;
    }
    let c2 = |x: u64| (x * x.saturating_sub(1)) as f64 / 2.0;
    let sum_cells: f64 = table.iter().map(|&x| c2(x)).sum();
    let rows: f64 = (0..ka).map(|r| c2((0..kb).map(|c| table[r * kb + c]).sum())).sum();
    let cols: f64 = (0..kb).map(|c| c2((0..ka).map(|r| table[r * kb + c]).sum())).sum();
    let total = c2(n as u64);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = rows * cols / total;
    let max = 0.5 * (rows + cols);
    if (max - expected).abs() < 1e-12 {
        // Both partitions trivial in the same way.
        return Ok(if (sum_cells - expected).abs() < 1e-12 { 1.0 } else { 0.0 });
    }
    Ok((sum_cells - expected) / (max - expected))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub sd: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Moments { mean: f64::NAN, sd: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Moments { mean, sd: var.sqrt() }
    }
}

/// Split-chain potential scale reduction factor. Each chain is cut in half;
/// zero within-chain variance gives 1.
pub fn split_psrf(chains: &[Vec<f64>]) -> f64 {
    let halves: Vec<&[f64]> = chains
        .iter()
        .filter(|c| c.len() >= 4)
        .flat_map(|c| {
            let h = c.len() / 2;
            [&c[..h], &c[c.len() - h..]]
        })
        .collect();
    if halves.len() < 2 {
        return 1.0;
    }
    let len = halves.iter().map(|h| h.len()).min().unwrap_or(0);
    let m = halves.len() as f64;
    let nn = len as f64;
    let stats: Vec<Moments> = halves.iter().map(|h| Moments::of(&h[..len])).collect();
    let w = stats.iter().map(|s| s.sd * s.sd).sum::<f64>() / m;
    let grand = stats.iter().map(|s| s.mean).sum::<f64>() / m;
    let b = nn / (m - 1.0) * stats.iter().map(|s| (s.mean - grand).powi(2)).sum::<f64>();
    if w <= 0.0 || !w.is_finite() {
        return 1.0;
    }
    let var_plus = (nn - 1.0) / nn * w + b / nn;
    (var_plus / w).sqrt()
}

/// Summary of an integer-valued scalar such as K or L.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSummary {
    pub histogram: BTreeMap<usize, usize>,
    pub mode: usize,
    pub moments: Moments,
    pub per_chain: Vec<(usize, Moments)>,
}

fn mode_of(h: &BTreeMap<usize, usize>) -> usize {
    // Smallest value among the most frequent.
    let max = h.values().copied().max().unwrap_or(0);
    h.iter().find(|(_, &c)| c == max).map_or(0, |(&v, _)| v)
}

pub fn summarize_discrete(chains: &[Vec<usize>]) -> DiscreteSummary {
    let mut histogram = BTreeMap::new();
    for &v in chains.iter().flatten() {
        *histogram.entry(v).or_insert(0) += 1;
    }
    let pooled: Vec<f64> = chains.iter().flatten().map(|&v| v as f64).collect();
    let per_chain = chains
        .iter()
        .map(|c| {
            let mut h = BTreeMap::new();
            for &v in c {
                *h.entry(v).or_insert(0) += 1;
            }
            let vals: Vec<f64> = c.iter().map(|&v| v as f64).collect();
            (mode_of(&h), Moments::of(&vals))
        })
        .collect();
    DiscreteSummary {
        mode: mode_of(&histogram),
        histogram,
        moments: Moments::of(&pooled),
        per_chain,
    }
}

/// Summary of a real-valued scalar such as alpha, nu or eta.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSummary {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Centre of the fullest bin.
    pub mode: f64,
    pub moments: Moments,
    pub per_chain: Vec<Moments>,
    pub psrf: f64,
    /// Fraction of pooled draws above zero.
    pub positive_fraction: f64,
}

pub fn summarize_continuous(chains: &[Vec<f64>], bins: usize) -> ContinuousSummary {
    let pooled: Vec<f64> = chains.iter().flatten().copied().collect();
    let bins = bins.max(1);
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= 0.0 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let mut counts = vec![0; bins];
    for &v in &pooled {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let top = counts
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(b, _)| b);
    let positive = pooled.iter().filter(|&&v| v > 0.0).count();
    ContinuousSummary {
        mode: 0.5 * (edges[top] + edges[top + 1]),
        moments: Moments::of(&pooled),
        per_chain: chains.iter().map(|c| Moments::of(c)).collect(),
        psrf: split_psrf(chains),
        positive_fraction: if pooled.is_empty() { 0.0 } else { positive as f64 / pooled.len() as f64 },
        edges,
        counts,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarReport {
    pub k: DiscreteSummary,
    pub l: DiscreteSummary,
    pub alpha: ContinuousSummary,
    pub nu: ContinuousSummary,
    /// Present for the persistence model only.
    pub eta: Option<ContinuousSummary>,
}

pub fn scalar_summaries(chains: &[ChainOutput]) -> Result<ScalarReport> {
    if chains.is_empty() {
        return Err(Error::InvalidArgument("no chains to summarise".into()));
    }
    let ints = |f: fn(&crate::model::Draw) -> usize| -> Vec<Vec<usize>> {
        chains.iter().map(|c| c.draws.iter().map(f).collect()).collect()
    };
    let reals = |f: fn(&crate::model::Draw) -> f64| -> Vec<Vec<f64>> {
        chains.iter().map(|c| c.draws.iter().map(f).collect()).collect()
    };
    Ok(ScalarReport {
        k: summarize_discrete(&ints(|d| d.k)),
        l: summarize_discrete(&ints(|d| d.l)),
        alpha: summarize_continuous(&reals(|d| d.alpha), 30),
        nu: summarize_continuous(&reals(|d| d.nu), 30),
        eta: (chains[0].model == Model::Dynamic2).then(|| summarize_continuous(&reals(|d| d.eta), 30)),
    })
}

/// Posterior mean of the popularity level of every unit, pooled.
pub fn theta_means(chains: &[ChainOutput]) -> Vec<f64> {
    per_unit_means(chains, |d| d.theta_per_unit())
}

/// Posterior mean of each actor's community rate, pooled.
pub fn beta_means(chains: &[ChainOutput]) -> Vec<f64> {
    per_unit_means(chains, |d| d.beta_per_actor())
}

fn per_unit_means(chains: &[ChainOutput], f: impl Fn(&crate::model::Draw) -> Vec<f64>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for d in chains.iter().flat_map(|c| &c.draws) {
        let v = f(d);
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    sum.into_iter().map(|s| s / count.max(1) as f64).collect()
}

/// Mean of `values` within each cluster of `labels`.
pub fn cluster_means(labels: &[usize], values: &[f64]) -> Vec<f64> {
    groups(labels)
        .iter()
        .map(|g| g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64)
        .collect()
}

/// Posterior of the cluster values with both partitions held fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct RefitReport {
    /// Per community, in first-occurrence order of `fixed_z`.
    pub beta: Vec<Moments>,
    pub community_sizes: Vec<usize>,
    /// Per popularity cluster, in first-occurrence order of `fixed_c`.
    pub theta: Vec<Moments>,
    pub popularity_sizes: Vec<usize>,
    pub eta: Option<Moments>,
    pub draws: usize,
}

/// Reruns the sampler with `z` and `c` fixed, updating utilities, cluster
/// values and `eta`. Labels may be any ids; they are relabelled by first
/// occurrence.
pub fn conditional_refit(
    panel: &TiePanel,
    model: Model,
    hyper: &Hyperparameters,
    fixed_z: &[usize],
    fixed_c: &[usize],
    config: &ChainConfig,
) -> Result<RefitReport> {
    config.validate()?;
    hyper.validate()?;
    let n = panel.n();
    let t = panel.time_points();
    if fixed_z.len() != n {
        return Err(Error::Partition(format!("{} community labels for {n} actors", fixed_z.len())));
    }
    let units = model.popularity_units(n, t);
    if fixed_c.len() != units {
        return Err(Error::Partition(format!(
            "{} popularity labels, expected {units}",
            fixed_c.len()
        )));
    }
    let z_labels = canonical_labels(fixed_z);
    let c_labels = canonical_labels(fixed_c);
    let k = z_labels.iter().max().map_or(0, |m| m + 1);
    let l = c_labels.iter().max().map_or(0, |m| m + 1);

    let mut beta_draws: Vec<Vec<f64>> = vec![Vec::new(); k];
    let mut theta_draws: Vec<Vec<f64>> = vec![Vec::new(); l];
    let mut eta_draws = Vec::new();
    for chain in 0..config.chains {
        let mut rng = RandomSource::new(config.seed, chain as u64);
        let z = CrpState::new(
            z_labels.clone(),
            (0..k).map(|_| normal(&mut rng, 0.0, hyper.var_beta)).collect(),
        )?;
        let c = CrpState::new(
            c_labels.clone(),
            (0..l).map(|_| normal(&mut rng, 0.0, hyper.var_theta)).collect(),
        )?;
        let alpha = Concentration::new(1.0, hyper.a_alpha, hyper.b_alpha)?;
        let nu = Concentration::new(1.0, hyper.a_nu, hyper.b_nu)?;
        let eta = normal(&mut rng, 0.0, hyper.var_eta);
        let mut state = SamplerState::from_parts(model, *hyper, n, t, z, c, alpha, nu, eta)?;
        state.check_panel(panel)?;
        state.step_zeta(&mut rng, panel);
        let draws = sample_draws(
            &mut rng,
            panel,
            &mut state,
            &SweepPlan::fixed_partitions(),
            config.iterations,
            config.burn_in,
            config.thin,
        )?;
        for d in draws {
            for (kk, &b) in d.beta_star.iter().enumerate() {
                beta_draws[kk].push(b);
            }
            for (m, &th) in d.theta_star.iter().enumerate() {
                theta_draws[m].push(th);
            }
            eta_draws.push(d.eta);
        }
    }
    let sizes = |labels: &[usize], k: usize| {
        let mut s = vec![0; k];
        for &l in labels {
            s[l] += 1;
        }
        s
    };
    Ok(RefitReport {
        beta: beta_draws.iter().map(|v| Moments::of(v)).collect(),
        community_sizes: sizes(&z_labels, k),
        theta: theta_draws.iter().map(|v| Moments::of(v)).collect(),
        popularity_sizes: sizes(&c_labels, l),
        eta: (model == Model::Dynamic2).then(|| Moments::of(&eta_draws)),
        draws: eta_draws.len(),
    })
}
