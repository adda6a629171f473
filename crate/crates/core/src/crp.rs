//! Chinese-restaurant-process bookkeeping and concentration updates.
//!
//! Cluster ids are 0-based and contiguous at all times: removing an emptied
//! cluster moves the last cluster into its slot. [`CrpState::canonicalize`]
//! relabels by first occurrence, which the samplers do once per sweep.

use rand::Rng;

use crate::error::{Error, Result};
use crate::random::{normal, sample_beta, sample_gamma};

/// Marker for a unit that has been detached and awaits a new draw.
pub const PENDING: usize = usize::MAX;

/// Cluster assignments of a set of units plus one real value per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct CrpState {
    assignments: Vec<usize>,
    values: Vec<f64>,
    counts: Vec<usize>,
}

impl CrpState {
    /// Builds a state from 0-based labels. Labels must cover `0..values.len()`
    /// with every cluster occupied.
    pub fn new(assignments: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let mut counts = vec![0usize; values.len()];
        for &a in &assignments {
            if a >= values.len() {
                return Err(Error::Partition(format!(
                    "label {} exceeds the {} cluster values",
                    a + 1,
                    values.len()
                )));
            }
            counts[a] += 1;
        }
        if let Some(k) = counts.iter().position(|&c| c == 0) {
            return Err(Error::Partition(format!("cluster {} is empty", k + 1)));
        }
        Ok(CrpState {
            assignments,
            values,
            counts,
        })
    }

    /// Sequential CRP draw over `n_units` with concentration `conc`; each new
    /// cluster takes its value from `base`.
    pub fn from_prior<R: Rng + ?Sized>(
        rng: &mut R,
        n_units: usize,
        conc: f64,
        mut base: impl FnMut(&mut R) -> f64,
    ) -> Self {
        let mut state = CrpState {
            assignments: Vec::with_capacity(n_units),
            values: Vec::new(),
            counts: Vec::new(),
        };
        for i in 0..n_units {
            let u = rng.random::<f64>() * (i as f64 + conc);
            let mut acc = 0.0;
            let mut chosen = None;
            for (k, &c) in state.counts.iter().enumerate() {
                acc += c as f64;
                if u < acc {
                    chosen = Some(k);
                    break;
                }
            }
            match chosen {
                Some(k) => {
                    state.assignments.push(k);
                    state.counts[k] += 1;
                }
                None => {
                    let v = base(rng);
                    state.assignments.push(state.values.len());
                    state.values.push(v);
                    state.counts.push(1);
                }
            }
        }
        state
    }

    pub fn n_units(&self) -> usize {
        self.assignments.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.values.len()
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    #[inline]
    pub fn assignment(&self, unit: usize) -> usize {
        self.assignments[unit]
    }

    /// Value of the cluster holding `unit`.
    #[inline]
    pub fn value_of(&self, unit: usize) -> f64 {
        self.values[self.assignments[unit]]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Occupancy of each live cluster excluding `unit`, and the weight of a
    /// new cluster. The caller normalises.
    pub fn prior_weights(&self, unit: usize, conc: &Concentration) -> (Vec<f64>, f64) {
        let own = self.assignments[unit];
        let weights = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| if k == own { (c - 1) as f64 } else { c as f64 })
            .collect();
        (weights, conc.value)
    }

    fn drop_cluster(&mut self, k: usize) {
        let last = self.values.len() - 1;
        self.values.swap_remove(k);
        self.counts.swap_remove(k);
        if k != last {
            for a in self.assignments.iter_mut() {
                if *a == last {
                    *a = k;
                }
            }
        }
    }

    /// Takes `unit` out of its cluster, deleting the cluster if it empties.
    /// Returns whether a cluster was deleted. The unit is left [`PENDING`].
    pub fn detach(&mut self, unit: usize) -> bool {
        let k = self.assignments[unit];
        debug_assert_ne!(k, PENDING);
        self.assignments[unit] = PENDING;
        self.counts[k] -= 1;
        if self.counts[k] == 0 {
            self.drop_cluster(k);
            true
        } else {
            false
        }
    }

    /// Deletes the cluster of `unit` if the unit is its only member, leaving
    /// the unit pending. Otherwise nothing changes.
    pub fn remove_if_singleton(&mut self, unit: usize) -> bool {
        let k = self.assignments[unit];
        if k != PENDING && self.counts[k] == 1 {
            self.detach(unit)
        } else {
            false
        }
    }

    pub fn attach(&mut self, unit: usize, k: usize) {
        debug_assert_eq!(self.assignments[unit], PENDING);
        self.assignments[unit] = k;
        self.counts[k] += 1;
    }

    /// Opens a new cluster holding only `unit`; returns its id.
    pub fn attach_new(&mut self, unit: usize, value: f64) -> usize {
        debug_assert_eq!(self.assignments[unit], PENDING);
        let k = self.values.len();
        self.values.push(value);
        self.counts.push(1);
        self.assignments[unit] = k;
        k
    }

    /// Relabels clusters in order of first occurrence.
    pub fn canonicalize(&mut self) {
        let mut map = vec![PENDING; self.values.len()];
        let mut next = 0;
        for &a in &self.assignments {
            if a != PENDING && map[a] == PENDING {
                map[a] = next;
                next += 1;
            }
        }
        if map.iter().enumerate().all(|(k, &m)| k == m) {
            return;
        }
        let mut values = vec![0.0; self.values.len()];
        let mut counts = vec![0; self.values.len()];
        for k in 0..self.values.len() {
            values[map[k]] = self.values[k];
            counts[map[k]] = self.counts[k];
        }
        for a in self.assignments.iter_mut() {
            if *a != PENDING {
                *a = map[*a];
            }
        }
        self.values = values;
        self.counts = counts;
    }

    /// Recounts occupancy from the assignments; used to check invariants.
    pub fn recount(&self) -> Vec<usize> {
        let mut counts = vec![0; self.values.len()];
        for &a in &self.assignments {
            if a != PENDING {
                counts[a] += 1;
            }
        }
        counts
    }
}

/// A DP concentration parameter with its Gamma(shape, rate) prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Concentration {
    pub value: f64,
    pub prior_shape: f64,
    pub prior_rate: f64,
}

impl Concentration {
    pub fn new(value: f64, prior_shape: f64, prior_rate: f64) -> Result<Self> {
        if !(value > 0.0 && prior_shape > 0.0 && prior_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "concentration {value} and its prior Gamma({prior_shape}, {prior_rate}) must be positive"
            )));
        }
        Ok(Concentration {
            value,
            prior_shape,
            prior_rate,
        })
    }
}

/// Two-component gamma mixture from which a concentration is redrawn, given
/// the auxiliary draw `gamma_aux ~ Beta(value + 1, n_units)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMixture {
    /// Weight of the `shape_high` component.
    pub weight_high: f64,
    pub shape_high: f64,
    pub shape_low: f64,
    pub rate: f64,
}

impl GammaMixture {
    pub fn odds(&self) -> f64 {
        self.weight_high / (1.0 - self.weight_high)
    }
}

pub fn concentration_mixture(
    conc: &Concentration,
    k_live: usize,
    n_units: usize,
    gamma_aux: f64,
) -> GammaMixture {
    let rate = conc.prior_rate - gamma_aux.ln();
    let shape_low = conc.prior_shape + k_live as f64 - 1.0;
    let odds = shape_low / (n_units as f64 * rate);
    GammaMixture {
        weight_high: odds / (1.0 + odds),
        shape_high: shape_low + 1.0,
        shape_low,
        rate,
    }
}

/// Auxiliary-variable update of a concentration given `k_live` clusters
/// among `n_units` units.
pub fn update_concentration<R: Rng + ?Sized>(
    rng: &mut R,
    conc: &Concentration,
    k_live: usize,
    n_units: usize,
) -> Result<Concentration> {
    if k_live == 0 || n_units == 0 {
        return Err(Error::InvalidArgument(format!(
            "concentration update needs k >= 1 and n >= 1, got k={k_live} n={n_units}"
        )));
    }
    let gamma_aux = sample_beta(rng, conc.value + 1.0, n_units as f64)?.max(f64::MIN_POSITIVE);
    let mix = concentration_mixture(conc, k_live, n_units, gamma_aux);
    let shape = if rng.random::<f64>() < mix.weight_high {
        mix.shape_high
    } else {
        mix.shape_low
    };
    let value = sample_gamma(rng, shape, mix.rate)?.max(f64::MIN_POSITIVE);
    Ok(Concentration { value, ..*conc })
}

/// Draws a concentration from its gamma prior.
pub(crate) fn concentration_from_prior<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> Result<Concentration> {
    let value = sample_gamma(rng, shape, rate)?.max(f64::MIN_POSITIVE);
    Concentration::new(value, shape, rate)
}

pub(crate) fn base_normal<R: Rng + ?Sized>(var: f64) -> impl FnMut(&mut R) -> f64 {
    move |rng: &mut R| normal(rng, 0.0, var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RandomSource;

    fn state(labels: &[usize]) -> CrpState {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        CrpState::new(labels.to_vec(), (0..k).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn prior_weights_exclude_the_unit() {
        let s = state(&[0, 0, 1]);
        let conc = Concentration::new(0.7, 1.0, 1.0).unwrap();
        let (w, new) = s.prior_weights(0, &conc);
        assert_eq!(w, vec![1.0, 1.0]);
        assert_eq!(new, 0.7);
        let (w, _) = s.prior_weights(2, &conc);
        assert_eq!(w, vec![2.0, 0.0]);
    }

    #[test]
    fn two_units_one_cluster() {
        let s = state(&[0, 0]);
        let alpha = Concentration::new(2.5, 5.0, 5.0).unwrap();
        assert_eq!(s.prior_weights(1, &alpha), (vec![1.0], 2.5));
    }

    #[test]
    fn remove_singleton_and_compact() {
        let mut s = state(&[0, 0, 1]);
        assert!(s.remove_if_singleton(2));
        assert_eq!(s.num_clusters(), 1);
        assert_eq!(s.assignment(2), PENDING);

        let mut s = state(&[0, 0, 1]);
        assert!(!s.remove_if_singleton(0));
        assert_eq!(s, state(&[0, 0, 1]));

        let mut s = state(&[0]);
        assert!(s.remove_if_singleton(0));
        assert_eq!(s.num_clusters(), 0);
        s.attach_new(0, 1.5);
        assert_eq!(s.num_clusters(), 1);
    }

    #[test]
    fn swap_remove_relabels_last_cluster() {
        let mut s = state(&[0, 1, 2, 2]);
        assert!(s.detach(0));
        assert_eq!(s.values(), &[2.0, 1.0]);
        assert_eq!(s.assignments(), &[PENDING, 1, 0, 0]);
        assert_eq!(s.recount(), s.counts().to_vec());
    }

    #[test]
    fn canonicalize_orders_by_first_occurrence() {
        let mut s = CrpState::new(vec![2, 0, 2, 1], vec![10.0, 11.0, 12.0]).unwrap();
        s.canonicalize();
        assert_eq!(s.assignments(), &[0, 1, 0, 2]);
        assert_eq!(s.values(), &[12.0, 10.0, 11.0]);
        assert_eq!(s.counts(), &[2, 1, 1]);
    }

    #[test]
    fn new_rejects_gaps() {
        assert!(CrpState::new(vec![0, 2], vec![0.0, 0.0, 0.0]).is_err());
        assert!(CrpState::new(vec![0, 3], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn mixture_odds_with_pinned_auxiliary() {
        let conc = Concentration::new(1.0, 5.0, 5.0).unwrap();
        let mix = concentration_mixture(&conc, 4, 34, 0.5);
        let odds = 8.0 / (34.0 * (5.0 - 0.5f64.ln()));
        assert!((mix.odds() - odds).abs() < 1e-12);
        assert!((odds - 0.04133).abs() < 5e-5);
        assert!((mix.weight_high - 0.0397).abs() < 5e-4);
        assert_eq!(mix.shape_high, 9.0);
        assert!((mix.rate - 5.693).abs() < 5e-4);
    }

    #[test]
    fn mixture_limit_as_auxiliary_tends_to_one() {
        let conc = Concentration::new(1.0, 5.0, 5.0).unwrap();
        let mix = concentration_mixture(&conc, 1, 34, 1.0 - 1e-15);
        assert!((mix.odds() - 5.0 / (34.0 * 5.0)).abs() < 1e-9);
        assert_eq!(mix.shape_low, 5.0);
        assert!((mix.rate - 5.0).abs() < 1e-9);
    }

    #[test]
    fn update_is_positive_and_finite() {
        let mut rng = RandomSource::new(11, 0);
        let mut conc = Concentration::new(0.01, 0.5, 0.5).unwrap();
        for k in 1..50 {
            conc = update_concentration(&mut rng, &conc, k, 50).unwrap();
            assert!(conc.value > 0.0 && conc.value.is_finite());
        }
        assert!(update_concentration(&mut rng, &conc, 0, 5).is_err());
    }
}
