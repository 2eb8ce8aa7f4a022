//! Iteration histograms, Laplace tail fits and differential entropy.

use std::collections::BTreeMap;
use std::io::Write;

use crate::classifier::{BasinGrid, OutcomeKind};
use crate::error::{Error, Result};

/// Smallest diversity a fit may report.
pub const MIN_DIVERSITY: f64 = 1e-3;

/// Number of converged nodes per exact iteration count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IterationHistogram {
    pub counts: BTreeMap<u32, u64>,
    /// All nodes of the grid, converged or not.
    pub total_nodes: u64,
    pub converged_nodes: u64,
}

impl IterationHistogram {
    /// Builds a histogram from raw iteration counts of converged nodes plus
    /// the number of nodes that did not converge.
    pub fn from_samples<I: IntoIterator<Item = u32>>(converged: I, failed: u64) -> Self {
        let mut h = Self::default();
        for n in converged {
            *h.counts.entry(n).or_insert(0) += 1;
            h.converged_nodes += 1;
        }
        h.total_nodes = h.converged_nodes + failed;
        h
    }

    /// `P(N)`: fraction of all nodes converging after exactly `n` iterations.
    pub fn probability(&self, n: u32) -> f64 {
        if self.total_nodes == 0 {
            return 0.0;
        }
        self.counts.get(&n).copied().unwrap_or(0) as f64 / self.total_nodes as f64
    }

    pub fn converged_fraction(&self) -> f64 {
        if self.total_nodes == 0 {
            0.0
        } else {
            self.converged_nodes as f64 / self.total_nodes as f64
        }
    }

    /// Writes `N,count,P` rows in increasing `N`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "N,count,P")?;
        for (&n, &c) in &self.counts {
            writeln!(out, "{n},{c},{}", self.probability(n))?;
        }
        Ok(())
    }
}

pub fn histogram(grid: &BasinGrid) -> IterationHistogram {
    let mut h = IterationHistogram {
        total_nodes: grid.outcomes.len() as u64,
        ..Default::default()
    };
    for o in &grid.outcomes {
        if let OutcomeKind::Converged(_) = o.kind {
            *h.counts.entry(o.iterations).or_insert(0) += 1;
            h.converged_nodes += 1;
        }
    }
    h
}

/// Mode of the histogram; ties go to the smaller `N`.
pub fn most_probable_n(h: &IterationHistogram) -> Result<u32> {
    let mut best: Option<(u32, u64)> = None;
    for (&n, &c) in &h.counts {
        if c > 0 && best.is_none_or(|(_, bc)| c > bc) {
            best = Some((n, c));
        }
    }
    best.map(|(n, _)| n).ok_or(Error::NoConvergedNodes)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceFit {
    pub location_a: u32,
    pub diversity_b: f64,
    pub n_star: u32,
}

impl LaplaceFit {
    /// Laplace density at `n`.
    pub fn pdf(&self, n: u32) -> f64 {
        laplace_pdf(f64::from(n), f64::from(self.location_a), self.diversity_b)
    }
}

pub fn laplace_pdf(x: f64, a: f64, b: f64) -> f64 {
    (-(x - a).abs() / b).exp() / (2.0 * b)
}

/// Maximum-likelihood diversity of the one-sided exponential branch: the
/// mean excess `N - a` over nodes with `N >= a`, floored at [`MIN_DIVERSITY`].
fn tail_diversity(h: &IterationHistogram, a: u32) -> Option<f64> {
    let (mut nodes, mut excess) = (0u64, 0f64);
    for (&n, &c) in h.counts.range(a..) {
        nodes += c;
        excess += (n - a) as f64 * c as f64;
    }
    if nodes == 0 {
        return None;
    }
    Some((excess / nodes as f64).max(MIN_DIVERSITY))
}

/// Fits the `N >= a` branch of a Laplace density to the histogram tail.
///
/// The location is either `N*` or `N* + 1`. For each candidate the diversity
/// is the maximum-likelihood estimate over nodes with `N >= a`; the candidate
/// whose density has the smaller squared error against `P(N)` over
/// `N >= N*` wins.
pub fn fit_laplace_tail(h: &IterationHistogram) -> Result<LaplaceFit> {
    let n_star = most_probable_n(h)?;
    let mut best: Option<(f64, LaplaceFit)> = None;
    for a in [n_star, n_star + 1] {
        let Some(b) = tail_diversity(h, a) else { continue };
        let fit = LaplaceFit {
            location_a: a,
            diversity_b: b,
            n_star,
        };
        let sse: f64 = h
            .counts
            .range(n_star..)
            .map(|(&n, _)| (fit.pdf(n) - h.probability(n)).powi(2))
            .sum();
        if best.is_none_or(|(s, _)| sse < s) {
            best = Some((sse, fit));
        }
    }
    best.map(|(_, f)| f).ok_or(Error::EmptyTail)
}

/// `1 + ln(2b)`.
pub fn differential_entropy(fit: &LaplaceFit) -> f64 {
    1.0 + (2.0 * fit.diversity_b).ln()
}

/// Fraction of all nodes that converged within `n` iterations.
pub fn convergence_cdf(h: &IterationHistogram, n: u32) -> f64 {
    if h.total_nodes == 0 {
        return 0.0;
    }
    let within: u64 = h.counts.range(..=n).map(|(_, c)| c).sum();
    within as f64 / h.total_nodes as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bin() {
        let h = IterationHistogram::from_samples([3, 3, 3, 3], 0);
        assert_eq!(h.counts, BTreeMap::from([(3, 4)]));
        assert_eq!(h.probability(3), 1.0);
        assert_eq!(most_probable_n(&h).unwrap(), 3);
    }

    #[test]
    fn mode_tie_goes_low() {
        let samples = std::iter::repeat_n(5, 10)
            .chain(std::iter::repeat_n(6, 10))
            .chain([7, 7, 7]);
        let h = IterationHistogram::from_samples(samples, 0);
        assert_eq!(most_probable_n(&h).unwrap(), 5);
    }

    #[test]
    fn empty_histograms_error() {
        let h = IterationHistogram::from_samples([], 10);
        assert!(matches!(most_probable_n(&h), Err(Error::NoConvergedNodes)));
        assert!(fit_laplace_tail(&h).is_err());
        assert_eq!(convergence_cdf(&h, 100), 0.0);
    }

    #[test]
    fn failed_nodes_only_count_in_total() {
        let h = IterationHistogram::from_samples([2, 3, 3], 1);
        assert_eq!(h.total_nodes, 4);
        assert_eq!(h.probability(3), 0.5);
        assert_eq!(convergence_cdf(&h, 500), 0.75);
        assert_eq!(convergence_cdf(&h, 2), 0.25);
    }

    #[test]
    fn point_mass_floors_diversity() {
        let h = IterationHistogram::from_samples([4; 10], 0);
        let fit = fit_laplace_tail(&h).unwrap();
        assert_eq!(fit.n_star, 4);
        assert_eq!(fit.location_a, 4);
        assert_eq!(fit.diversity_b, MIN_DIVERSITY);
    }

    #[test]
    fn differential_entropy_values() {
        let h = |b| {
            differential_entropy(&LaplaceFit {
                location_a: 0,
                diversity_b: b,
                n_star: 0,
            })
        };
        assert!((h(0.5) - 1.0).abs() < 1e-15);
        assert!((h(1.99) - 2.381_281_819_296).abs() < 1e-9);
        assert!((h(11.14) - 4.103_689_415_059).abs() < 1e-9);
    }
}
