//! Basin entropy and boundary basin entropy over a box tiling of a grid.

use crate::classifier::{BasinGrid, OutcomeKind};
use crate::error::{Error, Result};

/// Nodes per box side used unless configured otherwise.
pub const DEFAULT_BOX_NODES: usize = 4;

/// `log10(2)`, the threshold of the log-2 fractality criterion.
pub const LOG10_2: f64 = std::f64::consts::LOG10_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyConfig {
    pub box_nodes: usize,
    /// Boundaries count as fractal when `S_bb` exceeds this value.
    pub fractal_threshold: f64,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            box_nodes: DEFAULT_BOX_NODES,
            fractal_threshold: LOG10_2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyReport {
    pub s_b: f64,
    /// Zero when no box straddles a boundary.
    pub s_bb: f64,
    pub n_boxes: usize,
    pub n_boundary_boxes: usize,
    pub fractal_boundaries: bool,
    pub box_nodes: usize,
}

/// Entropy label of an outcome: the root index, or `n_roots` for every
/// non-converged kind.
pub fn label(kind: OutcomeKind, n_roots: usize) -> usize {
    match kind {
        OutcomeKind::Converged(r) => r,
        _ => n_roots,
    }
}

/// Gibbs entropy `sum_j p_j log10(1/p_j)` of a multiset of labels.
pub fn cell_entropy(labels: &[usize]) -> f64 {
    let mut tally: Vec<(usize, usize)> = Vec::new();
    for &l in labels {
        match tally.iter_mut().find(|(k, _)| *k == l) {
            Some((_, c)) => *c += 1,
            None => tally.push((l, 1)),
        }
    }
    tally.sort_unstable();
    entropy_of_counts(tally.iter().map(|&(_, c)| c), labels.len())
}

fn entropy_of_counts(counts: impl Iterator<Item = usize>, size: usize) -> f64 {
    let n = size as f64;
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log10()
        })
        .sum()
}

/// Tiles the grid into `box_nodes x box_nodes` boxes and averages their
/// entropies over all boxes (`S_b`) and over boxes holding more than one
/// label (`S_bb`).
pub fn basin_entropy(grid: &BasinGrid, cfg: &EntropyConfig) -> Result<EntropyReport> {
    let (n_re, n_im, side) = (grid.n_re(), grid.n_im(), cfg.box_nodes);
    if side < 2 || n_re % side != 0 || n_im % side != 0 {
        return Err(Error::IndivisibleGrid {
            n_re,
            n_im,
            box_nodes: side,
        });
    }
    let n_labels = grid.roots.len() + 1;
    let mut counts = vec![0usize; n_labels];
    let (mut total, mut n_boxes, mut n_boundary) = (0.0, 0usize, 0usize);
    for bj in 0..n_im / side {
        for bi in 0..n_re / side {
            counts.iter_mut().for_each(|c| *c = 0);
            for j in bj * side..(bj + 1) * side {
                for i in bi * side..(bi + 1) * side {
                    counts[label(grid.get(i, j).kind, grid.roots.len())] += 1;
                }
            }
            n_boxes += 1;
            if counts.iter().filter(|&&c| c > 0).count() > 1 {
                n_boundary += 1;
                total += entropy_of_counts(counts.iter().copied(), side * side);
            }
        }
    }
    let s_b = total / n_boxes as f64;
    let s_bb = if n_boundary > 0 { total / n_boundary as f64 } else { 0.0 };
    Ok(EntropyReport {
        s_b,
        s_bb,
        n_boxes,
        n_boundary_boxes: n_boundary,
        fractal_boundaries: s_bb > cfg.fractal_threshold,
        box_nodes: side,
    })
}
