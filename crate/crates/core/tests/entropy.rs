use basinforge::entropy::{cell_entropy, label};
use basinforge::{
    basin_entropy, BasinGrid, EntropyConfig, Error, Method, NodeOutcome, OutcomeKind, Polynomial, RootCatalog,
    ScanConfig, Scheme,
};
use proptest::prelude::*;

fn grid_from(n_re: usize, n_im: usize, n_roots: usize, kinds: Vec<OutcomeKind>) -> BasinGrid {
    BasinGrid {
        config: ScanConfig {
            n_re,
            n_im,
            ..ScanConfig::default()
        },
        scheme: Scheme::new(Method::Newton),
        polynomial: Polynomial::unity(n_roots).unwrap(),
        roots: RootCatalog::unity_roots(n_roots).unwrap(),
        outcomes: kinds
            .into_iter()
            .map(|kind| NodeOutcome { kind, iterations: 1 })
            .collect(),
    }
}

fn kind_of(code: usize, n_roots: usize) -> OutcomeKind {
    match code {
        c if c < n_roots => OutcomeKind::Converged(c),
        c if c == n_roots => OutcomeKind::Diverged,
        c if c == n_roots + 1 => OutcomeKind::Aborted,
        _ => OutcomeKind::NonConverged,
    }
}

/// Straight summation over boxes, counting labels with a nested loop.
fn oracle(g: &BasinGrid, side: usize) -> (f64, f64, usize) {
    let k = g.roots.len();
    let (mut total, mut boxes, mut boundary) = (0.0, 0usize, 0usize);
    for bj in (0..g.n_im()).step_by(side) {
        for bi in (0..g.n_re()).step_by(side) {
            let mut s = 0.0;
            let mut present = 0;
            for l in 0..=k {
                let mut c = 0;
                for j in bj..bj + side {
                    for i in bi..bi + side {
                        if label(g.get(i, j).kind, k) == l {
                            c += 1;
                        }
                    }
                }
                if c > 0 {
                    present += 1;
                    let p = c as f64 / (side * side) as f64;
                    s += p * (1.0 / p).log10();
                }
            }
            boxes += 1;
            if present > 1 {
                boundary += 1;
                total += s;
            }
        }
    }
    let sbb = if boundary > 0 { total / boundary as f64 } else { 0.0 };
    (total / boxes as f64, sbb, boundary)
}

proptest! {
    #[test]
    fn matches_brute_force(
        side in 2usize..6,
        bx in 1usize..5,
        by in 1usize..5,
        n_roots in 1usize..4,
        seed in proptest::collection::vec(0usize..8, 400),
    ) {
        let (n_re, n_im) = ((side * bx).min(20), (side * by).min(20));
        prop_assume!(n_re % side == 0 && n_im % side == 0);
        let kinds = (0..n_re * n_im).map(|k| kind_of(seed[k % seed.len()] % (n_roots + 3), n_roots)).collect();
        let g = grid_from(n_re, n_im, n_roots, kinds);
        let r = basin_entropy(&g, &EntropyConfig { box_nodes: side, ..Default::default() }).unwrap();
        let (sb, sbb, nb) = oracle(&g, side);
        prop_assert!((r.s_b - sb).abs() < 1e-12);
        prop_assert!((r.s_bb - sbb).abs() < 1e-12);
        prop_assert_eq!(r.n_boundary_boxes, nb);
        prop_assert_eq!(r.n_boxes, (n_re / side) * (n_im / side));
        prop_assert!(r.s_b >= 0.0 && r.s_b <= ((n_roots + 1) as f64).log10() + 1e-12);
        if nb > 0 {
            prop_assert!(r.s_bb >= r.s_b);
        }
    }

    #[test]
    fn root_relabelling_leaves_entropy_unchanged(
        shift in 0usize..3,
        seed in proptest::collection::vec(0usize..4, 64),
    ) {
        let kinds: Vec<_> = seed.iter().map(|&c| kind_of(c, 3)).collect();
        let relabelled = kinds
            .iter()
            .map(|&k| match k {
                OutcomeKind::Converged(r) => OutcomeKind::Converged((r + shift) % 3),
                other => other,
            })
            .collect();
        let cfg = EntropyConfig { box_nodes: 4, ..Default::default() };
        let a = basin_entropy(&grid_from(8, 8, 3, kinds), &cfg).unwrap();
        let b = basin_entropy(&grid_from(8, 8, 3, relabelled), &cfg).unwrap();
        prop_assert!((a.s_b - b.s_b).abs() < 1e-15);
        prop_assert!((a.s_bb - b.s_bb).abs() < 1e-15);
    }
}

#[test]
fn failure_kinds_share_one_label() {
    assert_eq!(
        cell_entropy(&[label(OutcomeKind::Diverged, 3), label(OutcomeKind::Aborted, 3)]),
        0.0
    );
}

#[test]
fn single_basin_has_zero_entropy() {
    let g = grid_from(8, 8, 3, vec![OutcomeKind::Converged(1); 64]);
    let r = basin_entropy(&g, &EntropyConfig::default()).unwrap();
    assert_eq!((r.s_b, r.s_bb, r.n_boundary_boxes), (0.0, 0.0, 0));
    assert!(!r.fractal_boundaries);
}

#[test]
fn half_plane_closed_form() {
    // Left half one basin, right half another. A boundary at column 514
    // falls inside box column 128 (nodes 512..515), split 2:2.
    let n = 1024;
    let cut = 514;
    let kinds = (0..n * n)
        .map(|k| {
            if k % n < cut {
                OutcomeKind::Converged(0)
            } else {
                OutcomeKind::Converged(1)
            }
        })
        .collect();
    let g = grid_from(n, n, 2, kinds);
    let r = basin_entropy(&g, &EntropyConfig::default()).unwrap();
    let boxes = (n / 4) * (n / 4);
    let straddling = n / 4;
    assert_eq!(r.n_boxes, boxes);
    assert_eq!(r.n_boundary_boxes, straddling);
    let per_box = std::f64::consts::LOG10_2;
    assert!((r.s_b - straddling as f64 * per_box / boxes as f64).abs() < 1e-15);
    assert!((r.s_bb - per_box).abs() < 1e-15);
    assert!(!r.fractal_boundaries);
}

#[test]
fn half_plane_on_five_node_boxes() {
    // 1000 nodes per side tile exactly into 5-node boxes; a cut at column 503
    // leaves 3:2 splits in box column 100.
    let n = 1000;
    let kinds = (0..n * n)
        .map(|k| {
            if k % n < 503 {
                OutcomeKind::Converged(0)
            } else {
                OutcomeKind::Converged(1)
            }
        })
        .collect();
    let g = grid_from(n, n, 2, kinds);
    let r = basin_entropy(
        &g,
        &EntropyConfig {
            box_nodes: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let straddle = cell_entropy(&[0, 0, 0, 1, 1]);
    assert_eq!(r.n_boundary_boxes, 200);
    assert!((r.s_b - 200.0 * straddle / 40_000.0).abs() < 1e-15);
    assert!((r.s_bb - straddle).abs() < 1e-15);
}

#[test]
fn indivisible_grids_are_rejected() {
    let g = grid_from(10, 10, 2, vec![OutcomeKind::Converged(0); 100]);
    let err = basin_entropy(
        &g,
        &EntropyConfig {
            box_nodes: 4,
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(
        err,
        Error::IndivisibleGrid {
            n_re: 10,
            n_im: 10,
            box_nodes: 4
        }
    ));
    assert!(basin_entropy(
        &g,
        &EntropyConfig {
            box_nodes: 1,
            ..Default::default()
        }
    )
    .is_err());
}
