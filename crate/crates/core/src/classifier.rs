//! Grid scans of the complex plane and per-node outcome classification.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polynomial::{Polynomial, RootCatalog};
use crate::schemes::{Scheme, StepStatus};

/// Rectangular region of the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }
}

impl Default for Window {
    fn default() -> Self {
        Self::new(-3.0, 3.0, -3.0, 3.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub window: Window,
    pub n_re: usize,
    pub n_im: usize,
    pub n_max: u32,
    /// Per-component distance to a root that counts as converged.
    pub accuracy: f64,
    pub divergence_radius: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            window: Window::default(),
            n_re: 1024,
            n_im: 1024,
            n_max: 500,
            accuracy: 1e-15,
            divergence_radius: 1e10,
        }
    }
}

impl ScanConfig {
    /// Default configuration on a square `n x n` grid.
    pub fn square(n: usize) -> Self {
        Self {
            n_re: n,
            n_im: n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if ![w.re_min, w.re_max, w.im_min, w.im_max].iter().all(|v| v.is_finite()) {
            return bad("window bounds must be finite");
        }
        if !(w.re_min < w.re_max && w.im_min < w.im_max) {
            return bad("window must satisfy re_min < re_max and im_min < im_max");
        }
        if self.n_re < 2 || self.n_im < 2 {
            return bad("grid needs at least 2 nodes per axis");
        }
        if self.n_max == 0 || self.n_max > u32::from(u16::MAX) {
            return bad("n_max must lie in 1..=65535");
        }
        if !(self.accuracy > 0.0 && self.accuracy.is_finite()) {
            return bad("accuracy must be positive");
        }
        if self.divergence_radius.is_nan() || self.divergence_radius <= 0.0 {
            return bad("divergence radius must be positive");
        }
        Ok(())
    }

    /// Real coordinate of column `i`; both window edges are nodes.
    pub fn re_at(&self, i: usize) -> f64 {
        lerp(self.window.re_min, self.window.re_max, i, self.n_re)
    }

    /// Imaginary coordinate of row `j`.
    pub fn im_at(&self, j: usize) -> f64 {
        lerp(self.window.im_min, self.window.im_max, j, self.n_im)
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re_at(i), self.im_at(j))
    }
}

// weights are exact integers, so a window symmetric about zero yields
// coordinates that are exact negatives of each other
fn lerp(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    let last = (n - 1) as f64;
    (lo * (last - k as f64) + hi * k as f64) / last
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    Converged(usize),
    Diverged,
    Aborted,
    NonConverged,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeOutcome {
    pub kind: OutcomeKind,
    pub iterations: u32,
}

impl NodeOutcome {
    pub fn root(&self) -> Option<usize> {
        match self.kind {
            OutcomeKind::Converged(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self.kind, OutcomeKind::Converged(_))
    }
}

/// Iterates `scheme` from `z0` until a terminal predicate holds.
///
/// A step that hits a tiny denominator aborts the run and a non-finite step
/// counts as divergence. Otherwise the new iterate is tested for convergence
/// to a catalog root, then against the divergence radius, and the run ends
/// as non-converged once the iteration budget is spent.
pub fn classify_node(
    z0: Complex64,
    scheme: &Scheme,
    p: &Polynomial,
    roots: &RootCatalog,
    cfg: &ScanConfig,
) -> NodeOutcome {
    if let Some(r) = roots.locate(z0, cfg.accuracy) {
        return NodeOutcome {
            kind: OutcomeKind::Converged(r),
            iterations: 0,
        };
    }
    let mut z = z0;
    for k in 1..=cfg.n_max {
        let step = scheme.step(z, p);
        let kind = match step.status {
            StepStatus::TinyDenominator => Some(OutcomeKind::Aborted),
            StepStatus::NonFinite => Some(OutcomeKind::Diverged),
            StepStatus::Ok => {
                z = step.next;
                if let Some(r) = roots.locate(z, cfg.accuracy) {
                    Some(OutcomeKind::Converged(r))
                } else if z.norm() > cfg.divergence_radius {
                    Some(OutcomeKind::Diverged)
                } else {
                    None
                }
            }
        };
        if let Some(kind) = kind {
            return NodeOutcome { kind, iterations: k };
        }
    }
    NodeOutcome {
        kind: OutcomeKind::NonConverged,
        iterations: cfg.n_max,
    }
}

/// Outcome tallies over a grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub per_root: Vec<u64>,
    pub diverged: u64,
    pub aborted: u64,
    pub nonconverged: u64,
}

impl OutcomeCounts {
    pub fn converged(&self) -> u64 {
        self.per_root.iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.converged() + self.diverged + self.aborted + self.nonconverged
    }
}

/// The classified lattice. Node `(i, j)` (real index `i`, imaginary index `j`)
/// is stored at `j * n_re + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasinGrid {
    pub config: ScanConfig,
    pub scheme: Scheme,
    pub polynomial: Polynomial,
    pub roots: RootCatalog,
    pub outcomes: Vec<NodeOutcome>,
}

/// Classifies every node of the grid. Rows are processed in parallel and the
/// lattice is assembled by index, so the result does not depend on the
/// number of worker threads.
pub fn scan_grid(scheme: &Scheme, p: &Polynomial, roots: &RootCatalog, cfg: &ScanConfig) -> Result<BasinGrid> {
    cfg.validate()?;
    if p.degree() == 0 {
        return Err(Error::InvalidPolynomial("scan needs degree >= 1".into()));
    }
    let mut outcomes = vec![
        NodeOutcome {
            kind: OutcomeKind::NonConverged,
            iterations: 0
        };
        cfg.n_re * cfg.n_im
    ];
    outcomes.par_chunks_mut(cfg.n_re).enumerate().for_each(|(j, row)| {
        let im = cfg.im_at(j);
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = classify_node(Complex64::new(cfg.re_at(i), im), scheme, p, roots, cfg);
        }
    });
    Ok(BasinGrid {
        config: *cfg,
        scheme: *scheme,
        polynomial: p.clone(),
        roots: roots.clone(),
        outcomes,
    })
}

const MAGIC: &[u8; 4] = b"BSGR";
const FORMAT_VERSION: u32 = 1;
const TAG_DIVERGED: u8 = 252;
const TAG_ABORTED: u8 = 253;
const TAG_NONCONVERGED: u8 = 254;

impl BasinGrid {
    pub fn n_re(&self) -> usize {
        self.config.n_re
    }

    pub fn n_im(&self) -> usize {
        self.config.n_im
    }

    pub fn get(&self, i: usize, j: usize) -> NodeOutcome {
        self.outcomes[j * self.config.n_re + i]
    }

    pub fn counts(&self) -> OutcomeCounts {
        let mut c = OutcomeCounts {
            per_root: vec![0; self.roots.len()],
            ..Default::default()
        };
        for o in &self.outcomes {
            match o.kind {
                OutcomeKind::Converged(r) => c.per_root[r] += 1,
                OutcomeKind::Diverged => c.diverged += 1,
                OutcomeKind::Aborted => c.aborted += 1,
                OutcomeKind::NonConverged => c.nonconverged += 1,
            }
        }
        c
    }

    /// Compact binary form: `BSGR`, version, `n_re`, `n_im` as little-endian
    /// `u32`, then per node a kind tag byte and a little-endian `u16`
    /// iteration count.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        if self.roots.len() > usize::from(TAG_DIVERGED) {
            return Err(Error::Format("too many roots for the binary format".into()));
        }
        let mut buf = Vec::with_capacity(16 + 3 * self.outcomes.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n_re() as u32).to_le_bytes());
        buf.extend_from_slice(&(self.n_im() as u32).to_le_bytes());
        for o in &self.outcomes {
            let tag = match o.kind {
                OutcomeKind::Converged(r) => r as u8,
                OutcomeKind::Diverged => TAG_DIVERGED,
                OutcomeKind::Aborted => TAG_ABORTED,
                OutcomeKind::NonConverged => TAG_NONCONVERGED,
            };
            buf.push(tag);
            let it = u16::try_from(o.iterations).unwrap_or(u16::MAX);
            buf.extend_from_slice(&it.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// CSV with columns `i,j,re,im,kind,root_index,iterations`; `root_index`
    /// is empty for nodes that did not converge.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = std::io::BufWriter::new(out);
        writeln!(out, "i,j,re,im,kind,root_index,iterations")?;
        for j in 0..self.n_im() {
            for i in 0..self.n_re() {
                let o = self.get(i, j);
                let (kind, root) = match o.kind {
                    OutcomeKind::Converged(r) => ("converged", r.to_string()),
                    OutcomeKind::Diverged => ("diverged", String::new()),
                    OutcomeKind::Aborted => ("aborted", String::new()),
                    OutcomeKind::NonConverged => ("nonconverged", String::new()),
                };
                writeln!(
                    out,
                    "{i},{j},{},{},{kind},{root},{}",
                    self.config.re_at(i),
                    self.config.im_at(j),
                    o.iterations
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Lattice decoded from the binary format.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodedGrid {
    pub n_re: usize,
    pub n_im: usize,
    pub outcomes: Vec<NodeOutcome>,
}

pub fn read_binary<R: Read>(mut input: R) -> Result<DecodedGrid> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing BSGR header".into()));
    }
    let word = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().expect("4 bytes"));
    if word(4) != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported version {}", word(4))));
    }
    let (n_re, n_im) = (word(8) as usize, word(12) as usize);
    let body = &bytes[16..];
    if body.len() != 3 * n_re * n_im {
        return Err(Error::Format(format!(
            "expected {} node bytes, found {}",
            3 * n_re * n_im,
            body.len()
        )));
    }
    let outcomes = body
        .chunks_exact(3)
        .map(|c| {
            let kind = match c[0] {
                TAG_DIVERGED => OutcomeKind::Diverged,
                TAG_ABORTED => OutcomeKind::Aborted,
                TAG_NONCONVERGED => OutcomeKind::NonConverged,
                255 => return Err(Error::Format("reserved kind tag 255".into())),
                r => OutcomeKind::Converged(usize::from(r)),
            };
            Ok(NodeOutcome {
                kind,
                iterations: u32::from(u16::from_le_bytes([c[1], c[2]])),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecodedGrid { n_re, n_im, outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Method;

    fn f1() -> (Polynomial, RootCatalog) {
        (Polynomial::unity(3).unwrap(), RootCatalog::unity_roots(3).unwrap())
    }

    #[test]
    fn node_on_root_converges_immediately() {
        let (p, roots) = f1();
        let cfg = ScanConfig::default();
        for m in Method::ALL {
            let o = classify_node(Complex64::new(1.0, 0.0), &m.into(), &p, &roots, &cfg);
            assert_eq!(
                o,
                NodeOutcome {
                    kind: OutcomeKind::Converged(0),
                    iterations: 0
                }
            );
        }
    }

    #[test]
    fn newton_from_two() {
        let (p, roots) = f1();
        let o = classify_node(
            Complex64::new(2.0, 0.0),
            &Method::Newton.into(),
            &p,
            &roots,
            &ScanConfig::default(),
        );
        assert_eq!(o.kind, OutcomeKind::Converged(0));
        assert!((5..=8).contains(&o.iterations), "{o:?}");
    }

    #[test]
    fn newton_at_critical_point_aborts() {
        let (p, roots) = f1();
        let o = classify_node(
            Complex64::new(0.0, 0.0),
            &Method::Newton.into(),
            &p,
            &roots,
            &ScanConfig::default(),
        );
        assert_eq!(
            o,
            NodeOutcome {
                kind: OutcomeKind::Aborted,
                iterations: 1
            }
        );
    }

    #[test]
    fn budget_exhaustion_is_nonconverged() {
        let (p, roots) = f1();
        let cfg = ScanConfig {
            n_max: 2,
            ..ScanConfig::default()
        };
        let o = classify_node(Complex64::new(2.5, 1.0), &Method::Newton.into(), &p, &roots, &cfg);
        assert_eq!(
            o,
            NodeOutcome {
                kind: OutcomeKind::NonConverged,
                iterations: 2
            }
        );
    }

    #[test]
    fn small_radius_reports_divergence() {
        let (p, roots) = f1();
        let cfg = ScanConfig {
            divergence_radius: 1.0,
            ..ScanConfig::default()
        };
        let o = classify_node(Complex64::new(0.1, 0.05), &Method::Newton.into(), &p, &roots, &cfg);
        assert_eq!(
            o,
            NodeOutcome {
                kind: OutcomeKind::Diverged,
                iterations: 1
            }
        );
    }

    #[test]
    fn node_coordinates_include_edges() {
        let cfg = ScanConfig::square(5);
        assert_eq!(cfg.re_at(0), -3.0);
        assert_eq!(cfg.re_at(4), 3.0);
        assert_eq!(cfg.im_at(2), 0.0);
        let big = ScanConfig::square(1024);
        for j in 0..1024 {
            assert_eq!(big.im_at(j), -big.im_at(1023 - j));
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ScanConfig::square(1);
        assert!(cfg.validate().is_err());
        cfg = ScanConfig {
            window: Window::new(1.0, -1.0, -1.0, 1.0),
            ..ScanConfig::square(4)
        };
        assert!(cfg.validate().is_err());
        cfg = ScanConfig {
            accuracy: 0.0,
            ..ScanConfig::square(4)
        };
        assert!(cfg.validate().is_err());
        cfg = ScanConfig {
            n_max: 70_000,
            ..ScanConfig::square(4)
        };
        assert!(cfg.validate().is_err());
        assert!(ScanConfig::default().validate().is_ok());
    }

    #[test]
    fn conjugate_corners_agree() {
        let (p, roots) = f1();
        for m in Method::ALL {
            let g = scan_grid(&m.into(), &p, &roots, &ScanConfig::square(2)).unwrap();
            for i in 0..2 {
                let (lo, hi) = (g.get(i, 0), g.get(i, 1));
                let mirrored = match lo.kind {
                    OutcomeKind::Converged(r) => OutcomeKind::Converged(roots.conjugate_index(r).unwrap()),
                    other => other,
                };
                assert_eq!((hi.kind, hi.iterations), (mirrored, lo.iterations), "{m}");
            }
        }
    }

    #[test]
    fn binary_layout() {
        let (p, roots) = f1();
        let g = scan_grid(&Method::Newton.into(), &p, &roots, &ScanConfig::square(3)).unwrap();
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"BSGR");
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 3);
        assert_eq!(buf.len(), 16 + 27);
        // the centre node is the critical point z = 0
        let centre = 16 + 3 * 4;
        assert_eq!(buf[centre], 253);
        assert_eq!(u16::from_le_bytes([buf[centre + 1], buf[centre + 2]]), 1);
        let back = read_binary(&buf[..]).unwrap();
        assert_eq!(back.outcomes, g.outcomes);
        assert!(read_binary(&buf[..20]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_binary(&bad[..]).is_err());
    }

    #[test]
    fn csv_has_one_row_per_node() {
        let (p, roots) = f1();
        let g = scan_grid(&Method::Halley.into(), &p, &roots, &ScanConfig::square(4)).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "i,j,re,im,kind,root_index,iterations");
        assert_eq!(lines.len(), 17);
        assert!(lines[1].starts_with("0,0,-3,-3,"));
    }
}
