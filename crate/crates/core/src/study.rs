//! Per-run records and the consolidated comparison report.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use crate::classifier::{scan_grid, BasinGrid, OutcomeCounts, ScanConfig};
use crate::entropy::{basin_entropy, EntropyConfig, EntropyReport};
use crate::error::Result;
use crate::polynomial::{Polynomial, RootCatalog};
use crate::schemes::{Method, Scheme, DEFAULT_KING_BETA};
use crate::stats::{
    convergence_cdf, differential_entropy, fit_laplace_tail, histogram, IterationHistogram, LaplaceFit,
};

/// A polynomial with its attractors and a short label such as `unity:3`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case {
    pub label: String,
    pub polynomial: Polynomial,
    pub roots: RootCatalog,
}

impl Case {
    /// `z^n - 1` with its analytic roots, labelled `unity:n`.
    pub fn unity(n: usize) -> Result<Self> {
        Ok(Self {
            label: format!("unity:{n}"),
            polynomial: Polynomial::unity(n)?,
            roots: RootCatalog::unity_roots(n)?,
        })
    }

    pub fn new(label: impl Into<String>, polynomial: Polynomial, roots: RootCatalog) -> Result<Self> {
        roots.check_residuals(&polynomial)?;
        Ok(Self {
            label: label.into(),
            polynomial,
            roots,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyConfig {
    pub scan: ScanConfig,
    pub entropy: EntropyConfig,
    pub king_beta: f64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            scan: ScanConfig::default(),
            entropy: EntropyConfig::default(),
            king_beta: DEFAULT_KING_BETA,
        }
    }
}

/// Everything reported about one (method, polynomial) scan.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub case: String,
    pub counts: OutcomeCounts,
    /// `None` when no node converged.
    pub fit: Option<LaplaceFit>,
    pub differential_entropy: Option<f64>,
    pub cdf_20: f64,
    pub entropy: EntropyReport,
    pub king_beta: f64,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn total(&self) -> f64 {
        self.counts.total() as f64
    }

    pub fn converged_fraction(&self) -> f64 {
        self.counts.converged() as f64 / self.total()
    }

    pub fn diverged_fraction(&self) -> f64 {
        self.counts.diverged as f64 / self.total()
    }

    pub fn aborted_fraction(&self) -> f64 {
        self.counts.aborted as f64 / self.total()
    }

    pub fn nonconverged_fraction(&self) -> f64 {
        self.counts.nonconverged as f64 / self.total()
    }

    pub fn n_star(&self) -> Option<u32> {
        self.fit.map(|f| f.n_star)
    }
}

/// A finished run: its record plus the grid and histogram it came from.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub record: RunRecord,
    pub grid: BasinGrid,
    pub histogram: IterationHistogram,
}

/// Summarises an already scanned grid.
pub fn summarize(grid: BasinGrid, entropy_cfg: &EntropyConfig, case: &str, wall_seconds: f64) -> Result<RunOutput> {
    let histogram = histogram(&grid);
    let entropy = basin_entropy(&grid, entropy_cfg)?;
    let fit = fit_laplace_tail(&histogram).ok();
    let record = RunRecord {
        method: grid.scheme.method,
        case: case.to_string(),
        counts: grid.counts(),
        fit,
        differential_entropy: fit.as_ref().map(differential_entropy),
        cdf_20: convergence_cdf(&histogram, 20),
        entropy,
        king_beta: grid.scheme.king_beta,
        wall_seconds,
    };
    Ok(RunOutput {
        record,
        grid,
        histogram,
    })
}

/// Scans one (method, polynomial) pair and computes all statistics.
pub fn run_case(method: Method, case: &Case, cfg: &StudyConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let scheme = Scheme::new(method).with_king_beta(cfg.king_beta);
    let grid = scan_grid(&scheme, &case.polynomial, &case.roots, &cfg.scan)?;
    summarize(grid, &cfg.entropy, &case.label, start.elapsed().as_secs_f64())
}

/// Column order of the report CSV.
pub const REPORT_COLUMNS: [&str; 23] = [
    "index",
    "method",
    "polynomial",
    "claimed_order",
    "evals_per_step",
    "efficiency_index",
    "n_star",
    "a_offset",
    "b",
    "h",
    "s_b",
    "s_bb",
    "n_boxes",
    "n_boundary_boxes",
    "fractal_boundaries",
    "box_nodes",
    "converged_fraction",
    "diverged_fraction",
    "aborted_fraction",
    "nonconverged_fraction",
    "cdf_20",
    "king_beta",
    "wall_seconds",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record_fields(r: &RunRecord) -> Vec<String> {
    vec![
        r.method.index().to_string(),
        r.method.name().to_string(),
        r.case.clone(),
        r.method.claimed_order().to_string(),
        r.method.evals_per_step().to_string(),
        format!("{:.6}", r.method.efficiency_index()),
        opt(r.n_star()),
        opt(r.fit.map(|f| f.location_a - f.n_star)),
        opt(r.fit.map(|f| format!("{:.6}", f.diversity_b))),
        opt(r.differential_entropy.map(|h| format!("{h:.6}"))),
        format!("{:.6}", r.entropy.s_b),
        format!("{:.6}", r.entropy.s_bb),
        r.entropy.n_boxes.to_string(),
        r.entropy.n_boundary_boxes.to_string(),
        r.entropy.fractal_boundaries.to_string(),
        r.entropy.box_nodes.to_string(),
        format!("{:.9}", r.converged_fraction()),
        format!("{:.9}", r.diverged_fraction()),
        format!("{:.9}", r.aborted_fraction()),
        format!("{:.9}", r.nonconverged_fraction()),
        format!("{:.9}", r.cdf_20),
        r.king_beta.to_string(),
        format!("{:.3}", r.wall_seconds),
    ]
}

/// Writes the report CSV; failed pairs keep their method and polynomial and
/// carry the error text in the last column.
pub fn write_report_csv<W: Write>(rows: &[StudyRow], mut out: W) -> Result<()> {
    writeln!(out, "{},error", REPORT_COLUMNS.join(","))?;
    for row in rows {
        match &row.result {
            Ok(r) => writeln!(out, "{},", record_fields(r).join(","))?,
            Err(e) => {
                let mut fields = vec![String::new(); REPORT_COLUMNS.len()];
                fields[0] = row.method.index().to_string();
                fields[1] = row.method.name().to_string();
                fields[2] = row.case.clone();
                writeln!(out, "{},\"{}\"", fields.join(","), e.replace('"', "'"))?;
            }
        }
    }
    Ok(())
}

/// One bar-chart CSV per metric: `index,method,<case>...`, one row per method.
pub fn metric_table(rows: &[StudyRow], metric: Metric) -> String {
    let mut cases: Vec<&str> = Vec::new();
    let mut methods: Vec<Method> = Vec::new();
    for row in rows {
        if !cases.contains(&row.case.as_str()) {
            cases.push(&row.case);
        }
        if !methods.contains(&row.method) {
            methods.push(row.method);
        }
    }
    let mut s = format!("index,method,{}\n", cases.join(","));
    for m in methods {
        let _ = write!(s, "{},{}", m.index(), m.name());
        for c in &cases {
            let v = rows
                .iter()
                .find(|r| r.method == m && r.case == *c)
                .and_then(|r| r.result.as_ref().ok())
                .and_then(|r| metric.value(r));
            let _ = write!(s, ",{}", opt(v));
        }
        s.push('\n');
    }
    s
}

/// Per-method quantities charted across polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    NStar,
    Diversity,
    DifferentialEntropy,
    BasinEntropy,
    BoundaryBasinEntropy,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::NStar,
        Metric::Diversity,
        Metric::DifferentialEntropy,
        Metric::BasinEntropy,
        Metric::BoundaryBasinEntropy,
    ];

    pub fn file_stem(self) -> &'static str {
        match self {
            Metric::NStar => "n_star",
            Metric::Diversity => "diversity",
            Metric::DifferentialEntropy => "differential_entropy",
            Metric::BasinEntropy => "basin_entropy",
            Metric::BoundaryBasinEntropy => "boundary_basin_entropy",
        }
    }

    pub fn value(self, r: &RunRecord) -> Option<f64> {
        match self {
            Metric::NStar => r.n_star().map(f64::from),
            Metric::Diversity => r.fit.map(|f| f.diversity_b),
            Metric::DifferentialEntropy => r.differential_entropy,
            Metric::BasinEntropy => Some(r.entropy.s_b),
            Metric::BoundaryBasinEntropy => Some(r.entropy.s_bb),
        }
    }
}

/// One row of a study: a finished record or the error that stopped it.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub method: Method,
    pub case: String,
    pub result: std::result::Result<RunRecord, String>,
}

/// Aligned text table for terminals and logs.
pub fn summary_text(rows: &[StudyRow], cfg: &StudyConfig) -> String {
    let mut s = String::new();
    let sc = &cfg.scan;
    let _ = writeln!(
        s,
        "grid {}x{} window [{}, {}] x [{}, {}]  n_max {}  accuracy {:e}  divergence radius {:e}",
        sc.n_re,
        sc.n_im,
        sc.window.re_min,
        sc.window.re_max,
        sc.window.im_min,
        sc.window.im_max,
        sc.n_max,
        sc.accuracy,
        sc.divergence_radius
    );
    let _ = writeln!(
        s,
        "King beta {}  entropy boxes {}x{} nodes ({:.5} x {:.5} in the plane)",
        cfg.king_beta,
        cfg.entropy.box_nodes,
        cfg.entropy.box_nodes,
        (sc.window.re_max - sc.window.re_min) / (sc.n_re - 1) as f64 * cfg.entropy.box_nodes as f64,
        (sc.window.im_max - sc.window.im_min) / (sc.n_im - 1) as f64 * cfg.entropy.box_nodes as f64,
    );
    let _ = writeln!(
        s,
        "{:>3} {:<22} {:<10} {:>4} {:>4} {:>8} {:>8} {:>8} {:>8} {:>6} {:>9} {:>9} {:>9} {:>8}",
        "#", "method", "poly", "N*", "a", "b", "h", "S_b", "S_bb", "frac", "converged", "diverged", "aborted", "cdf20"
    );
    for row in rows {
        match &row.result {
            Ok(r) => {
                let f = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "-".into());
                let _ =
                    writeln!(
                    s,
                    "{:>3} {:<22} {:<10} {:>4} {:>4} {:>8} {:>8} {:>8.4} {:>8.4} {:>6} {:>9.6} {:>9.6} {:>9.6} {:>8.4}",
                    r.method.index(),
                    r.method.title(),
                    r.case,
                    opt(r.n_star()),
                    r.fit.map(|f| if f.location_a == f.n_star { "N*" } else { "N*+1" }).unwrap_or("-"),
                    f(r.fit.map(|x| x.diversity_b)),
                    f(r.differential_entropy),
                    r.entropy.s_b,
                    r.entropy.s_bb,
                    if r.entropy.fractal_boundaries { "yes" } else { "no" },
                    r.converged_fraction(),
                    r.diverged_fraction(),
                    r.aborted_fraction(),
                    r.cdf_20,
                );
            }
            Err(e) => {
                let _ = writeln!(
                    s,
                    "{:>3} {:<22} {:<10} failed: {e}",
                    row.method.index(),
                    row.method.title(),
                    row.case
                );
            }
        }
    }
    s
}
