//! Command-line flags, the key-value manifest file, and their merge into a
//! [`Plan`]. Flags override manifest entries, which override defaults.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use basinforge::study::{Case, StudyConfig};
use basinforge::{Method, Polynomial, RootCatalog, Window};
use clap::Parser;

#[derive(Parser, Debug, Default)]
#[command(
    name = "basinforge",
    version,
    about = "Basins of attraction and basin entropy of iterative root finders"
)]
pub struct Args {
    /// Scheme index (1-16), name, comma-separated list of either, or `all`.
    #[arg(long, value_parser = parse_methods)]
    pub method: Option<MethodList>,
    /// `unity:<n>` for z^n - 1, or comma-separated coefficients `re+imi`,
    /// lowest degree first. Repeat for several polynomials.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Vec<String>,
    /// Root catalog file for each coefficient polynomial, in order.
    #[arg(long)]
    pub roots: Vec<PathBuf>,
    /// `rmin,rmax,imin,imax`.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    pub window: Option<Window>,
    /// `<n>` or `<n>x<m>` nodes along the real and imaginary axes.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    #[arg(long)]
    pub nmax: Option<u32>,
    /// Per-component distance to a root that counts as convergence.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub divergence_radius: Option<f64>,
    /// Entropy box side in grid nodes.
    #[arg(long)]
    pub box_nodes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub king_beta: Option<f64>,
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated subset of `images,hist,report`.
    #[arg(long, value_parser = parse_emit)]
    pub emit: Option<Emit>,
    /// Replace existing output files.
    #[arg(long)]
    pub overwrite: bool,
    /// Key-value file (`key = value`, keys named like the long flags).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Run (method, polynomial) pairs concurrently.
    #[arg(long)]
    pub parallel_pairs: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodList(pub Vec<Method>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Emit {
    pub images: bool,
    pub hist: bool,
    pub report: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self {
            images: true,
            hist: true,
            report: true,
        }
    }
}

fn parse_methods(s: &str) -> Result<MethodList, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(MethodList(Method::ALL.to_vec()));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m: Method = tok.parse().map_err(|e: basinforge::Error| e.to_string())?;
        if seen.insert(m.index()) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err("no methods given".into());
    }
    Ok(MethodList(out))
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number `{t}`")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => Ok(Window::new(a, b, c, d)),
        _ => Err("expected rmin,rmax,imin,imax".into()),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad grid size `{t}`"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((num(a)?, num(b)?)),
        None => num(s).map(|n| (n, n)),
    }
}

fn parse_emit(s: &str) -> Result<Emit, String> {
    let mut e = Emit {
        images: false,
        hist: false,
        report: false,
    };
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok {
            "images" => e.images = true,
            "hist" => e.hist = true,
            "report" => e.report = true,
            other => return Err(format!("unknown artifact `{other}` (expected images, hist, report)")),
        }
    }
    Ok(e)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("expected true or false, got `{s}`"),
    }
}

/// Reads a manifest into [`Args`]. `poly` and `roots` may repeat; relative
/// `roots` and `out` paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Args> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading manifest {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut a = Args::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", path.display(), lineno + 1);
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}: expected key = value", at()))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        let bad = |e: String| anyhow::anyhow!("{}: {key}: {e}", at());
        match key.as_str() {
            "method" => a.method = Some(parse_methods(value).map_err(bad)?),
            "poly" => a.poly.push(value.to_string()),
            "roots" => a.roots.push(base.join(value)),
            "window" => a.window = Some(parse_window(value).map_err(bad)?),
            "grid" => a.grid = Some(parse_grid(value).map_err(bad)?),
            "nmax" => a.nmax = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "tol" => a.tol = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "divergence-radius" => a.divergence_radius = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "box-nodes" => a.box_nodes = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "king-beta" => a.king_beta = Some(value.parse().map_err(|e| bad(format!("{e}")))?),
            "out" => a.out = Some(base.join(value)),
            "emit" => a.emit = Some(parse_emit(value).map_err(bad)?),
            "overwrite" => a.overwrite = parse_bool(value).map_err(|e| bad(e.to_string()))?,
            "parallel-pairs" => a.parallel_pairs = parse_bool(value).map_err(|e| bad(e.to_string()))?,
            _ => bail!("{}: unknown key `{key}`", at()),
        }
    }
    Ok(a)
}

/// Fills every unset flag from the manifest.
fn merge(flags: Args, file: Args) -> Args {
    Args {
        method: flags.method.or(file.method),
        poly: if flags.poly.is_empty() { file.poly } else { flags.poly },
        roots: if flags.roots.is_empty() {
            file.roots
        } else {
            flags.roots
        },
        window: flags.window.or(file.window),
        grid: flags.grid.or(file.grid),
        nmax: flags.nmax.or(file.nmax),
        tol: flags.tol.or(file.tol),
        divergence_radius: flags.divergence_radius.or(file.divergence_radius),
        box_nodes: flags.box_nodes.or(file.box_nodes),
        king_beta: flags.king_beta.or(file.king_beta),
        out: flags.out.or(file.out),
        emit: flags.emit.or(file.emit),
        overwrite: flags.overwrite || file.overwrite,
        manifest: None,
        parallel_pairs: flags.parallel_pairs || file.parallel_pairs,
    }
}

/// A fully resolved run.
#[derive(Debug)]
pub struct Plan {
    pub methods: Vec<Method>,
    pub cases: Vec<Case>,
    pub study: StudyConfig,
    pub out: PathBuf,
    pub emit: Emit,
    pub overwrite: bool,
    pub parallel_pairs: bool,
}

fn parse_case(token: &str, roots: &mut impl Iterator<Item = PathBuf>, custom: &mut usize) -> Result<Case> {
    if let Some(n) = token.strip_prefix("unity:") {
        let n: usize = n.trim().parse().with_context(|| format!("bad degree in `{token}`"))?;
        return Ok(Case::unity(n)?);
    }
    let p: Polynomial = token.parse().with_context(|| format!("bad polynomial `{token}`"))?;
    let file = roots
        .next()
        .with_context(|| format!("polynomial `{token}` needs a --roots catalog file"))?;
    let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let catalog = RootCatalog::parse(&text, basinforge::polynomial::DEFAULT_MATCH_TOLERANCE)
        .with_context(|| format!("root catalog {}", file.display()))?;
    *custom += 1;
    Case::new(format!("poly{custom}"), p, catalog).with_context(|| format!("root catalog {}", file.display()))
}

impl Plan {
    pub fn resolve(flags: Args) -> Result<Self> {
        let args = match &flags.manifest {
            Some(path) => {
                let file = read_manifest(path)?;
                merge(flags, file)
            }
            None => flags,
        };
        let methods = args.method.map_or_else(|| Method::ALL.to_vec(), |m| m.0);
        let polys = if args.poly.is_empty() {
            vec!["unity:3".into(), "unity:9".into()]
        } else {
            args.poly
        };
        let mut roots = args.roots.into_iter();
        let mut custom = 0;
        let cases = polys
            .iter()
            .map(|s| parse_case(s, &mut roots, &mut custom))
            .collect::<Result<Vec<_>>>()?;
        ensure!(
            roots.next().is_none(),
            "more --roots files than coefficient polynomials"
        );

        let mut study = StudyConfig::default();
        let scan = &mut study.scan;
        if let Some(w) = args.window {
            scan.window = w;
        }
        if let Some((n_re, n_im)) = args.grid {
            scan.n_re = n_re;
            scan.n_im = n_im;
        }
        if let Some(v) = args.nmax {
            scan.n_max = v;
        }
        if let Some(v) = args.tol {
            scan.accuracy = v;
        }
        if let Some(v) = args.divergence_radius {
            scan.divergence_radius = v;
        }
        scan.validate()?;
        if let Some(v) = args.box_nodes {
            study.entropy.box_nodes = v;
        }
        let b = study.entropy.box_nodes;
        ensure!(
            b >= 2 && scan.n_re % b == 0 && scan.n_im % b == 0,
            "grid {}x{} cannot be tiled by {b}x{b}-node entropy boxes",
            scan.n_re,
            scan.n_im
        );
        if let Some(v) = args.king_beta {
            ensure!(v.is_finite(), "King beta must be finite");
            study.king_beta = v;
        }
        Ok(Self {
            methods,
            cases,
            study,
            out: args.out.unwrap_or_else(|| PathBuf::from("basinforge-out")),
            emit: args.emit.unwrap_or_default(),
            overwrite: args.overwrite,
            parallel_pairs: args.parallel_pairs,
        })
    }
}
