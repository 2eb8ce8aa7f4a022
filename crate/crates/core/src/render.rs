//! Basin and iteration-count images as binary PPM (P6).
//!
//! Image rows run top to bottom from the largest imaginary part down, so the
//! picture has the usual mathematical orientation.

use crate::classifier::{BasinGrid, OutcomeKind};
use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

pub const BLUE: Rgb = [0, 0, 255];
pub const GREEN: Rgb = [0, 160, 0];
pub const RED: Rgb = [255, 0, 0];
pub const YELLOW: Rgb = [255, 255, 0];
pub const ORANGE: Rgb = [255, 140, 0];
pub const PURPLE: Rgb = [128, 0, 160];
pub const OLIVE: Rgb = [128, 128, 0];
pub const CYAN: Rgb = [0, 200, 200];
pub const MAGENTA: Rgb = [255, 0, 255];
pub const TEAL: Rgb = [0, 128, 128];
pub const BROWN: Rgb = [140, 80, 20];
pub const GRAY: Rgb = [96, 96, 96];
pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Palette {
    pub root_colors: Vec<Rgb>,
    pub diverged_color: Rgb,
    pub aborted_color: Rgb,
    pub nonconverged_color: Rgb,
}

impl Palette {
    /// Blue, green, red for three roots.
    pub fn three_roots() -> Self {
        Self::with_roots(vec![BLUE, GREEN, RED])
    }

    /// Blue, purple, olive, green, cyan, magenta, red, teal, brown.
    pub fn nine_roots() -> Self {
        Self::with_roots(vec![BLUE, PURPLE, OLIVE, GREEN, CYAN, MAGENTA, RED, TEAL, BROWN])
    }

    /// The three- or nine-root palette, or the nine colors followed by
    /// generated hues for larger catalogs.
    pub fn for_roots(n: usize) -> Self {
        if n <= 3 {
            return Self::three_roots();
        }
        let mut p = Self::nine_roots();
        for k in p.root_colors.len()..n {
            p.root_colors.push(hue(k as f64 * 0.618_033_988_75));
        }
        p
    }

    fn with_roots(root_colors: Vec<Rgb>) -> Self {
        Self {
            root_colors,
            diverged_color: YELLOW,
            aborted_color: ORANGE,
            nonconverged_color: GRAY,
        }
    }

    pub fn color(&self, kind: OutcomeKind) -> Rgb {
        match kind {
            OutcomeKind::Converged(r) => self.root_colors[r],
            OutcomeKind::Diverged => self.diverged_color,
            OutcomeKind::Aborted => self.aborted_color,
            OutcomeKind::NonConverged => self.nonconverged_color,
        }
    }
}

fn hue(turns: f64) -> Rgb {
    let h = turns.fract() * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    let q = |v: f64| (v * 200.0) as u8 + 30;
    [q(r), q(g), q(b)]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Paint the node nearest to each catalog root black.
    pub mark_roots: bool,
}

/// Entry `k` of the 256-entry iteration ramp: black through red and
/// orange to pale yellow, `(min(255, 3k), clamp(3k - 256), clamp(3k - 512) / 2)`.
pub fn iteration_ramp(k: u8) -> Rgb {
    let v = 3 * i32::from(k);
    let clamp = |x: i32| x.clamp(0, 255) as u8;
    [clamp(v), clamp(v - 256), clamp(v - 512) / 2]
}

fn ppm(width: usize, height: usize, pixel: impl Fn(usize, usize) -> Rgb) -> Vec<u8> {
    let header = format!("P6\n{width} {height}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * width * height);
    out.extend_from_slice(header.as_bytes());
    for row in 0..height {
        let j = height - 1 - row;
        for i in 0..width {
            out.extend_from_slice(&pixel(i, j));
        }
    }
    out
}

fn root_marks(grid: &BasinGrid) -> Vec<(usize, usize)> {
    let cfg = &grid.config;
    let w = &cfg.window;
    grid.roots
        .roots()
        .iter()
        .filter(|r| r.re >= w.re_min && r.re <= w.re_max && r.im >= w.im_min && r.im <= w.im_max)
        .map(|r| {
            let i = ((r.re - w.re_min) / (w.re_max - w.re_min) * (cfg.n_re - 1) as f64).round() as usize;
            let j = ((r.im - w.im_min) / (w.im_max - w.im_min) * (cfg.n_im - 1) as f64).round() as usize;
            (i, j)
        })
        .collect()
}

/// One pixel per node, colored by outcome kind.
pub fn render_basins(grid: &BasinGrid, palette: &Palette, opts: RenderOptions) -> Result<Vec<u8>> {
    if palette.root_colors.len() < grid.roots.len() {
        return Err(Error::PaletteTooSmall {
            colors: palette.root_colors.len(),
            roots: grid.roots.len(),
        });
    }
    let marks = if opts.mark_roots { root_marks(grid) } else { Vec::new() };
    Ok(ppm(grid.n_re(), grid.n_im(), |i, j| {
        if marks.contains(&(i, j)) {
            BLACK
        } else {
            palette.color(grid.get(i, j).kind)
        }
    }))
}

/// Converged nodes colored by iteration count on [`iteration_ramp`], scaled
/// over `[0, max N]`; every other node is white.
pub fn render_iterations(grid: &BasinGrid) -> Vec<u8> {
    let max_n = grid
        .outcomes
        .iter()
        .filter(|o| o.is_converged())
        .map(|o| o.iterations)
        .max()
        .unwrap_or(0);
    ppm(grid.n_re(), grid.n_im(), |i, j| {
        let o = grid.get(i, j);
        match o.kind {
            OutcomeKind::Converged(_) => {
                let k = if max_n == 0 {
                    0
                } else {
                    (255.0 * f64::from(o.iterations) / f64::from(max_n)).round() as u8
                };
                iteration_ramp(k)
            }
            _ => WHITE,
        }
    })
}

/// Decoded P6 image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Pixmap {
    /// Pixel at column `x` of image row `y` (row 0 at the top).
    pub fn at(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }
}

/// Parses the P6 layout written by this module (single-space separators,
/// no comments, maxval 255).
pub fn parse_ppm(bytes: &[u8]) -> Result<Pixmap> {
    let bad = |m: &str| Error::Format(format!("ppm: {m}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ascii"))?);
        pos += 1;
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(bad("expected P6 with maxval 255"));
    }
    let width: usize = fields[1].parse().map_err(|_| bad("width"))?;
    let height: usize = fields[2].parse().map_err(|_| bad("height"))?;
    let body = &bytes[pos..];
    if body.len() != 3 * width * height {
        return Err(bad("pixel data length mismatch"));
    }
    let pixels = body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(Pixmap { width, height, pixels })
}
