//! Complex polynomials, derivative evaluation and root catalogs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest derivative order that [`Polynomial::eval_with_derivatives`] returns.
pub const MAX_DERIVATIVE_ORDER: usize = 3;

/// Default per-component tolerance used to decide that an iterate sits on a catalog root.
pub const DEFAULT_MATCH_TOLERANCE: f64 = 1e-15;

/// A polynomial with complex coefficients stored lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coefficients: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients ordered lowest degree first.
    ///
    /// The leading (last) coefficient must be nonzero and every coefficient finite.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let Some(lead) = coefficients.last() else {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        };
        if *lead == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidPolynomial("leading coefficient is zero".into()));
        }
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPolynomial("non-finite coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// `z^n - 1`.
    pub fn unity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPolynomial("unity polynomial needs n >= 1".into()));
        }
        let mut coefficients = vec![Complex64::new(0.0, 0.0); n + 1];
        coefficients[0] = Complex64::new(-1.0, 0.0);
        coefficients[n] = Complex64::new(1.0, 0.0);
        Self::new(coefficients)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// True when every coefficient has a zero imaginary part.
    pub fn has_real_coefficients(&self) -> bool {
        self.coefficients.iter().all(|c| c.im == 0.0)
    }

    /// Plain Horner evaluation of `f(z)`.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coefficients.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// `f(z)` together with an upper bound on the rounding error of the
    /// Horner evaluation, `4 n eps sum |c_k| |z|^k`.
    #[inline]
    pub fn eval_with_rounding_bound(&self, z: Complex64) -> (Complex64, f64) {
        let r = z.norm();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for c in self.coefficients.iter().rev() {
            acc = acc * z + c;
            mag = mag * r + c.norm();
        }
        (acc, 4.0 * self.degree() as f64 * f64::EPSILON * mag)
    }

    /// Fills `out` with `[f(z), f'(z), ..., f^(k)(z)]` where `k = out.len() - 1`.
    ///
    /// All derivatives come out of one synthetic-division sweep over the
    /// coefficients; orders above the degree are zero.
    #[inline]
    pub fn derivatives_into(&self, z: Complex64, out: &mut [Complex64]) {
        let zero = Complex64::new(0.0, 0.0);
        let top = out.len().saturating_sub(1);
        out.iter_mut().for_each(|v| *v = zero);
        let n = self.degree();
        out[0] = self.coefficients[n];
        for i in (0..n).rev() {
            let upper = top.min(n - i);
            for j in (1..=upper).rev() {
                out[j] = out[j] * z + out[j - 1];
            }
            out[0] = out[0] * z + self.coefficients[i];
        }
        // the sweep yields Taylor coefficients; scale by j! to get derivatives
        let mut factorial = 1.0;
        for (j, v) in out.iter_mut().enumerate().skip(2) {
            factorial *= j as f64;
            *v *= factorial;
        }
    }

    /// Returns `[f(z), f'(z), ..., f^(order)(z)]`.
    ///
    /// `order` must not exceed [`MAX_DERIVATIVE_ORDER`].
    pub fn eval_with_derivatives(&self, z: Complex64, order: usize) -> Result<Vec<Complex64>> {
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder(order));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); order + 1];
        self.derivatives_into(z, &mut out);
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    /// Writes the comma separated coefficient form accepted by [`FromStr`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coefficients.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write_complex(f, *c)?;
        }
        Ok(())
    }
}

fn write_complex(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im.is_sign_negative() {
        write!(f, "{}-{}i", c.re, -c.im)
    } else {
        write!(f, "{}+{}i", c.re, c.im)
    }
}

/// Parses one `re[+|-]imi` token, e.g. `-1+0i` or `0.5-2e-3i`.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex number `{token}`"));
    let t = token.trim();
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    // the sign separating the parts is the last +/- not opening the string or an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coefficients = s.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?;
        Self::new(coefficients)
    }
}

/// The known roots of a polynomial, used as attractors by the classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct RootCatalog {
    roots: Vec<Complex64>,
    match_tolerance: f64,
}

impl RootCatalog {
    /// Builds a catalog, rejecting empty lists, non-finite roots and roots closer
    /// together than ten match tolerances.
    pub fn new(roots: Vec<Complex64>, match_tolerance: f64) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidRoots("empty root catalog".into()));
        }
        if !(match_tolerance > 0.0 && match_tolerance.is_finite()) {
            return Err(Error::InvalidRoots("match tolerance must be positive".into()));
        }
        if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            return Err(Error::InvalidRoots("non-finite root".into()));
        }
        for (a, ra) in roots.iter().enumerate() {
            for rb in &roots[a + 1..] {
                if (ra - rb).norm() <= 10.0 * match_tolerance {
                    return Err(Error::InvalidRoots(format!("roots {ra} and {rb} are not distinct")));
                }
            }
        }
        Ok(Self { roots, match_tolerance })
    }

    /// The n-th roots of unity `exp(2 pi i k / n)`, ordered by `k`.
    ///
    /// Roots with `k > n/2` are stored as exact conjugates of root `n - k`.
    pub fn unity_roots(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRoots("roots of unity need n >= 1".into()));
        }
        let mut roots: Vec<Complex64> = Vec::with_capacity(n);
        for k in 0..n {
            let r = if 2 * k > n {
                roots[n - k].conj()
            } else if 2 * k == n {
                Complex64::new(-1.0, 0.0)
            } else if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
            };
            roots.push(r);
        }
        Self::new(roots, DEFAULT_MATCH_TOLERANCE)
    }

    /// Parses a catalog file: one root per line as `re[+|-]imi`; `#` starts a comment.
    pub fn parse(text: &str, match_tolerance: f64) -> Result<Self> {
        let roots = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Self::new(roots, match_tolerance)
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn match_tolerance(&self) -> f64 {
        self.match_tolerance
    }

    /// Checks `|f(r)| < 1e-12` for every root.
    pub fn check_residuals(&self, p: &Polynomial) -> Result<()> {
        for r in &self.roots {
            let res = p.eval(*r).norm();
            if res.is_nan() || res >= 1e-12 {
                return Err(Error::InvalidRoots(format!("|f({r})| = {res:e} is not a root")));
            }
        }
        Ok(())
    }

    /// Index of the root whose real and imaginary parts both lie within
    /// `accuracy` of `z`.
    #[inline]
    pub fn locate(&self, z: Complex64, accuracy: f64) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| (z.re - r.re).abs() <= accuracy && (z.im - r.im).abs() <= accuracy)
    }

    /// Index of the root equal to the conjugate of root `k`, if the catalog has one.
    pub fn conjugate_index(&self, k: usize) -> Option<usize> {
        let target = self.roots.get(k)?.conj();
        self.locate(target, self.match_tolerance)
    }
}
