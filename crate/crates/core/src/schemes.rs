//! One-step iteration maps of the sixteen root-finding methods.
//!
//! Every method is a map `z -> phi(z)` built from `f` and its derivatives.
//! Divisions go through [`Eval::div`], which reports a denominator smaller
//! than [`TINY_DENOMINATOR`] in modulus instead of dividing by it.
//!
//! Multipoint methods stop early when an intermediate point already sits on a
//! root to machine precision (its residual is below the rounding bound of the
//! polynomial evaluation). The remaining corrections would be pure rounding
//! noise there, and the differences of such residuals are not meaningful
//! denominators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

/// Denominators below this modulus abort the step.
pub const TINY_DENOMINATOR: f64 = 1e-16;

/// King's family parameter used unless configured otherwise.
pub const DEFAULT_KING_BETA: f64 = 2.0;

/// The sixteen methods, in the order of the comparison study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Newton,
    Halley,
    Chebyshev,
    SuperHalley,
    ModifiedSuperHalley,
    King,
    Jarratt,
    KungTraub,
    Maheshwari,
    Murakami,
    Neta6,
    ChunNeta,
    NetaJohnson,
    NetaPetkovic,
    Neta14,
    Neta16,
}

impl Method {
    pub const ALL: [Method; 16] = [
        Method::Newton,
        Method::Halley,
        Method::Chebyshev,
        Method::SuperHalley,
        Method::ModifiedSuperHalley,
        Method::King,
        Method::Jarratt,
        Method::KungTraub,
        Method::Maheshwari,
        Method::Murakami,
        Method::Neta6,
        Method::ChunNeta,
        Method::NetaJohnson,
        Method::NetaPetkovic,
        Method::Neta14,
        Method::Neta16,
    ];

    /// 1-based position in the study list.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        index.checked_sub(1).and_then(|k| Self::ALL.get(k).copied())
    }

    /// Short machine-friendly label, accepted back by [`FromStr`].
    pub fn name(self) -> &'static str {
        match self {
            Method::Newton => "newton",
            Method::Halley => "halley",
            Method::Chebyshev => "chebyshev",
            Method::SuperHalley => "super-halley",
            Method::ModifiedSuperHalley => "modified-super-halley",
            Method::King => "king",
            Method::Jarratt => "jarratt",
            Method::KungTraub => "kung-traub",
            Method::Maheshwari => "maheshwari",
            Method::Murakami => "murakami",
            Method::Neta6 => "neta6",
            Method::ChunNeta => "chun-neta",
            Method::NetaJohnson => "neta-johnson",
            Method::NetaPetkovic => "neta-petkovic",
            Method::Neta14 => "neta14",
            Method::Neta16 => "neta16",
        }
    }

    /// Human readable name.
    pub fn title(self) -> &'static str {
        match self {
            Method::Newton => "Newton-Raphson",
            Method::Halley => "Halley",
            Method::Chebyshev => "Chebyshev",
            Method::SuperHalley => "super Halley",
            Method::ModifiedSuperHalley => "modified super Halley",
            Method::King => "King",
            Method::Jarratt => "Jarratt",
            Method::KungTraub => "Kung-Traub",
            Method::Maheshwari => "Maheshwari",
            Method::Murakami => "Murakami",
            Method::Neta6 => "Neta (6th order)",
            Method::ChunNeta => "Chun-Neta",
            Method::NetaJohnson => "Neta-Johnson",
            Method::NetaPetkovic => "Neta-Petkovic",
            Method::Neta14 => "Neta (14th order)",
            Method::Neta16 => "Neta (16th order)",
        }
    }

    /// Theoretical order of convergence to a simple root.
    pub fn claimed_order(self) -> u32 {
        match self {
            Method::Newton => 2,
            Method::Halley | Method::Chebyshev => 3,
            Method::SuperHalley
            | Method::ModifiedSuperHalley
            | Method::King
            | Method::Jarratt
            | Method::KungTraub
            | Method::Maheshwari => 4,
            Method::Murakami => 5,
            Method::Neta6 | Method::ChunNeta => 6,
            Method::NetaJohnson | Method::NetaPetkovic => 8,
            Method::Neta14 => 14,
            Method::Neta16 => 16,
        }
    }

    /// Function and derivative evaluations per step.
    pub fn evals_per_step(self) -> u32 {
        match self {
            Method::Newton => 2,
            Method::Halley
            | Method::Chebyshev
            | Method::SuperHalley
            | Method::ModifiedSuperHalley
            | Method::King
            | Method::Jarratt
            | Method::KungTraub
            | Method::Maheshwari => 3,
            Method::Murakami | Method::Neta6 | Method::ChunNeta | Method::NetaPetkovic => 4,
            Method::NetaJohnson | Method::Neta14 | Method::Neta16 => 5,
        }
    }

    /// `claimed_order^(1 / evals_per_step)`.
    pub fn efficiency_index(self) -> f64 {
        f64::from(self.claimed_order()).powf(1.0 / f64::from(self.evals_per_step()))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts the 1-based index or a case-insensitive name; `-`, `_` and
    /// spaces are ignored, so `Super_Halley` and `superhalley` both work.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Ok(k) = t.parse::<usize>() {
            return Self::from_index(k).ok_or_else(|| Error::UnknownMethod(s.to_string()));
        }
        let key: String = t
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .flat_map(char::to_lowercase)
            .collect();
        let alias = match key.as_str() {
            "newtonraphson" | "nr" => Some(Method::Newton),
            "neta" => Some(Method::Neta6),
            "kt" => Some(Method::KungTraub),
            _ => None,
        };
        alias
            .or_else(|| Self::ALL.into_iter().find(|m| m.name().replace('-', "") == key))
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Outcome flag of a single step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    TinyDenominator,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepResult {
    /// Next iterate; unspecified unless `status` is `Ok`.
    pub next: Complex64,
    pub status: StepStatus,
}

/// A method together with its tunable parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scheme {
    pub method: Method,
    /// Parameter of King's family, also used by the King-type second
    /// substep of the Neta and Neta-Petkovic methods.
    pub king_beta: f64,
}

impl From<Method> for Scheme {
    fn from(method: Method) -> Self {
        Self::new(method)
    }
}

struct Tiny;

type Sub = std::result::Result<Complex64, Tiny>;

/// Returned by a substep when an intermediate point is already a root.
enum Flow {
    Done(Complex64),
    Continue,
}

struct Eval<'a> {
    p: &'a Polynomial,
}

impl Eval<'_> {
    #[inline]
    fn div(&self, num: Complex64, den: Complex64) -> Sub {
        if den.norm() < TINY_DENOMINATOR {
            Err(Tiny)
        } else {
            Ok(num / den)
        }
    }

    #[inline]
    fn df(&self, z: Complex64) -> Complex64 {
        let mut d = [Complex64::new(0.0, 0.0); 2];
        self.p.derivatives_into(z, &mut d);
        d[1]
    }

    /// `f(z)` plus a flag telling whether `z` is a root to machine precision.
    #[inline]
    fn f_at(&self, z: Complex64) -> (Complex64, Flow) {
        let (v, bound) = self.p.eval_with_rounding_bound(z);
        if v.norm() <= bound.max(TINY_DENOMINATOR) {
            (v, Flow::Done(z))
        } else {
            (v, Flow::Continue)
        }
    }
}

macro_rules! exit_if_root {
    ($flow:expr) => {
        if let Flow::Done(z) = $flow {
            return Ok(z);
        }
    };
}

impl Scheme {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            king_beta: DEFAULT_KING_BETA,
        }
    }

    pub fn with_king_beta(mut self, beta: f64) -> Self {
        self.king_beta = beta;
        self
    }

    /// Applies one iteration of the method at `z`.
    pub fn step(&self, z: Complex64, p: &Polynomial) -> StepResult {
        let ev = Eval { p };
        match self.apply(&ev, z) {
            Err(Tiny) => StepResult {
                next: z,
                status: StepStatus::TinyDenominator,
            },
            Ok(next) if next.re.is_finite() && next.im.is_finite() => StepResult {
                next,
                status: StepStatus::Ok,
            },
            Ok(next) => StepResult {
                next,
                status: StepStatus::NonFinite,
            },
        }
    }

    fn apply(&self, ev: &Eval<'_>, x: Complex64) -> Sub {
        let mut d = [Complex64::new(0.0, 0.0); 3];
        let order = match self.method {
            Method::Halley | Method::Chebyshev | Method::SuperHalley => 2,
            _ => 1,
        };
        ev.p.derivatives_into(x, &mut d[..=order]);
        let (fx, dfx, d2fx) = (d[0], d[1], d[2]);
        if fx.norm() < TINY_DENOMINATOR {
            return Ok(x);
        }
        let u = ev.div(fx, dfx)?;
        let one = Complex64::new(1.0, 0.0);
        match self.method {
            Method::Newton => Ok(x - u),
            Method::Halley => {
                let den = 2.0 * dfx * dfx - fx * d2fx;
                Ok(x - ev.div(2.0 * fx * dfx, den)?)
            }
            Method::Chebyshev => {
                let l = u * ev.div(d2fx, dfx)?;
                Ok(x - u * (one + 0.5 * l))
            }
            Method::SuperHalley => {
                let l = u * ev.div(d2fx, dfx)?;
                Ok(x - u * (one + ev.div(l, 2.0 * (one - l))?))
            }
            Method::ModifiedSuperHalley => {
                // super Halley with f'' replaced by the divided difference of
                // f' between x and the Jarratt point x - 2u/3
                let y = x - u * (2.0 / 3.0);
                let l = 1.5 * (one - ev.div(ev.df(y), dfx)?);
                Ok(x - u * (one + ev.div(l, 2.0 * (one - l))?))
            }
            Method::King => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                self.king_substep(ev, y, fx, dfx, fy)
            }
            Method::Jarratt => {
                let y = x - u * (2.0 / 3.0);
                let dfy = ev.df(y);
                Ok(x - u * ev.div(3.0 * dfy + dfx, 6.0 * dfy - 2.0 * dfx)?)
            }
            Method::KungTraub => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                kung_traub_substep(ev, y, fx, dfx, fy)
            }
            Method::Maheshwari => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                let t = ev.div(fy, fx)?;
                // x + (f(x)^2 / (f(y) - f(x)) - f(y)^2 / f(x)) / f'(x)
                let bracket = ev.div(fx, t - one)? - fy * t;
                Ok(x + ev.div(bracket, dfx)?)
            }
            Method::Murakami => self.murakami(ev, x, fx, dfx, u),
            Method::Neta6 => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                let z = self.king_substep(ev, y, fx, dfx, fy)?;
                let (fz, flow) = ev.f_at(z);
                exit_if_root!(flow);
                neta6_substep(ev, z, fx, dfx, fy, fz)
            }
            Method::ChunNeta => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                let z = kung_traub_substep(ev, y, fx, dfx, fy)?;
                let (fz, flow) = ev.f_at(z);
                exit_if_root!(flow);
                let t = ev.div(fy, fx)?;
                let s = ev.div(fz, fx)?;
                let w = one - t - s;
                Ok(z - ev.div(ev.div(fz, dfx)?, w * w)?)
            }
            Method::NetaJohnson => neta_johnson(ev, x, dfx, u),
            Method::NetaPetkovic => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                let z = self.king_substep(ev, y, fx, dfx, fy)?;
                let (fz, flow) = ev.f_at(z);
                exit_if_root!(flow);
                inverse_hermite_at_zero(ev, (x, fx, dfx), &[(y, fy), (z, fz)])
            }
            Method::Neta14 | Method::Neta16 => {
                let y = x - u;
                let (fy, flow) = ev.f_at(y);
                exit_if_root!(flow);
                let z = self.king_substep(ev, y, fx, dfx, fy)?;
                let (fz, flow) = ev.f_at(z);
                exit_if_root!(flow);
                let w = if self.method == Method::Neta14 {
                    neta6_substep(ev, z, fx, dfx, fy, fz)?
                } else {
                    inverse_hermite_at_zero(ev, (x, fx, dfx), &[(y, fy), (z, fz)])?
                };
                let (fw, flow) = ev.f_at(w);
                exit_if_root!(flow);
                inverse_hermite_at_zero(ev, (x, fx, dfx), &[(y, fy), (z, fz), (w, fw)])
            }
        }
    }

    /// `y - f(y)/f'(x) * (f(x) + beta f(y)) / (f(x) + (beta - 2) f(y))`
    fn king_substep(&self, ev: &Eval<'_>, y: Complex64, fx: Complex64, dfx: Complex64, fy: Complex64) -> Sub {
        let one = Complex64::new(1.0, 0.0);
        let t = ev.div(fy, fx)?;
        let beta = self.king_beta;
        let ratio = ev.div(one + beta * t, one + (beta - 2.0) * t)?;
        Ok(y - ev.div(fy, dfx)? * ratio)
    }

    fn murakami(&self, ev: &Eval<'_>, x: Complex64, fx: Complex64, dfx: Complex64, w1: Complex64) -> Sub {
        let yn = x - w1;
        let (fyn, flow) = ev.f_at(yn);
        exit_if_root!(flow);
        let w2 = ev.div(fyn, dfx)?;
        let y = x - w1 * MURAKAMI_NODE;
        let dfy = ev.df(y);
        let w3 = ev.div(fx, dfy)?;
        let psi = ev.div(fx, MURAKAMI_B1 * dfx + MURAKAMI_B2 * dfy)?;
        Ok(x - MURAKAMI_A[0] * w1 - MURAKAMI_A[1] * w2 - MURAKAMI_A[2] * w3 - psi)
    }
}

// Murakami-type five-point combination:
//   x - a1 w1 - a2 w2 - a3 w3 - f(x) / (b1 f'(x) + b2 f'(y)),
//   w1 = f(x)/f'(x), w2 = f(x - w1)/f'(x), w3 = f(x)/f'(y), y = x - (5/6) w1.
const MURAKAMI_NODE: f64 = 5.0 / 6.0;
const MURAKAMI_A: [f64; 3] = [61.0 / 25.0, 1.0, 36.0 / 25.0];
const MURAKAMI_B1: f64 = -25.0 / 144.0;
const MURAKAMI_B2: f64 = -25.0 / 144.0;

/// `y - f(y)/f'(x) / (1 - f(y)/f(x))^2`
fn kung_traub_substep(ev: &Eval<'_>, y: Complex64, fx: Complex64, dfx: Complex64, fy: Complex64) -> Sub {
    let one = Complex64::new(1.0, 0.0);
    let t = ev.div(fy, fx)?;
    let w = one - t;
    ev.div(ev.div(fy, dfx)?, w * w).map(|c| y - c)
}

/// `z - f(z)/f'(x) * (f(x) - f(y)) / (f(x) - 3 f(y))`
fn neta6_substep(ev: &Eval<'_>, z: Complex64, fx: Complex64, dfx: Complex64, fy: Complex64, fz: Complex64) -> Sub {
    let one = Complex64::new(1.0, 0.0);
    let t = ev.div(fy, fx)?;
    let ratio = ev.div(one - t, one - 3.0 * t)?;
    Ok(z - ev.div(fz, dfx)? * ratio)
}

/// Inverse Hermite interpolation: the polynomial `R` with `R(f(x)) = x`,
/// `R'(f(x)) = 1/f'(x)` and `R(f(p)) = p` for each extra point, evaluated at 0.
fn inverse_hermite_at_zero(
    ev: &Eval<'_>,
    anchor: (Complex64, Complex64, Complex64),
    points: &[(Complex64, Complex64)],
) -> Sub {
    const MAX_NODES: usize = 6;
    let (x, fx, dfx) = anchor;
    let m = points.len() + 2;
    debug_assert!(m <= MAX_NODES);
    let zero = Complex64::new(0.0, 0.0);
    let mut nodes = [zero; MAX_NODES];
    let mut table = [zero; MAX_NODES];
    nodes[0] = fx;
    nodes[1] = fx;
    table[0] = x;
    table[1] = x;
    for (k, &(p, fp)) in points.iter().enumerate() {
        nodes[k + 2] = fp;
        table[k + 2] = p;
    }
    // in-place divided differences; coef[k] ends up in table[k]
    let inv_dfx = ev.div(Complex64::new(1.0, 0.0), dfx)?;
    for level in 1..m {
        for i in (level..m).rev() {
            table[i] = if level == 1 && i == 1 {
                inv_dfx
            } else {
                ev.div(table[i] - table[i - 1], nodes[i] - nodes[i - level])?
            };
        }
    }
    let mut acc = table[m - 1];
    for k in (0..m - 1).rev() {
        acc = table[k] - nodes[k] * acc;
    }
    Ok(acc)
}

/// Jarratt step followed by a Newton correction at the Jarratt point.
fn neta_johnson(ev: &Eval<'_>, x: Complex64, dfx: Complex64, u: Complex64) -> Sub {
    let y = x - u * (2.0 / 3.0);
    let dfy = ev.df(y);
    let z = x - u * ev.div(3.0 * dfy + dfx, 6.0 * dfy - 2.0 * dfx)?;
    let (fz, flow) = ev.f_at(z);
    exit_if_root!(flow);
    Ok(z - ev.div(fz, ev.df(z))?)
}

/// Errors `|z_n - r|` of successive iterates from `z0`, where `r` is the
/// point the iteration settles on. Iteration stops once a step no longer
/// moves the iterate, fails, or after `max_steps` steps.
pub fn error_sequence(scheme: &Scheme, p: &Polynomial, z0: Complex64, max_steps: usize) -> Vec<f64> {
    let mut iterates = vec![z0];
    let mut z = z0;
    for _ in 0..max_steps {
        let s = scheme.step(z, p);
        if s.status != StepStatus::Ok {
            break;
        }
        let moved = s.next != z;
        z = s.next;
        iterates.push(z);
        if !moved {
            break;
        }
    }
    iterates.iter().map(|w| (w - z).norm()).collect()
}

/// Errors below this are treated as rounding noise when estimating orders.
pub const ERROR_FLOOR: f64 = 1e-13;

/// Computational order of convergence from `z0`:
/// `ln(e_{n+1}/e_n) / ln(e_n/e_{n-1})` on the last triple of errors that
/// are all above [`ERROR_FLOOR`], averaged with the preceding triple when
/// that one exists too.
pub fn computational_order(scheme: &Scheme, p: &Polynomial, z0: Complex64) -> Result<f64> {
    let errors = error_sequence(scheme, p, z0, 100);
    let usable: Vec<f64> = errors.into_iter().take_while(|&e| e > ERROR_FLOOR).collect();
    let estimates: Vec<f64> = usable
        .windows(3)
        .filter(|w| w[2] < w[1] && w[1] < w[0])
        .map(|w| (w[2] / w[1]).ln() / (w[1] / w[0]).ln())
        .collect();
    match estimates.as_slice() {
        [] => Err(Error::NotEnoughIterates),
        [only] => Ok(*only),
        [.., a, b] => Ok(0.5 * (a + b)),
    }
}

/// `e_{n+1} / e_n^p` for the last pair of consecutive errors that are both
/// above [`ERROR_FLOOR`], with `p` the claimed order. Bounded values support
/// the claimed order when too few iterates are observable for a COC.
pub fn error_ratio_constant(scheme: &Scheme, p: &Polynomial, z0: Complex64) -> Result<f64> {
    let errors = error_sequence(scheme, p, z0, 100);
    let order = scheme.method.claimed_order() as i32;
    errors
        .windows(2)
        .rfind(|w| w[0] > ERROR_FLOOR && w[1] > ERROR_FLOOR)
        .map(|w| w[1] / w[0].powi(order))
        .ok_or(Error::NotEnoughIterates)
}
