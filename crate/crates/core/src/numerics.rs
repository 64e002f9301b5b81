//! Precision policy, the high-precision real type and monotone root finding.
//!
//! Every quantity in the crate (λ, β, orbit points, matrix entries) is an
//! MPFR float carrying the precision of a [`NumericContext`]. Root finding is
//! plain bisection: monotonicity is the only structure the callers can rely
//! on, so bisection is the reference path for every solver in the crate.

use std::cmp::Ordering;

use rug::float::Special;
use rug::ops::Pow;
use rug::{Assign, Float};
use thiserror::Error;

/// Working real type.
pub type Real = Float;

/// Environment variable overriding the default working precision.
pub const PRECISION_ENV: &str = "LB_PRECISION_BITS";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("no sign change on the bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("bisection did not converge within {iterations} iterations (width {width:e})")]
    NonConvergence { iterations: usize, width: f64 },
    #[error("invalid polynomial degree {0} (need k >= 2)")]
    InvalidDegree(u32),
    #[error("invalid numeric context: {0}")]
    InvalidContext(String),
}

/// Precision and tolerance policy shared by all computations.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericContext {
    precision_bits: u32,
    boundary_tol: f64,
    horizon_default: usize,
}

impl Default for NumericContext {
    fn default() -> Self {
        Self::with_precision(Self::DEFAULT_PRECISION_BITS).expect("default precision is valid")
    }
}

impl NumericContext {
    pub const DEFAULT_PRECISION_BITS: u32 = 192;
    pub const DEFAULT_HORIZON: usize = 128;

    pub fn new(
        precision_bits: u32,
        boundary_tol: f64,
        horizon_default: usize,
    ) -> Result<Self, NumericsError> {
        if precision_bits < 64 {
            return Err(NumericsError::InvalidContext(format!(
                "precision_bits = {precision_bits} < 64"
            )));
        }
        if !(boundary_tol > 0.0 && boundary_tol < 2f64.powi(-32)) {
            return Err(NumericsError::InvalidContext(format!(
                "boundary_tol = {boundary_tol:e} outside (0, 2^-32)"
            )));
        }
        if horizon_default == 0 {
            return Err(NumericsError::InvalidContext("horizon_default = 0".into()));
        }
        Ok(Self {
            precision_bits,
            boundary_tol,
            horizon_default,
        })
    }

    /// Context with the tie tolerance set to half the working precision
    /// (2^-96 at the default 192 bits).
    pub fn with_precision(precision_bits: u32) -> Result<Self, NumericsError> {
        Self::new(
            precision_bits,
            Self::default_tol(precision_bits),
            Self::DEFAULT_HORIZON,
        )
    }

    /// Skips validation. Only meant for deliberately degraded runs
    /// (the self-test's low-precision injection).
    pub fn unchecked(precision_bits: u32) -> Self {
        Self {
            precision_bits: precision_bits.max(2),
            boundary_tol: Self::default_tol(precision_bits),
            horizon_default: Self::DEFAULT_HORIZON,
        }
    }

    /// Default context, with the precision taken from `LB_PRECISION_BITS`
    /// when set.
    pub fn from_env() -> Result<Self, NumericsError> {
        match std::env::var(PRECISION_ENV) {
            Ok(v) => {
                let bits = v.trim().parse::<u32>().map_err(|_| {
                    NumericsError::InvalidContext(format!("{PRECISION_ENV}={v} is not an integer"))
                })?;
                Self::with_precision(bits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    fn default_tol(precision_bits: u32) -> f64 {
        2f64.powi(-((precision_bits / 2).max(33) as i32))
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn boundary_tol(&self) -> f64 {
        self.boundary_tol
    }

    pub fn horizon_default(&self) -> usize {
        self.horizon_default
    }

    /// Default iteration cap for bisection.
    pub fn max_iterations(&self) -> usize {
        10 * self.precision_bits as usize
    }

    pub fn real<T>(&self, value: T) -> Real
    where
        Float: Assign<T>,
    {
        Float::with_val(self.precision_bits, value)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.precision_bits)
    }

    pub fn infinity(&self) -> Real {
        Float::with_val(self.precision_bits, Special::Infinity)
    }

    pub fn tol(&self) -> Real {
        self.real(self.boundary_tol)
    }

    /// Parses a decimal string at working precision.
    pub fn parse(&self, s: &str) -> Option<Real> {
        Float::parse(s.trim()).ok().map(|p| self.real(p))
    }

    /// `|a - b| <= boundary_tol`.
    pub fn near(&self, a: &Real, b: &Real) -> bool {
        if a.is_infinite() || b.is_infinite() {
            return a == b;
        }
        let diff = self.real(a - b).abs();
        diff <= self.boundary_tol
    }
}

/// Sign of a function value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(value: &Real) -> Option<Sign> {
        match value.cmp0()? {
            Ordering::Less => Some(Sign::Negative),
            Ordering::Greater => Some(Sign::Positive),
            Ordering::Equal => None,
        }
    }
}

/// Outcome of evaluating a sign oracle at a trial point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Sign(Sign),
    /// The trial point is a root.
    Root,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub lo: Real,
    pub hi: Real,
    pub f_lo_sign: Sign,
    pub f_hi_sign: Sign,
}

impl Bracket {
    pub fn new(lo: Real, hi: Real, f_lo_sign: Sign, f_hi_sign: Sign) -> Result<Self, NumericsError> {
        if f_lo_sign == f_hi_sign || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(NumericsError::NoSignChange {
                lo: lo.to_f64(),
                hi: hi.to_f64(),
            });
        }
        Ok(Self {
            lo,
            hi,
            f_lo_sign,
            f_hi_sign,
        })
    }

    /// Evaluates `f` at both ends. A zero at an endpoint is reported as
    /// `Ok(Err(root))`.
    pub fn evaluate<F>(f: &mut F, lo: Real, hi: Real) -> Result<Result<Self, Real>, NumericsError>
    where
        F: FnMut(&Real) -> Real,
    {
        let flo = f(&lo);
        let fhi = f(&hi);
        let (slo, shi) = match (Sign::of(&flo), Sign::of(&fhi)) {
            (None, _) => return Ok(Err(lo)),
            (_, None) => return Ok(Err(hi)),
            (Some(a), Some(b)) => (a, b),
        };
        Self::new(lo, hi, slo, shi).map(Ok)
    }

    pub fn width(&self) -> Real {
        Float::with_val(self.lo.prec().max(self.hi.prec()), &self.hi - &self.lo)
    }

    pub fn midpoint(&self) -> Real {
        let mut mid = Float::with_val(self.lo.prec().max(self.hi.prec()), &self.lo + &self.hi);
        mid /= 2u32;
        mid
    }
}

/// Shrinks `bracket` with a sign oracle until its width is at most `tol`.
///
/// Stops early (successfully) when the midpoint is no longer representable
/// between the endpoints, i.e. the tolerance is below the working precision.
/// The oracle may fail; its error is propagated.
pub fn bisect_by<F, E>(
    mut probe: F,
    mut bracket: Bracket,
    tol: &Real,
    max_iterations: usize,
) -> Result<Bracket, E>
where
    F: FnMut(&Real) -> Result<Probe, E>,
    E: From<NumericsError>,
{
    for _ in 0..max_iterations {
        if bracket.width() <= *tol {
            return Ok(bracket);
        }
        let mid = bracket.midpoint();
        if mid <= bracket.lo || mid >= bracket.hi {
            return Ok(bracket);
        }
        match probe(&mid)? {
            Probe::Root => {
                bracket.lo = mid.clone();
                bracket.hi = mid;
                return Ok(bracket);
            }
            Probe::Sign(s) if s == bracket.f_lo_sign => bracket.lo = mid,
            Probe::Sign(_) => bracket.hi = mid,
        }
    }
    if bracket.width() <= *tol {
        return Ok(bracket);
    }
    Err(NumericsError::NonConvergence {
        iterations: max_iterations,
        width: bracket.width().to_f64(),
    }
    .into())
}

/// Bisection for a sign change of `f` on `bracket`; returns the midpoint of
/// the final bracket, whose width is at most `tol`.
pub fn bisect<F>(mut f: F, bracket: Bracket, tol: &Real) -> Result<Real, NumericsError>
where
    F: FnMut(&Real) -> Real,
{
    let cap = 10 * bracket.lo.prec() as usize;
    let out = bisect_by::<_, NumericsError>(
        |x| {
            Ok(match Sign::of(&f(x)) {
                Some(s) => Probe::Sign(s),
                None => Probe::Root,
            })
        },
        bracket,
        tol,
        cap,
    )?;
    Ok(out.midpoint())
}

/// Convenience wrapper: evaluates the signs at `lo`, `hi` and bisects.
pub fn bisect_interval<F>(mut f: F, lo: Real, hi: Real, tol: &Real) -> Result<Real, NumericsError>
where
    F: FnMut(&Real) -> Real,
{
    match Bracket::evaluate(&mut f, lo, hi)? {
        Ok(bracket) => bisect(f, bracket, tol),
        Err(root) => Ok(root),
    }
}

/// Largest real root of `X^k - X^(k-1) - 1`, the unique root in (1, 2].
pub fn largest_real_root(k: u32, tol: &Real, nctx: &NumericContext) -> Result<Real, NumericsError> {
    if k < 2 {
        return Err(NumericsError::InvalidDegree(k));
    }
    let prec = nctx.precision_bits();
    let poly = |x: &Real| {
        // X^(k-1) (X - 1) - 1
        let head = Float::with_val(prec, x.pow(k - 1));
        let mut v = Float::with_val(prec, x - 1u32);
        v *= &head;
        v -= 1u32;
        v
    };
    bisect_interval(poly, nctx.real(1u32), nctx.real(2u32), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> NumericContext {
        NumericContext::default()
    }

    #[test]
    fn default_policy() {
        let n = ctx();
        assert_eq!(n.precision_bits(), 192);
        assert_eq!(n.boundary_tol(), 2f64.powi(-96));
        assert!(NumericContext::with_precision(32).is_err());
        assert!(NumericContext::new(192, 1e-3, 10).is_err());
    }

    #[test]
    fn bisect_linear() {
        let n = ctx();
        let tol = n.real(1e-12);
        let r = bisect_interval(|x| n.real(x - 1u32), n.real(0), n.real(2), &tol).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn bisect_golden_against_quadratic_formula() {
        let n = ctx();
        let tol = n.real(1e-12);
        let r = bisect_interval(
            |x| {
                let x2 = n.real(x * x);
                n.real(&x2 - x) - 1u32
            },
            n.real(1),
            n.real(2),
            &tol,
        )
        .unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((r.to_f64() - golden).abs() <= 1e-12);
    }

    /// Independent f64 Newton iteration for x^3 - x^2 - 1.
    fn newton_cubic() -> f64 {
        let mut x = 1.5f64;
        for _ in 0..60 {
            let f = x * x * x - x * x - 1.0;
            let df = 3.0 * x * x - 2.0 * x;
            x -= f / df;
        }
        x
    }

    #[test]
    fn bisect_cubic_against_newton() {
        let n = ctx();
        let tol = n.real(1e-12);
        let r = bisect_interval(
            |x| {
                let x2 = n.real(x * x);
                let x3 = n.real(&x2 * x);
                n.real(&x3 - &x2) - 1u32
            },
            n.real(1),
            n.real(2),
            &tol,
        )
        .unwrap();
        let oracle = newton_cubic();
        assert!((oracle - 1.465_571_231_876_768).abs() < 1e-15);
        assert!((r.to_f64() - oracle).abs() <= 1e-12);
    }

    #[test]
    fn no_sign_change() {
        let n = ctx();
        let tol = n.real(1e-12);
        let err = bisect_interval(|x| n.real(x * x) + 1u32, n.real(0), n.real(2), &tol).unwrap_err();
        assert!(matches!(err, NumericsError::NoSignChange { .. }));
    }

    #[test]
    fn non_convergence_on_tiny_cap() {
        let n = ctx();
        let bracket = Bracket::new(n.real(0), n.real(2), Sign::Negative, Sign::Positive).unwrap();
        let err = bisect_by::<_, NumericsError>(
            |x| Ok(Probe::Sign(if *x < 1.0 { Sign::Negative } else { Sign::Positive })),
            bracket,
            &n.real(1e-12),
            5,
        )
        .unwrap_err();
        assert!(matches!(err, NumericsError::NonConvergence { iterations: 5, .. }));
    }

    #[test]
    fn bisect_result_brackets_sign_change() {
        let n = ctx();
        let tol = n.real(1e-12);
        let f = |x: &Real| n.real(x * x) - 2u32;
        let r = bisect_interval(f, n.real(0), n.real(2), &tol).unwrap();
        let left = f(&n.real(&r - &tol));
        let right = f(&n.real(&r + &tol));
        assert!(left < 0 && right > 0);
    }

    #[test]
    fn largest_root_checkpoints() {
        let n = ctx();
        let tol = n.real(1e-12);
        let r2 = largest_real_root(2, &tol, &n).unwrap();
        assert!((r2.to_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        let r3 = largest_real_root(3, &tol, &n).unwrap();
        assert!((r3.to_f64() - newton_cubic()).abs() < 1e-12);
        let r8 = largest_real_root(8, &tol, &n).unwrap();
        assert!(r8 > 1.0 && r8 < 1.24);
        assert_eq!(largest_real_root(1, &tol, &n), Err(NumericsError::InvalidDegree(1)));
    }

    #[test]
    fn largest_root_decreases_with_degree() {
        let n = ctx();
        let tol = n.real(1e-15);
        let roots: Vec<f64> = (2..=12)
            .map(|k| largest_real_root(k, &tol, &n).unwrap().to_f64())
            .collect();
        for w in roots.windows(2) {
            assert!(w[1] < w[0], "{roots:?}");
        }
    }
}
