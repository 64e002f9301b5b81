//! λ-continued fractions `⟦b_1, …, b_ℓ⟧_λ = 1/(b_1 λ − 1/(b_2 λ − ⋯ − 1/(b_ℓ λ)))`,
//! the run-length conversion from `T_λ` codings to their digits, and the
//! expansion of a real number with its convergents.

use std::fmt;

use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::lambda_dynamics::{trace_orbit, DynamicsError, LambdaContext};
use crate::numerics::{NumericContext, Real};
use crate::symbolic::CodeSeq;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CfError {
    #[error("continued fraction digits must be positive")]
    ZeroDigit,
    #[error("division by a value within tolerance of zero at level {level}")]
    DivisionNearZero { level: usize },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Positive digits `b_1 … b_ℓ` of a `⟦·⟧` continued fraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CFDigits(Vec<u32>);

impl CFDigits {
    pub fn new(digits: Vec<u32>) -> Result<Self, CfError> {
        if digits.contains(&0) {
            return Err(CfError::ZeroDigit);
        }
        Ok(Self(digits))
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `k` digits.
    pub fn prefix(&self, k: usize) -> CFDigits {
        CFDigits(self.0[..k.min(self.0.len())].to_vec())
    }

    /// The same value written `[0; a_1, a_2, …]` with partial quotients of
    /// alternating sign: `a_j = (-1)^(j+1) b_j`.
    pub fn alternating(&self) -> AlternatingForm<'_> {
        AlternatingForm(self)
    }
}

impl fmt::Display for CFDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("⟦")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("⟧")
    }
}

pub struct AlternatingForm<'a>(&'a CFDigits);

impl fmt::Display for AlternatingForm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[0")?;
        for (i, d) in self.0 .0.iter().enumerate() {
            let sep = if i == 0 { "; " } else { ", " };
            let sign = if i % 2 == 0 { "" } else { "-" };
            write!(f, "{sep}{sign}{d}")?;
        }
        f.write_str("]")
    }
}

/// Evaluates `⟦b_1, …, b_ℓ⟧_λ` from the innermost level out. Level indices
/// in errors are 1-based, matching `b_level`.
pub fn eval_cf(lambda: &Real, digits: &CFDigits, nctx: &NumericContext) -> Result<Real, CfError> {
    let prec = nctx.precision_bits();
    let mut tail = nctx.zero();
    for (idx, &b) in digits.0.iter().enumerate().rev() {
        let mut den = Float::with_val(prec, lambda * b);
        den -= &tail;
        if Float::with_val(prec, den.abs_ref()) <= nctx.boundary_tol() {
            return Err(CfError::DivisionNearZero { level: idx + 1 });
        }
        tail = den.recip();
    }
    Ok(tail)
}

/// Converts a coding `0^{e_0} a_0 0^{e_1} a_1 …` into the digits of the left
/// endpoint of its cylinder: the blocks `e_0+1, 1^{a_0-1}`, then
/// `e_i+2, 1^{a_i-1}` for each later nonzero digit.
pub fn coding_to_cf(code: &[u32]) -> CFDigits {
    let mut out = Vec::with_capacity(code.iter().map(|&d| d as usize).sum());
    let mut zeros = 0u32;
    let mut first = true;
    for &d in code {
        if d == 0 {
            zeros += 1;
            continue;
        }
        out.push(zeros + if first { 1 } else { 2 });
        out.extend(std::iter::repeat_n(1, d as usize - 1));
        zeros = 0;
        first = false;
    }
    CFDigits(out)
}

#[derive(Debug, Clone)]
pub struct Convergent {
    /// Number of CF digits used, `x_0 + … + x_k`.
    pub cf_prefix_len: usize,
    /// Left endpoint of the cylinder of the first `k + 1` coding digits.
    pub value: Real,
    /// Width of that cylinder, possibly `+∞`; bounds `|x − value|`.
    pub cylinder_width: Real,
}

#[derive(Debug, Clone)]
pub struct Expansion {
    pub code: CodeSeq,
    pub cf: CFDigits,
    pub convergents: Vec<Convergent>,
    /// The coding ends in zeros: the last convergent equals `x`.
    pub finite: bool,
}

/// Expands `x ≥ 0` along the first `n` digits of its `T_λ` coding.
pub fn expand_x(ctx: &LambdaContext, x: &Real, n: usize) -> Result<Expansion, CfError> {
    let orbit = trace_orbit(ctx, x, n)?;
    let code = orbit.code;
    let nctx = ctx.numeric();
    let finite = code.is_eventually_zero() || code.period.is_some_and(|p| p.start >= code.len());
    let significant = match code.period {
        Some(p) if finite => p.start.min(code.len()),
        _ => code.len(),
    };
    let cf = coding_to_cf(&code.digits[..significant]);

    let mut convergents = Vec::with_capacity(significant);
    let mut cf_len = 0usize;
    for k in 0..significant {
        cf_len += code.digits[k] as usize;
        let prefix = &code.digits[..=k];
        let partial = coding_to_cf(prefix);
        let value = eval_cf(ctx.lambda(), &partial, nctx)?;
        let cylinder = ctx.cylinder(prefix)?;
        convergents.push(Convergent {
            cf_prefix_len: cf_len,
            value,
            cylinder_width: cylinder.width(),
        });
    }
    if finite {
        let value = eval_cf(ctx.lambda(), &cf, nctx)?;
        convergents.push(Convergent {
            cf_prefix_len: cf.len(),
            value,
            cylinder_width: nctx.zero(),
        });
    }
    Ok(Expansion {
        code,
        cf,
        convergents,
        finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nctx() -> NumericContext {
        NumericContext::default()
    }

    fn cf(d: &[u32]) -> CFDigits {
        CFDigits::new(d.to_vec()).unwrap()
    }

    #[test]
    fn evaluation() {
        let n = nctx();
        let l = n.real(1.5);
        assert!((eval_cf(&l, &cf(&[1]), &n).unwrap().to_f64() - 2.0 / 3.0).abs() < 1e-15);
        assert!((eval_cf(&l, &cf(&[1, 1]), &n).unwrap().to_f64() - 1.2).abs() < 1e-15);
        assert_eq!(eval_cf(&l, &CFDigits::default(), &n).unwrap(), 0);
        // 1·1 − 1/(1·1) = 0
        let one = n.real(1);
        assert_eq!(
            eval_cf(&one, &cf(&[1, 1]), &n),
            Err(CfError::DivisionNearZero { level: 1 })
        );
        assert_eq!(CFDigits::new(vec![1, 0]), Err(CfError::ZeroDigit));
    }

    #[test]
    fn run_length_conversion() {
        assert_eq!(coding_to_cf(&[1]).digits(), &[1]);
        assert_eq!(coding_to_cf(&[0, 1]).digits(), &[2]);
        assert_eq!(coding_to_cf(&[2]).digits(), &[1, 1]);
        assert_eq!(coding_to_cf(&[1, 1, 0, 0]).digits(), &[1, 2]);
        assert_eq!(coding_to_cf(&[0, 0, 3, 0, 1, 2]).digits(), &[3, 1, 1, 3, 2, 1]);
        assert!(coding_to_cf(&[0, 0, 0]).is_empty());
    }

    #[test]
    fn formats() {
        let d = cf(&[1, 2, 3]);
        assert_eq!(d.to_string(), "⟦1,2,3⟧");
        assert_eq!(d.alternating().to_string(), "[0; 1, -2, 3]");
    }

    #[test]
    fn finite_expansions() {
        let n = nctx();
        let ctx = LambdaContext::from_f64(1.0, &n).unwrap();
        let e = expand_x(&ctx, &n.real(2), 8).unwrap();
        assert!(e.finite);
        assert_eq!(e.cf.digits(), &[1, 2]);
        assert_eq!(e.convergents.last().unwrap().value, 2);

        let e = expand_x(&ctx, &n.real(0), 8).unwrap();
        assert!(e.finite && e.cf.is_empty());

        let ctx = LambdaContext::from_f64(1.5, &n).unwrap();
        let e = expand_x(&ctx, &ctx.breakpoints()[2].clone(), 8).unwrap();
        assert!(e.finite);
        assert_eq!(e.cf.digits(), &[1, 1]);
    }

    #[test]
    fn convergents_bracket_x() {
        let n = nctx();
        let ctx = LambdaContext::from_f64(1.37, &n).unwrap();
        let x = n.real(0.912);
        let e = expand_x(&ctx, &x, 200).unwrap();
        assert!(!e.finite);
        let mut prev = n.zero();
        for c in &e.convergents {
            assert!(c.value >= prev);
            let err = Float::with_val(192, &x - &c.value);
            assert!(err >= 0 && err <= c.cylinder_width);
            prev = c.value.clone();
        }
        assert!(e.convergents.last().unwrap().cylinder_width < 1e-12);
    }
}
