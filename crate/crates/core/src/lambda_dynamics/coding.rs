use std::collections::BTreeMap;

use rug::Float;

use super::context::{check_point, LambdaContext};
use super::homography::Homography;
use super::DynamicsError;
use crate::numerics::Real;
use crate::symbolic::{CodeSeq, Period};

/// The first `n` points of the orbit of `x` and their digits.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub points: Vec<Real>,
    pub code: CodeSeq,
}

/// Iterates `T_λ` from `x` for `n` steps, recording each point and digit.
///
/// Once the orbit reaches 0 it stays there, which is recorded as a period
/// of `0` starting at that index. A point within tolerance of a breakpoint
/// ends the trusted prefix (`code.confidence`).
pub fn trace_orbit(ctx: &LambdaContext, x: &Real, n: usize) -> Result<Orbit, DynamicsError> {
    check_point(x)?;
    let mut points = Vec::with_capacity(n);
    let mut digits = Vec::with_capacity(n);
    let mut confidence = None;
    let mut period = None;
    let mut cur = Float::with_val(ctx.prec(), x);
    for k in 0..n {
        if cur.is_zero() {
            period = Some(Period { start: k, len: 1 });
            points.resize(n, cur.clone());
            digits.resize(n, 0);
            break;
        }
        let step = ctx.step(&cur);
        if step.tie && confidence.is_none() {
            confidence = Some(k);
        }
        points.push(cur);
        digits.push(step.digit as u32);
        cur = step.image;
    }
    if period.is_none() && cur.is_zero() {
        period = Some(Period { start: n, len: 1 });
    }
    Ok(Orbit {
        points,
        code: CodeSeq {
            digits,
            period,
            confidence: confidence.unwrap_or(n),
        },
    })
}

/// `ω_λ(x)`, the first `n` digits of the λ-coding of `x`.
pub fn code_orbit(ctx: &LambdaContext, x: &Real, n: usize) -> Result<CodeSeq, DynamicsError> {
    Ok(trace_orbit(ctx, x, n)?.code)
}

/// Relative window used to pre-select candidate recurrences of the pole.
const RECURRENCE_WINDOW: f64 = 1e-9;

/// `ω_λ(∞)`, the limit of `ω_λ(x)` as `x → ∞`.
///
/// Follows the upper end of the nested cylinders: the next digit is the
/// largest `i` whose branch interval reaches the pole of the current
/// composition. A pole landing on a breakpoint `m_j` resolves to digit
/// `j - 1` and sends the pole back to `+∞`, closing a period that starts at
/// index 0. A finite pole that recurs (within tolerance) is accepted as a
/// period once the digits have repeated one full extra cycle.
pub fn omega_infinity(ctx: &LambdaContext, n: usize) -> CodeSeq {
    let prec = ctx.prec();
    let nctx = ctx.numeric();
    let m = ctx.breakpoints();
    let mut h = Homography::identity(prec);
    let mut pole: Option<Real> = None;
    let mut digits: Vec<u32> = Vec::with_capacity(n);
    let mut seen: BTreeMap<u64, Vec<(usize, Real)>> = BTreeMap::new();
    // (start, len) of a recurrence waiting for confirmation
    let mut candidate: Option<(usize, usize)> = None;

    while digits.len() < n.max(1) {
        let k = digits.len();
        if let Some(p) = &pole {
            if candidate.is_none() {
                let key = p.to_f64();
                let lo = (key * (1.0 - RECURRENCE_WINDOW)).to_bits();
                let hi = (key * (1.0 + RECURRENCE_WINDOW)).to_bits();
                'search: for (_, bucket) in seen.range(lo..=hi) {
                    for (j, q) in bucket {
                        if same_pole(p, q, nctx.boundary_tol()) {
                            candidate = Some((*j, k - j));
                            break 'search;
                        }
                    }
                }
                seen.entry(key.to_bits()).or_default().push((k, p.clone()));
            }
        }

        let (digit, tie) = match &pole {
            None => (ctx.i_lambda(), false),
            Some(p) => {
                let i = m.partition_point(|b| b <= p) - 1;
                if i >= 1 && nctx.near(p, &m[i]) {
                    (i - 1, true)
                } else if i + 1 < m.len() && nctx.near(p, &m[i + 1]) {
                    (i, true)
                } else {
                    (i, false)
                }
            }
        };
        digits.push(digit as u32);
        h = &h * ctx.branch(digit);
        if tie {
            h.c = nctx.zero();
        }
        pole = match h.pole() {
            Some(p) if p > 0 => Some(p),
            _ => None,
        };

        if pole.is_none() {
            return CodeSeq::periodic(&digits, n);
        }
        if let Some((start, len)) = candidate {
            let idx = digits.len() - 1;
            let expected = digits[start + (idx - start) % len];
            if digits[idx] != expected {
                candidate = None;
            } else if idx + 1 >= start + 2 * len {
                let prefix = digits[..start + len].to_vec();
                return extend_periodic(prefix, Period { start, len }, n);
            }
        }
    }
    digits.truncate(n);
    CodeSeq::word(digits)
}

/// Poles recur when they agree to `tol` relative to their size; an
/// absolute test would see spurious recurrences while the pole creeps away
/// from the parabolic fixed point 0.
fn same_pole(p: &Real, q: &Real, tol: f64) -> bool {
    let diff = Float::with_val(p.prec(), p - q).abs();
    diff <= Float::with_val(p.prec(), p * tol)
}

fn extend_periodic(mut prefix: Vec<u32>, period: Period, n: usize) -> CodeSeq {
    let body = prefix[period.start..period.start + period.len].to_vec();
    let mut i = 0;
    while prefix.len() < n {
        prefix.push(body[i % body.len()]);
        i += 1;
    }
    let mut out = CodeSeq::word(prefix);
    out.period = Some(period);
    out.resized(n)
}

/// `ω_λ(∞)` obtained independently from the orbit of λ.
#[derive(Debug, Clone)]
pub struct OmegaCrossCheck {
    pub code: CodeSeq,
    pub orbit_hits_zero: bool,
}

/// Derives `ω_λ(∞)` from `ω_λ(λ)`: when the orbit of λ never meets 0 the
/// two codings differ only in the first digit (`a_0 + 1`); when
/// `T^{j+1}(λ) = 0` the coding of ∞ is the periodic word
/// `(x_0+1) x_1 … x_{j-1} (x_j-1)`.
pub fn cross_check_omega_infinity(ctx: &LambdaContext, n: usize) -> Result<OmegaCrossCheck, DynamicsError> {
    let orbit = trace_orbit(ctx, ctx.lambda(), n)?;
    let code = orbit.code;
    if let Some(p) = code.period.filter(|p| p.start >= 1) {
        if let Some(j) = code.digits[..p.start].iter().rposition(|&d| d > 0) {
            let mut pattern = code.digits[..=j].to_vec();
            pattern[0] += 1;
            pattern[j] -= 1;
            return Ok(OmegaCrossCheck {
                code: CodeSeq::periodic(&pattern, n),
                orbit_hits_zero: true,
            });
        }
    }
    let mut digits = code.digits.clone();
    if let Some(first) = digits.first_mut() {
        *first += 1;
    }
    Ok(OmegaCrossCheck {
        code: CodeSeq {
            digits,
            period: None,
            confidence: code.confidence,
        },
        orbit_hits_zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda_dynamics::context::lambda_k;
    use crate::numerics::NumericContext;

    fn nctx() -> NumericContext {
        NumericContext::default()
    }

    fn s(code: &CodeSeq) -> String {
        code.to_string()
    }

    #[test]
    fn orbit_codes_at_one() {
        let n = nctx();
        let ctx = LambdaContext::from_f64(1.0, &n).unwrap();
        let c = code_orbit(&ctx, &n.real(2), 5).unwrap();
        assert_eq!(s(&c), "11000");
        assert_eq!(c.confidence, 1);
        assert_eq!(c.period, Some(Period { start: 2, len: 1 }));
        let c = code_orbit(&ctx, &n.real(0.5), 5).unwrap();
        assert_eq!(s(&c), "01000");
        let c = code_orbit(&ctx, &n.real(0), 4).unwrap();
        assert_eq!(s(&c), "0000");
        assert_eq!(c.confidence, 4);
    }

    #[test]
    fn orbit_of_generic_point_is_long() {
        let n = nctx();
        let ctx = LambdaContext::from_f64(1.3, &n).unwrap();
        let c = code_orbit(&ctx, &n.real(0.7), 40).unwrap();
        assert_eq!(c.len(), 40);
        assert!(c.digits.iter().all(|&d| d as usize <= ctx.i_lambda()));
    }

    #[test]
    fn omega_infinity_degenerate() {
        let n = nctx();
        let ctx = LambdaContext::new(&lambda_k(5, &n), &n).unwrap();
        let w = omega_infinity(&ctx, 8);
        assert_eq!(s(&w), "33333333");
        assert_eq!(w.period, Some(Period { start: 0, len: 1 }));
        let ctx = LambdaContext::from_f64(1.0, &n).unwrap();
        assert_eq!(s(&omega_infinity(&ctx, 6)), "111111");
    }

    #[test]
    fn omega_infinity_small_lambda() {
        let n = nctx();
        let l = n.real(0.5).sqrt();
        let ctx = LambdaContext::new(&l, &n).unwrap();
        let w = omega_infinity(&ctx, 8);
        assert_eq!(s(&w), "10101010");
        assert_eq!(w.pattern(), Some(&[1, 0][..]));
    }

    #[test]
    fn omega_infinity_matches_cross_check() {
        let n = nctx();
        for lam in [0.4, 0.9, 1.1, 1.3, 1.5, 1.7, 1.85, 1.93] {
            let ctx = LambdaContext::from_f64(lam, &n).unwrap();
            let a = omega_infinity(&ctx, 60);
            let b = cross_check_omega_infinity(&ctx, 60).unwrap();
            let k = b.code.confidence.min(60);
            assert_eq!(a.digits[..k], b.code.digits[..k], "λ = {lam}");
        }
    }

    #[test]
    fn cross_check_when_orbit_hits_zero() {
        let n = nctx();
        // λ = 1/√2: T(λ) = m_1, so T²(λ) = 0
        let ctx = LambdaContext::new(&n.real(0.5).sqrt(), &n).unwrap();
        let b = cross_check_omega_infinity(&ctx, 6).unwrap();
        assert_eq!(s(&b.code), s(&omega_infinity(&ctx, 6)));
    }
}
