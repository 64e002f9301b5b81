use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

use super::CorrespondenceError;
use crate::beta_shift::{o_beta_one, value_of_digits, value_of_sequence, BetaContext};
use crate::lambda_dynamics::{code_orbit, lambda_from_tau, omega_infinity, LambdaContext};
use crate::numerics::{
    bisect_by, bisect_interval, largest_real_root, Bracket, NumericContext, Probe, Real, Sign,
};
use crate::symbolic::{compare_shifted, CodeSeq, SeqOrdering};

const PREFIX_START: usize = 64;
const PREFIX_CAP: usize = 1 << 17;
const MAX_ROOT_DEGREE: u32 = 1 << 24;

/// `β(λ)`: the unique `β > 1` with `O_β(1) = ω_λ(∞)`.
#[derive(Debug, Clone)]
pub struct BetaSolution {
    pub beta: Real,
    /// Final bisection bracket.
    pub lo: Real,
    pub hi: Real,
    /// The prefix of `ω_λ(∞)` the solution was derived from.
    pub omega: CodeSeq,
    /// `ω_λ(∞)` was recognized as eventually periodic and β solved exactly.
    pub periodic: bool,
    /// `context.o_one` is `O_β(1) = ω_λ(∞)`.
    pub context: BetaContext,
}

fn check_tol(tol: &Real) -> Result<(), CorrespondenceError> {
    if !tol.is_finite() || *tol <= 0 {
        return Err(CorrespondenceError::InvalidTolerance);
    }
    Ok(())
}

fn floor_of(x: &Real) -> u32 {
    Float::with_val(x.prec(), x.floor_ref()).to_u32_saturating().unwrap_or(u32::MAX)
}

/// `β^{q+1} − Σ p_j β^{q−j} − 1`, whose largest root is the β with
/// `O_β(1) = (p_0 … p_q)^∞`.
fn period_polynomial(pattern: &[u32], beta: &Real) -> Real {
    let mut v = Float::with_val(beta.prec(), 1);
    for &p in pattern {
        v *= beta;
        v -= p;
    }
    v - 1u32
}

pub fn beta_of_lambda(ctx: &LambdaContext, tol: &Real) -> Result<BetaSolution, CorrespondenceError> {
    check_tol(tol)?;
    let nctx = ctx.numeric();
    let prec = nctx.precision_bits();
    let omega = omega_infinity(ctx, PREFIX_START);
    let top = omega.digits[0];
    let floor_lo = Float::with_val(prec, 1) + Float::with_val(prec, Float::i_exp(1, -40));
    let lo = Float::with_val(prec, top).max(&floor_lo);

    if let Some(period) = omega.period {
        let hi = nctx.real(top + 2);
        let exact = nctx.zero();
        let root = if period.start == 0 {
            let pattern = omega.pattern().expect("materialized period").to_vec();
            bisect_interval(|b| period_polynomial(&pattern, b), lo, hi, &exact)?
        } else {
            let seq = omega.clone();
            bisect_interval(
                |b| match value_of_sequence(b, &seq, nctx) {
                    Some(v) => 1 - v,
                    None => nctx.zero(),
                },
                lo,
                hi,
                &exact,
            )?
        };
        let context = BetaContext {
            beta: root.clone(),
            floor_beta: floor_of(&root),
            o_one: omega.clone(),
        };
        return Ok(BetaSolution {
            lo: root.clone(),
            hi: root.clone(),
            beta: root,
            omega,
            periodic: true,
            context,
        });
    }

    let hi = nctx.real(top + 1);
    let bracket = Bracket::new(lo, hi.clone(), Sign::Positive, Sign::Negative)?;
    let mut omega = omega;
    let mut n = PREFIX_START;
    let half_tol = Float::with_val(prec, tol / 2u32);
    let probe = |mid: &Real| -> Result<Probe, CorrespondenceError> {
        loop {
            let (value, _) = value_of_digits(mid, &omega.digits, nctx);
            let f = value - 1u32;
            // digits of ω_λ(∞) never exceed its first digit
            let len = i32::try_from(omega.len()).unwrap_or(i32::MAX);
            let mut tail = Float::with_val(prec, mid.pow(-len));
            tail *= top;
            tail /= Float::with_val(prec, mid - 1u32);
            if f > 0 {
                return Ok(Probe::Sign(Sign::Positive));
            }
            if Float::with_val(prec, &f + &tail) < 0 {
                return Ok(Probe::Sign(Sign::Negative));
            }
            // |F(β) − F(β*)| ≥ top·|β − β*|/hi², so the ambiguity in β is at most tail·hi²/top
            let mut spread = Float::with_val(prec, &hi * &hi);
            spread *= &tail;
            spread /= top;
            if spread <= half_tol {
                return Ok(Probe::Root);
            }
            if n >= PREFIX_CAP {
                return Err(CorrespondenceError::PrefixTooShort(n));
            }
            n *= 2;
            omega = omega_infinity(ctx, n);
        }
    };
    let out = bisect_by(probe, bracket, tol, nctx.max_iterations())?;
    let beta = out.midpoint();
    // β(λ) is defined by O_β(1) = ω_λ(∞); near an integer the bracket can
    // straddle it, so the greedy expansion at the midpoint is not used here
    let context = BetaContext {
        beta: beta.clone(),
        floor_beta: floor_of(&beta),
        o_one: omega.clone(),
    };
    Ok(BetaSolution {
        beta,
        lo: out.lo,
        hi: out.hi,
        omega,
        periodic: false,
        context,
    })
}

/// `λ(β)`, the inverse of the increasing bijection `λ ↦ β(λ)` from `(0, 2)`
/// onto `(1, ∞)`.
///
/// `β(λ_mid)` is compared with β through the order of their expansions:
/// `O_{β(λ)}(1) = ω_λ(∞)` and `β ↦ O_β(1)` is strictly increasing, so the
/// lexicographic comparison of `ω_λ(∞)` with `O_β(1)` decides the sign. This
/// stays sharp on the plateaus of the curve, where `β(λ)` is numerically
/// flat. A periodic `O_β(1)` is compared exactly; otherwise only the digits
/// the working precision supports are used.
///
/// Away from the plateaus the sign is taken from the valuation of `ω_λ(∞)`
/// at β instead: a greedy `O_β(1)` computed from a rounded β can switch to
/// the other expansion of a nearby value (`…d 0 0 0…` against
/// `…(d−1) O_β(1)`), and the digit order would then point the wrong way.
pub fn lambda_of_beta(beta: &Real, tol: &Real, nctx: &NumericContext) -> Result<Real, CorrespondenceError> {
    check_tol(tol)?;
    if !beta.is_finite() || *beta <= 1 {
        return Err(CorrespondenceError::BetaOutOfRange(beta.to_f64()));
    }
    let prec = nctx.precision_bits();
    let (lo, hi) = lambda_bracket(beta, tol, nctx)?;
    let reliable = reliable_digits(beta, prec);
    let target = o_beta_one(beta, reliable, nctx)?;
    let limit = if target.period.is_some() { PREFIX_CAP } else { reliable };
    let margin = Float::with_val(prec, Float::i_exp(1, -(prec.saturating_sub(24) as i32)));
    let bracket = Bracket::new(lo, hi, Sign::Negative, Sign::Positive)?;
    // the prefix needed to separate grows as the bracket closes in
    let mut hint = PREFIX_START.min(limit);
    let out = bisect_by(
        |lam: &Real| -> Result<Probe, CorrespondenceError> {
            let ctx = LambdaContext::new(lam, nctx)?;
            let mut n = hint;
            loop {
                hint = (n / 2).max(PREFIX_START).min(limit);
                let omega = omega_infinity(&ctx, n);
                if let Some(sign) = valuation_sign(beta, &omega, &margin, nctx) {
                    return Ok(Probe::Sign(sign));
                }
                match compare_shifted(&omega, 0, &target) {
                    SeqOrdering::Less => return Ok(Probe::Sign(Sign::Negative)),
                    SeqOrdering::Greater => return Ok(Probe::Sign(Sign::Positive)),
                    SeqOrdering::Equal => return Ok(Probe::Root),
                    SeqOrdering::Tie if n >= limit => return Ok(Probe::Root),
                    SeqOrdering::Tie => n = (2 * n).min(limit),
                }
            }
        },
        bracket,
        tol,
        nctx.max_iterations(),
    )?;
    Ok(out.midpoint())
}

/// Sign of `β(λ) − β` read from `v = Σ ω_j β^{−j−1}`, which equals 1 at
/// `β = β(λ)` and decreases in β. `None` when `v − 1` is inside the
/// truncation tail and roundoff.
fn valuation_sign(beta: &Real, omega: &CodeSeq, margin: &Real, nctx: &NumericContext) -> Option<Sign> {
    let prec = nctx.precision_bits();
    let (value, _) = value_of_digits(beta, &omega.digits, nctx);
    let f = value - 1u32;
    if f > *margin {
        return Some(Sign::Positive);
    }
    let len = i32::try_from(omega.len()).unwrap_or(i32::MAX);
    let mut tail = Float::with_val(prec, beta.pow(-len));
    tail *= omega.digits[0];
    tail /= Float::with_val(prec, beta - 1u32);
    tail += margin;
    if Float::with_val(prec, &f + &tail) < 0 {
        return Some(Sign::Negative);
    }
    None
}

/// Number of leading digits of `O_β(1)` that survive the roundoff of the
/// greedy orbit, which grows by a factor β per step.
fn reliable_digits(beta: &Real, prec: u32) -> usize {
    let ln_beta = Float::with_val(prec, beta.ln_ref()).to_f64();
    let usable = f64::from(prec.saturating_sub(24)) * std::f64::consts::LN_2;
    ((usable / ln_beta).floor() as usize).clamp(1, PREFIX_CAP)
}

/// Brackets `λ(β)` between consecutive closed-form checkpoints:
/// `β(2cos(π/k)) = k − 1` and `β(1/√k)` = largest root of `X^k − X^{k−1} − 1`.
fn lambda_bracket(beta: &Real, tol: &Real, nctx: &NumericContext) -> Result<(Real, Real), CorrespondenceError> {
    let prec = nctx.precision_bits();
    if *beta >= 2 {
        let c = Float::with_val(prec, beta.ceil_ref()).to_u32_saturating().unwrap_or(u32::MAX);
        let k = c.saturating_add(1);
        let lk = |k: u32| crate::lambda_dynamics::lambda_k(k, nctx);
        return Ok((lk(k - 1), lk(k)));
    }
    let root_tol = Float::with_val(prec, tol / 8u32);
    let root = |k: u32| largest_real_root(k, &root_tol, nctx);
    // r_k decreases to 1; find the smallest k ≥ 2 with r_k ≤ β
    let mut hi_k = 2u32;
    while root(hi_k)? > *beta {
        if hi_k >= MAX_ROOT_DEGREE {
            return Err(CorrespondenceError::BetaOutOfRange(beta.to_f64()));
        }
        hi_k *= 2;
    }
    let mut lo_k = hi_k / 2;
    while hi_k - lo_k > 1 {
        let mid = lo_k + (hi_k - lo_k) / 2;
        if root(mid)? > *beta {
            lo_k = mid;
        } else {
            hi_k = mid;
        }
    }
    let inv_sqrt = |k: u32| Float::with_val(prec, k).sqrt().recip();
    Ok((inv_sqrt(hi_k), inv_sqrt(hi_k - 1)))
}

/// `φ_λ(x) ∈ [0, 1)` read through the first `n` digits of `ω_λ(x)`.
#[derive(Debug, Clone)]
pub struct PhiValue {
    pub t: Real,
    /// Bound on the contribution of the digits beyond the horizon; zero when
    /// the coding is known to end in zeros.
    pub tail_bound: Real,
    pub code: CodeSeq,
}

pub fn phi(ctx: &LambdaContext, bctx: &BetaContext, x: &Real, n: usize) -> Result<PhiValue, CorrespondenceError> {
    let code = code_orbit(ctx, x, n)?;
    let nctx = ctx.numeric();
    let (t, tail) = value_of_digits(&bctx.beta, &code.digits, nctx);
    let tail_bound = if code.is_eventually_zero() || code.period.is_some_and(|p| p.start >= code.len()) {
        nctx.zero()
    } else {
        tail
    };
    Ok(PhiValue { t, tail_bound, code })
}

/// Topological entropy `log β(λ)`.
pub fn entropy(ctx: &LambdaContext, tol: &Real) -> Result<Real, CorrespondenceError> {
    Ok(beta_of_lambda(ctx, tol)?.beta.ln())
}

/// One sample of `τ ↦ β(2cos(π/τ))`.
#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub tau: f64,
    pub lambda: f64,
    pub beta: f64,
    pub entropy: f64,
    pub omega_prefix: String,
}

pub fn curve_point(
    tau: &Real,
    tol: &Real,
    prefix_len: usize,
    nctx: &NumericContext,
) -> Result<CurvePoint, CorrespondenceError> {
    let lambda = lambda_from_tau(tau, nctx)?;
    let ctx = LambdaContext::new(&lambda, nctx)?;
    let sol = beta_of_lambda(&ctx, tol)?;
    let prefix = sol.omega.resized(prefix_len);
    Ok(CurvePoint {
        tau: tau.to_f64(),
        lambda: lambda.to_f64(),
        beta: sol.beta.to_f64(),
        entropy: Float::with_val(nctx.precision_bits(), sol.beta.ln_ref()).to_f64(),
        omega_prefix: prefix.to_string(),
    })
}
