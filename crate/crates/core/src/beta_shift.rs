//! The β-shift `S_β(t) = βt mod 1` on `[0, 1)`, greedy expansions, the
//! quasi-greedy expansion `O_β(1)` and Parry's admissibility criterion.

use rug::ops::Pow;
use rug::Float;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{NumericContext, Real};
use crate::symbolic::{compare_shifted, CodeSeq, Period, SeqOrdering};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BetaError {
    #[error("t = {0} is outside [0, 1)")]
    OutOfUnitInterval(f64),
    #[error("beta = {0} must exceed 1")]
    BetaTooSmall(f64),
    #[error("digit {digit} at index {index} exceeds the alphabet bound {max}")]
    AlphabetMismatch { index: usize, digit: u32, max: u32 },
}

/// One application of `S_β`.
#[derive(Debug, Clone)]
pub struct BetaStep {
    pub image: Real,
    pub digit: u32,
    /// `βt` was within tolerance of a positive integer; resolved as an exact
    /// hit on that integer (image 0).
    pub near_boundary: bool,
}

/// Largest admissible digit, `⌈β⌉ − 1`.
pub fn max_digit(beta: &Real) -> u32 {
    let c = Float::with_val(beta.prec(), beta.ceil_ref());
    c.to_u32_saturating().unwrap_or(u32::MAX).saturating_sub(1)
}

fn check_beta(beta: &Real) -> Result<(), BetaError> {
    if !beta.is_finite() || *beta <= 1 {
        return Err(BetaError::BetaTooSmall(beta.to_f64()));
    }
    Ok(())
}

/// `S_β(t)` and the index `j` of the interval `J_j = [j/β, (j+1)/β)`
/// containing `t`.
pub fn s_beta(beta: &Real, t: &Real, nctx: &NumericContext) -> Result<BetaStep, BetaError> {
    check_beta(beta)?;
    if !t.is_finite() || *t < 0 || *t >= 1 {
        return Err(BetaError::OutOfUnitInterval(t.to_f64()));
    }
    let prec = nctx.precision_bits();
    let bt = Float::with_val(prec, beta * t);
    let nearest = Float::with_val(prec, bt.round_ref());
    if nearest >= 1 && nctx.near(&bt, &nearest) {
        let digit = nearest.to_u32_saturating().unwrap_or(u32::MAX).min(max_digit(beta) + 1);
        if digit <= max_digit(beta) {
            return Ok(BetaStep {
                image: nctx.zero(),
                digit,
                near_boundary: true,
            });
        }
    }
    let fl = Float::with_val(prec, bt.floor_ref());
    let digit = fl.to_u32_saturating().unwrap_or(0).min(max_digit(beta));
    let mut image = bt - digit;
    if image < 0 {
        image = nctx.zero();
    }
    Ok(BetaStep {
        image,
        digit,
        near_boundary: false,
    })
}

/// First `n` digits of the greedy expansion `O_β(t)`.
///
/// An orbit reaching 0 is recorded as a period of `0`; a near-integer
/// `βS^k(t)` ends the trusted prefix at `k`.
pub fn greedy_coding(beta: &Real, t: &Real, n: usize, nctx: &NumericContext) -> Result<CodeSeq, BetaError> {
    check_beta(beta)?;
    if !t.is_finite() || *t < 0 || *t >= 1 {
        return Err(BetaError::OutOfUnitInterval(t.to_f64()));
    }
    let mut digits = Vec::with_capacity(n);
    let mut confidence = None;
    let mut period = None;
    let mut cur = Float::with_val(nctx.precision_bits(), t);
    for k in 0..n {
        if cur.is_zero() {
            period = Some(Period { start: k, len: 1 });
            digits.resize(n, 0);
            break;
        }
        let step = s_beta(beta, &cur, nctx)?;
        if step.near_boundary && confidence.is_none() {
            confidence = Some(k);
        }
        digits.push(step.digit);
        cur = step.image;
    }
    if period.is_none() && cur.is_zero() {
        period = Some(Period { start: n, len: 1 });
    }
    Ok(CodeSeq {
        digits,
        period,
        confidence: confidence.unwrap_or(n),
    })
}

/// `O_β(1)`, the quasi-greedy expansion of 1.
///
/// Integer β gives `(β−1)^∞`. Otherwise the greedy orbit of `β − ⌊β⌋` is
/// followed; if it reaches 0 after the last nonzero digit `b_ℓ`, the result
/// is the periodic word `⌊β⌋ b_0 … b_{ℓ−1} (b_ℓ − 1)`.
pub fn o_beta_one(beta: &Real, n: usize, nctx: &NumericContext) -> Result<CodeSeq, BetaError> {
    check_beta(beta)?;
    let prec = nctx.precision_bits();
    let nearest = Float::with_val(prec, beta.round_ref());
    if nctx.near(beta, &nearest) {
        let b = nearest.to_u32_saturating().unwrap_or(u32::MAX);
        return Ok(CodeSeq::periodic(&[b - 1], n));
    }
    let fl = Float::with_val(prec, beta.floor_ref());
    let floor = fl.to_u32_saturating().unwrap_or(u32::MAX);
    let frac = Float::with_val(prec, beta - &fl);
    let tail = greedy_coding(beta, &frac, n.saturating_sub(1), nctx)?;
    if let Some(p) = tail.period {
        if let Some(last) = tail.digits[..p.start.min(tail.len())].iter().rposition(|&d| d > 0) {
            let mut pattern = Vec::with_capacity(last + 2);
            pattern.push(floor);
            pattern.extend_from_slice(&tail.digits[..=last]);
            *pattern.last_mut().unwrap() -= 1;
            return Ok(CodeSeq::periodic(&pattern, n));
        }
    }
    let mut digits = Vec::with_capacity(n);
    digits.push(floor);
    digits.extend_from_slice(&tail.digits);
    digits.truncate(n);
    Ok(CodeSeq {
        digits,
        period: None,
        confidence: (tail.confidence + 1).min(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    Undetermined,
}

/// Parry's criterion: `word` is a β-expansion iff every shift of it is
/// strictly below `O_β(1)`. Period information on either side lets exact
/// equality be decided; otherwise a tie over the common horizon is
/// `Undetermined`.
pub fn parry_admissible(word: &CodeSeq, o_one: &CodeSeq) -> Result<Admissibility, BetaError> {
    let Some(&top) = o_one.digits.first() else {
        return Err(BetaError::AlphabetMismatch {
            index: 0,
            digit: 0,
            max: 0,
        });
    };
    if let Some((index, &digit)) = word.digits.iter().enumerate().find(|(_, &d)| d > top) {
        return Err(BetaError::AlphabetMismatch { index, digit, max: top });
    }
    let shifts = match word.period {
        Some(p) => p.start + p.len,
        None => word.len(),
    };
    let mut undetermined = false;
    for k in 0..shifts {
        match compare_shifted(word, k, o_one) {
            SeqOrdering::Less => {}
            SeqOrdering::Greater | SeqOrdering::Equal => return Ok(Admissibility::Inadmissible),
            SeqOrdering::Tie => undetermined = true,
        }
    }
    Ok(if undetermined {
        Admissibility::Undetermined
    } else {
        Admissibility::Admissible
    })
}

/// `Σ d_n β^{−(n+1)}` over the word, and a bound on what any admissible
/// continuation can add: `(⌈β⌉−1) β^{−len} / (β−1)`.
pub fn value_of_digits(beta: &Real, word: &[u32], nctx: &NumericContext) -> (Real, Real) {
    let prec = nctx.precision_bits();
    // Horner from the last digit: v = (d_0 + (d_1 + …)/β)/β
    let mut value = nctx.zero();
    for &d in word.iter().rev() {
        value += d;
        value /= beta;
    }
    let len = i32::try_from(word.len()).unwrap_or(i32::MAX);
    let mut tail = Float::with_val(prec, beta.pow(-len));
    tail *= max_digit(beta);
    tail /= Float::with_val(prec, beta - 1u32);
    (value, tail)
}

/// Exact value of an eventually periodic digit sequence; `None` when the
/// sequence carries no period.
pub fn value_of_sequence(beta: &Real, seq: &CodeSeq, nctx: &NumericContext) -> Option<Real> {
    let p = seq.period?;
    let pattern = seq.pattern()?;
    let prec = nctx.precision_bits();
    let (head, _) = value_of_digits(beta, &seq.digits[..p.start], nctx);
    let (body, _) = value_of_digits(beta, pattern, nctx);
    let len = i32::try_from(p.len).ok()?;
    let start = i32::try_from(p.start).ok()?;
    let denom = 1 - Float::with_val(prec, beta.pow(-len));
    let mut tail = body / denom;
    tail *= Float::with_val(prec, beta.pow(-start));
    Some(head + tail)
}

/// A validated β together with a prefix of `O_β(1)`.
#[derive(Debug, Clone)]
pub struct BetaContext {
    pub beta: Real,
    pub floor_beta: u32,
    pub o_one: CodeSeq,
}

impl BetaContext {
    pub fn new(beta: &Real, n: usize, nctx: &NumericContext) -> Result<Self, BetaError> {
        let o_one = o_beta_one(beta, n, nctx)?;
        let fl = Float::with_val(nctx.precision_bits(), beta.floor_ref());
        Ok(Self {
            beta: Float::with_val(nctx.precision_bits(), beta),
            floor_beta: fl.to_u32_saturating().unwrap_or(u32::MAX),
            o_one,
        })
    }

    pub fn o_one_period(&self) -> Option<Period> {
        self.o_one.period
    }

    pub fn admissible(&self, word: &CodeSeq) -> Result<Admissibility, BetaError> {
        parry_admissible(word, &self.o_one)
    }
}
