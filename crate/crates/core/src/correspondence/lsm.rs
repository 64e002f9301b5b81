use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::CorrespondenceError;
use crate::lambda_dynamics::{lambda_k, omega_infinity, LambdaContext};
use crate::numerics::{bisect_by, Bracket, NumericContext, Probe, Real, Sign};
use crate::symbolic::compare_prefix;

/// True iff the first digit is positive and every suffix is `⪯` the prefix
/// of the same length.
pub fn is_lsm(word: &[u32]) -> bool {
    if word.first().is_none_or(|&d| d == 0) {
        return false;
    }
    (1..word.len()).all(|k| compare_prefix(&word[k..], &word[..word.len() - k]).0 != Ordering::Greater)
}

/// A lexicographically shift-maximal word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LsmWord(Vec<u32>);

impl LsmWord {
    pub fn new(digits: Vec<u32>) -> Result<Self, CorrespondenceError> {
        if !is_lsm(&digits) {
            return Err(CorrespondenceError::NotLsm(render(&digits)));
        }
        Ok(Self(digits))
    }

    /// Parses a digit string such as `"2101"`.
    pub fn parse(s: &str) -> Result<Self, CorrespondenceError> {
        let digits: Option<Vec<u32>> = s.trim().chars().map(|c| c.to_digit(10)).collect();
        match digits {
            Some(d) => Self::new(d),
            None => Err(CorrespondenceError::NotLsm(s.to_string())),
        }
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
}

impl fmt::Display for LsmWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.0))
    }
}

fn render(d: &[u32]) -> String {
    d.iter().map(|x| x.to_string()).collect()
}

/// Length of the longest proper border (suffix that is also a prefix).
fn longest_border(w: &[u32]) -> usize {
    let mut fail = vec![0usize; w.len()];
    let mut k = 0;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail.last().copied().unwrap_or(0)
}

/// The smallest LSM word of the same length strictly above `word`: with
/// `x_{k+1} … x_n` the longest strict suffix that is also a prefix, the
/// successor is `x_0 … x_{k−1} (x_k + 1) 0^{n−k}`.
pub fn succ_lsm(word: &LsmWord) -> LsmWord {
    let w = &word.0;
    let k = w.len() - 1 - longest_border(w);
    let mut out = Vec::with_capacity(w.len());
    out.extend_from_slice(&w[..k]);
    out.push(w[k] + 1);
    out.resize(w.len(), 0);
    LsmWord(out)
}

/// `]λ_min, λ_max]`: the parameters whose `ω_λ(∞)` starts with a given word.
#[derive(Debug, Clone)]
pub struct LambdaInterval {
    pub lambda_min: Real,
    pub lambda_max: Real,
}

/// Locates the parameters for which `word` is the length-`n` prefix of
/// `ω_λ(∞)`, using that this prefix is non-decreasing in λ.
pub fn lambda_interval_for_prefix(
    word: &LsmWord,
    tol: &Real,
    nctx: &NumericContext,
) -> Result<LambdaInterval, CorrespondenceError> {
    let w = word.digits();
    let n = w.len();
    let first = w[0];
    let lo = lambda_k(first + 1, nctx);
    let hi = lambda_k(first + 2, nctx);
    let max_prefix = |lam: &Real| -> Result<Vec<u32>, CorrespondenceError> {
        let ctx = LambdaContext::new(lam, nctx)?;
        Ok(omega_infinity(&ctx, n).digits)
    };

    // predicate holds on the left part of (lo, hi]
    let boundary = |strict: bool| -> Result<Real, CorrespondenceError> {
        let holds = |lam: &Real| -> Result<bool, CorrespondenceError> {
            let o = compare_prefix(&max_prefix(lam)?, w).0;
            Ok(o == Ordering::Less || (!strict && o == Ordering::Equal))
        };
        if holds(&hi)? {
            return Ok(hi.clone());
        }
        let bracket = Bracket::new(lo.clone(), hi.clone(), Sign::Positive, Sign::Negative)?;
        let out = bisect_by(
            |lam: &Real| -> Result<Probe, CorrespondenceError> {
                Ok(Probe::Sign(if holds(lam)? { Sign::Positive } else { Sign::Negative }))
            },
            bracket,
            tol,
            nctx.max_iterations(),
        )?;
        Ok(out.lo)
    };

    let lambda_min = boundary(true)?;
    let lambda_max = boundary(false)?;
    let realized = lambda_max > lambda_min && max_prefix(&lambda_max)? == w;
    if !realized {
        return Err(CorrespondenceError::Empty(word.to_string()));
    }
    Ok(LambdaInterval {
        lambda_min,
        lambda_max,
    })
}
