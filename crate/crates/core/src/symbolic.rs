//! Digit sequences shared by the λ-side and the β-side codings, plus the
//! lexicographic comparisons both sides are built on.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// Eventual period of a digit sequence: digits from `start` on repeat with
/// period `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Period {
    pub start: usize,
    pub len: usize,
}

/// A finite prefix of a coding sequence.
///
/// When `period` is set the whole infinite sequence is known and
/// [`CodeSeq::digit`] answers for any index. `confidence` counts the leading
/// digits that no boundary tie could have affected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeSeq {
    pub digits: Vec<u32>,
    pub period: Option<Period>,
    pub confidence: usize,
}

impl CodeSeq {
    /// A plain finite word, fully trusted.
    pub fn word(digits: Vec<u32>) -> Self {
        let confidence = digits.len();
        Self {
            digits,
            period: None,
            confidence,
        }
    }

    /// The infinite repetition of `pattern`, materialized to `n` digits.
    pub fn periodic(pattern: &[u32], n: usize) -> Self {
        assert!(!pattern.is_empty(), "empty period pattern");
        let digits = pattern.iter().copied().cycle().take(n).collect();
        Self {
            digits,
            period: Some(Period {
                start: 0,
                len: pattern.len(),
            }),
            confidence: n,
        }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn period_start(&self) -> Option<usize> {
        self.period.map(|p| p.start)
    }

    /// The repeating block, when the sequence is known to be eventually
    /// periodic and the block has been materialized.
    pub fn pattern(&self) -> Option<&[u32]> {
        let p = self.period?;
        self.digits.get(p.start..p.start + p.len)
    }

    /// Digit `i` of the infinite sequence, if it is known.
    pub fn digit(&self, i: usize) -> Option<u32> {
        if let Some(&d) = self.digits.get(i) {
            return Some(d);
        }
        let p = self.period?;
        if p.start + p.len > self.digits.len() {
            return None;
        }
        Some(self.digits[p.start + (i - p.start) % p.len])
    }

    /// True when the sequence ends in zeros forever.
    pub fn is_eventually_zero(&self) -> bool {
        self.pattern().is_some_and(|p| p.iter().all(|&d| d == 0))
    }

    /// Same sequence, materialized (or truncated) to `n` digits.
    pub fn resized(&self, n: usize) -> Self {
        let mut out = self.clone();
        if n <= self.digits.len() {
            out.digits.truncate(n);
            if out.period.is_some_and(|p| p.start + p.len > n) {
                out.period = None;
            }
        } else if self.period.is_some() {
            out.digits = (0..n).map(|i| self.digit(i).unwrap()).collect();
        }
        out.confidence = out.confidence.min(out.digits.len());
        out
    }
}

impl fmt::Display for CodeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Lexicographic comparison restricted to the common length. Returns the
/// verdict and the index where the words first differ, if they do.
pub fn compare_prefix(a: &[u32], b: &[u32]) -> (Ordering, Option<usize>) {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return (o, Some(i)),
        }
    }
    (Ordering::Equal, None)
}

/// Length of the longest common prefix.
pub fn common_prefix_len(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Outcome of comparing two possibly-infinite sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqOrdering {
    Less,
    Greater,
    /// Both sequences are fully known and identical.
    Equal,
    /// Identical on every digit known for both.
    Tie,
}

/// Compares the shift `σ^shift a` against `b`, using the period information
/// of both to decide equality exactly when both are eventually periodic.
pub fn compare_shifted(a: &CodeSeq, shift: usize, b: &CodeSeq) -> SeqOrdering {
    let bound = match (a.period, b.period) {
        (Some(pa), Some(pb)) => {
            let pre_a = pa.start.saturating_sub(shift);
            Some(pre_a.max(pb.start) + lcm(pa.len, pb.len))
        }
        _ => None,
    };
    let mut i = 0usize;
    loop {
        if bound.is_some_and(|b| i >= b) {
            return SeqOrdering::Equal;
        }
        match (a.digit(shift + i), b.digit(i)) {
            (Some(x), Some(y)) => match x.cmp(&y) {
                Ordering::Less => return SeqOrdering::Less,
                Ordering::Greater => return SeqOrdering::Greater,
                Ordering::Equal => i += 1,
            },
            _ => return SeqOrdering::Tie,
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
