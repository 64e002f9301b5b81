use std::fmt;
use std::ops::Mul;

use rug::Float;

use crate::numerics::Real;

/// The Moebius map `x ↦ (a·x + b)/(c·x + d)`, stored as its 2×2 matrix.
/// Composition of maps is matrix multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct Homography {
    pub a: Real,
    pub b: Real,
    pub c: Real,
    pub d: Real,
}

impl Homography {
    pub fn new(a: Real, b: Real, c: Real, d: Real) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity(prec: u32) -> Self {
        Self {
            a: Float::with_val(prec, 1),
            b: Float::new(prec),
            c: Float::new(prec),
            d: Float::with_val(prec, 1),
        }
    }

    pub fn prec(&self) -> u32 {
        self.a.prec()
    }

    pub fn det(&self) -> Real {
        let prec = self.prec();
        let ad = Float::with_val(prec, &self.a * &self.d);
        let bc = Float::with_val(prec, &self.b * &self.c);
        ad - bc
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Homography) -> Homography {
        let prec = self.prec();
        let dot = |x: &Real, y: &Real, z: &Real, w: &Real| {
            let mut s = Float::with_val(prec, x * y);
            s += Float::with_val(prec, z * w);
            s
        };
        Homography {
            a: dot(&self.a, &rhs.a, &self.b, &rhs.c),
            b: dot(&self.a, &rhs.b, &self.b, &rhs.d),
            c: dot(&self.c, &rhs.a, &self.d, &rhs.c),
            d: dot(&self.c, &rhs.b, &self.d, &rhs.d),
        }
    }

    /// Image of `x`; `x = +∞` maps to `a/c`, and the pole maps to `+∞`.
    pub fn apply(&self, x: &Real) -> Real {
        let prec = self.prec();
        if x.is_infinite() {
            if self.c.is_zero() {
                return Float::with_val(prec, rug::float::Special::Infinity);
            }
            return Float::with_val(prec, &self.a / &self.c);
        }
        let mut num = Float::with_val(prec, &self.a * x);
        num += &self.b;
        let mut den = Float::with_val(prec, &self.c * x);
        den += &self.d;
        if den.is_zero() {
            return Float::with_val(prec, rug::float::Special::Infinity);
        }
        num / den
    }

    /// Preimage of `y` (assumes a unimodular matrix).
    pub fn apply_inverse(&self, y: &Real) -> Real {
        let inv = Homography {
            a: self.d.clone(),
            b: Float::with_val(self.prec(), -&self.b),
            c: Float::with_val(self.prec(), -&self.c),
            d: self.a.clone(),
        };
        inv.apply(y)
    }

    /// The pole `-d/c`, or `None` for an affine map.
    pub fn pole(&self) -> Option<Real> {
        if self.c.is_zero() {
            return None;
        }
        let p = Float::with_val(self.prec(), &self.d / &self.c);
        Some(-p)
    }
}

impl Mul for &Homography {
    type Output = Homography;

    fn mul(self, rhs: &Homography) -> Homography {
        self.compose(rhs)
    }
}

impl fmt::Display for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{:.6e}, {:.6e}], [{:.6e}, {:.6e}]]",
            self.a.to_f64(),
            self.b.to_f64(),
            self.c.to_f64(),
            self.d.to_f64()
        )
    }
}
