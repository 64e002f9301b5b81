use rug::Float;

use crate::numerics::Real;

/// Minkowski's question-mark function on `[0, 1]`:
/// for `x = [0; a_1, a_2, …]`, `?(x) = 2 Σ_k (−1)^{k+1} 2^{−(a_1+⋯+a_k)}`.
/// Summation stops once the next term is below `tol`. Inputs outside
/// `[0, 1]` are clamped.
pub fn minkowski_q(x: &Real, tol: &Real) -> Real {
    let prec = x.prec();
    if *x <= 0 {
        return Float::new(prec);
    }
    if *x >= 1 {
        return Float::with_val(prec, 1);
    }
    let mut sum = Float::new(prec);
    let mut y = Float::with_val(prec, x);
    let mut exponent: u64 = 0;
    let mut positive = true;
    let limit = (prec as u64) + 8;
    while !y.is_zero() {
        let r = Float::with_val(prec, y.recip_ref());
        let a = Float::with_val(prec, r.floor_ref());
        y = r - &a;
        let a = a.to_f64();
        if !a.is_finite() || a >= limit as f64 {
            break;
        }
        exponent += a as u64;
        if exponent > limit {
            break;
        }
        let term = Float::with_val(prec, Float::i_exp(1, 1 - exponent as i32));
        if positive {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term < *tol {
            break;
        }
        positive = !positive;
    }
    sum
}
