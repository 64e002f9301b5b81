use rug::Float;
use serde::Serialize;

use super::context::{check_point, LambdaContext};
use super::DynamicsError;
use crate::numerics::Real;

/// One circle of the rotation picture of `T_λ`.
///
/// The pair `(t_0, t_1)` are abscissae of two points on a circle of radius
/// `radius` centred at the origin, separated by the angle `θ = arccos(λ/2)`;
/// the point `x` corresponds to `(1, x)`. Rotating by `θ` produces the
/// abscissae `t_{j+1} = λ t_j - t_{j-1}` until one turns negative.
#[derive(Debug, Clone)]
pub struct GeometryState {
    pub radius: Real,
    /// Angle of the point with abscissa `t_0`.
    pub psi: Real,
    /// `t_0, t_1, …, t_{i+1}`, the last being the first negative one.
    pub abscissae: Vec<Real>,
    /// Branch index `i - 1` of `T_λ` applied at this step.
    pub digit: usize,
}

/// Plain-number view of a [`GeometryState`] for reports.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryRecord {
    pub radius: f64,
    pub psi: f64,
    pub abscissae: Vec<f64>,
    pub digit: usize,
}

impl GeometryState {
    /// `T_λ` read off the circle: `t_i / (-t_{i+1})`.
    pub fn image(&self) -> Real {
        let k = self.abscissae.len();
        let num = &self.abscissae[k - 2];
        let den = Float::with_val(num.prec(), -&self.abscissae[k - 1]);
        Float::with_val(num.prec(), num / &den)
    }

    /// The pair carried to the next circle, `(-t_{i+1}, t_i)`.
    pub fn next_pair(&self) -> (Real, Real) {
        let k = self.abscissae.len();
        (
            Float::with_val(self.radius.prec(), -&self.abscissae[k - 1]),
            self.abscissae[k - 2].clone(),
        )
    }

    pub fn record(&self) -> GeometryRecord {
        GeometryRecord {
            radius: self.radius.to_f64(),
            psi: self.psi.to_f64(),
            abscissae: self.abscissae.iter().map(Float::to_f64).collect(),
            digit: self.digit,
        }
    }
}

/// Radius of the circle through abscissae `t0`, `t1` at angular distance θ:
/// `R² = (t0² + t1² - 2 t0 t1 cos θ) / sin² θ`.
pub fn circle_radius(ctx: &LambdaContext, t0: &Real, t1: &Real) -> Real {
    let prec = ctx.prec();
    let lambda = ctx.lambda();
    let mut num = Float::with_val(prec, t0 * t0);
    num += Float::with_val(prec, t1 * t1);
    num -= Float::with_val(prec, t0 * t1) * lambda;
    let sin2: Real = 1 - Float::with_val(prec, lambda * lambda) / 4u32;
    Float::with_val(prec, &num / &sin2).sqrt()
}

fn state_for(ctx: &LambdaContext, t0: Real, t1: Real) -> Result<GeometryState, DynamicsError> {
    let prec = ctx.prec();
    let radius = circle_radius(ctx, &t0, &t1);
    let theta = ctx.theta();
    let sin = Float::with_val(prec, theta.sin_ref());
    let cos = Float::with_val(prec, theta.cos_ref());
    // R sin ψ = (t0 cos θ - t1) / sin θ
    let r_sin_psi = (Float::with_val(prec, &t0 * &cos) - &t1) / &sin;
    let psi = r_sin_psi.atan2(&t0);

    let snap = Float::with_val(prec, &radius * ctx.numeric().boundary_tol());
    let mut ts = vec![t0, t1];
    let cap = ctx.i_lambda() + 3;
    loop {
        let k = ts.len();
        let mut next = Float::with_val(prec, ctx.lambda() * &ts[k - 1]);
        next -= &ts[k - 2];
        if Float::with_val(prec, next.abs_ref()) <= snap {
            next = ctx.numeric().zero();
        }
        let negative = next < 0;
        ts.push(next);
        if negative {
            break;
        }
        if ts.len() > cap {
            return Err(DynamicsError::GeometryDiverged);
        }
    }
    let i = ts.len() - 2;
    Ok(GeometryState {
        radius,
        psi,
        abscissae: ts,
        digit: i - 1,
    })
}

/// The sequence of circles visited by the orbit of `x`: `n + 1` states,
/// whose radii are non-increasing.
pub fn radius_trace(ctx: &LambdaContext, x: &Real, n: usize) -> Result<Vec<GeometryState>, DynamicsError> {
    check_point(x)?;
    let prec = ctx.prec();
    let mut out = Vec::with_capacity(n + 1);
    let mut pair = (Float::with_val(prec, 1), Float::with_val(prec, x));
    for _ in 0..=n {
        let st = state_for(ctx, pair.0, pair.1)?;
        pair = st.next_pair();
        out.push(st);
    }
    Ok(out)
}
