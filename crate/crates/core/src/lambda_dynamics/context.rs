use rug::Float;

use super::homography::Homography;
use super::DynamicsError;
use crate::numerics::{NumericContext, Real};

/// Upper bound on the number of branches; `i_λ` grows like `π/√(2-λ)`.
const MAX_BRANCHES: usize = 1 << 20;

/// A validated parameter λ ∈ (0, 2) together with the branch structure of
/// `T_λ`: breakpoints `m_i`, branch matrices `H_i`, the polynomials
/// `P_i(λ)` and the pole `ℓ_λ` of the last branch.
#[derive(Debug, Clone)]
pub struct LambdaContext {
    lambda: Real,
    theta: Real,
    i_lambda: usize,
    breakpoints: Vec<Real>,
    ell_lambda: Real,
    p_values: Vec<Real>,
    degenerate: bool,
    branches: Vec<Homography>,
    nctx: NumericContext,
}

/// One application of `T_λ`.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub image: Real,
    pub digit: usize,
    /// The point sat within `boundary_tol` of a breakpoint `m_i`, `i ≥ 1`.
    pub tie: bool,
}

/// `I_{a_0…a_n}` as `[left, right)`, `right` possibly `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    pub left: Real,
    pub right: Real,
    pub empty: bool,
}

impl Cylinder {
    pub fn width(&self) -> Real {
        if self.empty {
            return Float::new(self.left.prec());
        }
        Float::with_val(self.left.prec(), &self.right - &self.left)
    }

    pub fn contains(&self, x: &Real) -> bool {
        !self.empty && *x >= self.left && *x < self.right
    }
}

/// Builds the branch system of `T_λ`.
pub fn build_context(lambda: &Real, nctx: &NumericContext) -> Result<LambdaContext, DynamicsError> {
    LambdaContext::new(lambda, nctx)
}

impl LambdaContext {
    pub fn new(lambda: &Real, nctx: &NumericContext) -> Result<Self, DynamicsError> {
        if !lambda.is_finite() || *lambda <= 0 || *lambda >= 2 {
            return Err(DynamicsError::OutOfRange(lambda.to_f64()));
        }
        let prec = nctx.precision_bits();
        let lambda = Float::with_val(prec, lambda);
        let tol = nctx.tol();
        let stop = Float::with_val(prec, &lambda - &tol);

        // m_0 = 0, m_{i+1} = 1/(λ - m_i) while m_i < λ
        let mut breakpoints = vec![nctx.zero()];
        loop {
            let last = breakpoints.last().unwrap();
            let next = Float::with_val(prec, &lambda - last).recip();
            let done = next >= stop;
            breakpoints.push(next);
            if done {
                break;
            }
            if breakpoints.len() > MAX_BRANCHES {
                return Err(DynamicsError::TooManyBranches(lambda.to_f64()));
            }
        }
        let i_lambda = breakpoints.len() - 1;
        let degenerate = nctx.near(&breakpoints[i_lambda], &lambda);
        if degenerate {
            breakpoints[i_lambda] = lambda.clone();
        }

        // P_0 = 0, P_1 = 1, P_{i+2} = λ P_{i+1} - P_i, up to P_{i_λ+2}
        let mut p_values = vec![nctx.zero(), nctx.real(1)];
        for i in 0..=i_lambda {
            let mut next = Float::with_val(prec, &lambda * &p_values[i + 1]);
            next -= &p_values[i];
            p_values.push(next);
        }
        if degenerate {
            // the last branch is affine
            p_values[i_lambda + 2] = nctx.zero();
        }

        let branches: Vec<Homography> = (0..=i_lambda)
            .map(|i| {
                Homography::new(
                    p_values[i + 1].clone(),
                    p_values[i].clone(),
                    p_values[i + 2].clone(),
                    p_values[i + 1].clone(),
                )
            })
            .collect();

        let ell_lambda = if degenerate {
            nctx.infinity()
        } else {
            branches[i_lambda - 1].apply_inverse(&lambda)
        };

        let half = Float::with_val(prec, &lambda / 2u32);
        let theta = half.acos();

        Ok(Self {
            lambda,
            theta,
            i_lambda,
            breakpoints,
            ell_lambda,
            p_values,
            degenerate,
            branches,
            nctx: nctx.clone(),
        })
    }

    pub fn from_f64(lambda: f64, nctx: &NumericContext) -> Result<Self, DynamicsError> {
        Self::new(&nctx.real(lambda), nctx)
    }

    /// λ = 2cos(π/τ), τ > 2.
    pub fn from_tau(tau: &Real, nctx: &NumericContext) -> Result<Self, DynamicsError> {
        Self::new(&lambda_from_tau(tau, nctx)?, nctx)
    }

    pub fn lambda(&self) -> &Real {
        &self.lambda
    }

    pub fn theta(&self) -> &Real {
        &self.theta
    }

    pub fn i_lambda(&self) -> usize {
        self.i_lambda
    }

    pub fn breakpoints(&self) -> &[Real] {
        &self.breakpoints
    }

    /// Pole of the last branch; `+∞` in the degenerate case.
    pub fn ell_lambda(&self) -> &Real {
        &self.ell_lambda
    }

    /// `P_0(λ) … P_{i_λ+2}(λ)`.
    pub fn p_values(&self) -> &[Real] {
        &self.p_values
    }

    /// True iff λ = 2cos(π/k) for some integer k ≥ 3 (within tolerance).
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn numeric(&self) -> &NumericContext {
        &self.nctx
    }

    pub fn prec(&self) -> u32 {
        self.nctx.precision_bits()
    }

    /// `H_i`, the matrix of `h_i = h^i ∘ h_0`.
    pub fn branch(&self, i: usize) -> &Homography {
        &self.branches[i]
    }

    /// Radius `1/sin θ` of the circle carrying the `P_i(λ)` as abscissae.
    pub fn p_circle_radius(&self) -> Real {
        Float::with_val(self.prec(), self.theta.sin_ref()).recip()
    }

    fn check_digit(&self, d: u32) -> Result<usize, DynamicsError> {
        let d = d as usize;
        if d > self.i_lambda {
            return Err(DynamicsError::DigitOutOfAlphabet {
                digit: d,
                i_lambda: self.i_lambda,
            });
        }
        Ok(d)
    }

    pub(crate) fn step(&self, x: &Real) -> Step {
        let prec = self.prec();
        let shifted = Float::with_val(prec, x + self.nctx.boundary_tol());
        let digit = self.breakpoints.partition_point(|m| *m <= shifted) - 1;
        let near = self.nctx.near(x, &self.breakpoints[digit]);
        if near {
            return Step {
                image: self.nctx.zero(),
                digit,
                tie: digit >= 1,
            };
        }
        let mut image = self.branches[digit].apply_inverse(x);
        if image < 0 {
            image = self.nctx.zero();
        }
        Step {
            image,
            digit,
            tie: false,
        }
    }

    /// `T_λ(x)` and the branch index of `x`.
    pub fn apply_t(&self, x: &Real) -> Result<(Real, usize), DynamicsError> {
        check_point(x)?;
        let s = self.step(x);
        Ok((s.image, s.digit))
    }

    /// `H_{a_0} ⋯ H_{a_n}`; the identity for the empty word.
    pub fn branch_matrix(&self, word: &[u32]) -> Result<Homography, DynamicsError> {
        let mut h = Homography::identity(self.prec());
        for &d in word {
            let d = self.check_digit(d)?;
            h = &h * &self.branches[d];
        }
        Ok(h)
    }

    /// The cylinder `I_{a_0…a_n} = h_{a_0} ∘ ⋯ ∘ h_{a_n}([0, r))`.
    pub fn cylinder(&self, word: &[u32]) -> Result<Cylinder, DynamicsError> {
        let mut left = self.nctx.zero();
        let mut right = self.nctx.infinity();
        for &d in word.iter().rev() {
            let d = self.check_digit(d)?;
            let last_with_pole = d == self.i_lambda && !self.degenerate;
            // J_k = h_d(J_{k+1} ∩ [0, ℓ_d))
            if last_with_pole {
                if left >= self.ell_lambda {
                    return Ok(Cylinder {
                        left: self.nctx.zero(),
                        right: self.nctx.zero(),
                        empty: true,
                    });
                }
                right = if right >= self.ell_lambda {
                    self.nctx.infinity()
                } else {
                    self.branches[d].apply(&right)
                };
            } else {
                right = self.branches[d].apply(&right);
            }
            left = self.branches[d].apply(&left);
        }
        Ok(Cylinder {
            left,
            right,
            empty: false,
        })
    }
}

pub(crate) fn check_point(x: &Real) -> Result<(), DynamicsError> {
    if !x.is_finite() {
        return Err(DynamicsError::NonFinite);
    }
    if *x < 0 {
        return Err(DynamicsError::NegativeInput(x.to_f64()));
    }
    Ok(())
}

/// `2cos(π/τ)` for τ > 2.
pub fn lambda_from_tau(tau: &Real, nctx: &NumericContext) -> Result<Real, DynamicsError> {
    if !tau.is_finite() || *tau <= 2 {
        return Err(DynamicsError::TauOutOfRange(tau.to_f64()));
    }
    let prec = nctx.precision_bits();
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let angle = pi / tau;
    Ok(angle.cos() * 2u32)
}

/// λ_k = 2cos(π/k).
pub fn lambda_k(k: u32, nctx: &NumericContext) -> Real {
    if k == 2 {
        return nctx.zero();
    }
    let pi = nctx.real(rug::float::Constant::Pi);
    (pi / k).cos() * 2u32
}
