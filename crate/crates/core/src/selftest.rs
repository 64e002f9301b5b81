//! Built-in invariant suite behind `lambda-beta selftest`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rug::Float;

use crate::cf_expansion::expand_x;
use crate::correspondence::{beta_of_lambda, is_lsm, lambda_of_beta, minkowski_q, phi, succ_lsm, LsmWord};
use crate::lambda_dynamics::{lambda_k, radius_trace, LambdaContext};
use crate::numerics::NumericContext;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                format!("[{tag}] {}: {}", c.name, c.detail)
            })
            .collect();
        out.push(format!(
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        ));
        out
    }
}

type Outcome = Result<String, String>;

fn check(report: &mut Report, name: &'static str, f: impl FnOnce() -> Outcome) {
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    report.checks.push(CheckResult { name, passed, detail });
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn run_suite(nctx: &NumericContext, quick: bool) -> Report {
    let mut report = Report::default();
    let prec = nctx.precision_bits();
    let tol = Float::with_val(prec, 1e-12);

    check(&mut report, "beta_at_lambda_k", || {
        let top = if quick { 6 } else { 12 };
        let mut worst = 0.0f64;
        for k in 3..=top {
            let ctx = LambdaContext::new(&lambda_k(k, nctx), nctx).map_err(|e| e.to_string())?;
            let b = beta_of_lambda(&ctx, &tol).map_err(|e| e.to_string())?;
            let err = (b.beta.to_f64() - (k - 1) as f64).abs();
            worst = worst.max(err);
            ensure(err < 1e-9, || format!("k = {k}: beta = {}", b.beta.to_f64()))?;
        }
        Ok(format!("k = 3..{top}, max error {worst:.1e}"))
    });

    check(&mut report, "golden_ratio", || {
        let lam = Float::with_val(prec, 0.5).sqrt();
        let ctx = LambdaContext::new(&lam, nctx).map_err(|e| e.to_string())?;
        let b = beta_of_lambda(&ctx, &tol).map_err(|e| e.to_string())?;
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        let err = (b.beta.to_f64() - golden).abs();
        ensure(err < 1e-9, || format!("beta(1/sqrt 2) = {}", b.beta.to_f64()))?;
        Ok(format!("error {err:.1e}"))
    });

    check(&mut report, "beta_monotone", || {
        let n = if quick { 12 } else { 40 };
        let mut prev = 0.0f64;
        for i in 0..n {
            let lam = 0.3 + 1.65 * i as f64 / (n - 1) as f64;
            let ctx = LambdaContext::new(&nctx.real(lam), nctx).map_err(|e| e.to_string())?;
            let b = beta_of_lambda(&ctx, &tol).map_err(|e| e.to_string())?.beta.to_f64();
            ensure(b >= prev - 1e-12, || format!("beta drops at lambda = {lam}"))?;
            prev = b;
        }
        Ok(format!("{n} grid points on [0.3, 1.95]"))
    });

    check(&mut report, "conjugacy", || {
        let ctx = LambdaContext::new(&nctx.real(1.3), nctx).map_err(|e| e.to_string())?;
        let sol = beta_of_lambda(&ctx, &tol).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for x in [0.1, 0.45, 0.8, 1.7, 3.2] {
            let x = nctx.real(x);
            let (tx, _) = ctx.apply_t(&x).map_err(|e| e.to_string())?;
            let a = phi(&ctx, &sol.context, &x, 96).map_err(|e| e.to_string())?;
            let b = phi(&ctx, &sol.context, &tx, 96).map_err(|e| e.to_string())?;
            let shifted = sol.beta.to_f64() * a.t.to_f64() - a.code.digits[0] as f64;
            worst = worst.max((shifted - b.t.to_f64()).abs());
        }
        ensure(worst < 1e-9, || format!("max defect {worst:.1e}"))?;
        Ok(format!("max defect {worst:.1e}"))
    });

    check(&mut report, "cf_convergence", || {
        let ctx = LambdaContext::new(&nctx.real(1.37), nctx).map_err(|e| e.to_string())?;
        let x = nctx.real(0.912);
        let e = expand_x(&ctx, &x, 200).map_err(|e| e.to_string())?;
        let last = e.convergents.last().ok_or("no convergents")?;
        let err = Float::with_val(prec, &x - &last.value).abs().to_f64();
        ensure(err < 1e-12, || format!("residual {err:.1e}"))?;
        Ok(format!("residual {err:.1e} after {} cf digits", last.cf_prefix_len))
    });

    check(&mut report, "unimodular_branches", || {
        let ctx = LambdaContext::new(&nctx.real(1.6), nctx).map_err(|e| e.to_string())?;
        let words: [&[u32]; 4] = [&[1], &[0, 2, 1], &[2, 2, 0, 1, 1], &[1, 0, 0, 2, 0, 1, 2]];
        let mut worst = 0.0f64;
        for w in words {
            let m = ctx.branch_matrix(w).map_err(|e| e.to_string())?;
            worst = worst.max((m.det().to_f64() - 1.0).abs());
        }
        ensure(worst < 1e-20, || format!("|det - 1| = {worst:.1e}"))?;
        Ok(format!("|det - 1| <= {worst:.1e}"))
    });

    check(&mut report, "radius_non_increasing", || {
        let ctx = LambdaContext::new(&nctx.real(1.2), nctx).map_err(|e| e.to_string())?;
        let states = radius_trace(&ctx, &nctx.real(0.7), 40).map_err(|e| e.to_string())?;
        for pair in states.windows(2) {
            let grow = Float::with_val(prec, &pair[1].radius - &pair[0].radius).to_f64();
            ensure(grow <= 1e-20, || format!("radius grows by {grow:.1e}"))?;
        }
        Ok(format!("{} steps", states.len() - 1))
    });

    check(&mut report, "lsm_successor", || {
        let top = if quick { 4 } else { 6 };
        let mut count = 0;
        for len in 1..=top {
            let all = lsm_words(len, 3);
            for pair in all.windows(2) {
                let s = succ_lsm(&LsmWord::new(pair[0].clone()).map_err(|e| e.to_string())?);
                ensure(s.digits() == pair[1].as_slice(), || format!("succ of {:?}", pair[0]))?;
                count += 1;
            }
        }
        Ok(format!("{count} successors up to length {top}"))
    });

    check(&mut report, "minkowski", || {
        let golden = Float::with_val(prec, 5).sqrt() / 2 - Float::with_val(prec, 0.5);
        let cases = [(nctx.real(0.5), 0.5), (Float::with_val(prec, 1) / 3u32, 0.25), (golden, 2.0 / 3.0)];
        for (x, want) in cases {
            let got = minkowski_q(&x, &tol).to_f64();
            ensure((got - want).abs() < 1e-10, || format!("?({}) = {got}", x.to_f64()))?;
        }
        Ok("?(1/2), ?(1/3), ?(golden - 1)".into())
    });

    if !quick {
        check(&mut report, "inverse_correspondence", || {
            let lam = lambda_of_beta(&nctx.real(3), &tol, nctx).map_err(|e| e.to_string())?;
            let err = (lam.to_f64() - 2f64.sqrt()).abs();
            ensure(err < 1e-9, || format!("lambda(3) = {}", lam.to_f64()))?;
            Ok(format!("lambda(3) error {err:.1e}"))
        });
    }

    report
}

/// All LSM words of length `len` over `{0, …, max}`, in lexicographic order.
fn lsm_words(len: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut w = vec![0u32; len];
    loop {
        if is_lsm(&w) {
            out.push(w.clone());
        }
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if w[i] < max {
                w[i] += 1;
                w[i + 1..].iter_mut().for_each(|d| *d = 0);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let r = run_suite(&NumericContext::default(), true);
        assert!(r.all_passed(), "{:#?}", r.lines());
    }

    #[test]
    fn degraded_precision_is_caught() {
        let r = run_suite(&NumericContext::unchecked(16), true);
        assert!(!r.all_passed());
    }
}
