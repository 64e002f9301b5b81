use lambda_beta::beta_shift::{
    greedy_coding, o_beta_one, parry_admissible, s_beta, value_of_digits, Admissibility,
};
use lambda_beta::cf_expansion::{coding_to_cf, eval_cf, expand_x, CFDigits};
use lambda_beta::correspondence::{
    beta_of_lambda, entropy, is_lsm, lambda_interval_for_prefix, lambda_of_beta, minkowski_q, phi,
    succ_lsm, LsmWord,
};
use lambda_beta::lambda_dynamics::{
    code_orbit, lambda_k, omega_infinity, radius_trace, LambdaContext,
};
use lambda_beta::numerics::{bisect_interval, largest_real_root, NumericContext, Real};
use lambda_beta::symbolic::CodeSeq;
use rug::Float;

const PREC: u32 = 192;

fn n() -> NumericContext {
    NumericContext::default()
}

fn r(x: f64) -> Real {
    Float::with_val(PREC, x)
}

fn close(a: &Real, b: f64, eps: f64) -> bool {
    (a.to_f64() - b).abs() <= eps
}

fn ctx(lambda: f64) -> LambdaContext {
    LambdaContext::from_f64(lambda, &n()).unwrap()
}

fn sqrt(x: u32) -> Real {
    Float::with_val(PREC, x).sqrt()
}

const GOLDEN: f64 = 1.618_033_988_749_895;

#[test]
fn bisection_examples() {
    let tol = r(1e-12);
    let root = bisect_interval(|x| Float::with_val(PREC, x - 1u32), r(0.0), r(2.0), &tol).unwrap();
    assert!(close(&root, 1.0, 1e-12));
    let root = bisect_interval(
        |x| Float::with_val(PREC, x * x) - x.clone() - 1u32,
        r(1.0),
        r(2.0),
        &tol,
    )
    .unwrap();
    assert!(close(&root, GOLDEN, 1e-11));
    let root = bisect_interval(
        |x| {
            let x2 = Float::with_val(PREC, x * x);
            Float::with_val(PREC, &x2 * x) - x2 - 1u32
        },
        r(1.0),
        r(2.0),
        &tol,
    )
    .unwrap();
    assert!(close(&root, 1.465_571_231_876_768, 1e-11));
}

#[test]
fn largest_root_examples() {
    let nc = n();
    let tol = r(1e-30);
    assert!(close(&largest_real_root(2, &tol, &nc).unwrap(), GOLDEN, 1e-15));
    assert!(close(&largest_real_root(3, &tol, &nc).unwrap(), 1.465_571_231_876_768, 1e-15));
    let r8 = largest_real_root(8, &tol, &nc).unwrap();
    assert!(r8 > 1 && r8 < 1.24);
    assert!(largest_real_root(1, &tol, &nc).is_err());
}

#[test]
fn context_examples() {
    let c = ctx(1.5);
    assert_eq!(c.i_lambda(), 3);
    let bp: Vec<f64> = c.breakpoints().iter().map(|b| b.to_f64()).collect();
    for (got, want) in bp.iter().zip([0.0, 2.0 / 3.0, 1.2, 10.0 / 3.0]) {
        assert!((got - want).abs() < 1e-15, "{bp:?}");
    }

    let c = ctx(1.0);
    assert_eq!(c.i_lambda(), 1);
    assert!(c.degenerate());
    assert!(c.ell_lambda().is_infinite());
    assert_eq!(c.breakpoints().len(), 2);

    let c = LambdaContext::new(&sqrt(2), &n()).unwrap();
    assert_eq!(c.i_lambda(), 2);
    assert!(c.degenerate());
    assert!(close(&c.breakpoints()[2], 2f64.sqrt(), 1e-15));
}

#[test]
fn apply_t_examples() {
    let nc = n();
    for l in [0.3, 1.0, 1.7] {
        let (y, d) = ctx(l).apply_t(&nc.zero()).unwrap();
        assert_eq!((y, d), (nc.zero(), 0));
    }
    let c = ctx(1.0);
    let (y, d) = c.apply_t(&r(0.5)).unwrap();
    assert!(close(&y, 1.0, 1e-30) && d == 0);
    let (y, d) = c.apply_t(&r(2.0)).unwrap();
    assert!(close(&y, 1.0, 1e-30) && d == 1);
}

#[test]
fn coding_examples() {
    let nc = n();
    let zero = code_orbit(&ctx(1.3), &nc.zero(), 5).unwrap();
    assert_eq!(zero.digits, vec![0; 5]);
    assert_eq!(zero.confidence, 5);
    assert_eq!(code_orbit(&ctx(1.0), &r(2.0), 5).unwrap().digits, vec![1, 1, 0, 0, 0]);
    assert_eq!(code_orbit(&ctx(1.0), &r(0.5), 5).unwrap().digits, vec![0, 1, 0, 0, 0]);
}

#[test]
fn omega_infinity_examples() {
    let nc = n();
    let w = omega_infinity(&LambdaContext::new(&lambda_k(5, &nc), &nc).unwrap(), 6);
    assert_eq!(w.digits, vec![3; 6]);
    assert_eq!(w.period.unwrap().start, 0);

    let w = omega_infinity(&LambdaContext::new(&sqrt(2).recip(), &nc).unwrap(), 6);
    assert_eq!(w.digits, vec![1, 0, 1, 0, 1, 0]);
    assert_eq!(w.period.unwrap().start, 0);

    let w = omega_infinity(&ctx(1.0), 6);
    assert_eq!(w.digits, vec![1; 6]);
    assert_eq!(w.period.unwrap().start, 0);

    let c = ctx(1.5);
    assert_eq!(code_orbit(&c, c.lambda(), 1).unwrap().digits, vec![2]);
    assert_eq!(omega_infinity(&c, 1).digits, vec![3]);
}

#[test]
fn cylinder_examples() {
    let c = ctx(1.5);
    for i in 0..=3u32 {
        let cyl = c.cylinder(&[i]).unwrap();
        assert!(close(&cyl.left, c.breakpoints()[i as usize].to_f64(), 1e-40));
        if i < 3 {
            assert!(close(&cyl.right, c.breakpoints()[i as usize + 1].to_f64(), 1e-40));
        } else {
            assert!(cyl.right.is_infinite());
        }
    }
    let cyl = ctx(1.0).cylinder(&[1, 0]).unwrap();
    assert!(close(&cyl.left, 1.0, 1e-30) && close(&cyl.right, 2.0, 1e-30));
    let cyl = c.cylinder(&[]).unwrap();
    assert!(cyl.left == 0 && cyl.right.is_infinite());
}

#[test]
fn branch_matrix_examples() {
    let c = ctx(1.37);
    let h0 = c.branch_matrix(&[0]).unwrap();
    assert_eq!((h0.a.to_f64(), h0.b.to_f64(), h0.d.to_f64()), (1.0, 0.0, 1.0));
    assert!(close(&h0.c, 1.37, 1e-15));
    let p = c.p_values();
    for i in 0..=c.i_lambda() {
        let h = c.branch_matrix(&[i as u32]).unwrap();
        assert_eq!((&h.a, &h.b, &h.c, &h.d), (&p[i + 1], &p[i], &p[i + 2], &p[i + 1]));
    }
    let id = c.branch_matrix(&[]).unwrap();
    assert_eq!((id.a.to_f64(), id.b.to_f64(), id.c.to_f64(), id.d.to_f64()), (1.0, 0.0, 0.0, 1.0));
}

#[test]
fn geometry_examples() {
    let nc = n();
    let c = ctx(1.2);
    let states = radius_trace(&c, &nc.zero(), 1).unwrap();
    let sin = Float::with_val(PREC, c.theta().sin_ref()).to_f64();
    assert!(close(&states[0].radius, 1.0 / sin, 1e-14));

    let states = radius_trace(&ctx(1.0), &r(2.0), 3).unwrap();
    assert!(states.last().unwrap().radius < states[0].radius);
}

#[test]
fn eval_cf_examples() {
    let nc = n();
    let one = CFDigits::new(vec![1]).unwrap();
    assert!(close(&eval_cf(&r(1.37), &one, &nc).unwrap(), 1.0 / 1.37, 1e-15));
    let two = CFDigits::new(vec![1, 1]).unwrap();
    assert!(close(&eval_cf(&r(1.5), &two, &nc).unwrap(), 1.2, 1e-15));
    assert_eq!(eval_cf(&r(1.5), &CFDigits::default(), &nc).unwrap(), 0);
}

#[test]
fn coding_to_cf_examples() {
    assert_eq!(coding_to_cf(&[1]).digits(), &[1]);
    assert_eq!(coding_to_cf(&[0, 1]).digits(), &[2]);
    assert_eq!(coding_to_cf(&[2]).digits(), &[1, 1]);
    let nc = n();
    let l = r(1.3);
    let h0_m1 = eval_cf(&l, &coding_to_cf(&[0, 1]), &nc).unwrap();
    assert!(close(&h0_m1, 1.0 / 2.6, 1e-15));
}

#[test]
fn expand_examples() {
    let nc = n();
    let e = expand_x(&ctx(1.0), &r(2.0), 10).unwrap();
    assert!(e.finite);
    assert_eq!(e.cf.digits(), &[1, 2]);
    assert_eq!(e.convergents.last().unwrap().value, 2);
    assert_eq!(e.convergents.last().unwrap().cylinder_width, 0);

    let e = expand_x(&ctx(1.4), &nc.zero(), 10).unwrap();
    assert!(e.cf.is_empty());

    let c = ctx(1.5);
    let m2 = c.breakpoints()[2].clone();
    let e = expand_x(&c, &m2, 10).unwrap();
    assert!(e.finite);
    assert_eq!(e.cf.digits(), &[1, 1]);
}

#[test]
fn s_beta_examples() {
    let nc = n();
    let s = s_beta(&r(2.0), &nc.zero(), &nc).unwrap();
    assert_eq!((s.image.to_f64(), s.digit), (0.0, 0));
    let s = s_beta(&r(2.25), &r(0.5), &nc).unwrap();
    assert_eq!((s.image.to_f64(), s.digit), (0.125, 1));
    let s = s_beta(&r(2.0), &r(0.75), &nc).unwrap();
    assert_eq!((s.image.to_f64(), s.digit), (0.5, 1));
}

#[test]
fn greedy_examples() {
    let nc = n();
    assert_eq!(greedy_coding(&r(2.0), &r(0.375), 6, &nc).unwrap().digits, vec![0, 1, 1, 0, 0, 0]);
    assert_eq!(greedy_coding(&r(2.6), &nc.zero(), 6, &nc).unwrap().digits, vec![0; 6]);
    let phi = Float::with_val(PREC, 1) + sqrt(5);
    let phi = phi / 2u32;
    let t = Float::with_val(PREC, &phi - 1u32);
    assert_eq!(greedy_coding(&phi, &t, 4, &nc).unwrap().digits, vec![1, 0, 0, 0]);
}

#[test]
fn o_beta_one_examples() {
    let nc = n();
    let three = o_beta_one(&r(3.0), 8, &nc).unwrap();
    assert_eq!(three.digits, vec![2; 8]);
    assert!(three.period.is_some());

    let phi = (Float::with_val(PREC, 1) + sqrt(5)) / 2u32;
    let golden = o_beta_one(&phi, 6, &nc).unwrap();
    assert_eq!(golden.digits, vec![1, 0, 1, 0, 1, 0]);
    assert_eq!(golden.pattern().unwrap(), &[1, 0]);

    assert_eq!(&o_beta_one(&r(2.25), 3, &nc).unwrap().digits, &[2, 0, 1]);
}

#[test]
fn admissibility_examples() {
    let nc = n();
    let twos = CodeSeq::periodic(&[2], 6);
    assert_eq!(
        parry_admissible(&CodeSeq::word(vec![0; 6]), &twos).unwrap(),
        Admissibility::Admissible
    );
    let o = o_beta_one(&r(2.25), 8, &nc).unwrap();
    let own = parry_admissible(&CodeSeq::word(o.digits.clone()), &o).unwrap();
    assert_ne!(own, Admissibility::Admissible);

    let phi = (Float::with_val(PREC, 1) + sqrt(5)) / 2u32;
    let golden = o_beta_one(&phi, 6, &nc).unwrap();
    assert_eq!(
        parry_admissible(&CodeSeq::periodic(&[1, 0], 6), &golden).unwrap(),
        Admissibility::Inadmissible
    );
}

#[test]
fn valuation_examples() {
    let nc = n();
    let mut one_zero = vec![0u32; 12];
    one_zero[0] = 1;
    let (v, _) = value_of_digits(&r(2.0), &one_zero, &nc);
    assert!(close(&v, 0.5, 1e-30));

    let (v, tail) = value_of_digits(&r(3.0), &[2, 2, 2, 2], &nc);
    assert!(close(&v, 80.0 / 81.0, 1e-16));
    assert!(close(&tail, 1.0 / 81.0, 1e-16));

    let phi = (Float::with_val(PREC, 1) + sqrt(5)) / 2u32;
    for beta in [phi, r(2.0), r(2.25)] {
        let o = o_beta_one(&beta, 60, &nc).unwrap();
        let (v, tail) = value_of_digits(&beta, &o.digits, &nc);
        let gap = Float::with_val(PREC, 1 - v).abs();
        assert!(gap <= tail, "beta = {}", beta.to_f64());
    }
}

#[test]
fn beta_of_lambda_examples() {
    let nc = n();
    let tol = r(1e-12);
    let at = |l: &Real| beta_of_lambda(&LambdaContext::new(l, &nc).unwrap(), &tol).unwrap().beta;
    assert!(close(&at(&lambda_k(5, &nc)), 4.0, 1e-12));
    assert!(close(&at(&r(1.0)), 2.0, 1e-12));
    assert!(close(&at(&sqrt(2).recip()), GOLDEN, 1e-12));
}

#[test]
fn lambda_of_beta_examples() {
    let nc = n();
    let tol = r(1e-10);
    assert!(close(&lambda_of_beta(&r(2.0), &tol, &nc).unwrap(), 1.0, 1e-10));
    assert!(close(&lambda_of_beta(&r(3.0), &tol, &nc).unwrap(), 2f64.sqrt(), 1e-10));
    // β is flat to the left of 1/√2 (its golden-ratio value), so the
    // truncated golden ratio maps measurably below 1/√2
    let lam = lambda_of_beta(&nc.parse("1.6180339887").unwrap(), &tol, &nc).unwrap();
    let offset = lam.to_f64() - 0.5f64.sqrt();
    assert!(offset < 0.0 && offset > -1e-8, "offset {offset:e}");
}

#[test]
fn phi_examples() {
    let nc = n();
    let c = ctx(1.0);
    let sol = beta_of_lambda(&c, &r(1e-12)).unwrap();
    assert_eq!(phi(&c, &sol.context, &nc.zero(), 32).unwrap().t, 0);
    let one = phi(&c, &sol.context, &r(1.0), 32).unwrap();
    assert_eq!(&one.code.digits[..4], &[1, 0, 0, 0]);
    assert!(close(&one.t, 0.5, 1e-30));
    assert!(close(&one.t, 0.5 * minkowski_q(&r(1.0), &r(1e-15)).to_f64(), 1e-15));
    let two = phi(&c, &sol.context, &r(2.0), 32).unwrap();
    assert_eq!(&two.code.digits[..4], &[1, 1, 0, 0]);
    assert!(close(&two.t, 0.75, 1e-30));
    let other = 0.5 + 0.5 * minkowski_q(&r(0.5), &r(1e-15)).to_f64();
    assert!(close(&two.t, other, 1e-15));
}

#[test]
fn entropy_examples() {
    let nc = n();
    let tol = r(1e-12);
    assert!(close(&entropy(&ctx(1.0), &tol).unwrap(), 2f64.ln(), 1e-12));
    let six = LambdaContext::new(&lambda_k(6, &nc), &nc).unwrap();
    assert!(close(&entropy(&six, &tol).unwrap(), 5f64.ln(), 1e-12));
    let small = entropy(&ctx(0.05), &tol).unwrap().to_f64();
    assert!(small > 0.0 && small < 0.2);
}

#[test]
fn lsm_examples() {
    assert!(is_lsm(&[1, 0, 0]));
    assert!(!is_lsm(&[0, 1, 0]));
    assert!(is_lsm(&[2, 1, 2]));
    let succ = |s: &str| succ_lsm(&LsmWord::parse(s).unwrap()).to_string();
    assert_eq!(succ("201"), "202");
    assert_eq!(succ("222"), "300");
    assert_eq!(succ("100"), "101");
}

#[test]
fn lambda_interval_examples() {
    let nc = n();
    let tol = r(1e-12);
    for k in 3..=6u32 {
        let word = LsmWord::new(vec![k - 2; 5]).unwrap();
        let i = lambda_interval_for_prefix(&word, &tol, &nc).unwrap();
        assert!(close(&i.lambda_max, lambda_k(k, &nc).to_f64(), 1e-10), "k = {k}");
    }
    let i = lambda_interval_for_prefix(&LsmWord::parse("10").unwrap(), &tol, &nc).unwrap();
    assert!(i.lambda_min < 0.70 && i.lambda_max >= 0.70);
    let i = lambda_interval_for_prefix(&LsmWord::parse("30").unwrap(), &tol, &nc).unwrap();
    assert!(i.lambda_min >= lambda_k(4, &nc) - 1e-12 && i.lambda_max <= lambda_k(5, &nc));
}

#[test]
fn minkowski_examples() {
    let tol = r(1e-15);
    assert_eq!(minkowski_q(&r(0.0), &tol).to_f64(), 0.0);
    assert_eq!(minkowski_q(&r(1.0), &tol).to_f64(), 1.0);
    assert!(close(&minkowski_q(&r(0.5), &tol), 0.5, 1e-15));
    let third = Float::with_val(PREC, 1) / 3u32;
    assert!(close(&minkowski_q(&third, &tol), 0.25, 1e-15));
}
