use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;

use exactreal::calculus::{integrate, max_param, oracle_from_real_expr, Modulus};
use exactreal::expr::{parse_expr, Expr};
use exactreal::real::Ball;
use exactreal::{cantor_pair, cantor_unpair, Dyadic, EvalConfig, Real, Rounding};

fn ratio(d: &Dyadic) -> BigRational {
    let (n, den) = d.to_ratio();
    BigRational::new(n, den)
}

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (any::<i64>(), -200i64..200).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
}

fn small_dyadic() -> impl Strategy<Value = Dyadic> {
    (-1000i64..1000, -20i64..4).prop_map(|(m, e)| Dyadic::new(BigInt::from(m), e))
}

fn ball() -> impl Strategy<Value = Ball> {
    (small_dyadic(), 0i64..1000, -30i64..0).prop_map(|(c, r, e)| Ball::new(c, Dyadic::new(BigInt::from(r), e)))
}

/// A few points of the ball, endpoints included.
fn samples(b: &Ball) -> Vec<Dyadic> {
    let lo = b.lower();
    let hi = b.upper();
    vec![lo.clone(), b.center().clone(), hi.clone(), (&lo + &b.center().clone()).half()]
}

proptest! {
    #[test]
    fn rounding_error_is_bounded(x in dyadic(), p in 1u64..80) {
        let (r, err) = x.round(p);
        prop_assert!(r.precision() <= p);
        prop_assert!((&r - &x).abs() <= err);
        prop_assert!(x.round_up(p) >= x);
        prop_assert!(x.round_down(p) <= x);
    }

    #[test]
    fn far_apart_helpers_are_sound(a in dyadic(), b in dyadic(), shift in 0i64..400, p in 1u64..80) {
        let b = b.shl(-shift);
        let exact = &a + &b;
        let (c, err) = a.add_round(&b, p);
        prop_assert!(c.precision() <= p);
        prop_assert!((&c - &exact).abs() <= err);
        prop_assert!(a.add_bound(&b, Rounding::Floor) <= exact);
        prop_assert!(a.add_bound(&b, Rounding::Ceil) >= exact);
        let (aa, bb) = (a.abs(), b.abs());
        prop_assert!(aa.add_up(&bb, 32) >= &aa + &bb);
    }

    #[test]
    fn dyadic_text_round_trip(x in dyadic()) {
        let back: Dyadic = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn ball_ops_contain_pointwise_results(a in ball(), b in ball(), p in 8u64..100) {
        let ops: Vec<(Ball, fn(&Dyadic, &Dyadic) -> Dyadic)> = vec![
            (a.add(&b, p), |x, y| x + y),
            (a.sub(&b, p), |x, y| x - y),
            (a.mul(&b, p), |x, y| x * y),
        ];
        for (out, f) in &ops {
            prop_assert!(!out.radius().is_negative());
            for x in samples(&a) {
                for y in samples(&b) {
                    prop_assert!(out.contains(&f(&x, &y)));
                }
            }
        }
        if a.is_separated() {
            let r = a.recip(p).unwrap();
            for x in samples(&a) {
                let q = BigRational::one() / ratio(&x);
                prop_assert!(ratio(&r.lower()) <= q && q <= ratio(&r.upper()));
            }
        }
        if !a.upper().is_negative() {
            let s = a.sqrt(p).unwrap();
            for x in samples(&a) {
                if x.is_negative() { continue; }
                let (lo, hi) = (s.lower(), s.upper());
                prop_assert!(lo.is_negative() || &lo * &lo <= x);
                prop_assert!(&hi * &hi >= x);
            }
        }
    }

    #[test]
    fn exp_ball_is_monotone_enclosure(c in -2000i64..2000, r in 0i64..64, p in 16u64..90) {
        let b = Ball::new(Dyadic::new(c.into(), -8), Dyadic::new(r.into(), -8));
        let e = b.exp(p).unwrap();
        let lo = Ball::exact(b.lower()).exp(p + 10).unwrap();
        let hi = Ball::exact(b.upper()).exp(p + 10).unwrap();
        prop_assert!(e.lower() <= lo.upper());
        prop_assert!(e.upper() >= hi.lower());
    }

    #[test]
    fn approximations_meet_their_contract(
        leaves in proptest::collection::vec((-40i64..40, 1i64..40), 2..8),
        ops in proptest::collection::vec(0u8..3, 7),
        n in 0u64..300,
    ) {
        let mut x = Real::rational(leaves[0].0, leaves[0].1);
        let mut v = BigRational::new(leaves[0].0.into(), leaves[0].1.into());
        for (i, &(p, q)) in leaves.iter().enumerate().skip(1) {
            let (y, w) = (Real::rational(p, q), BigRational::new(p.into(), q.into()));
            match ops[i - 1] {
                0 => { x = x + y; v += w; }
                1 => { x = x - y; v -= w; }
                _ => { x = x * y; v *= w; }
            }
        }
        let a = x.approx_with(n, &EvalConfig::default()).unwrap().value;
        let scale = BigRational::from_integer(BigInt::one() << n as usize);
        prop_assert!((BigRational::from_integer(a) - v * scale).abs() <= BigRational::one());
    }

    #[test]
    fn refinement_keeps_enclosures_consistent(p in 1i64..30, q in 1i64..30, n in 0u64..200) {
        let x = (Real::rational(p, q).sqrt() + Real::rational(q, p)).exp();
        let cfg = EvalConfig::default();
        let a = x.enclose(n, &cfg).unwrap();
        let b = x.enclose(n + 40, &cfg).unwrap();
        prop_assert!(a.intersects(&b));
        prop_assert!(*b.radius() <= Dyadic::pow2(-(n as i64) - 40));
    }

    #[test]
    fn pairing_inverts(j in 0u64..1 << 30, m in 0u64..1 << 30) {
        prop_assert_eq!(cantor_unpair(cantor_pair(j, m)), (j, m));
    }

    #[test]
    fn parabola_oracle_respects_its_modulus(s in 0i64..=1024, d in -8i64..=8, n in 2u64..10) {
        let f = oracle_from_real_expr(
            |t| &t * &(Real::one() - &t),
            Modulus::new(|n| n),
            Dyadic::zero(),
            Dyadic::one(),
            EvalConfig::default(),
        ).unwrap();
        let mu = f.modulus().at(n) as i64;
        let a = Dyadic::new(s.into(), -10);
        let b = (&a + &Dyadic::new(d.into(), -10 - mu.max(0) + 3)).max(Dyadic::zero()).min(Dyadic::one());
        prop_assume!((&a - &b).abs() <= Dyadic::pow2(-mu));
        let fa = f.eval(&a, n + 2).unwrap();
        let fb = f.eval(&b, n + 2).unwrap();
        let tol = &Dyadic::pow2(-(n as i64)) + &Dyadic::pow2(-(n as i64) - 1);
        prop_assert!((&fa - &fb).abs() <= tol);
    }
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0i64..1000).prop_map(Expr::int),
        (0i64..1000, 1u32..4).prop_map(|(m, k)| Expr::Num(BigRational::new(m.into(), BigInt::from(10).pow(k)))),
        "[a-z][a-z0-9]{0,3}"
            .prop_filter("function names are reserved", |s| !["sqrt", "exp", "hexp", "recip"].contains(&s.as_str()))
            .prop_map(Expr::Var),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Sqrt(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Exp(Box::new(a))),
            inner.clone().prop_map(|a| Expr::Hexp(Box::new(a))),
            (inner.clone(), proptest::option::of(0u64..64)).prop_map(|(a, k)| Expr::Recip(Box::new(a), k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
        ]
    })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }
}

#[test]
fn grid_results_dominate_and_integrals_add() {
    let f = oracle_from_real_expr(
        |t| &t * &(Real::one() - &t),
        Modulus::new(|n| n),
        Dyadic::zero(),
        Dyadic::one(),
        EvalConfig::default(),
    )
    .unwrap();
    let n = 8;
    let tol = ratio(&Dyadic::pow2(-(n as i64)));
    let m = ratio(&max_param(&f, &Dyadic::one(), n).unwrap());
    for k in 0..=64 {
        let t = Dyadic::new(k.into(), -6);
        let s = ratio(&f.eval(&t, n + 2).unwrap());
        assert!(&m + &tol >= s);
    }
    // int_y^x t(1-t) dt = x^2/2 - x^3/3 - (y^2/2 - y^3/3)
    let anti = |x: &BigRational| x * x / BigRational::from_integer(2.into()) - x * x * x / BigRational::from_integer(3.into());
    for (y, x) in [(1i64, 3i64), (0, 4), (2, 4)] {
        let (yd, xd) = (Dyadic::new(y.into(), -2), Dyadic::new(x.into(), -2));
        let ix = ratio(&integrate(&f, &xd, n).unwrap());
        let iy = ratio(&integrate(&f, &yd, n).unwrap());
        let exact = anti(&ratio(&xd)) - anti(&ratio(&yd));
        assert!((ix - iy - exact).abs() <= &tol * BigRational::from_integer(3.into()));
    }
}

#[test]
fn unbound_variables_are_reported() {
    let e = parse_expr("x + 1").unwrap();
    assert!(e.to_real(&HashMap::new()).is_err());
    let mut env = HashMap::new();
    env.insert("x".to_string(), Real::rational(1, 3));
    let v = e.to_real(&env).unwrap().approx(20).unwrap();
    assert!((v - BigInt::from((4u64 << 20) / 3)).abs() <= BigInt::one());
}
