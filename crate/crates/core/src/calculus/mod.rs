//! Functions on compact intervals given by an evaluator and a modulus of
//! continuity: sampling-based maximization and integration, and a fast path
//! for analytic functions given by power-series coefficients.

mod analytic;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::real::{EvalConfig, Real};

pub use analytic::{analytic_max, AnalyticFn};

/// Default cap on the number of sample points of the grid algorithms.
pub const DEFAULT_MAX_POINTS: u64 = 1 << 26;

/// `mu` with `|s - t| <= 2^-mu(n)  =>  |f(s) - f(t)| <= 2^-n`.
/// Wrapped by a running maximum so it is non-decreasing.
#[derive(Clone)]
pub struct Modulus {
    f: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
    lipschitz: Option<u64>,
}

impl Modulus {
    pub fn new(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Modulus {
            f: Arc::new(f),
            lipschitz: None,
        }
    }

    /// `mu(n) = n + ceil(log2 L)` for an `L`-Lipschitz function.
    pub fn lipschitz(l: u64) -> Self {
        let c = ceil_log2(l.max(1));
        Modulus {
            f: Arc::new(move |n| n + c),
            lipschitz: Some(l),
        }
    }

    pub fn lipschitz_constant(&self) -> Option<u64> {
        self.lipschitz
    }

    pub fn at(&self, n: u64) -> u64 {
        if self.lipschitz.is_some() {
            return (self.f)(n);
        }
        (0..=n).map(|m| (self.f)(m)).max().unwrap_or(0)
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lipschitz {
            Some(l) => write!(f, "Modulus(lipschitz {l})"),
            None => write!(f, "Modulus(<fn>)"),
        }
    }
}

pub(crate) fn ceil_log2(v: u64) -> u64 {
    if v <= 1 {
        0
    } else {
        64 - (v - 1).leading_zeros() as u64
    }
}

/// Ceiling of `log2 d` for a positive dyadic.
pub(crate) fn ceil_log2_dyadic(d: &Dyadic) -> i64 {
    let m = d.magnitude().expect("positive");
    if *d == Dyadic::pow2(m - 1) {
        m - 1
    } else {
        m
    }
}

type EvalFn = dyn Fn(&Dyadic, u64) -> Result<Dyadic> + Send + Sync;

/// `f` on `[a, b]`: `eval(t, n)` is within `2^-n` of `f(t)`.
#[derive(Clone)]
pub struct FunctionOracle {
    a: Dyadic,
    b: Dyadic,
    eval: Arc<EvalFn>,
    modulus: Modulus,
}

impl FunctionOracle {
    pub fn new(
        a: Dyadic,
        b: Dyadic,
        modulus: Modulus,
        eval: impl Fn(&Dyadic, u64) -> Result<Dyadic> + Send + Sync + 'static,
    ) -> Result<Self> {
        if a > b {
            return Err(Error::Domain("empty interval".into()));
        }
        Ok(FunctionOracle {
            a,
            b,
            eval: Arc::new(eval),
            modulus,
        })
    }

    pub fn lower(&self) -> &Dyadic {
        &self.a
    }

    pub fn upper(&self) -> &Dyadic {
        &self.b
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn eval(&self, t: &Dyadic, n: u64) -> Result<Dyadic> {
        self.check(t)?;
        (self.eval)(t, n)
    }

    fn check(&self, t: &Dyadic) -> Result<()> {
        if *t < self.a || *t > self.b {
            return Err(Error::Domain(format!("{t} lies outside [{}, {}]", self.a, self.b)));
        }
        Ok(())
    }
}

impl fmt::Debug for FunctionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctionOracle([{}, {}], {:?})", self.a, self.b, self.modulus)
    }
}

/// Oracle that instantiates `builder` at each sample point and approximates it.
pub fn oracle_from_real_expr(
    builder: impl Fn(Real) -> Real + Send + Sync + 'static,
    modulus: Modulus,
    a: Dyadic,
    b: Dyadic,
    cfg: EvalConfig,
) -> Result<FunctionOracle> {
    FunctionOracle::new(a, b, modulus, move |t, n| {
        builder(Real::constant(t.clone())).approx_dyadic(n, &cfg)
    })
}

fn grid_size(len: &Dyadic, m: u64) -> BigUint {
    // ceil(len 2^m) panels
    let scaled = len.to_scaled_int(m as i64, Rounding::Ceil);
    scaled.to_biguint().unwrap_or_default()
}

fn check_grid(points: &BigUint, cap: u64) -> Result<u64> {
    match points.to_u64() {
        Some(v) if v <= cap => Ok(v),
        _ => Err(Error::GridExplosion {
            required: points.clone(),
            cap,
        }),
    }
}

/// `max { f(t) : a <= t <= x }` within `2^-n`.
pub fn max_param(f: &FunctionOracle, x: &Dyadic, n: u64) -> Result<Dyadic> {
    max_param_with(f, x, n, DEFAULT_MAX_POINTS)
}

/// [`max_param`] with an explicit cap on the number of samples.
///
/// Samples on the grid of spacing `2^-mu(n+2)` from `a` plus the endpoint `x`,
/// each to precision `n + 2`. Every `t` is within one spacing of a sample.
pub fn max_param_with(f: &FunctionOracle, x: &Dyadic, n: u64, max_points: u64) -> Result<Dyadic> {
    f.check(x)?;
    let m = f.modulus.at(n + 2);
    let len = x - &f.a;
    let steps = grid_size(&len, m);
    let count = check_grid(&(&steps + 1u32), max_points)?;
    let delta = Dyadic::pow2(-(m as i64));
    let mut best: Option<Dyadic> = None;
    let mut t = f.a.clone();
    for _ in 0..count {
        let s = if t > *x { x.clone() } else { t.clone() };
        let v = (f.eval)(&s, n + 2)?;
        best = Some(match best {
            Some(b) => b.max(v),
            None => v,
        });
        if s == *x {
            break;
        }
        t = &t + &delta;
    }
    Ok(best.expect("at least one sample"))
}

/// `integral_a^x f(t) dt` within `2^-n`.
pub fn integrate(f: &FunctionOracle, x: &Dyadic, n: u64) -> Result<Dyadic> {
    integrate_with(f, x, n, DEFAULT_MAX_POINTS)
}

/// [`integrate`] with an explicit cap on the number of panels.
///
/// Midpoint rule on panels of width `2^-mu(n+2+c)` with `c = ceil(log2(x-a+1))`;
/// the last panel ends at `x`. The sum is exact before the final rounding.
pub fn integrate_with(f: &FunctionOracle, x: &Dyadic, n: u64, max_points: u64) -> Result<Dyadic> {
    f.check(x)?;
    let len = x - &f.a;
    if len.is_zero() {
        return Ok(Dyadic::zero());
    }
    let c = ceil_log2_dyadic(&(&len + &Dyadic::one())).max(0) as u64;
    let m = f.modulus.at(n + 2 + c);
    let panels = check_grid(&grid_size(&len, m), max_points)?;
    let w = Dyadic::pow2(-(m as i64));
    let prec = n + 2 + c;
    let mut sum = Dyadic::zero();
    let mut left = f.a.clone();
    for _ in 0..panels {
        let right = (&left + &w).min(x.clone());
        let width = &right - &left;
        if width.is_zero() {
            break;
        }
        let mid = (&left + &right).half();
        let v = (f.eval)(&mid, prec)?;
        sum = &sum + &(&v * &width);
        left = right;
    }
    Ok(sum.round_abs(n as i64 + 1, Rounding::Nearest).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Signed;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(m.into(), e)
    }

    // |v - num/den| <= 2^-n, certified by an approximation at n + 8.
    fn close(v: &Dyadic, num: i64, den: i64, n: u64) -> bool {
        let diff = (&Real::constant(v.clone()) - &Real::rational(num, den)).approx(n + 8).unwrap();
        diff.abs() < BigInt::from(256)
    }

    fn identity() -> FunctionOracle {
        oracle_from_real_expr(|t| t, Modulus::new(|n| n), Dyadic::zero(), Dyadic::one(), EvalConfig::default()).unwrap()
    }

    fn parabola() -> FunctionOracle {
        oracle_from_real_expr(
            |t| &t * &(Real::one() - &t),
            Modulus::lipschitz(1),
            Dyadic::zero(),
            Dyadic::one(),
            EvalConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn oracle_examples() {
        let id = identity();
        assert!(close(&id.eval(&d(1, -1), 5).unwrap(), 1, 2, 5));
        let p = parabola();
        assert!(close(&p.eval(&d(1, -2), 8).unwrap(), 3, 16, 8));
        let e = oracle_from_real_expr(|t| t.exp(), Modulus::new(|n| n + 2), Dyadic::zero(), Dyadic::one(), EvalConfig::default()).unwrap();
        let v = e.eval(&Dyadic::one(), 10).unwrap();
        assert!((v.to_f64() - std::f64::consts::E).abs() <= 1.0 / 1024.0);
        assert!(matches!(p.eval(&d(3, 0), 4), Err(Error::Domain(_))));
    }

    #[test]
    fn modulus_is_monotone() {
        let m = Modulus::new(|n| if n % 2 == 0 { n } else { 0 });
        let mut last = 0;
        for n in 0..30 {
            assert!(m.at(n) >= last);
            last = m.at(n);
        }
        assert_eq!(Modulus::lipschitz(5).at(10), 13);
        assert_eq!(Modulus::lipschitz(4).at(10), 12);
        assert_eq!(Modulus::lipschitz(1).at(10), 10);
    }

    #[test]
    fn max_examples() {
        let id = identity();
        let x = d(5, -3);
        assert!(close(&max_param(&id, &x, 8).unwrap(), 5, 8, 8));
        let p = parabola();
        assert!(close(&max_param(&p, &Dyadic::one(), 10).unwrap(), 1, 4, 10));
        assert!(close(&max_param(&p, &d(1, -2), 10).unwrap(), 3, 16, 10));
    }

    #[test]
    fn integral_examples() {
        let one = FunctionOracle::new(Dyadic::zero(), Dyadic::one(), Modulus::new(|_| 0), |_, _| Ok(Dyadic::one())).unwrap();
        assert!(close(&integrate(&one, &d(3, -2), 12).unwrap(), 3, 4, 12));
        assert!(close(&integrate(&identity(), &Dyadic::one(), 10).unwrap(), 1, 2, 10));
        assert!(close(&integrate(&parabola(), &Dyadic::one(), 10).unwrap(), 1, 6, 10));
        assert_eq!(integrate(&parabola(), &Dyadic::zero(), 10).unwrap(), Dyadic::zero());
    }

    #[test]
    fn grid_cap_is_enforced() {
        let steep = FunctionOracle::new(Dyadic::zero(), Dyadic::one(), Modulus::new(|n| 2 * n), |t, _| Ok(t.clone())).unwrap();
        match max_param_with(&steep, &Dyadic::one(), 20, 1 << 20) {
            Err(Error::GridExplosion { required, cap }) => {
                assert_eq!(cap, 1 << 20);
                assert!(required > BigUint::from(1u64 << 40));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(integrate_with(&steep, &Dyadic::one(), 20, 1000), Err(Error::GridExplosion { .. })));
    }
}
