//! Lazy exact reals.
//!
//! A [`Real`] is an immutable expression DAG. Asking it for an approximation
//! evaluates the whole DAG in ball arithmetic at one working precision and, if
//! the root ball is too wide, restarts at a higher precision. The answer to
//! `approx(n)` is an integer `a` with `|x - a 2^-n| <= 2^-n`.

mod ball;
pub mod elementary;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use parking_lot::Mutex;

use crate::dyadic::{format_fixed, round_div_nearest, Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::seq::{self, RealSeq, SeriesData};

pub use ball::{Ball, StepError, RADIUS_BITS};

/// Precision schedule of the restart loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    /// Lower bound for the first working precision.
    pub initial_precision: u64,
    /// Multiplier applied after each failed pass.
    pub precision_growth: u64,
    /// No pass runs above this many bits.
    pub max_precision: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            initial_precision: 64,
            precision_growth: 2,
            max_precision: 1 << 24,
        }
    }
}

impl EvalConfig {
    pub fn with_growth(mut self, growth: u64) -> Self {
        self.precision_growth = growth;
        self
    }

    pub fn with_max_precision(mut self, max: u64) -> Self {
        self.max_precision = max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial_precision < 2 {
            return Err(Error::Domain("initial precision must be at least 2 bits".into()));
        }
        if self.precision_growth < 2 {
            return Err(Error::Domain("precision growth must be at least 2".into()));
        }
        if self.max_precision < self.initial_precision {
            return Err(Error::Domain("max precision is below the initial precision".into()));
        }
        Ok(())
    }
}

/// Result of a successful query, with the cost of obtaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    /// `a_n` with `|x - a_n 2^-n| <= 2^-n`.
    pub value: BigInt,
    pub n: u64,
    /// Working precision of the pass that succeeded (0 when served from cache).
    pub work_prec: u64,
    /// Number of failed passes before the successful one.
    pub restarts: u32,
}

/// Callback answering `n -> a_n` with `|x - a_n 2^-n| <= 2^-n`.
pub type OracleFn = dyn Fn(u64) -> BigInt + Send + Sync;

struct Oracle {
    f: Arc<OracleFn>,
    /// Tightest interval seen so far and the precision that produced it.
    seen: Mutex<Option<(u64, Dyadic, Dyadic)>>,
}

enum Kind {
    Constant(Dyadic),
    Rational(BigInt, BigInt),
    Oracle(Oracle),
    Neg(Real),
    Add(Real, Real),
    Sub(Real, Real),
    Mul(Real, Real),
    Recip(Real),
    RecipEnriched(Real, u64),
    Sqrt(Real),
    Exp(Real),
    Hexp(Real),
    Series(Arc<SeriesData>, Real),
    Limit(RealSeq, Arc<dyn Fn(u64) -> u64 + Send + Sync>),
}

struct Node {
    kind: Kind,
    /// Largest enrichment exponent anywhere below this node.
    max_enrichment: u64,
    cache: Mutex<Option<Ball>>,
}

impl Drop for Node {
    // Long chains would otherwise be torn down recursively.
    fn drop(&mut self) {
        let mut pending = take_children(&mut self.kind);
        while let Some(child) = pending.pop() {
            if let Ok(mut node) = Arc::try_unwrap(child.0) {
                pending.extend(take_children(&mut node.kind));
            }
        }
    }
}

fn take_children(kind: &mut Kind) -> Vec<Real> {
    if kind_children(kind).is_empty() {
        return Vec::new();
    }
    match std::mem::replace(kind, Kind::Constant(Dyadic::zero())) {
        Kind::Neg(a)
        | Kind::Recip(a)
        | Kind::RecipEnriched(a, _)
        | Kind::Sqrt(a)
        | Kind::Exp(a)
        | Kind::Hexp(a)
        | Kind::Series(_, a) => vec![a],
        Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) => vec![a, b],
        _ => Vec::new(),
    }
}

/// An exact real number, represented by the program that approximates it.
#[derive(Clone)]
pub struct Real(Arc<Node>);

impl Real {
    fn from_kind(kind: Kind) -> Real {
        let own = match &kind {
            Kind::RecipEnriched(_, k) => *k,
            _ => 0,
        };
        let max_enrichment = kind_children(&kind)
            .iter()
            .map(|c| c.0.max_enrichment)
            .fold(own, u64::max);
        Real(Arc::new(Node {
            kind,
            max_enrichment,
            cache: Mutex::new(None),
        }))
    }

    pub fn constant(d: Dyadic) -> Real {
        Real::from_kind(Kind::Constant(d))
    }

    pub fn from_i64(v: i64) -> Real {
        Real::constant(Dyadic::from_i64(v))
    }

    pub fn zero() -> Real {
        Real::from_i64(0)
    }

    pub fn one() -> Real {
        Real::from_i64(1)
    }

    /// `num / den`. Dyadic values become constants.
    ///
    /// # Panics
    /// If `den` is zero.
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Real {
        let (num, den) = (num.into(), den.into());
        assert!(!den.is_zero(), "rational with zero denominator");
        if let Some(d) = Dyadic::from_exact_ratio(&num, &den) {
            return Real::constant(d);
        }
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        Real::from_kind(Kind::Rational(num, den))
    }

    /// A real given by its approximation sequence. The callback must satisfy
    /// `|x - f(n) 2^-n| <= 2^-n`; inconsistent answers that are actually
    /// observed raise [`Error::OracleViolation`].
    pub fn from_oracle(f: impl Fn(u64) -> BigInt + Send + Sync + 'static) -> Real {
        Real::from_kind(Kind::Oracle(Oracle {
            f: Arc::new(f),
            seen: Mutex::new(None),
        }))
    }

    /// `1/x` found by raising precision until `x` separates from zero.
    /// Does not terminate (other than by the precision cap) at `x = 0`.
    pub fn recip(&self) -> Real {
        Real::from_kind(Kind::Recip(self.clone()))
    }

    /// `1/x` under the promise `x >= 2^-k`. Evaluation starts at a precision
    /// high enough for the promise to separate `x` from zero on the first pass.
    pub fn recip_enriched(&self, k: u64) -> Real {
        Real::from_kind(Kind::RecipEnriched(self.clone(), k))
    }

    pub fn sqrt(&self) -> Real {
        Real::from_kind(Kind::Sqrt(self.clone()))
    }

    pub fn exp(&self) -> Real {
        Real::from_kind(Kind::Exp(self.clone()))
    }

    pub fn hexp(&self) -> Real {
        Real::from_kind(Kind::Hexp(self.clone()))
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub(crate) fn series(data: Arc<SeriesData>, x: Real) -> Real {
        Real::from_kind(Kind::Series(data, x))
    }

    /// Limit of `seq` where `rate(n)` is an index `j` with `|x - x_j| <= 2^-n`.
    pub fn limit(seq: RealSeq, rate: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Real {
        Real::from_kind(Kind::Limit(seq, Arc::new(rate)))
    }

    /// Same node (pointer identity).
    pub fn ptr_eq(&self, other: &Real) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Best enclosure cached so far at this node.
    pub fn cached_ball(&self) -> Option<Ball> {
        self.0.cache.lock().clone()
    }

    pub fn approx(&self, n: u64) -> Result<BigInt> {
        Ok(self.approx_with(n, &EvalConfig::default())?.value)
    }

    /// `a_n` together with the working precision and restart count it took.
    pub fn approx_with(&self, n: u64, cfg: &EvalConfig) -> Result<Approximation> {
        let target = n as i64 + 1;
        let (ball, work_prec, restarts) = self.refine(target, cfg)?;
        let value = ball.center().to_scaled_int(n as i64, Rounding::Nearest);
        Ok(Approximation {
            value,
            n,
            work_prec,
            restarts,
        })
    }

    /// Approximation as the dyadic `a_n 2^-n`.
    pub fn approx_dyadic(&self, n: u64, cfg: &EvalConfig) -> Result<Dyadic> {
        let a = self.approx_with(n, cfg)?.value;
        Ok(Dyadic::new(a, -(n as i64)))
    }

    /// An enclosure of radius at most `2^-n`.
    pub fn enclose(&self, n: u64, cfg: &EvalConfig) -> Result<Ball> {
        Ok(self.refine(n as i64, cfg)?.0)
    }

    pub(crate) fn enclose_abs(&self, target: i64, cfg: &EvalConfig) -> Result<Ball> {
        Ok(self.refine(target, cfg)?.0)
    }

    /// Decimal string within `10^-digits` of the value (not correctly rounded).
    pub fn to_decimal(&self, digits: usize, cfg: &EvalConfig) -> Result<String> {
        assert!(digits >= 1, "at least one decimal digit");
        // ceil(D log2 10) + 2
        let n = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 2;
        let a = self.approx_with(n, cfg)?.value;
        let scaled = a * BigInt::from(10u32).pow(digits as u32);
        let q = round_div_nearest(&scaled, &(BigInt::from(1u32) << n as usize));
        Ok(format_fixed(&q, digits))
    }

    /// Evaluates successive passes until the root radius is at most `2^-target`.
    fn refine(&self, target: i64, cfg: &EvalConfig) -> Result<(Ball, u64, u32)> {
        cfg.validate()?;
        let bound = Dyadic::pow2(-target);
        if let Some(b) = self.cached_ball() {
            if *b.radius() <= bound {
                return Ok((b, 0, 0));
            }
        }
        let guard = 31 + self.0.max_enrichment as i64;
        let start = (target + guard).max(cfg.initial_precision as i64).max(2) as u64;
        let mut p = start.min(cfg.max_precision);
        let mut restarts = 0u32;
        loop {
            match eval_pass(self, p, cfg) {
                Ok(b) => {
                    store_if_better(&self.0.cache, &b);
                    if *b.radius() <= bound {
                        return Ok((b, p, restarts));
                    }
                }
                Err(StepError::NotSeparated) => {}
                Err(StepError::Fatal(e)) => return Err(e),
            }
            if p >= cfg.max_precision {
                return Err(Error::PrecisionExhausted {
                    max_precision: cfg.max_precision,
                });
            }
            p = p.saturating_mul(cfg.precision_growth).min(cfg.max_precision);
            restarts += 1;
        }
    }
}

fn store_if_better(cache: &Mutex<Option<Ball>>, b: &Ball) {
    let mut slot = cache.lock();
    let better = match slot.as_ref() {
        Some(old) => b.radius() < old.radius(),
        None => true,
    };
    if better {
        *slot = Some(b.clone());
    }
}

fn kind_children(kind: &Kind) -> Vec<&Real> {
    match kind {
        Kind::Constant(_) | Kind::Rational(..) | Kind::Oracle(_) | Kind::Limit(..) => vec![],
        Kind::Neg(a)
        | Kind::Recip(a)
        | Kind::RecipEnriched(a, _)
        | Kind::Sqrt(a)
        | Kind::Exp(a)
        | Kind::Hexp(a)
        | Kind::Series(_, a) => vec![a],
        Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) => vec![a, b],
    }
}

/// One bottom-up evaluation of the DAG at working precision `p`.
/// Iterative so that deep chains (long logistic iterations) do not overflow the stack.
fn eval_pass(root: &Real, p: u64, cfg: &EvalConfig) -> std::result::Result<Ball, StepError> {
    let mut memo: HashMap<*const Node, Ball> = HashMap::new();
    // A node reachable along several paths may be pushed more than once, but is expanded once.
    let mut entered: HashSet<*const Node> = HashSet::new();
    let mut stack: Vec<(&Real, bool)> = vec![(root, false)];
    while let Some((node, expanded)) = stack.pop() {
        let key = Arc::as_ptr(&node.0);
        if memo.contains_key(&key) {
            continue;
        }
        let children = kind_children(&node.0.kind);
        if !expanded {
            if !entered.insert(key) {
                continue;
            }
            stack.push((node, true));
            for c in children {
                if !memo.contains_key(&Arc::as_ptr(&c.0)) {
                    stack.push((c, false));
                }
            }
            continue;
        }
        let args: Vec<&Ball> = children
            .iter()
            .map(|c| &memo[&Arc::as_ptr(&c.0)])
            .collect();
        let mut ball = step(&node.0.kind, &args, p, cfg)?;
        check_magnitude(&ball)?;
        if let Some(cached) = node.0.cache.lock().as_ref() {
            if cached.radius() < ball.radius() {
                ball = cached.clone();
            }
        }
        if is_leaf_cached(&node.0.kind) {
            store_if_better(&node.0.cache, &ball);
        }
        memo.insert(key, ball);
    }
    Ok(memo
        .remove(&Arc::as_ptr(&root.0))
        .expect("root evaluated"))
}

/// Values beyond `2^(2^MAG_LIMIT_LOG2)` are not supported. A ball that only
/// reaches that far because it is wide (a low-precision pass through a chaotic
/// computation squares its radius at every step) triggers a retry.
const MAG_LIMIT_LOG2: i64 = 24;

fn check_magnitude(ball: &Ball) -> std::result::Result<(), StepError> {
    let limit = 1i64 << MAG_LIMIT_LOG2;
    if ball.mag_lower().magnitude().is_some_and(|m| m > limit) {
        return Err(StepError::Fatal(Error::Domain(format!(
            "value exceeds 2^{limit} in magnitude"
        ))));
    }
    if ball.mag_upper().magnitude().is_some_and(|m| m > limit) {
        return Err(StepError::NotSeparated);
    }
    Ok(())
}

fn is_leaf_cached(kind: &Kind) -> bool {
    matches!(
        kind,
        Kind::Rational(..) | Kind::Oracle(_) | Kind::Series(..) | Kind::Limit(..)
    )
}

fn step(kind: &Kind, args: &[&Ball], p: u64, cfg: &EvalConfig) -> std::result::Result<Ball, StepError> {
    Ok(match kind {
        Kind::Constant(d) => Ball::exact(d.clone()),
        Kind::Rational(num, den) => {
            let (c, err) = Dyadic::from_ratio(num, den, p, Rounding::Nearest);
            Ball::new(c, err)
        }
        Kind::Oracle(o) => oracle_ball(o, p)?,
        Kind::Neg(_) => args[0].neg(),
        Kind::Add(..) => args[0].add(args[1], p),
        Kind::Sub(..) => args[0].sub(args[1], p),
        Kind::Mul(..) => args[0].mul(args[1], p),
        Kind::Recip(_) => args[0].recip(p)?,
        Kind::RecipEnriched(_, k) => {
            let floor = Dyadic::pow2(-(*k as i64) - 1);
            if args[0].upper() < floor {
                return Err(StepError::Fatal(Error::PromiseViolation(format!(
                    "reciprocal argument is below 2^-{}",
                    k + 1
                ))));
            }
            args[0].recip(p)?
        }
        Kind::Sqrt(_) => args[0].sqrt(p)?,
        Kind::Exp(_) => args[0].exp(p)?,
        Kind::Hexp(_) => args[0].hexp(p)?,
        Kind::Series(data, _) => seq::series_ball(data, args[0], p, cfg)?,
        Kind::Limit(s, rate) => {
            let j = rate(p);
            let b = s.get(j).enclose_abs(p as i64 + 1, cfg)?;
            Ball::new(b.center().clone(), b.radius().add_up(&Dyadic::pow2(-(p as i64)), RADIUS_BITS))
        }
    })
}

fn oracle_ball(o: &Oracle, p: u64) -> std::result::Result<Ball, StepError> {
    let a = (o.f)(p);
    let scale = -(p as i64);
    let lo = Dyadic::new(&a - 1, scale);
    let hi = Dyadic::new(&a + 1, scale);
    let mut seen = o.seen.lock();
    let (lo, hi) = match seen.take() {
        None => (lo, hi),
        Some((q, slo, shi)) => {
            if lo > shi || hi < slo {
                *seen = Some((q, slo, shi));
                return Err(StepError::Fatal(Error::OracleViolation { first: q, second: p }));
            }
            (lo.max(slo), hi.min(shi))
        }
    };
    *seen = Some((p, lo.clone(), hi.clone()));
    Ok(Ball::from_bounds(&lo, &hi, p.max(2)))
}

/// Multivalued comparison that always terminates.
///
/// `Ok(true)` guarantees `x < y + 2^-n`; `Ok(false)` guarantees `y <= x + 2^-n`.
/// When `|x - y| <= 2^-n` either answer may come back, and which one can
/// depend on how the arguments were built.
pub fn soft_less(x: &Real, y: &Real, n: u64, cfg: &EvalConfig) -> Result<bool> {
    let ax = x.approx_with(n + 2, cfg)?.value;
    let ay = y.approx_with(n + 2, cfg)?.value;
    Ok(ax < ay)
}

macro_rules! binary_op {
    ($tr:ident, $m:ident, $kind:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real::from_kind(Kind::$kind(self.clone(), rhs.clone()))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real::from_kind(Kind::$kind(self, rhs))
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                Real::from_kind(Kind::$kind(self, rhs.clone()))
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real::from_kind(Kind::$kind(self.clone(), rhs))
            }
        }
    };
}

binary_op!(Add, add, Add);
binary_op!(Sub, sub, Sub);
binary_op!(Mul, mul, Mul);

impl Div<&Real> for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        self * rhs.recip()
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        &self / &rhs
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::from_kind(Kind::Neg(self.clone()))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::from_kind(Kind::Neg(self))
    }
}

impl From<Dyadic> for Real {
    fn from(d: Dyadic) -> Self {
        Real::constant(d)
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Self {
        Real::from_i64(v)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.0.kind {
            Kind::Constant(d) => return write!(f, "Real({d})"),
            Kind::Rational(n, d) => return write!(f, "Real({n}/{d})"),
            Kind::Oracle(_) => "oracle",
            Kind::Neg(_) => "neg",
            Kind::Add(..) => "add",
            Kind::Sub(..) => "sub",
            Kind::Mul(..) => "mul",
            Kind::Recip(_) => "recip",
            Kind::RecipEnriched(..) => "recip_enriched",
            Kind::Sqrt(_) => "sqrt",
            Kind::Exp(_) => "exp",
            Kind::Hexp(_) => "hexp",
            Kind::Series(..) => "series",
            Kind::Limit(..) => "limit",
        };
        write!(f, "Real(<{name}>)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn third_is_multivalued_but_close() {
        let a = Real::rational(1, 3).approx(3).unwrap();
        assert!(a == BigInt::from(2) || a == BigInt::from(3));
    }

    #[test]
    fn zero_and_exact_sum() {
        for n in [0, 1, 17, 300] {
            assert_eq!(Real::zero().approx(n).unwrap(), BigInt::zero());
        }
        let s = Real::rational(1, 3) + Real::rational(2, 3);
        assert_eq!(s.approx(10).unwrap(), BigInt::from(1024));
    }

    #[test]
    fn enriched_reciprocal() {
        let x = Real::rational(1, 4).recip_enriched(2);
        assert_eq!(x.approx(4).unwrap(), BigInt::from(64));
        let y = Real::constant(Dyadic::pow2(-10)).recip_enriched(10);
        assert_eq!(y.approx(3).unwrap(), BigInt::from(8192));
        let z = Real::zero().recip_enriched(5).approx(4);
        assert!(matches!(
            z,
            Err(Error::PromiseViolation(_)) | Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn enrichment_separates_on_first_pass() {
        let x = Real::rational(1, 3 << 20).recip_enriched(22);
        let a = x.approx_with(8, &cfg()).unwrap();
        assert_eq!(a.restarts, 0);
    }

    #[test]
    fn adaptive_recip_of_zero_exhausts() {
        let c = cfg().with_max_precision(1024);
        let r = Real::zero().recip().approx_with(4, &c);
        assert_eq!(r, Err(Error::PrecisionExhausted { max_precision: 1024 }));
    }

    #[test]
    fn soft_less_examples() {
        let c = cfg();
        assert!(soft_less(&Real::zero(), &Real::one(), 10, &c).unwrap());
        let x = Real::rational(1, 7);
        let _either = soft_less(&x, &x, 5, &c).unwrap();
        let third = Real::rational(1, 3);
        let three_eighths = Real::constant(Dyadic::new(3.into(), -3));
        // |3/8 - 1/3| = 1/24 < 1/16, both answers are legal; it must terminate.
        let _ = soft_less(&third, &three_eighths, 4, &c).unwrap();
        assert!(!soft_less(&Real::one(), &Real::zero(), 3, &c).unwrap());
    }

    #[test]
    fn decimal_output() {
        let c = cfg();
        let s = Real::rational(1, 3).to_decimal(5, &c).unwrap();
        assert!(s == "0.33333" || s == "0.33334", "{s}");
        assert_eq!(Real::one().exp().to_decimal(5, &c).unwrap(), "2.71828");
        assert_eq!(Real::zero().to_decimal(3, &c).unwrap(), "0.000");
        assert_eq!(Real::rational(-1, 2).to_decimal(2, &c).unwrap(), "-0.50");
    }

    #[test]
    fn oracle_inconsistency_is_reported() {
        // Answers 0 at low precision and 1 at high precision.
        let bad = Real::from_oracle(|n| if n < 100 { BigInt::zero() } else { BigInt::from(1) << n as usize });
        let c = cfg();
        assert!(bad.approx_with(10, &c).is_ok());
        let r = (&bad * &Real::from_i64(1)).approx_with(80, &c);
        assert!(matches!(r, Err(Error::OracleViolation { .. })), "{r:?}");
    }

    #[test]
    fn shared_subexpressions_evaluate_once_per_pass() {
        let calls = Arc::new(AtomicUsize::new(0));
        let counter = calls.clone();
        let leaf = Real::from_oracle(move |n| {
            counter.fetch_add(1, Ordering::SeqCst);
            BigInt::from(1) << n as usize
        });
        let mut x = leaf.clone();
        for _ in 0..40 {
            x = &x * &x;
        }
        assert_eq!(x.approx(4).unwrap(), BigInt::from(16));
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn deep_chains_do_not_overflow() {
        let mut x = Real::one();
        for _ in 0..200_000 {
            x = &x + &Real::zero();
        }
        assert_eq!(x.approx(4).unwrap(), BigInt::from(16));
    }

    #[test]
    fn cache_radii_never_grow() {
        let x = Real::rational(2, 3).sqrt().exp();
        let c = cfg();
        let mut last: Option<Dyadic> = None;
        for n in [10u64, 200, 50, 400, 5, 300] {
            x.approx_with(n, &c).unwrap();
            let r = x.cached_ball().unwrap().radius().clone();
            if let Some(prev) = &last {
                assert!(r <= *prev);
            }
            last = Some(r);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        c.precision_growth = 1;
        assert!(Real::one().approx_with(3, &c).is_err());
        let c = cfg().with_max_precision(8);
        assert!(c.validate().is_err());
    }
}
