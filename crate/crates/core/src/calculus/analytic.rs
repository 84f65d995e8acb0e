//! Analytic functions as power series around a dyadic center.
//!
//! With `|f^(j)| <= B l^j j^j` one gets `|c_j| <= B (e l)^j`, so on the radius
//! `r <= 1/(2 e l)` the series has tail data `A = B`, `q = 2`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use parking_lot::Mutex;

use num_bigint::BigInt;

use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::real::{Ball, EvalConfig, Real, StepError};
use crate::seq::{series_ball, series_eval, RealSeq, SeriesData};

/// Upper bound `e < 87/32` used for the certified radius and parameter updates.
const E_NUM: u64 = 87;
const E_DEN_LOG2: i64 = 5;

/// A real-analytic function given by its Taylor coefficients at `t0`.
#[derive(Clone, Debug)]
pub struct AnalyticFn {
    series: Arc<SeriesData>,
    t0: Dyadic,
    b: u64,
    l: u64,
}

impl AnalyticFn {
    /// Coefficients `c_j` with the promise `|c_j| <= B (e l)^j`.
    pub fn new(coeffs: RealSeq, t0: Dyadic, b: u64, l: u64) -> Result<Self> {
        if b < 1 || l < 1 {
            return Err(Error::Domain("analytic bounds need B >= 1 and l >= 1".into()));
        }
        let series = SeriesData::new(coeffs, Dyadic::from_i64(b as i64), Dyadic::from_i64(2), certified_radius(l))?;
        Ok(AnalyticFn {
            series: Arc::new(series),
            t0,
            b,
            l,
        })
    }

    /// `exp` around `t0 = 0` with `B = 3`, `l = 3`.
    pub fn exp_series() -> Self {
        let table = Arc::new(Mutex::new(InvFactorials::default()));
        let coeffs = RealSeq::new(move |j| {
            let table = Arc::clone(&table);
            Real::from_oracle(move |p| table.lock().scaled(j, p))
        });
        AnalyticFn::new(coeffs, Dyadic::zero(), 3, 3).expect("valid bounds")
    }

    pub fn series(&self) -> &Arc<SeriesData> {
        &self.series
    }

    pub fn center(&self) -> &Dyadic {
        &self.t0
    }

    pub fn bound_b(&self) -> u64 {
        self.b
    }

    pub fn bound_l(&self) -> u64 {
        self.l
    }

    pub fn radius(&self) -> &Dyadic {
        self.series.radius()
    }

    pub fn coeff(&self, j: u64) -> Real {
        self.series.coeffs().get(j)
    }

    /// `g(x)` as a lazy real; `|x - t0| <= r` is checked softly.
    pub fn at(&self, x: &Real) -> Real {
        series_eval(&self.series, &(x - &Real::constant(self.t0.clone())))
    }

    /// `a_n` for `g(x)`.
    pub fn eval(&self, x: &Real, n: u64, cfg: &EvalConfig) -> Result<BigInt> {
        Ok(self.at(x).approx_with(n, cfg)?.value)
    }

    /// `g'`: `c'_j = (j+1) c_{j+1}`, bounds `(ceil(B e l), 2 l)`,
    /// using `j + 1 <= 2^j`.
    pub fn diff(&self) -> AnalyticFn {
        let src = self.series.coeffs().clone();
        let coeffs = RealSeq::new(move |j| &Real::from_i64(j as i64 + 1) * &src.get(j + 1));
        let b = (self.b as u128 * self.l as u128 * E_NUM as u128).div_ceil(1u128 << E_DEN_LOG2);
        let b = u64::try_from(b).expect("derivative bound overflows");
        AnalyticFn::new(coeffs, self.t0.clone(), b, 2 * self.l).expect("valid bounds")
    }

    /// Antiderivative vanishing at `t0`: `c_0 = 0`, `c_{j+1} = c_j/(j+1)`; bounds unchanged.
    pub fn integrate(&self) -> AnalyticFn {
        let src = self.series.coeffs().clone();
        let coeffs = RealSeq::new(move |j| {
            if j == 0 {
                Real::zero()
            } else {
                &src.get(j - 1) * &Real::rational(1, j as i64)
            }
        });
        AnalyticFn::new(coeffs, self.t0.clone(), self.b, self.l).expect("valid bounds")
    }

    /// Coefficientwise sum; bounds `(B1 + B2, max l)`.
    pub fn add(&self, other: &AnalyticFn) -> Result<AnalyticFn> {
        self.same_center(other)?;
        let (s, o) = (self.series.coeffs().clone(), other.series.coeffs().clone());
        let coeffs = RealSeq::new(move |j| &s.get(j) + &o.get(j));
        AnalyticFn::new(coeffs, self.t0.clone(), self.b + other.b, self.l.max(other.l))
    }

    /// Cauchy product; bounds `(B1 B2, 2 max l)` after absorbing `j + 1 <= 2^j`.
    pub fn mul(&self, other: &AnalyticFn) -> Result<AnalyticFn> {
        self.same_center(other)?;
        let (s, o) = (self.series.coeffs().clone(), other.series.coeffs().clone());
        let coeffs = RealSeq::new(move |j| {
            (0..=j)
                .map(|i| &s.get(i) * &o.get(j - i))
                .reduce(|a, b| a + b)
                .expect("non-empty")
        });
        let b = self.b.checked_mul(other.b).expect("product bound overflows");
        AnalyticFn::new(coeffs, self.t0.clone(), b, 2 * self.l.max(other.l))
    }

    fn same_center(&self, other: &AnalyticFn) -> Result<()> {
        if self.t0 != other.t0 {
            return Err(Error::Domain("series are anchored at different centers".into()));
        }
        Ok(())
    }

    /// Bound `2B/r` on `|g'|` over the certified disc.
    pub fn lipschitz_bound(&self) -> Dyadic {
        Dyadic::from_i64(2 * self.b as i64).div(self.radius(), 32, Rounding::Ceil).0
    }
}

/// A dyadic lower bound for `1/(2 e l)`.
fn certified_radius(l: u64) -> Dyadic {
    let den = Dyadic::from_i64(2 * E_NUM as i64 * l as i64);
    Dyadic::pow2(E_DEN_LOG2).div(&den, 32, Rounding::Floor).0
}

/// Floored `2^prec / j!` for `j < table.len()`, each within 2 of the true value.
/// Shared by all coefficients of [`AnalyticFn::exp_series`], so a series
/// evaluation costs one division by a small integer per term.
#[derive(Default)]
struct InvFactorials {
    prec: u64,
    table: Vec<BigInt>,
}

impl InvFactorials {
    /// `a` with `|a 2^-p - 1/j!| <= 2^-p`.
    fn scaled(&mut self, j: u64, p: u64) -> BigInt {
        let need = p + 2;
        if self.prec < need || self.table.len() as u64 <= j {
            let prec = if self.prec < need { need.max(2 * self.prec) } else { self.prec };
            let len = (j as usize + 1).max(2 * self.table.len());
            let mut table = Vec::with_capacity(len);
            let mut a = BigInt::from(1) << prec as usize;
            for i in 0..len {
                if i > 0 {
                    a /= i as u64;
                }
                table.push(a.clone());
            }
            *self = InvFactorials { prec, table };
        }
        let shift = (self.prec - p) as usize;
        let a = &self.table[j as usize];
        (a + (BigInt::from(1) << (shift - 1))) >> shift
    }
}

struct Cell {
    lo: Dyadic,
    hi: Dyadic,
    upper: Dyadic,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.cmp(&other.upper)
    }
}

/// `max g` over `[lo, hi]` within `2^-n`, by branch and bound.
///
/// A cell's upper bound is the smaller of `g(mid) + 2B/r * halfwidth` (the
/// global Lipschitz bound on the certified disc) and the upper end of a ball
/// evaluation of the series over the whole cell. The interval must lie in the
/// certified disc.
pub fn analytic_max(g: &AnalyticFn, lo: &Dyadic, hi: &Dyadic, n: u64, cfg: &EvalConfig) -> Result<Dyadic> {
    if lo > hi {
        return Err(Error::Domain("empty interval".into()));
    }
    let r = g.radius();
    let left = g.center() - r;
    let right = g.center() + r;
    if *lo < left || *hi > right {
        return Err(Error::Domain("interval leaves the certified radius".into()));
    }
    let lambda = g.lipschitz_bound();
    let eps = Dyadic::pow2(-(n as i64) - 3);
    let gap = Dyadic::pow2(-(n as i64));
    let prec = n + 4;
    let sample = |t: &Dyadic| -> Result<Dyadic> { g.at(&Real::constant(t.clone())).approx_dyadic(n + 3, cfg) };
    let make = |lo: Dyadic, hi: Dyadic, v: &Dyadic| -> Result<Cell> {
        let half = (&hi - &lo).half();
        let by_slope = v + &eps + (&lambda * &half);
        let cell = Ball::from_bounds(&(&lo - g.center()), &(&hi - g.center()), prec + 8);
        let range = series_ball(g.series(), &cell, prec, cfg).map_err(|e| match e {
            StepError::Fatal(e) => e,
            StepError::NotSeparated => Error::Domain("series evaluation failed".into()),
        })?;
        let upper = by_slope.min(range.upper());
        Ok(Cell { lo, hi, upper })
    };
    let mut best = sample(lo)?.max(sample(hi)?);
    let mut heap = BinaryHeap::new();
    let v = sample(&(lo + hi).half())?;
    best = best.max(v.clone());
    heap.push(make(lo.clone(), hi.clone(), &v)?);
    while let Some(cell) = heap.pop() {
        // Every point lies in some cell, so the top upper bound dominates the maximum.
        if &cell.upper - &best <= gap {
            return Ok(best);
        }
        let mid = (&cell.lo + &cell.hi).half();
        for (a, b) in [(cell.lo.clone(), mid.clone()), (mid, cell.hi.clone())] {
            let v = sample(&(&a + &b).half())?;
            best = best.clone().max(v.clone());
            heap.push(make(a, b, &v)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn within(v: &Real, w: &Real, n: u64) -> bool {
        (v - w).approx(n + 8).unwrap().abs() < BigInt::from(256)
    }

    #[test]
    fn radius_respects_bound() {
        for l in [1u64, 2, 3, 10, 1000] {
            let r = certified_radius(l);
            // r e l <= 1/2 with e > 2.718
            let lhs = &r * &Dyadic::from_i64(2718 * l as i64);
            assert!(lhs <= Dyadic::from_i64(500));
            assert!(r.to_f64() > 0.99 / (2.0 * std::f64::consts::E * l as f64));
        }
    }

    #[test]
    fn exp_at_zero() {
        let g = AnalyticFn::exp_series();
        let cfg = EvalConfig::default();
        assert_eq!(g.eval(&Real::zero(), 30, &cfg).unwrap(), BigInt::from(1u64 << 30));
        let x = Real::constant(Dyadic::pow2(-5));
        assert!(within(&g.at(&x), &x.exp(), 100));
    }

    #[test]
    fn derivative_of_exp() {
        let g = AnalyticFn::exp_series();
        let dg = g.diff();
        assert_eq!(dg.bound_l(), 6);
        assert_eq!(dg.bound_b(), 25);
        for j in [0u64, 1, 7, 20] {
            assert!(within(&dg.coeff(j), &g.coeff(j), 120));
        }
    }

    #[test]
    fn integral_of_constant() {
        let one = AnalyticFn::new(RealSeq::finite(vec![Real::one()]), Dyadic::zero(), 1, 1).unwrap();
        let id = one.integrate();
        assert!(within(&id.coeff(0), &Real::zero(), 50));
        assert!(within(&id.coeff(1), &Real::one(), 50));
        assert!(within(&id.coeff(2), &Real::zero(), 50));
    }

    #[test]
    fn sums_and_products() {
        let geo = AnalyticFn::new(RealSeq::new(|_| Real::one()), Dyadic::zero(), 1, 1).unwrap();
        let sq = geo.mul(&geo).unwrap();
        // 1/(1-t)^2 = sum (j+1) t^j
        assert!(within(&sq.coeff(5), &Real::from_i64(6), 40));
        let twice = geo.add(&geo).unwrap();
        let x = Real::constant(Dyadic::pow2(-4));
        let expected = Real::from_i64(2) / (Real::one() - x.clone());
        assert!(within(&twice.at(&x), &expected, 60));
        let other = AnalyticFn::new(RealSeq::new(|_| Real::one()), Dyadic::one(), 1, 1).unwrap();
        assert!(geo.add(&other).is_err());
    }

    #[test]
    fn maxima() {
        let cfg = EvalConfig::default();
        let c = AnalyticFn::new(RealSeq::finite(vec![Real::rational(1, 3)]), Dyadic::zero(), 1, 1).unwrap();
        let r = c.radius().clone();
        let m = analytic_max(&c, &(-&r), &r, 20, &cfg).unwrap();
        assert!(within(&Real::constant(m), &Real::rational(1, 3), 20));
        assert!(analytic_max(&c, &Dyadic::zero(), &Dyadic::one(), 5, &cfg).is_err());
    }
}
