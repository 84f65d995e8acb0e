//! Midpoint-radius enclosures.
//!
//! Each operation takes a working precision `p`, rounds the new center to `p`
//! significant bits and folds every rounding error into the radius. Radii are
//! themselves kept to [`RADIUS_BITS`] bits, always rounded upward.

use std::fmt;

use crate::dyadic::{Dyadic, Rounding};
use crate::error::Error;

use super::elementary;

/// Significant bits kept in radii.
pub const RADIUS_BITS: u64 = 32;

/// Largest exponential argument accepted, about `2^23 ln 2`.
pub const EXP_ARG_LIMIT: i64 = 5_800_000;

/// Upper bound on a sum of non-negative radius terms.
pub(crate) fn radius_sum(terms: &[&Dyadic]) -> Dyadic {
    terms.iter().fold(Dyadic::zero(), |acc, t| acc.add_up(t, RADIUS_BITS))
}

/// Why a single ball operation could not produce an enclosure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    /// The operand ball is too wide at this precision (for example it
    /// contains zero under a reciprocal). Retrying at higher precision may help.
    NotSeparated,
    /// Nothing more precision can fix.
    Fatal(Error),
}

impl From<Error> for StepError {
    fn from(e: Error) -> Self {
        StepError::Fatal(e)
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> StepError {
    StepError::Fatal(Error::Domain(msg.into()))
}

/// A center and a non-negative radius; the represented value lies in
/// `[center - radius, center + radius]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Ball {
    center: Dyadic,
    radius: Dyadic,
}

impl Ball {
    pub fn new(center: Dyadic, radius: Dyadic) -> Self {
        assert!(!radius.is_negative(), "ball radius must be non-negative");
        Ball {
            center,
            radius: radius.round_up(RADIUS_BITS),
        }
    }

    pub fn exact(center: Dyadic) -> Self {
        Ball {
            center,
            radius: Dyadic::zero(),
        }
    }

    /// Smallest-radius ball with a `p`-bit center containing `[lo, hi]`.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, p: u64) -> Self {
        debug_assert!(lo <= hi);
        let (center, err) = lo.add_round(hi, p + 1);
        let center = center.half();
        let half_width = hi.add_bound(&-lo, Rounding::Ceil).half();
        Ball::new(center, half_width.add_up(&err.half(), RADIUS_BITS))
    }

    pub fn center(&self) -> &Dyadic {
        &self.center
    }

    pub fn radius(&self) -> &Dyadic {
        &self.radius
    }

    pub fn lower(&self) -> Dyadic {
        self.center.add_bound(&-&self.radius, Rounding::Floor)
    }

    pub fn upper(&self) -> Dyadic {
        self.center.add_bound(&self.radius, Rounding::Ceil)
    }

    pub fn is_exact(&self) -> bool {
        self.radius.is_zero()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        (x - &self.center).abs() <= self.radius
    }

    pub fn intersects(&self, other: &Ball) -> bool {
        let gap = (&self.center - &other.center).abs();
        gap <= &self.radius + &other.radius
    }

    /// Upper bound on `|x|` for every `x` in the ball.
    pub fn mag_upper(&self) -> Dyadic {
        self.center.abs().add_bound(&self.radius, Rounding::Ceil)
    }

    /// Lower bound on `|x|`, zero when the ball touches zero.
    pub fn mag_lower(&self) -> Dyadic {
        let l = self.center.abs().add_bound(&-&self.radius, Rounding::Floor);
        if l.is_negative() {
            Dyadic::zero()
        } else {
            l
        }
    }

    /// The ball does not contain zero.
    pub fn is_separated(&self) -> bool {
        self.center.abs() > self.radius
    }

    pub fn neg(&self) -> Ball {
        Ball {
            center: -&self.center,
            radius: self.radius.clone(),
        }
    }

    /// Exact multiplication by `2^k`.
    pub fn shl(&self, k: i64) -> Ball {
        Ball {
            center: self.center.shl(k),
            radius: self.radius.shl(k),
        }
    }

    pub fn add(&self, other: &Ball, p: u64) -> Ball {
        let (center, err) = self.center.add_round(&other.center, p);
        Ball::new(center, radius_sum(&[&self.radius, &other.radius, &err]))
    }

    pub fn sub(&self, other: &Ball, p: u64) -> Ball {
        let (center, err) = self.center.add_round(&-&other.center, p);
        Ball::new(center, radius_sum(&[&self.radius, &other.radius, &err]))
    }

    pub fn mul(&self, other: &Ball, p: u64) -> Ball {
        let (center, err) = (&self.center * &other.center).round(p);
        let a = self.center.abs().round_up(RADIUS_BITS);
        let b = other.center.abs().round_up(RADIUS_BITS);
        let radius = radius_sum(&[&(&a * &other.radius), &(&b * &self.radius), &(&self.radius * &other.radius), &err]);
        Ball::new(center, radius)
    }

    pub fn mul_dyadic(&self, d: &Dyadic, p: u64) -> Ball {
        self.mul(&Ball::exact(d.clone()), p)
    }

    /// Division by a non-zero integer.
    pub fn div_int(&self, k: i64, p: u64) -> Ball {
        assert!(k != 0, "division by zero");
        let kd = Dyadic::from_i64(k);
        let (center, err) = self.center.div(&kd, p, Rounding::Nearest);
        let radius = self.radius.div(&kd.abs(), RADIUS_BITS, Rounding::Ceil).0.add_up(&err, RADIUS_BITS);
        Ball::new(center, radius)
    }

    pub fn square(&self, p: u64) -> Ball {
        self.mul(self, p)
    }

    /// `1/x`; needs the ball to exclude zero.
    pub fn recip(&self, p: u64) -> Result<Ball, StepError> {
        if !self.is_separated() {
            return Err(StepError::NotSeparated);
        }
        let (center, err) = Dyadic::one().div(&self.center, p, Rounding::Nearest);
        if self.radius.is_zero() {
            return Ok(Ball::new(center, err));
        }
        // |1/x - 1/c| <= r / (|c| (|c| - r)) for |x - c| <= r < |c|.
        let c = self.center.abs();
        let den = (&c * &c.add_bound(&-&self.radius, Rounding::Floor)).round_down(RADIUS_BITS);
        let spread = self.radius.div(&den, RADIUS_BITS, Rounding::Ceil).0;
        Ok(Ball::new(center, spread.add_up(&err, RADIUS_BITS)))
    }

    /// Square root by monotone endpoint evaluation; the lower end is clamped at 0.
    pub fn sqrt(&self, p: u64) -> Result<Ball, StepError> {
        let hi = self.upper();
        if hi.is_negative() {
            return Err(domain("square root of a negative number"));
        }
        if self.radius.is_zero() {
            let (s, err) = self.center.sqrt(p, Rounding::Nearest);
            return Ok(Ball::new(s, err));
        }
        let lo = self.lower().max(Dyadic::zero());
        let s_lo = lo.sqrt(p, Rounding::Floor).0;
        let s_hi = hi.sqrt(p, Rounding::Ceil).0;
        Ok(Ball::from_bounds(&s_lo, &s_hi, p))
    }

    /// `e^x`. Arguments above [`EXP_ARG_LIMIT`] are refused: a domain error
    /// when the whole ball lies above it, a retry when only its upper end does.
    pub fn exp(&self, p: u64) -> Result<Ball, StepError> {
        let limit = Dyadic::from_i64(EXP_ARG_LIMIT);
        if self.lower() > limit {
            return Err(domain("exponential overflows the supported magnitude"));
        }
        if self.upper() > limit {
            return Err(StepError::NotSeparated);
        }
        if self.radius > Dyadic::one() {
            let lo = elementary::exp_point(&self.lower().max(Dyadic::from_i64(-EXP_ARG_LIMIT)), p).lower();
            let hi = elementary::exp_point(&self.upper(), p).upper();
            return Ok(Ball::from_bounds(&lo.max(Dyadic::zero()), &hi, p));
        }
        let e = elementary::exp_point(&self.center, p);
        if self.radius.is_zero() {
            return Ok(e);
        }
        // For r <= 1: |e^(c+t) - e^c| <= e^c (e^r - 1) <= 2 r e^c.
        let spread = e.mag_upper().round_up(RADIUS_BITS) * self.radius.shl(1);
        Ok(Ball::new(e.center, e.radius.add_up(&spread, RADIUS_BITS)))
    }

    /// `ln x` for a ball of positive numbers.
    pub fn ln(&self, p: u64) -> Result<Ball, StepError> {
        let lo = self.lower();
        if !lo.is_positive() {
            if self.upper().is_positive() {
                return Err(StepError::NotSeparated);
            }
            return Err(domain("logarithm of a non-positive number"));
        }
        if self.radius.is_zero() {
            return Ok(elementary::ln_point(&self.center, p));
        }
        let a = elementary::ln_point(&lo, p).lower();
        let b = elementary::ln_point(&self.upper(), p).upper();
        Ok(Ball::from_bounds(&a, &b, p))
    }

    /// `hexp(x) = 1 / ln(e/x)` on `[0, 1]` with `hexp(0) = 0`.
    ///
    /// The function is increasing, so the enclosure comes from the endpoints
    /// clamped to `[0, 1]`. A ball straddling 0 yields `[0, hexp(hi)]`.
    pub fn hexp(&self, p: u64) -> Result<Ball, StepError> {
        let one = Dyadic::one();
        let lo = self.lower();
        let hi = self.upper();
        if lo > one {
            return Err(domain("hexp argument exceeds 1"));
        }
        if hi.is_negative() {
            return Err(domain("hexp argument is negative"));
        }
        if self.radius.is_zero() {
            return Ok(if self.center.is_zero() {
                Ball::exact(Dyadic::zero())
            } else {
                elementary::hexp_point(&self.center, p)
            });
        }
        let hi = hi.min(one);
        let upper = if hi.is_zero() {
            Dyadic::zero()
        } else {
            elementary::hexp_point(&hi, p).upper()
        };
        let lower = if lo.is_positive() {
            elementary::hexp_point(&lo, p).lower().max(Dyadic::zero())
        } else {
            Dyadic::zero()
        };
        Ok(Ball::from_bounds(&lower, &upper, p))
    }

    /// Intersection of two enclosures of the same value; `None` if disjoint.
    pub fn intersect(&self, other: &Ball, p: u64) -> Option<Ball> {
        let lo = self.lower().max(other.lower());
        let hi = self.upper().min(other.upper());
        if lo > hi {
            return None;
        }
        let candidate = Ball::from_bounds(&lo, &hi, p);
        Some(if candidate.radius < self.radius.clone().min(other.radius.clone()) {
            candidate
        } else if self.radius <= other.radius {
            self.clone()
        } else {
            other.clone()
        })
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball({} ± {})", self.center, self.radius)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} ± {:e}]", self.center.to_f64(), self.radius.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn recip_propagation_matches_formula() {
        let b = Ball::new(d(2, 0), d(1, -10));
        let r = b.recip(64).unwrap();
        assert!(r.contains(&d(1, -1)));
        // 2^-10 / (2 (2 - 2^-10)), up to the relative slack of 32-bit radii.
        let bound = d(1, -10).div(&(d(2, 0) * (d(2, 0) - d(1, -10))), 40, Rounding::Ceil).0;
        assert!(*r.radius() <= &bound + &bound.shl(-28));
        assert!(r.contains(&Dyadic::one().div(&(d(2, 0) + d(1, -10)), 80, Rounding::Nearest).0));
    }

    #[test]
    fn recip_needs_separation() {
        let b = Ball::new(d(1, -5), d(1, -4));
        assert_eq!(b.recip(64), Err(StepError::NotSeparated));
    }

    #[test]
    fn exp_at_zero() {
        let b = Ball::exact(Dyadic::zero()).exp(64).unwrap();
        assert!(b.contains(&Dyadic::one()));
        assert!(*b.radius() <= d(1, -62));
    }

    #[test]
    fn exp_range_limit() {
        let huge = Ball::exact(Dyadic::from_i64(EXP_ARG_LIMIT + 1));
        assert!(matches!(huge.exp(64), Err(StepError::Fatal(Error::Domain(_)))));
        let wide = Ball::new(Dyadic::zero(), Dyadic::from_i64(EXP_ARG_LIMIT * 2));
        assert_eq!(wide.exp(64), Err(StepError::NotSeparated));
    }

    #[test]
    fn far_apart_sums_stay_small() {
        let big = Ball::new(Dyadic::pow2(1 << 40), Dyadic::pow2(1 << 39));
        let tiny = Ball::new(Dyadic::pow2(-(1 << 40)), Dyadic::pow2(-(1 << 40)));
        let s = big.add(&tiny, 64);
        assert!(s.center().precision() <= 64);
        assert!(s.radius().precision() <= RADIUS_BITS);
        assert!(s.radius() >= big.radius());
        assert_eq!(s.center(), big.center());
    }

    #[test]
    fn hexp_at_one_and_zero() {
        let b = Ball::exact(Dyadic::one()).hexp(64).unwrap();
        assert!(b.contains(&Dyadic::one()));
        assert!(*b.radius() <= d(1, -60));
        let z = Ball::new(Dyadic::zero(), d(1, -20)).hexp(64).unwrap();
        assert!(z.contains(&Dyadic::zero()));
        assert!(z.lower() <= Dyadic::zero());
        assert!(Ball::exact(d(3, 0)).hexp(64).is_err());
        assert!(Ball::exact(d(-1, 0)).hexp(64).is_err());
    }

    #[test]
    fn sqrt_domain() {
        assert!(matches!(
            Ball::new(d(-1, 0), d(1, -3)).sqrt(32),
            Err(StepError::Fatal(Error::Domain(_)))
        ));
        let s = Ball::new(Dyadic::zero(), d(1, -20)).sqrt(32).unwrap();
        assert!(s.contains(&Dyadic::zero()));
        assert!(s.contains(&d(1, -10)));
    }
}
