//! Point evaluations of `exp`, `ln` and `hexp` at exact dyadic arguments.
//!
//! Each function returns a ball whose radius accounts for both the
//! truncated series tail and every intermediate rounding.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::dyadic::{Dyadic, Rounding};

use super::ball::{Ball, RADIUS_BITS};

static E_CACHE: Mutex<Option<(u64, Ball)>> = Mutex::new(None);
static LN2_CACHE: Mutex<Option<(u64, Ball)>> = Mutex::new(None);

fn bit_length(v: u64) -> u64 {
    64 - v.leading_zeros() as u64
}

fn cached(cache: &Mutex<Option<(u64, Ball)>>, q: u64, compute: impl Fn(u64) -> Ball) -> Ball {
    if let Some((have, ball)) = cache.lock().unwrap_or_else(|e| e.into_inner()).as_ref() {
        if *have >= q {
            return ball.clone();
        }
    }
    // Overshoot so that slowly growing requests do not recompute every time.
    let target = q + q / 4 + 16;
    let ball = compute(target);
    let mut slot = cache.lock().unwrap_or_else(|e| e.into_inner());
    match slot.as_ref() {
        Some((have, _)) if *have >= target => {}
        _ => *slot = Some((target, ball.clone())),
    }
    ball
}

/// Euler's number with absolute error at most `2^-q`.
pub fn e_const(q: u64) -> Ball {
    cached(&E_CACHE, q, |w| taylor_exp(&Dyadic::one(), w))
}

/// `ln 2` with absolute error at most `2^-q`.
pub fn ln2_const(q: u64) -> Ball {
    cached(&LN2_CACHE, q, |w| {
        atanh_ratio(&Dyadic::one(), &Dyadic::from_i64(3), w).shl(1)
    })
}

/// `e^u` for `|u| <= 1` with absolute error at most `2^-w` (plus the returned radius).
pub fn taylor_exp(u: &Dyadic, w: u64) -> Ball {
    if u.is_zero() {
        return Ball::exact(Dyadic::one());
    }
    debug_assert!(u.abs() <= Dyadic::one());
    // |u| < 2^-s
    let s = -u.magnitude().unwrap_or(0);
    let s = s.max(0) as u64;
    // Remainder after the degree-N term is at most 3 |u|^(N+1) / (N+1)!.
    // Sum of floor(log2 j) is a lower bound for log2((N+1)!).
    let mut n: u64 = 0;
    let mut log_fact: u64 = 0;
    loop {
        let j = n + 1;
        log_fact += bit_length(j) - 1;
        if s * j + log_fact >= w + 3 {
            break;
        }
        n += 1;
    }
    let wp = w + bit_length(n) + 6;
    let one = Ball::exact(Dyadic::one());
    let mut acc = one.clone();
    for j in (1..=n).rev() {
        let term = acc.mul_dyadic(u, wp).div_int(j as i64, wp);
        acc = one.add(&term, wp);
    }
    Ball::new(acc.center().clone(), acc.radius() + &Dyadic::pow2(-(w as i64) - 1))
}

fn pow_ball(base: &Ball, mut k: u64, p: u64) -> Ball {
    let mut result = Ball::exact(Dyadic::one());
    let mut sq = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = result.mul(&sq, p);
        }
        k >>= 1;
        if k > 0 {
            sq = sq.square(p);
        }
    }
    result
}

/// `e^x` with relative precision about `p` bits.
///
/// Reduces `x = k + u` with `k = round(x)` and `|u| <= 1/2`, then combines
/// `e^k` (repeated squaring of `e`) with a Taylor evaluation of `e^u`.
pub fn exp_point(x: &Dyadic, p: u64) -> Ball {
    if x.is_zero() {
        return Ball::exact(Dyadic::one());
    }
    let k: BigInt = x.to_scaled_int(0, Rounding::Nearest);
    let u = x - &Dyadic::from_int(k.clone());
    let k_abs = k.abs().to_u64().expect("exp argument too large");
    let w = p + bit_length(k_abs) + 8;
    let eu = taylor_exp(&u, w);
    if k_abs == 0 {
        return eu;
    }
    let mut ek = pow_ball(&e_const(w + bit_length(k_abs)), k_abs, w);
    if k.is_negative() {
        ek = ek.recip(w).expect("e^k is bounded away from zero");
    }
    ek.mul(&eu, p)
}

/// `atanh(num/den) = sum z^(2i+1)/(2i+1)` for `|num/den| <= 1/3`, absolute error about `2^-q`.
fn atanh_ratio(num: &Dyadic, den: &Dyadic, q: u64) -> Ball {
    if num.is_zero() {
        return Ball::exact(Dyadic::zero());
    }
    let wp = q + 12;
    let (zc, zerr) = num.div(den, wp, Rounding::Nearest);
    let z = Ball::new(zc, zerr);
    let w = z.square(wp);
    let w_up = w.upper().round_up(16);
    debug_assert!(w_up <= Dyadic::pow2(-1));
    // Tail of sum_{i>N} w^i/(2i+1) is at most w^(N+1)/(1-w) <= 2 w^(N+1).
    let target = Dyadic::pow2(-(q as i64) - 2);
    let mut n: u64 = 0;
    let mut pow = w_up.clone();
    while pow.shl(1) > target {
        pow = (&pow * &w_up).round_up(RADIUS_BITS);
        n += 1;
    }
    let wp = wp + bit_length(n);
    let inv_odd = |i: u64| Ball::exact(Dyadic::one()).div_int(2 * i as i64 + 1, wp);
    let mut acc = inv_odd(n);
    for i in (0..n).rev() {
        acc = acc.mul(&w, wp).add(&inv_odd(i), wp);
    }
    let r = z.mul(&acc, wp);
    let tail = z.mag_upper().round_up(RADIUS_BITS) * pow.shl(1);
    Ball::new(r.center().clone(), r.radius() + &tail)
}

/// Natural logarithm of a positive dyadic, relative precision about `p` bits.
pub fn ln_point(x: &Dyadic, p: u64) -> Ball {
    assert!(x.is_positive(), "logarithm of a non-positive dyadic");
    if *x == Dyadic::one() {
        return Ball::exact(Dyadic::zero());
    }
    // x = s * 2^k with s in [3/4, 3/2).
    let mut k = x.magnitude().unwrap_or(0) - 1;
    let mut s = x.shl(-k);
    if s >= Dyadic::new(BigInt::from(3), -1) {
        s = s.half();
        k += 1;
    }
    let w = p + 8 + bit_length(k.unsigned_abs());
    let one = Dyadic::one();
    let at = atanh_ratio(&(&s - &one), &(&s + &one), w).shl(1);
    if k == 0 {
        return at;
    }
    let scale = ln2_const(w + bit_length(k.unsigned_abs())).mul_dyadic(&Dyadic::from_i64(k), w);
    at.add(&scale, p)
}

/// `1 / (1 - ln x)` for `0 < x <= 1`.
pub fn hexp_point(x: &Dyadic, p: u64) -> Ball {
    let l = ln_point(x, p + 8);
    let denom = Ball::exact(Dyadic::one()).sub(&l, p + 8);
    denom
        .recip(p)
        .expect("1 - ln x >= 1 on (0, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_to(b: &Ball, v: f64, tol: f64) -> bool {
        (b.center().to_f64() - v).abs() <= tol && b.radius().to_f64() <= tol
    }

    #[test]
    fn constants() {
        assert!(close_to(&e_const(60), std::f64::consts::E, 1e-15));
        assert!(close_to(&ln2_const(60), std::f64::consts::LN_2, 1e-15));
        let e = e_const(200);
        assert!(*e.radius() <= Dyadic::pow2(-199));
    }

    #[test]
    fn exp_values() {
        for x in [-3.25f64, -0.5, 0.125, 1.0, 2.5, 10.0] {
            let b = exp_point(&Dyadic::from_f64(x).unwrap(), 60);
            assert!((b.center().to_f64() / x.exp() - 1.0).abs() < 1e-14, "{x}");
            assert!(b.radius().to_f64() / x.exp() < 1e-15);
        }
    }

    #[test]
    fn ln_values() {
        for x in [0.001f64, 0.3, 0.75, 1.5, 2.0, 1024.0, 7.0e9] {
            let b = ln_point(&Dyadic::from_f64(x).unwrap(), 60);
            assert!((b.center().to_f64() - x.ln()).abs() < 1e-13 * x.ln().abs().max(1.0), "{x}");
        }
    }

    #[test]
    fn hexp_small_argument() {
        // hexp(2^-64) = 1 / (1 + 64 ln 2)
        let b = hexp_point(&Dyadic::pow2(-64), 60);
        let expected = 1.0 / (1.0 + 64.0 * std::f64::consts::LN_2);
        assert!((b.center().to_f64() - expected).abs() < 1e-15);
    }
}
