//! Exact dyadic rationals `m * 2^e`.
//!
//! Every value is kept in canonical form: the mantissa is odd, or the value is
//! zero and the exponent is zero. Two dyadics are equal exactly when their
//! representations are equal, so the derived `Eq` and `Hash` are value-based.
//!
//! Addition, subtraction and multiplication are exact. Everything that cannot
//! be exact (division, square roots, bounded-precision rounding) takes a
//! [`Rounding`] mode and returns an upper bound on the error it committed.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Direction used when a result has to be cut down to finitely many bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Round to nearest, ties away from zero.
    Nearest,
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

/// Bits kept in error bounds returned by the rounding helpers.
const ERR_BITS: u64 = 32;

/// Alignment allowed in [`Dyadic::add_bound`] before it rounds.
pub const EXACT_WINDOW: u64 = 1 << 16;

fn checked_exp(a: i64, b: i64) -> i64 {
    a.checked_add(b)
        .expect("dyadic exponent overflow: precision beyond the machine-width exponent range")
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            return Dyadic { mantissa, exponent };
        }
        Dyadic {
            mantissa: mantissa >> tz,
            exponent: checked_exp(exponent, tz as i64),
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_int(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exponent: e,
        }
    }

    /// Exact conversion of a finite binary float.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let m = BigInt::from(m);
        Some(Dyadic::new(if negative { -m } else { m }, e))
    }

    /// Nearest binary64 value; may overflow to infinity or underflow to zero.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.mantissa.magnitude();
        let bits = mag.bits() as i64;
        let (top, shift) = if bits > 64 {
            ((mag >> (bits - 64) as usize).to_u64().unwrap_or(u64::MAX), bits - 64)
        } else {
            (mag.to_u64().unwrap_or(0), 0)
        };
        let e = self.exponent.saturating_add(shift);
        let v = top as f64 * 2f64.powi(e.clamp(-1100, 1100) as i32);
        let v = if e.abs() > 1100 {
            if e > 0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            v
        };
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.exponent >= 0
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Number of significant mantissa bits (zero for zero).
    pub fn precision(&self) -> u64 {
        self.mantissa.bits()
    }

    /// The integer `k` with `2^(k-1) <= |x| < 2^k`; `None` for zero.
    pub fn magnitude(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(checked_exp(self.exponent, self.mantissa.bits() as i64))
        }
    }

    /// Multiplication by `2^k`, exact.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: checked_exp(self.exponent, k),
        }
    }

    pub fn half(&self) -> Self {
        self.shl(-1)
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Rounds to at most `p` significant bits, nearest with ties away from
    /// zero. Returns the rounded value and an upper bound on `|result - self|`.
    pub fn round(&self, p: u64) -> (Dyadic, Dyadic) {
        self.round_with(p, Rounding::Nearest)
    }

    pub fn round_with(&self, p: u64, mode: Rounding) -> (Dyadic, Dyadic) {
        assert!(p >= 1, "rounding precision must be at least one bit");
        if self.is_zero() || self.precision() <= p {
            return (self.clone(), Dyadic::zero());
        }
        round_parts(
            self.is_negative(),
            self.mantissa.magnitude().clone(),
            self.exponent,
            false,
            Some(p),
            None,
            mode,
        )
    }

    /// Rounds to an integer multiple of `2^-n`.
    pub fn round_abs(&self, n: i64, mode: Rounding) -> (Dyadic, Dyadic) {
        if self.is_zero() || self.exponent >= -n {
            return (self.clone(), Dyadic::zero());
        }
        round_parts(
            self.is_negative(),
            self.mantissa.magnitude().clone(),
            self.exponent,
            false,
            None,
            Some(-n),
            mode,
        )
    }

    /// Upper bound kept to `p` bits; used for radii.
    pub fn round_up(&self, p: u64) -> Dyadic {
        self.round_with(p, Rounding::Ceil).0
    }

    pub fn round_down(&self, p: u64) -> Dyadic {
        self.round_with(p, Rounding::Floor).0
    }

    /// `self + other` rounded to `p` bits, with an error bound. Unlike
    /// `(a + b).round(p)` this never aligns mantissas across a huge exponent gap.
    pub fn add_round(&self, other: &Dyadic, p: u64) -> (Dyadic, Dyadic) {
        let (ma, mb) = match (self.magnitude(), other.magnitude()) {
            (None, _) => return other.round(p),
            (_, None) => return self.round(p),
            (Some(a), Some(b)) => (a, b),
        };
        let (big, m_big, m_small) = if ma >= mb { (self, ma, mb) } else { (other, mb, ma) };
        if m_big.saturating_sub(m_small) > p as i64 + 2 {
            // |small| < 2^m_small
            let (c, e) = big.round(p);
            return (c, e.add_up(&Dyadic::pow2(m_small), ERR_BITS));
        }
        (self + other).round(p)
    }

    /// An upper bound on `self + other` (both non-negative) with `bits` bits.
    pub fn add_up(&self, other: &Dyadic, bits: u64) -> Dyadic {
        debug_assert!(!self.is_negative() && !other.is_negative());
        let (ma, mb) = match (self.magnitude(), other.magnitude()) {
            (None, _) => return other.round_up(bits),
            (_, None) => return self.round_up(bits),
            (Some(a), Some(b)) => (a, b),
        };
        let (big, m_big, m_small) = if ma >= mb { (self, ma, mb) } else { (other, mb, ma) };
        if m_big.saturating_sub(m_small) > bits as i64 + 2 {
            // the smaller term is below 2^(m_big - bits - 2)
            let bump = Dyadic::pow2(m_big - bits as i64 - 2);
            return (&big.round_up(bits) + &bump).round_up(bits);
        }
        (self + other).round_up(bits)
    }

    /// `self + other`, exact unless the terms are so far apart in magnitude
    /// that the exact sum would need more than [`EXACT_WINDOW`] extra bits;
    /// then the smaller term is replaced by a bound in the direction of `mode`.
    pub fn add_bound(&self, other: &Dyadic, mode: Rounding) -> Dyadic {
        let (ma, mb) = match (self.magnitude(), other.magnitude()) {
            (Some(a), Some(b)) => (a, b),
            _ => return self + other,
        };
        let (big, small, m_big, m_small) = if ma >= mb { (self, other, ma, mb) } else { (other, self, mb, ma) };
        let window = (big.precision() + small.precision() + EXACT_WINDOW) as i64;
        let cut = m_big.saturating_sub(window);
        if m_small >= cut {
            return self + other;
        }
        // |small| < 2^m_small < 2^cut
        let unit = Dyadic::pow2(cut);
        match (mode, small.is_positive()) {
            (Rounding::Ceil, true) => big + &unit,
            (Rounding::Floor, false) => big - &unit,
            _ => big.clone(),
        }
    }

    /// The integer nearest to (or floor/ceil of) `self * 2^n`.
    pub fn to_scaled_int(&self, n: i64, mode: Rounding) -> BigInt {
        let d = self.round_abs(n, mode).0;
        if d.is_zero() {
            return BigInt::zero();
        }
        let shift = checked_exp(d.exponent, n);
        debug_assert!(shift >= 0);
        d.mantissa << shift as usize
    }

    /// `self / other` rounded to `p` significant bits, with an error bound.
    pub fn div(&self, other: &Dyadic, p: u64, mode: Rounding) -> (Dyadic, Dyadic) {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let negative = self.is_negative() != other.is_negative();
        let num = self.mantissa.magnitude();
        let den = other.mantissa.magnitude();
        let exp = checked_exp(self.exponent, -other.exponent);
        divide_magnitudes(negative, num, den, exp, p, mode)
    }

    /// `num / den` rounded to `p` significant bits.
    pub fn from_ratio(num: &BigInt, den: &BigInt, p: u64, mode: Rounding) -> (Dyadic, Dyadic) {
        assert!(!den.is_zero(), "rational with zero denominator");
        if num.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let negative = num.is_negative() != den.is_negative();
        divide_magnitudes(negative, num.magnitude(), den.magnitude(), 0, p, mode)
    }

    /// Square root rounded to `p` significant bits. Panics on negative input.
    pub fn sqrt(&self, p: u64, mode: Rounding) -> (Dyadic, Dyadic) {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return (Dyadic::zero(), Dyadic::zero());
        }
        let m = self.mantissa.magnitude();
        let bits = m.bits() as i64;
        let mut shift = (2 * p as i64 + 4 - bits).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = m << shift as usize;
        let root = scaled.sqrt();
        let sticky = &root * &root != scaled;
        round_parts(
            false,
            root,
            (self.exponent - shift) / 2,
            sticky,
            Some(p),
            None,
            mode,
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Dyadic::one();
        }
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.pow(k),
            exponent: self
                .exponent
                .checked_mul(k as i64)
                .expect("dyadic exponent overflow"),
        }
    }

    /// Exact value as a reduced fraction.
    pub fn to_ratio(&self) -> (BigInt, BigInt) {
        if self.exponent >= 0 {
            (
                self.mantissa.clone() << self.exponent as usize,
                BigInt::one(),
            )
        } else {
            (
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// Exact dyadic value of `num / den` if the reduced denominator is a power of two.
    pub fn from_exact_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (n, d) = if den.is_negative() { (-num, -den) } else { (num.clone(), den.clone()) };
        let tz = d.trailing_zeros().unwrap_or(0);
        let odd = d >> tz as usize;
        // Divisibility by the odd part avoids a gcd, which is quadratic in the size.
        let (q, rem) = n.div_rem(&odd);
        if !rem.is_zero() {
            return None;
        }
        let n = q;
        Some(Dyadic::new(n, -(tz as i64)))
    }

    /// Decimal rendering with exactly `digits` fractional digits, rounded to nearest.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        let (num, den) = self.to_ratio();
        let scaled = num * BigInt::from(10u32).pow(digits as u32);
        format_fixed(&round_div_nearest(&scaled, &den), digits)
    }
}

/// Integer division rounded to nearest, ties away from zero.
pub(crate) fn round_div_nearest(num: &BigInt, den: &BigInt) -> BigInt {
    let negative = num.is_negative() != den.is_negative();
    let (q, r) = num.magnitude().div_rem(den.magnitude());
    let q = if r * 2u32 >= *den.magnitude() { q + 1u32 } else { q };
    let q = BigInt::from(q);
    if negative {
        -q
    } else {
        q
    }
}

/// Renders `value * 10^-digits` as a fixed-point decimal string.
pub(crate) fn format_fixed(value: &BigInt, digits: usize) -> String {
    let negative = value.is_negative();
    let mut s = value.magnitude().to_str_radix(10);
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let split = s.len() - digits;
    let mut out = String::with_capacity(s.len() + 2);
    if negative {
        out.push('-');
    }
    out.push_str(&s[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&s[split..]);
    }
    out
}

fn divide_magnitudes(
    negative: bool,
    num: &BigUint,
    den: &BigUint,
    exp: i64,
    p: u64,
    mode: Rounding,
) -> (Dyadic, Dyadic) {
    let shift = (p as i64 + 2 + den.bits() as i64 - num.bits() as i64).max(0);
    let (q, r) = (num << shift as usize).div_rem(den);
    round_parts(
        negative,
        q,
        checked_exp(exp, -shift),
        !r.is_zero(),
        Some(p),
        None,
        mode,
    )
}

/// Rounds the value `±(mag + frac) * 2^exp` where `0 < frac < 1` iff `sticky`.
/// Either keeps `bits` significant bits or cuts at absolute position `2^floor_exp`.
fn round_parts(
    negative: bool,
    mag: BigUint,
    exp: i64,
    sticky: bool,
    bits: Option<u64>,
    floor_exp: Option<i64>,
    mode: Rounding,
) -> (Dyadic, Dyadic) {
    let len = mag.bits() as i64;
    let drop = match (bits, floor_exp) {
        (Some(p), _) => (len - p as i64).max(0),
        (None, Some(fe)) => (fe - exp).max(0),
        (None, None) => 0,
    };
    let away = |negative: bool| match mode {
        Rounding::Ceil => !negative,
        Rounding::Floor => negative,
        Rounding::Nearest => false,
    };
    if drop == 0 {
        if !sticky {
            return (signed(negative, mag, exp), Dyadic::zero());
        }
        // Only the sticky fraction is lost; nearest falls back to truncation.
        let kept = if away(negative) { mag + 1u32 } else { mag };
        return (signed(negative, kept, exp), Dyadic::pow2(exp));
    }
    let drop_u = drop as u64;
    let kept = &mag >> drop_u as usize;
    let half = mag.bit(drop_u - 1);
    let low_nonzero = sticky || (drop_u >= 2 && mag.trailing_zeros().unwrap_or(0) < drop_u - 1);
    let inexact = half || low_nonzero;
    let new_exp = checked_exp(exp, drop);
    if !inexact {
        return (signed(negative, kept, new_exp), Dyadic::zero());
    }
    let (kept, err) = match mode {
        Rounding::Nearest => {
            let k = if half { kept + 1u32 } else { kept };
            (k, Dyadic::pow2(new_exp - 1))
        }
        _ => {
            let k = if away(negative) { kept + 1u32 } else { kept };
            (k, Dyadic::pow2(new_exp))
        }
    };
    (signed(negative, kept, new_exp), err)
}

fn signed(negative: bool, mag: BigUint, exp: i64) -> Dyadic {
    let sign = if negative { Sign::Minus } else { Sign::Plus };
    Dyadic::new(BigInt::from_biguint(sign, mag), exp)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.mantissa.sign();
        let sb = other.mantissa.sign();
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let ma = self.magnitude().unwrap_or(0);
        let mb = other.magnitude().unwrap_or(0);
        let by_mag = if ma != mb {
            ma.cmp(&mb)
        } else {
            let e = self.exponent.min(other.exponent);
            let a = self.mantissa.magnitude() << (self.exponent - e) as usize;
            let b = other.mantissa.magnitude() << (other.exponent - e) as usize;
            a.cmp(&b)
        };
        if sa == Sign::Minus {
            by_mag.reverse()
        } else {
            by_mag
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_exact(a: &Dyadic, b: &Dyadic, negate_b: bool) -> Dyadic {
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if negate_b { -b } else { b.clone() };
    }
    let e = a.exponent.min(b.exponent);
    let ma = &a.mantissa << (a.exponent - e) as usize;
    let mb = &b.mantissa << (b.exponent - e) as usize;
    let m = if negate_b { ma - mb } else { ma + mb };
    Dyadic::new(m, e)
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        add_exact(self, rhs, false)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        add_exact(self, rhs, true)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // Product of odd mantissas is odd: already canonical.
        Dyadic {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: checked_exp(self.exponent, rhs.exponent),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: &Dyadic) -> Dyadic {
                (&self).$m(rhs)
            }
        }
        impl $tr<Dyadic> for &Dyadic {
            type Output = Dyadic;
            fn $m(self, rhs: Dyadic) -> Dyadic {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
}

impl From<BigInt> for Dyadic {
    fn from(v: BigInt) -> Self {
        Dyadic::from_int(v)
    }
}

/// `m*2^e` with a decimal mantissa.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

/// Parses `m*2^e` or an optionally signed decimal such as `-0.625`.
/// Decimals whose value is not dyadic are rejected.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((m, e)) = t.split_once('*') {
            let m: BigInt = m
                .trim()
                .parse()
                .map_err(|_| Error::parse(0, format!("bad mantissa in {t:?}")))?;
            let e = e
                .trim()
                .strip_prefix("2^")
                .ok_or_else(|| Error::parse(m.to_string().len(), "expected 2^ after *"))?;
            let e: i64 = e
                .trim()
                .parse()
                .map_err(|_| Error::parse(0, format!("bad exponent in {t:?}")))?;
            return Ok(Dyadic::new(m, e));
        }
        let (num, den) = parse_decimal(t)?;
        Dyadic::from_exact_ratio(&num, &den)
            .ok_or_else(|| Error::parse(0, format!("{t:?} is not a dyadic rational")))
    }
}

/// Parses `[-]digits[.digits]` into an exact fraction `num / 10^k`.
pub(crate) fn parse_decimal(t: &str) -> Result<(BigInt, BigInt)> {
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let valid = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !valid(int_part) || !valid(frac_part) {
        return Err(Error::parse(0, format!("{t:?} is not a number")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    if negative {
        num = -num;
    }
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok((num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn canonical_form() {
        assert_eq!(d(4, 0), d(1, 2));
        assert_eq!(d(0, 17).exponent(), 0);
        assert_eq!(d(12, -3).mantissa(), &BigInt::from(3));
        let x = d(40, -7);
        assert_eq!(Dyadic::new(x.mantissa().clone(), x.exponent()), x);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&d(1, -1) + &d(1, -1), d(1, 0));
        assert_eq!(&d(3, -2) * &d(5, -1), d(15, -3));
        let x = d(-12345, -9);
        assert_eq!(&x - &x, Dyadic::zero());
    }

    #[test]
    fn rounding_examples() {
        let (r, err) = d(5, -3).round(2);
        assert_eq!(r, d(3, -2));
        assert!(err >= d(1, -3));
        let (r, err) = d(1, 0).round(10);
        assert_eq!(r, Dyadic::one());
        assert!(err.is_zero());
        let (r, _) = d(-5, -3).round(2);
        assert_eq!(r, d(-3, -2));
    }

    #[test]
    fn directed_rounding() {
        let x = d(7, -3); // 0.875 = 111b
        assert_eq!(x.round_with(2, Rounding::Floor).0, d(3, -2));
        assert_eq!(x.round_with(2, Rounding::Ceil).0, d(1, 0));
        assert_eq!((-&x).round_with(2, Rounding::Floor).0, d(-1, 0));
        assert_eq!((-&x).round_with(2, Rounding::Ceil).0, d(-3, -2));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(d(1, -1).cmp(&d(3, -2)), Ordering::Less);
        assert_eq!(d(9, 4).cmp(&d(9, 4)), Ordering::Equal);
        assert_eq!(d(-1, 0).cmp(&Dyadic::zero()), Ordering::Less);
        assert!(d(-3, 0) < d(-1, 0));
        assert!(d(1, 10) > d(1023, 0));
    }

    #[test]
    fn division_and_sqrt() {
        let (q, err) = Dyadic::one().div(&d(3, 0), 20, Rounding::Nearest);
        let three_q = &q * &d(3, 0);
        assert!((&three_q - &Dyadic::one()).abs() <= &err * &d(3, 0));
        let (s, err) = d(2, 0).sqrt(40, Rounding::Floor);
        assert!(&s * &s <= d(2, 0));
        let up = &s + &err;
        assert!(&up * &up >= d(2, 0));
        assert_eq!(d(9, 4).sqrt(10, Rounding::Nearest).0, d(3, 2));
    }

    #[test]
    fn scaled_integers() {
        assert_eq!(d(5, -3).to_scaled_int(2, Rounding::Nearest), BigInt::from(3));
        assert_eq!(d(-5, -3).to_scaled_int(2, Rounding::Nearest), BigInt::from(-3));
        assert_eq!(d(5, -3).to_scaled_int(2, Rounding::Floor), BigInt::from(2));
        assert_eq!(d(3, 1).to_scaled_int(4, Rounding::Floor), BigInt::from(96));
    }

    #[test]
    fn text_round_trip() {
        for x in [d(15, -3), d(-7, 12), Dyadic::zero()] {
            let s = x.to_string();
            assert_eq!(s.parse::<Dyadic>().unwrap(), x);
        }
        assert_eq!("0.625".parse::<Dyadic>().unwrap(), d(5, -3));
        assert_eq!("-2.5".parse::<Dyadic>().unwrap(), d(-5, -1));
        assert_eq!("15*2^-3".parse::<Dyadic>().unwrap(), d(15, -3));
        assert!("0.1".parse::<Dyadic>().is_err());
        assert!("abc".parse::<Dyadic>().is_err());
    }

    #[test]
    fn float_conversion_is_exact() {
        assert_eq!(Dyadic::from_f64(0.375).unwrap(), d(3, -3));
        assert_eq!(Dyadic::from_f64(-6.0).unwrap(), d(-3, 1));
        assert_eq!(Dyadic::from_f64(f64::MIN_POSITIVE / 4.0).unwrap(), d(1, -1024));
        assert!(Dyadic::from_f64(f64::NAN).is_none());
        assert_eq!(d(3, -3).to_f64(), 0.375);
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(d(1, -1).to_decimal_string(3), "0.500");
        assert_eq!(d(-5, -3).to_decimal_string(2), "-0.63");
        assert_eq!(Dyadic::zero().to_decimal_string(3), "0.000");
        assert_eq!(d(3, 0).to_decimal_string(0), "3");
    }
}
