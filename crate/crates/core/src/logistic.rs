//! The logistic map `x <- r x (1 - x)` in exact, rational and floating-point arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::{EvalConfig, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Rational,
    F64,
    F32,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "rational" => Ok(Mode::Rational),
            "f64" => Ok(Mode::F64),
            "f32" => Ok(Mode::F32),
            _ => Err(Error::parse(0, format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Exact => "exact",
            Mode::Rational => "rational",
            Mode::F64 => "f64",
            Mode::F32 => "f32",
        };
        write!(f, "{s}")
    }
}

/// Limits for the rational mode, whose numbers double in size every step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalLimits {
    pub max_steps: u64,
    /// Refuse to continue once a denominator would exceed this many bits.
    pub max_bits: u64,
}

impl Default for RationalLimits {
    fn default() -> Self {
        RationalLimits {
            max_steps: 64,
            max_bits: 1 << 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Logistic {
    r: BigRational,
    x0: BigRational,
}

impl Logistic {
    /// Needs `1 < r < 4` and `0 <= x0 <= 1`.
    pub fn new(r: BigRational, x0: BigRational) -> Result<Self> {
        let one = BigRational::one();
        if r <= one || r >= BigRational::from_integer(BigInt::from(4)) {
            return Err(Error::Domain("the parameter r must satisfy 1 < r < 4".into()));
        }
        if x0 < BigRational::zero() || x0 > one {
            return Err(Error::Domain("the start value must lie in [0, 1]".into()));
        }
        Ok(Logistic { r, x0 })
    }

    /// `r = 15/4`, `x0 = 1/2`.
    pub fn standard() -> Self {
        Logistic::new(
            BigRational::new(15.into(), 4.into()),
            BigRational::new(1.into(), 2.into()),
        )
        .expect("valid parameters")
    }

    fn const_real(q: &BigRational) -> Real {
        Real::rational(q.numer().clone(), q.denom().clone())
    }

    /// `x_m` as a lazy real.
    pub fn exact(&self, m: u64) -> Real {
        let r = Self::const_real(&self.r);
        let one = Real::one();
        let mut x = Self::const_real(&self.x0);
        for _ in 0..m {
            x = &r * &x * (&one - &x);
        }
        x
    }

    /// `x_m` as an exact fraction.
    pub fn rational(&self, m: u64, limits: RationalLimits) -> Result<BigRational> {
        if m > limits.max_steps {
            return Err(Error::Domain(format!(
                "rational mode is limited to {} steps",
                limits.max_steps
            )));
        }
        let one = BigRational::one();
        let mut x = self.x0.clone();
        for i in 0..m {
            let next_bits = 2 * x.denom().bits() + self.r.denom().bits();
            if next_bits > limits.max_bits {
                return Err(Error::Domain(format!(
                    "rational iterate {} would need about {next_bits} bits, limit is {}",
                    i + 1,
                    limits.max_bits
                )));
            }
            x = &self.r * &x * (&one - &x);
        }
        Ok(x)
    }

    pub fn f64(&self, m: u64) -> f64 {
        let r = self.r.to_f64().expect("finite");
        let mut x = self.x0.to_f64().expect("finite");
        for _ in 0..m {
            x = r * x * (1.0 - x);
        }
        x
    }

    pub fn f32(&self, m: u64) -> f32 {
        let r = self.r.to_f32().expect("finite");
        let mut x = self.x0.to_f32().expect("finite");
        for _ in 0..m {
            x = r * x * (1.0 - x);
        }
        x
    }

    /// `x_m` printed with `digits` decimals in the given mode.
    pub fn run(&self, mode: Mode, m: u64, digits: usize, cfg: &EvalConfig, limits: RationalLimits) -> Result<String> {
        match mode {
            Mode::Exact => self.exact(m).to_decimal(digits, cfg),
            Mode::Rational => {
                let q = self.rational(m, limits)?;
                let scaled = q.numer() * BigInt::from(10u32).pow(digits as u32);
                let v = crate::dyadic::round_div_nearest(&scaled, q.denom());
                Ok(crate::dyadic::format_fixed(&v, digits))
            }
            Mode::F64 => Ok(format!("{:.*}", digits, self.f64(m))),
            Mode::F32 => Ok(format!("{:.*}", digits, self.f32(m))),
        }
    }
}
