//! Real sequences and power series with user-supplied tail data.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use parking_lot::Mutex;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::real::{Ball, EvalConfig, Real, StepError};

/// `<j, m> = j + (j + m)(j + m + 1)/2`.
///
/// # Panics
/// On overflow of `u64`.
pub fn cantor_pair(j: u64, m: u64) -> u64 {
    let s = j.checked_add(m).expect("pairing overflow");
    let tri = (s as u128 * (s as u128 + 1)) / 2;
    u64::try_from(tri + j as u128).expect("pairing overflow")
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(n: u64) -> (u64, u64) {
    // Largest s with s(s+1)/2 <= n.
    let n128 = n as u128;
    let mut s = ((8 * n128 + 1).isqrt() - 1) / 2;
    while s * (s + 1) / 2 > n128 {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= n128 {
        s += 1;
    }
    let j = n128 - s * (s + 1) / 2;
    let m = s - j;
    (j as u64, m as u64)
}

type SeqFn = dyn Fn(u64) -> Real + Send + Sync;

struct SeqInner {
    f: Box<SeqFn>,
    memo: Mutex<HashMap<u64, Real>>,
}

/// An indexed family `j -> x_j`. Each index is realized once and memoized,
/// so repeated access returns the same node.
#[derive(Clone)]
pub struct RealSeq(Arc<SeqInner>);

impl RealSeq {
    pub fn new(f: impl Fn(u64) -> Real + Send + Sync + 'static) -> Self {
        RealSeq(Arc::new(SeqInner {
            f: Box::new(f),
            memo: Mutex::new(HashMap::new()),
        }))
    }

    /// Finitely many terms, zero afterwards.
    pub fn finite(terms: Vec<Real>) -> Self {
        RealSeq::new(move |j| terms.get(j as usize).cloned().unwrap_or_else(Real::zero))
    }

    pub fn get(&self, j: u64) -> Real {
        if let Some(x) = self.0.memo.lock().get(&j) {
            return x.clone();
        }
        let x = (self.0.f)(j);
        self.0.memo.lock().entry(j).or_insert(x).clone()
    }

    /// `a_{j,m}` with `|x_j - a_{j,m} 2^-m| <= 2^-m`.
    pub fn approx(&self, j: u64, m: u64, cfg: &EvalConfig) -> Result<BigInt> {
        Ok(self.get(j).approx_with(m, cfg)?.value)
    }

    /// Element `n` of the single interleaved integer stream, `a_{unpair(n)}`.
    pub fn stream_at(&self, n: u64, cfg: &EvalConfig) -> Result<BigInt> {
        let (j, m) = cantor_unpair(n);
        self.approx(j, m, cfg)
    }

    /// The interleaved stream from index 0 on.
    pub fn stream<'a>(&'a self, cfg: &'a EvalConfig) -> impl Iterator<Item = Result<BigInt>> + 'a {
        (0u64..).map(move |n| self.stream_at(n, cfg))
    }
}

impl fmt::Debug for RealSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealSeq({} memoized)", self.0.memo.lock().len())
    }
}

/// Coefficients `c_j` with the promise `|c_j| r^j <= A q^-j`.
#[derive(Clone, Debug)]
pub struct SeriesData {
    coeffs: RealSeq,
    bound_a: Dyadic,
    bound_q: Dyadic,
    radius: Dyadic,
}

impl SeriesData {
    pub fn new(coeffs: RealSeq, bound_a: Dyadic, bound_q: Dyadic, radius: Dyadic) -> Result<Self> {
        if !bound_a.is_positive() {
            return Err(Error::Domain("series bound A must be positive".into()));
        }
        if bound_q <= Dyadic::one() {
            return Err(Error::Domain("series ratio q must exceed 1".into()));
        }
        if !radius.is_positive() {
            return Err(Error::Domain("series radius must be positive".into()));
        }
        Ok(SeriesData {
            coeffs,
            bound_a,
            bound_q,
            radius,
        })
    }

    pub fn coeffs(&self) -> &RealSeq {
        &self.coeffs
    }

    pub fn bound_a(&self) -> &Dyadic {
        &self.bound_a
    }

    pub fn bound_q(&self) -> &Dyadic {
        &self.bound_q
    }

    pub fn radius(&self) -> &Dyadic {
        &self.radius
    }

    /// Smallest `N` with `A q^-(N+1) / (1 - 1/q) <= 2^-(p+1)`,
    /// i.e. `A q 2^(p+1) <= (q - 1) q^(N+1)`.
    pub fn truncation_degree(&self, p: u64) -> u64 {
        let q = &self.bound_q;
        let lhs = (&self.bound_a * q).shl(p as i64 + 1);
        let qm1 = q - &Dyadic::one();
        let holds = |n: u64| -> bool {
            let e = u32::try_from(n + 1).expect("truncation degree too large");
            &qm1 * &q.pow(e) >= lhs
        };
        let lg = |d: &Dyadic| d.to_f64().log2();
        let est = ((lg(&self.bound_a) + lg(q) + (p + 1) as f64 - lg(&qm1)) / lg(q) - 1.0).ceil();
        let mut n = if est.is_finite() && est > 0.0 { est as u64 } else { 0 };
        while !holds(n) {
            n += 1;
        }
        while n > 0 && holds(n - 1) {
            n -= 1;
        }
        n
    }
}

/// `sum_j c_j x^j` as a lazy real. `|x| <= r` is a promise, checked softly:
/// an enclosure of `|x|` lying entirely above `r` raises a domain error.
pub fn series_eval(sd: &Arc<SeriesData>, x: &Real) -> Real {
    Real::series(sd.clone(), x.clone())
}

fn bit_length(v: u64) -> u64 {
    64 - v.leading_zeros() as u64
}

/// One evaluation of a series at the enclosure `x` with total radius target `2^-p`.
pub(crate) fn series_ball(
    sd: &SeriesData,
    x: &Ball,
    p: u64,
    cfg: &EvalConfig,
) -> std::result::Result<Ball, StepError> {
    if x.mag_lower() > sd.radius {
        return Err(StepError::Fatal(Error::Domain(format!(
            "series argument exceeds its radius {}",
            sd.radius
        ))));
    }
    let n = sd.truncation_degree(p);
    // Coefficient errors contribute sum_j eps |x|^j <= eps (N+1) X^N.
    let x_mag = x.mag_upper().magnitude().unwrap_or(0).max(0) as u64;
    let coeff_bits = p + 3 + bit_length(n + 1) + n * x_mag;
    // Partial Horner sums times |x|^j stay below about A q/(q-1).
    let qm1 = &sd.bound_q - &Dyadic::one();
    let size = sd.bound_a.magnitude().unwrap_or(0).max(0) as u64
        + (sd.bound_q.magnitude().unwrap_or(0) - qm1.magnitude().unwrap_or(0)).max(0) as u64;
    let wp = p + 8 + bit_length(n) + size;
    let coeff = |j: u64| -> std::result::Result<Ball, StepError> {
        Ok(sd.coeffs.get(j).enclose_abs(coeff_bits as i64, cfg)?)
    };
    let mut acc = coeff(n)?;
    for j in (0..n).rev() {
        acc = acc.mul(x, wp).add(&coeff(j)?, wp);
    }
    let tail = Dyadic::pow2(-(p as i64) - 1);
    Ok(Ball::new(acc.center().clone(), acc.radius() + &tail))
}
