//! Bit-cost measurements: wall time and working precision per `(op, n, k)`.
//!
//! Inputs are deterministic:
//! - `add`, `mul`: two rationals `a / (d 2^n)` in `(0, 1)` with an `n`-bit `a`
//!   and an odd 31-bit `d`, drawn from a generator seeded by `(n, k)`.
//! - `exp`: argument `2^k`.
//! - `hexp`: a leaf oracle for `2^(-2^j)` with `j = k`, or `j = ceil(log2 n)` when `k = 0`.
//! - `series`: geometric series with `A = 2^k`, `q = 2`, `r = 1` at `x = 1/2`.
//! - `max`, `integrate`: `t (1 - t)` on `[0, 1]` with modulus `mu(n) = n`.
//! - `ode`: `y' = (1 - y)/2` up to `t = 1`.
//!
//! For `max` and `integrate` the `work_prec` column holds the grid exponent,
//! for `ode` it holds `log2` of the step count.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{integrate, max_param, oracle_from_real_expr, Modulus};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::ode::IVProblem;
use crate::real::{Approximation, EvalConfig, Real};
use crate::seq::{series_eval, RealSeq, SeriesData};

pub const CSV_HEADER: &str = "op,n,k,time_ns,work_prec,restarts,status";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchOp {
    Add,
    Mul,
    Exp,
    Hexp,
    Series,
    Max,
    Integrate,
    Ode,
}

impl BenchOp {
    pub const ALL: [BenchOp; 8] = [
        BenchOp::Add,
        BenchOp::Mul,
        BenchOp::Exp,
        BenchOp::Hexp,
        BenchOp::Series,
        BenchOp::Max,
        BenchOp::Integrate,
        BenchOp::Ode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Add => "add",
            BenchOp::Mul => "mul",
            BenchOp::Exp => "exp",
            BenchOp::Hexp => "hexp",
            BenchOp::Series => "series",
            BenchOp::Max => "max",
            BenchOp::Integrate => "integrate",
            BenchOp::Ode => "ode",
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::parse(0, format!("unknown benchmark op {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

/// One row of benchmark output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub op: BenchOp,
    pub n: u64,
    pub k: u64,
    pub time_ns: u128,
    pub work_prec: u64,
    pub restarts: u32,
    pub status: Status,
}

impl BenchRecord {
    pub fn to_csv(&self) -> String {
        let status = match self.status {
            Status::Ok => "ok",
            Status::Failed => "failed",
        };
        format!(
            "{},{},{},{},{},{},{}",
            self.op, self.n, self.k, self.time_ns, self.work_prec, self.restarts, status
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 7 {
            return Err(Error::parse(0, format!("expected 7 fields, found {}", f.len())));
        }
        let num = |i: usize| -> Result<u128> {
            f[i].parse()
                .map_err(|_| Error::parse(0, format!("field {} is not a number: {:?}", i + 1, f[i])))
        };
        let status = match f[6] {
            "ok" => Status::Ok,
            "failed" => Status::Failed,
            other => return Err(Error::parse(0, format!("unknown status {other:?}"))),
        };
        Ok(BenchRecord {
            op: f[0].parse()?,
            n: num(1)? as u64,
            k: num(2)? as u64,
            time_ns: num(3)?,
            work_prec: num(4)? as u64,
            restarts: num(5)? as u32,
            status,
        })
    }
}

/// `a:b:s` (additive steps) or `a:b:*s` (multiplicative steps), inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub start: u64,
    pub end: u64,
    pub step: u64,
    pub multiplicative: bool,
}

impl NRange {
    pub fn values(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut n = self.start;
        while n <= self.end {
            out.push(n);
            let next = if self.multiplicative { n.saturating_mul(self.step) } else { n.saturating_add(self.step) };
            if next == n {
                break;
            }
            n = next;
        }
        out
    }
}

impl FromStr for NRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = |msg: &str| Error::parse(0, format!("bad range {s:?}: {msg}"));
        let (a, b, step) = match parts.as_slice() {
            [a, b, c] => (*a, *b, *c),
            [a, b] => (*a, *b, "1"),
            [a] => (*a, *a, "1"),
            _ => return Err(bad("expected a:b:s")),
        };
        let (step, multiplicative) = match step.strip_prefix('*') {
            Some(m) => (m, true),
            None => (step, false),
        };
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| bad("not a number"));
        let r = NRange {
            start: parse(a)?,
            end: parse(b)?,
            step: parse(step)?,
            multiplicative,
        };
        if r.start > r.end {
            return Err(bad("start exceeds end"));
        }
        if (multiplicative && r.step < 2) || r.step == 0 || (multiplicative && r.start == 0) {
            return Err(bad("step does not advance"));
        }
        Ok(r)
    }
}

fn random_rational(rng: &mut ChaCha8Rng, bits: u64) -> (BigInt, BigInt) {
    let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
    rng.fill(bytes.as_mut_slice());
    let mut num = BigUint::from_bytes_le(&bytes) >> (bytes.len() as u64 * 8 - bits) as usize;
    num.set_bit(bits - 1, true);
    let den: u32 = rng.gen_range(1u32 << 30..1u32 << 31) | 1;
    (BigInt::from(num), BigInt::from(den) << bits as usize)
}

fn seeded(op: BenchOp, n: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(n.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ k ^ ((op as u64) << 56))
}

/// Leaf oracle for `2^-e`, answering at absolute precision only.
pub fn tiny_oracle(e: u64) -> Real {
    Real::from_oracle(move |p| {
        if p >= e {
            BigInt::from(1) << (p - e) as usize
        } else {
            BigInt::from(0)
        }
    })
}

/// The exponent `j` used for `hexp` at precision `n` and parameter `k`.
pub fn hexp_exponent(n: u64, k: u64) -> u64 {
    if k > 0 {
        k
    } else {
        64 - n.max(1).saturating_sub(1).leading_zeros() as u64
    }
}

fn parabola() -> Result<crate::calculus::FunctionOracle> {
    oracle_from_real_expr(
        |t| &t * &(Real::one() - &t),
        Modulus::new(|n| n),
        Dyadic::zero(),
        Dyadic::one(),
        EvalConfig::default(),
    )
}

fn geometric(k: u64) -> Result<Arc<SeriesData>> {
    let a = Dyadic::pow2(k as i64);
    let coeff = a.clone();
    let s = RealSeq::new(move |j| Real::constant(coeff.shl(-(j as i64))));
    Ok(Arc::new(SeriesData::new(s, a, Dyadic::from_i64(2), Dyadic::one())?))
}

/// Work done by one timed call: `(work_prec, restarts)`.
type Work = Result<(u64, u32)>;

fn prepare(op: BenchOp, n: u64, k: u64, cfg: &EvalConfig) -> Result<Box<dyn Fn() -> Work>> {
    let cfg = cfg.clone();
    let from_approx = |a: Approximation| (a.work_prec, a.restarts);
    Ok(match op {
        BenchOp::Add | BenchOp::Mul => {
            let mut rng = seeded(op, n, k);
            let (x, y) = (random_rational(&mut rng, n.max(1)), random_rational(&mut rng, n.max(1)));
            // Fresh nodes for every call so that no cached enclosure is reused.
            Box::new(move || {
                let x = Real::rational(x.0.clone(), x.1.clone());
                let y = Real::rational(y.0.clone(), y.1.clone());
                let z = if op == BenchOp::Add { x + y } else { x * y };
                z.approx_with(n, &cfg).map(from_approx)
            })
        }
        BenchOp::Exp => Box::new(move || {
            let x = Real::constant(Dyadic::pow2(k as i64)).exp();
            x.approx_with(n, &cfg).map(from_approx)
        }),
        BenchOp::Hexp => {
            let j = hexp_exponent(n, k);
            let e = 1u64.checked_shl(j as u32).ok_or_else(|| Error::Domain("hexp exponent too large".into()))?;
            Box::new(move || tiny_oracle(e).hexp().approx_with(n, &cfg).map(from_approx))
        }
        BenchOp::Series => Box::new(move || {
            let sd = geometric(k)?;
            series_eval(&sd, &Real::constant(Dyadic::pow2(-1))).approx_with(n, &cfg).map(from_approx)
        }),
        BenchOp::Max => {
            let f = parabola()?;
            Box::new(move || {
                max_param(&f, &Dyadic::one(), n)?;
                Ok((f.modulus().at(n + 2), 0))
            })
        }
        BenchOp::Integrate => {
            let f = parabola()?;
            Box::new(move || {
                integrate(&f, &Dyadic::one(), n)?;
                Ok((f.modulus().at(n + 3), 0))
            })
        }
        BenchOp::Ode => {
            let p = IVProblem::new(1, Modulus::lipschitz(0), |_, y, _| Ok((&Dyadic::one() - y).half()));
            Box::new(move || {
                let plan = p.plan(&Dyadic::one(), n)?;
                p.solve(&Dyadic::one(), n)?;
                Ok((plan.steps.trailing_zeros() as u64, 0))
            })
        }
    })
}

/// Runs `op` at `(n, k)` `reps` times and keeps the fastest run.
/// Errors are reported through the `status` column.
pub fn run(op: BenchOp, n: u64, k: u64, reps: u32, cfg: &EvalConfig) -> BenchRecord {
    let mut rec = BenchRecord {
        op,
        n,
        k,
        time_ns: 0,
        work_prec: 0,
        restarts: 0,
        status: Status::Failed,
    };
    let f = match prepare(op, n, k, cfg) {
        Ok(f) => f,
        Err(_) => return rec,
    };
    let mut best: Option<u128> = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = f();
        let t = start.elapsed().as_nanos();
        match out {
            Ok((wp, restarts)) => {
                rec.work_prec = wp;
                rec.restarts = restarts;
                rec.status = Status::Ok;
                best = Some(best.map_or(t, |b| b.min(t)));
            }
            Err(_) => {
                rec.status = Status::Failed;
                rec.time_ns = t;
                return rec;
            }
        }
    }
    rec.time_ns = best.unwrap_or(0);
    rec
}

/// One record per `n`, sorted by `n`.
pub fn sweep(op: BenchOp, range: &NRange, k: u64, reps: u32, cfg: &EvalConfig) -> Vec<BenchRecord> {
    let mut rows: Vec<BenchRecord> = range.values().into_iter().map(|n| run(op, n, k, reps, cfg)).collect();
    rows.sort_by_key(|r| (r.op, r.n, r.k));
    rows
}

/// Least-squares slope of `log time` against `log n` over successful rows.
pub fn loglog_slope(rows: &[BenchRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.status == Status::Ok && r.n > 0 && r.time_ns > 0)
        .map(|r| ((r.n as f64).ln(), (r.time_ns as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let r: NRange = "1024:65536:*2".parse().unwrap();
        assert_eq!(r.values().len(), 7);
        let r: NRange = "0:10:5".parse().unwrap();
        assert_eq!(r.values(), vec![0, 5, 10]);
        assert!("5:1:1".parse::<NRange>().is_err());
        assert!("1:5:*1".parse::<NRange>().is_err());
        assert!("1:5:0".parse::<NRange>().is_err());
        assert_eq!("7".parse::<NRange>().unwrap().values(), vec![7]);
    }

    #[test]
    fn csv_round_trip() {
        let rec = run(BenchOp::Add, 64, 0, 1, &EvalConfig::default());
        assert_eq!(rec.status, Status::Ok);
        let line = rec.to_csv();
        assert_eq!(BenchRecord::from_csv(&line).unwrap(), rec);
        assert_eq!(CSV_HEADER.split(',').count(), 7);
        assert!(BenchRecord::from_csv("add,1,2").is_err());
    }

    #[test]
    fn every_op_runs() {
        let cfg = EvalConfig::default();
        for op in BenchOp::ALL {
            let n = match op {
                BenchOp::Max | BenchOp::Integrate | BenchOp::Ode => 6,
                _ => 32,
            };
            let rec = run(op, n, 1, 1, &cfg);
            assert_eq!(rec.status, Status::Ok, "{op}");
        }
    }

    #[test]
    fn failures_are_rows() {
        let cfg = EvalConfig::default().with_max_precision(128);
        let rec = run(BenchOp::Exp, 32, 10, 1, &cfg);
        assert_eq!(rec.status, Status::Failed);
    }

    #[test]
    fn slope_fit() {
        let mk = |n: u64, t: u128| BenchRecord {
            op: BenchOp::Add,
            n,
            k: 0,
            time_ns: t,
            work_prec: 0,
            restarts: 0,
            status: Status::Ok,
        };
        let rows = vec![mk(10, 100), mk(100, 1000), mk(1000, 10000)];
        assert!((loglog_slope(&rows).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(hexp_exponent(16, 0), 4);
        assert_eq!(hexp_exponent(17, 0), 5);
        assert_eq!(hexp_exponent(17, 3), 3);
    }
}
