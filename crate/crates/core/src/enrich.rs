//! Operations that take discrete advice next to their real arguments.

use std::fmt;
use std::sync::Arc;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::real::{soft_less, EvalConfig, Real};
use crate::seq::{series_eval, RealSeq, SeriesData};

/// Symmetric matrix `[[a11, a12], [a12, a22]]`.
#[derive(Clone, Debug)]
pub struct SymMat2 {
    pub a11: Real,
    pub a12: Real,
    pub a22: Real,
}

impl SymMat2 {
    pub fn new(a11: Real, a12: Real, a22: Real) -> Self {
        SymMat2 { a11, a12, a22 }
    }

    pub fn trace(&self) -> Real {
        &self.a11 + &self.a22
    }

    /// `(a11 - a22)^2 + 4 a12^2`.
    pub fn discriminant(&self) -> Real {
        let d = &self.a11 - &self.a22;
        &d * &d + Real::from_i64(4) * (&self.a12 * &self.a12)
    }

    /// `M v - lambda v`.
    pub fn residual(&self, v: &(Real, Real), lambda: &Real) -> (Real, Real) {
        let r1 = &self.a11 * &v.0 + &self.a12 * &v.1 - lambda * &v.0;
        let r2 = &self.a12 * &v.0 + &self.a22 * &v.1 - lambda * &v.1;
        (r1, r2)
    }
}

/// An eigenvalue together with a unit eigenvector.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub lambda: Real,
    pub vector: (Real, Real),
}

/// A unit eigenvector of `m`, given the number of distinct eigenvalues.
///
/// With one eigenvalue the matrix is `lambda I` and `(1, 0)` is returned
/// without looking at the entries. With two, the eigenvalue is the larger one,
/// `(tr + sqrt(disc))/2`, and the vector is one of `u = (a12, lambda - a11)`,
/// `w = (lambda - a22, a12)`, normalized. Since `|u|^2 + |w|^2 = disc`, one of
/// them has `|.|^2 >= disc/2`; the choice is made by an approximate comparison,
/// so which one comes back may depend on how the entries were built.
pub fn eigenvector_2x2(m: &SymMat2, distinct_count: u8, cfg: &EvalConfig) -> Result<Eigenpair> {
    match distinct_count {
        1 => Ok(Eigenpair {
            lambda: m.a11.clone(),
            vector: (Real::one(), Real::zero()),
        }),
        2 => two_distinct(m, cfg),
        _ => Err(Error::Domain("a 2x2 matrix has one or two distinct eigenvalues".into())),
    }
}

fn two_distinct(m: &SymMat2, cfg: &EvalConfig) -> Result<Eigenpair> {
    let disc = m.discriminant();
    let lambda = (m.trace() + disc.sqrt()) * Real::constant(Dyadic::pow2(-1));
    let u = (m.a12.clone(), &lambda - &m.a11);
    let w = (&lambda - &m.a22, m.a12.clone());
    let nu = &u.0 * &u.0 + &u.1 * &u.1;
    let nw = &w.0 * &w.0 + &w.1 * &w.1;
    let mut n: u64 = 8;
    loop {
        let pick_w = soft_less(&nu, &nw, n, cfg)?;
        let (cand, norm2) = if pick_w { (&w, &nw) } else { (&u, &nu) };
        let lower = norm2.enclose(n, cfg)?.lower();
        let disc_hi = disc.enclose(n, cfg)?.upper();
        if lower.is_positive() && lower >= disc_hi.shl(-2) {
            // |cand| >= sqrt(lower) >= 2^-k
            let mag = lower.magnitude().expect("positive");
            let k = ((1 - mag).max(0) as u64).div_ceil(2);
            let inv = norm2.sqrt().recip_enriched(k);
            return Ok(Eigenpair {
                lambda,
                vector: (&cand.0 * &inv, &cand.1 * &inv),
            });
        }
        if n >= cfg.max_precision {
            return Err(Error::PromiseViolation(
                "eigenvalues could not be separated; are they really distinct?".into(),
            ));
        }
        n = (n * 2).min(cfg.max_precision);
    }
}

/// Polynomial `sum c_i s^i` in `s = n + k`, the declared bound on a discrete output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeclaredBound(pub Vec<u64>);

impl DeclaredBound {
    pub fn eval(&self, n: u64, k: u64) -> u64 {
        let s = n + k;
        self.0.iter().rev().fold(0u64, |acc, c| acc.saturating_mul(s).saturating_add(*c))
    }
}

impl fmt::Display for DeclaredBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|c| *c == 0) {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}(n+k)"),
                _ => format!("{c}(n+k)^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Result of running an operation under the enriched calling convention.
#[derive(Clone, Debug)]
pub struct Enriched {
    /// Discrete output.
    pub ell: u64,
    pub values: Vec<Real>,
}

/// Calling convention: a discrete parameter `k` comes in with the real
/// arguments, a discrete output `ell` goes out with the real results.
pub trait FullyPolytime: Send + Sync {
    fn name(&self) -> &str;
    fn declared_bound(&self) -> DeclaredBound;
    /// Runs the operation; `n` is the precision at which `ell` is measured.
    fn call(&self, k: u64, args: &[Real], n: u64) -> Result<Enriched>;
    /// Arguments used when auditing at parameter `k`.
    fn audit_args(&self, k: u64) -> Vec<Real>;
}

/// `1/x` under `x >= 2^-k`; no discrete output.
pub struct RecipEnrichedOp;

impl FullyPolytime for RecipEnrichedOp {
    fn name(&self) -> &str {
        "recip_enriched"
    }

    fn declared_bound(&self) -> DeclaredBound {
        DeclaredBound(vec![0])
    }

    fn call(&self, k: u64, args: &[Real], _n: u64) -> Result<Enriched> {
        let x = args.first().ok_or_else(|| Error::Domain("recip_enriched takes one argument".into()))?;
        Ok(Enriched {
            ell: 0,
            values: vec![x.recip_enriched(k)],
        })
    }

    fn audit_args(&self, k: u64) -> Vec<Real> {
        vec![Real::constant(Dyadic::pow2(-(k as i64)))]
    }
}

/// Series evaluation where `k` encodes the tail bound `A = 2^k`, `q = 2`;
/// the discrete output is the truncation degree.
pub struct SeriesEvalOp {
    pub radius: Dyadic,
}

impl SeriesEvalOp {
    fn data(&self, k: u64) -> Result<SeriesData> {
        let r = self.radius.clone();
        let a = Dyadic::pow2(k as i64);
        let coeffs = {
            let (a, r) = (a.clone(), r.clone());
            RealSeq::new(move |j| {
                // |c_j| r^j = A 2^-j exactly
                let rj = r.pow(j as u32);
                Real::constant(a.shl(-(j as i64))) / Real::constant(rj)
            })
        };
        SeriesData::new(coeffs, a, Dyadic::from_i64(2), r)
    }
}

impl FullyPolytime for SeriesEvalOp {
    fn name(&self) -> &str {
        "series_eval"
    }

    fn declared_bound(&self) -> DeclaredBound {
        DeclaredBound(vec![2, 1])
    }

    fn call(&self, k: u64, args: &[Real], n: u64) -> Result<Enriched> {
        let x = args.first().ok_or_else(|| Error::Domain("series_eval takes one argument".into()))?;
        let sd = Arc::new(self.data(k)?);
        let ell = sd.truncation_degree(n);
        Ok(Enriched {
            ell,
            values: vec![series_eval(&sd, x)],
        })
    }

    fn audit_args(&self, _k: u64) -> Vec<Real> {
        vec![Real::constant(self.radius.half())]
    }
}

/// Registered operations and their declared bounds.
pub struct Registry {
    ops: Vec<Box<dyn FullyPolytime>>,
}

/// One audited call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub op: String,
    pub k: u64,
    pub n: u64,
    pub measured: u64,
    pub bound: u64,
}

impl Registry {
    pub fn empty() -> Self {
        Registry { ops: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(RecipEnrichedOp));
        r.register(Box::new(SeriesEvalOp { radius: Dyadic::one() }));
        r
    }

    pub fn register(&mut self, op: Box<dyn FullyPolytime>) {
        self.ops.push(op);
    }

    pub fn ops(&self) -> impl Iterator<Item = &dyn FullyPolytime> {
        self.ops.iter().map(|b| b.as_ref())
    }

    /// Calls every op for each `k` in `ks`, checks `ell` against its bound and
    /// that the real results can be approximated at precision `n`.
    pub fn audit(&self, ks: impl IntoIterator<Item = u64> + Clone, n: u64, cfg: &EvalConfig) -> Result<Vec<AuditRow>> {
        let mut rows = Vec::new();
        for op in self.ops() {
            for k in ks.clone() {
                let out = op.call(k, &op.audit_args(k), n)?;
                let bound = op.declared_bound().eval(n, k);
                if out.ell > bound {
                    return Err(Error::AuditFailure {
                        op: op.name().to_string(),
                        k,
                        measured: out.ell,
                        bound,
                    });
                }
                for v in &out.values {
                    v.approx_with(n, cfg)?;
                }
                rows.push(AuditRow {
                    op: op.name().to_string(),
                    k,
                    n,
                    measured: out.ell,
                    bound,
                });
            }
        }
        Ok(rows)
    }
}
