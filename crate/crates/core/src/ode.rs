//! Validated explicit Euler for `y' = f(t, y)`, `y(0) = 0`, on `[0, 1]`.
//!
//! The right-hand side is an oracle on `[0, 1] x [-1, 1]` with values in
//! `[-1, 1]`, a modulus of continuity in `t` and a Lipschitz constant `L` in `y`.
//!
//! Error bound: with `|y'| <= 1` the local defect of one step of size `h` is at
//! most `h (w_t(h) + L h / 2)`, where `w_t` bounds the variation of `f` in `t`;
//! adding the oracle error `2^-q` per evaluation, the global error obeys
//! `E_{i+1} <= (1 + hL) E_i + tau` and so stays below
//! `(w_t(h) + L h/2 + 2^-q) (e^{Lt} - 1)/L`.

use std::sync::Arc;

use num_bigint::BigUint;

use crate::calculus::{ceil_log2_dyadic, Modulus};
use crate::dyadic::{Dyadic, Rounding};
use crate::error::{Error, Result};
use crate::real::elementary::exp_point;
use crate::real::{Ball, RADIUS_BITS};

/// Default cap on the number of Euler steps.
pub const DEFAULT_MAX_STEPS: u64 = 1 << 26;

type RhsFn = dyn Fn(&Dyadic, &Dyadic, u64) -> Result<Dyadic> + Send + Sync;

/// `y' = f(t, y)`, `y(0) = 0`.
#[derive(Clone)]
pub struct IVProblem {
    rhs: Arc<RhsFn>,
    t_modulus: Modulus,
    lipschitz: u64,
    max_steps: u64,
}

/// Rigorous enclosure of the solution at one Euler node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub t: Dyadic,
    pub value: Ball,
}

/// Discretization chosen for a target precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepPlan {
    pub steps: u64,
    /// Precision of every right-hand side evaluation.
    pub oracle_prec: u64,
    /// Per-step error increment.
    pub tau: Dyadic,
}

impl IVProblem {
    /// `rhs(t, y, n)` must be within `2^-n` of `f(t, y)`.
    pub fn new(
        lipschitz: u64,
        t_modulus: Modulus,
        rhs: impl Fn(&Dyadic, &Dyadic, u64) -> Result<Dyadic> + Send + Sync + 'static,
    ) -> Self {
        IVProblem {
            rhs: Arc::new(rhs),
            t_modulus,
            lipschitz: lipschitz.max(1),
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_max_steps(mut self, cap: u64) -> Self {
        self.max_steps = cap;
        self
    }

    pub fn lipschitz(&self) -> u64 {
        self.lipschitz
    }

    fn eval(&self, t: &Dyadic, y: &Dyadic, q: u64) -> Result<Dyadic> {
        // The exact solution stays in [-1, 1], so clamping only moves y closer to it.
        let one = Dyadic::one();
        let y = y.clone().min(one.clone()).max(-one);
        // Snapping to a fixed grid keeps the iterates from growing in size.
        let v = (self.rhs)(t, &y, q + 1)?;
        Ok(v.round_abs(q as i64 + 1, Rounding::Nearest).0)
    }

    /// Upper bound for `w_t(h)`.
    fn t_variation(&self, h: &Dyadic) -> Dyadic {
        if let Some(lt) = self.t_modulus.lipschitz_constant() {
            return h * &Dyadic::from_i64(lt as i64);
        }
        // Largest k with 2^-mu(k) >= h, i.e. mu(k) <= -log2 h.
        let s = (-ceil_log2_dyadic(h)).max(0) as u64;
        if self.t_modulus.at(0) > s {
            return Dyadic::from_i64(2);
        }
        let mut k = 0;
        while k < 4096 && self.t_modulus.at(k + 1) <= s {
            k += 1;
        }
        Dyadic::pow2(-(k as i64))
    }

    /// Number of steps and oracle precision so that the global error at `t` is at most `2^-(n+1)`.
    pub fn plan(&self, t: &Dyadic, n: u64) -> Result<StepPlan> {
        check_time(t)?;
        let l = Dyadic::from_i64(self.lipschitz as i64);
        let c = growth_constant(self.lipschitz, t);
        let c_bits = if c.is_positive() { ceil_log2_dyadic(&c).max(0) as u64 } else { 0 };
        let oracle_prec = n + 3 + c_bits;
        let target = Dyadic::pow2(-(n as i64) - 2);
        let mut steps: u64 = 1;
        let mut exp = 0u32;
        loop {
            let h = step_size(t, exp);
            let defect = &self.t_variation(&h) + &(&l * &h).half();
            if (&defect * &c).round_up(RADIUS_BITS) <= target || t.is_zero() {
                let tau = &h * &(&defect + &Dyadic::pow2(-(oracle_prec as i64)));
                return Ok(StepPlan {
                    steps,
                    oracle_prec,
                    tau: tau.round_up(RADIUS_BITS),
                });
            }
            if steps >= self.max_steps {
                return Err(Error::StepExplosion {
                    required: self.required_steps(t, exp, &c, &target),
                    cap: self.max_steps,
                });
            }
            steps *= 2;
            exp += 1;
        }
    }

    /// Continues the doubling symbolically once the cap is hit.
    fn required_steps(&self, t: &Dyadic, mut exp: u32, c: &Dyadic, target: &Dyadic) -> BigUint {
        let l = Dyadic::from_i64(self.lipschitz as i64);
        while exp < 4096 {
            exp += 1;
            let h = step_size(t, exp);
            let defect = &self.t_variation(&h) + &(&l * &h).half();
            if (&defect * c).round_up(RADIUS_BITS) <= *target {
                break;
            }
        }
        BigUint::from(1u32) << exp as usize
    }

    /// `y(t)` within `2^-n`.
    pub fn solve(&self, t: &Dyadic, n: u64) -> Result<Dyadic> {
        let mut last = None;
        self.run(t, n, |e| {
            last = Some(e);
            Ok(())
        })?;
        let last = last.expect("at least the initial node");
        Ok(last.value.center().round_abs(n as i64 + 1, Rounding::Nearest).0)
    }

    /// Enclosures at all Euler nodes on `[0, 1]`, for target precision `n`.
    pub fn trace(&self, n: u64) -> Result<Vec<Enclosure>> {
        let mut out = Vec::new();
        self.run(&Dyadic::one(), n, |e| {
            out.push(e);
            Ok(())
        })?;
        Ok(out)
    }

    /// Like [`IVProblem::trace`] but hands each enclosure to `sink` instead of storing it.
    pub fn trace_streaming(&self, n: u64, sink: impl FnMut(Enclosure) -> Result<()>) -> Result<StepPlan> {
        self.run(&Dyadic::one(), n, sink)
    }

    fn run(&self, t_end: &Dyadic, n: u64, mut sink: impl FnMut(Enclosure) -> Result<()>) -> Result<StepPlan> {
        let plan = self.plan(t_end, n)?;
        let h = step_size(t_end, plan.steps.trailing_zeros());
        let growth = &Dyadic::one() + &(&h * &Dyadic::from_i64(self.lipschitz as i64));
        let mut t = Dyadic::zero();
        let mut y = Dyadic::zero();
        let mut err = Dyadic::zero();
        sink(Enclosure {
            t: t.clone(),
            value: Ball::exact(y.clone()),
        })?;
        for _ in 0..plan.steps {
            let slope = self.eval(&t, &y, plan.oracle_prec)?;
            y = &y + &(&h * &slope);
            t = &t + &h;
            err = (&(&growth * &err) + &plan.tau).round_up(RADIUS_BITS);
            if &y.abs() - &err > Dyadic::one() {
                return Err(Error::PromiseViolation(format!(
                    "solution enclosure left [-1, 1] at t = {}",
                    t.to_f64()
                )));
            }
            sink(Enclosure {
                t: t.clone(),
                value: Ball::new(y.clone(), err.clone()),
            })?;
        }
        Ok(plan)
    }

    /// Plain Euler with `steps` steps and oracle precision `q`, no error control.
    pub fn euler_fixed(&self, t: &Dyadic, steps: u64, q: u64) -> Result<Dyadic> {
        check_time(t)?;
        assert!(steps.is_power_of_two(), "step count must be a power of two");
        let h = step_size(t, steps.trailing_zeros());
        let mut s = Dyadic::zero();
        let mut y = Dyadic::zero();
        for _ in 0..steps {
            let slope = self.eval(&s, &y, q)?;
            y = &y + &(&h * &slope);
            s = &s + &h;
        }
        Ok(y)
    }
}

fn check_time(t: &Dyadic) -> Result<()> {
    if t.is_negative() || *t > Dyadic::one() {
        return Err(Error::Domain(format!("time {t} is outside [0, 1]")));
    }
    Ok(())
}

fn step_size(t: &Dyadic, exp: u32) -> Dyadic {
    t.shl(-(exp as i64))
}

/// Upper bound for `(e^{Lt} - 1)/L`.
fn growth_constant(l: u64, t: &Dyadic) -> Dyadic {
    if t.is_zero() {
        return Dyadic::zero();
    }
    let lt = &Dyadic::from_i64(l as i64) * t;
    let e = exp_point(&lt, 40).upper();
    let num = (&e - &Dyadic::one()).round_up(RADIUS_BITS);
    num.div(&Dyadic::from_i64(l as i64), RADIUS_BITS, Rounding::Ceil).0
}

impl std::fmt::Debug for IVProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "IVProblem(L = {}, {:?})", self.lipschitz, self.t_modulus)
    }
}
