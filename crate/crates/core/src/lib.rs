//! Exact real arithmetic in the bit-cost model.
//!
//! Every [`Real`] can be asked for an integer `a_n` with `|x - a_n 2^-n| <= 2^-n`.
//! On top of that sit sequences and power series, maximization and integration
//! of continuous functions, a validated ODE solver and a few operations that
//! take discrete advice alongside their real arguments.

pub mod bench;
pub mod calculus;
pub mod dyadic;
pub mod enrich;
pub mod error;
pub mod expr;
pub mod logistic;
pub mod ode;
pub mod real;
pub mod seq;

pub use dyadic::{Dyadic, Rounding};
pub use error::{Error, Result};
pub use real::{soft_less, Approximation, Ball, EvalConfig, Real};
pub use seq::{cantor_pair, cantor_unpair, series_eval, RealSeq, SeriesData};
