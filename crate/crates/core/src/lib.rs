//! Localized monotone least-squares regression for time series whose
//! regressor is a recurrent Markov chain.
//!
//! The centerpiece is the monotone (non-increasing) least-squares fit of the
//! pairs `(X_t, Z_t)` restricted to a window `C = [x0 - delta, x0 + delta]`:
//! observations whose `X_t` falls in the window are pooled, and the fit is
//! the left-hand slope sequence of the least concave majorant of their
//! cumulative sum diagram. Around that core the crate provides
//!
//! * [`stepfn`] — monotone step functions, their left-/right-continuous
//!   evaluation conventions and generalized inverses,
//! * [`isotonic`] — cumulative sum diagrams, concave majorant slopes, the
//!   pool-adjacent-violators solver and the normalized cumulative process,
//! * [`chains`] — simulable Markov models (random walk, AR(1), lazy simple
//!   random walk) with regeneration machinery and occupation-time
//!   diagnostics,
//! * [`estimator`] — the end-to-end localized fit, point evaluation and
//!   generalized-inverse estimation,
//! * [`experiments`] — a deterministic Monte Carlo harness that measures
//!   consistency, convergence rates and empirical-process behavior, and
//!   emits machine-readable reports.
//!
//! The numeric core (`stepfn`, `isotonic`, `estimator`) is generic over the
//! scalar type through [`Scalar`]; the simulation and experiment layers work
//! in `f64`. Concrete `f64` aliases for the core types are exported at the
//! crate root.

pub mod chains;
pub mod estimator;
pub mod experiments;
pub mod isotonic;
pub mod rng;
pub mod scalar;
pub mod stepfn;
pub mod window;

pub use scalar::Scalar;
pub use window::Window;

/// Double-precision monotone step function.
pub type MonotoneStepFn64 = stepfn::MonotoneStepFn<f64>;
/// Double-precision right-continuous non-decreasing step function.
pub type EcdfStepFn64 = stepfn::EcdfStepFn<f64>;
/// Double-precision cumulative sum diagram.
pub type CsDiagram64 = isotonic::CsDiagram<f64>;
/// Double-precision piecewise-linear function.
pub type PiecewiseLinearFn64 = isotonic::PiecewiseLinearFn<f64>;
/// Double-precision paired sample.
pub type TimeSeriesSample64 = estimator::TimeSeriesSample<f64>;
/// Double-precision localized fit.
pub type LocalizedFit64 = estimator::LocalizedFit<f64>;
/// Double-precision window.
pub type Window64 = window::Window<f64>;
