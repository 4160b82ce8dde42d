//! Scalar abstraction for the shape-constrained numeric core.

use std::fmt;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
///
/// The step-function, isotonic and estimator modules only need ordered
/// floating-point arithmetic plus conversion from integer counts, so they
/// are written against this trait. The simulation and experiment layers are
/// `f64`-only.
pub trait Scalar:
    Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}
