//! Monotone step functions and their generalized inverses.
//!
//! Two flavors cover everything the estimator needs:
//!
//! * [`MonotoneStepFn`] — non-increasing and left-continuous; the fit itself.
//!   It is constant on `(Y_{k-1}, Y_k]`, on `(-inf, Y_1]` and on
//!   `[Y_m, +inf)`.
//! * [`EcdfStepFn`] — non-decreasing and right-continuous; the localized
//!   empirical distribution function.
//!
//! Their generalized inverses satisfy exact switch relations: for the
//! decreasing flavor, `f(y) >= a` iff `inverse(a) >= y` on `(floor, Y_m]`;
//! for the increasing flavor, `F(y) >= a` iff `inverse(a) <= y` on
//! `[floor, Y_m]`. The `floor` plays the role of a sentinel point strictly
//! below the first knot: it is what an inverse returns when the level set is
//! empty, and callers can tell sentinel returns apart through
//! [`InverseStatus`].

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum StepFnError {
    #[error("knots and values have different lengths ({knots} vs {values})")]
    LengthMismatch { knots: usize, values: usize },
    #[error("a step function needs at least one knot")]
    Empty,
    #[error("knots are not strictly increasing")]
    KnotsNotIncreasing,
    #[error("values are not non-increasing")]
    NotNonIncreasing,
    #[error("heights are not non-decreasing")]
    NotNonDecreasing,
    #[error("non-finite entry in step function data")]
    NonFinite,
    #[error("floor must lie strictly below the first knot")]
    FloorAboveFirstKnot,
    #[error("level {level} is above the maximum height {max}")]
    AboveRange { level: f64, max: f64 },
}

fn check_finite<F: Scalar>(xs: &[F]) -> Result<(), StepFnError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StepFnError::NonFinite)
    }
}

fn strictly_increasing<F: Scalar>(xs: &[F]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

/// Where a generalized-inverse query landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InverseStatus {
    /// The level set is nonempty and the query resolves to a knot.
    Interior,
    /// The level set is empty; the sentinel floor is returned.
    ClippedLow,
    /// The level is at or below the smallest value; the last knot is returned.
    ClippedHigh,
}

impl std::fmt::Display for InverseStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Interior => "interior",
            Self::ClippedLow => "clipped-low",
            Self::ClippedHigh => "clipped-high",
        })
    }
}

/// A generalized-inverse value together with its clipping status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseResult<F> {
    pub value: F,
    pub status: InverseStatus,
}

/// Left-continuous non-increasing step function.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneStepFn<F> {
    knots: Vec<F>,
    values: Vec<F>,
}

impl<F: Scalar> MonotoneStepFn<F> {
    /// Validate and build a step function from knots `Y_1 < ... < Y_m` and
    /// the values taken on the pieces ending at each knot.
    pub fn new(knots: Vec<F>, values: Vec<F>) -> Result<Self, StepFnError> {
        if knots.len() != values.len() {
            return Err(StepFnError::LengthMismatch {
                knots: knots.len(),
                values: values.len(),
            });
        }
        if knots.is_empty() {
            return Err(StepFnError::Empty);
        }
        check_finite(&knots)?;
        check_finite(&values)?;
        if !strictly_increasing(&knots) {
            return Err(StepFnError::KnotsNotIncreasing);
        }
        if !values.windows(2).all(|w| w[0] >= w[1]) {
            return Err(StepFnError::NotNonIncreasing);
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[F] {
        &self.knots
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn min_knot(&self) -> F {
        self.knots[0]
    }

    pub fn max_knot(&self) -> F {
        *self.knots.last().unwrap()
    }

    pub fn max_value(&self) -> F {
        self.values[0]
    }

    pub fn min_value(&self) -> F {
        *self.values.last().unwrap()
    }

    /// A floor strictly below the first knot, usable as the inverse sentinel.
    pub fn default_floor(&self) -> F {
        self.min_knot() - F::one()
    }

    /// Left-continuous evaluation with constant extension outside the knot
    /// range: the value at a knot is the value of the piece ending there.
    pub fn eval(&self, y: F) -> F {
        let idx = self.knots.partition_point(|&t| t < y);
        self.values[idx.min(self.values.len() - 1)]
    }

    /// Greatest `y` in `[floor, Y_m]` with `eval(y) >= a`.
    ///
    /// Returns the sentinel `floor` with [`InverseStatus::ClippedLow`] when
    /// the level set is empty, and `Y_m` with [`InverseStatus::ClippedHigh`]
    /// when `a` is at or below the smallest value. `floor` must lie strictly
    /// below the first knot.
    pub fn gen_inverse(&self, a: F, floor: F) -> InverseResult<F> {
        debug_assert!(floor < self.min_knot());
        // Values are non-increasing, so the prefix with value >= a is the
        // level set; its length locates the greatest qualifying knot.
        let count = self.values.partition_point(|&v| v >= a);
        if count == 0 {
            InverseResult {
                value: floor,
                status: InverseStatus::ClippedLow,
            }
        } else if count == self.values.len() {
            InverseResult {
                value: self.max_knot(),
                status: InverseStatus::ClippedHigh,
            }
        } else {
            InverseResult {
                value: self.knots[count - 1],
                status: InverseStatus::Interior,
            }
        }
    }
}

/// Right-continuous non-decreasing step function with an explicit floor
/// sentinel, shaped like an empirical distribution function: zero below the
/// first knot, `heights[k]` on `[Y_{k+1}, Y_{k+2})`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfStepFn<F> {
    floor: F,
    knots: Vec<F>,
    heights: Vec<F>,
}

impl<F: Scalar> EcdfStepFn<F> {
    /// Build from knots and non-decreasing heights; the floor defaults to
    /// one unit below the first knot.
    pub fn new(knots: Vec<F>, heights: Vec<F>) -> Result<Self, StepFnError> {
        if knots.len() != heights.len() {
            return Err(StepFnError::LengthMismatch {
                knots: knots.len(),
                values: heights.len(),
            });
        }
        if knots.is_empty() {
            return Err(StepFnError::Empty);
        }
        check_finite(&knots)?;
        check_finite(&heights)?;
        if !strictly_increasing(&knots) {
            return Err(StepFnError::KnotsNotIncreasing);
        }
        if !heights.windows(2).all(|w| w[0] <= w[1]) {
            return Err(StepFnError::NotNonDecreasing);
        }
        let floor = knots[0] - F::one();
        Ok(Self {
            floor,
            knots,
            heights,
        })
    }

    /// Replace the floor sentinel; it must stay strictly below the first knot.
    pub fn with_floor(mut self, floor: F) -> Result<Self, StepFnError> {
        if !floor.is_finite() || floor >= self.knots[0] {
            return Err(StepFnError::FloorAboveFirstKnot);
        }
        self.floor = floor;
        Ok(self)
    }

    pub fn knots(&self) -> &[F] {
        &self.knots
    }

    pub fn heights(&self) -> &[F] {
        &self.heights
    }

    pub fn floor(&self) -> F {
        self.floor
    }

    pub fn max_height(&self) -> F {
        *self.heights.last().unwrap()
    }

    /// Right-continuous evaluation; zero below the first knot, constant at
    /// the maximum height above the last knot.
    pub fn eval(&self, y: F) -> F {
        let count = self.knots.partition_point(|&t| t <= y);
        if count == 0 {
            F::zero()
        } else {
            self.heights[count - 1]
        }
    }

    /// Smallest `y` in `[floor, Y_m]` with `eval(y) >= a`.
    ///
    /// Levels at or below zero resolve to the floor sentinel; levels above
    /// the maximum height are rejected.
    pub fn gen_inverse(&self, a: F) -> Result<F, StepFnError> {
        if a > self.max_height() {
            return Err(StepFnError::AboveRange {
                level: a.to_f64().unwrap_or(f64::NAN),
                max: self.max_height().to_f64().unwrap_or(f64::NAN),
            });
        }
        if a <= F::zero() {
            return Ok(self.floor);
        }
        let idx = self.heights.partition_point(|&h| h < a);
        Ok(self.knots[idx])
    }
}
