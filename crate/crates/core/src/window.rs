//! The localization window `C = [x0 - delta, x0 + delta]`.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error("window half-width must be positive and finite")]
    InvalidHalfWidth,
    #[error("window center must be finite")]
    InvalidCenter,
}

/// Closed interval `[x0 - delta, x0 + delta]` around a point of interest.
///
/// Membership uses the closed interval on both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<F> {
    x0: F,
    delta: F,
}

impl<F: Scalar> Window<F> {
    pub fn new(x0: F, delta: F) -> Result<Self, WindowError> {
        if !x0.is_finite() {
            return Err(WindowError::InvalidCenter);
        }
        if !delta.is_finite() || delta <= F::zero() {
            return Err(WindowError::InvalidHalfWidth);
        }
        Ok(Self { x0, delta })
    }

    pub fn x0(&self) -> F {
        self.x0
    }

    pub fn delta(&self) -> F {
        self.delta
    }

    pub fn lower(&self) -> F {
        self.x0 - self.delta
    }

    pub fn upper(&self) -> F {
        self.x0 + self.delta
    }

    pub fn contains(&self, x: F) -> bool {
        x >= self.lower() && x <= self.upper()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_on_both_ends() {
        let w = Window::new(0.0, 0.5).unwrap();
        assert!(w.contains(0.5));
        assert!(w.contains(-0.5));
        assert!(!w.contains(0.5000001));
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(
            Window::new(0.0, 0.0).unwrap_err(),
            WindowError::InvalidHalfWidth
        );
        assert_eq!(
            Window::new(0.0, -1.0).unwrap_err(),
            WindowError::InvalidHalfWidth
        );
        assert_eq!(
            Window::new(f64::NAN, 1.0).unwrap_err(),
            WindowError::InvalidCenter
        );
    }
}
