//! End-to-end localized monotone least-squares estimation.
//!
//! Everything here is local to a window `C = [x0 - delta, x0 + delta]`:
//! observations whose regressor falls outside the window never influence
//! the fit, and queries outside the window are rejected rather than
//! extrapolated. The fitted object bundles three views of the same data —
//! the monotone step function itself, the localized empirical distribution
//! function of the visited regressor values, and the normalized cumulative
//! process whose concave-majorant geometry drives the generalized inverse.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::isotonic::{CsDiagram, IsotonicError, PiecewiseLinearFn};
use crate::scalar::Scalar;
use crate::stepfn::{EcdfStepFn, InverseResult, InverseStatus, MonotoneStepFn, StepFnError};
use crate::window::Window;

#[derive(Debug, Error, PartialEq)]
pub enum EstimatorError {
    #[error("xs and zs have different lengths ({xs} vs {zs})")]
    LengthMismatch { xs: usize, zs: usize },
    #[error("sample must contain at least one observation")]
    EmptySample,
    #[error("non-finite entry in sample")]
    NonFinite,
    #[error("no observations in window")]
    EmptyWindow,
    #[error("query {query} outside window [{lower}, {upper}]")]
    QueryOutsideWindow {
        query: f64,
        lower: f64,
        upper: f64,
    },
    #[error(transparent)]
    Isotonic(#[from] IsotonicError),
    #[error(transparent)]
    StepFn(#[from] StepFnError),
    #[error("data csv: {0}")]
    Csv(String),
}

/// Paired observations `(X_t, Z_t)`, `t = 0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSample<F> {
    xs: Vec<F>,
    zs: Vec<F>,
}

impl<F: Scalar> TimeSeriesSample<F> {
    pub fn new(xs: Vec<F>, zs: Vec<F>) -> Result<Self, EstimatorError> {
        if xs.len() != zs.len() {
            return Err(EstimatorError::LengthMismatch {
                xs: xs.len(),
                zs: zs.len(),
            });
        }
        if xs.is_empty() {
            return Err(EstimatorError::EmptySample);
        }
        if !xs.iter().chain(zs.iter()).all(|v| v.is_finite()) {
            return Err(EstimatorError::NonFinite);
        }
        Ok(Self { xs, zs })
    }

    pub fn xs(&self) -> &[F] {
        &self.xs
    }

    pub fn zs(&self) -> &[F] {
        &self.zs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Write as two-column CSV with header `x,z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,z")?;
        for (x, z) in self.xs.iter().zip(&self.zs) {
            writeln!(out, "{x},{z}")?;
        }
        Ok(())
    }
}

impl TimeSeriesSample<f64> {
    /// Read a two-column CSV with header `x,z`.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self, EstimatorError> {
        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == "x,z" => {}
            Some((_, Ok(h))) => {
                return Err(EstimatorError::Csv(format!(
                    "expected header 'x,z', got '{h}'"
                )))
            }
            Some((_, Err(e))) => return Err(EstimatorError::Csv(e.to_string())),
            None => return Err(EstimatorError::Csv("empty file".into())),
        }
        let mut xs = Vec::new();
        let mut zs = Vec::new();
        for (lineno, line) in lines {
            let line = line.map_err(|e| EstimatorError::Csv(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let mut fields = trimmed.split(',');
            let bad = |e: &dyn std::fmt::Display| {
                EstimatorError::Csv(format!("line {}: {e}", lineno + 1))
            };
            let x: f64 = fields
                .next()
                .ok_or_else(|| bad(&"missing x"))?
                .trim()
                .parse()
                .map_err(|e| bad(&e))?;
            let z: f64 = fields
                .next()
                .ok_or_else(|| bad(&"missing z"))?
                .trim()
                .parse()
                .map_err(|e| bad(&e))?;
            if fields.next().is_some() {
                return Err(bad(&"expected exactly two fields"));
            }
            xs.push(x);
            zs.push(z);
        }
        Self::new(xs, zs)
    }
}

/// Indices of the visits to the window, in time order, plus the visit count.
pub fn visits<F: Scalar>(sample: &TimeSeriesSample<F>, w: &Window<F>) -> (Vec<usize>, usize) {
    let idx: Vec<usize> = sample
        .xs
        .iter()
        .enumerate()
        .filter(|(_, x)| w.contains(**x))
        .map(|(t, _)| t)
        .collect();
    let tn = idx.len();
    (idx, tn)
}

/// Empirical distribution function of the visited regressor values.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedEcdf<F> {
    window: Window<F>,
    tn: usize,
    ecdf: EcdfStepFn<F>,
}

impl<F: Scalar> LocalizedEcdf<F> {
    pub fn from_sample(
        sample: &TimeSeriesSample<F>,
        w: &Window<F>,
    ) -> Result<Self, EstimatorError> {
        let diagram = localized_diagram(sample, w)?;
        Self::from_diagram(w, &diagram)
    }

    fn from_diagram(w: &Window<F>, diagram: &CsDiagram<F>) -> Result<Self, EstimatorError> {
        let tn = diagram.total_count();
        let t = F::from_usize(tn).unwrap();
        let heights: Vec<F> = diagram.counts()[1..]
            .iter()
            .map(|&c| F::from_usize(c).unwrap() / t)
            .collect();
        let ecdf = EcdfStepFn::new(diagram.unique_y().to_vec(), heights)?;
        Ok(Self {
            window: *w,
            tn,
            ecdf,
        })
    }

    pub fn window(&self) -> &Window<F> {
        &self.window
    }

    /// Number of localized observations backing the heights.
    pub fn tn(&self) -> usize {
        self.tn
    }

    pub fn step_fn(&self) -> &EcdfStepFn<F> {
        &self.ecdf
    }

    pub fn eval(&self, y: F) -> F {
        self.ecdf.eval(y)
    }

    /// Write as two-column CSV with header `knot,height`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "knot,height")?;
        for (k, h) in self.ecdf.knots().iter().zip(self.ecdf.heights()) {
            writeln!(out, "{k},{h}")?;
        }
        Ok(())
    }
}

/// The localized monotone least-squares fit and its companion processes.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedFit<F> {
    window: Window<F>,
    tn: usize,
    fit: MonotoneStepFn<F>,
    ecdf: LocalizedEcdf<F>,
    lambda: PiecewiseLinearFn<F>,
}

fn localized_diagram<F: Scalar>(
    sample: &TimeSeriesSample<F>,
    w: &Window<F>,
) -> Result<CsDiagram<F>, EstimatorError> {
    let (idx, tn) = visits(sample, w);
    if tn == 0 {
        return Err(EstimatorError::EmptyWindow);
    }
    let xs_local: Vec<F> = idx.iter().map(|&t| sample.xs[t]).collect();
    let zs_local: Vec<F> = idx.iter().map(|&t| sample.zs[t]).collect();
    Ok(CsDiagram::from_observations(&xs_local, &zs_local)?)
}

impl<F: Scalar> LocalizedFit<F> {
    /// Fit the monotone least-squares estimator to the windowed observations.
    pub fn fit(sample: &TimeSeriesSample<F>, w: &Window<F>) -> Result<Self, EstimatorError> {
        let diagram = localized_diagram(sample, w)?;
        let tn = diagram.total_count();
        let slopes = diagram.lcm_left_slopes();
        let fit = MonotoneStepFn::new(diagram.unique_y().to_vec(), slopes)?;
        let ecdf = LocalizedEcdf::from_diagram(w, &diagram)?;
        let lambda = diagram.lambda_process(tn)?;
        Ok(Self {
            window: *w,
            tn,
            fit,
            ecdf,
            lambda,
        })
    }

    pub fn window(&self) -> &Window<F> {
        &self.window
    }

    pub fn tn(&self) -> usize {
        self.tn
    }

    /// The fitted step function, with knots at the visited unique values.
    pub fn step_fn(&self) -> &MonotoneStepFn<F> {
        &self.fit
    }

    pub fn ecdf(&self) -> &LocalizedEcdf<F> {
        &self.ecdf
    }

    /// The normalized cumulative process on `[0, 1]`.
    pub fn lambda(&self) -> &PiecewiseLinearFn<F> {
        &self.lambda
    }

    /// Evaluate the fit at a point of the window (left-continuous).
    pub fn value_at(&self, x_query: F) -> Result<F, EstimatorError> {
        if !self.window.contains(x_query) {
            return Err(EstimatorError::QueryOutsideWindow {
                query: x_query.to_f64().unwrap_or(f64::NAN),
                lower: self.window.lower().to_f64().unwrap_or(f64::NAN),
                upper: self.window.upper().to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.fit.eval(x_query))
    }

    /// Generalized inverse of the fit at level `a`, computed through the
    /// argmax of the normalized cumulative process composed with the
    /// generalized inverse of the localized empirical distribution function.
    ///
    /// For levels that do not tie a fitted value exactly this coincides with
    /// the direct generalized inverse of the fitted step function. The
    /// sentinel floor is one unit below the smallest knot.
    pub fn inverse(&self, a: F) -> InverseResult<F> {
        let height = self.lambda.argmax_greatest(a);
        let value = self
            .ecdf
            .step_fn()
            .gen_inverse(height)
            .expect("argmax heights stay within the ecdf range");
        let status = if a > self.fit.max_value() {
            InverseStatus::ClippedLow
        } else if a <= self.fit.min_value() {
            InverseStatus::ClippedHigh
        } else {
            InverseStatus::Interior
        };
        InverseResult { value, status }
    }

    /// Write the fit as two-column CSV with header `knot,value`.
    pub fn write_fit_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "knot,value")?;
        for (k, v) in self.fit.knots().iter().zip(self.fit.values()) {
            writeln!(out, "{k},{v}")?;
        }
        Ok(())
    }
}

/// Fit and evaluate at `x_query` in one call.
pub fn estimate_at<F: Scalar>(
    sample: &TimeSeriesSample<F>,
    w: &Window<F>,
    x_query: F,
) -> Result<F, EstimatorError> {
    LocalizedFit::fit(sample, w)?.value_at(x_query)
}

/// Fit and invert at level `a` in one call.
pub fn estimate_inverse<F: Scalar>(
    sample: &TimeSeriesSample<F>,
    w: &Window<F>,
    a: F,
) -> Result<InverseResult<F>, EstimatorError> {
    Ok(LocalizedFit::fit(sample, w)?.inverse(a))
}
