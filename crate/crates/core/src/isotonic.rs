//! Cumulative sum diagrams, least concave majorants and the
//! pool-adjacent-violators solver.
//!
//! The monotone least-squares fit of localized observations is read off the
//! cumulative sum diagram: sort the windowed observations by regressor,
//! aggregate ties, accumulate visit counts on one axis and response sums on
//! the other, then take the left-hand slopes of the diagram's least concave
//! majorant. Those slopes, attached to the unique regressor values, are the
//! fitted step function. [`pava_decreasing`] solves the same weighted
//! projection directly and serves as an algebraic cross-check.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::stepfn::{MonotoneStepFn, StepFnError};

#[derive(Debug, Error, PartialEq)]
pub enum IsotonicError {
    #[error("no localized observations")]
    EmptyInput,
    #[error("inputs have different lengths ({xs} vs {zs})")]
    LengthMismatch { xs: usize, zs: usize },
    #[error("non-finite entry in input data")]
    NonFinite,
    #[error("weights must be positive and finite")]
    BadWeight,
    #[error("normalization mismatch: diagram holds {diagram} observations, got {given}")]
    NormalizationMismatch { diagram: usize, given: usize },
    #[error(transparent)]
    StepFn(#[from] StepFnError),
}

/// Cumulative sum diagram of localized observations.
///
/// `counts` holds `l_0 = 0 < l_1 < ... < l_m`, the number of observations
/// with regressor at most the k-th unique value; `sums` holds the matching
/// cumulative response totals, starting at zero. Tied regressor values are
/// aggregated: the count advances by the multiplicity and the sum by the
/// tied response total.
#[derive(Debug, Clone, PartialEq)]
pub struct CsDiagram<F> {
    unique_y: Vec<F>,
    counts: Vec<usize>,
    sums: Vec<F>,
}

impl<F: Scalar> CsDiagram<F> {
    pub fn from_observations(xs: &[F], zs: &[F]) -> Result<Self, IsotonicError> {
        if xs.len() != zs.len() {
            return Err(IsotonicError::LengthMismatch {
                xs: xs.len(),
                zs: zs.len(),
            });
        }
        if xs.is_empty() {
            return Err(IsotonicError::EmptyInput);
        }
        if !xs.iter().chain(zs.iter()).all(|v| v.is_finite()) {
            return Err(IsotonicError::NonFinite);
        }
        let mut pairs: Vec<(F, F)> = xs.iter().copied().zip(zs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut unique_y = Vec::new();
        let mut counts = vec![0usize];
        let mut sums = vec![F::zero()];
        let mut i = 0;
        while i < pairs.len() {
            let y = pairs[i].0;
            let mut mult = 0usize;
            let mut tied_total = F::zero();
            while i < pairs.len() && pairs[i].0 == y {
                tied_total = tied_total + pairs[i].1;
                mult += 1;
                i += 1;
            }
            unique_y.push(y);
            counts.push(counts.last().unwrap() + mult);
            sums.push(*sums.last().unwrap() + tied_total);
        }
        Ok(Self {
            unique_y,
            counts,
            sums,
        })
    }

    /// Unique ordered regressor values `Y_1 < ... < Y_m`.
    pub fn unique_y(&self) -> &[F] {
        &self.unique_y
    }

    /// Cumulative visit counts `l_0, ..., l_m`.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Cumulative response sums `s_0, ..., s_m`.
    pub fn sums(&self) -> &[F] {
        &self.sums
    }

    /// Total number of localized observations, `l_m`.
    pub fn total_count(&self) -> usize {
        *self.counts.last().unwrap()
    }

    /// Left-hand slope of the least concave majorant of the diagram points
    /// at each `l_k`, `k = 1..m`. The output is non-increasing.
    pub fn lcm_left_slopes(&self) -> Vec<F> {
        let x: Vec<F> = self
            .counts
            .iter()
            .map(|&c| F::from_usize(c).unwrap())
            .collect();
        concave_majorant_left_slopes(&x, &self.sums)
    }

    /// The diagram normalized by the number of localized observations: a
    /// continuous piecewise-linear function on `[0, 1]` with knots `l_k/T_n`
    /// and values `s_k/T_n`.
    pub fn lambda_process(&self, tn: usize) -> Result<PiecewiseLinearFn<F>, IsotonicError> {
        if tn != self.total_count() {
            return Err(IsotonicError::NormalizationMismatch {
                diagram: self.total_count(),
                given: tn,
            });
        }
        let t = F::from_usize(tn).unwrap();
        let knots = self
            .counts
            .iter()
            .map(|&c| F::from_usize(c).unwrap() / t)
            .collect();
        let values = self.sums.iter().map(|&s| s / t).collect();
        PiecewiseLinearFn::new(knots, values)
    }
}

/// Left-hand slopes at `x[1..]` of the least concave majorant of the points
/// `(x[k], y[k])`, for strictly increasing `x` of length at least two.
///
/// Single pass with a monotone stack of hull vertices; runs of equal slopes
/// merge into one block. Slopes are difference quotients of the cumulative
/// values at the retained vertices, so the output compares non-increasing
/// under the same floating-point arithmetic.
pub fn concave_majorant_left_slopes<F: Scalar>(x: &[F], y: &[F]) -> Vec<F> {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need the origin plus at least one point");
    let slope = |a: usize, b: usize| -> F { (y[b] - y[a]) / (x[b] - x[a]) };
    let mut hull: Vec<usize> = vec![0];
    for k in 1..x.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b lies on or below the chord a -> k: not a majorant vertex.
            if slope(a, b) <= slope(b, k) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut slopes = Vec::with_capacity(x.len() - 1);
    for seg in hull.windows(2) {
        let s = slope(seg[0], seg[1]);
        for _ in seg[0]..seg[1] {
            slopes.push(s);
        }
    }
    slopes
}

/// Weighted least-squares projection of `values` onto non-increasing
/// sequences: pool-adjacent-violators, merging blocks while the running
/// block means violate the ordering.
pub fn pava_decreasing<F: Scalar>(values: &[F], weights: &[F]) -> Result<Vec<F>, IsotonicError> {
    if values.len() != weights.len() {
        return Err(IsotonicError::LengthMismatch {
            xs: values.len(),
            zs: weights.len(),
        });
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(IsotonicError::NonFinite);
    }
    if !weights.iter().all(|w| w.is_finite() && *w > F::zero()) {
        return Err(IsotonicError::BadWeight);
    }
    // Blocks carry (total weight, weighted value total, length); means are
    // compared by cross-multiplication to keep the pooling test free of
    // division rounding.
    let mut blocks: Vec<(F, F, usize)> = Vec::with_capacity(values.len());
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((w, w * v, 1));
        while blocks.len() >= 2 {
            let cur = blocks[blocks.len() - 1];
            let prev = blocks[blocks.len() - 2];
            // Violation: prev mean < cur mean.
            if prev.1 * cur.0 < cur.1 * prev.0 {
                blocks.pop();
                let last = blocks.last_mut().unwrap();
                last.0 = prev.0 + cur.0;
                last.1 = prev.1 + cur.1;
                last.2 = prev.2 + cur.2;
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (w, wv, len) in blocks {
        let mean = wv / w;
        out.extend(std::iter::repeat(mean).take(len));
    }
    Ok(out)
}

/// The monotone non-increasing least-squares fit of paired observations:
/// knots are the unique regressor values, fitted values the majorant slopes
/// of the cumulative sum diagram.
pub fn fit_monotone_lse<F: Scalar>(
    xs: &[F],
    zs: &[F],
) -> Result<MonotoneStepFn<F>, IsotonicError> {
    let diagram = CsDiagram::from_observations(xs, zs)?;
    let slopes = diagram.lcm_left_slopes();
    Ok(MonotoneStepFn::new(diagram.unique_y.clone(), slopes)?)
}

/// Continuous piecewise-linear function on `[knots[0], knots[last]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFn<F> {
    knots: Vec<F>,
    values: Vec<F>,
}

impl<F: Scalar> PiecewiseLinearFn<F> {
    pub fn new(knots: Vec<F>, values: Vec<F>) -> Result<Self, IsotonicError> {
        if knots.len() != values.len() {
            return Err(IsotonicError::LengthMismatch {
                xs: knots.len(),
                zs: values.len(),
            });
        }
        if knots.is_empty() {
            return Err(IsotonicError::EmptyInput);
        }
        if !knots.iter().chain(values.iter()).all(|v| v.is_finite()) {
            return Err(IsotonicError::NonFinite);
        }
        if !knots.windows(2).all(|w| w[0] < w[1]) {
            return Err(IsotonicError::StepFn(StepFnError::KnotsNotIncreasing));
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[F] {
        &self.knots
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    /// Linear interpolation; arguments are clamped to the domain.
    pub fn eval(&self, p: F) -> F {
        if p <= self.knots[0] {
            return self.values[0];
        }
        if p >= *self.knots.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let j = self.knots.partition_point(|&t| t < p);
        let (p0, p1) = (self.knots[j - 1], self.knots[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (v1 - v0) * (p - p0) / (p1 - p0)
    }

    /// Greatest knot maximizing `self(p) - a * p`.
    ///
    /// A piecewise-linear function attains its maximum over the domain at a
    /// knot, so only knots are examined; ties resolve to the greatest knot.
    pub fn argmax_greatest(&self, a: F) -> F {
        let mut best_p = self.knots[0];
        let mut best = self.values[0] - a * self.knots[0];
        for (&p, &v) in self.knots.iter().zip(&self.values).skip(1) {
            let obj = v - a * p;
            if obj >= best {
                best = obj;
                best_p = p;
            }
        }
        best_p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len(), "length mismatch: {a:?} vs {b:?}");
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= TOL, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn diagram_accumulates_in_sorted_order() {
        let d = CsDiagram::from_observations(&[-0.1, 0.0, 0.2], &[1.2, 1.0, 0.5]).unwrap();
        assert_eq!(d.unique_y(), &[-0.1, 0.0, 0.2]);
        assert_eq!(d.counts(), &[0, 1, 2, 3]);
        assert_close(d.sums(), &[0.0, 1.2, 2.2, 2.7]);
    }

    #[test]
    fn diagram_aggregates_ties() {
        let d = CsDiagram::from_observations(&[0.0, 0.0], &[1.0, 3.0]).unwrap();
        assert_eq!(d.unique_y(), &[0.0]);
        assert_eq!(d.counts(), &[0, 2]);
        assert_close(d.sums(), &[0.0, 4.0]);
    }

    #[test]
    fn diagram_single_observation() {
        let d = CsDiagram::from_observations(&[1.0], &[7.0]).unwrap();
        assert_eq!(d.counts(), &[0, 1]);
        assert_close(d.sums(), &[0.0, 7.0]);
    }

    #[test]
    fn diagram_rejects_empty() {
        assert_eq!(
            CsDiagram::<f64>::from_observations(&[], &[]).unwrap_err(),
            IsotonicError::EmptyInput
        );
    }

    #[test]
    fn lcm_of_concave_diagram_is_the_diagram() {
        let slopes = concave_majorant_left_slopes(&[0.0, 1.0, 2.0, 3.0], &[0.0, 2.0, 3.0, 3.0]);
        assert_close(&slopes, &[2.0, 1.0, 0.0]);
    }

    #[test]
    fn lcm_pools_convex_corner() {
        // Chord beats the polyline: slope 3/2 on both pieces.
        let slopes = concave_majorant_left_slopes(&[0.0, 1.0, 2.0], &[0.0, 1.0, 3.0]);
        assert_close(&slopes, &[1.5, 1.5]);
    }

    #[test]
    fn lcm_single_segment() {
        let slopes = concave_majorant_left_slopes(&[0.0, 2.0], &[0.0, 4.0]);
        assert_close(&slopes, &[2.0]);
    }

    #[test]
    fn pava_pools_single_violator() {
        let fit = pava_decreasing(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_close(&fit, &[3.0, 1.5, 1.5]);
    }

    #[test]
    fn pava_keeps_feasible_input() {
        let fit = pava_decreasing(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_close(&fit, &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn pava_full_pool_is_the_mean() {
        let fit = pava_decreasing(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_close(&fit, &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn fit_interpolates_already_monotone_data() {
        let f = fit_monotone_lse(&[-0.1, 0.0, 0.2], &[1.2, 1.0, 0.5]).unwrap();
        assert_eq!(f.knots(), &[-0.1, 0.0, 0.2]);
        assert_close(f.values(), &[1.2, 1.0, 0.5]);
    }

    #[test]
    fn fit_pools_violator_to_mean() {
        let f = fit_monotone_lse(&[0.0, 1.0], &[1.0, 5.0]).unwrap();
        assert_close(f.values(), &[3.0, 3.0]);
    }

    #[test]
    fn fit_tie_forces_mean() {
        let f = fit_monotone_lse(&[0.0, 0.0], &[1.0, 3.0]).unwrap();
        assert_eq!(f.knots(), &[0.0]);
        assert_close(f.values(), &[2.0]);
    }

    #[test]
    fn lambda_divides_by_total_count() {
        let d = CsDiagram::from_observations(&[-0.1, 0.0, 0.2], &[1.2, 1.0, 0.5]).unwrap();
        let lam = d.lambda_process(3).unwrap();
        assert_close(lam.knots(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert_close(lam.values(), &[0.0, 0.4, 2.2 / 3.0, 0.9]);
        // Midway interpolation.
        assert!((lam.eval(1.0 / 6.0) - 0.2).abs() <= TOL);
    }

    #[test]
    fn lambda_single_point() {
        let d = CsDiagram::from_observations(&[0.5], &[7.0]).unwrap();
        let lam = d.lambda_process(1).unwrap();
        assert_close(lam.knots(), &[0.0, 1.0]);
        assert_close(lam.values(), &[0.0, 7.0]);
    }

    #[test]
    fn lambda_rejects_wrong_normalization() {
        let d = CsDiagram::from_observations(&[0.5], &[7.0]).unwrap();
        assert_eq!(
            d.lambda_process(2).unwrap_err(),
            IsotonicError::NormalizationMismatch {
                diagram: 1,
                given: 2
            }
        );
    }

    #[test]
    fn argmax_prefers_greatest_tie() {
        let d = CsDiagram::from_observations(&[-0.1, 0.0, 0.2], &[1.2, 1.0, 0.5]).unwrap();
        let lam = d.lambda_process(3).unwrap();
        // Enumerated objective at the knots: 0, 0.0667, 0.0667, -0.1.
        assert_eq!(lam.argmax_greatest(1.0), 2.0 / 3.0);
    }

    #[test]
    fn argmax_steep_penalty_hits_first_knot() {
        let d = CsDiagram::from_observations(&[-0.1, 0.0, 0.2], &[1.2, 1.0, 0.5]).unwrap();
        let lam = d.lambda_process(3).unwrap();
        assert_eq!(lam.argmax_greatest(1e6), 0.0);
    }

    #[test]
    fn argmax_zero_level_on_nondecreasing_hits_last_knot() {
        let lam = PiecewiseLinearFn::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 1.5]).unwrap();
        assert_eq!(lam.argmax_greatest(0.0), 1.0);
    }

    #[test]
    fn argmax_exact_ties_resolve_to_greatest_knot() {
        // Slope exactly 1 everywhere: objective is 0 at every knot for a = 1.
        let lam = PiecewiseLinearFn::new(vec![0.0, 0.25, 0.5], vec![0.0, 0.25, 0.5]).unwrap();
        assert_eq!(lam.argmax_greatest(1.0), 0.5);
    }

    #[test]
    fn single_precision_instantiation() {
        let f = fit_monotone_lse::<f32>(&[0.0, 1.0, 2.0], &[1.0, 5.0, 0.0]).unwrap();
        assert_eq!(f.values(), &[3.0f32, 3.0, 0.0]);
        assert_eq!(f.eval(0.5), 3.0);
        let fit = pava_decreasing::<f32>(&[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_eq!(fit, vec![1.5f32, 1.5]);
    }

    // Brute-force minimizer over block partitions: within a block the optimum
    // is the weighted mean; a partition is feasible when block means are
    // non-increasing. Independent of the majorant/PAVA implementations.
    fn brute_force_fit(xs: &[f64], zs: &[f64]) -> Vec<f64> {
        let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(zs.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut w = Vec::new();
        let mut zbar = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let x = pairs[i].0;
            let mut count = 0.0;
            let mut total = 0.0;
            while i < pairs.len() && pairs[i].0 == x {
                count += 1.0;
                total += pairs[i].1;
                i += 1;
            }
            w.push(count);
            zbar.push(total / count);
        }
        let m = w.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        // Bitmask over the m - 1 possible block boundaries.
        for mask in 0..(1u32 << (m - 1)) {
            let mut cuts = vec![0usize];
            for b in 0..m - 1 {
                if mask & (1 << b) != 0 {
                    cuts.push(b + 1);
                }
            }
            cuts.push(m);
            let mut means = Vec::new();
            let mut fitted = Vec::new();
            for win in cuts.windows(2) {
                let (lo, hi) = (win[0], win[1]);
                let wt: f64 = w[lo..hi].iter().sum();
                let wv: f64 = (lo..hi).map(|j| w[j] * zbar[j]).sum();
                let mean = wv / wt;
                means.push(mean);
                for _ in lo..hi {
                    fitted.push(mean);
                }
            }
            if !means.windows(2).all(|p| p[0] >= p[1] - 1e-12) {
                continue;
            }
            let sse: f64 = (0..m).map(|j| w[j] * (zbar[j] - fitted[j]).powi(2)).sum();
            if best.as_ref().map_or(true, |(s, _)| sse < *s) {
                best = Some((sse, fitted));
            }
        }
        best.unwrap().1
    }

    fn arb_small_dataset() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..=6).prop_flat_map(|n| {
            (
                proptest::collection::vec(0u8..7, n),
                proptest::collection::vec(0usize..n, n),
            )
                .prop_map(move |(zi, xi)| {
                    let zs: Vec<f64> = zi.iter().map(|&k| k as f64 * 0.5).collect();
                    let xs: Vec<f64> = xi.iter().map(|&k| k as f64).collect();
                    (xs, zs)
                })
        })
    }

    fn arb_observations(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..=max_len).prop_flat_map(|n| {
            (
                proptest::collection::vec(-50i32..50, n),
                proptest::collection::vec(-400i32..400, n),
            )
                .prop_map(|(xi, zi)| {
                    let xs: Vec<f64> = xi.iter().map(|&k| k as f64 / 4.0).collect();
                    let zs: Vec<f64> = zi.iter().map(|&k| k as f64 / 16.0).collect();
                    (xs, zs)
                })
        })
    }

    proptest! {
        #[test]
        fn fit_matches_brute_force((xs, zs) in arb_small_dataset()) {
            let fit = fit_monotone_lse(&xs, &zs).unwrap();
            let expected = brute_force_fit(&xs, &zs);
            let got = fit.values();
            prop_assert_eq!(got.len(), expected.len());
            for (a, b) in got.iter().zip(&expected) {
                prop_assert!((a - b).abs() <= TOL, "fit {:?} vs oracle {:?}", got, expected);
            }
        }

        #[test]
        fn slopes_non_increasing((xs, zs) in arb_observations(40)) {
            let d = CsDiagram::from_observations(&xs, &zs).unwrap();
            let slopes = d.lcm_left_slopes();
            prop_assert!(slopes.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn majorant_dominates_and_touches((xs, zs) in arb_observations(40)) {
            let d = CsDiagram::from_observations(&xs, &zs).unwrap();
            let slopes = d.lcm_left_slopes();
            // Rebuild the majorant at each l_k from the slopes.
            let mut major = vec![0.0];
            for (k, s) in slopes.iter().enumerate() {
                let dx = (d.counts()[k + 1] - d.counts()[k]) as f64;
                major.push(major[k] + s * dx);
            }
            for (m, s) in major.iter().zip(d.sums()) {
                prop_assert!(*m >= s - TOL);
            }
            // The majorant touches the diagram wherever the slope drops, and
            // always at the final point.
            for k in 1..=slopes.len() {
                let is_boundary = k == slopes.len() || slopes[k] < slopes[k - 1];
                if is_boundary {
                    prop_assert!((major[k] - d.sums()[k]).abs() <= TOL);
                }
            }
        }

        #[test]
        fn pava_agrees_with_majorant_slopes((_, vals) in arb_observations(40),
                                            wraw in proptest::collection::vec(1u8..=16, 1..=40)) {
            let n = vals.len().min(wraw.len());
            let values = &vals[..n];
            let weights: Vec<f64> = wraw[..n].iter().map(|&w| w as f64 / 4.0).collect();
            let fit = pava_decreasing(values, &weights).unwrap();
            // Weighted diagram with increments (w_k, w_k v_k).
            let mut x = vec![0.0];
            let mut y = vec![0.0];
            for (v, w) in values.iter().zip(&weights) {
                x.push(x.last().unwrap() + w);
                y.push(y.last().unwrap() + w * v);
            }
            let slopes = concave_majorant_left_slopes(&x, &y);
            prop_assert_eq!(fit.len(), slopes.len());
            for (a, b) in fit.iter().zip(&slopes) {
                prop_assert!((a - b).abs() <= TOL);
            }
        }

        #[test]
        fn block_means_and_residuals((xs, zs) in arb_observations(40)) {
            let d = CsDiagram::from_observations(&xs, &zs).unwrap();
            let slopes = d.lcm_left_slopes();
            // Within each maximal constant block the fitted value is the
            // weighted mean of the responses, so weighted residuals vanish
            // per block and in total.
            let mut k = 0;
            while k < slopes.len() {
                let mut end = k + 1;
                while end < slopes.len() && slopes[end] == slopes[k] {
                    end += 1;
                }
                let weight = (d.counts()[end] - d.counts()[k]) as f64;
                let total = d.sums()[end] - d.sums()[k];
                prop_assert!((total / weight - slopes[k]).abs() <= TOL);
                k = end;
            }
            let fitted_total: f64 = (0..slopes.len())
                .map(|j| slopes[j] * (d.counts()[j + 1] - d.counts()[j]) as f64)
                .sum();
            prop_assert!((fitted_total - d.sums().last().unwrap()).abs() <= TOL);
        }

        #[test]
        fn fit_equivariance((xs, zs) in arb_observations(20), c in -8i32..8, lam in 1u8..8) {
            let base = fit_monotone_lse(&xs, &zs).unwrap();
            let c = c as f64 / 2.0;
            let lam = lam as f64 / 2.0;

            let shifted: Vec<f64> = zs.iter().map(|z| z + c).collect();
            let fs = fit_monotone_lse(&xs, &shifted).unwrap();
            for (a, b) in fs.values().iter().zip(base.values()) {
                prop_assert!((a - (b + c)).abs() <= 1e-8);
            }

            let scaled: Vec<f64> = zs.iter().map(|z| z * lam).collect();
            let fl = fit_monotone_lse(&xs, &scaled).unwrap();
            for (a, b) in fl.values().iter().zip(base.values()) {
                prop_assert!((a - b * lam).abs() <= 1e-8);
            }

            // Strictly increasing relabeling of the x axis leaves values put.
            let relabeled: Vec<f64> = xs.iter().map(|x| x.exp().atan() * 3.0 + x).collect();
            let fr = fit_monotone_lse(&relabeled, &zs).unwrap();
            for (a, b) in fr.values().iter().zip(base.values()) {
                prop_assert!((a - b).abs() <= 1e-8);
            }
        }

        #[test]
        fn fit_permutation_invariant((xs, zs) in arb_observations(20), seed in 0u64..1000) {
            let base = fit_monotone_lse(&xs, &zs).unwrap();
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            // Cheap deterministic shuffle.
            let mut s = seed;
            for i in (1..idx.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            let px: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
            let pz: Vec<f64> = idx.iter().map(|&i| zs[i]).collect();
            let perm = fit_monotone_lse(&px, &pz).unwrap();
            prop_assert_eq!(base.knots(), perm.knots());
            prop_assert_eq!(base.values(), perm.values());
        }

        #[test]
        fn argmax_returns_a_knot_and_is_stable((xs, zs) in arb_observations(20), ai in -40i32..40) {
            let d = CsDiagram::from_observations(&xs, &zs).unwrap();
            let lam = d.lambda_process(d.total_count()).unwrap();
            let a = ai as f64 / 4.0;
            let p = lam.argmax_greatest(a);
            prop_assert!(lam.knots().contains(&p));

            // Stability away from exact ties: if the runner-up objective is
            // clearly separated, a 1e-12 nudge of the level cannot flip the
            // winner.
            let objs: Vec<f64> = lam
                .knots()
                .iter()
                .zip(lam.values())
                .map(|(&k, &v)| v - a * k)
                .collect();
            let best = objs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let near_tie = objs.iter().filter(|o| (best - **o).abs() <= 1e-6).count() > 1;
            if !near_tie {
                prop_assert_eq!(lam.argmax_greatest(a + 1e-12), p);
                prop_assert_eq!(lam.argmax_greatest(a - 1e-12), p);
            }
        }
    }
}
