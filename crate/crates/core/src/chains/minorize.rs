//! Minorization of a transition kernel and split-chain regeneration.
//!
//! A pair `(s, nu)` with `P(x, A) >= s(x) nu(A)` lets the chain regenerate:
//! after proposing `X_{t+1}` from the kernel, a coin with success
//! probability `s(X_t) nu(X_{t+1}) / p(X_t, X_{t+1})` decides whether the
//! step came from the minorizing measure, in which case the past is
//! forgotten. For the Gaussian kernels the pair is built from the pointwise
//! minimum of the transition densities over a band of starting points:
//! `s(x) = eps` on `[center - d, center + d]` and `nu` proportional to
//! `min_{|x - center| <= d} p(x, y)`, with `eps` the total mass of that
//! minimum. The lattice walk needs none of this: state 0 is an atom, so the
//! exact-atom mode records plain visits.

use super::{normal_pdf, std_normal_cdf, ChainError, ChainModel, ChainSpec};

/// Density proportional to the minimum of a family of shifted normal
/// densities: `phi_sd(|y - center| + offset) / mass`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldedNormal {
    center: f64,
    offset: f64,
    sd: f64,
    mass: f64,
}

impl FoldedNormal {
    fn new(center: f64, offset: f64, sd: f64) -> Self {
        let mass = 2.0 * (1.0 - std_normal_cdf(offset / sd));
        Self {
            center,
            offset,
            sd,
            mass,
        }
    }

    pub fn density(&self, y: f64) -> f64 {
        normal_pdf((y - self.center).abs() + self.offset, self.sd) / self.mass
    }

    /// Total mass of the unnormalized minimum density.
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// How a chain regenerates: a component-wise minorization of a Gaussian
/// kernel, or an exact atom of a lattice chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinorizationSpec {
    Gaussian {
        /// Height of the small function `s` on its support.
        s_height: f64,
        /// Center of the support of `s`.
        s_center: f64,
        /// Half-width of the support of `s`.
        s_halfwidth: f64,
        /// The minorizing probability density.
        nu: FoldedNormal,
    },
    /// Visits to `state` regenerate exactly (the transition law does not
    /// depend on the past there).
    ExactAtom { state: f64 },
}

impl MinorizationSpec {
    /// Build the tight component-wise minorization of a Gaussian kernel on
    /// the band `[center - halfwidth, center + halfwidth]` and verify the
    /// inequality numerically on a grid.
    pub fn gaussian(
        spec: &ChainSpec,
        center: f64,
        halfwidth: f64,
    ) -> Result<Self, ChainError> {
        if !halfwidth.is_finite() || halfwidth <= 0.0 {
            return Err(ChainError::InvalidMinorizationWidth);
        }
        let nu = match spec.model() {
            ChainModel::GaussianRandomWalk { increment_sd } => {
                FoldedNormal::new(center, halfwidth, increment_sd)
            }
            ChainModel::Ar1 { rho, increment_sd } => {
                FoldedNormal::new(rho * center, rho.abs() * halfwidth, increment_sd)
            }
            ChainModel::LazySrw { .. } => return Err(ChainError::NotAGaussianKernel),
        };
        let built = Self::Gaussian {
            s_height: nu.mass(),
            s_center: center,
            s_halfwidth: halfwidth,
            nu,
        };
        built.validate_for(spec)?;
        Ok(built)
    }

    /// Exact-atom regeneration at `state`.
    pub fn exact_atom(state: f64) -> Result<Self, ChainError> {
        if !state.is_finite() {
            return Err(ChainError::InvalidAtomState);
        }
        Ok(Self::ExactAtom { state })
    }

    /// Shrink the small-function height; `0` is allowed as an explicit
    /// degenerate (no regeneration ever fires).
    pub fn with_s_height(self, spec: &ChainSpec, eps: f64) -> Result<Self, ChainError> {
        match self {
            Self::Gaussian {
                s_center,
                s_halfwidth,
                nu,
                ..
            } => {
                if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
                    return Err(ChainError::InvalidMinorizationHeight);
                }
                let replaced = Self::Gaussian {
                    s_height: eps,
                    s_center,
                    s_halfwidth,
                    nu,
                };
                replaced.validate_for(spec)?;
                Ok(replaced)
            }
            Self::ExactAtom { .. } => Ok(self),
        }
    }

    /// The small function `s`.
    pub fn s(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian {
                s_height,
                s_center,
                s_halfwidth,
                ..
            } => {
                if (x - s_center).abs() <= *s_halfwidth {
                    *s_height
                } else {
                    0.0
                }
            }
            Self::ExactAtom { state } => {
                if x == *state {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Density of the minorizing measure `nu`.
    pub fn nu_density(&self, y: f64) -> f64 {
        match self {
            Self::Gaussian { nu, .. } => nu.density(y),
            // The atom's nu is the transition law out of the atom itself;
            // the regeneration probability there is identically one, so the
            // density never enters any computation.
            Self::ExactAtom { .. } => 1.0,
        }
    }

    /// Check `s(x) nu(y) <= p(x, y)` for `spec`'s kernel on a grid covering
    /// the support of `s` and the bulk of the proposal distribution.
    pub fn validate_for(&self, spec: &ChainSpec) -> Result<(), ChainError> {
        let Self::Gaussian {
            s_center,
            s_halfwidth,
            nu,
            ..
        } = self
        else {
            return Ok(());
        };
        if matches!(spec.model(), ChainModel::LazySrw { .. }) {
            return Err(ChainError::NotAGaussianKernel);
        }
        let y_span = 5.0 * nu.sd + nu.offset + s_halfwidth;
        for i in 0..=32 {
            let x = s_center - s_halfwidth + 2.0 * s_halfwidth * i as f64 / 32.0;
            let s = self.s(x);
            if s == 0.0 {
                continue;
            }
            for j in 0..=128 {
                let y = nu.center - y_span + 2.0 * y_span * j as f64 / 128.0;
                let lhs = s * self.nu_density(y);
                let rhs = spec.transition_density(x, y);
                if lhs > rhs * (1.0 + 1e-9) + 1e-300 {
                    return Err(ChainError::MinorizationViolated { x, y, lhs, rhs });
                }
            }
        }
        Ok(())
    }
}

/// A simulated path together with its regeneration times.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPath {
    pub path: Vec<f64>,
    pub regen_times: Vec<usize>,
}
