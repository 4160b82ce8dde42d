//! Simulable Markov models with known recurrence class and occupation-time
//! diagnostics.
//!
//! Three built-in models cover the regimes the estimator cares about:
//!
//! * [`ChainSpec::gaussian_random_walk`] — null recurrent with occupation
//!   exponent 1/2, continuous state space;
//! * [`ChainSpec::ar1`] — positive recurrent, started at its stationary law;
//! * [`ChainSpec::lazy_srw`] — null recurrent on the integer lattice, with
//!   the state 0 as a genuine atom.
//!
//! Each model knows its deterministic occupation proxy `u(n)` (`n` when
//! positive recurrent, `n^beta * L` when null recurrent) and the cumulative
//! distribution function of its invariant measure restricted to a window.
//! [`MinorizationSpec`] builds split-chain regeneration on top of a
//! minorization of the transition kernel, and [`decompose_blocks`] splits
//! paths into regeneration blocks.

mod minorize;
mod regen;

pub use minorize::{FoldedNormal, MinorizationSpec, SplitPath};
pub use regen::{block_occupation, decompose_blocks, RegenerationDecomposition};

use std::io::{self, BufRead, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::rng::{derive_seed, stream_rng};
use crate::window::Window;

/// Stream identifiers hung off a base seed; see [`crate::rng`].
const PATH_STREAM: u64 = 0;
const COIN_STREAM: u64 = 1;
const OCCUPATION_STREAM: u64 = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("autoregression coefficient must satisfy |rho| < 1")]
    InvalidRho,
    #[error("increment standard deviation must be positive and finite")]
    InvalidIncrementSd,
    #[error("hold probability must lie in [0, 1)")]
    InvalidHoldProb,
    #[error("slowly varying constant must be positive and finite")]
    InvalidSlowlyVarying,
    #[error("minorization half-width must be positive and finite")]
    InvalidMinorizationWidth,
    #[error("minorization height must lie in [0, 1]")]
    InvalidMinorizationHeight,
    #[error("atom state must be finite")]
    InvalidAtomState,
    #[error("the lazy walk has an exact atom; component-wise minorization is built for Gaussian kernels only")]
    NotAGaussianKernel,
    #[error("minorization violated at x={x}, y={y}: s(x)*nu(y)={lhs} > p(x,y)={rhs}")]
    MinorizationViolated { x: f64, y: f64, lhs: f64, rhs: f64 },
    #[error("regeneration time {t} outside the path range [1, {n}]")]
    RegenOutOfRange { t: usize, n: usize },
    #[error("regeneration times must be strictly increasing")]
    RegenNotIncreasing,
    #[error("path length {path_len} does not match the decomposition range 0..={n}")]
    PathMismatch { path_len: usize, n: usize },
    #[error("path csv: {0}")]
    Csv(String),
}

/// Transition mechanism of a built-in model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainModel {
    /// `X_{t+1} = X_t + increment_sd * N(0, 1)`, started at 0.
    GaussianRandomWalk { increment_sd: f64 },
    /// `X_{t+1} = rho * X_t + increment_sd * N(0, 1)`, started at the
    /// stationary law `N(0, increment_sd^2 / (1 - rho^2))`.
    Ar1 { rho: f64, increment_sd: f64 },
    /// Lazy simple random walk on the integers: hold with probability
    /// `hold_prob`, otherwise step to a uniform neighbor. Started at 0.
    LazySrw { hold_prob: f64 },
}

/// Recurrence class of a model, fixed by its transition mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recurrence {
    PositiveRecurrent,
    /// Null recurrent with occupation exponent `beta` in (0, 1).
    BetaNull { beta: f64 },
}

/// A simulable Markov model with known recurrence class, occupation
/// exponent and slowly varying constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    model: ChainModel,
    recurrence: Recurrence,
    slowly_varying: f64,
}

impl ChainSpec {
    pub fn gaussian_random_walk(increment_sd: f64) -> Result<Self, ChainError> {
        if !increment_sd.is_finite() || increment_sd <= 0.0 {
            return Err(ChainError::InvalidIncrementSd);
        }
        Ok(Self {
            model: ChainModel::GaussianRandomWalk { increment_sd },
            recurrence: Recurrence::BetaNull { beta: 0.5 },
            slowly_varying: 1.0,
        })
    }

    pub fn ar1(rho: f64, increment_sd: f64) -> Result<Self, ChainError> {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(ChainError::InvalidRho);
        }
        if !increment_sd.is_finite() || increment_sd <= 0.0 {
            return Err(ChainError::InvalidIncrementSd);
        }
        Ok(Self {
            model: ChainModel::Ar1 { rho, increment_sd },
            recurrence: Recurrence::PositiveRecurrent,
            slowly_varying: 1.0,
        })
    }

    pub fn lazy_srw(hold_prob: f64) -> Result<Self, ChainError> {
        if !hold_prob.is_finite() || !(0.0..1.0).contains(&hold_prob) {
            return Err(ChainError::InvalidHoldProb);
        }
        Ok(Self {
            model: ChainModel::LazySrw { hold_prob },
            recurrence: Recurrence::BetaNull { beta: 0.5 },
            slowly_varying: 1.0,
        })
    }

    /// Replace the slowly varying constant `L` (taken constant; 1 by default).
    pub fn with_slowly_varying(mut self, l: f64) -> Result<Self, ChainError> {
        if !l.is_finite() || l <= 0.0 {
            return Err(ChainError::InvalidSlowlyVarying);
        }
        self.slowly_varying = l;
        Ok(self)
    }

    pub fn model(&self) -> ChainModel {
        self.model
    }

    pub fn recurrence(&self) -> Recurrence {
        self.recurrence
    }

    pub fn slowly_varying(&self) -> f64 {
        self.slowly_varying
    }

    fn initial_state(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.model {
            ChainModel::GaussianRandomWalk { .. } | ChainModel::LazySrw { .. } => 0.0,
            ChainModel::Ar1 { rho, increment_sd } => {
                let stationary_sd = increment_sd / (1.0 - rho * rho).sqrt();
                let z: f64 = rng.sample(StandardNormal);
                stationary_sd * z
            }
        }
    }

    fn step(&self, x: f64, rng: &mut ChaCha8Rng) -> f64 {
        match self.model {
            ChainModel::GaussianRandomWalk { increment_sd } => {
                let z: f64 = rng.sample(StandardNormal);
                x + increment_sd * z
            }
            ChainModel::Ar1 { rho, increment_sd } => {
                let z: f64 = rng.sample(StandardNormal);
                rho * x + increment_sd * z
            }
            ChainModel::LazySrw { hold_prob } => {
                let u: f64 = rng.random();
                if u < hold_prob {
                    x
                } else if u < hold_prob + (1.0 - hold_prob) / 2.0 {
                    x - 1.0
                } else {
                    x + 1.0
                }
            }
        }
    }

    /// Transition density (or probability mass, for the lattice walk) of one
    /// step from `x` to `y`.
    pub(crate) fn transition_density(&self, x: f64, y: f64) -> f64 {
        match self.model {
            ChainModel::GaussianRandomWalk { increment_sd } => normal_pdf(y - x, increment_sd),
            ChainModel::Ar1 { rho, increment_sd } => normal_pdf(y - rho * x, increment_sd),
            ChainModel::LazySrw { hold_prob } => {
                if y == x {
                    hold_prob
                } else if (y - x).abs() == 1.0 {
                    (1.0 - hold_prob) / 2.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Simulate `X_0, ..., X_n`; deterministic given `(self, n, seed)`.
    pub fn simulate(&self, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, &[PATH_STREAM]);
        let mut path = Vec::with_capacity(n + 1);
        path.push(self.initial_state(&mut rng));
        for t in 0..n {
            let next = self.step(path[t], &mut rng);
            path.push(next);
        }
        path
    }

    /// Simulate together with split-chain regeneration times; the path
    /// marginal is identical in law to [`ChainSpec::simulate`] (bit-identical
    /// for the same seed, since the regeneration coins draw from a separate
    /// stream).
    pub fn split_simulate(
        &self,
        minor: &MinorizationSpec,
        n: usize,
        seed: u64,
    ) -> Result<SplitPath, ChainError> {
        minor.validate_for(self)?;
        let mut path_rng = stream_rng(seed, &[PATH_STREAM]);
        let mut coin_rng = stream_rng(seed, &[COIN_STREAM]);
        let mut path = Vec::with_capacity(n + 1);
        path.push(self.initial_state(&mut path_rng));
        let mut regen_times = Vec::new();
        for t in 0..n {
            let x = path[t];
            let y = self.step(x, &mut path_rng);
            path.push(y);
            match minor {
                MinorizationSpec::ExactAtom { state } => {
                    if y == *state {
                        regen_times.push(t + 1);
                    }
                }
                MinorizationSpec::Gaussian { .. } => {
                    let s = minor.s(x);
                    if s > 0.0 {
                        let prob = s * minor.nu_density(y) / self.transition_density(x, y);
                        let u: f64 = coin_rng.random();
                        if u < prob {
                            regen_times.push(t + 1);
                        }
                    }
                }
            }
        }
        Ok(SplitPath { path, regen_times })
    }

    /// Cumulative distribution function on the window of the invariant
    /// measure: `F(y) = pi(C intersect (-inf, y]) / pi(C)`.
    ///
    /// The translation-invariant kernels (random walks) have Lebesgue
    /// invariant measure, so `F` is uniform on the window; the AR(1) model
    /// has its stationary normal law.
    pub fn invariant_cdf(&self, w: &Window<f64>, y: f64) -> f64 {
        match self.model {
            ChainModel::GaussianRandomWalk { .. } | ChainModel::LazySrw { .. } => {
                ((y - w.lower()) / (2.0 * w.delta())).clamp(0.0, 1.0)
            }
            ChainModel::Ar1 { rho, increment_sd } => {
                let stationary_sd = increment_sd / (1.0 - rho * rho).sqrt();
                let cdf = |v: f64| std_normal_cdf(v / stationary_sd);
                let lo = cdf(w.lower());
                let hi = cdf(w.upper());
                let num = (cdf(y.min(w.upper())) - lo).max(0.0);
                (num / (hi - lo)).clamp(0.0, 1.0)
            }
        }
    }

    /// Deterministic proxy for the regeneration count: `n` when positive
    /// recurrent, `n^beta * L` when null recurrent.
    pub fn u_of_n(&self, n: usize) -> f64 {
        match self.recurrence {
            Recurrence::PositiveRecurrent => n as f64,
            Recurrence::BetaNull { beta } => (n as f64).powf(beta) * self.slowly_varying,
        }
    }
}

/// Samples of the normalized occupation time `T_n(C) / u(n)` across
/// independent replications. The limiting scale constant is chain-dependent
/// and unknown, so downstream diagnostics use scale-free moment ratios.
pub fn occupation_ratio_samples(
    spec: &ChainSpec,
    w: &Window<f64>,
    n: usize,
    reps: usize,
    seed: u64,
) -> Vec<f64> {
    use rayon::prelude::*;
    let u = spec.u_of_n(n);
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let path = spec.simulate(n, derive_seed(seed, &[OCCUPATION_STREAM, rep as u64]));
            let tn = path.iter().filter(|&&x| w.contains(x)).count();
            tn as f64 / u
        })
        .collect()
}

/// `m`-th moment of the Mittag-Leffler distribution with index `beta`:
/// `m! / Gamma(1 + m * beta)`.
pub fn mittag_leffler_moment(beta: f64, m: u32) -> f64 {
    debug_assert!(beta > 0.0 && beta <= 1.0);
    let mut factorial = 1.0;
    for k in 2..=m {
        factorial *= k as f64;
    }
    factorial / libm::tgamma(1.0 + m as f64 * beta)
}

/// Write a path as single-column CSV with header `x`; values use shortest
/// round-trip decimal formatting, so reading the file back is exact.
pub fn write_path_csv<W: Write>(path: &[f64], mut out: W) -> io::Result<()> {
    writeln!(out, "x")?;
    for v in path {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Read a path written by [`write_path_csv`].
pub fn read_path_csv<R: BufRead>(input: R) -> Result<Vec<f64>, ChainError> {
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == "x" => {}
        Some((_, Ok(h))) => return Err(ChainError::Csv(format!("expected header 'x', got '{h}'"))),
        Some((_, Err(e))) => return Err(ChainError::Csv(e.to_string())),
        None => return Err(ChainError::Csv("empty file".into())),
    }
    let mut path = Vec::new();
    for (lineno, line) in lines {
        let line = line.map_err(|e| ChainError::Csv(e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: f64 = trimmed
            .parse()
            .map_err(|e| ChainError::Csv(format!("line {}: {e}", lineno + 1)))?;
        path.push(v);
    }
    Ok(path)
}

pub(crate) fn normal_pdf(u: f64, sd: f64) -> f64 {
    let z = u / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}

pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}
