//! Decomposition of a path into regeneration blocks.
//!
//! Regeneration times `tau(1) < tau(2) < ...` split the index range
//! `[0, n]` into the initial block `[0, tau(1)]`, the complete blocks
//! `[tau(j) + 1, tau(j + 1)]` (independent and identically distributed),
//! and the tail `[tau_last + 1, n]`. The block count `T(n)` is the number
//! of complete blocks: one less than the number of observed regenerations.

use std::ops::RangeInclusive;

use super::ChainError;
use crate::window::Window;

/// Partition of `[0, n]` induced by regeneration times.
#[derive(Debug, Clone, PartialEq)]
pub struct RegenerationDecomposition {
    n: usize,
    regen_times: Vec<usize>,
    initial: RangeInclusive<usize>,
    complete_blocks: Vec<RangeInclusive<usize>>,
    tail: RangeInclusive<usize>,
}

impl RegenerationDecomposition {
    /// Path length index bound `n` (the path has `n + 1` entries).
    pub fn path_n(&self) -> usize {
        self.n
    }

    pub fn regen_times(&self) -> &[usize] {
        &self.regen_times
    }

    /// Number of complete blocks, `T(n)`.
    pub fn block_count(&self) -> usize {
        self.complete_blocks.len()
    }

    /// `[0, tau(1)]`, or all of `[0, n]` when no regeneration was observed.
    pub fn initial(&self) -> RangeInclusive<usize> {
        self.initial.clone()
    }

    /// The i.i.d. complete blocks `[tau(j) + 1, tau(j + 1)]`.
    pub fn complete_blocks(&self) -> &[RangeInclusive<usize>] {
        &self.complete_blocks
    }

    /// `[tau_last + 1, n]`; empty when the last regeneration is at `n`.
    pub fn tail(&self) -> RangeInclusive<usize> {
        self.tail.clone()
    }
}

/// Split `[0, n]` at the given regeneration times.
pub fn decompose_blocks(
    n: usize,
    regen_times: &[usize],
) -> Result<RegenerationDecomposition, ChainError> {
    if !regen_times.windows(2).all(|w| w[0] < w[1]) {
        return Err(ChainError::RegenNotIncreasing);
    }
    for &t in regen_times {
        if t < 1 || t > n {
            return Err(ChainError::RegenOutOfRange { t, n });
        }
    }
    let empty = n + 1..=n;
    let (initial, complete_blocks, tail) = match regen_times {
        [] => (0..=n, Vec::new(), empty),
        [times @ ..] => {
            let first = times[0];
            let last = *times.last().unwrap();
            let blocks: Vec<_> = times.windows(2).map(|w| w[0] + 1..=w[1]).collect();
            let tail = if last == n { empty } else { last + 1..=n };
            (0..=first, blocks, tail)
        }
    };
    Ok(RegenerationDecomposition {
        n,
        regen_times: regen_times.to_vec(),
        initial,
        complete_blocks,
        tail,
    })
}

/// Occupation counts of the window per complete block: how many indices `t`
/// of each block have `path[t]` inside the window.
pub fn block_occupation(
    decomp: &RegenerationDecomposition,
    path: &[f64],
    w: &Window<f64>,
) -> Result<Vec<usize>, ChainError> {
    if path.len() != decomp.n + 1 {
        return Err(ChainError::PathMismatch {
            path_len: path.len(),
            n: decomp.n,
        });
    }
    Ok(decomp
        .complete_blocks
        .iter()
        .map(|block| block.clone().filter(|&t| w.contains(path[t])).count())
        .collect())
}
