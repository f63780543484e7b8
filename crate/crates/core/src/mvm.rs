//! Implicit sign-matrix reformulation of the cycle feasibility test.
//!
//! Every candidate sign assignment for the branching recurrence is a row of
//! an implicit `2^n x n` matrix `M` over `{-1, +1}`. Row `i` (1-based)
//! encodes sign `s_j` as bit `j-1` of `i-1`, bit 0 mapping to `-1` and bit 1
//! to `+1`; equivalently, the entry is `-1` exactly when the integer quotient
//! `(i-1) / 2^(j-1)` is even. Each entry depends only on its own indices, so
//! any row range of `M` can be produced without materializing the rest.
//!
//! The product `r = M y` collects the reachable positions of the
//! cycle-closing vertex; the instance is feasible exactly when `r` has a
//! null component. Rows are streamed, never stored: even at the size cap the
//! scan is a single pass.
//!
//! Per-row summation is left-to-right over the columns in every code path,
//! so row values compare bit-for-bit with the depth-first solver and with
//! the simulated optical accumulation.

use thiserror::Error;

use crate::bp::Realization;
use crate::instance::AugmentedInstance;
use crate::ENUMERATION_CAP;

/// Errors from the sign-matrix engine.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MvmError {
    /// A row or column index is outside the matrix extent.
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u64, max: u64 },
    /// The distance chain is empty.
    #[error("distance chain must contain at least one entry")]
    SizeMismatch,
    /// A sign vector entry is neither `-1` nor `+1`.
    #[error("bad sign {value} at position {index} (want -1 or +1)")]
    BadSign { index: usize, value: i8 },
    /// The chain is longer than the enumeration cap.
    #[error("size {n} exceeds the enumeration cap {cap}")]
    SizeLimit { n: usize, cap: usize },
}

/// Shape of the implicit sign matrix for a chain of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignMatrixSpec {
    n: usize,
}

impl SignMatrixSpec {
    pub fn new(n: usize) -> Result<Self, MvmError> {
        if n == 0 {
            return Err(MvmError::SizeMismatch);
        }
        if n > ENUMERATION_CAP {
            return Err(MvmError::SizeLimit { n, cap: ENUMERATION_CAP });
        }
        Ok(Self { n })
    }

    /// Column count (the chain length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row count, `2^n`.
    pub fn row_count(&self) -> u64 {
        1u64 << self.n
    }

    fn check_row(&self, i: u64) -> Result<(), MvmError> {
        if i < 1 || i > self.row_count() {
            return Err(MvmError::IndexOutOfRange { index: i, max: self.row_count() });
        }
        Ok(())
    }
}

/// A contiguous slice of `r = M y` over the 1-based inclusive row range
/// `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultVector {
    pub values: Vec<f64>,
    pub lo: u64,
    pub hi: u64,
}

impl ResultVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[inline]
pub(crate) fn sign_bit(row0: u64, col0: usize) -> i8 {
    if (row0 >> col0) & 1 == 1 {
        1
    } else {
        -1
    }
}

#[inline]
fn row_value(y: &[f64], row0: u64) -> f64 {
    let mut acc = 0.0_f64;
    for (j, &d) in y.iter().enumerate() {
        if (row0 >> j) & 1 == 1 {
            acc += d;
        } else {
            acc -= d;
        }
    }
    acc
}

/// The matrix entry `M[i][j]` for a chain of length `n`; `-1` when the
/// integer quotient `(i-1) / 2^(j-1)` is even, `+1` otherwise.
pub fn matrix_element(i: u64, j: usize, n: usize) -> Result<i8, MvmError> {
    let spec = SignMatrixSpec::new(n)?;
    spec.check_row(i)?;
    if j < 1 || j > n {
        return Err(MvmError::IndexOutOfRange { index: j as u64, max: n as u64 });
    }
    Ok(sign_bit(i - 1, j - 1))
}

/// The sign vector encoded by row `i`.
pub fn decode_row(i: u64, n: usize) -> Result<Vec<i8>, MvmError> {
    let spec = SignMatrixSpec::new(n)?;
    spec.check_row(i)?;
    Ok((0..n).map(|j| sign_bit(i - 1, j)).collect())
}

/// The row index whose decoding is `signs`; inverse of [`decode_row`].
pub fn encode_signs(signs: &[i8]) -> Result<u64, MvmError> {
    if signs.len() > ENUMERATION_CAP {
        return Err(MvmError::SizeLimit { n: signs.len(), cap: ENUMERATION_CAP });
    }
    let mut row0 = 0u64;
    for (j, &s) in signs.iter().enumerate() {
        match s {
            1 => row0 |= 1 << j,
            -1 => {}
            other => return Err(MvmError::BadSign { index: j, value: other }),
        }
    }
    Ok(row0 + 1)
}

fn chain_spec(y: &[f64]) -> Result<SignMatrixSpec, MvmError> {
    SignMatrixSpec::new(y.len())
}

/// The slice of `r = M y` over rows `[lo, hi]`, computed row by row.
///
/// Any tiling of `[1, 2^n]` concatenates to the full product exactly: each
/// row value is independent and summed in the same fixed order.
pub fn multiply(y: &[f64], lo: u64, hi: u64) -> Result<ResultVector, MvmError> {
    let spec = chain_spec(y)?;
    spec.check_row(lo)?;
    spec.check_row(hi)?;
    if lo > hi {
        return Err(MvmError::IndexOutOfRange { index: hi, max: spec.row_count() });
    }
    let values = (lo..=hi).map(|i| row_value(y, i - 1)).collect();
    Ok(ResultVector { values, lo, hi })
}

/// Ascending row indices `i` with `|r_i| <= eps`; empty exactly when the
/// instance is infeasible at tolerance `eps`.
pub fn feasible_rows(y: &[f64], eps: f64) -> Result<Vec<u64>, MvmError> {
    feasible_rows_threaded(y, eps, 1)
}

/// [`feasible_rows`] over `threads` disjoint row ranges scanned in parallel.
///
/// Row values are independent, so the chunked scan returns exactly the
/// single-threaded result; chunks are reassembled in ascending row order.
pub fn feasible_rows_threaded(y: &[f64], eps: f64, threads: usize) -> Result<Vec<u64>, MvmError> {
    assert!(eps >= 0.0, "tolerance must be nonnegative");
    let spec = chain_spec(y)?;
    let rows = spec.row_count();
    let workers = threads.max(1).min(rows as usize) as u64;
    if workers == 1 {
        let mut out = Vec::new();
        for row0 in 0..rows {
            if row_value(y, row0).abs() <= eps {
                out.push(row0 + 1);
            }
        }
        return Ok(out);
    }
    let chunk = rows.div_ceil(workers);
    let mut parts: Vec<Vec<u64>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let start = w * chunk;
                let end = ((w + 1) * chunk).min(rows);
                scope.spawn(move || {
                    let mut hits = Vec::new();
                    for row0 in start..end {
                        if row_value(y, row0).abs() <= eps {
                            hits.push(row0 + 1);
                        }
                    }
                    hits
                })
            })
            .collect();
        parts = handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect();
    });
    Ok(parts.concat())
}

/// Rebuilds the full realization for row `i` by walking the branching
/// recurrence with the decoded signs.
///
/// The final position equals the row value from [`multiply`] bit-for-bit,
/// because both accumulate the chain left-to-right.
pub fn reconstruct_solution(i: u64, aug: &AugmentedInstance) -> Result<Realization, MvmError> {
    let signs = decode_row(i, aug.n())?;
    Ok(Realization::from_signs(&signs, aug.y()))
}
