//! Depth-first enumeration of the binary realization tree.
//!
//! The first vertex is anchored at the origin and each later vertex sits at
//! `x_k = x_{k-1} +- d_{k-1,k}`. On the augmented chain every edge is a
//! branching edge, so the tree has `2^n` leaves and a leaf solves the
//! instance exactly when the fictive closing vertex lands back on the
//! origin. Nothing before the last layer can be pruned on these instances,
//! so the walk is a plain full traversal with an explicit sign stack and
//! O(n) memory; the tree itself is never materialized.

use thiserror::Error;

use crate::instance::AugmentedInstance;
use crate::mvm;
use crate::ENUMERATION_CAP;

/// Errors from the tree enumeration.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BpError {
    /// The chain is longer than the enumeration cap.
    #[error("size {n} exceeds the enumeration cap {cap}")]
    SizeLimit { n: usize, cap: usize },
    /// Layer index outside `1..=n+1`.
    #[error("layer {k} out of range 1..={max}")]
    LayerOutOfRange { k: usize, max: usize },
}

/// One leaf of the realization tree: the sign choices down the branch and
/// the vertex positions they produce.
///
/// `positions[0]` is always `0` (the anchored first vertex) and each later
/// entry satisfies `positions[k] == positions[k-1] + signs[k-1] * y[k-1]`.
/// `scale` is `1` unless the distances were normalized upstream, in which
/// case true positions are `scale * positions[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub signs: Vec<i8>,
    pub positions: Vec<f64>,
    pub scale: f64,
}

impl Realization {
    /// Walks the branching recurrence for the given signs over `y`.
    pub fn from_signs(signs: &[i8], y: &[f64]) -> Self {
        debug_assert_eq!(signs.len(), y.len());
        let mut positions = Vec::with_capacity(y.len() + 1);
        let mut x = 0.0_f64;
        positions.push(x);
        for (&s, &d) in signs.iter().zip(y.iter()) {
            x += f64::from(s) * d;
            positions.push(x);
        }
        Self { signs: signs.to_vec(), positions, scale: 1.0 }
    }

    /// Distance of the closing vertex from the origin.
    pub fn closure_residual(&self) -> f64 {
        self.positions.last().copied().unwrap_or(0.0).abs()
    }

    /// Recomputes the recurrence and compares bit-for-bit.
    pub fn satisfies_recurrence(&self, y: &[f64]) -> bool {
        if self.signs.len() != y.len() || self.positions.len() != y.len() + 1 {
            return false;
        }
        let recomputed = Self::from_signs(&self.signs, y);
        self.positions
            .iter()
            .zip(recomputed.positions.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    /// The mirror-image realization with every sign negated.
    pub fn flipped(&self, y: &[f64]) -> Self {
        let signs: Vec<i8> = self.signs.iter().map(|s| -s).collect();
        let mut out = Self::from_signs(&signs, y);
        out.scale = self.scale;
        out
    }
}

/// Enumerates all `2^n` leaves and returns the realizations whose closing
/// vertex lies within `eps` of the origin, ordered by the row encoding of
/// their sign vectors. An empty result means the instance is infeasible at
/// tolerance `eps`.
pub fn solve_bp(aug: &AugmentedInstance, eps: f64) -> Result<Vec<Realization>, BpError> {
    assert!(eps >= 0.0, "tolerance must be nonnegative");
    let n = aug.n();
    if n > ENUMERATION_CAP {
        return Err(BpError::SizeLimit { n, cap: ENUMERATION_CAP });
    }
    let mut out = Vec::new();
    let mut signs = Vec::with_capacity(n);
    descend(aug.y(), 0.0, &mut signs, eps, &mut out);
    out.sort_by_key(|r| mvm::encode_signs(&r.signs).expect("solver emits valid signs"));
    Ok(out)
}

fn descend(y: &[f64], x: f64, signs: &mut Vec<i8>, eps: f64, out: &mut Vec<Realization>) {
    let depth = signs.len();
    if depth == y.len() {
        if x.abs() <= eps {
            out.push(Realization::from_signs(signs, y));
        }
        return;
    }
    for s in [-1i8, 1] {
        signs.push(s);
        descend(y, x + f64::from(s) * y[depth], signs, eps, out);
        signs.pop();
    }
}

/// The multiset of all `2^(k-1)` candidate positions for vertex `k`
/// (duplicates retained), i.e. the projection of tree layer `k` onto one
/// axis. Layer 1 is the anchored root `{0}`.
pub fn enumerate_layer(aug: &AugmentedInstance, k: usize) -> Result<Vec<f64>, BpError> {
    let n = aug.n();
    if k < 1 || k > n + 1 {
        return Err(BpError::LayerOutOfRange { k, max: n + 1 });
    }
    let depth = k - 1;
    if depth > ENUMERATION_CAP {
        return Err(BpError::SizeLimit { n: depth, cap: ENUMERATION_CAP });
    }
    let y = &aug.y()[..depth];
    let mut out = Vec::with_capacity(1usize << depth);
    for prefix in 0..(1u64 << depth) {
        let mut x = 0.0_f64;
        for (j, &d) in y.iter().enumerate() {
            if (prefix >> j) & 1 == 1 {
                x += d;
            } else {
                x -= d;
            }
        }
        out.push(x);
    }
    Ok(out)
}
