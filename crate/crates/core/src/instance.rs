//! Instance model: the cycle graph, its validation, generators, and the
//! canonical JSON codec.
//!
//! Vertices are ranked `1..=n`. The edge set of a valid instance is exactly
//! the consecutive chain `{k-1, k}` for `2 <= k <= n` plus the closing edge
//! `{1, n}`. For `n == 2` the two coincide and the single edge carries both
//! roles; for `n == 1` the closing edge degenerates to the theoretical
//! self-distance `d(1,1)`.
//!
//! Distances are nonnegative finite doubles. Zero distances are legal
//! (degenerate but realizable); [`ParadoxicalInstance::warnings`] flags them
//! so callers can surface the degeneracy without rejecting the instance.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from instance construction, validation, and parsing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum InstanceError {
    /// Assumption 1 violated: the chain edge `{k-1, k}` is absent.
    #[error("missing consecutive edge {{{prev}, {k}}}", prev = k - 1)]
    MissingConsecutiveEdge { k: usize },
    /// The closing edge `{1, n}` is absent.
    #[error("missing closing edge {{1, {n}}}")]
    MissingClosingEdge { n: usize },
    /// Assumption 2 violated: an edge outside the cycle is present.
    #[error("edge {{{u}, {v}}} does not belong to the cycle")]
    ExtraEdge { u: usize, v: usize },
    /// The same vertex pair appears more than once.
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: usize, v: usize },
    /// A distance is negative.
    #[error("negative weight {weight} on edge {{{u}, {v}}}")]
    NegativeWeight { u: usize, v: usize, weight: f64 },
    /// A distance is NaN or infinite.
    #[error("non-finite weight on edge {{{u}, {v}}}")]
    NonFiniteWeight { u: usize, v: usize },
    /// Vertex count outside the operation's accepted range.
    #[error("invalid vertex count {n} (need n >= {min})")]
    InvalidSize { n: usize, min: usize },
    /// Malformed document: bad JSON or a structural invariant violation.
    /// `locus` is a `line:column` pair or a field name.
    #[error("syntax error at {locus}: {message}")]
    Syntax { locus: String, message: String },
}

/// A cycle instance: `n` vertices, `n - 1` consecutive distances, and one
/// closing distance `d(1, n)`.
///
/// Immutable after construction; all constructors enforce the invariants
/// (`consecutive.len() == n - 1`, all distances finite and nonnegative).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParadoxicalInstance {
    n: usize,
    consecutive: Vec<f64>,
    closing: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl ParadoxicalInstance {
    /// Builds an instance from its fields, checking the invariants.
    pub fn new(n: usize, consecutive: Vec<f64>, closing: f64) -> Result<Self, InstanceError> {
        let inst = Self {
            n,
            consecutive,
            closing,
            label: None,
        };
        inst.check_invariants()?;
        Ok(inst)
    }

    /// Attaches a free-text identifier.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Consecutive distances; entry `k` is `d(k+1, k+2)` in 1-based ranks.
    pub fn consecutive(&self) -> &[f64] {
        &self.consecutive
    }

    /// The closing distance `d(1, n)`.
    pub fn closing(&self) -> f64 {
        self.closing
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Rewrites the closing constraint as one more chain edge to a fictive
    /// vertex `n + 1`, so that feasibility becomes `x_{n+1} = x_1 = 0` and
    /// every edge is treated uniformly by the solvers.
    pub fn augment(&self) -> AugmentedInstance {
        let mut y = self.consecutive.clone();
        y.push(self.closing);
        AugmentedInstance { n: self.n, y }
    }

    /// Non-fatal degeneracies worth surfacing: zero-length consecutive edges.
    pub fn warnings(&self) -> Vec<String> {
        self.consecutive
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == 0.0)
            .map(|(k, _)| format!("consecutive distance d({}, {}) is zero", k + 1, k + 2))
            .collect()
    }

    fn check_invariants(&self) -> Result<(), InstanceError> {
        if self.n == 0 {
            return Err(InstanceError::InvalidSize { n: 0, min: 1 });
        }
        if self.consecutive.len() != self.n - 1 {
            return Err(InstanceError::Syntax {
                locus: "consecutive".into(),
                message: format!(
                    "expected {} consecutive distances for n = {}, got {}",
                    self.n - 1,
                    self.n,
                    self.consecutive.len()
                ),
            });
        }
        for (k, &d) in self.consecutive.iter().enumerate() {
            let (u, v) = (k + 1, k + 2);
            if !d.is_finite() {
                return Err(InstanceError::NonFiniteWeight { u, v });
            }
            if d < 0.0 {
                return Err(InstanceError::NegativeWeight { u, v, weight: d });
            }
        }
        if !self.closing.is_finite() {
            return Err(InstanceError::NonFiniteWeight { u: 1, v: self.n });
        }
        if self.closing < 0.0 {
            return Err(InstanceError::NegativeWeight {
                u: 1,
                v: self.n,
                weight: self.closing,
            });
        }
        Ok(())
    }
}

/// The fictive-vertex form: the distance chain `y` of length `n`, i.e. the
/// `n - 1` consecutive distances followed by the closing distance.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedInstance {
    n: usize,
    y: Vec<f64>,
}

impl AugmentedInstance {
    /// Builds the augmented form directly from a distance chain.
    ///
    /// Useful for driving the solvers on raw chains; `n` is the chain length.
    pub fn from_chain(y: Vec<f64>) -> Result<Self, InstanceError> {
        if y.is_empty() {
            return Err(InstanceError::InvalidSize { n: 0, min: 1 });
        }
        for (k, &d) in y.iter().enumerate() {
            let (u, v) = (k + 1, k + 2);
            if !d.is_finite() {
                return Err(InstanceError::NonFiniteWeight { u, v });
            }
            if d < 0.0 {
                return Err(InstanceError::NegativeWeight { u, v, weight: d });
            }
        }
        Ok(Self { n: y.len(), y })
    }

    /// Original vertex count (equals the chain length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// The distance chain `(d_12, ..., d_{n-1,n}, d_1n)`.
    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Checks that `edges` is exactly the cycle edge set for `n` vertices and
/// maps the weights onto an instance.
///
/// Order-insensitive; duplicates (in either orientation) are rejected. For
/// `n == 2` the single edge `{1, 2}` serves as both the consecutive and the
/// closing distance; for `n == 1` the only admissible edge is the self-loop
/// `{1, 1}` carrying the theoretical closing distance.
pub fn validate(edges: &[(usize, usize, f64)], n: usize) -> Result<ParadoxicalInstance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::InvalidSize { n: 0, min: 1 });
    }
    let mut seen: HashMap<(usize, usize), f64> = HashMap::new();
    for &(u, v, w) in edges {
        if u < 1 || u > n || v < 1 || v > n {
            return Err(InstanceError::ExtraEdge { u, v });
        }
        let key = (u.min(v), u.max(v));
        if key.0 == key.1 && n != 1 {
            return Err(InstanceError::ExtraEdge { u, v });
        }
        if !w.is_finite() {
            return Err(InstanceError::NonFiniteWeight { u, v });
        }
        if w < 0.0 {
            return Err(InstanceError::NegativeWeight { u, v, weight: w });
        }
        if seen.insert(key, w).is_some() {
            return Err(InstanceError::DuplicateEdge { u: key.0, v: key.1 });
        }
    }

    if n == 1 {
        let closing = seen
            .remove(&(1, 1))
            .ok_or(InstanceError::MissingClosingEdge { n: 1 })?;
        if let Some((&(u, v), _)) = seen.iter().next() {
            return Err(InstanceError::ExtraEdge { u, v });
        }
        return ParadoxicalInstance::new(1, Vec::new(), closing);
    }

    let mut consecutive = Vec::with_capacity(n - 1);
    for k in 2..=n {
        match seen.remove(&(k - 1, k)) {
            Some(w) => consecutive.push(w),
            None => return Err(InstanceError::MissingConsecutiveEdge { k }),
        }
    }
    // For n == 2 the closing pair {1, n} is the chain edge just consumed.
    let closing = if n == 2 {
        consecutive[0]
    } else {
        match seen.remove(&(1, n)) {
            Some(w) => w,
            None => return Err(InstanceError::MissingClosingEdge { n }),
        }
    };
    if let Some((&(u, v), _)) = seen.iter().next() {
        return Err(InstanceError::ExtraEdge { u, v });
    }
    ParadoxicalInstance::new(n, consecutive, closing)
}

fn uniform_positive(rng: &mut ChaCha8Rng, dmax: f64) -> f64 {
    // gen::<f64>() is in [0, 1); flip it so draws land in (0, dmax].
    dmax * (1.0 - rng.gen::<f64>())
}

/// Generates a feasible instance: random chain distances, a random sign
/// assignment, and the closing distance read off the resulting endpoint.
///
/// Deterministic for a fixed seed. The output is feasible by construction,
/// bit-exactly: re-walking the chain with the generating signs and closing
/// the cycle against `|x_n|` cancels to exactly zero.
pub fn generate_feasible(n: usize, seed: u64, dmax: f64) -> Result<ParadoxicalInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::InvalidSize { n, min: 2 });
    }
    assert!(dmax > 0.0 && dmax.is_finite(), "dmax must be a positive finite real");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let consecutive: Vec<f64> = (0..n - 1).map(|_| uniform_positive(&mut rng, dmax)).collect();
    let mut x = 0.0_f64;
    for &d in &consecutive {
        let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        x += s * d;
    }
    let inst = ParadoxicalInstance::new(n, consecutive, x.abs())?;
    Ok(inst)
}

/// Generates an unconstrained instance: all `n` distances (closing included)
/// drawn independently from `(0, dmax]`. May well be infeasible.
pub fn generate_random(n: usize, seed: u64, dmax: f64) -> Result<ParadoxicalInstance, InstanceError> {
    if n < 2 {
        return Err(InstanceError::InvalidSize { n, min: 2 });
    }
    assert!(dmax > 0.0 && dmax.is_finite(), "dmax must be a positive finite real");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let consecutive: Vec<f64> = (0..n - 1).map(|_| uniform_positive(&mut rng, dmax)).collect();
    let closing = uniform_positive(&mut rng, dmax);
    ParadoxicalInstance::new(n, consecutive, closing)
}

/// Parses the canonical JSON document
/// `{"n": <int>, "consecutive": [<real>...], "closing": <real>, "label": <optional string>}`.
pub fn parse(text: &str) -> Result<ParadoxicalInstance, InstanceError> {
    let inst: ParadoxicalInstance =
        serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
            locus: format!("{}:{}", e.line(), e.column()),
            message: e.to_string(),
        })?;
    inst.check_invariants()?;
    Ok(inst)
}

/// Serializes to the canonical single-line JSON form.
///
/// Field order is fixed (`n`, `consecutive`, `closing`, then `label` when
/// present) and numbers use the shortest representation that round-trips
/// exactly, so `serialize . parse` is the identity on canonical documents.
pub fn serialize(inst: &ParadoxicalInstance) -> String {
    serde_json::to_string(inst).expect("instance serialization cannot fail")
}
