//! Linear-time selection of the `k`-th smallest element of the union of the
//! entities' inverted-priority sequences.
//!
//! The pipeline is: a coarse solution `ξ` whose rank is within `O(n)` of `k`
//! (from the arithmetic approximation of the divisor sequence, or the
//! smallest first element when `k ≤ n`), lowered below `k` if needed, then
//! refined to the exact value.

pub mod contributing;
pub mod exact;
pub mod lower;
pub mod median;

use serde::{Deserialize, Serialize};

use crate::divisor::{DivisorMethod, MAX_INDEX};
use crate::error::{Error, Result};
use crate::oracle;
use crate::priority::Priority;
use crate::sequence::EntitySequence;

pub use contributing::{find_contributing_sequences, ArithApproxSequence, Contributing};
pub use exact::coarse_to_exact;
pub use lower::lower_rank_coarse_solution;
pub use median::{MedianSelector, MedianStrategy};

/// Largest supported seat count. Keeps every rank that the algorithms
/// subtract from `k` below the index cap.
pub const MAX_SEATS: u64 = 1 << 30;

/// Default bound `C` in `|r(ξ) − k| ≤ C·n` for accepting a floating-point
/// coarse solution.
pub const DEFAULT_COARSE_SLACK: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionConfig {
    pub median: MedianStrategy,
    /// Re-verify the coarse-to-exact loop invariants after every iteration and
    /// fail instead of falling back when anything is off.
    pub check_invariants: bool,
    pub coarse_slack: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            median: MedianStrategy::Randomized,
            check_invariants: cfg!(debug_assertions),
            coarse_slack: DEFAULT_COARSE_SLACK,
        }
    }
}

/// A value with its exact rank over the full sequence set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoarseSolution {
    pub value: Priority,
    pub rank: u64,
}

impl CoarseSolution {
    pub fn evaluate(value: Priority, seqs: &[EntitySequence]) -> Self {
        let rank = seqs.iter().map(|s| s.rank(&value)).sum();
        CoarseSolution { value, rank }
    }

    /// Evaluates and checks `|rank − k| ≤ slack · n`.
    pub fn validated(value: Priority, seqs: &[EntitySequence], k: u64, slack: u64) -> Result<Self> {
        let c = Self::evaluate(value, seqs);
        let bound = slack.saturating_mul(seqs.len() as u64);
        if c.rank.abs_diff(k) > bound {
            return Err(Error::Invariant(format!(
                "coarse solution {value} has rank {} but k = {k} (allowed distance {bound})",
                c.rank
            )));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionStats {
    /// Σ|𝒜| over all iterations of both refinement loops.
    pub work: u64,
    pub lower_iterations: u64,
    pub exact_iterations: u64,
    pub invariant_checks: u64,
    /// Rank of the coarse solution before refinement.
    pub coarse_rank: Option<u64>,
    /// Set when the linear path was abandoned for the heap backend.
    pub fallback: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Selection {
    pub threshold: Priority,
    pub stats: SelectionStats,
}

/// A floating-point coarse value, in the domain its approximation lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoarseValue {
    Linear(f64),
    /// `log2` of the value.
    Log2(f64),
}

/// Checks that `seqs` is a nonempty set of one method with distinct
/// entities' sequences; returns the method.
pub(crate) fn common_method(seqs: &[EntitySequence]) -> Result<DivisorMethod> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::Usage("at least one sequence is required".into()))?;
    let method = first.method();
    if seqs.iter().any(|s| s.method() != method) {
        return Err(Error::Usage("all sequences must share one divisor method".into()));
    }
    Ok(method)
}

/// Floating-point coarse solution `s⁻¹(k)` from the method's approximating
/// progression (or the `log2` domain for powers of two).
pub fn approximate_coarse_value(
    seqs: &[EntitySequence],
    k: u64,
    selector: &mut MedianSelector,
) -> Result<CoarseValue> {
    let method = common_method(seqs)?;
    match method.approx_progression() {
        Some(p) => {
            // Lines overflow monotonically in the score: checking the largest
            // one covers them all.
            let largest = seqs.iter().map(|s| s.score()).max().expect("nonempty");
            ArithApproxSequence::from_progression(&p, 0, largest)?;
            let line = |i: usize| {
                let s = &seqs[i];
                ArithApproxSequence::from_progression(&p, s.entity(), s.score())
                    .expect("checked against the largest score")
            };
            let c = contributing::find_contributing(seqs.len(), line, k, selector)?;
            Ok(CoarseValue::Linear(c.inverse_approx_rank(k)?))
        }
        None => {
            let line = |i: usize| contributing::LogLine { start: -(seqs[i].score() as f64).log2() };
            let c = contributing::find_contributing(seqs.len(), line, k, selector)?;
            Ok(CoarseValue::Log2(c.inverse_approx_rank(k)?))
        }
    }
}

/// Largest element, over all sequences, whose floating-point estimate is at
/// most the coarse value; `−∞` if there is none.
pub fn snap_to_element(seqs: &[EntitySequence], coarse: CoarseValue) -> Priority {
    let mut best = Priority::NegInfinity;
    for s in seqs {
        let count = match coarse {
            CoarseValue::Linear(x) => s.method().count_at_most_f64(x * s.score() as f64),
            CoarseValue::Log2(e) => {
                let t = e + (s.score() as f64).log2();
                if t >= 0.0 {
                    t.floor() + 1.0
                } else {
                    0.0
                }
            }
        };
        if !(count >= 1.0) {
            continue;
        }
        let j = (count - 1.0).min(MAX_INDEX as f64) as u64;
        let candidate = s.get(j).expect("index within cap");
        if candidate > best {
            best = candidate;
        }
    }
    best
}

/// The coarse solution the pipeline starts from, before validation.
pub fn initial_coarse_value(
    seqs: &[EntitySequence],
    k: u64,
    selector: &mut MedianSelector,
) -> Result<Priority> {
    if k <= seqs.len() as u64 {
        // The smallest first element: only first elements can be ≤ it, so its
        // rank lies in [1, n].
        Ok(seqs
            .iter()
            .map(|s| s.get(0).expect("index 0"))
            .min()
            .expect("nonempty"))
    } else {
        let coarse = approximate_coarse_value(seqs, k, selector)?;
        Ok(snap_to_element(seqs, coarse))
    }
}

/// The exact value of the `k`-th smallest element of the union of `seqs`, in
/// `O(n)` time.
///
/// Falls back to the heap backend (recording why in the stats) if the
/// floating-point coarse solution fails validation or a refinement loop
/// breaks down; with `check_invariants` set, such failures are returned as
/// errors instead.
pub fn kth_smallest_threshold(
    seqs: &[EntitySequence],
    k: u64,
    config: &SelectionConfig,
) -> Result<Selection> {
    common_method(seqs)?;
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if k > MAX_SEATS {
        return Err(Error::Capacity(format!("k = {k} exceeds the supported maximum {MAX_SEATS}")));
    }
    let mut stats = SelectionStats::default();
    match linear_threshold(seqs, k, config, &mut stats) {
        Ok(threshold) => Ok(Selection { threshold, stats }),
        Err(e) if config.check_invariants => Err(e),
        Err(e @ (Error::Invariant(_) | Error::Capacity(_))) => {
            stats.fallback = Some(e.to_string());
            let threshold = oracle::heap_threshold(seqs, k)?;
            Ok(Selection { threshold, stats })
        }
        Err(e) => Err(e),
    }
}

fn linear_threshold(
    seqs: &[EntitySequence],
    k: u64,
    config: &SelectionConfig,
    stats: &mut SelectionStats,
) -> Result<Priority> {
    let mut selector = MedianSelector::new(config.median);
    let start = initial_coarse_value(seqs, k, &mut selector)?;
    let mut coarse = CoarseSolution::validated(start, seqs, k, config.coarse_slack)?;
    stats.coarse_rank = Some(coarse.rank);
    if coarse.rank >= k {
        coarse = lower_rank_coarse_solution(seqs, k, &coarse, &mut selector, stats)?;
    }
    coarse_to_exact(seqs, k, &coarse, &mut selector, config.check_invariants, stats)
}
