//! Linear-time apportionment under highest-averages (divisor) methods.
//!
//! Awarding `k` seats by a divisor method is the same as finding the `k`-th
//! smallest element `τ` of the union of the entity sequences
//! `A_i = { d_j / v_i : j ≥ 0 }`: every entity receives its elements below
//! `τ`, and the tie policy shares out the rest among the entities holding
//! `τ` exactly. [`select::kth_smallest_threshold`] finds `τ` in `O(n)` time
//! independent of `k`; [`oracle`] holds the `O(nk)` and `O(k log n)`
//! simulations used to check it.
//!
//! ```
//! use apportion_core::{solve, ApportionmentProblem, DivisorMethod};
//!
//! let problem = ApportionmentProblem::from_scores(DivisorMethod::Jefferson, &[7, 5, 3], 5);
//! let result = solve(&problem).unwrap();
//! assert_eq!(result.final_allocation, Some(vec![2, 2, 1]));
//! assert_eq!(result.threshold.unwrap().exact, "2/5");
//! ```

pub mod api;
pub mod divisor;
pub mod error;
pub mod oracle;
pub mod priority;
pub mod select;
pub mod sequence;
mod wide;

pub use api::{
    apply_tie_policy, solve, solve_with, ApportionmentProblem, ApportionmentResult, Backend,
    Entity, Threshold, TieAward, TieClaim, TiePolicy,
};
pub use divisor::{ArithProgression, DivisorKind, DivisorMethod, DivisorValue, MAX_INDEX};
pub use error::{Error, Result};
pub use priority::{compare_priorities, Element, Priority};
pub use select::{
    kth_smallest_threshold, CoarseSolution, MedianStrategy, Selection, SelectionConfig,
    SelectionStats, MAX_SEATS,
};
pub use sequence::{total_rank, EntitySequence, RANK_SATURATED};
