//! From a coarse solution of rank `< k` to the exact `k`-th smallest value.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::priority::Priority;
use crate::select::median::MedianSelector;
use crate::select::{CoarseSolution, SelectionStats};
use crate::sequence::EntitySequence;

#[derive(Debug, Clone, Copy)]
struct Active {
    seq: EntitySequence,
    /// `r(l, A)`
    rank_at_lower: u64,
}

impl Active {
    /// `G(l, A) = A(r(l, A))`, rebuilt on use to keep the entries small.
    #[inline]
    fn next(&self) -> Priority {
        self.seq.get(self.rank_at_lower).unwrap_or(Priority::PosInfinity)
    }
}

#[derive(Debug, Clone, Copy)]
struct Removed {
    seq: EntitySequence,
    rank_at_removal: u64,
}

/// Returns the value of the `k`-th smallest element of the union of `seqs`,
/// starting from `xi` with `r(xi) < k`.
///
/// Keeps a lower bound `l` (rank `< k`) and an upper bound `u` (rank `≥ k`)
/// and splits on the median of `G(l, 𝒜)`. Sequences with nothing left in
/// `(l, u)` are dropped, except one whose next element is exactly `u`; their
/// ranks at `l` come out of `k`, and `m` counts the dropped elements sitting
/// at `u` so that the rank of `u` can still be judged.
///
/// With `check_invariants` the five loop invariants are re-verified against
/// the dropped sequences after every iteration.
pub fn coarse_to_exact(
    seqs: &[EntitySequence],
    k: u64,
    xi: &CoarseSolution,
    selector: &mut MedianSelector,
    check_invariants: bool,
    stats: &mut SelectionStats,
) -> Result<Priority> {
    if k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    if seqs.is_empty() {
        return Err(Error::Usage("no sequences to select from".into()));
    }
    if xi.rank >= k {
        return Err(Error::Usage(format!(
            "coarse solution has rank {} ≥ k = {k}; lower it first",
            xi.rank
        )));
    }

    let mut lower = xi.value;
    let mut upper = Priority::PosInfinity;
    let mut under = 0u64; // m
    let mut residual = k;
    let mut removed_rank_sum = 0u64;
    let mut removed: Vec<Removed> = Vec::new();

    let mut active: Vec<Active> = seqs
        .iter()
        .map(|&seq| {
            let rank_at_lower = seq.rank(&lower);
            Active { seq, rank_at_lower }
        })
        .collect();
    let mut scratch: Vec<Priority> = Vec::with_capacity(active.len());
    let mut ranks: Vec<u64> = Vec::with_capacity(active.len());
    let mut ties: Vec<usize> = Vec::new();
    let max_iterations = 64 + 4 * seqs.len();

    for _ in 0..max_iterations {
        stats.exact_iterations += 1;
        stats.work += active.len() as u64;

        scratch.clear();
        scratch.extend(active.iter().map(Active::next));
        let pivot = selector.median(&mut scratch)?;
        ranks.clear();
        ranks.extend(active.iter().map(|a| a.seq.rank(&pivot)));
        let pivot_rank: u64 = ranks.iter().sum();

        let advance = pivot_rank < residual;
        if advance {
            lower = pivot;
        } else {
            upper = pivot;
            under = 0;
        }

        // One compacting pass: move to the new l, drop sequences with
        // G(l, A) > u and note the positions of those with G(l, A) = u.
        let mut dropped = 0u64;
        let mut discard = |a: &Active| {
            dropped += a.rank_at_lower;
            if check_invariants {
                removed.push(Removed { seq: a.seq, rank_at_removal: a.rank_at_lower });
            }
        };
        ties.clear();
        let mut kept = 0;
        for i in 0..active.len() {
            let mut a = active[i];
            if advance {
                a.rank_at_lower = ranks[i];
            }
            match a.next().cmp(&upper) {
                Ordering::Greater => {
                    discard(&a);
                    continue;
                }
                Ordering::Equal => ties.push(kept),
                Ordering::Less => {}
            }
            active[kept] = a;
            kept += 1;
        }
        active.truncate(kept);

        // Of the sequences with G(l, A) = u only the lowest entity stays.
        if let Some(&keeper) = ties.iter().min_by_key(|&&i| active[i].seq.entity()) {
            under += ties.len() as u64 - 1;
            // Descending, so swap_remove never moves a position still to come.
            for &i in ties.iter().rev().filter(|&&i| i != keeper) {
                discard(&active.swap_remove(i));
            }
        }
        residual = residual.checked_sub(dropped).ok_or_else(|| {
            Error::Invariant("dropped sequences ranked at or above k".into())
        })?;
        removed_rank_sum += dropped;

        if check_invariants {
            stats.invariant_checks += 1;
            check(&active, &removed, &lower, &upper, under, residual, k, removed_rank_sum)?;
        }

        let Some(first) = active.first() else {
            return Err(Error::Invariant("no sequences left".into()));
        };
        let candidate = first.next();
        if active.iter().all(|a| a.next() == candidate) {
            let rank: u64 = active.iter().map(|a| a.seq.rank(&candidate)).sum();
            if rank >= residual || (candidate == upper && rank + under >= residual) {
                return Ok(candidate);
            }
        }
    }
    Err(Error::Invariant(format!(
        "exact selection did not converge within {max_iterations} iterations"
    )))
}

#[allow(clippy::too_many_arguments)]
fn check(
    active: &[Active],
    removed: &[Removed],
    lower: &Priority,
    upper: &Priority,
    under: u64,
    residual: u64,
    k: u64,
    removed_rank_sum: u64,
) -> Result<()> {
    let fail = |what: String| Err(Error::Invariant(what));
    if active.is_empty() {
        return fail("(1) active set is empty".into());
    }
    let lower_rank: u64 = active.iter().map(|a| a.seq.rank(lower)).sum();
    if lower_rank >= residual {
        return fail(format!("(2) r(l, 𝒜) = {lower_rank} is not below k = {residual}"));
    }
    if k != residual + removed_rank_sum {
        return fail(format!(
            "(3) original k = {k} differs from {residual} + {removed_rank_sum}"
        ));
    }
    let tracked: u64 = removed.iter().map(|b| b.rank_at_removal).sum();
    if tracked != removed_rank_sum {
        return fail("(3) removed-rank bookkeeping is inconsistent".into());
    }
    for b in removed {
        // r(x, B) is constant on [l, u) iff r(l, B) is the recorded rank and
        // B has no element strictly between l and u.
        if b.seq.rank(lower) != b.rank_at_removal || b.seq.greater(lower) < *upper {
            return fail(format!(
                "(4) removed entity {} has elements inside [l, u)",
                b.seq.entity()
            ));
        }
    }
    if upper.is_finite() {
        let at_upper: u64 = removed.iter().map(|b| b.seq.rank(upper)).sum();
        if at_upper != under + removed_rank_sum {
            return fail(format!(
                "(5) r(u, removed) = {at_upper} differs from m + Σ = {under} + {removed_rank_sum}"
            ));
        }
    } else if under != 0 {
        return fail("(5) m is nonzero while u is unbounded".into());
    }
    Ok(())
}
