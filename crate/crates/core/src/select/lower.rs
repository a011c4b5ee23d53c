//! Turning a coarse solution of rank `≥ k` into one of rank `< k`.

use crate::error::{Error, Result};
use crate::priority::Priority;
use crate::select::median::MedianSelector;
use crate::select::{CoarseSolution, SelectionStats};
use crate::sequence::EntitySequence;

/// Given `xi` with `r(xi) ≥ k`, returns a value `ξ'` with
/// `k − n ≤ r(ξ') < k` in `O(n)` time.
///
/// Repeatedly takes the median `x̄` of `L(u, 𝒜)`: if `r(x̄) ≥ k` it becomes the
/// new upper value `u`; if `r(x̄) < k − n` the sequences with
/// `L(u, A) ≤ x̄` can no longer reach the window and are dropped, with their
/// ranks taken out of `k`; otherwise `x̄` is returned.
pub fn lower_rank_coarse_solution(
    seqs: &[EntitySequence],
    k: u64,
    xi: &CoarseSolution,
    selector: &mut MedianSelector,
    stats: &mut SelectionStats,
) -> Result<CoarseSolution> {
    if xi.rank < k {
        return Err(Error::Usage(format!(
            "coarse solution already has rank {} < k = {k}",
            xi.rank
        )));
    }
    let n = seqs.len() as u64;
    // Copied only once something is dropped; usually nothing is.
    let mut owned: Option<Vec<EntitySequence>> = None;
    let mut scratch: Vec<Priority> = Vec::with_capacity(seqs.len());
    let mut residual = k;
    let mut upper = xi.value;

    loop {
        let active = owned.as_deref().unwrap_or(seqs);
        if active.is_empty() {
            return Err(Error::Invariant(
                "coarse-solution lowering ran out of sequences".into(),
            ));
        }
        stats.lower_iterations += 1;
        stats.work += active.len() as u64;

        scratch.clear();
        scratch.extend(active.iter().map(|s| s.less(&upper)));
        let pivot = selector.median(&mut scratch)?;
        let rank: u64 = active.iter().map(|s| s.rank(&pivot)).sum();

        if rank >= residual {
            upper = pivot;
        } else if rank + n < residual {
            // L(u, A) > x̄ exactly when A has an element in (x̄, u).
            let mut dropped = 0;
            let kept: Vec<EntitySequence> = active
                .iter()
                .filter(|s| {
                    let keep = s.greater(&pivot) < upper;
                    if !keep {
                        dropped += s.rank(&pivot);
                    }
                    keep
                })
                .copied()
                .collect();
            owned = Some(kept);
            residual -= dropped;
        } else {
            // Dropped sequences have no element in (their pivot, u), so their
            // ranks are unchanged at x̄.
            return Ok(CoarseSolution { value: pivot, rank: rank + (k - residual) });
        }
    }
}
