//! Reference implementations that simulate the sequential awards literally.
//!
//! Both share the exact comparator and the tie order used by the linear
//! backend, so equivalence tests compare algorithms rather than policies.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::api::TiePolicy;
use crate::divisor::DivisorMethod;
use crate::error::{Error, Result};
use crate::priority::Priority;
use crate::select::{common_method, MAX_SEATS};
use crate::sequence::EntitySequence;

/// Outcome of a simulated apportionment: the last awarded inverted priority
/// and the seats per entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub threshold: Priority,
    pub allocation: Vec<u64>,
}

/// Order in which equal inverted priorities are awarded. `ReportOnly`
/// simulates with the default order; the caller decides what to report.
#[inline]
fn tie_order(policy: TiePolicy, a: (u64, usize), b: (u64, usize)) -> Ordering {
    match policy {
        TiePolicy::ByScoreThenInputOrder | TiePolicy::ReportOnly => {
            b.0.cmp(&a.0).then(a.1.cmp(&b.1))
        }
        TiePolicy::InputOrder => a.1.cmp(&b.1),
    }
}

fn check_inputs(scores: &[u64], seats: u64) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::Validation("at least one entity is required".into()));
    }
    if let Some(i) = scores.iter().position(|&v| v == 0) {
        return Err(Error::Validation(format!("entity {i} has score 0")));
    }
    if seats > MAX_SEATS {
        return Err(Error::Capacity(format!("{seats} seats exceed the maximum {MAX_SEATS}")));
    }
    Ok(())
}

/// Awards `seats` one at a time, scanning every entity for the smallest
/// inverted priority `d_s / v`. `O(n·k)`.
pub fn naive_apportion(
    method: DivisorMethod,
    scores: &[u64],
    seats: u64,
    policy: TiePolicy,
) -> Result<Simulation> {
    check_inputs(scores, seats)?;
    let mut allocation = vec![0u64; scores.len()];
    let mut threshold = Priority::NegInfinity;
    for _ in 0..seats {
        let mut best = 0;
        for i in 1..scores.len() {
            let ord = method
                .compare_terms(allocation[i] as u32, scores[i], allocation[best] as u32, scores[best])
                .then_with(|| tie_order(policy, (scores[i], i), (scores[best], best)));
            if ord == Ordering::Less {
                best = i;
            }
        }
        threshold = Priority::element(method, best, scores[best], allocation[best])?;
        allocation[best] += 1;
    }
    Ok(Simulation { threshold, allocation })
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    method: DivisorMethod,
    policy: TiePolicy,
    index: u32,
    score: u64,
    entity: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.method
            .compare_terms(self.index, self.score, other.index, other.score)
            .then_with(|| tie_order(self.policy, (self.score, self.entity), (other.score, other.entity)))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

/// Same contract as [`naive_apportion`], using a priority queue over the
/// entities' next inverted priorities. `O(k log n)`.
pub fn heap_apportion(
    method: DivisorMethod,
    scores: &[u64],
    seats: u64,
    policy: TiePolicy,
) -> Result<Simulation> {
    check_inputs(scores, seats)?;
    let mut allocation = vec![0u64; scores.len()];
    let mut threshold = Priority::NegInfinity;
    if seats == 0 {
        return Ok(Simulation { threshold, allocation });
    }
    let mut heap: BinaryHeap<Reverse<Entry>> = scores
        .iter()
        .enumerate()
        .map(|(entity, &score)| Reverse(Entry { method, policy, index: 0, score, entity }))
        .collect();
    for _ in 0..seats {
        let Some(mut top) = heap.peek_mut() else { unreachable!("heap never shrinks") };
        let e = &mut top.0;
        threshold = Priority::element(method, e.entity, e.score, e.index as u64)?;
        allocation[e.entity] += 1;
        e.index += 1;
    }
    Ok(Simulation { threshold, allocation })
}

/// Value of the `k`-th smallest element of the union of `seqs`, by popping a
/// heap `k` times.
pub fn heap_threshold(seqs: &[EntitySequence], k: u64) -> Result<Priority> {
    let method = common_method(seqs)?;
    let scores: Vec<u64> = seqs.iter().map(|s| s.score()).collect();
    let sim = heap_apportion(method, &scores, k, TiePolicy::InputOrder)?;
    Ok(sim.threshold)
}
