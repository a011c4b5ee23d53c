//! The implicit increasing sequence `A(j) = d_j / v` of one entity, with
//! constant-time rank and neighbour queries.

use std::cmp::Ordering;

use crate::divisor::{DivisorMethod, MAX_INDEX};
use crate::error::{Error, Result};
use crate::priority::{Element, Priority};

/// Rank reported for values at or above the last representable element
/// `A(MAX_INDEX)`. Any true rank at least this large is clamped to it.
pub const RANK_SATURATED: u64 = MAX_INDEX as u64 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntitySequence {
    entity: usize,
    score: u64,
    method: DivisorMethod,
}

impl EntitySequence {
    pub fn new(method: DivisorMethod, entity: usize, score: u64) -> Result<Self> {
        if score == 0 {
            return Err(Error::Validation(format!(
                "entity {entity} has score 0; scores must be at least 1"
            )));
        }
        Ok(EntitySequence { entity, score, method })
    }

    pub fn entity(&self) -> usize {
        self.entity
    }

    pub fn score(&self) -> u64 {
        self.score
    }

    pub fn method(&self) -> DivisorMethod {
        self.method
    }

    /// `A(j)`, or `None` past [`MAX_INDEX`].
    pub fn get(&self, j: u64) -> Option<Priority> {
        (j <= MAX_INDEX as u64).then(|| Priority::Element(self.at(j as u32)))
    }

    #[inline]
    pub(crate) fn at(&self, j: u32) -> Element {
        Element::new_unchecked(self.method, self.entity, self.score, j)
    }

    /// `A(j) ≤ x`, with every index past the cap treated as above `x`.
    #[inline]
    fn at_most(&self, j: u64, x: &Element) -> bool {
        j <= MAX_INDEX as u64
            && self
                .method
                .compare_terms(j as u32, self.score, x.index(), x.score())
                != Ordering::Greater
    }

    /// Number of elements `≤ x`, saturating at [`RANK_SATURATED`].
    #[inline]
    pub fn rank(&self, x: &Priority) -> u64 {
        match x {
            Priority::NegInfinity => 0,
            Priority::PosInfinity => RANK_SATURATED,
            Priority::Element(e) => self.rank_element(e),
        }
    }

    fn rank_element(&self, x: &Element) -> u64 {
        debug_assert_eq!(self.method, x.method(), "mixed-method rank query");
        let est = self.method.count_at_most_f64(x.hint() * self.score as f64);
        let guess = if est.is_nan() || est <= 0.0 {
            0
        } else if est >= RANK_SATURATED as f64 {
            RANK_SATURATED
        } else {
            est as u64
        };

        // Find the smallest j with A(j) > x, i.e. A(r−1) ≤ x < A(r), by
        // galloping outwards from the estimate and bisecting.
        let (mut lo, mut hi);
        if self.at_most(guess, x) {
            lo = guess + 1;
            hi = RANK_SATURATED;
            let mut step = 1;
            loop {
                let probe = guess.saturating_add(step);
                if probe >= RANK_SATURATED {
                    break;
                }
                if self.at_most(probe, x) {
                    lo = probe + 1;
                    step *= 2;
                } else {
                    hi = probe;
                    break;
                }
            }
        } else {
            hi = guess;
            lo = 0;
            let mut step = 1;
            while hi > 0 {
                let probe = guess.saturating_sub(step);
                if self.at_most(probe, x) {
                    lo = probe + 1;
                    break;
                }
                hi = probe;
                step *= 2;
            }
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.at_most(mid, x) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `G(x, A)`: smallest element strictly greater than `x`.
    #[inline]
    pub fn greater(&self, x: &Priority) -> Priority {
        self.greater_with_rank(x).0
    }

    /// `G(x, A)` together with `r(x, A)`; `G(x, A)` is always `A(r(x, A))`.
    #[inline]
    pub fn greater_with_rank(&self, x: &Priority) -> (Priority, u64) {
        let r = self.rank(x);
        let g = if r <= MAX_INDEX as u64 {
            Priority::Element(self.at(r as u32))
        } else {
            Priority::PosInfinity
        };
        (g, r)
    }

    /// `L(x, A)`: largest element strictly less than `x`, or
    /// [`Priority::NegInfinity`] if there is none.
    ///
    /// Past the index cap this returns `A(MAX_INDEX)`.
    #[inline]
    pub fn less(&self, x: &Priority) -> Priority {
        let r = self.rank(x);
        if r == 0 {
            return Priority::NegInfinity;
        }
        let below = Priority::Element(self.at((r - 1) as u32));
        if below < *x {
            below
        } else if r >= 2 {
            Priority::Element(self.at((r - 2) as u32))
        } else {
            Priority::NegInfinity
        }
    }

    /// `(L(x, A), G(x, A))`.
    pub fn neighbors(&self, x: &Priority) -> (Priority, Priority) {
        (self.less(x), self.greater(x))
    }

    /// Number of elements strictly below `x`, and whether `x` itself is an
    /// element of the sequence.
    pub fn count_below(&self, x: &Priority) -> (u64, bool) {
        let r = self.rank(x);
        if r == 0 {
            return (0, false);
        }
        let last = Priority::Element(self.at((r - 1).min(MAX_INDEX as u64) as u32));
        if last == *x {
            (r - 1, true)
        } else {
            (r, false)
        }
    }
}

/// `r(x, 𝒜)` over a collection of sequences.
pub fn total_rank<'a>(x: &Priority, seqs: impl IntoIterator<Item = &'a EntitySequence>) -> u64 {
    seqs.into_iter().map(|s| s.rank(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use DivisorMethod::*;

    fn seq(m: DivisorMethod, v: u64) -> EntitySequence {
        EntitySequence::new(m, 0, v).unwrap()
    }

    fn el(m: DivisorMethod, v: u64, j: u64) -> Priority {
        Priority::element(m, 9, v, j).unwrap()
    }

    #[test]
    fn rank_examples() {
        let s = seq(SainteLague, 4);
        // 1/4, 3/4 ≤ 1 < 5/4
        assert_eq!(s.rank(&el(SainteLague, 1, 0)), 2);
        assert_eq!(s.rank(&Priority::NEG_INFINITY), 0);
        for m in DivisorMethod::ALL {
            let s = seq(m, 37);
            assert_eq!(s.rank(&s.get(5).unwrap()), 6, "{m}");
        }
    }

    #[test]
    fn neighbor_examples() {
        let s = seq(SainteLague, 4);
        let x = s.get(1).unwrap();
        let (l, g) = s.neighbors(&x);
        assert_eq!(l, s.get(0).unwrap());
        assert_eq!(g, s.get(2).unwrap());
        assert_eq!(l.to_string(), "1/4");
        assert_eq!(g.to_string(), "5/4");

        let tiny = el(SainteLague, 1000, 0);
        let (l, g) = s.neighbors(&tiny);
        assert_eq!(l, Priority::NEG_INFINITY);
        assert_eq!(g, s.get(0).unwrap());
    }

    #[test]
    fn zero_start_counts_zero() {
        let s = seq(Adams, 3);
        assert_eq!(s.rank(&el(Adams, 5, 0)), 1);
        let (l, g) = s.neighbors(&el(Adams, 5, 0));
        assert_eq!(l, Priority::NEG_INFINITY);
        assert_eq!(g, s.get(1).unwrap());
    }

    #[test]
    fn saturation() {
        let s = seq(Jefferson, u64::MAX >> 1);
        let big = el(Jefferson, 1, 1_000_000);
        assert_eq!(s.rank(&big), RANK_SATURATED);
        assert_eq!(s.rank(&Priority::POS_INFINITY), RANK_SATURATED);
        assert_eq!(s.greater(&big), Priority::POS_INFINITY);
    }

    #[test]
    fn count_below_detects_membership() {
        let s = seq(Jefferson, 4);
        assert_eq!(s.count_below(&el(Jefferson, 2, 0)), (1, true)); // 1/2 = 2/4
        assert_eq!(s.count_below(&el(Jefferson, 3, 0)), (1, false)); // 1/4 < 1/3 < 2/4
        assert_eq!(s.count_below(&Priority::NEG_INFINITY), (0, false));
    }

    #[test]
    fn power_of_two_far_indices() {
        let s = seq(PowerOfTwo, 3);
        let x = el(PowerOfTwo, 5, 5000);
        // 2^j / 3 ≤ 2^5000 / 5  ⇔  2^j ≤ 0.6·2^5000  ⇔  j ≤ 4999
        assert_eq!(s.rank(&x), 5000);
    }
}
