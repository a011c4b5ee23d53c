//! Linear-time median selection.

use std::cmp::Ordering;

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MedianStrategy {
    /// Quickselect with uniformly random pivots: expected linear time.
    #[default]
    Randomized,
    /// Blum–Floyd–Pratt–Rivest–Tarjan: worst-case linear time.
    MedianOfMedians,
}

/// Lists at least this long pick their pivot from a sample.
const SAMPLE_FROM: usize = 1024;

const SMALL: usize = 10;

/// Median selection with a fixed strategy. The randomized strategy draws
/// pivots from a generator seeded at construction, so runs are
/// reproducible.
#[derive(Debug, Clone)]
pub struct MedianSelector {
    strategy: MedianStrategy,
    rng: SmallRng,
}

impl MedianSelector {
    pub fn new(strategy: MedianStrategy) -> Self {
        Self::with_seed(strategy, 0x5EED_0F_A11)
    }

    pub fn with_seed(strategy: MedianStrategy, seed: u64) -> Self {
        MedianSelector { strategy, rng: SmallRng::seed_from_u64(seed) }
    }

    pub fn strategy(&self) -> MedianStrategy {
        self.strategy
    }

    /// Returns the lower median of `values` (the element of sorted position
    /// `(len − 1) / 2`), reordering the slice. At least `⌈len/2⌉` elements
    /// are `≤` the result and at least `⌈len/2⌉` are `≥` it.
    pub fn median_by<T, F>(&mut self, values: &mut [T], mut cmp: F) -> Result<T>
    where
        T: Copy,
        F: FnMut(&T, &T) -> Ordering,
    {
        if values.is_empty() {
            return Err(Error::Usage("median of an empty list".into()));
        }
        let k = (values.len() - 1) / 2;
        Ok(self.nth_by(values, k, &mut cmp))
    }

    pub fn median<T: Copy + Ord>(&mut self, values: &mut [T]) -> Result<T> {
        self.median_by(values, T::cmp)
    }

    /// Element of sorted position `k`.
    pub fn nth_by<T, F>(&mut self, values: &mut [T], k: usize, cmp: &mut F) -> T
    where
        T: Copy,
        F: FnMut(&T, &T) -> Ordering,
    {
        assert!(k < values.len(), "selection index out of bounds");
        match self.strategy {
            MedianStrategy::Randomized => quickselect(values, k, cmp, &mut self.rng),
            MedianStrategy::MedianOfMedians => bfprt(values, k, cmp),
        }
    }
}

fn insertion_sort<T: Copy, F: FnMut(&T, &T) -> Ordering>(v: &mut [T], cmp: &mut F) {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && cmp(&v[j - 1], &v[j]) == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Three-way partition around `pivot`; returns `(lt, gt)` such that
/// `v[..lt] < pivot`, `v[lt..gt] == pivot`, `v[gt..] > pivot`.
fn partition3<T: Copy, F: FnMut(&T, &T) -> Ordering>(
    v: &mut [T],
    pivot: T,
    cmp: &mut F,
) -> (usize, usize) {
    let (mut lt, mut i, mut gt) = (0, 0, v.len());
    while i < gt {
        match cmp(&v[i], &pivot) {
            Ordering::Less => {
                v.swap(lt, i);
                lt += 1;
                i += 1;
            }
            Ordering::Greater => {
                gt -= 1;
                v.swap(i, gt);
            }
            Ordering::Equal => i += 1,
        }
    }
    (lt, gt)
}

fn quickselect<T, F>(mut v: &mut [T], mut k: usize, cmp: &mut F, rng: &mut SmallRng) -> T
where
    T: Copy,
    F: FnMut(&T, &T) -> Ordering,
{
    loop {
        let len = v.len();
        if len <= SMALL {
            insertion_sort(v, cmp);
            return v[k];
        }
        let pivot = if len >= SAMPLE_FROM {
            // Pivot at the matching position of a random sample, which lands
            // close to the target and leaves a short remainder.
            let s = ((len as f64).powf(2.0 / 3.0) as usize).clamp(SMALL, len / 4);
            for i in 0..s {
                let j = rng.gen_range(i..len);
                v.swap(i, j);
            }
            let target = (k as u128 * s as u128 / len as u128) as usize;
            quickselect(&mut v[..s], target, cmp, rng)
        } else {
            v[rng.gen_range(0..len)]
        };
        let (lt, gt) = partition3(v, pivot, cmp);
        if k < lt {
            v = &mut v[..lt];
        } else if k < gt {
            return pivot;
        } else {
            k -= gt;
            v = &mut v[gt..];
        }
    }
}

fn bfprt<T, F>(mut v: &mut [T], mut k: usize, cmp: &mut F) -> T
where
    T: Copy,
    F: FnMut(&T, &T) -> Ordering,
{
    loop {
        if v.len() <= SMALL {
            insertion_sort(v, cmp);
            return v[k];
        }
        // Move the median of every group of five to the front.
        let groups = v.len().div_ceil(5);
        for g in 0..groups {
            let start = g * 5;
            let end = (start + 5).min(v.len());
            insertion_sort(&mut v[start..end], cmp);
            v.swap(g, start + (end - start - 1) / 2);
        }
        let pivot = bfprt(&mut v[..groups], (groups - 1) / 2, cmp);
        let (lt, gt) = partition3(v, pivot, cmp);
        if k < lt {
            v = &mut v[..lt];
        } else if k < gt {
            return pivot;
        } else {
            k -= gt;
            v = &mut v[gt..];
        }
    }
}
