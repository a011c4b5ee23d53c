//! Coarse solutions from arithmetic approximations of the sequences.
//!
//! For arithmetic sequences `A(j) = x_A + y_A·j` the rank function is
//! approximated by the continuous, piecewise linear
//! `s(x) = Σ_{x_A ≤ x} (x − x_A) / y_A`. A sequence is *contributing* for `k`
//! when `s(x_A) ≤ k`; on the contributing set `s` is a single linear function
//! whose inverse at `k` lies within `n` ranks of the `k`-th smallest element.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};

use crate::divisor::ArithProgression;
use crate::error::{Error, Result};
use crate::select::median::MedianSelector;

/// `A(j) = start + step·j` with `step > 0`, approximating the sequence of
/// `entity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithApproxSequence {
    start: Ratio<i64>,
    step: Ratio<i64>,
    entity: usize,
}

impl ArithApproxSequence {
    pub fn new(start: Ratio<i64>, step: Ratio<i64>, entity: usize) -> Result<Self> {
        if step <= Ratio::from_integer(0) {
            return Err(Error::Usage("arithmetic approximation needs a positive step".into()));
        }
        Ok(ArithApproxSequence { start, step, entity })
    }

    /// `x_A = e_0 / v`, `y_A = Δ / v`.
    pub fn from_progression(p: &ArithProgression, entity: usize, score: u64) -> Result<Self> {
        let overflow = || Error::Capacity(format!("score {score} too large for exact approximation"));
        let v = i64::try_from(score).map_err(|_| overflow())?;
        // Left unreduced: every use either cross-multiplies or converts.
        let over = |r: Ratio<i64>| {
            r.denom()
                .checked_mul(v)
                .map(|d| Ratio::new_raw(*r.numer(), d))
                .ok_or_else(overflow)
        };
        Self::new(over(p.start)?, over(p.step)?, entity)
    }

    pub fn start(&self) -> Ratio<i64> {
        self.start
    }

    pub fn step(&self) -> Ratio<i64> {
        self.step
    }

    pub fn entity(&self) -> usize {
        self.entity
    }
}

fn to_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn big(r: &Ratio<i64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// A line `x_A + y_A·j` as seen by the contributing-set search.
pub(crate) trait ApproxLine {
    fn cmp_start(&self, other: &Self) -> Ordering;
    fn start_f64(&self) -> f64;
    fn inv_step_f64(&self) -> f64;
    /// Exact `(at.x − x_A) / y_A`, when the line has exact coordinates.
    fn exact_excess(&self, at: &Self) -> Option<BigRational>;
}

impl ApproxLine for ArithApproxSequence {
    #[inline]
    fn cmp_start(&self, other: &Self) -> Ordering {
        let (a, b) = (*self.start.numer() as i128, *self.start.denom() as i128);
        let (c, d) = (*other.start.numer() as i128, *other.start.denom() as i128);
        (a * d).cmp(&(c * b))
    }

    #[inline]
    fn start_f64(&self) -> f64 {
        to_f64(&self.start)
    }

    #[inline]
    fn inv_step_f64(&self) -> f64 {
        *self.step.denom() as f64 / *self.step.numer() as f64
    }

    fn exact_excess(&self, at: &Self) -> Option<BigRational> {
        Some((big(&at.start) - big(&self.start)) / big(&self.step))
    }
}

/// Line in the `log2` domain: `log2 A(j) = −log2 v + j` for `A(j) = 2^j / v`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogLine {
    pub start: f64,
}

impl ApproxLine for LogLine {
    fn cmp_start(&self, other: &Self) -> Ordering {
        self.start.total_cmp(&other.start)
    }

    fn start_f64(&self) -> f64 {
        self.start
    }

    fn inv_step_f64(&self) -> f64 {
        1.0
    }

    fn exact_excess(&self, _at: &Self) -> Option<BigRational> {
        None
    }
}

/// The contributing subset together with the two coefficients of
/// `s(·, C) = x·Σ 1/y_A − Σ x_A/y_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contributing {
    /// Indices into the input slice, ascending.
    pub members: Vec<usize>,
    pub inv_step_sum: f64,
    pub weighted_start_sum: f64,
}

impl Contributing {
    /// `s⁻¹(k) = (k + Σ x_A/y_A) / Σ 1/y_A`, in floating point.
    pub fn inverse_approx_rank(&self, k: u64) -> Result<f64> {
        if self.members.is_empty() {
            return Err(Error::Usage("no contributing sequences to invert".into()));
        }
        Ok((k as f64 + self.weighted_start_sum) / self.inv_step_sum)
    }
}

/// Every sequence `A` with `s(x_A) ≤ k`, in time linear in the number of
/// sequences.
pub fn find_contributing_sequences(
    seqs: &[ArithApproxSequence],
    k: u64,
    selector: &mut MedianSelector,
) -> Result<Contributing> {
    find_contributing(seqs.len(), |i| seqs[i], k, selector)
}

/// [`find_contributing_sequences`] over `n` lines produced on demand by
/// `line`, so that large inputs need not be materialized.
pub(crate) fn find_contributing<L, F>(
    n: usize,
    line: F,
    k: u64,
    selector: &mut MedianSelector,
) -> Result<Contributing>
where
    L: ApproxLine,
    F: Fn(usize) -> L,
{
    let mut active: Vec<Entry> = (0..n)
        .map(|index| {
            let l = line(index);
            Entry { start: l.start_f64(), inv_step: l.inv_step_f64(), index }
        })
        .collect();
    let mut starts: Vec<f64> = Vec::with_capacity(n);
    let mut members = Vec::new();
    let (mut w, mut u) = (0.0f64, 0.0f64);
    let k_f = k as f64;

    while !active.is_empty() {
        // The pivot is a line whose float start is the median float start;
        // everything after this compares exactly against that line.
        starts.clear();
        starts.extend(active.iter().map(|e| e.start));
        let x = selector.median_by(&mut starts, f64::total_cmp)?;
        let pivot = *active.iter().find(|e| e.start.total_cmp(&x).is_eq()).expect("median is present");
        let cmp = |e: &Entry| cmp_to_pivot(&line, e, &pivot);

        // s(x̄) over everything: the linear part for C, plus the active
        // sequences starting at or below x̄. Removed non-contributing
        // sequences all start above every later x̄.
        let mut s = x * w - u;
        let mut scale = (x * w).abs() + u.abs();
        for e in &active {
            if cmp(e) != Ordering::Greater {
                let t = ((x - e.start) * e.inv_step).max(0.0);
                s += t;
                scale += t;
            }
        }
        let exceeds = if (s - k_f).abs() > 1e-9 * scale.max(1.0) {
            s > k_f
        } else {
            exact_exceeds(&line, &members, &active, &line(pivot.index), k).unwrap_or(s > k_f)
        };

        if exceeds {
            active.retain(|e| cmp(e) == Ordering::Less);
        } else {
            active.retain(|e| {
                if cmp(e) == Ordering::Greater {
                    return true;
                }
                w += e.inv_step;
                u += e.start * e.inv_step;
                members.push(e.index);
                false
            });
        }
    }
    members.sort_unstable();
    Ok(Contributing { members, inv_step_sum: w, weighted_start_sum: u })
}

/// A line's floating-point coordinates, kept small and contiguous for the
/// scans.
#[derive(Debug, Clone, Copy)]
struct Entry {
    start: f64,
    inv_step: f64,
    index: usize,
}

/// Exact order of `e`'s start against the pivot's; the floats decide unless
/// they are within rounding distance of each other.
#[inline]
fn cmp_to_pivot<L: ApproxLine>(line: impl Fn(usize) -> L, e: &Entry, pivot: &Entry) -> Ordering {
    let margin = 1e-12 * e.start.abs().max(pivot.start.abs());
    if e.start + margin < pivot.start {
        Ordering::Less
    } else if pivot.start + margin < e.start {
        Ordering::Greater
    } else {
        line(e.index).cmp_start(&line(pivot.index))
    }
}

/// Exact `s(x̄) > k`; `None` when the lines carry no exact coordinates.
fn exact_exceeds<L: ApproxLine>(
    line: impl Fn(usize) -> L,
    members: &[usize],
    active: &[Entry],
    pivot: &L,
    k: u64,
) -> Option<bool> {
    let mut s = BigRational::from_integer(BigInt::from(0));
    for &i in members {
        s += line(i).exact_excess(pivot)?;
    }
    for e in active {
        let l = line(e.index);
        if l.cmp_start(pivot) != Ordering::Greater {
            s += l.exact_excess(pivot)?;
        }
    }
    Some(s > BigRational::from_integer(BigInt::from(k)))
}
