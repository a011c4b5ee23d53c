//! Exact inverted priorities `d_j / v`.

use std::cmp::Ordering;
use std::fmt;

use crate::divisor::{DivisorMethod, DivisorValue, MAX_INDEX};
use crate::error::{Error, Result};

/// Relative gap between two finite hints beyond which their order is the
/// exact order. Hints carry at most four roundings.
const HINT_MARGIN: f64 = 1e-12;

/// One element `d_index / score` of an entity's inverted-priority sequence.
#[derive(Debug, Clone, Copy)]
pub struct Element {
    method: DivisorMethod,
    entity: usize,
    score: u64,
    index: u32,
    hint: f64,
}

impl Element {
    pub fn new(method: DivisorMethod, entity: usize, score: u64, index: u64) -> Result<Self> {
        if score == 0 {
            return Err(Error::Validation("score must be at least 1".into()));
        }
        if index > MAX_INDEX as u64 {
            return Err(Error::Capacity(format!(
                "divisor index {index} exceeds the supported maximum {MAX_INDEX}"
            )));
        }
        Ok(Element::new_unchecked(method, entity, score, index as u32))
    }

    #[inline]
    pub(crate) fn new_unchecked(method: DivisorMethod, entity: usize, score: u64, index: u32) -> Self {
        debug_assert!(score >= 1 && index <= MAX_INDEX);
        Element {
            method,
            entity,
            score,
            index,
            hint: method.divisor_f64(index) / score as f64,
        }
    }

    pub fn method(&self) -> DivisorMethod {
        self.method
    }

    pub fn entity(&self) -> usize {
        self.entity
    }

    pub fn score(&self) -> u64 {
        self.score
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Floating-point approximation of the value, within a few ulps when
    /// finite. Decides an ordering only when two hints are far apart.
    pub fn hint(&self) -> f64 {
        self.hint
    }

    #[inline]
    fn cmp_exact(&self, other: &Element) -> Ordering {
        debug_assert_eq!(self.method, other.method, "mixed-method comparison");
        let (a, b) = (self.hint, other.hint);
        if a.is_finite() && b.is_finite() {
            let margin = HINT_MARGIN * a.abs().max(b.abs());
            if a + margin < b {
                return Ordering::Less;
            }
            if b + margin < a {
                return Ordering::Greater;
            }
        }
        self.method
            .compare_terms(self.index, self.score, other.index, other.score)
    }

    /// The value as a reduced fraction, e.g. `2/5`, `sqrt(6)/10` or `2^3/7`.
    pub fn exact_string(&self) -> String {
        match self.method.value_unchecked(self.index) {
            DivisorValue::Rational { num, den } => {
                let den = den as u128 * self.score as u128;
                let g = gcd(num as u128, den);
                let (num, den) = (num as u128 / g, den / g);
                if den == 1 {
                    format!("{num}")
                } else {
                    format!("{num}/{den}")
                }
            }
            DivisorValue::SqrtOf(s) if s == 0 => "0".into(),
            DivisorValue::SqrtOf(s) => format!("sqrt({s})/{}", self.score),
            DivisorValue::PowerOfTwo(e) => {
                let shift = self.score.trailing_zeros().min(e);
                let (e, v) = (e - shift, self.score >> shift);
                if v == 1 {
                    format!("2^{e}")
                } else {
                    format!("2^{e}/{v}")
                }
            }
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// An inverted priority, or one of the two sentinels bracketing every
/// element.
///
/// Equality and ordering are by exact value: `2/4` from one entity equals
/// `1/2` from another. Comparing elements of different methods through
/// `Ord` panics in debug builds; use [`compare_priorities`] for a checked
/// comparison.
#[derive(Debug, Clone, Copy)]
pub enum Priority {
    NegInfinity,
    Element(Element),
    PosInfinity,
}

impl Priority {
    pub const NEG_INFINITY: Priority = Priority::NegInfinity;
    pub const POS_INFINITY: Priority = Priority::PosInfinity;

    pub fn element(method: DivisorMethod, entity: usize, score: u64, index: u64) -> Result<Self> {
        Element::new(method, entity, score, index).map(Priority::Element)
    }

    pub fn as_element(&self) -> Option<&Element> {
        match self {
            Priority::Element(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Priority::Element(_))
    }

    pub fn hint(&self) -> f64 {
        match self {
            Priority::NegInfinity => f64::NEG_INFINITY,
            Priority::Element(e) => e.hint,
            Priority::PosInfinity => f64::INFINITY,
        }
    }

    #[inline]
    fn tier(&self) -> u8 {
        match self {
            Priority::NegInfinity => 0,
            Priority::Element(_) => 1,
            Priority::PosInfinity => 2,
        }
    }
}

/// Exact comparison of two priorities, rejecting elements from different
/// divisor methods.
pub fn compare_priorities(p: &Priority, q: &Priority) -> Result<Ordering> {
    if let (Priority::Element(a), Priority::Element(b)) = (p, q) {
        if a.method != b.method {
            return Err(Error::Usage(format!(
                "cannot compare a {} priority with a {} priority",
                a.method, b.method
            )));
        }
    }
    Ok(p.cmp(q))
}

impl Ord for Priority {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Priority::Element(a), Priority::Element(b)) => a.cmp_exact(b),
            _ => self.tier().cmp(&other.tier()),
        }
    }
}

impl PartialOrd for Priority {
    #[inline]
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Priority {
    #[inline]
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Priority {}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Priority::NegInfinity => f.write_str("-inf"),
            Priority::Element(e) => f.write_str(&e.exact_string()),
            Priority::PosInfinity => f.write_str("+inf"),
        }
    }
}
