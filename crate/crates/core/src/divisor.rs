//! Divisor sequences of the highest-averages methods.
//!
//! A method is fully described by its strictly increasing divisor sequence
//! `d_0, d_1, ...`. Each divisor has an exact form that can be compared
//! without rounding, and (for every method except the power-of-two
//! extension) an arithmetic progression `e_j = e_0 + Δ·j` that stays within a
//! constant distance of it.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wide::cmp_products;

/// Largest divisor index with an exact representation.
///
/// The cap keeps `j(j+1)·v²` (Huntington–Hill) and `2j(j+1)·(2j+1)·v` (Dean)
/// inside 192 bits for any 64-bit score.
pub const MAX_INDEX: u32 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DivisorMethod {
    Adams,
    Jefferson,
    SainteLague,
    ModifiedSainteLague,
    HuntingtonHill,
    Dean,
    Imperiali,
    Danish,
    /// `d_j = 2^j`. Not used by any legislature; kept as an example of a
    /// sequence whose rank function is logarithmic rather than linear.
    PowerOfTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorKind {
    /// `d_j = p_j / q_j` with integer `p_j`, `q_j`.
    Rational,
    /// `d_j = sqrt(j(j+1))`.
    GeometricMeanRoot,
    /// `d_j = 2^j`.
    PowerOfTwo,
}

/// Exact form of a single divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorValue {
    Rational { num: u64, den: u64 },
    /// The divisor is the square root of this integer.
    SqrtOf(u64),
    /// The divisor is two raised to this power.
    PowerOfTwo(u32),
}

impl DivisorValue {
    pub fn to_f64(self) -> f64 {
        match self {
            DivisorValue::Rational { num, den } => num as f64 / den as f64,
            DivisorValue::SqrtOf(s) => (s as f64).sqrt(),
            DivisorValue::PowerOfTwo(e) => (e as f64).exp2(),
        }
    }
}

/// Arithmetic progression `e_j = start + step·j` with `|d_j − e_j| ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArithProgression {
    pub start: Ratio<i64>,
    pub step: Ratio<i64>,
    pub bound: Ratio<i64>,
}

impl ArithProgression {
    fn integer(start: i64, step: i64, bound: i64) -> Self {
        ArithProgression {
            start: Ratio::from_integer(start),
            step: Ratio::from_integer(step),
            bound: Ratio::from_integer(bound),
        }
    }

    pub fn term(&self, j: u64) -> Ratio<i64> {
        self.start + self.step * Ratio::from_integer(j as i64)
    }
}

impl DivisorMethod {
    /// The eight methods of the standard catalogue.
    pub const STANDARD: [DivisorMethod; 8] = [
        DivisorMethod::Adams,
        DivisorMethod::Jefferson,
        DivisorMethod::SainteLague,
        DivisorMethod::ModifiedSainteLague,
        DivisorMethod::HuntingtonHill,
        DivisorMethod::Dean,
        DivisorMethod::Imperiali,
        DivisorMethod::Danish,
    ];

    pub const ALL: [DivisorMethod; 9] = [
        DivisorMethod::Adams,
        DivisorMethod::Jefferson,
        DivisorMethod::SainteLague,
        DivisorMethod::ModifiedSainteLague,
        DivisorMethod::HuntingtonHill,
        DivisorMethod::Dean,
        DivisorMethod::Imperiali,
        DivisorMethod::Danish,
        DivisorMethod::PowerOfTwo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DivisorMethod::Adams => "adams",
            DivisorMethod::Jefferson => "jefferson",
            DivisorMethod::SainteLague => "sainte-lague",
            DivisorMethod::ModifiedSainteLague => "modified-sainte-lague",
            DivisorMethod::HuntingtonHill => "huntington-hill",
            DivisorMethod::Dean => "dean",
            DivisorMethod::Imperiali => "imperiali",
            DivisorMethod::Danish => "danish",
            DivisorMethod::PowerOfTwo => "power-of-two",
        }
    }

    /// Alternative names accepted by [`FromStr`].
    pub fn aliases(self) -> &'static [&'static str] {
        match self {
            DivisorMethod::Adams => &["smallest-divisors"],
            DivisorMethod::Jefferson => &["dhondt", "greatest-divisors"],
            DivisorMethod::SainteLague => &["webster", "major-fractions"],
            DivisorMethod::ModifiedSainteLague => &[],
            DivisorMethod::HuntingtonHill => &["hill", "equal-proportions", "geometric-mean"],
            DivisorMethod::Dean => &["harmonic-mean"],
            DivisorMethod::Imperiali => &[],
            DivisorMethod::Danish => &[],
            DivisorMethod::PowerOfTwo => &["geometric", "powers-of-two"],
        }
    }

    pub fn kind(self) -> DivisorKind {
        match self {
            DivisorMethod::HuntingtonHill => DivisorKind::GeometricMeanRoot,
            DivisorMethod::PowerOfTwo => DivisorKind::PowerOfTwo,
            _ => DivisorKind::Rational,
        }
    }

    /// True iff `d_0 = 0`, i.e. every entity gets a first unit before anyone
    /// gets a second.
    pub fn zero_start(self) -> bool {
        matches!(
            self,
            DivisorMethod::Adams | DivisorMethod::HuntingtonHill | DivisorMethod::Dean
        )
    }

    /// The approximating arithmetic progression, or `None` for
    /// [`DivisorMethod::PowerOfTwo`], whose coarse solution is computed in the
    /// logarithmic domain instead.
    pub fn approx_progression(self) -> Option<ArithProgression> {
        Some(match self {
            DivisorMethod::Adams => ArithProgression::integer(0, 1, 0),
            DivisorMethod::Jefferson => ArithProgression::integer(1, 1, 0),
            DivisorMethod::SainteLague => ArithProgression::integer(1, 2, 0),
            DivisorMethod::ModifiedSainteLague => ArithProgression::integer(1, 2, 1),
            DivisorMethod::HuntingtonHill => ArithProgression::integer(0, 1, 1),
            DivisorMethod::Dean => ArithProgression::integer(0, 1, 1),
            DivisorMethod::Imperiali => ArithProgression::integer(2, 1, 0),
            DivisorMethod::Danish => ArithProgression::integer(1, 3, 0),
            DivisorMethod::PowerOfTwo => return None,
        })
    }

    /// Exact value of `d_j`.
    pub fn divisor_value(self, j: u64) -> Result<DivisorValue> {
        if j > MAX_INDEX as u64 {
            return Err(Error::Capacity(format!(
                "divisor index {j} exceeds the supported maximum {MAX_INDEX}"
            )));
        }
        Ok(self.value_unchecked(j as u32))
    }

    #[inline]
    pub(crate) fn value_unchecked(self, j: u32) -> DivisorValue {
        let j = j as u64;
        match self {
            DivisorMethod::HuntingtonHill => DivisorValue::SqrtOf(j * (j + 1)),
            DivisorMethod::PowerOfTwo => DivisorValue::PowerOfTwo(j as u32),
            _ => {
                let (num, den) = self.rational_parts(j);
                DivisorValue::Rational { num, den }
            }
        }
    }

    #[inline]
    fn rational_parts(self, j: u64) -> (u64, u64) {
        match self {
            DivisorMethod::Adams => (j, 1),
            DivisorMethod::Jefferson => (j + 1, 1),
            DivisorMethod::SainteLague => (2 * j + 1, 1),
            DivisorMethod::ModifiedSainteLague if j == 0 => (7, 5),
            DivisorMethod::ModifiedSainteLague => (2 * j + 1, 1),
            DivisorMethod::Dean => (2 * j * (j + 1), 2 * j + 1),
            DivisorMethod::Imperiali => (j + 2, 1),
            DivisorMethod::Danish => (3 * j + 1, 1),
            DivisorMethod::HuntingtonHill | DivisorMethod::PowerOfTwo => {
                unreachable!("not a rational divisor sequence")
            }
        }
    }

    #[inline]
    pub fn divisor_f64(self, j: u32) -> f64 {
        self.value_unchecked(j).to_f64()
    }

    /// Exact ordering of `d_a / v_a` against `d_b / v_b`.
    #[inline]
    pub(crate) fn compare_terms(self, a: u32, va: u64, b: u32, vb: u64) -> Ordering {
        match self {
            DivisorMethod::HuntingtonHill => {
                let (a, b) = (a as u64, b as u64);
                cmp_products((a * (a + 1), vb, vb), (b * (b + 1), va, va))
            }
            DivisorMethod::PowerOfTwo => cmp_pow2(vb, a, va, b),
            _ => {
                let (pa, qa) = self.rational_parts(a as u64);
                let (pb, qb) = self.rational_parts(b as u64);
                cmp_products((pa, qb, vb), (pb, qa, va))
            }
        }
    }

    /// Floating-point estimate of `|{ j : d_j ≤ t }|`. Only a starting point
    /// for the exact rank search; may be off by a few units, or be garbage for
    /// non-finite `t`.
    pub(crate) fn count_at_most_f64(self, t: f64) -> f64 {
        if t.is_nan() {
            return 0.0;
        }
        match self {
            DivisorMethod::Adams => arith_count(t, 0.0, 1.0),
            DivisorMethod::Jefferson => arith_count(t, 1.0, 1.0),
            DivisorMethod::SainteLague => arith_count(t, 1.0, 2.0),
            DivisorMethod::Imperiali => arith_count(t, 2.0, 1.0),
            DivisorMethod::Danish => arith_count(t, 1.0, 3.0),
            DivisorMethod::ModifiedSainteLague => {
                if t < 1.4 {
                    0.0
                } else {
                    // d_0 plus the j ≥ 1 terms 2j+1 ≤ t.
                    1.0 + ((t - 1.0) / 2.0).floor().max(0.0)
                }
            }
            DivisorMethod::HuntingtonHill => {
                if t < 0.0 {
                    0.0
                } else {
                    // j(j+1) ≤ t²
                    ((4.0 * t * t + 1.0).sqrt() - 1.0).div_euclid(2.0) + 1.0
                }
            }
            DivisorMethod::Dean => {
                if t < 0.0 {
                    0.0
                } else {
                    // 2j² + (2 − 2t)j − t ≤ 0
                    let b = 2.0 - 2.0 * t;
                    ((-b + (b * b + 8.0 * t).sqrt()) / 4.0).floor() + 1.0
                }
            }
            DivisorMethod::PowerOfTwo => {
                if t < 1.0 {
                    0.0
                } else {
                    t.log2().floor() + 1.0
                }
            }
        }
    }
}

fn arith_count(t: f64, start: f64, step: f64) -> f64 {
    if t < start {
        0.0
    } else {
        ((t - start) / step).floor() + 1.0
    }
}

/// Compares `x·2^a` against `y·2^b` for `x, y ≥ 1`.
fn cmp_pow2(x: u64, a: u32, y: u64, b: u32) -> Ordering {
    let bits = |v: u64| 64 - v.leading_zeros() as i64;
    let lhs_bits = bits(x) + a as i64;
    let rhs_bits = bits(y) + b as i64;
    if lhs_bits != rhs_bits {
        return lhs_bits.cmp(&rhs_bits);
    }
    // Equal bit lengths put the exponent difference within 63.
    if a >= b {
        ((x as u128) << (a - b)).cmp(&(y as u128))
    } else {
        (x as u128).cmp(&((y as u128) << (b - a)))
    }
}

impl fmt::Display for DivisorMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DivisorMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter_map(|c| match c {
                '\'' | '’' => None,
                '_' | ' ' => Some('-'),
                'ë' | 'Ë' => Some('e'),
                '\u{2013}' | '\u{2014}' => Some('-'),
                c => Some(c.to_ascii_lowercase()),
            })
            .collect();
        DivisorMethod::ALL
            .into_iter()
            .find(|m| m.name() == key || m.aliases().contains(&key.as_str()))
            .ok_or_else(|| {
                let known: Vec<&str> = DivisorMethod::ALL.iter().map(|m| m.name()).collect();
                Error::Validation(format!(
                    "unknown divisor method '{s}' (expected one of: {})",
                    known.join(", ")
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_values() {
        assert_eq!(
            DivisorMethod::SainteLague.divisor_value(3).unwrap(),
            DivisorValue::Rational { num: 7, den: 1 }
        );
        assert_eq!(
            DivisorMethod::Adams.divisor_value(0).unwrap(),
            DivisorValue::Rational { num: 0, den: 1 }
        );
        assert_eq!(
            DivisorMethod::HuntingtonHill.divisor_value(2).unwrap(),
            DivisorValue::SqrtOf(6)
        );
        assert_eq!(
            DivisorMethod::Dean.divisor_value(2).unwrap(),
            DivisorValue::Rational { num: 12, den: 5 }
        );
        assert_eq!(
            DivisorMethod::Dean.divisor_value(1).unwrap(),
            DivisorValue::Rational { num: 4, den: 3 }
        );
        assert_eq!(
            DivisorMethod::ModifiedSainteLague.divisor_value(0).unwrap(),
            DivisorValue::Rational { num: 7, den: 5 }
        );
    }

    #[test]
    fn first_divisors_match_table() {
        let firsts = |m: DivisorMethod| -> Vec<f64> { (0..4).map(|j| m.divisor_f64(j)).collect() };
        assert_eq!(firsts(DivisorMethod::Adams), [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(firsts(DivisorMethod::Jefferson), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(firsts(DivisorMethod::SainteLague), [1.0, 3.0, 5.0, 7.0]);
        assert_eq!(firsts(DivisorMethod::ModifiedSainteLague), [1.4, 3.0, 5.0, 7.0]);
        assert_eq!(firsts(DivisorMethod::Imperiali), [2.0, 3.0, 4.0, 5.0]);
        assert_eq!(firsts(DivisorMethod::Danish), [1.0, 4.0, 7.0, 10.0]);
        assert_eq!(firsts(DivisorMethod::PowerOfTwo), [1.0, 2.0, 4.0, 8.0]);
    }

    #[test]
    fn index_cap() {
        assert!(DivisorMethod::Dean.divisor_value(MAX_INDEX as u64).is_ok());
        assert!(matches!(
            DivisorMethod::Dean.divisor_value(MAX_INDEX as u64 + 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn aliases_parse() {
        assert_eq!("dhondt".parse::<DivisorMethod>().unwrap(), DivisorMethod::Jefferson);
        assert_eq!("d'Hondt".parse::<DivisorMethod>().unwrap(), DivisorMethod::Jefferson);
        assert_eq!("Webster".parse::<DivisorMethod>().unwrap(), DivisorMethod::SainteLague);
        assert_eq!("Sainte-Laguë".parse::<DivisorMethod>().unwrap(), DivisorMethod::SainteLague);
        assert_eq!(
            "equal_proportions".parse::<DivisorMethod>().unwrap(),
            DivisorMethod::HuntingtonHill
        );
        assert!(matches!("borda".parse::<DivisorMethod>(), Err(Error::Validation(_))));
        for m in DivisorMethod::ALL {
            assert_eq!(m.name().parse::<DivisorMethod>().unwrap(), m);
        }
    }

    #[test]
    fn zero_start_iff_first_divisor_zero() {
        for m in DivisorMethod::ALL {
            assert_eq!(m.zero_start(), m.divisor_f64(0) == 0.0, "{m}");
        }
    }

    #[test]
    fn pow2_comparison() {
        assert_eq!(cmp_pow2(3, 2, 12, 0), Ordering::Equal);
        assert_eq!(cmp_pow2(3, 2, 13, 0), Ordering::Less);
        assert_eq!(cmp_pow2(1, 100, u64::MAX, 36), Ordering::Greater);
        assert_eq!(cmp_pow2(1, 64, u64::MAX, 0), Ordering::Greater);
    }

    #[test]
    fn float_counts_are_close() {
        for m in DivisorMethod::ALL {
            for j in 0..1000u32 {
                let d = m.divisor_f64(j);
                let est = m.count_at_most_f64(d);
                assert!((est - (j as f64 + 1.0)).abs() <= 1.0, "{m} j={j} est={est}");
            }
        }
    }
}
