//! Exact comparison of products of three `u64` factors.
//!
//! Every exact priority comparison reduces to `a·b·c` versus `d·e·f`, which
//! needs up to 192 bits.

use std::cmp::Ordering;

/// `a·b·c` as a `(high, low)` pair of a 256-bit value; `high` only ever uses
/// its lowest 64 bits.
#[inline]
pub(crate) fn mul3(a: u64, b: u64, c: u64) -> (u128, u128) {
    let ab = a as u128 * b as u128;
    let lo_part = (ab as u64 as u128) * c as u128;
    let hi_part = (ab >> 64) * c as u128;
    let (lo, carry) = lo_part.overflowing_add(hi_part << 64);
    ((hi_part >> 64) + carry as u128, lo)
}

#[inline]
pub(crate) fn cmp_products(lhs: (u64, u64, u64), rhs: (u64, u64, u64)) -> Ordering {
    // Fast path: both products fit in 128 bits most of the time.
    if let (Some(l), Some(r)) = (
        (lhs.0 as u128).checked_mul(lhs.1 as u128).and_then(|p| p.checked_mul(lhs.2 as u128)),
        (rhs.0 as u128).checked_mul(rhs.1 as u128).and_then(|p| p.checked_mul(rhs.2 as u128)),
    ) {
        return l.cmp(&r);
    }
    mul3(lhs.0, lhs.1, lhs.2).cmp(&mul3(rhs.0, rhs.1, rhs.2))
}
