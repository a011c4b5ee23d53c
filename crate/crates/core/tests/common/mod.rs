//! Test-only oracles built on arbitrary-precision integers, independent of
//! the fixed-width comparison code in the library.

#![allow(dead_code)]

use std::cmp::Ordering;

use apportion_core::DivisorMethod;
use num_bigint::BigInt;
use rand::Rng;

/// `d_j` as `(numerator, denominator, is_sqrt)` in big integers; for
/// Huntington–Hill the value is `sqrt(numerator) / denominator`.
pub fn divisor_big(method: DivisorMethod, j: u64) -> (BigInt, BigInt, bool) {
    let b = |x: u64| BigInt::from(x);
    let j2 = BigInt::from(j);
    match method {
        DivisorMethod::Adams => (j2, b(1), false),
        DivisorMethod::Jefferson => (j2 + 1, b(1), false),
        DivisorMethod::SainteLague => (j2 * 2 + 1, b(1), false),
        DivisorMethod::ModifiedSainteLague if j == 0 => (b(7), b(5), false),
        DivisorMethod::ModifiedSainteLague => (j2 * 2 + 1, b(1), false),
        DivisorMethod::HuntingtonHill => (j2.clone() * (j2 + 1), b(1), true),
        DivisorMethod::Dean => (j2.clone() * (j2.clone() + 1) * 2, j2 * 2 + 1, false),
        DivisorMethod::Imperiali => (j2 + 2, b(1), false),
        DivisorMethod::Danish => (j2 * 3 + 1, b(1), false),
        DivisorMethod::PowerOfTwo => (BigInt::from(1) << j as usize, b(1), false),
    }
}

/// Exact order of `d_a / va` against `d_b / vb`.
pub fn cmp_oracle(method: DivisorMethod, (a, va): (u64, u64), (b, vb): (u64, u64)) -> Ordering {
    let (pa, qa, sqrt) = divisor_big(method, a);
    let (pb, qb, _) = divisor_big(method, b);
    let (va, vb) = (BigInt::from(va), BigInt::from(vb));
    if sqrt {
        // sqrt(pa)/va vs sqrt(pb)/vb, both sides nonnegative
        (pa * &vb * &vb).cmp(&(pb * &va * &va))
    } else {
        (pa * qb * vb).cmp(&(pb * qa * va))
    }
}

/// `r(x, A)` by scanning the first `limit` elements of `A = {d_j / v}`.
pub fn scan_rank(method: DivisorMethod, v: u64, x: (u64, u64), limit: u64) -> u64 {
    (0..limit)
        .take_while(|&j| cmp_oracle(method, (j, v), x) != Ordering::Greater)
        .count() as u64
}

/// High-precision float value of `d_j / v`.
pub fn value_f64(method: DivisorMethod, j: u64, v: u64) -> f64 {
    let (p, q, sqrt) = divisor_big(method, j);
    let p: f64 = p.to_string().parse().unwrap();
    let q: f64 = q.to_string().parse().unwrap();
    if sqrt {
        p.sqrt() / v as f64
    } else {
        p / q / v as f64
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub method: DivisorMethod,
    pub scores: Vec<u64>,
    pub seats: u64,
}

pub fn random_instance<R: Rng>(
    rng: &mut R,
    methods: &[DivisorMethod],
    max_n: usize,
    max_k: u64,
    max_score: u64,
) -> Instance {
    let method = methods[rng.gen_range(0..methods.len())];
    let n = rng.gen_range(1..=max_n);
    // Mix wide-range scores with small ones so that exact ties show up.
    let small = rng.gen_bool(0.3);
    let scores = (0..n)
        .map(|_| if small { rng.gen_range(1..=12) } else { rng.gen_range(1..=max_score) })
        .collect();
    let seats = rng.gen_range(0..=max_k);
    Instance { method, scores, seats }
}
