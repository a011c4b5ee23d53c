//! Problem in, allocation out.
//!
//! Every backend yields the threshold `τ`, the `k`-th smallest inverted
//! priority. Entities get every element strictly below `τ`; the elements
//! exactly at `τ` (at most one per entity) compete for the seats that are
//! left, and the tie policy decides who gets them.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::divisor::{DivisorMethod, DivisorValue};
use crate::error::{Error, Result};
use crate::oracle::{self, Simulation};
use crate::priority::{Element, Priority};
use crate::select::{self, MedianStrategy, SelectionConfig, SelectionStats, MAX_SEATS};
use crate::sequence::EntitySequence;

/// Largest accepted score.
pub const MAX_SCORE: u64 = i64::MAX as u64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Linear,
    Heap,
    Naive,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Larger score first, then earlier input position.
    #[default]
    ByScoreThenInputOrder,
    InputOrder,
    /// Leave a genuine tie unresolved.
    ReportOnly,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Linear, Backend::Heap, Backend::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Backend::Linear => "linear",
            Backend::Heap => "heap",
            Backend::Naive => "naive",
        }
    }
}

impl TiePolicy {
    pub fn name(self) -> &'static str {
        match self {
            TiePolicy::ByScoreThenInputOrder => "by-score-then-input-order",
            TiePolicy::InputOrder => "input-order",
            TiePolicy::ReportOnly => "report-only",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Validation(format!("unknown backend '{s}' (linear, heap, naive)")))
    }
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "by-score-then-input-order" | "by-score" | "score" => Ok(TiePolicy::ByScoreThenInputOrder),
            "input-order" | "input" => Ok(TiePolicy::InputOrder),
            "report-only" | "report" => Ok(TiePolicy::ReportOnly),
            _ => Err(Error::Validation(format!(
                "unknown tie policy '{s}' (by-score-then-input-order, input-order, report-only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub label: String,
    pub score: u64,
}

impl Entity {
    pub fn new(label: impl Into<String>, score: u64) -> Self {
        Entity { label: label.into(), score }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApportionmentProblem {
    pub entities: Vec<Entity>,
    pub seats: u64,
    pub method: DivisorMethod,
    pub backend: Backend,
    pub tie_policy: TiePolicy,
    pub median: MedianStrategy,
}

impl ApportionmentProblem {
    pub fn new(method: DivisorMethod, entities: Vec<Entity>, seats: u64) -> Self {
        ApportionmentProblem {
            entities,
            seats,
            method,
            backend: Backend::default(),
            tie_policy: TiePolicy::default(),
            median: MedianStrategy::default(),
        }
    }

    /// Entities labelled `E0`, `E1`, ... in input order.
    pub fn from_scores(method: DivisorMethod, scores: &[u64], seats: u64) -> Self {
        let entities = scores
            .iter()
            .enumerate()
            .map(|(i, &v)| Entity::new(format!("E{i}"), v))
            .collect();
        Self::new(method, entities, seats)
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_tie_policy(mut self, tie_policy: TiePolicy) -> Self {
        self.tie_policy = tie_policy;
        self
    }

    pub fn with_median(mut self, median: MedianStrategy) -> Self {
        self.median = median;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.entities.is_empty() {
            return Err(Error::Validation("at least one entity is required".into()));
        }
        let mut seen = HashSet::with_capacity(self.entities.len());
        for e in &self.entities {
            if e.score == 0 {
                return Err(Error::Validation(format!("entity '{}' has score 0", e.label)));
            }
            if e.score > MAX_SCORE {
                return Err(Error::Validation(format!(
                    "entity '{}' has score {} above the maximum {MAX_SCORE}",
                    e.label, e.score
                )));
            }
            if !seen.insert(e.label.as_str()) {
                return Err(Error::Validation(format!("duplicate label '{}'", e.label)));
            }
        }
        if self.seats > MAX_SEATS {
            return Err(Error::Validation(format!(
                "{} seats exceed the maximum {MAX_SEATS}",
                self.seats
            )));
        }
        Ok(())
    }

    pub fn scores(&self) -> Vec<u64> {
        self.entities.iter().map(|e| e.score).collect()
    }

    fn sequences(&self) -> Result<Vec<EntitySequence>> {
        self.entities
            .iter()
            .enumerate()
            .map(|(i, e)| EntitySequence::new(self.method, i, e.score))
            .collect()
    }
}

/// The threshold `τ`, as the element `d_index / v_entity` of the
/// lowest-numbered entity holding that value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub entity: usize,
    pub label: String,
    pub divisor_index: u32,
    /// Reduced exact form, e.g. `2/5` or `sqrt(6)/10`.
    pub exact: String,
    /// Twelve significant digits.
    pub decimal: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApportionmentResult {
    pub method: DivisorMethod,
    pub seats: u64,
    pub backend: Backend,
    pub tie_policy: TiePolicy,
    pub labels: Vec<String>,
    /// `None` when no seats are awarded.
    pub threshold: Option<Threshold>,
    /// Elements strictly below the threshold, per entity.
    pub guaranteed: Vec<u64>,
    /// Entities with an element exactly at the threshold, ascending.
    pub tie_set: Vec<usize>,
    /// Seats left for the tie set: `seats − Σ guaranteed`.
    pub residual: u64,
    /// Absent when the tie policy is `ReportOnly` and the residual seats do
    /// not cover the whole tie set.
    pub final_allocation: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
}

impl ApportionmentResult {
    pub fn is_resolved(&self) -> bool {
        self.final_allocation.is_some()
    }

    /// Equality of everything a backend decides: threshold, guaranteed
    /// counts, tie set and final allocation.
    pub fn same_outcome(&self, other: &ApportionmentResult) -> bool {
        self.threshold == other.threshold
            && self.guaranteed == other.guaranteed
            && self.tie_set == other.tie_set
            && self.residual == other.residual
            && self.final_allocation == other.final_allocation
    }
}

/// A tied claim on a residual seat: an entity whose sequence has an element
/// exactly at the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TieClaim {
    pub entity: usize,
    pub score: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieAward {
    /// Entities receiving a residual seat, ascending.
    pub awarded: Vec<usize>,
    pub resolved: bool,
}

/// Picks `residual` of the tied claims.
pub fn apply_tie_policy(claims: &[TieClaim], residual: u64, policy: TiePolicy) -> Result<TieAward> {
    if residual > claims.len() as u64 {
        return Err(Error::Invariant(format!(
            "{residual} residual seats but only {} tied claims",
            claims.len()
        )));
    }
    let residual = residual as usize;
    let mut order = claims.to_vec();
    match policy {
        TiePolicy::ByScoreThenInputOrder => {
            order.sort_by(|a, b| b.score.cmp(&a.score).then(a.entity.cmp(&b.entity)))
        }
        TiePolicy::InputOrder => order.sort_by_key(|c| c.entity),
        TiePolicy::ReportOnly if residual < claims.len() => {
            return Ok(TieAward { awarded: Vec::new(), resolved: false });
        }
        TiePolicy::ReportOnly => {}
    }
    let mut awarded: Vec<usize> = order[..residual].iter().map(|c| c.entity).collect();
    awarded.sort_unstable();
    Ok(TieAward { awarded, resolved: true })
}

/// Solves an apportionment problem with the selected backend.
pub fn solve(problem: &ApportionmentProblem) -> Result<ApportionmentResult> {
    solve_with(problem, &SelectionConfig { median: problem.median, ..SelectionConfig::default() })
}

/// [`solve`] with explicit selection settings for the linear backend.
pub fn solve_with(problem: &ApportionmentProblem, config: &SelectionConfig) -> Result<ApportionmentResult> {
    problem.validate()?;
    let n = problem.entities.len();
    let k = problem.seats;
    let mut result = ApportionmentResult {
        method: problem.method,
        seats: k,
        backend: problem.backend,
        tie_policy: problem.tie_policy,
        labels: problem.entities.iter().map(|e| e.label.clone()).collect(),
        threshold: None,
        guaranteed: vec![0; n],
        tie_set: Vec::new(),
        residual: 0,
        final_allocation: Some(vec![0; n]),
        fallback: None,
    };
    if k == 0 {
        return Ok(result);
    }

    let seqs = problem.sequences()?;
    let scores = problem.scores();
    let (tau, simulated): (Priority, Option<Simulation>) = match problem.backend {
        Backend::Linear => {
            let sel = select::kth_smallest_threshold(&seqs, k, config)?;
            result.fallback = sel.stats.fallback.clone();
            (sel.threshold, None)
        }
        Backend::Heap => {
            let sim = oracle::heap_apportion(problem.method, &scores, k, problem.tie_policy)?;
            (sim.threshold, Some(sim))
        }
        Backend::Naive => {
            let sim = oracle::naive_apportion(problem.method, &scores, k, problem.tie_policy)?;
            (sim.threshold, Some(sim))
        }
    };

    let mut claims = Vec::new();
    for (i, s) in seqs.iter().enumerate() {
        let (below, at) = s.count_below(&tau);
        result.guaranteed[i] = below;
        if at {
            claims.push(TieClaim { entity: i, score: s.score() });
        }
    }
    let below_total: u64 = result.guaranteed.iter().sum();
    let residual = k.checked_sub(below_total).filter(|&r| r >= 1).ok_or_else(|| {
        Error::Invariant(format!("{below_total} elements below the threshold for k = {k}"))
    })?;
    result.residual = residual;
    result.tie_set = claims.iter().map(|c| c.entity).collect();

    let first = claims
        .first()
        .ok_or_else(|| Error::Invariant("threshold is not an element of any sequence".into()))?;
    let index = result.guaranteed[first.entity];
    let canonical = Element::new(problem.method, first.entity, first.score, index)?;
    result.threshold = Some(Threshold {
        entity: first.entity,
        label: problem.entities[first.entity].label.clone(),
        divisor_index: canonical.index(),
        exact: canonical.exact_string(),
        decimal: decimal_string(&canonical),
    });

    let award = apply_tie_policy(&claims, residual, problem.tie_policy)?;
    result.final_allocation = match simulated {
        Some(sim) if award.resolved => Some(sim.allocation),
        Some(_) => None,
        None if award.resolved => {
            let mut alloc = result.guaranteed.clone();
            for &e in &award.awarded {
                alloc[e] += 1;
            }
            Some(alloc)
        }
        None => None,
    };
    if let Some(alloc) = &result.final_allocation {
        if alloc.iter().sum::<u64>() != k {
            return Err(Error::Invariant("allocation does not sum to the seat count".into()));
        }
    }
    Ok(result)
}

/// The value of an element to twelve significant digits.
pub fn decimal_string(e: &Element) -> String {
    let x = e.hint();
    if x.is_finite() {
        return format_significant(x, 12);
    }
    // Only powers of two get here: 2^j / v overflows f64.
    let DivisorValue::PowerOfTwo(j) = e.method().value_unchecked(e.index()) else {
        return format!("{x}");
    };
    let log10 = j as f64 * std::f64::consts::LOG10_2 - (e.score() as f64).log10();
    let exp = log10.floor();
    let mantissa = 10f64.powf(log10 - exp);
    format!("{mantissa:.11}e{exp}")
}

/// `x` rounded to `digits` significant digits, without trailing zeros;
/// scientific notation outside `[1e-6, 1e15)`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-6..15).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Statistics of the linear backend for a problem, for instrumentation.
pub fn linear_stats(problem: &ApportionmentProblem, config: &SelectionConfig) -> Result<Option<SelectionStats>> {
    problem.validate()?;
    if problem.seats == 0 {
        return Ok(None);
    }
    let seqs = problem.sequences()?;
    Ok(Some(select::kth_smallest_threshold(&seqs, problem.seats, config)?.stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use DivisorMethod::*;

    fn solve_all(method: DivisorMethod, scores: &[u64], k: u64, policy: TiePolicy) -> Vec<ApportionmentResult> {
        Backend::ALL
            .iter()
            .map(|&b| {
                let p = ApportionmentProblem::from_scores(method, scores, k)
                    .with_backend(b)
                    .with_tie_policy(policy);
                solve(&p).unwrap()
            })
            .collect()
    }

    #[test]
    fn dhondt_seven_five_three() {
        for r in solve_all(Jefferson, &[7, 5, 3], 5, TiePolicy::default()) {
            assert_eq!(r.final_allocation, Some(vec![2, 2, 1]));
            let t = r.threshold.unwrap();
            assert_eq!(t.exact, "2/5");
            assert_eq!(t.decimal, "0.4");
            assert_eq!((t.entity, t.divisor_index), (1, 1));
        }
    }

    #[test]
    fn dhondt_tie_at_threshold() {
        for r in solve_all(Jefferson, &[4, 2], 3, TiePolicy::default()) {
            assert_eq!(r.guaranteed, vec![1, 0]);
            assert_eq!(r.tie_set, vec![0, 1]);
            assert_eq!(r.residual, 2);
            assert_eq!(r.final_allocation, Some(vec![2, 1]));
            assert_eq!(r.threshold.as_ref().unwrap().exact, "1/2");
        }
    }

    #[test]
    fn report_only_leaves_genuine_ties_open() {
        for r in solve_all(Jefferson, &[4, 2], 2, TiePolicy::ReportOnly) {
            assert_eq!(r.tie_set, vec![0, 1]);
            assert_eq!(r.residual, 1);
            assert_eq!(r.final_allocation, None);
        }
        for r in solve_all(Jefferson, &[4, 2], 3, TiePolicy::ReportOnly) {
            assert_eq!(r.final_allocation, Some(vec![2, 1]));
        }
    }

    #[test]
    fn zero_start_small_k() {
        for r in solve_all(HuntingtonHill, &[5, 80], 2, TiePolicy::default()) {
            assert_eq!(r.final_allocation, Some(vec![1, 1]));
        }
        for r in solve_all(Dean, &[5, 80, 7], 2, TiePolicy::default()) {
            assert_eq!(r.final_allocation, Some(vec![0, 1, 1]));
            assert_eq!(r.threshold.as_ref().unwrap().exact, "0");
        }
    }

    #[test]
    fn zero_seats() {
        for r in solve_all(SainteLague, &[5, 80], 0, TiePolicy::default()) {
            assert_eq!(r.final_allocation, Some(vec![0, 0]));
            assert!(r.threshold.is_none());
            assert!(r.tie_set.is_empty());
        }
    }

    #[test]
    fn tie_policy_examples() {
        let claims = [TieClaim { entity: 0, score: 9 }, TieClaim { entity: 1, score: 9 }];
        assert_eq!(apply_tie_policy(&claims, 0, TiePolicy::default()).unwrap().awarded, Vec::<usize>::new());
        assert_eq!(apply_tie_policy(&claims, 1, TiePolicy::default()).unwrap().awarded, vec![0]);
        assert_eq!(apply_tie_policy(&claims, 2, TiePolicy::ReportOnly).unwrap().awarded, vec![0, 1]);
        let open = apply_tie_policy(&claims, 1, TiePolicy::ReportOnly).unwrap();
        assert!(!open.resolved && open.awarded.is_empty());
        assert!(matches!(apply_tie_policy(&claims, 3, TiePolicy::default()), Err(Error::Invariant(_))));
        let uneven = [TieClaim { entity: 0, score: 2 }, TieClaim { entity: 3, score: 9 }];
        assert_eq!(apply_tie_policy(&uneven, 1, TiePolicy::default()).unwrap().awarded, vec![3]);
        assert_eq!(apply_tie_policy(&uneven, 1, TiePolicy::InputOrder).unwrap().awarded, vec![0]);
    }

    #[test]
    fn validation_errors() {
        let bad = ApportionmentProblem::from_scores(Adams, &[1, 0], 3);
        assert!(matches!(solve(&bad), Err(Error::Validation(_))));
        let dup = ApportionmentProblem::new(Adams, vec![Entity::new("A", 1), Entity::new("A", 2)], 1);
        assert!(matches!(solve(&dup), Err(Error::Validation(_))));
        let empty = ApportionmentProblem::new(Adams, vec![], 1);
        assert!(matches!(solve(&empty), Err(Error::Validation(_))));
        let huge = ApportionmentProblem::from_scores(Adams, &[u64::MAX], 1);
        assert!(matches!(solve(&huge), Err(Error::Validation(_))));
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.4, 12), "0.4");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(2.0f64.sqrt() / 10.0, 12), "0.141421356237");
        assert_eq!(format_significant(123456.0, 12), "123456");
        assert_eq!(format_significant(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn huge_power_of_two_threshold_renders() {
        let e = Element::new(PowerOfTwo, 0, 3, 2000).unwrap();
        assert!(decimal_string(&e).ends_with("e601"), "{}", decimal_string(&e));
    }

    #[test]
    fn parse_backend_and_policy() {
        assert_eq!("Heap".parse::<Backend>().unwrap(), Backend::Heap);
        assert_eq!("report_only".parse::<TiePolicy>().unwrap(), TiePolicy::ReportOnly);
        assert!("fast".parse::<Backend>().is_err());
    }
}
