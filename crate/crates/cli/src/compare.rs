//! Randomized cross-checking of the three backends.
//!
//! Trial `i` of a run with seed `s` draws its instance from seed `s + i`, so
//! any trial can be replayed alone with `--seed s+i --trials 1`.

use std::fmt::Write;

use apportion_core::{
    ApportionmentProblem, ApportionmentResult, Backend, DivisorMethod, Entity, Result, TiePolicy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const POLICIES: [TiePolicy; 3] =
    [TiePolicy::ByScoreThenInputOrder, TiePolicy::InputOrder, TiePolicy::ReportOnly];

#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub trials: u64,
    pub max_n: usize,
    pub max_k: u64,
    pub max_score: u64,
    pub seed: u64,
    /// Drawn per trial when absent.
    pub method: Option<DivisorMethod>,
    /// Drawn per trial when absent.
    pub tie_policy: Option<TiePolicy>,
    /// Fixed entities; only the method, seats and policy vary.
    pub entities: Option<Vec<Entity>>,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            trials: 100,
            max_n: 50,
            max_k: 5000,
            max_score: 1_000_000,
            seed: 0,
            method: None,
            tie_policy: None,
            entities: None,
        }
    }
}

/// Solves one problem; the backend to use is set on the problem.
pub type Solver = dyn Fn(&ApportionmentProblem) -> Result<ApportionmentResult> + Sync;

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub trial: u64,
    pub seed: u64,
    pub problem: ApportionmentProblem,
    /// Outcome per backend, in [`Backend::ALL`] order.
    pub outcomes: Vec<(Backend, std::result::Result<ApportionmentResult, String>)>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub trials: u64,
    pub equal: u64,
    pub first_mismatch: Option<Mismatch>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

pub fn instance(config: &CompareConfig, seed: u64) -> ApportionmentProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let method = config
        .method
        .unwrap_or_else(|| DivisorMethod::ALL[rng.gen_range(0..DivisorMethod::ALL.len())]);
    let entities = config.entities.clone().unwrap_or_else(|| {
        let n = rng.gen_range(1..=config.max_n.max(1));
        (0..n)
            .map(|i| Entity::new(format!("E{i}"), rng.gen_range(1..=config.max_score.max(1))))
            .collect()
    });
    let seats = rng.gen_range(0..=config.max_k);
    let policy = config.tie_policy.unwrap_or_else(|| POLICIES[rng.gen_range(0..POLICIES.len())]);
    ApportionmentProblem::new(method, entities, seats).with_tie_policy(policy)
}

fn check(config: &CompareConfig, trial: u64, solver: &Solver) -> Option<Mismatch> {
    let seed = config.seed.wrapping_add(trial);
    let problem = instance(config, seed);
    let outcomes: Vec<_> = Backend::ALL
        .iter()
        .map(|&b| (b, solver(&problem.clone().with_backend(b)).map_err(|e| e.to_string())))
        .collect();
    let reference = match &outcomes[0].1 {
        Ok(r) => r,
        Err(_) => return Some(Mismatch { trial, seed, problem, outcomes }),
    };
    let agree = outcomes[1..]
        .iter()
        .all(|(_, o)| o.as_ref().is_ok_and(|r| r.same_outcome(reference)));
    (!agree).then_some(Mismatch { trial, seed, problem, outcomes })
}

/// Runs every trial in parallel; results are ordered by trial index.
pub fn run(config: &CompareConfig, solver: &Solver) -> CompareReport {
    let failures: Vec<Option<Mismatch>> =
        (0..config.trials).into_par_iter().map(|t| check(config, t, solver)).collect();
    let equal = failures.iter().filter(|f| f.is_none()).count() as u64;
    CompareReport {
        trials: config.trials,
        equal,
        first_mismatch: failures.into_iter().flatten().next(),
    }
}

pub fn render(report: &CompareReport, config: &CompareConfig) -> String {
    let mut out = format!("{}/{} equal\n", report.equal, report.trials);
    let Some(m) = &report.first_mismatch else {
        return out;
    };
    let p = &m.problem;
    let _ = writeln!(
        out,
        "first mismatch at trial {} (seed {}): method {}, {} entities, {} seats, tie policy {}",
        m.trial,
        m.seed,
        p.method,
        p.entities.len(),
        p.seats,
        p.tie_policy
    );
    for (backend, outcome) in &m.outcomes {
        let line = match outcome {
            Ok(r) => format!(
                "threshold {}, allocation {}, tie set {:?}",
                r.threshold.as_ref().map_or("none", |t| t.exact.as_str()),
                r.final_allocation
                    .as_ref()
                    .map_or_else(|| format!("unresolved, guaranteed {:?}", r.guaranteed), |a| format!("{a:?}")),
                r.tie_set
            ),
            Err(e) => format!("error: {e}"),
        };
        let _ = writeln!(out, "  {backend:<6} {line}");
    }
    let mut cmd = format!(
        "apportion compare --seed {} --trials 1 --max-n {} --max-k {} --max-score {}",
        m.seed, config.max_n, config.max_k, config.max_score
    );
    if let Some(method) = config.method {
        let _ = write!(cmd, " --method {method}");
    }
    if let Some(policy) = config.tie_policy {
        let _ = write!(cmd, " --tie-policy {policy}");
    }
    if config.entities.is_some() {
        cmd.push_str(" --input <same input>");
    }
    let _ = writeln!(out, "reproduce with: {cmd}");
    out
}
