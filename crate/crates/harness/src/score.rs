//! Paired compliance endpoints against a baseline condition.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::summary::RunSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// Best retained compliance among feasible steps.
    Feas,
    /// Final compliance when the final state is feasible.
    FinalFeas,
    /// Retained-best compliance regardless of feasibility.
    Any,
}

impl Endpoint {
    pub const ALL: [Endpoint; 3] = [Endpoint::Feas, Endpoint::FinalFeas, Endpoint::Any];

    pub fn name(self) -> &'static str {
        match self {
            Endpoint::Feas => "feas",
            Endpoint::FinalFeas => "final_feas",
            Endpoint::Any => "any",
        }
    }

    pub fn value(self, s: &RunSummary) -> Option<f64> {
        if !s.completed() {
            return None;
        }
        match self {
            Endpoint::Feas => s.c_feas,
            Endpoint::FinalFeas => s.c_final_feas,
            Endpoint::Any => s.c_rep,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown endpoint {0:?}")]
pub struct UnknownEndpoint(pub String);

impl FromStr for Endpoint {
    type Err = UnknownEndpoint;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Endpoint::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| UnknownEndpoint(s.to_string()))
    }
}

/// Pair key: problem and seed.
pub type PairKey = (u32, u64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub problem_id: u32,
    pub seed: u64,
    pub value: Option<f64>,
    pub baseline: Option<f64>,
}

impl Pair {
    pub fn complete(&self) -> Option<(f64, f64)> {
        Some((self.value?, self.baseline?))
    }

    /// `value / baseline` over a complete pair.
    pub fn ratio(&self) -> Option<f64> {
        self.complete().map(|(v, b)| v / b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointReport {
    pub condition: String,
    pub baseline: String,
    pub endpoint: Endpoint,
    pub pairs: Vec<Pair>,
    /// Complete pairs where the condition has lower compliance.
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub incomplete: usize,
    /// `exp(mean(ln ratio))` over complete pairs.
    pub geometric_mean_ratio: Option<f64>,
}

fn by_key<'a>(summaries: &'a [RunSummary], condition: &str) -> BTreeMap<PairKey, &'a RunSummary> {
    summaries.iter().filter(|s| s.condition == condition).map(|s| ((s.problem_id, s.seed), s)).collect()
}

/// Pairs every (problem, seed) present on either side.
pub fn pairs(summaries: &[RunSummary], condition: &str, baseline: &str, endpoint: Endpoint) -> Vec<Pair> {
    let a = by_key(summaries, condition);
    let b = by_key(summaries, baseline);
    let mut keys: Vec<PairKey> = a.keys().chain(b.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|k| Pair {
            problem_id: k.0,
            seed: k.1,
            value: a.get(&k).and_then(|s| endpoint.value(s)),
            baseline: b.get(&k).and_then(|s| endpoint.value(s)),
        })
        .collect()
}

pub fn geometric_mean(ratios: &[f64]) -> Option<f64> {
    if ratios.is_empty() {
        return None;
    }
    Some((ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64).exp())
}

pub fn endpoint_report(
    summaries: &[RunSummary],
    condition: &str,
    baseline: &str,
    endpoint: Endpoint,
) -> EndpointReport {
    let pairs = pairs(summaries, condition, baseline, endpoint);
    let mut report = EndpointReport {
        condition: condition.to_string(),
        baseline: baseline.to_string(),
        endpoint,
        pairs: Vec::new(),
        wins: 0,
        losses: 0,
        ties: 0,
        incomplete: 0,
        geometric_mean_ratio: None,
    };
    let mut ratios = Vec::new();
    for p in &pairs {
        match p.complete() {
            Some((v, b)) => {
                match v.total_cmp(&b) {
                    std::cmp::Ordering::Less => report.wins += 1,
                    std::cmp::Ordering::Greater => report.losses += 1,
                    std::cmp::Ordering::Equal => report.ties += 1,
                }
                ratios.push(v / b);
            }
            None => report.incomplete += 1,
        }
    }
    report.geometric_mean_ratio = geometric_mean(&ratios);
    report.pairs = pairs;
    report
}

/// One report per non-baseline condition and endpoint. Empty when the
/// baseline has no summaries.
pub fn feasibility_score(summaries: &[RunSummary], baseline: &str, endpoints: &[Endpoint]) -> Vec<EndpointReport> {
    if !summaries.iter().any(|s| s.condition == baseline) {
        return Vec::new();
    }
    let mut conditions: Vec<&str> = summaries.iter().map(|s| s.condition.as_str()).filter(|c| *c != baseline).collect();
    conditions.sort();
    conditions.dedup();
    let mut out = Vec::new();
    for c in conditions {
        for &e in endpoints {
            out.push(endpoint_report(summaries, c, baseline, e));
        }
    }
    out
}
