//! Wilcoxon signed-rank test on paired differences.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Largest nonzero-pair count handled by the exact null distribution.
pub const EXACT_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// Nonzero differences used.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub w: f64,
    pub p_two_sided: f64,
    /// Alternative: differences tend to be negative (`x < y`).
    pub p_less: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no nonzero differences; the statistic is undefined")]
    Undefined,
}

/// Average ranks of `values` (1-based), ties share their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Test on `x[i] - y[i]`.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<Wilcoxon, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    wilcoxon_differences(&d)
}

pub fn wilcoxon_differences(differences: &[f64]) -> Result<Wilcoxon, StatsError> {
    let d: Vec<f64> = differences.iter().copied().filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return Err(StatsError::Undefined);
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let (p_two_sided, p_less, method) = if n <= EXACT_MAX_N {
        let (lower, upper) = exact_tails(&ranks, w_plus);
        ((2.0 * lower.min(upper)).min(1.0), lower, Method::Exact)
    } else {
        let (two, less) = normal_p(n, w_plus, &tie_sizes(&abs), true);
        (two, less, Method::Normal)
    };
    Ok(Wilcoxon { n, w_plus, w_minus, w: w_plus.min(w_minus), p_two_sided, p_less, method })
}

/// `P(W+ <= w)` and `P(W+ >= w)` under random signs. Ranks are doubled
/// so half ranks from ties stay integral.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let obs = (w_plus * 2.0).round() as usize;
    let all = (1u64 << ranks.len()) as f64;
    let lower: u64 = counts[..=obs].iter().sum();
    let upper: u64 = counts[obs..].iter().sum();
    (lower as f64 / all, upper as f64 / all)
}

fn tie_sizes(abs: &[f64]) -> Vec<usize> {
    let mut v = abs.to_vec();
    v.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|x| **x == v[i]).count();
        sizes.push(j);
        i += j;
    }
    sizes
}

/// Normal approximation with tie-corrected variance. Returns the
/// two-sided and lower-tail p-values.
pub fn normal_p(n: usize, w_plus: f64, ties: &[usize], continuity: bool) -> (f64, f64) {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return (1.0, 1.0);
    }
    let sd = var.sqrt();
    let cc = if continuity { 0.5 } else { 0.0 };
    let std_normal = Normal::standard();
    let dev = ((w_plus - mean).abs() - cc).max(0.0);
    let two = (2.0 * (1.0 - std_normal.cdf(dev / sd))).min(1.0);
    let less = std_normal.cdf((w_plus - mean + cc) / sd);
    (two, less)
}
