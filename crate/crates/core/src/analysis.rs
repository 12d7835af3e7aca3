//! Run statistics, the Wilcoxon rank-sum test, BA-vs-MBA significance
//! labels, and dimension-wise population diversity.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator).
    pub std: f64,
}

/// Mean and sample standard deviation. The values are summed in sorted
/// order, so any permutation of the input gives a bit-identical summary.
pub fn summarize(samples: &[f64]) -> Result<SampleSummary> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let mut sq: Vec<f64> = sorted.iter().map(|v| (v - mean).powi(2)).collect();
    sq.sort_by(f64::total_cmp);
    let var = sq.iter().sum::<f64>() / (n - 1.0);
    Ok(SampleSummary {
        n: sorted.len(),
        mean,
        std: var.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankSumMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSumOutcome {
    /// Rank sum of the first sample.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub method: RankSumMethod,
}

/// Largest smaller-sample size for which the null distribution is
/// enumerated exactly.
pub const EXACT_MAX_SIZE: usize = 10;

struct Ranked {
    rank_sum_a: f64,
    tie_term: f64,
    has_ties: bool,
}

fn rank(a: &[f64], b: &[f64]) -> Ranked {
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut has_ties = false;
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // positions i..j share the average of ranks i+1..=j
        let avg = (i + 1 + j) as f64 / 2.0;
        let t = (j - i) as f64;
        if j - i > 1 {
            has_ties = true;
            tie_term += t * t * t - t;
        }
        rank_sum_a += avg * all[i..j].iter().filter(|e| e.1).count() as f64;
        i = j;
    }
    Ranked {
        rank_sum_a,
        tie_term,
        has_ties,
    }
}

fn validate_samples(a: &[f64], b: &[f64]) -> Result<()> {
    for s in [a, b] {
        if s.len() < 3 {
            return Err(Error::TooFewSamples {
                needed: 3,
                got: s.len(),
            });
        }
    }
    for (i, v) in a.iter().chain(b).enumerate() {
        if v.is_nan() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

/// Number of `k`-subsets of `{1..n}` for each value of
/// `sum - k(k+1)/2`, i.e. the coefficients of the Gaussian binomial
/// `[n choose k]_q`. `None` if a count overflows.
fn subset_sum_counts(n: usize, k: usize) -> Option<Vec<i128>> {
    // [n-k+j choose j]_q = [n-k+j-1 choose j-1]_q * (1 - q^(n-k+j)) / (1 - q^j)
    let mut poly: Vec<i128> = vec![1];
    for j in 1..=k {
        let m = n - k + j;
        let mut next = vec![0i128; poly.len() + m];
        for (s, &c) in poly.iter().enumerate() {
            next[s] = next[s].checked_add(c)?;
            next[s + m] = next[s + m].checked_sub(c)?;
        }
        for s in j..next.len() {
            next[s] = next[s].checked_add(next[s - j])?;
        }
        next.truncate(poly.len() + m - j);
        poly = next;
    }
    Some(poly)
}

fn exact_p(rank_sum_small: f64, small: usize, total: usize) -> Option<f64> {
    let counts = subset_sum_counts(total, small)?;
    let offset = (small * (small + 1) / 2) as f64;
    let u = (rank_sum_small - offset).round() as usize;
    let all: i128 = counts.iter().try_fold(0i128, |acc, &c| acc.checked_add(c))?;
    let lower: i128 = counts[..=u].iter().sum();
    let upper: i128 = counts[u..].iter().sum();
    let tail = lower.min(upper);
    Some((2.0 * tail as f64 / all as f64).min(1.0))
}

fn normal_p(rank_sum_a: f64, m: usize, n: usize, tie_term: f64) -> f64 {
    let (mf, nf) = (m as f64, n as f64);
    let total = mf + nf;
    let mu = mf * (total + 1.0) / 2.0;
    let var = mf * nf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((rank_sum_a - mu).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Two-sided Wilcoxon rank-sum test with average ranks for ties.
///
/// Exact enumeration when the smaller sample has at most
/// [`EXACT_MAX_SIZE`] values and there are no ties; otherwise the normal
/// approximation with tie and continuity corrections.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumOutcome> {
    validate_samples(a, b)?;
    let ranked = rank(a, b);
    if !ranked.has_ties && a.len().min(b.len()) <= EXACT_MAX_SIZE {
        // Enumerate on the smaller sample (the first one on equal sizes) so
        // swapping the arguments reads the same counts.
        let total = a.len() + b.len();
        let (rs, k) = if b.len() < a.len() {
            let all = (total * (total + 1) / 2) as f64;
            (all - ranked.rank_sum_a, b.len())
        } else {
            (ranked.rank_sum_a, a.len())
        };
        if let Some(p) = exact_p(rs, k, total) {
            return Ok(RankSumOutcome {
                statistic: ranked.rank_sum_a,
                p_value: p,
                method: RankSumMethod::Exact,
            });
        }
    }
    Ok(RankSumOutcome {
        statistic: ranked.rank_sum_a,
        p_value: normal_p(ranked.rank_sum_a, a.len(), b.len(), ranked.tie_term),
        method: RankSumMethod::Normal,
    })
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<f64> {
    rank_sum_test(a, b).map(|o| o.p_value)
}

/// Normal-approximation p-value regardless of sample size or ties.
pub fn wilcoxon_rank_sum_normal(a: &[f64], b: &[f64]) -> Result<f64> {
    validate_samples(a, b)?;
    let ranked = rank(a, b);
    Ok(normal_p(ranked.rank_sum_a, a.len(), b.len(), ranked.tie_term))
}

/// Outcome of MBA relative to BA on a minimization problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Significance {
    /// MBA mean is lower.
    #[serde(rename = "+")]
    Better,
    /// MBA mean is higher.
    #[serde(rename = "-")]
    Worse,
    /// Within tolerance.
    #[serde(rename = "*")]
    Equal,
}

impl fmt::Display for Significance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Significance::Better => "+",
            Significance::Worse => "-",
            Significance::Equal => "*",
        })
    }
}

/// Relative tolerance for treating two means as equal.
pub const LABEL_TOLERANCE: f64 = 1e-3;

/// Labels MBA against BA from their means. Differences within
/// `1e-3 * max(|mba|, |ba|, 1)` count as equal.
pub fn significance_label(mean_mba: f64, mean_ba: f64) -> Significance {
    let tol = LABEL_TOLERANCE * mean_mba.abs().max(mean_ba.abs()).max(1.0);
    if mean_mba < mean_ba - tol {
        Significance::Better
    } else if mean_mba > mean_ba + tol {
        Significance::Worse
    } else {
        Significance::Equal
    }
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Dimension-wise diversity: per axis, the mean absolute distance to the
/// axis median, then averaged over axes.
pub fn diversity<P: AsRef<[f64]>>(positions: &[P]) -> Result<f64> {
    let first = positions.first().ok_or(Error::TooFewSamples { needed: 1, got: 0 })?;
    let dim = first.as_ref().len();
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "positions",
            reason: "dimension must be at least 1".into(),
        });
    }
    for p in positions {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.as_ref().len(),
            });
        }
    }
    let n = positions.len() as f64;
    let mut column = vec![0.0; positions.len()];
    let mut total = 0.0;
    for j in 0..dim {
        for (c, p) in column.iter_mut().zip(positions) {
            *c = p.as_ref()[j];
        }
        let med = median_of(&mut column);
        total += column.iter().map(|x| (med - x).abs()).sum::<f64>() / n;
    }
    Ok(total / dim as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySeries {
    pub div: Vec<f64>,
    pub div_max: f64,
    /// Exploration percentage per iteration.
    pub xpl: Vec<f64>,
    /// Exploitation percentage per iteration.
    pub xpt: Vec<f64>,
}

impl DiversitySeries {
    pub fn mean_xpl(&self) -> f64 {
        self.xpl.iter().sum::<f64>() / self.xpl.len() as f64
    }

    pub fn mean_xpt(&self) -> f64 {
        self.xpt.iter().sum::<f64>() / self.xpt.len() as f64
    }
}

/// Exploration/exploitation percentages relative to the largest diversity
/// in the history. An all-zero history is pure exploitation.
pub fn xpl_xpt(div_history: &[f64]) -> Result<DiversitySeries> {
    if div_history.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    for (index, &value) in div_history.iter().enumerate() {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::NegativeDiversity { index, value });
        }
    }
    let div_max = div_history.iter().copied().fold(0.0, f64::max);
    let (xpl, xpt) = if div_max == 0.0 {
        (vec![0.0; div_history.len()], vec![100.0; div_history.len()])
    } else {
        div_history
            .iter()
            .map(|&d| (100.0 * d / div_max, 100.0 * (d - div_max).abs() / div_max))
            .unzip()
    };
    Ok(DiversitySeries {
        div: div_history.to_vec(),
        div_max,
        xpl,
        xpt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_examples() {
        let s = summarize(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std), (1.0, 0.0));
        let s = summarize(&[0.0, 2.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-15);
        assert!(summarize(&[]).is_err());
        assert!(summarize(&[1.0]).is_err());
    }

    #[test]
    fn wilcoxon_identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(wilcoxon_rank_sum(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn wilcoxon_exact_small() {
        let o = rank_sum_test(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(o.method, RankSumMethod::Exact);
        assert_eq!(o.statistic, 6.0);
        assert_eq!(o.p_value, 0.1);
        let p = wilcoxon_rank_sum(&[1.0, 2.0, 3.0, 4.0, 5.0], &[6.0, 7.0, 8.0, 9.0, 10.0]).unwrap();
        assert_eq!(p, 2.0 / 252.0);
    }

    #[test]
    fn wilcoxon_too_small() {
        assert!(wilcoxon_rank_sum(&[1.0, 2.0], &[3.0, 4.0, 5.0]).is_err());
    }

    #[test]
    fn gaussian_binomial_counts() {
        // [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
        assert_eq!(subset_sum_counts(4, 2).unwrap(), vec![1, 1, 2, 1, 1]);
        let c = subset_sum_counts(20, 10).unwrap();
        assert_eq!(c.iter().sum::<i128>(), 184_756);
    }

    #[test]
    fn ties_use_normal_path() {
        let o = rank_sum_test(&[1.0, 2.0, 2.0], &[2.0, 3.0, 4.0]).unwrap();
        assert_eq!(o.method, RankSumMethod::Normal);
        assert!(o.p_value > 0.0 && o.p_value <= 1.0);
    }

    #[test]
    fn labels() {
        assert_eq!(significance_label(6.433e-05, 1.622e+01), Significance::Better);
        assert_eq!(significance_label(3.0, 3.0), Significance::Equal);
        assert_eq!(significance_label(-3.124, -3.251), Significance::Worse);
        assert_eq!(significance_label(14.7597, 14.7553), Significance::Equal);
        // 21.2838 vs 21.2409 differs by 2.0e-3 relative, outside the 1e-3 band.
        assert_eq!(significance_label(21.2838, 21.2409), Significance::Worse);
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity(&vec![vec![3.0, 1.0]; 4]).unwrap(), 0.0);
        assert_eq!(diversity(&[[-1.0], [1.0]]).unwrap(), 1.0);
        let d = diversity(&[[0.0, 0.0], [0.0, 2.0], [0.0, 4.0]]).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
        let empty: [[f64; 1]; 0] = [];
        assert!(diversity(&empty).is_err());
    }

    #[test]
    fn xpl_xpt_examples() {
        let s = xpl_xpt(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!(s.xpl, vec![100.0; 3]);
        assert_eq!(s.xpt, vec![0.0; 3]);
        let s = xpl_xpt(&[2.0, 1.0]).unwrap();
        assert_eq!(s.xpl, vec![100.0, 50.0]);
        assert_eq!(s.xpt, vec![0.0, 50.0]);
        let s = xpl_xpt(&[0.0, 0.0]).unwrap();
        assert_eq!(s.xpl, vec![0.0, 0.0]);
        assert_eq!(s.xpt, vec![100.0, 100.0]);
        assert!(xpl_xpt(&[1.0, -0.5]).is_err());
        assert!(xpl_xpt(&[]).is_err());
    }
}
