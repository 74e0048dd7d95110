//! Quality indicator and statistics used to compare algorithms.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Inverted generational distance: mean over `reference` of the distance
/// to the nearest point of `approx`.
pub fn igd(approx: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if approx.is_empty() || reference.is_empty() {
        return Err(Error::contract("IGD needs non-empty point sets"));
    }
    let m = reference[0].len();
    if approx.iter().chain(reference).any(|p| p.len() != m) {
        return Err(Error::contract("IGD point sets differ in dimension"));
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            approx
                .iter()
                .map(|a| distance(r, a))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Running IGD of a growing point set: keeps the nearest distance for
/// every reference point so each insertion costs `O(|R|)`.
#[derive(Debug, Clone)]
pub struct IgdArchive {
    reference: Vec<Vec<f64>>,
    nearest: Vec<f64>,
}

impl IgdArchive {
    pub fn new(reference: Vec<Vec<f64>>) -> Self {
        let nearest = vec![f64::INFINITY; reference.len()];
        Self { reference, nearest }
    }

    pub fn insert(&mut self, point: &[f64]) {
        for (r, best) in self.reference.iter().zip(self.nearest.iter_mut()) {
            *best = best.min(distance(r, point));
        }
    }

    pub fn value(&self) -> f64 {
        self.nearest.iter().sum::<f64>() / self.nearest.len() as f64
    }
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Mid-ranks (1-based) of the pooled sample `a ++ b`.
fn pooled_ranks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    ranks
}

/// Wilcoxon rank-sum statistic: sum of the pooled ranks of `a`.
pub fn rank_sum(a: &[f64], b: &[f64]) -> f64 {
    pooled_ranks(a, b)[..a.len()].iter().sum()
}

/// Number of ways to pick `k` of the ranks `1..=n` with each attainable sum,
/// indexed by sum.
fn rank_sum_counts(n: usize, k: usize) -> Vec<u128> {
    let max = n * (n + 1) / 2;
    // table[j][s]: subsets of size j with sum s
    let mut table = vec![vec![0u128; max + 1]; k + 1];
    table[0][0] = 1;
    for r in 1..=n {
        for j in (1..=k.min(r)).rev() {
            for s in (r..=max).rev() {
                table[j][s] += table[j - 1][s - r];
            }
        }
    }
    table.swap_remove(k)
}

/// Two-sided p-value of the rank-sum test. Exact for small samples without
/// ties, normal approximation with tie and continuity correction otherwise.
pub fn rank_sum_p_value(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let ranks = pooled_ranks(a, b);
    let w: f64 = ranks[..n1].iter().sum();
    let has_ties = {
        let mut r = ranks.clone();
        r.sort_by(f64::total_cmp);
        r.windows(2).any(|p| p[0] == p[1])
    };
    let mean = n1 as f64 * (n as f64 + 1.0) / 2.0;
    if !has_ties && n <= 40 {
        let counts = rank_sum_counts(n, n1);
        let total: u128 = counts.iter().sum();
        let w = w as usize;
        let lower: u128 = counts[..=w].iter().sum();
        let upper: u128 = counts[w..].iter().sum();
        let p = 2.0 * lower.min(upper) as f64 / total as f64;
        return p.min(1.0);
    }
    let tie_term: f64 = {
        let mut sorted = ranks.clone();
        sorted.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
                j += 1;
            }
            let t = (j - i + 1) as f64;
            acc += t * t * t - t;
            i = j + 1;
        }
        acc
    };
    let nf = n as f64;
    let var = n1 as f64 * n2 as f64 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::standard();
    (2.0 * (1.0 - normal.cdf(z))).min(1.0)
}

/// Outcome of comparing a comparator's IGD samples against the reference algorithm's.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    /// Comparator significantly better (lower IGD).
    Better,
    /// Comparator significantly worse.
    Worse,
    /// No significant difference.
    Similar,
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Better => "+",
            Mark::Worse => "-",
            Mark::Similar => "≈",
        })
    }
}

/// Two-sided rank-sum comparison of `comparator` against `reference`.
pub fn significance(reference: &[f64], comparator: &[f64], alpha: f64) -> Result<Mark> {
    if reference.len() < 3 || comparator.len() < 3 {
        return Err(Error::contract(format!(
            "significance needs at least 3 samples per side, got {} and {}",
            reference.len(),
            comparator.len()
        )));
    }
    if rank_sum_p_value(reference, comparator) >= alpha {
        return Ok(Mark::Similar);
    }
    let (ma, mb) = (median(reference).unwrap(), median(comparator).unwrap());
    let comparator_lower = if mb != ma {
        mb < ma
    } else {
        let expected = comparator.len() as f64 * (reference.len() + comparator.len() + 1) as f64 / 2.0;
        rank_sum(comparator, reference) < expected
    };
    Ok(if comparator_lower { Mark::Better } else { Mark::Worse })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn igd_examples() {
        let r = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        assert_eq!(igd(&r, &r).unwrap(), 0.0);
        let v = igd(&[vec![0.0, 0.0]], &r).unwrap();
        assert!((v - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
        assert!(igd(&[], &r).is_err());
        assert!(igd(&[vec![0.0]], &r).is_err());
    }

    #[test]
    fn archive_matches_batch() {
        let r = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
        let pts = vec![vec![0.2, 0.9], vec![0.7, 0.4]];
        let mut a = IgdArchive::new(r.clone());
        for p in &pts {
            a.insert(p);
        }
        assert!((a.value() - igd(&pts, &r).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[0.9, 0.5, 0.7]), Some(0.7));
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn rank_sum_with_ties() {
        assert_eq!(rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 6.0);
        assert_eq!(rank_sum(&[1.0, 1.0], &[1.0, 1.0]), 5.0);
    }

    #[test]
    fn exact_p_value() {
        // complete separation of 3 vs 3: 2 of 20 label assignments are as extreme
        let p = rank_sum_p_value(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        assert!((p - 0.1).abs() < 1e-15);
    }

    #[test]
    fn significance_examples() {
        let a = [0.3, 0.5, 0.4, 0.6, 0.2];
        assert_eq!(significance(&a, &a, 0.05).unwrap(), Mark::Similar);
        let worse = significance(&[1.0; 5], &[10.0; 5], 0.05).unwrap();
        assert_eq!(worse, Mark::Worse);
        let better = significance(&[10.0, 11.0, 12.0, 13.0, 14.0], &[1.0, 2.0, 3.0, 4.0, 5.0], 0.05).unwrap();
        assert_eq!(better, Mark::Better);
        assert!(significance(&[1.0, 2.0], &[1.0, 2.0, 3.0], 0.05).is_err());
        assert_eq!(Mark::Similar.to_string(), "≈");
    }
}
