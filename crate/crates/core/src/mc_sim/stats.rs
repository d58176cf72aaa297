//! Binomial confidence intervals and a rank-correlation trend test.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; avoid rounding just inside.
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Ranks starting at 1, ties sharing their average rank.
fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    pearson(&ranks(x), &ranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendTest {
    pub rho: f64,
    /// One-sided p-value against the alternative of a decreasing trend.
    pub p_value: f64,
    /// True when every permutation was enumerated.
    pub exact: bool,
}

const EXACT_LIMIT: usize = 10;
const SAMPLED_PERMUTATIONS: usize = 200_000;

/// Permutation test of H₀: no association, against y decreasing in x.
/// Exact enumeration up to 10 points, otherwise a fixed-seed sample of permutations.
pub fn spearman_decreasing_test(x: &[f64], y: &[f64]) -> Result<TrendTest> {
    if x.len() != y.len() || x.len() < 3 {
        return domain("trend test needs at least 3 paired values");
    }
    let rx = ranks(x);
    let ry = ranks(y);
    let observed = pearson(&rx, &ry);
    let tol = 1e-12;
    let mut perm = ry.clone();
    let (hits, total, exact) = if x.len() <= EXACT_LIMIT {
        let mut hits = 0u64;
        let mut total = 0u64;
        heap_permutations(&mut perm, &mut |p| {
            total += 1;
            if pearson(&rx, p) <= observed + tol {
                hits += 1;
            }
        });
        (hits, total, true)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_u64.wrapping_add(x.len() as u64));
        let mut hits = 1u64;
        for _ in 0..SAMPLED_PERMUTATIONS {
            perm.shuffle(&mut rng);
            if pearson(&rx, &perm) <= observed + tol {
                hits += 1;
            }
        }
        (hits, SAMPLED_PERMUTATIONS as u64 + 1, false)
    };
    Ok(TrendTest { rho: observed, p_value: hits as f64 / total as f64, exact })
}

fn heap_permutations(a: &mut [f64], visit: &mut impl FnMut(&[f64])) {
    let n = a.len();
    let mut c = vec![0usize; n];
    visit(a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate_and_shrinks() {
        let (lo, hi) = wilson_interval(90, 100, Z95);
        assert!(lo < 0.9 && 0.9 < hi);
        let (lo4, hi4) = wilson_interval(360, 400, Z95);
        let ratio = (hi - lo) / (hi4 - lo4);
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
        let (lo, hi) = wilson_interval(100, 100, Z95);
        assert!(hi == 1.0 && lo < 1.0 && lo > 0.95);
        assert_eq!(wilson_interval(0, 0, Z95), (0.0, 1.0));
        assert_eq!(wilson_interval(200, 200, Z99).1, 1.0);
        assert_eq!(wilson_interval(0, 200, Z99).0, 0.0);
    }

    #[test]
    fn wilson_reference_value() {
        // 8 of 10 at 95%: (0.4901624, 0.9433178)
        let (lo, hi) = wilson_interval(8, 10, Z95);
        assert!((lo - 0.490_162).abs() < 1e-5 && (hi - 0.943_316).abs() < 1e-5);
    }

    #[test]
    fn single_trial_interval_is_valid() {
        for s in [0, 1] {
            let (lo, hi) = wilson_interval(s, 1, Z95);
            assert!((0.0..=1.0).contains(&lo) && lo <= s as f64 && s as f64 <= hi && hi <= 1.0);
        }
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
        assert!((spearman_rho(&[1.0, 2.0, 3.0], &[9.0, 4.0, 1.0]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_p_value_for_perfect_decrease() {
        let x: Vec<f64> = (0..6).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -v * v).collect();
        let t = spearman_decreasing_test(&x, &y).unwrap();
        assert!(t.exact);
        assert!((t.p_value - 1.0 / 720.0).abs() < 1e-15);
        let up = spearman_decreasing_test(&x, &x).unwrap();
        assert!((up.p_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_p_value_is_deterministic() {
        let x: Vec<f64> = (0..14).map(|v| v as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 1.3).sin() - 0.2 * v).collect();
        let a = spearman_decreasing_test(&x, &y).unwrap();
        let b = spearman_decreasing_test(&x, &y).unwrap();
        assert_eq!(a, b);
        assert!(!a.exact && a.p_value < 0.05);
    }
}
