//! Log-space combinatorics and the Laguerre polynomial.
//!
//! Every photon-number weight in this crate is assembled from these helpers
//! and exponentiated only at the end, so factorials beyond 170 never overflow.
//! Short products (Pochhammer and falling factorials of order up to
//! [`DIRECT_PRODUCT_MAX`]) are summed term by term, which keeps the result
//! accurate even for arguments like 1e5 where a difference of two large
//! `ln Γ` values would lose ten digits.

use statrs::function::{factorial, gamma};

/// Orders up to this length are evaluated as explicit log-sums.
pub const DIRECT_PRODUCT_MAX: usize = 64;

/// `ln n!`
pub fn ln_factorial(n: usize) -> f64 {
    factorial::ln_factorial(n as u64)
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// `ln (x)_r = ln Γ(x + r) − ln Γ(x)`, the rising factorial, for `x > 0`.
pub fn ln_rising(x: f64, r: usize) -> f64 {
    debug_assert!(x > 0.0);
    if r <= DIRECT_PRODUCT_MAX {
        (0..r).map(|i| (x + i as f64).ln()).sum()
    } else {
        ln_gamma(x + r as f64) - ln_gamma(x)
    }
}

/// `ln Γ(x + 1) / Γ(x − k + 1)`, the falling factorial, for `x − k + 1 > 0`.
pub fn ln_falling(x: f64, k: usize) -> f64 {
    debug_assert!(x - k as f64 + 1.0 > 0.0);
    if k <= DIRECT_PRODUCT_MAX {
        (0..k).map(|i| (x - i as f64).ln()).sum()
    } else {
        ln_gamma(x + 1.0) - ln_gamma(x - k as f64 + 1.0)
    }
}

/// Generalized binomial coefficient `ln C(x, k) = ln Γ(x+1) − ln Γ(k+1) − ln Γ(x−k+1)`.
///
/// Only defined here for `x − k + 1 > 0`, where the coefficient is positive.
/// Returns `None` outside that range.
pub fn ln_binomial(x: f64, k: usize) -> Option<f64> {
    if !(x - k as f64 + 1.0 > 0.0) {
        return None;
    }
    Some(ln_falling(x, k) - ln_factorial(k))
}

/// `ln C(n, k)` for integers, `None` when `k > n`.
pub fn ln_choose(n: usize, k: usize) -> Option<f64> {
    if k > n {
        return None;
    }
    let k = k.min(n - k);
    Some(ln_falling(n as f64, k) - ln_factorial(k))
}

/// `ln((n + j)! / n!)`, the ladder factor picked up by `j` creation operators.
pub fn ln_ladder(n: usize, j: usize) -> f64 {
    (1..=j).map(|i| ((n + i) as f64).ln()).sum()
}

/// Laguerre polynomial `L_m(x)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k + 1 − x) L_k − k L_{k−1}`.
pub fn laguerre(m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Stable `ln Σ exp(v_i)`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_matches_explicit_sum() {
        // L_m(x) = Σ_n (−x)^n m! / ((n!)² (m−n)!)
        let explicit = |m: usize, x: f64| -> f64 {
            (0..=m)
                .map(|n| {
                    (-x).powi(n as i32)
                        * (ln_factorial(m) - 2.0 * ln_factorial(n) - ln_factorial(m - n)).exp()
                })
                .sum()
        };
        for m in 0..12 {
            for &x in &[-4.0, -1.0, -0.25, 0.0, 0.5] {
                assert_relative_eq!(laguerre(m, x), explicit(m, x), max_relative = 1e-12);
            }
        }
        assert_relative_eq!(laguerre(1, -1.0), 2.0);
        assert_relative_eq!(laguerre(2, -1.0), 3.5);
    }

    #[test]
    fn rising_and_falling_agree_with_gamma() {
        for &x in &[0.5, 1.0, 3.25, 17.0] {
            for r in [0usize, 1, 4, 9] {
                assert_relative_eq!(
                    ln_rising(x, r),
                    ln_gamma(x + r as f64) - ln_gamma(x),
                    epsilon = 1e-12
                );
            }
        }
        assert_relative_eq!(ln_falling(10.0, 3), (720.0f64).ln(), epsilon = 1e-13);
        assert_relative_eq!(
            ln_rising(2.0, 100),
            ln_gamma(102.0) - ln_gamma(2.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn binomials() {
        assert_relative_eq!(ln_choose(10, 3).unwrap().exp(), 120.0, max_relative = 1e-13);
        assert_relative_eq!(
            ln_choose(300, 150).unwrap(),
            ln_gamma(301.0) - 2.0 * ln_gamma(151.0),
            max_relative = 1e-12
        );
        assert!(ln_choose(3, 4).is_none());
        // C(2.5, 2) = 2.5·1.5/2
        assert_relative_eq!(
            ln_binomial(2.5, 2).unwrap().exp(),
            1.875,
            max_relative = 1e-13
        );
        assert!(ln_binomial(1.5, 3).is_none());
    }

    #[test]
    fn ladder_is_factorial_ratio() {
        assert_relative_eq!(ln_ladder(3, 2).exp(), 20.0, max_relative = 1e-14);
        assert_eq!(ln_ladder(5, 0), 0.0);
    }

    #[test]
    fn log_sum_exp_handles_empty_and_large() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln());
    }
}
