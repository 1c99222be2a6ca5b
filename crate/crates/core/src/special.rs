//! Laguerre polynomials and log-factorials.

/// `L_n(x)` by the three-term recurrence
/// `(m+1) L_{m+1} = (2m+1−x) L_m − m L_{m−1}`.
pub fn laguerre(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - x;
    for m in 1..n {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 - x) * cur - mf * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sⁿ L_n(−x/s)` for `s, x ≥ 0`.
///
/// Runs the Laguerre recurrence on the scaled sequence
/// `S_{m+1} = [((2m+1)s + x) S_m − m s² S_{m−1}] / (m+1)`, which never divides
/// by `s`. When `s` is below `1e-12` the analytic limit `xⁿ/n!` is used.
pub fn scaled_laguerre(n: usize, s: f64, x: f64) -> f64 {
    if s < 1e-12 {
        return (1..=n).fold(1.0, |acc, m| acc * x / m as f64);
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = s + x;
    for m in 1..n {
        let mf = m as f64;
        let next = (((2.0 * mf + 1.0) * s + x) * cur - mf * s * s * prev) / (mf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Table of `ln m!` for `m = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(acc);
    for m in 1..=n {
        acc += (m as f64).ln();
        table.push(acc);
    }
    table
}

/// `ln Σ exp(terms)`, tolerating `-inf` entries. Empty or all `-inf`
/// yields `-inf`.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}
