//! Binomial pmf evaluation and row tables for the tree-approximation sums.

/// Exact binomial pmf `B_m^k(q) = C(k,m) q^m (1-q)^{k-m}`.
pub fn binomial_pmf(m: usize, k: usize, q: f64) -> f64 {
    debug_assert!(m <= k);
    debug_assert!((0.0..=1.0).contains(&q));
    binomial_row(k, q)[m]
}

/// The full pmf row `[B_0^k(q), ..., B_k^k(q)]`.
///
/// Computed by the multiplicative recurrence from the lighter tail so the
/// base never underflows for the degree ranges used here.
pub fn binomial_row(k: usize, q: f64) -> Vec<f64> {
    if q <= 0.0 {
        let mut row = vec![0.0; k + 1];
        row[0] = 1.0;
        return row;
    }
    if q >= 1.0 {
        let mut row = vec![0.0; k + 1];
        row[k] = 1.0;
        return row;
    }
    if q > 0.5 {
        let mut row = binomial_row(k, 1.0 - q);
        row.reverse();
        return row;
    }
    let mut row = Vec::with_capacity(k + 1);
    let mut b = (1.0 - q).powi(k as i32);
    let ratio = q / (1.0 - q);
    for m in 0..=k {
        row.push(b);
        b *= (k - m) as f64 / (m + 1) as f64 * ratio;
    }
    row
}
