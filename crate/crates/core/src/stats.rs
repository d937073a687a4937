//! Small statistics helpers for the Monte Carlo experiments.

/// z for a two-sided 95% interval; fixed so reports are reproducible.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval for a binomial proportion.
///
/// Returns `(center, halfwidth)`; the interval is `center ± halfwidth`,
/// clipped to [0, 1] by construction.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.5, 0.5);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (center, half)
}

/// Standard error of a binomial proportion estimate.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Upper critical value of the chi-squared distribution via the
/// Wilson–Hilferty cube approximation. Accurate to a few percent for the
/// degrees of freedom used here, which is plenty for a fixed-level test.
pub fn chi_squared_critical(df: u64, z_upper: f64) -> f64 {
    let k = df as f64;
    let t = 1.0 - 2.0 / (9.0 * k) + z_upper * (2.0 / (9.0 * k)).sqrt();
    k * t * t * t
}

/// z value for the upper 1% tail.
pub const Z_99: f64 = 2.326_347_874_040_841;

/// Pearson chi-squared statistic against a uniform expectation.
pub fn chi_squared_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let k = counts.len() as f64;
    let expected = total as f64 / k;
    counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum()
}

/// Total variation distance between two distributions given as
/// (outcome, probability) maps with identical key types.
pub fn total_variation<K: Ord>(
    a: &std::collections::BTreeMap<K, f64>,
    b: &std::collections::BTreeMap<K, f64>,
) -> f64 {
    let mut tv = 0.0;
    for (k, pa) in a {
        let pb = b.get(k).copied().unwrap_or(0.0);
        tv += (pa - pb).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            tv += pb;
        }
    }
    tv / 2.0
}
