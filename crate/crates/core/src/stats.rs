//! Interval estimates for failure rates.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Wilson score interval for `failures` out of `trials`, clipped so it
/// always contains the point estimate.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = (center - half).clamp(0.0, 1.0).min(p);
    let hi = (center + half).clamp(0.0, 1.0).max(p);
    (lo, hi)
}

/// One-sided 95% upper limit when no failure was seen: `1 - 0.05^(1/n)`.
pub fn zero_failure_upper(trials: u64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    -(0.05f64.ln() / trials as f64).exp_m1()
}

/// Binomial standard error of the rate estimate.
pub fn binomial_std_error(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = failures as f64 / trials as f64;
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Mean and standard error of the mean of `xs`.
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
