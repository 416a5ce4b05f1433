//! Order-stable summation and confidence interval helpers.

use statrs::distribution::{Beta, ContinuousCDF};

/// Pairwise sum with a fixed association order.
///
/// Replicate outputs are collected in replicate order and reduced here
/// single-threaded, so estimates do not depend on the worker count. The
/// base case is Neumaier-compensated for accuracy.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        let mut c = 0.0;
        for &x in xs {
            let t = s + x;
            if s.abs() >= x.abs() {
                c += (s - t) + x;
            } else {
                c += (x - t) + s;
            }
            s = t;
        }
        s + c
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Two-pass sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n < 2 {
        return (mean(xs), 0.0);
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    let var = pairwise_sum(&sq) / (n as f64 - 1.0);
    (m, (var / n as f64).sqrt())
}

/// Exact (Clopper-Pearson) binomial confidence interval at level `1 - alpha`.
pub fn clopper_pearson(hits: u64, n: u64, alpha: f64) -> (f64, f64) {
    assert!(hits <= n && n > 0, "hits must not exceed trials");
    let (k, n_f) = (hits as f64, n as f64);
    let lo = if hits == 0 {
        0.0
    } else {
        Beta::new(k, n_f - k + 1.0)
            .expect("valid Beta parameters")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if hits == n {
        1.0
    } else {
        Beta::new(k + 1.0, n_f - k)
            .expect("valid Beta parameters")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}
