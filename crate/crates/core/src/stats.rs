//! Small statistical helpers: weighted regression through the origin,
//! sample moments, empirical quantiles and Kolmogorov-Smirnov tests.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::real::Real;

/// Weighted least squares fit of `y = slope * x` (no intercept).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginFit<T> {
    pub slope: T,
    /// `sum w x^2`
    pub sxx: T,
    /// Weighted residual sum of squares.
    pub rss: T,
    /// Weighted total sum of squares about zero.
    pub tss: T,
    /// Residual degrees of freedom, `points - 1`.
    pub df: usize,
}

pub fn wls_through_origin<T: Real>(x: &[T], y: &[T], w: &[T]) -> Result<OriginFit<T>> {
    if x.len() != y.len() || x.len() != w.len() {
        return Err(Error::SizeMismatch(
            "x, y and w must have equal length".into(),
        ));
    }
    let used: Vec<usize> = (0..x.len()).filter(|&k| w[k] > T::zero()).collect();
    if used.is_empty() {
        return Err(Error::Regression("all weights are zero".into()));
    }
    let sxx: T = used.iter().map(|&k| w[k] * x[k] * x[k]).sum();
    if !(sxx > T::zero()) {
        return Err(Error::Regression("all regressors are zero".into()));
    }
    let sxy: T = used.iter().map(|&k| w[k] * x[k] * y[k]).sum();
    let slope = sxy / sxx;
    let rss = used
        .iter()
        .map(|&k| {
            let r = y[k] - slope * x[k];
            w[k] * r * r
        })
        .sum();
    let tss = used.iter().map(|&k| w[k] * y[k] * y[k]).sum();
    Ok(OriginFit {
        slope,
        sxx,
        rss,
        tss,
        df: used.len() - 1,
    })
}

pub fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::of_usize(xs.len())
}

/// Unbiased sample variance, two-pass.
pub fn variance<T: Real>(xs: &[T]) -> Result<T> {
    if xs.len() < 2 {
        return Err(Error::TooFewValues {
            needed: 2,
            got: xs.len(),
        });
    }
    // Shifted by the first value so a constant sample gives exactly 0.
    let x0 = xs[0];
    let m = xs.iter().map(|&x| x - x0).sum::<T>() / T::of_usize(xs.len());
    let ss: T = xs.iter().map(|&x| (x - x0 - m) * (x - x0 - m)).sum();
    Ok(ss / T::of_usize(xs.len() - 1))
}

/// Mean, unbiased variance, and standard errors of both.
///
/// The standard error of the variance uses the sample fourth central moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub variance: f64,
    pub mean_se: f64,
    pub variance_se: f64,
}

pub fn moment_estimate<T: Real>(xs: &[T]) -> Result<MomentEstimate> {
    let v: Vec<f64> = xs.iter().map(|x| x.as_f64()).collect();
    let var = variance(&v)?;
    let m = mean(&v);
    let n = v.len() as f64;
    let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    Ok(MomentEstimate {
        mean: m,
        variance: var,
        mean_se: (var / n).sqrt(),
        variance_se: ((m4 - var * var).max(0.0) / n).sqrt(),
    })
}

pub fn sort_values<T: Real>(xs: &mut [T]) {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
}

/// Empirical quantile of sorted data by linear interpolation of order
/// statistics at position `(len - 1) p`.
pub fn quantile_sorted<T: Real>(sorted: &[T], p: T) -> T {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (T::of_usize(sorted.len() - 1)) * p;
    let lo = h.floor();
    let k = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    if k + 1 >= sorted.len() {
        return sorted[k];
    }
    let frac = h - lo;
    sorted[k] + frac * (sorted[k + 1] - sorted[k])
}

/// Result of a Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

impl KsResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Survival function of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Jacobi theta form converges fast for small x.
        let y = (-std::f64::consts::PI.powi(2) / (8.0 * x * x)).exp();
        let s: f64 = (0..20).map(|k| y.powi((2 * k + 1) * (2 * k + 1))).sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / x * s;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let s: f64 = (1..=100)
        .map(|k| {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * kf * kf * x * x).exp()
        })
        .sum();
    (2.0 * s).clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, effective_n: f64) -> f64 {
    let sq = effective_n.sqrt();
    kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample<T: Real>(a: &[T], b: &[T]) -> KsResult {
    let mut x: Vec<f64> = a.iter().map(|v| v.as_f64()).collect();
    let mut y: Vec<f64> = b.iter().map(|v| v.as_f64()).collect();
    sort_values(&mut x);
    sort_values(&mut y);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = (n * m) as f64 / (n + m) as f64;
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, en),
    }
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
pub fn ks_one_sample<T: Real>(sample: &[T], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut x: Vec<f64> = sample.iter().map(|v| v.as_f64()).collect();
    sort_values(&mut x);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = cdf(v);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
    }
}
