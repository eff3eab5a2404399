//! Binned densities of reserve distributions.

use ctreserve_core::bootstrap::MatchedDistribution;
use ctreserve_core::stats::{quantile_sorted, sort_values};

/// Equal-width bins; `mass[k]` is the probability of `[edges[k], edges[k+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub rule: &'static str,
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
}

const MAX_BINS: usize = 2000;
const MATCHED_BINS: usize = 200;

impl Histogram {
    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn density(&self, k: usize) -> f64 {
        self.mass[k] / (self.edges[k + 1] - self.edges[k])
    }

    fn equal_width(lo: f64, width: f64, bins: usize) -> Vec<f64> {
        (0..=bins).map(|k| lo + width * k as f64).collect()
    }
}

/// Freedman-Diaconis binning of a sample: width `2 IQR / m^(1/3)`.
pub fn freedman_diaconis(values: &[f64]) -> Histogram {
    let mut sorted = values.to_vec();
    sort_values(&mut sorted);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let span = hi - lo;
    if width.is_nan() || width <= 0.0 || span / width > MAX_BINS as f64 {
        width = if span > 0.0 {
            span / MAX_BINS.min(sorted.len()) as f64
        } else {
            1.0
        };
    }
    let bins = ((span / width).ceil() as usize).max(1);
    let edges = Histogram::equal_width(lo, width, bins);
    let mut counts = vec![0usize; bins];
    for &v in &sorted {
        let k = (((v - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let m = sorted.len() as f64;
    Histogram {
        rule: "freedman-diaconis",
        edges,
        mass: counts.into_iter().map(|c| c as f64 / m).collect(),
    }
}

/// Equal-width bins between the 0.05% and 99.95% quantiles with exact masses.
pub fn matched_bins(law: &MatchedDistribution) -> Histogram {
    let (lo, hi) = (law.quantile(0.0005), law.quantile(0.9995));
    let width = if hi > lo {
        (hi - lo) / MATCHED_BINS as f64
    } else {
        1.0
    };
    let bins = if hi > lo { MATCHED_BINS } else { 1 };
    let edges = Histogram::equal_width(lo, width, bins);
    let mass = edges
        .windows(2)
        .map(|w| law.cdf(w[1]) - law.cdf(w[0]))
        .collect();
    Histogram {
        rule: "quantile-range",
        edges,
        mass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctreserve_core::bootstrap::{moment_matched, LogNormalParam, MatchedFamily};

    #[test]
    fn sample_masses_sum_to_one() {
        let xs: Vec<f64> = (0..1000).map(|k| ((k * 37) % 1000) as f64 / 10.0).collect();
        let h = freedman_diaconis(&xs);
        assert!((h.mass.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(h.edges.len(), h.mass.len() + 1);
        // IQR 50, m^(1/3) = 10.
        assert!((h.width() - 10.0).abs() < 0.1);
        assert!(*h.edges.last().unwrap() >= 99.9);
    }

    #[test]
    fn constant_sample_has_one_bin() {
        let h = freedman_diaconis(&[3.0; 10]);
        assert_eq!(h.mass, vec![1.0]);
    }

    #[test]
    fn matched_law_bins() {
        let law =
            moment_matched(100.0, 400.0, MatchedFamily::Gamma, LogNormalParam::Standard).unwrap();
        let h = matched_bins(&law);
        assert_eq!(h.mass.len(), 200);
        assert!((h.mass.iter().sum::<f64>() - 0.999).abs() < 1e-6);
    }
}
