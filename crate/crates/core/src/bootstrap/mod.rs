//! Reserve distributions: the continuous-time bootstrap, the residual and
//! time-series bootstraps of the discrete model, and moment-matched laws.

mod ct;
mod matched;
mod residual;
mod timeseries;

pub use ct::{ct_bootstrap, ct_replicate, simulate_reserves_ct};
pub use matched::{moment_matched, LogNormalParam, MatchedDistribution, MatchedFamily};
pub use residual::{
    pearson_residuals, pearson_residuals_scaled, residual_bootstrap, PearsonResiduals,
    ResidualScaling,
};
pub use timeseries::{timeseries_bootstrap, timeseries_resample_params};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{
    estimate_discrete, ultimate_and_reserve, DiscreteParams, TailVarianceRule,
};
use crate::real::Real;
use crate::stats::{quantile_sorted, sort_values, variance};
use crate::triangle::ClaimsData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ct,
    Residual,
    Timeseries,
    Matched,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Ct,
        Method::Residual,
        Method::Timeseries,
        Method::Matched,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ct => "ct",
            Method::Residual => "residual",
            Method::Timeseries => "timeseries",
            Method::Matched => "matched",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Ct => "Continuous-time bootstrap",
            Method::Residual => "Residual bootstrap",
            Method::Timeseries => "Time series bootstrap",
            Method::Matched => "Moment-matched",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ct" => Ok(Method::Ct),
            "residual" => Ok(Method::Residual),
            "timeseries" => Ok(Method::Timeseries),
            "matched" => Ok(Method::Matched),
            _ => Err(Error::InvalidParameter(format!("unknown method {s:?}"))),
        }
    }
}

/// What to do when a bootstrap replicate's refitted jump law is infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasiblePolicy {
    /// Redraw the replicate on a fresh sub-stream.
    #[default]
    Resample,
    /// Use `max(X, ez (1 + 1e-6))` as the ratio.
    Clamp,
}

/// Variance fed to the moment-matched law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MsepSource {
    Bootstrap(Method),
    External(f64),
}

impl Default for MsepSource {
    fn default() -> Self {
        MsepSource::Bootstrap(Method::Ct)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapConfig<T> {
    pub replicates: usize,
    pub seed: u64,
    pub ez: T,
    pub tail_rule: TailVarianceRule,
    pub infeasible_policy: InfeasiblePolicy,
    /// Attempts per replicate under [`InfeasiblePolicy::Resample`].
    pub max_attempts: usize,
    /// Draw the time-series `Delta` and `T2` estimates from their exact laws.
    pub timeseries_shortcut: bool,
    pub residual_scaling: ResidualScaling,
    pub matched_family: MatchedFamily,
    pub lognormal_param: LogNormalParam,
    pub msep_source: MsepSource,
}

impl<T: Real> BootstrapConfig<T> {
    pub fn new(replicates: usize, seed: u64, ez: T) -> Self {
        Self {
            replicates,
            seed,
            ez,
            tail_rule: TailVarianceRule::default(),
            infeasible_policy: InfeasiblePolicy::default(),
            max_attempts: 1000,
            timeseries_shortcut: false,
            residual_scaling: ResidualScaling::default(),
            matched_family: MatchedFamily::default(),
            lognormal_param: LogNormalParam::default(),
            msep_source: MsepSource::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter(
                "the number of replicates must be >= 1".into(),
            ));
        }
        if !(self.ez > T::zero() && self.ez.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "E[Z] = {} must be > 0",
                self.ez
            )));
        }
        if self.max_attempts == 0 {
            return Err(Error::InvalidParameter("max_attempts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Counts of replicates showing each pathology.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub replicates: usize,
    /// At least one simulated `N < 0`.
    pub negative_n: usize,
    /// At least one simulated `D(i, j+1) > C(i, j)`, anywhere.
    pub d_exceeds_c: usize,
    /// Same, in the resimulated observed triangle.
    pub d_exceeds_c_upper: usize,
    /// Same, in the simulated future cells.
    pub d_exceeds_c_lower: usize,
    /// At least one simulated `C < 0`.
    pub negative_c: usize,
    /// Normal draws whose variance argument was negative and set to 0.
    pub variance_floors: usize,
    /// Replicate attempts discarded because the refit was infeasible.
    pub rejected_attempts: usize,
    /// Replicates whose ratio was clamped.
    pub clamped: usize,
    /// Development years whose residuals were left out of a pool.
    pub excluded_n_columns: Vec<usize>,
    pub excluded_d_columns: Vec<usize>,
}

impl Diagnostics {
    pub fn rate(count: usize, replicates: usize) -> f64 {
        if replicates == 0 {
            0.0
        } else {
            count as f64 / replicates as f64
        }
    }
}

/// Outcome of one bootstrap replicate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Replicate<T> {
    pub reserve: T,
    pub negative_n: bool,
    pub d_exceeds_c_upper: bool,
    pub d_exceeds_c_lower: bool,
    pub negative_c: bool,
    pub variance_floors: usize,
    pub rejected_attempts: usize,
    pub clamped: bool,
}

impl<T> Replicate<T> {
    pub fn new(reserve: T) -> Self {
        Self {
            reserve,
            negative_n: false,
            d_exceeds_c_upper: false,
            d_exceeds_c_lower: false,
            negative_c: false,
            variance_floors: 0,
            rejected_attempts: 0,
            clamped: false,
        }
    }
}

pub(crate) fn fold_diagnostics<T>(reps: &[Replicate<T>]) -> Diagnostics {
    let count = |f: fn(&Replicate<T>) -> bool| reps.iter().filter(|r| f(r)).count();
    Diagnostics {
        replicates: reps.len(),
        negative_n: count(|r| r.negative_n),
        d_exceeds_c: count(|r| r.d_exceeds_c_upper || r.d_exceeds_c_lower),
        d_exceeds_c_upper: count(|r| r.d_exceeds_c_upper),
        d_exceeds_c_lower: count(|r| r.d_exceeds_c_lower),
        negative_c: count(|r| r.negative_c),
        variance_floors: reps.iter().map(|r| r.variance_floors).sum(),
        rejected_attempts: reps.iter().map(|r| r.rejected_attempts).sum(),
        clamped: count(|r| r.clamped),
        ..Diagnostics::default()
    }
}

/// Runs `f(m)` for every replicate in parallel, keeping replicate order.
pub(crate) fn run_replicates<T, F>(replicates: usize, f: F) -> Result<Vec<Replicate<T>>>
where
    T: Send,
    F: Fn(u64) -> Result<Replicate<T>> + Sync + Send,
{
    (0..replicates as u64).into_par_iter().map(f).collect()
}

/// Summary statistics of a reserve distribution, in the reporting precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub replicates: usize,
    pub point_estimate: f64,
    pub mean: f64,
    pub msep: f64,
    /// `sqrt(msep)` in percent of the point estimate.
    pub msep_root_pct: f64,
    pub q995: f64,
    /// `q995 - point` in percent of the point estimate.
    pub q995_excess_pct: f64,
}

/// Unbiased variance as MSEP and the interpolated 99.5% quantile.
pub fn summarize<T: Real>(reserves: &[T], point_estimate: T) -> Result<Summary> {
    let msep = variance(reserves)?.as_f64();
    let mut sorted = reserves.to_vec();
    sort_values(&mut sorted);
    let q995 = quantile_sorted(&sorted, T::lit(0.995)).as_f64();
    let point = point_estimate.as_f64();
    Ok(Summary {
        replicates: reserves.len(),
        point_estimate: point,
        mean: crate::stats::mean(reserves).as_f64(),
        msep,
        msep_root_pct: 100.0 * msep.sqrt() / point,
        q995,
        q995_excess_pct: 100.0 * (q995 - point) / point,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReserveDistribution<T> {
    pub method: Method,
    /// One simulated reserve per replicate; empty for a moment-matched law.
    pub reserves: Vec<T>,
    pub summary: Summary,
    pub diagnostics: Diagnostics,
    pub matched: Option<MatchedDistribution>,
}

/// Estimates and point reserve shared by every method.
pub(crate) fn point_fit<T: Real>(
    data: &ClaimsData<T>,
    rule: TailVarianceRule,
) -> Result<(DiscreteParams<T>, T)> {
    let p = estimate_discrete(data, rule)?;
    let r = ultimate_and_reserve(data, &p)?.total;
    Ok((p, r))
}

pub(crate) fn finish<T: Real>(
    method: Method,
    reps: Vec<Replicate<T>>,
    point: T,
) -> Result<ReserveDistribution<T>> {
    let diagnostics = fold_diagnostics(&reps);
    let reserves: Vec<T> = reps.into_iter().map(|r| r.reserve).collect();
    let summary = summarize(&reserves, point)?;
    Ok(ReserveDistribution {
        method,
        reserves,
        summary,
        diagnostics,
        matched: None,
    })
}

/// Moment-matched law at the point reserve and the configured MSEP.
pub fn matched_from_msep<T: Real>(
    data: &ClaimsData<T>,
    msep: f64,
    cfg: &BootstrapConfig<T>,
) -> Result<ReserveDistribution<T>> {
    let (_, point) = point_fit(data, cfg.tail_rule)?;
    let law = moment_matched(
        point.as_f64(),
        msep,
        cfg.matched_family,
        cfg.lognormal_param,
    )?;
    Ok(ReserveDistribution {
        method: Method::Matched,
        reserves: Vec::new(),
        summary: law.summary(),
        diagnostics: Diagnostics::default(),
        matched: Some(law),
    })
}

/// Dispatches to the engine for `method`; the matched law resolves its MSEP from `cfg.msep_source`.
pub fn run_method<T: Real>(
    data: &ClaimsData<T>,
    method: Method,
    cfg: &BootstrapConfig<T>,
) -> Result<ReserveDistribution<T>> {
    match method {
        Method::Ct => ct_bootstrap(data, cfg),
        Method::Residual => residual_bootstrap(data, cfg),
        Method::Timeseries => timeseries_bootstrap(data, cfg),
        Method::Matched => {
            let msep = match cfg.msep_source {
                MsepSource::External(v) => v,
                MsepSource::Bootstrap(Method::Matched) => {
                    return Err(Error::InvalidParameter(
                        "the matched law cannot supply its own MSEP".into(),
                    ))
                }
                MsepSource::Bootstrap(m) => run_method(data, m, cfg)?.summary.msep,
            };
            matched_from_msep(data, msep, cfg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RngStream;
    use crate::real::Real;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn constant_sample_summary() {
        let s = summarize(&[5.0, 5.0, 5.0], 4.0).unwrap();
        assert_eq!(s.msep, 0.0);
        assert_eq!(s.msep_root_pct, 0.0);
        assert!((s.q995_excess_pct - 25.0).abs() < 1e-12);
        assert!(summarize(&[1.0], 1.0).is_err());
    }

    #[test]
    fn normal_sample_quantile() {
        let mut rng = RngStream::new(8, 0);
        let m = 100_000;
        let xs: Vec<f64> = (0..m)
            .map(|_| 10.0 + 2.0 * f64::sample_std_normal(&mut rng))
            .collect();
        let s = summarize(&xs, 10.0).unwrap();
        let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.995);
        let q = 10.0 + 2.0 * z;
        // Asymptotic standard error of an empirical quantile.
        let dens = (-(z * z) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt() / 2.0;
        let se = (0.995 * 0.005 / m as f64).sqrt() / dens;
        assert!((s.q995 - q).abs() < 3.0 * se, "{} vs {q}", s.q995);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn config_validation() {
        let data = crate::triangle::embedded_schnieper_dataset();
        let cfg = BootstrapConfig::new(0, 1, 1.0);
        assert!(ct_bootstrap(&data, &cfg).is_err());
        let cfg = BootstrapConfig::new(10, 1, -1.0);
        assert!(residual_bootstrap(&data, &cfg).is_err());
        let mut cfg = BootstrapConfig::new(10, 1, 1.0);
        cfg.msep_source = MsepSource::Bootstrap(Method::Matched);
        assert!(run_method(&data, Method::Matched, &cfg).is_err());
    }
}
