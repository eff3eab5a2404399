use std::path::PathBuf;

use ctreserve_core::bootstrap::{
    InfeasiblePolicy, LogNormalParam, MatchedFamily, Method, MsepSource, ResidualScaling,
};
use ctreserve_core::estimators::TailVarianceRule;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Schnieper,
    Csv {
        new_claims: PathBuf,
        development: PathBuf,
        exposure: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DataSource,
    /// Methods in output order; empty with `calibrate_only`.
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub seed: u64,
    /// `E[Z]` values; the first drives the main run, all of them the sweep.
    pub ez: Vec<f64>,
    pub tail_rule: TailVarianceRule,
    pub infeasible_policy: InfeasiblePolicy,
    pub residual_scaling: ResidualScaling,
    pub timeseries_shortcut: bool,
    pub matched_family: MatchedFamily,
    pub lognormal_param: LogNormalParam,
    pub msep_source: MsepSource,
    pub out_dir: PathBuf,
    pub calibrate_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Schnieper,
            methods: Method::ALL.to_vec(),
            replicates: 100_000,
            seed: 42,
            ez: vec![1.0],
            tail_rule: TailVarianceRule::default(),
            infeasible_policy: InfeasiblePolicy::default(),
            residual_scaling: ResidualScaling::default(),
            timeseries_shortcut: false,
            matched_family: MatchedFamily::default(),
            lognormal_param: LogNormalParam::default(),
            msep_source: MsepSource::default(),
            out_dir: PathBuf::from("out"),
            calibrate_only: false,
        }
    }
}

impl RunConfig {
    /// Checks what can be checked before the data are read.
    pub fn validate(&self) -> CliResult<()> {
        if self.replicates < 2 && !self.calibrate_only {
            return Err(CliError::config("--M must be at least 2"));
        }
        if self.ez.is_empty() {
            return Err(CliError::config("at least one --ez value is needed"));
        }
        if let Some(bad) = self.ez.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(CliError::config(format!(
                "--ez {bad} must be a positive number"
            )));
        }
        if let MsepSource::External(v) = self.msep_source {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::config(format!("external MSEP {v} must be >= 0")));
            }
        }
        if self.msep_source == MsepSource::Bootstrap(Method::Matched) {
            return Err(CliError::config(
                "the matched law cannot supply its own MSEP",
            ));
        }
        Ok(())
    }
}

pub fn parse_method_list(s: &str) -> CliResult<Vec<Method>> {
    if s == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',') {
        let m: Method = part.trim().parse().map_err(|_| {
            CliError::config(format!(
                "unknown method {part:?}; expected ct, residual, timeseries, matched or all"
            ))
        })?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

pub fn parse_msep_source(s: &str) -> CliResult<MsepSource> {
    if let Some(v) = s.strip_prefix("external=") {
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::config(format!("external MSEP {v:?} is not a number")))?;
        return Ok(MsepSource::External(v));
    }
    match s {
        "ct" | "residual" | "timeseries" => {
            Ok(MsepSource::Bootstrap(s.parse().expect("known method")))
        }
        _ => Err(CliError::config(format!(
            "unknown MSEP source {s:?}; expected ct, residual, timeseries or external=<value>"
        ))),
    }
}
