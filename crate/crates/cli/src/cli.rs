use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctreserve_core::bootstrap::{InfeasiblePolicy, LogNormalParam, MatchedFamily, ResidualScaling};
use ctreserve_core::estimators::TailVarianceRule;

use crate::config::{parse_method_list, parse_msep_source, DataSource, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "ctreserve",
    version,
    about = "Continuous-time claims reserving with bootstrap reserve distributions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate the models, run the reserving methods and write the reports.
    Run(RunArgs),
    /// Write the embedded data set as CSV files.
    Export {
        #[arg(long, default_value = "data")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DatasetArg {
    Schnieper,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TailArg {
    /// Force the last variance estimates to zero.
    Paper,
    /// Keep the estimator value where it has degrees of freedom.
    Formula,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InfeasibleArg {
    Resample,
    Clamp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScalingArg {
    Dof,
    None,
    PerColumn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Lognormal,
    Gamma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LogNormalArg {
    Standard,
    Paper,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(
        long,
        value_enum,
        default_value = "schnieper",
        env = "CTRESERVE_DATASET"
    )]
    pub dataset: DatasetArg,
    #[arg(long, env = "CTRESERVE_N_CSV")]
    pub n_csv: Option<PathBuf>,
    #[arg(long, env = "CTRESERVE_D_CSV")]
    pub d_csv: Option<PathBuf>,
    #[arg(long, env = "CTRESERVE_EXPOSURE_CSV")]
    pub exposure_csv: Option<PathBuf>,
    /// ct, residual, timeseries, matched, a comma separated list, or all.
    #[arg(long, default_value = "all", env = "CTRESERVE_METHOD")]
    pub method: String,
    /// Number of bootstrap replicates.
    #[arg(long = "M", default_value_t = 100_000, env = "CTRESERVE_M")]
    pub replicates: usize,
    #[arg(long, default_value_t = 42, env = "CTRESERVE_SEED")]
    pub seed: u64,
    /// Mean jump size; repeat for a sensitivity sweep.
    #[arg(long, default_values_t = vec![1.0], env = "CTRESERVE_EZ", value_delimiter = ',')]
    pub ez: Vec<f64>,
    #[arg(
        long,
        value_enum,
        default_value = "formula",
        env = "CTRESERVE_TAIL_VARIANCE"
    )]
    pub tail_variance: TailArg,
    #[arg(
        long,
        value_enum,
        default_value = "resample",
        env = "CTRESERVE_INFEASIBLE"
    )]
    pub infeasible: InfeasibleArg,
    /// Rescaling of the Pearson residuals of the residual bootstrap.
    #[arg(
        long,
        value_enum,
        default_value = "dof",
        env = "CTRESERVE_RESIDUAL_SCALING"
    )]
    pub residual_scaling: ScalingArg,
    /// Draw the time-series development estimates from their exact laws.
    #[arg(long, env = "CTRESERVE_TIMESERIES_SHORTCUT")]
    pub timeseries_shortcut: bool,
    #[arg(
        long,
        value_enum,
        default_value = "lognormal",
        env = "CTRESERVE_MATCHED_FAMILY"
    )]
    pub matched_family: FamilyArg,
    #[arg(
        long,
        value_enum,
        default_value = "standard",
        env = "CTRESERVE_LOGNORMAL_PARAM"
    )]
    pub lognormal_param: LogNormalArg,
    /// ct, residual, timeseries or external=<value>.
    #[arg(long, default_value = "ct", env = "CTRESERVE_MSEP_SOURCE")]
    pub msep_source: String,
    #[arg(long, default_value = "out", env = "CTRESERVE_OUT")]
    pub out: PathBuf,
    /// Only write calibration.json.
    #[arg(long, env = "CTRESERVE_CALIBRATE_ONLY")]
    pub calibrate_only: bool,
}

impl RunArgs {
    pub fn into_config(self) -> CliResult<RunConfig> {
        let source = match self.dataset {
            DatasetArg::Schnieper => DataSource::Schnieper,
            DatasetArg::Csv => {
                let need = |p: Option<PathBuf>, flag: &str| {
                    p.ok_or_else(|| CliError::config(format!("--dataset csv needs {flag}")))
                };
                DataSource::Csv {
                    new_claims: need(self.n_csv, "--n-csv")?,
                    development: need(self.d_csv, "--d-csv")?,
                    exposure: need(self.exposure_csv, "--exposure-csv")?,
                }
            }
        };
        let cfg = RunConfig {
            source,
            methods: parse_method_list(&self.method)?,
            replicates: self.replicates,
            seed: self.seed,
            ez: self.ez,
            tail_rule: match self.tail_variance {
                TailArg::Paper => TailVarianceRule::ZeroLast,
                TailArg::Formula => TailVarianceRule::Formula,
            },
            infeasible_policy: match self.infeasible {
                InfeasibleArg::Resample => InfeasiblePolicy::Resample,
                InfeasibleArg::Clamp => InfeasiblePolicy::Clamp,
            },
            residual_scaling: match self.residual_scaling {
                ScalingArg::Dof => ResidualScaling::DegreesOfFreedom,
                ScalingArg::None => ResidualScaling::None,
                ScalingArg::PerColumn => ResidualScaling::PerColumn,
            },
            timeseries_shortcut: self.timeseries_shortcut,
            matched_family: match self.matched_family {
                FamilyArg::Lognormal => MatchedFamily::LogNormal,
                FamilyArg::Gamma => MatchedFamily::Gamma,
            },
            lognormal_param: match self.lognormal_param {
                LogNormalArg::Standard => LogNormalParam::Standard,
                LogNormalArg::Paper => LogNormalParam::Printed,
            },
            msep_source: parse_msep_source(&self.msep_source)?,
            out_dir: self.out,
            calibrate_only: self.calibrate_only,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
