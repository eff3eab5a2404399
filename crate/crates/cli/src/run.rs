use serde::Serialize;

use ctreserve_core::bootstrap::{
    ct_bootstrap, matched_from_msep, run_method, BootstrapConfig, Diagnostics, Method, MsepSource,
    ReserveDistribution, Summary,
};
use ctreserve_core::calibration::{
    discrete_to_ct, estimate_x, CtParams, JumpLaw, RegressionReport,
};
use ctreserve_core::estimators::{
    estimate_discrete, ultimate_and_reserve, DiscreteParams, ReserveEstimate, TailVarianceRule,
};
use ctreserve_core::simulation::{absorption_scan, AbsorptionPoint};
use ctreserve_core::triangle::{embedded_schnieper_dataset, ClaimsData};

use crate::config::{DataSource, RunConfig};
use crate::csv_io::{read_exposure_file, read_triangle_file};
use crate::error::{CliError, CliResult};
use crate::histogram::{freedman_diaconis, matched_bins};
use crate::output::{significant, OutputDir};

pub fn load_data(source: &DataSource) -> CliResult<ClaimsData<f64>> {
    match source {
        DataSource::Schnieper => Ok(embedded_schnieper_dataset()),
        DataSource::Csv {
            new_claims,
            development,
            exposure,
        } => {
            let nt = read_triangle_file(new_claims)?;
            let dt = read_triangle_file(development)?;
            let e = read_exposure_file(exposure)?;
            Ok(ClaimsData::new(nt, dt, e)?)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntensityProduct {
    pub j: usize,
    /// `lambda_j E[Z]`, the same for every choice of `E[Z]`.
    pub lambda_ez: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuousFit {
    pub ez: f64,
    pub jump_law: JumpLaw<f64>,
    pub params: CtParams<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Calibration {
    pub tail_rule: TailVarianceRule,
    pub discrete: DiscreteParams<f64>,
    pub reserve: ReserveEstimate<f64>,
    pub regression: RegressionReport<f64>,
    pub intensity_products: Vec<IntensityProduct>,
    pub continuous: Vec<ContinuousFit>,
}

pub fn calibrate(
    data: &ClaimsData<f64>,
    tail_rule: TailVarianceRule,
    ez: &[f64],
) -> CliResult<Calibration> {
    let discrete = estimate_discrete(data, tail_rule)?;
    let reserve = ultimate_and_reserve(data, &discrete)?;
    let regression = estimate_x(&discrete)?;
    let x = regression.x_hat;
    if let Some(bad) = ez.iter().find(|&&v| !(v > 0.0 && v < x)) {
        return Err(CliError::numeric(format!(
            "E[Z] = {bad} must lie in (0, {x}) for a feasible jump law"
        )));
    }
    let continuous = ez
        .iter()
        .map(|&v| {
            let params = discrete_to_ct(&discrete, v, x)?;
            Ok(ContinuousFit {
                ez: v,
                jump_law: *params.jump_law(),
                params,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let intensity_products = continuous[0]
        .params
        .lambda_times_mean()
        .into_iter()
        .enumerate()
        .map(|(k, v)| IntensityProduct {
            j: k + 1,
            lambda_ez: v,
        })
        .collect();
    Ok(Calibration {
        tail_rule,
        discrete,
        reserve,
        regression,
        intensity_products,
        continuous,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SensitivityRow {
    pub ez: f64,
    pub summary: Summary,
    pub rejected_attempts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodDiagnostics {
    pub method: Method,
    pub counts: Diagnostics,
    pub negative_n_rate: f64,
    pub d_exceeds_c_rate: f64,
    pub d_exceeds_c_upper_rate: f64,
    pub d_exceeds_c_lower_rate: f64,
    pub negative_c_rate: f64,
}

impl MethodDiagnostics {
    fn new(method: Method, d: &Diagnostics) -> Self {
        let rate = |c| Diagnostics::rate(c, d.replicates);
        Self {
            method,
            counts: d.clone(),
            negative_n_rate: rate(d.negative_n),
            d_exceeds_c_rate: rate(d.d_exceeds_c),
            d_exceeds_c_upper_rate: rate(d.d_exceeds_c_upper),
            d_exceeds_c_lower_rate: rate(d.d_exceeds_c_lower),
            negative_c_rate: rate(d.negative_c),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Absorption {
    pub ez: f64,
    /// Bounds at `t = j + 1` along the latest diagonal.
    pub points: Vec<AbsorptionPoint<f64>>,
    pub max_upper: Option<AbsorptionPoint<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub methods: Vec<MethodDiagnostics>,
    pub absorption: Absorption,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub method: Method,
    pub label: &'static str,
    pub ez: f64,
    #[serde(flatten)]
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched: Option<ctreserve_core::bootstrap::MatchedDistribution>,
}

/// Everything a run computed, in memory.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub calibration: Calibration,
    pub results: Vec<ReserveDistribution<f64>>,
    pub sensitivity: Vec<SensitivityRow>,
    pub diagnostics: DiagnosticsReport,
    pub files: Vec<std::path::PathBuf>,
}

fn bootstrap_config(cfg: &RunConfig, ez: f64) -> BootstrapConfig<f64> {
    let mut b = BootstrapConfig::new(cfg.replicates, cfg.seed, ez);
    b.tail_rule = cfg.tail_rule;
    b.infeasible_policy = cfg.infeasible_policy;
    b.residual_scaling = cfg.residual_scaling;
    b.timeseries_shortcut = cfg.timeseries_shortcut;
    b.matched_family = cfg.matched_family;
    b.lognormal_param = cfg.lognormal_param;
    b.msep_source = cfg.msep_source;
    b
}

/// Runs the reserving methods of `cfg` and writes the report files to `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> CliResult<RunReport> {
    cfg.validate()?;
    let data = load_data(&cfg.source)?;
    let calibration = calibrate(&data, cfg.tail_rule, &cfg.ez)?;
    let ez0 = cfg.ez[0];
    let bcfg = bootstrap_config(cfg, ez0);

    let mut results: Vec<ReserveDistribution<f64>> = Vec::new();
    if !cfg.calibrate_only {
        for &m in cfg.methods.iter().filter(|&&m| m != Method::Matched) {
            results.push(run_method(&data, m, &bcfg)?);
        }
        if cfg.methods.contains(&Method::Matched) {
            let msep = match cfg.msep_source {
                MsepSource::External(v) => v,
                MsepSource::Bootstrap(src) => match results.iter().find(|r| r.method == src) {
                    Some(r) => r.summary.msep,
                    None => run_method(&data, src, &bcfg)?.summary.msep,
                },
            };
            results.push(matched_from_msep(&data, msep, &bcfg)?);
        }
        results.sort_by_key(|r| cfg.methods.iter().position(|&m| m == r.method));
    }

    let mut sensitivity = Vec::new();
    if !cfg.calibrate_only && cfg.ez.len() > 1 {
        for &ez in &cfg.ez {
            let dist = match results
                .iter()
                .find(|r| r.method == Method::Ct)
                .filter(|_| ez == ez0)
            {
                Some(r) => r.clone(),
                None => ct_bootstrap(&data, &bootstrap_config(cfg, ez))?,
            };
            sensitivity.push((ez, dist));
        }
    }

    let (points, best) = absorption_scan(&data, &calibration.continuous[0].params)?;
    let diagnostics = DiagnosticsReport {
        methods: results
            .iter()
            .filter(|r| r.method != Method::Matched)
            .map(|r| MethodDiagnostics::new(r.method, &r.diagnostics))
            .collect(),
        absorption: Absorption {
            ez: ez0,
            max_upper: best.map(|k| points[k]),
            points,
        },
    };

    let mut out = OutputDir::create(&cfg.out_dir)?;
    out.write_json("calibration.json", &calibration)?;
    if !cfg.calibrate_only {
        write_results(&mut out, &results, ez0)?;
        out.write_json("diagnostics.json", &diagnostics)?;
    }
    for (ez, dist) in &sensitivity {
        out.write_histogram(
            &format!("histogram_ct_ez{ez}.csv"),
            &freedman_diaconis(&dist.reserves),
        )?;
    }
    let sensitivity: Vec<SensitivityRow> = sensitivity
        .into_iter()
        .map(|(ez, dist)| SensitivityRow {
            ez,
            summary: dist.summary,
            rejected_attempts: dist.diagnostics.rejected_attempts,
        })
        .collect();
    if !sensitivity.is_empty() {
        let rows: Vec<Vec<String>> = sensitivity
            .iter()
            .map(|s| {
                vec![
                    s.ez.to_string(),
                    s.summary.replicates.to_string(),
                    s.summary.mean.to_string(),
                    s.summary.msep.to_string(),
                    significant(s.summary.msep_root_pct, 4),
                    s.summary.q995.to_string(),
                    significant(s.summary.q995_excess_pct, 4),
                    s.rejected_attempts.to_string(),
                ]
            })
            .collect();
        out.write_csv(
            "sensitivity.csv",
            &[
                "ez",
                "replicates",
                "mean",
                "msep",
                "msep_root_pct",
                "q995",
                "q995_excess_pct",
                "rejected_attempts",
            ],
            &rows,
        )?;
    }
    Ok(RunReport {
        calibration,
        results,
        sensitivity,
        diagnostics,
        files: out.written().to_vec(),
    })
}

fn write_results(
    out: &mut OutputDir,
    results: &[ReserveDistribution<f64>],
    ez: f64,
) -> CliResult<()> {
    let rows: Vec<SummaryRow> = results
        .iter()
        .map(|r| SummaryRow {
            method: r.method,
            label: r.method.label(),
            ez,
            summary: r.summary,
            matched: r.matched,
        })
        .collect();
    out.write_json("summary.json", &rows)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.label.to_string(),
                r.ez.to_string(),
                r.summary.replicates.to_string(),
                r.summary.point_estimate.to_string(),
                r.summary.mean.to_string(),
                r.summary.msep.to_string(),
                significant(r.summary.msep_root_pct, 4),
                r.summary.q995.to_string(),
                significant(r.summary.q995_excess_pct, 4),
            ]
        })
        .collect();
    out.write_csv(
        "summary.csv",
        &[
            "method",
            "label",
            "ez",
            "replicates",
            "point_estimate",
            "mean",
            "msep",
            "msep_root_pct",
            "q995",
            "q995_excess_pct",
        ],
        &table,
    )?;
    for r in results {
        let name = r.method.as_str();
        if let Some(law) = &r.matched {
            out.write_histogram(&format!("histogram_{name}.csv"), &matched_bins(law))?;
            continue;
        }
        out.write_with(&format!("reserves_{name}.csv"), |w| {
            let fail = |e: std::io::Error| CliError::output(e.to_string());
            writeln!(w, "replicate,reserve").map_err(fail)?;
            for (m, v) in r.reserves.iter().enumerate() {
                writeln!(w, "{m},{v}").map_err(fail)?;
            }
            Ok(())
        })?;
        out.write_histogram(
            &format!("histogram_{name}.csv"),
            &freedman_diaconis(&r.reserves),
        )?;
    }
    Ok(())
}
