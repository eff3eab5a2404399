//! Acceptance checks against the published figures, one line per criterion.
//!
//! Every criterion is evaluated and reported. The process exits non-zero only
//! when `CTRESERVE_ACCEPTANCE_STRICT=1` is set and a criterion failed.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ctreserve_cli::{run, RunConfig};
use ctreserve_core::bootstrap::{
    moment_matched, Diagnostics, LogNormalParam, MatchedFamily, Method, ReserveDistribution,
};
use ctreserve_core::calibration::{
    ct_to_discrete, discrete_to_ct, discrete_to_ct_with_law, estimate_x, fit_jump_gamma, CtParams,
};
use ctreserve_core::estimators::{conditional_moments_from, estimate_discrete, TailVarianceRule};
use ctreserve_core::kernel::{sample_gamma, sample_normal};
use ctreserve_core::simulation::{
    absorption_bounds, absorption_scan, branch_law, simulate_year, simulate_year_jumpwise,
    year_moments,
};
use ctreserve_core::stats::{ks_two_sample, moment_estimate};
use ctreserve_core::triangle::{
    build_cumulative, embedded_schnieper_dataset, ClaimsData, ExposureVector, Triangle,
};
use ctreserve_core::RngStream;

const TABLE2_C: [&[f64]; 7] = [
    &[7.5, 28.9, 52.6, 84.5, 80.1, 76.9, 79.5],
    &[1.6, 14.8, 32.1, 39.6, 55.0, 60.0],
    &[13.8, 42.4, 36.3, 53.3, 96.5],
    &[2.9, 14.0, 32.5, 46.9],
    &[2.9, 9.8, 52.7],
    &[1.9, 29.4],
    &[19.1],
];

const TABLE4_LAMBDA_EZ: [f64; 7] = [
    0.4502954e-3,
    0.9048361e-3,
    1.4490241e-3,
    1.1235202e-3,
    1.1504111e-3,
    0.5099654e-3,
    0.5071148e-3,
];

struct Report {
    failed: Vec<u32>,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!(
            "[{}] {id:>2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failed.push(id);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Within 3 standard errors, plus summation rounding for degenerate samples.
fn within_se(est: f64, truth: f64, se: f64) -> bool {
    (est - truth).abs() <= 3.0 * se + 1e-9 * truth.abs().max(1.0)
}

fn schnieper_ct(ez: f64) -> (ClaimsData<f64>, CtParams<f64>) {
    let data = embedded_schnieper_dataset();
    let p = estimate_discrete(&data, TailVarianceRule::Formula).unwrap();
    let x = estimate_x(&p).unwrap().x_hat;
    let ct = discrete_to_ct(&p, ez, x).unwrap();
    (data, ct)
}

fn dataset_fidelity(r: &mut Report) {
    let data = embedded_schnieper_dataset();
    let c = build_cumulative(data.new_claims(), data.development()).unwrap();
    let mut mismatches = Vec::new();
    let mut cells = 0;
    for (i, row) in TABLE2_C.iter().enumerate() {
        for (j, &printed) in row.iter().enumerate() {
            cells += 1;
            if (c.at(i + 1, j + 1) * 10.0).round() != (printed * 10.0).round() {
                mismatches.push(format!("({}, {})", i + 1, j + 1));
            }
        }
    }
    r.line(
        1,
        "dataset fidelity",
        mismatches.is_empty() && cells == 28,
        format!("{cells} cells of C compared at one decimal, mismatches: {mismatches:?}"),
    );
}

fn regression(r: &mut Report) {
    let data = embedded_schnieper_dataset();
    let p = estimate_discrete(&data, TailVarianceRule::Formula).unwrap();
    let reg = estimate_x(&p).unwrap();
    let (pv, r2) = (
        reg.p_value.unwrap_or(f64::NAN),
        reg.r_squared.unwrap_or(f64::NAN),
    );
    let pass = (reg.x_hat - 4.7120).abs() <= 0.0005
        && (r2 - 0.6747).abs() <= 0.001
        && (pv - 0.0235).abs() <= 0.002;
    r.line(
        2,
        "regression",
        pass,
        format!("X = {:.5} (4.7120 +/- 0.0005), R2 = {r2:.5} (0.6747 +/- 0.001), p = {pv:.5} (0.0235 +/- 0.002)", reg.x_hat),
    );
}

fn intensity_products(r: &mut Report) {
    let mut worst: f64 = 0.0;
    for ez in [1.0, 2.5] {
        let (_, ct) = schnieper_ct(ez);
        for (got, want) in ct.lambda_times_mean().iter().zip(TABLE4_LAMBDA_EZ) {
            worst = worst.max(rel(*got, want));
        }
    }
    let (data, ct) = schnieper_ct(1.0);
    let counts: Vec<f64> = (1..=7)
        .flat_map(|j| (1..=7).map(move |i| (i, j)))
        .map(|(i, j)| ct.lambda(j) * data.exposure().get(i))
        .collect();
    let lo = counts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = counts.iter().copied().fold(0.0, f64::max);
    r.line(
        3,
        "intensity products",
        worst <= 1e-6,
        format!("max relative deviation from the seven printed values at ez = 1 and 2.5: {worst:.2e} (<= 1e-6); yearly claim counts span {lo:.3}/ez to {hi:.2}/ez"),
    );
}

fn absorption(r: &mut Report) {
    let (data, ct) = schnieper_ct(1.0);
    let n = data.size();
    let i = n - 3;
    let (lower, upper) = absorption_bounds(
        data.cumulative().at(i, 4),
        4,
        data.exposure().get(i),
        &ct,
        5.0,
    )
    .unwrap();
    let (points, best) = absorption_scan(&data, &ct).unwrap();
    let best_j = best.map(|k| points[k].j);
    let pass = rel(upper, 2.604e-4) <= 0.02;
    r.line(
        4,
        "absorption probability",
        pass,
        format!("P(D5 = C4) = {upper:.4e} (2.604e-4 +/- 2%), with no arrival {lower:.4e}; largest on the diagonal at j = {best_j:?}"),
    );
}

fn simulation_moments(r: &mut Report) {
    let (data, ct) = schnieper_ct(1.0);
    let implied = ct_to_discrete(&ct);
    let n = data.size();
    let m = 100_000;
    let mut failures = Vec::new();
    let mut checks = 0;
    for i in 2..=n {
        let j = n + 1 - i;
        let c = data.cumulative().at(i, j);
        let e = data.exposure().get(i);
        let mut rng = RngStream::new(5, i as u64);
        let years: Vec<_> = (0..m)
            .map(|_| simulate_year(c, j, e, &ct, &mut rng).unwrap())
            .collect();
        let closed = year_moments(c, j, e, &ct);
        let (recursive_mean, recursive_var) =
            conditional_moments_from(c, e, &implied, j, j + 1).unwrap();
        if rel(recursive_mean, closed.mean_c) > 1e-10 || rel(recursive_var, closed.var_c) > 1e-10 {
            failures.push(format!("({i},{j}) closed forms disagree"));
        }
        let series: [(&str, Vec<f64>, f64, f64); 3] = [
            (
                "N",
                years.iter().map(|y| y.n_inc).collect(),
                closed.mean_n,
                closed.var_n,
            ),
            (
                "D",
                years.iter().map(|y| y.d_inc).collect(),
                closed.mean_d,
                closed.var_d,
            ),
            (
                "C",
                years.iter().map(|y| y.c_end).collect(),
                closed.mean_c,
                closed.var_c,
            ),
        ];
        for (name, xs, mean, var) in series {
            let est = moment_estimate(&xs).unwrap();
            checks += 2;
            if !within_se(est.mean, mean, est.mean_se) {
                failures.push(format!("({i},{j}) E{name} {:.5} vs {mean:.5}", est.mean));
            }
            if !within_se(est.variance, var, est.variance_se) {
                failures.push(format!(
                    "({i},{j}) Var{name} {:.5} vs {var:.5}",
                    est.variance
                ));
            }
        }
    }
    r.line(
        5,
        "exact-simulation moments",
        failures.is_empty(),
        format!("{checks} mean/variance checks on {} diagonal cells at M = {m}, outside 3 SE: {failures:?}", n - 1),
    );
}

fn method_equivalence(r: &mut Report) {
    let law = fit_jump_gamma(1.0, 3.0).unwrap();
    let m = 100_000;
    let mut worst_p: f64 = 1.0;
    let mut rejected = Vec::new();
    let mut case = 0;
    for delta in [-0.5, 0.0, 0.5] {
        for tau2 in [0.1, 5.0] {
            for le in [0.5, 5.0] {
                case += 1;
                let p =
                    CtParams::new(vec![0.0, le], vec![0.0, delta], vec![0.0, tau2], law).unwrap();
                let mut r1 = RngStream::new(61, case);
                let mut r2 = RngStream::new(62, case);
                let a: Vec<f64> = (0..m)
                    .map(|_| simulate_year_jumpwise(1.0, 1, 1.0, &p, &mut r1).unwrap())
                    .collect();
                let b: Vec<f64> = (0..m)
                    .map(|_| simulate_year(1.0, 1, 1.0, &p, &mut r2).unwrap().c_end)
                    .collect();
                let ks = ks_two_sample(&a, &b);
                worst_p = worst_p.min(ks.p_value);
                if ks.rejects(0.001) {
                    rejected.push((delta, tau2, le));
                }
            }
        }
    }
    r.line(
        6,
        "method equivalence",
        rejected.is_empty() && case == 12,
        format!("{case} grid points, M = {m} each, smallest KS p-value {worst_p:.4} (alpha 0.001), rejected: {rejected:?}"),
    );
}

fn find(results: &[ReserveDistribution<f64>], m: Method) -> &ReserveDistribution<f64> {
    results
        .iter()
        .find(|r| r.method == m)
        .expect("method was run")
}

fn table5_and_pathologies(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let started = Instant::now();
    let report = run(&cfg).unwrap();
    let secs = started.elapsed().as_secs_f64();
    let targets = [
        (Method::Ct, 43.17, 136.70),
        (Method::Residual, 38.17, 103.18),
        (Method::Timeseries, 37.12, 114.06),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, msep, q) in targets {
        let s = find(&report.results, m).summary;
        pass &= (s.msep_root_pct - msep).abs() <= 1.5 && (s.q995_excess_pct - q).abs() <= 5.0;
        parts.push(format!(
            "{m} {:.2}/{:.2} ({msep}/{q})",
            s.msep_root_pct, s.q995_excess_pct
        ));
    }
    r.line(
        7,
        "reserve distribution summary",
        pass,
        format!(
            "M = {}, seed {}: {} [{secs:.0} s]",
            cfg.replicates,
            cfg.seed,
            parts.join(", ")
        ),
    );

    let m = cfg.replicates;
    let rate = |c: usize| 100.0 * Diagnostics::rate(c, m);
    let res = &find(&report.results, Method::Residual).diagnostics;
    let ts = &find(&report.results, Method::Timeseries).diagnostics;
    let ct = &find(&report.results, Method::Ct).diagnostics;
    let res_neg = rate(res.negative_n);
    let res_dc = rate(res.d_exceeds_c);
    let ts_dc = rate(ts.d_exceeds_c_upper);
    let ct_clean = ct.negative_n == 0 && ct.d_exceeds_c == 0 && ct.negative_c == 0;
    let pass = (res_neg - 66.0).abs() <= 3.0
        && res_dc == 0.0
        && (ts_dc - 6.0).abs() <= 2.0
        && ts.negative_n == 0
        && ct_clean;
    r.line(
        8,
        "pathology rates",
        pass,
        format!(
            "residual negative N {res_neg:.1}% (66 +/- 3), D > C {res_dc:.1}% (0); time series D > C {ts_dc:.1}% in the observed triangle (6 +/- 2), {:.1}% in future cells, {:.1}% anywhere, negative N {}; ct negative N {}, D > C {}, negative C {}",
            rate(ts.d_exceeds_c_lower),
            rate(ts.d_exceeds_c),
            ts.negative_n,
            ct.negative_n,
            ct.d_exceeds_c,
            ct.negative_c
        ),
    );
}

fn matched_gamma(r: &mut Report) {
    let data = embedded_schnieper_dataset();
    let p = estimate_discrete(&data, TailVarianceRule::Formula).unwrap();
    let point = ctreserve_core::estimators::ultimate_and_reserve(&data, &p)
        .unwrap()
        .total;
    let msep = (0.429175 * point).powi(2);
    let gamma = moment_matched(point, msep, MatchedFamily::Gamma, LogNormalParam::Standard)
        .unwrap()
        .summary();
    let std = moment_matched(
        point,
        msep,
        MatchedFamily::LogNormal,
        LogNormalParam::Standard,
    )
    .unwrap()
    .summary();
    let printed = moment_matched(
        point,
        msep,
        MatchedFamily::LogNormal,
        LogNormalParam::Printed,
    )
    .unwrap()
    .summary();
    r.line(
        9,
        "gamma moment match",
        (gamma.q995_excess_pct - 144.387).abs() <= 1.0,
        format!(
            "at sqrt(MSEP) = 42.9175% of R: gamma excess {:.3}% (144.387 +/- 1); log-normal {:.3}% with ln(1 + s2/mu^2), {:.3}% with ln(1 + s2/mu) (printed 165.003)",
            gamma.q995_excess_pct, std.q995_excess_pct, printed.q995_excess_pct
        ),
    );
}

fn determinism(r: &mut Report) {
    let bin = env!("CARGO_BIN_EXE_ctreserve");
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let status = Command::new(bin)
            .args([
                "run", "--method", "all", "--M", "20000", "--seed", "7", "--ez", "1", "--out",
            ])
            .arg(&out)
            .env_remove("CTRESERVE_M")
            .output()
            .unwrap();
        assert!(
            status.status.success(),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        outputs.push(out);
    }
    let mut names: Vec<String> = std::fs::read_dir(&outputs[0])
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|f| {
            std::fs::read(outputs[0].join(f)).ok() != std::fs::read(outputs[1].join(f)).ok()
        })
        .collect();
    let reserves = names.iter().filter(|f| f.starts_with("reserves_")).count();
    r.line(
        10,
        "determinism",
        differing.is_empty() && reserves == 3,
        format!(
            "two binary runs, {} files each ({reserves} reserve files), differing: {differing:?}",
            names.len()
        ),
    );
}

fn synthetic(rng: &mut RngStream) -> ClaimsData<f64> {
    const LAMBDA: [f64; 5] = [0.4, 0.25, 0.1, 0.05, 0.02];
    const SIGMA2: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];
    const DELTA: [f64; 4] = [0.1, 0.05, -0.05, 0.02];
    const T2: [f64; 4] = [0.3, 0.2, 0.1, 0.05];
    let n = 5;
    let e: Vec<f64> = (0..n).map(|i| 100.0 + 10.0 * i as f64).collect();
    let mut nt = Triangle::empty(n);
    let mut dt = Triangle::empty(n);
    for i in 1..=n {
        let mut c = 0.0;
        for j in 1..=n + 1 - i {
            let (l, s2) = (LAMBDA[j - 1], SIGMA2[j - 1]);
            let new = sample_gamma(l * l * e[i - 1] / s2, l / s2, rng).unwrap();
            let d = if j == 1 {
                0.0
            } else {
                sample_normal(DELTA[j - 2] * c, T2[j - 2] * c, rng).unwrap()
            };
            c += new - d;
            nt.set(i, j, new).unwrap();
            dt.set(i, j, d).unwrap();
        }
    }
    ClaimsData::new(nt, dt, ExposureVector::new(e).unwrap()).unwrap()
}

fn property_suites(r: &mut Report) {
    let mut notes = Vec::new();
    let mut pass = true;

    // Round trip of the continuous/discrete maps over a drift grid including 0.
    let law = fit_jump_gamma(1.0, 4.0).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=80 {
        let d = -2.0 + 0.05 * k as f64;
        for tau2 in [0.0, 0.1, 5.0] {
            let ct = CtParams::new(vec![0.3, 0.7], vec![0.0, d], vec![0.0, tau2], law).unwrap();
            let back = discrete_to_ct_with_law(&ct_to_discrete(&ct), law).unwrap();
            worst = worst
                .max(rel(back.delta(1), d))
                .max(rel(back.tau2(1), tau2))
                .max(rel(back.lambda(2), 0.7));
        }
    }
    pass &= worst <= 1e-10;
    notes.push(format!("round trip {worst:.1e}"));

    // Branch mean z e^{-delta h}: exact on parameters, 3 SE empirically.
    let mut worst: f64 = 0.0;
    let mut rng = RngStream::new(3, 0);
    let mut empirical_ok = true;
    for &(z, d, t2) in &[
        (1.0_f64, 0.5_f64, 0.2_f64),
        (5.0, -0.5, 5.0),
        (2.0, 1e-10, 1.0),
        (0.3, 2.0, 0.05),
    ] {
        let b = branch_law(z, 0.0, 1.0, d, t2).unwrap();
        let mean = z * (-d).exp();
        worst = worst.max(rel(b.mean(), mean));
        let xs: Vec<f64> = (0..100_000).map(|_| b.sample(&mut rng)).collect();
        let est = moment_estimate(&xs).unwrap();
        empirical_ok &= within_se(est.mean, mean, est.mean_se);
    }
    pass &= worst <= 1e-12 && empirical_ok;
    notes.push(format!(
        "branch mean {worst:.1e}, empirical within 3 SE: {empirical_ok}"
    ));

    // Estimators are unbiased for Lambda and Delta.
    let mut rng = RngStream::new(11, 0);
    let fits: Vec<_> = (0..10_000)
        .map(|_| estimate_discrete(&synthetic(&mut rng), TailVarianceRule::Formula).unwrap())
        .collect();
    let truth_l = [0.4, 0.25, 0.1, 0.05, 0.02];
    let truth_d = [0.1, 0.05, -0.05, 0.02];
    let mut biased = Vec::new();
    for j in 1..=5 {
        let est = moment_estimate(&fits.iter().map(|p| p.lambda(j)).collect::<Vec<_>>()).unwrap();
        if !within_se(est.mean, truth_l[j - 1], est.mean_se) {
            biased.push(format!("Lambda{j}"));
        }
    }
    for j in 1..5 {
        let est = moment_estimate(&fits.iter().map(|p| p.delta(j)).collect::<Vec<_>>()).unwrap();
        if !within_se(est.mean, truth_d[j - 1], est.mean_se) {
            biased.push(format!("Delta{j}"));
        }
    }
    pass &= biased.is_empty();
    notes.push(format!("unbiasedness outside 3 SE: {biased:?}"));

    // Sign constraints of the exact simulation.
    let (data, ct) = schnieper_ct(1.0);
    let mut violations = 0;
    let mut rng = RngStream::new(8, 0);
    for j in 1..data.size() {
        for c in [0.0, 0.5, 50.0] {
            for _ in 0..20_000 {
                let y = simulate_year(c, j, data.exposure().get(2), &ct, &mut rng).unwrap();
                if y.c_end < 0.0
                    || y.n_inc < 0.0
                    || y.d_inc > c
                    || y.c_end != (c + y.n_inc) - y.d_inc
                {
                    violations += 1;
                }
            }
        }
    }
    pass &= violations == 0;
    notes.push(format!("sign violations {violations}"));

    r.line(11, "property suites", pass, notes.join("; "));
}

fn main() -> ExitCode {
    let mut r = Report { failed: Vec::new() };
    dataset_fidelity(&mut r);
    regression(&mut r);
    intensity_products(&mut r);
    absorption(&mut r);
    simulation_moments(&mut r);
    method_equivalence(&mut r);
    table5_and_pathologies(&mut r);
    matched_gamma(&mut r);
    determinism(&mut r);
    property_suites(&mut r);
    println!(
        "{} of 11 criteria met; failed: {:?}",
        11 - r.failed.len(),
        r.failed
    );
    let strict = std::env::var("CTRESERVE_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && !r.failed.is_empty() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
