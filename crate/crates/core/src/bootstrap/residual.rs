use rand::Rng;
use serde::Serialize;

use super::{
    finish, point_fit, run_replicates, BootstrapConfig, Method, Replicate, ReserveDistribution,
};
use crate::error::Result;
use crate::estimators::{estimate_unchecked, DiscreteParams};
use crate::kernel::RngStream;
use crate::real::Real;
use crate::triangle::{ClaimsData, Triangle};

/// Pooled Pearson residuals of the N and D triangles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PearsonResiduals<T> {
    /// `(N(i,j) - Lambda_j E_i) / (Sigma_j sqrt(E_i))`
    pub r: Vec<T>,
    /// `(D(i,j+1) - Delta_j C(i,j)) / (T_j sqrt(C(i,j)))`
    pub s: Vec<T>,
    /// Development years left out because `Sigma2_j = 0`.
    pub excluded_n_columns: Vec<usize>,
    /// Development years left out because `T2_j = 0`.
    pub excluded_d_columns: Vec<usize>,
}

/// Rescaling of the raw Pearson residuals before resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualScaling {
    /// Raw residuals.
    None,
    /// Each pool scaled by `sqrt(K / (K - p))`, `K` residuals over `p` columns,
    /// so its mean square is 1.
    #[default]
    DegreesOfFreedom,
    /// Each column scaled to unit mean square on its own.
    PerColumn,
}

pub fn pearson_residuals<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
) -> PearsonResiduals<T> {
    pearson_residuals_scaled(data, p, ResidualScaling::None)
}

fn rescale<T: Real>(pool: &mut [T], columns: &[(usize, usize, usize)], scaling: ResidualScaling) {
    // (start, len, degrees of freedom) per column.
    match scaling {
        ResidualScaling::None => {}
        ResidualScaling::DegreesOfFreedom => {
            let k: usize = columns.iter().map(|c| c.1).sum();
            let df: usize = columns.iter().map(|c| c.2).sum();
            if df > 0 {
                let f = (T::of_usize(k) / T::of_usize(df)).sqrt();
                pool.iter_mut().for_each(|v| *v = *v * f);
            }
        }
        ResidualScaling::PerColumn => {
            for &(start, len, df) in columns {
                if df > 0 {
                    let f = (T::of_usize(len) / T::of_usize(df)).sqrt();
                    pool[start..start + len]
                        .iter_mut()
                        .for_each(|v| *v = *v * f);
                }
            }
        }
    }
}

/// [`pearson_residuals`] with the pools rescaled.
pub fn pearson_residuals_scaled<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    scaling: ResidualScaling,
) -> PearsonResiduals<T> {
    let n = data.size();
    let (nt, dt, ct, e) = (
        data.new_claims(),
        data.development(),
        data.cumulative(),
        data.exposure(),
    );
    let mut out = PearsonResiduals {
        r: Vec::new(),
        s: Vec::new(),
        excluded_n_columns: Vec::new(),
        excluded_d_columns: Vec::new(),
    };
    let mut r_cols = Vec::new();
    for j in 1..=n {
        let sd = p.sigma2(j).sqrt();
        if !(sd > T::zero()) {
            out.excluded_n_columns.push(j);
            continue;
        }
        let start = out.r.len();
        for i in 1..=n + 1 - j {
            out.r
                .push((nt.at(i, j) - p.lambda(j) * e.get(i)) / (sd * e.get(i).sqrt()));
        }
        r_cols.push((start, out.r.len() - start, n - j));
    }
    let mut s_cols = Vec::new();
    for j in 1..n {
        let sd = p.t2(j).sqrt();
        if !(sd > T::zero()) {
            out.excluded_d_columns.push(j);
            continue;
        }
        let start = out.s.len();
        for i in 1..=n - j {
            let c = ct.at(i, j);
            if c > T::zero() {
                out.s
                    .push((dt.at(i, j + 1) - p.delta(j) * c) / (sd * c.sqrt()));
            }
        }
        let len = out.s.len() - start;
        s_cols.push((start, len, len.saturating_sub(1)));
    }
    rescale(&mut out.r, &r_cols, scaling);
    rescale(&mut out.s, &s_cols, scaling);
    out
}

fn pick<T: Real, R: Rng + ?Sized>(pool: &[T], rng: &mut R) -> T {
    if pool.is_empty() {
        T::zero()
    } else {
        pool[rng.random_range(0..pool.len())]
    }
}

fn replicate<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    res: &PearsonResiduals<T>,
    cfg: &BootstrapConfig<T>,
    m: u64,
) -> Result<Replicate<T>> {
    let n = data.size();
    let (ct, e) = (data.cumulative(), data.exposure());
    let mut rng = RngStream::new(cfg.seed, m);
    let mut rep = Replicate::new(T::zero());

    let mut nt = Triangle::empty(n);
    let mut dt = Triangle::empty(n);
    for i in 1..=n {
        let ei = e.get(i);
        dt.set(i, 1, T::zero())?;
        for j in 1..=n + 1 - i {
            let v = p.lambda(j) * ei + p.sigma2(j).sqrt() * ei.sqrt() * pick(&res.r, &mut rng);
            rep.negative_n |= v < T::zero();
            nt.set(i, j, v)?;
        }
        for j in 1..=n - i {
            let c = ct.at(i, j);
            let v = p.delta(j) * c + p.t2(j).sqrt() * c.sqrt() * pick(&res.s, &mut rng);
            rep.d_exceeds_c_upper |= v > c;
            dt.set(i, j + 1, v)?;
        }
    }
    let pm = estimate_unchecked(&nt, &dt, ct, e, cfg.tail_rule);

    let mut reserve = T::zero();
    for i in 2..=n {
        let ei = e.get(i);
        let latest = ct.at(i, n + 1 - i);
        let mut c = latest;
        for j in (n + 1 - i)..n {
            let mean = pm.lambda(j + 1) * ei + (T::one() - pm.delta(j)) * c;
            let mut var = pm.sigma2(j + 1) * ei + pm.t2(j) * c;
            if var < T::zero() {
                var = T::zero();
                rep.variance_floors += 1;
            }
            c = mean + var.sqrt() * T::sample_std_normal(&mut rng);
            rep.negative_c |= c < T::zero();
        }
        reserve = reserve + (c - latest);
    }
    rep.reserve = reserve;
    Ok(rep)
}

/// Residual bootstrap of the discrete model with a normal law for the future cells.
pub fn residual_bootstrap<T: Real>(
    data: &ClaimsData<T>,
    cfg: &BootstrapConfig<T>,
) -> Result<ReserveDistribution<T>> {
    cfg.validate()?;
    let (p, point) = point_fit(data, cfg.tail_rule)?;
    let res = pearson_residuals_scaled(data, &p, cfg.residual_scaling);
    let reps = run_replicates(cfg.replicates, |m| replicate(data, &p, &res, cfg, m))?;
    let mut out = finish(Method::Residual, reps, point)?;
    out.diagnostics.excluded_n_columns = res.excluded_n_columns;
    out.diagnostics.excluded_d_columns = res.excluded_d_columns;
    Ok(out)
}
