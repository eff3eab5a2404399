use rand::Rng;

use super::{
    finish, point_fit, run_replicates, BootstrapConfig, Method, Replicate, ReserveDistribution,
};
use crate::error::Result;
use crate::estimators::{estimate_unchecked, DiscreteParams, TailVarianceRule};
use crate::kernel::{sample_chi2, sample_gamma, sample_normal, RngStream};
use crate::real::Real;
use crate::triangle::{ClaimsData, Triangle};

/// Gamma draw with mean `lambda e` and variance `sigma2 e`; a point mass when `sigma2 = 0`.
fn new_claims<T: Real, R: Rng + ?Sized>(lambda: T, sigma2: T, e: T, rng: &mut R) -> Result<T> {
    if !(sigma2 > T::zero()) || !(lambda > T::zero()) {
        return Ok(lambda * e);
    }
    sample_gamma(lambda * lambda * e / sigma2, lambda / sigma2, rng)
}

fn normal_floored<T: Real, R: Rng + ?Sized>(
    mean: T,
    var: T,
    rng: &mut R,
    rep: &mut Replicate<T>,
) -> Result<T> {
    if var < T::zero() {
        rep.variance_floors += 1;
        return Ok(mean);
    }
    sample_normal(mean, var, rng)
}

fn resample_params<T: Real, R: Rng + ?Sized>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    rule: TailVarianceRule,
    shortcut: bool,
    rng: &mut R,
    rep: &mut Replicate<T>,
) -> Result<DiscreteParams<T>> {
    let n = data.size();
    let (ct, e) = (data.cumulative(), data.exposure());
    let mut nt = Triangle::empty(n);
    let mut dt = Triangle::empty(n);
    for i in 1..=n {
        dt.set(i, 1, T::zero())?;
        for j in 1..=n + 1 - i {
            nt.set(i, j, new_claims(p.lambda(j), p.sigma2(j), e.get(i), rng)?)?;
        }
        for j in 1..=n - i {
            let c = ct.at(i, j);
            let d = if shortcut {
                T::zero()
            } else {
                sample_normal(p.delta(j) * c, p.t2(j) * c, rng)?
            };
            rep.d_exceeds_c_upper |= d > c;
            dt.set(i, j + 1, d)?;
        }
    }
    let pm = estimate_unchecked(&nt, &dt, ct, e, rule);
    if !shortcut {
        return Ok(pm);
    }
    let mut delta = Vec::with_capacity(n - 1);
    let mut t2 = Vec::with_capacity(n - 1);
    for j in 1..n {
        let c_sum: T = (1..=n - j).map(|i| ct.at(i, j)).sum();
        delta.push(sample_normal(p.delta(j), p.t2(j) / c_sum, rng)?);
        let df = n - j - 1;
        t2.push(if df == 0 {
            T::zero()
        } else {
            let k = T::of_usize(df);
            p.t2(j) * sample_chi2(k, rng)? / k
        });
    }
    Ok(DiscreteParams::from_parts(
        pm.lambdas().to_vec(),
        delta,
        pm.sigma2s().to_vec(),
        t2,
    ))
}

/// One draw of the re-estimated parameters of the time-series bootstrap.
///
/// With `shortcut`, `Delta` and `T2` come from their exact laws given the
/// observed C instead of from simulated D.
pub fn timeseries_resample_params<T: Real, R: Rng + ?Sized>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    rule: TailVarianceRule,
    shortcut: bool,
    rng: &mut R,
) -> Result<DiscreteParams<T>> {
    resample_params(data, p, rule, shortcut, rng, &mut Replicate::new(T::zero()))
}

fn replicate<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    cfg: &BootstrapConfig<T>,
    m: u64,
) -> Result<Replicate<T>> {
    let n = data.size();
    let mut rng = RngStream::new(cfg.seed, m);
    let mut rep = Replicate::new(T::zero());
    let pm = resample_params(
        data,
        p,
        cfg.tail_rule,
        cfg.timeseries_shortcut,
        &mut rng,
        &mut rep,
    )?;

    let mut reserve = T::zero();
    for i in 2..=n {
        let e = data.exposure().get(i);
        let latest = data.cumulative().at(i, n + 1 - i);
        let mut c = latest;
        for j in (n + 1 - i)..n {
            let nn = new_claims(pm.lambda(j + 1), pm.sigma2(j + 1), e, &mut rng)?;
            let d = normal_floored(pm.delta(j) * c, pm.t2(j) * c, &mut rng, &mut rep)?;
            rep.d_exceeds_c_lower |= d > c;
            c = c + nn - d;
            rep.negative_c |= c < T::zero();
        }
        reserve = reserve + (c - latest);
    }
    rep.reserve = reserve;
    Ok(rep)
}

/// Time-series bootstrap: gamma new claims and normal development, in both
/// the resimulated observed triangle and the future cells.
pub fn timeseries_bootstrap<T: Real>(
    data: &ClaimsData<T>,
    cfg: &BootstrapConfig<T>,
) -> Result<ReserveDistribution<T>> {
    cfg.validate()?;
    let (p, point) = point_fit(data, cfg.tail_rule)?;
    let reps = run_replicates(cfg.replicates, |m| replicate(data, &p, cfg, m))?;
    finish(Method::Timeseries, reps, point)
}
