use super::{
    finish, point_fit, run_replicates, BootstrapConfig, InfeasiblePolicy, Method, Replicate,
    ReserveDistribution,
};
use crate::calibration::{discrete_to_ct_with_law, fit_jump_gamma, fit_x, CtParams};
use crate::error::{Error, Result};
use crate::estimators::estimate_unchecked;
use crate::kernel::RngStream;
use crate::real::Real;
use crate::simulation::{cell_stream, simulate_lower_triangle, simulate_year, CompletedTriangles};
use crate::triangle::{ClaimsData, Triangle};

const UPPER: u64 = 1;
const LOWER: u64 = 2;

fn flag_lower<T: Real>(data: &ClaimsData<T>, done: &CompletedTriangles<T>, rep: &mut Replicate<T>) {
    let n = data.size();
    for i in 2..=n {
        for j in (n + 1 - i)..n {
            let (c, nn, d) = (
                done.cumulative.at(i, j),
                done.new_claims.at(i, j + 1),
                done.development.at(i, j + 1),
            );
            rep.d_exceeds_c_lower |= d > c;
            rep.negative_n |= nn < T::zero();
            rep.negative_c |= done.cumulative.at(i, j + 1) < T::zero();
        }
    }
}

/// Resimulates the observed N and D given the observed C, including the first
/// development year from `C_0 = 0`.
fn resimulate_upper<T: Real>(
    data: &ClaimsData<T>,
    ct: &CtParams<T>,
    base: &RngStream,
    rep: &mut Replicate<T>,
) -> Result<(Triangle<T>, Triangle<T>)> {
    let n = data.size();
    let c = data.cumulative();
    let mut nt = Triangle::empty(n);
    let mut dt = Triangle::empty(n);
    for i in 1..=n {
        let e = data.exposure().get(i);
        let first = simulate_year(T::zero(), 0, e, ct, &mut cell_stream(base, i, 1))?;
        nt.set(i, 1, first.n_inc)?;
        dt.set(i, 1, T::zero())?;
        for j in 1..=n - i {
            let cij = c.at(i, j);
            let y = simulate_year(cij, j, e, ct, &mut cell_stream(base, i, j + 1))?;
            rep.negative_n |= y.n_inc < T::zero();
            rep.d_exceeds_c_upper |= y.d_inc > cij;
            nt.set(i, j + 1, y.n_inc)?;
            dt.set(i, j + 1, y.d_inc)?;
        }
    }
    Ok((nt, dt))
}

pub(crate) fn replicate<T: Real>(
    data: &ClaimsData<T>,
    ct_hat: &CtParams<T>,
    cfg: &BootstrapConfig<T>,
    m: u64,
) -> Result<Replicate<T>> {
    let n = data.size();
    for attempt in 0..cfg.max_attempts {
        let base = RngStream::new(cfg.seed, m).child(attempt as u64);
        let mut rep = Replicate::new(T::zero());
        rep.rejected_attempts = attempt;
        let (nt, dt) = resimulate_upper(data, ct_hat, &base.child(UPPER), &mut rep)?;
        let p = estimate_unchecked(&nt, &dt, data.cumulative(), data.exposure(), cfg.tail_rule);
        if (1..n).any(|j| !(p.delta(j) < T::one())) {
            continue;
        }
        let Ok(x) = fit_x(&p) else { continue };
        let law = match fit_jump_gamma(cfg.ez, x) {
            Ok(law) => law,
            Err(_) if cfg.infeasible_policy == InfeasiblePolicy::Clamp => {
                rep.clamped = true;
                let floor = cfg.ez * (T::one() + T::lit(1e-6));
                fit_jump_gamma(cfg.ez, if x > floor { x } else { floor })?
            }
            Err(_) => continue,
        };
        let ct_m = discrete_to_ct_with_law(&p, law)?;
        let done = simulate_lower_triangle(data, &ct_m, &base.child(LOWER))?;
        flag_lower(data, &done, &mut rep);
        rep.reserve = done.reserve();
        return Ok(rep);
    }
    Err(Error::ResampleLimit {
        replicate: m as usize,
        attempts: cfg.max_attempts,
    })
}

/// Fitted continuous-time parameters on the observed data at `E[Z] = cfg.ez`.
pub(crate) fn fitted_ct<T: Real>(
    data: &ClaimsData<T>,
    cfg: &BootstrapConfig<T>,
) -> Result<(CtParams<T>, T)> {
    let (p, point) = point_fit(data, cfg.tail_rule)?;
    let x = fit_x(&p)?;
    let law = fit_jump_gamma(cfg.ez, x)?;
    Ok((discrete_to_ct_with_law(&p, law)?, point))
}

/// Continuous-time bootstrap of the reserve.
///
/// Each replicate resimulates the observed triangle from the fitted
/// continuous-time model, re-estimates and refits the jump law at the same
/// `E[Z]`, then simulates the future cells with the refitted parameters.
pub fn ct_bootstrap<T: Real>(
    data: &ClaimsData<T>,
    cfg: &BootstrapConfig<T>,
) -> Result<ReserveDistribution<T>> {
    cfg.validate()?;
    let (ct_hat, point) = fitted_ct(data, cfg)?;
    let reps = run_replicates(cfg.replicates, |m| replicate(data, &ct_hat, cfg, m))?;
    finish(Method::Ct, reps, point)
}

/// Reserve of replicate `m` of [`ct_bootstrap`].
pub fn ct_replicate<T: Real>(data: &ClaimsData<T>, cfg: &BootstrapConfig<T>, m: u64) -> Result<T> {
    cfg.validate()?;
    let (ct_hat, _) = fitted_ct(data, cfg)?;
    Ok(replicate(data, &ct_hat, cfg, m)?.reserve)
}

/// Reserves from the future cells only, with fixed parameters.
pub fn simulate_reserves_ct<T: Real>(
    data: &ClaimsData<T>,
    ct: &CtParams<T>,
    replicates: usize,
    seed: u64,
) -> Result<Vec<T>> {
    let reps = run_replicates(replicates, |m| {
        let done = simulate_lower_triangle(data, ct, &RngStream::new(seed, m))?;
        Ok(Replicate::new(done.reserve()))
    })?;
    Ok(reps.into_iter().map(|r| r.reserve).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::embedded_schnieper_dataset;

    #[test]
    fn replicates_are_reproducible_and_structurally_sound() {
        let data = embedded_schnieper_dataset();
        let cfg = BootstrapConfig::new(400, 99, 1.0);
        let a = ct_bootstrap(&data, &cfg).unwrap();
        let b = ct_bootstrap(&data, &cfg).unwrap();
        assert_eq!(a.reserves, b.reserves);
        assert_eq!(a.reserves[17], ct_replicate(&data, &cfg, 17).unwrap());
        let d = &a.diagnostics;
        assert_eq!((d.negative_n, d.d_exceeds_c, d.negative_c), (0, 0, 0));
        assert!(a.reserves.iter().all(|r| r.is_finite()));
        let mut other = cfg.clone();
        other.seed = 100;
        assert_ne!(ct_bootstrap(&data, &other).unwrap().reserves, a.reserves);
    }

    #[test]
    fn frozen_parameters_give_a_constant_reserve() {
        let data = embedded_schnieper_dataset();
        let law = fit_jump_gamma(1.0, 2.0).unwrap();
        let ct = CtParams::new(
            vec![0.0; 7],
            vec![0.0, 0.1, 0.1, 0.0, -0.2, 0.0, 0.0],
            vec![0.0; 7],
            law,
        )
        .unwrap();
        let r = simulate_reserves_ct(&data, &ct, 50, 3).unwrap();
        assert!(r.iter().all(|&v| v == r[0]));
        assert!(crate::bootstrap::summarize(&r, r[0]).unwrap().msep == 0.0);
    }

    #[test]
    fn clamping_never_rejects() {
        let data = embedded_schnieper_dataset();
        let mut cfg = BootstrapConfig::new(300, 5, 4.0);
        cfg.infeasible_policy = InfeasiblePolicy::Clamp;
        let d = ct_bootstrap(&data, &cfg).unwrap().diagnostics;
        assert_eq!(d.rejected_attempts, 0);
        cfg.infeasible_policy = InfeasiblePolicy::Resample;
        let d2 = ct_bootstrap(&data, &cfg).unwrap().diagnostics;
        assert_eq!(d2.clamped, 0);
        assert_eq!(d.clamped > 0, d2.rejected_attempts > 0);
    }

    #[test]
    fn infeasible_observed_fit_is_an_error() {
        let data = embedded_schnieper_dataset();
        let cfg = BootstrapConfig::new(10, 1, 5.0);
        assert!(matches!(
            ct_bootstrap(&data, &cfg),
            Err(Error::InfeasibleJumpLaw { .. })
        ));
    }
}
