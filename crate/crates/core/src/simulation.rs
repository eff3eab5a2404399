//! Exact simulation of the cumulative claims process over development years.
//!
//! Within a year the jump-free dynamics started from a level `z` end as a
//! Poisson number of exponential pieces, so a year is simulated by splitting
//! the path into the branch started from `C_j` and one branch per new claim.

use rand::Rng;
use serde::Serialize;

use crate::calibration::CtParams;
use crate::error::{Error, Result};
use crate::kernel::{
    sample_compound_poisson_exp, sample_poisson_times, CompoundPoissonExpParams, RngStream,
};
use crate::real::{one_minus_exp_over, Real};
use crate::triangle::{ClaimsData, Triangle};

/// Below this diffusion coefficient a branch evolves deterministically.
const TAU2_FLOOR: f64 = 1e-14;

/// Law at the end of the year of a jump-free branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BranchLaw<T> {
    Deterministic(T),
    CompoundPoisson(CompoundPoissonExpParams<T>),
}

impl<T: Real> BranchLaw<T> {
    pub fn mean(&self) -> T {
        match self {
            BranchLaw::Deterministic(v) => *v,
            BranchLaw::CompoundPoisson(p) => p.mean(),
        }
    }

    /// Probability that the branch has been absorbed at zero.
    pub fn zero_probability(&self) -> T {
        match self {
            BranchLaw::Deterministic(v) if *v == T::zero() => T::one(),
            BranchLaw::Deterministic(_) => T::zero(),
            BranchLaw::CompoundPoisson(p) => p.zero_probability(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            BranchLaw::Deterministic(v) => *v,
            BranchLaw::CompoundPoisson(p) => sample_compound_poisson_exp(p, rng),
        }
    }
}

/// Transition law of the jump-free process from level `z` over `[t_from, t_to]`.
pub fn branch_law<T: Real>(z: T, t_from: T, t_to: T, delta: T, tau2: T) -> Result<BranchLaw<T>> {
    let h = t_to - t_from;
    if !(z >= T::zero()) || !(h >= T::zero()) || !(tau2 >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "branch needs z >= 0, t_to >= t_from and tau2 >= 0, got z = {z}, h = {h}, tau2 = {tau2}"
        )));
    }
    let decay = (-delta * h).exp();
    if tau2 < T::lit(TAU2_FLOOR) || h == T::zero() {
        return Ok(BranchLaw::Deterministic(z * decay));
    }
    let exp_rate = T::lit(2.0) / (tau2 * h * one_minus_exp_over(delta * h));
    if !exp_rate.is_finite() {
        return Ok(BranchLaw::Deterministic(z * decay));
    }
    Ok(BranchLaw::CompoundPoisson(CompoundPoissonExpParams {
        rate: z * decay * exp_rate,
        exp_rate,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump<T> {
    pub time: T,
    pub size: T,
}

/// One development year of one accident year, from time `j` to `j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearTransition<T> {
    pub c_start: T,
    pub c_end: T,
    /// New claims reported during the year, evolved to the year end.
    pub n_inc: T,
    /// Decrease of the claims already reported at `j`.
    pub d_inc: T,
    pub jump_count: usize,
    /// Filled only by [`simulate_year_traced`].
    pub jumps: Vec<Jump<T>>,
}

fn check_year<T: Real>(c_start: T, j: usize, exposure: T, params: &CtParams<T>) -> Result<()> {
    if !(c_start >= T::zero()) || !c_start.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "c_start = {c_start} must be finite and >= 0"
        )));
    }
    if !(exposure > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "exposure = {exposure} must be > 0"
        )));
    }
    if j >= params.n() {
        return Err(Error::OutOfRange {
            i: 0,
            j,
            n: params.n(),
        });
    }
    Ok(())
}

fn year_impl<T: Real, R: Rng + ?Sized>(
    c_start: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
    rng: &mut R,
    trace: bool,
) -> Result<YearTransition<T>> {
    check_year(c_start, j, exposure, params)?;
    let (a, b) = (T::of_usize(j), T::of_usize(j + 1));
    let (delta, tau2) = (params.delta(j), params.tau2(j));
    let times = sample_poisson_times(params.lambda(j + 1) * exposure, a, b, rng)?;
    let law = params.jump_law();
    let jumps: Vec<Jump<T>> = times
        .into_iter()
        .map(|time| Jump {
            time,
            size: law.sample(rng),
        })
        .collect();

    let s0 = branch_law(c_start, a, b, delta, tau2)?.sample(rng);
    let mut n_inc = T::zero();
    for jump in &jumps {
        n_inc = n_inc + branch_law(jump.size, jump.time, b, delta, tau2)?.sample(rng);
    }
    let d_inc = c_start - s0;
    // Written this way the decomposition holds exactly in floating point,
    // and c_end >= 0 because d_inc <= c_start.
    let c_end = (c_start + n_inc) - d_inc;
    Ok(YearTransition {
        c_start,
        c_end,
        n_inc,
        d_inc,
        jump_count: jumps.len(),
        jumps: if trace { jumps } else { Vec::new() },
    })
}

/// Simulates `C_{j+1}` from `C_j = c_start` by the branch decomposition,
/// also returning the split into new claims and development.
pub fn simulate_year<T: Real, R: Rng + ?Sized>(
    c_start: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
    rng: &mut R,
) -> Result<YearTransition<T>> {
    year_impl(c_start, j, exposure, params, rng, false)
}

/// [`simulate_year`] keeping the jump times and sizes.
pub fn simulate_year_traced<T: Real, R: Rng + ?Sized>(
    c_start: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
    rng: &mut R,
) -> Result<YearTransition<T>> {
    year_impl(c_start, j, exposure, params, rng, true)
}

/// Simulates `C_{j+1}` jump by jump, evolving the whole level between arrivals.
pub fn simulate_year_jumpwise<T: Real, R: Rng + ?Sized>(
    c_start: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
    rng: &mut R,
) -> Result<T> {
    check_year(c_start, j, exposure, params)?;
    let (a, b) = (T::of_usize(j), T::of_usize(j + 1));
    let (delta, tau2) = (params.delta(j), params.tau2(j));
    let times = sample_poisson_times(params.lambda(j + 1) * exposure, a, b, rng)?;
    let sizes: Vec<T> = times
        .iter()
        .map(|_| params.jump_law().sample(rng))
        .collect();
    let (mut c, mut t) = (c_start, a);
    for (&time, &size) in times.iter().zip(&sizes) {
        c = branch_law(c, t, time, delta, tau2)?.sample(rng) + size;
        t = time;
    }
    Ok(branch_law(c, t, b, delta, tau2)?.sample(rng))
}

/// Chains [`simulate_year`] from `C_{from} = c_start` up to development year `params.n()`.
pub fn simulate_row<T: Real, R: Rng + ?Sized>(
    c_start: T,
    from: usize,
    exposure: T,
    params: &CtParams<T>,
    rng: &mut R,
) -> Result<Vec<YearTransition<T>>> {
    let mut out = Vec::with_capacity(params.n().saturating_sub(from));
    let mut c = c_start;
    for j in from..params.n() {
        let step = simulate_year(c, j, exposure, params, rng)?;
        c = step.c_end;
        out.push(step);
    }
    Ok(out)
}

/// Sub-stream for cell `(i, j)` of a triangle.
pub fn cell_stream(base: &RngStream, i: usize, j: usize) -> RngStream {
    base.child(((i as u64) << 32) | j as u64)
}

/// Square N, D and C arrays: observed cells copied, the rest simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedTriangles<T> {
    pub new_claims: Triangle<T>,
    pub development: Triangle<T>,
    pub cumulative: Triangle<T>,
}

impl<T: Real> CompletedTriangles<T> {
    /// `sum_i (C_{i,n} - C_{i,n+1-i})`.
    pub fn reserve(&self) -> T {
        let n = self.cumulative.n();
        (2..=n)
            .map(|i| self.cumulative.at(i, n) - self.cumulative.at(i, n + 1 - i))
            .sum()
    }
}

/// Simulates the unobserved cells of every accident year from its latest observed value.
///
/// Cell `(i, j + 1)` draws from `cell_stream(base, i, j + 1)`.
pub fn simulate_lower_triangle<T: Real>(
    data: &ClaimsData<T>,
    params: &CtParams<T>,
    base: &RngStream,
) -> Result<CompletedTriangles<T>> {
    let n = data.size();
    if params.n() != n {
        return Err(Error::SizeMismatch(format!(
            "data has n = {n}, parameters n = {}",
            params.n()
        )));
    }
    let mut nt = data.new_claims().clone();
    let mut dt = data.development().clone();
    let mut ct = data.cumulative().clone();
    for i in 2..=n {
        let e = data.exposure().get(i);
        let mut c = ct.get(i, n + 1 - i)?;
        for j in (n + 1 - i)..n {
            let step = simulate_year(c, j, e, params, &mut cell_stream(base, i, j + 1))?;
            nt.set(i, j + 1, step.n_inc)?;
            dt.set(i, j + 1, step.d_inc)?;
            ct.set(i, j + 1, step.c_end)?;
            c = step.c_end;
        }
    }
    Ok(CompletedTriangles {
        new_claims: nt,
        development: dt,
        cumulative: ct,
    })
}

/// Closed-form one-year conditional moments of N, D and C given `C_j = c_start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearMoments<T> {
    pub mean_n: T,
    pub var_n: T,
    pub mean_d: T,
    pub var_d: T,
    pub mean_c: T,
    pub var_c: T,
}

pub fn year_moments<T: Real>(
    c_start: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
) -> YearMoments<T> {
    let (delta, tau2, lambda) = (params.delta(j), params.tau2(j), params.lambda(j + 1));
    let law = params.jump_law();
    let g = one_minus_exp_over(delta);
    let g2 = one_minus_exp_over(T::lit(2.0) * delta);
    let decay = (-delta).exp();
    let mean_d = c_start * (T::one() - decay);
    let var_d = c_start * tau2 * decay * g;
    let mean_n = law.mean * exposure * lambda * g;
    let var_n =
        exposure * lambda * (law.mean * tau2 * g * g / T::lit(2.0) + law.second_moment() * g2);
    YearMoments {
        mean_n,
        var_n,
        mean_d,
        var_d,
        mean_c: c_start + mean_n - mean_d,
        var_c: var_n + var_d,
    }
}

/// Bounds on the probability of absorption at zero by time `t`, with `j < t <= j + 1`.
///
/// The upper bound is the exact probability that every claim reported by `j` has
/// vanished, `P(D_t = C_j)`; the lower bound also requires no new arrival.
pub fn absorption_bounds<T: Real>(
    c_j: T,
    j: usize,
    exposure: T,
    params: &CtParams<T>,
    t: T,
) -> Result<(T, T)> {
    if j >= params.n() {
        return Err(Error::OutOfRange {
            i: 0,
            j,
            n: params.n(),
        });
    }
    let a = T::of_usize(j);
    if !(t > a && t <= a + T::one()) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} must lie in ({j}, {}]",
            j + 1
        )));
    }
    let upper = branch_law(c_j, a, t, params.delta(j), params.tau2(j))?.zero_probability();
    let lower = upper * (-params.lambda(j + 1) * exposure * (t - a)).exp();
    Ok((lower, upper))
}

/// Absorption bounds for one cell of the latest diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorptionPoint<T> {
    pub i: usize,
    pub j: usize,
    pub c: T,
    pub lower: T,
    pub upper: T,
}

/// Bounds at `t = j + 1` for every `(i, n + 1 - i)` with `i >= 2`, and the index of the largest upper bound.
pub fn absorption_scan<T: Real>(
    data: &ClaimsData<T>,
    params: &CtParams<T>,
) -> Result<(Vec<AbsorptionPoint<T>>, Option<usize>)> {
    let n = data.size();
    let mut points = Vec::new();
    for i in 2..=n {
        let j = n + 1 - i;
        let c = data.cumulative().get(i, j)?;
        let (lower, upper) =
            absorption_bounds(c, j, data.exposure().get(i), params, T::of_usize(j + 1))?;
        points.push(AbsorptionPoint {
            i,
            j,
            c,
            lower,
            upper,
        });
    }
    let best = points
        .iter()
        .enumerate()
        .max_by(|a, b| {
            a.1.upper
                .partial_cmp(&b.1.upper)
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(k, _)| k);
    Ok((points, best))
}
