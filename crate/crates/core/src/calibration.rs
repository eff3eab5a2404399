//! Mapping between discrete development parameters and the piecewise-constant
//! jump-diffusion parameters, and calibration of the jump-size law.
//!
//! On each development interval `[j, j+1)` the cumulative claims follow
//! `dC = Z dPi - delta_j C dt + tau_j sqrt(C) dW`, with arrivals at rate
//! `lambda_{j+1} * E_i`. The discrete parameters are recovered as
//!
//! ```text
//! 1 - Delta_j     = exp(-delta_j)
//! Lambda_{j+1}    = lambda_{j+1} E[Z] (1 - exp(-delta_j)) / delta_j
//! T2_j            = tau2_j (exp(-delta_j) - exp(-2 delta_j)) / delta_j
//! Sigma2_{j+1}    = A_j + B_j * E[Z^2] / E[Z]
//! ```
//!
//! so that `X = E[Z^2]/E[Z]` is identified by a weighted regression through
//! the origin of `Sigma2_{j+1} - A_j` on `B_j`.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::estimators::DiscreteParams;
use crate::real::{neg_log1m_over, one_minus_exp_over, Real};
use crate::stats::wls_through_origin;

/// Family of the jump-size distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpFamily {
    Gamma,
}

/// Jump-size law `P_Z`, determined by `E[Z]` and `X = E[Z^2]/E[Z]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpLaw<T> {
    pub family: JumpFamily,
    pub mean: T,
    pub second_moment_ratio: T,
    /// Gamma shape `alpha = E[Z] / (X - E[Z])`.
    pub shape: T,
    /// Gamma rate `beta = 1 / (X - E[Z])`.
    pub rate: T,
}

impl<T: Real> JumpLaw<T> {
    pub fn second_moment(&self) -> T {
        self.mean * self.second_moment_ratio
    }

    pub fn variance(&self) -> T {
        self.mean * (self.second_moment_ratio - self.mean)
    }
}

/// Gamma law with mean `ez` and `E[Z^2]/E[Z] = x`; requires `0 < ez < x`.
pub fn fit_jump_gamma<T: Real>(ez: T, x: T) -> Result<JumpLaw<T>> {
    if !(ez > T::zero() && ez < x && x.is_finite()) {
        return Err(Error::InfeasibleJumpLaw {
            mean: ez.to_string(),
            ratio: x.to_string(),
        });
    }
    let rate = T::one() / (x - ez);
    Ok(JumpLaw {
        family: JumpFamily::Gamma,
        mean: ez,
        second_moment_ratio: x,
        shape: ez * rate,
        rate,
    })
}

/// Continuous-time parameters, constant on each development interval.
///
/// `lambda(j)` for `j = 1..=n` is the arrival intensity per unit exposure on
/// `[j-1, j)`; `delta(j)` and `tau2(j)` for `j = 0..n` apply on `[j, j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtParams<T> {
    lambda: Vec<T>,
    delta: Vec<T>,
    tau2: Vec<T>,
    jump_law: JumpLaw<T>,
}

impl<T: Real> CtParams<T> {
    /// `lambda` holds `j = 1..=n`; `delta` and `tau2` hold `j = 0..n` and must start with 0.
    pub fn new(lambda: Vec<T>, delta: Vec<T>, tau2: Vec<T>, jump_law: JumpLaw<T>) -> Result<Self> {
        let n = lambda.len();
        if n == 0 || delta.len() != n || tau2.len() != n {
            return Err(Error::SizeMismatch(format!(
                "lambda, delta and tau2 need the same positive length (got {}, {}, {})",
                n,
                delta.len(),
                tau2.len()
            )));
        }
        if delta[0] != T::zero() || tau2[0] != T::zero() {
            return Err(Error::InvalidParameter(
                "delta(0) and tau2(0) must be 0".into(),
            ));
        }
        if lambda.iter().any(|&l| !(l >= T::zero() && l.is_finite()))
            || tau2.iter().any(|&t| !(t >= T::zero() && t.is_finite()))
            || delta.iter().any(|d| !d.is_finite())
        {
            return Err(Error::InvalidParameter(
                "lambda and tau2 must be finite and >= 0, delta finite".into(),
            ));
        }
        Ok(Self {
            lambda,
            delta,
            tau2,
            jump_law,
        })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// Arrival intensity on `[j-1, j)`, `1 <= j <= n`.
    #[inline]
    pub fn lambda(&self, j: usize) -> T {
        self.lambda[j - 1]
    }

    /// Drift rate on `[j, j+1)`, `0 <= j < n`.
    #[inline]
    pub fn delta(&self, j: usize) -> T {
        self.delta[j]
    }

    /// Squared diffusion coefficient on `[j, j+1)`, `0 <= j < n`.
    #[inline]
    pub fn tau2(&self, j: usize) -> T {
        self.tau2[j]
    }

    pub fn jump_law(&self) -> &JumpLaw<T> {
        &self.jump_law
    }

    /// `lambda(j) * E[Z]` for `j = 1..=n`; these do not depend on the choice of `E[Z]`.
    pub fn lambda_times_mean(&self) -> Vec<T> {
        self.lambda
            .iter()
            .map(|&l| l * self.jump_law.mean)
            .collect()
    }
}

/// `(A_j, B_j)` for `j = 0..=n-2`:
/// `A_j = T2_j Lambda_{j+1} / (2 (1 - Delta_j))`, `B_j = Lambda_{j+1} (2 - Delta_j) / 2`.
pub fn compute_ab<T: Real>(p: &DiscreteParams<T>) -> Result<Vec<(T, T)>> {
    let two = T::lit(2.0);
    (0..p.n() - 1)
        .map(|j| {
            let d = p.delta(j);
            if d >= T::one() {
                return Err(Error::DeltaNotBelowOne {
                    j,
                    value: d.to_string(),
                });
            }
            let l = p.lambda(j + 1);
            Ok((p.t2(j) * l / (two * (T::one() - d)), l * (two - d) / two))
        })
        .collect()
}

/// One point of the regression of `Sigma2_{j+1} - A_j` on `B_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionPoint<T> {
    /// Index of `(A_j, B_j)`; the response is `Sigma2_{j+1}`.
    pub j: usize,
    pub a: T,
    pub b: T,
    pub sigma2: T,
    pub response: T,
    pub weight: T,
    /// `A_j + B_j * x_hat`.
    pub fitted_sigma2: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport<T> {
    pub x_hat: T,
    pub std_error: Option<T>,
    /// Two-sided t-test of a zero slope; `None` without residual degrees of freedom.
    pub p_value: Option<T>,
    /// `1 - RSS_w / TSS_w` with the total sum of squares about zero.
    pub r_squared: Option<T>,
    pub degrees_of_freedom: usize,
    pub points: Vec<RegressionPoint<T>>,
}

/// Regression points with positive weight: response index `k = j + 1` carries weight `n - k`.
fn regression_points<T: Real>(p: &DiscreteParams<T>) -> Result<Vec<RegressionPoint<T>>> {
    let n = p.n();
    let ab = compute_ab(p)?;
    Ok(ab
        .into_iter()
        .enumerate()
        .filter(|(j, _)| n > j + 1)
        .map(|(j, (a, b))| {
            let sigma2 = p.sigma2(j + 1);
            RegressionPoint {
                j,
                a,
                b,
                sigma2,
                response: sigma2 - a,
                weight: T::of_usize(n - (j + 1)),
                fitted_sigma2: T::nan(),
            }
        })
        .collect())
}

/// Weighted least-squares estimate of `X = E[Z^2]/E[Z]` only.
pub fn fit_x<T: Real>(p: &DiscreteParams<T>) -> Result<T> {
    let pts = regression_points(p)?;
    let (mut num, mut den) = (T::zero(), T::zero());
    for pt in &pts {
        num = num + pt.weight * pt.b * pt.response;
        den = den + pt.weight * pt.b * pt.b;
    }
    if !(den > T::zero()) {
        return Err(Error::Regression(
            "all regressors have zero weight or are zero".into(),
        ));
    }
    Ok(num / den)
}

/// Weighted regression through the origin of `Sigma2_{j+1} - A_j` on `B_j`.
pub fn estimate_x<T: Real>(p: &DiscreteParams<T>) -> Result<RegressionReport<T>> {
    let mut points = regression_points(p)?;
    if points.is_empty() {
        return Err(Error::Regression("no point with positive weight".into()));
    }
    let xs: Vec<T> = points.iter().map(|q| q.b).collect();
    let ys: Vec<T> = points.iter().map(|q| q.response).collect();
    let ws: Vec<T> = points.iter().map(|q| q.weight).collect();
    let fit = wls_through_origin(&xs, &ys, &ws)?;
    for q in &mut points {
        q.fitted_sigma2 = q.a + q.b * fit.slope;
    }
    let std_error = (fit.df > 0).then(|| (fit.rss / T::of_usize(fit.df) / fit.sxx).sqrt());
    let p_value = std_error.map(|se| {
        let t = (fit.slope / se).abs();
        if !t.is_finite() {
            return T::zero();
        }
        let dist = StudentsT::new(0.0, 1.0, fit.df as f64).expect("df > 0");
        T::lit(2.0 * (1.0 - dist.cdf(t.as_f64())))
    });
    let r_squared = (fit.tss > T::zero()).then(|| T::one() - fit.rss / fit.tss);
    Ok(RegressionReport {
        x_hat: fit.slope,
        std_error,
        p_value,
        r_squared,
        degrees_of_freedom: fit.df,
        points,
    })
}

/// Continuous-time parameters for a given `E[Z] = ez` and ratio `x`.
///
/// `delta_j = -ln(1 - Delta_j)`,
/// `lambda_{j+1} = -Lambda_{j+1} ln(1 - Delta_j) / (ez Delta_j)`,
/// `tau2_j = T2_j ln(1 - Delta_j) / (Delta_j (Delta_j - 1))`, with their
/// limits at `Delta_j = 0`.
pub fn discrete_to_ct<T: Real>(p: &DiscreteParams<T>, ez: T, x: T) -> Result<CtParams<T>> {
    let law = fit_jump_gamma(ez, x)?;
    discrete_to_ct_with_law(p, law)
}

/// [`discrete_to_ct`] with an already fitted jump law.
pub fn discrete_to_ct_with_law<T: Real>(
    p: &DiscreteParams<T>,
    law: JumpLaw<T>,
) -> Result<CtParams<T>> {
    let n = p.n();
    let mut lambda = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    let mut tau2 = Vec::with_capacity(n);
    for j in 0..n {
        let d = p.delta(j);
        if !(d < T::one()) {
            return Err(Error::DeltaNotBelowOne {
                j,
                value: d.to_string(),
            });
        }
        let ratio = neg_log1m_over(d);
        delta.push(-(-d).ln_1p());
        lambda.push(p.lambda(j + 1) * ratio / law.mean);
        tau2.push(p.t2(j) * ratio / (T::one() - d));
    }
    delta[0] = T::zero();
    tau2[0] = T::zero();
    CtParams::new(lambda, delta, tau2, law)
}

/// Discrete parameters implied by continuous-time ones.
///
/// `Sigma2(n)` is also filled in from the model, unlike the estimator where it is 0.
pub fn ct_to_discrete<T: Real>(c: &CtParams<T>) -> DiscreteParams<T> {
    let n = c.n();
    let law = c.jump_law();
    let two = T::lit(2.0);
    let mut lambda = Vec::with_capacity(n);
    let mut sigma2 = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n - 1);
    let mut t2 = Vec::with_capacity(n - 1);
    for j in 0..n {
        let dl = c.delta(j);
        let g = one_minus_exp_over(dl);
        let g2 = one_minus_exp_over(two * dl);
        let l = c.lambda(j + 1);
        let tau2 = c.tau2(j);
        lambda.push(l * law.mean * g);
        sigma2.push(tau2 * l * law.mean * g * g / two + l * law.second_moment() * g2);
        if j > 0 {
            delta.push(-(-dl).exp_m1());
            t2.push(tau2 * (-dl).exp() * g);
        }
    }
    DiscreteParams::from_parts(lambda, delta, sigma2, t2)
}
