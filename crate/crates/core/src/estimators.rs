//! Development-parameter estimators, ultimate and reserve point estimates, and
//! the closed-form conditional moments of the cumulative claims.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::triangle::{ClaimsData, ExposureVector, Triangle};

/// How the variance estimates at the end of the triangle are set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailVarianceRule {
    /// Keep the estimator value of `Sigma2(n-1)`; `T2(n-1)` has no degrees of
    /// freedom and is 0.
    #[default]
    Formula,
    /// Force `Sigma2(n-1) = T2(n-1) = 0`.
    ZeroLast,
}

/// Discrete development parameters.
///
/// `lambda(j)` and `sigma2(j)` are indexed by development year `1..=n`;
/// `delta(j)` and `t2(j)` by `0..=n-1` with `delta(0) = t2(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteParams<T> {
    lambda: Vec<T>,
    delta: Vec<T>,
    sigma2: Vec<T>,
    t2: Vec<T>,
}

impl<T: Real> DiscreteParams<T> {
    /// `lambda`, `sigma2` carry `j = 1..=n`; `delta`, `t2` carry `j = 1..=n-1`.
    pub fn new(lambda: Vec<T>, delta: Vec<T>, sigma2: Vec<T>, t2: Vec<T>) -> Result<Self> {
        let n = lambda.len();
        if n < 2 || sigma2.len() != n || delta.len() != n - 1 || t2.len() != n - 1 {
            return Err(Error::SizeMismatch(format!(
                "lambda/sigma2 need n values and delta/t2 n-1 values (got {}, {}, {}, {})",
                lambda.len(),
                sigma2.len(),
                delta.len(),
                t2.len()
            )));
        }
        let p = Self::from_parts(lambda, delta, sigma2, t2);
        p.validate()?;
        Ok(p)
    }

    pub(crate) fn from_parts(lambda: Vec<T>, delta: Vec<T>, sigma2: Vec<T>, t2: Vec<T>) -> Self {
        let mut d = Vec::with_capacity(delta.len() + 1);
        d.push(T::zero());
        d.extend(delta);
        let mut t = Vec::with_capacity(t2.len() + 1);
        t.push(T::zero());
        t.extend(t2);
        Self {
            lambda,
            delta: d,
            sigma2,
            t2: t,
        }
    }

    fn validate(&self) -> Result<()> {
        for j in 1..=self.n() {
            let (l, s) = (self.lambda(j), self.sigma2(j));
            if !(l >= T::zero()) || !(s >= T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "Lambda({j}) = {l} and Sigma2({j}) = {s} must be >= 0"
                )));
            }
        }
        for j in 1..self.n() {
            let d = self.delta(j);
            if !(d <= T::one()) {
                return Err(Error::DeltaNotBelowOne {
                    j,
                    value: d.to_string(),
                });
            }
            if !(self.t2(j) >= T::zero()) {
                return Err(Error::InvalidParameter(format!(
                    "T2({j}) = {} must be >= 0",
                    self.t2(j)
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    /// `Lambda(j)`, `1 <= j <= n`.
    #[inline]
    pub fn lambda(&self, j: usize) -> T {
        self.lambda[j - 1]
    }

    /// `Sigma2(j)`, `1 <= j <= n`.
    #[inline]
    pub fn sigma2(&self, j: usize) -> T {
        self.sigma2[j - 1]
    }

    /// `Delta(j)`, `0 <= j <= n - 1`.
    #[inline]
    pub fn delta(&self, j: usize) -> T {
        self.delta[j]
    }

    /// `T2(j)`, `0 <= j <= n - 1`.
    #[inline]
    pub fn t2(&self, j: usize) -> T {
        self.t2[j]
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambda
    }

    pub fn sigma2s(&self) -> &[T] {
        &self.sigma2
    }

    /// `Delta(0..n)` including the leading zero.
    pub fn deltas(&self) -> &[T] {
        &self.delta
    }

    /// `T2(0..n)` including the leading zero.
    pub fn t2s(&self) -> &[T] {
        &self.t2
    }

    /// `prod_{k=from}^{to-1} (1 - Delta(k))`, evaluated left to right.
    pub fn survival_product(&self, from: usize, to: usize) -> T {
        (from..to).fold(T::one(), |acc, k| acc * (T::one() - self.delta[k]))
    }
}

/// Estimates from possibly simulated triangles, without validation.
///
/// `n_tri` and `d_tri` supply the numerators; `c_tri` and `exposure` the
/// weights. Cells with `C(i,j) = 0` contribute nothing to `T2(j)`.
pub(crate) fn estimate_unchecked<T: Real>(
    n_tri: &Triangle<T>,
    d_tri: &Triangle<T>,
    c_tri: &Triangle<T>,
    exposure: &ExposureVector<T>,
    rule: TailVarianceRule,
) -> DiscreteParams<T> {
    let n = n_tri.n();
    let mut lambda = Vec::with_capacity(n);
    let mut sigma2 = Vec::with_capacity(n);
    for j in 1..=n {
        let rows = n - j + 1;
        let e_sum: T = (1..=rows).map(|i| exposure.get(i)).sum();
        let n_sum: T = (1..=rows).map(|i| n_tri.at(i, j)).sum();
        let l = n_sum / e_sum;
        lambda.push(l);
        let s2 = if j < n {
            let ss: T = (1..=rows)
                .map(|i| {
                    let e = exposure.get(i);
                    let r = n_tri.at(i, j) / e - l;
                    e * r * r
                })
                .sum();
            ss / T::of_usize(n - j)
        } else {
            T::zero()
        };
        sigma2.push(s2);
    }
    let mut delta = Vec::with_capacity(n - 1);
    let mut t2 = Vec::with_capacity(n - 1);
    for j in 1..n {
        let rows = n - j;
        let c_sum: T = (1..=rows).map(|i| c_tri.at(i, j)).sum();
        let d_sum: T = (1..=rows).map(|i| d_tri.at(i, j + 1)).sum();
        let d = d_sum / c_sum;
        delta.push(d);
        let t = if j + 2 <= n {
            let ss: T = (1..=rows)
                .filter_map(|i| {
                    let c = c_tri.at(i, j);
                    if c > T::zero() {
                        let r = d_tri.at(i, j + 1) - d * c;
                        Some(r * r / c)
                    } else {
                        None
                    }
                })
                .sum();
            ss / T::of_usize(n - j - 1)
        } else {
            T::zero()
        };
        t2.push(t);
    }
    if rule == TailVarianceRule::ZeroLast {
        sigma2[n - 2] = T::zero();
    }
    DiscreteParams::from_parts(lambda, delta, sigma2, t2)
}

/// Unbiased estimators of `Lambda`, `Delta`, `Sigma2` and `T2` from observed data.
///
/// `Sigma2(n)` has no degrees of freedom and is set to 0.
pub fn estimate_discrete<T: Real>(
    data: &ClaimsData<T>,
    rule: TailVarianceRule,
) -> Result<DiscreteParams<T>> {
    let n = data.size();
    if n < 3 {
        return Err(Error::TooFewValues { needed: 3, got: n });
    }
    let c = data.cumulative();
    for j in 1..n {
        let c_sum: T = (1..=n - j).map(|i| c.at(i, j)).sum();
        if c_sum <= T::zero() {
            return Err(Error::ZeroDenominator { what: "Delta", j });
        }
        if j + 2 <= n {
            for i in 1..=n - j {
                if c.at(i, j) == T::zero() && data.development().at(i, j + 1) != T::zero() {
                    return Err(Error::ZeroDenominator { what: "T2", j });
                }
            }
        }
    }
    let p = estimate_unchecked(
        data.new_claims(),
        data.development(),
        c,
        data.exposure(),
        rule,
    );
    for j in 1..n {
        if p.delta(j) > T::one() {
            return Err(Error::DeltaNotBelowOne {
                j,
                value: p.delta(j).to_string(),
            });
        }
    }
    Ok(p)
}

/// Per accident year ultimates and the total reserve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReserveEstimate<T> {
    /// `ultimates[i - 1]` is the estimated `C(i, n)`; year 1 is fully developed.
    pub ultimates: Vec<T>,
    /// `ultimates[i - 1] - C(i, n + 1 - i)`.
    pub reserves: Vec<T>,
    pub total: T,
}

/// Estimated ultimate of accident year `i` from its latest diagonal value.
pub fn ultimate<T: Real>(c_latest: T, exposure: T, i: usize, p: &DiscreteParams<T>) -> T {
    let n = p.n();
    let from = n + 1 - i;
    let known = p.survival_product(from, n) * c_latest;
    let new: T = (from + 1..=n)
        .map(|k| p.lambda(k) * p.survival_product(k, n))
        .sum();
    known + exposure * new
}

/// Ultimates for every accident year and the total reserve `sum_{i>=2} (C(i,n) - C(i,n+1-i))`.
pub fn ultimate_and_reserve<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
) -> Result<ReserveEstimate<T>> {
    let n = data.size();
    if p.n() != n {
        return Err(Error::SizeMismatch(format!(
            "parameters for n = {} applied to n = {n}",
            p.n()
        )));
    }
    let c = data.cumulative();
    let mut ultimates = Vec::with_capacity(n);
    let mut reserves = Vec::with_capacity(n);
    for i in 1..=n {
        let latest = c.latest(i)?;
        let u = if i == 1 {
            latest
        } else {
            ultimate(latest, data.exposure().get(i), i, p)
        };
        ultimates.push(u);
        reserves.push(u - latest);
    }
    let total = reserves.iter().skip(1).copied().sum();
    Ok(ReserveEstimate {
        ultimates,
        reserves,
        total,
    })
}

/// `E(C(j) | F_s)` and `Var(C(j) | F_s)` of one accident year, from `C(s) = c_s`.
///
/// Requires `1 <= s <= j <= n`. New claims of year `s` are already part of `c_s`.
pub fn conditional_moments_from<T: Real>(
    c_s: T,
    exposure: T,
    p: &DiscreteParams<T>,
    s: usize,
    j: usize,
) -> Result<(T, T)> {
    let n = p.n();
    if s == 0 || s > j || j > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= j <= n, got s = {s}, j = {j}, n = {n}"
        )));
    }
    // E(C(k) | F_s) by the product-sum formula.
    let mean_at = |k: usize| -> T {
        let new: T = (s + 1..=k)
            .map(|l| p.lambda(l) * p.survival_product(l, k))
            .sum();
        p.survival_product(s, k) * c_s + exposure * new
    };
    let mean = mean_at(j);
    let var = (s..j)
        .map(|k| {
            let carry = (k + 1..j).fold(T::one(), |acc, l| {
                let f = T::one() - p.delta(l);
                acc * f * f
            });
            carry * (p.sigma2(k + 1) * exposure + p.t2(k) * mean_at(k))
        })
        .sum();
    Ok((mean, var))
}

/// [`conditional_moments_from`] at the observed `C(i, s)`; requires `s <= n + 1 - i`.
pub fn conditional_moments<T: Real>(
    data: &ClaimsData<T>,
    p: &DiscreteParams<T>,
    i: usize,
    s: usize,
    j: usize,
) -> Result<(T, T)> {
    let c_s = data.cumulative().get(i, s)?;
    conditional_moments_from(c_s, data.exposure().get(i), p, s, j)
}
