use serde::Serialize;
use statrs::distribution::{Continuous, ContinuousCDF, Gamma, LogNormal};

use super::Summary;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchedFamily {
    #[default]
    LogNormal,
    Gamma,
}

/// How the log-normal variance parameter is derived from mean `mu` and MSEP `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogNormalParam {
    /// `ln(1 + s2 / mu^2)`, which matches both moments.
    #[default]
    Standard,
    /// `ln(1 + s2 / mu)`.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatchedLaw {
    PointMass { value: f64 },
    LogNormal { location: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
}

/// A reserve law fitted to a point estimate and an MSEP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchedDistribution {
    pub family: MatchedFamily,
    pub param: LogNormalParam,
    pub point: f64,
    pub msep: f64,
    pub law: MatchedLaw,
}

pub fn moment_matched(
    point: f64,
    msep: f64,
    family: MatchedFamily,
    param: LogNormalParam,
) -> Result<MatchedDistribution> {
    if !(point > 0.0 && point.is_finite()) || !(msep >= 0.0 && msep.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "moment matching needs point > 0 and msep >= 0, got {point} and {msep}"
        )));
    }
    let law = if msep == 0.0 {
        MatchedLaw::PointMass { value: point }
    } else {
        match family {
            MatchedFamily::LogNormal => {
                let s2 = match param {
                    LogNormalParam::Standard => (msep / (point * point)).ln_1p(),
                    LogNormalParam::Printed => (msep / point).ln_1p(),
                };
                MatchedLaw::LogNormal {
                    location: point.ln() - s2 / 2.0,
                    scale: s2.sqrt(),
                }
            }
            MatchedFamily::Gamma => MatchedLaw::Gamma {
                shape: point * point / msep,
                rate: point / msep,
            },
        }
    };
    Ok(MatchedDistribution {
        family,
        param,
        point,
        msep,
        law,
    })
}

impl MatchedDistribution {
    pub fn quantile(&self, p: f64) -> f64 {
        match self.law {
            MatchedLaw::PointMass { value } => value,
            MatchedLaw::LogNormal { location, scale } => LogNormal::new(location, scale)
                .expect("valid")
                .inverse_cdf(p),
            MatchedLaw::Gamma { shape, rate } => {
                Gamma::new(shape, rate).expect("valid").inverse_cdf(p)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.law {
            MatchedLaw::PointMass { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            MatchedLaw::LogNormal { location, scale } => {
                LogNormal::new(location, scale).expect("valid").cdf(x)
            }
            MatchedLaw::Gamma { shape, rate } => Gamma::new(shape, rate).expect("valid").cdf(x),
        }
    }

    /// Density; `None` for a point mass.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match self.law {
            MatchedLaw::PointMass { .. } => None,
            MatchedLaw::LogNormal { location, scale } => {
                Some(LogNormal::new(location, scale).expect("valid").pdf(x))
            }
            MatchedLaw::Gamma { shape, rate } => {
                Some(Gamma::new(shape, rate).expect("valid").pdf(x))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self.law {
            MatchedLaw::PointMass { value } => value,
            MatchedLaw::LogNormal { location, scale } => (location + scale * scale / 2.0).exp(),
            MatchedLaw::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match self.law {
            MatchedLaw::PointMass { .. } => 0.0,
            MatchedLaw::LogNormal { location, scale } => {
                let s2 = scale * scale;
                s2.exp_m1() * (2.0 * location + s2).exp()
            }
            MatchedLaw::Gamma { shape, rate } => shape / (rate * rate),
        }
    }

    /// Summary against the point estimate; the MSEP is the input one.
    pub fn summary(&self) -> Summary {
        let q995 = self.quantile(0.995);
        Summary {
            replicates: 0,
            point_estimate: self.point,
            mean: self.mean(),
            msep: self.msep,
            msep_root_pct: 100.0 * self.msep.sqrt() / self.point,
            q995,
            q995_excess_pct: 100.0 * (q995 - self.point) / self.point,
        }
    }
}
