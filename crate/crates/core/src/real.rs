//! Scalar abstractions.
//!
//! Run-off triangles only need ring arithmetic, so [`Scalar`] is satisfied by
//! exact rationals as well as floats. Everything that takes logarithms,
//! square roots or draws random numbers is written against [`Real`], which is
//! implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, Poisson, StandardNormal};
use serde::Serialize;

/// Minimal arithmetic needed by the triangle data model.
pub trait Scalar: Num + Copy + PartialOrd + Debug {}

impl<T: Num + Copy + PartialOrd + Debug> Scalar for T {}

/// Poisson means above this are drawn from the normal approximation.
/// The relative error of that approximation is far below sampling noise there.
const POISSON_NORMAL_CUTOFF: f64 = 1e12;

/// Floating point scalar used throughout calibration, simulation and bootstrap.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + 'static
{
    /// Converts an `f64` constant. Lossy for `f32`.
    fn lit(v: f64) -> Self;

    fn as_f64(self) -> f64;

    fn of_usize(v: usize) -> Self {
        Self::lit(v as f64)
    }

    /// Uniform draw on the open interval (0, 1).
    fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Exponential draw with unit rate.
    fn sample_std_exp<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Gamma draw with the given shape and unit rate. `shape` must be positive.
    fn sample_std_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self;

    /// Poisson count with the given mean. `mean` must be finite and `>= 0`.
    fn sample_poisson<R: Rng + ?Sized>(mean: Self, rng: &mut R) -> u64;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn lit(v: f64) -> Self {
                v as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }

            #[inline]
            fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            #[inline]
            fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn sample_std_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            #[inline]
            fn sample_std_gamma<R: Rng + ?Sized>(shape: Self, rng: &mut R) -> Self {
                if shape == 1.0 {
                    return Exp1.sample(rng);
                }
                Gamma::new(shape, 1.0)
                    .expect("gamma shape must be positive and finite")
                    .sample(rng)
            }

            fn sample_poisson<R: Rng + ?Sized>(mean: Self, rng: &mut R) -> u64 {
                if mean <= 0.0 {
                    return 0;
                }
                if (mean as f64) > POISSON_NORMAL_CUTOFF {
                    let z: f64 = StandardNormal.sample(rng);
                    let m = mean as f64;
                    return (m + z * m.sqrt()).round().max(0.0) as u64;
                }
                let k: $t = Poisson::new(mean)
                    .expect("poisson mean must be positive and finite")
                    .sample(rng);
                k as u64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// `(1 - e^{-x}) / x`, continuous at `x = 0`.
///
/// Below `|x| < 1e-8` the second order Taylor polynomial is used.
pub fn one_minus_exp_over<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-8) {
        T::one() - x / T::lit(2.0) + x * x / T::lit(6.0)
    } else {
        -(-x).exp_m1() / x
    }
}

/// `-ln(1 - d) / d`, continuous at `d = 0`. Requires `d < 1`.
pub fn neg_log1m_over<T: Real>(d: T) -> T {
    if d.abs() < T::lit(1e-8) {
        T::one() + d / T::lit(2.0) + d * d / T::lit(3.0)
    } else {
        -(-d).ln_1p() / d
    }
}
