//! Seeded sampling primitives.
//!
//! An [`RngStream`] is a ChaCha8 keystream selected by `(seed, stream_id)`,
//! so every bootstrap replicate (and every accident-year / development-year
//! cell inside it) draws from its own counter-based stream regardless of how
//! work is scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calibration::{JumpFamily, JumpLaw};
use crate::error::{Error, Result};
use crate::real::Real;

/// splitmix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Independent stream derived from this one's id and `tag`.
    ///
    /// The parent's position is not consumed, so children can be created in any order.
    pub fn child(&self, tag: u64) -> Self {
        Self::new(
            self.seed,
            mix64(self.stream_id ^ mix64(tag.wrapping_add(0x5851_F42D_4C95_7F2D))),
        )
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Poisson number of exponential summands: `S = X_1 + ... + X_M`,
/// `M ~ Poisson(rate)`, `X_k ~ Exp(exp_rate)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompoundPoissonExpParams<T> {
    pub rate: T,
    pub exp_rate: T,
}

impl<T: Real> CompoundPoissonExpParams<T> {
    pub fn new(rate: T, exp_rate: T) -> Result<Self> {
        if !(rate >= T::zero() && rate.is_finite())
            || !(exp_rate > T::zero() && exp_rate.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "compound Poisson needs rate >= 0 and exp_rate > 0, got {rate} and {exp_rate}"
            )));
        }
        Ok(Self { rate, exp_rate })
    }

    pub fn mean(&self) -> T {
        self.rate / self.exp_rate
    }

    pub fn variance(&self) -> T {
        T::lit(2.0) * self.rate / (self.exp_rate * self.exp_rate)
    }

    /// `P(S = 0) = exp(-rate)`.
    pub fn zero_probability(&self) -> T {
        (-self.rate).exp()
    }
}

/// Draws `S`. Given `M = m > 0` the sum of `m` exponentials is drawn as a
/// single `Gamma(m, exp_rate)` variate, which has the same law.
pub fn sample_compound_poisson_exp<T: Real, R: Rng + ?Sized>(
    p: &CompoundPoissonExpParams<T>,
    rng: &mut R,
) -> T {
    let m = T::sample_poisson(p.rate, rng);
    if m == 0 {
        return T::zero();
    }
    let shape = T::from_u64(m).unwrap_or_else(T::infinity);
    T::sample_std_gamma(shape, rng) / p.exp_rate
}

pub fn sample_uniform<T: Real, R: Rng + ?Sized>(a: T, b: T, rng: &mut R) -> T {
    a + (b - a) * T::sample_open01(rng)
}

pub fn sample_exponential<T: Real, R: Rng + ?Sized>(rate: T, rng: &mut R) -> Result<T> {
    if !(rate > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "exponential rate {rate} must be > 0"
        )));
    }
    Ok(T::sample_std_exp(rng) / rate)
}

/// Normal draw with the given mean and variance; zero variance returns `mean`.
pub fn sample_normal<T: Real, R: Rng + ?Sized>(mean: T, var: T, rng: &mut R) -> Result<T> {
    if !(var >= T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "normal variance {var} must be >= 0"
        )));
    }
    if var == T::zero() {
        return Ok(mean);
    }
    Ok(mean + var.sqrt() * T::sample_std_normal(rng))
}

/// Gamma draw with shape and rate parameters.
pub fn sample_gamma<T: Real, R: Rng + ?Sized>(shape: T, rate: T, rng: &mut R) -> Result<T> {
    if !(shape > T::zero() && shape.is_finite()) || !(rate > T::zero() && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma needs shape > 0 and rate > 0, got {shape} and {rate}"
        )));
    }
    Ok(T::sample_std_gamma(shape, rng) / rate)
}

pub fn sample_chi2<T: Real, R: Rng + ?Sized>(df: T, rng: &mut R) -> Result<T> {
    if !(df >= T::one()) {
        return Err(Error::InvalidParameter(format!(
            "chi-square df {df} must be >= 1"
        )));
    }
    Ok(T::lit(2.0) * T::sample_std_gamma(df / T::lit(2.0), rng))
}

pub fn sample_poisson<T: Real, R: Rng + ?Sized>(mean: T, rng: &mut R) -> Result<u64> {
    if !(mean >= T::zero() && mean.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "poisson mean {mean} must be finite and >= 0"
        )));
    }
    Ok(T::sample_poisson(mean, rng))
}

/// Arrival times of a homogeneous Poisson process with intensity `rate` on `[a, b]`, ascending.
pub fn sample_poisson_times<T: Real, R: Rng + ?Sized>(
    rate: T,
    a: T,
    b: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    if !(b >= a) {
        return Err(Error::InvalidParameter(format!(
            "interval [{a}, {b}] is reversed"
        )));
    }
    let count = sample_poisson(rate * (b - a), rng)?;
    let mut times: Vec<T> = (0..count).map(|_| sample_uniform(a, b, rng)).collect();
    crate::stats::sort_values(&mut times);
    Ok(times)
}

impl<T: Real> JumpLaw<T> {
    /// Draws one jump size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self.family {
            JumpFamily::Gamma => T::sample_std_gamma(self.shape, rng) / self.rate,
        }
    }
}
