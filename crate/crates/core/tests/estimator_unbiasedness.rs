use ctreserve_core::estimators::{estimate_discrete, TailVarianceRule};
use ctreserve_core::kernel::{sample_gamma, sample_normal};
use ctreserve_core::stats::moment_estimate;
use ctreserve_core::triangle::{ClaimsData, ExposureVector, Triangle};
use ctreserve_core::RngStream;

const N: usize = 6;
const LAMBDA: [f64; N] = [0.4, 0.25, 0.1, 0.05, 0.02, 0.01];
const SIGMA2: [f64; N] = [0.2, 0.1, 0.05, 0.02, 0.01, 0.005];
const DELTA: [f64; N - 1] = [0.1, 0.05, -0.05, 0.02, 0.01];
const T2: [f64; N - 1] = [0.3, 0.2, 0.1, 0.05, 0.02];

/// One synthetic data set: gamma new claims and normal development given C.
fn synthetic(rng: &mut RngStream) -> ClaimsData<f64> {
    let e: Vec<f64> = (0..N).map(|i| 100.0 + 10.0 * i as f64).collect();
    let mut nt = Triangle::empty(N);
    let mut dt = Triangle::empty(N);
    for i in 1..=N {
        let ei = e[i - 1];
        let mut c = 0.0;
        for j in 1..=N + 1 - i {
            let (l, s2) = (LAMBDA[j - 1], SIGMA2[j - 1]);
            let new = sample_gamma(l * l * ei / s2, l / s2, rng).unwrap();
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

#[test]
fn estimators_are_unbiased_on_synthetic_data() {
    let mut rng = RngStream::new(2024, 0);
    let fits: Vec<_> = (0..10_000)
        .map(|_| estimate_discrete(&synthetic(&mut rng), TailVarianceRule::Formula).unwrap())
        .collect();
    for j in 1..=N {
        let xs: Vec<f64> = fits.iter().map(|p| p.lambda(j)).collect();
        let est = moment_estimate(&xs).unwrap();
        assert!(
            (est.mean - LAMBDA[j - 1]).abs() < 3.0 * est.mean_se,
            "Lambda_{j}: {}",
            est.mean
        );
    }
    for j in 1..N {
        let xs: Vec<f64> = fits.iter().map(|p| p.delta(j)).collect();
        let est = moment_estimate(&xs).unwrap();
        assert!(
            (est.mean - DELTA[j - 1]).abs() < 3.0 * est.mean_se,
            "Delta_{j}: {}",
            est.mean
        );
    }
}
