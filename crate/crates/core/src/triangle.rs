//! Run-off triangles, exposures and the N/D/C recursion.
//!
//! All public indices are 1-based: accident year `i` and development year `j`
//! both run over `1..=n`. In an observed triangle exactly the cells with
//! `i + j <= n + 1` are populated.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Scalar;

/// Dense `n x n` array with a populated-mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Triangle<T> {
    n: usize,
    cells: Vec<T>,
    mask: Vec<bool>,
}

impl<T: Scalar> Triangle<T> {
    /// Observed triangle from its rows; row `i` must hold `n - i + 1` values.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::SizeMismatch(
                "triangle needs at least one row".into(),
            ));
        }
        let mut tri = Self::empty(n);
        for (r, row) in rows.into_iter().enumerate() {
            let i = r + 1;
            if row.len() != n - i + 1 {
                return Err(Error::SizeMismatch(format!(
                    "row {i} has {} values, expected {}",
                    row.len(),
                    n - i + 1
                )));
            }
            for (c, v) in row.into_iter().enumerate() {
                tri.put(i, c + 1, v);
            }
        }
        Ok(tri)
    }

    /// Observed triangle filled from a function of `(i, j)`.
    pub fn observed_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut tri = Self::empty(n);
        for i in 1..=n {
            for j in 1..=n + 1 - i {
                tri.put(i, j, f(i, j));
            }
        }
        tri
    }

    /// Fully populated square, row-major `values.len() == n * n`.
    pub fn square(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::SizeMismatch(format!(
                "square of size {n} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self {
            n,
            cells: values,
            mask: vec![true; n * n],
        })
    }

    /// `n x n` array with nothing populated.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            cells: vec![T::zero(); n * n],
            mask: vec![false; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n + (j - 1)
    }

    fn check(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::OutOfRange { i, j, n: self.n });
        }
        Ok(self.idx(i, j))
    }

    pub fn is_populated(&self, i: usize, j: usize) -> bool {
        self.check(i, j).map(|k| self.mask[k]).unwrap_or(false)
    }

    /// Value at `(i, j)`; unpopulated cells are an error, never zero.
    pub fn get(&self, i: usize, j: usize) -> Result<T> {
        let k = self.check(i, j)?;
        if self.mask[k] {
            Ok(self.cells[k])
        } else {
            Err(Error::Unpopulated { i, j })
        }
    }

    /// Value at a cell the caller knows is populated.
    ///
    /// # Panics
    /// If `(i, j)` is out of range or unpopulated.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        let k = self.idx(i, j);
        assert!(self.mask[k], "cell ({i}, {j}) is not populated");
        self.cells[k]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) -> Result<()> {
        let k = self.check(i, j)?;
        self.cells[k] = value;
        self.mask[k] = true;
        Ok(())
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, value: T) {
        let k = self.idx(i, j);
        self.cells[k] = value;
        self.mask[k] = true;
    }

    /// True iff exactly the cells with `i + j <= n + 1` are populated.
    pub fn is_observed_shape(&self) -> bool {
        (1..=self.n)
            .all(|i| (1..=self.n).all(|j| self.mask[self.idx(i, j)] == (i + j <= self.n + 1)))
    }

    pub fn is_complete(&self) -> bool {
        self.mask.iter().all(|&m| m)
    }

    /// Latest observed diagonal value of accident year `i`, i.e. `(i, n + 1 - i)`.
    pub fn latest(&self, i: usize) -> Result<T> {
        self.get(i, self.n + 1 - i)
    }

    /// Populated values of row `i` in development order.
    pub fn row(&self, i: usize) -> Vec<T> {
        (1..=self.n)
            .filter(|&j| self.is_populated(i, j))
            .map(|j| self.at(i, j))
            .collect()
    }

    /// Observed rows (`i + j <= n + 1`), the inverse of [`Triangle::from_rows`].
    pub fn observed_rows(&self) -> Result<Vec<Vec<T>>> {
        (1..=self.n)
            .map(|i| (1..=self.n + 1 - i).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(T) -> U) -> Triangle<U> {
        Triangle {
            n: self.n,
            cells: self.cells.iter().map(|&v| f(v)).collect(),
            mask: self.mask.clone(),
        }
    }
}

/// Exposure per accident year, all strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureVector<T>(Vec<T>);

impl<T: Scalar> ExposureVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        for (k, &v) in values.iter().enumerate() {
            // `v == v` rejects NaN for float scalars.
            #[allow(clippy::eq_op)]
            if !(v > T::zero() && v == v) {
                return Err(Error::NonPositiveExposure {
                    i: k + 1,
                    value: format!("{v:?}"),
                });
            }
        }
        Ok(Self(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exposure of accident year `i` (1-based).
    #[inline]
    pub fn get(&self, i: usize) -> T {
        self.0[i - 1]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// `C(i,1) = N(i,1)` and `C(i,j+1) = C(i,j) + N(i,j+1) - D(i,j+1)`.
///
/// Fails on a size mismatch, a nonzero `D(i,1)`, or a negative cumulative cell.
pub fn build_cumulative<T: Scalar>(
    n_tri: &Triangle<T>,
    d_tri: &Triangle<T>,
) -> Result<Triangle<T>> {
    let n = n_tri.n();
    if d_tri.n() != n {
        return Err(Error::SizeMismatch(format!(
            "N is {n}x{n} but D is {m}x{m}",
            m = d_tri.n()
        )));
    }
    for i in 1..=n {
        if n_tri.is_populated(i, 1) {
            let d1 = d_tri.get(i, 1)?;
            if d1 != T::zero() {
                return Err(Error::NonZeroFirstDevelopment {
                    i,
                    value: format!("{d1:?}"),
                });
            }
        }
    }
    let mut c = Triangle::empty(n);
    for i in 1..=n {
        if !n_tri.is_populated(i, 1) {
            continue;
        }
        let mut acc = n_tri.get(i, 1)?;
        check_nonnegative(i, 1, acc)?;
        c.put(i, 1, acc);
        for j in 2..=n {
            if !n_tri.is_populated(i, j) {
                break;
            }
            acc = acc + n_tri.get(i, j)? - d_tri.get(i, j)?;
            check_nonnegative(i, j, acc)?;
            c.put(i, j, acc);
        }
    }
    Ok(c)
}

fn check_nonnegative<T: Scalar>(i: usize, j: usize, v: T) -> Result<()> {
    if v < T::zero() {
        return Err(Error::NegativeCumulative {
            i,
            j,
            value: format!("{v:?}"),
        });
    }
    Ok(())
}

/// Inverse of [`build_cumulative`]: `D(i,j+1) = C(i,j) + N(i,j+1) - C(i,j+1)`, `D(i,1) = 0`.
pub fn decompose_cumulative<T: Scalar>(
    c_tri: &Triangle<T>,
    n_tri: &Triangle<T>,
) -> Result<Triangle<T>> {
    let n = c_tri.n();
    if n_tri.n() != n {
        return Err(Error::SizeMismatch(format!(
            "C is {n}x{n} but N is {m}x{m}",
            m = n_tri.n()
        )));
    }
    let mut d = Triangle::empty(n);
    for i in 1..=n {
        if !c_tri.is_populated(i, 1) {
            continue;
        }
        d.put(i, 1, T::zero());
        for j in 2..=n {
            if !c_tri.is_populated(i, j) {
                break;
            }
            let v = c_tri.get(i, j - 1)? + n_tri.get(i, j)? - c_tri.get(i, j)?;
            d.put(i, j, v);
        }
    }
    Ok(d)
}

/// Observed N and D triangles, the derived C triangle and exposures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimsData<T> {
    n_tri: Triangle<T>,
    d_tri: Triangle<T>,
    c_tri: Triangle<T>,
    exposure: ExposureVector<T>,
}

impl<T: Scalar> ClaimsData<T> {
    pub fn new(
        n_tri: Triangle<T>,
        d_tri: Triangle<T>,
        exposure: ExposureVector<T>,
    ) -> Result<Self> {
        let n = n_tri.n();
        if exposure.len() != n {
            return Err(Error::SizeMismatch(format!(
                "{} exposures for an {n}x{n} triangle",
                exposure.len()
            )));
        }
        for (name, tri) in [("N", &n_tri), ("D", &d_tri)] {
            if !tri.is_observed_shape() {
                return Err(Error::SizeMismatch(format!(
                    "{name} must populate exactly the cells with i + j <= n + 1"
                )));
            }
        }
        let c_tri = build_cumulative(&n_tri, &d_tri)?;
        Ok(Self {
            n_tri,
            d_tri,
            c_tri,
            exposure,
        })
    }

    /// Number of accident (= development) years.
    pub fn size(&self) -> usize {
        self.n_tri.n()
    }

    pub fn new_claims(&self) -> &Triangle<T> {
        &self.n_tri
    }

    pub fn development(&self) -> &Triangle<T> {
        &self.d_tri
    }

    pub fn cumulative(&self) -> &Triangle<T> {
        &self.c_tri
    }

    pub fn exposure(&self) -> &ExposureVector<T> {
        &self.exposure
    }
}

impl ClaimsData<f64> {
    /// The 7x7 motor third-party liability excess-of-loss dataset.
    pub fn schnieper() -> Self {
        embedded_schnieper_dataset()
    }
}

/// The 7x7 motor third-party liability excess-of-loss dataset with its exposures.
pub fn embedded_schnieper_dataset() -> ClaimsData<f64> {
    let n_rows = vec![
        vec![7.5, 18.3, 28.5, 23.4, 18.6, 0.7, 5.1],
        vec![1.6, 12.6, 18.2, 16.1, 14.0, 10.6],
        vec![13.8, 22.7, 4.0, 12.4, 12.1],
        vec![2.9, 9.7, 16.4, 11.6],
        vec![2.9, 6.9, 37.1],
        vec![1.9, 27.5],
        vec![19.1],
    ];
    let d_rows = vec![
        vec![0.0, -3.1, 4.8, -8.5, 23.0, 3.9, 2.5],
        vec![0.0, -0.6, 0.9, 8.6, -1.4, 5.6],
        vec![0.0, -5.9, 10.1, -4.6, -31.1],
        vec![0.0, -1.4, -2.1, -2.8],
        vec![0.0, 0.0, -5.8],
        vec![0.0, 0.0],
        vec![0.0],
    ];
    let exposure = vec![
        10224.0, 12752.0, 14875.0, 17365.0, 19410.0, 17617.0, 18129.0,
    ];
    ClaimsData::new(
        Triangle::from_rows(n_rows).expect("embedded N is well formed"),
        Triangle::from_rows(d_rows).expect("embedded D is well formed"),
        ExposureVector::new(exposure).expect("embedded exposures are positive"),
    )
    .expect("embedded dataset is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2_c() -> Vec<Vec<f64>> {
        vec![
            vec![7.5, 28.9, 52.6, 84.5, 80.1, 76.9, 79.5],
            vec![1.6, 14.8, 32.1, 39.6, 55.0, 60.0],
            vec![13.8, 42.4, 36.3, 53.3, 96.5],
            vec![2.9, 14.0, 32.5, 46.9],
            vec![2.9, 9.8, 52.7],
            vec![1.9, 29.4],
            vec![19.1],
        ]
    }

    #[test]
    fn cumulative_cells_from_tables() {
        let data = embedded_schnieper_dataset();
        let c = data.cumulative();
        assert!((c.at(1, 2) - 28.9).abs() < 1e-12);
        assert!((c.at(3, 3) - 36.3).abs() < 1e-12);
        assert_eq!(c.at(7, 1), 19.1);
        assert_eq!(data.new_claims().at(7, 1), 19.1);
        assert_eq!(data.exposure().get(1), 10224.0);
        assert_eq!(data.development().at(3, 5), -31.1);
    }

    #[test]
    fn embedded_c_matches_printed_table() {
        let c = embedded_schnieper_dataset().cumulative().clone();
        for (r, row) in table2_c().iter().enumerate() {
            for (k, &v) in row.iter().enumerate() {
                let got = (c.at(r + 1, k + 1) * 10.0).round() / 10.0;
                assert_eq!(got, v, "C({}, {})", r + 1, k + 1);
            }
        }
    }

    #[test]
    fn zero_triangles_give_zero_cumulative() {
        let z = Triangle::observed_from_fn(4, |_, _| 0.0_f64);
        let c = build_cumulative(&z, &z).unwrap();
        assert!(c
            .observed_rows()
            .unwrap()
            .iter()
            .flatten()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn decompose_recovers_table1_d() {
        let data = embedded_schnieper_dataset();
        let c_printed = Triangle::from_rows(table2_c()).unwrap();
        let d = decompose_cumulative(&c_printed, data.new_claims()).unwrap();
        for i in 1..=7 {
            for j in 1..=8 - i {
                let diff = d.at(i, j) - data.development().at(i, j);
                assert!(diff.abs() < 1e-9, "D({i}, {j})");
            }
        }
    }

    #[test]
    fn decompose_without_development_is_zero() {
        let n = Triangle::observed_from_fn(5, |i, j| (i * 3 + j) as f64);
        let zero = Triangle::observed_from_fn(5, |_, _| 0.0);
        let c = build_cumulative(&n, &zero).unwrap();
        let d = decompose_cumulative(&c, &n).unwrap();
        assert_eq!(d, zero);
    }

    #[test]
    fn unpopulated_access_is_an_error() {
        let data = embedded_schnieper_dataset();
        assert_eq!(
            data.cumulative().get(7, 2),
            Err(Error::Unpopulated { i: 7, j: 2 })
        );
        assert!(matches!(
            data.cumulative().get(0, 1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            data.cumulative().get(8, 1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        let n = Triangle::observed_from_fn(3, |_, _| 1.0);
        let d4 = Triangle::observed_from_fn(4, |_, _| 0.0);
        assert!(matches!(
            build_cumulative(&n, &d4),
            Err(Error::SizeMismatch(_))
        ));

        let d = Triangle::observed_from_fn(3, |i, j| if i == 2 && j == 1 { 0.5 } else { 0.0 });
        assert!(matches!(
            build_cumulative(&n, &d),
            Err(Error::NonZeroFirstDevelopment { i: 2, .. })
        ));

        let d = Triangle::observed_from_fn(3, |i, j| if i == 1 && j == 2 { 5.0 } else { 0.0 });
        assert_eq!(
            build_cumulative(&n, &d).unwrap_err(),
            Error::NegativeCumulative {
                i: 1,
                j: 2,
                value: "-3.0".into()
            }
        );

        assert!(ExposureVector::new(vec![1.0, 0.0]).is_err());
        assert!(ExposureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Triangle::<f64>::from_rows(vec![vec![1.0, 2.0], vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn latest_diagonal() {
        let data = embedded_schnieper_dataset();
        let c = data.cumulative();
        assert!((c.latest(4).unwrap() - 46.9).abs() < 1e-12);
        assert!((c.latest(1).unwrap() - 79.5).abs() < 1e-12);
    }
}
