use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Second moments of a stationary vector process.
pub trait CovarianceSource: Sync {
    fn n(&self) -> usize;

    fn max_lag(&self) -> usize;

    /// `R(k) = E[y(t) y(t-k)^T]` for `0 <= k <= max_lag`.
    fn lag(&self, k: usize) -> &DMatrix<f64>;

    /// `E[y_a(t - la) y_b(t - lb)]` for any integer lags within range.
    fn cross(&self, a: usize, la: i64, b: usize, lb: i64) -> f64 {
        let d = lb - la;
        if d >= 0 {
            self.lag(d as usize)[(a, b)]
        } else {
            self.lag((-d) as usize)[(b, a)]
        }
    }

    fn require_lag(&self, k: usize) -> Result<()> {
        if k > self.max_lag() {
            return Err(Error::LagOutOfRange { requested: k, available: self.max_lag() });
        }
        Ok(())
    }
}

/// `R(0), ..., R(L)` held in memory.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocovarianceSequence {
    lags: Vec<DMatrix<f64>>,
}

impl AutocovarianceSequence {
    /// Panics when `lags` is empty or the matrices are not square and equal
    /// in size.
    pub fn new(lags: Vec<DMatrix<f64>>) -> Self {
        assert!(!lags.is_empty(), "need at least R(0)");
        let n = lags[0].nrows();
        assert!(lags.iter().all(|r| r.nrows() == n && r.ncols() == n), "lag matrices must be n x n");
        Self { lags }
    }

    /// Stacked block-Toeplitz matrix with block `(a, b) = E[y(t-a) y(t-b)^T]`
    /// for `a, b = 0..=depth`.
    pub fn block_toeplitz(&self, depth: usize) -> Result<DMatrix<f64>> {
        self.require_lag(depth)?;
        let n = self.n();
        let mut m = DMatrix::zeros(n * (depth + 1), n * (depth + 1));
        for a in 0..=depth {
            for b in 0..=depth {
                let block = if b >= a { self.lags[b - a].clone() } else { self.lags[a - b].transpose() };
                m.view_mut((a * n, b * n), (n, n)).copy_from(&block);
            }
        }
        Ok(m)
    }
}

impl CovarianceSource for AutocovarianceSequence {
    fn n(&self) -> usize {
        self.lags[0].nrows()
    }

    fn max_lag(&self) -> usize {
        self.lags.len() - 1
    }

    fn lag(&self, k: usize) -> &DMatrix<f64> {
        &self.lags[k]
    }
}

/// Biased estimator `R(k) = (1/T) sum_t y(t) y(t-k)^T` from an `n x T`
/// array, without demeaning.
pub fn empirical_autocovariance(data: &DMatrix<f64>, max_lag: usize) -> Result<AutocovarianceSequence> {
    let t = data.ncols();
    if t <= 10 * max_lag || t == 0 {
        return Err(Error::SeriesTooShort { len: t, max_lag });
    }
    let lags = (0..=max_lag)
        .map(|k| {
            let now = data.columns(k, t - k);
            let before = data.columns(0, t - k);
            (now * before.transpose()) / t as f64
        })
        .collect();
    Ok(AutocovarianceSequence::new(lags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_data_gives_zero_covariance() {
        let r = empirical_autocovariance(&DMatrix::zeros(2, 100), 3).unwrap();
        for k in 0..=3 {
            assert_eq!(r.lag(k).amax(), 0.0);
        }
    }

    #[test]
    fn short_series_is_rejected() {
        assert!(matches!(
            empirical_autocovariance(&DMatrix::zeros(2, 100), 10),
            Err(Error::SeriesTooShort { len: 100, max_lag: 10 })
        ));
    }

    #[test]
    fn cross_uses_transpose_for_negative_offsets() {
        let r1 = DMatrix::from_row_slice(2, 2, &[0.1, 0.2, 0.3, 0.4]);
        let s = AutocovarianceSequence::new(vec![DMatrix::identity(2, 2), r1]);
        // E[y_0(t) y_1(t-1)] = R(1)[0,1]
        assert_eq!(s.cross(0, 0, 1, 1), 0.2);
        // E[y_0(t-1) y_1(t)] = R(1)[1,0]
        assert_eq!(s.cross(0, 1, 1, 0), 0.3);
        assert!(s.require_lag(2).is_err());
    }

    proptest! {
        #[test]
        fn biased_estimator_gives_psd_toeplitz(values in proptest::collection::vec(-3.0f64..3.0, 2 * 60)) {
            let data = DMatrix::from_row_slice(2, 60, &values);
            let r = empirical_autocovariance(&data, 4).unwrap();
            let m = r.block_toeplitz(4).unwrap();
            let min = m.symmetric_eigenvalues().min();
            prop_assert!(min >= -1e-10 * m.amax().max(1.0), "min eigenvalue {}", min);
        }
    }
}
