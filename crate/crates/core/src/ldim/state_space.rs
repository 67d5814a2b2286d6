use nalgebra::DMatrix;

use super::covariance::AutocovarianceSequence;
use super::LdimModel;
use crate::error::{Error, Result};
use crate::lti::TransferFunction;

/// Doubling steps allowed before the Lyapunov solve gives up.
const LYAPUNOV_MAX_DOUBLINGS: usize = 64;
const LYAPUNOV_TOL: f64 = 1e-15;

/// `x(t+1) = A x(t) + B u(t)`, `y(t) = C x(t) + D u(t)`, `Cov(u) = Q`.
#[derive(Clone, Debug)]
pub struct StateSpaceRealization {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

/// Controllable canonical form of the strictly causal part of `tf`:
/// returns `(A, C, D)` with a unit input vector `e_1`.
fn canonical_block(tf: &TransferFunction) -> (DMatrix<f64>, Vec<f64>, f64) {
    let num = tf.numerator();
    let den = tf.denominator();
    let d0 = num.coeff(0);
    let order = num.degree().max(den.degree());
    let mut a = DMatrix::zeros(order, order);
    for k in 0..order {
        a[(0, k)] = -den.coeff(k + 1);
    }
    for k in 1..order {
        a[(k, k - 1)] = 1.0;
    }
    let c = (0..order).map(|k| num.coeff(k + 1) - d0 * den.coeff(k + 1)).collect();
    (a, c, d0)
}

pub(crate) fn spectral_radius(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl StateSpaceRealization {
    /// Realizes every nonzero entry of `H` and `F`, stacks the blocks and
    /// closes the loop through `(I - D_H)^{-1}`.
    pub fn from_model(m: &LdimModel) -> Result<Self> {
        let n = m.n();
        // (block, input is y?, input index, output index)
        let mut blocks = Vec::new();
        for (from, to, tf) in m.entries() {
            blocks.push((canonical_block(tf), true, from, to));
        }
        for j in 0..n {
            blocks.push((canonical_block(m.f(j)), false, j, j));
        }
        let dim: usize = blocks.iter().map(|((a, _, _), ..)| a.nrows()).sum();

        let mut a_s = DMatrix::zeros(dim, dim);
        let mut b_y = DMatrix::zeros(dim, n);
        let mut b_u = DMatrix::zeros(dim, n);
        let mut c_s = DMatrix::zeros(n, dim);
        let mut d_h = DMatrix::zeros(n, n);
        let mut d_f = DMatrix::zeros(n, n);
        let mut off = 0;
        for ((a, c, d0), from_y, input, output) in &blocks {
            let q = a.nrows();
            a_s.view_mut((off, off), (q, q)).copy_from(a);
            if q > 0 {
                if *from_y {
                    b_y[(off, *input)] = 1.0;
                } else {
                    b_u[(off, *input)] = 1.0;
                }
            }
            for (k, &ck) in c.iter().enumerate() {
                c_s[(*output, off + k)] += ck;
            }
            if *from_y {
                d_h[(*output, *input)] += d0;
            } else {
                d_f[(*output, *input)] += d0;
            }
            off += q;
        }

        let closure = (DMatrix::identity(n, n) - d_h)
            .try_inverse()
            .ok_or_else(|| Error::Structural("I - D_H is singular (algebraic loop)".into()))?;
        let c = &closure * &c_s;
        let d = &closure * &d_f;
        let a = &a_s + &b_y * &c;
        let b = &b_u + &b_y * &d;
        let q = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(m.noise_variances()));

        let rho = spectral_radius(&a);
        if rho >= 1.0 - crate::lti::STABILITY_TOL {
            return Err(Error::Unstable { spectral_radius: rho });
        }
        Ok(Self { a, b, c, d, q })
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        spectral_radius(&self.a)
    }

    /// Stationary state covariance `P = A P A^T + B Q B^T` by Smith doubling.
    pub fn state_covariance(&self) -> Result<DMatrix<f64>> {
        let mut p = &self.b * &self.q * self.b.transpose();
        let mut ak = self.a.clone();
        for _ in 0..LYAPUNOV_MAX_DOUBLINGS {
            let inc = &ak * &p * ak.transpose();
            p += &inc;
            ak = &ak * &ak;
            if inc.amax() <= LYAPUNOV_TOL * p.amax().max(1.0) && ak.amax() < LYAPUNOV_TOL {
                return Ok(p);
            }
        }
        if self.state_dim() == 0 {
            return Ok(p);
        }
        Err(Error::Lyapunov { iterations: LYAPUNOV_MAX_DOUBLINGS })
    }

    /// `R(k) = E[y(t) y(t-k)^T]` for `k = 0..=max_lag`.
    pub fn autocovariance(&self, max_lag: usize) -> Result<AutocovarianceSequence> {
        let p = self.state_covariance()?;
        let dq = &self.d * &self.q;
        let r0 = &self.c * &p * self.c.transpose() + &dq * self.d.transpose();
        // R(k) = C A^{k-1} G with G = A P C^T + B Q D^T = E[x(t+1) y(t)^T]
        let g = &self.a * &p * self.c.transpose() + &self.b * dq.transpose();
        let mut lags = Vec::with_capacity(max_lag + 1);
        lags.push(symmetrize(r0));
        let mut cak = self.c.clone();
        for _ in 1..=max_lag {
            lags.push(&cak * &g);
            cak = &cak * &self.a;
        }
        Ok(AutocovarianceSequence::new(lags))
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}
