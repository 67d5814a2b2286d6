use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::LdimModel;
use crate::error::Result;

const MIN_BURN_IN: usize = 500;
const BURN_IN_TIME_CONSTANTS: f64 = 20.0;

/// `max(500, 20 tau)` with `tau = -1 / ln(rho)` for spectral radius `rho`.
pub fn burn_in_length(spectral_radius: f64) -> usize {
    if spectral_radius <= 0.0 {
        return MIN_BURN_IN;
    }
    let tau = -1.0 / spectral_radius.ln();
    MIN_BURN_IN.max((BURN_IN_TIME_CONSTANTS * tau).ceil() as usize)
}

/// Stationary Gaussian sample path as an `n x horizon` array.
pub fn simulate(m: &LdimModel, horizon: usize, seed: u64) -> Result<DMatrix<f64>> {
    let ss = m.to_state_space()?;
    let n = m.n();
    let burn = burn_in_length(ss.spectral_radius());
    let std: Vec<f64> = m.noise_variances().iter().map(|v| v.sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut x = DVector::zeros(ss.state_dim());
    let mut u = DVector::zeros(n);
    let mut out = DMatrix::zeros(n, horizon);
    for t in 0..burn + horizon {
        for j in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            u[j] = std[j] * z;
        }
        if t >= burn {
            let y = &ss.c * &x + &ss.d * &u;
            out.set_column(t - burn, &y);
        }
        x = &ss.a * &x + &ss.b * &u;
    }
    Ok(out)
}
