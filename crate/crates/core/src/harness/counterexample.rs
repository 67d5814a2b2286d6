//! Two structurally different models with identical spectra.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::builtins::{sec3_triangle, sec3_twin};
use crate::error::Result;
use crate::ldim::LdimModel;

pub const DEVIATION_TOL: f64 = 1e-10;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleDraw {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub max_deviation: f64,
    pub closed_form_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub grid: usize,
    pub draws: Vec<CounterexampleDraw>,
    pub max_deviation: f64,
    pub max_closed_form_error: f64,
    pub pass: bool,
}

/// `[[1, a, 0], [a, a^2+1, b], [0, b, b^2+1]]`.
pub fn closed_form(a: f64, b: f64) -> [[f64; 3]; 3] {
    [[1.0, a, 0.0], [a, a * a + 1.0, b], [0.0, b, b * b + 1.0]]
}

fn grid_points(grid: usize) -> impl Iterator<Item = f64> {
    (0..grid).map(move |k| -PI + 2.0 * PI * k as f64 / grid as f64)
}

/// Largest entrywise `|Phi_1 - Phi_2|` over the frequency grid.
pub fn psd_deviation(m1: &LdimModel, m2: &LdimModel, grid: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for w in grid_points(grid) {
        let d = m1.psd(w)? - m2.psd(w)?;
        worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

/// Draws `(a, b)` uniformly from `(low, high)^2`, sets `c = -a b` and
/// compares both spectra with each other and with the closed form.
pub fn verify_counterexample(grid: usize, draws: usize, seed: u64, low: f64, high: f64) -> Result<CounterexampleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        let a = rng.random_range(low..high);
        let b = rng.random_range(low..high);
        let c = -a * b;
        let m1 = sec3_triangle(a, b, c)?;
        let m2 = sec3_twin(a, b)?;
        let expect = closed_form(a, b);
        let mut closed_form_error: f64 = 0.0;
        for w in grid_points(grid) {
            let p = m1.psd(w)?;
            for r in 0..3 {
                for s in 0..3 {
                    closed_form_error = closed_form_error.max((p[(r, s)] - expect[r][s]).norm());
                }
            }
        }
        let max_deviation = psd_deviation(&m1, &m2, grid)?;
        out.push(CounterexampleDraw { a, b, c, max_deviation, closed_form_error });
    }
    let max_deviation = out.iter().map(|d| d.max_deviation).fold(0.0, f64::max);
    let max_closed_form_error = out.iter().map(|d| d.closed_form_error).fold(0.0, f64::max);
    Ok(CounterexampleReport {
        grid,
        draws: out,
        max_deviation,
        max_closed_form_error,
        pass: max_deviation < DEVIATION_TOL && max_closed_form_error < CLOSED_FORM_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectra_agree() {
        let r = verify_counterexample(64, 5, 3, 0.3, 0.9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.draws.len(), 5);
    }

    #[test]
    fn broken_cancellation_shows_up() {
        let (a, b) = (0.5, 0.6);
        let d = psd_deviation(&sec3_triangle(a, b, -a * b + 0.1).unwrap(), &sec3_twin(a, b).unwrap(), 32).unwrap();
        assert!(d > 1e-3);
    }

    #[test]
    fn unit_parameters() {
        let p = sec3_triangle(1.0, 1.0, -1.0).unwrap().psd(0.4).unwrap();
        let expect = closed_form(1.0, 1.0);
        assert_eq!(expect, [[1.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]]);
        for r in 0..3 {
            for s in 0..3 {
                assert!((p[(r, s)].re - expect[r][s]).abs() < 1e-12);
            }
        }
    }
}
