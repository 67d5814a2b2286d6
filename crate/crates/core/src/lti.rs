//! Polynomials and real-rational transfer functions in the unit-delay
//! operator `z^{-1}`.
//!
//! A [`TransferFunction`] is stored as a numerator/denominator pair of
//! [`PolynomialInDelay`] values with a monic denominator (constant term 1),
//! so every value is proper and has a formal power series in `z^{-1}`.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of uniformly spaced frequencies used to reject denominators with
/// zeros on the unit circle.
pub const UNIT_CIRCLE_GRID: usize = 512;
/// Minimum admissible denominator magnitude on [`UNIT_CIRCLE_GRID`].
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;
/// Pole moduli at or above `1 - STABILITY_TOL` count as unstable.
pub const STABILITY_TOL: f64 = 1e-9;

/// `c_0 + c_1 z^{-1} + ... + c_m z^{-m}`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct PolynomialInDelay {
    coeffs: Vec<f64>,
}

impl PolynomialInDelay {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient of `z^{-k}` (zero past the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Value at `z = e^{i omega}`, i.e. `sum_k c_k e^{-i omega k}`.
    pub fn eval(&self, omega: f64) -> Complex<f64> {
        // Horner in w = e^{-i omega}.
        let w = Complex::from_polar(1.0, -omega);
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (a, &x) in self.coeffs.iter().enumerate() {
            for (b, &y) in other.coeffs.iter().enumerate() {
                out[a + b] += x * y;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect::<Vec<_>>())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect::<Vec<_>>())
    }

    /// Roots in `z` of `c_0 z^m + c_1 z^{m-1} + ... + c_m`.
    ///
    /// A vanishing leading coefficient `c_0` means a root at infinity; those
    /// are dropped and only the finite roots are returned.
    pub fn roots(&self) -> Vec<Complex<f64>> {
        let first = self.coeffs.iter().position(|&c| c != 0.0);
        let Some(first) = first else {
            return Vec::new();
        };
        let c = &self.coeffs[first..];
        let m = c.len() - 1;
        if m == 0 {
            return Vec::new();
        }
        let mut companion = DMatrix::<f64>::zeros(m, m);
        for k in 0..m {
            companion[(0, k)] = -c[k + 1] / c[0];
        }
        for k in 1..m {
            companion[(k, k - 1)] = 1.0;
        }
        companion.complex_eigenvalues().iter().copied().collect()
    }
}

impl From<Vec<f64>> for PolynomialInDelay {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<PolynomialInDelay> for Vec<f64> {
    fn from(p: PolynomialInDelay) -> Self {
        p.coeffs
    }
}

/// Proper real-rational transfer function `num(z^{-1}) / den(z^{-1})` with
/// `den` monic in `z^0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransferFunctionJson", into = "TransferFunctionJson")]
pub struct TransferFunction {
    num: PolynomialInDelay,
    den: PolynomialInDelay,
}

#[derive(Serialize, Deserialize)]
struct TransferFunctionJson {
    num: Vec<f64>,
    #[serde(default = "one")]
    den: Vec<f64>,
}

fn one() -> Vec<f64> {
    vec![1.0]
}

impl TryFrom<TransferFunctionJson> for TransferFunction {
    type Error = Error;
    fn try_from(j: TransferFunctionJson) -> Result<Self> {
        TransferFunction::new(j.num, j.den)
    }
}

impl From<TransferFunction> for TransferFunctionJson {
    fn from(tf: TransferFunction) -> Self {
        Self { num: tf.num.into(), den: tf.den.into() }
    }
}

impl TransferFunction {
    /// Builds and validates `num / den`.
    ///
    /// The denominator must have constant term exactly 1 and no zero on the
    /// unit circle (checked on a [`UNIT_CIRCLE_GRID`]-point grid).
    pub fn new(num: impl Into<Vec<f64>>, den: impl Into<Vec<f64>>) -> Result<Self> {
        let num = PolynomialInDelay::new(num);
        let den = PolynomialInDelay::new(den);
        if num.coeffs.iter().chain(den.coeffs.iter()).any(|c| !c.is_finite()) {
            return Err(Error::InvalidTransferFunction("non-finite coefficient".into()));
        }
        if den.coeff(0) != 1.0 {
            return Err(Error::InvalidTransferFunction(format!(
                "denominator constant term must be 1, got {}",
                den.coeff(0)
            )));
        }
        let min_mag = (0..UNIT_CIRCLE_GRID)
            .map(|k| den.eval(-PI + 2.0 * PI * k as f64 / UNIT_CIRCLE_GRID as f64).norm())
            .fold(f64::INFINITY, f64::min);
        if min_mag < UNIT_CIRCLE_TOL {
            return Err(Error::InvalidTransferFunction(format!(
                "denominator vanishes on the unit circle (min |den| = {min_mag:e})"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self { num: PolynomialInDelay::zero(), den: PolynomialInDelay::constant(1.0) }
    }

    pub fn gain(g: f64) -> Self {
        Self { num: PolynomialInDelay::constant(g), den: PolynomialInDelay::constant(1.0) }
    }

    /// FIR filter `c_0 + c_1 z^{-1} + ...`.
    pub fn fir(coeffs: impl Into<Vec<f64>>) -> Self {
        Self { num: PolynomialInDelay::new(coeffs), den: PolynomialInDelay::constant(1.0) }
    }

    /// `g z^{-1}`.
    pub fn delay(g: f64) -> Self {
        Self::fir(vec![0.0, g])
    }

    pub fn numerator(&self) -> &PolynomialInDelay {
        &self.num
    }

    pub fn denominator(&self) -> &PolynomialInDelay {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Value at `z = e^{i omega}`.
    pub fn evaluate(&self, omega: f64) -> Result<Complex<f64>> {
        let d = self.den.eval(omega);
        if d.norm() < UNIT_CIRCLE_TOL {
            return Err(Error::Singular { omega });
        }
        Ok(self.num.eval(omega) / d)
    }

    /// True iff the lag-0 impulse response coefficient is zero.
    pub fn is_strictly_causal(&self) -> bool {
        self.num.coeff(0) == 0.0
    }

    /// Lag-0 impulse response (the direct feedthrough term).
    pub fn feedthrough_gain(&self) -> f64 {
        self.num.coeff(0)
    }

    /// First `nlags` coefficients of the power series in `z^{-1}`.
    pub fn impulse_response(&self, nlags: usize) -> Vec<f64> {
        if !self.is_stable() {
            log::warn!("impulse response of an unstable transfer function (max |pole| = {:.6})", self.max_pole_modulus());
        }
        let a = self.den.coeffs();
        let mut h = vec![0.0; nlags];
        for k in 0..nlags {
            let mut v = self.num.coeff(k);
            for (m, &am) in a.iter().enumerate().skip(1).take(k) {
                v -= am * h[k - m];
            }
            h[k] = v;
        }
        h
    }

    pub fn poles(&self) -> Vec<Complex<f64>> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<Complex<f64>> {
        self.num.roots()
    }

    /// Largest pole modulus (0 for FIR filters).
    pub fn max_pole_modulus(&self) -> f64 {
        self.poles().iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn is_stable(&self) -> bool {
        self.max_pole_modulus() < 1.0 - STABILITY_TOL
    }

    /// Numerator and denominator have the same degree in `z` and `c_0 != 0`,
    /// so the inverse is proper as well.
    pub fn is_biproper(&self) -> bool {
        self.num.coeff(0) != 0.0
    }

    /// All finite zeros strictly inside the unit circle.
    pub fn is_minimum_phase(&self) -> bool {
        self.is_biproper() && self.zeros().iter().all(|z| z.norm() < 1.0 - STABILITY_TOL)
    }

    /// `num / den - feedthrough_gain`, expressed over the same denominator.
    pub fn strictly_causal_part(&self) -> TransferFunction {
        let d0 = self.feedthrough_gain();
        Self { num: self.num.sub(&self.den.scale(d0)), den: self.den.clone() }
    }

    pub fn has_delayed_component(&self) -> bool {
        self.strictly_causal_part().num.coeffs().iter().any(|c| c.abs() > 1e-14)
    }

    /// Product of two transfer functions (no pole/zero cancellation).
    pub fn mul(&self, other: &TransferFunction) -> TransferFunction {
        Self { num: self.num.mul(&other.num), den: self.den.mul(&other.den) }
    }

    /// `self - other` over the product denominator.
    pub fn sub(&self, other: &TransferFunction) -> TransferFunction {
        if self.den == other.den {
            return Self { num: self.num.sub(&other.num), den: self.den.clone() };
        }
        Self { num: self.num.mul(&other.den).sub(&other.num.mul(&self.den)), den: self.den.mul(&other.den) }
    }

    /// `1 / self`; requires a biproper value.
    pub fn inverse(&self) -> Result<TransferFunction> {
        let c0 = self.num.coeff(0);
        if c0 == 0.0 {
            return Err(Error::InvalidTransferFunction("inverse of a strictly causal transfer function is improper".into()));
        }
        TransferFunction::new(self.den.scale(1.0 / c0).coeffs().to_vec(), self.num.scale(1.0 / c0).coeffs().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn evaluate_trivial_cases() {
        let c = TransferFunction::gain(1.0);
        assert!(close(c.evaluate(0.7).unwrap(), Complex::new(1.0, 0.0)));
        let d = TransferFunction::delay(1.0);
        assert!(close(d.evaluate(0.0).unwrap(), Complex::new(1.0, 0.0)));
        assert!(close(d.evaluate(PI).unwrap(), Complex::new(-1.0, 0.0)));
    }

    #[test]
    fn causality_predicates() {
        assert!(TransferFunction::fir(vec![0.0, 0.4]).is_strictly_causal());
        assert!(!TransferFunction::fir(vec![0.3, 0.4]).is_strictly_causal());
        assert!(TransferFunction::zero().is_strictly_causal());
    }

    #[test]
    fn feedthrough_gains() {
        assert_eq!(TransferFunction::fir(vec![0.3, 0.4]).feedthrough_gain(), 0.3);
        assert_eq!(TransferFunction::delay(1.0).feedthrough_gain(), 0.0);
        let tf = TransferFunction::new(vec![0.2], vec![1.0, -0.5]).unwrap();
        assert_eq!(tf.feedthrough_gain(), 0.2);
    }

    #[test]
    fn impulse_responses() {
        let geo = TransferFunction::new(vec![1.0], vec![1.0, -0.5]).unwrap();
        assert_eq!(geo.impulse_response(4), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(TransferFunction::fir(vec![0.3, 0.4]).impulse_response(3), vec![0.3, 0.4, 0.0]);
        assert_eq!(TransferFunction::zero().impulse_response(2), vec![0.0, 0.0]);
    }

    #[test]
    fn canonical_zero_polynomial() {
        let p = PolynomialInDelay::new(vec![0.0, 0.0, 0.0]);
        assert_eq!(p.coeffs(), &[0.0]);
        assert_eq!(p.degree(), 0);
        assert_eq!(PolynomialInDelay::new(Vec::<f64>::new()).coeffs(), &[0.0]);
        assert_eq!(PolynomialInDelay::new(vec![1.0, 2.0, 0.0]).degree(), 1);
    }

    #[test]
    fn rejects_bad_denominators() {
        assert!(TransferFunction::new(vec![1.0], vec![2.0, 1.0]).is_err());
        // 1 - z^{-1} vanishes at omega = 0
        assert!(TransferFunction::new(vec![1.0], vec![1.0, -1.0]).is_err());
        // 1 + z^{-2} vanishes at +-pi/2, which lies on the 512-point grid
        assert!(TransferFunction::new(vec![1.0], vec![1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn poles_and_phase() {
        let tf = TransferFunction::new(vec![1.0, -0.5], vec![1.0, -0.9]).unwrap();
        assert!((tf.max_pole_modulus() - 0.9).abs() < 1e-12);
        assert!(tf.is_stable());
        assert!(tf.is_minimum_phase());
        let nmp = TransferFunction::fir(vec![1.0, -2.0]);
        assert!(!nmp.is_minimum_phase());
        assert!(!TransferFunction::new(vec![1.0], vec![1.0, -1.5]).unwrap().is_stable());
    }

    #[test]
    fn strictly_causal_part_and_inverse() {
        let tf = TransferFunction::new(vec![0.2], vec![1.0, -0.5]).unwrap();
        let sc = tf.strictly_causal_part();
        let h = tf.impulse_response(5);
        let hs = sc.impulse_response(5);
        assert_eq!(hs[0], 0.0);
        for k in 1..5 {
            assert!((h[k] - hs[k]).abs() < 1e-15);
        }
        assert!(tf.has_delayed_component());
        assert!(!TransferFunction::gain(0.4).has_delayed_component());
        let inv = tf.inverse().unwrap();
        let prod = tf.mul(&inv);
        assert!(close(prod.evaluate(0.3).unwrap(), Complex::new(1.0, 0.0)));
        assert!(!prod.has_delayed_component());
    }
}
