//! Linear dynamic influence models `y = H(z) y + F(z) u`.
//!
//! `H` is an `n x n` matrix of transfer functions (absent entries are zero),
//! `F` is diagonal and `u` is white Gaussian noise with independent entries.

mod covariance;
mod simulate;
mod state_space;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DiGraph, MultiArrowGraph, MAX_VERTICES};
use crate::lti::TransferFunction;

pub use covariance::{empirical_autocovariance, AutocovarianceSequence, CovarianceSource};
pub use simulate::{burn_in_length, simulate};
pub use state_space::StateSpaceRealization;

/// Frequencies used when checking that the noise spectrum stays positive.
const NOISE_PSD_GRID: usize = 256;

/// Coefficients below this magnitude count as zero when deciding whether a
/// filter has a strictly causal component.
const DELAYED_COMPONENT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct LdimModel {
    n: usize,
    /// Row-major, `dynamics[to * n + from] = H_{to,from}`.
    dynamics: Vec<TransferFunction>,
    noise_shaping: Vec<TransferFunction>,
    noise_variances: Vec<f64>,
}

/// Outcome of [`LdimModel::validate`]; empty `failures` means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failures.is_empty() {
            return write!(f, "all checks passed");
        }
        for (k, msg) in self.failures.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {msg}")?;
        }
        Ok(())
    }
}

impl LdimModel {
    /// Builds a model from `(from, to, H_{to,from})` entries and validates it.
    pub fn new(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, TransferFunction)>,
        noise_shaping: Vec<TransferFunction>,
        noise_variances: Vec<f64>,
    ) -> Result<Self> {
        let m = Self::from_parts(n, entries, noise_shaping, noise_variances)?;
        let report = m.validate();
        if !report.passed() {
            return Err(Error::Validation(report));
        }
        Ok(m)
    }

    /// Unit noise shaping and unit variances.
    pub fn with_white_noise(n: usize, entries: impl IntoIterator<Item = (usize, usize, TransferFunction)>) -> Result<Self> {
        Self::new(n, entries, vec![TransferFunction::gain(1.0); n], vec![1.0; n])
    }

    /// Structural checks only (dimensions, indices, duplicates); see
    /// [`validate`](Self::validate) for the model assumptions.
    pub fn from_parts(
        n: usize,
        entries: impl IntoIterator<Item = (usize, usize, TransferFunction)>,
        noise_shaping: Vec<TransferFunction>,
        noise_variances: Vec<f64>,
    ) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::Structural(format!("{n} processes exceeds the supported maximum of {MAX_VERTICES}")));
        }
        if noise_shaping.len() != n || noise_variances.len() != n {
            return Err(Error::Structural(format!(
                "expected {n} noise filters and variances, got {} and {}",
                noise_shaping.len(),
                noise_variances.len()
            )));
        }
        let mut dynamics = vec![TransferFunction::zero(); n * n];
        let mut seen = vec![false; n * n];
        for (from, to, tf) in entries {
            if from >= n || to >= n {
                return Err(Error::Structural(format!("entry H_{{{},{}}} out of range", to + 1, from + 1)));
            }
            if std::mem::replace(&mut seen[to * n + from], true) {
                return Err(Error::Structural(format!("duplicate entry H_{{{},{}}}", to + 1, from + 1)));
            }
            dynamics[to * n + from] = tf;
        }
        Ok(Self { n, dynamics, noise_shaping, noise_variances })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `H_{to,from}`.
    pub fn h(&self, to: usize, from: usize) -> &TransferFunction {
        &self.dynamics[to * self.n + from]
    }

    pub fn f(&self, j: usize) -> &TransferFunction {
        &self.noise_shaping[j]
    }

    pub fn noise_variances(&self) -> &[f64] {
        &self.noise_variances
    }

    /// Nonzero entries as `(from, to, H_{to,from})`, ordered by `(to, from)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &TransferFunction)> {
        let n = self.n;
        self.dynamics.iter().enumerate().filter(|(_, tf)| !tf.is_zero()).map(move |(k, tf)| (k % n, k / n, tf))
    }

    /// Checks every model assumption and lists each failure.
    pub fn validate(&self) -> ValidationReport {
        let n = self.n;
        let mut failures = Vec::new();
        for j in 0..n {
            let g = self.h(j, j).feedthrough_gain();
            if g != 0.0 {
                failures.push(format!("H_{{{0},{0}}} has feedthrough gain {g} (algebraic self-loop)", j + 1));
            }
        }
        let feed = DiGraph::new(
            n,
            self.entries().filter(|&(from, to, tf)| from != to && tf.feedthrough_gain() != 0.0).map(|(f, t, _)| (f, t)),
        );
        if !feed.is_acyclic() {
            failures.push("feedthrough gains form a directed cycle (algebraic loop)".into());
        }
        for j in 0..n {
            let fj = &self.noise_shaping[j];
            if !fj.is_biproper() {
                failures.push(format!("F_{} is not biproper", j + 1));
            } else if !fj.is_minimum_phase() {
                failures.push(format!("F_{} is not minimum phase", j + 1));
            }
            let var = self.noise_variances[j];
            if !(var > 0.0 && var.is_finite()) {
                failures.push(format!("noise variance of u_{} must be positive, got {var}", j + 1));
                continue;
            }
            let min_psd = (0..NOISE_PSD_GRID)
                .map(|k| {
                    let w = -PI + 2.0 * PI * k as f64 / NOISE_PSD_GRID as f64;
                    fj.evaluate(w).map(|v| v.norm_sqr() * var).unwrap_or(0.0)
                })
                .fold(f64::INFINITY, f64::min);
            if !(min_psd > 0.0) {
                failures.push(format!("noise spectrum of e_{} is not positive on the unit circle", j + 1));
            }
        }
        ValidationReport { failures }
    }

    /// `E1` holds pairs whose entry has a nonzero feedthrough gain, `E2`
    /// the remaining nonzero (strictly causal) entries. Self-loops are not
    /// graph edges.
    pub fn perfect_representation(&self) -> MultiArrowGraph {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        for (from, to, tf) in self.entries() {
            if from == to {
                continue;
            }
            if tf.feedthrough_gain() != 0.0 {
                e1.push((from, to));
            } else {
                e2.push((from, to));
            }
        }
        MultiArrowGraph::new(self.n, e1, e2).expect("entries of a model are in range and disjoint")
    }

    /// Processes whose innovation `u_c(t)` depends on the past of `y_i`,
    /// i.e. `F_c^{-1} (delta_{ci} - H_{ci})` has a strictly causal part.
    ///
    /// For pure-gain feedthrough entries and white noise these are exactly
    /// the double-headed children of `i`; mixed entries such as
    /// `a + b z^{-1}` and coloured noise add further children, possibly `i`.
    pub fn lagged_influences(&self, i: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&c| {
                let delta = TransferFunction::gain(if c == i { 1.0 } else { 0.0 });
                let g = delta.sub(self.h(c, i));
                let Ok(finv) = self.noise_shaping[c].inverse() else {
                    return true;
                };
                let w = finv.mul(&g).strictly_causal_part();
                w.numerator().coeffs().iter().any(|x| x.abs() > DELAYED_COMPONENT_TOL)
            })
            .collect()
    }

    /// Realization driven by `u` whose output has the same second-order
    /// statistics as `y`.
    pub fn to_state_space(&self) -> Result<StateSpaceRealization> {
        StateSpaceRealization::from_model(self)
    }

    /// Exact autocovariances `R(0..=max_lag)`.
    pub fn population_autocovariance(&self, max_lag: usize) -> Result<AutocovarianceSequence> {
        self.to_state_space()?.autocovariance(max_lag)
    }

    /// `(I - H)^{-1} F Sigma F^* (I - H)^{-*}` at `z = e^{i omega}`.
    pub fn psd(&self, omega: f64) -> Result<nalgebra::DMatrix<nalgebra::Complex<f64>>> {
        use nalgebra::{Complex, DMatrix};
        let n = self.n;
        let mut ih = DMatrix::<Complex<f64>>::identity(n, n);
        for (from, to, tf) in self.entries() {
            ih[(to, from)] -= tf.evaluate(omega)?;
        }
        let t = ih.try_inverse().ok_or(Error::Singular { omega })?;
        let mut fs = DMatrix::<Complex<f64>>::zeros(n, n);
        for j in 0..n {
            fs[(j, j)] = self.noise_shaping[j].evaluate(omega)?;
        }
        let g = t * fs;
        let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.noise_variances.iter().map(|&v| Complex::new(v, 0.0)),
        ));
        Ok(&g * sigma * g.adjoint())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    #[serde(rename = "H", default)]
    h: Vec<EntryJson>,
    #[serde(rename = "F", default)]
    f: Option<Vec<TransferFunction>>,
    #[serde(default)]
    sigma_u: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    from: usize,
    to: usize,
    #[serde(flatten)]
    tf: TransferFunction,
}

impl Serialize for LdimModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelJson {
            n: self.n,
            h: self.entries().map(|(from, to, tf)| EntryJson { from: from + 1, to: to + 1, tf: tf.clone() }).collect(),
            f: Some(self.noise_shaping.clone()),
            sigma_u: Some(self.noise_variances.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LdimModel {
    /// Missing `F` means unit filters and missing `sigma_u` unit variances.
    /// Only structural checks run here.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = ModelJson::deserialize(d)?;
        let n = j.n;
        let mut entries = Vec::with_capacity(j.h.len());
        for e in j.h {
            if e.from == 0 || e.to == 0 || e.from > n || e.to > n {
                return Err(D::Error::custom(format!("entry from {} to {} out of range 1..={n}", e.from, e.to)));
            }
            entries.push((e.from - 1, e.to - 1, e.tf));
        }
        let f = j.f.unwrap_or_else(|| vec![TransferFunction::gain(1.0); n]);
        let sigma = j.sigma_u.unwrap_or_else(|| vec![1.0; n]);
        LdimModel::from_parts(n, entries, f, sigma).map_err(D::Error::custom)
    }
}
