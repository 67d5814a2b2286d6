//! Finite-lag least-squares projections standing in for causal and
//! non-causal Wiener filters, separation predicates and f-scores.
//!
//! Two routes compute the same numbers:
//! * [`project`] solves the normal equations for an explicit regressor list;
//!   it exposes coefficients and is used for audits.
//! * [`ConditionalCovariance`] conditions the present `y(t)` on the past once
//!   and then answers every `(j, i, S)` query with small Schur complements;
//!   the reconstruction search uses it.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::ldim::CovarianceSource;

/// Default lag depth of the truncated filters.
pub const DEFAULT_LAG_DEPTH: usize = 10;
/// Ridge added to a Gram matrix whose Cholesky factorization fails.
pub const RIDGE_EPSILON: f64 = 1e-10;
/// Default separation tolerance on population sources.
pub const POPULATION_TOL: f64 = 1e-6;

/// Which part of the candidate process is being tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateMode {
    /// `y_i(t)` is the candidate; its lags stay in the conditioning block.
    Contemporaneous,
    /// `y_i(t-1), ..., y_i(t-L)` are the candidate.
    DelayedOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegressorSpec {
    pub target: usize,
    pub candidate: usize,
    pub mode: CandidateMode,
    pub conditioning: VertexSet,
    pub lag_depth: usize,
    /// Condition on lags `1..=L` of every process.
    pub include_all_delayed: bool,
}

impl RegressorSpec {
    pub fn new(target: usize, candidate: usize, mode: CandidateMode, conditioning: VertexSet, lag_depth: usize) -> Self {
        Self { target, candidate, mode, conditioning, lag_depth, include_all_delayed: true }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        if self.target >= n || self.candidate >= n {
            return Err(Error::InvalidSpec(format!("vertex out of range for {n} processes")));
        }
        if self.target == self.candidate {
            return Err(Error::InvalidSpec("target and candidate coincide".into()));
        }
        if self.conditioning.contains(self.target) || self.conditioning.contains(self.candidate) {
            return Err(Error::InvalidSpec("conditioning set contains the target or the candidate".into()));
        }
        if self.conditioning.iter().any(|s| s >= n) {
            return Err(Error::InvalidSpec(format!("conditioning set out of range for {n} processes")));
        }
        if self.lag_depth == 0 {
            return Err(Error::InvalidSpec("lag depth must be at least 1".into()));
        }
        Ok(())
    }

    /// `(with candidate, without candidate)` regressor blocks.
    fn blocks(&self, n: usize, lags: &[i64]) -> (Vec<Regressor>, Vec<Regressor>) {
        let mut base: Vec<Regressor> = self.conditioning.iter().map(|s| Regressor::new(s, 0)).collect();
        let mut cand = Vec::new();
        match self.mode {
            CandidateMode::Contemporaneous => cand.push(Regressor::new(self.candidate, 0)),
            CandidateMode::DelayedOnly => cand.extend(lags.iter().map(|&l| Regressor::new(self.candidate, l))),
        }
        if self.include_all_delayed {
            for &l in lags {
                for p in 0..n {
                    if self.mode == CandidateMode::DelayedOnly && p == self.candidate {
                        continue;
                    }
                    if !(p == self.target && l == 0) {
                        base.push(Regressor::new(p, l));
                    }
                }
            }
        }
        let mut full = cand;
        full.extend(base.iter().copied());
        (full, base)
    }
}

/// The process `y_process(t - lag)`; negative lags look into the future.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Regressor {
    pub process: usize,
    pub lag: i64,
}

impl Regressor {
    pub fn new(process: usize, lag: i64) -> Self {
        Self { process, lag }
    }
}

/// Least-squares projection of `y_target(t)` onto a regressor list.
#[derive(Clone, Debug)]
pub struct Projection {
    pub regressors: Vec<Regressor>,
    pub coefficients: Vec<f64>,
    pub residual_variance: f64,
    /// Largest `|E[residual * regressor]|`.
    pub orthogonality_residual: f64,
    pub ridge_regularized: bool,
}

#[derive(Clone, Debug)]
pub struct FilterResult {
    pub coefficients: Vec<(Regressor, f64)>,
    pub residual_variance: f64,
    pub candidate_lag0_coeff: f64,
    pub candidate_delayed_coeffs: Vec<f64>,
    pub fscore: f64,
    pub ridge_regularized: bool,
}

/// Cholesky with a fixed ridge fallback; the flag reports the fallback.
fn factor(mut g: DMatrix<f64>) -> (Cholesky<f64, Dyn>, bool) {
    if let Some(ch) = g.clone().cholesky() {
        return (ch, false);
    }
    let scale = g.diagonal().amax().max(1.0);
    for k in 0..g.nrows() {
        g[(k, k)] += RIDGE_EPSILON * scale;
    }
    let mut eps = RIDGE_EPSILON * scale;
    loop {
        if let Some(ch) = g.clone().cholesky() {
            return (ch, true);
        }
        // only reachable for indefinite input, e.g. a corrupted source
        for k in 0..g.nrows() {
            g[(k, k)] += eps * 9.0;
        }
        eps *= 10.0;
    }
}

/// `1 - full / reduced`, clamped to `[0, 1]`; zero when nothing is left to
/// explain.
pub fn relative_reduction(full: f64, reduced: f64, scale: f64) -> f64 {
    if reduced <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
        return 0.0;
    }
    (1.0 - full / reduced).clamp(0.0, 1.0)
}

/// Projects `y_target(t)` onto `regressors`.
pub fn project_onto<S: CovarianceSource + ?Sized>(source: &S, target: usize, regressors: &[Regressor]) -> Result<Projection> {
    let max_lag = regressors
        .iter()
        .flat_map(|r| regressors.iter().map(move |s| (r.lag - s.lag).unsigned_abs()))
        .chain(regressors.iter().map(|r| r.lag.unsigned_abs()))
        .max()
        .unwrap_or(0);
    source.require_lag(max_lag as usize)?;
    let var = source.lag(0)[(target, target)];
    let m = regressors.len();
    if m == 0 {
        return Ok(Projection {
            regressors: Vec::new(),
            coefficients: Vec::new(),
            residual_variance: var,
            orthogonality_residual: 0.0,
            ridge_regularized: false,
        });
    }
    let gram = DMatrix::from_fn(m, m, |r, s| {
        let (a, b) = (regressors[r], regressors[s]);
        source.cross(a.process, a.lag, b.process, b.lag)
    });
    let cross = DVector::from_fn(m, |r, _| source.cross(regressors[r].process, regressors[r].lag, target, 0));
    let (ch, ridge) = factor(gram.clone());
    let beta = ch.solve(&cross);
    let orth = (&gram * &beta - &cross).amax();
    let residual_variance = (var - cross.dot(&beta)).max(0.0);
    Ok(Projection {
        regressors: regressors.to_vec(),
        coefficients: beta.iter().copied().collect(),
        residual_variance,
        orthogonality_residual: orth,
        ridge_regularized: ridge,
    })
}

fn filter_with_lags<S: CovarianceSource + ?Sized>(source: &S, spec: &RegressorSpec, lags: &[i64]) -> Result<FilterResult> {
    spec.check(source.n())?;
    let (full_block, reduced_block) = spec.blocks(source.n(), lags);
    let full = project_onto(source, spec.target, &full_block)?;
    let reduced = project_onto(source, spec.target, &reduced_block)?;
    let coef = |p: usize, l: i64| {
        full.regressors.iter().zip(&full.coefficients).find(|(r, _)| r.process == p && r.lag == l).map_or(0.0, |(_, &c)| c)
    };
    let candidate_lag0_coeff = match spec.mode {
        CandidateMode::Contemporaneous => coef(spec.candidate, 0),
        CandidateMode::DelayedOnly => 0.0,
    };
    let candidate_delayed_coeffs = (1..=spec.lag_depth as i64).map(|l| coef(spec.candidate, l)).collect();
    let scale = source.lag(0)[(spec.target, spec.target)];
    Ok(FilterResult {
        fscore: relative_reduction(full.residual_variance, reduced.residual_variance, scale),
        coefficients: full.regressors.iter().copied().zip(full.coefficients.iter().copied()).collect(),
        residual_variance: full.residual_variance,
        candidate_lag0_coeff,
        candidate_delayed_coeffs,
        ridge_regularized: full.ridge_regularized || reduced.ridge_regularized,
    })
}

/// Causal filter: contemporaneous candidate and `S`, plus lags `1..=L`.
pub fn project<S: CovarianceSource + ?Sized>(source: &S, spec: &RegressorSpec) -> Result<FilterResult> {
    let lags: Vec<i64> = (1..=spec.lag_depth as i64).collect();
    filter_with_lags(source, spec, &lags)
}

/// Non-causal counterpart of [`project`]: the lag window is `-L..=L`.
/// Requires lags up to `2L` from the source.
pub fn project_two_sided<S: CovarianceSource + ?Sized>(source: &S, spec: &RegressorSpec) -> Result<FilterResult> {
    let l = spec.lag_depth as i64;
    let lags: Vec<i64> = (-l..=l).filter(|&k| k != 0).collect();
    filter_with_lags(source, spec, &lags)
}

/// Separation of `y_j` from `y_i(t)` given `S` and all lags.
pub fn feedthrough_separated<S: CovarianceSource + ?Sized>(
    source: &S,
    j: usize,
    i: usize,
    s: VertexSet,
    lag_depth: usize,
    tol: f64,
) -> Result<(bool, FilterResult)> {
    let r = project(source, &RegressorSpec::new(j, i, CandidateMode::Contemporaneous, s, lag_depth))?;
    Ok((r.fscore <= tol, r))
}

/// Separation of `y_j` from the lags of `y_i` given `S` and all other lags.
pub fn delayed_separated<S: CovarianceSource + ?Sized>(
    source: &S,
    j: usize,
    i: usize,
    s: VertexSet,
    lag_depth: usize,
    tol: f64,
) -> Result<(bool, FilterResult)> {
    let r = project(source, &RegressorSpec::new(j, i, CandidateMode::DelayedOnly, s, lag_depth))?;
    Ok((r.fscore <= tol, r))
}

/// Minimum f-score over `sets` and the first set attaining it.
pub fn fscore_min_over_sets<S: CovarianceSource + ?Sized>(
    source: &S,
    j: usize,
    i: usize,
    mode: CandidateMode,
    sets: &[VertexSet],
    lag_depth: usize,
) -> Result<(f64, VertexSet)> {
    let cc = ConditionalCovariance::new(source, lag_depth)?;
    cc.min_fscore(mode, j, i, sets)
}

/// Covariance of `y(t)` conditioned on the past, once with every process's
/// lags `1..=L` and once with the lags of each single process left out.
#[derive(Clone, Debug)]
pub struct ConditionalCovariance {
    n: usize,
    lag_depth: usize,
    full: DMatrix<f64>,
    without: Vec<DMatrix<f64>>,
    ridge_regularized: bool,
}

impl ConditionalCovariance {
    pub fn new<S: CovarianceSource + ?Sized>(source: &S, lag_depth: usize) -> Result<Self> {
        if lag_depth == 0 {
            return Err(Error::InvalidSpec("lag depth must be at least 1".into()));
        }
        source.require_lag(lag_depth)?;
        let n = source.n();
        let all: Vec<usize> = (0..n).collect();
        let (full, mut ridge) = Self::condition_on_past(source, &all, lag_depth);
        let mut without = Vec::with_capacity(n);
        for i in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&p| p != i).collect();
            let (m, r) = Self::condition_on_past(source, &keep, lag_depth);
            ridge |= r;
            without.push(m);
        }
        Ok(Self { n, lag_depth, full, without, ridge_regularized: ridge })
    }

    fn condition_on_past<S: CovarianceSource + ?Sized>(source: &S, keep: &[usize], depth: usize) -> (DMatrix<f64>, bool) {
        let n = source.n();
        let past: Vec<Regressor> =
            (1..=depth as i64).flat_map(|l| keep.iter().map(move |&p| Regressor::new(p, l))).collect();
        let r0 = source.lag(0).clone();
        if past.is_empty() {
            return (r0, false);
        }
        let m = past.len();
        let gram = DMatrix::from_fn(m, m, |r, s| source.cross(past[r].process, past[r].lag, past[s].process, past[s].lag));
        let cross = DMatrix::from_fn(m, n, |r, a| source.cross(past[r].process, past[r].lag, a, 0));
        let (ch, ridge) = factor(gram);
        let x = ch.l().solve_lower_triangular(&cross).expect("Cholesky factor is invertible");
        let sigma = r0 - x.transpose() * x;
        ((&sigma + sigma.transpose()) * 0.5, ridge)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lag_depth(&self) -> usize {
        self.lag_depth
    }

    pub fn ridge_regularized(&self) -> bool {
        self.ridge_regularized
    }

    /// `Var(y_j(t) | S(t), past)`; `excluded` drops one process from the past.
    pub fn residual_variance(&self, j: usize, given: VertexSet, excluded: Option<usize>) -> f64 {
        let sigma = match excluded {
            None => &self.full,
            Some(i) => &self.without[i],
        };
        schur_variance(sigma, j, given)
    }

    /// Share of the residual variance of `y_j` removed by `y_i(t)`.
    pub fn feedthrough_fscore(&self, j: usize, i: usize, s: VertexSet) -> f64 {
        let reduced = self.residual_variance(j, s, None);
        let full = self.residual_variance(j, s.with(i), None);
        relative_reduction(full, reduced, self.full[(j, j)])
    }

    /// Share of the residual variance of `y_j` removed by the lags of `y_i`.
    pub fn delayed_fscore(&self, j: usize, i: usize, s: VertexSet) -> f64 {
        let reduced = self.residual_variance(j, s, Some(i));
        let full = self.residual_variance(j, s, None);
        relative_reduction(full, reduced, self.without[i][(j, j)])
    }

    pub fn fscore(&self, mode: CandidateMode, j: usize, i: usize, s: VertexSet) -> f64 {
        match mode {
            CandidateMode::Contemporaneous => self.feedthrough_fscore(j, i, s),
            CandidateMode::DelayedOnly => self.delayed_fscore(j, i, s),
        }
    }

    /// Minimum over `sets` (strict improvement keeps the earliest minimizer).
    pub fn min_fscore(&self, mode: CandidateMode, j: usize, i: usize, sets: &[VertexSet]) -> Result<(f64, VertexSet)> {
        let mut best: Option<(f64, VertexSet)> = None;
        for &s in sets {
            let f = self.fscore(mode, j, i, s);
            if best.is_none_or(|(b, _)| f < b) {
                best = Some((f, s));
            }
        }
        best.ok_or_else(|| Error::InvalidSpec("no candidate conditioning sets".into()))
    }
}

/// `Sigma_jj - Sigma_jS Sigma_SS^{-1} Sigma_Sj`.
fn schur_variance(sigma: &DMatrix<f64>, j: usize, given: VertexSet) -> f64 {
    let idx = given.to_vec();
    let v = sigma[(j, j)];
    if idx.is_empty() {
        return v.max(0.0);
    }
    let k = idx.len();
    let ss = DMatrix::from_fn(k, k, |r, c| sigma[(idx[r], idx[c])]);
    let sj = DVector::from_fn(k, |r, _| sigma[(idx[r], j)]);
    let (ch, _) = factor(ss);
    let x = ch.l().solve_lower_triangular(&sj).expect("Cholesky factor is invertible");
    (v - x.norm_squared()).max(0.0)
}
