//! Separating-set search producing a partially oriented multi-arrowed graph.
//!
//! For every unordered pair the search first looks for a set `S` that
//! separates the two present values (feedthrough test). Pairs that cannot be
//! separated become undirected edges. For separated pairs each lagged
//! direction is tested as well, always conditioning on the lags of every
//! other process; failures become double-headed edges.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{PartialGraph, VertexSet};
use crate::ldim::{empirical_autocovariance, CovarianceSource};
use crate::wiener::{CandidateMode, ConditionalCovariance, DEFAULT_LAG_DEPTH, POPULATION_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GemdParams {
    /// A pair counts as separated when its f-score is at most this value.
    pub edge_threshold: f64,
    pub lag_depth: usize,
    /// Largest conditioning set tried; `None` means `n - 2`.
    #[serde(default)]
    pub max_conditioning: Option<usize>,
    #[serde(default)]
    pub witness: WitnessPolicy,
}

/// Which conditioning set is kept as the separating set of a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPolicy {
    /// Stop at the first set (by size, then lexicographically) whose score
    /// is within the threshold. Exact sources need this: many sets score
    /// zero up to rounding.
    #[default]
    FirstFound,
    /// Score every set; the pair is separated when the minimum is within
    /// the threshold and the minimizing set is kept. Suits sample
    /// estimates, where the smallest score is the most reliable.
    MinimumScore,
}

impl Default for GemdParams {
    fn default() -> Self {
        Self {
            edge_threshold: POPULATION_TOL,
            lag_depth: DEFAULT_LAG_DEPTH,
            max_conditioning: None,
            witness: WitnessPolicy::FirstFound,
        }
    }
}

impl GemdParams {
    pub fn with_threshold(edge_threshold: f64) -> Self {
        Self { edge_threshold, ..Self::default() }
    }

    fn kappa(&self, n: usize) -> usize {
        let full = n.saturating_sub(2);
        self.max_conditioning.map_or(full, |k| k.min(full))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationKind {
    Feedthrough,
    Delayed,
}

impl SeparationKind {
    pub fn mode(self) -> CandidateMode {
        match self {
            SeparationKind::Feedthrough => CandidateMode::Contemporaneous,
            SeparationKind::Delayed => CandidateMode::DelayedOnly,
        }
    }
}

mod one_based {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*v as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let v = u64::deserialize(d)?;
        if v == 0 {
            return Err(serde::de::Error::custom("vertex indices start at 1"));
        }
        Ok(v as usize - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestedSet {
    pub set: VertexSet,
    pub fscore: f64,
}

/// Outcome of one search. Feedthrough records are stored with
/// `source < target`; delayed records test `target` against the lags of
/// `source`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationRecord {
    #[serde(with = "one_based")]
    pub source: usize,
    #[serde(with = "one_based")]
    pub target: usize,
    pub kind: SeparationKind,
    pub separating_set: Option<VertexSet>,
    /// Every set tried, in search order.
    pub fscores: Vec<TestedSet>,
}

impl SeparationRecord {
    pub fn witness_fscore(&self) -> Option<f64> {
        let s = self.separating_set?;
        self.fscores.iter().find(|t| t.set == s).map(|t| t.fscore)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    pub graph: PartialGraph,
    pub records: Vec<SeparationRecord>,
    pub config: GemdParams,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl ReconstructionResult {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn feedthrough_record(&self, a: usize, b: usize) -> Option<&SeparationRecord> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.records.iter().find(|r| r.kind == SeparationKind::Feedthrough && r.source == lo && r.target == hi)
    }

    pub fn delayed_record(&self, source: usize, target: usize) -> Option<&SeparationRecord> {
        self.records.iter().find(|r| r.kind == SeparationKind::Delayed && r.source == source && r.target == target)
    }
}

fn search(
    cc: &ConditionalCovariance,
    kind: SeparationKind,
    source: usize,
    target: usize,
    sets: &[VertexSet],
    params: &GemdParams,
) -> SeparationRecord {
    let mut fscores = Vec::new();
    let mut separating_set = None;
    let mut best: Option<TestedSet> = None;
    for &s in sets {
        let t = TestedSet { set: s, fscore: cc.fscore(kind.mode(), target, source, s) };
        fscores.push(t);
        match params.witness {
            WitnessPolicy::FirstFound => {
                if t.fscore <= params.edge_threshold {
                    separating_set = Some(s);
                    break;
                }
            }
            WitnessPolicy::MinimumScore => {
                if best.is_none_or(|b| t.fscore < b.fscore) {
                    best = Some(t);
                }
            }
        }
    }
    if let Some(b) = best.filter(|b| b.fscore <= params.edge_threshold) {
        separating_set = Some(b.set);
    }
    SeparationRecord { source, target, kind, separating_set, fscores }
}

fn conditioning_sets(n: usize, i: usize, j: usize, kappa: usize) -> Vec<VertexSet> {
    let pool: VertexSet = (0..n).filter(|&v| v != i && v != j).collect();
    VertexSet::subsets_by_size(pool, kappa)
}

/// Runs the search on a covariance source.
pub fn gemd<S: CovarianceSource + ?Sized>(source: &S, params: &GemdParams) -> Result<ReconstructionResult> {
    let cc = ConditionalCovariance::new(source, params.lag_depth)?;
    Ok(gemd_with(&cc, params))
}

/// Runs the search on a sample path (`n x T`) via the biased autocovariance
/// estimate.
pub fn gemd_from_data(data: &DMatrix<f64>, params: &GemdParams) -> Result<ReconstructionResult> {
    let src = empirical_autocovariance(data, params.lag_depth)?;
    gemd(&src, params)
}

/// Runs the search on precomputed conditional covariances.
pub fn gemd_with(cc: &ConditionalCovariance, params: &GemdParams) -> ReconstructionResult {
    let n = cc.n();
    let kappa = params.kappa(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();

    let outcomes: Vec<Vec<SeparationRecord>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let sets = conditioning_sets(n, i, j, kappa);
            let ft = search(cc, SeparationKind::Feedthrough, i, j, &sets, params);
            if ft.separating_set.is_none() {
                return vec![ft];
            }
            let forward = search(cc, SeparationKind::Delayed, i, j, &sets, params);
            let backward = search(cc, SeparationKind::Delayed, j, i, &sets, params);
            vec![ft, forward, backward]
        })
        .collect();

    let mut graph = PartialGraph::new(n);
    let mut records = Vec::new();
    for recs in outcomes {
        for r in &recs {
            if r.separating_set.is_some() {
                continue;
            }
            let added = match r.kind {
                SeparationKind::Feedthrough => graph.add_undirected(r.source, r.target),
                SeparationKind::Delayed => graph.add_double_headed(r.source, r.target),
            };
            added.expect("each pair is decided once");
        }
        records.extend(recs);
    }
    let mut diagnostics = Vec::new();
    if cc.ridge_regularized() {
        diagnostics.push("singular past covariance; ridge-regularized solve used".into());
    }
    ReconstructionResult { graph, records, config: params.clone(), diagnostics }
}

/// Minimum f-score of one test over all conditioning sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    #[serde(with = "one_based")]
    pub source: usize,
    #[serde(with = "one_based")]
    pub target: usize,
    pub min_fscore: f64,
    pub argmin: VertexSet,
}

/// Feedthrough scores are symmetric and listed once per unordered pair
/// (`source < target`); delayed scores are listed for every ordered pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub n: usize,
    pub feedthrough: Vec<PairScore>,
    pub delayed: Vec<PairScore>,
}

pub fn pairwise_scores<S: CovarianceSource + ?Sized>(source: &S, params: &GemdParams) -> Result<ScoreTable> {
    let cc = ConditionalCovariance::new(source, params.lag_depth)?;
    pairwise_scores_with(&cc, params)
}

pub fn pairwise_scores_with(cc: &ConditionalCovariance, params: &GemdParams) -> Result<ScoreTable> {
    let n = cc.n();
    let kappa = params.kappa(n);
    let score = |mode: CandidateMode, i: usize, j: usize| -> Result<PairScore> {
        let sets = conditioning_sets(n, i, j, kappa);
        let (min_fscore, argmin) = cc.min_fscore(mode, j, i, &sets)?;
        Ok(PairScore { source: i, target: j, min_fscore, argmin })
    };
    let mut feedthrough = Vec::new();
    let mut delayed = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if i < j {
                feedthrough.push(score(CandidateMode::Contemporaneous, i, j)?);
            }
            delayed.push(score(CandidateMode::DelayedOnly, i, j)?);
        }
    }
    Ok(ScoreTable { n, feedthrough, delayed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::builtins::{example2_network, sec3_triangle, Example2Params};
    use crate::ldim::LdimModel;
    use crate::wiener::{delayed_separated, feedthrough_separated};

    fn undirected(r: &ReconstructionResult) -> Vec<(usize, usize)> {
        r.graph.undirected().iter().map(|&(a, b)| (a + 1, b + 1)).collect()
    }

    #[test]
    fn independent_processes_give_empty_graph() {
        let src = LdimModel::with_white_noise(4, []).unwrap().population_autocovariance(10).unwrap();
        let r = gemd(&src, &GemdParams::default()).unwrap();
        assert!(r.graph.undirected().is_empty() && r.graph.double_headed().is_empty());
        assert!(r.records.iter().all(|rec| rec.separating_set == Some(VertexSet::EMPTY)));
        assert_eq!(r.records.len(), 6 * 3);
    }

    #[test]
    fn six_node_population() {
        let m = example2_network(&Example2Params::uniform(0.45)).unwrap();
        let src = m.population_autocovariance(10).unwrap();
        let r = gemd(&src, &GemdParams::default()).unwrap();
        assert_eq!(undirected(&r), vec![(1, 2), (2, 3), (2, 4), (3, 4), (4, 5), (4, 6)]);
        assert_eq!(r.graph.double_headed().iter().copied().collect::<Vec<_>>(), vec![(4, 1)]);
        assert!(r.graph.directed().is_empty());
    }

    #[test]
    fn witnesses_replay() {
        let m = example2_network(&Example2Params::uniform(0.5)).unwrap();
        let src = m.population_autocovariance(10).unwrap();
        let params = GemdParams::default();
        let r = gemd(&src, &params).unwrap();
        for rec in &r.records {
            let Some(s) = rec.separating_set else { continue };
            assert!(rec.witness_fscore().unwrap() <= params.edge_threshold);
            let (sep, _) = match rec.kind {
                SeparationKind::Feedthrough => {
                    feedthrough_separated(&src, rec.target, rec.source, s, params.lag_depth, params.edge_threshold)
                }
                SeparationKind::Delayed => {
                    delayed_separated(&src, rec.target, rec.source, s, params.lag_depth, params.edge_threshold)
                }
            }
            .unwrap();
            assert!(sep, "{rec:?}");
        }
    }

    #[test]
    fn cancelling_triangle_loses_an_edge() {
        let (a, b) = (0.5, 0.8);
        let src = sec3_triangle(a, b, -a * b).unwrap().population_autocovariance(10).unwrap();
        let r = gemd(&src, &GemdParams::default()).unwrap();
        assert!(!r.graph.has_undirected(0, 2));
        assert!(r.graph.has_undirected(0, 1) && r.graph.has_undirected(1, 2));
    }

    #[test]
    fn pairwise_scores_on_six_nodes() {
        let m = example2_network(&Example2Params::uniform(0.45)).unwrap();
        let src = m.population_autocovariance(10).unwrap();
        let t = pairwise_scores(&src, &GemdParams::default()).unwrap();
        assert_eq!(t.feedthrough.len(), 15);
        assert_eq!(t.delayed.len(), 30);
        let ft = |a: usize, b: usize| t.feedthrough.iter().find(|p| p.source == a && p.target == b).unwrap().min_fscore;
        let dl = |a: usize, b: usize| t.delayed.iter().find(|p| p.source == a && p.target == b).unwrap().min_fscore;
        assert!(ft(1, 3) > 1e-3);
        assert!(dl(4, 1) > 1e-3);
        assert!(ft(1, 4) < 1e-9);
        assert!(dl(0, 4) < 1e-9);
    }

    #[test]
    fn deterministic_and_serializable() {
        let m = example2_network(&Example2Params::uniform(0.4)).unwrap();
        let src = m.population_autocovariance(10).unwrap();
        let a = gemd(&src, &GemdParams::default()).unwrap();
        let b = gemd(&src, &GemdParams::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back: ReconstructionResult = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back.graph, a.graph);
        assert_eq!(back.records.len(), a.records.len());
    }

    #[test]
    fn capped_search() {
        let m = example2_network(&Example2Params::uniform(0.45)).unwrap();
        let src = m.population_autocovariance(10).unwrap();
        let p = GemdParams { max_conditioning: Some(0), ..GemdParams::default() };
        let r = gemd(&src, &p).unwrap();
        assert!(r.records.iter().all(|rec| rec.fscores.iter().all(|t| t.set.is_empty())));
    }
}
