//! Population-level faithfulness checks: every separation statement implied
//! by the covariance must match the graph, and vice versa.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gemd::SeparationKind;
use crate::graph::{MultiArrowGraph, VertexSet};
use crate::harness::random::{parameterize, trial_seeds, ParamLaw};
use crate::ldim::LdimModel;
use crate::wiener::ConditionalCovariance;

/// f-scores at or below this count as zero.
pub const FAITHFULNESS_TOL: f64 = 1e-7;
/// Largest vertex count checked over every conditioning set.
pub const EXHAUSTIVE_MAX_N: usize = 7;
/// Conditioning sets sampled per ordered pair above [`EXHAUSTIVE_MAX_N`].
pub const SAMPLED_SETS_PER_PAIR: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: SeparationKind,
    /// 1-based.
    pub source: usize,
    /// 1-based.
    pub target: usize,
    pub set: VertexSet,
    pub d_connected: bool,
    pub separated: bool,
    pub fscore: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub model_id: String,
    pub lag_depth: usize,
    pub tol: f64,
    pub statements_checked: usize,
    pub violations: Vec<Violation>,
}

impl FaithfulnessReport {
    pub fn is_faithful(&self) -> bool {
        self.violations.is_empty()
    }
}

fn conditioning_sets(n: usize, i: usize, j: usize, rng: &mut ChaCha8Rng) -> Vec<VertexSet> {
    let pool: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
    let pool_set: VertexSet = pool.iter().copied().collect();
    if n <= EXHAUSTIVE_MAX_N {
        return VertexSet::subsets_by_size(pool_set, pool.len());
    }
    (0..SAMPLED_SETS_PER_PAIR)
        .map(|_| {
            let size = rand::Rng::random_range(rng, 0..=pool.len());
            sample(rng, pool.len(), size).iter().map(|k| pool[k]).collect()
        })
        .collect()
}

/// Checks the model against its perfect graphical representation. The
/// delayed statements use the processes whose innovations depend on the
/// past of the source (see [`LdimModel::lagged_influences`]).
pub fn check_faithfulness(m: &LdimModel, lag_depth: usize, tol: f64) -> Result<FaithfulnessReport> {
    let graph = m.perfect_representation();
    let children: Vec<Vec<usize>> = (0..m.n()).map(|i| m.lagged_influences(i)).collect();
    check(m, &graph, &children, lag_depth, tol)
}

/// Checks the model against a supplied representation; delayed statements
/// follow its double-headed edges.
pub fn check_faithfulness_against(
    m: &LdimModel,
    graph: &MultiArrowGraph,
    lag_depth: usize,
    tol: f64,
) -> Result<FaithfulnessReport> {
    let children: Vec<Vec<usize>> = (0..m.n()).map(|i| graph.double_headed_children(i)).collect();
    check(m, graph, &children, lag_depth, tol)
}

fn check(
    m: &LdimModel,
    graph: &MultiArrowGraph,
    children: &[Vec<usize>],
    lag_depth: usize,
    tol: f64,
) -> Result<FaithfulnessReport> {
    let n = m.n();
    let inst = graph.instantaneous_graph()?;
    let src = m.population_autocovariance(lag_depth)?;
    let cc = ConditionalCovariance::new(&src, lag_depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut violations = Vec::new();
    let mut checked = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for s in conditioning_sets(n, i, j, &mut rng) {
                let statements = [
                    (SeparationKind::Feedthrough, inst.d_connected(i, j, s), cc.feedthrough_fscore(j, i, s)),
                    (SeparationKind::Delayed, graph.delayed_d_connected_via(i, j, s, &children[i]), cc.delayed_fscore(j, i, s)),
                ];
                for (kind, d_connected, fscore) in statements {
                    checked += 1;
                    let separated = fscore <= tol;
                    if d_connected == separated {
                        violations.push(Violation { kind, source: i + 1, target: j + 1, set: s, d_connected, separated, fscore });
                    }
                }
            }
        }
    }
    Ok(FaithfulnessReport { model_id: String::new(), lag_depth, tol, statements_checked: checked, violations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTrial {
    pub trial: usize,
    pub seed: u64,
    /// `None` when the draw was unstable and rejected.
    pub faithful: Option<bool>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub trials: usize,
    pub faithful: usize,
    pub unfaithful: usize,
    pub unstable: usize,
    pub lag_depth: usize,
    pub tol: f64,
    pub master_seed: u64,
    pub seed_rule: String,
    pub per_trial: Vec<ScanTrial>,
}

pub const SEED_RULE: &str = "trial k uses the (k+1)-th next_u64 draw of ChaCha8Rng::seed_from_u64(master_seed)";

/// Runs `sampler` once per trial with a per-trial generator and checks each
/// model it returns; `None` counts as an unstable draw.
pub fn scan_with_sampler<F>(trials: usize, master_seed: u64, lag_depth: usize, tol: f64, sampler: F) -> Result<ScanSummary>
where
    F: Fn(&mut ChaCha8Rng) -> Option<LdimModel> + Sync,
{
    let seeds = trial_seeds(master_seed, trials);
    let per_trial: Vec<ScanTrial> = seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Some(m) = sampler(&mut rng) else {
                return Ok(ScanTrial { trial, seed, faithful: None, violations: 0 });
            };
            let report = check_faithfulness(&m, lag_depth, tol)?;
            Ok(ScanTrial { trial, seed, faithful: Some(report.is_faithful()), violations: report.violations.len() })
        })
        .collect::<Result<_>>()?;
    let count = |want: Option<bool>| per_trial.iter().filter(|t| t.faithful == want).count();
    Ok(ScanSummary {
        trials,
        faithful: count(Some(true)),
        unfaithful: count(Some(false)),
        unstable: count(None),
        lag_depth,
        tol,
        master_seed,
        seed_rule: SEED_RULE.into(),
        per_trial,
    })
}

/// Draws `trials` parameterizations of `graph` (gains on single-headed
/// edges, `c z^{-1}` on double-headed ones) and checks each.
pub fn zero_measure_scan(graph: &MultiArrowGraph, trials: usize, law: &ParamLaw, seed: u64) -> Result<ScanSummary> {
    scan_with_sampler(trials, seed, crate::wiener::DEFAULT_LAG_DEPTH, FAITHFULNESS_TOL, |rng| parameterize(graph, law, rng))
}
