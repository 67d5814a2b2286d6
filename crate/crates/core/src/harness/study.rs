//! Repeated simulate-and-reconstruct experiments over several horizons.
//!
//! Trial `k` draws its model and its sample path from the `k`-th per-trial
//! seed, so each horizon sees the same models (common random numbers).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::builtins::{example2_network, B32Placement, Example2Params};
use super::random::{parameterize, trial_seeds, ParamLaw};
use super::roc::{score_items, EdgeTruth, RocCurve, ScoredItem};
use crate::error::{Error, Result};
use crate::gemd::{gemd_with, pairwise_scores_with, GemdParams, ScoreTable, WitnessPolicy};
use crate::graph::MultiArrowGraph;
use crate::ldim::{empirical_autocovariance, simulate, LdimModel};
use crate::orientation::orient_all;
use crate::wiener::{ConditionalCovariance, DEFAULT_LAG_DEPTH};

/// What each trial simulates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// The same model in every trial.
    Fixed(LdimModel),
    /// The six-node network with coefficients redrawn each trial.
    Example2 { placement: B32Placement },
    /// Coefficients redrawn each trial on a fixed structure.
    Graph(MultiArrowGraph),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSource,
    pub param_law: ParamLaw,
    pub trials: usize,
    pub horizons: Vec<usize>,
    pub lag_depth: usize,
    /// Fixed edge threshold for the accuracy study; `None` picks the ROC knee
    /// at each horizon.
    pub edge_threshold: Option<f64>,
    pub max_conditioning: Option<usize>,
    #[serde(default = "min_score")]
    pub witness: WitnessPolicy,
    pub master_seed: u64,
}

fn min_score() -> WitnessPolicy {
    WitnessPolicy::MinimumScore
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelSource::Example2 { placement: B32Placement::Combined },
            param_law: ParamLaw::default(),
            trials: 100,
            horizons: vec![500, 1000, 10_000, 20_000, 25_000],
            lag_depth: DEFAULT_LAG_DEPTH,
            edge_threshold: None,
            max_conditioning: None,
            witness: WitnessPolicy::MinimumScore,
            master_seed: 2024,
        }
    }
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<()> {
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be a nonempty list of positive sample counts".into()));
        }
        if let Some(t) = self.edge_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("edge threshold {t} outside [0, 1]")));
            }
        }
        if !(self.param_law.low < self.param_law.high) {
            return Err(Error::Config("parameter law needs low < high".into()));
        }
        if self.lag_depth == 0 {
            return Err(Error::Config("lag depth must be at least 1".into()));
        }
        Ok(())
    }

    fn gemd_params(&self, edge_threshold: f64) -> GemdParams {
        GemdParams {
            edge_threshold,
            lag_depth: self.lag_depth,
            max_conditioning: self.max_conditioning,
            witness: self.witness,
        }
    }

    fn draw_model(&self, rng: &mut ChaCha8Rng) -> Result<LdimModel> {
        match &self.model {
            ModelSource::Fixed(m) => Ok(m.clone()),
            ModelSource::Example2 { placement } => loop {
                let mut p = Example2Params::sample(rng, self.param_law.low, self.param_law.high);
                p.placement = *placement;
                let m = example2_network(&p)?;
                if m.to_state_space().is_ok() {
                    return Ok(m);
                }
            },
            ModelSource::Graph(g) => {
                for _ in 0..1000 {
                    if let Some(m) = parameterize(g, &self.param_law, rng) {
                        return Ok(m);
                    }
                }
                Err(Error::Config("no stable parameterization found in 1000 draws".into()))
            }
        }
    }
}

/// Everything one trial at one horizon produces.
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub model: LdimModel,
    pub truth: EdgeTruth,
    pub covariance: ConditionalCovariance,
    pub scores: ScoreTable,
}

/// Simulates and scores every trial at `horizon`, sorted by trial index.
pub fn run_trials(config: &ExperimentConfig, horizon: usize) -> Result<Vec<Trial>> {
    config.check()?;
    let params = config.gemd_params(0.0);
    trial_seeds(config.master_seed, config.trials)
        .into_par_iter()
        .enumerate()
        .map(|(index, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model = config.draw_model(&mut rng)?;
            let data = simulate(&model, horizon, rng.next_u64())?;
            let src = empirical_autocovariance(&data, config.lag_depth)?;
            let covariance = ConditionalCovariance::new(&src, config.lag_depth)?;
            let scores = pairwise_scores_with(&covariance, &params)?;
            let truth = EdgeTruth::from_model(&model);
            Ok(Trial { index, seed, model, truth, covariance, scores })
        })
        .collect()
}

fn pooled_items(trials: &[Trial]) -> Vec<ScoredItem> {
    trials.iter().flat_map(|t| score_items(&t.scores, &t.truth)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub horizon: usize,
    /// Share of true feedthrough edges output with the true direction,
    /// pooled over trials.
    pub accuracy: f64,
    pub trials: usize,
    pub threshold: f64,
    pub conflicts: usize,
    /// Share of output orientations (any edge) that are correct.
    pub precision: f64,
}

/// Orients each trial's reconstruction at `threshold` and scores it.
pub fn orientation_accuracy(config: &ExperimentConfig, horizon: usize, trials: &[Trial], threshold: f64) -> AccuracyRow {
    let params = config.gemd_params(threshold);
    let (correct, total, oriented, conflicts) = trials
        .par_iter()
        .map(|t| {
            let result = gemd_with(&t.covariance, &params);
            let (g, trace) = orient_all(&result);
            let correct = t.truth.directed.iter().filter(|&&(a, b)| g.has_directed(a, b)).count();
            let right_output = g.directed().iter().filter(|e| t.truth.directed.contains(e)).count();
            (correct, t.truth.directed.len(), (right_output, g.directed().len()), trace.conflicts.len())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, 0, (0, 0), 0), |acc, x| (acc.0 + x.0, acc.1 + x.1, (acc.2 .0 + x.2 .0, acc.2 .1 + x.2 .1), acc.3 + x.3));
    let ratio = |a: usize, b: usize| if b == 0 { 1.0 } else { a as f64 / b as f64 };
    AccuracyRow {
        horizon,
        accuracy: ratio(correct, total),
        trials: trials.len(),
        threshold,
        conflicts,
        precision: ratio(oriented.0, oriented.1),
    }
}

/// One ROC curve per horizon.
pub fn run_roc(config: &ExperimentConfig) -> Result<Vec<RocCurve>> {
    Ok(run_study(config)?.into_iter().map(|(c, _)| c).collect())
}

/// One accuracy row per horizon.
pub fn run_orientation_accuracy(config: &ExperimentConfig) -> Result<Vec<AccuracyRow>> {
    Ok(run_study(config)?.into_iter().map(|(_, a)| a).collect())
}

/// ROC curve and accuracy row per horizon from the same trials.
pub fn run_study(config: &ExperimentConfig) -> Result<Vec<(RocCurve, AccuracyRow)>> {
    config.check()?;
    config
        .horizons
        .iter()
        .map(|&h| {
            let trials = run_trials(config, h)?;
            let curve = RocCurve::from_items(h, &pooled_items(&trials));
            let threshold = match config.edge_threshold {
                Some(t) => t,
                None => curve.knee().map_or(0.0, |k| k.threshold),
            };
            log::info!("horizon {h}: auc {:?}, threshold {threshold:.6}", curve.auc);
            let row = orientation_accuracy(config, h, &trials, threshold);
            Ok((curve, row))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize, horizons: Vec<usize>) -> ExperimentConfig {
        ExperimentConfig { trials, horizons, lag_depth: 5, ..ExperimentConfig::default() }
    }

    #[test]
    fn reproducible_single_trial() {
        let c = small(1, vec![2000]);
        assert_eq!(run_roc(&c).unwrap(), run_roc(&c).unwrap());
    }

    #[test]
    fn null_model_calibration() {
        let null = LdimModel::with_white_noise(4, []).unwrap();
        let c = ExperimentConfig { model: ModelSource::Fixed(null), ..small(20, vec![2000]) };
        let trials = run_trials(&c, 2000).unwrap();
        let items = pooled_items(&trials);
        assert!(items.iter().all(|i| !i.positive));
        let fp = items.iter().filter(|i| i.score > 0.05).count() as f64 / items.len() as f64;
        assert!(fp < 0.1, "false positive rate {fp}");
    }

    #[test]
    fn long_horizon_orients_well() {
        let c = small(4, vec![20_000]);
        let (curve, row) = run_study(&c).unwrap().pop().unwrap();
        assert!(curve.auc.unwrap() > 0.95);
        assert!(row.accuracy > 0.8, "{row:?}");
    }

    #[test]
    fn config_checks() {
        assert!(small(1, vec![]).check().is_err());
        let bad = ExperimentConfig { edge_threshold: Some(1.5), ..small(1, vec![100]) };
        assert!(bad.check().is_err());
    }
}
