//! ROC curves over pooled edge scores.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::gemd::ScoreTable;
use crate::ldim::LdimModel;

/// Edges present in a model, in the form the scores are compared against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeTruth {
    /// Unordered pairs `(a, b)`, `a < b`, joined by a feedthrough entry.
    pub instantaneous: BTreeSet<(usize, usize)>,
    /// Ordered pairs `(from, to)` whose entry has a strictly causal part.
    pub delayed: BTreeSet<(usize, usize)>,
    /// Directed feedthrough edges `(from, to)`.
    pub directed: BTreeSet<(usize, usize)>,
}

impl EdgeTruth {
    pub fn from_model(m: &LdimModel) -> Self {
        let mut instantaneous = BTreeSet::new();
        let mut delayed = BTreeSet::new();
        let mut directed = BTreeSet::new();
        for (from, to, tf) in m.entries() {
            if from == to {
                continue;
            }
            if tf.feedthrough_gain() != 0.0 {
                instantaneous.insert((from.min(to), from.max(to)));
                directed.insert((from, to));
            }
            if tf.has_delayed_component() {
                delayed.insert((from, to));
            }
        }
        Self { instantaneous, delayed, directed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredItem {
    pub score: f64,
    pub positive: bool,
}

/// One item per unordered feedthrough pair and one per ordered delayed pair.
pub fn score_items(table: &ScoreTable, truth: &EdgeTruth) -> Vec<ScoredItem> {
    let ft = table
        .feedthrough
        .iter()
        .map(|p| ScoredItem { score: p.min_fscore, positive: truth.instantaneous.contains(&(p.source, p.target)) });
    let dl = table
        .delayed
        .iter()
        .map(|p| ScoredItem { score: p.min_fscore, positive: truth.delayed.contains(&(p.source, p.target)) });
    ft.chain(dl).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub horizon: usize,
    /// Sorted by increasing threshold.
    pub points: Vec<RocPoint>,
    /// `None` when either class is empty.
    pub auc: Option<f64>,
    pub positives: usize,
    pub negatives: usize,
}

impl RocCurve {
    /// An edge is inferred when its score exceeds the threshold. Thresholds
    /// are 0, the midpoints between distinct scores and the largest score.
    pub fn from_items(horizon: usize, items: &[ScoredItem]) -> Self {
        let positives = items.iter().filter(|i| i.positive).count();
        let negatives = items.len() - positives;
        let mut scores: Vec<f64> = items.iter().map(|i| i.score).collect();
        scores.sort_by(f64::total_cmp);
        scores.dedup();
        let mut thresholds = vec![0.0];
        thresholds.extend(scores.windows(2).map(|w| 0.5 * (w[0] + w[1])).filter(|&t| t > 0.0));
        if let Some(&max) = scores.last() {
            if max > 0.0 {
                thresholds.push(max);
            }
        }
        let rate = |count: usize, total: usize| if total == 0 { 0.0 } else { count as f64 / total as f64 };
        let points = thresholds
            .into_iter()
            .map(|t| {
                let tp = items.iter().filter(|i| i.positive && i.score > t).count();
                let fp = items.iter().filter(|i| !i.positive && i.score > t).count();
                RocPoint { threshold: t, tpr: rate(tp, positives), fpr: rate(fp, negatives) }
            })
            .collect();
        Self { horizon, points, auc: auc(items), positives, negatives }
    }

    /// Threshold maximizing `tpr - fpr`; the smallest one on ties.
    pub fn knee(&self) -> Option<RocPoint> {
        self.points.iter().copied().fold(None, |best: Option<RocPoint>, p| match best {
            Some(b) if b.tpr - b.fpr >= p.tpr - p.fpr => Some(b),
            _ => Some(p),
        })
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn auc(items: &[ScoredItem]) -> Option<f64> {
    let mut sorted: Vec<ScoredItem> = items.to_vec();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));
    let positives = sorted.iter().filter(|i| i.positive).count();
    let negatives = sorted.len() - positives;
    if positives == 0 || negatives == 0 {
        return None;
    }
    // rank-sum with mid-ranks for ties
    let mut rank_sum = 0.0;
    let mut k = 0;
    while k < sorted.len() {
        let mut end = k;
        while end + 1 < sorted.len() && sorted[end + 1].score == sorted[k].score {
            end += 1;
        }
        let mid_rank = (k + end) as f64 / 2.0 + 1.0;
        rank_sum += mid_rank * sorted[k..=end].iter().filter(|i| i.positive).count() as f64;
        k = end + 1;
    }
    let p = positives as f64;
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn item(score: f64, positive: bool) -> ScoredItem {
        ScoredItem { score, positive }
    }

    #[test]
    fn perfect_and_useless_scores() {
        let perfect = [item(0.9, true), item(0.8, true), item(0.1, false), item(0.0, false)];
        assert_eq!(auc(&perfect), Some(1.0));
        let ties = [item(0.5, true), item(0.5, false)];
        assert_eq!(auc(&ties), Some(0.5));
        assert_eq!(auc(&[item(0.3, true)]), None);
        let c = RocCurve::from_items(100, &perfect);
        let k = c.knee().unwrap();
        assert_eq!((k.tpr, k.fpr), (1.0, 0.0));
        assert!((k.threshold - 0.45).abs() < 1e-15);
    }

    #[test]
    fn thresholds_cover_the_extremes() {
        let c = RocCurve::from_items(1, &[item(0.2, true), item(0.6, false), item(0.0, false)]);
        let first = c.points.first().unwrap();
        let last = c.points.last().unwrap();
        assert_eq!(first.threshold, 0.0);
        assert_eq!((first.tpr, first.fpr), (1.0, 0.5));
        assert_eq!((last.tpr, last.fpr), (0.0, 0.0));
    }

    fn brute_auc(items: &[ScoredItem]) -> f64 {
        let mut acc = 0.0;
        let mut pairs = 0.0;
        for p in items.iter().filter(|i| i.positive) {
            for q in items.iter().filter(|i| !i.positive) {
                pairs += 1.0;
                acc += if p.score > q.score { 1.0 } else if p.score == q.score { 0.5 } else { 0.0 };
            }
        }
        acc / pairs
    }

    proptest! {
        #[test]
        fn roc_is_monotone_and_auc_matches_pairs(raw in proptest::collection::vec((0u8..20, any::<bool>()), 2..60)) {
            let items: Vec<ScoredItem> = raw.iter().map(|&(s, p)| item(s as f64 / 20.0, p)).collect();
            let c = RocCurve::from_items(1, &items);
            for w in c.points.windows(2) {
                prop_assert!(w[0].threshold < w[1].threshold);
                prop_assert!(w[1].tpr <= w[0].tpr && w[1].fpr <= w[0].fpr);
            }
            if let Some(a) = c.auc {
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!((a - brute_auc(&items)).abs() < 1e-12);
            }
        }
    }
}
