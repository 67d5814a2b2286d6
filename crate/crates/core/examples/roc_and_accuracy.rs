//! ROC curves and orientation accuracy over repeated simulations.

use gemd::harness::study::{run_study, ExperimentConfig};

fn main() -> gemd::error::Result<()> {
    let config = ExperimentConfig { trials: 30, horizons: vec![500, 2_000, 10_000], ..ExperimentConfig::default() };
    for (curve, row) in run_study(&config)? {
        println!(
            "T = {:>6}: AUC {:.4}, knee threshold {:.4}, accuracy {:.3}, {} conflicts",
            curve.horizon,
            curve.auc.unwrap_or(f64::NAN),
            row.threshold,
            row.accuracy,
            row.conflicts
        );
    }
    Ok(())
}
