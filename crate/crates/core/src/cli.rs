//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::faithfulness::{check_faithfulness, scan_with_sampler, FAITHFULNESS_TOL};
use crate::gemd::{gemd, gemd_from_data, GemdParams, ReconstructionResult, WitnessPolicy};
use crate::harness::builtins::{builtin, example2_network, sec3_triangle, B32Placement, Example2Params};
use crate::harness::counterexample::verify_counterexample;
use crate::harness::io::{read_data_csv, read_json, write_accuracy_csv, write_data_csv, write_json, write_roc_csv, write_scan_csv};
use crate::harness::random::{parameterize, ParamLaw};
use crate::harness::study::{run_study, ExperimentConfig, ModelSource};
use crate::ldim::{simulate, LdimModel};
use crate::orientation::{orient_all, OrientationTrace};
use crate::graph::PartialGraph;
use crate::wiener::DEFAULT_LAG_DEPTH;

#[derive(Debug, Parser)]
#[command(name = "gemd", version, about = "Reconstruct dynamic influence networks from second-order statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a model and write the sample path as CSV.
    Simulate(SimulateArgs),
    /// Run the separating-set search on data or on exact covariances.
    Reconstruct(ReconstructArgs),
    /// Orient a reconstruction result.
    Orient(OrientArgs),
    /// ROC curves over repeated simulations.
    Roc(StudyArgs),
    /// Orientation accuracy over repeated simulations.
    Accuracy(StudyArgs),
    /// Check that the two triangle models share a spectrum.
    Counterexample(CounterexampleArgs),
    /// Faithfulness check of one model or a scan over random coefficients.
    Faithfulness(FaithfulnessArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model JSON file.
    #[arg(long, conflicts_with = "builtin")]
    pub model: Option<PathBuf>,
    /// Builtin model: sec3_triangle, example1_diamond or example2_network.
    #[arg(long)]
    pub builtin: Option<String>,
}

impl ModelArgs {
    fn load(&self) -> Result<Option<LdimModel>> {
        let m = match (&self.model, &self.builtin) {
            (Some(p), _) => read_json::<LdimModel>(p)?,
            (None, Some(name)) => builtin(name)?,
            (None, None) => return Ok(None),
        };
        let report = m.validate();
        if !report.passed() {
            return Err(Error::Validation(report));
        }
        Ok(Some(m))
    }

    fn require(&self) -> Result<LdimModel> {
        self.load()?.ok_or_else(|| Error::Config("a model is required (--model or --builtin)".into()))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1000)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Sample path CSV; without it the model's exact covariances are used.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Pairs with f-score at or below this are separated.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_LAG_DEPTH)]
    pub lags: usize,
    /// Largest conditioning set size.
    #[arg(long)]
    pub max_cond: Option<usize>,
    /// Separating set kept per pair; defaults to minimum-score with
    /// --data and first-found otherwise.
    #[arg(long, value_enum)]
    pub witness: Option<WitnessPolicy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrientArgs {
    /// Reconstruction result JSON.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Human-readable rule log.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Fixed model; the six-node network with random coefficients otherwise.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Redraw coefficients on the given model's structure each trial.
    #[arg(long)]
    pub redraw: bool,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [500usize, 1000, 10_000, 20_000, 25_000])]
    pub horizons: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_LAG_DEPTH)]
    pub lags: usize,
    #[arg(long)]
    pub max_cond: Option<usize>,
    #[arg(long, value_enum, default_value_t = WitnessPolicy::MinimumScore)]
    pub witness: WitnessPolicy,
    /// Fixed edge threshold; the ROC knee per horizon otherwise.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 0.3)]
    pub low: f64,
    #[arg(long, default_value_t = 0.6)]
    pub high: f64,
    #[arg(long, value_enum, default_value_t = B32Placement::Combined)]
    pub placement: B32Placement,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// CSV output; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Full JSON summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 20)]
    pub draws: usize,
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.3)]
    pub low: f64,
    #[arg(long, default_value_t = 0.9)]
    pub high: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FaithfulnessArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of random parameterizations; 0 checks the model as given.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Triangle scans keep the cancellation `c = -a b`.
    #[arg(long)]
    pub constrained: bool,
    #[arg(long, default_value_t = 0.3)]
    pub low: f64,
    #[arg(long, default_value_t = 0.6)]
    pub high: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_LAG_DEPTH)]
    pub lags: usize,
    #[arg(long, default_value_t = FAITHFULNESS_TOL)]
    pub tol: f64,
    /// JSON report or scan summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial CSV of a scan.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            let mut w = output(&None)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn check_law(low: f64, high: f64) -> Result<ParamLaw> {
    if !(low < high) {
        return Err(Error::Config(format!("need --low < --high, got {low} and {high}")));
    }
    Ok(ParamLaw { low, high })
}

#[derive(Serialize, serde::Deserialize)]
pub struct OrientedOutput {
    pub graph: PartialGraph,
    pub trace: OrientationTrace,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => {
            let m = a.model.require()?;
            let data = simulate(&m, a.horizon, a.seed)?;
            write_data_csv(output(&a.out)?, &data)
        }
        Command::Reconstruct(a) => reconstruct(a),
        Command::Orient(a) => {
            let result: ReconstructionResult = read_json(&a.input)?;
            let (graph, trace) = orient_all(&result);
            if let Some(p) = &a.log {
                std::fs::write(p, trace.rule_log())?;
            }
            if !trace.conflicts.is_empty() {
                log::warn!("{} orientation conflicts", trace.conflicts.len());
            }
            emit_json(&a.out, &OrientedOutput { graph, trace })
        }
        Command::Roc(a) => study(a, true),
        Command::Accuracy(a) => study(a, false),
        Command::Counterexample(a) => {
            let law = check_law(a.low, a.high)?;
            let r = verify_counterexample(a.grid, a.draws, a.seed, law.low, law.high)?;
            if let Some(p) = &a.out {
                write_json(p, &r)?;
            }
            println!("max deviation {:.3e}, closed-form error {:.3e}", r.max_deviation, r.max_closed_form_error);
            println!("{}", if r.pass { "PASS" } else { "FAIL" });
            if r.pass {
                Ok(())
            } else {
                Err(Error::Config("spectra differ beyond tolerance".into()))
            }
        }
        Command::Faithfulness(a) => faithfulness(a),
    }
}

fn reconstruct(a: ReconstructArgs) -> Result<()> {
    let model = a.model.load()?;
    let result = match &a.data {
        Some(path) => {
            let data = read_data_csv(File::open(path)?)?;
            if let Some(m) = &model {
                if m.n() != data.nrows() {
                    return Err(Error::Config(format!("model has {} processes, data has {}", m.n(), data.nrows())));
                }
            }
            let threshold = a.threshold.ok_or_else(|| Error::Config("--threshold is required with --data".into()))?;
            let params = GemdParams {
                edge_threshold: threshold,
                lag_depth: a.lags,
                max_conditioning: a.max_cond,
                witness: a.witness.unwrap_or(WitnessPolicy::MinimumScore),
            };
            gemd_from_data(&data, &params)?
        }
        None => {
            let m = model.ok_or_else(|| Error::Config("need --data or a model".into()))?;
            let params = GemdParams {
                edge_threshold: a.threshold.unwrap_or(GemdParams::default().edge_threshold),
                lag_depth: a.lags,
                max_conditioning: a.max_cond,
                witness: a.witness.unwrap_or(WitnessPolicy::FirstFound),
            };
            gemd(&m.population_autocovariance(a.lags)?, &params)?
        }
    };
    for d in &result.diagnostics {
        log::warn!("{d}");
    }
    emit_json(&a.out, &result)
}

fn study(a: StudyArgs, roc: bool) -> Result<()> {
    let law = check_law(a.low, a.high)?;
    let model = match a.model.load()? {
        None => ModelSource::Example2 { placement: a.placement },
        Some(m) if a.redraw => ModelSource::Graph(m.perfect_representation()),
        Some(m) => ModelSource::Fixed(m),
    };
    let config = ExperimentConfig {
        model,
        param_law: law,
        trials: a.trials,
        horizons: a.horizons,
        lag_depth: a.lags,
        edge_threshold: a.threshold,
        max_conditioning: a.max_cond,
        witness: a.witness,
        master_seed: a.seed,
    };
    let results = run_study(&config)?;
    let (curves, rows): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    if roc {
        write_roc_csv(output(&a.out)?, &curves)?;
        for c in &curves {
            eprintln!("horizon {}: auc {}", c.horizon, c.auc.map_or("n/a".into(), |v| format!("{v:.4}")));
        }
    } else {
        write_accuracy_csv(output(&a.out)?, &rows)?;
    }
    if let Some(p) = &a.json {
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a ExperimentConfig,
            seed_rule: &'static str,
            roc: &'a [crate::harness::roc::RocCurve],
            accuracy: &'a [crate::harness::study::AccuracyRow],
        }
        write_json(
            p,
            &Summary { config: &config, seed_rule: crate::faithfulness::SEED_RULE, roc: &curves, accuracy: &rows },
        )?;
    }
    Ok(())
}

fn faithfulness(a: FaithfulnessArgs) -> Result<()> {
    let law = check_law(a.low, a.high)?;
    if a.trials == 0 {
        let m = a.model.require()?;
        let report = check_faithfulness(&m, a.lags, a.tol)?;
        eprintln!(
            "{} statements checked, {} violations",
            report.statements_checked,
            report.violations.len()
        );
        return emit_json(&a.out, &report);
    }
    let name = a.model.builtin.as_deref();
    let summary = match name {
        Some("example2_network") => scan_with_sampler(a.trials, a.seed, a.lags, a.tol, |rng| {
            let m = example2_network(&Example2Params::sample(rng, law.low, law.high)).ok()?;
            m.to_state_space().ok().map(|_| m)
        })?,
        Some("sec3_triangle") => {
            let constrained = a.constrained;
            scan_with_sampler(a.trials, a.seed, a.lags, a.tol, |rng| {
                let x: f64 = rng.random_range(law.low..law.high);
                let y: f64 = rng.random_range(law.low..law.high);
                let c = if constrained { -x * y } else { rng.random_range(law.low..law.high) };
                sec3_triangle(x, y, c).ok()
            })?
        }
        _ => {
            let graph = a.model.require()?.perfect_representation();
            scan_with_sampler(a.trials, a.seed, a.lags, a.tol, |rng| parameterize(&graph, &law, rng))?
        }
    };
    eprintln!(
        "{} trials: {} faithful, {} unfaithful, {} unstable",
        summary.trials, summary.faithful, summary.unfaithful, summary.unstable
    );
    if let Some(p) = &a.csv {
        write_scan_csv(File::create(p)?, &summary)?;
    }
    emit_json(&a.out, &summary)
}
