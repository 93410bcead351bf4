use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use smooth_rank::concordance::concordance_counts;
use smooth_rank::data::{load_csv, save_csv, FeatureColumns, Schema, SurvivalDataset};
use smooth_rank::experiment::{
    run_dimensionality_sweep, run_random_splits, run_size_sweep, Imputation, Report, ReportFormat,
    SizeSweepPlan, SplitPlan,
};
use smooth_rank::model::{train, CutoffUnits, SmoothRankConfig, SmoothRankModel};
use smooth_rank::synthetic::{default_feature_counts, generate, SyntheticConfig};

#[derive(Parser)]
#[command(
    name = "smooth-rank",
    version,
    about = "Smooth Rank risk modeling on censored survival data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write it as JSON.
    Train {
        #[command(flatten)]
        input: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a dataset with a trained model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "time")]
        time_col: String,
        #[arg(long, default_value = "event")]
        event_col: String,
        #[arg(long, default_value = "none", value_parser = parse_imputation)]
        impute: Imputation,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concordance index of a scores CSV against its time/event columns.
    Eval {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long, default_value = "score")]
        score_col: String,
        #[arg(long, default_value = "time")]
        time_col: String,
        #[arg(long, default_value = "event")]
        event_col: String,
    },
    /// Repeated random train/test splits.
    Splits {
        #[command(flatten)]
        input: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[arg(long, default_value_t = 100)]
        n_splits: usize,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        train_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Training-set size sweep against fixed held-out test sets.
    SizeSweep {
        #[command(flatten)]
        input: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        report: ReportArgs,
        /// Comma-separated training-set sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Feature-count sweep on synthetic data.
    DimSweep {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        synthetic: SyntheticArgs,
        /// Comma-separated feature counts; defaults to 5, 10, ..., 75.
        #[arg(long, value_delimiter = ',')]
        counts: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
    },
    /// Write a synthetic dataset as CSV.
    Generate {
        #[command(flatten)]
        synthetic: SyntheticArgs,
        #[arg(long, default_value_t = 5)]
        n_features: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "time")]
    time_col: String,
    #[arg(long, default_value = "event")]
    event_col: String,
    /// Comma-separated feature columns, or "rest" for all other columns.
    #[arg(long, default_value = "rest")]
    feature_cols: String,
    /// "none" or "knn<k>", e.g. knn5.
    #[arg(long, default_value = "none", value_parser = parse_imputation)]
    impute: Imputation,
}

impl DataArgs {
    fn load(&self) -> Result<SurvivalDataset> {
        let features = if self.feature_cols == "rest" {
            FeatureColumns::Rest
        } else {
            FeatureColumns::Named(
                self.feature_cols
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .collect(),
            )
        };
        let schema = Schema {
            time_col: self.time_col.clone(),
            event_col: self.event_col.clone(),
            features,
        };
        let data = load_csv(&self.data, &schema)
            .with_context(|| format!("reading {}", self.data.display()))?;
        Ok(self.impute.apply(&data)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Standardized,
    Raw,
}

#[derive(Args)]
struct ModelArgs {
    /// Low-density cutoff for the class-contrast function.
    #[arg(long, default_value_t = 0.1)]
    density_cutoff: f64,
    #[arg(long, value_enum, default_value = "standardized")]
    cutoff_units: Units,
}

impl ModelArgs {
    fn config(&self) -> SmoothRankConfig {
        SmoothRankConfig {
            density_cutoff: self.density_cutoff,
            cutoff_units: match self.cutoff_units {
                Units::Standardized => CutoffUnits::Standardized,
                Units::Raw => CutoffUnits::Raw,
            },
            ..SmoothRankConfig::default()
        }
    }
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Args)]
struct SyntheticArgs {
    #[arg(long, default_value_t = 400)]
    n_records: usize,
    #[arg(long, default_value_t = 0.5)]
    censoring: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    risk_mean: f64,
    #[arg(long, default_value_t = 2.0)]
    risk_sd: f64,
}

impl SyntheticArgs {
    fn config(&self, n_features: usize) -> SyntheticConfig {
        SyntheticConfig {
            n_records: self.n_records,
            n_features,
            censoring_fraction: self.censoring,
            seed: self.seed,
            risk_source_mean: self.risk_mean,
            risk_source_sd: self.risk_sd,
        }
    }
}

fn parse_imputation(s: &str) -> Result<Imputation, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit(report: Report, args: &ReportArgs) -> Result<()> {
    write_output(args.out.as_deref(), &report.render(args.format)?)
}

fn score_csv(model: &SmoothRankModel, data: &SurvivalDataset) -> Result<String> {
    let mut out = String::from("row,time,event,score\n");
    for (i, r) in data.records().iter().enumerate() {
        let s = model.score(&r.covariates)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            r.time,
            u8::from(r.event),
            s
        ));
    }
    Ok(out)
}

fn eval_scores(path: &Path, score_col: &str, time_col: &str, event_col: &str) -> Result<String> {
    let mut rdr =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("column '{name}' not found"))
    };
    let (si, ti, ei) = (col(score_col)?, col(time_col)?, col(event_col)?);
    let mut scores = Vec::new();
    let mut targets = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse()
                .with_context(|| format!("row {}: '{}' is not a number", row + 1, &rec[i]))
        };
        let event = match rec[ei].trim() {
            "0" => false,
            "1" => true,
            other => bail!("row {}: event must be 0 or 1, got '{other}'", row + 1),
        };
        scores.push(num(si)?);
        targets.push((num(ti)?, event));
    }
    let counts = concordance_counts(&scores, &targets)?;
    let Some(ci) = counts.index() else {
        bail!("no comparable pairs");
    };
    Ok(format!(
        "ci,concordant,discordant,ties,comparable\n{ci:.6},{},{},{},{}\n",
        counts.concordant, counts.discordant, counts.ties, counts.comparable
    ))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { input, model, out } => {
            let data = input.load()?;
            let m = train(&data, &model.config())?;
            log::info!(
                "threshold {} ({} vs {}), {} of {} features kept",
                m.threshold_spec.threshold,
                m.class_sizes.0,
                m.class_sizes.1,
                m.surviving(),
                m.n_features()
            );
            write_output(out.as_deref(), &(m.to_json()? + "\n"))
        }
        Command::Score {
            model,
            data,
            time_col,
            event_col,
            impute,
            out,
        } => {
            let text = fs::read_to_string(&model)
                .with_context(|| format!("reading {}", model.display()))?;
            let m = SmoothRankModel::from_json(&text)?;
            let schema = Schema {
                time_col,
                event_col,
                features: FeatureColumns::Named(m.feature_names.clone()),
            };
            let ds = impute.apply(
                &load_csv(&data, &schema).with_context(|| format!("reading {}", data.display()))?,
            )?;
            write_output(out.as_deref(), &score_csv(&m, &ds)?)
        }
        Command::Eval {
            scores,
            score_col,
            time_col,
            event_col,
        } => {
            print!(
                "{}",
                eval_scores(&scores, &score_col, &time_col, &event_col)?
            );
            Ok(())
        }
        Command::Splits {
            input,
            model,
            report,
            n_splits,
            train_fraction,
            seed,
        } => {
            let data = input.load()?;
            let plan = SplitPlan {
                train_fraction,
                n_splits,
                seed,
            };
            let result = run_random_splits(&data, &plan, &model.config())?;
            eprintln!(
                "mean CI {:.4} over {} splits, {:.2} features kept on average",
                result.mean_ci,
                result.runs.len(),
                result.surviving_features_mean
            );
            emit(Report::Splits(result), &report)
        }
        Command::SizeSweep {
            input,
            model,
            report,
            sizes,
            draws,
            reps,
            test_fraction,
            seed,
        } => {
            let data = input.load()?;
            let plan = SizeSweepPlan {
                sizes,
                draws_per_size: draws,
                outer_reps: reps,
                test_fraction,
                seed,
            };
            let table = run_size_sweep(&data, &plan, &model.config())?;
            emit(Report::Sweep(table), &report)
        }
        Command::DimSweep {
            model,
            report,
            synthetic,
            counts,
            replicates,
        } => {
            let counts = if counts.is_empty() {
                default_feature_counts()
            } else {
                counts
            };
            let table = run_dimensionality_sweep(
                &synthetic.config(1),
                &counts,
                replicates,
                &model.config(),
            )?;
            emit(Report::Sweep(table), &report)
        }
        Command::Generate {
            synthetic,
            n_features,
            out,
        } => {
            let data = generate(&synthetic.config(n_features))?;
            match out {
                Some(path) => {
                    save_csv(&path, &data).with_context(|| format!("writing {}", path.display()))?
                }
                None => smooth_rank::data::write_csv(std::io::stdout().lock(), &data)?,
            }
            Ok(())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
