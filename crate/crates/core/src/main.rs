use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use emolag::econ::{LagRule, LagSelection, PairwiseOptions};
use emolag::pipeline::{self, Overrides, PipelineError, RunConfig};
use emolag::series::{AggregationMode, GapPolicy};

#[derive(Parser)]
#[command(
    version,
    about = "Emotion time series from bulletins and tweets, with ADF and Granger tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the raw corpora into the normalized document store.
    Ingest(ConfigArgs),
    /// Score, aggregate and test the stored documents; write all tables.
    Analyze(ConfigArgs),
    /// Unit-root tests on series CSV files.
    Adf {
        #[arg(required = true)]
        series: Vec<PathBuf>,
        #[arg(long)]
        region: Option<String>,
        /// Fixed augmentation lag; min-AIC selection when absent.
        #[arg(long)]
        lag: Option<usize>,
        #[arg(long, default_value_t = 4)]
        max_lag: usize,
        #[arg(long)]
        csv: bool,
    },
    /// Pairwise Granger tests on series CSV files.
    Granger {
        #[arg(required = true)]
        series: Vec<PathBuf>,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, default_value_t = 4)]
        max_lag: usize,
        #[arg(long, value_parser = parse_lag_selection, default_value = "own_lags")]
        lag_selection: LagSelection,
        #[arg(long)]
        csv: bool,
    },
    /// Word frequency and polarity of the stored tweets.
    Chatterplot {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        top_n: Option<usize>,
        /// Words to leave out; repeatable.
        #[arg(long)]
        exclude: Vec<String>,
    },
    /// Document counts per region of the stored corpus.
    Stats {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(short, long)]
    config: PathBuf,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    start: Option<NaiveDate>,
    #[arg(long)]
    end: Option<NaiveDate>,
    #[arg(long)]
    region: Option<String>,
    #[arg(long)]
    aggregation: Option<AggregationMode>,
    #[arg(long)]
    gap_policy: Option<GapPolicy>,
    #[arg(long)]
    adf_max_lag: Option<usize>,
    #[arg(long)]
    granger_max_lag: Option<usize>,
    #[arg(long, value_parser = parse_lag_selection)]
    lag_selection: Option<LagSelection>,
    /// Keep tweets found by both the content and location streams twice.
    #[arg(long)]
    keep_duplicates: bool,
}

fn parse_lag_selection(s: &str) -> Result<LagSelection, String> {
    match s {
        "own_lags" | "own" => Ok(LagSelection::OwnLags),
        "joint" => Ok(LagSelection::Joint),
        other => Err(format!("unknown lag selection `{other}` (own_lags, joint)")),
    }
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, PipelineError> {
        let mut cfg = RunConfig::load(&self.config)?;
        cfg.apply(&Overrides {
            output_dir: self.output_dir.clone(),
            start: self.start,
            end: self.end,
            region: self.region.clone(),
            aggregation: self.aggregation,
            gap_policy: self.gap_policy,
            adf_max_lag: self.adf_max_lag,
            granger_max_lag: self.granger_max_lag,
            lag_selection: self.lag_selection,
            keep_duplicates: self.keep_duplicates,
        });
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Ingest(args) => {
            let s = pipeline::cmd_ingest(&args.load()?)?;
            println!(
                "{} documents ({} skipped) -> {}",
                s.documents,
                s.skipped,
                s.store_dir.display()
            );
        }
        Command::Analyze(args) => {
            let s = pipeline::cmd_analyze(&args.load()?)?;
            println!("{} files -> {}", s.files.len(), s.analysis_dir.display());
        }
        Command::Adf {
            series,
            region,
            lag,
            max_lag,
            csv,
        } => {
            let rule = lag.map_or(LagRule::MinAic { max_lag }, LagRule::Fixed);
            let t = pipeline::cmd_adf(&series, region.as_deref(), rule)?;
            print!("{}", if csv { t.csv } else { t.text });
        }
        Command::Granger {
            series,
            region,
            max_lag,
            lag_selection,
            csv,
        } => {
            let opts = PairwiseOptions {
                max_p: max_lag,
                lag_selection,
            };
            let t = pipeline::cmd_granger(&series, region.as_deref(), &opts)?;
            print!("{}", if csv { t.csv } else { t.text });
        }
        Command::Chatterplot {
            config,
            top_n,
            exclude,
        } => {
            let mut cfg = config.load()?;
            if let Some(n) = top_n {
                cfg.analysis.chatterplot_top_n = n;
            }
            if !exclude.is_empty() {
                cfg.analysis.chatterplot_exclude = exclude;
            }
            print!("{}", pipeline::cmd_chatterplot(&cfg)?);
        }
        Command::Stats { config, csv } => {
            let t = pipeline::cmd_stats(&config.load()?)?;
            print!("{}", if csv { t.csv } else { t.text });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
