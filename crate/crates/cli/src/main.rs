use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bamdp_cli::harness::{default_horizon, AgentKind, ArmMeans, ExperimentConfig};
use bamdp_cli::{report, run_experiment, HarnessError};
use bamdp_core::ExpansionStrategy;
use clap::Parser;

/// Cumulative-regret experiments on Bernoulli bandits.
#[derive(Debug, Parser)]
#[command(name = "bamdp", version)]
struct Args {
    /// Number of arms (defaults to the length of --means, else 2).
    #[arg(long)]
    arms: Option<usize>,
    /// Discount factor used by the planners.
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    /// Steps per run [default: ceil(2 / (1 - gamma))].
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Agents to evaluate: bamdp, ucb, base.
    #[arg(long, value_delimiter = ',', default_value = "bamdp,ucb,base")]
    agent: Vec<AgentKind>,
    /// Expansion strategies for the bamdp agent: serial, random, lower, thompson, upper.
    #[arg(long, value_delimiter = ',', default_value = "upper")]
    strategy: Vec<ExpansionStrategy>,
    /// Expansion budgets per decision for the bamdp agent.
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    lookaheads: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    prior_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    prior_beta: f64,
    /// Fixed arm means; drawn uniformly per run when omitted.
    #[arg(long, value_delimiter = ',')]
    means: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-step regret curves.
    #[arg(long, default_value = "regret.csv")]
    out: PathBuf,
    /// Final regret per configuration [default: <out stem>_final.csv].
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

impl Args {
    fn config(&self) -> ExperimentConfig {
        let n_arms = self
            .arms
            .or_else(|| self.means.as_ref().map(Vec::len))
            .unwrap_or(2);
        ExperimentConfig {
            n_arms,
            gamma: self.gamma,
            horizon: self.horizon.unwrap_or_else(|| default_horizon(self.gamma)),
            n_runs: self.runs,
            lookaheads: self.lookaheads.clone(),
            strategies: self.strategy.clone(),
            agents: self.agent.clone(),
            prior_alpha: self.prior_alpha,
            prior_beta: self.prior_beta,
            arm_means: self
                .means
                .clone()
                .map_or(ArmMeans::UniformPerRun, ArmMeans::Explicit),
            seed: self.seed,
        }
    }

    fn summary_path(&self) -> PathBuf {
        self.summary_out.clone().unwrap_or_else(|| summary_beside(&self.out))
    }
}

fn summary_beside(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map_or_else(|| "regret".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_final.csv"))
}

fn run(args: &Args) -> Result<(), HarnessError> {
    if !(0.0..1.0).contains(&args.gamma) {
        return Err(HarnessError::Config(format!(
            "gamma {} outside [0, 1)",
            args.gamma
        )));
    }
    let config = args.config();
    config.validate()?;
    let result = run_experiment(&config)?;

    report::write_curves(BufWriter::new(File::create(&args.out)?), &result.curves)?;
    let finals = result.finals();
    report::write_finals(BufWriter::new(File::create(args.summary_path())?), &finals)?;

    for f in &finals {
        let strategy = f.strategy.map_or("-", ExpansionStrategy::name);
        println!(
            "{:<6} {:<9} N={:<4} final regret {:.4} ± {:.4}",
            f.agent.name(),
            strategy,
            f.lookaheads,
            f.final_mean_regret,
            f.stderr
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
