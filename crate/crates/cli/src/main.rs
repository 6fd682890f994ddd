//! Command-line harness: single scenarios, parameter sweeps, ablation
//! batches, and solver verification against the exhaustive oracle.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellsim_core::batch::{run_batch, PolicyVariant};
use cellsim_core::config::ScenarioConfig;
use cellsim_core::metrics::BatchReport;
use cellsim_core::optim::{brute_force_oracle, solve, CostMatrix, StepSchedule};
use cellsim_core::output;
use cellsim_core::policy::{AblationFlags, PolicyKind};

#[derive(Parser)]
#[command(name = "cellsim", version, about = "Queue-aware small-cell association simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Scenario file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for the batch.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent runs per policy.
    #[arg(long)]
    runs: Option<usize>,
    /// Policy to evaluate (repeatable): max_rsrp, lhr, gsa, proposed.
    #[arg(long = "policy")]
    policies: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario for one or more policies.
    Run(CommonOpts),
    /// Vary a single scenario key over a list of values.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// One of: speed, rate_kbps, packet_size, n_users, n_cells,
        /// control_delay, reopt_period.
        #[arg(long)]
        key: String,
        /// Comma-separated values for the swept key.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Run the full framework and its single-component ablations (a1..a5).
    Ablate(CommonOpts),
    /// Compare the assignment solver with the exhaustive oracle on random
    /// small instances.
    OracleCheck {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // config/usage problems exit 1, runtime failures exit 2
            let msg = format!("{e:#}");
            if msg.contains("config error") || msg.contains("unknown policy") {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn load_config(opts: &CommonOpts) -> anyhow::Result<ScenarioConfig> {
    let mut cfg = match &opts.config {
        Some(path) => ScenarioConfig::from_path(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = opts.seed {
        cfg.scenario.seed = seed;
    }
    Ok(cfg)
}

fn parse_policies(opts: &CommonOpts, default_policy: PolicyKind) -> anyhow::Result<Vec<PolicyVariant>> {
    if opts.policies.is_empty() {
        return Ok(vec![PolicyVariant::plain(default_policy)]);
    }
    opts.policies
        .iter()
        .map(|s| Ok(PolicyVariant::plain(PolicyKind::parse(s)?)))
        .collect()
}

fn report_stdout(report: &BatchReport) {
    for row in &report.summary {
        println!(
            "{:<14} {:<16} mean {:>12.4}  ci95 ±{:.4}",
            row.policy_label, row.metric, row.mean, row.ci_halfwidth
        );
    }
    let wall: f64 = report.runs.iter().map(|r| r.measured_opt_ms + r.measured_lvq_ms).sum();
    if wall > 0.0 {
        println!("decision-layer measured time: {wall:.1} ms total across runs");
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run(opts) => {
            let cfg = load_config(&opts)?;
            let variants = parse_policies(&opts, cfg.control.policy)?;
            let n_runs = opts.runs.unwrap_or(1);
            let report = run_batch(&cfg, &variants, n_runs, cfg.scenario.seed)?;
            output::write_outputs(&report, &opts.out)?;
            report_stdout(&report);
            println!("outputs written to {}", opts.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { common, key, values } => {
            let cfg = load_config(&common)?;
            let variants = parse_policies(&common, cfg.control.policy)?;
            let n_runs = common.runs.unwrap_or(1);
            let mut combined = String::from("key,value,policy,metric,mean,ci_halfwidth\n");
            for &value in &values {
                let swept = apply_sweep(&cfg, &key, value)?;
                let report = run_batch(&swept, &variants, n_runs, swept.scenario.seed)?;
                let label = format_value(value);
                let dir = common.out.join(format!("{key}={label}"));
                output::write_outputs(&report, &dir)?;
                for row in &report.summary {
                    combined.push_str(&format!(
                        "{key},{label},{},{},{:.6},{:.6}\n",
                        row.policy_label, row.metric, row.mean, row.ci_halfwidth
                    ));
                }
                println!("== {key} = {label}");
                report_stdout(&report);
            }
            std::fs::create_dir_all(&common.out)?;
            std::fs::write(common.out.join("sweep_summary.csv"), combined)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ablate(opts) => {
            let cfg = load_config(&opts)?;
            let n_runs = opts.runs.unwrap_or(1);
            let variants: Vec<PolicyVariant> = ["full", "a1", "a2", "a3", "a4", "a5"]
                .iter()
                .map(|name| {
                    Ok(PolicyVariant {
                        policy: PolicyKind::Proposed,
                        ablation: AblationFlags::variant(name)?,
                    })
                })
                .collect::<anyhow::Result<_>>()?;
            let report = run_batch(&cfg, &variants, n_runs, cfg.scenario.seed)?;
            output::write_outputs(&report, &opts.out)?;
            report_stdout(&report);
            Ok(ExitCode::SUCCESS)
        }
        Command::OracleCheck { instances, seed } => oracle_check(instances, seed),
    }
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn apply_sweep(base: &ScenarioConfig, key: &str, value: f64) -> anyhow::Result<ScenarioConfig> {
    let mut cfg = base.clone();
    match key {
        "speed" => cfg.mobility.speed_max_mps = value,
        "rate_kbps" => cfg.traffic.rate_kbps = value,
        "packet_size" => cfg.traffic.packet_size_bytes = value as u32,
        "n_users" => cfg.scenario.n_users = value as usize,
        "n_cells" => cfg.scenario.n_cells = value as usize,
        "control_delay" => cfg.control.control_delay_intervals = value as usize,
        "reopt_period" => cfg.control.reopt_period = value as usize,
        other => anyhow::bail!("config error: unknown sweep key '{other}'"),
    }
    cfg.validate()?;
    Ok(cfg)
}

fn oracle_check(instances: usize, seed: u64) -> anyhow::Result<ExitCode> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut within = 0usize;
    let mut worst_ratio = 1.0f64;
    for _ in 0..instances {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(2..=3);
        let entries: Vec<Vec<f64>> =
            (0..m).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
        let costs = CostMatrix::new(entries, 0.3)?;
        let mut caps: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
        while caps.iter().sum::<usize>() < m {
            caps[rng.gen_range(0..n)] += 1;
        }
        let d = solve(&costs, &caps, 200, StepSchedule::default())?;
        let (_, oracle_obj) = brute_force_oracle(&costs, &caps)?;
        if d.objective < oracle_obj {
            anyhow::bail!("solver produced objective below the exhaustive minimum");
        }
        let ratio = if oracle_obj > 0.0 { d.objective / oracle_obj } else { 1.0 };
        worst_ratio = worst_ratio.max(ratio);
        if d.objective <= 1.05 * oracle_obj {
            within += 1;
        }
    }
    let frac = within as f64 / instances as f64;
    println!("oracle-check: {within}/{instances} within 5% (worst ratio {worst_ratio:.4})");
    if frac >= 0.95 {
        println!("oracle-check: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("oracle-check: FAIL ({:.1}% within 5%)", frac * 100.0);
        Ok(ExitCode::from(2))
    }
}
