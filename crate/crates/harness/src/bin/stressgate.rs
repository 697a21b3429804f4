use std::error::Error;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use stressgate_control::interpret::{HttpLlmClient, LlmClient};
use stressgate_control::Condition;
use stressgate_core::benchmarks::{
    builtin_problem, calibrate_sigma_yield, IDS_2D, REFERENCE_SIGMA_YIELD, REFERENCE_SIGMA_YIELD_FIXED_VOLUME,
};
use stressgate_core::evaluator::{evaluate, SolverStats};
use stressgate_core::render::{render_density_png, render_stress_png};
use stressgate_core::stress::{element_stresses, StressOptions};
use stressgate_core::{simp_solve, ProblemSpec};
use stressgate_harness::export::{self, LOCALIZATION_FILE, RATIO_FILE, SENSITIVITY_FILE, SUMMARY_FILE};
use stressgate_harness::score::pairs;
use stressgate_harness::sensitivity::SWEEP_QS;
use stressgate_harness::{
    feasibility_score, localization_metrics, parse_ids, run_matrix, sensitivity_sweep, slot_counts,
    wilcoxon_signed_rank, Endpoint, MatrixConfig,
};

#[derive(Parser)]
#[command(name = "stressgate", version, about = "Stress-gated topology optimization runs and scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem spec and evaluate the gates.
    Solve {
        spec: PathBuf,
        #[arg(long)]
        vf: Option<f64>,
        #[arg(long, default_value_t = REFERENCE_SIGMA_YIELD)]
        sigma_yield: f64,
        /// Directory for density.png and stress.png.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the outer loop over a condition × problem × seed matrix.
    Run {
        #[arg(long, value_delimiter = ',', required = true)]
        condition: Vec<Condition>,
        #[arg(long, default_value = "1..22")]
        problems: String,
        #[arg(long, value_delimiter = ',', default_value = "42,123,7")]
        seeds: Vec<u64>,
        #[arg(long)]
        fixed_volume: bool,
        #[arg(long, conflicts_with = "calibrate")]
        sigma_yield: Option<f64>,
        /// Calibrate σ_yield at this percentile of the 2D designs.
        #[arg(long)]
        calibrate: Option<f64>,
        #[arg(long, default_value_t = stressgate_control::run::DEFAULT_T_MAX)]
        t_max: usize,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Print the percentile threshold of the compliance-only designs.
    Calibrate {
        #[arg(long, default_value_t = 50.0)]
        q: f64,
        #[arg(long, default_value = "1..16")]
        problems: String,
    },
    /// Paired endpoint report against a baseline condition.
    Score {
        #[arg(long, default_value = "runs/summaries.csv")]
        summaries: PathBuf,
        #[arg(long, default_value = "rule")]
        baseline: String,
        #[arg(long, value_delimiter = ',', default_value = "feas,final_feas,any")]
        endpoints: Vec<Endpoint>,
    },
    /// Paired significance tests on one endpoint.
    Stats {
        #[arg(long, required = true)]
        wilcoxon: bool,
        #[arg(long, default_value = "runs/summaries.csv")]
        summaries: PathBuf,
        #[arg(long)]
        condition: String,
        #[arg(long, default_value = "rule")]
        baseline: String,
        #[arg(long, default_value = "any")]
        endpoint: Endpoint,
    },
    /// Write figure-data CSVs from a run directory.
    ExportFigures {
        #[arg(long, default_value = "runs")]
        runs: PathBuf,
        #[arg(long, default_value = "rule")]
        baseline: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gate-pass counts across calibration percentiles.
    Sensitivity {
        #[arg(long, value_delimiter = ',', default_value = "rule")]
        condition: Vec<Condition>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        qs: Vec<f64>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Print a built-in problem as JSON.
    ShowProblem { id: u32 },
}

fn client_for(conditions: &[Condition]) -> Result<Option<Arc<dyn LlmClient>>, Box<dyn Error>> {
    if conditions.iter().any(|c| c.uses_llm()) {
        Ok(Some(Arc::new(HttpLlmClient::from_env()?)))
    } else {
        Ok(None)
    }
}

fn print(text: &str) -> Result<(), Box<dyn Error>> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<(), Box<dyn Error>> {
    print(&serde_json::to_string_pretty(value)?)
}

fn solve(path: &Path, vf: Option<f64>, sigma_yield: f64, out: Option<&Path>) -> Result<(), Box<dyn Error>> {
    let mut spec = ProblemSpec::from_json(&std::fs::read_to_string(path)?)?;
    if let Some(vf) = vf {
        spec.vf = vf;
    }
    spec.validate()?;
    let result = simp_solve::<f64>(&spec)?;
    let rho = &result.density.values;
    let options = StressOptions { poisson: spec.solver.poisson, ..StressOptions::default() };
    let stress = element_stresses(&spec.mesh, &result.displacement, rho, &options)?;
    let stats = SolverStats {
        c_final: result.compliance,
        c_rep: result.compliance,
        total_iterations: result.iterations,
        n_max: result.max_iter,
    };
    let evaluation = evaluate(rho, &stress.von_mises, &spec, sigma_yield, &stats)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("density.png"), render_density_png(&spec.mesh, rho)?)?;
        std::fs::write(dir.join("stress.png"), render_stress_png(&spec.mesh, &stress.von_mises, rho)?)?;
    }
    print_json(&serde_json::json!({
        "compliance": result.compliance,
        "iterations": result.iterations,
        "status": result.status,
        "evaluation": evaluation,
    }))
}

fn run(cli: Cli) -> Result<(), Box<dyn Error>> {
    match cli.command {
        Command::Solve { spec, vf, sigma_yield, out } => solve(&spec, vf, sigma_yield, out.as_deref())?,
        Command::Run { condition, problems, seeds, fixed_volume, sigma_yield, calibrate, t_max, out } => {
            let sigma_yield = match (sigma_yield, calibrate) {
                (Some(s), _) => s,
                (None, Some(q)) => calibrate_sigma_yield(&IDS_2D.collect::<Vec<_>>(), q)?,
                (None, None) if fixed_volume => REFERENCE_SIGMA_YIELD_FIXED_VOLUME,
                (None, None) => REFERENCE_SIGMA_YIELD,
            };
            let config = MatrixConfig {
                fixed_volume,
                sigma_yield,
                t_max,
                client: client_for(&condition)?,
                ..MatrixConfig::new(condition.clone(), parse_ids(&problems)?, seeds)
            };
            let results = run_matrix(&config);
            for r in &results {
                if let Some(output) = &r.output {
                    export::write_run(&out, output)?;
                }
            }
            let summaries: Vec<_> = results.into_iter().map(|r| r.summary).collect();
            export::write_summaries(&out.join(SUMMARY_FILE), &summaries)?;
            eprintln!("sigma_yield {sigma_yield}");
            for c in &condition {
                let n = slot_counts(&summaries, c.name());
                eprintln!(
                    "{c}: attempted {} completed {} missing {} feasible {}",
                    n.attempted, n.completed, n.missing, n.feasible
                );
            }
        }
        Command::Calibrate { q, problems } => {
            print(&calibrate_sigma_yield(&parse_ids(&problems)?, q)?.to_string())?;
        }
        Command::Score { summaries, baseline, endpoints } => {
            let summaries = export::read_summaries(&summaries)?;
            print_json(&feasibility_score(&summaries, &baseline, &endpoints))?;
        }
        Command::Stats { wilcoxon: _, summaries, condition, baseline, endpoint } => {
            let summaries = export::read_summaries(&summaries)?;
            let (x, y): (Vec<f64>, Vec<f64>) =
                pairs(&summaries, &condition, &baseline, endpoint).iter().filter_map(|p| p.complete()).unzip();
            print_json(&wilcoxon_signed_rank(&x, &y)?)?;
        }
        Command::ExportFigures { runs, baseline, out } => {
            let out = out.unwrap_or_else(|| runs.join("figures"));
            let summaries = export::read_summaries(&runs.join(SUMMARY_FILE))?;
            export::write_ratios(&out.join(RATIO_FILE), &feasibility_score(&summaries, &baseline, &Endpoint::ALL))?;
            let records: Vec<_> = export::read_traces(&runs)?.iter().flat_map(localization_metrics).collect();
            export::write_localization(&out.join(LOCALIZATION_FILE), &records)?;
        }
        Command::Sensitivity { condition, seed, qs, out } => {
            let qs = if qs.is_empty() { SWEEP_QS.to_vec() } else { qs };
            let config = MatrixConfig {
                client: client_for(&condition)?,
                ..MatrixConfig::new(condition, IDS_2D.collect(), vec![seed])
            };
            let points = sensitivity_sweep(&config, &qs)?;
            export::write_sensitivity(&out.join(SENSITIVITY_FILE), &points)?;
            print_json(&points)?;
        }
        Command::ShowProblem { id } => print(&builtin_problem(id)?.to_json())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
