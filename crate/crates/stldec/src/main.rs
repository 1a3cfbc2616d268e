use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stldec::harness::export::{
    csv_string, export_csv, export_episodes_json, export_trajectory_svg, load_episodes_json,
};
use stldec::harness::{
    run_benchmark, run_beta_sweep, run_noise_ablation, BenchmarkConfig, EpisodeResult,
    HarnessError,
};
use stldec::scene::generate_scene;

#[derive(Parser)]
#[command(
    name = "stldec",
    version,
    about = "Benchmark harness for temporal-logic-shielded action decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the strategy-by-spec benchmark; writes metrics.csv and episodes.json.
    Run {
        /// Benchmark config as JSON; an empty object selects every default.
        #[arg(long)]
        config: PathBuf,
        /// Output directory, created if missing.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare exact vs noise-perturbed execution for the shielded
    /// strategies (the config must list hcd/rcd only).
    AblateNoise {
        #[arg(long)]
        config: PathBuf,
        /// Per-step translational noise sigma in meters.
        #[arg(long, default_value_t = 0.01)]
        sigma_t: f64,
        /// Per-step yaw noise sigma in degrees.
        #[arg(long, default_value_t = 1.0)]
        sigma_yaw: f64,
        /// Optional output directory for the paired CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the RCD constraint weight beta at fixed alpha.
    SweepBeta {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 1.0, 5.0, 10.0, 50.0])]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Redraw the trajectories of one scene from an episodes.json archive.
    Plot {
        #[arg(long)]
        episodes: PathBuf,
        #[arg(long)]
        scene_seed: u64,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<BenchmarkConfig, HarnessError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn run_command(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let report = run_benchmark(&cfg)?;
            std::fs::create_dir_all(&out)?;
            export_csv(&out.join("metrics.csv"), &report.rows)?;
            export_episodes_json(&out.join("episodes.json"), &report)?;
            print!("{}", csv_string(&report.rows));
        }
        Command::AblateNoise { config, sigma_t, sigma_yaw, out } => {
            let cfg = load_config(&config)?;
            let ablation = run_noise_ablation(&cfg, sigma_t, sigma_yaw.to_radians())?;
            println!("# exact");
            print!("{}", csv_string(&ablation.exact.rows));
            println!("# noisy (sigma_t={} m, sigma_yaw={} deg)", sigma_t, sigma_yaw);
            print!("{}", csv_string(&ablation.noisy.rows));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                export_csv(&dir.join("ablation_exact.csv"), &ablation.exact.rows)?;
                export_csv(&dir.join("ablation_noisy.csv"), &ablation.noisy.rows)?;
            }
        }
        Command::SweepBeta { config, betas, alpha, out } => {
            let cfg = load_config(&config)?;
            let rows = run_beta_sweep(&cfg, alpha, &betas)?;
            print!("{}", csv_string(&rows));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                export_csv(&dir.join("beta_sweep.csv"), &rows)?;
            }
        }
        Command::Plot { episodes, scene_seed, out } => {
            let report = load_episodes_json(&episodes)?;
            let scene = generate_scene(&report.config.scene, scene_seed)?;
            let picked: Vec<&EpisodeResult> = report
                .episodes
                .iter()
                .filter(|e| e.scene_seed == scene_seed)
                .collect();
            if picked.is_empty() {
                return Err(HarnessError::Config(format!(
                    "archive has no episodes for scene seed {}",
                    scene_seed
                )));
            }
            export_trajectory_svg(&out, &scene, &picked)?;
            println!("wrote {} with {} trajectories", out.display(), picked.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run_command(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
