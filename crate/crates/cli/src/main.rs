use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use csod::harness::{run_experiment, summary_csv, ExperimentConfig};

/// Run LSMOP comparison experiments and write raw and summary IGD tables.
#[derive(Debug, Parser)]
#[command(name = "csod", version)]
struct Args {
    /// lsmop1..lsmop9, a comma-separated list, or `all`
    #[arg(long)]
    problem: Option<String>,
    /// 3, 6, 8, 10, a comma-separated list, or `all`
    #[arg(long)]
    objectives: Option<String>,
    /// moea-csod, nsga2, random, a comma-separated list, or `all`
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    /// Runs (seeds) per cell
    #[arg(long)]
    runs: Option<String>,
    /// Base seed; run r uses seed + r
    #[arg(long)]
    seed: Option<String>,
    /// APD penalty rate
    #[arg(long)]
    alpha: Option<String>,
    /// Output directory for raw.csv and summary.csv
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// Flat `key = value` config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the decision-space dimension for every objective count
    #[arg(long)]
    dims: Option<String>,
    /// Reference points sampled on the true front for IGD
    #[arg(long)]
    pf_points: Option<String>,
    /// Merge external raw CSV results (e.g. other algorithms) into the summary
    #[arg(long)]
    import: Vec<String>,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, &str)> {
        let flags: [(&'static str, &Option<String>); 11] = [
            ("problem", &self.problem),
            ("objectives", &self.objectives),
            ("algorithm", &self.algorithm),
            ("generations", &self.generations),
            ("runs", &self.runs),
            ("seed", &self.seed),
            ("alpha", &self.alpha),
            ("out", &self.out),
            ("workers", &self.workers),
            ("dims", &self.dims),
            ("pf-points", &self.pf_points),
        ];
        let mut out: Vec<(&'static str, &str)> = flags
            .into_iter()
            .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
            .collect();
        out.extend(self.import.iter().map(|p| ("import", p.as_str())));
        out
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| {
        let mut config = match &args.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        for (key, value) in args.overrides() {
            config.apply(key, value)?;
        }
        run_experiment(&config)
    })();
    match result {
        Ok(output) => {
            print!("{}", summary_csv(&output.summary));
            let failed = output.cells.iter().filter(|c| c.igd.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} run(s) failed; see errors.txt in the output directory");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
