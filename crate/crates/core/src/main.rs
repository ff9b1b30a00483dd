use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hallmhd::decay::exponents::bootstrap_exponent;
use hallmhd::gevrey::GevreyParams;
use hallmhd::harness::acceptance::run_acceptance;
use hallmhd::harness::commands;
use hallmhd::harness::{run, ExperimentConfig, Profile};
use hallmhd::Result;

#[derive(Parser)]
#[command(name = "hallmhd", version, about = "Decay experiments for viscous resistive Hall-MHD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset used when no configuration file is given.
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => {
                let profile: Profile = self.profile.parse()?;
                ExperimentConfig::profile(profile, format!("runs/{}", self.profile))
            }
        };
        if let Some(o) = &self.output {
            c.output_dir = o.clone();
        }
        if let Some(s) = self.seed {
            c.init.seed = s;
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its output directory.
    Simulate(ConfigArgs),
    /// Difference to the heat flow at every saved state of a run.
    HeatCompare {
        #[arg(long)]
        output: PathBuf,
    },
    /// Gevrey norms at every saved state of a run.
    GevreyTrack {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2.75)]
        r: f64,
        #[arg(long, default_value_t = 0.5)]
        tau0: f64,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
    },
    /// Power-law fit of one CSV column against time.
    DecayFit {
        /// CSV whose first column is time.
        #[arg(long)]
        input: PathBuf,
        /// Column header; defaults to the energy or difference series.
        #[arg(long)]
        column: Option<String>,
        #[arg(long, num_args = 2, value_names = ["T_LO", "T_HI"])]
        window: Vec<f64>,
        /// Also try the model with a `1 + ln²(t+1)` factor.
        #[arg(long)]
        log: bool,
    },
    /// Trace of the energy-exponent bootstrap.
    Bootstrap {
        #[arg(long)]
        alpha: f64,
    },
    /// Moment matrices of a run from its saved integrands.
    Moments {
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the acceptance suite and print one line per criterion.
    Acceptance(ConfigArgs),
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Simulate(args) => {
            let config = args.resolve()?;
            let out = run(&config)?;
            println!("wrote {} ({} steps)", out.dir.display(), out.manifest.steps);
            for p in &out.report.problems {
                println!("note: {p}");
            }
        }
        Command::HeatCompare { output } => {
            for row in commands::heat_compare(&output)? {
                println!("t = {:<10} D = {:.6e}", row[0], row[1]);
            }
        }
        Command::GevreyTrack { output, r, tau0, alpha } => {
            let params = GevreyParams {
                r,
                tau0,
                alpha_tau: alpha,
                ..GevreyParams::default()
            };
            for row in commands::gevrey_track(&output, params)? {
                println!("t = {:<10} tau = {:.4} M_r = {:.6e}", row[0], row[1], row[7]);
            }
        }
        Command::DecayFit {
            input,
            column,
            window,
            log,
        } => {
            let column = match column {
                Some(c) => c,
                None => commands::default_fit_column(&input)?,
            };
            let window = match window.as_slice() {
                [a, b] => (*a, *b),
                _ => (1.0, f64::INFINITY),
            };
            let f = commands::decay_fit(&input, &column, window, log)?;
            println!("{column}");
            println!(
                "exponent {} prefactor {} residual {} samples {} log {}",
                f.exponent, f.prefactor, f.residual, f.samples, f.log_correction
            );
        }
        Command::Bootstrap { alpha } => {
            println!("{}", bootstrap_exponent(alpha)?);
        }
        Command::Moments { output } => {
            let (mm, mem) = commands::moments(&output)?;
            println!("A_tilde symmetry defect {:.3e}", mm.symmetry_defect());
            println!("C_tilde antisymmetry defect {:.3e}", mm.antisymmetry_defect());
            println!(
                "M0 scalar defect {:.4} ± {:.4}, C defect {:.4} ± {:.4}, member {}",
                mem.scalar_defect, mem.scalar_error, mem.c_defect, mem.c_error, mem.is_member
            );
        }
        Command::Acceptance(args) => {
            let config = args.resolve()?;
            let results = run_acceptance(&config);
            for r in &results {
                println!("{r}");
            }
            let passed = results.iter().filter(|r| r.passed).count();
            println!("{passed}/{} criteria passed", results.len());
            return Ok(passed == results.len());
        }
    }
    Ok(true)
}
