//! `poropml run | compare | presets`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use poropml::presets;
use poropml::runner;

#[derive(Parser)]
#[command(name = "poropml", version, about = "Biot poroelastodynamics with perfectly matched layers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML configuration.
    Run {
        config: PathBuf,
        /// Output directory, replacing `output_dir` from the configuration.
        #[arg(short, long, env = "POROPML_OUTPUT_DIR")]
        output: Option<PathBuf>,
    },
    /// Write per-point trace errors of a run against a reference run.
    Compare { run_dir: PathBuf, ref_dir: PathBuf },
    /// List or emit the shipped experiment presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    List,
    /// Write meshes and run configurations for a preset.
    Emit {
        name: String,
        /// Target directory (default: ./<name>).
        #[arg(short, long)]
        dir: Option<PathBuf>,
    },
}

fn fail(e: poropml::Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_input() { 2 } else { 3 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output } => match runner::run_file(&config, output.as_deref()) {
            Ok(s) => {
                println!(
                    "{}: {} dofs ({} constrained), {} steps of {} s, peak energy {:.6e} J/m, final {:.6e} J/m, {:.1} s",
                    s.formulation, s.total_dofs, s.constrained_dofs, s.steps, s.dt, s.peak_energy, s.final_energy, s.seconds
                );
                println!("wrote {} files to {}", s.files.len() + 1, s.output_dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Compare { run_dir, ref_dir } => match runner::compare(&run_dir, &ref_dir) {
            Ok(all) => {
                println!("{:<8} {:>12} {:>12} {:>12}", "point", "max e_u", "max e_w", "max e_p");
                for e in all {
                    let m = e.max();
                    println!("{:<8} {:>12.4e} {:>12.4e} {:>12.4e}", e.id, m[0], m[1], m[2]);
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(e),
        },
        Command::Presets { action: PresetAction::List } => {
            for name in presets::PRESETS {
                let p = presets::preset(name).unwrap();
                println!("{name:<10} {}", p.description);
            }
            ExitCode::SUCCESS
        }
        Command::Presets { action: PresetAction::Emit { name, dir } } => {
            let Some(p) = presets::preset(&name) else {
                eprintln!("error: unknown preset `{name}` (try `poropml presets list`)");
                return ExitCode::from(2);
            };
            let dir = dir.unwrap_or_else(|| PathBuf::from(&name));
            match p.emit(&dir) {
                Ok(files) => {
                    for f in files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
