use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdecide_cli::{list_presets, run, CliError, RunConfig, ScenarioSource};
use qdecide_core::analysis::{DEFAULT_EPSILON, DEFAULT_TAIL_FRACTION};

#[derive(Parser)]
#[command(name = "qdecide", version, about = "Two-player fermionic decision dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one or more scenarios and write their trajectories.
    Run(RunArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in preset, e.g. fig1-left.
    #[arg(long, conflicts_with_all = ["scenario", "all_presets"])]
    preset: Option<String>,
    /// TOML scenario file.
    #[arg(long, conflicts_with = "all_presets")]
    scenario: Option<PathBuf>,
    /// Run every preset.
    #[arg(long)]
    all_presets: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Write the trajectory CSV (default).
    #[arg(long, overrides_with = "no_csv")]
    csv: bool,
    #[arg(long)]
    no_csv: bool,
    /// Write n1(t) and n2(t) SVG plots.
    #[arg(long)]
    svg: bool,
    /// Check the propagator against the finite-difference and closed-system oracles.
    #[arg(long)]
    oracle: bool,
    /// Write the law-of-total-probability residual.
    #[arg(long)]
    ltp: bool,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Decision window length; defaults to a tenth of t_max.
    #[arg(long)]
    window: Option<f64>,
    /// Fraction of the trajectory used for asymptotics.
    #[arg(long, default_value_t = DEFAULT_TAIL_FRACTION)]
    tail: f64,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let source = match (self.preset, self.scenario, self.all_presets) {
            (Some(name), None, false) => ScenarioSource::Preset(name),
            (None, Some(path), false) => ScenarioSource::File(path),
            (None, None, true) => ScenarioSource::AllPresets,
            _ => return Err(CliError::Config("give exactly one of --preset, --scenario, --all-presets".into())),
        };
        let mut cfg = RunConfig::new(source, self.out);
        cfg.emit_csv = !self.no_csv;
        cfg.emit_svg = self.svg;
        cfg.run_oracles = self.oracle;
        cfg.ltp_report = self.ltp;
        cfg.epsilon = self.epsilon;
        cfg.window = self.window;
        cfg.tail_fraction = self.tail;
        cfg.t_max = self.t_max;
        cfg.dt = self.dt;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            print!("{}", list_presets());
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let result = args.into_config().and_then(|cfg| run(&cfg));
            match result {
                Ok(reports) => {
                    for (i, r) in reports.iter().enumerate() {
                        if i > 0 {
                            println!();
                        }
                        print!("{}", r.to_text());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
