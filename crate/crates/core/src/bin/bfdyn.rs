use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bfdyn::runner::{
    cmd_check, cmd_converge, cmd_evolve, cmd_spectrum, exit_code, inventory_listing, ExperimentConfig, Outcome,
    EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "bfdyn", version, about = "Tracer in a mean-field Bose gas: checks, evolutions, error curves, spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identity suite, propagator certification and conservation checks.
    Check {
        #[command(flatten)]
        common: Common,
        /// Print the identity inventory and exit.
        #[arg(long)]
        list: bool,
    },
    /// One evolution with observables on the time grid.
    Evolve(Common),
    /// Error curves against the boson number.
    Converge(Common),
    /// Bogoliubov spectrum against the dispersion relation.
    Spectrum(Common),
}

#[derive(Args)]
struct Common {
    /// Flat TOML config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Preset for both potentials.
    #[arg(long)]
    preset: Option<String>,
    /// Strength of both potentials.
    #[arg(long)]
    v0: Option<f64>,
    /// Coefficient table, as `pair=PATH` or `tracer=PATH`.
    #[arg(long, value_name = "KIND=PATH")]
    potential_file: Vec<String>,
    /// Any config key, as `key=value` with a TOML value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn split_pair(s: &str) -> bfdyn::Result<(&str, &str)> {
    s.split_once('=')
        .ok_or_else(|| bfdyn::Error::Config(format!("expected KEY=VALUE, got `{s}`")))
}

impl Common {
    fn config(&self) -> bfdyn::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = &self.preset {
            cfg.pair_potential = p.clone();
            cfg.tracer_potential = p.clone();
        }
        if let Some(v) = self.v0 {
            cfg.pair_strength = v;
            cfg.tracer_strength = v;
        }
        for f in &self.potential_file {
            match split_pair(f)? {
                ("pair", path) => cfg.pair_potential_file = Some(path.into()),
                ("tracer", path) => cfg.tracer_potential_file = Some(path.into()),
                (kind, _) => return Err(bfdyn::Error::Config(format!("unknown potential kind `{kind}`"))),
            }
        }
        for o in &self.overrides {
            let (k, v) = split_pair(o)?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }
}

fn run(command: Command) -> bfdyn::Result<Outcome> {
    match command {
        Command::Check { list: true, .. } => {
            print!("{}", inventory_listing());
            Ok(Outcome { passed: true })
        }
        Command::Check { common, .. } => cmd_check(&common.config()?),
        Command::Evolve(c) => cmd_evolve(&c.config()?),
        Command::Converge(c) => cmd_converge(&c.config()?),
        Command::Spectrum(c) => cmd_spectrum(&c.config()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = run(cli.command);
    match &result {
        Ok(o) if o.passed => eprintln!("ok"),
        Ok(_) => eprintln!("scientific check failed; see records.jsonl"),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
