use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ritherm_cli::config::{InversionKind, InversionSection};
use ritherm_cli::output::{write_report, write_rows, Format};
use ritherm_cli::{
    check_one_way, evaluate, presets, run_ri_convergence, run_sweep, CliError, CliResult, Config,
};
use ritherm_cli::{EvalOptions, Inversion};

#[derive(Parser)]
#[command(
    name = "ritherm",
    version,
    about = "Boundary-driven spin chain steady states, currents and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file (layered over --preset if both are given)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named scenario, see `ritherm presets list`
    #[arg(long)]
    preset: Option<String>,
    /// Output file; stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for grid evaluation
    #[arg(long)]
    jobs: Option<usize>,
    /// Invariance tolerance (check-one-way) or fixed-point tolerance (ri-converge)
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state and currents at a single point
    Steady(Common),
    /// Currents over the [sweep] grid
    Sweep(Common),
    /// Compare currents before and after the [inversion] remap
    CheckOneWay {
        #[command(flatten)]
        common: Common,
        /// Override the configured inversion
        #[arg(long, value_parser = ["identity", "flip_f", "flip_h"])]
        inversion: Option<String>,
    },
    /// RI fixed points for the [ri] taus against the master equation
    RiConverge(Common),
    /// Preset scenarios
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Names and parameters of the built-in presets
    List,
    /// Print a preset's TOML
    Show { name: String },
}

fn load(c: &Common) -> CliResult<Config> {
    let file = c.config.as_deref().map(Config::load).transpose()?;
    presets::load(c.preset.as_deref(), file.as_ref())
}

fn sink(c: &Common) -> CliResult<Box<dyn Write>> {
    Ok(match &c.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn pool(c: &Common) -> CliResult<()> {
    if let Some(n) = c.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = EvalOptions::default();
    match cli.command {
        Command::Steady(c) => {
            let cfg = load(&c)?;
            let sc = cfg.point().scenario()?;
            let param = cfg
                .sweep
                .as_ref()
                .map(|s| s.parameter.name())
                .unwrap_or("point");
            let value = cfg.sweep.as_ref().map(|s| s.from).unwrap_or(0.0);
            let row = evaluate(&sc, value, &opts);
            write_rows(sink(&c)?, c.format, param, std::slice::from_ref(&row))?;
            if row.nullspace_dim.is_none() {
                return Err(CliError::Point(row.error.unwrap_or_default()));
            }
            if let Some(e) = row.error {
                eprintln!("warning: {e}");
            }
        }
        Command::Sweep(c) => {
            pool(&c)?;
            let cfg = load(&c)?;
            let res = run_sweep(&cfg, &opts)?;
            let failed = res.rows.iter().filter(|r| !r.is_ok()).count();
            let out = match (&c.out, cfg.sweep.as_ref().and_then(|s| s.output.as_ref())) {
                (None, Some(path)) => Common {
                    out: Some(path.into()),
                    ..c.clone()
                },
                _ => c.clone(),
            };
            write_rows(sink(&out)?, c.format, res.parameter.name(), &res.rows)?;
            if failed > 0 {
                eprintln!(
                    "{failed} of {} points reported errors (see the error column)",
                    res.rows.len()
                );
            }
        }
        Command::CheckOneWay {
            common: c,
            inversion,
        } => {
            pool(&c)?;
            let cfg = load(&c)?;
            let inv = match inversion.as_deref() {
                Some(k) => {
                    let kind = match k {
                        "identity" => InversionKind::Identity,
                        "flip_f" => InversionKind::FlipF,
                        _ => InversionKind::FlipH,
                    };
                    Inversion::from_section(&InversionSection {
                        kind,
                        kappa_l: None,
                        kappa_r: None,
                        beta_l_scale: None,
                        h_l_scale: None,
                        beta_r_scale: None,
                        h_r_scale: None,
                    })?
                }
                None => Inversion::from_section(
                    cfg.inversion
                        .as_ref()
                        .ok_or_else(|| CliError::Config("missing [inversion] section".into()))?,
                )?,
            };
            let rep = check_one_way(&cfg, &inv, c.tol.unwrap_or(1e-10), &opts)?;
            write_report(sink(&c)?, &rep)?;
            if !rep.pass {
                return Err(CliError::Check(format!(
                    "max |dF| = {:e} > {:e}",
                    rep.max_df, rep.tol
                )));
            }
        }
        Command::RiConverge(c) => {
            pool(&c)?;
            let cfg = load(&c)?;
            let rep = run_ri_convergence(&cfg, c.tol, &opts)?;
            write_report(sink(&c)?, &rep)?;
            if !rep.strictly_decreasing {
                return Err(CliError::Check(
                    "fixed-point errors are not strictly decreasing in tau".into(),
                ));
            }
        }
        Command::Presets {
            action: PresetAction::List,
        } => {
            let mut out = io::stdout().lock();
            for p in presets::PRESETS {
                let extra = if p.user_supplied.is_empty() {
                    String::new()
                } else {
                    let keys: Vec<_> = p
                        .user_supplied
                        .iter()
                        .map(|(s, k)| format!("[{s}] {k}"))
                        .collect();
                    format!(" (requires {})", keys.join(", "))
                };
                writeln!(out, "{:<16} {}{}", p.name, p.summary, extra)?;
            }
        }
        Command::Presets {
            action: PresetAction::Show { name },
        } => {
            print!("{}", presets::find(&name)?.toml.trim_start());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
