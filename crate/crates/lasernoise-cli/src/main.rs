//! Command-line front end: steady states, parameter sweeps, figure data,
//! stochastic simulation and multimode statistics. Exit codes: 0 success,
//! 2 validation error, 3 numerical failure, 4 insufficient statistics.

mod commands;
mod config;
mod figures;
mod output;

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lasernoise_core::{DiffusionModel, Error, Result};

use commands::Ctx;
use config::{Config, SCHEMA_VERSION};
use output::{write_out, Format};

#[derive(Parser)]
#[command(name = "lasernoise", version, about = "Laser intensity-noise workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiffusionArg {
    Paper,
    Kinetic,
}

impl From<DiffusionArg> for DiffusionModel {
    fn from(d: DiffusionArg) -> DiffusionModel {
        match d {
            DiffusionArg::Paper => DiffusionModel::Paper,
            DiffusionArg::Kinetic => DiffusionModel::Kinetic,
        }
    }
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags override file values
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// output file (stdout when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// RNG seed (required for simulation)
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// fluctuation diffusion convention
    #[arg(long, value_enum)]
    diffusion: Option<DiffusionArg>,
    /// a timescale wins its regime when it exceeds this factor times the
    /// sum of the other two
    #[arg(long, value_name = "REAL")]
    dominance_factor: Option<f64>,
    /// output encoding
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Operating point, device class and regime for one configuration
    Steady(Common),
    /// Grid scan over device/pump axes with noise figures per point
    Sweep(Common),
    /// Data files for the published figures (2, 3, 4, 5, 6, 8)
    Figure {
        /// figure id; may also come from config.figure.id
        id: Option<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Stochastic trajectories plus an estimator report
    Simulate(Common),
    /// Photon distribution of M modes sharing N photons
    Multimode {
        modes: Option<u64>,
        photons: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Laser, noise and squeezing thresholds for a device
    Thresholds(Common),
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else if matches!(e, Error::StatisticalPower(_)) {
        4
    } else {
        3
    }
}

fn build_ctx(common: &Common, default_format: Format) -> Result<Ctx> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        },
    };
    if let Some(s) = common.seed {
        cfg.seed = Some(s);
    }
    if let Some(d) = common.diffusion {
        cfg.diffusion = Some(d.into());
    }
    if let Some(f) = common.dominance_factor {
        if !(f > 0.0) {
            return Err(Error::validation("dominance_factor", "must be > 0"));
        }
        cfg.dominance_factor = Some(f);
    }
    let model = cfg.diffusion.unwrap_or(DiffusionModel::Kinetic);
    let dominance = cfg.dominance_factor.unwrap_or(1.0);
    cfg.diffusion = Some(model);
    cfg.dominance_factor = Some(dominance);
    Ok(Ctx {
        cfg,
        model,
        dominance,
        format: common.format.unwrap_or(default_format),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Steady(common) => {
            let ctx = build_ctx(&common, Format::Json)?;
            write_out(common.out.as_deref(), &commands::steady(&ctx)?)
        }
        Cmd::Thresholds(common) => {
            let ctx = build_ctx(&common, Format::Json)?;
            write_out(common.out.as_deref(), &commands::thresholds(&ctx)?)
        }
        Cmd::Sweep(common) => {
            let ctx = build_ctx(&common, Format::Csv)?;
            write_out(common.out.as_deref(), &commands::sweep(&ctx)?)
        }
        Cmd::Figure { id, common } => {
            let ctx = build_ctx(&common, Format::Csv)?;
            write_out(common.out.as_deref(), &commands::figure(&ctx, id)?)
        }
        Cmd::Multimode {
            modes,
            photons,
            common,
        } => {
            let ctx = build_ctx(&common, Format::Csv)?;
            write_out(
                common.out.as_deref(),
                &commands::multimode_cmd(&ctx, modes, photons)?,
            )
        }
        Cmd::Simulate(common) => {
            let ctx = build_ctx(&common, Format::Json)?;
            if ctx.format != Format::Json {
                return Err(Error::validation(
                    "format",
                    "the simulation report is JSON; trajectory CSVs are written \
                     alongside --out",
                ));
            }
            let artifacts = commands::simulate(&ctx)?;
            // trajectory dumps only make sense next to a report file
            if let Some(out) = &common.out {
                let stem = out
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .ok_or_else(|| Error::validation("out", "need a file name"))?
                    .to_string();
                for (suffix, params, tr) in &artifacts.trajectories {
                    let path = out.with_file_name(format!("{stem}.{suffix}"));
                    let file = fs::File::create(&path).map_err(|e| {
                        Error::validation(
                            "out",
                            format!("cannot write {}: {e}", path.display()),
                        )
                    })?;
                    tr.write_csv(params, BufWriter::new(file))?;
                }
            }
            write_out(common.out.as_deref(), &artifacts.report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
