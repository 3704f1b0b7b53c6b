// Copyright 2026 The nvscalar Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{error, info};

use nvscalar::darkmatter::DEFAULT_ENSEMBLE_FACTOR;
use nvscalar::inference::{fit_relaxation, DecayRecord};
use nvscalar::mixer::{
    mixing_schedule, propagate_config, Band, DephasingModel, Frame, MixerDrive, MixingConfig,
    NoiseModel, PropagationOptions, SignalHypothesis,
};
use nvscalar::pipeline::{
    read_table, run_sweep, validate_config, write_rows_csv, ExclusionRow, Mode, PipelineError,
    SweepConfig, TableFormat,
};

#[derive(Parser)]
#[command(name = "nvscalar", version, about = "NV quantum-mixing limits on oscillating α and m_e")]
struct Cli {
    /// TOML sweep configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides sweep.master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when omitted.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliBand {
    Difference,
    Sum,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured frequency sweep.
    Sweep,
    /// Propagate a single mixing configuration (angular units, rad/s) and
    /// write the m_s = 0 population trace.
    Simulate {
        #[arg(long)]
        omega_spin: f64,
        #[arg(long)]
        omega_phi: f64,
        /// Drive frequency; scheduled from the band when omitted.
        #[arg(long)]
        omega1: Option<f64>,
        #[arg(long)]
        rabi: f64,
        #[arg(long, default_value_t = 0.0)]
        delta_s: f64,
        #[arg(long)]
        gamma1: f64,
        #[arg(long)]
        gamma2: f64,
        #[arg(long, value_enum, default_value_t = CliBand::Difference)]
        band: CliBand,
        #[arg(long)]
        duration: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Integrate in the frame rotating with the drive.
        #[arg(long)]
        rotating: bool,
        /// Markovian dephasing instead of spectral diffusion.
        #[arg(long)]
        lindblad: bool,
    },
    /// Fit a `t_s,counts,shots` relaxation record.
    Fit { record: PathBuf },
    /// Build the exclusion table from recorded signal/reference pairs.
    Limits {
        /// Directory with point_NNN_signal.csv and point_NNN_reference.csv.
        #[arg(long)]
        records_dir: Option<PathBuf>,
    },
    /// Recompute coupling columns of a table under the configured dark
    /// matter model.
    DmConvert { table: PathBuf },
    /// Append ensemble-projected rows to a table.
    Project {
        table: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE_FACTOR)]
        factor: f64,
    },
}

enum Failure {
    Fatal(String),
    Partial(usize),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::Fatal(e.to_string())
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Fatal(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn io_fail(e: io::Error) -> Failure {
    Failure::Fatal(format!("write failed: {e}"))
}

fn load_config(cli: &Cli) -> Result<SweepConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => validate_config(p).map_err(|e| Failure::Fatal(e.to_string()))?,
        None => SweepConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.sweep.master_seed = seed;
    }
    Ok(cfg)
}

fn workers(cli: &Cli) -> usize {
    cli.workers.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    })
}

fn sweep(cli: &Cli, cfg: SweepConfig) -> Result<(), Failure> {
    let table = run_sweep(&cfg, workers(cli))?;
    let out = open_output(cli.output.as_deref())?;
    table.write(out, cli.format.into()).map_err(io_fail)?;
    info!("{} rows, {} failed points", table.rows.len(), table.failures.len());
    for f in &table.failures {
        error!("point {} at {:.6e} Hz: {}", f.index, f.freq_hz, f.reason);
    }
    match table.failures.len() {
        0 => Ok(()),
        n => Err(Failure::Partial(n)),
    }
}

fn write_rows(cli: &Cli, rows: &[ExclusionRow]) -> Result<(), Failure> {
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => write_rows_csv(rows, out).map_err(io_fail),
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| io_fail(e.into()))?;
            writeln!(out).and_then(|_| out.flush()).map_err(io_fail)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Sweep => sweep(cli, load_config(cli)?),
        Command::Limits { records_dir } => {
            let mut cfg = load_config(cli)?;
            cfg.sweep.mode = Mode::Ingest;
            if let Some(d) = records_dir {
                cfg.sweep.records_dir = Some(d.clone());
            }
            sweep(cli, cfg)
        }
        Command::Simulate {
            omega_spin,
            omega_phi,
            omega1,
            rabi,
            delta_s,
            gamma1,
            gamma2,
            band,
            duration,
            samples,
            rotating,
            lindblad,
        } => {
            let band = match band {
                CliBand::Difference => Band::Difference,
                CliBand::Sum => Band::Sum,
            };
            let fail = |e: nvscalar::mixer::MixerError| Failure::Fatal(e.to_string());
            let omega1 = match omega1 {
                Some(w) => *w,
                None => mixing_schedule(*omega_phi, *omega_spin, band, *rabi).map_err(fail)?,
            };
            let cfg = MixingConfig {
                omega_spin: *omega_spin,
                drive: MixerDrive {
                    omega1,
                    rabi_omega1: *rabi,
                    band,
                },
                signal: SignalHypothesis {
                    omega_phi: *omega_phi,
                    delta_s: *delta_s,
                    phase: 0.0,
                },
                noise: NoiseModel {
                    gamma1: *gamma1,
                    gamma2: *gamma2,
                },
            };
            let mut opts = PropagationOptions::default();
            if *rotating {
                opts.frame = Frame::Rotating;
            }
            if *lindblad {
                opts.dephasing = DephasingModel::Lindblad;
            }
            let trace = propagate_config(&cfg, *duration, *samples, &opts).map_err(fail)?;
            if let (Ok(fit), Ok(analytic)) = (trace.fit_decay(), cfg.analytic_rate()) {
                info!(
                    "fitted excess rate {:.6e} s⁻¹, analytic {:.6e} s⁻¹",
                    fit.excess_rate, analytic.gamma_phi
                );
            }
            let out = open_output(cli.output.as_deref())?;
            trace.write_csv(out).map_err(io_fail)
        }
        Command::Fit { record } => {
            let file = File::open(record)
                .map_err(|e| Failure::Fatal(format!("{}: {e}", record.display())))?;
            let rec = DecayRecord::read_csv(BufReader::new(file))
                .map_err(|e| Failure::Fatal(format!("{}: {e}", record.display())))?;
            let est = fit_relaxation(&rec).map_err(|e| Failure::Fatal(e.to_string()))?;
            let per_dir = est.transition_rate();
            let value = serde_json::json!({
                "decay_constant": est.rate,
                "decay_constant_sigma": est.sigma,
                "transition_rate": per_dir.rate,
                "transition_rate_sigma": per_dir.sigma,
                "amplitude": est.fit_amplitude,
                "offset": est.fit_offset,
                "chi2_per_dof": est.chi2_per_dof,
            });
            let mut out = open_output(cli.output.as_deref())?;
            writeln!(out, "{value:#}").and_then(|_| out.flush()).map_err(io_fail)
        }
        Command::DmConvert { table } => {
            let cfg = load_config(cli)?;
            let rows = read_table(table)?
                .iter()
                .filter(|r| !r.projected)
                .map(|r| r.with_darkmatter(&cfg.darkmatter))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Fatal(e.to_string()))?;
            write_rows(cli, &rows)
        }
        Command::Project { table, factor } => {
            let mut rows: Vec<ExclusionRow> =
                read_table(table)?.into_iter().filter(|r| !r.projected).collect();
            let projected = rows
                .iter()
                .map(|r| r.projected(*factor))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Fatal(e.to_string()))?;
            rows.extend(projected);
            write_rows(cli, &rows)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            error!("{n} sweep points failed");
            ExitCode::from(2)
        }
        Err(Failure::Fatal(msg)) => {
            error!("{msg}");
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
