use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use treestep::harness::{render, DEFAULT_PARAM_GRID};
use treestep::{
    emit_results, run_param_study, run_sweep, verify_suite, BerRecord, OutputFormat, PrecoderTag,
    SweepConfig, TreeStepParams,
};

#[derive(Debug, Parser)]
#[command(name = "treestep", version, about = "Vector perturbation precoding BER simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BER against SNR for a set of precoders.
    Sweep(SimArgs),
    /// TreeStep BER for several (L, V, K) tuples at one SNR.
    ParamStudy {
        #[command(flatten)]
        sim: SimArgs,
        /// Semicolon-separated L,V,K tuples, e.g. "1,1,0;2,1,0".
        #[arg(long)]
        grid: Option<String>,
    },
    /// Run the built-in invariant checks.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct SimArgs {
    #[arg(long, default_value_t = 8)]
    nt: usize,
    #[arg(long, default_value_t = 8)]
    nu: usize,
    #[arg(long = "mod", default_value_t = 4)]
    mod_order: usize,
    /// start:step:stop in dB (inclusive), or a single value.
    #[arg(long, default_value = "0:2:10")]
    snr: String,
    #[arg(long, default_value = "rzf,fse,fse_mod,treestep")]
    precoders: String,
    #[arg(long = "L", default_value_t = 1)]
    l: u32,
    #[arg(long = "V", default_value_t = 1)]
    v: u32,
    #[arg(long = "K", default_value_t = 0)]
    k: u32,
    /// Random restart range; defaults to V.
    #[arg(long = "B")]
    b: Option<u32>,
    /// Expansion range of the sphere-encoder baselines.
    #[arg(long = "fse-v", default_value_t = 1)]
    fse_v: u32,
    #[arg(long, default_value_t = 128)]
    channels: usize,
    #[arg(long, default_value_t = 128)]
    vectors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Stop a cell after this many bit errors, or "off".
    #[arg(long = "early-abort", default_value = "2000")]
    early_abort: String,
}

fn parse_snr(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad SNR '{s}': {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [single] => Ok(vec![*single]),
        [start, step, stop] => {
            if *step <= 0.0 || step.is_nan() {
                return Err("SNR step must be positive".into());
            }
            if stop < start {
                return Err("SNR stop is below start".into());
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(format!("SNR must be 'start:step:stop' or a single value, got '{spec}'")),
    }
}

fn parse_grid(spec: &str, b: Option<u32>) -> Result<Vec<TreeStepParams>, String> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|tuple| {
            let vals: Vec<u32> = tuple
                .split(',')
                .map(|s| s.trim().parse::<u32>().map_err(|e| format!("bad grid entry '{s}': {e}")))
                .collect::<Result<_, _>>()?;
            match vals.as_slice() {
                [l, v, k] => {
                    let mut p = TreeStepParams::new(*l, *v, *k);
                    if let Some(b) = b {
                        p.b = b;
                    }
                    Ok(p)
                }
                _ => Err(format!("grid tuple must be L,V,K, got '{tuple}'")),
            }
        })
        .collect()
}

impl SimArgs {
    fn config(&self) -> Result<SweepConfig, String> {
        let precoders = self
            .precoders
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<PrecoderTag>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let early_abort = match self.early_abort.as_str() {
            "off" => None,
            n => Some(n.parse::<u64>().map_err(|e| format!("bad --early-abort '{n}': {e}"))?),
        };
        let mut params = TreeStepParams::new(self.l, self.v, self.k);
        if let Some(b) = self.b {
            params.b = b;
        }
        Ok(SweepConfig {
            n_users: self.nu,
            n_tx: self.nt,
            mod_order: self.mod_order,
            snr_grid_db: parse_snr(&self.snr)?,
            precoders,
            treestep_params: params,
            fse_v: self.fse_v,
            n_channels: self.channels,
            n_vectors_per_channel: self.vectors,
            master_seed: self.seed,
            power: self.power,
            workers: self.workers,
            early_abort,
            ..SweepConfig::default()
        })
    }

    fn output_format(&self) -> Result<OutputFormat, String> {
        self.format.parse().map_err(|e: treestep::Error| e.to_string())
    }

    fn write(&self, records: &[BerRecord], format: OutputFormat) -> Result<(), String> {
        match &self.out {
            Some(path) => emit_results(records, path, format).map_err(|e| e.to_string()),
            None => {
                let bytes = render(records, format).map_err(|e| e.to_string())?;
                std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Sweep(sim) => {
            let cfg = sim.config()?;
            let format = sim.output_format()?;
            let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
            sim.write(&records, format)?;
            Ok(true)
        }
        Command::ParamStudy { sim, grid } => {
            let cfg = sim.config()?;
            let format = sim.output_format()?;
            let grid = match grid {
                Some(g) => parse_grid(&g, sim.b)?,
                None => DEFAULT_PARAM_GRID.to_vec(),
            };
            let records = run_param_study(&cfg, &grid).map_err(|e| e.to_string())?;
            sim.write(&records, format)?;
            Ok(true)
        }
        Command::Verify { seed } => {
            let report = verify_suite(seed);
            println!("{report}");
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep 2 reserved for verify failures
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
