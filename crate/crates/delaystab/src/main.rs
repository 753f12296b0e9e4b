use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use delaystab::jobs::{self, Format, JobRequest, Mode};
use delaystab_core::PlantSpec;

const AFTER_HELP: &str = "\
Plant files are JSON: {\"gain\": K, \"delay\": L, \"time_constants\": [T1, ...], \"zero_constants\": [Z1, ...]}.

Exit status: 0 success or stabilizable, 2 not stabilizable or h outside the
admissible interval, 3 degenerate, 1 malformed input or other errors.

CSV columns:
  zones   param1,param2,verdict,zone,phi1,phi2,poles,Ne_required,Ne_achieved
  region  vertex,hi,hd
  sweep   h,vertex,hi,hd

DELAYSTAB_SCAN_MAX overrides the frequency ceiling used for region roots.";

#[derive(Parser)]
#[command(name = "delaystab", version, about = "PID stability regions for plants with one time delay", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether some PID stabilizes the plant.
    Check(Common),
    /// Stability region in (h_i, h_d) at a fixed h.
    Region(Common),
    /// Scan one or two plant parameters and classify every cell.
    Zones(Common),
    /// Regions at evenly spaced h across the admissible interval.
    Sweep(Common),
    /// Count closed-loop RHP zeros at one controller point.
    Verify(Common),
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

#[derive(Args)]
struct Common {
    /// Plant JSON file, `-` for stdin.
    #[arg(long, default_value = "-")]
    plant: PathBuf,
    /// Normalized proportional gain h = K Kp.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    /// Normalized integral gain h_i = K Ki L (verify).
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    /// Normalized derivative gain h_d = K Kd / L (verify).
    #[arg(long, allow_hyphen_values = true)]
    hd: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// P1:min:max:steps[,P2:min:max:steps] with P one of T<i>, Z<i>, L.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Number of h values in a sweep.
    #[arg(long)]
    steps: Option<usize>,
}

fn read_plant(path: &PathBuf) -> anyhow::Result<PlantSpec> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).context("parsing plant JSON")
}

fn run_job(mode: Mode, args: Common) -> ExitCode {
    let plant = match read_plant(&args.plant) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let req = JobRequest {
        plant: Some(plant),
        mode: None,
        h: args.h,
        hi: args.hi,
        hd: args.hd,
        grid: args.grid,
        steps: args.steps,
        format: args.format,
    };
    match jobs::run(mode, &req) {
        Ok(out) => {
            let text = out.render();
            let written = match &args.out {
                Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if out.exit_code == 2 {
                eprintln!("not stabilizable");
            }
            ExitCode::from(out.exit_code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.exit_code() != 1 {
                // report or interval behind the failure
                println!("{}", serde_json::to_string_pretty(&f.payload).unwrap_or_default());
            }
            ExitCode::from(f.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check(a) => run_job(Mode::Check, a),
        Command::Region(a) => run_job(Mode::Region, a),
        Command::Zones(a) => run_job(Mode::Zones, a),
        Command::Sweep(a) => run_job(Mode::Sweep, a),
        Command::Verify(a) => run_job(Mode::Verify, a),
        Command::Serve { bind } => {
            let rt = match tokio::runtime::Runtime::new() {
                Ok(rt) => rt,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match rt.block_on(delaystab::service::serve(&bind)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
