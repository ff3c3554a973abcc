use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mmwave_ent::scenario::{self, ScenarioError, ScenarioKind, SqueezeSetting, SweepSpec};

/// Entanglement distribution sweeps over thermal millimetre-wave links.
#[derive(Parser, Debug)]
#[command(name = "mmwave-ent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// E_LN of a thermally seeded squeezer over temperature and squeezing.
    Fig1(Common),
    /// TMSV through a single thermal-loss channel at several frequencies.
    Fig2(Common),
    /// Gaussian versus non-Gaussian states through one channel.
    Fig3(Common),
    /// Direct transmission versus entanglement swapping through a relay.
    Fig4(Common),
    /// Per-hop noise, absorption, entanglement and antenna figures.
    LinkBudget(Common),
    /// Entanglement-breaking transmissivities and distances.
    EbThresholds(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Config file with `[scenario]` sections.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// CSV output path (stdout if omitted).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Comma-separated carrier frequencies.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    freq_ghz: Option<Vec<f64>>,
    #[arg(long, value_name = "K")]
    temp_k: Option<f64>,
    #[arg(long, value_name = "DB")]
    squeeze_db: Option<f64>,
    /// Initial photon cutoff per mode for Fock-space states.
    #[arg(long, value_name = "N")]
    cutoff: Option<usize>,
    /// Convergence tolerance on E_LN between successive cutoffs.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Two-column table of frequency (GHz) and absorption (dB/km).
    #[arg(long, value_name = "PATH")]
    absorption_table: Option<PathBuf>,
    /// Grid points along the main axis.
    #[arg(long, value_name = "N")]
    points: Option<usize>,
}

impl Command {
    fn split(self) -> (ScenarioKind, Common) {
        match self {
            Command::Fig1(c) => (ScenarioKind::Fig1ThermalPrep, c),
            Command::Fig2(c) => (ScenarioKind::Fig2Channel, c),
            Command::Fig3(c) => (ScenarioKind::Fig3NonGaussian, c),
            Command::Fig4(c) => (ScenarioKind::Fig4Relay, c),
            Command::LinkBudget(c) => (ScenarioKind::LinkBudget, c),
            Command::EbThresholds(c) => (ScenarioKind::EbThresholds, c),
        }
    }
}

fn build_spec(kind: ScenarioKind, args: Common) -> Result<SweepSpec, ScenarioError> {
    let mut spec = match &args.config {
        Some(path) => SweepSpec::from_ini_file(kind, path)?,
        None => SweepSpec::default_for(kind),
    };
    if let Some(f) = args.freq_ghz {
        spec.frequencies_ghz = f;
    }
    if let Some(t) = args.temp_k {
        spec.temperature_k = t;
    }
    if let Some(db) = args.squeeze_db {
        spec.squeeze = SqueezeSetting::Db(db);
    }
    if let Some(n) = args.cutoff {
        spec.truncation.total_photon_cutoff = n;
        spec.truncation.max_total_photon_cutoff =
            spec.truncation.max_total_photon_cutoff.max(4 * n);
    }
    if let Some(tol) = args.tol {
        spec.truncation.convergence_tol = tol;
    }
    if let Some(p) = args.absorption_table {
        spec.absorption_table = Some(p);
    }
    if let Some(n) = args.points {
        spec.axis.steps = n;
        if kind == ScenarioKind::Fig1ThermalPrep {
            spec.axis2.steps = n;
        }
    }
    if let Some(p) = args.out {
        spec.output = Some(p);
    }
    spec.validate()?;
    Ok(spec)
}

fn execute(kind: ScenarioKind, args: Common) -> Result<usize, ScenarioError> {
    let spec = build_spec(kind, args)?;
    let table = scenario::run(&spec)?;
    match &spec.output {
        Some(path) => table.write_csv(BufWriter::new(File::create(path)?))?,
        None => table.write_csv(io::stdout().lock())?,
    }
    if kind == ScenarioKind::LinkBudget {
        let report = scenario::link_report(&table);
        if spec.output.is_some() {
            io::stdout().lock().write_all(report.as_bytes())?;
        } else {
            io::stderr().lock().write_all(report.as_bytes())?;
        }
    }
    if table.non_converged > 0 {
        eprintln!(
            "warning: {} rows did not converge (flagged in the output)",
            table.non_converged
        );
    }
    Ok(table.non_converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
