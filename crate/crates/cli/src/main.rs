//! `tdqss`: run the secret reconstruction protocol, deal shadows, emit qubit circuits.
//!
//! Exit codes: 0 on success, 2 for invalid flag combinations, 3 when the
//! configuration itself is rejected (bad dimension, composite d for Shamir, ...).

mod report;

use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tdqss_core::compiler::{compile_protocol, QubitCircuit};
use tdqss_core::protocol::run_compiled;
use tdqss_core::{
    expected_secret, make_shadows_random, make_shadows_shamir, run_tdqss, Backend, CnotScheme, ProtocolConfig,
    ShadowSet, Stage,
};

use report::{round_sig, ConfigEcho, RunReport, StageSummary};

#[derive(Debug, Parser)]
#[command(name = "tdqss", version, about = "Threshold d-level quantum secret sharing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the reconstruction protocol and report the recovered secret
    Run(RunArgs),
    /// Deal shadows for a secret
    Deal(DealArgs),
    /// Print the qubit circuit for a power-of-two dimension
    Compile(CompileArgs),
}

#[derive(Debug, Args)]
struct ShadowArgs {
    /// Qudit dimension
    #[arg(long)]
    d: usize,
    /// Number of participants
    #[arg(long)]
    t: usize,
    /// Explicit shadows, comma separated
    #[arg(long, value_delimiter = ',')]
    shadows: Option<Vec<usize>>,
    /// Deal random shadows for this secret (needs --seed)
    #[arg(long)]
    secret: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    input: ShadowArgs,
    #[arg(long, default_value = "add-sub")]
    cnot: CnotScheme,
    #[arg(long, default_value = "qudit")]
    backend: Backend,
    /// Include per-stage state summaries
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
    /// Most terms listed per stage with --trace
    #[arg(long, default_value_t = 64)]
    top: usize,
    /// Skip the disentangling CNOTs (diagnostic)
    #[arg(long)]
    no_disentangle: bool,
    /// Simulate a circuit file from `tdqss compile` instead of compiling (qubit backend)
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Report wall-clock time in the JSON output as well
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DealMode {
    Random,
    Shamir,
}

#[derive(Debug, Args)]
struct DealArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    secret: usize,
    #[arg(long, value_enum, default_value_t = DealMode::Random)]
    mode: DealMode,
    /// Shamir evaluation points (default 1..=t)
    #[arg(long, value_delimiter = ',')]
    xs: Option<Vec<usize>>,
    /// Shamir polynomial coefficients of x^1..x^(t-1) (default: random from --seed)
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CompileArgs {
    #[command(flatten)]
    input: ShadowArgs,
    #[arg(long)]
    no_disentangle: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Config(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Config(msg) => f.write_str(msg),
        }
    }
}

impl From<tdqss_core::Error> for CliError {
    fn from(e: tdqss_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Deal(args) => cmd_deal(&args),
        Command::Compile(args) => cmd_compile(&args),
    };
    match outcome {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl ShadowArgs {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn shadows(&self) -> CliResult<ShadowSet> {
        match (&self.shadows, self.secret, self.seed) {
            (Some(_), Some(_), _) => Err(CliError::Usage("--shadows and --secret are mutually exclusive".into())),
            (None, None, _) => Err(CliError::Usage("one of --shadows or --secret is required".into())),
            (None, Some(_), None) => Err(CliError::Usage("--secret needs --seed for random dealing".into())),
            (Some(values), None, _) => {
                if values.len() != self.t {
                    return Err(CliError::Config(format!("{} shadows given for --t {}", values.len(), self.t)));
                }
                Ok(ShadowSet::new(self.d, values.iter().copied())?)
            }
            (None, Some(secret), Some(seed)) => {
                Ok(make_shadows_random(self.d, self.t, secret, &mut ChaCha8Rng::seed_from_u64(seed))?)
            }
        }
    }

    fn config(&self) -> CliResult<ProtocolConfig> {
        Ok(ProtocolConfig::new(self.shadows()?)?.with_seed(self.seed()))
    }
}

fn cmd_run(args: &RunArgs) -> CliResult<String> {
    let input = &args.input;
    let start = Instant::now();
    let mut report = match &args.circuit {
        Some(path) => run_circuit_file(args, path)?,
        None => {
            let mut config = input.config()?.with_cnot(args.cnot).with_backend(args.backend);
            if args.no_disentangle {
                config = config.without_disentanglement();
            }
            let result = run_tdqss(&config)?;
            let stages = if args.trace {
                Stage::ALL.iter().map(|&s| StageSummary::new(s.label(), result.trace.get(s), args.top)).collect()
            } else {
                Vec::new()
            };
            RunReport {
                config: echo(args, Some(config.shadows.values().to_vec())),
                stages,
                distribution: result.distribution.iter().map(|&p| round_sig(p)).collect(),
                reconstructed: result.reconstructed,
                readout: result.readout,
                display: result.display,
                elapsed_ms: None,
            }
        }
    };
    let elapsed = round_sig(start.elapsed().as_secs_f64() * 1e3);
    if args.json {
        if args.timing {
            report.elapsed_ms = Some(elapsed);
        }
        Ok(report.to_json())
    } else {
        report.elapsed_ms = Some(elapsed);
        Ok(report.to_plain())
    }
}

fn echo(args: &RunArgs, shadows: Option<Vec<usize>>) -> ConfigEcho {
    ConfigEcho {
        d: args.input.d,
        t: args.input.t,
        shadows,
        secret: args.input.secret,
        cnot: args.cnot.to_string(),
        backend: args.backend.to_string(),
        seed: args.input.seed(),
        disentangle: !args.no_disentangle,
        circuit: args.circuit.as_ref().map(|p| p.display().to_string()),
    }
}

fn run_circuit_file(args: &RunArgs, path: &PathBuf) -> CliResult<RunReport> {
    if args.input.shadows.is_some() || args.input.secret.is_some() {
        return Err(CliError::Usage("--circuit replaces --shadows/--secret".into()));
    }
    if args.backend != Backend::Qubit {
        return Err(CliError::Usage("--circuit needs --backend qubit".into()));
    }
    if args.no_disentangle {
        return Err(CliError::Usage("--no-disentangle has no effect on a precompiled circuit".into()));
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let circuit = QubitCircuit::parse(&text)?;
    let run = run_compiled(&circuit, args.input.d, args.input.t, args.input.seed())?;
    let stages = if args.trace {
        vec![StageSummary::new(Stage::Recover.label(), &run.final_state, args.top)]
    } else {
        Vec::new()
    };
    Ok(RunReport {
        config: echo(args, None),
        stages,
        distribution: run.distribution.iter().map(|&p| round_sig(p)).collect(),
        reconstructed: run.reconstructed,
        readout: run.readout,
        display: Some(run.display),
        elapsed_ms: None,
    })
}

#[derive(Serialize)]
struct DealReport {
    d: usize,
    t: usize,
    secret: usize,
    mode: DealMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    xs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<usize>>,
    shadows: Vec<usize>,
    sum: usize,
}

fn cmd_deal(args: &DealArgs) -> CliResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (shadows, xs, coeffs) = match args.mode {
        DealMode::Random => {
            if args.xs.is_some() || args.coeffs.is_some() {
                return Err(CliError::Usage("--xs and --coeffs only apply to --mode shamir".into()));
            }
            (make_shadows_random(args.d, args.t, args.secret, &mut rng)?, None, None)
        }
        DealMode::Shamir => {
            let xs = args.xs.clone().unwrap_or_else(|| (1..=args.t).collect());
            if xs.len() != args.t {
                return Err(CliError::Config(format!("{} evaluation points given for --t {}", xs.len(), args.t)));
            }
            let coeffs = args
                .coeffs
                .clone()
                .unwrap_or_else(|| (1..args.t).map(|_| rng.gen_range(0..args.d.max(1))).collect());
            (make_shadows_shamir(args.d, args.secret, &coeffs, &xs)?, Some(xs), Some(coeffs))
        }
    };
    let report = DealReport {
        d: args.d,
        t: args.t,
        secret: args.secret,
        mode: args.mode,
        xs,
        coeffs,
        shadows: shadows.values().to_vec(),
        sum: expected_secret(&shadows),
    };
    if args.json {
        return Ok(serde_json::to_string_pretty(&report).expect("deal report serializes") + "\n");
    }
    let list = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let mut out = format!("shadows: {}\n", list(&report.shadows));
    out += &format!("sum mod {}: {}\n", report.d, report.sum);
    Ok(out)
}

fn cmd_compile(args: &CompileArgs) -> CliResult<String> {
    let mut config = args.input.config()?;
    if args.no_disentangle {
        config = config.without_disentanglement();
    }
    Ok(compile_protocol(&config)?.to_text())
}
