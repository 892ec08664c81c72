// Copyright 2026 The QECCD Authors
// SPDX-License-Identifier: Apache-2.0

//! `qeccd`: validate stabilizer codes, emit measurement plans and characterize
//! noise channels from simulated syndrome statistics.
//!
//! Exit status is 0 on success, 1 for domain or validation failures and 2 for
//! malformed input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qeccd_core::channel::{builtin_channel, BUILTIN_CHANNELS};
use qeccd_core::code::{builtin_code, BUILTIN_CODES};
use qeccd_core::estimation::{characterize, Mode, SamplingPolicy};
use qeccd_core::io::{
    channel_from_json, chi_rows, code_from_json, plan_to_json, to_json_string, ConfigurationReport, ErrorReportJson,
    Report, SamplingJson,
};
use qeccd_core::protocol::plan_configurations;
use qeccd_core::{Channel, Complex64, NumericPolicy, QeccdError, StabilizerCode};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "qeccd",
    version,
    about = "Channel characterization through stabilizer-code syndrome statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a code: commutation, Knill-Laflamme condition, syndrome table, Hamming bound.
    Validate(CommonArgs),
    /// Emit the default measurement plan for a code.
    Plan(CommonArgs),
    /// Simulate the plan on a channel and reconstruct its process matrix.
    Characterize(CharacterizeArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Built-in code name (code3, code5) or path to a code JSON file.
    #[arg(long)]
    code: String,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CharacterizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Built-in channel name or path to a channel JSON file.
    #[arg(long)]
    channel: String,
    /// Comma-separated parameters for a built-in channel.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Vec<f64>,
    /// Comma-separated logical amplitudes such as `0.6,0.8i`; defaults to the
    /// uniform superposition.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Shots per configuration in sampled mode.
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

enum Failure {
    Domain(String),
    Input(String),
}

impl From<QeccdError> for Failure {
    fn from(e: QeccdError) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_code(name_or_path: &str, policy: &NumericPolicy) -> CliResult<StabilizerCode> {
    if BUILTIN_CODES.contains(&name_or_path) {
        return Ok(builtin_code(name_or_path)?);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(QeccdError::UnknownCode(name_or_path.to_string()).into());
    }
    Ok(code_from_json(&read_file(path)?, policy)?)
}

fn load_channel(name_or_path: &str, params: &[f64]) -> CliResult<Channel> {
    if BUILTIN_CHANNELS.contains(&name_or_path) {
        return Ok(builtin_channel(name_or_path, params)?);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(QeccdError::UnknownChannel(name_or_path.to_string()).into());
    }
    if !params.is_empty() {
        return Err(Failure::Input("--params applies only to built-in channels".into()));
    }
    Ok(channel_from_json(&read_file(path)?)?)
}

fn parse_beta(values: &[String], k: usize) -> CliResult<Vec<Complex64>> {
    let dim = 1usize << k;
    if values.is_empty() {
        return Ok(vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]);
    }
    values
        .iter()
        .map(|v| {
            v.trim()
                .parse::<Complex64>()
                .map_err(|_| Failure::Input(format!("cannot parse amplitude '{v}'")))
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SyndromeRow {
    error: String,
    syndrome: String,
}

#[derive(Serialize)]
struct HammingJson {
    satisfied: bool,
    perfect: bool,
}

#[derive(Serialize)]
struct ValidationReport {
    n: usize,
    k: usize,
    generators: Vec<String>,
    noisy_coords: Vec<usize>,
    generators_commute: bool,
    kl_residual: f64,
    syndrome_table: Vec<SyndromeRow>,
    hamming: HammingJson,
    passed: bool,
}

fn cmd_validate(args: &CommonArgs, policy: &NumericPolicy) -> CliResult<()> {
    let code = load_code(&args.code, policy)?;
    let hamming = code.hamming();
    let kl_residual = code.kl_condition().max_residual;
    let report = ValidationReport {
        n: code.n(),
        k: code.k(),
        generators: code.generators().iter().map(|g| g.to_string()).collect(),
        noisy_coords: code.noisy_coords().to_vec(),
        // construction rejects non-commuting generators
        generators_commute: true,
        kl_residual,
        syndrome_table: code
            .error_basis()
            .labels()
            .into_iter()
            .zip(code.syndrome_table())
            .map(|(error, s)| SyndromeRow {
                error,
                syndrome: s.to_string(),
            })
            .collect(),
        hamming: HammingJson {
            satisfied: hamming.satisfied,
            perfect: hamming.perfect,
        },
        passed: hamming.satisfied && kl_residual < policy.kl_residual,
    };
    let text = match args.format {
        Format::Json => to_json_string(&report) + "\n",
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "[[{}, {}]] code, generators {}",
                report.n,
                report.k,
                report.generators.join(" ")
            );
            let _ = writeln!(t, "noisy coordinates: {:?}", report.noisy_coords);
            let _ = writeln!(t, "generators commute: yes");
            let _ = writeln!(t, "Knill-Laflamme residual: {:.3e}", report.kl_residual);
            let _ = writeln!(t, "syndrome table ({} rows):", report.syndrome_table.len());
            for row in &report.syndrome_table {
                let _ = writeln!(t, "  {:>6}  {}", row.error, row.syndrome);
            }
            let bound = match (hamming.satisfied, hamming.perfect) {
                (true, true) => "satisfied (perfect)",
                (true, false) => "satisfied",
                _ => "violated",
            };
            let _ = writeln!(t, "Hamming bound: {bound}");
            let _ = writeln!(t, "{}", if report.passed { "PASS" } else { "FAIL" });
            t
        }
    };
    emit(&args.out, &text)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Domain("code validation failed".into()))
    }
}

fn cmd_plan(args: &CommonArgs, policy: &NumericPolicy) -> CliResult<()> {
    let code = load_code(&args.code, policy)?;
    let plan = plan_configurations(&code, policy)?;
    let text = match args.format {
        Format::Json => plan_to_json(&plan, &code) + "\n",
        Format::Text => {
            let mut t = String::new();
            for (i, d) in plan.descriptors(&code).iter().enumerate() {
                let _ = write!(t, "{i:>3} {:<8}", d.kind);
                if let (Some(a), Some(b)) = (&d.a, &d.b) {
                    let _ = write!(t, " a={a} b={b}");
                }
                if let Some(theta) = &d.theta {
                    let signs: Vec<String> = theta.iter().map(|(e, s)| format!("{e}:{s}")).collect();
                    let _ = write!(t, " theta={}", signs.join(","));
                }
                t.push('\n');
            }
            t
        }
    };
    emit(&args.out, &text)?;
    eprintln!("{} configurations", plan.len());
    Ok(())
}

fn cmd_characterize(args: &CharacterizeArgs, policy: &NumericPolicy) -> CliResult<()> {
    let code = load_code(&args.common.code, policy)?;
    let channel = load_channel(&args.channel, &args.params)?;
    let beta = parse_beta(&args.beta, code.k())?;
    let (mode, sampling) = match args.mode {
        ModeArg::Exact => (Mode::Exact, None),
        ModeArg::Sampled => {
            let s = SamplingPolicy::new(args.shots, args.seed)?;
            (Mode::Sampled(s), Some(s))
        }
    };
    let plan = plan_configurations(&code, policy)?;
    let run = characterize(&code, &beta, &channel, &plan, mode, policy)?;
    let chi = &run.reconstruction.chi;
    let report = Report {
        code: args.common.code.clone(),
        channel: channel.label().to_string(),
        mode: match args.mode {
            ModeArg::Exact => "exact".into(),
            ModeArg::Sampled => "sampled".into(),
        },
        sampling: sampling.map(|s| SamplingJson {
            shots_per_configuration: s.shots_per_configuration,
            seed: s.seed,
        }),
        basis: chi.labels().to_vec(),
        chi: chi_rows(chi),
        validity: chi.validity().into(),
        max_readout_spread: run.reconstruction.max_spread,
        configurations: plan
            .descriptors(&code)
            .into_iter()
            .zip(&run.residuals)
            .map(|(descriptor, residual)| ConfigurationReport {
                descriptor,
                residual: *residual,
            })
            .collect(),
        error_report: Some(ErrorReportJson::from(run.error_report)),
    };
    let text = match args.common.format {
        Format::Json => to_json_string(&report) + "\n",
        Format::Text => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "code {}, channel {}, {} mode",
                report.code, report.channel, report.mode
            );
            if let Some(s) = &report.sampling {
                let _ = writeln!(
                    t,
                    "{} shots per configuration, seed {}",
                    s.shots_per_configuration, s.seed
                );
            }
            let _ = writeln!(t, "{} configurations", plan.len());
            let _ = writeln!(t, "chi:");
            for (label, row) in report.basis.iter().zip(&report.chi) {
                let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
                let _ = writeln!(t, "  {label:>4}  {}", cells.join("  "));
            }
            let v = &report.validity;
            let _ = writeln!(
                t,
                "trace {:.6}, min eigenvalue {:.3e}, hermiticity defect {:.3e}",
                v.trace, v.min_eigenvalue, v.hermiticity_defect
            );
            if let Some(e) = &report.error_report {
                let _ = writeln!(
                    t,
                    "vs oracle: frobenius {:.3e}, max entry {:.3e}, trace defect {:.3e}",
                    e.frobenius_error, e.max_entry_error, e.trace_defect
                );
            }
            t
        }
    };
    emit(&args.common.out, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let policy = NumericPolicy::default();
    let result = match &cli.command {
        Command::Validate(args) => cmd_validate(args, &policy),
        Command::Plan(args) => cmd_plan(args, &policy),
        Command::Characterize(args) => cmd_characterize(args, &policy),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
