//! `qfhe`: key generation, encrypted evaluation runs, audits and demo fixtures.
//!
//! Randomness: every command seeds one ChaCha8 stream from `--seed` (or
//! `QFHE_SEED`). `keygen` draws the x bits then the z bits; `run` draws the
//! client's `(r, r')` pairs in gate order. Without a seed one is taken from
//! the OS and printed on stderr.

mod demo;
mod state_io;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfhe_core::audit::{
    conjugation_suite, interaction_privacy_check, interaction_x_independence, qotp_mixing_check,
    qotp_mixing_sampled, EXHAUSTIVE_MAX_QUBITS,
};
use qfhe_core::{
    circuit_from_json, client_decrypt, client_encrypt, keygen, run_delegation, validate_uqc,
    Circuit, EncodingRefresh, EvaluationPlan, PauliKey, QfheError, RunOptions, ScheduleMode,
    SelectorFixture, StateVector, TransportKind,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use state_io::{load_data, parse_bits, write_state};

const UQC_TOLERANCE: f64 = 1e-10;
const AUDIT_TOLERANCE: f64 = 1e-10;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(path: impl fmt::Display, e: std::io::Error) -> Self {
        Self::usage(format!("{path}: {e}"))
    }

    fn audit(message: impl Into<String>) -> Self {
        Self {
            code: 5,
            message: message.into(),
        }
    }
}

impl From<QfheError> for CliError {
    fn from(e: QfheError) -> Self {
        let code = match e {
            QfheError::Parse { .. } => 3,
            QfheError::CustodyViolation(_)
            | QfheError::ProtocolDesync(_)
            | QfheError::EncodingMismatch(_)
            | QfheError::EncodingEntangled(_)
            | QfheError::Transport(_) => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "qfhe", version, about = "Quantum homomorphic encryption on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SeedArg {
    /// Seed for the ChaCha8 stream.
    #[arg(long, env = "QFHE_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn rng(&self) -> ChaCha8Rng {
        let seed = self.seed.unwrap_or_else(|| {
            let s = rand::random();
            eprintln!("seed: {s}");
            s
        });
        ChaCha8Rng::seed_from_u64(seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an encryption key.
    Keygen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Key file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encrypt, evaluate and decrypt in one delegated run.
    Run(RunArgs),
    /// Mask data with a key and append the encoding register.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        data: String,
        #[arg(long, default_value = "")]
        encoding: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Unmask a result with a decryption key and detach the encoding register.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        data: String,
        #[arg(long, default_value = "")]
        encoding: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run security and identity checks.
    Audit {
        #[arg(value_enum)]
        suite: Suite,
        /// Qubits for the mixing and privacy suites.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Key samples for mixing above the exhaustive limit.
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        /// Random plaintexts per suite, in addition to |0...0⟩.
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Check every (unitary, encoding) pair of a selector fixture.
    Validate {
        #[arg(long)]
        fixture: PathBuf,
    },
    /// Write the shipped selector fixtures to a directory.
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Circuit JSON or selector fixture.
    #[arg(long)]
    circuit: PathBuf,
    /// Program label to select from a fixture; sets the encoding.
    #[arg(long, conflicts_with = "encoding")]
    select: Option<String>,
    #[arg(long)]
    key: PathBuf,
    /// Basis string such as `|01⟩`, or an amplitude JSON file.
    #[arg(long)]
    data: String,
    /// Encoding bits, e.g. `01`.
    #[arg(long)]
    encoding: Option<String>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = TransportArg::Inproc)]
    transport: TransportArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Lazy)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = RefreshArg::Reprepare)]
    refresh: RefreshArg,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, env = "QFHE_RUN_ID", default_value_t = 0)]
    run_id: u64,
    /// Result amplitudes (JSON); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Decryption key file.
    #[arg(long)]
    dk: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Conjugation,
    Mixing,
    Privacy,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransportArg {
    Inproc,
    Socket,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Lazy,
    Precomputed,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefreshArg {
    Reprepare,
    Carry,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))
}

fn write(path: &Path, text: &str) -> CliResult {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e))
}

fn read_key(path: &Path) -> CliResult<PauliKey> {
    Ok(read(path)?.trim().parse()?)
}

fn encoding_bits(text: &str) -> CliResult<Vec<bool>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    parse_bits(text).ok_or_else(|| CliError::usage(format!("bad encoding bits {text:?}")))
}

/// Loads a plain circuit or a selector fixture, returning the circuit and
/// the encoding chosen by `select`, if any.
fn load_circuit(path: &Path, select: Option<&str>) -> CliResult<(Circuit, Option<Vec<bool>>)> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(QfheError::from)?;
    if value.get("menu").is_none() {
        if select.is_some() {
            return Err(CliError::usage("--select needs a selector fixture"));
        }
        return Ok((circuit_from_json(&text)?, None));
    }
    let spec = SelectorFixture::from_json(&text)?.spec()?;
    let encoding = match select {
        Some(label) => Some(
            spec.entry(label)
                .ok_or_else(|| CliError::usage(format!("no program labelled {label:?}")))?
                .encoding
                .clone(),
        ),
        None => None,
    };
    Ok((spec.circuit, encoding))
}

fn cmd_run(args: RunArgs) -> CliResult {
    let (circuit, selected) = load_circuit(&args.circuit, args.select.as_deref())?;
    let encoding = match (selected, &args.encoding) {
        (Some(e), _) => e,
        (None, Some(text)) => encoding_bits(text)?,
        (None, None) => Vec::new(),
    };
    let refresh = match args.refresh {
        RefreshArg::Reprepare => EncodingRefresh::Reprepare,
        RefreshArg::Carry => EncodingRefresh::Carry,
    };
    let plan = EvaluationPlan::new(circuit, encoding, args.reps)?.with_refresh(refresh);
    let ek = read_key(&args.key)?;
    let data = load_data(&args.data)?;
    let options = RunOptions {
        run_id: args.run_id,
        mode: match args.mode {
            ModeArg::Lazy => ScheduleMode::Lazy,
            ModeArg::Precomputed => ScheduleMode::Precomputed,
        },
        transport: match args.transport {
            TransportArg::Inproc => TransportKind::InProc,
            TransportArg::Socket => TransportKind::Socket,
        },
    };
    let run = run_delegation(&data, &ek, &plan, options, Box::new(args.seed.rng()))?;

    match &args.out {
        Some(path) => write_state(path, &run.result)?,
        None => println!(
            "{}",
            serde_json::to_string(&state_io::state_file(&run.result)).expect("state serializes")
        ),
    }
    if let Some(path) = &args.transcript {
        write(path, &run.transcript.to_json_lines())?;
    }
    if let Some(path) = &args.dk {
        write(path, &format!("{}\n", run.decryption_key))?;
    }
    let c = run.transcript.counters;
    eprintln!(
        "masks={} gates={} messages={} key_xors={} max_step_xors={} r_gates={} reps={}",
        c.mask_ops, c.gates, c.messages, c.key_xors, c.max_step_xors, c.r_gates, c.repetitions
    );
    Ok(())
}

fn sample_states(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> CliResult<Vec<StateVector>> {
    let mut states = vec![StateVector::zero(n)?];
    for _ in 0..extra {
        states.push(StateVector::random(n, rng)?);
    }
    Ok(states)
}

struct SuiteResult {
    name: &'static str,
    passed: bool,
    text: String,
    json: serde_json::Value,
}

fn audit_conjugation() -> SuiteResult {
    let report = conjugation_suite();
    SuiteResult {
        name: "conjugation",
        passed: report.passed(),
        text: report.to_string(),
        json: serde_json::from_str(&report.to_json()).expect("report is JSON"),
    }
}

fn audit_mixing(n: usize, samples: usize, states: &[StateVector], seed: u64) -> CliResult<SuiteResult> {
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for (i, psi) in states.iter().enumerate() {
        if n <= EXHAUSTIVE_MAX_QUBITS {
            let dev = qotp_mixing_check(n, psi)?;
            let ok = dev < AUDIT_TOLERANCE;
            passed &= ok;
            text += &format!("state {i}: exhaustive deviation {dev:e} {}\n", verdict(ok));
            rows.push(json!({"state": i, "mode": "exhaustive", "deviation": dev, "passed": ok}));
        } else {
            let est = qotp_mixing_sampled(psi, samples, seed.wrapping_add(i as u64))?;
            let ok = est.deviation <= est.bound.max(AUDIT_TOLERANCE);
            passed &= ok;
            text += &format!(
                "state {i}: sampled deviation {:e} over {} keys, bound {:e} {}\n",
                est.deviation,
                est.samples,
                est.bound,
                verdict(ok)
            );
            rows.push(json!({"state": i, "mode": "sampled", "deviation": est.deviation,
                "standard_error": est.standard_error, "bound": est.bound, "passed": ok}));
        }
    }
    Ok(SuiteResult {
        name: "mixing",
        passed,
        text,
        json: json!({"n": n, "states": rows, "passed": passed}),
    })
}

fn audit_privacy(states: &[StateVector]) -> CliResult<SuiteResult> {
    let mut worst_mixed = 0.0f64;
    let mut worst_diff = 0.0f64;
    for psi in states {
        for w in 0..psi.num_qubits() {
            for x_bit in [false, true] {
                worst_mixed = worst_mixed.max(interaction_privacy_check(x_bit, psi, w)?);
            }
            worst_diff = worst_diff.max(interaction_x_independence(psi, w)?);
        }
    }
    let passed = worst_mixed < AUDIT_TOLERANCE && worst_diff < AUDIT_TOLERANCE;
    Ok(SuiteResult {
        name: "privacy",
        passed,
        text: format!(
            "{} states: deviation from I/2 {worst_mixed:e}, x-bit difference {worst_diff:e} {}\n",
            states.len(),
            verdict(passed)
        ),
        json: json!({"states": states.len(), "max_deviation": worst_mixed,
            "max_x_difference": worst_diff, "passed": passed}),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_audit(suite: Suite, n: usize, samples: usize, states: usize, json_out: bool, seed: SeedArg) -> CliResult {
    if n == 0 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let mut rng = seed.rng();
    let mut results = Vec::new();
    if matches!(suite, Suite::Conjugation | Suite::All) {
        results.push(audit_conjugation());
    }
    let plain = sample_states(n, states, &mut rng)?;
    if matches!(suite, Suite::Mixing | Suite::All) {
        let mixing_seed = rand::Rng::gen(&mut rng);
        results.push(audit_mixing(n, samples, &plain, mixing_seed)?);
    }
    if matches!(suite, Suite::Privacy | Suite::All) {
        results.push(audit_privacy(&plain)?);
    }
    let passed = results.iter().all(|r| r.passed);
    if json_out {
        let mut obj = serde_json::Map::new();
        for r in &results {
            obj.insert(r.name.into(), r.json.clone());
        }
        obj.insert("passed".into(), passed.into());
        println!("{}", serde_json::to_string_pretty(&obj).expect("report serializes"));
    } else {
        for r in &results {
            println!("== {} ==", r.name);
            print!("{}", r.text);
            if !r.text.ends_with('\n') {
                println!();
            }
        }
        println!("audit {}", verdict(passed));
    }
    if passed {
        Ok(())
    } else {
        Err(CliError::audit("audit failed"))
    }
}

fn cmd_validate(path: &Path) -> CliResult {
    let spec = SelectorFixture::from_json(&read(path)?)?.spec()?;
    let report = validate_uqc(&spec, UQC_TOLERANCE)?;
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::audit(format!("{} fails validation", path.display())))
    }
}

fn cmd_demo(dir: &Path) -> CliResult {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    for (name, fixture) in demo::fixtures()? {
        let path = dir.join(format!("{name}.json"));
        let spec = fixture.spec()?;
        let report = validate_uqc(&spec, UQC_TOLERANCE)?;
        write(&path, &(fixture.to_json() + "\n"))?;
        println!(
            "{}: n={} m={} gates={} R={} {}",
            path.display(),
            spec.circuit.n(),
            spec.circuit.m(),
            spec.circuit.len(),
            spec.circuit.r_count(),
            verdict(report.passed())
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult {
    match cli.command {
        Command::Keygen { n, m, seed, out } => {
            let key = keygen(n, m, &mut seed.rng())?;
            let text = format!("{key}\n");
            match out {
                Some(path) => write(&path, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Run(args) => cmd_run(args),
        Command::Encrypt {
            key,
            data,
            encoding,
            out,
        } => {
            let ek = read_key(&key)?;
            let cipher = client_encrypt(&load_data(&data)?, &ek, &encoding_bits(&encoding)?)?;
            write_state(&out, &cipher)
        }
        Command::Decrypt {
            key,
            data,
            encoding,
            out,
        } => {
            let dk = read_key(&key)?;
            let plain = client_decrypt(&load_data(&data)?, &dk, &encoding_bits(&encoding)?)?;
            match out {
                Some(path) => write_state(&path, &plain),
                None => {
                    println!(
                        "{}",
                        serde_json::to_string(&state_io::state_file(&plain)).expect("state serializes")
                    );
                    Ok(())
                }
            }
        }
        Command::Audit {
            suite,
            n,
            samples,
            states,
            json,
            seed,
        } => cmd_audit(suite, n, samples, states, json, seed),
        Command::Validate { fixture } => cmd_validate(&fixture),
        Command::Demo { out } => cmd_demo(&out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
