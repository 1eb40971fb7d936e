use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use qtmlab::amplitude::parse_rational;
use qtmlab::classical::{ptm_evolve_exact, ptm_sample, tm_run, DEFAULT_MAX_SUPPORT};
use qtmlab::corpus::{golden_path, golden_report, load_corpus, load_machine, LoadError};
use qtmlab::harness::{
    accuracy, apply_universal, binary_input, run_engine, suhd_run_with, ObservationPolicy, Observer, Scripted, Signal,
    SuhdIterationRecord,
};
use qtmlab::machine::{encode_machine, pair_cantor, unpair_cantor, MachineKind};
use qtmlab::quantum::{check_unitary_window, check_wellformed_local, run, MeasurementSchedule};
use qtmlab::{report, Error, Rat};

#[derive(Parser)]
#[command(name = "qtmlab", version, about = "Exact simulator for deterministic, probabilistic and quantum Turing machines")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a quantum machine is well-formed.
    Check {
        file: PathBuf,
        /// Also build the step matrix on a cyclic tape of this many cells.
        #[arg(long)]
        window: Option<usize>,
        /// Largest configuration space the window check may build.
        #[arg(long, default_value_t = 2_000_000)]
        max_support: usize,
    },
    /// Run a machine with the engine for its kind.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Step bound (default 1000 for TMs, 100 otherwise, or the last
        /// measured step).
        #[arg(long)]
        horizon: Option<u64>,
        /// Measure the halt bit after these steps, e.g. `1,4`.
        #[arg(long, value_delimiter = ',', conflicts_with = "measure_every")]
        measure_at: Option<Vec<u64>>,
        /// Measure the halt bit after every step (the default).
        #[arg(long)]
        measure_every: bool,
        /// Draw one trajectory of a PTM instead of the exact distribution.
        #[arg(long)]
        sample: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_SUPPORT)]
        max_support: usize,
    },
    /// Total variation distance between the output distributions of two machines.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 100)]
        horizon: u64,
        #[arg(long, default_value = "0")]
        epsilon: String,
    },
    /// Run the hybrid device loop with an observation policy.
    Suhd {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        /// never | always | at:k1,k2,... | interactive
        #[arg(long, default_value = "never")]
        policy: String,
        #[arg(long = "max-T", default_value_t = 5)]
        max_t: u64,
        /// Interactive sessions treat a missing answer after this long as "no".
        #[arg(long)]
        deadline_ms: Option<u64>,
    },
    /// Print the number of a machine description.
    Encode {
        file: PathBuf,
        /// Pair the machine number with this input number.
        #[arg(long)]
        input_number: Option<BigUint>,
    },
    /// Decode `⟨n, m⟩` and run machine n on the binary rendering of m.
    Universal {
        #[arg(long, value_parser = parse_kind)]
        kind: MachineKind,
        code: BigUint,
        #[arg(long, default_value_t = 100)]
        horizon: u64,
    },
    /// Compare every corpus machine against its golden report.
    CorpusTest {
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        /// Rewrite the golden reports instead of comparing.
        #[arg(long)]
        bless: bool,
    },
}

fn parse_kind(s: &str) -> Result<MachineKind, String> {
    MachineKind::from_keyword(s).ok_or_else(|| format!("unknown kind `{s}` (tm, ptm or qtm)"))
}

enum Failure {
    Load(LoadError),
    Engine(Error),
    Usage(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Load(LoadError::Machine { source, .. }) => source.exit_code() as u8,
            Failure::Load(LoadError::Io { .. }) | Failure::Usage(_) => 1,
            Failure::Engine(e) => e.exit_code() as u8,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Load(e) => write!(f, "{e}"),
            Failure::Engine(e) => write!(f, "{e}"),
            Failure::Usage(s) => f.write_str(s),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::Load(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

/// A report and the exit code it implies.
struct Outcome {
    report: Value,
    code: u8,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome { report, code: 0 }
    }
}

fn parse_rat_flag(flag: &str, s: &str) -> Result<Rat, Failure> {
    parse_rational(s).map_err(|e| Failure::Usage(format!("--{flag} {s:?}: {e}")))
}

fn parse_policy(s: &str) -> Result<ObservationPolicy, Failure> {
    match s {
        "never" => Ok(ObservationPolicy::Never),
        "always" => Ok(ObservationPolicy::Always),
        "interactive" => Ok(ObservationPolicy::Interactive),
        _ => {
            let list = s.strip_prefix("at:").ok_or_else(|| Failure::Usage(format!("unknown policy `{s}`")))?;
            let ks: Result<Vec<u64>, _> = list.split(',').map(|k| k.trim().parse::<u64>()).collect();
            let ks = ks.map_err(|_| Failure::Usage(format!("bad iteration list in `{s}`")))?;
            Ok(ObservationPolicy::at(ks)?)
        }
    }
}

fn cmd_check(file: &PathBuf, window: Option<usize>, cap: usize) -> Result<Outcome, Failure> {
    let m = load_machine(file)?;
    let r = check_wellformed_local(&m)?;
    let mut report = json!({ "command": "check", "machine": report::machine(&m), "local": report::wellformed(&r, &m) });
    let mut ok = r.is_well_formed();
    if let Some(l) = window {
        let unitary = check_unitary_window(&m, l, cap)?;
        report["window"] = json!({ "tape_len": l, "isometric": unitary });
        ok &= unitary;
    }
    Ok(Outcome { report, code: if ok { 0 } else { 1 } })
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    file: &PathBuf,
    input: &str,
    horizon: Option<u64>,
    measure_at: Option<Vec<u64>>,
    sample: bool,
    seed: u64,
    max_support: usize,
) -> Result<Outcome, Failure> {
    let m = load_machine(file)?;
    let mut report = json!({ "command": "run", "machine": report::machine(&m), "input": input });
    match m.kind() {
        MachineKind::Tm => {
            let h = horizon.unwrap_or(1000);
            report["max_steps"] = json!(h);
            report["outcome"] = report::classical_outcome(&tm_run(&m, input, h)?);
        }
        MachineKind::Ptm if sample => {
            let h = horizon.unwrap_or(100);
            report["max_steps"] = json!(h);
            report["seed"] = json!(seed);
            report["generator"] = json!("ChaCha8");
            report["outcome"] = report::classical_outcome(&ptm_sample(&m, input, h, seed)?);
        }
        MachineKind::Ptm => {
            let h = horizon.unwrap_or(100);
            report["outcome"] = report::classical_dist(&ptm_evolve_exact(&m, input, h, max_support)?);
        }
        MachineKind::Qtm => {
            let (schedule, h) = match measure_at {
                Some(steps) => {
                    let h = horizon.unwrap_or_else(|| steps.last().copied().unwrap_or(0));
                    (MeasurementSchedule::new(steps)?, h)
                }
                None => {
                    let h = horizon.unwrap_or(100);
                    (MeasurementSchedule::every(h), h)
                }
            };
            let d = run(&m, input, &schedule, h, max_support)?;
            if d.residual.is_negative() {
                return Err(Error::Structural(format!("negative residual mass {}", d.residual)).into());
            }
            report["outcome"] = report::outcome_dist(&d, schedule.steps());
        }
    }
    Ok(Outcome::ok(report))
}

fn cmd_compare(a: &PathBuf, b: &PathBuf, input: &str, horizon: u64, epsilon: &str) -> Result<Outcome, Failure> {
    let eps = parse_rat_flag("epsilon", epsilon)?;
    let ma = load_machine(a)?;
    let mb = load_machine(b)?;
    let pa = run_engine(&ma, input, horizon)?;
    let pb = run_engine(&mb, input, horizon)?;
    let acc = accuracy(&pa, &pb, &eps)?;
    Ok(Outcome::ok(json!({
        "command": "compare",
        "input": input,
        "horizon": horizon,
        "a": { "machine": report::machine(&ma), "distribution": report::observed_dist(&pa) },
        "b": { "machine": report::machine(&mb), "distribution": report::observed_dist(&pb) },
        "accuracy": report::accuracy(&acc),
    })))
}

/// Asks on standard error, reads answers from standard input. Answers are
/// tokens separated by commas, spaces or newlines; only `y`/`yes` observe.
/// End of input or a missed deadline counts as "no".
struct TerminalObserver {
    tokens: Receiver<String>,
    deadline: Option<Duration>,
}

impl TerminalObserver {
    fn new(deadline: Option<Duration>) -> Self {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let stdin = std::io::stdin();
            for line in stdin.lock().lines() {
                let Ok(line) = line else { break };
                for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                    if tx.send(tok.to_string()).is_err() {
                        return;
                    }
                }
            }
        });
        TerminalObserver { tokens: rx, deadline }
    }
}

impl Observer for TerminalObserver {
    fn observe(&mut self, signal: &Signal) -> bool {
        let mut err = std::io::stderr();
        let _ = write!(
            err,
            "signal: iteration T={} after S={} steps; observe halt bit? [y/N] ",
            signal.outer_t, signal.steps
        );
        let _ = err.flush();
        let answer = match self.deadline {
            Some(d) => match self.tokens.recv_timeout(d) {
                Ok(t) => Some(t),
                Err(RecvTimeoutError::Timeout) => {
                    let _ = writeln!(err, "(no answer in time)");
                    None
                }
                Err(RecvTimeoutError::Disconnected) => None,
            },
            None => self.tokens.recv().ok(),
        };
        let yes = answer.is_some_and(|t| matches!(t.to_ascii_lowercase().as_str(), "y" | "yes"));
        let _ = writeln!(err, "{}", if yes { "observing" } else { "not observing" });
        yes
    }
}

fn evidence_line(records: &[SuhdIterationRecord]) -> String {
    let disturbing = records.iter().find(|r| {
        r.observed && !r.halt_prob_at_signal.is_zero() && !r.halt_prob_at_signal.is_one()
    });
    match disturbing {
        None if records.iter().all(|r| r.state_restored) => {
            "every reset restored the initial state exactly".to_string()
        }
        None => "some reset failed without a disturbing observation (unexpected)".to_string(),
        Some(r) => {
            let later_all_failed = records.iter().filter(|x| x.outer_t >= r.outer_t).all(|x| !x.state_restored);
            format!(
                "observation at T={} with halt probability {} strictly between 0 and 1; {}",
                r.outer_t,
                r.halt_prob_at_signal,
                if later_all_failed {
                    "the reset failed at that and every later iteration"
                } else {
                    "yet some later reset succeeded (unexpected)"
                }
            )
        }
    }
}

fn cmd_suhd(
    file: &PathBuf,
    input: &str,
    epsilon: &str,
    policy: &str,
    max_t: u64,
    deadline_ms: Option<u64>,
) -> Result<Outcome, Failure> {
    let eps = parse_rat_flag("epsilon", epsilon)?;
    let pol = parse_policy(policy)?;
    let m = load_machine(file)?;
    let records = if pol == ObservationPolicy::Interactive {
        let mut obs = TerminalObserver::new(deadline_ms.map(Duration::from_millis));
        suhd_run_with(&m, input, &eps, &mut obs, max_t)?
    } else {
        suhd_run_with(&m, input, &eps, &mut Scripted::new(pol)?, max_t)?
    };
    let recs: Vec<Value> = records.iter().map(report::suhd_record).collect();
    Ok(Outcome::ok(json!({
        "command": "suhd",
        "machine": report::machine(&m),
        "code": encode_machine(&m).to_string(),
        "input": input,
        "epsilon": report::rational(&eps),
        "policy": policy,
        "max_T": max_t,
        "slowdown": "S = T (exact engine, simulation error 0)",
        "records": recs,
        "evidence": evidence_line(&records),
    })))
}

fn cmd_encode(file: &PathBuf, input_number: Option<BigUint>) -> Result<Outcome, Failure> {
    let m = load_machine(file)?;
    let n = encode_machine(&m);
    let mut report = json!({ "command": "encode", "machine": report::machine(&m), "code": n.to_string() });
    if let Some(k) = input_number {
        report["input_number"] = json!(k.to_string());
        report["input"] = json!(binary_input(&k));
        report["paired_code"] = json!(pair_cantor(&n, &k).to_string());
    }
    Ok(Outcome::ok(report))
}

fn cmd_universal(kind: MachineKind, code: &BigUint, horizon: u64) -> Result<Outcome, Failure> {
    let d = apply_universal(kind, code, horizon)?;
    let (n, m) = unpair_cantor(code);
    let machine = qtmlab::machine::decode_machine(&n).map_err(Error::from)?;
    Ok(Outcome::ok(json!({
        "command": "universal",
        "kind": kind.keyword(),
        "machine": report::machine(&machine),
        "input": binary_input(&m),
        "horizon": horizon,
        "distribution": report::observed_dist(&d),
    })))
}

fn cmd_corpus_test(dir: &PathBuf, bless: bool) -> Result<Outcome, Failure> {
    let machines = load_corpus(dir)?;
    let mut results = serde_json::Map::new();
    let mut failed = 0;
    for (path, m) in &machines {
        let text = report::to_json_text(&golden_report(m)?);
        let gp = golden_path(dir, path);
        let status = if bless {
            std::fs::create_dir_all(gp.parent().expect("golden dir"))
                .and_then(|_| std::fs::write(&gp, &text))
                .map_err(|source| LoadError::Io { path: gp.clone(), source })?;
            "blessed"
        } else {
            match std::fs::read_to_string(&gp) {
                Ok(g) if g == text => "ok",
                Ok(_) => "mismatch",
                Err(_) => "missing",
            }
        };
        if status == "mismatch" || status == "missing" {
            failed += 1;
        }
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("?").to_string();
        results.insert(name, json!(status));
    }
    Ok(Outcome {
        report: json!({ "command": "corpus-test", "machines": machines.len(), "failed": failed, "results": results }),
        code: if failed == 0 { 0 } else { 1 },
    })
}

fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    match cli.cmd {
        Cmd::Check { file, window, max_support } => cmd_check(&file, window, max_support),
        Cmd::Run { file, input, horizon, measure_at, measure_every: _, sample, seed, max_support } => {
            cmd_run(&file, &input, horizon, measure_at, sample, seed, max_support)
        }
        Cmd::Compare { a, b, input, horizon, epsilon } => cmd_compare(&a, &b, &input, horizon, &epsilon),
        Cmd::Suhd { file, input, epsilon, policy, max_t, deadline_ms } => {
            cmd_suhd(&file, &input, &epsilon, &policy, max_t, deadline_ms)
        }
        Cmd::Encode { file, input_number } => cmd_encode(&file, input_number),
        Cmd::Universal { kind, code, horizon } => cmd_universal(kind, &code, horizon),
        Cmd::CorpusTest { corpus, bless } => cmd_corpus_test(&corpus, bless),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match dispatch(cli) {
        Ok(out) => {
            let text = match format {
                Format::Json => report::to_json_text(&out.report),
                Format::Text => {
                    // The evidence line goes last, after the records it summarizes.
                    let mut r = out.report;
                    let evidence = r.as_object_mut().and_then(|o| o.remove("evidence"));
                    let mut t = report::to_plain_text(&r);
                    if let Some(Value::String(e)) = evidence {
                        t.push_str(&format!("evidence: {e}\n"));
                    }
                    t
                }
            };
            print!("{text}");
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
