use std::fmt::Write as _;
use std::io::Write as _;
use std::net::TcpListener;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{parse_circuit, serve_bob, Config, TcpTransport, TransportMode, EXIT_CHECK_FAILED, EXIT_OK, SEED_ENV};
use crate::audit::{
    bob_partial_view, first_report_view, received_qubit_count, single_qubit_deviations, transcript_independence,
    DEFAULT_SECRET_BUDGET, MAX_SECRET_BUDGET,
};
use crate::compile::{
    compile, same_direction, table1_axis, table1_rows, Circuit, LeakageDescriptor, Letter, Protocol, TLikeWord,
};
use crate::engine::{
    parse_input, reference_output, run_in_process, run_session, AdversaryPolicy, BobState, Message, SessionOutput,
    ALICE_STREAM,
};
use crate::error::{Error, Result};
use crate::gadget::CascadeMode;
use crate::simcore::{fidelity_up_to_phase, party_rng, Angle8, Gate, Qubit, ALGEBRA_TOL, MAX_WIRES};
use crate::verify::{detection_rate, DetectionReport, DetectionSetup};

const OUTCOME_STREAM: u64 = 5;

#[derive(Debug, Parser)]
#[command(name = "bqc", version, about = "Blind delegated quantum computation: sessions, audits and trap verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CascadeArg {
    /// Every gadget consumes both ancillas; fixed transcript shape.
    Default,
    /// The correction ancilla is used only when needed.
    Faithful,
}

impl From<CascadeArg> for CascadeMode {
    fn from(c: CascadeArg) -> Self {
        match c {
            CascadeArg::Default => CascadeMode::AlwaysConsume,
            CascadeArg::Faithful => CascadeMode::Faithful,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SessionArgs {
    /// 1 (weak blind) or 2 (blind).
    #[arg(long, default_value = "1", value_parser = parse_protocol)]
    pub protocol: Protocol,
    /// Base seed. Alice, Bob and the adversary default to seed, seed+1, seed+2.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub seed_alice: Option<u64>,
    #[arg(long)]
    pub seed_bob: Option<u64>,
    #[arg(long)]
    pub seed_adversary: Option<u64>,
    #[arg(long, value_enum, default_value_t = CascadeArg::Default)]
    pub cascade: CascadeArg,
    /// Diagnostic: send everything unencrypted.
    #[arg(long)]
    pub no_encrypt: bool,
    #[arg(long, default_value_t = MAX_WIRES)]
    pub max_wires: usize,
    #[arg(long)]
    pub max_slots: Option<usize>,
    /// Initial qubits, one of `0 1 + -` per source wire. Defaults to all 0.
    #[arg(long)]
    pub input: Option<String>,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl SessionArgs {
    fn config(&self) -> Result<Config> {
        let mut cfg = Config::new(self.protocol, self.seed);
        cfg.alice_seed = self.seed_alice.unwrap_or(cfg.alice_seed);
        cfg.bob_seed = self.seed_bob.unwrap_or(cfg.bob_seed);
        cfg.adversary_seed = self.seed_adversary.unwrap_or(cfg.adversary_seed);
        cfg.cascade = self.cascade.into();
        cfg.encrypt = !self.no_encrypt;
        cfg.max_wires = self.max_wires;
        cfg.max_slots = self.max_slots.unwrap_or(usize::MAX);
        cfg.output = self.output.clone();
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Runs one session and reports the decrypted output.
    Run {
        #[command(flatten)]
        session: SessionArgs,
        /// Run against `bqc serve-bob` at this address instead of in-process.
        #[arg(long)]
        connect: Option<String>,
        /// Bob's behavior (in-process only).
        #[arg(long, default_value = "none", value_parser = parse_policy)]
        policy: AdversaryPolicy,
        file: PathBuf,
    },
    /// Serves Bob over TCP, one session at a time.
    ServeBob {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        seed_bob: Option<u64>,
        #[arg(long)]
        seed_adversary: Option<u64>,
        #[arg(long, default_value = "none", value_parser = parse_policy)]
        policy: AdversaryPolicy,
        /// Sessions to serve before exiting; 0 serves forever.
        #[arg(long, default_value_t = 1)]
        sessions: usize,
    },
    /// Mixedness audit of one circuit, or transcript independence of two.
    Audit {
        #[command(flatten)]
        session: SessionArgs,
        /// Cap on enumerated key bits.
        #[arg(long, default_value_t = DEFAULT_SECRET_BUDGET)]
        budget: usize,
        /// Sessions per circuit for the exact comparison.
        #[arg(long, default_value_t = 16)]
        seeds: usize,
        /// Extra Monte-Carlo sessions per circuit; 0 skips the check.
        #[arg(long, default_value_t = 0)]
        mc: usize,
        /// Input for the second circuit. Defaults to `--input`.
        #[arg(long)]
        input_b: Option<String>,
        file: PathBuf,
        file_b: Option<PathBuf>,
    },
    /// Trap-wire detection experiment; prints a CSV row.
    Verify {
        #[arg(long, default_value = "1", value_parser = parse_protocol)]
        protocol: Protocol,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Number of trap wires N_d.
        #[arg(long)]
        traps: usize,
        /// Repetitions s.
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value = "single_random_wire", value_parser = parse_policy)]
        policy: AdversaryPolicy,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Reproduces the eight rotation axes of the T-like words.
    Axes {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

pub(super) struct Outcome {
    pub report: String,
    pub code: i32,
    pub output: Option<PathBuf>,
}

fn parse_protocol(s: &str) -> std::result::Result<Protocol, String> {
    let n: u8 = s.parse().map_err(|_| format!("protocol must be 1 or 2, got {s:?}"))?;
    Protocol::try_from(n).map_err(|e| e.to_string())
}

/// `none`, `single_random_wire`, `random_pauli:RATE`, `skip_slot:K`,
/// `wrong_measure_report:K` or `extra_gate:GATE:WIRE[:K]` with GATE one of
/// X Z H S T. Dashes may replace underscores.
pub fn parse_policy(s: &str) -> std::result::Result<AdversaryPolicy, String> {
    let s = s.replace('-', "_");
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.parse::<usize>().map_err(|_| format!("expected a number, got {t:?}"));
    match parts.as_slice() {
        ["none"] => Ok(AdversaryPolicy::None),
        ["single_random_wire"] => Ok(AdversaryPolicy::SingleRandomWire),
        ["random_pauli", r] => {
            let rate: f64 = r.parse().map_err(|_| format!("expected a rate, got {r:?}"))?;
            if !(0.0..=1.0).contains(&rate) {
                return Err(format!("rate must lie in [0, 1], got {rate}"));
            }
            Ok(AdversaryPolicy::RandomPauli { rate })
        }
        ["skip_slot", k] => Ok(AdversaryPolicy::SkipSlot { slot: num(k)? }),
        ["wrong_measure_report", k] => Ok(AdversaryPolicy::WrongMeasureReport { slot: num(k)? }),
        ["extra_gate", g, w, rest @ ..] if rest.len() <= 1 => {
            let w = num(w)?;
            let gate = match g.to_ascii_uppercase().as_str() {
                "X" => Gate::X(w),
                "Z" => Gate::Z(w),
                "H" => Gate::H(w),
                "S" => Gate::S(w),
                "T" => Gate::A(Angle8::T, w),
                other => return Err(format!("unknown gate {other:?}")),
            };
            let slot = rest.first().map(|k| num(k)).transpose()?.unwrap_or(usize::MAX);
            Ok(AdversaryPolicy::ExtraGate { gate, slot })
        }
        _ => Err(format!("unknown policy {s:?}")),
    }
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_circuit(&text)
}

fn input_for(spec: Option<&str>, num_wires: usize) -> Result<Vec<Qubit>> {
    match spec {
        None => parse_input(&"0".repeat(num_wires)),
        Some(s) => {
            let q = parse_input(s)?;
            if q.len() != num_wires {
                return Err(Error::Config(format!("input has {} qubits, the circuit has {num_wires} wires", q.len())));
            }
            Ok(q)
        }
    }
}

pub(super) fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Run { session, connect, policy, file } => cmd_run(session, connect.as_deref(), *policy, file),
        Command::ServeBob { listen, seed, seed_bob, seed_adversary, policy, sessions } => {
            let bob_seed = seed_bob.unwrap_or(seed.wrapping_add(1));
            let adversary_seed = seed_adversary.unwrap_or(seed.wrapping_add(2));
            cmd_serve_bob(listen, bob_seed, adversary_seed, *policy, *sessions)
        }
        Command::Audit { session, budget, seeds, mc, input_b, file, file_b } => {
            cmd_audit(session, *budget, *seeds, *mc, input_b.as_deref(), file, file_b.as_deref())
        }
        Command::Verify { protocol, seed, traps, reps, policy, trials, input, json, output, file } => {
            let circuit = read_circuit(file)?;
            let input = input_for(input.as_deref(), circuit.num_wires())?;
            let setup = DetectionSetup {
                protocol: *protocol,
                n_d: *traps,
                s: *reps,
                policy: *policy,
                trials: *trials,
                seed: *seed,
            };
            let r = detection_rate(&circuit, &input, &setup)?;
            let report =
                if *json { to_json(&r) } else { format!("{}\n{}\n", DetectionReport::CSV_HEADER, r.csv_row()) };
            Ok(Outcome { report, code: EXIT_OK, output: output.clone() })
        }
        Command::Axes { json, output } => {
            Ok(Outcome { report: axes_report(*json)?, code: EXIT_OK, output: output.clone() })
        }
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisProbability {
    pub basis: String,
    pub p: f64,
}

/// What `bqc run` prints.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub protocol: Protocol,
    pub transport: String,
    pub source_wires: usize,
    pub register_wires: usize,
    pub slots: usize,
    pub ancillas: usize,
    pub leakage: LeakageDescriptor,
    pub messages: usize,
    pub report_bits: usize,
    pub decision_bits: usize,
    pub transcript_bits: String,
    pub fidelity: f64,
    pub probabilities: Vec<BasisProbability>,
    /// Alice's measurement of the decrypted register.
    pub outcome: String,
}

impl RunReport {
    fn new(circuit: &Circuit, input: &[Qubit], cfg: &Config, out: &SessionOutput) -> Result<Self> {
        let w = out.output.num_wires();
        let expected = reference_output(circuit, input, w)?;
        let fidelity = fidelity_up_to_phase(&out.output, &expected)?;
        let basis = |i: usize| (0..w).map(|b| if i >> (w - 1 - b) & 1 == 1 { '1' } else { '0' }).collect::<String>();
        let probabilities: Vec<BasisProbability> = out
            .output
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 1e-12)
            .map(|(i, a)| BasisProbability { basis: basis(i), p: a.norm_sqr() })
            .collect();
        let mut rng = party_rng(cfg.alice_seed, OUTCOME_STREAM);
        let mut r: f64 = rng.random();
        let mut outcome = probabilities.last().map(|b| b.basis.clone()).unwrap_or_default();
        for b in &probabilities {
            if r < b.p {
                outcome = b.basis.clone();
                break;
            }
            r -= b.p;
        }
        let count = |f: fn(&Message) -> bool| out.transcript.entries().iter().filter(|e| f(&e.message)).count();
        Ok(RunReport {
            protocol: cfg.protocol,
            transport: match cfg.transport {
                TransportMode::InProcess => "in_process".into(),
                TransportMode::Socket(_) => "socket".into(),
            },
            source_wires: circuit.num_wires(),
            register_wires: w,
            slots: out.compiled.num_slots(),
            ancillas: out.compiled.num_ancillas(),
            leakage: out.compiled.leakage.clone(),
            messages: out.transcript.len(),
            report_bits: count(|m| matches!(m, Message::MeasuredBit { .. })),
            decision_bits: count(|m| matches!(m, Message::CorrectionDecision { .. })),
            transcript_bits: out.transcript.bits().iter().map(|b| char::from(b'0' + b)).collect(),
            fidelity,
            probabilities,
            outcome,
        })
    }

    fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "protocol {}", self.protocol);
        let _ = writeln!(s, "transport {}", self.transport);
        let _ = writeln!(s, "wires {} (source {})", self.register_wires, self.source_wires);
        let _ = writeln!(s, "slots {}", self.slots);
        let _ = writeln!(s, "ancillas {}", self.ancillas);
        let _ = write!(s, "leakage size {}", self.leakage.size);
        if let Some(cnots) = &self.leakage.cnot_positions {
            let list: Vec<String> = cnots.iter().map(|c| format!("{}:{}->{}", c.index, c.control, c.target)).collect();
            let _ = write!(s, ", cnots [{}]", list.join(" "));
        }
        s.push('\n');
        let _ = writeln!(
            s,
            "transcript {} messages, {} report bits, {} decision bits",
            self.messages, self.report_bits, self.decision_bits
        );
        let _ = writeln!(s, "bits {}", self.transcript_bits);
        let _ = writeln!(s, "fidelity {:.12}", self.fidelity);
        s.push_str("probabilities\n");
        for b in &self.probabilities {
            let _ = writeln!(s, "  {} {:.12}", b.basis, b.p);
        }
        let _ = writeln!(s, "outcome {}", self.outcome);
        s
    }
}

fn cmd_run(args: &SessionArgs, connect: Option<&str>, policy: AdversaryPolicy, file: &Path) -> Result<Outcome> {
    let mut cfg = args.config()?;
    if let Some(addr) = connect {
        if policy != AdversaryPolicy::None {
            return Err(Error::Config("--policy applies to serve-bob when running over a socket".into()));
        }
        cfg.transport = TransportMode::Socket(addr.to_string());
    }
    let circuit = read_circuit(file)?;
    let input = input_for(args.input.as_deref(), circuit.num_wires())?;
    let compiled = compile(&circuit, cfg.protocol, &mut party_rng(cfg.alice_seed, ALICE_STREAM))?;
    cfg.check_caps(&compiled)?;
    let session = cfg.session();
    let out = match &cfg.transport {
        TransportMode::InProcess => run_in_process(&circuit, &input, &session, policy)?,
        TransportMode::Socket(addr) => {
            run_session(&circuit, &input, &session, &mut TcpTransport::connect(addr.as_str())?)?
        }
    };
    let report = RunReport::new(&circuit, &input, &cfg, &out)?;
    let text = if args.json { to_json(&report) } else { report.render() };
    Ok(Outcome { report: text, code: EXIT_OK, output: cfg.output })
}

fn cmd_serve_bob(
    listen: &str,
    bob_seed: u64,
    adversary_seed: u64,
    policy: AdversaryPolicy,
    sessions: usize,
) -> Result<Outcome> {
    let listener =
        TcpListener::bind(listen).map_err(|e| Error::Transport(format!("cannot listen on {listen}: {e}")))?;
    let addr = listener.local_addr().map_err(|e| Error::Transport(e.to_string()))?;
    {
        let mut stdout = std::io::stdout().lock();
        let _ = writeln!(stdout, "listening {addr}");
        let _ = stdout.flush();
    }
    let mut served = 0;
    while sessions == 0 || served < sessions {
        let (stream, _) = listener.accept().map_err(|e| Error::Transport(e.to_string()))?;
        serve_bob(stream, BobState::new(bob_seed, adversary_seed, policy))?;
        served += 1;
    }
    Ok(Outcome { report: format!("served {served}\n"), code: EXIT_OK, output: None })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn cmd_audit(
    args: &SessionArgs,
    budget: usize,
    seeds: usize,
    mc: usize,
    input_b: Option<&str>,
    file: &Path,
    file_b: Option<&Path>,
) -> Result<Outcome> {
    let cfg = args.config()?;
    let session = cfg.session();
    let circuit = read_circuit(file)?;
    let input = input_for(args.input.as_deref(), circuit.num_wires())?;
    let Some(file_b) = file_b else {
        let received = received_qubit_count(&circuit, &input, &session)?;
        let count = received.min(budget.min(MAX_SECRET_BUDGET) / 2).max(1);
        let view = bob_partial_view(&circuit, &input, &session, count, 2 * count)?;
        let singles = single_qubit_deviations(&circuit, &input, &session)?;
        let single_max = singles.iter().copied().fold(0.0, f64::max);
        let first = first_report_view(&circuit, &input, &session);
        let (first_dev, first_note) = match &first {
            Ok(Some(v)) => (Some(v.deviation), None),
            Ok(None) => (None, Some("no gadget")),
            Err(Error::BudgetExceeded(_)) => (None, Some("over budget")),
            Err(e) => return Err(e.clone()),
        };
        let ok =
            view.deviation <= ALGEBRA_TOL && single_max <= ALGEBRA_TOL && first_dev.is_none_or(|d| d <= ALGEBRA_TOL);
        let report = if args.json {
            to_json(&json!({
                "protocol": cfg.protocol,
                "received_qubits": received,
                "view_qubits": view.num_qubits,
                "secret_bits": view.secret_bits,
                "deviation": view.deviation,
                "single_qubit_deviation_max": single_max,
                "first_report_deviation": first_dev,
                "pass": ok,
            }))
        } else {
            let mut s = String::new();
            let _ = writeln!(s, "audit protocol {}", cfg.protocol);
            let _ = writeln!(s, "received_qubits {received}");
            let _ = writeln!(s, "view_qubits {} ({} key bits)", view.num_qubits, view.secret_bits);
            let _ = writeln!(s, "mixedness {} deviation {:.3e}", pass(view.deviation <= ALGEBRA_TOL), view.deviation);
            let _ = writeln!(s, "single_qubit {} deviation {:.3e}", pass(single_max <= ALGEBRA_TOL), single_max);
            match (first_dev, first_note) {
                (Some(d), _) => {
                    let _ = writeln!(s, "first_report {} deviation {d:.3e}", pass(d <= ALGEBRA_TOL));
                }
                (None, note) => {
                    let _ = writeln!(s, "first_report skipped ({})", note.unwrap_or(""));
                }
            }
            let _ = writeln!(s, "result {}", pass(ok));
            s
        };
        let code = if ok { EXIT_OK } else { EXIT_CHECK_FAILED };
        return Ok(Outcome { report, code, output: cfg.output });
    };

    let circuit_b = read_circuit(file_b)?;
    let input_b = input_for(input_b.or(args.input.as_deref()), circuit_b.num_wires())?;
    let report = match transcript_independence((&circuit, &input), (&circuit_b, &input_b), &session, seeds, mc) {
        Ok(r) => r,
        Err(Error::LeakageMismatch(m)) => {
            let report = if args.json {
                to_json(&json!({ "precondition": false, "reason": m }))
            } else {
                format!("precondition FAIL leakage descriptors differ: {m}\n")
            };
            return Ok(Outcome { report, code: EXIT_CHECK_FAILED, output: cfg.output });
        }
        Err(e) => return Err(e),
    };
    let text = if args.json {
        to_json(&report)
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "independence protocol {}", report.protocol);
        let _ = writeln!(s, "leakage size {}", report.leakage.size);
        let _ = writeln!(s, "sessions_per_circuit {}", report.seeds);
        let _ = writeln!(s, "shapes_equal {}", report.shapes_equal);
        let _ = writeln!(s, "max_gap {:.3e}", report.max_gap);
        let _ = writeln!(s, "max_bias {:.3e}", report.max_bias);
        let _ = writeln!(s, "exact {}", pass(report.exact_pass));
        if let Some(m) = &report.monte_carlo {
            let _ = writeln!(s, "monte_carlo {} tv {:.4} over {} sessions", pass(m.pass), m.tv, m.sessions);
        }
        let _ = writeln!(s, "result {}", pass(report.pass()));
        s
    };
    let code = if report.pass() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Outcome { report: text, code, output: cfg.output })
}

#[derive(Debug, Clone, Serialize)]
struct AxisRow {
    row: usize,
    word: String,
    computed: [f64; 3],
    printed: [f64; 3],
    matches: bool,
}

fn relation(a: [f64; 3], b: [f64; 3]) -> &'static str {
    if !same_direction(a, b, 1e-9) {
        "not parallel"
    } else if a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() > 0.0 {
        "parallel"
    } else {
        "antiparallel"
    }
}

fn axes_report(as_json: bool) -> Result<String> {
    let rows = table1_rows();
    let mut out = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let computed = table1_axis(&r.word)?.axis;
        out.push(AxisRow {
            row: i + 1,
            word: r.word.to_string(),
            computed,
            printed: r.printed_axis,
            matches: same_direction(computed, r.printed_axis, 1e-9),
        });
    }
    let t = Letter::Phase(Angle8::T);
    let htht = TLikeWord(vec![Letter::H, t, Letter::H, t]);
    let htht_axis = table1_axis(&htht)?.axis;
    let row4_vs_htht = relation(out[3].computed, htht_axis);
    let row4_vs_row1 = relation(out[3].computed, out[0].computed);
    let row1_vs_htht = relation(out[0].computed, htht_axis);
    if as_json {
        return Ok(to_json(&json!({
            "rows": out,
            "row4_vs_htht": row4_vs_htht,
            "row4_vs_row1": row4_vs_row1,
            "row1_vs_htht": row1_vs_htht,
        })));
    }
    let v = |a: [f64; 3]| format!("({:+.6}, {:+.6}, {:+.6})", a[0], a[1], a[2]);
    let mut s = String::new();
    for r in &out {
        let status = if r.matches { "match" } else { "MISMATCH" };
        let _ = writeln!(s, "{} {:<10} computed {} printed {} {status}", r.row, r.word, v(r.computed), v(r.printed));
    }
    let matched = out.iter().filter(|r| r.matches).count();
    let _ = writeln!(s, "matches {matched}/{}", out.len());
    let _ = writeln!(s, "row 4 ({}) vs {htht}: {row4_vs_htht}", out[3].word);
    let _ = writeln!(s, "row 4 ({}) vs row 1 ({}): {row4_vs_row1}", out[3].word, out[0].word);
    let _ = writeln!(s, "row 1 ({}) vs {htht}: {row1_vs_htht}", out[0].word);
    Ok(s)
}
