//! Blindness checks: what Bob holds at receipt, and whether his classical
//! transcript depends on anything beyond the leakage descriptor.
//!
//! Both checks are exact where the simulator allows it. Bob's quantum view is
//! the key-averaged density matrix of every qubit he receives, built by
//! enumerating all key assignments. Transcript laws use the Born
//! probabilities Bob's simulator recorded for each report bit; decision bits
//! are functions of Alice's hidden `a` key (or her coin for angle-0 gadgets)
//! and are fair by construction.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::compile::{compile, BobOp, Circuit, Protocol};
pub use crate::compile::{leakage_of, LeakageDescriptor};
use crate::engine::{run_in_process, AdversaryPolicy, Message, SessionConfig, SessionOutput};
use crate::error::{Error, Result};
use crate::frame::{encrypt_qubit, WireKeys};
use crate::gadget::{teleport_into, AncillaPurpose, AncillaSpec};
use crate::simcore::{indexed_rng, party_rng, DensityMatrix, PureState, Qubit, ScriptedOutcomes, ALGEBRA_TOL, C64};

/// Default cap on enumerated secret bits.
pub const DEFAULT_SECRET_BUDGET: usize = 12;

/// Enumeration is never attempted past this many secret bits.
pub const MAX_SECRET_BUDGET: usize = 20;

/// Monte-Carlo sessions per circuit in [`transcript_independence`].
pub const MC_SESSIONS: usize = 10_000;

/// Largest Monte-Carlo total-variation distance that still passes.
pub const MC_TV_LIMIT: f64 = 0.05;

const AUDIT_STREAM: u64 = 6;

#[derive(Debug, Clone)]
pub struct QuantumView {
    pub density: DensityMatrix,
    /// Register wires followed by ancillas, in the order Bob receives them.
    pub num_qubits: usize,
    pub secret_bits: usize,
    /// Largest entrywise distance from `I / 2^q`.
    pub deviation: f64,
}

impl QuantumView {
    pub fn is_maximally_mixed(&self) -> bool {
        self.deviation <= ALGEBRA_TOL
    }
}

/// Plaintext of every qubit Bob receives, in transfer order.
fn received_plaintext(circuit: &Circuit, input: &[Qubit], config: &SessionConfig) -> Result<Vec<Qubit>> {
    if input.len() != circuit.num_wires() {
        return Err(Error::LengthMismatch { expected: circuit.num_wires(), got: input.len() });
    }
    let mut rng = party_rng(config.alice_seed, crate::engine::ALICE_STREAM);
    let compiled = compile(circuit, config.protocol, &mut rng)?;
    let mut qubits = input.to_vec();
    qubits.resize(compiled.num_wires(), [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    for &angle in &compiled.angles {
        qubits.push(AncillaSpec::new(angle, 0, 0, AncillaPurpose::Primary).qubit());
        qubits.push(AncillaSpec::new(angle.double(), 0, 0, AncillaPurpose::Correction).qubit());
    }
    Ok(qubits)
}

fn keyed_mixture(qubits: &[Qubit], encrypt: bool) -> Result<DensityMatrix> {
    let q = qubits.len();
    let assignments: u64 = if encrypt { 1 << (2 * q) } else { 1 };
    let weight = 1.0 / assignments as f64;
    let mut rho = DensityMatrix::zeros(1 << q);
    for keys in 0..assignments {
        let encrypted: Vec<Qubit> = qubits
            .iter()
            .enumerate()
            .map(|(i, qb)| {
                let bits = (keys >> (2 * i)) & 3;
                encrypt_qubit(qb, WireKeys::new((bits & 1) as u8, (bits >> 1) as u8))
            })
            .collect();
        rho.add_pure(weight, &PureState::product(&encrypted)?);
    }
    Ok(rho)
}

/// The joint state of every qubit Bob receives, averaged over all key
/// assignments. The compiled angles are those drawn from Alice's seed; the
/// view is computed conditioned on them. With encryption off there are no
/// secrets and the view is the pure product state.
pub fn bob_quantum_view(
    circuit: &Circuit,
    input: &[Qubit],
    config: &SessionConfig,
    budget: usize,
) -> Result<QuantumView> {
    let qubits = received_plaintext(circuit, input, config)?;
    view_of(&qubits, config.encrypt, budget)
}

/// [`bob_quantum_view`] restricted to the first `count` qubits Bob receives
/// (register wires first, then ancillas in label order).
pub fn bob_partial_view(
    circuit: &Circuit,
    input: &[Qubit],
    config: &SessionConfig,
    count: usize,
    budget: usize,
) -> Result<QuantumView> {
    let qubits = received_plaintext(circuit, input, config)?;
    view_of(&qubits[..count.min(qubits.len())], config.encrypt, budget)
}

/// Number of qubits Bob receives in a session.
pub fn received_qubit_count(circuit: &Circuit, input: &[Qubit], config: &SessionConfig) -> Result<usize> {
    Ok(received_plaintext(circuit, input, config)?.len())
}

/// Each received qubit's own key-averaged state, as a distance from `I/2`.
pub fn single_qubit_deviations(circuit: &Circuit, input: &[Qubit], config: &SessionConfig) -> Result<Vec<f64>> {
    received_plaintext(circuit, input, config)?
        .iter()
        .map(|q| Ok(keyed_mixture(std::slice::from_ref(q), config.encrypt)?.deviation_from_maximally_mixed()))
        .collect()
}

fn view_of(qubits: &[Qubit], encrypt: bool, budget: usize) -> Result<QuantumView> {
    if qubits.is_empty() {
        return Err(Error::ZeroWires);
    }
    let secret_bits = if encrypt { 2 * qubits.len() } else { 0 };
    let budget = budget.min(MAX_SECRET_BUDGET);
    if secret_bits > budget {
        return Err(Error::BudgetExceeded(format!(
            "{} received qubits carry {secret_bits} key bits, budget is {budget}",
            qubits.len()
        )));
    }
    let density = keyed_mixture(qubits, encrypt)?;
    let deviation = density.deviation_from_maximally_mixed();
    Ok(QuantumView { density, num_qubits: qubits.len(), secret_bits, deviation })
}

/// Bob's classical-quantum state right after the first gadget's report:
/// `Σ_c |c⟩⟨c| ⊗ ρ_c` over the register, averaged over the register keys and
/// the primary ancilla's keys. Honest blindness makes it `I / 2^(W+1)`.
/// Returns `None` when the public circuit has no gadget.
pub fn first_report_view(circuit: &Circuit, input: &[Qubit], config: &SessionConfig) -> Result<Option<QuantumView>> {
    let mut rng = party_rng(config.alice_seed, crate::engine::ALICE_STREAM);
    let compiled = compile(circuit, config.protocol, &mut rng)?;
    let Some(first) = compiled.public.ops.iter().position(|op| matches!(op, BobOp::Teleport { .. })) else {
        return Ok(None);
    };
    let BobOp::Teleport { slot, wire } = compiled.public.ops[first] else { unreachable!() };
    let mut register = input.to_vec();
    register.resize(compiled.num_wires(), [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let w = register.len();
    let secret_bits = if config.encrypt { 2 * (w + 1) } else { 0 };
    if secret_bits > MAX_SECRET_BUDGET {
        return Err(Error::BudgetExceeded(format!("{secret_bits} key bits")));
    }
    let plain_ancilla = AncillaSpec::new(compiled.angles[slot], 0, 0, AncillaPurpose::Primary).qubit();
    let assignments: u64 = if config.encrypt { 1 << (2 * (w + 1)) } else { 1 };
    let weight = 1.0 / assignments as f64;
    // The bit is the most significant wire of the result.
    let mut density = DensityMatrix::zeros(1 << (w + 1));
    for keys in 0..assignments {
        let key = |i: usize| {
            let bits = (keys >> (2 * i)) & 3;
            WireKeys::new((bits & 1) as u8, (bits >> 1) as u8)
        };
        let encrypted: Vec<Qubit> = register.iter().enumerate().map(|(i, q)| encrypt_qubit(q, key(i))).collect();
        let ancilla = encrypt_qubit(&plain_ancilla, key(w));
        let mut start = PureState::product(&encrypted)?;
        for op in &compiled.public.ops[..first] {
            start.apply(&op.clifford_gate().expect("Clifford op before the first gadget"))?;
        }
        for c in 0..2u8 {
            let mut state = start.clone();
            let report = teleport_into(&mut state, wire, ancilla, &mut ScriptedOutcomes::new([c]))?;
            let p = if c == 1 { report.p_one } else { 1.0 - report.p_one };
            if p <= 0.0 {
                continue;
            }
            let bit: Qubit = if c == 0 {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            };
            let joint = PureState::product(&[bit])?.tensor(&state)?;
            density.add_pure(weight * p, &joint);
        }
    }
    let deviation = density.deviation_from_maximally_mixed();
    Ok(Some(QuantumView { density, num_qubits: w + 1, secret_bits, deviation }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BitKind {
    Report,
    Decision,
}

/// One transcript bit and its probability of being 1 given everything
/// earlier in the transcript.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitLaw {
    pub kind: BitKind,
    pub slot: usize,
    pub p_one: f64,
}

/// Exact law of one session's transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptLaw {
    pub shape: Vec<u8>,
    pub bits: Vec<BitLaw>,
}

impl TranscriptLaw {
    /// Reads the law off an in-process session.
    pub fn of(out: &SessionOutput) -> Result<Self> {
        let probs = out
            .report_probs
            .as_ref()
            .ok_or_else(|| Error::Config("transcript law needs Bob's recorded probabilities".into()))?;
        let mut bits = Vec::new();
        for e in out.transcript.entries() {
            match e.message {
                Message::MeasuredBit { slot, .. } => {
                    let p = probs
                        .iter()
                        .find(|(s, _)| *s == slot)
                        .map(|&(_, p)| p)
                        .ok_or_else(|| Error::Protocol(format!("no recorded probability for slot {slot}")))?;
                    bits.push(BitLaw { kind: BitKind::Report, slot, p_one: p });
                }
                // needed = a ⊕ c ⊕ x with `a` uniform and hidden from Bob, or
                // Alice's fair coin for angle-0 gadgets.
                Message::CorrectionDecision { slot, .. } => {
                    bits.push(BitLaw { kind: BitKind::Decision, slot, p_one: 0.5 })
                }
                _ => {}
            }
        }
        Ok(TranscriptLaw { shape: out.transcript.shape(), bits })
    }

    /// Largest probability gap to `other`, or `None` when the shapes or bit
    /// layouts differ.
    pub fn gap(&self, other: &TranscriptLaw) -> Option<f64> {
        if self.shape != other.shape || self.bits.len() != other.bits.len() {
            return None;
        }
        let mut gap: f64 = 0.0;
        for (a, b) in self.bits.iter().zip(&other.bits) {
            if a.kind != b.kind || a.slot != b.slot {
                return None;
            }
            gap = gap.max((a.p_one - b.p_one).abs());
        }
        Some(gap)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub sessions: usize,
    /// Largest total-variation distance over single-bit and adjacent-pair
    /// marginals.
    pub tv: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub protocol: Protocol,
    pub leakage: LeakageDescriptor,
    pub seeds: usize,
    pub shapes_equal: bool,
    /// Largest per-bit probability gap across all compared sessions.
    pub max_gap: f64,
    /// Largest distance of any bit probability from 1/2.
    pub max_bias: f64,
    pub exact_pass: bool,
    pub monte_carlo: Option<MonteCarloReport>,
}

impl IndependenceReport {
    pub fn pass(&self) -> bool {
        self.exact_pass && self.monte_carlo.as_ref().is_none_or(|m| m.pass)
    }
}

fn session(circuit: &Circuit, input: &[Qubit], base: &SessionConfig, alice: u64, bob: u64) -> Result<SessionOutput> {
    let mut config = *base;
    config.alice_seed = alice;
    config.bob_seed = bob;
    run_in_process(circuit, input, &config, AdversaryPolicy::None)
}

/// Per-bit and adjacent-pair marginal histograms of transcript bit strings.
fn marginals(samples: &[Vec<u8>]) -> (Vec<f64>, Vec<[f64; 4]>) {
    let len = samples.iter().map(Vec::len).max().unwrap_or(0);
    let n = samples.len() as f64;
    let mut single = vec![0.0; len];
    let mut pairs = vec![[0.0; 4]; len.saturating_sub(1)];
    for s in samples {
        for (i, &b) in s.iter().enumerate() {
            single[i] += f64::from(b) / n;
            if i + 1 < s.len() {
                pairs[i][usize::from(b) * 2 + usize::from(s[i + 1])] += 1.0 / n;
            }
        }
    }
    (single, pairs)
}

fn marginal_tv(a: &[Vec<u8>], b: &[Vec<u8>]) -> f64 {
    let (sa, pa) = marginals(a);
    let (sb, pb) = marginals(b);
    if sa.len() != sb.len() {
        return 1.0;
    }
    let single = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let pair = pa
        .iter()
        .zip(&pb)
        .map(|(x, y)| 0.5 * x.iter().zip(y).map(|(u, v)| (u - v).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    single.max(pair)
}

/// Checks that two circuits with the same leakage give Bob transcripts with
/// the same law. `seeds` sessions per circuit are compared exactly;
/// `mc_sessions` more per circuit (if nonzero) feed the Monte-Carlo check.
pub fn transcript_independence(
    a: (&Circuit, &[Qubit]),
    b: (&Circuit, &[Qubit]),
    config: &SessionConfig,
    seeds: usize,
    mc_sessions: usize,
) -> Result<IndependenceReport> {
    let mut rng = party_rng(config.alice_seed, crate::engine::ALICE_STREAM);
    let la = leakage_of(&compile(a.0, config.protocol, &mut rng)?.public)?;
    let lb = leakage_of(&compile(b.0, config.protocol, &mut rng)?.public)?;
    if la != lb {
        return Err(Error::LeakageMismatch(format!("{la:?} vs {lb:?}")));
    }

    let laws = |(c, input): (&Circuit, &[Qubit]), offset: u64| -> Result<Vec<TranscriptLaw>> {
        (0..seeds as u64)
            .into_par_iter()
            .map(|i| {
                let mut seeds = indexed_rng(config.alice_seed, offset + i, AUDIT_STREAM);
                TranscriptLaw::of(&session(c, input, config, seeds.random(), seeds.random())?)
            })
            .collect()
    };
    let laws_a = laws(a, 0)?;
    let laws_b = laws(b, 1 << 32)?;
    let reference = laws_a.first().or(laws_b.first());
    let mut shapes_equal = true;
    let mut max_gap: f64 = 0.0;
    let mut max_bias: f64 = 0.0;
    if let Some(reference) = reference {
        for law in laws_a.iter().chain(&laws_b) {
            match reference.gap(law) {
                Some(g) => max_gap = max_gap.max(g),
                None => shapes_equal = false,
            }
            for bit in &law.bits {
                max_bias = max_bias.max((bit.p_one - 0.5).abs());
            }
        }
    }
    let exact_pass = shapes_equal && max_gap <= ALGEBRA_TOL;

    let monte_carlo = if mc_sessions > 0 {
        let sample = |(c, input): (&Circuit, &[Qubit]), offset: u64| -> Result<Vec<Vec<u8>>> {
            (0..mc_sessions as u64)
                .into_par_iter()
                .map(|i| {
                    let mut seeds = indexed_rng(config.alice_seed, offset + i, AUDIT_STREAM);
                    Ok(session(c, input, config, seeds.random(), seeds.random())?.transcript.bits())
                })
                .collect()
        };
        let tv = marginal_tv(&sample(a, 1 << 40)?, &sample(b, 1 << 41)?);
        Some(MonteCarloReport { sessions: mc_sessions, tv, pass: tv < MC_TV_LIMIT })
    } else {
        None
    };

    Ok(IndependenceReport {
        protocol: config.protocol,
        leakage: la,
        seeds,
        shapes_equal,
        max_gap,
        max_bias,
        exact_pass,
        monte_carlo,
    })
}
