//! The two-party protocol: Alice's and Bob's state machines and the session
//! driver.
//!
//! Alice drives. She sends every qubit, announces the public circuit, then
//! answers Bob's report bits until his register comes back. Bob only reacts
//! to what he receives. A [`Transport`] carries the messages; the in-process
//! one holds Bob directly, the socket one lives in [`crate::cli`].

mod alice;
mod bob;
mod message;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use alice::AliceState;
pub use bob::{AdversaryPolicy, BobAction, BobState};
pub use message::{
    ancilla_label, decode_qubit, decode_result, input_label, parse_label, Direction, Message, Transcript,
    TranscriptEntry, WIRE_NORM_TOL,
};

use crate::compile::{Circuit, CompiledCircuit, Protocol};
use crate::error::{Error, Result};
use crate::frame::KeyFrame;
use crate::gadget::{AncillaSpec, CascadeMode};
use crate::simcore::{PureState, Qubit, C64, FRAC_1_SQRT_2};

pub(crate) const ALICE_STREAM: u64 = 1;
pub(crate) const BOB_STREAM: u64 = 2;
pub(crate) const ADVERSARY_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub alice_seed: u64,
    pub bob_seed: u64,
    pub adversary_seed: u64,
    pub mode: CascadeMode,
    /// Off only for diagnostics: all keys zero.
    pub encrypt: bool,
}

impl SessionConfig {
    pub fn new(protocol: Protocol, alice_seed: u64, bob_seed: u64) -> Self {
        SessionConfig { protocol, alice_seed, bob_seed, adversary_seed: 0, mode: CascadeMode::default(), encrypt: true }
    }
}

/// An ordered, reliable channel from Alice's side.
pub trait Transport {
    fn send(&mut self, msg: &Message) -> Result<()>;
    fn recv(&mut self) -> Result<Message>;

    /// Bob's state when he runs in this process.
    fn bob(&self) -> Option<&BobState> {
        None
    }
}

/// Bob in the same process; each send runs him until he waits again.
#[derive(Debug, Clone)]
pub struct InProcess {
    bob: BobState,
    outbox: VecDeque<Message>,
}

impl InProcess {
    pub fn new(bob: BobState) -> Self {
        InProcess { bob, outbox: VecDeque::new() }
    }

    pub fn into_bob(self) -> BobState {
        self.bob
    }
}

impl Transport for InProcess {
    fn send(&mut self, msg: &Message) -> Result<()> {
        self.outbox.extend(self.bob.handle(msg.clone())?);
        Ok(())
    }

    fn recv(&mut self) -> Result<Message> {
        self.outbox.pop_front().ok_or_else(|| Error::Protocol("Bob is waiting but Alice expects a message".into()))
    }

    fn bob(&self) -> Option<&BobState> {
        Some(&self.bob)
    }
}

#[derive(Debug, Clone)]
pub struct SessionOutput {
    /// Decrypted register, padding wires included.
    pub output: PureState,
    pub transcript: Transcript,
    pub compiled: CompiledCircuit,
    pub frame: KeyFrame,
    pub ancillas: Vec<AncillaSpec>,
    /// Present when Bob ran in this process.
    pub bob_log: Option<Vec<BobAction>>,
    pub report_probs: Option<Vec<(usize, f64)>>,
}

/// Runs Steps 3–5 of either protocol over `transport`.
pub fn run_session(
    circuit: &Circuit,
    input: &[Qubit],
    config: &SessionConfig,
    transport: &mut impl Transport,
) -> Result<SessionOutput> {
    let mut alice = AliceState::prepare(circuit, input, config)?;
    let mut transcript = Transcript::default();
    for m in alice.opening_messages() {
        transport.send(&m)?;
        transcript.push(Direction::ToBob, m);
    }
    let output = loop {
        let msg = transport.recv()?;
        transcript.push(Direction::ToAlice, msg.clone());
        let (replies, out) = alice.receive(&msg)?;
        for r in replies {
            transport.send(&r)?;
            transcript.push(Direction::ToBob, r);
        }
        if let Some(out) = out {
            break out;
        }
    };
    Ok(SessionOutput {
        output,
        transcript,
        compiled: alice.compiled().clone(),
        frame: alice.frame().clone(),
        ancillas: alice.ancillas().to_vec(),
        bob_log: transport.bob().map(|b| b.log().to_vec()),
        report_probs: transport.bob().map(|b| b.report_probs().to_vec()),
    })
}

pub fn run_in_process(
    circuit: &Circuit,
    input: &[Qubit],
    config: &SessionConfig,
    policy: AdversaryPolicy,
) -> Result<SessionOutput> {
    let bob = BobState::new(config.bob_seed, config.adversary_seed, policy);
    run_session(circuit, input, config, &mut InProcess::new(bob))
}

/// `0`, `1`, `+` or `-`.
pub fn input_qubit(c: char) -> Result<Qubit> {
    let (o, z, h) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(FRAC_1_SQRT_2, 0.0));
    match c {
        '0' => Ok([o, z]),
        '1' => Ok([z, o]),
        '+' => Ok([h, h]),
        '-' => Ok([h, -h]),
        _ => Err(Error::Config(format!("input qubit must be one of 0 1 + -, got {c:?}"))),
    }
}

pub fn parse_input(s: &str) -> Result<Vec<Qubit>> {
    s.chars().filter(|c| !c.is_whitespace()).map(input_qubit).collect()
}

/// Direct simulation of `circuit` on `input`, padded with |0⟩ to `width`.
pub fn reference_output(circuit: &Circuit, input: &[Qubit], width: usize) -> Result<PureState> {
    let mut qubits = input.to_vec();
    qubits.resize(width.max(input.len()), [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let start = PureState::product(&qubits)?;
    let wide = circuit.widened(qubits.len())?;
    wide.simulate(&start)
}

#[cfg(test)]
mod tests;
