use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::message::{ancilla_label, decode_qubit, input_label, parse_label, Message};
use crate::compile::{BobOp, PublicCircuit};
use crate::error::{Error, Result};
use crate::gadget::{measure_lone, teleport_into, CascadeMode};
use crate::simcore::{party_rng, Gate, PureState, Qubit, SeededRng};

/// How Bob departs from the announced circuit. Every policy decides from
/// Bob's own view only: slot ids, his register and his adversary rng.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum AdversaryPolicy {
    #[default]
    None,
    /// Applies `gate` just before gadget `slot` (or at the end if the slot
    /// does not exist).
    ExtraGate { gate: Gate, slot: usize },
    /// Flips the first report bit of gadget `slot`.
    WrongMeasureReport { slot: usize },
    /// Measures gadget `slot`'s ancillas alone instead of teleporting.
    SkipSlot { slot: usize },
    /// After every operation, a uniformly random Pauli on each touched wire
    /// with probability `rate`.
    RandomPauli { rate: f64 },
    /// Before returning the register, applies Y to one uniformly random wire.
    SingleRandomWire,
}

/// One entry of Bob's own record of what he ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BobAction {
    Gate(Gate),
    Measure,
    /// Anything outside the honest instruction set.
    Deviation(Gate),
}

impl BobAction {
    /// Honest alphabet: H, CNOT, CZ, Z and measurements.
    pub fn is_honest_alphabet(&self) -> bool {
        matches!(self, BobAction::Measure | BobAction::Gate(Gate::H(_) | Gate::Cnot { .. } | Gate::Cz(..) | Gate::Z(_)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Receiving,
    AwaitDecision { gadget: usize, wire: usize },
    AwaitZ { wire: usize },
    AwaitDone,
    Finished,
}

/// Bob: holds the qubits, runs the announced circuit, reports bits.
#[derive(Debug, Clone)]
pub struct BobState {
    rng: SeededRng,
    adversary_rng: SeededRng,
    policy: AdversaryPolicy,
    inputs: Vec<Qubit>,
    ancillas: HashMap<usize, Qubit>,
    circuit: Option<PublicCircuit>,
    mode: CascadeMode,
    register: Option<PureState>,
    cursor: usize,
    phase: Phase,
    log: Vec<BobAction>,
    report_probs: Vec<(usize, f64)>,
}

impl BobState {
    pub fn new(bob_seed: u64, adversary_seed: u64, policy: AdversaryPolicy) -> Self {
        BobState {
            rng: party_rng(bob_seed, super::BOB_STREAM),
            adversary_rng: party_rng(adversary_seed, super::ADVERSARY_STREAM),
            policy,
            inputs: Vec::new(),
            ancillas: HashMap::new(),
            circuit: None,
            mode: CascadeMode::default(),
            register: None,
            cursor: 0,
            phase: Phase::Receiving,
            log: Vec::new(),
            report_probs: Vec::new(),
        }
    }

    pub fn honest(bob_seed: u64) -> Self {
        BobState::new(bob_seed, 0, AdversaryPolicy::None)
    }

    pub fn log(&self) -> &[BobAction] {
        &self.log
    }

    /// Born probability of a 1 for every reported bit, keyed by bit slot.
    pub fn report_probs(&self) -> &[(usize, f64)] {
        &self.report_probs
    }

    pub fn is_finished(&self) -> bool {
        self.phase == Phase::Finished
    }

    /// Processes one message from Alice and returns Bob's replies.
    pub fn handle(&mut self, msg: Message) -> Result<Vec<Message>> {
        msg.validate()?;
        match (self.phase, msg) {
            (Phase::Receiving, Message::QubitTransfer { wire, amp }) => {
                let q = decode_qubit(&amp)?;
                match parse_label(&wire)? {
                    ('q', i) if i == self.inputs.len() => self.inputs.push(q),
                    ('a', k) if !self.ancillas.contains_key(&k) => {
                        self.ancillas.insert(k, q);
                    }
                    _ => return Err(Error::Protocol(format!("unexpected qubit {wire}"))),
                }
                Ok(Vec::new())
            }
            (Phase::Receiving, Message::CircuitAnnounce { circuit, mode }) => {
                circuit.validate()?;
                if self.inputs.len() != circuit.num_wires {
                    return Err(Error::Protocol(format!(
                        "circuit has {} wires but {} qubits arrived",
                        circuit.num_wires,
                        self.inputs.len()
                    )));
                }
                if (0..2 * circuit.num_slots).any(|k| !self.ancillas.contains_key(&k)) {
                    return Err(Error::Protocol("missing ancillas for the announced slots".into()));
                }
                self.register = Some(PureState::product(&self.inputs)?);
                self.circuit = Some(circuit);
                self.mode = mode;
                self.run()
            }
            (Phase::AwaitDecision { gadget, wire }, Message::CorrectionDecision { slot, bit })
                if slot == 2 * gadget =>
            {
                self.finish_gadget(gadget, wire, bit == 1)
            }
            (Phase::AwaitZ { wire }, Message::ApplyZ { wire: label }) => {
                if parse_label(&label)? != ('q', wire) {
                    return Err(Error::Protocol(format!("ApplyZ names {label}, expected {}", input_label(wire))));
                }
                self.apply(Gate::Z(wire))?;
                self.run()
            }
            (Phase::AwaitZ { .. }, Message::CorrectionDecision { bit: 0, .. }) => self.run(),
            (Phase::AwaitDone, Message::Done) => {
                self.phase = Phase::Finished;
                Ok(Vec::new())
            }
            (phase, msg) => Err(Error::Protocol(format!("{msg:?} does not fit Bob's phase {phase:?}"))),
        }
    }

    fn register(&mut self) -> &mut PureState {
        self.register.as_mut().expect("register exists once the circuit is announced")
    }

    fn apply(&mut self, g: Gate) -> Result<()> {
        self.register().apply(&g)?;
        self.log.push(BobAction::Gate(g));
        Ok(())
    }

    fn deviate(&mut self, g: Gate) -> Result<()> {
        self.register().apply(&g)?;
        self.log.push(BobAction::Deviation(g));
        Ok(())
    }

    fn take_ancilla(&mut self, k: usize) -> Result<Qubit> {
        self.ancillas.remove(&k).ok_or_else(|| Error::Protocol(format!("ancilla {} already used", ancilla_label(k))))
    }

    fn random_paulis(&mut self, wires: &[usize]) -> Result<()> {
        if let AdversaryPolicy::RandomPauli { rate } = self.policy {
            for &w in wires {
                if self.adversary_rng.random_bool(rate.clamp(0.0, 1.0)) {
                    match self.adversary_rng.random_range(0..3) {
                        0 => self.deviate(Gate::X(w))?,
                        1 => {
                            self.deviate(Gate::X(w))?;
                            self.deviate(Gate::Z(w))?;
                        }
                        _ => self.deviate(Gate::Z(w))?,
                    }
                }
            }
        }
        Ok(())
    }

    /// Teleports ancilla `k` into `wire` (or, when skipping, measures it
    /// alone) and returns the bit to report.
    fn teleport(&mut self, k: usize, wire: usize, skip: bool) -> Result<u8> {
        let q = self.take_ancilla(k)?;
        self.log.push(BobAction::Measure);
        let report = if skip {
            measure_lone(q, &mut self.rng)?
        } else {
            self.log.push(BobAction::Gate(Gate::Cnot { control: wire + 1, target: wire }));
            let reg = self.register.as_mut().expect("register exists");
            teleport_into(reg, wire, q, &mut self.rng)?
        };
        self.report_probs.push((k, report.p_one));
        Ok(report.bit)
    }

    fn finish_gadget(&mut self, gadget: usize, wire: usize, needed: bool) -> Result<Vec<Message>> {
        let skip = self.policy == AdversaryPolicy::SkipSlot { slot: gadget };
        let k = 2 * gadget + 1;
        if needed {
            let bit = self.teleport(k, wire, skip)?;
            self.random_paulis(&[wire])?;
            if self.mode == CascadeMode::Faithful {
                self.phase = Phase::AwaitZ { wire };
                return Ok(vec![Message::MeasuredBit { slot: k, bit }]);
            }
            let mut out = vec![Message::MeasuredBit { slot: k, bit }];
            out.extend(self.run()?);
            Ok(out)
        } else if self.mode == CascadeMode::AlwaysConsume {
            let bit = self.teleport(k, wire, true)?;
            let mut out = vec![Message::MeasuredBit { slot: k, bit }];
            out.extend(self.run()?);
            Ok(out)
        } else {
            self.ancillas.remove(&k);
            self.run()
        }
    }

    /// Runs announced operations until Alice's input is needed.
    fn run(&mut self) -> Result<Vec<Message>> {
        let circuit = self.circuit.clone().expect("circuit announced");
        while let Some(op) = circuit.ops.get(self.cursor).copied() {
            self.cursor += 1;
            match op {
                BobOp::Teleport { slot, wire } => {
                    if let AdversaryPolicy::ExtraGate { gate, slot: s } = self.policy {
                        if s == slot {
                            self.deviate(gate)?;
                        }
                    }
                    let skip = self.policy == AdversaryPolicy::SkipSlot { slot };
                    let mut bit = self.teleport(2 * slot, wire, skip)?;
                    if self.policy == (AdversaryPolicy::WrongMeasureReport { slot }) {
                        bit ^= 1;
                    }
                    self.random_paulis(&[wire])?;
                    self.phase = Phase::AwaitDecision { gadget: slot, wire };
                    return Ok(vec![Message::MeasuredBit { slot: 2 * slot, bit }]);
                }
                _ => {
                    let g = op.clifford_gate().expect("non-teleport ops are Clifford gates");
                    self.apply(g)?;
                    self.random_paulis(&g.wires())?;
                }
            }
        }
        match self.policy {
            AdversaryPolicy::ExtraGate { gate, slot } if slot >= circuit.num_slots => self.deviate(gate)?,
            AdversaryPolicy::SingleRandomWire => {
                let w = self.adversary_rng.random_range(0..circuit.num_wires);
                self.deviate(Gate::X(w))?;
                self.deviate(Gate::Z(w))?;
            }
            _ => {}
        }
        self.phase = Phase::AwaitDone;
        let labels = (0..circuit.num_wires).map(input_label).collect();
        let reg = self.register.as_ref().expect("register exists");
        Ok(vec![Message::result(labels, reg)])
    }
}
