use rand::Rng;

use super::message::{ancilla_label, decode_result, input_label, Message};
use crate::compile::{compile, BobOp, Circuit, CompiledCircuit};
use crate::error::{Error, Result};
use crate::frame::{decrypt, encrypt_qubit, KeyFrame, WireKeys};
use crate::gadget::{AliceReply, AncillaSpec, CascadeAlice, CascadeMode};
use crate::simcore::{party_rng, PureState, Qubit, SeededRng, C64};

use super::SessionConfig;

/// Alice: owns the circuit, every key and every angle.
#[derive(Debug, Clone)]
pub struct AliceState {
    compiled: CompiledCircuit,
    input: Vec<Qubit>,
    frame: KeyFrame,
    ancillas: Vec<AncillaSpec>,
    rng: SeededRng,
    mode: CascadeMode,
    cursor: usize,
    open: Option<(usize, usize, CascadeAlice)>,
}

impl AliceState {
    /// Compiles `circuit` and draws all keys. `input` holds one qubit per
    /// source wire; padding wires start in |0⟩.
    pub fn prepare(circuit: &Circuit, input: &[Qubit], config: &SessionConfig) -> Result<Self> {
        if input.len() != circuit.num_wires() {
            return Err(Error::LengthMismatch { expected: circuit.num_wires(), got: input.len() });
        }
        let mut rng = party_rng(config.alice_seed, super::ALICE_STREAM);
        let compiled = compile(circuit, config.protocol, &mut rng)?;
        let mut full = input.to_vec();
        full.resize(compiled.num_wires(), [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let w = compiled.num_wires();
        let frame = if config.encrypt { KeyFrame::random(w, &mut rng) } else { KeyFrame::zeros(w) };
        let mut ancillas = Vec::with_capacity(compiled.num_ancillas());
        for &angle in &compiled.angles {
            let (mut p, mut c) = AncillaSpec::pair(angle, &mut rng);
            if !config.encrypt {
                (p.a, p.b, c.a, c.b) = (0, 0, 0, 0);
            }
            ancillas.push(p);
            ancillas.push(c);
        }
        Ok(AliceState { compiled, input: full, frame, ancillas, rng, mode: config.mode, cursor: 0, open: None })
    }

    pub fn compiled(&self) -> &CompiledCircuit {
        &self.compiled
    }

    pub fn frame(&self) -> &KeyFrame {
        &self.frame
    }

    pub fn ancillas(&self) -> &[AncillaSpec] {
        &self.ancillas
    }

    /// Encrypted register qubits, in wire order.
    pub fn encrypted_inputs(&self) -> Vec<Qubit> {
        self.input.iter().enumerate().map(|(w, q)| encrypt_qubit(q, self.frame.wire(w))).collect()
    }

    /// Step 3: every qubit Bob will need, then the circuit.
    pub fn opening_messages(&self) -> Vec<Message> {
        let mut out: Vec<Message> =
            self.encrypted_inputs().iter().enumerate().map(|(w, q)| Message::qubit(input_label(w), q)).collect();
        out.extend(self.ancillas.iter().enumerate().map(|(k, a)| Message::qubit(ancilla_label(k), &a.qubit())));
        out.push(Message::CircuitAnnounce { circuit: self.compiled.public.clone(), mode: self.mode });
        out
    }

    /// Follows Bob through Clifford operations up to the next gadget.
    fn advance(&mut self) -> Result<Option<(usize, usize)>> {
        while let Some(op) = self.compiled.public.ops.get(self.cursor).copied() {
            self.cursor += 1;
            match op {
                BobOp::Teleport { slot, wire } => return Ok(Some((slot, wire))),
                _ => {
                    self.frame.update_for_gate(&op.clifford_gate().expect("Clifford op"))?;
                }
            }
        }
        Ok(None)
    }

    /// Reacts to one message from Bob. Returns Alice's replies and, once
    /// Bob's register has come back, the decrypted output.
    pub fn receive(&mut self, msg: &Message) -> Result<(Vec<Message>, Option<PureState>)> {
        msg.validate()?;
        match msg {
            Message::MeasuredBit { slot, bit } => {
                if self.open.is_none() {
                    let (gadget, wire) =
                        self.advance()?.ok_or_else(|| Error::Protocol("report after the last gadget".into()))?;
                    let (p, c) = (self.ancillas[2 * gadget], self.ancillas[2 * gadget + 1]);
                    let cascade = CascadeAlice::new(self.compiled.angles[gadget], p, c, self.mode)?;
                    self.open = Some((gadget, wire, cascade));
                }
                let (gadget, wire, cascade) = self.open.as_mut().expect("gadget open");
                let (gadget, wire) = (*gadget, *wire);
                let keys: &mut WireKeys = self.frame.wire_mut(wire);
                if *slot == 2 * gadget {
                    let AliceReply::Correction(needed) = cascade.on_round1(*bit, keys, &mut self.rng)? else {
                        unreachable!("round 1 answers with a decision")
                    };
                    if cascade.is_finished() {
                        self.open = None;
                    }
                    Ok((vec![Message::CorrectionDecision { slot: *slot, bit: u8::from(needed) }], None))
                } else if *slot == 2 * gadget + 1 {
                    let reply = cascade.on_round2(*bit, keys)?;
                    self.open = None;
                    let out = match reply {
                        Some(AliceReply::ApplyZ) => vec![Message::ApplyZ { wire: input_label(wire) }],
                        Some(_) => vec![Message::CorrectionDecision { slot: *slot, bit: 0 }],
                        None => Vec::new(),
                    };
                    Ok((out, None))
                } else {
                    Err(Error::Protocol(format!("report for slot {slot} while gadget {gadget} is open")))
                }
            }
            Message::ResultTransfer { amp, wires } => {
                if self.open.is_some() || self.advance()?.is_some() {
                    return Err(Error::Protocol("result arrived before every gadget finished".into()));
                }
                if wires.len() != self.compiled.num_wires() {
                    return Err(Error::Protocol(format!("result has {} wires", wires.len())));
                }
                let state = decode_result(amp)?;
                let out = decrypt(&state, &self.frame)?;
                Ok((vec![Message::Done], Some(out)))
            }
            other => Err(Error::Protocol(format!("Alice does not accept {other:?}"))),
        }
    }

    /// Alice's own coin, for callers that need extra session randomness.
    pub fn rng(&mut self) -> &mut impl Rng {
        &mut self.rng
    }
}
