use serde::{Deserialize, Serialize};

use crate::compile::PublicCircuit;
use crate::error::{Error, Result};
use crate::gadget::CascadeMode;
use crate::simcore::{PureState, Qubit, C64};

/// Tolerance on the norm of received amplitudes.
pub const WIRE_NORM_TOL: f64 = 1e-9;

/// Everything that crosses the channel between Alice and Bob.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Message {
    /// A single qubit: `q{i}` for register wire i, `a{k}` for ancilla k.
    QubitTransfer {
        wire: String,
        amp: [f64; 4],
    },
    CircuitAnnounce {
        circuit: PublicCircuit,
        mode: CascadeMode,
    },
    MeasuredBit {
        slot: usize,
        bit: u8,
    },
    CorrectionDecision {
        slot: usize,
        bit: u8,
    },
    ApplyZ {
        wire: String,
    },
    ResultTransfer {
        wires: Vec<String>,
        amp: Vec<f64>,
    },
    Done,
}

impl Message {
    pub fn qubit(label: String, q: &Qubit) -> Message {
        Message::QubitTransfer { wire: label, amp: [q[0].re, q[0].im, q[1].re, q[1].im] }
    }

    pub fn result(wires: Vec<String>, state: &PureState) -> Message {
        Message::ResultTransfer { wires, amp: state.amplitudes().iter().flat_map(|a| [a.re, a.im]).collect() }
    }

    /// Checks field ranges and amplitude norms.
    pub fn validate(&self) -> Result<()> {
        match self {
            Message::QubitTransfer { amp, .. } => {
                decode_qubit(amp)?;
            }
            Message::MeasuredBit { bit, .. } | Message::CorrectionDecision { bit, .. } if *bit > 1 => {
                return Err(Error::WireFormat(format!("bit must be 0 or 1, got {bit}")));
            }
            Message::ResultTransfer { wires, amp } => {
                if amp.len() != 2 << wires.len() {
                    return Err(Error::WireFormat(format!(
                        "{} wires need {} amplitude entries, got {}",
                        wires.len(),
                        2 << wires.len(),
                        amp.len()
                    )));
                }
                check_norm(amp.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).sum())?;
            }
            _ => {}
        }
        Ok(())
    }
}

fn check_norm(norm: f64) -> Result<()> {
    if (norm - 1.0).abs() > WIRE_NORM_TOL {
        return Err(Error::WireFormat(format!("amplitudes have norm² {norm}")));
    }
    Ok(())
}

pub fn decode_qubit(amp: &[f64; 4]) -> Result<Qubit> {
    check_norm(amp.iter().map(|x| x * x).sum())?;
    Ok([C64::new(amp[0], amp[1]), C64::new(amp[2], amp[3])])
}

pub fn decode_result(amp: &[f64]) -> Result<PureState> {
    PureState::from_amplitudes(amp.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
}

pub fn input_label(i: usize) -> String {
    format!("q{i}")
}

pub fn ancilla_label(k: usize) -> String {
    format!("a{k}")
}

pub fn parse_label(label: &str) -> Result<(char, usize)> {
    let mut chars = label.chars();
    let kind = chars.next().ok_or_else(|| Error::WireFormat("empty wire label".into()))?;
    let index = chars.as_str().parse().map_err(|_| Error::WireFormat(format!("bad wire label {label:?}")))?;
    match kind {
        'q' | 'a' => Ok((kind, index)),
        _ => Err(Error::WireFormat(format!("bad wire label {label:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToBob,
    ToAlice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub message: Message,
}

/// Every message on the channel, in order. Append-only.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn push(&mut self, direction: Direction, message: Message) {
        self.entries.push(TranscriptEntry { direction, message });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Report and decision bits in channel order.
    pub fn bits(&self) -> Vec<u8> {
        self.entries
            .iter()
            .filter_map(|e| match e.message {
                Message::MeasuredBit { bit, .. } | Message::CorrectionDecision { bit, .. } => Some(bit),
                _ => None,
            })
            .collect()
    }

    /// The transcript with bit values and amplitudes erased: what is left
    /// is fixed by the protocol and the public circuit.
    pub fn shape(&self) -> Vec<u8> {
        let erased: Vec<TranscriptEntry> = self
            .entries
            .iter()
            .map(|e| {
                let message = match &e.message {
                    Message::QubitTransfer { wire, .. } => Message::QubitTransfer { wire: wire.clone(), amp: [0.0; 4] },
                    Message::MeasuredBit { slot, .. } => Message::MeasuredBit { slot: *slot, bit: 0 },
                    Message::CorrectionDecision { slot, .. } => Message::CorrectionDecision { slot: *slot, bit: 0 },
                    Message::ResultTransfer { wires, amp } => {
                        Message::ResultTransfer { wires: wires.clone(), amp: vec![0.0; amp.len()] }
                    }
                    m => m.clone(),
                };
                TranscriptEntry { direction: e.direction, message }
            })
            .collect();
        serde_json::to_vec(&erased).expect("transcript serializes")
    }
}
