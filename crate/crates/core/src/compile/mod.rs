//! Circuit IR and the two blind compilers.
//!
//! Every single-qubit operation Bob runs is a *rotation slot*: three
//! teleportation gadgets separated by two H gates, realizing
//! `A(outer)·H·A(middle)·H·A(inner)`. The angles live only in Alice's ancillas,
//! so all slots look alike to Bob whatever gate they carry.
//!
//! * Protocol 1 ([`compile_weak_blind`]) keeps each CNOT as a visible gate
//!   and turns each single-qubit gate into a layer of slots across all wires.
//! * Protocol 2 ([`compile_blind`]) lays everything on a staggered CZ
//!   brickwork whose shape depends only on the register width and the gate
//!   count.

mod blind;
mod brick;
mod circuit;
mod euler;
mod table1;
mod weak;

use serde::{Deserialize, Serialize};

pub use blind::{brickwork_block_columns, compile_blind, BrickworkCaps};
pub use brick::{make_brick, BrickRole, BrickSpec};
pub use circuit::Circuit;
pub use euler::{choose_representation, representations, EulerTriple};
pub use table1::{
    approximate_single_qubit, rotation_of, same_direction, table1_axis, table1_rows, Approximation, Letter, Rotation,
    TLikeWord, Table1Row, APPROX_DEPTH_CAP,
};
pub use weak::compile_weak_blind;

use crate::error::{Error, Result};
use crate::simcore::{Angle8, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Protocol {
    WeakBlind,
    Blind,
}

impl Protocol {
    pub fn number(self) -> u8 {
        match self {
            Protocol::WeakBlind => 1,
            Protocol::Blind => 2,
        }
    }
}

impl TryFrom<u8> for Protocol {
    type Error = Error;
    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Protocol::WeakBlind),
            2 => Ok(Protocol::Blind),
            _ => Err(Error::Config(format!("protocol must be 1 or 2, got {n}"))),
        }
    }
}

impl From<Protocol> for u8 {
    fn from(p: Protocol) -> u8 {
        p.number()
    }
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// One instruction as Bob sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum BobOp {
    H {
        wire: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    /// Gadget `slot`: teleport through ancilla `2·slot`, then correction
    /// ancilla `2·slot + 1`.
    Teleport {
        slot: usize,
        wire: usize,
    },
}

impl BobOp {
    pub fn clifford_gate(&self) -> Option<Gate> {
        match *self {
            BobOp::H { wire } => Some(Gate::H(wire)),
            BobOp::Cnot { control, target } => Some(Gate::Cnot { control, target }),
            BobOp::Cz { a, b } => Some(Gate::Cz(a, b)),
            BobOp::Teleport { .. } => None,
        }
    }
}

/// The part of a compiled circuit announced to Bob.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicCircuit {
    pub protocol: Protocol,
    pub num_wires: usize,
    pub num_slots: usize,
    pub ops: Vec<BobOp>,
}

impl PublicCircuit {
    /// Canonical bytes of everything Bob can see.
    pub fn shape_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("public circuit serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let mut next_slot = 0;
        for op in &self.ops {
            let wires: Vec<usize> = match *op {
                BobOp::H { wire } => vec![wire],
                BobOp::Cnot { control, target } => vec![control, target],
                BobOp::Cz { a, b } => vec![a, b],
                BobOp::Teleport { slot, wire } => {
                    if slot != next_slot {
                        return Err(Error::Protocol(format!("slot {slot} out of order, expected {next_slot}")));
                    }
                    next_slot += 1;
                    vec![wire]
                }
            };
            if let Some(&w) = wires.iter().find(|&&w| w >= self.num_wires) {
                return Err(Error::WireOutOfRange { wire: w, num_wires: self.num_wires });
            }
            if wires.len() == 2 && wires[0] == wires[1] {
                return Err(Error::CoincidentWires(wires[0]));
            }
        }
        if next_slot != self.num_slots {
            return Err(Error::Protocol(format!("{} slots announced, {next_slot} present", self.num_slots)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnotPosition {
    pub index: usize,
    pub control: usize,
    pub target: usize,
}

/// What a protocol lets Bob learn about the source circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeakageDescriptor {
    pub protocol: Protocol,
    pub num_wires: usize,
    pub size: usize,
    /// Protocol 1 only.
    pub cnot_positions: Option<Vec<CnotPosition>>,
}

/// Alice's full record of a compilation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCircuit {
    pub public: PublicCircuit,
    /// Gadget angle per slot. Secret.
    pub angles: Vec<Angle8>,
    /// Width of the source circuit; wires beyond it are padding.
    pub source_wires: usize,
    pub leakage: LeakageDescriptor,
}

impl CompiledCircuit {
    pub fn protocol(&self) -> Protocol {
        self.public.protocol
    }

    pub fn num_wires(&self) -> usize {
        self.public.num_wires
    }

    pub fn num_slots(&self) -> usize {
        self.public.num_slots
    }

    pub fn num_ancillas(&self) -> usize {
        2 * self.public.num_slots
    }
}

pub fn compile(circuit: &Circuit, protocol: Protocol, rng: &mut impl rand::Rng) -> Result<CompiledCircuit> {
    match protocol {
        Protocol::WeakBlind => compile_weak_blind(circuit, rng),
        Protocol::Blind => compile_blind(circuit, &BrickworkCaps::default(), rng),
    }
}

/// Recovers the leakage descriptor from the announced structure alone.
pub fn leakage_of(public: &PublicCircuit) -> Result<LeakageDescriptor> {
    let w = public.num_wires;
    match public.protocol {
        Protocol::WeakBlind => {
            let mut size = 0;
            let mut positions = Vec::new();
            let mut slot_ops = 0;
            for op in &public.ops {
                match *op {
                    BobOp::Cnot { control, target } => {
                        if slot_ops != 0 {
                            return Err(Error::Protocol("CNOT inside a rotation layer".into()));
                        }
                        positions.push(CnotPosition { index: size, control, target });
                        size += 1;
                    }
                    BobOp::Cz { .. } => return Err(Error::Protocol("CZ in a Protocol 1 circuit".into())),
                    _ => {
                        slot_ops += 1;
                        if slot_ops == 5 * w {
                            slot_ops = 0;
                            size += 1;
                        }
                    }
                }
            }
            if slot_ops != 0 {
                return Err(Error::Protocol("truncated rotation layer".into()));
            }
            Ok(LeakageDescriptor { protocol: Protocol::WeakBlind, num_wires: w, size, cnot_positions: Some(positions) })
        }
        Protocol::Blind if public.ops.is_empty() => {
            Ok(LeakageDescriptor { protocol: Protocol::Blind, num_wires: w, size: 0, cnot_positions: None })
        }
        Protocol::Blind => {
            let slot_layers = public.num_slots / (3 * w);
            // Two slot layers per column plus the closing layer.
            let columns = slot_layers.saturating_sub(1) / 2;
            let block = brickwork_block_columns(w);
            if !public.num_slots.is_multiple_of(3 * w) || slot_layers % 2 != 1 || !columns.is_multiple_of(block) {
                return Err(Error::Protocol("announced brickwork has an irregular shape".into()));
            }
            Ok(LeakageDescriptor {
                protocol: Protocol::Blind,
                num_wires: w,
                size: columns / block,
                cnot_positions: None,
            })
        }
    }
}

/// Appends a rotation slot on `wire`: gadgets run inner, middle, outer.
pub(crate) fn push_rotation_slot(ops: &mut Vec<BobOp>, angles: &mut Vec<Angle8>, wire: usize, t: EulerTriple) {
    for (i, angle) in [t.inner, t.middle, t.outer].into_iter().enumerate() {
        if i > 0 {
            ops.push(BobOp::H { wire });
        }
        ops.push(BobOp::Teleport { slot: angles.len(), wire });
        angles.push(angle);
    }
}

/// Plain replay of a compiled circuit with the gadgets applied directly.
/// Used as a check on the compilers, independent of the protocol engine.
pub fn simulate_compiled(
    compiled: &CompiledCircuit,
    input: &crate::simcore::PureState,
) -> Result<crate::simcore::PureState> {
    let mut state = input.clone();
    for op in &compiled.public.ops {
        match *op {
            BobOp::Teleport { slot, wire } => state.apply(&Gate::A(compiled.angles[slot], wire))?,
            _ => state.apply(&op.clifford_gate().expect("non-teleport ops are Clifford gates"))?,
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests;
