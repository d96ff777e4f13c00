use rand::Rng;

use super::euler::{choose_representation, EulerTriple};
use super::{
    push_rotation_slot, BobOp, Circuit, CnotPosition, CompiledCircuit, LeakageDescriptor, Protocol, PublicCircuit,
};
use crate::error::{Error, Result};
use crate::simcore::{Gate, MAX_WIRES};

/// Protocol 1. CNOTs stay visible; every single-qubit gate becomes one layer
/// of rotation slots across all wires, the real gate on its wire and
/// angle-0 slots elsewhere, so Bob cannot tell which wire it touched or what
/// it was. Slot representations are drawn from `rng`.
pub fn compile_weak_blind(circuit: &Circuit, rng: &mut impl Rng) -> Result<CompiledCircuit> {
    let w = circuit.num_wires();
    if w + 1 > MAX_WIRES {
        return Err(Error::CapsExceeded(format!("{w} wires plus an ancilla exceed {MAX_WIRES}")));
    }
    let mut ops = Vec::new();
    let mut angles = Vec::new();
    let mut positions = Vec::new();
    for (index, gate) in circuit.gates().iter().enumerate() {
        match *gate {
            Gate::Cnot { control, target } => {
                ops.push(BobOp::Cnot { control, target });
                positions.push(CnotPosition { index, control, target });
            }
            Gate::Cz(..) => return Err(Error::UnsupportedGate("CZ is not in the circuit alphabet".into())),
            _ => {
                let wire = gate.wires()[0];
                let u = gate.kind().mat2().expect("one-wire gate");
                for v in 0..w {
                    let t = if v == wire { choose_representation(&u, rng)? } else { EulerTriple::IDENTITY };
                    push_rotation_slot(&mut ops, &mut angles, v, t);
                }
            }
        }
    }
    Ok(CompiledCircuit {
        public: PublicCircuit { protocol: Protocol::WeakBlind, num_wires: w, num_slots: angles.len(), ops },
        angles,
        source_wires: w,
        leakage: LeakageDescriptor {
            protocol: Protocol::WeakBlind,
            num_wires: w,
            size: circuit.size(),
            cnot_positions: Some(positions),
        },
    })
}
