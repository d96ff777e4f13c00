use rand::Rng;

use super::brick::{make_brick, BrickRole};
use super::euler::{choose_representation, EulerTriple};
use super::{push_rotation_slot, BobOp, Circuit, CompiledCircuit, LeakageDescriptor, Protocol, PublicCircuit};
use crate::error::{Error, Result};
use crate::simcore::{Gate, Mat2, MAX_WIRES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrickworkCaps {
    pub max_wires: usize,
    pub max_columns: usize,
}

impl Default for BrickworkCaps {
    fn default() -> Self {
        // One wire stays free for the ancilla being teleported.
        BrickworkCaps { max_wires: MAX_WIRES - 1, max_columns: 4096 }
    }
}

#[derive(Debug, Clone, Default)]
struct ColumnPlan {
    bricks: Vec<(usize, BrickRole)>,
    single: Option<(usize, Mat2)>,
}

fn swap_steps(lo: usize) -> [(usize, BrickRole); 3] {
    [(lo, BrickRole::Cnot), (lo, BrickRole::CnotReversed), (lo, BrickRole::Cnot)]
}

/// Brick sequence for a CNOT: swap the control next to the target, act,
/// swap back.
fn cnot_steps(control: usize, target: usize) -> Vec<(usize, BrickRole)> {
    let (path, act): (Vec<usize>, (usize, BrickRole)) = if control < target {
        ((control..target - 1).collect(), (target - 1, BrickRole::Cnot))
    } else {
        ((target + 1..control).rev().collect(), (target, BrickRole::CnotReversed))
    };
    let mut steps: Vec<(usize, BrickRole)> = path.iter().flat_map(|&lo| swap_steps(lo)).collect();
    steps.push(act);
    steps.extend(path.iter().rev().flat_map(|&lo| swap_steps(lo)));
    steps
}

/// Columns for one gate. Column `k` of a block hosts bricks on pairs whose
/// upper wire has the parity of `k`.
fn schedule(gate: &Gate) -> Vec<ColumnPlan> {
    match *gate {
        Gate::Cnot { control, target } => {
            let mut cols: Vec<ColumnPlan> = Vec::new();
            for (lo, role) in cnot_steps(control, target) {
                while cols.len() % 2 != lo % 2 {
                    cols.push(ColumnPlan::default());
                }
                cols.push(ColumnPlan { bricks: vec![(lo, role)], single: None });
            }
            cols
        }
        _ => {
            let u = gate.kind().mat2().expect("one-wire gate");
            vec![ColumnPlan { bricks: Vec::new(), single: Some((gate.wires()[0], u)) }]
        }
    }
}

/// Columns every gate occupies on a `w`-wire brickwork: the longest schedule
/// over all gates, rounded up to even so each block starts on parity 0.
pub fn brickwork_block_columns(w: usize) -> usize {
    let mut longest = 1;
    for c in 0..w {
        for t in 0..w {
            if c != t {
                longest = longest.max(schedule(&Gate::Cnot { control: c, target: t }).len());
            }
        }
    }
    longest + longest % 2
}

/// Protocol 2. Every gate gets a block of the same number of brickwork
/// columns. Each column is `[slots, CZ layer, slots, CZ layer]` with a brick
/// on every pair of the column's parity; one closing slot layer ends the
/// circuit. What Bob sees depends only on the width and the gate count.
pub fn compile_blind(circuit: &Circuit, caps: &BrickworkCaps, rng: &mut impl Rng) -> Result<CompiledCircuit> {
    let n = circuit.num_wires();
    let w = n.max(2);
    if w > caps.max_wires.min(MAX_WIRES - 1) {
        return Err(Error::CapsExceeded(format!("{w} wires exceed the brickwork cap {}", caps.max_wires)));
    }
    let block = brickwork_block_columns(w);
    let depth = circuit.size() * block;
    if depth > caps.max_columns {
        return Err(Error::CapsExceeded(format!("{depth} columns exceed the brickwork cap {}", caps.max_columns)));
    }

    let mut plans = Vec::with_capacity(depth);
    for gate in circuit.gates() {
        if let Gate::Cz(..) = gate {
            return Err(Error::UnsupportedGate("CZ is not in the circuit alphabet".into()));
        }
        let mut cols = schedule(gate);
        cols.resize_with(block, ColumnPlan::default);
        plans.extend(cols);
    }

    let mut ops = Vec::new();
    let mut angles = Vec::new();
    let identity = EulerTriple::IDENTITY.mat2();
    for (k, plan) in plans.iter().enumerate() {
        let pairs: Vec<usize> = (k % 2..w.saturating_sub(1)).step_by(2).collect();
        let mut layer_a = vec![identity; w];
        let mut layer_b = vec![identity; w];
        for &lo in &pairs {
            let role = plan.bricks.iter().find(|(p, _)| *p == lo).map_or(BrickRole::Identity, |(_, r)| *r);
            let brick = make_brick(role);
            for side in 0..2 {
                layer_a[lo + side] = brick.layers[0][side].mat2();
                layer_b[lo + side] = brick.layers[1][side].mat2();
            }
        }
        if let Some((wire, u)) = plan.single {
            layer_a[wire] = u;
        }
        for layer in [&layer_a, &layer_b] {
            for (wire, u) in layer.iter().enumerate() {
                push_rotation_slot(&mut ops, &mut angles, wire, choose_representation(u, rng)?);
            }
            ops.extend(pairs.iter().map(|&lo| BobOp::Cz { a: lo, b: lo + 1 }));
        }
    }
    if depth > 0 {
        for wire in 0..w {
            push_rotation_slot(&mut ops, &mut angles, wire, EulerTriple::IDENTITY);
        }
    }
    Ok(CompiledCircuit {
        public: PublicCircuit { protocol: Protocol::Blind, num_wires: w, num_slots: angles.len(), ops },
        angles,
        source_wires: n,
        leakage: LeakageDescriptor {
            protocol: Protocol::Blind,
            num_wires: w,
            size: circuit.size(),
            cnot_positions: None,
        },
    })
}
