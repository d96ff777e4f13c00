use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::euler::EulerTriple;
use super::{push_rotation_slot, BobOp, Protocol, PublicCircuit};
use crate::simcore::{GateKind, Matrix, CIRCUIT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrickRole {
    Identity,
    /// Control on the upper (lower-index) wire.
    Cnot,
    /// Control on the lower (higher-index) wire.
    CnotReversed,
}

impl BrickRole {
    pub fn target(self) -> Matrix {
        match self {
            BrickRole::Identity => Matrix::identity(4),
            BrickRole::Cnot => GateKind::Cnot.matrix(),
            BrickRole::CnotReversed => {
                let swap = swap_matrix();
                &(&swap * &GateKind::Cnot.matrix()) * &swap
            }
        }
    }
}

fn swap_matrix() -> Matrix {
    let mut m = Matrix::zeros(4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m.set(r, c, crate::simcore::C64::new(1.0, 0.0));
    }
    m
}

/// Two wires, `[layer 0, CZ, layer 1, CZ, layer 2]`, one rotation slot per
/// wire per layer. `layers[k][0]` acts on the upper wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrickSpec {
    pub role: BrickRole,
    pub layers: [[EulerTriple; 2]; 3],
}

impl BrickSpec {
    fn layer(&self, k: usize) -> Matrix {
        self.layers[k][0].matrix().kron(&self.layers[k][1].matrix())
    }

    pub fn unitary(&self) -> Matrix {
        let cz = GateKind::Cz.matrix();
        let m = &(&cz * &self.layer(1)) * &(&cz * &self.layer(0));
        &self.layer(2) * &m
    }

    /// Distance from the role's target, up to global phase.
    pub fn error(&self) -> f64 {
        self.unitary().phase_distance(&self.role.target())
    }

    /// The brick alone, as Bob would receive it.
    pub fn public(&self) -> PublicCircuit {
        let mut ops = Vec::new();
        let mut angles = Vec::new();
        for k in 0..3 {
            if k > 0 {
                ops.push(BobOp::Cz { a: 0, b: 1 });
            }
            for w in 0..2 {
                push_rotation_slot(&mut ops, &mut angles, w, self.layers[k][w]);
            }
        }
        PublicCircuit { protocol: Protocol::Blind, num_wires: 2, num_slots: angles.len(), ops }
    }
}

fn cliffords() -> Vec<(EulerTriple, Matrix)> {
    let mut out: Vec<(EulerTriple, Matrix)> = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let t = EulerTriple::new(2 * a, 2 * b, 2 * c);
                let m = t.matrix();
                if !out.iter().any(|(_, x)| x.eq_up_to_phase(&m, 1e-9)) {
                    out.push((t, m));
                }
            }
        }
    }
    out
}

/// First filling in a fixed search order with an identity last layer.
fn search(role: BrickRole) -> BrickSpec {
    let target = role.target();
    let cz = GateKind::Cz.matrix();
    let cl = cliffords();
    for (t2a, m2a) in &cl {
        for (t2b, m2b) in &cl {
            let middle = &(&cz * &m2a.kron(m2b)) * &cz;
            for (t1a, m1a) in &cl {
                for (t1b, m1b) in &cl {
                    if (&middle * &m1a.kron(m1b)).eq_up_to_phase(&target, 1e-9) {
                        return BrickSpec { role, layers: [[*t1a, *t1b], [*t2a, *t2b], [EulerTriple::IDENTITY; 2]] };
                    }
                }
            }
        }
    }
    unreachable!("every brick role has a Clifford filling")
}

/// The brick for `role`. All roles share the same layout; the identity
/// brick is empty slots around two CZs (CZ² = I), the CNOT fillings come from
/// a bounded search over Clifford slots and are cached.
pub fn make_brick(role: BrickRole) -> BrickSpec {
    static CACHE: OnceLock<[BrickSpec; 2]> = OnceLock::new();
    let [down, up] = CACHE.get_or_init(|| [search(BrickRole::Cnot), search(BrickRole::CnotReversed)]);
    let spec = match role {
        BrickRole::Identity => BrickSpec { role, layers: [[EulerTriple::IDENTITY; 2]; 3] },
        BrickRole::Cnot => *down,
        BrickRole::CnotReversed => *up,
    };
    debug_assert!(spec.error() <= CIRCUIT_TOL);
    spec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bricks_realize_their_roles() {
        for role in [BrickRole::Identity, BrickRole::Cnot, BrickRole::CnotReversed] {
            let b = make_brick(role);
            assert!(b.error() <= 1e-10, "{role:?}: {}", b.error());
            assert_eq!(b.layers[2], [EulerTriple::IDENTITY; 2]);
            assert!(b.layers.iter().flatten().all(|t| t.is_clifford()));
        }
    }

    #[test]
    fn shapes_are_identical() {
        let id = make_brick(BrickRole::Identity).public();
        for role in [BrickRole::Cnot, BrickRole::CnotReversed] {
            assert_eq!(make_brick(role).public().shape_bytes(), id.shape_bytes());
        }
        assert_eq!(id.ops.iter().filter(|o| matches!(o, BobOp::Cz { .. })).count(), 2);
        assert_eq!(id.num_slots, 18);
    }

    #[test]
    fn three_bricks_swap() {
        let m = &(&make_brick(BrickRole::Cnot).unitary() * &make_brick(BrickRole::CnotReversed).unitary())
            * &make_brick(BrickRole::Cnot).unitary();
        assert!(m.eq_up_to_phase(&swap_matrix(), 1e-10));
    }
}
