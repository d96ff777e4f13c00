use std::fmt;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::simcore::{Angle8, Gate, PureState, MAX_WIRES};

/// A user circuit over {X, Z, H, S, A(n), CNOT}. T is `A(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_wires: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_wires: usize) -> Result<Self> {
        if num_wires == 0 {
            return Err(Error::ZeroWires);
        }
        if num_wires > MAX_WIRES {
            return Err(Error::TooManyWires(num_wires));
        }
        Ok(Circuit { num_wires, gates: Vec::new() })
    }

    pub fn from_gates(num_wires: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(num_wires)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Gate::Cz(..) = gate {
            return Err(Error::UnsupportedGate("CZ is not in the circuit alphabet".into()));
        }
        gate.validate(self.num_wires)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Direct state-vector simulation; the reference for compiled runs.
    pub fn simulate(&self, input: &PureState) -> Result<PureState> {
        if input.num_wires() != self.num_wires {
            return Err(Error::DimensionMismatch { left: input.num_wires(), right: self.num_wires });
        }
        let mut state = input.clone();
        for g in &self.gates {
            state.apply(g)?;
        }
        Ok(state)
    }

    /// The same circuit on a wider register.
    pub fn widened(&self, num_wires: usize) -> Result<Circuit> {
        if num_wires < self.num_wires {
            return Err(Error::Circuit(format!("cannot narrow {} wires to {num_wires}", self.num_wires)));
        }
        Circuit::from_gates(num_wires, self.gates.iter().copied())
    }

    /// Uniformly random gates; CNOTs need at least two wires.
    pub fn random(num_wires: usize, num_gates: usize, rng: &mut impl Rng) -> Result<Circuit> {
        let mut c = Circuit::new(num_wires)?;
        for _ in 0..num_gates {
            let g = if num_wires > 1 && rng.random_bool(0.3) {
                random_cnot(num_wires, rng)
            } else {
                random_single(rng.random_range(0..num_wires), rng)
            };
            c.push(g)?;
        }
        Ok(c)
    }

    /// Keeps every CNOT and every gate position but redraws each
    /// single-qubit gate (kind and wire). The result has the same Protocol 1
    /// leakage.
    pub fn resample_single_qubit_gates(&self, rng: &mut impl Rng) -> Circuit {
        let gates = self
            .gates
            .iter()
            .map(|g| if g.is_two_wire() { *g } else { random_single(rng.random_range(0..self.num_wires), rng) })
            .collect();
        Circuit { num_wires: self.num_wires, gates }
    }
}

fn random_cnot(num_wires: usize, rng: &mut impl Rng) -> Gate {
    let control = rng.random_range(0..num_wires);
    let mut target = rng.random_range(0..num_wires - 1);
    if target >= control {
        target += 1;
    }
    Gate::Cnot { control, target }
}

fn random_single(wire: usize, rng: &mut impl Rng) -> Gate {
    let choices = [Gate::X(wire), Gate::Z(wire), Gate::H(wire), Gate::S(wire), Gate::t(wire)];
    if rng.random_bool(0.25) {
        Gate::A(Angle8::new(rng.random_range(0..8)), wire)
    } else {
        *choices.choose(rng).expect("non-empty")
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WIRES {}", self.num_wires)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::party_rng;

    #[test]
    fn rejects_cz_and_bad_wires() {
        let mut c = Circuit::new(2).unwrap();
        assert!(matches!(c.push(Gate::Cz(0, 1)), Err(Error::UnsupportedGate(_))));
        assert!(matches!(c.push(Gate::H(2)), Err(Error::WireOutOfRange { .. })));
        assert!(matches!(c.push(Gate::Cnot { control: 1, target: 1 }), Err(Error::CoincidentWires(1))));
        assert_eq!(Circuit::new(0), Err(Error::ZeroWires));
    }

    #[test]
    fn random_circuits_respect_width() {
        let mut rng = party_rng(41, 0);
        for w in 1..=4 {
            let c = Circuit::random(w, 30, &mut rng).unwrap();
            assert_eq!(c.size(), 30);
            assert!(c.gates().iter().all(|g| g.validate(w).is_ok()));
            if w == 1 {
                assert!(c.gates().iter().all(|g| !g.is_two_wire()));
            }
        }
    }

    #[test]
    fn resampling_keeps_cnots() {
        let mut rng = party_rng(42, 0);
        let c = Circuit::random(3, 20, &mut rng).unwrap();
        let d = c.resample_single_qubit_gates(&mut rng);
        assert_eq!(c.size(), d.size());
        for (a, b) in c.gates().iter().zip(d.gates()) {
            assert_eq!(a.is_two_wire(), b.is_two_wire());
            if a.is_two_wire() {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn display_lists_gates() {
        let c = Circuit::from_gates(2, [Gate::H(0), Gate::Cnot { control: 0, target: 1 }, Gate::t(1)]).unwrap();
        assert_eq!(c.to_string(), "WIRES 2\nH 0\nCNOT 0 1\nT 1\n");
    }
}
