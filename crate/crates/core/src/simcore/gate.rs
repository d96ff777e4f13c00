use std::fmt;

use serde::{Deserialize, Serialize};

use super::matrix::{hadamard, Mat2, Matrix};
use super::{Angle8, C64};
use crate::error::{Error, Result};

/// Gate kinds without wire data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    S,
    A(Angle8),
    Cnot,
    Cz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    /// Unitary on the gate's own wires, first listed wire most significant.
    pub fn matrix(self) -> Matrix {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            GateKind::X => Matrix::from_rows(&[&[z, o], &[o, z]]),
            GateKind::Z => Matrix::from_rows(&[&[o, z], &[z, -o]]),
            GateKind::H => Matrix::from_mat2(&hadamard()),
            GateKind::S => Matrix::from_rows(&[&[o, z], &[z, C64::new(0.0, 1.0)]]),
            GateKind::A(n) => Matrix::from_rows(&[&[o, z], &[z, n.phase()]]),
            GateKind::Cnot => Matrix::from_rows(&[&[o, z, z, z], &[z, o, z, z], &[z, z, z, o], &[z, z, o, z]]),
            GateKind::Cz => Matrix::from_rows(&[&[o, z, z, z], &[z, o, z, z], &[z, z, o, z], &[z, z, z, -o]]),
        }
    }

    pub fn mat2(self) -> Option<Mat2> {
        self.matrix().to_mat2()
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::X => f.write_str("X"),
            GateKind::Z => f.write_str("Z"),
            GateKind::H => f.write_str("H"),
            GateKind::S => f.write_str("S"),
            GateKind::A(n) if *n == Angle8::T => f.write_str("T"),
            GateKind::A(n) => write!(f, "A({})", n.index()),
            GateKind::Cnot => f.write_str("CNOT"),
            GateKind::Cz => f.write_str("CZ"),
        }
    }
}

/// A gate bound to wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    S(usize),
    A(Angle8, usize),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

impl Gate {
    pub fn t(wire: usize) -> Gate {
        Gate::A(Angle8::T, wire)
    }

    pub fn kind(&self) -> GateKind {
        match *self {
            Gate::X(_) => GateKind::X,
            Gate::Z(_) => GateKind::Z,
            Gate::H(_) => GateKind::H,
            Gate::S(_) => GateKind::S,
            Gate::A(n, _) => GateKind::A(n),
            Gate::Cnot { .. } => GateKind::Cnot,
            Gate::Cz(..) => GateKind::Cz,
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::X(w) | Gate::Z(w) | Gate::H(w) | Gate::S(w) | Gate::A(_, w) => vec![w],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_two_wire(&self) -> bool {
        self.kind().arity() == 2
    }

    pub fn matrix(&self) -> Matrix {
        self.kind().matrix()
    }

    /// Same gate kind moved onto other wires.
    pub fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::X(w) => Gate::X(f(w)),
            Gate::Z(w) => Gate::Z(f(w)),
            Gate::H(w) => Gate::H(f(w)),
            Gate::S(w) => Gate::S(f(w)),
            Gate::A(n, w) => Gate::A(n, f(w)),
            Gate::Cnot { control, target } => Gate::Cnot { control: f(control), target: f(target) },
            Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
        }
    }

    pub fn validate(&self, num_wires: usize) -> Result<()> {
        let wires = self.wires();
        for &w in &wires {
            if w >= num_wires {
                return Err(Error::WireOutOfRange { wire: w, num_wires });
            }
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::CoincidentWires(wires[0]));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wires = self.wires();
        match self.kind() {
            GateKind::A(n) if n != Angle8::T => write!(f, "A {} {}", n.index(), wires[0]),
            kind => {
                write!(f, "{kind}")?;
                for w in wires {
                    write!(f, " {w}")?;
                }
                Ok(())
            }
        }
    }
}
