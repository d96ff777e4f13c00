use std::sync::OnceLock;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{hadamard, mat2_mul, Angle8, GateKind, Mat2, Matrix, ALGEBRA_TOL};

/// `A(outer)·H·A(middle)·H·A(inner)`: the unitary of one rotation slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EulerTriple {
    pub outer: Angle8,
    pub middle: Angle8,
    pub inner: Angle8,
}

impl EulerTriple {
    pub const IDENTITY: EulerTriple = EulerTriple { outer: Angle8::ZERO, middle: Angle8::ZERO, inner: Angle8::ZERO };

    pub fn new(outer: u8, middle: u8, inner: u8) -> Self {
        EulerTriple { outer: Angle8::from(outer), middle: Angle8::from(middle), inner: Angle8::from(inner) }
    }

    pub fn mat2(&self) -> Mat2 {
        let a = |n: Angle8| GateKind::A(n).mat2().expect("one-wire gate");
        let h = hadamard();
        let m = mat2_mul(&a(self.outer), &h);
        let m = mat2_mul(&m, &a(self.middle));
        let m = mat2_mul(&m, &h);
        mat2_mul(&m, &a(self.inner))
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_mat2(&self.mat2())
    }

    /// All three angles even: the slot is a Clifford.
    pub fn is_clifford(&self) -> bool {
        !(self.outer.is_odd() || self.middle.is_odd() || self.inner.is_odd())
    }
}

fn table() -> &'static [(EulerTriple, Matrix)] {
    static TABLE: OnceLock<Vec<(EulerTriple, Matrix)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(512);
        for outer in 0..8 {
            for middle in 0..8 {
                for inner in 0..8 {
                    let t = EulerTriple::new(outer, middle, inner);
                    v.push((t, t.matrix()));
                }
            }
        }
        v
    })
}

/// Every triple equal to `u` up to global phase.
pub fn representations(u: &Mat2) -> Vec<EulerTriple> {
    let target = Matrix::from_mat2(u);
    table().iter().filter(|(_, m)| m.eq_up_to_phase(&target, 1e-9)).map(|(t, _)| *t).collect()
}

/// A uniformly chosen representation of `u`. The identity always maps to
/// [`EulerTriple::IDENTITY`] so padding and trap slots carry angle 0.
pub fn choose_representation(u: &Mat2, rng: &mut impl Rng) -> Result<EulerTriple> {
    let target = Matrix::from_mat2(u);
    if target.eq_up_to_phase(&Matrix::identity(2), ALGEBRA_TOL.max(1e-9)) {
        return Ok(EulerTriple::IDENTITY);
    }
    let reps = representations(u);
    reps.choose(rng).copied().ok_or_else(|| Error::UnsupportedGate("unitary has no single-slot representation".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{party_rng, Gate};

    fn one_wire_gates() -> Vec<Gate> {
        let mut g = vec![Gate::X(0), Gate::Z(0), Gate::H(0), Gate::S(0)];
        g.extend(Angle8::all().map(|n| Gate::A(n, 0)));
        g
    }

    #[test]
    fn every_user_gate_fits_one_slot() {
        let mut rng = party_rng(51, 0);
        for g in one_wire_gates() {
            let u = g.kind().mat2().unwrap();
            let reps = representations(&u);
            assert!(!reps.is_empty(), "{g} has no representation");
            for t in &reps {
                assert!(t.matrix().eq_up_to_phase(&g.matrix(), 1e-12));
            }
            let chosen = choose_representation(&u, &mut rng).unwrap();
            assert!(chosen.matrix().eq_up_to_phase(&g.matrix(), 1e-12));
        }
    }

    #[test]
    fn identity_uses_zero_angles() {
        let mut rng = party_rng(52, 0);
        let id = Gate::A(Angle8::ZERO, 0).kind().mat2().unwrap();
        assert_eq!(choose_representation(&id, &mut rng).unwrap(), EulerTriple::IDENTITY);
        assert_eq!(representations(&id).len(), 8);
    }

    #[test]
    fn cliffords_are_24() {
        let mut seen: Vec<Matrix> = Vec::new();
        for (t, m) in table() {
            if t.is_clifford() && !seen.iter().any(|s| s.eq_up_to_phase(m, 1e-9)) {
                seen.push(m.clone());
            }
        }
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn choice_varies_with_rng() {
        let t = Gate::t(0).kind().mat2().unwrap();
        let mut rng = party_rng(53, 0);
        let picks: std::collections::HashSet<_> =
            (0..64).map(|_| choose_representation(&t, &mut rng).unwrap()).collect();
        assert!(picks.len() > 1);
    }
}
