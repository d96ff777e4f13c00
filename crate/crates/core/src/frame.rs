//! Quantum one-time-pad keys and their propagation through gates.
//!
//! A wire holding keys `(x, z)` carries `X^x Z^z |φ⟩`, where the word is read
//! as an operator product: `Z^z` acts on the ket first, then `X^x`. A pending
//! `s_correction` sits innermost, `X^x Z^z S^s |φ⟩`, and must be discharged
//! before the wire meets a non-diagonal gate or is decrypted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simcore::{Angle8, Gate, GateKind, Matrix, PureState, Qubit, ALGEBRA_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct WireKeys {
    pub x: u8,
    pub z: u8,
    pub s_correction: u8,
}

impl WireKeys {
    pub fn new(x: u8, z: u8) -> Self {
        WireKeys { x: x & 1, z: z & 1, s_correction: 0 }
    }
}

/// Per-wire one-time-pad keys.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct KeyFrame {
    keys: Vec<WireKeys>,
}

/// Corrections emitted by a key update that Pauli keys cannot absorb.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PendingCorrections {
    /// Wires whose S correction bit toggled.
    pub s_toggled: Vec<usize>,
}

impl KeyFrame {
    pub fn zeros(num_wires: usize) -> Self {
        KeyFrame { keys: vec![WireKeys::default(); num_wires] }
    }

    pub fn from_pairs(pairs: &[(u8, u8)]) -> Self {
        KeyFrame { keys: pairs.iter().map(|&(x, z)| WireKeys::new(x, z)).collect() }
    }

    pub fn random(num_wires: usize, rng: &mut impl Rng) -> Self {
        KeyFrame {
            keys: (0..num_wires).map(|_| WireKeys::new(rng.random_range(0..2), rng.random_range(0..2))).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn wire(&self, w: usize) -> WireKeys {
        self.keys[w]
    }

    pub fn wire_mut(&mut self, w: usize) -> &mut WireKeys {
        &mut self.keys[w]
    }

    pub fn push(&mut self, keys: WireKeys) {
        self.keys.push(keys);
    }

    pub fn pairs(&self) -> Vec<(u8, u8)> {
        self.keys.iter().map(|k| (k.x, k.z)).collect()
    }

    fn check(&self, gate: &Gate) -> Result<()> {
        gate.validate(self.keys.len())
    }

    fn require_discharged(&self, wires: &[usize]) -> Result<()> {
        match wires.iter().find(|&&w| self.keys[w].s_correction == 1) {
            Some(&w) => Err(Error::PendingSCorrection(w)),
            None => Ok(()),
        }
    }

    /// Rewrites the keys so that `gate · X^x Z^z |φ⟩ = X^x' Z^z' (S^s') gate |φ⟩`
    /// up to global phase.
    pub fn update_for_gate(&mut self, gate: &Gate) -> Result<PendingCorrections> {
        self.check(gate)?;
        let mut pending = PendingCorrections::default();
        match *gate {
            // X S = i Z S X, so a pending S picks up a Z key when X passes.
            Gate::X(w) => {
                let k = &mut self.keys[w];
                k.z ^= k.s_correction;
            }
            Gate::Z(_) => {}
            Gate::H(w) => {
                self.require_discharged(&[w])?;
                let k = &mut self.keys[w];
                std::mem::swap(&mut k.x, &mut k.z);
            }
            Gate::S(w) => self.phase_rule(w, Angle8::S, &mut pending),
            Gate::A(n, w) => self.phase_rule(w, n, &mut pending),
            Gate::Cnot { control, target } => {
                self.require_discharged(&[control, target])?;
                let (c, t) = (self.keys[control], self.keys[target]);
                self.keys[control].z = c.z ^ t.z;
                self.keys[target].x = c.x ^ t.x;
            }
            Gate::Cz(a, b) => {
                self.require_discharged(&[a, b])?;
                let (ka, kb) = (self.keys[a], self.keys[b]);
                self.keys[a].z = ka.z ^ kb.x;
                self.keys[b].z = kb.z ^ ka.x;
            }
        }
        Ok(pending)
    }

    /// `A(n) X = X A(-2n) A(n)` up to phase. The leftover `A(-2n)` splits into
    /// a Z key and an S correction: n≡1 → Z·S, n≡2 → Z, n≡3 → S (mod 4).
    fn phase_rule(&mut self, w: usize, n: Angle8, pending: &mut PendingCorrections) {
        let k = &mut self.keys[w];
        if k.x == 0 {
            return;
        }
        let (dz, ds) = match n.index() % 4 {
            0 => (0, 0),
            1 => (1, 1),
            2 => (1, 0),
            _ => (0, 1),
        };
        // S·S = Z folds a doubled correction back into the Pauli key.
        if ds == 1 {
            pending.s_toggled.push(w);
            if k.s_correction == 1 {
                k.s_correction = 0;
                k.z ^= 1;
            } else {
                k.s_correction = 1;
            }
        }
        k.z ^= dz;
    }

    pub fn updated(&self, gate: &Gate) -> Result<(KeyFrame, PendingCorrections)> {
        let mut next = self.clone();
        let pending = next.update_for_gate(gate)?;
        Ok((next, pending))
    }

    pub fn update_for_gates<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.update_for_gate(g)?;
        }
        Ok(())
    }
}

/// `X^x Z^z |ψ⟩` on every wire.
pub fn encrypt(state: &PureState, frame: &KeyFrame) -> Result<PureState> {
    check_width(state, frame)?;
    let mut out = state.clone();
    for (w, k) in frame.keys.iter().enumerate() {
        if k.z == 1 {
            out.apply(&Gate::Z(w))?;
        }
        if k.x == 1 {
            out.apply(&Gate::X(w))?;
        }
    }
    Ok(out)
}

/// `X^x Z^z` on a lone qubit.
pub fn encrypt_qubit(q: &Qubit, k: WireKeys) -> Qubit {
    let mut q = *q;
    if k.z == 1 {
        q[1] = -q[1];
    }
    if k.x == 1 {
        q.swap(0, 1);
    }
    q
}

/// `Z^z X^x` on every wire, undoing [`encrypt`].
pub fn decrypt(state: &PureState, frame: &KeyFrame) -> Result<PureState> {
    check_width(state, frame)?;
    let wires: Vec<usize> = (0..frame.len()).collect();
    frame.require_discharged(&wires)?;
    let mut out = state.clone();
    for (w, k) in frame.keys.iter().enumerate() {
        if k.x == 1 {
            out.apply(&Gate::X(w))?;
        }
        if k.z == 1 {
            out.apply(&Gate::Z(w))?;
        }
    }
    Ok(out)
}

fn check_width(state: &PureState, frame: &KeyFrame) -> Result<()> {
    if state.num_wires() != frame.len() {
        return Err(Error::LengthMismatch { expected: state.num_wires(), got: frame.len() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleCase {
    pub input: Vec<(u8, u8)>,
    pub output: Vec<(u8, u8)>,
    pub s_correction: Vec<u8>,
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleReport {
    pub kind: GateKind,
    pub cases: Vec<RuleCase>,
}

impl RuleReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count()
    }

    pub fn total(&self) -> usize {
        self.cases.len()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.total()
    }
}

fn pauli_word(keys: &[(u8, u8)]) -> Matrix {
    let x = GateKind::X.matrix();
    let z = GateKind::Z.matrix();
    let id = Matrix::identity(2);
    keys.iter()
        .map(|&(a, b)| {
            let xa = if a == 1 { &x } else { &id };
            let zb = if b == 1 { &z } else { &id };
            xa * zb
        })
        .reduce(|acc, m| acc.kron(&m))
        .expect("at least one wire")
}

fn s_word(bits: &[u8]) -> Matrix {
    let s = GateKind::S.matrix();
    let id = Matrix::identity(2);
    bits.iter()
        .map(|&b| if b == 1 { s.clone() } else { id.clone() })
        .reduce(|acc, m| acc.kron(&m))
        .expect("at least one wire")
}

/// Checks the update rule for `kind` against explicit matrix products for
/// every input key pattern: `U · X^a Z^b = X^a' Z^b' · S^s' · U` up to phase.
pub fn exhaustive_rule_check(kind: GateKind) -> RuleReport {
    let arity = kind.arity();
    let gate = match kind {
        GateKind::X => Gate::X(0),
        GateKind::Z => Gate::Z(0),
        GateKind::H => Gate::H(0),
        GateKind::S => Gate::S(0),
        GateKind::A(n) => Gate::A(n, 0),
        GateKind::Cnot => Gate::Cnot { control: 0, target: 1 },
        GateKind::Cz => Gate::Cz(0, 1),
    };
    let u = kind.matrix();
    let cases = (0..1u32 << (2 * arity))
        .map(|bits| {
            let input: Vec<(u8, u8)> =
                (0..arity).map(|w| (((bits >> (2 * w)) & 1) as u8, ((bits >> (2 * w + 1)) & 1) as u8)).collect();
            let (frame, _) = KeyFrame::from_pairs(&input).updated(&gate).expect("fresh frame has no pending S");
            let output = frame.pairs();
            let s_correction: Vec<u8> = frame.keys.iter().map(|k| k.s_correction).collect();
            let lhs = &u * &pauli_word(&input);
            let rhs = &(&pauli_word(&output) * &s_word(&s_correction)) * &u;
            let deviation = lhs.phase_distance(&rhs);
            RuleCase { input, output, s_correction, deviation, pass: deviation <= ALGEBRA_TOL }
        })
        .collect();
    RuleReport { kind, cases }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{density_from_ensemble, fidelity_up_to_phase, party_rng, C64};

    fn random_product(q: usize, rng: &mut impl Rng) -> PureState {
        let qubits: Vec<_> = (0..q)
            .map(|_| {
                let theta = rng.random::<f64>() * std::f64::consts::PI;
                let phi = rng.random::<f64>() * std::f64::consts::TAU;
                [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)]
            })
            .collect();
        PureState::product(&qubits).unwrap()
    }

    #[test]
    fn encrypt_examples() {
        let zero = PureState::zeros(1).unwrap();
        assert_eq!(encrypt(&zero, &KeyFrame::from_pairs(&[(0, 0)])).unwrap(), zero);
        assert_eq!(encrypt(&zero, &KeyFrame::from_pairs(&[(1, 0)])).unwrap(), PureState::new(1, &[1]).unwrap());
        let mut plus = zero.clone();
        plus.apply(&Gate::H(0)).unwrap();
        let mut minus = PureState::new(1, &[1]).unwrap();
        minus.apply(&Gate::H(0)).unwrap();
        let enc = encrypt(&plus, &KeyFrame::from_pairs(&[(0, 1)])).unwrap();
        assert!(fidelity_up_to_phase(&enc, &minus).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn frame_width_must_match() {
        let s = PureState::zeros(2).unwrap();
        assert!(matches!(encrypt(&s, &KeyFrame::zeros(1)), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn round_trip_all_single_wire_keys() {
        let mut rng = party_rng(21, 0);
        for _ in 0..10 {
            let psi = random_product(1, &mut rng);
            for pairs in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let frame = KeyFrame::from_pairs(&[pairs]);
                let back = decrypt(&encrypt(&psi, &frame).unwrap(), &frame).unwrap();
                assert!(fidelity_up_to_phase(&back, &psi).unwrap() > 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn hadamard_on_ciphertext() {
        let mut rng = party_rng(22, 0);
        let psi = random_product(1, &mut rng);
        let mut frame = KeyFrame::from_pairs(&[(1, 0)]);
        let mut enc = encrypt(&psi, &frame).unwrap();
        enc.apply(&Gate::H(0)).unwrap();
        frame.update_for_gate(&Gate::H(0)).unwrap();
        assert_eq!(frame.pairs(), vec![(0, 1)]);
        let mut expected = psi;
        expected.apply(&Gate::H(0)).unwrap();
        assert!(fidelity_up_to_phase(&decrypt(&enc, &frame).unwrap(), &expected).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn listed_rules() {
        let (f, _) = KeyFrame::from_pairs(&[(1, 0), (0, 1)]).updated(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(f.pairs(), vec![(1, 1), (1, 1)]);

        let (f, pending) = KeyFrame::from_pairs(&[(1, 1)]).updated(&Gate::t(0)).unwrap();
        assert_eq!(f.pairs(), vec![(1, 0)]);
        assert_eq!(f.wire(0).s_correction, 1);
        assert_eq!(pending.s_toggled, vec![0]);
    }

    #[test]
    fn hadamard_rule_is_involutive() {
        for pairs in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let mut f = KeyFrame::from_pairs(&[pairs]);
            f.update_for_gate(&Gate::H(0)).unwrap();
            f.update_for_gate(&Gate::H(0)).unwrap();
            assert_eq!(f.pairs(), vec![pairs]);
        }
    }

    #[test]
    fn pending_s_blocks_decrypt_and_hadamard() {
        let (mut f, _) = KeyFrame::from_pairs(&[(1, 0)]).updated(&Gate::t(0)).unwrap();
        let s = PureState::zeros(1).unwrap();
        assert_eq!(decrypt(&s, &f), Err(Error::PendingSCorrection(0)));
        assert_eq!(f.update_for_gate(&Gate::H(0)), Err(Error::PendingSCorrection(0)));
    }

    #[test]
    fn every_rule_is_sound() {
        let mut kinds = vec![GateKind::X, GateKind::Z, GateKind::H, GateKind::S, GateKind::Cnot, GateKind::Cz];
        kinds.extend(Angle8::all().map(GateKind::A));
        for kind in kinds {
            let report = exhaustive_rule_check(kind);
            assert!(report.all_pass(), "{kind}: {:?}", report.cases);
            assert_eq!(report.total(), if kind.arity() == 2 { 16 } else { 4 });
        }
    }

    #[test]
    fn perfect_hiding_small_registers() {
        let mut rng = party_rng(23, 0);
        for q in 1..=3 {
            for _ in 0..5 {
                let psi = random_product(q, &mut rng);
                let members: Vec<PureState> = (0..1u32 << (2 * q))
                    .map(|bits| {
                        let pairs: Vec<(u8, u8)> = (0..q)
                            .map(|w| (((bits >> (2 * w)) & 1) as u8, ((bits >> (2 * w + 1)) & 1) as u8))
                            .collect();
                        encrypt(&psi, &KeyFrame::from_pairs(&pairs)).unwrap()
                    })
                    .collect();
                let w = 1.0 / members.len() as f64;
                let rho = density_from_ensemble(members.iter().map(|s| (w, s))).unwrap();
                assert!(rho.deviation_from_maximally_mixed() <= 1e-12);
            }
        }
    }

    #[test]
    fn sequential_updates_compose() {
        let gates = [Gate::H(0), Gate::Cnot { control: 0, target: 1 }, Gate::t(1), Gate::X(1), Gate::Cz(0, 2)];
        let mut rng = party_rng(24, 0);
        for _ in 0..16 {
            let start = KeyFrame::random(3, &mut rng);
            let mut whole = start.clone();
            whole.update_for_gates(&gates[..3]).unwrap();
            let mut step = start.clone();
            for g in &gates[..3] {
                step.update_for_gate(g).unwrap();
            }
            assert_eq!(whole, step);
        }
    }

    #[test]
    fn encrypted_clifford_t_circuit_decrypts() {
        // Diagonal gates commute with the pending S, so a frame can carry it
        // across Z and A gates until an S is applied to discharge it.
        let mut rng = party_rng(25, 0);
        for _ in 0..20 {
            let psi = random_product(2, &mut rng);
            let mut frame = KeyFrame::random(2, &mut rng);
            let mut enc = encrypt(&psi, &frame).unwrap();
            let mut plain = psi.clone();
            for g in [Gate::H(0), Gate::Cnot { control: 0, target: 1 }, Gate::t(1), Gate::Z(1)] {
                enc.apply(&g).unwrap();
                plain.apply(&g).unwrap();
                frame.update_for_gate(&g).unwrap();
            }
            if frame.wire(1).s_correction == 1 {
                // S^3 = S† undoes the pending S; apply it on the ciphertext.
                for _ in 0..3 {
                    enc.apply(&Gate::S(1)).unwrap();
                    frame.update_for_gate(&Gate::S(1)).unwrap();
                }
                frame.wire_mut(1).s_correction = 0;
            }
            let out = decrypt(&enc, &frame).unwrap();
            assert!(fidelity_up_to_phase(&out, &plain).unwrap() > 1.0 - 1e-10);
        }
    }
}
