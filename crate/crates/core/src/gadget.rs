//! A_θ gate teleportation on encrypted qubits and the two-round correction
//! cascade.
//!
//! One teleportation consumes an ancilla `X^a Z^b |A_θ⟩`: Bob applies
//! CNOT(control = ancilla, target = data) and measures the data wire, getting
//! `c`. The logical qubit moves to the ancilla and carries
//! `X^(x⊕c) Z^(z⊕b) A_(±θ) |ψ⟩`, with the + sign exactly when `a⊕c⊕x = 0`.
//! A wrong sign is repaired by a second teleportation with angle 2θ; if that
//! also comes out wrong the residue is `A_(4θ)`, which is Z for odd n and I
//! otherwise.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::WireKeys;
use crate::simcore::{Angle8, Gate, OutcomeSource, PureState, Qubit, C64, FRAC_1_SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaPurpose {
    Primary,
    Correction,
}

/// An ancilla Alice prepares as `X^a Z^b |A_θ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AncillaSpec {
    pub angle: Angle8,
    pub a: u8,
    pub b: u8,
    pub purpose: AncillaPurpose,
}

impl AncillaSpec {
    pub fn new(angle: Angle8, a: u8, b: u8, purpose: AncillaPurpose) -> Self {
        AncillaSpec { angle, a: a & 1, b: b & 1, purpose }
    }

    pub fn random(angle: Angle8, purpose: AncillaPurpose, rng: &mut impl Rng) -> Self {
        AncillaSpec::new(angle, rng.random_range(0..2), rng.random_range(0..2), purpose)
    }

    /// The primary/correction pair for a gadget of angle `n`.
    pub fn pair(n: Angle8, rng: &mut impl Rng) -> (AncillaSpec, AncillaSpec) {
        (
            AncillaSpec::random(n, AncillaPurpose::Primary, rng),
            AncillaSpec::random(n.double(), AncillaPurpose::Correction, rng),
        )
    }

    /// Amplitudes of `X^a Z^b |A_θ⟩`.
    pub fn qubit(&self) -> Qubit {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let sign = if self.b == 1 { -1.0 } else { 1.0 };
        let one = self.angle.phase() * (sign * FRAC_1_SQRT_2);
        if self.a == 1 {
            [one, h]
        } else {
            [h, one]
        }
    }
}

/// `a ⊕ c ⊕ x = 0`: the teleportation applied `+θ`.
pub fn desired_bit(a: u8, c: u8, x: u8) -> bool {
    (a ^ c ^ x) & 1 == 0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportReport {
    pub bit: u8,
    /// Born probability that the data-wire measurement gave 1.
    pub p_one: f64,
}

/// Bob's half of a teleportation: splice `ancilla` in after `data_wire`,
/// CNOT from it onto the data wire, measure and drop the data wire. The
/// logical qubit ends up at index `data_wire`.
pub fn teleport_into(
    state: &mut PureState,
    data_wire: usize,
    ancilla: Qubit,
    src: &mut impl OutcomeSource,
) -> Result<TeleportReport> {
    if data_wire >= state.num_wires() {
        return Err(Error::WireOutOfRange { wire: data_wire, num_wires: state.num_wires() });
    }
    state.insert_wire(data_wire + 1, ancilla)?;
    state.apply(&Gate::Cnot { control: data_wire + 1, target: data_wire })?;
    let p_one = state.measure_prob(data_wire)?;
    let (bit, _) = state.measure_remove(data_wire, src)?;
    Ok(TeleportReport { bit, p_one })
}

/// Measures a lone ancilla in the computational basis, discarding it.
pub fn measure_lone(ancilla: Qubit, src: &mut impl OutcomeSource) -> Result<TeleportReport> {
    let mut q = PureState::product(&[ancilla])?;
    let p_one = q.measure_prob(0)?;
    let (bit, _) = q.measure_remove(0, src)?;
    Ok(TeleportReport { bit, p_one })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportOutcome {
    pub bit: u8,
    pub desired: bool,
    pub p_one: f64,
}

/// One teleportation with key bookkeeping: `keys` enters as the data wire's
/// frame and leaves as the relocated logical wire's frame.
pub fn teleport_a(
    state: &mut PureState,
    data_wire: usize,
    ancilla: &AncillaSpec,
    keys: &mut WireKeys,
    src: &mut impl OutcomeSource,
) -> Result<TeleportOutcome> {
    if keys.s_correction == 1 {
        return Err(Error::PendingSCorrection(data_wire));
    }
    let report = teleport_into(state, data_wire, ancilla.qubit(), src)?;
    let desired = desired_bit(ancilla.a, report.bit, keys.x);
    apply_teleport_keys(keys, ancilla, report.bit);
    Ok(TeleportOutcome { bit: report.bit, desired, p_one: report.p_one })
}

fn apply_teleport_keys(keys: &mut WireKeys, ancilla: &AncillaSpec, c: u8) {
    keys.x ^= c & 1;
    keys.z ^= ancilla.b;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CascadeMode {
    /// The correction ancilla is always consumed and a final Z goes into the
    /// key frame, so every branch looks the same to Bob.
    #[default]
    AlwaysConsume,
    /// The correction ancilla is used only when needed and a final Z is sent
    /// to Bob as an explicit instruction.
    Faithful,
}

/// What Alice tells Bob after a report bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliceReply {
    /// Run (true) or skip (false) the correction teleportation.
    Correction(bool),
    /// Faithful mode only: apply Z to the logical wire.
    ApplyZ,
    /// Faithful mode only: the cascade ended without a Z.
    NoZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Round1,
    Round2 { needed: bool },
    Finished,
}

/// Alice's side of one cascade: turns report bits into replies and key
/// updates. The engine and [`run_cascade`] share it.
#[derive(Debug, Clone)]
pub struct CascadeAlice {
    pub angle: Angle8,
    pub primary: AncillaSpec,
    pub correction: AncillaSpec,
    pub mode: CascadeMode,
    stage: Stage,
    outcome: CascadeOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CascadeOutcome {
    pub round1_bit: u8,
    pub round1_desired: bool,
    /// Present iff the correction teleportation ran.
    pub round2_bit: Option<u8>,
    /// Always-consume mode: the discarded bit of the unused correction ancilla.
    pub dummy_bit: Option<u8>,
    pub final_z_needed: bool,
    /// Net `(x, z)` toggles applied to the logical wire's keys.
    pub frame_delta: (u8, u8),
}

impl CascadeAlice {
    pub fn new(angle: Angle8, primary: AncillaSpec, correction: AncillaSpec, mode: CascadeMode) -> Result<Self> {
        if primary.angle != angle || correction.angle != angle.double() {
            return Err(Error::Protocol(format!(
                "ancillas ({}, {}) do not fit angle {angle}",
                primary.angle, correction.angle
            )));
        }
        Ok(CascadeAlice { angle, primary, correction, mode, stage: Stage::Round1, outcome: CascadeOutcome::default() })
    }

    pub fn is_finished(&self) -> bool {
        self.stage == Stage::Finished
    }

    pub fn outcome(&self) -> &CascadeOutcome {
        &self.outcome
    }

    /// Handles the primary teleportation's bit. Angle-0 gadgets (traps and
    /// padding) have nothing to correct, so the reply is a fair coin from
    /// `rng` to keep its distribution equal to a real gadget's.
    pub fn on_round1(&mut self, c: u8, keys: &mut WireKeys, rng: &mut impl Rng) -> Result<AliceReply> {
        if self.stage != Stage::Round1 {
            return Err(Error::Protocol("round-1 report out of order".into()));
        }
        let desired = desired_bit(self.primary.a, c, keys.x);
        apply_teleport_keys(keys, &self.primary, c);
        let needed = if self.angle == Angle8::ZERO { rng.random::<bool>() } else { !desired };
        self.outcome.round1_bit = c;
        self.outcome.round1_desired = desired;
        self.outcome.frame_delta = (c & 1, self.primary.b);
        self.stage = match (needed, self.mode) {
            (false, CascadeMode::Faithful) => Stage::Finished,
            _ => Stage::Round2 { needed },
        };
        Ok(AliceReply::Correction(needed))
    }

    /// Handles the second bit: either the correction teleportation's or the
    /// dummy measurement's. Returns a reply only in faithful mode.
    pub fn on_round2(&mut self, c: u8, keys: &mut WireKeys) -> Result<Option<AliceReply>> {
        let Stage::Round2 { needed } = self.stage else {
            return Err(Error::Protocol("round-2 report out of order".into()));
        };
        self.stage = Stage::Finished;
        if !needed {
            self.outcome.dummy_bit = Some(c);
            return Ok(None);
        }
        let desired = desired_bit(self.correction.a, c, keys.x);
        apply_teleport_keys(keys, &self.correction, c);
        self.outcome.round2_bit = Some(c);
        self.outcome.frame_delta.0 ^= c & 1;
        self.outcome.frame_delta.1 ^= self.correction.b;
        // A(-θ)·A(-2θ) = A(θ)·A(4θ) and A(4θ) is Z exactly for odd n.
        let z = !desired && self.angle.is_odd();
        self.outcome.final_z_needed = z;
        match self.mode {
            CascadeMode::AlwaysConsume => {
                keys.z ^= u8::from(z);
                self.outcome.frame_delta.1 ^= u8::from(z);
                Ok(None)
            }
            CascadeMode::Faithful => Ok(Some(if z { AliceReply::ApplyZ } else { AliceReply::NoZ })),
        }
    }
}

/// Runs a whole cascade on `state`, playing both parties: Bob's physical
/// steps and Alice's decisions. `keys` is the logical wire's frame entry.
/// `src` supplies Bob's measurement outcomes, `alice_rng` Alice's coins.
#[allow(clippy::too_many_arguments)]
pub fn run_cascade(
    state: &mut PureState,
    data_wire: usize,
    angle: Angle8,
    primary: AncillaSpec,
    correction: AncillaSpec,
    keys: &mut WireKeys,
    mode: CascadeMode,
    alice_rng: &mut impl Rng,
    src: &mut impl OutcomeSource,
) -> Result<CascadeOutcome> {
    if keys.s_correction == 1 {
        return Err(Error::PendingSCorrection(data_wire));
    }
    let mut alice = CascadeAlice::new(angle, primary, correction, mode)?;
    let c1 = teleport_into(state, data_wire, primary.qubit(), src)?.bit;
    let AliceReply::Correction(needed) = alice.on_round1(c1, keys, alice_rng)? else {
        unreachable!("round 1 always answers with a correction decision")
    };
    if alice.is_finished() {
        return Ok(*alice.outcome());
    }
    let c2 = if needed {
        teleport_into(state, data_wire, correction.qubit(), src)?.bit
    } else {
        measure_lone(correction.qubit(), src)?.bit
    };
    if let Some(AliceReply::ApplyZ) = alice.on_round2(c2, keys)? {
        state.apply(&Gate::Z(data_wire))?;
    }
    Ok(*alice.outcome())
}

/// Clears a pending S correction through an angle-2 cascade, so Bob never
/// runs S himself. The wire holds `S·φ`; one more S gives `Z·φ`, which goes
/// into the Z key. With no correction pending the cascade runs at angle 0 and
/// looks the same to Bob.
#[allow(clippy::too_many_arguments)]
pub fn discharge_s_correction(
    state: &mut PureState,
    wire: usize,
    keys: &mut WireKeys,
    ancillas: Option<(AncillaSpec, AncillaSpec)>,
    mode: CascadeMode,
    alice_rng: &mut impl Rng,
    src: &mut impl OutcomeSource,
) -> Result<CascadeOutcome> {
    let (primary, correction) =
        ancillas.ok_or_else(|| Error::Protocol("S discharge needs a primary and a correction ancilla".into()))?;
    let s_bit = keys.s_correction;
    let angle = if s_bit == 1 { Angle8::S } else { Angle8::ZERO };
    keys.s_correction = 0;
    let out = run_cascade(state, wire, angle, primary, correction, keys, mode, alice_rng, src)?;
    keys.z ^= s_bit;
    Ok(out)
}
