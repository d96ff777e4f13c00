use super::matrix::{Mat2, Matrix};
use super::{Angle8, Gate, OutcomeSource, C64, FRAC_1_SQRT_2, MAX_WIRES};
use crate::error::{Error, Result};

/// Amplitude pair `[⟨0|q⟩, ⟨1|q⟩]` of a single unentangled qubit.
pub type Qubit = [C64; 2];

/// Old wire index to new wire index after a register shrinks; `None` marks
/// the removed wire.
pub type WireMap = Vec<Option<usize>>;

/// Below this a Born probability is treated as exactly zero.
const ZERO_PROB: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_wires: usize,
    amps: Vec<C64>,
}

impl PureState {
    /// Computational basis state `|basis_bits⟩`.
    pub fn new(num_wires: usize, basis_bits: &[u8]) -> Result<Self> {
        if num_wires == 0 {
            return Err(Error::ZeroWires);
        }
        if num_wires > MAX_WIRES {
            return Err(Error::TooManyWires(num_wires));
        }
        if basis_bits.len() != num_wires {
            return Err(Error::LengthMismatch { expected: num_wires, got: basis_bits.len() });
        }
        let index = basis_bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_wires];
        amps[index] = C64::new(1.0, 0.0);
        Ok(PureState { num_wires, amps })
    }

    pub fn zeros(num_wires: usize) -> Result<Self> {
        PureState::new(num_wires, &vec![0; num_wires])
    }

    /// Tensor product of unentangled qubits, wire 0 first.
    pub fn product(qubits: &[Qubit]) -> Result<Self> {
        let (first, rest) = qubits.split_first().ok_or(Error::ZeroWires)?;
        let mut state = PureState::from_amplitudes(first.to_vec())?;
        for q in rest {
            state.insert_wire(state.num_wires, *q)?;
        }
        Ok(state)
    }

    /// Accepts amplitudes normalized within 1e-9 and renormalizes them.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::LengthMismatch { expected: len.next_power_of_two().max(2), got: len });
        }
        let num_wires = len.trailing_zeros() as usize;
        if num_wires > MAX_WIRES {
            return Err(Error::TooManyWires(num_wires));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        let mut state = PureState { num_wires, amps };
        state.renormalize();
        Ok(state)
    }

    pub fn num_wires(&self) -> usize {
        self.num_wires
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }

    fn check_wire(&self, wire: usize) -> Result<()> {
        if wire >= self.num_wires {
            Err(Error::WireOutOfRange { wire, num_wires: self.num_wires })
        } else {
            Ok(())
        }
    }

    fn shift(&self, wire: usize) -> usize {
        self.num_wires - 1 - wire
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_wires)?;
        let wires = gate.wires();
        match wires.as_slice() {
            [w] => self.apply_single(*w, &gate.kind().mat2().expect("one-wire gate")),
            [a, b] => self.apply_two(*a, *b, &gate.matrix()),
            _ => unreachable!("gates act on one or two wires"),
        }
    }

    pub fn apply_single(&mut self, wire: usize, m: &Mat2) -> Result<()> {
        self.check_wire(wire)?;
        let bit = 1usize << self.shift(wire);
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 unitary with `first` as the more significant wire.
    pub fn apply_two(&mut self, first: usize, second: usize, m: &Matrix) -> Result<()> {
        self.check_wire(first)?;
        self.check_wire(second)?;
        if first == second {
            return Err(Error::CoincidentWires(first));
        }
        assert_eq!(m.dim(), 4, "two-wire operator must be 4x4");
        let (b0, b1) = (1usize << self.shift(first), 1usize << self.shift(second));
        for i in 0..self.amps.len() {
            if i & (b0 | b1) != 0 {
                continue;
            }
            let idx = [i, i | b1, i | b0, i | b0 | b1];
            let v = idx.map(|j| self.amps[j]);
            for (r, &j) in idx.iter().enumerate() {
                self.amps[j] = (0..4).map(|c| m.get(r, c) * v[c]).sum();
            }
        }
        Ok(())
    }

    /// Exact probability that measuring `wire` yields 1.
    pub fn measure_prob(&self, wire: usize) -> Result<f64> {
        self.check_wire(wire)?;
        let bit = 1usize << self.shift(wire);
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & bit != 0 {
                p1 += a.norm_sqr();
            } else {
                p0 += a.norm_sqr();
            }
        }
        // Relative to the actual norm so rounding drift does not bias it.
        Ok(p1 / (p0 + p1))
    }

    /// Collapses `wire` onto `outcome` in place, keeping the wire. Returns
    /// the probability of that outcome.
    pub fn project(&mut self, wire: usize, outcome: u8) -> Result<f64> {
        let p_one = self.measure_prob(wire)?;
        let p = if outcome == 1 { p_one } else { 1.0 - p_one };
        if p < ZERO_PROB {
            return Err(Error::ImpossibleOutcome { outcome });
        }
        let bit = 1usize << self.shift(wire);
        let keep = if outcome == 1 { bit } else { 0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != keep {
                *a = C64::new(0.0, 0.0);
            }
        }
        self.renormalize();
        Ok(p)
    }

    /// Measures `wire`, deletes it and returns the bit with the old→new wire
    /// map. Surviving wires keep their relative order.
    pub fn measure(&self, wire: usize, src: &mut impl OutcomeSource) -> Result<(u8, PureState, WireMap)> {
        let mut next = self.clone();
        let (bit, map) = next.measure_remove(wire, src)?;
        Ok((bit, next, map))
    }

    pub fn measure_remove(&mut self, wire: usize, src: &mut impl OutcomeSource) -> Result<(u8, WireMap)> {
        let p_one = self.measure_prob(wire)?;
        let p_one = if p_one < ZERO_PROB {
            0.0
        } else if p_one > 1.0 - ZERO_PROB {
            1.0
        } else {
            p_one
        };
        let outcome = src.draw(p_one);
        self.project(wire, outcome)?;
        self.drop_collapsed(wire, outcome);
        let map = (0..self.num_wires + 1)
            .map(|w| match w.cmp(&wire) {
                std::cmp::Ordering::Less => Some(w),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(w - 1),
            })
            .collect();
        Ok((outcome, map))
    }

    fn drop_collapsed(&mut self, wire: usize, outcome: u8) {
        let shift = self.shift(wire);
        let low_mask = (1usize << shift) - 1;
        let keep = usize::from(outcome) << shift;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len() / 2];
        for (i, a) in self.amps.iter().enumerate() {
            if i & (1 << shift) == keep {
                out[((i >> (shift + 1)) << shift) | (i & low_mask)] = *a;
            }
        }
        self.amps = out;
        self.num_wires -= 1;
    }

    /// Inserts an unentangled qubit so that it becomes wire `index`.
    pub fn insert_wire(&mut self, index: usize, q: Qubit) -> Result<()> {
        if index > self.num_wires {
            return Err(Error::WireOutOfRange { wire: index, num_wires: self.num_wires + 1 });
        }
        if self.num_wires + 1 > MAX_WIRES {
            return Err(Error::TooManyWires(self.num_wires + 1));
        }
        let norm = q[0].norm_sqr() + q[1].norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        let shift = self.num_wires - index;
        let low_mask = (1usize << shift) - 1;
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len() * 2];
        for (i, a) in self.amps.iter().enumerate() {
            let base = ((i >> shift) << (shift + 1)) | (i & low_mask);
            out[base] = a * q[0];
            out[base | (1 << shift)] = a * q[1];
        }
        self.amps = out;
        self.num_wires += 1;
        Ok(())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let num_wires = self.num_wires + other.num_wires;
        if num_wires > MAX_WIRES {
            return Err(Error::TooManyWires(num_wires));
        }
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        Ok(PureState { num_wires, amps })
    }

    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.num_wires != other.num_wires {
            return Err(Error::DimensionMismatch { left: self.num_wires, right: other.num_wires });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `|⟨a|b⟩|²`, insensitive to global phase.
pub fn fidelity_up_to_phase(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// `(|0⟩ + e^{inπ/4}|1⟩)/√2`.
pub fn prepare_a_state(n: Angle8) -> PureState {
    PureState { num_wires: 1, amps: a_state_qubit(n).to_vec() }
}

pub(crate) fn a_state_qubit(n: Angle8) -> Qubit {
    [C64::new(FRAC_1_SQRT_2, 0.0), n.phase() * FRAC_1_SQRT_2]
}
