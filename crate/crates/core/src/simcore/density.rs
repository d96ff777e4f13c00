use super::{PureState, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    /// `I / 2^num_wires`.
    pub fn maximally_mixed(num_wires: usize) -> Self {
        let dim = 1usize << num_wires;
        let mut m = DensityMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        m
    }

    pub fn pure(state: &PureState) -> Self {
        let mut m = DensityMatrix::zeros(state.amplitudes().len());
        m.add_pure(1.0, state);
        m
    }

    pub(crate) fn add_pure(&mut self, weight: f64, state: &PureState) {
        let amps = state.amplitudes();
        debug_assert_eq!(amps.len(), self.dim);
        for (r, a) in amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let row = &mut self.data[r * self.dim..(r + 1) * self.dim];
            for (slot, b) in row.iter_mut().zip(amps) {
                *slot += a * b.conj() * weight;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_wires(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| (0..self.dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn max_deviation(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest entrywise distance from `I / dim`.
    pub fn deviation_from_maximally_mixed(&self) -> f64 {
        self.max_deviation(&DensityMatrix::maximally_mixed(self.num_wires())).expect("same dimension by construction")
    }
}

/// `Σ wᵢ |ψᵢ⟩⟨ψᵢ|` over an ensemble of equal-width states.
pub fn density_from_ensemble<'a>(members: impl IntoIterator<Item = (f64, &'a PureState)>) -> Result<DensityMatrix> {
    let mut acc: Option<DensityMatrix> = None;
    let mut total = 0.0;
    for (weight, state) in members {
        if weight < 0.0 || !weight.is_finite() {
            return Err(Error::InvalidWeights(weight));
        }
        let dim = state.amplitudes().len();
        let m = acc.get_or_insert_with(|| DensityMatrix::zeros(dim));
        if m.dim != dim {
            return Err(Error::DimensionMismatch { left: m.dim, right: dim });
        }
        m.add_pure(weight, state);
        total += weight;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(total));
    }
    acc.ok_or(Error::InvalidWeights(0.0))
}
