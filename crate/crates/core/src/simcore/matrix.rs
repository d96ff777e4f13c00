use std::ops::Mul;

use super::{C64, FRAC_1_SQRT_2};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

/// Single-qubit operator.
pub type Mat2 = [[C64; 2]; 2];

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix rows must be square");
            data.extend_from_slice(r);
        }
        Matrix { dim, data }
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Matrix { dim: 2, data: vec![m[0][0], m[0][1], m[1][0], m[1][1]] }
    }

    pub fn to_mat2(&self) -> Option<Mat2> {
        (self.dim == 2).then(|| [[self.data[0], self.data[1]], [self.data[2], self.data[3]]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn dagger(&self) -> Self {
        let mut out = Matrix::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.data[c * self.dim + r] = self.data[r * self.dim + c].conj();
            }
        }
        out
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        let dim = self.dim * other.dim;
        let mut out = Matrix::zeros(dim);
        for r1 in 0..self.dim {
            for c1 in 0..self.dim {
                let a = self.get(r1, c1);
                for r2 in 0..other.dim {
                    for c2 in 0..other.dim {
                        out.set(r1 * other.dim + r2, c1 * other.dim + c2, a * other.get(r2, c2));
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Matrix { dim: self.dim, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation after removing the best global phase.
    pub fn phase_distance(&self, other: &Matrix) -> f64 {
        let overlap = (other.dagger() * self.clone()).trace();
        let phase = if overlap.norm() < 1e-300 { C64::new(1.0, 0.0) } else { overlap / overlap.norm() };
        self.max_abs_diff(&other.scale(phase))
    }

    pub fn eq_up_to_phase(&self, other: &Matrix, tol: f64) -> bool {
        self.dim == other.dim && self.phase_distance(other) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.clone() * self.dagger()).max_abs_diff(&Matrix::identity(self.dim)) <= tol
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

pub(crate) fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

pub(crate) fn mat2_identity() -> Mat2 {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    [[o, z], [z, o]]
}

pub(crate) fn hadamard() -> Mat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}
