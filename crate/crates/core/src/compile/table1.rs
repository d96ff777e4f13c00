use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::simcore::{hadamard, mat2_identity, mat2_mul, Angle8, GateKind, Mat2, C64};

/// Longest word [`approximate_single_qubit`] will search.
pub const APPROX_DEPTH_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    H,
    Phase(Angle8),
}

impl Letter {
    pub fn mat2(self) -> Mat2 {
        match self {
            Letter::H => hadamard(),
            Letter::Phase(n) => GateKind::A(n).mat2().expect("one-wire gate"),
        }
    }

    /// H and the four T-like gates.
    pub fn search_alphabet() -> [Letter; 5] {
        [
            Letter::H,
            Letter::Phase(Angle8::T),
            Letter::Phase(Angle8::from(3)),
            Letter::Phase(Angle8::from(5)),
            Letter::Phase(Angle8::from(7)),
        ]
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::H => f.write_str("H"),
            Letter::Phase(n) => match n.index() {
                1 => f.write_str("T"),
                7 => f.write_str("T†"),
                3 => f.write_str("T³"),
                5 => f.write_str("(T³)†"),
                k => write!(f, "A({k})"),
            },
        }
    }
}

/// A word read as a matrix product, leftmost letter leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TLikeWord(pub Vec<Letter>);

impl TLikeWord {
    /// `P·H·Q·H` with phase letters of angles `p`, `q`.
    pub fn phh(p: u8, q: u8) -> Self {
        TLikeWord(vec![Letter::Phase(Angle8::from(p)), Letter::H, Letter::Phase(Angle8::from(q)), Letter::H])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mat2(&self) -> Mat2 {
        self.0.iter().fold(mat2_identity(), |acc, l| mat2_mul(&acc, &l.mat2()))
    }
}

impl fmt::Display for TLikeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("I");
        }
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    /// Unit Bloch-sphere axis.
    pub axis: [f64; 3],
    /// Rotation angle in [0, π].
    pub angle: f64,
}

/// Axis and angle of `u` read as `exp(-iφ n·σ/2)` up to global phase.
pub fn rotation_of(u: &Mat2) -> Result<Rotation> {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let mut v = {
        let s = det.sqrt();
        [[u[0][0] / s, u[0][1] / s], [u[1][0] / s, u[1][1] / s]]
    };
    if (v[0][0] + v[1][1]).re < 0.0 {
        v = [[-v[0][0], -v[0][1]], [-v[1][0], -v[1][1]]];
    }
    let i = C64::new(0.0, 1.0);
    let cos_half = ((v[0][0] + v[1][1]) / 2.0).re;
    // i·tr(Vσ)/2 = sin(φ/2)·n for V = cos(φ/2) I − i sin(φ/2) n·σ.
    let n = [
        (i * (v[0][1] + v[1][0]) / 2.0).re,
        (i * (i * (v[0][1] - v[1][0])) / 2.0).re,
        (i * (v[0][0] - v[1][1]) / 2.0).re,
    ];
    let sin_half = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if sin_half < 1e-12 {
        return Err(Error::Circuit("identity has no rotation axis".into()));
    }
    Ok(Rotation { axis: n.map(|c| c / sin_half), angle: 2.0 * sin_half.atan2(cos_half) })
}

/// Direction equality up to sign and scale.
pub fn same_direction(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    let norm = |v: [f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return false;
    }
    let ua = a.map(|c| c / na);
    let ub = b.map(|c| c / nb);
    let plus = (0..3).map(|k| (ua[k] - ub[k]).abs()).fold(0.0, f64::max);
    let minus = (0..3).map(|k| (ua[k] + ub[k]).abs()).fold(0.0, f64::max);
    plus.min(minus) <= tol
}

/// Rotation axis of a T-like word.
pub fn table1_axis(word: &TLikeWord) -> Result<Rotation> {
    rotation_of(&word.mat2())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub word: TLikeWord,
    /// The axis as printed, unnormalized.
    pub printed_axis: [f64; 3],
}

/// The eight words and the axes printed next to them.
pub fn table1_rows() -> Vec<Table1Row> {
    let (c1, s1) = ((PI / 8.0).cos(), (PI / 8.0).sin());
    let (c3, s3) = ((3.0 * PI / 8.0).cos(), (3.0 * PI / 8.0).sin());
    let rows = [
        (1, 1, [c1, s1, c1]),
        (1, 7, [-c1, -s1, c1]),
        (7, 1, [c1, -s1, -c1]),
        (7, 7, [-c1, s1, -c1]),
        (3, 3, [c3, s3, c3]),
        (3, 5, [-c3, -s3, c3]),
        (5, 3, [c3, -s3, -c3]),
        (5, 5, [-c3, s3, -c3]),
    ];
    rows.into_iter().map(|(p, q, axis)| Table1Row { word: TLikeWord::phh(p, q), printed_axis: axis }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub word: TLikeWord,
    /// `sqrt(1 − |tr(U†V)|/2)`, zero iff equal up to phase.
    pub distance: f64,
}

fn phase_free_distance(a: &Mat2, b: &Mat2) -> f64 {
    let overlap =
        a[0][0].conj() * b[0][0] + a[1][0].conj() * b[1][0] + a[0][1].conj() * b[0][1] + a[1][1].conj() * b[1][1];
    (1.0 - overlap.norm() / 2.0).max(0.0).sqrt()
}

fn canonical_key(m: &Mat2) -> [i64; 8] {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    let pivot = flat.iter().find(|z| z.norm() > 1e-6).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    let mut key = [0i64; 8];
    for (k, z) in flat.iter().enumerate() {
        let w = z * phase;
        key[2 * k] = (w.re * 1e8).round() as i64;
        key[2 * k + 1] = (w.im * 1e8).round() as i64;
    }
    key
}

/// Closest word over {H, T, T†, T³, (T³)†} with at most `depth_budget`
/// letters, found by breadth-first search with duplicate elimination.
/// Ties go to the shorter word.
pub fn approximate_single_qubit(target: &Mat2, depth_budget: usize) -> Result<Approximation> {
    if depth_budget > APPROX_DEPTH_CAP {
        return Err(Error::BudgetExceeded(format!("depth {depth_budget} exceeds cap {APPROX_DEPTH_CAP}")));
    }
    let t = crate::simcore::Matrix::from_mat2(target);
    if !t.is_unitary(1e-9) {
        return Err(Error::Circuit("target is not unitary".into()));
    }
    let alphabet = Letter::search_alphabet();
    let letters: Vec<Mat2> = alphabet.iter().map(|l| l.mat2()).collect();

    // (parent, letter index, matrix)
    let mut nodes: Vec<(usize, usize, Mat2)> = vec![(usize::MAX, 0, mat2_identity())];
    let mut seen: HashSet<[i64; 8]> = HashSet::from([canonical_key(&mat2_identity())]);
    let mut best = (phase_free_distance(target, &mat2_identity()), 0usize);
    let mut frontier = 0..1;
    for _ in 0..depth_budget {
        if best.0 < 1e-12 {
            break;
        }
        let start = nodes.len();
        for parent in frontier.clone() {
            let m = nodes[parent].2;
            for (li, l) in letters.iter().enumerate() {
                let next = mat2_mul(&m, l);
                if seen.insert(canonical_key(&next)) {
                    let d = phase_free_distance(target, &next);
                    nodes.push((parent, li, next));
                    if d < best.0 - 1e-15 {
                        best = (d, nodes.len() - 1);
                    }
                }
            }
        }
        frontier = start..nodes.len();
    }
    let mut word = Vec::new();
    let mut i = best.1;
    while i != 0 {
        word.push(alphabet[nodes[i].1]);
        i = nodes[i].0;
    }
    word.reverse();
    Ok(Approximation { word: TLikeWord(word), distance: best.0 })
}
