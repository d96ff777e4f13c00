use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};

use super::C64;

/// A phase angle restricted to multiples of π/4, stored as `n mod 8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "u8", from = "u8")]
pub struct Angle8(u8);

impl Angle8 {
    pub const ZERO: Angle8 = Angle8(0);
    pub const T: Angle8 = Angle8(1);
    pub const S: Angle8 = Angle8(2);
    pub const Z: Angle8 = Angle8(4);

    pub fn new(n: i64) -> Self {
        Angle8(n.rem_euclid(8) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn double(self) -> Self {
        self + self
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_4
    }

    /// `e^{inπ/4}`.
    pub fn phase(self) -> C64 {
        C64::from_polar(1.0, self.radians())
    }

    pub fn all() -> impl Iterator<Item = Angle8> {
        (0..8).map(Angle8)
    }
}

impl Neg for Angle8 {
    type Output = Angle8;
    fn neg(self) -> Angle8 {
        Angle8((8 - self.0) % 8)
    }
}

impl Add for Angle8 {
    type Output = Angle8;
    fn add(self, rhs: Angle8) -> Angle8 {
        Angle8((self.0 + rhs.0) % 8)
    }
}

impl From<u8> for Angle8 {
    fn from(n: u8) -> Self {
        Angle8(n % 8)
    }
}

impl From<Angle8> for u8 {
    fn from(a: Angle8) -> u8 {
        a.0
    }
}

impl fmt::Display for Angle8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/4", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn arithmetic_is_mod_8(a in 0u8..8, b in 0u8..8) {
            let (x, y) = (Angle8::from(a), Angle8::from(b));
            prop_assert_eq!((x + y).index(), (a + b) % 8);
            prop_assert_eq!(x + -x, Angle8::ZERO);
            prop_assert_eq!(x.double().index(), (2 * a) % 8);
            prop_assert_eq!(-(-x), x);
        }
    }

    #[test]
    fn negative_inputs_wrap() {
        assert_eq!(Angle8::new(-1).index(), 7);
        assert_eq!(Angle8::new(-8).index(), 0);
        assert_eq!(Angle8::new(17).index(), 1);
    }

    #[test]
    fn quadrupled_angle_is_zero_or_pi() {
        for a in Angle8::all() {
            let four = a.double().double();
            assert_eq!(four.index(), if a.is_odd() { 4 } else { 0 });
        }
    }
}
