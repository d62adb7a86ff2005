//! Quaternion scalar algebra.
//!
//! A quaternion is stored as its four real components `a + b i + c j + d k`
//! in double precision. Multiplication follows Hamilton's rules
//! `i² = j² = k² = ijk = -1`, so it is associative but not commutative.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The four rotators `1, i, j, k` used by the involutions and the augmented
/// representations. Their rotations form the Klein four-group, so composing
/// two of them is an XOR on the index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    One,
    I,
    J,
    K,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::One, Axis::I, Axis::J, Axis::K];

    pub fn index(self) -> usize {
        match self {
            Axis::One => 0,
            Axis::I => 1,
            Axis::J => 2,
            Axis::K => 3,
        }
    }

    pub fn from_index(idx: usize) -> Axis {
        Axis::ALL[idx & 3]
    }

    pub fn unit(self) -> Quaternion {
        match self {
            Axis::One => Quaternion::ONE,
            Axis::I => Quaternion::I,
            Axis::J => Quaternion::J,
            Axis::K => Quaternion::K,
        }
    }

    /// Axis whose involution equals applying `other` then `self`.
    pub fn compose(self, other: Axis) -> Axis {
        Axis::from_index(self.index() ^ other.index())
    }
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::raw(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::raw(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::raw(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::raw(0.0, 0.0, 0.0, 1.0);

    const fn raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// Builds a quaternion, panicking on NaN or infinite components.
    /// Use [`Quaternion::try_new`] for untrusted input.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        match Self::try_new(a, b, c, d) {
            Ok(q) => q,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for x in [a, b, c, d] {
            if !x.is_finite() {
                return Err(Error::NonFinite(x));
            }
        }
        Ok(Self::raw(a, b, c, d))
    }

    pub fn real(a: f64) -> Self {
        Self::new(a, 0.0, 0.0, 0.0)
    }

    pub fn from_array(v: [f64; 4]) -> Result<Self> {
        Self::try_new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Real part `Re{q}`.
    pub fn re(self) -> f64 {
        self.a
    }

    /// Pure quaternion part `Im{q}`.
    pub fn im(self) -> Quaternion {
        Self::raw(0.0, self.b, self.c, self.d)
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.a == 0.0 && self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    pub fn conj(self) -> Quaternion {
        Self::raw(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sqr(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest absolute component.
    pub fn max_abs(self) -> f64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    pub fn inverse(self) -> Result<Quaternion> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj() / n2)
    }

    /// Quaternion rotation `μ q μ⁻¹`, computed literally for any nonzero `μ`.
    pub fn rotate(self, mu: Quaternion) -> Result<Quaternion> {
        let inv = mu.inverse().map_err(|_| Error::ZeroRotator)?;
        Ok(mu * self * inv)
    }

    /// Closed-form involution `q^μ` for `μ ∈ {1, i, j, k}`: flips the sign of
    /// the two imaginary parts that are not along the axis.
    pub fn involution(self, axis: Axis) -> Quaternion {
        match axis {
            Axis::One => self,
            Axis::I => Self::raw(self.a, self.b, -self.c, -self.d),
            Axis::J => Self::raw(self.a, -self.b, self.c, -self.d),
            Axis::K => Self::raw(self.a, -self.b, -self.c, self.d),
        }
    }

    pub fn scale(self, s: f64) -> Quaternion {
        Self::raw(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Component `idx` (0 = real, 1..=3 = i, j, k).
    pub fn component(self, idx: usize) -> f64 {
        match idx {
            0 => self.a,
            1 => self.b,
            2 => self.c,
            3 => self.d,
            _ => panic!("quaternion component index {idx} out of range"),
        }
    }

    pub fn component_mut(&mut self, idx: usize) -> &mut f64 {
        match idx {
            0 => &mut self.a,
            1 => &mut self.b,
            2 => &mut self.c,
            3 => &mut self.d,
            _ => panic!("quaternion component index {idx} out of range"),
        }
    }
}

/// Hamilton product.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::raw(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, rhs: Quaternion) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;

    fn div(self, s: f64) -> Quaternion {
        Quaternion::raw(self.a / s, self.b / s, self.c / s, self.d / s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::raw(self.a + q.a, self.b + q.b, self.c + q.c, self.d + q.d)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, q: Quaternion) {
        *self = *self + q;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::raw(self.a - q.a, self.b - q.b, self.c - q.c, self.d - q.d)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, q: Quaternion) {
        *self = *self - q;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

impl From<f64> for Quaternion {
    fn from(a: f64) -> Self {
        Quaternion::real(a)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.a, self.b, self.c, self.d)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 4]>::deserialize(d)?;
        Quaternion::from_array(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn multiplication_table() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * i, -k);
        assert_eq!(j * k, i);
        assert_eq!(k * j, -i);
        assert_eq!(k * i, j);
        assert_eq!(i * k, -j);
        for u in [i, j, k] {
            assert_eq!(u * u, -Quaternion::ONE);
        }
        assert_eq!(i * j * k, -Quaternion::ONE);
    }

    #[test]
    fn qmul_examples() {
        let p = q(1.3, -0.2, 4.0, 0.5);
        assert_eq!(qmul(p, Quaternion::ONE), p);
        // (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        assert_eq!(
            qmul(q(1.0, 1.0, 0.0, 0.0), q(1.0, 0.0, 1.0, 0.0)),
            q(1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(q(1.0, 2.0, 3.0, 4.0).conj(), q(1.0, -2.0, -3.0, -4.0));
        assert_eq!(Quaternion::real(2.5).conj(), Quaternion::real(2.5));
        let p = q(0.3, 1.0, -2.0, 7.0);
        assert_eq!(p.conj().conj(), p);
    }

    #[test]
    fn rotate_examples() {
        let p = q(1.0, 2.0, 3.0, 4.0);
        assert_eq!(p.rotate(Quaternion::I).unwrap(), q(1.0, 2.0, -3.0, -4.0));
        assert_eq!(p.rotate(Quaternion::ONE).unwrap(), p);
        let r = p.rotate(p).unwrap();
        assert!((r - p).max_abs() < 1e-14);
        assert_eq!(p.rotate(Quaternion::ZERO), Err(Error::ZeroRotator));
    }

    #[test]
    fn involution_examples() {
        let p = q(1.0, 2.0, 3.0, 4.0);
        assert_eq!(p.involution(Axis::J), q(1.0, -2.0, 3.0, -4.0));
        assert_eq!(p.involution(Axis::One), p);
        assert_eq!(p.involution(Axis::K).involution(Axis::K), p);
        for axis in Axis::ALL {
            let rot = p.rotate(axis.unit()).unwrap();
            assert!((rot - p.involution(axis)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn involution_matches_minus_mu_q_mu() {
        let p = q(0.5, -1.0, 2.0, 3.5);
        for axis in [Axis::I, Axis::J, Axis::K] {
            let mu = axis.unit();
            assert_eq!(-(mu * p * mu), p.involution(axis));
        }
    }

    #[test]
    fn axis_composition_is_involution_composition() {
        let p = q(0.5, -1.0, 2.0, 3.5);
        for m in Axis::ALL {
            for n in Axis::ALL {
                assert_eq!(p.involution(n).involution(m), p.involution(m.compose(n)));
            }
        }
    }

    #[test]
    fn norm_and_inverse() {
        assert_eq!(q(1.0, 1.0, 1.0, 1.0).norm(), 2.0);
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(
            Quaternion::real(2.0).inverse().unwrap(),
            Quaternion::real(0.5)
        );
        assert_eq!(Quaternion::ZERO.inverse(), Err(Error::ZeroDivisor));
        let p = q(0.7, -1.1, 0.2, 3.0);
        let e = p * p.inverse().unwrap() - Quaternion::ONE;
        assert!(e.max_abs() < 1e-15);
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(matches!(
            Quaternion::try_new(f64::NAN, 0.0, 0.0, 0.0),
            Err(Error::NonFinite(_))
        ));
        assert!(Quaternion::try_new(0.0, f64::INFINITY, 0.0, 0.0).is_err());
        assert!(serde_json::from_str::<Quaternion>("[1, 2, 3]").is_err());
    }

    #[test]
    fn json_encoding_is_four_array() {
        let p = q(1.0, -2.0, 0.5, 4.0);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,-2.0,0.5,4.0]");
        let back: Quaternion = serde_json::from_str("[1,-2,0.5,4]").unwrap();
        assert_eq!(back, p);
    }
}
