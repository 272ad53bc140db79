//! Exact arithmetic in Z[ω] for prime d, extended by half-integer powers of d.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u32, u32),
    #[error("cannot add d^({0}/2) and d^({1}/2) terms: half-power parities differ")]
    ParityMismatch(i64, i64),
    #[error("{0} is not a prime dimension")]
    NotPrime(u32),
    #[error("malformed scalar: {0}")]
    Format(String),
}

pub fn is_prime(d: u32) -> bool {
    d >= 2 && (2..).take_while(|k| k * k <= d).all(|k| !d.is_multiple_of(k))
}

/// An element of Z[ω] stored as `d` integer coefficients of 1, ω, …, ω^{d−1},
/// kept with the last coefficient zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    d: u32,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    /// Builds from coefficients of ω^0, ω^1, …; positions past `d` wrap around.
    pub fn new(d: u32, coeffs: Vec<BigInt>) -> Self {
        let mut c = vec![BigInt::zero(); d as usize];
        for (k, v) in coeffs.into_iter().enumerate() {
            c[k % d as usize] += v;
        }
        let mut x = CycInt { d, coeffs: c };
        x.canonicalize();
        x
    }

    pub fn from_i64s(d: u32, coeffs: &[i64]) -> Self {
        Self::new(d, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(d: u32) -> Self {
        CycInt { d, coeffs: vec![BigInt::zero(); d as usize] }
    }

    pub fn one(d: u32) -> Self {
        Self::from_int(d, 1)
    }

    pub fn from_int(d: u32, v: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(d);
        x.coeffs[0] = v.into();
        x.canonicalize();
        x
    }

    /// ω^k for any integer k.
    pub fn omega_pow(d: u32, k: i64) -> Self {
        let mut x = Self::zero(d);
        x.coeffs[k.rem_euclid(d as i64) as usize] = BigInt::one();
        x.canonicalize();
        x
    }

    /// The quadratic Gauss sum Σ_k ω^{k²}.
    pub fn gauss_sum(d: u32) -> Self {
        let mut x = Self::zero(d);
        for k in 0..d as u64 {
            x.coeffs[((k * k) % d as u64) as usize] += 1;
        }
        x.canonicalize();
        x
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn canonicalize(&mut self) {
        let last = self.coeffs[self.d as usize - 1].clone();
        if !last.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c -= &last;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<&BigInt> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(RingError::DimensionMismatch(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        let mut x = CycInt { d: self.d, coeffs };
        x.canonicalize();
        Ok(x)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let d = self.d as usize;
        let mut out = vec![BigInt::zero(); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % d] += a * b;
                }
            }
        }
        let mut x = CycInt { d: self.d, coeffs: out };
        x.canonicalize();
        Ok(x)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.d);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CycInt { d: self.d, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Exact division by a rational integer, if every coefficient is divisible.
    pub fn div_int(&self, k: &BigInt) -> Option<Self> {
        if k.is_zero() || self.coeffs.iter().any(|c| !c.is_multiple_of(k)) {
            return None;
        }
        Some(CycInt { d: self.d, coeffs: self.coeffs.iter().map(|c| c / k).collect() })
    }

    /// The Galois automorphism ω ↦ ω^k.
    pub fn galois(&self, k: u32) -> Self {
        let d = self.d as usize;
        let mut out = vec![BigInt::zero(); d];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[(j * k as usize) % d] += c;
        }
        let mut x = CycInt { d: self.d, coeffs: out };
        x.canonicalize();
        x
    }

    pub fn to_complex(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.d as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += p * c.to_f64().unwrap_or(f64::NAN);
            p *= w;
        }
        acc
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let body = match k {
                0 => mag.to_string(),
                _ => {
                    let w = if k == 1 { "w".to_string() } else { format!("w^{k}") };
                    if mag.is_one() {
                        w
                    } else {
                        format!("{mag}{w}")
                    }
                }
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        CycInt { d: self.d, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        -&self
    }
}

macro_rules! cyc_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&CycInt> for &CycInt {
            type Output = CycInt;
            /// Panics on a dimension mismatch; use the `checked_` form to handle it.
            fn $m(self, rhs: &CycInt) -> CycInt {
                self.$checked(rhs).expect("CycInt dimension mismatch")
            }
        }
        impl $tr<CycInt> for CycInt {
            type Output = CycInt;
            fn $m(self, rhs: CycInt) -> CycInt {
                (&self).$m(&rhs)
            }
        }
    };
}

cyc_binop!(Add, add, checked_add);
cyc_binop!(Sub, sub, checked_sub);
cyc_binop!(Mul, mul, checked_mul);

/// `num · d^{halfpow/2}` in canonical form.
///
/// When d ≡ 1 (mod 4) the Gauss sum equals √d inside Z[ω], so odd exponents
/// are folded into the numerator and `halfpow` is always even.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: CycInt,
    halfpow: i64,
}

impl Scalar {
    pub fn new(num: CycInt, halfpow: i64) -> Self {
        let mut s = Scalar { num, halfpow };
        s.canonicalize();
        s
    }

    pub fn zero(d: u32) -> Self {
        Scalar { num: CycInt::zero(d), halfpow: 0 }
    }

    pub fn one(d: u32) -> Self {
        Scalar { num: CycInt::one(d), halfpow: 0 }
    }

    pub fn from_int(d: u32, v: impl Into<BigInt>) -> Self {
        Self::new(CycInt::from_int(d, v), 0)
    }

    pub fn omega(d: u32, k: i64) -> Self {
        Scalar { num: CycInt::omega_pow(d, k), halfpow: 0 }
    }

    /// d^{e/2}.
    pub fn sqrt_d_pow(d: u32, e: i64) -> Self {
        Self::new(CycInt::one(d), e)
    }

    pub fn d(&self) -> u32 {
        self.num.d
    }

    pub fn num(&self) -> &CycInt {
        &self.num
    }

    pub fn halfpow(&self) -> i64 {
        self.halfpow
    }

    fn folds(d: u32) -> bool {
        d % 4 == 1
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.halfpow = 0;
            return;
        }
        let d = self.num.d;
        if Self::folds(d) && self.halfpow.rem_euclid(2) == 1 {
            self.num = &self.num * &CycInt::gauss_sum(d);
            self.halfpow -= 1;
        }
        let dd = BigInt::from(d);
        while let Some(q) = self.num.div_int(&dd) {
            self.num = q;
            self.halfpow += 2;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.halfpow == 0 && self.num.is_one()
    }

    /// Returns e when this scalar is exactly d^{e/2}.
    pub fn as_sqrt_d_power(&self) -> Option<i64> {
        if self.num.is_one() {
            return Some(self.halfpow);
        }
        let d = self.d();
        (Self::folds(d) && self.num == CycInt::gauss_sum(d)).then_some(self.halfpow + 1)
    }

    /// Returns (s, k) when this scalar equals s·ω^k with s = ±1.
    pub fn as_root_of_unity(&self) -> Option<(i8, u32)> {
        let d = self.d();
        for k in 0..d {
            let w = Scalar::omega(d, k as i64);
            if *self == w {
                return Some((1, k));
            }
            if *self == -&w {
                return Some((-1, k));
            }
        }
        None
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        Ok(Self::new(self.num.checked_mul(&other.num)?, self.halfpow + other.halfpow))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.num.check(&other.num)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if (self.halfpow - other.halfpow).rem_euclid(2) != 0 {
            return Err(RingError::ParityMismatch(self.halfpow, other.halfpow));
        }
        let (lo, hi) = if self.halfpow <= other.halfpow { (self, other) } else { (other, self) };
        let shift = ((hi.halfpow - lo.halfpow) / 2) as u32;
        let lifted = hi.num.scale(&BigInt::from(lo.d()).pow(shift));
        Ok(Self::new(lo.num.checked_add(&lifted)?, lo.halfpow))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.checked_add(&-other)
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::new(self.num.pow(e), self.halfpow * e as i64)
    }

    /// The q with `self · q = other`, if it exists in Z[ω]·d^{ℤ/2}.
    pub fn proportional(&self, other: &Self) -> Option<Scalar> {
        if self.is_zero() || self.d() != other.d() {
            return None;
        }
        let d = self.d();
        if other.is_zero() {
            return Some(Scalar::zero(d));
        }
        let mut conj = CycInt::one(d);
        for k in 2..d {
            conj = &conj * &self.num.galois(k);
        }
        let norm = (&self.num * &conj).as_integer().expect("norm is rational").clone();
        let dd = BigInt::from(d);
        let (mut m, mut t) = (norm, 0i64);
        while m.is_multiple_of(&dd) {
            m /= &dd;
            t += 1;
        }
        let top = &other.num * &conj;
        let q = Scalar::new(top.div_int(&m)?, other.halfpow - self.halfpow - 2 * t);
        (self * &q == *other).then_some(q)
    }

    pub fn inverse(&self) -> Option<Scalar> {
        self.proportional(&Scalar::one(self.d()))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.num.to_complex() * (self.d() as f64).powf(self.halfpow as f64 / 2.0)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.halfpow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})*d^({}/2)", self.num, self.halfpow)
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, halfpow: self.halfpow }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.checked_mul(rhs).expect("Scalar dimension mismatch")
    }
}

impl Mul<Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coeff {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    coeffs: Vec<Coeff>,
    halfpow: i64,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coeffs = self
            .num
            .coeffs
            .iter()
            .map(|c| c.to_i64().map(Coeff::Small).unwrap_or_else(|| Coeff::Big(c.to_string())))
            .collect();
        ScalarRepr { coeffs, halfpow: self.halfpow }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(de)?;
        let d = repr.coeffs.len() as u32;
        if !is_prime(d) {
            return Err(D::Error::custom(RingError::NotPrime(d)));
        }
        let coeffs = repr
            .coeffs
            .into_iter()
            .map(|c| match c {
                Coeff::Small(v) => Ok(BigInt::from(v)),
                Coeff::Big(s) => s.parse::<BigInt>().map_err(|e| D::Error::custom(RingError::Format(e.to_string()))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scalar::new(CycInt::new(d, coeffs), repr.halfpow))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(d: u32, c: &[i64]) -> CycInt {
        CycInt::from_i64s(d, c)
    }

    #[test]
    fn sum_of_all_powers_vanishes() {
        let a = cyc(3, &[1, 1]);
        let b = cyc(3, &[0, 0, 1]);
        assert!((&a + &b).is_zero());
        assert_eq!(&a + &CycInt::zero(3), a);
    }

    #[test]
    fn conjugate_pairs_sum_to_minus_one_at_five() {
        let a = cyc(5, &[0, 1, 0, 0, 1]);
        let b = cyc(5, &[0, 0, 1, 1]);
        assert_eq!(&a + &b, CycInt::from_int(5, -1));
    }

    #[test]
    fn products() {
        assert!((&cyc(3, &[0, 1]) * &cyc(3, &[0, 0, 1])).is_one());
        assert!((&cyc(3, &[1, 1]) * &cyc(3, &[1, 0, 1])).is_one());
        let a = cyc(7, &[3, -1, 4, 1, -5]);
        assert_eq!(&a * &CycInt::one(7), a);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert_eq!(CycInt::one(3).checked_add(&CycInt::one(5)), Err(RingError::DimensionMismatch(3, 5)));
    }

    #[test]
    fn scalar_examples() {
        let h = Scalar::sqrt_d_pow(3, -1);
        let sq = &h * &h;
        assert_eq!(sq, Scalar::sqrt_d_pow(3, -2));
        assert!((sq.to_complex() - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!(Scalar::new(CycInt::from_int(3, 3), -2).is_one());
        assert_eq!(Scalar::one(3).checked_add(&Scalar::sqrt_d_pow(3, -1)), Err(RingError::ParityMismatch(0, -1)));
    }

    #[test]
    fn gauss_sum_is_sqrt_d_when_one_mod_four() {
        for d in [5u32, 13] {
            let g = CycInt::gauss_sum(d);
            assert_eq!(&g * &g, CycInt::from_int(d, d));
            let s = Scalar::sqrt_d_pow(d, 1);
            assert_eq!(s.halfpow(), 0);
            assert_eq!(s.as_sqrt_d_power(), Some(1));
            assert!(Scalar::one(d).checked_add(&s).is_ok());
        }
    }

    #[test]
    fn proportional_examples() {
        let one = Scalar::one(3);
        assert_eq!(one.proportional(&Scalar::omega(3, 1)), Some(Scalar::omega(3, 1)));
        assert_eq!(Scalar::sqrt_d_pow(3, -1).proportional(&Scalar::sqrt_d_pow(3, 1)), Some(Scalar::from_int(3, 3)));
        assert_eq!(Scalar::from_int(3, 2).proportional(&one), None);
        // 1 − ω has norm 3, so it divides 3 up to a unit
        let a = Scalar::new(cyc(3, &[1, -1]), 0);
        let q = a.proportional(&Scalar::from_int(3, 3)).unwrap();
        assert_eq!(&a * &q, Scalar::from_int(3, 3));
    }

    #[test]
    fn frobenius_on_constants() {
        for d in [2u32, 3, 5, 7] {
            for x in 0..d as i64 {
                let c = CycInt::from_int(d, x).pow(d);
                let r = c.as_integer().unwrap().mod_floor(&BigInt::from(d));
                assert_eq!(r, BigInt::from(x));
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let s = Scalar::new(cyc(3, &[2, -7, 1]), -3);
        let text = serde_json::to_string(&s).unwrap();
        let back: Scalar = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        let raw: Scalar = serde_json::from_str(r#"{"coeffs":[3,0,0],"halfpow":-2}"#).unwrap();
        assert!(raw.is_one());
        assert!(serde_json::from_str::<Scalar>(r#"{"coeffs":[1,0,0,0],"halfpow":0}"#).is_err());
    }

    fn arb_cyc(d: u32) -> impl Strategy<Value = CycInt> {
        prop::collection::vec(-100i64..=100, d as usize).prop_map(move |c| CycInt::from_i64s(d, &c))
    }

    fn arb_d() -> impl Strategy<Value = u32> {
        prop::sample::select(vec![2u32, 3, 5, 7])
    }

    proptest! {
        #[test]
        fn ring_axioms((a, b, c) in arb_d().prop_flat_map(|d| (arb_cyc(d), arb_cyc(d), arb_cyc(d)))) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn canonical_is_idempotent(a in arb_d().prop_flat_map(arb_cyc), e in -6i64..6) {
            let s = Scalar::new(a, e);
            prop_assert_eq!(Scalar::new(s.num().clone(), s.halfpow()), s.clone());
            prop_assert_eq!(CycInt::new(s.d(), s.num().coeffs().to_vec()), s.num().clone());
        }

        #[test]
        fn embedding_is_a_homomorphism((a, b) in arb_d().prop_flat_map(|d| (arb_cyc(d), arb_cyc(d)))) {
            let (za, zb) = (a.to_complex(), b.to_complex());
            prop_assert!(((&a + &b).to_complex() - (za + zb)).norm() < 1e-10 * (1.0 + za.norm() + zb.norm()));
            prop_assert!(((&a * &b).to_complex() - za * zb).norm() < 1e-10 * (1.0 + za.norm() * zb.norm()));
        }

        #[test]
        fn scalar_embedding_tracks_halfpow(a in arb_d().prop_flat_map(arb_cyc), e in -5i64..5) {
            let s = Scalar::new(a.clone(), e);
            let want = a.to_complex() * (a.d() as f64).powf(e as f64 / 2.0);
            prop_assert!((s.to_complex() - want).norm() < 1e-8 * (1.0 + want.norm()));
        }

        #[test]
        fn proportional_recovers_factor((a, q) in arb_d().prop_flat_map(|d| (arb_cyc(d), arb_cyc(d))), ea in -3i64..3, eq in -3i64..3) {
            prop_assume!(!a.is_zero());
            let sa = Scalar::new(a, ea);
            let sq = Scalar::new(q, eq);
            let b = &sa * &sq;
            prop_assert_eq!(sa.proportional(&b), Some(sq));
        }
    }
}
