use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Exact coefficient field used by [`MultiPoly`](super::MultiPoly).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    fn from_rational(q: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    /// `Some` when the value lies in the prime field.
    fn to_rational(&self) -> Option<BigRational>;

    fn inverse(&self) -> Option<Self>;

    /// Smallest positive integer clearing every denominator.
    fn denominator(&self) -> BigInt;

    fn to_complex<F: Float>(&self) -> Complex<F>;

    /// Primitive root of unity of order `k`, if representable.
    fn zeta(k: u8) -> Option<Self>;

    /// Parenthesised rendering for values outside the prime field.
    fn compound_text(&self) -> String;

    /// `(conductor, numerator coordinates, denominator)`.
    fn to_parts(&self) -> (u8, Vec<BigInt>, BigInt);

    fn from_parts(k: u8, num: &[BigInt], den: &BigInt) -> Option<Self>;

    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out *= other;
        out
    }

    fn is_integral(&self) -> bool {
        self.denominator().is_one()
    }
}

pub(crate) fn rational_to_float<F: Float>(q: &BigRational) -> F {
    let v = q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    });
    F::from(v).unwrap_or_else(F::nan)
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn denominator(&self) -> BigInt {
        self.denom().clone()
    }

    fn to_complex<F: Float>(&self) -> Complex<F> {
        Complex::new(rational_to_float(self), F::zero())
    }

    fn zeta(k: u8) -> Option<Self> {
        match k {
            1 => Some(Self::one()),
            _ => None,
        }
    }

    fn compound_text(&self) -> String {
        format!("({self})")
    }

    fn to_parts(&self) -> (u8, Vec<BigInt>, BigInt) {
        (1, vec![self.numer().clone()], self.denom().clone())
    }

    fn from_parts(k: u8, num: &[BigInt], den: &BigInt) -> Option<Self> {
        if den.is_zero() || num.is_empty() || num[1..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        if k != 1 && num.len() != 2 {
            return None;
        }
        Some(BigRational::new(num[0].clone(), den.clone()))
    }
}

/// Element of Q(zeta_k) for k in {1, 3, 4}, stored as an integer vector over
/// the power basis with a positive common denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycRational {
    k: u8,
    num: Vec<BigInt>,
    den: BigInt,
}

fn field_degree(k: u8) -> usize {
    match k {
        1 => 1,
        3 | 4 => 2,
        _ => panic!("unsupported conductor {k}"),
    }
}

fn join_conductor(a: u8, b: u8) -> u8 {
    match (a, b) {
        (1, k) | (k, 1) => k,
        (x, y) if x == y => x,
        (x, y) => panic!("cannot mix Q(zeta_{x}) with Q(zeta_{y})"),
    }
}

impl CycRational {
    pub fn new(k: u8, num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.len(), field_degree(k), "coordinate vector length");
        let mut out = CycRational { k, num, den };
        out.normalize();
        out
    }

    pub fn rational(q: &BigRational) -> Self {
        CycRational { k: 1, num: vec![q.numer().clone()], den: q.denom().clone() }
    }

    pub fn integer(n: i64) -> Self {
        CycRational { k: 1, num: vec![BigInt::from(n)], den: BigInt::one() }
    }

    /// `a + b*zeta_k` with rational `a`, `b`.
    pub fn from_pair(k: u8, a: &BigRational, b: &BigRational) -> Self {
        if k == 1 {
            return Self::rational(&(a + b));
        }
        let den = a.denom().lcm(b.denom());
        let na = a.numer() * (&den / a.denom());
        let nb = b.numer() * (&den / b.denom());
        Self::new(k, vec![na, nb], den)
    }

    pub fn conductor(&self) -> u8 {
        self.k
    }

    pub fn numerator_coeffs(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    /// Rational coordinates `(a, b)` of `a + b*zeta`.
    pub fn coords(&self) -> (BigRational, BigRational) {
        let a = BigRational::new(self.num[0].clone(), self.den.clone());
        let b = if self.num.len() > 1 {
            BigRational::new(self.num[1].clone(), self.den.clone())
        } else {
            BigRational::zero()
        };
        (a, b)
    }

    /// Real and imaginary parts of an element of Q(i) or Q.
    pub fn re_im(&self) -> Option<(BigRational, BigRational)> {
        match self.k {
            1 | 4 => Some(self.coords()),
            _ => None,
        }
    }

    fn lift(&self, k: u8) -> Vec<BigInt> {
        let mut v = self.num.clone();
        v.resize(field_degree(k), BigInt::zero());
        v
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -self.den.clone();
            for c in &mut self.num {
                *c = -c.clone();
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            self.den = &self.den / &g;
            for c in &mut self.num {
                *c = &*c / &g;
            }
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
        }
        if self.k != 1 && self.num[1..].iter().all(|c| c.is_zero()) {
            self.k = 1;
            self.num.truncate(1);
        }
    }

    fn combine_add(&self, other: &Self, sign: bool) -> Self {
        let k = join_conductor(self.k, other.k);
        let a = self.lift(k);
        let b = other.lift(k);
        let num = a
            .iter()
            .zip(&b)
            .map(|(x, y)| {
                let l = x * &other.den;
                let r = y * &self.den;
                if sign { l + r } else { l - r }
            })
            .collect();
        let mut out = CycRational { k, num, den: &self.den * &other.den };
        out.normalize();
        out
    }

    fn product(&self, other: &Self) -> Self {
        let k = join_conductor(self.k, other.k);
        let num = if k == 1 {
            vec![&self.num[0] * &other.num[0]]
        } else {
            let a = self.lift(k);
            let b = other.lift(k);
            let bd = &a[1] * &b[1];
            let c0 = &a[0] * &b[0] - &bd;
            let mut c1 = &a[0] * &b[1] + &a[1] * &b[0];
            if k == 3 {
                c1 -= &bd;
            }
            vec![c0, c1]
        };
        let mut out = CycRational { k, num, den: &self.den * &other.den };
        out.normalize();
        out
    }
}

impl std::fmt::Display for CycRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "{}", self.compound_text()),
        }
    }
}

impl Zero for CycRational {
    fn zero() -> Self {
        Self::integer(0)
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }
}

impl One for CycRational {
    fn one() -> Self {
        Self::integer(1)
    }
}

impl std::ops::Add for CycRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.combine_add(&rhs, true)
    }
}

impl std::ops::Sub for CycRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.combine_add(&rhs, false)
    }
}

impl std::ops::Mul for CycRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl Neg for CycRational {
    type Output = Self;
    fn neg(mut self) -> Self {
        for c in &mut self.num {
            *c = -c.clone();
        }
        self
    }
}

impl<'a> AddAssign<&'a CycRational> for CycRational {
    fn add_assign(&mut self, rhs: &'a CycRational) {
        *self = self.combine_add(rhs, true);
    }
}

impl<'a> SubAssign<&'a CycRational> for CycRational {
    fn sub_assign(&mut self, rhs: &'a CycRational) {
        *self = self.combine_add(rhs, false);
    }
}

impl<'a> MulAssign<&'a CycRational> for CycRational {
    fn mul_assign(&mut self, rhs: &'a CycRational) {
        *self = self.product(rhs);
    }
}

impl Scalar for CycRational {
    fn from_rational(q: &BigRational) -> Self {
        Self::rational(q)
    }

    fn to_rational(&self) -> Option<BigRational> {
        if self.k == 1 {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (num, norm) = match self.k {
            1 => (vec![self.den.clone()], self.num[0].clone()),
            3 => {
                let (a, b) = (&self.num[0], &self.num[1]);
                let norm = a * a - a * b + b * b;
                (vec![&self.den * (a - b), -(&self.den * b)], norm)
            }
            _ => {
                let (a, b) = (&self.num[0], &self.num[1]);
                let norm = a * a + b * b;
                (vec![&self.den * a, -(&self.den * b)], norm)
            }
        };
        let mut out = CycRational { k: self.k, num, den: norm };
        out.normalize();
        Some(out)
    }

    fn denominator(&self) -> BigInt {
        self.den.clone()
    }

    fn to_complex<F: Float>(&self) -> Complex<F> {
        let (a, b) = self.coords();
        let a: F = rational_to_float(&a);
        let b: F = rational_to_float(&b);
        match self.k {
            1 => Complex::new(a, F::zero()),
            3 => {
                let half = F::from(0.5).unwrap();
                let s3 = F::from(3.0).unwrap().sqrt() * half;
                Complex::new(a - b * half, b * s3)
            }
            _ => Complex::new(a, b),
        }
    }

    fn zeta(k: u8) -> Option<Self> {
        match k {
            1 => Some(Self::one()),
            3 | 4 => Some(Self::new(k, vec![BigInt::zero(), BigInt::one()], BigInt::one())),
            _ => None,
        }
    }

    fn compound_text(&self) -> String {
        let (a, b) = self.coords();
        let z = format!("zeta{}", self.k);
        let bpart = if b.abs().is_one() { z.clone() } else { format!("{}*{z}", b.abs()) };
        if a.is_zero() {
            if b.is_negative() { format!("(-{bpart})") } else { format!("({bpart})") }
        } else {
            let sign = if b.is_negative() { "-" } else { "+" };
            format!("({a} {sign} {bpart})")
        }
    }

    fn to_parts(&self) -> (u8, Vec<BigInt>, BigInt) {
        (self.k, self.num.clone(), self.den.clone())
    }

    fn from_parts(k: u8, num: &[BigInt], den: &BigInt) -> Option<Self> {
        if den.is_zero() || !matches!(k, 1 | 3 | 4) || num.len() != field_degree(k) {
            return None;
        }
        Some(Self::new(k, num.to_vec(), den.clone()))
    }
}
