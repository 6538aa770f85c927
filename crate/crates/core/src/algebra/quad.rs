//! Values `a + b*sqrt(D)` with rational `a`, `b` and squarefree `D >= 0`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::cyclo::CycloVec;
use crate::error::{Error, Result};
use crate::exact::kronecker;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadValue {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

/// Splits `d` into `s^2 * f` with `f` squarefree.
fn squarefree_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut rest = d.clone();
    let mut square = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let pp = &p * &p;
        while rest.is_multiple_of(&pp) {
            rest /= &pp;
            square *= &p;
        }
        p += 1;
    }
    (square, rest)
}

impl QuadValue {
    /// `a + b*sqrt(d)`, normalised so that `d` is squarefree and a rational
    /// value always carries `d = 0`.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Result<Self> {
        if d.is_negative() {
            return Err(Error::InvalidArgument(format!("negative discriminant {d}")));
        }
        let (mut a, mut b, mut d) = (a, b, d);
        if !d.is_zero() {
            let (s, f) = squarefree_split(&d);
            b *= BigRational::from_integer(s);
            d = f;
        }
        if d.is_one() {
            a += &b;
            b = BigRational::zero();
        }
        if d.is_zero() {
            b = BigRational::zero();
        }
        if b.is_zero() {
            d = BigInt::zero();
        }
        Ok(QuadValue { a, b, d })
    }

    pub fn rational(a: BigRational) -> Self {
        QuadValue {
            a,
            b: BigRational::zero(),
            d: BigInt::zero(),
        }
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(v.into()))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// `c * sqrt(d)`.
    pub fn surd(c: BigRational, d: i64) -> Result<Self> {
        Self::new(BigRational::zero(), c, BigInt::from(d))
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    fn common_d(&self, other: &Self) -> Result<BigInt> {
        match (self.d.is_zero(), other.d.is_zero()) {
            (true, _) => Ok(other.d.clone()),
            (_, true) => Ok(self.d.clone()),
            _ if self.d == other.d => Ok(self.d.clone()),
            _ => Err(Error::MixedDiscriminant(self.to_string(), other.to_string())),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_d(other)?;
        Self::new(&self.a + &other.a, &self.b + &other.b, d)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other.clone())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_d(other)?;
        let dr = BigRational::from_integer(d.clone());
        Self::new(
            &self.a * &other.a + &self.b * &other.b * dr,
            &self.a * &other.b + &self.b * &other.a,
            d,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let norm = &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone());
        if norm.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        Self::new(&self.a / &norm, -&self.b / &norm, self.d.clone())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(&self.a * c, &self.b * c, self.d.clone()).expect("same discriminant")
    }
}

impl Add for &QuadValue {
    type Output = QuadValue;
    fn add(self, rhs: &QuadValue) -> QuadValue {
        self.checked_add(rhs).expect("matching discriminants")
    }
}

impl Sub for &QuadValue {
    type Output = QuadValue;
    fn sub(self, rhs: &QuadValue) -> QuadValue {
        self.checked_sub(rhs).expect("matching discriminants")
    }
}

impl Mul for &QuadValue {
    type Output = QuadValue;
    fn mul(self, rhs: &QuadValue) -> QuadValue {
        self.checked_mul(rhs).expect("matching discriminants")
    }
}

impl Neg for QuadValue {
    type Output = QuadValue;
    fn neg(self) -> QuadValue {
        QuadValue {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl From<i64> for QuadValue {
    fn from(v: i64) -> Self {
        QuadValue::int(v)
    }
}

impl fmt::Display for QuadValue {
    /// `a` for rational values, otherwise `a+b√D` (or `a-b√D`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}√{}", self.a, sign, self.b.abs(), self.d)
    }
}

impl FromStr for QuadValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("malformed quadratic value `{s}`"));
        let s = s.trim();
        let Some((head, d)) = s.split_once('√') else {
            return Ok(QuadValue::rational(s.parse().map_err(|_| bad())?));
        };
        // The sign between the parts is the last '+' or '-' not at position 0.
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let a: BigRational = head[..split].parse().map_err(|_| bad())?;
        let mut b: BigRational = head[split + 1..].parse().map_err(|_| bad())?;
        if head[split..].starts_with('-') {
            b = -b;
        }
        let d: BigInt = d.parse().map_err(|_| bad())?;
        QuadValue::new(a, b, d)
    }
}

impl Serialize for QuadValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

fn small_factors(mut d: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= d {
        while d % p == 0 {
            out.push(p);
            d /= p;
        }
        p += 1;
    }
    if d > 1 {
        out.push(d);
    }
    out
}

/// The positive square root of a squarefree `d` inside `Z[z]/(z^order - 1)`,
/// with `z` read as `exp(2*pi*i/order)`.
///
/// Built from quadratic Gauss sums, so each odd prime factor of `d` must
/// divide `order`; a factor `p = 3 (mod 4)` additionally needs `4 | order`
/// and a factor 2 needs `8 | order`.
pub fn sqrt_in_cyclotomic(d: i64, order: usize) -> Result<CycloVec> {
    let missing = || Error::NoSurd { d, order };
    if d <= 1 {
        return Err(missing());
    }
    let mut acc = CycloVec::one(order);
    for p in small_factors(d as u64) {
        let p = p as usize;
        let root = if p == 2 {
            if order % 8 != 0 {
                return Err(missing());
            }
            CycloVec::two_cos(order, (order / 8) as i64)
        } else {
            if order % p != 0 {
                return Err(missing());
            }
            let step = (order / p) as i64;
            let mut gauss = CycloVec::zero(order);
            for a in 1..p as i64 {
                let chi = kronecker(a, p as i64)?;
                let term = CycloVec::monomial(order, a * step, BigInt::from(chi));
                gauss = gauss.add(&term)?;
            }
            if p % 4 == 3 {
                // The Gauss sum is i*sqrt(p); multiply by -i = z^(3*order/4).
                if order % 4 != 0 {
                    return Err(missing());
                }
                gauss.shift((3 * order / 4) as i64)
            } else {
                gauss
            }
        };
        acc = acc.mul(&root)?;
    }
    Ok(acc)
}

/// Recognises `v` (read modulo the cyclotomic polynomial) as `a + b*sqrt(d)`;
/// `d = 0` means the value must be rational. `None` if it is not of that form.
pub fn recognize_quadratic(v: &CycloVec, d: i64) -> Result<Option<QuadValue>> {
    let order = v.modulus();
    let target: Vec<BigRational> = v
        .reduce_cyclotomic()
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let rational_only = |t: &[BigRational]| t.iter().skip(1).all(|c| c.is_zero());
    if d == 0 {
        return Ok(rational_only(&target).then(|| QuadValue::rational(target[0].clone())));
    }
    let root: Vec<BigRational> = sqrt_in_cyclotomic(d, order)?
        .reduce_cyclotomic()
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let Some(pivot) = (1..root.len()).find(|&j| !root[j].is_zero()) else {
        return Err(Error::NoSurd { d, order });
    };
    let b = &target[pivot] / &root[pivot];
    let a = &target[0] - &b * &root[0];
    let consistent = (1..target.len()).all(|j| target[j] == &b * &root[j]);
    if !consistent {
        return Ok(None);
    }
    Ok(Some(QuadValue::new(a, b, BigInt::from(d))?))
}

/// Floating-point value, for diagnostics only.
pub fn approx(v: &QuadValue) -> f64 {
    let a = v.a.to_f64().unwrap_or(f64::NAN);
    let b = v.b.to_f64().unwrap_or(f64::NAN);
    let d = v.d.to_f64().unwrap_or(f64::NAN);
    a + b * d.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64, d: i64) -> QuadValue {
        QuadValue::new(
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            d.into(),
        )
        .unwrap()
    }

    #[test]
    fn normalisation() {
        assert_eq!(q(1, 1, 20), q(1, 2, 5));
        assert_eq!(q(1, 3, 1), QuadValue::int(4));
        assert_eq!(q(2, 0, 7).discriminant(), &BigInt::zero());
        assert_eq!(q(0, 2, 0), QuadValue::zero());
    }

    #[test]
    fn field_arithmetic() {
        let phi = QuadValue::new(BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into()), 5.into()).unwrap();
        // phi^2 = phi + 1
        assert_eq!(&phi * &phi, &phi + &QuadValue::int(1));
        let inv = phi.inverse().unwrap();
        assert_eq!(&inv * &phi, QuadValue::int(1));
        let r5 = q(0, 1, 5);
        assert_eq!(&r5 * &r5, QuadValue::int(5));
        assert!(r5.checked_add(&q(0, 1, 3)).is_err());
    }

    #[test]
    fn string_round_trip() {
        for v in [q(0, 1, 5), q(-3, -2, 3), QuadValue::ratio(-7, 2), QuadValue::new(BigRational::new(1.into(), 2.into()), BigRational::new((-3).into(), 4.into()), 5.into()).unwrap()] {
            let s = v.to_string();
            assert_eq!(s.parse::<QuadValue>().unwrap(), v, "{s}");
        }
        assert_eq!(q(0, 1, 5).to_string(), "0+1√5");
        assert!("1+x√5".parse::<QuadValue>().is_err());
    }

    #[test]
    fn gauss_sum_roots_square_correctly() {
        for (d, order) in [(5i64, 10usize), (5, 20), (3, 12), (3, 24), (2, 8), (2, 16), (13, 26), (7, 28), (6, 24), (15, 60)] {
            let s = sqrt_in_cyclotomic(d, order).unwrap();
            let sq = s.mul(&s).unwrap();
            let r = recognize_quadratic(&sq, 0).unwrap().unwrap();
            assert_eq!(r, QuadValue::int(d), "d = {d}, order = {order}");
        }
        assert!(sqrt_in_cyclotomic(3, 6).is_err());
        assert!(sqrt_in_cyclotomic(2, 12).is_err());
    }

    #[test]
    fn recognises_positive_cosines() {
        // 2cos(pi/5) = (1 + sqrt5)/2 and 2cos(pi/6) = sqrt3.
        let phi = recognize_quadratic(&CycloVec::two_cos(10, 1), 5).unwrap().unwrap();
        assert_eq!(phi.to_string(), "1/2+1/2√5");
        let r3 = recognize_quadratic(&CycloVec::two_cos(12, 1), 3).unwrap().unwrap();
        assert_eq!(r3, q(0, 1, 3));
        assert!((approx(&phi) - 2.0 * (std::f64::consts::PI / 5.0).cos()).abs() < 1e-12);
        // 2cos(2pi/7) is cubic.
        assert_eq!(recognize_quadratic(&CycloVec::two_cos(28, 4), 7).unwrap(), None);
    }
}
