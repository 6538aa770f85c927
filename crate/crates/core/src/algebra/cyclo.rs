//! Arithmetic in `Z[z] / (z^N - 1)`.
//!
//! With `z` standing for `exp(i*pi/M)` and `N = 2M`, the cosine value
//! `2cos(a*pi/M)` is the vector `z^a + z^-a`, so every cosine power identity
//! becomes an identity between integer vectors.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::binomial;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloVec {
    coeffs: Vec<BigInt>,
}

impl CycloVec {
    pub fn zero(modulus: usize) -> Self {
        assert!(modulus >= 1, "modulus must be at least 1");
        CycloVec {
            coeffs: vec![BigInt::zero(); modulus],
        }
    }

    pub fn one(modulus: usize) -> Self {
        Self::monomial(modulus, 0, BigInt::one())
    }

    /// `c * z^e` with `e` reduced mod `N`.
    pub fn monomial(modulus: usize, e: i64, c: BigInt) -> Self {
        let mut v = Self::zero(modulus);
        v.coeffs[reduce(e, modulus)] = c;
        v
    }

    /// `z^a + z^-a`, the image of `2cos(a*pi/M)` when `N = 2M`.
    pub fn two_cos(modulus: usize, a: i64) -> Self {
        let mut v = Self::zero(modulus);
        v.coeffs[reduce(a, modulus)] += 1;
        v.coeffs[reduce(-a, modulus)] += 1;
        v
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("empty cyclotomic vector".into()));
        }
        Ok(CycloVec { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        CycloVec {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn modulus(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Evaluation at `z = 1`.
    pub fn sum(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycloVec {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycloVec {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        CycloVec {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `z^e`: a cyclic rotation.
    pub fn shift(&self, e: i64) -> Self {
        let n = self.modulus();
        let mut out = vec![BigInt::zero(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[reduce(j as i64 + e, n)] = c.clone();
        }
        CycloVec { coeffs: out }
    }

    /// Multiplication by `z^a + z^-a` without a full convolution.
    pub fn mul_two_cos(&self, a: i64) -> Self {
        let up = self.shift(a);
        let down = self.shift(-a);
        up.add(&down).expect("same modulus")
    }

    /// Cyclic convolution.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.modulus();
        let mut out = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    let slot = &mut out[(i + j) % n];
                    *slot += a * b;
                }
            }
        }
        Ok(CycloVec { coeffs: out })
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.modulus());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).expect("same modulus");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same modulus");
            }
        }
        acc
    }

    /// Image in `Z[z] / Phi_N(z)`: coefficients of degree below `phi(N)`.
    pub fn reduce_cyclotomic(&self) -> Vec<BigInt> {
        reduce_mod_monic(&self.coeffs, &cyclotomic_polynomial(self.modulus()))
    }
}

/// `cyclo_mul` under its contract name.
pub fn cyclo_mul(x: &CycloVec, y: &CycloVec) -> Result<CycloVec> {
    x.mul(y)
}

fn reduce(e: i64, n: usize) -> usize {
    e.rem_euclid(n as i64) as usize
}

/// `(z^e + z^-e)^n` reduced mod `z^N - 1`, by binary powering.
pub fn cos_power_vector(modulus: usize, e: i64, n: u64) -> CycloVec {
    CycloVec::two_cos(modulus, e).pow(n)
}

/// The same vector read directly off Pascal's row:
/// `sum_i C(n, i) z^(e(2i - n))`.
pub fn cos_power_direct(modulus: usize, e: i64, n: u64) -> CycloVec {
    let mut v = CycloVec::zero(modulus);
    let n = n as i64;
    for i in 0..=n {
        let c = binomial(n, i).expect("non-negative row");
        v.coeffs[reduce(e * (2 * i - n), modulus)] += c;
    }
    v
}

/// The centered-row form of the same power. Even `n = 2m`:
/// `C(2m, m) + sum_{k=1}^{m} C(2m, m + k) (z^{2ke} + z^{-2ke})`. Odd
/// `n = 2m + 1`: `sum_{k=1}^{m+1} C(2m + 1, m + k) (z^{(2k-1)e} + z^{-(2k-1)e})`.
pub fn cos_power_centered(modulus: usize, e: i64, n: u64) -> CycloVec {
    let m = (n / 2) as i64;
    let row = n as i64;
    let mut v = CycloVec::zero(modulus);
    if n % 2 == 0 {
        v.coeffs[0] += binomial(row, m).expect("non-negative row");
        for k in 1..=m {
            let c = binomial(row, m + k).expect("non-negative row");
            v = v.add(&CycloVec::two_cos(modulus, 2 * k * e).scale(&c)).expect("same modulus");
        }
    } else {
        for k in 1..=m + 1 {
            let c = binomial(row, m + k).expect("non-negative row");
            v = v
                .add(&CycloVec::two_cos(modulus, (2 * k - 1) * e).scale(&c))
                .expect("same modulus");
        }
    }
    v
}

static CYCLOTOMIC: Mutex<Option<HashMap<usize, Vec<BigInt>>>> = Mutex::new(None);

/// `Phi_n(x)` with ascending coefficients.
pub fn cyclotomic_polynomial(n: usize) -> Vec<BigInt> {
    assert!(n >= 1);
    if let Some(p) = CYCLOTOMIC
        .lock()
        .expect("cache lock")
        .as_ref()
        .and_then(|m| m.get(&n))
    {
        return p.clone();
    }
    // x^n - 1 divided by every Phi_d with d a proper divisor of n.
    let mut num = vec![BigInt::zero(); n + 1];
    num[0] = BigInt::from(-1);
    num[n] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        num = exact_div_monic(&num, &cyclotomic_polynomial(d));
    }
    CYCLOTOMIC
        .lock()
        .expect("cache lock")
        .get_or_insert_with(HashMap::new)
        .insert(n, num.clone());
    num
}

/// Quotient of an exact division by a monic polynomial.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    quot
}

/// Remainder of `p` modulo the monic `m`, padded to `deg(m)` entries.
pub fn reduce_mod_monic(p: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let dm = m.len() - 1;
    let mut rem = p.to_vec();
    if rem.len() > dm {
        for i in (dm..rem.len()).rev() {
            let c = rem[i].clone();
            if c.is_zero() {
                continue;
            }
            for (j, mj) in m.iter().enumerate() {
                rem[i - dm + j] -= &c * mj;
            }
        }
    }
    rem.resize(dm, BigInt::zero());
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_examples() {
        let z = CycloVec::from_i64(&[0, 1, 0, 0, 0]);
        let z4 = CycloVec::from_i64(&[0, 0, 0, 0, 1]);
        assert_eq!(cyclo_mul(&z, &z4).unwrap(), CycloVec::one(5));
        let x = CycloVec::from_i64(&[3, -1, 4, 1, 5]);
        assert_eq!(x.mul(&CycloVec::one(5)).unwrap(), x);
        let c = CycloVec::from_i64(&[0, 1, 0, 0, 1]);
        assert_eq!(c.mul(&c).unwrap(), CycloVec::from_i64(&[2, 0, 1, 1, 0]));
        assert_eq!(
            c.mul(&CycloVec::one(6)),
            Err(Error::ModulusMismatch(5, 6))
        );
    }

    #[test]
    fn cos_power_examples() {
        assert_eq!(cos_power_vector(5, 1, 1), CycloVec::from_i64(&[0, 1, 0, 0, 1]));
        assert_eq!(cos_power_vector(5, 1, 2), CycloVec::from_i64(&[2, 0, 1, 1, 0]));
        assert_eq!(cos_power_vector(12, 1, 0), CycloVec::one(12));
        assert_eq!(cos_power_vector(1, 3, 4).coeffs(), &[BigInt::from(16)]);
    }

    #[test]
    fn three_routes_agree() {
        for modulus in 1..=12 {
            for e in 0..=5 {
                for n in 0..=15u64 {
                    let v = cos_power_vector(modulus, e, n);
                    assert_eq!(v, cos_power_direct(modulus, e, n));
                    assert_eq!(v, cos_power_centered(modulus, e, n));
                }
            }
        }
    }

    #[test]
    fn evaluation_at_one_is_power_of_two() {
        for modulus in 1..=12 {
            for e in 0..4 {
                for n in 0..20u64 {
                    let v = cos_power_vector(modulus, e, n);
                    assert_eq!(v.sum(), BigInt::from(2).pow(n as u32));
                }
            }
        }
    }

    #[test]
    fn mul_two_cos_matches_convolution() {
        let x = CycloVec::from_i64(&[1, 2, 3, 4, 5, 6, 7]);
        for a in -9..9 {
            assert_eq!(x.mul_two_cos(a), x.mul(&CycloVec::two_cos(7, a)).unwrap());
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(10), ints(&[1, -1, 1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(24), ints(&[1, 0, 0, 0, -1, 0, 0, 0, 1]));
        // Product over divisors recovers x^n - 1.
        for n in 1..=40usize {
            let mut prod = ints(&[1]);
            for d in (1..=n).filter(|d| n % d == 0) {
                let phi = cyclotomic_polynomial(d);
                let mut next = vec![BigInt::zero(); prod.len() + phi.len() - 1];
                for (i, a) in prod.iter().enumerate() {
                    for (j, b) in phi.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                prod = next;
            }
            let mut expect = vec![BigInt::zero(); n + 1];
            expect[0] = BigInt::from(-1);
            expect[n] = BigInt::one();
            assert_eq!(prod, expect, "n = {n}");
        }
    }

    #[test]
    fn reduction_sends_cosine_sums_to_integers() {
        // 2cos(pi/5) + 2cos(3pi/5) = 1.
        let v = CycloVec::two_cos(10, 1).add(&CycloVec::two_cos(10, 3)).unwrap();
        let r = v.reduce_cyclotomic();
        assert_eq!(r[0], BigInt::one());
        assert!(r[1..].iter().all(|c| c.is_zero()));
    }
}
