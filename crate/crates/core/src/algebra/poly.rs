//! Monic integer polynomials whose roots are 2cos values, and their power sums.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::cyclo::CycloVec;
use crate::error::{Error, Result};

/// Monic polynomial with ascending integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self> {
        if coeffs.len() < 2 || !coeffs.last().is_some_and(|c| c.is_one()) {
            return Err(Error::NotMonic);
        }
        Ok(IntPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Linear-recurrence coefficients `c_1..c_d` satisfied by the power sums.
    pub fn recurrence_coeffs(&self) -> Vec<BigInt> {
        let d = self.degree();
        (1..=d).map(|i| -&self.coeffs[d - i]).collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = !mag.is_one() || i == 0;
            match (show_mag, i) {
                (true, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}x")?,
                (true, _) => write!(f, "{mag}x^{i}")?,
                (false, 1) => write!(f, "x")?,
                (false, _) => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// `prod_s (x - 2cos(a_s * pi / N))`, expanded in `Z[z]/(z^{2N} - 1)` and
/// reduced modulo the `2N`-th cyclotomic polynomial.
///
/// Every coefficient must reduce to an integer; otherwise the root set is not
/// closed under conjugation and the product has irrational coefficients.
pub fn char_poly_from_roots(n: usize, multiples: &[i64]) -> Result<IntPolynomial> {
    if multiples.is_empty() {
        return Err(Error::InvalidArgument("empty root set".into()));
    }
    let modulus = 2 * n;
    // Ascending coefficients of the partial product, each a ring element.
    let mut poly = vec![CycloVec::one(modulus)];
    for &a in multiples {
        let mut next = vec![CycloVec::zero(modulus); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c)?;
            next[i] = next[i].sub(&c.mul_two_cos(a))?;
        }
        poly = next;
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    for (degree, c) in poly.iter().enumerate() {
        let reduced = c.reduce_cyclotomic();
        if reduced.iter().skip(1).any(|x| !x.is_zero()) {
            return Err(Error::NotGaloisClosed { degree });
        }
        coeffs.push(reduced.first().cloned().unwrap_or_default());
    }
    IntPolynomial::new(coeffs)
}

/// Power sums `p_0..=p_n` of the roots of `p` by Newton's identities.
pub fn power_sums(p: &IntPolynomial, n: usize) -> Vec<BigInt> {
    let d = p.degree();
    // e-style coefficients: x^d + c_1 x^{d-1} + ... + c_d.
    let c: Vec<&BigInt> = (1..=d).map(|i| &p.coeffs[d - i]).collect();
    let mut sums: Vec<BigInt> = Vec::with_capacity(n + 1);
    sums.push(BigInt::from(d));
    for k in 1..=n {
        let mut acc = BigInt::zero();
        for i in 1..=k.min(d) {
            if i < k {
                acc += c[i - 1] * &sums[k - i];
            } else {
                acc += c[i - 1] * BigInt::from(k);
            }
        }
        sums.push(-acc);
    }
    sums
}

pub fn power_sum(p: &IntPolynomial, n: usize) -> BigInt {
    power_sums(p, n).pop().expect("at least p_0")
}

/// Monic polynomial whose roots are the squares of the roots of `p`.
///
/// Writing `p(x) = E(x^2) + x O(x^2)`, the result is
/// `(-1)^d (E(y)^2 - y O(y)^2)`.
pub fn squared_root_poly(p: &IntPolynomial) -> IntPolynomial {
    let even: Vec<BigInt> = p.coeffs.iter().step_by(2).cloned().collect();
    let odd: Vec<BigInt> = p.coeffs.iter().skip(1).step_by(2).cloned().collect();
    let d = p.degree();
    let mut out = vec![BigInt::zero(); d + 1];
    for (i, a) in even.iter().enumerate() {
        for (j, b) in even.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    for (i, a) in odd.iter().enumerate() {
        for (j, b) in odd.iter().enumerate() {
            out[i + j + 1] -= a * b;
        }
    }
    if d % 2 == 1 {
        for c in out.iter_mut() {
            *c = -&*c;
        }
    }
    IntPolynomial::new(out).expect("squared polynomial is monic")
}
