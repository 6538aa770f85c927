use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Body, CenteredSum, Identity, OracleRef, Term, Weights};
use crate::algebra::QuadValue;
use crate::error::{Error, Result};
use crate::exact::{binomial, pascal_row, pow_int};
use crate::numeric::{sury_cos_product, RoundedValue};
use crate::sequences::{registry, SequenceOracle};

/// Value of one side of an identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Evaluated {
    Exact {
        #[serde(with = "crate::serde_str")]
        value: BigInt,
    },
    /// A numeric value rounded to the nearest integer.
    Rounded(RoundedValue),
}

impl Evaluated {
    pub fn integer(&self) -> &BigInt {
        match self {
            Evaluated::Exact { value } => value,
            Evaluated::Rounded(r) => &r.rounded,
        }
    }

    /// Whether a numeric value stayed close enough to its rounding.
    pub fn trusted(&self) -> bool {
        match self {
            Evaluated::Exact { .. } => true,
            Evaluated::Rounded(r) => r.within_tolerance,
        }
    }
}

impl fmt::Display for Evaluated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluated::Exact { value } => write!(f, "{value}"),
            Evaluated::Rounded(r) => write!(f, "{} (residual {})", r.rounded, r.residual),
        }
    }
}

enum TermValue {
    Exact(QuadValue),
    Rounded(RoundedValue),
}

fn rational(v: BigInt) -> QuadValue {
    QuadValue::rational(BigRational::from_integer(v))
}

fn resolve(o: &OracleRef, n: i64) -> Result<std::sync::Arc<SequenceOracle>> {
    let params: Vec<i64> = o.params.iter().map(|p| p.at(n, 0)).collect();
    registry().get(&o.name, &params)
}

fn row_at(row: &super::Lin, n: i64) -> Result<usize> {
    let r = row.at(n, 0);
    if r < 0 {
        return Err(Error::NegativeRow(r));
    }
    Ok(r as usize)
}

fn entry(row: &[BigInt], i: i64) -> BigInt {
    if i < 0 {
        return BigInt::zero();
    }
    row.get(i as usize).cloned().unwrap_or_default()
}

/// Evaluates a centered sum, running `extra` summands past the last
/// non-vanishing binomial.
fn centered(c: &CenteredSum, n: i64, extra: i64) -> Result<QuadValue> {
    let row = pascal_row(row_at(&c.row, n)?);
    let off = c.offset.at(n, 0);
    let kmax = row.len() as i64 - 1 - off + extra;
    let center = c.center.scale(&BigRational::from_integer(
        entry(&row, off) * c.sign.sign(n, 0),
    ));
    let body = match &c.weights {
        Weights::Periodic { table } => {
            let m = table.len() as i64;
            let mut sums = vec![BigInt::zero(); table.len()];
            for k in 1..=kmax {
                let b = entry(&row, off + k);
                if !b.is_zero() {
                    sums[k.rem_euclid(m) as usize] += b * c.sign.sign(n, k);
                }
            }
            let mut acc = QuadValue::zero();
            for (w, s) in table.iter().zip(sums) {
                if !s.is_zero() {
                    acc = acc.checked_add(&w.scale(&BigRational::from_integer(s)))?;
                }
            }
            acc
        }
        Weights::Oracle { oracle } => {
            let o = resolve(oracle, n)?;
            let mut acc = BigInt::zero();
            for k in 1..=kmax {
                let b = entry(&row, off + k);
                if !b.is_zero() {
                    acc += b * o.eval(oracle.index.at(n, k))? * c.sign.sign(n, k);
                }
            }
            rational(acc)
        }
    };
    center.checked_add(&body)?.checked_mul(&c.scale)
}

fn scaled(coef: &BigRational, v: BigInt) -> QuadValue {
    QuadValue::rational(coef * BigRational::from_integer(v))
}

/// Exact value of a term at `n`. `extra` lengthens every truncated sum; the
/// added summands must vanish.
pub fn eval_term(term: &Term, n: i64, extra: i64) -> Result<QuadValue> {
    match term_value(term, n, extra)? {
        TermValue::Exact(q) => Ok(q),
        TermValue::Rounded(_) => Err(Error::InvalidArgument("numeric term has no exact value".into())),
    }
}

fn term_value(term: &Term, n: i64, extra: i64) -> Result<TermValue> {
    let exact = match term {
        Term::Constant { c } => QuadValue::rational(c.clone()),
        Term::Power {
            coef,
            base,
            exponent,
        } => {
            let e = exponent.at(n, 0);
            let p = pow_int(base, e.unsigned_abs());
            if e >= 0 {
                scaled(coef, p)
            } else if p.is_zero() {
                return Err(Error::InvalidArgument("zero to a negative power".into()));
            } else {
                QuadValue::rational(coef / BigRational::from_integer(p))
            }
        }
        Term::ScaledBinomial { coef, row, lower } => {
            scaled(coef, binomial(row.at(n, 0), lower.at(n, 0))?)
        }
        Term::Oracle { coef, oracle } => {
            scaled(coef, resolve(oracle, n)?.eval(oracle.index.at(n, 0))?)
        }
        Term::Product { factors } => {
            let mut acc = QuadValue::one();
            for f in factors {
                acc = acc.checked_mul(&eval_term(f, n, extra)?)?;
            }
            acc
        }
        Term::CenteredSum(c) => centered(c, n, extra)?,
        Term::BinomialTransform { coef, row, oracle }
        | Term::SignedRowConvolution { coef, row, oracle } => {
            let alternating = matches!(term, Term::SignedRowConvolution { .. });
            let pascal = pascal_row(row_at(row, n)?);
            let o = resolve(oracle, n)?;
            let mut acc = BigInt::zero();
            for (k, b) in pascal.iter().enumerate() {
                let v = b * o.eval(oracle.index.at(n, k as i64))?;
                if alternating && k % 2 == 1 {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
            scaled(coef, acc)
        }
        Term::SteppedRow {
            coef,
            row,
            step,
            residue,
            base,
        } => {
            let pascal = pascal_row(row_at(row, n)?);
            let mut acc = BigInt::zero();
            let mut power = BigInt::one();
            let mut j = 0i64;
            while step * j + residue < pascal.len() as i64 + extra * step {
                acc += entry(&pascal, step * j + residue) * &power;
                power *= base;
                j += 1;
            }
            scaled(coef, acc)
        }
        Term::DiagonalSum { coef, base } => {
            if n < 0 {
                return Err(Error::NegativeRow(n));
            }
            let mut acc = BigInt::zero();
            for r in 0..=n + extra {
                if 2 * n - r < r {
                    continue;
                }
                let term = binomial(2 * n - r, r)? * pow_int(base, (n - r).max(0) as u64);
                if r % 2 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            scaled(coef, acc)
        }
        Term::CosProduct => {
            if n < 0 {
                return Err(Error::NegativeRow(n));
            }
            return Ok(TermValue::Rounded(sury_cos_product(n as u64)?));
        }
    };
    Ok(TermValue::Exact(exact))
}

/// Sums a side: exact terms must total an integer; a numeric term is added
/// after rounding.
pub fn eval_side(terms: &[Term], n: i64) -> Result<Evaluated> {
    eval_side_with(terms, n, 0)
}

pub(crate) fn eval_side_with(terms: &[Term], n: i64, extra: i64) -> Result<Evaluated> {
    let mut exact = QuadValue::zero();
    let mut numeric: Option<RoundedValue> = None;
    for t in terms {
        match term_value(t, n, extra)? {
            TermValue::Exact(q) => exact = exact.checked_add(&q)?,
            TermValue::Rounded(r) => {
                if numeric.is_some() {
                    return Err(Error::InvalidArgument("more than one numeric term".into()));
                }
                numeric = Some(r);
            }
        }
    }
    let Some(r) = exact.to_rational() else {
        return Err(Error::SurdResidue {
            what: format!("side at n = {n}"),
            value: exact.to_string(),
        });
    };
    let (q, rem) = r.numer().div_rem(r.denom());
    if !rem.is_zero() {
        return Err(Error::NonIntegral {
            what: format!("side at n = {n}"),
            value: r.to_string(),
        });
    }
    Ok(match numeric {
        None => Evaluated::Exact { value: q },
        Some(mut r) => {
            r.rounded += q;
            Evaluated::Rounded(r)
        }
    })
}

fn sides(identity: &Identity) -> Result<(&[Term], &[Term])> {
    match &identity.body {
        Body::Series { lhs, rhs } => Ok((lhs, rhs)),
        Body::CosPower { .. } => Err(Error::InvalidArgument(format!(
            "{} is a vector identity without scalar sides",
            identity.id
        ))),
    }
}

fn check_domain(identity: &Identity, n: i64) -> Result<()> {
    if !identity.domain.contains(n) {
        return Err(Error::OutOfDomain {
            name: identity.id.clone(),
            index: n,
        });
    }
    Ok(())
}

pub fn rhs_eval(identity: &Identity, n: i64) -> Result<Evaluated> {
    check_domain(identity, n)?;
    eval_side(sides(identity)?.1, n)
}

pub fn lhs_eval(identity: &Identity, n: i64) -> Result<Evaluated> {
    check_domain(identity, n)?;
    eval_side(sides(identity)?.0, n)
}

#[cfg(test)]
mod tests {
    use super::super::{Lin, SignRule};
    use super::*;

    fn ints(v: &[i64]) -> Vec<QuadValue> {
        v.iter().map(|&x| QuadValue::int(x)).collect()
    }

    fn exact(v: i64) -> Evaluated {
        Evaluated::Exact { value: v.into() }
    }

    #[test]
    fn centered_sum_matches_hand_expansion() {
        // C(6,4) - C(6,5) - C(6,6) = 8.
        let t = Term::CenteredSum(CenteredSum::even(QuadValue::zero(), ints(&[0, 1, -1, -1, 1])));
        assert_eq!(eval_side(std::slice::from_ref(&t), 3).unwrap(), exact(8));
        let alt = Term::CenteredSum(
            CenteredSum::even(QuadValue::int(1), ints(&[1])).with_sign(SignRule::AltK),
        );
        // sum_{k=-n}^{n} (-1)^k C(2n, n + k) counted once per side.
        assert_eq!(eval_side(&[alt], 2).unwrap(), exact(6 - 4 + 1));
    }

    #[test]
    fn half_integer_terms_must_cancel() {
        let half = Term::binomial(BigRational::new(7.into(), 2.into()), Lin::of_n(2, 0), Lin::of_n(1, 0));
        let minus = Term::power(BigRational::from_integer((-1).into()), 2, Lin::of_n(2, -1));
        assert_eq!(eval_side(&[half.clone(), minus], 2).unwrap(), exact(21 - 8));
        assert!(matches!(eval_side(&[half], 0), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn surd_residue_is_reported() {
        let t = Term::CenteredSum(CenteredSum::even(
            QuadValue::zero(),
            vec![QuadValue::surd(BigRational::one(), 5).unwrap()],
        ));
        assert!(matches!(eval_side(&[t], 2), Err(Error::SurdResidue { .. })));
    }

    #[test]
    fn negative_power_is_rational() {
        let t = Term::power(BigRational::one(), 2, Lin::of_n(1, -1));
        assert_eq!(eval_term(&t, 0, 0).unwrap(), QuadValue::ratio(1, 2));
    }

    #[test]
    fn transforms() {
        let bt = Term::BinomialTransform {
            coef: BigRational::one(),
            row: Lin::of_n(1, 0),
            oracle: OracleRef::new("fib", Lin::of_k(2, 0)),
        };
        // C(2,0)F0 + C(2,1)F2 + C(2,2)F4 = 0 + 2 + 3.
        assert_eq!(eval_side(&[bt], 2).unwrap(), exact(5));
        let sr = Term::SignedRowConvolution {
            coef: BigRational::one(),
            row: Lin::of_n(2, 1),
            oracle: OracleRef::new("fib", Lin::new(4, -4, 2)),
        };
        // n = 0: F2 - F(-2) = 2.
        assert_eq!(eval_side(&[sr], 0).unwrap(), exact(2));
        let diag = Term::DiagonalSum {
            coef: BigRational::one(),
            base: 5.into(),
        };
        assert_eq!(eval_side(&[diag], 2).unwrap(), exact(25 - 5 * 3 + 1));
        let stepped = Term::SteppedRow {
            coef: BigRational::one(),
            row: Lin::of_n(1, 0),
            step: 2,
            residue: 1,
            base: 5.into(),
        };
        // C(3,1) + 5 C(3,3) = 8 = 2^2 F3.
        assert_eq!(eval_side(&[stepped], 3).unwrap(), exact(8));
    }

    #[test]
    fn numeric_terms_round() {
        let v = eval_side(&[Term::CosProduct, Term::constant(1)], 2).unwrap();
        assert_eq!(v.integer(), &BigInt::from(12));
        assert!(v.trusted());
    }
}
