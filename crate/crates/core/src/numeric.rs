//! High-precision evaluation of cosine products.

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted distance between a product and the nearest integer.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in bits for a product with `n` factors.
pub fn working_precision(n: u64) -> usize {
    64 + 4 * n as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundedValue {
    pub rounded: BigInt,
    /// `|value - rounded|` in decimal scientific notation.
    pub residual: String,
    pub within_tolerance: bool,
    pub precision: usize,
}

fn check(x: BigFloat, what: &str) -> Result<BigFloat> {
    match x.err() {
        Some(e) => Err(Error::InvalidArgument(format!("{what}: {e:?}"))),
        None => Ok(x),
    }
}

/// Exact integer value of an integral `BigFloat`.
fn to_bigint(x: &BigFloat) -> Result<BigInt> {
    if x.is_zero() {
        return Ok(BigInt::default());
    }
    let (words, _, sign, exp, _) = x
        .as_raw_parts()
        .ok_or_else(|| Error::InvalidArgument("non-finite value".into()))?;
    let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
    let mantissa = BigUint::from_bytes_le(&bytes);
    // Value is mantissa * 2^(exp - total mantissa bits).
    let total = (words.len() * std::mem::size_of_val(&words[0]) * 8) as i64;
    let shift = exp as i64 - total;
    let magnitude = if shift >= 0 {
        mantissa << shift as usize
    } else {
        mantissa >> (-shift) as usize
    };
    let v = BigInt::from(magnitude);
    Ok(if sign == Sign::Neg { -v } else { v })
}

/// `prod_{s=1}^{n} (3 - 2cos(2 pi s / (2n + 1)))`, rounded to the nearest
/// integer.
pub fn sury_cos_product(n: u64) -> Result<RoundedValue> {
    let p = working_precision(n);
    let mut cc = Consts::new().map_err(|e| Error::InvalidArgument(format!("{e:?}")))?;
    let two_pi = cc.pi(p, RM).mul(&BigFloat::from_u64(2, p), p, RM);
    let denom = BigFloat::from_u64(2 * n + 1, p);
    let three = BigFloat::from_u64(3, p);
    let two = BigFloat::from_u64(2, p);
    let mut acc = BigFloat::from_u64(1, p);
    for s in 1..=n {
        let angle = two_pi.mul(&BigFloat::from_u64(s, p), p, RM).div(&denom, p, RM);
        let c = angle.cos(p, RM, &mut cc);
        let factor = three.sub(&two.mul(&c, p, RM), p, RM);
        acc = check(acc.mul(&factor, p, RM), "cosine product")?;
    }
    let rounded = check(acc.round(0, RM), "rounding")?;
    let residual = check(acc.sub(&rounded, p, RM).abs(), "residual")?;
    let tol = BigFloat::from_f64(RESIDUAL_TOLERANCE, p);
    let within = residual.cmp(&tol).is_some_and(|c| c < 0);
    let text = residual
        .format(Radix::Dec, RM, &mut cc)
        .map_err(|e| Error::InvalidArgument(format!("{e:?}")))?;
    Ok(RoundedValue {
        rounded: to_bigint(&rounded)?,
        residual: text,
        within_tolerance: within,
        precision: p,
    })
}
