//! Identity descriptions as data: sides built from terms, an exact evaluator,
//! a verifier, and the built-in catalogue.

mod builtin;
mod eval;
mod verify;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::QuadValue;
use crate::error::{Error, Result};

pub use builtin::{builtin_registry, family_ids};
pub use eval::{eval_side, eval_term, rhs_eval, lhs_eval, Evaluated};
pub use verify::{
    summarize_families, verify, verify_all, verify_n, Divergence, FamilySummary, Status,
    VerificationReport, DEFAULT_N_MAX,
};

fn is_zero_i64(v: &i64) -> bool {
    *v == 0
}

/// `n * n_coef + k * k_coef + c`; `k` is the summation variable where one
/// exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Lin {
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub n: i64,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub k: i64,
    #[serde(default, skip_serializing_if = "is_zero_i64")]
    pub c: i64,
}

impl Lin {
    pub const fn new(n: i64, k: i64, c: i64) -> Self {
        Lin { n, k, c }
    }

    /// `a*n + c`.
    pub const fn of_n(a: i64, c: i64) -> Self {
        Lin { n: a, k: 0, c }
    }

    /// `a*k + c`.
    pub const fn of_k(a: i64, c: i64) -> Self {
        Lin { n: 0, k: a, c }
    }

    pub const fn constant(c: i64) -> Self {
        Lin { n: 0, k: 0, c }
    }

    pub fn at(&self, n: i64, k: i64) -> i64 {
        self.n * n + self.k * k + self.c
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (coef, var) in [(self.n, "n"), (self.k, "k"), (self.c, "")] {
            if coef == 0 {
                continue;
            }
            if !out.is_empty() {
                out.push(if coef < 0 { '-' } else { '+' });
            } else if coef < 0 {
                out.push('-');
            }
            let mag = coef.unsigned_abs();
            if mag != 1 || var.is_empty() {
                out.push_str(&mag.to_string());
            }
            out.push_str(var);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// Reference to a registered sequence evaluated at an affine index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRef {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Lin>,
    pub index: Lin,
}

impl OracleRef {
    pub fn new(name: &str, index: Lin) -> Self {
        OracleRef {
            name: name.to_string(),
            params: Vec::new(),
            index,
        }
    }

    pub fn with_params(mut self, params: Vec<Lin>) -> Self {
        self.params = params;
        self
    }
}

/// Sign attached to the `k`-th summand of a centered sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum SignRule {
    #[default]
    None,
    /// `(-1)^k`.
    AltK,
    /// `(-1)^(floor(k / m))`, the `(-1)^j` of a stride-`m` sum over `k = mj + r`.
    Block { m: i64 },
    /// `(-1)^((n - k)(t + 1))`.
    ParityStep { t: i64 },
}

impl SignRule {
    pub fn sign(&self, n: i64, k: i64) -> i64 {
        let odd = match *self {
            SignRule::None => false,
            SignRule::AltK => k.rem_euclid(2) == 1,
            SignRule::Block { m } => k.div_euclid(m).rem_euclid(2) == 1,
            SignRule::ParityStep { t } => ((n - k) * (t + 1)).rem_euclid(2) == 1,
        };
        if odd {
            -1
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Weights {
    /// `w(k mod M)`.
    Periodic { table: Vec<QuadValue> },
    /// `oracle(index(n, k))`.
    Oracle { oracle: OracleRef },
}

/// `scale * (center * s(0) * C(row, offset) + sum_{k>=1} C(row, offset + k) w(k) s(k))`
/// with `s` the sign rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteredSum {
    pub row: Lin,
    pub offset: Lin,
    pub center: QuadValue,
    pub weights: Weights,
    #[serde(default, skip_serializing_if = "is_no_sign")]
    pub sign: SignRule,
    #[serde(default = "QuadValue::one", skip_serializing_if = "is_one_quad")]
    pub scale: QuadValue,
}

fn is_no_sign(s: &SignRule) -> bool {
    *s == SignRule::None
}

fn is_one_quad(q: &QuadValue) -> bool {
    *q == QuadValue::one()
}

impl CenteredSum {
    /// Row `2n` centered at `n` with a periodic table.
    pub fn even(center: QuadValue, table: Vec<QuadValue>) -> Self {
        CenteredSum {
            row: Lin::of_n(2, 0),
            offset: Lin::of_n(1, 0),
            center,
            weights: Weights::Periodic { table },
            sign: SignRule::None,
            scale: QuadValue::one(),
        }
    }

    /// Row `2n + 1` centered at `n`.
    pub fn odd(table: Vec<QuadValue>) -> Self {
        CenteredSum {
            row: Lin::of_n(2, 1),
            ..Self::even(QuadValue::zero(), table)
        }
    }

    pub fn with_sign(mut self, sign: SignRule) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_scale(mut self, scale: QuadValue) -> Self {
        self.scale = scale;
        self
    }

    pub fn period(&self) -> Option<usize> {
        match &self.weights {
            Weights::Periodic { table } => Some(table.len()),
            Weights::Oracle { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Weights::Periodic { table } = &self.weights {
            if table.is_empty() {
                return Err(Error::InvalidArgument("empty weight table".into()));
            }
            let mut d = BigInt::zero();
            for w in table.iter().chain([&self.center]) {
                if w.discriminant().is_zero() {
                    continue;
                }
                if d.is_zero() {
                    d = w.discriminant().clone();
                } else if &d != w.discriminant() {
                    return Err(Error::MixedDiscriminant(d.to_string(), w.to_string()));
                }
            }
        }
        if let SignRule::Block { m } = self.sign {
            if m < 1 {
                return Err(Error::InvalidArgument(format!("sign block {m} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Term {
    Constant {
        #[serde(with = "crate::serde_str")]
        c: BigRational,
    },
    /// `coef * base^exponent`; negative exponents give rationals.
    Power {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        #[serde(with = "crate::serde_str")]
        base: BigInt,
        exponent: Lin,
    },
    /// `coef * C(row, lower)`.
    ScaledBinomial {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        row: Lin,
        lower: Lin,
    },
    Oracle {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        oracle: OracleRef,
    },
    Product {
        factors: Vec<Term>,
    },
    CenteredSum(CenteredSum),
    /// `coef * sum_{k=0}^{row} C(row, k) oracle(index(n, k))`.
    BinomialTransform {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        row: Lin,
        oracle: OracleRef,
    },
    /// `coef * sum_{k=0}^{row} (-1)^k C(row, k) oracle(index(n, k))`.
    SignedRowConvolution {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        row: Lin,
        oracle: OracleRef,
    },
    /// `coef * sum_{j>=0} C(row, step*j + residue) base^j`.
    SteppedRow {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        row: Lin,
        step: i64,
        residue: i64,
        #[serde(with = "crate::serde_str")]
        base: BigInt,
    },
    /// `coef * sum_{r=0}^{n} (-1)^r C(2n - r, r) base^(n - r)`.
    DiagonalSum {
        #[serde(with = "crate::serde_str")]
        coef: BigRational,
        #[serde(with = "crate::serde_str")]
        base: BigInt,
    },
    /// `prod_{s=1}^{n} (3 - 2cos(2 pi s / (2n + 1)))`, evaluated numerically.
    CosProduct,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

impl Term {
    pub fn constant(c: i64) -> Self {
        Term::Constant { c: rat(c) }
    }

    pub fn power(coef: BigRational, base: i64, exponent: Lin) -> Self {
        Term::Power {
            coef,
            base: base.into(),
            exponent,
        }
    }

    pub fn binomial(coef: BigRational, row: Lin, lower: Lin) -> Self {
        Term::ScaledBinomial { coef, row, lower }
    }

    pub fn oracle(name: &str, index: Lin) -> Self {
        Term::Oracle {
            coef: BigRational::one(),
            oracle: OracleRef::new(name, index),
        }
    }

    pub fn scaled_oracle(coef: BigRational, oracle: OracleRef) -> Self {
        Term::Oracle { coef, oracle }
    }

    pub fn is_numeric(&self) -> bool {
        match self {
            Term::CosProduct => true,
            Term::Product { factors } => factors.iter().any(Term::is_numeric),
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Term::CenteredSum(c) => c.validate(),
            Term::Product { factors } => {
                if factors.iter().any(Term::is_numeric) {
                    return Err(Error::InvalidArgument("numeric factor inside a product".into()));
                }
                factors.iter().try_for_each(Term::validate)
            }
            Term::SteppedRow { step, .. } if *step < 1 => {
                Err(Error::InvalidArgument(format!("row step {step} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

/// `n >= start`, optionally `n <= end`, stepping by `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub start: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<i64>,
    #[serde(default = "one_i64", skip_serializing_if = "is_one_i64")]
    pub step: i64,
}

fn one_i64() -> i64 {
    1
}

fn is_one_i64(v: &i64) -> bool {
    *v == 1
}

impl Domain {
    pub const fn from(start: i64) -> Self {
        Domain {
            start,
            end: None,
            step: 1,
        }
    }

    pub const fn range(start: i64, end: i64) -> Self {
        Domain {
            start,
            end: Some(end),
            step: 1,
        }
    }

    pub const fn stepped(start: i64, step: i64) -> Self {
        Domain {
            start,
            end: None,
            step,
        }
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.start
            && self.end.is_none_or(|e| n <= e)
            && (n - self.start).rem_euclid(self.step) == 0
    }

    /// Members of the domain inside `lo..=hi`.
    pub fn values_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo.max(self.start)..=hi.min(self.end.unwrap_or(i64::MAX)))
            .filter(|&n| self.contains(n))
            .collect()
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            Some(e) => write!(f, "{}<=n<={e}", self.start)?,
            None => write!(f, "n>={}", self.start)?,
        }
        if self.step != 1 {
            write!(f, ", step {}", self.step)?;
        }
        Ok(())
    }
}

/// What an identity asserts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Body {
    /// `sum(lhs) == sum(rhs)` at every `n` in the domain.
    Series { lhs: Vec<Term>, rhs: Vec<Term> },
    /// The power `(z^e + z^-e)^p` with `p = 2n` (or `2n + 1`) equals its
    /// centered-row expansion in `Z[z]/(z^N - 1)` for every `N <= max_modulus`
    /// and `e <= max_exp`.
    CosPower {
        odd: bool,
        max_modulus: usize,
        max_exp: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub id: String,
    pub family: String,
    pub anchor: String,
    pub domain: Domain,
    pub body: Body,
}

impl Identity {
    pub fn series(id: &str, anchor: &str, domain: Domain, lhs: Vec<Term>, rhs: Vec<Term>) -> Self {
        Identity {
            id: id.to_string(),
            family: id.to_string(),
            anchor: anchor.to_string(),
            domain,
            body: Body::Series { lhs, rhs },
        }
    }

    /// Renames a member of a parametric family to `family(p=v)`.
    pub fn instance(mut self, param: &str, value: i64) -> Self {
        self.id = format!("{}({param}={value})", self.family);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain.step < 1 {
            return Err(Error::InvalidArgument(format!("{}: domain step must be positive", self.id)));
        }
        match &self.body {
            Body::Series { lhs, rhs } => {
                if lhs.is_empty() || rhs.is_empty() {
                    return Err(Error::InvalidArgument(format!("{}: empty side", self.id)));
                }
                lhs.iter().chain(rhs).try_for_each(Term::validate)
            }
            Body::CosPower { max_modulus, .. } if *max_modulus < 1 => {
                Err(Error::InvalidArgument(format!("{}: modulus bound must be positive", self.id)))
            }
            Body::CosPower { .. } => Ok(()),
        }
    }

    /// The single centered sum on the right, when the right side is exactly
    /// one pure periodic sum and the left side a single oracle.
    pub fn as_profile(&self) -> Option<(&OracleRef, &CenteredSum)> {
        let Body::Series { lhs, rhs } = &self.body else {
            return None;
        };
        match (lhs.as_slice(), rhs.as_slice()) {
            ([Term::Oracle { coef, oracle }], [Term::CenteredSum(c)])
                if coef.is_one()
                    && oracle.params.is_empty()
                    && c.sign == SignRule::None
                    && c.scale == QuadValue::one()
                    && matches!(c.weights, Weights::Periodic { .. }) =>
            {
                Some((oracle, c))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityDocument {
    pub identities: Vec<Identity>,
}

/// JSON interchange form of a list of identities.
pub fn export_json(identities: &[Identity]) -> String {
    let doc = IdentityDocument {
        identities: identities.to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("identities serialize")
}

pub fn import_json(text: &str) -> Result<Vec<Identity>> {
    let doc: IdentityDocument =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("identity JSON: {e}")))?;
    for id in &doc.identities {
        id.validate()?;
    }
    Ok(doc.identities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lin_display_and_eval() {
        assert_eq!(Lin::of_n(2, 1).to_string(), "2n+1");
        assert_eq!(Lin::new(4, -4, 2).to_string(), "4n-4k+2");
        assert_eq!(Lin::new(-1, 0, 0).to_string(), "-n");
        assert_eq!(Lin::default().to_string(), "0");
        assert_eq!(Lin::new(4, -4, 2).at(3, 1), 10);
    }

    #[test]
    fn sign_rules() {
        assert_eq!((0..6).map(|k| SignRule::AltK.sign(0, k)).collect::<Vec<_>>(), [1, -1, 1, -1, 1, -1]);
        let block: Vec<i64> = (0..8).map(|k| SignRule::Block { m: 2 }.sign(0, k)).collect();
        assert_eq!(block, [1, 1, -1, -1, 1, 1, -1, -1]);
        // Odd t makes every sign positive.
        for t in [1, 3, 5] {
            for n in 0..10 {
                for k in 0..=n {
                    assert_eq!(SignRule::ParityStep { t }.sign(n, k), 1);
                }
            }
        }
        assert_eq!(SignRule::ParityStep { t: 2 }.sign(3, 1), 1);
        assert_eq!(SignRule::ParityStep { t: 2 }.sign(3, 0), -1);
    }

    #[test]
    fn domains() {
        let d = Domain::stepped(2, 2);
        assert_eq!(d.values_in(0, 9), [2, 4, 6, 8]);
        assert!(!d.contains(3));
        assert_eq!(Domain::range(1, 3).values_in(0, 60), [1, 2, 3]);
        assert_eq!(Domain::from(1).to_string(), "n>=1");
    }

    #[test]
    fn mixed_discriminants_are_rejected() {
        let c = CenteredSum::even(
            QuadValue::zero(),
            vec![QuadValue::surd(rat(1), 5).unwrap(), QuadValue::surd(rat(1), 3).unwrap()],
        );
        assert!(matches!(c.validate(), Err(Error::MixedDiscriminant(..))));
    }
}
