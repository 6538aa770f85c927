//! Named exact sequence oracles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::algebra::{char_poly_from_roots, power_sums, squared_root_poly, IntPolynomial};
use crate::error::{Error, Result};
use crate::exact::{binomial, pow_int, NegativeRule, Recurrence, RecurrenceSpec};
use crate::oeis::{bundled, BFileTable};

/// Closed-form integer rules that need no state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedRule {
    /// `C(2n - 1, n - 1)` for `n >= 1`.
    CentralOdd,
    /// `b^n`.
    Power(i64),
}

/// Which slice of the row `2n` a partial-row oracle sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialRow {
    pub residues: Vec<i64>,
    pub period: i64,
}

#[derive(Debug)]
pub enum OracleKind {
    Recurrence(Recurrence),
    /// `p_{n} / divisor` over the roots of `poly`.
    PowerSum {
        poly: IntPolynomial,
        divisor: BigInt,
        memo: RwLock<Vec<BigInt>>,
    },
    Closed(ClosedRule),
    /// `sum_{k >= 1, k mod period in residues} C(2n, n + k)`.
    PartialRow(PartialRow),
    Table(BFileTable),
}

#[derive(Debug)]
pub struct SequenceOracle {
    name: String,
    params: Vec<i64>,
    kind: OracleKind,
    oeis_id: Option<String>,
    start: i64,
}

impl SequenceOracle {
    fn new(name: &str, params: &[i64], kind: OracleKind, start: i64) -> Self {
        SequenceOracle {
            name: name.to_string(),
            params: params.to_vec(),
            kind,
            oeis_id: None,
            start,
        }
    }

    fn with_oeis(mut self, id: &str) -> Self {
        self.oeis_id = Some(id.to_string());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[i64] {
        &self.params
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn oeis_id(&self) -> Option<&str> {
        self.oeis_id.as_deref()
    }

    /// First index of the natural domain.
    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn key(&self) -> String {
        key(&self.name, &self.params)
    }

    fn out_of_domain(&self, n: i64) -> Error {
        Error::OutOfDomain {
            name: self.key(),
            index: n,
        }
    }

    pub fn eval(&self, n: i64) -> Result<BigInt> {
        let two_sided = matches!(&self.kind, OracleKind::Recurrence(r) if r.spec().negative.is_some());
        if n < self.start && !two_sided {
            return Err(self.out_of_domain(n));
        }
        match &self.kind {
            OracleKind::Recurrence(r) => r.eval(n),
            OracleKind::PowerSum {
                poly,
                divisor,
                memo,
            } => {
                let idx = n as usize;
                let cached = memo.read().expect("memo lock").get(idx).cloned();
                let sum = match cached {
                    Some(v) => v,
                    None => {
                        let mut w = memo.write().expect("memo lock");
                        if w.len() <= idx {
                            *w = power_sums(poly, (idx + 16).max(2 * w.len()));
                        }
                        w[idx].clone()
                    }
                };
                let (q, r) = sum.div_rem(divisor);
                if !r.is_zero() {
                    return Err(Error::NonIntegral {
                        what: format!("{}({n})", self.key()),
                        value: format!("{sum}/{divisor}"),
                    });
                }
                Ok(q)
            }
            OracleKind::Closed(ClosedRule::CentralOdd) => binomial(2 * n - 1, n - 1),
            OracleKind::Closed(ClosedRule::Power(b)) => Ok(pow_int(&BigInt::from(*b), n as u64)),
            OracleKind::PartialRow(p) => {
                let mut acc = BigInt::zero();
                for k in 1..=n {
                    if p.residues.contains(&k.rem_euclid(p.period)) {
                        acc += binomial(2 * n, n + k)?;
                    }
                }
                Ok(acc)
            }
            OracleKind::Table(t) => t.get(n).cloned().ok_or_else(|| self.out_of_domain(n)),
        }
    }
}

impl fmt::Display for SequenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Canonical lookup key: `name` or `name(p1,p2,...)`.
pub fn key(name: &str, params: &[i64]) -> String {
    if params.is_empty() {
        name.to_string()
    } else {
        let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        format!("{name}({})", ps.join(","))
    }
}

pub const PARAMETRIC: &[&str] = &["genlucas", "scriptL", "pow"];

/// Shared oracle table. Parametric families outside the preloaded range are
/// built on first use.
#[derive(Debug, Default)]
pub struct Registry {
    oracles: RwLock<BTreeMap<String, Arc<SequenceOracle>>>,
}

fn rec_kind(name: &str, coeffs: &[i64], seeds: &[i64]) -> OracleKind {
    let spec = RecurrenceSpec::new(name, coeffs, seeds).expect("valid built-in recurrence");
    OracleKind::Recurrence(Recurrence::new(spec))
}

fn power_sum_kind(poly: IntPolynomial, divisor: i64) -> OracleKind {
    OracleKind::PowerSum {
        poly,
        divisor: BigInt::from(divisor),
        memo: RwLock::new(Vec::new()),
    }
}

/// `L^{(m)}_n`: power sums of `2cos(j pi / (2m + 1))` for odd `j < 2m`.
fn genlucas(m: i64) -> Result<SequenceOracle> {
    if m < 1 {
        return Err(Error::BadParams {
            name: "genlucas".into(),
            reason: format!("m must be at least 1, got {m}"),
        });
    }
    let odd: Vec<i64> = (0..m).map(|j| 2 * j + 1).collect();
    let poly = char_poly_from_roots((2 * m + 1) as usize, &odd)?;
    Ok(SequenceOracle::new("genlucas", &[m], power_sum_kind(poly, 1), 0))
}

/// Scaled power sums of `4cos^2(j pi / (2m))` over odd `j < 2m`. Each square
/// appears twice in that root set, hence the divisor `2m`.
fn script_l(m: i64) -> Result<SequenceOracle> {
    if m < 1 {
        return Err(Error::BadParams {
            name: "scriptL".into(),
            reason: format!("m must be at least 1, got {m}"),
        });
    }
    let odd: Vec<i64> = (0..m).map(|j| 2 * j + 1).collect();
    let poly = squared_root_poly(&char_poly_from_roots((2 * m) as usize, &odd)?);
    Ok(SequenceOracle::new("scriptL", &[m], power_sum_kind(poly, 2 * m), 1))
}

fn table(id: &str) -> SequenceOracle {
    let t = bundled(id).expect("bundled fixture");
    let start = t.first_index().unwrap_or(0);
    SequenceOracle::new(id, &[], OracleKind::Table(t), start).with_oeis(id)
}

fn partial(residues: &[i64]) -> OracleKind {
    OracleKind::PartialRow(PartialRow {
        residues: residues.to_vec(),
        period: 5,
    })
}

impl Registry {
    pub fn builtin() -> Self {
        let two_sided = |name: &str, seeds: &[i64], rule| {
            let spec = RecurrenceSpec::new(name, &[1, 1], seeds).expect("valid built-in recurrence");
            OracleKind::Recurrence(Recurrence::new(spec.with_negative(rule)))
        };
        let mut list = vec![
            SequenceOracle::new("fib", &[], two_sided("fib", &[0, 1], NegativeRule::Fibonacci), 0).with_oeis("A000045"),
            SequenceOracle::new("lucas", &[], two_sided("lucas", &[2, 1], NegativeRule::Lucas), 0).with_oeis("A000032"),
            SequenceOracle::new("pell", &[], rec_kind("pell", &[2, 1], &[0, 1]), 0).with_oeis("A000129"),
            SequenceOracle::new("pellX", &[], rec_kind("pellX", &[4, -1], &[1, 2]), 0).with_oeis("A001075"),
            SequenceOracle::new("pellY", &[], rec_kind("pellY", &[4, -1], &[0, 1]), 0).with_oeis("A001353"),
            SequenceOracle::new("W", &[], rec_kind("W", &[-1, 2, 1], &[3, -1, 5]), 0).with_oeis("A094648"),
            SequenceOracle::new("Q", &[], rec_kind("Q", &[5, -6, 1], &[1, 1, 2]), 0).with_oeis("A080937"),
            SequenceOracle::new("R", &[], rec_kind("R", &[5, -6, 1], &[1, 2, 6]), 0).with_oeis("A052975"),
            SequenceOracle::new("S", &[], rec_kind("S", &[6, -9, 1], &[1, 2, 6]), 0).with_oeis("A094831"),
            SequenceOracle::new("qrdiff", &[], rec_kind("qrdiff", &[5, -6, 1], &[0, 1, 4]), 1).with_oeis("A094789"),
            SequenceOracle::new("centralodd", &[], OracleKind::Closed(ClosedRule::CentralOdd), 1),
            SequenceOracle::new("A", &[], partial(&[1, 4]), 0).with_oeis("A095930"),
            SequenceOracle::new("B", &[], partial(&[2, 3]), 0).with_oeis("A095931"),
            SequenceOracle::new("C", &[], partial(&[0]), 0),
            table("A094667"),
            table("A216597"),
        ];
        for m in 2..=8 {
            list.push(genlucas(m).expect("valid m"));
            list.push(script_l(m).expect("valid m"));
        }
        for b in [2, 3, 4, 5] {
            list.push(SequenceOracle::new("pow", &[b], OracleKind::Closed(ClosedRule::Power(b)), 0));
        }
        let oracles = list.into_iter().map(|o| (o.key(), Arc::new(o))).collect();
        Registry {
            oracles: RwLock::new(oracles),
        }
    }

    pub fn get(&self, name: &str, params: &[i64]) -> Result<Arc<SequenceOracle>> {
        let k = key(name, params);
        if let Some(o) = self.oracles.read().expect("registry lock").get(&k) {
            return Ok(o.clone());
        }
        let built = match (name, params) {
            ("genlucas", [m]) => genlucas(*m)?,
            ("scriptL", [m]) => script_l(*m)?,
            ("pow", [b]) => SequenceOracle::new("pow", &[*b], OracleKind::Closed(ClosedRule::Power(*b)), 0),
            (n, _) if PARAMETRIC.contains(&n) => {
                return Err(Error::BadParams {
                    name: n.into(),
                    reason: format!("expected one parameter, got {}", params.len()),
                })
            }
            _ => return Err(Error::UnknownSequence(k)),
        };
        let mut w = self.oracles.write().expect("registry lock");
        Ok(w.entry(k).or_insert_with(|| Arc::new(built)).clone())
    }

    /// Keys of every preloaded or already built oracle.
    pub fn keys(&self) -> Vec<String> {
        self.oracles.read().expect("registry lock").keys().cloned().collect()
    }

    /// Names accepted by [`Registry::get`], parametric families included.
    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .oracles
            .read()
            .expect("registry lock")
            .values()
            .map(|o| o.name.clone())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Process-wide registry.
pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(Registry::builtin)
}

pub fn seq_eval(name: &str, params: &[i64], n: i64) -> Result<BigInt> {
    registry().get(name, params)?.eval(n)
}

/// The first `count` values from the oracle's natural start.
pub fn seq_slice(name: &str, params: &[i64], count: usize) -> Result<Vec<BigInt>> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let o = registry().get(name, params)?;
    (o.start..o.start + count as i64).map(|n| o.eval(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn registry_examples() {
        assert_eq!(seq_eval("pellX", &[], 4).unwrap(), big(97));
        assert_eq!(seq_eval("Q", &[], 7).unwrap(), big(417));
        assert_eq!(seq_eval("genlucas", &[3], 2).unwrap(), big(5));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(seq_eval("pellY", &[], 3).unwrap(), big(15));
        assert_eq!(seq_eval("scriptL", &[3], 2).unwrap(), big(3));
        assert_eq!(seq_eval("scriptL", &[4], 4).unwrap(), big(34));
        assert_eq!(seq_eval("fib", &[], -2).unwrap(), big(-1));
    }

    #[test]
    fn eval_errors() {
        assert_eq!(
            seq_eval("nope", &[], 1),
            Err(Error::UnknownSequence("nope".into()))
        );
        assert!(matches!(
            seq_eval("scriptL", &[3], 0),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(seq_eval("pell", &[], -1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(seq_eval("genlucas", &[], 1), Err(Error::BadParams { .. })));
        assert!(matches!(seq_eval("A094667", &[], 5000), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn non_integral_power_sum_is_reported() {
        let o = SequenceOracle::new(
            "bad",
            &[],
            power_sum_kind(IntPolynomial::from_i64(&[-1, -1, 1]).unwrap(), 2),
            0,
        );
        assert!(matches!(o.eval(1), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn slice_examples() {
        assert_eq!(seq_slice("W", &[], 8).unwrap(), ints(&[3, -1, 5, -4, 13, -16, 38, -57]));
        assert_eq!(seq_slice("S", &[], 6).unwrap(), ints(&[1, 2, 6, 19, 62, 207]));
        assert_eq!(seq_slice("R", &[], 8).unwrap(), ints(&[1, 2, 6, 19, 61, 197, 638, 2069]));
        assert!(seq_slice("W", &[], 0).is_err());
    }

    #[test]
    fn known_prefixes() {
        assert_eq!(seq_slice("pellX", &[], 7).unwrap(), ints(&[1, 2, 7, 26, 97, 362, 1351]));
        assert_eq!(seq_slice("pellY", &[], 7).unwrap(), ints(&[0, 1, 4, 15, 56, 209, 780]));
        assert_eq!(seq_slice("Q", &[], 8).unwrap(), ints(&[1, 1, 2, 5, 14, 42, 131, 417]));
    }

    #[test]
    fn pell_invariant() {
        for n in 0..=50 {
            let x = seq_eval("pellX", &[], n).unwrap();
            let y = seq_eval("pellY", &[], n).unwrap();
            assert_eq!(&x * &x - 3 * &y * &y, big(1));
        }
    }

    #[test]
    fn genlucas_relations() {
        for n in 0..=40 {
            assert_eq!(seq_eval("genlucas", &[2], n).unwrap(), seq_eval("lucas", &[], n).unwrap());
        }
        // The roots for m = 3 are the negatives of the roots behind W.
        for n in 0..=20 {
            let g = seq_eval("genlucas", &[3], n).unwrap();
            let w = seq_eval("W", &[], n).unwrap();
            assert_eq!(g, if n % 2 == 0 { w } else { -w });
        }
    }

    #[test]
    fn script_l_powers() {
        for n in 1..=30 {
            assert_eq!(seq_eval("scriptL", &[2], n).unwrap(), BigInt::from(2).pow(n as u32 - 1));
            assert_eq!(seq_eval("scriptL", &[3], n).unwrap(), BigInt::from(3).pow(n as u32 - 1));
        }
    }

    #[test]
    fn partial_rows_sum_to_half_row() {
        for n in 1..=40 {
            let total: BigInt = ["A", "B", "C"].iter().map(|s| seq_eval(s, &[], n).unwrap()).sum();
            let expect = BigInt::from(2).pow(2 * n as u32 - 1) - binomial(2 * n - 1, n).unwrap();
            assert_eq!(total, expect);
        }
    }

    #[test]
    fn qr_difference() {
        assert!(matches!(seq_eval("qrdiff", &[], 0), Err(Error::OutOfDomain { .. })));
        for n in 1..=40 {
            let d = seq_eval("R", &[], n).unwrap() - seq_eval("Q", &[], n).unwrap();
            assert_eq!(seq_eval("qrdiff", &[], n).unwrap(), d);
        }
    }

    #[test]
    fn parametric_families_build_on_demand() {
        assert_eq!(seq_eval("genlucas", &[12], 0).unwrap(), big(12));
        assert!(registry().keys().contains(&"genlucas(12)".to_string()));
        assert!(matches!(seq_eval("scriptL", &[0], 1), Err(Error::BadParams { .. })));
    }

    #[test]
    fn powers() {
        assert_eq!(seq_slice("pow", &[3], 5).unwrap(), ints(&[1, 3, 9, 27, 81]));
        assert_eq!(seq_eval("pow", &[-2], 3).unwrap(), big(-8));
    }

    #[test]
    fn central_odd() {
        assert_eq!(seq_eval("centralodd", &[], 10).unwrap(), big(92378));
        assert_eq!(seq_eval("centralodd", &[], 1).unwrap(), big(1));
    }
}
