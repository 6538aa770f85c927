//! Exact integer kernels: binomial coefficients, the Kronecker symbol and
//! linear recurrences over arbitrary-precision integers.

use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `C(n, k)`, zero outside `0 <= k <= n`.
///
/// Computed with a running product and exact division, so the cost is
/// `min(k, n - k)` small multiplications.
pub fn binomial(n: i64, k: i64) -> Result<BigInt> {
    if n < 0 {
        return Err(Error::NegativeRow(n));
    }
    if k < 0 || k > n {
        return Ok(BigInt::zero());
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    Ok(acc)
}

/// Full Pascal row `[C(m, 0), ..., C(m, m)]` in one multiplicative sweep.
pub fn pascal_row(m: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(m + 1);
    let mut cur = BigInt::one();
    row.push(cur.clone());
    for j in 0..m {
        cur = cur * (m - j) / (j + 1);
        row.push(cur.clone());
    }
    row
}

/// Right half of the central row: `[C(2n, n + k) for k = 0..=n]`.
pub fn central_row(n: usize) -> Vec<BigInt> {
    let mut cur = binomial(2 * n as i64, n as i64).expect("row is non-negative");
    let mut row = Vec::with_capacity(n + 1);
    row.push(cur.clone());
    for k in 0..n {
        cur = cur * (n - k) / (n + k + 1);
        row.push(cur.clone());
    }
    row
}

/// `(a | 2)` for odd `a`.
fn kronecker_two(a: i128) -> i8 {
    match a.rem_euclid(8) {
        1 | 7 => 1,
        _ => -1,
    }
}

/// Jacobi symbol `(a | n)` for odd `n > 0`.
fn jacobi(a: i128, n: i128) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(k | m)` with the usual conventions `(k | -1) = sign(k)`
/// and `(k | 2) = 0, 1, -1` for `k` even, `k = ±1 (mod 8)`, `k = ±3 (mod 8)`.
pub fn kronecker(k: i64, m: i64) -> Result<i8> {
    if m == 0 {
        return Err(Error::ZeroModulus);
    }
    let a = k as i128;
    let mut n = m as i128;
    let mut sign = 1i8;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return Ok(0);
        }
        if twos % 2 == 1 {
            sign *= kronecker_two(a);
        }
        n >>= twos;
    }
    if n == 1 {
        return Ok(sign);
    }
    Ok(sign * jacobi(a, n))
}

/// Extension of a recurrence to negative indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeRule {
    /// `a(-t) = (-1)^(t+1) a(t)`.
    Fibonacci,
    /// `a(-t) = (-1)^t a(t)`.
    Lucas,
}

/// `a(n) = c_1 a(n-1) + ... + c_d a(n-d)` with seeds `a(0), ..., a(d-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub name: String,
    pub coeffs: Vec<BigInt>,
    pub seeds: Vec<BigInt>,
    pub negative: Option<NegativeRule>,
}

impl RecurrenceSpec {
    pub fn new(name: &str, coeffs: &[i64], seeds: &[i64]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != seeds.len() {
            return Err(Error::InvalidRecurrence {
                name: name.to_string(),
                reason: format!("{} coefficients but {} seeds", coeffs.len(), seeds.len()),
            });
        }
        Ok(RecurrenceSpec {
            name: name.to_string(),
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
            seeds: seeds.iter().map(|&s| BigInt::from(s)).collect(),
            negative: None,
        })
    }

    pub fn with_negative(mut self, rule: NegativeRule) -> Self {
        self.negative = Some(rule);
        self
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn next_term(&self, tail: &[BigInt]) -> BigInt {
        let len = tail.len();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * &tail[len - 1 - i])
            .sum()
    }

    fn reflect(&self, n: i64, positive: BigInt) -> Result<BigInt> {
        let t = -n;
        match self.negative {
            Some(NegativeRule::Fibonacci) if t % 2 == 0 => Ok(-positive),
            Some(NegativeRule::Lucas) if t % 2 == 1 => Ok(-positive),
            Some(_) => Ok(positive),
            None => Err(Error::OutOfDomain {
                name: self.name.clone(),
                index: n,
            }),
        }
    }
}

/// Evaluates `spec` at `n` by forward iteration.
pub fn rec_eval(spec: &RecurrenceSpec, n: i64) -> Result<BigInt> {
    if n < 0 {
        spec.reflect(n, BigInt::zero())?;
        let positive = rec_eval(spec, -n)?;
        return spec.reflect(n, positive);
    }
    let n = n as usize;
    if n < spec.order() {
        return Ok(spec.seeds[n].clone());
    }
    let mut window: Vec<BigInt> = spec.seeds.clone();
    for _ in spec.order()..=n {
        let next = spec.next_term(&window);
        window.remove(0);
        window.push(next);
    }
    Ok(window.pop().expect("window is non-empty"))
}

/// A recurrence with an append-only memo table.
#[derive(Debug)]
pub struct Recurrence {
    spec: RecurrenceSpec,
    memo: RwLock<Vec<BigInt>>,
}

impl Recurrence {
    pub fn new(spec: RecurrenceSpec) -> Self {
        let memo = RwLock::new(spec.seeds.clone());
        Recurrence { spec, memo }
    }

    pub fn spec(&self) -> &RecurrenceSpec {
        &self.spec
    }

    pub fn eval(&self, n: i64) -> Result<BigInt> {
        if n < 0 {
            self.spec.reflect(n, BigInt::zero())?;
            let positive = self.eval(-n)?;
            return self.spec.reflect(n, positive);
        }
        let idx = n as usize;
        if let Some(v) = self.memo.read().expect("memo lock").get(idx) {
            return Ok(v.clone());
        }
        let mut table = self.memo.write().expect("memo lock");
        while table.len() <= idx {
            let next = self.spec.next_term(&table[table.len() - self.spec.order()..]);
            table.push(next);
        }
        Ok(table[idx].clone())
    }
}

/// `base^exp` for a non-negative exponent.
pub fn pow_int(base: &BigInt, exp: u64) -> BigInt {
    num_traits::pow(base.clone(), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_oracle(rows: usize) -> Vec<Vec<BigInt>> {
        let mut tri: Vec<Vec<BigInt>> = vec![vec![BigInt::one()]];
        for m in 1..=rows {
            let prev = &tri[m - 1];
            let mut row = vec![BigInt::one(); m + 1];
            for j in 1..m {
                row[j] = &prev[j - 1] + &prev[j];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2).unwrap(), BigInt::from(6));
        assert_eq!(binomial(6, -1).unwrap(), BigInt::zero());
        assert_eq!(binomial(6, 7).unwrap(), BigInt::zero());
        assert_eq!(binomial(12, 7).unwrap(), BigInt::from(792));
        assert_eq!(binomial(19, 9).unwrap(), BigInt::from(92378));
        assert_eq!(binomial(-1, 0), Err(Error::NegativeRow(-1)));
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        let tri = pascal_oracle(90);
        for (m, row) in tri.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(&binomial(m as i64, j as i64).unwrap(), v);
            }
            assert_eq!(&pascal_row(m), row);
        }
    }

    #[test]
    fn central_row_examples() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(central_row(0), ints(&[1]));
        assert_eq!(central_row(2), ints(&[6, 4, 1]));
        assert_eq!(central_row(6), ints(&[924, 792, 495, 220, 66, 12, 1]));
        let tri = pascal_oracle(80);
        for n in 0..=40 {
            assert_eq!(central_row(n)[..], tri[2 * n][n..]);
        }
    }

    #[test]
    fn row_identities() {
        for n in 1..=40i64 {
            let full: BigInt = (0..=2 * n).map(|k| binomial(2 * n, k).unwrap()).sum();
            assert_eq!(full, pow_int(&BigInt::from(2), 2 * n as u64));
            for k in 0..=n {
                assert_eq!(binomial(2 * n, n - k), binomial(2 * n, n + k));
            }
            assert_eq!(
                binomial(2 * n, n).unwrap(),
                binomial(2 * n - 1, n).unwrap() * 2
            );
            let half: BigInt = central_row(n as usize)[1..].iter().sum();
            let center = binomial(2 * n, n).unwrap();
            assert_eq!(half * 2, pow_int(&BigInt::from(2), 2 * n as u64) - center);
        }
    }

    /// Kronecker symbol from the factorisation of `m` and explicit residue tables.
    fn kronecker_oracle(k: i64, m: i64) -> i8 {
        let mut m = m;
        let mut out = 1i8;
        if m < 0 {
            m = -m;
            if k < 0 {
                out = -out;
            }
        }
        let mut p = 2;
        while m > 1 {
            while m % p == 0 {
                m /= p;
                out *= if p == 2 {
                    if k % 2 == 0 {
                        0
                    } else if matches!(k.rem_euclid(8), 1 | 7) {
                        1
                    } else {
                        -1
                    }
                } else {
                    let r = k.rem_euclid(p);
                    if r == 0 {
                        0
                    } else if (1..p).any(|x| (x * x - r) % p == 0) {
                        1
                    } else {
                        -1
                    }
                };
            }
            p += 1;
        }
        out
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(2, 5).unwrap(), -1);
        assert_eq!(kronecker(7, 12).unwrap(), 1);
        assert_eq!(kronecker(0, 5).unwrap(), 0);
        assert_eq!(kronecker(3, 9).unwrap(), 0);
        assert_eq!(kronecker(1, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn kronecker_matches_factorisation_oracle() {
        for m in (-60i64..=60).filter(|&m| m != 0) {
            for k in -80..=80 {
                assert_eq!(kronecker(k, m).unwrap(), kronecker_oracle(k, m), "({k}|{m})");
            }
        }
    }

    #[test]
    fn kronecker_periodic_and_multiplicative() {
        for m in [5i64, 8, 9, 12, 13, 20] {
            for k in 0..10 * m {
                assert_eq!(kronecker(k, m).unwrap(), kronecker(k % m, m).unwrap());
            }
            for a in -50..=50 {
                for b in -50..=50 {
                    assert_eq!(
                        kronecker(a * b, m).unwrap(),
                        kronecker(a, m).unwrap() * kronecker(b, m).unwrap()
                    );
                }
            }
        }
    }

    fn fib() -> RecurrenceSpec {
        RecurrenceSpec::new("fib", &[1, 1], &[0, 1])
            .unwrap()
            .with_negative(NegativeRule::Fibonacci)
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(rec_eval(&fib(), 12).unwrap(), BigInt::from(144));
        assert_eq!(rec_eval(&fib(), -2).unwrap(), BigInt::from(-1));
        let w = RecurrenceSpec::new("W", &[-1, 2, 1], &[3, -1, 5]).unwrap();
        assert_eq!(rec_eval(&w, 7).unwrap(), BigInt::from(-57));
        let s = RecurrenceSpec::new("S", &[6, -9, 1], &[1, 2, 6]).unwrap();
        assert_eq!(rec_eval(&s, 5).unwrap(), BigInt::from(207));
        assert!(matches!(rec_eval(&w, -1), Err(Error::OutOfDomain { .. })));
        assert!(RecurrenceSpec::new("bad", &[1, 1], &[0]).is_err());
        assert!(RecurrenceSpec::new("bad", &[], &[]).is_err());
    }

    #[test]
    fn backward_extension_satisfies_recurrence() {
        let lucas = RecurrenceSpec::new("lucas", &[1, 1], &[2, 1])
            .unwrap()
            .with_negative(NegativeRule::Lucas);
        for spec in [fib(), lucas] {
            let memo = Recurrence::new(spec.clone());
            // Independent oracle: run a(n-2) = a(n) - a(n-1) backward from the seeds.
            let (mut hi, mut lo) = (spec.seeds[1].clone(), spec.seeds[0].clone());
            for t in 1..=20i64 {
                let prev = &hi - &lo;
                hi = lo;
                lo = prev;
                assert_eq!(rec_eval(&spec, -t).unwrap(), lo, "{} at {}", spec.name, -t);
            }
            for n in -18..=40i64 {
                let a = |i| memo.eval(i).unwrap();
                assert_eq!(a(n + 2), a(n + 1) + a(n));
            }
        }
    }

    #[test]
    fn memo_agrees_with_direct_evaluation() {
        let w = Recurrence::new(RecurrenceSpec::new("W", &[-1, 2, 1], &[3, -1, 5]).unwrap());
        for n in (0..60).rev() {
            assert_eq!(w.eval(n).unwrap(), rec_eval(w.spec(), n).unwrap());
        }
    }
}
