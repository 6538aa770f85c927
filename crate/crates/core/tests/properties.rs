use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pbsum_core::algebra::{cos_power_centered, cos_power_direct, cos_power_vector, CycloVec, QuadValue};
use pbsum_core::discovery::{derive_profile, ProfileStatus, RowKind};
use pbsum_core::exact::{binomial, kronecker, pascal_row};
use pbsum_core::identities::{
    builtin_registry, eval_side, eval_term, export_json, import_json, CenteredSum, Lin, Term, Weights,
};
use pbsum_core::oeis::{parse_bfile, serialize_bfile, BFileTable};
use pbsum_core::sequences::seq_eval;
use proptest::prelude::*;

fn ints(xs: &[i64]) -> Vec<QuadValue> {
    xs.iter().map(|&x| QuadValue::int(x)).collect()
}

fn brute_legendre(k: i64, p: i64) -> i8 {
    let r = k.rem_euclid(p);
    if r == 0 {
        0
    } else if (1..p).any(|x| x * x % p == r) {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Extending a centered sum past the end of its row adds nothing.
    #[test]
    fn truncation_is_exact(w in prop::collection::vec(-5i64..=5, 1..9), c in -3i64..=3, n in 0i64..30, extra in 1i64..4) {
        let period = w.len() as i64;
        let t = Term::CenteredSum(CenteredSum::even(QuadValue::int(c), ints(&w)));
        prop_assert_eq!(eval_term(&t, n, 0).unwrap(), eval_term(&t, n, extra * period).unwrap());
        let odd = Term::CenteredSum(CenteredSum::odd(ints(&w)));
        prop_assert_eq!(eval_term(&odd, n, 0).unwrap(), eval_term(&odd, n, extra * period).unwrap());
    }

    /// A profile and the same profile written out over two periods give
    /// identical sums, and both equal the direct binomial sum.
    #[test]
    fn profiles_are_periodic(w in prop::collection::vec(-5i64..=5, 1..9), c in -3i64..=3, n in 0i64..30) {
        let doubled: Vec<i64> = w.iter().chain(&w).copied().collect();
        let a = Term::CenteredSum(CenteredSum::even(QuadValue::int(c), ints(&w)));
        let b = Term::CenteredSum(CenteredSum::even(QuadValue::int(c), ints(&doubled)));
        let va = eval_side(&[a], n).unwrap();
        prop_assert_eq!(&va, &eval_side(&[b], n).unwrap());
        let mut direct = BigInt::from(c) * binomial(2 * n, n).unwrap();
        for k in 1..=n {
            direct += BigInt::from(w[(k as usize) % w.len()]) * binomial(2 * n, n + k).unwrap();
        }
        prop_assert_eq!(va.integer(), &direct);
    }

    /// Binary powering, the Pascal-row reading and the centered expansion
    /// of `(z^e + z^-e)^n` coincide.
    #[test]
    fn cos_power_routes_agree(modulus in 1usize..=30, e in -6i64..=6, n in 0u64..=25) {
        let v = cos_power_vector(modulus, e, n);
        prop_assert_eq!(&v, &cos_power_direct(modulus, e, n));
        prop_assert_eq!(&v, &cos_power_centered(modulus, e, n));
        prop_assert_eq!(v.sum(), BigInt::from(2).pow(n as u32));
    }

    #[test]
    fn cyclo_product_matches_exponent_addition(modulus in 1usize..=20, a in -10i64..=10, b in -10i64..=10) {
        let lhs = CycloVec::two_cos(modulus, a).mul(&CycloVec::two_cos(modulus, b)).unwrap();
        let rhs = CycloVec::two_cos(modulus, a + b).add(&CycloVec::two_cos(modulus, a - b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kronecker_matches_legendre_for_primes(k in -200i64..=200, idx in 0usize..8) {
        let p = [3i64, 5, 7, 11, 13, 17, 19, 23][idx];
        prop_assert_eq!(kronecker(k, p).unwrap(), brute_legendre(k, p));
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_top(a in -60i64..=60, b in -60i64..=60, m in 1i64..=60) {
        prop_assert_eq!(
            kronecker(a * b, m).unwrap(),
            kronecker(a, m).unwrap() * kronecker(b, m).unwrap()
        );
    }

    #[test]
    fn kronecker_is_periodic_for_odd_moduli(k in -100i64..=100, half in 0i64..30) {
        let m = 2 * half + 1;
        prop_assert_eq!(kronecker(k, m).unwrap(), kronecker(k + m, m).unwrap());
    }

    #[test]
    fn bfile_round_trip(first in -5i64..5, gaps in prop::collection::vec(1i64..4, 1..40), seed in any::<u64>()) {
        let mut entries = BTreeMap::new();
        let mut idx = first;
        let mut v = BigInt::from(seed) - BigInt::from(u64::MAX / 2);
        for g in gaps {
            entries.insert(idx, v.clone());
            idx += g;
            v = -(&v * BigInt::from(7) + BigInt::from(g));
        }
        let table = BFileTable { id: "A000001".into(), entries, source: "generated".into() };
        let text = serialize_bfile(&table);
        let back = parse_bfile("A000001", &text, "generated").unwrap();
        prop_assert_eq!(&back.entries, &table.entries);
        let crlf = text.replace('\n', "\r\n");
        prop_assert_eq!(parse_bfile("A000001", &crlf, "generated").unwrap().entries, back.entries);
    }

    #[test]
    fn pell_invariant(n in 0i64..300) {
        let x = seq_eval("pellX", &[], n).unwrap();
        let y = seq_eval("pellY", &[], n).unwrap();
        prop_assert_eq!(&x * &x - BigInt::from(3) * &y * &y, BigInt::one());
    }

    #[test]
    fn fibonacci_addition_law(m in -40i64..60, n in -40i64..60) {
        let f = |i: i64| seq_eval("fib", &[], i).unwrap();
        let l = |i: i64| seq_eval("lucas", &[], i).unwrap();
        prop_assert_eq!(BigInt::from(2) * f(m + n), f(m) * l(n) + l(m) * f(n));
    }

    #[test]
    fn pascal_rows_are_symmetric_and_sum_to_powers(m in 0usize..80) {
        let row = pascal_row(m);
        let rev: Vec<BigInt> = row.iter().rev().cloned().collect();
        prop_assert_eq!(&row, &rev);
        prop_assert_eq!(row.iter().sum::<BigInt>(), BigInt::from(2).pow(m as u32));
    }
}

fn rational_weights(c: &CenteredSum) -> Option<(BigRational, Vec<BigRational>)> {
    let Weights::Periodic { table } = &c.weights else {
        return None;
    };
    let w = table.iter().map(|q| q.to_rational().cloned()).collect::<Option<Vec<_>>>()?;
    Some((c.center.to_rational()?.clone(), w))
}

/// Every built-in single-profile identity is recovered by the solver.
#[test]
fn builtin_profiles_are_rederived() {
    let mut seen = 0;
    for identity in builtin_registry() {
        let Some((target, sum)) = identity.as_profile() else {
            continue;
        };
        let Some((center, weights)) = rational_weights(sum) else {
            continue;
        };
        let row = if sum.row == Lin::of_n(2, 0) && sum.offset == Lin::of_n(1, 0) {
            RowKind::Even
        } else if sum.row == Lin::of_n(2, 1) && sum.offset == Lin::of_n(1, 0) {
            RowKind::Odd
        } else {
            continue;
        };
        let period = weights.len();
        let lo = identity.domain.start.max(0);
        let s = derive_profile(target, period, row, (lo, lo + period as i64 + 5)).unwrap();
        match s.status {
            ProfileStatus::Unique => {
                if row == RowKind::Even {
                    assert_eq!(s.center, center, "{}", identity.id);
                }
                assert_eq!(s.weights, weights, "{}", identity.id);
                assert_eq!(s.held_out_checked, 20);
            }
            ProfileStatus::Underdetermined { .. } => {
                // The registry profile must still lie in the solution space.
                let mut unknowns: Vec<BigRational> = Vec::new();
                if row == RowKind::Even {
                    unknowns.push(center.clone() - &s.center);
                }
                unknowns.extend(weights.iter().zip(&s.weights).map(|(a, b)| a - b));
                assert!(in_span(&unknowns, &s.nullspace), "{}", identity.id);
            }
            ProfileStatus::Infeasible { violated_n } => {
                panic!("{} infeasible at {violated_n}", identity.id)
            }
        }
        seen += 1;
    }
    assert!(seen >= 9, "only {seen} profiles checked");
}

/// Whether `v` is a combination of `basis` (vectors in reduced form with a
/// unit entry on distinct free coordinates).
fn in_span(v: &[BigRational], basis: &[Vec<BigRational>]) -> bool {
    let mut rest = v.to_vec();
    for b in basis {
        let free = b
            .iter()
            .position(|x| x.is_one())
            .expect("kernel vectors carry a unit free coordinate");
        let f = rest[free].clone();
        for (r, x) in rest.iter_mut().zip(b) {
            *r -= &f * x;
        }
    }
    rest.iter().all(Zero::is_zero)
}

#[test]
fn registry_survives_json_round_trip() {
    let all = builtin_registry();
    let back = import_json(&export_json(&all)).unwrap();
    assert_eq!(all, back);
}
