use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Body, CenteredSum, Domain, Identity, Lin, OracleRef, SignRule, Term, Weights};
use crate::algebra::QuadValue;
use crate::discovery::profile_from_angles;
use crate::exact::kronecker;
use crate::sequences::registry;

fn r(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn ints(v: &[i64]) -> Vec<QuadValue> {
    v.iter().map(|&x| QuadValue::int(x)).collect()
}

/// `f(k)` for `k = 0..period`.
fn table(period: i64, f: impl Fn(i64) -> i64) -> Vec<QuadValue> {
    (0..period).map(|k| QuadValue::int(f(k))).collect()
}

fn kron(k: i64, m: i64) -> i64 {
    kronecker(k, m).expect("nonzero modulus") as i64
}

/// Period-`m` table that is `value` at `residue` and zero elsewhere.
fn spike(m: i64, residue: i64, value: i64) -> Vec<QuadValue> {
    table(m, |k| if k == residue { value } else { 0 })
}

const N: Lin = Lin::of_n(1, 0);
const TWO_N: Lin = Lin::of_n(2, 0);
const TWO_N1: Lin = Lin::of_n(2, 1);

fn centered(c: CenteredSum) -> Term {
    Term::CenteredSum(c)
}

fn pow(coef: BigRational, base: i64, exponent: Lin) -> Term {
    Term::power(coef, base, exponent)
}

fn fib(n: i64) -> BigInt {
    registry().get("fib", &[]).and_then(|o| o.eval(n)).expect("fib oracle")
}

/// Ids of the identity families, in catalogue order.
pub fn family_ids() -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    for id in builtin_registry() {
        if !seen.contains(&id.family) {
            seen.push(id.family);
        }
    }
    seen
}

/// Every built-in identity with parametric families expanded.
pub fn builtin_registry() -> Vec<Identity> {
    let mut out = Vec::new();
    let all = Domain::from(0);
    let pos = Domain::from(1);

    out.push(Identity::series(
        "fib-even",
        "even-index Fibonacci numbers as a Legendre-weighted central row",
        all,
        vec![Term::oracle("fib", TWO_N)],
        vec![centered(CenteredSum::even(QuadValue::zero(), table(5, |k| kron(k, 5))))],
    ));
    out.push(Identity::series(
        "fib-odd",
        "odd-index Fibonacci numbers from the odd cosine power",
        all,
        vec![Term::oracle("fib", TWO_N1)],
        vec![centered(CenteredSum::odd(table(5, |k| -kron(k + 2, 5))))],
    ));
    let surd_profile = profile_from_angles(5, &[(1, QuadValue::one()), (3, QuadValue::int(-1))], &QuadValue::one(), 5)
        .expect("quadratic profile");
    let inv_root5 = QuadValue::surd(BigRational::one(), 5).and_then(|s| s.inverse()).expect("root 5");
    out.push(Identity::series(
        "mod5-profile",
        "difference of the two fifth-root cosines equals root five times the Legendre symbol",
        all,
        vec![Term::oracle("fib", TWO_N)],
        vec![centered(CenteredSum::even(QuadValue::zero(), surd_profile).with_scale(inv_root5))],
    ));
    out.push(Identity::series(
        "lucas-even",
        "even-index Lucas numbers with the half central binomial rewritten",
        pos,
        vec![Term::oracle("lucas", TWO_N)],
        vec![
            Term::binomial(r(5, 1), Lin::of_n(2, -1), N),
            pow(r(-1, 1), 2, Lin::of_n(2, -1)),
            centered(CenteredSum::even(QuadValue::zero(), spike(5, 0, 5))),
        ],
    ));
    out.push(Identity::series(
        "lucas-odd",
        "odd-index Lucas numbers as a power of two minus a stride-five sum",
        all,
        vec![Term::oracle("lucas", TWO_N1)],
        vec![
            pow(r(1, 1), 2, TWO_N),
            centered(CenteredSum::odd(spike(5, 3, -5))),
        ],
    ));
    out.push(Identity::series(
        "half-row",
        "right half of the central row sums to half of the row minus the middle",
        all,
        vec![
            pow(r(1, 1), 2, Lin::of_n(2, -1)),
            Term::binomial(r(-1, 2), TWO_N, N),
        ],
        vec![centered(CenteredSum::even(QuadValue::zero(), ints(&[1])))],
    ));
    let prop = |id: &str, oracle: &str, domain: Domain, rhs: Vec<Term>| {
        Identity::series(
            id,
            "positive, negative and missing terms of the Legendre-weighted row",
            domain,
            vec![Term::oracle(oracle, N)],
            rhs,
        )
    };
    let fifth = r(1, 5);
    out.push(prop(
        "prop1-A",
        "A",
        all,
        vec![
            pow(fifth.clone(), 2, TWO_N),
            Term::scaled_oracle(fifth.clone(), OracleRef::new("lucas", Lin::of_n(2, -1))),
        ],
    ));
    out.push(prop(
        "prop1-B",
        "B",
        all,
        vec![
            pow(fifth.clone(), 2, TWO_N),
            Term::scaled_oracle(-fifth.clone(), OracleRef::new("lucas", TWO_N1)),
        ],
    ));
    out.push(prop(
        "prop1-C",
        "C",
        pos,
        vec![
            pow(fifth.clone(), 2, Lin::of_n(2, -1)),
            Term::scaled_oracle(fifth, OracleRef::new("lucas", TWO_N)),
            Term::binomial(r(-1, 1), Lin::of_n(2, -1), N),
        ],
    ));
    out.push(Identity::series(
        "pow3",
        "powers of three as an alternating stride-three sum",
        pos,
        vec![pow(r(1, 1), 3, Lin::of_n(1, -1))],
        vec![
            Term::binomial(r(1, 1), Lin::of_n(2, -1), N),
            centered(CenteredSum::even(QuadValue::zero(), ints(&[1, 0, 0, -1, 0, 0]))),
        ],
    ));
    out.push(Identity::series(
        "catalan-paths-Q",
        "closed walks at an end vertex of the six-vertex path",
        all,
        vec![Term::oracle("Q", N)],
        vec![centered(CenteredSum::even(QuadValue::one(), ints(&[2, -1, 0, 0, 0, 0, -1])))],
    ));
    out.push(Identity::series(
        "p6-paths-R",
        "closed walks at an inner vertex of the six-vertex path",
        all,
        vec![Term::oracle("R", N)],
        vec![centered(CenteredSum::even(QuadValue::one(), ints(&[2, 0, 0, -1, -1, 0, 0])))],
    ));
    out.push(Identity::series(
        "qr-difference",
        "difference of the two path-counting sums",
        pos,
        vec![Term::oracle("qrdiff", N)],
        vec![centered(CenteredSum::even(QuadValue::zero(), ints(&[0, 1, 0, -1, -1, 0, 1])))],
    ));
    out.push(Identity::series(
        "W-even",
        "even terms of the seventh-root Lucas analogue",
        all,
        vec![Term::oracle("W", TWO_N)],
        vec![
            Term::binomial(r(7, 2), TWO_N, N),
            pow(r(-1, 1), 2, Lin::of_n(2, -1)),
            centered(CenteredSum::even(QuadValue::zero(), spike(7, 0, 7))),
        ],
    ));
    out.push(Identity::series(
        "W-odd",
        "odd terms of the seventh-root Lucas analogue",
        all,
        vec![Term::oracle("W", TWO_N1)],
        vec![
            pow(r(-1, 1), 2, TWO_N),
            centered(CenteredSum::odd(spike(7, 4, 7))),
        ],
    ));
    for m in 2..=8 {
        let big_m = 2 * m + 1;
        let g = |index| Term::scaled_oracle(BigRational::one(), OracleRef::new("genlucas", index).with_params(vec![Lin::constant(m)]));
        let mut even = Identity::series(
            "genlucas-even",
            "generalized Lucas numbers at even index",
            all,
            vec![g(TWO_N)],
            vec![
                Term::binomial(r(big_m, 2), TWO_N, N),
                pow(r(-1, 1), 2, Lin::of_n(2, -1)),
                centered(CenteredSum::even(QuadValue::zero(), spike(big_m, 0, big_m))),
            ],
        );
        even = even.instance("m", m);
        out.push(even);
        out.push(
            Identity::series(
                "genlucas-odd",
                "generalized Lucas numbers at odd index",
                all,
                vec![g(TWO_N1)],
                vec![
                    pow(r(1, 1), 2, TWO_N),
                    centered(CenteredSum::odd(spike(big_m, m + 1, -big_m))),
                ],
            )
            .instance("m", m),
        );
    }
    out.push(Identity::series(
        "pellX-alternating",
        "Pell solutions X as two alternating strides",
        all,
        vec![Term::oracle("pellX", N)],
        vec![
            centered(CenteredSum::even(QuadValue::one(), ints(&[-1, 0])).with_sign(SignRule::Block { m: 2 })),
            centered(CenteredSum::even(QuadValue::zero(), spike(6, 0, 3)).with_sign(SignRule::Block { m: 6 })),
        ],
    ));
    out.push(Identity::series(
        "pellX-cosine",
        "Pell solutions X with sixth-root cosine weights on even offsets",
        all,
        vec![Term::oracle("pellX", N)],
        vec![centered(CenteredSum::even(
            QuadValue::one(),
            ints(&[2, 0, 1, 0, -1, 0, -2, 0, -1, 0, 1, 0]),
        ))],
    ));
    let odd_half_sign = |k: i64| if k.rem_euclid(4) == 3 { -1 } else { 1 };
    out.push(Identity::series(
        "pellY-kronecker",
        "Pell solutions Y weighted by the Kronecker symbol modulo twelve",
        all,
        vec![Term::oracle("pellY", N)],
        vec![centered(CenteredSum::even(
            QuadValue::zero(),
            table(12, |k| kron(k, 12) * odd_half_sign(k)),
        ))],
    ));
    out.push(Identity::series(
        "pellY-stride6",
        "Pell solutions Y as an alternating stride-six difference",
        all,
        vec![Term::oracle("pellY", N)],
        vec![centered(
            CenteredSum::even(QuadValue::zero(), ints(&[0, 1, 0, 0, 0, -1])).with_sign(SignRule::Block { m: 6 }),
        )],
    ));
    for m in 2..=8 {
        out.push(
            Identity::series(
                "scriptL-merca",
                "even-denominator cosine power sums as an alternating stride-m sum",
                pos,
                vec![Term::scaled_oracle(
                    BigRational::one(),
                    OracleRef::new("scriptL", N).with_params(vec![Lin::constant(m)]),
                )],
                vec![
                    Term::binomial(r(1, 1), Lin::of_n(2, -1), Lin::of_n(1, -1)),
                    centered(CenteredSum::even(QuadValue::zero(), spike(m, 0, 1)).with_sign(SignRule::Block { m })),
                ],
            )
            .instance("m", m),
        );
    }
    out.push(Identity::series(
        "central-delight",
        "central binomial coefficient from even-denominator cosine powers with m = n",
        Domain::stepped(2, 2),
        vec![Term::oracle("centralodd", N)],
        vec![
            Term::constant(1),
            Term::scaled_oracle(BigRational::one(), OracleRef::new("scriptL", N).with_params(vec![N])),
        ],
    ));
    out.push(Identity::series(
        "kron8-pell",
        "Kronecker symbol modulo eight against the binomial transform of Pell numbers",
        all,
        vec![Term::BinomialTransform {
            coef: BigRational::one(),
            row: N,
            oracle: OracleRef::new("pell", Lin::of_k(1, 0)),
        }],
        vec![centered(CenteredSum::even(QuadValue::zero(), table(8, |k| kron(k, 8))))],
    ));
    out.push(Identity::series(
        "kron9-pow4",
        "Kronecker symbol modulo nine gives powers of four",
        all,
        vec![pow(r(1, 1), 4, N)],
        vec![
            Term::constant(1),
            centered(CenteredSum::even(QuadValue::zero(), table(9, |k| kron(k, 9))).with_scale(QuadValue::int(3))),
        ],
    ));
    out.push(Identity::series(
        "kron20-A094667",
        "Kronecker symbol modulo twenty against the stored zig-zag sequence",
        table_domain("A094667"),
        vec![Term::oracle("A094667", N)],
        vec![centered(CenteredSum::even(QuadValue::zero(), table(20, |k| kron(k, 20))))],
    ));
    out.push(Identity::series(
        "kron5-alt-fib",
        "alternating Legendre sum modulo five against the binomial transform of even Fibonacci numbers",
        all,
        vec![Term::BinomialTransform {
            coef: BigRational::one(),
            row: N,
            oracle: OracleRef::new("fib", Lin::of_k(2, 0)),
        }],
        vec![centered(
            CenteredSum::even(QuadValue::zero(), table(5, |k| -kron(k, 5))).with_sign(SignRule::AltK),
        )],
    ));
    out.push(Identity::series(
        "kron13-alt-A216597",
        "alternating Legendre sum modulo thirteen against the stored sequence",
        table_domain("A216597"),
        vec![Term::oracle("A216597", N)],
        vec![centered(
            CenteredSum::even(QuadValue::zero(), table(13, |k| kron(k, 13))).with_sign(SignRule::AltK),
        )],
    ));
    for t in 1..=5 {
        let ft = fib(t);
        let base = BigInt::from(5) * &ft * &ft;
        out.push(
            Identity::series(
                "lewis-family",
                "powers of five times squared Fibonacci numbers with Lucas weights",
                all,
                vec![Term::Power {
                    coef: BigRational::one(),
                    base,
                    exponent: N,
                }],
                vec![centered(CenteredSum {
                    row: TWO_N,
                    offset: N,
                    center: QuadValue::one(),
                    weights: Weights::Oracle {
                        oracle: OracleRef::new("lucas", Lin::of_k(2 * t, 0)),
                    },
                    sign: SignRule::ParityStep { t },
                    scale: QuadValue::one(),
                })],
            )
            .instance("t", t),
        );
    }
    let old = |id: &str, oracle: &str, residue: i64| {
        Identity::series(
            id,
            "power of two times Fibonacci or Lucas numbers as a row sum in powers of five",
            all,
            vec![Term::Product {
                factors: vec![pow(r(1, 1), 2, Lin::of_n(1, -1)), Term::oracle(oracle, N)],
            }],
            vec![Term::SteppedRow {
                coef: BigRational::one(),
                row: N,
                step: 2,
                residue,
                base: 5.into(),
            }],
        )
    };
    out.push(old("lucas1878-F", "fib", 1));
    out.push(old("lucas1878-L", "lucas", 0));
    for p in 1..=3 {
        let f = fib(2 * p);
        out.push(
            Identity::series(
                "lucas1878-odd-power",
                "odd powers of an even-index Fibonacci number as a signed row convolution",
                all,
                vec![Term::Power {
                    coef: BigRational::from_integer(2 * &f),
                    base: BigInt::from(5) * &f * &f,
                    exponent: N,
                }],
                vec![Term::SignedRowConvolution {
                    coef: BigRational::one(),
                    row: TWO_N1,
                    oracle: OracleRef::new("fib", Lin::new(4 * p, -4 * p, 2 * p)),
                }],
            )
            .instance("p", p),
        );
    }
    out.push(Identity::series(
        "sury-diagonal",
        "odd-index Lucas numbers as an alternating diagonal sum in powers of five",
        all,
        vec![Term::oracle("lucas", TWO_N1)],
        vec![Term::DiagonalSum {
            coef: BigRational::one(),
            base: 5.into(),
        }],
    ));
    out.push(Identity::series(
        "sury-product",
        "odd-index Lucas numbers as a cosine product",
        all,
        vec![Term::oracle("lucas", TWO_N1)],
        vec![Term::CosProduct],
    ));
    out.push(Identity::series(
        "A094831-S",
        "closed walks on the eight-vertex path via ninth-root cosines",
        all,
        vec![Term::oracle("S", N)],
        vec![centered(CenteredSum::even(
            QuadValue::one(),
            ints(&[2, 0, 0, -1, 0, 0, -1, 0, 0]),
        ))],
    ));
    for (id, odd, anchor) in [
        ("cospow-even", false, "even cosine power as a centered row, as vectors"),
        ("cospow-odd", true, "odd cosine power as a centered row, as vectors"),
    ] {
        out.push(Identity {
            id: id.into(),
            family: id.into(),
            anchor: anchor.into(),
            domain: Domain::range(0, 15),
            body: Body::CosPower {
                odd,
                max_modulus: 24,
                max_exp: 5,
            },
        });
    }
    out
}

fn table_domain(id: &str) -> Domain {
    let o = registry().get(id, &[]).expect("bundled table");
    match o.kind() {
        crate::sequences::OracleKind::Table(t) => Domain::range(
            t.first_index().unwrap_or(0),
            t.entries.keys().next_back().copied().unwrap_or(0),
        ),
        _ => Domain::from(o.start()),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rhs_eval, verify, Evaluated};
    use super::*;

    fn find(id: &str) -> Identity {
        builtin_registry().into_iter().find(|i| i.id == id).unwrap()
    }

    fn rhs(id: &str, n: i64) -> BigInt {
        match rhs_eval(&find(id), n).unwrap() {
            Evaluated::Exact { value } => value,
            other => panic!("{other}"),
        }
    }

    #[test]
    fn catalogue_shape() {
        assert_eq!(family_ids().len(), 37);
        assert_eq!(builtin_registry().len(), 61);
        for id in builtin_registry() {
            id.validate().unwrap();
        }
    }

    #[test]
    fn rhs_examples() {
        assert_eq!(rhs("fib-even", 3), 8.into());
        assert_eq!(rhs("fib-even", 6), 144.into());
        assert_eq!(rhs("lucas-odd", 2), 11.into());
        assert_eq!(rhs("pellY-kronecker", 3), 15.into());
        assert_eq!(rhs("W-even", 2), 13.into());
        assert_eq!(rhs("pow3", 3), 9.into());
        assert_eq!(rhs("kron9-pow4", 2), 16.into());
    }

    #[test]
    fn verify_examples() {
        assert!(verify(&find("fib-even"), 1, 50).passed());
        assert!(verify(&find("central-delight"), 2, 40).passed());
        let mut broken = find("fib-even");
        if let Body::Series { rhs, .. } = &mut broken.body {
            if let Term::CenteredSum(c) = &mut rhs[0] {
                if let Weights::Periodic { table } = &mut c.weights {
                    table[2] = QuadValue::int(1);
                }
            }
        }
        let report = verify(&broken, 1, 10);
        assert!(!report.passed());
        assert_eq!(report.first_divergence.unwrap().n, 2);
    }

    #[test]
    fn full_sweep() {
        for id in builtin_registry() {
            let report = verify(&id, 0, 60);
            assert!(report.passed(), "{}: {:?}", id.id, report.first_divergence);
            assert!(report.checked > 0, "{}", id.id);
        }
    }
}
