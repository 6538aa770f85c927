//! Exact recovery of periodic weight profiles from target sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{recognize_quadratic, CycloVec, QuadValue};
use crate::error::{Error, Result};
use crate::exact::pascal_row;
use crate::identities::{verify_n, CenteredSum, Domain, Identity, OracleRef, Term};
use crate::sequences::registry;

/// Values checked after a unique solve.
pub const HELD_OUT: i64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// Row `2n`, with a center unknown for `C(2n, n)`.
    Even,
    /// Row `2n + 1`; its first summand already sits next to the middle.
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ProfileStatus {
    Unique,
    Underdetermined { dimension: usize },
    Infeasible { violated_n: i64 },
}

mod rat_vec {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(de::Error::custom))
            .collect()
    }
}

mod rat_mat {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        Vec::<Vec<String>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(|s| s.parse().map_err(de::Error::custom)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSolution {
    pub target: OracleRef,
    pub period: usize,
    pub row: RowKind,
    #[serde(with = "crate::serde_str")]
    pub center: BigRational,
    /// `w(0), ..., w(M - 1)`; a particular solution when underdetermined.
    #[serde(with = "rat_vec")]
    pub weights: Vec<BigRational>,
    /// Basis of the homogeneous solutions over `(center, w(0), ...)` for even
    /// rows and `(w(0), ...)` for odd rows.
    #[serde(with = "rat_mat")]
    pub nullspace: Vec<Vec<BigRational>>,
    pub solve_range: [i64; 2],
    pub held_out_range: [i64; 2],
    pub held_out_checked: usize,
    pub status: ProfileStatus,
}

impl ProfileSolution {
    /// The centered-sum identity induced by the solution.
    pub fn to_identity(&self) -> Identity {
        let table: Vec<QuadValue> = self.weights.iter().cloned().map(QuadValue::rational).collect();
        let sum = match self.row {
            RowKind::Even => CenteredSum::even(QuadValue::rational(self.center.clone()), table),
            RowKind::Odd => CenteredSum::odd(table),
        };
        let id = format!("derived-{}-M{}-{}", self.target.name, self.period, row_name(self.row));
        let mut identity = Identity::series(
            &id,
            "weight profile recovered by exact linear solve",
            Domain::from(self.solve_range[0].max(0)),
            vec![Term::scaled_oracle(BigRational::one(), self.target.clone())],
            vec![Term::CenteredSum(sum)],
        );
        identity.family = "derived".into();
        identity
    }

    pub fn weights_i64(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.weights
            .iter()
            .map(|w| w.is_integer().then(|| w.to_integer().to_i64()).flatten())
            .collect()
    }
}

fn row_name(r: RowKind) -> &'static str {
    match r {
        RowKind::Even => "even",
        RowKind::Odd => "odd",
    }
}

/// Coefficients of one equation: `[center?, w(0), ..., w(M-1)]`.
fn equation(n: i64, period: usize, row: RowKind) -> Vec<BigRational> {
    let r = match row {
        RowKind::Even => 2 * n,
        RowKind::Odd => 2 * n + 1,
    };
    let pascal = pascal_row(r as usize);
    let mut w = vec![BigInt::zero(); period];
    for k in 1..=(r - n) {
        w[(k as usize) % period] += &pascal[(n + k) as usize];
    }
    let mut out = Vec::with_capacity(period + 1);
    if row == RowKind::Even {
        out.push(BigRational::from_integer(pascal[n as usize].clone()));
    }
    out.extend(w.into_iter().map(BigRational::from_integer));
    out
}

/// Reduced row echelon basis built one equation at a time.
struct Echelon {
    width: usize,
    rows: Vec<(usize, Vec<BigRational>, BigRational)>,
}

enum Added {
    New,
    Redundant,
    Inconsistent,
}

impl Echelon {
    fn new(width: usize) -> Self {
        Echelon {
            width,
            rows: Vec::new(),
        }
    }

    fn add(&mut self, mut coeffs: Vec<BigRational>, mut rhs: BigRational) -> Added {
        for (pivot, row, r) in &self.rows {
            let f = coeffs[*pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (c, x) in coeffs.iter_mut().zip(row) {
                *c -= &f * x;
            }
            rhs -= &f * r;
        }
        let Some(pivot) = coeffs.iter().position(|c| !c.is_zero()) else {
            return if rhs.is_zero() {
                Added::Redundant
            } else {
                Added::Inconsistent
            };
        };
        let inv = coeffs[pivot].recip();
        for c in coeffs.iter_mut() {
            *c *= &inv;
        }
        rhs *= &inv;
        for (_, row, r) in self.rows.iter_mut() {
            let f = row[pivot].clone();
            if f.is_zero() {
                continue;
            }
            for (x, c) in row.iter_mut().zip(&coeffs) {
                *x -= &f * c;
            }
            *r -= &f * &rhs;
        }
        self.rows.push((pivot, coeffs, rhs));
        Added::New
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn particular(&self) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.width];
        for (pivot, _, r) in &self.rows {
            x[*pivot] = r.clone();
        }
        x
    }

    fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let pivots: Vec<usize> = self.rows.iter().map(|(p, _, _)| *p).collect();
        (0..self.width)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = vec![BigRational::zero(); self.width];
                v[free] = BigRational::one();
                for (pivot, row, _) in &self.rows {
                    v[*pivot] = -row[free].clone();
                }
                v
            })
            .collect()
    }
}

/// Solves `sum_{k>=1} C(row, n + k) w(k mod M) + c C(2n, n) = target(n)` over
/// `solve.0..=solve.1` exactly, then checks a unique solution on the next
/// [`HELD_OUT`] values of `n`.
pub fn derive_profile(
    target: &OracleRef,
    period: usize,
    row: RowKind,
    solve: (i64, i64),
) -> Result<ProfileSolution> {
    if period < 1 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let (lo, hi) = solve;
    if lo < 0 {
        return Err(Error::InvalidArgument(format!("solve range starts below zero at {lo}")));
    }
    let equations = (hi - lo + 1).max(0) as usize;
    if equations < period + 2 {
        return Err(Error::InvalidArgument(format!(
            "period {period} needs at least {} equations, solve range gives {equations}",
            period + 2
        )));
    }
    let params: Vec<i64> = target.params.iter().map(|p| p.at(0, 0)).collect();
    let oracle = registry().get(&target.name, &params)?;
    let value = |n: i64| oracle.eval(target.index.at(n, 0)).map(BigRational::from_integer);

    let width = period + (row == RowKind::Even) as usize;
    let mut ech = Echelon::new(width);
    let mut violated = None;
    for n in lo..=hi {
        if let Added::Inconsistent = ech.add(equation(n, period, row), value(n)?) {
            violated = Some(n);
            break;
        }
    }
    let x = ech.particular();
    let (center, weights) = match row {
        RowKind::Even => (x[0].clone(), x[1..].to_vec()),
        RowKind::Odd => (BigRational::zero(), x),
    };
    let mut solution = ProfileSolution {
        target: target.clone(),
        period,
        row,
        center,
        weights,
        nullspace: ech.nullspace(),
        solve_range: [lo, hi],
        held_out_range: [hi + 1, hi + HELD_OUT],
        held_out_checked: 0,
        status: ProfileStatus::Unique,
    };
    if let Some(n) = violated {
        solution.nullspace.clear();
        solution.status = ProfileStatus::Infeasible { violated_n: n };
        return Ok(solution);
    }
    if ech.rank() < width {
        solution.status = ProfileStatus::Underdetermined {
            dimension: width - ech.rank(),
        };
        return Ok(solution);
    }
    let identity = solution.to_identity();
    for n in hi + 1..=hi + HELD_OUT {
        solution.held_out_checked += 1;
        if verify_n(&identity, n).is_some() {
            solution.status = ProfileStatus::Infeasible { violated_n: n };
            break;
        }
    }
    Ok(solution)
}

/// Period-`N` table whose entry `k` is
/// `scale * sum_s coeff_s * 2cos(2 k a_s pi / N)`, each entry recognised exactly
/// in `Q(sqrt d)` (`d = 0` for rational tables).
pub fn profile_from_angles(
    n: usize,
    terms: &[(i64, QuadValue)],
    scale: &QuadValue,
    d: i64,
) -> Result<Vec<QuadValue>> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut den = BigInt::one();
    for (_, c) in terms {
        let Some(r) = c.to_rational() else {
            return Err(Error::InvalidArgument(format!("angle coefficient {c} must be rational")));
        };
        den = den.lcm(r.denom());
    }
    let den_r = BigRational::from_integer(den.clone());
    let modulus = 2 * n;
    (0..n)
        .map(|k| {
            let mut v = CycloVec::zero(modulus);
            for (a, c) in terms {
                let c = c.to_rational().expect("checked above") * &den_r;
                let ring = CycloVec::two_cos(modulus, 2 * k as i64 * a).scale(&c.to_integer());
                v = v.add(&ring)?;
            }
            let q = recognize_quadratic(&v, d)?.ok_or(Error::NotQuadratic { residue: k, d })?;
            q.scale(&den_r.recip()).checked_mul(scale)
        })
        .collect()
}
