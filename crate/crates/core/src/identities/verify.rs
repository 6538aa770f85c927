use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{eval_side, Evaluated};
use super::{Body, Identity};
use crate::algebra::{cos_power_centered, cos_power_vector, CycloVec};

pub const DEFAULT_N_MAX: i64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub n: i64,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub family: String,
    pub domain: String,
    pub range: [i64; 2],
    pub checked: usize,
    pub status: Status,
    pub first_divergence: Option<Divergence>,
    /// Every `n` that failed.
    pub failures: Vec<i64>,
    pub millis: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

fn show(v: &CycloVec) -> String {
    let parts: Vec<String> = v.coeffs().iter().map(|c| c.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn same(lhs: &Evaluated, rhs: &Evaluated) -> bool {
    lhs.trusted() && rhs.trusted() && lhs.integer() == rhs.integer()
}

/// Compares both sides at one `n`; `None` when they agree.
pub fn verify_n(identity: &Identity, n: i64) -> Option<Divergence> {
    match &identity.body {
        Body::Series { lhs, rhs } => {
            let l = eval_side(lhs, n);
            let r = eval_side(rhs, n);
            match (l, r) {
                (Ok(l), Ok(r)) if same(&l, &r) => None,
                (l, r) => {
                    let text = |v: crate::Result<Evaluated>| match v {
                        Ok(v) => v.to_string(),
                        Err(e) => format!("error: {e}"),
                    };
                    Some(Divergence {
                        n,
                        lhs: text(l),
                        rhs: text(r),
                    })
                }
            }
        }
        Body::CosPower {
            odd,
            max_modulus,
            max_exp,
        } => {
            let power = (2 * n + *odd as i64) as u64;
            for modulus in 1..=*max_modulus {
                for e in 0..=*max_exp {
                    let l = cos_power_vector(modulus, e, power);
                    let r = cos_power_centered(modulus, e, power);
                    if l != r {
                        return Some(Divergence {
                            n,
                            lhs: format!("N={modulus}, e={e}: {}", show(&l)),
                            rhs: format!("N={modulus}, e={e}: {}", show(&r)),
                        });
                    }
                }
            }
            None
        }
    }
}

/// Checks every `n` of the domain inside `lo..=hi`.
pub fn verify(identity: &Identity, lo: i64, hi: i64) -> VerificationReport {
    let start = Instant::now();
    let ns = identity.domain.values_in(lo, hi);
    let failures: Vec<(i64, Divergence)> = ns
        .iter()
        .filter_map(|&n| verify_n(identity, n).map(|d| (n, d)))
        .collect();
    VerificationReport {
        id: identity.id.clone(),
        family: identity.family.clone(),
        domain: identity.domain.to_string(),
        range: [
            ns.first().copied().unwrap_or(lo),
            ns.last().copied().unwrap_or(hi),
        ],
        checked: ns.len(),
        status: if failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        failures: failures.iter().map(|(n, _)| *n).collect(),
        first_divergence: failures.into_iter().next().map(|(_, d)| d),
        millis: start.elapsed().as_millis() as u64,
    }
}

/// Verifies identities in parallel; reports come back in input order.
pub fn verify_all(identities: &[Identity], lo: i64, hi: i64) -> Vec<VerificationReport> {
    identities.par_iter().map(|id| verify(id, lo, hi)).collect()
}

/// One line per family: a family passes when every instance passes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub family: String,
    pub instances: usize,
    pub domain: String,
    pub checked: usize,
    pub status: Status,
    /// Instance id and divergence of the first failing instance.
    pub failing_instance: Option<String>,
    pub first_divergence: Option<Divergence>,
    pub millis: u64,
}

pub fn summarize_families(reports: &[VerificationReport]) -> Vec<FamilySummary> {
    let mut out: Vec<FamilySummary> = Vec::new();
    for r in reports {
        let idx = match out.iter().position(|f| f.family == r.family) {
            Some(i) => i,
            None => {
                out.push(FamilySummary {
                    family: r.family.clone(),
                    instances: 0,
                    domain: r.domain.clone(),
                    checked: 0,
                    status: Status::Pass,
                    failing_instance: None,
                    first_divergence: None,
                    millis: 0,
                });
                out.len() - 1
            }
        };
        let f = &mut out[idx];
        f.instances += 1;
        f.checked += r.checked;
        f.millis += r.millis;
        if !r.passed() && f.status == Status::Pass {
            f.status = Status::Fail;
            f.failing_instance = Some(r.id.clone());
            f.first_divergence = r.first_divergence.clone();
        }
    }
    out
}
