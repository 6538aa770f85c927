//! Machine-readable reports, one shape per subcommand.

use pbsum_core::discovery::ProfileSolution;
use pbsum_core::identities::{Divergence, Identity, Status};
use pbsum_core::oeis::AlignmentReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub id: String,
    pub domain: String,
    pub status: Status,
    pub first_divergence: Option<Divergence>,
    /// Side values at the first divergence, or at the last checked `n`.
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub millis: u64,
    pub instances: usize,
    pub range: [i64; 2],
    pub checked: usize,
    /// Instance holding the first divergence, when the entry is a family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_instance: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub command: String,
    pub entries: Vec<VerifyEntry>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub command: String,
    pub sequence: String,
    pub start: i64,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeriveReport {
    pub command: String,
    pub solution: ProfileSolution,
    pub identity: Option<Identity>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OeisReport {
    pub command: String,
    pub sequence: String,
    pub source: String,
    pub count: usize,
    pub alignment: AlignmentReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CospowReport {
    pub command: String,
    pub modulus: usize,
    pub exp: i64,
    pub power: u64,
    pub coeffs: Vec<String>,
    /// Whether the centered-row expansion gives the same vector.
    pub centered_agrees: bool,
}
