//! Exact evaluation, verification and discovery of periodic weighted sums of
//! binomial coefficients.

pub mod algebra;
pub mod discovery;
pub mod error;
pub mod exact;
pub mod identities;
pub mod numeric;
pub mod oeis;
pub mod sequences;
pub mod serde_str;

pub use error::{Error, Result};
