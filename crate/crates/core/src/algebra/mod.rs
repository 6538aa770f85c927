//! Exact cosine algebra: Laurent vectors modulo `z^N - 1`, characteristic
//! polynomials of 2cos root families, Newton power sums and quadratic values.

mod cyclo;
mod poly;
mod quad;

pub use cyclo::{
    cos_power_centered, cos_power_direct, cos_power_vector, cyclo_mul, cyclotomic_polynomial, reduce_mod_monic,
    CycloVec,
};
pub use poly::{char_poly_from_roots, power_sum, power_sums, squared_root_poly, IntPolynomial};
pub use quad::{approx, recognize_quadratic, sqrt_in_cyclotomic, QuadValue};
