//! From parameterized generators to the conjugacy class of `B`.
//!
//! [`extract_a`] reads off the matrix of `1 ^ psi3` in the generators
//! `z_{4k}`, [`normalize_d`] rescales it to unit superdiagonal and
//! [`conjugate_solve`](crate::utmatrix::conjugate_solve) conjugates the result
//! to `B`. The [`xn`] functions handle the products `X_n = B_1 ... B_n`.

mod extract;
mod params;
pub mod xn;

pub use extract::{
    build_z, end_to_end_sweep, extract_a, extract_a_with, guard_bits, iota_image, normalize_d, theorem01_end_to_end,
    u_power_multiplier, EndToEndReport, Psi3Tables, ResidueVector,
};
pub use params::{sample_c, PipelineParams};
pub use xn::{
    bu_product, build_bu, xn_formula_path, xn_formula_published, xn_product, xn_report, xn_vanishing_check,
    PublishedEntry, XnReport,
};
