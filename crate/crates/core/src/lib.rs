//! Exact 2-adic algebra for the Adams operation `psi^3` acting on
//! `pi_*(bu ^ bo)` modulo torsion, presented as an upper-triangular matrix.
//!
//! * [`dyadic`]: exact rationals and residues modulo `2^N`.
//! * [`valuations`]: valuation identities with big-integer oracles.
//! * [`cring`]: the graded ring `Q_2[u/2, v^2/4]`, its integral basis and `psi3`.
//! * [`utmatrix`]: truncated upper-triangular matrices and the conjugation solver.
//! * [`pipeline`]: extraction of the matrix of `1 ^ psi3`, normalization,
//!   end-to-end conjugacy, and the products `X_n`.
//! * [`exec`]: sequential or rayon-backed sweeps.

pub mod cring;
pub mod dyadic;
pub mod error;
pub mod exec;
pub mod pipeline;
pub mod utmatrix;
pub mod valuations;

pub use error::{Error, Result};
