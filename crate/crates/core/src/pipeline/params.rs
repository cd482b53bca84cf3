use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::dyadic::Z2Residue;
use crate::error::{Error, Result};
use crate::utmatrix::{build_c, UTMatrix};

/// The undetermined 2-adic constants of the extraction: the coefficients
/// `lambda(k, i)` of each generator `z_{4k}` in the g-basis and the units
/// `mu(k, l)` attached to the maps between summands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineParams {
    pub n: usize,
    pub seed: Option<u64>,
    pub mod2exp: u32,
    /// `lambda[k][i]` for `0 <= i <= k < n`.
    lambda: Vec<Vec<Z2Residue>>,
    /// `mu[k][l]` for `0 <= l < k < n`.
    mu: Vec<Vec<Z2Residue>>,
}

const LAMBDA_STREAM: u64 = 1;
const MU_STREAM: u64 = 2;
const C_STREAM: u64 = 3;

/// Draws one residue from its own ChaCha stream. Stream ids depend only on
/// `(kind, k, i)`, so a parameter's value does not depend on `n` or on the
/// order of drawing.
fn draw(seed: u64, kind: u64, k: usize, i: usize, mod2exp: u32) -> Z2Residue {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((kind << 56) | ((k as u64) << 28) | i as u64);
    let words = (mod2exp as usize).div_ceil(32);
    let digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    Z2Residue::new(BigUint::from_slice(&digits), mod2exp)
}

fn make_odd(x: Z2Residue) -> Z2Residue {
    if x.is_unit() {
        x
    } else {
        &x + &Z2Residue::one(x.mod2exp())
    }
}

impl PipelineParams {
    /// Random parameters: `lambda(k, k)` and all `mu` odd, `lambda(k, i < k)`
    /// uniform, and `lambda(0, 0) = 1`.
    pub fn sample(n: usize, seed: u64, mod2exp: u32) -> Self {
        let lambda = (0..n)
            .map(|k| {
                (0..=k)
                    .map(|i| {
                        if k == 0 {
                            Z2Residue::one(mod2exp)
                        } else if i == k {
                            make_odd(draw(seed, LAMBDA_STREAM, k, i, mod2exp))
                        } else {
                            draw(seed, LAMBDA_STREAM, k, i, mod2exp)
                        }
                    })
                    .collect()
            })
            .collect();
        let mu = (0..n)
            .map(|k| (0..k).map(|l| make_odd(draw(seed, MU_STREAM, k, l, mod2exp))).collect())
            .collect();
        PipelineParams {
            n,
            seed: Some(seed),
            mod2exp,
            lambda,
            mu,
        }
    }

    /// Explicit parameters, validated.
    pub fn new(lambda: Vec<Vec<Z2Residue>>, mu: Vec<Vec<Z2Residue>>, mod2exp: u32) -> Result<Self> {
        let n = lambda.len();
        if mu.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{n} lambda rows but {} mu rows",
                mu.len()
            )));
        }
        for k in 0..n {
            if lambda[k].len() != k + 1 || mu[k].len() != k {
                return Err(Error::InvalidParameter(format!("row {k} has the wrong length")));
            }
            if lambda[k].iter().chain(&mu[k]).any(|x| x.mod2exp() != mod2exp) {
                return Err(Error::InvalidParameter(format!("row {k} is not mod 2^{mod2exp}")));
            }
            if !lambda[k][k].is_unit() {
                return Err(Error::InvalidParameter(format!("lambda({k}, {k}) must be odd")));
            }
            if let Some(l) = mu[k].iter().position(|x| !x.is_unit()) {
                return Err(Error::InvalidParameter(format!("mu({k}, {l}) must be odd")));
            }
        }
        if n > 0 && lambda[0][0] != Z2Residue::one(mod2exp) {
            return Err(Error::InvalidParameter("lambda(0, 0) must be 1".into()));
        }
        Ok(PipelineParams {
            n,
            seed: None,
            mod2exp,
            lambda,
            mu,
        })
    }

    pub fn lambda(&self, k: usize, i: usize) -> &Z2Residue {
        &self.lambda[k][i]
    }

    pub fn mu(&self, k: usize, l: usize) -> &Z2Residue {
        &self.mu[k][l]
    }

    /// Same integers read at another precision.
    pub fn with_mod2exp(&self, mod2exp: u32) -> Self {
        let lift = |rows: &Vec<Vec<Z2Residue>>| {
            rows.iter()
                .map(|r| r.iter().map(|x| x.with_mod2exp(mod2exp)).collect())
                .collect()
        };
        PipelineParams {
            n: self.n,
            seed: self.seed,
            mod2exp,
            lambda: lift(&self.lambda),
            mu: lift(&self.mu),
        }
    }

    /// Leading `m` rows.
    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.n);
        PipelineParams {
            n: m,
            seed: self.seed,
            mod2exp: self.mod2exp,
            lambda: self.lambda[..m].to_vec(),
            mu: self.mu[..m].to_vec(),
        }
    }
}

/// Random member of the conjugation solver's input class: diagonal `9^k`,
/// superdiagonal 1, uniform entries above.
pub fn sample_c(size: usize, seed: u64, mod2exp: u32) -> UTMatrix {
    let upper = (0..size)
        .flat_map(|i| (i + 2..size).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), draw(seed, C_STREAM, i, j, mod2exp)))
        .collect();
    build_c(size, mod2exp, &upper).expect("entries above the superdiagonal")
}
