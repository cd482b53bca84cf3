use serde::Serialize;

use crate::cring::{psi3_matrices, Psi3Matrix};
use crate::dyadic::{residue_from_rational, Z2Residue};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::pipeline::params::PipelineParams;
use crate::utmatrix::{conjugate_solve, mat_inv, mat_mul, similarity_check, UTMatrix};
use crate::valuations::{alpha, beta};

/// Coordinates of a degree-`4k` element in the basis `g_{4k,0}, ..., g_{4k,4k}`,
/// reduced modulo `2^N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueVector {
    pub degree_index: usize,
    pub coeffs: Vec<Z2Residue>,
}

fn check_k(k: usize, p: &PipelineParams) -> Result<()> {
    if k >= p.n {
        return Err(Error::IndexRange(format!("k = {k} but only {} generators", p.n)));
    }
    Ok(())
}

/// `z_{4k} = sum_i 2^{beta(k,i)} lambda(k,i) g_{4k,4i}`. The leading term has
/// no 2-power because `beta(k,k) = 0`.
pub fn build_z(k: usize, p: &PipelineParams) -> Result<ResidueVector> {
    check_k(k, p)?;
    let coeffs = (0..=k)
        .map(|i| Ok(p.lambda(k, i).shl(beta(k as u64, i as u64)? as u32)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueVector {
        degree_index: k,
        coeffs,
    })
}

/// Exponent `e` with `u^{2k-2l} g_{4l,4i} = 2^e g_{4k,4i}`.
pub fn u_power_multiplier(k: usize, l: usize, i: usize) -> Result<u32> {
    if !(i <= l && l <= k) {
        return Err(Error::IndexOrder(format!(
            "need i <= l <= k, got (k, l, i) = ({k}, {l}, {i})"
        )));
    }
    let t = 4 * i as u64 - u64::from(alpha(i as u64));
    let (l2, k2) = (2 * l as u64, 2 * k as u64);
    Ok(if t <= l2 {
        0
    } else if t <= k2 {
        (t - l2) as u32
    } else {
        (k2 - l2) as u32
    })
}

fn iota_scale(k: usize, l: usize) -> u32 {
    (2 * (k - l)) as u32 + alpha(l as u64) - alpha(k as u64)
}

/// `(iota_{k,l})_*(z_{4k}) = mu(k,l) 2^{2k-2l-alpha(k)+alpha(l)} u^{2k-2l} z_{4l}`
/// written in the degree-`4k` basis. For `l = k` this is `z_{4k}`.
pub fn iota_image(k: usize, l: usize, p: &PipelineParams) -> Result<ResidueVector> {
    if l > k {
        return Err(Error::IndexOrder(format!("need l <= k, got (k, l) = ({k}, {l})")));
    }
    check_k(k, p)?;
    if l == k {
        return build_z(k, p);
    }
    let z = build_z(l, p)?;
    let unit = p.mu(k, l).shl(iota_scale(k, l));
    let mut coeffs = vec![Z2Residue::zero(p.mod2exp); k + 1];
    for (i, zi) in z.coeffs.iter().enumerate() {
        coeffs[i] = (&unit * zi).shl(u_power_multiplier(k, l, i)?);
    }
    Ok(ResidueVector {
        degree_index: k,
        coeffs,
    })
}

/// Bits lost to the 2-power divisions of the extraction in column `k`.
fn column_loss(k: usize) -> u32 {
    (0..k)
        .map(|i| iota_scale(k, i) + u_power_multiplier(k, i, i).expect("i <= k"))
        .sum()
}

/// Extra precision carried through extraction so that the result is exact
/// modulo `2^N` for `n` columns.
pub fn guard_bits(n: usize) -> u32 {
    (0..n).map(column_loss).max().unwrap_or(0)
}

/// Matrices of `psi3` on the degree-`4k` summands for `k < n`, computed
/// once and shared between extractions.
#[derive(Debug, Clone)]
pub struct Psi3Tables {
    matrices: Vec<Psi3Matrix>,
}

impl Psi3Tables {
    pub fn new(n: usize, mode: Execution) -> Result<Self> {
        Ok(Psi3Tables {
            matrices: psi3_matrices(0..n as u32, mode)?,
        })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// `psi3` applied to a degree-`4k` coordinate vector.
    fn apply(&self, v: &ResidueVector) -> Result<Vec<Z2Residue>> {
        let m = &self.matrices[v.degree_index];
        let bits = v.coeffs.first().map_or(1, Z2Residue::mod2exp);
        let mut out = vec![Z2Residue::zero(bits); v.coeffs.len()];
        for (l, zl) in v.coeffs.iter().enumerate() {
            for (i, e) in m.rows[l].coeffs.iter().enumerate() {
                if !e.is_zero() {
                    out[i] = &out[i] + &(&residue_from_rational(e, bits)? * zl);
                }
            }
        }
        Ok(out)
    }
}

/// Matrix `A` of `1 ^ psi3` in the basis `z_0, z_4, ...`: column `k` solves
/// `sum_{l <= k} A_{l,k} (iota_{k,l})_*(z_{4k}) = psi3(z_{4k})` from the top
/// coefficient down.
pub fn extract_a(p: &PipelineParams) -> Result<UTMatrix> {
    extract_a_with(p, &Psi3Tables::new(p.n, Execution::Sequential)?)
}

/// [`extract_a`] with precomputed `psi3` tables covering at least `p.n` degrees.
pub fn extract_a_with(p: &PipelineParams, tables: &Psi3Tables) -> Result<UTMatrix> {
    if tables.len() < p.n {
        return Err(Error::SizeMismatch(format!(
            "tables cover {} degrees, need {}",
            tables.len(),
            p.n
        )));
    }
    let bits = p.mod2exp;
    let work = bits + guard_bits(p.n);
    let wp = p.with_mod2exp(work);
    let mut a = UTMatrix::zero(p.n, work);
    for k in 0..p.n {
        let iotas = (0..=k).map(|l| iota_image(k, l, &wp)).collect::<Result<Vec<_>>>()?;
        let pz = tables.apply(&iotas[k])?;
        let akk = &pz[k] * &wp.lambda(k, k).inv()?;
        a.set(k, k, akk);
        for i in (0..k).rev() {
            let mut rhs = pz[i].clone();
            for (l, io) in iotas.iter().enumerate().skip(i + 1) {
                rhs = &rhs - &(a.get(l, k) * &io.coeffs[i]);
            }
            let pivot = &iotas[i].coeffs[i];
            let e = pivot.valuation().ok_or(Error::NonUnitDivision { column: k, row: i })? as u32;
            let odd = pivot.shr_exact(e).expect("valuation is e");
            let q = rhs.shr_exact(e).ok_or(Error::NonUnitDivision { column: k, row: i })?;
            a.set(i, k, &q * &odd.inv()?);
        }
    }
    Ok(a.with_mod2exp(bits))
}

/// `D = diag(1, A_{0,1}, A_{0,1} A_{1,2}, ...)` and `C = D A D^{-1}`, which has
/// superdiagonal all 1.
pub fn normalize_d(a: &UTMatrix) -> Result<(UTMatrix, UTMatrix)> {
    let n = a.size();
    let bits = a.mod2exp();
    let mut diag = Vec::with_capacity(n);
    let mut acc = Z2Residue::one(bits);
    for k in 0..n {
        if k > 0 {
            let s = a.get(k - 1, k);
            if !s.is_unit() {
                return Err(Error::NonUnitSuperdiagonal { index: k - 1 });
            }
            acc = &acc * s;
        }
        diag.push(acc.clone());
    }
    let d = UTMatrix::diagonal(&diag, bits);
    let c = mat_mul(&mat_mul(&d, a)?, &mat_inv(&d)?)?;
    Ok((d, c))
}

/// Every intermediate of one run of extraction, normalization and conjugation.
#[derive(Debug, Clone, Serialize)]
pub struct EndToEndReport {
    pub n: usize,
    pub seed: u64,
    pub mod2exp: u32,
    pub a: UTMatrix,
    pub d: UTMatrix,
    pub c: UTMatrix,
    pub u: UTMatrix,
    /// `U^{-1} C U = B`.
    pub check: bool,
}

pub fn theorem01_end_to_end(n: usize, seed: u64, mod2exp: u32) -> Result<EndToEndReport> {
    end_to_end_with(n, seed, mod2exp, &Psi3Tables::new(n, Execution::Sequential)?)
}

fn end_to_end_with(n: usize, seed: u64, mod2exp: u32, tables: &Psi3Tables) -> Result<EndToEndReport> {
    let p = PipelineParams::sample(n, seed, mod2exp);
    let a = extract_a_with(&p, tables)?;
    let (d, c) = normalize_d(&a)?;
    let u = conjugate_solve(&c)?;
    let check = similarity_check(&u, &c)?;
    Ok(EndToEndReport {
        n,
        seed,
        mod2exp,
        a,
        d,
        c,
        u,
        check,
    })
}

/// [`theorem01_end_to_end`] for each seed, results in seed order.
pub fn end_to_end_sweep(n: usize, seeds: &[u64], mod2exp: u32, mode: Execution) -> Result<Vec<Result<EndToEndReport>>> {
    let tables = Psi3Tables::new(n, mode)?;
    Ok(exec::map(mode, seeds.to_vec(), |s| {
        end_to_end_with(n, s, mod2exp, &tables)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cring::{g_element, GradedElement};
    use crate::dyadic::DyadicRational;
    use crate::utmatrix::build_b;

    fn r(v: u64, bits: u32) -> Z2Residue {
        Z2Residue::from_u64(v, bits)
    }

    #[test]
    fn z_examples() {
        let p = PipelineParams::sample(3, 11, 64);
        assert_eq!(build_z(0, &p).unwrap().coeffs, vec![r(1, 64)]);
        assert_eq!(
            build_z(1, &p).unwrap().coeffs,
            vec![p.lambda(1, 0).shl(1), p.lambda(1, 1).clone()]
        );
        assert_eq!(
            build_z(2, &p).unwrap().coeffs,
            vec![p.lambda(2, 0).shl(3), p.lambda(2, 1).shl(3), p.lambda(2, 2).clone()]
        );
        assert!(matches!(build_z(3, &p), Err(Error::IndexRange(_))));
    }

    #[test]
    fn u_power_examples() {
        assert_eq!(u_power_multiplier(2, 1, 0).unwrap(), 0);
        assert_eq!(u_power_multiplier(2, 1, 1).unwrap(), 1);
        assert_eq!(u_power_multiplier(5, 3, 3).unwrap(), 4);
        assert!(u_power_multiplier(2, 3, 1).is_err());
    }

    #[test]
    fn u_power_matches_ring() {
        for k in 0..14u32 {
            for l in 0..=k {
                let up = GradedElement::u_pow(2 * (k - l));
                for i in 0..=l {
                    let lhs = &up * &g_element(l, i).unwrap();
                    let e = u_power_multiplier(k as usize, l as usize, i as usize).unwrap();
                    let rhs = g_element(k, i).unwrap().scale(&DyadicRational::pow2(i64::from(e)));
                    assert_eq!(lhs, rhs, "(k, l, i) = ({k}, {l}, {i})");
                }
            }
        }
    }

    #[test]
    fn iota_examples() {
        let p = PipelineParams::sample(3, 5, 64);
        let v = iota_image(1, 0, &p).unwrap();
        assert_eq!(v.coeffs, vec![p.mu(1, 0).shl(1), r(0, 64)]);
        let v = iota_image(2, 1, &p).unwrap();
        let m4 = p.mu(2, 1).shl(2);
        assert_eq!(
            v.coeffs,
            vec![&m4 * &p.lambda(1, 0).shl(1), &m4 * &p.lambda(1, 1).shl(1), r(0, 64)]
        );
        assert_eq!(iota_image(2, 2, &p).unwrap(), build_z(2, &p).unwrap());
        assert!(iota_image(1, 2, &p).is_err());
    }

    #[test]
    fn low_columns_match_closed_forms() {
        for seed in 0..10 {
            let p = PipelineParams::sample(3, seed, 128);
            let a = extract_a(&p).unwrap();
            assert_eq!(a.get(0, 0), &r(1, 128));
            assert_eq!(a.get(1, 1), &r(9, 128));
            assert_eq!(a.get(2, 2), &r(81, 128));
            let expected = &(p.lambda(1, 1) - &p.lambda(1, 0).shl(3)) * &p.mu(1, 0).inv().unwrap();
            assert_eq!(a.get(0, 1), &expected);
        }
    }

    #[test]
    fn extraction_reproduces_psi3() {
        // Substituting A back into the defining equations recovers psi3(z).
        let p = PipelineParams::sample(9, 3, 96);
        let a = extract_a(&p).unwrap();
        let tables = Psi3Tables::new(9, Execution::Sequential).unwrap();
        for k in 0..9 {
            let pz = tables.apply(&build_z(k, &p).unwrap()).unwrap();
            let mut sum = vec![r(0, 96); k + 1];
            for l in 0..=k {
                let io = iota_image(k, l, &p).unwrap();
                for (s, c) in sum.iter_mut().zip(&io.coeffs) {
                    *s = &*s + &(a.get(l, k) * c);
                }
            }
            assert_eq!(sum, pz, "column {k}");
        }
    }

    #[test]
    fn extraction_is_stable_under_precision() {
        let p = PipelineParams::sample(10, 21, 160);
        let hi = extract_a(&p).unwrap();
        let lo = extract_a(&p.with_mod2exp(64)).unwrap();
        assert_eq!(hi.with_mod2exp(64), lo);
    }

    #[test]
    fn diagonal_and_superdiagonal_shape() {
        for seed in 0..10 {
            let a = extract_a(&PipelineParams::sample(8, seed, 128)).unwrap();
            for k in 0..8 {
                assert_eq!(a.get(k, k), &Z2Residue::nine_pow(k as u32, 128));
            }
            assert!(a.superdiagonal().iter().all(Z2Residue::is_unit));
        }
    }

    #[test]
    fn normalize_examples() {
        let b = build_b(5, 64);
        let (d, c) = normalize_d(&b).unwrap();
        assert_eq!(d, UTMatrix::identity(5, 64));
        assert_eq!(c, b);

        let rows = vec![
            vec![r(1, 64), r(3, 64), r(6, 64)],
            vec![r(0, 64), r(9, 64), r(5, 64)],
            vec![r(0, 64), r(0, 64), r(81, 64)],
        ];
        let a = UTMatrix::from_rows(rows, 64).unwrap();
        let (d, c) = normalize_d(&a).unwrap();
        assert_eq!(d.diagonal_entries(), vec![r(1, 64), r(3, 64), r(15, 64)]);
        assert_eq!(c.superdiagonal(), vec![r(1, 64), r(1, 64)]);
        assert_eq!(c.diagonal_entries(), a.diagonal_entries());

        let mut bad = a.clone();
        bad.set(1, 2, r(4, 64));
        assert_eq!(normalize_d(&bad).unwrap_err(), Error::NonUnitSuperdiagonal { index: 1 });
    }

    #[test]
    fn end_to_end_small() {
        let one = theorem01_end_to_end(1, 0, 64).unwrap();
        assert!(one.check);
        assert_eq!(one.c, build_b(1, 64));
        for seed in 0..5 {
            assert!(theorem01_end_to_end(4, seed, 128).unwrap().check);
        }
    }

    #[test]
    fn sweep_modes_agree() {
        let seeds: Vec<u64> = (0..6).collect();
        let s = end_to_end_sweep(6, &seeds, 96, Execution::Sequential).unwrap();
        let q = end_to_end_sweep(6, &seeds, 96, Execution::Parallel).unwrap();
        for (x, y) in s.iter().zip(&q) {
            let (x, y) = (x.as_ref().unwrap(), y.as_ref().unwrap());
            assert!(x.check);
            assert_eq!((x.seed, &x.a, &x.u), (y.seed, &y.a, &y.u));
        }
    }
}
