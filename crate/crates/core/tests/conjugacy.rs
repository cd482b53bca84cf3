use psi3_core::dyadic::Z2Residue;
use psi3_core::pipeline::sample_c;
use psi3_core::utmatrix::{build_b, conjugate_solve, mat_inv, mat_mul, similarity_check};

#[test]
fn random_c_at_sixteen() {
    for seed in 0..25 {
        let c = sample_c(16, seed, 128);
        let u = conjugate_solve(&c).unwrap();
        assert!(similarity_check(&u, &c).unwrap());
        let conj = mat_mul(&mat_mul(&mat_inv(&u).unwrap(), &c).unwrap(), &u).unwrap();
        assert_eq!(conj, build_b(16, 128));
        assert!((0..15).all(|i| u.get(i, 15).is_zero()));
    }
}

#[test]
fn solution_restricts_to_leading_blocks() {
    // Truncating C and solving again gives a valid conjugator for the block.
    let c = sample_c(12, 9, 96);
    for m in 1..=12 {
        let block = c.leading_block(m);
        let u = conjugate_solve(&block).unwrap();
        assert!(similarity_check(&u, &block).unwrap());
        assert!((0..m).all(|i| u.get(i, i).is_unit()));
    }
}

#[test]
fn low_precision_still_solves() {
    let c = sample_c(10, 2, 16);
    let u = conjugate_solve(&c).unwrap();
    assert!(similarity_check(&u, &c).unwrap());
    assert_eq!(u.get(0, 0), &Z2Residue::one(16));
}
