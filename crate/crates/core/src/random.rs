//! Seeded random generators for the property suites.

use std::ops::RangeInclusive;

use rand::Rng;

use crate::ff::{Fq, FqPoly, LaurentPoly};
use crate::trunc::TruncElem;

/// Random element of `k[t^{±1}][z]` with at most `max_terms` terms, `t`
/// exponents in `t_range` and `z` exponents at most `max_z`.
pub fn random_laurent<R: Rng + ?Sized>(
    k: &Fq,
    rng: &mut R,
    t_range: RangeInclusive<i64>,
    max_z: u32,
    max_terms: usize,
) -> LaurentPoly {
    let n = rng.gen_range(0..=max_terms);
    LaurentPoly::from_terms(
        k,
        (0..n).map(|_| {
            (rng.gen_range(t_range.clone()), rng.gen_range(0..=max_z), k.random(rng))
        }),
    )
}

/// Random nonzero element (retrying the generator above).
pub fn random_nonzero_laurent<R: Rng + ?Sized>(
    k: &Fq,
    rng: &mut R,
    t_range: RangeInclusive<i64>,
    max_z: u32,
    max_terms: usize,
) -> LaurentPoly {
    loop {
        let a = random_laurent(k, rng, t_range.clone(), max_z, max_terms.max(1));
        if !a.is_zero() {
            return a;
        }
    }
}

/// Random nonzero polynomial of degree at most `max_deg`.
pub fn random_poly<R: Rng + ?Sized>(k: &Fq, rng: &mut R, max_deg: usize) -> FqPoly {
    loop {
        let deg = rng.gen_range(0..=max_deg);
        let g = FqPoly::new((0..=deg).map(|_| k.random(rng)).collect());
        if !g.is_zero() {
            return g;
        }
    }
}

/// Random datum `c = 1 + sum_{j>=1} c_j T^j` of rank `p^m - 1` with
/// coefficients in `k[t^{±1}]`.
pub fn random_admissible_c<R: Rng + ?Sized>(k: &Fq, rng: &mut R, m_exp: u32) -> TruncElem<LaurentPoly> {
    let rank = (k.p() as usize).pow(m_exp) - 1;
    let mut coeffs = vec![LaurentPoly::one()];
    for _ in 0..rank {
        coeffs.push(random_laurent(k, rng, -3..=3, 0, 3));
    }
    TruncElem::new(coeffs)
}
