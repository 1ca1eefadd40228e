//! Hasse-Schmidt higher derivations `A -> A[T:m]` on `k[t^{±1}]` and on
//! `k[t^{±1}][z]`, stored by the images of the ring generators and extended
//! to all of `A` as a ring homomorphism.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Fq, LaurentPoly, LaurentRing};
use crate::trunc::TruncElem;

pub type Trunc = TruncElem<LaurentPoly>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseRing {
    /// `k[t^{±1}]`
    Laurent,
    /// `k[t^{±1}][z]`
    Disc,
}

/// A rank-`m` higher derivation, i.e. a ring homomorphism
/// `a -> sum_j d_j(a) T^j` with `d_0 = id`.
#[derive(Clone, Debug)]
pub struct HigherDerivation {
    field: Fq,
    image_t: Trunc,
    image_t_inv: Trunc,
    image_z: Option<Trunc>,
}

/// Outcome of the hypothesis check: order `mu`, exponent `n` and whether the
/// hypothesis holds for the supplied extension degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HypReport {
    /// Least `j >= 1` with `d_j != 0`; `None` for the trivial derivation.
    pub mu: Option<usize>,
    pub n: u32,
    pub holds: bool,
}

impl HigherDerivation {
    /// Builds a derivation from generator images. The constant coefficient
    /// of `image_t` must be `t`, that of `image_z` must be `z`.
    pub fn new(field: Fq, image_t: Trunc, image_z: Option<Trunc>) -> Result<HigherDerivation> {
        if *image_t.constant_term() != LaurentPoly::t() {
            return Err(Error::InvalidArgument("constant coefficient of d(t) must be t".into()));
        }
        if let Some(z) = &image_z {
            if *z.constant_term() != LaurentPoly::z() {
                return Err(Error::InvalidArgument("constant coefficient of d(z) must be z".into()));
            }
            if z.rank() != image_t.rank() {
                return Err(Error::RankMismatch { left: image_t.rank(), right: z.rank() });
            }
        } else if image_t.coeffs().iter().any(LaurentPoly::uses_z) {
            return Err(Error::MissingZImage);
        }
        let ring = LaurentRing { field: field.clone(), with_z: image_z.is_some() };
        let image_t_inv = image_t.inv(&ring)?;
        Ok(HigherDerivation { field, image_t, image_t_inv, image_z })
    }

    /// The standard derivation `d_j(t^i) = binom(i, j) t^{i-j}` of rank
    /// `p^{m_exp} - 1`, i.e. `t -> t + T`.
    pub fn standard(field: &Fq, m_exp: u32) -> Result<HigherDerivation> {
        if m_exp == 0 {
            return Err(Error::InvalidArgument("m_exp must be positive (rank would be 0)".into()));
        }
        let rank = (field.p() as u64)
            .checked_pow(m_exp)
            .filter(|&r| r <= 1 << 16)
            .ok_or_else(|| Error::InvalidArgument(format!("rank {}^{m_exp} too large", field.p())))?
            as usize
            - 1;
        let ring = LaurentRing::one_var(field.clone());
        let image_t = TruncElem::from_coeffs(&ring, vec![LaurentPoly::t(), LaurentPoly::one()], rank);
        HigherDerivation::new(field.clone(), image_t, None)
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.image_t.rank()
    }

    pub fn base(&self) -> BaseRing {
        if self.image_z.is_some() {
            BaseRing::Disc
        } else {
            BaseRing::Laurent
        }
    }

    /// Coefficient ring of the truncations this derivation produces.
    pub fn ring(&self) -> LaurentRing {
        LaurentRing { field: self.field.clone(), with_z: self.image_z.is_some() }
    }

    pub fn image_t(&self) -> &Trunc {
        &self.image_t
    }

    pub fn image_z(&self) -> Option<&Trunc> {
        self.image_z.as_ref()
    }

    /// Extends a derivation of `k[t^{±1}]` to `k[t^{±1}][z]` by `z -> c z`.
    pub fn extend_to_disc(&self, c: &Trunc) -> Result<HigherDerivation> {
        if self.image_z.is_some() {
            return Err(Error::InvalidArgument("derivation is already defined on z".into()));
        }
        if c.rank() != self.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: c.rank() });
        }
        if c.coeffs().iter().any(LaurentPoly::uses_z) {
            return Err(Error::InvalidArgument("c must have coefficients in k[t^{±1}]".into()));
        }
        if !c.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne);
        }
        let ring = LaurentRing::two_var(self.field.clone());
        let image_z = c.scale(&LaurentPoly::z(), &ring);
        HigherDerivation::new(self.field.clone(), self.image_t.clone(), Some(image_z))
    }

    /// The value `sum_j d_j(f) T^j`.
    pub fn apply(&self, f: &LaurentPoly) -> Result<Trunc> {
        let ring = self.ring();
        if !ring.contains(f) {
            return Err(Error::MissingZImage);
        }
        let m = self.rank();
        let mut t_powers: HashMap<i64, Trunc> = HashMap::new();
        let mut z_powers: HashMap<u32, Trunc> = HashMap::new();
        let mut acc = TruncElem::constant(&ring, LaurentPoly::zero(), m);
        for (mono, &c) in f.terms() {
            let tp = t_powers
                .entry(mono.t)
                .or_insert_with(|| {
                    if mono.t >= 0 {
                        self.image_t.pow(mono.t as u64, &ring)
                    } else {
                        self.image_t_inv.pow(mono.t.unsigned_abs(), &ring)
                    }
                })
                .clone();
            let term = if mono.z == 0 {
                tp
            } else {
                let image_z = self.image_z.as_ref().expect("checked by contains");
                let zp = z_powers.entry(mono.z).or_insert_with(|| image_z.pow(mono.z as u64, &ring));
                tp.mul(zp, &ring)?
            };
            acc = acc.add(&term.scale(&LaurentPoly::constant(c), &ring), &ring)?;
        }
        Ok(acc)
    }

    /// Checks `d(ab) = d(a) d(b)` coefficientwise.
    pub fn convolution_check(&self, a: &LaurentPoly, b: &LaurentPoly) -> Result<bool> {
        let ring = self.ring();
        let lhs = self.apply(&a.mul(b, &self.field))?;
        let rhs = self.apply(a)?.mul(&self.apply(b)?, &ring)?;
        Ok(lhs == rhs)
    }

    /// True iff `f` is a constant of the derivation.
    pub fn constants_check(&self, f: &LaurentPoly) -> Result<bool> {
        Ok(self.apply(f)?.is_constant(&self.ring()))
    }

    /// Least `j >= 1` with `d_j != 0`, read off the generator images.
    pub fn order(&self) -> Option<usize> {
        (1..=self.rank()).find(|&j| {
            !self.image_t.coeff(j).is_zero()
                || self.image_z.as_ref().is_some_and(|z| !z.coeff(j).is_zero())
        })
    }

    /// `min { n : rank < p^n }`.
    pub fn exponent(&self) -> u32 {
        let p = self.field.p() as u64;
        let m = self.rank() as u64;
        let mut n = 0;
        let mut pn = 1u64;
        while m >= pn {
            pn *= p;
            n += 1;
        }
        n
    }

    /// Hypothesis check: `[K:K'] = p^n` and some generator has a unit image under
    /// `d_mu`. The extension degree `[K:K']` is supplied by the caller.
    pub fn hyp_check(&self, extension_index: u64) -> HypReport {
        let mu = self.order();
        let n = self.exponent();
        let degree_ok = (self.field.p() as u64).checked_pow(n) == Some(extension_index);
        let unit_ok = mu.is_some_and(|j| {
            self.image_t.coeff(j).is_unit()
                || self.image_z.as_ref().is_some_and(|z| z.coeff(j).is_unit())
        });
        HypReport { mu, n, holds: degree_ok && unit_ok }
    }
}

/// Alias for [`HigherDerivation::standard`].
pub fn standard_derivation(field: &Fq, m_exp: u32) -> Result<HigherDerivation> {
    HigherDerivation::standard(field, m_exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::parse_laurent;
    use crate::random::random_laurent;
    use crate::trunc::parse_trunc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lp(s: &str, k: &Fq) -> LaurentPoly {
        parse_laurent(s, k, true).unwrap()
    }

    fn tr(s: &str, k: &Fq, m: usize) -> Trunc {
        parse_trunc(s, k, m, true).unwrap()
    }

    /// Oracle for the standard derivation on nonnegative powers:
    /// `d_j(t^i) = binom(i, j) t^{i-j}` computed with exact integer binomials.
    fn binomial_image(i: i64, m: usize, k: &Fq) -> Trunc {
        let coeffs = (0..=m)
            .map(|j| {
                if (j as i64) > i {
                    return LaurentPoly::zero();
                }
                let mut b: u128 = 1;
                for r in 0..j as u128 {
                    b = b * (i as u128 - r) / (r + 1);
                }
                LaurentPoly::monomial(k.from_i64((b % k.p() as u128) as i64), i - j as i64, 0)
            })
            .collect();
        TruncElem::new(coeffs)
    }

    #[test]
    fn standard_rule_on_t_squared() {
        let k = Fq::prime(3).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        assert_eq!(d.apply(&lp("t^2", &k)).unwrap(), tr("t^2 + 2*t*T + T^2", &k, 2));
        assert!(d.apply(&LaurentPoly::one()).unwrap().is_one(&d.ring()));
    }

    #[test]
    fn standard_rule_matches_binomials() {
        for (p, m_exp) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let k = Fq::prime(p).unwrap();
            let d = HigherDerivation::standard(&k, m_exp).unwrap();
            for i in 0..30 {
                assert_eq!(d.apply(&LaurentPoly::t_pow(i)).unwrap(), binomial_image(i, d.rank(), &k));
            }
        }
    }

    #[test]
    fn inverse_of_t() {
        let k = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        let img = d.apply(&lp("t^-1", &k)).unwrap();
        assert_eq!(img, tr("t^-1 + t^-2*T", &k, 1));
        assert!(img.mul(d.image_t(), &d.ring()).unwrap().is_one(&d.ring()));
    }

    #[test]
    fn zero_exponent_rejected() {
        let k = Fq::prime(2).unwrap();
        assert!(matches!(HigherDerivation::standard(&k, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn extension_examples() {
        let k = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        let trivial = d.extend_to_disc(&tr("1", &k, 1)).unwrap();
        assert_eq!(trivial.apply(&LaurentPoly::z()).unwrap(), tr("z", &k, 1));
        let e = d.extend_to_disc(&tr("1 + T", &k, 1)).unwrap();
        assert_eq!(e.apply(&LaurentPoly::z()).unwrap(), tr("z + z*T", &k, 1));
        assert_eq!(e.apply(&lp("z^2", &k)).unwrap(), tr("z^2", &k, 1));
        let e2 = d.extend_to_disc(&tr("1 + t^-1*T", &k, 1)).unwrap();
        assert_eq!(e2.apply(&lp("t*z", &k)).unwrap(), tr("t*z", &k, 1));
        assert_eq!(d.extend_to_disc(&tr("t + T", &k, 1)).unwrap_err(), Error::ConstantTermNotOne);
        assert!(matches!(d.extend_to_disc(&tr("1", &k, 0)), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn apply_examples() {
        let k = Fq::prime(3).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        assert_eq!(d.apply(&lp("t + t^2", &k)).unwrap(), tr("t + t^2 + (1 + 2*t)*T + T^2", &k, 2));
        for m_exp in 1..=2 {
            let d = HigherDerivation::standard(&k, m_exp).unwrap();
            let f = LaurentPoly::t_pow(3i64.pow(m_exp));
            assert_eq!(d.apply(&f).unwrap(), TruncElem::constant(&d.ring(), f.clone(), d.rank()));
        }
        assert_eq!(d.apply(&LaurentPoly::z()), Err(Error::MissingZImage));
    }

    #[test]
    fn convolution_examples() {
        let k = Fq::prime(3).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        assert!(d.convolution_check(&lp("t", &k), &lp("t", &k)).unwrap());
        assert!(d.convolution_check(&lp("t^2", &k), &lp("t^-1", &k)).unwrap());
        let e = d.extend_to_disc(&tr("1 + t*T + 2*T^2", &k, 2)).unwrap();
        assert!(e.convolution_check(&lp("z", &k), &lp("t*z", &k)).unwrap());
    }

    #[test]
    fn hyp_examples() {
        let k3 = Fq::prime(3).unwrap();
        let d = HigherDerivation::standard(&k3, 1).unwrap();
        assert_eq!(d.hyp_check(3), HypReport { mu: Some(1), n: 1, holds: true });
        assert!(!d.hyp_check(2).holds);
        let k2 = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k2, 2).unwrap();
        assert_eq!(d.hyp_check(4), HypReport { mu: Some(1), n: 2, holds: true });
        for p in [2, 3, 5] {
            for m_exp in [1, 2] {
                let k = Fq::prime(p).unwrap();
                let d = HigherDerivation::standard(&k, m_exp).unwrap();
                let r = d.hyp_check((p as u64).pow(m_exp));
                assert_eq!(r, HypReport { mu: Some(1), n: m_exp, holds: true });
            }
        }
    }

    #[test]
    fn constants_examples() {
        let k = Fq::prime(2).unwrap();
        for m_exp in 1..=2 {
            let d = HigherDerivation::standard(&k, m_exp).unwrap();
            let pm = 2i64.pow(m_exp);
            assert!(d.constants_check(&LaurentPoly::t_pow(pm)).unwrap());
            assert!(!d.constants_check(&LaurentPoly::t()).unwrap());
            let f = LaurentPoly::t_pow(pm).add(&LaurentPoly::t_pow(2 * pm), &k);
            assert!(d.constants_check(&f).unwrap());
        }
    }

    /// Constants supported in `[-8, 8]` are exactly the span of `t^{i p^m}`:
    /// exhaustive over all `2^17` polynomials over `F_2`, enumerated in Gray
    /// code order so each step adds one monomial image.
    #[test]
    fn constants_are_spanned_by_p_power_monomials_exhaustive() {
        let k = Fq::prime(2).unwrap();
        for m_exp in 1..=2u32 {
            let d = HigherDerivation::standard(&k, m_exp).unwrap();
            let ring = d.ring();
            let pm = 2i64.pow(m_exp);
            let exps: Vec<i64> = (-8..=8).collect();
            let images: Vec<Trunc> = exps.iter().map(|&i| d.apply(&LaurentPoly::t_pow(i)).unwrap()).collect();
            let mut acc = TruncElem::constant(&ring, LaurentPoly::zero(), d.rank());
            let mut gray = 0u32;
            for step in 1u32..(1 << exps.len()) {
                let bit = step.trailing_zeros() as usize;
                gray ^= 1 << bit;
                acc = acc.add(&images[bit], &ring).unwrap();
                let expect = (0..exps.len()).all(|b| gray & (1 << b) == 0 || exps[b] % pm == 0);
                assert_eq!(acc.is_constant(&ring), expect, "support mask {gray:#x}");
            }
        }
    }

    #[test]
    fn multiplicativity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, m_exp) in [(2, 1), (2, 2), (3, 1)] {
            let k = Fq::prime(p).unwrap();
            let d = HigherDerivation::standard(&k, m_exp).unwrap();
            let c = TruncElem::from_coeffs(
                &d.ring(),
                (0..=d.rank()).map(|j| if j == 0 { LaurentPoly::one() } else { random_laurent(&k, &mut rng, -2..=2, 0, 2) }).collect(),
                d.rank(),
            );
            let e = d.extend_to_disc(&c).unwrap();
            for _ in 0..50 {
                let a = random_laurent(&k, &mut rng, -4..=4, 2, 4);
                let b = random_laurent(&k, &mut rng, -4..=4, 2, 4);
                assert!(e.convolution_check(&a, &b).unwrap());
            }
            let t = LaurentPoly::t();
            let prod = d.apply(&t).unwrap().mul(&d.apply(&LaurentPoly::t_pow(-1)).unwrap(), &d.ring()).unwrap();
            assert!(prod.is_one(&d.ring()));
        }
    }
}
