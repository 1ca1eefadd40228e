//! Truncated polynomial rings `R[T]/(T^{m+1})` over a coefficient ring `R`.

use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{parse_t_polynomial, Fq, LaurentPoly};
use crate::ring::Ring;

/// `a_0 + a_1 T + .. + a_m T^m` in `R[T:m]`; the rank `m` is `coeffs.len() - 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncElem<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> TruncElem<E> {
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<E>) -> TruncElem<E> {
        assert!(!coeffs.is_empty(), "a truncation has at least the constant coefficient");
        TruncElem { coeffs }
    }

    /// Pads or truncates `coeffs` to rank `m`.
    pub fn from_coeffs<R: Ring<Elem = E>>(ring: &R, mut coeffs: Vec<E>, m: usize) -> TruncElem<E> {
        coeffs.resize(m + 1, ring.zero());
        TruncElem { coeffs }
    }

    pub fn constant<R: Ring<Elem = E>>(ring: &R, c: E, m: usize) -> TruncElem<E> {
        let mut coeffs = vec![ring.zero(); m + 1];
        coeffs[0] = c;
        TruncElem { coeffs }
    }

    pub fn one<R: Ring<Elem = E>>(ring: &R, m: usize) -> TruncElem<E> {
        TruncElem::constant(ring, ring.one(), m)
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &E {
        &self.coeffs[j]
    }

    pub fn constant_term(&self) -> &E {
        &self.coeffs[0]
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch { left: self.rank(), right: other.rank() });
        }
        Ok(())
    }

    pub fn is_one<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        ring.is_one(&self.coeffs[0]) && self.coeffs[1..].iter().all(|c| ring.is_zero(c))
    }

    /// True iff all coefficients of positive `T`-degree vanish.
    pub fn is_constant<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        self.coeffs[1..].iter().all(|c| ring.is_zero(c))
    }

    pub fn is_unit<R: Ring<Elem = E>>(&self, ring: &R) -> bool {
        ring.is_unit(&self.coeffs[0])
    }

    pub fn add<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.check_rank(other)?;
        Ok(TruncElem {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| ring.add(a, b)).collect(),
        })
    }

    pub fn sub<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.check_rank(other)?;
        Ok(TruncElem {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| ring.sub(a, b)).collect(),
        })
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        TruncElem { coeffs: self.coeffs.iter().map(|a| ring.neg(a)).collect() }
    }

    pub fn scale<R: Ring<Elem = E>>(&self, c: &E, ring: &R) -> Self {
        TruncElem { coeffs: self.coeffs.iter().map(|a| ring.mul(a, c)).collect() }
    }

    /// `c_k = sum_{j<=k} a_j b_{k-j}`, degrees above the rank discarded.
    pub fn mul<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.check_rank(other)?;
        Ok(self.mul_same_rank(other, ring))
    }

    fn mul_same_rank<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Self {
        let m = self.rank();
        let mut out = vec![ring.zero(); m + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs[..=m - i].iter().enumerate() {
                if ring.is_zero(b) {
                    continue;
                }
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        TruncElem { coeffs: out }
    }

    /// Inverse by the degree-by-degree recursion
    /// `b_0 = a_0^{-1}`, `b_k = -a_0^{-1} sum_{j=1..k} a_j b_{k-j}`.
    pub fn inv<R: Ring<Elem = E>>(&self, ring: &R) -> Result<Self> {
        let a0_inv = ring.inv(&self.coeffs[0]).ok_or(Error::NotAUnitInTruncation)?;
        let m = self.rank();
        let mut out: Vec<E> = Vec::with_capacity(m + 1);
        out.push(a0_inv.clone());
        for k in 1..=m {
            let mut acc = ring.zero();
            for j in 1..=k {
                acc = ring.add(&acc, &ring.mul(&self.coeffs[j], &out[k - j]));
            }
            out.push(ring.neg(&ring.mul(&a0_inv, &acc)));
        }
        Ok(TruncElem { coeffs: out })
    }

    /// Binary powering.
    pub fn pow<R: Ring<Elem = E>>(&self, mut n: u64, ring: &R) -> Self {
        let mut base = self.clone();
        let mut acc = TruncElem::one(ring, self.rank());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_same_rank(&base, ring);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_same_rank(&base, ring);
            }
        }
        acc
    }

    /// Integer powers; negative exponents need a unit.
    pub fn pow_signed<R: Ring<Elem = E>>(&self, n: i64, ring: &R) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u64, ring))
        } else {
            Ok(self.inv(ring)?.pow(n.unsigned_abs(), ring))
        }
    }
}

impl<E: fmt::Display> fmt::Display for TruncElem<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            let s = c.to_string();
            if s == "0" {
                continue;
            }
            let body = if j == 0 {
                s
            } else {
                let c = if s == "1" {
                    String::new()
                } else if s.contains(" + ") {
                    format!("({s})*")
                } else {
                    format!("{s}*")
                };
                if j == 1 {
                    format!("{c}T")
                } else {
                    format!("{c}T^{j}")
                }
            };
            parts.push(body);
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Parses `a0 + a1*T + ..` as an element of `k[t^{±1}](+[z])[T:m]`; terms
/// of `T`-degree above `m` are rejected.
pub fn parse_trunc(s: &str, k: &Fq, m: usize, allow_z: bool) -> Result<TruncElem<LaurentPoly>> {
    let v = parse_t_polynomial(s, k, allow_z)?;
    if v.len() > m + 1 {
        return Err(Error::Parse(format!("{s:?} has T-degree {} above rank {m}", v.len() - 1)));
    }
    let mut coeffs = v;
    coeffs.resize(m + 1, LaurentPoly::zero());
    Ok(TruncElem::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{FqElem, LaurentRing};
    use crate::random::random_laurent;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u32) -> LaurentRing {
        LaurentRing::one_var(Fq::prime(p).unwrap())
    }

    #[test]
    fn one_plus_t_squared_in_char_two() {
        let k = Fq::prime(2).unwrap();
        let a = TruncElem::new(vec![FqElem::ONE, FqElem::ONE]);
        assert!(a.mul(&a, &k).unwrap().is_one(&k));
        let one = TruncElem::one(&k, 1);
        assert_eq!(a.mul(&one, &k).unwrap(), a);
    }

    #[test]
    fn inverse_of_one_plus_t_t() {
        let r = ring(3);
        let a = parse_trunc("1 + t*T", &r.field, 2, false).unwrap();
        let b = parse_trunc("1 - t*T + t^2*T^2", &r.field, 2, false).unwrap();
        assert!(a.mul(&b, &r).unwrap().is_one(&r));
        assert_eq!(a.inv(&r).unwrap(), b);
        assert!(TruncElem::one(&r, 2).inv(&r).unwrap().is_one(&r));
    }

    #[test]
    fn inverse_with_unit_constant() {
        let r = ring(2);
        let a = parse_trunc("t + t*T", &r.field, 1, false).unwrap();
        let expect = parse_trunc("t^-1 + t^-1*T", &r.field, 1, false).unwrap();
        assert_eq!(a.inv(&r).unwrap(), expect);
    }

    #[test]
    fn errors() {
        let r = ring(3);
        let a = parse_trunc("1 + t + T", &r.field, 2, false).unwrap();
        assert_eq!(a.inv(&r), Err(Error::NotAUnitInTruncation));
        let b = TruncElem::one(&r, 1);
        assert_eq!(a.mul(&b, &r), Err(Error::RankMismatch { left: 2, right: 1 }));
        assert!(parse_trunc("T^3", &r.field, 2, false).is_err());
    }

    #[test]
    fn display() {
        let r = ring(3);
        let a = parse_trunc("1 + t^-1*T + (t + 1)*T^2", &r.field, 3, false).unwrap();
        assert_eq!(a.to_string(), "1 + t^-1*T + (1 + t)*T^2");
        assert_eq!(parse_trunc("1 + T", &r.field, 1, false).unwrap().to_string(), "1 + T");
    }

    fn random_trunc(r: &LaurentRing, m: usize, rng: &mut ChaCha8Rng) -> TruncElem<LaurentPoly> {
        TruncElem::new((0..=m).map(|_| random_laurent(&r.field, rng, -3..=3, 0, 3)).collect())
    }

    #[test]
    fn commutative_and_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in [2, 3] {
            let r = ring(p);
            for _ in 0..100 {
                let a = random_trunc(&r, 3, &mut rng);
                let b = random_trunc(&r, 3, &mut rng);
                let c = random_trunc(&r, 3, &mut rng);
                assert_eq!(a.mul(&b, &r).unwrap(), b.mul(&a, &r).unwrap());
                let ab_c = a.mul(&b, &r).unwrap().mul(&c, &r).unwrap();
                let a_bc = a.mul(&b.mul(&c, &r).unwrap(), &r).unwrap();
                assert_eq!(ab_c, a_bc);
            }
        }
    }

    #[test]
    fn inverse_exists_iff_constant_is_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let r = ring(3);
        for _ in 0..200 {
            let a = random_trunc(&r, 2, &mut rng);
            match a.inv(&r) {
                Ok(b) => {
                    assert!(a.constant_term().is_unit());
                    assert!(a.mul(&b, &r).unwrap().is_one(&r));
                }
                Err(e) => {
                    assert_eq!(e, Error::NotAUnitInTruncation);
                    assert!(!a.constant_term().is_unit());
                }
            }
        }
    }

    #[test]
    fn principal_units_have_exponent_p_to_the_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (p, n) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let r = ring(p);
            let m = (p.pow(n) - 1) as usize;
            for _ in 0..20 {
                let mut u = random_trunc(&r, m, &mut rng);
                u = TruncElem::from_coeffs(
                    &r,
                    std::iter::once(LaurentPoly::one()).chain(u.coeffs[1..].iter().cloned()).collect(),
                    m,
                );
                assert!(u.pow(p.pow(n) as u64, &r).is_one(&r));
            }
        }
    }
}
