//! Finite fields `F_q = F_p[x]/(m(x))` with table-driven multiplication.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Largest supported field size.
pub const MAX_FIELD_SIZE: u32 = 1 << 16;

/// Element of a finite field, stored as the packed code `sum_i c_i p^i` of
/// its coefficient vector `(c_0, .., c_{f-1})` on the power basis of `x`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Conway polynomials (low to high coefficients) for the non-prime fields of
/// order at most 64.
const DEFAULT_MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 2, &[3, 6, 1]),
];

struct Tables {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for `0 <= i < q - 1`.
    exp: Vec<u32>,
    /// `log[a]` for nonzero codes `a`; `log[0]` is unused.
    log: Vec<u32>,
}

/// A finite field descriptor. Cloning is cheap.
#[derive(Clone)]
pub struct Fq {
    inner: Arc<Tables>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(modulus {:?})", self.inner.q, self.inner.modulus)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Fq {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^f` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut f = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        f += 1;
    }
    (r == 1).then_some((p as u32, f))
}

// Raw F_p polynomial helpers, low to high, used only to validate moduli and
// build the multiplication tables.

fn raw_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn raw_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = raw_trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = (r[top] as u64 * lead_inv as u64 % p as u64) as u32;
        let shift = top - dm;
        for (i, &mi) in m.iter().enumerate() {
            let sub = (c as u64 * mi as u64 % p as u64) as u32;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        r = raw_trim(r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn raw_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    // Trial division by every monic polynomial of degree 1..=deg/2.
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut cand = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                cand.push((c % p as u64) as u32);
                c /= p as u64;
            }
            cand.push(1);
            if raw_rem(m, &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn decode(mut code: u32, p: u32, f: u32) -> Vec<u32> {
    (0..f)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

fn raw_mul_code(a: u32, b: u32, p: u32, f: u32, m: &[u32]) -> u32 {
    let da = decode(a, p, f);
    let db = decode(b, p, f);
    let mut prod = vec![0u32; 2 * f as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let mut r = raw_rem(&prod, m, p);
    r.resize(f as usize, 0);
    encode(&r, p)
}

impl Fq {
    /// Builds `F_p[x]/(modulus)`; `modulus` is given low to high and must be
    /// monic and irreducible over `F_p`.
    pub fn new(p: u32, modulus: Vec<u32>) -> Result<Fq> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let modulus = raw_trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have positive degree".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let f = (modulus.len() - 1) as u32;
        let q = (p as u64).checked_pow(f).filter(|&q| q <= MAX_FIELD_SIZE as u64).ok_or_else(|| {
            Error::InvalidField(format!("field size {p}^{f} exceeds {MAX_FIELD_SIZE}"))
        })? as u32;
        if !raw_irreducible(&modulus, p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let mul = |a: u32, b: u32| raw_mul_code(a, b, p, f, &modulus);
        let mut exp = Vec::new();
        if q == 2 {
            exp.push(1);
        } else {
            for g in 2..q {
                let mut powers = vec![1u32];
                let mut x = g;
                while x != 1 && powers.len() < q as usize {
                    powers.push(x);
                    x = mul(x, g);
                }
                if powers.len() == (q - 1) as usize {
                    exp = powers;
                    break;
                }
            }
        }
        if exp.len() != (q - 1) as usize {
            return Err(Error::Internal("no primitive element found".into()));
        }
        let mut log = vec![0u32; q as usize];
        for (i, &x) in exp.iter().enumerate() {
            log[x as usize] = i as u32;
        }
        Ok(Fq { inner: Arc::new(Tables { p, f, q, modulus, exp, log }) })
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Fq> {
        Fq::new(p, vec![0, 1])
    }

    /// `F_{p^f}` using the built-in modulus table.
    pub fn with_default_modulus(p: u32, f: u32) -> Result<Fq> {
        if f == 1 {
            return Fq::prime(p);
        }
        DEFAULT_MODULI
            .iter()
            .find(|(pp, ff, _)| *pp == p && *ff == f)
            .map(|(_, _, m)| Fq::new(p, m.to_vec()))
            .unwrap_or_else(|| {
                Err(Error::InvalidField(format!(
                    "no built-in modulus for F_{{{p}^{f}}}; supply one explicitly"
                )))
            })
    }

    /// `F_q` for a prime power `q`, using the built-in modulus table.
    pub fn of_order(q: u64) -> Result<Fq> {
        let (p, f) = prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Fq::with_default_modulus(p, f)
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.f
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn elem(&self, code: u32) -> FqElem {
        assert!(code < self.inner.q, "code {code} out of range for F_{}", self.inner.q);
        FqElem(code)
    }

    pub fn try_elem(&self, code: u32) -> Option<FqElem> {
        (code < self.inner.q).then_some(FqElem(code))
    }

    /// Coefficient vector of length `f`.
    pub fn digits(&self, a: FqElem) -> Vec<u32> {
        decode(a.0, self.inner.p, self.inner.f)
    }

    pub fn from_digits(&self, digits: &[u32]) -> FqElem {
        let p = self.inner.p;
        let mut d: Vec<u32> = digits.iter().map(|&c| c % p).collect();
        d.resize(self.inner.f as usize, 0);
        FqElem(encode(&d, p))
    }

    pub fn from_i64(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Primitive element used for the log tables.
    pub fn generator(&self) -> FqElem {
        FqElem(if self.inner.q == 2 { 1 } else { self.inner.exp[1] })
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.inner.q).map(FqElem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        FqElem(rng.gen_range(0..self.inner.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FqElem {
        FqElem(rng.gen_range(1..self.inner.q))
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let t = &self.inner;
        if t.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        if t.f == 1 {
            return FqElem((a.0 + b.0) % t.p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0, 1);
        for _ in 0..t.f {
            out += ((x % t.p + y % t.p) % t.p) * place;
            x /= t.p;
            y /= t.p;
            place *= t.p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let t = &self.inner;
        if t.p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.0, 0, 1);
        for _ in 0..t.f {
            out += ((t.p - x % t.p) % t.p) * place;
            x /= t.p;
            place *= t.p;
        }
        FqElem(out)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem(0);
        }
        let t = &self.inner;
        let n = t.q - 1;
        FqElem(t.exp[((t.log[a.0 as usize] + t.log[b.0 as usize]) % n) as usize])
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        let t = &self.inner;
        let n = t.q - 1;
        Some(FqElem(t.exp[((n - t.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Option<FqElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.0 == 0 {
            return FqElem(0);
        }
        let t = &self.inner;
        let n = (t.q - 1) as u64;
        let l = t.log[a.0 as usize] as u64;
        FqElem(t.exp[((l * (e % n)) % n) as usize])
    }

    /// Frobenius `a -> a^p`.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        self.pow(a, self.inner.p as u64)
    }

    /// The unique `b` with `b^{p^m} = a` (the field is perfect).
    pub fn frobenius_root(&self, a: FqElem, m: u32) -> FqElem {
        let f = self.inner.f;
        let k = (f - m % f) % f;
        self.pow(a, (self.inner.p as u64).pow(k))
    }
}

impl Ring for Fq {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem::ZERO
    }
    fn one(&self) -> FqElem {
        FqElem::ONE
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        Fq::add(self, *a, *b)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        Fq::neg(self, *a)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        Fq::mul(self, *a, *b)
    }
    fn is_unit(&self, a: &FqElem) -> bool {
        !a.is_zero()
    }
    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        Fq::inv(self, *a)
    }
    fn from_int(&self, n: i64) -> FqElem {
        self.from_i64(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli_are_fields() {
        for &(p, f, _) in DEFAULT_MODULI {
            let k = Fq::with_default_modulus(p, f).unwrap();
            assert_eq!(k.q(), p.pow(f));
            for a in k.elements().skip(1) {
                assert_eq!(k.mul(a, k.inv(a).unwrap()), FqElem::ONE);
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(matches!(Fq::new(2, vec![1, 0, 1]), Err(Error::InvalidField(_))));
        assert!(Fq::new(4, vec![0, 1]).is_err());
    }

    #[test]
    fn table_multiplication_matches_polynomial_multiplication() {
        let k = Fq::with_default_modulus(3, 2).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                let expect = raw_mul_code(a.code(), b.code(), 3, 2, k.modulus());
                assert_eq!(k.mul(a, b).code(), expect);
            }
        }
    }

    #[test]
    fn frobenius_root_inverts_frobenius() {
        let k = Fq::with_default_modulus(2, 2).unwrap();
        let c = k.elem(2);
        // In F_4, c^{1/2} = c^2.
        assert_eq!(k.frobenius_root(c, 1), k.mul(c, c));
        for m in 0..4 {
            for a in k.elements() {
                let r = k.frobenius_root(a, m);
                assert_eq!(k.pow(r, 2u64.pow(m)), a);
            }
        }
    }

    #[test]
    fn add_and_neg_are_consistent() {
        let k = Fq::of_order(25).unwrap();
        for a in k.elements() {
            assert_eq!(k.add(a, k.neg(a)), FqElem::ZERO);
            let mut s = FqElem::ZERO;
            for _ in 0..5 {
                s = k.add(s, a);
            }
            assert_eq!(s, FqElem::ZERO);
        }
    }
}
