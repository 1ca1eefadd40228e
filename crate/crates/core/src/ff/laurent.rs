//! Laurent polynomials `k[t^{±1}]` and `k[t^{±1}][z]`.

use std::collections::BTreeMap;
use std::fmt;

use super::field::{Fq, FqElem};
use super::poly::FqPoly;
use crate::ring::Ring;

/// Exponent pair of `t^t z^z`; ordered by `z` first, then `t`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial {
    pub z: u32,
    pub t: i64,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { z: 0, t: 0 };

    pub fn new(t: i64, z: u32) -> Monomial {
        Monomial { z, t }
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial { z: self.z + other.z, t: self.t + other.t }
    }
}

/// Finite-support map from monomials to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, FqElem>,
}

pub(crate) fn format_term(c: FqElem, vars: &[(&str, i64)]) -> String {
    let mut parts = Vec::new();
    let has_var = vars.iter().any(|(_, e)| *e != 0);
    if !has_var || c != FqElem::ONE {
        parts.push(c.to_string());
    }
    for (name, e) in vars {
        match e {
            0 => {}
            1 => parts.push((*name).to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly::default()
    }

    pub fn one() -> LaurentPoly {
        LaurentPoly::monomial(FqElem::ONE, 0, 0)
    }

    pub fn constant(c: FqElem) -> LaurentPoly {
        LaurentPoly::monomial(c, 0, 0)
    }

    pub fn monomial(c: FqElem, t: i64, z: u32) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(t, z), c);
        }
        LaurentPoly { terms }
    }

    pub fn t() -> LaurentPoly {
        LaurentPoly::monomial(FqElem::ONE, 1, 0)
    }

    pub fn t_pow(i: i64) -> LaurentPoly {
        LaurentPoly::monomial(FqElem::ONE, i, 0)
    }

    pub fn z() -> LaurentPoly {
        LaurentPoly::monomial(FqElem::ONE, 0, 1)
    }

    /// Builds from `(t, z, coeff)` triples, summing repeated monomials.
    pub fn from_terms(k: &Fq, terms: impl IntoIterator<Item = (i64, u32, FqElem)>) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (t, z, c) in terms {
            out.add_term(Monomial::new(t, z), c, k);
        }
        out
    }

    pub fn from_poly(g: &FqPoly) -> LaurentPoly {
        LaurentPoly {
            terms: g
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, &c)| (Monomial::new(i as i64, 0), c))
                .collect(),
        }
    }

    /// The ordinary polynomial this element equals, if it has no `z` and no
    /// negative powers of `t`.
    pub fn to_poly(&self) -> Option<FqPoly> {
        if self.uses_z() || self.min_t().is_some_and(|m| m < 0) {
            return None;
        }
        let deg = self.max_t().unwrap_or(0).max(0) as usize;
        let mut v = vec![FqElem::ZERO; deg + 1];
        for (m, &c) in &self.terms {
            v[m.t as usize] = c;
        }
        Some(FqPoly::new(v))
    }

    /// For a one-variable element, the factorization `t^s * g(t)` with
    /// `g(0) != 0`; returns `(s, g)`.
    pub fn split_t_power(&self) -> Option<(i64, FqPoly)> {
        if self.is_zero() || self.uses_z() {
            return None;
        }
        let s = self.min_t().unwrap();
        let g = self.shift_t(-s).to_poly()?;
        Some((s, g))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FqElem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: Monomial) -> FqElem {
        self.terms.get(&m).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::ONE) == Some(&FqElem::ONE)
    }

    /// Units of `k[t^{±1}][z]` (and of `k[t^{±1}]`) are exactly the single
    /// terms `c t^i` with `c != 0`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().all(|m| m.z == 0)
    }

    pub fn uses_z(&self) -> bool {
        self.terms.keys().any(|m| m.z > 0)
    }

    pub fn max_z(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.z).max()
    }

    pub fn min_t(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.t).min()
    }

    pub fn max_t(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.t).max()
    }

    fn add_term(&mut self, m: Monomial, c: FqElem, k: &Fq) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert(FqElem::ZERO);
        *entry = k.add(*entry, c);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &LaurentPoly, k: &Fq) -> LaurentPoly {
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, c, k);
        }
        out
    }

    pub fn neg(&self, k: &Fq) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&m, &c)| (m, k.neg(c))).collect() }
    }

    pub fn sub(&self, other: &LaurentPoly, k: &Fq) -> LaurentPoly {
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.add_term(m, k.neg(c), k);
        }
        out
    }

    pub fn scale(&self, c: FqElem, k: &Fq) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(&m, &a)| (m, k.mul(a, c))).collect() }
    }

    /// Multiplication by `t^i z^j`.
    pub fn shift(&self, i: i64, j: u32) -> LaurentPoly {
        let s = Monomial::new(i, j);
        LaurentPoly { terms: self.terms.iter().map(|(&m, &c)| (m.mul(s), c)).collect() }
    }

    pub fn shift_t(&self, i: i64) -> LaurentPoly {
        self.shift(i, 0)
    }

    pub fn mul(&self, other: &LaurentPoly, k: &Fq) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&ma, &ca) in &self.terms {
            for (&mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), k.mul(ca, cb), k);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64, k: &Fq) -> LaurentPoly {
        let mut base = self.clone();
        let mut acc = LaurentPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k);
            }
        }
        acc
    }

    /// Inverse of a unit `c t^i`.
    pub fn inv(&self, k: &Fq) -> Option<LaurentPoly> {
        if !self.is_unit() {
            return None;
        }
        let (&m, &c) = self.terms.iter().next()?;
        Some(LaurentPoly::monomial(k.inv(c)?, -m.t, 0))
    }

    /// `t -> t^n`.
    pub fn inflate_t(&self, n: i64) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&m, &c)| (Monomial::new(m.t * n, m.z), c)).collect(),
        }
    }

    /// Exact quotient `self / d` in `k[t^{±1}][z]`, `None` if `d` does not
    /// divide `self` (or `d` is zero).
    ///
    /// Both operands are shifted by units into `k[t, z]` with a term free of
    /// `t`; there `t` is prime and coprime to the divisor, so divisibility in
    /// the Laurent ring agrees with divisibility in `k[t, z]`, decided by
    /// division with remainder for the lexicographic order `z > t`.
    pub fn div_exact(&self, d: &LaurentPoly, k: &Fq) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        let sa = self.min_t().unwrap();
        let sd = d.min_t().unwrap();
        let mut rem = self.shift_t(-sa);
        let div = d.shift_t(-sd);
        let (&lead_m, &lead_c) = div.terms.iter().next_back().unwrap();
        let lead_inv = k.inv(lead_c)?;
        let mut quo = LaurentPoly::zero();
        while let Some((&m, &c)) = rem.terms.iter().next_back() {
            if m.z < lead_m.z || m.t < lead_m.t {
                return None;
            }
            let qm = Monomial::new(m.t - lead_m.t, m.z - lead_m.z);
            let qc = k.mul(c, lead_inv);
            quo.add_term(qm, qc, k);
            for (&dm, &dc) in &div.terms {
                rem.add_term(dm.mul(qm), k.neg(k.mul(qc, dc)), k);
            }
        }
        Some(quo.shift_t(sa - sd))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, &c)| format_term(c, &[("t", m.t), ("z", m.z as i64)]))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// The ring `k[t^{±1}]`, or `k[t^{±1}][z]` when `with_z` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentRing {
    pub field: Fq,
    pub with_z: bool,
}

impl LaurentRing {
    pub fn one_var(field: Fq) -> LaurentRing {
        LaurentRing { field, with_z: false }
    }

    pub fn two_var(field: Fq) -> LaurentRing {
        LaurentRing { field, with_z: true }
    }

    pub fn contains(&self, a: &LaurentPoly) -> bool {
        self.with_z || !a.uses_z()
    }
}

impl Ring for LaurentRing {
    type Elem = LaurentPoly;

    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero()
    }
    fn one(&self) -> LaurentPoly {
        LaurentPoly::one()
    }
    fn add(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a.add(b, &self.field)
    }
    fn neg(&self, a: &LaurentPoly) -> LaurentPoly {
        a.neg(&self.field)
    }
    fn sub(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a.sub(b, &self.field)
    }
    fn mul(&self, a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        a.mul(b, &self.field)
    }
    fn is_zero(&self, a: &LaurentPoly) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &LaurentPoly) -> bool {
        a.is_unit()
    }
    fn inv(&self, a: &LaurentPoly) -> Option<LaurentPoly> {
        a.inv(&self.field)
    }
    fn from_int(&self, n: i64) -> LaurentPoly {
        LaurentPoly::constant(self.field.from_i64(n))
    }
}
