//! Logarithmic-derivative groups and the Picard-order computation for
//! descent presentations `(k, m, c)`, together with the divisor and
//! ramification maps of the purely inseparable extension
//! `k[s^{±1}] -> k[t^{±1}]`, `s = t^{p^m}`.
//!
//! A descent presentation fixes the standard derivation `d` of rank
//! `p^m - 1` on `k[t^{±1}]` and its extension `d'` to `k[t^{±1}][z]` with
//! `d'(z) = c z`. The class of `c` in `L_C / L'_C` generates that group, and
//! the group is isomorphic to the Picard group of the twisted disc whose
//! graded reduction carries this presentation; [`DescentPresentation::class_order`]
//! therefore returns that Picard order.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{frobenius_descend, poly_factor, Fq, FqPoly, LaurentPoly};
use crate::hasse::{HigherDerivation, Trunc};
use crate::trunc::TruncElem;

/// A logarithmic derivative `d(f)/f`, kept with the element it came from
/// when one is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDerivElem {
    pub value: Trunc,
    pub witness: Option<LaurentPoly>,
}

/// `d(f)/f`, computed inside the truncation with exact division by `f`.
pub fn log_derivative(hd: &HigherDerivation, f: &LaurentPoly) -> Result<LogDerivElem> {
    let value = integral_ratio(hd, f)?.ok_or_else(|| {
        Error::NotIntegralLogDerivative(format!("d({f})/({f}) has a non-integral coefficient"))
    })?;
    Ok(LogDerivElem { value, witness: Some(f.clone()) })
}

/// `Some(d(f)/f)` when every coefficient of `d(f)` is divisible by `f`.
fn integral_ratio(hd: &HigherDerivation, f: &LaurentPoly) -> Result<Option<Trunc>> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("logarithmic derivative of zero".into()));
    }
    let k = hd.field();
    let image = hd.apply(f)?;
    let mut coeffs = Vec::with_capacity(image.rank() + 1);
    for c in image.coeffs() {
        match c.div_exact(f, k) {
            Some(q) => coeffs.push(q),
            None => return Ok(None),
        }
    }
    let value = TruncElem::new(coeffs);
    if !value.is_unit(&hd.ring()) {
        return Ok(None);
    }
    Ok(Some(value))
}

/// The group `L'` of logarithmic derivatives of units `c t^i`: the powers
/// of `d(t)/t`, listed from the identity.
pub fn unit_log_group(hd: &HigherDerivation) -> Result<Vec<LogDerivElem>> {
    let ring = hd.ring();
    let w = log_derivative(hd, &LaurentPoly::t())?.value;
    // Principal units of the truncation have exponent p^n.
    let bound = (hd.field().p() as u64).pow(hd.exponent());
    let mut out = vec![LogDerivElem { value: TruncElem::one(&ring, hd.rank()), witness: Some(LaurentPoly::one()) }];
    let mut cur = w.clone();
    for i in 1..=bound {
        if cur.is_one(&ring) {
            return Ok(out);
        }
        out.push(LogDerivElem { value: cur.clone(), witness: Some(LaurentPoly::t_pow(i as i64)) });
        cur = cur.mul(&w, &ring)?;
    }
    Err(Error::Internal("d(t)/t has no finite order".into()))
}

/// Result of writing `d'(f)/f` as `c^j (d(t)/t)^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    Unit { j: u64, i: u64 },
    NotAUnitClass,
}

/// The datum `(k, m, c)`: the standard derivation of rank `p^m - 1` on
/// `k[t^{±1}]`, extended to `k[t^{±1}][z]` by `d'(z) = c z`.
#[derive(Clone, Debug)]
pub struct DescentPresentation {
    base: HigherDerivation,
    extended: HigherDerivation,
    c: Trunc,
    m_exp: u32,
    /// Values of `L'`, indexed by exponent of `d(t)/t`.
    lprime: Vec<Trunc>,
}

impl DescentPresentation {
    pub fn new(field: &Fq, m_exp: u32, c: Trunc) -> Result<DescentPresentation> {
        let base = HigherDerivation::standard(field, m_exp)?;
        let extended = base.extend_to_disc(&c)?;
        let lprime = unit_log_group(&extended)?.into_iter().map(|l| l.value).collect();
        Ok(DescentPresentation { base, extended, c, m_exp, lprime })
    }

    /// Infers `m` from the rank `p^m - 1` of `c`.
    pub fn from_datum(field: &Fq, c: Trunc) -> Result<DescentPresentation> {
        let size = c.rank() as u64 + 1;
        let p = field.p() as u64;
        let mut m_exp = 0;
        let mut pm = 1;
        while pm < size {
            pm *= p;
            m_exp += 1;
        }
        if pm != size || m_exp == 0 {
            return Err(Error::InvalidArgument(format!("rank {} is not of the form p^m - 1", c.rank())));
        }
        DescentPresentation::new(field, m_exp, c)
    }

    pub fn base(&self) -> &HigherDerivation {
        &self.base
    }

    pub fn derivation(&self) -> &HigherDerivation {
        &self.extended
    }

    pub fn c(&self) -> &Trunc {
        &self.c
    }

    pub fn m_exp(&self) -> u32 {
        self.m_exp
    }

    /// `p^m`.
    pub fn p_power(&self) -> u64 {
        (self.base.field().p() as u64).pow(self.m_exp)
    }

    pub fn lprime(&self) -> &[Trunc] {
        &self.lprime
    }

    /// Least `j >= 1` with `c^j` in `L'`; a divisor of `p^m`.
    pub fn class_order(&self) -> u64 {
        let ring = self.extended.ring();
        let mut cur = self.c.clone();
        for j in 1..=self.p_power() {
            if self.lprime.contains(&cur) {
                return j;
            }
            cur = cur.mul(&self.c, &ring).expect("same rank");
        }
        unreachable!("c^(p^m) = 1 lies in L'")
    }

    /// Writes `d'(f)/f = c^j (d(t)/t)^i` with `0 <= i, j < p^m` by exhaustive
    /// search, or reports that `d'(f)/f` is not a unit of the truncation.
    pub fn decompose(&self, f: &LaurentPoly) -> Result<Decomposition> {
        let ring = self.extended.ring();
        let Some(ratio) = integral_ratio(&self.extended, f)? else {
            return Ok(Decomposition::NotAUnitClass);
        };
        let index: HashMap<&Trunc, u64> = self.lprime.iter().zip(0u64..).collect();
        let c_inv = self.c.inv(&ring)?;
        let mut cur = ratio;
        for j in 0..self.p_power() {
            if let Some(&i) = index.get(&cur) {
                return Ok(Decomposition::Unit { j, i });
            }
            cur = cur.mul(&c_inv, &ring)?;
        }
        Err(Error::Internal(format!("d'({f})/({f}) is integral but not in <c> L'")))
    }

    /// `c^j (d(t)/t)^i`.
    pub fn reconstruct(&self, j: u64, i: u64) -> Trunc {
        let ring = self.extended.ring();
        let w = &self.lprime[(i % self.lprime.len() as u64) as usize];
        self.c.pow(j, &ring).mul(w, &ring).expect("same rank")
    }
}

/// Picard order of the presentation with datum `c` over `field`.
pub fn class_order(field: &Fq, c: &Trunc) -> Result<u64> {
    Ok(DescentPresentation::from_datum(field, c.clone())?.class_order())
}

/// A divisor on `Spec k[t^{±1}]`: monic irreducible polynomials other than
/// `t` with nonzero multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Divisor {
    terms: BTreeMap<FqPoly, i64>,
}

impl Divisor {
    pub fn new() -> Divisor {
        Divisor::default()
    }

    /// Accumulates `mult * (prime)`; the caller guarantees `prime` is monic
    /// irreducible and different from `t`.
    pub fn add_prime(&mut self, prime: FqPoly, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.terms.entry(prime.clone()).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&prime);
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (FqPoly, i64)>) -> Divisor {
        let mut d = Divisor::new();
        for (p, m) in terms {
            d.add_prime(p, m);
        }
        d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FqPoly, &i64)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, prime: &FqPoly) -> i64 {
        self.terms.get(prime).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, &m) in &other.terms {
            out.add_prime(p.clone(), m);
        }
        out
    }

    pub fn neg(&self) -> Divisor {
        Divisor { terms: self.terms.iter().map(|(p, &m)| (p.clone(), -m)).collect() }
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }
}

impl std::fmt::Display for Divisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, m)| format!("{m}*({p})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Divisor of a nonzero element of `k[t^{±1}]`; powers of `t` and scalars
/// are units and contribute nothing.
pub fn divisor(field: &Fq, f: &LaurentPoly) -> Result<Divisor> {
    if f.is_zero() {
        return Err(Error::ZeroFactorization);
    }
    let (_, g) = f
        .split_t_power()
        .ok_or_else(|| Error::InvalidArgument("divisor expects an element of k[t^{±1}]".into()))?;
    let fact = poly_factor(&g, field)?;
    Ok(Divisor::from_terms(fact.factors.into_iter().map(|(p, e)| (p, e as i64))))
}

/// Pushes a divisor on `k[s^{±1}]` to `k[t^{±1}]` along `s = t^{p^m}`: the
/// prime `g(s)` has the single prime `h(t)` above it, where
/// `h^{p^m} = g(t^{p^m})`, with ramification index `p^m`.
pub fn ramification_map(field: &Fq, d: &Divisor, m: u32) -> Result<Divisor> {
    let e = (field.p() as i64).pow(m);
    let mut out = Divisor::new();
    for (g, &mult) in d.terms() {
        out.add_prime(frobenius_descend(g, m, field)?, mult * e);
    }
    Ok(out)
}

/// `D' -> d(x_D)/x_D` where `div(x_D) = j(D')`. For `k[t^{±1}]` both class
/// groups vanish, so the value always lies in `L'`; this is checked.
pub fn phi_map(hd: &HigherDerivation, d: &Divisor) -> Result<LogDerivElem> {
    let k = hd.field();
    let ring = hd.ring();
    let size = hd.rank() as u64 + 1;
    let m = hd.exponent();
    if (k.p() as u64).pow(m) != size {
        return Err(Error::InvalidArgument("rank must be p^m - 1".into()));
    }
    let jd = ramification_map(k, d, m)?;
    let mut num = FqPoly::one();
    let mut den = FqPoly::one();
    for (h, &mult) in jd.terms() {
        let power = h.pow(mult.unsigned_abs(), k);
        if mult > 0 {
            num = num.mul(&power, k);
        } else {
            den = den.mul(&power, k);
        }
    }
    let num = LaurentPoly::from_poly(&num);
    let den = LaurentPoly::from_poly(&den);
    if divisor(k, &num)?.sub(&divisor(k, &den)?) != jd {
        return Err(Error::Internal("reconstruction of x_D failed".into()));
    }
    let ln = log_derivative(hd, &num)?;
    let ld = log_derivative(hd, &den)?;
    let value = ln.value.mul(&ld.value.inv(&ring)?, &ring)?;
    let lprime = unit_log_group(hd)?;
    if !lprime.iter().any(|l| l.value == value) {
        return Err(Error::Internal("phi value outside L'".into()));
    }
    let witness = den.is_one().then_some(num);
    Ok(LogDerivElem { value, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{parse_laurent, FqElem};
    use crate::trunc::parse_trunc;

    fn tr(s: &str, k: &Fq, m: usize) -> Trunc {
        parse_trunc(s, k, m, true).unwrap()
    }

    fn lp(s: &str, k: &Fq) -> LaurentPoly {
        parse_laurent(s, k, true).unwrap()
    }

    fn poly(k: &Fq, c: &[u32]) -> FqPoly {
        FqPoly::new(c.iter().map(|&x| k.elem(x)).collect())
    }

    #[test]
    fn log_derivative_examples() {
        let k = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        assert_eq!(log_derivative(&d, &LaurentPoly::t()).unwrap().value, tr("1 + t^-1*T", &k, 1));
        assert!(log_derivative(&d, &LaurentPoly::one()).unwrap().value.is_one(&d.ring()));
        let e = d.extend_to_disc(&tr("1 + T", &k, 1)).unwrap();
        assert_eq!(log_derivative(&e, &LaurentPoly::z()).unwrap().value, tr("1 + T", &k, 1));
        assert!(matches!(log_derivative(&d, &lp("t + 1", &k)), Err(Error::NotIntegralLogDerivative(_))));
        assert!(log_derivative(&d, &LaurentPoly::zero()).is_err());
        // (t+1)^2 is a constant
        assert!(log_derivative(&d, &lp("t^2 + 1", &k)).unwrap().value.is_one(&d.ring()));
    }

    #[test]
    fn unit_log_group_examples() {
        let k2 = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k2, 1).unwrap();
        let g: Vec<Trunc> = unit_log_group(&d).unwrap().into_iter().map(|l| l.value).collect();
        assert_eq!(g, vec![tr("1", &k2, 1), tr("1 + t^-1*T", &k2, 1)]);
        let k3 = Fq::prime(3).unwrap();
        let d = HigherDerivation::standard(&k3, 1).unwrap();
        let g: Vec<Trunc> = unit_log_group(&d).unwrap().into_iter().map(|l| l.value).collect();
        let w = tr("1 + t^-1*T", &k3, 2);
        assert_eq!(g, vec![tr("1", &k3, 2), w.clone(), w.mul(&w, &d.ring()).unwrap()]);
    }

    #[test]
    fn unit_log_group_size_and_closure() {
        for (p, m) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let k = Fq::prime(p).unwrap();
            let d = HigherDerivation::standard(&k, m).unwrap();
            let g: Vec<Trunc> = unit_log_group(&d).unwrap().into_iter().map(|l| l.value).collect();
            assert_eq!(g.len() as u64, (p as u64).pow(m));
            for a in &g {
                for b in &g {
                    assert!(g.contains(&a.mul(b, &d.ring()).unwrap()));
                }
            }
        }
    }

    #[test]
    fn class_order_examples() {
        let k = Fq::prime(2).unwrap();
        assert_eq!(class_order(&k, &tr("1", &k, 1)).unwrap(), 1);
        assert_eq!(class_order(&k, &tr("1 + t^-1*T", &k, 1)).unwrap(), 1);
        assert_eq!(class_order(&k, &tr("1 + T", &k, 1)).unwrap(), 2);
        assert_eq!(class_order(&k, &tr("t + T", &k, 1)), Err(Error::ConstantTermNotOne));
        assert!(class_order(&k, &tr("1", &k, 2)).is_err());
    }

    #[test]
    fn class_order_of_one_plus_t_is_sharp() {
        for (p, m) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2)] {
            let k = Fq::prime(p).unwrap();
            let rank = (p.pow(m) - 1) as usize;
            assert_eq!(class_order(&k, &tr("1 + T", &k, rank)).unwrap(), (p as u64).pow(m));
        }
    }

    #[test]
    fn decompose_examples() {
        let k = Fq::prime(2).unwrap();
        let pres = DescentPresentation::new(&k, 1, tr("1 + T", &k, 1)).unwrap();
        assert_eq!(pres.decompose(&LaurentPoly::z()).unwrap(), Decomposition::Unit { j: 1, i: 0 });
        assert_eq!(pres.decompose(&lp("t^3*z^2", &k)).unwrap(), Decomposition::Unit { j: 0, i: 1 });
        assert_eq!(pres.decompose(&lp("t + z", &k)).unwrap(), Decomposition::NotAUnitClass);
        assert!(pres.decompose(&LaurentPoly::zero()).is_err());
        let k3 = Fq::prime(3).unwrap();
        let pres = DescentPresentation::new(&k3, 1, tr("1 + T + t*T^2", &k3, 2)).unwrap();
        assert_eq!(pres.decompose(&lp("t^3*z^2", &k3)).unwrap(), Decomposition::Unit { j: 2, i: 0 });
        assert_eq!(pres.decompose(&lp("2*t^4*z^2", &k3)).unwrap(), Decomposition::Unit { j: 2, i: 1 });
    }

    #[test]
    fn divisor_examples() {
        let k = Fq::prime(2).unwrap();
        let d = divisor(&k, &lp("t^2*(t + 1)", &k)).unwrap();
        assert_eq!(d, Divisor::from_terms([(poly(&k, &[1, 1]), 1)]));
        assert!(divisor(&k, &lp("t^-5", &k)).unwrap().is_zero());
        let d = divisor(&k, &lp("(t + 1)^2*(t^2 + t + 1)", &k)).unwrap();
        assert_eq!(d, Divisor::from_terms([(poly(&k, &[1, 1]), 2), (poly(&k, &[1, 1, 1]), 1)]));
        assert_eq!(divisor(&k, &LaurentPoly::zero()), Err(Error::ZeroFactorization));
    }

    #[test]
    fn ramification_examples() {
        let k = Fq::prime(2).unwrap();
        let d = Divisor::from_terms([(poly(&k, &[1, 1]), 1)]);
        assert_eq!(ramification_map(&k, &d, 1).unwrap(), Divisor::from_terms([(poly(&k, &[1, 1]), 2)]));
        assert!(ramification_map(&k, &Divisor::new(), 1).unwrap().is_zero());
        let d = Divisor::from_terms([(poly(&k, &[1, 1, 1]), 1)]);
        let j = ramification_map(&k, &d, 1).unwrap();
        assert_eq!(j, Divisor::from_terms([(poly(&k, &[1, 1, 1]), 2)]));
        // h(t)^2 = g(t^2)
        let h = poly(&k, &[1, 1, 1]);
        assert_eq!(h.pow(2, &k), poly(&k, &[1, 1, 1]).inflate(2));
    }

    #[test]
    fn phi_examples() {
        let k = Fq::prime(2).unwrap();
        let d = HigherDerivation::standard(&k, 1).unwrap();
        assert!(phi_map(&d, &Divisor::new()).unwrap().value.is_one(&d.ring()));
        let dp = Divisor::from_terms([(poly(&k, &[1, 1]), 1)]);
        let phi = phi_map(&d, &dp).unwrap();
        assert!(phi.value.is_one(&d.ring()));
        assert_eq!(phi.witness, Some(lp("t^2 + 1", &k)));
        let f4 = Fq::of_order(4).unwrap();
        let d4 = HigherDerivation::standard(&f4, 2).unwrap();
        let g = FqPoly::new(vec![f4.elem(2), FqElem::ONE]);
        let dp = Divisor::from_terms([(g, -3)]);
        assert!(phi_map(&d4, &dp).unwrap().value.is_one(&d4.ring()));
    }
}
