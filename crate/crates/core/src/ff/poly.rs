//! Dense univariate polynomials over `F_q`.

use std::cmp::Ordering;
use std::fmt;

use super::field::{Fq, FqElem};

/// Dense polynomial, coefficients low to high, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct FqPoly {
    coeffs: Vec<FqElem>,
}

impl Ord for FqPoly {
    /// Degree first, then coefficient codes from the constant term upward.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for FqPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FqPoly {
    pub fn new(mut coeffs: Vec<FqElem>) -> FqPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        FqPoly { coeffs }
    }

    pub fn zero() -> FqPoly {
        FqPoly { coeffs: Vec::new() }
    }

    pub fn one() -> FqPoly {
        FqPoly { coeffs: vec![FqElem::ONE] }
    }

    pub fn x() -> FqPoly {
        FqPoly { coeffs: vec![FqElem::ZERO, FqElem::ONE] }
    }

    pub fn constant(c: FqElem) -> FqPoly {
        FqPoly::new(vec![c])
    }

    pub fn monomial(c: FqElem, deg: usize) -> FqPoly {
        let mut v = vec![FqElem::ZERO; deg + 1];
        v[deg] = c;
        FqPoly::new(v)
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [FqElem::ONE]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == FqElem::ONE
    }

    pub fn add(&self, other: &FqPoly, k: &Fq) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        FqPoly::new((0..n).map(|i| k.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, k: &Fq) -> FqPoly {
        FqPoly { coeffs: self.coeffs.iter().map(|&c| k.neg(c)).collect() }
    }

    pub fn sub(&self, other: &FqPoly, k: &Fq) -> FqPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        FqPoly::new((0..n).map(|i| k.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn scale(&self, c: FqElem, k: &Fq) -> FqPoly {
        FqPoly::new(self.coeffs.iter().map(|&a| k.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &FqPoly, k: &Fq) -> FqPoly {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero();
        }
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        FqPoly::new(out)
    }

    pub fn pow(&self, mut e: u64, k: &Fq) -> FqPoly {
        let mut base = self.clone();
        let mut acc = FqPoly::one();
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

    /// Quotient and remainder; `None` when dividing by zero.
    pub fn div_rem(&self, d: &FqPoly, k: &Fq) -> Option<(FqPoly, FqPoly)> {
        let dd = d.degree()?;
        let lead_inv = k.inv(d.lead())?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Some((FqPoly::zero(), self.clone()));
        }
        let mut quo = vec![FqElem::ZERO; r.len() - dd];
        for top in (dd..r.len()).rev() {
            let c = k.mul(r[top], lead_inv);
            if c.is_zero() {
                continue;
            }
            let shift = top - dd;
            quo[shift] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                r[shift + i] = k.sub(r[shift + i], k.mul(c, di));
            }
        }
        r.truncate(dd);
        Some((FqPoly::new(quo), FqPoly::new(r)))
    }

    pub fn rem(&self, d: &FqPoly, k: &Fq) -> FqPoly {
        self.div_rem(d, k).expect("division by zero polynomial").1
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &FqPoly, k: &Fq) -> Option<FqPoly> {
        let (q, r) = self.div_rem(d, k)?;
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, k: &Fq) -> FqPoly {
        match k.inv(self.lead()) {
            Some(inv) => self.scale(inv, k),
            None => FqPoly::zero(),
        }
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(&self, other: &FqPoly, k: &Fq) -> FqPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, k);
            a = b;
            b = r;
        }
        a.monic(k)
    }

    pub fn derivative(&self, k: &Fq) -> FqPoly {
        FqPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| k.mul(c, k.from_i64(i as i64)))
                .collect(),
        )
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &FqPoly, k: &Fq) -> FqPoly {
        let mut base = self.rem(m, k);
        let mut acc = FqPoly::one().rem(m, k);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, k).rem(m, k);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, k).rem(m, k);
            }
        }
        acc
    }

    pub fn eval(&self, x: FqElem, k: &Fq) -> FqElem {
        self.coeffs.iter().rev().fold(FqElem::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    /// `g(t) -> g(t^n)`.
    pub fn inflate(&self, n: usize) -> FqPoly {
        if self.is_zero() {
            return FqPoly::zero();
        }
        let mut out = vec![FqElem::ZERO; (self.coeffs.len() - 1) * n + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * n] = c;
        }
        FqPoly::new(out)
    }

    /// Applies a map to each coefficient.
    pub fn map_coeffs(&self, f: impl Fn(FqElem) -> FqElem) -> FqPoly {
        FqPoly::new(self.coeffs.iter().map(|&c| f(c)).collect())
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| super::laurent::format_term(*c, &[(var, i as i64)]))
            .collect();
        terms.join(" + ")
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(k: &Fq, c: &[u32]) -> FqPoly {
        FqPoly::new(c.iter().map(|&x| k.elem(x)).collect())
    }

    #[test]
    fn division_identity() {
        let k = Fq::prime(5).unwrap();
        let a = poly(&k, &[1, 2, 3, 4, 1, 2]);
        let d = poly(&k, &[3, 0, 2]);
        let (q, r) = a.div_rem(&d, &k).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(q.mul(&d, &k).add(&r, &k), a);
    }

    #[test]
    fn gcd_is_monic_common_divisor() {
        let k = Fq::prime(3).unwrap();
        let g = poly(&k, &[1, 1]);
        let a = g.mul(&poly(&k, &[1, 0, 1]), &k);
        let b = g.mul(&poly(&k, &[1, 2]), &k).scale(k.elem(2), &k);
        assert_eq!(a.gcd(&b, &k), g);
    }

    #[test]
    fn ordering_is_degree_then_coefficients() {
        let k = Fq::prime(2).unwrap();
        let mut v = vec![poly(&k, &[1, 1, 1]), poly(&k, &[1, 1]), poly(&k, &[0, 1])];
        v.sort();
        assert_eq!(v, vec![poly(&k, &[0, 1]), poly(&k, &[1, 1]), poly(&k, &[1, 1, 1])]);
    }

    #[test]
    fn display() {
        let k = Fq::prime(3).unwrap();
        assert_eq!(poly(&k, &[1, 0, 2]).to_string(), "1 + 2*t^2");
        assert_eq!(FqPoly::zero().to_string(), "0");
    }
}
