//! Truncated power series in up to three variables over a ramified field.
//! Terms of total degree above the cap are discarded by every operation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{RamifiedElem, RamifiedField};

/// Exponent vector; unused trailing variables carry exponent 0.
pub type Mono = [u32; 3];

pub const MAX_VARS: usize = 3;

fn degree(m: &Mono) -> u32 {
    m.iter().sum()
}

fn mono_add(a: &Mono, b: &Mono) -> Mono {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[derive(Clone)]
pub struct PowSeries {
    field: RamifiedField,
    nvars: usize,
    cap: u32,
    /// Exact zeros are never stored.
    terms: BTreeMap<Mono, RamifiedElem>,
}

/// First coefficient at which two series disagree.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub exponent: Mono,
    pub left: Option<RamifiedElem>,
    pub right: Option<RamifiedElem>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |c: &Option<RamifiedElem>| c.as_ref().map_or("0".to_string(), |c| c.to_string());
        write!(f, "coefficient {:?}: {} vs {}", self.exponent, show(&self.left), show(&self.right))
    }
}

impl PowSeries {
    pub fn zero(field: &RamifiedField, nvars: usize, cap: u32) -> PowSeries {
        assert!((1..=MAX_VARS).contains(&nvars), "1 to 3 variables");
        PowSeries { field: field.clone(), nvars, cap, terms: BTreeMap::new() }
    }

    pub fn constant(field: &RamifiedField, nvars: usize, cap: u32, c: RamifiedElem) -> PowSeries {
        let mut s = PowSeries::zero(field, nvars, cap);
        s.set([0; 3], c);
        s
    }

    /// The `i`-th variable.
    pub fn var(field: &RamifiedField, nvars: usize, cap: u32, i: usize) -> PowSeries {
        assert!(i < nvars);
        let mut s = PowSeries::zero(field, nvars, cap);
        let mut m = [0; 3];
        m[i] = 1;
        s.set(m, field.one());
        s
    }

    /// Univariate series from coefficients indexed by degree.
    pub fn from_coeffs(field: &RamifiedField, cap: u32, coeffs: Vec<RamifiedElem>) -> PowSeries {
        let mut s = PowSeries::zero(field, 1, cap);
        for (i, c) in coeffs.into_iter().enumerate() {
            s.set([i as u32, 0, 0], c);
        }
        s
    }

    pub fn field(&self) -> &RamifiedField {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &RamifiedElem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Mono) -> Option<&RamifiedElem> {
        self.terms.get(&m)
    }

    /// Coefficient with absent terms read as exact zero.
    pub fn coeff_or_zero(&self, m: Mono) -> RamifiedElem {
        self.terms.get(&m).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// Stores `c` at `m`, dropping exact zeros and terms above the cap.
    pub fn set(&mut self, m: Mono, c: RamifiedElem) {
        debug_assert!(m[self.nvars..].iter().all(|&x| x == 0));
        if degree(&m) > self.cap {
            return;
        }
        if c.is_zero() && c.is_exact() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    pub fn with_cap(&self, cap: u32) -> PowSeries {
        let mut s = PowSeries::zero(&self.field, self.nvars, cap);
        for (m, c) in &self.terms {
            s.set(*m, c.clone());
        }
        s
    }

    /// Terms of total degree `< d`.
    pub fn below_degree(&self, d: u32) -> PowSeries {
        let mut s = PowSeries::zero(&self.field, self.nvars, self.cap);
        for (m, c) in &self.terms {
            if degree(m) < d {
                s.set(*m, c.clone());
            }
        }
        s
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous(&self, d: u32) -> impl Iterator<Item = (&Mono, &RamifiedElem)> {
        self.terms.iter().filter(move |(m, _)| degree(m) == d)
    }

    pub fn constant_term(&self) -> RamifiedElem {
        self.coeff_or_zero([0; 3])
    }

    fn same_shape(&self, other: &PowSeries) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
    }

    pub fn add(&self, other: &PowSeries) -> PowSeries {
        self.same_shape(other);
        let mut out = self.with_cap(self.cap.min(other.cap));
        for (m, c) in &other.terms {
            let sum = match out.terms.get(m) {
                Some(a) => a.add(c),
                None => c.clone(),
            };
            out.set(*m, sum);
        }
        out
    }

    pub fn neg(&self) -> PowSeries {
        PowSeries {
            field: self.field.clone(),
            nvars: self.nvars,
            cap: self.cap,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &PowSeries) -> PowSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &RamifiedElem) -> PowSeries {
        let mut out = PowSeries::zero(&self.field, self.nvars, self.cap);
        for (m, c) in &self.terms {
            out.set(*m, c.mul(k));
        }
        out
    }

    pub fn mul(&self, other: &PowSeries) -> PowSeries {
        self.same_shape(other);
        let cap = self.cap.min(other.cap);
        let mut acc: BTreeMap<Mono, RamifiedElem> = BTreeMap::new();
        for (ma, a) in &self.terms {
            let da = degree(ma);
            if da > cap {
                continue;
            }
            for (mb, b) in &other.terms {
                if da + degree(mb) > cap {
                    continue;
                }
                let m = mono_add(ma, mb);
                let prod = a.mul(b);
                match acc.get_mut(&m) {
                    Some(x) => *x = x.add(&prod),
                    None => {
                        acc.insert(m, prod);
                    }
                }
            }
        }
        let mut out = PowSeries::zero(&self.field, self.nvars, cap);
        for (m, c) in acc {
            out.set(m, c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> PowSeries {
        let mut acc = PowSeries::constant(&self.field, self.nvars, self.cap, self.field.one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(args[0], ..., args[nvars-1])`; every argument must have zero
    /// constant term and the same variable count.
    pub fn compose(&self, args: &[PowSeries]) -> Result<PowSeries> {
        if args.len() != self.nvars {
            return Err(Error::InvalidArgument(format!(
                "composition needs {} arguments, got {}",
                self.nvars,
                args.len()
            )));
        }
        let target = args[0].nvars;
        let mut cap = self.cap;
        for g in args {
            if g.nvars != target {
                return Err(Error::InvalidArgument("composition arguments differ in variable count".into()));
            }
            if g.terms.contains_key(&[0; 3]) && !g.constant_term().is_zero() {
                return Err(Error::InvalidArgument("composition argument has nonzero constant term".into()));
            }
            cap = cap.min(g.cap);
        }
        let args: Vec<PowSeries> = args.iter().map(|g| g.with_cap(cap)).collect();
        let last = self.nvars - 1;
        let max_last = self.terms.keys().map(|m| m[last]).max().unwrap_or(0).min(cap);
        let mut powers = vec![PowSeries::constant(&self.field, target, cap, self.field.one())];
        for i in 1..=max_last as usize {
            let next = powers[i - 1].mul(&args[last]);
            powers.push(next);
        }
        let terms: Vec<(Mono, RamifiedElem)> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        Ok(self.compose_rec(&terms, 0, &args, &powers, target, cap))
    }

    fn compose_rec(
        &self,
        terms: &[(Mono, RamifiedElem)],
        var: usize,
        args: &[PowSeries],
        last_powers: &[PowSeries],
        target: usize,
        cap: u32,
    ) -> PowSeries {
        let mut out = PowSeries::zero(&self.field, target, cap);
        if var == self.nvars - 1 {
            for (m, c) in terms {
                if let Some(pw) = last_powers.get(m[var] as usize) {
                    out = out.add(&pw.scale(c));
                }
            }
            return out;
        }
        let mut groups: BTreeMap<u32, Vec<(Mono, RamifiedElem)>> = BTreeMap::new();
        for (m, c) in terms {
            groups.entry(m[var]).or_default().push((*m, c.clone()));
        }
        let top = match groups.keys().next_back() {
            Some(&t) => t.min(cap),
            None => return out,
        };
        for a in (0..=top).rev() {
            out = out.mul(&args[var]);
            if let Some(g) = groups.get(&a) {
                out = out.add(&self.compose_rec(g, var + 1, args, last_powers, target, cap));
            }
        }
        out
    }

    /// Multiplicative inverse of a univariate series with unit constant term.
    pub fn inverse(&self) -> Result<PowSeries> {
        if self.nvars != 1 {
            return Err(Error::InvalidArgument("series inverse is univariate".into()));
        }
        let a0_inv = self.constant_term().inv()?;
        let mut b: Vec<RamifiedElem> = vec![a0_inv.clone()];
        for n in 1..=self.cap {
            let mut s = self.field.zero();
            for k in 1..=n {
                if let Some(a) = self.terms.get(&[k, 0, 0]) {
                    s = s.add(&a.mul(&b[(n - k) as usize]));
                }
            }
            b.push(s.mul(&a0_inv).neg());
        }
        Ok(PowSeries::from_coeffs(&self.field, self.cap, b))
    }

    /// First disagreement at the tracked precision, scanning up to the
    /// smaller cap.
    pub fn first_mismatch(&self, other: &PowSeries) -> Option<Mismatch> {
        let cap = self.cap.min(other.cap);
        let keys: std::collections::BTreeSet<Mono> =
            self.terms.keys().chain(other.terms.keys()).filter(|m| degree(m) <= cap).copied().collect();
        let mut keys: Vec<Mono> = keys.into_iter().collect();
        keys.sort_by_key(|m| (degree(m), *m));
        for m in keys {
            let a = self.coeff_or_zero(m);
            let b = other.coeff_or_zero(m);
            if !a.approx_eq(&b) {
                return Some(Mismatch { exponent: m, left: self.terms.get(&m).cloned(), right: other.terms.get(&m).cloned() });
            }
        }
        None
    }

    pub fn approx_eq(&self, other: &PowSeries) -> bool {
        self.first_mismatch(other).is_none()
    }

    /// Smallest absolute precision among stored coefficients.
    pub fn min_precision(&self) -> Option<i64> {
        self.terms.values().filter(|c| !c.is_exact()).map(|c| c.prec()).min()
    }

    /// Terms not indistinguishable from zero.
    pub fn significant_terms(&self) -> impl Iterator<Item = (&Mono, &RamifiedElem)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero())
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        let mut keys: Vec<&Mono> = self.terms.keys().collect();
        keys.sort_by_key(|m| (degree(m), std::cmp::Reverse(**m)));
        let mut parts = Vec::new();
        for m in keys {
            let c = &self.terms[m];
            if c.is_zero() {
                continue;
            }
            let mut mon = Vec::new();
            for (i, &x) in m.iter().enumerate().take(self.nvars) {
                match x {
                    0 => {}
                    1 => mon.push(names[i].to_string()),
                    _ => mon.push(format!("{}^{x}", names[i])),
                }
            }
            let cs = c.to_string();
            let part = if mon.is_empty() {
                cs
            } else if cs == "1" {
                mon.join("*")
            } else if cs.contains(' ') || cs.contains('/') {
                format!("({cs})*{}", mon.join("*"))
            } else {
                format!("{cs}*{}", mon.join("*"))
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for PowSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&["X", "Y", "Z"]))
    }
}

impl fmt::Debug for PowSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PowSeries[{}; cap {}]({self})", self.nvars, self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> RamifiedField {
        RamifiedField::unramified(2, 40).unwrap()
    }

    fn uni(f: &RamifiedField, cap: u32, c: &[i64]) -> PowSeries {
        PowSeries::from_coeffs(f, cap, c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn geometric_inverse() {
        let f = q2();
        let s = uni(&f, 8, &[1, -1]);
        let inv = s.inverse().unwrap();
        assert!(inv.approx_eq(&uni(&f, 8, &[1; 9])));
        assert!(s.mul(&inv).approx_eq(&uni(&f, 8, &[1])));
    }

    #[test]
    fn truncation_respected() {
        let f = q2();
        let x = PowSeries::var(&f, 2, 3, 0);
        let y = PowSeries::var(&f, 2, 3, 1);
        let s = x.add(&y).pow(5);
        assert!(s.terms().next().is_none());
        assert_eq!(x.add(&y).pow(3).terms().count(), 4);
    }

    #[test]
    fn composition_matches_direct_expansion() {
        let f = q2();
        // (1+X)^2 - 1 composed with itself is (1+X)^4 - 1
        let g = uni(&f, 8, &[0, 2, 1]);
        let gg = g.compose(std::slice::from_ref(&g)).unwrap();
        assert!(gg.approx_eq(&uni(&f, 8, &[0, 4, 6, 4, 1])));
        // F(X,Y) = X + Y + XY at (X, X) is (1+X)^2 - 1
        let mut law = PowSeries::zero(&f, 2, 8);
        law.set([1, 0, 0], f.one());
        law.set([0, 1, 0], f.one());
        law.set([1, 1, 0], f.one());
        let x = PowSeries::var(&f, 1, 8, 0);
        assert!(law.compose(&[x.clone(), x]).unwrap().approx_eq(&g));
    }

    #[test]
    fn composition_rejects_constant_terms() {
        let f = q2();
        let g = uni(&f, 4, &[1, 1]);
        assert!(g.compose(std::slice::from_ref(&g)).is_err());
    }

    #[test]
    fn mismatch_reports_first_coefficient() {
        let f = q2();
        let a = uni(&f, 5, &[0, 1, 2, 3]);
        let b = uni(&f, 5, &[0, 1, 2, 4]);
        assert_eq!(a.first_mismatch(&b).unwrap().exponent, [3, 0, 0]);
    }
}
