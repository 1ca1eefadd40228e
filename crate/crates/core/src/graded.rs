//! Spectral degree and principal symbol of polynomial elements of the Tate
//! algebra `L<z>` (Gauss norm on the unit disc). Symbols live in
//! `F_p[t^{±1}][zbar]` with `t` the image of `pi`, of degree `1/e`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{self, ExprAlgebra};
use crate::ff::{Fq, LaurentPoly};
use crate::padic::{RamifiedElem, RamifiedField, ValExp};

#[derive(Clone, Debug)]
pub struct TateElem {
    field: RamifiedField,
    /// Exact zeros are never stored.
    coeffs: BTreeMap<u32, RamifiedElem>,
}

/// A homogeneous element of the graded reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedElem {
    pub degree: ValExp,
    pub symbol: LaurentPoly,
}

impl GradedElem {
    pub fn mul(&self, other: &GradedElem, residue_field: &Fq) -> GradedElem {
        GradedElem { degree: self.degree + other.degree, symbol: self.symbol.mul(&other.symbol, residue_field) }
    }
}

impl fmt::Display for GradedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (degree {})", self.symbol.to_string().replace('z', "zbar"), self.degree)
    }
}

impl Serialize for GradedElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GradedElem", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("symbol", &self.symbol.to_string().replace('z', "zbar"))?;
        st.end()
    }
}

impl TateElem {
    pub fn zero(field: &RamifiedField) -> TateElem {
        TateElem { field: field.clone(), coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs(field: &RamifiedField, coeffs: impl IntoIterator<Item = (u32, RamifiedElem)>) -> TateElem {
        let mut out = TateElem::zero(field);
        for (l, c) in coeffs {
            out.add_term(l, c);
        }
        out
    }

    pub fn constant(field: &RamifiedField, c: RamifiedElem) -> TateElem {
        TateElem::from_coeffs(field, [(0, c)])
    }

    pub fn z(field: &RamifiedField) -> TateElem {
        TateElem::from_coeffs(field, [(1, field.one())])
    }

    pub fn field(&self) -> &RamifiedField {
        &self.field
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &RamifiedElem)> {
        self.coeffs.iter()
    }

    fn add_term(&mut self, l: u32, c: RamifiedElem) {
        let sum = match self.coeffs.remove(&l) {
            Some(a) => a.add(&c),
            None => c,
        };
        if !(sum.is_zero() && sum.is_exact()) {
            self.coeffs.insert(l, sum);
        }
    }

    pub fn add(&self, other: &TateElem) -> TateElem {
        let mut out = self.clone();
        for (&l, c) in &other.coeffs {
            out.add_term(l, c.clone());
        }
        out
    }

    pub fn neg(&self) -> TateElem {
        TateElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|(&l, c)| (l, c.neg())).collect() }
    }

    pub fn sub(&self, other: &TateElem) -> TateElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TateElem) -> TateElem {
        let mut out = TateElem::zero(&self.field);
        for (&la, a) in &self.coeffs {
            for (&lb, b) in &other.coeffs {
                out.add_term(la + lb, a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> TateElem {
        let mut acc = TateElem::constant(&self.field, self.field.one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parses an expression in `pi` and `z`.
    pub fn parse(field: &RamifiedField, s: &str) -> Result<TateElem> {
        expr::parse(s)?.eval(&TateParser(field))
    }

    /// `min_l v(a_l)`, the Gauss-norm degree in the filtration.
    pub fn spectral_degree(&self) -> Result<ValExp> {
        let w = self.min_shift()?;
        Ok(ValExp::new(w, self.field.e() as i64))
    }

    fn min_shift(&self) -> Result<i64> {
        let w = self.coeffs.values().filter_map(|c| c.shift()).min().ok_or(Error::PrecisionExhausted)?;
        // A coefficient lost to precision could hide a smaller valuation.
        if self.coeffs.values().any(|c| c.is_zero() && c.prec() <= w) {
            return Err(Error::PrecisionExhausted);
        }
        Ok(w)
    }

    /// Keeps the terms of minimal valuation `w / e` and reduces each
    /// coefficient `c` to `res(c / pi^w) t^w`.
    pub fn principal_symbol(&self) -> Result<GradedElem> {
        let w = self.min_shift()?;
        let k = Fq::prime(self.field.p())?;
        let mut symbol = LaurentPoly::zero();
        for (&l, c) in &self.coeffs {
            if c.shift() == Some(w) {
                let r = c.leading_digit().expect("nonzero coefficient");
                symbol = symbol.add(&LaurentPoly::monomial(k.elem(r), w, l), &k);
            }
        }
        Ok(GradedElem { degree: ValExp::new(w, self.field.e() as i64), symbol })
    }

    /// Random element with up to `max_terms` terms, `z`-degree at most
    /// `max_z`, and coefficient valuations in `[lo, hi]` (powers of `pi`).
    pub fn random<R: Rng + ?Sized>(field: &RamifiedField, rng: &mut R, max_terms: usize, max_z: u32, lo: i64, hi: i64) -> TateElem {
        loop {
            let n = rng.gen_range(1..=max_terms);
            let mut out = TateElem::zero(field);
            for _ in 0..n {
                let l = rng.gen_range(0..=max_z);
                out.add_term(l, field.random_with_shift(rng, lo, hi));
            }
            if out.min_shift().is_ok() {
                return out;
            }
        }
    }
}

impl fmt::Display for TateElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&l, c)| match l {
                0 => format!("({c})"),
                1 => format!("({c})*z"),
                _ => format!("({c})*z^{l}"),
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Expression target for [`TateElem::parse`].
struct TateParser<'a>(&'a RamifiedField);

impl TateParser<'_> {
    fn field(&self) -> &RamifiedField {
        self.0
    }
}

impl ExprAlgebra for TateParser<'_> {
    type Value = TateElem;

    fn int(&self, n: &BigInt) -> Result<TateElem> {
        let f = self.field();
        Ok(TateElem::constant(f, f.from_bigint(n)))
    }

    fn var(&self, name: &str) -> Result<TateElem> {
        let f = self.field();
        match name {
            "z" => Ok(TateElem::z(f)),
            "pi" | "π" => Ok(TateElem::constant(f, f.pi())),
            _ => Err(Error::Parse(format!("unknown variable {name:?}; expected pi or z"))),
        }
    }

    fn add(&self, a: TateElem, b: TateElem) -> Result<TateElem> {
        Ok(a.add(&b))
    }

    fn neg(&self, a: TateElem) -> Result<TateElem> {
        Ok(a.neg())
    }

    fn mul(&self, a: TateElem, b: TateElem) -> Result<TateElem> {
        Ok(a.mul(&b))
    }

    fn pow(&self, a: TateElem, e: i64) -> Result<TateElem> {
        if e >= 0 {
            return Ok(a.pow(e as u32));
        }
        // Only constants invert inside the polynomial model.
        match a.coeffs.iter().next() {
            Some((0, c)) if a.coeffs.len() == 1 => Ok(TateElem::constant(&a.field, c.pow_signed(e)?)),
            _ => Err(Error::Parse("negative powers apply only to constants".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(p: u32) -> RamifiedField {
        RamifiedField::unramified(p, 24).unwrap()
    }

    fn e2() -> RamifiedField {
        RamifiedField::new(2, RamifiedField::default_eisenstein(2, 2), 24).unwrap()
    }

    fn sym(s: &str, p: u32) -> LaurentPoly {
        crate::ff::parse_laurent(s, &Fq::prime(p).unwrap(), true).unwrap()
    }

    #[test]
    fn degree_examples() {
        let f = q(3);
        assert_eq!(TateElem::parse(&f, "3 + z").unwrap().spectral_degree().unwrap(), ValExp::int(0));
        assert_eq!(TateElem::parse(&f, "3*z").unwrap().spectral_degree().unwrap(), ValExp::int(1));
        let g = e2();
        assert_eq!(TateElem::parse(&g, "pi + pi^2*z").unwrap().spectral_degree().unwrap(), ValExp::new(1, 2));
        assert_eq!(TateElem::zero(&g).spectral_degree(), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn symbol_examples() {
        let f = q(2);
        let s = TateElem::parse(&f, "2 + z").unwrap().principal_symbol().unwrap();
        assert_eq!((s.degree, s.symbol), (ValExp::int(0), sym("z", 2)));
        let s = TateElem::parse(&f, "2*z").unwrap().principal_symbol().unwrap();
        assert_eq!((s.degree, s.symbol), (ValExp::int(1), sym("t*z", 2)));
        let s = TateElem::parse(&f, "2 + 2*z + 4*z^2").unwrap().principal_symbol().unwrap();
        assert_eq!((s.degree, s.symbol), (ValExp::int(1), sym("t + t*z", 2)));
        let g = e2();
        let s = TateElem::parse(&g, "pi^-1*z + 3*pi^-1").unwrap().principal_symbol().unwrap();
        assert_eq!((s.degree, s.symbol.clone()), (ValExp::new(-1, 2), sym("t^-1 + t^-1*z", 2)));
        assert_eq!(s.to_string(), "t^-1 + t^-1*zbar (degree -1/2)");
    }

    #[test]
    fn lost_coefficient_blocks_degree() {
        let f = q(2);
        let a = TateElem::from_coeffs(&f, [(0, f.zero_to(1)), (1, f.from_int(4))]);
        assert_eq!(a.spectral_degree(), Err(Error::PrecisionExhausted));
    }

    #[test]
    fn symbols_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in [q(2), q(3), e2()] {
            let k = Fq::prime(f.p()).unwrap();
            for _ in 0..200 {
                let a = TateElem::random(&f, &mut rng, 4, 3, -2, 3);
                let b = TateElem::random(&f, &mut rng, 4, 3, -2, 3);
                let ab = a.mul(&b);
                let (sa, sb) = (a.principal_symbol().unwrap(), b.principal_symbol().unwrap());
                assert_eq!(ab.principal_symbol().unwrap(), sa.mul(&sb, &k));
                let s = a.add(&b);
                if let Ok(d) = s.spectral_degree() {
                    assert!(d >= sa.degree.min(sb.degree));
                }
            }
        }
    }
}
