//! Text encoding of Laurent polynomials: `c*t^e*z^k` terms joined by `+`.
//!
//! Integer literals denote field elements by their packed code (the plain
//! residue for prime fields). Expressions may also use the auxiliary
//! variable `T` of a truncation.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::field::Fq;
use super::laurent::LaurentPoly;
use crate::error::{Error, Result};
use crate::expr::{self, ExprAlgebra};

/// Polynomial in `T` with Laurent coefficients, indexed by `T`-degree.
type TSeries = Vec<LaurentPoly>;

struct LaurentAlgebra<'a> {
    k: &'a Fq,
    allow_z: bool,
    allow_t_aux: bool,
}

fn trim(mut v: TSeries) -> TSeries {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

impl ExprAlgebra for LaurentAlgebra<'_> {
    type Value = TSeries;

    fn int(&self, n: &BigInt) -> Result<TSeries> {
        let q = self.k.q() as u64;
        let code = match n.to_u64() {
            Some(v) if v < q => v as u32,
            _ if self.k.degree() == 1 => (n % BigInt::from(q)).to_u32().unwrap_or(0),
            _ => return Err(Error::Parse(format!("literal {n} is not an element code of F_{q}"))),
        };
        Ok(trim(vec![LaurentPoly::constant(self.k.elem(code))]))
    }

    fn var(&self, name: &str) -> Result<TSeries> {
        match name {
            "t" => Ok(vec![LaurentPoly::t()]),
            "z" if self.allow_z => Ok(vec![LaurentPoly::z()]),
            "T" if self.allow_t_aux => Ok(vec![LaurentPoly::zero(), LaurentPoly::one()]),
            other => Err(Error::Parse(format!("unknown variable {other:?}"))),
        }
    }

    fn add(&self, a: TSeries, b: TSeries) -> Result<TSeries> {
        let n = a.len().max(b.len());
        let zero = LaurentPoly::zero();
        Ok(trim(
            (0..n)
                .map(|i| a.get(i).unwrap_or(&zero).add(b.get(i).unwrap_or(&zero), self.k))
                .collect(),
        ))
    }

    fn neg(&self, a: TSeries) -> Result<TSeries> {
        Ok(a.iter().map(|c| c.neg(self.k)).collect())
    }

    fn mul(&self, a: TSeries, b: TSeries) -> Result<TSeries> {
        if a.is_empty() || b.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = vec![LaurentPoly::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y, self.k), self.k);
            }
        }
        Ok(trim(out))
    }

    fn pow(&self, a: TSeries, e: i64) -> Result<TSeries> {
        if e >= 0 {
            let mut acc = vec![LaurentPoly::one()];
            for _ in 0..e {
                acc = self.mul(acc, a.clone())?;
            }
            return Ok(acc);
        }
        if a.len() != 1 || !a[0].is_unit() {
            return Err(Error::Parse("negative powers are only defined for units c*t^i".into()));
        }
        let inv = a[0].inv(self.k).expect("unit");
        Ok(vec![inv.pow((-e) as u64, self.k)])
    }
}

/// Parses an element of `k[t^{±1}]` (or of `k[t^{±1}][z]` if `allow_z`).
pub fn parse_laurent(s: &str, k: &Fq, allow_z: bool) -> Result<LaurentPoly> {
    let alg = LaurentAlgebra { k, allow_z, allow_t_aux: false };
    let v = expr::parse(s)?.eval(&alg)?;
    Ok(v.into_iter().next().unwrap_or_default())
}

/// Parses `a0 + a1*T + ..`, returning the coefficient list by `T`-degree.
pub fn parse_t_polynomial(s: &str, k: &Fq, allow_z: bool) -> Result<Vec<LaurentPoly>> {
    let alg = LaurentAlgebra { k, allow_z, allow_t_aux: true };
    expr::parse(s)?.eval(&alg)
}
