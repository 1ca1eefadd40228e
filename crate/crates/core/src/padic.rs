//! Fixed-precision arithmetic in a totally ramified extension
//! `L = Q_p[pi]/(E(pi))` with Eisenstein `E` of degree `e`.
//!
//! An element is `pi^shift * y` with `y` in `o / p^K o` (power basis in
//! `pi`, coefficients reduced to `[0, p^K)`), known modulo `pi^prec`.
//! Nonzero elements keep `y` a unit; zero is stored as `shift == prec`.
//! Relative precision `prec - shift` never exceeds `e * K`.

use std::fmt;
use std::sync::Arc;

pub use num_bigint::BigInt;
use num_bigint::{RandBigInt, Sign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::{self, ExprAlgebra};
use crate::ff::is_prime;

/// Absolute precision marker for exact zeros.
const EXACT: i64 = 1 << 40;

/// An additive valuation, normalized by `v(p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValExp(Ratio<i64>);

impl ValExp {
    pub fn new(numer: i64, denom: i64) -> ValExp {
        ValExp(Ratio::new(numer, denom))
    }

    pub fn int(n: i64) -> ValExp {
        ValExp(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0 > Ratio::zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn parse(s: &str) -> Result<ValExp> {
        let bad = || Error::Parse(format!("bad valuation {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(ValExp::new(n, d))
            }
            None => Ok(ValExp::int(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl std::ops::Add for ValExp {
    type Output = ValExp;
    fn add(self, rhs: ValExp) -> ValExp {
        ValExp(self.0 + rhs.0)
    }
}

impl std::ops::Sub for ValExp {
    type Output = ValExp;
    fn sub(self, rhs: ValExp) -> ValExp {
        ValExp(self.0 - rhs.0)
    }
}

impl std::ops::Mul<i64> for ValExp {
    type Output = ValExp;
    fn mul(self, rhs: i64) -> ValExp {
        ValExp(self.0 * rhs)
    }
}

impl std::ops::Div<i64> for ValExp {
    type Output = ValExp;
    fn div(self, rhs: i64) -> ValExp {
        ValExp(self.0 / rhs)
    }
}

impl fmt::Display for ValExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Serialize for ValExp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct FieldData {
    p: u32,
    e: u32,
    eisenstein: Vec<BigInt>,
    digits: u32,
    modulus: BigInt,
    /// `pi^(e+j)` in the power basis, `0 <= j < e - 1`.
    high_powers: Vec<Vec<BigInt>>,
    /// `p / pi = pi^(e-1) / eps` where `pi^e = p * eps`.
    p_over_pi: Vec<BigInt>,
}

/// A totally ramified extension of `Q_p` carried to `K` p-adic digits.
#[derive(Clone)]
pub struct RamifiedField(Arc<FieldData>);

impl PartialEq for RamifiedField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.eisenstein == other.0.eisenstein
                && self.0.digits == other.0.digits)
    }
}

impl Eq for RamifiedField {}

impl fmt::Debug for RamifiedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RamifiedField(p={}, E={}, digits={})", self.p(), self.eisenstein_string(), self.digits())
    }
}

impl RamifiedField {
    /// `eisenstein` is monic of degree `e >= 1`, coefficients low to high.
    pub fn new(p: u32, eisenstein: Vec<BigInt>, digits: u32) -> Result<RamifiedField> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if digits == 0 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        let mut eis = eisenstein;
        while eis.len() > 1 && eis.last().is_some_and(|c| c.is_zero()) {
            eis.pop();
        }
        if eis.len() < 2 || !eis.last().unwrap().is_one() {
            return Err(Error::InvalidField("Eisenstein polynomial must be monic of degree >= 1".into()));
        }
        let pb = BigInt::from(p);
        let e = (eis.len() - 1) as u32;
        for c in &eis[..e as usize] {
            if !c.is_multiple_of(&pb) {
                return Err(Error::InvalidField("Eisenstein condition fails: p must divide every lower coefficient".into()));
            }
        }
        if eis[0].is_multiple_of(&(&pb * &pb)) {
            return Err(Error::InvalidField("Eisenstein condition fails: p^2 divides the constant term".into()));
        }
        let modulus = pb.pow(digits);
        let mut data = FieldData {
            p,
            e,
            eisenstein: eis.clone(),
            digits,
            modulus,
            high_powers: Vec::new(),
            p_over_pi: Vec::new(),
        };
        // pi^e = -sum_{i<e} E_i pi^i; successive powers by shifting.
        let eu = e as usize;
        let mut cur: Vec<BigInt> = eis[..eu].iter().map(|c| -c).collect();
        for _ in 0..eu.saturating_sub(1) {
            data.high_powers.push(cur.iter().map(|c| c.mod_floor(&data.modulus)).collect());
            let top = cur[eu - 1].clone();
            let mut next = vec![BigInt::zero(); eu];
            for i in (1..eu).rev() {
                next[i] = cur[i - 1].clone();
            }
            for i in 0..eu {
                next[i] -= &top * &eis[i];
            }
            cur = next;
        }
        let field = RamifiedField(Arc::new(data));
        // eps = -sum (E_i / p) pi^i, a unit since E_0 / p is.
        let eps: Vec<BigInt> = eis[..eu].iter().map(|c| field.reduce(-(c / &pb))).collect();
        let eps_inv = field.o_inv(&eps);
        let mut pi_pow = vec![BigInt::zero(); eu];
        pi_pow[eu - 1] = BigInt::one();
        let p_over_pi = field.o_mul(&pi_pow, &eps_inv);
        let mut data = Arc::try_unwrap(field.0).ok().expect("freshly built field is uniquely owned");
        data.p_over_pi = p_over_pi;
        Ok(RamifiedField(Arc::new(data)))
    }

    /// `Q_p` itself, presented by `E = pi - p`.
    pub fn unramified(p: u32, digits: u32) -> Result<RamifiedField> {
        RamifiedField::new(p, vec![-BigInt::from(p), BigInt::one()], digits)
    }

    /// `E = pi^e - p`.
    pub fn default_eisenstein(p: u32, e: u32) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); e as usize + 1];
        v[0] = -BigInt::from(p);
        v[e as usize] = BigInt::one();
        v
    }

    /// Parses `E` as an integer polynomial in `pi`.
    pub fn parse_eisenstein(s: &str) -> Result<Vec<BigInt>> {
        expr::parse(s)?.eval(&IntPolyAlgebra)
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn digits(&self) -> u32 {
        self.0.digits
    }

    /// Relative precision in powers of `pi`.
    pub fn cap(&self) -> i64 {
        self.0.e as i64 * self.0.digits as i64
    }

    pub fn eisenstein(&self) -> &[BigInt] {
        &self.0.eisenstein
    }

    pub fn eisenstein_string(&self) -> String {
        let mut parts = Vec::new();
        for (i, c) in self.0.eisenstein.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mon = match i {
                0 => String::new(),
                1 => "pi".to_string(),
                _ => format!("pi^{i}"),
            };
            let mag = c.abs();
            let body = if mon.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mon
            } else {
                format!("{mag}*{mon}")
            };
            let neg = c.is_negative();
            if parts.is_empty() {
                parts.push(if neg { format!("-{body}") } else { body });
            } else {
                parts.push(format!("{} {body}", if neg { "-" } else { "+" }));
            }
        }
        parts.join(" ")
    }

    fn reduce(&self, c: BigInt) -> BigInt {
        c.mod_floor(&self.0.modulus)
    }

    fn o_zero(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.0.e as usize]
    }

    fn o_from_int(&self, n: &BigInt) -> Vec<BigInt> {
        let mut v = self.o_zero();
        v[0] = self.reduce(n.clone());
        v
    }

    fn o_add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| self.reduce(x + y)).collect()
    }

    fn o_neg(&self, a: &[BigInt]) -> Vec<BigInt> {
        a.iter().map(|x| self.reduce(-x)).collect()
    }

    fn o_mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let e = self.0.e as usize;
        let mut prod = vec![BigInt::zero(); 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let mut out: Vec<BigInt> = prod[..e].to_vec();
        for (j, hp) in self.0.high_powers.iter().enumerate() {
            let c = &prod[e + j];
            if c.is_zero() {
                continue;
            }
            for i in 0..e {
                out[i] += c * &hp[i];
            }
        }
        out.into_iter().map(|c| self.reduce(c)).collect()
    }

    /// Multiplies by `pi^k`, `k >= 0`.
    fn o_mul_pi_pow(&self, a: &[BigInt], k: i64) -> Vec<BigInt> {
        if k >= self.cap() {
            return self.o_zero();
        }
        let e = self.0.e as usize;
        let mut cur = a.to_vec();
        for _ in 0..k {
            let top = cur[e - 1].clone();
            let mut next = vec![BigInt::zero(); e];
            for i in (1..e).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..e {
                    next[i] -= &top * &self.0.eisenstein[i];
                }
            }
            cur = next.into_iter().map(|c| self.reduce(c)).collect();
        }
        cur
    }

    /// Divides by `pi`; requires `v_pi(a) >= 1`.
    fn o_div_pi(&self, a: &[BigInt]) -> Vec<BigInt> {
        let e = self.0.e as usize;
        let pb = BigInt::from(self.0.p);
        let mut out = self.o_zero();
        out[..e - 1].clone_from_slice(&a[1..]);
        let a0 = &a[0] / &pb;
        if !a0.is_zero() {
            for i in 0..e {
                out[i] += &a0 * &self.0.p_over_pi[i];
            }
        }
        out.into_iter().map(|c| self.reduce(c)).collect()
    }

    /// `v_pi` of a residue, `None` when it vanishes mod `p^K`.
    fn o_val(&self, a: &[BigInt]) -> Option<i64> {
        let pb = BigInt::from(self.0.p);
        let e = self.0.e as i64;
        let mut best: Option<i64> = None;
        for (i, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut v = 0i64;
            let mut x = c.clone();
            while x.is_multiple_of(&pb) {
                x /= &pb;
                v += 1;
            }
            let cand = e * v + i as i64;
            best = Some(best.map_or(cand, |b| b.min(cand)));
        }
        best
    }

    /// Inverse of a unit of `o / p^K` by Newton iteration.
    fn o_inv(&self, a: &[BigInt]) -> Vec<BigInt> {
        let pb = BigInt::from(self.0.p);
        let a0 = a[0].mod_floor(&pb);
        let inv0 = a0.modpow(&(&pb - 2u32), &pb);
        let mut z = self.o_from_int(&inv0);
        let two = self.o_from_int(&BigInt::from(2));
        let mut good = 1i64;
        while good < self.cap() {
            let az = self.o_mul(a, &z);
            z = self.o_mul(&z, &self.o_add(&two, &self.o_neg(&az)));
            good *= 2;
        }
        z
    }

    pub fn zero(&self) -> RamifiedElem {
        RamifiedElem { field: self.clone(), shift: EXACT, unit: self.o_zero(), prec: EXACT }
    }

    pub fn one(&self) -> RamifiedElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> RamifiedElem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> RamifiedElem {
        if n.is_zero() {
            return self.zero();
        }
        RamifiedElem::normalized(self, 0, self.o_from_int(n), EXACT)
    }

    /// The uniformizer.
    pub fn pi(&self) -> RamifiedElem {
        let mut y = self.o_zero();
        y[0] = BigInt::one();
        RamifiedElem { field: self.clone(), shift: 1, unit: y, prec: 1 + self.cap() }
    }

    /// Zero known only modulo `pi^prec`.
    pub fn zero_to(&self, prec: i64) -> RamifiedElem {
        RamifiedElem { field: self.clone(), shift: prec, unit: self.o_zero(), prec }
    }

    /// Uniform element of `o / p^K`.
    pub fn random_integral<R: Rng + ?Sized>(&self, rng: &mut R) -> RamifiedElem {
        let y: Vec<BigInt> = (0..self.0.e).map(|_| rng.gen_bigint_range(&BigInt::zero(), &self.0.modulus)).collect();
        RamifiedElem::normalized(self, 0, y, self.cap())
    }

    /// Uniform unit of `o / p^K`.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> RamifiedElem {
        loop {
            let x = self.random_integral(rng);
            if x.is_unit() {
                return x;
            }
        }
    }

    /// Random element with valuation in `[lo, hi]` (powers of `pi`).
    pub fn random_with_shift<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> RamifiedElem {
        let u = self.random_unit(rng);
        let s = rng.gen_range(lo..=hi);
        RamifiedElem { field: self.clone(), shift: s, prec: s + self.cap(), unit: u.unit }
    }

    /// Parses an integer expression in `pi`; negative powers invert. A
    /// trailing `+ O(pi^k)` (or `O(p^k)`) term sets the absolute precision.
    pub fn parse(&self, s: &str) -> Result<RamifiedElem> {
        let Some(at) = s.find("O(") else {
            return expr::parse(s)?.eval(self);
        };
        let head = s[..at].trim_end();
        let head = head.strip_suffix('+').ok_or_else(|| Error::Parse(format!("bad precision term in {s:?}")))?;
        let body = s[at + 2..].trim_end().strip_suffix(')').ok_or_else(|| Error::Parse(format!("unclosed O( in {s:?}")))?;
        let bad = || Error::Parse(format!("bad precision term in {s:?}"));
        let (base, k) = body.split_once('^').ok_or_else(bad)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        let prec = match base.trim() {
            "pi" | "π" => k,
            b if b.parse::<u32>().ok() == Some(self.p()) => k * self.e() as i64,
            _ => return Err(bad()),
        };
        Ok(expr::parse(head)?.eval(self)?.add(&self.zero_to(prec)))
    }
}

impl ExprAlgebra for RamifiedField {
    type Value = RamifiedElem;

    fn int(&self, n: &BigInt) -> Result<RamifiedElem> {
        Ok(self.from_bigint(n))
    }

    fn var(&self, name: &str) -> Result<RamifiedElem> {
        match name {
            "pi" | "π" => Ok(self.pi()),
            _ => Err(Error::Parse(format!("unknown variable {name:?}; expected pi"))),
        }
    }

    fn add(&self, a: RamifiedElem, b: RamifiedElem) -> Result<RamifiedElem> {
        Ok(a.add(&b))
    }

    fn neg(&self, a: RamifiedElem) -> Result<RamifiedElem> {
        Ok(a.neg())
    }

    fn mul(&self, a: RamifiedElem, b: RamifiedElem) -> Result<RamifiedElem> {
        Ok(a.mul(&b))
    }

    fn pow(&self, a: RamifiedElem, e: i64) -> Result<RamifiedElem> {
        a.pow_signed(e)
    }
}

/// Integer polynomials in `pi`, low to high.
struct IntPolyAlgebra;

impl ExprAlgebra for IntPolyAlgebra {
    type Value = Vec<BigInt>;

    fn int(&self, n: &BigInt) -> Result<Vec<BigInt>> {
        Ok(vec![n.clone()])
    }

    fn var(&self, name: &str) -> Result<Vec<BigInt>> {
        match name {
            "pi" | "π" => Ok(vec![BigInt::zero(), BigInt::one()]),
            _ => Err(Error::Parse(format!("unknown variable {name:?}; expected pi"))),
        }
    }

    fn add(&self, a: Vec<BigInt>, b: Vec<BigInt>) -> Result<Vec<BigInt>> {
        let n = a.len().max(b.len());
        Ok((0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect())
    }

    fn neg(&self, a: Vec<BigInt>) -> Result<Vec<BigInt>> {
        Ok(a.into_iter().map(|c| -c).collect())
    }

    fn mul(&self, a: Vec<BigInt>, b: Vec<BigInt>) -> Result<Vec<BigInt>> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Ok(out)
    }

    fn pow(&self, a: Vec<BigInt>, e: i64) -> Result<Vec<BigInt>> {
        if e < 0 {
            return Err(Error::Parse("negative power in an integer polynomial".into()));
        }
        let mut out = vec![BigInt::one()];
        for _ in 0..e {
            out = self.mul(out, a.clone())?;
        }
        Ok(out)
    }
}

/// An element of `L` with absolute precision.
#[derive(Clone)]
pub struct RamifiedElem {
    field: RamifiedField,
    shift: i64,
    unit: Vec<BigInt>,
    prec: i64,
}

fn clamp(prec: i64) -> i64 {
    if prec >= EXACT / 2 {
        EXACT
    } else {
        prec
    }
}

impl RamifiedElem {
    fn normalized(field: &RamifiedField, shift: i64, y: Vec<BigInt>, prec: i64) -> RamifiedElem {
        let prec = clamp(prec.min(shift.saturating_add(field.cap())));
        match field.o_val(&y) {
            Some(v) if shift + v < prec => {
                let mut y = y;
                for _ in 0..v {
                    y = field.o_div_pi(&y);
                }
                RamifiedElem { field: field.clone(), shift: shift + v, unit: y, prec }
            }
            _ => RamifiedElem { field: field.clone(), shift: prec, unit: field.o_zero(), prec },
        }
    }

    pub fn field(&self) -> &RamifiedField {
        &self.field
    }

    /// Absolute precision in powers of `pi`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn precision(&self) -> Option<ValExp> {
        (!self.is_exact()).then(|| ValExp::new(self.prec, self.field.e() as i64))
    }

    /// `prec - v_pi`, the number of known `pi`-digits.
    pub fn relative_prec(&self) -> i64 {
        self.prec - self.shift
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Indistinguishable from zero at the tracked precision.
    pub fn is_zero(&self) -> bool {
        self.shift >= self.prec
    }

    /// `v_pi`; `None` for zero.
    pub fn shift(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    pub fn valuation(&self) -> Result<ValExp> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted);
        }
        Ok(ValExp::new(self.shift, self.field.e() as i64))
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.shift == 0
    }

    pub fn is_integral(&self) -> bool {
        self.shift >= 0
    }

    fn check_field(&self, other: &RamifiedElem) {
        assert!(self.field == other.field, "elements of different fields");
    }

    pub fn add(&self, other: &RamifiedElem) -> RamifiedElem {
        self.check_field(other);
        let prec = self.prec.min(other.prec);
        let f = &self.field;
        match (self.is_zero(), other.is_zero()) {
            (true, true) => f.zero_to(prec).with_exact(prec),
            (true, false) => RamifiedElem::normalized(f, other.shift, other.unit.clone(), prec),
            (false, true) => RamifiedElem::normalized(f, self.shift, self.unit.clone(), prec),
            (false, false) => {
                let s = self.shift.min(other.shift);
                let a = f.o_mul_pi_pow(&self.unit, self.shift - s);
                let b = f.o_mul_pi_pow(&other.unit, other.shift - s);
                RamifiedElem::normalized(f, s, f.o_add(&a, &b), prec)
            }
        }
    }

    fn with_exact(mut self, prec: i64) -> RamifiedElem {
        let p = clamp(prec);
        self.prec = p;
        self.shift = p;
        self
    }

    pub fn neg(&self) -> RamifiedElem {
        RamifiedElem { field: self.field.clone(), shift: self.shift, unit: self.field.o_neg(&self.unit), prec: self.prec }
    }

    pub fn sub(&self, other: &RamifiedElem) -> RamifiedElem {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RamifiedElem) -> RamifiedElem {
        self.check_field(other);
        let prec = clamp((self.shift + other.prec).min(other.shift + self.prec));
        if self.is_zero() || other.is_zero() {
            return self.field.zero_to(prec).with_exact(prec);
        }
        let y = self.field.o_mul(&self.unit, &other.unit);
        RamifiedElem { field: self.field.clone(), shift: self.shift + other.shift, unit: y, prec }
    }

    pub fn inv(&self) -> Result<RamifiedElem> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted);
        }
        let y = self.field.o_inv(&self.unit);
        let rel = self.prec - self.shift;
        Ok(RamifiedElem { field: self.field.clone(), shift: -self.shift, unit: y, prec: -self.shift + rel })
    }

    pub fn div(&self, other: &RamifiedElem) -> Result<RamifiedElem> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn mul_int(&self, n: i64) -> RamifiedElem {
        self.mul(&self.field.from_int(n))
    }

    pub fn div_int(&self, n: i64) -> Result<RamifiedElem> {
        self.div(&self.field.from_int(n))
    }

    pub fn pow(&self, mut n: u64) -> RamifiedElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn pow_signed(&self, n: i64) -> Result<RamifiedElem> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inv()?.pow(n.unsigned_abs()))
        }
    }

    /// Equality modulo the coarser of the two precisions.
    pub fn approx_eq(&self, other: &RamifiedElem) -> bool {
        self.sub(other).is_zero()
    }

    /// Image in the residue field `F_p`.
    pub fn residue(&self) -> Result<u32> {
        if self.is_zero() {
            return if self.prec >= 1 { Ok(0) } else { Err(Error::PrecisionExhausted) };
        }
        match self.shift {
            s if s < 0 => Err(Error::NonIntegral),
            0 => Ok(self.unit[0].mod_floor(&BigInt::from(self.field.p())).to_u32().unwrap()),
            _ => Ok(0),
        }
    }

    /// Residue of `pi^(-v) x`; `None` for zero.
    pub fn leading_digit(&self) -> Option<u32> {
        (!self.is_zero()).then(|| self.unit[0].mod_floor(&BigInt::from(self.field.p())).to_u32().unwrap())
    }

    /// `pi`-adic digits `d_j` in `[0, p)` for `v <= j < prec`, with `v` the
    /// valuation.
    pub fn digits(&self) -> Vec<(i64, u32)> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let f = &self.field;
        let pb = BigInt::from(f.p());
        let mut y = self.unit.clone();
        for j in self.shift..self.prec {
            let d = y[0].mod_floor(&pb);
            if !d.is_zero() {
                out.push((j, d.to_u32().unwrap()));
                let mut dv = f.o_zero();
                dv[0] = d;
                y = f.o_add(&y, &f.o_neg(&dv));
            }
            y = f.o_div_pi(&y);
        }
        out
    }

    /// Canonical representative `sum b_i pi^(shift+i)` with balanced integer
    /// `b_i`, rebuilt from the known digits.
    fn canonical(&self) -> Vec<BigInt> {
        let f = &self.field;
        let mut acc = f.o_zero();
        let mut power = f.o_from_int(&BigInt::one());
        let mut at = self.shift;
        for (j, d) in self.digits() {
            power = f.o_mul_pi_pow(&power, j - at);
            at = j;
            let term = f.o_mul(&power, &f.o_from_int(&BigInt::from(d)));
            acc = f.o_add(&acc, &term);
        }
        let half = &f.0.modulus / 2;
        acc.into_iter().map(|c| if c > half { c - &f.0.modulus } else { c }).collect()
    }
}

impl fmt::Debug for RamifiedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RamifiedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let field = &self.field;
        let p = field.p();
        let big_o = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if self.is_exact() {
                Ok(())
            } else if field.e() == 1 {
                write!(f, " + O({p}^{})", self.prec)
            } else {
                write!(f, " + O(pi^{})", self.prec)
            }
        };
        if self.is_zero() {
            f.write_str("0")?;
            return big_o(f);
        }
        let b = self.canonical();
        if field.e() == 1 {
            let v = self.shift;
            let pb = BigInt::from(p);
            if v >= 0 {
                write!(f, "{}", &b[0] * pb.pow(v as u32))?;
            } else {
                write!(f, "{}/{}", b[0], pb.pow((-v) as u32))?;
            }
            return big_o(f);
        }
        let mut first = true;
        for (i, c) in b.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.shift + i as i64;
            let mon = match k {
                0 => String::new(),
                1 => "pi".to_string(),
                _ => format!("pi^{k}"),
            };
            let mag = c.abs();
            let body = if mon.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mon
            } else {
                format!("{mag}*{mon}")
            };
            let neg = c.sign() == Sign::Minus;
            if first {
                write!(f, "{}{body}", if neg { "-" } else { "" })?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
        }
        big_o(f)
    }
}

impl Serialize for RamifiedElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RamifiedElem", 3)?;
        st.serialize_field("value", &self.to_string())?;
        st.serialize_field("valuation", &self.valuation().ok())?;
        st.serialize_field("precision", &self.precision())?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q2(k: u32) -> RamifiedField {
        RamifiedField::unramified(2, k).unwrap()
    }

    fn e2() -> RamifiedField {
        RamifiedField::new(2, RamifiedField::default_eisenstein(2, 2), 16).unwrap()
    }

    #[test]
    fn eisenstein_validation() {
        assert!(RamifiedField::new(2, vec![BigInt::from(-4), BigInt::zero(), BigInt::one()], 8).is_err());
        assert!(RamifiedField::new(2, vec![BigInt::from(-2), BigInt::one(), BigInt::one()], 8).is_err());
        assert!(RamifiedField::new(4, vec![BigInt::from(-2), BigInt::one()], 8).is_err());
        assert!(RamifiedField::new(3, vec![BigInt::from(3), BigInt::from(6), BigInt::zero(), BigInt::one()], 8).is_ok());
        assert_eq!(RamifiedField::parse_eisenstein("pi^2-2").unwrap(), RamifiedField::default_eisenstein(2, 2));
    }

    #[test]
    fn addition_with_precision() {
        let f = q2(8);
        let one = f.one().add(&f.zero_to(8));
        assert_eq!(one.prec(), 8);
        let two = one.add(&one);
        assert!(two.approx_eq(&f.from_int(2)));
        assert_eq!(two.prec(), 8);
        assert_eq!(two.valuation().unwrap(), ValExp::int(1));
        assert_eq!(two.to_string(), "2 + O(2^8)");
    }

    #[test]
    fn pi_squared_is_two() {
        let f = e2();
        let pi = f.pi();
        assert!(pi.mul(&pi).approx_eq(&f.from_int(2)));
        assert_eq!(pi.valuation().unwrap(), ValExp::new(1, 2));
        // pi^e / p is a unit
        assert!(pi.pow(2).div_int(2).unwrap().is_unit());
    }

    #[test]
    fn inverse_of_p_is_non_integral() {
        let f = RamifiedField::unramified(3, 10).unwrap();
        let x = f.from_int(3).inv().unwrap();
        assert_eq!(x.valuation().unwrap(), ValExp::int(-1));
        assert!(!x.is_integral());
        assert_eq!(x.residue(), Err(Error::NonIntegral));
        assert_eq!(x.to_string(), "1/3 + O(3^8)");
        assert_eq!(f.zero_to(5).inv().err(), Some(Error::PrecisionExhausted));
    }

    #[test]
    fn valuation_examples() {
        let f = e2();
        assert_eq!(f.from_int(2).valuation().unwrap(), ValExp::int(1));
        let x = f.from_int(2).add(&f.pi().pow(2));
        assert_eq!(x.valuation().unwrap(), ValExp::int(2));
        assert!(x.approx_eq(&f.pi().pow(4)));
    }

    #[test]
    fn valuation_is_additive_and_ultrametric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [q2(20), RamifiedField::unramified(3, 12).unwrap(), e2()] {
            for _ in 0..500 {
                let a = f.random_with_shift(&mut rng, -3, 6);
                let b = f.random_with_shift(&mut rng, -3, 6);
                let (va, vb) = (a.valuation().unwrap(), b.valuation().unwrap());
                assert_eq!(a.mul(&b).valuation().unwrap(), va + vb);
                let s = a.add(&b);
                if va != vb {
                    assert_eq!(s.valuation().unwrap(), va.min(vb));
                } else if !s.is_zero() {
                    assert!(s.valuation().unwrap() >= va);
                }
            }
        }
    }

    #[test]
    fn field_axioms_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = RamifiedField::new(3, vec![BigInt::from(3), BigInt::from(6), BigInt::zero(), BigInt::one()], 10).unwrap();
        for _ in 0..100 {
            let a = f.random_with_shift(&mut rng, -2, 4);
            let b = f.random_with_shift(&mut rng, -2, 4);
            let c = f.random_with_shift(&mut rng, -2, 4);
            assert!(a.mul(&b.add(&c)).approx_eq(&a.mul(&b).add(&a.mul(&c))));
            assert!(a.mul(&a.inv().unwrap()).approx_eq(&f.one()));
            assert!(a.sub(&a).is_zero());
        }
    }

    #[test]
    fn parse_and_display() {
        let f = e2();
        let x = f.parse("1 + pi^3 - 3*pi^-1").unwrap();
        assert_eq!(x.valuation().unwrap(), ValExp::new(-1, 2));
        let back = f.parse(&x.to_string()).unwrap();
        assert!(back.approx_eq(&x));
        assert_eq!(back.prec(), x.prec());
        assert!(f.parse("pi^-2*2").unwrap().approx_eq(&f.one()));
        assert_eq!(f.from_int(-1).to_string(), "-1 + O(pi^32)");
        let g = q2(6);
        assert_eq!(g.from_int(3).div_int(4).unwrap().to_string(), "3/4 + O(2^2)");
    }

    #[test]
    fn residues() {
        let f = RamifiedField::unramified(5, 6).unwrap();
        assert_eq!(f.from_int(7).residue().unwrap(), 2);
        assert_eq!(f.from_int(10).residue().unwrap(), 0);
        assert_eq!(f.from_int(-1).residue().unwrap(), 4);
    }

    #[test]
    fn valexp_arithmetic() {
        let a = ValExp::new(1, 2);
        assert_eq!((a + ValExp::new(1, 3)).to_string(), "5/6");
        assert_eq!(ValExp::parse("4/8").unwrap(), a);
        assert_eq!(ValExp::int(3).to_string(), "3");
        assert_eq!(ValExp::new(1, 4) * 2, ValExp::new(1, 2));
    }
}
