//! Lubin-Tate formal groups for `[pi](X) = pi X + X^q` over a totally
//! ramified field, built degree by degree from the uniqueness recursion:
//! a degree-`d` coefficient `c` enters `f(phi) = phi(f)` as
//! `(pi - pi^d) c = [phi_<d(f)]_d - [f(phi_<d)]_d`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{RamifiedElem, RamifiedField, ValExp};
use crate::series::{Mismatch, Mono, PowSeries};

/// `N (1 + ceil(N / (q - 1)))`: p-adic digits required at degree cap `N`.
pub fn policy_digits(cap: u32, q: u64) -> u32 {
    let q1 = (q - 1) as u32;
    cap * (1 + cap.div_ceil(q1))
}

/// A field carrying exactly the digits the policy requires.
pub fn field_for_degree(p: u32, eisenstein: Vec<num_bigint::BigInt>, cap: u32, q: u64) -> Result<RamifiedField> {
    RamifiedField::new(p, eisenstein, policy_digits(cap, q).max(1))
}

#[derive(Clone, Debug)]
pub struct LubinTate {
    field: RamifiedField,
    q: u64,
}

/// Outcome of comparing two series coefficientwise.
#[derive(Clone, Debug)]
pub struct Identity {
    pub holds: bool,
    pub mismatch: Option<Mismatch>,
    /// Smallest absolute precision (powers of `pi`) among the compared
    /// coefficients.
    pub min_precision: Option<i64>,
}

impl Identity {
    pub fn compare(lhs: &PowSeries, rhs: &PowSeries) -> Identity {
        let mismatch = lhs.first_mismatch(rhs);
        let min_precision = match (lhs.min_precision(), rhs.min_precision()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        Identity { holds: mismatch.is_none(), mismatch, min_precision }
    }
}

/// `h(Z) = exp(u log Z)` with its two verified identities.
#[derive(Clone, Debug)]
pub struct HSeries {
    pub series: PowSeries,
    pub inverse: PowSeries,
    /// `v(u - 1)`; `None` when `u - 1` vanishes at the tracked precision.
    pub level: Option<ValExp>,
    /// `h(Z) = F(Z, exp((u - 1) log Z))`.
    pub group_identity: Identity,
    /// `h(h^{-1}(Z)) = Z` and `h^{-1}(h(Z)) = Z`.
    pub inverse_identity: Identity,
}

/// Lower bound for `v([pi](z))` given `v(z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ImageBound {
    pub bound: ValExp,
    /// Both Newton branches coincide; `bound` is then only a lower bound.
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LadderStep {
    pub input: ValExp,
    pub bound: ValExp,
    pub tie: bool,
}

/// The group law with its logarithm and exponential at one degree cap.
#[derive(Clone, Debug)]
pub struct FormalGroup {
    pub lt: LubinTate,
    pub cap: u32,
    pub law: PowSeries,
    pub log: PowSeries,
    pub exp: PowSeries,
}

impl LubinTate {
    /// `q` must be a power of the residue characteristic.
    pub fn new(field: &RamifiedField, q: u64) -> Result<LubinTate> {
        let p = field.p() as u64;
        let mut r = q;
        while r > 1 && r.is_multiple_of(p) {
            r /= p;
        }
        if q < p || r != 1 {
            return Err(Error::InvalidArgument(format!("q = {q} is not a power of p = {p}")));
        }
        Ok(LubinTate { field: field.clone(), q })
    }

    pub fn field(&self) -> &RamifiedField {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn check_policy(&self, cap: u32) -> Result<()> {
        if cap == 0 {
            return Err(Error::InvalidArgument("degree cap must be positive".into()));
        }
        let needed = policy_digits(cap, self.q);
        if self.field.digits() < needed {
            return Err(Error::PrecisionPolicy { needed, available: self.field.digits() });
        }
        Ok(())
    }

    /// `f(X) = pi X + X^q` in `nvars` variables, in variable `var`.
    pub fn frobenius_lift(&self, nvars: usize, var: usize, cap: u32) -> PowSeries {
        let mut s = PowSeries::zero(&self.field, nvars, cap);
        let mut m: Mono = [0; 3];
        m[var] = 1;
        s.set(m, self.field.pi());
        if self.q <= cap as u64 {
            m[var] = self.q as u32;
            s.set(m, self.field.one());
        }
        s
    }

    fn pivot(&self, d: u32) -> RamifiedElem {
        let pi = self.field.pi();
        pi.sub(&pi.pow(d as u64))
    }

    /// `[a](X)`.
    pub fn lt_endomorphism(&self, a: &RamifiedElem, cap: u32) -> Result<PowSeries> {
        self.check_policy(cap)?;
        if !a.is_integral() {
            return Err(Error::NonIntegral);
        }
        let mut phi = PowSeries::zero(&self.field, 1, cap);
        phi.set([1, 0, 0], a.clone());
        for d in 2..=cap {
            let f = self.frobenius_lift(1, 0, d);
            let g = phi.with_cap(d);
            let lhs = f.compose(std::slice::from_ref(&g))?;
            let rhs = g.compose(&[f])?;
            let m = [d, 0, 0];
            let c = rhs.coeff_or_zero(m).sub(&lhs.coeff_or_zero(m)).div(&self.pivot(d))?;
            phi.set(m, c);
        }
        Ok(phi)
    }

    /// `F(X, Y)`.
    pub fn group_law(&self, cap: u32) -> Result<PowSeries> {
        self.check_policy(cap)?;
        let one = self.field.one();
        let mut law = PowSeries::zero(&self.field, 2, cap);
        law.set([1, 0, 0], one.clone());
        law.set([0, 1, 0], one);
        for d in 2..=cap {
            let f1 = self.frobenius_lift(1, 0, d);
            let g = law.with_cap(d);
            let lhs = f1.compose(std::slice::from_ref(&g))?;
            let rhs = g.compose(&[self.frobenius_lift(2, 0, d), self.frobenius_lift(2, 1, d)])?;
            let pivot_inv = self.pivot(d).inv()?;
            for i in 0..=d {
                let m = [i, d - i, 0];
                let c = rhs.coeff_or_zero(m).sub(&lhs.coeff_or_zero(m)).mul(&pivot_inv);
                law.set(m, c);
            }
        }
        Ok(law)
    }

    /// `log_G` from the group law: `log' = 1 / F_Y(X, 0)`.
    pub fn log_from_law(&self, law: &PowSeries) -> Result<PowSeries> {
        let cap = law.cap();
        let deriv = PowSeries::from_coeffs(
            &self.field,
            cap.saturating_sub(1),
            (0..cap).map(|i| law.coeff_or_zero([i, 1, 0])).collect(),
        );
        let inv = deriv.inverse()?;
        let mut log = PowSeries::zero(&self.field, 1, cap);
        for n in 1..=cap {
            log.set([n, 0, 0], inv.coeff_or_zero([n - 1, 0, 0]).div_int(n as i64)?);
        }
        Ok(log)
    }

    /// Compositional inverse of a series `X + O(X^2)`.
    pub fn exp_from_log(&self, log: &PowSeries) -> Result<PowSeries> {
        let cap = log.cap();
        let mut exp = PowSeries::var(&self.field, 1, cap, 0);
        for d in 2..=cap {
            let partial = log.with_cap(d).compose(&[exp.with_cap(d)])?;
            exp.set([d, 0, 0], partial.coeff_or_zero([d, 0, 0]).neg());
        }
        Ok(exp)
    }

    pub fn lt_log(&self, cap: u32) -> Result<PowSeries> {
        self.log_from_law(&self.group_law(cap)?)
    }

    pub fn lt_exp(&self, cap: u32) -> Result<PowSeries> {
        self.exp_from_log(&self.lt_log(cap)?)
    }

    pub fn formal_group(&self, cap: u32) -> Result<FormalGroup> {
        let law = self.group_law(cap)?;
        let log = self.log_from_law(&law)?;
        let exp = self.exp_from_log(&log)?;
        Ok(FormalGroup { lt: self.clone(), cap, law, log, exp })
    }

    /// `exp_G(a log_G(X)) = [a](X)`.
    pub fn scalar_via_log(&self, a: &RamifiedElem, cap: u32) -> Result<bool> {
        Ok(self.formal_group(cap)?.scalar_via_log(a)?.holds)
    }

    pub fn h_series(&self, u: &RamifiedElem, cap: u32) -> Result<HSeries> {
        self.formal_group(cap)?.h_series(u)
    }

    /// `v(r_n) = q / (e (q - 1) q^(e n))`.
    pub fn radius(&self, n: u32) -> Result<ValExp> {
        let e = self.field.e() as i64;
        let q = self.q as i64;
        let big = q
            .checked_pow(self.field.e() * n)
            .and_then(|x| x.checked_mul(e * (q - 1)))
            .ok_or_else(|| Error::InvalidArgument(format!("radius index {n} overflows")))?;
        Ok(ValExp::new(q, big))
    }

    /// `min(1/e + v, q v)` with the tie flag.
    pub fn valuation_image(&self, v: ValExp) -> Result<ImageBound> {
        if !v.is_positive() {
            return Err(Error::InvalidArgument(format!("valuation {v} must be positive")));
        }
        let linear = v + ValExp::new(1, self.field.e() as i64);
        let power = v * self.q as i64;
        Ok(ImageBound { bound: linear.min(power), tie: linear == power })
    }

    /// Iterates [`Self::valuation_image`] `steps` times from `start`.
    pub fn ladder(&self, start: ValExp, steps: u32) -> Result<Vec<LadderStep>> {
        let mut out = Vec::with_capacity(steps as usize);
        let mut v = start;
        for _ in 0..steps {
            let b = self.valuation_image(v)?;
            out.push(LadderStep { input: v, bound: b.bound, tie: b.tie });
            v = b.bound;
        }
        Ok(out)
    }
}

impl FormalGroup {
    pub fn new(lt: &LubinTate, cap: u32) -> Result<FormalGroup> {
        lt.formal_group(cap)
    }

    fn field(&self) -> &RamifiedField {
        self.lt.field()
    }

    fn x(&self, nvars: usize, i: usize) -> PowSeries {
        PowSeries::var(self.field(), nvars, self.cap, i)
    }

    pub fn endomorphism(&self, a: &RamifiedElem) -> Result<PowSeries> {
        self.lt.lt_endomorphism(a, self.cap)
    }

    pub fn commutativity(&self) -> Result<Identity> {
        let swapped = self.law.compose(&[self.x(2, 1), self.x(2, 0)])?;
        Ok(Identity::compare(&self.law, &swapped))
    }

    pub fn associativity(&self) -> Result<Identity> {
        let (x, y, z) = (self.x(3, 0), self.x(3, 1), self.x(3, 2));
        let xy = self.law.compose(&[x.clone(), y.clone()])?;
        let yz = self.law.compose(&[y, z.clone()])?;
        let left = self.law.compose(&[xy, z])?;
        let right = self.law.compose(&[x, yz])?;
        Ok(Identity::compare(&left, &right))
    }

    /// `F(X, 0) = X`.
    pub fn identity_axiom(&self) -> Result<Identity> {
        let zero = PowSeries::zero(self.field(), 1, self.cap);
        let restricted = self.law.compose(&[self.x(1, 0), zero])?;
        Ok(Identity::compare(&restricted, &self.x(1, 0)))
    }

    /// `[a]([b](X)) = [ab](X)`.
    pub fn composition_law(&self, a: &RamifiedElem, b: &RamifiedElem) -> Result<Identity> {
        let ea = self.endomorphism(a)?;
        let eb = self.endomorphism(b)?;
        let eab = self.endomorphism(&a.mul(b))?;
        Ok(Identity::compare(&ea.compose(&[eb])?, &eab))
    }

    /// `F([a]X, [a]Y) = [a](F(X, Y))`.
    pub fn endomorphism_of_law(&self, a: &RamifiedElem) -> Result<Identity> {
        let ea = self.endomorphism(a)?;
        let ax = ea.compose(&[self.x(2, 0)])?;
        let ay = ea.compose(&[self.x(2, 1)])?;
        Ok(Identity::compare(&self.law.compose(&[ax, ay])?, &ea.compose(std::slice::from_ref(&self.law))?))
    }

    /// `log(F(X, Y)) = log X + log Y`.
    pub fn log_additivity(&self) -> Result<Identity> {
        let lhs = self.log.compose(std::slice::from_ref(&self.law))?;
        let rhs = self.log.compose(&[self.x(2, 0)])?.add(&self.log.compose(&[self.x(2, 1)])?);
        Ok(Identity::compare(&lhs, &rhs))
    }

    pub fn exp_log(&self) -> Result<Identity> {
        Ok(Identity::compare(&self.exp.compose(std::slice::from_ref(&self.log))?, &self.x(1, 0)))
    }

    pub fn log_exp(&self) -> Result<Identity> {
        Ok(Identity::compare(&self.log.compose(std::slice::from_ref(&self.exp))?, &self.x(1, 0)))
    }

    /// `exp(a log X)`.
    pub fn scaled(&self, a: &RamifiedElem) -> Result<PowSeries> {
        self.exp.compose(&[self.log.scale(a)])
    }

    pub fn scalar_via_log(&self, a: &RamifiedElem) -> Result<Identity> {
        Ok(Identity::compare(&self.scaled(a)?, &self.endomorphism(a)?))
    }

    pub fn h_series(&self, u: &RamifiedElem) -> Result<HSeries> {
        if !u.is_unit() {
            return Err(Error::NotAUnit);
        }
        let one = self.field().one();
        let w = u.sub(&one);
        let level = match w.valuation() {
            Ok(v) if !v.is_positive() => {
                return Err(Error::InvalidArgument(format!("v(u - 1) = {v} must be positive")));
            }
            Ok(v) => Some(v),
            Err(_) => None,
        };
        let series = self.scaled(u)?;
        let inverse = self.scaled(&u.inv()?)?;
        let z = self.x(1, 0);
        let shifted = self.scaled(&w)?;
        let rhs = self.law.compose(&[z.clone(), shifted])?;
        let group_identity = Identity::compare(&series, &rhs);
        let there = Identity::compare(&series.compose(std::slice::from_ref(&inverse))?, &z);
        let back = Identity::compare(&inverse.compose(std::slice::from_ref(&series))?, &z);
        let inverse_identity = if there.holds { back } else { there };
        Ok(HSeries { series, inverse, level, group_identity, inverse_identity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn lt(p: u32, e: u32, q: u64, cap: u32) -> LubinTate {
        let f = field_for_degree(p, RamifiedField::default_eisenstein(p, e), cap, q).unwrap();
        LubinTate::new(&f, q).unwrap()
    }

    fn uni(f: &RamifiedField, cap: u32, c: &[i64]) -> PowSeries {
        PowSeries::from_coeffs(f, cap, c.iter().map(|&x| f.from_int(x)).collect())
    }

    #[test]
    fn policy() {
        assert_eq!(policy_digits(12, 2), 156);
        assert_eq!(policy_digits(12, 3), 84);
        let f = RamifiedField::unramified(2, 20).unwrap();
        let l = LubinTate::new(&f, 2).unwrap();
        assert_eq!(l.group_law(6).err(), Some(Error::PrecisionPolicy { needed: 42, available: 20 }));
        assert!(LubinTate::new(&f, 6).is_err());
    }

    #[test]
    fn endomorphism_examples() {
        let l = lt(2, 1, 2, 8);
        let f = l.field().clone();
        assert!(l.lt_endomorphism(&f.one(), 8).unwrap().approx_eq(&PowSeries::var(&f, 1, 8, 0)));
        assert!(l.lt_endomorphism(&f.pi(), 8).unwrap().approx_eq(&l.frobenius_lift(1, 0, 8)));
        let three = l.lt_endomorphism(&f.from_int(3), 8).unwrap();
        assert!(three.approx_eq(&uni(&f, 8, &[0, 3, 3, 1])), "{three}");
        assert_eq!(l.lt_endomorphism(&f.from_int(2).inv().unwrap(), 8).err(), Some(Error::NonIntegral));
    }

    #[test]
    fn multiplicative_group_law() {
        let l = lt(2, 1, 2, 8);
        let f = l.field().clone();
        let law = l.group_law(8).unwrap();
        let mut expected = PowSeries::zero(&f, 2, 8);
        expected.set([1, 0, 0], f.one());
        expected.set([0, 1, 0], f.one());
        expected.set([1, 1, 0], f.one());
        assert!(law.approx_eq(&expected), "{law}");
    }

    #[test]
    fn multiplicative_log_and_exp() {
        let l = lt(2, 1, 2, 8);
        let f = l.field().clone();
        let log = l.lt_log(8).unwrap();
        for n in 1..=8i64 {
            let c = f.from_int(if n % 2 == 1 { 1 } else { -1 }).div_int(n).unwrap();
            assert!(log.coeff_or_zero([n as u32, 0, 0]).approx_eq(&c), "log coefficient {n}");
        }
        let exp = l.exp_from_log(&log).unwrap();
        let mut fact = 1i64;
        for n in 1..=8i64 {
            fact *= n;
            let c = f.one().div_int(fact).unwrap();
            assert!(exp.coeff_or_zero([n as u32, 0, 0]).approx_eq(&c), "exp coefficient {n}");
        }
    }

    #[test]
    fn h_series_for_three() {
        let l = lt(2, 1, 2, 8);
        let f = l.field().clone();
        let g = l.formal_group(8).unwrap();
        let h = g.h_series(&f.from_int(3)).unwrap();
        assert!(h.series.approx_eq(&uni(&f, 8, &[0, 3, 3, 1])));
        assert!(h.group_identity.holds);
        assert!(h.inverse_identity.holds);
        assert_eq!(h.level, Some(ValExp::int(1)));
        let id = g.h_series(&f.one()).unwrap();
        assert!(id.series.approx_eq(&PowSeries::var(&f, 1, 8, 0)));
        assert_eq!(id.level, None);
        assert_eq!(g.h_series(&f.from_int(2)).err(), Some(Error::NotAUnit));
    }

    #[test]
    fn ramified_group_axioms() {
        let l = lt(2, 2, 2, 6);
        let g = l.formal_group(6).unwrap();
        let pi = l.field().pi();
        assert!(g.commutativity().unwrap().holds);
        assert!(g.associativity().unwrap().holds);
        assert!(g.identity_axiom().unwrap().holds);
        assert!(g.log_additivity().unwrap().holds);
        assert!(g.exp_log().unwrap().holds && g.log_exp().unwrap().holds);
        assert!(g.endomorphism(&pi).unwrap().approx_eq(&l.frobenius_lift(1, 0, 6)));
        assert!(g.scalar_via_log(&pi).unwrap().holds);
        assert!(g.composition_law(&pi, &l.field().from_int(3)).unwrap().holds);
        assert!(g.endomorphism_of_law(&pi.add(&l.field().one())).unwrap().holds);
    }

    #[test]
    fn cubic_eisenstein_field() {
        let f = RamifiedField::new(3, vec![BigInt::from(3), BigInt::from(6), BigInt::from(0), BigInt::from(1)], policy_digits(5, 3)).unwrap();
        let l = LubinTate::new(&f, 3).unwrap();
        let g = l.formal_group(5).unwrap();
        assert!(g.associativity().unwrap().holds);
        assert!(g.scalar_via_log(&f.pi().add(&f.from_int(2))).unwrap().holds);
    }

    #[test]
    fn radius_examples() {
        let l = lt(2, 1, 2, 1);
        assert_eq!(l.radius(0).unwrap(), ValExp::int(2));
        assert_eq!(l.radius(3).unwrap(), ValExp::new(1, 4));
        assert_eq!(l.valuation_image(ValExp::int(3)).unwrap(), ImageBound { bound: ValExp::int(4), tie: false });
        assert_eq!(l.valuation_image(ValExp::int(1)).unwrap(), ImageBound { bound: ValExp::int(2), tie: true });
        assert!(l.valuation_image(ValExp::int(0)).is_err());
        let e2 = lt(2, 2, 2, 1);
        assert_eq!(e2.radius(1).unwrap(), ValExp::new(1, 4));
    }
}
