//! Factorization over `F_q`: squarefree decomposition, distinct-degree
//! splitting and Cantor-Zassenhaus equal-degree splitting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Fq, FqElem};
use super::poly::FqPoly;
use crate::error::{Error, Result};

const EDF_SEED: u64 = 0x7a55_e0f1_c0de_2024;

/// `g = unit * prod f_i^{e_i}` with monic irreducible `f_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FqElem,
    /// Sorted by degree, then by coefficients.
    pub factors: Vec<(FqPoly, u32)>,
}

impl Factorization {
    pub fn expand(&self, k: &Fq) -> FqPoly {
        self.factors
            .iter()
            .fold(FqPoly::constant(self.unit), |acc, (f, e)| acc.mul(&f.pow(*e as u64, k), k))
    }
}

/// Full factorization of a nonzero polynomial.
pub fn poly_factor(g: &FqPoly, k: &Fq) -> Result<Factorization> {
    if g.is_zero() {
        return Err(Error::ZeroFactorization);
    }
    let unit = g.lead();
    let monic = g.monic(k);
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut factors = Vec::new();
    for (part, mult) in squarefree(&monic, k) {
        for (block, d) in distinct_degree(&part, k) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, k, &mut rng, &mut pieces);
            factors.extend(pieces.into_iter().map(|f| (f, mult)));
        }
    }
    factors.sort();
    // Squarefree parts are coprime, so each irreducible occurs once.
    Ok(Factorization { unit, factors })
}

/// True iff `g` has positive degree and no nontrivial factorization.
pub fn is_irreducible(g: &FqPoly, k: &Fq) -> bool {
    if g.degree().unwrap_or(0) == 0 {
        return false;
    }
    match poly_factor(g, k) {
        Ok(fact) => fact.factors.len() == 1 && fact.factors[0].1 == 1,
        Err(_) => false,
    }
}

/// The polynomial `h` with `h(t)^{p^m} = g(t^{p^m})`: each coefficient is
/// replaced by its `p^m`-th root.
pub fn frobenius_descend(g: &FqPoly, m: u32, k: &Fq) -> Result<FqPoly> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(g.map_coeffs(|c| k.frobenius_root(c, m)))
}

fn pth_root(c: &FqPoly, k: &Fq) -> FqPoly {
    let p = k.p() as usize;
    FqPoly::new(
        c.coeffs()
            .iter()
            .step_by(p)
            .map(|&a| k.frobenius_root(a, 1))
            .collect(),
    )
}

/// Squarefree decomposition of a monic polynomial into coprime squarefree
/// parts with multiplicities.
fn squarefree(f: &FqPoly, k: &Fq) -> Vec<(FqPoly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative(k), k);
    let mut w = f.div_exact(&c, k).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c, k);
        let fac = w.div_exact(&y, k).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y.clone();
        c = c.div_exact(&y, k).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        let root = pth_root(&c, k);
        for (g, j) in squarefree(&root, k) {
            out.push((g, j * k.p()));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree.
fn distinct_degree(f: &FqPoly, k: &Fq) -> Vec<(FqPoly, usize)> {
    let mut out = Vec::new();
    let mut h = f.clone();
    let x = FqPoly::x();
    let mut x_pow = x.clone();
    let mut d = 1;
    while h.degree().unwrap_or(0) >= 2 * d {
        x_pow = x_pow.pow_mod(k.q() as u128, &h, k);
        let g = h.gcd(&x_pow.sub(&x, k), k);
        if !g.is_one() {
            h = h.div_exact(&g, k).expect("gcd divides");
            x_pow = x_pow.rem(&h, k);
            out.push((g, d));
        }
        d += 1;
    }
    if h.degree().unwrap_or(0) > 0 {
        let deg = h.degree().unwrap();
        out.push((h, deg));
    }
    out
}

fn random_poly(deg_bound: usize, k: &Fq, rng: &mut ChaCha8Rng) -> FqPoly {
    FqPoly::new((0..deg_bound).map(|_| k.random(rng)).collect())
}

fn equal_degree(f: &FqPoly, d: usize, k: &Fq, rng: &mut ChaCha8Rng, out: &mut Vec<FqPoly>) {
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return;
    }
    if n == d {
        out.push(f.monic(k));
        return;
    }
    let q = k.q() as u128;
    loop {
        let a = random_poly(n, k, rng);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let b = if k.p() == 2 {
            // Absolute trace to F_2 of the residue class of a.
            let rounds = k.degree() as usize * d;
            let mut t = a.rem(f, k);
            let mut acc = t.clone();
            for _ in 1..rounds {
                t = t.mul(&t, k).rem(f, k);
                acc = acc.add(&t, k);
            }
            acc
        } else {
            // a^{(q^d - 1)/2} = (a^{1 + q + .. + q^{d-1}})^{(q - 1)/2}
            let mut t = a.rem(f, k);
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.pow_mod(q, f, k);
                norm = norm.mul(&t, k).rem(f, k);
            }
            norm.pow_mod((q - 1) / 2, f, k).sub(&FqPoly::one(), k)
        };
        let g = f.gcd(&b, k);
        let dg = g.degree().unwrap_or(0);
        if dg > 0 && dg < n {
            let cofactor = f.div_exact(&g, k).expect("gcd divides");
            equal_degree(&g, d, k, rng, out);
            equal_degree(&cofactor, d, k, rng, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(k: &Fq, c: &[u32]) -> FqPoly {
        FqPoly::new(c.iter().map(|&x| k.elem(x)).collect())
    }

    #[test]
    fn t2_plus_t_over_f2() {
        let k = Fq::prime(2).unwrap();
        let f = poly_factor(&poly(&k, &[0, 1, 1]), &k).unwrap();
        assert_eq!(f.factors, vec![(poly(&k, &[0, 1]), 1), (poly(&k, &[1, 1]), 1)]);
    }

    #[test]
    fn t2_plus_1_over_f2_is_square() {
        let k = Fq::prime(2).unwrap();
        let f = poly_factor(&poly(&k, &[1, 0, 1]), &k).unwrap();
        assert_eq!(f.factors, vec![(poly(&k, &[1, 1]), 2)]);
    }

    #[test]
    fn t4_t_1_irreducible_over_f2() {
        let k = Fq::prime(2).unwrap();
        let g = poly(&k, &[1, 1, 0, 0, 1]);
        // Oracle: no polynomial of degree 1 or 2 over F_2 divides g.
        for code in 2u32..8 {
            let d = poly(&k, &[code & 1, (code >> 1) & 1, code >> 2]);
            if d.degree().unwrap() >= 1 {
                assert!(!g.rem(&d, &k).is_zero());
            }
        }
        let f = poly_factor(&g, &k).unwrap();
        assert_eq!(f.factors, vec![(g, 1)]);
    }

    #[test]
    fn zero_has_no_factorization() {
        let k = Fq::prime(3).unwrap();
        assert_eq!(poly_factor(&FqPoly::zero(), &k), Err(Error::ZeroFactorization));
    }

    #[test]
    fn leading_unit_and_high_multiplicity() {
        let k = Fq::prime(3).unwrap();
        // 2 (t+1)^7 (t^2+1)^3
        let a = poly(&k, &[1, 1]).pow(7, &k);
        let b = poly(&k, &[1, 0, 1]).pow(3, &k);
        let g = a.mul(&b, &k).scale(k.elem(2), &k);
        let f = poly_factor(&g, &k).unwrap();
        assert_eq!(f.unit, k.elem(2));
        assert_eq!(f.factors, vec![(poly(&k, &[1, 1]), 7), (poly(&k, &[1, 0, 1]), 3)]);
        assert_eq!(f.expand(&k), g);
    }

    #[test]
    fn descend_examples() {
        let f2 = Fq::prime(2).unwrap();
        assert_eq!(frobenius_descend(&poly(&f2, &[1, 1]), 1, &f2).unwrap(), poly(&f2, &[1, 1]));
        let f3 = Fq::prime(3).unwrap();
        assert_eq!(frobenius_descend(&poly(&f3, &[0, 1]), 1, &f3).unwrap(), poly(&f3, &[0, 1]));
        let f4 = Fq::of_order(4).unwrap();
        let c = f4.elem(2);
        let h = frobenius_descend(&FqPoly::new(vec![c, FqElem::ONE]), 1, &f4).unwrap();
        assert_eq!(h, FqPoly::new(vec![f4.mul(c, c), FqElem::ONE]));
        // squaring h gives s + c at s = t^2
        assert_eq!(h.pow(2, &f4), FqPoly::new(vec![c, FqElem::ONE]).inflate(2));
        assert_eq!(frobenius_descend(&FqPoly::zero(), 1, &f4), Err(Error::ZeroPolynomial));
    }
}
