//! Seeded property suites. The CLI `check` command and the acceptance
//! tests both run these, so a suite name plus a seed reproduces a run.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{poly_factor, is_irreducible, Fq, LaurentPoly};
use crate::graded::TateElem;
use crate::hasse::{HigherDerivation, HypReport, Trunc};
use crate::lubin_tate::{field_for_degree, FormalGroup, Identity, LubinTate};
use crate::padic::{RamifiedElem, RamifiedField, ValExp};
use crate::picard::{class_order, divisor, ramification_map, Decomposition, DescentPresentation};
use crate::random::{random_admissible_c, random_laurent, random_nonzero_laurent, random_poly};
use crate::series::PowSeries;
use crate::trunc::TruncElem;

pub const SUITES: &[&str] = &[
    "cyclic",
    "sharpness",
    "decompose",
    "convolution",
    "hyp",
    "lubin-tate",
    "closed-form",
    "radius",
    "symbol",
    "divisor",
    "factor",
    "valuation",
];

/// Degree cap of the Lubin-Tate suites.
pub const LT_CAP: u32 = 12;

const MAX_MESSAGES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    /// Requested cases per configuration.
    pub cases: u64,
    /// Individual assertions evaluated.
    pub checks: u64,
    pub failed: u64,
    /// The first failure messages.
    pub failures: Vec<String>,
    pub notes: BTreeMap<String, String>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, cases: u64) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            cases,
            checks: 0,
            failed: 0,
            failures: Vec::new(),
            notes: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_MESSAGES {
            self.failures.push(msg);
        }
    }

    /// Records an error as a failed check.
    fn guard<T>(&mut self, ctx: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.fail(format!("{ctx}: {e}"));
                None
            }
        }
    }

    fn identity(&mut self, ctx: &str, r: Result<Identity>, min_prec: i64) {
        let Some(id) = self.guard(ctx, r) else { return };
        self.check(id.holds, || format!("{ctx}: {}", id.mismatch.as_ref().map_or(String::new(), |m| m.to_string())));
        if let Some(p) = id.min_precision {
            self.check(p >= min_prec, || format!("{ctx}: only {p} pi-digits of precision left, need {min_prec}"));
        }
    }
}

fn rng_for(seed: u64, config: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ config.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// `(p, m, q)` for `p in {2, 3}`, `m in {1, 2}`, `q in {p, p^2}`.
pub fn char_p_configs() -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for p in [2u32, 3] {
        for m in [1u32, 2] {
            for q in [p, p * p] {
                out.push((p, m, q));
            }
        }
    }
    out
}

fn config_label(p: u32, m: u32, q: u32) -> String {
    format!("p={p},m={m},q={q}")
}

/// `(p, e, q)` of the Lubin-Tate suites; all use `E = pi^e - p`.
pub fn lt_configs() -> Vec<(u32, u32, u64)> {
    vec![(2, 1, 2), (3, 1, 3), (2, 2, 2)]
}

fn lt_label(p: u32, e: u32, q: u64) -> String {
    format!("p={p},e={e},q={q}")
}

pub fn lt_field(p: u32, e: u32, q: u64, cap: u32) -> Result<RamifiedField> {
    field_for_degree(p, RamifiedField::default_eisenstein(p, e), cap, q)
}

pub fn run_suite(name: &str, seed: u64, cases: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(name, seed, cases);
    match name {
        "cyclic" => cyclic(&mut r)?,
        "sharpness" => sharpness(&mut r)?,
        "decompose" => decompose(&mut r)?,
        "convolution" => convolution(&mut r)?,
        "hyp" => hyp(&mut r)?,
        "lubin-tate" => lubin_tate(&mut r)?,
        "closed-form" => closed_form(&mut r)?,
        "radius" => radius(&mut r)?,
        "symbol" => symbol(&mut r)?,
        "divisor" => divisors(&mut r)?,
        "factor" => factor(&mut r)?,
        "valuation" => valuation(&mut r)?,
        _ => {
            return Err(Error::InvalidArgument(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))))
        }
    }
    Ok(r)
}

fn cyclic(r: &mut SuiteReport) -> Result<()> {
    for (idx, (p, m, q)) in char_p_configs().into_iter().enumerate() {
        let k = Fq::of_order(q as u64)?;
        let mut rng = rng_for(r.seed, idx as u64);
        let pm = (p as u64).pow(m);
        let mut hist: BTreeMap<u64, u64> = BTreeMap::new();
        for case in 0..r.cases {
            let c = random_admissible_c(&k, &mut rng, m);
            let Some(order) = r.guard(&format!("{} case {case}", config_label(p, m, q)), class_order(&k, &c)) else {
                continue;
            };
            *hist.entry(order).or_default() += 1;
            r.check(pm % order == 0, || format!("{} c = {c}: order {order} does not divide {pm}", config_label(p, m, q)));
        }
        let h: Vec<String> = hist.iter().map(|(o, n)| format!("{o}:{n}")).collect();
        r.notes.insert(config_label(p, m, q), format!("orders {}", h.join(" ")));
    }
    Ok(())
}

/// `L'` from `d(t^i) t^{-i}` directly, independent of the group routine.
fn lprime_oracle(hd: &HigherDerivation) -> Result<Vec<Trunc>> {
    let size = (hd.field().p() as i64).pow(hd.exponent());
    let mut out = Vec::new();
    for i in 0..size {
        let img = hd.apply(&LaurentPoly::t_pow(i))?;
        out.push(TruncElem::new(img.coeffs().iter().map(|c| c.shift_t(-i)).collect()));
    }
    Ok(out)
}

fn sharpness(r: &mut SuiteReport) -> Result<()> {
    for (p, m, q) in char_p_configs() {
        let k = Fq::of_order(q as u64)?;
        let label = config_label(p, m, q);
        let hd = HigherDerivation::standard(&k, m)?;
        let ring = hd.ring();
        let rank = hd.rank();
        let mut coeffs = vec![LaurentPoly::zero(); rank + 1];
        coeffs[0] = LaurentPoly::one();
        coeffs[1] = LaurentPoly::one();
        let c = TruncElem::new(coeffs);
        let lprime = lprime_oracle(&hd)?;
        let pm = (p as u64).pow(m);
        let mut power = c.clone();
        let mut oracle = None;
        for j in 1..=pm {
            if lprime.contains(&power) {
                oracle = Some(j);
                break;
            }
            power = power.mul(&c, &ring)?;
        }
        let Some(order) = r.guard(&label, class_order(&k, &c)) else { continue };
        r.check(oracle == Some(order), || format!("{label}: class_order {order}, oracle {oracle:?}"));
        r.check(order == pm, || format!("{label}: class_order(1+T) = {order}, expected {pm}"));
        r.notes.insert(label, format!("order {order}"));
    }
    Ok(())
}

fn decompose(r: &mut SuiteReport) -> Result<()> {
    for (idx, (p, m, q)) in char_p_configs().into_iter().enumerate() {
        let k = Fq::of_order(q as u64)?;
        let label = config_label(p, m, q);
        let mut rng = rng_for(r.seed, 100 + idx as u64);
        let pm = (p as u64).pow(m);
        let (mut units, mut others) = (0u64, 0u64);
        for case in 0..r.cases {
            let c = random_admissible_c(&k, &mut rng, m);
            let pres = match DescentPresentation::new(&k, m, c) {
                Ok(x) => x,
                Err(e) => {
                    r.guard::<()>(&format!("{label} case {case}"), Err(e));
                    continue;
                }
            };
            let a = rng.gen_range(0..=4u32);
            let i = rng.gen_range(-4..=4i64);
            let mut f = LaurentPoly::monomial(k.random_nonzero(&mut rng), i, a);
            if rng.gen_bool(0.5) {
                let h = random_nonzero_laurent(&k, &mut rng, -2..=2, 1, 2);
                f = f.mul(&h.pow(pm, &k), &k);
            } else {
                f = f.mul(&random_nonzero_laurent(&k, &mut rng, -2..=2, 1, 3), &k);
            }
            let ctx = format!("{label} f = {f}");
            let Some(dec) = r.guard(&ctx, pres.decompose(&f)) else { continue };
            match dec {
                Decomposition::Unit { j, i } => {
                    units += 1;
                    let ratio = crate::picard::log_derivative(pres.derivation(), &f);
                    let Some(ratio) = r.guard(&ctx, ratio) else { continue };
                    r.check(pres.reconstruct(j, i) == ratio.value, || format!("{ctx}: reconstruction with (j, i) = ({j}, {i}) differs"));
                    r.check(j < pm && i < pm, || format!("{ctx}: indices out of range"));
                }
                Decomposition::NotAUnitClass => {
                    others += 1;
                    let integral = crate::picard::log_derivative(pres.derivation(), &f).is_ok();
                    r.check(!integral, || format!("{ctx}: integral ratio reported as non-unit"));
                }
            }
        }
        r.notes.insert(label, format!("unit {units}, non-unit {others}"));
    }
    Ok(())
}

fn convolution(r: &mut SuiteReport) -> Result<()> {
    for (idx, (p, m, q)) in char_p_configs().into_iter().enumerate() {
        let k = Fq::of_order(q as u64)?;
        let label = config_label(p, m, q);
        let mut rng = rng_for(r.seed, 200 + idx as u64);
        let base = HigherDerivation::standard(&k, m)?;
        for _ in 0..r.cases {
            let a = random_laurent(&k, &mut rng, -4..=4, 0, 4);
            let b = random_laurent(&k, &mut rng, -4..=4, 0, 4);
            let ok = base.convolution_check(&a, &b);
            if let Some(ok) = r.guard(&label, ok) {
                r.check(ok, || format!("{label}: d(ab) != d(a)d(b) for a = {a}, b = {b}"));
            }
            let c = random_admissible_c(&k, &mut rng, m);
            let Some(ext) = r.guard(&label, base.extend_to_disc(&c)) else { continue };
            let a = random_laurent(&k, &mut rng, -3..=3, 2, 4);
            let b = random_laurent(&k, &mut rng, -3..=3, 2, 4);
            if let Some(ok) = r.guard(&label, ext.convolution_check(&a, &b)) {
                r.check(ok, || format!("{label}: d'(ab) != d'(a)d'(b) for c = {c}, a = {a}, b = {b}"));
            }
        }
    }
    Ok(())
}

fn hyp(r: &mut SuiteReport) -> Result<()> {
    for p in [2u32, 3, 5] {
        for m in [1u32, 2] {
            let k = Fq::prime(p)?;
            let hd = HigherDerivation::standard(&k, m)?;
            let rep = hd.hyp_check((p as u64).pow(m));
            let want = HypReport { mu: Some(1), n: m, holds: true };
            r.check(rep == want, || format!("p={p},m={m}: {rep:?}"));
            // t^(p^m) is a constant, t is not.
            let tp = LaurentPoly::t_pow((p as i64).pow(m));
            r.check(hd.constants_check(&tp)?, || format!("p={p},m={m}: t^(p^m) not constant"));
            r.check(!hd.constants_check(&LaurentPoly::t())?, || format!("p={p},m={m}: t constant"));
            r.notes.insert(format!("p={p},m={m}"), format!("mu={:?} n={} holds={}", rep.mu, rep.n, rep.holds));
        }
    }
    Ok(())
}

fn special_scalars(f: &RamifiedField) -> Vec<RamifiedElem> {
    vec![f.from_int(2), f.from_int(3), f.pi(), f.pi().add(&f.one())]
}

fn lubin_tate(r: &mut SuiteReport) -> Result<()> {
    for (idx, (p, e, q)) in lt_configs().into_iter().enumerate() {
        let label = lt_label(p, e, q);
        let field = lt_field(p, e, q, LT_CAP)?;
        let min_prec = field.cap() / 2;
        let lt = LubinTate::new(&field, q)?;
        let Some(g) = r.guard(&label, FormalGroup::new(&lt, LT_CAP)) else { continue };
        let mut rng = rng_for(r.seed, 300 + idx as u64);
        r.identity(&format!("{label} commutativity"), g.commutativity(), min_prec);
        r.identity(&format!("{label} associativity"), g.associativity(), min_prec);
        r.identity(&format!("{label} F(X,0)=X"), g.identity_axiom(), min_prec);
        let scalars = special_scalars(&field);
        for a in &scalars {
            for b in &scalars {
                r.identity(&format!("{label} [{a}][{b}]"), g.composition_law(a, b), min_prec);
            }
            r.identity(&format!("{label} F([a]X,[a]Y) for a = {a}"), g.endomorphism_of_law(a), min_prec);
        }
        r.identity(&format!("{label} exp(log X)"), g.exp_log(), min_prec);
        r.identity(&format!("{label} log(exp X)"), g.log_exp(), min_prec);
        r.identity(&format!("{label} log additivity"), g.log_additivity(), min_prec);
        for _ in 0..r.cases {
            let a = field.random_integral(&mut rng);
            r.identity(&format!("{label} scalar_via_log a = {a}"), g.scalar_via_log(&a), min_prec);
        }
        for _ in 0..(r.cases / 2).max(1) {
            let u = field.one().add(&field.pi().mul(&field.random_integral(&mut rng)));
            let Some(h) = r.guard(&format!("{label} h_series u = {u}"), g.h_series(&u)) else { continue };
            r.identity(&format!("{label} group identity u = {u}"), Ok(h.group_identity), min_prec);
            r.identity(&format!("{label} h inverse u = {u}"), Ok(h.inverse_identity), min_prec);
        }
        r.notes.insert(label, format!("cap {LT_CAP}, digits {}, precision floor {min_prec}", field.digits()));
    }
    Ok(())
}

fn int_series(f: &RamifiedField, nvars: usize, terms: &[([u32; 3], i64)]) -> PowSeries {
    let mut s = PowSeries::zero(f, nvars, LT_CAP);
    for (m, c) in terms {
        s.set(*m, f.from_int(*c));
    }
    s
}

fn closed_form(r: &mut SuiteReport) -> Result<()> {
    let field = lt_field(2, 1, 2, LT_CAP)?;
    let min_prec = field.cap() / 2;
    let lt = LubinTate::new(&field, 2)?;
    let law = int_series(&field, 2, &[([1, 0, 0], 1), ([0, 1, 0], 1), ([1, 1, 0], 1)]);
    let cubic = int_series(&field, 1, &[([1, 0, 0], 3), ([2, 0, 0], 3), ([3, 0, 0], 1)]);
    let Some(g) = r.guard("Q_2 formal group", FormalGroup::new(&lt, LT_CAP)) else { return Ok(()) };
    r.identity("group law = X+Y+XY", Ok(Identity::compare(&g.law, &law)), min_prec);
    let three = field.from_int(3);
    r.identity("[3](Z) = 3Z+3Z^2+Z^3", g.endomorphism(&three).map(|s| Identity::compare(&s, &cubic)), min_prec);
    r.identity("h_series(3) = 3Z+3Z^2+Z^3", g.h_series(&three).map(|h| Identity::compare(&h.series, &cubic)), min_prec);
    // log = sum (-1)^(n+1) X^n / n
    let mut log = PowSeries::zero(&field, 1, LT_CAP);
    for n in 1..=LT_CAP as i64 {
        log.set([n as u32, 0, 0], field.from_int(if n % 2 == 1 { 1 } else { -1 }).div_int(n)?);
    }
    r.identity("log = log(1+X)", Ok(Identity::compare(&g.log, &log)), min_prec);
    Ok(())
}

/// Ladder check for one field: `radius(n)` against the closed form, the
/// boundary run from `v(r_n)` and an interior run from `8/7 v(r_n)`.
fn radius(r: &mut SuiteReport) -> Result<()> {
    for (p, e, q) in lt_configs() {
        let label = lt_label(p, e, q);
        let field = lt_field(p, e, q, 1)?;
        let lt = LubinTate::new(&field, q)?;
        let (ei, qi) = (e as i64, q as i64);
        let vr = ValExp::new(qi, ei * (qi - 1));
        let mut expected = vr;
        for n in 0..=4u32 {
            let got = lt.radius(n)?;
            r.check(got == expected, || format!("{label}: v(r_{n}) = {got}, expected {expected}"));
            let steps = e * n;
            if steps > 0 {
                let ladder = lt.ladder(got, steps)?;
                let last = ladder.last().expect("nonempty");
                r.check(last.bound == vr, || format!("{label} n={n}: ladder ends at {}, expected {vr}", last.bound));
                let ties: Vec<bool> = ladder.iter().map(|s| s.tie).collect();
                let want: Vec<bool> = (0..steps).map(|i| i + 1 == steps).collect();
                r.check(ties == want, || format!("{label} n={n}: tie pattern {ties:?}"));
                let inner = lt.ladder(got * 8 / 7, steps)?;
                r.check(inner.iter().all(|s| !s.tie), || format!("{label} n={n}: interior run has a tie"));
                let end = inner.last().expect("nonempty").bound;
                r.check(end > vr, || format!("{label} n={n}: interior run ends at {end}, not past {vr}"));
            }
            for _ in 0..e {
                expected = expected / qi;
            }
        }
        r.notes.insert(label, format!("v(r) = {vr}, v(r_4) = {}", lt.radius(4)?));
    }
    Ok(())
}

fn symbol_fields() -> Result<Vec<RamifiedField>> {
    Ok(vec![
        RamifiedField::unramified(2, 24)?,
        RamifiedField::unramified(3, 16)?,
        RamifiedField::new(2, RamifiedField::default_eisenstein(2, 2), 24)?,
    ])
}

fn symbol(r: &mut SuiteReport) -> Result<()> {
    for (idx, f) in symbol_fields()?.into_iter().enumerate() {
        let label = format!("p={},e={}", f.p(), f.e());
        let k = Fq::prime(f.p())?;
        let mut rng = rng_for(r.seed, 400 + idx as u64);
        for _ in 0..r.cases {
            let a = TateElem::random(&f, &mut rng, 4, 3, -2, 3);
            let b = TateElem::random(&f, &mut rng, 4, 3, -2, 3);
            let ctx = format!("{label} a = {a}, b = {b}");
            let (Some(sa), Some(sb)) = (r.guard(&ctx, a.principal_symbol()), r.guard(&ctx, b.principal_symbol())) else {
                continue;
            };
            let Some(sab) = r.guard(&ctx, a.mul(&b).principal_symbol()) else { continue };
            let prod = sa.mul(&sb, &k);
            r.check(sab == prod, || format!("{ctx}: symbol {sab} != {prod}"));
            if let Ok(d) = a.add(&b).spectral_degree() {
                r.check(d >= sa.degree.min(sb.degree), || format!("{ctx}: deg(a+b) = {d} below min"));
            }
        }
    }
    Ok(())
}

fn divisors(r: &mut SuiteReport) -> Result<()> {
    for (idx, q) in [2u64, 3, 4].into_iter().enumerate() {
        let k = Fq::of_order(q)?;
        let mut rng = rng_for(r.seed, 500 + idx as u64);
        for m in [1u32, 2] {
            let pm = (k.p() as usize).pow(m);
            for _ in 0..r.cases {
                let g = random_poly(&k, &mut rng, 6);
                let ctx = format!("q={q},m={m} g = {g}");
                let lower = divisor(&k, &LaurentPoly::from_poly(&g));
                let Some(lower) = r.guard(&ctx, lower) else { continue };
                let Some(pushed) = r.guard(&ctx, ramification_map(&k, &lower, m)) else { continue };
                let direct = divisor(&k, &LaurentPoly::from_poly(&g.inflate(pm)));
                let Some(direct) = r.guard(&ctx, direct) else { continue };
                r.check(pushed == direct, || format!("{ctx}: j(div g) = {pushed}, div g(t^p^m) = {direct}"));
            }
        }
        for _ in 0..r.cases {
            let a = random_nonzero_laurent(&k, &mut rng, -3..=3, 0, 4);
            let b = random_nonzero_laurent(&k, &mut rng, -3..=3, 0, 4);
            let ctx = format!("q={q} a = {a}, b = {b}");
            let (Some(da), Some(db), Some(dab)) =
                (r.guard(&ctx, divisor(&k, &a)), r.guard(&ctx, divisor(&k, &b)), r.guard(&ctx, divisor(&k, &a.mul(&b, &k))))
            else {
                continue;
            };
            r.check(dab == da.add(&db), || format!("{ctx}: div not additive"));
        }
    }
    Ok(())
}

fn factor(r: &mut SuiteReport) -> Result<()> {
    for (idx, q) in [2u64, 3, 4, 5, 8, 9, 16, 25].into_iter().enumerate() {
        let k = Fq::of_order(q)?;
        let mut rng = rng_for(r.seed, 600 + idx as u64);
        for _ in 0..r.cases {
            let g = random_poly(&k, &mut rng, 12);
            let Some(fact) = r.guard(&format!("q={q} g = {g}"), poly_factor(&g, &k)) else { continue };
            r.check(fact.expand(&k) == g, || format!("q={q}: factorization of {g} does not expand back"));
            for (h, _) in &fact.factors {
                r.check(h.is_monic() && is_irreducible(h, &k), || format!("q={q}: factor {h} of {g} not monic irreducible"));
            }
        }
    }
    Ok(())
}

fn valuation(r: &mut SuiteReport) -> Result<()> {
    for (idx, f) in symbol_fields()?.into_iter().enumerate() {
        let label = format!("p={},e={}", f.p(), f.e());
        let mut rng = rng_for(r.seed, 700 + idx as u64);
        for _ in 0..r.cases {
            let a = f.random_with_shift(&mut rng, -4, 8);
            let b = f.random_with_shift(&mut rng, -4, 8);
            let (va, vb) = (a.valuation()?, b.valuation()?);
            let vab = a.mul(&b).valuation()?;
            r.check(vab == va + vb, || format!("{label}: v({a} * {b}) = {vab}"));
            let s = a.add(&b);
            if va != vb {
                r.check(s.valuation().ok() == Some(va.min(vb)), || format!("{label}: v({a} + {b}) not the minimum"));
            } else if let Ok(vs) = s.valuation() {
                r.check(vs >= va, || format!("{label}: v({a} + {b}) = {vs} below {va}"));
            }
        }
        let eps = f.pi().pow(f.e() as u64).div_int(f.p() as i64)?;
        r.check(eps.is_unit(), || format!("{label}: pi^e / p is not a unit"));
    }
    Ok(())
}
