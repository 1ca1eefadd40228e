//! Command execution: each command turns a validated [`RunConfig`] into an
//! [`Outcome`] whose `ok` flag reports whether every asserted identity held.

use std::collections::BTreeMap;

use anyhow::{bail, Context};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use twistdisc::check::{run_suite, SUITES};
use twistdisc::ff::{prime_power, Fq};
use twistdisc::graded::TateElem;
use twistdisc::hasse::HigherDerivation;
use twistdisc::lubin_tate::{policy_digits, FormalGroup, Identity, LubinTate};
use twistdisc::padic::RamifiedElem;
use twistdisc::picard::DescentPresentation;
use twistdisc::random::random_admissible_c;
use twistdisc::series::PowSeries;
use twistdisc::trunc::parse_trunc;

use crate::config::{CharPDesc, Format, RunConfig, SeriesOp};

pub enum Body {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<String>> },
}

pub struct Outcome {
    pub ok: bool,
    /// Human-readable pinpointing of failed identities.
    pub failures: Vec<String>,
    pub body: Body,
}

impl Outcome {
    fn json(ok: bool, failures: Vec<String>, value: Value) -> Outcome {
        Outcome { ok, failures, body: Body::Json(value) }
    }
}

pub const COMMANDS: &[&str] = &["picard-order", "sweep", "lt-series", "radius", "symbol", "hyp", "check"];

pub fn run(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    if cfg.format == Format::Csv && cfg.command != "sweep" {
        bail!("format: csv is only available for sweep");
    }
    match cfg.command.as_str() {
        "picard-order" => picard_order(cfg),
        "sweep" => sweep(cfg),
        "lt-series" => lt_series(cfg),
        "radius" => radius(cfg),
        "symbol" => symbol(cfg),
        "hyp" => hyp(cfg),
        "check" => check(cfg),
        other => bail!("command: unknown {other:?}; expected one of {}", COMMANDS.join(", ")),
    }
}

fn residue_field(d: &CharPDesc) -> anyhow::Result<Fq> {
    if d.m == 0 {
        bail!("char_p.m: must be positive");
    }
    if prime_power(d.p as u64) != Some((d.p, 1)) {
        bail!("char_p.p: {} is not prime", d.p);
    }
    Fq::of_order(d.q()?).context("char_p")
}

/// Converts `--q` into the exponent `f` of `q = p^f`.
pub fn exponent_of(p: u32, q: u64) -> anyhow::Result<u32> {
    match prime_power(q) {
        Some((pp, f)) if pp == p => Ok(f),
        _ => bail!("q: {q} is not a power of p = {p}"),
    }
}

fn picard_order(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let d = cfg.char_p()?;
    let k = residue_field(d)?;
    let c_text = cfg.c.as_deref().context("c: missing datum")?;
    let pm = (d.p as u64).checked_pow(d.m).context("char_p.m: p^m overflows")?;
    let c = parse_trunc(c_text, &k, (pm - 1) as usize, false).context("c")?;
    let pres = DescentPresentation::new(&k, d.m, c).context("c")?;
    let order = pres.class_order();
    let divides = pm % order == 0;
    let failures = if divides { vec![] } else { vec![format!("order {order} does not divide p^m = {pm}")] };
    Ok(Outcome::json(
        divides,
        failures,
        json!({
            "p": d.p, "q": k.q(), "m": d.m, "p_power": pm,
            "c": pres.c().to_string(),
            "order": order,
            "divides_pm": divides,
            "lprime_size": pres.lprime().len(),
            "lprime": pres.lprime().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }),
    ))
}

#[derive(Serialize)]
struct SweepRow {
    cell: usize,
    seed: u64,
    p: u32,
    q: u32,
    m: u32,
    c: String,
    order: u64,
    divides_pm: bool,
    lprime_size: usize,
}

fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let base = cfg.char_p()?;
    let ps: Vec<u32> = std::iter::once(base.p).chain(cfg.sweep_p.iter().copied()).collect();
    let ms: Vec<u32> = std::iter::once(base.m).chain(cfg.sweep_m.iter().copied()).collect();
    let fs: Vec<u32> = std::iter::once(base.f).chain(cfg.sweep_f.iter().copied()).collect();
    let cases = cfg.cases.unwrap_or(100);
    // Inputs are drawn sequentially so the table does not depend on thread count.
    let mut cells = Vec::new();
    let mut config_index = 0u64;
    for &p in &ps {
        for &m in &ms {
            for &f in &fs {
                let d = CharPDesc { p, f, m };
                let k = residue_field(&d)?;
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ config_index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                config_index += 1;
                for _ in 0..cases {
                    cells.push((k.clone(), m, random_admissible_c(&k, &mut rng, m)));
                }
            }
        }
    }
    let rows: Vec<SweepRow> = cells
        .into_par_iter()
        .enumerate()
        .map(|(cell, (k, m, c))| {
            let pm = (k.p() as u64).pow(m);
            let pres = DescentPresentation::new(&k, m, c).expect("generated datum is admissible");
            let order = pres.class_order();
            SweepRow {
                cell,
                seed: cfg.seed,
                p: k.p(),
                q: k.q(),
                m,
                c: pres.c().to_string(),
                order,
                divides_pm: pm % order == 0,
                lprime_size: pres.lprime().len(),
            }
        })
        .collect();
    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.divides_pm)
        .map(|r| format!("cell {}: order {} does not divide p^m for c = {}", r.cell, r.order, r.c))
        .collect();
    let ok = failures.is_empty();
    let body = match cfg.format {
        Format::Csv => Body::Csv {
            header: ["cell", "seed", "p", "q", "m", "c", "order", "divides_pm", "lprime_size"].map(String::from).to_vec(),
            rows: rows
                .iter()
                .map(|r| {
                    vec![
                        r.cell.to_string(),
                        r.seed.to_string(),
                        r.p.to_string(),
                        r.q.to_string(),
                        r.m.to_string(),
                        r.c.clone(),
                        r.order.to_string(),
                        r.divides_pm.to_string(),
                        r.lprime_size.to_string(),
                    ]
                })
                .collect(),
        },
        Format::Json => {
            let mut hist: BTreeMap<String, BTreeMap<u64, u64>> = BTreeMap::new();
            for r in &rows {
                *hist.entry(format!("p={},q={},m={}", r.p, r.q, r.m)).or_default().entry(r.order).or_default() += 1;
            }
            Body::Json(json!({ "rows": rows, "histogram": hist }))
        }
    };
    Ok(Outcome { ok, failures, body })
}

fn series_json(s: &PowSeries) -> Value {
    let names = ["X", "Y", "Z"];
    let terms: Vec<Value> = s
        .significant_terms()
        .map(|(m, c)| {
            json!({
                "exponents": &m[..s.nvars()],
                "coefficient": c,
            })
        })
        .collect();
    let zeros = s.terms().filter(|(_, c)| c.is_zero()).count();
    json!({
        "variables": &names[..s.nvars()],
        "cap": s.cap(),
        "display": s.display_with(&names),
        "terms": terms,
        "zero_terms": zeros,
        "min_precision": s.min_precision(),
    })
}

struct Checks {
    map: BTreeMap<String, Value>,
    failures: Vec<String>,
}

impl Checks {
    fn new() -> Checks {
        Checks { map: BTreeMap::new(), failures: Vec::new() }
    }

    fn add(&mut self, name: &str, id: Identity) {
        if let Some(m) = &id.mismatch {
            self.failures.push(format!("{name}: {m}"));
        }
        self.map.insert(
            name.to_string(),
            json!({
                "holds": id.holds,
                "min_precision": id.min_precision,
                "mismatch": id.mismatch.as_ref().map(|m| json!({
                    "exponents": m.exponent,
                    "left": m.left.as_ref().map(|c| c.to_string()),
                    "right": m.right.as_ref().map(|c| c.to_string()),
                })),
            }),
        );
    }
}

fn lt_series(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let fd = cfg.field()?;
    let deg = cfg.deg.unwrap_or(8);
    if deg == 0 || deg > 24 {
        bail!("deg: must lie in 1..=24");
    }
    let q = fd.q.unwrap_or(fd.p as u64);
    if q < 2 {
        bail!("field.q: must be at least 2");
    }
    let field = fd.build(policy_digits(deg, q))?;
    let lt = LubinTate::new(&field, q).context("field.q")?;
    lt.check_policy(deg).context("field.prec")?;
    let op = cfg.op.context("op: missing (law, endo, log, exp, h)")?;
    let mut checks = Checks::new();
    let mut extra = serde_json::Map::new();
    let series = match op {
        SeriesOp::Endo => {
            let a = parse_elem(&field, cfg.scalar.as_deref().unwrap_or("pi"), "scalar")?;
            let s = lt.lt_endomorphism(&a, deg).context("scalar")?;
            let f = lt.frobenius_lift(1, 0, deg);
            checks.add("f([a]) = [a](f)", Identity::compare(&f.compose(std::slice::from_ref(&s))?, &s.compose(&[f])?));
            extra.insert("scalar".into(), serde_json::to_value(&a)?);
            s
        }
        _ => {
            let g = FormalGroup::new(&lt, deg)?;
            match op {
                SeriesOp::Law => {
                    checks.add("commutativity", g.commutativity()?);
                    checks.add("associativity", g.associativity()?);
                    checks.add("F(X,0) = X", g.identity_axiom()?);
                    g.law.clone()
                }
                SeriesOp::Log => {
                    checks.add("log(F(X,Y)) = log X + log Y", g.log_additivity()?);
                    g.log.clone()
                }
                SeriesOp::Exp => {
                    checks.add("exp(log X) = X", g.exp_log()?);
                    checks.add("log(exp X) = X", g.log_exp()?);
                    g.exp.clone()
                }
                SeriesOp::H => {
                    let u = parse_elem(&field, cfg.unit.as_deref().unwrap_or("1 + pi"), "unit")?;
                    let h = g.h_series(&u).context("unit")?;
                    checks.add("h(Z) = F(Z, exp((u-1) log Z))", h.group_identity);
                    checks.add("h(h^-1(Z)) = Z", h.inverse_identity);
                    extra.insert("unit".into(), serde_json::to_value(&u)?);
                    extra.insert("level".into(), serde_json::to_value(h.level)?);
                    extra.insert("inverse".into(), series_json(&h.inverse));
                    h.series
                }
                SeriesOp::Endo => unreachable!(),
            }
        }
    };
    let ok = checks.failures.is_empty();
    let mut result = json!({
        "field": {
            "p": field.p(), "e": field.e(), "q": q,
            "eisenstein": field.eisenstein_string(),
            "digits": field.digits(),
        },
        "op": op,
        "deg": deg,
        "series": series_json(&series),
        "checks": checks.map,
    });
    result.as_object_mut().expect("object").extend(extra);
    Ok(Outcome::json(ok, checks.failures, result))
}

fn parse_elem(field: &twistdisc::padic::RamifiedField, s: &str, what: &str) -> anyhow::Result<RamifiedElem> {
    field.parse(s).with_context(|| format!("{what}: {s:?}"))
}

fn radius(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let fd = cfg.field()?;
    let q = fd.q.unwrap_or(fd.p as u64);
    let field = fd.build(1)?;
    let lt = LubinTate::new(&field, q).context("field.q")?;
    let n = cfg.n.context("n: missing radius index")?;
    let vr = lt.radius(0)?;
    let radii: Vec<Value> =
        (0..=n).map(|i| lt.radius(i).map(|v| json!({ "n": i, "valuation": v }))).collect::<Result<_, _>>()?;
    let vn = lt.radius(n)?;
    let steps = field.e() * n;
    let boundary = lt.ladder(vn, steps)?;
    let interior = lt.ladder(vn * 8 / 7, steps)?;
    let mut failures = Vec::new();
    let end = boundary.last().map_or(vn, |s| s.bound);
    if end != vr {
        failures.push(format!("ladder from v(r_{n}) ends at {end}, expected v(r) = {vr}"));
    }
    for (i, s) in boundary.iter().enumerate() {
        if s.tie != (i + 1 == steps as usize) {
            failures.push(format!("step {i} from {}: tie = {} off the boundary", s.input, s.tie));
        }
    }
    if let Some(s) = interior.iter().find(|s| s.tie) {
        failures.push(format!("interior run ties at {}", s.input));
    }
    let interior_end = interior.last().map_or(vn * 8 / 7, |s| s.bound);
    if steps > 0 && interior_end <= vr {
        failures.push(format!("interior run ends at {interior_end}, not past {vr}"));
    }
    Ok(Outcome::json(
        failures.is_empty(),
        failures,
        json!({
            "field": { "p": field.p(), "e": field.e(), "q": q },
            "n": n,
            "v_r": vr,
            "v_r_n": vn,
            "radii": radii,
            "ladder": boundary,
            "interior_start": vn * 8 / 7,
            "interior": interior,
        }),
    ))
}

fn symbol(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let field = cfg.field()?.build(32)?;
    let text = cfg.elem.as_deref().context("elem: missing element")?;
    let a = TateElem::parse(&field, text).with_context(|| format!("elem: {text:?}"))?;
    let s = a.principal_symbol().context("elem")?;
    Ok(Outcome::json(
        true,
        vec![],
        json!({
            "field": { "p": field.p(), "e": field.e(), "eisenstein": field.eisenstein_string(), "digits": field.digits() },
            "elem": a.to_string(),
            "degree": s.degree,
            "symbol": s,
        }),
    ))
}

fn hyp(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let d = cfg.char_p()?;
    let k = residue_field(d)?;
    let hd = HigherDerivation::standard(&k, d.m)?;
    let index = (d.p as u64).pow(d.m);
    let rep = hd.hyp_check(index);
    let expected_ok = rep.mu == Some(1) && rep.n == d.m && rep.holds;
    let failures = if expected_ok { vec![] } else { vec![format!("hyp_check returned {rep:?}")] };
    Ok(Outcome::json(
        expected_ok,
        failures,
        json!({
            "p": d.p, "q": k.q(), "m": d.m,
            "rank": hd.rank(),
            "extension_index": index,
            "mu": rep.mu, "n": rep.n, "holds": rep.holds,
        }),
    ))
}

fn check(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let name = cfg.suite.as_deref().context("suite: missing suite name")?;
    let names: Vec<&str> = if name == "all" { SUITES.to_vec() } else { vec![name] };
    let cases = cfg.cases.unwrap_or(20);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for n in names {
        let r = run_suite(n, cfg.seed, cases).with_context(|| format!("suite: {n:?}"))?;
        for msg in &r.failures {
            failures.push(format!("{n}: {msg}"));
        }
        if !r.passed() && r.failures.is_empty() {
            failures.push(format!("{n}: {} failures", r.failed));
        }
        reports.push(r);
    }
    let ok = reports.iter().all(|r| r.passed());
    Ok(Outcome::json(ok, failures, json!({ "cases": cases, "reports": reports })))
}
