//! Acceptance gate: each criterion runs its property suite at full size and
//! prints one PASS/FAIL line. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use twistdisc::check::run_suite;

const SEED: u64 = 20_240_601;

struct Criterion {
    id: u32,
    title: &'static str,
    suite: &'static str,
    cases: u64,
    time_limit: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "cyclic-order bound: class_order(c) divides p^m", suite: "cyclic", cases: 100, time_limit: Some(Duration::from_secs(60)) },
    Criterion { id: 2, title: "sharpness: class_order(1+T) = p^m", suite: "sharpness", cases: 1, time_limit: None },
    Criterion { id: 3, title: "decomposition d'(f)/f = c^j (d(t)/t)^i", suite: "decompose", cases: 100, time_limit: None },
    Criterion { id: 4, title: "convolution law d(ab) = d(a)d(b)", suite: "convolution", cases: 200, time_limit: None },
    Criterion { id: 5, title: "hypothesis check mu = 1, n = m, holds", suite: "hyp", cases: 1, time_limit: None },
    Criterion { id: 6, title: "Lubin-Tate identities at degree 12", suite: "lubin-tate", cases: 10, time_limit: Some(Duration::from_secs(120)) },
    Criterion { id: 7, title: "p = 2 closed forms (multiplicative group)", suite: "closed-form", cases: 1, time_limit: None },
    Criterion { id: 8, title: "radius ladder and tie flags", suite: "radius", cases: 1, time_limit: None },
    Criterion { id: 9, title: "principal symbol multiplicativity", suite: "symbol", cases: 200, time_limit: None },
    Criterion { id: 10, title: "ramification map vs divisor of g(t^(p^m))", suite: "divisor", cases: 100, time_limit: None },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let report = run_suite(c.suite, SEED, c.cases);
        let elapsed = start.elapsed();
        let (ok, detail) = match &report {
            Ok(r) => {
                let timed_out = c.time_limit.is_some_and(|lim| elapsed >= lim);
                let mut detail = format!("{} checks, {} failed", r.checks, r.failed);
                if timed_out {
                    detail.push_str(&format!(", over the {:?} limit", c.time_limit.unwrap()));
                }
                (r.passed() && !timed_out, detail)
            }
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "{} criterion {:>2} [{}] {}: {} ({:.2?})",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.suite,
            c.title,
            detail,
            elapsed
        );
        if let Ok(r) = &report {
            for msg in &r.failures {
                println!("     {msg}");
            }
        }
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
