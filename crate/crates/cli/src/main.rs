//! `twistdisc`: batch front end for Picard-order sweeps, Lubin-Tate series,
//! radius ladders, principal symbols and the seeded property suites.
//!
//! Exit status: 0 on success, 2 when an asserted identity fails, 64 for an
//! invalid invocation or configuration, 1 for I/O failures.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::exponent_of;
use crate::config::{CharPDesc, FieldDesc, Format, RunConfig, SeriesOp};

const EXIT_IDENTITY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 1;

#[derive(Parser, Debug)]
#[command(name = "twistdisc", version, about = "Descent, Picard orders and Lubin-Tate series at desk scale")]
struct Cli {
    /// TOML or JSON file holding a full run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output file; relative paths resolve against the output directory.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Default output directory; without it and without --output the
    /// artifact goes to stdout.
    #[arg(long, global = true, env = "TWISTDISC_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Order of the class of c in L_C / L'_C.
    PicardOrder {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Residue field size, a power of p (default p).
        #[arg(long)]
        q: Option<u64>,
        /// Truncation encoding such as "1 + T + t^-1*T^2".
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
    /// Picard orders of random admissible data over a parameter grid.
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [2u32])]
        p: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u32])]
        m: Vec<u32>,
        /// Residue degrees f with q = p^f.
        #[arg(long, value_delimiter = ',', default_values_t = [1u32])]
        f: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        cases: u64,
    },
    /// Lubin-Tate series with their defining identities checked.
    LtSeries {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 8)]
        deg: u32,
        #[arg(long, value_enum)]
        op: SeriesOp,
        /// Eisenstein polynomial in pi (default pi^e - p).
        #[arg(long, allow_hyphen_values = true)]
        eisenstein: Option<String>,
        /// p-adic digits (default: the precision policy for --deg).
        #[arg(long)]
        prec: Option<u32>,
        /// Scalar a for --op endo (default pi).
        #[arg(long, allow_hyphen_values = true)]
        scalar: Option<String>,
        /// Unit u for --op h (default 1 + pi).
        #[arg(long, allow_hyphen_values = true)]
        unit: Option<String>,
    },
    /// Radii v(r_n) and the [pi] valuation ladder.
    Radius {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: u32,
    },
    /// Spectral degree and principal symbol of a Tate polynomial.
    Symbol {
        /// Descriptor such as "p=2,e=2,E=pi^2-2,prec=32".
        #[arg(long, allow_hyphen_values = true)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
    },
    /// Hypothesis check for the standard derivation of rank p^m - 1.
    Hyp {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        q: Option<u64>,
    },
    /// A seeded property suite, or "all".
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        cases: Option<u64>,
    },
}

fn char_p(p: u32, m: u32, q: Option<u64>) -> anyhow::Result<CharPDesc> {
    let f = match q {
        Some(q) => exponent_of(p, q)?,
        None => 1,
    };
    Ok(CharPDesc { p, f, m })
}

fn to_config(cmd: Cmd) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    match cmd {
        Cmd::PicardOrder { p, m, q, c } => {
            cfg.command = "picard-order".into();
            cfg.char_p = Some(char_p(p, m, q)?);
            cfg.c = Some(c);
        }
        Cmd::Sweep { p, m, f, cases } => {
            cfg.command = "sweep".into();
            cfg.char_p = Some(CharPDesc { p: p[0], f: f[0], m: m[0] });
            cfg.sweep_p = p[1..].to_vec();
            cfg.sweep_m = m[1..].to_vec();
            cfg.sweep_f = f[1..].to_vec();
            cfg.cases = Some(cases);
        }
        Cmd::LtSeries { p, e, q, deg, op, eisenstein, prec, scalar, unit } => {
            cfg.command = "lt-series".into();
            cfg.field = Some(FieldDesc { p, e: Some(e), q, eisenstein, prec });
            cfg.deg = Some(deg);
            cfg.op = Some(op);
            cfg.scalar = scalar;
            cfg.unit = unit;
        }
        Cmd::Radius { p, e, q, n } => {
            cfg.command = "radius".into();
            cfg.field = Some(FieldDesc { p, e: Some(e), q, eisenstein: None, prec: None });
            cfg.n = Some(n);
        }
        Cmd::Symbol { field, elem } => {
            cfg.command = "symbol".into();
            cfg.field = Some(FieldDesc::parse(&field)?);
            cfg.elem = Some(elem);
        }
        Cmd::Hyp { p, m, q } => {
            cfg.command = "hyp".into();
            cfg.char_p = Some(char_p(p, m, q)?);
        }
        Cmd::Check { suite, cases } => {
            cfg.command = "check".into();
            cfg.suite = Some(suite);
            cfg.cases = cases;
        }
    }
    Ok(cfg)
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("twistdisc: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut cfg = match (&cli.config, cli.command) {
        (Some(_), Some(_)) => return usage("--config and a subcommand are mutually exclusive"),
        (None, None) => return usage("a subcommand or --config is required (see --help)"),
        (Some(path), None) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return usage(format!("{e:#}")),
        },
        (None, Some(cmd)) => match to_config(cmd) {
            Ok(c) => c,
            Err(e) => return usage(format!("{e:#}")),
        },
    };
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(o) = cli.output {
        cfg.output = Some(o);
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let outcome = match commands::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            if let Some(twistdisc::Error::Internal(_)) = e.root_cause().downcast_ref::<twistdisc::Error>() {
                eprintln!("twistdisc: {e:#}");
                return ExitCode::from(EXIT_IO);
            }
            return usage(format!("{e:#}"));
        }
    };
    let dest = output::destination(&cfg, cli.out_dir.as_deref());
    let timestamp = (!cli.no_timestamp).then(output::unix_time);
    if let Err(e) = output::write(&cfg, &outcome, dest.as_deref(), timestamp) {
        eprintln!("twistdisc: {e:#}");
        return ExitCode::from(EXIT_IO);
    }
    if !outcome.ok {
        for f in &outcome.failures {
            eprintln!("identity failure: {f}");
        }
        return ExitCode::from(EXIT_IDENTITY);
    }
    ExitCode::SUCCESS
}
