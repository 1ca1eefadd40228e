//! `RunConfig`: the structured form of one invocation, loaded from a TOML or
//! JSON file or assembled from command-line arguments.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use twistdisc::padic::RamifiedField;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SeriesOp {
    Law,
    Endo,
    Log,
    Exp,
    H,
}

/// Totally ramified p-adic field: `eisenstein` defaults to `pi^e - p`,
/// `prec` (p-adic digits) to the precision policy of the degree cap.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDesc {
    pub p: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eisenstein: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<u32>,
}

/// Characteristic-p datum: residue field `F_{p^f}` and rank `p^m - 1`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharPDesc {
    pub p: u32,
    #[serde(default = "one")]
    pub f: u32,
    #[serde(default = "one")]
    pub m: u32,
}

fn one() -> u32 {
    1
}

impl CharPDesc {
    pub fn q(&self) -> anyhow::Result<u64> {
        (self.p as u64).checked_pow(self.f).context("p^f overflows")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub char_p: Option<CharPDesc>,
    /// Extra `m` values for `sweep` (the char-p descriptor gives the first).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_m: Vec<u32>,
    /// Extra `f` values for `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_f: Vec<u32>,
    /// Extra primes for `sweep`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_p: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deg: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<SeriesOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elem: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let is_json = path.extension().is_some_and(|e| e == "json");
        if is_json {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        } else {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }

    pub fn field(&self) -> anyhow::Result<&FieldDesc> {
        self.field.as_ref().context("field: missing field descriptor (p, e, q, eisenstein, prec)")
    }

    pub fn char_p(&self) -> anyhow::Result<&CharPDesc> {
        self.char_p.as_ref().context("char_p: missing descriptor (p, f, m)")
    }
}

impl FieldDesc {
    /// Parses `p=2,e=2,E=pi^2-2,prec=32`.
    pub fn parse(s: &str) -> anyhow::Result<FieldDesc> {
        let mut d = FieldDesc::default();
        let mut have_p = false;
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = part.split_once('=').with_context(|| format!("field: expected key=value, got {part:?}"))?;
            let v = v.trim();
            match k.trim() {
                "p" => {
                    d.p = v.parse().with_context(|| format!("field.p: bad value {v:?}"))?;
                    have_p = true;
                }
                "e" => d.e = Some(v.parse().with_context(|| format!("field.e: bad value {v:?}"))?),
                "q" => d.q = Some(v.parse().with_context(|| format!("field.q: bad value {v:?}"))?),
                "E" | "eisenstein" => d.eisenstein = Some(v.to_string()),
                "prec" => d.prec = Some(v.parse().with_context(|| format!("field.prec: bad value {v:?}"))?),
                other => bail!("field: unknown key {other:?}"),
            }
        }
        if !have_p {
            bail!("field: p is required");
        }
        Ok(d)
    }

    /// Eisenstein coefficients, checking agreement with `e` when both given.
    pub fn eisenstein_coeffs(&self) -> anyhow::Result<Vec<twistdisc::padic::BigInt>> {
        match (&self.eisenstein, self.e) {
            (Some(s), e) => {
                let mut c = RamifiedField::parse_eisenstein(s).with_context(|| format!("field.eisenstein: {s:?}"))?;
                while c.len() > 1 && c.last().is_some_and(|x| *x == 0.into()) {
                    c.pop();
                }
                if let Some(e) = e {
                    if c.len() != e as usize + 1 {
                        bail!("field.eisenstein: degree {} does not match e = {e}", c.len() - 1);
                    }
                }
                Ok(c)
            }
            (None, e) => Ok(RamifiedField::default_eisenstein(self.p, e.unwrap_or(1))),
        }
    }

    pub fn build(&self, default_prec: u32) -> anyhow::Result<RamifiedField> {
        let coeffs = self.eisenstein_coeffs()?;
        let prec = self.prec.unwrap_or(default_prec);
        RamifiedField::new(self.p, coeffs, prec).context("field")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_descriptor() {
        let d = FieldDesc::parse("p=2,e=2,E=pi^2-2,prec=32").unwrap();
        assert_eq!((d.p, d.e, d.prec), (2, Some(2), Some(32)));
        let f = d.build(1).unwrap();
        assert_eq!((f.e(), f.digits()), (2, 32));
        assert!(FieldDesc::parse("e=2").is_err());
        assert!(FieldDesc::parse("p=2,e=3,E=pi^2-2").unwrap().build(8).is_err());
        assert!(FieldDesc::parse("p=2,E=pi^2-4").unwrap().build(8).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
            command = "lt-series"
            seed = 9
            deg = 6
            op = "law"
            [field]
            p = 2
            e = 1
            q = 2
        "#;
        let c: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(c.op, Some(SeriesOp::Law));
        assert_eq!(c.field().unwrap().q, Some(2));
        assert!(toml::from_str::<RunConfig>("command = \"x\"\nbogus = 1").is_err());
    }
}
