//! Code descriptors accepted on the command line and in config files:
//! `repetition:N`, `spc:N`, `hamming`, `uniform:N:K:SEED`, `toeplitz:N:K:SEED`,
//! `permuted:<base>:SEED` and `file:PATH` (matrix text format), all over the
//! field given separately as `q`.

use std::fs;

use anyhow::{bail, Context, Result};
use seccf::codes::{hamming_7_4_parity_check, sample_code};
use seccf::{EnsembleKind, EnsembleSpec, FieldMatrix, GeneratorCode};

fn number<T: std::str::FromStr>(field: Option<&str>, what: &str, spec: &str) -> Result<T> {
    field
        .with_context(|| format!("code {spec:?} is missing {what}"))?
        .parse()
        .map_err(|_| anyhow::anyhow!("code {spec:?}: {what} is not a number"))
}

pub fn parse_code(spec: &str, q: u32) -> Result<GeneratorCode> {
    let mut parts = spec.splitn(2, ':');
    let kind = parts.next().unwrap_or_default();
    let rest = parts.next();
    let fields: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
    let code = match kind {
        "repetition" => GeneratorCode::repetition(number(fields.first().copied(), "n", spec)?, q)?,
        "spc" => GeneratorCode::single_parity_check(number(fields.first().copied(), "n", spec)?, q)?,
        "hamming" => {
            if q != 2 {
                bail!("the Hamming code is binary, got q = {q}");
            }
            GeneratorCode::from_parity_check(&hamming_7_4_parity_check())?
        }
        "uniform" | "toeplitz" => {
            let n = number(fields.first().copied(), "n", spec)?;
            let k = number(fields.get(1).copied(), "k", spec)?;
            let seed = number(fields.get(2).copied(), "seed", spec)?;
            let kind = if kind == "uniform" { EnsembleKind::Uniform } else { EnsembleKind::Toeplitz };
            sample_code(&EnsembleSpec::new(kind, n, k, q, seed))?
        }
        "permuted" => {
            let rest = rest.with_context(|| format!("code {spec:?} is missing a base code"))?;
            let (base, seed) = rest
                .rsplit_once(':')
                .with_context(|| format!("code {spec:?} is missing a seed"))?;
            let seed = seed.parse().map_err(|_| anyhow::anyhow!("code {spec:?}: seed is not a number"))?;
            sample_code(&EnsembleSpec::permuted(parse_code(base, q)?, seed))?
        }
        "file" => {
            let path = rest.with_context(|| format!("code {spec:?} is missing a path"))?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let matrix = FieldMatrix::parse_text(&text)?;
            if matrix.modulus() != q {
                bail!("{path} is over F_{}, expected F_{q}", matrix.modulus());
            }
            GeneratorCode::new(matrix)?
        }
        other => bail!("unknown code kind {other:?}"),
    };
    Ok(code)
}
