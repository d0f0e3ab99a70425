//! Flat `key = value` protocol configuration. Keys mirror the long flag names;
//! `#` starts a comment. Problems are collected and reported together.

use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use seccf::codes::{make_hash_split, parse_alist};
use seccf::protocol::{Broadcast, DecoderKind, ShiftMode};
use seccf::{Constellation, FieldMatrix, FieldVector, GeneratorCode, MacChannelParams, ProtocolConfig};

use crate::codespec::parse_code;

const KEYS: &[&str] = &[
    "code",
    "q",
    "kbar",
    "h",
    "h1",
    "h2",
    "n0",
    "constellation",
    "shifts",
    "e1",
    "e2",
    "decoder",
    "bp-iterations",
    "parity-check",
    "broadcast",
    "trials",
    "seed",
];

/// Raw settings after parsing, before validation against each other.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Settings {
    pub values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut problems = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                Some((k, v)) => {
                    let key = k.trim().to_string();
                    if !KEYS.contains(&key.as_str()) {
                        problems.push(format!("line {}: unknown key {key:?}", i + 1));
                    } else if values.insert(key.clone(), v.trim().to_string()).is_some() {
                        problems.push(format!("line {}: duplicate key {key:?}", i + 1));
                    }
                }
                None => problems.push(format!("line {}: expected key = value", i + 1)),
            }
        }
        if !problems.is_empty() {
            bail!("invalid config:\n  {}", problems.join("\n  "));
        }
        Ok(Self { values })
    }

    pub fn load(path: &str) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).with_context(|| format!("reading {path}"))?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

struct Collector {
    problems: Vec<String>,
}

impl Collector {
    fn parse<T: std::str::FromStr>(&mut self, s: &Settings, key: &str, default: T) -> T {
        match s.get(key) {
            None => default,
            Some(v) => v.parse().unwrap_or_else(|_| {
                self.problems.push(format!("{key}: cannot parse {v:?}"));
                default
            }),
        }
    }

    fn check<T>(&mut self, r: Result<T>, context: &str) -> Option<T> {
        r.map_err(|e| self.problems.push(format!("{context}: {e:#}"))).ok()
    }
}

fn parse_shift(text: &str, n: usize, q: u32) -> Result<FieldVector> {
    let digits: Vec<u32> = if text.contains(',') {
        text.split(',').map(|d| d.trim().parse()).collect::<Result<_, _>>()?
    } else {
        text.chars()
            .map(|c| c.to_digit(10).with_context(|| format!("bad digit {c:?}")))
            .collect::<Result<_>>()?
    };
    if digits.len() != n {
        bail!("expected {n} symbols, got {}", digits.len());
    }
    Ok(FieldVector::new(digits, q)?)
}

/// Parity checks spanning the dual of the code.
pub fn dual_parity_check(code: &GeneratorCode) -> FieldMatrix {
    code.matrix().transpose().null_space().transpose()
}

/// Builds and validates the protocol configuration, listing every problem.
pub fn build(s: &Settings) -> Result<ProtocolConfig> {
    let mut c = Collector { problems: Vec::new() };
    let q: u32 = c.parse(s, "q", 2);
    let h: f64 = c.parse(s, "h", 1.0);
    let h1: f64 = c.parse(s, "h1", h);
    let h2: f64 = c.parse(s, "h2", h);
    let n0: f64 = c.parse(s, "n0", 1.0);
    let kbar: usize = c.parse(s, "kbar", 0);
    let iterations: usize = c.parse(s, "bp-iterations", 50);
    let _: u64 = c.parse(s, "trials", 0);
    let _: u64 = c.parse(s, "seed", 0);

    let constellation = match s.get("constellation") {
        Some(list) => {
            let points: Result<Vec<f64>, _> = list.split(',').map(|p| p.trim().parse()).collect();
            match points {
                Ok(p) => c.check(Constellation::new(p).map_err(Into::into), "constellation"),
                Err(_) => c.check(Err(anyhow::anyhow!("cannot parse {list:?}")), "constellation"),
            }
        }
        None if q == 2 => Some(Constellation::bpsk()),
        None => c.check(Err(anyhow::anyhow!("required when q != 2")), "constellation"),
    };
    let channel = constellation.and_then(|k| c.check(MacChannelParams::new(h1, h2, n0, k).map_err(Into::into), "channel"));
    let code = match s.get("code") {
        Some(spec) => c.check(parse_code(spec, q), "code"),
        None => c.check(Err(anyhow::anyhow!("missing")), "code"),
    };
    let split = code
        .as_ref()
        .and_then(|code| c.check(make_hash_split(code.k(), kbar, q).map_err(Into::into), "kbar"));

    let n = code.as_ref().map(GeneratorCode::n).unwrap_or_default();
    let shift_mode = match s.get("shifts").unwrap_or("zero") {
        "random" => Some(ShiftMode::Random),
        "zero" => Some(ShiftMode::Fixed {
            e1: FieldVector::zeros(n, q),
            e2: FieldVector::zeros(n, q),
        }),
        "fixed" => {
            let mut shift = |key: &str| match s.get(key) {
                Some(t) => c.check(parse_shift(t, n, q), key),
                None => c.check(Err(anyhow::anyhow!("required when shifts = fixed")), key),
            };
            let (e1, e2) = (shift("e1"), shift("e2"));
            e1.zip(e2).map(|(e1, e2)| ShiftMode::Fixed { e1, e2 })
        }
        other => c.check(Err(anyhow::anyhow!("expected random, zero or fixed, got {other:?}")), "shifts"),
    };
    let decoder = match s.get("decoder").unwrap_or("ml") {
        "ml" => Some(DecoderKind::Ml),
        "bp" => {
            let parity_check = match (s.get("parity-check"), code.as_ref()) {
                (Some(path), _) => c.check(
                    fs::read_to_string(path)
                        .with_context(|| format!("reading {path}"))
                        .and_then(|t| parse_alist(&t).map_err(Into::into)),
                    "parity-check",
                ),
                (None, Some(code)) => Some(dual_parity_check(code)),
                (None, None) => None,
            };
            parity_check.map(|parity_check| DecoderKind::Bp { iterations, parity_check })
        }
        other => c.check(Err(anyhow::anyhow!("expected ml or bp, got {other:?}")), "decoder"),
    };
    let broadcast = match s.get("broadcast").unwrap_or("hashed") {
        "hashed" => Some(Broadcast::Hashed),
        "raw" => Some(Broadcast::Raw),
        other => c.check(Err(anyhow::anyhow!("expected hashed or raw, got {other:?}")), "broadcast"),
    };

    if let (Some(channel), Some(code), Some(split), Some(shift_mode), Some(decoder), Some(broadcast)) =
        (channel, code, split, shift_mode, decoder, broadcast)
    {
        let config = ProtocolConfig {
            channel,
            code,
            split,
            shift_mode,
            decoder,
            broadcast,
        };
        c.problems.extend(config.violations());
        if c.problems.is_empty() {
            return Ok(config);
        }
    }
    bail!("invalid config:\n  {}", c.problems.join("\n  "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_builds() {
        let s = Settings::parse("# demo\ncode = hamming\nkbar = 1\nh = 2.5\ndecoder = bp\nshifts = random\n").unwrap();
        let cfg = build(&s).unwrap();
        assert_eq!(cfg.code.k(), 4);
        assert!(matches!(cfg.decoder, DecoderKind::Bp { iterations: 50, .. }));
        assert_eq!(cfg.shift_mode, ShiftMode::Random);
    }

    #[test]
    fn fixed_shifts() {
        let s = Settings::parse("code = repetition:3\nshifts = fixed\ne1 = 101\ne2 = 0,1,1\n").unwrap();
        match build(&s).unwrap().shift_mode {
            ShiftMode::Fixed { e1, e2 } => {
                assert_eq!(e1.entries(), &[1, 0, 1]);
                assert_eq!(e2.entries(), &[0, 1, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_every_problem() {
        assert!(Settings::parse("code = hamming\nbogus = 1\nnot a pair\n").is_err());
        let s = Settings::parse("code = repetition:3\nkbar = 4\nn0 = -1\ndecoder = fancy\n").unwrap();
        let msg = format!("{:#}", build(&s).unwrap_err());
        for needle in ["kbar", "channel", "decoder"] {
            assert!(msg.contains(needle), "{msg}");
        }
    }

    #[test]
    fn dual_parity_check_annihilates_code() {
        let code = parse_code("uniform:9:4:2", 2).unwrap();
        let h = dual_parity_check(&code);
        assert_eq!(h.rows(), 5);
        assert!(code.satisfies(&h).unwrap());
    }
}
