//! Line-oriented problem files.
//!
//! ```text
//! # comment
//! n=3 k=2
//! map 1: x2, x3
//! map 2: x1, x3 - x1*x2
//! eps=1/4 cap=3 K=8 seed=0
//! ```
//!
//! Either every generator is a `field j:` line (n comma-separated components)
//! or every generator is a `map j:` line (n−1 components); kernel fields are
//! derived from maps.

use std::fmt;

use mlradon_core::symalg::{kernel_field, parse_polynomial, parse_rational};
use mlradon_core::{BigRational, Error, PolyMap, PolyVectorField};
use num::Zero;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Fields,
    Maps,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fields => "fields",
            Mode::Maps => "maps",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecOptions {
    pub eps: BigRational,
    pub max_word_len: usize,
    pub k_scale: f64,
    pub seed: u64,
}

impl Default for SpecOptions {
    fn default() -> Self {
        SpecOptions { eps: BigRational::new(1.into(), 4.into()), max_word_len: 3, k_scale: 8.0, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub mode: Mode,
    pub fields: Vec<PolyVectorField>,
    /// Present in maps mode.
    pub maps: Option<Vec<PolyMap>>,
    pub options: SpecOptions,
}

const BUILTINS: [(&str, &str); 4] = [
    ("lw2", include_str!("../specs/lw2.spec")),
    ("lw3", include_str!("../specs/lw3.spec")),
    ("tao-wright", include_str!("../specs/tao-wright.spec")),
    ("heisenberg", include_str!("../specs/heisenberg.spec")),
];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|(n, _)| *n)
}

pub fn builtin(name: &str) -> Option<ProblemSpec> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(n, text)| {
        let mut spec = parse_spec(text).expect("bundled spec parses");
        spec.name = n.to_string();
        spec
    })
}

fn line_err(line: usize, source: Error) -> CliError {
    CliError::Spec { line, source }
}

fn parse_assignments(line: usize, text: &str) -> Result<Vec<(String, String)>, CliError> {
    text.split_whitespace()
        .map(|tok| match tok.split_once('=') {
            Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), v.to_string())),
            _ => Err(line_err(line, Error::parse(format!("expected key=value, found `{tok}`")))),
        })
        .collect()
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize, CliError> {
    v.parse().map_err(|_| line_err(line, Error::parse(format!("{key} must be a non-negative integer, got `{v}`"))))
}

/// Parses a problem file. Semantic failures keep their own error class and
/// carry the offending line.
pub fn parse_spec(text: &str) -> Result<ProblemSpec, CliError> {
    let mut header: Option<(usize, usize)> = None;
    let mut options = SpecOptions::default();
    let mut entries: Vec<(usize, Mode, usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let lower = body.to_ascii_lowercase();
        let mode = if lower.starts_with("field") {
            Some((Mode::Fields, &body[5..]))
        } else if lower.starts_with("map") {
            Some((Mode::Maps, &body[3..]))
        } else {
            None
        };
        if let Some((mode, rest)) = mode {
            let (index, comps) = rest
                .split_once(':')
                .ok_or_else(|| line_err(line, Error::parse("expected `<index>: <components>`")))?;
            let j = parse_usize(line, "generator index", index.trim())?;
            entries.push((line, mode, j, comps.to_string()));
            continue;
        }
        for (key, value) in parse_assignments(line, body)? {
            match key.as_str() {
                "n" | "k" => {
                    let v = parse_usize(line, &key, &value)?;
                    let (n, k) = header.get_or_insert((0, 0));
                    if key == "n" {
                        *n = v;
                    } else {
                        *k = v;
                    }
                }
                "eps" => options.eps = parse_rational(&value).map_err(|e| line_err(line, e))?,
                "cap" => options.max_word_len = parse_usize(line, "cap", &value)?,
                "K" => {
                    options.k_scale =
                        value.parse().map_err(|_| line_err(line, Error::parse(format!("K must be a number, got `{value}`"))))?
                }
                "seed" => {
                    options.seed =
                        value.parse().map_err(|_| line_err(line, Error::parse(format!("seed must be an integer, got `{value}`"))))?
                }
                other => return Err(line_err(line, Error::parse(format!("unknown option `{other}`")))),
            }
        }
    }

    let (n, k) = header.ok_or_else(|| line_err(1, Error::parse("missing `n=.. k=..` header")))?;
    if n == 0 || k == 0 {
        return Err(line_err(1, Error::Precondition("n and k must be positive".into())));
    }
    if !(options.eps > BigRational::zero()) {
        return Err(line_err(1, Error::Precondition("eps must be positive".into())));
    }
    if options.max_word_len == 0 {
        return Err(line_err(1, Error::Precondition("cap must be at least 1".into())));
    }
    if !(options.k_scale >= 1.0) {
        return Err(line_err(1, Error::Precondition("K must be at least 1".into())));
    }
    let last = entries.last().map_or(1, |e| e.0);
    let mode = match entries.first() {
        Some(e) => e.1,
        None => return Err(line_err(last, Error::parse("no `field` or `map` lines"))),
    };
    if let Some(e) = entries.iter().find(|e| e.1 != mode) {
        return Err(line_err(e.0, Error::parse("cannot mix `field` and `map` lines")));
    }
    let mut slots: Vec<Option<(usize, String)>> = vec![None; k];
    for (line, _, j, comps) in entries {
        if j == 0 || j > k {
            return Err(line_err(line, Error::IndexOutOfRange { index: j, bound: k }));
        }
        if slots[j - 1].is_some() {
            return Err(line_err(line, Error::parse(format!("generator {j} given twice"))));
        }
        slots[j - 1] = Some((line, comps));
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(line_err(last, Error::parse(format!("generator {} is missing", missing + 1))));
    }

    let expected = if mode == Mode::Fields { n } else { n - 1 };
    let mut fields = Vec::with_capacity(k);
    let mut maps = Vec::new();
    let origin = vec![BigRational::zero(); n];
    for slot in slots.into_iter().flatten() {
        let (line, comps) = slot;
        let polys = comps
            .split(',')
            .map(|c| parse_polynomial(c.trim(), n))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| line_err(line, e))?;
        if polys.len() != expected {
            return Err(line_err(line, Error::DimensionMismatch { expected, found: polys.len() }));
        }
        match mode {
            Mode::Fields => fields.push(PolyVectorField::new(polys).map_err(|e| line_err(line, e))?),
            Mode::Maps => {
                let map = PolyMap::new(polys).map_err(|e| line_err(line, e))?;
                if !map.is_normalized() {
                    return Err(line_err(line, Error::Precondition("map must send the origin to the origin".into())));
                }
                let x = kernel_field(&map).map_err(|e| line_err(line, e))?;
                if x.evaluate(&origin).map_err(|e| line_err(line, e))?.iter().all(|v| v.is_zero()) {
                    return Err(line_err(line, Error::Precondition("kernel field vanishes at the origin".into())));
                }
                fields.push(x);
                maps.push(map);
            }
        }
    }
    Ok(ProblemSpec {
        name: "spec".into(),
        n,
        k,
        mode,
        fields,
        maps: if mode == Mode::Maps { Some(maps) } else { None },
        options,
    })
}
