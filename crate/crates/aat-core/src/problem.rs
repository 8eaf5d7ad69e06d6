//! Problem files: the mapping, its addition-theorem polynomials and run
//! options.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use aat_algebra::{parse_poly, rat::parse_rat, AlgebraError, MPoly, Rat, VarRing};
use thiserror::Error;

use crate::alphabet::{is_aat_symbol, lam, standard_ring};
use crate::family::{Family, FamilyError};
use crate::generator::{generate, GeneratorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecializationMode {
    ExactPoint,
    NumericReconstruct,
}

impl SpecializationMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpecializationMode::ExactPoint => "exact-point",
            SpecializationMode::NumericReconstruct => "numeric-reconstruct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact-point" => Some(SpecializationMode::ExactPoint),
            "numeric-reconstruct" => Some(SpecializationMode::NumericReconstruct),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Forced specialization mode; `None` tries exact points and falls back.
    pub mode: Option<SpecializationMode>,
    pub retries: usize,
    pub box_half_width: f64,
    /// Half-width of the period search box.
    pub period_box: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-9,
            samples: 100,
            seed: 42,
            mode: None,
            retries: 3,
            box_half_width: 1.2,
            period_box: 7.0,
        }
    }
}

/// Where an addition-theorem polynomial came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolySource {
    File,
    Generated,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub n: usize,
    pub ring: Arc<VarRing>,
    pub aat: Vec<MPoly>,
    pub sources: Vec<PolySource>,
    pub family: Option<Family>,
    /// Parameters with numeric values, already substituted into `aat`.
    pub bindings: BTreeMap<String, Rat>,
    /// Parameters kept symbolic.
    pub symbolic_params: Vec<String>,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing section [{0}]")]
    MissingSection(&'static str),
    #[error("expected {expected} AAT polynomials, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("missing G{0}")]
    MissingPoly(usize),
    #[error("G{k} has degree 0 in {var}")]
    ZeroDegree { k: usize, var: String },
    #[error("G{k} mentions `{symbol}`, which is outside the addition-theorem alphabet")]
    ForeignSymbol { k: usize, symbol: String },
    #[error("G{k}: {source}")]
    Poly { k: usize, source: AlgebraError },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("G{k} = auto: {source}")]
    Generator { k: usize, source: GeneratorError },
}

fn malformed(line: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Malformed {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn load_problem(path: &Path) -> Result<ProblemSpec, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => ProblemError::NotFound(path.display().to_string()),
        _ => ProblemError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        },
    })?;
    parse_problem(&text)
}

struct RawPoly {
    line: usize,
    column: usize,
    text: String,
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let mut section: Option<&str> = None;
    let mut seen = Vec::new();
    let mut n: Option<usize> = None;
    let mut family_id: Option<String> = None;
    let mut bindings: BTreeMap<String, Rat> = BTreeMap::new();
    let mut symbolic: Vec<String> = Vec::new();
    let mut polys: BTreeMap<usize, RawPoly> = BTreeMap::new();
    let mut options = Options::default();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = match name.trim() {
                "mapping" => "mapping",
                "aat" => "aat",
                "options" => "options",
                other => return Err(malformed(line_no, format!("unknown section [{other}]"))),
            };
            if seen.contains(&name) {
                return Err(malformed(line_no, format!("duplicate section [{name}]")));
            }
            seen.push(name);
            section = Some(name);
            continue;
        }
        let Some(sec) = section else {
            return Err(malformed(line_no, "entry outside of a section"));
        };
        if sec == "mapping" {
            if let Some(rest) = line.strip_prefix("param ") {
                let (name, value) = match rest.split_once('=') {
                    Some((a, b)) => (a.trim(), Some(b.trim())),
                    None => (rest.trim(), None),
                };
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(malformed(line_no, format!("invalid parameter name `{name}`")));
                }
                if bindings.contains_key(name) || symbolic.iter().any(|s| s == name) {
                    return Err(malformed(line_no, format!("parameter `{name}` declared twice")));
                }
                match value {
                    Some(v) => {
                        let r = parse_rat(v).ok_or_else(|| malformed(line_no, format!("invalid rational `{v}`")))?;
                        bindings.insert(name.to_string(), r);
                    }
                    None => symbolic.push(name.to_string()),
                }
                continue;
            }
        }
        let (key, value) = line
            .split_once('=')
            .map(|(a, b)| (a.trim(), b.trim()))
            .ok_or_else(|| malformed(line_no, "expected `key = value`"))?;
        match (sec, key) {
            ("mapping", "n") => {
                let v: usize = value
                    .parse()
                    .ok()
                    .filter(|v| *v >= 1)
                    .ok_or_else(|| malformed(line_no, "n must be a positive integer"))?;
                n = Some(v);
            }
            ("mapping", "family") => family_id = Some(value.to_string()),
            ("aat", k) if k.starts_with('G') => {
                let idx: usize = k[1..]
                    .parse()
                    .ok()
                    .filter(|i| *i >= 1)
                    .ok_or_else(|| malformed(line_no, format!("invalid polynomial name `{k}`")))?;
                let column = raw.find('=').map(|c| c + 1).unwrap_or(0);
                let lead = raw[column..].len() - raw[column..].trim_start().len();
                if polys
                    .insert(
                        idx,
                        RawPoly {
                            line: line_no,
                            column: column + lead,
                            text: value.to_string(),
                        },
                    )
                    .is_some()
                {
                    return Err(malformed(line_no, format!("{k} given twice")));
                }
            }
            ("options", "tol") => {
                options.tol = value
                    .parse()
                    .ok()
                    .filter(|t: &f64| *t > 0.0)
                    .ok_or_else(|| malformed(line_no, "tol must be a positive number"))?
            }
            ("options", "samples") => {
                options.samples = value
                    .parse()
                    .ok()
                    .filter(|s| *s >= 1)
                    .ok_or_else(|| malformed(line_no, "samples must be a positive integer"))?
            }
            ("options", "seed") => {
                options.seed = value.parse().map_err(|_| malformed(line_no, "seed must be an unsigned integer"))?
            }
            ("options", "retries") => {
                options.retries = value.parse().map_err(|_| malformed(line_no, "retries must be an unsigned integer"))?
            }
            ("options", "mode") => {
                options.mode = Some(
                    SpecializationMode::parse(value)
                        .ok_or_else(|| malformed(line_no, "mode must be exact-point or numeric-reconstruct"))?,
                )
            }
            ("options", "box") => {
                options.box_half_width = value
                    .parse()
                    .ok()
                    .filter(|t: &f64| *t > 0.0)
                    .ok_or_else(|| malformed(line_no, "box must be a positive number"))?
            }
            ("options", "period_box") => {
                options.period_box = value
                    .parse()
                    .ok()
                    .filter(|t: &f64| *t > 0.0)
                    .ok_or_else(|| malformed(line_no, "period_box must be a positive number"))?
            }
            _ => return Err(malformed(line_no, format!("unknown key `{key}` in [{sec}]"))),
        }
    }

    if !seen.contains(&"mapping") {
        return Err(ProblemError::MissingSection("mapping"));
    }
    if !seen.contains(&"aat") {
        return Err(ProblemError::MissingSection("aat"));
    }
    let n = n.ok_or_else(|| malformed(0, "[mapping] lacks `n`"))?;
    let family = Family::from_id(family_id.as_deref().unwrap_or("none"), &bindings)?;
    if let Some(f) = &family {
        if f.n() != n {
            return Err(malformed(0, format!("family {} has n = {}, problem declares n = {n}", f.id(), f.n())));
        }
    }
    if polys.len() != n || polys.keys().any(|k| *k > n) {
        if polys.len() != n {
            return Err(ProblemError::Arity {
                expected: n,
                found: polys.len(),
            });
        }
        let missing = (1..=n).find(|k| !polys.contains_key(k)).unwrap_or(1);
        return Err(ProblemError::MissingPoly(missing));
    }

    let ring = standard_ring(n, &symbolic).map_err(|e| malformed(0, e.to_string()))?;
    let mut all_params: Vec<String> = symbolic.clone();
    all_params.extend(bindings.keys().cloned());
    let parse_ring = standard_ring(n, &all_params).map_err(|e| malformed(0, e.to_string()))?;

    let mut generated: Option<Vec<MPoly>> = None;
    let mut aat = Vec::with_capacity(n);
    let mut sources = Vec::with_capacity(n);
    for (k, raw) in &polys {
        let k = *k;
        let poly = if raw.text == "auto" {
            let fam = family.as_ref().ok_or(ProblemError::Generator {
                k,
                source: GeneratorError::Unsupported("none".into()),
            })?;
            if generated.is_none() {
                generated = Some(generate(fam, &ring).map_err(|source| ProblemError::Generator { k, source })?);
            }
            sources.push(PolySource::Generated);
            generated.as_ref().expect("generated")[k - 1].clone()
        } else {
            let p = parse_poly(&raw.text, &parse_ring).map_err(|e| match e {
                AlgebraError::Syntax { line, column, message } => ProblemError::Poly {
                    k,
                    source: AlgebraError::Syntax {
                        line: raw.line + line - 1,
                        column: if line == 1 { raw.column + column } else { column },
                        message,
                    },
                },
                other => ProblemError::Poly { k, source: other },
            })?;
            for v in p.variables() {
                if parse_ring.symbol(&v).map_or(false, |s| parse_ring.is_param(s)) {
                    continue;
                }
                if !is_aat_symbol(&v, n) {
                    return Err(ProblemError::ForeignSymbol { k, symbol: v });
                }
            }
            let slots: Vec<(usize, Rat)> = bindings
                .iter()
                .map(|(name, val)| (parse_ring.symbol(name).expect("declared"), val.clone()))
                .collect();
            sources.push(PolySource::File);
            p.eval_partial(&slots)
                .to_ring(&ring, &[])
                .map_err(|source| ProblemError::Poly { k, source })?
        };
        if poly.degree(&lam(k)).unwrap_or(0) == 0 {
            return Err(ProblemError::ZeroDegree { k, var: lam(k) });
        }
        aat.push(poly);
    }

    Ok(ProblemSpec {
        n,
        ring,
        aat,
        sources,
        family,
        bindings,
        symbolic_params: symbolic,
        options,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXP: &str = "[mapping]\nn = 1\nfamily = exp\n[aat]\nG1 = L1 - x1*y1\n";

    #[test]
    fn minimal_exp_problem() {
        let p = parse_problem(EXP).unwrap();
        assert_eq!(p.n, 1);
        assert_eq!(p.aat[0].to_string(), "L1 - x1*y1");
        assert_eq!(p.options, Options::default());
    }

    #[test]
    fn arity_and_degree_errors() {
        let two = "[mapping]\nn = 2\nfamily = none\n[aat]\nG1 = L1 - x1*y1\n";
        assert_eq!(
            parse_problem(two).unwrap_err().to_string(),
            "expected 2 AAT polynomials, found 1"
        );
        let flat = "[mapping]\nn = 1\n[aat]\nG1 = x1 - y1\n";
        assert!(matches!(parse_problem(flat), Err(ProblemError::ZeroDegree { .. })));
        let foreign = "[mapping]\nn = 1\n[aat]\nG1 = L1 - z1_1\n";
        assert!(matches!(parse_problem(foreign), Err(ProblemError::ForeignSymbol { .. })));
        let missing = "[aat]\nG1 = L1\n";
        assert_eq!(parse_problem(missing).unwrap_err(), ProblemError::MissingSection("mapping"));
    }

    #[test]
    fn syntax_error_positions_refer_to_the_file() {
        let bad = "[mapping]\nn = 1\n[aat]\nG1 = x1^-1 + L1\n";
        match parse_problem(bad).unwrap_err() {
            ProblemError::Poly {
                source: AlgebraError::Syntax { line, column, .. },
                ..
            } => {
                assert_eq!(line, 4);
                assert_eq!(column, 9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weierstrass_bindings_and_auto() {
        let text = "[mapping]\nn = 1\nfamily = weierstrass\nparam g2 = 4\nparam g3 = 0\n[aat]\nG1 = auto\n[options]\nseed = 7\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.bindings.len(), 2);
        assert_eq!(p.sources, vec![PolySource::Generated]);
        assert_eq!(p.aat[0].degree("L1").unwrap(), 2);
        assert_eq!(p.options.seed, 7);
        let text = "[mapping]\nn = 1\nfamily = weierstrass\nparam g2 = 4\nparam g3 = 0\n[aat]\nG1 = L1*x1 - g2\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.aat[0].to_string(), "L1*x1 - 4");
    }

    #[test]
    fn symbolic_parameters_stay() {
        let text = "[mapping]\nn = 1\nparam c\n[aat]\nG1 = L1 - c*x1*y1\n";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.symbolic_params, vec!["c".to_string()]);
        assert_eq!(p.aat[0].to_string(), "L1 - c*x1*y1");
    }
}
