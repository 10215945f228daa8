//! Plain-text formats.
//!
//! Complex files start with `dim n`; each further line lists the vertices of
//! one top simplex, optionally followed by `w <weight>`. Sets files hold one
//! vertex set per line, where `-` or a blank line is the empty set. Points
//! files hold `id x_1 ... x_d` per line. `#` starts a comment everywhere.

use std::fmt::Write as _;

use super::{SimplicialComplex, WeightedComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line: line + 1, message: message.into() }
}

/// Parses a complex file. Either every top simplex carries a weight or none does.
pub fn parse_complex<T: Real>(text: &str) -> Result<WeightedComplex<T>> {
    let mut dim: Option<usize> = None;
    let mut tops: Vec<Vec<usize>> = Vec::new();
    let mut weights: Vec<Option<f64>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        if dim.is_none() {
            if tok.next() != Some("dim") {
                return Err(parse_err(ln, "expected `dim <n>` header"));
            }
            let n = tok
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(ln, "bad dimension"))?;
            if tok.next().is_some() {
                return Err(parse_err(ln, "trailing tokens after dimension"));
            }
            dim = Some(n);
            continue;
        }
        let mut vs = Vec::new();
        let mut w = None;
        while let Some(t) = tok.next() {
            if t == "w" {
                let v: f64 = tok
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(ln, "bad weight"))?;
                if tok.next().is_some() {
                    return Err(parse_err(ln, "trailing tokens after weight"));
                }
                w = Some(v);
                break;
            }
            vs.push(t.parse().map_err(|_| parse_err(ln, format!("bad vertex `{t}`")))?);
        }
        if vs.len() != dim.unwrap() + 1 {
            return Err(parse_err(ln, format!("expected {} vertices, found {}", dim.unwrap() + 1, vs.len())));
        }
        tops.push(vs);
        weights.push(w);
    }
    if dim.is_none() {
        return Err(parse_err(0, "missing `dim <n>` header"));
    }
    let complex = SimplicialComplex::from_top_simplices(&tops)?;
    let weighted = weights.iter().filter(|w| w.is_some()).count();
    if weighted == 0 {
        return Ok(WeightedComplex::homogeneous(complex));
    }
    if weighted != weights.len() {
        return Err(parse_err(0, "either all or no top simplices must carry weights"));
    }
    // reorder weights to the canonical order of top simplices
    let mut top = vec![T::zero(); tops.len()];
    for (vs, w) in tops.iter().zip(&weights) {
        let s = super::Simplex::new(vs.clone())?;
        let i = complex.index_of(&s).expect("top simplex present");
        top[i] = T::lit(w.unwrap());
    }
    WeightedComplex::with_top_weights(complex, &top)
}

/// Writes a complex file. Weights are written only if `with_weights`.
pub fn write_complex<T: Real>(x: &WeightedComplex<T>, with_weights: bool) -> String {
    let mut out = format!("dim {}\n", x.dim());
    let n = x.dim() as isize;
    for (i, s) in x.complex.tops().iter().enumerate() {
        let vs: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&vs.join(" "));
        if with_weights {
            let _ = write!(out, " w {}", x.m(n, i).as_f64());
        }
        out.push('\n');
    }
    out
}

/// Parses a sets file: one set per line, `-` or a blank line for an empty
/// set, `#` lines ignored. Trailing blank lines are dropped.
pub fn parse_sets(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut sets: Vec<(Vec<usize>, bool)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let line = strip(raw);
        if line.is_empty() || line == "-" {
            sets.push((Vec::new(), line.is_empty()));
            continue;
        }
        let set = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad vertex `{t}`"))))
            .collect::<Result<Vec<usize>>>()?;
        sets.push((set, false));
    }
    while sets.last().is_some_and(|(_, blank)| *blank) {
        sets.pop();
    }
    Ok(sets.into_iter().map(|(s, _)| s).collect())
}

pub fn write_sets(sets: &[Vec<usize>]) -> String {
    sets.iter()
        .map(|s| {
            if s.is_empty() {
                "-\n".to_string()
            } else {
                let vs: Vec<String> = s.iter().map(|v| v.to_string()).collect();
                vs.join(" ") + "\n"
            }
        })
        .collect()
}

/// Parses a points file into `(vertex id, coordinates)` pairs.
pub fn parse_points(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut pts: Vec<(usize, Vec<f64>)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = strip(raw);
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let id = tok
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "bad vertex id"))?;
        let coords = tok
            .map(|t| t.parse::<f64>().map_err(|_| parse_err(ln, format!("bad coordinate `{t}`"))))
            .collect::<Result<Vec<f64>>>()?;
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(parse_err(ln, "expected finite coordinates"));
        }
        if let Some((_, first)) = pts.first() {
            if first.len() != coords.len() {
                return Err(parse_err(ln, "inconsistent point dimension"));
            }
        }
        pts.push((id, coords));
    }
    Ok(pts)
}

pub fn write_points(points: &[(usize, Vec<f64>)]) -> String {
    points
        .iter()
        .map(|(id, c)| {
            let cs: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            format!("{id} {}\n", cs.join(" "))
        })
        .collect()
}
