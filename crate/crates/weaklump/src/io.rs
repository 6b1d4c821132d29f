//! Plain-text input formats.
//!
//! Blank lines and lines starting with `#` are ignored everywhere. Points in
//! cycle notation are 1-based.
//!
//! - group or subgroup: `degree <n>`, then `gen <cycles>` lines
//! - element: optional `scalar cyclotomic <n>`, then `<scalar> <cycles|id>` lines;
//!   repeated elements accumulate
//! - matrix: `states <n>`, then `n` rows of `n` rationals
//! - distribution: `states <n>` and one row of `n` rationals, or the element format
//! - lumping map: `lump <state> <label>` lines

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{AnyElement, Element, Weight};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, Permutation, Subgroup};
use crate::markov::{Distribution, LumpingFunction};
use crate::scalar::{Cyclotomic, Rational, Scalar};

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Puts the line number on parse errors raised by lower-level parsers.
fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse { line, message },
        other => other,
    }
}

fn generators(text: &str) -> Result<(usize, Vec<Permutation>)> {
    let mut degree = None;
    let mut gens = Vec::new();
    for (n, l) in lines(text) {
        let (key, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match key {
            "degree" => {
                if degree.is_some() {
                    return Err(Error::parse(n, "degree given twice"));
                }
                let d: usize = rest.trim().parse().map_err(|_| Error::parse(n, format!("bad degree `{}`", rest.trim())))?;
                if d == 0 {
                    return Err(Error::parse(n, "degree must be positive"));
                }
                degree = Some(d);
            }
            "gen" => {
                let d = degree.ok_or_else(|| Error::parse(n, "`gen` before `degree`"))?;
                gens.push(Permutation::parse(d, rest).map_err(|e| at(n, e))?);
            }
            other => return Err(Error::parse(n, format!("unknown keyword `{other}`"))),
        }
    }
    let degree = degree.ok_or_else(|| Error::parse(0, "missing `degree` line"))?;
    Ok((degree, gens))
}

pub fn parse_group(text: &str) -> Result<Arc<FiniteGroup>> {
    let (degree, gens) = generators(text)?;
    FiniteGroup::generate(degree, &gens)
}

/// A subgroup file uses the group format; its degree must match and its generators must lie in `group`.
pub fn parse_subgroup(group: &Arc<FiniteGroup>, text: &str) -> Result<Subgroup> {
    let (degree, gens) = generators(text)?;
    if degree != group.degree() {
        return Err(Error::domain(format!("subgroup degree {degree} differs from group degree {}", group.degree())));
    }
    Subgroup::from_generators(group, &gens)
}

fn element_token(group: &FiniteGroup, tok: &str) -> Result<usize> {
    if let Ok(id) = tok.parse::<usize>() {
        if id >= group.order() {
            return Err(Error::domain(format!("element id {id} out of range")));
        }
        return Ok(id);
    }
    group.parse_element(tok)
}

/// Splits `<scalar> <element>`; the element starts at the first `(`, or is the last token.
fn split_term(l: &str) -> Option<(&str, &str)> {
    match l.find('(') {
        Some(i) => Some((l[..i].trim(), l[i..].trim())),
        None => l.rsplit_once(char::is_whitespace).map(|(a, b)| (a.trim(), b.trim())),
    }
}

pub fn parse_element(group: &Arc<FiniteGroup>, text: &str) -> Result<AnyElement> {
    let mut order: Option<u32> = None;
    let mut terms: Vec<(usize, usize, &str)> = Vec::new();
    for (n, l) in lines(text) {
        if let Some(rest) = l.strip_prefix("scalar") {
            if order.is_some() || !terms.is_empty() {
                return Err(Error::parse(n, "scalar header must come first"));
            }
            let words: Vec<&str> = rest.split_whitespace().collect();
            order = Some(match words.as_slice() {
                ["rational"] => 1,
                ["cyclotomic", k] => k.parse().map_err(|_| Error::parse(n, format!("bad cyclotomic order `{k}`")))?,
                _ => return Err(Error::parse(n, "expected `scalar rational` or `scalar cyclotomic <n>`")),
            });
            continue;
        }
        let (coef, elem) = split_term(l).ok_or_else(|| Error::parse(n, "expected `<scalar> <element>`"))?;
        if coef.is_empty() {
            return Err(Error::parse(n, "missing coefficient"));
        }
        let id = element_token(group, elem).map_err(|e| at(n, e))?;
        terms.push((n, id, coef));
    }
    match order {
        None | Some(1) => {
            let mut e = Element::<Rational>::zero(group);
            for (n, id, coef) in terms {
                let c: Rational = coef.parse().map_err(|e| at(n, e))?;
                e.set_coeff(id, e.coeff(id).add(&c));
            }
            Ok(AnyElement::Rational(e))
        }
        Some(k) => {
            let mut e = Element::<Cyclotomic>::zero(group);
            for (n, id, coef) in terms {
                let c = Cyclotomic::parse(coef, k).map_err(|e| at(n, e))?;
                e.set_coeff(id, e.coeff(id).add(&c));
            }
            Ok(AnyElement::Cyclotomic(e))
        }
    }
}

/// A weight must be rational and nonnegative.
pub fn parse_weight(group: &Arc<FiniteGroup>, text: &str) -> Result<Weight> {
    match parse_element(group, text)? {
        AnyElement::Rational(e) => Weight::new(e),
        AnyElement::Cyclotomic(e) => match e.to_rational() {
            Some(r) => Weight::new(r),
            None => Err(Error::domain("weight coefficients must be rational")),
        },
    }
}

fn rational_row(n: usize, l: &str) -> Result<Vec<Rational>> {
    l.split_whitespace().map(|t| t.parse::<Rational>().map_err(|e| at(n, e))).collect()
}

fn states_header(n: usize, l: &str) -> Result<usize> {
    let rest = l.strip_prefix("states").ok_or_else(|| Error::parse(n, "expected `states <n>`"))?;
    rest.trim().parse().map_err(|_| Error::parse(n, format!("bad state count `{}`", rest.trim())))
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Rational>>> {
    let mut it = lines(text);
    let (n0, first) = it.next().ok_or_else(|| Error::parse(0, "empty matrix file"))?;
    let size = states_header(n0, first)?;
    let mut rows = Vec::with_capacity(size);
    for (n, l) in it {
        let row = rational_row(n, l)?;
        if row.len() != size {
            return Err(Error::parse(n, format!("row has {} entries, expected {size}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != size {
        return Err(Error::parse(0, format!("found {} rows, expected {size}", rows.len())));
    }
    Ok(rows)
}

/// A distribution over group elements, in either the vector or the element format.
pub fn parse_distribution(group: &Arc<FiniteGroup>, text: &str) -> Result<Distribution> {
    let first = lines(text).next();
    let probs = match first {
        Some((_, l)) if l.starts_with("states") => parse_vector(text)?,
        _ => match parse_element(group, text)? {
            AnyElement::Rational(e) => e.into_coeffs(),
            AnyElement::Cyclotomic(_) => return Err(Error::domain("distribution must be rational")),
        },
    };
    if probs.len() != group.order() {
        return Err(Error::domain(format!("distribution has {} entries, group order is {}", probs.len(), group.order())));
    }
    Distribution::new(probs)
}

/// `states <n>` followed by `n` rationals, possibly over several lines.
pub fn parse_vector(text: &str) -> Result<Vec<Rational>> {
    let mut it = lines(text);
    let (n0, first) = it.next().ok_or_else(|| Error::parse(0, "empty file"))?;
    let size = states_header(n0, first)?;
    let mut out = Vec::with_capacity(size);
    for (n, l) in it {
        out.extend(rational_row(n, l)?);
    }
    if out.len() != size {
        return Err(Error::parse(0, format!("found {} entries, expected {size}", out.len())));
    }
    Ok(out)
}

/// `lump <state> <label>` lines; lumps are numbered by first appearance of their label.
pub fn parse_lumping(text: &str, states: usize) -> Result<(LumpingFunction, Vec<String>)> {
    let mut map: Vec<Option<usize>> = vec![None; states];
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (n, l) in lines(text) {
        let words: Vec<&str> = l.split_whitespace().collect();
        let [key, state, label] = words.as_slice() else {
            return Err(Error::parse(n, "expected `lump <state> <label>`"));
        };
        if *key != "lump" {
            return Err(Error::parse(n, format!("unknown keyword `{key}`")));
        }
        let s: usize = state.parse().map_err(|_| Error::parse(n, format!("bad state `{state}`")))?;
        if s >= states {
            return Err(Error::parse(n, format!("state {s} out of range 0..{states}")));
        }
        if map[s].is_some() {
            return Err(Error::parse(n, format!("state {s} assigned twice")));
        }
        let next = labels.len();
        let b = *index.entry(label.to_string()).or_insert_with(|| {
            labels.push(label.to_string());
            next
        });
        map[s] = Some(b);
    }
    let map: Vec<usize> = map
        .into_iter()
        .enumerate()
        .map(|(s, b)| b.ok_or_else(|| Error::domain(format!("state {s} has no lump"))))
        .collect::<Result<_>>()?;
    Ok((LumpingFunction::new(map)?, labels))
}

/// Element file text, one `<scalar> <cycles>` line per nonzero coefficient.
pub fn format_element<F: Scalar + std::fmt::Display>(e: &Element<F>) -> String {
    let g = e.group();
    let mut out = String::new();
    for id in e.support() {
        out.push_str(&format!("{} {}\n", e.coeff(id), g.element(id)));
    }
    out
}
