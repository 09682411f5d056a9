//! Plain-text instance format.
//!
//! ```text
//! # comment lines start with '#'
//! n k base
//! c1 c2 ... cn
//! u v w
//! ...
//! ```
//!
//! Vertex and color ids are 1-based. Weights are read as `f64`; integral
//! weights are written without a fractional part so integer files round-trip
//! byte for byte.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Instance};

/// Formats a weight the way instance files store it.
pub fn format_weight(w: f64) -> String {
    if w.is_finite() && w.fract() == 0.0 && w.abs() < 1e15 {
        format!("{}", w as i64)
    } else {
        format!("{w}")
    }
}

pub fn write_instance(instance: &Instance) -> String {
    let g = &instance.graph;
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", g.n(), g.k(), instance.base + 1);
    let colors: Vec<String> = g.colors().iter().map(|c| (c + 1).to_string()).collect();
    let _ = writeln!(out, "{}", colors.join(" "));
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, format_weight(e.w));
    }
    out
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

fn one_based(value: usize, line: usize, what: &str) -> Result<usize> {
    value
        .checked_sub(1)
        .ok_or_else(|| Error::Parse { line, msg: format!("{what} ids are 1-based, got 0") })
}

/// Parses and validates an instance.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) =
        lines.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(Error::Parse { line: hline, msg: "header must be `n k base`".into() });
    }
    let n = parse_usize(h[0], hline, "vertex count")?;
    let k = parse_usize(h[1], hline, "color count")?;
    let base = one_based(parse_usize(h[2], hline, "base")?, hline, "vertex")?;

    let (cline, color_line) =
        lines.next().ok_or(Error::Parse { line: hline, msg: "missing color line".into() })?;
    let colors = color_line
        .split_whitespace()
        .map(|t| parse_usize(t, cline, "color").and_then(|c| one_based(c, cline, "color")))
        .collect::<Result<Vec<_>>>()?;
    if colors.len() != n {
        return Err(Error::Parse {
            line: cline,
            msg: format!("expected {n} colors, found {}", colors.len()),
        });
    }

    let mut edges = Vec::new();
    for (line, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(Error::Parse { line, msg: "edge lines must be `u v w`".into() });
        }
        let u = one_based(parse_usize(t[0], line, "vertex")?, line, "vertex")?;
        let v = one_based(parse_usize(t[1], line, "vertex")?, line, "vertex")?;
        let w: f64 = t[2]
            .parse()
            .map_err(|_| Error::Parse { line, msg: format!("invalid weight `{}`", t[2]) })?;
        edges.push((u, v, w));
    }
    Instance::new(ColoredGraph::new(n, k, colors, edges), base)
}
