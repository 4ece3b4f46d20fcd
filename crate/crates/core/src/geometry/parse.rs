//! Line-oriented domain files.
//!
//! ```text
//! # comment
//! outer circle 0 0 1
//! hole  ellipse 0.2 0 0.2 0.1 0.3
//! hole  fourier cx cy K  reC-K imC-K ... reCK imCK
//! ```

use std::fmt;

use num_complex::Complex64;

use super::curve::{CurveKind, SmoothClosedCurve, DEFAULT_NODES};
use super::domain::{Domain, DomainIssue};
use crate::error::Error;

/// A parsed (not yet validated) domain file with the source line of each component.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub outer: (usize, CurveKind),
    pub holes: Vec<(usize, CurveKind)>,
}

/// Failure to turn a domain file into a valid [`Domain`].
#[derive(Debug, Clone)]
pub enum DomainFileError {
    Syntax { line: usize, message: String },
    Curve { line: usize, error: Error },
    Layout { issues: Vec<(DomainIssue, Vec<usize>)> },
}

impl fmt::Display for DomainFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainFileError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            DomainFileError::Curve { line, error } => write!(f, "line {line}: {error}"),
            DomainFileError::Layout { issues } => {
                let parts: Vec<String> = issues
                    .iter()
                    .map(|(issue, lines)| {
                        let l: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
                        format!("{issue} at line(s) {}", l.join(", "))
                    })
                    .collect();
                write!(f, "{}", parts.join("; "))
            }
        }
    }
}

impl std::error::Error for DomainFileError {}

fn parse_numbers(line: usize, words: &[&str]) -> std::result::Result<Vec<f64>, DomainFileError> {
    words
        .iter()
        .map(|w| {
            w.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| DomainFileError::Syntax {
                line,
                message: format!("expected a finite number, found `{w}`"),
            })
        })
        .collect()
}

fn parse_curve(line: usize, words: &[&str]) -> std::result::Result<CurveKind, DomainFileError> {
    let syntax = |message: String| DomainFileError::Syntax { line, message };
    let Some((&form, rest)) = words.split_first() else {
        return Err(syntax("missing curve form (circle, ellipse, fourier)".into()));
    };
    match form {
        "circle" => {
            let v = parse_numbers(line, rest)?;
            if v.len() != 3 {
                return Err(syntax(format!("circle takes 3 numbers (cx cy r), found {}", v.len())));
            }
            Ok(CurveKind::circle(v[0], v[1], v[2]))
        }
        "ellipse" => {
            let v = parse_numbers(line, rest)?;
            if v.len() != 5 {
                return Err(syntax(format!("ellipse takes 5 numbers (cx cy a b rot), found {}", v.len())));
            }
            Ok(CurveKind::ellipse(v[0], v[1], v[2], v[3], v[4]))
        }
        "fourier" => {
            if rest.len() < 3 {
                return Err(syntax("fourier takes cx cy K followed by 2(2K+1) numbers".into()));
            }
            let head = parse_numbers(line, &rest[..2])?;
            let k: usize = rest[2].parse().map_err(|_| syntax(format!("mode count K must be a non-negative integer, found `{}`", rest[2])))?;
            let v = parse_numbers(line, &rest[3..])?;
            if v.len() != 2 * (2 * k + 1) {
                return Err(syntax(format!("fourier with K={k} needs {} coefficient numbers, found {}", 2 * (2 * k + 1), v.len())));
            }
            let coeffs = v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            Ok(CurveKind::fourier(head[0], head[1], coeffs))
        }
        other => Err(syntax(format!("unknown curve form `{other}`"))),
    }
}

impl DomainSpec {
    pub fn parse(text: &str) -> std::result::Result<Self, DomainFileError> {
        let mut outer = None;
        let mut holes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            match words[0] {
                "outer" => {
                    if outer.is_some() {
                        return Err(DomainFileError::Syntax { line, message: "duplicate `outer` statement".into() });
                    }
                    outer = Some((line, parse_curve(line, &words[1..])?));
                }
                "hole" => holes.push((line, parse_curve(line, &words[1..])?)),
                other => {
                    return Err(DomainFileError::Syntax { line, message: format!("unknown statement `{other}` (expected outer or hole)") })
                }
            }
        }
        let outer = outer.ok_or(DomainFileError::Syntax { line: text.lines().count().max(1), message: "missing `outer` statement".into() })?;
        Ok(Self { outer, holes })
    }

    /// Builds and validates the domain; layout issues name the offending lines.
    pub fn build(&self, nodes: Option<usize>) -> std::result::Result<Domain, DomainFileError> {
        let n = nodes.unwrap_or(DEFAULT_NODES);
        let make = |(line, kind): &(usize, CurveKind)| {
            SmoothClosedCurve::new(kind.clone(), n).map_err(|error| DomainFileError::Curve { line: *line, error })
        };
        let outer = make(&self.outer)?;
        let holes = self.holes.iter().map(make).collect::<std::result::Result<Vec<_>, _>>()?;
        let domain = Domain::new_unchecked(outer, holes);
        let issues = domain.validate();
        if issues.is_empty() {
            return Ok(domain);
        }
        let line_of = |c: usize| if c == 0 { self.outer.0 } else { self.holes[c - 1].0 };
        Err(DomainFileError::Layout {
            issues: issues
                .into_iter()
                .map(|issue| {
                    let lines = issue.components().into_iter().map(line_of).collect();
                    (issue, lines)
                })
                .collect(),
        })
    }
}

pub fn parse_domain(text: &str, nodes: Option<usize>) -> std::result::Result<Domain, DomainFileError> {
    DomainSpec::parse(text)?.build(nodes)
}

/// Serializes a domain back to the file format.
pub fn write_domain(domain: &Domain) -> String {
    fn curve(kind: &CurveKind) -> String {
        match kind {
            CurveKind::Circle { center, radius } => format!("circle {} {} {}", center.re, center.im, radius),
            CurveKind::Ellipse { center, a, b, rotation } => format!("ellipse {} {} {} {} {}", center.re, center.im, a, b, rotation),
            CurveKind::Fourier { center, coeffs } => {
                let k = coeffs.len() / 2;
                let nums: Vec<String> = coeffs.iter().map(|c| format!("{} {}", c.re, c.im)).collect();
                format!("fourier {} {} {} {}", center.re, center.im, k, nums.join(" "))
            }
        }
    }
    let mut s = format!("outer {}\n", curve(domain.outer().kind()));
    for h in domain.holes() {
        s.push_str(&format!("hole {}\n", curve(h.kind())));
    }
    s
}

impl From<DomainFileError> for Error {
    fn from(e: DomainFileError) -> Self {
        match e {
            DomainFileError::Syntax { line, message } => Error::Parse { line, message },
            DomainFileError::Curve { line, error } => Error::Parse { line, message: error.to_string() },
            DomainFileError::Layout { issues } => Error::InvalidDomain(issues.into_iter().map(|(i, _)| i).collect()),
        }
    }
}
