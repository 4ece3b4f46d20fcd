//! Plain-text reports: one `key = value # note` line per entry.
//!
//! Numeric entries carry either their tolerance or their standard error in the
//! note. Checks render as `pass`/`FAIL` with the measured quantity and bound.
//! The header carries a timestamp and the footer the elapsed time unless the
//! report is built with `timestamps = false`, which keeps reruns byte-identical.

use std::fmt::{self, Write};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
enum Line {
    Entry { key: String, value: String, note: Option<String> },
    Section(String),
}

#[derive(Debug, Clone)]
pub struct Report {
    command: String,
    lines: Vec<Line>,
    started: Instant,
    timestamps: bool,
    failures: usize,
}

/// Formats a float with enough digits to round-trip the leading 12 places.
pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-4 && v.abs() < 1e6 {
        let s = format!("{v:.12}");
        let s = s.trim_end_matches('0');
        s.trim_end_matches('.').to_string()
    } else {
        format!("{v:.12e}")
    }
}

fn tol(v: f64) -> String {
    format!("{v:.1e}")
}

impl Report {
    pub fn new(command: &str, timestamps: bool) -> Self {
        Self { command: command.into(), lines: Vec::new(), started: Instant::now(), timestamps, failures: 0 }
    }

    pub fn section(&mut self, name: &str) {
        self.lines.push(Line::Section(name.into()));
    }

    /// A non-numeric entry or an echoed input.
    pub fn text(&mut self, key: &str, value: impl fmt::Display) {
        self.lines.push(Line::Entry { key: key.into(), value: value.to_string(), note: None });
    }

    /// An echoed numeric input.
    pub fn input(&mut self, key: &str, value: impl fmt::Display) {
        self.lines.push(Line::Entry { key: key.into(), value: value.to_string(), note: Some("input".into()) });
    }

    /// A computed scalar with its nominal accuracy.
    pub fn scalar(&mut self, key: &str, value: f64, tolerance: f64) {
        self.lines.push(Line::Entry { key: key.into(), value: num(value), note: Some(format!("tol {}", tol(tolerance))) });
    }

    pub fn point(&mut self, key: &str, z: Complex64, tolerance: f64) {
        self.lines.push(Line::Entry {
            key: key.into(),
            value: format!("{}, {}", num(z.re), num(z.im)),
            note: Some(format!("tol {}", tol(tolerance))),
        });
    }

    /// A Monte Carlo estimate with its standard error.
    pub fn estimate(&mut self, key: &str, value: f64, standard_error: f64) {
        self.lines.push(Line::Entry { key: key.into(), value: num(value), note: Some(format!("se {}", tol(standard_error))) });
    }

    /// A row of computed values sharing one tolerance.
    pub fn row(&mut self, key: &str, values: &[f64], tolerance: f64) {
        let v = values.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ");
        self.lines.push(Line::Entry { key: key.into(), value: format!("[{v}]"), note: Some(format!("tol {}", tol(tolerance))) });
    }

    /// A count, exact by construction.
    pub fn count(&mut self, key: &str, n: usize) {
        self.lines.push(Line::Entry { key: key.into(), value: n.to_string(), note: Some("exact".into()) });
    }

    /// Records `measured < bound` as a pass/fail check; returns whether it passed.
    pub fn check(&mut self, key: &str, measured: f64, bound: f64) -> bool {
        let pass = measured < bound;
        self.record(key, pass, format!("{} < {}", tol_long(measured), tol(bound)))
    }

    /// A boolean check with a free-form note.
    pub fn check_that(&mut self, key: &str, pass: bool, note: impl Into<String>) -> bool {
        self.record(key, pass, note.into())
    }

    fn record(&mut self, key: &str, pass: bool, note: String) -> bool {
        if !pass {
            self.failures += 1;
        }
        let value = if pass { "pass" } else { "FAIL" };
        self.lines.push(Line::Entry { key: key.into(), value: value.into(), note: Some(note) });
        pass
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command = {}", self.command);
        if self.timestamps {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let _ = writeln!(out, "timestamp_unix = {secs}");
        }
        for line in &self.lines {
            match line {
                Line::Section(name) => {
                    let _ = writeln!(out, "\n[{name}]");
                }
                Line::Entry { key, value, note: Some(note) } => {
                    let _ = writeln!(out, "{key} = {value} # {note}");
                }
                Line::Entry { key, value, note: None } => {
                    let _ = writeln!(out, "{key} = {value}");
                }
            }
        }
        let _ = writeln!(out, "\nfailures = {}", self.failures);
        if self.timestamps {
            let _ = writeln!(out, "elapsed_s = {:.3}", self.started.elapsed().as_secs_f64());
        }
        out
    }
}

fn tol_long(v: f64) -> String {
    format!("{v:.3e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_have_notes_and_no_timestamp() {
        let mut r = Report::new("pk", false);
        r.input("nodes", 256);
        r.scalar("value", 0.5, 1e-6);
        r.estimate("mean", 0.25, 0.001);
        assert!(r.check("residual", 1e-9, 1e-6));
        assert!(!r.check("bad", 1.0, 1e-6));
        let text = r.render();
        assert!(text.contains("value = 0.5 # tol 1.0e-6"));
        assert!(text.contains("mean = 0.25 # se 1.0e-3"));
        assert!(text.contains("residual = pass # 1.000e-9 < 1.0e-6"));
        assert!(text.contains("bad = FAIL"));
        assert!(text.contains("failures = 1"));
        assert!(!text.contains("timestamp") && !text.contains("elapsed"));
        assert_eq!(text, r.render());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(-3.0), "-3");
        assert_eq!(num(1e-9), "1.000000000000e-9");
        assert_eq!(num(0.0), "0");
    }
}
