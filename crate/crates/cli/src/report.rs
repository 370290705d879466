//! Machine-parseable key-value reports.
//!
//! One `key = value` line per entry, in insertion order. Every numeric claim
//! is an exact rational string, so reports are deterministic byte for byte
//! for a fixed input and seed; wall-clock timing goes to stderr only.

use overlap_core::rational::{format_rational, Rational};

#[derive(Default)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut r = Report::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn push_rational(&mut self, key: &str, value: &Rational) {
        self.push(key, format_rational(value));
    }

    pub fn push_bool(&mut self, key: &str, value: bool) {
        self.push(key, if value { "pass" } else { "FAIL" });
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}
