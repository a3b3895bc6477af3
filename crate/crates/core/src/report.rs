//! Shared output helpers: number formatting and `#` provenance headers for CSV files.

use std::io::Write;

use crate::error::Result;

pub const TOOL_VERSION: &str = concat!("qamic ", env!("CARGO_PKG_VERSION"));

/// Formats `x` with six significant digits, trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    if magnitude > 5 {
        let step = 10f64.powi(magnitude - 5);
        return format!("{:.0}", (x / step).round() * step);
    }
    let decimals = (5 - magnitude) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Ordered `key: value` pairs written as `# key: value` lines ahead of CSV data.
#[derive(Debug, Clone)]
pub struct Provenance {
    entries: Vec<(String, String)>,
}

impl Default for Provenance {
    fn default() -> Self {
        Self::new()
    }
}

impl Provenance {
    /// Starts with the tool name and version.
    pub fn new() -> Self {
        Self {
            entries: vec![("tool".into(), TOOL_VERSION.into())],
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn write_comments<W: Write>(&self, out: &mut W) -> Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }
}
