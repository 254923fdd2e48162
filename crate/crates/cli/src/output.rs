//! CSV rendering: fixed numeric format and comment headers.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// Ten significant digits in `%g` style: fixed notation for exponents in
/// `-5..10`, scientific otherwise, trailing zeros removed.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exponent) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exponent: i32 = exponent.parse().unwrap_or(0);
    if !(-5..10).contains(&exponent) {
        return format!("{}e{exponent}", trim_zeros(mantissa));
    }
    let decimals = (9 - exponent).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Quotes a field holding a comma, quote or line break.
fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Collects header comments and CSV rows, then writes them in one go.
pub struct Csv {
    text: String,
}

impl Csv {
    /// Starts a document with the tool version, the resolved configuration,
    /// the seed and the method.
    pub fn new(command: &str, config: &[(&str, String)], seed: Option<u64>, method: &str) -> Self {
        let mut text = format!("# collab-walk {}\n# command={command}", env!("CARGO_PKG_VERSION"));
        for (key, value) in config {
            let _ = write!(text, " {key}={value}");
        }
        let seed = seed.map_or("NA".to_string(), |s| s.to_string());
        let _ = write!(text, "\n# seed={seed}\n# method={method}\n");
        Csv { text }
    }

    pub fn comment(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "# {key}={value}");
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<String> = fields.iter().map(|f| quote(f.as_ref())).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn finish(self, output: Option<&Path>) -> Result<()> {
        match output {
            Some(path) => fs::write(path, self.text).with_context(|| format!("cannot write `{}`", path.display())),
            None => {
                let mut out = io::stdout().lock();
                out.write_all(self.text.as_bytes())?;
                Ok(out.flush()?)
            }
        }
    }
}
