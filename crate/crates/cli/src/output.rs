use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::Failure;

/// `v` to 9 significant digits, in the style of C's `%.9g`.
pub fn sig(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let fixed = format!("{:.*}", (8 - exp) as usize, v);
        trim_fraction(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV document: `#` comment lines, a header row, then rows of numbers.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(comments: &str, header: &str) -> Self {
        let mut text = comments.to_string();
        text.push_str(header);
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| sig(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
///
/// A file left behind by a failed write is removed.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .context("writing to stdout")
                .map_err(Failure::usage)
        }
        Some(p) => fs::write(p, text).map_err(|e| {
            if p.is_file() {
                let _ = fs::remove_file(p);
            }
            Failure::usage(anyhow::Error::new(e).context(format!("cannot write {}", p.display())))
        }),
    }
}
