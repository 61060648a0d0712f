//! `HEXP v1` expansion files.
//!
//! ```text
//! HEXP v1 dim=2 degree=3
//! 0,0 1.0000000000000000e0 0.0000000000000000e0
//! ...
//! ```
//!
//! Every stored coefficient gets one record, in graded order. Values carry
//! 17 significant digits, which round-trips every `f64` exactly.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use hermitex::{Complex, Expansion, MultiIndex};

use crate::error::CliError;

pub const MAGIC: &str = "HEXP";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFile {
    pub version: u32,
    pub expansion: Expansion,
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse { line, message: message.into() }
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize, CliError> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {key}=")))?;
    let value = token
        .strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| parse_err(line, format!("expected {key}=<n>, found `{token}`")))?;
    value.parse().map_err(|_| parse_err(line, format!("bad {key} value `{value}`")))
}

impl ExpansionFile {
    pub fn new(expansion: Expansion) -> Self {
        Self { version: VERSION, expansion }
    }

    pub fn to_text(&self) -> String {
        let f = &self.expansion;
        let mut out = format!("{MAGIC} v{} dim={} degree={}\n", self.version, f.dim(), f.degree());
        for (alpha, c) in f.iter() {
            let idx: Vec<String> = alpha.entries().iter().map(|a| a.to_string()).collect();
            writeln!(out, "{} {:.16e} {:.16e}", idx.join(","), c.re, c.im).expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty expansion file"))?;
        let hl = hl + 1;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some(MAGIC) {
            return Err(parse_err(hl, format!("expected `{MAGIC}` header")));
        }
        let version = match tokens.next() {
            Some(v) if v == format!("v{VERSION}") => VERSION,
            other => return Err(parse_err(hl, format!("unsupported version {other:?}"))),
        };
        let dim = header_field(tokens.next(), "dim", hl)?;
        let degree = header_field(tokens.next(), "degree", hl)?;
        if dim == 0 {
            return Err(parse_err(hl, "dim must be positive"));
        }
        hermitex::hermite::check_degree(degree)?;

        let mut expansion = Expansion::zeros(dim, degree);
        let mut seen = HashSet::new();
        for (i, line) in lines {
            let ln = i + 1;
            let mut parts = line.split_whitespace();
            let (Some(idx), Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(parse_err(ln, "expected `<i1,...,id> <re> <im>`"));
            };
            let entries: Vec<u32> = idx
                .split(',')
                .map(|t| t.parse().map_err(|_| parse_err(ln, format!("bad index `{idx}`"))))
                .collect::<Result<_, _>>()?;
            if entries.len() != dim {
                return Err(parse_err(ln, format!("index `{idx}` has {} entries, dim is {dim}", entries.len())));
            }
            let alpha = MultiIndex::new(entries);
            if alpha.order() > degree {
                return Err(parse_err(ln, format!("|{alpha}| exceeds degree {degree}")));
            }
            if !seen.insert(alpha.clone()) {
                return Err(parse_err(ln, format!("duplicate record for {alpha}")));
            }
            let re: f64 = re.parse().map_err(|_| parse_err(ln, format!("bad number `{re}`")))?;
            let im: f64 = im.parse().map_err(|_| parse_err(ln, format!("bad number `{im}`")))?;
            expansion.set(&alpha, Complex::new(re, im));
        }
        Ok(Self { version, expansion })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_records() {
        let f = Expansion::basis(&[3].into()).with_degree(4);
        let text = ExpansionFile::new(f.clone()).to_text();
        assert!(text.starts_with("HEXP v1 dim=1 degree=4\n0 0.0000000000000000e0 0.0000000000000000e0\n"));
        assert!(text.contains("\n3 1.0000000000000000e0 0.0000000000000000e0\n"));
        assert_eq!(ExpansionFile::parse(&text).unwrap().expansion, f);
    }

    #[test]
    fn missing_records_are_zero() {
        let parsed = ExpansionFile::parse("HEXP v1 dim=2 degree=2\n1,1 2.5 -1\n").unwrap().expansion;
        assert_eq!(parsed.get(&[1, 1].into()), Complex::new(2.5, -1.0));
        assert_eq!(parsed.get(&[0, 2].into()), Complex::new(0.0, 0.0));
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            "",
            "HEXQ v1 dim=1 degree=1\n",
            "HEXP v2 dim=1 degree=1\n",
            "HEXP v1 dim=1\n",
            "HEXP v1 dim=1 degree=1\n2 1 0\n",
            "HEXP v1 dim=1 degree=1\n1 1 0\n1 2 0\n",
            "HEXP v1 dim=2 degree=1\n1 1 0\n",
            "HEXP v1 dim=1 degree=1\n1 x 0\n",
            "HEXP v1 dim=1 degree=1\n1 1\n",
        ] {
            assert!(ExpansionFile::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn signed_zero_and_extremes_survive() {
        let mut f = Expansion::zeros(1, 3);
        f.set(&[0].into(), Complex::new(-0.0, f64::MIN_POSITIVE));
        f.set(&[1].into(), Complex::new(f64::MAX, -5e-324));
        f.set(&[2].into(), Complex::new(0.1 + 0.2, -1.0 / 3.0));
        let back = ExpansionFile::parse(&ExpansionFile::new(f.clone()).to_text()).unwrap().expansion;
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}
