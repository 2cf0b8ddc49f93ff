//! Matrix text format.
//!
//! First line `dim N`, then `N` lines of `N` whitespace-separated complex
//! tokens `a+bi`. The parser is tolerant of the short forms `a`, `bi`, `-bi`,
//! `i` and `a-bi`.

use num_complex::Complex64;

use super::{Amplitude, QnumError, UMatrix};

/// Canonical writer form: `a+bi` / `a-bi` with shortest-roundtrip floats.
pub fn format_complex(z: Amplitude) -> String {
    // normalize negative zeros so the token stays parseable
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im.is_sign_negative() {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Parse one complex token.
pub fn parse_complex_token(tok: &str) -> Option<Amplitude> {
    let t = tok.trim();
    if t.is_empty() {
        return None;
    }
    if let Some(imag) = t.strip_suffix('i') {
        // Forms ending in `i`: bi, -bi, i, -i, a+bi, a-bi.
        // Split at the last +/- that is not a leading sign or exponent sign.
        let bytes = imag.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let ch = bytes[idx] as char;
            if (ch == '+' || ch == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        match split {
            Some(idx) => {
                let re: f64 = imag[..idx].parse().ok()?;
                let im_str = &imag[idx..];
                let im: f64 = match im_str {
                    "+" => 1.0,
                    "-" => -1.0,
                    s => s.parse().ok()?,
                };
                Some(Complex64::new(re, im))
            }
            None => {
                let im: f64 = match imag {
                    "" => 1.0,
                    "-" => -1.0,
                    "+" => 1.0,
                    s => s.parse().ok()?,
                };
                Some(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().ok()?;
        Some(Complex64::new(re, 0.0))
    }
}

impl UMatrix {
    /// Render in the matrix text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim());
        for r in 0..self.dim() {
            let row: Vec<String> = self.row(r).iter().map(|z| format_complex(*z)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parse the matrix text format.
    pub fn from_text(text: &str) -> Result<UMatrix, QnumError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (lineno, header) = lines.next().ok_or(QnumError::MatrixParse {
            line: 1,
            msg: "empty input".into(),
        })?;
        let dim: usize = header
            .trim()
            .strip_prefix("dim")
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| QnumError::MatrixParse {
                line: lineno + 1,
                msg: format!("expected `dim N`, got `{}`", header.trim()),
            })?;
        let mut entries = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            let (lineno, line) = lines.next().ok_or(QnumError::MatrixParse {
                line: 0,
                msg: format!("expected {dim} rows"),
            })?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != dim {
                return Err(QnumError::MatrixParse {
                    line: lineno + 1,
                    msg: format!("expected {dim} entries, got {}", toks.len()),
                });
            }
            for tok in toks {
                let z = parse_complex_token(tok).ok_or_else(|| QnumError::MatrixParse {
                    line: lineno + 1,
                    msg: format!("bad complex token `{tok}`"),
                })?;
                entries.push(z);
            }
        }
        UMatrix::from_rows(dim, entries)
    }
}
