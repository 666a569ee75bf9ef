//! Plain-text formats for field elements, words and messages.
//!
//! An element is its residue list in the basis `1, X, .., X^{m-1}`, joined by
//! `:` (a bare decimal in prime fields). A word file has one symbol per line
//! with comma-separated components; a message file has one polynomial per
//! line with comma-separated coefficients, constant term first. Blank lines
//! are skipped and `#` starts a comment.

use std::fmt::Write as _;

use thiserror::Error;

use crate::codes::{Message, Word};
use crate::field::{Fe, Field};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn format_elem(f: &Field, a: Fe) -> String {
    let r = f.residues(a);
    let parts: Vec<String> = r.iter().map(u64::to_string).collect();
    parts.join(":")
}

pub fn parse_elem(f: &Field, s: &str) -> Result<Fe, String> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let mut res = Vec::with_capacity(parts.len());
    for p in &parts {
        let v: u64 = p.trim().parse().map_err(|_| format!("not a residue: {:?}", p.trim()))?;
        res.push(v);
    }
    if parts.len() == 1 && f.is_prime_field() {
        if res[0] >= f.characteristic() {
            return Err(format!("{} is not below p = {}", res[0], f.characteristic()));
        }
        return Ok(Fe(res[0]));
    }
    f.from_residues(&res).map_err(|e| e.to_string())
}

/// Non-empty content lines with their 1-based line numbers, comments removed.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        (!body.trim().is_empty()).then_some((i + 1, body))
    })
}

fn parse_row(f: &Field, line: usize, body: &str) -> Result<Vec<Fe>, ParseError> {
    let mut out = Vec::new();
    let mut col = 1;
    for item in body.split(',') {
        let lead = item.len() - item.trim_start().len();
        out.push(parse_elem(f, item).map_err(|message| ParseError { line, column: col + lead, message })?);
        col += item.len() + 1;
    }
    Ok(out)
}

pub fn format_word(f: &Field, w: &Word) -> String {
    let mut s = String::new();
    for sym in w.symbols() {
        let parts: Vec<String> = sym.iter().map(|&a| format_elem(f, a)).collect();
        let _ = writeln!(s, "{}", parts.join(","));
    }
    s
}

pub fn parse_word(f: &Field, text: &str) -> Result<Word, ParseError> {
    let mut rows = Vec::new();
    let mut width = None;
    for (line, body) in content_lines(text) {
        let row = parse_row(f, line, body)?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(ParseError { line, column: 1, message: format!("expected {w} components, found {}", row.len()) })
            }
            _ => {}
        }
        rows.push(row);
    }
    Word::from_symbols(rows).map_err(|e| ParseError { line: 0, column: 0, message: e.to_string() })
}

pub fn format_message(f: &Field, m: &Message) -> String {
    let mut s = String::new();
    for p in &m.polys {
        let parts: Vec<String> = if p.is_zero() {
            vec!["0".into()]
        } else {
            p.coeffs().iter().map(|&a| format_elem(f, a)).collect()
        };
        let _ = writeln!(s, "{}", parts.join(","));
    }
    s
}

pub fn parse_message(f: &Field, text: &str) -> Result<Message, ParseError> {
    let mut polys = Vec::new();
    for (line, body) in content_lines(text) {
        polys.push(Poly::new(f, parse_row(f, line, body)?));
    }
    Ok(Message::new(polys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{CodeSpec, Family};
    use crate::field::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trips() {
        let f = make_field(5, 3).unwrap();
        let spec = CodeSpec::new(Family::Irs, 6, 3, &f, 2, None, None).unwrap();
        let m = spec.random_message(&mut ChaCha8Rng::seed_from_u64(1));
        let w = spec.encode(&m).unwrap();
        assert_eq!(parse_word(&f, &format_word(&f, &w)).unwrap(), w);
        assert_eq!(parse_message(&f, &format_message(&f, &m)).unwrap(), m);
        assert_eq!(parse_elem(&f, "1:2:3").unwrap(), Fe(1 + 2 * 5 + 3 * 25));
    }

    #[test]
    fn reports_positions() {
        let f = make_field(13, 1).unwrap();
        let e = parse_word(&f, "# header\n1,2\n3, x\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 4));
        let e = parse_word(&f, "1,2\n3\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse_word(&f, "13\n").is_err());
        assert!(parse_elem(&f, "1:1").is_err());
    }
}
