//! Plain-text matrix format.
//!
//! ```text
//! q r n
//! a_11 a_12 ... a_1n
//! ...
//! a_r1 a_r2 ... a_rn
//! ```
//!
//! Tokens are separated by spaces or tabs. Entries are field elements in
//! their integer encoding `0..q`. Blank lines after the last row are allowed;
//! anything else is an error reported with its 1-based line and column.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::FieldSpec;
use crate::matroid::LinearMatroid;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c == ' ' || c == '\t' {
            if let Some(s) = start.take() {
                out.push(Token { text: &line[s..i], column: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &line[s..], column: s + 1 });
    }
    out
}

fn number(tok: &Token<'_>, line: usize, what: &str) -> Result<u64, ParseError> {
    tok.text.parse::<u64>().map_err(|_| ParseError {
        line,
        column: tok.column,
        message: format!("expected {what}, found `{}`", tok.text),
    })
}

pub fn parse_matrix(text: &str) -> Result<LinearMatroid, ParseError> {
    let lines: Vec<&str> = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let err = |line: usize, column: usize, message: String| ParseError { line, column, message };

    let header = lines.first().ok_or_else(|| err(1, 1, "empty input".into()))?;
    let toks = tokens(header);
    if toks.len() != 3 {
        let column = toks.get(3).map_or(header.len() + 1, |t| t.column);
        return Err(err(1, column, format!("header needs `q r n`, found {} fields", toks.len())));
    }
    let q = number(&toks[0], 1, "field order q")?;
    let r = number(&toks[1], 1, "row count r")? as usize;
    let n = number(&toks[2], 1, "column count n")? as usize;
    let field = FieldSpec::new(q).map_err(|e| err(1, toks[0].column, e.to_string()))?;

    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let ln = i + 2;
        let line = lines
            .get(i + 1)
            .ok_or_else(|| err(ln, 1, format!("expected row {} of {r}", i + 1)))?;
        let toks = tokens(line);
        if toks.len() != n {
            let column = toks.get(n).map_or(line.len() + 1, |t| t.column);
            return Err(err(ln, column, format!("expected {n} entries, found {}", toks.len())));
        }
        let mut row = Vec::with_capacity(n);
        for t in &toks {
            let v = number(t, ln, "field element")?;
            if v >= q {
                return Err(err(ln, t.column, format!("entry {v} is not an element of GF({q})")));
            }
            row.push(v as u8);
        }
        rows.push(row);
    }
    for (i, line) in lines.iter().enumerate().skip(r + 1) {
        if let Some(t) = tokens(line).first() {
            return Err(err(i + 1, t.column, "unexpected content after the last row".into()));
        }
    }
    LinearMatroid::with_size(Arc::new(field), rows, n).map_err(|e| err(1, 1, e.to_string()))
}

/// Writes the matrix of `m` in the text format, with a trailing newline.
pub fn format_matrix(m: &LinearMatroid) -> String {
    MatrixDisplay(m).to_string()
}

struct MatrixDisplay<'a>(&'a LinearMatroid);

impl fmt::Display for MatrixDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use crate::matroid::Matroid;
        let m = self.0;
        writeln!(f, "{} {} {}", m.field().order(), m.rows().len(), m.ground_size())?;
        for row in m.rows() {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Matroid;

    #[test]
    fn round_trip() {
        let text = "2 3 4\n1 0 0 1\n0 1 0 1\n0 0 1 0\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m.ground_size(), 4);
        assert_eq!(m.full_rank(), 3);
        assert_eq!(format_matrix(&m), text);
    }

    #[test]
    fn zero_rows() {
        let m = parse_matrix("3 0 5\n").unwrap();
        assert_eq!(m.ground_size(), 5);
        assert_eq!(m.full_rank(), 0);
    }

    #[test]
    fn positioned_errors() {
        let e = parse_matrix("2 2 3\n1 0 1\n0 x 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        let e = parse_matrix("3 1 2\n1  3\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(e.message.contains("GF(3)"));
        let e = parse_matrix("6 1 1\n1\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_matrix("2 1 2\n1 0 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        let e = parse_matrix("2 1 2\n1 0\n\n0 1\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_matrix("2 2 2\n1 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_matrix("").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
