//! Line-oriented algebra files.
//!
//! ```text
//! # comment
//! algebra z4 size 4
//! op add arity 2
//! 0 1 2 3
//! 1 2 3 0
//! 2 3 0 1
//! 3 0 1 2
//! ```
//!
//! Each `op` block is followed by exactly `k^m` values in the global tuple
//! order; line breaks inside a block are free.

use std::fmt::Write as _;

use crate::algebra::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::table::{checked_pow, Elem};
use crate::term::Signature;

struct Tok<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

fn tokens(src: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for word in line.split_whitespace() {
            let at = line[offset..].find(word).unwrap() + offset;
            offset = at + word.len();
            out.push(Tok {
                line: ln + 1,
                column: line[..at].chars().count() + 1,
                text: word,
            });
        }
    }
    out
}

fn err_at(tok: Option<&Tok<'_>>, end_line: usize, msg: impl Into<String>) -> Error {
    let (line, column) = tok.map_or((end_line, 1), |t| (t.line, t.column));
    Error::Parse {
        line,
        column,
        msg: msg.into(),
    }
}

struct Cursor<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    end_line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&Tok<'a>> {
        let end_line = self.end_line;
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| err_at(None, end_line, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let t = self.next(kw)?;
        if t.text != kw {
            return Err(err_at(Some(t), 0, format!("expected `{kw}`, found `{}`", t.text)));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let t = self.next(what)?;
        t.text
            .parse()
            .map_err(|_| err_at(Some(t), 0, format!("expected {what}, found `{}`", t.text)))
    }
}

/// Parses one algebra. Trailing content is an error.
pub fn parse_algebra(src: &str) -> Result<FiniteAlgebra> {
    let mut cur = Cursor {
        toks: tokens(src),
        pos: 0,
        end_line: src.lines().count().max(1),
    };
    let alg = parse_from(&mut cur)?;
    if let Some(t) = cur.peek() {
        return Err(err_at(Some(t), 0, format!("unexpected `{}` after last table", t.text)));
    }
    Ok(alg)
}

fn parse_from(cur: &mut Cursor<'_>) -> Result<FiniteAlgebra> {
    cur.keyword("algebra")?;
    let name = cur.next("algebra name")?.text.to_string();
    cur.keyword("size")?;
    let size_tok_pos = cur.pos;
    let size = cur.number("carrier size")?;
    if size == 0 || size > Elem::MAX as usize {
        return Err(err_at(cur.toks.get(size_tok_pos), 0, "carrier size must be positive"));
    }
    let mut symbols = Vec::new();
    let mut tables = Vec::new();
    while cur.peek().is_some_and(|t| t.text == "op") {
        cur.keyword("op")?;
        let name_pos = cur.pos;
        let op = cur.next("operation name")?.text.to_string();
        if symbols.iter().any(|(n, _)| *n == op) {
            return Err(err_at(cur.toks.get(name_pos), 0, format!("duplicate operation `{op}`")));
        }
        cur.keyword("arity")?;
        let arity = cur.number("arity")?;
        let len = checked_pow(size, arity)
            .filter(|&l| l <= 1 << 26)
            .ok_or_else(|| err_at(cur.toks.get(name_pos), 0, "operation table too large"))?;
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            let t = cur.next("table value")?;
            let v: usize = t
                .text
                .parse()
                .map_err(|_| err_at(Some(t), 0, format!("expected table value, found `{}`", t.text)))?;
            if v >= size {
                return Err(err_at(Some(t), 0, format!("value {v} outside 0..{size}")));
            }
            table.push(v as Elem);
        }
        symbols.push((op, arity));
        tables.push(table);
    }
    let sig = Signature::new(symbols).map_err(|e| Error::Parse {
        line: 1,
        column: 1,
        msg: e.to_string(),
    })?;
    FiniteAlgebra::new(sig, size, tables, Some(name))
}

/// Canonical text form; `parse_algebra` reads it back.
pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::new();
    let name = alg.label().unwrap_or("A");
    let name: String = name
        .chars()
        .map(|c| if c.is_whitespace() || c == '#' { '_' } else { c })
        .collect();
    writeln!(out, "algebra {name} size {}", alg.size()).unwrap();
    for (s, sym) in alg.signature().symbols().iter().enumerate() {
        writeln!(out, "op {} arity {}", sym.name, sym.arity).unwrap();
        let row = if sym.arity == 0 { 1 } else { alg.size() };
        for chunk in alg.table(s).chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
    }
    out
}
