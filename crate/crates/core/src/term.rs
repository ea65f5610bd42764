//! Signatures, terms, the prefix term syntax and recursive term evaluation.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Caps, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::table::{checked_pow, Elem, OperationTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols. The order fixes the canonical
/// enumeration order used by every downstream computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '#')
        && !looks_like_var(name)
}

fn looks_like_var(s: &str) -> bool {
    s.len() > 1 && s.starts_with('x') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut out: Vec<Symbol> = Vec::new();
        for (name, arity) in symbols {
            let name = name.into();
            if !valid_name(&name) {
                return Err(Error::invalid(format!("invalid symbol name `{name}`")));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(Error::invalid(format!("duplicate symbol `{name}`")));
            }
            out.push(Symbol { name, arity });
        }
        Ok(Signature { symbols: out })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn arity(&self, symbol: usize) -> usize {
        self.symbols[symbol].arity
    }

    pub fn name(&self, symbol: usize) -> &str {
        &self.symbols[symbol].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn has_constants(&self) -> bool {
        self.symbols.iter().any(|s| s.arity == 0)
    }
}

/// The ambient variable set `x1..xn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarContext {
    n: usize,
}

impl VarContext {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("variable context needs at least one variable"));
        }
        Ok(VarContext { n })
    }

    pub fn arity(self) -> usize {
        self.n
    }
}

/// A term over some signature. Symbols are referenced by their index in the
/// signature; children are shared, equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// 1-based variable index.
    Var(usize),
    App(usize, Arc<[Term]>),
}

impl Term {
    pub fn var(i: usize) -> Term {
        Term::Var(i)
    }

    pub fn app(symbol: usize, children: Vec<Term>) -> Term {
        Term::App(symbol, children.into())
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, ch) => 1 + ch.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, ch) => 1 + ch.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Largest variable index occurring in the term (0 if none).
    pub fn max_var(&self) -> usize {
        match self {
            Term::Var(i) => *i,
            Term::App(_, ch) => ch.iter().map(Term::max_var).max().unwrap_or(0),
        }
    }

    /// Checks arities against `sig` and variable bounds against `ctx`.
    pub fn check(&self, sig: &Signature, ctx: VarContext) -> Result<()> {
        match self {
            Term::Var(i) => {
                if *i == 0 || *i > ctx.arity() {
                    return Err(Error::VariableOutOfContext {
                        index: *i,
                        arity: ctx.arity(),
                    });
                }
                Ok(())
            }
            Term::App(s, ch) => {
                let sym = sig
                    .symbols()
                    .get(*s)
                    .ok_or_else(|| Error::UnknownSymbol(format!("#{s}")))?;
                if sym.arity != ch.len() {
                    return Err(Error::ArityMismatch {
                        symbol: sym.name.clone(),
                        expected: sym.arity,
                        found: ch.len(),
                    });
                }
                ch.iter().try_for_each(|c| c.check(sig, ctx))
            }
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay { term: self, sig }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(s, ch) => {
                write!(f, "({}", self.sig.name(*s))?;
                for c in ch.iter() {
                    write!(f, " {}", c.display(self.sig))?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn print_term(t: &Term, sig: &Signature) -> String {
    t.display(sig).to_string()
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

fn tokenize(src: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c == '(' {
            out.push((i, Token::Open));
            i += 1;
        } else if c == ')' {
            out.push((i, Token::Close));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let c = src[i..].chars().next().unwrap();
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                i += c.len_utf8();
            }
            out.push((start, Token::Word(&src[start..i])));
        }
    }
    out
}

/// Parses the prefix syntax `term := xN | "(" name term* ")"`.
pub fn parse_term(src: &str, sig: &Signature, ctx: VarContext) -> Result<Term> {
    let tokens = tokenize(src);
    let mut pos = 0;
    let t = parse_at(&tokens, &mut pos, src.len(), sig, ctx)?;
    if let Some((at, _)) = tokens.get(pos) {
        return Err(Error::Syntax {
            pos: *at,
            msg: "trailing input after term".into(),
        });
    }
    Ok(t)
}

fn parse_at(
    tokens: &[(usize, Token<'_>)],
    pos: &mut usize,
    end: usize,
    sig: &Signature,
    ctx: VarContext,
) -> Result<Term> {
    let Some((at, tok)) = tokens.get(*pos) else {
        return Err(Error::Syntax {
            pos: end,
            msg: "unexpected end of input".into(),
        });
    };
    *pos += 1;
    match tok {
        Token::Close => Err(Error::Syntax {
            pos: *at,
            msg: "unexpected `)`".into(),
        }),
        Token::Word(w) => {
            if !looks_like_var(w) {
                return Err(Error::Syntax {
                    pos: *at,
                    msg: format!("expected variable or `(`, found `{w}`"),
                });
            }
            let index: usize = w[1..].parse().map_err(|_| Error::Syntax {
                pos: *at,
                msg: format!("bad variable `{w}`"),
            })?;
            if index == 0 || index > ctx.arity() {
                return Err(Error::VariableOutOfContext {
                    index,
                    arity: ctx.arity(),
                });
            }
            Ok(Term::Var(index))
        }
        Token::Open => {
            let Some((name_at, Token::Word(name))) = tokens.get(*pos) else {
                return Err(Error::Syntax {
                    pos: tokens.get(*pos).map_or(end, |t| t.0),
                    msg: "expected symbol name after `(`".into(),
                });
            };
            *pos += 1;
            let symbol = sig.index_of(name).ok_or_else(|| {
                let _ = name_at;
                Error::UnknownSymbol(name.to_string())
            })?;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => {
                        return Err(Error::Syntax {
                            pos: end,
                            msg: "unclosed `(`".into(),
                        })
                    }
                    Some((_, Token::Close)) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(parse_at(tokens, pos, end, sig, ctx)?),
                }
            }
            let expected = sig.arity(symbol);
            if expected != children.len() {
                return Err(Error::ArityMismatch {
                    symbol: name.to_string(),
                    expected,
                    found: children.len(),
                });
            }
            Ok(Term::app(symbol, children))
        }
    }
}

/// Evaluates `t` at `args` in `alg`, bottom-up.
pub fn eval_term(t: &Term, alg: &FiniteAlgebra, args: &[Elem]) -> Result<Elem> {
    let ctx = VarContext::new(args.len())?;
    t.check(alg.signature(), ctx)?;
    if let Some(bad) = args.iter().find(|&&a| a as usize >= alg.size()) {
        return Err(Error::invalid(format!(
            "argument {bad} outside carrier of size {}",
            alg.size()
        )));
    }
    Ok(eval_unchecked(t, alg, args))
}

fn eval_unchecked(t: &Term, alg: &FiniteAlgebra, args: &[Elem]) -> Elem {
    match t {
        Term::Var(i) => args[i - 1],
        Term::App(s, ch) => {
            let vals: Vec<Elem> = ch.iter().map(|c| eval_unchecked(c, alg, args)).collect();
            alg.apply(*s, &vals)
        }
    }
}

/// The term operation of `t` on `alg` as an `n`-ary table.
pub fn term_table(t: &Term, alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<OperationTable> {
    let ctx = VarContext::new(n)?;
    t.check(alg.signature(), ctx)?;
    let k = alg.size();
    let len = checked_pow(k, n).ok_or(Error::CapExceeded {
        what: "table size",
        requested: u128::MAX,
        limit: caps.table_bytes as u128,
    })?;
    caps.check_table_len(len)?;
    Ok(OperationTable::from_raw(n, k, table_rec(t, alg, n, len)))
}

fn table_rec(t: &Term, alg: &FiniteAlgebra, n: usize, len: usize) -> Vec<Elem> {
    match t {
        Term::Var(i) => OperationTable::projection(n, alg.size(), i - 1).into_data(),
        Term::App(s, ch) => {
            let tables: Vec<Vec<Elem>> = ch.iter().map(|c| table_rec(c, alg, n, len)).collect();
            let mut args = vec![0; tables.len()];
            (0..len)
                .map(|idx| {
                    for (a, tab) in args.iter_mut().zip(&tables) {
                        *a = tab[idx];
                    }
                    alg.apply(*s, &args)
                })
                .collect()
        }
    }
}
