//! Clone levels `Clo_n(A)` and free algebras.
//!
//! `Clo_n(A)` is the subalgebra of `A^(A^n)` generated by the `n`
//! projections, so it is computed by the closure engine over a
//! non-materialized power. For finite `A` the pointwise closure of
//! `Clo_n(A)` is `Clo_n(A)` itself; only `Clo_n` is represented.

use crate::algebra::{Caps, FiniteAlgebra, ProductView, Structure};
use crate::closure::close;
use crate::error::{Error, Result};
use crate::table::{checked_pow, for_each_tuple, Elem, OperationTable};
use crate::term::Term;

/// The `n`-ary term operations of an algebra, sorted by table, each with
/// the first witness term found.
#[derive(Debug, Clone)]
pub struct CloneLevel {
    algebra: FiniteAlgebra,
    arity: usize,
    members: Vec<OperationTable>,
    witnesses: Vec<Term>,
    complete: bool,
}

pub(crate) fn variables(n: usize) -> Vec<Term> {
    (1..=n).map(Term::Var).collect()
}

pub(crate) fn table_len(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<usize> {
    if n == 0 {
        return Err(Error::invalid("clone levels start at arity 1"));
    }
    let len = checked_pow(alg.size(), n).ok_or(Error::CapExceeded {
        what: "table bytes",
        requested: u128::MAX,
        limit: caps.table_bytes as u128,
    })?;
    caps.check_table_len(len)?;
    Ok(len)
}

/// Generates `Clo_n(alg)` from the projections. A level that hits the
/// member cap comes back with `complete() == false`.
pub fn clone_generate(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<CloneLevel> {
    let len = table_len(alg, n, caps)?;
    let view = ProductView::power(alg, len)?;
    let k = alg.size();
    let seeds = (0..n).map(|i| OperationTable::projection(n, k, i).into_data());
    let closure = close(&view, seeds, caps.clone_members);
    let witnesses = closure.witness_terms(&variables(n));
    let mut pairs: Vec<(OperationTable, Term)> = closure
        .elements
        .into_iter()
        .zip(witnesses)
        .map(|(data, t)| (OperationTable::from_raw(n, k, data), t))
        .collect();
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (members, witnesses) = pairs.into_iter().unzip();
    Ok(CloneLevel {
        algebra: alg.clone(),
        arity: n,
        members,
        witnesses,
        complete: closure.complete,
    })
}

impl CloneLevel {
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn members(&self) -> &[OperationTable] {
        &self.members
    }

    pub fn witnesses(&self) -> &[Term] {
        &self.witnesses
    }

    pub fn witness(&self, i: usize) -> &Term {
        &self.witnesses[i]
    }

    /// Rebuilds a level from stored parts (used by caches). The members are
    /// re-sorted and every witness is re-evaluated.
    pub fn from_parts(
        algebra: FiniteAlgebra,
        arity: usize,
        members: Vec<OperationTable>,
        witnesses: Vec<Term>,
        complete: bool,
        caps: &Caps,
    ) -> Result<Self> {
        if members.len() != witnesses.len() {
            return Err(Error::invalid("members and witnesses differ in length"));
        }
        for (m, w) in members.iter().zip(&witnesses) {
            if m.arity() != arity || m.base() != algebra.size() {
                return Err(Error::invalid("member of wrong shape"));
            }
            if crate::term::term_table(w, &algebra, arity, caps)? != *m {
                return Err(Error::invalid("witness does not evaluate to its member"));
            }
        }
        let mut pairs: Vec<_> = members.into_iter().zip(witnesses).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        pairs.dedup_by(|a, b| a.0 == b.0);
        let (members, witnesses) = pairs.into_iter().unzip();
        Ok(CloneLevel {
            algebra,
            arity,
            members,
            witnesses,
            complete,
        })
    }

    pub fn position(&self, table: &[Elem]) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.data().cmp(table))
            .ok()
    }

    pub fn contains(&self, table: &[Elem]) -> bool {
        self.position(table).is_some()
    }

    /// Index of the `i`-th projection (0-based).
    pub fn projection_index(&self, i: usize) -> usize {
        let p = OperationTable::projection(self.arity, self.algebra.size(), i);
        self.position(p.data()).expect("projections are members")
    }

    /// `σ(g_1, .., g_m)` computed pointwise.
    pub fn compose(&self, symbol: usize, args: &[&[Elem]]) -> Vec<Elem> {
        compose_tables(&self.algebra, symbol, args, self.members[0].data().len())
    }

    /// First `(symbol, member indices)` whose composite is not a member, if
    /// any. Exhaustive over all argument tuples.
    pub fn composition_violation(&self) -> Option<(usize, Vec<usize>)> {
        let sig = self.algebra.signature();
        for sym in 0..sig.len() {
            let mut bad = None;
            for_each_tuple(self.len(), sig.arity(sym), |idx| {
                if bad.is_some() {
                    return;
                }
                let args: Vec<&[Elem]> = idx.iter().map(|&i| self.members[i as usize].data()).collect();
                if !self.contains(&self.compose(sym, &args)) {
                    bad = Some(idx.iter().map(|&i| i as usize).collect());
                }
            });
            if let Some(b) = bad {
                return Some((sym, b));
            }
        }
        None
    }

    pub fn into_parts(self) -> (Vec<OperationTable>, Vec<Term>) {
        (self.members, self.witnesses)
    }
}

pub(crate) fn compose_tables(alg: &FiniteAlgebra, symbol: usize, args: &[&[Elem]], len: usize) -> Vec<Elem> {
    let mut buf = vec![0; args.len()];
    (0..len)
        .map(|i| {
            for (b, a) in buf.iter_mut().zip(args) {
                *b = a[i];
            }
            alg.apply(symbol, &buf)
        })
        .collect()
}

/// The free algebra on `n` generators in the variety of `A`, carried by the
/// members of `Clo_n(A)` with pointwise operations.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub algebra: FiniteAlgebra,
    /// Element index of each projection `x1..xn`.
    pub generators: Vec<Elem>,
    pub level: CloneLevel,
}

pub fn free_algebra(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<FreeAlgebra> {
    let level = clone_generate(alg, n, caps)?;
    FreeAlgebra::from_level(level, caps)
}

impl FreeAlgebra {
    pub fn from_level(level: CloneLevel, caps: &Caps) -> Result<Self> {
        if !level.complete() {
            return Err(Error::IncompleteLevel {
                arity: level.arity(),
            });
        }
        let size = level.len();
        caps.check_product(Some(size))?;
        let sig = level.algebra().signature_arc();
        let view = ProductView::power(level.algebra(), level.members[0].data().len())?;
        let mut tables = Vec::with_capacity(sig.len());
        for sym in 0..sig.len() {
            let m = sig.arity(sym);
            let len = checked_pow(size, m).ok_or(Error::CapExceeded {
                what: "table bytes",
                requested: u128::MAX,
                limit: caps.table_bytes as u128,
            })?;
            caps.check_table_len(len)?;
            let mut table = Vec::with_capacity(len);
            let mut missing = None;
            for_each_tuple(size, m, |idx| {
                let args: Vec<Vec<Elem>> = idx
                    .iter()
                    .map(|&i| level.members[i as usize].data().to_vec())
                    .collect();
                let refs: Vec<&Vec<Elem>> = args.iter().collect();
                let r = view.apply(sym, &refs);
                match level.position(&r) {
                    Some(p) => table.push(p as Elem),
                    None => {
                        missing.get_or_insert(sym);
                        table.push(0);
                    }
                }
            });
            if missing.is_some() {
                return Err(Error::Internal("complete clone level not closed".into()));
            }
            tables.push(table);
        }
        let generators = (0..level.arity())
            .map(|i| level.projection_index(i) as Elem)
            .collect();
        let label = format!(
            "F{}({})",
            level.arity(),
            level.algebra().label().unwrap_or("A")
        );
        let algebra = FiniteAlgebra::new(sig, size, tables, Some(label))?;
        Ok(FreeAlgebra {
            algebra,
            generators,
            level,
        })
    }
}
