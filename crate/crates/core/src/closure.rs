//! Worklist fixpoint for generated substructures.
//!
//! Elements are discovered in rounds: round `r + 1` applies every operation
//! to argument tuples that use at least one element found in round `r`, so
//! each tuple is evaluated exactly once and every element is first reached
//! through a derivation of minimal depth. The scan order is fixed, which
//! makes discovery order (and hence every witness) reproducible.

use std::ops::ControlFlow;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use crate::algebra::Structure;
use crate::term::Term;

/// How an element was first produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// The i-th seed.
    Seed(usize),
    Apply { symbol: usize, args: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Complete,
    CapHit,
    Stopped,
}

#[derive(Debug, Clone)]
pub struct Closure<E> {
    /// Elements in discovery order.
    pub elements: IndexSet<E, FxBuildHasher>,
    pub origins: Vec<Origin>,
    pub complete: bool,
    pub status: Status,
}

impl<E> Closure<E> {
    /// A witness term for every element, built from `seed_terms`.
    /// Subterms are shared.
    pub fn witness_terms(&self, seed_terms: &[Term]) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::with_capacity(self.origins.len());
        for origin in &self.origins {
            let t = match origin {
                Origin::Seed(i) => seed_terms[*i].clone(),
                Origin::Apply { symbol, args } => {
                    Term::app(*symbol, args.iter().map(|&a| out[a].clone()).collect())
                }
            };
            out.push(t);
        }
        out
    }

    /// Witness for one element without building the others.
    pub fn witness_term(&self, index: usize, seed_terms: &[Term]) -> Term {
        match &self.origins[index] {
            Origin::Seed(i) => seed_terms[*i].clone(),
            Origin::Apply { symbol, args } => Term::app(
                *symbol,
                args.iter()
                    .map(|&a| self.witness_term(a, seed_terms))
                    .collect(),
            ),
        }
    }
}

/// Closes `seeds` under every operation of `s`, stopping once more than
/// `cap` elements would be held.
pub fn close<S: Structure>(
    s: &S,
    seeds: impl IntoIterator<Item = S::Elem>,
    cap: usize,
) -> Closure<S::Elem> {
    close_with(s, seeds, cap, |_, _| ControlFlow::Continue(()))
}

/// As [`close`], calling `on_new(index, element)` for every new element;
/// returning `Break` stops the run with [`Status::Stopped`]. The run is
/// complete as soon as the whole carrier has been reached.
pub fn close_with<S: Structure>(
    s: &S,
    seeds: impl IntoIterator<Item = S::Elem>,
    cap: usize,
    mut on_new: impl FnMut(usize, &S::Elem) -> ControlFlow<()>,
) -> Closure<S::Elem> {
    let mut elements: IndexSet<S::Elem, FxBuildHasher> = IndexSet::default();
    let mut origins = Vec::new();
    let universe = s.carrier_size();

    macro_rules! admit {
        ($elem:expr, $origin:expr) => {{
            let elem = $elem;
            if !elements.contains(&elem) {
                if elements.len() >= cap {
                    return finish(elements, origins, Status::CapHit);
                }
                let (idx, _) = elements.insert_full(elem);
                origins.push($origin);
                if on_new(idx, &elements[idx]).is_break() {
                    return finish(elements, origins, Status::Stopped);
                }
                if universe == Some(elements.len()) {
                    return finish(elements, origins, Status::Complete);
                }
            }
        }};
    }

    for (i, seed) in seeds.into_iter().enumerate() {
        admit!(seed, Origin::Seed(i));
    }
    let sig = s.signature();
    for sym in 0..sig.len() {
        if sig.arity(sym) == 0 {
            admit!(
                s.apply(sym, &[]),
                Origin::Apply {
                    symbol: sym,
                    args: vec![]
                }
            );
        }
    }

    let mut lo = 0;
    loop {
        let hi = elements.len();
        if lo == hi {
            return finish(elements, origins, Status::Complete);
        }
        for sym in 0..sig.len() {
            let m = sig.arity(sym);
            if m == 0 {
                continue;
            }
            // Position `p` holds the first argument from the newest round:
            // earlier positions range over old elements, later ones over all.
            for p in 0..m {
                if p > 0 && lo == 0 {
                    break;
                }
                let mut idx = vec![0usize; m];
                idx[p] = lo;
                'tuples: loop {
                    let result = {
                        let args: Vec<&S::Elem> = idx.iter().map(|&i| &elements[i]).collect();
                        s.apply(sym, &args)
                    };
                    admit!(
                        result,
                        Origin::Apply {
                            symbol: sym,
                            args: idx.clone()
                        }
                    );
                    let mut q = m;
                    loop {
                        if q == 0 {
                            break 'tuples;
                        }
                        q -= 1;
                        idx[q] += 1;
                        let (start, end) = match q.cmp(&p) {
                            std::cmp::Ordering::Less => (0, lo),
                            std::cmp::Ordering::Equal => (lo, hi),
                            std::cmp::Ordering::Greater => (0, hi),
                        };
                        if idx[q] < end {
                            break;
                        }
                        idx[q] = start;
                    }
                }
            }
        }
        lo = hi;
    }
}

fn finish<E>(elements: IndexSet<E, FxBuildHasher>, origins: Vec<Origin>, status: Status) -> Closure<E> {
    Closure {
        elements,
        origins,
        complete: status == Status::Complete,
        status,
    }
}
