//! The natural clone homomorphism `Clo(A) → Clo(B)`, variety membership,
//! and uniform-continuity witnesses for it.
//!
//! At arity `n` the graph of the natural map is the subalgebra of
//! `A^(A^n) × B^(B^n)` generated by the paired projections. It is the graph
//! of a function exactly when every `n`-variable identity of `A` holds in
//! `B`; otherwise two pairs with equal first components give the witness
//! terms of a failing identity.

use std::collections::HashMap;

use rustc_hash::FxHashMap;
use std::ops::ControlFlow;

use crate::algebra::{generate_subalgebra, Caps, FiniteAlgebra, ProductView};
use crate::clone::{compose_tables, table_len, variables};
use crate::closure::{close_with, Status};
use crate::error::{Error, Result};
use crate::homomorphism::check_map_on;
use crate::table::{all_tuples, for_each_tuple, index_tuple, tuple_index, Elem, OperationTable};
use crate::term::{print_term, Term};

/// `n`-ary slice of the natural homomorphism, as an explicit graph sorted by
/// source table.
#[derive(Debug, Clone)]
pub struct NaturalHom {
    arity: usize,
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    source_tables: Vec<Vec<Elem>>,
    target_tables: Vec<Vec<Elem>>,
    witnesses: Vec<Term>,
}

/// Terms `s`, `t` with `s = t` valid in the source but not in the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub arity: usize,
    pub s: Term,
    pub t: Term,
    /// A target tuple where the two sides differ, and their values there.
    pub args: Vec<Elem>,
    pub s_value: Elem,
    pub t_value: Elem,
}

impl Counterexample {
    pub fn identity(&self, alg: &FiniteAlgebra) -> String {
        format!(
            "{} = {}",
            print_term(&self.s, alg.signature()),
            print_term(&self.t, alg.signature())
        )
    }
}

#[derive(Debug, Clone)]
pub enum NatHomOutcome {
    Hom(NaturalHom),
    Counterexample(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    Projection(usize),
    Composition { symbol: usize, args: Vec<usize> },
    NotTotal { symbol: usize, args: Vec<usize> },
}

/// Paired closure at arity `n`. Stops at the first non-functional pair.
pub fn natural_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<NatHomOutcome> {
    a.same_signature(b)?;
    let len_a = table_len(a, n, caps)?;
    let len_b = table_len(b, n, caps)?;
    let mut factors = vec![a; len_a];
    factors.extend(std::iter::repeat_n(b, len_b));
    let view = ProductView::new(factors)?;
    let seeds = (0..n).map(|i| {
        let mut v = OperationTable::projection(n, a.size(), i).into_data();
        v.extend(OperationTable::projection(n, b.size(), i).into_data());
        v
    });
    let mut graph: FxHashMap<Vec<Elem>, (usize, Vec<Elem>)> = FxHashMap::default();
    let mut clash = None;
    let closure = close_with(&view, seeds, caps.clone_members, |idx, elem| {
        let (src, dst) = elem.split_at(len_a);
        match graph.get(src) {
            Some((j, other)) if other.as_slice() != dst => {
                clash = Some((*j, idx));
                ControlFlow::Break(())
            }
            Some(_) => ControlFlow::Continue(()),
            None => {
                graph.insert(src.to_vec(), (idx, dst.to_vec()));
                ControlFlow::Continue(())
            }
        }
    });
    let vars = variables(n);
    match closure.status {
        Status::Stopped => {
            let (j, i) = clash.expect("stopped only on a clash");
            let (s, t) = (closure.witness_term(j, &vars), closure.witness_term(i, &vars));
            let bs = &closure.elements[j][len_a..];
            let bt = &closure.elements[i][len_a..];
            let pos = (0..len_b).find(|&p| bs[p] != bt[p]).unwrap();
            Ok(NatHomOutcome::Counterexample(Counterexample {
                arity: n,
                s,
                t,
                args: index_tuple(pos, b.size(), n),
                s_value: bs[pos],
                t_value: bt[pos],
            }))
        }
        Status::CapHit => Err(Error::CapExceeded {
            what: "natural homomorphism graph",
            requested: closure.elements.len() as u128 + 1,
            limit: caps.clone_members as u128,
        }),
        Status::Complete => {
            let witnesses = closure.witness_terms(&vars);
            let mut rows: Vec<(Vec<Elem>, Vec<Elem>, Term)> = closure
                .elements
                .into_iter()
                .zip(witnesses)
                .map(|(mut e, t)| {
                    let dst = e.split_off(len_a);
                    (e, dst, t)
                })
                .collect();
            rows.sort_by(|x, y| x.0.cmp(&y.0));
            let mut source_tables = Vec::with_capacity(rows.len());
            let mut target_tables = Vec::with_capacity(rows.len());
            let mut ws = Vec::with_capacity(rows.len());
            for (s, t, w) in rows {
                source_tables.push(s);
                target_tables.push(t);
                ws.push(w);
            }
            Ok(NatHomOutcome::Hom(NaturalHom {
                arity: n,
                source: a.clone(),
                target: b.clone(),
                source_tables,
                target_tables,
                witnesses: ws,
            }))
        }
    }
}

impl NaturalHom {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target(&self) -> &FiniteAlgebra {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.source_tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_tables.is_empty()
    }

    /// Source members (`Clo_n(A)`), ascending.
    pub fn source_tables(&self) -> &[Vec<Elem>] {
        &self.source_tables
    }

    pub fn target_tables(&self) -> &[Vec<Elem>] {
        &self.target_tables
    }

    pub fn witnesses(&self) -> &[Term] {
        &self.witnesses
    }

    pub fn position(&self, source_table: &[Elem]) -> Option<usize> {
        self.source_tables
            .binary_search_by(|t| t.as_slice().cmp(source_table))
            .ok()
    }

    pub fn image(&self, source_table: &[Elem]) -> Option<&[Elem]> {
        self.position(source_table).map(|i| self.target_tables[i].as_slice())
    }

    /// Images of the source projections, in variable order.
    pub fn generator_images(&self) -> Vec<&[Elem]> {
        (0..self.arity)
            .map(|i| {
                let p = OperationTable::projection(self.arity, self.source.size(), i);
                self.image(p.data()).expect("projections are in the graph")
            })
            .collect()
    }

    /// Projection preservation and the composition law, exhaustively over
    /// the level.
    pub fn check_laws(&self) -> std::result::Result<(), LawViolation> {
        for (i, img) in self.generator_images().into_iter().enumerate() {
            if img != OperationTable::projection(self.arity, self.target.size(), i).data() {
                return Err(LawViolation::Projection(i));
            }
        }
        let sig = self.source.signature();
        let len_a = self.source_tables[0].len();
        let len_b = self.target_tables[0].len();
        for sym in 0..sig.len() {
            let mut bad = None;
            for_each_tuple(self.len(), sig.arity(sym), |idx| {
                if bad.is_some() {
                    return;
                }
                let src: Vec<&[Elem]> = idx.iter().map(|&i| self.source_tables[i as usize].as_slice()).collect();
                let dst: Vec<&[Elem]> = idx.iter().map(|&i| self.target_tables[i as usize].as_slice()).collect();
                let composite = compose_tables(&self.source, sym, &src, len_a);
                let args = idx.iter().map(|&i| i as usize).collect();
                match self.image(&composite) {
                    None => bad = Some(LawViolation::NotTotal { symbol: sym, args }),
                    Some(img) => {
                        if img != compose_tables(&self.target, sym, &dst, len_b) {
                            bad = Some(LawViolation::Composition { symbol: sym, args });
                        }
                    }
                }
            });
            if let Some(v) = bad {
                return Err(v);
            }
        }
        Ok(())
    }
}

/// Positive membership answer: the natural map at the generator arity and
/// the onto evaluation map `F_A(n) → B`, `f ↦ φ(f)(b_1..b_n)`.
#[derive(Debug, Clone)]
pub struct Membership {
    pub generators: Vec<Elem>,
    pub hom: NaturalHom,
    /// Value of the evaluation map on each source member, aligned with
    /// `hom.source_tables()`.
    pub evaluation: Vec<Elem>,
}

#[derive(Debug, Clone)]
pub enum HspVerdict {
    Member(Membership),
    NotMember(Counterexample),
}

impl HspVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, HspVerdict::Member(_))
    }
}

/// Decides `B ∈ HSP(A)` using every element of `B` as a generator.
pub fn hsp_membership(a: &FiniteAlgebra, b: &FiniteAlgebra, caps: &Caps) -> Result<HspVerdict> {
    let gens: Vec<Elem> = b.elements().collect();
    hsp_membership_with(a, b, &gens, caps)
}

/// Decides `B ∈ HSP(A)` at the arity of `gens`, which must generate `B`.
pub fn hsp_membership_with(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    gens: &[Elem],
    caps: &Caps,
) -> Result<HspVerdict> {
    a.same_signature(b)?;
    if gens.is_empty() {
        return Err(Error::invalid("at least one generator is required"));
    }
    if generate_subalgebra(b, gens, caps)?.len() != b.size() {
        return Err(Error::invalid("the given elements do not generate B"));
    }
    let n = gens.len();
    let hom = match natural_hom(a, b, n, caps)? {
        NatHomOutcome::Counterexample(c) => return Ok(HspVerdict::NotMember(c)),
        NatHomOutcome::Hom(h) => h,
    };
    let at = tuple_index(gens, b.size());
    let evaluation: Vec<Elem> = hom.target_tables.iter().map(|t| t[at]).collect();
    let view = ProductView::power(a, hom.source_tables[0].len())?;
    check_map_on(&view, &hom.source_tables, b, |f| {
        hom.position(f).map(|i| evaluation[i])
    })
    .map_err(|v| Error::Internal(format!("evaluation map is not a homomorphism at symbol {}", v.symbol)))?;
    let mut hit = vec![false; b.size()];
    for &v in &evaluation {
        hit[v as usize] = true;
    }
    if !hit.into_iter().all(|h| h) {
        return Err(Error::Internal("evaluation map is not onto".into()));
    }
    Ok(HspVerdict::Member(Membership {
        generators: gens.to_vec(),
        hom,
        evaluation,
    }))
}

/// A basic entourage of a clone level: pairs of `n`-ary operations that
/// agree on every tuple of `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entourage {
    pub arity: usize,
    pub support: Vec<Vec<Elem>>,
}

impl Entourage {
    pub fn new(arity: usize, mut support: Vec<Vec<Elem>>, base: usize) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::invalid("entourage support must be nonempty"));
        }
        for t in &support {
            if t.len() != arity || t.iter().any(|&x| x as usize >= base) {
                return Err(Error::invalid(format!("support tuple {t:?} not in the {arity}-th power")));
            }
        }
        support.sort();
        support.dedup();
        Ok(Entourage { arity, support })
    }

    pub fn relates(&self, f: &[Elem], g: &[Elem], base: usize) -> bool {
        self.support.iter().all(|t| {
            let i = tuple_index(t, base);
            f[i] == g[i]
        })
    }
}

/// First pair of source members `(f, g)` (as indices) with `f|E = g|E` but
/// `φ(f)|F ≠ φ(g)|F`, if any.
pub fn uc_violation(phi: &NaturalHom, e: &[Vec<Elem>], f: &[Vec<Elem>]) -> Option<(usize, usize)> {
    let ka = phi.source.size();
    let kb = phi.target.size();
    let e_idx: Vec<usize> = e.iter().map(|t| tuple_index(t, ka)).collect();
    let f_idx: Vec<usize> = f.iter().map(|t| tuple_index(t, kb)).collect();
    let mut seen: HashMap<Vec<Elem>, (usize, Vec<Elem>)> = HashMap::new();
    for (i, (src, dst)) in phi.source_tables.iter().zip(&phi.target_tables).enumerate() {
        let key: Vec<Elem> = e_idx.iter().map(|&p| src[p]).collect();
        let val: Vec<Elem> = f_idx.iter().map(|&p| dst[p]).collect();
        match seen.get(&key) {
            Some((j, v)) if *v != val => return Some((*j, i)),
            Some(_) => {}
            None => {
                seen.insert(key, (i, val));
            }
        }
    }
    None
}

/// A finite `E ⊆ A^n` such that agreement on `E` forces the images to
/// agree on `alpha`'s support. Starts from the support itself when it is a
/// valid witness (the subalgebra case), else from all of `A^n`, then drops
/// tuples greedily in canonical order while the implication still holds.
/// The result is never empty.
pub fn uc_witness(phi: &NaturalHom, alpha: &Entourage) -> Result<Entourage> {
    let n = phi.arity;
    if alpha.arity != n {
        return Err(Error::invalid(format!(
            "entourage of arity {} for a level of arity {n}",
            alpha.arity
        )));
    }
    let ka = phi.source.size();
    let kb = phi.target.size();
    if alpha.support.iter().any(|t| t.iter().any(|&x| x as usize >= kb)) {
        return Err(Error::invalid("support outside the target power"));
    }
    let f = &alpha.support;
    let inside: Vec<Vec<Elem>> = f
        .iter()
        .filter(|t| t.iter().all(|&x| (x as usize) < ka))
        .cloned()
        .collect();
    let mut e = if !inside.is_empty() && uc_violation(phi, &inside, f).is_none() {
        inside
    } else {
        all_tuples(ka, n)
    };
    if uc_violation(phi, &e, f).is_some() {
        return Err(Error::Internal("full power is not a uniform-continuity witness".into()));
    }
    let mut i = 0;
    while i < e.len() && e.len() > 1 {
        let removed = e.remove(i);
        if uc_violation(phi, &e, f).is_some() {
            e.insert(i, removed);
            i += 1;
        }
    }
    Entourage::new(n, e, ka)
}
