//! Finite algebras and the finite P / S operators.

use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

use crate::closure::{close, Closure};
use crate::error::{Error, Result};
use crate::table::{checked_pow, for_each_tuple, tuple_index, Elem};
use crate::term::Signature;

/// Size limits. Exceeding any of them is reported, never truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Members of a clone level (or elements of any generated closure).
    pub clone_members: usize,
    /// Bytes of a single flat table.
    pub table_bytes: usize,
    /// Carrier size of materialized products and powers.
    pub product_size: usize,
    /// Points of a permutation-action space.
    pub points: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            clone_members: 1_000_000,
            table_bytes: 1 << 28,
            product_size: 4096,
            points: 1 << 22,
        }
    }
}

impl Caps {
    pub(crate) fn check_table_len(&self, len: usize) -> Result<()> {
        let bytes = (len as u128) * std::mem::size_of::<Elem>() as u128;
        if bytes > self.table_bytes as u128 {
            return Err(Error::CapExceeded {
                what: "table bytes",
                requested: bytes,
                limit: self.table_bytes as u128,
            });
        }
        Ok(())
    }

    pub(crate) fn check_product(&self, size: Option<usize>) -> Result<usize> {
        match size {
            Some(s) if s <= self.product_size => Ok(s),
            other => Err(Error::CapExceeded {
                what: "product size",
                requested: other.map_or(u128::MAX, |s| s as u128),
                limit: self.product_size as u128,
            }),
        }
    }

    pub(crate) fn check_points(&self, points: Option<usize>) -> Result<usize> {
        match points {
            Some(p) if p <= self.points => Ok(p),
            other => Err(Error::CapExceeded {
                what: "action space points",
                requested: other.map_or(u128::MAX, |s| s as u128),
                limit: self.points as u128,
            }),
        }
    }
}

/// Anything with a signature and a way to apply its operations. Lets the
/// closure engine run on materialized algebras and on powers or mixed
/// products whose carriers are never materialized.
pub trait Structure {
    type Elem: Clone + Eq + Hash + Ord + Debug;

    fn signature(&self) -> &Signature;

    fn apply(&self, symbol: usize, args: &[&Self::Elem]) -> Self::Elem;

    /// Number of elements of the carrier, if it fits in `usize`.
    fn carrier_size(&self) -> Option<usize> {
        None
    }
}

/// A finite algebra on the carrier `0..size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    sig: Arc<Signature>,
    size: usize,
    tables: Vec<Vec<Elem>>,
    label: Option<String>,
}

impl FiniteAlgebra {
    pub fn new(
        sig: impl Into<Arc<Signature>>,
        size: usize,
        tables: Vec<Vec<Elem>>,
        label: Option<String>,
    ) -> Result<Self> {
        let sig = sig.into();
        if size == 0 {
            return Err(Error::invalid("empty carrier"));
        }
        if size > Elem::MAX as usize {
            return Err(Error::invalid("carrier too large"));
        }
        if tables.len() != sig.len() {
            return Err(Error::invalid(format!(
                "{} tables for {} symbols",
                tables.len(),
                sig.len()
            )));
        }
        for (sym, table) in sig.symbols().iter().zip(&tables) {
            let expected = checked_pow(size, sym.arity)
                .ok_or_else(|| Error::invalid("operation table too large"))?;
            if table.len() != expected {
                return Err(Error::invalid(format!(
                    "table of `{}` has {} entries, expected {expected}",
                    sym.name,
                    table.len()
                )));
            }
            if let Some(v) = table.iter().find(|&&v| v as usize >= size) {
                return Err(Error::invalid(format!(
                    "table of `{}` contains {v}, outside 0..{size}",
                    sym.name
                )));
            }
        }
        Ok(FiniteAlgebra {
            sig,
            size,
            tables,
            label,
        })
    }

    /// Builds an algebra from closures computing each operation.
    pub fn from_fns(
        sig: Signature,
        size: usize,
        ops: Vec<Box<dyn Fn(&[Elem]) -> Elem + '_>>,
        label: Option<&str>,
    ) -> Result<Self> {
        let tables = sig
            .symbols()
            .iter()
            .zip(&ops)
            .map(|(sym, op)| {
                let mut table = Vec::new();
                for_each_tuple(size, sym.arity, |t| table.push(op(t)));
                table
            })
            .collect();
        FiniteAlgebra::new(sig, size, tables, label.map(str::to_string))
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> Arc<Signature> {
        self.sig.clone()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, symbol: usize) -> &[Elem] {
        &self.tables[symbol]
    }

    pub fn tables(&self) -> &[Vec<Elem>] {
        &self.tables
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    #[inline]
    pub fn apply(&self, symbol: usize, args: &[Elem]) -> Elem {
        self.tables[symbol][tuple_index(args, self.size)]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.size as Elem
    }

    pub(crate) fn same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch(format!(
                "{} vs {}",
                describe_sig(&self.sig),
                describe_sig(&other.sig)
            )));
        }
        Ok(())
    }

    /// Whether `subset` is closed under every operation (constants included).
    pub fn is_subuniverse(&self, subset: &[Elem]) -> bool {
        let mut member = vec![false; self.size];
        for &a in subset {
            match member.get_mut(a as usize) {
                Some(m) => *m = true,
                None => return false,
            }
        }
        let elems: Vec<Elem> = (0..self.size as Elem).filter(|&a| member[a as usize]).collect();
        self.sig.symbols().iter().enumerate().all(|(s, sym)| {
            let mut ok = true;
            for_each_tuple(elems.len(), sym.arity, |idx| {
                if ok {
                    let args: Vec<Elem> = idx.iter().map(|&i| elems[i as usize]).collect();
                    ok = member[self.apply(s, &args) as usize];
                }
            });
            ok
        })
    }

    /// The subalgebra on `subset`, relabelled so that the i-th smallest
    /// element of `subset` becomes `i`.
    pub fn restrict(&self, subset: &[Elem]) -> Result<FiniteAlgebra> {
        let mut elems = subset.to_vec();
        elems.sort_unstable();
        elems.dedup();
        if elems.is_empty() {
            return Err(Error::invalid("empty subset"));
        }
        if !self.is_subuniverse(&elems) {
            return Err(Error::invalid("subset is not closed under the operations"));
        }
        let mut relabel = vec![Elem::MAX; self.size];
        for (i, &a) in elems.iter().enumerate() {
            relabel[a as usize] = i as Elem;
        }
        let tables = self
            .sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(s, sym)| {
                let mut table = Vec::new();
                for_each_tuple(elems.len(), sym.arity, |idx| {
                    let args: Vec<Elem> = idx.iter().map(|&i| elems[i as usize]).collect();
                    table.push(relabel[self.apply(s, &args) as usize]);
                });
                table
            })
            .collect();
        FiniteAlgebra::new(self.sig.clone(), elems.len(), tables, None)
    }
}

fn describe_sig(sig: &Signature) -> String {
    let parts: Vec<String> = sig
        .symbols()
        .iter()
        .map(|s| format!("{}/{}", s.name, s.arity))
        .collect();
    format!("[{}]", parts.join(", "))
}

impl Structure for FiniteAlgebra {
    type Elem = Elem;

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn apply(&self, symbol: usize, args: &[&Elem]) -> Elem {
        let mut idx = 0usize;
        for &&a in args {
            idx = idx * self.size + a as usize;
        }
        self.tables[symbol][idx]
    }

    fn carrier_size(&self) -> Option<usize> {
        Some(self.size)
    }
}

/// A product `A_1 × .. × A_r` whose elements are tuples, operations
/// componentwise. The carrier is never materialized.
#[derive(Debug, Clone)]
pub struct ProductView<'a> {
    factors: Vec<&'a FiniteAlgebra>,
}

impl<'a> ProductView<'a> {
    pub fn new(factors: Vec<&'a FiniteAlgebra>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::invalid("product of no factors"))?;
        for f in &factors[1..] {
            first.same_signature(f)?;
        }
        Ok(ProductView { factors })
    }

    /// `A^s`.
    pub fn power(alg: &'a FiniteAlgebra, exponent: usize) -> Result<Self> {
        if exponent == 0 {
            return Err(Error::invalid("power with empty index set"));
        }
        Ok(ProductView {
            factors: vec![alg; exponent],
        })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[&'a FiniteAlgebra] {
        &self.factors
    }

    pub fn contains(&self, tuple: &[Elem]) -> bool {
        tuple.len() == self.factors.len()
            && tuple
                .iter()
                .zip(&self.factors)
                .all(|(&a, f)| (a as usize) < f.size())
    }
}

impl Structure for ProductView<'_> {
    type Elem = Vec<Elem>;

    fn signature(&self) -> &Signature {
        self.factors[0].signature()
    }

    fn apply(&self, symbol: usize, args: &[&Vec<Elem>]) -> Vec<Elem> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let mut idx = 0usize;
                for a in args {
                    idx = idx * f.size + a[i] as usize;
                }
                f.tables[symbol][idx]
            })
            .collect()
    }

    fn carrier_size(&self) -> Option<usize> {
        self.factors
            .iter()
            .try_fold(1usize, |acc, f| acc.checked_mul(f.size()))
    }
}

/// Materialized product, carrier indexed lexicographically (first factor
/// most significant).
pub fn product(algs: &[&FiniteAlgebra], caps: &Caps) -> Result<FiniteAlgebra> {
    let view = ProductView::new(algs.to_vec())?;
    let sizes: Vec<usize> = algs.iter().map(|a| a.size()).collect();
    let total = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s));
    let total = caps.check_product(total)?;
    let decode = |mut idx: usize| -> Vec<Elem> {
        let mut out = vec![0; sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&sizes).rev() {
            *slot = (idx % s) as Elem;
            idx /= s;
        }
        out
    };
    let encode = |t: &[Elem]| -> Elem {
        t.iter()
            .zip(&sizes)
            .fold(0usize, |acc, (&a, &s)| acc * s + a as usize) as Elem
    };
    let elems: Vec<Vec<Elem>> = (0..total).map(decode).collect();
    let sig = algs[0].signature_arc();
    let mut tables = Vec::with_capacity(sig.len());
    for (s, sym) in sig.symbols().iter().enumerate() {
        let len = checked_pow(total, sym.arity);
        let len = len.ok_or(Error::CapExceeded {
            what: "table bytes",
            requested: u128::MAX,
            limit: caps.table_bytes as u128,
        })?;
        caps.check_table_len(len)?;
        let mut table = Vec::with_capacity(len);
        for_each_tuple(total, sym.arity, |idx| {
            let args: Vec<&Vec<Elem>> = idx.iter().map(|&i| &elems[i as usize]).collect();
            table.push(encode(&view.apply(s, &args)));
        });
        tables.push(table);
    }
    FiniteAlgebra::new(sig, total, tables, None)
}

/// `alg^exponent`, materialized.
pub fn power(alg: &FiniteAlgebra, exponent: usize, caps: &Caps) -> Result<FiniteAlgebra> {
    if exponent == 0 {
        return Err(Error::invalid("power with empty index set"));
    }
    product(&vec![alg; exponent], caps)
}

/// Least subuniverse containing `gens` and every constant, ascending.
pub fn generate_subalgebra(alg: &FiniteAlgebra, gens: &[Elem], caps: &Caps) -> Result<Vec<Elem>> {
    if gens.is_empty() && !alg.signature().has_constants() {
        return Err(Error::invalid(
            "empty generating set over a signature without constants",
        ));
    }
    if let Some(g) = gens.iter().find(|&&g| g as usize >= alg.size()) {
        return Err(Error::invalid(format!("generator {g} outside carrier")));
    }
    let closure = close(alg, gens.iter().copied(), caps.clone_members);
    finish(closure, caps)
}

/// Subalgebra of a (non-materialized) product generated by tuples, ascending.
pub fn generate_in_product(
    view: &ProductView<'_>,
    gens: &[Vec<Elem>],
    caps: &Caps,
) -> Result<Vec<Vec<Elem>>> {
    if gens.is_empty() && !view.signature().has_constants() {
        return Err(Error::invalid(
            "empty generating set over a signature without constants",
        ));
    }
    if let Some(g) = gens.iter().find(|g| !view.contains(g)) {
        return Err(Error::invalid(format!("generator {g:?} outside the product")));
    }
    let closure = close(view, gens.iter().cloned(), caps.clone_members);
    finish(closure, caps)
}

fn finish<E: Clone + Ord + Hash + Eq>(closure: Closure<E>, caps: &Caps) -> Result<Vec<E>> {
    if !closure.complete {
        return Err(Error::CapExceeded {
            what: "generated subalgebra",
            requested: closure.elements.len() as u128 + 1,
            limit: caps.clone_members as u128,
        });
    }
    let mut out: Vec<E> = closure.elements.into_iter().collect();
    out.sort();
    Ok(out)
}
