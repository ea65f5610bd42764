//! Flat operation tables and the global argument-tuple order.
//!
//! Tuples over `{0..k-1}` of length `n` are numbered lexicographically with
//! the first coordinate most significant, so `(a_1, .., a_n)` sits at
//! `a_1 k^(n-1) + .. + a_n`. Every table in the crate uses this order.

use crate::error::{Error, Result};

/// Carrier element. Carriers are always `0..size`.
pub type Elem = u32;

/// `k^n` with overflow reported as `None`.
pub fn checked_pow(k: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(k)?;
    }
    Some(acc)
}

pub fn tuple_index(tuple: &[Elem], k: usize) -> usize {
    tuple.iter().fold(0usize, |acc, &a| acc * k + a as usize)
}

pub fn index_tuple(mut index: usize, k: usize, n: usize) -> Vec<Elem> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = (index % k) as Elem;
        index /= k;
    }
    out
}

/// Calls `f` on every tuple of `{0..k-1}^n` in the global order.
pub fn for_each_tuple(k: usize, n: usize, mut f: impl FnMut(&[Elem])) {
    if n == 0 {
        f(&[]);
        return;
    }
    if k == 0 {
        return;
    }
    let mut t = vec![0 as Elem; n];
    loop {
        f(&t);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if (t[i] as usize) < k {
                break;
            }
            t[i] = 0;
        }
    }
}

/// All tuples of `{0..k-1}^n`, in order.
pub fn all_tuples(k: usize, n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    for_each_tuple(k, n, |t| out.push(t.to_vec()));
    out
}

/// An `n`-ary operation on `{0..k-1}` as a flat table of length `k^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationTable {
    arity: usize,
    base: usize,
    data: Vec<Elem>,
}

impl OperationTable {
    pub fn new(arity: usize, base: usize, data: Vec<Elem>) -> Result<Self> {
        let expected = checked_pow(base, arity)
            .ok_or_else(|| Error::invalid("table length overflows"))?;
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "table of arity {arity} over {base} elements needs {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|&&v| v as usize >= base) {
            return Err(Error::invalid(format!("table entry {bad} out of range 0..{base}")));
        }
        Ok(OperationTable { arity, base, data })
    }

    pub(crate) fn from_raw(arity: usize, base: usize, data: Vec<Elem>) -> Self {
        debug_assert_eq!(Some(data.len()), checked_pow(base, arity));
        OperationTable { arity, base, data }
    }

    /// The `i`-th projection (0-based `i`).
    pub fn projection(arity: usize, base: usize, i: usize) -> Self {
        let len = checked_pow(base, arity).expect("projection table too large");
        let stride = checked_pow(base, arity - 1 - i).unwrap();
        let data = (0..len).map(|idx| ((idx / stride) % base) as Elem).collect();
        OperationTable { arity, base, data }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Elem> {
        self.data
    }

    pub fn eval(&self, args: &[Elem]) -> Elem {
        self.data[tuple_index(args, self.base)]
    }

    pub fn is_projection(&self, i: usize) -> bool {
        *self == OperationTable::projection(self.arity, self.base, i)
    }
}
