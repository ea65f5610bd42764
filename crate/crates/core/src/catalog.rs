//! Small named algebras used in tests, docs and the CLI examples.

use crate::algebra::FiniteAlgebra;
use crate::table::Elem;
use crate::term::Signature;

/// `({0,1}, join)`.
pub fn join_semilattice() -> FiniteAlgebra {
    let sig = Signature::new([("join", 2)]).unwrap();
    FiniteAlgebra::new(sig, 2, vec![vec![0, 1, 1, 1]], Some("semilattice".into())).unwrap()
}

/// `Z_n` with addition only.
pub fn cyclic_group(n: usize) -> FiniteAlgebra {
    let sig = Signature::new([("add", 2)]).unwrap();
    FiniteAlgebra::from_fns(
        sig,
        n,
        vec![Box::new(move |a: &[Elem]| (a[0] + a[1]) % n as Elem)],
        Some(&format!("Z{n}")),
    )
    .unwrap()
}

/// The `n`-element chain as a lattice `(join, meet)`.
pub fn chain_lattice(n: usize) -> FiniteAlgebra {
    let sig = Signature::new([("join", 2), ("meet", 2)]).unwrap();
    FiniteAlgebra::from_fns(
        sig,
        n,
        vec![
            Box::new(|a: &[Elem]| a[0].max(a[1])),
            Box::new(|a: &[Elem]| a[0].min(a[1])),
        ],
        Some(&format!("chain{n}")),
    )
    .unwrap()
}

/// A bare set: no operations at all.
pub fn bare_set(n: usize) -> FiniteAlgebra {
    FiniteAlgebra::new(Signature::empty(), n, vec![], Some(format!("set{n}"))).unwrap()
}

/// The one-element algebra over `sig`.
pub fn trivial(sig: &Signature) -> FiniteAlgebra {
    let tables = sig.symbols().iter().map(|_| vec![0]).collect();
    FiniteAlgebra::new(sig.clone(), 1, tables, Some("trivial".into())).unwrap()
}
