//! Homomorphism checking and search, and colimits of finite chains.

use crate::algebra::{FiniteAlgebra, Structure};
use crate::error::{Error, Result};
use crate::table::{for_each_tuple, Elem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism<'a> {
    source: &'a FiniteAlgebra,
    target: &'a FiniteAlgebra,
    map: Vec<Elem>,
}

/// A symbol and argument tuple on which a map fails to commute with the
/// operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<E> {
    pub symbol: usize,
    pub args: Vec<E>,
}

impl<'a> Homomorphism<'a> {
    /// A candidate map; totality and ranges are checked here, the
    /// homomorphism law by [`check_homomorphism`].
    pub fn new(source: &'a FiniteAlgebra, target: &'a FiniteAlgebra, map: Vec<Elem>) -> Result<Self> {
        source.same_signature(target)?;
        if map.len() != source.size() {
            return Err(Error::invalid(format!(
                "map has {} entries for a source of size {}",
                map.len(),
                source.size()
            )));
        }
        if let Some(v) = map.iter().find(|&&v| v as usize >= target.size()) {
            return Err(Error::invalid(format!("image {v} outside target carrier")));
        }
        Ok(Homomorphism { source, target, map })
    }

    pub fn source(&self) -> &'a FiniteAlgebra {
        self.source
    }

    pub fn target(&self) -> &'a FiniteAlgebra {
        self.target
    }

    pub fn map(&self) -> &[Elem] {
        &self.map
    }

    pub fn image(&self, a: Elem) -> Elem {
        self.map[a as usize]
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size()];
        for &v in &self.map {
            hit[v as usize] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `other ∘ self`.
    pub fn then<'b>(&self, other: &Homomorphism<'b>) -> Result<Homomorphism<'b>>
    where
        'a: 'b,
    {
        if self.target != other.source {
            return Err(Error::invalid("composition of non-matching maps"));
        }
        let map = self.map.iter().map(|&a| other.image(a)).collect();
        Homomorphism::new(self.source, other.target, map)
    }
}

/// Exhaustive check of the homomorphism law; returns the first failure in
/// symbol order, then tuple order.
pub fn check_homomorphism(h: &Homomorphism<'_>) -> std::result::Result<(), Violation<Elem>> {
    let carrier: Vec<Elem> = h.source.elements().collect();
    check_map_on(h.source, &carrier, h.target, |a| Some(h.image(*a)))
}

/// Checks that `map` commutes with the operations on `carrier`, a
/// subuniverse of `source`. Tuples whose image under an operation leaves
/// the domain of `map` are reported as violations too.
pub fn check_map_on<S: Structure>(
    source: &S,
    carrier: &[S::Elem],
    target: &FiniteAlgebra,
    map: impl Fn(&S::Elem) -> Option<Elem>,
) -> std::result::Result<(), Violation<S::Elem>> {
    let sig = source.signature();
    let images: Vec<Option<Elem>> = carrier.iter().map(&map).collect();
    for sym in 0..sig.len() {
        let m = sig.arity(sym);
        let mut failure = None;
        for_each_tuple(carrier.len(), m, |idx| {
            if failure.is_some() {
                return;
            }
            let args: Vec<&S::Elem> = idx.iter().map(|&i| &carrier[i as usize]).collect();
            let lhs = map(&source.apply(sym, &args));
            let imgs: Option<Vec<Elem>> = idx.iter().map(|&i| images[i as usize]).collect();
            let ok = match (lhs, imgs) {
                (Some(l), Some(imgs)) => l == target.apply(sym, &imgs),
                _ => false,
            };
            if !ok {
                failure = Some(Violation {
                    symbol: sym,
                    args: args.into_iter().cloned().collect(),
                });
            }
        });
        if let Some(v) = failure {
            return Err(v);
        }
    }
    Ok(())
}

/// Backtracking search for a surjective homomorphism `src → dst` extending
/// `pins` (pairs `(a, b)` meaning `a ↦ b`). Source elements are assigned
/// pins first, then in ascending order; values are tried in ascending
/// order; every operation tuple whose arguments are all assigned forces
/// (or refutes) the value at its result.
pub fn find_surjective_homomorphism<'a>(
    src: &'a FiniteAlgebra,
    dst: &'a FiniteAlgebra,
    pins: &[(Elem, Elem)],
) -> Result<Option<Homomorphism<'a>>> {
    src.same_signature(dst)?;
    let mut search = Search::new(src, dst);
    for &(a, b) in pins {
        if a as usize >= src.size() || b as usize >= dst.size() {
            return Err(Error::invalid(format!("pin {a} -> {b} out of range")));
        }
        if !search.assign(a, b) {
            return Ok(None);
        }
    }
    let mut order: Vec<Elem> = pins.iter().map(|p| p.0).collect();
    order.extend(src.elements().filter(|a| !pins.iter().any(|p| p.0 == *a)));
    order.dedup();
    if search.solve(&order, 0) {
        let map = search.map.iter().map(|v| v.unwrap()).collect();
        return Ok(Some(Homomorphism::new(src, dst, map)?));
    }
    Ok(None)
}

struct Search<'a> {
    src: &'a FiniteAlgebra,
    dst: &'a FiniteAlgebra,
    map: Vec<Option<Elem>>,
    trail: Vec<Elem>,
}

impl<'a> Search<'a> {
    fn new(src: &'a FiniteAlgebra, dst: &'a FiniteAlgebra) -> Self {
        Search {
            src,
            dst,
            map: vec![None; src.size()],
            trail: Vec::new(),
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let a = self.trail.pop().unwrap();
            self.map[a as usize] = None;
        }
    }

    /// Sets `a ↦ b` and propagates forced values. Returns false on conflict
    /// (the trail still records what was set, so callers undo).
    fn assign(&mut self, a: Elem, b: Elem) -> bool {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            match self.map[a as usize] {
                Some(v) if v == b => continue,
                Some(_) => return false,
                None => {
                    self.map[a as usize] = Some(b);
                    self.trail.push(a);
                }
            }
            if !self.propagate(a, &mut queue) {
                return false;
            }
        }
        true
    }

    /// Scans operation tuples that involve `a` and have all arguments mapped.
    fn propagate(&self, a: Elem, queue: &mut Vec<(Elem, Elem)>) -> bool {
        let sig = self.src.signature();
        let assigned: Vec<Elem> = self
            .src
            .elements()
            .filter(|&x| self.map[x as usize].is_some())
            .collect();
        for sym in 0..sig.len() {
            let m = sig.arity(sym);
            if m == 0 {
                let r = self.src.apply(sym, &[]);
                let v = self.dst.apply(sym, &[]);
                if !self.push_forced(r, v, queue) {
                    return false;
                }
                continue;
            }
            let mut ok = true;
            for_each_tuple(assigned.len(), m, |idx| {
                if !ok {
                    return;
                }
                let args: Vec<Elem> = idx.iter().map(|&i| assigned[i as usize]).collect();
                if !args.contains(&a) {
                    return;
                }
                let imgs: Vec<Elem> = args.iter().map(|&x| self.map[x as usize].unwrap()).collect();
                let r = self.src.apply(sym, &args);
                let v = self.dst.apply(sym, &imgs);
                ok = self.push_forced(r, v, queue);
            });
            if !ok {
                return false;
            }
        }
        true
    }

    fn push_forced(&self, r: Elem, v: Elem, queue: &mut Vec<(Elem, Elem)>) -> bool {
        match self.map[r as usize] {
            Some(w) => w == v,
            None => {
                queue.push((r, v));
                true
            }
        }
    }

    fn covered(&self) -> usize {
        let mut hit = vec![false; self.dst.size()];
        for v in self.map.iter().flatten() {
            hit[*v as usize] = true;
        }
        hit.into_iter().filter(|&h| h).count()
    }

    fn solve(&mut self, order: &[Elem], pos: usize) -> bool {
        let unassigned = self.map.iter().filter(|v| v.is_none()).count();
        if self.covered() + unassigned < self.dst.size() {
            return false;
        }
        let Some(next) = order[pos..].iter().position(|&a| self.map[a as usize].is_none()) else {
            return self.covered() == self.dst.size();
        };
        let a = order[pos + next];
        for b in self.dst.elements() {
            let mark = self.trail.len();
            if self.assign(a, b) && self.solve(order, pos + next + 1) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// An ascending chain of subuniverses of one ambient algebra.
#[derive(Debug, Clone)]
pub struct SubalgebraChain<'a> {
    ambient: &'a FiniteAlgebra,
    levels: Vec<Vec<Elem>>,
}

impl<'a> SubalgebraChain<'a> {
    pub fn new(ambient: &'a FiniteAlgebra, levels: Vec<Vec<Elem>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("empty chain"));
        }
        let mut normalized = Vec::with_capacity(levels.len());
        for (i, mut level) in levels.into_iter().enumerate() {
            level.sort_unstable();
            level.dedup();
            if level.is_empty() {
                return Err(Error::invalid(format!("level {i} is empty")));
            }
            if !ambient.is_subuniverse(&level) {
                return Err(Error::invalid(format!(
                    "level {i} is not closed under the operations"
                )));
            }
            if let Some(prev) = normalized.last() {
                let prev: &Vec<Elem> = prev;
                if !prev.iter().all(|a| level.binary_search(a).is_ok()) {
                    return Err(Error::invalid(format!(
                        "level {i} does not contain level {}",
                        i - 1
                    )));
                }
            }
            normalized.push(level);
        }
        Ok(SubalgebraChain {
            ambient,
            levels: normalized,
        })
    }

    pub fn ambient(&self) -> &'a FiniteAlgebra {
        self.ambient
    }

    pub fn levels(&self) -> &[Vec<Elem>] {
        &self.levels
    }
}

#[derive(Debug, Clone)]
pub struct Colimit {
    pub algebra: FiniteAlgebra,
    /// Ambient name of each colimit element (colimit element `i` is
    /// `elements[i]` in the ambient algebra).
    pub elements: Vec<Elem>,
    /// Index of the chain level where each element first appears.
    pub first_level: Vec<usize>,
}

/// Colimit of a finite chain: the union, which is the top level, with the
/// restricted operations.
pub fn colimit_of_chain(chain: &SubalgebraChain<'_>) -> Result<Colimit> {
    let top = chain.levels.last().unwrap();
    let algebra = chain.ambient.restrict(top)?;
    let first_level = top
        .iter()
        .map(|a| {
            chain
                .levels
                .iter()
                .position(|l| l.binary_search(a).is_ok())
                .unwrap()
        })
        .collect();
    Ok(Colimit {
        algebra,
        elements: top.clone(),
        first_level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::term::Signature;

    fn all_maps(src: usize, dst: usize) -> Vec<Vec<Elem>> {
        crate::table::all_tuples(dst, src)
    }

    #[test]
    fn identity_and_mod_maps() {
        let z4 = catalog::cyclic_group(4);
        let z2 = catalog::cyclic_group(2);
        let id = Homomorphism::new(&z4, &z4, vec![0, 1, 2, 3]).unwrap();
        assert!(check_homomorphism(&id).is_ok());
        let modp = Homomorphism::new(&z4, &z2, vec![0, 1, 0, 1]).unwrap();
        assert!(check_homomorphism(&modp).is_ok());
        let halves = Homomorphism::new(&z4, &z2, vec![0, 0, 1, 1]).unwrap();
        let v = check_homomorphism(&halves).unwrap_err();
        assert_eq!(v.symbol, 0);
        assert_eq!(v.args, vec![1, 1]);
    }

    #[test]
    fn constructor_rejects_bad_maps() {
        let z4 = catalog::cyclic_group(4);
        let z2 = catalog::cyclic_group(2);
        let sl = catalog::join_semilattice();
        assert!(Homomorphism::new(&z4, &z2, vec![0, 1]).is_err());
        assert!(Homomorphism::new(&z4, &z2, vec![0, 1, 2, 0]).is_err());
        assert!(Homomorphism::new(&z2, &sl, vec![0, 1]).is_err());
    }

    #[test]
    fn composition_preserves_homomorphisms() {
        let z8 = catalog::cyclic_group(8);
        let z4 = catalog::cyclic_group(4);
        let z2 = catalog::cyclic_group(2);
        let f = Homomorphism::new(&z8, &z4, (0..8).map(|x| x % 4).collect()).unwrap();
        let g = Homomorphism::new(&z4, &z2, (0..4).map(|x| x % 2).collect()).unwrap();
        let h = f.then(&g).unwrap();
        assert!(check_homomorphism(&h).is_ok());
        assert!(g.then(&f).is_err());
    }

    #[test]
    fn search_examples() {
        let z4 = catalog::cyclic_group(4);
        let z3 = catalog::cyclic_group(3);
        let z2 = catalog::cyclic_group(2);
        let one = catalog::trivial(z4.signature());
        let h = find_surjective_homomorphism(&z4, &one, &[]).unwrap().unwrap();
        assert_eq!(h.map(), &[0, 0, 0, 0]);
        let h = find_surjective_homomorphism(&z4, &z2, &[]).unwrap().unwrap();
        assert!(check_homomorphism(&h).is_ok());
        assert!(h.is_surjective());
        assert!(find_surjective_homomorphism(&z3, &z2, &[]).unwrap().is_none());
        let brute = all_maps(3, 2).into_iter().any(|m| {
            let h = Homomorphism::new(&z3, &z2, m).unwrap();
            h.is_surjective() && check_homomorphism(&h).is_ok()
        });
        assert!(!brute);
        let h = find_surjective_homomorphism(&z4, &z2, &[(1, 1)]).unwrap().unwrap();
        assert_eq!(h.image(1), 1);
        assert!(find_surjective_homomorphism(&z4, &z2, &[(1, 0)]).unwrap().is_none());
    }

    #[test]
    fn search_agrees_with_enumeration_on_lattices() {
        let sig = Signature::new([("join", 2), ("meet", 2)]).unwrap();
        let c3 = catalog::chain_lattice(3);
        let c2 = catalog::chain_lattice(2);
        let m2 = crate::algebra::product(&[&c2, &c2], &Default::default()).unwrap();
        assert_eq!(m2.signature(), &sig);
        for (src, dst) in [(&c3, &c2), (&m2, &c3), (&m2, &c2), (&c2, &c3)] {
            let found = find_surjective_homomorphism(src, dst, &[]).unwrap();
            let brute = all_maps(src.size(), dst.size()).into_iter().find(|m| {
                let h = Homomorphism::new(src, dst, m.clone()).unwrap();
                h.is_surjective() && check_homomorphism(&h).is_ok()
            });
            assert_eq!(found.is_some(), brute.is_some());
            if let Some(h) = found {
                assert!(check_homomorphism(&h).is_ok());
                assert!(h.is_surjective());
            }
        }
    }

    #[test]
    fn chains_and_colimits() {
        let z4 = catalog::cyclic_group(4);
        let chain = SubalgebraChain::new(&z4, vec![vec![0], vec![0, 2], vec![0, 1, 2, 3]]).unwrap();
        let c = colimit_of_chain(&chain).unwrap();
        assert_eq!(c.algebra.tables(), z4.tables());
        assert_eq!(c.algebra.size(), 4);
        assert_eq!(c.first_level, vec![0, 2, 1, 2]);

        let single = SubalgebraChain::new(&z4, vec![vec![2, 0]]).unwrap();
        let c = colimit_of_chain(&single).unwrap();
        assert_eq!(c.algebra.size(), 2);
        assert_eq!(c.elements, vec![0, 2]);

        assert!(SubalgebraChain::new(&z4, vec![vec![1]]).is_err());
        assert!(SubalgebraChain::new(&z4, vec![vec![0, 2], vec![0]]).is_err());
        assert!(SubalgebraChain::new(&z4, vec![]).is_err());
    }
}
