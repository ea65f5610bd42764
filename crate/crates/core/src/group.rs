//! Permutations and permutation groups given by generators.
//!
//! File format, one generator per line (`#` starts a comment):
//!
//! ```text
//! perm 4: 1 0 2 3
//! perm 4: 1 2 3 0
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::table::Elem;

/// A bijection of `0..degree`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<Elem>);

impl Perm {
    pub fn new(images: Vec<Elem>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            match seen.get_mut(i as usize) {
                Some(s) if !*s => *s = true,
                _ => return Err(Error::invalid(format!("{images:?} is not a permutation"))),
            }
        }
        Ok(Perm(images))
    }

    pub fn identity(degree: usize) -> Self {
        Perm((0..degree as Elem).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[Elem] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.0[x as usize]
    }

    /// `self` after `other`: `x ↦ self(other(x))`.
    pub fn after(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.apply(x)).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as Elem;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as Elem == x)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "perm {}:", self.degree())?;
        for x in &self.0 {
            write!(f, " {x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("permutation group on an empty set"));
        }
        if generators.is_empty() {
            return Err(Error::invalid("a group needs at least one generator"));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::invalid(format!(
                "generator of degree {} in a group of degree {degree}",
                g.degree()
            )));
        }
        Ok(PermGroup { degree, generators })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, vec![Perm::identity(degree)]).unwrap()
    }

    /// `Sym(degree)` from a transposition and a full cycle.
    pub fn symmetric(degree: usize) -> Self {
        if degree < 2 {
            return PermGroup::trivial(degree.max(1));
        }
        let mut swap: Vec<Elem> = (0..degree as Elem).collect();
        swap.swap(0, 1);
        let cycle = (0..degree as Elem).map(|i| (i + 1) % degree as Elem).collect();
        PermGroup::new(degree, vec![Perm(swap), Perm(cycle)]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// The group induced on an invariant subset, relabelled so the i-th
    /// smallest element of `subset` becomes `i`.
    pub fn restrict(&self, subset: &[Elem]) -> Result<PermGroup> {
        let mut elems = subset.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let mut relabel = vec![None; self.degree];
        for (i, &a) in elems.iter().enumerate() {
            *relabel
                .get_mut(a as usize)
                .ok_or_else(|| Error::invalid(format!("{a} outside the domain")))? = Some(i as Elem);
        }
        let gens = self
            .generators
            .iter()
            .map(|g| {
                elems
                    .iter()
                    .map(|&a| relabel[g.apply(a) as usize])
                    .collect::<Option<Vec<Elem>>>()
                    .map(Perm)
                    .ok_or_else(|| Error::invalid("subset is not invariant"))
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(elems.len(), gens)
    }
}

pub fn parse_perm(line: &str) -> std::result::Result<Perm, String> {
    let rest = line
        .trim()
        .strip_prefix("perm")
        .ok_or("expected `perm <degree>: ...`")?;
    let (deg, images) = rest.split_once(':').ok_or("missing `:` after degree")?;
    let degree: usize = deg
        .trim()
        .parse()
        .map_err(|_| format!("bad degree `{}`", deg.trim()))?;
    let images: Vec<Elem> = images
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| format!("bad image `{w}`")))
        .collect::<std::result::Result<_, String>>()?;
    if images.len() != degree {
        return Err(format!("degree {degree} but {} images", images.len()));
    }
    Perm::new(images).map_err(|e| e.to_string())
}

pub fn parse_group(src: &str) -> Result<PermGroup> {
    let mut gens = Vec::new();
    let mut degree = None;
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let column = raw.find(line).unwrap_or(0) + 1;
        let p = parse_perm(line).map_err(|msg| Error::Parse {
            line: i + 1,
            column,
            msg,
        })?;
        if *degree.get_or_insert(p.degree()) != p.degree() {
            return Err(Error::Parse {
                line: i + 1,
                column,
                msg: "generators of different degrees".into(),
            });
        }
        gens.push(p);
    }
    let degree = degree.ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        msg: "no generators".into(),
    })?;
    PermGroup::new(degree, gens)
}

pub fn write_group(g: &PermGroup) -> String {
    g.generators().iter().map(|p| format!("{p}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        assert!(Perm::new(vec![0, 0]).is_err());
        assert!(Perm::new(vec![0, 2]).is_err());
        let p = Perm::new(vec![1, 2, 0]).unwrap();
        assert!(p.after(&p.inverse()).is_identity());
        assert_eq!(p.after(&p).images(), &[2, 0, 1]);
    }

    #[test]
    fn group_file_round_trip() {
        let g = PermGroup::symmetric(4);
        let text = write_group(&g);
        assert_eq!(text, "perm 4: 1 0 2 3\nperm 4: 1 2 3 0\n");
        assert_eq!(parse_group(&text).unwrap(), g);
        assert_eq!(
            parse_group("# id\n\nperm 3: 0 1 2  # trailing\n").unwrap(),
            PermGroup::trivial(3)
        );
    }

    #[test]
    fn group_file_errors() {
        assert!(matches!(
            parse_group("perm 3: 0 1 2\nperm 2: 1 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_group("perm 3: 0 1 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_group("  \n# nothing\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_group("  perm 2 1 0\n"),
            Err(Error::Parse { line: 1, column: 3, .. })
        ));
    }

    #[test]
    fn restriction_to_invariant_subsets() {
        let g = PermGroup::new(4, vec![Perm::new(vec![0, 3, 2, 1]).unwrap()]).unwrap();
        let r = g.restrict(&[1, 3]).unwrap();
        assert_eq!(r.generators()[0].images(), &[1, 0]);
        assert!(g.restrict(&[0, 1]).is_err());
    }
}
