//! Canonical actions on finite function spaces, orbit partitions, kernel
//! entourages and their quotients, and orbit-count probes.
//!
//! A truncation models `X^F` for a finite index list `F` (a finite piece of
//! some larger `Y`); `g` acts by `(g f)(y) = g(f(y))`. Points are numbered in
//! the global tuple order.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::algebra::Caps;
use crate::error::{Error, Result};
use crate::group::{Perm, PermGroup};
use crate::table::{checked_pow, index_tuple, tuple_index, Elem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpace {
    degree: usize,
    indices: Vec<String>,
}

impl FunctionSpace {
    /// Functions from the formal index list `indices` into `0..degree`.
    pub fn new(degree: usize, indices: Vec<String>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("empty base set"));
        }
        if indices.is_empty() {
            return Err(Error::invalid("empty index list"));
        }
        let mut sorted = indices.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(Error::invalid("repeated index in truncation"));
        }
        Ok(FunctionSpace { degree, indices })
    }

    /// `X^n` with indices `1..n`.
    pub fn power(degree: usize, n: usize) -> Result<Self> {
        FunctionSpace::new(degree, (1..=n).map(|i| i.to_string()).collect())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn indices(&self) -> &[String] {
        &self.indices
    }

    pub fn width(&self) -> usize {
        self.indices.len()
    }

    pub fn points(&self) -> Option<usize> {
        checked_pow(self.degree, self.indices.len())
    }

    pub fn decode(&self, p: usize) -> Vec<Elem> {
        index_tuple(p, self.degree, self.width())
    }

    pub fn encode(&self, f: &[Elem]) -> usize {
        tuple_index(f, self.degree)
    }

    pub fn act(&self, g: &Perm, p: usize) -> usize {
        let f: Vec<Elem> = self.decode(p).into_iter().map(|x| g.apply(x)).collect();
        self.encode(&f)
    }

    /// Each generator of `g` as a permutation of the points.
    pub fn point_perms(&self, g: &PermGroup, caps: &Caps) -> Result<Vec<Vec<u32>>> {
        if g.degree() != self.degree {
            return Err(Error::invalid(format!(
                "group of degree {} acting on a base of size {}",
                g.degree(),
                self.degree
            )));
        }
        let n = caps.check_points(self.points())?;
        Ok(g
            .generators()
            .iter()
            .map(|gen| (0..n).map(|p| self.act(gen, p) as u32).collect())
            .collect())
    }
}

/// A partition of `0..len` into blocks numbered by least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    orbit_of: Vec<u32>,
    representatives: Vec<usize>,
}

impl OrbitPartition {
    /// Renumbers arbitrary block labels so blocks are ordered by least point.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut ids: HashMap<usize, u32> = HashMap::new();
        let mut representatives = Vec::new();
        let orbit_of = labels
            .iter()
            .enumerate()
            .map(|(p, l)| {
                *ids.entry(*l).or_insert_with(|| {
                    representatives.push(p);
                    (representatives.len() - 1) as u32
                })
            })
            .collect();
        OrbitPartition {
            orbit_of,
            representatives,
        }
    }

    pub fn space_size(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn orbit_of(&self, p: usize) -> usize {
        self.orbit_of[p] as usize
    }

    pub fn orbit_ids(&self) -> &[u32] {
        &self.orbit_of
    }

    /// Least point of each orbit.
    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.len()];
        for (p, &o) in self.orbit_of.iter().enumerate() {
            out[o as usize].push(p);
        }
        out
    }
}

/// Orbits of the group generated by `perms` (permutations of `0..n`), by
/// breadth-first search from each unvisited point in ascending order.
pub fn orbits_of_perms(n: usize, perms: &[Vec<u32>]) -> OrbitPartition {
    const UNSEEN: u32 = u32::MAX;
    let mut orbit_of = vec![UNSEEN; n];
    let mut representatives = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if orbit_of[start] != UNSEEN {
            continue;
        }
        let id = representatives.len() as u32;
        representatives.push(start);
        orbit_of[start] = id;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for g in perms {
                let q = g[p] as usize;
                if orbit_of[q] == UNSEEN {
                    orbit_of[q] = id;
                    queue.push_back(q);
                }
            }
        }
    }
    OrbitPartition {
        orbit_of,
        representatives,
    }
}

/// Same partition as [`orbits_of_perms`], computed with union-find.
pub fn orbits_of_perms_union_find(n: usize, perms: &[Vec<u32>]) -> OrbitPartition {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in perms {
        for p in 0..n {
            let (a, b) = (root(&mut parent, p), root(&mut parent, g[p] as usize));
            // the smaller point stays root, so roots are least points
            match a.cmp(&b) {
                std::cmp::Ordering::Less => parent[b] = a,
                std::cmp::Ordering::Greater => parent[a] = b,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|p| root(&mut parent, p)).collect();
    OrbitPartition::from_labels(&labels)
}

pub fn orbits(g: &PermGroup, space: &FunctionSpace, caps: &Caps) -> Result<OrbitPartition> {
    let perms = space.point_perms(g, caps)?;
    Ok(orbits_of_perms(space.points().unwrap(), &perms))
}

pub fn orbits_union_find(g: &PermGroup, space: &FunctionSpace, caps: &Caps) -> Result<OrbitPartition> {
    let perms = space.point_perms(g, caps)?;
    Ok(orbits_of_perms_union_find(space.points().unwrap(), &perms))
}

/// Orbit counts of `X^n / G` for `n = 1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OligoProfile {
    pub counts: Vec<usize>,
}

pub fn oligo_profile(g: &PermGroup, k: usize, caps: &Caps) -> Result<OligoProfile> {
    let counts = (1..=k)
        .map(|n| Ok(orbits(g, &FunctionSpace::power(g.degree(), n)?, caps)?.len()))
        .collect::<Result<Vec<_>>>()?;
    Ok(OligoProfile { counts })
}

/// An entourage of a truncation: either the kernel of the projection onto
/// a set of index positions, or an explicit relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointEntourage {
    /// Pairs agreeing on every listed position.
    Kernel(Vec<usize>),
    Relation(BTreeSet<(usize, usize)>),
}

impl PointEntourage {
    pub fn kernel(space: &FunctionSpace, support: Vec<usize>) -> Result<Self> {
        if let Some(&s) = support.iter().find(|&&s| s >= space.width()) {
            return Err(Error::invalid(format!("position {s} outside the truncation")));
        }
        let mut support = support;
        support.sort_unstable();
        support.dedup();
        Ok(PointEntourage::Kernel(support))
    }

    pub fn diagonal(space: &FunctionSpace) -> Self {
        PointEntourage::Kernel((0..space.width()).collect())
    }

    pub fn full(_space: &FunctionSpace) -> Self {
        PointEntourage::Kernel(Vec::new())
    }

    fn key(space: &FunctionSpace, support: &[usize], p: usize) -> Vec<Elem> {
        let f = space.decode(p);
        support.iter().map(|&s| f[s]).collect()
    }

    pub fn contains(&self, space: &FunctionSpace, x: usize, y: usize) -> bool {
        match self {
            PointEntourage::Kernel(s) => Self::key(space, s, x) == Self::key(space, s, y),
            PointEntourage::Relation(r) => r.contains(&(x, y)),
        }
    }

    /// Every related pair, in ascending order.
    pub fn pairs(&self, space: &FunctionSpace, caps: &Caps) -> Result<Vec<(usize, usize)>> {
        match self {
            PointEntourage::Relation(r) => Ok(r.iter().copied().collect()),
            PointEntourage::Kernel(s) => {
                let n = caps.check_points(space.points())?;
                let mut classes: HashMap<Vec<Elem>, Vec<usize>> = HashMap::new();
                for p in 0..n {
                    classes.entry(Self::key(space, s, p)).or_default().push(p);
                }
                let total: usize = classes.values().map(|c| c.len() * c.len()).sum();
                caps.check_points(Some(total))?;
                let mut out = Vec::with_capacity(total);
                for p in 0..n {
                    for &q in &classes[&Self::key(space, s, p)] {
                        out.push((p, q));
                    }
                }
                Ok(out)
            }
        }
    }

    /// `B_α(x) = { y | (x, y) ∈ α }`, ascending.
    pub fn ball(&self, space: &FunctionSpace, x: usize) -> Vec<usize> {
        let n = space.points().unwrap_or(0);
        match self {
            PointEntourage::Kernel(s) => {
                let k = Self::key(space, s, x);
                (0..n).filter(|&y| Self::key(space, s, y) == k).collect()
            }
            PointEntourage::Relation(r) => r.range((x, 0)..=(x, usize::MAX)).map(|p| p.1).collect(),
        }
    }
}

/// First `(generator, x, y)` with `(x, y) ∈ α` but `(gx, gy) ∉ α`.
pub fn invariance_violation(
    g: &PermGroup,
    space: &FunctionSpace,
    alpha: &PointEntourage,
    caps: &Caps,
) -> Result<Option<(usize, usize, usize)>> {
    let perms = space.point_perms(g, caps)?;
    for (x, y) in alpha.pairs(space, caps)? {
        for (i, gp) in perms.iter().enumerate() {
            if !alpha.contains(space, gp[x] as usize, gp[y] as usize) {
                return Ok(Some((i, x, y)));
            }
        }
    }
    Ok(None)
}

pub fn invariance_check(g: &PermGroup, space: &FunctionSpace, alpha: &PointEntourage, caps: &Caps) -> Result<bool> {
    Ok(invariance_violation(g, space, alpha, caps)?.is_none())
}

/// `α/G = { (P, Q) | (P × Q) ∩ α ≠ ∅ }` on orbit ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientEntourage {
    pub orbits: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl QuotientEntourage {
    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.pairs.contains(&(p, q))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.orbits).all(|p| self.contains(p, p))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs.iter().all(|&(p, q)| self.contains(q, p))
    }
}

pub fn quotient_entourage(
    part: &OrbitPartition,
    space: &FunctionSpace,
    alpha: &PointEntourage,
    caps: &Caps,
) -> Result<QuotientEntourage> {
    if space.points() != Some(part.space_size()) {
        return Err(Error::invalid("partition and truncation differ in size"));
    }
    let pairs = match alpha {
        PointEntourage::Kernel(s) => {
            // orbits meeting a common fibre of pr_S are related
            let mut fibres: HashMap<Vec<Elem>, BTreeSet<usize>> = HashMap::new();
            for p in 0..part.space_size() {
                fibres
                    .entry(PointEntourage::key(space, s, p))
                    .or_default()
                    .insert(part.orbit_of(p));
            }
            let mut pairs = BTreeSet::new();
            for os in fibres.values() {
                for &a in os {
                    for &b in os {
                        pairs.insert((a, b));
                    }
                }
            }
            pairs
        }
        PointEntourage::Relation(_) => alpha
            .pairs(space, caps)?
            .into_iter()
            .map(|(x, y)| (part.orbit_of(x), part.orbit_of(y)))
            .collect(),
    };
    Ok(QuotientEntourage {
        orbits: part.len(),
        pairs,
    })
}

/// Outcome of the openness check at one sampled point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpennessFailure {
    pub point: usize,
    pub detail: String,
}

/// For each sampled `x` and `U = B_α(x)` checks
/// `π⁻¹(π(U)) = GU = B_α(Gx)`, with `GU` computed by closing `U` under the
/// generators, `π⁻¹(π(U))` from the partition and `B_α(Gx)` from the ball
/// around the orbit. `sample = None` checks every point.
pub fn pi_open_check(
    g: &PermGroup,
    space: &FunctionSpace,
    part: &OrbitPartition,
    alpha: &PointEntourage,
    sample: Option<&[usize]>,
    caps: &Caps,
) -> Result<std::result::Result<usize, OpennessFailure>> {
    let perms = space.point_perms(g, caps)?;
    let n = part.space_size();
    if space.points() != Some(n) {
        return Err(Error::invalid("partition and truncation differ in size"));
    }
    let blocks = part.blocks();
    let all: Vec<usize> = (0..n).collect();
    let sample = sample.unwrap_or(&all);
    for &x in sample {
        if x >= n {
            return Err(Error::invalid(format!("sample point {x} outside the space")));
        }
        let ball = alpha.ball(space, x);
        let mut gu: BTreeSet<usize> = ball.iter().copied().collect();
        let mut queue: Vec<usize> = ball.clone();
        while let Some(p) = queue.pop() {
            for gp in &perms {
                let q = gp[p] as usize;
                if gu.insert(q) {
                    queue.push(q);
                }
            }
        }
        let hit: BTreeSet<usize> = ball.iter().map(|&p| part.orbit_of(p)).collect();
        let saturation: BTreeSet<usize> = hit.iter().flat_map(|&o| blocks[o].iter().copied()).collect();
        let orbit_ball: BTreeSet<usize> = blocks[part.orbit_of(x)]
            .iter()
            .flat_map(|&z| alpha.ball(space, z))
            .collect();
        if gu != saturation {
            return Ok(Err(OpennessFailure {
                point: x,
                detail: "G·B(x) differs from the saturation of π(B(x))".into(),
            }));
        }
        if gu != orbit_ball {
            return Ok(Err(OpennessFailure {
                point: x,
                detail: "G·B(x) differs from B(Gx)".into(),
            }));
        }
    }
    Ok(Ok(sample.len()))
}

/// Classes of `x ~ y` iff `(Gx, Gy) ∈ α/G` for every `α` in `base`. The
/// intersection is closed transitively, so a base that is not closed under
/// composition still yields a partition. Blocks are numbered by least
/// point.
pub fn hausdorff_classes(
    part: &OrbitPartition,
    space: &FunctionSpace,
    base: &[PointEntourage],
    caps: &Caps,
) -> Result<OrbitPartition> {
    let m = part.len();
    let mut related: Option<BTreeSet<(usize, usize)>> = None;
    for alpha in base {
        let q = quotient_entourage(part, space, alpha, caps)?.pairs;
        related = Some(match related {
            None => q,
            Some(r) => r.intersection(&q).copied().collect(),
        });
    }
    let related = related.unwrap_or_else(|| (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect());
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in related {
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let labels: Vec<usize> = (0..part.space_size())
        .map(|p| root(&mut parent, part.orbit_of(p)))
        .collect();
    Ok(OrbitPartition::from_labels(&labels))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeLevel {
    pub depth: usize,
    pub points: usize,
    pub orbits: usize,
    /// Ratio to the previous level's orbit count.
    pub growth: Option<f64>,
}

/// Orbit counts of `X^F / G` along a schedule of truncation sizes. This is
/// evidence at the probed depths, not a compactness verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub levels: Vec<ProbeLevel>,
    /// First scheduled depth whose space exceeded the point cap.
    pub horizon: Option<usize>,
}

impl ProbeReport {
    pub fn label(&self) -> String {
        let depth = self.levels.last().map_or(0, |l| l.depth);
        match self.horizon {
            None => format!("evidence at depth {depth}: every probed level has finitely many orbits"),
            Some(h) => format!(
                "evidence at depth {depth}: every probed level has finitely many orbits; probe horizon reached at depth {h}"
            ),
        }
    }
}

pub fn precompactness_probe(g: &PermGroup, schedule: &[usize], caps: &Caps) -> Result<ProbeReport> {
    let mut levels: Vec<ProbeLevel> = Vec::new();
    let mut horizon = None;
    for &depth in schedule {
        let space = FunctionSpace::power(g.degree(), depth)?;
        let part = match orbits(g, &space, caps) {
            Ok(p) => p,
            Err(e) if e.is_cap() => {
                horizon = Some(depth);
                break;
            }
            Err(e) => return Err(e),
        };
        let growth = levels.last().map(|l| part.len() as f64 / l.orbits as f64);
        levels.push(ProbeLevel {
            depth,
            points: part.space_size(),
            orbits: part.len(),
            growth,
        });
    }
    Ok(ProbeReport { levels, horizon })
}
