//! The group of invertible unary term operations and the orbit diagnostics
//! built on it.
//!
//! For a finite carrier every count here is finite; reports carry counts
//! and their growth, and the pointwise closure of each clone level is the
//! level itself.

use std::collections::{BTreeSet, HashMap};

use crate::action::{oligo_profile, orbits_of_perms, OligoProfile, OrbitPartition};
use crate::algebra::{generate_in_product, generate_subalgebra, Caps, FiniteAlgebra, ProductView};
use crate::clone::{clone_generate, CloneLevel};
use crate::error::{Error, Result};
use crate::group::{Perm, PermGroup};
use crate::table::{tuple_index, Elem, OperationTable};

fn complete_level(alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Result<CloneLevel> {
    let level = clone_generate(alg, n, caps)?;
    if !level.complete() {
        return Err(Error::CapExceeded {
            what: "clone members",
            requested: level.len() as u128 + 1,
            limit: caps.clone_members as u128,
        });
    }
    Ok(level)
}

/// Invertible members of `Clo_1(A)` whose inverse is also a member.
#[derive(Debug, Clone)]
pub struct UnaryGroup {
    /// Sorted by table; always contains the identity.
    pub elements: Vec<OperationTable>,
    pub group: PermGroup,
    /// Size of `Clo_1(A)`.
    pub unary_clone_size: usize,
}

impl UnaryGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn perms(&self) -> Vec<Perm> {
        self.group.generators().to_vec()
    }

    /// First failure of closure, inverses or identity on the element set.
    pub fn axiom_violation(&self) -> Option<String> {
        let set: BTreeSet<&[Elem]> = self.elements.iter().map(|t| t.data()).collect();
        let k = self.group.degree();
        let id: Vec<Elem> = (0..k as Elem).collect();
        if !set.contains(&id[..]) {
            return Some("identity missing".into());
        }
        for p in self.group.generators() {
            if !set.contains(p.inverse().images()) {
                return Some(format!("inverse of {p} missing"));
            }
            for q in self.group.generators() {
                if !set.contains(p.after(q).images()) {
                    return Some(format!("product of {p} and {q} missing"));
                }
            }
        }
        None
    }
}

pub fn unary_group(alg: &FiniteAlgebra, caps: &Caps) -> Result<UnaryGroup> {
    let level = clone_generate(alg, 1, caps)?;
    if !level.complete() {
        return Err(Error::IncompleteLevel { arity: 1 });
    }
    let mut elements = Vec::new();
    let mut perms = Vec::new();
    for t in level.members() {
        if let Ok(p) = Perm::new(t.data().to_vec()) {
            if level.contains(p.inverse().images()) {
                elements.push(t.clone());
                perms.push(p);
            }
        }
    }
    Ok(UnaryGroup {
        elements,
        group: PermGroup::new(alg.size(), perms)?,
        unary_clone_size: level.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalSample {
    pub generators: Vec<Elem>,
    pub clone_size: usize,
    /// `{ f(a) | f ∈ Clo_n(A) }`, ascending.
    pub clone_image: Vec<Elem>,
    /// `⟨a⟩_A`, ascending.
    pub subalgebra: Vec<Elem>,
}

impl LocalSample {
    pub fn agrees(&self) -> bool {
        self.clone_image == self.subalgebra
    }
}

/// Evaluates `Clo_n(A)` at each sample `a` of length `n` and compares the
/// image with the subalgebra generated by `a`.
pub fn locally_finite_check(alg: &FiniteAlgebra, samples: &[Vec<Elem>], caps: &Caps) -> Result<Vec<LocalSample>> {
    let mut levels: HashMap<usize, CloneLevel> = HashMap::new();
    let mut out = Vec::with_capacity(samples.len());
    for a in samples {
        if a.is_empty() {
            return Err(Error::invalid("a sample needs at least one generator"));
        }
        if let Some(x) = a.iter().find(|&&x| x as usize >= alg.size()) {
            return Err(Error::invalid(format!("generator {x} outside carrier")));
        }
        let n = a.len();
        if let std::collections::hash_map::Entry::Vacant(e) = levels.entry(n) {
            e.insert(complete_level(alg, n, caps)?);
        }
        let level = &levels[&n];
        let at = tuple_index(a, alg.size());
        let image: BTreeSet<Elem> = level.members().iter().map(|f| f.data()[at]).collect();
        out.push(LocalSample {
            generators: a.clone(),
            clone_size: level.len(),
            clone_image: image.into_iter().collect(),
            subalgebra: generate_subalgebra(alg, a, caps)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArityOrbits {
    pub arity: usize,
    pub clone_size: usize,
    pub orbits: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FgOrbits {
    pub power: usize,
    pub generators: Vec<Vec<Elem>>,
    /// `⟨gens⟩ ≤ A^n`, ascending.
    pub subalgebra: Vec<Vec<Elem>>,
    pub partition: OrbitPartition,
    /// Whether `p(Clo_m(A))` equalled the generated subalgebra.
    pub bridge_holds: bool,
}

impl FgOrbits {
    pub fn orbit_count(&self) -> usize {
        self.partition.len()
    }

    pub fn representatives(&self) -> Vec<&[Elem]> {
        self.partition
            .representatives()
            .iter()
            .map(|&i| &self.subalgebra[i][..])
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct AlfReport {
    pub group: UnaryGroup,
    pub arities: Vec<ArityOrbits>,
    pub subalgebras: Vec<FgOrbits>,
}

/// Orbits of `𝒢` acting on `Clo_n(A)` by `g·f = g∘f`. Fails if some `g∘f`
/// is not a member.
pub fn clone_orbits(group: &UnaryGroup, level: &CloneLevel) -> Result<OrbitPartition> {
    let perms = group
        .group
        .generators()
        .iter()
        .map(|g| {
            level
                .members()
                .iter()
                .map(|f| {
                    let gf: Vec<Elem> = f.data().iter().map(|&x| g.apply(x)).collect();
                    level
                        .position(&gf)
                        .map(|i| i as u32)
                        .ok_or_else(|| Error::Internal(format!("{g} composed with a member left the clone")))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(orbits_of_perms(level.len(), &perms))
}

/// Orbit counts on `Clo_n(A)` for `n = 1..=k`, plus `fg_power_orbit_check`
/// on the first `sample_limit` one-generator subalgebras of `A^n` in
/// canonical order for each `n ≤ k`.
pub fn alf_orbit_counts(alg: &FiniteAlgebra, k: usize, sample_limit: usize, caps: &Caps) -> Result<AlfReport> {
    let group = unary_group(alg, caps)?;
    let mut arities = Vec::with_capacity(k);
    let mut subalgebras = Vec::new();
    for n in 1..=k {
        let level = complete_level(alg, n, caps)?;
        arities.push(ArityOrbits {
            arity: n,
            clone_size: level.len(),
            orbits: clone_orbits(&group, &level)?.len(),
        });
        let total = crate::table::checked_pow(alg.size(), n).unwrap_or(usize::MAX);
        for i in 0..total.min(sample_limit) {
            let gen = crate::table::index_tuple(i, alg.size(), n);
            subalgebras.push(fg_orbits_with(alg, &group, n, &[gen], caps)?);
        }
    }
    Ok(AlfReport {
        group,
        arities,
        subalgebras,
    })
}

/// `|⟨gens⟩ / 𝒢|` for `gens ⊆ A^n`, with the bridging map
/// `p(f)(j) = f(a_1(j), …, a_m(j))` compared against the closure.
pub fn fg_power_orbit_check(alg: &FiniteAlgebra, n: usize, gens: &[Vec<Elem>], caps: &Caps) -> Result<FgOrbits> {
    let group = unary_group(alg, caps)?;
    fg_orbits_with(alg, &group, n, gens, caps)
}

fn fg_orbits_with(
    alg: &FiniteAlgebra,
    group: &UnaryGroup,
    n: usize,
    gens: &[Vec<Elem>],
    caps: &Caps,
) -> Result<FgOrbits> {
    if gens.is_empty() {
        return Err(Error::invalid("at least one generator is required"));
    }
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::invalid(format!("generator {g:?} is not in A^{n}")));
    }
    let view = ProductView::power(alg, n)?;
    let subalgebra = generate_in_product(&view, gens, caps)?;

    let m = gens.len();
    let level = complete_level(alg, m, caps)?;
    let k = alg.size();
    let columns: Vec<usize> = (0..n)
        .map(|j| tuple_index(&gens.iter().map(|g| g[j]).collect::<Vec<_>>(), k))
        .collect();
    let bridged: BTreeSet<Vec<Elem>> = level
        .members()
        .iter()
        .map(|f| columns.iter().map(|&c| f.data()[c]).collect())
        .collect();
    let bridge_holds = bridged.len() == subalgebra.len() && bridged.iter().eq(subalgebra.iter());

    let position: HashMap<&[Elem], u32> = subalgebra
        .iter()
        .enumerate()
        .map(|(i, t)| (&t[..], i as u32))
        .collect();
    let perms = group
        .group
        .generators()
        .iter()
        .map(|g| {
            subalgebra
                .iter()
                .map(|t| {
                    let gt: Vec<Elem> = t.iter().map(|&x| g.apply(x)).collect();
                    position
                        .get(&gt[..])
                        .copied()
                        .ok_or_else(|| Error::Internal(format!("{g} moved a tuple out of the subalgebra")))
                })
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let partition = orbits_of_perms(subalgebra.len(), &perms);
    Ok(FgOrbits {
        power: n,
        generators: gens.to_vec(),
        subalgebra,
        partition,
        bridge_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubalgebraProfile {
    pub generators: Vec<Elem>,
    pub carrier: Vec<Elem>,
    pub profile: OligoProfile,
}

/// Oligomorphic profiles of `𝒢` restricted to `⟨a⟩` for every `a ∈ A` and
/// to `A` itself, one entry per distinct carrier.
pub fn oligo_on_fg_subalgebras(alg: &FiniteAlgebra, k: usize, caps: &Caps) -> Result<Vec<SubalgebraProfile>> {
    let group = unary_group(alg, caps)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut samples: Vec<Vec<Elem>> = alg.elements().map(|a| vec![a]).collect();
    samples.push(alg.elements().collect());
    for gens in samples {
        let carrier = generate_subalgebra(alg, &gens, caps)?;
        if !seen.insert(carrier.clone()) {
            continue;
        }
        let restricted = group.group.restrict(&carrier)?;
        out.push(SubalgebraProfile {
            generators: gens,
            profile: oligo_profile(&restricted, k, caps)?,
            carrier,
        });
    }
    Ok(out)
}
