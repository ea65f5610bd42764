//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use birkhoff_core::action::{
    hausdorff_classes, invariance_check, pi_open_check, quotient_entourage, FunctionSpace, PointEntourage,
};
use birkhoff_core::alf::{fg_power_orbit_check, locally_finite_check};
use birkhoff_core::algebra_file::write_algebra;
use birkhoff_core::catalog::{chain_lattice, cyclic_group, join_semilattice};
use birkhoff_core::group::write_group;
use birkhoff_core::natural::uc_violation;
use birkhoff_core::table::{all_tuples, index_tuple, tuple_index, Elem};
use birkhoff_core::{
    clone_generate, generate_in_product, generate_subalgebra, hsp_membership_with, hspfin_certificate, natural_hom,
    oligo_profile, orbits, product, term_table, unary_group, uc_witness, verify_certificate, Caps,
    CertificateOutcome, Entourage, FiniteAlgebra, HspFinCertificate, HspVerdict, NatHomOutcome, NaturalHom, Perm,
    PermGroup, ProductView, Signature, Term,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS_SEED: u64 = 0x5eed_b1ff;
const ORBIT_SEED: u64 = 0x0b17_5eed;
const MUTATION_SEED: u64 = 0x0bad_ce27;
const CORPUS_PAIRS: usize = 60;
/// Largest `Clo_m(A × B)` and `Clo_n(A)`, n ≤ 2, admitted to the corpus.
const CORPUS_CLONE_CAP: usize = 600;
const MUTATIONS_PER_CERTIFICATE: usize = 24;
const CLONE_TIME_LIMIT: Duration = Duration::from_secs(10);
const OLIGO_TIME_LIMIT: Duration = Duration::from_secs(5);
const ORBIT_INSTANCES: usize = 40;
const MAX_GROUP_ORDER: usize = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------- criterion 1 ----------

/// Number of distinct tables of terms in `n` variables, by breadth-first
/// term enumeration. Stops after two consecutive depths add nothing.
fn term_bfs_count(alg: &FiniteAlgebra, n: usize) -> usize {
    let caps = Caps::default();
    let sig = alg.signature();
    let mut reps: BTreeMap<Vec<Elem>, Term> = BTreeMap::new();
    let mut seeds: Vec<Term> = (1..=n).map(Term::var).collect();
    seeds.extend((0..sig.len()).filter(|&s| sig.arity(s) == 0).map(|s| Term::app(s, vec![])));
    for t in seeds {
        let table = term_table(&t, alg, n, &caps).unwrap().into_data();
        reps.entry(table).or_insert(t);
    }
    let mut quiet = 0;
    while quiet < 2 {
        let current: Vec<Term> = reps.values().cloned().collect();
        let mut added = false;
        for s in (0..sig.len()).filter(|&s| sig.arity(s) > 0) {
            let k = sig.arity(s);
            for idx in all_tuples(current.len(), k) {
                let t = Term::app(s, idx.iter().map(|&i| current[i as usize].clone()).collect());
                let table = term_table(&t, alg, n, &caps).unwrap().into_data();
                if let std::collections::btree_map::Entry::Vacant(e) = reps.entry(table) {
                    e.insert(t);
                    added = true;
                }
            }
        }
        quiet = if added { 0 } else { quiet + 1 };
    }
    reps.len()
}

fn criterion_1() -> Outcome {
    let cases = [
        (join_semilattice(), [1, 3, 7]),
        (cyclic_group(2), [2, 4, 8]),
        (cyclic_group(3), [3, 9, 27]),
        (chain_lattice(2), [1, 4, 18]),
    ];
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    for (alg, expected) in &cases {
        for n in 1..=3 {
            let start = Instant::now();
            let level = clone_generate(alg, n, &Caps::default()).unwrap();
            let elapsed = start.elapsed();
            slowest = slowest.max(elapsed);
            let oracle = term_bfs_count(alg, n);
            let name = alg.label().unwrap_or("?");
            if !level.complete() || level.len() != oracle || oracle != expected[n - 1] || elapsed > CLONE_TIME_LIMIT {
                failures.push(format!("{name} n={n}: engine {} oracle {oracle} expected {}", level.len(), expected[n - 1]));
            }
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("12 cases match term enumeration, slowest {slowest:.2?}")
        } else {
            failures.join("; ")
        },
    )
}

// ---------- corpus ----------

struct Pair {
    recipe: &'static str,
    a: FiniteAlgebra,
    b: FiniteAlgebra,
    gens: Vec<Elem>,
}

fn random_signature(rng: &mut ChaCha8Rng) -> Signature {
    let symbols = rng.gen_range(1..=2);
    let names = ["f", "g"];
    Signature::new((0..symbols).map(|i| (names[i], rng.gen_range(0..=2usize)))).unwrap()
}

fn random_algebra(rng: &mut ChaCha8Rng, sig: &Signature, min: usize) -> FiniteAlgebra {
    let size: usize = rng.gen_range(min..=3);
    let tables = sig
        .symbols()
        .iter()
        .map(|s| (0..size.pow(s.arity as u32)).map(|_| rng.gen_range(0..size) as Elem).collect())
        .collect();
    FiniteAlgebra::new(sig.clone(), size, tables, None).unwrap()
}

fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let top = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for b in 0..=top {
            prefix.push(b);
            go(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

fn quotient(alg: &FiniteAlgebra, blocks: &[usize]) -> Option<FiniteAlgebra> {
    let sig = alg.signature();
    for s in 0..sig.len() {
        let k = sig.arity(s);
        for x in all_tuples(alg.size(), k) {
            for y in all_tuples(alg.size(), k) {
                let related = x.iter().zip(&y).all(|(&a, &b)| blocks[a as usize] == blocks[b as usize]);
                if related && blocks[alg.apply(s, &x) as usize] != blocks[alg.apply(s, &y) as usize] {
                    return None;
                }
            }
        }
    }
    let classes = blocks.iter().max().unwrap() + 1;
    let rep: Vec<Elem> = (0..classes).map(|c| blocks.iter().position(|&b| b == c).unwrap() as Elem).collect();
    let tables = (0..sig.len())
        .map(|s| {
            all_tuples(classes, sig.arity(s))
                .iter()
                .map(|t| {
                    let args: Vec<Elem> = t.iter().map(|&c| rep[c as usize]).collect();
                    blocks[alg.apply(s, &args) as usize] as Elem
                })
                .collect()
        })
        .collect();
    Some(FiniteAlgebra::new(alg.signature_arc(), classes, tables, None).unwrap())
}

/// A generating set of least size, first in canonical order.
fn min_generators(b: &FiniteAlgebra) -> Vec<Elem> {
    let caps = Caps::default();
    let elems: Vec<Elem> = b.elements().collect();
    for k in 1..=b.size() {
        for idx in all_tuples(b.size(), k) {
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                continue;
            }
            let gens: Vec<Elem> = idx.iter().map(|&i| elems[i as usize]).collect();
            if generate_subalgebra(b, &gens, &caps).unwrap().len() == b.size() {
                return gens;
            }
        }
    }
    unreachable!("the whole carrier generates")
}

fn tractable(a: &FiniteAlgebra, b: &FiniteAlgebra, m: usize) -> bool {
    let caps = Caps {
        clone_members: CORPUS_CLONE_CAP,
        ..Caps::default()
    };
    let complete = |alg: &FiniteAlgebra, n: usize| clone_generate(alg, n, &caps).map(|l| l.complete()).unwrap_or(false);
    let ab = product(&[a, b], &caps).unwrap();
    complete(&ab, m) && (1..=2).all(|n| complete(a, n))
}

fn make_pair(rng: &mut ChaCha8Rng, recipe: usize) -> Option<Pair> {
    let caps = Caps::default();
    let sig = random_signature(rng);
    let a = random_algebra(rng, &sig, 1);
    let (name, b) = match recipe {
        0 => ("independent", random_algebra(rng, &sig, 2)),
        1 => ("identical", a.clone()),
        2 => {
            let g = rng.gen_range(0..a.size()) as Elem;
            let sub = generate_subalgebra(&a, &[g], &caps).ok()?;
            ("subalgebra", a.restrict(&sub).ok()?)
        }
        3 => {
            let mut parts: Vec<Vec<usize>> = partitions(a.size()).into_iter().filter(|p| p.iter().any(|&b| b > 0)).collect();
            parts.shuffle(rng);
            let q = parts.iter().find_map(|p| quotient(&a, p))?;
            ("quotient", q)
        }
        5 => {
            let q = partitions(a.size()).iter().skip(1).find_map(|p| quotient(&a, p));
            let g = rng.gen_range(0..a.size()) as Elem;
            let sub = generate_subalgebra(&a, &[g], &caps).ok()?;
            let smaller = match q {
                Some(q) if rng.gen_bool(0.5) => q,
                _ => a.restrict(&sub).ok()?,
            };
            let gens = min_generators(&a);
            if !tractable(&smaller, &a, gens.len()) {
                return None;
            }
            return Some(Pair {
                recipe: "reversed",
                a: smaller,
                b: a,
                gens,
            });
        }
        _ => {
            let view = ProductView::power(&a, 2).ok()?;
            let gens: Vec<Vec<Elem>> = (0..rng.gen_range(1..=2))
                .map(|_| vec![rng.gen_range(0..a.size()) as Elem, rng.gen_range(0..a.size()) as Elem])
                .collect();
            let sub = generate_in_product(&view, &gens, &caps).ok()?;
            if sub.len() > 3 {
                return None;
            }
            let square = product(&[&a, &a], &caps).ok()?;
            let idx: Vec<Elem> = sub.iter().map(|t| tuple_index(t, a.size()) as Elem).collect();
            ("square-subalgebra", square.restrict(&idx).ok()?)
        }
    };
    let gens = min_generators(&b);
    if !tractable(&a, &b, gens.len()) {
        return None;
    }
    Some(Pair {
        recipe: name,
        a,
        b,
        gens,
    })
}

fn corpus() -> (Vec<Pair>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut pairs = Vec::new();
    let mut drawn = 0;
    while pairs.len() < CORPUS_PAIRS {
        drawn += 1;
        if let Some(p) = make_pair(&mut rng, drawn % 6) {
            pairs.push(p);
        }
    }
    (pairs, drawn)
}

/// Every `m`-variable identity of `A` holds in `B`: the closure of the
/// paired projections in `A^(A^m) × B^(B^m)` is the graph of a function.
fn identity_oracle(a: &FiniteAlgebra, b: &FiniteAlgebra, m: usize) -> bool {
    let ta = all_tuples(a.size(), m);
    let tb = all_tuples(b.size(), m);
    let sig = a.signature();
    let mut seen: HashSet<(Vec<Elem>, Vec<Elem>)> = HashSet::new();
    for i in 0..m {
        seen.insert((ta.iter().map(|t| t[i]).collect(), tb.iter().map(|t| t[i]).collect()));
    }
    loop {
        let current: Vec<(Vec<Elem>, Vec<Elem>)> = seen.iter().cloned().collect();
        let mut fresh = Vec::new();
        for s in 0..sig.len() {
            let k = sig.arity(s);
            for idx in all_tuples(current.len(), k) {
                let args: Vec<&(Vec<Elem>, Vec<Elem>)> = idx.iter().map(|&i| &current[i as usize]).collect();
                let fa: Vec<Elem> = (0..ta.len())
                    .map(|p| a.apply(s, &args.iter().map(|x| x.0[p]).collect::<Vec<_>>()))
                    .collect();
                let fb: Vec<Elem> = (0..tb.len())
                    .map(|p| b.apply(s, &args.iter().map(|x| x.1[p]).collect::<Vec<_>>()))
                    .collect();
                if !seen.contains(&(fa.clone(), fb.clone())) {
                    fresh.push((fa, fb));
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        seen.extend(fresh);
    }
    let mut graph: HashMap<&Vec<Elem>, &Vec<Elem>> = HashMap::new();
    seen.iter().all(|(x, y)| *graph.entry(x).or_insert(y) == y)
}

struct Decided {
    pair: Pair,
    member: bool,
}

fn criterion_2(pairs: Vec<Pair>, drawn: usize) -> (Outcome, Vec<Decided>) {
    let mut decided = Vec::new();
    let mut disagreements = Vec::new();
    let mut recipes: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, pair) in pairs.into_iter().enumerate() {
        *recipes.entry(pair.recipe).or_default() += 1;
        let verdict = hsp_membership_with(&pair.a, &pair.b, &pair.gens, &Caps::default()).unwrap();
        let oracle = identity_oracle(&pair.a, &pair.b, pair.gens.len());
        if verdict.is_member() != oracle {
            disagreements.push(i);
        }
        if let HspVerdict::NotMember(c) = &verdict {
            let s = birkhoff_core::eval_term(&c.s, &pair.b, &c.args).unwrap();
            let t = birkhoff_core::eval_term(&c.t, &pair.b, &c.args).unwrap();
            let holds_in_a = all_tuples(pair.a.size(), c.arity).iter().all(|x| {
                birkhoff_core::eval_term(&c.s, &pair.a, x).unwrap() == birkhoff_core::eval_term(&c.t, &pair.a, x).unwrap()
            });
            if s == t || !holds_in_a {
                disagreements.push(i);
            }
        }
        decided.push(Decided {
            member: verdict.is_member(),
            pair,
        });
    }
    let yes = decided.iter().filter(|d| d.member).count();
    let detail = format!(
        "{} pairs ({} drawn, {yes} YES, {} NO; {:?}), {} disagreements",
        decided.len(),
        drawn,
        decided.len() - yes,
        recipes,
        disagreements.len()
    );
    (outcome(disagreements.is_empty() && decided.len() >= 50, detail), decided)
}

// ---------- criterion 3 ----------

fn mutate(cert: &HspFinCertificate, rng: &mut ChaCha8Rng) -> Option<(String, HspFinCertificate)> {
    let mut m = cert.clone();
    let kb = cert.target.size() as Elem;
    let ka = cert.source.size() as Elem;
    match rng.gen_range(0..7) {
        0 if kb > 1 => {
            let i = rng.gen_range(0..m.map.len());
            m.map[i].1 = (m.map[i].1 + rng.gen_range(1..kb)) % kb;
            Some(("map value".into(), m))
        }
        1 => {
            let i = rng.gen_range(0..m.domain.len());
            m.domain.remove(i);
            m.map.remove(i);
            Some(("drop domain element".into(), m))
        }
        2 => {
            let width = m.support.len();
            let present: BTreeSet<&Vec<Elem>> = cert.domain.iter().collect();
            let missing: Vec<Vec<Elem>> = all_tuples(ka as usize, width).into_iter().filter(|t| !present.contains(t)).collect();
            let extra = missing.choose(rng)?.clone();
            let pos = m.domain.partition_point(|d| *d < extra);
            m.domain.insert(pos, extra.clone());
            m.map.insert(pos, (extra, 0));
            Some(("add domain element".into(), m))
        }
        3 if kb > 1 => {
            let i = rng.gen_range(0..m.generators.len());
            m.generators[i] = (m.generators[i] + rng.gen_range(1..kb)) % kb;
            Some(("generator".into(), m))
        }
        4 => {
            let i = rng.gen_range(0..m.support.len());
            let t = m.support[i].clone();
            m.support.insert(i, t);
            Some(("duplicate support tuple".into(), m))
        }
        5 => {
            let i = rng.gen_range(0..m.map.len());
            m.map.remove(i);
            Some(("drop map entry".into(), m))
        }
        6 if ka > 1 => {
            let i = rng.gen_range(0..m.domain.len());
            let j = rng.gen_range(0..m.domain[i].len());
            m.domain[i][j] = (m.domain[i][j] + rng.gen_range(1..ka)) % ka;
            Some(("domain coordinate".into(), m))
        }
        _ => None,
    }
}

fn criterion_3(decided: &[Decided]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(MUTATION_SEED);
    let mut certs = 0;
    let mut trials = 0;
    let mut problems = Vec::new();
    for (i, d) in decided.iter().enumerate().filter(|(_, d)| d.member) {
        let cert = match hspfin_certificate(&d.pair.a, &d.pair.b, &d.pair.gens, &Caps::default()) {
            Ok(CertificateOutcome::Certificate(c)) => c,
            other => {
                problems.push(format!("pair {i}: no certificate ({:?})", other.map(|_| "NotMember")));
                continue;
            }
        };
        certs += 1;
        if !verify_certificate(&cert).valid() {
            problems.push(format!("pair {i}: emitted certificate rejected"));
        }
        let mut done = 0;
        while done < MUTATIONS_PER_CERTIFICATE {
            let Some((kind, m)) = mutate(&cert, &mut rng) else { continue };
            done += 1;
            trials += 1;
            if m != cert && verify_certificate(&m).valid() {
                problems.push(format!("pair {i}: mutation `{kind}` accepted"));
            }
        }
    }
    outcome(
        problems.is_empty() && certs > 0,
        format!("{certs} certificates, {trials} mutations, {} problems {:?}", problems.len(), problems.first()),
    )
}

// ---------- criteria 4 and 5 ----------

fn level_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, n: usize) -> Option<NaturalHom> {
    let caps = Caps {
        clone_members: CORPUS_CLONE_CAP,
        ..Caps::default()
    };
    if !clone_generate(a, n, &caps).ok()?.complete() {
        return None;
    }
    match natural_hom(a, b, n, &Caps::default()).ok()? {
        NatHomOutcome::Hom(h) => Some(h),
        NatHomOutcome::Counterexample(_) => panic!("member pair without a natural map at arity {n}"),
    }
}

fn criterion_4(decided: &[Decided]) -> Outcome {
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = 0;
    for d in decided.iter().filter(|d| d.member) {
        let (a, b) = (&d.pair.a, &d.pair.b);
        for n in 1..=2 {
            let Some(phi) = level_hom(a, b, n) else {
                skipped += 1;
                continue;
            };
            for t in all_tuples(b.size(), n) {
                let alpha = Entourage::new(n, vec![t.clone()], b.size()).unwrap();
                let e = uc_witness(&phi, &alpha).unwrap();
                checked += 1;
                if uc_violation(&phi, &e.support, &alpha.support).is_some() {
                    violations += 1;
                    continue;
                }
                let at = tuple_index(&t, b.size());
                let src = phi.source_tables();
                let dst = phi.target_tables();
                let idx: Vec<usize> = e.support.iter().map(|x| tuple_index(x, a.size())).collect();
                for i in 0..src.len() {
                    for j in i + 1..src.len() {
                        if idx.iter().all(|&p| src[i][p] == src[j][p]) && dst[i][at] != dst[j][at] {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(
        violations == 0 && skipped == 0 && checked > 0,
        format!("{checked} singleton supports, {violations} violations, {skipped} levels not built"),
    )
}

fn laws_hold(phi: &NaturalHom) -> bool {
    let a = phi.source();
    let b = phi.target();
    let n = phi.arity();
    let ta = all_tuples(a.size(), n);
    let tb = all_tuples(b.size(), n);
    let sig = a.signature();
    let image: HashMap<&[Elem], &[Elem]> = phi
        .source_tables()
        .iter()
        .zip(phi.target_tables())
        .map(|(x, y)| (&x[..], &y[..]))
        .collect();
    for i in 0..n {
        let pa: Vec<Elem> = ta.iter().map(|t| t[i]).collect();
        let pb: Vec<Elem> = tb.iter().map(|t| t[i]).collect();
        if image.get(&pa[..]) != Some(&&pb[..]) {
            return false;
        }
    }
    let members = phi.source_tables();
    for s in 0..sig.len() {
        for idx in all_tuples(members.len(), sig.arity(s)) {
            let args: Vec<&Vec<Elem>> = idx.iter().map(|&i| &members[i as usize]).collect();
            let fa: Vec<Elem> = (0..ta.len())
                .map(|p| a.apply(s, &args.iter().map(|x| x[p]).collect::<Vec<_>>()))
                .collect();
            let fb: Vec<Elem> = (0..tb.len())
                .map(|p| b.apply(s, &args.iter().map(|x| image[&x[..]][p]).collect::<Vec<_>>()))
                .collect();
            if image.get(&fa[..]) != Some(&&fb[..]) {
                return false;
            }
        }
    }
    true
}

fn criterion_5(decided: &[Decided]) -> Outcome {
    let mut homs = 0;
    let mut failures = 0;
    for d in decided.iter().filter(|d| d.member) {
        let (a, b) = (&d.pair.a, &d.pair.b);
        let mut levels: Vec<NaturalHom> = (1..=2).filter_map(|n| level_hom(a, b, n)).collect();
        if let HspVerdict::Member(m) = hsp_membership_with(a, b, &d.pair.gens, &Caps::default()).unwrap() {
            levels.push(m.hom);
        }
        for phi in &levels {
            homs += 1;
            if phi.check_laws().is_err() || !laws_hold(phi) {
                failures += 1;
            }
        }
    }
    outcome(failures == 0 && homs > 0, format!("{homs} natural maps, {failures} law failures"))
}

// ---------- criterion 6 ----------

fn group_elements(g: &PermGroup) -> Option<Vec<Perm>> {
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    let id = Perm::identity(g.degree());
    seen.insert(id.clone());
    let mut queue = vec![id];
    while let Some(p) = queue.pop() {
        for s in g.generators() {
            let q = s.after(&p);
            if seen.insert(q.clone()) {
                if seen.len() > MAX_GROUP_ORDER {
                    return None;
                }
                queue.push(q);
            }
        }
    }
    Some(seen.into_iter().collect())
}

fn brute_force_blocks(g: &PermGroup, n: usize) -> Option<BTreeSet<BTreeSet<usize>>> {
    let elements = group_elements(g)?;
    let k = g.degree();
    let points = k.pow(n as u32);
    Some(
        (0..points)
            .map(|p| {
                let f = index_tuple(p, k, n);
                elements
                    .iter()
                    .map(|h| tuple_index(&f.iter().map(|&x| h.apply(x)).collect::<Vec<_>>(), k))
                    .collect()
            })
            .collect(),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ORBIT_SEED);
    let mut mismatches = 0;
    for _ in 0..ORBIT_INSTANCES {
        let degree = rng.gen_range(1..=5);
        let gens: Vec<Perm> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let mut images: Vec<Elem> = (0..degree as Elem).collect();
                images.shuffle(&mut rng);
                Perm::new(images).unwrap()
            })
            .collect();
        let g = PermGroup::new(degree, gens).unwrap();
        let n = rng.gen_range(1..=4);
        let part = orbits(&g, &FunctionSpace::power(degree, n).unwrap(), &Caps::default()).unwrap();
        let blocks: BTreeSet<BTreeSet<usize>> = part.blocks().into_iter().map(|b| b.into_iter().collect()).collect();
        let least_reps = part.blocks().iter().zip(part.representatives()).all(|(b, &r)| b[0] == r);
        if Some(blocks) != brute_force_blocks(&g, n) || !least_reps {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{ORBIT_INSTANCES} random instances, {mismatches} mismatches"))
}

// ---------- criterion 7 ----------

/// Partitions of an `n`-set into at most `k` blocks.
fn bounded_bell(n: usize, k: usize) -> usize {
    let mut s = vec![vec![0usize; k + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s[n].iter().sum()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let counts = oligo_profile(&PermGroup::symmetric(4), 5, &Caps::default()).unwrap().counts;
    let elapsed = start.elapsed();
    let oracle: Vec<usize> = (1..=5).map(|n| bounded_bell(n, 4)).collect();
    let pass = counts == oracle && counts == [1, 2, 5, 15, 51] && elapsed < OLIGO_TIME_LIMIT;
    outcome(pass, format!("profile {counts:?}, set-partition oracle {oracle:?}, {elapsed:.2?}"))
}

// ---------- criterion 8 ----------

fn small_groups() -> Vec<PermGroup> {
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push(PermGroup::trivial(k));
        out.push(PermGroup::symmetric(k));
        let cycle: Vec<Elem> = (0..k as Elem).map(|i| (i + 1) % k as Elem).collect();
        out.push(PermGroup::new(k, vec![Perm::new(cycle).unwrap()]).unwrap());
    }
    out.push(
        PermGroup::new(
            4,
            vec![Perm::new(vec![1, 0, 2, 3]).unwrap(), Perm::new(vec![0, 1, 3, 2]).unwrap()],
        )
        .unwrap(),
    );
    out
}

fn criterion_8() -> Outcome {
    let caps = Caps::default();
    let mut checks = 0;
    let mut violations = 0;
    for g in small_groups() {
        for n in 1..=3 {
            let space = FunctionSpace::power(g.degree(), n).unwrap();
            let part = orbits(&g, &space, &caps).unwrap();
            let mut base = Vec::new();
            for mask in 0..(1usize << n) {
                let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let alpha = PointEntourage::kernel(&space, support).unwrap();
                checks += 4;
                violations += usize::from(!invariance_check(&g, &space, &alpha, &caps).unwrap());
                let q = quotient_entourage(&part, &space, &alpha, &caps).unwrap();
                violations += usize::from(!q.is_reflexive());
                violations += usize::from(!q.is_symmetric());
                violations += usize::from(pi_open_check(&g, &space, &part, &alpha, None, &caps).unwrap().is_err());
                base.push(alpha);
            }
            checks += 1;
            violations += usize::from(hausdorff_classes(&part, &space, &base, &caps).unwrap() != part);
        }
    }
    outcome(violations == 0, format!("{checks} checks, {violations} violations"))
}

// ---------- criterion 9 ----------

fn criterion_9() -> Outcome {
    let caps = Caps::default();
    let mut problems = Vec::new();
    let z4 = unary_group(&cyclic_group(4), &caps).unwrap();
    let tables: Vec<&[Elem]> = z4.elements.iter().map(|t| t.data()).collect();
    if tables != [&[0, 1, 2, 3][..], &[0, 3, 2, 1][..]] || z4.axiom_violation().is_some() {
        problems.push(format!("unary group of Z4 is {tables:?}"));
    }
    let algebras = [cyclic_group(4), cyclic_group(3), join_semilattice(), chain_lattice(3)];
    let mut samples_checked = 0;
    let mut bridges = 0;
    for alg in &algebras {
        let samples: Vec<Vec<Elem>> = (1..=2).flat_map(|n| all_tuples(alg.size(), n)).collect();
        for s in locally_finite_check(alg, &samples, &caps).unwrap() {
            samples_checked += 1;
            if !s.agrees() {
                problems.push(format!("local finiteness sides differ at {:?}", s.generators));
            }
        }
        for n in 1..=2 {
            for m in 1..=2 {
                for raw in all_tuples(alg.size().pow(n as u32), m) {
                    let gens: Vec<Vec<Elem>> = raw.iter().map(|&i| index_tuple(i as usize, alg.size(), n)).collect();
                    let r = fg_power_orbit_check(alg, n, &gens, &caps).unwrap();
                    bridges += 1;
                    if !r.bridge_holds || r.orbit_count() > r.subalgebra.len() {
                        problems.push(format!("bridge fails for {gens:?}"));
                    }
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!(
            "unary group of Z4 = {{x, 3x}}, {samples_checked} local samples, {bridges} bridging calls, {} violations",
            problems.len()
        ),
    )
}

// ---------- criterion 10 ----------

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_birkhoff")).args(args).output().unwrap();
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).display().to_string();
    let write = |name: &str, text: String| std::fs::write(dir.path().join(name), text).unwrap();
    write("z4.alg", write_algebra(&cyclic_group(4)));
    write("z2.alg", write_algebra(&cyclic_group(2)));
    write("semi.alg", write_algebra(&join_semilattice()));
    write("sym4.grp", write_group(&PermGroup::symmetric(4)));
    let (_, code) = run_cli(&["cert", &p("z4.alg"), &p("z2.alg"), "--out", &p("fixed.cert")]);
    assert_eq!(code, 0);
    let commands: Vec<Vec<String>> = vec![
        vec!["clone".into(), p("semi.alg"), "-n".into(), "3".into(), "--tables".into()],
        vec!["free".into(), p("z4.alg"), "-n".into(), "1".into()],
        vec!["hsp".into(), p("z4.alg"), p("z2.alg")],
        vec!["hsp".into(), p("z2.alg"), p("z4.alg")],
        vec!["nat-hom".into(), p("z4.alg"), p("z2.alg"), "-n".into(), "2".into(), "--tables".into()],
        vec!["uc-witness".into(), p("z4.alg"), p("z2.alg"), "-n".into(), "2".into(), "--support".into(), "0,1".into()],
        vec!["cert".into(), p("z4.alg"), p("z2.alg"), "--gens".into(), "1".into()],
        vec!["verify".into(), p("fixed.cert")],
        vec!["orbits".into(), p("sym4.grp"), "-n".into(), "3".into(), "--list".into()],
        vec!["oligo".into(), p("sym4.grp"), "-k".into(), "4".into()],
        vec!["probe".into(), p("sym4.grp"), "--probe-depth".into(), "4".into()],
        vec!["alf".into(), p("z4.alg"), "-k".into(), "2".into()],
        vec!["unary-group".into(), p("z4.alg")],
    ];
    let mut unstable = Vec::new();
    let cache = p("cache");
    for cmd in &commands {
        for format in ["text", "structured"] {
            let mut base: Vec<&str> = cmd.iter().map(String::as_str).collect();
            base.extend(["--format", format]);
            let runs: Vec<(Vec<u8>, i32)> = (0..3).map(|_| run_cli(&base)).collect();
            let mut cached = base.clone();
            cached.extend(["--cache", &cache]);
            let cold = run_cli(&cached);
            let warm = run_cli(&cached);
            if runs.iter().any(|r| *r != runs[0]) || cold != runs[0] || warm != runs[0] || runs[0].0.is_empty() {
                unstable.push(format!("{} ({format})", cmd[0]));
            }
        }
    }
    let cache_used = Path::new(&cache).read_dir().map(|d| d.count()).unwrap_or(0) > 0;
    outcome(
        unstable.is_empty() && cache_used,
        format!("{} invocations x 5 runs, unstable: {unstable:?}", commands.len() * 2),
    )
}

#[test]
fn acceptance() {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    results.push((1, "clone sizes agree with term enumeration", criterion_1()));
    let (pairs, drawn) = corpus();
    let (c2, decided) = criterion_2(pairs, drawn);
    results.push((2, "membership agrees with the identity oracle", c2));
    results.push((3, "certificates verify and mutations are rejected", criterion_3(&decided)));
    results.push((4, "uniform-continuity witnesses hold", criterion_4(&decided)));
    results.push((5, "natural maps preserve projections and composition", criterion_5(&decided)));
    results.push((6, "orbits agree with brute-force enumeration", criterion_6()));
    results.push((7, "Sym(4) profile is 1 2 5 15 51", criterion_7()));
    results.push((8, "entourage invariance, quotients, openness, Hausdorff classes", criterion_8()));
    results.push((9, "unary group, local finiteness, bridging map", criterion_9()));
    results.push((10, "CLI output is deterministic and cache transparent", criterion_10()));
    let mut out = std::io::stdout().lock();
    for (n, name, o) in &results {
        writeln!(out, "criterion {n:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail).unwrap();
    }
    drop(out);
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
