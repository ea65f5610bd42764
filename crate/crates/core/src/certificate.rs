//! HSPfin certificates: for `C = ⟨b_1..b_n⟩ ≤ B`, a finite `F ⊆ A^n`, the
//! subalgebra `D ≤ A^F` generated by the coordinate tuples
//! `d_j(a) = a_j`, and an onto homomorphism `h: D → C` with `h(d_j) = b_j`.
//!
//! Construction goes through the natural map `φ`: `F` is a
//! uniform-continuity witness for the entourage "agree at `(b_1..b_n)`",
//! and `h((f(a))_{a∈F}) = φ(f)(b_1..b_n)`.
//!
//! The verifier shares no code with the construction beyond the algebra
//! type: it regenerates `D` with its own naive fixpoint.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::algebra::{generate_in_product, Caps, FiniteAlgebra, ProductView};
use crate::algebra_file::{parse_algebra, write_algebra};
use crate::error::{Error, Result};
use crate::natural::{natural_hom, uc_witness, Counterexample, Entourage, NatHomOutcome};
use crate::table::{for_each_tuple, tuple_index, Elem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HspFinCertificate {
    pub source: FiniteAlgebra,
    pub target: FiniteAlgebra,
    pub generators: Vec<Elem>,
    /// `F ⊆ A^n`, strictly ascending.
    pub support: Vec<Vec<Elem>>,
    /// `D ⊆ A^F`, strictly ascending; coordinates follow `support`.
    pub domain: Vec<Vec<Elem>>,
    /// `h` as explicit pairs, in domain order.
    pub map: Vec<(Vec<Elem>, Elem)>,
}

#[derive(Debug, Clone)]
pub enum CertificateOutcome {
    Certificate(HspFinCertificate),
    /// The natural map is not defined at this arity: `C ∉ HSP(A)`.
    NotMember(Counterexample),
}

/// Builds a certificate that `⟨gens⟩_B ∈ HSPfin(A)`.
pub fn hspfin_certificate(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    gens: &[Elem],
    caps: &Caps,
) -> Result<CertificateOutcome> {
    a.same_signature(b)?;
    if gens.is_empty() {
        return Err(Error::invalid("at least one generator is required"));
    }
    if let Some(g) = gens.iter().find(|&&g| g as usize >= b.size()) {
        return Err(Error::invalid(format!("generator {g} outside B")));
    }
    let n = gens.len();
    let phi = match natural_hom(a, b, n, caps)? {
        NatHomOutcome::Counterexample(c) => return Ok(CertificateOutcome::NotMember(c)),
        NatHomOutcome::Hom(h) => h,
    };
    let alpha = Entourage::new(n, vec![gens.to_vec()], b.size())?;
    let support = uc_witness(&phi, &alpha)?.support;

    let d: Vec<Vec<Elem>> = (0..n)
        .map(|j| support.iter().map(|t| t[j]).collect())
        .collect();
    let view = ProductView::power(a, support.len())?;
    let domain = generate_in_product(&view, &d, caps)?;

    let at_gens = tuple_index(gens, b.size());
    let cols: Vec<usize> = support.iter().map(|t| tuple_index(t, a.size())).collect();
    let mut h: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
    for (src, dst) in phi.source_tables().iter().zip(phi.target_tables()) {
        let key: Vec<Elem> = cols.iter().map(|&c| src[c]).collect();
        let val = dst[at_gens];
        if let Some(&prev) = h.get(&key) {
            if prev != val {
                return Err(Error::Internal(format!(
                    "h is ill-defined at {key:?}: {prev} vs {val}"
                )));
            }
        } else {
            h.insert(key, val);
        }
    }
    if !h.keys().eq(domain.iter()) {
        return Err(Error::Internal(
            "restrictions of the clone differ from the generated D".into(),
        ));
    }
    let cert = HspFinCertificate {
        source: a.clone(),
        target: b.clone(),
        generators: gens.to_vec(),
        support,
        domain,
        map: h.into_iter().collect(),
    };
    let report = verify_certificate(&cert);
    if !report.valid() {
        return Err(Error::Internal(format!(
            "constructed certificate fails verification: {}",
            report.first_failure().unwrap()
        )));
    }
    Ok(CertificateOutcome::Certificate(cert))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    /// `None` when the check passed.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn valid(&self) -> bool {
        self.checks.iter().all(|c| c.failure.is_none())
    }

    pub fn first_failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find_map(|c| c.failure.as_ref().map(|f| format!("{}: {f}", c.name)))
    }
}

/// Re-checks every certificate invariant from scratch. Later checks are
/// skipped (and reported failed) once the shape check fails.
pub fn verify_certificate(cert: &HspFinCertificate) -> VerifyReport {
    let mut checks = Vec::new();
    let shape = check_shape(cert);
    let shape_ok = shape.is_ok();
    checks.push(CheckResult {
        name: "shape",
        failure: shape.err(),
    });
    let later = [
        "domain-regenerated",
        "map-domain",
        "generator-images",
        "homomorphism",
        "surjective",
    ];
    if !shape_ok {
        for name in later {
            checks.push(CheckResult {
                name,
                failure: Some("skipped: malformed certificate".into()),
            });
        }
        return VerifyReport { checks };
    }
    let a = &cert.source;
    let b = &cert.target;
    let n = cert.generators.len();
    let d: Vec<Vec<Elem>> = (0..n)
        .map(|j| cert.support.iter().map(|t| t[j]).collect())
        .collect();
    let regenerated = naive_power_closure(a, &d);
    let listed: BTreeSet<Vec<Elem>> = cert.domain.iter().cloned().collect();
    let domain_check = if regenerated == listed {
        None
    } else if let Some(x) = regenerated.difference(&listed).next() {
        Some(format!("D is missing {x:?}"))
    } else {
        let x = listed.difference(&regenerated).next().unwrap();
        Some(format!("D lists {x:?}, which is not generated"))
    };
    checks.push(CheckResult {
        name: "domain-regenerated",
        failure: domain_check,
    });

    let mut h: HashMap<&[Elem], Elem> = HashMap::new();
    let mut dup = None;
    for (k, v) in &cert.map {
        if h.insert(k.as_slice(), *v).is_some() {
            dup.get_or_insert_with(|| format!("h lists {k:?} twice"));
        }
    }
    let map_domain = dup.or_else(|| {
        regenerated
            .iter()
            .find(|x| !h.contains_key(x.as_slice()))
            .map(|x| format!("h undefined at {x:?}"))
            .or_else(|| {
                h.keys()
                    .find(|k| !regenerated.contains(**k))
                    .map(|k| format!("h defined outside D at {k:?}"))
            })
    });
    let map_ok = map_domain.is_none();
    checks.push(CheckResult {
        name: "map-domain",
        failure: map_domain,
    });

    let gen_check = d.iter().zip(&cert.generators).find_map(|(dj, &bj)| match h.get(dj.as_slice()) {
        Some(&v) if v == bj => None,
        Some(&v) => Some(format!("h({dj:?}) = {v}, expected {bj}")),
        None => Some(format!("h undefined at generator {dj:?}")),
    });
    checks.push(CheckResult {
        name: "generator-images",
        failure: gen_check,
    });

    let carrier: Vec<Vec<Elem>> = regenerated.iter().cloned().collect();
    let hom_check = if !map_ok {
        Some("skipped: h is not a total map on D".into())
    } else {
        first_hom_failure(a, b, &carrier, &h)
    };
    checks.push(CheckResult {
        name: "homomorphism",
        failure: hom_check,
    });

    let c = naive_closure(b, &cert.generators);
    let image: BTreeSet<Elem> = carrier.iter().filter_map(|x| h.get(x.as_slice()).copied()).collect();
    let surj = if image == c {
        None
    } else {
        Some(format!("image of h is {image:?}, generated subalgebra is {c:?}"))
    };
    checks.push(CheckResult {
        name: "surjective",
        failure: surj,
    });
    VerifyReport { checks }
}

fn check_shape(cert: &HspFinCertificate) -> std::result::Result<(), String> {
    let (a, b) = (&cert.source, &cert.target);
    if a.signature() != b.signature() {
        return Err("source and target signatures differ".into());
    }
    let n = cert.generators.len();
    if n == 0 {
        return Err("no generators".into());
    }
    if let Some(g) = cert.generators.iter().find(|&&g| g as usize >= b.size()) {
        return Err(format!("generator {g} outside the target"));
    }
    if cert.support.is_empty() {
        return Err("empty support".into());
    }
    for t in &cert.support {
        if t.len() != n || t.iter().any(|&x| x as usize >= a.size()) {
            return Err(format!("support tuple {t:?} is not in A^{n}"));
        }
    }
    if cert.support.windows(2).any(|w| w[0] >= w[1]) {
        return Err("support is not strictly ascending".into());
    }
    let width = cert.support.len();
    for x in cert.domain.iter().chain(cert.map.iter().map(|p| &p.0)) {
        if x.len() != width || x.iter().any(|&v| v as usize >= a.size()) {
            return Err(format!("tuple {x:?} is not in A^F"));
        }
    }
    if cert.domain.windows(2).any(|w| w[0] >= w[1]) {
        return Err("domain is not strictly ascending".into());
    }
    if let Some((_, v)) = cert.map.iter().find(|p| p.1 as usize >= b.size()) {
        return Err(format!("h value {v} outside the target"));
    }
    Ok(())
}

fn naive_closure(alg: &FiniteAlgebra, gens: &[Elem]) -> BTreeSet<Elem> {
    let mut set: BTreeSet<Elem> = gens.iter().copied().collect();
    loop {
        let cur: Vec<Elem> = set.iter().copied().collect();
        let before = set.len();
        for (s, sym) in alg.signature().symbols().iter().enumerate() {
            for_each_tuple(cur.len(), sym.arity, |idx| {
                let args: Vec<Elem> = idx.iter().map(|&i| cur[i as usize]).collect();
                set.insert(alg.apply(s, &args));
            });
        }
        if set.len() == before {
            return set;
        }
    }
}

fn apply_pointwise(alg: &FiniteAlgebra, sym: usize, args: &[&Vec<Elem>], width: usize) -> Vec<Elem> {
    (0..width)
        .map(|c| {
            let col: Vec<Elem> = args.iter().map(|x| x[c]).collect();
            alg.apply(sym, &col)
        })
        .collect()
}

fn naive_power_closure(alg: &FiniteAlgebra, gens: &[Vec<Elem>]) -> BTreeSet<Vec<Elem>> {
    let width = gens.first().map_or(0, |g| g.len());
    let mut set: BTreeSet<Vec<Elem>> = gens.iter().cloned().collect();
    loop {
        let cur: Vec<Vec<Elem>> = set.iter().cloned().collect();
        let before = set.len();
        for (s, sym) in alg.signature().symbols().iter().enumerate() {
            for_each_tuple(cur.len(), sym.arity, |idx| {
                let args: Vec<&Vec<Elem>> = idx.iter().map(|&i| &cur[i as usize]).collect();
                set.insert(apply_pointwise(alg, s, &args, width));
            });
        }
        if set.len() == before {
            return set;
        }
    }
}

fn first_hom_failure(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    carrier: &[Vec<Elem>],
    h: &HashMap<&[Elem], Elem>,
) -> Option<String> {
    let width = carrier.first().map_or(0, |x| x.len());
    for (s, sym) in a.signature().symbols().iter().enumerate() {
        let mut failure = None;
        for_each_tuple(carrier.len(), sym.arity, |idx| {
            if failure.is_some() {
                return;
            }
            let args: Vec<&Vec<Elem>> = idx.iter().map(|&i| &carrier[i as usize]).collect();
            let r = apply_pointwise(a, s, &args, width);
            let lhs = h.get(r.as_slice()).copied();
            let imgs: Vec<Elem> = args.iter().map(|x| h[x.as_slice()]).collect();
            let rhs = b.apply(s, &imgs);
            if lhs != Some(rhs) {
                failure = Some(format!(
                    "h({}({:?})) = {:?} but {}(h(..)) = {rhs}",
                    sym.name, args, lhs, sym.name
                ));
            }
        });
        if failure.is_some() {
            return failure;
        }
    }
    None
}

fn join(xs: &[Elem]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Stable text form: embedded algebras, generators, `F`, `D`, then `h`.
pub fn write_certificate(cert: &HspFinCertificate) -> String {
    let mut out = String::new();
    writeln!(out, "hspfin-certificate 1").unwrap();
    writeln!(out, "source").unwrap();
    out.push_str(&write_algebra(&cert.source));
    writeln!(out, "end").unwrap();
    writeln!(out, "target").unwrap();
    out.push_str(&write_algebra(&cert.target));
    writeln!(out, "end").unwrap();
    writeln!(out, "generators {}: {}", cert.generators.len(), join(&cert.generators)).unwrap();
    writeln!(out, "support {}", cert.support.len()).unwrap();
    for t in &cert.support {
        writeln!(out, "{}", join(t)).unwrap();
    }
    writeln!(out, "domain {}", cert.domain.len()).unwrap();
    for t in &cert.domain {
        writeln!(out, "{}", join(t)).unwrap();
    }
    writeln!(out, "map {}", cert.map.len()).unwrap();
    for (k, v) in &cert.map {
        writeln!(out, "{} -> {v}", join(k)).unwrap();
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        msg: msg.into(),
    }
}

fn parse_elems(line: usize, s: &str) -> Result<Vec<Elem>> {
    s.split_whitespace()
        .map(|w| w.parse::<Elem>().map_err(|_| perr(line, format!("expected a number, found `{w}`"))))
        .collect()
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let last = self.lines.last().map_or(1, |l| l.0);
        let l = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| perr(last, format!("unexpected end of certificate, expected {what}")))?;
        self.pos += 1;
        Ok(l)
    }

    fn header(&mut self, kw: &str) -> Result<(usize, usize)> {
        let (ln, l) = self.next(kw)?;
        let rest = l
            .strip_prefix(kw)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| perr(ln, format!("expected `{kw} <count>`")))?;
        let count = rest
            .trim()
            .parse()
            .map_err(|_| perr(ln, format!("bad count in `{l}`")))?;
        Ok((ln, count))
    }

    fn algebra_block(&mut self, kw: &str) -> Result<FiniteAlgebra> {
        let (ln, l) = self.next(kw)?;
        if l != kw {
            return Err(perr(ln, format!("expected `{kw}`")));
        }
        let mut body = String::new();
        let start = ln + 1;
        loop {
            let (_, l) = self.next("`end`")?;
            if l == "end" {
                break;
            }
            body.push_str(l);
            body.push('\n');
        }
        parse_algebra(&body).map_err(|e| match e {
            Error::Parse { line, column, msg } => Error::Parse {
                line: line + start - 1,
                column,
                msg,
            },
            other => other,
        })
    }
}

pub fn parse_certificate(src: &str) -> Result<HspFinCertificate> {
    let mut lines = Lines {
        lines: src
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect(),
        pos: 0,
    };
    let (ln, l) = lines.next("header")?;
    if l != "hspfin-certificate 1" {
        return Err(perr(ln, "expected `hspfin-certificate 1`"));
    }
    let source = lines.algebra_block("source")?;
    let target = lines.algebra_block("target")?;
    let (ln, l) = lines.next("generators")?;
    let (head, rest) = l
        .split_once(':')
        .ok_or_else(|| perr(ln, "expected `generators <n>: ...`"))?;
    let count: usize = head
        .strip_prefix("generators ")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| perr(ln, "expected `generators <n>: ...`"))?;
    let generators = parse_elems(ln, rest)?;
    if generators.len() != count {
        return Err(perr(ln, format!("{count} generators announced, {} given", generators.len())));
    }
    let (_, count) = lines.header("support")?;
    let mut support = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = lines.next("support tuple")?;
        support.push(parse_elems(ln, l)?);
    }
    let (_, count) = lines.header("domain")?;
    let mut domain = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = lines.next("domain tuple")?;
        domain.push(parse_elems(ln, l)?);
    }
    let (_, count) = lines.header("map")?;
    let mut map = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, l) = lines.next("map pair")?;
        let (k, v) = l
            .split_once("->")
            .ok_or_else(|| perr(ln, "expected `<tuple> -> <value>`"))?;
        let v = parse_elems(ln, v)?;
        if v.len() != 1 {
            return Err(perr(ln, "expected a single value after `->`"));
        }
        map.push((parse_elems(ln, k)?, v[0]));
    }
    if let Ok((ln, _)) = lines.next("") {
        return Err(perr(ln, "trailing content after map"));
    }
    Ok(HspFinCertificate {
        source,
        target,
        generators,
        support,
        domain,
        map,
    })
}
