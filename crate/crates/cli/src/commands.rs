use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use birkhoff_core::action::{precompactness_probe, FunctionSpace, OrbitPartition};
use birkhoff_core::alf::{alf_orbit_counts, locally_finite_check, oligo_on_fg_subalgebras, unary_group};
use birkhoff_core::algebra_file::{parse_algebra, write_algebra};
use birkhoff_core::certificate::{parse_certificate, write_certificate};
use birkhoff_core::group::parse_group;
use birkhoff_core::natural::uc_violation;
use birkhoff_core::table::{index_tuple, Elem};
use birkhoff_core::{
    action, clone_generate, hsp_membership_with, hspfin_certificate, natural_hom, parse_term, print_term,
    uc_witness, verify_certificate, Caps, CertificateOutcome, CloneLevel, Entourage, Error, FiniteAlgebra,
    FreeAlgebra, HspVerdict, NatHomOutcome, OperationTable, PermGroup, VarContext,
};
use serde_json::{json, Map, Value};

use crate::cache::Cache;
use crate::{Cli, Command};

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    Bfs,
    UnionFind,
}

pub struct Outcome {
    pub report: Map<String, Value>,
    pub code: u8,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome::with_code(report, 0)
    }

    fn with_code(report: Value, code: u8) -> Self {
        match report {
            Value::Object(report) => Outcome { report, code },
            _ => unreachable!("reports are objects"),
        }
    }
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(err) if err.is_cap() => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

struct Ctx<'a> {
    caps: Caps,
    cache: Option<Cache>,
    cli: &'a Cli,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load_algebra(path: &Path) -> Result<(Vec<u8>, FiniteAlgebra)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let alg = parse_algebra(&text).with_context(|| format!("in {}", path.display()))?;
    Ok((bytes, alg))
}

fn load_group(path: &Path) -> Result<(Vec<u8>, PermGroup)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let g = parse_group(&text).with_context(|| format!("in {}", path.display()))?;
    Ok((bytes, g))
}

fn label(alg: &FiniteAlgebra) -> Value {
    alg.label().map_or(Value::Null, |l| Value::String(l.to_string()))
}

fn parse_tuple(s: &str) -> Result<Vec<Elem>> {
    s.split(',')
        .map(|w| w.trim().parse::<Elem>().map_err(|_| anyhow!("bad element `{}` in `{s}`", w.trim())))
        .collect()
}

fn parse_tuples(s: &str) -> Result<Vec<Vec<Elem>>> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(parse_tuple).collect()
}

fn generators(list: Option<&str>, b: &FiniteAlgebra) -> Result<Vec<Elem>> {
    match list {
        None => Ok(b.elements().collect()),
        Some(s) => parse_tuple(s),
    }
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn tables_json(tables: &[OperationTable]) -> Value {
    Value::Array(tables.iter().map(|t| json!(t.data())).collect())
}

impl Ctx<'_> {
    fn clone_level(&self, bytes: &[u8], alg: &FiniteAlgebra, n: usize) -> Result<CloneLevel> {
        let key = Cache::key(bytes, "clone", &format!("n={n} cap={}", self.caps.clone_members));
        if let Some(cache) = &self.cache {
            if let Some(level) = cache.get(&key).and_then(|p| decode_level(&p, alg, n, &self.caps)) {
                return Ok(level);
            }
        }
        let level = clone_generate(alg, n, &self.caps)?;
        if let (Some(cache), true) = (&self.cache, level.complete()) {
            cache.put(&key, &encode_level(&level))?;
        }
        Ok(level)
    }

    fn orbit_partition(&self, bytes: &[u8], g: &PermGroup, n: usize, backend: Backend) -> Result<OrbitPartition> {
        let space = FunctionSpace::power(g.degree(), n)?;
        let key = Cache::key(bytes, "orbits", &format!("n={n} backend={backend:?}"));
        if let Some(cache) = &self.cache {
            if let Some(part) = cache.get(&key).and_then(|p| decode_partition(&p, &space)) {
                return Ok(part);
            }
        }
        let part = match backend {
            Backend::Bfs => action::orbits(g, &space, &self.caps)?,
            Backend::UnionFind => action::orbits_union_find(g, &space, &self.caps)?,
        };
        if let Some(cache) = &self.cache {
            cache.put(&key, &encode_partition(&part))?;
        }
        Ok(part)
    }
}

fn encode_level(level: &CloneLevel) -> String {
    let sig = level.algebra().signature();
    json!({
        "arity": level.arity(),
        "members": tables_json(level.members()),
        "terms": level.witnesses().iter().map(|t| print_term(t, sig)).collect::<Vec<_>>(),
    })
    .to_string()
}

fn decode_level(payload: &str, alg: &FiniteAlgebra, n: usize, caps: &Caps) -> Option<CloneLevel> {
    let v: Value = serde_json::from_str(payload).ok()?;
    if v["arity"].as_u64()? as usize != n {
        return None;
    }
    let ctx = VarContext::new(n).ok()?;
    let members = v["members"]
        .as_array()?
        .iter()
        .map(|m| {
            let data = m
                .as_array()?
                .iter()
                .map(|x| x.as_u64().map(|x| x as Elem))
                .collect::<Option<Vec<_>>>()?;
            OperationTable::new(n, alg.size(), data).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    let terms = v["terms"]
        .as_array()?
        .iter()
        .map(|t| parse_term(t.as_str()?, alg.signature(), ctx).ok())
        .collect::<Option<Vec<_>>>()?;
    CloneLevel::from_parts(alg.clone(), n, members, terms, true, caps).ok()
}

fn encode_partition(part: &OrbitPartition) -> String {
    part.orbit_ids().iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" ")
}

fn decode_partition(payload: &str, space: &FunctionSpace) -> Option<OrbitPartition> {
    let labels = payload
        .split_whitespace()
        .map(|w| w.parse::<usize>().ok())
        .collect::<Option<Vec<_>>>()?;
    let part = OrbitPartition::from_labels(&labels);
    (Some(labels.len()) == space.points() && part.orbit_ids().iter().zip(&labels).all(|(&a, &b)| a as usize == b))
        .then_some(part)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let caps = Caps {
        clone_members: cli.cap_members,
        table_bytes: cli.cap_table_bytes,
        product_size: cli.cap_product,
        points: cli.cap_points,
    };
    let cache = cli.cache.as_deref().map(Cache::open).transpose()?;
    let ctx = Ctx { caps, cache, cli };
    match &cli.command {
        Command::Clone { algebra, arity, tables } => cmd_clone(&ctx, algebra, *arity, *tables),
        Command::Free { algebra, arity, out } => cmd_free(&ctx, algebra, *arity, out.as_deref()),
        Command::Hsp { source, target, gens, out } => cmd_hsp(&ctx, source, target, gens.as_deref(), out.as_deref()),
        Command::NatHom { source, target, arity, tables } => cmd_nat_hom(&ctx, source, target, *arity, *tables),
        Command::UcWitness { source, target, arity, support } => cmd_uc(&ctx, source, target, *arity, support),
        Command::Cert { source, target, gens, out } => cmd_cert(&ctx, source, target, gens.as_deref(), out.as_deref()),
        Command::Verify { certificate } => cmd_verify(certificate),
        Command::Orbits { group, arity, backend, list } => cmd_orbits(&ctx, group, *arity, *backend, *list),
        Command::Oligo { group, max_arity } => cmd_oligo(&ctx, group, *max_arity),
        Command::Probe { group } => cmd_probe(&ctx, group),
        Command::Alf { algebra, max_arity, samples } => cmd_alf(&ctx, algebra, *max_arity, *samples),
        Command::UnaryGroup { algebra } => cmd_unary_group(&ctx, algebra),
    }
}

fn cmd_clone(ctx: &Ctx, path: &Path, n: usize, tables: bool) -> Result<Outcome> {
    let (bytes, alg) = load_algebra(path)?;
    let level = ctx.clone_level(&bytes, &alg, n)?;
    let mut report = json!({
        "algebra": label(&alg),
        "arity": n,
        "members": level.len(),
        "complete": level.complete(),
    });
    if tables {
        report["tables"] = Value::Array(
            level
                .members()
                .iter()
                .zip(level.witnesses())
                .map(|(m, w)| json!({"table": m.data(), "term": print_term(w, alg.signature())}))
                .collect(),
        );
    }
    let code = if level.complete() { 0 } else { EXIT_CAP };
    Ok(Outcome::with_code(report, code))
}

fn cmd_free(ctx: &Ctx, path: &Path, n: usize, out: Option<&Path>) -> Result<Outcome> {
    let (bytes, alg) = load_algebra(path)?;
    let level = ctx.clone_level(&bytes, &alg, n)?;
    let free = FreeAlgebra::from_level(level, &ctx.caps)?;
    let text = write_algebra(&free.algebra);
    let mut report = json!({
        "algebra": label(&alg),
        "generators": n,
        "size": free.algebra.size(),
        "generator_elements": free.generators,
    });
    match out {
        Some(p) => {
            write_out(p, &text)?;
            report["written"] = json!(p.display().to_string());
        }
        None => report["free_algebra"] = json!(text),
    }
    Ok(Outcome::ok(report))
}

fn counterexample_report(report: &mut Value, c: &birkhoff_core::natural::Counterexample, b: &FiniteAlgebra) {
    report["identity"] = json!(c.identity(b));
    report["arity"] = json!(c.arity);
    report["at"] = json!(c.args);
    report["lhs_value"] = json!(c.s_value);
    report["rhs_value"] = json!(c.t_value);
}

fn certificate_report(report: &mut Value, cert: &birkhoff_core::HspFinCertificate, out: Option<&Path>) -> Result<()> {
    report["support"] = json!(cert.support.len());
    report["domain"] = json!(cert.domain.len());
    let text = write_certificate(cert);
    match out {
        Some(p) => {
            write_out(p, &text)?;
            report["certificate"] = json!(p.display().to_string());
        }
        None => report["certificate"] = json!(text),
    }
    Ok(())
}

fn cmd_hsp(ctx: &Ctx, a_path: &Path, b_path: &Path, gens: Option<&str>, out: Option<&Path>) -> Result<Outcome> {
    let (_, a) = load_algebra(a_path)?;
    let (_, b) = load_algebra(b_path)?;
    let gens = generators(gens, &b)?;
    let mut report = json!({"source": label(&a), "target": label(&b), "generators": gens});
    match hsp_membership_with(&a, &b, &gens, &ctx.caps)? {
        HspVerdict::NotMember(c) => {
            report["verdict"] = json!("NO");
            counterexample_report(&mut report, &c, &b);
            Ok(Outcome::with_code(report, EXIT_NEGATIVE))
        }
        HspVerdict::Member(m) => {
            report["verdict"] = json!("YES");
            report["clone_members"] = json!(m.hom.len());
            match hspfin_certificate(&a, &b, &gens, &ctx.caps)? {
                CertificateOutcome::Certificate(cert) => certificate_report(&mut report, &cert, out)?,
                CertificateOutcome::NotMember(_) => bail!("membership and certificate construction disagree"),
            }
            Ok(Outcome::ok(report))
        }
    }
}

fn cmd_cert(ctx: &Ctx, a_path: &Path, b_path: &Path, gens: Option<&str>, out: Option<&Path>) -> Result<Outcome> {
    let (_, a) = load_algebra(a_path)?;
    let (_, b) = load_algebra(b_path)?;
    let gens = generators(gens, &b)?;
    let mut report = json!({"source": label(&a), "target": label(&b), "generators": gens});
    match hspfin_certificate(&a, &b, &gens, &ctx.caps)? {
        CertificateOutcome::Certificate(cert) => {
            report["verdict"] = json!("YES");
            certificate_report(&mut report, &cert, out)?;
            Ok(Outcome::ok(report))
        }
        CertificateOutcome::NotMember(c) => {
            report["verdict"] = json!("NO");
            counterexample_report(&mut report, &c, &b);
            Ok(Outcome::with_code(report, EXIT_NEGATIVE))
        }
    }
}

fn cmd_nat_hom(ctx: &Ctx, a_path: &Path, b_path: &Path, n: usize, tables: bool) -> Result<Outcome> {
    let (_, a) = load_algebra(a_path)?;
    let (_, b) = load_algebra(b_path)?;
    let mut report = json!({"source": label(&a), "target": label(&b), "arity": n});
    match natural_hom(&a, &b, n, &ctx.caps)? {
        NatHomOutcome::Counterexample(c) => {
            report["defined"] = json!(false);
            counterexample_report(&mut report, &c, &b);
            Ok(Outcome::with_code(report, EXIT_NEGATIVE))
        }
        NatHomOutcome::Hom(h) => {
            report["defined"] = json!(true);
            report["members"] = json!(h.len());
            report["laws"] = match h.check_laws() {
                Ok(()) => json!("hold"),
                Err(v) => json!(format!("violated: {v:?}")),
            };
            if tables {
                report["graph"] = Value::Array(
                    (0..h.len())
                        .map(|i| {
                            json!({
                                "term": print_term(&h.witnesses()[i], a.signature()),
                                "source": h.source_tables()[i],
                                "target": h.target_tables()[i],
                            })
                        })
                        .collect(),
                );
            }
            Ok(Outcome::ok(report))
        }
    }
}

fn cmd_uc(ctx: &Ctx, a_path: &Path, b_path: &Path, n: usize, support: &str) -> Result<Outcome> {
    let (_, a) = load_algebra(a_path)?;
    let (_, b) = load_algebra(b_path)?;
    let alpha = Entourage::new(n, parse_tuples(support)?, b.size())?;
    let mut report = json!({"source": label(&a), "target": label(&b), "arity": n, "target_support": alpha.support});
    match natural_hom(&a, &b, n, &ctx.caps)? {
        NatHomOutcome::Counterexample(c) => {
            report["defined"] = json!(false);
            counterexample_report(&mut report, &c, &b);
            Ok(Outcome::with_code(report, EXIT_NEGATIVE))
        }
        NatHomOutcome::Hom(h) => {
            let e = uc_witness(&h, &alpha)?;
            report["defined"] = json!(true);
            report["source_support"] = json!(e.support);
            report["violations"] = json!(usize::from(uc_violation(&h, &e.support, &alpha.support).is_some()));
            Ok(Outcome::ok(report))
        }
    }
}

fn cmd_verify(path: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = parse_certificate(&text).with_context(|| format!("in {}", path.display()))?;
    let rep = verify_certificate(&cert);
    let checks: Map<String, Value> = rep
        .checks
        .iter()
        .map(|c| (c.name.to_string(), json!(c.failure.clone().unwrap_or_else(|| "ok".into()))))
        .collect();
    let report = json!({"valid": rep.valid(), "checks": checks});
    Ok(Outcome::with_code(report, if rep.valid() { 0 } else { EXIT_NEGATIVE }))
}

fn cmd_orbits(ctx: &Ctx, path: &Path, n: usize, backend: Backend, list: bool) -> Result<Outcome> {
    let (bytes, g) = load_group(path)?;
    let part = ctx.orbit_partition(&bytes, &g, n, backend)?;
    let mut report = json!({
        "degree": g.degree(),
        "arity": n,
        "points": part.space_size(),
        "orbits": part.len(),
    });
    if list {
        report["representatives"] = json!(part
            .representatives()
            .iter()
            .map(|&p| index_tuple(p, g.degree(), n))
            .collect::<Vec<_>>());
    }
    Ok(Outcome::ok(report))
}

fn cmd_oligo(ctx: &Ctx, path: &Path, k: usize) -> Result<Outcome> {
    let (bytes, g) = load_group(path)?;
    let counts = (1..=k)
        .map(|n| Ok(ctx.orbit_partition(&bytes, &g, n, Backend::Bfs)?.len()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(json!({"degree": g.degree(), "max_arity": k, "counts": counts})))
}

fn cmd_probe(ctx: &Ctx, path: &Path) -> Result<Outcome> {
    let (_, g) = load_group(path)?;
    let schedule: Vec<usize> = (1..=ctx.cli.probe_depth).collect();
    let r = precompactness_probe(&g, &schedule, &ctx.caps)?;
    let levels: Vec<Value> = r
        .levels
        .iter()
        .map(|l| {
            json!({
                "depth": l.depth,
                "points": l.points,
                "orbits": l.orbits,
                "growth": l.growth.map(|x| format!("{x:.4}")),
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "degree": g.degree(),
        "levels": levels,
        "horizon": r.horizon,
        "summary": r.label(),
    })))
}

fn cmd_unary_group(ctx: &Ctx, path: &Path) -> Result<Outcome> {
    let (_, alg) = load_algebra(path)?;
    let u = unary_group(&alg, &ctx.caps)?;
    Ok(Outcome::ok(json!({
        "algebra": label(&alg),
        "unary_clone": u.unary_clone_size,
        "order": u.len(),
        "elements": tables_json(&u.elements),
        "axioms": u.axiom_violation().unwrap_or_else(|| "hold".into()),
    })))
}

fn cmd_alf(ctx: &Ctx, path: &Path, k: usize, samples: usize) -> Result<Outcome> {
    let (_, alg) = load_algebra(path)?;
    let caps = &ctx.caps;
    let r = alf_orbit_counts(&alg, k, samples, caps)?;
    let arities: Vec<Value> = r
        .arities
        .iter()
        .map(|a| json!({"arity": a.arity, "clone": a.clone_size, "orbits": a.orbits}))
        .collect();
    let subalgebras: Vec<Value> = r
        .subalgebras
        .iter()
        .map(|s| {
            json!({
                "power": s.power,
                "generators": s.generators,
                "size": s.subalgebra.len(),
                "orbits": s.orbit_count(),
                "bridge": s.bridge_holds,
            })
        })
        .collect();
    let local_samples: Vec<Vec<Elem>> = alg.elements().map(|a| vec![a]).collect();
    let local: Vec<Value> = locally_finite_check(&alg, &local_samples, caps)?
        .iter()
        .map(|s| {
            json!({
                "generators": s.generators,
                "subalgebra": s.subalgebra.len(),
                "clone_image": s.clone_image.len(),
                "agree": s.agrees(),
            })
        })
        .collect();
    let profiles: Vec<Value> = oligo_on_fg_subalgebras(&alg, k, caps)?
        .iter()
        .map(|p| json!({"generators": p.generators, "carrier": p.carrier, "profile": p.profile.counts}))
        .collect();
    Ok(Outcome::ok(json!({
        "algebra": label(&alg),
        "assumption": "finite carrier: each clone level is closed, so the closed unary clone is Clo_1",
        "group_order": r.group.len(),
        "group": tables_json(&r.group.elements),
        "clone_orbits": arities,
        "power_subalgebras": subalgebras,
        "local_finiteness": local,
        "subalgebra_profiles": profiles,
    })))
}
