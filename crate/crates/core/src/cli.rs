//! Configuration-driven front end: config parsing, subcommands, renderers.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::golden::{run_golden, Mutation};
use crate::lattice::CharVec;
use crate::rootsystem::{build_root_datum, DatumSpec, GaloisSpec, RootDatum};
use crate::sections::{
    char_section_verdict_with, character_verdict, flag_purity_report, printed_flag_condition,
    purity_report, section_cone_with, Ampleness, LatticeKind, NAlphaReading, PurityOptions,
    PurityReport, SectionCone,
};
use crate::strata::{
    coarse_poset, cross_label, fine_poset, hasse_diagram, zip_strata, Side, StrataPoset, Stratum,
};
use crate::subset::SimpleSet;
use crate::weyl::WeylElt;
use crate::zipdatum::{is_prime, zip_from_cochar, FlaggedZipDatum, TypeSpec, ZipDatum};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GroupConfig {
    Preset {
        preset: String,
        #[serde(default)]
        central_rank: usize,
    },
    Explicit {
        rank: usize,
        simple_roots: Vec<Vec<i64>>,
        simple_coroots: Vec<Vec<i64>>,
        #[serde(default)]
        cartan: Option<Vec<Vec<i64>>>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaloisConfig {
    /// 1-based images of the simple roots.
    pub perm: Vec<usize>,
    pub order: u32,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    #[serde(rename = "J")]
    pub j: SimpleSet,
    pub z: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LatticeSel {
    Torus,
    Levi,
    Levi0,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema: u32,
    pub group: GroupConfig,
    #[serde(default)]
    pub galois: Option<GaloisConfig>,
    pub p: u64,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(rename = "I", default)]
    pub i: Option<SimpleSet>,
    #[serde(default)]
    pub mu: Option<Vec<i64>>,
    /// Hand-built frame; requires `I`.
    #[serde(default)]
    pub frame: Option<FrameConfig>,
    #[serde(rename = "I0", default)]
    pub i0: Option<SimpleSet>,
    #[serde(default)]
    pub characters: Vec<Vec<i64>>,
    #[serde(default)]
    pub strata: Vec<String>,
    #[serde(default)]
    pub lattice: Option<LatticeSel>,
    #[serde(rename = "box", default)]
    pub box_radius: Option<i64>,
    #[serde(default)]
    pub primes: Vec<u64>,
    /// Types (sets I) to scan; defaults to the configured one.
    #[serde(default)]
    pub types: Vec<SimpleSet>,
}

fn default_n() -> u32 {
    1
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Library(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Library(e) => write!(f, "invalid datum: {e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn parse_config(text: &str) -> CliResult<Config> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: Config = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("at `{path}`: {}", e.into_inner()))
    })?;
    if cfg.schema != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "at `schema`: unsupported version {}",
            cfg.schema
        )));
    }
    Ok(cfg)
}

/// A config turned into library objects.
#[derive(Clone, Debug)]
pub struct Built {
    pub config: Config,
    pub zip: ZipDatum,
    pub flag: Option<FlaggedZipDatum>,
}

fn located<T>(path: &str, r: crate::error::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Config(format!("at `{path}`: {e}")))
}

pub fn build_root(cfg: &Config) -> CliResult<Arc<RootDatum>> {
    let galois = match &cfg.galois {
        None => None,
        Some(g) => {
            if g.perm.contains(&0) {
                return Err(CliError::Config(
                    "at `galois.perm`: indices are 1-based".into(),
                ));
            }
            Some(GaloisSpec {
                perm: g.perm.iter().map(|k| k - 1).collect(),
                order: g.order,
                matrix: g.matrix.clone(),
            })
        }
    };
    let spec = match &cfg.group {
        GroupConfig::Preset {
            preset,
            central_rank,
        } => DatumSpec::Preset {
            name: preset.clone(),
            central_rank: *central_rank,
            galois,
        },
        GroupConfig::Explicit {
            rank,
            simple_roots,
            simple_coroots,
            cartan,
        } => DatumSpec::Explicit {
            rank: *rank,
            simple_roots: simple_roots.clone(),
            simple_coroots: simple_coroots.clone(),
            cartan: cartan.clone(),
            galois,
        },
    };
    let path = if cfg.galois.is_some() {
        "galois"
    } else {
        "group"
    };
    Ok(Arc::new(located(path, build_root_datum(&spec))?))
}

fn build_zip(
    cfg: &Config,
    rd: Arc<RootDatum>,
    i: Option<SimpleSet>,
    p: u64,
) -> CliResult<ZipDatum> {
    if !is_prime(p) {
        return Err(CliError::Config(format!("at `p`: {}", Error::NotPrime(p))));
    }
    if cfg.n == 0 {
        return Err(CliError::Config(format!("at `n`: {}", Error::BadExponent)));
    }
    if let Some(f) = &cfg.frame {
        let i = i.ok_or_else(|| CliError::Config("at `I`: a hand-built frame needs I".into()))?;
        let z = located("frame.z", rd.parse_label(&f.z))?;
        return located("frame", ZipDatum::new(rd, cfg.n, p, i, f.j, z));
    }
    let ty = match (i, &cfg.mu) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "at `mu`: give either I or mu, not both".into(),
            ))
        }
        (Some(i), None) => TypeSpec::Subset(i),
        (None, Some(mu)) => TypeSpec::Cocharacter(crate::lattice::CocharVec(mu.clone())),
        (None, None) => {
            return Err(CliError::Config(
                "at `I`: one of I or mu is required".into(),
            ))
        }
    };
    let path = if cfg.mu.is_some() && i.is_none() {
        "mu"
    } else {
        "I"
    };
    located(path, zip_from_cochar(rd, &ty, cfg.n, p))
}

pub fn build(cfg: &Config) -> CliResult<Built> {
    let rd = build_root(cfg)?;
    let zip = build_zip(cfg, rd, cfg.i, cfg.p)?;
    let flag = match cfg.i0 {
        Some(i0) => Some(located("I0", zip.flag_datum(i0))?),
        None => None,
    };
    Ok(Built {
        config: cfg.clone(),
        zip,
        flag,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Describe,
    Strata,
    FlagStrata,
    CoarseStrata,
    Hasse,
    CharTest,
    NAlpha,
    Cone,
    Purity,
    Scan,
    Golden,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Describe => "describe",
            Command::Strata => "strata",
            Command::FlagStrata => "flag-strata",
            Command::CoarseStrata => "coarse-strata",
            Command::Hasse => "hasse",
            Command::CharTest => "char-test",
            Command::NAlpha => "n-alpha",
            Command::Cone => "cone",
            Command::Purity => "purity",
            Command::Scan => "scan",
            Command::Golden => "golden",
        }
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "zipstrata",
    version,
    about = "Strata, closure orders and purity tests for zip data"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub lattice: Option<LatticeSel>,
    #[arg(long = "box")]
    pub box_radius: Option<i64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Restrict to these stratum labels (repeatable).
    #[arg(long = "stratum")]
    pub strata: Vec<String>,
    /// Comma-separated primes for scan, overriding the config.
    #[arg(long, value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    #[arg(long, hide = true)]
    pub mutate: Option<String>,
}

/// Rendered output and exit status of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

fn parse_mutation(s: &str) -> CliResult<Mutation> {
    if s == "transposed-closure" {
        return Ok(Mutation::TransposedClosure);
    }
    let name = s.strip_prefix("reading=").unwrap_or(s);
    NAlphaReading::parse(name)
        .map(Mutation::Reading)
        .ok_or_else(|| CliError::Config(format!("unknown mutation `{s}`")))
}

fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn big_vec(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(big).collect())
}

fn stratum_json(rd: &RootDatum, s: &Stratum) -> Value {
    json!({
        "label": rd.label(&s.label),
        "length": s.length,
        "variety_dim": s.variety_dim,
        "stack_dim": s.stack_dim,
    })
}

fn poset_json(rd: &RootDatum, poset: &StrataPoset) -> Value {
    json!({
        "nodes": poset.strata.iter().map(|s| stratum_json(rd, s)).collect::<Vec<_>>(),
        "edges": poset.edges.iter()
            .map(|&(a, b)| json!([rd.label(&poset.strata[a].label), rd.label(&poset.strata[b].label)]))
            .collect::<Vec<_>>(),
    })
}

fn describe_datum(b: &Built) -> Value {
    let z = &b.zip;
    let rd = z.rd();
    let group = match &b.config.group {
        GroupConfig::Preset {
            preset,
            central_rank,
        } => json!({"preset": preset, "central_rank": central_rank}),
        GroupConfig::Explicit { .. } => json!({"explicit": true}),
    };
    let mut m = Map::new();
    m.insert("group".into(), group);
    m.insert("rank".into(), json!(rd.rank()));
    m.insert("semisimple_rank".into(), json!(rd.num_simple()));
    m.insert("galois_order".into(), json!(rd.galois_order()));
    m.insert("split".into(), json!(rd.is_split()));
    m.insert("p".into(), json!(z.p()));
    m.insert("n".into(), json!(z.n()));
    m.insert("q".into(), big(z.q()));
    m.insert("I".into(), json!(z.i()));
    m.insert("J".into(), json!(z.j()));
    m.insert("z".into(), json!(rd.label(z.z())));
    m.insert("dims".into(), json!(z.dims()));
    if let Some(f) = &b.flag {
        m.insert("I0".into(), json!(f.i0));
        m.insert("J0".into(), json!(f.j0));
        m.insert("flag_dims".into(), json!(f.dims()));
    }
    Value::Object(m)
}

fn bundle(cmd: Command, reading: NAlphaReading, datum: Option<Value>, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA_VERSION));
    m.insert(
        "tool".into(),
        json!({"name": "zipstrata", "version": env!("CARGO_PKG_VERSION")}),
    );
    m.insert("command".into(), json!(cmd.name()));
    m.insert("reading".into(), json!(reading.name()));
    if let Some(d) = datum {
        m.insert("datum".into(), d);
    }
    m.insert("result".into(), result);
    Value::Object(m)
}

fn ample_json(rd: &RootDatum, a: &Option<Ampleness>) -> Value {
    match a {
        None => Value::Null,
        Some(a) => json!({
            "ample": a.ample,
            "violations": a.violations.iter().map(|&k| rd.simple_roots()[k].0.clone()).collect::<Vec<_>>(),
        }),
    }
}

fn characters(cfg: &Config) -> CliResult<Vec<CharVec>> {
    if cfg.characters.is_empty() {
        return Err(CliError::Config(
            "at `characters`: at least one character is required".into(),
        ));
    }
    Ok(cfg.characters.iter().map(|c| CharVec(c.clone())).collect())
}

fn requested_labels(z: &ZipDatum, cli: &[String], cfg: &[String]) -> CliResult<Vec<WeylElt>> {
    let names: Vec<String> = if !cli.is_empty() {
        cli.to_vec()
    } else {
        cfg.to_vec()
    };
    if names.is_empty() {
        return Ok(zip_strata(z, Side::I)
            .into_iter()
            .map(|s| s.label)
            .collect());
    }
    names
        .iter()
        .map(|t| {
            z.rd()
                .parse_label(t)
                .map_err(|e| CliError::Config(format!("at `strata`: {e}")))
        })
        .collect()
}

fn cone_json(rd: &RootDatum, c: &SectionCone) -> Value {
    json!({
        "label": rd.label(&c.label),
        "lattice": match c.lattice { LatticeKind::Torus => "torus", LatticeKind::Levi => "levi" },
        "lattice_basis": c.basis.iter().map(|b| big_vec(b)).collect::<Vec<_>>(),
        "inequalities": c.forms.iter().map(|f| json!({
            "root": rd.root(f.root).vector.0.clone(),
            "coefficients": big_vec(&f.coeffs),
        })).collect::<Vec<_>>(),
        "feasible": c.feasible,
        "witness": c.witness.as_ref().map(|w| w.0.clone()),
        "certificate": c.certificate.as_ref().map(|y| big_vec(y)),
    })
}

fn purity_json(rd: &RootDatum, r: &PurityReport) -> Value {
    json!({
        "lattice": match r.lattice { LatticeKind::Torus => "torus", LatticeKind::Levi => "levi" },
        "principal": r.principal,
        "uniform": r.uniform,
        "first_failure": r.first_failure().map(|c| rd.label(&c.label)),
        "uniform_witness": r.uniform_witness.as_ref().map(|w| w.0.clone()),
        "uniform_certificate": r.uniform_certificate.as_ref().map(|y| big_vec(y)),
        "ample_close_character": r.ample_close.as_ref().map(|w| w.0.clone()),
        "theorem_consistent": r.theorem_consistent,
        "strata": r.cones.iter().map(|c| json!({
            "label": rd.label(&c.label),
            "feasible": c.feasible,
            "witness": c.witness.as_ref().map(|w| w.0.clone()),
        })).collect::<Vec<_>>(),
    })
}

/// Result of a subcommand before rendering.
pub struct Report {
    pub value: Value,
    pub poset: Option<(Vec<String>, Vec<(usize, usize)>)>,
    pub code: i32,
}

fn need_flag(b: &Built) -> CliResult<&FlaggedZipDatum> {
    b.flag
        .as_ref()
        .ok_or_else(|| CliError::Config("at `I0`: this command needs a flag type I0".into()))
}

fn labels_and_edges(rd: &RootDatum, poset: &StrataPoset) -> (Vec<String>, Vec<(usize, usize)>) {
    (
        poset.strata.iter().map(|s| rd.label(&s.label)).collect(),
        poset.edges.clone(),
    )
}

pub fn cmd_compute(
    b: &Built,
    cmd: Command,
    args: &Args,
    reading: NAlphaReading,
) -> CliResult<Report> {
    let z = &b.zip;
    let rd = z.rd();
    let cfg = &b.config;
    let lattice = args.lattice.or(cfg.lattice).unwrap_or(LatticeSel::Levi);
    let box_radius = args.box_radius.or(cfg.box_radius).unwrap_or(2);
    let mut poset = None;
    let mut code = 0;
    let result = match cmd {
        Command::Describe => json!({
            "strata_count": zip_strata(z, Side::I).len(),
            "frame_violations": z.validate_frame().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        }),
        Command::Strata => {
            let rows: Vec<Value> = zip_strata(z, Side::I)
                .iter()
                .map(|s| {
                    let mut v = stratum_json(rd, s);
                    v["cross_label"] = cross_label(z, &s.label)
                        .map(|x| json!(rd.label(&x)))
                        .unwrap_or(Value::Null);
                    v
                })
                .collect();
            json!({"count": rows.len(), "strata": rows})
        }
        Command::Hasse => {
            let p = hasse_diagram(z);
            poset = Some(labels_and_edges(rd, &p));
            poset_json(rd, &p)
        }
        Command::FlagStrata => {
            let fz = need_flag(b)?;
            let p = fine_poset(fz);
            poset = Some(labels_and_edges(rd, &p));
            poset_json(rd, &p)
        }
        Command::CoarseStrata => {
            let fz = need_flag(b)?;
            let (strata, _, edges) = coarse_poset(fz);
            poset = Some((
                strata.iter().map(|s| rd.label(&s.label)).collect(),
                edges.clone(),
            ));
            json!({
                "nodes": strata.iter().map(|s| json!({
                    "label": rd.label(&s.label),
                    "I_w": s.i_w,
                    "length": s.length,
                    "paper_dim": s.paper_dim,
                    "derived_dim": s.derived_dim,
                })).collect::<Vec<_>>(),
                "edges": edges.iter()
                    .map(|&(a, c)| json!([rd.label(&strata[a].label), rd.label(&strata[c].label)]))
                    .collect::<Vec<_>>(),
            })
        }
        Command::CharTest => {
            let mut rows = Vec::new();
            for chi in characters(cfg)? {
                let v = character_verdict(z, b.flag.as_ref(), &chi)?;
                let root = |k: Option<usize>| k.map(|k| rd.root(k).vector.0.clone());
                rows.push(json!({
                    "chi": chi.0,
                    "q_small": v.tests.q_small,
                    "q_small_witness": root(v.tests.q_small_witness),
                    "orbitally_q_close": v.tests.orbitally_q_close,
                    "q_close_witness": v.tests.close_witness.map(|(a, c)| json!([rd.root(a).vector.0.clone(), rd.root(c).vector.0.clone()])),
                    "zip_ample": ample_json(rd, &v.zip_ample),
                    "flag_ample": ample_json(rd, &v.flag_ample),
                    "printed_flag_condition": b.flag.as_ref().and_then(|f| printed_flag_condition(f, &chi).ok()),
                }));
            }
            json!({"characters": rows})
        }
        Command::NAlpha => {
            let chis = characters(cfg)?;
            let labels = requested_labels(z, &args.strata, &cfg.strata)?;
            let mut rows = Vec::new();
            for w in &labels {
                for chi in &chis {
                    let v = char_section_verdict_with(z, w, chi, reading)?;
                    rows.push(json!({
                        "label": rd.label(w),
                        "chi": chi.0,
                        "multiplicities": v.multiplicities.iter().map(|(k, x)| json!({
                            "root": rd.root(*k).vector.0.clone(),
                            "n": big(x),
                        })).collect::<Vec<_>>(),
                        "verdict": v.verdict,
                        "r_w": v.r_w,
                        "m": v.m,
                    }));
                }
            }
            json!({"sections": rows})
        }
        Command::Cone => {
            let (target, kind) = match lattice {
                LatticeSel::Torus => (z, LatticeKind::Torus),
                LatticeSel::Levi => (z, LatticeKind::Levi),
                LatticeSel::Levi0 => (&need_flag(b)?.z0, LatticeKind::Levi),
            };
            let labels = requested_labels(target, &args.strata, &cfg.strata)?;
            let hints: Vec<CharVec> = cfg.characters.iter().map(|c| CharVec(c.clone())).collect();
            let cones: Vec<SectionCone> = labels
                .iter()
                .map(|w| section_cone_with(target, w, kind, &hints, reading))
                .collect::<crate::error::Result<_>>()?;
            if cones.iter().any(|c| !c.feasible) {
                code = 3;
            }
            json!({"cones": cones.iter().map(|c| cone_json(rd, c)).collect::<Vec<_>>()})
        }
        Command::Purity => {
            let hints: Vec<CharVec> = cfg.characters.iter().map(|c| CharVec(c.clone())).collect();
            let base = PurityOptions {
                box_radius,
                hints,
                reading: Some(reading),
                ..Default::default()
            };
            let rep = match lattice {
                LatticeSel::Torus => purity_report(
                    z,
                    &PurityOptions {
                        lattice: LatticeKind::Torus,
                        ..base
                    },
                )?,
                LatticeSel::Levi => purity_report(z, &base)?,
                LatticeSel::Levi0 => flag_purity_report(need_flag(b)?, &base)?,
            };
            purity_json(rd, &rep)
        }
        Command::Scan | Command::Golden => unreachable!("handled by run"),
    };
    Ok(Report {
        value: bundle(cmd, reading, Some(describe_datum(b)), result),
        poset,
        code,
    })
}

/// Purity over (type, prime) cells; cells run on `workers` threads and keep input order.
pub fn cmd_scan(
    cfg: &Config,
    primes: &[u64],
    args: &Args,
    reading: NAlphaReading,
) -> CliResult<Value> {
    let rd = build_root(cfg)?;
    let types: Vec<Option<SimpleSet>> = if cfg.types.is_empty() {
        vec![cfg.i]
    } else {
        cfg.types.iter().copied().map(Some).collect()
    };
    let cells: Vec<(Option<SimpleSet>, u64)> = types
        .iter()
        .flat_map(|&t| primes.iter().map(move |&p| (t, p)))
        .collect();
    let lattice = args.lattice.or(cfg.lattice).unwrap_or(LatticeSel::Levi);
    let box_radius = args.box_radius.or(cfg.box_radius).unwrap_or(2);
    let hints: Vec<CharVec> = cfg.characters.iter().map(|c| CharVec(c.clone())).collect();
    let run_cell = |&(t, p): &(Option<SimpleSet>, u64)| -> Value {
        let res = (|| -> CliResult<Value> {
            let z = build_zip(cfg, rd.clone(), t, p)?;
            let opts = PurityOptions {
                box_radius,
                hints: hints.clone(),
                reading: Some(reading),
                ..Default::default()
            };
            let rep = match lattice {
                LatticeSel::Torus => purity_report(
                    &z,
                    &PurityOptions {
                        lattice: LatticeKind::Torus,
                        ..opts
                    },
                )?,
                LatticeSel::Levi => purity_report(&z, &opts)?,
                LatticeSel::Levi0 => {
                    let i0 = cfg
                        .i0
                        .ok_or_else(|| CliError::Config("at `I0`: levi0 needs I0".into()))?;
                    flag_purity_report(&located("I0", z.flag_datum(i0))?, &opts)?
                }
            };
            Ok(json!({
                "principal": rep.principal,
                "uniform": rep.uniform,
                "first_failure": rep.first_failure().map(|c| rd.label(&c.label)),
                "uniform_witness": rep.uniform_witness.as_ref().map(|w| w.0.clone()),
            }))
        })();
        let mut v = match res {
            Ok(v) => v,
            Err(e) => json!({"error": e.to_string()}),
        };
        v["p"] = json!(p);
        v["I"] = json!(t);
        v
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.max(1))
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let rows: Vec<Value> = pool.install(|| cells.par_iter().map(run_cell).collect());
    let mut first_uniform = Map::new();
    for t in &types {
        let key = t.map_or_else(|| "mu".to_string(), |s| s.to_string());
        let first = rows
            .iter()
            .find(|r| r["I"] == json!(t) && r["uniform"] == json!(true))
            .map(|r| r["p"].clone())
            .unwrap_or(Value::Null);
        first_uniform.insert(key, first);
    }
    Ok(json!({"cells": rows, "first_uniform_prime": first_uniform}))
}

pub fn render_dot(labels: &[String], edges: &[(usize, usize)]) -> String {
    let mut s = String::from("digraph strata {\n  rankdir=BT;\n");
    for (k, l) in labels.iter().enumerate() {
        s.push_str(&format!("  n{k} [label=\"{}\"];\n", l.replace('"', "\\\"")));
    }
    for (a, b) in edges {
        s.push_str(&format!("  n{a} -> n{b};\n"));
    }
    s.push_str("}\n");
    s
}

fn text_into(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) | Value::Array(_) if !is_flat(x) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text_into(out, x, indent + 1);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", scalar(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    text_into(out, x, indent + 1);
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a
            .iter()
            .all(|x| !x.is_object() && !x.is_array() || x.is_array() && is_flat(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

pub fn render_text(v: &Value) -> String {
    let mut s = String::new();
    text_into(&mut s, v, 0);
    s
}

fn render(
    v: &Value,
    format: Format,
    poset: Option<&(Vec<String>, Vec<(usize, usize)>)>,
) -> CliResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(v).expect("values serialize") + "\n"),
        Format::Text => Ok(render_text(v)),
        Format::Dot => poset.map(|(l, e)| render_dot(l, e)).ok_or_else(|| {
            CliError::Config(
                "dot output is available for hasse, flag-strata and coarse-strata".into(),
            )
        }),
    }
}

fn load_config(args: &Args) -> CliResult<Config> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Runs one invocation; never panics on bad input.
pub fn run(args: &Args) -> CliResult<Outcome> {
    let mutation = args.mutate.as_deref().map(parse_mutation).transpose()?;
    let reading = match mutation {
        Some(Mutation::Reading(r)) => r,
        _ => crate::sections::calibrated_reading(),
    };
    let (value, poset, code) = match args.command {
        Command::Golden => {
            let rep = run_golden(mutation)?;
            let checks: Vec<Value> = rep
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "pass": c.pass,
                        "expected": c.diff.as_ref().map(|d| d.0.clone()),
                        "actual": c.diff.as_ref().map(|d| d.1.clone()),
                    })
                })
                .collect();
            let v = bundle(
                Command::Golden,
                rep.reading,
                None,
                json!({"pass": rep.pass(), "checks": checks}),
            );
            (v, None, if rep.pass() { 0 } else { 1 })
        }
        Command::Scan => {
            let cfg = load_config(args)?;
            let primes = args.primes.clone().unwrap_or_else(|| cfg.primes.clone());
            let v = cmd_scan(&cfg, &primes, args, reading)?;
            (bundle(Command::Scan, reading, None, v), None, 0)
        }
        cmd => {
            let cfg = load_config(args)?;
            let b = build(&cfg)?;
            let r = cmd_compute(&b, cmd, args, reading)?;
            (r.value, r.poset, r.code)
        }
    };
    let output = render(&value, args.format, poset.as_ref())?;
    Ok(Outcome { output, code })
}

/// Entry point shared by the binary: parses arguments, writes output, returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&args) {
        Ok(o) => {
            let written = match &args.out {
                Some(p) => {
                    std::fs::write(p, &o.output).map_err(|e| format!("{}: {e}", p.display()))
                }
                None => {
                    print!("{}", o.output);
                    Ok(())
                }
            };
            match written {
                Ok(()) => o.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
