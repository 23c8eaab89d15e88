//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dnssec::{
    nsec3_hash_text, sign_zone, KeyPair, KeyRole, Nsec3Params, SignedZone, SigningOptions, DEFAULT_CLOCK,
};
use crate::glue::{allowed_glue, compute_minimum_glue, GluePolicy};
use crate::master::{read_corpus, read_zone_file, serialize_zone, FileError};
use crate::message::DnsMessage;
use crate::name::DomainName;
use crate::rr::RecordType;
use crate::scan::{
    audit_corpus, check_convertibility, forge_delegation_to_nxdomain, forge_nxdomain_to_delegation,
    forge_positive_to_delegation, ForgeContext, ForgeError, QueryOracle, RogueDelegation, SignedCorpus,
    SigningManifest, ZoneOracle,
};
use crate::sim::{run_scenario, Scenario};

pub const DEFAULT_SEED: u64 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const INPUT_ERROR: i32 = 1;
    pub const ABSENT_REQUIRED_GLUE: i32 = 2;
    pub const FORGEABLE: i32 = 3;
    pub const EXPECTATION_MISMATCH: i32 = 4;
    pub const PRECONDITION_UNMET: i32 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "dnsglue",
    version,
    about = "DNS glue analysis, resolver simulation and NSEC3 Opt-Out forgery"
)]
pub struct CliConfig {
    /// Output format; defaults to text on a terminal and JSON otherwise.
    #[arg(long, global = true, env = "DNSGLUE_FORMAT", value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimum glue, cycles and consistency for a set of zone files.
    Analyze(AnalyzeArgs),
    /// Glue audit over a corpus with a signing manifest.
    Scan(ScanArgs),
    /// Run a resolver scenario.
    Simulate(SimulateArgs),
    /// Print the NSEC3 hash of a name.
    #[command(name = "nsec3-hash")]
    Nsec3Hash(HashArgs),
    /// Transform an honest response from a signed zone.
    Forge(ForgeArgs),
    /// Sign a zone with keys derived from the seed.
    Sign(SignArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Narrow,
    Moderate,
    Mandatory,
}

impl From<PolicyArg> for GluePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Narrow => GluePolicy::Narrow,
            PolicyArg::Moderate => GluePolicy::Moderate,
            PolicyArg::Mandatory => GluePolicy::Mandatory,
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Drop every glue record before analysis.
    #[arg(long)]
    pub strip_glue: bool,
    /// Also list the glue each zone may carry under this policy.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Zone files or directories of `*.zone` files.
    pub paths: Vec<PathBuf>,
    /// Signing manifest; a `manifest.json` inside a directory argument is used otherwise.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub fail_on_forgeable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Poisoned,
    Clean,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub expect: Option<Expectation>,
    /// Also write the trace as JSON lines to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HashArgs {
    pub name: String,
    #[arg(long, default_value = "")]
    pub salt: String,
    #[arg(long, default_value_t = 0)]
    pub iterations: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ForgeKind {
    Pos2del,
    Nxd2del,
    Del2nxd,
}

#[derive(Debug, Args)]
pub struct ForgeArgs {
    #[arg(value_enum)]
    pub kind: ForgeKind,
    /// Signed zone file, or an unsigned one to be signed with the seed.
    pub zone: PathBuf,
    pub victim: String,
    pub rogue_address: Ipv4Addr,
    /// Wire-format output; a `.txt` rendering is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SignArgs {
    pub zone: PathBuf,
    /// Child zones that are signed too; DS records are added for them.
    #[arg(long = "ds-child")]
    pub ds_children: Vec<String>,
    #[arg(long)]
    pub no_opt_out: bool,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl std::fmt::Display) -> Self {
        CliError {
            code: exit::INPUT_ERROR,
            message: message.to_string(),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        CliError::input(e)
    }
}

struct Ctx<'a> {
    format: Format,
    seed: u64,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, text: &str) -> Result<(), CliError> {
        self.out.write_all(text.as_bytes()).map_err(CliError::input)
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value).map_err(CliError::input)?;
        s.push('\n');
        self.emit(&s)
    }
}

fn parse_name(text: &str) -> Result<DomainName, CliError> {
    DomainName::parse_relative(text, &DomainName::root())
        .map_err(|e| CliError::input(format!("bad name {text:?}: {e}")))
}

/// Runs the command line in `args` (including the program name), writing
/// reports to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::INPUT_ERROR
            } else {
                exit::SUCCESS
            };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    let format = config.format.unwrap_or(if std::io::stdout().is_terminal() {
        Format::Text
    } else {
        Format::Json
    });
    let mut buffer = Vec::new();
    let result = {
        let mut ctx = Ctx {
            format,
            seed: config.seed,
            out: if config.output.is_some() { &mut buffer } else { out },
        };
        dispatch(&config, &mut ctx, err)
    };
    if let Some(path) = &config.output {
        if let Err(e) = std::fs::write(path, &buffer) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return exit::INPUT_ERROR;
        }
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(config: &CliConfig, ctx: &mut Ctx<'_>, err: &mut dyn Write) -> Result<i32, CliError> {
    match &config.command {
        Command::Analyze(a) => cmd_analyze(a, ctx),
        Command::Scan(a) => cmd_scan(a, ctx),
        Command::Simulate(a) => cmd_simulate(a, ctx, config.verbose, err),
        Command::Nsec3Hash(a) => cmd_nsec3_hash(a, ctx),
        Command::Forge(a) => cmd_forge(a, ctx),
        Command::Sign(a) => cmd_sign(a, ctx),
    }
}

#[derive(Serialize)]
struct AnalyzeOutput<'a> {
    report: &'a crate::glue::MinimumGlueReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    allowed: Option<BTreeMap<String, Vec<usize>>>,
}

fn cmd_analyze(args: &AnalyzeArgs, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    let mut corpus = read_corpus(&args.files)?;
    if args.strip_glue {
        corpus = corpus.without_glue();
    }
    let report = compute_minimum_glue(&corpus);
    let allowed = args.policy.map(|p| {
        corpus
            .zones()
            .map(|z| {
                (
                    z.apex().to_string(),
                    allowed_glue(z, p.into()).into_iter().map(|i| i + 1).collect(),
                )
            })
            .collect::<BTreeMap<String, Vec<usize>>>()
    });
    match ctx.format {
        Format::Json => ctx.emit_json(&AnalyzeOutput {
            report: &report,
            allowed: allowed.clone(),
        })?,
        Format::Text => {
            let mut text = report.render_text();
            if let (Some(p), Some(allowed)) = (args.policy, &allowed) {
                text.push_str(&format!("allowed glue ({p:?}):\n"));
                for (zone, lines) in allowed {
                    let lines: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
                    text.push_str(&format!("  {zone} {}\n", lines.join(",")));
                }
            }
            ctx.emit(&text)?;
        }
    }
    Ok(if report.absent_required.is_empty() {
        exit::SUCCESS
    } else {
        exit::ABSENT_REQUIRED_GLUE
    })
}

fn zone_files(paths: &[PathBuf]) -> Result<(Vec<PathBuf>, Option<PathBuf>), CliError> {
    let mut files = Vec::new();
    let mut manifest = None;
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "zone"))
                .collect();
            found.sort();
            files.extend(found);
            let m = p.join(MANIFEST_FILE);
            if manifest.is_none() && m.is_file() {
                manifest = Some(m);
            }
        } else {
            files.push(p.clone());
        }
    }
    Ok((files, manifest))
}

fn cmd_scan(args: &ScanArgs, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    let (files, found_manifest) = zone_files(&args.paths)?;
    let corpus = read_corpus(&files)?;
    let manifest = match args.manifest.as_ref().or(found_manifest.as_ref()) {
        Some(p) => SigningManifest::load(p).map_err(CliError::input)?,
        None => SigningManifest::default(),
    };
    let sc = SignedCorpus::from_manifest(&corpus, &manifest).map_err(CliError::input)?;
    let report = audit_corpus(&sc);
    match ctx.format {
        Format::Json => ctx.emit_json(&report)?,
        Format::Text => ctx.emit(&report.render_text())?,
    }
    Ok(if args.fail_on_forgeable && report.any_zone_forgeable() {
        exit::FORGEABLE
    } else {
        exit::SUCCESS
    })
}

fn cmd_simulate(args: &SimulateArgs, ctx: &mut Ctx<'_>, verbose: u8, err: &mut dyn Write) -> Result<i32, CliError> {
    let mut scenario = Scenario::load(&args.scenario).map_err(CliError::input)?;
    if ctx.seed != DEFAULT_SEED {
        scenario.seed = ctx.seed;
    }
    let verdict = run_scenario(&scenario).map_err(CliError::input)?;
    let lines = verdict.trace.to_json_lines();
    if let Some(path) = &args.trace {
        std::fs::write(path, &lines).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    }
    if verbose > 0 {
        let _ = writeln!(err, "{} steps", verdict.trace.len());
    }
    match ctx.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                verdict: &'a crate::sim::Verdict,
                trace: &'a crate::sim::ResolutionTrace,
            }
            ctx.emit_json(&Out {
                verdict: &verdict,
                trace: &verdict.trace,
            })?;
        }
        Format::Text => {
            ctx.emit(&lines)?;
            ctx.emit(&format!("{}\n", verdict.summary_line()))?;
        }
    }
    let expected = args.expect.map(|e| e == Expectation::Poisoned);
    Ok(match expected {
        Some(p) if p != verdict.poisoned => exit::EXPECTATION_MISMATCH,
        _ => exit::SUCCESS,
    })
}

fn cmd_nsec3_hash(args: &HashArgs, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    let salt = if args.salt.is_empty() || args.salt == "-" {
        Vec::new()
    } else {
        hex::decode(&args.salt).map_err(|e| CliError::input(format!("bad salt {:?}: {e}", args.salt)))?
    };
    let name = parse_name(&args.name)?;
    let hash = nsec3_hash_text(&name, &Nsec3Params::new(args.iterations, salt)).map_err(CliError::input)?;
    match ctx.format {
        Format::Json => ctx.emit_json(&serde_json::json!({ "name": name.to_string(), "hash": hash }))?,
        Format::Text => ctx.emit(&format!("{hash}\n"))?,
    }
    Ok(exit::SUCCESS)
}

/// Signs `zone` with seed-derived keys; `ds_children` name signed children.
pub fn sign_with_seed(
    zone: &crate::zone::Zone,
    ds_children: &[DomainName],
    opt_out: bool,
    seed: u64,
) -> Result<SignedZone, CliError> {
    let apex = zone.apex();
    let children = ds_children
        .iter()
        .map(|c| (c.clone(), KeyPair::derive(c, KeyRole::Ksk, seed).dnskey()))
        .collect();
    sign_zone(
        zone,
        &KeyPair::derive(apex, KeyRole::Ksk, seed),
        &KeyPair::derive(apex, KeyRole::Zsk, seed),
        &children,
        &SigningOptions {
            opt_out,
            ..SigningOptions::default()
        },
    )
    .map_err(CliError::input)
}

fn cmd_sign(args: &SignArgs, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    let zone = read_zone_file(&args.zone)?;
    let children = args
        .ds_children
        .iter()
        .map(|c| parse_name(c))
        .collect::<Result<Vec<_>, _>>()?;
    let sz = sign_with_seed(&zone, &children, !args.no_opt_out, ctx.seed)?;
    match ctx.format {
        Format::Json => ctx.emit_json(&serde_json::json!({
            "zone": sz.apex().to_string(),
            "records": sz.zone.records().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        }))?,
        Format::Text => ctx.emit(&serialize_zone(&sz.zone))?,
    }
    Ok(exit::SUCCESS)
}

/// The inception time of a signed zone's signatures, used as the
/// validation clock for forged output.
fn signing_clock(sz: &SignedZone) -> u32 {
    sz.zone
        .records()
        .iter()
        .find_map(|rr| match &rr.rdata {
            crate::rr::RData::RRSIG(s) => Some(s.inception),
            _ => None,
        })
        .unwrap_or(DEFAULT_CLOCK)
        .saturating_add(3600)
}

fn load_signed(path: &Path, seed: u64) -> Result<SignedZone, CliError> {
    let zone = read_zone_file(path)?;
    match SignedZone::from_zone(&zone) {
        Some(sz) => Ok(sz),
        None => sign_with_seed(&zone, &[], true, seed),
    }
}

fn cmd_forge(args: &ForgeArgs, ctx: &mut Ctx<'_>) -> Result<i32, CliError> {
    let sz = load_signed(&args.zone, ctx.seed)?;
    let victim = parse_name(&args.victim)?;
    let fctx = ForgeContext::for_zone(&sz, signing_clock(&sz));
    let mut oracle = ZoneOracle::new(&sz.zone);
    let forged = match args.kind {
        ForgeKind::Pos2del => {
            let conv = match check_convertibility(&sz, &victim, &mut oracle) {
                Ok(c) => c,
                Err(e @ crate::scan::ConvertError::Oracle(_)) => return Err(CliError::input(e)),
                Err(e) => {
                    return Err(CliError {
                        code: exit::PRECONDITION_UNMET,
                        message: e.to_string(),
                    })
                }
            };
            let Some(cut) = conv.witness_suffix.clone() else {
                return Err(CliError {
                    code: exit::PRECONDITION_UNMET,
                    message: format!("{victim} is inconvertible"),
                });
            };
            forge_positive_to_delegation(&conv, &RogueDelegation::under(&cut, 1, args.rogue_address))
        }
        ForgeKind::Nxd2del => {
            let honest = oracle.query(&victim, RecordType::A).map_err(CliError::input)?;
            let cut = next_closer(&sz, &victim).ok_or_else(|| CliError {
                code: exit::PRECONDITION_UNMET,
                message: format!("{victim} has no next-closer name in {}", sz.apex()),
            })?;
            forge_nxdomain_to_delegation(&honest, &RogueDelegation::under(&cut, 2, args.rogue_address), &fctx)
        }
        ForgeKind::Del2nxd => {
            let honest = oracle.query(&victim, RecordType::A).map_err(CliError::input)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            forge_delegation_to_nxdomain(&honest, &mut oracle, &fctx, &mut rng)
        }
    };
    let forged = forged.map_err(|e| match e {
        ForgeError::Oracle(_) => CliError::input(e),
        e => CliError {
            code: exit::PRECONDITION_UNMET,
            message: e.to_string(),
        },
    })?;
    write_forged(&forged, args.out.as_deref(), ctx)?;
    Ok(exit::SUCCESS)
}

/// The name one label below the closest existing ancestor of `name`.
fn next_closer(sz: &SignedZone, name: &DomainName) -> Option<DomainName> {
    let mut nc = name.clone();
    for ancestor in name.ancestors().skip(1) {
        if !ancestor.is_subdomain_of(sz.apex()) {
            return None;
        }
        if ancestor == *sz.apex() || crate::authority::name_exists(&sz.zone, &ancestor) {
            return Some(nc);
        }
        nc = ancestor;
    }
    None
}

fn write_forged(msg: &DnsMessage, out: Option<&Path>, ctx: &mut Ctx<'_>) -> Result<(), CliError> {
    let wire = msg.encode();
    let text = msg.to_string();
    if let Some(path) = out {
        std::fs::write(path, &wire).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut txt = path.as_os_str().to_owned();
        txt.push(".txt");
        std::fs::write(PathBuf::from(txt), &text).map_err(CliError::input)?;
    }
    match ctx.format {
        Format::Json => ctx.emit_json(&serde_json::json!({ "wire": hex::encode(&wire), "text": text })),
        Format::Text => ctx.emit(&text),
    }
}
