//! `ibrs` — command-line access to generalized preferential structures:
//! minimal elements, valid arrows, smoothness checks, the representation
//! constructions, property/implication verification, the propositional
//! bridge, labeled-system interpretation and circuit simulation.
//!
//! Reports are JSON by default (`--pretty` for tables) and embed the tool
//! version, input hashes and every resolved default. Exit codes: 0 success,
//! 1 failed verdict, 2 input error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ibrs::circuit::{self, Classification, Netlist};
use ibrs::interp::{self, LabeledIbrs};
use ibrs::logic::{self, ConsequenceSource, Language, RuleId};
use ibrs::model::{point_set, PointSet, Structure};
use ibrs::properties::{
    check_property, verify_implication, PropertyId, VerifyMode, ALL_PROPERTIES,
};
use ibrs::represent::{build_level2_attacking, build_level3_essentially_smooth};
use ibrs::search::{search_level2_totally_smooth, SearchBounds, SearchConfig, SearchOutcome};
use ibrs::smoothness::{
    is_classically_smooth, is_essentially_smooth, is_sqsubseteq, is_totally_smooth,
    SmoothnessVerdict,
};
use ibrs::table::{set_key, MuTable};
use ibrs::validity::{mu, mu_attacking, valid_x_impl_y, valid_x_to_y};

#[derive(Parser)]
#[command(name = "ibrs", version, about = "generalized preferential structures at desk scale")]
struct Cli {
    /// Human-readable output instead of a JSON report
    #[arg(long, global = true)]
    pretty: bool,
    /// Seed for sampled modes
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads for partitionable searches
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal elements μ(X) of a structure
    Mu(MuArgs),
    /// Valid arrows for an X-to-Y or X⇒Y scope
    Valid(ValidArgs),
    /// Smoothness checks (total, essential, classical, ⊑)
    Smooth(SmoothArgs),
    /// Run a representation construction on a table
    Represent(RepresentArgs),
    /// Bounded search for a level-2 totally smooth representation
    #[command(name = "search-l2ts")]
    SearchL2ts(SearchArgs),
    /// Algebraic properties of a table
    Props(PropsArgs),
    /// Verify one implication row by brute force
    #[command(name = "verify-row")]
    VerifyRow(VerifyRowArgs),
    /// Consequence queries over a structure on valuations
    Logic(LogicArgs),
    /// Which consequence rules hold for a structure
    Rules(RulesArgs),
    /// Interpretation algorithms over a labeled system
    Interp(InterpArgs),
    /// Simulate a gate network or decide a diagram consequence
    Circuit(CircuitArgs),
    /// Emit a named fixture
    Fixtures(FixturesArgs),
}

#[derive(Args)]
struct MuArgs {
    #[arg(long)]
    structure: PathBuf,
    /// Comma-separated point names
    #[arg(long)]
    set: String,
    /// Evaluate relative to the η column of this table instead of plain μ
    #[arg(long)]
    eta_table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidKind {
    Xy,
    Ximply,
}

#[derive(Args)]
struct ValidArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, value_enum)]
    kind: ValidKind,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothMode {
    Total,
    Essential,
    Classical,
    Sub,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long, value_enum)]
    mode: SmoothMode,
    #[arg(long)]
    set: Option<String>,
    /// Second set for `sub` (checks set ⊑ set2)
    #[arg(long)]
    set2: Option<String>,
    /// Semicolon-separated family for `classical`, e.g. "a;a,b"
    #[arg(long)]
    family: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepresentMode {
    Level2,
    Level3,
}

#[derive(Args)]
struct RepresentArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long, value_enum)]
    mode: RepresentMode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long, default_value_t = 2)]
    max_copies: u32,
    #[arg(long, default_value_t = 1)]
    max_arrow_copies: usize,
    #[arg(long, default_value_t = 10_000_000)]
    ceiling: u64,
    /// Search for any representing structure, not only totally smooth ones
    #[arg(long)]
    no_total_smooth: bool,
}

#[derive(Args)]
struct PropsArgs {
    #[arg(long)]
    table: PathBuf,
    /// One property (e.g. muPR); all of them when omitted
    #[arg(long)]
    property: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RowMode {
    Exhaustive,
    Filtered,
    Sampled,
}

#[derive(Args)]
struct VerifyRowArgs {
    #[arg(long)]
    row: String,
    #[arg(long, default_value_t = 2)]
    size: usize,
    #[arg(long, value_enum, default_value_t = RowMode::Exhaustive)]
    mode: RowMode,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args)]
struct LogicArgs {
    #[arg(long)]
    structure: PathBuf,
    /// Comma-separated atoms, e.g. p,q
    #[arg(long)]
    lang: String,
    /// Theory: semicolon-separated formulas
    #[arg(long, default_value = "")]
    theory: String,
    /// Formula to test for membership in the consequence
    #[arg(long)]
    query: Option<String>,
}

#[derive(Args)]
struct RulesArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    lang: String,
    /// One rule (e.g. SC); all of them when omitted
    #[arg(long)]
    rule: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    Modal,
    Nm,
    Arg,
    Int,
    Cf,
}

#[derive(Args)]
struct InterpArgs {
    /// Built-in fixture name ("paper" for the worked example)
    #[arg(long, conflicts_with = "ibrs")]
    fixture: Option<String>,
    /// Labeled-system JSON file
    #[arg(long)]
    ibrs: Option<PathBuf>,
    #[arg(long, value_enum)]
    alg: Alg,
    #[arg(long)]
    world: Option<String>,
    #[arg(long)]
    atom: Option<String>,
    #[arg(long)]
    premise: Option<String>,
    #[arg(long)]
    conclusion: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    /// JSON map {"from,to": distance}
    #[arg(long)]
    distances: Option<PathBuf>,
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long)]
    netlist: PathBuf,
    /// Defaults to the state-space bound 2^points + max delay
    #[arg(long)]
    horizon: Option<usize>,
    /// Print the transition table in netlist point order
    #[arg(long)]
    table: bool,
    /// Partial input assignment, e.g. In1=T,In2=F
    #[arg(long)]
    alpha: Option<String>,
    /// Expected stable outputs, e.g. Out2=T
    #[arg(long)]
    beta: Option<String>,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long)]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Report {
    inputs: Vec<(String, String, String)>, // (label, path, sha256)
    defaults: BTreeMap<String, Value>,
    /// exit code 1 when a checked verdict failed
    verdict_failed: bool,
    result: Value,
    pretty_text: Option<String>,
}

impl Report {
    fn new(result: Value) -> Report {
        Report {
            inputs: vec![],
            defaults: BTreeMap::new(),
            verdict_failed: false,
            result,
            pretty_text: None,
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> Report {
    let mut r = Report::new(json!({ "error": msg.to_string() }));
    r.verdict_failed = false;
    r.pretty_text = Some(format!("error: {msg}"));
    r
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(report) => {
            if cli.pretty {
                match &report.pretty_text {
                    Some(t) => println!("{t}"),
                    None => println!("{}", serde_json::to_string_pretty(&report.result).unwrap()),
                }
            } else {
                let inputs: BTreeMap<String, Value> = report
                    .inputs
                    .iter()
                    .map(|(label, path, sha)| {
                        (label.clone(), json!({ "path": path, "sha256": sha }))
                    })
                    .collect();
                let envelope = json!({
                    "tool": "ibrs",
                    "version": env!("CARGO_PKG_VERSION"),
                    "seed": cli.seed,
                    "jobs": cli.jobs,
                    "inputs": inputs,
                    "defaults": report.defaults,
                    "result": report.result,
                });
                println!("{}", serde_json::to_string_pretty(&envelope).unwrap());
            }
            if report.verdict_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(report) => {
            eprintln!(
                "{}",
                report
                    .pretty_text
                    .unwrap_or_else(|| serde_json::to_string_pretty(&report.result).unwrap())
            );
            ExitCode::from(2)
        }
    }
}

fn read_input(report: &mut Report, label: &str, path: &PathBuf) -> Result<String, Report> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let sha = format!("{:x}", Sha256::digest(text.as_bytes()));
    report
        .inputs
        .push((label.to_string(), path.display().to_string(), sha));
    Ok(text)
}

fn load_structure(report: &mut Report, path: &PathBuf) -> Result<Structure, Report> {
    let text = read_input(report, "structure", path)?;
    Structure::from_json(&text).map_err(input_error)
}

fn load_table(report: &mut Report, path: &PathBuf) -> Result<MuTable, Report> {
    let text = read_input(report, "table", path)?;
    MuTable::from_json(&text).map_err(input_error)
}

fn set_list(sets: &PointSet) -> Value {
    json!(sets.iter().collect::<Vec<_>>())
}

fn smooth_result(v: &SmoothnessVerdict) -> Value {
    json!({
        "holds": v.holds,
        "witness": v.witness.as_ref().map(|w| json!({
            "copy": w.copy.as_ref().map(|c| json!([c.point(), c.copy()])),
            "arrows": w.arrows,
            "reason": w.reason,
        })),
        "cases": v.cases,
    })
}

fn parse_assignment(text: &str) -> Result<BTreeMap<String, bool>, Report> {
    let mut out = BTreeMap::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| input_error(format!("bad assignment {part}, expected Name=T|F")))?;
        let b = match v.trim() {
            "T" | "t" | "true" | "1" => true,
            "F" | "f" | "false" | "0" => false,
            other => return Err(input_error(format!("bad truth value {other}"))),
        };
        out.insert(k.trim().to_string(), b);
    }
    Ok(out)
}

fn parse_theory(text: &str) -> Result<Vec<logic::Formula>, Report> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| logic::parse_formula(s).map_err(input_error))
        .collect()
}

fn dispatch(cli: &Cli) -> Result<Report, Report> {
    match &cli.command {
        Command::Mu(args) => {
            let mut report = Report::new(Value::Null);
            let s = load_structure(&mut report, &args.structure)?;
            let x = point_set(&args.set);
            let result = match &args.eta_table {
                None => mu(&s, &x).map_err(input_error)?,
                Some(path) => {
                    let t = load_table(&mut report, path)?;
                    mu_attacking(&s, &t.eta_map(), &x).map_err(input_error)?
                }
            };
            report.result = json!({ "mu": set_list(&result) });
            report.pretty_text = Some(
                result.iter().cloned().collect::<Vec<_>>().join(","),
            );
            Ok(report)
        }
        Command::Valid(args) => {
            let mut report = Report::new(Value::Null);
            let s = load_structure(&mut report, &args.structure)?;
            let x = point_set(&args.x);
            let y = point_set(&args.y);
            let v = match args.kind {
                ValidKind::Xy => valid_x_to_y(&s, &x, &y),
                ValidKind::Ximply => valid_x_impl_y(&s, &x, &y),
            }
            .map_err(input_error)?;
            report.result = json!({ "valid": v.valid });
            report.pretty_text = Some(v.valid.iter().cloned().collect::<Vec<_>>().join(","));
            Ok(report)
        }
        Command::Smooth(args) => {
            let mut report = Report::new(Value::Null);
            let s = load_structure(&mut report, &args.structure)?;
            let need_set = || -> Result<PointSet, Report> {
                args.set
                    .as_deref()
                    .map(point_set)
                    .ok_or_else(|| input_error("--set is required for this mode"))
            };
            let v = match args.mode {
                SmoothMode::Total => is_totally_smooth(&s, &need_set()?),
                SmoothMode::Essential => is_essentially_smooth(&s, &need_set()?),
                SmoothMode::Sub => {
                    let x = need_set()?;
                    let xp = args
                        .set2
                        .as_deref()
                        .map(point_set)
                        .ok_or_else(|| input_error("--set2 is required for sub"))?;
                    is_sqsubseteq(&s, &x, &xp)
                }
                SmoothMode::Classical => {
                    let family: Vec<PointSet> = args
                        .family
                        .as_deref()
                        .ok_or_else(|| input_error("--family is required for classical"))?
                        .split(';')
                        .map(point_set)
                        .collect();
                    is_classically_smooth(&s, &family)
                }
            }
            .map_err(input_error)?;
            report.verdict_failed = !v.holds;
            report.pretty_text = Some(format!(
                "{}{}",
                if v.holds { "holds" } else { "fails" },
                v.witness
                    .as_ref()
                    .map(|w| format!(" — {}", w.reason))
                    .unwrap_or_default()
            ));
            report.result = smooth_result(&v);
            Ok(report)
        }
        Command::Represent(args) => {
            let mut report = Report::new(Value::Null);
            let t = load_table(&mut report, &args.table)?;
            let (s, note) = match args.mode {
                RepresentMode::Level2 => {
                    let (s, _) = build_level2_attacking(&t).map_err(input_error)?;
                    (s, "level-2 attacking structure relative to η")
                }
                RepresentMode::Level3 => (
                    build_level3_essentially_smooth(&t).map_err(input_error)?,
                    "level-3 essentially smooth structure",
                ),
            };
            let serialized = s.to_json();
            if let Some(out) = &args.out {
                std::fs::write(out, &serialized)
                    .map_err(|e| input_error(format!("cannot write {}: {e}", out.display())))?;
            }
            report.result = json!({
                "note": note,
                "points": s.carrier().len(),
                "copies": s.copies().count(),
                "arrows": s.arrow_count(),
                "max_level": s.max_level(),
                "structure": if args.out.is_some() { Value::Null } else {
                    serde_json::from_str(&serialized).unwrap()
                },
            });
            report.pretty_text = Some(format!(
                "{note}: {} copies, {} arrows, level {}",
                s.copies().count(),
                s.arrow_count(),
                s.max_level()
            ));
            Ok(report)
        }
        Command::SearchL2ts(args) => {
            let mut report = Report::new(Value::Null);
            let t = load_table(&mut report, &args.table)?;
            let cfg = SearchConfig {
                bounds: SearchBounds {
                    max_copies_per_point: args.max_copies,
                    max_arrow_copies: args.max_arrow_copies,
                },
                require_total_smoothness: !args.no_total_smooth,
                ceiling: args.ceiling,
                jobs: cli.jobs,
            };
            report.defaults.insert("ceiling".into(), json!(cfg.ceiling));
            report.defaults.insert(
                "require_total_smoothness".into(),
                json!(cfg.require_total_smoothness),
            );
            let r = search_level2_totally_smooth(&t, &cfg).map_err(input_error)?;
            let (found, structure) = match r.outcome {
                SearchOutcome::Found(s) => (true, Some(s)),
                SearchOutcome::Exhausted => (false, None),
            };
            report.pretty_text = Some(if found {
                "found".to_string()
            } else {
                format!("exhausted ({} nodes visited)", r.visited)
            });
            report.result = json!({
                "outcome": if found { "found" } else { "exhausted" },
                "visited": r.visited,
                "complete_candidates": r.complete_candidates,
                "space": r.space,
                "structure": structure.map(|s| serde_json::from_str::<Value>(&s.to_json()).unwrap()),
            });
            Ok(report)
        }
        Command::Props(args) => {
            let mut report = Report::new(Value::Null);
            let t = load_table(&mut report, &args.table)?;
            let props: Vec<PropertyId> = match &args.property {
                Some(p) => vec![PropertyId::from_str(p).map_err(input_error)?],
                None => ALL_PROPERTIES.to_vec(),
            };
            let mut rows = Vec::new();
            let mut lines = Vec::new();
            let mut any_failed = false;
            for p in props {
                let v = check_property(&t, p);
                any_failed |= !v.holds;
                lines.push(format!(
                    "{:<12} {}{}",
                    p.to_string(),
                    if v.holds { "holds" } else { "fails" },
                    v.witness
                        .as_ref()
                        .map(|w| {
                            let parts: Vec<String> =
                                w.iter().map(|(k, val)| format!("{k}={val}")).collect();
                            format!(" at {}", parts.join(", "))
                        })
                        .unwrap_or_default()
                ));
                rows.push(json!({
                    "property": p.to_string(),
                    "holds": v.holds,
                    "witness": v.witness.map(|w| {
                        w.into_iter().map(|(k, val)| (k, val.to_string())).collect::<BTreeMap<_,_>>()
                    }),
                    "skipped_instances": v.skipped_instances,
                }));
            }
            report.verdict_failed = any_failed;
            report.result = json!({ "verdicts": rows });
            report.pretty_text = Some(lines.join("\n"));
            Ok(report)
        }
        Command::VerifyRow(args) => {
            let mut report = Report::new(Value::Null);
            let mode = match args.mode {
                RowMode::Exhaustive => VerifyMode::Exhaustive,
                RowMode::Filtered => VerifyMode::Filtered,
                RowMode::Sampled => VerifyMode::Sampled {
                    samples: args.samples,
                    seed: cli.seed,
                },
            };
            if let RowMode::Sampled = args.mode {
                report.defaults.insert("samples".into(), json!(args.samples));
                report.defaults.insert("seed".into(), json!(cli.seed));
            }
            let r = verify_implication(&args.row, args.size, mode).map_err(input_error)?;
            report.verdict_failed = r.holds() == Some(false);
            report.pretty_text = Some(format!(
                "row {} [{}]: {} — {}",
                r.row,
                r.description,
                match r.holds() {
                    Some(true) => "verified",
                    Some(false) => "REFUTED",
                    None => "not verifiable at desk scale",
                },
                r.note
            ));
            report.result = json!({
                "row": r.row,
                "description": r.description,
                "positive": r.positive,
                "verifiable": r.verifiable,
                "tables_checked": r.tables_checked,
                "holds": r.holds(),
                "note": r.note,
                "counterexample": r.counterexample.map(|t| serde_json::from_str::<Value>(&t.to_json()).unwrap()),
            });
            Ok(report)
        }
        Command::Logic(args) => {
            let mut report = Report::new(Value::Null);
            let s = load_structure(&mut report, &args.structure)?;
            let lang = Language::new(args.lang.split(',').map(str::trim))
                .map_err(input_error)?;
            let theory = parse_theory(&args.theory)?;
            let src = ConsequenceSource::Structure(&s);
            let tbar = logic::consequence(&src, &lang, &theory).map_err(input_error)?;
            let axiom = tbar
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ; ");
            let entailed = match &args.query {
                Some(q) => {
                    let f = logic::parse_formula(q).map_err(input_error)?;
                    Some(logic::entails(&src, &lang, &theory, &f).map_err(input_error)?)
                }
                None => None,
            };
            report.pretty_text = Some(match entailed {
                Some(true) => "entailed".into(),
                Some(false) => "not entailed".into(),
                None => axiom.clone(),
            });
            report.result = json!({
                "consequence_axiom": axiom,
                "query_entailed": entailed,
            });
            Ok(report)
        }
        Command::Rules(args) => {
            let mut report = Report::new(Value::Null);
            let s = load_structure(&mut report, &args.structure)?;
            let lang = Language::new(args.lang.split(',').map(str::trim))
                .map_err(input_error)?;
            let src = ConsequenceSource::Structure(&s);
            let rules: Vec<RuleId> = match &args.rule {
                Some(r) => vec![RuleId::from_str(r).map_err(input_error)?],
                None => logic::ALL_RULES.to_vec(),
            };
            let mut rows = Vec::new();
            let mut lines = Vec::new();
            let mut any_failed = false;
            for rule in rules {
                let v = logic::check_rule(&src, &lang, rule).map_err(input_error)?;
                any_failed |= !v.holds;
                lines.push(format!(
                    "{:<10} {}",
                    rule.to_string(),
                    if v.holds { "holds" } else { "fails" }
                ));
                rows.push(json!({
                    "rule": rule.to_string(),
                    "holds": v.holds,
                    "witness": v.witness,
                    "note": v.note,
                }));
            }
            report.verdict_failed = any_failed;
            report.result = json!({ "verdicts": rows });
            report.pretty_text = Some(lines.join("\n"));
            Ok(report)
        }
        Command::Interp(args) => {
            let mut report = Report::new(Value::Null);
            let sys: LabeledIbrs = match (&args.fixture, &args.ibrs) {
                (Some(name), _) if name == "paper" || name == "paper-ibrs" => {
                    ibrs::fixtures::paper_ibrs()
                }
                (Some(name), _) => {
                    return Err(input_error(format!("unknown fixture {name}")));
                }
                (None, Some(path)) => {
                    let text = read_input(&mut report, "ibrs", path)?;
                    LabeledIbrs::from_json(&text).map_err(input_error)?
                }
                (None, None) => return Err(input_error("need --fixture or --ibrs")),
            };
            let missing = |flag: &str| input_error(format!("--{flag} is required for this algorithm"));
            let result = match args.alg {
                Alg::Modal => {
                    let world = args.world.as_deref().ok_or_else(|| missing("world"))?;
                    let atom = args.atom.as_deref().ok_or_else(|| missing("atom"))?;
                    let v = interp::modal_box_eval(&sys, world, atom)
                        .map_err(input_error)?;
                    json!({ "algorithm": "modal", "world": world, "atom": atom, "holds": v })
                }
                Alg::Nm => {
                    let p = args.premise.as_deref().ok_or_else(|| missing("premise"))?;
                    let q = args.conclusion.as_deref().ok_or_else(|| missing("conclusion"))?;
                    let v = interp::nm_consequence(&sys, p, q, None)
                        .map_err(input_error)?;
                    json!({ "algorithm": "nonmonotonic", "holds": v })
                }
                Alg::Arg => {
                    let win = interp::winning_arguments(&sys).map_err(input_error)?;
                    json!({ "algorithm": "argumentation", "winning": win })
                }
                Alg::Int => {
                    let p = args.premise.as_deref().ok_or_else(|| missing("premise"))?;
                    let q = args.conclusion.as_deref().ok_or_else(|| missing("conclusion"))?;
                    let rho0 = interp::intuitionistic_rho0(&sys).map_err(input_error)?;
                    let v = interp::intuitionistic_eval(&sys, p, q).map_err(input_error)?;
                    json!({
                        "algorithm": "intuitionistic",
                        "holds": v,
                        "rho0": rho0.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
                    })
                }
                Alg::Cf => {
                    let world = args.world.as_deref().ok_or_else(|| missing("world"))?;
                    let p = args.premise.as_deref().ok_or_else(|| missing("premise"))?;
                    let q = args.conclusion.as_deref().ok_or_else(|| missing("conclusion"))?;
                    let radius = args.radius.ok_or_else(|| missing("radius"))?;
                    let path = args.distances.as_ref().ok_or_else(|| missing("distances"))?;
                    let text = read_input(&mut report, "distances", path)?;
                    let raw: BTreeMap<String, f64> =
                        serde_json::from_str(&text).map_err(input_error)?;
                    let mut distances = BTreeMap::new();
                    for (k, v) in raw {
                        let (from, to) = k
                            .split_once(',')
                            .ok_or_else(|| input_error(format!("bad distance key {k}")))?;
                        distances.insert((from.trim().to_string(), to.trim().to_string()), v);
                    }
                    let v = interp::counterfactual_eval(&sys, &distances, world, p, q, radius)
                        .map_err(input_error)?;
                    json!({ "algorithm": "counterfactual", "holds": v, "radius": radius })
                }
            };
            report.pretty_text = Some(serde_json::to_string_pretty(&result).unwrap());
            report.result = result;
            Ok(report)
        }
        Command::Circuit(args) => {
            let mut report = Report::new(Value::Null);
            let text = read_input(&mut report, "netlist", &args.netlist)?;
            let net = Netlist::from_json(&text).map_err(input_error)?;
            let horizon = args.horizon.unwrap_or_else(|| circuit::default_horizon(&net));
            report.defaults.insert("horizon".into(), json!(horizon));
            match (&args.alpha, &args.beta) {
                (Some(alpha), Some(beta)) => {
                    let alpha = parse_assignment(alpha)?;
                    let beta = parse_assignment(beta)?;
                    let holds = circuit::diagram_consequence(&net, &alpha, &beta, horizon)
                        .map_err(input_error)?;
                    report.verdict_failed = !holds;
                    report.pretty_text =
                        Some(if holds { "consequence holds" } else { "consequence fails" }.into());
                    report.result = json!({ "diagram_consequence": holds });
                }
                (None, None) | (Some(_), None) => {
                    let overrides = match &args.alpha {
                        Some(a) => parse_assignment(a)?,
                        None => BTreeMap::new(),
                    };
                    let trace = circuit::run_with_overrides(&net, horizon, &overrides)
                        .map_err(input_error)?;
                    let classification = match &trace.classification {
                        Classification::Stable { state, first_time } => json!({
                            "kind": "stable",
                            "state": state,
                            "first_time": first_time,
                        }),
                        Classification::Oscillating { period, onset_time } => json!({
                            "kind": "oscillating",
                            "period": period,
                            "onset_time": onset_time,
                        }),
                        Classification::Undetermined { horizon } => json!({
                            "kind": "undetermined",
                            "horizon": horizon,
                        }),
                    };
                    report.pretty_text = Some(if args.table {
                        format!("{}\n{classification}", trace.render())
                    } else {
                        classification.to_string()
                    });
                    report.result = json!({
                        "points": trace.points,
                        "rows": trace.rows,
                        "classification": classification,
                    });
                }
                (None, Some(_)) => {
                    return Err(input_error("--beta requires --alpha"));
                }
            }
            Ok(report)
        }
        Command::Fixtures(args) => {
            let mut report = Report::new(Value::Null);
            let json_text = ibrs::fixtures::fixture_json(&args.name).ok_or_else(|| {
                input_error(format!(
                    "unknown fixture {}; available: {}",
                    args.name,
                    ibrs::fixtures::FIXTURE_NAMES.join(", ")
                ))
            })?;
            if let Some(out) = &args.out {
                std::fs::write(out, &json_text)
                    .map_err(|e| input_error(format!("cannot write {}: {e}", out.display())))?;
                report.result = json!({ "written": out.display().to_string() });
                report.pretty_text = Some(format!("wrote {}", out.display()));
            } else {
                report.result = serde_json::from_str(&json_text).unwrap();
                report.pretty_text = Some(json_text);
            }
            Ok(report)
        }
    }
}

// set_key and set_list keep pretty output consistent with the library
#[allow(dead_code)]
fn render_set(s: &PointSet) -> String {
    set_key(s)
}
