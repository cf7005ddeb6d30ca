mod checks;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epscan_core::algebra::{from_structure, is_isomorphic, is_isomorphic_boolean, AlgebraKind};
use epscan_core::canonical::parse_hom;
use epscan_core::definability::oracle::ORACLE_MAX_CARRIER;
use epscan_core::definability::{definable_closure, stability_check, DEFAULT_MAX_ROUNDS};
use epscan_core::semantics::{write_structure, Assignment, Evaluator};
use epscan_core::syntax::{parse_formula, parse_term, Printable, Var};
use epscan_core::termalgebra::infer_kind;
use serde_json::json;

use checks::Opts;
use input::{InputError, Loaded};
use report::{Report, StructureReport};

#[derive(Parser)]
#[command(name = "epscan", version, about = "Epsilon-calculus choice structures, canonical models and their algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Leave timings out of reports.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a structure file.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate a formula or a term.
    Eval {
        file: PathBuf,
        #[arg(short = 'f', long, conflicts_with = "term", required_unless_present = "term")]
        formula: Option<String>,
        #[arg(short = 't', long)]
        term: Option<String>,
        /// Variable values, e.g. `v0=1,v1=0`.
        #[arg(long, default_value = "")]
        assign: String,
        #[command(flatten)]
        out: Output,
    },
    /// Definable elements and sets, with witnesses and the stability report.
    Definable {
        file: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        /// Depth of the brute-force comparison (carriers of at most 4).
        #[arg(long, default_value_t = 4)]
        depth_oracle: usize,
        #[command(flatten)]
        out: Output,
    },
    /// The canonical model and its injection.
    Canon {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Boolean and monadic algebra tools.
    Algebra {
        #[command(subcommand)]
        command: AlgebraCommand,
    },
    /// Run checkers.
    Check {
        which: CheckKind,
        /// Structure files, corpus directories or manifests.
        files: Vec<PathBuf>,
        /// Carrier map for `naturality`, lines `i -> j`.
        #[arg(long)]
        hom: Option<PathBuf>,
        /// Formula depth for `elementary`.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Random formulas beyond the exhaustive depth.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Isomorphism of two algebras, c0 included when both are monadic.
    Iso {
        file1: PathBuf,
        file2: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// The fixed points of c0.
    Nr0 {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Atomic,
    Eta,
    Elementary,
    Naturality,
    LtCan,
    Rich,
    Main,
    Sigma,
    All,
}

/// A finished command: what to print and whether everything passed.
struct Outcome {
    text: String,
    ok: bool,
}

fn emit(out: Output, value: serde_json::Value, text: String, ok: bool) -> Outcome {
    let text = if out.json { serde_json::to_string_pretty(&value).expect("json") + "\n" } else { text };
    Outcome { text, ok }
}

fn parse_assignment(s: &str, n: usize) -> Result<Assignment, InputError> {
    let mut a = Assignment::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (v, e) = part.split_once('=').ok_or_else(|| InputError(format!("bad assignment `{part}`")))?;
        let idx: u32 = v
            .trim()
            .strip_prefix('v')
            .and_then(|i| i.parse().ok())
            .ok_or_else(|| InputError(format!("bad variable `{}`", v.trim())))?;
        let e: usize = e.trim().parse().map_err(|_| InputError(format!("bad element `{}`", e.trim())))?;
        if e >= n {
            return Err(InputError(format!("element {e} is outside the carrier")));
        }
        a.set(Var(idx), e);
    }
    Ok(a)
}

fn validate(file: PathBuf, out: Output) -> Result<Outcome, InputError> {
    let l = input::load(&file)?;
    let m = &l.structure;
    let sig = m.signature();
    let algebra = checks::algebra_status(m);
    let ok = algebra.is_ok();
    let algebra_text = match &algebra {
        Ok(Some(s)) => s.clone(),
        Ok(None) => "not an algebra signature".into(),
        Err(e) => format!("algebra laws fail: {e}"),
    };
    let text = format!(
        "{}: valid, {} elements, {} relations, {} functions, {} constants; {}\n",
        l.path,
        m.size(),
        sig.relations().len(),
        sig.functions().len(),
        sig.constants().len(),
        algebra_text
    );
    let value = json!({
        "file": l.path,
        "sha256": l.sha256,
        "carrier": m.size(),
        "relations": sig.relations().len(),
        "functions": sig.functions().len(),
        "constants": sig.constants().len(),
        "algebra": algebra_text,
    });
    Ok(emit(out, value, text, ok))
}

fn eval(file: PathBuf, formula: Option<String>, term: Option<String>, assign: String, out: Output) -> Result<Outcome, InputError> {
    let l = input::load(&file)?;
    let m = &l.structure;
    let a = parse_assignment(&assign, m.size())?;
    let mut ev = Evaluator::new(m);
    let value = match (formula, term) {
        (Some(f), _) => {
            let f = parse_formula(&f, m.signature())?;
            json!(ev.formula(&a, &f)?)
        }
        (None, Some(t)) => {
            let t = parse_term(&t, m.signature())?;
            json!(ev.term(&a, &t)?)
        }
        (None, None) => return Err(InputError("give a formula (-f) or a term (-t)".into())),
    };
    let text = format!("{value}\n");
    Ok(emit(out, json!({ "value": value }), text, true))
}

fn definable(file: PathBuf, max_dim: usize, depth_oracle: usize, out: Output) -> Result<Outcome, InputError> {
    let l = input::load(&file)?;
    let m = &l.structure;
    let sig = m.signature();
    let fam = definable_closure(m, max_dim, DEFAULT_MAX_ROUNDS)?;
    let oracle_depth = (m.size() <= ORACLE_MAX_CARRIER).then_some(depth_oracle);
    let stability = stability_check(m, oracle_depth.unwrap_or(0))?;
    let mut elements: Vec<_> = fam.elements.iter().map(|w| (w.value, w.witness.to_text(sig))).collect();
    elements.sort();
    let sets: Vec<_> = fam.sets.iter().map(|(s, w)| (s.to_vec(), w.witness.to_text(sig))).collect();
    let agrees = stability.oracle.as_ref().is_none_or(|o| o.agrees);
    let ok = fam.saturated && agrees && fam.verify(m).is_empty();
    let mut text = format!(
        "E = {} ({} elements), U has {} sets, {} rounds, saturated {}, dimension-stable {}\n",
        fam.element_set(),
        elements.len(),
        sets.len(),
        fam.rounds,
        fam.saturated,
        stability.stable
    );
    if let Some(o) = &stability.oracle {
        text += &format!("brute force at depth {}: {} sets, agrees {}\n", o.depth, o.oracle_sets, o.agrees);
    }
    for (e, w) in &elements {
        text += &format!("  {e} = {w}\n");
    }
    for (s, w) in &sets {
        text += &format!("  {s:?} = {w}\n");
    }
    let value = json!({
        "file": l.path,
        "max_dim": max_dim,
        "elements": elements.iter().map(|(e, w)| json!({"element": e, "witness": w})).collect::<Vec<_>>(),
        "sets": sets.iter().map(|(s, w)| json!({"set": s, "witness": w})).collect::<Vec<_>>(),
        "rounds": fam.rounds,
        "saturated": fam.saturated,
        "stability": stability,
    });
    Ok(emit(out, value, text, ok))
}

fn canon(file: PathBuf, out: Output) -> Result<Outcome, InputError> {
    let l = input::load(&file)?;
    let b = checks::base(&l.structure)?;
    let c = &b.canonical;
    let eta = checks::eta(&b);
    let mut text = format!("canonical universe: {} elements\n", c.size());
    let universe: Vec<_> = (0..c.size())
        .map(|i| {
            text += &format!("  {i} = {}  (η ↦ {})\n", c.representative_text(i), c.universe[i].value);
            json!({"element": i, "representative": c.representative_text(i), "eta": c.universe[i].value})
        })
        .collect();
    text += &format!("eta: {}\n", eta.summary);
    let table = write_structure(&c.structure);
    text += &table;
    let ok = eta.verdict.ok();
    let value = json!({ "file": l.path, "universe": universe, "eta": eta.details, "structure": table });
    Ok(emit(out, value, text, ok))
}

fn algebra(cmd: AlgebraCommand) -> Result<Outcome, InputError> {
    match cmd {
        AlgebraCommand::Iso { file1, file2, out } => {
            let (l1, l2) = (input::load(&file1)?, input::load(&file2)?);
            let (k1, k2) = (infer_kind(&l1.structure), infer_kind(&l2.structure));
            let a1 = from_structure(&l1.structure, k1)?;
            let a2 = from_structure(&l2.structure, k2)?;
            let monadic = k1 == AlgebraKind::Ca1 && k2 == AlgebraKind::Ca1;
            let iso = if monadic { is_isomorphic(&a1.algebra, &a2.algebra) } else { is_isomorphic_boolean(&a1.algebra, &a2.algebra) };
            let element_map: Option<Vec<usize>> = iso
                .as_ref()
                .map(|i| (0..l1.structure.size()).map(|e| a2.carrier_of(i.apply(a1.element_map[e]))).collect());
            let text = match &element_map {
                Some(map) => format!("isomorphic ({}): {:?}\n", if monadic { "with c0" } else { "Boolean reducts" }, map),
                None => "not isomorphic\n".into(),
            };
            let value = json!({
                "monadic": monadic,
                "isomorphic": iso.is_some(),
                "atom_map": iso.map(|i| i.atom_map),
                "element_map": element_map,
            });
            Ok(emit(out, value, text, true))
        }
        AlgebraCommand::Nr0 { file, out } => {
            let l = input::load(&file)?;
            let a = from_structure(&l.structure, infer_kind(&l.structure))?;
            let nr0 = a.algebra.nr0();
            let elements: Vec<usize> = nr0.embedding.iter().map(|&x| a.carrier_of(x)).collect();
            let two = nr0.algebra.size() == 2;
            let text = format!("Nr0 has {} elements {:?}; ≅ 2: {}\n", nr0.algebra.size(), elements, two);
            let value = json!({ "size": nr0.algebra.size(), "elements": elements, "is_two": two });
            Ok(emit(out, value, text, true))
        }
    }
}

fn seed() -> Result<u64, InputError> {
    match std::env::var("EPSCAN_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| InputError(format!("EPSCAN_SEED must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn structure_report(l: &Loaded, which: CheckKind, opts: &Opts, hom: Option<&(Loaded, Vec<usize>)>) -> Result<StructureReport, InputError> {
    let m = &l.structure;
    let b = checks::base(m)?;
    let all = which == CheckKind::All;
    let mut recs = Vec::new();
    let stability = if all {
        let depth = if m.size() <= ORACLE_MAX_CARRIER { 4 } else { 0 };
        Some(serde_json::to_value(stability_check(m, depth)?).expect("json"))
    } else {
        None
    };
    if all || which == CheckKind::Atomic {
        recs.push(checks::timed(opts, || checks::atomic(&b))?);
    }
    if all || which == CheckKind::Eta {
        recs.push(checks::timed(opts, || Ok(checks::eta(&b)))?);
    }
    if all || which == CheckKind::Elementary {
        recs.push(checks::timed(opts, || checks::elementary(&b, opts))?);
    }
    if all || which == CheckKind::Naturality {
        recs.push(checks::timed(opts, || match hom {
            Some((l2, h)) => {
                let b2 = checks::base(&l2.structure)?;
                checks::naturality(h, &b, &b2)
            }
            None => {
                let id: Vec<usize> = (0..m.size()).collect();
                checks::naturality(&id, &b, &b)
            }
        })?);
    }
    if all || matches!(which, CheckKind::LtCan | CheckKind::Rich) {
        let stage = checks::term_stage(m, &b)?;
        if all || which == CheckKind::LtCan {
            recs.push(checks::timed(opts, || Ok(checks::lt_can(&stage)))?);
        }
        if all || which == CheckKind::Rich {
            recs.push(checks::timed(opts, || Ok(checks::rich(&stage)))?);
        }
    }
    if all || which == CheckKind::Main {
        recs.push(checks::timed(opts, || checks::main_theorem(m))?);
    }
    if all || which == CheckKind::Sigma {
        recs.push(checks::timed(opts, || checks::sigma(m))?);
    }
    Ok(StructureReport {
        name: l.name.clone(),
        file: l.path.clone(),
        sha256: l.sha256.clone(),
        carrier: m.size(),
        stability,
        checks: recs,
    })
}

fn check(which: CheckKind, files: Vec<PathBuf>, hom: Option<PathBuf>, depth: usize, samples: usize, out: Output) -> Result<Outcome, InputError> {
    let opts = Opts { depth, samples, seed: seed()?, timing: !out.no_timing };
    let files = if files.is_empty() { vec![PathBuf::from("corpus")] } else { files };
    let mut reports = Vec::new();
    if which == CheckKind::Naturality && files.len() == 2 {
        // naturality between two structures along a carrier map
        let l1 = input::load(&files[0])?;
        let l2 = input::load(&files[1])?;
        let hpath = hom.ok_or_else(|| InputError("naturality between two structures needs --hom".into()))?;
        let h = parse_hom(&input::read(&hpath)?, l1.structure.size(), l2.structure.size())
            .map_err(|e| InputError(format!("{}: {e}", hpath.display())))?;
        let pair = (l2, h);
        reports.push(structure_report(&l1, which, &opts, Some(&pair))?);
    } else {
        if hom.is_some() {
            return Err(InputError("--hom needs `check naturality FILE FILE2`".into()));
        }
        for path in input::expand(&files)? {
            let l = input::load(&path)?;
            reports.push(structure_report(&l, which, &opts, None)?);
        }
    }
    let report = Report::new(reports);
    let ok = report.ok();
    let text = report.to_text();
    Ok(emit(out, serde_json::to_value(&report).expect("json"), text, ok))
}

fn run(cli: Cli) -> Result<Outcome, InputError> {
    match cli.command {
        Command::Validate { file, out } => validate(file, out),
        Command::Eval { file, formula, term, assign, out } => eval(file, formula, term, assign, out),
        Command::Definable { file, max_dim, depth_oracle, out } => definable(file, max_dim, depth_oracle, out),
        Command::Canon { file, out } => canon(file, out),
        Command::Algebra { command } => algebra(command),
        Command::Check { which, files, hom, depth, samples, out } => check(which, files, hom, depth, samples, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            print!("{}", o.text);
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("epscan: {e}");
            ExitCode::from(2)
        }
    }
}
