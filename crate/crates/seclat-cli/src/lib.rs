//! Command-line front end for the `seclat` library.
//!
//! Subcommands parse a specification document, run one of the library
//! operations over its declarations, and report results on stdout. Violations
//! are printed as `witness: ...` lines so scripts can grep for them; exit
//! codes distinguish bad input from sound input with violated properties.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use seclat::gen;
use seclat::specio::{
    document_to_json, emit_dot, flow_contract_to_json, flow_relation_to_json, interface_to_json,
    json_text, lattice_contract_to_json, lattice_to_json, parse_spec, Declaration, FlowsDecl,
    LatticeDecl, ResolvedContract, SpecDocument,
};
use seclat::{
    fresh_renaming_equivalent, is_equivalent, to_flow_rel, to_lattice, FlowRelation,
    SecurityLattice, Variable,
};

/// Outcome of a CLI invocation.
///
/// `Success` means the input was sound and every checked property held.
/// `Violation` means the input was well formed but a checked property failed;
/// at least one `witness:` line accompanies it. `InputError` covers unreadable
/// files, parse errors, unknown names, and translations that exhaust their
/// completion budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Violation,
    InputError,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Violation => 1,
            ExitStatus::InputError => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "seclat",
    version,
    about = "Translate between flow specifications and security lattices"
)]
struct Cli {
    /// Seed for randomized round-trip runs.
    #[arg(long, global = true, default_value_t = gen::DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every declaration in a document and report violations.
    Validate {
        /// Specification document to read.
        file: PathBuf,
    },
    /// Translate a flows declaration into its security lattice.
    ToLattice {
        /// Specification document to read.
        file: PathBuf,
        /// Flows declaration to translate.
        #[arg(long)]
        name: String,
        /// Also print the intermediate translation steps.
        #[arg(long)]
        trace: bool,
        /// Write a DOT rendering of the lattice to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Read a lattice declaration back as a flow relation.
    ToFlows {
        /// Specification document to read.
        file: PathBuf,
        /// Lattice declaration to read back.
        #[arg(long)]
        name: String,
        /// Comma-separated source variables.
        #[arg(long, default_value = "")]
        sources: String,
        /// Comma-separated target variables.
        #[arg(long, default_value = "")]
        targets: String,
    },
    /// Check a flows implementation against an interface's no-flow guarantees.
    Check {
        /// Specification document to read.
        file: PathBuf,
        /// Flows declaration acting as the implementation.
        #[arg(long = "impl")]
        implementation: String,
        /// Interface declaration whose guarantees must hold.
        #[arg(long)]
        against: String,
    },
    /// Verify that translating declarations and reading them back is lossless.
    Roundtrip {
        /// Specification document to read.
        file: PathBuf,
        /// Also check this many randomly generated instances.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Emit a declaration (or the whole document) as DOT or JSON.
    Export {
        /// Specification document to read.
        file: PathBuf,
        /// Output format.
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Declaration to export; JSON defaults to the whole document.
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

/// Run the CLI against an explicit argument list and report the exit status.
///
/// Output goes straight to stdout/stderr; the binary wraps this in
/// `process::exit`.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let benign = matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            // clap routes help/version to stdout and errors to stderr.
            let _ = err.print();
            return if benign {
                ExitStatus::Success
            } else {
                ExitStatus::InputError
            };
        }
    };
    let seed = cli.seed;
    match cli.command {
        Command::Validate { file } => with_document(&file, validate_command),
        Command::ToLattice {
            file,
            name,
            trace,
            dot,
        } => with_document(&file, |doc| {
            to_lattice_command(doc, &name, trace, dot.as_deref())
        }),
        Command::ToFlows {
            file,
            name,
            sources,
            targets,
        } => with_document(&file, |doc| {
            to_flows_command(doc, &name, &sources, &targets)
        }),
        Command::Check {
            file,
            implementation,
            against,
        } => with_document(&file, |doc| check_command(doc, &implementation, &against)),
        Command::Roundtrip { file, random } => {
            with_document(&file, |doc| roundtrip_command(doc, random, seed))
        }
        Command::Export { file, format, name } => {
            with_document(&file, |doc| export_command(doc, format, name.as_deref()))
        }
    }
}

/// Read and parse `path`, then hand the document to `body`.
fn with_document(path: &Path, body: impl FnOnce(&SpecDocument) -> ExitStatus) -> ExitStatus {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) => {
            eprintln!("error: {}: {err}", path.display());
            return ExitStatus::InputError;
        }
    };
    match parse_spec(&text) {
        Ok(doc) => body(&doc),
        Err(err) => {
            eprintln!("error: {}: {err}", path.display());
            ExitStatus::InputError
        }
    }
}

/// Wrap `text` in an ANSI color unless the stream is piped or NO_COLOR is set.
fn paint(color: &str, text: &str) -> String {
    if std::env::var_os("NO_COLOR").is_some() || !std::io::stdout().is_terminal() {
        text.to_string()
    } else {
        format!("\x1b[{color}m{text}\x1b[0m")
    }
}

fn pass_mark() -> String {
    paint("32", "PASS")
}

fn fail_mark() -> String {
    paint("31", "FAIL")
}

fn skip_mark() -> String {
    paint("33", "SKIP")
}

fn validate_command(doc: &SpecDocument) -> ExitStatus {
    let mut clean = true;
    for decl in &doc.declarations {
        match decl {
            Declaration::Interface(d) => println!("interface {}: valid", d.name),
            Declaration::Flows(d) => {
                let witnesses = d.relation.violations();
                if witnesses.is_empty() {
                    println!("flows {}: valid", d.name);
                } else {
                    clean = false;
                    println!("flows {}: {} violations", d.name, witnesses.len());
                    for w in witnesses {
                        println!("witness: {w}");
                    }
                }
            }
            Declaration::Lattice(d) => {
                let report = d.lattice.validate();
                if report.is_lattice() {
                    println!("lattice {}: valid", d.name);
                } else {
                    clean = false;
                    let failures: Vec<_> = report.failures().collect();
                    println!("lattice {}: {} violations", d.name, failures.len());
                    for (axiom, violation) in failures {
                        println!("witness: {axiom}: {violation}");
                    }
                }
            }
            Declaration::Contract(d) => match &d.contract {
                ResolvedContract::Flows(c) => {
                    let witnesses = c.validate();
                    if witnesses.is_empty() {
                        println!("contract {}: valid", d.name);
                    } else {
                        clean = false;
                        println!("contract {}: {} violations", d.name, witnesses.len());
                        for w in witnesses {
                            println!("witness: {w}");
                        }
                    }
                }
                // Lattice members are checked at resolution time.
                ResolvedContract::Lattices(_) => println!("contract {}: valid", d.name),
            },
        }
    }
    if clean {
        ExitStatus::Success
    } else {
        ExitStatus::Violation
    }
}

fn to_lattice_command(
    doc: &SpecDocument,
    name: &str,
    trace: bool,
    dot: Option<&Path>,
) -> ExitStatus {
    let Some(decl) = doc.flows(name) else {
        eprintln!("error: no flows declaration named {name}");
        return ExitStatus::InputError;
    };
    let (lattice, steps) = match to_lattice(&decl.relation) {
        Ok(result) => result,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitStatus::InputError;
        }
    };
    let fresh = lattice.labels().iter().filter(|l| l.is_fresh()).count();
    println!(
        "lattice {}: {} labels, {} fresh",
        decl.name,
        lattice.labels().len(),
        fresh
    );
    println!("labels: {}", joined(lattice.labels().iter()));
    for (lower, upper) in lattice.hasse_edges() {
        println!("{lower} -> {upper}");
    }
    if trace {
        println!("trace: loop labels: {}", joined(steps.loop_labels.iter()));
        if steps.pruned_labels.is_empty() {
            println!("trace: pruned labels: (none)");
        } else {
            println!(
                "trace: pruned labels: {}",
                joined(steps.pruned_labels.iter())
            );
        }
        let (pre_labels, pre_order) = &steps.pre_completion;
        println!(
            "trace: pre-completion: {} labels, {} order pairs",
            pre_labels.len(),
            pre_order.len()
        );
        for (fresh_label, (a, b)) in &steps.fresh_added {
            println!("trace: fresh {fresh_label} joins {a} and {b}");
        }
    }
    if let Some(path) = dot {
        if let Err(err) = fs::write(path, emit_dot(&lattice)) {
            eprintln!("error: {}: {err}", path.display());
            return ExitStatus::InputError;
        }
    }
    ExitStatus::Success
}

/// Render a comma-separated list of displayable items.
fn joined<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    let rendered: Vec<String> = items.map(|item| item.to_string()).collect();
    rendered.join(", ")
}

/// Parse a comma-separated variable list; empty input means no variables.
fn variable_list(text: &str) -> Result<BTreeSet<Variable>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| Variable::new(part).map_err(|err| err.to_string()))
        .collect()
}

fn to_flows_command(doc: &SpecDocument, name: &str, sources: &str, targets: &str) -> ExitStatus {
    let Some(decl) = doc.lattice(name) else {
        eprintln!("error: no lattice declaration named {name}");
        return ExitStatus::InputError;
    };
    let (sources, targets) = match (variable_list(sources), variable_list(targets)) {
        (Ok(sources), Ok(targets)) => (sources, targets),
        (Err(err), _) | (_, Err(err)) => {
            eprintln!("error: {err}");
            return ExitStatus::InputError;
        }
    };
    let zs: BTreeSet<Variable> = sources.union(&targets).cloned().collect();
    let relation = to_flow_rel(&decl.lattice, &zs, &targets);
    println!("flows from {}: {} pairs", decl.name, relation.pairs().len());
    for (from, to) in relation.pairs() {
        println!("{from} -> {to}");
    }
    ExitStatus::Success
}

fn check_command(doc: &SpecDocument, implementation: &str, against: &str) -> ExitStatus {
    let Some(flows) = doc.flows(implementation) else {
        eprintln!("error: no flows declaration named {implementation}");
        return ExitStatus::InputError;
    };
    let Some(interface) = doc.interface(against) else {
        eprintln!("error: no interface declaration named {against}");
        return ExitStatus::InputError;
    };
    match flows
        .relation
        .check_no_flows(interface.interface.guarantee_no_flows())
    {
        Err(err) => {
            eprintln!("error: {err}");
            ExitStatus::InputError
        }
        Ok(witnesses) if witnesses.is_empty() => {
            println!("no-flow guarantees satisfied");
            ExitStatus::Success
        }
        Ok(witnesses) => {
            for w in witnesses {
                println!("witness: {w}");
            }
            ExitStatus::Violation
        }
    }
}

fn roundtrip_command(doc: &SpecDocument, random: Option<usize>, seed: u64) -> ExitStatus {
    let mut clean = true;
    for decl in &doc.declarations {
        match decl {
            Declaration::Flows(d) => clean &= roundtrip_flows(d),
            Declaration::Lattice(d) => clean &= roundtrip_lattice(d),
            _ => {}
        }
    }
    if let Some(count) = random {
        clean &= roundtrip_random(count, seed);
    }
    if clean {
        ExitStatus::Success
    } else {
        ExitStatus::Violation
    }
}

/// Translate a flows declaration to a lattice and read it back; the result
/// must validate, agree with the relation, and reproduce its pairs exactly.
/// A translation that exhausts its completion budget is reported as skipped:
/// the round trip was not falsified, it could not be carried out.
fn roundtrip_flows(decl: &FlowsDecl) -> bool {
    let relation = &decl.relation;
    let (lattice, _) = match to_lattice(relation) {
        Ok(result) => result,
        Err(err) => {
            println!("roundtrip {} (flows): {} ({err})", decl.name, skip_mark());
            return true;
        }
    };
    let mut witnesses = Vec::new();
    for (axiom, violation) in lattice.validate().failures() {
        witnesses.push(format!("{axiom}: {violation}"));
    }
    let zs = relation.domain().vars();
    let vs = relation.domain().targets();
    let verdict = is_equivalent(&lattice, relation, &zs, vs);
    if let Some((l1, l2)) = &verdict.bad_order_pair {
        witnesses.push(format!("unsound order pair {l1} -> {l2}"));
    }
    if let Some((a, b)) = &verdict.missing_flow {
        witnesses.push(format!("missing flow {a} -> {b}"));
    }
    if let Some((a, b)) = &verdict.extra_flow {
        witnesses.push(format!("extra flow {a} -> {b}"));
    }
    if to_flow_rel(&lattice, &zs, vs) != *relation {
        witnesses.push("reading the lattice back changed the relation".to_string());
    }
    if witnesses.is_empty() {
        println!("roundtrip {} (flows): {}", decl.name, pass_mark());
        true
    } else {
        println!("roundtrip {} (flows): {}", decl.name, fail_mark());
        for w in witnesses {
            println!("witness: {w}");
        }
        false
    }
}

/// Read a lattice declaration back as a flow relation over all of its label
/// variables, translate that relation, and compare up to fresh renaming.
///
/// The comparison only makes sense for valid lattices whose inner labels are
/// variable sets that do not share variables; anything else is skipped with a
/// reason rather than reported as a failure.
fn roundtrip_lattice(decl: &LatticeDecl) -> bool {
    let lattice = &decl.lattice;
    if let Some(axiom) = lattice.validate().first_failed_axiom() {
        println!(
            "roundtrip {} (lattice): {} (the {axiom} check fails)",
            decl.name,
            skip_mark()
        );
        return true;
    }
    if let Some(reason) = lossy_lattice_reason(lattice) {
        println!(
            "roundtrip {} (lattice): {} ({reason})",
            decl.name,
            skip_mark()
        );
        return true;
    }
    let vars: BTreeSet<Variable> = lattice
        .inner_labels()
        .filter_map(|label| label.vars())
        .flatten()
        .cloned()
        .collect();
    let relation = to_flow_rel(lattice, &vars, &vars);
    match to_lattice(&relation) {
        Ok((recovered, _)) if fresh_renaming_equivalent(&recovered, lattice) => {
            println!("roundtrip {} (lattice): {}", decl.name, pass_mark());
            true
        }
        Ok((recovered, _)) => {
            println!("roundtrip {} (lattice): {}", decl.name, fail_mark());
            for w in lattice_differences(&recovered, lattice) {
                println!("witness: {w}");
            }
            false
        }
        Err(err) => {
            println!("roundtrip {} (lattice): {}", decl.name, fail_mark());
            println!("witness: {err}");
            false
        }
    }
}

/// Why a declared lattice cannot be reproduced from its flow reading, if at
/// all. Shared variables collapse distinct labels, and fresh labels carry no
/// variables to read back.
fn lossy_lattice_reason(lattice: &SecurityLattice) -> Option<&'static str> {
    let mut seen: BTreeSet<Variable> = BTreeSet::new();
    for label in lattice.inner_labels() {
        let Some(vars) = label.vars() else {
            return Some("fresh labels carry no variables");
        };
        for var in vars {
            if !seen.insert(var.clone()) {
                return Some("labels share variables");
            }
        }
    }
    None
}

/// First structural mismatches between two lattices, for witness lines.
fn lattice_differences(got: &SecurityLattice, want: &SecurityLattice) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(label) = want.labels().difference(got.labels()).next() {
        out.push(format!("label {label} was lost"));
    }
    if let Some(label) = got.labels().difference(want.labels()).next() {
        out.push(format!("label {label} appeared"));
    }
    if out.is_empty() {
        if let Some((a, b)) = want.can_flow().symmetric_difference(got.can_flow()).next() {
            out.push(format!("order pair {a} -> {b} differs"));
        }
    }
    out
}

enum Trip {
    Pass,
    /// Completion budget exhausted; nothing was falsified.
    Skip,
    Fail(String),
}

/// Randomized round trips: `count` generated flow relations must translate to
/// equivalent lattices and read back exactly, then `count` generated lattices
/// must survive translation of their flow reading up to fresh renaming.
fn roundtrip_random(count: usize, seed: u64) -> bool {
    let mut rng = gen::rng(seed);
    let mut clean = true;

    let mut tally = |family: &str, outcomes: &mut dyn Iterator<Item = Trip>| {
        let (mut passed, mut skipped) = (0usize, 0usize);
        for (index, outcome) in outcomes.enumerate() {
            match outcome {
                Trip::Pass => passed += 1,
                Trip::Skip => skipped += 1,
                Trip::Fail(witness) => {
                    clean = false;
                    println!(
                        "roundtrip random {family} [{index}] (seed {seed:#x}): {}",
                        fail_mark()
                    );
                    println!("witness: {witness}");
                }
            }
        }
        let mut summary = format!("{passed} {}", pass_mark());
        if skipped > 0 {
            summary.push_str(&format!(", {skipped} {}", skip_mark()));
        }
        let failed = count - passed - skipped;
        if failed > 0 {
            summary.push_str(&format!(", {failed} {}", fail_mark()));
        }
        println!("roundtrip random {family}: {summary}");
    };

    tally(
        "flows",
        &mut (0..count).map(|_| random_flows_trip(&gen::flow_relation(&mut rng, 8))),
    );
    let mut rng = gen::rng(seed.wrapping_add(1));
    tally(
        "lattices",
        &mut (0..count).map(|_| {
            let (lattice, zs, vs) = gen::recoverable_lattice(&mut rng);
            random_lattice_trip(&lattice, &zs, &vs)
        }),
    );
    clean
}

fn random_flows_trip(relation: &FlowRelation) -> Trip {
    let Ok((lattice, _)) = to_lattice(relation) else {
        return Trip::Skip;
    };
    let report = lattice.validate();
    if let Some((axiom, violation)) = report.failures().next() {
        return Trip::Fail(format!("{axiom}: {violation}"));
    }
    let zs = relation.domain().vars();
    let vs = relation.domain().targets();
    let verdict = is_equivalent(&lattice, relation, &zs, vs);
    if let Some((l1, l2)) = &verdict.bad_order_pair {
        return Trip::Fail(format!("unsound order pair {l1} -> {l2}"));
    }
    if let Some((a, b)) = &verdict.missing_flow {
        return Trip::Fail(format!("missing flow {a} -> {b}"));
    }
    if let Some((a, b)) = &verdict.extra_flow {
        return Trip::Fail(format!("extra flow {a} -> {b}"));
    }
    if to_flow_rel(&lattice, &zs, vs) != *relation {
        return Trip::Fail("reading the lattice back changed the relation".to_string());
    }
    Trip::Pass
}

fn random_lattice_trip(
    lattice: &SecurityLattice,
    zs: &BTreeSet<Variable>,
    vs: &BTreeSet<Variable>,
) -> Trip {
    let relation = to_flow_rel(lattice, zs, vs);
    match to_lattice(&relation) {
        Ok((recovered, _)) if fresh_renaming_equivalent(&recovered, lattice) => Trip::Pass,
        Ok(recovered) => Trip::Fail(
            lattice_differences(&recovered.0, lattice)
                .into_iter()
                .next()
                .unwrap_or_else(|| "recovered lattice differs".to_string()),
        ),
        Err(_) => Trip::Skip,
    }
}

fn export_command(doc: &SpecDocument, format: ExportFormat, name: Option<&str>) -> ExitStatus {
    match format {
        ExportFormat::Json => {
            let value = match name {
                None => document_to_json(doc),
                Some(name) => match doc.find(name) {
                    Some(Declaration::Interface(d)) => interface_to_json(&d.interface),
                    Some(Declaration::Flows(d)) => flow_relation_to_json(&d.relation),
                    Some(Declaration::Lattice(d)) => lattice_to_json(&d.lattice),
                    Some(Declaration::Contract(d)) => match &d.contract {
                        ResolvedContract::Flows(c) => flow_contract_to_json(c),
                        ResolvedContract::Lattices(c) => lattice_contract_to_json(c),
                    },
                    None => {
                        eprintln!("error: no declaration named {name}");
                        return ExitStatus::InputError;
                    }
                },
            };
            println!("{}", json_text(&value));
            ExitStatus::Success
        }
        ExportFormat::Dot => {
            let Some(name) = name else {
                eprintln!("error: --format dot requires --name");
                return ExitStatus::InputError;
            };
            let lattice = match doc.find(name) {
                Some(Declaration::Lattice(d)) => d.lattice.clone(),
                Some(Declaration::Flows(d)) => match to_lattice(&d.relation) {
                    Ok((lattice, _)) => lattice,
                    Err(err) => {
                        eprintln!("error: {err}");
                        return ExitStatus::InputError;
                    }
                },
                _ => {
                    eprintln!("error: no lattice or flows declaration named {name}");
                    return ExitStatus::InputError;
                }
            };
            print!("{}", emit_dot(&lattice));
            ExitStatus::Success
        }
    }
}
