//! Command-line surface: analyze fiber graphs, evaluate monodromy data,
//! expand tails, synthesize chains, print bounds, enumerate chains and sum
//! families.
//!
//! Exit codes: 0 success, 1 parse failure, 2 validation failure, 3 search
//! failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fdtc_core::enumeration::{enumerate_chains, EnumSpec};
use fdtc_core::fiber::{delta_invariants, validate_fiber, DeltaBreakdown, FiberGraph, FiberReport};
use fdtc_core::monodromy::{
    assemble_fiber, check_bounds, delta_from_map, fdtc_all, lower_bound, validate_monodromy,
    verify_main_identity, BoundsReport, IdentityCheck, MonodromyData,
};
use fdtc_core::{
    chain_h, fdtc_from_chain, hj_expand, synthesize_chain, Error, Rational, SearchCaps, Valency,
};

#[derive(Parser)]
#[command(
    name = "fdtc",
    about = "Fractional Dehn twist coefficients and modular invariants, exactly",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a fiber graph file: principal components, chains, tails,
    /// delta invariants
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a monodromy file: twist coefficients, delta invariants,
    /// bounds
    Monodromy {
        file: PathBuf,
        /// Write the assembled fiber graph to this path
        #[arg(long, value_name = "OUT")]
        assemble: Option<PathBuf>,
        /// Check the fiber pipeline against the map pipeline
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check that both delta pipelines of a monodromy file agree
    Verify { file: PathBuf },
    /// Expand the Hirzebruch-Jung tail of a multiple-point valency
    Hj {
        /// Valency as m,lambda,sigma
        #[arg(long, value_parser = parse_valency)]
        valency: Valency,
    },
    /// Find the chain with the given boundary valencies and screw number
    SynthChain {
        #[arg(long, value_parser = parse_valency)]
        v1: Valency,
        #[arg(long, value_parser = parse_valency)]
        v2: Valency,
        /// Signed screw number, e.g. -1/12
        #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
        screw: Rational,
        #[arg(long)]
        amphidrome: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_entry: u64,
        #[arg(long, default_value_t = 64)]
        max_len: usize,
    },
    /// Lower bounds for non-zero twist coefficients at a genus
    Bounds {
        #[arg(long)]
        genus: u64,
        /// Only the bound for this node type
        #[arg(long = "type")]
        node_type: Option<u64>,
    },
    /// Enumerate chains within caps as a CSV table
    Enumerate {
        #[arg(long)]
        max_entry: u64,
        #[arg(long)]
        max_len: usize,
        /// Fill the bound and margin columns for this genus
        #[arg(long)]
        genus: Option<u64>,
        #[arg(long)]
        m_cap: Option<u64>,
        /// Enumerate amphidrome chains instead of plain ones
        #[arg(long)]
        amphidrome: bool,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum the delta invariants of several fiber files
    Family {
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn parse_valency(s: &str) -> Result<Valency, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected m,lambda,sigma, got `{s}`"));
    }
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| p.trim().parse::<u64>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    Valency::new(nums[0], nums[1], nums[2]).map_err(|e| e.to_string())
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

/// Failure with the documented exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::Parse(_) => 1,
            Error::ChainNotFound | Error::ChainAmbiguous(..) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version go to stdout with success
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { file, json } => cmd_analyze(&file, json),
        Command::Monodromy {
            file,
            assemble,
            verify,
            json,
        } => cmd_monodromy(&file, assemble.as_ref(), verify, json),
        Command::Verify { file } => cmd_monodromy(&file, None, true, false),
        Command::Hj { valency } => {
            let tail = hj_expand(&valency)?;
            println!("{}", join_entries(tail.entries()));
            Ok(())
        }
        Command::SynthChain {
            v1,
            v2,
            screw,
            amphidrome,
            max_entry,
            max_len,
        } => {
            let caps = SearchCaps { max_entry, max_len };
            let chain = synthesize_chain(&v1, &v2, &screw, amphidrome, caps)?;
            println!("{}", join_entries(chain.entries()));
            Ok(())
        }
        Command::Bounds { genus, node_type } => cmd_bounds(genus, node_type),
        Command::Enumerate {
            max_entry,
            max_len,
            genus,
            m_cap,
            amphidrome,
            out,
        } => cmd_enumerate(max_entry, max_len, genus, m_cap, amphidrome, out.as_ref()),
        Command::Family { files, json } => cmd_family(&files, json),
    }
}

fn join_entries(entries: &[u64]) -> String {
    entries
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_delta(out: &mut String, delta: &DeltaBreakdown, genus: Option<u64>) {
    if let Some(g) = genus {
        for i in 0..=g / 2 {
            let _ = writeln!(out, "delta_{i} = {}", delta.typed(i));
        }
    } else {
        for (i, q) in &delta.by_type {
            let _ = writeln!(out, "delta_{i} = {q}");
        }
    }
    if !delta.untyped.is_zero() {
        let _ = writeln!(out, "delta_untyped = {}", delta.untyped);
    }
    let _ = writeln!(out, "delta = {}", delta.total);
}

fn cmd_analyze(path: &PathBuf, json: bool) -> Result<(), Failure> {
    let graph = FiberGraph::from_json(&read_file(path)?)?;
    let validation = validate_fiber(&graph);
    if !validation.is_valid() {
        let mut msg = String::from("invalid fiber graph:");
        for v in &validation.violations {
            let _ = write!(msg, "\n  {v}");
        }
        return Err(Failure::validation(msg));
    }
    let report = delta_invariants(&graph)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    print!("{}", render_fiber_report(&report, &graph));
    Ok(())
}

fn render_fiber_report(report: &FiberReport, graph: &FiberGraph) -> String {
    let mut out = String::new();
    if let Some(g) = report.genus {
        let _ = writeln!(out, "genus: {g}");
    }
    let described: Vec<String> = report
        .principal
        .iter()
        .map(|id| {
            let v = graph.vertices.iter().find(|v| &v.id == id).unwrap();
            format!("{id} (mult {}, genus {})", v.mult, v.genus)
        })
        .collect();
    let _ = writeln!(out, "principal components: {}", described.join(", "));
    let _ = writeln!(out, "chains:");
    for c in &report.chains {
        let r = &c.report;
        let type_str = match c.node_type {
            Some(i) => i.to_string(),
            None => "unknown".to_string(),
        };
        let _ = writeln!(
            out,
            "  {}-{} {}  d={}  m={}  H={}  screw={}  fdtc={}  type={}{}",
            c.ends.0,
            c.ends.1,
            r.seq,
            r.d,
            r.orbit_len,
            r.h,
            r.screw,
            r.fdtc,
            type_str,
            if r.amphidrome { "  amphidrome" } else { "" }
        );
        let _ = writeln!(
            out,
            "    valencies {} {}",
            r.valency_start, r.valency_end
        );
    }
    let _ = writeln!(out, "tails:");
    for t in &report.tails {
        let _ = writeln!(
            out,
            "  {} {}  point valency {}",
            t.anchor, t.seq, t.valency
        );
    }
    render_delta(&mut out, &report.delta, report.genus);
    out
}

/// Machine-readable monodromy evaluation.
#[derive(Serialize, Deserialize)]
struct MonodromyReport {
    genus: u64,
    fdtc: BTreeMap<String, Rational>,
    delta: DeltaBreakdown,
    bounds: BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<IdentityCheck>,
}

fn cmd_monodromy(
    path: &PathBuf,
    assemble: Option<&PathBuf>,
    verify: bool,
    json: bool,
) -> Result<(), Failure> {
    let data = MonodromyData::from_json(&read_file(path)?)?;
    let validation = validate_monodromy(&data);
    if !validation.is_valid() {
        let mut msg = String::from("invalid monodromy data:");
        for v in &validation.violations {
            let _ = write!(msg, "\n  {v}");
        }
        return Err(Failure::validation(msg));
    }

    let fdtc = fdtc_all(&data)?;
    let delta = delta_from_map(&data)?;
    let bounds = check_bounds(&data)?;
    let identity = if verify {
        Some(verify_main_identity(&data)?)
    } else {
        None
    };

    if let Some(out) = assemble {
        let graph = assemble_fiber(&data)?;
        std::fs::write(out, graph.to_json())
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", out.display())))?;
    }

    if json {
        let report = MonodromyReport {
            genus: data.genus,
            fdtc,
            delta,
            bounds,
            identity,
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        if let Some(check) = &report.identity {
            if !check.equal {
                return Err(Failure::validation("delta pipelines disagree"));
            }
        }
        return Ok(());
    }

    let mut out = String::new();
    let _ = writeln!(out, "genus: {}", data.genus);
    let _ = writeln!(out, "fdtc:");
    for (id, c) in &fdtc {
        let _ = writeln!(out, "  {id}: {c}");
    }
    render_delta(&mut out, &delta, Some(data.genus));
    if bounds.all_ok() {
        let _ = writeln!(
            out,
            "bounds: all satisfied (overall {})",
            lower_bound(data.genus, None)?
        );
    } else {
        for c in bounds.checks.iter().filter(|c| !c.ok) {
            let _ = writeln!(
                out,
                "bounds: VIOLATED by {} (|c| = {} < {})",
                c.annulus, c.fdtc_abs, c.bound
            );
        }
    }
    if let Some(path) = assemble {
        let _ = writeln!(out, "assembled fiber written to {}", path.display());
    }
    if let Some(check) = &identity {
        let verdict = |eq: bool| if eq { "OK" } else { "MISMATCH" };
        let _ = writeln!(
            out,
            "delta: lhs {} = rhs {} {}",
            check.fiber.total,
            check.map.total,
            verdict(check.fiber.total == check.map.total)
        );
        for i in 0..=data.genus / 2 {
            let (l, r) = (check.fiber.typed(i), check.map.typed(i));
            let _ = writeln!(out, "delta_{i}: lhs {l} = rhs {r} {}", verdict(l == r));
        }
    }
    print!("{out}");
    if let Some(check) = &identity {
        if !check.equal {
            return Err(Failure::validation("delta pipelines disagree"));
        }
    }
    if !bounds.all_ok() {
        return Err(Failure::validation(
            "twist coefficients violate the lower bounds",
        ));
    }
    Ok(())
}

fn cmd_bounds(genus: u64, node_type: Option<u64>) -> Result<(), Failure> {
    match node_type {
        Some(i) => {
            println!("type {i}: {}", lower_bound(genus, Some(i))?);
        }
        None => {
            println!("overall: {}", lower_bound(genus, None)?);
            for i in 0..=genus / 2 {
                println!("type {i}: {}", lower_bound(genus, Some(i))?);
            }
        }
    }
    Ok(())
}

fn cmd_enumerate(
    max_entry: u64,
    max_len: usize,
    genus: Option<u64>,
    m_cap: Option<u64>,
    amphidrome: bool,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mut spec = EnumSpec::new(max_entry, max_len)?;
    spec.genus = genus;
    spec.m_cap = m_cap;
    spec.amphidrome = amphidrome.then_some(true);
    let bound = match genus {
        Some(g) => Some(lower_bound(g, None)?),
        None => None,
    };

    let mut csv = String::from("chain,d,H,m,c,bound,margin\n");
    for chain in enumerate_chains(&spec) {
        let h = chain_h(chain.seq());
        let c = fdtc_from_chain(&chain)?;
        let (bound_str, margin_str) = match &bound {
            Some(b) => ((b.to_string()), (&c.abs() - b).to_string()),
            None => (String::new(), String::new()),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            join_entries(chain.entries()),
            chain.d(),
            h,
            chain.orbit_len(),
            c,
            bound_str,
            margin_str
        );
    }
    match out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct FamilyReport {
    genus: Option<u64>,
    files: Vec<String>,
    delta: DeltaBreakdown,
}

fn cmd_family(files: &[PathBuf], json: bool) -> Result<(), Failure> {
    let mut reports = Vec::new();
    let mut names = Vec::new();
    for path in files {
        let graph = FiberGraph::from_json(&read_file(path)?)?;
        let validation = validate_fiber(&graph);
        if !validation.is_valid() {
            return Err(Failure::validation(format!(
                "invalid fiber graph {}: {}",
                path.display(),
                validation.violations.join("; ")
            )));
        }
        reports.push(delta_invariants(&graph)?);
        names.push(path.display().to_string());
    }
    let (genus, delta) = fdtc_core::fiber::family_delta(&reports)?;

    if json {
        let report = FamilyReport {
            genus,
            files: names,
            delta,
        };
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
        return Ok(());
    }
    for (name, r) in names.iter().zip(&reports) {
        println!("{name}: delta = {}", r.delta.total);
    }
    let mut out = String::new();
    render_delta(&mut out, &delta, genus);
    for line in out.lines() {
        println!("family {line}");
    }
    Ok(())
}
