use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use satis_core::fragment::{FragmentBody, SectionSignature};
use satis_core::map::Intention;
use satis_core::memory::{load_memory, LoadError, Memory};
use satis_core::rdf::Iri;
use satis_core::resolver::{enumerate_plans, explain, parse_goal, resolve, to_dot, Limits, Plan, Report};
use satis_core::syntax::abbreviate_iri;

#[derive(Parser, Debug)]
#[command(name = "satis", version, about = "Goal-driven discovery of services from intentional maps")]
struct Cli {
    /// Memory directory (ontology/, services/, fragments/, maps/).
    #[arg(long, global = true, env = "SATIS_MEMORY")]
    memory: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, global = true, default_value_t = satis_core::resolver::DEFAULT_MAX_DEPTH as u32,
          value_parser = clap::value_parser!(u32).range(1..))]
    max_depth: u32,

    /// Match services and signatures without RDFS entailment.
    #[arg(long, global = true)]
    no_entail: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load the memory and report every diagnostic.
    Validate,
    /// Resolve a goal section into operationalisation plans.
    Resolve {
        /// verb=V,object=O[,source=start|sourceVerb=SV,sourceObject=SO][,strategy=S]
        #[arg(long)]
        goal: String,
    },
    /// List the contents of the memory.
    List {
        #[arg(value_enum)]
        what: Listing,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Listing {
    Fragments,
    Services,
    Maps,
}

/// Exit statuses: 0 success, 1 a clean run found nothing or found problems,
/// 2 usage or I/O trouble.
const OK: u8 = 0;
const NOTHING: u8 = 1;
const TROUBLE: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { TROUBLE } else { OK });
        }
    };
    let mut out = std::io::stdout().lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::from(OK)
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("satis: {e:#}");
            ExitCode::from(TROUBLE)
        }
    }
}

fn memory_dir(cli: &Cli) -> anyhow::Result<&PathBuf> {
    cli.memory
        .as_ref()
        .ok_or_else(|| anyhow!("no memory directory: pass --memory or set SATIS_MEMORY"))
}

fn run(cli: &Cli, out: &mut impl Write) -> anyhow::Result<u8> {
    let dir = memory_dir(cli)?;
    if cli.format == Format::Dot && !matches!(cli.command, Command::Resolve { .. }) {
        bail!("--format dot is only available for resolve");
    }
    if let Command::Validate = cli.command {
        return validate(dir, cli.format, out);
    }
    let memory = match load_memory(dir) {
        Ok(m) => m,
        Err(e @ LoadError::Io { .. }) => return Err(e.into()),
        Err(LoadError::Invalid(diags)) => {
            for d in &diags {
                eprintln!("{d}");
            }
            bail!("memory has {} problem(s); run `satis validate`", diags.len());
        }
    };
    match &cli.command {
        Command::Resolve { goal } => resolve_cmd(&memory, goal, cli, out),
        Command::List { what } => list(&memory, *what, cli.format, out),
        Command::Validate => unreachable!(),
    }
}

fn validate(dir: &Path, format: Format, out: &mut impl Write) -> anyhow::Result<u8> {
    let diags = match load_memory(dir) {
        Ok(_) => Vec::new(),
        Err(e @ LoadError::Io { .. }) => return Err(e.into()),
        Err(LoadError::Invalid(d)) => d,
    };
    if format == Format::Json {
        #[derive(Serialize)]
        struct Entry {
            file: Option<String>,
            line: Option<usize>,
            col: Option<usize>,
            code: String,
            message: String,
        }
        let entries: Vec<Entry> = diags
            .iter()
            .map(|d| Entry {
                file: d.file.as_ref().map(|p| p.display().to_string()),
                line: d.line,
                col: d.col,
                code: d.code.clone(),
                message: d.message.clone(),
            })
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&serde_json::json!({ "diagnostics": entries }))?)?;
    } else if diags.is_empty() {
        writeln!(out, "ok: no problems found in {}", dir.display())?;
    } else {
        for d in &diags {
            writeln!(out, "{d}")?;
        }
    }
    Ok(if diags.is_empty() { OK } else { NOTHING })
}

fn short(iri: &Iri, prefixes: &BTreeMap<String, String>) -> String {
    abbreviate_iri(iri, prefixes)
}

fn resolve_cmd(memory: &Memory, spec: &str, cli: &Cli, out: &mut impl Write) -> anyhow::Result<u8> {
    let goal = parse_goal(spec, &memory.prefixes)?;
    let limits = Limits { max_depth: cli.max_depth as usize, entail: !cli.no_entail };
    let root = resolve(&goal, memory, limits);
    let plans = enumerate_plans(&root);
    let p = &memory.prefixes;
    match cli.format {
        Format::Json => writeln!(out, "{}", Report::new(&root, &plans, p).to_json())?,
        Format::Dot => write!(out, "{}", to_dot(&root, p))?,
        Format::Text => {
            write!(out, "{}", explain(&root, p))?;
            writeln!(out)?;
            writeln!(out, "plans: {}", plans.len())?;
            for (i, plan) in plans.iter().enumerate() {
                write_plan(out, i + 1, plan, p)?;
            }
        }
    }
    Ok(if plans.is_empty() { NOTHING } else { OK })
}

fn write_plan(out: &mut impl Write, n: usize, plan: &Plan, p: &BTreeMap<String, String>) -> std::io::Result<()> {
    writeln!(out, "plan {n}")?;
    for c in &plan.choices {
        match &c.path {
            Some(path) => writeln!(out, "  {} via {} [{}]", c.goal.render(p), short(&c.rule, p), path.join(" -> "))?,
            None => writeln!(out, "  {} via {}", c.goal.render(p), short(&c.rule, p))?,
        }
    }
    for l in &plan.leaves {
        let names: Vec<String> = l.candidates.iter().map(|c| short(c, p)).collect();
        writeln!(out, "  candidates for {}: {}", l.goal.render(p), names.join(", "))?;
    }
    Ok(())
}

fn render_intention(i: &Intention, p: &BTreeMap<String, String>) -> String {
    match i {
        Intention::Ordinary { verb, object } => format!("{} {}", short(verb, p), short(object, p)),
        other => other.to_string(),
    }
}

fn render_signature(s: &SectionSignature, p: &BTreeMap<String, String>) -> String {
    let mut text = String::new();
    if let Some(src) = &s.source {
        text.push_str(&format!("{} -> ", render_intention(src, p)));
    }
    text.push_str(&format!("{} {}", short(&s.target_verb, p), short(&s.target_object, p)));
    if let Some(st) = &s.strategy {
        text.push_str(&format!(" by {}", short(st, p)));
    }
    text
}

fn list(memory: &Memory, what: Listing, format: Format, out: &mut impl Write) -> anyhow::Result<u8> {
    let p = &memory.prefixes;
    let rows: Vec<Vec<(&str, serde_json::Value)>> = match what {
        Listing::Fragments => memory
            .fragments
            .iter()
            .map(|f| {
                let kind = if f.is_operational() { "operational" } else { "intentional" };
                let body = match &f.body {
                    FragmentBody::Query { patterns, .. } => format!("{} pattern(s)", patterns.len()),
                    FragmentBody::Map(m) => format!("map of {} section(s)", m.sections().len()),
                };
                vec![
                    ("id", short(&f.id, p).into()),
                    ("kind", kind.into()),
                    ("signature", render_signature(&f.signature, p).into()),
                    ("body", body.into()),
                ]
            })
            .collect(),
        Listing::Services => memory
            .registry
            .services()
            .map(|s| {
                let concepts = |set: &std::collections::BTreeSet<Iri>| -> Vec<String> {
                    set.iter().map(|c| short(c, p)).collect()
                };
                vec![
                    ("id", short(&s.id, p).into()),
                    ("name", s.name.clone().into()),
                    ("inputs", concepts(&s.inputs).into()),
                    ("outputs", concepts(&s.outputs).into()),
                ]
            })
            .collect(),
        Listing::Maps => memory
            .maps
            .iter()
            .map(|m| {
                let intentions: Vec<String> = m.ordinary_intentions().iter().map(|i| render_intention(i, p)).collect();
                vec![
                    ("id", short(m.id(), p).into()),
                    ("sections", m.sections().len().into()),
                    ("intentions", intentions.into()),
                ]
            })
            .collect(),
    };
    if format == Format::Json {
        let objects: Vec<BTreeMap<&str, &serde_json::Value>> =
            rows.iter().map(|r| r.iter().map(|(k, v)| (*k, v)).collect()).collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&objects)?)?;
        return Ok(OK);
    }
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .map(|(k, v)| match v {
                serde_json::Value::String(s) => format!("{k}={s}"),
                serde_json::Value::Array(items) => {
                    let items: Vec<&str> = items.iter().filter_map(|i| i.as_str()).collect();
                    format!("{k}=[{}]", items.join(" "))
                }
                other => format!("{k}={other}"),
            })
            .collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(OK)
}
