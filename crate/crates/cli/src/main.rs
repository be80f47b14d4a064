use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probdl::{
    oracle_probability, parse_kb, parse_query, pinpointing_bdd, var_map, Entailment, Error,
    KnowledgeBase, Options, Pinpointing, Query,
};
use serde_json::{json, Value};

/// Probabilistic reasoning over SHI knowledge bases.
#[derive(Parser)]
#[command(name = "probdl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability of the query, with explanation and BDD node counts.
    Prob(QueryArgs),
    /// Every minimal explanation, as the axioms it uses.
    Explain(QueryArgs),
    /// Whether the KB with every axiom present entails the query.
    Entails(QueryArgs),
    /// Parse the KB and summarize it.
    Check(CheckArgs),
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long)]
    query: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Stop enumerating explanations past this many.
    #[arg(long = "max-expl", default_value_t = 10_000,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_expl: u64,
    /// Cross-check the probability by enumerating worlds.
    #[arg(long)]
    oracle: bool,
    /// Print every rule application to stderr.
    #[arg(long)]
    trace: bool,
    /// Limit on tableaux created and on assertions per tableau.
    #[arg(long, env = "PROBDL_CAP", default_value_t = 100_000)]
    cap: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    kb: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failure and the exit status that reports it.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::ResourceCap { .. } | Error::Bdd(_) => 3,
            Error::OracleCap { .. } => 4,
            Error::ExplanationCap { .. } => 5,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Prob(a) => prob(&a),
        Command::Explain(a) => explain(&a),
        Command::Entails(a) => entails(&a),
        Command::Check(a) => check(&a),
    };
    match outcome {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_kb(path: &PathBuf) -> Result<KnowledgeBase, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })?;
    parse_kb(&text).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn options(a: &QueryArgs) -> Options {
    let mut opts = Options {
        max_explanations: usize::try_from(a.max_expl).unwrap_or(usize::MAX),
        ..Options::default()
    };
    opts.expansion.max_tableaux = a.cap;
    opts.expansion.max_assertions = a.cap;
    opts.expansion.trace = a.trace;
    opts
}

struct Run {
    kb: KnowledgeBase,
    query: Query,
    opts: Options,
    pp: Pinpointing,
    started: Instant,
}

fn run(a: &QueryArgs) -> Result<Run, Failure> {
    let started = Instant::now();
    let kb = load_kb(&a.kb)?;
    let query = parse_query(&a.query).map_err(|e| Failure {
        code: 2,
        message: format!("query: {e}"),
    })?;
    let opts = options(a);
    let pp = pinpointing_bdd(&kb, &query, &opts.expansion)?;
    for w in &pp.warnings {
        eprintln!("warning: {w}");
    }
    for line in &pp.trace {
        eprintln!("{line}");
    }
    Ok(Run {
        kb,
        query,
        opts,
        pp,
        started,
    })
}

/// Twelve significant digits, trailing zeros dropped.
fn fmt_prob(p: f64) -> String {
    if p == 0.0 {
        return "0".into();
    }
    let magnitude = p.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{p:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn axiom_texts(kb: &KnowledgeBase, ids: &[usize]) -> Vec<String> {
    ids.iter()
        .map(|&id| format!("{}.", kb.axioms[id]))
        .collect()
}

fn json_out(v: Value) -> String {
    format!(
        "{}\n",
        serde_json::to_string_pretty(&v).expect("JSON value")
    )
}

fn prob(a: &QueryArgs) -> Result<String, Failure> {
    let r = run(a)?;
    let mgr = &r.pp.manager;
    let probability = mgr.prob(r.pp.root, &var_map(&r.kb)).map_err(Error::from)?;
    let models = mgr.minimal_models_capped(r.pp.root, r.opts.max_explanations);
    let oracle = if a.oracle {
        Some(oracle_probability(&r.kb, &r.query, &r.opts)?)
    } else {
        None
    };
    let bdd_nodes = mgr.node_count(r.pp.root);
    let entailed = mgr.eval_all_true(r.pp.root);
    let elapsed_ms = r.started.elapsed().as_secs_f64() * 1e3;
    if a.format == Format::Json {
        let mut v = json!({
            "query": r.query.to_string(),
            "probability": probability,
            "entailed": entailed,
            "explanations": models
                .as_ref()
                .map(|m| m.iter().map(|e| axiom_texts(&r.kb, e)).collect::<Vec<_>>()),
            "bdd_nodes": bdd_nodes,
            "elapsed_ms": elapsed_ms,
        });
        if let Some(o) = oracle {
            v["oracle_probability"] = json!(o);
            v["oracle_difference"] = json!((probability - o).abs());
        }
        return Ok(json_out(v));
    }
    let mut out = format!("probability: {}\n", fmt_prob(probability));
    match &models {
        Some(m) => out += &format!("explanations: {}\n", m.len()),
        None => out += &format!("explanations: more than {}\n", r.opts.max_explanations),
    }
    out += &format!("bdd nodes: {bdd_nodes}\n");
    if let Some(o) = oracle {
        out += &format!("oracle probability: {}\n", fmt_prob(o));
        out += &format!("difference: {:e}\n", (probability - o).abs());
    }
    Ok(out)
}

fn explain(a: &QueryArgs) -> Result<String, Failure> {
    let r = run(a)?;
    let cap = r.opts.max_explanations;
    let models =
        r.pp.manager
            .minimal_models_capped(r.pp.root, cap)
            .ok_or(Error::ExplanationCap { cap })?;
    let sets: Vec<Vec<String>> = models.iter().map(|e| axiom_texts(&r.kb, e)).collect();
    if a.format == Format::Json {
        return Ok(json_out(json!({
            "query": r.query.to_string(),
            "count": sets.len(),
            "explanations": sets,
        })));
    }
    let mut out = format!("{} explanations\n", sets.len());
    for set in &sets {
        out.push('\n');
        for line in set {
            out += line;
            out.push('\n');
        }
    }
    Ok(out)
}

fn entails(a: &QueryArgs) -> Result<String, Failure> {
    let r = run(a)?;
    let verdict = Entailment::of(&r.pp.manager, r.pp.root);
    if a.format == Format::Json {
        return Ok(json_out(json!({
            "query": r.query.to_string(),
            "verdict": verdict.as_str(),
        })));
    }
    Ok(format!("{}\n", verdict.as_str()))
}

fn check(a: &CheckArgs) -> Result<String, Failure> {
    let kb = load_kb(&a.kb)?;
    let sig = kb.signature();
    let probabilistic = kb.probabilistic_count();
    if a.format == Format::Json {
        return Ok(json_out(json!({
            "axioms": kb.len(),
            "probabilistic": probabilistic,
            "tbox": kb.tbox.len(),
            "rbox": kb.rbox.len(),
            "abox": kb.abox.len(),
            "concepts": sig.concepts.len(),
            "roles": sig.roles.len(),
            "individuals": sig.individuals.len(),
        })));
    }
    Ok(format!(
        "{} axioms ({probabilistic} probabilistic)\n\
         tbox {}, rbox {}, abox {}\n\
         signature: {} concepts, {} roles, {} individuals\n",
        kb.len(),
        kb.tbox.len(),
        kb.rbox.len(),
        kb.abox.len(),
        sig.concepts.len(),
        sig.roles.len(),
        sig.individuals.len(),
    ))
}
