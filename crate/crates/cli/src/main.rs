//! `dg` — command-line front end for the dependency-grammar toolkit.
//!
//! Subcommands:
//!
//! * `parse -g GRAMMAR [-i SENTENCES] [--emit ds,pm,fstruct,sem] [--format
//!   json|conll|sexp] [--max-analyses N]` — parse one sentence per input
//!   line and print every analysis.
//! * `validate [-i FILE] [--format json|conll]` — check dependency
//!   structures against the well-formedness axioms and print a violation
//!   report per structure.
//! * `convert --from ds|pm --to ds|pm [-i FILE] [--format json|conll]
//!   [--labels FILE]` — convert between dependency structures and
//!   head-annotated phrase markers.
//! * `cfg -g GRAMMAR` — print the equivalent context-free grammar.
//!
//! Exit codes: 0 on success (for `validate`, zero violations), 1 when
//! violations were found or some sentence had no parse, 2 on usage, format,
//! or I/O errors. Data goes to stdout, diagnostics to stderr, so pipelines
//! stay clean. Outputs are byte-stable: identical inputs produce identical
//! bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dg_core::axioms;
use dg_core::convert::{apply_labels, ds_to_pm, label_map, pm_to_ds, ConvertError};
use dg_core::ds::{
    ds_from_conll, ds_from_json, ds_to_conll, pm_from_sexp_stream, pm_to_sexp, DependencyStructure,
};
use dg_core::functional::{build_fstructure, render_semantics, resolve_control, to_semantics};
use dg_core::grammar::{gaifman_cfg, parse_grammar, validate_grammar, Grammar, Severity};
use dg_core::parser::{parse_with_cap, Analysis, ParseError, Sentence, DEFAULT_MAX_ANALYSES};

#[derive(Parser)]
#[command(name = "dg", version, about = "Dependency-grammar toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse sentences (one per line) and print every analysis
    Parse(ParseArgs),
    /// Check dependency structures against the well-formedness axioms
    Validate(ValidateArgs),
    /// Convert between dependency structures and phrase markers
    Convert(ConvertArgs),
    /// Print the context-free grammar constructed from a dependency grammar
    Cfg(CfgArgs),
}

#[derive(Args)]
struct ParseArgs {
    /// Grammar file
    #[arg(short, long)]
    grammar: PathBuf,
    /// Sentence file; standard input when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// What to print per analysis (comma-separated)
    #[arg(long, value_delimiter = ',', default_value = "ds")]
    emit: Vec<Emit>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cap on analyses per sentence; DG_MAX_ANALYSES also works, the flag wins
    #[arg(long)]
    max_analyses: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Structure file; standard input when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Input format: json (one structure) or conll (one per block)
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long, value_enum)]
    from: Side,
    #[arg(long, value_enum)]
    to: Side,
    /// Input file; standard input when absent
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Format of the dependency-structure side
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Label side channel: written on ds->pm, applied on pm->ds
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct CfgArgs {
    /// Grammar file
    #[arg(short, long)]
    grammar: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Ds,
    Pm,
    Fstruct,
    Sem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Conll,
    Sexp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Ds,
    Pm,
}

/// Anything that maps to exit code 2.
struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bail<E: fmt::Display>(e: E) -> CliError {
    CliError(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dg: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Parse(args) => cmd_parse(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Cfg(args) => cmd_cfg(args),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| CliError(format!("{}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError(format!("standard input: {e}")))?;
            Ok(buf)
        }
    }
}

/// Line reader over a file or standard input, so sentence processing stays
/// constant-memory in the sentence count.
fn open_lines(path: &Option<PathBuf>) -> Result<Box<dyn BufRead>, CliError> {
    match path {
        Some(p) => {
            let file = fs::File::open(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(file)))
        }
        None => Ok(Box::new(BufReader::new(std::io::stdin()))),
    }
}

fn load_grammar(path: &Path) -> Result<Grammar, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let g = parse_grammar(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    let diagnostics = validate_grammar(&g);
    let mut errors = 0;
    for d in &diagnostics {
        eprintln!("dg: {}: {d}", path.display());
        if d.severity == Severity::Error {
            errors += 1;
        }
    }
    if errors > 0 {
        return Err(CliError(format!(
            "{}: grammar has {errors} error(s)",
            path.display()
        )));
    }
    Ok(g)
}

fn resolve_cap(flag: Option<usize>) -> Result<usize, CliError> {
    let cap = match flag {
        Some(n) => n,
        None => match std::env::var("DG_MAX_ANALYSES") {
            Ok(v) => v
                .parse()
                .map_err(|_| CliError(format!("DG_MAX_ANALYSES: `{v}` is not a number")))?,
            Err(_) => DEFAULT_MAX_ANALYSES,
        },
    };
    if cap == 0 {
        return Err(CliError("the analysis cap must be positive".into()));
    }
    Ok(cap)
}

fn analysis_object(
    index: usize,
    analysis: &Analysis,
    emits: &[Emit],
    g: &Grammar,
) -> Result<Value, CliError> {
    let mut obj = serde_json::Map::new();
    obj.insert("analysis_index".into(), json!(index));
    for emit in emits {
        match emit {
            Emit::Ds => {
                let Value::Object(ds) = serde_json::to_value(analysis.ds()).map_err(bail)? else {
                    unreachable!("structures serialize to objects");
                };
                obj.extend(ds);
            }
            Emit::Pm => {
                let pm = ds_to_pm(analysis.ds()).map_err(bail)?;
                obj.insert("pm".into(), json!(pm_to_sexp(&pm)));
            }
            Emit::Fstruct | Emit::Sem => {
                let fs = build_fstructure(analysis).map_err(bail)?;
                let (resolved, notes) = resolve_control(&fs, analysis, g).map_err(bail)?;
                if *emit == Emit::Fstruct {
                    obj.insert("fstruct".into(), resolved.to_json());
                    let coref: serde_json::Map<String, Value> = notes
                        .iter()
                        .map(|n| (format!("x{}", n.variable), json!(n.antecedent)))
                        .collect();
                    obj.insert("coref".into(), Value::Object(coref));
                } else {
                    let term = to_semantics(&resolved, g).map_err(bail)?;
                    obj.insert("sem".into(), json!(render_semantics(&term, &notes)));
                }
            }
        }
    }
    Ok(Value::Object(obj))
}

fn cmd_parse(args: ParseArgs) -> Result<u8, CliError> {
    let mut emits = args.emit.clone();
    emits.dedup();
    match args.format {
        Format::Conll if emits != [Emit::Ds] => {
            return Err(CliError("--format conll only emits ds".into()));
        }
        Format::Sexp if emits != [Emit::Pm] => {
            return Err(CliError("--format sexp only emits pm".into()));
        }
        _ => {}
    }

    let g = load_grammar(&args.grammar)?;
    let cap = resolve_cap(args.max_analyses)?;

    let mut any_without_parse = false;
    for (lineno, line) in open_lines(&args.input)?.lines().enumerate() {
        let line = line.map_err(|e| CliError(format!("line {}: {e}", lineno + 1)))?;
        let Some(sentence) = Sentence::from_line(&line) else {
            continue;
        };
        let (analyses, truncated) = match parse_with_cap(&g, &sentence, cap) {
            Ok(analyses) => (analyses, false),
            Err(ParseError::Truncated { analyses, .. }) => (analyses, true),
            Err(e) => return Err(CliError(format!("line {}: {e}", lineno + 1))),
        };
        if analyses.is_empty() && !truncated {
            any_without_parse = true;
        }
        match args.format {
            Format::Json => {
                let mut records = Vec::with_capacity(analyses.len() + 1);
                for (i, a) in analyses.iter().enumerate() {
                    records.push(analysis_object(i, a, &emits, &g)?);
                }
                if truncated {
                    records.push(json!({"truncated": true, "max_analyses": cap}));
                }
                println!("{}", Value::Array(records));
            }
            Format::Conll => {
                for a in &analyses {
                    println!("{}", ds_to_conll(a.ds()).map_err(bail)?);
                }
                if truncated {
                    eprintln!(
                        "dg: line {}: output truncated at {cap} analyses",
                        lineno + 1
                    );
                }
            }
            Format::Sexp => {
                for a in &analyses {
                    let pm = ds_to_pm(a.ds()).map_err(bail)?;
                    println!("{}", pm_to_sexp(&pm));
                }
                if truncated {
                    eprintln!(
                        "dg: line {}: output truncated at {cap} analyses",
                        lineno + 1
                    );
                }
            }
        }
    }
    Ok(if any_without_parse { 1 } else { 0 })
}

fn read_ds_inputs(text: &str, format: Format) -> Result<Vec<DependencyStructure>, CliError> {
    match format {
        Format::Json => Ok(vec![ds_from_json(text).map_err(bail)?]),
        Format::Conll => ds_from_conll(text).map_err(bail),
        Format::Sexp => Err(CliError(
            "sexp is a phrase-marker format; use --format json or conll".into(),
        )),
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, CliError> {
    let input = read_input(&args.input)?;
    let structures = read_ds_inputs(&input, args.format)?;
    let mut any_violations = false;
    for ds in &structures {
        let report = axioms::validate(ds);
        any_violations |= !report.is_empty();
        println!("{}", serde_json::to_string(&report).map_err(bail)?);
    }
    Ok(if any_violations { 1 } else { 0 })
}

fn cmd_convert(args: ConvertArgs) -> Result<u8, CliError> {
    let input = read_input(&args.input)?;
    match (args.from, args.to) {
        (Side::Ds, Side::Pm) => {
            let structures = read_ds_inputs(&input, args.format)?;
            let mut maps = Vec::new();
            for ds in &structures {
                match ds_to_pm(ds) {
                    Ok(pm) => {
                        maps.push(label_map(ds));
                        println!("{}", pm_to_sexp(&pm));
                    }
                    Err(ConvertError::IllFormed(report)) => {
                        eprintln!(
                            "dg: structure is not a well-formed projective tree: {}",
                            serde_json::to_string(&report).map_err(bail)?
                        );
                        return Ok(1);
                    }
                    Err(e) => return Err(bail(e)),
                }
            }
            if let Some(path) = &args.labels {
                let payload = serde_json::to_string(&maps).map_err(bail)?;
                fs::write(path, payload + "\n")
                    .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            }
            Ok(0)
        }
        (Side::Pm, Side::Ds) => {
            let pms = pm_from_sexp_stream(&input).map_err(bail)?;
            let labels: Vec<BTreeMap<usize, String>> = match &args.labels {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
                    let maps: Vec<BTreeMap<usize, String>> =
                        serde_json::from_str(&text).map_err(bail)?;
                    if maps.len() != pms.len() {
                        return Err(CliError(format!(
                            "label file has {} entries for {} phrase markers",
                            maps.len(),
                            pms.len()
                        )));
                    }
                    maps
                }
                None => vec![BTreeMap::new(); pms.len()],
            };
            for (pm, labels) in pms.iter().zip(&labels) {
                let ds = pm_to_ds(pm).map_err(bail)?;
                let ds = apply_labels(&ds, labels).map_err(bail)?;
                emit_ds(&ds, args.format)?;
            }
            Ok(0)
        }
        (Side::Ds, Side::Ds) => {
            for ds in read_ds_inputs(&input, args.format)? {
                emit_ds(&ds, args.format)?;
            }
            Ok(0)
        }
        (Side::Pm, Side::Pm) => {
            for pm in pm_from_sexp_stream(&input).map_err(bail)? {
                println!("{}", pm_to_sexp(&pm));
            }
            Ok(0)
        }
    }
}

fn emit_ds(ds: &DependencyStructure, format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => println!("{}", serde_json::to_string(ds).map_err(bail)?),
        Format::Conll => println!("{}", ds_to_conll(ds).map_err(bail)?),
        Format::Sexp => unreachable!("rejected when reading"),
    }
    Ok(())
}

fn cmd_cfg(args: CfgArgs) -> Result<u8, CliError> {
    let g = load_grammar(&args.grammar)?;
    print!("{}", gaifman_cfg(&g).render());
    Ok(0)
}
