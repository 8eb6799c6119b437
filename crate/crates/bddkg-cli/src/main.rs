//! `bddkg`: validate BDD acceptance models, generate Gherkin suites and
//! coordination manifests, execute them against the built-in pick-and-place
//! simulator, and query model graphs.
//!
//! Exit codes: 0 success, 1 validation failures present, 2 usage or parse
//! error, 3 internal error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bddkg::codegen::{emit_gherkin, emit_manifest, CoordinationManifest};
use bddkg::dsl::{load_project, DslError, Project};
use bddkg::harness::{run_suite, HarnessError, RunConfig};
use bddkg::kg::{parse_jsonld, serialize_jsonld, Graph, Iri, PrefixContext, Term};
use bddkg::query::{construct, match_bgp, parse_query, Binding, Query};
use bddkg::shapes::{builtin_bdd_shapes, validate};
use bddkg::vocab;

#[derive(Parser)]
#[command(name = "bddkg", version, about = "BDD acceptance-criteria toolchain: knowledge graphs, Gherkin generation, and a deterministic pick-and-place harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a project and check it against the builtin metamodel shapes.
    Validate {
        /// Root .bdd file.
        root: PathBuf,
        /// Project namespace IRI (default: https://example.org/<root stem>).
        #[arg(long)]
        namespace: Option<String>,
    },
    /// Generate Gherkin feature files and the coordination manifest.
    Gen {
        /// Root .bdd file.
        root: PathBuf,
        /// Output directory.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        namespace: Option<String>,
    },
    /// Execute a generated manifest against the pick-and-place simulator.
    Run {
        /// manifest.json produced by `gen`.
        #[arg(long)]
        manifest: PathBuf,
        /// run.json with sweep combinations, repetitions, and fault model.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json and report.csv.
        #[arg(long, short)]
        out: PathBuf,
        /// Override the master seed of the run config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Match a basic graph pattern (or CONSTRUCT) against model graphs.
    Query {
        /// Input graphs: .jsonld documents or .bdd project roots.
        #[arg(required = true)]
        graphs: Vec<PathBuf>,
        /// Query file (.bgp).
        #[arg(long, short)]
        query: PathBuf,
        /// Extra context document whose prefixes extend the default.
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Validate { root, namespace } => cmd_validate(&root, namespace),
        Command::Gen { root, out, namespace } => cmd_gen(&root, &out, namespace),
        Command::Run { manifest, config, out, seed } => cmd_run(&manifest, &config, &out, seed),
        Command::Query { graphs, query, context, format } => cmd_query(&graphs, &query, context, format),
    }
}

fn load(root: &Path, namespace: Option<String>) -> Result<Project, CliError> {
    let namespace = namespace
        .map(|ns| Iri::new(ns).map_err(|e| CliError::Usage(e.to_string())))
        .transpose()?;
    load_project(root, namespace).map_err(dsl_error)
}

fn dsl_error(err: DslError) -> CliError {
    match err {
        DslError::Io { .. } => CliError::Internal(err.to_string()),
        _ => CliError::Usage(err.to_string()),
    }
}

fn cmd_validate(root: &Path, namespace: Option<String>) -> Result<u8, CliError> {
    let project = load(root, namespace)?;
    let report = validate(&project.graph, &builtin_bdd_shapes());
    if report.conforms() {
        println!("ok: {} triples conform to {} shapes", project.graph.len(), builtin_bdd_shapes().len());
        return Ok(0);
    }
    for v in &report.violations {
        let location = project
            .source_map
            .get(&v.focus)
            .map(|p| format!(" (declared at {p})"))
            .unwrap_or_default();
        println!(
            "violation: {} {} on {} at {}{}",
            v.kind,
            v.message,
            project.context.compact(&v.focus),
            project.context.compact(&v.path),
            location
        );
    }
    println!("{} violations", report.violations.len());
    Ok(1)
}

fn cmd_gen(root: &Path, out: &Path, namespace: Option<String>) -> Result<u8, CliError> {
    let project = load(root, namespace)?;
    let report = validate(&project.graph, &builtin_bdd_shapes());
    if !report.conforms() {
        eprintln!("refusing to generate from a non-conforming graph:\n{report}");
        return Ok(1);
    }
    let stories = project.graph.nodes_of_type(&vocab::user_story());
    if stories.is_empty() {
        eprintln!("no user stories in the project; nothing to generate");
        return Ok(1);
    }
    fs::create_dir_all(out).map_err(|e| CliError::Internal(format!("create {}: {e}", out.display())))?;

    for story in &stories {
        let document = emit_gherkin(&project.graph, &project.context, story)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let manifest = emit_manifest(&project.graph, &project.context, story)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        let feature_path = out.join(format!("{}.feature", story.local_name()));
        let manifest_path = if stories.len() == 1 {
            out.join("manifest.json")
        } else {
            out.join(format!("{}.manifest.json", story.local_name()))
        };
        write_file(&feature_path, &document.render())?;
        write_file(&manifest_path, &manifest.to_json_string())?;
        println!("wrote {}", feature_path.display());
        println!("wrote {}", manifest_path.display());
    }
    Ok(0)
}

fn cmd_run(manifest: &Path, config: &Path, out: &Path, seed: Option<u64>) -> Result<u8, CliError> {
    let manifest_text = read_file(manifest)?;
    let manifest = CoordinationManifest::from_json_str(&manifest_text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
    let config_text = read_file(config)?;
    let mut run_config = RunConfig::from_json_str(&config_text).map_err(harness_error)?;
    if let Some(seed) = seed {
        run_config.master_seed = seed;
    }

    let result = run_suite(&manifest, &run_config).map_err(harness_error)?;
    fs::create_dir_all(out).map_err(|e| CliError::Internal(format!("create {}: {e}", out.display())))?;
    let json_path = out.join("report.json");
    let csv_path = out.join("report.csv");
    write_file(&json_path, &result.report.to_json_string())?;
    write_file(&csv_path, &result.to_csv_string())?;
    println!("wrote {}", json_path.display());
    println!("wrote {}", csv_path.display());

    let passed: usize = result
        .report
        .combinations
        .iter()
        .filter_map(|c| c.outcomes.get("passed"))
        .sum();
    println!(
        "{} executions across {} combinations, {passed} passed",
        result.report.total_executions,
        result.report.combinations.len()
    );
    Ok(0)
}

fn harness_error(err: HarnessError) -> CliError {
    match err {
        HarnessError::InvalidConfig(_) | HarnessError::Manifest(_) => CliError::Usage(err.to_string()),
        _ => CliError::Internal(err.to_string()),
    }
}

fn cmd_query(
    graphs: &[PathBuf],
    query_path: &Path,
    context: Option<PathBuf>,
    format: Format,
) -> Result<u8, CliError> {
    let mut graph = Graph::new();
    let mut ctx = vocab::default_context();
    for path in graphs {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonld") => {
                let text = read_file(path)?;
                let (file_ctx, file_graph) = parse_jsonld(&text)
                    .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                for (prefix, ns) in file_ctx.prefixes() {
                    let _ = ctx.add_prefix(prefix, ns);
                }
                graph.merge(file_graph);
            }
            Some("bdd") => {
                let project = load(path, None)?;
                for (prefix, ns) in project.context.prefixes() {
                    let _ = ctx.add_prefix(prefix, ns);
                }
                graph.merge(project.graph);
            }
            _ => {
                return Err(CliError::Usage(format!(
                    "{}: expected a .jsonld or .bdd input",
                    path.display()
                )))
            }
        }
    }
    if let Some(path) = context {
        let text = read_file(&path)?;
        let (file_ctx, _) = parse_jsonld(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (prefix, ns) in file_ctx.prefixes() {
            let _ = ctx.add_prefix(prefix, ns);
        }
    }

    let query_text = read_file(query_path)?;
    let query: Query = parse_query(&query_text, &ctx)
        .map_err(|e| CliError::Usage(format!("{}: {e}", query_path.display())))?;

    match &query.construct {
        Some(template) => {
            let constructed = construct(&graph, template, &query.where_patterns)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            print!("{}", serialize_jsonld(&constructed, &ctx));
        }
        None => {
            let bindings = match_bgp(&graph, &query.where_patterns);
            print_bindings(&bindings, &ctx, format);
        }
    }
    Ok(0)
}

fn print_bindings(bindings: &[Binding], ctx: &PrefixContext, format: Format) {
    let term_string = |term: &Term| -> String {
        match term {
            Term::Iri(iri) => ctx.compact(iri),
            Term::Text(s) => s.clone(),
            Term::Number(n) => bddkg::kg::fmt_number(*n),
            Term::Boolean(b) => b.to_string(),
        }
    };
    match format {
        Format::Json => {
            let rows: Vec<BTreeMap<String, serde_json::Value>> = bindings
                .iter()
                .map(|b| {
                    b.iter()
                        .map(|(var, term)| {
                            let value = match term {
                                Term::Number(n) => serde_json::json!(n),
                                Term::Boolean(flag) => serde_json::json!(flag),
                                other => serde_json::json!(term_string(other)),
                            };
                            (var.clone(), value)
                        })
                        .collect()
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("bindings serialize"));
        }
        Format::Csv => {
            let mut vars: Vec<&String> = bindings.iter().flat_map(|b| b.keys()).collect();
            vars.sort();
            vars.dedup();
            println!("{}", vars.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(","));
            for binding in bindings {
                let row: Vec<String> = vars
                    .iter()
                    .map(|v| binding.get(*v).map(&term_string).unwrap_or_default())
                    .collect();
                println!("{}", row.join(","));
            }
        }
        Format::Text => {
            for (i, binding) in bindings.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                for (var, term) in binding {
                    println!("?{var} = {}", term_string(term));
                }
            }
            if bindings.is_empty() {
                println!("no matches");
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::Usage(format!("{}: not found", path.display())),
        _ => CliError::Internal(format!("{}: {e}", path.display())),
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}
