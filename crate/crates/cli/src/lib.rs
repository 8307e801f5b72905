//! Command-line front end: argument parsing, file I/O, reports and exit codes.
//!
//! Exit codes: 0 success, 1 a negative verdict, 2 usage or input errors (malformed JSON is
//! reported with line and column), 3 numerical breakdown.

pub mod acceptance;
pub mod corpus;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use qsym_core::deck::{
    example_equivariant_torus, example_four_sheeted_path, example_nontrivial_2sheet_circle,
    example_sphere_linebundle, example_trivial_2sheet_circle, fiber_invariant_profile, profile_csv, profile_range,
    sampled_continuity_check, verify_fibered, FiberedQuantumPermutation, SampledBase,
};
use qsym_core::game::{
    correlation_from_witness, hom_profile_compare, is_perfect_strategy, is_valid_correlation, Correlation, GameInstance,
};
use qsym_core::graphs::{
    automorphism_search, coherent_algebra, find_disjoint_pairs, hom_count, rado_truncation, Graph,
};
use qsym_core::linalg::random_unitary;
use qsym_core::qaut::{
    coherent_commutation_check, complement_invariance_check, disjoint_pair_qaut, distance_orthogonality_check,
    is_quantum_automorphism, orthogonality_form_check,
};
use qsym_core::qperm::decompose;
use qsym_core::weyl::{verify_weyl_relations, weyl_qperm, FiniteAbelianGroup};
use qsym_core::{ComplexMatrix, Permutation, QuantumPermutation, TolerancePolicy};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: malformed JSON at line {line}, column {column}: {message}")]
    Json { path: String, line: usize, column: usize, message: String },
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Core(#[from] qsym_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(qsym_core::Error::Unverified(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "qsym", version, about = "Quantum permutations, quantum graph automorphisms and quantum deck transformations")]
pub struct Cli {
    /// Absolute tolerance for verification.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative tolerance for rank and nullspace decisions.
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the produced artifact (or report) to this file.
    #[arg(long, global = true)]
    pub emit: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the magic-unitary conditions of a quantum permutation.
    Verify { file: PathBuf },
    /// Split a quantum permutation into irreducibles.
    Decompose { file: PathBuf },
    /// Build the Weyl quantum permutation π^g, or check the Weyl relations.
    Weyl {
        /// Cyclic orders, e.g. "2" or "2,2".
        #[arg(long)]
        group: String,
        /// Unitary g as a matrix JSON file; seeded Haar sample when absent.
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long)]
        relations: bool,
    },
    #[command(subcommand)]
    Graph(GraphCommand),
    #[command(subcommand)]
    Qaut(QautCommand),
    #[command(subcommand)]
    Game(GameCommand),
    #[command(subcommand)]
    Deck(DeckCommand),
    /// Run acceptance criteria: "all" or a comma separated list of numbers.
    Acceptance {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Write the standard test corpus and its manifest.
    Corpus {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Primes ≡ 1 mod 4 up to the bound, joined by quadratic residuosity.
    Rado {
        #[arg(long)]
        bound: u64,
    },
    /// Number of homomorphisms from the pattern to the target.
    Homcount { pattern: PathBuf, target: PathBuf },
    /// Automorphisms by backtracking.
    Autos {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Coherent configuration (2-dimensional Weisfeiler–Leman).
    Coherent { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum QautCommand {
    /// Quantum automorphism checks of a quantum permutation on a graph.
    Check {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        qperm: PathBuf,
    },
    /// Quantum automorphism from two disjoint automorphisms.
    Disjoint {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Images, e.g. "1,0,2,3"; the first disjoint pair found is used when absent.
        #[arg(long)]
        sigma: Option<String>,
        #[arg(long)]
        tau: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    /// Decide whether a correlation wins the isomorphism game perfectly.
    Check {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        correlation: PathBuf,
    },
    /// Correlation induced by a quantum isomorphism witness.
    Witness {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        qperm: PathBuf,
    },
    /// Compare homomorphism counts from the planar catalog.
    Profile {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DeckExample {
    Circle2,
    Circle2nt,
    Sphere,
    Torus,
    Z4,
}

#[derive(Debug, Subcommand)]
pub enum DeckCommand {
    /// Generate one of the example deck transformations.
    Gen {
        #[arg(long, value_enum)]
        example: DeckExample,
        /// Circle samples, or samples per direction on the sphere and torus.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        g: Option<PathBuf>,
    },
    /// Verify a sampled deck transformation.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        lipschitz: f64,
    },
    /// Fiber-invariant profile as CSV.
    Profile { file: PathBuf },
}

/// What a command produced: exit code and text for stdout.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = policy(cli)?;
    match &cli.command {
        Command::Verify { file } => {
            let q: QuantumPermutation = load(file)?;
            let report = q.verify(&tol);
            let value = json!({
                "report": report,
                "n": q.n(),
                "d": q.d(),
                "max_commutator": q.max_commutator(),
                "classical": q.is_classical(&tol),
            });
            report_out(cli, &value, report.valid)
        }
        Command::Decompose { file } => {
            let q: QuantumPermutation = load(file)?;
            let report = decompose(&q, cli.seed, &tol)?;
            report_out(cli, &serde_json::to_value(&report).map_err(qsym_core::Error::from)?, true)
        }
        Command::Weyl { group, g, relations } => {
            let group = FiniteAbelianGroup::parse(group)?;
            if *relations {
                let report = verify_weyl_relations(&group, &tol)?;
                return report_out(cli, &to_value(&report)?, report.valid);
            }
            let g = match g {
                Some(path) => load::<ComplexMatrix>(path)?,
                None => random_unitary(group.order(), cli.seed)?,
            };
            let q = weyl_qperm(&group, &g, &tol)?;
            artifact_out(cli, &q, json!({ "n": q.n(), "d": q.d(), "valid": q.verify(&tol).valid }))
        }
        Command::Graph(cmd) => graph_command(cli, cmd),
        Command::Qaut(cmd) => qaut_command(cli, cmd, &tol),
        Command::Game(cmd) => game_command(cli, cmd, &tol),
        Command::Deck(cmd) => deck_command(cli, cmd, &tol),
        Command::Acceptance { suite } => {
            let ids: Vec<u8> = if suite == "all" {
                acceptance::CRITERIA.iter().map(|(k, _)| *k).collect()
            } else {
                suite
                    .split(',')
                    .map(|s| s.trim().parse::<u8>().ok().filter(|k| (1..=12).contains(k)))
                    .collect::<Option<_>>()
                    .ok_or_else(|| CliError::Usage(format!("--suite expects \"all\" or numbers 1-12, got {suite:?}")))?
            };
            let outcomes = acceptance::run(&ids);
            let passed = outcomes.iter().all(|o| o.passed);
            if let Some(path) = &cli.emit {
                write_text(path, &pretty(&outcomes)?)?;
            }
            let stdout = match cli.format {
                Format::Json => pretty(&outcomes)?,
                _ => {
                    let mut s: String = outcomes.iter().map(|o| o.line() + "\n").collect();
                    let count = outcomes.iter().filter(|o| o.passed).count();
                    let _ = writeln!(s, "{count}/{} criteria passed", outcomes.len());
                    s
                }
            };
            Ok(Outcome { code: if passed { 0 } else { 1 }, stdout })
        }
        Command::Corpus { out } => {
            let c = corpus::write(cli.seed, out)?;
            let summary = json!({
                "out": out.display().to_string(),
                "qperm_files": c.qperms.len(),
                "deck_files": c.decks.len(),
                "seed": cli.seed,
            });
            Ok(Outcome { code: 0, stdout: render(cli.format, &summary)? })
        }
    }
}

fn graph_command(cli: &Cli, cmd: &GraphCommand) -> Result<Outcome, CliError> {
    match cmd {
        GraphCommand::Rado { bound } => {
            let x = rado_truncation(*bound)?;
            artifact_out(cli, &x, json!({ "vertices": x.n(), "edges": x.edge_count() }))
        }
        GraphCommand::Homcount { pattern, target } => {
            let (p, x) = (load_graph(pattern)?, load_graph(target)?);
            report_out(cli, &json!({ "count": hom_count(&p, &x)? }), true)
        }
        GraphCommand::Autos { file, limit } => {
            let x = load_graph(file)?;
            report_out(cli, &to_value(&automorphism_search(&x, *limit)?)?, true)
        }
        GraphCommand::Coherent { file } => {
            let x = load_graph(file)?;
            report_out(cli, &to_value(&coherent_algebra(&x)?)?, true)
        }
    }
}

fn qaut_command(cli: &Cli, cmd: &QautCommand, tol: &TolerancePolicy) -> Result<Outcome, CliError> {
    match cmd {
        QautCommand::Check { graph, qperm } => {
            let x = load_graph(graph)?;
            let q: QuantumPermutation = load(qperm)?;
            let adjacency = is_quantum_automorphism(&x, &q, tol)?;
            let value = json!({
                "adjacency": adjacency,
                "orthogonality": orthogonality_form_check(&x, &q, tol)?,
                "distance": distance_orthogonality_check(&x, &q, tol)?,
                "coherent": coherent_commutation_check(&x, &q, tol)?,
                "complement": complement_invariance_check(&x, &q, tol)?,
            });
            report_out(cli, &value, adjacency.is_qaut)
        }
        QautCommand::Disjoint { graph, k, sigma, tau } => {
            let x = load_graph(graph)?;
            let (sigma, tau) = match (sigma, tau) {
                (Some(s), Some(t)) => (Permutation::parse(s)?, Permutation::parse(t)?),
                (None, None) => {
                    let autos = automorphism_search(&x, 5000)?.maps;
                    let &(a, b) = find_disjoint_pairs(&autos)
                        .first()
                        .ok_or_else(|| CliError::Usage("graph has no pair of disjoint automorphisms".into()))?;
                    (autos[a].clone(), autos[b].clone())
                }
                _ => return Err(CliError::Usage("give both --sigma and --tau, or neither".into())),
            };
            let q = disjoint_pair_qaut(&x, &sigma, &tau, *k)?;
            let summary = json!({
                "n": q.n(),
                "d": q.d(),
                "sigma": sigma.images(),
                "tau": tau.images(),
                "commutant_dimension": qsym_core::qperm::commutant_dimension(&q, tol)?,
            });
            artifact_out(cli, &q, summary)
        }
    }
}

fn game_command(cli: &Cli, cmd: &GameCommand, tol: &TolerancePolicy) -> Result<Outcome, CliError> {
    match cmd {
        GameCommand::Check { x, y, correlation } => {
            let game = GameInstance::new(load_graph(x)?, load_graph(y)?);
            let p: Correlation = load(correlation)?;
            let report = is_perfect_strategy(&game, &p)?;
            let value = json!({ "valid_correlation": is_valid_correlation(&p), "report": report });
            report_out(cli, &value, report.perfect)
        }
        GameCommand::Witness { x, y, qperm } => {
            let game = GameInstance::new(load_graph(x)?, load_graph(y)?);
            let q: QuantumPermutation = load(qperm)?;
            let p = correlation_from_witness(&game, &q, tol)?;
            let perfect = is_perfect_strategy(&game, &p)?.perfect;
            artifact_out(cli, &p, json!({ "inputs": p.n_inputs(), "perfect": perfect }))
        }
        GameCommand::Profile { x, y } => {
            let r = hom_profile_compare(&load_graph(x)?, &load_graph(y)?)?;
            report_out(cli, &to_value(&r)?, true)
        }
    }
}

fn deck_command(cli: &Cli, cmd: &DeckCommand, tol: &TolerancePolicy) -> Result<Outcome, CliError> {
    match cmd {
        DeckCommand::Gen { example, samples, g } => {
            let g = match g {
                Some(path) => load::<ComplexMatrix>(path)?,
                None => random_unitary(2, cli.seed)?,
            };
            let f = match example {
                DeckExample::Circle2 => example_trivial_2sheet_circle(samples.unwrap_or(256))?,
                DeckExample::Circle2nt => example_nontrivial_2sheet_circle(samples.unwrap_or(256))?,
                DeckExample::Sphere => {
                    let k = samples.unwrap_or(32);
                    example_sphere_linebundle(&SampledBase::sphere(k, k)?)?
                }
                DeckExample::Torus => {
                    let k = samples.unwrap_or(32);
                    example_equivariant_torus(k, k, &g, tol)?
                }
                DeckExample::Z4 => example_four_sheeted_path(samples.unwrap_or(256), &g, tol)?,
            };
            let summary = json!({ "samples": f.fibers().len(), "sheets": f.covering().sheets(), "d": f.d() });
            artifact_out(cli, &f, summary)
        }
        DeckCommand::Verify { file, lipschitz } => {
            let f: FiberedQuantumPermutation = load(file)?;
            let report = verify_fibered(&f, tol);
            let continuity = sampled_continuity_check(&f, *lipschitz);
            report_out(cli, &json!({ "report": report, "continuity": continuity }), report.valid)
        }
        DeckCommand::Profile { file } => {
            let f: FiberedQuantumPermutation = load(file)?;
            let profile = fiber_invariant_profile(&f);
            let csv = profile_csv(&f, &profile);
            match &cli.emit {
                Some(path) => {
                    write_text(path, &csv)?;
                    let summary = json!({ "samples": profile.len(), "leading_range": profile_range(&profile) });
                    Ok(Outcome { code: 0, stdout: render(cli.format, &summary)? })
                }
                None => Ok(Outcome { code: 0, stdout: csv }),
            }
        }
    }
}

fn policy(cli: &Cli) -> Result<TolerancePolicy, CliError> {
    let default = TolerancePolicy::default();
    TolerancePolicy::new(cli.tol.unwrap_or(default.atol), cli.rank_tol.unwrap_or(default.rank_tol))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        load(path)
    } else {
        Ok(Graph::parse(&text)?)
    }
}

fn to_value(v: &impl Serialize) -> Result<Value, CliError> {
    Ok(serde_json::to_value(v).map_err(qsym_core::Error::from)?)
}

fn pretty(v: &impl Serialize) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(qsym_core::Error::from)?;
    s.push('\n');
    Ok(s)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// `key: value` lines for scalars, with nested objects flattened by dotted keys and arrays
/// summarised by length.
fn text_lines(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                text_lines(&key, inner, out);
            }
        }
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) && items.len() <= 16 => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            let _ = writeln!(out, "{prefix}: [{}]", parts.join(", "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{prefix}: {} items", items.len());
        }
        other => {
            let _ = writeln!(out, "{prefix}: {other}");
        }
    }
}

fn render(format: Format, v: &Value) -> Result<String, CliError> {
    match format {
        Format::Json => pretty(v),
        Format::Text => {
            let mut s = String::new();
            text_lines("", v, &mut s);
            Ok(s)
        }
        Format::Csv => Err(CliError::Usage("CSV output is only available for deck profiles".into())),
    }
}

fn report_out(cli: &Cli, value: &Value, verdict: bool) -> Result<Outcome, CliError> {
    if let Some(path) = &cli.emit {
        write_text(path, &pretty(value)?)?;
    }
    Ok(Outcome { code: if verdict { 0 } else { 1 }, stdout: render(cli.format, value)? })
}

fn artifact_out(cli: &Cli, artifact: &impl Serialize, summary: Value) -> Result<Outcome, CliError> {
    match &cli.emit {
        Some(path) => {
            write_text(path, &pretty(artifact)?)?;
            Ok(Outcome { code: 0, stdout: render(cli.format, &summary)? })
        }
        None => Ok(Outcome { code: 0, stdout: pretty(artifact)? }),
    }
}
