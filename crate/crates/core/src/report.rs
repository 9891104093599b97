//! Command-line front end: argument parsing, subcommand dispatch, JSON and
//! text reports, and DOT export.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::classify::{classify_lpa, ClassificationReport};
use crate::graph::{parse_graph_with, sinks, vertices_on_cycles, Graph, GraphError, ParseOptions};
use crate::lattice::{CosetRep, QuotientOrder};
use crate::matricial::{canonicalize, k_theory_presentation, matricial_representation};
use crate::matrix_ring::{classify_matrix_ring, MatrixRingInput, ShiftedMatrixRing};
use crate::monoid::{
    default_bounds, equiv_bounded, is_periodic_graph, is_periodic_oracle, leq_bounded, paper_bound_for,
    strong_order_unit_bounded, MonoidBounds, MonoidElement, MonoidError, OracleOutcome,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lpa-grade", version, about = "Graded-ring classification of Leavitt path algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Graph file, or `-` for standard input.
    file: PathBuf,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Require every edge endpoint to be declared with `vertex`.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Periodic,
    Equiv,
    Leq,
    StrongUnit,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide strongly graded / crossed product / skew group ring / group ring.
    Classify(GraphArgs),
    /// Graded matricial representation of a no-exit graph.
    Matricial {
        #[command(flatten)]
        graph: GraphArgs,
        /// Reduce to the canonical form under the shift moves.
        #[arg(long)]
        canonical: bool,
    },
    /// Presentation of the graded Grothendieck group with its order-unit.
    Ktheory(GraphArgs),
    /// Bounded rewriting checks in the graph monoid.
    Monoid {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum)]
        check: Check,
        /// Element such as `v@0+2*w@1`.
        #[arg(long)]
        element: String,
        /// Right-hand element for `equiv` and `leq`.
        #[arg(long)]
        element2: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        width_cap: Option<usize>,
        /// Largest period (`periodic`) or multiple of 1_E (`strong-unit`).
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// Classify a shifted matrix ring given as JSON `{"rank", "support", "shifts"}`.
    MatrixRing {
        /// JSON file, or `-` for standard input.
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Export the graph in DOT format.
    Dot(GraphArgs),
}

/// The machine-readable report envelope.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool_version: &'static str,
    pub input_digest: String,
    pub subcommand: &'static str,
    pub payload: Value,
    pub bounds_used: Value,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string() }
    }

    fn resource(message: impl ToString) -> Self {
        Failure { code: EXIT_RESOURCE, message: message.to_string() }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::CycleLimit { .. } | GraphError::CountOverflow => Failure::resource(e),
            _ => Failure::input(e),
        }
    }
}

impl From<MonoidError> for Failure {
    fn from(e: MonoidError) -> Self {
        match e {
            MonoidError::Graph(g) => g.into(),
            MonoidError::Overflow => Failure::resource(e),
            _ => Failure::input(e),
        }
    }
}

struct Output {
    json: bool,
    document: ReportDocument,
    text: String,
    code: i32,
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    let mut bytes = Vec::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_end(&mut bytes).map_err(|e| Failure::input(format!("stdin: {e}")))?;
    } else {
        bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(bytes)
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn load_graph(args: &GraphArgs) -> Result<(Graph, String), Failure> {
    let bytes = read_input(&args.file)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Failure::input("input is not valid UTF-8"))?;
    let g = parse_graph_with(text, ParseOptions { strict: args.strict })?;
    Ok((g, digest(&bytes)))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize to JSON")
}

fn document(subcommand: &'static str, input_digest: String, payload: Value, bounds_used: Value) -> ReportDocument {
    ReportDocument { tool_version: env!("CARGO_PKG_VERSION"), input_digest, subcommand, payload, bounds_used }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn classification_text(g: &Graph, r: &ClassificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vertices: {}, edges: {}", g.vertex_count(), g.edge_count());
    let _ = writeln!(s, "no sinks: {}", yes(r.no_sinks));
    let _ = writeln!(s, "no exit: {}", yes(r.no_exit));
    if let Some(edl) = &r.edl {
        let _ = writeln!(s, "condition EDL: {}", if edl.overall { "holds" } else { "fails" });
        for e in &edl.cycles {
            let residues: Vec<String> = e.residue_counts.iter().map(|(r, c)| format!("{r}:{c}")).collect();
            let k = e.k.map_or_else(|| "-".to_string(), |k| k.to_string());
            let _ = writeln!(s, "  cycle {} (m={}): residues {} k={}", e.cycle, e.m, residues.join(" "), k);
        }
    }
    let _ = writeln!(s, "strongly graded: {}", yes(r.strongly_graded));
    let _ = writeln!(s, "crossed product: {}", yes(r.crossed_product));
    let _ = writeln!(s, "skew group ring: {}", yes(r.skew_group_ring));
    let _ = writeln!(s, "group ring: {}", yes(r.group_ring));
    let _ = writeln!(s, "graded unit-regular: {}", yes(r.graded_unit_regular));
    let w = &r.witnesses;
    if !w.sinks.is_empty() {
        let _ = writeln!(s, "sinks: {}", w.sinks.join(", "));
    }
    if let Some(c) = &w.exit_cycle {
        let _ = writeln!(s, "cycle with exit: {c}");
    }
    if let Some(c) = &w.edl_failing_cycle {
        let _ = writeln!(s, "EDL fails at: {c}");
    }
    s
}

fn outcome_text(outcome: &OracleOutcome) -> String {
    match outcome {
        OracleOutcome::Proved { certificate } => {
            let mut s = format!(
                "proved at horizon {} ({} + {} rewrite batches)",
                certificate.horizon,
                certificate.steps_left.len(),
                certificate.steps_right.len()
            );
            if let Some(n) = certificate.period {
                let _ = write!(s, ", period {n}");
            }
            if let Some(n) = certificate.multiple {
                let _ = write!(s, ", multiple {n}");
            }
            s
        }
        OracleOutcome::Unknown { truncated, horizon } => {
            format!("unknown within bounds (horizon {horizon}{})", if *truncated { ", truncated" } else { "" })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_monoid(
    args: &GraphArgs,
    check: Check,
    element: &str,
    element2: Option<&str>,
    depth: Option<usize>,
    width_cap: Option<usize>,
    nmax: Option<u64>,
) -> Result<Output, Failure> {
    let (g, input_digest) = load_graph(args)?;
    let a = MonoidElement::parse(&g, element)?;
    let defaults = default_bounds(&g)?;
    let mut bounds = MonoidBounds {
        depth: depth.unwrap_or(defaults.depth),
        width_cap: width_cap.unwrap_or(defaults.width_cap),
        ..defaults
    };
    let second = || -> Result<MonoidElement, Failure> {
        let text = element2.ok_or_else(|| Failure::input("this check needs --element2"))?;
        Ok(MonoidElement::parse(&g, text)?)
    };
    let mut payload = json!({ "check": check.to_possible_value().map(|v| v.get_name().to_string()), "element": a.display(&g).to_string() });
    let outcome = match check {
        Check::Periodic => {
            bounds.n_max = nmax.unwrap_or(defaults.n_max);
            payload["graph_criterion"] = json!(is_periodic_graph(&g, &a)?);
            is_periodic_oracle(&g, &a, &bounds)?
        }
        Check::Equiv => {
            let b = second()?;
            payload["element2"] = json!(b.display(&g).to_string());
            equiv_bounded(&g, &a, &b, &bounds)
        }
        Check::Leq => {
            let b = second()?;
            payload["element2"] = json!(b.display(&g).to_string());
            leq_bounded(&g, &a, &b, &bounds)
        }
        Check::StrongUnit => {
            let paper = paper_bound_for(&g, &a)?;
            bounds.multiple_max = nmax.or(paper).unwrap_or(defaults.multiple_max);
            payload["paper_bound"] = json!(paper);
            strong_order_unit_bounded(&g, &a, &bounds)?
        }
    };
    let code = match &outcome {
        OracleOutcome::Unknown { truncated: true, .. } => EXIT_RESOURCE,
        _ => EXIT_OK,
    };
    let text = format!("{}: {}\n", payload["check"].as_str().unwrap_or_default(), outcome_text(&outcome));
    payload["outcome"] = to_value(&outcome);
    Ok(Output { json: args.json, document: document("monoid", input_digest, payload, to_value(&bounds)), text, code })
}

fn run_matrix_ring(input: &Path, json: bool) -> Result<Output, Failure> {
    let bytes = read_input(input)?;
    let parsed: MatrixRingInput =
        serde_json::from_slice(&bytes).map_err(|e| Failure::input(format!("matrix-ring input: {e}")))?;
    let ring = ShiftedMatrixRing::from_input(&parsed).map_err(Failure::input)?;
    let c = classify_matrix_ring(&ring);
    let q = ring.quotient();
    let order = match q.order() {
        QuotientOrder::Finite(n) => to_value(&QuotientOrder::Finite(n))["finite"].clone(),
        QuotientOrder::Infinite => json!("infinite"),
    };
    let mut payload = to_value(&c);
    payload["quotient"] = json!({
        "invariant_factors": to_value(&CosetRep(q.invariant_factors().to_vec())),
        "free_rank": q.free_rank(),
        "order": order,
    });
    payload["order_unit"] = to_value(&ring.order_unit());
    let text = format!(
        "strongly graded: {}\ncrossed product: {}\nskew group ring: {}\ngroup ring: {}\n",
        yes(c.strongly_graded),
        yes(c.crossed_product),
        yes(c.skew_group_ring),
        yes(c.group_ring)
    );
    Ok(Output { json, document: document("matrix-ring", digest(&bytes), payload, json!({})), text, code: EXIT_OK })
}

fn dispatch(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Classify(args) => {
            let (g, d) = load_graph(args)?;
            let report = classify_lpa(&g)?;
            Ok(Output {
                json: args.json,
                text: classification_text(&g, &report),
                document: document("classify", d, to_value(&report), json!({})),
                code: EXIT_OK,
            })
        }
        Command::Matricial { graph, canonical } => {
            let (g, d) = load_graph(graph)?;
            let mut a = matricial_representation(&g)?;
            if *canonical {
                a = canonicalize(&a);
            }
            let mut text = String::new();
            for b in &a.sink_blocks {
                let _ = writeln!(text, "sink {}: M_{}(K){:?}", b.sink, b.size(), b.shifts.counts());
            }
            for b in &a.cycle_blocks {
                let _ = writeln!(
                    text,
                    "cycle {}: M_{}(K[x^{m},x^-{m}]){:?}",
                    b.cycle,
                    b.size(),
                    b.shifts.counts(),
                    m = b.m
                );
            }
            Ok(Output {
                json: graph.json,
                text,
                document: document("matricial", d, to_value(&a), json!({ "canonical": canonical })),
                code: EXIT_OK,
            })
        }
        Command::Ktheory(args) => {
            let (g, d) = load_graph(args)?;
            let k = k_theory_presentation(&matricial_representation(&g)?);
            let text = serde_json::to_string(&k).expect("serializable") + "\n";
            Ok(Output {
                json: args.json,
                text,
                document: document("ktheory", d, to_value(&k), json!({})),
                code: EXIT_OK,
            })
        }
        Command::Monoid { graph, check, element, element2, depth, width_cap, nmax } => {
            run_monoid(graph, *check, element, element2.as_deref(), *depth, *width_cap, *nmax)
        }
        Command::MatrixRing { input, json } => run_matrix_ring(input, *json),
        Command::Dot(args) => {
            let (g, d) = load_graph(args)?;
            let dot = emit_dot(&g);
            Ok(Output {
                json: args.json,
                document: document("dot", d, json!({ "dot": dot }), json!({})),
                text: dot,
                code: EXIT_OK,
            })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(output) => {
            let written = if output.json {
                let mut s = serde_json::to_string_pretty(&output.document).expect("serializable");
                s.push('\n');
                out.write_all(s.as_bytes())
            } else {
                out.write_all(output.text.as_bytes())
            };
            if written.is_err() {
                return EXIT_INPUT;
            }
            output.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph with sinks boxed and cycle vertices drawn bold.
pub fn emit_dot(g: &Graph) -> String {
    let on_cycle = vertices_on_cycles(g);
    let sink_set = sinks(g);
    let mut s = String::from("digraph {\n");
    for v in g.vertex_ids() {
        let mut attrs = Vec::new();
        if sink_set.contains(&v) {
            attrs.push("shape=box, xlabel=\"sink\"");
        }
        if on_cycle[v.0] {
            attrs.push("style=bold, xlabel=\"cycle\"");
        }
        if attrs.is_empty() {
            let _ = writeln!(s, "  {};", quote(g.vertex_name(v)));
        } else {
            let _ = writeln!(s, "  {} [{}];", quote(g.vertex_name(v)), attrs.join(", "));
        }
    }
    for e in g.edges() {
        let _ = writeln!(
            s,
            "  {} -> {} [label={}];",
            quote(g.vertex_name(e.source)),
            quote(g.vertex_name(e.target)),
            quote(&e.id)
        );
    }
    s.push_str("}\n");
    s
}
