use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gauge_triple::clifford::{clifford_span_dimension, expected_span_dimension, sign_table_check, volume_form, Clifford};
use gauge_triple::conditions::{evaluate_all, hypothesis_check, ConditionConfig, HIGHER_RANK_WINDOW};
use gauge_triple::hochschild::{
    check_orientation_1graph, check_orientation_kgraph, orientation_cycle_1graph, orientation_cycle_unchecked,
    verify_cancellation_steps,
};
use gauge_triple::presentation::{components, Presentation};
use gauge_triple::spectral::{
    build_truncation, singular_profile, vertex_masses, vertex_of, whole_masses, zeta_residue,
};
use gauge_triple::trace::{default_end_values, kgraph_trace, ktheory_ranks, solve_graph_trace, Trace};

const EXIT_USAGE: u8 = 64;
const EXIT_VALIDATION: u8 = 65;
const EXIT_INPUT: u8 = 66;
const EXIT_CANT_CREATE: u8 = 73;

#[derive(Parser, Debug)]
#[command(name = "gauge-triple", version, about = "Gauge spectral triple checks for graph and k-graph algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Presentation document (JSON)
    input: PathBuf,
    /// Truncation level L
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    level: u32,
    /// Spectral window N
    #[arg(long, default_value_t = 100_000)]
    window: u64,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative tolerance for numeric checks
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structure, ends, entry counts and theorem hypotheses
    Analyze(Common),
    /// Faithful graph trace (or k-graph trace) values
    Trace(Common),
    /// Ranks of K_0 and K_1
    Ktheory(Common),
    /// Orientation cycle and its checks
    Hochschild {
        #[command(flatten)]
        common: Common,
        /// Verify b(c) = 0 and report the first failing proof step
        #[arg(long)]
        check_cycle: bool,
    },
    /// Clifford conventions and reality signs at the presentation's rank
    Clifford(Common),
    /// Singular-value profile of p_v(1+D²)^{-k/2} or (1+D²)^{-k/2}
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        vertex: Option<String>,
        /// Same as --format csv
        #[arg(long)]
        csv: bool,
    },
    /// The nine conditions
    Conditions(Common),
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_INPUT,
            Failure::Validation(_) => EXIT_VALIDATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Validation(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

/// Rendered output plus the exit code it carries.
struct Output {
    value: Value,
    csv: Option<String>,
    text: Option<String>,
    code: u8,
}

impl Output {
    fn json(value: Value) -> Self {
        Self {
            value,
            csv: None,
            text: None,
            code: 0,
        }
    }
}

fn load(common: &Common) -> Result<Presentation, Failure> {
    let text = std::fs::read_to_string(&common.input)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", common.input.display())))?;
    Presentation::parse(&text).map_err(invalid)
}

fn trace_of(p: &Presentation, depth: usize) -> Result<Trace, Failure> {
    match p {
        Presentation::Graph(g) => {
            let model = g.expand(depth).map_err(invalid)?;
            let gt = solve_graph_trace(g, &default_end_values(g)).map_err(invalid)?;
            Ok(gt.on_model(&model))
        }
        Presentation::KGraph(g) => kgraph_trace(g, None).map_err(invalid),
    }
}

fn analyze(p: &Presentation) -> Value {
    let hyp = hypothesis_check(p);
    match p {
        Presentation::Graph(g) => json!({
            "k": 1,
            "structure": g.structural_report(),
            "class": g.classify(),
            "ends": g.find_ends(),
            "single_entry": g.single_entry_check(),
            "hypotheses": hyp,
        }),
        Presentation::KGraph(g) => {
            let violations: Vec<Value> = g
                .single_exit_violations()
                .into_iter()
                .map(|(v, c, n)| json!({"vertex": v, "color": c, "entering": n}))
                .collect();
            json!({
                "k": g.rank(),
                "vertices": g.graph.vertex_count(),
                "edges": g.graph.edge_count(),
                "components": components(&g.graph),
                "single_exit": g.single_exit(),
                "single_exit_violations": violations,
                "hypotheses": hyp,
            })
        }
    }
}

fn trace_report(p: &Presentation) -> Result<Value, Failure> {
    match p {
        Presentation::Graph(g) => {
            let t = solve_graph_trace(g, &default_end_values(g)).map_err(invalid)?;
            Ok(json!({
                "faithful": t.is_faithful(),
                "trace_condition": t.satisfies_trace_condition(g),
                "trace": t.to_json_value(),
            }))
        }
        Presentation::KGraph(g) => {
            let t = kgraph_trace(g, None).map_err(invalid)?;
            let values: BTreeMap<String, String> = g
                .graph
                .vertex_ids()
                .map(|v| (g.graph.vertex_name(v).to_string(), t.vertex_value(v).to_string()))
                .collect();
            Ok(json!({
                "faithful": t.is_faithful(),
                "trace_condition": t.satisfies_trace_condition(),
                "trace": values,
            }))
        }
    }
}

fn hochschild(p: &Presentation, level: u32, check: bool) -> Result<Output, Failure> {
    match p {
        Presentation::Graph(g) => {
            let model = g.expand(level as usize + 2).map_err(invalid)?;
            if !check {
                return Ok(Output::json(orientation_cycle_1graph(&model).to_json_value()));
            }
            let r = check_orientation_1graph(&model).map_err(invalid)?;
            let ok = r.matches_formula && r.interior_zero && r.pi_d_identity && r.pi_d_fixes_basis;
            Ok(Output {
                code: if ok { 0 } else { 2 },
                ..Output::json(json!({"closed": ok, "report": r}))
            })
        }
        Presentation::KGraph(g) => {
            if !check {
                let c = orientation_cycle_unchecked(&g.graph).map_err(invalid)?;
                return Ok(Output::json(json!({
                    "k": c.k,
                    "scalar": c.scalar.to_string(),
                    "chain": c.chain.to_json_value(),
                })));
            }
            let steps = verify_cancellation_steps(&g.graph).map_err(invalid)?;
            let cycle = if g.single_exit() {
                Some(check_orientation_kgraph(g).map_err(invalid)?)
            } else {
                None
            };
            let ok = steps.boundary_zero
                && steps.failing_step.is_none()
                && cycle.as_ref().is_some_and(|c| c.pi_d_volume_form && c.pi_d_self_adjoint);
            Ok(Output {
                code: if ok { 0 } else { 2 },
                ..Output::json(json!({
                    "closed": steps.boundary_zero,
                    "failing_step": steps.failing_step,
                    "steps": steps,
                    "cycle": cycle,
                }))
            })
        }
    }
}

fn clifford(k: usize) -> Result<Value, Failure> {
    let c = Clifford::new(k).map_err(invalid)?;
    let vf = volume_form(k).map_err(invalid)?;
    let row = sign_table_check(k).map_err(invalid)?.pop().expect("one row per rank");
    Ok(json!({
        "k": k,
        "spinor_dim": c.dim(),
        "omega_squared": vf.omega_sq_scalar.map(|s| s.to_string()),
        "span_dimension": clifford_span_dimension(&c),
        "expected_span_dimension": expected_span_dimension(k),
        "reality": row,
    }))
}

fn spectral(p: &Presentation, common: &Common, vertex: Option<&str>) -> Result<Output, Failure> {
    if common.window < 100 {
        return Err(Failure::Usage(format!("--window must be at least 100, got {}", common.window)));
    }
    let t = trace_of(p, common.level as usize + 2)?;
    let tr = build_truncation(&t, common.level).map_err(invalid)?;
    let g = tr.graph().clone();
    let (masses, target) = match vertex {
        Some(name) => {
            let v = vertex_of(&g, name).map_err(invalid)?;
            (vertex_masses(&tr, v).map_err(invalid)?, Some(t.vertex_value(v).clone()))
        }
        None => (whole_masses(&tr).map_err(invalid)?, None),
    };
    let window = if g.rank() == 1 { common.window } else { common.window.min(HIGHER_RANK_WINDOW) };
    let profile = singular_profile(&masses, window).map_err(invalid)?;
    let mut value = profile.to_json_value();
    value["block_mass"] = json!(masses.per_block.to_string());
    value["spinor_dim"] = json!(masses.spinor_dim);
    if let Some(tau) = target {
        value["vertex"] = json!(vertex);
        value["trace"] = json!(tau.to_string());
    }
    if g.rank() == 1 {
        let s = 0.5 + 1.0 / (window as f64).ln();
        value["zeta_residue"] = json!(zeta_residue(&masses, window, s).map_err(invalid)?);
        value["zeta_s"] = json!(s);
    }
    Ok(Output {
        csv: Some(profile.to_csv()),
        ..Output::json(value)
    })
}

fn conditions(p: &Presentation, common: &Common) -> Result<Output, Failure> {
    let cfg = ConditionConfig {
        level: common.level,
        window: common.window,
        tolerance: common.tolerance,
        end_values: None,
    };
    let report = evaluate_all(p, &cfg).map_err(invalid)?;
    let mut text = String::new();
    for c in &report.conditions {
        let status = serde_json::to_value(c.status).expect("status serializes");
        text.push_str(&format!("{:<16}{}\n", c.name, status.as_str().unwrap_or("?")));
    }
    Ok(Output {
        value: report.to_json_value(),
        csv: None,
        text: Some(text),
        code: report.exit_code() as u8,
    })
}

/// Indented `key: value` lines for human reading.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x)));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if x.is_object() || x.is_array() {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar_text(x)));
                }
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar_text(x))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn execute(cli: Cli) -> Result<(Output, Common, Format), Failure> {
    let (common, output) = match cli.command {
        Command::Analyze(c) => {
            let p = load(&c)?;
            (c, Output::json(analyze(&p)))
        }
        Command::Trace(c) => {
            let p = load(&c)?;
            let v = trace_report(&p)?;
            (c, Output::json(v))
        }
        Command::Ktheory(c) => {
            let p = load(&c)?;
            let v = match &p {
                Presentation::Graph(g) => serde_json::to_value(ktheory_ranks(g).map_err(invalid)?).expect("serializes"),
                Presentation::KGraph(_) => {
                    return Err(Failure::Validation("K-theory ranks are implemented for 1-graphs".into()))
                }
            };
            (c, Output::json(v))
        }
        Command::Hochschild { common, check_cycle } => {
            let p = load(&common)?;
            let out = hochschild(&p, common.level, check_cycle)?;
            (common, out)
        }
        Command::Clifford(c) => {
            let p = load(&c)?;
            let v = clifford(p.rank())?;
            (c, Output::json(v))
        }
        Command::Spectral { mut common, vertex, csv } => {
            if csv {
                common.format = Format::Csv;
            }
            let p = load(&common)?;
            let out = spectral(&p, &common, vertex.as_deref())?;
            (common, out)
        }
        Command::Conditions(c) => {
            let p = load(&c)?;
            let out = conditions(&p, &c)?;
            (c, out)
        }
    };
    let format = common.format;
    Ok((output, common, format))
}

fn render(output: &Output, format: Format) -> Result<String, Failure> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&output.value).expect("json") + "\n"),
        Format::Csv => output
            .csv
            .clone()
            .ok_or_else(|| Failure::Usage("csv output is available for the spectral subcommand only".into())),
        Format::Text => Ok(output.text.clone().unwrap_or_else(|| {
            let mut s = String::new();
            render_text(&output.value, 0, &mut s);
            s
        })),
    }
}

fn run(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(cli).and_then(|(output, common, format)| {
        let body = render(&output, format)?;
        Ok((output.code, common.out, body))
    });
    match result {
        Ok((code, out, body)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, body)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CANT_CREATE
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
