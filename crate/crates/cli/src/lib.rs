//! `dsut` command-line front end: loads fact files, runs validation,
//! template generation or bound estimation, and maps findings to exit codes.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 parse error, 3 model or
//! validation error, 4 consistency criterion violated. Reports go to standard
//! output, diagnostics to standard error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsut_core::bounds::{bounds_report, check_against_generation, layer_counts, Bounds};
use dsut_core::generate::{declared_requirements, TemplateKind, TestTemplate};
use dsut_core::validate::{has_errors, lint_phantom_risk, validate_model, validate_requirements};
use dsut_core::{
    parse_facts, run_strategy, ComponentRef, Diagnostic, Execution, FactSet, Mode, PathLimits,
    StrategyConfig, StrategyReport, SystemModel,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_CRITERION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "dsut",
    version,
    about = "Requirements-coverage test templates for layered system models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, build and check a model; print diagnostics.
    Validate(Inputs),
    /// Generate test templates for every layer.
    Generate(GenerateArgs),
    /// Print analytic upper bounds on the number of templates.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
struct Inputs {
    /// Model fact file.
    model: PathBuf,
    /// Requirement fact file.
    requirements: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenMode {
    Full,
    Minimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundMode {
    Simple,
    Complex,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "full")]
    mode: GenMode,
    /// Longest path considered, in nodes.
    #[arg(long, default_value_t = PathLimits::DEFAULT_MAX_LEN as u32, value_parser = clap::value_parser!(u32).range(2..))]
    max_path_len: u32,
    #[arg(long, default_value_t = PathLimits::DEFAULT_MAX_PATHS as u32, value_parser = clap::value_parser!(u32).range(1..))]
    max_paths_per_pair: u32,
    /// Keep whole paths on the physical layer instead of single links.
    #[arg(long)]
    no_physical_edge_coverage: bool,
    /// Enumerate paths on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, value_enum, default_value = "simple")]
    mode: BoundMode,
    /// Routes per communicating pair in complex mode.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    redundancy: u64,
    /// Assume every component communicates with every other.
    #[arg(long)]
    worst_case: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(&a, err),
        Command::Generate(a) => cmd_generate(&a, out, err),
        Command::Estimate(a) => cmd_estimate(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "{message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_USAGE, format!("error: {e}"))
    }
}

fn read_facts(path: &Path) -> Result<FactSet, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("error: cannot read {}: {e}", path.display())))?;
    parse_facts(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("error: {}:{e}", path.display())))
}

struct Loaded {
    model: SystemModel,
    facts: FactSet,
    has_requirements_file: bool,
}

/// Reads both files and builds the model. Requirements may live in either
/// file; the two fact sets are merged.
fn load(inputs: &Inputs) -> Result<Loaded, Failure> {
    let mut facts = read_facts(&inputs.model)?;
    if let Some(path) = &inputs.requirements {
        facts.extend(read_facts(path)?);
    }
    let model = SystemModel::build(&facts).map_err(|errors| {
        let mut msg = String::new();
        for (i, e) in errors.iter().enumerate() {
            if i > 0 {
                msg.push('\n');
            }
            let _ = write!(msg, "error: {}:{e}", inputs.model.display());
        }
        Failure::new(EXIT_INVALID, msg)
    })?;
    Ok(Loaded {
        model,
        facts,
        has_requirements_file: inputs.requirements.is_some(),
    })
}

fn print_diagnostics(err: &mut dyn Write, diags: &[Diagnostic]) -> std::io::Result<()> {
    for d in diags {
        writeln!(err, "{d}")?;
    }
    Ok(())
}

/// Structural and requirement checks. Requirement checks are skipped for a
/// bare model unless `requirements_needed`.
fn check(loaded: &Loaded, requirements_needed: bool) -> Vec<Diagnostic> {
    let mut diags = validate_model(&loaded.model);
    if requirements_needed || loaded.has_requirements_file || !loaded.facts.requirements.is_empty() {
        diags.extend(validate_requirements(&loaded.model, &loaded.facts.requirements));
    }
    diags
}

fn cmd_validate(inputs: &Inputs, err: &mut dyn Write) -> Result<i32, Failure> {
    let loaded = load(inputs)?;
    let mut diags = check(&loaded, false);
    diags.extend(lint_phantom_risk(&loaded.model));
    print_diagnostics(err, &diags)?;
    Ok(if has_errors(&diags) { EXIT_INVALID } else { EXIT_OK })
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let loaded = load(&args.inputs)?;
    let diags = check(&loaded, true);
    print_diagnostics(err, &diags)?;
    if has_errors(&diags) {
        return Ok(EXIT_INVALID);
    }
    let config = StrategyConfig {
        mode: match args.mode {
            GenMode::Full => Mode::Full,
            GenMode::Minimal => Mode::Minimal,
        },
        limits: PathLimits::new(args.max_path_len as usize, args.max_paths_per_pair as usize),
        physical_edge_coverage: !args.no_physical_edge_coverage,
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
    };
    let reqs = declared_requirements(&loaded.facts.requirements);
    let report = run_strategy(&loaded.model, &reqs, &config);
    let text = match args.format {
        Format::Table => render_table(&report),
        Format::Json => render_json(&report),
    };
    out.write_all(text.as_bytes())?;
    out.flush()?;
    let found: Vec<Diagnostic> = report.diagnostics().cloned().collect();
    print_diagnostics(err, &found)?;
    Ok(if report.has_criterion_violations() {
        EXIT_CRITERION
    } else {
        EXIT_OK
    })
}

fn cmd_estimate(args: &EstimateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let loaded = load(&args.inputs)?;
    let diags = check(&loaded, false);
    print_diagnostics(err, &diags)?;
    if has_errors(&diags) {
        return Ok(EXIT_INVALID);
    }
    let worst_case = args.worst_case || loaded.facts.requirements.is_empty();
    let report = (!worst_case).then(|| {
        let reqs = declared_requirements(&loaded.facts.requirements);
        run_strategy(&loaded.model, &reqs, &StrategyConfig::default())
    });
    let counts = layer_counts(&loaded.model, report.as_ref(), worst_case);
    let both = bounds_report(&counts, args.redundancy);
    let bounds = match args.mode {
        BoundMode::Simple => both.simple,
        BoundMode::Complex => both.complex,
    };
    if let Some(report) = &report {
        print_diagnostics(err, &check_against_generation(report, &bounds))?;
    }
    let text = match args.format {
        Format::Table => render_bounds_table(&bounds, worst_case),
        Format::Json => render_bounds_json(&bounds, worst_case),
    };
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

/// Collapses templates with the same kind, class sequence and parameters
/// into one line, writing `_` where the index varies inside the group.
fn grouped_descriptions(templates: &[TestTemplate]) -> Vec<String> {
    struct Group {
        kind: char,
        classes: Vec<String>,
        params: Vec<String>,
        indices: Vec<Option<u32>>,
        count: usize,
    }
    let mut groups: Vec<Group> = Vec::new();
    for t in templates {
        let kind = match t.kind {
            TemplateKind::Component(_) => 'c',
            TemplateKind::Path(_) => 'p',
            TemplateKind::Link(_) => 'l',
        };
        let nodes: Vec<&ComponentRef> = t.nodes();
        let classes: Vec<String> = nodes.iter().map(|c| c.class.clone()).collect();
        match groups
            .iter_mut()
            .find(|g| g.kind == kind && g.classes == classes && g.params == t.params)
        {
            Some(g) => {
                for (slot, c) in g.indices.iter_mut().zip(&nodes) {
                    if *slot != Some(c.index) {
                        *slot = None;
                    }
                }
                g.count += 1;
            }
            None => groups.push(Group {
                kind,
                classes,
                params: t.params.clone(),
                indices: nodes.iter().map(|c| Some(c.index)).collect(),
                count: 1,
            }),
        }
    }
    groups
        .iter()
        .map(|g| {
            let mut s = g
                .classes
                .iter()
                .zip(&g.indices)
                .map(|(class, i)| match i {
                    Some(i) => format!("[{class}, {i}]"),
                    None => format!("[{class}, _]"),
                })
                .collect::<Vec<_>>()
                .join(" <-> ");
            if !g.params.is_empty() {
                let _ = write!(s, " {{{}}}", g.params.join(", "));
            }
            if g.count > 1 {
                let _ = write!(s, "  ({})", g.count);
            }
            s
        })
        .collect()
}

/// Table 1 layout: one row group per layer, functional first.
pub fn render_table(report: &StrategyReport) -> String {
    const W: usize = 12;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<W$}{:<24}Distributed aspect",
        "Layer", "Individual components"
    );
    for l in &report.layers {
        let _ = writeln!(
            s,
            "{:<W$}{:<24}{}",
            l.layer.name(),
            l.component_count(),
            l.distributed_count()
        );
        let mut block = |label: &str, lines: Vec<String>| {
            for (i, line) in lines.iter().enumerate() {
                let head = if i == 0 { label } else { "" };
                let _ = writeln!(s, "    {head:<20}{line}");
            }
        };
        block("components", grouped_descriptions(&l.component_templates));
        if !l.inventory.is_empty() {
            block("types", vec![l.inventory.join("; ")]);
        }
        block("distributed", grouped_descriptions(&l.t_union));
        if !l.trivially_satisfied.is_empty() {
            block(
                "colocated",
                vec![format!(
                    "{} endpoint pairs share a component",
                    l.trivially_satisfied.len()
                )],
            );
        }
    }
    let _ = writeln!(
        s,
        "{:<W$}{:<24}{}  (T = {})",
        "Total",
        report.totals.t_comp,
        report.totals.t_dist,
        report.totals.total()
    );
    s
}

#[derive(Serialize)]
struct JsonNode<'a> {
    class: &'a str,
    index: u32,
}

impl<'a> From<&'a ComponentRef> for JsonNode<'a> {
    fn from(c: &'a ComponentRef) -> Self {
        JsonNode {
            class: &c.class,
            index: c.index,
        }
    }
}

#[derive(Serialize)]
struct JsonComponent<'a> {
    id: &'a str,
    component: JsonNode<'a>,
}

#[derive(Serialize)]
struct JsonTemplate<'a> {
    id: &'a str,
    kind: &'static str,
    nodes: Vec<JsonNode<'a>>,
    params: &'a [String],
    origin: Vec<String>,
}

#[derive(Serialize)]
struct JsonTrivial<'a> {
    template: &'a str,
    upper: [JsonNode<'a>; 2],
    component: JsonNode<'a>,
}

#[derive(Serialize)]
struct JsonDiagnostic {
    severity: &'static str,
    code: &'static str,
    subject: String,
    message: String,
}

impl From<&Diagnostic> for JsonDiagnostic {
    fn from(d: &Diagnostic) -> Self {
        JsonDiagnostic {
            severity: d.severity.as_str(),
            code: d.code.as_str(),
            subject: d.subject.to_string(),
            message: d.message.clone(),
        }
    }
}

#[derive(Serialize)]
struct JsonLayer<'a> {
    layer: u8,
    name: &'static str,
    component_templates: Vec<JsonComponent<'a>>,
    distributed_templates: Vec<JsonTemplate<'a>>,
    trivially_satisfied: Vec<JsonTrivial<'a>>,
    diagnostics: Vec<JsonDiagnostic>,
}

#[derive(Serialize)]
struct JsonTotals {
    t_comp: usize,
    t_dist: usize,
    total: usize,
}

#[derive(Serialize)]
struct JsonConfig {
    mode: &'static str,
    max_path_len: usize,
    max_paths_per_pair: usize,
    physical_edge_coverage: bool,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    layers: Vec<JsonLayer<'a>>,
    totals: JsonTotals,
    config: JsonConfig,
    tool_version: &'static str,
}

fn json_template(t: &TestTemplate) -> JsonTemplate<'_> {
    JsonTemplate {
        id: &t.id,
        kind: match t.kind {
            TemplateKind::Component(_) => "component",
            TemplateKind::Path(_) => "path",
            TemplateKind::Link(_) => "link",
        },
        nodes: t.nodes().into_iter().map(JsonNode::from).collect(),
        params: &t.params,
        origin: t.origins.iter().map(ToString::to_string).collect(),
    }
}

/// Pretty JSON with a fixed key order, newline-terminated.
pub fn render_json(report: &StrategyReport) -> String {
    let doc = JsonReport {
        layers: report
            .layers
            .iter()
            .map(|l| JsonLayer {
                layer: l.layer.get(),
                name: l.layer.name(),
                component_templates: l
                    .component_templates
                    .iter()
                    .map(|t| JsonComponent {
                        id: &t.id,
                        component: JsonNode::from(t.nodes()[0]),
                    })
                    .collect(),
                distributed_templates: l.t_union.iter().map(json_template).collect(),
                trivially_satisfied: l
                    .trivially_satisfied
                    .iter()
                    .map(|r| JsonTrivial {
                        template: &r.template,
                        upper: [JsonNode::from(&r.upper.0), JsonNode::from(&r.upper.1)],
                        component: JsonNode::from(&r.component),
                    })
                    .collect(),
                diagnostics: l.diagnostics.iter().map(JsonDiagnostic::from).collect(),
            })
            .collect(),
        totals: JsonTotals {
            t_comp: report.totals.t_comp,
            t_dist: report.totals.t_dist,
            total: report.totals.total(),
        },
        config: JsonConfig {
            mode: match report.config.mode {
                Mode::Full => "full",
                Mode::Minimal => "minimal",
            },
            max_path_len: report.config.limits.max_len,
            max_paths_per_pair: report.config.limits.max_paths,
            physical_edge_coverage: report.config.physical_edge_coverage,
        },
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn render_bounds_table(b: &Bounds, worst_case: bool) -> String {
    let mut s = String::new();
    let basis = if worst_case {
        "all components"
    } else {
        "communicating components"
    };
    let _ = writeln!(s, "redundancy r = {}, pairs over {basis}", b.redundancy);
    let _ = writeln!(
        s,
        "{:<12}{:>6}{:>6}{:>12}{:>12}",
        "Layer", "C", "G'", "T_dist <=", "T <="
    );
    for l in &b.layers {
        let _ = writeln!(
            s,
            "{:<12}{:>6}{:>6}{:>12}{:>12}",
            l.layer.name(),
            l.components,
            l.communicating,
            l.dist_bound,
            l.total_bound
        );
    }
    let _ = writeln!(
        s,
        "{:<12}{:>6}{:>6}{:>12}{:>12}",
        "Total", b.t_comp, "", b.dist_bound, b.total_bound
    );
    s
}

#[derive(Serialize)]
struct JsonBoundLayer {
    layer: u8,
    name: &'static str,
    components: u64,
    communicating: u64,
    dist_bound: u64,
    total_bound: u64,
}

#[derive(Serialize)]
struct JsonBounds {
    redundancy: u64,
    worst_case: bool,
    layers: Vec<JsonBoundLayer>,
    t_comp: u64,
    dist_bound: u64,
    total_bound: u64,
    tool_version: &'static str,
}

fn render_bounds_json(b: &Bounds, worst_case: bool) -> String {
    let doc = JsonBounds {
        redundancy: b.redundancy,
        worst_case,
        layers: b
            .layers
            .iter()
            .map(|l| JsonBoundLayer {
                layer: l.layer.get(),
                name: l.layer.name(),
                components: l.components,
                communicating: l.communicating,
                dist_bound: l.dist_bound,
                total_bound: l.total_bound,
            })
            .collect(),
        t_comp: b.t_comp,
        dist_bound: b.dist_bound,
        total_bound: b.total_bound,
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("bounds serialize");
    s.push('\n');
    s
}
