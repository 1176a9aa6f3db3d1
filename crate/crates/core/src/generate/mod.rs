//! Requirements-coverage test template generation.
//!
//! Every component gets a node-coverage template. Declared requirements on
//! a layer are expanded into obligations and covered by paths (`T_n1`). The
//! endpoints of each layer's path templates are projected one layer down into
//! induced requirements, which are covered in turn (`T_n2`). A requirement
//! that admits no path is a consistency finding: criterion 1 for declared
//! requirements, criterion 2 for induced ones.

mod paths;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use paths::{simple_paths, PathLimits, PathSearch};

use crate::factlang::{ComponentPattern, RequirementFact};
use crate::model::{ComponentRef, Connection, LayerId, ModelError, SystemModel};
use crate::par::{map_ordered, Execution};
use crate::validate::{Code, Diagnostic, Subject};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("path endpoints are the same component {0}")]
    SameEndpoints(ComponentRef),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RequirementOrigin {
    Declared,
    /// Ids of the upper-layer templates whose projection produced it.
    Induced(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub layer: LayerId,
    pub source: ComponentPattern,
    pub target: ComponentPattern,
    pub params: Vec<String>,
    pub origin: RequirementOrigin,
}

/// Turns parsed requirement facts into declared requirements with ids
/// `R<layer>.<n>`, numbered per layer in source order. Facts with an
/// out-of-range layer are skipped; validation reports them.
pub fn declared_requirements(facts: &[RequirementFact]) -> Vec<Requirement> {
    let mut counters: BTreeMap<LayerId, usize> = BTreeMap::new();
    facts
        .iter()
        .filter_map(|f| {
            let layer = LayerId::new(f.layer)?;
            let n = counters.entry(layer).or_default();
            *n += 1;
            Some(Requirement {
                id: format!("R{layer}.{n}"),
                layer,
                source: f.source.clone(),
                target: f.target.clone(),
                params: f.params.clone().unwrap_or_default(),
                origin: RequirementOrigin::Declared,
            })
        })
        .collect()
}

/// Expanded requirement: every conjunct needs a path to at least one
/// disjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub requirement: String,
    pub layer: LayerId,
    pub conjuncts: Vec<ComponentRef>,
    pub disjuncts: Vec<ComponentRef>,
    pub params: Vec<String>,
    pub origin: RequirementOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expansion {
    Obligation(Obligation),
    /// Both patterns were `_`; the layer is covered by projection only.
    Placeholder,
}

fn expand_pattern(model: &SystemModel, layer: LayerId, pattern: &ComponentPattern) -> Vec<ComponentRef> {
    match pattern {
        ComponentPattern::Exact(c) => vec![c.clone()],
        ComponentPattern::ClassAll(class) => model
            .layer_components(layer)
            .filter(|c| &c.id.class == class)
            .map(|c| c.id.clone())
            .collect(),
        ComponentPattern::Any => model.layer_components(layer).map(|c| c.id.clone()).collect(),
    }
}

pub fn expand_requirement(model: &SystemModel, r: &Requirement) -> Expansion {
    if r.source == ComponentPattern::Any && r.target == ComponentPattern::Any {
        return Expansion::Placeholder;
    }
    Expansion::Obligation(Obligation {
        requirement: r.id.clone(),
        layer: r.layer,
        conjuncts: expand_pattern(model, r.layer, &r.source),
        disjuncts: expand_pattern(model, r.layer, &r.target),
        params: r.params.clone(),
        origin: r.origin.clone(),
    })
}

/// Simple path in canonical orientation (smaller endpoint first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub layer: LayerId,
    pub nodes: Vec<ComponentRef>,
}

impl Path {
    /// Orients `nodes` canonically.
    pub fn new(layer: LayerId, mut nodes: Vec<ComponentRef>) -> Self {
        assert!(nodes.len() >= 2, "a path has at least two nodes");
        if nodes.last() < nodes.first() {
            nodes.reverse();
        }
        Path { layer, nodes }
    }

    pub fn endpoints(&self) -> (&ComponentRef, &ComponentRef) {
        (&self.nodes[0], &self.nodes[self.nodes.len() - 1])
    }

    /// Checks adjacency and simplicity against the model.
    pub fn is_valid_in(&self, model: &SystemModel) -> bool {
        let graph = model.graph(self.layer);
        let Some(idx) = self
            .nodes
            .iter()
            .map(|c| graph.index_of(c))
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let distinct: BTreeSet<usize> = idx.iter().copied().collect();
        distinct.len() == idx.len() && idx.windows(2).all(|w| graph.has_edge(w[0], w[1]))
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(" <-> ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathEnumeration {
    pub paths: Vec<Path>,
    pub truncated: bool,
}

/// All simple paths between two components of a layer, shortest-first and
/// then lexicographic from `s` to `t`.
pub fn enumerate_paths(
    model: &SystemModel,
    layer: LayerId,
    s: &ComponentRef,
    t: &ComponentRef,
    limits: PathLimits,
) -> Result<PathEnumeration, GenerateError> {
    if s == t {
        return Err(GenerateError::SameEndpoints(s.clone()));
    }
    let graph = model.graph(layer);
    let unknown = |c: &ComponentRef| ModelError::UnknownComponent {
        layer,
        component: c.clone(),
    };
    let si = graph.index_of(s).ok_or_else(|| unknown(s))?;
    let ti = graph.index_of(t).ok_or_else(|| unknown(t))?;
    let search = simple_paths(graph, si, ti, limits);
    Ok(PathEnumeration {
        paths: search
            .paths
            .into_iter()
            .map(|p| Path::new(layer, p.into_iter().map(|i| graph.node(i).clone()).collect()))
            .collect(),
        truncated: search.truncated,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateKind {
    Component(ComponentRef),
    Path(Path),
    /// One physical connection, produced by edge coverage on layer 1.
    Link(Connection),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateOrigin {
    NodeCoverage,
    Direct(String),
    Projected(String),
}

impl fmt::Display for TemplateOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateOrigin::NodeCoverage => f.write_str("node_coverage"),
            TemplateOrigin::Direct(r) => write!(f, "direct:{r}"),
            TemplateOrigin::Projected(t) => write!(f, "projected:{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestTemplate {
    pub id: String,
    pub layer: LayerId,
    pub kind: TemplateKind,
    pub params: Vec<String>,
    /// Sorted, without duplicates. Several origins appear when equal
    /// templates were merged.
    pub origins: Vec<TemplateOrigin>,
}

impl TestTemplate {
    pub fn new(layer: LayerId, kind: TemplateKind, params: Vec<String>, origin: TemplateOrigin) -> Self {
        let identity = identity(layer, &kind, &params);
        let digest = Sha256::digest(identity.as_bytes());
        let prefix = match kind {
            TemplateKind::Component(_) => 'c',
            TemplateKind::Path(_) => 'p',
            TemplateKind::Link(_) => 'l',
        };
        let hex: String = digest[..6].iter().map(|b| format!("{b:02x}")).collect();
        TestTemplate {
            id: format!("{prefix}{layer}-{hex}"),
            layer,
            kind,
            params,
            origins: vec![origin],
        }
    }

    /// Nodes in order: one for a component, the path or link otherwise.
    pub fn nodes(&self) -> Vec<&ComponentRef> {
        match &self.kind {
            TemplateKind::Component(c) => vec![c],
            TemplateKind::Path(p) => p.nodes.iter().collect(),
            TemplateKind::Link(c) => vec![&c.a, &c.b],
        }
    }

    /// Endpoints of a path or link template.
    pub fn endpoints(&self) -> Option<(&ComponentRef, &ComponentRef)> {
        match &self.kind {
            TemplateKind::Component(_) => None,
            TemplateKind::Path(p) => Some(p.endpoints()),
            TemplateKind::Link(c) => Some((&c.a, &c.b)),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        match &self.kind {
            TemplateKind::Path(p) => Some(p),
            _ => None,
        }
    }
}

/// Dedup key: layer, canonical kind and params.
fn identity(layer: LayerId, kind: &TemplateKind, params: &[String]) -> String {
    let nodes = |ns: &mut dyn Iterator<Item = &ComponentRef>| {
        ns.map(|c| format!("{},{}", c.class, c.index))
            .collect::<Vec<_>>()
            .join(">")
    };
    let kind = match kind {
        TemplateKind::Component(c) => format!("component:{}", nodes(&mut std::iter::once(c))),
        TemplateKind::Path(p) => format!("path:{}", nodes(&mut p.nodes.iter())),
        TemplateKind::Link(c) => format!("link:{}", nodes(&mut [&c.a, &c.b].into_iter())),
    };
    format!("{layer}|{kind}|{}", params.join("\u{1f}"))
}

/// Insertion-ordered template set that merges origins of equal templates.
#[derive(Debug, Clone, Default)]
struct TemplateSet {
    items: Vec<TestTemplate>,
    index: HashMap<String, usize>,
}

impl TemplateSet {
    fn insert(&mut self, t: TestTemplate) {
        match self.index.get(&t.id) {
            Some(&i) => {
                let merged = &mut self.items[i];
                merged.origins.extend(t.origins);
                merged.origins.sort();
                merged.origins.dedup();
            }
            None => {
                self.index.insert(t.id.clone(), self.items.len());
                self.items.push(t);
            }
        }
    }

    fn extend(&mut self, ts: impl IntoIterator<Item = TestTemplate>) {
        for t in ts {
            self.insert(t);
        }
    }

    fn into_vec(self) -> Vec<TestTemplate> {
        self.items
    }
}

/// Sorted type labels of a layer; virtual components are skipped.
pub fn inventory_types(model: &SystemModel, layer: LayerId) -> Vec<String> {
    model
        .layer_components(layer)
        .filter_map(|c| c.type_label.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// One node-coverage template per component, per layer.
pub fn component_templates(model: &SystemModel) -> BTreeMap<LayerId, Vec<TestTemplate>> {
    LayerId::ALL
        .into_iter()
        .map(|layer| {
            let ts = model
                .layer_components(layer)
                .map(|c| {
                    TestTemplate::new(
                        layer,
                        TemplateKind::Component(c.id.clone()),
                        Vec::new(),
                        TemplateOrigin::NodeCoverage,
                    )
                })
                .collect();
            (layer, ts)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every enumerated path to every reachable disjunct.
    #[default]
    Full,
    /// The first path to the first reachable disjunct.
    Minimal,
}

/// Templates plus findings for one batch of obligations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    pub templates: Vec<TestTemplate>,
    pub diagnostics: Vec<Diagnostic>,
}

fn cover_conjunct(
    model: &SystemModel,
    obligation: &Obligation,
    source: &ComponentRef,
    mode: Mode,
    limits: PathLimits,
    criterion: Code,
) -> (Vec<TestTemplate>, Vec<Diagnostic>) {
    let layer = obligation.layer;
    let graph = model.graph(layer);
    let origins: Vec<TemplateOrigin> = match &obligation.origin {
        RequirementOrigin::Declared => vec![TemplateOrigin::Direct(obligation.requirement.clone())],
        RequirementOrigin::Induced(from) => from.iter().cloned().map(TemplateOrigin::Projected).collect(),
    };
    let limits = match mode {
        Mode::Full => limits,
        Mode::Minimal => PathLimits {
            max_paths: 1,
            ..limits
        },
    };

    let mut templates = Vec::new();
    let mut diags = Vec::new();
    let si = graph.index_of(source);
    for target in obligation.disjuncts.iter().filter(|t| *t != source) {
        let (Some(si), Some(ti)) = (si, graph.index_of(target)) else {
            continue;
        };
        let search = simple_paths(graph, si, ti, limits);
        if search.truncated && mode == Mode::Full {
            diags.push(Diagnostic::warning(
                Code::PathsTruncated,
                Subject::Pair(layer, source.clone(), target.clone()),
                format!("more than {} paths; list truncated", limits.max_paths),
            ));
        }
        for p in &search.paths {
            let path = Path::new(layer, p.iter().map(|&i| graph.node(i).clone()).collect());
            let mut t = TestTemplate::new(
                layer,
                TemplateKind::Path(path),
                obligation.params.clone(),
                origins[0].clone(),
            );
            t.origins = origins.clone();
            templates.push(t);
        }
        if mode == Mode::Minimal && !templates.is_empty() {
            break;
        }
    }

    if templates.is_empty() {
        let targets = obligation
            .disjuncts
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" | ");
        let message = match criterion {
            Code::Criterion1Violation => format!(
                "requirement {} is unsatisfiable: no path to any of {targets}; the technical specification is inconsistent with the end-user requirements",
                obligation.requirement
            ),
            _ => format!(
                "induced requirement {} is unsatisfiable: no path to {targets}",
                obligation.requirement
            ),
        };
        diags.push(Diagnostic::error(
            criterion,
            Subject::Obligation {
                layer,
                component: source.clone(),
                requirement: obligation.requirement.clone(),
            },
            message,
        ));
    }
    (templates, diags)
}

fn cover(
    model: &SystemModel,
    obligations: &[Obligation],
    mode: Mode,
    limits: PathLimits,
    execution: Execution,
    criterion: Code,
) -> Coverage {
    let work: Vec<(&Obligation, &ComponentRef)> = obligations
        .iter()
        .flat_map(|o| o.conjuncts.iter().map(move |c| (o, c)))
        .collect();
    let results = map_ordered(&work, execution, |(o, c)| {
        cover_conjunct(model, o, c, mode, limits, criterion)
    });
    let mut set = TemplateSet::default();
    let mut diagnostics = Vec::new();
    for (ts, ds) in results {
        set.extend(ts);
        diagnostics.extend(ds);
    }
    Coverage {
        templates: set.into_vec(),
        diagnostics,
    }
}

/// `T_n1`: path templates for declared obligations on one layer. A conjunct
/// that reaches none of its disjuncts yields `CRITERION1_VIOLATION`.
pub fn direct_templates(
    model: &SystemModel,
    obligations: &[Obligation],
    mode: Mode,
    limits: PathLimits,
    execution: Execution,
) -> Coverage {
    cover(
        model,
        obligations,
        mode,
        limits,
        execution,
        Code::Criterion1Violation,
    )
}

/// `T_n2`: path templates for induced obligations. Unsatisfiable ones yield
/// `CRITERION2_VIOLATION`.
pub fn induced_templates(
    model: &SystemModel,
    obligations: &[Obligation],
    mode: Mode,
    limits: PathLimits,
    execution: Execution,
) -> Coverage {
    cover(
        model,
        obligations,
        mode,
        limits,
        execution,
        Code::Criterion2Violation,
    )
}

/// Upper-layer endpoints that share their only needed lower image, so the
/// pair needs no path below.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrivialRecord {
    /// Layer of `component`.
    pub layer: LayerId,
    pub template: String,
    pub upper: (ComponentRef, ComponentRef),
    pub component: ComponentRef,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProjectionOutcome {
    pub induced: Vec<Requirement>,
    pub trivially_satisfied: Vec<TrivialRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Maps the endpoints of each path template on `layer` one layer down.
///
/// Every pair of distinct lower images becomes an induced requirement with
/// ids `I<layer-1>.<n>`; equal pairs from several templates are merged.
/// Component and link templates are not projected.
pub fn project_templates(
    model: &SystemModel,
    layer: LayerId,
    templates: &[TestTemplate],
) -> ProjectionOutcome {
    let mut out = ProjectionOutcome::default();
    let Some(lower) = layer.lower() else {
        return out;
    };
    let mut pairs: Vec<((ComponentRef, ComponentRef), Vec<String>)> = Vec::new();
    let mut seen: HashMap<(ComponentRef, ComponentRef), usize> = HashMap::new();

    for t in templates {
        let Some(path) = t.path() else { continue };
        let (a, z) = path.endpoints();
        let images = |c: &ComponentRef| model.lower_images(layer, c).unwrap_or_default();
        let (from, to) = (images(a), images(z));
        let mut missing = false;
        for (end, imgs) in [(a, &from), (z, &to)] {
            if imgs.is_empty() {
                missing = true;
                out.diagnostics.push(Diagnostic::error(
                    Code::NoProjectionForTemplate,
                    Subject::Template(layer, t.id.clone()),
                    format!("template endpoint {end} has no projection on layer {lower}"),
                ));
            }
        }
        if missing {
            continue;
        }
        for x in &from {
            for y in &to {
                if x == y {
                    out.trivially_satisfied.push(TrivialRecord {
                        layer: lower,
                        template: t.id.clone(),
                        upper: (a.clone(), z.clone()),
                        component: x.clone(),
                    });
                    continue;
                }
                let key = if x < y {
                    (x.clone(), y.clone())
                } else {
                    (y.clone(), x.clone())
                };
                match seen.get(&key) {
                    Some(&i) => {
                        if !pairs[i].1.contains(&t.id) {
                            pairs[i].1.push(t.id.clone());
                        }
                    }
                    None => {
                        seen.insert(key.clone(), pairs.len());
                        pairs.push((key, vec![t.id.clone()]));
                    }
                }
            }
        }
    }

    out.induced = pairs
        .into_iter()
        .enumerate()
        .map(|(i, ((s, t), mut from))| {
            from.sort();
            Requirement {
                id: format!("I{lower}.{}", i + 1),
                layer: lower,
                source: ComponentPattern::Exact(s),
                target: ComponentPattern::Exact(t),
                params: Vec::new(),
                origin: RequirementOrigin::Induced(from),
            }
        })
        .collect();
    out
}

/// Replaces path templates with one template per traversed connection.
fn reduce_to_links(model: &SystemModel, templates: &[TestTemplate]) -> Vec<TestTemplate> {
    let mut set = TemplateSet::default();
    for t in templates {
        let Some(path) = t.path() else {
            set.insert(t.clone());
            continue;
        };
        for w in path.nodes.windows(2) {
            let conn = model
                .connection(path.layer, &w[0], &w[1])
                .cloned()
                .unwrap_or_else(|| Connection::new(path.layer, w[0].clone(), w[1].clone(), Vec::new()));
            let mut link = TestTemplate::new(
                path.layer,
                TemplateKind::Link(conn),
                t.params.clone(),
                TemplateOrigin::NodeCoverage,
            );
            link.origins = t.origins.clone();
            set.insert(link);
        }
    }
    set.into_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategyConfig {
    pub mode: Mode,
    pub limits: PathLimits,
    /// Count physical-layer coverage as traversed connections.
    pub physical_edge_coverage: bool,
    pub execution: Execution,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            mode: Mode::Full,
            limits: PathLimits::default(),
            physical_edge_coverage: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerReport {
    pub layer: LayerId,
    pub inventory: Vec<String>,
    pub component_templates: Vec<TestTemplate>,
    /// Declared and induced obligations covered on this layer.
    pub obligations: Vec<Obligation>,
    /// Requirements induced onto this layer by the layer above.
    pub induced: Vec<Requirement>,
    pub t_n1: Vec<TestTemplate>,
    pub t_n2: Vec<TestTemplate>,
    /// `T_n1 ∪ T_n2`, deduplicated. On the physical layer with edge coverage
    /// enabled this holds link templates.
    pub t_union: Vec<TestTemplate>,
    /// Colocated endpoint pairs projected onto this layer.
    pub trivially_satisfied: Vec<TrivialRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl LayerReport {
    pub fn component_count(&self) -> usize {
        self.component_templates.len()
    }

    pub fn distributed_count(&self) -> usize {
        self.t_union.len()
    }

    /// Distinct unordered endpoint pairs over `T_n1 ∪ T_n2`.
    pub fn endpoint_pairs(&self) -> BTreeSet<(ComponentRef, ComponentRef)> {
        self.t_n1
            .iter()
            .chain(&self.t_n2)
            .filter_map(TestTemplate::endpoints)
            .map(|(a, b)| {
                if a <= b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Totals {
    pub t_comp: usize,
    pub t_dist: usize,
}

impl Totals {
    pub fn total(&self) -> usize {
        self.t_comp + self.t_dist
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyReport {
    pub config: StrategyConfig,
    /// Functional first, physical last.
    pub layers: Vec<LayerReport>,
    pub totals: Totals,
}

impl StrategyReport {
    pub fn layer(&self, layer: LayerId) -> &LayerReport {
        self.layers
            .iter()
            .find(|l| l.layer == layer)
            .expect("report covers all four layers")
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.layers.iter().flat_map(|l| &l.diagnostics)
    }

    pub fn has_criterion_violations(&self) -> bool {
        self.diagnostics().any(|d| d.code.is_criterion())
    }

    /// Looks a distributed template up by id on any layer.
    pub fn template(&self, id: &str) -> Option<&TestTemplate> {
        self.layers
            .iter()
            .flat_map(|l| l.t_n1.iter().chain(&l.t_n2).chain(&l.t_union))
            .find(|t| t.id == id)
    }
}

/// Runs the whole strategy top-down over the four layers.
pub fn run_strategy(
    model: &SystemModel,
    declared: &[Requirement],
    config: &StrategyConfig,
) -> StrategyReport {
    let mut components = component_templates(model);
    let mut layers = Vec::with_capacity(4);
    let mut incoming = ProjectionOutcome::default();

    for layer in LayerId::TOP_DOWN {
        let direct: Vec<Obligation> = declared
            .iter()
            .filter(|r| r.layer == layer)
            .filter_map(|r| match expand_requirement(model, r) {
                Expansion::Obligation(o) => Some(o),
                Expansion::Placeholder => None,
            })
            .collect();
        let induced_obligations: Vec<Obligation> = incoming
            .induced
            .iter()
            .filter_map(|r| match expand_requirement(model, r) {
                Expansion::Obligation(o) => Some(o),
                Expansion::Placeholder => None,
            })
            .collect();

        let t1 = direct_templates(model, &direct, config.mode, config.limits, config.execution);
        let t2 = induced_templates(
            model,
            &induced_obligations,
            config.mode,
            config.limits,
            config.execution,
        );

        let mut union = TemplateSet::default();
        union.extend(t1.templates.iter().cloned());
        union.extend(t2.templates.iter().cloned());
        let union = union.into_vec();

        let mut diagnostics = incoming.diagnostics;
        diagnostics.extend(t1.diagnostics);
        diagnostics.extend(t2.diagnostics);

        let below = project_templates(model, layer, &union);
        let t_union = if layer == LayerId::PHYSICAL && config.physical_edge_coverage {
            reduce_to_links(model, &union)
        } else {
            union
        };

        let mut obligations = direct;
        obligations.extend(induced_obligations);
        layers.push(LayerReport {
            layer,
            inventory: inventory_types(model, layer),
            component_templates: components.remove(&layer).unwrap_or_default(),
            obligations,
            induced: incoming.induced,
            t_n1: t1.templates,
            t_n2: t2.templates,
            t_union,
            trivially_satisfied: incoming.trivially_satisfied,
            diagnostics,
        });

        // Findings about this layer's templates stay with this layer.
        let ProjectionOutcome {
            induced,
            trivially_satisfied,
            diagnostics,
        } = below;
        layers
            .last_mut()
            .expect("just pushed")
            .diagnostics
            .extend(diagnostics);
        incoming = ProjectionOutcome {
            induced,
            trivially_satisfied,
            diagnostics: Vec::new(),
        };
    }

    let totals = Totals {
        t_comp: layers.iter().map(LayerReport::component_count).sum(),
        t_dist: layers.iter().map(LayerReport::distributed_count).sum(),
    };
    StrategyReport {
        config: *config,
        layers,
        totals,
    }
}
