//! Structural checks on a built model and its requirements.
//!
//! Findings are returned as [`Diagnostic`] values. Tests and the CLI compare
//! the `code` and `subject`; messages are for humans only.

use std::collections::BTreeSet;
use std::fmt;

use crate::factlang::{ComponentPattern, RequirementFact};
use crate::model::{ComponentRef, LayerGraph, LayerId, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
            Severity::Info => "INFO",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Closed set of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    EmptyLayer,
    NoProjection,
    UntypedConcrete,
    NoUpwardImage,
    NoTopLevelRequirement,
    UnknownClass,
    BadReqLayer,
    PhantomRisk,
    Criterion1Violation,
    Criterion2Violation,
    NoProjectionForTemplate,
    PathsTruncated,
    BoundExceeded,
}

impl Code {
    pub const ALL: [Code; 13] = [
        Code::EmptyLayer,
        Code::NoProjection,
        Code::UntypedConcrete,
        Code::NoUpwardImage,
        Code::NoTopLevelRequirement,
        Code::UnknownClass,
        Code::BadReqLayer,
        Code::PhantomRisk,
        Code::Criterion1Violation,
        Code::Criterion2Violation,
        Code::NoProjectionForTemplate,
        Code::PathsTruncated,
        Code::BoundExceeded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::EmptyLayer => "EMPTY_LAYER",
            Code::NoProjection => "NO_PROJECTION",
            Code::UntypedConcrete => "UNTYPED_CONCRETE",
            Code::NoUpwardImage => "NO_UPWARD_IMAGE",
            Code::NoTopLevelRequirement => "NO_TOP_LEVEL_REQUIREMENT",
            Code::UnknownClass => "UNKNOWN_CLASS",
            Code::BadReqLayer => "BAD_REQ_LAYER",
            Code::PhantomRisk => "PHANTOM_RISK",
            Code::Criterion1Violation => "CRITERION1_VIOLATION",
            Code::Criterion2Violation => "CRITERION2_VIOLATION",
            Code::NoProjectionForTemplate => "NO_PROJECTION_FOR_TEMPLATE",
            Code::PathsTruncated => "PATHS_TRUNCATED",
            Code::BoundExceeded => "BOUND_EXCEEDED",
        }
    }

    pub fn is_criterion(self) -> bool {
        matches!(self, Code::Criterion1Violation | Code::Criterion2Violation)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a diagnostic is about. The layer is raw so that out-of-range
/// requirement layers can still be reported.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subject {
    Layer(u32),
    Component(LayerId, ComponentRef),
    Pair(LayerId, ComponentRef, ComponentRef),
    Requirement {
        layer: u32,
        source: ComponentPattern,
        target: ComponentPattern,
    },
    /// A conjunct of an obligation, named by requirement id.
    Obligation {
        layer: LayerId,
        component: ComponentRef,
        requirement: String,
    },
    Template(LayerId, String),
}

impl Subject {
    pub fn layer(&self) -> u32 {
        match self {
            Subject::Layer(l) | Subject::Requirement { layer: l, .. } => *l,
            Subject::Component(l, _) | Subject::Pair(l, _, _) | Subject::Template(l, _) => u32::from(l.get()),
            Subject::Obligation { layer, .. } => u32::from(layer.get()),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer={}", self.layer())?;
        match self {
            Subject::Layer(_) => Ok(()),
            Subject::Component(_, c) => write!(f, " {c}"),
            Subject::Pair(_, a, b) => write!(f, " {a}<->{b}"),
            Subject::Requirement { source, target, .. } => write!(f, " {source}->{target}"),
            Subject::Obligation {
                component,
                requirement,
                ..
            } => write!(f, " {component} {requirement}"),
            Subject::Template(_, id) => write!(f, " {id}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub subject: Subject,
    pub message: String,
}

impl Diagnostic {
    pub fn new(severity: Severity, code: Code, subject: Subject, message: impl Into<String>) -> Self {
        Diagnostic {
            severity,
            code,
            subject,
            message: message.into(),
        }
    }

    pub fn error(code: Code, subject: Subject, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Error, code, subject, message)
    }

    pub fn warning(code: Code, subject: Subject, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Warning, code, subject, message)
    }

    pub fn info(code: Code, subject: Subject, message: impl Into<String>) -> Self {
        Diagnostic::new(Severity::Info, code, subject, message)
    }
}

/// `SEVERITY CODE layer=N subject message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.severity, self.code, self.subject, self.message
        )
    }
}

/// Most severe finding, if any.
pub fn worst_severity(diags: &[Diagnostic]) -> Option<Severity> {
    diags.iter().map(|d| d.severity).min()
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

/// Checks the layer, projection and typing rules of the model.
///
/// Order: layers top-down; within a layer, layer-level findings first, then
/// components in canonical order.
pub fn validate_model(model: &SystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for layer in LayerId::TOP_DOWN {
        let mut components = model.layer_components(layer).peekable();
        if components.peek().is_none() {
            out.push(Diagnostic::error(
                Code::EmptyLayer,
                Subject::Layer(u32::from(layer.get())),
                format!("{} layer has no components", layer.name()),
            ));
            continue;
        }
        for component in components {
            let subject = || Subject::Component(layer, component.id.clone());
            if layer != LayerId::PHYSICAL
                && model
                    .lower_images(layer, &component.id)
                    .map_or(true, |v| v.is_empty())
            {
                out.push(Diagnostic::error(
                    Code::NoProjection,
                    subject(),
                    "component has no top-down projection",
                ));
            }
            if matches!(layer, LayerId::PHYSICAL | LayerId::SYSTEM) && component.type_label.is_none() {
                out.push(Diagnostic::warning(
                    Code::UntypedConcrete,
                    subject(),
                    "only logical and functional components may be virtual",
                ));
            }
            if layer != LayerId::FUNCTIONAL
                && model
                    .upper_images(layer, &component.id)
                    .map_or(true, |v| v.is_empty())
            {
                out.push(Diagnostic::info(
                    Code::NoUpwardImage,
                    subject(),
                    "no upper-layer component projects onto this component",
                ));
            }
        }
    }
    out
}

/// Checks requirement facts against the model.
pub fn validate_requirements(model: &SystemModel, reqs: &[RequirementFact]) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let has_top_level = reqs
        .iter()
        .any(|r| r.layer == 4 && (r.source != ComponentPattern::Any || r.target != ComponentPattern::Any));
    if !has_top_level {
        out.push(Diagnostic::error(
            Code::NoTopLevelRequirement,
            Subject::Layer(4),
            "no end-user requirement on the functional layer",
        ));
    }
    for r in reqs {
        let subject = || Subject::Requirement {
            layer: r.layer,
            source: r.source.clone(),
            target: r.target.clone(),
        };
        let Some(layer) = LayerId::new(r.layer) else {
            out.push(Diagnostic::error(
                Code::BadReqLayer,
                subject(),
                format!("{}: layer {} is outside 1..4", r.pos, r.layer),
            ));
            continue;
        };
        let classes: BTreeSet<&str> = model
            .layer_components(layer)
            .map(|c| c.id.class.as_str())
            .collect();
        for pattern in [&r.source, &r.target] {
            if let Some(class) = pattern.class() {
                if !classes.contains(class) {
                    out.push(Diagnostic::error(
                        Code::UnknownClass,
                        subject(),
                        format!("{}: class `{class}` does not exist on layer {layer}", r.pos),
                    ));
                }
            }
        }
    }
    out
}

/// Reports every cut vertex on layers 2-4 as a transit node through which a
/// spurious path could be routed.
pub fn lint_phantom_risk(model: &SystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for layer in [LayerId::FUNCTIONAL, LayerId::SYSTEM, LayerId::LOGICAL] {
        let graph = model.graph(layer);
        for i in cut_vertices(graph) {
            out.push(Diagnostic::info(
                Code::PhantomRisk,
                Subject::Component(layer, graph.node(i).clone()),
                "transit node: removing it disconnects the layer graph",
            ));
        }
    }
    out
}

/// Articulation points of an undirected graph, ascending by node index.
///
/// Iterative Hopcroft-Tarjan low-link search.
pub fn cut_vertices(graph: &LayerGraph) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = graph.len();
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut is_cut = vec![false; n];
    let mut time = 0;

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        let mut root_children = 0;
        // (node, parent, next neighbor position)
        let mut stack = vec![(root, UNSEEN, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, next) = *top;
            if let Some(&w) = graph.neighbors(v).get(next) {
                top.2 += 1;
                if disc[w] == UNSEEN {
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[v]);
                    if parent != root && low[v] >= disc[parent] {
                        is_cut[parent] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&i| is_cut[i]).collect()
}
