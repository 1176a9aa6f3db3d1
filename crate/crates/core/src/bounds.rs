//! Analytic upper bounds on the number of test templates.
//!
//! With `k` communicating components on a layer there are at most
//! `k(k-1)/2` endpoint pairs. Simple systems have one route per pair; complex
//! systems have `r` redundant routes per pair. Adding one node-coverage
//! template per component gives the total bound. When every component
//! communicates (`k = C`) the simple total reduces to `C(C+1)/2` per layer and
//! the complex total with `r = 2` to `C^2`.

use std::collections::BTreeSet;

use crate::generate::{Obligation, StrategyReport};
use crate::model::{ComponentRef, LayerId, SystemModel};
use crate::validate::{Code, Diagnostic, Subject};

/// Counts for one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerCounts {
    pub layer: LayerId,
    /// `C_n`
    pub components: u64,
    /// `|G'_n|`
    pub communicating: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerBound {
    pub layer: LayerId,
    pub components: u64,
    pub communicating: u64,
    pub dist_bound: u64,
    /// `components + dist_bound`
    pub total_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    /// Routes per communicating pair; 1 for simple systems.
    pub redundancy: u64,
    pub layers: Vec<LayerBound>,
    /// `T_comp`, exact.
    pub t_comp: u64,
    pub dist_bound: u64,
    pub total_bound: u64,
}

/// Simple and complex bounds side by side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub simple: Bounds,
    pub complex: Bounds,
}

fn pairs(k: u64) -> u64 {
    // k(k-1) is always even.
    k * k.saturating_sub(1) / 2
}

/// Bounds with uniform redundancy `r`.
pub fn complex_bounds(counts: &[LayerCounts], redundancy: u64) -> Bounds {
    assert!(redundancy >= 1, "redundancy must be at least 1");
    let layers: Vec<LayerBound> = counts
        .iter()
        .map(|c| {
            let dist_bound = redundancy * pairs(c.communicating);
            LayerBound {
                layer: c.layer,
                components: c.components,
                communicating: c.communicating,
                dist_bound,
                total_bound: c.components + dist_bound,
            }
        })
        .collect();
    let t_comp = layers.iter().map(|l| l.components).sum();
    let dist_bound = layers.iter().map(|l| l.dist_bound).sum();
    Bounds {
        redundancy,
        t_comp,
        dist_bound,
        total_bound: t_comp + dist_bound,
        layers,
    }
}

/// Bounds for one route per pair.
pub fn simple_bounds(counts: &[LayerCounts]) -> Bounds {
    complex_bounds(counts, 1)
}

pub fn bounds_report(counts: &[LayerCounts], redundancy: u64) -> BoundsReport {
    BoundsReport {
        simple: simple_bounds(counts),
        complex: complex_bounds(counts, redundancy),
    }
}

/// Components taking part in any of `obligations` on `layer`, or every
/// component of the layer in the worst case.
pub fn communicating_subgraph(
    model: &SystemModel,
    layer: LayerId,
    obligations: &[Obligation],
    worst_case: bool,
) -> BTreeSet<ComponentRef> {
    if worst_case {
        return model.layer_components(layer).map(|c| c.id.clone()).collect();
    }
    obligations
        .iter()
        .filter(|o| o.layer == layer)
        .flat_map(|o| o.conjuncts.iter().chain(&o.disjuncts))
        .filter(|c| model.contains(layer, c))
        .cloned()
        .collect()
}

/// Per-layer counts, top-down. Without `worst_case` the communicating sets
/// come from the obligations recorded in `report`.
pub fn layer_counts(
    model: &SystemModel,
    report: Option<&StrategyReport>,
    worst_case: bool,
) -> Vec<LayerCounts> {
    LayerId::TOP_DOWN
        .into_iter()
        .map(|layer| {
            let components = model.layer_components(layer).count() as u64;
            let communicating = match (worst_case, report) {
                (false, Some(r)) => {
                    communicating_subgraph(model, layer, &r.layer(layer).obligations, false).len() as u64
                }
                (false, None) => 0,
                (true, _) => components,
            };
            LayerCounts {
                layer,
                components,
                communicating,
            }
        })
        .collect()
}

/// Flags any layer whose distinct generated endpoint pairs exceed the
/// single-route bound over its communicating set.
pub fn check_against_generation(report: &StrategyReport, bounds: &Bounds) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for layer in &report.layers {
        let generated = layer.endpoint_pairs().len() as u64;
        let bound = bounds
            .layers
            .iter()
            .find(|b| b.layer == layer.layer)
            .map_or(0, |b| pairs(b.communicating));
        if generated > bound {
            out.push(Diagnostic::warning(
                Code::BoundExceeded,
                Subject::Layer(u32::from(layer.layer.get())),
                format!("{generated} distinct endpoint pairs exceed the bound of {bound}"),
            ));
        }
    }
    out
}
