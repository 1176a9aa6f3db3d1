//! Four-layer graph model of a distributed system under test.
//!
//! Components live on exactly one of four fixed layers. Connections are
//! undirected edges within a layer; projections map a component on layer
//! `n` onto the components of layer `n - 1` that realize it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::factlang::{FactSet, Position};

/// One of the four architectural layers.
///
/// `1` is the physical layer, `2` logical, `3` system/service and `4`
/// functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LayerId(u8);

impl LayerId {
    pub const PHYSICAL: LayerId = LayerId(1);
    pub const LOGICAL: LayerId = LayerId(2);
    pub const SYSTEM: LayerId = LayerId(3);
    pub const FUNCTIONAL: LayerId = LayerId(4);

    /// All layers, bottom-up.
    pub const ALL: [LayerId; 4] = [
        LayerId::PHYSICAL,
        LayerId::LOGICAL,
        LayerId::SYSTEM,
        LayerId::FUNCTIONAL,
    ];

    /// All layers, top-down (the order the strategy walks them).
    pub const TOP_DOWN: [LayerId; 4] = [
        LayerId::FUNCTIONAL,
        LayerId::SYSTEM,
        LayerId::LOGICAL,
        LayerId::PHYSICAL,
    ];

    pub fn new(value: u32) -> Option<LayerId> {
        match value {
            1..=4 => Some(LayerId(value as u8)),
            _ => None,
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The layer directly below, `None` for the physical layer.
    pub fn lower(self) -> Option<LayerId> {
        LayerId::new(u32::from(self.0) - 1)
    }

    pub fn upper(self) -> Option<LayerId> {
        LayerId::new(u32::from(self.0) + 1)
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            1 => "Physical",
            2 => "Logical",
            3 => "System",
            _ => "Functional",
        }
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `(class, index)` pair naming a component within a layer.
///
/// Ordering is lexicographic on the class, then numeric on the index; this
/// is the canonical order used everywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentRef {
    pub class: String,
    pub index: u32,
}

impl ComponentRef {
    pub fn new(class: impl Into<String>, index: u32) -> Self {
        ComponentRef {
            class: class.into(),
            index,
        }
    }
}

impl fmt::Display for ComponentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.class, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: ComponentRef,
    pub layer: LayerId,
    /// `None` marks a virtual object.
    pub type_label: Option<String>,
    pub params: Vec<String>,
}

/// Undirected edge, stored with the smaller endpoint in `a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Connection {
    pub layer: LayerId,
    pub a: ComponentRef,
    pub b: ComponentRef,
    pub params: Vec<String>,
}

impl Connection {
    /// Builds a connection in canonical orientation.
    pub fn new(layer: LayerId, x: ComponentRef, y: ComponentRef, params: Vec<String>) -> Self {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        Connection { layer, a, b, params }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Projection {
    pub upper_layer: LayerId,
    pub upper: ComponentRef,
    pub lower: ComponentRef,
    pub params: Vec<String>,
}

impl Projection {
    pub fn lower_layer(&self) -> LayerId {
        self.upper_layer
            .lower()
            .expect("projection upper layer is always >= 2")
    }
}

/// Arity class of a component's top-down projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionArity {
    /// Dedicated component.
    OneToOne,
    /// Clustering or stacking.
    OneToMany,
    /// Virtualization or replication.
    ManyToOne,
    ManyToMany,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("{pos}: component {component} declared twice on layer {layer}")]
    DuplicateComponent {
        pos: Position,
        layer: LayerId,
        component: ComponentRef,
    },
    #[error("{pos}: {component} is not declared on layer {layer}")]
    DanglingEndpoint {
        pos: Position,
        layer: LayerId,
        component: ComponentRef,
    },
    #[error("{pos}: connection endpoints {a} and {b} are on different layers")]
    CrossLayerConnection {
        pos: Position,
        a: ComponentRef,
        b: ComponentRef,
    },
    #[error(
        "{pos}: projection from layer {upper_layer} targets {lower}, which is not on layer {upper_layer} - 1"
    )]
    BadProjectionLayers {
        pos: Position,
        upper_layer: LayerId,
        lower: ComponentRef,
    },
    #[error("{pos}: connection from {component} to itself")]
    SelfLoop { pos: Position, component: ComponentRef },
    #[error("{pos}: {a} and {b} are already connected on layer {layer}")]
    DuplicateConnection {
        pos: Position,
        layer: LayerId,
        a: ComponentRef,
        b: ComponentRef,
    },
    #[error("{pos}: projection {upper} -> {lower} declared twice")]
    DuplicateProjection {
        pos: Position,
        upper: ComponentRef,
        lower: ComponentRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{component} does not exist on layer {layer}")]
    UnknownComponent { layer: LayerId, component: ComponentRef },
    #[error("{component} on layer {layer} has no projection")]
    NoProjection { layer: LayerId, component: ComponentRef },
}

/// Index-based adjacency for one layer.
///
/// Node indices follow canonical `ComponentRef` order, so comparing index
/// sequences is the same as comparing component sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LayerGraph {
    nodes: Vec<ComponentRef>,
    adjacency: Vec<Vec<usize>>,
}

impl LayerGraph {
    fn from_edges<'a>(
        nodes: Vec<ComponentRef>,
        edges: impl Iterator<Item = (&'a ComponentRef, &'a ComponentRef)>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b) in edges {
            let ia = nodes.binary_search(a).expect("endpoint resolved at build");
            let ib = nodes.binary_search(b).expect("endpoint resolved at build");
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        LayerGraph { nodes, adjacency }
    }

    /// Builds a graph directly from an index edge list. Used by tests and
    /// benches that do not need a full model.
    pub fn from_index_edges(node_count: usize, edges: &[(usize, usize)]) -> Self {
        let nodes = (0..node_count)
            .map(|i| ComponentRef::new("n", i as u32 + 1))
            .collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(a, b) in edges {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        LayerGraph { nodes, adjacency }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[ComponentRef] {
        &self.nodes
    }

    pub fn node(&self, index: usize) -> &ComponentRef {
        &self.nodes[index]
    }

    pub fn index_of(&self, component: &ComponentRef) -> Option<usize> {
        self.nodes.binary_search(component).ok()
    }

    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

/// `(V_n, E_n, M^n_{n-1}, V_{n-1})` for a single layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerView<'m> {
    pub layer: LayerId,
    pub components: Vec<&'m Component>,
    pub connections: Vec<&'m Connection>,
    pub projections: Vec<&'m Projection>,
    /// Lower-layer components reached by `projections`.
    pub lower_components: Vec<&'m Component>,
}

type Key = (LayerId, ComponentRef);

/// The layered system model. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    components: BTreeMap<Key, Component>,
    connections: BTreeMap<(LayerId, ComponentRef, ComponentRef), Connection>,
    projections: BTreeMap<(LayerId, ComponentRef, ComponentRef), Projection>,
    graphs: [LayerGraph; 4],
    down: BTreeMap<Key, BTreeSet<ComponentRef>>,
    up: BTreeMap<Key, BTreeSet<ComponentRef>>,
}

impl SystemModel {
    /// Builds a model from the object, connection and map facts of `facts`.
    ///
    /// Requirement facts are ignored here. All errors are collected before
    /// returning.
    pub fn build(facts: &FactSet) -> Result<SystemModel, Vec<BuildError>> {
        let mut errors = Vec::new();
        let mut components: BTreeMap<Key, Component> = BTreeMap::new();

        for fact in &facts.objects {
            let key = (fact.layer, fact.component.clone());
            if components.contains_key(&key) {
                errors.push(BuildError::DuplicateComponent {
                    pos: fact.pos,
                    layer: fact.layer,
                    component: fact.component.clone(),
                });
                continue;
            }
            components.insert(
                key,
                Component {
                    id: fact.component.clone(),
                    layer: fact.layer,
                    type_label: fact.type_label.clone(),
                    params: fact.params.clone(),
                },
            );
        }

        let layer_of = |c: &ComponentRef| -> Vec<LayerId> {
            LayerId::ALL
                .into_iter()
                .filter(|&l| components.contains_key(&(l, c.clone())))
                .collect()
        };

        let mut connections = BTreeMap::new();
        for fact in &facts.connections {
            if fact.a == fact.b {
                errors.push(BuildError::SelfLoop {
                    pos: fact.pos,
                    component: fact.a.clone(),
                });
                continue;
            }
            let mut ok = true;
            let a_here = components.contains_key(&(fact.layer, fact.a.clone()));
            let b_here = components.contains_key(&(fact.layer, fact.b.clone()));
            if !a_here || !b_here {
                // One endpoint exists only on another layer: that is a layer
                // mismatch rather than a missing component.
                let a_elsewhere = !a_here && !layer_of(&fact.a).is_empty();
                let b_elsewhere = !b_here && !layer_of(&fact.b).is_empty();
                if (a_elsewhere && (b_here || b_elsewhere)) || (b_elsewhere && a_here) {
                    errors.push(BuildError::CrossLayerConnection {
                        pos: fact.pos,
                        a: fact.a.clone(),
                        b: fact.b.clone(),
                    });
                } else {
                    for (here, c) in [(a_here, &fact.a), (b_here, &fact.b)] {
                        if !here {
                            errors.push(BuildError::DanglingEndpoint {
                                pos: fact.pos,
                                layer: fact.layer,
                                component: c.clone(),
                            });
                        }
                    }
                }
                ok = false;
            }
            if !ok {
                continue;
            }
            let conn = Connection::new(fact.layer, fact.a.clone(), fact.b.clone(), fact.params.clone());
            let key = (conn.layer, conn.a.clone(), conn.b.clone());
            if connections.contains_key(&key) {
                errors.push(BuildError::DuplicateConnection {
                    pos: fact.pos,
                    layer: conn.layer,
                    a: conn.a,
                    b: conn.b,
                });
                continue;
            }
            connections.insert(key, conn);
        }

        let mut projections = BTreeMap::new();
        for fact in &facts.maps {
            let upper_layer = fact.layer;
            let mut ok = true;
            if !components.contains_key(&(upper_layer, fact.upper.clone())) {
                errors.push(BuildError::DanglingEndpoint {
                    pos: fact.pos,
                    layer: upper_layer,
                    component: fact.upper.clone(),
                });
                ok = false;
            }
            match upper_layer.lower() {
                Some(lower_layer) if components.contains_key(&(lower_layer, fact.lower.clone())) => {}
                Some(lower_layer) => {
                    if layer_of(&fact.lower).is_empty() {
                        errors.push(BuildError::DanglingEndpoint {
                            pos: fact.pos,
                            layer: lower_layer,
                            component: fact.lower.clone(),
                        });
                    } else {
                        errors.push(BuildError::BadProjectionLayers {
                            pos: fact.pos,
                            upper_layer,
                            lower: fact.lower.clone(),
                        });
                    }
                    ok = false;
                }
                None => {
                    errors.push(BuildError::BadProjectionLayers {
                        pos: fact.pos,
                        upper_layer,
                        lower: fact.lower.clone(),
                    });
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let key = (upper_layer, fact.upper.clone(), fact.lower.clone());
            if projections.contains_key(&key) {
                errors.push(BuildError::DuplicateProjection {
                    pos: fact.pos,
                    upper: fact.upper.clone(),
                    lower: fact.lower.clone(),
                });
                continue;
            }
            projections.insert(
                key,
                Projection {
                    upper_layer,
                    upper: fact.upper.clone(),
                    lower: fact.lower.clone(),
                    params: fact.params.clone(),
                },
            );
        }

        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(SystemModel::assemble(components, connections, projections))
    }

    fn assemble(
        components: BTreeMap<Key, Component>,
        connections: BTreeMap<(LayerId, ComponentRef, ComponentRef), Connection>,
        projections: BTreeMap<(LayerId, ComponentRef, ComponentRef), Projection>,
    ) -> SystemModel {
        let graphs = LayerId::ALL.map(|layer| {
            let nodes: Vec<ComponentRef> = components
                .keys()
                .filter(|(l, _)| *l == layer)
                .map(|(_, c)| c.clone())
                .collect();
            let edges = connections
                .values()
                .filter(|c| c.layer == layer)
                .map(|c| (&c.a, &c.b));
            LayerGraph::from_edges(nodes, edges)
        });

        let mut down: BTreeMap<Key, BTreeSet<ComponentRef>> = BTreeMap::new();
        let mut up: BTreeMap<Key, BTreeSet<ComponentRef>> = BTreeMap::new();
        for p in projections.values() {
            down.entry((p.upper_layer, p.upper.clone()))
                .or_default()
                .insert(p.lower.clone());
            up.entry((p.lower_layer(), p.lower.clone()))
                .or_default()
                .insert(p.upper.clone());
        }

        SystemModel {
            components,
            connections,
            projections,
            graphs,
            down,
            up,
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn connections(&self) -> impl Iterator<Item = &Connection> {
        self.connections.values()
    }

    pub fn projections(&self) -> impl Iterator<Item = &Projection> {
        self.projections.values()
    }

    /// The connection between `x` and `y` on `layer`, in either orientation.
    pub fn connection(&self, layer: LayerId, x: &ComponentRef, y: &ComponentRef) -> Option<&Connection> {
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        self.connections.get(&(layer, a.clone(), b.clone()))
    }

    pub fn component(&self, layer: LayerId, c: &ComponentRef) -> Option<&Component> {
        self.components.get(&(layer, c.clone()))
    }

    pub fn contains(&self, layer: LayerId, c: &ComponentRef) -> bool {
        self.graph(layer).index_of(c).is_some()
    }

    /// Components of a layer in canonical order.
    pub fn layer_components(&self, layer: LayerId) -> impl Iterator<Item = &Component> {
        self.components
            .range((layer, ComponentRef::new("", 0))..)
            .take_while(move |((l, _), _)| *l == layer)
            .map(|(_, c)| c)
    }

    pub fn graph(&self, layer: LayerId) -> &LayerGraph {
        &self.graphs[usize::from(layer.get()) - 1]
    }

    pub fn layer_view(&self, layer: LayerId) -> LayerView<'_> {
        let components = self.layer_components(layer).collect();
        let connections = self.connections.values().filter(|c| c.layer == layer).collect();
        let projections: Vec<&Projection> = self
            .projections
            .values()
            .filter(|p| p.upper_layer == layer)
            .collect();
        let lower_components = match layer.lower() {
            Some(lower) => {
                let refs: BTreeSet<&ComponentRef> = projections.iter().map(|p| &p.lower).collect();
                refs.into_iter()
                    .filter_map(|c| self.component(lower, c))
                    .collect()
            }
            None => Vec::new(),
        };
        LayerView {
            layer,
            components,
            connections,
            projections,
            lower_components,
        }
    }

    fn require(&self, layer: LayerId, c: &ComponentRef) -> Result<(), ModelError> {
        if self.contains(layer, c) {
            Ok(())
        } else {
            Err(ModelError::UnknownComponent {
                layer,
                component: c.clone(),
            })
        }
    }

    /// Components sharing a connection with `c` on `layer`, canonical order.
    pub fn neighbors(&self, layer: LayerId, c: &ComponentRef) -> Result<Vec<ComponentRef>, ModelError> {
        self.require(layer, c)?;
        let graph = self.graph(layer);
        let i = graph.index_of(c).expect("checked above");
        Ok(graph
            .neighbors(i)
            .iter()
            .map(|&j| graph.node(j).clone())
            .collect())
    }

    /// Layer `n - 1` components that `c` projects onto. Always empty on the
    /// physical layer.
    pub fn lower_images(&self, layer: LayerId, c: &ComponentRef) -> Result<Vec<ComponentRef>, ModelError> {
        self.require(layer, c)?;
        Ok(self
            .down
            .get(&(layer, c.clone()))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default())
    }

    /// Layer `n + 1` components projecting onto `c`.
    pub fn upper_images(&self, layer: LayerId, c: &ComponentRef) -> Result<Vec<ComponentRef>, ModelError> {
        self.require(layer, c)?;
        Ok(self
            .up
            .get(&(layer, c.clone()))
            .map(|s| s.iter().cloned().collect())
            .unwrap_or_default())
    }

    pub fn projection_arity(&self, layer: LayerId, c: &ComponentRef) -> Result<ProjectionArity, ModelError> {
        let images = self.lower_images(layer, c)?;
        let lower_layer = match layer.lower() {
            Some(l) if !images.is_empty() => l,
            _ => {
                return Err(ModelError::NoProjection {
                    layer,
                    component: c.clone(),
                })
            }
        };
        let upper_counts: Vec<usize> = images
            .iter()
            .map(|p| self.up.get(&(lower_layer, p.clone())).map_or(0, BTreeSet::len))
            .collect();
        let exclusive = upper_counts.iter().all(|&n| n == 1);
        Ok(match (images.len(), exclusive) {
            (1, true) => ProjectionArity::OneToOne,
            (1, false) => ProjectionArity::ManyToOne,
            (_, true) => ProjectionArity::OneToMany,
            (_, false) => ProjectionArity::ManyToMany,
        })
    }

    /// Renders the model back to facts in canonical orientation. Requirement
    /// facts are not part of the model and are left empty.
    pub fn to_facts(&self) -> FactSet {
        use crate::factlang::{ConnectionFact, MapFact, ObjectFact};
        let pos = Position::default();
        FactSet {
            objects: self
                .components
                .values()
                .map(|c| ObjectFact {
                    layer: c.layer,
                    component: c.id.clone(),
                    type_label: c.type_label.clone(),
                    params: c.params.clone(),
                    pos,
                })
                .collect(),
            connections: self
                .connections
                .values()
                .map(|c| ConnectionFact {
                    layer: c.layer,
                    a: c.a.clone(),
                    b: c.b.clone(),
                    params: c.params.clone(),
                    pos,
                })
                .collect(),
            maps: self
                .projections
                .values()
                .map(|p| MapFact {
                    layer: p.upper_layer,
                    upper: p.upper.clone(),
                    lower: p.lower.clone(),
                    params: p.params.clone(),
                    pos,
                })
                .collect(),
            requirements: Vec::new(),
        }
    }
}
