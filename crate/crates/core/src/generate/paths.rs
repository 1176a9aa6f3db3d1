//! Bounded enumeration of simple paths in an undirected layer graph.
//!
//! Paths come out shortest-first, then in lexicographic order of their node
//! sequence. The search runs one depth-limited pass per path length, pruning
//! any branch whose graph distance to the target exceeds the edges left, so
//! results are produced directly in output order and truncation at
//! `max_paths` never needs the full path set.

use std::collections::VecDeque;

use crate::model::LayerGraph;

/// Bounds on path enumeration. `max_len` counts nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathLimits {
    pub max_len: usize,
    pub max_paths: usize,
}

impl PathLimits {
    pub const DEFAULT_MAX_LEN: usize = 16;
    pub const DEFAULT_MAX_PATHS: usize = 64;

    pub fn new(max_len: usize, max_paths: usize) -> Self {
        PathLimits { max_len, max_paths }
    }

    pub fn unbounded() -> Self {
        PathLimits {
            max_len: usize::MAX,
            max_paths: usize::MAX,
        }
    }
}

impl Default for PathLimits {
    fn default() -> Self {
        PathLimits::new(Self::DEFAULT_MAX_LEN, Self::DEFAULT_MAX_PATHS)
    }
}

/// Index paths from `source` to `target`, and whether `max_paths` cut the
/// list short.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PathSearch {
    pub paths: Vec<Vec<usize>>,
    pub truncated: bool,
}

fn distances_to(graph: &LayerGraph, target: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.len()];
    let mut queue = VecDeque::from([target]);
    dist[target] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

struct Walk<'g> {
    graph: &'g LayerGraph,
    target: usize,
    dist: Vec<usize>,
    on_path: Vec<bool>,
    path: Vec<usize>,
    out: Vec<Vec<usize>>,
    cap: usize,
}

impl Walk<'_> {
    /// Extends `path` to exactly `len` nodes ending at `target`.
    fn extend(&mut self, len: usize) {
        if self.out.len() >= self.cap {
            return;
        }
        let v = *self.path.last().expect("path starts at the source");
        if v == self.target {
            if self.path.len() == len {
                self.out.push(self.path.clone());
            }
            return;
        }
        let left = len - self.path.len();
        for &w in self.graph.neighbors(v) {
            if self.on_path[w] || self.dist[w] == usize::MAX || self.dist[w] + 1 > left {
                continue;
            }
            self.on_path[w] = true;
            self.path.push(w);
            self.extend(len);
            self.path.pop();
            self.on_path[w] = false;
            if self.out.len() >= self.cap {
                return;
            }
        }
    }
}

/// All simple paths from `source` to `target` within `limits`.
///
/// `source == target` yields no paths.
pub fn simple_paths(graph: &LayerGraph, source: usize, target: usize, limits: PathLimits) -> PathSearch {
    if source == target || limits.max_paths == 0 {
        return PathSearch::default();
    }
    let dist = distances_to(graph, target);
    if dist[source] == usize::MAX {
        return PathSearch::default();
    }
    let longest = limits.max_len.min(graph.len());
    let mut walk = Walk {
        graph,
        target,
        dist,
        on_path: vec![false; graph.len()],
        path: vec![source],
        out: Vec::new(),
        cap: limits.max_paths.saturating_add(1),
    };
    walk.on_path[source] = true;
    let shortest = walk.dist[source] + 1;
    for len in shortest..=longest {
        walk.extend(len);
        if walk.out.len() >= walk.cap {
            break;
        }
    }
    let mut paths = walk.out;
    let truncated = paths.len() > limits.max_paths;
    paths.truncate(limits.max_paths);
    PathSearch { paths, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_graph_has_one_route() {
        let g = LayerGraph::from_index_edges(3, &[(0, 1), (1, 2)]);
        let r = simple_paths(&g, 0, 2, PathLimits::unbounded());
        assert_eq!(r.paths, vec![vec![0, 1, 2]]);
        assert!(!r.truncated);
    }

    #[test]
    fn triangle_orders_shortest_first() {
        let g = LayerGraph::from_index_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let r = simple_paths(&g, 0, 2, PathLimits::unbounded());
        assert_eq!(r.paths, vec![vec![0, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn unreachable_is_empty() {
        let g = LayerGraph::from_index_edges(2, &[]);
        let r = simple_paths(&g, 0, 1, PathLimits::default());
        assert!(r.paths.is_empty());
        assert!(!r.truncated);
    }

    #[test]
    fn limits_truncate_and_cut_length() {
        // K4: paths 0->3 are [0,3], [0,1,3], [0,2,3], [0,1,2,3], [0,2,1,3]
        let g = LayerGraph::from_index_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let all = simple_paths(&g, 0, 3, PathLimits::unbounded());
        assert_eq!(
            all.paths,
            vec![
                vec![0, 3],
                vec![0, 1, 3],
                vec![0, 2, 3],
                vec![0, 1, 2, 3],
                vec![0, 2, 1, 3]
            ]
        );
        let capped = simple_paths(&g, 0, 3, PathLimits::new(16, 2));
        assert_eq!(capped.paths, all.paths[..2].to_vec());
        assert!(capped.truncated);
        let exact = simple_paths(&g, 0, 3, PathLimits::new(16, 5));
        assert!(!exact.truncated);
        let short = simple_paths(&g, 0, 3, PathLimits::new(3, 64));
        assert_eq!(short.paths.len(), 3);
        assert!(!short.truncated);
    }

    #[test]
    fn same_endpoints_yield_nothing() {
        let g = LayerGraph::from_index_edges(2, &[(0, 1)]);
        assert!(simple_paths(&g, 1, 1, PathLimits::default()).paths.is_empty());
    }
}
