//! Brute-force oracles and random inputs shared by the property and
//! acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

/// Edge list of a random connected graph: a random spanning tree plus each
/// remaining pair with probability `p`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = BTreeSet::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.insert((a.min(b), a.max(b)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    edges.into_iter().collect()
}

/// Edge list of an Erdos-Renyi graph.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Every simple path from `s` to `t` by exhaustive search, sorted by length
/// and then lexicographically.
pub fn brute_paths(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn go(adj: &[Vec<bool>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().unwrap();
        if v == t {
            out.push(path.clone());
            return;
        }
        for w in 0..adj.len() {
            if adj[v][w] && !path.contains(&w) {
                path.push(w);
                go(adj, t, path, out);
                path.pop();
            }
        }
    }
    if s == t {
        return Vec::new();
    }
    let adj = adjacency(n, edges);
    let mut out = Vec::new();
    go(&adj, t, &mut vec![s], &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Every sequence of distinct vertices from `s` to `t` whose consecutive
/// members are adjacent, found by testing all such sequences.
pub fn sequence_oracle_paths(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> BTreeSet<Vec<usize>> {
    fn extend(n: usize, seq: &mut Vec<usize>, t: usize, adj: &[Vec<bool>], out: &mut BTreeSet<Vec<usize>>) {
        if *seq.last().unwrap() == t {
            if seq.windows(2).all(|w| adj[w[0]][w[1]]) {
                out.insert(seq.clone());
            }
            return;
        }
        for v in 0..n {
            if !seq.contains(&v) {
                seq.push(v);
                extend(n, seq, t, adj, out);
                seq.pop();
            }
        }
    }
    let adj = adjacency(n, edges);
    let mut out = BTreeSet::new();
    if s != t {
        extend(n, &mut vec![s], t, &adj, &mut out);
    }
    out
}

fn components_without(adj: &[Vec<bool>], removed: Option<usize>) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] || Some(start) == removed {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if adj[v][w] && !seen[w] && Some(w) != removed {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Vertices whose removal increases the number of connected components.
pub fn brute_cut_vertices(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let adj = adjacency(n, edges);
    let base = components_without(&adj, None);
    (0..n)
        .filter(|&v| {
            // An isolated vertex removes its own component.
            let isolated = !adj[v].iter().any(|&e| e);
            let expected = if isolated { base - 1 } else { base };
            components_without(&adj, Some(v)) > expected
        })
        .collect()
}

/// Whether `s` reaches any of `targets` in the graph.
pub fn reaches(n: usize, edges: &[(usize, usize)], s: usize, targets: &[usize]) -> bool {
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        if targets.contains(&v) {
            return true;
        }
        for w in 0..n {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

const CLASSES: [&str; 4] = ["alpha", "b", "c_2", "dd"];
const PARAMS: [&str; 6] = ["udp", "port(53)", "'x y'", "42", "f(a,[b,c])", "'it\\'s'"];

fn pick<'a, T>(rng: &mut impl Rng, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

fn ws(rng: &mut impl Rng) -> &'static str {
    pick(rng, &["", " ", "  ", "\n  ", "\t"])
}

fn params_text(rng: &mut impl Rng) -> String {
    let k = rng.gen_range(0..3);
    let items: Vec<&str> = (0..k).map(|_| *pick(rng, &PARAMS)).collect();
    format!("parameters_([{}])", items.join(&format!(",{}", ws(rng))))
}

fn type_text(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..4) {
        0 => "[]".into(),
        1 => "apache".into(),
        2 => "'HP ProBook 450'".into(),
        _ => "'O\\'Brien \\\\ Co'".into(),
    }
}

fn component_text(rng: &mut impl Rng) -> String {
    format!("component_({},{})", pick(rng, &CLASSES), rng.gen_range(1..20))
}

fn pattern_text(rng: &mut impl Rng) -> String {
    match rng.gen_range(0..3) {
        0 => "_".to_string(),
        1 => format!("component_({},_)", pick(rng, &CLASSES)),
        _ => component_text(rng),
    }
}

/// Random syntactically valid fact text. Facts need not form a valid model.
pub fn random_fact_text(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    let k = rng.gen_range(1..25);
    for _ in 0..k {
        if rng.gen_bool(0.1) {
            out.push_str("% a comment, with (parens) and 'quotes'\n");
        }
        let layer = rng.gen_range(1..=4);
        let fact = match rng.gen_range(0..4) {
            0 => format!(
                "object_(layer({layer}),{}{},{}type_({}), {})",
                ws(rng),
                component_text(rng),
                ws(rng),
                type_text(rng),
                params_text(rng)
            ),
            1 => format!(
                "connection_(layer({layer}), {}, {}, {})",
                component_text(rng),
                component_text(rng),
                params_text(rng)
            ),
            2 => format!(
                "map_(layer({layer}), {}, {}, {})",
                component_text(rng),
                component_text(rng),
                params_text(rng)
            ),
            _ => {
                let (s, t) = (pattern_text(rng), pattern_text(rng));
                if rng.gen_bool(0.5) {
                    format!("requirement_(layer({layer}), {s}, {t})")
                } else {
                    format!("requirement_(layer({layer}), {s}, {t}, {})", params_text(rng))
                }
            }
        };
        writeln!(out, "{fact}.").unwrap();
    }
    out
}

/// Shape of a random layered model.
#[derive(Debug, Clone, Copy)]
pub struct ModelShape {
    pub max_per_layer: usize,
    pub edge_p: f64,
    /// Probability that a component is left without a lower image.
    pub unmapped_p: f64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_per_layer: 6,
            edge_p: 0.3,
            unmapped_p: 0.0,
        }
    }
}

/// Random valid four-layer model with requirements on the top two layers.
pub fn random_model_text(rng: &mut impl Rng, shape: ModelShape) -> String {
    let classes = ["a", "b", "c"];
    let mut out = String::new();
    let mut layers: Vec<Vec<(String, u32)>> = vec![Vec::new(); 5];
    for layer in 1..=4 {
        let n = rng.gen_range(1..=shape.max_per_layer);
        let mut next = [0u32; 3];
        for _ in 0..n {
            let ci = rng.gen_range(0..3);
            next[ci] += 1;
            let c = (format!("{}{layer}", classes[ci]), next[ci]);
            writeln!(
                out,
                "object_(layer({layer}), component_({},{}), type_({}), parameters_([])).",
                c.0,
                c.1,
                if layer == 2 { "[]" } else { "t" }
            )
            .unwrap();
            layers[layer].push(c);
        }
        let comps = &layers[layer];
        for a in 0..comps.len() {
            for b in a + 1..comps.len() {
                if rng.gen_bool(shape.edge_p) {
                    writeln!(
                        out,
                        "connection_(layer({layer}), component_({},{}), component_({},{}), parameters_([])).",
                        comps[a].0, comps[a].1, comps[b].0, comps[b].1
                    )
                    .unwrap();
                }
            }
        }
        if layer > 1 {
            for c in &layers[layer] {
                if rng.gen_bool(shape.unmapped_p) {
                    continue;
                }
                let lower = &layers[layer - 1];
                let k = rng.gen_range(1..=2.min(lower.len()));
                let mut picks: Vec<&(String, u32)> = lower.choose_multiple(rng, k).collect();
                picks.sort();
                for l in picks {
                    writeln!(
                        out,
                        "map_(layer({layer}), component_({},{}), component_({},{}), parameters_([])).",
                        c.0, c.1, l.0, l.1
                    )
                    .unwrap();
                }
            }
        }
    }
    for layer in [4, 3] {
        let comps = &layers[layer];
        for _ in 0..rng.gen_range(0..3) {
            let mut pat = || {
                let c = pick(rng, comps).clone();
                if rng.gen_bool(0.5) {
                    format!("component_({},_)", c.0)
                } else {
                    format!("component_({},{})", c.0, c.1)
                }
            };
            let s = pat();
            let t = pat();
            writeln!(out, "requirement_(layer({layer}), {s}, {t}, parameters_([])).").unwrap();
        }
    }
    out
}
