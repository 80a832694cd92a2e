//! Weighted simple rooted graphs with the distance, degree and cut
//! machinery the rest of the crate builds on.
//!
//! Graphs are immutable after construction: every operation is a pure
//! function of the graph, so values can be shared freely across threads.

use std::collections::BinaryHeap;
use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Distance metric selector: unit cost per edge, or the edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Hop,
    Weight,
}

/// Largest order accepted by the exact Cheeger search.
pub const CHEEGER_EXACT_MAX: usize = 30;

/// A simple weighted undirected graph with a distinguished root node.
///
/// Invariants held by construction: no self-edges, at most one edge per
/// unordered pair, all weights strictly positive, symmetric adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    order: usize,
    root: usize,
    /// Canonical edge list: i < j, sorted lexicographically.
    edges: Vec<(usize, usize, f64)>,
    /// Neighbor lists, sorted by neighbor index.
    adj: Vec<Vec<(usize, f64)>>,
    /// Base-graph orders when this graph was built as a hierarchy,
    /// bottom level first. Drives module-aligned cut enumeration.
    levels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an explicit edge list, rejecting anything that
    /// would break the simple-graph invariants.
    pub fn new(order: usize, edge_list: &[(usize, usize, f64)], root: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ParameterTooSmall {
                name: "order",
                value: 0,
                min: 1,
            });
        }
        if root >= order {
            return Err(Error::NodeOutOfRange {
                index: root,
                order,
            });
        }
        let mut seen = BTreeSet::new();
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(i, j, w) in edge_list {
            if i >= order {
                return Err(Error::NodeOutOfRange { index: i, order });
            }
            if j >= order {
                return Err(Error::NodeOutOfRange { index: j, order });
            }
            if i == j {
                return Err(Error::SelfEdge(i));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::NonpositiveWeight { i, j, weight: w });
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge(a, b));
            }
            edges.push((a, b, w));
        }
        edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        let mut adj = vec![Vec::new(); order];
        for &(i, j, w) in &edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        Ok(Graph {
            order,
            root,
            edges,
            adj,
            levels: None,
        })
    }

    pub(crate) fn with_levels(mut self, levels: Option<Vec<usize>>) -> Self {
        self.levels = levels;
        self
    }

    /// Complete graph on `n` nodes, rooted at 0.
    pub fn complete(n: usize) -> Result<Self> {
        require_min("n", n, 2)?;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j, 1.0));
            }
        }
        Graph::new(n, &edges, 0)
    }

    /// Cycle on `n` nodes, rooted at 0.
    pub fn cycle(n: usize) -> Result<Self> {
        require_min("n", n, 3)?;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::new(n, &edges, 0)
    }

    /// Star on `n` nodes: hub 0 (the root) plus `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        require_min("n", n, 2)?;
        let edges: Vec<_> = (1..n).map(|i| (0, i, 1.0)).collect();
        Graph::new(n, &edges, 0)
    }

    /// Nearest-neighbor grid in `d` dimensions with `side` nodes per axis,
    /// rooted at the corner with all coordinates zero.
    pub fn grid(d: usize, side: usize) -> Result<Self> {
        require_min("d", d, 1)?;
        require_min("side", side, 2)?;
        let n = side.pow(d as u32);
        let mut edges = Vec::new();
        for idx in 0..n {
            let mut stride = 1;
            let mut rest = idx;
            for _ in 0..d {
                let coord = rest % side;
                if coord + 1 < side {
                    edges.push((idx, idx + stride, 1.0));
                }
                rest /= side;
                stride *= side;
            }
        }
        Graph::new(n, &edges, 0)
    }

    /// Porcupine graph on `m * m` nodes: a complete graph of `m` star
    /// modules, attached through the stars' hubs.
    pub fn porcupine(m: usize) -> Result<Self> {
        require_min("m", m, 2)?;
        crate::products::hproduct(&Graph::complete(m)?, &Graph::star(m)?, 1.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Canonical edge list: i < j, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adj[node]
    }

    /// Base-graph orders, bottom first, when built as a hierarchy.
    pub fn hierarchy_levels(&self) -> Option<&[usize]> {
        self.levels.as_deref()
    }

    /// Edge count at a node.
    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Weight sum at a node.
    pub fn valency(&self, node: usize) -> f64 {
        self.adj[node].iter().map(|&(_, w)| w).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.order).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn max_valency(&self) -> f64 {
        (0..self.order)
            .map(|v| self.valency(v))
            .fold(0.0, f64::max)
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scale_weights(&self, factor: f64) -> Result<Self> {
        let scaled: Vec<_> = self
            .edges
            .iter()
            .map(|&(i, j, w)| (i, j, factor * w))
            .collect();
        Ok(Graph::new(self.order, &scaled, self.root)?.with_levels(self.levels.clone()))
    }

    /// Adjacency and Laplacian matrices: A with weights off-diagonal,
    /// L = diag(valencies) - A.
    pub fn matrices(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let a = self.adjacency_matrix();
        let mut l = -a.clone();
        for v in 0..self.order {
            l[(v, v)] = self.valency(v);
        }
        (a, l)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.order, self.order);
        for &(i, j, w) in &self.edges {
            a[(i, j)] = w;
            a[(j, i)] = w;
        }
        a
    }

    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        self.matrices().1
    }

    /// Single-source distances; unreachable nodes get infinity.
    pub fn distances_from(&self, source: usize, metric: Metric) -> Vec<f64> {
        match metric {
            Metric::Hop => self.bfs_from(source),
            Metric::Weight => self.dijkstra_from(source),
        }
    }

    fn bfs_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.order];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0.0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v];
            for &(u, _) in &self.adj[v] {
                if dist[u].is_infinite() {
                    dist[u] = d + 1.0;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn dijkstra_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.order];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
        });
        while let Some(HeapEntry { dist: d, node: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, w) in &self.adj[v] {
                let nd = d + w;
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(HeapEntry { dist: nd, node: u });
                }
            }
        }
        dist
    }

    /// Full distance matrix under the chosen metric.
    pub fn shortest_paths(&self, metric: Metric) -> Vec<Vec<f64>> {
        (0..self.order)
            .map(|s| self.distances_from(s, metric))
            .collect()
    }

    /// Maximum distance from `node` to any other node.
    pub fn eccentricity(&self, node: usize, metric: Metric) -> f64 {
        self.distances_from(node, metric)
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_from(0).iter().all(|d| d.is_finite())
    }

    /// Structural invariants of a connected graph.
    pub fn invariants(&self) -> Result<InvariantRecord> {
        let mut diameter = 0.0f64;
        let mut weighted_diameter = 0.0f64;
        let mut hop_sum = 0.0f64;
        for s in 0..self.order {
            let hop = self.bfs_from(s);
            for &d in &hop {
                if d.is_infinite() {
                    return Err(Error::Disconnected);
                }
                hop_sum += d;
                diameter = diameter.max(d);
            }
            let wd = self
                .dijkstra_from(s)
                .into_iter()
                .fold(0.0, f64::max);
            weighted_diameter = weighted_diameter.max(wd);
        }
        Ok(InvariantRecord {
            diameter,
            weighted_diameter,
            eccentricity_of_root: self.eccentricity(self.root, Metric::Hop),
            weighted_eccentricity_of_root: self.eccentricity(self.root, Metric::Weight),
            // Grand mean of the full distance matrix, self-distances
            // included; this is the convention the reference connectivity
            // tables use.
            mean_distance: hop_sum / (self.order * self.order) as f64,
            max_degree: self.max_degree(),
            max_valency: self.max_valency(),
            total_edge_weight: self.total_edge_weight(),
        })
    }

    /// Cheeger constant: min over cuts of cut weight / smaller side size.
    ///
    /// `Exact` enumerates every bipartition with a Gray code and is limited
    /// to [`CHEEGER_EXACT_MAX`] nodes. `Heuristic` takes the best of a
    /// Fiedler-vector sweep and, when the graph carries hierarchy level
    /// metadata, all contiguous module-aligned cuts; it upper-bounds the
    /// true constant.
    pub fn cheeger(&self, mode: CheegerMode) -> Result<CheegerCut> {
        match mode {
            CheegerMode::Exact => self.cheeger_exact(),
            CheegerMode::Heuristic => self.cheeger_heuristic(),
        }
    }

    fn cut_quality(&self, in_s: &[bool]) -> (f64, usize) {
        let mut cut = 0.0;
        for &(i, j, w) in &self.edges {
            if in_s[i] != in_s[j] {
                cut += w;
            }
        }
        (cut, in_s.iter().filter(|&&b| b).count())
    }

    fn cheeger_exact(&self) -> Result<CheegerCut> {
        let n = self.order;
        if n > CHEEGER_EXACT_MAX {
            return Err(Error::CheegerTooLarge {
                n,
                max: CHEEGER_EXACT_MAX,
            });
        }
        if n < 2 {
            return Err(Error::ParameterTooSmall {
                name: "order",
                value: n,
                min: 2,
            });
        }
        // Fix node 0 inside S and Gray-walk the other n-1 membership bits;
        // each step toggles one node and patches the cut weight in O(deg).
        let mut in_s = vec![false; n];
        in_s[0] = true;
        let mut size = 1usize;
        let mut cut = self.valency(0);
        let mut best = cut / (size.min(n - size) as f64);
        let mut best_code = 0u64;
        let steps = 1u64 << (n - 1);
        for m in 1..steps {
            let v = m.trailing_zeros() as usize + 1;
            let mut to_s = 0.0;
            for &(u, w) in &self.adj[v] {
                if in_s[u] {
                    to_s += w;
                }
            }
            let vw = self.valency(v);
            if in_s[v] {
                in_s[v] = false;
                size -= 1;
                cut += 2.0 * to_s - vw;
            } else {
                in_s[v] = true;
                size += 1;
                cut += vw - 2.0 * to_s;
            }
            let small = size.min(n - size);
            if small > 0 {
                let h = cut / small as f64;
                if h < best {
                    best = h;
                    best_code = m;
                }
            }
        }
        // Decode the winning Gray state back into a node set.
        let bits = best_code ^ (best_code >> 1);
        let mut members: Vec<usize> = vec![0];
        for v in 1..n {
            if bits >> (v - 1) & 1 == 1 {
                members.push(v);
            }
        }
        Ok(self.make_cut(best, members))
    }

    fn cheeger_heuristic(&self) -> Result<CheegerCut> {
        let n = self.order;
        if n < 2 {
            return Err(Error::ParameterTooSmall {
                name: "order",
                value: n,
                min: 2,
            });
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut consider = |h: f64, members: Vec<usize>| {
            if best.as_ref().map_or(true, |(b, _)| h < *b) {
                best = Some((h, members));
            }
        };

        // Sweep cuts: order nodes by the algebraic-connectivity eigenvector
        // and evaluate every prefix.
        let fiedler = crate::spectral::fiedler_vector(self);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]).then(a.cmp(&b)));
        let mut in_s = vec![false; n];
        let mut cut = 0.0;
        for (taken, &v) in order.iter().take(n - 1).enumerate() {
            for &(u, w) in &self.adj[v] {
                cut += if in_s[u] { -w } else { w };
            }
            in_s[v] = true;
            let size = taken + 1;
            let h = cut / size.min(n - size) as f64;
            consider(h, order[..size].to_vec());
        }

        // Module-aligned cuts: every contiguous run of modules at every
        // hierarchy level. Complements of wrapped runs are plain runs, so
        // this covers cyclic top levels too.
        if let Some(levels) = self.levels.clone() {
            let mut block = 1usize;
            for &b in levels.iter().take(levels.len().saturating_sub(1)) {
                block *= b;
                let blocks = self.order / block;
                for start in 0..blocks {
                    for len in 1..blocks - start {
                        let lo = start * block;
                        let hi = (start + len) * block;
                        let mut in_range = vec![false; n];
                        for x in lo..hi {
                            in_range[x] = true;
                        }
                        let (cut, size) = self.cut_quality(&in_range);
                        let h = cut / size.min(n - size) as f64;
                        consider(h, (lo..hi).collect());
                    }
                }
            }
        }

        let (value, members) = best.expect("n >= 2 yields at least one sweep cut");
        Ok(self.make_cut(value, members))
    }

    fn make_cut(&self, value: f64, mut members: Vec<usize>) -> CheegerCut {
        // Report the smaller side of the bipartition.
        if members.len() * 2 > self.order {
            let in_s: Vec<bool> = {
                let mut v = vec![false; self.order];
                for &m in &members {
                    v[m] = true;
                }
                v
            };
            members = (0..self.order).filter(|&x| !in_s[x]).collect();
        }
        members.sort_unstable();
        CheegerCut {
            value,
            cut: members,
        }
    }

    /// Canonical JSON value: `{"edges": [[i, j, w], ...], "order": n, "root": r}`
    /// with edges i < j sorted lexicographically. Serialization is
    /// byte-stable for a fixed graph.
    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|&(i, j, w)| json!([i, j, w]))
            .collect();
        json!({ "order": self.order, "root": self.root, "edges": edges })
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::GraphParse("expected an object".into()))?;
        let order = obj
            .get("order")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::GraphParse("missing integer field `order`".into()))?
            as usize;
        let root = obj.get("root").and_then(Value::as_u64).unwrap_or(0) as usize;
        let raw_edges = obj
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::GraphParse("missing array field `edges`".into()))?;
        let mut edges = Vec::with_capacity(raw_edges.len());
        for e in raw_edges {
            let triple = e
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::GraphParse("edge must be [i, j, w]".into()))?;
            let i = triple[0]
                .as_u64()
                .ok_or_else(|| Error::GraphParse("edge endpoint must be an integer".into()))?;
            let j = triple[1]
                .as_u64()
                .ok_or_else(|| Error::GraphParse("edge endpoint must be an integer".into()))?;
            let w = triple[2]
                .as_f64()
                .ok_or_else(|| Error::GraphParse("edge weight must be a number".into()))?;
            edges.push((i as usize, j as usize, w));
        }
        Graph::new(order, &edges, root)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::GraphParse(e.to_string()))?;
        Graph::from_json(&value)
    }

    /// DOT export with the weight as the edge label; byte-stable.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("graph {} {{\n", name));
        out.push_str(&format!("  {} [shape=doublecircle];\n", self.root));
        for &(i, j, w) in &self.edges {
            out.push_str(&format!("  {} -- {} [label=\"{}\"];\n", i, j, w));
        }
        out.push_str("}\n");
        out
    }
}

fn require_min(name: &'static str, value: usize, min: usize) -> Result<()> {
    if value < min {
        Err(Error::ParameterTooSmall { name, value, min })
    } else {
        Ok(())
    }
}

/// Structural invariants of a connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantRecord {
    pub diameter: f64,
    pub weighted_diameter: f64,
    pub eccentricity_of_root: f64,
    pub weighted_eccentricity_of_root: f64,
    pub mean_distance: f64,
    pub max_degree: usize,
    pub max_valency: f64,
    pub total_edge_weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheegerMode {
    Exact,
    Heuristic,
}

/// A Cheeger value together with the witnessing node subset (smaller side).
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerCut {
    pub value: f64,
    pub cut: Vec<usize>,
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap on distance.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
