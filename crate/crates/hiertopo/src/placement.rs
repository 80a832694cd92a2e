//! Circuit placement onto complete-graph hierarchy machines.
//!
//! The placement heuristic runs in two passes. Top-down, the circuit
//! graph is recursively split into balanced groups, one per address digit,
//! so heavily interacting qubits share low-level modules. Bottom-up, each
//! module is rotated so the sub-hierarchy with the most traffic leaving
//! the module sits at the root position (digit 0), where the uplink is.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::products::HierarchySpec;

/// Qubit-interaction graph distilled from a two-qubit gate list: edge
/// weights count the gates between each pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitGraph {
    qubits: usize,
    edges: Vec<(usize, usize, u64)>,
    adj: Vec<Vec<(usize, u64)>>,
    total_weight: u64,
}

impl CircuitGraph {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Weighted edges, i < j, sorted.
    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[(usize, u64)] {
        &self.adj[q]
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn weight_between(&self, u: usize, v: usize) -> u64 {
        self.adj[u]
            .iter()
            .find(|&&(x, _)| x == v)
            .map_or(0, |&(_, w)| w)
    }
}

/// Builds the circuit graph of a gate list; single-qubit gates carry no
/// communication cost and do not appear here.
pub fn circuit_graph(gates: &[(usize, usize)]) -> Result<CircuitGraph> {
    let mut qubits = 0usize;
    for &(u, v) in gates {
        if u == v {
            return Err(Error::SelfGate(u));
        }
        qubits = qubits.max(u + 1).max(v + 1);
    }
    let mut counts = std::collections::BTreeMap::new();
    for &(u, v) in gates {
        let key = (u.min(v), u.max(v));
        *counts.entry(key).or_insert(0u64) += 1;
    }
    let edges: Vec<(usize, usize, u64)> =
        counts.into_iter().map(|((i, j), w)| (i, j, w)).collect();
    let mut adj = vec![Vec::new(); qubits];
    for &(i, j, w) in &edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    Ok(CircuitGraph {
        qubits,
        total_weight: edges.iter().map(|&(_, _, w)| w).sum(),
        edges,
        adj,
    })
}

/// Uniform random two-qubit gates over distinct pairs; deterministic for a
/// fixed seed.
pub fn random_circuit(n_qubits: usize, n_gates: usize, seed: u64) -> Vec<(usize, usize)> {
    assert!(n_qubits >= 2, "random circuits need at least two qubits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::with_capacity(n_gates);
    while gates.len() < n_gates {
        let u = rng.random_range(0..n_qubits);
        let v = rng.random_range(0..n_qubits);
        if u != v {
            gates.push((u.min(v), u.max(v)));
        }
    }
    gates
}

/// Parses a gate list: one `u v` pair per line, `#` starts a comment.
pub fn parse_gate_list(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::GateListParse {
                    line: idx + 1,
                    reason: "expected two nonnegative integers".into(),
                })
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::GateListParse {
                line: idx + 1,
                reason: "trailing tokens".into(),
            });
        }
        gates.push((u, v));
    }
    Ok(gates)
}

/// Splits `nodes` into parts of exactly the target sizes, minimizing the
/// cut weight of the induced circuit subgraph. Recursive size-weighted
/// bisections with swap refinement, finished by an n-way pass that leaves
/// the labeling locally optimal under single swaps. Deterministic for a
/// fixed seed.
pub fn balanced_partition(
    c: &CircuitGraph,
    nodes: &[usize],
    target_sizes: &[usize],
    seed: u64,
) -> Result<Vec<usize>> {
    let total: usize = target_sizes.iter().sum();
    if total != nodes.len() || target_sizes.is_empty() {
        return Err(Error::InfeasiblePartition {
            got: total,
            need: nodes.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let local = LocalCircuit::induced(c, nodes);
    let mut labels = vec![0usize; nodes.len()];
    let ids: Vec<usize> = (0..nodes.len()).collect();
    split_recursive(&local, &mut rng, ids, target_sizes, 0, &mut labels);
    nway_refine(&local, target_sizes.len(), &mut labels);
    Ok(labels)
}

/// Circuit subgraph on a node subset, in local (position) indices.
struct LocalCircuit {
    adj: Vec<Vec<(usize, i64)>>,
}

impl LocalCircuit {
    fn induced(c: &CircuitGraph, nodes: &[usize]) -> Self {
        let mut position = std::collections::HashMap::new();
        for (pos, &q) in nodes.iter().enumerate() {
            position.insert(q, pos);
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for (pos, &q) in nodes.iter().enumerate() {
            if q < c.qubits {
                for &(other, w) in c.neighbors(q) {
                    if let Some(&opos) = position.get(&other) {
                        adj[pos].push((opos, w as i64));
                    }
                }
            }
        }
        LocalCircuit { adj }
    }

    fn weight_between(&self, u: usize, v: usize) -> i64 {
        self.adj[u]
            .iter()
            .find(|&&(x, _)| x == v)
            .map_or(0, |&(_, w)| w)
    }
}

fn split_recursive(
    local: &LocalCircuit,
    rng: &mut ChaCha8Rng,
    ids: Vec<usize>,
    sizes: &[usize],
    label_offset: usize,
    labels: &mut [usize],
) {
    if sizes.len() == 1 {
        for id in ids {
            labels[id] = label_offset;
        }
        return;
    }
    let mid = sizes.len().div_ceil(2);
    let left_size: usize = sizes[..mid].iter().sum();
    let (left, right) = bisect(local, rng, ids, left_size);
    split_recursive(local, rng, left, &sizes[..mid], label_offset, labels);
    split_recursive(local, rng, right, &sizes[mid..], label_offset + mid, labels);
}

const BISECT_RESTARTS: usize = 3;

/// Two-way split of `ids` with exactly `left_size` on the left: the best
/// of a few independently seeded hill-climbing runs.
fn bisect(
    local: &LocalCircuit,
    rng: &mut ChaCha8Rng,
    ids: Vec<usize>,
    left_size: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut best: Option<(i64, (Vec<usize>, Vec<usize>))> = None;
    for _ in 0..BISECT_RESTARTS {
        let split = bisect_once(local, rng, ids.clone(), left_size);
        let cut = bisect_cut(local, &split.0, &split.1);
        if best.as_ref().map_or(true, |(c, _)| cut < *c) {
            best = Some((cut, split));
        }
        if left_size == 0 || left_size == ids.len() {
            break;
        }
    }
    best.unwrap().1
}

/// Cut weight between the two sides, ignoring edges leaving the subproblem.
fn bisect_cut(local: &LocalCircuit, left: &[usize], right: &[usize]) -> i64 {
    let mut on_right = vec![false; local.adj.len()];
    for &id in right {
        on_right[id] = true;
    }
    left.iter()
        .flat_map(|&id| local.adj[id].iter())
        .filter(|&&(x, _)| on_right[x])
        .map(|&(_, w)| w)
        .sum()
}

fn bisect_once(
    local: &LocalCircuit,
    rng: &mut ChaCha8Rng,
    mut ids: Vec<usize>,
    left_size: usize,
) -> (Vec<usize>, Vec<usize>) {
    ids.shuffle(rng);
    if left_size == 0 || left_size == ids.len() {
        let right = ids.split_off(left_size);
        return (ids, right);
    }
    let mut on_left = vec![false; local.adj.len()];
    for &id in &ids[..left_size] {
        on_left[id] = true;
    }
    let member: Vec<bool> = {
        let mut m = vec![false; local.adj.len()];
        for &id in &ids {
            m[id] = true;
        }
        m
    };
    // Gain of moving a node to the other side: external minus internal
    // weight, counting only edges inside this subproblem.
    let mut d = vec![0i64; local.adj.len()];
    for &id in &ids {
        d[id] = local.adj[id]
            .iter()
            .filter(|&&(x, _)| member[x])
            .map(|&(x, w)| if on_left[x] == on_left[id] { -w } else { w })
            .sum();
    }
    // Positive-gain hill climbing, then locked swap-chain passes that can
    // walk through flat or negative moves and keep the best prefix.
    loop {
        hill_climb(local, &ids, &member, &mut on_left, &mut d);
        if !chain_pass(local, &ids, &member, &mut on_left, &mut d) {
            break;
        }
    }
    let left: Vec<usize> = ids.iter().copied().filter(|&id| on_left[id]).collect();
    let right: Vec<usize> = ids.iter().copied().filter(|&id| !on_left[id]).collect();
    (left, right)
}

/// Best swap between the sides among unlocked nodes, or None. `floor` sets
/// the minimum acceptable gain (exclusive).
fn best_swap(
    local: &LocalCircuit,
    ids: &[usize],
    on_left: &[bool],
    d: &[i64],
    locked: Option<&[bool]>,
    floor: Option<i64>,
) -> Option<(i64, usize, usize)> {
    let free = |id: usize| locked.map_or(true, |l| !l[id]);
    let mut left_sorted: Vec<(i64, usize)> = ids
        .iter()
        .filter(|&&id| on_left[id] && free(id))
        .map(|&id| (d[id], id))
        .collect();
    let mut right_sorted: Vec<(i64, usize)> = ids
        .iter()
        .filter(|&&id| !on_left[id] && free(id))
        .map(|&id| (d[id], id))
        .collect();
    if left_sorted.is_empty() || right_sorted.is_empty() {
        return None;
    }
    left_sorted.sort_by(|a, b| b.cmp(a));
    right_sorted.sort_by(|a, b| b.cmp(a));
    let mut best: Option<(i64, usize, usize)> = None;
    let mut bound = floor.unwrap_or(i64::MIN);
    for &(du, u) in &left_sorted {
        if du + right_sorted[0].0 <= bound {
            break;
        }
        for &(dv, v) in &right_sorted {
            if du + dv <= bound {
                break;
            }
            let gain = du + dv - 2 * local.weight_between(u, v);
            if gain > bound {
                bound = gain;
                best = Some((gain, u, v));
            }
        }
    }
    best
}

fn hill_climb(
    local: &LocalCircuit,
    ids: &[usize],
    member: &[bool],
    on_left: &mut [bool],
    d: &mut [i64],
) {
    while let Some((_, u, v)) = best_swap(local, ids, on_left, d, None, Some(0)) {
        flip(local, member, on_left, d, u);
        flip(local, member, on_left, d, v);
    }
}

/// One Kernighan-Lin style pass: swap-and-lock through the whole side,
/// then rewind to the best prefix. Returns whether the cut improved.
fn chain_pass(
    local: &LocalCircuit,
    ids: &[usize],
    member: &[bool],
    on_left: &mut [bool],
    d: &mut [i64],
) -> bool {
    let mut locked = vec![false; local.adj.len()];
    let mut trail: Vec<(usize, usize)> = Vec::new();
    let mut cumulative = 0i64;
    let mut best_gain = 0i64;
    let mut best_len = 0usize;
    while let Some((gain, u, v)) = best_swap(local, ids, on_left, d, Some(&locked), None) {
        flip(local, member, on_left, d, u);
        flip(local, member, on_left, d, v);
        locked[u] = true;
        locked[v] = true;
        cumulative += gain;
        trail.push((u, v));
        if cumulative > best_gain {
            best_gain = cumulative;
            best_len = trail.len();
        }
    }
    for &(u, v) in trail[best_len..].iter().rev() {
        flip(local, member, on_left, d, v);
        flip(local, member, on_left, d, u);
    }
    best_gain > 0
}

fn flip(
    local: &LocalCircuit,
    member: &[bool],
    on_left: &mut [bool],
    d: &mut [i64],
    node: usize,
) {
    on_left[node] = !on_left[node];
    d[node] = -d[node];
    for &(x, w) in &local.adj[node] {
        if member[x] {
            if on_left[x] == on_left[node] {
                d[x] -= 2 * w;
            } else {
                d[x] += 2 * w;
            }
        }
    }
}

/// First-improvement swap pass across all part pairs until no single swap
/// lowers the cut.
fn nway_refine(local: &LocalCircuit, parts: usize, labels: &mut [usize]) {
    let n = labels.len();
    // part_weight[node][part]: circuit weight from node into each part.
    let mut part_weight = vec![vec![0i64; parts]; n];
    for u in 0..n {
        for &(v, w) in &local.adj[u] {
            part_weight[u][labels[v]] += w;
        }
    }
    loop {
        let mut improved = false;
        for u in 0..n {
            for v in (u + 1)..n {
                let (pu, pv) = (labels[u], labels[v]);
                if pu == pv {
                    continue;
                }
                let move_u = part_weight[u][pv] - part_weight[u][pu];
                let move_v = part_weight[v][pu] - part_weight[v][pv];
                if move_u + move_v <= 0 {
                    continue;
                }
                let gain = move_u + move_v - 2 * local.weight_between(u, v);
                if gain > 0 {
                    labels.swap(u, v);
                    for &(x, w) in &local.adj[u] {
                        part_weight[x][pu] -= w;
                        part_weight[x][pv] += w;
                    }
                    for &(x, w) in &local.adj[v] {
                        part_weight[x][pv] -= w;
                        part_weight[x][pu] += w;
                    }
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Cut weight of a labeling, for tests and diagnostics.
pub fn cut_weight(c: &CircuitGraph, nodes: &[usize], labels: &[usize]) -> u64 {
    let local = LocalCircuit::induced(c, nodes);
    let mut cut = 0i64;
    for u in 0..nodes.len() {
        for &(v, w) in &local.adj[u] {
            if v > u && labels[u] != labels[v] {
                cut += w;
            }
        }
    }
    cut as u64
}

/// A placement of circuit qubits onto machine nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Machine node for each circuit qubit.
    pub mapping: Vec<usize>,
    pub cost: u64,
    pub naive_cost: u64,
    pub seed: u64,
    pub machine_spec: HierarchySpec,
}

/// Validated shape of a machine hierarchy: equal unweighted complete
/// bases.
#[derive(Debug)]
struct Machine {
    n: usize,
    k: usize,
}

impl Machine {
    fn from_spec(spec: &HierarchySpec) -> Result<Self> {
        if spec.is_truncated() {
            return Err(Error::UnsupportedMachine);
        }
        let n = spec.bases()[0].order();
        let reference = Graph::complete(n).expect("n >= 2 for valid bases");
        for base in spec.bases() {
            if base.edges() != reference.edges() || base.root() != 0 {
                return Err(Error::UnsupportedMachine);
            }
        }
        if spec.alphas().iter().any(|&a| a != 1.0) {
            return Err(Error::UnsupportedMachine);
        }
        Ok(Machine {
            n,
            k: spec.levels(),
        })
    }

    fn order(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    /// Hop distance between two machine nodes: one hop at the highest
    /// differing level plus one hop per nonzero digit below it on each
    /// side (climbing to the module roots).
    fn distance(&self, a: usize, b: usize) -> u64 {
        if a == b {
            return 0;
        }
        let mut da = [0usize; 32];
        let mut db = [0usize; 32];
        let (mut ra, mut rb) = (a, b);
        for lvl in 0..self.k {
            da[lvl] = ra % self.n;
            db[lvl] = rb % self.n;
            ra /= self.n;
            rb /= self.n;
        }
        let top = (0..self.k).rev().find(|&l| da[l] != db[l]).unwrap();
        let climb = |digits: &[usize; 32]| -> u64 {
            (0..top).filter(|&l| digits[l] != 0).count() as u64
        };
        1 + climb(&da) + climb(&db)
    }
}

/// Total communication cost of a mapping: circuit edge weight times hop
/// distance in the machine graph, summed over circuit edges.
pub fn placement_cost(c: &CircuitGraph, machine: &Graph, mapping: &[usize]) -> Result<u64> {
    if mapping.len() != c.qubits() {
        return Err(Error::MappingLengthMismatch {
            got: mapping.len(),
            want: c.qubits(),
        });
    }
    let mut used = vec![false; machine.order()];
    for &m in mapping {
        if m >= machine.order() {
            return Err(Error::NodeOutOfRange {
                index: m,
                order: machine.order(),
            });
        }
        if used[m] {
            return Err(Error::NonInjectiveMapping(m));
        }
        used[m] = true;
    }
    let mut dist_cache: std::collections::HashMap<usize, Vec<f64>> =
        std::collections::HashMap::new();
    let mut cost = 0u64;
    for &(u, v, w) in c.edges() {
        let src = mapping[u];
        let dists = dist_cache
            .entry(src)
            .or_insert_with(|| machine.distances_from(src, crate::graph::Metric::Hop));
        let d = dists[mapping[v]];
        if d.is_infinite() {
            return Err(Error::Disconnected);
        }
        cost += w * d as u64;
    }
    Ok(cost)
}

/// Identity-order mapping: qubit i sits on machine node i.
pub fn naive_placement(c: &CircuitGraph, machine_spec: &HierarchySpec) -> Result<Placement> {
    let machine = Machine::from_spec(machine_spec)?;
    if c.qubits() > machine.order() {
        return Err(Error::CircuitTooLarge {
            qubits: c.qubits(),
            nodes: machine.order(),
        });
    }
    let mapping: Vec<usize> = (0..c.qubits()).collect();
    let cost = mapping_cost(c, &machine, &mapping);
    Ok(Placement {
        mapping,
        cost,
        naive_cost: cost,
        seed: 0,
        machine_spec: machine_spec.clone(),
    })
}

fn mapping_cost(c: &CircuitGraph, machine: &Machine, mapping: &[usize]) -> u64 {
    c.edges()
        .iter()
        .map(|&(u, v, w)| w * machine.distance(mapping[u], mapping[v]))
        .sum()
}

enum GroupTree {
    Leaf(usize),
    Node(Vec<GroupTree>),
}

impl GroupTree {
    fn qubits(&self, out: &mut Vec<usize>) {
        match self {
            GroupTree::Leaf(q) => out.push(*q),
            GroupTree::Node(children) => {
                for child in children {
                    child.qubits(out);
                }
            }
        }
    }
}

/// Partition-and-rotate placement of a circuit onto a machine hierarchy.
/// The result never costs more than the identity baseline: if the
/// heuristic loses on an adversarial input, the baseline is returned.
pub fn place(c: &CircuitGraph, machine_spec: &HierarchySpec, seed: u64) -> Result<Placement> {
    let machine = Machine::from_spec(machine_spec)?;
    let total = machine.order();
    if c.qubits() > total {
        return Err(Error::CircuitTooLarge {
            qubits: c.qubits(),
            nodes: total,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Top-down: recursively split all machine slots (real qubits plus
    // isolated padding) into n balanced groups per level.
    let ids: Vec<usize> = (0..total).collect();
    let mut tree = partition_tree(c, &mut rng, ids, machine.k, machine.n)?;

    // Bottom-up: in every module, the sub-hierarchy with the most traffic
    // leaving the module takes the root digit.
    rotate(c, &mut tree);

    let mut flat = Vec::with_capacity(total);
    tree.qubits(&mut flat);
    let mut mapping = vec![0usize; c.qubits()];
    for (node, &q) in flat.iter().enumerate() {
        if q < c.qubits() {
            mapping[q] = node;
        }
    }

    let cost = mapping_cost(c, &machine, &mapping);
    let naive: Vec<usize> = (0..c.qubits()).collect();
    let naive_cost = mapping_cost(c, &machine, &naive);
    if cost <= naive_cost {
        Ok(Placement {
            mapping,
            cost,
            naive_cost,
            seed,
            machine_spec: machine_spec.clone(),
        })
    } else {
        Ok(Placement {
            mapping: naive,
            cost: naive_cost,
            naive_cost,
            seed,
            machine_spec: machine_spec.clone(),
        })
    }
}

fn partition_tree(
    c: &CircuitGraph,
    rng: &mut ChaCha8Rng,
    ids: Vec<usize>,
    level: usize,
    n: usize,
) -> Result<GroupTree> {
    if level == 0 {
        return Ok(GroupTree::Leaf(ids[0]));
    }
    let group_size = ids.len() / n;
    let sizes = vec![group_size; n];
    let labels = balanced_partition(c, &ids, &sizes, rng.random())?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::with_capacity(group_size); n];
    for (pos, &label) in labels.iter().enumerate() {
        groups[label].push(ids[pos]);
    }
    let children = groups
        .into_iter()
        .map(|g| partition_tree(c, rng, g, level - 1, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupTree::Node(children))
}

fn rotate(c: &CircuitGraph, tree: &mut GroupTree) {
    let GroupTree::Node(children) = tree else {
        return;
    };
    for child in children.iter_mut() {
        rotate(c, child);
    }
    let mut module = Vec::new();
    tree.qubits(&mut module);
    let mut in_module = vec![false; c.qubits()];
    for &q in &module {
        if q < c.qubits() {
            in_module[q] = true;
        }
    }
    let GroupTree::Node(children) = tree else {
        unreachable!();
    };
    let mut best: Option<(u64, usize, usize)> = None; // (ext, Reverse tie, index)
    for (idx, child) in children.iter().enumerate() {
        let mut qubits = Vec::new();
        child.qubits(&mut qubits);
        let mut ext = 0u64;
        let mut min_qubit = usize::MAX;
        for &q in &qubits {
            min_qubit = min_qubit.min(q);
            if q < c.qubits() {
                for &(other, w) in c.neighbors(q) {
                    if !in_module[other] {
                        ext += w;
                    }
                }
            }
        }
        let better = match best {
            None => true,
            Some((bext, bmin, _)) => ext > bext || (ext == bext && min_qubit < bmin),
        };
        if better {
            best = Some((ext, min_qubit, idx));
        }
    }
    let winner = best.expect("modules are nonempty").2;
    // Move the winner to the root digit; the other digits are
    // interchangeable, so relative order is kept.
    let child = children.remove(winner);
    children.insert(0, child);
}

/// External circuit weight of each bottom-module member, for checking the
/// rotation choice at the leaf level.
pub fn bottom_module_external_weights(
    c: &CircuitGraph,
    mapping: &[usize],
    machine_spec: &HierarchySpec,
) -> Result<Vec<Vec<(usize, u64)>>> {
    let machine = Machine::from_spec(machine_spec)?;
    let total = machine.order();
    let mut node_to_qubit = vec![usize::MAX; total];
    for (q, &m) in mapping.iter().enumerate() {
        node_to_qubit[m] = q;
    }
    let mut out = Vec::new();
    for module_start in (0..total).step_by(machine.n) {
        let members: Vec<usize> = (module_start..module_start + machine.n).collect();
        let mut rows = Vec::new();
        for &node in &members {
            let q = node_to_qubit[node];
            let mut ext = 0u64;
            if q != usize::MAX {
                for &(other, w) in c.neighbors(q) {
                    let other_node = mapping[other];
                    if other_node < module_start || other_node >= module_start + machine.n {
                        ext += w;
                    }
                }
            }
            rows.push((node, ext));
        }
        out.push(rows);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3_machine(k: usize) -> HierarchySpec {
        HierarchySpec::uniform(Graph::complete(3).unwrap(), k, false).unwrap()
    }

    #[test]
    fn circuit_graph_counts_multiplicity() {
        let c = circuit_graph(&[(0, 1), (0, 1), (1, 2)]).unwrap();
        assert_eq!(c.weight_between(0, 1), 2);
        assert_eq!(c.weight_between(1, 2), 1);
        assert_eq!(c.total_weight(), 3);
    }

    #[test]
    fn rejects_self_gate() {
        assert!(matches!(
            circuit_graph(&[(2, 2)]).unwrap_err(),
            Error::SelfGate(2)
        ));
    }

    #[test]
    fn empty_circuit_costs_nothing() {
        let c = circuit_graph(&[]).unwrap();
        let p = place(&c, &k3_machine(2), 1).unwrap();
        assert_eq!(p.cost, 0);
        assert_eq!(p.naive_cost, 0);
    }

    #[test]
    fn random_circuit_on_two_qubits() {
        let gates = random_circuit(2, 5, 9);
        assert_eq!(gates, vec![(0, 1); 5]);
    }

    #[test]
    fn random_circuit_is_deterministic_and_conserves_gates() {
        let a = random_circuit(729, 100, 42);
        let b = random_circuit(729, 100, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        let c = circuit_graph(&a).unwrap();
        assert_eq!(c.total_weight(), 100);
        assert!(c.edges().len() <= 100);
    }

    #[test]
    fn gate_list_round_trip() {
        let text = "# header\n0 1\n1 2  # inline comment\n\n3 4\n";
        assert_eq!(
            parse_gate_list(text).unwrap(),
            vec![(0, 1), (1, 2), (3, 4)]
        );
        assert!(parse_gate_list("0\n").is_err());
        assert!(parse_gate_list("0 1 2\n").is_err());
    }

    #[test]
    fn partition_two_triangles() {
        // Two unit triangles joined by one edge: the optimal balanced cut
        // severs just the bridge.
        let gates = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
        let c = circuit_graph(&gates).unwrap();
        let nodes: Vec<usize> = (0..6).collect();
        for seed in 0..5 {
            let labels = balanced_partition(&c, &nodes, &[3, 3], seed).unwrap();
            assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 3);
            assert_eq!(cut_weight(&c, &nodes, &labels), 1, "seed {}", seed);
        }
    }

    #[test]
    fn partition_complete_graph_cut_is_forced() {
        let mut gates = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                gates.push((i, j));
            }
        }
        let c = circuit_graph(&gates).unwrap();
        let nodes: Vec<usize> = (0..6).collect();
        let labels = balanced_partition(&c, &nodes, &[3, 3], 0).unwrap();
        assert_eq!(cut_weight(&c, &nodes, &labels), 9);
    }

    #[test]
    fn partition_of_edgeless_circuit_is_free() {
        let c = circuit_graph(&[]).unwrap();
        let nodes: Vec<usize> = (0..9).collect();
        let labels = balanced_partition(&c, &nodes, &[3, 3, 3], 5).unwrap();
        for part in 0..3 {
            assert_eq!(labels.iter().filter(|&&l| l == part).count(), 3);
        }
        assert_eq!(cut_weight(&c, &nodes, &labels), 0);
    }

    #[test]
    fn partition_rejects_infeasible_sizes() {
        let c = circuit_graph(&[(0, 1)]).unwrap();
        assert!(matches!(
            balanced_partition(&c, &[0, 1], &[3, 3], 0).unwrap_err(),
            Error::InfeasiblePartition { .. }
        ));
    }

    #[test]
    fn partition_is_swap_optimal() {
        let gates = random_circuit(27, 60, 3);
        let c = circuit_graph(&gates).unwrap();
        let nodes: Vec<usize> = (0..27).collect();
        let labels = balanced_partition(&c, &nodes, &[9, 9, 9], 7).unwrap();
        let base = cut_weight(&c, &nodes, &labels);
        for u in 0..27 {
            for v in (u + 1)..27 {
                if labels[u] == labels[v] {
                    continue;
                }
                let mut swapped = labels.clone();
                swapped.swap(u, v);
                assert!(
                    cut_weight(&c, &nodes, &swapped) >= base,
                    "swap {} {} improves the cut",
                    u,
                    v
                );
            }
        }
    }

    #[test]
    fn machine_distance_matches_bfs() {
        let spec = k3_machine(3);
        let machine = Machine::from_spec(&spec).unwrap();
        let g = crate::products::build_hierarchy(&spec).unwrap();
        for a in 0..g.order() {
            let dists = g.distances_from(a, crate::graph::Metric::Hop);
            for b in 0..g.order() {
                assert_eq!(machine.distance(a, b), dists[b] as u64, "{} {}", a, b);
            }
        }
    }

    #[test]
    fn machine_validation() {
        let weighted = HierarchySpec::geometric(Graph::complete(3).unwrap(), 2, 2.0, false).unwrap();
        assert!(matches!(
            Machine::from_spec(&weighted).unwrap_err(),
            Error::UnsupportedMachine
        ));
        let cycles = HierarchySpec::uniform(Graph::cycle(4).unwrap(), 2, false).unwrap();
        assert!(matches!(
            Machine::from_spec(&cycles).unwrap_err(),
            Error::UnsupportedMachine
        ));
    }

    #[test]
    fn oversized_circuit_rejected() {
        let gates = random_circuit(10, 5, 1);
        let c = circuit_graph(&gates).unwrap();
        assert!(matches!(
            place(&c, &k3_machine(2), 0).unwrap_err(),
            Error::CircuitTooLarge {
                qubits: 10,
                nodes: 9
            }
        ));
    }

    #[test]
    fn machine_shaped_circuit_places_at_distance_one() {
        // One gate per machine edge: every gate can land on an edge, so the
        // optimal cost equals the edge count.
        let spec = k3_machine(2);
        let machine_graph = crate::products::build_hierarchy(&spec).unwrap();
        let gates: Vec<(usize, usize)> = machine_graph
            .edges()
            .iter()
            .map(|&(i, j, _)| (i, j))
            .collect();
        let c = circuit_graph(&gates).unwrap();
        let p = place(&c, &spec, 11).unwrap();
        assert_eq!(p.cost, 12);
    }

    #[test]
    fn single_gate_lands_adjacent() {
        let c = circuit_graph(&[(0, 1)]).unwrap();
        for k in 2..4 {
            let p = place(&c, &k3_machine(k), 5).unwrap();
            assert_eq!(p.cost, 1, "k = {}", k);
        }
    }

    #[test]
    fn rotation_pulls_boundary_qubit_to_root() {
        // Cluster 0-1-2 with an external gate from 2 to 3: module rotation
        // must put qubit 2 on its module root, making the cross-module
        // gate short.
        let gates = [(0, 1), (0, 2), (1, 2), (2, 3), (2, 3), (2, 3)];
        let c = circuit_graph(&gates).unwrap();
        let p = place(&c, &k3_machine(2), 2).unwrap();
        // Qubit 2 must sit on a module root (bottom digit zero).
        assert_eq!(p.mapping[2] % 3, 0);
        // The heavy cross-module edge runs root to root: distance 1.
        let machine = Machine::from_spec(&k3_machine(2)).unwrap();
        assert_eq!(machine.distance(p.mapping[2], p.mapping[3]), 1);
    }

    #[test]
    fn placement_cost_checks_mapping() {
        let c = circuit_graph(&[(0, 1)]).unwrap();
        let g = crate::products::build_hierarchy(&k3_machine(2)).unwrap();
        assert_eq!(placement_cost(&c, &g, &[0, 1]).unwrap(), 1);
        assert_eq!(placement_cost(&c, &g, &[1, 4]).unwrap(), 3);
        assert!(matches!(
            placement_cost(&c, &g, &[2, 2]).unwrap_err(),
            Error::NonInjectiveMapping(2)
        ));
        assert!(matches!(
            placement_cost(&c, &g, &[0]).unwrap_err(),
            Error::MappingLengthMismatch { .. }
        ));
    }

    #[test]
    fn cost_invariant_under_relabeling() {
        let gates = random_circuit(9, 15, 4);
        let c = circuit_graph(&gates).unwrap();
        let spec = k3_machine(2);
        let g = crate::products::build_hierarchy(&spec).unwrap();
        let mapping: Vec<usize> = vec![3, 5, 0, 8, 1, 7, 2, 6, 4];
        let base = placement_cost(&c, &g, &mapping).unwrap();
        // Relabel qubits by a permutation and compose the mapping.
        let perm: Vec<usize> = vec![2, 0, 1, 4, 3, 6, 5, 8, 7];
        let relabeled: Vec<(usize, usize)> =
            gates.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let c2 = circuit_graph(&relabeled).unwrap();
        let mut mapping2 = vec![0usize; 9];
        for q in 0..9 {
            mapping2[perm[q]] = mapping[q];
        }
        assert_eq!(placement_cost(&c2, &g, &mapping2).unwrap(), base);
    }

    #[test]
    fn place_never_worse_than_naive_and_seeded() {
        let spec = k3_machine(3);
        for seed in 0..8 {
            let gates = random_circuit(27, 40, seed);
            let c = circuit_graph(&gates).unwrap();
            let p = place(&c, &spec, seed).unwrap();
            assert!(p.cost <= p.naive_cost);
            let again = place(&c, &spec, seed).unwrap();
            assert_eq!(p.mapping, again.mapping);
        }
    }

    #[test]
    fn bottom_rotation_is_locally_optimal() {
        let gates = random_circuit(27, 50, 12);
        let c = circuit_graph(&gates).unwrap();
        let spec = k3_machine(3);
        let p = place(&c, &spec, 12).unwrap();
        if p.mapping != (0..27).collect::<Vec<_>>() {
            for module in bottom_module_external_weights(&c, &p.mapping, &spec).unwrap() {
                let root_ext = module
                    .iter()
                    .find(|&&(node, _)| node % 3 == 0)
                    .map(|&(_, ext)| ext)
                    .unwrap();
                for &(_, ext) in &module {
                    assert!(root_ext >= ext);
                }
            }
        }
    }
}
