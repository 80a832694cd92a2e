//! The hierarchical product in its plain, weighted and truncated forms,
//! k-level hierarchy assembly, and the base-n node addressal codec.
//!
//! `hproduct(G, H, alpha)` attaches one copy of `H` to every vertex of `G`
//! through the roots: the product has `|G|` modules shaped like `H`, and
//! `G`'s edges run between module roots with weight `alpha * w_G`. Products
//! compose right to left, bottom level first.

use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Recipe for a k-level hierarchy: ordered base graphs (bottom first),
/// one positive weight per level with the bottom weight normalized to 1,
/// and a truncation flag.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySpec {
    bases: Vec<Graph>,
    alphas: Vec<f64>,
    truncated: bool,
    geometric_alpha: Option<f64>,
}

impl HierarchySpec {
    pub fn new(bases: Vec<Graph>, alphas: Vec<f64>, truncated: bool) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::EmptyHierarchy);
        }
        if alphas.len() != bases.len() {
            return Err(Error::AlphaCountMismatch {
                alphas: alphas.len(),
                bases: bases.len(),
            });
        }
        if alphas[0] != 1.0 {
            return Err(Error::UnnormalizedAlphas(alphas[0]));
        }
        for &a in &alphas {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::NonpositiveAlpha(a));
            }
        }
        for (level, base) in bases.iter().enumerate() {
            if base.order() < 2 || !base.is_connected() {
                return Err(Error::InvalidBase { level: level + 1 });
            }
        }
        if truncated {
            let first = &bases[0];
            let equal = bases.iter().all(|b| {
                b.order() == first.order()
                    && b.root() == first.root()
                    && b.edges() == first.edges()
            });
            if !equal {
                return Err(Error::MixedTruncatedBases);
            }
            // The trailing-zeros address rule names the root by digit 0.
            if first.root() != 0 {
                return Err(Error::TruncatedRootPlacement(first.root()));
            }
        }
        Ok(HierarchySpec {
            bases,
            alphas,
            truncated,
            geometric_alpha: None,
        })
    }

    /// `k` copies of one base with weights (1, alpha, alpha^2, ...).
    pub fn geometric(base: Graph, k: usize, alpha: f64, truncated: bool) -> Result<Self> {
        if k < 1 {
            return Err(Error::ParameterTooSmall {
                name: "k",
                value: k,
                min: 1,
            });
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::NonpositiveAlpha(alpha));
        }
        let bases = vec![base; k];
        let alphas: Vec<f64> = (0..k).map(|i| alpha.powi(i as i32)).collect();
        let mut spec = HierarchySpec::new(bases, alphas, truncated)?;
        spec.geometric_alpha = Some(alpha);
        Ok(spec)
    }

    /// Unit-weight hierarchy of `k` copies of one base.
    pub fn uniform(base: Graph, k: usize, truncated: bool) -> Result<Self> {
        HierarchySpec::geometric(base, k, 1.0, truncated)
    }

    pub fn levels(&self) -> usize {
        self.bases.len()
    }

    /// Base graphs, bottom level first.
    pub fn bases(&self) -> &[Graph] {
        &self.bases
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn geometric_alpha(&self) -> Option<f64> {
        self.geometric_alpha
    }

    /// Node count of the hierarchy this spec describes.
    pub fn order(&self) -> usize {
        if self.truncated {
            let n = self.bases[0].order();
            (0..=self.levels()).map(|i| (n - 1).pow(i as u32)).sum()
        } else {
            self.bases.iter().map(Graph::order).product()
        }
    }

    fn full_order(&self) -> usize {
        self.bases.iter().map(Graph::order).product()
    }

    pub fn to_json(&self) -> Value {
        let bases: Vec<Value> = self.bases.iter().map(Graph::to_json).collect();
        let mut obj = json!({
            "bases": bases,
            "alphas": self.alphas,
            "truncated": self.truncated,
        });
        if let Some(a) = self.geometric_alpha {
            obj["geometric_alpha"] = json!(a);
        }
        obj
    }

    pub fn to_json_string(&self) -> String {
        self.to_json().to_string()
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::SpecParse("expected an object".into()))?;
        let raw_bases = obj
            .get("bases")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::SpecParse("missing array field `bases`".into()))?;
        let bases: Vec<Graph> = raw_bases
            .iter()
            .map(Graph::from_json)
            .collect::<Result<_>>()?;
        let truncated = obj
            .get("truncated")
            .and_then(Value::as_bool)
            .unwrap_or(false);
        let geometric_alpha = obj.get("geometric_alpha").and_then(Value::as_f64);
        let alphas: Vec<f64> = match obj.get("alphas").and_then(Value::as_array) {
            Some(raw) => raw
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Error::SpecParse("alpha must be a number".into()))
                })
                .collect::<Result<_>>()?,
            None => match geometric_alpha {
                Some(a) => (0..bases.len()).map(|i| a.powi(i as i32)).collect(),
                None => vec![1.0; bases.len()],
            },
        };
        let mut spec = HierarchySpec::new(bases, alphas, truncated)?;
        spec.geometric_alpha = geometric_alpha;
        Ok(spec)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))?;
        HierarchySpec::from_json(&value)
    }
}

/// Alpha-weighted hierarchical product `G` over `H`: `|G|` copies of `H`
/// joined through their roots by `G`'s edges at weight `alpha * w_G`.
/// Node `(g, h)` maps to index `g * |H| + h`.
pub fn hproduct(g: &Graph, h: &Graph, alpha: f64) -> Result<Graph> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::NonpositiveAlpha(alpha));
    }
    let nh = h.order();
    let mut edges = Vec::with_capacity(g.order() * h.edges().len() + g.edges().len());
    for module in 0..g.order() {
        let base = module * nh;
        for &(a, b, w) in h.edges() {
            edges.push((base + a, base + b, w));
        }
    }
    for &(a, b, w) in g.edges() {
        edges.push((a * nh + h.root(), b * nh + h.root(), alpha * w));
    }
    let root = g.root() * nh + h.root();
    let mut levels = match h.hierarchy_levels() {
        Some(l) => l.to_vec(),
        None => vec![h.order()],
    };
    levels.push(g.order());
    Ok(Graph::new(g.order() * nh, &edges, root)?.with_levels(Some(levels)))
}

/// Truncated variant: the root of `G` keeps no module of its own, so the
/// product has `(|G| - 1) * |H| + 1` nodes and the maximum degree stays
/// bounded as hierarchies deepen.
pub fn truncated_hproduct(g: &Graph, h: &Graph, alpha: f64) -> Result<Graph> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::NonpositiveAlpha(alpha));
    }
    let nh = h.order();
    // Keep (g, h) pairs except the root module, which keeps only its root
    // slot; renumber ascending.
    let keep = |gi: usize, hi: usize| gi != g.root() || hi == h.root();
    let mut new_index = vec![usize::MAX; g.order() * nh];
    let mut next = 0usize;
    for gi in 0..g.order() {
        for hi in 0..nh {
            if keep(gi, hi) {
                new_index[gi * nh + hi] = next;
                next += 1;
            }
        }
    }
    let mut edges = Vec::new();
    for gi in 0..g.order() {
        if gi == g.root() {
            continue;
        }
        let base = gi * nh;
        for &(a, b, w) in h.edges() {
            edges.push((new_index[base + a], new_index[base + b], w));
        }
    }
    for &(a, b, w) in g.edges() {
        edges.push((
            new_index[a * nh + h.root()],
            new_index[b * nh + h.root()],
            alpha * w,
        ));
    }
    let root = new_index[g.root() * nh + h.root()];
    Graph::new(next, &edges, root)
}

/// Builds the hierarchy a spec describes: the right-to-left fold of the
/// weighted product over the base graphs, bottom level first. Truncated
/// hierarchies are built as the full product with every invalid-address
/// node removed.
pub fn build_hierarchy(spec: &HierarchySpec) -> Result<Graph> {
    let mut graph = spec.bases()[0].clone();
    for (i, base) in spec.bases().iter().enumerate().skip(1) {
        graph = hproduct(base, &graph, spec.alphas()[i])?;
    }
    if !spec.is_truncated() {
        return Ok(graph);
    }

    let orders: Vec<usize> = spec.bases().iter().map(Graph::order).collect();
    let roots: Vec<usize> = spec.bases().iter().map(Graph::root).collect();
    let full = spec.full_order();
    let mut new_index = vec![usize::MAX; full];
    let mut next = 0usize;
    for idx in 0..full {
        if truncated_address_valid(idx, &orders, &roots) {
            new_index[idx] = next;
            next += 1;
        }
    }
    let mut edges = Vec::new();
    for &(a, b, w) in graph.edges() {
        if new_index[a] != usize::MAX && new_index[b] != usize::MAX {
            edges.push((new_index[a], new_index[b], w));
        }
    }
    let root = new_index[graph.root()];
    Graph::new(next, &edges, root)
}

/// Digits of a full-product index, most significant digit = top level.
fn index_digits(mut index: usize, orders: &[usize]) -> Vec<usize> {
    let k = orders.len();
    let mut digits = vec![0usize; k];
    // orders are bottom-first; digit j (top-first) draws from level k - j.
    for j in (0..k).rev() {
        let n = orders[k - 1 - j];
        digits[j] = index % n;
        index /= n;
    }
    digits
}

fn truncated_address_valid(index: usize, orders: &[usize], roots: &[usize]) -> bool {
    let digits = index_digits(index, orders);
    let k = orders.len();
    let mut closed = false;
    for (j, &d) in digits.iter().enumerate() {
        let root = roots[k - 1 - j];
        if closed && d != root {
            return false;
        }
        if d == root {
            closed = true;
        }
    }
    true
}

/// Node address inside a hierarchy: one digit per level, most significant
/// digit first (top level). Digit value 0 marks the root position of that
/// level's base graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAddress {
    pub digits: Vec<usize>,
}

/// Address of a node index. For truncated specs the index ranges over the
/// compacted node set and the resulting address obeys the
/// first-zero-then-all-zeros rule.
pub fn index_to_address(spec: &HierarchySpec, index: usize) -> Result<NodeAddress> {
    let order = spec.order();
    if index >= order {
        return Err(Error::NodeOutOfRange { index, order });
    }
    let n = spec.bases()[0].order();
    let k = spec.levels();
    if !spec.is_truncated() {
        let orders: Vec<usize> = spec.bases().iter().map(Graph::order).collect();
        return Ok(NodeAddress {
            digits: index_digits(index, &orders),
        });
    }
    // Valid truncated addresses in ascending full-index order are exactly
    // the lexicographically ordered valid digit strings; unrank directly.
    let mut digits = vec![0usize; k];
    let mut r = index;
    let mut open = true;
    for (j, slot) in digits.iter_mut().enumerate() {
        if !open {
            break;
        }
        let suffix = k - 1 - j;
        if r == 0 {
            *slot = 0;
            open = false;
        } else {
            let per = truncated_suffix_count(n, suffix);
            r -= 1;
            *slot = 1 + r / per;
            r %= per;
        }
    }
    Ok(NodeAddress { digits })
}

/// Inverse of [`index_to_address`]; rejects malformed addresses and names
/// the offending digit.
pub fn address_to_index(spec: &HierarchySpec, address: &NodeAddress) -> Result<usize> {
    let k = spec.levels();
    if address.digits.len() != k {
        return Err(Error::AddressLengthMismatch {
            got: address.digits.len(),
            want: k,
        });
    }
    for (j, &d) in address.digits.iter().enumerate() {
        let n = spec.bases()[k - 1 - j].order();
        if d >= n {
            return Err(Error::DigitOutOfRange {
                position: j,
                digit: d,
                order: n,
            });
        }
    }
    if !spec.is_truncated() {
        let mut index = 0usize;
        for (j, &d) in address.digits.iter().enumerate() {
            index = index * spec.bases()[k - 1 - j].order() + d;
        }
        return Ok(index);
    }
    let n = spec.bases()[0].order();
    let mut closed = false;
    let mut rank = 0usize;
    for (j, &d) in address.digits.iter().enumerate() {
        if closed {
            if d != 0 {
                return Err(Error::TrailingZeroViolation {
                    position: j,
                    digit: d,
                });
            }
            continue;
        }
        if d == 0 {
            closed = true;
        } else {
            let per = truncated_suffix_count(n, k - 1 - j);
            rank += 1 + (d - 1) * per;
        }
    }
    Ok(rank)
}

/// Number of valid truncated address suffixes of the given length under an
/// open (all nonzero so far) prefix: sum of (n-1)^i for i = 0..=len.
fn truncated_suffix_count(n: usize, len: usize) -> usize {
    (0..=len).map(|i| (n - 1).pow(i as u32)).sum()
}

fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

fn root_projector(g: &Graph) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(g.order(), g.order());
    d[(g.root(), g.root())] = 1.0;
    d
}

/// Explicit Kronecker-sum adjacency of a non-truncated hierarchy: the sum
/// over levels of alpha_i (identity above) x A_i x (root projectors below).
pub fn hierarchy_adjacency_direct(spec: &HierarchySpec) -> DMatrix<f64> {
    hierarchy_kron_sum(spec, Graph::adjacency_matrix)
}

/// Same Kronecker sum with Laplacians in place of adjacencies.
pub fn hierarchy_laplacian_direct(spec: &HierarchySpec) -> DMatrix<f64> {
    hierarchy_kron_sum(spec, Graph::laplacian_matrix)
}

fn hierarchy_kron_sum(
    spec: &HierarchySpec,
    term: impl Fn(&Graph) -> DMatrix<f64>,
) -> DMatrix<f64> {
    let k = spec.levels();
    let n: usize = spec.full_order();
    let mut total = DMatrix::zeros(n, n);
    for i in 0..k {
        let mut m = DMatrix::identity(1, 1);
        for j in (i + 1..k).rev() {
            m = kron(&m, &DMatrix::identity(spec.bases()[j].order(), spec.bases()[j].order()));
        }
        m = kron(&m, &term(&spec.bases()[i]));
        for j in (0..i).rev() {
            m = kron(&m, &root_projector(&spec.bases()[j]));
        }
        total += m * spec.alphas()[i];
    }
    total
}
