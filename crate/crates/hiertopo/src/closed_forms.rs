//! Analytic recursions and closed forms for hierarchy invariants, plus the
//! degree-diameter capacity checks. Everything here is pure arithmetic on
//! base-graph invariants, so it doubles as an independent oracle for the
//! measured values on built graphs.

use crate::error::{Error, Result};
use crate::graph::{Graph, Metric};

/// Invariants of a single base graph, as consumed by the recursions.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseInvariants {
    pub diameter: f64,
    pub root_eccentricity: f64,
    pub weighted_diameter: f64,
    pub weighted_root_eccentricity: f64,
    pub max_degree: f64,
    pub root_degree: f64,
    pub total_edge_weight: f64,
    pub order: usize,
}

impl BaseInvariants {
    /// Measures the inputs straight off a connected graph.
    pub fn measure(g: &Graph) -> Result<Self> {
        let inv = g.invariants()?;
        Ok(BaseInvariants {
            diameter: inv.diameter,
            root_eccentricity: g.eccentricity(g.root(), Metric::Hop),
            weighted_diameter: inv.weighted_diameter,
            weighted_root_eccentricity: g.eccentricity(g.root(), Metric::Weight),
            max_degree: inv.max_degree as f64,
            root_degree: g.degree(g.root()) as f64,
            total_edge_weight: inv.total_edge_weight,
            order: g.order(),
        })
    }
}

/// Weight regime of a geometric K_n hierarchy, by comparing alpha with 1
/// and with the base order n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowOne,
    One,
    BetweenOneAndBase,
    EqualsBase,
    AboveBase,
}

impl Regime {
    pub fn classify(n: usize, alpha: f64) -> Self {
        let n = n as f64;
        if alpha < 1.0 {
            Regime::BelowOne
        } else if alpha == 1.0 {
            Regime::One
        } else if alpha < n {
            Regime::BetweenOneAndBase
        } else if alpha == n {
            Regime::EqualsBase
        } else {
            Regime::AboveBase
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::BelowOne => "alpha<1",
            Regime::One => "alpha=1",
            Regime::BetweenOneAndBase => "1<alpha<n",
            Regime::EqualsBase => "alpha=n",
            Regime::AboveBase => "alpha>n",
        }
    }
}

/// Closed-form invariants of a k-level hierarchy of one base graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FormulaRecord {
    pub diameter: f64,
    pub root_eccentricity: f64,
    pub weighted_diameter: f64,
    pub weighted_root_eccentricity: f64,
    pub max_degree: f64,
    pub total_edge_weight: f64,
    pub regime: Option<Regime>,
}

/// Evaluates the hierarchy recursions in closed form.
///
/// With base invariants d = diameter, e = root eccentricity (and their
/// weighted versions), D = max degree, r = root degree, w = edge weight,
/// n = order, the k-level hierarchy with level weights a_1..a_k satisfies
///
///   diameter      = 2 (k-1) e + d
///   eccentricity  = k e
///   w. diameter   = 2 e_w (a_1 + .. + a_{k-1}) + a_k d_w
///   w. eccentr.   = e_w (a_1 + .. + a_k)
///   max degree    = (k-1) r + D
///   total weight  = w * sum_i a_i n^(k-i)
pub fn hierarchy_formulas(
    base: &BaseInvariants,
    k: usize,
    alphas: &[f64],
) -> Result<FormulaRecord> {
    if k < 1 {
        return Err(Error::ParameterTooSmall {
            name: "k",
            value: k,
            min: 1,
        });
    }
    if alphas.len() != k {
        return Err(Error::AlphaCountMismatch {
            alphas: alphas.len(),
            bases: k,
        });
    }
    if alphas[0] != 1.0 {
        return Err(Error::UnnormalizedAlphas(alphas[0]));
    }
    let prefix: f64 = alphas[..k - 1].iter().sum();
    let all: f64 = alphas.iter().sum();
    let n = base.order as f64;
    let total_edge_weight = base.total_edge_weight
        * alphas
            .iter()
            .enumerate()
            .map(|(i, &a)| a * n.powi((k - 1 - i) as i32))
            .sum::<f64>();
    Ok(FormulaRecord {
        diameter: 2.0 * (k as f64 - 1.0) * base.root_eccentricity + base.diameter,
        root_eccentricity: k as f64 * base.root_eccentricity,
        weighted_diameter: 2.0 * base.weighted_root_eccentricity * prefix
            + alphas[k - 1] * base.weighted_diameter,
        weighted_root_eccentricity: base.weighted_root_eccentricity * all,
        max_degree: (k as f64 - 1.0) * base.root_degree + base.max_degree,
        total_edge_weight,
        regime: None,
    })
}

/// Weighted diameter of the geometric complete-graph hierarchy K_n^k:
/// (alpha^k + alpha^(k-1) - 2) / (alpha - 1), with the unweighted value
/// 2k - 1 at alpha = 1.
pub fn kn_weighted_diameter(n: usize, k: usize, alpha: f64) -> f64 {
    debug_assert!(n >= 2 && k >= 1 && alpha > 0.0);
    if alpha == 1.0 {
        (2 * k - 1) as f64
    } else {
        (alpha.powi(k as i32) + alpha.powi(k as i32 - 1) - 2.0) / (alpha - 1.0)
    }
}

/// Total edge weight of K_n^k with geometric level weights:
/// n(n-1)/2 * (n^k - alpha^k) / (n - alpha), with the alpha = n branch
/// evaluating the constant sum k n^(k-1).
pub fn kn_total_weight(n: usize, k: usize, alpha: f64) -> f64 {
    debug_assert!(n >= 2 && k >= 1 && alpha > 0.0);
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    if alpha == nf {
        pairs * k as f64 * nf.powi(k as i32 - 1)
    } else {
        pairs * (nf.powi(k as i32) - alpha.powi(k as i32)) / (nf - alpha)
    }
}

/// Node count of a k-level truncated hierarchy over a base of order n:
/// sum of (n-1)^i for i = 0..=k.
pub fn truncated_node_count(n: usize, k: usize) -> u64 {
    debug_assert!(n >= 2);
    (0..=k as u32).map(|i| (n as u64 - 1).pow(i)).sum()
}

/// Moore bound and (optionally) the small-tree-width node capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDiameterBounds {
    pub moore_bound: f64,
    pub treewidth_capacity: Option<f64>,
}

/// Degree-diameter capacity checks: the Moore bound
/// (D (D-1)^delta - 2) / (D - 2) for any graph, and the tree-width
/// capacity t (D-1)^((delta-1)/2) for odd diameters.
pub fn degree_diameter_checks(
    delta_max: usize,
    diam: usize,
    treewidth: Option<usize>,
) -> Result<DegreeDiameterBounds> {
    if delta_max < 3 {
        return Err(Error::ParameterTooSmall {
            name: "delta_max",
            value: delta_max,
            min: 3,
        });
    }
    if diam < 1 {
        return Err(Error::ParameterTooSmall {
            name: "diam",
            value: diam,
            min: 1,
        });
    }
    let d = delta_max as f64;
    let moore_bound = (d * (d - 1.0).powi(diam as i32) - 2.0) / (d - 2.0);
    let treewidth_capacity = match treewidth {
        None => None,
        Some(t) => {
            if diam % 2 == 0 {
                return Err(Error::ParameterTooSmall {
                    name: "diam (must be odd for the capacity branch)",
                    value: diam,
                    min: diam + 1,
                });
            }
            Some(t as f64 * (d - 1.0).powi(((diam - 1) / 2) as i32))
        }
    };
    Ok(DegreeDiameterBounds {
        moore_bound,
        treewidth_capacity,
    })
}
