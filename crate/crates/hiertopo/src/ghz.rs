//! Spreading-time benchmarks: the deterministic construction time of a
//! graph-spanning entangled state equals a weighted eccentricity, and a
//! seeded Monte Carlo models the probabilistic setting where each edge
//! fires independently per time step.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Metric};
use crate::products::{build_hierarchy, HierarchySpec};

/// Step cap for a single trial. Edge probabilities are bounded below by
/// construction, so hitting this signals a bug rather than bad luck.
pub const STEP_CAP: u64 = 1_000_000;

/// Pseudorandom generator family used for trials, echoed in run metadata.
pub const GENERATOR_FAMILY: &str = "chacha8";

/// A connected graph whose edge weights are per-step success
/// probabilities in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbGraph {
    graph: Graph,
}

impl ProbGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        for &(i, j, p) in graph.edges() {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability { i, j, p });
            }
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(ProbGraph { graph })
    }

    /// Uniform success probability `p0` on every edge of a unit-weight graph.
    pub fn uniform(graph: &Graph, p0: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(Error::InvalidBaseProbability(p0));
        }
        ProbGraph::new(graph.scale_weights(p0)?)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Graph with expected per-edge times 1/p as weights.
    pub fn time_weight_graph(&self) -> Graph {
        let edges: Vec<_> = self
            .graph
            .edges()
            .iter()
            .map(|&(i, j, p)| (i, j, 1.0 / p))
            .collect();
        Graph::new(self.graph.order(), &edges, self.graph.root())
            .expect("reciprocals of probabilities are positive")
    }

    /// Largest edge probability; the base probability of a level-weighted
    /// hierarchy.
    pub fn base_probability(&self) -> f64 {
        self.graph
            .edges()
            .iter()
            .map(|&(_, _, p)| p)
            .fold(0.0, f64::max)
    }
}

/// Assigns level-i edges of a hierarchy the success probability
/// `p0 * alpha^(i-1)`. Decay must not exceed 1, so deep levels only get
/// slower.
pub fn probability_weights(spec: &HierarchySpec, p0: f64, alpha: f64) -> Result<ProbGraph> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::InvalidBaseProbability(p0));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidDecayAlpha(alpha));
    }
    let alphas: Vec<f64> = (0..spec.levels()).map(|i| alpha.powi(i as i32)).collect();
    let weighted = HierarchySpec::new(spec.bases().to_vec(), alphas, spec.is_truncated())?;
    let graph = build_hierarchy(&weighted)?;
    ProbGraph::new(graph.scale_weights(p0)?)
}

/// Time to spread a state across the graph from `start` when each edge
/// takes its weight in time: the weighted eccentricity of the start node.
pub fn deterministic_ghz_time(g: &Graph, start: usize) -> Result<f64> {
    if start >= g.order() {
        return Err(Error::NodeOutOfRange {
            index: start,
            order: g.order(),
        });
    }
    let ecc = g.eccentricity(start, Metric::Weight);
    if ecc.is_infinite() {
        return Err(Error::Disconnected);
    }
    Ok(ecc)
}

/// Worst-case spreading time over start nodes: the weighted diameter.
pub fn worst_case_ghz_time(g: &Graph) -> Result<f64> {
    Ok(g.invariants()?.weighted_diameter)
}

/// Node with minimum weighted eccentricity (smallest index on ties).
pub fn weighted_center(g: &Graph) -> Result<usize> {
    let mut best = (f64::INFINITY, 0usize);
    for v in 0..g.order() {
        let ecc = g.eccentricity(v, Metric::Weight);
        if ecc.is_infinite() {
            return Err(Error::Disconnected);
        }
        if ecc < best.0 {
            best = (ecc, v);
        }
    }
    Ok(best.1)
}

/// One spreading trial: per step, every edge between a member and a
/// non-member fires independently with its probability; joins apply at the
/// end of the step. Returns the first step at which every node is a
/// member. Deterministic for a fixed seed: edges are sampled in canonical
/// order each step.
pub fn simulate_ghz(p: &ProbGraph, start: usize, seed: u64) -> Result<u64> {
    let g = p.graph();
    let n = g.order();
    if start >= n {
        return Err(Error::NodeOutOfRange {
            index: start,
            order: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut member = vec![false; n];
    member[start] = true;
    let mut count = 1usize;
    if count == n {
        return Ok(0);
    }
    for step in 1..=STEP_CAP {
        let mut joins: Vec<usize> = Vec::new();
        for &(i, j, prob) in g.edges() {
            if member[i] != member[j] && rng.random::<f64>() < prob {
                joins.push(if member[i] { j } else { i });
            }
        }
        for v in joins {
            if !member[v] {
                member[v] = true;
                count += 1;
            }
        }
        debug_assert!(count >= 1);
        if count == n {
            return Ok(step);
        }
    }
    Err(Error::StepCapExceeded(STEP_CAP))
}

/// Aggregate statistics over repeated trials, with the graph-theoretic
/// prediction and sandwich bounds alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
    pub min: u64,
    pub max: u64,
    pub seed: u64,
    /// Weighted eccentricity of the start under time weights 1/p.
    pub prediction: f64,
    /// Eccentricity under decay-only weights: prediction times p0.
    pub bound_lo: f64,
    /// Same as the prediction: a single shortest path at full base rate.
    pub bound_hi: f64,
}

/// Per-trial seeds drawn from a generator seeded by the master seed, so a
/// trial sweep is reproducible and each trial stays independent.
pub fn derive_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| seeder.next_u64()).collect()
}

/// Runs `trials` independent spreading trials with per-trial seeds drawn
/// from a generator seeded by `seed`, optionally fanned out over `jobs`
/// threads. Results are identical for any job count.
pub fn ghz_trials(
    p: &ProbGraph,
    start: usize,
    trials: usize,
    seed: u64,
    jobs: usize,
) -> Result<TrialStats> {
    if trials < 1 {
        return Err(Error::ParameterTooSmall {
            name: "trials",
            value: trials,
            min: 1,
        });
    }
    let trial_seeds = derive_seeds(seed, trials);

    let outcomes: Vec<u64> = if jobs <= 1 || trials == 1 {
        trial_seeds
            .iter()
            .map(|&s| simulate_ghz(p, start, s))
            .collect::<Result<_>>()?
    } else {
        let workers = jobs.min(trials);
        let chunk = trials.div_ceil(workers);
        let results: Vec<Result<Vec<u64>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = trial_seeds
                .chunks(chunk)
                .map(|seeds| {
                    scope.spawn(move || {
                        seeds
                            .iter()
                            .map(|&s| simulate_ghz(p, start, s))
                            .collect::<Result<Vec<u64>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all = Vec::with_capacity(trials);
        for r in results {
            all.extend(r?);
        }
        all
    };

    let mean = outcomes.iter().sum::<u64>() as f64 / trials as f64;
    let std = if trials > 1 {
        (outcomes
            .iter()
            .map(|&t| (t as f64 - mean).powi(2))
            .sum::<f64>()
            / (trials - 1) as f64)
            .sqrt()
    } else {
        0.0
    };
    let prediction = deterministic_ghz_time(&p.time_weight_graph(), start)?;
    Ok(TrialStats {
        trials,
        mean,
        std,
        min: outcomes.iter().copied().min().unwrap(),
        max: outcomes.iter().copied().max().unwrap(),
        seed,
        prediction,
        bound_lo: prediction * p.base_probability(),
        bound_hi: prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_times() {
        let p4 = Graph::new(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)], 0).unwrap();
        assert_eq!(deterministic_ghz_time(&p4, 0).unwrap(), 3.0);
        assert_eq!(worst_case_ghz_time(&p4).unwrap(), 3.0);
        assert_eq!(deterministic_ghz_time(&p4, 1).unwrap(), 2.0);
    }

    #[test]
    fn k3_tower_worst_case() {
        let spec = HierarchySpec::uniform(Graph::complete(3).unwrap(), 2, false).unwrap();
        let g = build_hierarchy(&spec).unwrap();
        assert_eq!(worst_case_ghz_time(&g).unwrap(), 3.0);

        let weighted = HierarchySpec::new(
            vec![Graph::complete(3).unwrap(), Graph::complete(3).unwrap()],
            vec![1.0, 2.0],
            false,
        )
        .unwrap();
        let g = build_hierarchy(&weighted).unwrap();
        assert_eq!(worst_case_ghz_time(&g).unwrap(), 4.0);
    }

    #[test]
    fn radius_within_factor_two_of_diameter() {
        for g in [
            Graph::porcupine(4).unwrap(),
            Graph::grid(2, 4).unwrap(),
            Graph::cycle(9).unwrap(),
        ] {
            let center = weighted_center(&g).unwrap();
            let best = deterministic_ghz_time(&g, center).unwrap();
            let worst = worst_case_ghz_time(&g).unwrap();
            assert!(best <= worst && worst <= 2.0 * best);
        }
    }

    #[test]
    fn probability_assignment_by_level() {
        let spec = HierarchySpec::uniform(Graph::complete(3).unwrap(), 2, false).unwrap();
        let p = probability_weights(&spec, 0.1, 0.5).unwrap();
        let mut probs: Vec<f64> = p.graph().edges().iter().map(|&(_, _, w)| w).collect();
        probs.sort_by(f64::total_cmp);
        probs.dedup();
        assert_eq!(probs, vec![0.05, 0.1]);
        assert_eq!(p.base_probability(), 0.1);
    }

    #[test]
    fn probability_weights_keep_mixed_bases() {
        let spec = HierarchySpec::new(
            vec![Graph::complete(4).unwrap(), Graph::cycle(5).unwrap()],
            vec![1.0, 1.0],
            false,
        )
        .unwrap();
        let p = probability_weights(&spec, 0.2, 0.5).unwrap();
        assert_eq!(p.graph().order(), 20);
        // Five C5 edges at 0.1 between module roots, 5 * 6 K4 edges at 0.2.
        let tops = p
            .graph()
            .edges()
            .iter()
            .filter(|&&(_, _, w)| w == 0.2 * 0.5)
            .count();
        assert_eq!(tops, 5);
    }

    #[test]
    fn uniform_when_alpha_is_one() {
        let spec = HierarchySpec::uniform(Graph::complete(3).unwrap(), 2, false).unwrap();
        let p = probability_weights(&spec, 0.2, 1.0).unwrap();
        assert!(p.graph().edges().iter().all(|&(_, _, w)| w == 0.2));
    }

    #[test]
    fn rejects_bad_probabilities() {
        let spec = HierarchySpec::uniform(Graph::complete(3).unwrap(), 2, false).unwrap();
        assert!(matches!(
            probability_weights(&spec, 1.5, 0.5).unwrap_err(),
            Error::InvalidBaseProbability(_)
        ));
        assert!(matches!(
            probability_weights(&spec, 0.1, 1.2).unwrap_err(),
            Error::InvalidDecayAlpha(_)
        ));
        let g = Graph::new(2, &[(0, 1, 2.0)], 0).unwrap();
        assert!(matches!(
            ProbGraph::new(g).unwrap_err(),
            Error::InvalidProbability { .. }
        ));
    }

    #[test]
    fn certain_edges_spread_in_hop_eccentricity() {
        let g = Graph::grid(2, 3).unwrap();
        let p = ProbGraph::uniform(&g, 1.0).unwrap();
        let t = simulate_ghz(&p, 0, 7).unwrap();
        assert_eq!(t as f64, g.eccentricity(0, Metric::Hop));
    }

    #[test]
    fn single_edge_mean_matches_geometric_law() {
        let k2 = Graph::complete(2).unwrap();
        let p = ProbGraph::uniform(&k2, 0.5).unwrap();
        let stats = ghz_trials(&p, 0, 10_000, 11, 1).unwrap();
        assert!((stats.mean - 2.0).abs() < 0.05, "mean = {}", stats.mean);
    }

    #[test]
    fn seed_determinism_and_job_count_invariance() {
        let g = Graph::grid(2, 4).unwrap();
        let p = ProbGraph::uniform(&g, 0.3).unwrap();
        let a = ghz_trials(&p, 0, 40, 123, 1).unwrap();
        let b = ghz_trials(&p, 0, 40, 123, 4).unwrap();
        assert_eq!(a, b);
        let c = ghz_trials(&p, 0, 40, 124, 1).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn grid_mean_inside_sandwich() {
        let g = Graph::grid(2, 8).unwrap();
        let p = ProbGraph::uniform(&g, 0.1).unwrap();
        // Corner start: decay-free eccentricity is 14 hops.
        let stats = ghz_trials(&p, 0, 200, 5, 1).unwrap();
        assert_eq!(stats.bound_lo, 14.0);
        assert_eq!(stats.bound_hi, 140.0);
        assert!(stats.bound_lo <= stats.mean && stats.mean <= stats.bound_hi);
    }

    #[test]
    fn trials_one_has_zero_std() {
        let k2 = Graph::complete(2).unwrap();
        let p = ProbGraph::uniform(&k2, 0.9).unwrap();
        let stats = ghz_trials(&p, 0, 1, 3, 1).unwrap();
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.mean, stats.min as f64);
    }
}
