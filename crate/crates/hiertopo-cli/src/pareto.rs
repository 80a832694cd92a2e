//! Pareto comparison of measured topology metrics at matched order.

use anyhow::{bail, Result};

/// One topology's comparison metrics, all to be minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTuple {
    pub label: String,
    pub weighted_diameter: f64,
    pub max_degree: u64,
    pub total_edge_weight: f64,
    pub order: usize,
}

impl MetricTuple {
    /// Strict Pareto dominance: no metric worse, at least one better.
    fn dominates(&self, other: &MetricTuple) -> bool {
        let no_worse = self.weighted_diameter <= other.weighted_diameter
            && self.max_degree <= other.max_degree
            && self.total_edge_weight <= other.total_edge_weight;
        let better = self.weighted_diameter < other.weighted_diameter
            || self.max_degree < other.max_degree
            || self.total_edge_weight < other.total_edge_weight;
        no_worse && better
    }
}

/// Non-dominated subset of the records, in input order. All records must
/// describe graphs of the same order so the comparison is fair.
pub fn pareto_front(records: &[MetricTuple]) -> Result<Vec<MetricTuple>> {
    if let Some(first) = records.first() {
        if let Some(bad) = records.iter().find(|r| r.order != first.order) {
            bail!(
                "records mix orders: {} has N={}, {} has N={}",
                first.label,
                first.order,
                bad.label,
                bad.order
            );
        }
    }
    Ok(records
        .iter()
        .filter(|r| !records.iter().any(|other| other.dominates(r)))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(label: &str, dw: f64, deg: u64, w: f64) -> MetricTuple {
        MetricTuple {
            label: label.into(),
            weighted_diameter: dw,
            max_degree: deg,
            total_edge_weight: w,
            order: 16,
        }
    }

    #[test]
    fn single_record_survives() {
        let records = vec![tuple("a", 1.0, 2, 3.0)];
        assert_eq!(pareto_front(&records).unwrap(), records);
    }

    #[test]
    fn identical_records_both_survive() {
        let records = vec![tuple("a", 1.0, 2, 3.0), tuple("b", 1.0, 2, 3.0)];
        assert_eq!(pareto_front(&records).unwrap().len(), 2);
    }

    #[test]
    fn dominated_record_drops() {
        let records = vec![
            tuple("good", 1.0, 2, 3.0),
            tuple("worse", 2.0, 2, 3.0),
            tuple("incomparable", 0.5, 9, 9.0),
        ];
        let front = pareto_front(&records).unwrap();
        let labels: Vec<&str> = front.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, vec!["good", "incomparable"]);
    }

    #[test]
    fn front_matches_brute_force() {
        // Deterministic pseudo-random tuples; survivors must be exactly the
        // non-dominated ones.
        let mut records = Vec::new();
        let mut x = 7u64;
        for i in 0..40 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (x >> 8) % 10;
            let b = (x >> 20) % 10;
            let c = (x >> 32) % 10;
            records.push(MetricTuple {
                label: format!("g{}", i),
                weighted_diameter: a as f64,
                max_degree: b,
                total_edge_weight: c as f64,
                order: 9,
            });
        }
        let front = pareto_front(&records).unwrap();
        for r in &records {
            let dominated = records.iter().any(|o| o.dominates(r));
            assert_eq!(front.contains(r), !dominated, "{}", r.label);
        }
    }

    #[test]
    fn mixed_orders_rejected() {
        let mut records = vec![tuple("a", 1.0, 2, 3.0)];
        records.push(MetricTuple {
            order: 25,
            ..tuple("b", 1.0, 2, 3.0)
        });
        assert!(pareto_front(&records).is_err());
    }
}
