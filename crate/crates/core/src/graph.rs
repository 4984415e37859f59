//! Weighted digraph view of a machine.

use crate::machine::{Machine, StateId, Transition};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: StateId,
    pub to: StateId,
    pub weight: Rational,
}

/// One vertex per state, one edge per transition; parallel edges and loops
/// are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    pub labels: Vec<String>,
    pub edges: Vec<Edge>,
}

impl WeightedDigraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn vertex(&self, label: &str) -> Option<StateId> {
        self.labels.iter().position(|l| l == label).map(StateId)
    }
}

/// Builds the state graph of `machine`, weighting each edge by
/// `edge_weight` applied to its transition.
pub fn digraph<F>(machine: &Machine, mut edge_weight: F) -> WeightedDigraph
where
    F: FnMut(&Transition) -> Rational,
{
    WeightedDigraph {
        labels: machine.states().iter().map(|s| s.label.clone()).collect(),
        edges: machine
            .transitions()
            .iter()
            .map(|t| Edge {
                from: t.from,
                to: t.to,
                weight: edge_weight(t),
            })
            .collect(),
    }
}

impl Machine {
    pub fn digraph<F>(&self, edge_weight: F) -> WeightedDigraph
    where
        F: FnMut(&Transition) -> Rational,
    {
        digraph(self, edge_weight)
    }
}
