use crate::graph::{DegreeDistribution, Graph, JointDegreeStats};

use super::ReactiveError;

/// Largest family accepted; each ODE step solves an `N × N` system.
pub const MAX_MEMBERS: usize = 16;

#[derive(Debug, Clone)]
pub struct GraphFamily {
    stats: Vec<JointDegreeStats>,
    graphs: Option<Vec<Graph>>,
}

impl GraphFamily {
    /// Family of concrete graphs, usable for both the ODE and the coupled
    /// simulation.
    pub fn from_graphs(graphs: Vec<Graph>) -> Result<Self, ReactiveError> {
        let stats = graphs.iter().map(JointDegreeStats::from_graph).collect();
        let mut family = Self::from_stats(stats)?;
        family.graphs = Some(graphs);
        Ok(family)
    }

    /// Family known only through joint degree statistics (ODE only).
    pub fn from_stats(stats: Vec<JointDegreeStats>) -> Result<Self, ReactiveError> {
        if stats.is_empty() || stats.len() > MAX_MEMBERS {
            return Err(ReactiveError::InvalidArgument(format!(
                "family needs 1..={MAX_MEMBERS} members, got {}",
                stats.len()
            )));
        }
        let base = stats[0].distribution();
        for (member, s) in stats.iter().enumerate().skip(1) {
            if !same_distribution(base, s.distribution()) {
                return Err(ReactiveError::MismatchedDistribution { member });
            }
        }
        Ok(GraphFamily { stats, graphs: None })
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn stats(&self, member: usize) -> &JointDegreeStats {
        &self.stats[member]
    }

    pub fn graph(&self, member: usize) -> Option<&Graph> {
        self.graphs.as_ref().map(|g| &g[member])
    }

    pub fn graphs(&self) -> Option<&[Graph]> {
        self.graphs.as_deref()
    }

    /// The shared `P(k)`.
    pub fn distribution(&self) -> &DegreeDistribution {
        self.stats[0].distribution()
    }

    pub fn class_count(&self) -> usize {
        self.distribution().class_count()
    }

    pub fn max_degree(&self) -> usize {
        self.distribution().max_degree()
    }
}

fn same_distribution(a: &DegreeDistribution, b: &DegreeDistribution) -> bool {
    a.degrees() == b.degrees() && a.probs().iter().zip(b.probs()).all(|(p, q)| (p - q).abs() <= 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_members() {
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(
            GraphFamily::from_graphs(vec![path.clone(), star]),
            Err(ReactiveError::MismatchedDistribution { member: 1 })
        ));
        let relabeled = path.relabeled(&[3, 1, 2, 0]).unwrap();
        let f = GraphFamily::from_graphs(vec![path, relabeled]).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.graph(1).is_some());
    }

    #[test]
    fn size_limits() {
        assert!(GraphFamily::from_stats(vec![]).is_err());
        let s = JointDegreeStats::from_graph(&Graph::from_edges(2, [(0, 1)]).unwrap());
        assert!(GraphFamily::from_stats(vec![s.clone(); MAX_MEMBERS + 1]).is_err());
        let f = GraphFamily::from_stats(vec![s; 3]).unwrap();
        assert!(f.graph(0).is_none());
    }
}
