//! Small connected graph shapes for exhaustive checks.

use crate::graph::{GraphBuilder, GraphRole, LabeledGraph};

/// An undirected shape on nodes `0..nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Shape {
    /// Every node and edge carries one label, `M`.
    pub fn graph(&self) -> LabeledGraph {
        let mut b = GraphBuilder::new();
        for n in 0..self.nodes {
            b = b.node(&n.to_string(), "M");
        }
        for &(a, c) in &self.edges {
            b = b.edge(&a.to_string(), &c.to_string());
        }
        b.build(GraphRole::Data).expect("shape is a simple graph")
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.nodes];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &(a, b) in &self.edges {
                for (from, to) in [(a, b), (b, a)] {
                    if from == n && !seen[to] {
                        seen[to] = true;
                        stack.push(to);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected shapes one element larger: one more edge, or one more node
    /// attached by one edge.
    pub fn enlargements(&self, max_nodes: usize) -> Vec<Shape> {
        let mut out = Vec::new();
        for a in 0..self.nodes {
            for b in a + 1..self.nodes {
                if !self.edges.contains(&(a, b)) {
                    let mut edges = self.edges.clone();
                    edges.push((a, b));
                    out.push(Shape { nodes: self.nodes, edges });
                }
            }
        }
        if self.nodes < max_nodes {
            for a in 0..self.nodes {
                let mut edges = self.edges.clone();
                edges.push((a, self.nodes));
                out.push(Shape {
                    nodes: self.nodes + 1,
                    edges,
                });
            }
        }
        out
    }
}

/// All connected shapes with 2..=`max_nodes` nodes, as edge subsets of the
/// complete graph (isomorphic copies included).
pub fn connected_shapes(max_nodes: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for nodes in 2..=max_nodes {
        let pairs: Vec<(usize, usize)> = (0..nodes).flat_map(|a| (a + 1..nodes).map(move |b| (a, b))).collect();
        for mask in 1u64..(1 << pairs.len()) {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            let shape = Shape { nodes, edges };
            if shape.is_connected() {
                out.push(shape);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        // labeled connected graphs on 2, 3, 4 nodes: 1, 4, 38
        let count = |n| connected_shapes(n).iter().filter(|s| s.nodes == n).count();
        assert_eq!((count(2), count(3), count(4)), (1, 4, 38));
        assert_eq!(connected_shapes(5).iter().filter(|s| s.nodes == 5).count(), 728);
    }
}
