//! Shared fixtures for the benchmarks.

use std::collections::BTreeMap;

use conmat::{GaussRational, Graph, VertexModel};

pub fn isotropic_model() -> VertexModel {
    let mut support = BTreeMap::new();
    support.insert(vec![1, 0], GaussRational::from_int(1));
    support.insert(vec![0, 1], GaussRational::i());
    VertexModel::new(2, support).unwrap()
}

pub fn matching_model(max_degree: u32) -> VertexModel {
    let mut support = BTreeMap::new();
    for a in 0..max_degree {
        support.insert(vec![a, 1], GaussRational::from_int(1));
    }
    VertexModel::new(2, support).unwrap()
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    Graph::new(n, edges, 0).unwrap()
}
