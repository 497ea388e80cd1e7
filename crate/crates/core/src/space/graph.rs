use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::FIELDS;
use crate::error::{Error, Result};
use crate::metrics::{ComplexityAxis, ComplexityVector, RelatednessMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceNode {
    pub label: String,
    pub sector: String,
    /// Technology complexity divided by the largest value in the space.
    pub complexity: Option<f64>,
    /// Weighted degree: sum of relatedness to every other node.
    pub degree: f64,
}

/// Undirected edge between node indices `source < target`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub backbone: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub window: String,
    pub scope: String,
    pub backbone_k: Option<usize>,
    pub components: Option<usize>,
}

/// Technology nodes annotated with complexity, joined by relatedness edges.
/// Nodes are sorted by label; edges by `(source, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologySpace {
    pub nodes: Vec<SpaceNode>,
    pub edges: Vec<SpaceEdge>,
    pub provenance: Provenance,
}

impl TechnologySpace {
    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.label.as_str().cmp(label)).ok()
    }

    pub fn backbone_edges(&self) -> impl Iterator<Item = &SpaceEdge> {
        self.edges.iter().filter(|e| e.backbone)
    }
}

/// Sector of each of the 35 fields.
pub fn field_sectors() -> BTreeMap<String, String> {
    FIELDS.iter().map(|(f, s)| (f.to_string(), s.to_string())).collect()
}

/// Builds the weighted graph of all technology pairs with positive
/// relatedness. Technologies without any positive pair stay as isolated
/// nodes.
pub fn build_space(
    phi: &RelatednessMatrix,
    kt: &ComplexityVector,
    sectors: &BTreeMap<String, String>,
) -> Result<TechnologySpace> {
    if kt.axis != ComplexityAxis::Technology {
        return Err(Error::LabelMismatch(
            "node complexity must be a technology vector".into(),
        ));
    }
    let phi_labels: BTreeSet<&str> = phi.technologies().iter().map(String::as_str).collect();
    let kt_labels: BTreeSet<&str> = kt.labels.iter().map(String::as_str).collect();
    if phi_labels != kt_labels || phi_labels.len() != phi.len() {
        return Err(Error::LabelMismatch(
            "relatedness and complexity cover different technologies".into(),
        ));
    }

    let max = kt.max().filter(|&m| m > 0.0);
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&a, &b| phi.technologies()[a].cmp(&phi.technologies()[b]));
    let nodes: Vec<SpaceNode> = order
        .iter()
        .map(|&i| {
            let label = &phi.technologies()[i];
            SpaceNode {
                label: label.clone(),
                sector: sectors.get(label).cloned().unwrap_or_default(),
                complexity: max.and_then(|m| kt.get(label).map(|v| v / m)),
                degree: phi.weighted_degree(i),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for (a, &i) in order.iter().enumerate() {
        for (b, &j) in order.iter().enumerate().skip(a + 1) {
            let w = phi.get(i, j);
            if w > 0.0 {
                edges.push(SpaceEdge {
                    source: a,
                    target: b,
                    weight: w,
                    backbone: false,
                });
            }
        }
    }
    Ok(TechnologySpace {
        nodes,
        edges,
        provenance: Provenance {
            window: phi.meta().window.clone(),
            scope: phi.meta().scope.clone(),
            backbone_k: None,
            components: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kt(labels: &[&str], values: &[Option<f64>]) -> ComplexityVector {
        ComplexityVector {
            axis: ComplexityAxis::Technology,
            depth: 2,
            labels: labels.iter().map(|s| s.to_string()).collect(),
            values: values.to_vec(),
            excluded: vec![],
        }
    }

    #[test]
    fn nodes_edges_and_normalisation() {
        let phi = RelatednessMatrix::from_dense(
            &["c", "a", "b"],
            &[vec![0.0, 2.0, 0.0], vec![2.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]],
        )
        .unwrap();
        let k = kt(&["a", "b", "c"], &[Some(4.0), Some(2.0), None]);
        let sectors = BTreeMap::from([("a".to_string(), "S1".to_string())]);
        let s = build_space(&phi, &k, &sectors).unwrap();
        let labels: Vec<&str> = s.nodes.iter().map(|n| n.label.as_str()).collect();
        assert_eq!(labels, ["a", "b", "c"]);
        assert_eq!(s.nodes[0].complexity, Some(1.0));
        assert_eq!(s.nodes[1].complexity, Some(0.5));
        assert_eq!(s.nodes[2].complexity, None);
        assert_eq!(s.nodes[0].sector, "S1");
        assert_eq!(s.nodes[0].degree, 3.0);
        assert_eq!(s.edges.len(), 2);
        assert_eq!((s.edges[0].source, s.edges[0].target, s.edges[0].weight), (0, 1, 1.0));
        assert_eq!((s.edges[1].source, s.edges[1].target, s.edges[1].weight), (0, 2, 2.0));
    }

    #[test]
    fn isolated_node_retained() {
        let phi = RelatednessMatrix::from_dense(
            &["a", "b", "c"],
            &[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        let s = build_space(&phi, &kt(&["a", "b", "c"], &[Some(1.0); 3]), &BTreeMap::new()).unwrap();
        assert_eq!(s.nodes.len(), 3);
        assert_eq!(s.nodes[2].degree, 0.0);
        assert_eq!(s.edges.len(), 1);
    }

    #[test]
    fn mismatched_labels_rejected() {
        let phi = RelatednessMatrix::from_dense(&["a", "b"], &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let err = build_space(&phi, &kt(&["a", "x"], &[Some(1.0); 2]), &BTreeMap::new());
        assert!(matches!(err, Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn field_sector_table() {
        let s = field_sectors();
        assert_eq!(s.len(), 35);
        assert_eq!(s["Control"], "Instruments");
    }
}
