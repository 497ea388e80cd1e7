use std::cmp::Ordering;

use super::graph::TechnologySpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BackboneSummary {
    pub tree_edges: usize,
    pub extra_edges: usize,
    /// Connected components over all nodes, isolated nodes included.
    pub components: usize,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Flags a maximum spanning forest under edge weight plus the `extra`
/// heaviest remaining edges. Ties break by ascending node pair, so the
/// result depends only on the weights' order.
pub fn extract_backbone(space: &mut TechnologySpace, extra: usize) -> BackboneSummary {
    for e in &mut space.edges {
        e.backbone = false;
    }
    let mut order: Vec<usize> = (0..space.edges.len()).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&space.edges[a], &space.edges[b]);
        eb.weight
            .total_cmp(&ea.weight)
            .then((ea.source, ea.target).cmp(&(eb.source, eb.target)))
    });

    let n = space.nodes.len();
    let mut sets = DisjointSet::new(n);
    let mut tree_edges = 0;
    let mut rest = Vec::new();
    for &i in &order {
        let (s, t) = (space.edges[i].source, space.edges[i].target);
        if sets.union(s, t) {
            space.edges[i].backbone = true;
            tree_edges += 1;
        } else {
            rest.push(i);
        }
    }
    let extra_edges = rest.len().min(extra);
    for &i in &rest[..extra_edges] {
        space.edges[i].backbone = true;
    }

    let components = n - tree_edges;
    if components > 1 && !space.edges.is_empty() {
        log::warn!("backbone spans {components} components");
    }
    space.provenance.backbone_k = Some(extra);
    space.provenance.components = Some(components);
    BackboneSummary {
        tree_edges,
        extra_edges,
        components,
    }
}
