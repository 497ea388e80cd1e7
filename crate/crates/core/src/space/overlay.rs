use std::collections::{BTreeMap, BTreeSet};

use super::graph::TechnologySpace;
use crate::metrics::{Categories, AI_CORE, AI_RELATED, SURROUNDING};

#[derive(Debug, Clone, PartialEq)]
pub struct NodeMarking {
    /// Specialisation flag per window label.
    pub specialised: BTreeMap<String, bool>,
    pub category: String,
}

/// A technology space with one scope's specialisation marked on each node.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub space: TechnologySpace,
    pub scope: String,
    pub windows: Vec<String>,
    /// Aligned with `space.nodes`.
    pub markings: Vec<NodeMarking>,
}

/// Short tag used for a category in graph attributes.
pub fn category_tag(category: Option<&str>) -> String {
    match category {
        Some(AI_CORE) => "core".into(),
        Some(AI_RELATED) => "related".into(),
        Some(SURROUNDING) => "surrounding".into(),
        Some(other) => other.to_lowercase(),
        None => "other".into(),
    }
}

/// Marks which nodes the scope is specialised in for each window. Labels
/// outside the space are ignored.
pub fn overlay_specialisation(
    space: &TechnologySpace,
    scope: &str,
    windows: &[(String, BTreeSet<String>)],
    categories: &Categories,
) -> Overlay {
    for (window, set) in windows {
        let stray = set.iter().filter(|l| space.node_index(l).is_none()).count();
        if stray > 0 {
            log::warn!("{scope}/{window}: {stray} specialised labels are not in the space");
        }
    }
    let markings = space
        .nodes
        .iter()
        .map(|n| NodeMarking {
            specialised: windows
                .iter()
                .map(|(w, set)| (w.clone(), set.contains(&n.label)))
                .collect(),
            category: category_tag(categories.category_of(&n.label)),
        })
        .collect();
    let mut space = space.clone();
    space.provenance.scope = scope.to_string();
    Overlay {
        space,
        scope: scope.to_string(),
        windows: windows.iter().map(|(w, _)| w.clone()).collect(),
        markings,
    }
}
