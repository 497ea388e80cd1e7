//! Technology space: graph construction, backbone extraction, country
//! overlays and export.

mod backbone;
mod export;
mod graph;
mod overlay;

pub use backbone::{extract_backbone, BackboneSummary};
pub use export::{export_graph, import_graph, GraphDocument, GraphEdge, GraphFormat, GraphNode};
pub use graph::{build_space, field_sectors, Provenance, SpaceEdge, SpaceNode, TechnologySpace};
pub use overlay::{category_tag, overlay_specialisation, NodeMarking, Overlay};
