//! Global technology space and per-scope specialisation overlays.

use std::collections::BTreeSet;
use std::path::Path;

use techspace::space::{
    build_space, export_graph, extract_backbone, field_sectors, overlay_specialisation, BackboneSummary, GraphDocument,
    GraphFormat, Overlay, Provenance, TechnologySpace,
};

use crate::analysis::{Analysis, GLOBAL_WINDOW, SCOPE_AI, SCOPE_ALL};
use crate::config::{Resources, RunConfig};
use crate::error::Result;
use crate::output::write_atomic;

/// Specialised field sets per window label.
type WindowSets = Vec<(String, BTreeSet<String>)>;

#[derive(Debug, Clone)]
pub struct Spaces {
    pub global: TechnologySpace,
    pub backbone: Option<BackboneSummary>,
    /// Per scope: one overlay over all windows, then one per window.
    pub overlays: Vec<(Overlay, Vec<Overlay>)>,
}

pub fn build_spaces(analysis: &Analysis, cfg: &RunConfig, res: &Resources) -> Result<Spaces> {
    let g = &analysis.global;
    let (global, backbone) = match (&g.phi, g.kt_final()) {
        (Some(phi), Some(kt)) => {
            let mut space = build_space(phi, kt, &field_sectors())?;
            let summary = extract_backbone(&mut space, cfg.backbone_k);
            (space, Some(summary))
        }
        _ => {
            log::warn!("no data for the global space; writing an empty graph");
            let space = TechnologySpace {
                nodes: vec![],
                edges: vec![],
                provenance: Provenance {
                    window: GLOBAL_WINDOW.into(),
                    scope: SCOPE_ALL.into(),
                    backbone_k: None,
                    components: None,
                },
            };
            (space, None)
        }
    };

    let mut scopes: Vec<(String, WindowSets)> = vec![(
        SCOPE_AI.to_string(),
        analysis
            .windows
            .iter()
            .map(|w| (w.window.label.clone(), w.ai_specialised()))
            .collect(),
    )];
    for country in &cfg.countries {
        let per_window = analysis
            .windows
            .iter()
            .map(|w| {
                let set = w
                    .countries
                    .iter()
                    .find(|c| &c.country == country)
                    .map(|c| c.specialised.clone())
                    .unwrap_or_default();
                (w.window.label.clone(), set)
            })
            .collect();
        scopes.push((country.clone(), per_window));
    }
    let overlays = scopes
        .iter()
        .map(|(scope, windows)| {
            let combined = overlay_specialisation(&global, scope, windows, &res.categories);
            let single = windows
                .iter()
                .map(|w| overlay_specialisation(&global, scope, std::slice::from_ref(w), &res.categories))
                .collect();
            (combined, single)
        })
        .collect();
    Ok(Spaces {
        global,
        backbone,
        overlays,
    })
}

fn write_doc(dir: &Path, stem: &str, doc: &GraphDocument, formats: &[GraphFormat]) -> Result<()> {
    for &f in formats {
        let path = dir.join(format!("{stem}.{}", f.extension()));
        write_atomic(path, export_graph(doc, f).as_bytes())?;
    }
    Ok(())
}

/// `space_global.*`, `space_<scope>.*` with every window, and
/// `space_<scope>_<window>.*` per window.
pub fn write_spaces(spaces: &Spaces, formats: &[GraphFormat], dir: &Path) -> Result<()> {
    write_doc(dir, "space_global", &GraphDocument::from_space(&spaces.global), formats)?;
    for (combined, single) in &spaces.overlays {
        write_doc(
            dir,
            &format!("space_{}", combined.scope),
            &GraphDocument::from_overlay(combined),
            formats,
        )?;
        for o in single {
            let stem = format!("space_{}_{}", o.scope, o.windows.join("+"));
            write_doc(dir, &stem, &GraphDocument::from_overlay(o), formats)?;
        }
    }
    Ok(())
}
