mod support;

use std::collections::BTreeSet;

use goi::pipeline;
use goi_core::compiler::{Threshold, DEFAULT_THRESHOLD};
use goi_core::model::{ControlType, VIRTUAL_ROOT_NAME};
use goi_core::sim::{SimAppSpec, SimSession};
use goi_core::text::{serialize, SerializationConfig, SHARED_DIVIDER};

use support::*;

const ROOT: &str = VIRTUAL_ROOT_NAME;

/// Reveal edges read straight off the app spec: each rule's `show` list, every
/// control an opened window starts with, and the initially visible main
/// controls under the root. Controls parented to the selected tab hang off
/// that tab instead.
fn declared_edges(spec: &SimAppSpec) -> BTreeSet<(String, String)> {
    let name = |key: &str| spec.controls.iter().find(|c| c.key == key).unwrap().name.clone();
    let main = spec.windows.iter().find(|w| w.main).unwrap();
    let tabs: Vec<_> = spec
        .controls
        .iter()
        .filter(|c| c.control_type == ControlType::TabItem)
        .collect();
    let active_tab = tabs.iter().find(|c| c.selected).filter(|_| tabs.len() >= 2);
    let mut edges = BTreeSet::new();
    for c in spec.controls.iter().filter(|c| c.window == main.id && c.visible) {
        match active_tab {
            Some(t) if c.parent.as_deref() == Some(t.key.as_str()) => edges.insert((t.name.clone(), c.name.clone())),
            _ => edges.insert((ROOT.to_string(), c.name.clone())),
        };
    }
    for r in &spec.reveal_rules {
        for k in &r.show {
            edges.insert((name(&r.on), name(k)));
        }
        if let Some(w) = &r.open_window {
            for c in spec.controls.iter().filter(|c| &c.window == w && c.visible) {
                edges.insert((name(&r.on), c.name.clone()));
            }
        }
    }
    edges
}

#[test]
fn ripped_edges_match_the_declared_reveal_table() {
    for name in FIXTURES {
        let spec = app(name);
        let doc = pipeline::rip_app(spec.clone(), &rip_config(name)).unwrap();
        let by_id = |id: &goi_core::model::ControlIdentifier| doc.graph.get(id).unwrap().name.clone();
        let ripped: BTreeSet<(String, String)> = doc
            .graph
            .edges()
            .iter()
            .map(|e| (by_id(&e.src), by_id(&e.dst)))
            .collect();
        assert_eq!(ripped, declared_edges(&spec), "{name}");
    }
}

#[test]
fn every_fixture_compiles_to_a_verified_forest() {
    for name in FIXTURES {
        for theta in [
            Threshold::Finite(0),
            Threshold::Finite(DEFAULT_THRESHOLD),
            Threshold::Infinite,
        ] {
            let doc = forest(name, theta);
            let report = pipeline::verify(&doc);
            assert!(report.is_ok(), "{name} at {theta}: {report}");
        }
    }
}

#[test]
fn ripping_is_repeatable() {
    for name in FIXTURES {
        let a = pipeline::rip_app(app(name), &rip_config(name)).unwrap();
        let b = pipeline::rip_app(app(name), &rip_config(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn diamond_lab_shares_the_gallery() {
    let doc = forest("diamond-lab", Threshold::default());
    let text = serialize(&doc.forest, &SerializationConfig::default());
    assert!(text.contains(&format!("\n{SHARED_DIVIDER}\n")));
    assert!(text.contains("ref 7 -> subtree 13"));
    assert!(text.contains("Freeform(Button)_14"));
    assert_eq!(doc.removed_edges.len(), 1);
    let path = goi_core::compiler::resolve_access(&doc.forest, 14, &[7]).unwrap();
    let names: Vec<&str> = path
        .origins(&doc.forest)
        .iter()
        .map(|o| o.primary_id.as_str())
        .collect();
    assert_eq!(names, [ROOT, "Insert", "Shapes", "Shape Gallery", "Freeform"]);
}

#[test]
fn fixtures_load_with_their_initial_state() {
    for name in FIXTURES {
        let s = SimSession::new(app(name)).unwrap();
        assert_eq!(s.tick(), 0, "{name}");
        assert!(s.log().is_empty());
    }
}
