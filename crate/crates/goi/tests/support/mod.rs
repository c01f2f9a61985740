//! Fixture access shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::path::PathBuf;

use goi::formats::{self, ForestDoc};
use goi::pipeline;
use goi_core::compiler::Threshold;
use goi_core::ripper::RipperConfig;
use goi_core::sim::SimAppSpec;

pub const FIXTURES: [&str; 5] = ["slides-app", "sheet-app", "doc-app", "diamond-lab", "blowup-lab"];

pub fn fixture(name: &str, file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .join(file)
}

pub fn app(name: &str) -> SimAppSpec {
    formats::load_app(&fixture(name, "app.json")).unwrap()
}

pub fn rip_config(name: &str) -> RipperConfig {
    formats::load_rip_config(&fixture(name, "rip.json")).unwrap()
}

/// Rips and compiles a fixture at `threshold`.
pub fn forest(name: &str, threshold: Threshold) -> ForestDoc {
    let graph = pipeline::rip_app(app(name), &rip_config(name)).unwrap();
    assert!(
        graph.complete && graph.warnings.is_empty(),
        "{name}: {:?}",
        graph.warnings
    );
    pipeline::compile_graph(&graph.graph, threshold).unwrap()
}
