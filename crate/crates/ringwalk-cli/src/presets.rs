//! Built-in parameter presets for the `reproduce` command, with the
//! reference integer invariants each scenario must reproduce.

use ringwalk::{Boundary, LatticeConfig};
use std::f64::consts::PI;

pub const FIG3_THETAS: [f64; 4] = [0.125 * PI, 0.25 * PI, 0.438 * PI, 0.438 * PI];
pub const FIG4_THETAS: [f64; 4] = [0.125 * PI, 0.25 * PI, 0.5 * PI, 0.25 * PI];
pub const FIG1_THETAS: [f64; 4] = [0.125 * PI, 0.25 * PI, 0.375 * PI, 0.125 * PI];

pub fn strip_config(thetas: [f64; 4], n_sites: usize) -> LatticeConfig {
    LatticeConfig::new(thetas, n_sites).expect("preset angles are valid")
}

pub fn ring_config(thetas: [f64; 4], n_sites: usize) -> LatticeConfig {
    LatticeConfig::periodic(thetas, n_sites).expect("preset angles are valid")
}

/// Edge schedules studied on the two reference lattices, with their exact
/// windings.
pub const EDGE_SCHEDULES: [( &str, Option<[i32; 4]>, i64); 3] = [
    ("a", None, 0),
    ("b_nu_minus", Some([1, 0, 1, 0]), -2),
    ("c_nu_plus", Some([-1, 0, -1, 0]), 2),
];

/// Reference left-edge spectral-flow counts per (E=0, E=π) gap.
pub struct FlowReference {
    pub case: &'static str,
    pub edge: Option<[i32; 4]>,
    pub nu: i64,
    pub expect: [i64; 2],
}

pub fn fig3_flow_references() -> Vec<FlowReference> {
    vec![
        FlowReference { case: "fig3a", edge: None, nu: 0, expect: [0, 0] },
        FlowReference { case: "fig3b", edge: Some([1, 0, -1, 1]), nu: -1, expect: [-1, -1] },
        FlowReference { case: "fig3c", edge: Some([1, 0, 1, 0]), nu: -2, expect: [-2, -2] },
    ]
}

pub fn fig4_flow_references() -> Vec<FlowReference> {
    vec![
        FlowReference { case: "fig4a", edge: None, nu: 0, expect: [2, 0] },
        FlowReference { case: "fig4b", edge: Some([1, 0, 1, 0]), nu: -2, expect: [0, -2] },
        FlowReference { case: "fig4c", edge: Some([-1, 0, -1, 0]), nu: 2, expect: [4, 2] },
    ]
}

/// Reference Chern integers at the two marked parameter points.
pub const CHERN_REFERENCES: [(&str, [f64; 4], i64, i64); 2] = [
    ("pink_diamond", FIG3_THETAS, 0, 0),
    ("green_diamond", FIG4_THETAS, 2, -2),
];

pub fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Periodic => "periodic",
        Boundary::Reflecting => "reflecting",
    }
}
