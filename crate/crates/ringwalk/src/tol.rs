//! Numerical tolerances and thresholds used across the crate.
//!
//! These are pinned here so every consumer (library, tests, CLI) agrees on
//! the same values.

/// Maximum `‖U†U − I‖_max` for a matrix to count as unitary.
pub const UNITARITY: f64 = 1e-12;

/// Maximum `|det U_F − 1|` for the bulk Floquet operator.
pub const DET_ONE: f64 = 1e-12;

/// Allowed relative norm drift of a field state under evolution.
pub const NORM_DRIFT: f64 = 1e-10;

/// Quasienergy splitting below which a 2×2 spectrum is flagged degenerate.
pub const DEGENERACY: f64 = 1e-10;

/// Maximum |total flux/2π − nearest integer| accepted by Chern rounding.
pub const CHERN_RESIDUE: f64 = 1e-3;

/// Maximum |raw winding − nearest integer| for a unitary loop.
pub const WINDING_RESIDUE: f64 = 1e-6;

/// Maximum `‖U(0) − U(2π)‖_max` for a loop of unitaries to count as closed.
pub const LOOP_CLOSURE: f64 = 1e-9;

/// Maximum phase step in det-phase unwrapping before the loop is declared
/// undersampled.
pub const UNWRAP_MAX_STEP: f64 = std::f64::consts::FRAC_PI_2;

/// Gap width below which a quasienergy gap counts as closed.
pub const GAP_CLOSURE: f64 = 1e-2;

/// Norm fraction within an edge/cell region for a state to count as
/// localized there.
pub const LOCALIZATION_THRESHOLD: f64 = 0.5;

/// Light-cone radius of one Floquet period, in cells.
pub const LIGHT_CONE_CELLS: usize = 4;

/// Width of the edge regions used for localization weights, in cells.
pub const EDGE_REGION_CELLS: usize = 4;

/// Minimum number of φ samples for spectral-flow tracking.
pub const MIN_FLOW_SAMPLES: usize = 64;

/// Minimum grid resolution per axis for band grids.
pub const MIN_GRID: usize = 8;

/// Default number of φ samples for winding integrals.
pub const WINDING_SAMPLES: usize = 256;
