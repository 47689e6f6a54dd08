//! Lattice configuration: splitting angles, boundaries, phase schedules.
//!
//! A configuration describes one four-step Floquet walk: the splitting
//! angles θ₁..θ₄, the number of stored unit cells, the boundary type, the
//! bulk ±φ modulation pattern and optional coefficient schedules that
//! override the bulk pattern at an edge cell or at bulk-embedded cells.
//!
//! # Geometry
//!
//! With periodic boundaries the `n_sites` cells form a plain ring. With
//! reflecting boundaries one cell acts as a mirror column: its splitter is
//! pinned to θ = π/2 at every step, which turns pulses around and decouples
//! everything behind it. The mirror is stored at index `n_sites − 1` and
//! plays the role of site −1 of the interior chain `0 ..= n_sites − 2`, so
//! the leftmost interior cell is site 0 and the rightmost interior cell
//! (site `n_sites − 2`) is terminated by the same mirror from the other
//! side.
//!
//! # Phase schedules
//!
//! The bulk modulator adds `+φ` to the α ring on odd steps and `−φ` on even
//! steps (configurable). A schedule `c₁..c₄` attached to a cell `n₀`
//! replaces the bulk value with `cᵢ·φ` for the α-ring amplitudes of that
//! cell's pulses at step `i`. Because one Floquet period moves pulses by an
//! even number of sites, the walk splits into two independent sublattice
//! sectors; the pulses of the cell-`n₀` sector arrive on the α ring at site
//! `n₀` on even steps and at site `n₀ + 1` on odd steps, so the override is
//! applied at those staggered positions (see [`LatticeConfig::schedule_site`]).
//! This keeps the whole schedule acting on the single sector that an
//! injection at `n₀` populates, and leaves the other sector untouched.

use crate::rational::PhaseCoeff;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

pub const STEPS_PER_PERIOD: usize = 4;

/// Boundary of the one-dimensional lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    #[default]
    Reflecting,
}

/// A bulk-embedded cell carrying its own four-step phase schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCell {
    pub site: usize,
    pub coeffs: [PhaseCoeff; 4],
}

/// Validated lattice configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeConfig {
    thetas: [f64; 4],
    n_sites: usize,
    left_boundary: Boundary,
    right_boundary: Boundary,
    bulk_signs: [i8; 4],
    edge_coeffs: Option<[PhaseCoeff; 4]>,
    local_cells: Vec<LocalCell>,
    #[serde(skip)]
    overrides: HashMap<(usize, usize), PhaseCoeff>,
}

/// One violation found while validating a raw configuration.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("theta[{index}] = {value} rad out of range [0, pi/2]")]
    ThetaOutOfRange { index: usize, value: f64 },
    #[error("theta[{index}] is not finite")]
    ThetaNotFinite { index: usize },
    #[error("n_sites = {0} too small; at least 2 cells required")]
    TooFewSites(usize),
    #[error("n_sites = {0} must be even (two-site sublattice period)")]
    OddSites(usize),
    #[error("n_sites = {0} too small for an active edge/local schedule; need >= 8 for light-cone separation")]
    TooSmallForSchedules(usize),
    #[error("edge_coeffs requires a reflecting boundary")]
    EdgeCoeffsWithoutEdge,
    #[error("local cell site {site} outside the interior 0..={max}")]
    LocalCellOutside { site: usize, max: usize },
    #[error("local cell site {site} must be even (sublattice alignment)")]
    LocalCellOddSite { site: usize },
    #[error("local cell at site {site} within {dist} cells of an edge; need >= 4")]
    LocalCellNearEdge { site: usize, dist: usize },
    #[error("local cells at sites {a} and {b} within {dist} cells of each other; need >= 4")]
    LocalCellsTooClose { a: usize, b: usize, dist: usize },
    #[error("bulk phase pattern `{0}` not recognized; use \"+-\" or \"-+\"")]
    BadBulkPattern(String),
}

/// Error returned by configuration parsing/validation.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Raw configuration as written in TOML, prior to validation.
///
/// Angles are given in units of π (`theta = [0.125, 0.25, 0.438, 0.438]`
/// means θ₁ = 0.125π and so on). Coefficients accept integers or exact
/// rational strings such as `"1/2"`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// Splitting angles in units of π, each in [0, 0.5].
    pub theta: [f64; 4],
    pub n_sites: usize,
    #[serde(default)]
    pub left_boundary: Boundary,
    #[serde(default)]
    pub right_boundary: Boundary,
    /// "+-" (default): +φ on odd steps, −φ on even steps. "-+" flips it.
    #[serde(default)]
    pub bulk_phase_pattern: Option<String>,
    #[serde(default)]
    pub edge_coeffs: Option<[PhaseCoeff; 4]>,
    #[serde(default, rename = "local_cell")]
    pub local_cells: Vec<LocalCell>,
}

impl RawConfig {
    /// Validates and converts into a [`LatticeConfig`] (angles to radians).
    pub fn validate(&self) -> Result<LatticeConfig, ConfigError> {
        let mut violations = Vec::new();

        let mut thetas = [0.0f64; 4];
        for (i, &t) in self.theta.iter().enumerate() {
            if !t.is_finite() {
                violations.push(Violation::ThetaNotFinite { index: i });
                continue;
            }
            let rad = t * PI;
            if !(0.0..=FRAC_PI_2 + 1e-12).contains(&rad) {
                violations.push(Violation::ThetaOutOfRange {
                    index: i,
                    value: rad,
                });
            }
            thetas[i] = rad.min(FRAC_PI_2);
        }

        let bulk_signs = match self.bulk_phase_pattern.as_deref() {
            None | Some("+-") => [1i8, -1, 1, -1],
            Some("-+") => [-1, 1, -1, 1],
            Some(other) => {
                violations.push(Violation::BadBulkPattern(other.to_string()));
                [1, -1, 1, -1]
            }
        };

        if self.n_sites < 2 {
            violations.push(Violation::TooFewSites(self.n_sites));
        } else if self.n_sites % 2 != 0 {
            violations.push(Violation::OddSites(self.n_sites));
        }

        let has_mirror =
            self.left_boundary == Boundary::Reflecting || self.right_boundary == Boundary::Reflecting;
        let schedules_active = self.edge_coeffs.is_some() || !self.local_cells.is_empty();
        if schedules_active && self.n_sites < 8 {
            violations.push(Violation::TooSmallForSchedules(self.n_sites));
        }
        if self.edge_coeffs.is_some() && !has_mirror {
            violations.push(Violation::EdgeCoeffsWithoutEdge);
        }

        if self.n_sites >= 2 {
            let interior_last = if has_mirror {
                self.n_sites - 2
            } else {
                self.n_sites - 1
            };
            for cell in &self.local_cells {
                if cell.site > interior_last {
                    violations.push(Violation::LocalCellOutside {
                        site: cell.site,
                        max: interior_last,
                    });
                    continue;
                }
                if cell.site % 2 != 0 {
                    violations.push(Violation::LocalCellOddSite { site: cell.site });
                }
                if has_mirror {
                    let dist = cell.site.min(interior_last - cell.site);
                    if dist < 4 {
                        violations.push(Violation::LocalCellNearEdge {
                            site: cell.site,
                            dist,
                        });
                    }
                }
            }
            for (i, a) in self.local_cells.iter().enumerate() {
                for b in &self.local_cells[i + 1..] {
                    let d = a.site.abs_diff(b.site);
                    let dist = d.min(self.n_sites - d);
                    if dist < 4 {
                        violations.push(Violation::LocalCellsTooClose {
                            a: a.site,
                            b: b.site,
                            dist,
                        });
                    }
                }
            }
        }

        if !violations.is_empty() {
            return Err(ConfigError::Invalid(violations));
        }

        Ok(LatticeConfig::assemble(
            thetas,
            self.n_sites,
            self.left_boundary,
            self.right_boundary,
            bulk_signs,
            self.edge_coeffs,
            self.local_cells.clone(),
        ))
    }
}

impl LatticeConfig {
    fn assemble(
        thetas: [f64; 4],
        n_sites: usize,
        left_boundary: Boundary,
        right_boundary: Boundary,
        bulk_signs: [i8; 4],
        edge_coeffs: Option<[PhaseCoeff; 4]>,
        local_cells: Vec<LocalCell>,
    ) -> Self {
        let mut cfg = LatticeConfig {
            thetas,
            n_sites,
            left_boundary,
            right_boundary,
            bulk_signs,
            edge_coeffs,
            local_cells,
            overrides: HashMap::new(),
        };
        cfg.rebuild_overrides();
        cfg
    }

    fn rebuild_overrides(&mut self) {
        let mut map = HashMap::new();
        let mut insert = |base: usize, coeffs: &[PhaseCoeff; 4], n: usize| {
            for step in 1..=STEPS_PER_PERIOD {
                map.insert((Self::schedule_site(base, step, n), step), coeffs[step - 1]);
            }
        };
        if let Some(coeffs) = &self.edge_coeffs {
            insert(self.edge_cell(), coeffs, self.n_sites);
        }
        for cell in &self.local_cells.clone() {
            insert(cell.site, &cell.coeffs, self.n_sites);
        }
        self.overrides = map;
    }

    /// Parses the TOML configuration format and validates it.
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        raw.validate()
    }

    /// Builds a validated config programmatically. Angles in radians.
    pub fn new(thetas: [f64; 4], n_sites: usize) -> Result<Self, ConfigError> {
        RawConfig {
            theta: thetas.map(|t| t / PI),
            n_sites,
            left_boundary: Boundary::Reflecting,
            right_boundary: Boundary::Reflecting,
            bulk_phase_pattern: None,
            edge_coeffs: None,
            local_cells: Vec::new(),
        }
        .validate()
    }

    /// Same as [`LatticeConfig::new`] with periodic boundaries.
    pub fn periodic(thetas: [f64; 4], n_sites: usize) -> Result<Self, ConfigError> {
        RawConfig {
            theta: thetas.map(|t| t / PI),
            n_sites,
            left_boundary: Boundary::Periodic,
            right_boundary: Boundary::Periodic,
            bulk_phase_pattern: None,
            edge_coeffs: None,
            local_cells: Vec::new(),
        }
        .validate()
    }

    /// Returns a copy with the given edge schedule (validated).
    pub fn with_edge_coeffs(&self, coeffs: [PhaseCoeff; 4]) -> Result<Self, ConfigError> {
        let mut raw = self.to_raw();
        raw.edge_coeffs = Some(coeffs);
        raw.validate()
    }

    /// Returns a copy with integer edge coefficients.
    pub fn with_edge_coeffs_int(&self, c: [i32; 4]) -> Result<Self, ConfigError> {
        self.with_edge_coeffs(c.map(PhaseCoeff::integer))
    }

    /// Returns a copy with an additional local winding cell (validated).
    pub fn with_local_cell(&self, site: usize, c: [i32; 4]) -> Result<Self, ConfigError> {
        let mut raw = self.to_raw();
        raw.local_cells.push(LocalCell {
            site,
            coeffs: c.map(PhaseCoeff::integer),
        });
        raw.validate()
    }

    /// Returns a copy with no edge or local schedules.
    pub fn without_schedules(&self) -> Self {
        let mut raw = self.to_raw();
        raw.edge_coeffs = None;
        raw.local_cells.clear();
        raw.validate().expect("stripping schedules keeps a valid config")
    }

    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            theta: self.thetas.map(|t| t / PI),
            n_sites: self.n_sites,
            left_boundary: self.left_boundary,
            right_boundary: self.right_boundary,
            bulk_phase_pattern: match self.bulk_signs[0] {
                1 => Some("+-".to_string()),
                _ => Some("-+".to_string()),
            },
            edge_coeffs: self.edge_coeffs,
            local_cells: self.local_cells.clone(),
        }
    }

    pub fn thetas(&self) -> [f64; 4] {
        self.thetas
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn left_boundary(&self) -> Boundary {
        self.left_boundary
    }

    pub fn right_boundary(&self) -> Boundary {
        self.right_boundary
    }

    pub fn bulk_signs(&self) -> [i8; 4] {
        self.bulk_signs
    }

    pub fn edge_coeffs(&self) -> Option<[PhaseCoeff; 4]> {
        self.edge_coeffs
    }

    pub fn local_cells(&self) -> &[LocalCell] {
        &self.local_cells
    }

    /// True when the lattice is terminated by a mirror column.
    pub fn has_mirror(&self) -> bool {
        self.left_boundary == Boundary::Reflecting || self.right_boundary == Boundary::Reflecting
    }

    /// Stored index of the mirror column (plays the role of site −1).
    pub fn mirror_site(&self) -> Option<usize> {
        self.has_mirror().then(|| self.n_sites - 1)
    }

    /// Index of the last interior cell.
    pub fn interior_last(&self) -> usize {
        if self.has_mirror() {
            self.n_sites - 2
        } else {
            self.n_sites - 1
        }
    }

    /// The cell carrying the edge schedule (leftmost interior cell).
    pub fn edge_cell(&self) -> usize {
        0
    }

    /// Splitting angle seen by the splitter at `site` during step `m`
    /// (1-based within the Floquet period). Mirror columns are pinned to π/2.
    pub fn theta_at(&self, site: usize, step: usize) -> f64 {
        debug_assert!((1..=STEPS_PER_PERIOD).contains(&step));
        if Some(site) == self.mirror_site() {
            FRAC_PI_2
        } else {
            self.thetas[step - 1]
        }
    }

    /// Bulk modulation sign for a step (1-based).
    pub fn bulk_sign(&self, step: usize) -> f64 {
        f64::from(self.bulk_signs[(step - 1) % STEPS_PER_PERIOD])
    }

    /// Site at which step `step` of a schedule based at `base` applies:
    /// `base + 1` on odd steps, `base` on even steps (mod ring size).
    ///
    /// The stagger follows the pulses of the sublattice sector that occupies
    /// `base` at stroboscopic times; see the module docs.
    pub fn schedule_site(base: usize, step: usize, n_sites: usize) -> usize {
        (base + step % 2) % n_sites
    }

    /// Schedule coefficient in effect for α amplitudes arriving at `site`
    /// on step `step`, if any.
    pub fn override_at(&self, site: usize, step: usize) -> Option<PhaseCoeff> {
        self.overrides.get(&(site, step)).copied()
    }

    /// Phase added to the α-ring amplitude arriving at `site` on step
    /// `step` (1-based), for modulation parameter `phi`.
    pub fn resolve_phase(&self, site: usize, step: usize, phi: f64) -> f64 {
        match self.override_at(site, step) {
            Some(c) => c.to_f64() * phi,
            None => self.bulk_sign(step) * phi,
        }
    }

    /// Smallest period of φ (in units of 2π) over which every schedule
    /// phase factor returns to itself. 1 for integer schedules.
    pub fn phi_period_multiple(&self) -> i64 {
        let mut lcm = 1i64;
        for c in self.overrides.values() {
            let den = *c.ratio().denom();
            lcm = num_integer::lcm(lcm, den);
        }
        lcm
    }
}

impl fmt::Display for LatticeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theta/pi = [{:.4}, {:.4}, {:.4}, {:.4}], n_sites = {}, {:?}/{:?}",
            self.thetas[0] / PI,
            self.thetas[1] / PI,
            self.thetas[2] / PI,
            self.thetas[3] / PI,
            self.n_sites,
            self.left_boundary,
            self.right_boundary,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn fig3_thetas() -> [f64; 4] {
        [0.125 * PI, 0.25 * PI, 0.438 * PI, 0.438 * PI]
    }

    #[test]
    fn accepts_reference_config() {
        let cfg = LatticeConfig::new(fig3_thetas(), 64).unwrap();
        assert_eq!(cfg.n_sites(), 64);
        assert!(cfg.has_mirror());
        assert_eq!(cfg.mirror_site(), Some(63));
        assert_eq!(cfg.interior_last(), 62);
    }

    #[test]
    fn rejects_theta_out_of_range() {
        let err = LatticeConfig::new([0.1, 0.2, 0.6 * PI, 0.3], 64).unwrap_err();
        match err {
            ConfigError::Invalid(v) => {
                assert!(v
                    .iter()
                    .any(|x| matches!(x, Violation::ThetaOutOfRange { index: 2, .. })));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_local_cell_near_edge() {
        let base = LatticeConfig::new(fig3_thetas(), 64).unwrap();
        let err = base.with_local_cell(2, [1, 0, 0, 0]).unwrap_err();
        match err {
            ConfigError::Invalid(v) => assert!(v
                .iter()
                .any(|x| matches!(x, Violation::LocalCellNearEdge { site: 2, .. }))),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_overlapping_local_cells() {
        let base = LatticeConfig::new(fig3_thetas(), 64).unwrap();
        let err = base
            .with_local_cell(20, [1, 0, 0, 0])
            .unwrap()
            .with_local_cell(22, [0, 0, 0, 1])
            .unwrap_err();
        match err {
            ConfigError::Invalid(v) => assert!(v
                .iter()
                .any(|x| matches!(x, Violation::LocalCellsTooClose { .. }))),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parses_toml_schema() {
        let text = r#"
            theta = [0.125, 0.25, 0.438, 0.438]
            n_sites = 64
            left_boundary = "reflecting"
            right_boundary = "reflecting"
            edge_coeffs = [1, 0, -1, 1]

            [[local_cell]]
            site = 22
            coeffs = ["1", "0", "0", "0"]
        "#;
        let cfg = LatticeConfig::parse_str(text).unwrap();
        assert_eq!(cfg.edge_coeffs().unwrap()[2], PhaseCoeff::integer(-1));
        assert_eq!(cfg.local_cells().len(), 1);
        assert_eq!(cfg.local_cells()[0].site, 22);
    }

    #[test]
    fn parse_rejects_unknown_keys() {
        let text = "theta = [0.1, 0.1, 0.1, 0.1]\nn_sites = 16\nbogus = 3\n";
        assert!(matches!(
            LatticeConfig::parse_str(text),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn resolve_phase_bulk_alternation() {
        let cfg = LatticeConfig::periodic(fig3_thetas(), 16).unwrap();
        let phi = FRAC_PI_2;
        assert_eq!(cfg.resolve_phase(5, 1, phi), phi);
        assert_eq!(cfg.resolve_phase(5, 2, phi), -phi);
        assert_eq!(cfg.resolve_phase(5, 3, phi), phi);
        assert_eq!(cfg.resolve_phase(5, 4, phi), -phi);
    }

    #[test]
    fn resolve_phase_edge_schedule() {
        let cfg = LatticeConfig::new(fig3_thetas(), 64)
            .unwrap()
            .with_edge_coeffs_int([1, 0, -1, 1])
            .unwrap();
        let phi = FRAC_PI_2;
        let n = cfg.n_sites();
        // step 3 is odd, so it applies at edge_cell + 1
        let site3 = LatticeConfig::schedule_site(cfg.edge_cell(), 3, n);
        assert_eq!(site3, 1);
        assert_eq!(cfg.resolve_phase(site3, 3, phi), -phi);
        let site2 = LatticeConfig::schedule_site(cfg.edge_cell(), 2, n);
        assert_eq!(site2, 0);
        assert_eq!(cfg.resolve_phase(site2, 2, phi), 0.0);
        // a bulk site keeps the alternating pattern
        assert_eq!(cfg.resolve_phase(30, 3, phi), phi);
    }

    #[test]
    fn phi_period_multiple_of_rational_schedule() {
        let cfg = LatticeConfig::new(fig3_thetas(), 64).unwrap();
        assert_eq!(cfg.phi_period_multiple(), 1);
        let half = PhaseCoeff::new(1, 2).unwrap();
        let cfg = cfg
            .with_edge_coeffs([half, half, PhaseCoeff::zero(), PhaseCoeff::zero()])
            .unwrap();
        assert_eq!(cfg.phi_period_multiple(), 2);
    }
}
