//! Topological invariants: Berry curvature, Chern numbers, windings of
//! unitary loops, the bulk phase diagram and the edge-state counting rule.
//!
//! Berry curvature uses the plaquette link method: the flux through each
//! grid plaquette is the negative argument of the product of the four
//! normalized eigenvector overlaps around it. This is gauge invariant
//! plaquette by plaquette and sums to 2π × (integer) on closed surfaces.
//!
//! Because U_F(k+π, φ) = U_F(k, φ) (the Floquet period consists of four
//! single-site shifts), a grid spanning k ∈ (−π, π] covers the physical
//! Brillouin zone twice. Chern numbers are therefore summed over the
//! fundamental half k ∈ (−π/2, π/2]; the full-grid total is exactly twice
//! that and both are exposed.
//!
//! Windings of unitary loops U(φ) are evaluated as
//! ν = −(1/2π) Δ arg det U(φ), the det-phase form of the trace integral
//! ν = (1/2π)∫dφ Tr[U⁻¹ i ∂_φ U]. For a schedule with coefficients c₁..c₄
//! this evaluates to exactly −Σᵢ cᵢ.

use crate::bloch::{band_grid, min_gap, BandGrid, GapCenter};
use crate::config::LatticeConfig;
use crate::rational::PhaseCoeff;
use crate::{tol, C64};
use ndarray::Array2;
use ndarray_linalg::Determinant;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Band selector for the two-band model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Lower,
    Upper,
}

/// Berry flux per plaquette of a band grid.
#[derive(Clone, Debug)]
pub struct BerryGrid {
    /// Plaquette flux in (−π, π], shape (nk, nφ); plaquette (i, j) has
    /// corners (i, j), (i+1, j), (i+1, j+1), (i, j+1) with cyclic wrap.
    pub flux: Array2<f64>,
    pub band: Band,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("band grid contains {0} degenerate points; Berry curvature undefined across a band touching")]
    DegenerateGrid(usize),
    #[error("total Berry flux / 2π = {raw} is not near an integer (residue {residue:.3e}); band touching or insufficient grid")]
    NonIntegerChern { raw: f64, residue: f64 },
    #[error("winding loop is not closed: ‖U(0) − U(2π)‖ = {0:.3e}")]
    LoopNotClosed(f64),
    #[error("winding loop needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error("det phase step {0:.3} rad between adjacent samples exceeds π/2; sample the loop more densely")]
    Undersampled(f64),
    #[error("winding raw value {raw} too far from an integer (residue {residue:.3e})")]
    NonIntegerWinding { raw: f64, residue: f64 },
    #[error("loop sample {index} is not unitary: |det| = {absdet}")]
    NonUnitarySample { index: usize, absdet: f64 },
    #[error("schedule sum Σcᵢ = {0} is not an integer; the schedule does not close over one φ period")]
    NonIntegerSum(String),
    #[error("phase-diagram resolution {0} too small; need at least 8")]
    ResolutionTooSmall(usize),
}

/// Plaquette-link Berry curvature of one band.
pub fn berry_curvature(grid: &BandGrid, band: Band) -> Result<BerryGrid, TopologyError> {
    if grid.degenerate_points > 0 {
        return Err(TopologyError::DegenerateGrid(grid.degenerate_points));
    }
    let v = match band {
        Band::Lower => &grid.v_lower,
        Band::Upper => &grid.v_upper,
    };
    let (nk, nphi) = v.dim();
    let dot = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let mut flux = Array2::zeros((nk, nphi));
    for i in 0..nk {
        for j in 0..nphi {
            let ip = (i + 1) % nk;
            let jp = (j + 1) % nphi;
            let l1 = dot(&v[[i, j]], &v[[ip, j]]);
            let l2 = dot(&v[[ip, j]], &v[[ip, jp]]);
            let l3 = dot(&v[[ip, jp]], &v[[i, jp]]);
            let l4 = dot(&v[[i, jp]], &v[[i, j]]);
            flux[[i, j]] = -(l1 * l2 * l3 * l4).arg();
        }
    }
    Ok(BerryGrid { flux, band })
}

/// Chern number of a band, with rounding diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChernNumber {
    /// Integer Chern number over the physical Brillouin zone.
    pub value: i64,
    /// Pre-rounding flux sum / 2π over the fundamental domain.
    pub raw: f64,
    /// |raw − value|.
    pub residue: f64,
    /// Flux sum / 2π over the whole (−π, π]² grid (twice the physical BZ).
    pub full_torus: f64,
}

/// Rounds the fundamental-domain Berry flux to the Chern number.
pub fn chern_number(berry: &BerryGrid) -> Result<ChernNumber, TopologyError> {
    let (nk, _) = berry.flux.dim();
    let full: f64 = berry.flux.sum() / (2.0 * PI);
    // plaquettes with base column in the first k half cover the physical BZ
    let half: f64 = berry
        .flux
        .rows()
        .into_iter()
        .take(nk / 2)
        .map(|row| row.sum())
        .sum::<f64>()
        / (2.0 * PI);
    let value = half.round() as i64;
    let residue = (half - value as f64).abs();
    if residue >= tol::CHERN_RESIDUE {
        return Err(TopologyError::NonIntegerChern {
            raw: half,
            residue,
        });
    }
    Ok(ChernNumber {
        value,
        raw: half,
        residue,
        full_torus: full,
    })
}

/// Winding of a loop of unitaries, from det-phase unwrapping.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WindingResult {
    pub winding: i64,
    /// Pre-rounding value of the trace integral / 2π.
    pub raw: f64,
    pub samples: usize,
}

/// Evaluates ν = (1/2π)∫dφ Tr[U⁻¹ i ∂_φ U] for a sampled loop.
///
/// `samples` must cover φ ∈ [0, 2π] inclusive (first and last entries equal
/// within tolerance). Equal to −(winding of det U around the unit circle).
pub fn unitary_winding(samples: &[Array2<C64>]) -> Result<WindingResult, TopologyError> {
    if samples.len() < 3 {
        return Err(TopologyError::TooFewSamples(samples.len()));
    }
    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    let closure = first
        .iter()
        .zip(last.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    if closure > tol::LOOP_CLOSURE {
        return Err(TopologyError::LoopNotClosed(closure));
    }
    let mut args = Vec::with_capacity(samples.len());
    for (index, u) in samples.iter().enumerate() {
        let det = u.det().expect("square matrix");
        let absdet = det.norm();
        if (absdet - 1.0).abs() > 1e-6 {
            return Err(TopologyError::NonUnitarySample { index, absdet });
        }
        args.push(det.arg());
    }
    let mut total = 0.0;
    for w in args.windows(2) {
        let step = crate::wrap_angle(w[1] - w[0]);
        if step.abs() > tol::UNWRAP_MAX_STEP {
            return Err(TopologyError::Undersampled(step.abs()));
        }
        total += step;
    }
    let raw = -total / (2.0 * PI);
    let winding = raw.round() as i64;
    let residue = (raw - winding as f64).abs();
    if residue > tol::WINDING_RESIDUE {
        return Err(TopologyError::NonIntegerWinding { raw, residue });
    }
    Ok(WindingResult {
        winding,
        raw,
        samples: samples.len(),
    })
}

/// Exact winding −Σᵢ cᵢ of a four-step schedule.
pub fn winding_from_coeffs(coeffs: &[PhaseCoeff; 4]) -> Result<i64, TopologyError> {
    match PhaseCoeff::integer_sum(coeffs) {
        Some(total) => Ok(-total),
        None => {
            let sum: num_rational::Ratio<i64> = coeffs.iter().map(|c| c.ratio()).sum();
            Err(TopologyError::NonIntegerSum(format!(
                "{}/{}",
                sum.numer(),
                sum.denom()
            )))
        }
    }
}

/// Edge-state counting rule: net chiral edge states at a gap.
pub fn predicted_edge_count(chern_below_gap: i64, nu_edge: i64) -> i64 {
    chern_below_gap + nu_edge
}

/// Total Chern number of the bands below a gap center within one
/// quasienergy zone (−π, π]: the lower band for the E = 0 gap, both bands
/// for the E = π gap.
pub fn chern_below_gap(c_lower: i64, c_upper: i64, gap: GapCenter) -> i64 {
    match gap {
        GapCenter::Zero => c_lower,
        GapCenter::Pi => c_lower + c_upper,
    }
}

/// One cell of the bulk phase diagram.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhaseCell {
    pub theta3: f64,
    pub theta4: f64,
    pub gap_zero: f64,
    pub gap_pi: f64,
    /// Upper-band Chern number where both gaps exceed the closure
    /// tolerance; `None` marks a (near-)closed cell.
    pub chern_upper: Option<i64>,
    pub closed_zero: bool,
    pub closed_pi: bool,
}

/// Phase diagram over (θ₃, θ₄) ∈ [0, π/2]² at fixed (θ₁, θ₂).
#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagram {
    pub theta1: f64,
    pub theta2: f64,
    pub resolution: usize,
    pub nk: usize,
    pub gap_tolerance: f64,
    pub cells: Vec<PhaseCell>,
}

/// Scans the (θ₃, θ₄) plane; each cell is sampled at its center with an
/// `nk × nk` band grid.
pub fn phase_diagram(
    theta1: f64,
    theta2: f64,
    resolution: usize,
    nk: usize,
    gap_tolerance: f64,
) -> Result<PhaseDiagram, TopologyError> {
    if resolution < 8 {
        return Err(TopologyError::ResolutionTooSmall(resolution));
    }
    let cells: Vec<PhaseCell> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / resolution, idx % resolution);
            let theta3 = (i as f64 + 0.5) / resolution as f64 * PI / 2.0;
            let theta4 = (j as f64 + 0.5) / resolution as f64 * PI / 2.0;
            let config = LatticeConfig::periodic([theta1, theta2, theta3, theta4], 2)
                .expect("angles in range by construction");
            let grid = band_grid(&config, nk, nk).expect("resolution checked");
            let gap_zero = min_gap(&grid, GapCenter::Zero);
            let gap_pi = min_gap(&grid, GapCenter::Pi);
            let closed_zero = gap_zero < gap_tolerance;
            let closed_pi = gap_pi < gap_tolerance;
            let chern_upper = if closed_zero || closed_pi {
                None
            } else {
                berry_curvature(&grid, Band::Upper)
                    .ok()
                    .and_then(|b| chern_number(&b).ok())
                    .map(|c| c.value)
            };
            PhaseCell {
                theta3,
                theta4,
                gap_zero,
                gap_pi,
                chern_upper,
                closed_zero,
                closed_pi,
            }
        })
        .collect();
    Ok(PhaseDiagram {
        theta1,
        theta2,
        resolution,
        nk,
        gap_tolerance,
        cells,
    })
}
