//! Time-domain emulation: pulse injection, spatiotemporal records and
//! stroboscopic Fourier band tomography.
//!
//! A record stores both ring amplitudes at every step. Sampling it at
//! stroboscopic times (after each full Floquet period) and Fourier
//! transforming over the site index and the period index yields an
//! intensity map I(k, E) whose peaks lie on the quasienergy bands; the
//! complex Fourier amplitudes at a peak estimate the Bloch eigenvector.
//! Sweeping φ on a strip instead gives the I(E; φ) band diagrams whose
//! in-gap ridges are the edge states.

use crate::bloch::{BandGrid, GapCenter};
use crate::config::{Boundary, LatticeConfig, STEPS_PER_PERIOD};
use crate::topology::Band;
use crate::walk::{step_evolve, FieldState, Ring, WalkError};
use crate::{wrap_angle, C64};
use ndarray::Array2;
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Zero-padding factor applied to the period axis before the energy
/// transform.
pub const ZERO_PAD: usize = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("need at least {min} periods, got {got}")]
    TooFewPeriods { got: usize, min: usize },
    #[error("record was not taken with periodic boundaries; k-space tomography undefined")]
    NotPeriodic,
    #[error("band peak too weak for a reliable eigenvector (intensity share {share:.2e}); inject into the other ring or increase periods")]
    LowSnr { share: f64 },
}

/// Complex amplitudes of both rings at every step of an evolution.
#[derive(Clone, Debug)]
pub struct SpatioTemporalRecord {
    /// Shape (4·periods + 1, n_sites); row m is the state after m steps.
    pub alpha: Array2<C64>,
    pub beta: Array2<C64>,
    pub phi: f64,
    pub periods: usize,
    pub periodic: bool,
}

/// Unit pulse in one ring at one site.
pub fn inject(config: &LatticeConfig, site: usize, ring: Ring) -> Result<FieldState, WalkError> {
    if site > config.interior_last() {
        return Err(WalkError::SiteOutOfRange {
            site,
            n_sites: config.n_sites(),
            max: config.interior_last(),
        });
    }
    let mut state = FieldState::zero(config.n_sites());
    match ring {
        Ring::Alpha => state.alpha[site] = C64::new(1.0, 0.0),
        Ring::Beta => state.beta[site] = C64::new(1.0, 0.0),
    }
    Ok(state)
}

/// Evolves a state for `periods` Floquet periods, recording every step.
pub fn evolve_record(
    state: &FieldState,
    config: &LatticeConfig,
    phi: f64,
    periods: usize,
) -> Result<SpatioTemporalRecord, DynamicsError> {
    if periods < 1 {
        return Err(DynamicsError::TooFewPeriods {
            got: periods,
            min: 1,
        });
    }
    let n = config.n_sites();
    let steps = STEPS_PER_PERIOD * periods;
    let mut alpha = Array2::zeros((steps + 1, n));
    let mut beta = Array2::zeros((steps + 1, n));
    let mut cur = state.clone();
    for m in 0..=steps {
        for j in 0..n {
            alpha[[m, j]] = cur.alpha[j];
            beta[[m, j]] = cur.beta[j];
        }
        if m < steps {
            cur = step_evolve(&cur, config, phi)?;
        }
    }
    Ok(SpatioTemporalRecord {
        alpha,
        beta,
        phi,
        periods,
        periodic: config.left_boundary() == Boundary::Periodic
            && config.right_boundary() == Boundary::Periodic,
    })
}

impl SpatioTemporalRecord {
    pub fn n_sites(&self) -> usize {
        self.alpha.ncols()
    }

    /// Stroboscopic rows (end-of-period sampling): m = 0, 4, 8, …
    fn stroboscopic(&self, ring: Ring) -> Array2<C64> {
        let src = match ring {
            Ring::Alpha => &self.alpha,
            Ring::Beta => &self.beta,
        };
        let n = self.n_sites();
        let mut out = Array2::zeros((self.periods, n));
        for m in 0..self.periods {
            for j in 0..n {
                out[[m, j]] = src[[STEPS_PER_PERIOD * m, j]];
            }
        }
        out
    }
}

/// Fourier bins of a ring of `n` sites, ascending in (−π, π].
pub fn momentum_bins(n: usize) -> Vec<f64> {
    let mut ks: Vec<f64> = (0..n).map(|j| wrap_angle(2.0 * PI * j as f64 / n as f64)).collect();
    ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ks
}

fn energy_bins(pad: usize) -> Vec<(usize, f64)> {
    let mut es: Vec<(usize, f64)> = (0..pad)
        .map(|p| (p, wrap_angle(2.0 * PI * p as f64 / pad as f64)))
        .collect();
    es.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    es
}

/// Complex tomography amplitudes over (k bin, E bin) for one ring:
/// `Σ_{n,M} x_n^M e^{−ikn} e^{+iEM}` with the period axis zero padded.
fn tomography_amplitudes(strob: &Array2<C64>, pad: usize) -> Array2<C64> {
    let (periods, n) = strob.dim();
    let mut planner = FftPlanner::new();
    let fft_site = planner.plan_fft_forward(n);
    let fft_energy = planner.plan_fft_inverse(pad);
    // forward over the site axis, row by row
    let mut rows = strob.clone();
    for mut row in rows.rows_mut() {
        let mut buf: Vec<C64> = row.to_vec();
        fft_site.process(&mut buf);
        for (dst, src) in row.iter_mut().zip(buf) {
            *dst = src;
        }
    }
    // inverse (e^{+iEM}) over the period axis, column by column, zero padded
    let mut out = Array2::zeros((pad, n));
    for j in 0..n {
        let mut buf = vec![C64::new(0.0, 0.0); pad];
        for m in 0..periods {
            buf[m] = rows[[m, j]];
        }
        fft_energy.process(&mut buf);
        for p in 0..pad {
            out[[p, j]] = buf[p];
        }
    }
    out
}

/// Intensity map over (axis, E).
#[derive(Clone, Debug)]
pub struct TomographyMap {
    /// First axis: momentum k for bulk maps, modulation φ for scans.
    pub axis: Vec<f64>,
    pub energies: Vec<f64>,
    /// Shape (axis.len(), energies.len()).
    pub intensity: Array2<f64>,
    pub periods: usize,
    pub zero_pad: usize,
    /// Set when a bulk map was produced from a non-periodic lattice.
    pub boundary_warning: bool,
}

impl TomographyMap {
    /// Energy resolution (bin width) of the map.
    pub fn energy_resolution(&self) -> f64 {
        2.0 * PI / (self.zero_pad * self.periods) as f64
    }
}

/// Bulk band tomography I(k, E) from a single-site injection record.
pub fn band_tomography_bulk(
    config: &LatticeConfig,
    phi: f64,
    periods: usize,
) -> Result<TomographyMap, DynamicsError> {
    if periods < 64 {
        return Err(DynamicsError::TooFewPeriods {
            got: periods,
            min: 64,
        });
    }
    let state = inject(config, 0, Ring::Alpha)?;
    let record = evolve_record(&state, config, phi, periods)?;
    Ok(bulk_map_from_record(&record))
}

/// Bulk tomography of an existing record.
pub fn bulk_map_from_record(record: &SpatioTemporalRecord) -> TomographyMap {
    let n = record.n_sites();
    let pad = ZERO_PAD * record.periods;
    let fa = tomography_amplitudes(&record.stroboscopic(Ring::Alpha), pad);
    let fb = tomography_amplitudes(&record.stroboscopic(Ring::Beta), pad);
    let ks = momentum_bins(n);
    let ebins = energy_bins(pad);
    let mut intensity = Array2::zeros((n, pad));
    // map sorted axes back to raw FFT bins
    let kperm: Vec<usize> = {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| {
            let ka = wrap_angle(2.0 * PI * a as f64 / n as f64);
            let kb = wrap_angle(2.0 * PI * b as f64 / n as f64);
            ka.partial_cmp(&kb).unwrap()
        });
        idx
    };
    for (row, &jraw) in kperm.iter().enumerate() {
        for (col, &(praw, _)) in ebins.iter().enumerate() {
            intensity[[row, col]] =
                fa[[praw, jraw]].norm_sqr() + fb[[praw, jraw]].norm_sqr();
        }
    }
    TomographyMap {
        axis: ks,
        energies: ebins.iter().map(|&(_, e)| e).collect(),
        intensity,
        periods: record.periods,
        zero_pad: ZERO_PAD,
        boundary_warning: !record.periodic,
    }
}

/// φ-scan band diagram I(E; φ): per φ, the α-ring stroboscopic record is
/// Fourier transformed over the period index site by site and the squared
/// magnitudes are summed over sites.
pub fn band_tomography_phi_scan(
    config: &LatticeConfig,
    site: usize,
    ring: Ring,
    nphi: usize,
    periods: usize,
) -> Result<TomographyMap, DynamicsError> {
    if periods < 8 {
        return Err(DynamicsError::TooFewPeriods {
            got: periods,
            min: 8,
        });
    }
    let pad = ZERO_PAD * periods;
    let phis: Vec<f64> = (0..nphi)
        .map(|j| -PI + (j as f64 + 0.5) * 2.0 * PI / nphi as f64)
        .collect();
    let ebins = energy_bins(pad);
    let rows: Result<Vec<Vec<f64>>, DynamicsError> = phis
        .par_iter()
        .map(|&phi| {
            let state = inject(config, site, ring)?;
            let record = evolve_record(&state, config, phi, periods)?;
            let strob = record.stroboscopic(Ring::Alpha);
            let n = strob.ncols();
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_inverse(pad);
            let mut acc = vec![0.0f64; pad];
            for j in 0..n {
                let mut buf = vec![C64::new(0.0, 0.0); pad];
                for m in 0..record.periods {
                    buf[m] = strob[[m, j]];
                }
                fft.process(&mut buf);
                for p in 0..pad {
                    acc[p] += buf[p].norm_sqr();
                }
            }
            Ok(ebins.iter().map(|&(p, _)| acc[p]).collect())
        })
        .collect();
    let rows = rows?;
    let mut intensity = Array2::zeros((nphi, pad));
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row.into_iter().enumerate() {
            intensity[[r, c]] = v;
        }
    }
    Ok(TomographyMap {
        axis: phis,
        energies: ebins.iter().map(|&(_, e)| e).collect(),
        intensity,
        periods,
        zero_pad: ZERO_PAD,
        boundary_warning: false,
    })
}

/// Eigenvector estimate from the Fourier amplitudes at a band peak.
#[derive(Clone, Copy, Debug)]
pub struct TomographicEigenvector {
    /// Normalized (α, β) components, up to a global phase.
    pub vector: [C64; 2],
    /// Peak quasienergy.
    pub energy: f64,
    /// Fraction of the column intensity in the peak neighbourhood.
    pub share: f64,
    pub low_snr: bool,
}

/// Share threshold below which a tomographic eigenvector is flagged.
pub const LOW_SNR_SHARE: f64 = 0.05;

struct ColumnSpectrum {
    fa: Vec<C64>,
    fb: Vec<C64>,
    intensity: Vec<f64>,
    pad: usize,
}

fn column_spectrum(record: &SpatioTemporalRecord, kbin: usize) -> ColumnSpectrum {
    let n = record.n_sites();
    let pad = ZERO_PAD * record.periods;
    let sa = record.stroboscopic(Ring::Alpha);
    let sb = record.stroboscopic(Ring::Beta);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(pad);
    let mut fa = vec![C64::new(0.0, 0.0); pad];
    let mut fb = vec![C64::new(0.0, 0.0); pad];
    for m in 0..record.periods {
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for j in 0..n {
            let ph = C64::from_polar(1.0, -2.0 * PI * (kbin * j % n) as f64 / n as f64);
            a += sa[[m, j]] * ph;
            b += sb[[m, j]] * ph;
        }
        fa[m] = a;
        fb[m] = b;
    }
    fft.process(&mut fa);
    fft.process(&mut fb);
    let intensity: Vec<f64> = fa
        .iter()
        .zip(&fb)
        .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
        .collect();
    ColumnSpectrum {
        fa,
        fb,
        intensity,
        pad,
    }
}

fn peak_near(col: &ColumnSpectrum, exclude: Option<usize>) -> usize {
    let pad = col.pad;
    let excl_width = pad / 8; // half a quadrant of the energy circle
    let mut best = usize::MAX;
    let mut best_val = -1.0;
    for p in 0..pad {
        if let Some(x) = exclude {
            let d = p.abs_diff(x);
            if d.min(pad - d) <= excl_width {
                continue;
            }
        }
        if col.intensity[p] > best_val {
            best_val = col.intensity[p];
            best = p;
        }
    }
    best
}

fn peak_share(col: &ColumnSpectrum, p: usize) -> f64 {
    let pad = col.pad;
    let total: f64 = col.intensity.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut near = 0.0;
    for d in 0..=ZERO_PAD {
        near += col.intensity[(p + d) % pad];
        if d > 0 {
            near += col.intensity[(p + pad - d) % pad];
        }
    }
    near / total
}

/// Estimates the Bloch eigenvector of one band at momentum `k` from a
/// periodic-boundary record: the (α, β) Fourier amplitudes at the band's
/// intensity peak, normalized.
pub fn eigenvector_tomography(
    record: &SpatioTemporalRecord,
    k: f64,
    band: Band,
) -> Result<TomographicEigenvector, DynamicsError> {
    if !record.periodic {
        return Err(DynamicsError::NotPeriodic);
    }
    let n = record.n_sites();
    let kbin =
        ((wrap_angle(k) / (2.0 * PI) * n as f64).round() as i64).rem_euclid(n as i64) as usize;
    let col = column_spectrum(record, kbin);
    let p1 = peak_near(&col, None);
    let p2 = peak_near(&col, Some(p1));
    let e1 = wrap_angle(2.0 * PI * p1 as f64 / col.pad as f64);
    let e2 = wrap_angle(2.0 * PI * p2 as f64 / col.pad as f64);
    // assign by quasienergy ordering, matching BandGrid's (E₋, E₊)
    let (plo, phi_) = if e1 <= e2 { (p1, p2) } else { (p2, p1) };
    let p = match band {
        Band::Lower => plo,
        Band::Upper => phi_,
    };
    let share = peak_share(&col, p);
    let raw = [col.fa[p], col.fb[p]];
    let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
    if norm == 0.0 || share < LOW_SNR_SHARE {
        return Err(DynamicsError::LowSnr { share });
    }
    Ok(TomographicEigenvector {
        vector: [raw[0] / norm, raw[1] / norm],
        energy: wrap_angle(2.0 * PI * p as f64 / col.pad as f64),
        share,
        low_snr: share < LOW_SNR_SHARE,
    })
}

/// Eigenvector estimate from whichever of two records (typically α- and
/// β-ring injections) resolves the band peak better.
pub fn eigenvector_tomography_dual(
    rec_a: &SpatioTemporalRecord,
    rec_b: &SpatioTemporalRecord,
    k: f64,
    band: Band,
) -> Result<TomographicEigenvector, DynamicsError> {
    let va = eigenvector_tomography(rec_a, k, band);
    let vb = eigenvector_tomography(rec_b, k, band);
    match (va, vb) {
        (Ok(a), Ok(b)) => Ok(if a.share >= b.share { a } else { b }),
        (Ok(a), Err(_)) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Band grid reconstructed purely from stroboscopic tomography.
///
/// For each φ, two records are taken (α and β injection at site 0) and the
/// eigenvector estimate with the stronger peak is kept, so bands that are
/// dark to one injection ring are still covered. The result plugs directly
/// into Berry-curvature and Chern-number computations.
pub fn tomographic_band_grid(
    config: &LatticeConfig,
    nphi: usize,
    periods: usize,
) -> Result<BandGrid, DynamicsError> {
    let n = config.n_sites();
    let phis: Vec<f64> = (0..nphi)
        .map(|j| -PI + 2.0 * PI * (j + 1) as f64 / nphi as f64)
        .collect();
    let ks = momentum_bins(n);
    let per_phi: Result<Vec<_>, DynamicsError> = phis
        .par_iter()
        .map(|&phi| {
            let mut columns = Vec::with_capacity(n);
            let rec_a = evolve_record(&inject(config, 0, Ring::Alpha)?, config, phi, periods)?;
            let rec_b = evolve_record(&inject(config, 0, Ring::Beta)?, config, phi, periods)?;
            for &k in &ks {
                let mut per_band = Vec::with_capacity(2);
                for band in [Band::Lower, Band::Upper] {
                    per_band.push(eigenvector_tomography_dual(&rec_a, &rec_b, k, band)?);
                }
                columns.push(per_band);
            }
            Ok(columns)
        })
        .collect();
    let per_phi = per_phi?;

    let mut grid = BandGrid {
        ks: ks.clone(),
        phis,
        e_lower: Array2::zeros((n, nphi)),
        e_upper: Array2::zeros((n, nphi)),
        v_lower: Array2::from_elem((n, nphi), [C64::new(0.0, 0.0); 2]),
        v_upper: Array2::from_elem((n, nphi), [C64::new(0.0, 0.0); 2]),
        degenerate_points: 0,
    };
    for (jp, columns) in per_phi.iter().enumerate() {
        for (ik, per_band) in columns.iter().enumerate() {
            grid.e_lower[[ik, jp]] = per_band[0].energy;
            grid.e_upper[[ik, jp]] = per_band[1].energy;
            grid.v_lower[[ik, jp]] = per_band[0].vector;
            grid.v_upper[[ik, jp]] = per_band[1].vector;
        }
    }
    Ok(grid)
}

/// Highest-intensity energy in a window around `center` for a map column.
pub fn peak_energy_near(
    map: &TomographyMap,
    axis_index: usize,
    center: f64,
    half_width: f64,
) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (col, &e) in map.energies.iter().enumerate() {
        if wrap_angle(e - center).abs() > half_width {
            continue;
        }
        let v = map.intensity[[axis_index, col]];
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((e, v));
        }
    }
    best
}

/// In-gap intensity fraction of a φ-scan map at a gap center.
pub fn in_gap_fraction(map: &TomographyMap, gap: GapCenter, half_width: f64) -> f64 {
    let c = gap.center();
    let mut inside = 0.0;
    let mut total = 0.0;
    for row in 0..map.axis.len() {
        for (col, &e) in map.energies.iter().enumerate() {
            let v = map.intensity[[row, col]];
            total += v;
            if wrap_angle(e - c).abs() < half_width {
                inside += v;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        inside / total
    }
}
