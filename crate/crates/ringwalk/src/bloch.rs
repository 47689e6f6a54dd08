//! Momentum-space Floquet operator, quasienergy bands and gaps.
//!
//! Under the plane-wave convention α_n ∝ e^{ikn}, one step with angle θ and
//! α-ring phase φ_m acts as the 2×2 unitary
//!
//! ```text
//! U(k) = [ cos θ e^{−ik} e^{iφ_m}   i sin θ e^{−ik} e^{iφ_m} ]
//!        [ i sin θ e^{+ik}          cos θ e^{+ik}            ]
//! ```
//!
//! and the Floquet operator is U_F = U₄U₃U₂U₁ with the bulk ±φ pattern.
//! Eigenvalues are written e^{−iE} with quasienergy E ∈ (−π, π]; for the
//! alternating bulk pattern det U_F = 1, so the two quasienergies come in
//! ±E pairs and gaps can open at E = 0 and E = π.
//!
//! Because one Floquet period is four single-site shifts, U_F(k+π) = U_F(k):
//! the spectrum is π-periodic in the site momentum and the torus fundamental
//! domain for topology is k ∈ (−π/2, π/2] (see [`crate::topology`]).

use crate::config::LatticeConfig;
use crate::{tol, wrap_angle, C64};
use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Dense 2×2 complex matrix with just the operations needed here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        let o = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        Mat2([[o, z], [z, o]])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        Mat2(out)
    }

    pub fn dagger(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Max-norm deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.dagger().mul(self);
        let mut err: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let want = if r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                err = err.max((g.0[r][c] - want).norm());
            }
        }
        err
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn to_array(&self) -> Array2<C64> {
        Array2::from_shape_fn((2, 2), |(r, c)| self.0[r][c])
    }
}

/// 2×2 Bloch operator tagged with its momenta.
#[derive(Clone, Copy, Debug)]
pub struct BlochOperator {
    pub matrix: Mat2,
    pub k: f64,
    pub phi: f64,
}

/// One step in momentum space.
pub fn bloch_step_operator(theta: f64, phase: f64, k: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    let i = C64::new(0.0, 1.0);
    let em = C64::from_polar(1.0, -k);
    let ep = C64::from_polar(1.0, k);
    let ph = C64::from_polar(1.0, phase);
    Mat2([[c * em * ph, i * s * em * ph], [i * s * ep, c * ep]])
}

/// Floquet operator U_F(k, φ) = U₄U₃U₂U₁ with the bulk phase pattern.
pub fn bloch_floquet_operator(config: &LatticeConfig, k: f64, phi: f64) -> BlochOperator {
    let thetas = config.thetas();
    let mut u = Mat2::identity();
    for step in 1..=4usize {
        let phase = config.bulk_sign(step) * phi;
        u = bloch_step_operator(thetas[step - 1], phase, k).mul(&u);
    }
    BlochOperator { matrix: u, k, phi }
}

/// Quasienergies and eigenvectors of a 2×2 unitary.
#[derive(Clone, Copy, Debug)]
pub struct EigenPair {
    /// Sorted quasienergies (E₋ ≤ E₊), each in (−π, π].
    pub energies: [f64; 2],
    /// Normalized eigenvectors as columns, `vectors[b]` belongs to
    /// `energies[b]`.
    pub vectors: [[C64; 2]; 2],
    /// True when |E₊ − E₋| (on the circle) is below the degeneracy
    /// tolerance.
    pub degenerate: bool,
}

fn eigenvector_for(u: &Mat2, lambda: C64) -> [C64; 2] {
    let a = u.0[0][0];
    let b = u.0[0][1];
    let c = u.0[1][0];
    let d = u.0[1][1];
    // rows of (U − λI) give null-space candidates
    let cand1 = [b, lambda - a];
    let cand2 = [lambda - d, c];
    let n1 = cand1[0].norm_sqr() + cand1[1].norm_sqr();
    let n2 = cand2[0].norm_sqr() + cand2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (cand1, n1) } else { (cand2, n2) };
    if n < 1e-28 {
        // U is (numerically) λI; any basis works
        return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    }
    let inv = 1.0 / n.sqrt();
    canonical_gauge([v[0] * inv, v[1] * inv])
}

/// Fixes the global phase so the largest component is real positive.
fn canonical_gauge(v: [C64; 2]) -> [C64; 2] {
    let pick = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
    if pick.norm() < 1e-14 {
        return v;
    }
    let ph = C64::from_polar(1.0, -pick.arg());
    [v[0] * ph, v[1] * ph]
}

/// Diagonalizes a 2×2 unitary in closed form. Eigenvalues are written
/// e^{−iE}; returns (E₋ ≤ E₊) with matching eigenvectors and a degeneracy
/// flag instead of failing near band touchings.
pub fn quasienergies(u: &Mat2) -> EigenPair {
    let t = u.trace();
    let det = u.det();
    let disc = (t * t - det * 4.0).sqrt();
    let l1 = (t + disc) * 0.5;
    let l2 = (t - disc) * 0.5;
    let e1 = wrap_angle(-l1.arg());
    let e2 = wrap_angle(-l2.arg());
    let ((e_lo, l_lo), (e_hi, l_hi)) = if e1 <= e2 {
        ((e1, l1), (e2, l2))
    } else {
        ((e2, l2), (e1, l1))
    };
    let split = (e_hi - e_lo).min(2.0 * PI - (e_hi - e_lo));
    let degenerate = split < tol::DEGENERACY;
    let v_lo = eigenvector_for(u, l_lo);
    let mut v_hi = eigenvector_for(u, l_hi);
    if degenerate {
        // pick an orthonormal partner deterministically
        v_hi = canonical_gauge([-v_lo[1].conj(), v_lo[0].conj()]);
    }
    EigenPair {
        energies: [e_lo, e_hi],
        vectors: [v_lo, v_hi],
        degenerate,
    }
}

/// Quasienergy sheets and eigenvectors over a uniform (k, φ) grid.
///
/// Grid points are k_i = −π + 2π(i+1)/nk and φ_j = −π + 2π(j+1)/nφ, both
/// covering (−π, π].
#[derive(Clone, Debug)]
pub struct BandGrid {
    pub ks: Vec<f64>,
    pub phis: Vec<f64>,
    /// Lower sheet E₋(k, φ), shape (nk, nφ).
    pub e_lower: Array2<f64>,
    /// Upper sheet E₊(k, φ).
    pub e_upper: Array2<f64>,
    /// Eigenvectors per sheet, shape (nk, nφ).
    pub v_lower: Array2<[C64; 2]>,
    pub v_upper: Array2<[C64; 2]>,
    /// Number of grid points flagged degenerate.
    pub degenerate_points: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BlochError {
    #[error("grid resolution {0} too small; need at least {min}", min = tol::MIN_GRID)]
    GridTooSmall(usize),
    #[error("grid resolution {0} must be even")]
    GridOdd(usize),
}

/// Which gap of the two-band quasienergy spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GapCenter {
    Zero,
    Pi,
}

impl GapCenter {
    pub fn center(self) -> f64 {
        match self {
            GapCenter::Zero => 0.0,
            GapCenter::Pi => PI,
        }
    }
}

/// Dense sampling of the two quasienergy sheets over (−π, π]².
pub fn band_grid(config: &LatticeConfig, nk: usize, nphi: usize) -> Result<BandGrid, BlochError> {
    for &n in &[nk, nphi] {
        if n < tol::MIN_GRID {
            return Err(BlochError::GridTooSmall(n));
        }
        if n % 2 != 0 {
            return Err(BlochError::GridOdd(n));
        }
    }
    let ks: Vec<f64> = (0..nk).map(|i| -PI + 2.0 * PI * (i + 1) as f64 / nk as f64).collect();
    let phis: Vec<f64> = (0..nphi)
        .map(|j| -PI + 2.0 * PI * (j + 1) as f64 / nphi as f64)
        .collect();
    let pairs: Vec<EigenPair> = (0..nk * nphi)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nphi, idx % nphi);
            quasienergies(&bloch_floquet_operator(config, ks[i], phis[j]).matrix)
        })
        .collect();
    let mut grid = BandGrid {
        ks,
        phis,
        e_lower: Array2::zeros((nk, nphi)),
        e_upper: Array2::zeros((nk, nphi)),
        v_lower: Array2::from_elem((nk, nphi), [C64::new(0.0, 0.0); 2]),
        v_upper: Array2::from_elem((nk, nphi), [C64::new(0.0, 0.0); 2]),
        degenerate_points: 0,
    };
    for (idx, p) in pairs.into_iter().enumerate() {
        let (i, j) = (idx / nphi, idx % nphi);
        grid.e_lower[[i, j]] = p.energies[0];
        grid.e_upper[[i, j]] = p.energies[1];
        grid.v_lower[[i, j]] = p.vectors[0];
        grid.v_upper[[i, j]] = p.vectors[1];
        if p.degenerate {
            grid.degenerate_points += 1;
        }
    }
    Ok(grid)
}

/// Width of the spectral gap around a gap center: twice the minimal
/// circle distance of any band energy from the center.
pub fn min_gap(grid: &BandGrid, gap: GapCenter) -> f64 {
    let c = gap.center();
    let mut dmin = f64::INFINITY;
    for e in grid.e_lower.iter().chain(grid.e_upper.iter()) {
        let d = wrap_angle(e - c).abs();
        dmin = dmin.min(d);
    }
    2.0 * dmin
}
