//! Real-space step evolution of the two-ring walk.
//!
//! One step with splitting angle θ and α-ring phases φ(n) maps
//!
//! ```text
//! α_n' = (cos θ · α_{n−1} + i sin θ · β_{n−1}) · e^{i φ(n)}
//! β_n' = i sin θ · α_{n+1} + cos θ · β_{n+1}
//! ```
//!
//! Equivalently, the splitter at each site mixes the two ring amplitudes,
//! sends the α output one site to the right (picking up the modulator phase
//! of the destination site) and the β output one site to the left. Mirror
//! columns have θ pinned to π/2, so nothing is transmitted past them.

use crate::config::{LatticeConfig, STEPS_PER_PERIOD};
use crate::C64;

/// Which ring an amplitude lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ring {
    Alpha,
    Beta,
}

/// Complex field amplitudes over the lattice at one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    pub step_index: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WalkError {
    #[error("state has {state} sites but config has {config}")]
    DimensionMismatch { state: usize, config: usize },
    #[error("site {site} out of range for {n_sites} sites (interior 0..={max})")]
    SiteOutOfRange {
        site: usize,
        n_sites: usize,
        max: usize,
    },
}

impl FieldState {
    pub fn zero(n_sites: usize) -> Self {
        FieldState {
            alpha: vec![C64::new(0.0, 0.0); n_sites],
            beta: vec![C64::new(0.0, 0.0); n_sites],
            step_index: 0,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.alpha.len()
    }

    /// Total norm Σ_n (|α_n|² + |β_n|²).
    pub fn norm_sq(&self) -> f64 {
        self.alpha
            .iter()
            .chain(self.beta.iter())
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Site density |α_n|² + |β_n|².
    pub fn density(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// Flattened vector (α₀..α_{N−1}, β₀..β_{N−1}).
    pub fn to_vec(&self) -> Vec<C64> {
        let mut v = self.alpha.clone();
        v.extend_from_slice(&self.beta);
        v
    }

    pub fn from_vec(v: &[C64], step_index: usize) -> Self {
        let n = v.len() / 2;
        FieldState {
            alpha: v[..n].to_vec(),
            beta: v[n..].to_vec(),
            step_index,
        }
    }
}

/// Applies one step of the walk. The step number within the Floquet period
/// is `state.step_index mod 4` (so the first step applied to a fresh state
/// uses θ₁ and the step-1 phase).
pub fn step_evolve(
    state: &FieldState,
    config: &LatticeConfig,
    phi: f64,
) -> Result<FieldState, WalkError> {
    let n = config.n_sites();
    if state.n_sites() != n {
        return Err(WalkError::DimensionMismatch {
            state: state.n_sites(),
            config: n,
        });
    }
    let step = state.step_index % STEPS_PER_PERIOD + 1;
    let mut alpha = vec![C64::new(0.0, 0.0); n];
    let mut beta = vec![C64::new(0.0, 0.0); n];
    let i = C64::new(0.0, 1.0);
    for j in 0..n {
        let a = state.alpha[j];
        let b = state.beta[j];
        if a == C64::new(0.0, 0.0) && b == C64::new(0.0, 0.0) {
            continue;
        }
        let theta = config.theta_at(j, step);
        let (s, c) = theta.sin_cos();
        let dest_a = (j + 1) % n;
        let dest_b = (j + n - 1) % n;
        let phase = C64::from_polar(1.0, config.resolve_phase(dest_a, step, phi));
        alpha[dest_a] += (c * a + i * s * b) * phase;
        beta[dest_b] += i * s * a + c * b;
    }
    Ok(FieldState {
        alpha,
        beta,
        step_index: state.step_index + 1,
    })
}

/// Applies `periods` full Floquet periods (4 steps each).
pub fn floquet_evolve(
    state: &FieldState,
    config: &LatticeConfig,
    phi: f64,
    periods: usize,
) -> Result<FieldState, WalkError> {
    let mut cur = state.clone();
    for _ in 0..STEPS_PER_PERIOD * periods {
        cur = step_evolve(&cur, config, phi)?;
    }
    Ok(cur)
}
