//! Simulation of discrete-step Floquet walks on a two-ring synthetic
//! photonic lattice.
//!
//! Light pulses in two coupled fiber rings realize a one-dimensional lattice
//! of splitting events with a four-step Floquet sequence of splitting angles
//! θ₁..θ₄ and a phase-modulator parameter φ that acts as a synthetic
//! quasimomentum. This crate provides:
//!
//! - the real-space step evolution and Floquet evolution ([`walk`]),
//! - the momentum-space Floquet operator, quasienergy bands and gaps
//!   ([`bloch`]),
//! - Berry curvature, Chern numbers, windings of unitary loops and the
//!   bulk phase diagram ([`topology`]),
//! - finite-lattice (strip) operators, edge-unitary extraction, spectra
//!   versus φ and spectral-flow edge-state counting ([`strip`]),
//! - time-domain pulse records and stroboscopic Fourier band tomography
//!   ([`dynamics`]).
//!
//! Configurations are described by [`config::LatticeConfig`], parsed from a
//! small TOML schema (see `LatticeConfig::parse_str`).

pub mod bloch;
pub mod config;
pub mod dynamics;
pub mod rational;
pub mod strip;
pub mod tol;
pub mod topology;
pub mod walk;

pub use config::{Boundary, LatticeConfig, LocalCell};
pub use rational::PhaseCoeff;
pub use walk::{FieldState, Ring};

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;

/// Maps an angle to the principal branch (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::wrap_angle;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_principal_branch() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert_eq!(wrap_angle(3.0 * PI), PI);
        assert!((wrap_angle(2.5 * PI) - 0.5 * PI).abs() < 1e-15);
        assert!((wrap_angle(-2.5 * PI) + 0.5 * PI).abs() < 1e-15);
        for &x in &[1e-9, -1e-9, 3.1, -3.1, 6.2, -6.2] {
            let w = wrap_angle(x);
            assert!(w > -PI && w <= PI, "wrap({x}) = {w} out of branch");
            assert!(((w - x) / std::f64::consts::TAU).fract().abs() < 1e-12);
        }
    }
}
