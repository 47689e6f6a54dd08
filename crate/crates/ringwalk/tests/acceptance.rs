//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers once its assertions hold.
//!
//! Run with `cargo test -p ringwalk --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringwalk::bloch::{
    band_grid, bloch_floquet_operator, bloch_step_operator, min_gap, quasienergies, GapCenter,
};
use ringwalk::dynamics::{eigenvector_tomography_dual, evolve_record, inject, tomographic_band_grid};
use ringwalk::strip::{
    check_against_walk, edge_unitary_loop, extract_edge_unitary, slot_site, spectral_flow,
    strip_floquet_operator, strip_spectrum_vs_phi,
};
use ringwalk::topology::{
    berry_curvature, chern_below_gap, chern_number, predicted_edge_count, unitary_winding,
    winding_from_coeffs, Band,
};
use ringwalk::walk::{floquet_evolve, step_evolve, FieldState};
use ringwalk::{tol, wrap_angle, C64, LatticeConfig, PhaseCoeff, Ring};
use std::f64::consts::PI;
use std::time::Instant;

const FIG3_THETAS: [f64; 4] = [0.125 * PI, 0.25 * PI, 0.438 * PI, 0.438 * PI];
const FIG4_THETAS: [f64; 4] = [0.125 * PI, 0.25 * PI, 0.5 * PI, 0.25 * PI];

fn chern(thetas: [f64; 4], band: Band, grid: usize) -> ringwalk::topology::ChernNumber {
    let cfg = LatticeConfig::periodic(thetas, 2).unwrap();
    let g = band_grid(&cfg, grid, grid).unwrap();
    chern_number(&berry_curvature(&g, band).unwrap()).unwrap()
}

#[test]
fn criterion_1_chern_anchors() {
    let t0 = Instant::now();
    let c3u = chern(FIG3_THETAS, Band::Upper, 48);
    let c4u = chern(FIG4_THETAS, Band::Upper, 48);
    let c4l = chern(FIG4_THETAS, Band::Lower, 48);
    let elapsed = t0.elapsed().as_secs_f64();
    assert_eq!(c3u.value, 0);
    assert_eq!(c4u.value, -2);
    assert_eq!(c4l.value, 2);
    for c in [&c3u, &c4u, &c4l] {
        assert!(c.residue < 1e-3, "residue {}", c.residue);
    }
    assert!(
        elapsed < 30.0,
        "three Chern points took {elapsed:.2}s, budget 10s each"
    );
    println!(
        "criterion 1 (Chern anchors): PASS — C_up(0.438,0.438)={}, C_up(0.5,0.25)={}, C_low(0.5,0.25)={}, max residue {:.2e}, {:.2}s total",
        c3u.value,
        c4u.value,
        c4l.value,
        c3u.residue.max(c4u.residue).max(c4l.residue),
        elapsed
    );
}

#[test]
fn criterion_2_edge_winding() {
    let bulk = LatticeConfig::new(FIG3_THETAS, 24).unwrap();
    let cases: [([i32; 4], i64); 4] = [
        ([1, 0, -1, 1], -1),
        ([1, 0, 1, 0], -2),
        ([-1, 0, -1, 0], 2),
        ([0, 0, 0, 0], 0),
    ];
    let mut lines = Vec::new();
    for (coeffs, expect) in cases {
        let edge = bulk.with_edge_coeffs_int(coeffs).unwrap();
        let loop_samples = edge_unitary_loop(&edge, &bulk, tol::WINDING_SAMPLES).unwrap();
        let measured = unitary_winding(&loop_samples).unwrap();
        let closed_form = winding_from_coeffs(&coeffs.map(PhaseCoeff::integer)).unwrap();
        assert_eq!(measured.winding, expect, "schedule {coeffs:?}");
        assert_eq!(measured.winding, closed_form, "schedule {coeffs:?}");
        lines.push(format!("{coeffs:?}→{}", measured.winding));
    }
    println!(
        "criterion 2 (edge winding): PASS — {} (det-phase over {} samples = −Σc exactly)",
        lines.join(", "),
        tol::WINDING_SAMPLES
    );
}

struct FlowCase {
    name: &'static str,
    thetas: [f64; 4],
    edge: Option<[i32; 4]>,
    nu: i64,
    expect: [i64; 2], // left-edge net flow at (E=0, E=π)
}

#[test]
fn criterion_3_counting_rule() {
    // Chern integers from criterion 1 (band below the gap within one zone)
    let c_lower_fig3 = 0i64;
    let c_upper_fig3 = 0i64;
    let c_lower_fig4 = 2i64;
    let c_upper_fig4 = -2i64;

    let cases = [
        FlowCase { name: "fig3a", thetas: FIG3_THETAS, edge: None, nu: 0, expect: [0, 0] },
        FlowCase { name: "fig3b", thetas: FIG3_THETAS, edge: Some([1, 0, -1, 1]), nu: -1, expect: [-1, -1] },
        FlowCase { name: "fig3c", thetas: FIG3_THETAS, edge: Some([1, 0, 1, 0]), nu: -2, expect: [-2, -2] },
        FlowCase { name: "fig4a", thetas: FIG4_THETAS, edge: None, nu: 0, expect: [2, 0] },
        FlowCase { name: "fig4b", thetas: FIG4_THETAS, edge: Some([1, 0, 1, 0]), nu: -2, expect: [0, -2] },
        FlowCase { name: "fig4c", thetas: FIG4_THETAS, edge: Some([-1, 0, -1, 0]), nu: 2, expect: [4, 2] },
    ];
    // magnitudes pinned by the observed band diagrams
    let magnitudes = [[0, 0], [1, 1], [2, 2], [2, 0], [0, 2], [4, 2]];

    let mut lines = Vec::new();
    for (case, mags) in cases.iter().zip(magnitudes) {
        let t0 = Instant::now();
        let (c_lower, c_upper) = if case.thetas == FIG3_THETAS {
            (c_lower_fig3, c_upper_fig3)
        } else {
            (c_lower_fig4, c_upper_fig4)
        };
        let mut cfg = LatticeConfig::new(case.thetas, 64).unwrap();
        if let Some(coeffs) = case.edge {
            cfg = cfg.with_edge_coeffs_int(coeffs).unwrap();
        }
        let spectrum = strip_spectrum_vs_phi(&cfg, 128).unwrap();
        for (gi, gap) in [GapCenter::Zero, GapCenter::Pi].into_iter().enumerate() {
            let flow = spectral_flow(&spectrum, gap).unwrap();
            let predicted =
                predicted_edge_count(chern_below_gap(c_lower, c_upper, gap), case.nu);
            assert_eq!(
                flow.net_flow_left, case.expect[gi],
                "{} at {gap:?}", case.name
            );
            assert_eq!(
                flow.net_flow_left, predicted,
                "{} at {gap:?}: flow vs N = C + ν", case.name
            );
            assert_eq!(
                flow.net_flow_left.unsigned_abs() as i64, mags[gi],
                "{} magnitude at {gap:?}", case.name
            );
            assert_eq!(flow.unclassified, 0, "{} at {gap:?}", case.name);
        }
        let dt = t0.elapsed().as_secs_f64();
        assert!(dt < 120.0, "{} took {dt:.1}s, budget 120s", case.name);
        lines.push(format!("{} ({:.1}s)", case.name, dt));
    }
    println!(
        "criterion 3 (N = C + ν_Edge at N=64, nφ=128): PASS — {}",
        lines.join(", ")
    );
}

#[test]
fn criterion_4_no_gap_closing_manipulation() {
    for thetas in [FIG3_THETAS, FIG4_THETAS] {
        let base = LatticeConfig::new(thetas, 64).unwrap();
        let gaps = |cfg: &LatticeConfig| {
            let g = band_grid(cfg, 64, 64).unwrap();
            (min_gap(&g, GapCenter::Zero), min_gap(&g, GapCenter::Pi))
        };
        let reference = gaps(&base);
        for coeffs in [[1, 0, -1, 1], [1, 0, 1, 0], [-1, 0, -1, 0]] {
            let modified = base.with_edge_coeffs_int(coeffs).unwrap();
            let got = gaps(&modified);
            assert!(
                (got.0 - reference.0).abs() < 1e-12 && (got.1 - reference.1).abs() < 1e-12,
                "bulk gaps moved under edge schedule {coeffs:?}"
            );
        }
    }
    println!(
        "criterion 4 (no gap closing): PASS — bulk gaps identical to 1e-12 across all edge schedules while edge counts change (criterion 3)"
    );
}

#[test]
fn criterion_5_bulk_winding_cell() {
    let mut lines = Vec::new();
    for (name, thetas) in [("fig3 bulk", FIG3_THETAS), ("fig4 bulk", FIG4_THETAS)] {
        let cfg = LatticeConfig::new(thetas, 64)
            .unwrap()
            .with_local_cell(22, [1, 0, 0, 0])
            .unwrap();
        let spectrum = strip_spectrum_vs_phi(&cfg, 128).unwrap();
        for gap in [GapCenter::Zero, GapCenter::Pi] {
            let flow = spectral_flow(&spectrum, gap).unwrap();
            let cell_flow = flow.net_flow_cells[0].1;
            assert_eq!(cell_flow, -1, "{name} at {gap:?}");
            // exactly one cell-localized branch: the net count is one
            // crossing and no unclassified events accompany it
            assert_eq!(flow.unclassified, 0, "{name} at {gap:?}");
        }
        lines.push(name);
    }
    println!(
        "criterion 5 (bulk winding cell n_b=22, c=(1,0,0,0)): PASS — one cell-localized branch per gap in {}",
        lines.join(" and ")
    );
}

#[test]
fn criterion_6_tomography_consistency() {
    // (a) peak energies and (b) eigenvector fidelity at Fig. 3 parameters
    let n = 16usize;
    let periods = 128usize;
    let cfg = LatticeConfig::periodic(FIG3_THETAS, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20260809);
    let tol_e = 2.0 * PI / periods as f64;
    let mut max_err = 0.0f64;
    let mut min_fid = 1.0f64;
    for _ in 0..20 {
        let kbin = rng.gen_range(0..n);
        let k = wrap_angle(2.0 * PI * kbin as f64 / n as f64);
        let phi = rng.gen_range(-PI..PI);
        let rec_a =
            evolve_record(&inject(&cfg, 0, Ring::Alpha).unwrap(), &cfg, phi, periods).unwrap();
        let rec_b =
            evolve_record(&inject(&cfg, 0, Ring::Beta).unwrap(), &cfg, phi, periods).unwrap();
        let exact = quasienergies(&bloch_floquet_operator(&cfg, k, phi).matrix);
        for (bi, band) in [Band::Lower, Band::Upper].into_iter().enumerate() {
            let est = eigenvector_tomography_dual(&rec_a, &rec_b, k, band).unwrap();
            let err = wrap_angle(est.energy - exact.energies[bi]).abs();
            max_err = max_err.max(err);
            assert!(err < tol_e, "peak error {err} at k={k}, phi={phi}");
            let u = exact.vectors[bi];
            let fid = (u[0].conj() * est.vector[0] + u[1].conj() * est.vector[1]).norm();
            min_fid = min_fid.min(fid);
            assert!(fid >= 0.99, "fidelity {fid} at k={k}, phi={phi}");
        }
    }
    // (c) Chern numbers from tomographic eigenvectors
    let mut chern_line = Vec::new();
    for (name, thetas, expect_upper) in
        [("fig3", FIG3_THETAS, 0i64), ("fig4", FIG4_THETAS, -2i64)]
    {
        let ring = LatticeConfig::periodic(thetas, 48).unwrap();
        let grid = tomographic_band_grid(&ring, 48, 96).unwrap();
        let cu = chern_number(&berry_curvature(&grid, Band::Upper).unwrap()).unwrap();
        let cl = chern_number(&berry_curvature(&grid, Band::Lower).unwrap()).unwrap();
        assert_eq!(cu.value, expect_upper, "{name} upper from tomography");
        assert_eq!(cl.value, -expect_upper, "{name} lower from tomography");
        chern_line.push(format!("{name}: C_up={}", cu.value));
    }
    println!(
        "criterion 6 (tomography): PASS — max peak error {:.4} < {:.4}, min fidelity {:.4}, {}",
        max_err,
        tol_e,
        min_fid,
        chern_line.join(", ")
    );
}

#[test]
fn criterion_7_unitarity_conservation() {
    // norm drift over 100 periods
    let cfg = LatticeConfig::new(FIG3_THETAS, 64)
        .unwrap()
        .with_edge_coeffs_int([1, 0, -1, 1])
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = FieldState::zero(64);
    for j in 0..63 {
        state.alpha[j] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        state.beta[j] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n0 = state.norm_sq();
    let out = floquet_evolve(&state, &cfg, 0.9, 100).unwrap();
    let drift = ((out.norm_sq() - n0) / n0).abs();
    assert!(drift < 1e-10, "norm drift {drift}");

    // det U_F = 1 at 100 random (k, φ)
    let bulk = LatticeConfig::periodic(FIG3_THETAS, 2).unwrap();
    let mut max_det_err = 0.0f64;
    for _ in 0..100 {
        let k = rng.gen_range(-PI..PI);
        let phi = rng.gen_range(-PI..PI);
        let u = bloch_floquet_operator(&bulk, k, phi);
        max_det_err = max_det_err.max((u.matrix.det() - C64::new(1.0, 0.0)).norm());
        assert!(u.matrix.unitarity_error() < 1e-12);
    }
    assert!(max_det_err < 1e-12, "det error {max_det_err}");

    // Berry plaquette gauge invariance
    let grid = band_grid(&bulk, 24, 24).unwrap();
    let base = berry_curvature(&grid, Band::Upper).unwrap();
    let mut regauged = grid.clone();
    for v in regauged.v_upper.iter_mut() {
        let ph = C64::from_polar(1.0, rng.gen_range(-PI..PI));
        v[0] *= ph;
        v[1] *= ph;
    }
    let alt = berry_curvature(&regauged, Band::Upper).unwrap();
    let mut max_gauge_dev = 0.0f64;
    for (a, b) in base.flux.iter().zip(alt.flux.iter()) {
        max_gauge_dev = max_gauge_dev.max((a - b).abs());
    }
    assert!(max_gauge_dev < 1e-12, "gauge deviation {max_gauge_dev}");

    // C_lower + C_upper = 0 for random gapped angle sets
    let mut tested = 0;
    let mut tries = 0;
    while tested < 10 && tries < 200 {
        tries += 1;
        let thetas = [(); 4].map(|_| rng.gen_range(0.0..PI / 2.0));
        let cfg = LatticeConfig::periodic(thetas, 2).unwrap();
        let g = band_grid(&cfg, 48, 48).unwrap();
        if min_gap(&g, GapCenter::Zero) < 0.08 || min_gap(&g, GapCenter::Pi) < 0.08 {
            continue;
        }
        let cu = chern_number(&berry_curvature(&g, Band::Upper).unwrap()).unwrap();
        let cl = chern_number(&berry_curvature(&g, Band::Lower).unwrap()).unwrap();
        assert_eq!(cu.value + cl.value, 0, "thetas {thetas:?}");
        tested += 1;
    }
    assert_eq!(tested, 10, "found only {tested} gapped random sets");
    println!(
        "criterion 7 (unitarity/conservation): PASS — drift {:.2e}, max |det−1| {:.2e}, gauge dev {:.2e}, C_low+C_up=0 on {} random gapped sets",
        drift, max_det_err, max_gauge_dev, tested
    );
}

#[test]
fn criterion_8_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    // Bloch step operator vs real-space plane-wave evolution
    let n = 24usize;
    let mut max_bloch_dev = 0.0f64;
    for _ in 0..20 {
        let theta = rng.gen_range(0.0..PI / 2.0);
        let kbin = rng.gen_range(0..n);
        let k = 2.0 * PI * kbin as f64 / n as f64;
        let phase = rng.gen_range(-PI..PI);
        let u = bloch_step_operator(theta, phase, k);
        let cfg = LatticeConfig::periodic([theta; 4], n).unwrap();
        let v = [
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ];
        let mut state = FieldState::zero(n);
        for j in 0..n {
            let bloch = C64::from_polar(1.0, k * j as f64);
            state.alpha[j] = v[0] * bloch;
            state.beta[j] = v[1] * bloch;
        }
        let stepped = step_evolve(&state, &cfg, phase).unwrap();
        let direct = u.apply(v);
        max_bloch_dev = max_bloch_dev
            .max((direct[0] - stepped.alpha[0]).norm())
            .max((direct[1] - stepped.beta[0]).norm());
    }
    assert!(max_bloch_dev < 1e-12, "bloch dev {max_bloch_dev}");

    // strip operator columns vs step evolution
    let cfg = LatticeConfig::new(FIG3_THETAS, 32)
        .unwrap()
        .with_edge_coeffs_int([1, 0, 1, 0])
        .unwrap()
        .with_local_cell(14, [1, 0, 0, 0])
        .unwrap();
    let op = strip_floquet_operator(&cfg, 1.1);
    let strip_dev = check_against_walk(&op, &cfg);
    assert!(strip_dev < 1e-12, "strip dev {strip_dev}");

    // edge-unitary support exactly zero beyond the light cone
    let bulk = LatticeConfig::new(FIG3_THETAS, 32).unwrap();
    let edge = bulk.with_edge_coeffs_int([1, 0, -1, 1]).unwrap();
    let u = extract_edge_unitary(&edge, &bulk, 0.777).unwrap();
    let mut support_exact = true;
    for r in 0..64 {
        for c in 0..64 {
            let far = [r, c].iter().any(|&slot| {
                let site = slot_site(slot, 32);
                // distance from the modified edge cells {0, 1}, mirror aware
                let d0 = if site == 31 { 1 } else { site };
                let d1 = if site == 31 { 2 } else { site.abs_diff(1) };
                d0.min(d1) > tol::LIGHT_CONE_CELLS
            });
            if far {
                let want = if r == c {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                if u[[r, c]] != want {
                    support_exact = false;
                }
            }
        }
    }
    assert!(support_exact, "edge unitary leaks outside the light cone");
    println!(
        "criterion 8 (oracle equivalence): PASS — bloch vs walk {:.2e}, strip vs walk {:.2e}, U_Edge support exact",
        max_bloch_dev, strip_dev
    );
}

/// Extra guard: the tomography map of a strip shows in-gap ridges exactly
/// when the schedule creates them (ties criteria 3 and 6 together).
#[test]
fn phi_scan_ridges_follow_edge_schedules() {
    use ringwalk::dynamics::{band_tomography_phi_scan, in_gap_fraction};
    let base = LatticeConfig::new(FIG3_THETAS, 32).unwrap();
    let plain = band_tomography_phi_scan(&base, 0, Ring::Alpha, 24, 64).unwrap();
    let edge = base.with_edge_coeffs_int([1, 0, -1, 1]).unwrap();
    let with_edge = band_tomography_phi_scan(&edge, 0, Ring::Alpha, 24, 64).unwrap();
    for gap in [GapCenter::Zero, GapCenter::Pi] {
        let f_plain = in_gap_fraction(&plain, gap, 0.25);
        let f_edge = in_gap_fraction(&with_edge, gap, 0.25);
        assert!(
            f_edge > 5.0 * f_plain.max(1e-6),
            "{gap:?}: edge schedule should light up the gap ({f_plain} vs {f_edge})"
        );
    }
}
