//! Cross-module oracle checks that go beyond the per-module unit tests:
//! dense Gibbs reductions against the fast paths at larger registers, and
//! the numeric steady state against the closed forms over a parameter
//! grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermoqfi::dynamics::{build_channels, liouvillian, steady_state, SpectralResponse};
use thermoqfi::metrology::{qfi_at, qfi_thermal_tls};
use thermoqfi::model::{build_hamiltonian, dressed_frame, dressed_hamiltonian, ThermometerParams};
use thermoqfi::qcore::{gibbs_state, partial_trace_op, trace_distance, trace_distance_op};
use thermoqfi::steady::{dressed_product_state, global_gibbs_probe, global_gibbs_probe_identical};
use thermoqfi::Result;

#[test]
fn global_probe_matches_dense_reduction_on_random_registers() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..12 {
        let n = rng.gen_range(1..=6usize);
        let omega_p: f64 = rng.gen_range(0.3..1.5);
        let omega_k: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.9)).collect();
        let g_k: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let temp = 10f64.powf(rng.gen_range(-2.0..0.8));
        let p = ThermometerParams::new(omega_p, omega_k, g_k).unwrap();
        let fast = global_gibbs_probe(&p, temp).unwrap().to_operator();
        let h = build_hamiltonian(&p);
        let rho = gibbs_state(&h, temp).unwrap();
        let dims = vec![2usize; n + 1];
        let dense = partial_trace_op(rho.operator(), &dims, &[n]).unwrap();
        let dev = (&fast - &dense).max_abs();
        assert!(dev < 1e-10, "trial {trial}: deviation {dev:e}");
    }
}

#[test]
fn identical_register_fast_path_matches_dense_at_largest_desk_scale() {
    // eleven-qubit dense reduction against the magnetization-block sum
    let n = 10usize;
    let (omega, g, omega_p, temp) = (0.03, 0.01, 1.0, 0.0075);
    let p = ThermometerParams::new(omega_p, vec![omega; n], vec![g; n]).unwrap();
    let h = build_hamiltonian(&p);
    let rho = gibbs_state(&h, temp).unwrap();
    let dims = vec![2usize; n + 1];
    let dense = partial_trace_op(rho.operator(), &dims, &[n]).unwrap();
    let fast = global_gibbs_probe_identical(n, omega, g, omega_p, temp)
        .unwrap()
        .to_operator();
    let td = trace_distance_op(&dense, &fast).unwrap();
    assert!(td < 1e-10, "trace distance {td:e}");
}

#[test]
fn numeric_steady_state_tracks_closed_forms_over_a_grid() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = if trial % 2 == 0 { 1 } else { 2 };
        let omega_k: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..0.5)).collect();
        let g_k: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.1..0.1)).collect();
        let temp = 10f64.powf(rng.gen_range(-1.7..0.3));
        let p = ThermometerParams::new(1.0, omega_k, g_k)?;
        let frame = dressed_frame(&p)?;
        let h = dressed_hamiltonian(&p);
        for response in [
            SpectralResponse::flat(1e-3),
            SpectralResponse::ohmic(1e-3, 10.0),
        ] {
            let channels = build_channels(&p, &frame, temp, &response)?;
            let numeric = steady_state(&liouvillian(&h, &channels))?;
            let analytic = dressed_product_state(&p, &frame, temp)?;
            worst = worst.max(trace_distance(&numeric, &analytic)?);
        }
    }
    assert!(worst < 1e-7, "worst trace distance {worst:e}");
    Ok(())
}

#[test]
fn global_pair_lower_peak_sits_near_a_quarter_of_the_ancilla_gap() -> Result<()> {
    use thermoqfi::metrology::{sweep, temperature_grid, GridKind};
    let p = ThermometerParams::new(1.0, vec![0.02], vec![0.02])?;
    let family = move |t: f64| Ok(global_gibbs_probe(&p, t)?.to_operator());
    let temps = temperature_grid(1e-3, 1.0, 300, GridKind::Log)?;
    let curve = sweep(&family, &temps)?;
    let lower = curve.peaks.first().expect("a lower peak exists");
    assert!(
        (lower.temperature / (0.02 / 4.0) - 1.0).abs() < 0.10,
        "lower peak at {} vs omega_1/4 = {}",
        lower.temperature,
        0.02 / 4.0
    );
    Ok(())
}

#[test]
fn ancilla_assisted_bound_beats_the_thermal_probe_deep_in_the_cold() -> Result<()> {
    // at temperatures far below the probe gap the thermal bound diverges
    // while the mediated probe still resolves the sample
    let p = ThermometerParams::new(1.0, vec![0.04], vec![0.1])?;
    let family = move |t: f64| Ok(thermoqfi::steady::probe_state_n1(&p, t)?.to_operator());
    let temp = 0.02;
    let point = qfi_at(&family, temp)?;
    let tls_bound = 1.0 / (temp * qfi_thermal_tls(1.0f64, temp).sqrt());
    assert!(point.rel_error.is_finite());
    assert!(tls_bound / point.rel_error > 1e6);
    Ok(())
}
