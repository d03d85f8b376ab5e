//! Oracle-equivalence suites and documented-discrepancy comparisons.
//!
//! The suites cross-check every closed form against an independent route:
//! Liouvillian null spaces against dressed thermal products, reduced probe
//! closed forms against transform-and-trace, the determinant form of the
//! qubit QFI against the spectral sum, and the null results of the
//! symmetric and antisymmetric pair couplings. The comparisons quantify
//! the closed-form variants that disagree with their numerical oracles;
//! they are reported with measured deviations instead of being silently
//! repaired.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::dynamics::{
    build_channels_with_hooks, liouvillian, steady_state, ChannelHooks, SpectralResponse,
};
use crate::error::Result;
use crate::metrology::{
    d_rho_dt, gamma_constant, gamma_transcendental_variant, qfi_approx_global, qfi_approx_n1,
    qfi_approx_n1_weighted, qfi_qubit, qfi_sld, qfi_thermal_tls, sweep, temperature_grid, GridKind,
};
use crate::model::{
    self, build_hamiltonian, dressed_frame, dressed_hamiltonian, omega_branch_sum_n2,
    DmModelParams, ThermometerParams,
};
use crate::qcore::linalg::hermitian_eigen;
use crate::qcore::{gibbs_state, partial_trace_op, trace_distance, Operator};
use crate::scalar::{fl, Scalar};
use crate::steady::{
    dd_probe_state, dd_transform_pipeline_probe, dm_probe_state, dressed_product_state,
    global_gibbs_probe, probe_from_transform, probe_state_n1, probe_state_n2,
};

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Debug hook: flip the detailed-balance exponent sign so the
    /// steady-state suite must fail.
    pub hooks: ChannelHooks,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            hooks: ChannelHooks::default(),
            seed: 0xC0FFEE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub max_deviation: f64,
    pub threshold: f64,
    pub details: Vec<String>,
}

/// A closed-form variant measured against its numerical oracle.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub name: String,
    pub variant_value: f64,
    pub oracle_value: f64,
    pub relative_deviation: f64,
    pub oracle_satisfied: bool,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub suites: Vec<SuiteResult>,
    pub comparisons: Vec<Comparison>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "passed": self.passed,
            "suites": self.suites.iter().map(|s| json!({
                "name": s.name,
                "passed": s.passed,
                "max_deviation": s.max_deviation,
                "threshold": s.threshold,
                "details": s.details,
            })).collect::<Vec<_>>(),
            "comparisons": self.comparisons.iter().map(|c| json!({
                "name": c.name,
                "variant_value": c.variant_value,
                "oracle_value": c.oracle_value,
                "relative_deviation": c.relative_deviation,
                "oracle_satisfied": c.oracle_satisfied,
                "note": c.note,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("validation report\n=================\n");
        for s in &self.suites {
            out.push_str(&format!(
                "[{}] {} (max deviation {:.3e}, threshold {:.1e})\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.max_deviation,
                s.threshold
            ));
            for d in &s.details {
                out.push_str(&format!("    {d}\n"));
            }
        }
        out.push_str("documented discrepancies\n------------------------\n");
        for c in &self.comparisons {
            out.push_str(&format!(
                "[{}] {}: variant {:.6e} vs oracle {:.6e} (relative deviation {:.3e})\n    {}\n",
                if c.oracle_satisfied {
                    "ORACLE-OK"
                } else {
                    "ORACLE-FAIL"
                },
                c.name,
                c.variant_value,
                c.oracle_value,
                c.relative_deviation,
                c.note
            ));
        }
        out.push_str(&format!(
            "overall: {}\n",
            if self.passed { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Steady-state oracle equivalence over randomized one- and two-ancilla
/// points: Liouvillian null vector vs dressed thermal product (trace
/// distance), plus reduced-probe closed forms vs transform-and-trace.
pub fn suite_steady_state_oracle<T: Scalar>(opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst_td = 0f64;
    let mut worst_probe = 0f64;
    let mut details = Vec::new();
    let n_points = 20;
    for trial in 0..n_points {
        let n = if trial % 2 == 0 { 1 } else { 2 };
        let omega_p = fl::<T>(rng.gen_range(0.4..1.5));
        let omega_k: Vec<T> = (0..n)
            .map(|_| omega_p * fl(rng.gen_range(0.02..0.5)))
            .collect();
        let g_k: Vec<T> = (0..n)
            .map(|_| omega_p * fl(rng.gen_range(-0.1..0.1)))
            .collect();
        // the flipped-sign hook reverses thermal weights; keep exponents
        // moderate there so the failure is numerical rather than overflow
        let t_range: std::ops::Range<f64> = if opts.hooks.flip_balance_sign {
            0.5..2.0
        } else {
            0.02..2.0
        };
        let temp =
            omega_p * fl(10f64.powf(rng.gen_range(t_range.start.log10()..t_range.end.log10())));
        let p = ThermometerParams::new(omega_p, omega_k, g_k)?;
        let frame = dressed_frame(&p)?;
        let h = dressed_hamiltonian(&p);
        let channels =
            build_channels_with_hooks(&p, &frame, temp, &SpectralResponse::default(), opts.hooks)?;
        let numeric = steady_state(&liouvillian(&h, &channels))?;
        let analytic = dressed_product_state(&p, &frame, temp)?;
        let td = to_f64(trace_distance(&numeric, &analytic)?);
        worst_td = worst_td.max(td);

        let closed = if n == 1 {
            probe_state_n1(&p, temp)?.to_operator()
        } else {
            probe_state_n2(&p, temp)?.to_operator()
        };
        let oracle = probe_from_transform(&p, temp)?;
        let dev = to_f64((&closed - &oracle).max_abs());
        worst_probe = worst_probe.max(dev);
    }
    details.push(format!(
        "{n_points} randomized points: null-space vs product trace distance max {worst_td:.3e}"
    ));
    details.push(format!(
        "closed-form probe vs transform-and-trace max entry deviation {worst_probe:.3e}"
    ));
    let passed = worst_td < 1e-7 && worst_probe < 1e-10;
    Ok(SuiteResult {
        name: "steady-state oracle equivalence".into(),
        passed,
        max_deviation: worst_td.max(worst_probe),
        threshold: 1e-7,
        details,
    })
}

/// Steady state must not depend on the bath spectral shape.
pub fn suite_spectrum_independence<T: Scalar>(opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x51);
    let mut worst = 0f64;
    for trial in 0..5 {
        let n = if trial % 2 == 0 { 1 } else { 2 };
        let omega_k: Vec<T> = (0..n).map(|_| fl(rng.gen_range(0.02..0.5))).collect();
        let g_k: Vec<T> = (0..n).map(|_| fl(rng.gen_range(-0.1..0.1))).collect();
        let temp = fl::<T>(10f64.powf(rng.gen_range(-1.5..0.3)));
        let p = ThermometerParams::new(T::one(), omega_k, g_k)?;
        let frame = dressed_frame(&p)?;
        let h = dressed_hamiltonian(&p);
        let flat = build_channels_with_hooks(
            &p,
            &frame,
            temp,
            &SpectralResponse::flat(fl(1e-3)),
            ChannelHooks::default(),
        )?;
        let ohmic = build_channels_with_hooks(
            &p,
            &frame,
            temp,
            &SpectralResponse::ohmic(fl(1e-3), fl(10.0)),
            ChannelHooks::default(),
        )?;
        let a = steady_state(&liouvillian(&h, &flat))?;
        let b = steady_state(&liouvillian(&h, &ohmic))?;
        worst = worst.max(to_f64(trace_distance(&a, &b)?));
    }
    Ok(SuiteResult {
        name: "bath-spectrum independence".into(),
        passed: worst < 1e-8,
        max_deviation: worst,
        threshold: 1e-8,
        details: vec![format!(
            "flat vs ohmic steady states at 5 points: max trace distance {worst:.3e}"
        )],
    })
}

/// Determinant form vs spectral sum of the qubit QFI on random states.
pub fn suite_qfi_methods<T: Scalar>(opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x91);
    let mut worst = 0f64;
    for _ in 0..100 {
        let r: f64 = rng.gen_range(0.05..0.9);
        let cos_t: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let sin_t = (1.0 - cos_t * cos_t).sqrt();
        let (x, y, z) = (r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t);
        let mut rho = Operator::<T>::zeros(2);
        rho[(0, 0)] = num_complex::Complex::new(fl((1.0 + z) / 2.0), T::zero());
        rho[(1, 1)] = num_complex::Complex::new(fl((1.0 - z) / 2.0), T::zero());
        rho[(0, 1)] = num_complex::Complex::new(fl(x / 2.0), fl(-y / 2.0));
        rho[(1, 0)] = num_complex::Complex::new(fl(x / 2.0), fl(y / 2.0));
        let (dx, dy, dz): (f64, f64, f64) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let mut drho = Operator::<T>::zeros(2);
        drho[(0, 0)] = num_complex::Complex::new(fl(dz), T::zero());
        drho[(1, 1)] = num_complex::Complex::new(fl(-dz), T::zero());
        drho[(0, 1)] = num_complex::Complex::new(fl(dx), fl(-dy));
        drho[(1, 0)] = num_complex::Complex::new(fl(dx), fl(dy));
        let a = to_f64(qfi_qubit(&rho, &drho)?);
        let b = to_f64(qfi_sld(&rho, &drho)?);
        worst = worst.max((a - b).abs());
    }
    Ok(SuiteResult {
        name: "qubit QFI determinant form vs spectral sum".into(),
        passed: worst < 1e-9,
        max_deviation: worst,
        threshold: 1e-9,
        details: vec![format!(
            "100 random qubit families: max |difference| {worst:.3e}"
        )],
    })
}

/// Finite-difference thermal-qubit information against the closed form.
pub fn suite_thermal_tls<T: Scalar>(_opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut worst = 0f64;
    for omega0 in [0.04, 0.7, 1.0] {
        let w: T = fl(omega0);
        let family = move |t: T| {
            let tanh = (w / (fl::<T>(2.0) * t)).tanh();
            Ok(Operator::diag(&[
                (T::one() - tanh) * fl(0.5),
                (T::one() + tanh) * fl(0.5),
            ]))
        };
        for t in [0.3 * omega0, 0.242 * omega0, 2.0 * omega0] {
            let temp: T = fl(t);
            let rho = family(temp)?;
            let drho = d_rho_dt(&family, temp)?;
            let got = to_f64(qfi_qubit(&rho, &drho)?);
            let want = to_f64(qfi_thermal_tls(w, temp));
            worst = worst.max((got - want).abs() / want.max(1.0));
        }
    }
    Ok(SuiteResult {
        name: "thermal two-level closed form".into(),
        passed: worst < 1e-8,
        max_deviation: worst,
        threshold: 1e-8,
        details: vec![format!(
            "finite-difference QFI vs closed form: max relative deviation {worst:.3e}"
        )],
    })
}

/// For strictly diagonal families the QFI must equal the classical Fisher
/// information of the populations.
pub fn suite_classical_reduction<T: Scalar>(opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xD1);
    let mut worst = 0f64;
    for _ in 0..20 {
        let omega0: f64 = rng.gen_range(0.05..1.0);
        let w: T = fl(omega0);
        let family = move |t: T| {
            let tanh = (w / (fl::<T>(2.0) * t)).tanh();
            Ok(Operator::diag(&[
                (T::one() - tanh) * fl(0.5),
                (T::one() + tanh) * fl(0.5),
            ]))
        };
        let temp: T = fl(10f64.powf(rng.gen_range(-1.3..0.5)) * omega0);
        let rho = family(temp)?;
        let drho = d_rho_dt(&family, temp)?;
        let f = to_f64(qfi_qubit(&rho, &drho)?);
        let mut classical = 0f64;
        for i in 0..2 {
            let p = to_f64(rho[(i, i)].re);
            let dp = to_f64(drho[(i, i)].re);
            classical += dp * dp / p;
        }
        worst = worst.max((f - classical).abs() / classical.max(1.0));
    }
    Ok(SuiteResult {
        name: "classical Fisher reduction on diagonal families".into(),
        passed: worst < 1e-10,
        max_deviation: worst,
        threshold: 1e-10,
        details: vec![format!(
            "20 diagonal thermal families: max relative deviation {worst:.3e}"
        )],
    })
}

/// The symmetric and antisymmetric pair couplings generate no probe
/// coherence; the symmetric probe reads exactly maximally mixed.
pub fn suite_null_results<T: Scalar>(opts: &ValidationOptions) -> Result<SuiteResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xA7);
    let mut worst = 0f64;
    let mut details = Vec::new();
    for _ in 0..20 {
        let omega_p: T = fl(rng.gen_range(0.3..1.5));
        let omega_1: T = fl(rng.gen_range(0.05..1.2));
        let g: T = fl(rng.gen_range(-0.3..0.3));
        let temp: T = fl(10f64.powf(rng.gen_range(-1.5..1.0)));
        let dd = dd_probe_state(omega_p, omega_1, g, temp)?;
        if dd.chi() != T::zero() || dd.c() != T::zero() {
            worst = worst.max(1.0);
        }
        let dm = DmModelParams::new(omega_1, omega_p, g)?;
        let st = dm_probe_state(&dm, temp)?;
        if st.c() != T::zero() {
            worst = worst.max(1.0);
        }
        let op = st.to_operator();
        let trace_dev = to_f64((op.trace().re - T::one()).abs());
        worst = worst.max(trace_dev);
        // independent route for the antisymmetric populations at benign
        // temperatures: raw exponentials, no normalization tricks
        if to_f64(temp) > 0.2 {
            let t = temp;
            let e = |x: T| x.exp();
            let c2 = dm.cos_theta * dm.cos_theta;
            let s2 = dm.sin_theta * dm.sin_theta;
            let k = (e(dm.omega_gap / t) + e(dm.omega_s / t))
                * (T::one() + e((dm.omega_s + dm.omega_gap) / t));
            let n_exc = e(dm.omega_gap / t)
                + e(dm.omega_s / t) * (e(fl::<T>(2.0) * dm.omega_gap / t) * c2 + s2);
            let chi_raw = T::one() - fl::<T>(2.0) * n_exc / k;
            worst = worst.max(to_f64((chi_raw - st.chi()).abs()));
        }
    }
    details.push(format!(
        "20 random pair-coupling points: max deviation {worst:.3e}"
    ));
    Ok(SuiteResult {
        name: "symmetric/antisymmetric null results".into(),
        passed: worst < 1e-12,
        max_deviation: worst,
        threshold: 1e-12,
        details,
    })
}

/// The documented closed-form variants measured against their oracles.
pub fn comparisons<T: Scalar>() -> Result<Vec<Comparison>> {
    let mut out = Vec::new();

    // (1) Globally thermalized pair: the unnormalized population-asymmetry
    // prefactor against the dense Gibbs reduction.
    {
        let (wp, w1, g, temp) = (T::one(), fl::<T>(0.02), fl::<T>(0.02), fl::<T>(0.01));
        let p = ThermometerParams::new(wp, vec![w1], vec![g])?;
        let h = build_hamiltonian(&p);
        let rho = gibbs_state(&h, temp)?;
        let dense = partial_trace_op(rho.operator(), &[2, 2], &[1])?;
        let chi_dense = to_f64((dense[(1, 1)] - dense[(0, 0)]).re);
        let omega_prime = (wp * wp + fl::<T>(4.0) * g * g).sqrt();
        let tanh = (omega_prime / (fl::<T>(2.0) * temp)).tanh();
        let chi_unnormalized = to_f64(omega_prime * tanh);
        let chi_normalized = to_f64((wp / omega_prime) * tanh);
        let implemented = to_f64(global_gibbs_probe(&p, temp)?.chi());
        out.push(Comparison {
            name: "global-pair population asymmetry prefactor".into(),
            variant_value: chi_unnormalized,
            oracle_value: chi_dense,
            relative_deviation: (chi_unnormalized - chi_dense).abs() / chi_dense.abs(),
            oracle_satisfied: (chi_normalized - chi_dense).abs() < 1e-10
                && (implemented - chi_dense).abs() < 1e-10,
            note: format!(
                "normalized prefactor (omega_p/Omega') tanh matches the dense reduction to \
                 {:.1e}; the unnormalized variant Omega' tanh exceeds 1 and cannot be a \
                 population asymmetry",
                (chi_normalized - chi_dense).abs()
            ),
        });
    }

    // (2) Globally thermalized pair: the published low-temperature
    // information term against the exact curve at its lower peak.
    {
        let (wp, w1, g) = (T::one(), fl::<T>(0.02), fl::<T>(0.02));
        let p = ThermometerParams::new(wp, vec![w1], vec![g])?;
        let family = move |t: T| Ok(global_gibbs_probe(&p, t)?.to_operator());
        let temps = temperature_grid(fl::<T>(1e-3), T::one(), 300, GridKind::Log)?;
        let curve = sweep(&family, &temps)?;
        let lower = curve.peaks.first().copied();
        let upper = curve.peaks.last().copied();
        let (mut variant, mut oracle, mut rel_low) = (f64::NAN, f64::NAN, f64::NAN);
        if let Some(pk) = lower {
            variant = to_f64(qfi_approx_global(wp, w1, g, pk.temperature));
            oracle = to_f64(pk.qfi);
            rel_low = (variant - oracle).abs() / oracle;
        }
        let mut high_ok = false;
        let mut high_rel = f64::NAN;
        if let Some(pk) = upper {
            let approx = to_f64(qfi_approx_global(wp, w1, g, pk.temperature));
            high_rel = (approx - to_f64(pk.qfi)).abs() / to_f64(pk.qfi);
            high_ok = high_rel < 0.10;
        }
        out.push(Comparison {
            name: "global-pair weak-coupling low-temperature term".into(),
            variant_value: variant,
            oracle_value: oracle,
            relative_deviation: rel_low,
            oracle_satisfied: high_ok,
            note: format!(
                "the low term reduces to sinh^2 and grows without bound toward T -> 0, so it \
                 overshoots the exact lower peak by this factor; the high term agrees at the \
                 upper peak to {high_rel:.2e} (within 10%)"
            ),
        });
    }

    // (3) Thermal-qubit peak-temperature constant: transcendental variant
    // against direct maximization.
    {
        let gamma_num = to_f64(gamma_constant::<T>());
        let gamma_lit = to_f64(gamma_transcendental_variant::<T>());
        // scale covariance of the maximizer as its own oracle
        let w: T = fl(0.04);
        let family = move |t: T| {
            let tanh = (w / (fl::<T>(2.0) * t)).tanh();
            Ok(Operator::diag(&[
                (T::one() - tanh) * fl(0.5),
                (T::one() + tanh) * fl(0.5),
            ]))
        };
        let temps = temperature_grid(fl::<T>(1e-4), fl::<T>(1.0), 400, GridKind::Log)?;
        let curve = sweep(&family, &temps)?;
        let covariant = curve
            .peaks
            .first()
            .map(|pk| (to_f64(pk.temperature) / (0.04 * gamma_num) - 1.0).abs() < 1e-4)
            .unwrap_or(false);
        out.push(Comparison {
            name: "thermal-qubit peak-temperature constant".into(),
            variant_value: gamma_lit,
            oracle_value: gamma_num,
            relative_deviation: (gamma_lit - gamma_num).abs() / gamma_num,
            oracle_satisfied: covariant,
            note: "the transcendental relation 2 gamma = tanh(1/gamma) lands at twice the \
                   maximizing ratio T*/omega_0; the maximizer rescales exactly with the gap"
                .into(),
        });
    }

    // (4) Two-ancilla dressed probe frequency: branch-sum form against the
    // dense spectrum.
    {
        let p = ThermometerParams::new(
            fl::<T>(0.26),
            vec![fl::<T>(0.09), fl::<T>(0.17)],
            vec![fl::<T>(0.003), fl::<T>(0.05)],
        )?;
        let (evals, _) = hermitian_eigen(&build_hamiltonian(&p));
        let dense_mean_gap: f64 = evals.iter().map(|e| to_f64(e.abs())).sum::<f64>() / 4.0;
        let branch_sum = to_f64(omega_branch_sum_n2(&p)?);
        let block_mean = to_f64(model::dressed_probe_frequency(&p)?);
        out.push(Comparison {
            name: "two-ancilla dressed probe frequency".into(),
            variant_value: branch_sum,
            oracle_value: dense_mean_gap,
            relative_deviation: (branch_sum - dense_mean_gap).abs() / dense_mean_gap,
            oracle_satisfied: (block_mean - dense_mean_gap).abs() < 1e-10,
            note: format!(
                "the branch-sum form tends to 2 omega_p at zero coupling; the block-gap mean \
                 {block_mean:.6} matches the dense mean probe gap and is the frequency used \
                 throughout"
            ),
        });
    }

    // (5) One-ancilla weak-coupling coherence-term weight at the exact
    // lower peak.
    {
        let p = ThermometerParams::new(T::one(), vec![fl::<T>(0.04)], vec![fl::<T>(0.01)])?;
        let family = {
            let p = p.clone();
            move |t: T| Ok(probe_state_n1(&p, t)?.to_operator())
        };
        let temps = temperature_grid(fl::<T>(1e-3), fl::<T>(3.0), 400, GridKind::Log)?;
        let curve = sweep(&family, &temps)?;
        let mut half_dev = f64::NAN;
        let mut full_dev = f64::NAN;
        let mut variant = f64::NAN;
        let mut oracle = f64::NAN;
        let mut all_within = !curve.peaks.is_empty();
        for pk in &curve.peaks {
            let exact = to_f64(pk.qfi);
            let full = to_f64(qfi_approx_n1(&p, pk.temperature)?);
            let half = to_f64(qfi_approx_n1_weighted(&p, pk.temperature, fl(0.5))?);
            all_within &= (full - exact).abs() / exact < 0.05;
            if (half - exact).abs() / exact > half_dev.max(0.0) || half_dev.is_nan() {
                half_dev = (half - exact).abs() / exact;
                full_dev = (full - exact).abs() / exact;
                variant = half;
                oracle = exact;
            }
        }
        out.push(Comparison {
            name: "one-ancilla weak-coupling coherence-term weight".into(),
            variant_value: variant,
            oracle_value: oracle,
            relative_deviation: half_dev,
            oracle_satisfied: all_within,
            note: format!(
                "the half-weight coherence term sits a factor two below the exact curve at the \
                 lower peak; the full-weight form deviates by {full_dev:.2e} there and stays \
                 within 5% at every peak"
            ),
        });
    }

    // (6) Symmetric-pair back-transform pipeline against the maximally
    // mixed contract state.
    {
        let (wp, w1, g, temp) = (T::one(), fl::<T>(0.04), fl::<T>(0.1), fl::<T>(0.1));
        let pipeline = dd_transform_pipeline_probe(wp, w1, g, temp)?;
        let excited = to_f64(pipeline[(0, 0)].re);
        let td_from_mixed = (0.5 - excited).abs();
        // the pipeline should coincide with the pair-Gibbs marginal
        let h = model::build_dd_hamiltonian(wp, w1, g);
        let dense = partial_trace_op(gibbs_state(&h, temp)?.operator(), &[2, 2], &[1])?;
        let agrees = to_f64((&pipeline - &dense).max_abs()) < 1e-10;
        out.push(Comparison {
            name: "symmetric-pair back-transform pipeline".into(),
            variant_value: excited,
            oracle_value: 0.5,
            relative_deviation: td_from_mixed / 0.5,
            oracle_satisfied: agrees,
            note: "the dressed-product back-transform equals the pair thermal marginal, which \
                   is diagonal but approaches the ground state at low temperature; the \
                   maximally mixed contract value is kept for the probe-state API and the gap \
                   is recorded here"
                .into(),
        });
    }

    Ok(out)
}

/// Runs every suite plus the documented-discrepancy comparisons.
pub fn run_validation<T: Scalar>(opts: &ValidationOptions) -> Result<ValidationReport> {
    let suites = vec![
        suite_steady_state_oracle::<T>(opts)?,
        suite_spectrum_independence::<T>(opts)?,
        suite_qfi_methods::<T>(opts)?,
        suite_thermal_tls::<T>(opts)?,
        suite_classical_reduction::<T>(opts)?,
        suite_null_results::<T>(opts)?,
    ];
    let comparisons = comparisons::<T>()?;
    let passed = suites.iter().all(|s| s.passed) && comparisons.iter().all(|c| c.oracle_satisfied);
    Ok(ValidationReport {
        suites,
        comparisons,
        passed,
    })
}
