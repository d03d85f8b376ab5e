//! The global master equation: jump channels, right-hand side, fixed-step
//! integration and Liouvillian null-space steady states.
//!
//! Channels live in the dressed frame, where the Hamiltonian is diagonal
//! and every jump operator is a plain product of ladder operators. Each
//! channel pairs a forward jump at a nonnegative transition frequency with
//! its reverse weighted by `exp(-freq/T)`; pairs whose raw frequency is
//! negative are rewritten with the conjugate jump as the forward process
//! at `|freq|`, which leaves the stationary condition untouched while
//! keeping every rate bounded at low temperature.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{DressedFrame, ThermometerParams};
use crate::qcore::linalg::{complex_eigenvalues, null_vector};
use crate::qcore::{pauli, DensityMatrix, NumericPolicy, Operator, PauliAxis};
use crate::scalar::{fl, Scalar};

/// Bath spectral response shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    Flat,
    Ohmic,
}

/// Bath spectral response `G(omega)`; the steady state must not depend on
/// it, which the validation suite checks by swapping shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResponse<T: Scalar> {
    pub kind: SpectralKind,
    /// Overall rate scale in units of the probe frequency.
    pub base_rate: T,
    /// Exponential cutoff, used only by the ohmic shape.
    pub ohmic_cutoff: T,
}

impl<T: Scalar> SpectralResponse<T> {
    pub fn flat(base_rate: T) -> Self {
        Self {
            kind: SpectralKind::Flat,
            base_rate,
            ohmic_cutoff: fl(10.0),
        }
    }

    pub fn ohmic(base_rate: T, cutoff: T) -> Self {
        Self {
            kind: SpectralKind::Ohmic,
            base_rate,
            ohmic_cutoff: cutoff,
        }
    }

    /// Response at a nonnegative transition frequency.
    pub fn eval(&self, omega: T) -> T {
        match self.kind {
            SpectralKind::Flat => self.base_rate,
            SpectralKind::Ohmic => self.base_rate * omega * (-omega / self.ohmic_cutoff).exp(),
        }
    }
}

impl<T: Scalar> Default for SpectralResponse<T> {
    /// Flat response at `1e-3` of the probe frequency, weak enough for the
    /// Born-Markov treatment behind the master equation.
    fn default() -> Self {
        Self::flat(fl(1e-3))
    }
}

/// One dissipative channel: forward jump `op` at `freq >= 0` with rate
/// `prefactor`, reverse jump `op^dagger` weighted by
/// `boltzmann = exp(-freq/T)`.
#[derive(Debug, Clone)]
pub struct JumpChannel<T: Scalar> {
    pub op: Operator<T>,
    pub freq: T,
    pub prefactor: T,
    pub boltzmann: T,
}

/// Debug hooks for sensitivity checks of the validation suites.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChannelHooks {
    /// Flips the sign of the exponent in every detailed-balance weight;
    /// the steady state then stops matching the thermal product and the
    /// oracle suite must fail.
    pub flip_balance_sign: bool,
}

/// Builds the six channels per ancilla of the global master equation:
/// the local ancilla pair at `omega_k` weighted by `cos^2(theta_k)` and
/// the two joint ancilla-probe pairs at `omega_k -+ Omega` weighted by
/// `sin^2(theta_k)`.
pub fn build_channels<T: Scalar>(
    p: &ThermometerParams<T>,
    frame: &DressedFrame<T>,
    temperature: T,
    response: &SpectralResponse<T>,
) -> Result<Vec<JumpChannel<T>>> {
    build_channels_with_hooks(p, frame, temperature, response, ChannelHooks::default())
}

pub fn build_channels_with_hooks<T: Scalar>(
    p: &ThermometerParams<T>,
    frame: &DressedFrame<T>,
    temperature: T,
    response: &SpectralResponse<T>,
    hooks: ChannelHooks,
) -> Result<Vec<JumpChannel<T>>> {
    if temperature <= T::zero() {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if response.base_rate <= T::zero() {
        return Err(Error::Domain(
            "spectral response needs a positive rate scale".into(),
        ));
    }
    let n = p.n_ancilla();
    if !(1..=2).contains(&n) {
        return Err(Error::UnsupportedModel(
            "the dressed-frame channels have closed form for 1 or 2 ancillas".into(),
        ));
    }
    let nq = p.n_qubits();
    let probe = p.probe_site();
    let sm_p = pauli(PauliAxis::Minus, probe, nq)?;
    let sp_p = pauli(PauliAxis::Plus, probe, nq)?;
    let mut channels = Vec::with_capacity(3 * n);
    for k in 0..n {
        let theta = frame.theta_k[k];
        let (cos2, sin2) = (theta.cos() * theta.cos(), theta.sin() * theta.sin());
        let sm_k = pauli(PauliAxis::Minus, k, nq)?;
        let omega_k = p.omega_k()[k];
        // local pair, joint flip-raise pair, joint double-lower pair
        let raw = [
            (sm_k.clone(), omega_k, cos2),
            (sm_k.matmul(&sp_p), omega_k - frame.omega, sin2),
            (sm_k.matmul(&sm_p), omega_k + frame.omega, sin2),
        ];
        for (op, raw_freq, weight) in raw {
            let (op, freq) = if raw_freq < T::zero() {
                (op.dagger(), -raw_freq)
            } else {
                (op, raw_freq)
            };
            let exponent = if hooks.flip_balance_sign {
                freq / temperature
            } else {
                -freq / temperature
            };
            channels.push(JumpChannel {
                op,
                freq,
                prefactor: weight * response.eval(freq),
                boltzmann: exponent.exp(),
            });
        }
    }
    Ok(channels)
}

/// `D[c] rho = c rho c^dagger - (1/2) {c^dagger c, rho}`.
fn dissipator<T: Scalar>(c: &Operator<T>, rho: &Operator<T>) -> Operator<T> {
    let cd = c.dagger();
    let cdc = cd.matmul(c);
    let half = fl::<T>(0.5);
    let sandwich = c.matmul(rho).matmul(&cd);
    let anti = &cdc.matmul(rho) + &rho.matmul(&cdc);
    &sandwich - &anti.scale_re(half)
}

/// Right-hand side of the master equation:
/// `-i [H, rho] + sum_channels prefactor (D[op] + boltzmann D[op^dagger])`.
pub fn lindblad_rhs<T: Scalar>(
    rho: &Operator<T>,
    h: &Operator<T>,
    channels: &[JumpChannel<T>],
) -> Result<Operator<T>> {
    if rho.dim() != h.dim() {
        return Err(Error::Shape(format!(
            "state dim {} vs Hamiltonian dim {}",
            rho.dim(),
            h.dim()
        )));
    }
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut out = h.commutator(rho).scale(minus_i);
    for ch in channels {
        if ch.op.dim() != rho.dim() {
            return Err(Error::Shape("channel dimension mismatch".into()));
        }
        let fwd = dissipator(&ch.op, rho);
        let rev = dissipator(&ch.op.dagger(), rho);
        out = &out + &(&fwd.scale_re(ch.prefactor) + &rev.scale_re(ch.prefactor * ch.boltzmann));
    }
    Ok(out)
}

/// Step suggestion `0.01 / max channel rate` for [`evolve`].
pub fn default_dt<T: Scalar>(channels: &[JumpChannel<T>]) -> Option<T> {
    let max_rate = channels.iter().map(|c| c.prefactor).fold(T::zero(), T::max);
    (max_rate > T::zero()).then(|| fl::<T>(0.01) / max_rate)
}

/// Classic fourth-order fixed-step integration of [`lindblad_rhs`] with
/// re-Hermitization every step. Positivity is monitored every ten steps;
/// losing it beyond `1e-6` aborts with a stiffness error.
pub fn evolve<T: Scalar>(
    rho0: &DensityMatrix<T>,
    h: &Operator<T>,
    channels: &[JumpChannel<T>],
    t_final: T,
    dt: T,
) -> Result<DensityMatrix<T>> {
    if dt <= T::zero() {
        return Err(Error::Domain("dt must be positive".into()));
    }
    if t_final < T::zero() {
        return Err(Error::Domain("t_final must be nonnegative".into()));
    }
    let mut rho = rho0.operator().clone();
    if t_final == T::zero() {
        return Ok(rho0.clone());
    }
    let steps = (t_final / dt).ceil().to_f64().unwrap_or(1.0) as usize;
    let steps = steps.max(1);
    let dt = t_final / fl::<T>(steps as f64);
    let half = fl::<T>(0.5);
    let sixth = T::one() / fl::<T>(6.0);
    let two = fl::<T>(2.0);
    for step in 0..steps {
        let k1 = lindblad_rhs(&rho, h, channels)?;
        let k2 = lindblad_rhs(&(&rho + &k1.scale_re(half * dt)), h, channels)?;
        let k3 = lindblad_rhs(&(&rho + &k2.scale_re(half * dt)), h, channels)?;
        let k4 = lindblad_rhs(&(&rho + &k3.scale_re(dt)), h, channels)?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_re(two);
        rho = &rho + &incr.scale_re(dt * sixth);
        rho = rho.hermitize();
        if !rho.is_finite() {
            return Err(Error::Stiffness(format!("non-finite state at step {step}")));
        }
        if step % 10 == 9 {
            let tr = rho.trace().re;
            if (tr - T::one()).abs() > fl(1e-8) {
                return Err(Error::Stiffness(format!(
                    "trace drifted to {tr} at step {step}"
                )));
            }
            let (evals, _) = crate::qcore::linalg::hermitian_eigen(&rho);
            if evals.first().copied().unwrap_or(T::zero()) < fl(-1e-6) {
                return Err(Error::Stiffness(format!("positivity lost at step {step}")));
            }
        }
    }
    let policy = NumericPolicy {
        positivity_tol: fl(-1e-6),
        hermiticity_tol: fl(1e-8),
        ..NumericPolicy::default()
    };
    DensityMatrix::with_policy(rho, &policy)
}

/// Matrix form of the master equation acting on row-major vectorized
/// states: `vec(lindblad_rhs(rho)) = L vec(rho)`.
#[derive(Debug, Clone)]
pub struct Liouvillian<T: Scalar> {
    mat: Operator<T>,
    dim: usize,
}

impl<T: Scalar> Liouvillian<T> {
    pub fn matrix(&self) -> &Operator<T> {
        &self.mat
    }

    /// Hilbert-space dimension `d` (the matrix is `d^2 x d^2`).
    pub fn state_dim(&self) -> usize {
        self.dim
    }

    pub fn apply_to(&self, rho: &Operator<T>) -> Operator<T> {
        let v = vectorize(rho);
        let w = self.mat.apply(&v);
        unvectorize(&w, self.dim)
    }
}

pub fn vectorize<T: Scalar>(rho: &Operator<T>) -> Vec<Complex<T>> {
    rho.entries().to_vec()
}

pub fn unvectorize<T: Scalar>(v: &[Complex<T>], dim: usize) -> Operator<T> {
    let mut out = Operator::zeros(dim);
    out.entries_mut().copy_from_slice(v);
    out
}

/// Builds the Liouvillian matrix. With row-major vectorization,
/// `vec(A rho B) = (A (x) B^T) vec(rho)`.
pub fn liouvillian<T: Scalar>(h: &Operator<T>, channels: &[JumpChannel<T>]) -> Liouvillian<T> {
    let d = h.dim();
    let id = Operator::identity(d);
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut l = (&h.kron(&id) - &id.kron(&h.transpose())).scale(minus_i);
    let half = fl::<T>(0.5);
    for ch in channels {
        for (c, rate) in [
            (ch.op.clone(), ch.prefactor),
            (ch.op.dagger(), ch.prefactor * ch.boltzmann),
        ] {
            let cd = c.dagger();
            let cdc = cd.matmul(&c);
            let sandwich = c.kron(&c.conj());
            let anti = &cdc.kron(&id) + &id.kron(&cdc.transpose());
            l = &l + &(&sandwich - &anti.scale_re(half)).scale_re(rate);
        }
    }
    Liouvillian { mat: l, dim: d }
}

/// Steady state as the null vector of the Liouvillian: uniqueness is
/// checked on the spectrum, the vector comes from inverse iteration seeded
/// with the maximally mixed state, and the result is Hermitized,
/// normalized and validated.
pub fn steady_state<T: Scalar>(l: &Liouvillian<T>) -> Result<DensityMatrix<T>> {
    let d = l.state_dim();
    let evals = complex_eigenvalues(&l.mat)?;
    if evals.len() >= 2 && evals[1].norm() < fl(1e-12) {
        return Err(Error::NonUniqueSteadyState(format!(
            "second Liouvillian eigenvalue {:e} is numerically zero",
            evals[1].norm()
        )));
    }
    let start: Vec<Complex<T>> = Operator::identity(d)
        .scale_re(T::one() / fl::<T>(d as f64))
        .entries()
        .to_vec();
    let v = null_vector(&l.mat, &start, 6);
    let rho = unvectorize(&v, d).hermitize();
    let tr = rho.trace().re;
    if tr.abs() < fl(1e-10) {
        return Err(Error::NonUniqueSteadyState(
            "null vector carries no trace".into(),
        ));
    }
    let rho = rho.scale_re(T::one() / tr);
    let residual: T = l
        .mat
        .apply(&vectorize(&rho))
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<T>()
        .sqrt();
    if residual > fl(1e-9) {
        return Err(Error::NumericalFailure(format!(
            "steady-state residual {residual:e} exceeds 1e-9"
        )));
    }
    let policy = NumericPolicy {
        positivity_tol: fl(-1e-9),
        ..NumericPolicy::default()
    };
    DensityMatrix::with_policy(rho, &policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{self, ThermometerParams};
    use crate::qcore::{trace_distance, Operator};
    use crate::steady::dressed_product_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type T = f64;

    fn params(omega_p: T, omega_k: &[T], g_k: &[T]) -> ThermometerParams<T> {
        ThermometerParams::new(omega_p, omega_k.to_vec(), g_k.to_vec()).unwrap()
    }

    fn fig2_setup(g: T, temp: T) -> (ThermometerParams<T>, Operator<T>, Vec<JumpChannel<T>>) {
        let p = params(1.0, &[0.04], &[g]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let ch = build_channels(&p, &frame, temp, &SpectralResponse::default()).unwrap();
        (p, h, ch)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Operator<T> {
        let mut m = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        m.hermitize()
    }

    #[test]
    fn channels_for_decoupled_probe_are_local_only() {
        let (_, _, ch) = fig2_setup(0.0, 0.1);
        assert_eq!(ch.len(), 3);
        let live: Vec<&JumpChannel<T>> = ch.iter().filter(|c| c.prefactor > 0.0).collect();
        assert_eq!(live.len(), 1);
        assert!((live[0].freq - 0.04).abs() < 1e-15);
    }

    #[test]
    fn channel_frequencies_follow_the_dressed_gap() {
        let (_, _, ch) = fig2_setup(0.04, 0.1);
        assert_eq!(ch.len(), 3);
        let omega = (1.0064f64).sqrt();
        assert!((ch[0].freq - 0.04).abs() < 1e-12);
        assert!((ch[1].freq - (omega - 0.04)).abs() < 1e-12); // rewritten pair
        assert!((ch[2].freq - (omega + 0.04)).abs() < 1e-12);
        assert!((ch[2].freq - 1.0432).abs() < 1e-4);
        for c in &ch {
            assert!(c.freq >= 0.0);
            assert!((c.boltzmann - (-c.freq / 0.1f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn rhs_is_traceless_and_hermitian() {
        let (_, h, ch) = fig2_setup(0.04, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let m = random_hermitian(4, &mut rng);
            let rho = &m.scale_re(0.05) + &Operator::identity(4).scale_re(0.25);
            let out = lindblad_rhs(&rho, &h, &ch).unwrap();
            assert!(out.trace().norm() < 1e-12);
            assert!(out.is_hermitian_within(1e-12));
        }
    }

    #[test]
    fn rhs_without_channels_is_pure_commutator() {
        let (_, h, _) = fig2_setup(0.04, 0.05);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_hermitian(4, &mut rng);
        let out = lindblad_rhs(&rho, &h, &[]).unwrap();
        let want = h.commutator(&rho).scale(Complex::new(0.0, -1.0));
        assert!((&out - &want).max_abs() < 1e-14);
    }

    #[test]
    fn rhs_vanishes_on_the_analytic_steady_state() {
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        for temp in [0.02, 0.3] {
            let ch = build_channels(&p, &frame, temp, &SpectralResponse::default()).unwrap();
            let rho = dressed_product_state(&p, &frame, temp).unwrap();
            let out = lindblad_rhs(rho.operator(), &h, &ch).unwrap();
            assert!(out.max_abs() < 1e-10, "T={temp}");
        }
    }

    #[test]
    fn liouvillian_matches_direct_rhs() {
        let (_, h, ch) = fig2_setup(0.03, 0.07);
        let l = liouvillian(&h, &ch);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let rho = random_hermitian(4, &mut rng);
            let direct = lindblad_rhs(&rho, &h, &ch).unwrap();
            let via_matrix = l.apply_to(&rho);
            assert!((&direct - &via_matrix).max_abs() < 1e-12);
        }
    }

    #[test]
    fn liouvillian_spectrum_is_stable_with_a_zero_mode() {
        let (_, h, ch) = fig2_setup(0.04, 0.1);
        let l = liouvillian(&h, &ch);
        let evals = complex_eigenvalues(l.matrix()).unwrap();
        assert!(evals[0].norm() < 1e-10, "smallest |lambda| {}", evals[0]);
        let max_re = evals.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10, "unstable eigenvalue {max_re}");
    }

    #[test]
    fn steady_state_matches_analytic_product() {
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        for temp in [0.02, 0.1, 1.0] {
            let ch = build_channels(&p, &frame, temp, &SpectralResponse::default()).unwrap();
            let l = liouvillian(&h, &ch);
            let num = steady_state(&l).unwrap();
            let analytic = dressed_product_state(&p, &frame, temp).unwrap();
            let td = trace_distance(&num, &analytic).unwrap();
            assert!(td < 1e-8, "T={temp}: trace distance {td:e}");
        }
    }

    #[test]
    fn steady_state_high_temperature_is_maximally_mixed() {
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let ch = build_channels(&p, &frame, 1e9, &SpectralResponse::default()).unwrap();
        let l = liouvillian(&h, &ch);
        let num = steady_state(&l).unwrap();
        let mixed = DensityMatrix::new(Operator::identity(4).scale_re(0.25)).unwrap();
        assert!(trace_distance(&num, &mixed).unwrap() < 1e-6);
    }

    #[test]
    fn steady_state_is_spectrum_independent() {
        let p = params(1.0, &[0.04], &[0.02]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let flat = build_channels(&p, &frame, 0.08, &SpectralResponse::flat(1e-3)).unwrap();
        let ohmic = build_channels(&p, &frame, 0.08, &SpectralResponse::ohmic(1e-3, 10.0)).unwrap();
        let a = steady_state(&liouvillian(&h, &flat)).unwrap();
        let b = steady_state(&liouvillian(&h, &ohmic)).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-8);
    }

    #[test]
    fn decoupled_probe_has_degenerate_steady_space() {
        let (_, h, ch) = fig2_setup(0.0, 0.1);
        let l = liouvillian(&h, &ch);
        assert!(matches!(
            steady_state(&l),
            Err(Error::NonUniqueSteadyState(_))
        ));
    }

    #[test]
    fn flipped_balance_sign_breaks_the_thermal_fixed_point() {
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let hooks = ChannelHooks {
            flip_balance_sign: true,
        };
        let ch = build_channels_with_hooks(&p, &frame, 0.8, &SpectralResponse::default(), hooks)
            .unwrap();
        let l = liouvillian(&h, &ch);
        let num = steady_state(&l).unwrap();
        let analytic = dressed_product_state(&p, &model::dressed_frame(&p).unwrap(), 0.8).unwrap();
        assert!(trace_distance(&num, &analytic).unwrap() > 1e-3);
    }

    #[test]
    fn evolve_zero_time_returns_input() {
        let (_, h, ch) = fig2_setup(0.04, 0.1);
        let rho0 = DensityMatrix::new(Operator::identity(4).scale_re(0.25)).unwrap();
        let out = evolve(&rho0, &h, &ch, 0.0, 0.1).unwrap();
        assert!((out.operator() - rho0.operator()).max_abs() == 0.0);
    }

    #[test]
    fn evolve_relaxes_to_the_analytic_steady_state() {
        // moderately mixed angle so the slowest (joint-flip) channel still
        // relaxes within an affordable number of fixed steps
        let p = params(1.0, &[0.04], &[0.3]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let temp = 0.1;
        let ch = build_channels(&p, &frame, temp, &SpectralResponse::default()).unwrap();
        let rho0 = DensityMatrix::new(Operator::identity(4).scale_re(0.25)).unwrap();
        let slowest = ch.iter().map(|c| c.prefactor).fold(f64::INFINITY, f64::min);
        let dt = default_dt(&ch).unwrap();
        let out = evolve(&rho0, &h, &ch, 50.0 / slowest, dt).unwrap();
        let analytic = dressed_product_state(&p, &frame, temp).unwrap();
        let td = trace_distance(&out, &analytic).unwrap();
        assert!(td < 1e-6, "trace distance {td:e}");
    }

    #[test]
    fn evolve_moves_toward_the_steady_state_at_weak_coupling() {
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let temp = 0.1;
        let ch = build_channels(&p, &frame, temp, &SpectralResponse::default()).unwrap();
        let rho0 = DensityMatrix::new(Operator::identity(4).scale_re(0.25)).unwrap();
        let analytic = dressed_product_state(&p, &frame, temp).unwrap();
        let before = trace_distance(&rho0, &analytic).unwrap();
        let dt = default_dt(&ch).unwrap();
        let out = evolve(&rho0, &h, &ch, 200.0 / 1e-3, dt).unwrap();
        let after = trace_distance(&out, &analytic).unwrap();
        assert!(
            after < 0.5 * before,
            "no relaxation: {before:e} -> {after:e}"
        );
    }

    #[test]
    fn unitary_evolution_preserves_spectrum() {
        let p = params(1.0, &[0.04], &[0.04]);
        let h = model::build_hamiltonian(&p);
        let mut op = Operator::zeros(4);
        for (i, v) in [0.4, 0.3, 0.2, 0.1].into_iter().enumerate() {
            op[(i, i)] = Complex::new(v, 0.0);
        }
        // rotate so the state does not commute with H
        let u = model::dressing_unitary(&params(1.0, &[0.04], &[0.3])).unwrap();
        let rho0 = DensityMatrix::new(u.matmul(&op).matmul(&u.dagger())).unwrap();
        let out = evolve(&rho0, &h, &[], 1.0, 0.001).unwrap();
        let (before, _) = crate::qcore::linalg::hermitian_eigen(rho0.operator());
        let (after, _) = crate::qcore::linalg::hermitian_eigen(out.operator());
        for (a, b) in before.iter().zip(after.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn evolve_reports_stiffness_when_coherences_blow_up() {
        // a coherent initial state stepped far beyond the stability limit
        // of the unitary part must abort instead of returning garbage
        let p = params(1.0, &[0.04], &[0.04]);
        let frame = model::dressed_frame(&p).unwrap();
        let h = model::dressed_hamiltonian(&p);
        let ch = build_channels(&p, &frame, 0.1, &SpectralResponse::default()).unwrap();
        let mut op = Operator::identity(4).scale_re(0.25);
        op[(0, 3)] = Complex::new(0.1, 0.0);
        op[(3, 0)] = Complex::new(0.1, 0.0);
        let rho0 = DensityMatrix::new(op).unwrap();
        let out = evolve(&rho0, &h, &ch, 1e5, 10.0);
        assert!(matches!(out, Err(Error::Stiffness(_))), "{out:?}");
    }

    #[test]
    fn evolve_rejects_bad_steps() {
        let (_, h, ch) = fig2_setup(0.04, 0.1);
        let rho0 = DensityMatrix::new(Operator::identity(4).scale_re(0.25)).unwrap();
        assert!(matches!(
            evolve(&rho0, &h, &ch, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evolve(&rho0, &h, &ch, -1.0, 0.1),
            Err(Error::Domain(_))
        ));
    }
}
