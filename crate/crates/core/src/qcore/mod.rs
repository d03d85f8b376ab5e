//! Dense complex operator algebra for small multi-qubit systems.
//!
//! Everything is stored as a row-major `dim x dim` complex matrix. Qubit
//! site 0 is the leftmost tensor factor (most significant index bit);
//! ancillas occupy sites `0..N-1` and the probe sits last, so tracing out
//! all ancillas is a single contiguous partial trace.

pub mod linalg;

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

/// Tolerance bundle for state validation, one knob for the stiff low-T
/// regime. `positivity_tol` is the eigenvalue floor (negative).
#[derive(Debug, Clone, Copy)]
pub struct NumericPolicy<T: Scalar> {
    pub hermiticity_tol: T,
    pub positivity_tol: T,
    pub equality_tol: T,
}

impl<T: Scalar> Default for NumericPolicy<T> {
    fn default() -> Self {
        Self {
            hermiticity_tol: fl(1e-10),
            positivity_tol: fl(-1e-10),
            equality_tol: fl(1e-8),
        }
    }
}

impl<T: Scalar> NumericPolicy<T> {
    /// Entrywise closeness under the policy's equality tolerance.
    pub fn operators_close(&self, a: &Operator<T>, b: &Operator<T>) -> bool {
        a.dim() == b.dim() && (a - b).max_abs() <= self.equality_tol
    }
}

/// Index of a qubit site, ancillas first and probe last.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitIndex {
    site: usize,
    n_qubits: usize,
}

impl QubitIndex {
    pub fn new(site: usize, n_qubits: usize) -> Result<Self> {
        if site >= n_qubits {
            return Err(Error::Index(format!(
                "qubit site {site} out of range for {n_qubits} qubits"
            )));
        }
        Ok(Self { site, n_qubits })
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
}

/// Pauli axis selector, including the ladder combinations
/// `sigma^± = (sigma^x ± i sigma^y)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Scalar> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> Operator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out[(i, i)] = Complex::new(T::one(), T::zero());
        }
        out
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = f(i, j);
            }
        }
        out
    }

    /// Builds a diagonal operator from real entries.
    pub fn diag(values: &[T]) -> Self {
        let mut out = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            out[(i, i)] = Complex::new(v, T::zero());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            t += self[(i, i)];
        }
        t
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian_within(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(A + A^dagger)/2`.
    pub fn hermitize(&self) -> Self {
        let half = fl::<T>(0.5);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()).scale(half);
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operator dimensions must agree");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &rhs.entries[k * n..(k + 1) * n];
                let orow = &mut out.entries[i * n..(i + 1) * n];
                for j in 0..n {
                    orow[j] += a * row[j];
                }
            }
        }
        out
    }

    /// Kronecker product `self (x) rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Matrix applied to a vector.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        self.entries
            .chunks_exact(n)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                        acc + *a * *b
                    })
            })
            .collect()
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Operator<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i * self.dim + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Operator<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[i * self.dim + j]
    }
}

impl<T: Scalar> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        self.matmul(rhs)
    }
}

impl<T: Scalar> Neg for &Operator<T> {
    type Output = Operator<T>;
    fn neg(self) -> Operator<T> {
        self.scale_re(-T::one())
    }
}

/// Density matrix with validated Hermiticity, unit trace and positivity.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Scalar> {
    op: Operator<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates against the default [`NumericPolicy`].
    pub fn new(op: Operator<T>) -> Result<Self> {
        Self::with_policy(op, &NumericPolicy::default())
    }

    pub fn with_policy(op: Operator<T>, policy: &NumericPolicy<T>) -> Result<Self> {
        if !op.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let h = op.hermiticity_defect();
        if h > policy.hermiticity_tol {
            return Err(Error::InvalidState(format!(
                "hermiticity defect {h:e} exceeds tolerance"
            )));
        }
        let tr = op.trace();
        if (tr.re - T::one()).abs() > policy.hermiticity_tol || tr.im.abs() > policy.hermiticity_tol
        {
            return Err(Error::InvalidState(format!("trace {:?} is not 1", tr)));
        }
        let herm = op.hermitize();
        let (evals, _) = linalg::hermitian_eigen(&herm);
        if let Some(min) = evals.first() {
            if *min < policy.positivity_tol {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {:e}",
                    *min
                )));
            }
        }
        Ok(Self { op })
    }

    /// Wraps without validation; for internal use where the contract is
    /// guaranteed by construction.
    pub(crate) fn trusted(op: Operator<T>) -> Self {
        Self { op }
    }

    pub fn operator(&self) -> &Operator<T> {
        &self.op
    }

    pub fn into_operator(self) -> Operator<T> {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(fl(re), fl(im))
}

/// 2x2 Pauli matrix for one axis, with `sigma^z = diag(1, -1)` and the
/// excited state first.
pub fn pauli_2x2<T: Scalar>(axis: PauliAxis) -> Operator<T> {
    let mut m = Operator::zeros(2);
    match axis {
        PauliAxis::X => {
            m[(0, 1)] = c(1.0, 0.0);
            m[(1, 0)] = c(1.0, 0.0);
        }
        PauliAxis::Y => {
            m[(0, 1)] = c(0.0, -1.0);
            m[(1, 0)] = c(0.0, 1.0);
        }
        PauliAxis::Z => {
            m[(0, 0)] = c(1.0, 0.0);
            m[(1, 1)] = c(-1.0, 0.0);
        }
        PauliAxis::Plus => {
            m[(0, 1)] = c(1.0, 0.0);
        }
        PauliAxis::Minus => {
            m[(1, 0)] = c(1.0, 0.0);
        }
    }
    m
}

/// Pauli operator embedded at `site` of an `n_qubits` register:
/// `I (x) ... (x) sigma^axis (x) ... (x) I`.
pub fn pauli<T: Scalar>(axis: PauliAxis, site: usize, n_qubits: usize) -> Result<Operator<T>> {
    if n_qubits == 0 {
        return Err(Error::Argument("n_qubits must be at least 1".into()));
    }
    let q = QubitIndex::new(site, n_qubits)?;
    let left = Operator::identity(1 << q.site());
    let right = Operator::identity(1 << (n_qubits - 1 - q.site()));
    Ok(left.kron(&pauli_2x2(axis)).kron(&right))
}

/// Kronecker product of the factors in list order.
pub fn tensor<T: Scalar>(factors: &[Operator<T>]) -> Result<Operator<T>> {
    let first = factors
        .first()
        .ok_or_else(|| Error::Argument("tensor of an empty factor list".into()))?;
    let mut acc = first.clone();
    for f in &factors[1..] {
        acc = acc.kron(f);
    }
    Ok(acc)
}

/// Reduced density matrix over the kept subsystems (in their original
/// order). `dims` lists every subsystem dimension; their product must
/// match the state dimension.
pub fn partial_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<DensityMatrix<T>> {
    let reduced = partial_trace_op(rho.operator(), dims, keep)?;
    Ok(DensityMatrix::trusted(reduced))
}

/// [`partial_trace`] on a raw operator; used for oracle pipelines where
/// intermediate matrices are not certified density matrices.
pub fn partial_trace_op<T: Scalar>(
    rho: &Operator<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<Operator<T>> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Shape(format!(
            "subsystem dims multiply to {total} but the state has dim {}",
            rho.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::Argument("keep set is empty".into()));
    }
    let mut keep = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if *keep.last().unwrap() >= dims.len() {
        return Err(Error::Index(format!(
            "keep index {} out of range for {} subsystems",
            keep.last().unwrap(),
            dims.len()
        )));
    }

    let k = dims.len();
    // Strides of each subsystem in the flattened index.
    let mut strides = vec![1usize; k];
    for i in (0..k - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kept_dim: usize = keep.iter().map(|&s| dims[s]).product();
    let traced: Vec<usize> = (0..k).filter(|s| !keep.contains(s)).collect();
    let traced_dim: usize = traced.iter().map(|&s| dims[s]).product();

    // Flattened index of a (kept multi-index, traced multi-index) pair.
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut rem_k = kept_idx;
        let mut rem_t = traced_idx;
        let mut full = 0usize;
        for &s in keep.iter().rev() {
            let d = dims[s];
            full += (rem_k % d) * strides[s];
            rem_k /= d;
        }
        for &s in traced.iter().rev() {
            let d = dims[s];
            full += (rem_t % d) * strides[s];
            rem_t /= d;
        }
        full
    };

    let mut out = Operator::zeros(kept_dim);
    for i in 0..kept_dim {
        for j in 0..kept_dim {
            let mut acc = Complex::new(T::zero(), T::zero());
            for t in 0..traced_dim {
                let row = compose(i, t);
                let col = compose(j, t);
                acc += rho[(row, col)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Thermal state `exp(-H/T)/Z` through the Hermitian eigendecomposition,
/// with the ground energy subtracted before exponentiating so low
/// temperatures cannot overflow.
pub fn gibbs_state<T: Scalar>(h: &Operator<T>, temperature: T) -> Result<DensityMatrix<T>> {
    if temperature <= T::zero() {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let scale = h.max_abs().max(T::one());
    if !h.is_hermitian_within(fl::<T>(1e-10) * scale) {
        return Err(Error::Argument("Hamiltonian is not Hermitian".into()));
    }
    let (evals, vecs) = linalg::hermitian_eigen(&h.hermitize());
    let e0 = evals[0];
    let weights: Vec<T> = evals
        .iter()
        .map(|&e| (-(e - e0) / temperature).exp())
        .collect();
    let z: T = weights.iter().copied().sum();
    let n = h.dim();
    // rho = V diag(w/Z) V^dagger
    let mut rho = Operator::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                acc += vecs[(i, k)] * vecs[(j, k)].conj().scale(weights[k] / z);
            }
            rho[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::trusted(rho.hermitize()))
}

/// Trace distance `(1/2) sum of singular values of (rho - sigma)`.
pub fn trace_distance<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "dims {} and {} differ",
            rho.dim(),
            sigma.dim()
        )));
    }
    trace_distance_op(rho.operator(), sigma.operator())
}

pub fn trace_distance_op<T: Scalar>(rho: &Operator<T>, sigma: &Operator<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "dims {} and {} differ",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = (rho - sigma).hermitize();
    let (evals, _) = linalg::hermitian_eigen(&diff);
    let total: T = evals.iter().map(|e| e.abs()).sum();
    Ok(total * fl(0.5))
}
