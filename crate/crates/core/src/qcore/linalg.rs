//! Dense eigensolvers and linear solves for small systems.
//!
//! Hermitian problems go through Householder tridiagonalization plus
//! implicit-shift QL. Complex Hermitian matrices are handled through the
//! standard real 2n x 2n embedding `[[X, -Y], [Y, X]]`, which reuses the
//! real symmetric path; matrices that are numerically real skip the
//! embedding. General (non-normal) spectra, needed for Liouvillians, use
//! Hessenberg reduction followed by explicitly shifted QR with Wilkinson
//! shifts. Null vectors come from LU-based inverse iteration.

use num_complex::Complex;

use super::Operator;
use crate::error::{Error, Result};
use crate::scalar::{fl, Scalar};

/// Householder reduction of a real symmetric matrix to tridiagonal form,
/// accumulating the orthogonal transform in place of `a`.
fn tred2<T: Scalar>(a: &mut [T], n: usize, d: &mut [T], e: &mut [T]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        let mut scale = T::zero();
        if l > 0 {
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == T::zero() {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = T::zero();
                for j in 0..=l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g_acc = T::zero();
                    for k in 0..=j {
                        g_acc += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g_acc += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..i {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = T::one();
        for j in 0..i {
            a[j * n + i] = T::zero();
            a[i * n + j] = T::zero();
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, rotating the
/// columns of `z` along. `d` holds the diagonal, `e` the subdiagonal in
/// `e[1..]` on entry.
fn tql2<T: Scalar>(d: &mut [T], e: &mut [T], n: usize, z: &mut [T]) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = fl::<T>(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NumericalFailure(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let denom = g + if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / denom;
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut early = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigendecomposition of a real symmetric matrix (row-major `n x n`).
/// Returns eigenvalues ascending and the matching eigenvector columns.
fn sym_eigen_real<T: Scalar>(mat: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut a = mat.to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    if n == 1 {
        return (vec![mat[0]], vec![T::one()]);
    }
    tred2(&mut a, n, &mut d, &mut e);
    tql2(&mut d, &mut e, n, &mut a).expect("QL convergence");
    // sort ascending, permuting columns
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let mut evals = Vec::with_capacity(n);
    let mut vecs = vec![T::zero(); n * n];
    for (col, &src) in order.iter().enumerate() {
        evals.push(d[src]);
        for row in 0..n {
            vecs[row * n + col] = a[row * n + src];
        }
    }
    (evals, vecs)
}

/// Eigendecomposition of a Hermitian operator.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are
/// the eigenvectors. The input is assumed Hermitian; only its Hermitian
/// part is meaningful.
pub fn hermitian_eigen<T: Scalar>(a: &Operator<T>) -> (Vec<T>, Operator<T>) {
    let n = a.dim();
    if n == 0 {
        return (Vec::new(), Operator::zeros(0));
    }
    let imag_norm = a
        .entries()
        .iter()
        .map(|z| z.im.abs())
        .fold(T::zero(), T::max);
    if imag_norm == T::zero() {
        // real symmetric fast path
        let mat: Vec<T> = a.entries().iter().map(|z| z.re).collect();
        let (evals, vecs) = sym_eigen_real(&mat, n);
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = Complex::new(vecs[i * n + j], T::zero());
            }
        }
        return (evals, out);
    }

    // Real embedding [[X, -Y], [Y, X]] of A = X + iY doubles every
    // eigenvalue; each complex eigenvector appears as two real ones.
    let m = 2 * n;
    let mut big = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            big[i * m + j] = z.re;
            big[i * m + (n + j)] = -z.im;
            big[(n + i) * m + j] = z.im;
            big[(n + i) * m + (n + j)] = z.re;
        }
    }
    let (evals2, vecs2) = sym_eigen_real(&big, m);

    let scale = a.max_abs().max(T::one());
    let cluster_tol = T::epsilon() * scale * fl::<T>(64.0) * fl::<T>(m as f64);

    let mut accepted: Vec<(T, Vec<Complex<T>>)> = Vec::with_capacity(n);
    let mut idx = 0usize;
    while idx < m {
        // cluster of (numerically) equal eigenvalues
        let mut hi = idx + 1;
        while hi < m && (evals2[hi] - evals2[hi - 1]).abs() <= cluster_tol {
            hi += 1;
        }
        let count = hi - idx;
        let want = count / 2;
        // complex candidates x + i y from the real eigenvectors
        let mut cands: Vec<Vec<Complex<T>>> = (idx..hi)
            .map(|col| {
                (0..n)
                    .map(|row| Complex::new(vecs2[row * m + col], vecs2[(n + row) * m + col]))
                    .collect()
            })
            .collect();
        let mut taken = 0usize;
        let mut local: Vec<Vec<Complex<T>>> = Vec::with_capacity(want);
        while taken < want {
            // orthogonalize every candidate against the accepted local set
            // and greedily keep the largest residual
            let mut best: Option<(usize, T)> = None;
            for (ci, cand) in cands.iter().enumerate() {
                let mut v = cand.clone();
                for acc in &local {
                    let mut overlap = Complex::new(T::zero(), T::zero());
                    for (va, vb) in acc.iter().zip(v.iter()) {
                        overlap += va.conj() * *vb;
                    }
                    for (va, vb) in acc.iter().zip(v.iter_mut()) {
                        *vb -= *va * overlap;
                    }
                }
                let norm: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
                if best.as_ref().is_none_or(|&(_, bn)| norm > bn) {
                    best = Some((ci, norm));
                }
            }
            let (ci, norm) = best.expect("non-empty candidate set");
            if norm < fl::<T>(1e-8) {
                // cannot happen for a well-posed embedding; bail out loudly
                panic!("degenerate eigenvector extraction stalled");
            }
            let mut v = cands.swap_remove(ci);
            for acc in &local {
                let mut overlap = Complex::new(T::zero(), T::zero());
                for (va, vb) in acc.iter().zip(v.iter()) {
                    overlap += va.conj() * *vb;
                }
                for (va, vb) in acc.iter().zip(v.iter_mut()) {
                    *vb -= *va * overlap;
                }
            }
            let norm: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
            for z in v.iter_mut() {
                *z = z.unscale(norm);
            }
            local.push(v);
            taken += 1;
        }
        let mean = evals2[idx..hi].iter().copied().sum::<T>() / fl::<T>(count as f64);
        for v in local {
            accepted.push((mean, v));
        }
        idx = hi;
    }
    debug_assert_eq!(accepted.len(), n);

    let mut evals = Vec::with_capacity(n);
    let mut out = Operator::zeros(n);
    for (col, (lam, v)) in accepted.into_iter().enumerate() {
        evals.push(lam);
        for (row, z) in v.into_iter().enumerate() {
            out[(row, col)] = z;
        }
    }
    (evals, out)
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` (c real) such
/// that `G * (a, b)^T` has zero second entry.
fn givens<T: Scalar>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let nb = b.norm();
    if nb == T::zero() {
        return (T::one(), Complex::new(T::zero(), T::zero()));
    }
    if na == T::zero() {
        return (T::zero(), Complex::new(T::one(), T::zero()));
    }
    let r = na.hypot(nb);
    let c = na / r;
    let s = a.unscale(na) * b.conj().unscale(r);
    (c, s)
}

/// Reduces a copy of `a` to upper Hessenberg form in place using complex
/// Householder reflectors.
fn hessenberg<T: Scalar>(h: &mut Operator<T>) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut norm_sq = T::zero();
        for i in k + 1..n {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0.unscale(x0.norm())
        };
        let alpha = -phase.scale(norm);
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vns: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vns == T::zero() {
            continue;
        }
        let beta = fl::<T>(2.0) / vns;
        // left: rows k+1.. of all columns
        for j in 0..n {
            let mut dot = Complex::new(T::zero(), T::zero());
            for (vi, i) in (k + 1..n).enumerate() {
                dot += v[vi].conj() * h[(i, j)];
            }
            let f = dot.scale(beta);
            for (vi, i) in (k + 1..n).enumerate() {
                let upd = v[vi] * f;
                h[(i, j)] -= upd;
            }
        }
        // right: columns k+1.. of all rows
        for i in 0..n {
            let mut dot = Complex::new(T::zero(), T::zero());
            for (vj, j) in (k + 1..n).enumerate() {
                dot += h[(i, j)] * v[vj];
            }
            let f = dot.scale(beta);
            for (vj, j) in (k + 1..n).enumerate() {
                let upd = f * v[vj].conj();
                h[(i, j)] -= upd;
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex::new(T::zero(), T::zero());
        }
    }
}

/// All eigenvalues of a general complex matrix via shifted QR on the
/// Hessenberg form. Intended for the modest dimensions of vectorized
/// Liouvillians.
pub fn complex_eigenvalues<T: Scalar>(a: &Operator<T>) -> Result<Vec<Complex<T>>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let scale = h.max_abs().max(T::one());
    let eps = T::epsilon();
    let mut evals = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut total_iter = 0usize;
    let max_iter = 80 * n;
    loop {
        // deflate trailing 1x1 blocks
        loop {
            if hi == 0 {
                evals.push(h[(0, 0)]);
                let mut sorted = evals;
                sorted.sort_by(|a: &Complex<T>, b: &Complex<T>| {
                    a.norm().partial_cmp(&b.norm()).unwrap()
                });
                return Ok(sorted);
            }
            let sub = h[(hi, hi - 1)].norm();
            let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            if sub <= eps * local.max(scale * fl(1e-3)) * fl::<T>(4.0) {
                evals.push(h[(hi, hi)]);
                hi -= 1;
            } else {
                break;
            }
        }
        // active block [lo..=hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= eps * local.max(scale * fl(1e-3)) * fl::<T>(4.0) {
                h[(lo, lo - 1)] = Complex::new(T::zero(), T::zero());
                break;
            }
            lo -= 1;
        }
        total_iter += 1;
        if total_iter > max_iter {
            return Err(Error::NumericalFailure(
                "QR eigenvalue iteration did not converge".into(),
            ));
        }
        // Wilkinson shift from the trailing 2x2 of the active block
        let aa = h[(hi - 1, hi - 1)];
        let bb = h[(hi - 1, hi)];
        let cc = h[(hi, hi - 1)];
        let dd = h[(hi, hi)];
        let shift = if total_iter.is_multiple_of(17) {
            // rare exceptional shift to break symmetric stalls
            dd + Complex::new(cc.norm(), T::zero())
        } else {
            let tr = aa + dd;
            let det = aa * dd - bb * cc;
            let half = fl::<T>(0.5);
            let disc = (tr * tr - det.scale(fl::<T>(4.0))).sqrt();
            let mu1 = (tr + disc).scale(half);
            let mu2 = (tr - disc).scale(half);
            if (mu1 - dd).norm() <= (mu2 - dd).norm() {
                mu1
            } else {
                mu2
            }
        };
        // explicit shifted QR sweep on the active block
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            // rows i, i+1 over columns i..=hi
            for j in i..=hi {
                let hi_j = h[(i, j)];
                let hj = h[(i + 1, j)];
                h[(i, j)] = hi_j.scale(c) + s * hj;
                h[(i + 1, j)] = hj.scale(c) - s.conj() * hi_j;
            }
            rots.push((c, s));
        }
        for (offset, (c, s)) in rots.iter().enumerate() {
            let i = lo + offset;
            // columns i, i+1 over rows lo..=min(i+1, hi)
            for r in lo..=(i + 1).min(hi) {
                let ci = h[(r, i)];
                let cj = h[(r, i + 1)];
                h[(r, i)] = ci.scale(*c) + cj * s.conj();
                h[(r, i + 1)] = cj.scale(*c) - ci * *s;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
}

/// LU decomposition with partial pivoting. Pivots smaller than
/// `pivot_floor` are replaced by it, which turns a singular solve into a
/// strongly amplifying one — exactly what inverse iteration wants.
pub struct Lu<T: Scalar> {
    lu: Operator<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn decompose(a: &Operator<T>, pivot_floor: T) -> Self {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_mag = lu[(k, k)].norm();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(best, j)];
                    lu[(best, j)] = tmp;
                }
                perm.swap(k, best);
            }
            if lu[(k, k)].norm() < pivot_floor {
                lu[(k, k)] = Complex::new(pivot_floor, T::zero());
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.norm() == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let upd = factor * lu[(k, j)];
                    lu[(i, j)] -= upd;
                }
            }
        }
        Self { lu, perm }
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<Complex<T>> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            for j in 0..i {
                let upd = self.lu[(i, j)] * y[j];
                y[i] -= upd;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let upd = self.lu[(i, j)] * y[j];
                y[i] -= upd;
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Unit-norm vector minimizing `|A x|` through inverse iteration from
/// `start`. The start vector must not be orthogonal to the null space.
pub fn null_vector<T: Scalar>(
    a: &Operator<T>,
    start: &[Complex<T>],
    iterations: usize,
) -> Vec<Complex<T>> {
    let n = a.dim();
    assert_eq!(start.len(), n);
    let scale = a.max_abs().max(T::epsilon());
    let floor = scale * T::epsilon() * fl::<T>(1e-4);
    let lu = Lu::decompose(a, floor);
    let mut x = start.to_vec();
    for _ in 0..iterations.max(1) {
        let mut y = lu.solve(&x);
        let norm: T = y.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !norm.is_finite() || norm == T::zero() {
            break;
        }
        for z in y.iter_mut() {
            *z = z.unscale(norm);
        }
        x = y;
    }
    x
}
