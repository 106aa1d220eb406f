//! Dense complex linear algebra for small qudit registers.
//!
//! Everything here is plain `Vec`-backed row-major storage with
//! double-precision complex entries. Register dimensions in this crate top out
//! at a few hundred, so O(n³) dense algorithms (naive matmul, cyclic Jacobi
//! eigensolver) are fast enough and keep the crate free of BLAS/LAPACK
//! bindings, which also keeps it compilable for wasm targets.

use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Result, SimError};

/// Hard cap on register dimension; `kron`/`embed` refuse to grow past this.
pub const MAX_REGISTER_DIM: usize = 4096;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dims must be >= 1");
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Build from nested real rows (convenience for operator tables in tests).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = entries[i];
        }
        m
    }

    /// Column vector from amplitudes.
    pub fn col_vec(amps: &[C64]) -> Self {
        let mut m = Self::zeros(amps.len(), 1);
        m.data.copy_from_slice(amps);
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.conj();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= z;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral 2-norm via the largest eigenvalue of M†M.
    pub fn norm2(&self) -> f64 {
        let g = self.adjoint().matmul(self);
        let (evals, _) = g.eigh();
        evals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// max |A − A†| over entries.
    pub fn hermiticity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// max |U†U − I| over entries.
    pub fn unitarity_deviation(&self) -> f64 {
        debug_assert!(self.is_square());
        let g = self.adjoint().matmul(self);
        let n = g.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                dev = dev.max((g.get(i, j) - expect).norm());
            }
        }
        dev
    }

    /// Naive matmul, ikj loop order for contiguous inner access.
    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        let oc = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * oc..(i + 1) * oc];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * oc..(k + 1) * oc];
                for (o, b) in out_row.iter_mut().zip(b_row.iter()) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// Kronecker product; refuses to exceed [`MAX_REGISTER_DIM`].
    pub fn kron(&self, other: &CMat) -> Result<CMat> {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        if r > MAX_REGISTER_DIM || c > MAX_REGISTER_DIM {
            return Err(SimError::RegisterTooLarge { dim: r.max(c), cap: MAX_REGISTER_DIM });
        }
        let mut out = CMat::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for p in 0..other.rows {
                    let dst = (i * other.rows + p) * c + j * other.cols;
                    let src = p * other.cols;
                    for q in 0..other.cols {
                        out.data[dst + q] = a * other.data[src + q];
                    }
                }
            }
        }
        Ok(out)
    }

    /// List of nonzero entries as (row, col, value); used by sparse-aware kernels.
    pub fn nonzeros(&self, tol: f64) -> Vec<(usize, usize, C64)> {
        let mut nz = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if v.norm() > tol {
                    nz.push((i, j, v));
                }
            }
        }
        nz
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
    ///
    /// Returns eigenvalues ascending and the unitary of eigenvectors as
    /// columns. The input is symmetrised first, so deviations up to roundoff
    /// are tolerated; callers validate Hermiticity at their own thresholds.
    pub fn eigh(&self) -> (Vec<f64>, CMat) {
        assert!(self.is_square(), "eigh expects a square matrix");
        let n = self.rows;
        // Work on (A + A†)/2 so roundoff in the input cannot break the sweep.
        let mut a = CMat::from_fn(n, n, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        let mut v = CMat::identity(n);
        let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
        let tol = 1e-15 * scale;

        for _sweep in 0..60 {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a.get(p, q).norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    let m = apq.norm();
                    if m <= tol * 1e-2 {
                        continue;
                    }
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    // Phase factor turning the 2x2 block real, then a real
                    // Jacobi rotation annihilating the off-diagonal entry.
                    let phase = apq / m; // e^{i φ}
                    let theta = (aqq - app) / (2.0 * m);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // J = [[c, s],[−s e^{−iφ}, c e^{−iφ}]] acting on (p, q).
                    let jqp = -phase.conj() * s;
                    let jqq = phase.conj() * c;
                    // Columns: A ← A J, V ← V J.
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, akp * c + akq * jqp);
                        a.set(k, q, akp * s + akq * jqq);
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, vkp * c + vkq * jqp);
                        v.set(k, q, vkp * s + vkq * jqq);
                    }
                    // Rows: A ← J† A.
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, apk * c + aqk * jqp.conj());
                        a.set(q, k, apk * s + aqk * jqq.conj());
                    }
                    // Pin the annihilated pair and keep the diagonal real.
                    let dpp = a.get(p, p).re;
                    let dqq = a.get(q, q).re;
                    a.set(p, p, C64::new(dpp, 0.0));
                    a.set(q, q, C64::new(dqq, 0.0));
                    a.set(p, q, C64::new(0.0, 0.0));
                    a.set(q, p, C64::new(0.0, 0.0));
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
        let evals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let vecs = CMat::from_fn(n, n, |i, j| v.get(i, order[j]));
        (evals, vecs)
    }

    /// Eigendecomposition of a unitary (normal) matrix.
    ///
    /// Diagonalises the Hermitian part, then splits any degenerate cos-phase
    /// clusters with the anti-Hermitian part projected into the cluster. The
    /// two commute for a normal input, so the combined basis diagonalises U.
    /// Eigenvalues are returned as Rayleigh quotients v†Uv.
    pub fn eig_unitary(&self) -> (Vec<C64>, CMat) {
        assert!(self.is_square(), "eig_unitary expects a square matrix");
        let n = self.rows;
        let udag = self.adjoint();
        let a = CMat::from_fn(n, n, |i, j| (self.get(i, j) + udag.get(i, j)) * 0.5);
        let b = CMat::from_fn(n, n, |i, j| {
            (self.get(i, j) - udag.get(i, j)) * C64::new(0.0, -0.5)
        });
        let (avals, mut v) = a.eigh();

        const CLUSTER_TOL: f64 = 1e-7;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (avals[end] - avals[end - 1]).abs() < CLUSTER_TOL {
                end += 1;
            }
            let size = end - start;
            if size > 1 {
                // Project B into the cluster's eigenspace and rediagonalise.
                let cols: Vec<Vec<C64>> = (start..end).map(|j| v.column(j)).collect();
                let mut bsub = CMat::zeros(size, size);
                for (ci, vi) in cols.iter().enumerate() {
                    let bvj: Vec<Vec<C64>> = cols.iter().map(|vj| b.matvec(vj)).collect();
                    for (cj, bv) in bvj.iter().enumerate() {
                        let dot: C64 = vi.iter().zip(bv).map(|(x, y)| x.conj() * y).sum();
                        bsub.set(ci, cj, dot);
                    }
                }
                let (_, w) = bsub.eigh();
                for i in 0..n {
                    let mut newrow = vec![C64::new(0.0, 0.0); size];
                    for (cj, item) in newrow.iter_mut().enumerate() {
                        for ck in 0..size {
                            *item += cols[ck][i] * w.get(ck, cj);
                        }
                    }
                    for (cj, item) in newrow.iter().enumerate() {
                        v.set(i, start + cj, *item);
                    }
                }
            }
            start = end;
        }

        let mut evals = Vec::with_capacity(n);
        for j in 0..n {
            let col = v.column(j);
            let uv = self.matvec(&col);
            let lam: C64 = col.iter().zip(&uv).map(|(x, y)| x.conj() * y).sum();
            evals.push(lam);
        }
        (evals, v)
    }

    /// exp(z·H) for Hermitian H, via eigendecomposition.
    pub fn expm_hermitian(&self, z: C64) -> CMat {
        let (evals, v) = self.eigh();
        let n = self.rows;
        let phases: Vec<C64> = evals.iter().map(|&e| (z * e).exp()).collect();
        // V diag(e^{zλ}) V†
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v.get(i, k) * phases[k] * v.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Commutator [A, B] = AB − BA.
    pub fn commutator(&self, other: &CMat) -> CMat {
        &self.matmul(other) - &other.matmul(self)
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
        out
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
        out
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

/// Complex inner product ⟨a|b⟩ with conjugation on the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
