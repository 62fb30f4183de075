//! Dense complex linear algebra at statevector scale.
//!
//! Everything here is double precision and deliberately simple: column-major
//! dense storage, classical Gram-Schmidt with reorthogonalization for building
//! random unitaries, and a cyclic Jacobi eigensolver for Hermitian matrices
//! (used to diagonalize normal operators and to get largest singular values).

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::par;

/// Dense complex matrix, column-major.
#[derive(Debug, Clone)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.rows + i] = v;
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for (k, &xk) in x.iter().enumerate() {
            if xk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.col(k);
            for (yi, &a) in y.iter_mut().zip(col) {
                *yi += a * xk;
            }
        }
        y
    }

    /// y = A^H x.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols)
            .map(|k| dot(self.col(k), x))
            .collect()
    }

    /// Max absolute deviation of A^H A from the identity.
    pub fn gram_identity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.cols {
            for j in i..self.cols {
                let g = dot(self.col(i), self.col(j));
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (g - Complex64::new(target, 0.0)).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }
}

/// Conjugate-linear in the first argument: sum conj(a_i) b_i.
#[inline]
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

#[inline]
pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn scale(a: &mut [Complex64], s: f64) {
    for z in a.iter_mut() {
        *z *= s;
    }
}

/// Seeded complex Gaussian matrix, QR-orthonormalized into a unitary.
///
/// Classical Gram-Schmidt run twice per column; the second pass pushes the
/// Gram deviation down to machine precision.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    for z in m.data.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex64::new(re, im);
    }
    orthonormalize_columns(&mut m);
    m
}

pub fn orthonormalize_columns(m: &mut CMatrix) {
    let rows = m.rows;
    for j in 0..m.cols {
        for _pass in 0..2 {
            for i in 0..j {
                let (head, tail) = m.data.split_at_mut(j * rows);
                let vi = &head[i * rows..(i + 1) * rows];
                let vj = &mut tail[..rows];
                let c = dot(vi, vj);
                for (vj_r, &vi_r) in vj.iter_mut().zip(vi) {
                    *vj_r -= c * vi_r;
                }
            }
        }
        let nrm = norm_sqr(m.col(j)).sqrt();
        assert!(nrm > 1e-12, "rank-deficient matrix in orthonormalization");
        scale(m.col_mut(j), 1.0 / nrm);
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, eigenvectors); column k of the returned matrix is the
/// eigenvector for eigenvalue k. Unsorted.
pub fn jacobi_hermitian(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    // row-major working copy
    let mut w: Vec<Complex64> = (0..n * n)
        .map(|idx| a.get(idx / n, idx % n))
        .collect();
    let mut v = CMatrix::identity(n);

    let off = |w: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += w[i * n + j].norm_sqr();
            }
        }
        s
    };

    let scale_ref = norm_sqr(&a.data).max(1e-300);
    for _sweep in 0..60 {
        if off(&w) <= 1e-28 * scale_ref {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[p * n + q];
                let m = apq.norm();
                if m < 1e-300 {
                    continue;
                }
                let f = apq / m; // e^{i phi}
                let app = w[p * n + p].re;
                let aqq = w[q * n + q].re;
                let tau = (aqq - app) / (2.0 * m);
                let r = (tau * tau + 1.0).sqrt();
                let t = if tau >= 0.0 { tau - r } else { tau + r };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // columns of the plane rotation: u1 = c e_p + s conj(f) e_q,
                // u2 = -s f e_p + c e_q
                let sf = s * f;
                let sfc = s * f.conj();
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = w[j * n + p];
                    let ajq = w[j * n + q];
                    let njp = c * ajp + sfc * ajq;
                    let njq = -sf * ajp + c * ajq;
                    w[j * n + p] = njp;
                    w[j * n + q] = njq;
                    w[p * n + j] = njp.conj();
                    w[q * n + j] = njq.conj();
                }
                let napp = app * c * c + 2.0 * m * s * c + aqq * s * s;
                let naqq = app * s * s - 2.0 * m * s * c + aqq * c * c;
                w[p * n + p] = Complex64::new(napp, 0.0);
                w[q * n + q] = Complex64::new(naqq, 0.0);
                w[p * n + q] = Complex64::new(0.0, 0.0);
                w[q * n + p] = Complex64::new(0.0, 0.0);
                // accumulate eigenvectors: V <- V U
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip + sfc * viq);
                    v.set(i, q, -sf * vip + c * viq);
                }
            }
        }
    }

    let vals = (0..n).map(|i| w[i * n + i].re).collect();
    (vals, v)
}

/// Largest singular value of a dense (possibly rectangular) matrix, via the
/// Hermitian eigenproblem of A^H A.
pub fn largest_singular_value(a: &CMatrix) -> f64 {
    let n = a.cols;
    let mut g = CMatrix::zeros(n, n);
    let cols: Vec<usize> = (0..n).collect();
    // Gram matrix; each entry is an independent sequential dot.
    let entries: Vec<(usize, usize, Complex64)> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            cols.par_iter()
                .flat_map_iter(|&i| (i..n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, dot(a.col(i), a.col(j))))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            cols.iter()
                .flat_map(|&i| (i..n).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, dot(a.col(i), a.col(j))))
                .collect()
        }
    };
    for (i, j, v) in entries {
        g.set(i, j, v);
        g.set(j, i, v.conj());
    }
    let (vals, _) = jacobi_hermitian(&g);
    vals.into_iter().fold(0.0f64, f64::max).max(0.0).sqrt()
}

/// out[m, 0..anc] = sum_k basis[:, k][m] * composite[k, 0..anc]
///
/// Maps a (num_cols x anc) coefficient array through the column basis; this is
/// the change of representation from eigen coordinates back to the
/// computational basis for a composite register.
pub fn basis_expand_composite(basis: &CMatrix, composite: &[Complex64], anc: usize) -> Vec<Complex64> {
    assert_eq!(composite.len(), basis.cols * anc);
    let rows = basis.rows;
    let mut out = vec![Complex64::new(0.0, 0.0); rows * anc];
    par::fill_rows(&mut out, anc, |m, out_row| {
        for k in 0..basis.cols {
            let coef = basis.col(k)[m];
            if coef == Complex64::new(0.0, 0.0) {
                continue;
            }
            let src = &composite[k * anc..(k + 1) * anc];
            for (o, &s) in out_row.iter_mut().zip(src) {
                *o += coef * s;
            }
        }
    });
    out
}

/// composite[k, 0..anc] = sum_m conj(basis[:, k][m]) state[m, 0..anc]
pub fn basis_project_composite(basis: &CMatrix, state: &[Complex64], anc: usize) -> Vec<Complex64> {
    assert_eq!(state.len(), basis.rows * anc);
    let rows = basis.rows;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.cols * anc];
    par::fill_rows(&mut out, anc, |k, out_row| {
        let col = basis.col(k);
        for m in 0..rows {
            let coef = col[m].conj();
            let src = &state[m * anc..(m + 1) * anc];
            for (o, &s) in out_row.iter_mut().zip(src) {
                *o += coef * s;
            }
        }
    });
    out
}
