//! Fixed-size dense complex matrices and the handful of factorizations the
//! solvers need: LU with partial pivoting, one-sided Jacobi singular values,
//! and the closed-form spectrum of a 3×3 Hermitian matrix.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::{czero, re, Real, C};

/// Dense `N × N` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T, const N: usize> {
    pub data: [[C<T>; N]; N],
}

/// Vector of `N` complex entries.
pub type CVec<T, const N: usize> = [C<T>; N];

impl<T: Real, const N: usize> CMat<T, N> {
    pub fn zeros() -> Self {
        Self { data: [[czero(); N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = re(T::one());
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        (0..N).fold(czero(), |acc, i| acc + self.data[i][i])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.data[j][i].conj())
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::from_fn(|i, j| self.data[i][j] * k)
    }

    pub fn mul_vec(&self, v: &CVec<T, N>) -> CVec<T, N> {
        let mut out = [czero(); N];
        for (i, row) in self.data.iter().enumerate() {
            out[i] = row.iter().zip(v).fold(czero(), |acc, (a, b)| acc + *a * *b);
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .flatten()
            .fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot vanishes exactly.
    pub fn solve(&self, b: &CVec<T, N>) -> Option<CVec<T, N>> {
        let mut a = self.data;
        let mut x = *b;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&r, &s| {
                    a[r][col]
                        .norm()
                        .partial_cmp(&a[s][col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot][col].norm() == T::zero() {
                return None;
            }
            a.swap(col, pivot);
            x.swap(col, pivot);
            let inv = a[col][col].inv();
            for r in col + 1..N {
                let factor = a[r][col] * inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..N {
                    let delta = factor * a[col][c];
                    a[r][c] = a[r][c] - delta;
                }
                let delta = factor * x[col];
                x[r] = x[r] - delta;
            }
        }
        for col in (0..N).rev() {
            let mut acc = x[col];
            for c in col + 1..N {
                acc = acc - a[col][c] * x[c];
            }
            x[col] = acc / a[col][col];
        }
        Some(x)
    }

    /// Singular values in descending order (one-sided Jacobi on the columns).
    pub fn singular_values(&self) -> [T; N] {
        // columns[j][i] = A[i][j]
        let mut cols = [[czero::<T>(); N]; N];
        for (i, row) in self.data.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                cols[j][i] = *z;
            }
        }
        let eps = T::epsilon();
        for _sweep in 0..60 {
            let mut rotated = false;
            for p in 0..N {
                for q in p + 1..N {
                    let alpha: T = cols[p].iter().map(|z| z.norm_sqr()).sum();
                    let beta: T = cols[q].iter().map(|z| z.norm_sqr()).sum();
                    let gamma = cols[p]
                        .iter()
                        .zip(&cols[q])
                        .fold(czero::<T>(), |acc, (a, b)| acc + a.conj() * *b);
                    let g = gamma.norm();
                    if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    // Rotate the phase of column q so the overlap is real.
                    let phase = gamma / re(g);
                    let zeta = (beta - alpha) / (T::lit(2.0) * g);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = c * t;
                    for i in 0..N {
                        let ap = cols[p][i];
                        let aq = cols[q][i] * phase.conj();
                        cols[p][i] = ap * c - aq * s;
                        cols[q][i] = (ap * s + aq * c) * phase;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let mut sv = [T::zero(); N];
        for (j, col) in cols.iter().enumerate() {
            sv[j] = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        }
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        sv
    }

    /// Numerical rank with threshold `rel_tol × σ_max`.
    pub fn rank(&self, rel_tol: T) -> usize {
        let sv = self.singular_values();
        let cut = sv[0] * rel_tol;
        sv.iter().filter(|&&s| s > cut).count()
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for CMat<T, N> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for CMat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i][j]
    }
}

impl<T: Real, const N: usize> Add for CMat<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl<T: Real, const N: usize> Sub for CMat<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl<T: Real, const N: usize> Neg for CMat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.data[i][j])
    }
}

impl<T: Real, const N: usize> Mul for CMat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.data[i][j] = out.data[i][j] + a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

impl<T: Real, const N: usize> Mul<C<T>> for CMat<T, N> {
    type Output = Self;
    fn mul(self, k: C<T>) -> Self {
        self.scale(k)
    }
}

impl<T: Real, const N: usize> Zero for CMat<T, N> {
    fn zero() -> Self {
        Self::zeros()
    }
    fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(|z| z.is_zero())
    }
}

/// Eigenvalues of a Hermitian matrix in descending order (cyclic Jacobi).
///
/// Only the Hermitian part of `m` is used. Unlike the trigonometric cubic
/// solution, this keeps full precision for repeated eigenvalues.
pub fn hermitian_eigenvalues<T: Real, const N: usize>(m: &CMat<T, N>) -> [T; N] {
    let half = re(T::lit(0.5));
    let mut a = CMat::from_fn(|i, j| (m.data[i][j] + m.data[j][i].conj()) * half);
    let scale = a.max_abs();
    if scale == T::zero() {
        return [T::zero(); N];
    }
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    off = off + a.data[i][j].norm_sqr();
                }
            }
        }
        if off.sqrt() <= T::epsilon() * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a.data[p][q];
                let mag = apq.norm();
                if mag == T::zero() {
                    continue;
                }
                let phase = apq / re(mag);
                let theta = (a.data[q][q].re - a.data[p][p].re) / (T::lit(2.0) * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                // columns p, q of U: (c, -s e^{-iα}) and (s, c e^{-iα})
                let mut u = CMat::<T, N>::identity();
                u.data[p][p] = re(c);
                u.data[q][p] = -phase.conj() * re(s);
                u.data[p][q] = re(s);
                u.data[q][q] = phase.conj() * re(c);
                a = u.adjoint() * a * u;
            }
        }
    }
    let mut ev = [T::zero(); N];
    for (k, e) in ev.iter_mut().enumerate() {
        *e = a.data[k][k].re;
    }
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Eigenvalues of a Hermitian 3×3 matrix in descending order.
pub fn hermitian3_eigenvalues<T: Real>(m: &CMat<T, 3>) -> [T; 3] {
    hermitian_eigenvalues(m)
}
