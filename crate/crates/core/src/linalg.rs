//! Dense complex linear algebra for matrices up to 256x256.
//!
//! Only what the entanglement measures need: products, adjoints, a cyclic
//! Jacobi eigensolver for Hermitian input, one-sided Jacobi singular values,
//! and a tiny real least-squares solver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

const MAX_SWEEPS: usize = 80;

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries. Returns `None` when the length
    /// is not a perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Option<Self> {
        let dim = (libm::sqrt(data.len() as f64) + 0.5) as usize;
        (dim * dim == data.len()).then_some(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// |v><v| for a (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Largest element-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest element-wise modulus of `self - self^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Largest element-wise modulus of `self^dagger self - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    fn hermitian_part(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m[(i, i)] = C64::new(self[(i, i)].re, 0.0);
            for j in (i + 1)..self.dim {
                let z = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// 2x2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

pub fn mat2_identity() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mat2_diag(a: f64, b: f64) -> Mat2 {
    [[C64::new(a, 0.0), ZERO], [ZERO, C64::new(b, 0.0)]]
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

pub fn mat2_adjoint(x: &Mat2) -> Mat2 {
    [[x[0][0].conj(), x[1][0].conj()], [x[0][1].conj(), x[1][1].conj()]]
}

pub fn mat2_det(x: &Mat2) -> C64 {
    x[0][0] * x[1][1] - x[0][1] * x[1][0]
}

/// Largest element-wise modulus of `x - y`.
pub fn mat2_max_abs_diff(x: &Mat2, y: &Mat2) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((x[i][j] - y[i][j]).norm());
        }
    }
    d
}

/// Plane rotation that zeroes the (p, q) entry of a Hermitian 2x2 block
/// `[[app, apq], [conj(apq), aqq]]`. Returned as the column-action matrix
/// `[[j00, j01], [j10, j11]]`.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + libm::sqrt(theta * theta + 1.0))
    } else {
        -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;
    let pc = phase.conj();
    [C64::new(c, 0.0), C64::new(s, 0.0), pc * (-s), pc * c]
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Only the Hermitian part of `m` is used. Eigenvalues come back sorted
/// descending (ties keep their diagonal order), eigenvectors as the
/// matching columns of the returned matrix.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let frob: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= 1e-34 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.norm_sqr() <= 1e-300 {
                    continue;
                }
                let [j00, j01, j10, j11] = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * j00 + akq * j10;
                    a[(k, q)] = akp * j01 + akq * j11;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = j00.conj() * apk + j10.conj() * aqk;
                    a[(q, k)] = j01.conj() * apk + j11.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * j00 + vkq * j10;
                    v[(k, q)] = vkp * j01 + vkq * j11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, col)] = v[(k, src)];
        }
    }
    (values, vectors)
}

/// Singular values of a square matrix by one-sided (Hestenes) Jacobi,
/// sorted descending. Absolute accuracy is on the order of machine epsilon
/// times the largest singular value, including for the zero ones.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let n = m.dim();
    // column-major copy so column sweeps are contiguous
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g <= 1e-15 * libm::sqrt(alpha * beta) || g <= 1e-300 {
                    continue;
                }
                rotated = true;
                let [j00, j01, j10, j11] = jacobi_rotation(alpha, beta, gamma);
                let (left, right) = cols.split_at_mut(q);
                for (bp, bq) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (x, y) = (*bp, *bq);
                    *bp = x * j00 + y * j10;
                    *bq = x * j01 + y * j11;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| libm::sqrt(c.iter().map(|z| z.norm_sqr()).sum::<f64>()))
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Least-squares solution of a small dense real system `a x ≈ b`, where `a`
/// is given as rows. Returns the solution, or the rank deficit when the
/// columns are linearly dependent.
pub fn least_squares(rows: &[Vec<f64>], b: &[f64]) -> core::result::Result<Vec<f64>, usize> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    // modified Gram-Schmidt QR on the columns
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut r = vec![vec![0.0; n]; n];
    let mut deficit = 0;
    for j in 0..n {
        for i in 0..j {
            if r[i][i] == 0.0 {
                continue;
            }
            let proj: f64 = (0..m).map(|k| q[i][k] * q[j][k]).sum();
            r[i][j] = proj;
            for k in 0..m {
                q[j][k] -= proj * q[i][k];
            }
        }
        let norm = libm::sqrt(q[j].iter().map(|x| x * x).sum::<f64>());
        if norm <= 1e-10 {
            deficit += 1;
            r[j][j] = 0.0;
            continue;
        }
        r[j][j] = norm;
        for x in &mut q[j] {
            *x /= norm;
        }
    }
    if deficit > 0 {
        return Err(deficit);
    }
    let qtb: Vec<f64> = (0..n)
        .map(|i| (0..m).map(|k| q[i][k] * b[k]).sum())
        .collect();
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| r[i][j] * x[j]).sum();
        x[i] = (qtb[i] - s) / r[i][i];
    }
    Ok(x)
}
