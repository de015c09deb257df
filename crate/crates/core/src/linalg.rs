//! Dense complex matrices.
//!
//! Storage is row-major. Every operation returns a new matrix; nothing is
//! mutated in place once constructed.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix dimension the library will build.
pub const MAX_DIM: usize = 256;

/// Hermiticity tolerance applied by [`ComplexMatrix::hermitian_eig`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-14;
const MAX_CONDITION: f64 = 1e12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for col in 0..self.dim {
                let z = self[(r, col)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, col): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + col]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + col]
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
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

    /// Builds a matrix from row-major entries. Fails unless the entry count is
    /// a positive perfect square and every entry is finite.
    pub fn from_entries(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::InvalidShape(format!(
                "{} entries is not a square matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidShape("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| c(x, 0.0)))
            .collect::<Vec<_>>();
        if rows.iter().any(|row| row.len() != rows.len()) {
            return Err(Error::InvalidShape("rows are ragged".into()));
        }
        Self::from_entries(data)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    /// The rank-one operator `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                op: "outer",
                left: u.len(),
                right: v.len(),
            });
        }
        let dim = u.len();
        let mut m = Self::zeros(dim);
        for (r, &ur) in u.iter().enumerate() {
            for (col, &vc) in v.iter().enumerate() {
                m[(r, col)] = ur * vc.conj();
            }
        }
        Ok(m)
    }

    /// `|v><v|`.
    pub fn projector(v: &[Complex64]) -> Self {
        Self::outer(v, v).expect("same vector")
    }

    pub fn pauli_x() -> Self {
        Self::from_entries(vec![ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_entries(vec![ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_entries(vec![ONE, ZERO, ZERO, -ONE]).unwrap()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    fn check_same_dim(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                op,
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "add")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "sub")?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other, "matmul")?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                op: "matvec",
                left: self.dim,
                right: v.len(),
            });
        }
        Ok(self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `<v|A|v>` without forming `A|v>` separately.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<Complex64> {
        let av = self.matvec(v)?;
        Ok(v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for col in 0..n {
                out[(col, r)] = self[(r, col)];
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conjugate()
    }

    /// Kronecker product; entry `(i*dB + k, j*dB + l)` is `A(i,j) * B(k,l)`.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.dim, other.dim);
        let n = na * nb;
        let mut out = Self::zeros(n);
        for i in 0..na {
            for j in 0..na {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..nb {
                    for l in 0..nb {
                        out[(i * nb + k, j * nb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(A B)` evaluated through the dense product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        Ok(self.matmul(other)?.trace())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for col in r..n {
                worst = worst.max((self[(r, col)] - self[(col, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues are returned ascending; column `k` of the
    /// returned matrix is the eigenvector for eigenvalue `k`.
    ///
    /// Non-Hermitian input is rejected rather than symmetrized.
    pub fn hermitian_eig(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let n = self.dim;
        let mut a = self.clone();
        let mut v = Self::identity(n);
        // convergence is judged relative to the input scale
        let scale = self.frobenius_norm().max(1.0);

        let mut converged = false;
        let mut off = off_diagonal_norm(&a);
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off <= JACOBI_TOL * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
            off = off_diagonal_norm(&a);
        }
        if !converged && off > JACOBI_TOL * scale {
            return Err(Error::NoConvergence {
                sweeps: JACOBI_MAX_SWEEPS,
                residual: off,
            });
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
        let values = order.iter().map(|&i| diag[i]).collect();
        let mut vectors = Self::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                vectors[(r, new_col)] = v[(r, old_col)];
            }
        }
        Ok((values, vectors))
    }

    /// Eigenvalues only, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.hermitian_eig()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }

    /// Inverse by LU with partial pivoting.
    ///
    /// Fails when a pivot falls below `1e-14` relative to the largest entry,
    /// or when the 1-norm condition estimate exceeds `1e12`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let max_entry = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if max_entry == 0.0 {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) =
                (k..n)
                    .map(|r| (r, lu[(r, k)].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= PIVOT_TOL * max_entry {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != k {
                for col in 0..n {
                    lu.data.swap(k * n + col, pivot_row * n + col);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for r in (k + 1)..n {
                let factor = lu[(r, k)] / pivot;
                lu[(r, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for col in (k + 1)..n {
                    let u = lu[(k, col)];
                    lu[(r, col)] -= factor * u;
                }
            }
        }

        let mut inv = Self::zeros(n);
        for col in 0..n {
            // solve L U x = P e_col
            let mut x: Vec<Complex64> = (0..n).map(|r| if perm[r] == col { ONE } else { ZERO }).collect();
            for r in 0..n {
                let mut s = x[r];
                for k in 0..r {
                    s -= lu[(r, k)] * x[k];
                }
                x[r] = s;
            }
            for r in (0..n).rev() {
                let mut s = x[r];
                for k in (r + 1)..n {
                    s -= lu[(r, k)] * x[k];
                }
                x[r] = s / lu[(r, r)];
            }
            for r in 0..n {
                inv[(r, col)] = x[r];
            }
        }

        let condition = self.norm_one() * inv.norm_one();
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(Error::Singular { condition });
        }
        Ok(inv)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|col| (0..self.dim).map(|r| self[(r, col)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for r in 0..n {
        for col in 0..n {
            if r != col {
                s += a[(r, col)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[(p, q)]` with the unitary
/// `J = [[c, s e], [-s conj(e), c]]` on the `(p, q)` plane, where `e` is the
/// phase of `a[(p, q)]`. Applies `A <- J^dagger A J` and `V <- V J`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / mag;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let j_pq = phase * sn;
    let j_qp = -phase.conj() * sn;
    let n = a.dim;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * cs + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * cs;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * cs + aqk * j_qp.conj();
        a[(q, k)] = apk * j_pq.conj() + aqk * cs;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * cs;
    }
}

/// Kronecker product of a sequence, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    factors.into_iter().fold(None, |acc, m| match acc {
        None => Some(m.clone()),
        Some(a) => Some(a.kron(m)),
    })
}

pub fn vec_kron(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let d = a.max_abs_diff(b);
        assert!(d <= tol, "difference {d:e} > {tol:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn identity_and_pauli_products() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(id.matmul(&id).unwrap(), id);
        let x = ComplexMatrix::pauli_x();
        assert_eq!(x.matmul(&x).unwrap(), id);
    }

    #[test]
    fn zx_equals_i_y() {
        // explicit 2x2: Z X = [[0,1],[-1,0]] and i Y = i [[0,-i],[i,0]] = [[0,1],[-1,0]]
        let zx = ComplexMatrix::pauli_z().matmul(&ComplexMatrix::pauli_x()).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        assert_close(&zx, &expected, 0.0);
        assert_close(&zx, &ComplexMatrix::pauli_y().scale(I), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = ComplexMatrix::identity(2)
            .matmul(&ComplexMatrix::identity(3))
            .unwrap_err();
        match err {
            Error::DimensionMismatch { left, right, .. } => assert_eq!((left, right), (2, 3)),
            other => panic!("unexpected {other}"),
        }
        assert!(ComplexMatrix::identity(2).add(&ComplexMatrix::identity(4)).is_err());
    }

    #[test]
    fn transpose_adjoint_conjugate() {
        let y = ComplexMatrix::pauli_y();
        assert_eq!(y.transpose(), y.scale_real(-1.0));
        assert_eq!(ComplexMatrix::identity(3).adjoint(), ComplexMatrix::identity(3));
        let m = ComplexMatrix::from_entries(vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 3.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(m.adjoint().adjoint(), m);
        assert_eq!(m.conjugate()[(0, 0)], c(1.0, -2.0));
    }

    #[test]
    fn kron_expansions() {
        assert_eq!(
            ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        let zz = ComplexMatrix::pauli_z().kron(&ComplexMatrix::pauli_z());
        assert_eq!(zz, ComplexMatrix::from_diagonal(&[ONE, -ONE, -ONE, ONE]));
        // X (x) X written out by hand: ones on the anti-diagonal
        let xx = ComplexMatrix::pauli_x().kron(&ComplexMatrix::pauli_x());
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r + col == 3 { ONE } else { ZERO };
                assert_eq!(xx[(r, col)], expected);
            }
        }
    }

    #[test]
    fn trace_values() {
        assert_eq!(ComplexMatrix::identity(4).trace(), c(4.0, 0.0));
        assert_eq!(ComplexMatrix::pauli_x().trace(), ZERO);
        let s = 1.0 / 2f64.sqrt();
        let psi = [c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let rho = ComplexMatrix::projector(&psi);
        assert!((rho.trace() - ONE).norm() < 1e-15);
    }

    #[test]
    fn eig_of_diagonal() {
        let zz = ComplexMatrix::pauli_z().kron(&ComplexMatrix::pauli_z());
        let (vals, _) = zz.hermitian_eig().unwrap();
        assert_eq!(vals, vec![-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(m.hermitian_eig(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_residual_on_complex_hermitian() {
        let m = ComplexMatrix::from_entries(vec![
            c(2.0, 0.0),
            c(1.0, -1.0),
            c(0.0, 0.5),
            c(1.0, 1.0),
            c(-1.0, 0.0),
            c(0.3, 0.0),
            c(0.0, -0.5),
            c(0.3, 0.0),
            c(0.5, 0.0),
        ])
        .unwrap();
        let (vals, vecs) = m.hermitian_eig().unwrap();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (k, &lambda) in vals.iter().enumerate() {
            let col: Vec<_> = (0..3).map(|r| vecs[(r, k)]).collect();
            let av = m.matvec(&col).unwrap();
            let res = av
                .iter()
                .zip(&col)
                .map(|(a, v)| (a - v * lambda).norm())
                .fold(0.0, f64::max);
            assert!(res < 3e-9, "residual {res:e}");
        }
        let vdv = vecs.adjoint().matmul(&vecs).unwrap();
        assert_close(&vdv, &ComplexMatrix::identity(3), 1e-9);
    }

    #[test]
    fn inverse_cases() {
        assert_eq!(
            ComplexMatrix::identity(3).inverse().unwrap(),
            ComplexMatrix::identity(3)
        );
        let d = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, -4.0)]);
        let inv = d.inverse().unwrap();
        assert_close(&inv, &ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.0, 0.25)]), 1e-15);
        let m = ComplexMatrix::from_entries(vec![
            c(0.2, 0.1),
            c(-0.4, 0.3),
            c(0.1, 0.0),
            c(0.0, 0.7),
            c(0.5, -0.2),
            c(0.3, 0.3),
            c(-0.6, 0.1),
            c(0.2, 0.0),
            c(0.9, -0.4),
        ])
        .unwrap();
        let prod = m.matmul(&m.inverse().unwrap()).unwrap();
        assert_close(&prod, &ComplexMatrix::identity(3), 3e-9);
    }

    #[test]
    fn singular_inverse_is_an_error() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular { .. })));
        assert!(ComplexMatrix::zeros(2).inverse().is_err());
        let ill = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-13]]).unwrap();
        assert!(matches!(ill.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn from_entries_validates() {
        assert!(ComplexMatrix::from_entries(vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_entries(vec![]).is_err());
        assert!(ComplexMatrix::from_entries(vec![c(f64::NAN, 0.0)]).is_err());
    }
}
