//! Dense complex Hermitian matrices and validated density matrices.
//!
//! Everything here works on small, dense, row-major matrices. Eigen
//! decompositions come from a cyclic complex Jacobi solver and are computed
//! once when a [`DensityMatrix`] is constructed, so every later spectral
//! function (powers, purity, entropies) reads from the cached spectrum.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default validation tolerance for density matrices.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Relative off-diagonal Frobenius norm at which Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-12;
/// Maximum number of cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
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

    /// Builds a matrix from rows, rejecting empty, ragged or non-square input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::Ragged {
                    row,
                    len: entries.len(),
                    dim,
                });
            }
            data.extend(entries);
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Outer product |v><v|.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Block-diagonal direct sum `a ⊕ b`.
    pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> Self {
        let dim = a.dim + b.dim;
        let mut m = Self::zeros(dim);
        for i in 0..a.dim {
            for j in 0..a.dim {
                m[(i, j)] = a[(i, j)];
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                m[(a.dim + i, a.dim + j)] = b[(i, j)];
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks(self.dim)
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

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other[(k, j)];
                }
            }
        }
        Ok(m)
    }

    /// `self · x · self†`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> Result<Self> {
        self.matmul(x)?.matmul(&self.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    acc += self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch; use [`ComplexMatrix::matmul`] for the checked form.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
            .expect("dimension mismatch in matrix product")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, "  ")?;
            for z in row {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigen decomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order; column `k` of `eigenvectors`
/// belongs to `eigenvalues[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..n {
                    if fl[k] != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                    }
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc.conj();
            }
            m[(i, i)].im = 0.0;
        }
        m
    }

    /// Diagonal of `V diag(f(λ)) V†` without forming the full matrix.
    pub fn map_diagonal(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| fl[k] * self.eigenvectors[(i, k)].norm_sqr())
                    .sum()
            })
            .collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Only the Hermitian part of `m` is used.
pub fn hermitian_eigh(m: &ComplexMatrix) -> Result<Spectrum> {
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = JACOBI_THRESHOLD * scale;

    let mut sweeps = 0;
    loop {
        let off = a.off_diagonal_norm();
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) on (p, q) followed by the real rotation.
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// A validated quantum state: Hermitian, positive semidefinite, unit trace.
///
/// The spectrum is computed at construction and never changes.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    /// Validates with [`DEFAULT_TOLERANCE`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        validate_density(m, DEFAULT_TOLERANCE)
    }

    /// Diagonal (incoherent) state with the given populations.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(weights))
    }

    /// `|ψ><ψ| / <ψ|ψ>`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::TraceNotOne {
                re: norm_sq,
                im: 0.0,
            });
        }
        Self::new(ComplexMatrix::outer(psi).scale(1.0 / norm_sq))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::diagonal(&vec![1.0 / dim as f64; dim]).expect("I/d is a valid state")
    }

    /// `|ψ_d><ψ_d|` with `|ψ_d> = d^{-1/2} Σ_i |i>`.
    pub fn maximally_coherent(dim: usize) -> Self {
        Self::pure(&vec![ONE; dim]).expect("uniform superposition is a valid state")
    }

    /// Block-diagonal state `p1 ρ1 ⊕ (1 - p1) ρ2`.
    pub fn direct_sum(rho1: &DensityMatrix, rho2: &DensityMatrix, p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::InvalidWeights(format!("p1 = {p1} is not in [0, 1]")));
        }
        let m = ComplexMatrix::direct_sum(&rho1.matrix.scale(p1), &rho2.matrix.scale(1.0 - p1));
        Self::new(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    #[inline]
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.eigenvalues
    }

    /// Eigen decomposition of the state (served from the construction-time cache).
    pub fn eigh(&self) -> Spectrum {
        self.spectrum.clone()
    }

    /// `ρ^α` for `α > 0`, with `0^α = 0`.
    pub fn power(&self, alpha: f64) -> Result<ComplexMatrix> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        Ok(self.spectrum.map(|l| pos_pow(l, alpha)))
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.spectrum.eigenvalues.iter().map(|l| l * l).sum()
    }

    /// Normalized linear entropy `d/(d-1) (1 - Tr ρ²)`.
    pub fn mixedness(&self) -> Result<f64> {
        let d = self.dim();
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        let d = d as f64;
        Ok(d / (d - 1.0) * (1.0 - self.purity()))
    }

    /// Populations `<i|ρ|i>`.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Frobenius norm of the off-diagonal part, the raw amount of coherence.
    pub fn coherence_mass(&self) -> f64 {
        self.matrix.off_diagonal_norm()
    }

    /// True if all off-diagonal entries vanish within `tol` (Frobenius).
    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.coherence_mass() <= tol
    }

    /// The fully dephased state `Σ_i <i|ρ|i> |i><i|`.
    pub fn dephased(&self) -> DensityMatrix {
        DensityMatrix::diagonal(&self.populations()).expect("dephasing preserves validity")
    }
}

/// Eigenvalues at or below this are stored as exact zeros.
pub const ZERO_EIGENVALUE: f64 = 1e-14;

/// `x^α` for `α > 0` on a clamped eigenvalue: nonpositive input maps to 0.
#[inline]
pub(crate) fn pos_pow(x: f64, alpha: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(alpha)
    }
}

/// Validates `m` as a density matrix.
///
/// Asymmetry, trace deviation and negative eigenvalues up to `tol` are
/// tolerated: the stored matrix is the Hermitian part, negative eigenvalues
/// are clamped to zero and the result is renormalized to unit trace.
/// Cached eigenvalues up to [`ZERO_EIGENVALUE`] are set to zero.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = m.hermitian_defect();
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::TraceNotOne {
            re: tr.re,
            im: tr.im,
        });
    }
    let herm = m.hermitian_part();
    let mut spectrum = hermitian_eigh(&herm)?;
    let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tol {
        return Err(Error::NotPositive(min));
    }

    let clamped = spectrum.eigenvalues.iter().any(|&l| l < 0.0);
    // Roundoff-sized eigenvalues would blow up under small powers.
    for l in spectrum.eigenvalues.iter_mut() {
        if *l <= ZERO_EIGENVALUE {
            *l = 0.0;
        }
    }
    let total: f64 = spectrum.eigenvalues.iter().sum();
    for l in spectrum.eigenvalues.iter_mut() {
        *l /= total;
    }
    // Roundoff-level trace error is left alone so parse/serialize is a fixed point.
    let matrix = if clamped {
        spectrum.reconstruct()
    } else if (herm.trace().re - 1.0).abs() > 1e-14 {
        herm.scale(1.0 / total)
    } else {
        herm
    };
    Ok(DensityMatrix { matrix, spectrum })
}
