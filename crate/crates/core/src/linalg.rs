//! Dense complex matrices, a cyclic Jacobi Hermitian eigensolver and
//! spectral matrix functions.
//!
//! Every operator in the crate (positions, momenta, mass and constraint
//! operators) is carried as a [`ComplexMatrix`]. Dimensions stay small
//! (at most a few hundred), so everything is dense and row-major.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when a matrix is required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default absolute cutoff below which an eigenvalue counts as zero for
/// inverse powers.
pub const DEFAULT_CUTOFF: f64 = 1e-12;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    hermitian_hint: bool,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.dim + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        self.hermitian_hint = false;
        &mut self.entries[r * self.dim + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
            hermitian_hint: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut m = Self {
            dim,
            entries,
            hermitian_hint: false,
        };
        m.hermitian_hint = m.hermiticity_defect() <= HERMITIAN_TOL;
        Ok(m)
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_entries(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Whether the matrix is known to be Hermitian within [`HERMITIAN_TOL`].
    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        out.hermitian_hint = self.hermitian_hint;
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|z| *z *= s);
        out.hermitian_hint = self.hermitian_hint && s.im == 0.0;
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            let row = &self.entries[r * n..(r + 1) * n];
            let out_row = &mut out[r * n..(r + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let rhs_row = &rhs.entries[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Self {
            dim: n,
            entries: out,
            hermitian_hint: false,
        }
    }

    /// Integer power by repeated multiplication; `pow(0)` is the identity.
    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out.hermitian_hint = self.hermitian_hint;
        out
    }

    /// Kronecker product `self ⊗ rhs`; `self` acts on the most significant factor.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * d + j * m + l] = a * rhs.entries[k * m + l];
                    }
                }
            }
        }
        out.hermitian_hint = self.hermitian_hint && rhs.hermitian_hint;
        out
    }

    /// `AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Symmetrized product `(AB + BA)/2`.
    pub fn sym_product(&self, rhs: &Self) -> Self {
        (&self.matmul(rhs) + &rhs.matmul(self)).scale(0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A[j,k] − conj(A[k,j])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let d = (self.entries[r * n + c] - self.entries[c * n + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entry-wise distance to another matrix of equal dimension.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `A v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum()
            })
            .collect()
    }

    fn combine(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            hermitian_hint: self.hermitian_hint && rhs.hermitian_hint,
        }
    }

    /// Marks the matrix Hermitian after checking the defect.
    pub(crate) fn with_checked_hint(mut self) -> Self {
        self.hermitian_hint = self.hermiticity_defect() <= HERMITIAN_TOL;
        self
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    /// `‖AV − VΛ‖_max`.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        let av = a.matmul(&self.eigenvectors);
        let n = a.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let vl = self.eigenvectors[(r, c)] * self.eigenvalues[c];
                worst = worst.max((av[(r, c)] - vl).norm());
            }
        }
        worst
    }

    /// `V f(Λ) V†` for a scalar map of the eigenvalues.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for c in r..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &fk) in mapped.iter().enumerate() {
                    if fk != 0.0 {
                        acc += v[(r, k)] * v[(c, k)].conj() * fk;
                    }
                }
                out.entries[r * n + c] = acc;
                out.entries[c * n + r] = acc.conj();
            }
            out.entries[r * n + r].im = 0.0;
        }
        out.hermitian_hint = true;
        out
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigDecomposition> {
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Hermiticity { defect });
    }
    let n = a.dim();
    // Work on the exactly Hermitian part.
    let mut m = a.clone();
    for r in 0..n {
        m.entries[r * n + r].im = 0.0;
        for c in (r + 1)..n {
            let avg = (a.entries[r * n + c] + a.entries[c * n + r].conj()) * 0.5;
            m.entries[r * n + c] = avg;
            m.entries[c * n + r] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);

    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| ((r + 1)..n).map(move |c| (r, c)))
            .map(|(r, c)| m.entries[r * n + c].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        // Early sweeps skip elements that are small relative to the diagonal.
        let threshold = if sweep < 3 {
            0.2 * off.sqrt() / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.entries[p * n + q];
                let g = apq.norm();
                if g == 0.0 || g < threshold {
                    continue;
                }
                let app = m.entries[p * n + p].re;
                let aqq = m.entries[q * n + q].re;
                if sweep >= 3 && g <= 1e-300 {
                    continue;
                }
                rotate(&mut m, &mut v, p, q, app, aqq, apq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.entries[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors.entries[r * n + new_c] = v.entries[r * n + old_c];
        }
    }
    eigenvectors.hermitian_hint = false;
    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(a)?.eigenvalues)
}

/// One unitary rotation zeroing `m[p,q]`: a phase on column q makes the
/// pair real, then a real Jacobi rotation diagonalizes the 2x2 block.
fn rotate(
    m: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    app: f64,
    aqq: f64,
    apq: Complex64,
) {
    let n = m.dim;
    let g = apq.norm();
    let phase = apq / g; // e^{iφ}
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U restricted to (p,q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    // A <- A U
    for k in 0..n {
        let akp = m.entries[k * n + p];
        let akq = m.entries[k * n + q];
        m.entries[k * n + p] = akp * u_pp + akq * u_qp;
        m.entries[k * n + q] = akp * u_pq + akq * u_qq;
    }
    // A <- U† A
    for k in 0..n {
        let apk = m.entries[p * n + k];
        let aqk = m.entries[q * n + k];
        m.entries[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
        m.entries[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    m.entries[p * n + q] = Complex64::new(0.0, 0.0);
    m.entries[q * n + p] = Complex64::new(0.0, 0.0);
    m.entries[p * n + p].im = 0.0;
    m.entries[q * n + q].im = 0.0;
    // V <- V U
    for k in 0..n {
        let vkp = v.entries[k * n + p];
        let vkq = v.entries[k * n + q];
        v.entries[k * n + p] = vkp * u_pp + vkq * u_qp;
        v.entries[k * n + q] = vkp * u_pq + vkq * u_qq;
    }
}

/// Scalar functions applied through the spectral decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectralFn {
    /// `λ ↦ λ^{-k}`, k in 1..=4; eigenvalues within the cutoff map to the
    /// kernel value (0 for Moore–Penrose).
    InvPow(u32),
    Abs,
    /// `λ ↦ √λ`; eigenvalues in `[-cutoff, 0)` are clamped to zero.
    SqrtPsd,
}

/// `V f(Λ) V†` with the Moore–Penrose convention for inverse powers.
pub fn matrix_function(a: &ComplexMatrix, f: SpectralFn, cutoff: f64) -> Result<ComplexMatrix> {
    matrix_function_with_kernel(a, f, cutoff, 0.0)
}

/// Like [`matrix_function`], but inverse powers send eigenvalues with
/// `|λ| ≤ cutoff` to `kernel_value` instead of zero. Other functions ignore
/// `kernel_value`.
pub fn matrix_function_with_kernel(
    a: &ComplexMatrix,
    f: SpectralFn,
    cutoff: f64,
    kernel_value: f64,
) -> Result<ComplexMatrix> {
    if !(cutoff >= 0.0) {
        return Err(Error::Domain(format!("cutoff must be nonnegative, got {cutoff}")));
    }
    let eig = eig_hermitian(a)?;
    match f {
        SpectralFn::InvPow(k) => {
            if !(1..=4).contains(&k) {
                return Err(Error::Domain(format!("inverse power must be in 1..=4, got {k}")));
            }
            Ok(eig.reassemble(|l| {
                if l.abs() <= cutoff {
                    kernel_value
                } else {
                    l.powi(-(k as i32))
                }
            }))
        }
        SpectralFn::Abs => Ok(eig.reassemble(f64::abs)),
        SpectralFn::SqrtPsd => {
            if let Some(&min) = eig.eigenvalues.first() {
                if min < -cutoff {
                    return Err(Error::NegativeSpectrum { eigenvalue: min });
                }
            }
            Ok(eig.reassemble(|l| l.max(0.0).sqrt()))
        }
    }
}

/// Result of [`hermitize`]: the Hermitian part and the defect of the input.
#[derive(Debug, Clone)]
pub struct Hermitized {
    pub matrix: ComplexMatrix,
    pub defect: f64,
}

/// `(A + A†)/2`, logging a warning when `‖A − A†‖_max > tol`.
pub fn hermitize(a: &ComplexMatrix, tol: f64) -> Hermitized {
    let defect = a.hermiticity_defect();
    if defect > tol {
        log::warn!("hermitize: input defect {defect:.3e} exceeds tolerance {tol:.1e}");
    }
    let mut matrix = (a + &a.adjoint()).scale(0.5);
    let n = matrix.dim;
    for i in 0..n {
        matrix.entries[i * n + i].im = 0.0;
    }
    matrix.hermitian_hint = true;
    Hermitized { matrix, defect }
}

/// Inner product `⟨x|y⟩`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}
