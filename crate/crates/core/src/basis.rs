//! Single-variable position/momentum matrices in the oscillator and position
//! bases, and two-variable operators built from tensor products.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    /// Truncated harmonic oscillator: Q and P are tridiagonal.
    #[serde(rename = "osc")]
    Oscillator,
    /// Diagonal position grid; momentum obtained by a discrete Fourier conjugation.
    #[serde(rename = "pos")]
    Position,
}

impl BasisKind {
    pub fn short_name(self) -> &'static str {
        match self {
            BasisKind::Oscillator => "osc",
            BasisKind::Position => "pos",
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "osc" | "oscillator" => Ok(BasisKind::Oscillator),
            "pos" | "position" => Ok(BasisKind::Position),
            other => Err(Error::Parse(format!("unknown basis '{other}' (expected osc or pos)"))),
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(format!("basis dimension must be at least 2, got {n}")));
    }
    Ok(())
}

/// Oscillator-basis position and momentum of dimension `n`.
///
/// `Q[j, j+1] = Q[j+1, j] = √(j+1)/√2` and `P = (i/√2)·(lowering − raising)`,
/// i.e. the upper off-diagonal of the bracketed matrix is negative.
pub fn osc_pair(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_dim(n)?;
    let mut q = ComplexMatrix::zeros(n);
    let mut p = ComplexMatrix::zeros(n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n - 1 {
        let r = ((j + 1) as f64).sqrt() * s;
        q[(j, j + 1)] = Complex64::new(r, 0.0);
        q[(j + 1, j)] = Complex64::new(r, 0.0);
        p[(j, j + 1)] = Complex64::new(0.0, -r);
        p[(j + 1, j)] = Complex64::new(0.0, r);
    }
    Ok((q.with_checked_hint(), p.with_checked_hint()))
}

/// Grid value `√(2π/(4n))·(2j − (n+1))` for 1-based `j`.
fn grid_point(n: usize, j: usize) -> f64 {
    (2.0 * PI / (4.0 * n as f64)).sqrt() * (2.0 * j as f64 - (n as f64 + 1.0))
}

/// Sylvester (discrete Fourier) matrix
/// `F[j,k] = exp((2πi/(4n))(2j−(n+1))(2k−(n+1)))/√n`, 1-based indices.
pub fn sylvester(n: usize) -> Result<ComplexMatrix> {
    check_dim(n)?;
    let mut f = ComplexMatrix::zeros(n);
    let norm = 1.0 / (n as f64).sqrt();
    let nf = n as f64;
    for j in 1..=n {
        for k in 1..=n {
            let phase = 2.0 * PI / (4.0 * nf)
                * (2.0 * j as f64 - (nf + 1.0))
                * (2.0 * k as f64 - (nf + 1.0));
            f[(j - 1, k - 1)] = Complex64::from_polar(norm, phase);
        }
    }
    Ok(f)
}

/// Position-basis pair: diagonal grid `Q` and `P = F† Q F`.
pub fn pos_pair(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_dim(n)?;
    let diag: Vec<f64> = (1..=n).map(|j| grid_point(n, j)).collect();
    let q = ComplexMatrix::from_diag(&diag);
    let f = sylvester(n)?;
    let p = f.adjoint().matmul(&q).matmul(&f);
    // Clean the rounding-level anti-Hermitian part of the triple product.
    let p = crate::linalg::hermitize(&p, 1e-10).matrix;
    Ok((q, p))
}

pub fn single_pair(n: usize, basis: BasisKind) -> Result<(ComplexMatrix, ComplexMatrix)> {
    match basis {
        BasisKind::Oscillator => osc_pair(n),
        BasisKind::Position => pos_pair(n),
    }
}

/// Two canonical variables on `qubits` qubits, split evenly; `u` and `pu`
/// act on the most significant half.
#[derive(Debug, Clone)]
pub struct VariablePair {
    pub qubits: usize,
    pub basis: BasisKind,
    pub u: ComplexMatrix,
    pub v: ComplexMatrix,
    pub pu: ComplexMatrix,
    pub pv: ComplexMatrix,
}

impl VariablePair {
    pub fn dim(&self) -> usize {
        1 << self.qubits
    }
}

pub fn variable_pair(qubits: usize, basis: BasisKind) -> Result<VariablePair> {
    if qubits < 2 || qubits % 2 != 0 {
        return Err(Error::Dimension(format!(
            "qubit count must be even and at least 2, got {qubits}"
        )));
    }
    if qubits > 10 {
        return Err(Error::Dimension(format!("at most 10 qubits are supported, got {qubits}")));
    }
    let n = 1usize << (qubits / 2);
    let (q, p) = single_pair(n, basis)?;
    let id = ComplexMatrix::identity(n);
    Ok(VariablePair {
        qubits,
        basis,
        u: q.kron(&id),
        v: id.kron(&q),
        pu: p.kron(&id),
        pv: id.kron(&p),
    })
}
