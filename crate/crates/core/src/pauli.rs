//! Pauli-string expansion of Hermitian matrices.
//!
//! Labels are read left to right from the most significant tensor factor,
//! so `"XI"` is `σ_x ⊗ I`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HERMITIAN_TOL};

/// Default coefficient cutoff when counting terms.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub label: String,
    pub coefficient: f64,
}

impl PauliTerm {
    pub fn new(label: impl Into<String>, coefficient: f64) -> Self {
        Self {
            label: label.into(),
            coefficient,
        }
    }
}

/// Bit masks of a Pauli string on `q` qubits: X-type (flips) and Z-type
/// (phases), plus the number of Y factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMasks {
    pub(crate) fn parse(label: &str) -> Result<Self> {
        let q = label.len();
        let mut masks = PauliMasks { x: 0, z: 0, n_y: 0 };
        for (i, ch) in label.chars().enumerate() {
            let bit = 1usize << (q - 1 - i);
            match ch {
                'I' => {}
                'X' => masks.x |= bit,
                'Z' => masks.z |= bit,
                'Y' => {
                    masks.x |= bit;
                    masks.z |= bit;
                    masks.n_y += 1;
                }
                other => {
                    return Err(Error::Parse(format!("invalid Pauli character '{other}' in {label}")))
                }
            }
        }
        Ok(masks)
    }

    fn from_index(index: usize, q: usize) -> (Self, String) {
        // base-4 digits, most significant first: 0=I 1=X 2=Y 3=Z
        let mut label = String::with_capacity(q);
        let mut masks = PauliMasks { x: 0, z: 0, n_y: 0 };
        for i in 0..q {
            let digit = (index >> (2 * (q - 1 - i))) & 3;
            let bit = 1usize << (q - 1 - i);
            match digit {
                0 => label.push('I'),
                1 => {
                    label.push('X');
                    masks.x |= bit;
                }
                2 => {
                    label.push('Y');
                    masks.x |= bit;
                    masks.z |= bit;
                    masks.n_y += 1;
                }
                _ => {
                    label.push('Z');
                    masks.z |= bit;
                }
            }
        }
        (masks, label)
    }

    /// `P|col⟩ = phase(col) |col ⊕ x⟩`.
    #[inline]
    pub(crate) fn phase(&self, col: usize) -> Complex64 {
        let i_pow = match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (col & self.z).count_ones() % 2 == 1 {
            -i_pow
        } else {
            i_pow
        }
    }
}

fn qubits_of(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// All `4^q` coefficients `a_n = Tr(P_n A)/2^q`, in base-4 label order.
pub fn coefficients(a: &ComplexMatrix) -> Result<Vec<(String, f64)>> {
    let dim = a.dim();
    let q = qubits_of(dim)?;
    let defect = a.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::Hermiticity { defect });
    }
    let norm = 1.0 / dim as f64;
    let out = (0..1usize << (2 * q))
        .map(|idx| {
            let (masks, label) = PauliMasks::from_index(idx, q);
            // Tr(P A) = Σ_c ⟨c|P A|c⟩ = Σ_r phase(r) A[r, r ⊕ x]
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dim {
                acc += masks.phase(r) * a[(r, r ^ masks.x)];
            }
            (label, acc.re * norm)
        })
        .collect();
    Ok(out)
}

/// Pauli expansion, dropping terms with `|a_n| ≤ zero_tol`.
pub fn decompose(a: &ComplexMatrix, zero_tol: f64) -> Result<Vec<PauliTerm>> {
    Ok(coefficients(a)?
        .into_iter()
        .filter(|(_, c)| c.abs() > zero_tol)
        .map(|(label, coefficient)| PauliTerm { label, coefficient })
        .collect())
}

fn common_length(terms: &[PauliTerm]) -> Result<usize> {
    let q = terms
        .first()
        .map(|t| t.label.len())
        .ok_or_else(|| Error::Dimension("empty Pauli term list".into()))?;
    if q == 0 || q > 12 {
        return Err(Error::Dimension(format!("unsupported label length {q}")));
    }
    if let Some(bad) = terms.iter().find(|t| t.label.len() != q) {
        return Err(Error::Dimension(format!(
            "label {} has length {}, expected {q}",
            bad.label,
            bad.label.len()
        )));
    }
    Ok(q)
}

/// Dense matrix `Σ a_n P_n`.
pub fn reconstruct(terms: &[PauliTerm]) -> Result<ComplexMatrix> {
    let q = common_length(terms)?;
    let dim = 1usize << q;
    let mut out = ComplexMatrix::zeros(dim);
    for t in terms {
        let masks = PauliMasks::parse(&t.label)?;
        for col in 0..dim {
            out[(col ^ masks.x, col)] += masks.phase(col) * t.coefficient;
        }
    }
    Ok(crate::linalg::hermitize(&out, HERMITIAN_TOL).matrix)
}

/// Number of terms with `|coefficient| > threshold`.
pub fn term_count(terms: &[PauliTerm], threshold: f64) -> usize {
    terms.iter().filter(|t| t.coefficient.abs() > threshold).count()
}

/// Term counts of `a` at each cutoff.
pub fn cutoff_sweep(a: &ComplexMatrix, cutoffs: &[f64]) -> Result<Vec<(f64, usize)>> {
    let all = decompose(a, 0.0)?;
    Ok(cutoffs.iter().map(|&c| (c, term_count(&all, c))).collect())
}

/// `label,coefficient` rows with a header line.
pub fn to_csv(terms: &[PauliTerm]) -> String {
    let mut s = String::from("label,coefficient\n");
    for t in terms {
        let _ = writeln!(s, "{},{:e}", t.label, t.coefficient);
    }
    s
}

pub fn from_csv(text: &str) -> Result<Vec<PauliTerm>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("label")) {
            continue;
        }
        let (label, coef) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected label,coefficient", n + 1)))?;
        let coefficient = coef
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
        PauliMasks::parse(label.trim())?;
        out.push(PauliTerm::new(label.trim(), coefficient));
    }
    Ok(out)
}

pub fn to_json(terms: &[PauliTerm]) -> String {
    serde_json::to_string_pretty(terms).expect("Pauli terms serialize")
}

pub fn from_json(text: &str) -> Result<Vec<PauliTerm>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
