//! Statevector simulation of the Ry ansatz with full CNOT entanglement.
//!
//! Qubit 0 is the most significant bit of the amplitude index, matching the
//! Pauli label order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::pauli::{PauliMasks, PauliTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entanglement {
    /// CNOT on every ordered pair `i < j`, lexicographic.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub qubits: usize,
    pub depth: usize,
    pub entanglement: Entanglement,
}

impl AnsatzConfig {
    pub fn new(qubits: usize, depth: usize) -> Self {
        Self {
            qubits,
            depth,
            entanglement: Entanglement::Full,
        }
    }

    /// `q·(d+1)` rotation angles.
    pub fn parameter_count(&self) -> usize {
        self.qubits * (self.depth + 1)
    }

    pub fn check(&self, theta: &[f64]) -> Result<()> {
        if self.qubits == 0 || self.qubits > 16 {
            return Err(Error::Dimension(format!("unsupported qubit count {}", self.qubits)));
        }
        if theta.len() != self.parameter_count() {
            return Err(Error::Parameter {
                expected: self.parameter_count(),
                got: theta.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    /// Normalizes arbitrary amplitudes; the length must be a power of two.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::Dimension(format!(
                "statevector length {} is not a power of two",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Numeric("zero statevector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.qubits() - 1 - qubit)
    }

    /// `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]` on one qubit.
    pub fn apply_ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let mask = self.bit(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | mask];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[i | mask] = a0 * s + a1 * c;
            }
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cm = self.bit(control);
        let tm = self.bit(target);
        for i in 0..self.amplitudes.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amplitudes.swap(i, i | tm);
            }
        }
    }
}

fn rotation_layer(psi: &mut Statevector, angles: &[f64]) {
    for (qubit, &theta) in angles.iter().enumerate() {
        psi.apply_ry(qubit, theta);
    }
}

fn entangler(psi: &mut Statevector, cfg: &AnsatzConfig) {
    match cfg.entanglement {
        Entanglement::Full => {
            for i in 0..cfg.qubits {
                for j in (i + 1)..cfg.qubits {
                    psi.apply_cnot(i, j);
                }
            }
        }
    }
}

/// `|ψ(θ)⟩`: `depth` repetitions of (rotation layer, entangler) followed by a
/// final rotation layer, starting from `|0…0⟩`.
pub fn ansatz_state(theta: &[f64], cfg: &AnsatzConfig) -> Result<Statevector> {
    cfg.check(theta)?;
    let q = cfg.qubits;
    let mut psi = Statevector::zero(q);
    for layer in 0..cfg.depth {
        rotation_layer(&mut psi, &theta[layer * q..(layer + 1) * q]);
        entangler(&mut psi, cfg);
    }
    rotation_layer(&mut psi, &theta[cfg.depth * q..]);
    Ok(psi)
}

/// `⟨ψ|A|ψ⟩` with a dense matrix.
pub fn expectation(psi: &Statevector, a: &ComplexMatrix) -> Result<f64> {
    let amps = psi.amplitudes();
    if a.dim() != amps.len() {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, state has {} amplitudes",
            a.dim(),
            a.dim(),
            amps.len()
        )));
    }
    let n = amps.len();
    let entries = a.entries();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        let row = &entries[r * n..(r + 1) * n];
        let av: Complex64 = row.iter().zip(amps).map(|(x, y)| x * y).sum();
        acc += amps[r].conj() * av;
    }
    if acc.im.abs() > 1e-10 * acc.re.abs().max(1.0) {
        return Err(Error::Numeric(format!(
            "expectation has imaginary part {:.3e}; operator not Hermitian?",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// `Σ a_n ⟨ψ|P_n|ψ⟩` without forming a dense matrix.
pub fn expectation_pauli(psi: &Statevector, terms: &[PauliTerm]) -> Result<f64> {
    let q = psi.qubits();
    let amps = psi.amplitudes();
    let mut total = 0.0;
    for t in terms {
        if t.label.len() != q {
            return Err(Error::Dimension(format!(
                "label {} has length {}, state has {q} qubits",
                t.label,
                t.label.len()
            )));
        }
        let masks = PauliMasks::parse(&t.label)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (col, &amp) in amps.iter().enumerate() {
            acc += amps[col ^ masks.x].conj() * masks.phase(col) * amp;
        }
        total += t.coefficient * acc.re;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: Complex64, re: f64) -> bool {
        (a.re - re).abs() < 1e-12 && a.im.abs() < 1e-12
    }

    #[test]
    fn zero_angles_give_zero_state() {
        let cfg = AnsatzConfig::new(4, 3);
        let psi = ansatz_state(&vec![0.0; cfg.parameter_count()], &cfg).unwrap();
        assert_eq!(psi, Statevector::zero(4));
    }

    #[test]
    fn single_qubit_flip() {
        let cfg = AnsatzConfig::new(1, 0);
        let psi = ansatz_state(&[PI], &cfg).unwrap();
        assert!(close(psi.amplitudes()[0], 0.0));
        assert!(close(psi.amplitudes()[1], 1.0));
    }

    #[test]
    fn flip_then_cnot() {
        let cfg = AnsatzConfig::new(2, 1);
        let psi = ansatz_state(&[PI, 0.0, 0.0, 0.0], &cfg).unwrap();
        // |11> is index 3
        assert!(close(psi.amplitudes()[3], 1.0));
        assert!(psi.amplitudes()[..3].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn wrong_parameter_count() {
        let cfg = AnsatzConfig::new(4, 3);
        assert!(matches!(
            ansatz_state(&[0.0; 4], &cfg),
            Err(Error::Parameter { expected: 16, got: 4 })
        ));
    }

    #[test]
    fn basis_state_expectation() {
        let mut a = ComplexMatrix::zeros(4);
        for r in 0..4 {
            for c in 0..4 {
                a[(r, c)] = Complex64::new((r + c) as f64, if r == c { 0.0 } else { (c as f64) - (r as f64) });
            }
        }
        let psi = Statevector::zero(2);
        assert_eq!(expectation(&psi, &a).unwrap(), 0.0);
        let e = expectation(&psi, &ComplexMatrix::identity(4)).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!(expectation(&psi, &ComplexMatrix::identity(8)).is_err());
    }

    #[test]
    fn z_eigenstate() {
        let psi = Statevector::zero(4);
        let e = expectation_pauli(&psi, &[PauliTerm::new("ZIII", 1.0)]).unwrap();
        assert_eq!(e, 1.0);
        let c = expectation_pauli(&psi, &[PauliTerm::new("IIII", 2.5)]).unwrap();
        assert_eq!(c, 2.5);
        assert!(expectation_pauli(&psi, &[PauliTerm::new("ZI", 1.0)]).is_err());
    }

    #[test]
    fn norm_preserved_by_gates() {
        let cfg = AnsatzConfig::new(4, 3);
        let theta: Vec<f64> = (0..16).map(|k| 0.37 * k as f64 - 2.0).collect();
        let psi = ansatz_state(&theta, &cfg).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-13);
    }
}
