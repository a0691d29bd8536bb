//! Exact diagonalization of the discretized operators.

use serde::{Deserialize, Serialize};

use crate::basis::{variable_pair, BasisKind};
use crate::error::Result;
use crate::linalg::eigvals_hermitian;
use crate::models::{build_operator, Conventions, ModelSpec, OperatorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub model: ModelSpec,
    pub basis: BasisKind,
    pub qubits: usize,
    pub operator: OperatorKind,
    pub conventions: Conventions,
    pub scaled_eigenvalues: Vec<f64>,
    /// Lowest eigenvalue divided by the family scale (mass only; other
    /// operators have scale 1).
    pub unscaled_lowest_mass: f64,
}

pub fn exact_spectrum(
    spec: &ModelSpec,
    basis: BasisKind,
    qubits: usize,
    kind: OperatorKind,
) -> Result<SpectrumReport> {
    exact_spectrum_with(spec, basis, qubits, kind, &Conventions::default())
}

pub fn exact_spectrum_with(
    spec: &ModelSpec,
    basis: BasisKind,
    qubits: usize,
    kind: OperatorKind,
    conv: &Conventions,
) -> Result<SpectrumReport> {
    let vars = variable_pair(qubits, basis)?;
    let (op, scale) = build_operator(spec, &vars, kind, conv)?;
    let scaled_eigenvalues = eigvals_hermitian(&op)?;
    Ok(SpectrumReport {
        model: *spec,
        basis,
        qubits,
        operator: kind,
        conventions: *conv,
        unscaled_lowest_mass: scaled_eigenvalues[0] / scale,
        scaled_eigenvalues,
    })
}

/// Lowest eigenvalue, divided by the family scale for the mass operator.
pub fn exact_lowest(
    spec: &ModelSpec,
    basis: BasisKind,
    qubits: usize,
    kind: OperatorKind,
) -> Result<f64> {
    Ok(exact_spectrum(spec, basis, qubits, kind)?.unscaled_lowest_mass)
}

pub fn exact_lowest_with(
    spec: &ModelSpec,
    basis: BasisKind,
    qubits: usize,
    kind: OperatorKind,
    conv: &Conventions,
) -> Result<f64> {
    Ok(exact_spectrum_with(spec, basis, qubits, kind, conv)?.unscaled_lowest_mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_constraint_spectrum_nonnegative() {
        let r = exact_spectrum(&ModelSpec::string2d(1.0), BasisKind::Position, 4, OperatorKind::AbsH)
            .unwrap();
        assert_eq!(r.scaled_eigenvalues.len(), 16);
        assert!(r.scaled_eigenvalues.iter().all(|&x| x >= -1e-10));
        assert!(r.scaled_eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mass_report_unscales() {
        let r = exact_spectrum(&ModelSpec::rn(1.0), BasisKind::Oscillator, 4, OperatorKind::Mass)
            .unwrap();
        assert_eq!(r.unscaled_lowest_mass, r.scaled_eigenvalues[0] / 4.0);
    }
}
