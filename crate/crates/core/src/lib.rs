//! Quantum mass and Hamiltonian-constraint operators for four
//! mini-superspace black hole models (rotating BTZ, charged RN, charged
//! RN-de Sitter and the 2D charged string black hole), their exact spectra,
//! and a statevector VQE that bounds the lowest mass eigenvalue from above.

pub mod ansatz;
pub mod basis;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod pauli;
pub mod report;
pub mod vqe;

pub use error::{Error, Result};
