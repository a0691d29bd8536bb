//! Black hole families: mass and Hamiltonian-constraint operators on a
//! [`VariablePair`], closed-form thermodynamics, mass potentials and the
//! classical contour fields.
//!
//! Operator conventions:
//!
//! * BTZ in `(x, y)`: `M = ½(p_x+p_y)² + ½(x−y)²/ℓ² + (J²/2)(x−y)⁻²`.
//! * RN in `(u, v)`: the operator is `4M`; reported masses are eigenvalues / 4.
//! * RN-dS: RN's `4M − (λ/96)(u−v)⁶`, same scaling.
//! * String2D in `(w, z)`: `M = (ℓ²/32)(p_w+p_z)² + ½(w−z)² + (q²/2)(w−z)⁻²`.
//!
//! Inverse powers of the coordinate difference are spectral functions of a
//! singular matrix (coincident grid points). How the kernel is treated is a
//! [`Conventions`] choice; products of non-commuting factors are symmetrized.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::basis::VariablePair;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitize, matrix_function, matrix_function_with_kernel, ComplexMatrix, SpectralFn,
    DEFAULT_CUTOFF,
};

/// Tolerance above which symmetrization of a product is logged.
pub const HERMITIZE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "btz")]
    Btz,
    #[serde(rename = "rn")]
    Rn,
    #[serde(rename = "rnds")]
    RnDs,
    #[serde(rename = "string2d")]
    String2D,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Btz => "btz",
            Family::Rn => "rn",
            Family::RnDs => "rnds",
            Family::String2D => "string2d",
        }
    }

    /// Factor between the diagonalized operator and the physical mass.
    pub fn mass_scale(self) -> f64 {
        match self {
            Family::Rn | Family::RnDs => 4.0,
            Family::Btz | Family::String2D => 1.0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "btz" => Ok(Family::Btz),
            "rn" => Ok(Family::Rn),
            "rnds" => Ok(Family::RnDs),
            "string2d" | "string" => Ok(Family::String2D),
            other => Err(Error::Parse(format!(
                "unknown model '{other}' (expected btz, rn, rnds or string2d)"
            ))),
        }
    }
}

/// A black hole family with its physical parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    /// Angular momentum, BTZ only.
    #[serde(rename = "J", skip_serializing_if = "Option::is_none", default)]
    pub rotation: Option<f64>,
    /// Charge, RN / RN-dS / String2D.
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none", default)]
    pub charge: Option<f64>,
    /// Positive cosmological constant, RN-dS only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_ell")]
    pub ell: f64,
}

fn default_ell() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn btz(j: f64) -> Self {
        Self {
            family: Family::Btz,
            rotation: Some(j),
            charge: None,
            lambda: None,
            ell: 1.0,
        }
    }

    pub fn rn(q: f64) -> Self {
        Self {
            family: Family::Rn,
            rotation: None,
            charge: Some(q),
            lambda: None,
            ell: 1.0,
        }
    }

    pub fn rnds(q: f64, lambda: f64) -> Self {
        Self {
            family: Family::RnDs,
            rotation: None,
            charge: Some(q),
            lambda: Some(lambda),
            ell: 1.0,
        }
    }

    pub fn string2d(q: f64) -> Self {
        Self {
            family: Family::String2D,
            rotation: None,
            charge: Some(q),
            lambda: None,
            ell: 1.0,
        }
    }

    pub fn with_ell(mut self, ell: f64) -> Self {
        self.ell = ell;
        self
    }

    /// Checks family/parameter consistency.
    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::Model(format!("ell must be positive, got {}", self.ell)));
        }
        let is_btz = self.family == Family::Btz;
        let is_rnds = self.family == Family::RnDs;
        match (is_btz, self.rotation) {
            (true, None) => return Err(Error::Model("BTZ requires J".into())),
            (false, Some(_)) => {
                return Err(Error::Model(format!("J is only valid for btz, not {}", self.family)))
            }
            _ => {}
        }
        match (is_btz, self.charge) {
            (false, None) => {
                return Err(Error::Model(format!("{} requires Q", self.family)));
            }
            (true, Some(_)) => return Err(Error::Model("Q is not a BTZ parameter".into())),
            _ => {}
        }
        match (is_rnds, self.lambda) {
            (true, None) => return Err(Error::Model("rnds requires lambda".into())),
            (true, Some(l)) if !(l > 0.0) => {
                return Err(Error::Model(format!("lambda must be positive, got {l}")))
            }
            (false, Some(_)) => {
                return Err(Error::Model(format!(
                    "lambda is only valid for rnds, not {}",
                    self.family
                )))
            }
            _ => {}
        }
        for (name, v) in [("J", self.rotation), ("Q", self.charge), ("lambda", self.lambda)] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::Model(format!("{name} must be finite")));
                }
            }
        }
        Ok(())
    }

    fn j(&self) -> f64 {
        self.rotation.unwrap_or(0.0)
    }

    fn q(&self) -> f64 {
        self.charge.unwrap_or(0.0)
    }

    fn lam(&self) -> f64 {
        self.lambda.unwrap_or(0.0)
    }

    /// The family's extremal (minimal) mass: `J/ℓ` for BTZ, `Q` otherwise.
    pub fn extremal_mass(&self) -> f64 {
        match self.family {
            Family::Btz => self.j().abs() / self.ell,
            _ => self.q().abs(),
        }
    }

    /// Short label such as `btz_J1` or `rnds_Q2_lambda0.01`.
    pub fn label(&self) -> String {
        match self.family {
            Family::Btz => format!("btz_J{}", self.j()),
            Family::Rn => format!("rn_Q{}", self.q()),
            Family::RnDs => format!("rnds_Q{}_lambda{}", self.q(), self.lam()),
            Family::String2D => format!("string2d_Q{}", self.q()),
        }
    }
}

/// How eigenvalues of the coordinate difference inside the cutoff are
/// treated by the inverse-square term of the mass operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum KernelTreatment {
    /// Moore–Penrose: the singular subspace contributes nothing.
    PseudoInverse,
    /// The singular subspace receives a fixed large value, a finite stand-in
    /// for the divergent barrier at coincident points.
    Wall(f64),
}

impl KernelTreatment {
    fn value(self) -> f64 {
        match self {
            KernelTreatment::PseudoInverse => 0.0,
            KernelTreatment::Wall(v) => v,
        }
    }
}

/// Parses `pinv`, `wall` (default value) or `wall:<value>`.
impl FromStr for KernelTreatment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.split_once(':') {
            None if lower == "pinv" || lower == "pseudo-inverse" => Ok(KernelTreatment::PseudoInverse),
            None if lower == "wall" => Ok(KernelTreatment::Wall(DEFAULT_WALL)),
            Some(("wall", v)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(KernelTreatment::Wall(x)),
                _ => Err(Error::Parse(format!("bad wall value '{v}'"))),
            },
            _ => Err(Error::Parse(format!(
                "unknown kernel treatment '{s}' (expected pinv, wall or wall:<value>)"
            ))),
        }
    }
}

impl fmt::Display for KernelTreatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelTreatment::PseudoInverse => f.write_str("pinv"),
            KernelTreatment::Wall(v) => write!(f, "wall:{v}"),
        }
    }
}

/// Discretization conventions for the singular potential terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    /// Absolute eigenvalue cutoff for inverse powers.
    pub cutoff: f64,
    /// Kernel treatment of the inverse-square term in the mass operator.
    pub mass_kernel: KernelTreatment,
}

/// Kernel value used by the default wall convention.
pub const DEFAULT_WALL: f64 = 1.0e2;

impl Default for Conventions {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            mass_kernel: KernelTreatment::Wall(DEFAULT_WALL),
        }
    }
}

impl Conventions {
    pub fn pseudo_inverse() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            mass_kernel: KernelTreatment::PseudoInverse,
        }
    }
}

/// Which operator a computation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "mass")]
    Mass,
    /// `|H|`, the absolute value of the Hamiltonian constraint.
    #[serde(rename = "absH")]
    AbsH,
    /// `|[H, M]| = √(C†C)` with `C = HM − MH`.
    #[serde(rename = "absComm")]
    AbsCommutator,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Mass => "mass",
            OperatorKind::AbsH => "absH",
            OperatorKind::AbsCommutator => "absComm",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mass" | "m" => Ok(OperatorKind::Mass),
            "absh" | "h" => Ok(OperatorKind::AbsH),
            "abscomm" | "abscommutator" | "comm" => Ok(OperatorKind::AbsCommutator),
            other => Err(Error::Parse(format!(
                "unknown operator '{other}' (expected mass, absH or absComm)"
            ))),
        }
    }
}

fn check_vars(spec: &ModelSpec, vars: &VariablePair) -> Result<()> {
    spec.validate()?;
    let d = vars.dim();
    for m in [&vars.u, &vars.v, &vars.pu, &vars.pv] {
        if m.dim() != d {
            return Err(Error::Model(format!(
                "variable pair matrices must be {d}x{d}, found {}x{}",
                m.dim(),
                m.dim()
            )));
        }
    }
    Ok(())
}

/// Mass operator (scaled form for RN/RN-dS) with the default conventions.
pub fn build_mass(spec: &ModelSpec, vars: &VariablePair) -> Result<ComplexMatrix> {
    build_mass_with(spec, vars, &Conventions::default())
}

pub fn build_mass_with(
    spec: &ModelSpec,
    vars: &VariablePair,
    conv: &Conventions,
) -> Result<ComplexMatrix> {
    check_vars(spec, vars)?;
    let diff = &vars.u - &vars.v;
    let psum = &vars.pu + &vars.pv;
    let kinetic = psum.matmul(&psum);
    let diff2 = diff.matmul(&diff);
    let inv2 = matrix_function_with_kernel(
        &diff,
        SpectralFn::InvPow(2),
        conv.cutoff,
        conv.mass_kernel.value(),
    )?;
    let ell = spec.ell;
    let m = match spec.family {
        Family::Btz => {
            let j = spec.j();
            &(&kinetic.scale(0.5) + &diff2.scale(0.5 / (ell * ell))) + &inv2.scale(0.5 * j * j)
        }
        Family::Rn | Family::RnDs => {
            let q = spec.q();
            let mut m = &(&kinetic.scale(0.5) + &diff2.scale(0.5)) + &inv2.scale(8.0 * q * q);
            if spec.family == Family::RnDs {
                m = &m - &diff.pow(6).scale(spec.lam() / 96.0);
            }
            m
        }
        Family::String2D => {
            let q = spec.q();
            &(&kinetic.scale(ell * ell / 32.0) + &diff2.scale(0.5)) + &inv2.scale(0.5 * q * q)
        }
    };
    Ok(hermitize(&m, HERMITIZE_TOL).matrix)
}

/// Hamiltonian constraint (scaled by `2b` for RN/RN-dS), symmetrized.
///
/// Odd inverse powers have no sign-definite limit at coincident points, so
/// the constraint always uses the Moore–Penrose treatment.
pub fn build_hamiltonian(spec: &ModelSpec, vars: &VariablePair) -> Result<ComplexMatrix> {
    build_hamiltonian_with(spec, vars, &Conventions::default())
}

pub fn build_hamiltonian_with(
    spec: &ModelSpec,
    vars: &VariablePair,
    conv: &Conventions,
) -> Result<ComplexMatrix> {
    check_vars(spec, vars)?;
    let (u, v, pu, pv) = (&vars.u, &vars.v, &vars.pu, &vars.pv);
    let diff = u - v;
    let sum = u + v;
    let kin = &pu.matmul(pu) - &pv.matmul(pv);
    let quad = &u.matmul(u) - &v.matmul(v);
    let ell = spec.ell;
    let h = match spec.family {
        Family::Btz => {
            let j = spec.j();
            let inv3 = matrix_function(&diff, SpectralFn::InvPow(3), conv.cutoff)?;
            let coupling = sum.sym_product(&inv3);
            &(&kin.scale(0.5) + &quad.scale(0.5 / (ell * ell))) - &coupling.scale(0.5 * j * j)
        }
        Family::Rn | Family::RnDs => {
            let q = spec.q();
            let inv4 = matrix_function(&diff, SpectralFn::InvPow(4), conv.cutoff)?;
            let coupling = quad.sym_product(&inv4);
            let mut h = &(&kin.scale(0.5) + &quad.scale(0.5)) - &coupling.scale(8.0 * q * q);
            if spec.family == Family::RnDs {
                let cosmo = quad.sym_product(&diff.pow(4));
                h = &h - &cosmo.scale(spec.lam() / 32.0);
            }
            h
        }
        Family::String2D => {
            let q = spec.q();
            let inv3 = matrix_function(&diff, SpectralFn::InvPow(3), conv.cutoff)?;
            let coupling = sum.sym_product(&inv3);
            &(&kin.scale(1.0 / 16.0) + &quad.scale(1.0 / (ell * ell))) - &coupling.scale(q * q)
        }
    };
    Ok(hermitize(&h, HERMITIZE_TOL).matrix)
}

/// `|H|` via the spectral absolute value.
pub fn build_abs_constraint(spec: &ModelSpec, vars: &VariablePair) -> Result<ComplexMatrix> {
    build_abs_constraint_with(spec, vars, &Conventions::default())
}

pub fn build_abs_constraint_with(
    spec: &ModelSpec,
    vars: &VariablePair,
    conv: &Conventions,
) -> Result<ComplexMatrix> {
    let h = build_hamiltonian_with(spec, vars, conv)?;
    matrix_function(&h, SpectralFn::Abs, conv.cutoff)
}

/// `√(C†C)` for `C = HM − MH`.
pub fn commutator_abs(h: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let c = h.commutator(m);
    let ctc = hermitize(&c.adjoint().matmul(&c), HERMITIZE_TOL).matrix;
    let cutoff = 1e-10 * ctc.max_abs().max(1.0);
    matrix_function(&ctc, SpectralFn::SqrtPsd, cutoff)
}

pub fn build_commutator_abs(spec: &ModelSpec, vars: &VariablePair) -> Result<ComplexMatrix> {
    build_commutator_abs_with(spec, vars, &Conventions::default())
}

pub fn build_commutator_abs_with(
    spec: &ModelSpec,
    vars: &VariablePair,
    conv: &Conventions,
) -> Result<ComplexMatrix> {
    let h = build_hamiltonian_with(spec, vars, conv)?;
    let m = build_mass_with(spec, vars, conv)?;
    commutator_abs(&h, &m)
}

/// Builds the requested operator together with its reporting scale
/// (the mass scale for [`OperatorKind::Mass`], 1 otherwise).
pub fn build_operator(
    spec: &ModelSpec,
    vars: &VariablePair,
    kind: OperatorKind,
    conv: &Conventions,
) -> Result<(ComplexMatrix, f64)> {
    match kind {
        OperatorKind::Mass => Ok((build_mass_with(spec, vars, conv)?, spec.family.mass_scale())),
        OperatorKind::AbsH => Ok((build_abs_constraint_with(spec, vars, conv)?, 1.0)),
        OperatorKind::AbsCommutator => Ok((build_commutator_abs_with(spec, vars, conv)?, 1.0)),
    }
}

fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

/// Horizons, entropy and temperature of a classical solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoRecord {
    pub r_plus: f64,
    pub r_minus: f64,
    pub entropy: f64,
    /// Inverse temperature; infinite (serialized as `null`) at extremality.
    #[serde(serialize_with = "serialize_extended")]
    pub beta: f64,
    pub temperature: f64,
}

/// Closed-form thermodynamics at mass `m`.
///
/// BTZ uses `G = 1/8`; RN and RN-dS use the RN expressions with `G = 1`;
/// String2D uses `φ₀ = 0`. Masses below the extremal bound are rejected;
/// a mass exactly at the bound gives `T = 0`.
pub fn thermo(spec: &ModelSpec, m: f64) -> Result<ThermoRecord> {
    spec.validate()?;
    if !m.is_finite() {
        return Err(Error::Domain(format!("mass must be finite, got {m}")));
    }
    let ell = spec.ell;
    match spec.family {
        Family::Btz => {
            let j = spec.j();
            let disc = m * m - j * j / (ell * ell);
            if m < 0.0 || disc < 0.0 {
                return Err(Error::Extremality(format!("BTZ needs M >= |J|/ell, got M={m}, J={j}")));
            }
            let root = disc.sqrt();
            let rp2 = ell * ell / 2.0 * (m + root);
            let rm2 = ell * ell / 2.0 * (m - root);
            let rp = rp2.sqrt();
            let rm = rm2.max(0.0).sqrt();
            let g = 1.0 / 8.0;
            let gap = rp2 - rm2;
            Ok(ThermoRecord {
                r_plus: rp,
                r_minus: rm,
                entropy: 2.0 * PI * rp / (4.0 * g),
                beta: 2.0 * PI * rp * ell * ell / gap,
                temperature: gap / (2.0 * PI * rp * ell * ell),
            })
        }
        Family::Rn | Family::RnDs => {
            let q = spec.q();
            let disc = m * m - q * q;
            if m < 0.0 || disc < 0.0 {
                return Err(Error::Extremality(format!("RN needs M >= |Q|, got M={m}, Q={q}")));
            }
            let root = disc.sqrt();
            let rp = m + root;
            Ok(ThermoRecord {
                r_plus: rp,
                r_minus: m - root,
                entropy: PI * rp * rp,
                beta: 2.0 * PI * rp * rp / root,
                temperature: root / (2.0 * PI * rp * rp),
            })
        }
        Family::String2D => {
            let q = spec.q();
            let disc = m * m - q * q;
            if m <= 0.0 || disc < 0.0 {
                return Err(Error::Extremality(format!(
                    "string2d needs m >= |q| and m > 0, got m={m}, q={q}"
                )));
            }
            let root = disc.sqrt();
            let outer = m + root;
            let inner = m - root;
            Ok(ThermoRecord {
                r_plus: ell * outer.ln(),
                r_minus: if inner > 0.0 { ell * inner.ln() } else { f64::NEG_INFINITY },
                entropy: 4.0 * PI * outer,
                beta: 2.0 * PI * ell * outer / root,
                temperature: root / (2.0 * PI * ell * outer),
            })
        }
    }
}

/// Mass potential `V_M(b)` of the family.
///
/// For String2D the variable is `b = e^{−φ}` and `V_M = b²/2 + Q²/(2b²)`.
pub fn mass_potential(spec: &ModelSpec, b: f64) -> Result<f64> {
    spec.validate()?;
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    let ell = spec.ell;
    Ok(match spec.family {
        Family::Btz => b * b / (ell * ell) + spec.j().powi(2) / (4.0 * b * b),
        Family::Rn => b / 2.0 + spec.q().powi(2) / (2.0 * b),
        Family::RnDs => b / 2.0 - spec.lam() * b.powi(3) / 6.0 + spec.q().powi(2) / (2.0 * b),
        Family::String2D => b * b / 2.0 + spec.q().powi(2) / (2.0 * b * b),
    })
}

/// Classical mass as a function of `(p_a, b)`.
pub fn classical_mass(spec: &ModelSpec, p_a: f64, b: f64) -> Result<f64> {
    let v = mass_potential(spec, b)?;
    let ell = spec.ell;
    let kinetic = match spec.family {
        Family::Btz => p_a * p_a,
        Family::Rn | Family::RnDs => p_a * p_a / (2.0 * b),
        // e^{2φ} = 1/b²
        Family::String2D => ell * ell * p_a * p_a / (8.0 * b * b),
    };
    Ok(kinetic + v)
}

/// Rectangle in `(p_a, b)` sampled on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub p_min: f64,
    pub p_max: f64,
    pub p_samples: usize,
    pub b_min: f64,
    pub b_max: f64,
    pub b_samples: usize,
}

impl Grid2 {
    fn validate(&self) -> Result<()> {
        let finite = [self.p_min, self.p_max, self.b_min, self.b_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.p_max < self.p_min || self.b_max < self.b_min {
            return Err(Error::Domain("grid bounds must be finite and ordered".into()));
        }
        if self.p_samples < 1 || self.b_samples < 1 {
            return Err(Error::Domain("grid needs at least one sample per axis".into()));
        }
        if !(self.b_min > 0.0) {
            return Err(Error::Domain(format!("b must stay positive, b_min = {}", self.b_min)));
        }
        Ok(())
    }
}

/// Evenly spaced samples including both endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// One contour sample: `residual = M_classical(p_a, b) − M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub p_a: f64,
    pub b: f64,
    pub residual: f64,
}

/// Residual field whose zero level set is the classical trajectory at mass `m`.
pub fn contour_field(spec: &ModelSpec, m: f64, grid: &Grid2) -> Result<Vec<ContourPoint>> {
    grid.validate()?;
    let ps = linspace(grid.p_min, grid.p_max, grid.p_samples);
    let bs = linspace(grid.b_min, grid.b_max, grid.b_samples);
    let mut out = Vec::with_capacity(ps.len() * bs.len());
    for &b in &bs {
        for &p_a in &ps {
            out.push(ContourPoint {
                p_a,
                b,
                residual: classical_mass(spec, p_a, b)? - m,
            });
        }
    }
    Ok(out)
}

/// Nariai mass: the local maximum of the RN-dS mass potential
/// `V(b) = b/2 − λb³/6 + Q²/(2b)`.
pub fn nariai_mass(q: f64, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::NoNariai(format!("lambda must be positive, got {lambda}")));
    }
    if !q.is_finite() {
        return Err(Error::Domain("Q must be finite".into()));
    }
    // V'(b) = 0  <=>  λx² − x + Q² = 0 with x = b²; the maximum is the larger root.
    let disc = 1.0 - 4.0 * lambda * q * q;
    if disc < 0.0 {
        return Err(Error::NoNariai(format!(
            "V' has no real zero for Q={q}, lambda={lambda}"
        )));
    }
    let dv = |b: f64| 0.5 - lambda * b * b / 2.0 - q * q / (2.0 * b * b);
    // V' is positive at the vertex x = 1/(2λ) and negative at x = 2/λ.
    let mut lo = (1.0 / (2.0 * lambda)).sqrt();
    let mut hi = (2.0 / lambda).sqrt();
    if dv(lo) < 0.0 {
        return Err(Error::NoNariai(format!("no local maximum for Q={q}, lambda={lambda}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    let b = 0.5 * (lo + hi);
    Ok(b / 2.0 - lambda * b.powi(3) / 6.0 + q * q / (2.0 * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{variable_pair, BasisKind};
    use crate::linalg::eigvals_hermitian;

    fn lowest(spec: &ModelSpec, basis: BasisKind, conv: &Conventions) -> f64 {
        let vars = variable_pair(4, basis).unwrap();
        let m = build_mass_with(spec, &vars, conv).unwrap();
        eigvals_hermitian(&m).unwrap()[0] / spec.family.mass_scale()
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::btz(1.0).validate().is_ok());
        let mut bad = ModelSpec::rn(1.0);
        bad.rotation = Some(1.0);
        assert!(matches!(bad.validate(), Err(Error::Model(_))));
        let mut bad = ModelSpec::rnds(1.0, 0.01);
        bad.lambda = None;
        assert!(bad.validate().is_err());
        assert!(ModelSpec::rnds(1.0, -0.1).validate().is_err());
        assert!(ModelSpec::string2d(1.0).with_ell(0.0).validate().is_err());
        let mut bad = ModelSpec::btz(1.0);
        bad.lambda = Some(0.1);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn family_parse() {
        assert_eq!("RN-dS".parse::<Family>().unwrap(), Family::RnDs);
        assert_eq!("string".parse::<Family>().unwrap(), Family::String2D);
        assert!("kerr".parse::<Family>().is_err());
    }

    #[test]
    fn operators_hermitian() {
        let specs = [
            ModelSpec::btz(1.0),
            ModelSpec::rn(2.0),
            ModelSpec::rnds(2.0, 0.01),
            ModelSpec::string2d(1.0),
        ];
        for basis in [BasisKind::Oscillator, BasisKind::Position] {
            let vars = variable_pair(4, basis).unwrap();
            for s in &specs {
                for kind in [OperatorKind::Mass, OperatorKind::AbsH, OperatorKind::AbsCommutator] {
                    let (op, _) = build_operator(s, &vars, kind, &Conventions::default()).unwrap();
                    assert!(op.is_hermitian(1e-10), "{} {basis} {kind}", s.label());
                }
            }
        }
    }

    #[test]
    fn position_string_constraint_is_diagonal_potential() {
        // In the position basis every potential factor is diagonal, so the
        // symmetrized coupling equals the plain product.
        let vars = variable_pair(4, BasisKind::Position).unwrap();
        let diff = &vars.u - &vars.v;
        let sum = &vars.u + &vars.v;
        let inv3 = matrix_function(&diff, SpectralFn::InvPow(3), DEFAULT_CUTOFF).unwrap();
        let plain = sum.matmul(&inv3);
        assert!(plain.max_abs_diff(&sum.sym_product(&inv3)) < 1e-14);
    }

    #[test]
    fn abs_constraint_is_psd_with_zero_mode() {
        let vars = variable_pair(4, BasisKind::Position).unwrap();
        let a = build_abs_constraint(&ModelSpec::string2d(1.0), &vars).unwrap();
        let ev = eigvals_hermitian(&a).unwrap();
        assert!(ev[0] >= -1e-10);
        assert!(ev[0].abs() < 1e-9);
    }

    #[test]
    fn commutator_of_equal_operators_vanishes() {
        let z = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let c = commutator_abs(&z, &z).unwrap();
        assert_eq!(c.max_abs(), 0.0);
    }

    #[test]
    fn rn_mass_nondecreasing_in_charge() {
        let conv = Conventions::default();
        for basis in [BasisKind::Oscillator, BasisKind::Position] {
            let m1 = lowest(&ModelSpec::rn(1.0), basis, &conv);
            let m2 = lowest(&ModelSpec::rn(2.0), basis, &conv);
            assert!(m2 >= m1, "{basis}: {m1} vs {m2}");
        }
    }

    #[test]
    fn uncharged_mass_is_nonnegative() {
        let conv = Conventions::default();
        let specs = [
            ModelSpec::btz(0.0),
            ModelSpec::rn(0.0),
            ModelSpec::string2d(0.0),
        ];
        for basis in [BasisKind::Oscillator, BasisKind::Position] {
            for s in &specs {
                let m = lowest(s, basis, &conv);
                assert!(m >= -1e-10, "{} {basis}", s.label());
            }
        }
    }

    #[test]
    fn thermo_extremal_rn() {
        let t = thermo(&ModelSpec::rn(2.0), 2.0).unwrap();
        assert_eq!(t.r_plus, 2.0);
        assert_eq!(t.r_minus, 2.0);
        assert_eq!(t.temperature, 0.0);
        assert!(t.beta.is_infinite());
    }

    #[test]
    fn thermo_rn_closed_form() {
        let t = thermo(&ModelSpec::rn(2.0), 2.5).unwrap();
        assert_eq!(t.r_plus, 4.0);
        assert_eq!(t.r_minus, 1.0);
        assert!((t.entropy - 16.0 * PI).abs() < 1e-12);
        assert!((t.entropy - 50.26548).abs() < 1e-5);
        assert!((t.temperature - 1.5 / (2.0 * PI * 16.0)).abs() < 1e-15);
        assert!((t.temperature - 0.0149208).abs() < 1e-7);
    }

    #[test]
    fn thermo_btz_closed_form() {
        let t = thermo(&ModelSpec::btz(1.0), 2.0).unwrap();
        assert!((t.r_plus - 1.366025).abs() < 1e-6);
        assert!((t.temperature - 0.201801).abs() < 1e-6);
        assert!((t.entropy - 4.0 * std::f64::consts::PI * t.r_plus).abs() < 1e-12);
        assert!((t.entropy - 17.165981).abs() < 1e-6);
    }

    #[test]
    fn thermo_sub_extremal_rejected() {
        assert!(matches!(thermo(&ModelSpec::rn(2.0), 1.5), Err(Error::Extremality(_))));
        assert!(matches!(thermo(&ModelSpec::btz(3.0), 2.0), Err(Error::Extremality(_))));
        assert!(matches!(thermo(&ModelSpec::string2d(2.0), 1.0), Err(Error::Extremality(_))));
    }

    #[test]
    fn nariai_reference_and_uncharged_limit() {
        let m = nariai_mass(2.0, 0.01).unwrap();
        assert!((m - 3.535433).abs() < 1e-4, "{m}");
        let m0 = nariai_mass(0.0, 0.01).unwrap();
        assert!((m0 - 1.0 / (3.0 * 0.01f64.sqrt())).abs() < 1e-9);
        assert!(matches!(nariai_mass(2.0, 0.0), Err(Error::NoNariai(_))));
        assert!(matches!(nariai_mass(10.0, 0.01), Err(Error::NoNariai(_))));
    }

    #[test]
    fn potentials() {
        // BTZ minimum at b⁴ = J²ℓ²/4 equals J/ℓ.
        let b = 0.5f64.sqrt();
        assert!((mass_potential(&ModelSpec::btz(1.0), b).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(mass_potential(&ModelSpec::rn(2.0), 2.0).unwrap(), 2.0);
        assert!(matches!(mass_potential(&ModelSpec::rn(2.0), 0.0), Err(Error::Domain(_))));
        let spec = ModelSpec::rnds(2.0, 0.01);
        let x = (1.0 + (1.0 - 4.0 * 0.01 * 4.0f64).sqrt()) / (2.0 * 0.01);
        let v = mass_potential(&spec, x.sqrt()).unwrap();
        assert!((v - nariai_mass(2.0, 0.01).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn contour_turning_points() {
        let spec = ModelSpec::rn(2.0);
        let grid = Grid2 {
            p_min: 0.0,
            p_max: 0.0,
            p_samples: 1,
            b_min: 1.0,
            b_max: 4.0,
            b_samples: 4,
        };
        let f = contour_field(&spec, 2.5, &grid).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f[0].residual.abs() < 1e-15);
        assert!(f[3].residual.abs() < 1e-15);
        assert!(f[1].residual < 0.0);

        let btz = ModelSpec::btz(1.0);
        let b = 1.2;
        let p = (2.0 - mass_potential(&btz, b).unwrap()).sqrt();
        assert!(classical_mass(&btz, p, b).unwrap() - 2.0 < 1e-14);

        let mut bad = grid;
        bad.b_min = 0.0;
        assert!(contour_field(&spec, 2.5, &bad).is_err());
    }
}
