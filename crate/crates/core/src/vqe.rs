//! Variational minimization of `⟨ψ(θ)|A|ψ(θ)⟩` over the Ry ansatz angles.
//!
//! The default optimizer is a quasi-Newton (BFGS) local descent with an
//! Armijo backtracking line search, driven by exact parameter-shift
//! gradients. A Nelder–Mead simplex is available as a derivative-free
//! fallback. Restarts draw their initial angles from a seeded ChaCha
//! generator, so runs are reproducible bit for bit.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ansatz_state, expectation, AnsatzConfig};
use crate::basis::{variable_pair, BasisKind};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::models::{build_operator, Conventions, ModelSpec, OperatorKind};

/// Energy of the ansatz state at `theta`.
pub fn energy(theta: &[f64], cfg: &AnsatzConfig, operator: &ComplexMatrix) -> Result<f64> {
    let psi = ansatz_state(theta, cfg)?;
    expectation(&psi, operator)
}

/// Parameter-shift gradient `g_k = ½[E(θ + π/2 e_k) − E(θ − π/2 e_k)]`.
pub fn gradient(theta: &[f64], cfg: &AnsatzConfig, operator: &ComplexMatrix) -> Result<Vec<f64>> {
    cfg.check(theta)?;
    let mut shifted = theta.to_vec();
    let mut g = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        shifted[k] = theta[k] + FRAC_PI_2;
        let plus = energy(&shifted, cfg, operator)?;
        shifted[k] = theta[k] - FRAC_PI_2;
        let minus = energy(&shifted, cfg, operator)?;
        shifted[k] = theta[k];
        g.push(0.5 * (plus - minus));
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// BFGS with Armijo backtracking.
    QuasiNewton,
    /// Nelder–Mead simplex.
    Simplex,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "quasi-newton" | "bfgs" => Ok(Method::QuasiNewton),
            "simplex" | "nelder-mead" => Ok(Method::Simplex),
            other => Err(Error::Parse(format!(
                "unknown method '{other}' (expected quasi-newton or simplex)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub method: Method,
    pub max_iterations: usize,
    /// Stop when an accepted step changes the objective by less than this.
    pub f_tol: f64,
    /// Stop when the gradient norm falls below this (quasi-Newton only).
    pub grad_tol: f64,
    /// Largest parameter-space step length tried by the line search.
    pub max_step: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            method: Method::QuasiNewton,
            max_iterations: 500,
            f_tol: 1e-9,
            grad_tol: 1e-10,
            max_step: 1.0,
        }
    }
}

/// Outcome of one local minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub value: f64,
    pub theta: Vec<f64>,
    /// Every objective evaluation as (evaluation index, value).
    pub history: Vec<(usize, f64)>,
    pub iterations: usize,
    pub converged: bool,
}

struct Recorder<F> {
    f: F,
    history: Vec<(usize, f64)>,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Recorder<F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("objective returned {v}")));
        }
        self.history.push((self.history.len(), v));
        Ok(v)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Local minimization from `theta0`.
pub fn minimize<F, G>(
    objective: F,
    gradient: G,
    theta0: &[f64],
    settings: &OptimizerSettings,
) -> Result<MinimizeOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if theta0.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("initial point is not finite".into()));
    }
    let mut rec = Recorder {
        f: objective,
        history: Vec::new(),
    };
    let (value, theta, iterations, converged) = match settings.method {
        Method::QuasiNewton => bfgs(&mut rec, gradient, theta0, settings)?,
        Method::Simplex => nelder_mead(&mut rec, theta0, settings)?,
    };
    Ok(MinimizeOutcome {
        value,
        theta,
        history: rec.history,
        iterations,
        converged,
    })
}

fn bfgs<F, G>(
    rec: &mut Recorder<F>,
    mut grad: G,
    theta0: &[f64],
    s: &OptimizerSettings,
) -> Result<(f64, Vec<f64>, usize, bool)>
where
    F: FnMut(&[f64]) -> Result<f64>,
    G: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACK: usize = 60;

    let n = theta0.len();
    let mut x = theta0.to_vec();
    let mut fx = rec.eval(&x)?;
    let mut g = grad(&x)?;
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("gradient is not finite".into()));
    }
    // inverse Hessian approximation, row-major
    let identity = |n: usize| {
        let mut h = vec![0.0; n * n];
        (0..n).for_each(|i| h[i * n + i] = 1.0);
        h
    };
    let mut h = identity(n);
    let mut fresh = true;

    for iter in 0..s.max_iterations {
        if norm(&g) < s.grad_tol {
            return Ok((fx, x, iter, true));
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            h = identity(n);
            fresh = true;
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let dn = norm(&d);
        let mut alpha = if dn > s.max_step { s.max_step / dn } else { 1.0 };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + alpha * di).collect();
            let ft = rec.eval(&trial)?;
            if ft <= fx + ARMIJO * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if fresh {
                // No descent even along the gradient: stationary to working precision.
                return Ok((fx, x, iter, true));
            }
            h = identity(n);
            fresh = true;
            continue;
        };

        let g_new = grad(&x_new)?;
        if g_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("gradient is not finite".into()));
        }
        let step: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &y);
        if sy > 1e-12 * norm(&step) * norm(&y) {
            if fresh {
                // Rescale the initial identity before the first update.
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
            }
            bfgs_update(&mut h, &step, &y, sy);
            fresh = false;
        }
        let delta = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if delta.abs() < s.f_tol {
            return Ok((fx, x, iter + 1, true));
        }
    }
    Ok((fx, x, s.max_iterations, false))
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

fn nelder_mead<F>(
    rec: &mut Recorder<F>,
    theta0: &[f64],
    s: &OptimizerSettings,
) -> Result<(f64, Vec<f64>, usize, bool)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = theta0.len();
    let step = 0.5;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((theta0.to_vec(), rec.eval(theta0)?));
    for i in 0..n {
        let mut p = theta0.to_vec();
        p[i] += step;
        let f = rec.eval(&p)?;
        simplex.push((p, f));
    }
    let sort = |sx: &mut Vec<(Vec<f64>, f64)>| sx.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);

    for iter in 0..s.max_iterations {
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() < s.f_tol {
            return Ok((simplex[0].1, simplex[0].0.clone(), iter, true));
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = rec.eval(&xr)?;
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = rec.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(-0.5);
                let fc = rec.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = rec.eval(&xc)?;
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let p: Vec<f64> = best
                        .iter()
                        .zip(&vertex.0)
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    let f = rec.eval(&p)?;
                    *vertex = (p, f);
                }
            }
        }
        sort(&mut simplex);
    }
    Ok((simplex[0].1, simplex[0].0.clone(), s.max_iterations, false))
}

/// Restart count used when none is given.
pub const DEFAULT_RESTARTS: usize = 5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct VqeSettings {
    pub optimizer: OptimizerSettings,
    pub conventions: Conventions,
}

/// Best restart of a VQE run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeResult {
    /// Lowest objective value found (scaled operator).
    pub best_value: f64,
    /// `best_value / scale`; for the mass operator this is the physical mass.
    pub unscaled_value: f64,
    pub scale: f64,
    pub best_theta: Vec<f64>,
    /// Objective evaluations of the best restart.
    pub history: Vec<(usize, f64)>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Seeded initial angle vectors, uniform in `[−π, π]`.
pub fn initial_angles(seed: u64, restarts: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts)
        .map(|_| (0..count).map(|_| rng.gen_range(-PI..=PI)).collect())
        .collect()
}

/// VQE on an explicit operator; `scale` is divided out for `unscaled_value`.
pub fn vqe_on_operator(
    operator: &ComplexMatrix,
    scale: f64,
    cfg: &AnsatzConfig,
    seed: u64,
    restarts: usize,
    settings: &OptimizerSettings,
) -> Result<VqeResult> {
    if operator.dim() != 1 << cfg.qubits {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, ansatz has {} qubits",
            operator.dim(),
            operator.dim(),
            cfg.qubits
        )));
    }
    if restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let starts = initial_angles(seed, restarts, cfg.parameter_count());
    let outcomes: Vec<Result<MinimizeOutcome>> = starts
        .par_iter()
        .map(|theta0| {
            minimize(
                |t| energy(t, cfg, operator),
                |t| gradient(t, cfg, operator),
                theta0,
                settings,
            )
        })
        .collect();

    let mut best: Option<MinimizeOutcome> = None;
    let mut last_err = None;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                if best.as_ref().is_none_or(|b| o.value < b.value) {
                    best = Some(o);
                }
            }
            Err(e) => {
                log::warn!("VQE restart aborted: {e}");
                last_err = Some(e);
            }
        }
    }
    let best = match best {
        Some(b) => b,
        None => return Err(last_err.unwrap_or_else(|| Error::Numeric("no restart completed".into()))),
    };
    // The reported value is the minimum over the recorded history.
    let best_value = best
        .history
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);
    Ok(VqeResult {
        best_value,
        unscaled_value: best_value / scale,
        scale,
        best_theta: best.theta,
        history: best.history,
        restarts_used: restarts,
        converged: best.converged,
    })
}

/// Builds the operator for a model and runs VQE with default settings.
pub fn run_vqe(
    spec: &ModelSpec,
    basis: BasisKind,
    cfg: &AnsatzConfig,
    kind: OperatorKind,
    seed: u64,
    restarts: usize,
) -> Result<VqeResult> {
    run_vqe_with(spec, basis, cfg, kind, seed, restarts, &VqeSettings::default())
}

pub fn run_vqe_with(
    spec: &ModelSpec,
    basis: BasisKind,
    cfg: &AnsatzConfig,
    kind: OperatorKind,
    seed: u64,
    restarts: usize,
    settings: &VqeSettings,
) -> Result<VqeResult> {
    let vars = variable_pair(cfg.qubits, basis)?;
    let (op, scale) = build_operator(spec, &vars, kind, &settings.conventions)?;
    vqe_on_operator(&op, scale, cfg, seed, restarts, &settings.optimizer)
}

/// JSON record written by the command-line `vqe` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeReport {
    pub model: ModelSpec,
    pub basis: BasisKind,
    pub operator: OperatorKind,
    pub qubits: usize,
    pub depth: usize,
    pub seed: u64,
    pub restarts: usize,
    pub best_value: f64,
    pub unscaled_mass: f64,
    pub converged: bool,
    pub best_theta: Vec<f64>,
    pub history_csv_path: Option<String>,
}

/// `evaluation_index,objective` rows with a header.
pub fn history_csv(history: &[(usize, f64)]) -> String {
    let mut s = String::from("evaluation_index,objective\n");
    for (i, v) in history {
        s.push_str(&format!("{i},{v:.17e}\n"));
    }
    s
}
