//! Primal-dual fixed-point iteration:
//!
//! ```text
//! u_{k+½} = u_k − γ(Au_k − f)
//! v_{k+1} = clamp(Bu_{k+½} + (I − λBBᵀ)v_k, ±γ/λ)
//! u_{k+1} = u_{k+½} − λBᵀv_{k+1}
//! ```

use serde::{Deserialize, Serialize};

use super::{kkt_residual, objective, spectral_norm, ContactRows, SolveReport, Strategy};
use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PdfpParams {
    /// Dual step; `None` (`"auto"` in JSON) selects `1/λ_max(BBᵀ)`.
    #[serde(with = "auto_step")]
    pub lambda: Option<f64>,
    /// Primal step; `None` (`"auto"` in JSON) selects `1.8/‖A‖₂`.
    #[serde(with = "auto_step")]
    pub gamma: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PdfpParams {
    fn default() -> Self {
        PdfpParams {
            lambda: None,
            gamma: None,
            tol: 1e-10,
            max_iter: 2_000_000,
        }
    }
}

/// A step size that is either a number or `"auto"` (`null` is accepted too).
mod auto_step {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Value(f64),
        Word(String),
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_str("auto"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Value(x)) => Ok(Some(x)),
            Some(Raw::Word(w)) if w == "auto" => Ok(None),
            Some(Raw::Word(w)) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", got \"{w}\""
            ))),
        }
    }
}

/// Validated step sizes.
#[derive(Clone, Copy, Debug)]
pub struct Steps {
    pub lambda: f64,
    pub gamma: f64,
}

pub fn resolve_steps(a: &dyn LinearOperator, b: &CsrMatrix, params: &PdfpParams) -> Result<Steps> {
    if !(params.tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let norm_a = spectral_norm(a)?;
    if norm_a == 0.0 {
        return Err(Error::param("A", "zero operator"));
    }
    let bbt = match ContactRows::from_matrix(b) {
        Ok(rows) => rows.bbt_max(),
        Err(_) => spectral_norm(b)?.powi(2),
    };
    let lambda = match params.lambda {
        Some(l) => {
            if !(l > 0.0 && (bbt == 0.0 || l <= 1.0 / bbt)) {
                return Err(Error::param(
                    "lambda",
                    format!("{l} is outside (0, 1/λmax(BBᵀ)] = (0, {}]", 1.0 / bbt),
                ));
            }
            l
        }
        None if bbt > 0.0 => 1.0 / bbt,
        None => 1.0,
    };
    let gamma = match params.gamma {
        Some(g) => {
            if !(g > 0.0 && g < 2.0 / norm_a) {
                return Err(Error::param(
                    "gamma",
                    format!("{g} is outside (0, 2/‖A‖₂) = (0, {})", 2.0 / norm_a),
                ));
            }
            g
        }
        None => 1.8 / norm_a,
    };
    Ok(Steps { lambda, gamma })
}

/// Iterate state, resumable across calls to [`PdfpState::run`].
#[derive(Clone, Debug)]
pub struct PdfpState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
    pub rel_change: f64,
    bt_v: Vec<f64>,
}

impl PdfpState {
    /// `u₀ = 0, v₀ = 0`
    pub fn zero(n: usize, m: usize) -> Self {
        PdfpState {
            u: vec![0.0; n],
            v: vec![0.0; m],
            iterations: 0,
            rel_change: f64::INFINITY,
            bt_v: vec![0.0; n],
        }
    }

    /// Runs at most `budget` further iterations; returns whether the
    /// relative-change test `‖u_{k+1} − u_k‖ / max(‖u_k‖, 1) < tol` fired.
    pub fn run(
        &mut self,
        a: &dyn LinearOperator,
        b: &CsrMatrix,
        f: &[f64],
        steps: Steps,
        tol: f64,
        budget: usize,
    ) -> Result<bool> {
        let Steps { lambda, gamma } = steps;
        let (n, m) = (self.u.len(), self.v.len());
        let bound = gamma / lambda;
        let mut half = vec![0.0; n];
        let mut au = vec![0.0; n];
        let mut bhalf = vec![0.0; m];
        let mut bbt_v = vec![0.0; m];
        for _ in 0..budget {
            self.iterations += 1;
            a.apply(&self.u, &mut au);
            for i in 0..n {
                half[i] = self.u[i] - gamma * (au[i] - f[i]);
            }
            b.apply(&half, &mut bhalf);
            b.apply(&self.bt_v, &mut bbt_v);
            for i in 0..m {
                self.v[i] = (bhalf[i] + self.v[i] - lambda * bbt_v[i]).clamp(-bound, bound);
            }
            b.apply_transpose(&self.v, &mut self.bt_v);
            let mut diff = 0.0;
            let mut norm_old = 0.0;
            for i in 0..n {
                let next = half[i] - lambda * self.bt_v[i];
                diff += (next - self.u[i]).powi(2);
                norm_old += self.u[i] * self.u[i];
                self.u[i] = next;
            }
            self.rel_change = diff.sqrt() / norm_old.sqrt().max(1.0);
            if !self.rel_change.is_finite() {
                return Err(Error::NonFinite(self.iterations));
            }
            if self.rel_change < tol {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

pub(crate) fn check_dims(a: &dyn LinearOperator, b: &CsrMatrix, f: &[f64]) -> Result<()> {
    let n = a.ncols();
    if a.nrows() != n || f.len() != n || b.ncols() != n {
        return Err(Error::Dimension(format!(
            "A is {}x{}, B has {} columns, f has {} entries",
            a.nrows(),
            n,
            b.ncols(),
            f.len()
        )));
    }
    Ok(())
}

/// Runs the iteration from `u₀ = 0, v₀ = 0`.
pub fn pdfp_solve(
    a: &dyn LinearOperator,
    b: &CsrMatrix,
    f: &[f64],
    params: &PdfpParams,
) -> Result<SolveReport> {
    check_dims(a, b, f)?;
    let steps = resolve_steps(a, b, params)?;
    let mut state = PdfpState::zero(a.ncols(), b.nrows());
    let converged = state.run(a, b, f, steps, params.tol, params.max_iter)?;
    Ok(SolveReport {
        kkt_residual: kkt_residual(&state.u, a, b, f).unwrap_or(f64::NAN),
        objective: objective(a, b, f, &state.u),
        iterations: state.iterations,
        rel_change: state.rel_change,
        u: state.u,
        converged,
        polished: false,
        lambda: steps.lambda,
        gamma: steps.gamma,
        strategy: Strategy::Full,
    })
}
