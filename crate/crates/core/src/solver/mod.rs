//! Solvers for `min_u ½uᵀAu + ‖Bu‖₁ − uᵀf`.
//!
//! `pdfp` is the primal-dual fixed-point iteration, `oracle` an exhaustive
//! sign-pattern solver for small instances and `condensed` a driver that
//! eliminates the non-contact unknowns before iterating.

pub mod condensed;
pub mod linear;
pub mod oracle;
pub mod pdfp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::{dot2, norm2, CsrMatrix, LinearOperator};

pub use condensed::condensed_solve;
pub use linear::SparseLu;
pub use oracle::sign_pattern_oracle;
pub use pdfp::{pdfp_solve, PdfpParams};

/// Solver selection as it appears in run configurations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    #[serde(flatten)]
    pub pdfp: PdfpParams,
    pub strategy: Strategy,
    /// Allow the condensed strategy to finish with a verified pattern solve.
    pub polish: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pdfp: PdfpParams::default(),
            strategy: Strategy::Condensed,
            polish: true,
        }
    }
}

pub fn solve(a: &CsrMatrix, b: &CsrMatrix, f: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    match cfg.strategy {
        Strategy::Full => pdfp_solve(a, b, f, &cfg.pdfp),
        Strategy::Condensed => condensed_solve(a, b, f, &cfg.pdfp, cfg.polish),
    }
}

/// Activity threshold on `(Bu)_i` used by the KKT check.
pub const ACTIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// PDFP on the full system.
    Full,
    /// PDFP on the Schur complement of the contact unknowns.
    #[default]
    Condensed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub u: Vec<f64>,
    pub iterations: usize,
    pub rel_change: f64,
    pub kkt_residual: f64,
    pub objective: f64,
    pub converged: bool,
    /// The final iterate was replaced by an exactly solved, verified sign
    /// pattern (condensed strategy only).
    pub polished: bool,
    pub lambda: f64,
    pub gamma: f64,
    pub strategy: Strategy,
}

/// One nonzero per row of a selection-structured `B`: `(column, scale)`.
/// Rows without entries carry `None`.
#[derive(Clone, Debug)]
pub struct ContactRows {
    pub rows: Vec<Option<(usize, f64)>>,
}

impl ContactRows {
    pub fn from_matrix(b: &CsrMatrix) -> Result<Self> {
        let (m, n) = b.shape();
        let mut seen = vec![false; n];
        let mut rows = Vec::with_capacity(m);
        for r in 0..m {
            let entries: Vec<(usize, f64)> = b.row(r).filter(|(_, v)| *v != 0.0).collect();
            match entries.as_slice() {
                [] => rows.push(None),
                [(c, v)] => {
                    if seen[*c] {
                        return Err(Error::Dimension(format!("column {c} selected twice in B")));
                    }
                    seen[*c] = true;
                    rows.push(Some((*c, *v)));
                }
                _ => {
                    return Err(Error::Dimension(format!(
                        "row {r} of B has several entries"
                    )))
                }
            }
        }
        Ok(ContactRows { rows })
    }

    /// `λ_max(BBᵀ)`
    pub fn bbt_max(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .fold(0.0f64, |m, (_, s)| m.max(s * s))
    }
}

/// `‖A‖₂` by power iteration on `AᵀA`, biased upward by 1%.
pub fn spectral_norm(a: &dyn LinearOperator) -> Result<f64> {
    const MAX_ITER: usize = 100_000;
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return Ok(0.0);
    }
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * (1.7 * i as f64).sin()).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = vec![0.0; a.nrows()];
    let mut z = vec![0.0; n];
    let mut sigma = 0.0;
    for it in 0..MAX_ITER {
        a.apply(&x, &mut y);
        let s = norm2(&y);
        if s == 0.0 {
            // x lies in the kernel; for a nonzero matrix this start vector is
            // never exactly orthogonal to every row.
            return Ok(0.0);
        }
        if !s.is_finite() {
            return Err(Error::NonFinite(it));
        }
        a.apply_transpose(&y, &mut z);
        let nz = norm2(&z);
        x.iter_mut().zip(&z).for_each(|(xi, zi)| *xi = zi / nz);
        if it > 5 && (s - sigma).abs() <= 1e-6 * s {
            return Ok(s * 1.01);
        }
        sigma = s;
    }
    Err(Error::PowerIterationStalled(MAX_ITER))
}

/// `sgn(x)(|x| − t)₊` componentwise.
pub fn soft_threshold(x: &[f64], t: f64) -> Vec<f64> {
    x.iter()
        .map(|v| v.signum() * (v.abs() - t).max(0.0))
        .collect()
}

/// `(I − prox_{t‖·‖₁})(x) = clamp(x, −t, t)`.
pub fn prox_residual(x: &[f64], t: f64) -> Vec<f64> {
    x.iter().map(|v| v.clamp(-t, t)).collect()
}

/// `½uᵀAu + ‖Bu‖₁ − uᵀf`
///
/// Evaluated as `uᵀ(½(Au − f) − ½f) + ‖Bu‖₁` in compensated arithmetic; the
/// plain form loses ~1e−7 absolute to cancellation on plate stiffness
/// matrices.
pub fn objective(a: &dyn LinearOperator, b: &CsrMatrix, f: &[f64], u: &[f64]) -> f64 {
    let mut r = vec![0.0; a.nrows()];
    a.residual(u, f, &mut r);
    let quad = dot2(
        u.iter()
            .zip(r.iter().zip(f))
            .map(|(x, (ri, fi))| (*x, 0.5 * (ri - fi))),
    );
    let l1: f64 = b.mul_vec(u).iter().map(|v| v.abs()).sum();
    quad + l1
}

/// ∞-norm of the smallest violation of `Au − f + Bᵀs = 0` with
/// `s_i = sgn((Bu)_i)` on active rows and `|s_i| ≤ 1` elsewhere.
///
/// Rows with `|(Bu)_i| ≤ ACTIVITY_TOL` are inactive. Above the threshold a
/// row may still be fitted as inactive at the extra cost `|(Bu)_i|`, so an
/// iterate sitting a hair off zero is not charged an O(1) sign violation.
pub fn kkt_residual(u: &[f64], a: &dyn LinearOperator, b: &CsrMatrix, f: &[f64]) -> Result<f64> {
    let rows = ContactRows::from_matrix(b)?;
    let mut r = vec![0.0; a.nrows()];
    a.residual(u, f, &mut r);
    for (c, scale) in rows.rows.iter().flatten() {
        let bu = scale * u[*c];
        let inactive = (r[*c] + scale * (-r[*c] / scale).clamp(-1.0, 1.0)).abs();
        r[*c] = if bu.abs() > ACTIVITY_TOL {
            let active = (r[*c] + scale * bu.signum()).abs();
            active.min(inactive.max(bu.abs()))
        } else {
            inactive
        };
    }
    Ok(r.iter().fold(0.0, |m, v| m.max(v.abs())))
}
