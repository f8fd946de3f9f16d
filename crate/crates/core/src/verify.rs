//! Invariant suite behind the `verify` command.
//!
//! The measurement functions are public so tests can apply their own
//! tolerances; [`run`] applies the default ones.

use std::fmt::Write as _;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::lift_ratio_bounds;
use crate::config::RunConfig;
use crate::contact::FrictionOperator;
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::forms::{assemble, assemble_load, AssemblyInputs, Formulation, Load, Method, MethodId};
use crate::lifting::{adjoint_defect, EdgeJump};
use crate::solver::{sign_pattern_oracle, solve, SolverConfig};
use crate::sparse::{norm_inf, CsrMatrix};
use crate::tensor::SymTensor2;

pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const ADJOINT_TOL: f64 = 1e-12;
pub const RATIO_VARIATION_TOL: f64 = 0.10;
pub const ORACLE_U_TOL: f64 = 1e-6;
pub const ORACLE_GAP_TOL: f64 = 1e-9;
/// Levels of the ratio-bound sweep.
pub const RATIO_LEVELS: [usize; 4] = [2, 4, 8, 16];
/// Levels small enough for the exhaustive oracle.
pub const ORACLE_LEVELS: [usize; 2] = [2, 4];

/// `max|A − B| / max|A|`.
pub fn relative_difference(a: &CsrMatrix, b: &CsrMatrix) -> Result<f64> {
    let scale = a.max_abs();
    let diff = a.max_abs_diff(b)?;
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

fn pair(
    d: &Discretization,
    method: Method,
    kappa: f64,
    eta: f64,
) -> Result<(CsrMatrix, CsrMatrix)> {
    let inputs = AssemblyInputs::new(kappa, eta)?;
    Ok((
        assemble(d, MethodId::new(method, Formulation::Primal), inputs)?,
        assemble(d, MethodId::new(method, Formulation::Compact), inputs)?,
    ))
}

/// Relative difference between the primal and compact matrices.
pub fn equivalence_defect(d: &Discretization, method: Method, kappa: f64, eta: f64) -> Result<f64> {
    let (p, c) = pair(d, method, kappa, eta)?;
    relative_difference(&p, &c)
}

/// Worst adjoint-identity defect over `pairs` random edges and jump data.
pub fn adjoint_sample(d: &Discretization, pairs: usize, seed: u64) -> Result<f64> {
    let edges: Vec<usize> = d.mesh.penalized_edges().map(|(e, _)| e).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let e = edges[rng.gen_range(0..edges.len())];
        let mut t = || {
            SymTensor2::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        };
        let phi = EdgeJump {
            edge: e,
            ends: [t(), t()],
        };
        worst = worst.max(adjoint_defect(&d.mesh, &d.space, &phi)?);
    }
    Ok(worst)
}

/// `(n, lower, upper)` per level.
pub type RatioRows = Vec<(usize, f64, f64)>;

/// Ratio bounds per level and the relative change between the last two.
pub fn ratio_bounds_sweep(levels: &[usize]) -> Result<(RatioRows, f64)> {
    let rows: RatioRows = levels
        .iter()
        .map(|&n| {
            let (lo, hi) = lift_ratio_bounds(&Discretization::new(n)?)?;
            Ok((n, lo, hi))
        })
        .collect::<Result<_>>()?;
    let variation = match rows.as_slice() {
        [.., (_, lo0, hi0), (_, lo1, hi1)] => {
            ((lo1 - lo0).abs() / lo1.abs()).max((hi1 - hi0).abs() / hi1.abs())
        }
        _ => 0.0,
    };
    Ok((rows, variation))
}

/// Smallest eigenvalue of the symmetric part of `a`.
pub fn min_symmetric_eigenvalue(a: &CsrMatrix) -> Result<f64> {
    let dense = a.to_dense();
    let n = dense.nrows();
    let sym = Mat::from_fn(n, n, |i, k| 0.5 * (dense[(i, k)] + dense[(k, i)]));
    let ev = sym
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    Ok(ev.first().copied().unwrap_or(f64::INFINITY))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleComparison {
    pub u_diff: f64,
    pub solver_objective: f64,
    pub oracle_objective: f64,
    pub solver_converged: bool,
}

impl OracleComparison {
    /// `oracle − solver`; positive when the solver found a lower value.
    pub fn gap(&self) -> f64 {
        self.oracle_objective - self.solver_objective
    }
}

/// Solve the paper-example problem with `solver` and with the exhaustive
/// sign-pattern oracle.
pub fn oracle_comparison(
    d: &Discretization,
    method: Method,
    kappa: f64,
    eta: f64,
    g: f64,
    solver: &SolverConfig,
) -> Result<OracleComparison> {
    let a = assemble(
        d,
        MethodId::new(method, Formulation::Primal),
        AssemblyInputs::new(kappa, eta)?,
    )?;
    let f = assemble_load(d, |p| Load::PaperExample.eval(p));
    let op = FrictionOperator::constant(d, g)?;
    let r = solve(&a, &op.b, &f, solver)?;
    let o = sign_pattern_oracle(&a, &op.b, &f)?;
    let diff: Vec<f64> = r.u.iter().zip(&o.u).map(|(x, y)| x - y).collect();
    Ok(OracleComparison {
        u_diff: norm_inf(&diff),
        solver_objective: r.objective,
        oracle_objective: o.objective,
        solver_converged: r.converged,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(
                s,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} checks, {failed} failed", self.checks.len());
        s
    }
}

/// Run the invariant suite on `cfg.verify_levels` with `cfg.kappa`,
/// `cfg.eta` and `cfg.solver`.
pub fn run(cfg: &RunConfig) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    let levels: Vec<Discretization> = cfg
        .verify_levels
        .iter()
        .map(|&n| Discretization::new(n))
        .collect::<Result<_>>()?;

    for d in &levels {
        let n = d.cells_per_side();
        let cases: Vec<(Method, f64)> = Method::ALL
            .iter()
            .flat_map(|&m| cfg.eta.iter().map(move |&e| (m, e)))
            .collect();
        let worst = cases
            .par_iter()
            .map(|&(m, e)| equivalence_defect(d, m, cfg.kappa, e))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.push(
            format!("primal/compact equivalence n={n}"),
            worst < EQUIVALENCE_TOL,
            format!(
                "max relative difference {worst:.3e} over 5 methods x {} penalties",
                cfg.eta.len()
            ),
        );
    }

    // The equality check must notice a perturbation of a single entry.
    {
        let d = &levels[0];
        let (p, mut c) = pair(d, Method::Lcdg, cfg.kappa, 100.0)?;
        let bump = 1e-6 * c.max_abs();
        c.values_mut()[0] += bump;
        let diff = relative_difference(&p, &c)?;
        report.push(
            "equivalence check detects tampering",
            diff >= EQUIVALENCE_TOL,
            format!("one entry moved by 1e-6 max|A| gives relative difference {diff:.3e}"),
        );
    }

    for d in &levels {
        let worst = adjoint_sample(d, 200, 0x5eed + d.cells_per_side() as u64)?;
        report.push(
            format!("lifting adjoint identity n={}", d.cells_per_side()),
            worst < ADJOINT_TOL,
            format!("200 random (edge, jump) pairs, worst defect {worst:.3e}"),
        );
    }

    let (rows, variation) = ratio_bounds_sweep(&RATIO_LEVELS)?;
    let listed: Vec<String> = rows
        .iter()
        .map(|(n, lo, hi)| format!("n={n}: [{lo:.6}, {hi:.6}]"))
        .collect();
    report.push(
        "lifting norm equivalence bounds",
        variation < RATIO_VARIATION_TOL && rows.iter().all(|r| r.1 > 0.0),
        format!(
            "{}; finest-pair variation {variation:.2e}",
            listed.join(", ")
        ),
    );

    for d in &levels {
        let n = d.cells_per_side();
        let mins = Method::ALL
            .par_iter()
            .map(|&m| {
                let a = assemble(
                    d,
                    MethodId::new(m, Formulation::Primal),
                    AssemblyInputs::new(cfg.kappa, 100.0)?,
                )?;
                min_symmetric_eigenvalue(&a)
            })
            .collect::<Result<Vec<f64>>>()?;
        let lo = mins.iter().copied().fold(f64::INFINITY, f64::min);
        report.push(
            format!("positive definite at eta=100 n={n}"),
            lo > 0.0,
            format!(
                "smallest eigenvalue per method {:?}",
                mins.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()
            ),
        );
        let a = assemble(
            d,
            MethodId::new(Method::Nipg, Formulation::Primal),
            AssemblyInputs::new(cfg.kappa, 1.0)?,
        )?;
        let lo = min_symmetric_eigenvalue(&a)?;
        report.push(
            format!("NIPG symmetric part positive definite at eta=1 n={n}"),
            lo > 0.0,
            format!("smallest eigenvalue {lo:.3e}"),
        );
    }

    for n in ORACLE_LEVELS {
        let d = Discretization::new(n)?;
        for m in [Method::InteriorPenalty, Method::WellsDung, Method::Lcdg] {
            let c = oracle_comparison(&d, m, cfg.kappa, 100.0, cfg.g, &cfg.solver)?;
            report.push(
                format!("solver matches sign-pattern oracle n={n} j={}", m.index()),
                c.solver_converged && c.u_diff <= ORACLE_U_TOL && c.gap().abs() <= ORACLE_GAP_TOL,
                format!(
                    "|u - u_oracle|_inf {:.3e}, objective gap {:.3e}",
                    c.u_diff,
                    c.gap()
                ),
            );
        }
    }

    {
        let d = &levels[0];
        let a = assemble(
            d,
            MethodId::new(Method::Lcdg, Formulation::Primal),
            AssemblyInputs::new(cfg.kappa, 100.0)?,
        )?;
        let op = FrictionOperator::constant(d, cfg.g)?;
        let r = solve(&a, &op.b, &vec![0.0; a.nrows()], &cfg.solver)?;
        let size = norm_inf(&r.u);
        report.push(
            "zero load gives zero solution",
            size == 0.0,
            format!("|u|_inf = {size:.3e}"),
        );
    }

    Ok(report)
}
