//! PDFP on the contact unknowns only.
//!
//! Splitting the unknowns into contact (`c`) and remaining (`i`) sets, the
//! rows of `i` carry no friction, so `u_i = A_ii⁻¹(f_i − A_ic u_c)` exactly.
//! Substituting leaves the same problem for `u_c` with the Schur complement
//! `S = A_cc − A_ci A_ii⁻¹ A_ic` and `f̃ = f_c − A_ci A_ii⁻¹ f_i`.
//!
//! Even `S` is too ill-conditioned for the iteration to reach full accuracy on
//! fine meshes, so with `polish` enabled the iterate's sign pattern is
//! periodically solved exactly and accepted only if it passes the sign and
//! subgradient checks of the optimality system.

use std::collections::HashSet;

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::linear::SparseLu;
use super::pdfp::{check_dims, resolve_steps, PdfpParams, PdfpState};
use super::{kkt_residual, objective, ContactRows, SolveReport, Strategy};
use crate::error::Result;
use crate::sparse::{CsrMatrix, DenseMatrix};

/// PDFP iterations between polish attempts.
pub const POLISH_INTERVAL: usize = 1000;

/// Contact-reduced problem `min ½uᵀSu + Σβ_i|u_i| − f̃ᵀu`.
pub struct ReducedProblem {
    pub s: DenseMatrix,
    pub f: Vec<f64>,
    pub beta: Vec<f64>,
    pub contact: Vec<usize>,
    inner: Vec<usize>,
    /// `A_ii⁻¹ [A_ic | f_i]`
    x: Mat<f64>,
}

impl ReducedProblem {
    pub fn new(a: &CsrMatrix, b: &CsrMatrix, f: &[f64]) -> Result<Self> {
        check_dims(a, b, f)?;
        let n = a.nrows();
        let rows = ContactRows::from_matrix(b)?;
        let selected: Vec<(usize, f64)> = rows.rows.iter().flatten().copied().collect();
        let contact: Vec<usize> = selected.iter().map(|(c, _)| *c).collect();
        let beta: Vec<f64> = selected.iter().map(|(_, s)| *s).collect();
        let mut is_contact = vec![false; n];
        contact.iter().for_each(|&c| is_contact[c] = true);
        let inner: Vec<usize> = (0..n).filter(|&i| !is_contact[i]).collect();
        let (m, ni) = (contact.len(), inner.len());

        let a_ic = a.submatrix(&inner, &contact);
        let mut rhs = Mat::<f64>::zeros(ni, m + 1);
        for (r, c, v) in a_ic.iter() {
            rhs[(r, c)] = v;
        }
        for (r, &i) in inner.iter().enumerate() {
            rhs[(r, m)] = f[i];
        }
        let x = if ni > 0 {
            SparseLu::new(&a.submatrix(&inner, &inner))?.solve_many(rhs)
        } else {
            rhs
        };

        let a_ci = a.submatrix(&contact, &inner);
        let a_cc = a.submatrix(&contact, &contact);
        let mut corr = vec![0.0; m * (m + 1)];
        for (r, k, v) in a_ci.iter() {
            for j in 0..=m {
                corr[r * (m + 1) + j] += v * x[(k, j)];
            }
        }
        let s = DenseMatrix::from_fn(m, m, |r, c| a_cc.get(r, c) - corr[r * (m + 1) + c]);
        let f_red = (0..m)
            .map(|r| f[contact[r]] - corr[r * (m + 1) + m])
            .collect();
        Ok(ReducedProblem {
            s,
            f: f_red,
            beta,
            contact,
            inner,
            x,
        })
    }

    pub fn dim(&self) -> usize {
        self.contact.len()
    }

    pub fn friction_matrix(&self) -> CsrMatrix {
        let m = self.dim();
        CsrMatrix::from_triplets(
            m,
            m,
            self.beta
                .iter()
                .enumerate()
                .map(|(r, b)| (r, r, *b))
                .collect(),
        )
        .expect("diagonal in range")
    }

    /// Full solution from the contact values.
    pub fn expand(&self, uc: &[f64], n: usize) -> Vec<f64> {
        let m = self.dim();
        let mut u = vec![0.0; n];
        for (r, &c) in self.contact.iter().enumerate() {
            u[c] = uc[r];
        }
        for (r, &i) in self.inner.iter().enumerate() {
            u[i] = self.x[(r, m)] - (0..m).map(|j| self.x[(r, j)] * uc[j]).sum::<f64>();
        }
        u
    }

    /// Solves the optimality system for a fixed sign pattern and walks to a
    /// neighbouring pattern until one verifies or a pattern repeats.
    pub fn polish(&self, mut pattern: Vec<i8>) -> Option<Vec<f64>> {
        let m = self.dim();
        let mut seen = HashSet::new();
        while seen.insert(pattern.clone()) {
            let on: Vec<usize> = (0..m).filter(|&i| pattern[i] != 0).collect();
            let mut u = vec![0.0; m];
            if !on.is_empty() {
                let k = on.len();
                let sys = Mat::from_fn(k, k, |r, c| self.s.get(on[r], on[c]));
                let rhs = Mat::from_fn(k, 1, |r, _| {
                    self.f[on[r]] - self.beta[on[r]] * pattern[on[r]] as f64
                });
                let sol = sys.partial_piv_lu().solve(&rhs);
                for (r, &i) in on.iter().enumerate() {
                    u[i] = sol[(r, 0)];
                }
            }
            if !u.iter().all(|v| v.is_finite()) {
                return None;
            }
            let mut next = pattern.clone();
            for i in 0..m {
                if pattern[i] != 0 {
                    if (pattern[i] as f64) * u[i] < 0.0 {
                        next[i] = 0;
                    }
                } else {
                    // β_i s_i = f̃_i − (Su)_i
                    let si = (self.f[i] - crate::sparse::dot(self.s.row(i), &u)) / self.beta[i];
                    if si.abs() > 1.0 + 1e-10 {
                        next[i] = si.signum() as i8;
                    }
                }
            }
            if next == pattern {
                return Some(u);
            }
            pattern = next;
        }
        None
    }
}

pub fn condensed_solve(
    a: &CsrMatrix,
    b: &CsrMatrix,
    f: &[f64],
    params: &PdfpParams,
    polish: bool,
) -> Result<SolveReport> {
    let red = ReducedProblem::new(a, b, f)?;
    let b_red = red.friction_matrix();
    let steps = resolve_steps(&red.s, &b_red, params)?;
    let mut state = PdfpState::zero(red.dim(), red.dim());
    let bound = steps.gamma / steps.lambda;
    let mut converged = false;
    let mut polished = None;
    while state.iterations < params.max_iter {
        let budget = if polish {
            POLISH_INTERVAL
        } else {
            params.max_iter
        };
        let budget = budget.min(params.max_iter - state.iterations);
        converged = state.run(&red.s, &b_red, &red.f, steps, params.tol, budget)?;
        if polish {
            // clamped dual entries mark the nodes PDFP currently sees as sliding
            let guess = state
                .v
                .iter()
                .map(|v| {
                    if v.abs() >= bound * (1.0 - 1e-12) {
                        v.signum() as i8
                    } else {
                        0
                    }
                })
                .collect();
            if let Some(uc) = red.polish(guess) {
                polished = Some(uc);
                break;
            }
        }
        if converged {
            break;
        }
    }
    let is_polished = polished.is_some();
    let uc = polished.unwrap_or_else(|| state.u.clone());
    let u = red.expand(&uc, a.nrows());
    Ok(SolveReport {
        kkt_residual: kkt_residual(&u, a, b, f)?,
        objective: objective(a, b, f, &u),
        u,
        iterations: state.iterations,
        rel_change: state.rel_change,
        converged: converged || is_polished,
        polished: is_polished,
        lambda: steps.lambda,
        gamma: steps.gamma,
        strategy: Strategy::Condensed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::oracle::sign_pattern_oracle;

    fn small() -> (CsrMatrix, CsrMatrix) {
        let a = CsrMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0, 0.5],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, 2.0, 0.3],
            vec![0.5, 0.0, 0.3, 5.0],
        ]);
        let b = CsrMatrix::from_triplets(2, 4, vec![(0, 1, 0.8), (1, 3, 1.5)]).unwrap();
        (a, b)
    }

    #[test]
    fn agrees_with_oracle_on_small_system() {
        let (a, b) = small();
        for polish in [false, true] {
            for f in [
                [1.0, 3.0, -2.0, 4.0],
                [0.1, 0.2, 0.0, -0.3],
                [-5.0, 1.0, 2.0, 9.0],
            ] {
                let c = condensed_solve(&a, &b, &f, &PdfpParams::default(), polish).unwrap();
                let o = sign_pattern_oracle(&a, &b, &f).unwrap();
                assert!(c.converged);
                for (x, y) in c.u.iter().zip(&o.u) {
                    assert!((x - y).abs() < 1e-9, "{x} vs {y}");
                }
                assert!(c.kkt_residual < 1e-8, "{}", c.kkt_residual);
            }
        }
    }

    #[test]
    fn polish_walks_from_a_wrong_pattern() {
        let (a, b) = small();
        let f = [-5.0, 1.0, 2.0, 9.0];
        let red = ReducedProblem::new(&a, &b, &f).unwrap();
        let o = sign_pattern_oracle(&a, &b, &f).unwrap();
        for guess in [vec![0, 0], vec![-1, -1], vec![1, -1]] {
            if let Some(uc) = red.polish(guess) {
                let u = red.expand(&uc, 4);
                for (x, y) in u.iter().zip(&o.u) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn all_unknowns_in_contact() {
        let a = CsrMatrix::from_dense(&[vec![2.0]]);
        let b = CsrMatrix::from_dense(&[vec![1.0]]);
        for polish in [false, true] {
            let r = condensed_solve(&a, &b, &[3.0], &PdfpParams::default(), polish).unwrap();
            assert!((r.u[0] - 1.0).abs() < 1e-9);
        }
    }
}
