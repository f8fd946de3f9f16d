//! Exhaustive sign-pattern solver for small contact sets.
//!
//! With `G = B A⁻¹ Bᵀ` and `q = B A⁻¹ f` the optimality system gives
//! `Bu = q − G s`. A pattern fixes `s_i = ±1` on its nonzero nodes; the zero
//! nodes require `(Bu)_Z = 0`, i.e. `G_ZZ s_Z = q_Z − G_ZP s_P`.

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::linear::SparseLu;
use super::{kkt_residual, objective, ContactRows, SolveReport, Strategy};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub const MAX_ORACLE_ROWS: usize = 12;

pub fn sign_pattern_oracle(a: &CsrMatrix, b: &CsrMatrix, f: &[f64]) -> Result<SolveReport> {
    let m = b.nrows();
    if m > MAX_ORACLE_ROWS {
        return Err(Error::OracleTooLarge {
            max: MAX_ORACLE_ROWS,
            got: m,
        });
    }
    let rows = ContactRows::from_matrix(b)?;
    let n = a.nrows();
    let lu = SparseLu::new(a)?;
    let ainv_f = lu.solve(f);
    let bt = Mat::from_fn(n, m, |i, j| match rows.rows[j] {
        Some((c, s)) if c == i => s,
        _ => 0.0,
    });
    let ainv_bt = lu.solve_many(bt);
    let bu_of = |x: &dyn Fn(usize) -> f64| -> Vec<f64> {
        rows.rows
            .iter()
            .map(|r| r.map_or(0.0, |(c, s)| s * x(c)))
            .collect()
    };
    let q = bu_of(&|c| ainv_f[c]);
    let g: Vec<Vec<f64>> = (0..m).map(|j| bu_of(&|c| ainv_bt[(c, j)])).collect();
    // g[j][i] = (B A⁻¹ Bᵀ)_{ij}
    let gij = |i: usize, j: usize| g[j][i];

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut pattern = vec![0i8; m];
    for code in 0..3usize.pow(m as u32) {
        let mut c = code;
        for p in pattern.iter_mut() {
            *p = (c % 3) as i8 - 1;
            c /= 3;
        }
        let zero: Vec<usize> = (0..m).filter(|&i| pattern[i] == 0).collect();
        let mut s: Vec<f64> = pattern.iter().map(|&p| p as f64).collect();
        if !zero.is_empty() {
            let k = zero.len();
            let mut sys = Mat::<f64>::zeros(k, k);
            let mut rhs = Mat::<f64>::zeros(k, 1);
            for (r, &i) in zero.iter().enumerate() {
                for (cc, &j) in zero.iter().enumerate() {
                    sys[(r, cc)] = gij(i, j);
                }
                rhs[(r, 0)] = q[i]
                    - (0..m)
                        .filter(|j| pattern[*j] != 0)
                        .map(|j| gij(i, j) * s[j])
                        .sum::<f64>();
            }
            let sol = sys.partial_piv_lu().solve(&rhs);
            for (r, &i) in zero.iter().enumerate() {
                s[i] = sol[(r, 0)];
            }
            if zero.iter().any(|&i| !(s[i].abs() <= 1.0 + 1e-10)) {
                continue;
            }
        }
        let bu: Vec<f64> = (0..m)
            .map(|i| q[i] - (0..m).map(|j| gij(i, j) * s[j]).sum::<f64>())
            .collect();
        if (0..m).any(|i| pattern[i] != 0 && pattern[i] as f64 * bu[i] < 0.0) {
            continue;
        }
        let u: Vec<f64> = (0..n)
            .map(|r| ainv_f[r] - (0..m).map(|j| ainv_bt[(r, j)] * s[j]).sum::<f64>())
            .collect();
        let obj = objective(a, b, f, &u);
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, u));
        }
    }
    let (obj, u) = best.ok_or(Error::NoFeasiblePattern)?;
    Ok(SolveReport {
        kkt_residual: kkt_residual(&u, a, b, f)?,
        objective: obj,
        u,
        iterations: 3usize.pow(m as u32),
        rel_change: 0.0,
        converged: true,
        polished: false,
        lambda: f64::NAN,
        gamma: f64::NAN,
        strategy: Strategy::Full,
    })
}
