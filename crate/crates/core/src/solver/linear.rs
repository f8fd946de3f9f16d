//! Sparse LU factorization, a thin wrapper over faer.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::Mat;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub struct SparseLu {
    n: usize,
    lu: Lu<usize, f64>,
}

impl SparseLu {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let (n, m) = a.shape();
        if n != m {
            return Err(Error::Dimension(format!("LU of a {n}x{m} matrix")));
        }
        let lu = a
            .to_faer()?
            .sp_lu()
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(SparseLu { n, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = Mat::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_many(&self, mut b: Mat<f64>) -> Mat<f64> {
        self.lu.solve_in_place(b.as_mut());
        b
    }
}
