//! Compressed sparse row matrices and the operator trait the solvers use.

pub mod matrix_market;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Matrix-vector products, the only access the iterative solvers need.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = Aᵀ x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);
    /// `r = A x − f`; implementations may evaluate this in compensated
    /// arithmetic, which matters when `Ax` cancels down to the size of `f`.
    fn residual(&self, x: &[f64], f: &[f64], r: &mut [f64]) {
        self.apply(x, r);
        r.iter_mut().zip(f).for_each(|(ri, fi)| *ri -= fi);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Duplicates are summed in the order they appear in `triplets`, so the
    /// result depends only on that order.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(Error::Dimension(format!(
                "entry ({r}, {c}) outside {nrows}x{ncols}"
            )));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Ok(CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let trips = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(move |(j, v)| (i, j, *v))
            })
            .collect();
        CsrMatrix::from_triplets(nrows, ncols, trips).expect("indices in range")
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()).expect("in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn transpose(&self) -> CsrMatrix {
        let trips = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        CsrMatrix::from_triplets(self.ncols, self.nrows, trips).expect("in range")
    }

    pub fn scaled(&self, s: f64) -> CsrMatrix {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `Σ_k c_k M_k` over matrices of equal shape.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let (nrows, ncols) = terms
            .first()
            .map(|(_, m)| m.shape())
            .ok_or_else(|| Error::Dimension("empty linear combination".into()))?;
        if terms.iter().any(|(_, m)| m.shape() != (nrows, ncols)) {
            return Err(Error::Dimension(
                "shape mismatch in linear combination".into(),
            ));
        }
        let mut trips = Vec::with_capacity(terms.iter().map(|(_, m)| m.nnz()).sum());
        for (c, m) in terms {
            trips.extend(m.iter().map(|(r, j, v)| (r, j, c * v)));
        }
        CsrMatrix::from_triplets(nrows, ncols, trips)
    }

    /// Rows and columns selected (and renumbered) by the given index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut trips = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_map[c] != usize::MAX {
                    trips.push((i, col_map[c], v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), cols.len(), trips).expect("in range")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A - B|` over the union of both sparsity patterns.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> Result<f64> {
        CsrMatrix::linear_combination(&[(1.0, self), (-1.0, other)]).map(|d| d.max_abs())
    }

    /// `max |A - Aᵀ|`.
    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
            .unwrap_or(f64::INFINITY)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.apply(x, &mut y);
        y
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trips: Vec<Triplet<usize, usize, f64>> =
            self.iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trips)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }

    /// Quadratic form `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.nrows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let span = self.indptr[r]..self.indptr[r + 1];
            *yr = self.indices[span.clone()]
                .iter()
                .zip(&self.values[span])
                .map(|(c, v)| v * x[*c])
                .sum();
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, xr) in x.iter().enumerate().take(self.nrows) {
            for (c, v) in self.row(r) {
                y[c] += v * xr;
            }
        }
    }

    fn residual(&self, x: &[f64], f: &[f64], r: &mut [f64]) {
        for (i, ri) in r.iter_mut().enumerate().take(self.nrows) {
            *ri = dot2(self.row(i).map(|(c, v)| (v, x[c])).chain([(f[i], -1.0)]));
        }
    }
}

impl LinearOperator for Mat<f64> {
    fn nrows(&self) -> usize {
        Mat::nrows(self)
    }

    fn ncols(&self) -> usize {
        Mat::ncols(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (j, xj) in x.iter().enumerate() {
            if *xj == 0.0 {
                continue;
            }
            let col = self.col(j);
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += col[i] * xj;
            }
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            let col = self.col(j);
            *yj = x.iter().enumerate().map(|(i, xi)| col[i] * xi).sum();
        }
    }
}

/// Row-major dense matrix for small operators in tight loops.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_fn(nrows: usize, ncols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..nrows * ncols)
            .map(|k| f(k / ncols, k % ncols))
            .collect();
        DenseMatrix { nrows, ncols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.ncols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.nrows
    }

    fn ncols(&self) -> usize {
        self.ncols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            *yr = dot(self.row(r), x);
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, xr) in x.iter().enumerate().take(self.nrows) {
            for (yc, a) in y.iter_mut().zip(self.row(r)) {
                *yc += a * xr;
            }
        }
    }

    fn residual(&self, x: &[f64], f: &[f64], r: &mut [f64]) {
        for (i, ri) in r.iter_mut().enumerate().take(self.nrows) {
            *ri = dot2(
                self.row(i)
                    .iter()
                    .copied()
                    .zip(x.iter().copied())
                    .chain([(f[i], -1.0)]),
            );
        }
    }
}

/// Dot product in compensated arithmetic (Ogita, Rump and Oishi's Dot2):
/// as accurate as if computed in twice the working precision.
pub fn dot2(pairs: impl IntoIterator<Item = (f64, f64)>) -> f64 {
    let (mut p, mut s) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        let h = a * b;
        let r = a.mul_add(b, -h);
        let q = p + h;
        let z = q - p;
        let e = (p - (q - z)) + (h - z);
        p = q;
        s += e + r;
    }
    p + s
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot2_survives_cancellation() {
        let x = [1e16, 1.0, -1e16, 3.0];
        let y = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(dot2(x.iter().copied().zip(y.iter().copied())), 4.0);
        assert_ne!(dot(&x, &y), 4.0);
        let a = 1.0 + f64::EPSILON;
        // a² − (1 + 2ε) = ε², lost entirely in plain arithmetic
        assert_eq!(
            dot2([(a, a), (1.0 + 2.0 * f64::EPSILON, -1.0)]),
            f64::EPSILON * f64::EPSILON
        );
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = CsrMatrix::from_triplets(
            2,
            3,
            vec![(1, 2, 1.0), (0, 1, 2.0), (1, 2, 0.5), (0, 0, -1.0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(1, 2), 1.5);
        assert_eq!(
            m.iter().collect::<Vec<_>>(),
            vec![(0, 0, -1.0), (0, 1, 2.0), (1, 2, 1.5)]
        );
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn products_and_transpose() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, -1.0]]);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 2.0]);
        let mut y = vec![0.0; 3];
        m.apply_transpose(&[1.0, 2.0], &mut y);
        assert_eq!(y, vec![1.0, 6.0, 0.0]);
        assert_eq!(m.transpose().mul_vec(&[1.0, 2.0]), y);
        let d = m.to_dense();
        let mut yd = vec![0.0; 2];
        LinearOperator::apply(&d, &[1.0, 1.0, 1.0], &mut yd);
        assert_eq!(yd, vec![3.0, 2.0]);
        let rm = DenseMatrix::from_fn(2, 3, |r, c| m.get(r, c));
        LinearOperator::apply(&rm, &[1.0, 1.0, 1.0], &mut yd);
        assert_eq!(yd, vec![3.0, 2.0]);
        let mut yt = vec![0.0; 3];
        rm.apply_transpose(&[1.0, 2.0], &mut yt);
        assert_eq!(yt, vec![1.0, 6.0, 0.0]);
        assert_eq!(m.bilinear(&[1.0, 2.0], &[1.0, 1.0, 1.0]), 7.0);
    }

    #[test]
    fn submatrix_and_combination() {
        let m = CsrMatrix::from_dense(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 9.0],
        ]);
        let s = m.submatrix(&[0, 2], &[1, 2]);
        assert_eq!(s.to_dense()[(1, 0)], 8.0);
        let c = CsrMatrix::linear_combination(&[(1.0, &m), (-1.0, &m.transpose())]).unwrap();
        assert_eq!(c.get(0, 1), -2.0);
        assert_eq!(m.asymmetry(), 4.0);
    }
}
