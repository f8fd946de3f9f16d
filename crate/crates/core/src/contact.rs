//! Frictional term on the contact edge `y = -1`, integrated with the composite
//! Simpson rule on the P2 nodes.

use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::mesh::{EdgeClass, Point};
use crate::sparse::CsrMatrix;

/// Nodal friction weights on the closed contact edge.
#[derive(Clone, Debug)]
pub struct FrictionOperator {
    /// Full dof index of each contact node, ascending.
    pub dofs: Vec<usize>,
    /// Reduced (free) index of each contact node.
    pub free: Vec<usize>,
    pub weights: Vec<f64>,
    pub bounds: Vec<f64>,
    /// `B = (w_i g(x_i) δ_ij)` as an `m × N_free` selection matrix.
    pub b: CsrMatrix,
}

/// Simpson weights `h_e/6, 4h_e/6, h_e/6` per contact edge, keyed by full dof.
pub fn simpson_weights(d: &Discretization) -> Vec<(usize, f64)> {
    let nv = d.space.num_vertices;
    let mut w = vec![0.0; d.space.num_dofs()];
    let mut on = vec![false; d.space.num_dofs()];
    for (e, edge) in d.mesh.edges.iter().enumerate() {
        if edge.class != EdgeClass::Gamma3 {
            continue;
        }
        let [a, b] = edge.vertices;
        w[a] += edge.length / 6.0;
        w[b] += edge.length / 6.0;
        w[nv + e] += 4.0 * edge.length / 6.0;
        on[a] = true;
        on[b] = true;
        on[nv + e] = true;
    }
    (0..w.len()).filter(|&i| on[i]).map(|i| (i, w[i])).collect()
}

impl FrictionOperator {
    pub fn new(d: &Discretization, g: impl Fn(Point) -> f64) -> Result<Self> {
        let sw = simpson_weights(d);
        let mut dofs = Vec::with_capacity(sw.len());
        let mut free = Vec::with_capacity(sw.len());
        let mut weights = Vec::with_capacity(sw.len());
        let mut bounds = Vec::with_capacity(sw.len());
        for (dof, w) in sw {
            let gx = g(d.space.nodes[dof]);
            if !(gx >= 0.0 && gx.is_finite()) {
                return Err(Error::param(
                    "g",
                    format!("friction bound {gx} must be finite and >= 0"),
                ));
            }
            let fi = d.space.free_index[dof]
                .ok_or_else(|| Error::Dimension(format!("contact dof {dof} is clamped")))?;
            dofs.push(dof);
            free.push(fi);
            weights.push(w);
            bounds.push(gx);
        }
        let trips = free
            .iter()
            .enumerate()
            .map(|(r, &c)| (r, c, weights[r] * bounds[r]))
            .collect();
        let b = CsrMatrix::from_triplets(dofs.len(), d.space.num_free(), trips)?;
        Ok(FrictionOperator {
            dofs,
            free,
            weights,
            bounds,
            b,
        })
    }

    pub fn constant(d: &Discretization, g: f64) -> Result<Self> {
        Self::new(d, |_| g)
    }

    pub fn num_rows(&self) -> usize {
        self.dofs.len()
    }

    /// Diagonal entries `w_i g(x_i)` of B.
    pub fn scales(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bounds)
            .map(|(w, g)| w * g)
            .collect()
    }

    /// `j_h(v) = Σ |w_i g(x_i) v_i|` for a reduced vector.
    pub fn j_h(&self, v: &[f64]) -> f64 {
        self.free
            .iter()
            .zip(self.weights.iter().zip(&self.bounds))
            .map(|(&i, (w, g))| (w * g * v[i]).abs())
            .sum()
    }

    /// Largest eigenvalue of `BBᵀ`.
    pub fn bbt_max(&self) -> f64 {
        self.scales().iter().fold(0.0f64, |m, s| m.max(s * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_cell_weights() {
        let d = Discretization::new(2).unwrap();
        let sw = simpson_weights(&d);
        assert_eq!(sw.len(), 5);
        let mut by_x: Vec<(f64, f64)> = sw.iter().map(|&(i, w)| (d.space.nodes[i][0], w)).collect();
        by_x.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let expect = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0];
        for ((_, w), e) in by_x.iter().zip(expect) {
            assert!((w - e).abs() < 1e-15);
        }
        for &(i, _) in &sw {
            assert_eq!(d.space.nodes[i][1], -1.0);
        }
    }

    #[test]
    fn weights_partition_length() {
        for n in [1, 4, 7, 16] {
            let d = Discretization::new(n).unwrap();
            let sw = simpson_weights(&d);
            assert_eq!(sw.len(), 2 * n + 1);
            assert!(sw.iter().all(|(_, w)| *w > 0.0));
            assert!((sw.iter().map(|(_, w)| w).sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn j_h_values_and_matrix_agreement() {
        let d = Discretization::new(4).unwrap();
        let op = FrictionOperator::constant(&d, 1.0).unwrap();
        assert_eq!(op.b.shape(), (9, d.space.num_free()));
        let ones = vec![1.0; d.space.num_free()];
        assert!((op.j_h(&ones) - 2.0).abs() < 1e-12);
        assert_eq!(op.j_h(&vec![0.0; d.space.num_free()]), 0.0);
        let v: Vec<f64> = (0..d.space.num_free())
            .map(|i| (i as f64 * 0.37).sin())
            .collect();
        let bv: f64 = op.b.mul_vec(&v).iter().map(|x| x.abs()).sum();
        assert_eq!(bv, op.j_h(&v));
    }

    #[test]
    fn rejects_negative_bound() {
        let d = Discretization::new(2).unwrap();
        assert!(FrictionOperator::constant(&d, -1.0).is_err());
        assert!(FrictionOperator::constant(&d, f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn j_h_is_a_seminorm(
            seed in proptest::collection::vec(-5.0f64..5.0, 2 * 25),
            c in -3.0f64..3.0,
        ) {
            let d = Discretization::new(2).unwrap();
            let op = FrictionOperator::constant(&d, 1.0).unwrap();
            let n = d.space.num_free();
            let u = &seed[..n];
            let v = &seed[n..2 * n];
            let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
            let cu: Vec<f64> = u.iter().map(|a| c * a).collect();
            prop_assert!(op.j_h(u) >= 0.0);
            prop_assert!(op.j_h(&sum) <= op.j_h(u) + op.j_h(v) + 1e-12);
            prop_assert!((op.j_h(&cu) - c.abs() * op.j_h(u)).abs() < 1e-12);
            let mid: Vec<f64> = u.iter().zip(v).map(|(a, b)| 0.3 * a + 0.7 * b).collect();
            prop_assert!(op.j_h(&mid) <= 0.3 * op.j_h(u) + 0.7 * op.j_h(v) + 1e-12);
        }
    }
}
