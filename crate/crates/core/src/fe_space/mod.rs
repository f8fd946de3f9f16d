//! Continuous P2 space with clamped-edge constraints and the broken P1
//! symmetric-tensor space used by the lifting operators.

pub mod basis;
pub mod quadrature;

use crate::mesh::{Mesh, Point};
use crate::tensor::SymTensor2;

pub use basis::{ref_basis_eval, ElementGeometry, RefBasis};
pub use quadrature::{default_triangle_rule, edge_rule, triangle_rule, EdgeRule, QuadratureRule};

/// Global dofs: mesh vertices followed by edge midpoints.
#[derive(Clone, Debug)]
pub struct FeSpaceP2 {
    pub nodes: Vec<Point>,
    /// Local-to-global dof map per triangle.
    pub element_dofs: Vec<[usize; 6]>,
    pub geometry: Vec<ElementGeometry>,
    /// `true` for dofs whose node lies on the closed clamped edge `y = 1`.
    pub clamped: Vec<bool>,
    /// Reduced index of each unconstrained dof.
    pub free_index: Vec<Option<usize>>,
    /// Unconstrained dofs in node order.
    pub free_dofs: Vec<usize>,
    pub num_vertices: usize,
}

impl FeSpaceP2 {
    pub fn new(mesh: &Mesh) -> Self {
        let nv = mesh.num_vertices();
        let mut nodes = mesh.vertices.clone();
        nodes.extend(mesh.edges.iter().map(|e| {
            let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }));
        let element_dofs = mesh
            .triangles
            .iter()
            .map(|t| {
                let v = t.vertices;
                [
                    v[0],
                    v[1],
                    v[2],
                    nv + t.edges[0],
                    nv + t.edges[1],
                    nv + t.edges[2],
                ]
            })
            .collect();
        let geometry = (0..mesh.num_triangles())
            .map(|t| ElementGeometry::new(mesh.triangle_points(t)))
            .collect();
        let clamped: Vec<bool> = nodes.iter().map(|p| p[1] == 1.0).collect();
        let mut free_index = vec![None; nodes.len()];
        let mut free_dofs = Vec::new();
        for (i, c) in clamped.iter().enumerate() {
            if !c {
                free_index[i] = Some(free_dofs.len());
                free_dofs.push(i);
            }
        }
        FeSpaceP2 {
            nodes,
            element_dofs,
            geometry,
            clamped,
            free_index,
            free_dofs,
            num_vertices: nv,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn num_elements(&self) -> usize {
        self.element_dofs.len()
    }

    /// Nodal interpolant `(u_I)_i = u(x_i)`; clamped dofs are not touched.
    pub fn interpolate(&self, u: impl Fn(Point) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|p| u(*p)).collect()
    }

    /// Zero the clamped dofs in place.
    pub fn apply_clamp(&self, v: &mut [f64]) {
        for (x, c) in v.iter_mut().zip(&self.clamped) {
            if *c {
                *x = 0.0;
            }
        }
    }

    /// Restrict a full dof vector to the free dofs.
    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&i| v[i]).collect()
    }

    /// Extend a reduced vector by zeros on the clamped dofs.
    pub fn extend(&self, reduced: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.num_dofs()];
        for (&i, &x) in self.free_dofs.iter().zip(reduced) {
            full[i] = x;
        }
        full
    }

    pub fn local_values(&self, t: usize, v: &[f64]) -> [f64; 6] {
        self.element_dofs[t].map(|i| v[i])
    }

    pub fn eval(&self, t: usize, v: &[f64], l: &[f64; 3]) -> f64 {
        let c = self.local_values(t, v);
        basis::values(l).iter().zip(c).map(|(b, c)| b * c).sum()
    }

    pub fn eval_gradient(&self, t: usize, v: &[f64], l: &[f64; 3]) -> [f64; 2] {
        let c = self.local_values(t, v);
        let g = self.geometry[t].gradients(l);
        let mut out = [0.0; 2];
        for i in 0..6 {
            out[0] += c[i] * g[i][0];
            out[1] += c[i] * g[i][1];
        }
        out
    }

    /// Elementwise (constant) Hessian of `v` on triangle `t`.
    pub fn element_hessian(&self, t: usize, v: &[f64]) -> SymTensor2 {
        let c = self.local_values(t, v);
        self.geometry[t]
            .hessians()
            .iter()
            .zip(c)
            .fold(SymTensor2::ZERO, |acc, (h, c)| acc + *h * c)
    }
}

/// Layout of the broken P1 symmetric tensor space: per element, three
/// components `(xx, xy, yy)` times three vertex (barycentric) coefficients.
#[derive(Clone, Copy, Debug)]
pub struct SigmaSpaceP1 {
    pub num_elements: usize,
}

/// Coefficients of one element: `c[comp][k]`.
pub type SigmaLocal = [[f64; 3]; 3];

pub const SIGMA_LOCAL_DIM: usize = 9;

impl SigmaSpaceP1 {
    pub fn new(mesh: &Mesh) -> Self {
        SigmaSpaceP1 {
            num_elements: mesh.num_triangles(),
        }
    }

    pub fn dim(&self) -> usize {
        SIGMA_LOCAL_DIM * self.num_elements
    }

    pub fn flat_index(elem: usize, comp: usize, k: usize) -> usize {
        SIGMA_LOCAL_DIM * elem + 3 * comp + k
    }

    /// Value of a local field at barycentric point `l`.
    pub fn eval(c: &SigmaLocal, l: &[f64; 3]) -> SymTensor2 {
        let comp = |a: usize| c[a][0] * l[0] + c[a][1] * l[1] + c[a][2] * l[2];
        SymTensor2::new(comp(0), comp(1), comp(2))
    }

    /// Coefficients of a constant tensor.
    pub fn constant(t: &SymTensor2) -> SigmaLocal {
        let a = t.as_array();
        [[a[0]; 3], [a[1]; 3], [a[2]; 3]]
    }

    /// Scalar P1 mass matrix `∫_K λ_k λ_l`.
    pub fn p1_mass(area: f64) -> [[f64; 3]; 3] {
        let d = area / 6.0;
        let o = area / 12.0;
        [[d, o, o], [o, d, o], [o, o, d]]
    }

    /// Inverse of [`Self::p1_mass`]; `None` for a degenerate element.
    pub fn p1_mass_inverse(area: f64) -> Option<[[f64; 3]; 3]> {
        if !(area > 0.0) || !area.is_finite() {
            return None;
        }
        let d = 9.0 / area;
        let o = -3.0 / area;
        Some([[d, o, o], [o, d, o], [o, o, d]])
    }
}
