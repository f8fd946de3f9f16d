//! Quadratic Lagrange basis on triangles.
//!
//! Local ordering: vertices 0, 1, 2, then midpoints of edges (0,1), (1,2),
//! (2,0). All element-level quantities are written in barycentric form so
//! that physical derivatives follow from the constant `∇λ_k`.

use crate::mesh::Point;
use crate::tensor::SymTensor2;

/// Vertex pairs behind the three midpoint functions.
pub const MIDPOINT_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Reference nodes `(x, y)` in local order.
pub const REFERENCE_NODES: [[f64; 2]; 6] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [0.5, 0.5],
    [0.0, 0.5],
];

#[derive(Clone, Debug)]
pub struct RefBasis {
    pub values: [f64; 6],
    pub gradients: [[f64; 2]; 6],
    pub hessians: [SymTensor2; 6],
}

/// Values, gradients and Hessians of the six reference basis functions.
pub fn ref_basis_eval(p: [f64; 2]) -> RefBasis {
    let bary = [1.0 - p[0] - p[1], p[0], p[1]];
    let grad_lambda = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    RefBasis {
        values: values(&bary),
        gradients: gradients(&bary, &grad_lambda),
        hessians: hessians(&grad_lambda),
    }
}

pub fn values(l: &[f64; 3]) -> [f64; 6] {
    let mut v = [0.0; 6];
    for k in 0..3 {
        v[k] = l[k] * (2.0 * l[k] - 1.0);
    }
    for (m, &(a, b)) in MIDPOINT_PAIRS.iter().enumerate() {
        v[3 + m] = 4.0 * l[a] * l[b];
    }
    v
}

pub fn gradients(l: &[f64; 3], gl: &[[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut g = [[0.0; 2]; 6];
    for k in 0..3 {
        let s = 4.0 * l[k] - 1.0;
        g[k] = [s * gl[k][0], s * gl[k][1]];
    }
    for (m, &(a, b)) in MIDPOINT_PAIRS.iter().enumerate() {
        g[3 + m] = [
            4.0 * (l[b] * gl[a][0] + l[a] * gl[b][0]),
            4.0 * (l[b] * gl[a][1] + l[a] * gl[b][1]),
        ];
    }
    g
}

pub fn hessians(gl: &[[f64; 2]; 3]) -> [SymTensor2; 6] {
    let mut h = [SymTensor2::ZERO; 6];
    for k in 0..3 {
        h[k] = SymTensor2::sym_outer(gl[k], gl[k]) * 4.0;
    }
    for (m, &(a, b)) in MIDPOINT_PAIRS.iter().enumerate() {
        h[3 + m] = SymTensor2::sym_outer(gl[a], gl[b]) * 8.0;
    }
    h
}

/// Affine geometry of one triangle.
#[derive(Clone, Debug)]
pub struct ElementGeometry {
    pub points: [Point; 3],
    pub area: f64,
    /// Constant gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(points: [Point; 3]) -> Self {
        let [p0, p1, p2] = points;
        let twice = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
        let grad_lambda = [
            [(p1[1] - p2[1]) / twice, (p2[0] - p1[0]) / twice],
            [(p2[1] - p0[1]) / twice, (p0[0] - p2[0]) / twice],
            [(p0[1] - p1[1]) / twice, (p1[0] - p0[0]) / twice],
        ];
        ElementGeometry {
            points,
            area: 0.5 * twice,
            grad_lambda,
        }
    }

    pub fn map(&self, l: &[f64; 3]) -> Point {
        let p = &self.points;
        [
            l[0] * p[0][0] + l[1] * p[1][0] + l[2] * p[2][0],
            l[0] * p[0][1] + l[1] * p[1][1] + l[2] * p[2][1],
        ]
    }

    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        let p0 = self.points[0];
        let d = [x[0] - p0[0], x[1] - p0[1]];
        let l1 = self.grad_lambda[1][0] * d[0] + self.grad_lambda[1][1] * d[1];
        let l2 = self.grad_lambda[2][0] * d[0] + self.grad_lambda[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2]
    }

    pub fn gradients(&self, l: &[f64; 3]) -> [[f64; 2]; 6] {
        gradients(l, &self.grad_lambda)
    }

    pub fn hessians(&self) -> [SymTensor2; 6] {
        hessians(&self.grad_lambda)
    }

    /// Third derivatives of the local basis. All zero for quadratics; kept so
    /// the `h_K²|v|²_{3,K}` energy term is computed rather than assumed.
    pub fn third_derivatives(&self) -> [[f64; 4]; 6] {
        [[0.0; 4]; 6]
    }
}
