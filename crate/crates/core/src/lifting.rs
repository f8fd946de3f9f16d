//! Gradient jumps on penalized edges and their liftings into the broken P1
//! tensor space.
//!
//! For an edge `e` the local lifting `r_e(φ)` is the element of Σ_h with
//! `∫_Ω r_e(φ):τ = -∫_e φ:{τ}` for all τ in Σ_h. Test tensors supported away
//! from `e` give a zero right-hand side, so `r_e(φ)` lives on the one or two
//! elements adjacent to `e`; there the double-dot mass matrix is
//! `diag(1, 2, 1) ⊗ M_P1`, and the component weights cancel against the
//! right-hand side, leaving one scalar P1 mass solve per component.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fe_space::basis::{self, ElementGeometry};
use crate::fe_space::{edge_rule, triangle_rule, FeSpaceP2, SigmaLocal, SigmaSpaceP1};
use crate::mesh::{Edge, Mesh, Point};
use crate::tensor::{SymTensor2, DDOT_WEIGHT};

/// `⟦∇v⟧` on one edge. It is linear along the edge, so it is stored by its
/// values at the two edge endpoints (`edge.vertices[0]`, `edge.vertices[1]`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeJump {
    pub edge: usize,
    pub ends: [SymTensor2; 2],
}

impl EdgeJump {
    pub fn zero(edge: usize) -> Self {
        EdgeJump {
            edge,
            ends: [SymTensor2::ZERO; 2],
        }
    }

    /// Value at edge parameter `t ∈ [0, 1]`.
    pub fn at(&self, t: f64) -> SymTensor2 {
        SymTensor2::lerp(&self.ends[0], &self.ends[1], t)
    }

    pub fn scaled(&self, c: f64) -> Self {
        EdgeJump {
            edge: self.edge,
            ends: [self.ends[0] * c, self.ends[1] * c],
        }
    }

    /// `‖φ‖²_{0,e}`.
    pub fn norm_sq(&self, length: f64) -> f64 {
        let rule = edge_rule();
        length * rule.integrate(|t| self.at(t).norm_sq())
    }
}

/// Lifting of a single edge function, restricted to the supporting elements.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalLift {
    pub parts: Vec<(usize, SigmaLocal)>,
}

impl LocalLift {
    pub fn is_zero(&self) -> bool {
        self.parts
            .iter()
            .all(|(_, c)| c.iter().flatten().all(|x| *x == 0.0))
    }
}

/// Linear map from the dofs touching one edge to the jump and the lifting.
#[derive(Clone, Debug)]
pub struct EdgeLifting {
    pub edge: usize,
    /// Global dofs of the supporting elements (plus side first).
    pub dofs: Vec<usize>,
    /// `⟦∇φ_d⟧` at the edge endpoints, one entry per dof.
    pub jumps: Vec<[SymTensor2; 2]>,
    /// Per supporting element: lifting coefficients of each dof's jump.
    pub lifts: Vec<(usize, Vec<SigmaLocal>)>,
}

/// Lifting of `⟦∇·⟧` onto a single element, collected over all of the
/// element's penalized edges, i.e. the element restriction of `r_0`.
#[derive(Clone, Debug, Default)]
pub struct ElementLifting {
    pub dofs: Vec<usize>,
    pub coeffs: Vec<SigmaLocal>,
}

/// All edge liftings of a mesh.
#[derive(Clone, Debug)]
pub struct Lifting {
    pub edges: Vec<EdgeLifting>,
    /// Position in `edges` of each mesh edge, if penalized.
    pub slot: Vec<Option<usize>>,
}

fn endpoint_bary(g: &ElementGeometry, mesh: &Mesh, e: &Edge) -> [[f64; 3]; 2] {
    [
        g.barycentric(mesh.vertices[e.vertices[0]]),
        g.barycentric(mesh.vertices[e.vertices[1]]),
    ]
}

fn edge_point(mesh: &Mesh, e: &Edge, t: f64) -> Point {
    let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn check_penalized(mesh: &Mesh, e: usize) -> Result<&Edge> {
    let edge = mesh
        .edges
        .get(e)
        .ok_or_else(|| Error::Dimension(format!("edge {e} out of range")))?;
    if edge.is_penalized() {
        Ok(edge)
    } else {
        Err(Error::EdgeNotPenalized(e))
    }
}

/// `⟦∇v⟧` on a penalized edge: `sym((∇v⁺ − ∇v⁻) ⊗ n⁺)` inside the domain and
/// `sym(∇v ⊗ ν)` on the clamped boundary.
pub fn gradient_jump(mesh: &Mesh, space: &FeSpaceP2, v: &[f64], e: usize) -> Result<EdgeJump> {
    let edge = check_penalized(mesh, e)?;
    let n = edge.normal;
    let side = |t: usize| -> [[f64; 2]; 2] {
        let b = endpoint_bary(&space.geometry[t], mesh, edge);
        [
            space.eval_gradient(t, v, &b[0]),
            space.eval_gradient(t, v, &b[1]),
        ]
    };
    let gp = side(edge.plus);
    let g = match edge.minus {
        Some(m) => {
            let gm = side(m);
            [
                [gp[0][0] - gm[0][0], gp[0][1] - gm[0][1]],
                [gp[1][0] - gm[1][0], gp[1][1] - gm[1][1]],
            ]
        }
        None => gp,
    };
    Ok(EdgeJump {
        edge: e,
        ends: [
            SymTensor2::sym_outer(g[0], n),
            SymTensor2::sym_outer(g[1], n),
        ],
    })
}

/// Weight of the one-sided trace inside the average `{τ}`.
fn average_weight(edge: &Edge) -> f64 {
    if edge.minus.is_some() {
        0.5
    } else {
        1.0
    }
}

/// Lifting of `φ` restricted to element `t`, which must be adjacent to the edge.
fn lift_on_element(
    mesh: &Mesh,
    edge: &Edge,
    geom: &ElementGeometry,
    elem: usize,
    phi: &EdgeJump,
) -> Result<SigmaLocal> {
    let minv = SigmaSpaceP1::p1_mass_inverse(geom.area).ok_or(Error::DegenerateElement(elem))?;
    let rule = edge_rule();
    let alpha = average_weight(edge);
    // b[comp][l] = ∫_e φ_comp λ_l ds
    let mut b = [[0.0; 3]; 3];
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        let l = geom.barycentric(edge_point(mesh, edge, *t));
        let f = phi.at(*t).as_array();
        for comp in 0..3 {
            for k in 0..3 {
                b[comp][k] += w * edge.length * f[comp] * l[k];
            }
        }
    }
    let mut c = [[0.0; 3]; 3];
    for comp in 0..3 {
        for k in 0..3 {
            c[comp][k] = -alpha * (0..3).map(|l| minv[k][l] * b[comp][l]).sum::<f64>();
        }
    }
    Ok(c)
}

/// `r_e(φ)` for a penalized edge.
pub fn local_lift(mesh: &Mesh, space: &FeSpaceP2, phi: &EdgeJump) -> Result<LocalLift> {
    let edge = check_penalized(mesh, phi.edge)?;
    let parts = edge
        .elements()
        .map(|t| Ok((t, lift_on_element(mesh, edge, &space.geometry[t], t, phi)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalLift { parts })
}

/// `r_0(⟦∇v⟧) = Σ_e r_e(⟦∇v⟧|_e)`, reduced element by element over each
/// element's edges in local order.
pub fn global_lift(mesh: &Mesh, space: &FeSpaceP2, v: &[f64]) -> Result<Vec<SigmaLocal>> {
    (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let mut acc = [[0.0; 3]; 3];
            for &e in &mesh.triangles[t].edges {
                let edge = &mesh.edges[e];
                if !edge.is_penalized() {
                    continue;
                }
                let phi = gradient_jump(mesh, space, v, e)?;
                let c = lift_on_element(mesh, edge, &space.geometry[t], t, &phi)?;
                add_local(&mut acc, &c, 1.0);
            }
            Ok(acc)
        })
        .collect()
}

pub(crate) fn add_local(acc: &mut SigmaLocal, c: &SigmaLocal, s: f64) {
    for comp in 0..3 {
        for k in 0..3 {
            acc[comp][k] += s * c[comp][k];
        }
    }
}

/// `‖σ‖²_{0,K}` for a local P1 tensor field.
pub fn local_norm_sq(c: &SigmaLocal, area: f64) -> f64 {
    let m = SigmaSpaceP1::p1_mass(area);
    let mut s = 0.0;
    for comp in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                s += DDOT_WEIGHT[comp] * c[comp][k] * m[k][l] * c[comp][l];
            }
        }
    }
    s
}

/// `‖r_e(φ)‖²_0`.
pub fn lift_norm_sq(space: &FeSpaceP2, lift: &LocalLift) -> f64 {
    lift.parts
        .iter()
        .map(|(t, c)| local_norm_sq(c, space.geometry[*t].area))
        .sum()
}

impl Lifting {
    /// Precompute the jump and lifting maps of every penalized edge.
    pub fn new(mesh: &Mesh, space: &FeSpaceP2) -> Result<Self> {
        let penalized: Vec<usize> = mesh.penalized_edges().map(|(i, _)| i).collect();
        let edges = penalized
            .par_iter()
            .map(|&e| edge_lifting(mesh, space, e))
            .collect::<Result<Vec<_>>>()?;
        let mut slot = vec![None; mesh.num_edges()];
        for (s, &e) in penalized.iter().enumerate() {
            slot[e] = Some(s);
        }
        Ok(Lifting { edges, slot })
    }

    pub fn edge(&self, e: usize) -> Option<&EdgeLifting> {
        self.slot[e].map(|s| &self.edges[s])
    }

    /// Element restriction of `r_0` as a map from nearby dofs.
    pub fn element_liftings(&self, mesh: &Mesh) -> Vec<ElementLifting> {
        (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let mut out = ElementLifting::default();
                for &e in &mesh.triangles[t].edges {
                    let Some(el) = self.edge(e) else { continue };
                    let Some((_, coeffs)) = el.lifts.iter().find(|(k, _)| *k == t) else {
                        continue;
                    };
                    for (d, c) in el.dofs.iter().zip(coeffs) {
                        let pos = match out.dofs.iter().position(|x| x == d) {
                            Some(p) => p,
                            None => {
                                out.dofs.push(*d);
                                out.coeffs.push([[0.0; 3]; 3]);
                                out.dofs.len() - 1
                            }
                        };
                        add_local(&mut out.coeffs[pos], c, 1.0);
                    }
                }
                out
            })
            .collect()
    }
}

fn edge_lifting(mesh: &Mesh, space: &FeSpaceP2, e: usize) -> Result<EdgeLifting> {
    let edge = &mesh.edges[e];
    let n = edge.normal;
    let mut dofs: Vec<usize> = Vec::with_capacity(9);
    let mut grads: Vec<[[f64; 2]; 2]> = Vec::with_capacity(9);
    for (side, t) in edge.elements().enumerate() {
        let sign = if side == 0 { 1.0 } else { -1.0 };
        let geom = &space.geometry[t];
        let b = endpoint_bary(geom, mesh, edge);
        let g0 = basis::gradients(&b[0], &geom.grad_lambda);
        let g1 = basis::gradients(&b[1], &geom.grad_lambda);
        for (i, &d) in space.element_dofs[t].iter().enumerate() {
            let pos = match dofs.iter().position(|x| *x == d) {
                Some(p) => p,
                None => {
                    dofs.push(d);
                    grads.push([[0.0; 2]; 2]);
                    dofs.len() - 1
                }
            };
            for c in 0..2 {
                grads[pos][0][c] += sign * g0[i][c];
                grads[pos][1][c] += sign * g1[i][c];
            }
        }
    }
    let jumps: Vec<[SymTensor2; 2]> = grads
        .iter()
        .map(|g| {
            [
                SymTensor2::sym_outer(g[0], n),
                SymTensor2::sym_outer(g[1], n),
            ]
        })
        .collect();
    let lifts = edge
        .elements()
        .map(|t| {
            let coeffs = jumps
                .iter()
                .map(|ends| {
                    let phi = EdgeJump {
                        edge: e,
                        ends: *ends,
                    };
                    lift_on_element(mesh, edge, &space.geometry[t], t, &phi)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((t, coeffs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EdgeLifting {
        edge: e,
        dofs,
        jumps,
        lifts,
    })
}

impl EdgeLifting {
    pub fn jump_of(&self, v: &[f64]) -> EdgeJump {
        let mut ends = [SymTensor2::ZERO; 2];
        for (d, j) in self.dofs.iter().zip(&self.jumps) {
            ends[0] += j[0] * v[*d];
            ends[1] += j[1] * v[*d];
        }
        EdgeJump {
            edge: self.edge,
            ends,
        }
    }

    pub fn lift_of(&self, v: &[f64]) -> LocalLift {
        let parts = self
            .lifts
            .iter()
            .map(|(t, coeffs)| {
                let mut acc = [[0.0; 3]; 3];
                for (d, c) in self.dofs.iter().zip(coeffs) {
                    add_local(&mut acc, c, v[*d]);
                }
                (*t, acc)
            })
            .collect();
        LocalLift { parts }
    }
}

/// Extremal values of `‖r_e(⟦∇v⟧)‖² / (h_e⁻¹‖⟦∇v⟧‖²_e)` over all `v` with a
/// nonzero jump on `e`.
///
/// For continuous `v` the tangential derivative does not jump, so
/// `⟦∇v⟧ = s n⊗n` with `s` linear along the edge; the quotient is a 2x2
/// generalized Rayleigh quotient in the endpoint values of `s`.
pub fn edge_ratio_bounds(mesh: &Mesh, space: &FeSpaceP2, e: usize) -> Result<(f64, f64)> {
    let edge = check_penalized(mesh, e)?;
    let nn = SymTensor2::sym_outer(edge.normal, edge.normal);
    let hat = |k: usize| -> EdgeJump {
        let mut ends = [SymTensor2::ZERO; 2];
        ends[k] = nn;
        EdgeJump { edge: e, ends }
    };
    let lifts = [
        local_lift(mesh, space, &hat(0))?,
        local_lift(mesh, space, &hat(1))?,
    ];
    let mut num = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            num[i][j] = lift_inner(space, &lifts[i], &lifts[j]);
        }
    }
    // ∫_e (n⊗n):(n⊗n) ψ_i ψ_j ds = h_e/6 * [[2,1],[1,2]], scaled by h_e⁻¹
    let den = [[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]];
    Ok(generalized_eig_2x2(num, den))
}

fn lift_inner(space: &FeSpaceP2, a: &LocalLift, b: &LocalLift) -> f64 {
    let mut s = 0.0;
    for (ta, ca) in &a.parts {
        for (tb, cb) in &b.parts {
            if ta != tb {
                continue;
            }
            let m = SigmaSpaceP1::p1_mass(space.geometry[*ta].area);
            for comp in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        s += DDOT_WEIGHT[comp] * ca[comp][k] * m[k][l] * cb[comp][l];
                    }
                }
            }
        }
    }
    s
}

/// Eigenvalues of `N x = μ D x` for symmetric `N` and SPD `D`, ascending.
fn generalized_eig_2x2(n: [[f64; 2]; 2], d: [[f64; 2]; 2]) -> (f64, f64) {
    // det(N - μD) = 0
    let a = d[0][0] * d[1][1] - d[0][1] * d[1][0];
    let b = -(n[0][0] * d[1][1] + n[1][1] * d[0][0] - n[0][1] * d[1][0] - n[1][0] * d[0][1]);
    let c = n[0][0] * n[1][1] - n[0][1] * n[1][0];
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let (r1, r2) = ((-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a));
    (r1.min(r2), r1.max(r2))
}

/// Largest `|∫_Ω r_e(φ):τ + ∫_e φ:{τ}|` over the local basis tensors `τ` of
/// the elements next to `φ`'s edge, evaluated by pointwise quadrature
/// independently of the closed-form mass solve. Tensors on other elements
/// give zero on both sides.
pub fn adjoint_defect(m: &Mesh, s: &FeSpaceP2, phi: &EdgeJump) -> Result<f64> {
    let lift = local_lift(m, s, phi)?;
    let edge = &m.edges[phi.edge];
    let tri = triangle_rule(6);
    let erule = crate::fe_space::quadrature::edge_gauss(4);
    let mut worst: f64 = 0.0;
    for t in edge.elements() {
        let geom = &s.geometry[t];
        let c = lift
            .parts
            .iter()
            .find(|(k, _)| *k == t)
            .map_or([[0.0; 3]; 3], |p| p.1);
        for comp in 0..3 {
            for k in 0..3 {
                let mut tau = [[0.0; 3]; 3];
                tau[comp][k] = 1.0;
                let vol = 2.0
                    * geom.area
                    * tri.integrate(|p| {
                        let l = [1.0 - p[0] - p[1], p[0], p[1]];
                        SigmaSpaceP1::eval(&c, &l).ddot(&SigmaSpaceP1::eval(&tau, &l))
                    });
                let w = if edge.minus.is_some() { 0.5 } else { 1.0 };
                let surf = edge.length
                    * erule.integrate(|tt| {
                        let l = geom.barycentric(edge_point(m, edge, tt));
                        phi.at(tt).ddot(&(SigmaSpaceP1::eval(&tau, &l) * w))
                    });
                worst = worst.max((vol + surf).abs());
            }
        }
    }
    Ok(worst)
}
