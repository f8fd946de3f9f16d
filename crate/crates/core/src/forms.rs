//! Stiffness matrices of the five C⁰ DG methods and the load vector.
//!
//! Matrix convention: `A_ij = B(φ_j, φ_i)`, so `A u = f` is the Galerkin
//! system `B(u_h, φ_i) = (f, φ_i)`. This matters only for the non-symmetric
//! NIPG form.
//!
//! Building blocks (full dof numbering, clamped dofs included):
//!
//! * `a`: `∫ M(∇²φ_j):∇²φ_i` with `M(τ) = (1-κ)τ + κ tr(τ) I`
//! * `C`: `C_ij = ∫_{E⁰} ⟦∇φ_j⟧ : M({∇²φ_i})`
//! * `J`: `∫_{E⁰} η h_e⁻¹ ⟦∇φ_i⟧:⟦∇φ_j⟧`
//! * `P_r0`: `∫ M(r_0(⟦∇φ_i⟧)) : r_0(⟦∇φ_j⟧)`
//! * `P_re`: `Σ_e η ∫ M(r_e(⟦∇φ_i⟧)) : r_e(⟦∇φ_j⟧)`
//! * `M_cross`: `∫ r_0(⟦∇φ_i⟧) : M(∇²φ_j)`, which equals `-Cᵀ` on V_h
//!
//! The primal forms combine `a`, `C`, `J`, `P_r0`, `P_re` edge by edge. The
//! compact forms are assembled element by element from the lifted Hessian
//! `∇²_h v + r_0(⟦∇v⟧)`, never touching edge integrals of Hessians.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::fe_space::{basis, default_triangle_rule, edge_rule, SigmaLocal, SigmaSpaceP1};
use crate::mesh::Point;
use crate::sparse::CsrMatrix;
use crate::tensor::{moment_weight, SymTensor2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// C⁰ interior penalty.
    InteriorPenalty,
    /// Non-symmetric interior penalty.
    Nipg,
    WellsDung,
    /// Lifting-penalized form extended from Bassi–Rebay.
    BassiRebay,
    /// Local C⁰ DG.
    Lcdg,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::InteriorPenalty,
        Method::Nipg,
        Method::WellsDung,
        Method::BassiRebay,
        Method::Lcdg,
    ];

    pub fn from_index(j: usize) -> Result<Method> {
        match j {
            1..=5 => Ok(Method::ALL[j - 1]),
            _ => Err(Error::param("method", format!("{j} is not in 1..=5"))),
        }
    }

    pub fn index(self) -> usize {
        Method::ALL.iter().position(|m| *m == self).unwrap() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::InteriorPenalty => "C0 IP",
            Method::Nipg => "NIPG",
            Method::WellsDung => "Wells-Dung",
            Method::BassiRebay => "Bassi-Rebay",
            Method::Lcdg => "LCDG",
        }
    }

    pub fn is_symmetric(self) -> bool {
        self != Method::Nipg
    }

    fn uses_jump_penalty(self) -> bool {
        matches!(self, Method::InteriorPenalty | Method::Nipg | Method::Lcdg)
    }

    fn uses_edge_lift_penalty(self) -> bool {
        matches!(self, Method::WellsDung | Method::BassiRebay)
    }

    fn uses_r0_product(self) -> bool {
        matches!(self, Method::WellsDung | Method::Lcdg)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    #[default]
    Primal,
    Compact,
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(Formulation::Primal),
            "compact" => Ok(Formulation::Compact),
            other => Err(Error::param(
                "formulation",
                format!("unknown formulation `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MethodId {
    pub method: Method,
    pub formulation: Formulation,
}

impl MethodId {
    pub fn new(method: Method, formulation: Formulation) -> Self {
        MethodId {
            method,
            formulation,
        }
    }
}

/// Poisson ratio and penalty value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssemblyInputs {
    pub kappa: f64,
    pub eta: f64,
}

impl AssemblyInputs {
    pub fn new(kappa: f64, eta: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa < 0.5) {
            return Err(Error::param("kappa", format!("{kappa} is not in (0, 0.5)")));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param("eta", format!("{eta} must be positive")));
        }
        Ok(AssemblyInputs { kappa, eta })
    }
}

/// Right-hand sides of the plate problem. Serialized as `"paper-example"`
/// or `"constant:<value>"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Load {
    /// `24(1-x²)² + 24(1-y²)² + 32(3x²-1)(3y²-1)`
    PaperExample,
    Constant(f64),
}

impl Load {
    pub fn eval(&self, p: Point) -> f64 {
        match *self {
            Load::PaperExample => {
                let (x, y) = (p[0], p[1]);
                24.0 * (1.0 - x * x).powi(2)
                    + 24.0 * (1.0 - y * y).powi(2)
                    + 32.0 * (3.0 * x * x - 1.0) * (3.0 * y * y - 1.0)
            }
            Load::Constant(c) => c,
        }
    }
}

impl FromStr for Load {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "paper-example" {
            return Ok(Load::PaperExample);
        }
        if let Some(v) = s.strip_prefix("constant:") {
            return v
                .trim()
                .parse()
                .map(Load::Constant)
                .map_err(|_| Error::param("load", format!("bad constant in `{s}`")));
        }
        Err(Error::param("load", format!("unknown load selector `{s}`")))
    }
}

impl TryFrom<String> for Load {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Load> for String {
    fn from(l: Load) -> String {
        l.to_string()
    }
}

impl fmt::Display for Load {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Load::PaperExample => f.write_str("paper-example"),
            Load::Constant(c) => write!(f, "constant:{c}"),
        }
    }
}

/// The three lifting-based pieces.
#[derive(Clone, Debug)]
pub struct LiftingPenalties {
    pub cross: CsrMatrix,
    pub r0: CsrMatrix,
    pub re: CsrMatrix,
}

type Local = (Vec<usize>, Vec<f64>);

/// Scatter dense local blocks (row dofs == col dofs) into a sparse matrix.
/// Blocks arrive in a fixed order, which fixes the summation order.
fn gather(n: usize, blocks: Vec<Local>) -> CsrMatrix {
    let cap = blocks.iter().map(|(d, _)| d.len() * d.len()).sum();
    let mut trips = Vec::with_capacity(cap);
    for (dofs, vals) in blocks {
        let m = dofs.len();
        for (a, &i) in dofs.iter().enumerate() {
            for (b, &j) in dofs.iter().enumerate() {
                trips.push((i, j, vals[a * m + b]));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, trips).expect("dofs in range")
}

/// `aᵀ (W ⊗ m) b` for local tensor coefficients.
fn weighted_inner(a: &SigmaLocal, b: &SigmaLocal, w: &[[f64; 3]; 3], m: &[[f64; 3]; 3]) -> f64 {
    let mut s = 0.0;
    for (p, wp) in w.iter().enumerate() {
        for (q, wpq) in wp.iter().enumerate() {
            if *wpq == 0.0 {
                continue;
            }
            let mut t = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    t += a[p][k] * m[k][l] * b[q][l];
                }
            }
            s += wpq * t;
        }
    }
    s
}

/// Volume term `a(φ_j, φ_i)`.
pub fn assemble_volume(d: &Discretization, kappa: f64) -> CsrMatrix {
    let blocks = (0..d.space.num_elements())
        .into_par_iter()
        .map(|t| {
            let g = &d.space.geometry[t];
            let h = g.hessians();
            let mut vals = vec![0.0; 36];
            for i in 0..6 {
                for j in 0..6 {
                    vals[i * 6 + j] = g.area * h[j].moment(kappa).ddot(&h[i]);
                }
            }
            (d.space.element_dofs[t].to_vec(), vals)
        })
        .collect();
    gather(d.space.num_dofs(), blocks)
}

/// `{∇²φ_d}` on an edge for each dof of the edge lifting.
fn average_hessians(d: &Discretization, e: usize, dofs: &[usize]) -> Vec<SymTensor2> {
    let edge = &d.mesh.edges[e];
    let w = if edge.minus.is_some() { 0.5 } else { 1.0 };
    let mut out = vec![SymTensor2::ZERO; dofs.len()];
    for t in edge.elements() {
        let h = d.space.geometry[t].hessians();
        for (i, dof) in d.space.element_dofs[t].iter().enumerate() {
            let pos = dofs
                .iter()
                .position(|x| x == dof)
                .expect("element dof in edge map");
            out[pos] += h[i] * w;
        }
    }
    out
}

/// Consistency matrix `C_ij = ∫_{E⁰} ⟦∇φ_j⟧ : M({∇²φ_i}) ds`.
pub fn assemble_consistency(d: &Discretization, kappa: f64) -> CsrMatrix {
    let rule = edge_rule();
    let blocks = d
        .lifting
        .edges
        .par_iter()
        .map(|el| {
            let len = d.mesh.edges[el.edge].length;
            let avg = average_hessians(d, el.edge, &el.dofs);
            let m = el.dofs.len();
            let mut vals = vec![0.0; m * m];
            for (i, hi) in avg.iter().enumerate() {
                let mh = hi.moment(kappa);
                for (j, jj) in el.jumps.iter().enumerate() {
                    vals[i * m + j] =
                        len * rule.integrate(|t| SymTensor2::lerp(&jj[0], &jj[1], t).ddot(&mh));
                }
            }
            (el.dofs.clone(), vals)
        })
        .collect();
    gather(d.space.num_dofs(), blocks)
}

/// `∫_{E⁰} η h_e⁻¹ ⟦∇φ_i⟧:⟦∇φ_j⟧ ds`.
pub fn assemble_jump_penalty(d: &Discretization, eta: f64) -> CsrMatrix {
    let rule = edge_rule();
    let blocks = d
        .lifting
        .edges
        .par_iter()
        .map(|el| {
            // η h_e⁻¹ ∫_e ds = η ∫_0^1 dt
            let m = el.dofs.len();
            let mut vals = vec![0.0; m * m];
            for (i, ji) in el.jumps.iter().enumerate() {
                for (j, jj) in el.jumps.iter().enumerate() {
                    vals[i * m + j] = eta
                        * rule.integrate(|t| {
                            SymTensor2::lerp(&ji[0], &ji[1], t)
                                .ddot(&SymTensor2::lerp(&jj[0], &jj[1], t))
                        });
                }
            }
            (el.dofs.clone(), vals)
        })
        .collect();
    gather(d.space.num_dofs(), blocks)
}

/// Rectangular element block: rows, columns, row-major values.
type RectBlock = (Vec<usize>, Vec<usize>, Vec<f64>);

/// `M_cross`, `P_r0` and `P_re`.
pub fn assemble_lifting_penalties(d: &Discretization, kappa: f64, eta: f64) -> LiftingPenalties {
    let w = moment_weight(kappa);
    let n = d.space.num_dofs();

    let (cross_blocks, r0_blocks): (Vec<RectBlock>, Vec<Local>) = (0..d.space.num_elements())
        .into_par_iter()
        .map(|t| {
            let g = &d.space.geometry[t];
            let mass = SigmaSpaceP1::p1_mass(g.area);
            let el = &d.element_lifts[t];
            let hess: Vec<SigmaLocal> = g.hessians().iter().map(SigmaSpaceP1::constant).collect();
            let m = el.dofs.len();
            // rows: lifting dofs, cols: element dofs
            let mut cross = vec![0.0; m * 6];
            for (i, ri) in el.coeffs.iter().enumerate() {
                for (j, hj) in hess.iter().enumerate() {
                    cross[i * 6 + j] = weighted_inner(ri, hj, &w, &mass);
                }
            }
            let mut r0 = vec![0.0; m * m];
            for (i, ri) in el.coeffs.iter().enumerate() {
                for (j, rj) in el.coeffs.iter().enumerate() {
                    r0[i * m + j] = weighted_inner(ri, rj, &w, &mass);
                }
            }
            (
                (el.dofs.clone(), d.space.element_dofs[t].to_vec(), cross),
                (el.dofs.clone(), r0),
            )
        })
        .unzip();

    let mut trips = Vec::new();
    for (rows, cols, vals) in cross_blocks {
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                trips.push((i, j, vals[a * cols.len() + b]));
            }
        }
    }
    let cross = CsrMatrix::from_triplets(n, n, trips).expect("dofs in range");
    let r0 = gather(n, r0_blocks);

    let re_blocks = d
        .lifting
        .edges
        .par_iter()
        .map(|el| {
            let m = el.dofs.len();
            let mut vals = vec![0.0; m * m];
            for (t, coeffs) in &el.lifts {
                let mass = SigmaSpaceP1::p1_mass(d.space.geometry[*t].area);
                for (i, ci) in coeffs.iter().enumerate() {
                    for (j, cj) in coeffs.iter().enumerate() {
                        vals[i * m + j] += eta * weighted_inner(ci, cj, &w, &mass);
                    }
                }
            }
            (el.dofs.clone(), vals)
        })
        .collect();
    let re = gather(n, re_blocks);
    LiftingPenalties { cross, r0, re }
}

/// Per-element blocks of the compact formulation over the element's lifting
/// patch, built from the lifted Hessian `h_i + r_i`.
fn compact_element_blocks(d: &Discretization, method: Method, kappa: f64) -> Vec<Local> {
    let w = moment_weight(kappa);
    (0..d.space.num_elements())
        .into_par_iter()
        .map(|t| {
            let g = &d.space.geometry[t];
            let mass = SigmaSpaceP1::p1_mass(g.area);
            let el = &d.element_lifts[t];
            let hessians = g.hessians();
            let mut dofs = el.dofs.clone();
            for dof in d.space.element_dofs[t] {
                if !dofs.contains(&dof) {
                    dofs.push(dof);
                }
            }
            let m = dofs.len();
            let zero = [[0.0; 3]; 3];
            let hvec: Vec<SigmaLocal> = dofs
                .iter()
                .map(
                    |dof| match d.space.element_dofs[t].iter().position(|x| x == dof) {
                        Some(k) => SigmaSpaceP1::constant(&hessians[k]),
                        None => zero,
                    },
                )
                .collect();
            let rvec: Vec<SigmaLocal> = dofs
                .iter()
                .map(|dof| match el.dofs.iter().position(|x| x == dof) {
                    Some(k) => el.coeffs[k],
                    None => zero,
                })
                .collect();
            let lifted: Vec<SigmaLocal> = hvec
                .iter()
                .zip(&rvec)
                .map(|(h, r)| {
                    let mut s = *h;
                    crate::lifting::add_local(&mut s, r, 1.0);
                    s
                })
                .collect();
            let mut vals = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    let ip = |a: &SigmaLocal, b: &SigmaLocal| weighted_inner(a, b, &w, &mass);
                    vals[i * m + j] = match method {
                        // ∫ M(∇²u + r0(u)) : (∇²v + r0(v))
                        Method::WellsDung | Method::Lcdg => ip(&lifted[j], &lifted[i]),
                        // ∫ M(∇²u):(∇²v + r0(v)) + ∫ r0(u):M(∇²v)
                        Method::InteriorPenalty | Method::BassiRebay => {
                            ip(&hvec[j], &lifted[i]) + ip(&rvec[j], &hvec[i])
                        }
                        // ∫ M(∇²u):(∇²v + r0(v)) - ∫ r0(u):M(∇²v)
                        Method::Nipg => ip(&hvec[j], &lifted[i]) - ip(&rvec[j], &hvec[i]),
                    };
                }
            }
            (dofs, vals)
        })
        .collect()
}

/// Full (unconstrained) stiffness matrix of a method.
pub fn assemble_full(
    d: &Discretization,
    id: MethodId,
    inputs: AssemblyInputs,
) -> Result<CsrMatrix> {
    let AssemblyInputs { kappa, eta } = AssemblyInputs::new(inputs.kappa, inputs.eta)?;
    let method = id.method;
    let mut terms: Vec<(f64, CsrMatrix)> = Vec::new();
    match id.formulation {
        Formulation::Primal => {
            terms.push((1.0, assemble_volume(d, kappa)));
            let c = assemble_consistency(d, kappa);
            let ct = c.transpose();
            let cs = if method == Method::Nipg { 1.0 } else { -1.0 };
            terms.push((cs, c));
            terms.push((-1.0, ct));
            if method.uses_r0_product() || method.uses_edge_lift_penalty() {
                let lp = assemble_lifting_penalties(d, kappa, eta);
                if method.uses_r0_product() {
                    terms.push((1.0, lp.r0));
                }
                if method.uses_edge_lift_penalty() {
                    terms.push((1.0, lp.re));
                }
            }
        }
        Formulation::Compact => {
            let blocks = compact_element_blocks(d, method, kappa);
            terms.push((1.0, gather(d.space.num_dofs(), blocks)));
            if method.uses_edge_lift_penalty() {
                terms.push((1.0, assemble_lifting_penalties(d, kappa, eta).re));
            }
        }
    }
    if method.uses_jump_penalty() {
        terms.push((1.0, assemble_jump_penalty(d, eta)));
    }
    let refs: Vec<(f64, &CsrMatrix)> = terms.iter().map(|(c, m)| (*c, m)).collect();
    CsrMatrix::linear_combination(&refs)
}

/// Stiffness matrix restricted to the free (non-clamped) dofs, in node order.
pub fn assemble(d: &Discretization, id: MethodId, inputs: AssemblyInputs) -> Result<CsrMatrix> {
    let full = assemble_full(d, id, inputs)?;
    Ok(reduce(d, &full))
}

pub fn reduce(d: &Discretization, full: &CsrMatrix) -> CsrMatrix {
    full.submatrix(&d.space.free_dofs, &d.space.free_dofs)
}

/// `(f, φ_i)` over all dofs.
pub fn assemble_load_full(d: &Discretization, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
    let rule = default_triangle_rule();
    let locals: Vec<[f64; 6]> = (0..d.space.num_elements())
        .into_par_iter()
        .map(|t| {
            let g = &d.space.geometry[t];
            let mut loc = [0.0; 6];
            for (l, w) in rule.barycentric().zip(&rule.weights) {
                let fx = f(g.map(&l)) * w * 2.0 * g.area;
                let phi = basis::values(&l);
                for i in 0..6 {
                    loc[i] += fx * phi[i];
                }
            }
            loc
        })
        .collect();
    let mut out = vec![0.0; d.space.num_dofs()];
    for (t, loc) in locals.iter().enumerate() {
        for (i, dof) in d.space.element_dofs[t].iter().enumerate() {
            out[*dof] += loc[i];
        }
    }
    out
}

/// Load vector on the free dofs.
pub fn assemble_load(d: &Discretization, f: impl Fn(Point) -> f64 + Sync) -> Vec<f64> {
    d.space.restrict(&assemble_load_full(d, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::LinearOperator;

    fn disc(n: usize) -> Discretization {
        Discretization::new(n).unwrap()
    }

    #[test]
    fn method_indices_round_trip() {
        for j in 1..=5 {
            assert_eq!(Method::from_index(j).unwrap().index(), j);
        }
        assert!(Method::from_index(0).is_err());
        assert!(Method::from_index(6).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(AssemblyInputs::new(0.0, 1.0).is_err());
        assert!(AssemblyInputs::new(0.5, 1.0).is_err());
        assert!(AssemblyInputs::new(0.3, 0.0).is_err());
        assert!(AssemblyInputs::new(0.3, -1.0).is_err());
        let d = disc(2);
        let id = MethodId::new(Method::InteriorPenalty, Formulation::Primal);
        assert!(assemble(
            &d,
            id,
            AssemblyInputs {
                kappa: 0.6,
                eta: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn volume_matrix_kernel_and_quadratic_value() {
        let d = disc(4);
        let a = assemble_volume(&d, 0.3);
        assert!(a.asymmetry() < 1e-12);
        for affine in [
            |p: Point| 1.0 + 0.0 * p[0],
            |p: Point| p[0],
            |p: Point| 2.0 * p[1] - p[0],
        ] {
            let v = d.space.interpolate(affine);
            assert!(a.mul_vec(&v).iter().all(|x| x.abs() < 1e-10));
        }
        let u = d.space.interpolate(|p| (1.0 - p[1]).powi(2));
        assert!((a.bilinear(&u, &u) - 16.0).abs() < 1e-10);
    }

    #[test]
    fn volume_matches_alternative_integrand() {
        let d = disc(3);
        let kappa = 0.27;
        let a = assemble_volume(&d, kappa);
        // ∫ Δu Δv + (1-κ)(2 u12 v12 - u11 v22 - u22 v11)
        let mut trips = Vec::new();
        for t in 0..d.space.num_elements() {
            let g = &d.space.geometry[t];
            let h = g.hessians();
            for i in 0..6 {
                for j in 0..6 {
                    let (u, v) = (h[j], h[i]);
                    let val = u.trace() * v.trace()
                        + (1.0 - kappa) * (2.0 * u.xy * v.xy - u.xx * v.yy - u.yy * v.xx);
                    trips.push((
                        d.space.element_dofs[t][i],
                        d.space.element_dofs[t][j],
                        g.area * val,
                    ));
                }
            }
        }
        let b = CsrMatrix::from_triplets(d.space.num_dofs(), d.space.num_dofs(), trips).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12 * a.max_abs());
    }

    #[test]
    fn cross_term_equals_minus_consistency_transpose() {
        let d = disc(4);
        let c = assemble_consistency(&d, 0.3);
        let lp = assemble_lifting_penalties(&d, 0.3, 10.0);
        let diff = lp.cross.max_abs_diff(&c.transpose().scaled(-1.0)).unwrap();
        assert!(diff < 1e-11 * c.max_abs(), "diff {diff}");
        assert!(lp.r0.asymmetry() < 1e-12 * lp.r0.max_abs());
        assert!(lp.re.asymmetry() < 1e-12 * lp.re.max_abs());
    }

    #[test]
    fn primal_and_compact_agree() {
        let d = disc(4);
        for method in Method::ALL {
            for eta in [1.0, 100.0] {
                let inputs = AssemblyInputs::new(0.3, eta).unwrap();
                let p = assemble(&d, MethodId::new(method, Formulation::Primal), inputs).unwrap();
                let c = assemble(&d, MethodId::new(method, Formulation::Compact), inputs).unwrap();
                let rel = p.max_abs_diff(&c).unwrap() / p.max_abs();
                assert!(rel < 1e-10, "{method} eta {eta}: {rel}");
            }
        }
    }

    #[test]
    fn symmetry_pattern() {
        let d = disc(4);
        let inputs = AssemblyInputs::new(0.3, 10.0).unwrap();
        for method in Method::ALL {
            let a = assemble(&d, MethodId::new(method, Formulation::Primal), inputs).unwrap();
            let asym = a.asymmetry() / a.max_abs();
            if method.is_symmetric() {
                assert!(asym < 1e-13, "{method}: {asym}");
            } else {
                assert!(asym > 1e-3, "{method}: {asym}");
            }
        }
    }

    #[test]
    fn smooth_first_argument_gives_identical_products() {
        let d = disc(4);
        let inputs = AssemblyInputs::new(0.3, 10.0).unwrap();
        let p = d.space.interpolate(|x| (1.0 - x[1]).powi(2));
        let products: Vec<Vec<f64>> = Method::ALL
            .iter()
            .map(|m| {
                // row i of A·p is B(p, φ_i)
                let a = assemble_full(&d, MethodId::new(*m, Formulation::Primal), inputs).unwrap();
                let mut y = vec![0.0; p.len()];
                a.apply(&p, &mut y);
                d.space.restrict(&y)
            })
            .collect();
        for other in &products[1..] {
            for (a, b) in products[0].iter().zip(other) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn consistency_kills_smooth_column() {
        let d = disc(4);
        let c = assemble_consistency(&d, 0.3);
        let u = d.space.interpolate(|x| (1.0 - x[1]).powi(2));
        assert!(c.mul_vec(&u).iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn load_vector_integrals() {
        let d = disc(4);
        let ones = assemble_load_full(&d, |_| 1.0);
        assert!((ones.iter().sum::<f64>() - 4.0).abs() < 1e-12);
        assert!(assemble_load_full(&d, |_| 0.0).iter().all(|x| *x == 0.0));
        let f = assemble_load_full(&d, |p| Load::PaperExample.eval(p));
        assert!((f.iter().sum::<f64>() - 102.4).abs() < 1e-10);
    }

    #[test]
    fn load_selector_parsing() {
        assert_eq!("paper-example".parse::<Load>().unwrap(), Load::PaperExample);
        assert_eq!("constant:2.5".parse::<Load>().unwrap(), Load::Constant(2.5));
        assert!("constant:x".parse::<Load>().is_err());
        assert!("other".parse::<Load>().is_err());
    }
}
