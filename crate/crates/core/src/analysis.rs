//! Mesh-dependent norms, prolongation between nested levels and convergence
//! studies against a fine-level reference solution.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::contact::FrictionOperator;
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::fe_space::default_triangle_rule;
use crate::forms::{assemble, assemble_load, AssemblyInputs, Formulation, Load, Method, MethodId};
use crate::lifting::{edge_ratio_bounds, gradient_jump};
use crate::solver::{solve, SolverConfig};

/// Pieces of the energy norm `⦀v⦀² = |v|²_{2,h} + Σ_e h_e⁻¹‖⟦∇v⟧‖²_e + Σ_K h_K²|v|²_{3,K}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EnergyParts {
    pub hessian: f64,
    pub jump: f64,
    /// Identically zero for piecewise quadratics.
    pub third: f64,
}

impl EnergyParts {
    pub fn norm(&self) -> f64 {
        (self.hessian + self.jump + self.third).sqrt()
    }
}

/// Squared contributions of the energy norm of a full dof vector; jumps run
/// over the penalized edges of `d`.
pub fn energy_parts(d: &Discretization, v: &[f64]) -> EnergyParts {
    energy_parts_weighted(d, v, |e| 1.0 / d.mesh.edges[e].length)
}

/// As [`energy_parts`], with `weight(e)` multiplying `‖⟦∇v⟧‖²_e` in place of
/// `h_e⁻¹`.
pub fn energy_parts_weighted(
    d: &Discretization,
    v: &[f64],
    weight: impl Fn(usize) -> f64,
) -> EnergyParts {
    let mut parts = EnergyParts::default();
    for t in 0..d.space.num_elements() {
        let g = &d.space.geometry[t];
        let h = d.space.element_hessian(t, v);
        parts.hessian += g.area * h.ddot(&h);
        let local = d.space.local_values(t, v);
        let third = g.third_derivatives();
        let mut c = [0.0; 4];
        for (i, ti) in third.iter().enumerate() {
            for k in 0..4 {
                c[k] += local[i] * ti[k];
            }
        }
        // xxx, xxy, xyy, yyy with multiplicities 1, 3, 3, 1
        let sq = c[0] * c[0] + 3.0 * c[1] * c[1] + 3.0 * c[2] * c[2] + c[3] * c[3];
        parts.third += d.mesh.diameter(t).powi(2) * g.area * sq;
    }
    for (e, edge) in d.mesh.penalized_edges() {
        let w = weight(e);
        if w != 0.0 {
            let jump = gradient_jump(&d.mesh, &d.space, v, e).expect("penalized edge");
            parts.jump += w * jump.norm_sq(edge.length);
        }
    }
    parts
}

pub fn energy_norm(d: &Discretization, v: &[f64]) -> f64 {
    energy_parts(d, v).norm()
}

pub fn h1_seminorm(d: &Discretization, v: &[f64]) -> f64 {
    let rule = default_triangle_rule();
    let mut s = 0.0;
    for t in 0..d.space.num_elements() {
        let g = &d.space.geometry[t];
        for (l, w) in rule.barycentric().zip(&rule.weights) {
            let grad = d.space.eval_gradient(t, v, &l);
            s += 2.0 * g.area * w * (grad[0] * grad[0] + grad[1] * grad[1]);
        }
    }
    s.sqrt()
}

pub fn l2_norm(d: &Discretization, v: &[f64]) -> f64 {
    let rule = default_triangle_rule();
    let mut s = 0.0;
    for t in 0..d.space.num_elements() {
        let g = &d.space.geometry[t];
        for (l, w) in rule.barycentric().zip(&rule.weights) {
            s += 2.0 * g.area * w * d.space.eval(t, v, &l).powi(2);
        }
    }
    s.sqrt()
}

/// Re-represents a coarse P2 field on a nested finer level by nodal
/// evaluation.
pub fn prolong(coarse: &Discretization, v: &[f64], fine: &Discretization) -> Result<Vec<f64>> {
    let (nc, nf) = (coarse.cells_per_side(), fine.cells_per_side());
    if nf < nc || nf % nc != 0 {
        return Err(Error::NonNested {
            coarse: nc,
            fine: nf,
        });
    }
    Ok(fine
        .space
        .nodes
        .iter()
        .map(|&p| {
            let t = coarse.mesh.locate(p);
            let l = coarse.space.geometry[t].barycentric(p);
            coarse.space.eval(t, v, &l)
        })
        .collect())
}

/// Jump weights on `fine` that reproduce the coarse-level penalized edge set:
/// `1/h_e` of the containing coarse edge for fine edges lying on a coarse
/// penalized edge, zero elsewhere.
pub fn coarse_jump_weights(coarse: &Discretization, fine: &Discretization) -> Result<Vec<f64>> {
    let (nc, nf) = (coarse.cells_per_side(), fine.cells_per_side());
    if nf < nc || nf % nc != 0 {
        return Err(Error::NonNested {
            coarse: nc,
            fine: nf,
        });
    }
    Ok(fine
        .mesh
        .edges
        .iter()
        .map(|edge| {
            let a = fine.mesh.vertices[edge.vertices[0]];
            let b = fine.mesh.vertices[edge.vertices[1]];
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let t = coarse.mesh.locate(mid);
            let g = &coarse.space.geometry[t];
            let (la, lb) = (g.barycentric(a), g.barycentric(b));
            // the coarse edge opposite local vertex k has λ_k = 0
            (0..3)
                .find(|&k| la[k].abs() < 1e-9 && lb[k].abs() < 1e-9)
                .map(|k| {
                    let ce = coarse.mesh.triangles[t].edges[(k + 1) % 3];
                    let cedge = &coarse.mesh.edges[ce];
                    if cedge.is_penalized() {
                        1.0 / cedge.length
                    } else {
                        0.0
                    }
                })
                .unwrap_or(0.0)
        })
        .collect())
}

/// Extreme values of `‖r_e(⟦∇v⟧)‖² / (h_e⁻¹‖⟦∇v⟧‖²_e)` over penalized edges.
pub fn lift_ratio_bounds(d: &Discretization) -> Result<(f64, f64)> {
    let bounds: Vec<(f64, f64)> = d
        .mesh
        .penalized_edges()
        .map(|(e, _)| e)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&e| edge_ratio_bounds(&d.mesh, &d.space, e))
        .collect::<Result<_>>()?;
    Ok(bounds
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), (a, b)| {
            (lo.min(*a), hi.max(*b))
        }))
}

/// Problem data shared by every solve of a study.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub kappa: f64,
    pub g: f64,
    pub formulation: Formulation,
    pub load: Load,
    pub solver: SolverConfig,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            kappa: 0.3,
            g: 1.0,
            formulation: Formulation::Primal,
            load: Load::PaperExample,
            solver: SolverConfig::default(),
        }
    }
}

/// Discrete solution on one level, as a full dof vector.
#[derive(Clone, Debug)]
pub struct LevelSolution {
    pub u: Vec<f64>,
    pub report: crate::solver::SolveReport,
}

pub fn solve_level(
    d: &Discretization,
    method: Method,
    eta: f64,
    spec: &ProblemSpec,
) -> Result<LevelSolution> {
    let a = assemble(
        d,
        MethodId::new(method, spec.formulation),
        AssemblyInputs::new(spec.kappa, eta)?,
    )?;
    let load = spec.load;
    let f = assemble_load(d, move |p| load.eval(p));
    let op = FrictionOperator::constant(d, spec.g)?;
    let report = solve(&a, &op.b, &f, &spec.solver)?;
    Ok(LevelSolution {
        u: d.space.extend(&report.u),
        report,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyRecord {
    pub j: usize,
    pub eta: f64,
    pub n: usize,
    pub h: f64,
    pub energy_error: f64,
    pub h1_error: f64,
    pub order_energy: Option<f64>,
    pub order_h1: Option<f64>,
    pub solver_iters: usize,
    pub converged: bool,
    pub kkt_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyTable {
    pub reference_n: usize,
    /// Mesh whose penalized edges carry the jump part of the error norm.
    pub jump_mesh: &'static str,
    pub records: Vec<StudyRecord>,
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub problem: ProblemSpec,
    pub methods: Vec<Method>,
    pub etas: Vec<f64>,
    pub levels: Vec<usize>,
    pub reference: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            problem: ProblemSpec::default(),
            methods: Method::ALL.to_vec(),
            etas: vec![1.0, 10.0, 100.0],
            levels: vec![4, 8, 16, 32],
            reference: 64,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() || self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "levels must be non-empty and strictly ascending".into(),
            ));
        }
        let finest = *self.levels.last().unwrap();
        if self.reference <= finest {
            return Err(Error::Config(format!(
                "reference n={} must be finer than n={finest}",
                self.reference
            )));
        }
        if let Some(&n) = self
            .levels
            .iter()
            .find(|&&n| !self.reference.is_multiple_of(n))
        {
            return Err(Error::NonNested {
                coarse: n,
                fine: self.reference,
            });
        }
        Ok(())
    }
}

fn order(e0: f64, e1: f64, h0: f64, h1: f64) -> Option<f64> {
    let o = (e0 / e1).ln() / (h0 / h1).ln();
    o.is_finite().then_some(o)
}

/// Errors of every `(method, η, level)` against the reference-level solution
/// of the same method and η. A failing solve yields NaN errors for its cell.
pub fn convergence_study(cfg: &StudyConfig) -> Result<StudyTable> {
    cfg.validate()?;
    let reference = Discretization::new(cfg.reference)?;
    let levels: Vec<Discretization> = cfg
        .levels
        .iter()
        .map(|&n| Discretization::new(n))
        .collect::<Result<_>>()?;
    let cells: Vec<(Method, f64)> = cfg
        .methods
        .iter()
        .flat_map(|&m| cfg.etas.iter().map(move |&e| (m, e)))
        .collect();
    let per_cell: Vec<Vec<StudyRecord>> = cells
        .par_iter()
        .map(|&(method, eta)| {
            let reference_u = solve_level(&reference, method, eta, &cfg.problem).ok();
            let mut rows: Vec<StudyRecord> = levels
                .par_iter()
                .map(|d| {
                    let sol = solve_level(d, method, eta, &cfg.problem);
                    let (energy, h1, iters, conv, kkt) = match (&sol, &reference_u) {
                        (Ok(s), Some(r)) => {
                            let fine = prolong(d, &s.u, &reference).expect("validated nesting");
                            let diff: Vec<f64> =
                                r.u.iter().zip(&fine).map(|(a, b)| a - b).collect();
                            (
                                energy_norm(&reference, &diff),
                                h1_seminorm(&reference, &diff),
                                s.report.iterations,
                                s.report.converged && r.report.converged,
                                s.report.kkt_residual,
                            )
                        }
                        (Ok(s), None) => (
                            f64::NAN,
                            f64::NAN,
                            s.report.iterations,
                            false,
                            s.report.kkt_residual,
                        ),
                        (Err(_), _) => (f64::NAN, f64::NAN, 0, false, f64::NAN),
                    };
                    StudyRecord {
                        j: method.index(),
                        eta,
                        n: d.cells_per_side(),
                        h: d.h(),
                        energy_error: energy,
                        h1_error: h1,
                        order_energy: None,
                        order_h1: None,
                        solver_iters: iters,
                        converged: conv,
                        kkt_residual: kkt,
                    }
                })
                .collect();
            for k in 1..rows.len() {
                let (p, c) = (&rows[k - 1], &rows[k]);
                let oe = order(p.energy_error, c.energy_error, p.h, c.h);
                let oh = order(p.h1_error, c.h1_error, p.h, c.h);
                rows[k].order_energy = oe;
                rows[k].order_h1 = oh;
            }
            rows
        })
        .collect();
    Ok(StudyTable {
        reference_n: cfg.reference,
        jump_mesh: "reference",
        records: per_cell.into_iter().flatten().collect(),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

fn fmt_h(h: f64) -> String {
    let inv = 1.0 / h;
    if (inv - inv.round()).abs() < 1e-9 {
        format!("1/{}", inv.round())
    } else {
        format!("{h}")
    }
}

impl StudyTable {
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("j,eta,h,energy_error,h1_error,order_energy,order_h1,solver_iters\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{:.10e},{:.10e},{},{},{}",
                r.j,
                r.eta,
                r.h,
                r.energy_error,
                r.h1_error,
                fmt_opt(r.order_energy),
                fmt_opt(r.order_h1),
                r.solver_iters
            );
        }
        s
    }

    /// One table per method: rows are mesh sizes, columns the energy and H¹
    /// errors for each η with observed orders in parentheses.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let mut methods: Vec<usize> = self.records.iter().map(|r| r.j).collect();
        methods.dedup();
        for j in methods {
            let rows: Vec<&StudyRecord> = self.records.iter().filter(|r| r.j == j).collect();
            let mut etas: Vec<f64> = Vec::new();
            let mut hs: Vec<f64> = Vec::new();
            for r in &rows {
                if !etas.contains(&r.eta) {
                    etas.push(r.eta);
                }
                if !hs.contains(&r.h) {
                    hs.push(r.h);
                }
            }
            let name = Method::from_index(j).map(|m| m.name()).unwrap_or("?");
            let _ = writeln!(
                out,
                "### j = {j} ({name}), reference n = {}\n",
                self.reference_n
            );
            let mut header = String::from("| h |");
            let mut rule = String::from("|---|");
            for e in &etas {
                let _ = write!(header, " energy η={e} |");
                rule.push_str("---|");
            }
            for e in &etas {
                let _ = write!(header, " H¹ η={e} |");
                rule.push_str("---|");
            }
            let _ = writeln!(out, "{header}\n{rule}");
            for h in &hs {
                let mut line = format!("| {} |", fmt_h(*h));
                let cell = |e: f64| rows.iter().find(|r| r.h == *h && r.eta == e);
                for e in &etas {
                    let _ = match cell(*e) {
                        Some(r) => {
                            write!(line, " {:.4}{} |", r.energy_error, paren(r.order_energy))
                        }
                        None => write!(line, " |"),
                    };
                }
                for e in &etas {
                    let _ = match cell(*e) {
                        Some(r) => write!(line, " {:.4}{} |", r.h1_error, paren(r.order_h1)),
                        None => write!(line, " |"),
                    };
                }
                let _ = writeln!(out, "{line}");
            }
            out.push('\n');
        }
        out
    }
}

fn paren(o: Option<f64>) -> String {
    o.map_or_else(String::new, |x| format!(" ({x:.2})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{assemble_jump_penalty, assemble_volume};

    #[test]
    fn energy_norm_of_smooth_quadratic() {
        let d = Discretization::new(4).unwrap();
        assert_eq!(energy_norm(&d, &vec![0.0; d.space.num_dofs()]), 0.0);
        let v = d.space.interpolate(|p| (1.0 - p[1]).powi(2));
        let parts = energy_parts(&d, &v);
        assert!(parts.jump < 1e-24);
        assert_eq!(parts.third, 0.0);
        assert!((parts.norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn energy_norm_matches_gram_matrix() {
        let d = Discretization::new(3).unwrap();
        let gram = crate::sparse::CsrMatrix::linear_combination(&[
            (1.0, &assemble_volume(&d, 0.0)),
            (1.0, &assemble_jump_penalty(&d, 1.0)),
        ])
        .unwrap();
        let mut v: Vec<f64> = (0..d.space.num_dofs())
            .map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0)
            .collect();
        d.space.apply_clamp(&mut v);
        let e = energy_norm(&d, &v).powi(2);
        assert!((e - gram.bilinear(&v, &v)).abs() < 1e-10 * e);
    }

    #[test]
    fn energy_gram_is_positive_definite_on_free_dofs() {
        let d = Discretization::new(4).unwrap();
        let gram = crate::sparse::CsrMatrix::linear_combination(&[
            (1.0, &assemble_volume(&d, 0.0)),
            (1.0, &assemble_jump_penalty(&d, 1.0)),
        ])
        .unwrap();
        let red = crate::forms::reduce(&d, &gram).to_dense();
        let ev = red.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        assert!(ev[0] > 1e-8, "{}", ev[0]);
    }

    #[test]
    fn h1_and_l2_examples() {
        let d = Discretization::new(4).unwrap();
        let x = d.space.interpolate(|p| p[0]);
        assert!((h1_seminorm(&d, &x) - 2.0).abs() < 1e-12);
        assert!(h1_seminorm(&d, &d.space.interpolate(|_| 3.0)) < 1e-12);
        // ∫ (2x + y)² + x² = 16/3 + 4/3 + 4/3
        let q = d.space.interpolate(|p| p[0] * p[0] + p[0] * p[1]);
        let exact = (4.0f64 * 4.0 / 3.0 + 4.0 / 3.0 + 4.0 / 3.0).sqrt();
        assert!((h1_seminorm(&d, &q) - exact).abs() < 1e-12);
        let one = d.space.interpolate(|_| 1.0);
        assert!((l2_norm(&d, &one) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn prolongation_is_exact() {
        let c = Discretization::new(2).unwrap();
        let f = Discretization::new(8).unwrap();
        let q = |p: [f64; 2]| 1.0 + p[0] - 2.0 * p[1] * p[0] + 0.5 * p[1] * p[1];
        let fine = prolong(&c, &c.space.interpolate(q), &f).unwrap();
        let direct = f.space.interpolate(q);
        for (a, b) in fine.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-13);
        }
        let mut v: Vec<f64> = (0..c.space.num_dofs())
            .map(|i| (i as f64 * 0.7).cos())
            .collect();
        c.space.apply_clamp(&mut v);
        let pv = prolong(&c, &v, &f).unwrap();
        assert!((h1_seminorm(&c, &v) - h1_seminorm(&f, &pv)).abs() < 1e-11);
        let (ec, ef) = (energy_parts(&c, &v), energy_parts(&f, &pv));
        assert!((ec.hessian - ef.hessian).abs() < 1e-10 * ec.hessian);
        assert!(prolong(&f, &pv, &c).is_err());
        assert!(prolong(&Discretization::new(3).unwrap(), &vec![0.0; 49], &f).is_err());
    }

    #[test]
    fn zero_load_study_has_zero_errors() {
        let cfg = StudyConfig {
            problem: ProblemSpec {
                load: Load::Constant(0.0),
                ..ProblemSpec::default()
            },
            methods: vec![Method::Lcdg],
            etas: vec![10.0],
            levels: vec![2, 4],
            reference: 8,
        };
        let t = convergence_study(&cfg).unwrap();
        assert_eq!(t.records.len(), 2);
        for r in &t.records {
            assert_eq!(r.energy_error, 0.0);
            assert_eq!(r.h1_error, 0.0);
        }
    }

    #[test]
    fn study_config_validation() {
        let mut cfg = StudyConfig {
            levels: vec![4, 2],
            ..StudyConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.levels = vec![4, 8];
        cfg.reference = 8;
        assert!(cfg.validate().is_err());
        cfg.reference = 12;
        assert!(cfg.validate().is_err());
        cfg.reference = 16;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn table_formats() {
        let t = StudyTable {
            reference_n: 16,
            jump_mesh: "reference",
            records: vec![
                StudyRecord {
                    j: 1,
                    eta: 100.0,
                    n: 4,
                    h: 0.5,
                    energy_error: 2.0,
                    h1_error: 0.5,
                    order_energy: None,
                    order_h1: None,
                    solver_iters: 10,
                    converged: true,
                    kkt_residual: 0.0,
                },
                StudyRecord {
                    j: 1,
                    eta: 100.0,
                    n: 8,
                    h: 0.25,
                    energy_error: 1.0,
                    h1_error: 0.25,
                    order_energy: Some(1.0),
                    order_h1: Some(1.0),
                    solver_iters: 12,
                    converged: true,
                    kkt_residual: 0.0,
                },
            ],
        };
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "j,eta,h,energy_error,h1_error,order_energy,order_h1,solver_iters"
        );
        assert_eq!(lines.len(), 3);
        assert!(lines[2].ends_with(",1.0000,1.0000,12"));
        let md = t.to_markdown();
        assert!(
            md.contains("| 1/4 | 1.0000 (1.00) | 0.2500 (1.00) |"),
            "{md}"
        );
    }
}
