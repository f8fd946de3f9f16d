//! Command implementations behind the `plate-cdg` binary.
//!
//! Each command reads a validated [`RunConfig`] and writes its files into an
//! output directory. File contents depend only on the configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::{convergence_study, StudyTable};
use crate::config::RunConfig;
use crate::contact::FrictionOperator;
use crate::discretization::Discretization;
use crate::error::{Error, Result};
use crate::forms::{assemble, assemble_load, AssemblyInputs, Formulation, Load, MethodId};
use crate::mesh::{Mesh, MeshSummary};
use crate::solver::{solve, SolveReport};
use crate::sparse::matrix_market::{write_array, write_coordinate};
use crate::sparse::CsrMatrix;
use crate::verify::{self, VerifyReport};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn cmd_mesh_info(cfg: &RunConfig) -> Result<MeshSummary> {
    Ok(Mesh::uniform(cfg.n)?.summary())
}

/// Reduced system `(A, B, f)` of the configured single run.
pub fn system(cfg: &RunConfig) -> Result<(Discretization, CsrMatrix, CsrMatrix, Vec<f64>)> {
    let d = Discretization::new(cfg.n)?;
    let a = assemble(
        &d,
        MethodId::new(cfg.method()?, cfg.formulation),
        AssemblyInputs::new(cfg.kappa, cfg.run_eta)?,
    )?;
    let load = cfg.load;
    let f = assemble_load(&d, move |p| load.eval(p));
    let b = FrictionOperator::constant(&d, cfg.g)?.b;
    Ok((d, a, b, f))
}

/// Writes `A.mtx`, `B.mtx` and `f.mtx`.
pub fn cmd_export(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(out)?;
    let (_, a, b, f) = system(cfg)?;
    let paths: Vec<PathBuf> = ["A.mtx", "B.mtx", "f.mtx"]
        .iter()
        .map(|n| out.join(n))
        .collect();
    write_coordinate(&paths[0], &a)?;
    write_coordinate(&paths[1], &b)?;
    write_array(&paths[2], &f)?;
    Ok(paths)
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub method: usize,
    pub method_name: &'static str,
    pub formulation: Formulation,
    pub eta: f64,
    pub n: usize,
    pub kappa: f64,
    pub g: f64,
    pub load: Load,
    /// Set when the solver returned an error instead of an iterate.
    pub error: Option<String>,
    pub report: Option<SolveReport>,
}

impl SolveSummary {
    pub fn ok(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.converged)
    }
}

/// Writes `solution.csv` (`x,y,u` over every node, clamped ones included)
/// and `report.json`. A solver failure is recorded in the report.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<SolveSummary> {
    ensure_dir(out)?;
    let (d, a, b, f) = system(cfg)?;
    let method = cfg.method()?;
    let result = solve(&a, &b, &f, &cfg.solver);
    let u = match &result {
        Ok(r) => d.space.extend(&r.u),
        Err(_) => vec![f64::NAN; d.space.num_dofs()],
    };
    let mut csv = String::from("x,y,u\n");
    for (p, v) in d.space.nodes.iter().zip(&u) {
        let _ = writeln!(csv, "{:e},{:e},{:e}", p[0], p[1], v);
    }
    write(&out.join("solution.csv"), &csv)?;
    let (error, report) = match result {
        Ok(r) => (None, Some(r)),
        Err(e) => (Some(e.to_string()), None),
    };
    let summary = SolveSummary {
        method: method.index(),
        method_name: method.name(),
        formulation: cfg.formulation,
        eta: cfg.run_eta,
        n: cfg.n,
        kappa: cfg.kappa,
        g: cfg.g,
        load: cfg.load,
        error,
        report,
    };
    write(
        &out.join("report.json"),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    Ok(summary)
}

/// Writes `study.csv`, `study.md` and `study.json`.
pub fn cmd_study(cfg: &RunConfig, out: &Path) -> Result<StudyTable> {
    ensure_dir(out)?;
    let table = convergence_study(&cfg.study())?;
    write(&out.join("study.csv"), &table.to_csv())?;
    write(&out.join("study.md"), &table.to_markdown())?;
    write(
        &out.join("study.json"),
        &(serde_json::to_string_pretty(&table)? + "\n"),
    )?;
    Ok(table)
}

/// Writes `verify.json`; the caller decides the exit status.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<VerifyReport> {
    ensure_dir(out)?;
    let report = verify::run(cfg)?;
    write(
        &out.join("verify.json"),
        &(serde_json::to_string_pretty(&report)? + "\n"),
    )?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_info_examples() {
        let cfg = RunConfig {
            n: 2,
            ..RunConfig::default()
        };
        let s = cmd_mesh_info(&cfg).unwrap();
        assert_eq!((s.vertices, s.triangles, s.edges), (9, 8, 16));
        let s = cmd_mesh_info(&RunConfig::default()).unwrap();
        assert_eq!(s.h, 0.5);
        let bad = RunConfig {
            n: 0,
            ..RunConfig::default()
        };
        assert!(cmd_mesh_info(&bad).is_err());
    }

    #[test]
    fn system_dimensions() {
        let n = 4;
        let cfg = RunConfig {
            n,
            ..RunConfig::default()
        };
        let (d, a, b, f) = system(&cfg).unwrap();
        let nodes = (2 * n + 1) * (2 * n + 1);
        assert_eq!(d.space.num_dofs(), nodes);
        let free = nodes - (2 * n + 1);
        assert_eq!(a.shape(), (free, free));
        assert_eq!(b.shape(), (2 * n + 1, free));
        assert_eq!(f.len(), free);
    }
}
