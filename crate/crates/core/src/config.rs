//! JSON run configuration shared by every CLI command.
//!
//! Every field has a default, so `{}` describes the plate experiment on
//! `(-1, 1)²` with κ = 0.3, g = 1 and the polynomial example load.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{ProblemSpec, StudyConfig};
use crate::error::{Error, Result};
use crate::forms::{Formulation, Load, Method};
use crate::solver::SolverConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kappa: f64,
    pub g: f64,
    /// Method index `j` for `export` and `solve`.
    pub method: usize,
    /// Method indices covered by `study`.
    pub methods: Vec<usize>,
    pub formulation: Formulation,
    /// Penalty values covered by `study`.
    pub eta: Vec<f64>,
    /// Penalty for `export` and `solve`.
    pub run_eta: f64,
    /// Cells per side for `mesh-info`, `export` and `solve`.
    pub n: usize,
    /// Cells per side of the study levels, ascending.
    pub levels: Vec<usize>,
    /// Cells per side of the reference level.
    pub reference: usize,
    pub solver: SolverConfig,
    pub load: Load,
    pub out: PathBuf,
    /// Cells per side checked by `verify`.
    pub verify_levels: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kappa: 0.3,
            g: 1.0,
            method: 1,
            methods: (1..=5).collect(),
            formulation: Formulation::Primal,
            eta: vec![1.0, 10.0, 100.0],
            run_eta: 100.0,
            n: 4,
            levels: vec![4, 8, 16, 32],
            reference: 64,
            solver: SolverConfig::default(),
            load: Load::PaperExample,
            out: PathBuf::from("out"),
            verify_levels: vec![4, 8],
        }
    }
}

fn method_of(j: usize) -> Result<Method> {
    Method::from_index(j).map_err(|_| Error::Config(format!("method index {j} is not in 1..=5")))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.kappa > 0.0 && self.kappa < 0.5) {
            return bad(format!("kappa = {} is not in (0, 0.5)", self.kappa));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return bad(format!("g = {} must be finite and >= 0", self.g));
        }
        method_of(self.method)?;
        if self.methods.is_empty() {
            return bad("methods must not be empty".into());
        }
        for &j in &self.methods {
            method_of(j)?;
        }
        if self.eta.is_empty() {
            return bad("eta must not be empty".into());
        }
        for &e in self.eta.iter().chain([&self.run_eta]) {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("penalty {e} must be positive"));
            }
        }
        if self.n == 0 {
            return Err(Error::InvalidResolution(0));
        }
        if self.verify_levels.is_empty() || self.verify_levels.contains(&0) {
            return bad("verify_levels must be non-empty and positive".into());
        }
        if !(self.solver.pdfp.tol > 0.0) || self.solver.pdfp.max_iter == 0 {
            return bad("solver tol and max_iter must be positive".into());
        }
        self.study().validate()
    }

    pub fn method(&self) -> Result<Method> {
        method_of(self.method)
    }

    pub fn problem(&self) -> ProblemSpec {
        ProblemSpec {
            kappa: self.kappa,
            g: self.g,
            formulation: self.formulation,
            load: self.load,
            solver: self.solver,
        }
    }

    pub fn study(&self) -> StudyConfig {
        StudyConfig {
            problem: self.problem(),
            methods: self
                .methods
                .iter()
                .filter_map(|&j| Method::from_index(j).ok())
                .collect(),
            etas: self.eta.clone(),
            levels: self.levels.clone(),
            reference: self.reference,
        }
    }
}
