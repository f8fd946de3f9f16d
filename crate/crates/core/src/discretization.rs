use crate::error::Result;
use crate::fe_space::{FeSpaceP2, SigmaSpaceP1};
use crate::lifting::{ElementLifting, Lifting};
use crate::mesh::Mesh;

/// Mesh, P2 space and precomputed lifting maps for one refinement level.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub space: FeSpaceP2,
    pub sigma: SigmaSpaceP1,
    pub lifting: Lifting,
    pub element_lifts: Vec<ElementLifting>,
}

impl Discretization {
    pub fn new(cells_per_side: usize) -> Result<Self> {
        let mesh = Mesh::uniform(cells_per_side)?;
        let space = FeSpaceP2::new(&mesh);
        let sigma = SigmaSpaceP1::new(&mesh);
        let lifting = Lifting::new(&mesh, &space)?;
        let element_lifts = lifting.element_liftings(&mesh);
        Ok(Discretization {
            mesh,
            space,
            sigma,
            lifting,
            element_lifts,
        })
    }

    pub fn cells_per_side(&self) -> usize {
        self.mesh.cells_per_side
    }

    pub fn h(&self) -> f64 {
        self.mesh.h
    }
}
