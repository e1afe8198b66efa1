//! Problem data and boundary fields for the domain solvers.

use super::mesh::DomainMesh;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors of the domain solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FemError {
    #[error("invalid problem data: {0}")]
    InvalidData(String),
    #[error("friction threshold must be nonnegative: {0}")]
    InvalidThreshold(String),
    #[error("traction field must lie in the nonpositive cone: {0}")]
    InvalidCone(String),
    #[error("friction–anisotropy condition violated (margin {margin}); f·|alpha| must stay below 1")]
    FrictionConditionViolated { margin: f64 },
    #[error("inner minimization did not converge (residual {residual})")]
    InnerNotConverged { residual: f64 },
    #[error("fixed-point iteration did not converge after {} iterations", residual_history.len())]
    NotConverged { residual_history: Vec<f64> },
    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<FemError>,
    },
}

/// A vector quantity sampled per node, or constant over the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeField2 {
    Constant([f64; 2]),
    PerNode(Vec<[f64; 2]>),
}

impl NodeField2 {
    pub fn at(&self, node: usize) -> [f64; 2] {
        match self {
            NodeField2::Constant(v) => *v,
            NodeField2::PerNode(vals) => vals[node],
        }
    }
}

/// What a scalar boundary field on the contact chain represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldFlavor {
    /// Force per unit boundary length.
    TractionDensity,
    /// Displacement trace.
    Displacement,
}

/// A scalar field sampled at the contact nodes, in chain order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryField {
    pub values: Vec<f64>,
    pub flavor: FieldFlavor,
}

impl BoundaryField {
    pub fn traction(values: Vec<f64>) -> Self {
        Self {
            values,
            flavor: FieldFlavor::TractionDensity,
        }
    }

    pub fn displacement(values: Vec<f64>) -> Self {
        Self {
            values,
            flavor: FieldFlavor::Displacement,
        }
    }

    /// Checks that every value is finite and `≤ tol` (nonpositive cone).
    pub fn check_nonpositive(&self, tol: f64) -> Result<(), FemError> {
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v > tol {
                return Err(FemError::InvalidCone(format!("entry {i} is {v}")));
            }
        }
        Ok(())
    }

    /// Checks that every value is finite and `≥ −tol`.
    pub fn check_nonnegative(&self, tol: f64) -> Result<(), FemError> {
        for (i, &v) in self.values.iter().enumerate() {
            if !v.is_finite() || v < -tol {
                return Err(FemError::InvalidThreshold(format!("entry {i} is {v}")));
            }
        }
        Ok(())
    }
}

/// Surface traction on one boundary edge, linearly interpolated between
/// the values at its two endpoints (in the listed node order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLoad {
    pub nodes: [usize; 2],
    pub traction: [[f64; 2]; 2],
}

/// Data of one incremental contact step.
///
/// `gap`, `friction` and `w_t` are sampled at the contact nodes in chain
/// order. `w_t` is the tangential displacement trace of the previous step;
/// slip in this step is measured relative to it. Surface loads apply on
/// the `T` part of the boundary: `surface_load` lists nodal values shared
/// by the incident edges, `edge_load` adds per-edge values (so a corner
/// can carry a different traction on each incident edge). Both are
/// interpolated linearly and summed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactData {
    pub body_force: NodeField2,
    pub surface_load: std::collections::BTreeMap<usize, [f64; 2]>,
    pub edge_load: Vec<EdgeLoad>,
    pub gap: Vec<f64>,
    pub friction: Vec<f64>,
    pub w_t: Vec<f64>,
}

impl ContactData {
    /// Homogeneous data (no loads, zero gap, zero friction) for a mesh.
    pub fn zero(mesh: &DomainMesh) -> Self {
        let m = mesh.n_contact();
        Self {
            body_force: NodeField2::Constant([0.0, 0.0]),
            surface_load: std::collections::BTreeMap::new(),
            edge_load: Vec::new(),
            gap: vec![0.0; m],
            friction: vec![0.0; m],
            w_t: vec![0.0; m],
        }
    }

    /// Validates the data against a mesh: array lengths match the contact
    /// chain, friction coefficients are nonnegative, everything is finite.
    pub fn validate(&self, mesh: &DomainMesh) -> Result<(), FemError> {
        let m = mesh.n_contact();
        for (name, field) in [("gap", &self.gap), ("friction", &self.friction), ("w_t", &self.w_t)]
        {
            if field.len() != m {
                return Err(FemError::InvalidData(format!(
                    "{name} has {} entries but the contact chain has {m} nodes",
                    field.len()
                )));
            }
            if let Some(v) = field.iter().find(|v| !v.is_finite()) {
                return Err(FemError::InvalidData(format!("{name} contains {v}")));
            }
        }
        if let Some(f) = self.friction.iter().find(|&&f| f < 0.0) {
            return Err(FemError::InvalidData(format!(
                "friction coefficient {f} is negative"
            )));
        }
        if let NodeField2::PerNode(vals) = &self.body_force {
            if vals.len() != mesh.n_nodes() {
                return Err(FemError::InvalidData(format!(
                    "body force has {} entries but the mesh has {} nodes",
                    vals.len(),
                    mesh.n_nodes()
                )));
            }
        }
        for (&node, v) in &self.surface_load {
            if node >= mesh.n_nodes() {
                return Err(FemError::InvalidData(format!(
                    "surface load references node {node} outside the mesh"
                )));
            }
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(FemError::InvalidData(format!(
                    "surface load at node {node} is not finite"
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.edge_load {
            let key = (e.nodes[0].min(e.nodes[1]), e.nodes[0].max(e.nodes[1]));
            if !seen.insert(key) {
                return Err(FemError::InvalidData(format!(
                    "edge load listed twice for edge ({}, {})",
                    e.nodes[0], e.nodes[1]
                )));
            }
            let tagged_t = mesh.boundary_edges().iter().any(|be| {
                be.tag == super::mesh::BoundaryTag::T
                    && (be.nodes == e.nodes || be.nodes == [e.nodes[1], e.nodes[0]])
            });
            if !tagged_t {
                return Err(FemError::InvalidData(format!(
                    "edge load on ({}, {}) does not match a T-tagged boundary edge",
                    e.nodes[0], e.nodes[1]
                )));
            }
            if e.traction.iter().flatten().any(|v| !v.is_finite()) {
                return Err(FemError::InvalidData(format!(
                    "edge load on ({}, {}) is not finite",
                    e.nodes[0], e.nodes[1]
                )));
            }
        }
        Ok(())
    }
}
