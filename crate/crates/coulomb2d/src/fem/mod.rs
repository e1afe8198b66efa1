//! Finite-element solver for incremental contact with Coulomb friction on
//! a bounded plane-strain body.
//!
//! The body is a triangulated polygon clamped on part of its boundary,
//! loaded in the volume and on the free boundary, and in unilateral
//! contact with a rigid obstacle along a tagged boundary chain. One
//! incremental step finds displacements and contact tractions satisfying
//! elastic equilibrium, nonpenetration, and the incremental Coulomb law
//! relative to the previous tangential state.
//!
//! Layers, bottom to top:
//! - [`mesh`]: validated triangulations with tagged boundaries and the
//!   contact-chain geometry (frames, weights, arclength);
//! - [`assembly`]: P1 stiffness and load assembly;
//! - [`system`]: Dirichlet elimination and static condensation onto the
//!   contact boundary;
//! - [`tresca`]: the convex inner problem (given slip threshold) solved by
//!   smoothing, projected Newton and an exact active-set polish;
//! - [`contact`]: the fixed-point iteration on the normal traction, the
//!   solution map and dual norm, KKT diagnostics, and the oblique-
//!   component transformations for anisotropic friction coupling;
//! - [`evolve`]: quasistatic step sequences with history chaining.

pub mod assembly;
pub mod contact;
pub mod data;
pub mod evolve;
pub mod mesh;
pub mod system;
pub mod tresca;

pub use assembly::{assemble_full_stiffness, assemble_load, assemble_stiffness, CsrMatrix, ModulusField};
pub use contact::{
    apply_scr_a, dual_norm, friction_condition_check, friction_law_check, kkt_residuals,
    oblique_components, resolve_alpha, solve_contact_step, solve_tresca, ContactState,
    ContactTraces, FrictionLawReport, FrictionLawState, KktReport, ObliqueDirection, StepMode,
    StepOptions, StepReport, StepSolution, TrescaReport, FIXED_POINT_TOL,
};
pub use data::{BoundaryField, ContactData, EdgeLoad, FemError, FieldFlavor, NodeField2};
pub use evolve::{evolve_quasistatic, EvolveOptions, Trajectory};
pub use mesh::{BoundaryEdge, BoundaryTag, DomainMesh, MeshError};
pub use system::FemContext;
