//! Two-dimensional unilateral contact with Coulomb friction.
//!
//! This crate solves the incremental quasistatic contact problem for a
//! linearly elastic body pressed against a rigid obstacle, in plane strain,
//! with a Coulomb friction law on the contact boundary. It provides four
//! layers, each usable on its own:
//!
//! * [`elasticity`] — the plane-strain stiffness matrix in the scaled
//!   (Mandel) 3×3 convention, with rotation and ellipticity helpers.
//! * [`halfspace`] — the Neumann-to-Dirichlet surface constants `C1…C4` of
//!   an anisotropic elastic half-space, computed by quadrature of the
//!   characteristic-polynomial moment integrals, plus surface-response
//!   evaluation and the isotropic fundamental solution.
//! * [`vi`] — finite-dimensional cone variational-inequality kernels:
//!   projected SOR and Lemke pivoting for linear complementarity problems,
//!   with a merit residual and structure probes.
//! * [`bem`] — a boundary-element discretization of steady frictional
//!   sliding on the half-space, built from exact elementwise integrals of
//!   the logarithmic and sign kernels.
//! * [`fem`] — a P1 finite-element solver for the incremental contact
//!   problem on a meshed domain: Tresca inner solves, a fixed-point outer
//!   loop on the normal traction, oblique-cone variants for anisotropic
//!   boundaries, and a quasistatic driver.
//!
//! Conventions used throughout: the contact boundary carries a local
//! `(tangent, outward normal)` frame with the body on the negative-normal
//! side; tractions are forces exerted *on* the body per unit length, so a
//! compressive normal traction is negative.

pub mod bem;
pub mod elasticity;
pub mod fem;
pub mod halfspace;
pub mod vi;

pub use elasticity::{ellipticity_constant, isotropic_modulus, rotate_modulus, ElasticModulus};
pub use fem::{
    evolve_quasistatic, solve_contact_step, BoundaryField, ContactData, DomainMesh, ModulusField,
    StepMode, StepOptions,
};
pub use halfspace::{boundary_alpha, n2d_constants, HalfSpaceConstants};
