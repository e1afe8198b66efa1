//! Plane-strain elastic modulus in the scaled (Mandel) 3×3 convention.
//!
//! The modulus is the symmetric matrix `Λ` mapping the scaled strain vector
//! `(ε₁, ε₂, √2 ε₃)` to the scaled stress vector `(σ₁, σ₂, √2 σ₃)`, where
//! indices 1, 2, 3 stand for the xx, yy and xy components. In this convention
//! the matrix-vector pairing equals the tensor contraction `σ : ε`, so the
//! elastic energy density is `½ εᵀ Λ ε` with no shear bookkeeping factors.
//! Engineering (Voigt) matrices must be converted before being stored here;
//! the CLI layer provides that converter.
//!
//! Plane strain is the fixed kinematic assumption throughout the crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Error raised by modulus constructors on out-of-range material parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModulusError {
    /// Young modulus must be strictly positive.
    #[error("Young modulus must be positive, got {0}")]
    NonPositiveYoung(f64),
    /// Poisson ratio must lie in the open interval (−1, 1/2) for plane strain.
    #[error("Poisson ratio must lie in (-1, 0.5), got {0}")]
    PoissonOutOfRange(f64),
}

/// Symmetric 3×3 plane-strain stiffness in the scaled shear convention.
///
/// Only the upper triangle is stored; the matrix is symmetric by
/// construction. A modulus is *elliptic* when its smallest eigenvalue is
/// strictly positive; constructors in this module guarantee that, while
/// moduli deserialized from user input should be checked with
/// [`ellipticity_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElasticModulus {
    pub l11: f64,
    pub l12: f64,
    pub l13: f64,
    pub l22: f64,
    pub l23: f64,
    pub l33: f64,
}

impl ElasticModulus {
    /// Builds a modulus from the six upper-triangle entries
    /// `(Λ11, Λ12, Λ13, Λ22, Λ23, Λ33)`.
    pub fn from_upper(entries: [f64; 6]) -> Self {
        let [l11, l12, l13, l22, l23, l33] = entries;
        Self {
            l11,
            l12,
            l13,
            l22,
            l23,
            l33,
        }
    }

    /// The six upper-triangle entries in the order `(Λ11, Λ12, Λ13, Λ22, Λ23, Λ33)`.
    pub fn upper(&self) -> [f64; 6] {
        [self.l11, self.l12, self.l13, self.l22, self.l23, self.l33]
    }

    /// The full symmetric 3×3 matrix.
    pub fn matrix(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(
            self.l11, self.l12, self.l13, //
            self.l12, self.l22, self.l23, //
            self.l13, self.l23, self.l33,
        )
    }

    /// Scaled stress `(σ₁, σ₂, √2 σ₃)` for a scaled strain `(ε₁, ε₂, √2 ε₃)`.
    pub fn stress(&self, strain: [f64; 3]) -> [f64; 3] {
        let [e1, e2, e3] = strain;
        [
            self.l11 * e1 + self.l12 * e2 + self.l13 * e3,
            self.l12 * e1 + self.l22 * e2 + self.l23 * e3,
            self.l13 * e1 + self.l23 * e2 + self.l33 * e3,
        ]
    }
}

/// Plane-strain isotropic modulus from Young modulus `E` and Poisson ratio `ν`.
///
/// Returns the matrix with `Λ11 = Λ22 = λ + 2μ`, `Λ12 = λ`, `Λ33 = 2μ` and
/// zero normal-shear coupling, where `λ = Eν/((1+ν)(1−2ν))` and
/// `μ = E/(2(1+ν))` are the Lamé constants.
///
/// # Errors
/// Rejects `E ≤ 0` and `ν` outside the open interval `(−1, 1/2)`.
pub fn isotropic_modulus(e: f64, nu: f64) -> Result<ElasticModulus, ModulusError> {
    if !(e > 0.0) {
        return Err(ModulusError::NonPositiveYoung(e));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(ModulusError::PoissonOutOfRange(nu));
    }
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    Ok(ElasticModulus {
        l11: lambda + 2.0 * mu,
        l12: lambda,
        l13: 0.0,
        l22: lambda + 2.0 * mu,
        l23: 0.0,
        l33: 2.0 * mu,
    })
}

/// Smallest eigenvalue of the 3×3 modulus matrix.
///
/// Strong ellipticity of the material is `ellipticity_constant(Λ) > 0`;
/// callers treat a non-positive return as an invalid modulus. Pure
/// computation, never fails.
pub fn ellipticity_constant(modulus: &ElasticModulus) -> f64 {
    let eig = modulus.matrix().symmetric_eigen();
    eig.eigenvalues.min()
}

/// In-plane rotation of the modulus by the frame angle `θ`.
///
/// Returns `R(θ) Λ R(θ)ᵀ` where `R(θ)` is the 3×3 rotation acting on scaled
/// strain/stress vectors; the result holds the components of the same
/// material expressed in the frame rotated by `θ`. Rotation by `θ` then `−θ`
/// is the identity to machine precision, and eigenvalues are preserved
/// (orthogonal similarity).
pub fn rotate_modulus(modulus: &ElasticModulus, theta: f64) -> ElasticModulus {
    let r = mandel_rotation(theta);
    let m = r * modulus.matrix() * r.transpose();
    // Average the symmetric pairs to keep the stored matrix exactly symmetric
    // in the face of rounding.
    ElasticModulus {
        l11: m[(0, 0)],
        l12: 0.5 * (m[(0, 1)] + m[(1, 0)]),
        l13: 0.5 * (m[(0, 2)] + m[(2, 0)]),
        l22: m[(1, 1)],
        l23: 0.5 * (m[(1, 2)] + m[(2, 1)]),
        l33: m[(2, 2)],
    }
}

/// Rotation matrix acting on scaled component vectors `(v₁, v₂, √2 v₃)`.
///
/// For a symmetric 2×2 tensor `T`, the components in the frame rotated by
/// `θ` are `mandel_rotation(θ) · (T₁₁, T₂₂, √2 T₁₂)`. The matrix is
/// orthogonal, so the same rule transforms stresses and strains.
pub fn mandel_rotation(theta: f64) -> nalgebra::Matrix3<f64> {
    let c = theta.cos();
    let s = theta.sin();
    let (c2, s2) = (c * c, s * s);
    let sq2 = std::f64::consts::SQRT_2;
    nalgebra::Matrix3::new(
        c2,
        s2,
        sq2 * c * s,
        s2,
        c2,
        -sq2 * c * s,
        -sq2 * c * s,
        sq2 * c * s,
        c2 - s2,
    )
}
