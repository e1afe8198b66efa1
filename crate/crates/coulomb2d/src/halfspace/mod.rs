//! Neumann-to-Dirichlet surface constants of an elastic half-space.
//!
//! For a homogeneous half-space `y < 0` loaded by surface tractions
//! `(t_t, t_n)` (tangential, normal) at `y = 0`, the surface displacements
//! are, up to an affine term,
//!
//! ```text
//! u_n = −C1·(log|x| * t_n) − C2·(log|x| * t_t) − C3·(sgn * t_t)
//! u_t = −C4·(log|x| * t_t) − C2·(log|x| * t_n) + C3·(sgn * t_n)
//! ```
//!
//! with four real constants `C1…C4` depending only on the elastic modulus:
//! `C1, C4 > 0` and `π²C1C4 − π²C2² − 4C3² > 0`. This module computes them
//! for an arbitrary elliptic plane-strain modulus by the integral method:
//! the quartic characteristic polynomial of the modulus is formed, its
//! moment integrals are evaluated by adaptive quadrature, and the constants
//! are read off a 2×2 boundary system assembled from those moments. No
//! root-finding is involved, so simple and double characteristic roots are
//! handled uniformly.
//!
//! The local frame is `(tangent, outward normal)` with the body on the
//! negative-normal side; tractions act on the body. All operations here are
//! pure and the types are plain values, safe to copy across threads.

pub mod quadrature;

use crate::elasticity::{ellipticity_constant, rotate_modulus, ElasticModulus};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use quadrature::{integrate_line, LINE_INTEGRAL_TOL};

/// Error raised by the half-space computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HalfSpaceError {
    /// The modulus is not strongly elliptic (smallest eigenvalue ≤ 0).
    #[error("modulus is not elliptic: smallest eigenvalue {0:.6e}")]
    NotElliptic(f64),
    /// Adaptive quadrature exhausted its budget before reaching tolerance.
    #[error("moment-integral quadrature did not converge: achieved error estimate {achieved:.3e}")]
    QuadratureNotConverged {
        /// Error estimate actually reached when the evaluation budget ran out.
        achieved: f64,
    },
    /// The 2×2 boundary system is singular beyond tolerance; signals a
    /// non-elliptic or corrupted modulus.
    #[error("half-space boundary system is numerically singular")]
    NonInvertibleSystem,
    /// Computed constants violate the positivity invariants; signals a
    /// corrupted modulus or quadrature breakdown.
    #[error("constants violate positivity: C1={c1:.6e}, C4={c4:.6e}, determinant invariant={det:.6e}")]
    InvariantViolation { c1: f64, c4: f64, det: f64 },
    /// Evaluation point coincides with the point-load location.
    #[error("evaluation point coincides with the load point")]
    SingularPoint,
    /// Evaluation point has y > 0, outside the half-space.
    #[error("evaluation point lies outside the half-space (y > 0)")]
    OutsideHalfSpace,
}

/// Coefficients of the quartic characteristic polynomial
/// `P(λ) = a4·λ⁴ + a3·λ³ + a2·λ² + a1·λ + a0` of a plane-strain modulus.
///
/// `P` is the determinant of the 2×2 acoustic-type matrix of the modulus
/// along the direction `(1, λ)`; ellipticity of the modulus makes `a4 > 0`
/// and leaves `P` without real roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub a4: f64,
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl CharPoly {
    /// Evaluates `P(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        (((self.a4 * x + self.a3) * x + self.a2) * x + self.a1) * x + self.a0
    }
}

/// Moment integrals of the reciprocal characteristic polynomial:
/// `I0 = ∫ dx/P`, `I1 = ∫ x dx/P`, `I2 = ∫ x² dx/P`, and the regularized
/// third moment `I3 = ∫ [a4·x³/P(x) − x/(1+x²)] dx`, all over the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentIntegrals {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

/// The four half-space surface constants and their ratio `alpha = C2/C1`.
///
/// Units: length per unit force per unit thickness (a surface compliance).
/// Invariants guaranteed by [`n2d_constants`]: `C1 > 0`, `C4 > 0`, and
/// `π²·C1·C4 − π²·C2² − 4·C3² > 0`. For isotropic materials `C2 = 0`,
/// `C1 = C4 = 2(1−ν²)/(πE)` and `C3 = (1−2ν)(1+ν)/(2E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Coupling ratio `C2/C1`; zero for isotropic materials.
    pub alpha: f64,
}

impl HalfSpaceConstants {
    /// The positive-definiteness invariant `π²·C1·C4 − π²·C2² − 4·C3²`.
    pub fn determinant_invariant(&self) -> f64 {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        pi2 * self.c1 * self.c4 - pi2 * self.c2 * self.c2 - 4.0 * self.c3 * self.c3
    }
}

/// Characteristic polynomial of an elastic modulus.
///
/// The coefficients are polynomial in the modulus entries:
///
/// ```text
/// a4 = (Λ22·Λ33 − Λ23²)/2          a3 = √2·(Λ13·Λ22 − Λ23·Λ12)
/// a2 = Λ11·Λ22 + Λ13·Λ23 − Λ33·Λ12 − Λ12²
/// a1 = √2·(Λ11·Λ23 − Λ13·Λ12)      a0 = (Λ11·Λ33 − Λ13²)/2
/// ```
///
/// and satisfy `det M(ξ, η) = ξ⁴·P(η/ξ)` for the acoustic matrix `M` of the
/// modulus in the direction `(ξ, η)`.
pub fn char_poly(modulus: &ElasticModulus) -> CharPoly {
    let sq2 = std::f64::consts::SQRT_2;
    let m = modulus;
    CharPoly {
        a4: 0.5 * (m.l22 * m.l33 - m.l23 * m.l23),
        a3: sq2 * (m.l13 * m.l22 - m.l23 * m.l12),
        a2: m.l11 * m.l22 + m.l13 * m.l23 - m.l33 * m.l12 - m.l12 * m.l12,
        a1: sq2 * (m.l11 * m.l23 - m.l13 * m.l12),
        a0: 0.5 * (m.l11 * m.l33 - m.l13 * m.l13),
    }
}

/// Moment integrals of `1/P` over the real line by adaptive quadrature.
///
/// Requires `P` elliptic (positive leading coefficient, no real roots); the
/// integrals are then absolutely convergent — the third moment after the
/// `x/(1+x²)` tail subtraction. Each integral is computed to absolute
/// tolerance [`LINE_INTEGRAL_TOL`] after the substitution `x = tan θ`.
///
/// # Errors
/// [`HalfSpaceError::QuadratureNotConverged`] when the evaluation budget is
/// exhausted first, carrying the achieved error estimate.
pub fn moment_integrals(p: &CharPoly) -> Result<MomentIntegrals, HalfSpaceError> {
    let run = |f: &dyn Fn(f64) -> f64| -> Result<f64, HalfSpaceError> {
        let q = integrate_line(f, LINE_INTEGRAL_TOL);
        if q.converged {
            Ok(q.value)
        } else {
            Err(HalfSpaceError::QuadratureNotConverged { achieved: q.error })
        }
    };
    let i0 = run(&|x| 1.0 / p.eval(x))?;
    let i1 = run(&|x| x / p.eval(x))?;
    let i2 = run(&|x| x * x / p.eval(x))?;
    let a4 = p.a4;
    let i3 = run(&|x| a4 * x * x * x / p.eval(x) - x / (1.0 + x * x))?;
    Ok(MomentIntegrals { i0, i1, i2, i3 })
}

/// Neumann-to-Dirichlet surface constants of the half-space with the given
/// modulus, in the frame where the surface is the x-axis and the body fills
/// `y < 0`.
///
/// Assembles the 2×2 boundary system from the moment integrals of the
/// characteristic polynomial, inverts it, composes with the surface moment
/// matrix, and reads the four constants off the real and imaginary parts of
/// the resulting traction-to-displacement symbol.
///
/// # Errors
/// - [`HalfSpaceError::NotElliptic`] for a non-elliptic modulus;
/// - [`HalfSpaceError::QuadratureNotConverged`] from the moment integrals;
/// - [`HalfSpaceError::NonInvertibleSystem`] if the boundary system is
///   singular beyond relative tolerance 1e−10;
/// - [`HalfSpaceError::InvariantViolation`] if the computed constants fail
///   their positivity invariants (corrupted input).
pub fn n2d_constants(modulus: &ElasticModulus) -> Result<HalfSpaceConstants, HalfSpaceError> {
    let ell = ellipticity_constant(modulus);
    if !(ell > 0.0) {
        return Err(HalfSpaceError::NotElliptic(ell));
    }
    let p = char_poly(modulus);
    let mi = moment_integrals(&p)?;
    constants_from_moments(modulus, &p, &mi)
}

/// Assembles and solves the boundary system given precomputed moments.
fn constants_from_moments(
    modulus: &ElasticModulus,
    p: &CharPoly,
    mi: &MomentIntegrals,
) -> Result<HalfSpaceConstants, HalfSpaceError> {
    use std::f64::consts::PI;
    let m = modulus;
    let sq2 = std::f64::consts::SQRT_2;
    // Off-diagonal acoustic coupling coefficient entering both matrices.
    let e = 0.5 * (m.l13 * m.l23 - m.l33 * m.l12);
    let (i0, i1, i2, i3) = (mi.i0, mi.i1, mi.i2, mi.i3);

    // Complex 2×2 boundary system B (for the positive-frequency branch).
    let b11 = Complex::new(PI, i3 + 0.5 * p.a3 * i2 + e * i1);
    let b12 = Complex::new(0.0, e * i2 + 0.5 * p.a1 * i1 + p.a0 * i0);
    let b21 = Complex::new(0.0, -(p.a4 * i2 + 0.5 * p.a3 * i1 + e * i0));
    let b22 = Complex::new(PI, i3 + p.a3 * i2 + (p.a2 - e) * i1 + 0.5 * p.a1 * i0);

    let det = b11 * b22 - b12 * b21;
    let scale = (b11.norm() * b22.norm() + b12.norm() * b21.norm()).max(1.0);
    if det.norm() <= 1e-10 * scale {
        return Err(HalfSpaceError::NonInvertibleSystem);
    }

    // Real symmetric surface moment matrix G.
    let g11 = 0.5 * m.l33 * i0 + sq2 * m.l23 * i1 + m.l22 * i2;
    let g12 = -(0.5 * sq2 * m.l13 * i0 + (0.5 * m.l33 + m.l12) * i1 + 0.5 * sq2 * m.l23 * i2);
    let g22 = m.l11 * i0 + sq2 * m.l13 * i1 + 0.5 * m.l33 * i2;

    // N = G · B⁻¹ with B⁻¹ = [[b22, −b12], [−b21, b11]]/det.
    let n11 = (Complex::new(g11, 0.0) * b22 - Complex::new(g12, 0.0) * b21) / det;
    let n12 = (-Complex::new(g11, 0.0) * b12 + Complex::new(g12, 0.0) * b11) / det;
    let n21 = (Complex::new(g12, 0.0) * b22 - Complex::new(g22, 0.0) * b21) / det;
    let n22 = (-Complex::new(g12, 0.0) * b12 + Complex::new(g22, 0.0) * b11) / det;

    // The symbol is Hermitian: N11, N22 real; N12, N21 conjugate. Averaging
    // the analytically equal entries symmetrizes rounding noise.
    let c4 = n11.re / PI;
    let c1 = n22.re / PI;
    let c2 = 0.5 * (n12.re + n21.re) / PI;
    let c3 = 0.25 * (n21.im - n12.im);

    let constants = HalfSpaceConstants {
        c1,
        c2,
        c3,
        c4,
        alpha: c2 / c1,
    };
    let det_inv = constants.determinant_invariant();
    if !(c1 > 0.0 && c4 > 0.0 && det_inv > 0.0) {
        return Err(HalfSpaceError::InvariantViolation {
            c1,
            c4,
            det: det_inv,
        });
    }
    Ok(constants)
}

/// Coupling ratio `alpha = C2/C1` of the half-space tangent to the boundary
/// at the given tangent angle.
///
/// Rotates the modulus into the local frame whose x-axis is the boundary
/// tangent (angle measured from the global x-axis) and whose y-axis is the
/// outward normal, then computes the constants there. Vanishes identically
/// for isotropic materials and, at angle 0, for moduli with no
/// normal-shear coupling (`Λ13 = Λ23 = 0`).
pub fn boundary_alpha(modulus: &ElasticModulus, tangent_angle: f64) -> Result<f64, HalfSpaceError> {
    let local = rotate_modulus(modulus, tangent_angle);
    n2d_constants(&local).map(|c| c.alpha)
}

/// Displacement of the isotropic half-space `y ≤ 0` under a point force
/// `t = (Tx, Ty)` applied at the surface origin, evaluated at `(x, y)`.
///
/// Evaluates the closed-form fundamental solution (plane strain, Young
/// modulus `e`, Poisson ratio `nu`), with the rigid-body terms set to zero.
/// On the surface `y = 0` the arctangent is taken in the limit from the
/// interior, `atan(x/y) → −(π/2)·sgn(x)`; the tangential force therefore
/// produces a normal-displacement jump of magnitude `(1−2ν)(1+ν)/E`
/// across the load point.
///
/// # Errors
/// [`HalfSpaceError::SingularPoint`] at the origin,
/// [`HalfSpaceError::OutsideHalfSpace`] for `y > 0`.
pub fn iso_fundamental_displacement(
    e: f64,
    nu: f64,
    t: [f64; 2],
    x: f64,
    y: f64,
) -> Result<[f64; 2], HalfSpaceError> {
    if x == 0.0 && y == 0.0 {
        return Err(HalfSpaceError::SingularPoint);
    }
    if y > 0.0 {
        return Err(HalfSpaceError::OutsideHalfSpace);
    }
    let r2 = x * x + y * y;
    let pi_e = std::f64::consts::PI * e;
    let at = if y == 0.0 {
        -std::f64::consts::FRAC_PI_2 * x.signum()
    } else {
        (x / y).atan()
    };
    let k_log = -(1.0 - nu * nu) * r2.ln();
    let k_at = (1.0 - 2.0 * nu) * (1.0 + nu) * at;
    let k_mix = (1.0 + nu) * x * y / r2;
    let k_yy = (1.0 + nu) * y * y / r2;
    // Columns of the fundamental matrix: response to a unit x-force and to a
    // unit y-force.
    let ux_from_x = (k_log - k_yy) / pi_e;
    let uy_from_x = (k_at + k_mix) / pi_e;
    let ux_from_y = (-k_at + k_mix) / pi_e;
    let uy_from_y = (k_log + k_yy) / pi_e;
    Ok([
        t[0] * ux_from_x + t[1] * ux_from_y,
        t[0] * uy_from_x + t[1] * uy_from_y,
    ])
}

/// Antiderivative of `log|t|`, continuous with value 0 at `t = 0`.
fn log_antiderivative(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.abs().ln() - t
    }
}

/// Surface displacements induced by a piecewise-constant surface traction.
///
/// `nodes` are the sorted breakpoints of the traction grid; `t_n[j]` and
/// `t_t[j]` are the constant normal and tangential traction densities on
/// `[nodes[j], nodes[j+1]]`. Returns `(u_n, u_t)` at the points `eval`,
/// computed from the kernel formulas with the affine term set to zero; the
/// convolutions with `log|x|` and `sgn(x)` use exact elementwise
/// antiderivatives, so evaluation points inside the support are fine.
///
/// # Panics
/// If the array lengths are inconsistent (`t_n.len() + 1 != nodes.len()`).
pub fn surface_response(
    c: &HalfSpaceConstants,
    nodes: &[f64],
    t_n: &[f64],
    t_t: &[f64],
    eval: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    assert!(
        nodes.len() >= 2 && t_n.len() + 1 == nodes.len() && t_t.len() + 1 == nodes.len(),
        "traction arrays must have one entry per grid element"
    );
    let mut u_n = Vec::with_capacity(eval.len());
    let mut u_t = Vec::with_capacity(eval.len());
    for &x in eval {
        let mut log_n = 0.0; // (log|·| * t_n)(x)
        let mut log_t = 0.0; // (log|·| * t_t)(x)
        let mut sgn_n = 0.0; // (sgn * t_n)(x)
        let mut sgn_t = 0.0; // (sgn * t_t)(x)
        for j in 0..t_n.len() {
            let (a, b) = (nodes[j], nodes[j + 1]);
            let log_int = log_antiderivative(x - a) - log_antiderivative(x - b);
            let sgn_int = (x - a).abs() - (x - b).abs();
            log_n += t_n[j] * log_int;
            log_t += t_t[j] * log_int;
            sgn_n += t_n[j] * sgn_int;
            sgn_t += t_t[j] * sgn_int;
        }
        u_n.push(-c.c1 * log_n - c.c2 * log_t - c.c3 * sgn_t);
        u_t.push(-c.c4 * log_t - c.c2 * log_n + c.c3 * sgn_n);
    }
    (u_n, u_t)
}
