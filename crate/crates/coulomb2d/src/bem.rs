//! Boundary-element discretization of steady frictional sliding on a
//! half-space contact interval.
//!
//! Tractions on the contact interval `(−1, 1)` are discretized by
//! piecewise-constant densities on a [`LineMesh`]. The two kernel operators
//! of the surface response — convolution with `−log|x|` and with `sgn(x)` —
//! then have closed-form Galerkin matrices: every entry is a double
//! integral of the kernel over an element pair, evaluated exactly through
//! second antiderivatives. This removes all quadrature error from the core
//! operators; `S` is symmetric positive definite and `A` is skew-symmetric
//! by construction.
//!
//! The steady-sliding problem "find `t ≤ 0` with `a·t − g ≤ 0` and
//! `tᵀ(a·t − g) = 0`", with `a = (C1 − sgn(w)·f·C2)·S + sgn(w)·f·C3·A`,
//! is coercive exactly when `κ = C1 − sgn(w)·f·C2 > 0`; the solver refuses
//! the non-coercive regime and hands it to [`nonexistence_probe`], which
//! assembles a provably unsolvable instance and reports how the
//! complementarity solvers fail on it.

use crate::halfspace::HalfSpaceConstants;
use crate::vi::{lemke_solve, psor_solve, vi_residual, ConeVI, SolveOutcome, SolveStatus};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

/// Fischer–Burmeister stopping tolerance of the sliding solver.
pub const SLIDING_TOL: f64 = 1e-10;

/// Default over-relaxation parameter of the sweep solver.
pub const SLIDING_OMEGA: f64 = 1.3;

/// Error raised by mesh construction and the nonexistence probe.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BemError {
    /// Node list is not a valid mesh of [−1, 1].
    #[error("invalid line mesh: {0}")]
    InvalidMesh(String),
    /// The probe only applies once coercivity is lost.
    #[error("nonexistence probe requires κ ≤ 0, got κ = {0}")]
    ProbeRequiresNonCoercive(f64),
}

/// Partition of the contact interval `[−1, 1]` into boundary elements.
#[derive(Debug, Clone, PartialEq)]
pub struct LineMesh {
    nodes: Vec<f64>,
}

impl LineMesh {
    /// Builds a mesh from sorted node coordinates.
    ///
    /// # Errors
    /// The nodes must be strictly increasing with first node exactly `−1`
    /// and last node exactly `1`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, BemError> {
        if nodes.len() < 2 {
            return Err(BemError::InvalidMesh("need at least two nodes".into()));
        }
        if nodes[0] != -1.0 || *nodes.last().unwrap() != 1.0 {
            return Err(BemError::InvalidMesh(format!(
                "endpoints must be exactly -1 and 1, got {} and {}",
                nodes[0],
                nodes.last().unwrap()
            )));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BemError::InvalidMesh(
                "nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { nodes })
    }

    /// Uniform mesh with `n ≥ 1` elements.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "need at least one element");
        let nodes = (0..=n)
            .map(|i| -1.0 + 2.0 * i as f64 / n as f64)
            .collect();
        Self::from_nodes(nodes).expect("uniform nodes are valid")
    }

    /// Number of elements.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Whether the mesh has no elements (never true for a valid mesh).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node coordinates.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Element `i` as `(left, right)`.
    pub fn element(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    /// Element lengths.
    pub fn lengths(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Element midpoints.
    pub fn midpoints(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Element-wise constant traction density on a [`LineMesh`].
///
/// In cone problems all entries are nonpositive (compressive normal
/// traction).
#[derive(Debug, Clone, PartialEq)]
pub struct TractionCoeffs {
    pub values: DVector<f64>,
}

impl TractionCoeffs {
    /// Total force carried by the density, `Σ tᵢ·|Eᵢ|`.
    pub fn total_force(&self, mesh: &LineMesh) -> f64 {
        self.values
            .iter()
            .zip(mesh.lengths())
            .map(|(t, h)| t * h)
            .sum()
    }
}

/// Second antiderivative of `log|t|`: `G(t) = t²·log|t|/2 − 3t²/4`,
/// continuous at 0 with `G(0) = 0`; even.
fn log_double_antiderivative(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        0.5 * t * t * t.abs().ln() - 0.75 * t * t
    }
}

/// Second antiderivative of `sgn(t)`: `W(t) = t·|t|/2`; odd.
fn sgn_double_antiderivative(t: f64) -> f64 {
    0.5 * t * t.abs()
}

/// Double integral of a convolution kernel over the element pair
/// `[a,b] × [c,d]`, given the kernel's second antiderivative `phi2`.
fn pair_integral(phi2: fn(f64) -> f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    phi2(b - c) + phi2(a - d) - phi2(a - c) - phi2(b - d)
}

/// Galerkin matrix of the negative-log kernel:
/// `S[i,j] = −∫_{Ej}∫_{Ei} log|x−s| dx ds`.
///
/// Evaluated in closed form; the lower triangle is computed (rows in
/// parallel) and mirrored, so the matrix is exactly symmetric. `S` is
/// positive definite on every mesh of `[−1, 1]` (the interval has
/// logarithmic capacity below 1).
pub fn assemble_s(mesh: &LineMesh) -> DMatrix<f64> {
    let n = mesh.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = mesh.element(i);
            (0..=i)
                .map(|j| {
                    let (c, d) = mesh.element(j);
                    -pair_integral(log_double_antiderivative, a, b, c, d)
                })
                .collect()
        })
        .collect();
    let mut s = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Galerkin matrix of the sign kernel:
/// `A[i,j] = ∫_{Ej}∫_{Ei} sgn(x−s) dx ds`.
///
/// Evaluated in closed form; the strict lower triangle is computed (rows in
/// parallel) and mirrored with a sign flip, the diagonal is set to zero, so
/// `A + Aᵀ = 0` holds exactly. For disjoint elements the entry is
/// `±|Ei|·|Ej|` with the sign of their ordering.
pub fn assemble_a_matrix(mesh: &LineMesh) -> DMatrix<f64> {
    let n = mesh.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = mesh.element(i);
            (0..i)
                .map(|j| {
                    let (c, d) = mesh.element(j);
                    pair_integral(sgn_double_antiderivative, a, b, c, d)
                })
                .collect()
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

/// Coercivity classification of the sliding form by the sign of `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum CoercivityClass {
    /// `κ > 0`: the symmetric part is positive definite; the sliding
    /// problem is uniquely solvable.
    Coercive,
    /// `κ = 0`: the form degenerates to its skew part.
    Degenerate,
    /// `κ < 0`: the symmetric part is negative definite; smooth indentor
    /// shapes without any solution exist.
    NonCoercive,
}

impl CoercivityClass {
    fn from_kappa(kappa: f64) -> Self {
        if kappa > 0.0 {
            CoercivityClass::Coercive
        } else if kappa == 0.0 {
            CoercivityClass::Degenerate
        } else {
            CoercivityClass::NonCoercive
        }
    }
}

/// Assembled steady-sliding bilinear form.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingForm {
    /// Matrix of `a = κ·S + sgn(w)·f·C3·A`.
    pub matrix: DMatrix<f64>,
    /// Coercivity indicator `κ = C1 − sgn(w)·f·C2`.
    pub kappa: f64,
    /// Sign classification of `κ`.
    pub class: CoercivityClass,
}

/// Assembles the steady-sliding form
/// `a = (C1 − w_sign·f·C2)·S + w_sign·f·C3·A` together with its coercivity
/// indicator `κ = C1 − w_sign·f·C2`.
///
/// `w_sign` is the sign of the imposed sliding velocity (±1), `f ≥ 0` the
/// friction coefficient. For isotropic constants `C2 = 0`, so `κ = C1 > 0`
/// for every friction coefficient; coercivity can only be lost when the
/// material couples normal pressure to tangential surface displacement.
///
/// # Panics
/// If `f < 0` or `w_sign` is not ±1.
pub fn assemble_a(mesh: &LineMesh, c: &HalfSpaceConstants, f: f64, w_sign: f64) -> SlidingForm {
    assert!(f >= 0.0, "friction coefficient must be nonnegative");
    assert!(
        w_sign == 1.0 || w_sign == -1.0,
        "w_sign must be +1 or -1, got {w_sign}"
    );
    let kappa = c.c1 - w_sign * f * c.c2;
    let s = assemble_s(mesh);
    let mut matrix = s * kappa;
    let coupling = w_sign * f * c.c3;
    if coupling != 0.0 {
        matrix += assemble_a_matrix(mesh) * coupling;
    }
    SlidingForm {
        matrix,
        kappa,
        class: CoercivityClass::from_kappa(kappa),
    }
}

/// Critical friction coefficient `C1/|C2|` above which coercivity can be
/// lost for sliding in the unfavourable direction; infinite when `C2 = 0`.
pub fn critical_friction(c: &HalfSpaceConstants) -> f64 {
    if c.c2 == 0.0 {
        f64::INFINITY
    } else {
        c.c1 / c.c2.abs()
    }
}

/// The discrete cone VI of the steady-sliding problem: `M` is the sliding
/// form, `q_i = g(midᵢ)·|Eᵢ|` pairs the gap against the element indicator.
pub fn build_sliding_vi(form: &SlidingForm, mesh: &LineMesh, g_mid: &[f64]) -> ConeVI {
    assert_eq!(
        g_mid.len(),
        mesh.len(),
        "gap must be sampled at the element midpoints"
    );
    let lengths = mesh.lengths();
    let q = DVector::from_iterator(
        mesh.len(),
        g_mid.iter().zip(&lengths).map(|(g, h)| g * h),
    );
    ConeVI::new(form.matrix.clone(), q)
}

/// Solve report of [`solve_steady_sliding`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingReport {
    pub status: SolveStatus,
    /// Coercivity indicator of the assembled form.
    pub kappa: f64,
    pub class: CoercivityClass,
    /// Present when the non-coercive regime was detected and probed.
    pub nonexistence: Option<NonexistenceReport>,
}

/// Solves the steady-sliding complementarity problem on the mesh.
///
/// `g_mid` holds the gap sampled at element midpoints. When `κ > 0` the
/// projected-SOR solver runs with tolerance [`SLIDING_TOL`] and sweep cap
/// `100·n`; the returned traction satisfies `t ≤ 0`, `a·t − g ≤ 0` and
/// complementarity up to that residual. When `κ ≤ 0` no solve is
/// attempted: the status is `NonCoercive` and the report carries the
/// [`nonexistence_probe`] evidence instead.
pub fn solve_steady_sliding(
    mesh: &LineMesh,
    c: &HalfSpaceConstants,
    f: f64,
    w_sign: f64,
    g_mid: &[f64],
) -> (TractionCoeffs, SlidingReport) {
    let form = assemble_a(mesh, c, f, w_sign);
    if form.class != CoercivityClass::Coercive {
        let probe = nonexistence_probe(mesh, c, f, w_sign)
            .expect("κ ≤ 0 satisfies the probe precondition");
        let n = mesh.len();
        return (
            TractionCoeffs {
                values: DVector::zeros(n),
            },
            SlidingReport {
                status: SolveStatus {
                    outcome: SolveOutcome::NonCoercive,
                    iterations: 0,
                    residual: f64::INFINITY,
                },
                kappa: form.kappa,
                class: form.class,
                nonexistence: Some(probe),
            },
        );
    }
    let vi = build_sliding_vi(&form, mesh, g_mid);
    let (t, status) = psor_solve(&vi, SLIDING_OMEGA, SLIDING_TOL, 100 * mesh.len());
    (
        TractionCoeffs { values: t },
        SlidingReport {
            status,
            kappa: form.kappa,
            class: form.class,
            nonexistence: None,
        },
    )
}

/// Evidence report of the non-coercive regime.
#[derive(Debug, Clone, PartialEq)]
pub struct NonexistenceReport {
    /// Coercivity indicator `κ ≤ 0`.
    pub kappa: f64,
    /// Critical friction coefficient `C1/|C2|` (infinite for isotropic).
    pub f_critical: f64,
    /// `κ = 0`: the form is purely skew-symmetric on this instance.
    pub degenerate: bool,
    /// How complementary pivoting failed on the unsolvable instance.
    pub pivoting: SolveStatus,
    /// How the sweep solver failed (it refuses the nonpositive diagonal).
    pub sweep: SolveStatus,
    /// Quadratic form `a(g̃−t, g̃−t)` at the pivoting solver's final
    /// candidate `t`. A solution would force this value to be nonnegative,
    /// while `κ < 0` makes it strictly negative for any `t ≤ 0` — the
    /// discrete form of the nonexistence argument.
    pub certificate_quadratic: f64,
    /// Residual of the final candidate (far from zero on these instances).
    pub candidate_residual: f64,
}

/// Builds a provably unsolvable sliding instance for `κ ≤ 0` and reports
/// how the solvers fail on it.
///
/// The instance takes a nonnegative, nonzero smooth bump density `g̃` and
/// uses the load `q = a·g̃`. If some `t ≤ 0` solved the complementarity
/// system, then `a(g̃−t, g̃−t) = g̃ᵀ·(a·g̃ − a·t) ≥ 0` by complementarity
/// and the sign constraints; but the skew part drops out of the quadratic
/// form, leaving `κ·S(g̃−t, g̃−t) < 0` for `κ < 0` — a contradiction since
/// `g̃ − t ≥ g̃ ≠ 0`. The report carries both solver outcomes (pivoting is
/// expected to terminate on a secondary ray, the sweep solver refuses the
/// nonpositive diagonal), the certificate value at the pivoting candidate,
/// `κ` and the critical friction coefficient. At `κ = 0` the form is
/// purely skew and the report flags the degenerate regime instead.
///
/// # Errors
/// [`BemError::ProbeRequiresNonCoercive`] when `κ > 0`.
pub fn nonexistence_probe(
    mesh: &LineMesh,
    c: &HalfSpaceConstants,
    f: f64,
    w_sign: f64,
) -> Result<NonexistenceReport, BemError> {
    let form = assemble_a(mesh, c, f, w_sign);
    if form.kappa > 0.0 {
        return Err(BemError::ProbeRequiresNonCoercive(form.kappa));
    }
    // Smooth compactly supported bump, nonnegative and nonzero: the
    // negated obstacle lies in the cone, which is what the nonexistence
    // argument needs.
    let bump: Vec<f64> = mesh
        .midpoints()
        .iter()
        .map(|&x| {
            let u = 1.0 - 4.0 * x * x;
            if u > 0.0 {
                u * u
            } else {
                0.0
            }
        })
        .collect();
    let g_tilde = DVector::from_vec(bump);
    let q = &form.matrix * &g_tilde;
    let vi = ConeVI::new(form.matrix.clone(), q);

    let (t_piv, pivoting) = lemke_solve(&vi);
    let (_, sweep) = psor_solve(&vi, SLIDING_OMEGA, SLIDING_TOL, 100 * mesh.len());
    let v = &g_tilde - &t_piv;
    let certificate_quadratic = v.dot(&(&form.matrix * &v));
    let candidate_residual = vi_residual(&vi, &t_piv);
    Ok(NonexistenceReport {
        kappa: form.kappa,
        f_critical: critical_friction(c),
        degenerate: form.kappa == 0.0,
        pivoting,
        sweep,
        certificate_quadratic,
        candidate_residual,
    })
}

/// Samples the equilibrium density `1/(π√(1−x²))` by exact element
/// averages, `w_j = (asin(b_j) − asin(a_j)) / (π·|E_j|)`.
///
/// This density has unit total mass and induces the constant log-potential
/// `log 2` on `(−1, 1)`; midpoint sampling would lose a mesh-dependent
/// fraction of its mass to the inverse-square-root endpoint singularity,
/// so the exact averages are used wherever the identity is tested.
pub fn equilibrium_density(mesh: &LineMesh) -> TractionCoeffs {
    let n = mesh.len();
    let mut values = DVector::zeros(n);
    for i in 0..n {
        let (a, b) = mesh.element(i);
        values[i] = (b.asin() - a.asin()) / (std::f64::consts::PI * (b - a));
    }
    TractionCoeffs { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::quadrature::integrate;
    use approx::assert_abs_diff_eq;

    /// Synthetic constants used where only the structure matters.
    fn synthetic(c1: f64, c2: f64, c3: f64) -> HalfSpaceConstants {
        HalfSpaceConstants {
            c1,
            c2,
            c3,
            c4: c1,
            alpha: c2 / c1,
        }
    }

    #[test]
    fn mesh_construction_validates() {
        assert!(LineMesh::from_nodes(vec![-1.0, 0.0, 1.0]).is_ok());
        assert!(LineMesh::from_nodes(vec![-1.0, 1.0]).is_ok());
        assert!(LineMesh::from_nodes(vec![-1.0]).is_err());
        assert!(LineMesh::from_nodes(vec![-1.0, 0.0, 0.0, 1.0]).is_err());
        assert!(LineMesh::from_nodes(vec![-0.9, 0.0, 1.0]).is_err());
        assert!(LineMesh::from_nodes(vec![-1.0, 0.0, 0.9]).is_err());
        let m = LineMesh::uniform(64);
        assert_eq!(m.len(), 64);
        assert_eq!(m.nodes()[0], -1.0);
        assert_eq!(*m.nodes().last().unwrap(), 1.0);
    }

    #[test]
    fn single_element_log_integral_closed_form() {
        // −∫∫_{[−1,1]²} log|x−s| = L²(3/2 − log L) with L = 2.
        let mesh = LineMesh::uniform(1);
        let s = assemble_s(&mesh);
        assert_abs_diff_eq!(s[(0, 0)], 6.0 - 4.0 * 2.0f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn s_matches_semianalytic_quadrature_oracle() {
        // Outer adaptive quadrature of the exact inner antiderivative,
        // independent of the double-antiderivative closed form.
        let mesh = LineMesh::from_nodes(vec![-1.0, -0.2, 0.5, 1.0]).unwrap();
        let s = assemble_s(&mesh);
        let inner = |x: f64, a: f64, b: f64| {
            let l = |t: f64| if t == 0.0 { 0.0 } else { t * t.abs().ln() - t };
            l(x - a) - l(x - b)
        };
        for i in 0..3 {
            for j in 0..3 {
                let (a, b) = mesh.element(i);
                let (c, d) = mesh.element(j);
                let q = integrate(|sv| -inner(sv, a, b), c, d, 1e-12);
                assert!(q.converged);
                assert_abs_diff_eq!(s[(i, j)], q.value, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn s_is_symmetric_with_equal_diagonal_on_translates() {
        let mesh = LineMesh::uniform(2);
        let s = assemble_s(&mesh);
        assert_eq!(s[(0, 1)], s[(1, 0)]);
        assert_eq!(s[(0, 0)], s[(1, 1)]);
    }

    #[test]
    fn s_is_positive_definite() {
        for n in [8usize, 64] {
            let s = assemble_s(&LineMesh::uniform(n));
            let min_eig = s.symmetric_eigen().eigenvalues.min();
            assert!(min_eig > 0.0, "n={n}: min eigenvalue {min_eig}");
        }
    }

    #[test]
    fn a_matrix_is_exactly_skew_with_zero_diagonal() {
        let mesh = LineMesh::from_nodes(vec![-1.0, -0.3, 0.1, 0.4, 1.0]).unwrap();
        let a = assemble_a_matrix(&mesh);
        for i in 0..4 {
            assert_eq!(a[(i, i)], 0.0);
            for j in 0..4 {
                assert_eq!(a[(i, j)] + a[(j, i)], 0.0);
            }
        }
    }

    #[test]
    fn a_matrix_on_two_halves_and_disjoint_product_rule() {
        let mesh = LineMesh::from_nodes(vec![-1.0, 0.0, 1.0]).unwrap();
        let a = assemble_a_matrix(&mesh);
        // Element 1 lies right of element 0: sgn ≡ +1 gives |E1|·|E0|.
        assert_abs_diff_eq!(a[(1, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[(0, 1)], -1.0, epsilon = 1e-15);

        let mesh = LineMesh::from_nodes(vec![-1.0, -0.5, 0.25, 1.0]).unwrap();
        let a = assemble_a_matrix(&mesh);
        assert_abs_diff_eq!(a[(2, 0)], 0.75 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn assemble_a_frictionless_is_scaled_s() {
        let mesh = LineMesh::uniform(8);
        let c = synthetic(0.7, 0.2, 0.3);
        let form = assemble_a(&mesh, &c, 0.0, 1.0);
        let s = assemble_s(&mesh) * 0.7;
        assert_abs_diff_eq!((form.matrix - s).norm(), 0.0, epsilon = 1e-14);
        assert_eq!(form.class, CoercivityClass::Coercive);
        assert_abs_diff_eq!(form.kappa, 0.7);
    }

    #[test]
    fn isotropic_constants_keep_coercivity_for_any_friction() {
        let mesh = LineMesh::uniform(4);
        let c = synthetic(1.0, 0.0, 0.26);
        for f in [0.0, 0.5, 5.0, 500.0] {
            let form = assemble_a(&mesh, &c, f, 1.0);
            assert_eq!(form.class, CoercivityClass::Coercive);
            assert_abs_diff_eq!(form.kappa, 1.0);
        }
        assert_eq!(critical_friction(&c), f64::INFINITY);
    }

    #[test]
    fn coercivity_flips_past_critical_friction() {
        let c = synthetic(1.0, 0.5, 0.3);
        assert_abs_diff_eq!(critical_friction(&c), 2.0);
        let mesh = LineMesh::uniform(4);
        assert_eq!(
            assemble_a(&mesh, &c, 1.9, 1.0).class,
            CoercivityClass::Coercive
        );
        assert_eq!(
            assemble_a(&mesh, &c, 2.0, 1.0).class,
            CoercivityClass::Degenerate
        );
        assert_eq!(
            assemble_a(&mesh, &c, 2.1, 1.0).class,
            CoercivityClass::NonCoercive
        );
        // Sliding the other way restores coercivity.
        assert_eq!(
            assemble_a(&mesh, &c, 2.1, -1.0).class,
            CoercivityClass::Coercive
        );
    }

    #[test]
    fn nonnegative_gap_gives_zero_traction() {
        let mesh = LineMesh::uniform(32);
        let c = synthetic(1.0, 0.0, 0.0);
        let g: Vec<f64> = mesh.midpoints().iter().map(|x| 0.1 + x * x).collect();
        let (t, report) = solve_steady_sliding(&mesh, &c, 0.3, 1.0, &g);
        assert!(report.status.solved());
        assert_abs_diff_eq!(t.values.amax(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn flat_punch_total_load_converges() {
        let c = synthetic(1.0, 0.0, 0.0);
        let exact = -1.0 / 2.0f64.ln();
        let mut errors = Vec::new();
        for n in [64usize, 128] {
            let mesh = LineMesh::uniform(n);
            let g = vec![-1.0; n];
            let (t, report) = solve_steady_sliding(&mesh, &c, 0.0, 1.0, &g);
            assert!(report.status.solved(), "n={n}: {:?}", report.status);
            let load = t.total_force(&mesh);
            errors.push((load - exact).abs() / exact.abs());
        }
        assert!(errors[1] < errors[0], "no refinement gain: {errors:?}");
        assert!(errors[1] < 0.05, "relative error too large: {errors:?}");
    }

    #[test]
    fn flat_punch_profile_is_negative_and_symmetric() {
        let c = synthetic(0.5, 0.0, 0.0);
        let n = 64;
        let mesh = LineMesh::uniform(n);
        let (t, report) = solve_steady_sliding(&mesh, &c, 0.0, 1.0, &vec![-1.0; n]);
        assert!(report.status.solved());
        for i in 0..n {
            assert!(t.values[i] < 0.0, "element {i} not in contact");
            assert_abs_diff_eq!(t.values[i], t.values[n - 1 - i], epsilon = 1e-7);
        }
        // Inverse-square-root shape: the edge density dominates the centre.
        assert!(t.values[0] < 2.0 * t.values[n / 2]);
    }

    #[test]
    fn parabolic_gap_contact_patch_is_interior_and_grows() {
        let c = synthetic(1.0, 0.0, 0.0);
        let n = 200;
        let mesh = LineMesh::uniform(n);
        let active = |delta: f64| -> usize {
            let g: Vec<f64> = mesh.midpoints().iter().map(|x| x * x - delta).collect();
            let (t, report) = solve_steady_sliding(&mesh, &c, 0.0, 1.0, &g);
            assert!(report.status.solved());
            assert!(t.values.max() <= 1e-12);
            // No contact at the ends of the interval.
            assert_abs_diff_eq!(t.values[0], 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.values[n - 1], 0.0, epsilon = 1e-12);
            (0..n).filter(|&i| t.values[i] < -1e-8).count()
        };
        let small = active(0.1);
        let large = active(0.4);
        assert!(small > 0);
        assert!(large > small, "patch did not grow: {small} vs {large}");
    }

    #[test]
    fn sweep_and_pivoting_agree_on_the_punch() {
        let c = synthetic(1.0, 0.3, 0.2);
        let n = 64;
        let mesh = LineMesh::uniform(n);
        let form = assemble_a(&mesh, &c, 0.5, 1.0);
        assert_eq!(form.class, CoercivityClass::Coercive);
        let g: Vec<f64> = mesh.midpoints().iter().map(|x| 0.2 * x - 1.0).collect();
        let vi = build_sliding_vi(&form, &mesh, &g);
        let (t_sweep, st_sweep) = psor_solve(&vi, SLIDING_OMEGA, SLIDING_TOL, 100 * n);
        let (t_piv, st_piv) = lemke_solve(&vi);
        assert!(st_sweep.solved() && st_piv.solved());
        assert!((t_sweep - t_piv).amax() < 1e-6);
    }

    #[test]
    fn probe_refuses_coercive_constants() {
        let mesh = LineMesh::uniform(16);
        let c = synthetic(1.0, 0.0, 0.26);
        assert!(matches!(
            nonexistence_probe(&mesh, &c, 100.0, 1.0),
            Err(BemError::ProbeRequiresNonCoercive(_))
        ));
    }

    #[test]
    fn probe_reports_nonexistence_evidence_past_threshold() {
        let mesh = LineMesh::uniform(24);
        let c = synthetic(1.0, 0.5, 0.3);
        let report = nonexistence_probe(&mesh, &c, 3.0, 1.0).unwrap();
        assert_abs_diff_eq!(report.kappa, -0.5);
        assert_abs_diff_eq!(report.f_critical, 2.0);
        assert!(!report.degenerate);
        assert!(matches!(
            report.pivoting.outcome,
            SolveOutcome::RayTermination | SolveOutcome::NotConverged
        ));
        assert_eq!(report.sweep.outcome, SolveOutcome::NonCoercive);
        // κ < 0 makes the certificate quadratic strictly negative at any
        // nonpositive candidate, contradicting solvability.
        assert!(report.certificate_quadratic < 0.0);
        assert!(report.candidate_residual > SLIDING_TOL);
    }

    #[test]
    fn probe_flags_degenerate_skew_regime_at_the_boundary() {
        let mesh = LineMesh::uniform(16);
        let c = synthetic(1.0, 0.5, 0.3);
        let report = nonexistence_probe(&mesh, &c, 2.0, 1.0).unwrap();
        assert_eq!(report.kappa, 0.0);
        assert!(report.degenerate);
    }

    #[test]
    fn solve_delegates_to_probe_when_noncoercive() {
        let mesh = LineMesh::uniform(16);
        let c = synthetic(1.0, 0.5, 0.3);
        let g = vec![-0.5; 16];
        let (t, report) = solve_steady_sliding(&mesh, &c, 2.5, 1.0, &g);
        assert_eq!(report.status.outcome, SolveOutcome::NonCoercive);
        assert_eq!(report.class, CoercivityClass::NonCoercive);
        assert!(report.nonexistence.is_some());
        assert_abs_diff_eq!(t.values.amax(), 0.0);
    }

    #[test]
    fn equilibrium_density_has_unit_mass_and_constant_potential() {
        let n = 500;
        let mesh = LineMesh::uniform(n);
        let w = equilibrium_density(&mesh);
        assert_abs_diff_eq!(w.total_force(&mesh), 1.0, epsilon = 1e-12);
        let s = assemble_s(&mesh);
        let potential = s * &w.values;
        let lengths = mesh.lengths();
        let log2 = 2.0f64.ln();
        let max_dev = (0..n)
            .map(|i| (potential[i] / lengths[i] - log2).abs())
            .fold(0.0f64, f64::max);
        // The full 1e−3 bound is certified at n = 2000 by the acceptance
        // suite; at n = 500 the endpoint elements dominate the deviation.
        assert!(max_dev < 5e-3, "potential deviation {max_dev}");
    }

    /// Maclaurin series of erf, accurate to machine precision for |z| ≤ 2.
    fn erf_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        for k in 1..40 {
            term *= -z * z / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn sign_kernel_fourier_representation_three_way_check() {
        // sgn * γ_σ for a Gaussian density γ_σ equals erf(x/(σ√2)); the
        // same function is recovered from the frequency-side form of the
        // sign kernel, (2/π)∫₀^∞ sin(xξ)·e^{−σ²ξ²/2}/ξ dξ. A third route
        // convolves exactly integrated sgn elements against sampled γ on a
        // wide periodic super-interval. All three must agree to 1e−6.
        let sigma = 1.0;
        let half_width = 20.0;
        let n = 16_000;
        let h = 2.0 * half_width / n as f64;
        let gamma = |y: f64| {
            (-(y * y) / (2.0 * sigma * sigma)).exp()
                / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        };
        for &x in &[-1.5, -0.4, 0.3, 0.9, 1.8] {
            // Route 1: grid convolution with exact sign-kernel element
            // integrals.
            let mut direct = 0.0;
            for k in 0..n {
                let a = -half_width + k as f64 * h;
                let b = a + h;
                let mid = 0.5 * (a + b);
                direct += gamma(mid) * ((x - a).abs() - (x - b).abs());
            }
            // Route 2: frequency-side evaluation.
            let q = integrate(
                |xi| {
                    if xi == 0.0 {
                        x
                    } else {
                        (x * xi).sin() * (-0.5 * sigma * sigma * xi * xi).exp() / xi
                    }
                },
                0.0,
                40.0,
                1e-12,
            );
            assert!(q.converged);
            let fourier = 2.0 / std::f64::consts::PI * q.value;
            // Route 3: closed form.
            let exact = erf_series(x / (sigma * std::f64::consts::SQRT_2));
            assert_abs_diff_eq!(direct, exact, epsilon = 1e-6);
            assert_abs_diff_eq!(fourier, exact, epsilon = 1e-6);
        }
    }

    #[test]
    fn quadratic_form_splits_off_the_mean_through_the_equilibrium_density() {
        // S(t,t) = S(t₀,t₀) + log 2·⟨t,1⟩² with t₀ = t − ⟨t,1⟩·w: holds
        // exactly in the continuum; discretely the error is driven by the
        // equilibrium-density potential error and shrinks under refinement.
        let trial = |n: usize| -> f64 {
            let mesh = LineMesh::uniform(n);
            let s = assemble_s(&mesh);
            let mids = mesh.midpoints();
            let t = DVector::from_iterator(
                n,
                mids.iter()
                    .map(|&x| -(1.0 + (std::f64::consts::PI * x).cos()) - 0.3 * x),
            );
            let lengths = mesh.lengths();
            let mass: f64 = (0..n).map(|i| t[i] * lengths[i]).sum();
            let w = equilibrium_density(&mesh);
            let t0 = &t - &w.values * mass;
            let full = t.dot(&(&s * &t));
            let centred = t0.dot(&(&s * &t0));
            (full - centred - 2.0f64.ln() * mass * mass).abs()
        };
        let coarse = trial(250);
        let fine = trial(1000);
        assert!(fine < coarse, "no refinement gain: {coarse} vs {fine}");
        assert!(fine < 1e-2, "identity violation too large: {fine}");
    }
}
