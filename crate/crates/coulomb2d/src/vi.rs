//! Finite-dimensional cone variational inequalities on the nonpositive
//! orthant.
//!
//! A [`ConeVI`] instance asks for a vector `t` with
//!
//! ```text
//! (1)  t ≤ 0            componentwise,
//! (2)  M·t − q ≤ 0      componentwise,
//! (3)  tᵀ(M·t − q) = 0  complementarity,
//! ```
//!
//! which is the discrete variational inequality `⟨Mt − q, v − t⟩ ≥ 0` for
//! all `v ≤ 0`. Substituting `z = −t` turns it into the standard linear
//! complementarity problem `z ≥ 0`, `Mz + q ≥ 0`, `zᵀ(Mz + q) = 0`, which
//! is what the pivoting solver operates on. Two solvers are provided —
//! projected SOR for symmetric positive (semi)definite `M` and Lemke
//! complementary pivoting for general `M` — together with a
//! Fischer–Burmeister merit residual and finite-sample structure probes
//! (monotonicity, boundedness, coercivity) for nonlinear operators given as
//! callbacks.
//!
//! Everything here is pure and deterministic; instances can be solved in
//! parallel from different threads.

use nalgebra::{DMatrix, DVector};

/// Residual level below which the pivoting solver reports `Solved`
/// (it has no user-supplied tolerance; pivoting is exact up to rounding).
pub const LEMKE_RESIDUAL_TOL: f64 = 1e-8;

/// A linear cone variational inequality on the nonpositive orthant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeVI {
    /// System matrix (n×n).
    pub m: DMatrix<f64>,
    /// Load vector (n).
    pub q: DVector<f64>,
}

impl ConeVI {
    /// Builds an instance, checking that dimensions agree.
    pub fn new(m: DMatrix<f64>, q: DVector<f64>) -> Self {
        assert!(
            m.is_square() && m.nrows() == q.len(),
            "ConeVI dimensions disagree: M is {}x{}, q has length {}",
            m.nrows(),
            m.ncols(),
            q.len()
        );
        Self { m, q }
    }

    /// Problem size.
    pub fn len(&self) -> usize {
        self.q.len()
    }

    /// Whether the instance is empty.
    pub fn is_empty(&self) -> bool {
        self.q.len() == 0
    }
}

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SolveOutcome {
    /// Converged; the reported residual is below the tolerance in force.
    Solved,
    /// Iteration or pivot budget exhausted before convergence.
    NotConverged,
    /// Complementary pivoting ended on a secondary ray: strong numerical
    /// evidence that the instance has no solution.
    RayTermination,
    /// The instance is visibly non-coercive (a nonpositive diagonal entry),
    /// so the sweep-based solver does not apply.
    NonCoercive,
}

/// Outcome report attached to every solve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolveStatus {
    pub outcome: SolveOutcome,
    /// Sweeps (projected SOR) or pivots (Lemke) performed.
    pub iterations: usize,
    /// Fischer–Burmeister residual of the returned point.
    pub residual: f64,
}

impl SolveStatus {
    /// True when the solve converged.
    pub fn solved(&self) -> bool {
        self.outcome == SolveOutcome::Solved
    }
}

/// Componentwise Fischer–Burmeister merit residual of a candidate point.
///
/// For each component the function `φ(a, b) = a + b − √(a² + b²)` is
/// evaluated at `a = −t_i`, `b = −(Mt − q)_i`; `φ(a, b) = 0` exactly when
/// `a ≥ 0`, `b ≥ 0` and `ab = 0`, so the maximum of `|φ|` over components
/// vanishes exactly at solutions of the cone VI. Sign violations enter at
/// least linearly: `|φ(a, b)| ≥ |a|` whenever `a < 0`.
pub fn vi_residual(p: &ConeVI, t: &DVector<f64>) -> f64 {
    let slack = &p.m * t - &p.q;
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        let a = -t[i];
        let b = -slack[i];
        let phi = a + b - a.hypot(b);
        worst = worst.max(phi.abs());
    }
    worst
}

/// Projected successive over-relaxation on the nonpositive cone.
///
/// Sweeps the components in fixed order; each coordinate takes the
/// over-relaxed Gauss–Seidel step and is projected back onto `t_i ≤ 0`.
/// Convergence is guaranteed for symmetric positive definite `M` and
/// `0 < ω < 2`; the sweep loop stops as soon as the Fischer–Burmeister
/// residual drops below `tol`.
///
/// Returns `NonCoercive` immediately (with the zero vector) if any diagonal
/// entry of `M` is nonpositive, and `NotConverged` with the last iterate
/// after `max_sweeps` sweeps.
///
/// # Panics
/// If `ω` is outside `(0, 2)`.
pub fn psor_solve(
    p: &ConeVI,
    omega: f64,
    tol: f64,
    max_sweeps: usize,
) -> (DVector<f64>, SolveStatus) {
    assert!(
        omega > 0.0 && omega < 2.0,
        "relaxation parameter must lie in (0, 2), got {omega}"
    );
    let n = p.len();
    let mut t = DVector::zeros(n);
    for i in 0..n {
        if !(p.m[(i, i)] > 0.0) {
            return (
                t,
                SolveStatus {
                    outcome: SolveOutcome::NonCoercive,
                    iterations: 0,
                    residual: f64::INFINITY,
                },
            );
        }
    }
    let mut residual = vi_residual(p, &t);
    if residual < tol {
        return (
            t,
            SolveStatus {
                outcome: SolveOutcome::Solved,
                iterations: 0,
                residual,
            },
        );
    }
    for sweep in 1..=max_sweeps {
        for i in 0..n {
            let mut row_dot = 0.0;
            for j in 0..n {
                row_dot += p.m[(i, j)] * t[j];
            }
            let r = row_dot - p.q[i];
            let target = t[i] - omega * r / p.m[(i, i)];
            t[i] = target.min(0.0);
        }
        residual = vi_residual(p, &t);
        if residual < tol {
            return (
                t,
                SolveStatus {
                    outcome: SolveOutcome::Solved,
                    iterations: sweep,
                    residual,
                },
            );
        }
    }
    (
        t,
        SolveStatus {
            outcome: SolveOutcome::NotConverged,
            iterations: max_sweeps,
            residual,
        },
    )
}

/// Lemke complementary pivoting on the equivalent linear complementarity
/// problem.
///
/// Works on `z = −t ≥ 0` with slack `w = Mz + q ≥ 0` and an artificial
/// variable driving the unit covering vector. Ties in the minimum-ratio
/// test are broken by smallest basic-variable index (Bland-style) to guard
/// against cycling, preferring the artificial variable so the method stops
/// as soon as it can. Reports:
///
/// * `Solved` when the artificial variable leaves the basis and the
///   extracted point has residual below [`LEMKE_RESIDUAL_TOL`] (scaled by
///   the data norm);
/// * `RayTermination` when the entering column is nonpositive, the classic
///   certificate that complementary pivoting found a secondary ray;
/// * `NotConverged` if the pivot budget is exhausted.
pub fn lemke_solve(p: &ConeVI) -> (DVector<f64>, SolveStatus) {
    let n = p.len();
    let scale = 1.0 + p.q.amax().max(p.m.amax());
    let tol_piv = 1e-11 * scale;
    let solved_tol = LEMKE_RESIDUAL_TOL * scale;

    if n == 0 {
        return (
            DVector::zeros(0),
            SolveStatus {
                outcome: SolveOutcome::Solved,
                iterations: 0,
                residual: 0.0,
            },
        );
    }
    // Trivial case: q ≥ 0 means z = 0 (t = 0) is already complementary.
    if p.q.min() >= 0.0 {
        let t = DVector::zeros(n);
        let residual = vi_residual(p, &t);
        return (
            t,
            SolveStatus {
                outcome: SolveOutcome::Solved,
                iterations: 0,
                residual,
            },
        );
    }

    // Tableau for w − M z − e z0 = q. Columns: w (identity), then z (−M),
    // then z0 (−e), then the right-hand side. Variable indices: w_i = i,
    // z_i = n + i, z0 = 2n.
    let z0 = 2 * n;
    let mut tab = DMatrix::zeros(n, 2 * n + 2);
    for i in 0..n {
        tab[(i, i)] = 1.0;
        for j in 0..n {
            tab[(i, n + j)] = -p.m[(i, j)];
        }
        tab[(i, z0)] = -1.0;
        tab[(i, 2 * n + 1)] = p.q[i];
    }
    let mut basis: Vec<usize> = (0..n).collect();

    let pivot = |tab: &mut DMatrix<f64>, row: usize, col: usize| {
        let piv = tab[(row, col)];
        for j in 0..tab.ncols() {
            tab[(row, j)] /= piv;
        }
        for i in 0..tab.nrows() {
            if i != row {
                let factor = tab[(i, col)];
                if factor != 0.0 {
                    for j in 0..tab.ncols() {
                        tab[(i, j)] -= factor * tab[(row, j)];
                    }
                }
            }
        }
    };

    // Entering pivot: z0 enters at the most negative right-hand side.
    let mut start_row = 0;
    let mut most_negative = 0.0;
    for i in 0..n {
        if tab[(i, 2 * n + 1)] < most_negative {
            most_negative = tab[(i, 2 * n + 1)];
            start_row = i;
        }
    }
    let mut entering = z0;
    let mut leaving_row = start_row;
    let max_pivots = 1000.max(50 * n);
    let mut pivots = 0usize;

    loop {
        pivots += 1;
        let left_var = basis[leaving_row];
        pivot(&mut tab, leaving_row, entering);
        basis[leaving_row] = entering;

        if entering == z0 && pivots > 1 {
            // z0 re-entering cannot happen: it only ever leaves.
            unreachable!("artificial variable cannot re-enter the basis");
        }
        if left_var == z0 {
            break; // solution found
        }
        if pivots >= max_pivots {
            let (t, residual) = extract_solution(p, &tab, &basis, n);
            return (
                t,
                SolveStatus {
                    outcome: SolveOutcome::NotConverged,
                    iterations: pivots,
                    residual,
                },
            );
        }

        // Complementary rule: the complement of the variable that just left.
        entering = if left_var < n { n + left_var } else { left_var - n };

        // Minimum-ratio test over rows with positive pivot column entries.
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            let coef = tab[(i, entering)];
            if coef > tol_piv {
                let ratio = tab[(i, 2 * n + 1)] / coef;
                match best {
                    None => best = Some((ratio, i)),
                    Some((best_ratio, best_row)) => {
                        let tie = (ratio - best_ratio).abs() <= tol_piv * (1.0 + best_ratio.abs());
                        if ratio < best_ratio - tol_piv * (1.0 + best_ratio.abs()) {
                            best = Some((ratio, i));
                        } else if tie {
                            // Prefer dropping z0 (terminates), then the
                            // smallest basic index (anti-cycling).
                            let cur = basis[i];
                            let prev = basis[best_row];
                            if cur == z0 || (prev != z0 && cur < prev) {
                                best = Some((ratio, i));
                            }
                        }
                    }
                }
            }
        }
        match best {
            Some((_, row)) => leaving_row = row,
            None => {
                // Secondary ray: no row blocks the entering variable.
                let (t, residual) = extract_solution(p, &tab, &basis, n);
                return (
                    t,
                    SolveStatus {
                        outcome: SolveOutcome::RayTermination,
                        iterations: pivots,
                        residual,
                    },
                );
            }
        }
    }

    let (t, residual) = extract_solution(p, &tab, &basis, n);
    let outcome = if residual <= solved_tol {
        SolveOutcome::Solved
    } else {
        SolveOutcome::NotConverged
    };
    (
        t,
        SolveStatus {
            outcome,
            iterations: pivots,
            residual,
        },
    )
}

/// Reads `z` off the tableau basis and returns `t = −z` with its residual.
fn extract_solution(
    p: &ConeVI,
    tab: &DMatrix<f64>,
    basis: &[usize],
    n: usize,
) -> (DVector<f64>, f64) {
    let mut z = DVector::zeros(n);
    for (row, &var) in basis.iter().enumerate() {
        if (n..2 * n).contains(&var) {
            z[var - n] = tab[(row, 2 * n + 1)];
        }
    }
    let t = -z;
    let residual = vi_residual(p, &t);
    (t, residual)
}

/// Sample set for [`pseudomonotone_probe`].
#[derive(Debug, Clone)]
pub struct ProbeSamples {
    /// Pairs `(t, τ)` of cone points for the monotonicity quotient.
    pub pairs: Vec<(DVector<f64>, DVector<f64>)>,
    /// Base points of the coercivity rays.
    pub ray_bases: Vec<DVector<f64>>,
    /// Increasing positive scales applied along each ray.
    pub ray_scales: Vec<f64>,
}

/// Finite-sample structure report produced by [`pseudomonotone_probe`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ProbeReport {
    /// Smallest observed `⟨D(t,τ), t−τ⟩ / ⟨t−τ, t−τ⟩` over the sample
    /// pairs; nonnegative for a monotone family.
    pub min_monotonicity_quotient: f64,
    /// Largest output norm over every operator evaluation performed; finite
    /// for an operator bounded on bounded sets.
    pub max_output_norm: f64,
    /// Coercivity quotients `⟨A(s·t), s·t⟩ / ‖s·t‖`, one row per ray base,
    /// one column per scale.
    pub coercivity_quotients: Vec<Vec<f64>>,
}

impl ProbeReport {
    /// True when every coercivity row is strictly increasing in the scale.
    pub fn coercivity_increasing(&self) -> bool {
        self.coercivity_quotients
            .iter()
            .all(|row| row.windows(2).all(|w| w[1] > w[0]))
    }
}

/// Finite-sample probe of operator structure: monotonicity, boundedness on
/// bounded sets, and coercivity trend along rays.
///
/// * `difference(t, τ)` must return the operator difference to pair with
///   `t − τ`: for a plain map `F` that is `F(t) − F(τ)`; for a two-slot
///   family it is the frozen-first-slot difference `𝒜(t,t) − 𝒜(t,τ)`.
/// * `apply(t)` evaluates the operator itself (used for boundedness and
///   coercivity).
/// * `inner(x, y)` is the duality pairing defining the norms in the
///   quotients (Euclidean for plain matrix operators, a discrete dual
///   pairing for boundary operators).
///
/// The probe is diagnostic: it never fails, it reports what it saw.
pub fn pseudomonotone_probe<D, A, IP>(
    difference: D,
    apply: A,
    inner: IP,
    samples: &ProbeSamples,
) -> ProbeReport
where
    D: Fn(&DVector<f64>, &DVector<f64>) -> DVector<f64>,
    A: Fn(&DVector<f64>) -> DVector<f64>,
    IP: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    let mut min_quotient = f64::INFINITY;
    let mut max_norm: f64 = 0.0;
    for (t, tau) in &samples.pairs {
        let diff = difference(t, tau);
        let step = t - tau;
        let denom = inner(&step, &step);
        if denom > 0.0 {
            min_quotient = min_quotient.min(inner(&diff, &step) / denom);
        }
        let out = apply(t);
        max_norm = max_norm.max(inner(&out, &out).max(0.0).sqrt());
    }
    let mut coercivity = Vec::with_capacity(samples.ray_bases.len());
    for base in &samples.ray_bases {
        let mut row = Vec::with_capacity(samples.ray_scales.len());
        for &s in &samples.ray_scales {
            let point = base * s;
            let image = apply(&point);
            let norm = inner(&point, &point).max(0.0).sqrt();
            if norm > 0.0 {
                row.push(inner(&image, &point) / norm);
            }
            max_norm = max_norm.max(inner(&image, &image).max(0.0).sqrt());
        }
        coercivity.push(row);
    }
    if min_quotient == f64::INFINITY {
        min_quotient = 0.0;
    }
    ProbeReport {
        min_monotonicity_quotient: min_quotient,
        max_output_norm: max_norm,
        coercivity_quotients: coercivity,
    }
}
