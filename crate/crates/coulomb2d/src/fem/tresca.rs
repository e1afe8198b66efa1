//! Inner nonsmooth minimization on the condensed contact system.
//!
//! The problem solved here is
//!
//! ```text
//! min_z  ½ zᵀS z − r̂ᵀz + Σ_c ŵ_c (θ⁺_c ⟨y_c⟩₊ + θ⁻_c ⟨y_c⟩₋)
//! s.t.   z_n(c) ≤ g_c          (only in unilateral mode)
//! where  y_c = z_t(c) − w_c − α_c (z_n(c) − g_c),
//! ```
//!
//! with `S` the condensed SPD contact operator, `ŵ` the lumped boundary
//! weights and `θ± ≥ 0` given slip thresholds (θ⁺ = θ⁻ for isotropic
//! friction). The kinks are smoothed by `|y| ≈ √(y² + ε²)` and `ε` is
//! driven from 1e−2 down to 1e−8 with a projected Newton method; a final
//! active-set polish solves the exact piecewise-linear optimality system,
//! so converged solutions satisfy the unsmoothed conditions to near
//! machine precision.

use super::data::FemError;
use nalgebra::{DMatrix, DVector};

/// Smoothing schedule of the continuation, from coarse to the final level.
pub const EPSILON_LEVELS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Friction state of a contact node at the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrictionClass {
    /// Slip variable at the kink (`y = 0`), force inside the threshold.
    Stick,
    /// `y > 0`, force pinned at `−ŵ θ⁺`.
    SlipPlus,
    /// `y < 0`, force pinned at `+ŵ θ⁻`.
    SlipMinus,
}

/// Condensed nonsmooth problem data (all per contact node, chain order).
pub struct CondensedProblem {
    /// Threshold on positive slip, traction units, `≥ 0`.
    pub theta_plus: Vec<f64>,
    /// Threshold on negative slip, traction units, `≥ 0`.
    pub theta_minus: Vec<f64>,
    /// Obliquity coefficients (zeros for isotropic friction).
    pub alpha: Vec<f64>,
    /// Reference tangential displacement (previous step).
    pub w_t: Vec<f64>,
    /// Obstacle gap.
    pub gap: Vec<f64>,
    /// Enforce `z_n ≤ g` when true; otherwise unconstrained.
    pub unilateral: bool,
}

/// Converged condensed solution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrescaSolution {
    /// Contact displacements in local frames (tangent `2c`, normal `2c+1`).
    pub z: DVector<f64>,
    /// `S z − r̂`: lumped contact reaction forces (local frames).
    pub rho: DVector<f64>,
    /// Friction classification per node.
    pub class: Vec<FrictionClass>,
    /// Gap-constraint activity per node.
    pub active: Vec<bool>,
    /// Total Newton iterations over all smoothing levels.
    pub newton_iterations: usize,
    /// Reclassification rounds of the exact polish.
    pub polish_rounds: usize,
    /// Worst optimality violation of the accepted exact solution
    /// (force units).
    pub residual: f64,
}

struct Workspace<'p> {
    s: &'p DMatrix<f64>,
    r_hat: &'p DVector<f64>,
    p: &'p CondensedProblem,
    m: usize,
    /// ŵ_c (θ⁺ + θ⁻)/2: symmetric part of the lumped threshold.
    wth_s: Vec<f64>,
    /// ŵ_c (θ⁺ − θ⁻)/2: antisymmetric part.
    wth_a: Vec<f64>,
    force_scale: f64,
    slip_scale: f64,
}

impl<'p> Workspace<'p> {
    fn y(&self, z: &DVector<f64>, c: usize) -> f64 {
        z[2 * c] - self.p.w_t[c] - self.p.alpha[c] * (z[2 * c + 1] - self.p.gap[c])
    }

    fn objective(&self, z: &DVector<f64>, eps: f64) -> f64 {
        let mut val = 0.5 * (self.s * z).dot(z) - self.r_hat.dot(z);
        for c in 0..self.m {
            let y = self.y(z, c);
            val += self.wth_s[c] * y.hypot(eps) + self.wth_a[c] * y;
        }
        val
    }

    fn gradient(&self, z: &DVector<f64>, eps: f64) -> DVector<f64> {
        let mut g = self.s * z - self.r_hat;
        for c in 0..self.m {
            let y = self.y(z, c);
            let dphi = self.wth_s[c] * y / y.hypot(eps) + self.wth_a[c];
            g[2 * c] += dphi;
            g[2 * c + 1] -= self.p.alpha[c] * dphi;
        }
        g
    }
}

/// Solves the condensed problem. `z0` seeds the iteration when given.
pub fn solve_condensed(
    s: &DMatrix<f64>,
    r_hat: &DVector<f64>,
    weights: &[f64],
    problem: &CondensedProblem,
    z0: Option<&DVector<f64>>,
) -> Result<TrescaSolution, FemError> {
    let m = weights.len();
    assert_eq!(s.nrows(), 2 * m);
    assert_eq!(r_hat.len(), 2 * m);
    for field in [
        &problem.theta_plus,
        &problem.theta_minus,
        &problem.alpha,
        &problem.w_t,
        &problem.gap,
    ] {
        assert_eq!(field.len(), m, "condensed problem field length mismatch");
    }
    if m == 0 {
        return Ok(TrescaSolution {
            z: DVector::zeros(0),
            rho: DVector::zeros(0),
            class: Vec::new(),
            active: Vec::new(),
            newton_iterations: 0,
            polish_rounds: 0,
            residual: 0.0,
        });
    }
    for c in 0..m {
        if !(problem.theta_plus[c] >= 0.0 && problem.theta_minus[c] >= 0.0) {
            return Err(FemError::InvalidThreshold(format!(
                "negative or NaN slip threshold at contact node {c}"
            )));
        }
    }

    let wth_s: Vec<f64> = (0..m)
        .map(|c| 0.5 * weights[c] * (problem.theta_plus[c] + problem.theta_minus[c]))
        .collect();
    let wth_a: Vec<f64> = (0..m)
        .map(|c| 0.5 * weights[c] * (problem.theta_plus[c] - problem.theta_minus[c]))
        .collect();
    let force_scale = 1.0
        + r_hat.amax()
        + wth_s
            .iter()
            .zip(&wth_a)
            .map(|(a, b)| a.abs() + b.abs())
            .fold(0.0, f64::max);
    let slip_scale = 1.0
        + problem
            .w_t
            .iter()
            .chain(&problem.gap)
            .map(|v| v.abs())
            .fold(0.0, f64::max);
    let ws = Workspace {
        s,
        r_hat,
        p: problem,
        m,
        wth_s,
        wth_a,
        force_scale,
        slip_scale,
    };

    // Feasible start: zero slip, gap-saturated normal position.
    let mut z = match z0 {
        Some(seed) => {
            let mut z = seed.clone();
            if problem.unilateral {
                for c in 0..m {
                    z[2 * c + 1] = z[2 * c + 1].min(problem.gap[c]);
                }
            }
            z
        }
        None => {
            let mut z = DVector::zeros(2 * m);
            for c in 0..m {
                let zn = if problem.unilateral {
                    problem.gap[c].min(0.0)
                } else {
                    0.0
                };
                z[2 * c + 1] = zn;
                z[2 * c] = problem.w_t[c] + problem.alpha[c] * (zn - problem.gap[c]);
            }
            z
        }
    };
    let mut active = vec![false; m];
    if problem.unilateral {
        for c in 0..m {
            active[c] = z[2 * c + 1] >= problem.gap[c] - 1e-14 * ws.slip_scale;
        }
    }

    let tol_grad = 1e-11 * force_scale;
    let mut newton_total = 0usize;
    for &eps in EPSILON_LEVELS.iter() {
        let tol_level = tol_grad.max(1e-3 * eps * force_scale);
        newton_total += newton_at_level(&ws, &mut z, &mut active, eps, tol_level)?;
    }

    polish(&ws, z, active, newton_total)
}

/// Projected Newton at one smoothing level. Returns iterations used.
fn newton_at_level(
    ws: &Workspace,
    z: &mut DVector<f64>,
    active: &mut [bool],
    eps: f64,
    tol: f64,
) -> Result<usize, FemError> {
    let m = ws.m;
    let unilateral = ws.p.unilateral;
    let max_iterations = 200;
    for iter in 0..max_iterations {
        let g = ws.gradient(z, eps);
        // Projected-gradient optimality measure and constraint multipliers.
        let mut pg: f64 = 0.0;
        let mut worst_release: Option<(usize, f64)> = None;
        for c in 0..m {
            pg = pg.max(g[2 * c].abs());
            if unilateral && active[c] {
                // multiplier λ = −g_n must be ≥ 0
                let violation = g[2 * c + 1];
                pg = pg.max(violation.max(0.0));
                if violation > tol {
                    let cand = (c, violation);
                    if worst_release.map_or(true, |(_, v)| cand.1 > v) {
                        worst_release = Some(cand);
                    }
                }
            } else {
                pg = pg.max(g[2 * c + 1].abs());
            }
        }
        if pg <= tol {
            return Ok(iter);
        }
        if let Some((c, _)) = worst_release {
            active[c] = false;
            continue;
        }

        // Newton system: smooth Hessian with active normal dofs pinned.
        let mut h = ws.s.clone();
        for c in 0..m {
            let y = ws.y(z, c);
            let den = y.hypot(eps);
            let curv = ws.wth_s[c] * eps * eps / (den * den * den);
            let a = ws.p.alpha[c];
            h[(2 * c, 2 * c)] += curv;
            h[(2 * c, 2 * c + 1)] -= a * curv;
            h[(2 * c + 1, 2 * c)] -= a * curv;
            h[(2 * c + 1, 2 * c + 1)] += a * a * curv;
        }
        let mut rhs = -g.clone();
        for c in 0..m {
            if !unilateral {
                continue;
            }
            let row = 2 * c + 1;
            if active[c] {
                for j in 0..2 * m {
                    h[(row, j)] = 0.0;
                    h[(j, row)] = 0.0;
                }
                h[(row, row)] = 1.0;
                rhs[row] = 0.0;
            } else if z[row] >= ws.p.gap[c] - 1e-10 * ws.slip_scale {
                // Two-metric projection: a normal dof sitting on (or within
                // rounding of) its bound takes a decoupled steepest-descent
                // direction. The coupled Newton direction can press such a
                // dof back onto the bound it was just released from, which
                // deadlocks the active-set loop; the diagonal direction
                // always escapes when the multiplier has the wrong sign.
                let diag = h[(row, row)];
                for j in 0..2 * m {
                    h[(row, j)] = 0.0;
                    h[(j, row)] = 0.0;
                }
                h[(row, row)] = diag;
            }
        }
        let d = match h.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => h
                .lu()
                .solve(&rhs)
                .ok_or(FemError::InnerNotConverged { residual: pg })?,
        };

        // Backtracking along the projected arc: the trial is clamped to the
        // bounds before the sufficient-decrease test, so one direction
        // component pressing on a touching bound cannot block the rest.
        let f0 = ws.objective(z, eps);
        let mut step = 1.0f64;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = &*z + step * &d;
            if unilateral {
                for c in 0..m {
                    if trial[2 * c + 1] > ws.p.gap[c] {
                        trial[2 * c + 1] = ws.p.gap[c];
                    }
                }
            }
            let decrease = g.dot(&(&trial - &*z));
            if decrease < 0.0 && ws.objective(&trial, eps) <= f0 + 1e-4 * decrease {
                *z = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No strict descent along the projected arc. Either the whole
            // direction presses on bounds — activate those nodes — or the
            // gradient is below the resolution of the objective and the
            // level is done.
            let mut activated = false;
            if unilateral {
                for c in 0..m {
                    if !active[c]
                        && d[2 * c + 1] > 0.0
                        && z[2 * c + 1] >= ws.p.gap[c] - 1e-12 * ws.slip_scale
                    {
                        z[2 * c + 1] = ws.p.gap[c];
                        active[c] = true;
                        activated = true;
                    }
                }
            }
            if activated {
                continue;
            }
            return Ok(iter + 1);
        }
        if unilateral {
            for c in 0..m {
                if !active[c] && z[2 * c + 1] >= ws.p.gap[c] - 1e-12 * ws.slip_scale {
                    z[2 * c + 1] = ws.p.gap[c];
                    active[c] = true;
                }
            }
        }
    }
    // Budget exhausted. Near the level tolerance the Armijo test compares
    // objective differences at the rounding floor and can accept noise
    // steps indefinitely; the iterate still classifies the kinks, and the
    // polish stage certifies (or rejects) the exact optimality system, so
    // hand it on rather than fail here.
    Ok(max_iterations)
}

/// Solves the exact (ε = 0) optimality system for a fixed classification,
/// verifies the sign conditions and reclassifies until consistent.
fn polish(
    ws: &Workspace,
    z_smooth: DVector<f64>,
    active_smooth: Vec<bool>,
    newton_iterations: usize,
) -> Result<TrescaSolution, FemError> {
    let m = ws.m;
    let eps_last = *EPSILON_LEVELS.last().expect("nonempty schedule");

    // Initial classification from the last smoothed solution: the ratio
    // y/|y|_ε is the position inside the subdifferential.
    let mut class = vec![FrictionClass::Stick; m];
    for c in 0..m {
        let y = ws.y(&z_smooth, c);
        let ratio = y / y.hypot(eps_last);
        let has_threshold = ws.wth_s[c] > 1e-300;
        class[c] = if has_threshold && ratio > 1.0 - 1e-6 {
            FrictionClass::SlipPlus
        } else if has_threshold && ratio < -(1.0 - 1e-6) {
            FrictionClass::SlipMinus
        } else if has_threshold {
            FrictionClass::Stick
        } else {
            // No kink: both branches carry the same linear force.
            FrictionClass::SlipPlus
        };
    }
    let mut active = active_smooth;
    if !ws.p.unilateral {
        active.iter_mut().for_each(|a| *a = false);
    }

    let tol_f = 1e-10 * ws.force_scale;
    let tol_y = 1e-10 * ws.slip_scale;
    let max_rounds = 80;
    let mut best: Option<(f64, DVector<f64>, Vec<FrictionClass>, Vec<bool>)> = None;
    let mut seen: std::collections::BTreeSet<Vec<u8>> = std::collections::BTreeSet::new();

    for round in 0..max_rounds {
        let key: Vec<u8> = class
            .iter()
            .zip(&active)
            .map(|(k, &a)| {
                (match k {
                    FrictionClass::Stick => 0u8,
                    FrictionClass::SlipPlus => 1,
                    FrictionClass::SlipMinus => 2,
                }) | if a { 4 } else { 0 }
            })
            .collect();
        let repeated = !seen.insert(key);

        let z = solve_classified(ws, &class, &active)?;
        let rho = ws.s * &z - ws.r_hat;
        let (violation, flips) = verify_classification(ws, &z, &rho, &class, &active, tol_f, tol_y);

        if best.as_ref().map_or(true, |(v, ..)| violation < *v) {
            best = Some((violation, z.clone(), class.clone(), active.clone()));
        }
        if flips.is_empty() {
            return Ok(TrescaSolution {
                rho,
                z,
                class,
                active,
                newton_iterations,
                polish_rounds: round + 1,
                residual: violation,
            });
        }
        if repeated {
            break;
        }
        for (c, new_class, new_active) in flips {
            class[c] = new_class;
            active[c] = new_active;
        }
    }

    // Cycles are theoretically excluded for SPD S but guard anyway: accept
    // the best configuration if its violation is small, else report.
    let (violation, z, class, active) = best.expect("at least one polish round ran");
    if violation <= 1e-8 * ws.force_scale.max(ws.slip_scale) {
        let rho = ws.s * &z - ws.r_hat;
        Ok(TrescaSolution {
            rho,
            z,
            class,
            active,
            newton_iterations,
            polish_rounds: max_rounds,
            residual: violation,
        })
    } else {
        Err(FemError::InnerNotConverged {
            residual: violation,
        })
    }
}

/// Exact linear optimality system for a fixed classification.
fn solve_classified(
    ws: &Workspace,
    class: &[FrictionClass],
    active: &[bool],
) -> Result<DVector<f64>, FemError> {
    let m = ws.m;
    let mut p = DMatrix::zeros(2 * m, 2 * m);
    let mut q = DVector::zeros(2 * m);
    let slip_force = |c: usize, k: FrictionClass| -> f64 {
        // dD/dy on the slip branch: +ŵθ⁺ for positive slip, −ŵθ⁻ for
        // negative slip.
        match k {
            FrictionClass::SlipPlus => ws.wth_s[c] + ws.wth_a[c],
            FrictionClass::SlipMinus => ws.wth_a[c] - ws.wth_s[c],
            FrictionClass::Stick => unreachable!("stick has no fixed slip force"),
        }
    };
    for c in 0..m {
        let a = ws.p.alpha[c];
        let (rt, rn) = (2 * c, 2 * c + 1);
        match class[c] {
            FrictionClass::Stick => {
                // y_c = 0
                p[(rt, rt)] = 1.0;
                p[(rt, rn)] = -a;
                q[rt] = ws.p.w_t[c] - a * ws.p.gap[c];
            }
            k => {
                // (Sz − r̂)_t + dD/dy = 0
                for j in 0..2 * m {
                    p[(rt, j)] = ws.s[(rt, j)];
                }
                q[rt] = ws.r_hat[rt] - slip_force(c, k);
            }
        }
        if active[c] {
            p[(rn, rn)] = 1.0;
            q[rn] = ws.p.gap[c];
        } else {
            match class[c] {
                FrictionClass::Stick => {
                    // (Sz − r̂)_n + α(Sz − r̂)_t = 0: the stick force is
                    // eliminated between the two stationarity equations.
                    for j in 0..2 * m {
                        p[(rn, j)] = ws.s[(rn, j)] + a * ws.s[(rt, j)];
                    }
                    q[rn] = ws.r_hat[rn] + a * ws.r_hat[rt];
                }
                k => {
                    // (Sz − r̂)_n − α·dD/dy = 0
                    for j in 0..2 * m {
                        p[(rn, j)] = ws.s[(rn, j)];
                    }
                    q[rn] = ws.r_hat[rn] + a * slip_force(c, k);
                }
            }
        }
    }
    p.clone()
        .lu()
        .solve(&q)
        .or_else(|| p.full_piv_lu().solve(&q))
        .ok_or(FemError::InnerNotConverged { residual: f64::NAN })
}

/// Checks the sign conditions of a classified solution; returns the worst
/// violation and the list of nodes to reclassify.
#[allow(clippy::type_complexity)]
fn verify_classification(
    ws: &Workspace,
    z: &DVector<f64>,
    rho: &DVector<f64>,
    class: &[FrictionClass],
    active: &[bool],
    tol_f: f64,
    tol_y: f64,
) -> (f64, Vec<(usize, FrictionClass, bool)>) {
    let m = ws.m;
    let mut worst: f64 = 0.0;
    let mut flips = Vec::new();
    for c in 0..m {
        let y = ws.y(z, c);
        let mut new_class = class[c];
        let mut new_active = active[c];
        // Friction force F_y = dD/dy demanded by tangential equilibrium.
        let f_y = -rho[2 * c];
        let upper = ws.wth_a[c] + ws.wth_s[c];
        let lower = ws.wth_a[c] - ws.wth_s[c];
        match class[c] {
            FrictionClass::Stick => {
                if f_y > upper + tol_f {
                    worst = worst.max(f_y - upper);
                    new_class = FrictionClass::SlipPlus;
                } else if f_y < lower - tol_f {
                    worst = worst.max(lower - f_y);
                    new_class = FrictionClass::SlipMinus;
                }
            }
            FrictionClass::SlipPlus => {
                if ws.wth_s[c] > 1e-300 && y < -tol_y {
                    worst = worst.max(-y / ws.slip_scale * ws.force_scale);
                    new_class = FrictionClass::Stick;
                }
            }
            FrictionClass::SlipMinus => {
                if ws.wth_s[c] > 1e-300 && y > tol_y {
                    worst = worst.max(y / ws.slip_scale * ws.force_scale);
                    new_class = FrictionClass::Stick;
                }
            }
        }
        if ws.p.unilateral {
            let force_y = match new_class {
                FrictionClass::Stick => f_y,
                FrictionClass::SlipPlus => upper,
                FrictionClass::SlipMinus => lower,
            };
            if active[c] {
                // Gap multiplier λ = α·F_y − ρ_n must be ≥ 0.
                let lambda = ws.p.alpha[c] * force_y - rho[2 * c + 1];
                if lambda < -tol_f {
                    worst = worst.max(-lambda);
                    new_active = false;
                }
            } else {
                let penetration = z[2 * c + 1] - ws.p.gap[c];
                if penetration > tol_y {
                    worst = worst.max(penetration / ws.slip_scale * ws.force_scale);
                    new_active = true;
                }
            }
        }
        if new_class != class[c] || new_active != active[c] {
            flips.push((c, new_class, new_active));
        }
    }
    (worst, flips)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spd2() -> DMatrix<f64> {
        // 1 contact node: tangent/normal, mildly coupled.
        DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5])
    }

    fn base_problem() -> CondensedProblem {
        CondensedProblem {
            theta_plus: vec![0.0],
            theta_minus: vec![0.0],
            alpha: vec![0.0],
            w_t: vec![0.0],
            gap: vec![0.0],
            unilateral: false,
        }
    }

    #[test]
    fn frictionless_unconstrained_is_a_linear_solve() {
        let s = spd2();
        let r = DVector::from_row_slice(&[1.0, -0.5]);
        let sol = solve_condensed(&s, &r, &[1.0], &base_problem(), None).unwrap();
        let exact = s.clone().lu().solve(&r).unwrap();
        assert_abs_diff_eq!(sol.z[0], exact[0], epsilon = 1e-12);
        assert_abs_diff_eq!(sol.z[1], exact[1], epsilon = 1e-12);
        assert!(sol.rho.amax() < 1e-12);
    }

    #[test]
    fn unilateral_contact_activates_and_reacts_compressively() {
        let s = spd2();
        // Pull the normal dof toward the obstacle (positive normal load).
        let r = DVector::from_row_slice(&[0.0, 2.0]);
        let mut p = base_problem();
        p.unilateral = true;
        let sol = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        assert!(sol.active[0]);
        assert_abs_diff_eq!(sol.z[1], 0.0, epsilon = 1e-14);
        // Reaction ρ_n = t_n·ŵ must be compressive (negative).
        assert!(sol.rho[1] < 0.0);
        assert_abs_diff_eq!(sol.rho[1], -2.0 + 0.3 * sol.z[0], epsilon = 1e-10);
    }

    #[test]
    fn separation_leaves_zero_reaction() {
        let s = spd2();
        // Load pushes away from the obstacle.
        let r = DVector::from_row_slice(&[0.0, -1.0]);
        let mut p = base_problem();
        p.unilateral = true;
        let sol = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        assert!(!sol.active[0]);
        assert!(sol.z[1] < 0.0);
        assert!(sol.rho.amax() < 1e-10);
    }

    #[test]
    fn large_threshold_forces_stick() {
        let s = spd2();
        let r = DVector::from_row_slice(&[1.0, 0.0]);
        let mut p = base_problem();
        p.theta_plus = vec![1e12];
        p.theta_minus = vec![1e12];
        p.w_t = vec![0.25];
        let sol = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        assert_eq!(sol.class[0], FrictionClass::Stick);
        assert_abs_diff_eq!(sol.z[0], 0.25, epsilon = 1e-9);
    }

    #[test]
    fn slip_occurs_when_threshold_is_exceeded_and_force_sits_on_it() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let r = DVector::from_row_slice(&[2.0, 0.0]);
        let mut p = base_problem();
        p.theta_plus = vec![0.5];
        p.theta_minus = vec![0.5];
        let sol = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        assert_eq!(sol.class[0], FrictionClass::SlipPlus);
        // Optimality: z + θ = r → z = 1.5, friction force −θ.
        assert_abs_diff_eq!(sol.z[0], 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.rho[0], -0.5, epsilon = 1e-12);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn negative_threshold_is_rejected() {
        let s = spd2();
        let r = DVector::zeros(2);
        let mut p = base_problem();
        p.theta_plus = vec![-1.0];
        let err = solve_condensed(&s, &r, &[1.0], &p, None).unwrap_err();
        assert!(matches!(err, FemError::InvalidThreshold(_)));
    }

    #[test]
    fn oblique_thresholds_shift_the_kink() {
        // One node, identity S, oblique α: check that the solution
        // satisfies the asymmetric force bounds exactly.
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let r = DVector::from_row_slice(&[3.0, 0.5]);
        let p = CondensedProblem {
            theta_plus: vec![0.8],
            theta_minus: vec![1.2],
            alpha: vec![0.2],
            w_t: vec![0.0],
            gap: vec![0.1],
            unilateral: true,
        };
        let sol = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        let y = sol.z[0] - p.w_t[0] - p.alpha[0] * (sol.z[1] - p.gap[0]);
        match sol.class[0] {
            FrictionClass::SlipPlus => {
                assert!(y > 0.0);
                assert_abs_diff_eq!(-sol.rho[0], 0.8, epsilon = 1e-10);
            }
            FrictionClass::SlipMinus => {
                assert!(y < 0.0);
                assert_abs_diff_eq!(sol.rho[0], 1.2, epsilon = 1e-10);
            }
            FrictionClass::Stick => {
                assert!(-sol.rho[0] <= 0.8 + 1e-10 && sol.rho[0] <= 1.2 + 1e-10);
            }
        }
        assert!(sol.z[1] <= p.gap[0] + 1e-12);
    }

    #[test]
    fn warm_start_at_the_solution_converges_immediately_to_it() {
        let s = spd2();
        let r = DVector::from_row_slice(&[1.0, 2.0]);
        let mut p = base_problem();
        p.unilateral = true;
        p.theta_plus = vec![0.3];
        p.theta_minus = vec![0.3];
        let cold = solve_condensed(&s, &r, &[1.0], &p, None).unwrap();
        let warm = solve_condensed(&s, &r, &[1.0], &p, Some(&cold.z)).unwrap();
        assert_abs_diff_eq!(warm.z[0], cold.z[0], epsilon = 1e-13);
        assert_abs_diff_eq!(warm.z[1], cold.z[1], epsilon = 1e-13);
    }
}
