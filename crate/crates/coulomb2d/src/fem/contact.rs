//! Incremental contact solves on a triangulated body.
//!
//! The central routine is [`solve_contact_step`]: a fixed-point iteration
//! on the normal traction. Each pass solves a convex given-threshold
//! friction problem with the unilateral constraint (via
//! [`solve_tresca`]); the converged reaction updates the slip threshold
//! `−f·t_n` until the traction stops moving in the energy dual norm.
//!
//! Anisotropic coupling is handled in oblique components: the iterate
//! becomes `t₁ = t_n + α·t_t`, slips are measured by
//! `y = (u_t − w_t) − α·(u_n − g)`, and the one-sided slip thresholds pick
//! up the factors `1/(1 ± α f)`. This requires `f·|α| < 1` with positive
//! margin; [`friction_condition_check`] reports that margin.

use super::assembly::{assemble_load, ModulusField};
use super::data::{BoundaryField, ContactData, FemError, FieldFlavor};
use super::mesh::DomainMesh;
use super::system::{CondensedLoad, FemContext};
use super::tresca::{solve_condensed, CondensedProblem, FrictionClass, TrescaSolution};
use crate::halfspace::boundary_alpha;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Relative tolerance of the fixed-point stop criterion
/// `‖t_{k+1} − t_k‖_* < tol·(1 + ‖t_k‖_*)`.
pub const FIXED_POINT_TOL: f64 = 1e-10;
/// A warm-started step is returned unchanged when the previous state
/// satisfies the new step's optimality conditions below this bound.
pub const WARM_START_KKT_TOL: f64 = 1e-9;
/// Slack allowed when checking that a traction lies in the nonpositive
/// cone (absorbs roundoff of upstream computations).
pub const CONE_TOL: f64 = 1e-12;

/// Contact traces of a solution at the contact nodes (chain order, local
/// frames): displacement and traction components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactTraces {
    pub u_n: Vec<f64>,
    pub u_t: Vec<f64>,
    pub t_n: Vec<f64>,
    pub t_t: Vec<f64>,
}

/// State of a contact node in the converged step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactState {
    /// Gap open, zero traction.
    Separation,
    /// In contact without dissipative slip (includes frictionless
    /// contact, where no slip threshold exists).
    Stick,
    /// Dissipative slip with positive slip variable.
    SlipPlus,
    /// Dissipative slip with negative slip variable.
    SlipMinus,
}

impl ContactState {
    pub fn label(&self) -> &'static str {
        match self {
            ContactState::Separation => "separation",
            ContactState::Stick => "stick",
            ContactState::SlipPlus => "slip+",
            ContactState::SlipMinus => "slip-",
        }
    }
}

/// Maximum violations of the complementarity system, by condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `⟨u_n − g⟩₊` (oblique: on `u¹`).
    pub gap: f64,
    /// `⟨t_n⟩₊` (oblique: on `t₁`).
    pub sign: f64,
    /// `|t_n·(u_n − g)|`.
    pub complementarity: f64,
    /// Distance of the tangential traction outside the friction cone.
    pub cone: f64,
    /// Slip-weighted distance to the sliding branch of the law.
    pub alignment: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.gap
            .max(self.sign)
            .max(self.complementarity)
            .max(self.cone)
            .max(self.alignment)
    }
}

/// Convergence report of one inner given-threshold solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrescaReport {
    pub newton_iterations: usize,
    pub polish_rounds: usize,
    /// Worst optimality violation, force units.
    pub residual: f64,
    /// Elastic energy minus load potential of the returned field.
    pub energy: f64,
}

/// How the incremental step treats anisotropic friction coupling.
#[derive(Debug, Clone, PartialEq)]
pub enum StepMode {
    /// No coupling: `α ≡ 0`.
    Isotropic,
    /// `α` computed per contact node from the local surface response of
    /// the node-averaged modulus in the node's tangent direction.
    Oblique,
    /// `α` supplied by the caller (testing and cross-checks).
    ObliqueWithAlpha(Vec<f64>),
}

/// Options of the fixed-point driver.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOptions {
    pub tol: f64,
    pub max_outer: usize,
    /// Damping θ ∈ (0, 1] of the traction update.
    pub damping: f64,
    /// Initial normal traction (defaults to zero).
    pub t0: Option<Vec<f64>>,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            tol: FIXED_POINT_TOL,
            max_outer: 200,
            damping: 1.0,
            t0: None,
        }
    }
}

/// Report of a converged incremental step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub outer_iterations: usize,
    /// Dual-norm change of the traction iterate, per outer iteration.
    pub residual_history: Vec<f64>,
    pub kkt: KktReport,
    /// Friction dissipation of the step (nonnegative).
    pub dissipation: f64,
    /// Elastic energy minus load potential of the displacement.
    pub energy: f64,
    /// True when the previous state already solved this step and was
    /// returned unchanged.
    pub warm_started: bool,
}

/// Converged incremental step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSolution {
    /// Nodal displacements (global frame; clamped nodes are zero).
    pub u: Vec<[f64; 2]>,
    /// The fixed-point traction: `t_n` in isotropic mode, `t₁` in oblique
    /// mode. Nonpositive.
    pub t: BoundaryField,
    pub traces: ContactTraces,
    pub states: Vec<ContactState>,
    pub report: StepReport,
}

/// Scalar state fed to [`friction_law_check`]. `u_t` is the tangential
/// slip of the step (relative to the previous tangential trace).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionLawState {
    pub t_n: f64,
    pub t_t: f64,
    pub u_n: f64,
    pub u_t: f64,
    pub friction: f64,
    pub alpha: f64,
    pub gap: f64,
}

/// Outcome of evaluating the two equivalent forms of the friction law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrictionLawReport {
    /// Signorini–Coulomb conditions in physical components.
    pub holds_physical: bool,
    /// The same conditions in oblique components.
    pub holds_oblique: bool,
}

impl FrictionLawReport {
    pub fn agree(&self) -> bool {
        self.holds_physical == self.holds_oblique
    }
}

/// Margin `1 − max_c f_c·|α_c|` of the friction–anisotropy smallness
/// condition. Positive margin is required by the oblique theory.
pub fn friction_condition_check(friction: &[f64], alpha: &[f64]) -> f64 {
    assert_eq!(friction.len(), alpha.len(), "field length mismatch");
    1.0 - friction
        .iter()
        .zip(alpha)
        .map(|(f, a)| f * a.abs())
        .fold(0.0, f64::max)
}

/// Direction of the oblique-component change of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObliqueDirection {
    ToOblique,
    FromOblique,
}

/// Converts a (normal, tangential) field pair to oblique components and
/// back, nodewise. Displacements map as `u¹ = u_n`, `u² = u_t − α·u_n`;
/// tractions as `t₁ = t_n + α·t_t`, `t₂ = t_t`, so the duality pairing
/// `t_n u_n + t_t u_t = t₁u¹ + t₂u²` is preserved exactly.
pub fn oblique_components(
    normal: &BoundaryField,
    tangential: &BoundaryField,
    alpha: &[f64],
    direction: ObliqueDirection,
) -> Result<(BoundaryField, BoundaryField), FemError> {
    if normal.flavor != tangential.flavor {
        return Err(FemError::InvalidData(
            "oblique components need a pair of the same flavor".into(),
        ));
    }
    let n = normal.values.len();
    if tangential.values.len() != n || alpha.len() != n {
        return Err(FemError::InvalidData(
            "oblique components need fields of equal length".into(),
        ));
    }
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for c in 0..n {
        let (vn, vt, a) = (normal.values[c], tangential.values[c], alpha[c]);
        let (f, s) = match (normal.flavor, direction) {
            (FieldFlavor::Displacement, ObliqueDirection::ToOblique) => (vn, vt - a * vn),
            (FieldFlavor::Displacement, ObliqueDirection::FromOblique) => (vn, vt + a * vn),
            (FieldFlavor::TractionDensity, ObliqueDirection::ToOblique) => (vn + a * vt, vt),
            (FieldFlavor::TractionDensity, ObliqueDirection::FromOblique) => (vn - a * vt, vt),
        };
        first.push(f);
        second.push(s);
    }
    Ok((
        BoundaryField {
            values: first,
            flavor: normal.flavor,
        },
        BoundaryField {
            values: second,
            flavor: normal.flavor,
        },
    ))
}

/// Evaluates the pointwise friction law in both its physical and oblique
/// forms and reports whether each holds (within a relative tolerance) —
/// the two must agree whenever `f·|α| < 1`.
pub fn friction_law_check(state: &FrictionLawState) -> Result<FrictionLawReport, FemError> {
    let FrictionLawState {
        t_n,
        t_t,
        u_n,
        u_t,
        friction: f,
        alpha,
        gap: g,
    } = *state;
    if !(f >= 0.0) {
        return Err(FemError::InvalidData(format!(
            "friction coefficient {f} is negative"
        )));
    }
    let margin = 1.0 - f * alpha.abs();
    if !(margin > 0.0) {
        return Err(FemError::FrictionConditionViolated { margin });
    }

    let scale = 1.0 + t_n.abs() + t_t.abs();
    let slip_scale = 1.0 + u_n.abs() + u_t.abs() + g.abs();
    let tol = 1e-12 * scale;
    let tol_slip = 1e-12 * slip_scale;
    let tol_prod = 1e-12 * scale * slip_scale;

    // Physical components: Signorini on (u_n, t_n), Coulomb cone on t_t,
    // sliding force opposing the slip.
    let mut physical = u_n <= g + tol_slip
        && t_n <= tol
        && (t_n * (u_n - g)).abs() <= tol_prod
        && t_t.abs() <= -f * t_n + tol;
    if u_t.abs() > tol_slip && (t_t - f * t_n * u_t.signum()).abs() > tol {
        physical = false;
    }

    // Oblique components.
    let t1 = t_n + alpha * t_t;
    let t2 = t_t;
    let y = u_t - alpha * (u_n - g);
    let low = f * t1 / (1.0 + alpha * f);
    let high = -f * t1 / (1.0 - alpha * f);
    let mut oblique = u_n <= g + tol_slip
        && t1 <= tol
        && (t1 * (u_n - g)).abs() <= tol_prod
        && t2 >= low - tol
        && t2 <= high + tol;
    if y > tol_slip && (t2 - low).abs() > tol {
        oblique = false;
    }
    if y < -tol_slip && (t2 - high).abs() > tol {
        oblique = false;
    }

    Ok(FrictionLawReport {
        holds_physical: physical,
        holds_oblique: oblique,
    })
}

/// Maximum violations of the contact complementarity system for given
/// traces. With `alpha`, the oblique form of the law is checked.
pub fn kkt_residuals(
    mesh: &DomainMesh,
    data: &ContactData,
    traces: &ContactTraces,
    alpha: Option<&[f64]>,
) -> KktReport {
    let m = mesh.n_contact();
    assert_eq!(traces.u_n.len(), m, "trace length mismatch");
    let mut report = KktReport {
        gap: 0.0,
        sign: 0.0,
        complementarity: 0.0,
        cone: 0.0,
        alignment: 0.0,
    };
    for c in 0..m {
        let (un, ut, tn, tt) = (traces.u_n[c], traces.u_t[c], traces.t_n[c], traces.t_t[c]);
        let (f, g, w) = (data.friction[c], data.gap[c], data.w_t[c]);
        report.gap = report.gap.max(un - g);
        match alpha {
            None => {
                let s = ut - w;
                report.sign = report.sign.max(tn);
                report.complementarity = report.complementarity.max((tn * (un - g)).abs());
                report.cone = report.cone.max(tt.abs() + f * tn);
                report.alignment = report.alignment.max((tt * s - f * tn * s.abs()).abs());
            }
            Some(alpha) => {
                let a = alpha[c];
                let t1 = tn + a * tt;
                let t2 = tt;
                let y = (ut - w) - a * (un - g);
                let low = f * t1 / (1.0 + a * f);
                let high = -f * t1 / (1.0 - a * f);
                report.sign = report.sign.max(t1);
                report.complementarity = report.complementarity.max((t1 * (un - g)).abs());
                report.cone = report.cone.max((low - t2).max(t2 - high));
                let branch_gap = if y > 0.0 { (t2 - low).abs() } else { (t2 - high).abs() };
                report.alignment = report.alignment.max(y.abs() * branch_gap);
            }
        }
    }
    report.gap = report.gap.max(0.0);
    report.sign = report.sign.max(0.0);
    report.cone = report.cone.max(0.0);
    report
}

/// Builds the one-sided slip thresholds from an isotropic threshold
/// density: `θ± = θ/(1 ± α·f)`. With `α = 0` both sides equal `θ`.
fn split_thresholds(
    theta: &[f64],
    friction: &[f64],
    alpha: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), FemError> {
    let mut plus = Vec::with_capacity(theta.len());
    let mut minus = Vec::with_capacity(theta.len());
    for c in 0..theta.len() {
        let af = alpha[c] * friction[c];
        let (dp, dm) = (1.0 + af, 1.0 - af);
        if dp <= 0.0 || dm <= 0.0 {
            return Err(FemError::FrictionConditionViolated {
                margin: 1.0 - friction[c] * alpha[c].abs(),
            });
        }
        plus.push(theta[c] / dp);
        minus.push(theta[c] / dm);
    }
    Ok((plus, minus))
}

/// Solves one given-threshold (Tresca-type) friction problem.
///
/// `threshold` is the slip threshold density (nonnegative). In unilateral
/// mode the gap constraint `u_n ≤ g` is enforced and `tau` is ignored;
/// otherwise `tau` (nonpositive) loads the contact boundary in the normal
/// direction. `oblique_alpha` switches to the oblique slip measure and the
/// one-sided thresholds `θ/(1 ± αf)`.
pub fn solve_tresca(
    mesh: &DomainMesh,
    field: &ModulusField,
    data: &ContactData,
    threshold: &BoundaryField,
    tau: Option<&BoundaryField>,
    unilateral: bool,
    oblique_alpha: Option<&[f64]>,
) -> Result<(Vec<[f64; 2]>, TrescaReport), FemError> {
    let ctx = FemContext::new(mesh, field)?;
    let (sol, load, b) = tresca_with_context(
        &ctx, data, threshold, tau, unilateral, oblique_alpha, None,
    )?;
    let u = ctx.recover(&load, &sol.z);
    let alpha = oblique_alpha.map(|a| a.to_vec()).unwrap_or_else(|| vec![0.0; mesh.n_contact()]);
    let (tp, tm) = split_thresholds(&threshold.values, &data.friction, &alpha)?;
    let energy = quadratic_energy(&ctx, &u, &b)
        + dissipation_of(mesh, &sol.z, data, &alpha, &tp, &tm);
    Ok((
        u,
        TrescaReport {
            newton_iterations: sol.newton_iterations,
            polish_rounds: sol.polish_rounds,
            residual: sol.residual,
            energy,
        },
    ))
}

/// Shared inner-solve plumbing: validates, assembles loads, solves the
/// condensed problem.
fn tresca_with_context(
    ctx: &FemContext,
    data: &ContactData,
    threshold: &BoundaryField,
    tau: Option<&BoundaryField>,
    unilateral: bool,
    oblique_alpha: Option<&[f64]>,
    z0: Option<&DVector<f64>>,
) -> Result<(TrescaSolution, CondensedLoad, DVector<f64>), FemError> {
    let mesh = ctx.mesh();
    let m = mesh.n_contact();
    data.validate(mesh)?;
    if threshold.values.len() != m {
        return Err(FemError::InvalidData(format!(
            "threshold has {} entries for {m} contact nodes",
            threshold.values.len()
        )));
    }
    threshold.check_nonnegative(0.0)?;
    if let Some(alpha) = oblique_alpha {
        if alpha.len() != m {
            return Err(FemError::InvalidData(format!(
                "alpha has {} entries for {m} contact nodes",
                alpha.len()
            )));
        }
    }
    let alpha: Vec<f64> = oblique_alpha.map(|a| a.to_vec()).unwrap_or_else(|| vec![0.0; m]);
    let (theta_plus, theta_minus) = split_thresholds(&threshold.values, &data.friction, &alpha)?;

    let b = assemble_load(mesh, data);
    let mut load = ctx.condense_load(&b);
    if !unilateral {
        if let Some(tau) = tau {
            if tau.values.len() != m {
                return Err(FemError::InvalidData(format!(
                    "tau has {} entries for {m} contact nodes",
                    tau.values.len()
                )));
            }
            tau.check_nonpositive(CONE_TOL)?;
            for c in 0..m {
                load.r_hat[2 * c + 1] += tau.values[c] * mesh.contact_weights()[c];
            }
        }
    }
    let problem = CondensedProblem {
        theta_plus,
        theta_minus,
        alpha,
        w_t: data.w_t.clone(),
        gap: data.gap.clone(),
        unilateral,
    };
    let sol = solve_condensed(
        ctx.schur(),
        &load.r_hat,
        mesh.contact_weights(),
        &problem,
        z0,
    )?;
    Ok((sol, load, b))
}

/// The solution map of the fixed-point formulation: solve the bilateral
/// given-threshold problem with slip threshold `−f·t` and normal load
/// `tau`, both nonpositive traction densities, and return the normal
/// displacement trace. With `f = 0` the output does not depend on `t`.
pub fn apply_scr_a(
    mesh: &DomainMesh,
    field: &ModulusField,
    data: &ContactData,
    t: &BoundaryField,
    tau: &BoundaryField,
    oblique_alpha: Option<&[f64]>,
) -> Result<BoundaryField, FemError> {
    let ctx = FemContext::new(mesh, field)?;
    apply_scr_a_with_context(&ctx, data, t, tau, oblique_alpha)
}

/// [`apply_scr_a`] on a prebuilt context (probes evaluate the map many
/// times on one mesh).
pub fn apply_scr_a_with_context(
    ctx: &FemContext,
    data: &ContactData,
    t: &BoundaryField,
    tau: &BoundaryField,
    oblique_alpha: Option<&[f64]>,
) -> Result<BoundaryField, FemError> {
    let m = ctx.mesh().n_contact();
    if t.values.len() != m {
        return Err(FemError::InvalidData(format!(
            "t has {} entries for {m} contact nodes",
            t.values.len()
        )));
    }
    t.check_nonpositive(CONE_TOL)?;
    let threshold = BoundaryField::traction(
        t.values
            .iter()
            .zip(&data.friction)
            .map(|(tv, f)| (-f * tv).max(0.0))
            .collect(),
    );
    let (sol, ..) = tresca_with_context(
        ctx,
        data,
        &threshold,
        Some(tau),
        false,
        oblique_alpha,
        None,
    )?;
    let u_n = (0..m).map(|c| sol.z[2 * c + 1]).collect();
    Ok(BoundaryField::displacement(u_n))
}

/// Dual (energy) norm of a normal-traction density on the contact chain:
/// the square root of twice the elastic energy of the body loaded by that
/// traction alone (clamped on Γ_U, paired through the lumped weights).
pub fn dual_norm(
    mesh: &DomainMesh,
    field: &ModulusField,
    t: &BoundaryField,
) -> Result<f64, FemError> {
    if t.flavor != FieldFlavor::TractionDensity {
        return Err(FemError::InvalidData(
            "dual norm applies to traction densities".into(),
        ));
    }
    if t.values.len() != mesh.n_contact() {
        return Err(FemError::InvalidData(format!(
            "t has {} entries for {} contact nodes",
            t.values.len(),
            mesh.n_contact()
        )));
    }
    let ctx = FemContext::new(mesh, field)?;
    Ok(ctx.dual_norm_normal(&t.values))
}

/// Resolves the oblique coefficient field of a step mode.
pub fn resolve_alpha(
    mesh: &DomainMesh,
    field: &ModulusField,
    mode: &StepMode,
) -> Result<Vec<f64>, FemError> {
    let m = mesh.n_contact();
    match mode {
        StepMode::Isotropic => Ok(vec![0.0; m]),
        StepMode::ObliqueWithAlpha(alpha) => {
            if alpha.len() != m {
                return Err(FemError::InvalidData(format!(
                    "alpha has {} entries for {m} contact nodes",
                    alpha.len()
                )));
            }
            Ok(alpha.clone())
        }
        StepMode::Oblique => {
            let mut alpha = Vec::with_capacity(m);
            for (c, &node) in mesh.contact_nodes().iter().enumerate() {
                let modulus = field.node_average(mesh, node);
                let t = mesh.contact_tangents()[c];
                let angle = t[1].atan2(t[0]);
                let a = boundary_alpha(&modulus, angle).map_err(|e| {
                    FemError::InvalidData(format!(
                        "surface response at contact node {c}: {e}"
                    ))
                })?;
                alpha.push(a);
            }
            Ok(alpha)
        }
    }
}

/// Solves one incremental contact step by fixed point on the normal
/// traction (`t₁` in oblique mode), starting from `t⁰ = 0` unless seeded.
pub fn solve_contact_step(
    mesh: &DomainMesh,
    field: &ModulusField,
    data: &ContactData,
    mode: &StepMode,
    opts: &StepOptions,
) -> Result<StepSolution, FemError> {
    let alpha = resolve_alpha(mesh, field, mode)?;
    let oblique = !matches!(mode, StepMode::Isotropic);
    if oblique {
        let margin = friction_condition_check(&data.friction, &alpha);
        if margin <= 0.0 {
            return Err(FemError::FrictionConditionViolated { margin });
        }
    }
    let ctx = FemContext::new(mesh, field)?;
    step_with_context(&ctx, data, &alpha, oblique, opts, None)
}

/// One fixed-point contact step on a prebuilt context. `warm` carries the
/// previous step's solution and load vector for warm starting.
pub(crate) fn step_with_context(
    ctx: &FemContext,
    data: &ContactData,
    alpha: &[f64],
    oblique: bool,
    opts: &StepOptions,
    warm: Option<(&StepSolution, &DVector<f64>)>,
) -> Result<StepSolution, FemError> {
    let mesh = ctx.mesh();
    let m = mesh.n_contact();
    data.validate(mesh)?;
    assert!(
        opts.damping > 0.0 && opts.damping <= 1.0,
        "damping must lie in (0, 1]"
    );
    let b = assemble_load(mesh, data);

    // Warm-start short circuit: when the loads are unchanged and the
    // previous state satisfies this step's optimality conditions, it IS
    // the solution of this step; return it unchanged.
    if let Some((prev, prev_b)) = warm {
        if prev_b == &b {
            let kkt = kkt_residuals(mesh, data, &prev.traces, oblique.then_some(alpha));
            if kkt.max() <= WARM_START_KKT_TOL {
                let mut out = prev.clone();
                out.report = StepReport {
                    outer_iterations: 0,
                    residual_history: Vec::new(),
                    kkt,
                    dissipation: step_dissipation(mesh, data, alpha, &prev.traces, oblique),
                    energy: prev.report.energy,
                    warm_started: true,
                };
                return Ok(out);
            }
        }
    }

    let load = ctx.condense_load(&b);
    let weights = mesh.contact_weights();
    let mut t: Vec<f64> = match &opts.t0 {
        Some(seed) => {
            if seed.len() != m {
                return Err(FemError::InvalidData(format!(
                    "t0 has {} entries for {m} contact nodes",
                    seed.len()
                )));
            }
            seed.iter().map(|&v| v.min(0.0)).collect()
        }
        None => vec![0.0; m],
    };
    let mut z_seed: Option<DVector<f64>> = warm.map(|(prev, _)| local_traces_z(mesh, prev));
    let mut history = Vec::new();

    for _ in 0..opts.max_outer {
        let theta: Vec<f64> = t
            .iter()
            .zip(&data.friction)
            .map(|(tv, f)| (-f * tv).max(0.0))
            .collect();
        let (theta_plus, theta_minus) = split_thresholds(&theta, &data.friction, alpha)?;
        let problem = CondensedProblem {
            theta_plus,
            theta_minus,
            alpha: alpha.to_vec(),
            w_t: data.w_t.clone(),
            gap: data.gap.clone(),
            unilateral: true,
        };
        let sol = solve_condensed(ctx.schur(), &load.r_hat, weights, &problem, z_seed.as_ref())?;
        let t_new: Vec<f64> = (0..m)
            .map(|c| {
                let tn = sol.rho[2 * c + 1] / weights[c];
                let tt = sol.rho[2 * c] / weights[c];
                let iterate = if oblique { tn + alpha[c] * tt } else { tn };
                iterate.min(0.0)
            })
            .collect();
        let diff: Vec<f64> = t_new.iter().zip(&t).map(|(a, b)| a - b).collect();
        let eta = ctx.dual_norm_normal(&diff);
        history.push(eta);
        let converged = eta <= opts.tol * (1.0 + ctx.dual_norm_normal(&t));
        for c in 0..m {
            t[c] = (1.0 - opts.damping) * t[c] + opts.damping * t_new[c];
        }
        z_seed = Some(sol.z.clone());
        if converged {
            return finalize_step(ctx, data, alpha, oblique, &b, &load, sol, t, history);
        }
    }
    Err(FemError::NotConverged {
        residual_history: history,
    })
}

/// Packs a converged inner solution into the public step result.
#[allow(clippy::too_many_arguments)]
fn finalize_step(
    ctx: &FemContext,
    data: &ContactData,
    alpha: &[f64],
    oblique: bool,
    b: &DVector<f64>,
    load: &CondensedLoad,
    sol: TrescaSolution,
    t: Vec<f64>,
    history: Vec<f64>,
) -> Result<StepSolution, FemError> {
    let mesh = ctx.mesh();
    let m = mesh.n_contact();
    let weights = mesh.contact_weights();
    let u = ctx.recover(load, &sol.z);
    let traces = ContactTraces {
        u_n: (0..m).map(|c| sol.z[2 * c + 1]).collect(),
        u_t: (0..m).map(|c| sol.z[2 * c]).collect(),
        t_n: (0..m).map(|c| sol.rho[2 * c + 1] / weights[c]).collect(),
        t_t: (0..m).map(|c| sol.rho[2 * c] / weights[c]).collect(),
    };
    let states = classify_states(mesh, data, alpha, &sol, &traces);
    let kkt = kkt_residuals(mesh, data, &traces, oblique.then_some(alpha));
    let dissipation = step_dissipation(mesh, data, alpha, &traces, oblique);
    let energy = quadratic_energy(ctx, &u, b);
    Ok(StepSolution {
        u,
        t: BoundaryField::traction(t),
        traces,
        states,
        report: StepReport {
            outer_iterations: history.len(),
            residual_history: history,
            kkt,
            dissipation,
            energy,
            warm_started: false,
        },
    })
}

/// Friction dissipation of a step from its converged traces:
/// `Σ_c ŵ_c (θ⁺⟨y⟩₊ + θ⁻⟨y⟩₋)` with thresholds from the converged
/// traction. Nonnegative by construction.
fn step_dissipation(
    mesh: &DomainMesh,
    data: &ContactData,
    alpha: &[f64],
    traces: &ContactTraces,
    oblique: bool,
) -> f64 {
    let m = mesh.n_contact();
    let mut total = 0.0;
    for c in 0..m {
        let f = data.friction[c];
        let iterate = if oblique {
            traces.t_n[c] + alpha[c] * traces.t_t[c]
        } else {
            traces.t_n[c]
        };
        let theta = (-f * iterate).max(0.0);
        let af = alpha[c] * f;
        let y = (traces.u_t[c] - data.w_t[c]) - alpha[c] * (traces.u_n[c] - data.gap[c]);
        let w = mesh.contact_weights()[c];
        total += w * (theta / (1.0 + af) * y.max(0.0) + theta / (1.0 - af) * (-y).max(0.0));
    }
    total
}

/// Elastic energy minus load potential of a displacement field.
fn quadratic_energy(ctx: &FemContext, u: &[[f64; 2]], b: &DVector<f64>) -> f64 {
    let full = DVector::from_iterator(2 * u.len(), u.iter().flatten().copied());
    let uf = ctx.restrict(&full);
    let bf = ctx.restrict(b);
    0.5 * ctx.stiffness().bilinear(uf.as_slice(), uf.as_slice()) - bf.dot(&uf)
}

/// Dissipation term of the Tresca functional for a condensed solution.
fn dissipation_of(
    mesh: &DomainMesh,
    z: &DVector<f64>,
    data: &ContactData,
    alpha: &[f64],
    theta_plus: &[f64],
    theta_minus: &[f64],
) -> f64 {
    let mut total = 0.0;
    for c in 0..mesh.n_contact() {
        let y = z[2 * c] - data.w_t[c] - alpha[c] * (z[2 * c + 1] - data.gap[c]);
        total += mesh.contact_weights()[c]
            * (theta_plus[c] * y.max(0.0) + theta_minus[c] * (-y).max(0.0));
    }
    total
}

/// Reconstructs condensed local displacements from stored traces.
fn local_traces_z(mesh: &DomainMesh, prev: &StepSolution) -> DVector<f64> {
    let m = mesh.n_contact();
    let mut z = DVector::zeros(2 * m);
    for c in 0..m {
        z[2 * c] = prev.traces.u_t[c];
        z[2 * c + 1] = prev.traces.u_n[c];
    }
    z
}

/// Maps the inner solver's classification to reported contact states.
/// Slip is only reported where a genuine (positive) slip threshold was
/// active; frictionless contact is stick by convention.
fn classify_states(
    mesh: &DomainMesh,
    data: &ContactData,
    alpha: &[f64],
    sol: &TrescaSolution,
    traces: &ContactTraces,
) -> Vec<ContactState> {
    let m = mesh.n_contact();
    let slip_scale = 1.0
        + data
            .w_t
            .iter()
            .chain(&data.gap)
            .map(|v| v.abs())
            .fold(0.0, f64::max);
    (0..m)
        .map(|c| {
            if !sol.active[c] {
                return ContactState::Separation;
            }
            let theta = -data.friction[c] * traces.t_n[c];
            let y = (traces.u_t[c] - data.w_t[c]) - alpha[c] * (traces.u_n[c] - data.gap[c]);
            let slipping = theta > 1e-14 && y.abs() > 1e-10 * slip_scale;
            match (sol.class[c], slipping) {
                (FrictionClass::SlipPlus, true) => ContactState::SlipPlus,
                (FrictionClass::SlipMinus, true) => ContactState::SlipMinus,
                _ => ContactState::Stick,
            }
        })
        .collect()
}
