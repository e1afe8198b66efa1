//! The six pipelines behind the subcommands. Each one parses and fully
//! validates its config, solves, composes every output file in memory,
//! flushes, and only then reports failure exit codes that carry a report
//! (non-coercive regimes still produce their diagnosis files).

use crate::config::{
    self, ConstantsConfig, ContactStepConfig, EvolveConfig, KernelsConfig, ProbeConfig,
    SteadySlideConfig,
};
use crate::error::{from_fem, CliError};
use crate::output::{csv, fmt, OutputSet};
use coulomb2d::bem::{
    assemble_a_matrix, assemble_s, equilibrium_density, solve_steady_sliding, CoercivityClass,
    LineMesh,
};
use coulomb2d::fem::contact::{
    apply_scr_a_with_context, solve_contact_step, StepOptions, StepSolution,
};
use coulomb2d::fem::data::BoundaryField;
use coulomb2d::fem::evolve::{evolve_quasistatic, EvolveOptions};
use coulomb2d::fem::mesh::DomainMesh;
use coulomb2d::fem::system::FemContext;
use coulomb2d::vi::{pseudomonotone_probe, ProbeSamples};
use coulomb2d::{n2d_constants, rotate_modulus};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::Path;

/// `constants`: surface-response constants of a half-space, plus the sweep
/// of the constants over the boundary orientation.
pub fn constants(config_text: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg: ConstantsConfig = config::parse(config_text)?;
    if cfg.sweep_points < 2 {
        return Err(CliError::Config("sweep_points must be at least 2".into()));
    }
    let modulus = cfg.modulus.resolve()?;
    let base = n2d_constants(&modulus).map_err(|err| CliError::Config(format!("{err}")))?;

    let mut rows = Vec::with_capacity(cfg.sweep_points);
    for k in 0..cfg.sweep_points {
        let theta = std::f64::consts::PI * k as f64 / (cfg.sweep_points - 1) as f64;
        // Constants of the half-space whose boundary tangent makes angle
        // theta with the material x-axis.
        let local = rotate_modulus(&modulus, theta);
        let c = n2d_constants(&local).map_err(|err| CliError::Config(format!("{err}")))?;
        rows.push(vec![
            fmt(theta),
            fmt(c.c1),
            fmt(c.c2),
            fmt(c.c3),
            fmt(c.c4),
            fmt(c.alpha),
        ]);
    }

    let mut out = OutputSet::new(out_dir);
    out.add_json(
        "constants.json",
        &json!({
            "c1": base.c1,
            "c2": base.c2,
            "c3": base.c3,
            "c4": base.c4,
            "alpha": base.alpha,
            "determinant_invariant": base.determinant_invariant(),
        }),
    );
    out.add(
        "constants_sweep.csv",
        csv(
            &["theta[rad]", "c1[-]", "c2[-]", "c3[-]", "c4[-]", "alpha[-]"],
            rows,
        ),
    );
    report_written(out.flush()?);
    Ok(())
}

/// `kernels`: structure report of the discrete boundary operators on one
/// mesh — equilibrium-density potential against log 2, smallest symmetric
/// eigenvalue, skewness defect.
pub fn kernels(config_text: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg: KernelsConfig = config::parse(config_text)?;
    if cfg.n < 2 {
        return Err(CliError::Config("n must be at least 2".into()));
    }
    let mesh = match cfg.grading.as_str() {
        "uniform" => LineMesh::uniform(cfg.n),
        "endpoint" => {
            let n = cfg.n;
            let mut nodes: Vec<f64> = (0..=n)
                .map(|k| -(std::f64::consts::PI * k as f64 / n as f64).cos())
                .collect();
            nodes[0] = -1.0;
            nodes[n] = 1.0;
            LineMesh::from_nodes(nodes)
                .map_err(|err| CliError::Internal(format!("graded mesh: {err}")))?
        }
        other => {
            return Err(CliError::Config(format!(
                "grading must be \"uniform\" or \"endpoint\", got \"{other}\""
            )))
        }
    };

    let s = assemble_s(&mesh);
    let a = assemble_a_matrix(&mesh);
    let density = equilibrium_density(&mesh);
    let potential = &s * &density.values;
    let lengths = mesh.lengths();
    let mids = mesh.midpoints();
    let log2 = 2.0f64.ln();

    let mut max_deviation = 0.0f64;
    let mut rows = Vec::with_capacity(cfg.n);
    for i in 0..cfg.n {
        let per_length = potential[i] / lengths[i];
        let deviation = per_length - log2;
        max_deviation = max_deviation.max(deviation.abs());
        rows.push(vec![
            fmt(mids[i]),
            fmt(lengths[i]),
            fmt(density.values[i]),
            fmt(per_length),
            fmt(deviation),
        ]);
    }

    let lambda_min = smallest_eigenvalue_spd(&s).ok_or_else(|| {
        CliError::Internal("symmetric kernel matrix is not positive definite".into())
    })?;
    let skew_defect = (&a + a.transpose()).norm();

    let mut out = OutputSet::new(out_dir);
    out.add(
        "kernels.csv",
        csv(
            &[
                "x[-]",
                "length[-]",
                "density[-]",
                "potential_per_length[-]",
                "deviation_from_log2[-]",
            ],
            rows,
        ),
    );
    out.add_json(
        "kernels.json",
        &json!({
            "n": cfg.n,
            "grading": cfg.grading,
            "log2": log2,
            "max_potential_deviation": max_deviation,
            "lambda_min_symmetric": lambda_min,
            "skew_defect": skew_defect,
        }),
    );
    report_written(out.flush()?);
    Ok(())
}

/// `steady-slide`: the sliding-indentor complementarity problem, with a
/// mesh-doubling convergence report and the nonexistence diagnosis in the
/// non-coercive regime.
pub fn steady_slide(config_text: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg: SteadySlideConfig = config::parse(config_text)?;
    if cfg.n < 2 {
        return Err(CliError::Config("n must be at least 2".into()));
    }
    if !(cfg.friction >= 0.0) {
        return Err(CliError::Config("friction must be nonnegative".into()));
    }
    if cfg.w_sign != 1.0 && cfg.w_sign != -1.0 {
        return Err(CliError::Config("w_sign must be +1 or -1".into()));
    }
    let constants = cfg.constants.resolve()?;

    let mut levels = Vec::new();
    let mut finest = None;
    for level in 0..=cfg.doublings {
        let n = cfg.n << level;
        let mesh = LineMesh::uniform(n);
        let gap: Vec<f64> = mesh.midpoints().iter().map(|&x| cfg.indentor.gap_at(x)).collect();
        let (t, report) = solve_steady_sliding(&mesh, &constants, cfg.friction, cfg.w_sign, &gap);
        let total_load = t.total_force(&mesh);
        levels.push(json!({
            "n": n,
            "total_load": total_load,
            "outcome": format!("{:?}", report.status.outcome),
            "iterations": report.status.iterations,
            "residual": report.status.residual,
        }));
        finest = Some((mesh, gap, t, report, total_load));
    }
    let (mesh, gap, t, report, total_load) = finest.expect("at least one level");

    // Convergence ratio of successive total loads under doubling.
    let loads: Vec<f64> = levels
        .iter()
        .map(|l| l["total_load"].as_f64().expect("stored above"))
        .collect();
    let mut observed_orders = Vec::new();
    for w in loads.windows(3) {
        let d1 = (w[1] - w[0]).abs();
        let d2 = (w[2] - w[1]).abs();
        if d2 > 0.0 {
            observed_orders.push((d1 / d2).log2());
        }
    }

    let lengths = mesh.lengths();
    let mids = mesh.midpoints();
    let rows: Vec<Vec<String>> = (0..mesh.len())
        .map(|i| {
            vec![
                fmt(mids[i]),
                fmt(lengths[i]),
                fmt(gap[i]),
                fmt(t.values[i]),
                fmt(t.values[i] * lengths[i]),
            ]
        })
        .collect();

    let class_label = match report.class {
        CoercivityClass::Coercive => "coercive",
        CoercivityClass::Degenerate => "degenerate",
        CoercivityClass::NonCoercive => "non-coercive",
    };
    let mut doc = json!({
        "kappa": report.kappa,
        "class": class_label,
        "friction": cfg.friction,
        "w_sign": cfg.w_sign,
        "converged": report.status.solved(),
        "outcome": format!("{:?}", report.status.outcome),
        "iterations": report.status.iterations,
        "residual": report.status.residual,
        "total_load": total_load,
        "levels": levels,
        "observed_orders": observed_orders,
    });
    if let Some(probe) = &report.nonexistence {
        doc["f_critical"] = json!(if probe.f_critical.is_finite() {
            Some(probe.f_critical)
        } else {
            None
        });
        doc["nonexistence"] = json!({
            "degenerate": probe.degenerate,
            "pivoting_outcome": format!("{:?}", probe.pivoting.outcome),
            "sweep_outcome": format!("{:?}", probe.sweep.outcome),
            "certificate_quadratic": probe.certificate_quadratic,
            "candidate_residual": probe.candidate_residual,
        });
    }

    let mut out = OutputSet::new(out_dir);
    out.add(
        "steady_slide.csv",
        csv(
            &["x[-]", "length[-]", "gap[-]", "t_n[-]", "force[-]"],
            rows,
        ),
    );
    out.add_json("steady_slide.json", &doc);
    report_written(out.flush()?);

    match report.class {
        CoercivityClass::Coercive => {
            if report.status.solved() {
                Ok(())
            } else {
                Err(CliError::NotConverged(format!(
                    "sweep solver ended with {:?} at residual {:.3e}",
                    report.status.outcome, report.status.residual
                )))
            }
        }
        CoercivityClass::Degenerate => Err(CliError::Refused(format!(
            "coercivity lost: kappa = {} (degenerate); see steady_slide.json",
            report.kappa
        ))),
        CoercivityClass::NonCoercive => Err(CliError::Refused(format!(
            "coercivity lost: kappa = {} < 0; see steady_slide.json",
            report.kappa
        ))),
    }
}

fn contact_rows(mesh: &DomainMesh, sol: &StepSolution) -> Vec<Vec<String>> {
    let arclength = mesh.contact_arclength();
    let coords = mesh.node_coords();
    mesh.contact_nodes()
        .iter()
        .enumerate()
        .map(|(c, &node)| {
            vec![
                node.to_string(),
                fmt(arclength[c]),
                fmt(coords[node][0]),
                fmt(coords[node][1]),
                fmt(sol.traces.u_n[c]),
                fmt(sol.traces.u_t[c]),
                fmt(sol.traces.t_n[c]),
                fmt(sol.traces.t_t[c]),
                sol.states[c].label().to_string(),
            ]
        })
        .collect()
}

const CONTACT_CSV_HEADER: [&str; 9] = [
    "node[-]",
    "s[-]",
    "x[-]",
    "y[-]",
    "u_n[-]",
    "u_t[-]",
    "t_n[-]",
    "t_t[-]",
    "state[-]",
];

fn step_report_json(sol: &StepSolution) -> serde_json::Value {
    let mut counts = std::collections::BTreeMap::new();
    for state in &sol.states {
        *counts.entry(state.label()).or_insert(0usize) += 1;
    }
    json!({
        "outer_iterations": sol.report.outer_iterations,
        "residual_history": sol.report.residual_history,
        "kkt": {
            "gap": sol.report.kkt.gap,
            "sign": sol.report.kkt.sign,
            "complementarity": sol.report.kkt.complementarity,
            "cone": sol.report.kkt.cone,
            "alignment": sol.report.kkt.alignment,
            "max": sol.report.kkt.max(),
        },
        "dissipation": sol.report.dissipation,
        "energy": sol.report.energy,
        "warm_started": sol.report.warm_started,
        "state_counts": counts,
    })
}

/// `contact-step`: one incremental contact problem.
pub fn contact_step(config_text: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg: ContactStepConfig = config::parse(config_text)?;
    let (mesh, field, data) = cfg.problem.resolve()?;
    let mode = cfg.mode.resolve(mesh.n_contact())?;
    let mut opts = StepOptions::default();
    if let Some(knobs) = &cfg.options {
        knobs.apply(&mut opts)?;
    }
    let sol = solve_contact_step(&mesh, &field, &data, &mode, &opts).map_err(from_fem)?;

    let mut out = OutputSet::new(out_dir);
    out.add(
        "contact_step.csv",
        csv(&CONTACT_CSV_HEADER, contact_rows(&mesh, &sol)),
    );
    out.add_json("contact_step.json", &step_report_json(&sol));
    report_written(out.flush()?);
    Ok(())
}

/// `evolve`: a quasistatic sequence of incremental steps with slip-history
/// chaining.
pub fn evolve(config_text: &str, out_dir: &Path) -> Result<(), CliError> {
    let cfg: EvolveConfig = config::parse(config_text)?;
    if cfg.steps.is_empty() {
        return Err(CliError::Config("steps must not be empty".into()));
    }
    let (mesh, field, base) = cfg.problem.resolve()?;
    let m = mesh.n_contact();
    let mode = cfg.mode.resolve(m)?;
    let mut opts = EvolveOptions {
        continue_on_failure: cfg.continue_on_failure,
        ..EvolveOptions::default()
    };
    if let Some(knobs) = &cfg.options {
        knobs.apply(&mut opts.step)?;
    }

    let mut sequence = Vec::with_capacity(cfg.steps.len());
    for (i, step) in cfg.steps.iter().enumerate() {
        let mut data = base.clone();
        if let Some(b) = step.body_force {
            data.body_force = coulomb2d::fem::data::NodeField2::Constant(b);
        }
        if let Some(gap) = &step.gap {
            data.gap = gap.resolve(m, &format!("step {i} gap"))?;
        }
        if let Some(friction) = &step.friction {
            data.friction = friction.resolve(m, &format!("step {i} friction"))?;
        }
        if let Some(w_t) = &step.w_t {
            data.w_t = w_t.resolve(m, &format!("step {i} w_t"))?;
        }
        sequence.push(data);
    }

    let trajectory =
        evolve_quasistatic(&mesh, &field, &sequence, &mode, &opts).map_err(from_fem)?;

    let mut out = OutputSet::new(out_dir);
    let mut step_reports = Vec::with_capacity(trajectory.steps.len());
    for (k, sol) in trajectory.steps.iter().enumerate() {
        out.add(
            &format!("evolve_step_{k:03}.csv"),
            csv(&CONTACT_CSV_HEADER, contact_rows(&mesh, sol)),
        );
        step_reports.push(step_report_json(sol));
    }
    let failures: Vec<serde_json::Value> = trajectory
        .failures
        .iter()
        .map(|(step, err)| json!({"step": step, "error": format!("{err}")}))
        .collect();
    out.add_json(
        "evolve.json",
        &json!({
            "steps": step_reports,
            "dissipation": trajectory.dissipation,
            "failures": failures,
        }),
    );
    report_written(out.flush()?);

    if trajectory.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{} of {} steps failed; see evolve.json",
            trajectory.failures.len(),
            sequence.len()
        )))
    }
}

/// `probe`: finite-sample structure diagnostics of the incremental
/// solution operator on a fixed mesh — monotonicity quotients, coercivity
/// trend along rays, continuity-exponent fit.
pub fn probe(config_text: &str, out_dir: &Path, seed_override: Option<u64>) -> Result<(), CliError> {
    let cfg: ProbeConfig = config::parse(config_text)?;
    if cfg.pairs == 0 || cfg.rays == 0 {
        return Err(CliError::Config("pairs and rays must be positive".into()));
    }
    if cfg.ray_scales.len() < 2 || cfg.ray_scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(
            "ray_scales must be at least two strictly increasing values".into(),
        ));
    }
    if !(cfg.traction_magnitude > 0.0) {
        return Err(CliError::Config("traction_magnitude must be positive".into()));
    }
    if cfg.continuity_points < 3 {
        return Err(CliError::Config("continuity_points must be at least 3".into()));
    }
    if !(cfg.continuity_halfwidth_decades > 0.0) {
        return Err(CliError::Config(
            "continuity_halfwidth_decades must be positive".into(),
        ));
    }
    let (mesh, field, data) = cfg.problem.resolve()?;
    let m = mesh.n_contact();
    let ctx = FemContext::new(&mesh, &field).map_err(from_fem)?;
    let weights = mesh.contact_weights().to_vec();
    let seed = seed_override.unwrap_or(cfg.seed);

    let apply_pair = |t: &DVector<f64>, tau: &DVector<f64>| -> Result<DVector<f64>, CliError> {
        let output = apply_scr_a_with_context(
            &ctx,
            &data,
            &BoundaryField::traction(t.iter().copied().collect()),
            &BoundaryField::traction(tau.iter().copied().collect()),
            None,
        )
        .map_err(from_fem)?;
        Ok(DVector::from_vec(output.values))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mag = cfg.traction_magnitude;
    let mut pairs = Vec::with_capacity(cfg.pairs);
    for _ in 0..cfg.pairs {
        let t = DVector::from_fn(m, |_, _| -rng.gen_range(0.0..mag));
        let tau = DVector::from_fn(m, |_, _| -rng.gen_range(0.0..mag));
        pairs.push((t, tau));
    }
    let ray_bases: Vec<DVector<f64>> = (0..cfg.rays)
        .map(|_| DVector::from_fn(m, |_, _| -rng.gen_range(0.05 * mag..mag)))
        .collect();

    // Designated probe with the lumped boundary pairing.
    let samples = ProbeSamples {
        pairs: pairs.clone(),
        ray_bases: ray_bases.clone(),
        ray_scales: cfg.ray_scales.clone(),
    };
    let lumped = |x: &DVector<f64>, y: &DVector<f64>| -> f64 {
        (0..x.len()).map(|c| weights[c] * x[c] * y[c]).sum()
    };
    // The probe closures cannot return errors; surface the first failure
    // afterwards instead of unwrapping inside.
    let failure = std::cell::RefCell::new(None::<CliError>);
    let guarded = |t: &DVector<f64>, tau: &DVector<f64>| -> DVector<f64> {
        match apply_pair(t, tau) {
            Ok(v) => v,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                DVector::zeros(m)
            }
        }
    };
    let report = pseudomonotone_probe(
        |t, tau| &guarded(t, t) - &guarded(t, tau),
        |t| guarded(t, t),
        lumped,
        &samples,
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }

    // The same samples against the dual-norm metric.
    let mut pair_rows = Vec::with_capacity(cfg.pairs);
    let mut min_dual = f64::INFINITY;
    let mut min_lumped = f64::INFINITY;
    for (k, (t, tau)) in pairs.iter().enumerate() {
        let diff = &apply_pair(t, t)? - &apply_pair(t, tau)?;
        let step = t - tau;
        let num: f64 = (0..m).map(|c| weights[c] * diff[c] * step[c]).sum();
        let den_lumped: f64 = (0..m).map(|c| weights[c] * step[c] * step[c]).sum();
        let step_slice: Vec<f64> = step.iter().copied().collect();
        let den_dual = ctx.dual_norm_normal(&step_slice).powi(2);
        let q_lumped = num / den_lumped;
        let q_dual = num / den_dual;
        min_lumped = min_lumped.min(q_lumped);
        min_dual = min_dual.min(q_dual);
        pair_rows.push(vec![k.to_string(), fmt(q_lumped), fmt(q_dual)]);
    }

    let mut coercivity_rows = Vec::new();
    let mut coercivity_dual = Vec::with_capacity(cfg.rays);
    for (r, base) in ray_bases.iter().enumerate() {
        let mut row = Vec::with_capacity(cfg.ray_scales.len());
        for &s in &cfg.ray_scales {
            let t = base * s;
            let image = apply_pair(&t, &t)?;
            let t_slice: Vec<f64> = t.iter().copied().collect();
            let num: f64 = (0..m).map(|c| weights[c] * image[c] * t[c]).sum();
            let q = num / ctx.dual_norm_normal(&t_slice);
            coercivity_rows.push(vec![r.to_string(), fmt(s), fmt(q)]);
            row.push(q);
        }
        coercivity_dual.push(row);
    }
    let coercivity_increasing_dual = coercivity_dual
        .iter()
        .all(|row| row.windows(2).all(|w| w[1] > w[0]));

    // Continuity exponent: output distance against input distance along a
    // threshold ray, fitted over a window centred at the crossover of the
    // measured linear-response and saturation asymptotes.
    let direction = DVector::from_element(m, -1.0);
    let tau_fixed = DVector::from_element(m, -0.5 * mag);
    let schur = ctx.schur();
    let dir_slice: Vec<f64> = direction.iter().copied().collect();
    let dual_dir = ctx.dual_norm_normal(&dir_slice);
    let u_base = apply_pair(&DVector::zeros(m), &tau_fixed)?;
    let trace_norm = |u: &DVector<f64>| -> f64 {
        let mut delta = DVector::zeros(2 * m);
        for c in 0..m {
            delta[2 * c + 1] = u[c] - u_base[c];
        }
        delta.dot(&(schur * &delta)).sqrt()
    };
    let measure = |s: f64| -> Result<(f64, f64), CliError> {
        let u = apply_pair(&(&direction * s), &tau_fixed)?;
        Ok((s * dual_dir, trace_norm(&u)))
    };

    let (x_lo, y_lo) = measure(1e-4)?;
    let (_, y_hi_a) = measure(1e3)?;
    let (_, y_hi) = measure(1e4)?;
    let linear_coeff = y_lo / x_lo;
    let saturated = y_hi > 0.0 && ((y_hi - y_hi_a) / y_hi).abs() < 1e-6;
    let mut continuity_rows = Vec::new();
    let mut continuity_exponent = None;
    let mut crossover = None;
    if saturated && linear_coeff > 0.0 {
        let x_cross = y_hi / linear_coeff;
        let s_cross = x_cross / dual_dir;
        crossover = Some(x_cross);
        let hw = cfg.continuity_halfwidth_decades;
        let npts = cfg.continuity_points;
        let mut lx = Vec::with_capacity(npts);
        let mut ly = Vec::with_capacity(npts);
        for k in 0..npts {
            let exponent = -hw + 2.0 * hw * k as f64 / (npts - 1) as f64;
            let s = s_cross * 10f64.powf(exponent);
            let (x, y) = measure(s)?;
            continuity_rows.push(vec![fmt(s), fmt(x), fmt(y)]);
            if x > 0.0 && y > 0.0 {
                lx.push(x.ln());
                ly.push(y.ln());
            }
        }
        if lx.len() >= 2 {
            continuity_exponent = Some(ols_slope(&lx, &ly));
        }
    }

    let mut out = OutputSet::new(out_dir);
    out.add(
        "probe_pairs.csv",
        csv(
            &["pair[-]", "quotient_lumped[-]", "quotient_dual[-]"],
            pair_rows,
        ),
    );
    out.add(
        "probe_coercivity.csv",
        csv(&["ray[-]", "scale[-]", "quotient_dual[-]"], coercivity_rows),
    );
    out.add(
        "probe_continuity.csv",
        csv(
            &["s[-]", "input_norm[-]", "output_distance[-]"],
            continuity_rows,
        ),
    );
    out.add_json(
        "probe.json",
        &json!({
            "seed": seed,
            "contact_nodes": m,
            "pairs": cfg.pairs,
            "min_monotonicity_quotient_lumped": min_lumped,
            "min_monotonicity_quotient_dual": min_dual,
            "probe_min_monotonicity_quotient": report.min_monotonicity_quotient,
            "max_output_norm": report.max_output_norm,
            "coercivity_increasing_lumped": report.coercivity_increasing(),
            "coercivity_increasing_dual": coercivity_increasing_dual,
            "continuity_exponent": continuity_exponent,
            "continuity_crossover_input_norm": crossover,
            "continuity_saturated": saturated,
        }),
    );
    report_written(out.flush()?);
    Ok(())
}

/// Smallest eigenvalue of an SPD matrix: inverse power iteration on the
/// Cholesky factorization, Rayleigh quotient of the converged vector.
fn smallest_eigenvalue_spd(s: &nalgebra::DMatrix<f64>) -> Option<f64> {
    let n = s.nrows();
    let chol = nalgebra::Cholesky::new(s.clone())?;
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    for _ in 0..60 {
        let y = chol.solve(&v);
        v = &y / y.norm();
    }
    Some((v.transpose() * s * &v)[(0, 0)])
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let xm = x.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm) * (a - xm)).sum();
    sxy / sxx
}

fn report_written(paths: Vec<String>) {
    for path in paths {
        eprintln!("wrote {path}");
    }
}
