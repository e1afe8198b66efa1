//! Quasistatic evolution: a sequence of incremental contact steps.
//!
//! Each step solves the fixed-point contact problem for its own loads;
//! history enters through the tangential trace: the slip reference `w_t`
//! of step `i` is the converged tangential displacement of step `i−1`
//! (step 0 uses the `w_t` provided in its data). Steps are warm-started
//! from the previous traction, and a step whose loads are unchanged and
//! whose previous state still satisfies the optimality system is returned
//! unchanged — repeated constant-load steps reproduce their predecessor
//! exactly.

use super::assembly::{assemble_load, ModulusField};
use super::contact::{
    friction_condition_check, resolve_alpha, step_with_context, StepMode, StepOptions,
    StepSolution,
};
use super::data::{ContactData, FemError};
use super::mesh::DomainMesh;
use super::system::FemContext;
use nalgebra::DVector;

/// Options of the evolution driver.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub step: StepOptions,
    /// Record a failed step and keep going instead of aborting.
    pub continue_on_failure: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            step: StepOptions::default(),
            continue_on_failure: false,
        }
    }
}

/// Result of a quasistatic run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Converged steps, in order (failed steps are skipped in
    /// continue-on-failure mode).
    pub steps: Vec<StepSolution>,
    /// Friction dissipation per converged step; each entry is
    /// nonnegative.
    pub dissipation: Vec<f64>,
    /// Failed step indices with their errors (continue-on-failure mode).
    pub failures: Vec<(usize, FemError)>,
}

/// Runs a sequence of incremental steps with history chaining.
///
/// Aborts on the first failed step with [`FemError::StepFailed`] unless
/// `continue_on_failure` is set, in which case the failure is recorded
/// and later steps chain from the last converged state.
pub fn evolve_quasistatic(
    mesh: &DomainMesh,
    field: &ModulusField,
    sequence: &[ContactData],
    mode: &StepMode,
    opts: &EvolveOptions,
) -> Result<Trajectory, FemError> {
    let alpha = resolve_alpha(mesh, field, mode)?;
    let oblique = !matches!(mode, StepMode::Isotropic);
    if oblique {
        for data in sequence {
            let margin = friction_condition_check(&data.friction, &alpha);
            if margin <= 0.0 {
                return Err(FemError::FrictionConditionViolated { margin });
            }
        }
    }
    let ctx = FemContext::new(mesh, field)?;
    let mut trajectory = Trajectory {
        steps: Vec::with_capacity(sequence.len()),
        dissipation: Vec::with_capacity(sequence.len()),
        failures: Vec::new(),
    };
    let mut prev: Option<(StepSolution, DVector<f64>)> = None;

    for (i, given) in sequence.iter().enumerate() {
        let mut data = given.clone();
        let mut step_opts = opts.step.clone();
        if let Some((p, _)) = &prev {
            data.w_t = p.traces.u_t.clone();
            step_opts.t0 = Some(p.t.values.clone());
        }
        let warm = prev.as_ref().map(|(p, b)| (p, b));
        match step_with_context(&ctx, &data, &alpha, oblique, &step_opts, warm) {
            Ok(sol) => {
                let b = assemble_load(mesh, &data);
                trajectory.dissipation.push(sol.report.dissipation);
                prev = Some((sol.clone(), b));
                trajectory.steps.push(sol);
            }
            Err(source) => {
                if opts.continue_on_failure {
                    trajectory.failures.push((i, source));
                } else {
                    return Err(FemError::StepFailed {
                        step: i,
                        source: Box::new(source),
                    });
                }
            }
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::isotropic_modulus;
    use crate::fem::data::NodeField2;

    fn press_mesh() -> DomainMesh {
        DomainMesh::contact_square(6, 4)
    }

    fn press_data(mesh: &DomainMesh, fx: f64) -> ContactData {
        let mut data = ContactData::zero(mesh);
        data.body_force = NodeField2::Constant([fx, -1.0]);
        data.friction = vec![0.4; mesh.n_contact()];
        data
    }

    fn field() -> ModulusField {
        ModulusField::Uniform(isotropic_modulus(1.0, 0.3).unwrap())
    }

    #[test]
    fn constant_load_steps_reproduce_the_first_exactly() {
        let mesh = press_mesh();
        let data = press_data(&mesh, 0.5);
        let sequence = vec![data.clone(), data.clone(), data];
        let traj = evolve_quasistatic(
            &mesh,
            &field(),
            &sequence,
            &StepMode::Isotropic,
            &EvolveOptions::default(),
        )
        .unwrap();
        assert_eq!(traj.steps.len(), 3);
        assert!(!traj.steps[0].report.warm_started);
        assert!(traj.steps[1].report.warm_started);
        assert!(traj.steps[2].report.warm_started);
        // Bitwise equality of the physical outputs after the first step.
        assert_eq!(traj.steps[0].u, traj.steps[1].u);
        assert_eq!(traj.steps[1].u, traj.steps[2].u);
        assert_eq!(traj.steps[0].t.values, traj.steps[1].t.values);
        assert_eq!(traj.steps[0].traces, traj.steps[1].traces);
        // A warm fixed point slips no further: zero dissipation.
        assert_eq!(traj.dissipation[1], 0.0);
        assert_eq!(traj.dissipation[2], 0.0);
    }

    #[test]
    fn dissipation_is_nonnegative_under_load_reversal() {
        let mesh = press_mesh();
        let sequence = vec![
            press_data(&mesh, 0.8),
            press_data(&mesh, -0.8),
            press_data(&mesh, 0.8),
        ];
        let traj = evolve_quasistatic(
            &mesh,
            &field(),
            &sequence,
            &StepMode::Isotropic,
            &EvolveOptions::default(),
        )
        .unwrap();
        assert_eq!(traj.steps.len(), 3);
        for (i, d) in traj.dissipation.iter().enumerate() {
            assert!(*d >= 0.0, "step {i} dissipated {d}");
        }
        // Reversing the tangential load makes the body slip back: the
        // reversal steps dissipate.
        assert!(traj.dissipation[1] > 1e-6);
        assert!(traj.dissipation[2] > 1e-6);
    }

    #[test]
    fn history_chains_through_the_tangential_trace() {
        let mesh = press_mesh();
        let sequence = vec![press_data(&mesh, 0.8), press_data(&mesh, 0.0)];
        let traj = evolve_quasistatic(
            &mesh,
            &field(),
            &sequence,
            &StepMode::Isotropic,
            &EvolveOptions::default(),
        )
        .unwrap();
        // After the pushed step the body stays displaced; the unloaded
        // step relaxes elastically but friction holds some of the slip.
        let pushed: f64 = traj.steps[0].traces.u_t.iter().sum();
        let relaxed: f64 = traj.steps[1].traces.u_t.iter().sum();
        assert!(pushed.abs() > 1e-3);
        assert!(relaxed.abs() > 1e-6, "friction should retain displacement");
    }

    #[test]
    fn abort_and_continue_modes_handle_failed_steps() {
        let mesh = press_mesh();
        let sequence = vec![press_data(&mesh, 0.5), press_data(&mesh, 0.5)];
        // max_outer = 0 forces NotConverged in every step.
        let mut opts = EvolveOptions::default();
        opts.step.max_outer = 0;
        let err = evolve_quasistatic(
            &mesh,
            &field(),
            &sequence,
            &StepMode::Isotropic,
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, FemError::StepFailed { step: 0, .. }));

        opts.continue_on_failure = true;
        let traj = evolve_quasistatic(
            &mesh,
            &field(),
            &sequence,
            &StepMode::Isotropic,
            &opts,
        )
        .unwrap();
        assert!(traj.steps.is_empty());
        assert_eq!(traj.failures.len(), 2);
        assert!(matches!(
            traj.failures[0].1,
            FemError::NotConverged { .. }
        ));
    }
}
