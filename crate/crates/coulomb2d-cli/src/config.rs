//! Config schemas of the subcommands: JSON documents validated before any
//! solve. Unknown keys are rejected so a typo cannot silently change a
//! run. All physical inputs are nondimensional.

use crate::error::CliError;
use coulomb2d::fem::assembly::ModulusField;
use coulomb2d::fem::contact::StepMode;
use coulomb2d::fem::data::{ContactData, EdgeLoad, NodeField2};
use coulomb2d::fem::mesh::DomainMesh;
use coulomb2d::{isotropic_modulus, ElasticModulus, HalfSpaceConstants};
use serde::Deserialize;

/// Elastic stiffness, given as engineering parameters or as the upper
/// triangle of the 3×3 stiffness in one of the two tensor conventions.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ModulusSpec {
    Isotropic {
        e: f64,
        nu: f64,
    },
    /// Upper triangle `[m11, m12, m13, m22, m23, m33]` in the orthonormal
    /// (Mandel) tensor basis.
    Mandel { mandel: [f64; 6] },
    /// Upper triangle `[c11, c12, c13, c22, c23, c33]` in the engineering
    /// (Voigt) convention with shear strain `2*e12`.
    Voigt { voigt: [f64; 6] },
}

impl ModulusSpec {
    pub fn resolve(&self) -> Result<ElasticModulus, CliError> {
        let modulus = match self {
            ModulusSpec::Isotropic { e, nu } => isotropic_modulus(*e, *nu)
                .map_err(|err| CliError::Config(format!("modulus: {err}")))?,
            ModulusSpec::Mandel { mandel } => ElasticModulus::from_upper(*mandel),
            ModulusSpec::Voigt { voigt } => {
                let [c11, c12, c13, c22, c23, c33] = *voigt;
                let r2 = std::f64::consts::SQRT_2;
                ElasticModulus::from_upper([c11, c12, r2 * c13, c22, r2 * c23, 2.0 * c33])
            }
        };
        if coulomb2d::ellipticity_constant(&modulus) <= 0.0 {
            return Err(CliError::Config(
                "modulus is not strongly elliptic".into(),
            ));
        }
        Ok(modulus)
    }
}

/// Half-space surface-response constants: computed from a modulus or given
/// directly as synthetic values.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ConstantsSpec {
    FromModulus {
        modulus: ModulusSpec,
    },
    Synthetic {
        synthetic: SyntheticConstants,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl ConstantsSpec {
    pub fn resolve(&self) -> Result<HalfSpaceConstants, CliError> {
        match self {
            ConstantsSpec::FromModulus { modulus } => {
                let m = modulus.resolve()?;
                coulomb2d::n2d_constants(&m)
                    .map_err(|err| CliError::Config(format!("constants: {err}")))
            }
            ConstantsSpec::Synthetic { synthetic } => {
                if synthetic.c1 <= 0.0 {
                    return Err(CliError::Config(
                        "synthetic constants need c1 > 0".into(),
                    ));
                }
                Ok(HalfSpaceConstants {
                    c1: synthetic.c1,
                    c2: synthetic.c2,
                    c3: synthetic.c3,
                    c4: synthetic.c4,
                    alpha: synthetic.c2 / synthetic.c1,
                })
            }
        }
    }
}

/// Domain mesh: generated structured meshes or files on disk.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MeshSpec {
    /// Unit square, contact chain on the bottom edge, clamped top,
    /// traction-free sides; `nx × ny` cells.
    ContactSquare { contact_square: GridSize },
    /// JSON mesh file `{nodes, triangles, boundary_edges}`.
    JsonFile { json: String },
    /// Classic ASCII triangle-mesh triple.
    TriangleFiles { triangle: TrianglePaths },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrianglePaths {
    pub node: String,
    pub ele: String,
    pub edge: String,
}

impl MeshSpec {
    pub fn resolve(&self) -> Result<DomainMesh, CliError> {
        match self {
            MeshSpec::ContactSquare { contact_square } => {
                if contact_square.nx == 0 || contact_square.ny == 0 {
                    return Err(CliError::Config("mesh cells must be positive".into()));
                }
                Ok(DomainMesh::contact_square(contact_square.nx, contact_square.ny))
            }
            MeshSpec::JsonFile { json } => {
                let text = std::fs::read_to_string(json).map_err(|err| {
                    CliError::Config(format!("mesh file {json}: {err}"))
                })?;
                DomainMesh::from_json_str(&text)
                    .map_err(|err| CliError::Config(format!("mesh file {json}: {err}")))
            }
            MeshSpec::TriangleFiles { triangle } => {
                let read = |p: &String| {
                    std::fs::read_to_string(p)
                        .map_err(|err| CliError::Config(format!("mesh file {p}: {err}")))
                };
                let node = read(&triangle.node)?;
                let ele = read(&triangle.ele)?;
                let edge = read(&triangle.edge)?;
                DomainMesh::from_triangle_format(&node, &ele, &edge)
                    .map_err(|err| CliError::Config(format!("triangle mesh: {err}")))
            }
        }
    }
}

/// A per-contact-node scalar field given as one number or one value per
/// node.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScalarField {
    Uniform(f64),
    PerNode(Vec<f64>),
}

impl ScalarField {
    pub fn resolve(&self, m: usize, what: &str) -> Result<Vec<f64>, CliError> {
        match self {
            ScalarField::Uniform(v) => Ok(vec![*v; m]),
            ScalarField::PerNode(vals) => {
                if vals.len() != m {
                    return Err(CliError::Config(format!(
                        "{what} has {} entries for {m} contact nodes",
                        vals.len()
                    )));
                }
                Ok(vals.clone())
            }
        }
    }
}

fn default_scalar_zero() -> ScalarField {
    ScalarField::Uniform(0.0)
}

/// Friction-coupling mode of a contact step.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ModeSpec {
    Named(String),
    Alpha { alpha: Vec<f64> },
}

impl Default for ModeSpec {
    fn default() -> Self {
        ModeSpec::Named("isotropic".into())
    }
}

impl ModeSpec {
    pub fn resolve(&self, m: usize) -> Result<StepMode, CliError> {
        match self {
            ModeSpec::Named(name) => match name.as_str() {
                "isotropic" => Ok(StepMode::Isotropic),
                "oblique" => Ok(StepMode::Oblique),
                other => Err(CliError::Config(format!(
                    "mode must be \"isotropic\", \"oblique\", or {{\"alpha\": [...]}}, got \"{other}\""
                ))),
            },
            ModeSpec::Alpha { alpha } => {
                if alpha.len() != m {
                    return Err(CliError::Config(format!(
                        "alpha has {} entries for {m} contact nodes",
                        alpha.len()
                    )));
                }
                Ok(StepMode::ObliqueWithAlpha(alpha.clone()))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeLoadSpec {
    pub nodes: [usize; 2],
    pub traction: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceLoadSpec {
    pub node: usize,
    pub force: [f64; 2],
}

/// Config of `constants`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub modulus: ModulusSpec,
    /// Samples of the boundary-orientation sweep over [0, π]; default 91
    /// (2° steps).
    #[serde(default = "default_sweep_points")]
    pub sweep_points: usize,
}

fn default_sweep_points() -> usize {
    91
}

/// Config of `kernels`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelsConfig {
    pub n: usize,
    /// "uniform" or "endpoint" (arccos-graded toward ±1; resolves the
    /// endpoint singularity of the equilibrium density). Default
    /// "endpoint".
    #[serde(default = "default_grading")]
    pub grading: String,
}

fn default_grading() -> String {
    "endpoint".into()
}

/// Indentor profile of the steady-sliding problem, as the gap at the
/// element midpoints (negative where pressed past touchdown).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum IndentorSpec {
    Flat { flat: DepthSpec },
    Parabola { parabola: DepthSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthSpec {
    pub depth: f64,
}

impl IndentorSpec {
    pub fn gap_at(&self, x: f64) -> f64 {
        match self {
            IndentorSpec::Flat { flat } => -flat.depth,
            IndentorSpec::Parabola { parabola } => -(parabola.depth - x * x),
        }
    }
}

/// Config of `steady-slide`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadySlideConfig {
    pub constants: ConstantsSpec,
    #[serde(default)]
    pub friction: f64,
    /// Sliding direction sign, +1 or −1. Default +1.
    #[serde(default = "default_w_sign")]
    pub w_sign: f64,
    pub n: usize,
    pub indentor: IndentorSpec,
    /// Extra mesh-doubling levels solved for the convergence report.
    #[serde(default)]
    pub doublings: usize,
}

fn default_w_sign() -> f64 {
    1.0
}

/// Shared FEM problem block of `contact-step`, `evolve`, and `probe`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FemProblemConfig {
    pub mesh: MeshSpec,
    pub modulus: ModulusSpec,
    #[serde(default)]
    pub body_force: [f64; 2],
    #[serde(default)]
    pub edge_loads: Vec<EdgeLoadSpec>,
    #[serde(default)]
    pub surface_loads: Vec<SurfaceLoadSpec>,
    #[serde(default = "default_scalar_zero")]
    pub friction: ScalarField,
    #[serde(default = "default_scalar_zero")]
    pub gap: ScalarField,
    #[serde(default = "default_scalar_zero")]
    pub w_t: ScalarField,
}

impl FemProblemConfig {
    pub fn resolve(&self) -> Result<(DomainMesh, ModulusField, ContactData), CliError> {
        let mesh = self.mesh.resolve()?;
        let modulus = self.modulus.resolve()?;
        let m = mesh.n_contact();
        let mut data = ContactData::zero(&mesh);
        data.body_force = NodeField2::Constant(self.body_force);
        for load in &self.edge_loads {
            data.edge_load.push(EdgeLoad {
                nodes: load.nodes,
                traction: load.traction,
            });
        }
        for load in &self.surface_loads {
            if load.node >= mesh.node_coords().len() {
                return Err(CliError::Config(format!(
                    "surface load on node {} outside mesh",
                    load.node
                )));
            }
            data.surface_load.insert(load.node, load.force);
        }
        data.friction = self.friction.resolve(m, "friction")?;
        data.gap = self.gap.resolve(m, "gap")?;
        data.w_t = self.w_t.resolve(m, "w_t")?;
        let field = ModulusField::Uniform(modulus);
        data.validate(&mesh)
            .map_err(|err| CliError::Config(format!("problem data: {err}")))?;
        Ok((mesh, field, data))
    }
}

/// Fixed-point driver knobs shared by `contact-step` and `evolve`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepKnobs {
    pub tol: Option<f64>,
    pub max_outer: Option<usize>,
    pub damping: Option<f64>,
}

impl StepKnobs {
    pub fn apply(&self, opts: &mut coulomb2d::fem::contact::StepOptions) -> Result<(), CliError> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0) {
                return Err(CliError::Config("tol must be positive".into()));
            }
            opts.tol = tol;
        }
        if let Some(max_outer) = self.max_outer {
            if max_outer == 0 {
                return Err(CliError::Config("max_outer must be positive".into()));
            }
            opts.max_outer = max_outer;
        }
        if let Some(damping) = self.damping {
            if !(damping > 0.0 && damping <= 1.0) {
                return Err(CliError::Config("damping must be in (0, 1]".into()));
            }
            opts.damping = damping;
        }
        Ok(())
    }
}

/// Config of `contact-step`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactStepConfig {
    #[serde(flatten)]
    pub problem: FemProblemConfig,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub options: Option<StepKnobs>,
}

/// One step of an `evolve` sequence: overrides applied to the base
/// problem. The slip reference `w_t` of steps after the first is chained
/// from the previous step by the driver, so a `w_t` override only affects
/// the first step.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveStepSpec {
    pub body_force: Option<[f64; 2]>,
    pub gap: Option<ScalarField>,
    pub friction: Option<ScalarField>,
    pub w_t: Option<ScalarField>,
}

/// Config of `evolve`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(flatten)]
    pub problem: FemProblemConfig,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub options: Option<StepKnobs>,
    pub steps: Vec<EvolveStepSpec>,
    /// Record failed steps and keep chaining instead of aborting.
    #[serde(default)]
    pub continue_on_failure: bool,
}

/// Config of `probe`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(flatten)]
    pub problem: FemProblemConfig,
    /// Random cone pairs for the monotonicity quotient.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Random rays for the coercivity trend.
    #[serde(default = "default_rays")]
    pub rays: usize,
    #[serde(default = "default_ray_scales")]
    pub ray_scales: Vec<f64>,
    /// Magnitude bound of the sampled traction densities.
    #[serde(default = "default_magnitude")]
    pub traction_magnitude: f64,
    /// Sample count of the continuity-exponent fit window.
    #[serde(default = "default_continuity_points")]
    pub continuity_points: usize,
    /// Half-width of the fit window in decades around the measured
    /// asymptote crossover.
    #[serde(default = "default_halfwidth")]
    pub continuity_halfwidth_decades: f64,
    /// Sampling seed; the `--seed` flag overrides it.
    #[serde(default)]
    pub seed: u64,
}

fn default_pairs() -> usize {
    100
}
fn default_rays() -> usize {
    4
}
fn default_ray_scales() -> Vec<f64> {
    vec![1.0, 2.0, 4.0, 8.0]
}
fn default_magnitude() -> f64 {
    2.0
}
fn default_continuity_points() -> usize {
    13
}
fn default_halfwidth() -> f64 {
    1.5
}

/// Parses a config document, rejecting unknown keys.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|err| CliError::Config(format!("config: {err}")))
}
