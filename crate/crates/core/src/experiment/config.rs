//! Experiment configuration: JSON in, validated library objects out.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::problem::{self, Polynomial, PolynomialMap, Term};
use crate::flows::{ExitConfig, IntegratorConfig};
use crate::group::{GeneratorSpec, PermutationGroup};
use crate::mixing::{
    CrossoverKind, CrossoverSpec, Decoder, FitnessPipeline, Heuristic, Kernel, MixOrder, MutationSpec, Objective,
    PopulationVector, Scaling,
};
use crate::random::RandomSource;
use crate::ring::GenomeSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Orbits,
    Schema,
    Coverage,
    Mix,
    Evolve,
    Sample,
    Flow,
    Spectrum,
    Jsr,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::Orbits,
        Kind::Schema,
        Kind::Coverage,
        Kind::Mix,
        Kind::Evolve,
        Kind::Sample,
        Kind::Flow,
        Kind::Spectrum,
        Kind::Jsr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Orbits => "orbits",
            Kind::Schema => "schema",
            Kind::Coverage => "coverage",
            Kind::Mix => "mix",
            Kind::Evolve => "evolve",
            Kind::Sample => "sample",
            Kind::Flow => "flow",
            Kind::Spectrum => "spectrum",
            Kind::Jsr => "jsr",
        }
    }

    pub fn parse(name: &str) -> Result<Kind> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Usage(format!("unknown experiment kind `{name}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    /// Output root; the `OUT_DIR` environment variable takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<OperatorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitness: Option<FitnessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbits: Option<OrbitsParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<SchemaParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<MixParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolve: Option<EvolveParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jsr: Option<JsrParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub d: u32,
    pub l: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    /// `"rotation"`, `"translations"`, `"translation:<s>"`,
    /// `"digit_perm:<p0>,<p1>,…"`.
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub crossover: CrossoverConfig,
    pub mutation: MutationConfig,
    #[serde(default)]
    pub order: OrderConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossoverConfig {
    Uniform,
    OnePoint,
    None,
    /// `[[mask, weight], …]`.
    Masks { masks: Vec<(usize, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationConfig {
    pub q: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderConfig {
    #[default]
    CrossoverThenMutation,
    MutationThenCrossover,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitnessConfig {
    pub objective: ObjectiveConfig,
    #[serde(default)]
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Onemax {
        #[serde(default)]
        offset: f64,
    },
    Constant {
        value: f64,
    },
    Table {
        values: Vec<f64>,
    },
    Expr {
        source: String,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecoderConfig {
    #[default]
    Digits,
    Integer,
    Affine {
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingConfig {
    #[default]
    Identity,
    Power {
        alpha: f64,
    },
    Exponential {
        beta: f64,
    },
    LinearOffset {
        c: f64,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StartConfig {
    #[default]
    Uniform,
    Vertex {
        genome: usize,
    },
    Vector {
        p: Vec<f64>,
    },
    /// Uniform on the simplex, drawn from the experiment seed.
    Random,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitsParams {
    /// Points whose orbit and stabilizer are reported individually.
    pub points: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemaParams {
    /// Binary masks; all of them when absent.
    pub masks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageParams {
    /// Binary masks defining the relation family; the single-position
    /// relations when absent.
    pub masks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixParams {
    pub population: StartConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveParams {
    pub steps: usize,
    /// Stop once `‖p_{t+1} − p_t‖∞ < tol`; `0` runs all steps.
    pub tol: f64,
    pub start: StartConfig,
    /// Also refine and classify the fixed point near the final state.
    pub fixed_point: bool,
}

impl Default for EvolveParams {
    fn default() -> Self {
        EvolveParams {
            steps: 100,
            tol: 0.0,
            start: StartConfig::Uniform,
            fixed_point: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleParams {
    pub mu: usize,
    pub steps: usize,
    /// Number of runs; run `i` uses seed `seed + i`.
    pub runs: usize,
    pub start: StartConfig,
}

impl Default for SampleParams {
    fn default() -> Self {
        SampleParams {
            mu: 1000,
            steps: 1,
            runs: 20,
            start: StartConfig::Uniform,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowSystem {
    Gradient,
    Quotient,
    Projected,
    Exit,
    DoubleBracket,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    pub system: FlowSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<ObjectiveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit: Option<ExitParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExitParams {
    pub step: f64,
    pub horizon: f64,
    pub tol: f64,
}

impl Default for ExitParams {
    fn default() -> Self {
        let d = ExitConfig::default();
        ExitParams {
            step: d.step,
            horizon: d.horizon,
            tol: d.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixParams {
    /// Symmetric matrix, row-major.
    pub a: Vec<Vec<f64>>,
    /// Diagonal of `N`; `1, 2, …, k` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// `(x1² − 1)² + Σ_{i>1} xi²`.
    DoubleWell {
        #[serde(default = "one")]
        dim: usize,
    },
    /// `½ Σ ci xi²`.
    SphereQuadratic { coefficients: Vec<f64> },
    Linear { coefficients: Vec<f64> },
    Constant { dim: usize, value: f64 },
    /// Sparse monomials `{"coef", "powers"}`.
    Polynomial { dim: usize, terms: Vec<Term> },
    /// Coefficients of all monomials of degree `≤ degree`, graded, higher
    /// powers of earlier variables first.
    Dense { dim: usize, degree: u32, coefficients: Vec<f64> },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintSpec {
    /// Unit circle in the plane.
    Circle,
    Sphere {
        dim: usize,
        #[serde(default = "unit")]
        radius: f64,
    },
    Affine { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// One sparse polynomial per component.
    Polynomial { dim: usize, components: Vec<Vec<Term>> },
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumParams {
    /// The mutation matrix of the configured operators.
    Mutation,
    /// The mixing matrix `MM`.
    Mixing,
    /// The generation map at the fixed point reached from `start`.
    EaMap {
        #[serde(default)]
        start: StartConfig,
    },
    /// An explicit row-major matrix.
    Matrix { rows: Vec<Vec<f64>> },
    /// Group Fourier transform of a vector over the genome space.
    Dft { vector: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsrParams {
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub depth: usize,
}

fn field_error(err: serde_path_to_error::Error<serde_json::Error>) -> Error {
    let path = err.path().to_string();
    let inner = err.into_inner();
    if inner.is_syntax() || inner.is_eof() {
        return Error::Json(inner);
    }
    let field = if path == "." { "config".to_string() } else { path };
    Error::validation(field, inner.to_string())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(field_error)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Canonical serialization (hashed for run directory names).
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks that every block the kind needs is present and well-formed.
    pub fn validate(&self) -> Result<()> {
        match self.kind {
            Kind::Orbits => {
                let space = self.space()?;
                self.group()?;
                for (i, &p) in self.orbits.clone().unwrap_or_default().points.iter().enumerate() {
                    if p >= space.n() {
                        return Err(Error::validation(format!("orbits.points[{i}]"), format!("{p} is not a genome")));
                    }
                }
            }
            Kind::Schema | Kind::Coverage => {
                self.space()?;
            }
            Kind::Mix | Kind::Evolve | Kind::Sample => {
                self.heuristic()?;
            }
            Kind::Spectrum => match self.spectrum_params()? {
                SpectrumParams::Mutation | SpectrumParams::Mixing => {
                    self.kernel()?;
                }
                SpectrumParams::EaMap { .. } => {
                    self.heuristic()?;
                }
                SpectrumParams::Matrix { rows } => {
                    matrix_from_rows("spectrum.rows", rows)?;
                }
                SpectrumParams::Dft { vector } => {
                    if vector.len() != self.space()?.n() {
                        return Err(Error::validation("spectrum.vector", "length must equal d^l"));
                    }
                }
            },
            Kind::Flow => {
                self.flow_params()?.integrator.validate()?;
            }
            Kind::Jsr => {
                let p = self.jsr_params()?;
                jsr_matrices(p)?;
            }
        }
        if let Some(e) = &self.evolve {
            if !(e.tol >= 0.0) {
                return Err(Error::validation("evolve.tol", "must be nonnegative"));
            }
        }
        if let Some(s) = &self.sample {
            if s.mu == 0 {
                return Err(Error::validation("sample.mu", "must be at least 1"));
            }
            if s.runs == 0 {
                return Err(Error::validation("sample.runs", "must be at least 1"));
            }
        }
        Ok(())
    }

    fn require<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T> {
        block
            .as_ref()
            .ok_or_else(|| Error::validation(name, format!("required for kind {}", self.kind.name())))
    }

    pub fn space(&self) -> Result<GenomeSpace> {
        let s = self.require(&self.space, "space")?;
        GenomeSpace::new(s.d, s.l)
    }

    pub fn group(&self) -> Result<PermutationGroup> {
        let space = self.space()?;
        let g = self.require(&self.group, "group")?;
        let specs = g
            .generators
            .iter()
            .map(|s| s.parse::<GeneratorSpec>())
            .collect::<Result<Vec<_>>>()?;
        PermutationGroup::from_specs(&space, &specs)
    }

    pub fn kernel(&self) -> Result<Kernel> {
        let space = self.space()?;
        let ops = self.require(&self.operators, "operators")?;
        let crossover = match &ops.crossover {
            CrossoverConfig::Uniform => CrossoverSpec::preset(&space, CrossoverKind::Uniform),
            CrossoverConfig::OnePoint => CrossoverSpec::preset(&space, CrossoverKind::OnePoint),
            CrossoverConfig::None => CrossoverSpec::preset(&space, CrossoverKind::None),
            CrossoverConfig::Masks { masks } => CrossoverSpec::from_weights(&space, masks.clone())
                .map_err(|e| prefix_field(e, "operators."))?,
        };
        let mutation = MutationSpec::new(ops.mutation.q).map_err(|e| prefix_field(e, "operators."))?;
        let order = match ops.order {
            OrderConfig::CrossoverThenMutation => MixOrder::CrossoverThenMutation,
            OrderConfig::MutationThenCrossover => MixOrder::MutationThenCrossover,
        };
        Ok(Kernel::new(space, crossover, mutation).with_order(order))
    }

    pub fn fitness(&self) -> Result<FitnessPipeline> {
        let f = self.require(&self.fitness, "fitness")?;
        let objective = match &f.objective {
            ObjectiveConfig::Onemax { offset } => Objective::OneMax { offset: *offset },
            ObjectiveConfig::Constant { value } => Objective::Constant(*value),
            ObjectiveConfig::Table { values } => Objective::Table(values.clone()),
            ObjectiveConfig::Expr { source } => {
                Objective::expr(source).map_err(|e| Error::validation("fitness.objective.source", e.to_string()))?
            }
        };
        let decoder = match f.decoder {
            DecoderConfig::Digits => Decoder::Digits,
            DecoderConfig::Integer => Decoder::Integer,
            DecoderConfig::Affine { lo, hi } => Decoder::Affine { lo, hi },
        };
        let scaling = match f.scaling {
            ScalingConfig::Identity => Scaling::Identity,
            ScalingConfig::Power { alpha } => Scaling::Power(alpha),
            ScalingConfig::Exponential { beta } => Scaling::Exponential(beta),
            ScalingConfig::LinearOffset { c } => Scaling::LinearOffset(c),
        };
        Ok(FitnessPipeline::new(decoder, objective, scaling))
    }

    pub fn heuristic(&self) -> Result<Heuristic> {
        Heuristic::new(&self.fitness()?, self.kernel()?)
    }

    pub fn start(&self, start: &StartConfig, field: &str) -> Result<PopulationVector> {
        let n = self.space()?.n();
        match start {
            StartConfig::Uniform => Ok(PopulationVector::uniform(n)),
            StartConfig::Vertex { genome } => {
                if *genome >= n {
                    return Err(Error::validation(format!("{field}.genome"), format!("{genome} is not a genome")));
                }
                Ok(PopulationVector::vertex(n, *genome))
            }
            StartConfig::Vector { p } => {
                if p.len() != n {
                    return Err(Error::validation(format!("{field}.p"), format!("expected {n} entries")));
                }
                PopulationVector::new(p.clone()).map_err(|e| Error::validation(format!("{field}.p"), e.to_string()))
            }
            StartConfig::Random => Ok(random_simplex_point(n, &mut RandomSource::new(self.seed))),
        }
    }

    pub fn flow_params(&self) -> Result<&FlowParams> {
        self.require(&self.flow, "flow")
    }

    pub fn spectrum_params(&self) -> Result<&SpectrumParams> {
        self.require(&self.spectrum, "spectrum")
    }

    pub fn jsr_params(&self) -> Result<&JsrParams> {
        self.require(&self.jsr, "jsr")
    }
}

fn prefix_field(err: Error, prefix: &str) -> Error {
    match err {
        Error::Validation { field, message } => Error::validation(format!("{prefix}{field}"), message),
        other => other,
    }
}

/// A point drawn uniformly from the simplex (normalized exponentials).
pub fn random_simplex_point(n: usize, rng: &mut RandomSource) -> PopulationVector {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.rng().random::<f64>()).ln()).collect();
    PopulationVector::normalized(w).expect("positive weights")
}

pub fn matrix_from_rows(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::validation(field, "rows must be nonempty and of equal length"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation(field, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn jsr_matrices(p: &JsrParams) -> Result<Vec<DMatrix<f64>>> {
    if p.matrices.is_empty() {
        return Err(Error::validation("jsr.matrices", "at least one matrix is required"));
    }
    if !(1..=12).contains(&p.depth) {
        return Err(Error::validation("jsr.depth", "must be between 1 and 12"));
    }
    let set = p
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_rows(&format!("jsr.matrices[{i}]"), m))
        .collect::<Result<Vec<_>>>()?;
    let k = set[0].nrows();
    if set.iter().any(|m| m.nrows() != k || m.ncols() != k) {
        return Err(Error::validation("jsr.matrices", "matrices must be square and of one size"));
    }
    Ok(set)
}

impl ObjectiveSpec {
    pub fn build(&self) -> Result<Polynomial> {
        match self {
            ObjectiveSpec::DoubleWell { dim } => problem::double_well(*dim),
            ObjectiveSpec::SphereQuadratic { coefficients } => problem::diagonal_quadratic(coefficients),
            ObjectiveSpec::Linear { coefficients } => problem::linear(coefficients),
            ObjectiveSpec::Constant { dim, value } => {
                if *dim == 0 {
                    return Err(Error::validation("flow.objective.dim", "must be at least 1"));
                }
                Ok(Polynomial::constant(*dim, *value))
            }
            ObjectiveSpec::Polynomial { dim, terms } => Polynomial::new(*dim, terms.clone()),
            ObjectiveSpec::Dense { dim, degree, coefficients } => Polynomial::dense(*dim, *degree, coefficients),
        }
        .map_err(|e| prefix_field(e, "flow.objective."))
    }
}

impl ConstraintSpec {
    pub fn build(&self) -> Result<PolynomialMap> {
        match self {
            ConstraintSpec::Circle => problem::sphere(2, 1.0),
            ConstraintSpec::Sphere { dim, radius } => problem::sphere(*dim, *radius),
            ConstraintSpec::Affine { a, b } => problem::affine(a, b),
            ConstraintSpec::Polynomial { dim, components } => {
                let polys = components
                    .iter()
                    .map(|terms| Polynomial::new(*dim, terms.clone()))
                    .collect::<Result<Vec<_>>>()?;
                PolynomialMap::new(*dim, polys)
            }
        }
        .map_err(|e| prefix_field(e, "flow.constraint."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::SmoothObjective;

    #[test]
    fn parses_minimal_orbits() {
        let c = ExperimentConfig::from_json(
            r#"{"kind":"orbits","space":{"d":2,"l":3},"group":{"generators":["rotation"]}}"#,
        )
        .unwrap();
        assert_eq!(c.group().unwrap().orbit_partition().len(), 4);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn errors_name_fields() {
        let field_of = |text: &str| match ExperimentConfig::from_json(text) {
            Err(Error::Validation { field, .. }) => field,
            other => panic!("expected validation error, got {other:?}"),
        };
        assert_eq!(field_of(r#"{"kind":"schema","space":{"d":1,"l":3}}"#), "space.d");
        assert_eq!(field_of(r#"{"kind":"schema","space":{"d":2,"l":3,"x":1}}"#), "space.x");
        assert_eq!(field_of(r#"{"kind":"orbits","space":{"d":2,"l":3}}"#), "group");
        assert_eq!(field_of(r#"{"kind":"schema","space":{"d":2,"l":3},"bogus":1}"#), "bogus");
        assert_eq!(field_of(r#"{"kind":"nope"}"#), "kind");
        assert_eq!(
            field_of(
                r#"{"kind":"evolve","space":{"d":2,"l":2},"operators":{"crossover":{"kind":"none"},"mutation":{"q":2}},
                "fitness":{"objective":{"kind":"onemax","offset":1}}}"#
            ),
            "operators.mutation.q"
        );
        assert!(matches!(ExperimentConfig::from_json("{"), Err(Error::Json(_))));
    }

    #[test]
    fn random_start_is_seeded() {
        let text = r#"{"kind":"mix","seed":7,"space":{"d":2,"l":2},
            "operators":{"crossover":{"kind":"uniform"},"mutation":{"q":0.1}},
            "fitness":{"objective":{"kind":"constant","value":1}}}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        let a = c.start(&StartConfig::Random, "mix.population").unwrap();
        let b = c.start(&StartConfig::Random, "mix.population").unwrap();
        assert_eq!(a, b);
        assert!(c.start(&StartConfig::Vertex { genome: 9 }, "mix.population").is_err());
    }

    #[test]
    fn round_trips() {
        let text = r#"{"kind":"flow","flow":{"system":"gradient","objective":{"preset":"double_well"},"x0":[0.3]}}"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        let again = ExperimentConfig::from_json(&c.canonical_json()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.flow_params().unwrap().objective.as_ref().unwrap().build().unwrap().value(&[0.0]), 1.0);
    }
}
