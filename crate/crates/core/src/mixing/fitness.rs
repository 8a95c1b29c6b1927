//! The fitness pipeline `Φ = T_s ∘ f ∘ D`.

use evalexpr::{ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};

use crate::error::{Error, Result};
use crate::ring::GenomeSpace;

/// Decoding function `D : H → R^k`.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoder {
    /// The digit vector, position 0 first.
    Digits,
    /// The genome's integer value as a single coordinate.
    Integer,
    /// The integer value mapped linearly onto `[lo, hi]`.
    Affine { lo: f64, hi: f64 },
}

impl Decoder {
    pub fn decode(&self, space: &GenomeSpace, genome: usize) -> Vec<f64> {
        match self {
            Decoder::Digits => space.digits_raw(genome).into_iter().map(f64::from).collect(),
            Decoder::Integer => vec![genome as f64],
            Decoder::Affine { lo, hi } => {
                let span = (space.n() - 1).max(1) as f64;
                vec![lo + (hi - lo) * genome as f64 / span]
            }
        }
    }
}

/// Objective `f : R^k → R`.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `Σ x_i + offset`; with the digit decoder and `offset = 1` this is
    /// OneMax+1.
    OneMax { offset: f64 },
    Constant(f64),
    /// Looked up by the first decoded coordinate, which must be a genome
    /// index (use with [`Decoder::Integer`]).
    Table(Vec<f64>),
    /// Arithmetic expression over `x0, x1, …` (and `x` for `x0`).
    Expr { source: String, tree: Node<DefaultNumericTypes> },
}

impl Objective {
    pub fn expr(source: &str) -> Result<Self> {
        let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| Error::validation("fitness.expr", e.to_string()))?;
        Ok(Objective::Expr {
            source: source.to_string(),
            tree,
        })
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            Objective::OneMax { offset } => Ok(x.iter().sum::<f64>() + offset),
            Objective::Constant(c) => Ok(*c),
            Objective::Table(values) => {
                let i = x.first().copied().unwrap_or(f64::NAN);
                values
                    .get(i as usize)
                    .copied()
                    .filter(|_| i >= 0.0 && i.fract() == 0.0)
                    .ok_or_else(|| Error::Usage(format!("fitness table has no entry for {i}")))
            }
            Objective::Expr { tree, .. } => {
                let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
                for (i, &xi) in x.iter().enumerate() {
                    ctx.set_value(format!("x{i}"), Value::Float(xi))
                        .map_err(|e| Error::Numeric(e.to_string()))?;
                }
                if let Some(&x0) = x.first() {
                    ctx.set_value("x".into(), Value::Float(x0))
                        .map_err(|e| Error::Numeric(e.to_string()))?;
                }
                tree.eval_number_with_context(&ctx)
                    .map_err(|e| Error::validation("fitness.expr", e.to_string()))
            }
        }
    }
}

/// Fitness-scaling function `T_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scaling {
    Identity,
    Power(f64),
    Exponential(f64),
    LinearOffset(f64),
}

impl Scaling {
    pub fn apply(&self, f: f64) -> f64 {
        match *self {
            Scaling::Identity => f,
            Scaling::Power(alpha) => f.powf(alpha),
            Scaling::Exponential(beta) => (beta * f).exp(),
            Scaling::LinearOffset(c) => f + c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitnessPipeline {
    pub decoder: Decoder,
    pub objective: Objective,
    pub scaling: Scaling,
}

impl FitnessPipeline {
    pub fn new(decoder: Decoder, objective: Objective, scaling: Scaling) -> Self {
        FitnessPipeline {
            decoder,
            objective,
            scaling,
        }
    }

    /// OneMax+1 with the digit decoder and no scaling.
    pub fn onemax() -> Self {
        Self::new(Decoder::Digits, Objective::OneMax { offset: 1.0 }, Scaling::Identity)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Decoder::Integer, Objective::Constant(c), Scaling::Identity)
    }

    pub fn table(values: Vec<f64>) -> Self {
        Self::new(Decoder::Integer, Objective::Table(values), Scaling::Identity)
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn evaluate(&self, space: &GenomeSpace, genome: usize) -> Result<f64> {
        let x = self.decoder.decode(space, genome);
        Ok(self.scaling.apply(self.objective.evaluate(&x)?))
    }

    /// `Φ_i = T_s(f(D(i)))` for every genome; every entry must be finite and
    /// positive.
    pub fn fitness_vector(&self, space: &GenomeSpace) -> Result<Vec<f64>> {
        if let Objective::Table(values) = &self.objective {
            if values.len() != space.n() {
                return Err(Error::validation(
                    "fitness.values",
                    format!("table has {} entries, expected {}", values.len(), space.n()),
                ));
            }
        }
        (0..space.n())
            .map(|i| {
                let phi = self.evaluate(space, i)?;
                if !phi.is_finite() || phi <= 0.0 {
                    return Err(Error::validation(
                        "fitness",
                        format!("fitness of genome {i} is {phi}; it must be finite and positive"),
                    ));
                }
                Ok(phi)
            })
            .collect()
    }
}
