//! The operator stack: fitness pipeline, proportional selection, crossover
//! and mutation kernels, the mixing matrix and the generation map.

mod classify;
pub mod exact;
mod fitness;
mod heuristic;
mod matrix;
mod operators;
mod population;

pub use classify::{classify_operator_properties, OperatorReport, PropertyCheck};
pub use fitness::{Decoder, FitnessPipeline, Objective, Scaling};
pub use heuristic::{select, select_raw, Heuristic};
pub use matrix::{check_translation_commutation, commutes_with_action, Commutation, MixingMatrix};
pub use operators::{CrossoverKind, CrossoverSpec, Kernel, MixOrder, MutationSpec};
pub use population::{linf, PopulationVector, SIMPLEX_TOL};
