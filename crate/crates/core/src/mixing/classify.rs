//! Exhaustive checks that the finite operators belong to the classes they
//! claim: mutation acts per individual, crossover reads several parents,
//! selection only returns members of the parent population.

use std::fmt;

use serde::Serialize;

use super::operators::Kernel;
use crate::error::Result;
use crate::random::RandomSource;

#[derive(Clone, Debug, Serialize)]
pub struct PropertyCheck {
    pub operator: String,
    pub property: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorReport {
    pub checks: Vec<PropertyCheck>,
}

impl OperatorReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

impl fmt::Display for OperatorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.holds { "✓" } else { "✗" };
            writeln!(f, "{}: {} {} ({})", c.operator, c.property, mark, c.detail)?;
        }
        Ok(())
    }
}

/// Runs the three checks on `kernel`'s space (keep `n` small: the mutation
/// check enumerates pairs of individuals).
pub fn classify_operator_properties(kernel: &Kernel, fitness: &[f64], seed: u64) -> Result<OperatorReport> {
    let space = kernel.space();
    let n = space.n();
    let mutation = kernel.mutation();

    // Population-level mutation of a pair, enumerated digit event by digit
    // event over both individuals at once, must equal the product of the
    // per-individual kernels.
    let l = space.l() as usize;
    let d = space.d();
    let mut worst: f64 = 0.0;
    for u in 0..n {
        for v in 0..n {
            let joint_digits: Vec<u32> = space.digits_raw(u).into_iter().chain(space.digits_raw(v)).collect();
            for out_u in 0..n {
                for out_v in 0..n {
                    let targets: Vec<u32> =
                        space.digits_raw(out_u).into_iter().chain(space.digits_raw(out_v)).collect();
                    let joint: f64 = (0..2 * l)
                        .map(|i| mutation.digit_probability(d, joint_digits[i], targets[i]))
                        .product();
                    let factored = mutation.probability(space, u, out_u) * mutation.probability(space, v, out_v);
                    worst = worst.max((joint - factored).abs());
                }
            }
        }
    }
    let mutation_check = PropertyCheck {
        operator: "mutation".into(),
        property: "per-individual".into(),
        holds: worst < 1e-12,
        detail: format!("max |joint - product| = {worst:.1e}"),
    };

    // Crossover depends on more than one individual iff for some first
    // parent the child distribution changes with the second parent.
    let mut witness = None;
    'search: for u in 0..n {
        for v in 0..n {
            for v2 in v + 1..n {
                if (0..n).any(|w| (kernel.b(u, v, w) - kernel.b(u, v2, w)).abs() > 1e-12) {
                    witness = Some((u, v, v2));
                    break 'search;
                }
            }
        }
    }
    let crossover_check = PropertyCheck {
        operator: "crossover".into(),
        property: "multi-parent".into(),
        holds: witness.is_some(),
        detail: match witness {
            Some((u, v, v2)) => format!("child of ({u},{v}) differs from child of ({u},{v2})"),
            None => "child never depends on the second parent".into(),
        },
    };

    // Sampled proportional selection from a concrete population.
    let mut rng = RandomSource::new(seed);
    let population: Vec<usize> = (0..n).step_by(2).collect();
    let weights: Vec<f64> = population.iter().map(|&g| fitness[g]).collect();
    use rand::distr::{weighted::WeightedIndex, Distribution};
    let dist = WeightedIndex::new(&weights).map_err(|e| crate::Error::Numeric(e.to_string()))?;
    let draws = 1000;
    let outside = (0..draws)
        .map(|_| population[dist.sample(rng.rng())])
        .filter(|g| !population.contains(g))
        .count();
    let selection_check = PropertyCheck {
        operator: "selection".into(),
        property: "subset".into(),
        holds: outside == 0,
        detail: format!("{outside} of {draws} draws outside P"),
    };

    Ok(OperatorReport {
        checks: vec![mutation_check, crossover_check, selection_check],
    })
}
