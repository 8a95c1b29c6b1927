//! The infinite-population generation map `G = M ∘ F` and its
//! finite-population sampler.

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use super::fitness::FitnessPipeline;
use super::matrix::{check_translation_commutation, MixingMatrix};
use super::operators::Kernel;
use super::population::PopulationVector;
use crate::error::{Error, Result};
use crate::random::RandomSource;
use crate::ring::GenomeSpace;

/// Proportional selection `F(p)_i = Φ_i p_i / Σ_j Φ_j p_j`.
pub fn select(p: &PopulationVector, phi: &[f64]) -> Result<PopulationVector> {
    if p.len() != phi.len() {
        return Err(Error::Usage(format!(
            "population has {} entries, fitness has {}",
            p.len(),
            phi.len()
        )));
    }
    PopulationVector::settle(select_raw(p.as_slice(), phi))
}

pub fn select_raw(p: &[f64], phi: &[f64]) -> Vec<f64> {
    let mean: f64 = p.iter().zip(phi).map(|(x, f)| x * f).sum();
    p.iter().zip(phi).map(|(x, f)| x * f / mean).collect()
}

/// A configured evolutionary algorithm: fitness vector plus mixing operators.
#[derive(Clone, Debug)]
pub struct Heuristic {
    space: GenomeSpace,
    fitness: Vec<f64>,
    kernel: Kernel,
    mixing: MixingMatrix,
}

impl Heuristic {
    /// Builds the mixing matrix after checking, once, that the operators
    /// commute with the translation group.
    pub fn new(pipeline: &FitnessPipeline, kernel: Kernel) -> Result<Self> {
        let space = *kernel.space();
        let fitness = pipeline.fitness_vector(&space)?;
        Self::with_fitness(fitness, kernel)
    }

    pub fn with_fitness(fitness: Vec<f64>, kernel: Kernel) -> Result<Self> {
        let space = *kernel.space();
        if fitness.len() != space.n() {
            return Err(Error::validation("fitness", "fitness vector length differs from n"));
        }
        if let Some(i) = fitness.iter().position(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::validation("fitness", format!("fitness of genome {i} is not positive")));
        }
        check_translation_commutation(&kernel)?;
        let mixing = MixingMatrix::from_kernel(&kernel)?;
        Ok(Heuristic {
            space,
            fitness,
            kernel,
            mixing,
        })
    }

    pub fn space(&self) -> &GenomeSpace {
        &self.space
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn mixing(&self) -> &MixingMatrix {
        &self.mixing
    }

    fn check_len(&self, p: &PopulationVector) -> Result<()> {
        if p.len() != self.space.n() {
            return Err(Error::Usage(format!(
                "population has {} entries, expected {}",
                p.len(),
                self.space.n()
            )));
        }
        Ok(())
    }

    pub fn select(&self, p: &PopulationVector) -> Result<PopulationVector> {
        select(p, &self.fitness)
    }

    pub fn mix(&self, p: &PopulationVector) -> Result<PopulationVector> {
        self.check_len(p)?;
        PopulationVector::settle(self.mixing.mix_raw(p.as_slice()))
    }

    /// `G(p) = M(F(p))`.
    pub fn generation(&self, p: &PopulationVector) -> Result<PopulationVector> {
        self.check_len(p)?;
        PopulationVector::settle(self.generation_raw(p.as_slice()))
    }

    /// `G` extended to the affine hull of the simplex, without validation.
    /// Used for finite differences that step slightly outside the simplex.
    pub fn generation_raw(&self, p: &[f64]) -> Vec<f64> {
        self.mixing.mix_raw(&select_raw(p, &self.fitness))
    }

    /// Full `n × n` Jacobian `dG = dM(F(p)) · dF(p)`.
    pub fn jacobian_full(&self, p: &[f64]) -> DMatrix<f64> {
        let n = self.space.n();
        let phi = &self.fitness;
        let mean: f64 = p.iter().zip(phi).map(|(x, f)| x * f).sum();
        let df = DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { phi[i] / mean } else { 0.0 };
            diag - phi[i] * p[i] * phi[j] / (mean * mean)
        });
        self.mixing.mix_jacobian(&select_raw(p, phi)) * df
    }

    /// One generation of the random heuristic: `mu` children, each from two
    /// parents drawn by proportional selection from `p`, then crossover and
    /// mutation. Returns the members (sorted) and the empirical vector, whose
    /// expectation is `G(p)`.
    pub fn sample_generation(
        &self,
        p: &PopulationVector,
        mu: usize,
        rng: &mut RandomSource,
    ) -> Result<(Vec<usize>, PopulationVector)> {
        self.check_len(p)?;
        if mu == 0 {
            return Err(Error::validation("mu", "population size must be at least 1"));
        }
        let weights: Vec<f64> = p.as_slice().iter().zip(&self.fitness).map(|(x, f)| x * f).collect();
        let parents = WeightedIndex::new(&weights)
            .map_err(|e| Error::Numeric(format!("selection weights: {e}")))?;
        let mut members: Vec<usize> = (0..mu)
            .map(|_| {
                let u = parents.sample(rng.rng());
                let v = parents.sample(rng.rng());
                self.kernel.sample_child(u, v, rng)
            })
            .collect();
        members.sort_unstable();
        let mut counts = vec![0.0; self.space.n()];
        for &m in &members {
            counts[m] += 1.0;
        }
        let empirical = PopulationVector::normalized(counts)?;
        Ok((members, empirical))
    }
}
