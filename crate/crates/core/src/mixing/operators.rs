//! Crossover and mutation: transition probabilities and their finite
//! (sampling) counterparts.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::random::RandomSource;
use crate::ring::GenomeSpace;

/// Named crossover mask distributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossoverKind {
    /// Equal weight on all `2^l` binary masks.
    Uniform,
    /// Equal weight on the prefix masks `1…10…0` with `1..l-1` leading ones.
    OnePoint,
    /// All mass on the all-ones mask: the child copies its first parent.
    None,
}

/// A probability distribution `χ` over binary masks.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossoverSpec {
    masks: Vec<(usize, f64)>,
}

impl CrossoverSpec {
    pub fn preset(space: &GenomeSpace, kind: CrossoverKind) -> Self {
        let binary: Vec<usize> = (0..space.n()).filter(|&s| space.is_binary_raw(s)).collect();
        let masks = match kind {
            CrossoverKind::Uniform => {
                let w = 1.0 / binary.len() as f64;
                binary.into_iter().map(|s| (s, w)).collect()
            }
            CrossoverKind::OnePoint if space.l() > 1 => {
                let l = space.l();
                let w = 1.0 / f64::from(l - 1);
                (1..l)
                    .map(|k| ((0..k).map(|i| space.unit_raw(i)).sum(), w))
                    .collect()
            }
            CrossoverKind::OnePoint | CrossoverKind::None => vec![(space.all_ones_raw(), 1.0)],
        };
        CrossoverSpec { masks }
    }

    /// Custom distribution; weights must be nonnegative, sum to 1 and sit on
    /// binary masks.
    pub fn from_weights(space: &GenomeSpace, masks: Vec<(usize, f64)>) -> Result<Self> {
        for &(s, w) in &masks {
            if s >= space.n() || !space.is_binary_raw(s) {
                return Err(Error::validation("crossover.masks", format!("mask {s} is not a binary genome")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::validation("crossover.masks", format!("weight {w} of mask {s} is invalid")));
            }
        }
        let total: f64 = masks.iter().map(|m| m.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::validation("crossover.masks", format!("weights sum to {total}, not 1")));
        }
        Ok(CrossoverSpec {
            masks: masks.into_iter().filter(|m| m.1 > 0.0).collect(),
        })
    }

    pub fn masks(&self) -> &[(usize, f64)] {
        &self.masks
    }
}

/// Independent-digit mutation: each digit is replaced, with probability `q`,
/// by a uniformly chosen different value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutationSpec {
    pub q: f64,
}

impl MutationSpec {
    pub fn new(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::validation("mutation.q", format!("rate {q} is outside [0, 1]")));
        }
        Ok(MutationSpec { q })
    }

    /// `Pr[c mutates to ω]`.
    pub fn probability(&self, space: &GenomeSpace, c: usize, omega: usize) -> f64 {
        let h = space.hamming_raw(c, omega) as i32;
        let same = space.l() as i32 - h;
        let other = self.q / f64::from(space.d() - 1);
        (1.0 - self.q).powi(same) * other.powi(h)
    }

    pub fn digit_probability(&self, d: u32, from: u32, to: u32) -> f64 {
        if from == to {
            1.0 - self.q
        } else {
            self.q / f64::from(d - 1)
        }
    }

    pub fn sample(&self, space: &GenomeSpace, c: usize, rng: &mut RandomSource) -> usize {
        if self.q == 0.0 {
            return c;
        }
        let d = space.d();
        let digits: Vec<u32> = space
            .digits_raw(c)
            .into_iter()
            .map(|x| {
                if rng.rng().random::<f64>() < self.q {
                    // uniform over the d-1 other values
                    let r = rng.rng().random_range(0..d - 1);
                    if r >= x { r + 1 } else { r }
                } else {
                    x
                }
            })
            .collect();
        space.from_digits_raw(&digits)
    }
}

/// Order in which crossover and mutation are composed when producing a child.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MixOrder {
    #[default]
    CrossoverThenMutation,
    MutationThenCrossover,
}

/// The child kernel `b(u, v, ω)` and its symmetrization `a(u, v, ω)`.
#[derive(Clone, Debug)]
pub struct Kernel {
    space: GenomeSpace,
    crossover: CrossoverSpec,
    mutation: MutationSpec,
    order: MixOrder,
}

impl Kernel {
    pub fn new(space: GenomeSpace, crossover: CrossoverSpec, mutation: MutationSpec) -> Self {
        Kernel {
            space,
            crossover,
            mutation,
            order: MixOrder::default(),
        }
    }

    pub fn with_order(mut self, order: MixOrder) -> Self {
        self.order = order;
        self
    }

    pub fn space(&self) -> &GenomeSpace {
        &self.space
    }

    pub fn crossover(&self) -> &CrossoverSpec {
        &self.crossover
    }

    pub fn mutation(&self) -> &MutationSpec {
        &self.mutation
    }

    pub fn order(&self) -> MixOrder {
        self.order
    }

    /// `c = u ⊗ s ⊕ v ⊗ s̄`.
    pub fn cross(&self, u: usize, v: usize, s: usize) -> usize {
        let sp = &self.space;
        sp.add_raw(sp.mul_raw(u, s), sp.mul_raw(v, sp.complement_raw(s)))
    }

    /// Probability that parents `u`, `v` (in this order) produce `ω`.
    pub fn b(&self, u: usize, v: usize, omega: usize) -> f64 {
        match self.order {
            MixOrder::CrossoverThenMutation => self
                .crossover
                .masks
                .iter()
                .map(|&(s, w)| w * self.mutation.probability(&self.space, self.cross(u, v, s), omega))
                .sum(),
            MixOrder::MutationThenCrossover => {
                // parents mutate independently; each digit of ω then comes
                // from the mutated parent selected by the mask
                let d = self.space.d();
                let (du, dv, dw) = (
                    self.space.digits_raw(u),
                    self.space.digits_raw(v),
                    self.space.digits_raw(omega),
                );
                self.crossover
                    .masks
                    .iter()
                    .map(|&(s, w)| {
                        let ds = self.space.digits_raw(s);
                        w * (0..du.len())
                            .map(|i| {
                                let parent = if ds[i] == 1 { du[i] } else { dv[i] };
                                self.mutation.digit_probability(d, parent, dw[i])
                            })
                            .product::<f64>()
                    })
                    .sum()
            }
        }
    }

    /// `a(u, v, ω) = (b(u, v, ω) + b(v, u, ω)) / 2`.
    pub fn a(&self, u: usize, v: usize, omega: usize) -> f64 {
        0.5 * (self.b(u, v, omega) + self.b(v, u, omega))
    }

    /// Row-stochastic `n × n` mutation matrix `U_{c,ω}`.
    pub fn mutation_matrix(&self) -> Result<nalgebra::DMatrix<f64>> {
        self.space.check_matrix_cap()?;
        let n = self.space.n();
        Ok(nalgebra::DMatrix::from_fn(n, n, |c, w| {
            self.mutation.probability(&self.space, c, w)
        }))
    }

    pub fn sample_mask(&self, rng: &mut RandomSource) -> usize {
        if self.crossover.masks.len() == 1 {
            return self.crossover.masks[0].0;
        }
        let dist = WeightedIndex::new(self.crossover.masks.iter().map(|m| m.1))
            .expect("crossover weights are validated");
        self.crossover.masks[dist.sample(rng.rng())].0
    }

    /// Draws one child of `u` and `v`.
    pub fn sample_child(&self, u: usize, v: usize, rng: &mut RandomSource) -> usize {
        let s = self.sample_mask(rng);
        match self.order {
            MixOrder::CrossoverThenMutation => {
                let c = self.cross(u, v, s);
                self.mutation.sample(&self.space, c, rng)
            }
            MixOrder::MutationThenCrossover => {
                let mu = self.mutation.sample(&self.space, u, rng);
                let mv = self.mutation.sample(&self.space, v, rng);
                self.cross(mu, mv, s)
            }
        }
    }
}
