//! Exact rational evaluation of the mixing kernel for small spaces, so that
//! commutation can be checked with zero tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::operators::Kernel;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::ring::GenomeSpace;

/// Largest space for which exact mode is offered.
pub const EXACT_MAX_N: usize = 64;

#[derive(Clone, Debug)]
pub struct ExactKernel {
    space: GenomeSpace,
    masks: Vec<(usize, BigRational)>,
    q: BigRational,
}

fn rational(x: f64, field: &str) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::validation(field, format!("{x} is not finite")))
}

impl ExactKernel {
    /// Converts a floating-point kernel; every `f64` is an exact dyadic
    /// rational, so no rounding happens here.
    pub fn from_kernel(kernel: &Kernel) -> Result<Self> {
        let masks = kernel
            .crossover()
            .masks()
            .iter()
            .map(|&(s, w)| Ok((s, rational(w, "crossover.masks")?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(*kernel.space(), masks, rational(kernel.mutation().q, "mutation.q")?)
    }

    pub fn new(space: GenomeSpace, masks: Vec<(usize, BigRational)>, q: BigRational) -> Result<Self> {
        if space.n() > EXACT_MAX_N {
            return Err(Error::Resource(format!(
                "exact mode supports n <= {EXACT_MAX_N}, got {}",
                space.n()
            )));
        }
        Ok(ExactKernel { space, masks, q })
    }

    fn mutation(&self, c: usize, omega: usize) -> BigRational {
        let h = self.space.hamming_raw(c, omega) as usize;
        let same = self.space.l() as usize - h;
        let other = &self.q / BigRational::from_integer(BigInt::from(self.space.d() - 1));
        let stay = BigRational::one() - &self.q;
        num_traits::pow(stay, same) * num_traits::pow(other, h)
    }

    pub fn b(&self, u: usize, v: usize, omega: usize) -> BigRational {
        let sp = &self.space;
        self.masks.iter().fold(BigRational::zero(), |acc, (s, w)| {
            let c = sp.add_raw(sp.mul_raw(u, *s), sp.mul_raw(v, sp.complement_raw(*s)));
            acc + w * self.mutation(c, omega)
        })
    }

    pub fn a(&self, u: usize, v: usize, omega: usize) -> BigRational {
        (self.b(u, v, omega) + self.b(v, u, omega)) / BigRational::from_integer(BigInt::from(2))
    }
}

/// Exact commutation: either every `a(π(u), π(v), π(ω)) = a(u, v, ω)`, or
/// the first violating `(element label, u, v, ω)`.
pub fn commutes_exact(group: &PermutationGroup, kernel: &ExactKernel) -> Option<(usize, usize, usize, usize)> {
    let n = group.degree();
    let mut table = Vec::with_capacity(n * n * n);
    for u in 0..n {
        for v in 0..n {
            for w in 0..n {
                table.push(kernel.a(u, v, w));
            }
        }
    }
    let at = |u: usize, v: usize, w: usize| &table[(u * n + v) * n + w];
    for (label, pi) in group.elements().iter().enumerate() {
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if at(pi.apply(u), pi.apply(v), pi.apply(w)) != at(u, v, w) {
                        return Some((label, u, v, w));
                    }
                }
            }
        }
    }
    None
}
