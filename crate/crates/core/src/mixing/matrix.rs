//! The mixing matrix `MM_{u,v} = a(u, v, 0)` and the mixing scheme `M`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::operators::Kernel;
use crate::error::{Error, Result};
use crate::group::PermutationGroup;
use crate::ring::GenomeSpace;

#[derive(Clone, Debug)]
pub struct MixingMatrix {
    space: GenomeSpace,
    entries: DMatrix<f64>,
}

impl MixingMatrix {
    pub fn from_kernel(kernel: &Kernel) -> Result<Self> {
        let space = *kernel.space();
        space.check_matrix_cap()?;
        let n = space.n();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|u| (0..n).map(|v| kernel.a(u, v, 0)).collect())
            .collect();
        Ok(MixingMatrix {
            space,
            entries: DMatrix::from_fn(n, n, |u, v| rows[u][v]),
        })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn space(&self) -> &GenomeSpace {
        &self.space
    }

    /// `a(u, v, ω)` recovered by translation: `MM_{u⊖ω, v⊖ω}`.
    pub fn a(&self, u: usize, v: usize, omega: usize) -> f64 {
        let s = &self.space;
        self.entries[(s.sub_raw(u, omega), s.sub_raw(v, omega))]
    }

    /// `M(p)_ω = (σ p)ᵀ MM (σ p)` where `σ` translates by `ω`, i.e.
    /// `(σ p)_x = p_{x ⊕ ω}`. No simplex check; see
    /// [`super::Heuristic::mix`] for the validated form.
    pub fn mix_raw(&self, p: &[f64]) -> Vec<f64> {
        let n = self.space.n();
        let mut shifted = vec![0.0; n];
        (0..n)
            .map(|omega| {
                for (x, slot) in shifted.iter_mut().enumerate() {
                    *slot = p[self.space.add_raw(x, omega)];
                }
                let mut total = 0.0;
                for (u, &pu) in shifted.iter().enumerate() {
                    if pu == 0.0 {
                        continue;
                    }
                    let row: f64 = self
                        .entries
                        .row(u)
                        .iter()
                        .zip(&shifted)
                        .map(|(m, pv)| m * pv)
                        .sum();
                    total += pu * row;
                }
                total
            })
            .collect()
    }

    /// Jacobian of `M` at `p`: `∂M_ω/∂p_j = 2 Σ_v a(j, v, ω) p_v`.
    pub fn mix_jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let n = self.space.n();
        DMatrix::from_fn(n, n, |omega, j| {
            2.0 * (0..n).map(|v| self.a(j, v, omega) * p[v]).sum::<f64>()
        })
    }
}

/// Outcome of a commutation check.
#[derive(Clone, Debug, PartialEq)]
pub struct Commutation {
    pub commutes: bool,
    pub max_deviation: f64,
    /// `(element label, u, v, ω)` of the worst violation.
    pub witness: Option<(usize, usize, usize, usize)>,
}

/// Checks `a(π(u), π(v), π(ω)) = a(u, v, ω)` for every group element and
/// every triple, within `tol`.
pub fn commutes_with_action(
    group: &PermutationGroup,
    a: impl Fn(usize, usize, usize) -> f64 + Sync,
    tol: f64,
) -> Commutation {
    let n = group.degree();
    let table: Vec<f64> = (0..n * n * n)
        .into_par_iter()
        .map(|i| a(i / (n * n), (i / n) % n, i % n))
        .collect();
    let at = |u: usize, v: usize, w: usize| table[(u * n + v) * n + w];
    let mut worst = (0.0, None);
    for (label, pi) in group.elements().iter().enumerate() {
        if pi.is_identity() {
            continue;
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let dev = (at(pi.apply(u), pi.apply(v), pi.apply(w)) - at(u, v, w)).abs();
                    if dev > worst.0 {
                        worst = (dev, Some((label, u, v, w)));
                    }
                }
            }
        }
    }
    let commutes = worst.0 <= tol;
    Commutation {
        commutes,
        max_deviation: worst.0,
        witness: if commutes { None } else { worst.1 },
    }
}

/// Verifies that a kernel commutes with the translation group. Exhaustive up
/// to `n = 64`; above that, each unit translation is checked against a fixed
/// stride of triples.
pub fn check_translation_commutation(kernel: &Kernel) -> Result<()> {
    let space = kernel.space();
    let n = space.n();
    let tol = 1e-12;
    if n <= 64 {
        let group = PermutationGroup::full_translations(space)?;
        let c = commutes_with_action(&group, |u, v, w| kernel.a(u, v, w), tol);
        if !c.commutes {
            return Err(Error::Configuration(format!(
                "mixing does not commute with translations (deviation {:.3e} at {:?})",
                c.max_deviation, c.witness
            )));
        }
        return Ok(());
    }
    let stride = (n * n * n / 4096).max(1) | 1;
    for i in 0..space.l() {
        let t = space.unit_raw(i);
        let mut idx = 0usize;
        while idx < n * n * n {
            let (u, v, w) = (idx / (n * n), (idx / n) % n, idx % n);
            let shifted = kernel.a(space.add_raw(u, t), space.add_raw(v, t), space.add_raw(w, t));
            if (shifted - kernel.a(u, v, w)).abs() > tol {
                return Err(Error::Configuration(format!(
                    "mixing does not commute with translation by {t} at ({u}, {v}, {w})"
                )));
            }
            idx += stride;
        }
    }
    Ok(())
}
