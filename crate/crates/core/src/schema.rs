//! Schemata as equivalence relations on `H`, representation functions and
//! coverage.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{OrbitPartition, PermutationGroup};
use crate::ring::GenomeSpace;

/// An equivalence relation, stored as its partition into classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EquivalenceRelation(OrbitPartition);

impl From<OrbitPartition> for EquivalenceRelation {
    fn from(p: OrbitPartition) -> Self {
        EquivalenceRelation(p)
    }
}

impl EquivalenceRelation {
    pub fn partition(&self) -> &OrbitPartition {
        &self.0
    }

    pub fn universal(space: &GenomeSpace) -> Self {
        OrbitPartition::from_labels(&vec![0u8; space.n()]).into()
    }

    pub fn singletons(space: &GenomeSpace) -> Self {
        OrbitPartition::from_labels(&(0..space.n()).collect::<Vec<_>>()).into()
    }

    /// Genomes are related iff they agree at digit position `i`.
    pub fn digit(space: &GenomeSpace, i: u32) -> Result<Self> {
        if i >= space.l() {
            return Err(Error::Usage(format!("digit position {i} out of range")));
        }
        Self::from_mask(space, space.unit_raw(i))
    }

    /// Schema family of a binary mask: genomes are related iff they agree on
    /// every position where `s` is nonzero. Classes are the cosets
    /// `u ⊕ H_s̄`, `u ∈ H_s`.
    pub fn from_mask(space: &GenomeSpace, s: usize) -> Result<Self> {
        let mask = space.genome(s)?;
        if !mask.is_binary() {
            return Err(Error::Usage(format!("schema mask {s} is not binary")));
        }
        let labels: Vec<usize> = (0..space.n()).map(|x| space.mul_raw(x, s)).collect();
        Ok(OrbitPartition::from_labels(&labels).into())
    }

    /// Common refinement: related iff related under every member.
    pub fn intersection(relations: &[EquivalenceRelation]) -> Result<Self> {
        let n = universe(relations)?;
        let labels: Vec<Vec<usize>> = (0..n)
            .map(|x| relations.iter().map(|r| r.0.class_of(x)).collect())
            .collect();
        Ok(OrbitPartition::from_labels(&labels).into())
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.0.same_class(x, y)
    }

    /// `ρ_ε(x)`: index of the class of `x`.
    pub fn rho(&self, x: usize) -> usize {
        self.0.class_of(x)
    }

    pub fn class(&self, x: usize) -> &[usize] {
        &self.0.classes()[self.0.class_of(x)]
    }
}

/// The schema family of a mask, built a second way: orbits of the
/// translation subgroup `{v ↦ v ⊕ w : w ∈ H_s̄}`.
pub fn schema_via_translations(space: &GenomeSpace, s: usize) -> Result<EquivalenceRelation> {
    let mask = space.genome(s)?;
    if !mask.is_binary() {
        return Err(Error::Usage(format!("schema mask {s} is not binary")));
    }
    let free = mask.complement().injection();
    let shifts: Vec<usize> = free
        .positions()
        .iter()
        .map(|&p| space.unit_raw(p))
        .collect();
    Ok(PermutationGroup::translations_by(space, &shifts)?
        .orbit_partition()
        .into())
}

fn universe(relations: &[EquivalenceRelation]) -> Result<usize> {
    let first = relations
        .first()
        .ok_or_else(|| Error::Usage("relation family is empty".into()))?;
    let n = first.0.universe();
    if relations.iter().any(|r| r.0.universe() != n) {
        return Err(Error::Usage("relations act on different spaces".into()));
    }
    Ok(n)
}

/// `ρ_𝔖(x)`: the tuple of class indices of `x` under each relation.
pub fn rho_family(relations: &[EquivalenceRelation], x: usize) -> Result<Vec<usize>> {
    let n = universe(relations)?;
    if x >= n {
        return Err(Error::Usage(format!("genome {x} out of range")));
    }
    Ok(relations.iter().map(|r| r.rho(x)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub covers: bool,
    /// A pair no relation separates, when coverage fails.
    pub witness: Option<(usize, usize)>,
}

/// Whether every pair of distinct genomes is separated by some relation.
/// The witness is the lexicographically first unseparated pair.
pub fn covers(relations: &[EquivalenceRelation]) -> Result<Coverage> {
    let n = universe(relations)?;
    for x in 0..n {
        for y in x + 1..n {
            if relations.iter().all(|r| r.related(x, y)) {
                return Ok(Coverage {
                    covers: false,
                    witness: Some((x, y)),
                });
            }
        }
    }
    Ok(Coverage {
        covers: true,
        witness: None,
    })
}

/// The chromosome space `C = ρ_𝔖(H)` together with the genome → tuple map.
#[derive(Clone, Debug, Serialize)]
pub struct RepresentationImage {
    pub tuples: Vec<Vec<usize>>,
    pub image: BTreeSet<Vec<usize>>,
}

impl RepresentationImage {
    pub fn size(&self) -> usize {
        self.image.len()
    }
}

pub fn chromosome_image(relations: &[EquivalenceRelation]) -> Result<RepresentationImage> {
    let n = universe(relations)?;
    let tuples: Vec<Vec<usize>> = (0..n)
        .map(|x| relations.iter().map(|r| r.rho(x)).collect())
        .collect();
    let image = tuples.iter().cloned().collect();
    Ok(RepresentationImage { tuples, image })
}

/// The `l` single-position relations `ε_0, …, ε_{l-1}`.
pub fn digit_relations(space: &GenomeSpace) -> Vec<EquivalenceRelation> {
    (0..space.l())
        .map(|i| EquivalenceRelation::digit(space, i).expect("position in range"))
        .collect()
}
