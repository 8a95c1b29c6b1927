//! The product ring `Z_d^l` of length-`l` strings over a `d`-ary alphabet.
//!
//! Integers in `[0, d^l)` are identified with strings through their base-`d`
//! representation, digit position 0 being the least significant. `⊕`, `⊗` and
//! `⊖` act digit-wise modulo `d`. In written formulas `⊗` binds tighter than
//! `⊕`/`⊖`; the API itself is fully parenthesized.
//!
//! Hot loops elsewhere in the crate work on raw `usize` values through the
//! `*_raw` methods of [`GenomeSpace`]; the [`Genome`] value type checks that
//! both operands come from the same space.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Size caps enforced when a space is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Caps {
    /// Largest `n` for which vectors over the space may be allocated.
    pub vector: usize,
    /// Largest `n` for which dense `n×n` matrices may be allocated.
    pub matrix: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            vector: 65_536,
            matrix: 4_096,
        }
    }
}

/// The ring `H = Z_d^l`.
#[derive(Clone, Copy, Debug)]
pub struct GenomeSpace {
    d: u32,
    l: u32,
    n: usize,
    caps: Caps,
}

impl PartialEq for GenomeSpace {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.l == other.l
    }
}

impl Eq for GenomeSpace {}

impl GenomeSpace {
    pub fn new(d: u32, l: u32) -> Result<Self> {
        Self::with_caps(d, l, Caps::default())
    }

    pub fn with_caps(d: u32, l: u32, caps: Caps) -> Result<Self> {
        if d < 2 {
            return Err(Error::validation("space.d", format!("alphabet size must be >= 2, got {d}")));
        }
        if l < 1 {
            return Err(Error::validation("space.l", format!("string length must be >= 1, got {l}")));
        }
        let mut n: usize = 1;
        for _ in 0..l {
            n = n
                .checked_mul(d as usize)
                .filter(|&n| n <= caps.vector)
                .ok_or_else(|| {
                    Error::Resource(format!(
                        "space size {d}^{l} exceeds the vector cap {}",
                        caps.vector
                    ))
                })?;
        }
        Ok(GenomeSpace { d, l, n, caps })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Number of genomes, `d^l`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// Fails unless dense `n×n` matrices are allowed for this space.
    pub fn check_matrix_cap(&self) -> Result<()> {
        if self.n > self.caps.matrix {
            return Err(Error::Resource(format!(
                "dense {n}x{n} matrix exceeds the matrix cap {}",
                self.caps.matrix,
                n = self.n
            )));
        }
        Ok(())
    }

    pub fn genome(&self, value: usize) -> Result<Genome> {
        if value >= self.n {
            return Err(Error::Usage(format!(
                "genome {value} out of range for space of size {}",
                self.n
            )));
        }
        Ok(Genome { space: *self, value })
    }

    pub fn genomes(&self) -> impl Iterator<Item = Genome> + '_ {
        (0..self.n).map(move |value| Genome { space: *self, value })
    }

    pub fn zero(&self) -> Genome {
        Genome { space: *self, value: 0 }
    }

    /// The all-ones string `1 1 … 1`, the multiplicative identity.
    pub fn all_ones(&self) -> Genome {
        Genome {
            space: *self,
            value: self.all_ones_raw(),
        }
    }

    pub fn all_ones_raw(&self) -> usize {
        // (d^l - 1) / (d - 1) = 1 + d + d^2 + ... + d^{l-1}
        (self.n - 1) / (self.d as usize - 1)
    }

    /// Genome built from a digit vector, position 0 first.
    pub fn from_digits(&self, digits: &[u32]) -> Result<Genome> {
        if digits.len() != self.l as usize {
            return Err(Error::Usage(format!(
                "expected {} digits, got {}",
                self.l,
                digits.len()
            )));
        }
        if let Some(bad) = digits.iter().find(|&&x| x >= self.d) {
            return Err(Error::Usage(format!("digit {bad} is not below d = {}", self.d)));
        }
        Ok(Genome {
            space: *self,
            value: self.from_digits_raw(digits),
        })
    }

    pub fn digits_raw(&self, mut value: usize) -> Vec<u32> {
        let d = self.d as usize;
        (0..self.l)
            .map(|_| {
                let digit = value % d;
                value /= d;
                digit as u32
            })
            .collect()
    }

    pub fn from_digits_raw(&self, digits: &[u32]) -> usize {
        digits
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.d as usize + x as usize)
    }

    /// `d^i`, the genome with a single 1 at position `i`.
    pub fn unit_raw(&self, position: u32) -> usize {
        (self.d as usize).pow(position)
    }

    fn zip_digits(&self, u: usize, v: usize, op: impl Fn(usize, usize) -> usize) -> usize {
        let d = self.d as usize;
        let (mut u, mut v) = (u, v);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.l {
            out += op(u % d, v % d) % d * place;
            u /= d;
            v /= d;
            place *= d;
        }
        out
    }

    pub fn add_raw(&self, u: usize, v: usize) -> usize {
        if self.d == 2 {
            return u ^ v;
        }
        self.zip_digits(u, v, |a, b| a + b)
    }

    pub fn mul_raw(&self, u: usize, v: usize) -> usize {
        if self.d == 2 {
            return u & v;
        }
        self.zip_digits(u, v, |a, b| a * b)
    }

    pub fn sub_raw(&self, u: usize, v: usize) -> usize {
        if self.d == 2 {
            return u ^ v;
        }
        let d = self.d as usize;
        self.zip_digits(u, v, |a, b| a + d - b)
    }

    pub fn neg_raw(&self, s: usize) -> usize {
        self.sub_raw(0, s)
    }

    /// `s̄ = 1 ⊖ s` with `1` the all-ones string.
    pub fn complement_raw(&self, s: usize) -> usize {
        self.sub_raw(self.all_ones_raw(), s)
    }

    pub fn nonzero_count_raw(&self, s: usize) -> u32 {
        if self.d == 2 {
            return s.count_ones();
        }
        self.digits_raw(s).iter().filter(|&&x| x != 0).count() as u32
    }

    /// Number of positions at which `u` and `v` differ.
    pub fn hamming_raw(&self, u: usize, v: usize) -> u32 {
        if self.d == 2 {
            return (u ^ v).count_ones();
        }
        self.nonzero_count_raw(self.sub_raw(u, v))
    }

    pub fn is_binary_raw(&self, s: usize) -> bool {
        self.d == 2 || self.digits_raw(s).iter().all(|&x| x <= 1)
    }

    /// Positions `i_0 < i_1 < …` of the nonzero digits of `s`.
    pub fn support_raw(&self, s: usize) -> Vec<u32> {
        self.digits_raw(s)
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| i as u32)
            .collect()
    }

    fn check(&self, g: &Genome) -> Result<()> {
        if g.space != *self {
            return Err(Error::Usage(format!(
                "genome from Z_{}^{} used in Z_{}^{}",
                g.space.d, g.space.l, self.d, self.l
            )));
        }
        Ok(())
    }
}

/// An element of a [`GenomeSpace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Genome {
    space: GenomeSpace,
    value: usize,
}

impl std::hash::Hash for Genome {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.space.d.hash(state);
        self.space.l.hash(state);
        self.value.hash(state);
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for Genome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.value as u64)
    }
}

impl Genome {
    pub fn value(&self) -> usize {
        self.value
    }

    pub fn space(&self) -> GenomeSpace {
        self.space
    }

    /// Base-`d` digits, position 0 (least significant) first.
    pub fn digits(&self) -> Vec<u32> {
        self.space.digits_raw(self.value)
    }

    fn binary_op(&self, other: &Genome, op: fn(&GenomeSpace, usize, usize) -> usize) -> Result<Genome> {
        self.space.check(other)?;
        Ok(Genome {
            space: self.space,
            value: op(&self.space, self.value, other.value),
        })
    }

    /// `self ⊕ other`.
    pub fn add(&self, other: &Genome) -> Result<Genome> {
        self.binary_op(other, GenomeSpace::add_raw)
    }

    /// `self ⊗ other`.
    pub fn mul(&self, other: &Genome) -> Result<Genome> {
        self.binary_op(other, GenomeSpace::mul_raw)
    }

    /// `self ⊖ other`.
    pub fn sub(&self, other: &Genome) -> Result<Genome> {
        self.binary_op(other, GenomeSpace::sub_raw)
    }

    /// `-s = 0 ⊖ s`.
    pub fn negate(&self) -> Genome {
        Genome {
            space: self.space,
            value: self.space.neg_raw(self.value),
        }
    }

    /// `s̄ = 1 ⊖ s`.
    pub fn complement(&self) -> Genome {
        Genome {
            space: self.space,
            value: self.space.complement_raw(self.value),
        }
    }

    /// `#s`.
    pub fn nonzero_count(&self) -> u32 {
        self.space.nonzero_count_raw(self.value)
    }

    /// True when every digit is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.space.is_binary_raw(self.value)
    }

    pub fn injection(&self) -> Injection {
        Injection {
            mask: *self,
            positions: self.space.support_raw(self.value),
        }
    }

    /// `Sj`: places the digits of `j` (an element of `Z_d^{#s}`) on the
    /// nonzero positions of `self`, zeros elsewhere.
    pub fn embed(&self, j: usize) -> Result<Genome> {
        self.injection().embed(j)
    }

    /// Splits `i` as `(i ⊗ s, i ⊗ s̄)` for a binary mask `s = self`.
    pub fn binary_decompose(&self, i: &Genome) -> Result<(Genome, Genome)> {
        self.space.check(i)?;
        if !self.is_binary() {
            return Err(Error::Usage(format!("mask {} is not binary", self.value)));
        }
        let u = i.mul(self)?;
        let v = i.mul(&self.complement())?;
        Ok((u, v))
    }
}

/// The `l × m` zero-one injection matrix of a mask `s`, `m = #s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injection {
    mask: Genome,
    positions: Vec<u32>,
}

impl Injection {
    pub fn mask(&self) -> Genome {
        self.mask
    }

    /// `m = #s`.
    pub fn m(&self) -> usize {
        self.positions.len()
    }

    /// Row index of the single 1 in each column.
    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    /// Row-major `l × m` matrix with `S[i][j] = [i = i_j]`.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        let l = self.mask.space.l as usize;
        (0..l)
            .map(|i| {
                self.positions
                    .iter()
                    .map(|&p| u8::from(p as usize == i))
                    .collect()
            })
            .collect()
    }

    pub fn embed(&self, j: usize) -> Result<Genome> {
        let space = self.mask.space;
        let d = space.d as usize;
        let bound = d.pow(self.m() as u32);
        if j >= bound {
            return Err(Error::Usage(format!(
                "embedded value {j} out of range for {}-digit space (size {bound})",
                self.m()
            )));
        }
        let mut rest = j;
        let mut value = 0;
        for &p in &self.positions {
            value += (rest % d) * space.unit_raw(p);
            rest /= d;
        }
        Ok(Genome { space, value })
    }
}
