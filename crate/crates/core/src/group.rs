//! Finite permutation groups acting on a genome space.
//!
//! Groups are stored concretely: the full element list obtained by
//! breadth-first closure of the generators. Element labels are their BFS
//! indices, so they are stable across runs.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::GenomeSpace;

pub const DEFAULT_GROUP_CAP: usize = 100_000;

/// A bijection of `[0, n)`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Usage(format!(
                    "image array of length {n} is not a bijection (offending image {x})"
                )));
            }
        }
        Ok(Permutation { images })
    }

    fn from_fn(n: usize, f: impl Fn(usize) -> usize) -> Self {
        Permutation {
            images: (0..n).map(|v| f(v) as u32).collect(),
        }
    }

    /// `v ↦ v ⊕ s`.
    pub fn translation(space: &GenomeSpace, s: usize) -> Result<Self> {
        space.genome(s)?;
        Ok(Self::from_fn(space.n(), |v| space.add_raw(v, s)))
    }

    /// Moves the digit at position `i` to position `positions[i]`.
    pub fn digit_permutation(space: &GenomeSpace, positions: &[u32]) -> Result<Self> {
        let l = space.l() as usize;
        let mut seen = vec![false; l];
        if positions.len() != l
            || positions
                .iter()
                .any(|&p| (p as usize) >= l || std::mem::replace(&mut seen[p as usize], true))
        {
            return Err(Error::Usage(format!(
                "{positions:?} is not a permutation of the {l} digit positions"
            )));
        }
        Ok(Self::from_fn(space.n(), |v| {
            let digits = space.digits_raw(v);
            let mut moved = vec![0; l];
            for (i, &p) in positions.iter().enumerate() {
                moved[p as usize] = digits[i];
            }
            space.from_digits_raw(&moved)
        }))
    }

    /// Cyclic shift of digit positions by one (`i → i+1 mod l`).
    pub fn rotation(space: &GenomeSpace) -> Self {
        let l = space.l();
        let positions: Vec<u32> = (0..l).map(|i| (i + 1) % l).collect();
        Self::digit_permutation(space, &positions).expect("rotation is a digit permutation")
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self ∘ other`, i.e. `v ↦ self(other(v))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&v| self.images[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (v, &w) in self.images.iter().enumerate() {
            images[w as usize] = v as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(v, &w)| v == w as usize)
    }

    /// `(σ_π)_{u,v} = [u = π(v)]`, so that `σ_π e_v = e_{π(v)}`.
    pub fn matrix(&self, space: &GenomeSpace) -> Result<DMatrix<f64>> {
        space.check_matrix_cap()?;
        let n = self.images.len();
        Ok(DMatrix::from_fn(n, n, |u, v| f64::from(u8::from(self.apply(v) == u))))
    }
}

/// Textual generator specification used by configs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Rotation,
    /// All unit translations `d^0, …, d^{l-1}`.
    Translations,
    Translation(usize),
    DigitPermutation(Vec<u32>),
    Images(Vec<u32>),
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("group.generators", format!("unrecognized generator `{s}`"));
        match s.split_once(':') {
            None if s == "rotation" => Ok(GeneratorSpec::Rotation),
            None if s == "translations" => Ok(GeneratorSpec::Translations),
            Some(("translation", arg)) => arg.trim().parse().map(GeneratorSpec::Translation).map_err(|_| bad()),
            Some(("digit_perm", arg)) => arg
                .split(',')
                .map(|p| p.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(GeneratorSpec::DigitPermutation)
                .map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self, space: &GenomeSpace) -> Result<Vec<Permutation>> {
        Ok(match self {
            GeneratorSpec::Rotation => vec![Permutation::rotation(space)],
            GeneratorSpec::Translations => (0..space.l())
                .map(|i| Permutation::translation(space, space.unit_raw(i)))
                .collect::<Result<_>>()?,
            GeneratorSpec::Translation(s) => vec![Permutation::translation(space, *s)?],
            GeneratorSpec::DigitPermutation(p) => vec![Permutation::digit_permutation(space, p)?],
            GeneratorSpec::Images(images) => {
                if images.len() != space.n() {
                    return Err(Error::validation(
                        "group.generators",
                        format!("image array has length {}, expected {}", images.len(), space.n()),
                    ));
                }
                vec![Permutation::from_images(images.clone())?]
            }
        })
    }
}

/// A closed group of permutations of `[0, n)`.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    n: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn close(n: usize, generators: Vec<Permutation>) -> Result<Self> {
        Self::close_with_cap(n, generators, DEFAULT_GROUP_CAP)
    }

    /// Breadth-first closure of `generators` under composition. Inverses come
    /// for free since every element has finite order.
    pub fn close_with_cap(n: usize, generators: Vec<Permutation>, cap: usize) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != n) {
            return Err(Error::Usage(format!(
                "generator acts on {} points, expected {n}",
                g.len()
            )));
        }
        let identity = Permutation::identity(n);
        let mut index: HashMap<Permutation, usize> = HashMap::new();
        let mut elements = vec![identity.clone()];
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &generators {
                let next = g.compose(&elements[i]);
                if index.contains_key(&next) {
                    continue;
                }
                if elements.len() >= cap {
                    return Err(Error::Resource(format!("group closure exceeds {cap} elements")));
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
        Ok(PermutationGroup {
            n,
            generators,
            elements,
        })
    }

    pub fn trivial(n: usize) -> Self {
        PermutationGroup {
            n,
            generators: Vec::new(),
            elements: vec![Permutation::identity(n)],
        }
    }

    pub fn from_specs(space: &GenomeSpace, specs: &[GeneratorSpec]) -> Result<Self> {
        let mut generators = Vec::new();
        for spec in specs {
            generators.extend(spec.build(space)?);
        }
        Self::close(space.n(), generators)
    }

    /// Translation group generated by `v ↦ v ⊕ s` for each `s` in `shifts`.
    pub fn translations_by(space: &GenomeSpace, shifts: &[usize]) -> Result<Self> {
        let generators = shifts
            .iter()
            .map(|&s| Permutation::translation(space, s))
            .collect::<Result<Vec<_>>>()?;
        Self::close(space.n(), generators)
    }

    /// The full translation group `{v ↦ v ⊕ w : w ∈ H}`.
    pub fn full_translations(space: &GenomeSpace) -> Result<Self> {
        let units: Vec<usize> = (0..space.l()).map(|i| space.unit_raw(i)).collect();
        Self::translations_by(space, &units)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Elements in stable (BFS) label order; label 0 is the identity.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn orbit_of(&self, zeta: usize) -> Vec<usize> {
        let mut orbit: Vec<usize> = self.elements.iter().map(|p| p.apply(zeta)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        orbit
    }

    pub fn stabilizer_of(&self, zeta: usize) -> PermutationGroup {
        let elements: Vec<Permutation> = self
            .elements
            .iter()
            .filter(|p| p.apply(zeta) == zeta)
            .cloned()
            .collect();
        PermutationGroup {
            n: self.n,
            generators: elements[1..].to_vec(),
            elements,
        }
    }

    /// Orbits of the action (the quotient `H/L`, equivalently the
    /// coinvariants `H_L`).
    pub fn orbit_partition(&self) -> OrbitPartition {
        // orbits are the connected components of the generator graph
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in &self.generators {
            for v in 0..self.n {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g.apply(v)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let labels: Vec<usize> = (0..self.n).map(|v| find(&mut parent, v)).collect();
        OrbitPartition::from_labels(&labels)
    }

    /// `H^L`: points fixed by every element.
    pub fn invariant_points(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.generators.iter().all(|g| g.apply(v) == v))
            .collect()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }
}

/// True iff at most one member of the labeled family acts as the identity
/// permutation, i.e. the action is reduced (faithful).
pub fn kernel_is_trivial<L>(family: &[(L, Permutation)]) -> bool {
    family.iter().filter(|(_, p)| p.is_identity()).count() <= 1
}

/// A partition of `[0, n)` into disjoint classes. Classes are sorted and
/// indexed in order of their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Serialize for OrbitPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.classes.serialize(serializer)
    }
}

impl OrbitPartition {
    /// Builds the partition whose classes are the level sets of `labels`.
    pub fn from_labels<K: Eq + std::hash::Hash + Clone>(labels: &[K]) -> Self {
        let mut class_of = Vec::with_capacity(labels.len());
        let mut seen: HashMap<K, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (v, key) in labels.iter().enumerate() {
            let next = seen.len();
            let c = *seen.entry(key.clone()).or_insert(next);
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(v);
            class_of.push(c);
        }
        OrbitPartition { classes, class_of }
    }

    pub fn from_classes(n: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (c, class) in classes.iter().enumerate() {
            for &v in class {
                if v >= n || labels[v] != usize::MAX {
                    return Err(Error::Usage(format!(
                        "element {v} is out of range or appears in two classes"
                    )));
                }
                labels[v] = c;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Usage("classes do not cover every element".into()));
        }
        Ok(Self::from_labels(&labels))
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    pub fn class_index(&self) -> &[usize] {
        &self.class_of
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.class_of.len()
    }

    pub fn same_class(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }
}

impl fmt::Display for OrbitPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes
            .iter()
            .map(|c| {
                let items: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A validated family of subgroups whose internal direct sum is `H`.
#[derive(Clone, Debug)]
pub struct DirectSum {
    space: GenomeSpace,
    subgroups: Vec<Vec<usize>>,
    components: Vec<Vec<usize>>,
}

impl DirectSum {
    /// `Q_i = {x : every digit except position i is zero}`.
    pub fn positions(space: &GenomeSpace) -> Self {
        let subgroups = (0..space.l())
            .map(|i| (0..space.d() as usize).map(|k| k * space.unit_raw(i)).collect())
            .collect();
        Self::new(space, subgroups).expect("position subgroups form a direct sum")
    }

    /// Checks that each member is a subgroup, that pairwise intersections are
    /// trivial, and that every element of `H` is a unique sum of components.
    /// Normality is automatic in an Abelian group.
    pub fn new(space: &GenomeSpace, subgroups: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.n();
        let invalid = |condition: &str, detail: String| {
            Error::validation("subgroups", format!("condition {condition} violated: {detail}"))
        };
        let mut members = Vec::with_capacity(subgroups.len());
        for (i, q) in subgroups.iter().enumerate() {
            let mut set = vec![false; n];
            for &x in q {
                if x >= n {
                    return Err(invalid("0 (subgroup)", format!("Q_{i} contains {x} outside H")));
                }
                set[x] = true;
            }
            if !set[0] {
                return Err(invalid("0 (subgroup)", format!("Q_{i} does not contain 0")));
            }
            for &a in q {
                for &b in q {
                    if !set[space.add_raw(a, b)] {
                        return Err(invalid("0 (subgroup)", format!("Q_{i} not closed under ⊕")));
                    }
                }
            }
            members.push(set);
        }
        for i in 0..subgroups.len() {
            for j in i + 1..subgroups.len() {
                if let Some(x) = (1..n).find(|&x| members[i][x] && members[j][x]) {
                    return Err(invalid("2 (trivial intersections)", format!("Q_{i} ∩ Q_{j} contains {x}")));
                }
            }
        }
        // enumerate all sums; uniqueness plus coverage gives the isomorphism
        let mut components: Vec<Option<Vec<usize>>> = vec![None; n];
        let mut tuples: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
        for q in &subgroups {
            let mut next = Vec::with_capacity(tuples.len() * q.len());
            for (sum, tuple) in &tuples {
                for &x in q {
                    let mut t = tuple.clone();
                    t.push(x);
                    next.push((space.add_raw(*sum, x), t));
                }
            }
            if next.len() > n {
                return Err(invalid("1 (direct sum)", "representations are not unique".into()));
            }
            tuples = next;
        }
        for (sum, tuple) in tuples {
            if components[sum].replace(tuple).is_some() {
                return Err(invalid("1 (direct sum)", format!("{sum} has two representations")));
            }
        }
        let components = components
            .into_iter()
            .enumerate()
            .map(|(x, c)| c.ok_or_else(|| invalid("1 (direct sum)", format!("{x} is not a sum of components"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(DirectSum {
            space: *space,
            subgroups,
            components,
        })
    }

    pub fn subgroups(&self) -> &[Vec<usize>] {
        &self.subgroups
    }

    /// The unique `⟨ω_0, …, ω_{k-1}⟩` with `ω_i ∈ Q_i` and `⊕ ω_i = ω`.
    pub fn decompose(&self, omega: usize) -> Result<Vec<usize>> {
        self.space.genome(omega)?;
        Ok(self.components[omega].clone())
    }

    pub fn recompose(&self, parts: &[usize]) -> usize {
        parts.iter().fold(0, |acc, &x| self.space.add_raw(acc, x))
    }
}
