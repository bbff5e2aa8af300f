//! Finite permutations, generated permutation groups and homomorphisms
//! between them.
//!
//! Composition is left-to-right throughout the crate: `p.compose(&q)` first
//! applies `p`, then `q`, so `(p·q)(i) = q(p(i))`. This matches the order in
//! which loops are concatenated when computing monodromy.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cap on the order of a materialized closure.
pub const DEFAULT_CLOSURE_LIMIT: usize = 20160;
/// Default cap on group orders accepted by the isomorphism search.
pub const DEFAULT_ISO_LIMIT: usize = 64;
/// Largest degree for which the centralizer of an intransitive group is
/// found by enumerating the whole symmetric group.
pub const BRUTE_FORCE_DEGREE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("not a permutation of 1..{degree}: {images:?}")]
    NotBijection { degree: usize, images: Vec<usize> },
    #[error("closure exceeded the limit of {0} elements")]
    ClosureLimit(usize),
    #[error("group order {order} exceeds the isomorphism search limit {limit}")]
    IsoLimit { order: usize, limit: usize },
    #[error("degree {0} is too large for a brute-force centralizer of an intransitive group")]
    DegreeTooLarge(usize),
    #[error("generator images do not define a homomorphism")]
    NotHomomorphism,
    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("element is not in the group")]
    NotInGroup,
}

/// A permutation of `{0..n}` stored in one-line notation.
///
/// Serialized as the 1-based one-line array, e.g. `[2,1,3]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotBijection {
                    degree: n,
                    images: images.iter().map(|x| x + 1).collect(),
                });
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, PermError> {
        if images.contains(&0) {
            return Err(PermError::NotBijection { degree: images.len(), images: images.to_vec() });
        }
        Self::from_images(images.iter().map(|i| i - 1).collect())
    }

    /// Builds a permutation of degree `n` from 1-based disjoint cycles,
    /// e.g. `from_cycles(3, &[&[1, 2, 3]])`.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || b == 0 || a > n || b > n || touched[a - 1] {
                    return Err(PermError::NotBijection { degree: n, images: cycle.to_vec() });
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Self::from_images(images)
    }

    /// The transposition swapping the 0-based points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.then(other))
    }

    /// Unchecked left-to-right product; panics on a degree mismatch.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn pow(&self, k: i64) -> Permutation {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Permutation::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// Conjugate `g⁻¹·self·g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().then(self).then(g)
    }

    /// 0-based disjoint cycles of length at least 2.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.images[start];
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        self.cycles().iter().fold(1, |acc, c| num_integer::lcm(acc, c.len()))
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, j)| i == *j).count()
    }

    /// Number of inversions; the length of the shortest word in adjacent
    /// transpositions.
    pub fn inversions(&self) -> usize {
        let n = self.degree();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Permutation::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// A finitely generated permutation group with its element set materialized.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

impl PartialEq for PermGroup {
    /// Equality as subgroups of the symmetric group.
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && self.elements.iter().all(|e| other.contains(e))
    }
}

impl PermGroup {
    /// The closure of `generators` using the default size limit.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        Self::with_limit(degree, generators, DEFAULT_CLOSURE_LIMIT)
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, Vec::new()).expect("trivial group")
    }

    /// Breadth-first closure; the identity is always element 0 and the
    /// enumeration order is a deterministic function of the generator order.
    pub fn with_limit(
        degree: usize,
        generators: Vec<Permutation>,
        limit: usize,
    ) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(degree, g.degree()));
            }
        }
        let id = Permutation::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for g in &generators {
                let next = elements[k].then(g);
                if !index.contains_key(&next) {
                    if elements.len() >= limit {
                        return Err(PermError::ClosureLimit(limit));
                    }
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        Ok(PermGroup { degree, generators, elements, index })
    }

    /// Same group, different generating sequence.
    pub fn regenerated(&self, generators: Vec<Permutation>) -> Result<Self, PermError> {
        let g = PermGroup::with_limit(self.degree, generators, self.order().max(1))?;
        if g.order() != self.order() || !g.elements.iter().all(|e| self.contains(e)) {
            return Err(PermError::NotInGroup);
        }
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.index.contains_key(p)
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().enumerate().all(|(i, a)| {
            self.generators[i + 1..].iter().all(|b| a.then(b) == b.then(a))
        })
    }

    /// Orbits of `{0..degree}`, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let p = orbit[k];
                for g in &self.generators {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbits().len() == 1
    }

    /// Transitive with order equal to the degree.
    pub fn is_regular(&self) -> bool {
        self.is_transitive() && self.order() == self.degree.max(1)
    }

    /// All `s` in the symmetric group commuting with every generator.
    pub fn centralizer_in_sym(&self) -> Result<PermGroup, PermError> {
        let elements = if self.is_transitive() {
            self.transitive_centralizer()
        } else if self.degree <= BRUTE_FORCE_DEGREE {
            all_permutations(self.degree)
                .into_iter()
                .filter(|s| self.generators.iter().all(|g| s.then(g) == g.then(s)))
                .collect()
        } else {
            return Err(PermError::DegreeTooLarge(self.degree));
        };
        PermGroup::new(self.degree, elements)
    }

    /// A centralizing permutation of a transitive group is fixed by the
    /// image of one point, so each candidate image of point 0 is tried.
    fn transitive_centralizer(&self) -> Vec<Permutation> {
        let n = self.degree;
        if n == 0 {
            return vec![];
        }
        (0..n).filter_map(|j| self.centralizing_with(0, j)).collect()
    }

    /// The unique centralizing permutation sending `from` to `to`, if any.
    /// Requires a transitive group.
    pub fn centralizing_with(&self, from: usize, to: usize) -> Option<Permutation> {
        let n = self.degree;
        let mut images = vec![usize::MAX; n];
        images[from] = to;
        let mut queue = VecDeque::from([from]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.apply(p);
                let want = g.apply(images[p]);
                if images[q] == usize::MAX {
                    images[q] = want;
                    queue.push_back(q);
                } else if images[q] != want {
                    return None;
                }
            }
        }
        if images.contains(&usize::MAX) {
            return None;
        }
        Permutation::from_images(images).ok()
    }

    /// Whether `sub` (a subgroup of `self`) is normalized by the generators.
    pub fn is_normal_subgroup(&self, sub: &PermGroup) -> bool {
        sub.elements.iter().all(|h| self.contains(h))
            && self.generators.iter().all(|g| {
                sub.generators.iter().all(|h| sub.contains(&h.conjugate_by(g)))
            })
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.elements.iter().map(|e| e.order()).collect();
        v.sort_unstable();
        v
    }

    /// A subsequence of the generators with redundant members removed.
    pub fn reduced_generators(&self) -> Vec<Permutation> {
        let mut kept: Vec<Permutation> = Vec::new();
        let mut current = PermGroup::trivial(self.degree);
        for g in &self.generators {
            if !current.contains(g) {
                kept.push(g.clone());
                current = PermGroup::new(self.degree, kept.clone()).expect("subgroup of a finite group");
            }
        }
        kept
    }

    /// The group acting on itself by right multiplication, as a regular
    /// permutation group of degree `|G|`; generator `i` maps to the right
    /// translation by generator `i`.
    pub fn regular_representation(&self) -> PermGroup {
        let gens = self
            .generators
            .iter()
            .map(|g| self.right_translation(g).expect("generator is in the group"))
            .collect();
        PermGroup::new(self.order(), gens).expect("regular representation has the same order")
    }

    /// The permutation `x ↦ x·g` of the element indices.
    pub fn right_translation(&self, g: &Permutation) -> Result<Permutation, PermError> {
        if !self.contains(g) {
            return Err(PermError::NotInGroup);
        }
        let images = self.elements.iter().map(|x| self.index[&x.then(g)]).collect();
        Permutation::from_images(images)
    }

    /// A group homomorphism `self → other` if the groups are isomorphic.
    pub fn isomorphic_as_groups(&self, other: &PermGroup) -> Result<Option<GroupHom>, PermError> {
        self.isomorphism_with_limit(other, DEFAULT_ISO_LIMIT)
    }

    pub fn isomorphism_with_limit(
        &self,
        other: &PermGroup,
        limit: usize,
    ) -> Result<Option<GroupHom>, PermError> {
        for order in [self.order(), other.order()] {
            if order > limit {
                return Err(PermError::IsoLimit { order, limit });
            }
        }
        if self.order() != other.order() || self.order_profile() != other.order_profile() {
            return Ok(None);
        }
        let gens = self.reduced_generators();
        let source = self.regenerated(gens.clone())?;
        let candidates: Vec<Vec<&Permutation>> = gens
            .iter()
            .map(|g| other.elements.iter().filter(|h| h.order() == g.order()).collect())
            .collect();
        let mut choice = vec![0usize; gens.len()];
        if gens.is_empty() {
            return Ok(Some(GroupHom::from_generator_images(source, other.clone(), vec![])?));
        }
        if candidates.iter().any(|c| c.is_empty()) {
            return Ok(None);
        }
        loop {
            let images: Vec<Permutation> =
                choice.iter().zip(&candidates).map(|(&k, c)| c[k].clone()).collect();
            if let Ok(hom) = GroupHom::from_generator_images(source.clone(), other.clone(), images) {
                if hom.is_injective() {
                    return Ok(Some(hom.with_source(self.clone())));
                }
            }
            // odometer over the candidate lists
            let mut pos = gens.len();
            loop {
                if pos == 0 {
                    return Ok(None);
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < candidates[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }
}

/// A homomorphism between permutation groups, stored as a full table from
/// source element indices to target element indices.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: PermGroup,
    target: PermGroup,
    table: Vec<usize>,
}

impl GroupHom {
    /// Extends `images` (one per source generator) along the Cayley graph of
    /// the source, failing if the result is not well defined.
    pub fn from_generator_images(
        source: PermGroup,
        target: PermGroup,
        images: Vec<Permutation>,
    ) -> Result<Self, PermError> {
        if images.len() != source.generators.len() {
            return Err(PermError::ImageCount {
                expected: source.generators.len(),
                got: images.len(),
            });
        }
        let image_idx: Vec<usize> = images
            .iter()
            .map(|p| target.index_of(p).ok_or(PermError::NotInGroup))
            .collect::<Result<_, _>>()?;
        let mut table = vec![usize::MAX; source.order()];
        table[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            let img = &target.elements[table[k]];
            for (g, &gi) in source.generators.iter().zip(&image_idx) {
                let next = source.index[&source.elements[k].then(g)];
                let want = target.index[&img.then(&target.elements[gi])];
                if table[next] == usize::MAX {
                    table[next] = want;
                    queue.push_back(next);
                } else if table[next] != want {
                    return Err(PermError::NotHomomorphism);
                }
            }
        }
        Ok(GroupHom { source, target, table })
    }

    /// Builds a homomorphism from an explicit element map, checking it
    /// exhaustively.
    pub fn from_fn(
        source: PermGroup,
        target: PermGroup,
        f: impl Fn(&Permutation) -> Permutation,
    ) -> Result<Self, PermError> {
        let table = source
            .elements
            .iter()
            .map(|e| target.index_of(&f(e)).ok_or(PermError::NotInGroup))
            .collect::<Result<Vec<_>, _>>()?;
        let hom = GroupHom { source, target, table };
        if hom.verify() {
            Ok(hom)
        } else {
            Err(PermError::NotHomomorphism)
        }
    }

    pub fn identity(group: PermGroup) -> Self {
        let table = (0..group.order()).collect();
        GroupHom { source: group.clone(), target: group, table }
    }

    /// Re-keys the table on an equal group with a different generating
    /// sequence or element order.
    fn with_source(self, source: PermGroup) -> GroupHom {
        let table = source
            .elements
            .iter()
            .map(|e| self.table[self.source.index[e]])
            .collect();
        GroupHom { source, target: self.target, table }
    }

    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn target(&self) -> &PermGroup {
        &self.target
    }

    pub fn apply(&self, g: &Permutation) -> Option<&Permutation> {
        self.source.index_of(g).map(|k| &self.target.elements[self.table[k]])
    }

    /// Images of the source generators.
    pub fn generator_images(&self) -> Vec<Permutation> {
        self.source
            .generators
            .iter()
            .map(|g| self.apply(g).expect("generator in source").clone())
            .collect()
    }

    /// Exhaustive multiplicativity check over all pairs.
    pub fn verify(&self) -> bool {
        let s = &self.source;
        let t = &self.target;
        s.elements.iter().enumerate().all(|(i, a)| {
            s.elements.iter().enumerate().all(|(j, b)| {
                let ab = s.index[&a.then(b)];
                t.elements[self.table[ab]]
                    == t.elements[self.table[i]].then(&t.elements[self.table[j]])
            })
        })
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_size() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.source.order() == self.target.order()
    }

    fn kernel_size(&self) -> usize {
        self.table.iter().filter(|&&k| k == 0).count()
    }

    pub fn kernel(&self) -> Vec<Permutation> {
        self.source
            .elements
            .iter()
            .zip(&self.table)
            .filter(|(_, &k)| k == 0)
            .map(|(e, _)| e.clone())
            .collect()
    }

    pub fn kernel_group(&self) -> PermGroup {
        PermGroup::new(self.source.degree, self.kernel()).expect("kernel is finite")
    }

    pub fn image(&self) -> PermGroup {
        PermGroup::new(self.target.degree, self.generator_images()).expect("image is finite")
    }

    /// All source elements mapping to `t`.
    pub fn preimage(&self, t: &Permutation) -> Vec<Permutation> {
        match self.target.index_of(t) {
            None => vec![],
            Some(ti) => self
                .source
                .elements
                .iter()
                .zip(&self.table)
                .filter(|(_, &k)| k == ti)
                .map(|(e, _)| e.clone())
                .collect(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, PermError> {
        let table = self
            .table
            .iter()
            .map(|&k| {
                next.source
                    .index_of(&self.target.elements[k])
                    .map(|j| next.table[j])
                    .ok_or(PermError::NotInGroup)
            })
            .collect::<Result<_, _>>()?;
        Ok(GroupHom { source: self.source.clone(), target: next.target.clone(), table })
    }

    /// The inverse of a bijective homomorphism.
    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_isomorphism() {
            return None;
        }
        let mut table = vec![0; self.target.order()];
        for (i, &k) in self.table.iter().enumerate() {
            table[k] = i;
        }
        Some(GroupHom { source: self.target.clone(), target: self.source.clone(), table })
    }

    /// Agreement on every source element.
    pub fn same_map(&self, other: &GroupHom) -> bool {
        self.source == other.source
            && self.source.elements.iter().all(|e| self.apply(e) == other.apply(e))
    }
}

/// JSON form of a permutation group: `{"degree": n, "generators": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PermGroupSpec {
    pub degree: usize,
    pub generators: Vec<Permutation>,
}

impl PermGroupSpec {
    pub fn build(&self) -> Result<PermGroup, PermError> {
        PermGroup::new(self.degree, self.generators.clone())
    }
}

impl From<&PermGroup> for PermGroupSpec {
    fn from(g: &PermGroup) -> Self {
        PermGroupSpec { degree: g.degree(), generators: g.generators().to_vec() }
    }
}

/// Every permutation of `{0..n}` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(Permutation { images: current.clone() });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}
