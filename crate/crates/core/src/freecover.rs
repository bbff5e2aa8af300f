//! Finite-index subgroups of a free group, represented as transitive coset
//! tables. A table is also the based graph covering of a wedge of circles:
//! vertices are cosets, the edge labeled `i` leaves coset `c` towards
//! `c·xᵢ`. The basepoint is always coset 0 (serialized as coset 1).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permgroup::{GroupHom, PermError, PermGroup, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("invalid coset table: {0}")]
    InvalidTable(String),
    #[error("covering is not Galois: {0}")]
    NotGalois(&'static str),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("projection is not an equivariant based map")]
    BadProjection,
}

/// A freely reduced word in the generators of a free group. Letter `i > 0`
/// is the generator `xᵢ`, `-i` its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<i32>", into = "Vec<i32>")]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl From<Vec<i32>> for FreeWord {
    fn from(v: Vec<i32>) -> Self {
        FreeWord::new(v)
    }
}

impl From<FreeWord> for Vec<i32> {
    fn from(w: FreeWord) -> Self {
        w.letters
    }
}

impl FreeWord {
    /// Reduces `letters`; zero letters are dropped.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for x in letters.into_iter().filter(|&x| x != 0) {
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        FreeWord { letters: out }
    }

    pub fn generator(i: usize) -> Self {
        FreeWord { letters: vec![i as i32 + 1] }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        FreeWord { letters: self.letters.iter().rev().map(|x| -x).collect() }
    }

    pub fn concat(&self, other: &FreeWord) -> Self {
        FreeWord::new(self.letters.iter().chain(&other.letters).copied())
    }

    /// Largest generator index used.
    pub fn rank(&self) -> usize {
        self.letters.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Image under a homomorphism given by generator images.
    pub fn evaluate(&self, images: &[Permutation], degree: usize) -> Permutation {
        self.letters.iter().fold(Permutation::identity(degree), |acc, &x| {
            let g = &images[x.unsigned_abs() as usize - 1];
            if x > 0 {
                acc.then(g)
            } else {
                acc.then(&g.inverse())
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    rank: usize,
    size: usize,
    action: Vec<Permutation>,
}

/// Transitive right action of the free group of rank `rank` on `size`
/// cosets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct CosetTable {
    rank: usize,
    action: Vec<Permutation>,
    size: usize,
}

impl TryFrom<RawTable> for CosetTable {
    type Error = CoverError;
    fn try_from(raw: RawTable) -> Result<Self, CoverError> {
        let t = CosetTable::from_action(raw.rank, raw.action)?;
        if t.size != raw.size {
            return Err(CoverError::InvalidTable(format!(
                "size {} does not match action degree {}",
                raw.size, t.size
            )));
        }
        Ok(t)
    }
}

impl From<CosetTable> for RawTable {
    fn from(t: CosetTable) -> Self {
        RawTable { rank: t.rank, size: t.size, action: t.action }
    }
}

impl CosetTable {
    /// A table from one permutation per generator. For rank 0 the single
    /// coset table is returned.
    pub fn from_action(rank: usize, action: Vec<Permutation>) -> Result<Self, CoverError> {
        if action.len() != rank {
            return Err(CoverError::InvalidTable(format!(
                "{} action permutations for rank {rank}",
                action.len()
            )));
        }
        let size = action.first().map_or(1, |p| p.degree());
        if size == 0 {
            return Err(CoverError::InvalidTable("empty table".into()));
        }
        if let Some(p) = action.iter().find(|p| p.degree() != size) {
            return Err(CoverError::InvalidTable(format!(
                "mixed degrees {size} and {}",
                p.degree()
            )));
        }
        let t = CosetTable { rank, action, size };
        if t.orbit_of_basepoint().len() != size {
            return Err(CoverError::InvalidTable("action is not transitive".into()));
        }
        Ok(t)
    }

    /// The trivial covering of the rank-`rank` wedge.
    pub fn trivial(rank: usize) -> Self {
        CosetTable { rank, action: vec![Permutation::identity(1); rank], size: 1 }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn action(&self) -> &[Permutation] {
        &self.action
    }

    fn orbit_of_basepoint(&self) -> Vec<usize> {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut orbit = vec![0];
        let mut k = 0;
        while k < orbit.len() {
            for g in &self.action {
                for q in [g.apply(orbit[k]), g.inverse().apply(orbit[k])] {
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
            }
            k += 1;
        }
        orbit
    }

    /// Endpoint of the lift of `w` starting at coset `c`.
    pub fn act(&self, w: &FreeWord, c: usize) -> usize {
        w.letters().iter().fold(c, |c, &x| self.step(c, x))
    }

    /// One edge traversal; negative letters walk edges backwards.
    pub fn step(&self, c: usize, letter: i32) -> usize {
        let g = &self.action[letter.unsigned_abs() as usize - 1];
        if letter > 0 {
            g.apply(c)
        } else {
            g.inverse().apply(c)
        }
    }

    /// Whether `w` lies in the subgroup (the basepoint stabilizer).
    pub fn contains(&self, w: &FreeWord) -> bool {
        self.act(w, 0) == 0
    }

    /// A word carrying the basepoint to each coset (spanning tree).
    pub fn transversal(&self) -> Vec<FreeWord> {
        let mut words: Vec<Option<FreeWord>> = vec![None; self.size];
        words[0] = Some(FreeWord::default());
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let wc = words[c].clone().expect("visited");
            for i in 0..self.rank {
                for letter in [i as i32 + 1, -(i as i32 + 1)] {
                    let d = self.step(c, letter);
                    if words[d].is_none() {
                        words[d] = Some(wc.concat(&FreeWord::new([letter])));
                        queue.push_back(d);
                    }
                }
            }
        }
        words.into_iter().map(|w| w.expect("transitive table")).collect()
    }

    /// The group generated by the action permutations (the monodromy group
    /// of the covering).
    pub fn action_group(&self) -> Result<PermGroup, CoverError> {
        Ok(PermGroup::new(self.size, self.action.clone())?)
    }

    /// Whether the represented subgroup is normal, i.e. the action is
    /// regular.
    pub fn is_normal(&self) -> bool {
        self.action_group().map(|g| g.order() == self.size).unwrap_or(false)
    }

    pub fn deck_group(&self) -> Result<DeckGroup, CoverError> {
        let action = self.action_group()?;
        let group = action.centralizer_in_sym()?;
        let galois = group.is_transitive();
        Ok(DeckGroup { covering: self.clone(), action, group, galois })
    }

    pub fn is_galois(&self) -> bool {
        self.deck_group().map(|d| d.galois).unwrap_or(false)
    }

    /// Appends `extra` generators acting trivially.
    pub fn extend_rank(&self, extra: usize) -> CosetTable {
        let mut action = self.action.clone();
        action.extend(std::iter::repeat_n(Permutation::identity(self.size), extra));
        CosetTable { rank: self.rank + extra, action, size: self.size }
    }

    /// Restriction to the first `rank` generators, if still transitive.
    pub fn truncate_rank(&self, rank: usize) -> Result<CosetTable, CoverError> {
        CosetTable::from_action(rank, self.action[..rank.min(self.rank)].to_vec())
    }

    /// The intermediate covering `E/K` for a subgroup `K` of the deck group,
    /// together with the tower `E → E/K`. Cosets of the quotient are the
    /// `K`-orbits, numbered by first appearance.
    pub fn quotient(&self, k: &PermGroup) -> Result<Tower, CoverError> {
        let deck = self.deck_group()?;
        if k.elements().iter().any(|e| !deck.group.contains(e)) {
            return Err(CoverError::InvalidTable("subgroup is not made of deck transformations".into()));
        }
        let mut projection = vec![usize::MAX; self.size];
        let mut count = 0;
        for c in 0..self.size {
            if projection[c] == usize::MAX {
                for e in k.elements() {
                    projection[e.apply(c)] = count;
                }
                count += 1;
            }
        }
        let mut rep = vec![0; count];
        for c in (0..self.size).rev() {
            rep[projection[c]] = c;
        }
        let action = self
            .action
            .iter()
            .map(|g| Permutation::from_images(rep.iter().map(|&c| projection[g.apply(c)]).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        let mid = CosetTable::from_action(self.rank, action)?;
        Tower::new(self.clone(), mid, projection)
    }
}

/// The deck transformation group of a coset-table covering, acting on
/// cosets.
#[derive(Clone, Debug)]
pub struct DeckGroup {
    pub covering: CosetTable,
    /// The monodromy group of the covering.
    pub action: PermGroup,
    /// Coset permutations commuting with every generator.
    pub group: PermGroup,
    /// Whether the deck group is transitive on the fiber.
    pub galois: bool,
}

impl DeckGroup {
    /// The deck transformation carrying the basepoint to coset `c`.
    pub fn element_to(&self, c: usize) -> Option<Permutation> {
        self.action.centralizing_with(0, c)
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }
}

/// The regular covering whose fundamental group is the kernel of the
/// homomorphism `xᵢ ↦ images[i]`. Cosets are the elements of the image
/// group in closure order; coset 0 is the identity.
pub fn kernel_table(rank: usize, images: &[Permutation]) -> Result<CosetTable, CoverError> {
    if images.len() != rank {
        return Err(CoverError::RankMismatch(images.len(), rank));
    }
    let Some(first) = images.first() else {
        return Ok(CosetTable::trivial(0));
    };
    let group = PermGroup::new(first.degree(), images.to_vec())?;
    cayley_table(&group)
}

/// Right-multiplication table of a group on its own elements, one
/// generator per group generator.
pub fn cayley_table(group: &PermGroup) -> Result<CosetTable, CoverError> {
    let action = group
        .generators()
        .iter()
        .map(|g| group.right_translation(g))
        .collect::<Result<Vec<_>, _>>()?;
    if action.is_empty() {
        return Ok(CosetTable::trivial(0));
    }
    CosetTable::from_action(group.generators().len(), action)
}

#[derive(Serialize, Deserialize)]
struct RawTower {
    top: CosetTable,
    mid: CosetTable,
    projection: Vec<usize>,
}

/// A covering `E → F` of coverings of the same wedge, `p = q ∘ π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTower", into = "RawTower")]
pub struct Tower {
    pub top: CosetTable,
    pub mid: CosetTable,
    projection: Vec<usize>,
}

impl TryFrom<RawTower> for Tower {
    type Error = CoverError;
    fn try_from(raw: RawTower) -> Result<Self, CoverError> {
        if raw.projection.contains(&0) {
            return Err(CoverError::BadProjection);
        }
        Tower::new(raw.top, raw.mid, raw.projection.iter().map(|c| c - 1).collect())
    }
}

impl From<Tower> for RawTower {
    fn from(t: Tower) -> Self {
        RawTower { projection: t.projection.iter().map(|c| c + 1).collect(), top: t.top, mid: t.mid }
    }
}

impl Tower {
    pub fn new(top: CosetTable, mid: CosetTable, projection: Vec<usize>) -> Result<Self, CoverError> {
        if top.rank != mid.rank {
            return Err(CoverError::RankMismatch(top.rank, mid.rank));
        }
        let tower = Tower { top, mid, projection };
        if !tower.is_equivariant() {
            return Err(CoverError::BadProjection);
        }
        Ok(tower)
    }

    pub fn identity(t: &CosetTable) -> Tower {
        Tower { top: t.clone(), mid: t.clone(), projection: (0..t.size).collect() }
    }

    pub fn projection(&self) -> &[usize] {
        &self.projection
    }

    pub fn is_equivariant(&self) -> bool {
        self.projection.len() == self.top.size
            && self.projection.first() == Some(&0)
            && self.projection.iter().all(|&c| c < self.mid.size)
            && (0..self.top.size).all(|c| {
                self.top.action.iter().zip(&self.mid.action).all(|(gt, gm)| {
                    self.projection[gt.apply(c)] == gm.apply(self.projection[c])
                })
            })
    }

    /// Deck transformations of the top covering that preserve every fiber
    /// of the projection: `A(E/F)` as a subgroup of `A(E/X)`.
    pub fn relative_deck_group(&self) -> Result<PermGroup, CoverError> {
        let deck = self.top.deck_group()?;
        let elems: Vec<Permutation> = deck
            .group
            .elements()
            .iter()
            .filter(|l| (0..self.top.size).all(|c| self.projection[l.apply(c)] == self.projection[c]))
            .cloned()
            .collect();
        Ok(PermGroup::new(self.top.size, elems)?)
    }
}

/// The based equivariant map `big → small` if the subgroup of `big` lies in
/// the subgroup of `small`.
pub fn subtable(big: &CosetTable, small: &CosetTable) -> Result<Option<Tower>, CoverError> {
    if big.rank != small.rank {
        return Err(CoverError::RankMismatch(big.rank, small.rank));
    }
    let mut projection = vec![usize::MAX; big.size];
    projection[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for (gb, gs) in big.action.iter().zip(&small.action) {
            let d = gb.apply(c);
            let want = gs.apply(projection[c]);
            if projection[d] == usize::MAX {
                projection[d] = want;
                queue.push_back(d);
            } else if projection[d] != want {
                return Ok(None);
            }
        }
    }
    Ok(Some(Tower::new(big.clone(), small.clone(), projection)?))
}

/// `res_{E/F}: A(E/X) → A(F/X)`, pinned by `res(λ)(π(e₀)) = π(λ(e₀))`.
pub fn restriction_hom(tw: &Tower) -> Result<GroupHom, CoverError> {
    let deck_e = tw.top.deck_group()?;
    let deck_f = tw.mid.deck_group()?;
    if !deck_e.galois {
        return Err(CoverError::NotGalois("top covering"));
    }
    if !deck_f.galois {
        return Err(CoverError::NotGalois("intermediate covering"));
    }
    let hom = GroupHom::from_fn(deck_e.group.clone(), deck_f.group.clone(), |l| {
        deck_f.element_to(tw.projection[l.apply(0)]).expect("Galois intermediate covering")
    })?;
    Ok(hom)
}

/// Outcome of checking both parts of the fundamental theorem on one tower.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TowerReport {
    pub top_deck_order: usize,
    pub relative_deck_order: usize,
    pub mid_galois: bool,
    pub relative_normal: bool,
    /// `mid_galois == relative_normal`.
    pub part1_holds: bool,
    pub quotient: Option<QuotientReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QuotientReport {
    pub mid_deck_order: usize,
    pub quotient_order: usize,
    pub restriction_surjective: bool,
    pub kernel_is_relative_deck: bool,
    pub witness_is_isomorphism: bool,
    /// The witness composed with the quotient map equals the restriction.
    pub witness_factors_restriction: bool,
}

impl QuotientReport {
    pub fn holds(&self) -> bool {
        self.restriction_surjective
            && self.kernel_is_relative_deck
            && self.witness_is_isomorphism
            && self.witness_factors_restriction
            && self.quotient_order == self.mid_deck_order
    }
}

impl TowerReport {
    pub fn holds(&self) -> bool {
        self.part1_holds && self.quotient.as_ref().is_none_or(|q| q.holds())
    }
}

/// Checks the normality criterion and, when the intermediate covering is
/// Galois, the isomorphism `A(E/X)/A(E/F) ≅ A(F/X)` element by element.
pub fn tower_quotient_check(tw: &Tower) -> Result<TowerReport, CoverError> {
    let deck_e = tw.top.deck_group()?;
    if !deck_e.galois {
        return Err(CoverError::NotGalois("top covering"));
    }
    let relative = tw.relative_deck_group()?;
    let mid_galois = tw.mid.deck_group()?.galois;
    let relative_normal = deck_e.group.is_normal_subgroup(&relative);
    let quotient = if mid_galois { Some(quotient_report(tw, &deck_e.group, &relative)?) } else { None };
    Ok(TowerReport {
        top_deck_order: deck_e.order(),
        relative_deck_order: relative.order(),
        mid_galois,
        relative_normal,
        part1_holds: mid_galois == relative_normal,
        quotient,
    })
}

fn quotient_report(
    tw: &Tower,
    deck_e: &PermGroup,
    relative: &PermGroup,
) -> Result<QuotientReport, CoverError> {
    let res = restriction_hom(tw)?;
    let kernel = res.kernel_group();
    let kernel_is_relative_deck = kernel == *relative;

    // A(E/X) acting on the right cosets K·λ of K = A(E/F).
    let mut coset_of = vec![usize::MAX; deck_e.order()];
    let mut reps: Vec<Permutation> = Vec::new();
    for (i, l) in deck_e.elements().iter().enumerate() {
        if coset_of[i] == usize::MAX {
            for k in relative.elements() {
                coset_of[deck_e.index_of(&k.then(l)).expect("closed")] = reps.len();
            }
            reps.push(l.clone());
        }
    }
    let on_cosets = |g: &Permutation| -> Permutation {
        Permutation::from_images(
            reps.iter()
                .map(|r| coset_of[deck_e.index_of(&r.then(g)).expect("closed")])
                .collect(),
        )
        .expect("right multiplication permutes cosets of a normal subgroup")
    };
    let quotient_action = GroupHom::from_fn(
        deck_e.clone(),
        PermGroup::new(
            reps.len(),
            deck_e.generators().iter().map(&on_cosets).collect(),
        )?,
        |g| on_cosets(g),
    );
    let (quotient_order, witness_is_isomorphism, witness_factors_restriction) = match quotient_action {
        Err(_) => (reps.len(), false, false),
        Ok(q) => {
            let quotient = q.target().clone();
            // the witness sends a coset to the common restriction of its members
            let mut well_defined = true;
            let mut images = Vec::new();
            for e in quotient.elements() {
                let pre = q.preimage(e);
                let first = res.apply(&pre[0]).expect("in source").clone();
                well_defined &= pre.iter().all(|l| res.apply(l) == Some(&first));
                images.push(first);
            }
            let witness = GroupHom::from_fn(quotient.clone(), res.target().clone(), |e| {
                images[quotient.index_of(e).expect("in quotient")].clone()
            });
            match witness {
                Ok(w) if well_defined => {
                    let factors = q.then(&w).map(|c| c.same_map(&res)).unwrap_or(false);
                    (quotient.order(), w.is_isomorphism(), factors)
                }
                _ => (quotient.order(), false, false),
            }
        }
    };
    Ok(QuotientReport {
        mid_deck_order: res.target().order(),
        quotient_order,
        restriction_surjective: res.is_surjective(),
        kernel_is_relative_deck,
        witness_is_isomorphism,
        witness_factors_restriction,
    })
}
