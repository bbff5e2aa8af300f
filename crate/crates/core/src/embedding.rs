//! The topological Galois embedding problem over a free fundamental group.
//!
//! Given a Galois covering `F → X` and a surjection `φ: H ↠ A(F/X)`, find a
//! Galois covering `E → X` factoring through `F` and an isomorphism
//! `ψ: H → A(E/X)` with `φ = res_{E/F} ∘ ψ`. The solver lifts the canonical
//! projection `η: π₁(X) ↠ A(F/X)` through `φ`; when no lift of the given
//! generators generates `H`, extra free generators (extra holes in the base)
//! are sent to generators of `ker φ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freecover::{
    kernel_table, restriction_hom, subtable, tower_quotient_check, CosetTable, CoverError,
    FreeWord, Tower,
};
use crate::permgroup::{GroupHom, PermError, PermGroup, PermGroupSpec, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("the given covering is not Galois")]
    NotGalois,
    #[error("phi does not map onto the deck group of the given covering")]
    NotSurjective,
    #[error("phi does not target the deck group of the given covering")]
    WrongTarget,
    #[error("base rank {0} does not match the covering rank {1}")]
    RankMismatch(usize, usize),
    #[error("no lift of the given generators generates H and rank extension is disabled")]
    NoSolution,
}

/// An instance `(F → X, φ: H ↠ A(F/X))`.
#[derive(Clone, Debug)]
pub struct EmbeddingInstance {
    pub base_rank: usize,
    pub f_cover: CosetTable,
    pub h: PermGroup,
    /// Surjection onto the deck group of `f_cover`, acting on its cosets.
    pub phi: GroupHom,
}

impl EmbeddingInstance {
    pub fn new(f_cover: CosetTable, h: PermGroup, phi_images: Vec<Permutation>) -> Result<Self, EmbeddingError> {
        let deck = f_cover.deck_group()?;
        if !deck.galois {
            return Err(EmbeddingError::NotGalois);
        }
        let phi = GroupHom::from_generator_images(h.clone(), deck.group.clone(), phi_images)
            .map_err(|e| match e {
                PermError::NotInGroup => EmbeddingError::WrongTarget,
                e => e.into(),
            })?;
        let inst = EmbeddingInstance { base_rank: f_cover.rank(), f_cover, h, phi };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), EmbeddingError> {
        if self.base_rank != self.f_cover.rank() {
            return Err(EmbeddingError::RankMismatch(self.base_rank, self.f_cover.rank()));
        }
        let deck = self.f_cover.deck_group()?;
        if !deck.galois {
            return Err(EmbeddingError::NotGalois);
        }
        if *self.phi.target() != deck.group {
            return Err(EmbeddingError::WrongTarget);
        }
        if !self.phi.is_surjective() {
            return Err(EmbeddingError::NotSurjective);
        }
        Ok(())
    }
}

/// A solution `(E, E → F, ψ)`, possibly over a base with more holes.
#[derive(Clone, Debug)]
pub struct EmbeddingSolution {
    pub e_cover: CosetTable,
    pub tower: Tower,
    pub psi: GroupHom,
    pub rank_used: usize,
    /// Image in `H` of each free generator.
    pub assignment: Vec<Permutation>,
}

/// The projection `π₁(X) ↠ A(F/X)` read off the covering: generator `xᵢ`
/// goes to the deck transformation carrying the basepoint to the endpoint
/// of the lift of `xᵢ⁻¹`. With left-to-right composition this choice (rather
/// than the endpoint of `xᵢ` itself) makes the assignment a homomorphism.
pub fn canonical_monodromy(f_cover: &CosetTable) -> Result<Vec<Permutation>, EmbeddingError> {
    let deck = f_cover.deck_group()?;
    if !deck.galois {
        return Err(EmbeddingError::NotGalois);
    }
    Ok((0..f_cover.rank())
        .map(|i| {
            let end = f_cover.act(&FreeWord::generator(i).inverse(), 0);
            deck.element_to(end).expect("Galois covering")
        })
        .collect())
}

/// A generating sequence of `sub` chosen greedily: each step adds the
/// lexicographically first element that enlarges the generated subgroup
/// the most.
pub fn greedy_generators(sub: &PermGroup) -> Vec<Permutation> {
    let mut candidates: Vec<Permutation> = sub.elements().to_vec();
    candidates.sort();
    let mut chosen: Vec<Permutation> = Vec::new();
    let mut current = PermGroup::trivial(sub.degree());
    while current.order() < sub.order() {
        let mut best: Option<(usize, &Permutation)> = None;
        for c in candidates.iter().filter(|c| !current.contains(c)) {
            let mut gens = chosen.clone();
            gens.push(c.clone());
            let order = PermGroup::new(sub.degree(), gens).expect("subgroup").order();
            if best.is_none_or(|(o, _)| order > o) {
                best = Some((order, c));
            }
        }
        let (_, c) = best.expect("a proper subgroup misses some element");
        chosen.push(c.clone());
        current = PermGroup::new(sub.degree(), chosen.clone()).expect("subgroup");
    }
    chosen
}

/// Solves the embedding problem. Fibers `φ⁻¹(η(xᵢ))` are searched in
/// lexicographic order and the first generating assignment wins.
pub fn solve(
    inst: &EmbeddingInstance,
    allow_rank_extension: bool,
) -> Result<EmbeddingSolution, EmbeddingError> {
    inst.validate()?;
    let eta = canonical_monodromy(&inst.f_cover)?;
    let fibers: Vec<Vec<Permutation>> = eta
        .iter()
        .map(|t| {
            let mut f = inst.phi.preimage(t);
            f.sort();
            f
        })
        .collect();

    if let Some(assignment) = first_generating_assignment(&fibers, &inst.h) {
        return build_solution(inst, assignment);
    }
    if !allow_rank_extension {
        return Err(EmbeddingError::NoSolution);
    }
    // ⟨h₁…h_m⟩ maps onto A(F/X), so adding generators of ker φ gives all of H.
    let mut assignment: Vec<Permutation> = fibers.iter().map(|f| f[0].clone()).collect();
    assignment.extend(greedy_generators(&inst.phi.kernel_group()));
    build_solution(inst, assignment)
}

fn first_generating_assignment(fibers: &[Vec<Permutation>], h: &PermGroup) -> Option<Vec<Permutation>> {
    if fibers.iter().any(|f| f.is_empty()) {
        return None;
    }
    let mut choice = vec![0usize; fibers.len()];
    loop {
        let assignment: Vec<Permutation> =
            choice.iter().zip(fibers).map(|(&k, f)| f[k].clone()).collect();
        if PermGroup::new(h.degree(), assignment.clone()).map(|g| g.order()) == Ok(h.order()) {
            return Some(assignment);
        }
        let mut pos = fibers.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < fibers[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

fn build_solution(
    inst: &EmbeddingInstance,
    assignment: Vec<Permutation>,
) -> Result<EmbeddingSolution, EmbeddingError> {
    let rank_used = assignment.len();
    let e_cover = kernel_table(rank_used, &assignment)?;
    let f_ext = inst.f_cover.extend_rank(rank_used - inst.base_rank);
    let tower = subtable(&e_cover, &f_ext)?.ok_or(CoverError::BadProjection)?;
    let psi = deck_labeling(&e_cover, &inst.h, &assignment)?;
    Ok(EmbeddingSolution { e_cover, tower, psi, rank_used, assignment })
}

/// `ψ(h)` is left multiplication by `h⁻¹` on the cosets of the Cayley
/// covering built from `assignment`.
pub fn deck_labeling(
    e_cover: &CosetTable,
    h: &PermGroup,
    assignment: &[Permutation],
) -> Result<GroupHom, EmbeddingError> {
    let cosets = PermGroup::new(h.degree(), assignment.to_vec())?;
    let deck = e_cover.deck_group()?;
    Ok(GroupHom::from_fn(h.clone(), deck.group.clone(), |g| {
        let inv = g.inverse();
        Permutation::from_images(
            cosets
                .elements()
                .iter()
                .map(|c| cosets.index_of(&inv.then(c)).expect("closed"))
                .collect(),
        )
        .expect("left multiplication is a bijection")
    })?)
}

/// Individual verdicts of [`verify`].
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct VerifyReport {
    pub psi_bijective: bool,
    pub e_galois: bool,
    pub tower_equivariant: bool,
    pub tower_over_given_cover: bool,
    pub triangle_commutes: bool,
    pub quotient_consistent: bool,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.psi_bijective
            && self.e_galois
            && self.tower_equivariant
            && self.tower_over_given_cover
            && self.triangle_commutes
            && self.quotient_consistent
    }
}

pub fn verify_report(sol: &EmbeddingSolution, inst: &EmbeddingInstance) -> VerifyReport {
    let mut r = VerifyReport::default();
    let Ok(deck_e) = sol.e_cover.deck_group() else {
        return r;
    };
    r.e_galois = deck_e.galois;
    r.psi_bijective = sol.psi.verify()
        && sol.psi.is_isomorphism()
        && *sol.psi.source() == inst.h
        && *sol.psi.target() == deck_e.group;
    r.tower_equivariant = sol.tower.is_equivariant() && sol.tower.top == sol.e_cover;
    let extra = sol.rank_used.checked_sub(inst.base_rank);
    r.tower_over_given_cover = extra.is_some_and(|extra| {
        sol.tower.mid.rank() == sol.rank_used
            && sol.tower.mid.action()[..inst.base_rank] == *inst.f_cover.action()
            && sol.tower.mid.action()[inst.base_rank..].iter().all(|p| p.is_identity())
            && extra + inst.base_rank == sol.rank_used
    });
    if !(r.e_galois && r.psi_bijective && r.tower_equivariant) {
        return r;
    }
    if let Ok(res) = restriction_hom(&sol.tower) {
        r.triangle_commutes = inst.h.elements().iter().all(|h| {
            let lhs = sol.psi.apply(h).and_then(|l| res.apply(l));
            lhs.is_some() && lhs == inst.phi.apply(h)
        });
    }
    r.quotient_consistent = tower_quotient_check(&sol.tower).is_ok_and(|q| {
        q.holds()
            && q.quotient.is_some_and(|q| q.quotient_order * sol.tower.relative_deck_group().map_or(0, |k| k.order()) == inst.h.order())
    });
    r
}

/// True iff ψ is bijective, E is Galois, the tower is equivariant over the
/// given covering and `res_{E/F}(ψ(h)) = φ(h)` for every `h ∈ H`.
pub fn verify(sol: &EmbeddingSolution, inst: &EmbeddingInstance) -> bool {
    verify_report(sol, inst).ok()
}

/// JSON form of an instance: `phi` lists the images of the generators of
/// `H` as deck transformations of `F_cover`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceJson {
    pub base_rank: usize,
    #[serde(rename = "F_cover")]
    pub f_cover: CosetTable,
    #[serde(rename = "H")]
    pub h: PermGroupSpec,
    pub phi: Vec<Permutation>,
}

impl InstanceJson {
    pub fn build(&self) -> Result<EmbeddingInstance, EmbeddingError> {
        if self.base_rank != self.f_cover.rank() {
            return Err(EmbeddingError::RankMismatch(self.base_rank, self.f_cover.rank()));
        }
        EmbeddingInstance::new(self.f_cover.clone(), self.h.build()?, self.phi.clone())
    }
}

impl From<&EmbeddingInstance> for InstanceJson {
    fn from(inst: &EmbeddingInstance) -> Self {
        InstanceJson {
            base_rank: inst.base_rank,
            f_cover: inst.f_cover.clone(),
            h: PermGroupSpec::from(&inst.h),
            phi: inst.phi.generator_images(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionJson {
    #[serde(rename = "E_cover")]
    pub e_cover: CosetTable,
    pub tower: Tower,
    /// Images of the generators of `H` under ψ.
    pub psi: Vec<Permutation>,
    pub rank_used: usize,
    pub assignment: Vec<Permutation>,
}

impl From<&EmbeddingSolution> for SolutionJson {
    fn from(s: &EmbeddingSolution) -> Self {
        SolutionJson {
            e_cover: s.e_cover.clone(),
            tower: s.tower.clone(),
            psi: s.psi.generator_images(),
            rank_used: s.rank_used,
            assignment: s.assignment.clone(),
        }
    }
}

impl SolutionJson {
    pub fn build(&self, inst: &EmbeddingInstance) -> Result<EmbeddingSolution, EmbeddingError> {
        let deck = self.e_cover.deck_group()?;
        let psi = GroupHom::from_generator_images(inst.h.clone(), deck.group, self.psi.clone())?;
        Ok(EmbeddingSolution {
            e_cover: self.e_cover.clone(),
            tower: self.tower.clone(),
            psi,
            rank_used: self.rank_used,
            assignment: self.assignment.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecover::cayley_table;

    fn p(n: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(n, cycles).unwrap()
    }

    fn z2_cover() -> CosetTable {
        kernel_table(1, &[p(2, &[&[1, 2]])]).unwrap()
    }

    fn swap2() -> Permutation {
        p(2, &[&[1, 2]])
    }

    #[test]
    fn canonical_monodromy_examples() {
        let eta = canonical_monodromy(&CosetTable::trivial(2)).unwrap();
        assert!(eta.iter().all(|e| e.is_identity()));
        assert_eq!(canonical_monodromy(&z2_cover()).unwrap(), vec![swap2()]);

        let s3 = kernel_table(2, &[p(3, &[&[1, 2]]), p(3, &[&[1, 2, 3]])]).unwrap();
        let eta = canonical_monodromy(&s3).unwrap();
        let deck = s3.deck_group().unwrap();
        // η is a homomorphism onto the deck group
        let img = PermGroup::new(6, eta.clone()).unwrap();
        assert_eq!(img, deck.group);
        for (i, e) in eta.iter().enumerate() {
            assert_eq!(e.apply(0), s3.act(&FreeWord::generator(i).inverse(), 0));
        }
        let pts = CosetTable::from_action(2, vec![p(3, &[&[1, 2]]), p(3, &[&[1, 2, 3]])]).unwrap();
        assert_eq!(canonical_monodromy(&pts).unwrap_err(), EmbeddingError::NotGalois);
    }

    #[test]
    fn identity_instance_returns_same_cover() {
        let f = z2_cover();
        let deck = f.deck_group().unwrap();
        let inst = EmbeddingInstance::new(f.clone(), deck.group.clone(), deck.group.generators().to_vec()).unwrap();
        let sol = solve(&inst, false).unwrap();
        assert_eq!(sol.e_cover.size(), 2);
        assert_eq!(sol.rank_used, 1);
        assert!(verify(&sol, &inst));
    }

    fn z4_instance() -> EmbeddingInstance {
        let z4 = PermGroup::new(4, vec![p(4, &[&[1, 2, 3, 4]])]).unwrap();
        EmbeddingInstance::new(z2_cover(), z4, vec![swap2()]).unwrap()
    }

    #[test]
    fn z4_over_z2() {
        let inst = z4_instance();
        let sol = solve(&inst, false).unwrap();
        assert_eq!(sol.e_cover.size(), 4);
        assert_eq!(sol.rank_used, 1);
        assert!(verify(&sol, &inst));
        // the other order-4 preimage also solves
        let other = sol.assignment[0].inverse();
        let alt = build_solution(&inst, vec![other]).unwrap();
        assert!(verify(&alt, &inst));
    }

    #[test]
    fn z4_solution_with_twisted_psi_still_verifies() {
        let inst = z4_instance();
        let sol = solve(&inst, false).unwrap();
        let aut = GroupHom::from_fn(inst.h.clone(), inst.h.clone(), |g| g.inverse()).unwrap();
        let twisted = EmbeddingSolution { psi: aut.then(&sol.psi).unwrap(), ..sol.clone() };
        assert!(verify(&twisted, &inst));
    }

    fn v4_instance() -> EmbeddingInstance {
        let a = p(4, &[&[1, 2], &[3, 4]]);
        let b = p(4, &[&[1, 3], &[2, 4]]);
        let v4 = PermGroup::new(4, vec![a, b]).unwrap();
        EmbeddingInstance::new(z2_cover(), v4, vec![swap2(), Permutation::identity(2)]).unwrap()
    }

    #[test]
    fn v4_needs_rank_extension() {
        let inst = v4_instance();
        assert_eq!(solve(&inst, false).unwrap_err(), EmbeddingError::NoSolution);
        let sol = solve(&inst, true).unwrap();
        assert_eq!(sol.rank_used, 2);
        assert_eq!(sol.e_cover.size(), 4);
        assert!(verify(&sol, &inst));
    }

    #[test]
    fn verify_rejects_wrong_psi() {
        let inst = v4_instance();
        let sol = solve(&inst, true).unwrap();
        // swap the roles of the two V₄ generators: still an isomorphism, wrong triangle
        let h = &inst.h;
        let gens = h.generators();
        let swap = GroupHom::from_generator_images(h.clone(), h.clone(), vec![gens[1].clone(), gens[0].clone()]).unwrap();
        let bad = EmbeddingSolution { psi: swap.then(&sol.psi).unwrap(), ..sol };
        let report = verify_report(&bad, &inst);
        assert!(report.psi_bijective && !report.triangle_commutes);
    }

    #[test]
    fn rejects_bad_instances() {
        let z4 = PermGroup::new(4, vec![p(4, &[&[1, 2, 3, 4]])]).unwrap();
        let err = EmbeddingInstance::new(z2_cover(), z4.clone(), vec![Permutation::identity(2)]).unwrap_err();
        assert_eq!(err, EmbeddingError::NotSurjective);
        let err = EmbeddingInstance::new(z2_cover(), z4, vec![p(3, &[&[1, 2]])]).unwrap_err();
        assert!(matches!(err, EmbeddingError::Perm(PermError::DegreeMismatch(..)) | EmbeddingError::WrongTarget));
    }

    #[test]
    fn greedy_generators_generate() {
        let s3 = PermGroup::new(3, vec![p(3, &[&[1, 2]]), p(3, &[&[2, 3]])]).unwrap();
        let g = greedy_generators(&s3);
        assert_eq!(PermGroup::new(3, g.clone()).unwrap(), s3);
        assert!(g.len() <= 2);
        assert!(greedy_generators(&PermGroup::trivial(3)).is_empty());
    }

    #[test]
    fn solutions_respect_quotient_theorem() {
        // S₃ over Z₂ via the sign map, base rank 1
        let s3 = PermGroup::new(3, vec![p(3, &[&[1, 2]]), p(3, &[&[1, 2, 3]])]).unwrap();
        let inst = EmbeddingInstance::new(z2_cover(), s3, vec![swap2(), Permutation::identity(2)]).unwrap();
        let sol = solve(&inst, true).unwrap();
        assert!(verify(&sol, &inst));
        let q = tower_quotient_check(&sol.tower).unwrap();
        assert_eq!(q.relative_deck_order, 3);
        assert!(q.holds());
        let _ = cayley_table(&inst.h).unwrap();
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = v4_instance();
        let json = serde_json::to_string(&InstanceJson::from(&inst)).unwrap();
        assert!(json.contains("\"F_cover\""));
        let back: InstanceJson = serde_json::from_str(&json).unwrap();
        let rebuilt = back.build().unwrap();
        let sol = solve(&rebuilt, true).unwrap();
        let sj = SolutionJson::from(&sol);
        let again = sj.build(&rebuilt).unwrap();
        assert!(verify(&again, &rebuilt));
    }
}
