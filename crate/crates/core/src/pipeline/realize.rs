//! Realizing a finite group, or a regular monodromy, as the deck group of
//! the splitting covering of a Weierstrass polynomial with coefficients in
//! `ℚ(i)[u, v]`.

use serde_json::json;

use super::report::PipelineReport;
use super::seeds::{choose_seed, Seed, SeedKind};
use super::{PipelineError, RealizeOptions};
use crate::approx::{estimate_eps, fit_rational_polys, ApproximationCertificate, FitOptions, SampledCoeffMap};
use crate::braid::{lift_permutation, BraidWord};
use crate::freecover::cayley_table;
use crate::monodromy::{
    characteristic_hom_refined, deck_action_on_roots, irreducibility_check, permutation_isomorphism, splitting_cover,
    MonodromyRep,
};
use crate::permgroup::{GroupHom, PermGroup, Permutation};
use crate::wpoly::{BaseSpace, WeierstrassPoly};

/// Output of a successful realization.
#[derive(Clone, Debug)]
pub struct Realization {
    pub polynomial: WeierstrassPoly,
    pub base: BaseSpace,
    pub targets: Vec<Permutation>,
    pub seed_kind: SeedKind,
    pub certificate: ApproximationCertificate,
    /// Tracked monodromy of the polynomial, relabeled so that it equals the
    /// targets.
    pub monodromy: MonodromyRep,
    /// Deck group of the splitting covering.
    pub deck_group: PermGroup,
    /// Isomorphism from the deck group onto the target monodromy group.
    pub witness: GroupHom,
    pub report: PipelineReport,
}

fn check_targets(targets: &[Permutation], base: &BaseSpace) -> Result<PermGroup, PipelineError> {
    if targets.len() != base.rank() {
        return Err(PipelineError::Input(format!(
            "{} target permutations for a base space with {} holes",
            targets.len(),
            base.rank()
        )));
    }
    let n = targets.first().map_or(1, Permutation::degree);
    if targets.iter().any(|t| t.degree() != n) {
        return Err(PipelineError::Input("target permutations have different degrees".into()));
    }
    if n > super::MAX_DEGREE {
        return Err(PipelineError::Input(format!("degree {n} exceeds the limit {}", super::MAX_DEGREE)));
    }
    let group = PermGroup::new(n, targets.to_vec())?;
    if !group.is_regular() {
        return Err(PipelineError::Input("target permutations must generate a regular group".into()));
    }
    Ok(group)
}

/// Builds a polynomial whose tracked monodromy along the generator loops of
/// `base` is exactly `targets` (a regular action), and verifies it.
pub fn realize_monodromy(
    targets: &[Permutation],
    base: &BaseSpace,
    opts: &RealizeOptions,
) -> Result<Realization, PipelineError> {
    let target_group = check_targets(targets, base)?;
    let n = target_group.degree();
    let mut report = PipelineReport::new(
        "realize",
        json!({
            "targets": targets,
            "base": base,
            "grid": opts.grid,
            "max_degree": opts.max_degree,
            "seed": opts.rng_seed,
        }),
    );
    let braids: Vec<BraidWord> = targets.iter().map(lift_permutation).collect();
    report.artifact("braid_words", &braids);

    let seed: Seed = choose_seed(targets, base, opts.rng_seed)
        .ok_or_else(|| PipelineError::Input("no seed construction applies".into()))?;
    report.artifact("seed", json!({"kind": seed.kind, "description": seed.description}));

    let sampled = report.timed("sample", || SampledCoeffMap::sample(&seed, base, opts.grid, seed.description.clone()))?;
    let eps_hat = estimate_eps(&sampled, opts.conservatism)?;
    report.artifact("eps_hat", eps_hat);
    let fit_opts = FitOptions { max_denominator: opts.max_denominator, t_mesh: opts.t_mesh, scale: base.scale() };
    let fit = report.timed("fit", || fit_rational_polys(&sampled, opts.max_degree, eps_hat, &fit_opts))?;
    report.artifact("certificate", &fit.certificate);
    report.verdict("certificate_valid", fit.certificate.is_valid());

    let polynomial = WeierstrassPoly::new_on(fit.coeffs.clone(), base, opts.grid)?;
    report.artifact("polynomial", &polynomial);
    let compiled = polynomial.compile(&base.scale());

    let tracked = report.timed("track", || characteristic_hom_refined(&compiled, base, None, &opts.tracking))?;
    let seed_rep = report.timed("track_seed", || {
        characteristic_hom_refined(&seed, base, Some(tracked.root_labels()), &opts.tracking)
    })?;
    report.verdict("seed_monodromy_agrees", seed_rep.perms() == tracked.perms());

    let beta = if targets.is_empty() {
        Some(Permutation::identity(n))
    } else {
        permutation_isomorphism(tracked.perms(), targets)
    };
    let monodromy = match &beta {
        Some(b) => tracked.relabeled(b),
        None => tracked.clone(),
    };
    report.verdict("monodromy_matches_target", monodromy.perms() == targets);
    report.artifact("monodromy", &monodromy);
    report.verdict("irreducible", irreducibility_check(&monodromy));

    let cover = splitting_cover(&monodromy)?;
    report.artifact("deck_order", cover.deck.order());
    report.verdict("deck_order_matches", cover.deck.order() == target_group.order() && cover.table.size() == n);
    let witness = cover.deck.group.isomorphic_as_groups(&target_group)?;
    report.verdict("deck_isomorphic_to_target", witness.is_some());
    if let Some(w) = &witness {
        report.artifact("witness_generator_images", w.generator_images());
    }
    let (_, faithful) = deck_action_on_roots(&monodromy)?;
    report.verdict("deck_action_faithful", faithful);

    if !report.all_passed() {
        return Err(PipelineError::Verification(Box::new(report)));
    }
    Ok(Realization {
        polynomial,
        base: base.clone(),
        targets: targets.to_vec(),
        seed_kind: seed.kind,
        certificate: fit.certificate,
        monodromy,
        deck_group: cover.deck.group,
        witness: witness.expect("verdict checked"),
        report,
    })
}

/// Realizes `group` (given by generators, one per hole) as the deck group of
/// a splitting covering over `base`, or over the default base space with one
/// hole per generator.
pub fn realize_group(
    group: &PermGroup,
    base: Option<&BaseSpace>,
    opts: &RealizeOptions,
) -> Result<Realization, PipelineError> {
    let default;
    let base = match base {
        Some(b) => b,
        None => {
            default = BaseSpace::default_for(group.generators().len());
            &default
        }
    };
    let targets = cayley_table(group)?.action().to_vec();
    let mut realization = realize_monodromy(&targets, base, opts)?;
    let iso = realization.deck_group.isomorphic_as_groups(group)?;
    realization.report.verdict("deck_isomorphic_to_input_group", iso.is_some());
    if let Some(h) = &iso {
        realization.report.artifact("input_witness_generator_images", h.generator_images());
    }
    realization.report.inputs["group"] = json!({"degree": group.degree(), "generators": group.generators()});
    if iso.is_none() {
        return Err(PipelineError::Verification(Box::new(realization.report)));
    }
    Ok(realization)
}
