//! Semi-topological embedding problems: given an irreducible `g` over `X`
//! and `φ: H ↠ A(E_g/X)`, find an irreducible `h` whose splitting covering
//! sits over `E_g` compatibly with `φ`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::realize::{realize_monodromy, Realization};
use super::report::PipelineReport;
use super::{PipelineError, RealizeOptions};
use crate::embedding::{deck_labeling, solve, verify, verify_report, EmbeddingInstance, EmbeddingSolution, VerifyReport};
use crate::freecover::{subtable, CosetTable};
use crate::monodromy::{characteristic_hom_refined, irreducibility_check, splitting_cover, MonodromyRep, TrackingConfig};
use crate::permgroup::{GroupHom, PermGroup, PermGroupSpec, Permutation};
use crate::wpoly::{BaseSpace, WeierstrassPoly};

/// Everything needed to re-check a tower `E_h → E_g → X` from scratch.
/// `phi` gives the images of the generators of `H` in the monodromy group of
/// `g`; `psi` gives them as deck transformations of `E_h`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerArtifact {
    pub base: BaseSpace,
    pub original_rank: usize,
    pub g: WeierstrassPoly,
    pub g_monodromy: MonodromyRep,
    pub h: WeierstrassPoly,
    pub h_monodromy: MonodromyRep,
    #[serde(rename = "H")]
    pub group: PermGroupSpec,
    pub phi: Vec<Permutation>,
    pub psi: Vec<Permutation>,
}

#[derive(Clone, Debug)]
pub struct SemitopEmbedding {
    pub h: Realization,
    /// `X` with any holes added by rank extension.
    pub base: BaseSpace,
    pub instance: EmbeddingInstance,
    pub solution: EmbeddingSolution,
    pub artifact: TowerArtifact,
    pub report: PipelineReport,
}

fn phi_on_deck(cover_corr: &GroupHom, phi_images: &[Permutation]) -> Result<Vec<Permutation>, PipelineError> {
    phi_images
        .iter()
        .map(|p| {
            cover_corr
                .apply(p)
                .cloned()
                .ok_or_else(|| PipelineError::Input(format!("phi image {p} is not in the monodromy group of g")))
        })
        .collect()
}

fn record_verify(report: &mut PipelineReport, prefix: &str, v: &VerifyReport) {
    report.verdict(&format!("{prefix}psi_bijective"), v.psi_bijective);
    report.verdict(&format!("{prefix}e_galois"), v.e_galois);
    report.verdict(&format!("{prefix}tower_equivariant"), v.tower_equivariant);
    report.verdict(&format!("{prefix}tower_over_given_cover"), v.tower_over_given_cover);
    report.verdict(&format!("{prefix}triangle_commutes"), v.triangle_commutes);
    report.verdict(&format!("{prefix}quotient_consistent"), v.quotient_consistent);
}

/// Solves the embedding problem for `g` topologically, realizes the solution
/// as a polynomial `h` (over `X` with extra holes if the rank had to grow) and
/// verifies the resulting tower exactly.
pub fn solve_semitop_embedding(
    g: &WeierstrassPoly,
    base: &BaseSpace,
    h: &PermGroup,
    phi_images: &[Permutation],
    allow_rank_extension: bool,
    opts: &RealizeOptions,
) -> Result<SemitopEmbedding, PipelineError> {
    if phi_images.len() != h.generators().len() {
        return Err(PipelineError::Input(format!(
            "phi has {} images for {} generators of H",
            phi_images.len(),
            h.generators().len()
        )));
    }
    let mut report = PipelineReport::new(
        "embed",
        json!({
            "g": g,
            "base": base,
            "H": PermGroupSpec::from(h),
            "phi": phi_images,
            "allow_rank_extension": allow_rank_extension,
        }),
    );
    g.check_nonsingular(base, opts.grid)?;
    let rep_g = report.timed("track_g", || {
        characteristic_hom_refined(&g.compile(&base.scale()), base, None, &opts.tracking)
    })?;
    report.artifact("g_monodromy", &rep_g);
    if !irreducibility_check(&rep_g) {
        return Err(PipelineError::IrreducibilityFailure);
    }
    let cover = splitting_cover(&rep_g)?;
    report.artifact("g_deck_order", cover.deck.order());
    let instance = EmbeddingInstance::new(cover.table.clone(), h.clone(), phi_on_deck(&cover.correspondence, phi_images)?)?;
    let solution = report.timed("solve", || solve(&instance, allow_rank_extension))?;
    report.verdict("solver_solution_verified", verify(&solution, &instance));
    report.artifact("assignment", &solution.assignment);

    let extra = solution.rank_used - base.rank();
    if extra > 0 {
        report.note(format!("rank extended from {} to {}", base.rank(), solution.rank_used));
    }
    report.artifact("rank_used", solution.rank_used);
    let ext_base = base.with_extra_holes(extra)?;
    report.artifact("base", &ext_base);

    let realization = realize_monodromy(solution.e_cover.action(), &ext_base, opts)?;
    report.absorb("h", &realization.report);
    report.verdict(
        "h_monodromy_matches_solver",
        realization.monodromy.perms() == solution.e_cover.action(),
    );

    // g over the enlarged base, with its original root labels.
    let g_ext = report.timed("track_g_extended", || {
        characteristic_hom_refined(&g.compile(&ext_base.scale()), &ext_base, Some(rep_g.root_labels()), &opts.tracking)
    })?;
    let m = base.rank();
    report.verdict(
        "g_monodromy_extends",
        g_ext.perms()[..m] == *rep_g.perms() && g_ext.perms()[m..].iter().all(Permutation::is_identity),
    );
    let f_ext = splitting_cover(&g_ext)?;
    report.verdict("g_cover_matches_solver", f_ext.table == solution.tower.mid);
    let e_h = splitting_cover(&realization.monodromy)?.table;
    report.verdict("h_cover_matches_solver", e_h == solution.e_cover);

    let psi = deck_labeling(&e_h, h, &solution.assignment)?;
    let check = tower_check(&e_h, &f_ext.table, h, phi_on_deck(&f_ext.correspondence, phi_images)?, psi.clone())?;
    match &check {
        Some(v) => record_verify(&mut report, "tower.", v),
        None => report.verdict("tower.exists", false),
    }

    let artifact = TowerArtifact {
        base: ext_base.clone(),
        original_rank: m,
        g: g.clone(),
        g_monodromy: g_ext,
        h: realization.polynomial.clone(),
        h_monodromy: realization.monodromy.clone(),
        group: PermGroupSpec::from(h),
        phi: phi_images.to_vec(),
        psi: psi.generator_images().to_vec(),
    };
    if !report.all_passed() {
        return Err(PipelineError::Verification(Box::new(report)));
    }
    Ok(SemitopEmbedding { h: realization, base: ext_base, instance, solution, artifact, report })
}

/// Checks `E → F` as a solution of `(F, φ)` with the given `ψ`; `None` when
/// `E` does not cover `F` at all.
fn tower_check(
    e: &CosetTable,
    f: &CosetTable,
    h: &PermGroup,
    phi_deck: Vec<Permutation>,
    psi: GroupHom,
) -> Result<Option<VerifyReport>, PipelineError> {
    let instance = EmbeddingInstance::new(f.clone(), h.clone(), phi_deck)?;
    let Some(tower) = subtable(e, f)? else {
        return Ok(None);
    };
    let sol = EmbeddingSolution {
        e_cover: e.clone(),
        tower,
        psi,
        rank_used: f.rank(),
        assignment: Vec::new(),
    };
    Ok(Some(verify_report(&sol, &instance)))
}

/// Monodromy report for a polynomial over a base space. The irreducibility
/// flag is an artifact, not a verdict: reducible polynomials are legitimate
/// inputs here.
pub fn cmd_monodromy(
    f: &WeierstrassPoly,
    base: &BaseSpace,
    grid: usize,
    cfg: &TrackingConfig,
) -> Result<PipelineReport, PipelineError> {
    let mut report = PipelineReport::new("monodromy", json!({"f": f, "base": base}));
    f.check_nonsingular(base, grid)?;
    let rep = report.timed("track", || characteristic_hom_refined(&f.compile(&base.scale()), base, None, cfg))?;
    report.verdict("tracking_stable", true);
    report.artifact("monodromy", &rep);
    report.artifact("irreducible", irreducibility_check(&rep));
    let cover = splitting_cover(&rep)?;
    report.artifact("monodromy_group_order", cover.monodromy_group.order());
    report.artifact("deck_order", cover.deck.order());
    report.artifact("galois", cover.deck.galois);
    Ok(report)
}

/// Re-tracks both polynomials of a tower artifact and re-runs every exact
/// check on the coset tables they produce.
pub fn cmd_verify_tower(art: &TowerArtifact, cfg: &TrackingConfig) -> Result<PipelineReport, PipelineError> {
    let mut report = PipelineReport::new("verify-tower", serde_json::to_value(art).unwrap_or_default());
    let h = art.group.build()?;
    if art.phi.len() != h.generators().len() || art.psi.len() != h.generators().len() {
        return Err(PipelineError::Input("phi and psi need one image per generator of H".into()));
    }
    let scale = art.base.scale();
    let g_rep = report.timed("track_g", || {
        characteristic_hom_refined(&art.g.compile(&scale), &art.base, Some(art.g_monodromy.root_labels()), cfg)
    })?;
    let h_rep = report.timed("track_h", || {
        characteristic_hom_refined(&art.h.compile(&scale), &art.base, Some(art.h_monodromy.root_labels()), cfg)
    })?;
    report.verdict("g_monodromy_reproduced", g_rep.perms() == art.g_monodromy.perms());
    report.verdict("h_monodromy_reproduced", h_rep.perms() == art.h_monodromy.perms());
    report.verdict("g_irreducible", irreducibility_check(&g_rep));
    report.verdict("h_irreducible", irreducibility_check(&h_rep));
    let m = art.original_rank.min(g_rep.rank());
    report.verdict("g_trivial_on_added_holes", g_rep.perms()[m..].iter().all(Permutation::is_identity));

    let f_cover = splitting_cover(&g_rep)?;
    let e_cover = splitting_cover(&h_rep)?;
    let phi_deck = phi_on_deck(&f_cover.correspondence, &art.phi)?;
    let psi = GroupHom::from_generator_images(h.clone(), e_cover.deck.group.clone(), art.psi.clone())?;
    match tower_check(&e_cover.table, &f_cover.table, &h, phi_deck, psi)? {
        Some(v) => record_verify(&mut report, "tower.", &v),
        None => report.verdict("tower.exists", false),
    }
    Ok(report)
}
