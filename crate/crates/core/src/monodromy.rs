//! Analytic continuation of the roots of a Weierstrass polynomial along
//! loops in `X`, the characteristic homomorphism `π₁(X) → Σₙ`, and the
//! splitting covering it determines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{deck_labeling, EmbeddingError};
use crate::freecover::{kernel_table, CosetTable, CoverError, DeckGroup};
use crate::permgroup::{GroupHom, PermError, PermGroup, Permutation};
use crate::wpoly::numeric::{eval_monic_with_derivative, min_gap, roots_at, RootError};
use crate::wpoly::{generator_loops, BaseSpace, CoefficientMap, GeometryError, LoopPath, Polyline, DEFAULT_LOOP_VERTICES};

#[derive(Debug, Error)]
pub enum MonodromyError {
    #[error("step size fell below {min_step:e} at loop parameter {at:.6}: path too close to the discriminant locus")]
    StepUnderflow { at: f64, min_step: f64 },
    #[error("Newton correction failed to converge at loop parameter {at:.6}")]
    NewtonDivergence { at: f64 },
    #[error("tracked permutations disagree under step refinement: {0:?}")]
    Instability(Vec<Permutation>),
    #[error("continued roots do not return to distinct basepoint roots")]
    Matching,
    #[error("root labels do not match the fiber over the basepoint")]
    LabelMismatch,
    #[error("invalid tracking configuration: {0}")]
    BadConfig(&'static str),
    #[error("invalid monodromy representation: {0}")]
    BadRep(String),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub safety_factor: f64,
    pub max_newton_iters: usize,
}

impl Default for TrackingConfig {
    fn default() -> Self {
        TrackingConfig { initial_step: 1e-2, min_step: 1e-8, safety_factor: 0.4, max_newton_iters: 30 }
    }
}

impl TrackingConfig {
    pub fn validate(&self) -> Result<(), MonodromyError> {
        if !(self.min_step > 0.0 && self.initial_step > 0.0) {
            return Err(MonodromyError::BadConfig("step sizes must be positive"));
        }
        if self.min_step >= self.initial_step {
            return Err(MonodromyError::BadConfig("min_step must be below initial_step"));
        }
        if !(self.safety_factor > 0.0 && self.safety_factor < 1.0) {
            return Err(MonodromyError::BadConfig("safety_factor must lie in (0, 1)"));
        }
        if self.max_newton_iters == 0 {
            return Err(MonodromyError::BadConfig("max_newton_iters must be positive"));
        }
        Ok(())
    }

    pub fn refined(&self, factor: f64) -> TrackingConfig {
        TrackingConfig { initial_step: self.initial_step * factor, ..*self }
    }
}

/// Newton iteration from `z`; `None` if it does not settle.
fn newton(coeffs: &[Complex64], mut z: Complex64, max_iters: usize) -> Option<Complex64> {
    for _ in 0..max_iters {
        let (p, dp) = eval_monic_with_derivative(coeffs, z);
        if p.norm() == 0.0 {
            return Some(z);
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StepFailure {
    Newton,
    Moved,
}

/// Newton-corrects every root at parameter `s1`, rejecting movement beyond
/// `safety_factor × gap / 2`.
fn corrector_step<M: CoefficientMap + ?Sized>(
    f: &M,
    path: &Polyline,
    roots: &[Complex64],
    s1: f64,
    cfg: &TrackingConfig,
) -> Result<Vec<Complex64>, StepFailure> {
    let (u, v) = path.point_at(s1);
    let coeffs = f.coeffs_at(u, v);
    let limit = cfg.safety_factor * min_gap(roots) / 2.0;
    roots
        .iter()
        .map(|&z| match newton(&coeffs, z, cfg.max_newton_iters) {
            Some(w) if (w - z).norm() < limit => Ok(w),
            Some(_) => Err(StepFailure::Moved),
            None => Err(StepFailure::Newton),
        })
        .collect()
}

/// Continues `labels` (the roots over the start of `path`) along it and
/// returns the permutation sending label `k` to the label where its
/// continuation ends.
pub fn track_path<M: CoefficientMap + ?Sized>(
    f: &M,
    path: &Polyline,
    labels: &[Complex64],
    cfg: &TrackingConfig,
) -> Result<Permutation, MonodromyError> {
    cfg.validate()?;
    let n = labels.len();
    if n <= 1 {
        return Ok(Permutation::identity(n));
    }
    let mut roots = labels.to_vec();
    let mut s = 0.0;
    let mut h = cfg.initial_step;
    let mut last_failure_newton = false;
    while s < 1.0 {
        if h < cfg.min_step {
            return Err(if last_failure_newton {
                MonodromyError::NewtonDivergence { at: s }
            } else {
                MonodromyError::StepUnderflow { at: s, min_step: cfg.min_step }
            });
        }
        let s1 = (s + h).min(1.0);
        let mid = (s + s1) / 2.0;
        // a full step must agree with two half steps, so that motions which
        // return the configuration to itself within one step are refined
        let outcome = corrector_step(f, path, &roots, s1, cfg).and_then(|full| {
            let half = corrector_step(f, path, &roots, mid, cfg)?;
            let two = corrector_step(f, path, &half, s1, cfg)?;
            let gap = min_gap(&two);
            let agree = full.iter().zip(&two).all(|(a, b)| (a - b).norm() < 1e-6 * gap);
            if agree {
                Ok(two)
            } else {
                Err(StepFailure::Moved)
            }
        });
        match outcome {
            Ok(next) => {
                roots = next;
                s = s1;
                h = (h * 2.0).min(cfg.initial_step);
                last_failure_newton = false;
            }
            Err(failure) => {
                last_failure_newton = failure == StepFailure::Newton;
                h /= 2.0;
            }
        }
    }
    match_to_labels(&roots, labels).ok_or(MonodromyError::Matching)
}

/// `perm[k]` = index of the label nearest `roots[k]`, provided every root is
/// within half the minimal label gap of a distinct label.
fn match_to_labels(roots: &[Complex64], labels: &[Complex64]) -> Option<Permutation> {
    let radius = min_gap(labels) / 2.0;
    let images = roots
        .iter()
        .map(|z| {
            let (j, d) = labels
                .iter()
                .enumerate()
                .map(|(j, l)| (j, (z - l).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            (d < radius).then_some(j)
        })
        .collect::<Option<Vec<_>>>()?;
    Permutation::from_images(images).ok()
}

/// Roots over the basepoint in a fixed order (by real, then imaginary part).
pub fn basepoint_roots<M: CoefficientMap + ?Sized>(f: &M, base: &BaseSpace) -> Result<Vec<Complex64>, MonodromyError> {
    let (u, v) = crate::wpoly::geometry::point_to_f64(base.basepoint());
    let mut roots = roots_at(&f.coeffs_at(u, v))?;
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Permutation of the basepoint fiber induced by lifting `path`.
pub fn track_loop<M: CoefficientMap + ?Sized>(
    f: &M,
    base: &BaseSpace,
    path: &LoopPath,
    cfg: &TrackingConfig,
) -> Result<Permutation, MonodromyError> {
    let labels = basepoint_roots(f, base)?;
    track_path(f, &path.to_f64(), &labels, cfg)
}

/// Tracks at `cfg` and with the initial step halved and quartered; the three
/// permutations must agree.
pub fn refine_and_compare<M: CoefficientMap + ?Sized>(
    f: &M,
    path: &Polyline,
    labels: &[Complex64],
    cfg: &TrackingConfig,
) -> Result<Permutation, MonodromyError> {
    let runs = [1.0, 0.5, 0.25]
        .iter()
        .map(|&factor| track_path(f, path, labels, &cfg.refined(factor)))
        .collect::<Result<Vec<_>, _>>()?;
    if runs.iter().all(|p| p == &runs[0]) {
        Ok(runs[0].clone())
    } else {
        Err(MonodromyError::Instability(runs))
    }
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[derive(Deserialize)]
struct RawRep {
    rank: usize,
    degree: usize,
    perms: Vec<Permutation>,
    #[serde(with = "complex_pairs")]
    root_labels: Vec<Complex64>,
}

/// The characteristic homomorphism: one permutation of the root labels per
/// generator loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRep")]
pub struct MonodromyRep {
    rank: usize,
    degree: usize,
    perms: Vec<Permutation>,
    #[serde(with = "complex_pairs")]
    root_labels: Vec<Complex64>,
}

impl TryFrom<RawRep> for MonodromyRep {
    type Error = MonodromyError;
    fn try_from(r: RawRep) -> Result<Self, MonodromyError> {
        let rep = MonodromyRep::new(r.perms, r.root_labels)?;
        if rep.rank != r.rank || rep.degree != r.degree {
            return Err(MonodromyError::BadRep("rank or degree disagrees with perms and labels".into()));
        }
        Ok(rep)
    }
}

impl MonodromyRep {
    pub fn new(perms: Vec<Permutation>, root_labels: Vec<Complex64>) -> Result<Self, MonodromyError> {
        let degree = root_labels.len();
        if let Some(p) = perms.iter().find(|p| p.degree() != degree) {
            return Err(MonodromyError::BadRep(format!(
                "permutation of degree {} for {degree} labels",
                p.degree()
            )));
        }
        if degree > 1 && min_gap(&root_labels) <= 0.0 {
            return Err(MonodromyError::BadRep("root labels are not distinct".into()));
        }
        Ok(MonodromyRep { rank: perms.len(), degree, perms, root_labels })
    }

    /// A representation with given permutations and placeholder labels
    /// `1, 2, …, n`.
    pub fn from_perms(degree: usize, perms: Vec<Permutation>) -> Result<Self, MonodromyError> {
        Self::new(perms, (1..=degree).map(|k| Complex64::new(k as f64, 0.0)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn root_labels(&self) -> &[Complex64] {
        &self.root_labels
    }

    pub fn group(&self) -> Result<PermGroup, MonodromyError> {
        Ok(PermGroup::new(self.degree, self.perms.clone())?)
    }

    /// Moves label `k` to position `beta(k)`; the permutations are
    /// conjugated accordingly.
    pub fn relabeled(&self, beta: &Permutation) -> MonodromyRep {
        let mut labels = vec![Complex64::new(0.0, 0.0); self.degree];
        for (k, z) in self.root_labels.iter().enumerate() {
            labels[beta.apply(k)] = *z;
        }
        let perms = self.perms.iter().map(|p| p.conjugate_by(beta)).collect();
        MonodromyRep { rank: self.rank, degree: self.degree, perms, root_labels: labels }
    }
}

/// `β` with `to[i](β(k)) = β(from[i](k))` for all generators, if the two
/// actions are permutation-isomorphic. Intended for transitive actions.
pub fn permutation_isomorphism(from: &[Permutation], to: &[Permutation]) -> Option<Permutation> {
    let n = from.first().or(to.first()).map(Permutation::degree)?;
    if from.len() != to.len() || from.iter().chain(to).any(|p| p.degree() != n) {
        return None;
    }
    'start: for target in 0..n {
        let mut beta: Vec<Option<usize>> = vec![None; n];
        let mut used = vec![false; n];
        beta[0] = Some(target);
        used[target] = true;
        let mut queue = vec![0];
        while let Some(k) = queue.pop() {
            let bk = beta[k].expect("queued points are assigned");
            for (f, t) in from.iter().zip(to) {
                let (src, dst) = (f.apply(k), t.apply(bk));
                match beta[src] {
                    Some(b) if b != dst => continue 'start,
                    Some(_) => {}
                    None => {
                        if used[dst] {
                            continue 'start;
                        }
                        beta[src] = Some(dst);
                        used[dst] = true;
                        queue.push(src);
                    }
                }
            }
        }
        if let Some(images) = beta.into_iter().collect::<Option<Vec<_>>>() {
            return Permutation::from_images(images).ok();
        }
    }
    None
}

/// Tracks every generator loop of `base`.
pub fn characteristic_hom<M: CoefficientMap + ?Sized>(
    f: &M,
    base: &BaseSpace,
    cfg: &TrackingConfig,
) -> Result<MonodromyRep, MonodromyError> {
    let labels = basepoint_roots(f, base)?;
    let loops = generator_loops(base, DEFAULT_LOOP_VERTICES)?;
    let perms = loops
        .iter()
        .map(|l| track_path(f, &l.to_f64(), &labels, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    MonodromyRep::new(perms, labels)
}

/// As [`characteristic_hom`], with every loop checked by
/// [`refine_and_compare`]. If `labels` is given, the fiber over the basepoint
/// is matched to it and its order is kept.
pub fn characteristic_hom_refined<M: CoefficientMap + ?Sized>(
    f: &M,
    base: &BaseSpace,
    labels: Option<&[Complex64]>,
    cfg: &TrackingConfig,
) -> Result<MonodromyRep, MonodromyError> {
    let fresh = basepoint_roots(f, base)?;
    let labels = match labels {
        None => fresh,
        Some(given) => {
            if given.len() != fresh.len() {
                return Err(MonodromyError::LabelMismatch);
            }
            let order = match_to_labels(given, &fresh).ok_or(MonodromyError::LabelMismatch)?;
            (0..given.len()).map(|k| fresh[order.apply(k)]).collect()
        }
    };
    let loops = generator_loops(base, DEFAULT_LOOP_VERTICES)?;
    let perms = loops
        .iter()
        .map(|l| refine_and_compare(f, &l.to_f64(), &labels, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    MonodromyRep::new(perms, labels)
}

/// The splitting covering `E_f`: the regular covering of the kernel of the
/// characteristic homomorphism.
#[derive(Clone, Debug)]
pub struct SplittingCover {
    pub table: CosetTable,
    pub deck: DeckGroup,
    pub monodromy_group: PermGroup,
    /// `Im φ_f → A(E_f/X)`.
    pub correspondence: GroupHom,
}

pub fn splitting_cover(rep: &MonodromyRep) -> Result<SplittingCover, MonodromyError> {
    let table = kernel_table(rep.rank, &rep.perms)?;
    let deck = table.deck_group()?;
    let monodromy_group = rep.group()?;
    let correspondence = deck_labeling(&table, &monodromy_group, &rep.perms)?;
    Ok(SplittingCover { table, deck, monodromy_group, correspondence })
}

/// `f` is irreducible iff its monodromy group is transitive on the roots.
pub fn irreducibility_check(rep: &MonodromyRep) -> bool {
    match rep.group() {
        Ok(g) => g.is_transitive(),
        Err(_) => {
            let mut seen = vec![false; rep.degree];
            let mut stack = vec![0];
            if rep.degree == 0 {
                return false;
            }
            seen[0] = true;
            while let Some(k) = stack.pop() {
                for p in &rep.perms {
                    for next in [p.apply(k), p.inverse().apply(k)] {
                        if !seen[next] {
                            seen[next] = true;
                            stack.push(next);
                        }
                    }
                }
            }
            seen.into_iter().all(|s| s)
        }
    }
}

/// The action of `A(E_f/X)` on the root labels: a deck transformation `Φ`
/// sends root function `α_j` to `α_j ∘ Φ⁻¹`. Returns the action and whether
/// it is faithful.
pub fn deck_action_on_roots(rep: &MonodromyRep) -> Result<(GroupHom, bool), MonodromyError> {
    let cover = splitting_cover(rep)?;
    let sheets = cover.monodromy_group.elements().to_vec();
    let n = rep.degree;
    let action_of = |phi: &Permutation| -> Option<Permutation> {
        let inv = phi.inverse();
        let images: Vec<usize> = (0..n).map(|j| sheets[inv.apply(0)].apply(j)).collect();
        let ok = (0..sheets.len()).all(|c| (0..n).all(|j| sheets[c].apply(images[j]) == sheets[inv.apply(c)].apply(j)));
        if ok {
            Permutation::from_images(images).ok()
        } else {
            None
        }
    };
    let gen_images = cover
        .deck
        .group
        .generators()
        .iter()
        .map(|g| action_of(g).ok_or_else(|| MonodromyError::BadRep("deck transformation does not permute root functions".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let target = PermGroup::new(n, gen_images)?;
    let hom = GroupHom::from_fn(cover.deck.group.clone(), target, |g| action_of(g).expect("checked on generators and closed"))?;
    let faithful = hom.is_injective();
    Ok((hom, faithful))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpoly::{rat, BivariatePolyQi, GaussianRational, WeierstrassPoly};

    fn cyc(n: usize, c: &[usize]) -> Permutation {
        Permutation::from_cycles(n, &[c]).unwrap()
    }

    /// `z^k − (w − c)` for a hole at `c`: roots are k-th roots of `w − c`.
    fn power_model(k: usize, center: i64) -> WeierstrassPoly {
        let mut coeffs = vec![BivariatePolyQi::zero(); k];
        let mut a0 = BivariatePolyQi::w().scale(&GaussianRational::from_ints(-1, 0));
        a0.add_term(0, 0, GaussianRational::from_ints(center, 0));
        coeffs[0] = a0;
        WeierstrassPoly::new(coeffs).unwrap()
    }

    fn compiled(f: &WeierstrassPoly, x: &BaseSpace) -> crate::wpoly::CompiledPoly {
        f.compile(&x.scale())
    }

    #[test]
    fn constant_coefficients_give_identity() {
        let x = BaseSpace::default_for(2);
        let f = WeierstrassPoly::new(vec![
            BivariatePolyQi::constant(GaussianRational::from_ints(-1, 0)),
            BivariatePolyQi::zero(),
        ])
        .unwrap();
        let rep = characteristic_hom(&compiled(&f, &x), &x, &TrackingConfig::default()).unwrap();
        assert!(rep.perms().iter().all(Permutation::is_identity));
        assert!(!irreducibility_check(&rep));
    }

    #[test]
    fn linear_polynomial_is_trivial() {
        let x = BaseSpace::default_for(1);
        let f = WeierstrassPoly::new(vec![BivariatePolyQi::w()]).unwrap();
        let rep = characteristic_hom(&compiled(&f, &x), &x, &TrackingConfig::default()).unwrap();
        assert_eq!(rep.degree(), 1);
        assert!(rep.perms()[0].is_identity());
        assert!(irreducibility_check(&rep));
    }

    #[test]
    fn square_root_flips_sign() {
        let x = BaseSpace::default_for(1);
        let f = power_model(2, 0);
        let rep = characteristic_hom(&compiled(&f, &x), &x, &TrackingConfig::default()).unwrap();
        assert_eq!(rep.perms(), &[cyc(2, &[1, 2])]);
        assert!(irreducibility_check(&rep));
        let cover = splitting_cover(&rep).unwrap();
        assert_eq!((cover.table.size(), cover.deck.order()), (2, 2));
        let (action, faithful) = deck_action_on_roots(&rep).unwrap();
        assert!(faithful);
        assert_eq!(action.image().order(), 2);
    }

    #[test]
    fn power_models_give_full_cycles() {
        let x = BaseSpace::default_for(1);
        for k in 2..=6 {
            let f = power_model(k, 0);
            let c = compiled(&f, &x);
            let labels = basepoint_roots(&c, &x).unwrap();
            let loops = generator_loops(&x, DEFAULT_LOOP_VERTICES).unwrap();
            let p = refine_and_compare(&c, &loops[0].to_f64(), &labels, &TrackingConfig::default()).unwrap();
            assert_eq!(p.cycles().len(), 1, "k = {k}: {p}");
            assert_eq!(p.order(), k);
            // oracle: continuing w^{1/k} once around multiplies by e^{2πi/k}
            for j in 0..k {
                let expected = labels[j] * Complex64::from_polar(1.0, std::f64::consts::TAU / k as f64);
                assert!((labels[p.apply(j)] - expected).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn hole_free_coefficient_gives_identity() {
        // c(x) = w + 20 has its zero outside the outer disc
        let x = BaseSpace::default_for(1);
        let mut coeffs = vec![BivariatePolyQi::w().scale(&GaussianRational::from_ints(-1, 0)), BivariatePolyQi::zero()];
        coeffs[0].add_term(0, 0, GaussianRational::from_ints(-20, 0));
        let f = WeierstrassPoly::new(coeffs).unwrap();
        let rep = characteristic_hom(&compiled(&f, &x), &x, &TrackingConfig::default()).unwrap();
        assert!(rep.perms()[0].is_identity());
    }

    #[test]
    fn contractible_square_gives_identity() {
        let x = BaseSpace::default_for(1);
        let c = compiled(&power_model(3, 0), &x);
        let labels = basepoint_roots(&c, &x).unwrap();
        let sq = LoopPath::new(vec![
            (rat(0, 1), rat(-8, 1)),
            (rat(1, 1), rat(-8, 1)),
            (rat(1, 1), rat(-7, 1)),
            (rat(0, 1), rat(-7, 1)),
            (rat(0, 1), rat(-8, 1)),
        ]);
        sq.validate(&x, 0).unwrap();
        let p = refine_and_compare(&c, &sq.to_f64(), &labels, &TrackingConfig::default()).unwrap();
        assert!(p.is_identity());
        let gen = &generator_loops(&x, 48).unwrap()[0];
        let there_and_back = gen.concat(&gen.reversed());
        assert!(track_path(&c, &there_and_back.to_f64(), &labels, &TrackingConfig::default()).unwrap().is_identity());
    }

    #[test]
    fn concatenation_is_a_homomorphism() {
        // a0 = (w + 2)(w − 2) on two holes: z^3 + a0
        let x = BaseSpace::default_for(2);
        let w = BivariatePolyQi::w();
        let mut left = w.clone();
        left.add_term(0, 0, GaussianRational::from_ints(2, 0));
        let mut right = w.clone();
        right.add_term(0, 0, GaussianRational::from_ints(-2, 0));
        let a0 = &left * &right;
        let f = WeierstrassPoly::new(vec![a0, BivariatePolyQi::zero(), BivariatePolyQi::zero()]).unwrap();
        let c = compiled(&f, &x);
        let labels = basepoint_roots(&c, &x).unwrap();
        let loops = generator_loops(&x, 48).unwrap();
        let cfg = TrackingConfig::default();
        let p0 = track_path(&c, &loops[0].to_f64(), &labels, &cfg).unwrap();
        let p1 = track_path(&c, &loops[1].to_f64(), &labels, &cfg).unwrap();
        for (a, b, pa, pb) in [(0, 1, &p0, &p1), (1, 0, &p1, &p0)] {
            let joined = loops[a].concat(&loops[b]);
            assert_eq!(track_path(&c, &joined.to_f64(), &labels, &cfg).unwrap(), pa.then(pb));
        }
        assert_eq!(p0.order(), 3);
        assert_eq!(p1.order(), 3);
    }

    #[test]
    fn splitting_cover_examples() {
        let trivial = MonodromyRep::from_perms(3, vec![Permutation::identity(3)]).unwrap();
        let c = splitting_cover(&trivial).unwrap();
        assert_eq!((c.table.size(), c.deck.order()), (1, 1));

        let s3 = MonodromyRep::from_perms(3, vec![cyc(3, &[1, 2]), cyc(3, &[1, 2, 3])]).unwrap();
        let c = splitting_cover(&s3).unwrap();
        assert_eq!((c.table.size(), c.deck.order()), (6, 6));
        assert!(c.deck.group.isomorphic_as_groups(&c.monodromy_group).unwrap().is_some());
        assert!(c.correspondence.is_isomorphism());
        let (_, faithful) = deck_action_on_roots(&s3).unwrap();
        assert!(faithful);
    }

    #[test]
    fn irreducibility_examples() {
        assert!(!irreducibility_check(&MonodromyRep::from_perms(2, vec![Permutation::identity(2)]).unwrap()));
        assert!(irreducibility_check(&MonodromyRep::from_perms(3, vec![cyc(3, &[1, 2, 3])]).unwrap()));
        assert!(!irreducibility_check(&MonodromyRep::from_perms(3, vec![cyc(3, &[1, 2])]).unwrap()));
    }

    #[test]
    fn deck_action_examples() {
        let trivial = MonodromyRep::from_perms(1, vec![Permutation::identity(1)]).unwrap();
        let (hom, faithful) = deck_action_on_roots(&trivial).unwrap();
        assert!(faithful && hom.source().order() == 1);

        let swap = MonodromyRep::from_perms(2, vec![cyc(2, &[1, 2])]).unwrap();
        let (hom, faithful) = deck_action_on_roots(&swap).unwrap();
        assert!(faithful);
        assert_eq!(hom.image().elements()[1], cyc(2, &[1, 2]));

        let a = Permutation::from_cycles(4, &[&[1, 2], &[3, 4]]).unwrap();
        let b = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        let v4 = MonodromyRep::from_perms(4, vec![a, b]).unwrap();
        let (hom, faithful) = deck_action_on_roots(&v4).unwrap();
        assert!(faithful);
        assert!(hom.image().is_regular());
    }

    #[test]
    fn relabeling_to_a_target() {
        let from = vec![cyc(3, &[1, 2, 3])];
        let to = vec![cyc(3, &[1, 3, 2])];
        let beta = permutation_isomorphism(&from, &to).unwrap();
        let rep = MonodromyRep::from_perms(3, from).unwrap();
        assert_eq!(rep.relabeled(&beta).perms(), &to[..]);
        assert!(permutation_isomorphism(&[cyc(3, &[1, 2])], &[cyc(3, &[1, 2, 3])]).is_none());
    }

    #[test]
    fn rep_json_round_trip() {
        let rep = MonodromyRep::from_perms(2, vec![cyc(2, &[1, 2])]).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"root_labels\":[[1.0,0.0],[2.0,0.0]]"));
        assert_eq!(serde_json::from_str::<MonodromyRep>(&text).unwrap(), rep);
        let bad = r#"{"rank": 1, "degree": 3, "perms": [[2, 1]], "root_labels": [[1, 0], [2, 0]]}"#;
        assert!(serde_json::from_str::<MonodromyRep>(bad).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrackingConfig::default().validate().is_ok());
        let bad = TrackingConfig { min_step: 1.0, ..TrackingConfig::default() };
        assert!(bad.validate().is_err());
        let bad = TrackingConfig { safety_factor: 1.0, ..TrackingConfig::default() };
        assert!(bad.validate().is_err());
    }
}
