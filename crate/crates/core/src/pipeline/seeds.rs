//! Continuous coefficient maps `a′: X → Bⁿ` whose root systems have a
//! prescribed regular monodromy. They are what the approximation step
//! replaces by polynomial coefficients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braid::{configuration_at, lift_permutation, BraidWord};
use crate::permgroup::{PermGroup, Permutation};
use crate::wpoly::geometry::point_to_f64;
use crate::wpoly::numeric::{coeffs_from_roots, min_gap};
use crate::wpoly::{BaseSpace, CoefficientMap};

/// How a seed map was constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKind {
    /// Linear combinations of branches of `∏ (w − c_i)^{e_ij/d_j}`.
    Kummer,
    /// The Lagrange resolvent of a cubic with two branch points.
    CubicResolvent,
    /// Braid motions composed with a retraction of `X` onto a wedge of circles.
    Braid,
}

#[derive(Clone, Debug)]
enum Map {
    Kummer {
        centers: Vec<Complex64>,
        /// `exponents[j][i] / orders[j]` is the power of `(w − c_i)` in `y_j`.
        exponents: Vec<Vec<usize>>,
        orders: Vec<usize>,
        weights: Vec<Complex64>,
        /// Character values of each group element.
        values: Vec<Vec<usize>>,
        scale: f64,
    },
    Resolvent {
        c_transposition: Complex64,
        c_other: Complex64,
        three_cycle: bool,
        scale: f64,
    },
    Braid {
        centers: Vec<(f64, f64)>,
        bounds: Vec<f64>,
        words: Vec<BraidWord>,
        spacing: f64,
    },
}

/// A pointwise-computable coefficient map with its construction recorded.
#[derive(Clone, Debug)]
pub struct Seed {
    pub kind: SeedKind,
    pub description: String,
    degree: usize,
    map: Map,
}

impl CoefficientMap for Seed {
    fn degree(&self) -> usize {
        self.degree
    }

    fn coeffs_at(&self, u: f64, v: f64) -> Vec<Complex64> {
        coeffs_from_roots(&self.roots_at(u, v))
    }
}

impl Seed {
    /// Roots of `a′(x)`, in an order fixed by the construction.
    pub fn roots_at(&self, u: f64, v: f64) -> Vec<Complex64> {
        let w = Complex64::new(u, v);
        match &self.map {
            Map::Kummer { centers, exponents, orders, weights, values, scale } => {
                let logs: Vec<Complex64> = centers.iter().map(|c| (w - c).ln()).collect();
                let ys: Vec<Complex64> = exponents
                    .iter()
                    .zip(orders)
                    .map(|(e, &d)| {
                        let sum: Complex64 = e.iter().zip(&logs).map(|(&k, l)| l * k as f64).sum();
                        (sum / d as f64).exp()
                    })
                    .collect();
                values
                    .iter()
                    .map(|chi| {
                        let r: Complex64 = chi
                            .iter()
                            .zip(orders)
                            .zip(weights.iter().zip(&ys))
                            .map(|((&k, &d), (b, y))| {
                                b * y * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)
                            })
                            .sum();
                        r * *scale
                    })
                    .collect()
            }
            Map::Resolvent { c_transposition, c_other, three_cycle, scale } => {
                let (s, factor) = if *three_cycle {
                    // s = 2(w − 2c₁ + c₂)/(w − c₂), roots multiplied by (w − c₂)
                    let d = w - c_other;
                    (2.0 * (w - 2.0 * c_transposition + c_other) / d, d)
                } else {
                    (-2.0 + 4.0 * (w - c_transposition) / (c_other - c_transposition), Complex64::new(1.0, 0.0))
                };
                // θ³ = 27(s ± √(s² − 4))/2, θ = ω^k θ_±
                let root = (s * s - 4.0).sqrt();
                let mut out = Vec::with_capacity(6);
                for sign in [1.0, -1.0] {
                    let cube = 27.0 * (s + sign * root) / 2.0;
                    let base = cube.cbrt_principal();
                    for k in 0..3 {
                        let omega = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 3.0);
                        out.push(base * omega * factor * *scale);
                    }
                }
                out
            }
            Map::Braid { centers, bounds, words, spacing } => {
                let n = self.degree;
                let shift = (n as f64 + 1.0) / 2.0;
                let (strip, t) = retraction(u, v, centers, bounds);
                let config = match strip {
                    Some(i) => configuration_at(&words[i], t),
                    None => configuration_at(&BraidWord::identity(n), 0.0),
                };
                config.into_iter().map(|z| (z - shift) * *spacing).collect()
            }
        }
    }
}

trait PrincipalCbrt {
    fn cbrt_principal(self) -> Self;
}

impl PrincipalCbrt for Complex64 {
    fn cbrt_principal(self) -> Complex64 {
        if self.norm() == 0.0 {
            return self;
        }
        Complex64::from_polar(self.norm().cbrt(), self.arg() / 3.0)
    }
}

/// Strip decomposition: the point is assigned to the hole whose vertical
/// strip contains it, and to a loop parameter from its angle about the hole
/// centre (measured counterclockwise from straight down), squeezed towards
/// the basepoint parameter near the strip walls.
fn retraction(u: f64, v: f64, centers: &[(f64, f64)], bounds: &[f64]) -> (Option<usize>, f64) {
    if centers.is_empty() {
        return (None, 0.0);
    }
    let i = bounds.iter().take_while(|&&b| u >= b).count();
    let (cx, cy) = centers[i];
    let left = if i == 0 { f64::NEG_INFINITY } else { bounds[i - 1] };
    let right = bounds.get(i).copied().unwrap_or(f64::INFINITY);
    let half = if u < cx { cx - left } else { right - cx };
    let beta = if half.is_finite() { (1.0 - (u - cx).abs() / half).clamp(0.0, 1.0) } else { 1.0 };
    let angle = (v - cy).atan2(u - cx) + std::f64::consts::FRAC_PI_2;
    let t = angle.rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;
    let a = (1.0 - beta) / 2.0;
    let squeezed = if beta <= 0.0 {
        if t < 0.5 { 0.0 } else { 1.0 }
    } else {
        ((t - a) / beta).clamp(0.0, 1.0)
    };
    (Some(i), squeezed)
}

fn complex_center(base: &BaseSpace, i: usize) -> Complex64 {
    let (x, y) = point_to_f64(&base.holes()[i].center);
    Complex64::new(x, y)
}

/// Values of all homomorphisms `G → ℤ/e` fixed by generator images, for a
/// finite abelian group given by generating permutations.
fn characters(group: &PermGroup, e: usize) -> Vec<Vec<usize>> {
    let gens = group.generators().to_vec();
    let m = gens.len();
    let total = e.checked_pow(m as u32).unwrap_or(usize::MAX);
    let mut out = Vec::new();
    if total > 200_000 {
        return out;
    }
    for code in 0..total {
        let images: Vec<usize> = (0..m).map(|i| (code / e.pow(i as u32)) % e).collect();
        let mut values: Vec<Option<usize>> = vec![None; group.order()];
        values[0] = Some(0);
        let mut queue = vec![0usize];
        let mut ok = true;
        while let Some(k) = queue.pop() {
            let vk = values[k].expect("queued");
            for (g, &im) in gens.iter().zip(&images) {
                let next = group.index_of(&group.elements()[k].then(g)).expect("closed");
                let val = (vk + im) % e;
                match values[next] {
                    Some(x) if x != val => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        values[next] = Some(val);
                        queue.push(next);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            out.push(values.into_iter().map(|x| x.expect("transitive closure")).collect());
        }
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Characters jointly separating the elements of an abelian group, chosen
/// greedily with a preference for large orders. Each is returned as
/// `(order, values in ℤ/order)`.
fn separating_characters(group: &PermGroup) -> Vec<(usize, Vec<usize>)> {
    let e = group.elements().iter().map(Permutation::order).fold(1, |a, b| a / gcd(a, b) * b);
    let mut candidates: Vec<(usize, Vec<usize>)> = characters(group, e)
        .into_iter()
        .map(|vals| {
            let g = vals.iter().fold(e, |a, &b| gcd(a, b));
            let order = e / g;
            (order, vals.into_iter().map(|x| x / g).collect())
        })
        .filter(|(order, _)| *order > 1)
        .collect();
    candidates.sort_by_key(|c| std::cmp::Reverse(c.0));
    let n = group.order();
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut chosen = Vec::new();
    let distinct = |classes: &Vec<Vec<usize>>| {
        let mut c = classes.clone();
        c.sort();
        c.dedup();
        c.len()
    };
    while distinct(&classes) < n {
        let current = distinct(&classes);
        let best = candidates
            .iter()
            .map(|(order, vals)| {
                let mut next = classes.clone();
                for (k, v) in vals.iter().enumerate() {
                    next[k].push(*v);
                }
                (distinct(&next), *order, vals)
            })
            .max_by_key(|&(count, order, _)| (count, order));
        match best {
            Some((count, order, vals)) if count > current => {
                for (k, v) in vals.iter().enumerate() {
                    classes[k].push(*v);
                }
                chosen.push((order, vals.clone()));
            }
            _ => break,
        }
    }
    chosen
}

/// Minimal root gap and `1 + max|root|` of `seed` over a coarse grid of `X`.
fn quality(seed: &Seed, base: &BaseSpace) -> f64 {
    let n = seed.degree;
    let mut best = f64::INFINITY;
    for p in base.sample_grid(21) {
        let (u, v) = point_to_f64(&p);
        let roots = seed.roots_at(u, v);
        let s = min_gap(&roots);
        let r = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        best = best.min(s * (s / (4.0 * r)).powi(n as i32 - 1));
    }
    best
}

fn power_of_two_scale(seed: &Seed, base: &BaseSpace, target: f64) -> f64 {
    let mut max: f64 = 0.0;
    for p in base.sample_grid(11) {
        let (u, v) = point_to_f64(&p);
        max = max.max(seed.roots_at(u, v).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    if max == 0.0 || !max.is_finite() {
        return 1.0;
    }
    2f64.powi((target / max).log2().round() as i32)
}

/// Small Gaussian rationals used as weight candidates, followed by random
/// ones drawn from `rng_seed`.
fn weight_candidates(rng_seed: u64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = [(1.0, 0.0), (0.5, 0.0), (2.0, 0.0), (0.5, 0.5), (1.0, 1.0), (1.5, 0.0), (0.0, 0.5), (0.75, 0.25)]
        .iter()
        .map(|&(a, b)| Complex64::new(a, b))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..8 {
        let re = rng.gen_range(-8i32..=8) as f64 / 4.0;
        let im = rng.gen_range(-8i32..=8) as f64 / 4.0;
        if re != 0.0 || im != 0.0 {
            out.push(Complex64::new(re, im));
        }
    }
    out
}

/// Kummer-type seed for an abelian group given by regular generator
/// permutations, one per hole.
pub fn kummer_seed(group: &PermGroup, base: &BaseSpace, rng_seed: u64) -> Option<Seed> {
    if !group.is_abelian() || group.generators().len() != base.rank() {
        return None;
    }
    let chars = separating_characters(group);
    if chars.is_empty() && group.order() > 1 {
        return None;
    }
    let gens = group.generators();
    let orders: Vec<usize> = chars.iter().map(|c| c.0).collect();
    let exponents: Vec<Vec<usize>> = chars
        .iter()
        .map(|(_, vals)| gens.iter().map(|g| vals[group.index_of(g).expect("generator")]).collect())
        .collect();
    let values: Vec<Vec<usize>> = (0..group.order()).map(|k| chars.iter().map(|c| c.1[k]).collect()).collect();
    let centers: Vec<Complex64> = (0..base.rank()).map(|i| complex_center(base, i)).collect();
    let make = |weights: Vec<Complex64>, scale: f64| Seed {
        kind: SeedKind::Kummer,
        description: format!(
            "Kummer seed: {} character(s) of orders {:?}, weights {:?}, scale {}",
            orders.len(),
            orders,
            weights.iter().map(|w| (w.re, w.im)).collect::<Vec<_>>(),
            scale
        ),
        degree: group.order(),
        map: Map::Kummer {
            centers: centers.clone(),
            exponents: exponents.clone(),
            orders: orders.clone(),
            weights,
            values: values.clone(),
            scale,
        },
    };
    let k = orders.len();
    let mut best: Option<(f64, Seed)> = None;
    let candidates = weight_candidates(rng_seed);
    let choices: Vec<Vec<Complex64>> = if k <= 1 {
        vec![vec![Complex64::new(1.0, 0.0); k]]
    } else {
        candidates
            .iter()
            .map(|&c| (0..k).map(|j| c.powi(j as i32)).collect())
            .filter(|w: &Vec<Complex64>| w.iter().all(|z| z.norm() > 0.0))
            .collect()
    };
    for weights in choices {
        let trial = make(weights.clone(), 1.0);
        let scale = power_of_two_scale(&trial, base, 2.0);
        let seed = make(weights, scale);
        let q = quality(&seed, base);
        if q.is_finite() && q > 0.0 && best.as_ref().is_none_or(|(b, _)| q > *b) {
            best = Some((q, seed));
        }
    }
    best.map(|(_, s)| s)
}

/// Resolvent seed for `S₃` on two holes whose generators have orders
/// `(2, 2)`, `(2, 3)` or `(3, 2)`.
pub fn resolvent_seed(group: &PermGroup, base: &BaseSpace) -> Option<Seed> {
    if group.order() != 6 || group.is_abelian() || base.rank() != 2 || group.generators().len() != 2 {
        return None;
    }
    let orders: Vec<usize> = group.generators().iter().map(Permutation::order).collect();
    let (c_transposition, c_other, three_cycle) = match orders.as_slice() {
        [2, 2] => (complex_center(base, 0), complex_center(base, 1), false),
        [2, 3] => (complex_center(base, 0), complex_center(base, 1), true),
        [3, 2] => (complex_center(base, 1), complex_center(base, 0), true),
        _ => return None,
    };
    let make = |scale: f64| Seed {
        kind: SeedKind::CubicResolvent,
        description: format!(
            "cubic resolvent seed: transposition at hole {}, {} at the other, scale {scale}",
            if orders[0] == 2 { 1 } else { 2 },
            if three_cycle { "3-cycle" } else { "transposition" }
        ),
        degree: 6,
        map: Map::Resolvent { c_transposition, c_other, three_cycle, scale },
    };
    let scale = power_of_two_scale(&make(1.0), base, 2.0);
    Some(make(scale))
}

/// Braid seed: each generator permutation is lifted to a positive braid and
/// realized as a point motion, composed with the strip retraction.
pub fn braid_seed(targets: &[Permutation], base: &BaseSpace) -> Option<Seed> {
    let n = targets.first().map_or(1, Permutation::degree);
    let centers: Vec<(f64, f64)> = base.holes().iter().map(|h| point_to_f64(&h.center)).collect();
    let bounds: Vec<f64> = centers.windows(2).map(|w| (w[0].0 + w[1].0) / 2.0).collect();
    let words: Vec<BraidWord> = targets.iter().map(lift_permutation).collect();
    let spacing = 2.0 / n.max(2) as f64;
    Some(Seed {
        kind: SeedKind::Braid,
        description: format!(
            "braid seed: positive lifts of lengths {:?} over the strip retraction",
            words.iter().map(BraidWord::len).collect::<Vec<_>>()
        ),
        degree: n,
        map: Map::Braid { centers, bounds, words, spacing },
    })
}

/// The first applicable construction: Kummer, then the cubic resolvent,
/// then braids.
pub fn choose_seed(targets: &[Permutation], base: &BaseSpace, rng_seed: u64) -> Option<Seed> {
    let n = targets.first().map_or(1, Permutation::degree);
    let group = PermGroup::new(n, targets.to_vec()).ok()?;
    kummer_seed(&group, base, rng_seed)
        .or_else(|| resolvent_seed(&group, base))
        .or_else(|| braid_seed(targets, base))
}
