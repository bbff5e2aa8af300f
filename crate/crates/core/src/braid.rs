//! Artin braid words, their permutation image, positive lifts of
//! permutations, and the realization of a braid as a motion of `n` points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::permgroup::Permutation;
use crate::wpoly::numeric::{coeffs_from_roots, min_gap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BraidError {
    #[error("letter {letter} out of range for {strands} strands")]
    LetterOutOfRange { letter: i32, strands: usize },
    #[error("samples_per_letter must be at least 4, got {0}")]
    TooFewSamples(usize),
    #[error("sample {sample}: root separation {separation} below clearance {clearance}")]
    ClearanceViolation { sample: usize, separation: f64, clearance: f64 },
}

pub const DEFAULT_CLEARANCE: f64 = 0.25;

/// A word in `σ_1, …, σ_{n−1}` and their inverses, freely reduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawBraid")]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

#[derive(Deserialize)]
struct RawBraid {
    strands: usize,
    letters: Vec<i32>,
}

impl TryFrom<RawBraid> for BraidWord {
    type Error = BraidError;
    fn try_from(raw: RawBraid) -> Result<Self, BraidError> {
        BraidWord::new(raw.strands, raw.letters)
    }
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        let mut reduced: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(BraidError::LetterOutOfRange { letter: l, strands });
            }
            if reduced.last() == Some(&-l) {
                reduced.pop();
            } else {
                reduced.push(l);
            }
        }
        Ok(BraidWord { strands, letters: reduced })
    }

    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn strands(&self) -> usize {
        self.strands
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

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands, "braid words on different strand counts");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord::new(self.strands, letters).expect("letters already in range")
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }
}

/// Image in the symmetric group: `σ_i ↦ (i, i+1)`, multiplied left to right.
pub fn tau(b: &BraidWord) -> Permutation {
    b.letters.iter().fold(Permutation::identity(b.strands), |acc, &l| {
        let i = l.unsigned_abs() as usize - 1;
        acc.then(&Permutation::transposition(b.strands, i, i + 1))
    })
}

/// A positive braid word with `tau(w) = p`, read off from bubble-sorting the
/// image list of `p`. Its length is the inversion count of `p`.
pub fn lift_permutation(p: &Permutation) -> BraidWord {
    let n = p.degree();
    let mut images: Vec<usize> = p.images().to_vec();
    let mut letters = Vec::new();
    // swapping positions j, j+1 of the image list left-multiplies by (j, j+1)
    for pass in 0..n {
        let mut swapped = false;
        for j in 0..n.saturating_sub(1 + pass) {
            if images[j] > images[j + 1] {
                images.swap(j, j + 1);
                letters.push(j as i32 + 1);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    BraidWord::new(n, letters).expect("letters in range")
}

/// Time-ordered samples of a moving configuration of `n` distinct points;
/// `positions[k][s]` is the position of the point that started at `s + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigPath {
    strands: usize,
    times: Vec<f64>,
    positions: Vec<Vec<Complex64>>,
}

impl ConfigPath {
    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn samples(&self) -> &[Vec<Complex64>] {
        &self.positions
    }

    pub fn min_separation(&self) -> f64 {
        self.positions.iter().map(|c| min_gap(c)).fold(f64::INFINITY, f64::min)
    }
}

/// Smooth reparametrization of `[0, 1]` with vanishing end derivatives.
fn ease(x: f64) -> f64 {
    x - (std::f64::consts::TAU * x).sin() / std::f64::consts::TAU
}

fn base_configuration(n: usize) -> Vec<Complex64> {
    (1..=n).map(|k| Complex64::new(k as f64, 0.0)).collect()
}

/// Configuration of the braid motion at parameter `t ∈ [0, 1]`; each letter
/// occupies an equal share of the parameter interval.
pub fn configuration_at(b: &BraidWord, t: f64) -> Vec<Complex64> {
    let n = b.strands;
    let mut points = base_configuration(n);
    if b.letters.is_empty() {
        return points;
    }
    // slot[p] = index of the point currently resting at position p + 1
    let mut slot: Vec<usize> = (0..n).collect();
    let scaled = t.clamp(0.0, 1.0) * b.letters.len() as f64;
    for (k, &l) in b.letters.iter().enumerate() {
        let local = (scaled - k as f64).clamp(0.0, 1.0);
        if local <= 0.0 {
            break;
        }
        let i = l.unsigned_abs() as usize - 1;
        let mid = Complex64::new(i as f64 + 1.5, 0.0);
        let sign = if l > 0 { 1.0 } else { -1.0 };
        let theta = sign * std::f64::consts::PI * ease(local);
        let rot = Complex64::from_polar(0.5, theta);
        if local >= 1.0 {
            slot.swap(i, i + 1);
            points[slot[i]] = Complex64::new(i as f64 + 1.0, 0.0);
            points[slot[i + 1]] = Complex64::new(i as f64 + 2.0, 0.0);
        } else {
            points[slot[i]] = mid - rot;
            points[slot[i + 1]] = mid + rot;
            break;
        }
    }
    points
}

/// Samples the braid motion: `samples_per_letter` equally spaced parameter
/// values per letter, plus the start.
pub fn braid_to_config_path(b: &BraidWord, samples_per_letter: usize) -> Result<ConfigPath, BraidError> {
    if samples_per_letter < 4 {
        return Err(BraidError::TooFewSamples(samples_per_letter));
    }
    let total = b.letters.len() * samples_per_letter;
    let count = total.max(1);
    let times: Vec<f64> = (0..=count).map(|k| k as f64 / count as f64).collect();
    let positions = times.iter().map(|&t| configuration_at(b, t)).collect();
    Ok(ConfigPath { strands: b.strands, times, positions })
}

/// Monic coefficients of `∏ (z − r_k)` at each sample, after checking the
/// clearance.
pub fn config_to_coeffs(c: &ConfigPath, clearance: f64) -> Result<Vec<Vec<Complex64>>, BraidError> {
    c.positions
        .iter()
        .enumerate()
        .map(|(sample, roots)| {
            let separation = min_gap(roots);
            if separation < clearance {
                return Err(BraidError::ClearanceViolation { sample, separation, clearance });
            }
            Ok(coeffs_from_roots(roots))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permgroup::all_permutations;
    use crate::wpoly::numeric::discriminant_at;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn tau_examples() {
        assert!(tau(&BraidWord::identity(3)).is_identity());
        assert_eq!(tau(&BraidWord::new(2, vec![1]).unwrap()), Permutation::from_cycles(2, &[&[1, 2]]).unwrap());
        assert_eq!(
            tau(&BraidWord::new(3, vec![1, 2, 1]).unwrap()),
            Permutation::from_cycles(3, &[&[1, 3]]).unwrap()
        );
    }

    #[test]
    fn words_are_reduced_and_checked() {
        assert_eq!(BraidWord::new(3, vec![1, 2, -2, -1, 2]).unwrap().letters(), &[2]);
        assert!(matches!(BraidWord::new(3, vec![3]), Err(BraidError::LetterOutOfRange { .. })));
        assert!(BraidWord::new(3, vec![0]).is_err());
        let json: BraidWord = serde_json::from_str(r#"{"strands": 3, "letters": [1, -2]}"#).unwrap();
        assert_eq!(json.letters(), &[1, -2]);
        assert!(serde_json::from_str::<BraidWord>(r#"{"strands": 2, "letters": [2]}"#).is_err());
    }

    #[test]
    fn lift_examples() {
        assert!(lift_permutation(&Permutation::identity(4)).is_empty());
        assert_eq!(lift_permutation(&Permutation::from_cycles(2, &[&[1, 2]]).unwrap()).letters(), &[1]);
        let p = Permutation::from_cycles(3, &[&[1, 3]]).unwrap();
        let w = lift_permutation(&p);
        assert!(w.len() <= 3);
        assert_eq!(tau(&w), p);
    }

    #[test]
    fn lift_inverts_tau_exhaustively() {
        for n in 1..=5 {
            for p in all_permutations(n) {
                let w = lift_permutation(&p);
                assert_eq!(tau(&w), p);
                assert!(w.letters().iter().all(|&l| l > 0));
                assert_eq!(w.len(), p.inversions());
                assert!(w.len() <= n * (n - 1) / 2);
            }
        }
    }

    #[test]
    fn config_path_examples() {
        let empty = braid_to_config_path(&BraidWord::identity(3), 4).unwrap();
        assert!(empty.samples().iter().all(|c| c == &base_configuration(3)));

        let s1 = BraidWord::new(2, vec![1]).unwrap();
        let mid = configuration_at(&s1, 0.5);
        assert!(close(mid[0], Complex64::new(1.5, -0.5)) && close(mid[1], Complex64::new(1.5, 0.5)));
        let inv = configuration_at(&s1.inverse(), 0.5);
        assert!(close(inv[0], Complex64::new(1.5, 0.5)));

        let full_twist = BraidWord::new(2, vec![1, 1]).unwrap();
        let end = configuration_at(&full_twist, 1.0);
        assert_eq!(end, base_configuration(2));
        assert!(matches!(braid_to_config_path(&s1, 3), Err(BraidError::TooFewSamples(3))));
    }

    #[test]
    fn endpoint_is_reindexed_by_tau() {
        let b = BraidWord::new(4, vec![1, 2, -3, 1, 2]).unwrap();
        let path = braid_to_config_path(&b, 8).unwrap();
        let end = path.samples().last().unwrap();
        let p = tau(&b);
        for (k, z) in end.iter().enumerate() {
            assert!(close(*z, Complex64::new(p.apply(k) as f64 + 1.0, 0.0)));
        }
    }

    #[test]
    fn coefficients_stay_off_discriminant() {
        let b = BraidWord::new(4, vec![1, -2, 3, 3, -1]).unwrap();
        let path = braid_to_config_path(&b, 6).unwrap();
        assert!(path.min_separation() >= 1.0 - 1e-12);
        let coeffs = config_to_coeffs(&path, DEFAULT_CLEARANCE).unwrap();
        // |δ| = ∏ |r_j − r_k|^2 ≥ clearance^{n(n−1)}
        let bound = DEFAULT_CLEARANCE.powi(12);
        for c in &coeffs {
            assert!(discriminant_at(c).norm() >= bound);
        }
        let constant = config_to_coeffs(&braid_to_config_path(&BraidWord::identity(2), 4).unwrap(), 0.25).unwrap();
        assert!(constant.iter().all(|c| c == &constant[0]));
        assert!(matches!(config_to_coeffs(&path, 2.0), Err(BraidError::ClearanceViolation { .. })));
    }

    fn word(max_n: usize) -> impl Strategy<Value = BraidWord> {
        (2..=max_n).prop_flat_map(|n| {
            let k = n as i32 - 1;
            proptest::collection::vec((1..=k, any::<bool>()), 0..12)
                .prop_map(move |ls| BraidWord::new(n, ls.into_iter().map(|(l, s)| if s { l } else { -l }).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn tau_is_a_homomorphism(w in word(6), seed in any::<u64>()) {
            let n = w.strands();
            let mut ls = Vec::new();
            let mut s = seed;
            for _ in 0..(seed % 10) {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let l = (s >> 33) as i32 % (n as i32 - 1) + 1;
                ls.push(if s & 1 == 0 { l } else { -l });
            }
            let v = BraidWord::new(n, ls).unwrap();
            prop_assert_eq!(tau(&w.concat(&v)), tau(&w).then(&tau(&v)));
            prop_assert!(tau(&w.concat(&w.inverse())).is_identity());
        }

        #[test]
        fn lift_inverts_tau_randomly(images in (2usize..=8).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle())) {
            let p = Permutation::from_images(images).unwrap();
            prop_assert_eq!(tau(&lift_permutation(&p)), p);
        }
    }
}
