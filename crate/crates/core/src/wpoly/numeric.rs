//! Floating-point polynomial utilities: Horner evaluation, Vieta expansion,
//! discriminants and simultaneous root finding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("roots are nearly repeated: gap {gap:e} below tolerance {tol:e}")]
    NearMultiple { gap: f64, tol: f64 },
    #[error("root iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("non-finite coefficient")]
    NonFinite,
}

/// Value of the monic polynomial `z^n + a_{n-1} z^{n-1} + ... + a_0`.
pub fn eval_monic(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(1.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and derivative of the monic polynomial at `z`.
pub fn eval_monic_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Coefficients `a_0..a_{n-1}` of `∏ (z - r_k)`.
pub fn coeffs_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    // full[k] is the coefficient of z^k, leading coefficient kept at the end
    let mut full = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); full.len() + 1];
        for (k, &c) in full.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        full = next;
    }
    full.pop();
    full
}

pub fn min_gap(roots: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            gap = gap.min((roots[i] - roots[j]).norm());
        }
    }
    gap
}

/// `∏_{j<k} (r_j - r_k)^2`.
pub fn discriminant_from_roots(roots: &[Complex64]) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for j in 0..roots.len() {
        for k in j + 1..roots.len() {
            let diff = roots[j] - roots[k];
            d *= diff * diff;
        }
    }
    d
}

/// Discriminant `(-1)^{n(n-1)/2} Res(f, f')` of the monic polynomial with
/// the given lower coefficients. Degree one has discriminant 1.
pub fn discriminant_at(coeffs: &[Complex64]) -> Complex64 {
    let n = coeffs.len();
    if n <= 1 {
        return Complex64::new(1.0, 0.0);
    }
    // descending coefficient lists
    let mut f: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    f.extend(coeffs.iter().rev());
    let df: Vec<Complex64> = (0..n).map(|k| f[k] * (n - k) as f64).collect();
    let size = 2 * n - 1;
    let mut m = DMatrix::<Complex64>::zeros(size, size);
    for row in 0..n - 1 {
        for (k, &c) in f.iter().enumerate() {
            m[(row, row + k)] = c;
        }
    }
    for row in 0..n {
        for (k, &c) in df.iter().enumerate() {
            m[(n - 1 + row, row + k)] = c;
        }
    }
    let res = m.lu().determinant();
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// Cauchy-style bound `1 + max |a_k|`.
pub fn root_radius(coeffs: &[Complex64]) -> f64 {
    1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// All roots of the monic polynomial by Aberth–Ehrlich iteration from a
/// circle of radius `1 + max|a_k|`, followed by Newton polishing.
pub fn roots_at(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let n = coeffs.len();
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(RootError::NonFinite);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-coeffs[0]]);
    }
    let radius = root_radius(coeffs);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut converged = false;
    for _ in 0..1000 {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = eval_monic_with_derivative(coeffs, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }
    for root in z.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = eval_monic_with_derivative(coeffs, *root);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *root -= step;
            if step.norm() <= 1e-16 * (1.0 + root.norm()) {
                break;
            }
        }
    }
    let scale = 1.0 + z.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let tol = 1e-9 * scale;
    let gap = min_gap(&z);
    if gap < tol {
        return Err(RootError::NearMultiple { gap, tol });
    }
    let residual = z
        .iter()
        .map(|&r| eval_monic(coeffs, r).norm())
        .fold(0.0, f64::max);
    let allowed = 1e-10 * radius * scale.powi(n as i32 - 1).max(1.0);
    if !converged && residual > allowed {
        return Err(RootError::NoConvergence { residual });
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn vieta_examples() {
        assert_eq!(coeffs_from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]), vec![c(-1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            coeffs_from_roots(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]),
            vec![c(0.0, 0.0), c(2.0, 0.0), c(-3.0, 0.0)]
        );
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant_at(&[c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!((d - c(4.0, 0.0)).norm() < 1e-12);
        assert_eq!(discriminant_at(&[c(0.0, 0.0), c(0.0, 0.0)]).norm(), 0.0);
        let d = discriminant_at(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((d - c(-27.0, 0.0)).norm() < 1e-10, "{d}");
        assert_eq!(discriminant_at(&[c(3.0, 1.0)]), c(1.0, 0.0));
    }

    #[test]
    fn root_examples() {
        let r = sorted(roots_at(&[c(-1.0, 0.0), c(0.0, 0.0)]).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-13 && (r[1] - c(1.0, 0.0)).norm() < 1e-13);
        let r = sorted(roots_at(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-13 && (r[1] - c(0.0, 1.0)).norm() < 1e-13);
        let r = sorted(roots_at(&[c(2.0, 0.0), c(-1.0, 0.0), c(-2.0, 0.0)]).unwrap());
        for (got, want) in r.iter().zip([-1.0, 1.0, 2.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-12);
        }
        assert!(matches!(roots_at(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(RootError::NearMultiple { .. })));
    }

    proptest! {
        #[test]
        fn discriminant_matches_root_product(
            pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..7)
        ) {
            let roots: Vec<Complex64> = pts.iter().map(|&(x, y)| c(x, y)).collect();
            prop_assume!(min_gap(&roots) > 0.05);
            let coeffs = coeffs_from_roots(&roots);
            let a = discriminant_at(&coeffs);
            let b = discriminant_from_roots(&roots);
            prop_assert!((a - b).norm() <= 1e-7 * (1.0 + b.norm()), "{} vs {}", a, b);
        }

        #[test]
        fn recovered_roots_have_small_residual(
            pts in proptest::collection::vec((-1.5f64..1.5, -1.5f64..1.5), 1..9)
        ) {
            let roots: Vec<Complex64> = pts.iter().map(|&(x, y)| c(x, y)).collect();
            prop_assume!(min_gap(&roots) > 0.05);
            let coeffs = coeffs_from_roots(&roots);
            let found = roots_at(&coeffs).unwrap();
            let bound = 1e-10 * root_radius(&coeffs);
            for r in &found {
                prop_assert!(eval_monic(&coeffs, *r).norm() < bound);
            }
            for r in &roots {
                let d = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(d < 1e-8);
            }
        }
    }
}
