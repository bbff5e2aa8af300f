//! Polynomial approximation of a continuous coefficient map `a′: X → Bⁿ` by
//! coefficients in `ℚ(i)[u, v]`, with the `ε/(4n)` certificate and a check
//! that the straight-line homotopy between them avoids the discriminant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wpoly::exact::{rational_to_f64, round_rational};
use crate::wpoly::geometry::point_to_f64;
use crate::wpoly::numeric::{discriminant_at, min_gap, roots_at};
use crate::wpoly::{BaseSpace, BivariatePolyQi, CoefficientMap, GaussianRational, Point, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("empty sample grid")]
    EmptyGrid,
    #[error("discriminant vanishes at sample {index} ({u}, {v})")]
    Singular { index: usize, u: f64, v: f64 },
    #[error("eps_hat must be positive and finite, got {0}")]
    BadEps(f64),
    #[error("no fit up to degree {max_degree} meets the bound {bound:e} (best error {best_error:e})")]
    DegreeExhausted { max_degree: u32, bound: f64, best_error: f64 },
    #[error("sample values have inconsistent degree")]
    Shape,
}

pub const DEFAULT_GRID: usize = 41;
pub const DEFAULT_T_MESH: usize = 17;
pub const DEFAULT_CONSERVATISM: f64 = 0.5;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Values of a coefficient map on a grid of rational points of `X`.
#[derive(Clone, Debug)]
pub struct SampledCoeffMap {
    grid: Vec<Point>,
    grid_f64: Vec<(f64, f64)>,
    values: Vec<Vec<Complex64>>,
    degree: usize,
    provenance: String,
}

impl SampledCoeffMap {
    pub fn new(grid: Vec<Point>, values: Vec<Vec<Complex64>>, provenance: impl Into<String>) -> Result<Self, ApproxError> {
        if grid.is_empty() {
            return Err(ApproxError::EmptyGrid);
        }
        if grid.len() != values.len() {
            return Err(ApproxError::Shape);
        }
        let degree = values[0].len();
        if values.iter().any(|v| v.len() != degree) {
            return Err(ApproxError::Shape);
        }
        let grid_f64: Vec<(f64, f64)> = grid.iter().map(point_to_f64).collect();
        for (index, (v, &(u, w))) in values.iter().zip(&grid_f64).enumerate() {
            let d = discriminant_at(v);
            if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
                return Err(ApproxError::Singular { index, u, v: w });
            }
        }
        Ok(SampledCoeffMap { grid, grid_f64, values, degree, provenance: provenance.into() })
    }

    /// Samples `map` on the `k × k` grid of `base`.
    pub fn sample<M: CoefficientMap + ?Sized>(
        map: &M,
        base: &BaseSpace,
        k: usize,
        provenance: impl Into<String>,
    ) -> Result<Self, ApproxError> {
        let grid = base.sample_grid(k);
        let values = grid
            .iter()
            .map(|p| {
                let (u, v) = point_to_f64(p);
                map.coeffs_at(u, v)
            })
            .collect();
        Self::new(grid, values, provenance)
    }

    pub fn grid(&self) -> &[Point] {
        &self.grid
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

/// `min over the grid of s·(s/(4R))^{n−1}` times `conservatism`, where `s`
/// is the minimal root gap and `R = 1 + max|r_k|`. Degree one has no
/// discriminant locus; its estimate is `conservatism` itself.
pub fn estimate_eps(map: &SampledCoeffMap, conservatism: f64) -> Result<f64, ApproxError> {
    let n = map.degree;
    if n <= 1 {
        return Ok(conservatism);
    }
    let mut best = f64::INFINITY;
    for (index, v) in map.values.iter().enumerate() {
        let (u, w) = map.grid_f64[index];
        let roots = roots_at(v).map_err(|_| ApproxError::Singular { index, u, v: w })?;
        let s = min_gap(&roots);
        let r = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        best = best.min(s * (s / (4.0 * r)).powi(n as i32 - 1));
    }
    Ok(best * conservatism)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationCertificate {
    pub eps_hat: f64,
    /// `eps_hat / (4n)`.
    pub component_bound: f64,
    /// Sup-grid errors of `b_0, c_0, b_1, c_1, …` (real and imaginary parts).
    pub per_component_error: Vec<f64>,
    /// Sup over the grid of `Σ_j |a_j − a′_j|`.
    pub total_error: f64,
    pub homotopy_checked: bool,
    pub min_homotopy_discriminant: f64,
    pub degree: u32,
    pub max_denominator: u64,
    pub grid_points: usize,
    pub t_mesh: usize,
}

impl ApproximationCertificate {
    /// Every component below `ε̂/(4n)`, the summed bound below `ε̂/2`, and
    /// the homotopy check passed.
    pub fn is_valid(&self) -> bool {
        let n = self.per_component_error.len() / 2;
        if n == 0 || self.per_component_error.len() != 2 * n || self.eps_hat.is_nan() || self.eps_hat <= 0.0 {
            return false;
        }
        let bound = self.eps_hat / (4.0 * n as f64);
        let components = self.per_component_error.iter().all(|&e| e < bound);
        let summed: f64 = self.per_component_error.iter().sum();
        // |x + iy| ≤ |x| + |y| makes the componentwise sum dominate the total
        components
            && self.total_error <= summed
            && summed < self.eps_hat / 2.0
            && self.total_error < self.eps_hat / 2.0
            && self.homotopy_checked
    }
}

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub max_denominator: u64,
    pub t_mesh: usize,
    /// Fits use the scaled variables `(u/scale, v/scale)`.
    pub scale: Rational,
}

impl FitOptions {
    pub fn for_base(base: &BaseSpace) -> Self {
        FitOptions { max_denominator: DEFAULT_MAX_DENOMINATOR, t_mesh: DEFAULT_T_MESH, scale: base.scale() }
    }
}

#[derive(Clone, Debug)]
pub struct Fit {
    pub coeffs: Vec<BivariatePolyQi>,
    pub certificate: ApproximationCertificate,
}

fn monomials(d: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for total in 0..=d {
        for a in (0..=total).rev() {
            out.push((a, total - a));
        }
    }
    out
}

/// Least-squares fits of every real component on the scaled monomials of
/// total degree `≤ d`; returns one coefficient vector per component.
fn least_squares(points: &[(f64, f64)], targets: &[Vec<f64>], basis: &[(u32, u32)]) -> Vec<Vec<f64>> {
    let rows = points.len();
    let cols = basis.len();
    let a = DMatrix::from_fn(rows, cols, |r, c| {
        let (x, y) = points[r];
        x.powi(basis[c].0 as i32) * y.powi(basis[c].1 as i32)
    });
    // column equilibration before the QR solve
    let norms: Vec<f64> = (0..cols).map(|c| a.column(c).norm().max(1e-300)).collect();
    let mut scaled = a;
    for (c, &nrm) in norms.iter().enumerate() {
        scaled.column_mut(c).scale_mut(1.0 / nrm);
    }
    let qr = scaled.clone().qr();
    let q = qr.q();
    let r = qr.r();
    targets
        .iter()
        .map(|t| {
            let rhs = q.transpose() * DVector::from_column_slice(t);
            let mut x = r.solve_upper_triangular(&rhs).unwrap_or_else(|| DVector::zeros(cols));
            // one step of iterative refinement on the normal residual
            let resid = DVector::from_column_slice(t) - &scaled * &x;
            if let Some(dx) = r.solve_upper_triangular(&(q.transpose() * resid)) {
                x += dx;
            }
            x.iter().zip(&norms).map(|(v, n)| v / n).collect()
        })
        .collect()
}

fn powers_f64(x: f64, d: u32) -> Vec<f64> {
    let mut out = vec![1.0];
    for k in 0..d as usize {
        out.push(out[k] * x);
    }
    out
}

fn powers_exact(x: &Rational, d: u32) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for k in 0..d as usize {
        out.push(&out[k] * x);
    }
    out
}

/// Real components (`[b_0, c_0, b_1, …]`) of the sample values.
fn components(values: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let n = values[0].len();
    (0..2 * n)
        .map(|k| values.iter().map(|v| if k % 2 == 0 { v[k / 2].re } else { v[k / 2].im }).collect())
        .collect()
}

/// Least-squares fitting at increasing total degree, rational rounding, and
/// exact re-verification of the `ε̂/(4n)` bounds after rounding.
pub fn fit_rational_polys(
    map: &SampledCoeffMap,
    max_degree: u32,
    eps_hat: f64,
    opts: &FitOptions,
) -> Result<Fit, ApproxError> {
    if !(eps_hat > 0.0 && eps_hat.is_finite()) {
        return Err(ApproxError::BadEps(eps_hat));
    }
    let n = map.degree;
    let bound = eps_hat / (4.0 * n as f64);
    let s = rational_to_f64(&opts.scale);
    let scaled_pts: Vec<(f64, f64)> = map.grid_f64.iter().map(|&(u, v)| (u / s, v / s)).collect();
    let exact_pts: Vec<(Rational, Rational)> =
        map.grid.iter().map(|(u, v)| (u / &opts.scale, v / &opts.scale)).collect();
    let targets = components(&map.values);
    let mut best_error = f64::INFINITY;
    for d in 0..=max_degree {
        let basis = monomials(d);
        if basis.len() > map.grid.len() {
            break;
        }
        let fits = least_squares(&scaled_pts, &targets, &basis);
        let float_err = fits
            .iter()
            .zip(&targets)
            .map(|(coef, t)| {
                scaled_pts
                    .iter()
                    .zip(t)
                    .map(|(&(x, y), &target)| {
                        let (px, py) = (powers_f64(x, d), powers_f64(y, d));
                        let val: f64 = coef.iter().zip(&basis).map(|(c, &(a, b))| c * px[a as usize] * py[b as usize]).sum();
                        (val - target).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        best_error = best_error.min(float_err);
        if float_err >= bound {
            continue;
        }
        // simplest rationals whose rounding error stays well inside the bound
        let tol = (bound - float_err) / (4.0 * basis.len() as f64);
        let rounded: Vec<Vec<Rational>> = fits
            .iter()
            .map(|coef| coef.iter().map(|&c| round_rational(c, opts.max_denominator, tol)).collect())
            .collect();
        let exact_values = evaluate_exact(&rounded, &basis, &exact_pts, d);
        let per_component: Vec<f64> = exact_values
            .iter()
            .zip(&targets)
            .map(|(vals, t)| vals.iter().zip(t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .collect();
        let worst = per_component.iter().copied().fold(0.0, f64::max);
        best_error = best_error.min(worst);
        if worst >= bound {
            continue;
        }
        let fitted: Vec<Vec<Complex64>> = (0..map.grid.len())
            .map(|p| (0..n).map(|j| Complex64::new(exact_values[2 * j][p], exact_values[2 * j + 1][p])).collect())
            .collect();
        let homotopy = check_homotopy_values(map, &fitted, eps_hat, opts.t_mesh);
        let coeffs = (0..n).map(|j| unscale(&rounded[2 * j], &rounded[2 * j + 1], &basis, &opts.scale)).collect();
        let certificate = ApproximationCertificate {
            eps_hat,
            component_bound: bound,
            per_component_error: per_component,
            total_error: homotopy.sup_distance,
            homotopy_checked: homotopy.passed,
            min_homotopy_discriminant: homotopy.min_abs_discriminant,
            degree: d,
            max_denominator: opts.max_denominator,
            grid_points: map.grid.len(),
            t_mesh: opts.t_mesh,
        };
        return Ok(Fit { coeffs, certificate });
    }
    Err(ApproxError::DegreeExhausted { max_degree, bound, best_error })
}

fn evaluate_exact(rounded: &[Vec<Rational>], basis: &[(u32, u32)], pts: &[(Rational, Rational)], d: u32) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::with_capacity(pts.len()); rounded.len()];
    for (x, y) in pts {
        let (px, py) = (powers_exact(x, d), powers_exact(y, d));
        let monos: Vec<Rational> = basis.iter().map(|&(a, b)| &px[a as usize] * &py[b as usize]).collect();
        for (k, coef) in rounded.iter().enumerate() {
            let mut acc = Rational::zero();
            for (c, m) in coef.iter().zip(&monos) {
                if !c.is_zero() {
                    acc += c * m;
                }
            }
            out[k].push(rational_to_f64(&acc));
        }
    }
    out
}

/// `b + i c` in the unscaled variables.
fn unscale(b: &[Rational], c: &[Rational], basis: &[(u32, u32)], scale: &Rational) -> BivariatePolyQi {
    let mut p = BivariatePolyQi::zero();
    for ((&(du, dv), re), im) in basis.iter().zip(b).zip(c) {
        let f = num_traits::pow(scale.clone(), (du + dv) as usize).recip();
        p.add_term(du, dv, GaussianRational::new(re * &f, im * &f));
    }
    p
}

#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyCheck {
    pub sup_distance: f64,
    pub min_abs_discriminant: f64,
    pub passed: bool,
}

/// `sup ‖a − a′‖ < ε̂/2` and `δ((1−t)a′ + t a) ≠ 0` on the grid × t-mesh.
pub fn check_homotopy_values(map: &SampledCoeffMap, fitted: &[Vec<Complex64>], eps_hat: f64, t_mesh: usize) -> HomotopyCheck {
    let mut sup_distance: f64 = 0.0;
    let mut min_abs = f64::INFINITY;
    let mut nonzero = fitted.len() == map.values.len();
    let steps = t_mesh.max(2);
    for (target, a) in map.values.iter().zip(fitted) {
        let dist: f64 = target.iter().zip(a).map(|(x, y)| (x - y).norm()).sum();
        sup_distance = sup_distance.max(dist);
        for k in 0..steps {
            let t = k as f64 / (steps - 1) as f64;
            let h: Vec<Complex64> = target.iter().zip(a).map(|(x, y)| x * (1.0 - t) + y * t).collect();
            let d = discriminant_at(&h).norm();
            min_abs = min_abs.min(d);
            if d == 0.0 || !d.is_finite() {
                nonzero = false;
            }
        }
    }
    HomotopyCheck { sup_distance, min_abs_discriminant: min_abs, passed: nonzero && sup_distance < eps_hat / 2.0 }
}

/// [`check_homotopy_values`] for fitted polynomials, evaluated exactly.
pub fn check_homotopy(map: &SampledCoeffMap, fitted: &[BivariatePolyQi], eps_hat: f64, t_mesh: usize) -> bool {
    let values: Vec<Vec<Complex64>> = map
        .grid
        .iter()
        .map(|(u, v)| fitted.iter().map(|a| a.eval(u, v).to_complex()).collect())
        .collect();
    check_homotopy_values(map, &values, eps_hat, t_mesh).passed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wpoly::rat;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_map(base: &BaseSpace, value: Vec<Complex64>) -> SampledCoeffMap {
        let grid = base.sample_grid(11);
        let values = vec![value; grid.len()];
        SampledCoeffMap::new(grid, values, "constant").unwrap()
    }

    #[test]
    fn eps_formula_examples() {
        let x = BaseSpace::default_for(1);
        let m = constant_map(&x, vec![c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!((estimate_eps(&m, 1.0).unwrap() - 0.5).abs() < 1e-12);
        // roots ±2: s = 4, R = 3 → 4·(4/12)
        let m2 = constant_map(&x, vec![c(-4.0, 0.0), c(0.0, 0.0)]);
        let e2 = estimate_eps(&m2, 1.0).unwrap();
        assert!((e2 - 4.0 / 3.0).abs() < 1e-12);
        assert!(e2 > 0.0);
    }

    #[test]
    fn repeated_roots_are_rejected() {
        let x = BaseSpace::default_for(1);
        let grid = x.sample_grid(5);
        let mut values = vec![vec![c(-1.0, 0.0), c(0.0, 0.0)]; grid.len()];
        values[3] = vec![c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(SampledCoeffMap::new(grid, values, "bad"), Err(ApproxError::Singular { index: 3, .. })));
    }

    #[test]
    fn constant_map_recovers_exactly() {
        let x = BaseSpace::default_for(1);
        let m = constant_map(&x, vec![c(-1.0, 0.0)]);
        let fit = fit_rational_polys(&m, 4, 0.5, &FitOptions::for_base(&x)).unwrap();
        assert_eq!(fit.coeffs[0], BivariatePolyQi::constant(GaussianRational::from_ints(-1, 0)));
        assert_eq!(fit.certificate.degree, 0);
        assert!(fit.certificate.per_component_error.iter().all(|&e| e == 0.0));
        assert!(fit.certificate.is_valid());
    }

    #[test]
    fn linear_map_recovers_exactly() {
        // a′_0 = −(u + iv)/10, a′_1 = 3 on the disc with one hole
        let x = BaseSpace::default_for(1);
        let grid = x.sample_grid(41);
        let values: Vec<Vec<Complex64>> = grid
            .iter()
            .map(|p| {
                let (u, v) = point_to_f64(p);
                vec![-c(u, v) / 10.0, c(3.0, 0.0)]
            })
            .collect();
        let m = SampledCoeffMap::new(grid, values, "linear").unwrap();
        let eps = estimate_eps(&m, DEFAULT_CONSERVATISM).unwrap();
        let fit = fit_rational_polys(&m, 6, eps, &FitOptions::for_base(&x)).unwrap();
        let mut expected = BivariatePolyQi::w().scale(&GaussianRational::new(rat(-1, 10), rat(0, 1)));
        assert_eq!(fit.coeffs[0], expected.clone());
        expected = BivariatePolyQi::constant(GaussianRational::from_ints(3, 0));
        assert_eq!(fit.coeffs[1], expected);
        assert_eq!(fit.certificate.degree, 1);
        assert!(fit.certificate.is_valid());
        assert!(check_homotopy(&m, &fit.coeffs, eps, DEFAULT_T_MESH));
    }

    #[test]
    fn homotopy_examples() {
        let x = BaseSpace::default_for(1);
        let m = constant_map(&x, vec![c(-1.0, 0.0), c(0.0, 0.0)]);
        let eps = 0.5;
        let same = BivariatePolyQi::constant(GaussianRational::from_ints(-1, 0));
        assert!(check_homotopy(&m, &[same.clone(), BivariatePolyQi::zero()], eps, 17));
        let shifted = BivariatePolyQi::constant(GaussianRational::new(rat(-1, 1) + rat(1, 8), rat(0, 1)));
        assert!(check_homotopy(&m, &[shifted, BivariatePolyQi::zero()], eps, 17));
        let far = BivariatePolyQi::constant(GaussianRational::from_ints(1, 0));
        assert!(!check_homotopy(&m, &[far, BivariatePolyQi::zero()], eps, 17));
    }

    #[test]
    fn impossible_bound_exhausts_degrees() {
        let x = BaseSpace::default_for(1);
        let grid = x.sample_grid(21);
        let values: Vec<Vec<Complex64>> = grid
            .iter()
            .map(|p| {
                let (u, v) = point_to_f64(p);
                vec![c((u * 3.0).sin() + 5.0, v.cos())]
            })
            .collect();
        let m = SampledCoeffMap::new(grid, values, "oscillating").unwrap();
        assert!(matches!(
            fit_rational_polys(&m, 3, 1e-6, &FitOptions::for_base(&x)),
            Err(ApproxError::DegreeExhausted { max_degree: 3, .. })
        ));
    }

    #[test]
    fn certificate_validity_is_recomputed() {
        let mut cert = ApproximationCertificate {
            eps_hat: 1.0,
            component_bound: 0.125,
            per_component_error: vec![0.1, 0.1, 0.1, 0.1],
            total_error: 0.2,
            homotopy_checked: true,
            min_homotopy_discriminant: 1.0,
            degree: 1,
            max_denominator: 10,
            grid_points: 1,
            t_mesh: 17,
        };
        assert!(cert.is_valid());
        cert.per_component_error[2] = 0.13;
        assert!(!cert.is_valid());
        cert.per_component_error[2] = 0.1;
        cert.homotopy_checked = false;
        assert!(!cert.is_valid());
    }
}
