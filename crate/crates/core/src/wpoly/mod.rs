//! Weierstrass polynomials `z^n + a_{n−1}(x) z^{n−1} + ⋯ + a_0(x)` with
//! coefficients in `ℚ(i)[u, v]` over a disc with holes.

pub mod exact;
pub mod geometry;
pub mod numeric;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

pub use exact::{rat, BivariatePolyQi, GaussianRational, Rational};
pub use geometry::{generator_loops, BaseSpace, Disc, GeometryError, LoopPath, Point, Polyline, DEFAULT_LOOP_VERTICES};
pub use numeric::{coeffs_from_roots, discriminant_at, roots_at, RootError};

use exact::rational_to_f64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WpolyError {
    #[error("expected {expected} coefficient polynomials, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("discriminant vanishes at grid point ({u}, {v})")]
    SingularAt { u: f64, v: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Anything that yields the lower coefficients of a monic degree-`n`
/// polynomial at each point of the plane.
pub trait CoefficientMap {
    fn degree(&self) -> usize;
    fn coeffs_at(&self, u: f64, v: f64) -> Vec<Complex64>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub struct WeierstrassPoly {
    coeffs: Vec<BivariatePolyQi>,
}

impl WeierstrassPoly {
    /// `coeffs[j]` is `a_j`; the degree is `coeffs.len()`.
    pub fn new(coeffs: Vec<BivariatePolyQi>) -> Result<Self, WpolyError> {
        if coeffs.is_empty() {
            return Err(WpolyError::ZeroDegree);
        }
        Ok(WeierstrassPoly { coeffs })
    }

    /// Constructs the polynomial and checks that its discriminant does not
    /// vanish on the sample grid of `base`.
    pub fn new_on(coeffs: Vec<BivariatePolyQi>, base: &BaseSpace, grid: usize) -> Result<Self, WpolyError> {
        let f = Self::new(coeffs)?;
        f.check_nonsingular(base, grid)?;
        Ok(f)
    }

    pub fn check_nonsingular(&self, base: &BaseSpace, grid: usize) -> Result<(), WpolyError> {
        let compiled = self.compile(&base.scale());
        for p in base.sample_grid(grid) {
            let (u, v) = geometry::point_to_f64(&p);
            let d = discriminant_at(&compiled.coeffs_at(u, v));
            if d.norm() == 0.0 || !d.re.is_finite() || !d.im.is_finite() {
                return Err(WpolyError::SingularAt { u, v });
            }
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BivariatePolyQi] {
        &self.coeffs
    }

    /// Coefficients at a point of `X`, exactly.
    pub fn eval_exact(&self, base: &BaseSpace, x: &Point) -> Result<Vec<GaussianRational>, WpolyError> {
        if !base.contains(x) {
            return Err(GeometryError::PointOutside.into());
        }
        Ok(self.coeffs.iter().map(|a| a.eval(&x.0, &x.1)).collect())
    }

    /// Exact evaluation rounded to floating point.
    pub fn eval_poly(&self, base: &BaseSpace, x: &Point) -> Result<Vec<Complex64>, WpolyError> {
        Ok(self.eval_exact(base, x)?.iter().map(GaussianRational::to_complex).collect())
    }

    /// Floating-point evaluator in the scaled variables `(u/s, v/s)`.
    pub fn compile(&self, scale: &Rational) -> CompiledPoly {
        CompiledPoly {
            scale: rational_to_f64(scale),
            terms: self.coeffs.iter().map(|a| a.scaled_f64_terms(scale)).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree(),
            "coeffs": self.coeffs.iter().map(BivariatePolyQi::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, WpolyError> {
        let degree = v
            .get("degree")
            .and_then(Value::as_u64)
            .ok_or_else(|| WpolyError::Json("missing integer \"degree\"".into()))? as usize;
        let Some(Value::Array(list)) = v.get("coeffs") else {
            return Err(WpolyError::Json("missing array \"coeffs\"".into()));
        };
        if list.len() != degree {
            return Err(WpolyError::CoefficientCount { expected: degree, got: list.len() });
        }
        let coeffs = list
            .iter()
            .enumerate()
            .map(|(j, c)| BivariatePolyQi::from_json(c).map_err(|e| WpolyError::Json(format!("coeffs[{j}]: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coeffs)
    }
}

impl TryFrom<Value> for WeierstrassPoly {
    type Error = WpolyError;
    fn try_from(v: Value) -> Result<Self, Self::Error> {
        WeierstrassPoly::from_json(&v)
    }
}

impl From<WeierstrassPoly> for Value {
    fn from(f: WeierstrassPoly) -> Value {
        f.to_json()
    }
}

/// Floating-point form of a [`WeierstrassPoly`], evaluated in scaled
/// coordinates to keep monomials of moderate size.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    scale: f64,
    terms: Vec<Vec<(u32, u32, Complex64)>>,
}

impl CoefficientMap for CompiledPoly {
    fn degree(&self) -> usize {
        self.terms.len()
    }

    fn coeffs_at(&self, u: f64, v: f64) -> Vec<Complex64> {
        let (su, sv) = (u / self.scale, v / self.scale);
        self.terms
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|&(a, b, c)| c * su.powi(a as i32) * sv.powi(b as i32))
                    .sum()
            })
            .collect()
    }
}
