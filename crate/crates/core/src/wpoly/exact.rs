//! Exact Gaussian rationals and bivariate polynomials over `ℚ(i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator and denominator may individually overflow f64
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// JSON integer, or a decimal string when it does not fit in `i64`.
pub fn bigint_to_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("expected an integer, got {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("bad integer string {s:?}")),
        other => Err(format!("expected an integer, got {other}")),
    }
}

pub fn rational_from_parts(num: BigInt, den: BigInt) -> Result<Rational, String> {
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(num, den))
}

/// `[num, den]`.
pub fn rational_to_json(q: &Rational) -> Value {
    Value::Array(vec![bigint_to_json(q.numer()), bigint_to_json(q.denom())])
}

pub fn rational_from_json(v: &Value) -> Result<Rational, String> {
    match v {
        Value::Array(a) if a.len() == 2 => {
            rational_from_parts(bigint_from_json(&a[0])?, bigint_from_json(&a[1])?)
        }
        Value::Number(_) | Value::String(_) => Ok(BigRational::from_integer(bigint_from_json(v)?)),
        other => Err(format!("expected [num, den], got {other}")),
    }
}

/// An element `re + i·im` of `ℚ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussianRational { re, im: Rational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational::new(rat(re, 1), rat(im, 1))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        GaussianRational::new(&self.re * q, &self.im * q)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: Self) -> Self {
        GaussianRational::new(self.re + o.re, self.im + o.im)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: Self) -> Self {
        GaussianRational::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {sign} {}i)", self.re, self.im.abs())
            }
        }
    }
}

/// An element of `ℚ(i)[u, v]`, keyed by `(deg_u, deg_v)`. Zero coefficients
/// are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BivariatePolyQi {
    terms: BTreeMap<(u32, u32), GaussianRational>,
}

impl BivariatePolyQi {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    /// `u + i·v`.
    pub fn w() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, GaussianRational::one());
        p.add_term(0, 1, GaussianRational::i());
        p
    }

    pub fn add_term(&mut self, du: u32, dv: u32, c: GaussianRational) {
        let entry = self.terms.entry((du, dv)).or_insert_with(GaussianRational::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&(du, dv));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, du: u32, dv: u32) -> GaussianRational {
        self.terms.get(&(du, dv)).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self::zero();
        for (&(a, b), v) in &self.terms {
            out.add_term(a, b, v * c);
        }
        out
    }

    /// Polynomial in `w = u + iv` with the given coefficients (lowest first).
    pub fn from_w_poly(coeffs: &[GaussianRational]) -> Self {
        let w = Self::w();
        let mut acc = Self::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * &w) + &Self::constant(c.clone());
        }
        acc
    }

    /// Exact value at a rational point.
    pub fn eval(&self, u: &Rational, v: &Rational) -> GaussianRational {
        let max_u = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let max_v = self.terms.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let upow = powers(u, max_u);
        let vpow = powers(v, max_v);
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        for (&(a, b), c) in &self.terms {
            let m = &upow[a as usize] * &vpow[b as usize];
            re += &c.re * &m;
            im += &c.im * &m;
        }
        GaussianRational::new(re, im)
    }

    /// Floating-point coefficients in the scaled variables `(u/s, v/s)`.
    pub fn scaled_f64_terms(&self, s: &Rational) -> Vec<(u32, u32, Complex64)> {
        self.terms
            .iter()
            .map(|(&(a, b), c)| {
                let f = num_traits::pow(s.clone(), (a + b) as usize);
                (a, b, c.scale(&f).to_complex())
            })
            .collect()
    }

    /// `[[du, dv, re_num, re_den, im_num, im_den], ...]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(&(a, b), c)| {
                    Value::Array(vec![
                        Value::from(a),
                        Value::from(b),
                        bigint_to_json(c.re.numer()),
                        bigint_to_json(c.re.denom()),
                        bigint_to_json(c.im.numer()),
                        bigint_to_json(c.im.denom()),
                    ])
                })
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let Value::Array(terms) = v else {
            return Err("coefficient polynomial must be an array of terms".into());
        };
        let mut p = Self::zero();
        for (k, t) in terms.iter().enumerate() {
            let Value::Array(parts) = t else {
                return Err(format!("term {k}: expected an array"));
            };
            if parts.len() != 6 {
                return Err(format!("term {k}: expected 6 entries, got {}", parts.len()));
            }
            let deg = |x: &Value| {
                x.as_u64()
                    .and_then(|d| u32::try_from(d).ok())
                    .ok_or_else(|| format!("term {k}: bad degree {x}"))
            };
            let big = |x: &Value| bigint_from_json(x).map_err(|e| format!("term {k}: {e}"));
            let re = rational_from_parts(big(&parts[2])?, big(&parts[3])?).map_err(|e| format!("term {k}: {e}"))?;
            let im = rational_from_parts(big(&parts[4])?, big(&parts[5])?).map_err(|e| format!("term {k}: {e}"))?;
            p.add_term(deg(&parts[0])?, deg(&parts[1])?, GaussianRational::new(re, im));
        }
        Ok(p)
    }
}

fn powers(x: &Rational, max: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(Rational::one());
    for k in 0..max {
        out.push(&out[k] * x);
    }
    out
}

impl<'a> Add<&'a BivariatePolyQi> for &'a BivariatePolyQi {
    type Output = BivariatePolyQi;
    fn add(self, o: &BivariatePolyQi) -> BivariatePolyQi {
        let mut out = self.clone();
        for (&(a, b), c) in &o.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a BivariatePolyQi> for &'a BivariatePolyQi {
    type Output = BivariatePolyQi;
    fn mul(self, o: &BivariatePolyQi) -> BivariatePolyQi {
        let mut out = BivariatePolyQi::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &o.terms {
                out.add_term(a + x, b + y, c * d);
            }
        }
        out
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// stopping early at the first continued-fraction convergent within `tol`.
pub fn round_rational(x: f64, max_den: u64, tol: f64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut r = x;
    let max = BigInt::from(max_den);
    let mut best = BigRational::from_integer(BigInt::from(x.round() as i64));
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > max {
            break;
        }
        best = BigRational::new(p2.clone(), q2.clone());
        if (rational_to_f64(&best) - x).abs() <= tol {
            break;
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
        if r.abs() > 1e18 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_power_expands() {
        // (u + iv)^2 = u^2 - v^2 + 2iuv
        let w2 = BivariatePolyQi::from_w_poly(&[
            GaussianRational::zero(),
            GaussianRational::zero(),
            GaussianRational::one(),
        ]);
        assert_eq!(w2.coefficient(2, 0), GaussianRational::one());
        assert_eq!(w2.coefficient(0, 2), GaussianRational::from_ints(-1, 0));
        assert_eq!(w2.coefficient(1, 1), GaussianRational::from_ints(0, 2));
        let val = w2.eval(&rat(1, 1), &rat(1, 1));
        assert_eq!(val, GaussianRational::from_ints(0, 2));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let mut p = BivariatePolyQi::constant(GaussianRational::from_ints(1, 0));
        p.add_term(0, 0, GaussianRational::from_ints(-1, 0));
        assert!(p.is_zero());
    }

    #[test]
    fn json_round_trip_with_big_numbers() {
        let mut p = BivariatePolyQi::zero();
        let huge = BigInt::from(10).pow(30);
        p.add_term(2, 1, GaussianRational::new(BigRational::new(huge.clone(), BigInt::from(7)), rat(-1, 3)));
        let v = p.to_json();
        let back = BivariatePolyQi::from_json(&v).unwrap();
        assert_eq!(back, p);
        assert!(BivariatePolyQi::from_json(&serde_json::json!([[0, 0, 1, 0, 0, 1]])).is_err());
        assert!(BivariatePolyQi::from_json(&serde_json::json!([[0, 0, 1]])).is_err());
    }

    #[test]
    fn rounding_recovers_simple_fractions() {
        assert_eq!(round_rational(0.75, 1_000_000, 1e-12), rat(3, 4));
        assert_eq!(round_rational(-1.0 / 3.0 + 1e-15, 1_000_000, 1e-12), rat(-1, 3));
        let pi = round_rational(std::f64::consts::PI, 1000, 0.0);
        assert!(pi.denom() <= &BigInt::from(1000));
        assert!((rational_to_f64(&pi) - std::f64::consts::PI).abs() < 1e-6);
        assert_eq!(round_rational(0.0, 10, 0.0), rat(0, 1));
    }
}
