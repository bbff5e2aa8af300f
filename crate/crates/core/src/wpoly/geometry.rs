//! The base space `X` (a closed disc minus open holes), polygonal loops in it,
//! and the standard free basis of its fundamental group.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::exact::{rat, rational_from_json, rational_to_f64, rational_to_json, round_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("holes {0} and {1} have intersecting closures")]
    HolesOverlap(usize, usize),
    #[error("hole {0} is not contained in the open outer disc")]
    HoleOutside(usize),
    #[error("holes must be ordered by strictly increasing center abscissa (hole {0})")]
    HoleOrder(usize),
    #[error("radius must be positive")]
    BadRadius,
    #[error("basepoint is not in the interior of X")]
    BasepointOutside,
    #[error("loop {loop_index}: segment {segment} meets hole {hole}")]
    SegmentHitsHole { loop_index: usize, segment: usize, hole: usize },
    #[error("loop {loop_index}: vertex {vertex} leaves the outer disc")]
    LeavesOuterDisc { loop_index: usize, vertex: usize },
    #[error("loop {loop_index} is not closed at the basepoint")]
    NotClosed { loop_index: usize },
    #[error("geometry infeasible: corridor from the basepoint to hole {hole} is blocked by hole {blocker}")]
    Infeasible { hole: usize, blocker: usize },
    #[error("point is outside X")]
    PointOutside,
    #[error("invalid JSON: {0}")]
    Json(String),
}

pub type Point = (Rational, Rational);

fn dist2(a: &Point, b: &Point) -> Rational {
    let dx = &a.0 - &b.0;
    let dy = &a.1 - &b.1;
    &dx * &dx + &dy * &dy
}

/// Squared distance from `c` to the closed segment `pq`, exactly.
pub fn segment_dist2(p: &Point, q: &Point, c: &Point) -> Rational {
    let dx = &q.0 - &p.0;
    let dy = &q.1 - &p.1;
    let len2 = &dx * &dx + &dy * &dy;
    if len2.is_zero() {
        return dist2(p, c);
    }
    let dot = (&c.0 - &p.0) * &dx + (&c.1 - &p.1) * &dy;
    let t = (dot / &len2).max(Rational::zero()).min(Rational::one());
    let closest = (&p.0 + &t * &dx, &p.1 + &t * &dy);
    dist2(&closest, c)
}

pub fn point_to_f64(p: &Point) -> (f64, f64) {
    (rational_to_f64(&p.0), rational_to_f64(&p.1))
}

fn point_to_json(p: &Point) -> Value {
    json!([rational_to_json(&p.0), rational_to_json(&p.1)])
}

fn point_from_json(v: &Value) -> Result<Point, String> {
    match v {
        Value::Array(a) if a.len() == 2 => Ok((rational_from_json(&a[0])?, rational_from_json(&a[1])?)),
        other => Err(format!("expected a point [x, y], got {other}")),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disc {
    pub center: Point,
    pub radius: Rational,
}

impl Disc {
    pub fn new(center: Point, radius: Rational) -> Self {
        Disc { center, radius }
    }

    fn to_json(&self) -> Value {
        json!({"c": point_to_json(&self.center), "r": rational_to_json(&self.radius)})
    }

    fn from_json(v: &Value) -> Result<Self, String> {
        let c = v.get("c").ok_or("disc is missing \"c\"")?;
        let r = v.get("r").ok_or("disc is missing \"r\"")?;
        Ok(Disc::new(point_from_json(c)?, rational_from_json(r)?))
    }
}

/// `D̄ − ⋃ D_j` with a basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub struct BaseSpace {
    outer: Disc,
    holes: Vec<Disc>,
    basepoint: Point,
}

impl BaseSpace {
    pub fn new(outer: Disc, holes: Vec<Disc>, basepoint: Point) -> Result<Self, GeometryError> {
        let space = BaseSpace { outer, holes, basepoint };
        space.validate()?;
        Ok(space)
    }

    /// Outer radius 10 at the origin, unit holes centred at
    /// `(4(j−1) − 2(m−1), 0)`, basepoint `(0, −8)`.
    pub fn default_for(m: usize) -> Self {
        let holes = (0..m)
            .map(|j| Disc::new((rat(4 * j as i64 - 2 * (m as i64 - 1), 1), rat(0, 1)), rat(1, 1)))
            .collect();
        BaseSpace::new(
            Disc::new((rat(0, 1), rat(0, 1)), rat(10, 1)),
            holes,
            (rat(0, 1), rat(-8, 1)),
        )
        .expect("default geometry is valid for small m")
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !self.outer.radius.is_positive() {
            return Err(GeometryError::BadRadius);
        }
        for (i, h) in self.holes.iter().enumerate() {
            if !h.radius.is_positive() {
                return Err(GeometryError::BadRadius);
            }
            let room = &self.outer.radius - &h.radius;
            if !room.is_positive() || dist2(&h.center, &self.outer.center) >= &room * &room {
                return Err(GeometryError::HoleOutside(i));
            }
            if i > 0 && self.holes[i - 1].center.0 >= h.center.0 {
                return Err(GeometryError::HoleOrder(i));
            }
            for (j, k) in self.holes.iter().enumerate().skip(i + 1) {
                let sum = &h.radius + &k.radius;
                if dist2(&h.center, &k.center) <= &sum * &sum {
                    return Err(GeometryError::HolesOverlap(i, j));
                }
            }
        }
        if !self.contains(&self.basepoint) {
            return Err(GeometryError::BasepointOutside);
        }
        Ok(())
    }

    pub fn outer(&self) -> &Disc {
        &self.outer
    }

    pub fn holes(&self) -> &[Disc] {
        &self.holes
    }

    pub fn rank(&self) -> usize {
        self.holes.len()
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    /// Exact test for membership in the interior of `X`.
    pub fn contains(&self, p: &Point) -> bool {
        let r2 = &self.outer.radius * &self.outer.radius;
        dist2(p, &self.outer.center) < r2
            && self.holes.iter().all(|h| dist2(p, &h.center) > &h.radius * &h.radius)
    }

    pub fn contains_f64(&self, u: f64, v: f64) -> bool {
        let d2 = |c: &Point| {
            let (x, y) = point_to_f64(c);
            (u - x).powi(2) + (v - y).powi(2)
        };
        d2(&self.outer.center) < rational_to_f64(&self.outer.radius).powi(2)
            && self.holes.iter().all(|h| d2(&h.center) > rational_to_f64(&h.radius).powi(2))
    }

    /// Largest outer-disc coordinate extent, a natural scale for evaluation.
    pub fn scale(&self) -> Rational {
        let (cx, cy) = &self.outer.center;
        cx.abs().max(cy.abs()) + &self.outer.radius
    }

    /// Appends `count` unit holes to the right of the existing ones, spaced
    /// like the default geometry.
    pub fn with_extra_holes(&self, count: usize) -> Result<Self, GeometryError> {
        let mut holes = self.holes.clone();
        for _ in 0..count {
            let (x, r) = match holes.last() {
                Some(h) => (&h.center.0 + &h.radius + rat(3, 1), rat(1, 1)),
                None => (self.outer.center.0.clone(), rat(1, 1)),
            };
            let y = match holes.last() {
                Some(h) => h.center.1.clone(),
                None => self.outer.center.1.clone(),
            };
            holes.push(Disc::new((x, y), r));
        }
        BaseSpace::new(self.outer.clone(), holes, self.basepoint.clone())
    }

    /// Tensor grid of `k × k` rational points on the bounding box of the outer
    /// disc, filtered to the interior of `X`.
    pub fn sample_grid(&self, k: usize) -> Vec<Point> {
        let k = k.max(2);
        let (cx, cy) = &self.outer.center;
        let r = &self.outer.radius;
        let coord = |c: &Rational, a: usize| c + r * (rat(2 * a as i64, (k - 1) as i64) - rat(1, 1));
        let mut out = Vec::new();
        for a in 0..k {
            for b in 0..k {
                let p = (coord(cx, a), coord(cy, b));
                if self.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "outer": self.outer.to_json(),
            "holes": self.holes.iter().map(Disc::to_json).collect::<Vec<_>>(),
            "basepoint": point_to_json(&self.basepoint),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, GeometryError> {
        let err = GeometryError::Json;
        let outer = Disc::from_json(v.get("outer").ok_or_else(|| err("missing \"outer\"".into()))?)
            .map_err(|e| err(format!("outer: {e}")))?;
        let holes = match v.get("holes") {
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, h)| Disc::from_json(h).map_err(|e| err(format!("holes[{i}]: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
            _ => return Err(err("missing array \"holes\"".into())),
        };
        let basepoint = point_from_json(v.get("basepoint").ok_or_else(|| err("missing \"basepoint\"".into()))?)
            .map_err(|e| err(format!("basepoint: {e}")))?;
        BaseSpace::new(outer, holes, basepoint)
    }
}

impl TryFrom<Value> for BaseSpace {
    type Error = GeometryError;
    fn try_from(v: Value) -> Result<Self, Self::Error> {
        BaseSpace::from_json(&v)
    }
}

impl From<BaseSpace> for Value {
    fn from(b: BaseSpace) -> Value {
        b.to_json()
    }
}

/// A closed polyline with rational vertices, starting and ending at the
/// basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopPath {
    vertices: Vec<Point>,
}

impl LoopPath {
    pub fn new(vertices: Vec<Point>) -> Self {
        LoopPath { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Exact check that the loop is closed at the basepoint and stays in `X`.
    pub fn validate(&self, base: &BaseSpace, loop_index: usize) -> Result<(), GeometryError> {
        let bp = base.basepoint();
        if self.vertices.first() != Some(bp) || self.vertices.last() != Some(bp) {
            return Err(GeometryError::NotClosed { loop_index });
        }
        let r2 = &base.outer.radius * &base.outer.radius;
        for (vertex, p) in self.vertices.iter().enumerate() {
            if dist2(p, &base.outer.center) >= r2 {
                return Err(GeometryError::LeavesOuterDisc { loop_index, vertex });
            }
        }
        for (segment, w) in self.vertices.windows(2).enumerate() {
            for (hole, h) in base.holes.iter().enumerate() {
                if segment_dist2(&w[0], &w[1], &h.center) <= &h.radius * &h.radius {
                    return Err(GeometryError::SegmentHitsHole { loop_index, segment, hole });
                }
            }
        }
        Ok(())
    }

    /// Concatenation: traverse `self`, then `other`.
    pub fn concat(&self, other: &LoopPath) -> LoopPath {
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices.iter().skip(1).cloned());
        LoopPath { vertices }
    }

    pub fn reversed(&self) -> LoopPath {
        LoopPath { vertices: self.vertices.iter().rev().cloned().collect() }
    }

    pub fn to_f64(&self) -> Polyline {
        Polyline::new(self.vertices.iter().map(point_to_f64).collect())
    }

    /// Winding number of the polyline about `(x, y)`.
    pub fn winding_number(&self, x: f64, y: f64) -> i64 {
        let mut total = 0.0;
        for w in self.vertices.windows(2) {
            let (ax, ay) = point_to_f64(&w[0]);
            let (bx, by) = point_to_f64(&w[1]);
            let a = Complex64::new(ax - x, ay - y);
            let b = Complex64::new(bx - x, by - y);
            total += (b / a).arg();
        }
        (total / std::f64::consts::TAU).round() as i64
    }
}

/// Floating-point arc-length parametrization of a polyline over `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Polyline {
    points: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            let d = ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt();
            cumulative.push(cumulative.last().unwrap() + d);
        }
        Polyline { points, cumulative }
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let total = self.length();
        if self.points.len() < 2 || total == 0.0 {
            return self.points.first().copied().unwrap_or((0.0, 0.0));
        }
        let target = s.clamp(0.0, 1.0) * total;
        let k = match self.cumulative.binary_search_by(|c| c.partial_cmp(&target).unwrap()) {
            Ok(k) => return self.points[k],
            Err(k) => k.clamp(1, self.points.len() - 1),
        };
        let (a, b) = (self.points[k - 1], self.points[k]);
        let seg = self.cumulative[k] - self.cumulative[k - 1];
        let t = if seg > 0.0 { (target - self.cumulative[k - 1]) / seg } else { 0.0 };
        (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
    }
}

/// Default number of vertices on the polygon around each hole.
pub const DEFAULT_LOOP_VERTICES: usize = 48;

/// A rational point on the circle of radius `rho` about `c` near angle `phi`.
fn rational_circle_point(c: &Point, rho: &Rational, phi: f64) -> Point {
    // stereographic parametrization keeps the point exactly on the circle
    let (flip, angle) = if phi.cos() >= 0.0 { (false, phi) } else { (true, phi - std::f64::consts::PI) };
    let t = round_rational((angle / 2.0).tan(), 10_000, 0.0);
    let one = Rational::one();
    let den = &one + &t * &t;
    let mut x = (&one - &t * &t) / &den;
    let mut y = (rat(2, 1) * &t) / &den;
    if flip {
        x = -x;
        y = -y;
    }
    (&c.0 + rho * x, &c.1 + rho * y)
}

/// One loop per hole (in abscissa order): straight to the bottom of a circle
/// around the hole, once around counterclockwise, and straight back.
pub fn generator_loops(base: &BaseSpace, vertex_count: usize) -> Result<Vec<LoopPath>, GeometryError> {
    let vertex_count = vertex_count.max(8);
    let mut loops = Vec::with_capacity(base.rank());
    for (i, h) in base.holes.iter().enumerate() {
        let (cx, cy) = point_to_f64(&h.center);
        let r = rational_to_f64(&h.radius);
        let (ox, oy) = point_to_f64(&base.outer.center);
        let mut gap = rational_to_f64(&base.outer.radius) - ((cx - ox).powi(2) + (cy - oy).powi(2)).sqrt() - r;
        for (j, k) in base.holes.iter().enumerate() {
            if j != i {
                let (kx, ky) = point_to_f64(&k.center);
                gap = gap.min(((cx - kx).powi(2) + (cy - ky).powi(2)).sqrt() - r - rational_to_f64(&k.radius));
            }
        }
        let offset = round_rational(gap / 2.0, 1000, 0.0);
        let offset = if offset.is_positive() { offset } else { rat(gap.max(1e-6).recip().ceil() as i64, 1).recip() };
        let rho = &h.radius + offset;
        let mut vertices = vec![base.basepoint.clone()];
        let start = std::f64::consts::FRAC_PI_2 * 3.0;
        for k in 0..vertex_count {
            let phi = start + std::f64::consts::TAU * (k as f64) / (vertex_count as f64);
            vertices.push(rational_circle_point(&h.center, &rho, phi));
        }
        vertices.push(vertices[1].clone());
        vertices.push(base.basepoint.clone());
        let path = LoopPath::new(vertices);
        match path.validate(base, i) {
            Ok(()) => loops.push(path),
            Err(GeometryError::SegmentHitsHole { hole, .. }) => {
                return Err(GeometryError::Infeasible { hole: i, blocker: hole })
            }
            Err(GeometryError::LeavesOuterDisc { .. }) => {
                return Err(GeometryError::Infeasible { hole: i, blocker: usize::MAX })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spaces_are_valid() {
        for m in 0..=4 {
            let x = BaseSpace::default_for(m);
            assert_eq!(x.rank(), m);
            assert!(x.contains(x.basepoint()));
        }
    }

    #[test]
    fn validation_rejects_bad_geometry() {
        let outer = Disc::new((rat(0, 1), rat(0, 1)), rat(10, 1));
        let bp = (rat(0, 1), rat(-8, 1));
        let unit = |x: i64| Disc::new((rat(x, 1), rat(0, 1)), rat(1, 1));
        assert_eq!(
            BaseSpace::new(outer.clone(), vec![unit(0), unit(2)], bp.clone()),
            Err(GeometryError::HolesOverlap(0, 1))
        );
        assert_eq!(BaseSpace::new(outer.clone(), vec![unit(9)], bp.clone()), Err(GeometryError::HoleOutside(0)));
        assert_eq!(BaseSpace::new(outer.clone(), vec![unit(3), unit(0)], bp.clone()), Err(GeometryError::HoleOrder(1)));
        assert_eq!(
            BaseSpace::new(outer, vec![unit(0)], (rat(0, 1), rat(1, 2))),
            Err(GeometryError::BasepointOutside)
        );
    }

    #[test]
    fn segment_test_is_exact() {
        let c = (rat(0, 1), rat(0, 1));
        let p = (rat(-2, 1), rat(1, 1));
        let q = (rat(2, 1), rat(1, 1));
        // tangent segment: distance exactly 1
        assert_eq!(segment_dist2(&p, &q, &c), rat(1, 1));
        let q2 = (rat(-1, 1), rat(5, 1));
        assert_eq!(segment_dist2(&p, &q2, &c), rat(5, 1));
    }

    #[test]
    fn no_holes_no_loops() {
        assert!(generator_loops(&BaseSpace::default_for(0), 48).unwrap().is_empty());
    }

    #[test]
    fn winding_matrix_is_identity() {
        for m in 1..=4 {
            let x = BaseSpace::default_for(m);
            let loops = generator_loops(&x, DEFAULT_LOOP_VERTICES).unwrap();
            assert_eq!(loops.len(), m);
            for (i, l) in loops.iter().enumerate() {
                l.validate(&x, i).unwrap();
                for (j, h) in x.holes().iter().enumerate() {
                    let (hx, hy) = point_to_f64(&h.center);
                    assert_eq!(l.winding_number(hx, hy), i64::from(i == j), "loop {i} hole {j}");
                }
            }
        }
    }

    #[test]
    fn blocked_corridor_is_reported() {
        let outer = Disc::new((rat(0, 1), rat(0, 1)), rat(10, 1));
        let holes = vec![
            Disc::new((rat(0, 1), rat(0, 1)), rat(1, 1)),
            Disc::new((rat(1, 10), rat(-4, 1)), rat(1, 1)),
        ];
        let x = BaseSpace::new(outer, holes, (rat(0, 1), rat(-8, 1))).unwrap();
        assert_eq!(generator_loops(&x, 48), Err(GeometryError::Infeasible { hole: 0, blocker: 1 }));
    }

    #[test]
    fn grid_points_lie_in_x() {
        let x = BaseSpace::default_for(2);
        let grid = x.sample_grid(41);
        assert!(grid.len() > 1000 && grid.len() < 41 * 41);
        assert!(grid.iter().all(|p| x.contains(p)));
    }

    #[test]
    fn extra_holes_extend_the_basis() {
        let x = BaseSpace::default_for(1).with_extra_holes(2).unwrap();
        assert_eq!(x.rank(), 3);
        assert_eq!(generator_loops(&x, 48).unwrap().len(), 3);
    }

    #[test]
    fn json_round_trip() {
        let x = BaseSpace::default_for(2);
        let text = serde_json::to_string(&x).unwrap();
        let back: BaseSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<BaseSpace>(r#"{"outer": {"c": [0, 0], "r": [10, 1]}, "holes": []}"#).is_err());
    }

    #[test]
    fn polyline_parametrization_endpoints() {
        let p = Polyline::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        assert_eq!(p.point_at(0.0), (0.0, 0.0));
        assert_eq!(p.point_at(1.0), (1.0, 1.0));
        assert_eq!(p.point_at(0.5), (1.0, 0.0));
        let q = p.point_at(0.25);
        assert!((q.0 - 0.5).abs() < 1e-15 && q.1 == 0.0);
    }
}
