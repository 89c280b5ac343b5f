//! Planar numeric geometry: points, line directions, loci and predicate
//! evaluation within tolerances.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use crate::statement::{Predicate, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }
    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }
    /// Counter-clockwise quarter turn.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }
    pub fn rotate(self, theta: f64) -> Point {
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        Point::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }
    pub fn unit(self) -> Point {
        self.scale(1.0 / self.norm())
    }
    pub fn mid(self, o: Point) -> Point {
        Point::new((self.x + o.x) * 0.5, (self.y + o.y) * 0.5)
    }
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Numeric thresholds. Coordinates are normalized to a disk of radius one,
/// so all three are absolute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Equality of predicate quantities.
    pub eps_eq: f64,
    /// Angle bucket width.
    pub eps_ang: f64,
    /// Points closer than this are coincident.
    pub eps_deg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_eq: 1e-6,
            eps_ang: 1e-7,
            eps_deg: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        0.0 < self.eps_ang && self.eps_ang < self.eps_eq && self.eps_eq < self.eps_deg
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericError {
    /// Coincident points where a line, segment or triangle is required.
    DegenerateInput,
    UnknownPoint,
}

impl fmt::Display for NumericError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericError::DegenerateInput => f.write_str("degenerate input"),
            NumericError::UnknownPoint => f.write_str("unknown point"),
        }
    }
}

/// Direction angle of a line modulo pi, in `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AngleValue(pub f64);

impl AngleValue {
    pub fn bucket_key(self, tol: &Tolerances) -> i64 {
        libm::round(self.0 / tol.eps_ang) as i64
    }
}

pub fn mod_pi(x: f64) -> f64 {
    let mut r = libm::fmod(x, PI);
    if r < 0.0 {
        r += PI;
    }
    if r >= PI {
        r -= PI;
    }
    r
}

/// Distance between two angles on the circle of circumference pi.
pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = mod_pi(a - b);
    if d > PI - d {
        PI - d
    } else {
        d
    }
}

/// Direction of the line through `a` and `b`, modulo pi.
pub fn direction(a: Point, b: Point, tol: &Tolerances) -> Result<AngleValue, NumericError> {
    let d = b.sub(a);
    if d.norm() < tol.eps_deg {
        return Err(NumericError::DegenerateInput);
    }
    Ok(AngleValue(mod_pi(libm::atan2(d.y, d.x))))
}

/// Directed angle from line `ab` to line `cd`, modulo pi.
pub fn line_pair_angle(
    a: Point,
    b: Point,
    c: Point,
    d: Point,
    tol: &Tolerances,
) -> Result<f64, NumericError> {
    let d1 = direction(a, b, tol)?.0;
    let d2 = direction(c, d, tol)?.0;
    Ok(mod_pi(d2 - d1))
}

fn length(a: Point, b: Point, tol: &Tolerances) -> Result<f64, NumericError> {
    let l = a.dist(b);
    if l < tol.eps_deg {
        Err(NumericError::DegenerateInput)
    } else {
        Ok(l)
    }
}

pub fn orientation(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn degrees_to_radians(r: &Rational) -> f64 {
    (*r.numer() as f64 / *r.denom() as f64) * PI / 180.0
}

fn rational_value(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if libm::fabs(d) < 1e-12 {
        return None;
    }
    let a2 = a.dot(a);
    let b2 = b.dot(b);
    let c2 = c.dot(c);
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    Some(Point::new(ux, uy))
}

fn tri_ratio_check(p: &[Point], tol: &Tolerances) -> Result<bool, NumericError> {
    let ab = length(p[0], p[1], tol)?;
    let bc = length(p[1], p[2], tol)?;
    let ca = length(p[2], p[0], tol)?;
    let pq = length(p[3], p[4], tol)?;
    let qr = length(p[4], p[5], tol)?;
    let rp = length(p[5], p[3], tol)?;
    if libm::fabs(orientation(p[0], p[1], p[2])) < tol.eps_deg
        || libm::fabs(orientation(p[3], p[4], p[5])) < tol.eps_deg
    {
        return Err(NumericError::DegenerateInput);
    }
    Ok(libm::fabs(ab / pq - bc / qr) < tol.eps_eq && libm::fabs(ab / pq - ca / rp) < tol.eps_eq)
}

/// Evaluates a predicate over resolved point coordinates.
pub fn eval_points(
    pred: Predicate,
    p: &[Point],
    literal: Option<&Rational>,
    tol: &Tolerances,
) -> Result<bool, NumericError> {
    debug_assert_eq!(p.len(), pred.arity());
    match pred {
        Predicate::Coll => {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                length(p[i], p[j], tol)?;
            }
            let base = p[1].sub(p[0]);
            Ok(libm::fabs(base.cross(p[2].sub(p[0]))) / base.norm() < tol.eps_eq)
        }
        Predicate::Para => {
            let a = line_pair_angle(p[0], p[1], p[2], p[3], tol)?;
            Ok(circ_dist(a, 0.0) < tol.eps_eq)
        }
        Predicate::Perp => {
            let a = line_pair_angle(p[0], p[1], p[2], p[3], tol)?;
            Ok(circ_dist(a, FRAC_PI_2) < tol.eps_eq)
        }
        Predicate::Cong => {
            Ok(libm::fabs(length(p[0], p[1], tol)? - length(p[2], p[3], tol)?) < tol.eps_eq)
        }
        Predicate::Midp => {
            length(p[1], p[2], tol)?;
            Ok(p[0].dist(p[1].mid(p[2])) < tol.eps_eq)
        }
        Predicate::Cyclic => {
            for i in 0..4 {
                for j in i + 1..4 {
                    length(p[i], p[j], tol)?;
                }
            }
            match circumcenter(p[0], p[1], p[2]) {
                Some(o) => Ok(libm::fabs(o.dist(p[3]) - o.dist(p[0])) < tol.eps_eq),
                None => Ok(false),
            }
        }
        Predicate::EqAngle => {
            let a1 = line_pair_angle(p[0], p[1], p[2], p[3], tol)?;
            let a2 = line_pair_angle(p[4], p[5], p[6], p[7], tol)?;
            Ok(circ_dist(a1, a2) < tol.eps_eq)
        }
        Predicate::EqRatio => {
            let r1 = length(p[0], p[1], tol)? / length(p[2], p[3], tol)?;
            let r2 = length(p[4], p[5], tol)? / length(p[6], p[7], tol)?;
            Ok(libm::fabs(r1 - r2) < tol.eps_eq)
        }
        Predicate::AConst => {
            let a = line_pair_angle(p[0], p[1], p[2], p[3], tol)?;
            let k = literal.map(degrees_to_radians).unwrap_or(0.0);
            Ok(circ_dist(a, k) < tol.eps_eq)
        }
        Predicate::RConst => {
            let r = length(p[0], p[1], tol)? / length(p[2], p[3], tol)?;
            let k = literal.map(rational_value).unwrap_or(1.0);
            Ok(libm::fabs(r - k) < tol.eps_eq)
        }
        Predicate::SimTri | Predicate::SimTriR | Predicate::ConTri | Predicate::ConTriR => {
            if !tri_ratio_check(p, tol)? {
                return Ok(false);
            }
            let same =
                (orientation(p[0], p[1], p[2]) > 0.0) == (orientation(p[3], p[4], p[5]) > 0.0);
            let reversed = matches!(pred, Predicate::SimTriR | Predicate::ConTriR);
            if same == reversed {
                return Ok(false);
            }
            if matches!(pred, Predicate::ConTri | Predicate::ConTriR) {
                return Ok(libm::fabs(p[0].dist(p[1]) - p[3].dist(p[4])) < tol.eps_eq);
            }
            Ok(true)
        }
        Predicate::SameClock => {
            let o1 = orientation(p[0], p[1], p[2]);
            let o2 = orientation(p[3], p[4], p[5]);
            if libm::fabs(o1) < tol.eps_deg || libm::fabs(o2) < tol.eps_deg {
                return Err(NumericError::DegenerateInput);
            }
            Ok((o1 > 0.0) == (o2 > 0.0))
        }
    }
}

/// A one-dimensional locus for a new point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Locus {
    Line { through: Point, dir: Point },
    Circle { center: Point, radius: f64 },
}

impl Locus {
    pub fn line(a: Point, b: Point) -> Locus {
        Locus::Line {
            through: a,
            dir: b.sub(a).unit(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match *self {
            Locus::Line { through, dir } => through.is_finite() && dir.is_finite(),
            Locus::Circle { center, radius } => {
                center.is_finite() && radius.is_finite() && radius > 0.0
            }
        }
    }

    pub fn contains(&self, p: Point, eps: f64) -> bool {
        match *self {
            Locus::Line { through, dir } => libm::fabs(dir.cross(p.sub(through))) < eps,
            Locus::Circle { center, radius } => libm::fabs(center.dist(p) - radius) < eps,
        }
    }
}

/// Real intersection points of two loci (empty when parallel, disjoint or
/// identical).
pub fn intersect(l1: &Locus, l2: &Locus) -> Vec<Point> {
    match (*l1, *l2) {
        (Locus::Line { through: p, dir: d }, Locus::Line { through: q, dir: e }) => {
            let den = d.cross(e);
            if libm::fabs(den) < 1e-9 {
                return Vec::new();
            }
            let t = q.sub(p).cross(e) / den;
            vec![p.add(d.scale(t))]
        }
        (Locus::Line { through, dir }, Locus::Circle { center, radius })
        | (Locus::Circle { center, radius }, Locus::Line { through, dir }) => {
            let f = through.sub(center);
            let b = f.dot(dir);
            let c = f.dot(f) - radius * radius;
            let disc = b * b - c;
            if disc < 1e-12 {
                return Vec::new();
            }
            let s = libm::sqrt(disc);
            vec![
                through.add(dir.scale(-b - s)),
                through.add(dir.scale(-b + s)),
            ]
        }
        (
            Locus::Circle {
                center: c1,
                radius: r1,
            },
            Locus::Circle {
                center: c2,
                radius: r2,
            },
        ) => {
            let d = c1.dist(c2);
            if d < 1e-9 || d > r1 + r2 - 1e-9 || d < libm::fabs(r1 - r2) + 1e-9 {
                return Vec::new();
            }
            let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
            let h2 = r1 * r1 - a * a;
            if h2 <= 0.0 {
                return Vec::new();
            }
            let h = libm::sqrt(h2);
            let u = c2.sub(c1).scale(1.0 / d);
            let base = c1.add(u.scale(a));
            vec![base.add(u.rot90().scale(h)), base.add(u.rot90().scale(-h))]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn defaults_are_ordered() {
        assert!(t().is_valid());
    }

    #[test]
    fn collinear_diagonal() {
        let p = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(2.0, 2.0),
        ];
        assert_eq!(eval_points(Predicate::Coll, &p, None, &t()), Ok(true));
    }

    #[test]
    fn perpendicular_axes() {
        let o = Point::new(0.0, 0.0);
        let p = [o, Point::new(1.0, 0.0), o, Point::new(0.0, 1.0)];
        assert_eq!(eval_points(Predicate::Perp, &p, None, &t()), Ok(true));
    }

    #[test]
    fn line_angles() {
        let tol = t();
        let a = direction(Point::new(0.0, 0.0), Point::new(1.0, 1.0), &tol).unwrap();
        assert!((a.0 - PI / 4.0).abs() < 1e-12);
        let b = direction(Point::new(0.0, 0.0), Point::new(-1.0, -1.0), &tol).unwrap();
        assert!((b.0 - PI / 4.0).abs() < 1e-12);
        let c = direction(Point::new(2.0, 3.0), Point::new(2.0, 9.0), &tol).unwrap();
        assert!((c.0 - PI / 2.0).abs() < 1e-12);
        assert_eq!(
            direction(Point::new(1.0, 1.0), Point::new(1.0, 1.0), &tol),
            Err(NumericError::DegenerateInput)
        );
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let o = Point::new(0.0, 0.0);
        let p = [o, o, Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert_eq!(
            eval_points(Predicate::Cong, &p, None, &t()),
            Err(NumericError::DegenerateInput)
        );
    }

    #[test]
    fn circle_circle_intersection() {
        let c1 = Locus::Circle {
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        };
        let c2 = Locus::Circle {
            center: Point::new(1.0, 0.0),
            radius: 1.0,
        };
        let pts = intersect(&c1, &c2);
        assert_eq!(pts.len(), 2);
        for p in pts {
            assert!(c1.contains(p, 1e-12) && c2.contains(p, 1e-12));
        }
        let far = Locus::Circle {
            center: Point::new(5.0, 0.0),
            radius: 1.0,
        };
        assert!(intersect(&c1, &far).is_empty());
    }

    #[test]
    fn line_missing_circle() {
        let l = Locus::line(Point::new(0.0, 2.0), Point::new(1.0, 2.0));
        let c = Locus::Circle {
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        };
        assert!(intersect(&l, &c).is_empty());
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point::new(x, y))
    }

    proptest! {
        #[test]
        fn direction_invariant_under_swap_and_rigid_motion(
            a in arb_point(), b in arb_point(), theta in 0.0f64..6.3, dx in -1.0f64..1.0, dy in -1.0f64..1.0
        ) {
            let tol = t();
            prop_assume!(a.dist(b) > 1e-2);
            let d1 = direction(a, b, &tol).unwrap().0;
            let d2 = direction(b, a, &tol).unwrap().0;
            prop_assert!(circ_dist(d1, d2) < tol.eps_ang);
            let shift = Point::new(dx, dy);
            let ra = a.rotate(theta).add(shift);
            let rb = b.rotate(theta).add(shift);
            let d3 = direction(ra, rb, &tol).unwrap().0;
            prop_assert!(circ_dist(d3, mod_pi(d1 + theta)) < tol.eps_ang);
        }
    }
}
