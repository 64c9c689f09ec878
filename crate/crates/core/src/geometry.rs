//! Planar geometry kernel: points, circles, triangle shapes, and the smallest
//! enclosing circle together with a brute-force oracle for it.

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default size limit for [`sec_bruteforce`].
pub const BRUTEFORCE_CAP: usize = 12;

const WELZL_SEED: u64 = 0x5EC0_5EC0;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point<S> {
    pub fn new(x: S, y: S) -> Self {
        Point { x, y }
    }

    pub fn origin() -> Self {
        Point::new(S::zero(), S::zero())
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(S::from_i64(x), S::from_i64(y))
    }

    /// Component-wise backend equality.
    pub fn same(&self, other: &Self) -> bool {
        self.x.same(&other.x) && self.y.same(&other.y)
    }

    /// Lexicographic order on raw coordinates, used to canonicalize lists.
    pub fn raw_cmp(&self, other: &Self) -> Ordering {
        self.x
            .raw_cmp(&other.x)
            .then_with(|| self.y.raw_cmp(&other.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    fn midpoint(&self, other: &Self) -> Self {
        let two = S::from_i64(2);
        Point::new(
            (self.x.clone() + other.x.clone()) / two.clone(),
            (self.y.clone() + other.y.clone()) / two,
        )
    }
}

impl<S: Scalar> fmt::Display for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x.encode(), self.y.encode())
    }
}

/// A circle stored by its squared radius so that exact arithmetic stays closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle<S> {
    pub center: Point<S>,
    pub radius_sq: S,
}

impl<S: Scalar> Circle<S> {
    pub fn new(center: Point<S>, radius_sq: S) -> Self {
        Circle { center, radius_sq }
    }

    /// Backend equality of center and squared radius.
    pub fn same(&self, other: &Self) -> bool {
        self.center.same(&other.center) && self.radius_sq.same(&other.radius_sq)
    }

    /// Closed-disc membership.
    pub fn encloses(&self, p: &Point<S>) -> bool {
        dist_sq(&self.center, p).le(&self.radius_sq)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangleClass<S> {
    Equilateral,
    /// `apex` is the vertex shared by the two equal sides.
    Isosceles(Point<S>),
    Scalene,
}

pub fn dist_sq<S: Scalar>(p: &Point<S>, q: &Point<S>) -> S {
    let dx = p.x.clone() - q.x.clone();
    let dy = p.y.clone() - q.y.clone();
    dx.clone() * dx + dy.clone() * dy
}

fn ensure_distinct<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>) -> Result<()> {
    if p1.same(p2) || p2.same(p3) || p1.same(p3) {
        Err(Error::DegenerateInput(
            "triangle vertices must be pairwise distinct",
        ))
    } else {
        Ok(())
    }
}

/// Classifies a triangle by its squared side lengths. Isosceles excludes
/// equilateral. Collinear inputs are classified the same way.
pub fn classify_triangle<S: Scalar>(
    p1: &Point<S>,
    p2: &Point<S>,
    p3: &Point<S>,
) -> Result<TriangleClass<S>> {
    ensure_distinct(p1, p2, p3)?;
    let d12 = dist_sq(p1, p2);
    let d23 = dist_sq(p2, p3);
    let d13 = dist_sq(p1, p3);
    let at_p1 = d12.same(&d13);
    let at_p2 = d12.same(&d23);
    let at_p3 = d13.same(&d23);
    Ok(match (at_p1, at_p2, at_p3) {
        (false, false, false) => TriangleClass::Scalene,
        (true, false, false) => TriangleClass::Isosceles(p1.clone()),
        (false, true, false) => TriangleClass::Isosceles(p2.clone()),
        (false, false, true) => TriangleClass::Isosceles(p3.clone()),
        // Two equalities force the third; under a tolerance they may not chain.
        _ => TriangleClass::Equilateral,
    })
}

pub fn barycenter_3<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>) -> Point<S> {
    let three = S::from_i64(3);
    Point::new(
        (p1.x.clone() + p2.x.clone() + p3.x.clone()) / three.clone(),
        (p1.y.clone() + p2.y.clone() + p3.y.clone()) / three,
    )
}

/// The vertex not incident to the strictly longest side.
pub fn opposite_of_max_side<S: Scalar>(
    p1: &Point<S>,
    p2: &Point<S>,
    p3: &Point<S>,
) -> Result<Point<S>> {
    let sides = [
        (dist_sq(p1, p2), p3),
        (dist_sq(p2, p3), p1),
        (dist_sq(p1, p3), p2),
    ];
    let mut best = 0;
    for i in 1..3 {
        if sides[i].0.compare(&sides[best].0) == Ordering::Greater {
            best = i;
        }
    }
    let ties = sides
        .iter()
        .filter(|(len, _)| len.same(&sides[best].0))
        .count();
    if ties > 1 {
        return Err(Error::AmbiguousLongestSide);
    }
    Ok(sides[best].1.clone())
}

/// The unique circle through three non-collinear points.
pub fn circumcircle<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>) -> Result<Circle<S>> {
    let bx = p2.x.clone() - p1.x.clone();
    let by = p2.y.clone() - p1.y.clone();
    let cx = p3.x.clone() - p1.x.clone();
    let cy = p3.y.clone() - p1.y.clone();
    let cross_a = bx.clone() * cy.clone();
    let cross_b = by.clone() * cx.clone();
    if cross_a.same(&cross_b) {
        return Err(Error::CollinearInput);
    }
    let d = S::from_i64(2) * (cross_a - cross_b);
    let b_sq = bx.clone() * bx.clone() + by.clone() * by.clone();
    let c_sq = cx.clone() * cx.clone() + cy.clone() * cy.clone();
    let ux = (cy * b_sq.clone() - by * c_sq.clone()) / d.clone();
    let uy = (bx * c_sq - cx * b_sq) / d;
    let radius_sq = ux.clone() * ux.clone() + uy.clone() * uy.clone();
    Ok(Circle::new(
        Point::new(p1.x.clone() + ux, p1.y.clone() + uy),
        radius_sq,
    ))
}

pub fn on_circle<S: Scalar>(c: &Circle<S>, p: &Point<S>) -> bool {
    dist_sq(&c.center, p).same(&c.radius_sq)
}

fn circle_from_one<S: Scalar>(p: &Point<S>) -> Circle<S> {
    Circle::new(p.clone(), S::zero())
}

fn circle_from_two<S: Scalar>(p: &Point<S>, q: &Point<S>) -> Circle<S> {
    let center = p.midpoint(q);
    let radius_sq = dist_sq(&center, p);
    Circle::new(center, radius_sq)
}

/// Circle with `a`, `b`, `c` on its boundary. Falls back to the widest
/// pair when the three are (numerically) collinear, which only happens
/// under floating tolerance.
fn circle_from_three<S: Scalar>(a: &Point<S>, b: &Point<S>, c: &Point<S>) -> Circle<S> {
    match circumcircle(a, b, c) {
        Ok(circle) => circle,
        Err(_) => {
            let pairs = [(a, b), (b, c), (a, c)];
            let (p, q) = pairs
                .iter()
                .max_by(|(p1, q1), (p2, q2)| dist_sq(*p1, *q1).raw_cmp(&dist_sq(*p2, *q2)))
                .expect("three pairs");
            circle_from_two(p, q)
        }
    }
}

/// Removes backend-equal duplicates, keeping first occurrences in order.
pub fn dedup_points<S: Scalar>(points: &[Point<S>]) -> Vec<Point<S>> {
    let mut out: Vec<Point<S>> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| q.same(p)) {
            out.push(p.clone());
        }
    }
    out
}

/// Smallest enclosing circle (Welzl's incremental algorithm after a fixed-seed
/// shuffle). The empty list yields the zero circle at the origin.
pub fn sec<S: Scalar>(points: &[Point<S>]) -> Circle<S> {
    let mut pts = dedup_points(points);
    if pts.is_empty() {
        return Circle::new(Point::origin(), S::zero());
    }
    // Canonical order first so the result never depends on input order.
    pts.sort_by(|a, b| a.raw_cmp(b));
    pts.shuffle(&mut ChaCha8Rng::seed_from_u64(WELZL_SEED));

    let mut circle = circle_from_one(&pts[0]);
    for i in 1..pts.len() {
        if !circle.encloses(&pts[i]) {
            circle = sec_with_one(&pts[..i], &pts[i]);
        }
    }
    circle
}

fn sec_with_one<S: Scalar>(pts: &[Point<S>], b1: &Point<S>) -> Circle<S> {
    let mut circle = circle_from_one(b1);
    for j in 0..pts.len() {
        if !circle.encloses(&pts[j]) {
            circle = sec_with_two(&pts[..j], b1, &pts[j]);
        }
    }
    circle
}

fn sec_with_two<S: Scalar>(pts: &[Point<S>], b1: &Point<S>, b2: &Point<S>) -> Circle<S> {
    let mut circle = circle_from_two(b1, b2);
    for p in pts {
        if !circle.encloses(p) {
            circle = circle_from_three(b1, b2, p);
        }
    }
    circle
}

/// Deduplicated input points lying on the boundary of `sec(points)`, in
/// order of first appearance.
pub fn on_sec<S: Scalar>(points: &[Point<S>]) -> Vec<Point<S>> {
    let circle = sec(points);
    dedup_points(points)
        .into_iter()
        .filter(|p| on_circle(&circle, p))
        .collect()
}

/// Exhaustive smallest-enclosing-circle search, capped at [`BRUTEFORCE_CAP`].
pub fn sec_bruteforce<S: Scalar>(points: &[Point<S>]) -> Result<Circle<S>> {
    sec_bruteforce_capped(points, BRUTEFORCE_CAP)
}

/// Tries every circle fixed by one point, by a pair as diameter, and by a
/// non-collinear triple, and returns the smallest that encloses the input.
pub fn sec_bruteforce_capped<S: Scalar>(points: &[Point<S>], cap: usize) -> Result<Circle<S>> {
    if points.len() > cap {
        return Err(Error::InputTooLarge {
            len: points.len(),
            cap,
        });
    }
    if points.is_empty() {
        return Ok(Circle::new(Point::origin(), S::zero()));
    }
    let n = points.len();
    let mut best: Option<Circle<S>> = None;
    let mut consider = |candidate: Circle<S>| {
        if let Some(b) = &best {
            if !candidate.radius_sq.lt(&b.radius_sq) {
                return;
            }
        }
        if points.iter().all(|p| candidate.encloses(p)) {
            best = Some(candidate);
        }
    };
    for i in 0..n {
        consider(circle_from_one(&points[i]));
        for j in i + 1..n {
            consider(circle_from_two(&points[i], &points[j]));
            for k in j + 1..n {
                if let Ok(c) = circumcircle(&points[i], &points[j], &points[k]) {
                    consider(c);
                }
            }
        }
    }
    best.ok_or_else(|| Error::InternalInvariant("no enclosing candidate found".into()))
}
