//! Similarities of the plane: the local frames a demon hands to robots.
//!
//! A similarity acts as `f(p) = zoom * M * p + translation`, where `M` is the
//! rotation `(c, -s; s, c)`, composed on the right with the reflection across
//! the x-axis when `reflect` is set.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::model::Spectrum;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Similarity<S> {
    pub zoom: S,
    pub c: S,
    pub s: S,
    pub reflect: bool,
    pub translation: Point<S>,
}

fn validate<S: Scalar>(zoom: &S, c: &S, s: &S) -> Result<()> {
    if !zoom.is_positive() {
        return Err(Error::InvalidFrame("zoom must be positive"));
    }
    if !(c.clone() * c.clone() + s.clone() * s.clone()).same(&S::one()) {
        return Err(Error::InvalidFrame(
            "rotation pair must satisfy c^2 + s^2 = 1",
        ));
    }
    Ok(())
}

impl<S: Scalar> Similarity<S> {
    pub fn identity() -> Self {
        Similarity {
            zoom: S::one(),
            c: S::one(),
            s: S::zero(),
            reflect: false,
            translation: Point::origin(),
        }
    }

    pub fn new(zoom: S, c: S, s: S, reflect: bool, translation: Point<S>) -> Result<Self> {
        validate(&zoom, &c, &s)?;
        Ok(Similarity {
            zoom,
            c,
            s,
            reflect,
            translation,
        })
    }

    pub fn translation(by: Point<S>) -> Self {
        Similarity {
            translation: by,
            ..Self::identity()
        }
    }

    /// Uniform scaling about the origin.
    pub fn scaling(zoom: S) -> Result<Self> {
        Self::new(zoom, S::one(), S::zero(), false, Point::origin())
    }

    /// `zoom * M * p` with no translation.
    fn linear(&self, p: &Point<S>) -> Point<S> {
        let y = if self.reflect {
            -p.y.clone()
        } else {
            p.y.clone()
        };
        let rx = self.c.clone() * p.x.clone() - self.s.clone() * y.clone();
        let ry = self.s.clone() * p.x.clone() + self.c.clone() * y;
        Point::new(self.zoom.clone() * rx, self.zoom.clone() * ry)
    }

    pub fn apply(&self, p: &Point<S>) -> Point<S> {
        let q = self.linear(p);
        Point::new(
            q.x + self.translation.x.clone(),
            q.y + self.translation.y.clone(),
        )
    }

    pub fn inverse(&self) -> Self {
        // (R F)^-1 = R F for a reflection; R(c, s)^-1 = R(c, -s) otherwise.
        let s = if self.reflect {
            self.s.clone()
        } else {
            -self.s.clone()
        };
        let mut inv = Similarity {
            zoom: S::one() / self.zoom.clone(),
            c: self.c.clone(),
            s,
            reflect: self.reflect,
            translation: Point::origin(),
        };
        let t = inv.linear(&self.translation);
        inv.translation = Point::new(-t.x, -t.y);
        inv
    }

    /// Squared-distance scale factor, `zoom²`.
    pub fn scale_sq(&self) -> S {
        self.zoom.clone() * self.zoom.clone()
    }
}

/// The frame with the given zoom, rotation, and reflection that sends
/// `robot_loc` to the origin.
pub fn make_frame<S: Scalar>(
    robot_loc: &Point<S>,
    zoom: S,
    c: S,
    s: S,
    reflect: bool,
) -> Result<Similarity<S>> {
    let mut f = Similarity::new(zoom, c, s, reflect, Point::origin())?;
    let image = f.linear(robot_loc);
    f.translation = Point::new(-image.x, -image.y);
    Ok(f)
}

pub fn apply<S: Scalar>(f: &Similarity<S>, p: &Point<S>) -> Point<S> {
    f.apply(p)
}

pub fn inverse<S: Scalar>(f: &Similarity<S>) -> Similarity<S> {
    f.inverse()
}

/// Pointwise image of a spectrum, multiplicities preserved.
pub fn map_multiset<S: Scalar>(f: &Similarity<S>, spectrum: &Spectrum<S>) -> Spectrum<S> {
    Spectrum::from_counts(spectrum.iter().map(|(p, n)| (f.apply(p), n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    #[test]
    fn make_frame_examples() {
        let f = make_frame(&q(5, 7), Q::one(), Q::one(), Q::zero(), false).unwrap();
        assert_eq!(f, Similarity::translation(q(-5, -7)));

        let f = make_frame(&q(0, 0), Q::from_i64(2), Q::zero(), Q::one(), false).unwrap();
        assert_eq!(f.apply(&q(1, 0)), q(0, 2));

        let f = make_frame(
            &q(1, 0),
            Q::one(),
            Q::from_ratio(3, 5),
            Q::from_ratio(4, 5),
            true,
        )
        .unwrap();
        assert_eq!(f.apply(&q(1, 0)), q(0, 0));
        // Hand evaluation: M (0, 1) = R (0, -1) = (4/5, -3/5), then translate by -(3/5, 4/5).
        assert_eq!(
            f.apply(&q(0, 1)),
            Point::new(Q::from_ratio(1, 5), Q::from_ratio(-7, 5))
        );
    }

    #[test]
    fn make_frame_rejects_invalid_parameters() {
        assert_eq!(
            make_frame(&q(0, 0), Q::zero(), Q::one(), Q::zero(), false),
            Err(Error::InvalidFrame("zoom must be positive"))
        );
        assert_eq!(
            make_frame(&q(0, 0), Q::from_i64(-1), Q::one(), Q::zero(), false),
            Err(Error::InvalidFrame("zoom must be positive"))
        );
        assert!(matches!(
            make_frame(&q(0, 0), Q::one(), Q::one(), Q::one(), false),
            Err(Error::InvalidFrame(_))
        ));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Similarity::identity().apply(&q(4, -2)), q(4, -2));
        assert_eq!(
            Similarity::scaling(Q::from_i64(3)).unwrap().apply(&q(1, 1)),
            q(3, 3)
        );
        let reflect = Similarity::new(Q::one(), Q::one(), Q::zero(), true, q(0, 0)).unwrap();
        assert_eq!(reflect.apply(&q(1, 2)), q(1, -2));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            Similarity::<Q>::identity().inverse(),
            Similarity::identity()
        );
        let zoom2 = Similarity::scaling(Q::from_i64(2)).unwrap();
        assert_eq!(zoom2.inverse().apply(&q(2, 0)), q(1, 0));
        let f = make_frame(&q(5, 7), Q::one(), Q::one(), Q::zero(), false).unwrap();
        assert_eq!(f.inverse().apply(&q(0, 0)), q(5, 7));
    }

    #[test]
    fn inverse_round_trips_with_reflection() {
        let f = make_frame(
            &q(2, -3),
            Q::from_ratio(7, 3),
            Q::from_ratio(-5, 13),
            Q::from_ratio(12, 13),
            true,
        )
        .unwrap();
        for p in [q(0, 0), q(1, 9), q(-4, 2)] {
            assert_eq!(f.inverse().apply(&f.apply(&p)), p);
        }
    }

    #[test]
    fn map_multiset_examples() {
        let s = Spectrum::from_counts(vec![(q(1, 0), 2)]);
        assert_eq!(map_multiset(&Similarity::identity(), &s), s);
        assert_eq!(
            map_multiset(&Similarity::translation(q(-1, 0)), &s),
            Spectrum::from_counts(vec![(q(0, 0), 2)])
        );
        let s = Spectrum::from_counts(vec![(q(1, 0), 1), (q(0, 1), 3)]);
        let mapped = map_multiset(&Similarity::scaling(Q::from_i64(2)).unwrap(), &s);
        assert_eq!(
            mapped,
            Spectrum::from_counts(vec![(q(2, 0), 1), (q(0, 2), 3)])
        );
        assert_eq!(mapped.total(), s.total());
    }
}
