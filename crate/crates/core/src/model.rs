//! The SSYNC execution model: anonymous robots, strong-multiplicity spectra,
//! demonic actions, the generic round, and finite execution prefixes.

use std::fmt;

use crate::error::{Error, Result};
use crate::frames::{make_frame, Similarity};
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Smallest admissible robot count.
pub const MIN_ROBOTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RobotId(pub usize);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// Finite multiset of locations with positive multiplicities.
///
/// Stored canonically: backend-equal points are merged and the support is
/// sorted, so two spectra describing the same multiset compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<S> {
    towers: Vec<(Point<S>, usize)>,
}

impl<S: Scalar> Spectrum<S> {
    pub fn empty() -> Self {
        Spectrum { towers: Vec::new() }
    }

    pub fn from_points<'a, I>(points: I) -> Self
    where
        I: IntoIterator<Item = &'a Point<S>>,
    {
        Self::from_counts(points.into_iter().map(|p| (p.clone(), 1)))
    }

    pub fn from_counts<I>(counts: I) -> Self
    where
        I: IntoIterator<Item = (Point<S>, usize)>,
    {
        let mut raw: Vec<(Point<S>, usize)> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        raw.sort_by(|a, b| a.0.raw_cmp(&b.0));
        let mut towers: Vec<(Point<S>, usize)> = Vec::with_capacity(raw.len());
        for (p, n) in raw {
            match towers.iter_mut().find(|(q, _)| q.same(&p)) {
                Some((_, m)) => *m += n,
                None => towers.push((p, n)),
            }
        }
        Spectrum { towers }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point<S>, usize)> + '_ {
        self.towers.iter().map(|(p, n)| (p, *n))
    }

    /// Distinct inhabited locations.
    pub fn support(&self) -> Vec<Point<S>> {
        self.towers.iter().map(|(p, _)| p.clone()).collect()
    }

    pub fn support_len(&self) -> usize {
        self.towers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.towers.is_empty()
    }

    /// Total number of robots.
    pub fn total(&self) -> usize {
        self.towers.iter().map(|(_, n)| n).sum()
    }

    pub fn multiplicity(&self, p: &Point<S>) -> usize {
        self.towers
            .iter()
            .find(|(q, _)| q.same(p))
            .map_or(0, |(_, n)| *n)
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        self.multiplicity(p) > 0
    }

    pub fn max_multiplicity(&self) -> usize {
        self.towers.iter().map(|(_, n)| *n).max().unwrap_or(0)
    }

    /// Locations of maximal multiplicity (the highest towers).
    pub fn max_support(&self) -> Vec<Point<S>> {
        let top = self.max_multiplicity();
        self.towers
            .iter()
            .filter(|(_, n)| *n == top)
            .map(|(p, _)| p.clone())
            .collect()
    }

    /// Multiset equality under backend equality.
    pub fn same(&self, other: &Self) -> bool {
        self.towers.len() == other.towers.len()
            && self.towers.iter().all(|(p, n)| other.multiplicity(p) == *n)
    }
}

/// Total map from robot identifiers to locations, in the demon's frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<S> {
    locations: Vec<Point<S>>,
}

impl<S: Scalar> Configuration<S> {
    pub fn new(locations: Vec<Point<S>>) -> Result<Self> {
        if locations.len() < MIN_ROBOTS {
            return Err(Error::TooFewRobots(locations.len()));
        }
        Ok(Configuration { locations })
    }

    pub fn n_robots(&self) -> usize {
        self.locations.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = RobotId> {
        (0..self.locations.len()).map(RobotId)
    }

    pub fn get(&self, id: RobotId) -> &Point<S> {
        &self.locations[id.0]
    }

    pub fn locations(&self) -> &[Point<S>] {
        &self.locations
    }

    pub fn iter(&self) -> impl Iterator<Item = (RobotId, &Point<S>)> + '_ {
        self.locations
            .iter()
            .enumerate()
            .map(|(i, p)| (RobotId(i), p))
    }

    /// Pointwise backend equality.
    pub fn same(&self, other: &Self) -> bool {
        self.locations.len() == other.locations.len()
            && self
                .locations
                .iter()
                .zip(&other.locations)
                .all(|(a, b)| a.same(b))
    }

    /// Moves robot `i` to slot `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut locations = self.locations.clone();
        for (i, &j) in perm.iter().enumerate() {
            locations[j] = self.locations[i].clone();
        }
        Configuration { locations }
    }

    pub fn map(&self, f: &Similarity<S>) -> Self {
        Configuration {
            locations: self.locations.iter().map(|p| f.apply(p)).collect(),
        }
    }
}

pub fn spectrum_of<S: Scalar>(conf: &Configuration<S>) -> Spectrum<S> {
    Spectrum::from_points(conf.locations())
}

/// The local-frame parameters the demon hands an activated robot. The
/// translation is implied: the robot always sees itself at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameParams<S> {
    pub zoom: S,
    pub c: S,
    pub s: S,
    pub reflect: bool,
}

impl<S: Scalar> FrameParams<S> {
    pub fn identity() -> Self {
        FrameParams {
            zoom: S::one(),
            c: S::one(),
            s: S::zero(),
            reflect: false,
        }
    }

    pub fn frame_at(&self, loc: &Point<S>) -> Result<Similarity<S>> {
        make_frame(
            loc,
            self.zoom.clone(),
            self.c.clone(),
            self.s.clone(),
            self.reflect,
        )
    }
}

/// One round's worth of demon choices.
#[derive(Clone, Debug, PartialEq)]
pub struct DemonicAction<S> {
    pub steps: Vec<Option<FrameParams<S>>>,
    /// Relocation of Byzantine robots. The robot population here is all
    /// good robots, so this is always empty.
    pub byzantine: Vec<(RobotId, Point<S>)>,
}

impl<S: Scalar> DemonicAction<S> {
    pub fn inactive(n: usize) -> Self {
        DemonicAction {
            steps: vec![None; n],
            byzantine: Vec::new(),
        }
    }

    /// Every robot active with the identity frame parameters.
    pub fn all_active(n: usize) -> Self {
        DemonicAction {
            steps: vec![Some(FrameParams::identity()); n],
            byzantine: Vec::new(),
        }
    }

    pub fn activating(n: usize, ids: &[RobotId]) -> Self {
        let mut da = Self::inactive(n);
        for id in ids {
            da.steps[id.0] = Some(FrameParams::identity());
        }
        da
    }

    pub fn n_robots(&self) -> usize {
        self.steps.len()
    }

    pub fn is_active(&self, id: RobotId) -> bool {
        self.steps.get(id.0).is_some_and(Option::is_some)
    }

    pub fn activated(&self) -> Vec<RobotId> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| RobotId(i))
            .collect()
    }

    /// Checks every active frame at `conf`'s locations.
    pub fn validate(&self, conf: &Configuration<S>) -> Result<()> {
        if self.steps.len() != conf.n_robots() {
            return Err(Error::SizeMismatch {
                action: self.steps.len(),
                conf: conf.n_robots(),
            });
        }
        for (id, loc) in conf.iter() {
            if let Some(params) = &self.steps[id.0] {
                params.frame_at(loc)?;
            }
        }
        Ok(())
    }
}

/// A robot protocol: a pure map from the observed spectrum, in the robot's
/// own frame, to a destination in that frame. It never sees identifiers.
pub trait Robogram<S: Scalar>: Send + Sync {
    fn pgm(&self, spectrum: &Spectrum<S>) -> Point<S>;
}

impl<S: Scalar, F> Robogram<S> for F
where
    F: Fn(&Spectrum<S>) -> Point<S> + Send + Sync,
{
    fn pgm(&self, spectrum: &Spectrum<S>) -> Point<S> {
        self(spectrum)
    }
}

/// One synchronous look-compute-move round.
pub fn round<S: Scalar, R: Robogram<S> + ?Sized>(
    r: &R,
    da: &DemonicAction<S>,
    conf: &Configuration<S>,
) -> Result<Configuration<S>> {
    if da.steps.len() != conf.n_robots() {
        return Err(Error::SizeMismatch {
            action: da.steps.len(),
            conf: conf.n_robots(),
        });
    }
    let mut next = conf.locations.clone();
    for (id, loc) in conf.iter() {
        let Some(params) = &da.steps[id.0] else {
            continue;
        };
        let frame = params.frame_at(loc)?;
        let local = spectrum_of(&conf.map(&frame));
        let dest = r.pgm(&local);
        next[id.0] = frame.inverse().apply(&dest);
    }
    for (id, pt) in &da.byzantine {
        next[id.0] = pt.clone();
    }
    Ok(Configuration { locations: next })
}

/// Robots whose location changes between two configurations.
pub fn moved<S: Scalar>(before: &Configuration<S>, after: &Configuration<S>) -> Vec<RobotId> {
    before
        .iter()
        .filter(|(id, p)| !p.same(after.get(*id)))
        .map(|(id, _)| id)
        .collect()
}

/// Robots that change location in this round (a subset of the activated ones).
pub fn moving<S: Scalar, R: Robogram<S> + ?Sized>(
    r: &R,
    da: &DemonicAction<S>,
    conf: &Configuration<S>,
) -> Result<Vec<RobotId>> {
    Ok(moved(conf, &round(r, da, conf)?))
}

/// A (possibly adaptive) stream of demonic actions.
pub trait Demon<S: Scalar> {
    /// The action for round `round` (1-based), given the configuration it
    /// will be applied to.
    fn next_action(&mut self, round: usize, conf: &Configuration<S>) -> DemonicAction<S>;
}

impl<S: Scalar, F> Demon<S> for F
where
    F: FnMut(usize, &Configuration<S>) -> DemonicAction<S>,
{
    fn next_action(&mut self, round: usize, conf: &Configuration<S>) -> DemonicAction<S> {
        self(round, conf)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step<S> {
    pub round: usize,
    pub action: DemonicAction<S>,
    pub conf: Configuration<S>,
    pub moving: Vec<RobotId>,
}

/// Finite execution prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<S> {
    pub initial: Configuration<S>,
    pub steps: Vec<Step<S>>,
    /// Set when the caller's stopping predicate ended the run before the horizon.
    pub stopped_early: bool,
}

impl<S: Scalar> Trace<S> {
    pub fn last(&self) -> &Configuration<S> {
        self.steps.last().map_or(&self.initial, |s| &s.conf)
    }

    /// Configurations in order, starting with the initial one.
    pub fn configurations(&self) -> impl Iterator<Item = &Configuration<S>> + '_ {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.conf))
    }

    pub fn actions(&self) -> Vec<DemonicAction<S>> {
        self.steps.iter().map(|s| s.action.clone()).collect()
    }

    /// Index of the first step whose chaining fails, if any.
    pub fn first_chaining_violation<R: Robogram<S> + ?Sized>(&self, r: &R) -> Option<usize> {
        let mut prev = &self.initial;
        for (i, step) in self.steps.iter().enumerate() {
            match round(r, &step.action, prev) {
                Ok(next) if next.same(&step.conf) => {}
                _ => return Some(i),
            }
            prev = &step.conf;
        }
        None
    }
}

/// Runs up to `horizon` rounds. Before each round `stop` sees the current
/// configuration; returning `true` ends the run early.
pub fn execute<S, R, D, P>(
    r: &R,
    demon: &mut D,
    conf: Configuration<S>,
    horizon: usize,
    mut stop: P,
) -> Result<Trace<S>>
where
    S: Scalar,
    R: Robogram<S> + ?Sized,
    D: Demon<S> + ?Sized,
    P: FnMut(&Configuration<S>) -> bool,
{
    let mut trace = Trace {
        initial: conf,
        steps: Vec::new(),
        stopped_early: false,
    };
    for round_ix in 1..=horizon {
        let current = trace.last().clone();
        if stop(&current) {
            trace.stopped_early = true;
            break;
        }
        let action = demon.next_action(round_ix, &current);
        let next = round(r, &action, &current)?;
        let moving = moved(&current, &next);
        trace.steps.push(Step {
            round: round_ix,
            action,
            conf: next,
            moving,
        });
    }
    Ok(trace)
}

/// Whether every robot is active in every window of `k` consecutive actions.
/// Sequences shorter than `k` hold no full window and pass vacuously.
pub fn check_k_fair<S: Scalar>(actions: &[DemonicAction<S>], k: usize) -> bool {
    if k == 0 {
        return actions.is_empty();
    }
    let len = actions.len();
    if len < k {
        return true;
    }
    let n = actions
        .iter()
        .map(DemonicAction::n_robots)
        .max()
        .unwrap_or(0);
    (0..n).all(|robot| {
        let mut last: Option<usize> = None;
        for (t, da) in actions.iter().enumerate() {
            if da.is_active(RobotId(robot)) {
                let idle_before = match last {
                    None => t,
                    Some(prev) => t - prev - 1,
                };
                if idle_before >= k {
                    return false;
                }
                last = Some(t);
            }
        }
        let idle_after = match last {
            None => len,
            Some(prev) => len - prev - 1,
        };
        idle_after < k
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    fn conf(points: &[(i64, i64)]) -> Configuration<Q> {
        Configuration::new(points.iter().map(|&(x, y)| q(x, y)).collect()).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum_of(&conf(&[(1, 2), (1, 2), (1, 2)]));
        assert_eq!(s, Spectrum::from_counts(vec![(q(1, 2), 3)]));
        let s = spectrum_of(&conf(&[(0, 0), (0, 0), (5, 1)]));
        assert_eq!(s.multiplicity(&q(0, 0)), 2);
        assert_eq!(s.multiplicity(&q(5, 1)), 1);
        assert_eq!(s.total(), 3);
        let a = spectrum_of(&conf(&[(0, 0), (5, 1), (0, 0), (2, 2)]));
        let b = spectrum_of(&conf(&[(2, 2), (0, 0), (0, 0), (5, 1)]));
        assert_eq!(a, b);
        assert_eq!(a.max_support(), vec![q(0, 0)]);
    }

    #[test]
    fn configuration_needs_three_robots() {
        assert_eq!(
            Configuration::<Q>::new(vec![q(0, 0), q(1, 1)]),
            Err(Error::TooFewRobots(2))
        );
    }

    // Moves every activated robot to the lexicographically smallest tower.
    fn to_first(s: &Spectrum<Q>) -> Point<Q> {
        s.support()[0].clone()
    }

    #[test]
    fn inactive_robots_stay() {
        let c = conf(&[(0, 0), (3, 1), (7, 2)]);
        let r = to_first;
        assert_eq!(round(&r, &DemonicAction::inactive(3), &c).unwrap(), c);
        assert!(moving(&r, &DemonicAction::inactive(3), &c)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn round_maps_back_from_local_frames() {
        // The smallest point in a local frame depends on the frame, so use a
        // frame-free robogram: stay put.
        let stay = |_: &Spectrum<Q>| Point::<Q>::origin();
        let c = conf(&[(0, 0), (3, 1), (7, 2)]);
        let mut da = DemonicAction::all_active(3);
        da.steps[1] = Some(FrameParams {
            zoom: Q::from_ratio(5, 2),
            c: Q::from_ratio(3, 5),
            s: Q::from_ratio(-4, 5),
            reflect: true,
        });
        assert_eq!(round(&stay, &da, &c).unwrap(), c);
    }

    #[test]
    fn round_propagates_invalid_frames() {
        let c = conf(&[(0, 0), (3, 1), (7, 2)]);
        let mut da = DemonicAction::all_active(3);
        da.steps[0] = Some(FrameParams {
            zoom: Q::zero(),
            c: Q::one(),
            s: Q::zero(),
            reflect: false,
        });
        assert!(matches!(
            round(&to_first, &da, &c),
            Err(Error::InvalidFrame(_))
        ));
        assert!(da.validate(&c).is_err());
        assert!(matches!(
            round(&to_first, &DemonicAction::inactive(4), &c),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn execute_horizon_zero_and_stop() {
        let c = conf(&[(0, 0), (3, 1), (7, 2)]);
        let mut demon = |_: usize, c: &Configuration<Q>| DemonicAction::all_active(c.n_robots());
        let t = execute(&to_first, &mut demon, c.clone(), 0, |_| false).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.last(), &c);
        let t = execute(&to_first, &mut demon, c.clone(), 10, |_| true).unwrap();
        assert!(t.stopped_early && t.steps.is_empty());
        let t = execute(&to_first, &mut demon, c, 4, |_| false).unwrap();
        assert_eq!(t.steps.len(), 4);
        assert_eq!(t.first_chaining_violation(&to_first), None);
    }

    fn round_robin(n: usize, len: usize) -> Vec<DemonicAction<Q>> {
        (0..len)
            .map(|t| DemonicAction::activating(n, &[RobotId(t % n)]))
            .collect()
    }

    #[test]
    fn k_fairness_examples() {
        assert!(check_k_fair(&round_robin(4, 20), 4));
        assert!(!check_k_fair(&round_robin(4, 20), 3));
        let never_zero: Vec<DemonicAction<Q>> = (0..20)
            .map(|t| DemonicAction::activating(4, &[RobotId(1 + t % 3)]))
            .collect();
        for k in 1..=20 {
            assert!(!check_k_fair(&never_zero, k));
        }
        let all: Vec<DemonicAction<Q>> = (0..5).map(|_| DemonicAction::all_active(3)).collect();
        assert!(check_k_fair(&all, 1));
    }

    #[test]
    fn k_fairness_counts_the_tail() {
        let mut acts = round_robin(3, 9);
        acts.extend((0..3).map(|_| DemonicAction::activating(3, &[RobotId(1)])));
        assert!(!check_k_fair(&acts, 3));
        assert!(!check_k_fair(&acts, 5));
        assert!(check_k_fair(&acts, 6));
    }
}
