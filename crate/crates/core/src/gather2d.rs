//! The universal gathering robogram in the plane, its global-frame
//! formulation, the twelve-phase classification, the bivalence predicate,
//! and the lexicographic termination measure.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{
    barycenter_3, classify_triangle, dedup_points, on_sec, opposite_of_max_side, sec, Point,
    TriangleClass,
};
use crate::model::{spectrum_of, Configuration, Robogram, RobotId, Spectrum};
use crate::scalar::Scalar;

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub enum Phase {
    Gathered,
    Maj,
    Dc,
    Dd,
    Ec,
    Ed,
    Ic,
    Id,
    Sc,
    Sd,
    Gc,
    Gd,
}

impl Phase {
    pub const ALL: [Phase; 12] = [
        Phase::Gathered,
        Phase::Maj,
        Phase::Dc,
        Phase::Dd,
        Phase::Ec,
        Phase::Ed,
        Phase::Ic,
        Phase::Id,
        Phase::Sc,
        Phase::Sd,
        Phase::Gc,
        Phase::Gd,
    ];

    /// Weight used as the first component of the measure. `Gathered` is
    /// terminal and shares the bottom weight with `Maj`.
    pub fn weight(self) -> u8 {
        match self {
            Phase::Gathered | Phase::Maj => 0,
            Phase::Dc => 1,
            Phase::Dd => 2,
            Phase::Ec | Phase::Ic | Phase::Sc => 3,
            Phase::Ed | Phase::Id | Phase::Sd => 4,
            Phase::Gc => 5,
            Phase::Gd => 6,
        }
    }

    pub fn is_dirty(self) -> bool {
        matches!(
            self,
            Phase::Dd | Phase::Ed | Phase::Id | Phase::Sd | Phase::Gd
        )
    }

    pub fn is_triangle(self) -> bool {
        matches!(
            self,
            Phase::Ec | Phase::Ed | Phase::Ic | Phase::Id | Phase::Sc | Phase::Sd
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Phase::Gathered => "Gathered",
            Phase::Maj => "Maj",
            Phase::Dc => "Dc",
            Phase::Dd => "Dd",
            Phase::Ec => "Ec",
            Phase::Ed => "Ed",
            Phase::Ic => "Ic",
            Phase::Id => "Id",
            Phase::Sc => "Sc",
            Phase::Sd => "Sd",
            Phase::Gc => "Gc",
            Phase::Gd => "Gd",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Phase::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown phase `{s}`")))
    }
}

/// Arcs of the phase reachability graph, excluding self-loops and the
/// blanket "every triangle phase may reach Maj" arcs.
pub const REACHABILITY_ARCS: [(Phase, Phase); 16] = [
    (Phase::Maj, Phase::Gathered),
    (Phase::Dc, Phase::Gathered),
    (Phase::Dc, Phase::Maj),
    (Phase::Dd, Phase::Dc),
    (Phase::Dd, Phase::Maj),
    (Phase::Ec, Phase::Dd),
    (Phase::Ec, Phase::Gathered),
    (Phase::Ic, Phase::Gathered),
    (Phase::Sc, Phase::Gathered),
    (Phase::Ed, Phase::Ec),
    (Phase::Id, Phase::Ic),
    (Phase::Sd, Phase::Sc),
    (Phase::Gc, Phase::Ec),
    (Phase::Gc, Phase::Ic),
    (Phase::Gc, Phase::Dd),
    (Phase::Gc, Phase::Dc),
];

const MORE_ARCS: [(Phase, Phase); 5] = [
    (Phase::Gc, Phase::Id),
    (Phase::Gc, Phase::Sd),
    (Phase::Gc, Phase::Maj),
    (Phase::Gd, Phase::Gc),
    (Phase::Gd, Phase::Maj),
];

/// Every non-loop arc of the reachability graph, with the triangle → Maj
/// arcs expanded.
pub fn reachability_arcs() -> Vec<(Phase, Phase)> {
    let mut arcs: Vec<(Phase, Phase)> = REACHABILITY_ARCS
        .iter()
        .chain(MORE_ARCS.iter())
        .copied()
        .collect();
    arcs.extend(
        Phase::ALL
            .into_iter()
            .filter(|p| p.is_triangle())
            .map(|p| (p, Phase::Maj)),
    );
    arcs.sort();
    arcs
}

/// Whether one round may take `from` to `to`: an arc of the graph or a self-loop.
pub fn transition_allowed(from: Phase, to: Phase) -> bool {
    from == to
        || (from.is_triangle() && to == Phase::Maj)
        || REACHABILITY_ARCS.contains(&(from, to))
        || MORE_ARCS.contains(&(from, to))
}

/// Lexicographic termination measure; the derived order compares `p` first.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
pub struct Measure {
    pub p: u8,
    pub m: usize,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.m)
    }
}

pub fn lt_measure(a: Measure, b: Measure) -> bool {
    a.p < b.p || (a.p == b.p && a.m < b.m)
}

/// Destination for three distinct towers on the SEC.
pub fn target_triangle<S: Scalar>(p1: &Point<S>, p2: &Point<S>, p3: &Point<S>) -> Result<Point<S>> {
    match classify_triangle(p1, p2, p3)? {
        TriangleClass::Equilateral => Ok(barycenter_3(p1, p2, p3)),
        TriangleClass::Isosceles(apex) => Ok(apex),
        TriangleClass::Scalene => opposite_of_max_side(p1, p2, p3),
    }
}

/// Target computed from a duplicate-free support and its inhabited SEC points.
fn target_of<S: Scalar>(support: &[Point<S>], boundary: &[Point<S>]) -> Result<Point<S>> {
    match boundary {
        [] => Err(Error::EmptySpectrum),
        [pt] => Ok(pt.clone()),
        [a, b, c] => target_triangle(a, b, c),
        _ => Ok(sec(support).center),
    }
}

pub fn target<S: Scalar>(s: &Spectrum<S>) -> Result<Point<S>> {
    let support = s.support();
    target_of(&support, &on_sec(&support))
}

/// Everything the protocol derives from a spectrum, computed once.
#[derive(Clone, Debug)]
pub struct Analysis<S> {
    pub spectrum: Spectrum<S>,
    pub support: Vec<Point<S>>,
    pub on_sec: Vec<Point<S>>,
    pub target: Point<S>,
    /// Target together with the inhabited points of the SEC.
    pub sect: Vec<Point<S>>,
    pub clean: bool,
}

impl<S: Scalar> Analysis<S> {
    pub fn new(spectrum: &Spectrum<S>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        let support = spectrum.support();
        let boundary = on_sec(&support);
        let target = target_of(&support, &boundary)?;
        let mut with_target = vec![target.clone()];
        with_target.extend(boundary.iter().cloned());
        let sect = dedup_points(&with_target);
        let clean = support.iter().all(|p| sect.iter().any(|q| q.same(p)));
        Ok(Analysis {
            spectrum: spectrum.clone(),
            support,
            on_sec: boundary,
            target,
            sect,
            clean,
        })
    }

    pub fn in_sect(&self, p: &Point<S>) -> bool {
        self.sect.iter().any(|q| q.same(p))
    }
}

pub fn sect<S: Scalar>(s: &Spectrum<S>) -> Result<Vec<Point<S>>> {
    Ok(Analysis::new(s)?.sect)
}

pub fn is_clean<S: Scalar>(s: &Spectrum<S>) -> Result<bool> {
    Ok(Analysis::new(s)?.clean)
}

/// The robogram, evaluated in the observing robot's frame (it sits at the origin).
pub fn pgm<S: Scalar>(s: &Spectrum<S>) -> Point<S> {
    let highest = s.max_support();
    match highest.as_slice() {
        [] => Point::origin(),
        [pt] => pt.clone(),
        _ => match Analysis::new(s) {
            Ok(a) if a.clean => a.target,
            Ok(a) if a.in_sect(&Point::origin()) => Point::origin(),
            Ok(a) => a.target,
            Err(_) => Point::origin(),
        },
    }
}

/// The gathering protocol packaged as a [`Robogram`].
#[derive(Clone, Copy, Debug, Default)]
pub struct GatherR2;

impl<S: Scalar> Robogram<S> for GatherR2 {
    fn pgm(&self, spectrum: &Spectrum<S>) -> Point<S> {
        pgm(spectrum)
    }
}

pub fn robogram() -> GatherR2 {
    GatherR2
}

/// Destination of any activated robot standing at `loc`, seen globally.
fn global_destination<S: Scalar>(
    highest: &[Point<S>],
    analysis: Option<&Analysis<S>>,
    loc: &Point<S>,
) -> Point<S> {
    match (highest, analysis) {
        ([pt], _) => pt.clone(),
        (_, Some(a)) if a.clean => a.target.clone(),
        (_, Some(a)) if a.in_sect(loc) => loc.clone(),
        (_, Some(a)) => a.target.clone(),
        (_, None) => loc.clone(),
    }
}

/// One round computed from the demon's global view, without local frames.
pub fn round_global<S: Scalar>(activated: &[RobotId], conf: &Configuration<S>) -> Configuration<S> {
    let s = spectrum_of(conf);
    let highest = s.max_support();
    let analysis = if highest.len() > 1 {
        Analysis::new(&s).ok()
    } else {
        None
    };
    let mut next = conf.locations().to_vec();
    for id in activated {
        next[id.0] = global_destination(&highest, analysis.as_ref(), conf.get(*id));
    }
    Configuration::new(next).expect("same robot count as the input")
}

/// Global destination of every robot if it were activated.
pub fn destinations<S: Scalar>(conf: &Configuration<S>) -> Vec<Point<S>> {
    let all: Vec<RobotId> = conf.ids().collect();
    round_global(&all, conf).locations().to_vec()
}

pub fn classify_phase<S: Scalar>(s: &Spectrum<S>) -> Result<Phase> {
    if s.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if s.support_len() == 1 {
        return Ok(Phase::Gathered);
    }
    if s.max_support().len() == 1 {
        return Ok(Phase::Maj);
    }
    let a = Analysis::new(s)?;
    let pick = |clean: Phase, dirty: Phase| if a.clean { clean } else { dirty };
    match a.on_sec.as_slice() {
        [] | [_] => Err(Error::InternalInvariant(format!(
            "{} inhabited SEC points for a support of {}",
            a.on_sec.len(),
            a.support.len()
        ))),
        [_, _] => Ok(pick(Phase::Dc, Phase::Dd)),
        [p1, p2, p3] => Ok(match classify_triangle(p1, p2, p3)? {
            TriangleClass::Equilateral => pick(Phase::Ec, Phase::Ed),
            TriangleClass::Isosceles(_) => pick(Phase::Ic, Phase::Id),
            TriangleClass::Scalene => pick(Phase::Sc, Phase::Sd),
        }),
        _ => Ok(pick(Phase::Gc, Phase::Gd)),
    }
}

/// Phase together with the measure, sharing one analysis of the spectrum.
pub fn phase_and_measure<S: Scalar>(conf: &Configuration<S>) -> Result<(Phase, Measure)> {
    let s = spectrum_of(conf);
    let phase = classify_phase(&s)?;
    let n = conf.n_robots();
    let m = match phase {
        Phase::Gathered => 0,
        Phase::Maj => n - s.max_multiplicity(),
        _ => {
            let a = Analysis::new(&s)?;
            if a.clean {
                n - s.multiplicity(&a.target)
            } else {
                conf.locations().iter().filter(|p| !a.in_sect(p)).count()
            }
        }
    };
    Ok((
        phase,
        Measure {
            p: phase.weight(),
            m,
        },
    ))
}

pub fn measure<S: Scalar>(conf: &Configuration<S>) -> Result<Measure> {
    Ok(phase_and_measure(conf)?.1)
}

/// Bivalent: an even number of robots split evenly over two locations.
pub fn forbidden<S: Scalar>(conf: &Configuration<S>) -> bool {
    let n = conf.n_robots();
    if !n.is_multiple_of(2) {
        return false;
    }
    let s = spectrum_of(conf);
    s.support_len() == 2 && s.iter().all(|(_, m)| m == n / 2)
}

pub fn gathered_at<S: Scalar>(pt: &Point<S>, conf: &Configuration<S>) -> bool {
    conf.locations().iter().all(|p| p.same(pt))
}

/// The gathering point, if every robot shares one location.
pub fn gathering_point<S: Scalar>(conf: &Configuration<S>) -> Option<Point<S>> {
    let first = conf.locations().first()?;
    gathered_at(first, conf).then(|| first.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{round, DemonicAction, FrameParams};
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(x: i64, y: i64) -> Point<Q> {
        Point::from_ints(x, y)
    }

    fn spec(towers: &[((i64, i64), usize)]) -> Spectrum<Q> {
        Spectrum::from_counts(towers.iter().map(|&((x, y), n)| (q(x, y), n)))
    }

    fn conf(points: &[(i64, i64)]) -> Configuration<Q> {
        Configuration::new(points.iter().map(|&(x, y)| q(x, y)).collect()).unwrap()
    }

    #[test]
    fn target_triangle_examples() {
        assert_eq!(
            target_triangle(&q(0, 0), &q(2, 0), &q(1, 5)).unwrap(),
            q(1, 5)
        );
        assert_eq!(
            target_triangle(&q(0, 0), &q(4, 0), &q(1, 1)).unwrap(),
            q(1, 1)
        );
        let t = target_triangle(
            &Point::new(0.0, 0.0),
            &Point::new(1.0, 0.0),
            &Point::new(0.5, 3f64.sqrt() / 2.0),
        )
        .unwrap();
        assert!((t.x - 0.5).abs() < 1e-12 && (t.y - 3f64.sqrt() / 6.0).abs() < 1e-12);
    }

    #[test]
    fn target_examples() {
        assert_eq!(target(&spec(&[((4, 4), 5)])).unwrap(), q(4, 4));
        assert_eq!(target(&spec(&[((0, 0), 1), ((2, 0), 3)])).unwrap(), q(1, 0));
        // on_sec = {(0,0),(2,0),(0,2)}; sides² 4, 8, 4 → isosceles with apex (0,0).
        let s = spec(&[((0, 0), 1), ((2, 0), 1), ((0, 2), 1), ((1, 1), 1)]);
        assert_eq!(target(&s).unwrap(), q(0, 0));
        assert_eq!(target(&Spectrum::<Q>::empty()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn sect_examples() {
        assert_eq!(sect(&spec(&[((4, 4), 5)])).unwrap(), vec![q(4, 4)]);
        let mut got = sect(&spec(&[((0, 0), 1), ((2, 0), 1)])).unwrap();
        got.sort_by(|a, b| a.raw_cmp(b));
        assert_eq!(got, vec![q(0, 0), q(1, 0), q(2, 0)]);
        let mut got = sect(&spec(&[((0, 0), 1), ((2, 0), 1), ((0, 2), 1), ((1, 1), 1)])).unwrap();
        got.sort_by(|a, b| a.raw_cmp(b));
        assert_eq!(got, vec![q(0, 0), q(0, 2), q(2, 0)]);
        assert_eq!(sect(&Spectrum::<Q>::empty()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn is_clean_examples() {
        assert!(is_clean(&spec(&[((4, 4), 3)])).unwrap());
        assert!(is_clean(&spec(&[((0, 0), 1), ((2, 0), 1), ((1, 0), 1)])).unwrap());
        let s = Spectrum::from_counts(vec![
            (q(0, 0), 1),
            (q(2, 0), 1),
            (Point::new(Q::from_ratio(1, 2), Q::zero()), 1),
        ]);
        assert!(!is_clean(&s).unwrap());
        assert_eq!(is_clean(&Spectrum::<Q>::empty()), Err(Error::EmptySpectrum));
    }

    #[test]
    fn pgm_examples() {
        assert_eq!(pgm(&spec(&[((0, 0), 4)])), q(0, 0));
        assert_eq!(pgm(&spec(&[((0, 0), 1), ((3, 0), 2)])), q(3, 0));
        assert_eq!(
            pgm(&spec(&[((-1, 0), 1), ((1, 0), 1), ((0, 0), 1)])),
            q(0, 0)
        );
        assert_eq!(pgm(&Spectrum::<Q>::empty()), q(0, 0));
    }

    #[test]
    fn pgm_dirty_cases() {
        // Dirty diameter: towers on the SEC stay, interior robots go to the center.
        let s = spec(&[((0, 0), 1), ((4, 0), 1), ((1, 0), 1)]);
        assert_eq!(pgm(&s), q(0, 0));
        let s = spec(&[((-1, 0), 1), ((3, 0), 1), ((0, 0), 1)]);
        assert_eq!(pgm(&s), q(1, 0));
    }

    #[test]
    fn robogram_is_compatible() {
        let a = spectrum_of(&conf(&[(0, 0), (4, 0), (1, 1), (4, 0)]));
        let b = spectrum_of(&conf(&[(4, 0), (1, 1), (4, 0), (0, 0)]));
        assert_eq!(robogram().pgm(&a), Robogram::<Q>::pgm(&robogram(), &b));
    }

    #[test]
    fn round_global_examples() {
        let c = conf(&[(0, 0), (0, 0), (5, 3)]);
        assert_eq!(round_global(&[], &c), c);
        let all: Vec<RobotId> = c.ids().collect();
        assert_eq!(round_global(&all, &c), conf(&[(0, 0), (0, 0), (0, 0)]));
        let d = conf(&[(0, 0), (0, 0), (2, 0), (2, 0)]);
        let all: Vec<RobotId> = d.ids().collect();
        assert_eq!(
            round_global(&all, &d),
            conf(&[(1, 0), (1, 0), (1, 0), (1, 0)])
        );
    }

    #[test]
    fn majority_stack_from_local_frames() {
        let c = conf(&[(1, 1), (1, 1), (6, -2)]);
        let mut da = DemonicAction::all_active(3);
        da.steps[0] = Some(FrameParams {
            zoom: Q::from_ratio(1, 7),
            c: Q::from_ratio(-3, 5),
            s: Q::from_ratio(4, 5),
            reflect: true,
        });
        da.steps[2] = Some(FrameParams {
            zoom: Q::from_i64(9),
            c: Q::zero(),
            s: Q::one(),
            reflect: false,
        });
        assert_eq!(
            round(&robogram(), &da, &c).unwrap(),
            conf(&[(1, 1), (1, 1), (1, 1)])
        );
    }

    #[test]
    fn classify_phase_examples() {
        assert_eq!(
            classify_phase(&spec(&[((1, 1), 5)])).unwrap(),
            Phase::Gathered
        );
        assert_eq!(
            classify_phase(&spec(&[((0, 0), 3), ((1, 0), 1), ((5, 5), 1)])).unwrap(),
            Phase::Maj
        );
        assert_eq!(
            classify_phase(&spec(&[((0, 0), 1), ((2, 0), 1), ((1, 5), 1)])).unwrap(),
            Phase::Ic
        );
        assert_eq!(
            classify_phase(&Spectrum::<Q>::empty()),
            Err(Error::EmptySpectrum)
        );
    }

    #[test]
    fn classify_phase_covers_diameter_and_general() {
        assert_eq!(
            classify_phase(&spec(&[((0, 0), 2), ((2, 0), 2), ((1, 0), 1)])).unwrap(),
            Phase::Dc
        );
        assert_eq!(
            classify_phase(&spec(&[((0, 0), 2), ((4, 0), 2), ((1, 0), 1)])).unwrap(),
            Phase::Dd
        );
        let square = [((1, 0), 1), ((0, 1), 1), ((-1, 0), 1), ((0, -1), 1)];
        assert_eq!(classify_phase(&spec(&square)).unwrap(), Phase::Gc);
        let mut centered = square.to_vec();
        centered.push(((0, 0), 1));
        assert_eq!(classify_phase(&spec(&centered)).unwrap(), Phase::Gc);
        let gd = spec(&[
            ((5, 0), 1),
            ((0, 5), 1),
            ((-5, 0), 1),
            ((0, -5), 1),
            ((1, 1), 1),
        ]);
        assert_eq!(classify_phase(&gd).unwrap(), Phase::Gd);
        // Scalene triangle (0,0),(4,0),(1,1) is obtuse, so use an acute one.
        let sc = spec(&[((0, 0), 1), ((6, 0), 1), ((2, 5), 1)]);
        assert_eq!(classify_phase(&sc).unwrap(), Phase::Sc);
        let sd = spec(&[((0, 0), 1), ((6, 0), 1), ((2, 5), 1), ((3, 1), 1)]);
        assert_eq!(classify_phase(&sd).unwrap(), Phase::Sd);
    }

    #[test]
    fn measure_examples() {
        let c = conf(&[(0, 0), (0, 0), (0, 0), (3, 1), (5, 5)]);
        assert_eq!(measure(&c).unwrap(), Measure { p: 0, m: 2 });
        let c = conf(&[(0, 0), (0, 0), (2, 0), (2, 0), (1, 0)]);
        assert_eq!(
            phase_and_measure(&c).unwrap(),
            (Phase::Dc, Measure { p: 1, m: 4 })
        );
        let c = conf(&[(7, 7), (7, 7), (7, 7)]);
        assert_eq!(measure(&c).unwrap(), Measure { p: 0, m: 0 });
    }

    #[test]
    fn dirty_measure_counts_robots_off_sect() {
        let c = conf(&[(0, 0), (0, 0), (4, 0), (4, 0), (1, 0), (3, 0)]);
        assert_eq!(
            phase_and_measure(&c).unwrap(),
            (Phase::Dd, Measure { p: 2, m: 2 })
        );
    }

    #[test]
    fn lt_measure_examples() {
        assert!(lt_measure(Measure { p: 0, m: 3 }, Measure { p: 1, m: 0 }));
        assert!(lt_measure(Measure { p: 2, m: 5 }, Measure { p: 2, m: 6 }));
        assert!(!lt_measure(Measure { p: 3, m: 1 }, Measure { p: 3, m: 1 }));
        let (a, b) = (Measure { p: 4, m: 0 }, Measure { p: 3, m: 9 });
        assert_eq!(lt_measure(a, b), a < b);
    }

    #[test]
    fn forbidden_examples() {
        assert!(forbidden(&conf(&[(0, 0), (0, 0), (1, 1), (1, 1)])));
        assert!(!forbidden(&conf(&[(0, 0), (0, 0), (1, 1)])));
        assert!(!forbidden(&conf(&[(0, 0), (0, 0), (0, 0), (1, 1)])));
        assert!(!forbidden(&conf(&[(0, 0), (2, 0), (1, 1), (3, 3)])));
    }

    #[test]
    fn gathered_at_examples() {
        let c = conf(&[(2, 3), (2, 3), (2, 3)]);
        assert!(gathered_at(&q(2, 3), &c));
        assert!(!gathered_at(&q(3, 2), &c));
        assert!(!gathered_at(&q(2, 3), &conf(&[(2, 3), (2, 3), (2, 4)])));
        assert_eq!(gathering_point(&c), Some(q(2, 3)));
    }

    #[test]
    fn transition_relation() {
        assert!(transition_allowed(Phase::Gd, Phase::Gd));
        assert!(transition_allowed(Phase::Id, Phase::Maj));
        assert!(transition_allowed(Phase::Gc, Phase::Sd));
        assert!(!transition_allowed(Phase::Gc, Phase::Gd));
        assert!(!transition_allowed(Phase::Dd, Phase::Gathered));
        assert_eq!(reachability_arcs().len(), 27);
        assert!(reachability_arcs()
            .iter()
            .all(|&(a, b)| a.weight() > b.weight() || b == Phase::Gathered || a == Phase::Maj));
    }

    #[test]
    fn phase_names_round_trip() {
        for p in Phase::ALL {
            assert_eq!(p.name().parse::<Phase>().unwrap(), p);
        }
    }
}
