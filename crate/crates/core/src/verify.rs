//! Demon strategies, initial-configuration generators, and the trace checker
//! and fuzzer that exercise the gathering protocol's correctness properties.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{map_multiset, Similarity};
use crate::gather2d::{
    destinations, forbidden, gathering_point, phase_and_measure, reachability_arcs, robogram,
    round_global, target, transition_allowed, Measure, Phase,
};
use crate::geometry::Point;
use crate::model::{
    check_k_fair, execute, moved, round, Configuration, Demon, DemonicAction, FrameParams, RobotId,
    Spectrum, Trace,
};
use crate::scalar::{Backend, Scalar};

/// Per-coordinate tolerance for comparing floating-backend round results.
pub const FLOAT_ROUND_TOL: f64 = 1e-9;

/// Horizon that suffices under `k`-bounded fairness: at most `7 (n + 1)`
/// rounds can move a robot, and one occurs within every `k` rounds.
pub fn default_horizon(k: usize, n: usize) -> usize {
    k * 7 * (n + 1)
}

/// Adversarial scripts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Script {
    /// Activate only robots already at their destination, releasing a
    /// robot that would move only when its fairness deadline arrives.
    /// `None` means `k = 2 n`.
    Stall(Option<usize>),
    /// Cycle through explicit activation sets.
    Explicit(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    RoundRobin,
    AllActive,
    /// Random subsets; `None` means `k = 2 n`.
    RandomKFair(Option<usize>),
    /// Exactly one robot per round, a fresh random order each epoch.
    SingleMover,
    Adversarial(Script),
}

impl StrategyKind {
    /// The fairness bound the generated stream satisfies for `n` robots,
    /// or `None` when some robot is never activated.
    pub fn declared_k(&self, n: usize) -> Option<usize> {
        match self {
            StrategyKind::RoundRobin => Some(n),
            StrategyKind::AllActive => Some(1),
            StrategyKind::RandomKFair(k) | StrategyKind::Adversarial(Script::Stall(k)) => {
                Some(k.unwrap_or(2 * n).max(1))
            }
            StrategyKind::SingleMover => Some(2 * n - 1),
            StrategyKind::Adversarial(Script::Explicit(sets)) => explicit_fairness(sets, n),
        }
    }

    pub fn label(&self) -> String {
        match self {
            StrategyKind::RoundRobin => "round_robin".into(),
            StrategyKind::AllActive => "all_active".into(),
            StrategyKind::RandomKFair(None) => "random_k_fair".into(),
            StrategyKind::RandomKFair(Some(k)) => format!("random_k_fair({k})"),
            StrategyKind::SingleMover => "single_mover".into(),
            StrategyKind::Adversarial(Script::Stall(_)) => "stall".into(),
            StrategyKind::Adversarial(Script::Explicit(_)) => "explicit".into(),
        }
    }
}

/// Largest idle gap of a cyclic script, plus one; `None` if a robot never appears.
fn explicit_fairness(sets: &[Vec<usize>], n: usize) -> Option<usize> {
    if sets.is_empty() {
        return None;
    }
    let len = sets.len();
    let mut k = 1;
    for robot in 0..n {
        let hits: Vec<usize> = (0..len).filter(|&t| sets[t].contains(&robot)).collect();
        let first = *hits.first()?;
        let mut gap = first + len - hits.last().unwrap() - 1;
        for w in hits.windows(2) {
            gap = gap.max(w[1] - w[0] - 1);
        }
        k = k.max(gap + 1);
    }
    Some(k)
}

/// How a demon picks each activated robot's frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FramePolicy {
    pub zoom_min: f64,
    pub zoom_max: f64,
    pub rotate: bool,
    pub reflect_prob: f64,
    /// Only draw zooms at the two ends of the range.
    pub extreme_zoom: bool,
}

impl Default for FramePolicy {
    fn default() -> Self {
        FramePolicy {
            zoom_min: 0.1,
            zoom_max: 10.0,
            rotate: true,
            reflect_prob: 0.5,
            extreme_zoom: false,
        }
    }
}

impl FramePolicy {
    /// Identity frames for every activated robot.
    pub fn fixed() -> Self {
        FramePolicy {
            zoom_min: 1.0,
            zoom_max: 1.0,
            rotate: false,
            reflect_prob: 0.0,
            extreme_zoom: false,
        }
    }

    /// Zooms are rationals `num / den` with `den <= 10`, so both backends
    /// draw the same values.
    fn zoom<S: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        if self.extreme_zoom {
            let z = if rng.gen_bool(0.5) {
                self.zoom_min
            } else {
                self.zoom_max
            };
            return ratio_near(z);
        }
        let den: i64 = rng.gen_range(1..=10);
        let lo = (self.zoom_min * den as f64).ceil().max(1.0) as i64;
        let hi = ((self.zoom_max * den as f64).floor() as i64).max(lo);
        S::from_ratio(rng.gen_range(lo..=hi), den)
    }

    pub fn sample<S: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> FrameParams<S> {
        let zoom = self.zoom(rng);
        let (c, s) = if self.rotate {
            S::random_unit_pair(rng)
        } else {
            (S::one(), S::zero())
        };
        let reflect = self.reflect_prob > 0.0 && rng.gen_bool(self.reflect_prob.min(1.0));
        FrameParams {
            zoom,
            c,
            s,
            reflect,
        }
    }
}

fn ratio_near<S: Scalar>(z: f64) -> S {
    let den = 1000;
    S::from_ratio(((z * den as f64).round() as i64).max(1), den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemonStrategy {
    pub kind: StrategyKind,
    #[serde(default)]
    pub frames: FramePolicy,
    #[serde(default)]
    pub seed: u64,
}

impl DemonStrategy {
    pub fn new(kind: StrategyKind, seed: u64) -> Self {
        DemonStrategy {
            kind,
            frames: FramePolicy::default(),
            seed,
        }
    }

    pub fn demon(&self, n: usize) -> StrategyDemon {
        StrategyDemon {
            strategy: self.clone(),
            n,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            last_active: vec![None; n],
            epoch: Vec::new(),
        }
    }
}

/// Seeded, possibly adaptive demon realizing a [`DemonStrategy`].
pub struct StrategyDemon {
    strategy: DemonStrategy,
    n: usize,
    rng: ChaCha8Rng,
    last_active: Vec<Option<usize>>,
    epoch: Vec<usize>,
}

impl StrategyDemon {
    /// Robots that must be activated in `round` to keep every idle gap below `k`.
    fn due(&self, round: usize, k: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| {
                let idle = match self.last_active[i] {
                    None => round - 1,
                    Some(t) => round - t - 1,
                };
                idle + 1 >= k
            })
            .collect()
    }

    fn choose<S: Scalar>(&mut self, round: usize, conf: &Configuration<S>) -> Vec<usize> {
        let n = self.n;
        match &self.strategy.kind {
            StrategyKind::RoundRobin => vec![(round - 1) % n],
            StrategyKind::AllActive => (0..n).collect(),
            StrategyKind::RandomKFair(k) => {
                let k = k.unwrap_or(2 * n).max(1);
                let mut chosen = self.due(round, k);
                for i in 0..n {
                    if !chosen.contains(&i) && self.rng.gen_bool(0.5) {
                        chosen.push(i);
                    }
                }
                chosen
            }
            StrategyKind::SingleMover => {
                if self.epoch.is_empty() {
                    let mut order: Vec<usize> = (0..n).collect();
                    order.shuffle(&mut self.rng);
                    order.reverse();
                    self.epoch = order;
                }
                vec![self.epoch.pop().expect("refilled above")]
            }
            StrategyKind::Adversarial(Script::Stall(k)) => {
                let k = k.unwrap_or(2 * n).max(1);
                let dests = destinations(conf);
                let mut chosen = self.due(round, k);
                for (i, d) in dests.iter().enumerate() {
                    if !chosen.contains(&i) && d.same(conf.get(RobotId(i))) {
                        chosen.push(i);
                    }
                }
                chosen
            }
            StrategyKind::Adversarial(Script::Explicit(sets)) => {
                if sets.is_empty() {
                    Vec::new()
                } else {
                    sets[(round - 1) % sets.len()]
                        .iter()
                        .copied()
                        .filter(|&i| i < n)
                        .collect()
                }
            }
        }
    }
}

impl<S: Scalar> Demon<S> for StrategyDemon {
    fn next_action(&mut self, round: usize, conf: &Configuration<S>) -> DemonicAction<S> {
        let mut chosen = self.choose(round, conf);
        chosen.sort_unstable();
        chosen.dedup();
        let mut da = DemonicAction::inactive(self.n);
        for i in chosen {
            da.steps[i] = Some(self.strategy.frames.sample(&mut self.rng));
            self.last_active[i] = Some(round);
        }
        da
    }
}

/// How initial configurations are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialSpec {
    /// Coordinates lie in `[-bbox, bbox]`.
    pub bbox: i64,
    /// Coordinates are multiples of `1 / resolution`.
    pub resolution: i64,
    /// Robots pick from this many random locations; `None` draws a pool
    /// size uniformly in `1..=n`.
    pub pool: Option<usize>,
    /// Probability of spreading robots evenly over the pool, which ties the
    /// highest towers instead of leaving a majority.
    pub balanced: f64,
    /// Probability of drawing the pool from lattice points of a common
    /// circle (plus optional interior points).
    pub cocircular: f64,
    /// Floating backend only: probability of drawing the pool from the
    /// vertices of an equilateral triangle (plus optional interior points).
    pub equilateral: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            bbox: 10,
            resolution: 1,
            pool: None,
            balanced: 0.5,
            cocircular: 0.35,
            equilateral: 0.15,
        }
    }
}

impl InitialSpec {
    pub fn for_backend(backend: Backend) -> Self {
        match backend {
            Backend::Exact => InitialSpec::default(),
            Backend::Floating => InitialSpec {
                resolution: 1 << 20,
                ..InitialSpec::default()
            },
        }
    }

    /// Uniform lattice points only, no shaping.
    pub fn uniform() -> Self {
        InitialSpec {
            balanced: 0.0,
            cocircular: 0.0,
            equilateral: 0.0,
            ..InitialSpec::default()
        }
    }
}

fn random_point<S: Scalar, R: Rng + ?Sized>(rng: &mut R, spec: &InitialSpec) -> Point<S> {
    let lim = spec.bbox * spec.resolution;
    Point::new(
        S::from_ratio(rng.gen_range(-lim..=lim), spec.resolution),
        S::from_ratio(rng.gen_range(-lim..=lim), spec.resolution),
    )
}

/// Integer points of the circle of radius `r` about the origin.
fn circle_lattice(r: i64) -> Vec<(i64, i64)> {
    let mut pts = Vec::new();
    for x in -r..=r {
        let y2 = r * r - x * x;
        let y = (y2 as f64).sqrt().round() as i64;
        if y * y == y2 {
            pts.push((x, y));
            if y != 0 {
                pts.push((x, -y));
            }
        }
    }
    pts
}

fn cocircular_pool<S: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    spec: &InitialSpec,
    size: usize,
) -> Vec<Point<S>> {
    let r = [5i64, 25, 65][rng.gen_range(0..3)];
    let mut lattice = circle_lattice(r);
    lattice.shuffle(rng);
    let on_circle = size.clamp(2, lattice.len());
    let extra = size.saturating_sub(on_circle);
    // Radius scaled to 5, then shifted to a random lattice center.
    let (cx, cy) = (rng.gen_range(-3..=3i64), rng.gen_range(-3..=3i64));
    let shift = |v: i64, c: i64| S::from_ratio(5 * v, r) + S::from_i64(c);
    let mut pool: Vec<Point<S>> = lattice[..on_circle]
        .iter()
        .map(|&(x, y)| Point::new(shift(x, cx), shift(y, cy)))
        .collect();
    if extra > 0 || rng.gen_bool(0.3) {
        pool.push(Point::from_ints(cx, cy));
    }
    for _ in 1..extra {
        pool.push(random_point(
            rng,
            &InitialSpec {
                bbox: 3,
                ..spec.clone()
            },
        ));
    }
    pool
}

/// Vertices of a randomly placed equilateral triangle. Only meaningful on
/// the floating backend: no such triangle has all-rational vertices.
fn equilateral_pool<S: Scalar, R: Rng + ?Sized>(rng: &mut R, size: usize) -> Vec<Point<S>> {
    let (cx, cy) = (rng.gen_range(-3.0..3.0f64), rng.gen_range(-3.0..3.0f64));
    let r = rng.gen_range(1.0..5.0f64);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let f = |v: f64| S::decode(&format!("{v:e}")).expect("finite");
    let mut pool: Vec<Point<S>> = (0..3)
        .map(|k| {
            let a = theta + k as f64 * std::f64::consts::TAU / 3.0;
            Point::new(f(cx + r * a.cos()), f(cy + r * a.sin()))
        })
        .collect();
    for _ in 3..size {
        let (a, d) = (
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(0.0..r / 2.0),
        );
        pool.push(Point::new(f(cx + d * a.cos()), f(cy + d * a.sin())));
    }
    pool
}

/// Random non-bivalent configuration of `n` robots. Towers arise whenever
/// the location pool is smaller than `n`.
pub fn gen_initial<S: Scalar, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    spec: &InitialSpec,
) -> Result<Configuration<S>> {
    if n < crate::model::MIN_ROBOTS {
        return Err(Error::TooFewRobots(n));
    }
    loop {
        let pool_size = spec.pool.unwrap_or_else(|| rng.gen_range(1..=n)).max(1);
        let pool: Vec<Point<S>> = if S::BACKEND == Backend::Floating
            && spec.equilateral > 0.0
            && rng.gen_bool(spec.equilateral.min(1.0))
        {
            equilateral_pool(rng, pool_size.max(3))
        } else if spec.cocircular > 0.0 && rng.gen_bool(spec.cocircular.min(1.0)) {
            cocircular_pool(rng, spec, pool_size.max(3))
        } else {
            (0..pool_size).map(|_| random_point(rng, spec)).collect()
        };
        let locations: Vec<Point<S>> =
            if spec.balanced > 0.0 && rng.gen_bool(spec.balanced.min(1.0)) {
                let offset = rng.gen_range(0..pool.len());
                (0..n)
                    .map(|i| pool[(i + offset) % pool.len()].clone())
                    .collect()
            } else {
                (0..n)
                    .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                    .collect()
            };
        let conf = Configuration::new(locations)?;
        if !forbidden(&conf) {
            return Ok(conf);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Chaining,
    RoundSimplify,
    SameDestination,
    NeverForbidden,
    MeasureDecrease,
    PhaseTransition,
    GatherPersistence,
    EventualGathering,
    Fairness,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Chaining,
        Property::RoundSimplify,
        Property::SameDestination,
        Property::NeverForbidden,
        Property::MeasureDecrease,
        Property::PhaseTransition,
        Property::GatherPersistence,
        Property::EventualGathering,
        Property::Fairness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Chaining => "chaining",
            Property::RoundSimplify => "round_simplify",
            Property::SameDestination => "same_destination",
            Property::NeverForbidden => "never_forbidden",
            Property::MeasureDecrease => "measure_decrease",
            Property::PhaseTransition => "phase_transition",
            Property::GatherPersistence => "gather_persistence",
            Property::EventualGathering => "eventual_gathering",
            Property::Fairness => "fairness",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub checked: u64,
    pub failed: u64,
}

/// A replayable property violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: Property,
    pub seed: u64,
    pub run: usize,
    /// Index of the offending round (1-based; 0 for whole-run properties).
    pub round: usize,
    pub before: Vec<[String; 2]>,
    pub after: Vec<[String; 2]>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub runs: usize,
    pub rounds: u64,
    pub moving_rounds: u64,
    pub tallies: BTreeMap<Property, Tally>,
    /// First violation per property, in run order.
    pub counterexamples: Vec<Counterexample>,
    /// Observed phase transitions, self-loops included.
    pub transitions: BTreeMap<(Phase, Phase), u64>,
    /// Round at which each gathered run first reached a gathered configuration.
    pub rounds_to_gather: Vec<usize>,
    /// First witness of each off-graph phase transition. These are audited,
    /// not counted as failures.
    pub phase_witnesses: Vec<Counterexample>,
}

impl CheckReport {
    pub(crate) fn tally(&mut self, p: Property, ok: bool) {
        let t = self.tallies.entry(p).or_default();
        t.checked += 1;
        if !ok {
            t.failed += 1;
        }
    }

    pub(crate) fn fail(&mut self, cx: Counterexample) {
        self.tally(cx.property, false);
        if !self
            .counterexamples
            .iter()
            .any(|c| c.property == cx.property)
        {
            self.counterexamples.push(cx);
        }
    }

    pub fn failures(&self, p: Property) -> u64 {
        self.tallies.get(&p).map_or(0, |t| t.failed)
    }

    pub fn checked(&self, p: Property) -> u64 {
        self.tallies.get(&p).map_or(0, |t| t.checked)
    }

    pub fn total_failures(&self) -> u64 {
        self.tallies.values().map(|t| t.failed).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn counterexample(&self, p: Property) -> Option<&Counterexample> {
        self.counterexamples.iter().find(|c| c.property == p)
    }

    /// Transitions observed that are neither arcs of the reachability graph nor self-loops.
    pub fn off_graph_transitions(&self) -> Vec<((Phase, Phase), u64)> {
        self.transitions
            .iter()
            .filter(|((a, b), _)| !transition_allowed(*a, *b))
            .map(|(k, v)| (*k, *v))
            .collect()
    }

    /// Graph arcs never observed, reported for audit.
    pub fn unobserved_arcs(&self) -> Vec<(Phase, Phase)> {
        reachability_arcs()
            .into_iter()
            .filter(|arc| !self.transitions.contains_key(arc))
            .collect()
    }

    /// Folds `other` in after `self`; the result depends only on the order of calls.
    pub fn merge(&mut self, other: CheckReport) {
        self.runs += other.runs;
        self.rounds += other.rounds;
        self.moving_rounds += other.moving_rounds;
        for (p, t) in other.tallies {
            let mine = self.tallies.entry(p).or_default();
            mine.checked += t.checked;
            mine.failed += t.failed;
        }
        for cx in other.counterexamples {
            if !self
                .counterexamples
                .iter()
                .any(|c| c.property == cx.property)
            {
                self.counterexamples.push(cx);
            }
        }
        for (k, v) in other.transitions {
            *self.transitions.entry(k).or_default() += v;
        }
        self.rounds_to_gather.extend(other.rounds_to_gather);
        for w in other.phase_witnesses {
            self.witness(w);
        }
    }

    fn witness(&mut self, w: Counterexample) {
        if !self.phase_witnesses.iter().any(|c| c.detail == w.detail) {
            self.phase_witnesses.push(w);
        }
    }

    pub fn max_rounds_to_gather(&self) -> Option<usize> {
        self.rounds_to_gather.iter().copied().max()
    }

    pub fn mean_rounds_to_gather(&self) -> Option<f64> {
        if self.rounds_to_gather.is_empty() {
            None
        } else {
            Some(
                self.rounds_to_gather.iter().sum::<usize>() as f64
                    / self.rounds_to_gather.len() as f64,
            )
        }
    }

    /// Multi-line, human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "runs: {}  rounds: {}  moving rounds: {}\n",
            self.runs, self.rounds, self.moving_rounds
        );
        for p in Property::ALL {
            if let Some(t) = self.tallies.get(&p) {
                let verdict = if t.failed == 0 { "PASS" } else { "FAIL" };
                out.push_str(&format!(
                    "{verdict} {:<20} checked {:>8}  failed {}\n",
                    p.name(),
                    t.checked,
                    t.failed
                ));
            }
        }
        if let (Some(max), Some(mean)) = (self.max_rounds_to_gather(), self.mean_rounds_to_gather())
        {
            out.push_str(&format!(
                "gathered runs: {}  rounds to gather: mean {:.2}, max {}\n",
                self.rounds_to_gather.len(),
                mean,
                max
            ));
        }
        for ((a, b), count) in self.off_graph_transitions() {
            out.push_str(&format!("off-graph transition {a} -> {b}: {count}\n"));
        }
        let unobserved = self.unobserved_arcs();
        if !unobserved.is_empty() && !self.transitions.is_empty() {
            let list: Vec<String> = unobserved
                .iter()
                .map(|(a, b)| format!("{a}->{b}"))
                .collect();
            out.push_str(&format!("unobserved arcs: {}\n", list.join(" ")));
        }
        for w in &self.phase_witnesses {
            out.push_str(&format!(
                "witness seed {} run {} round {}: {}\n",
                w.seed, w.run, w.round, w.detail
            ));
        }
        for cx in &self.counterexamples {
            out.push_str(&format!(
                "counterexample [{}] seed {} run {} round {}: {}\n",
                cx.property, cx.seed, cx.run, cx.round, cx.detail
            ));
        }
        out
    }
}

/// Where a trace came from, for counterexample provenance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunInfo {
    pub seed: u64,
    pub run: usize,
}

pub(crate) fn encode_conf<S: Scalar>(conf: &Configuration<S>) -> Vec<[String; 2]> {
    conf.locations()
        .iter()
        .map(|p| [p.x.encode(), p.y.encode()])
        .collect()
}

/// Backend-appropriate agreement of two round results: exact equality, or
/// every coordinate within [`FLOAT_ROUND_TOL`] on the floating backend.
pub fn rounds_agree<S: Scalar>(a: &Configuration<S>, b: &Configuration<S>) -> bool {
    if a.n_robots() != b.n_robots() {
        return false;
    }
    match S::BACKEND {
        Backend::Exact => a.same(b),
        Backend::Floating => a.locations().iter().zip(b.locations()).all(|(p, q)| {
            (p.x.to_f64() - q.x.to_f64()).abs() <= FLOAT_ROUND_TOL
                && (p.y.to_f64() - q.y.to_f64()).abs() <= FLOAT_ROUND_TOL
        }),
    }
}

/// Local-frame round versus the global-view round on the activated set.
pub fn check_equivalence<S: Scalar>(conf: &Configuration<S>, da: &DemonicAction<S>) -> bool {
    match round(&robogram(), da, conf) {
        Ok(local) => rounds_agree(&local, &round_global(&da.activated(), conf)),
        Err(_) => false,
    }
}

/// `target` commutes with `f` on a nonempty spectrum.
pub fn check_target_morph<S: Scalar>(s: &Spectrum<S>, f: &Similarity<S>) -> bool {
    match (target(&map_multiset(f, s)), target(s)) {
        (Ok(mapped), Ok(t)) => mapped.same(&f.apply(&t)),
        _ => false,
    }
}

pub fn check_trace<S: Scalar>(t: &Trace<S>) -> CheckReport {
    check_trace_with(t, RunInfo::default())
}

/// Checks every per-round property of the gathering protocol along `t`.
pub fn check_trace_with<S: Scalar>(t: &Trace<S>, info: RunInfo) -> CheckReport {
    let mut report = CheckReport {
        runs: 1,
        ..CheckReport::default()
    };
    let r = robogram();
    let cx = |property: Property,
              round: usize,
              before: &Configuration<S>,
              after: &Configuration<S>,
              detail: String| {
        Counterexample {
            property,
            seed: info.seed,
            run: info.run,
            round,
            before: encode_conf(before),
            after: encode_conf(after),
            detail,
        }
    };

    let mut gathered: Option<Point<S>> = gathering_point(&t.initial);
    if gathered.is_some() {
        report.rounds_to_gather.push(0);
    }
    let mut prev_pm: Option<(Phase, Measure)> = phase_and_measure(&t.initial).ok();

    let mut prev = &t.initial;
    for step in &t.steps {
        let next = &step.conf;
        let k = step.round;
        report.rounds += 1;

        match round(&r, &step.action, prev) {
            Ok(recomputed) if recomputed.same(next) => report.tally(Property::Chaining, true),
            Ok(_) => report.fail(cx(
                Property::Chaining,
                k,
                prev,
                next,
                "recorded configuration differs from the recomputed round".into(),
            )),
            Err(e) => report.fail(cx(
                Property::Chaining,
                k,
                prev,
                next,
                format!("round failed: {e}"),
            )),
        }

        let global = round_global(&step.action.activated(), prev);
        if rounds_agree(next, &global) {
            report.tally(Property::RoundSimplify, true);
        } else {
            report.fail(cx(
                Property::RoundSimplify,
                k,
                prev,
                next,
                "local-frame round differs from the global view".into(),
            ));
        }

        let movers = moved(prev, next);
        if !movers.is_empty() {
            report.moving_rounds += 1;
        }
        let dest = movers.first().map(|id| next.get(*id));
        if movers
            .iter()
            .all(|id| Some(next.get(*id)).is_some_and(|p| dest.is_some_and(|d| p.same(d))))
        {
            report.tally(Property::SameDestination, true);
        } else {
            let spots: Vec<String> = movers
                .iter()
                .map(|id| format!("{id}->{}", next.get(*id)))
                .collect();
            report.fail(cx(
                Property::SameDestination,
                k,
                prev,
                next,
                format!("moving robots diverge: {}", spots.join(", ")),
            ));
        }

        let was_forbidden = forbidden(prev);
        if !was_forbidden {
            if forbidden(next) {
                report.fail(cx(
                    Property::NeverForbidden,
                    k,
                    prev,
                    next,
                    "reached a bivalent configuration".into(),
                ));
            } else {
                report.tally(Property::NeverForbidden, true);
            }
        }

        let next_pm = phase_and_measure(next);
        match (&prev_pm, &next_pm) {
            (Some((pa, ma)), Ok((pb, mb))) => {
                if !movers.is_empty() && !was_forbidden {
                    if mb < ma {
                        report.tally(Property::MeasureDecrease, true);
                    } else {
                        report.fail(cx(
                            Property::MeasureDecrease,
                            k,
                            prev,
                            next,
                            format!("measure {ma} ({pa}) -> {mb} ({pb})"),
                        ));
                    }
                }
                *report.transitions.entry((*pa, *pb)).or_default() += 1;
                report.tally(Property::PhaseTransition, true);
                if !transition_allowed(*pa, *pb) {
                    report.witness(cx(
                        Property::PhaseTransition,
                        k,
                        prev,
                        next,
                        format!("{pa} -> {pb} is not an arc of the reachability graph"),
                    ));
                }
            }
            (_, Err(e)) => {
                report.fail(cx(
                    Property::PhaseTransition,
                    k,
                    prev,
                    next,
                    format!("cannot classify: {e}"),
                ));
            }
            (None, Ok(_)) => {
                report.fail(cx(
                    Property::PhaseTransition,
                    k,
                    prev,
                    next,
                    "cannot classify the previous configuration".into(),
                ));
            }
        }
        prev_pm = next_pm.ok();

        match &gathered {
            Some(pt) => {
                if next.locations().iter().all(|p| p.same(pt)) {
                    report.tally(Property::GatherPersistence, true);
                } else {
                    report.fail(cx(
                        Property::GatherPersistence,
                        k,
                        prev,
                        next,
                        format!("left the gathering point {pt}"),
                    ));
                }
            }
            None => {
                if let Some(pt) = gathering_point(next) {
                    report.rounds_to_gather.push(k);
                    gathered = Some(pt);
                }
            }
        }
        prev = next;
    }
    report
}

/// Replay recipe of a single fuzz run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan<S> {
    pub run: usize,
    pub seed: u64,
    pub strategy: DemonStrategy,
    pub initial: Configuration<S>,
    pub horizon: usize,
    /// Rounds simulated beyond gathering to check that it persists.
    pub tail: usize,
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub runs: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub strategies: Vec<StrategyKind>,
    pub frames: FramePolicy,
    pub initial: InitialSpec,
    /// Overrides the derived `k · 7 · (n + 1)` horizon.
    pub horizon: Option<usize>,
    pub seed: u64,
}

impl FuzzConfig {
    pub fn new(runs: usize, seed: u64) -> Self {
        FuzzConfig {
            runs,
            n_min: 3,
            n_max: 8,
            strategies: default_strategies(),
            frames: FramePolicy::default(),
            initial: InitialSpec::default(),
            horizon: None,
            seed,
        }
    }
}

pub fn default_strategies() -> Vec<StrategyKind> {
    vec![
        StrategyKind::RoundRobin,
        StrategyKind::AllActive,
        StrategyKind::RandomKFair(None),
        StrategyKind::SingleMover,
        StrategyKind::Adversarial(Script::Stall(None)),
    ]
}

/// SplitMix64 finalizer; derives independent per-run seeds.
pub fn mix_seed(seed: u64, run: u64) -> u64 {
    let mut z = seed
        ^ run
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl<S: Scalar> RunPlan<S> {
    /// Deterministically derives run `run` of a fuzz campaign.
    pub fn derive(cfg: &FuzzConfig, run: usize) -> Result<Self> {
        let seed = mix_seed(cfg.seed, run as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(cfg.n_min.max(3)..=cfg.n_max.max(cfg.n_min).max(3));
        let kind = cfg.strategies[rng.gen_range(0..cfg.strategies.len().max(1))].clone();
        let strategy = DemonStrategy {
            kind,
            frames: cfg.frames.clone(),
            seed: rng.gen(),
        };
        let initial = gen_initial(n, &mut rng, &cfg.initial)?;
        let k = strategy.kind.declared_k(n).unwrap_or(2 * n);
        let horizon = cfg.horizon.unwrap_or_else(|| default_horizon(k, n));
        Ok(RunPlan {
            run,
            seed,
            strategy,
            initial,
            horizon,
            tail: k,
        })
    }

    /// Simulates until `tail` rounds past gathering, or `horizon + tail` rounds.
    pub fn execute(&self) -> Result<Trace<S>> {
        let n = self.initial.n_robots();
        let mut demon = self.strategy.demon(n);
        let mut gathered_for = 0usize;
        let tail = self.tail;
        execute(
            &robogram(),
            &mut demon,
            self.initial.clone(),
            self.horizon + tail,
            |c| {
                if gathering_point(c).is_some() {
                    gathered_for += 1;
                } else {
                    gathered_for = 0;
                }
                gathered_for > tail
            },
        )
    }

    /// Executes and checks the run, including eventual gathering within
    /// the horizon and fairness of the emitted stream.
    pub fn check(&self) -> (CheckReport, Trace<S>) {
        let info = RunInfo {
            seed: self.seed,
            run: self.run,
        };
        let trace = match self.execute() {
            Ok(t) => t,
            Err(e) => {
                let mut report = CheckReport {
                    runs: 1,
                    ..CheckReport::default()
                };
                report.fail(Counterexample {
                    property: Property::Chaining,
                    seed: self.seed,
                    run: self.run,
                    round: 0,
                    before: encode_conf(&self.initial),
                    after: Vec::new(),
                    detail: format!("execution failed: {e}"),
                });
                let empty = Trace {
                    initial: self.initial.clone(),
                    steps: Vec::new(),
                    stopped_early: false,
                };
                return (report, empty);
            }
        };
        let mut report = check_trace_with(&trace, info);
        let first = report.rounds_to_gather.first().copied();
        let n = self.initial.n_robots();
        match first {
            Some(r) if r <= self.horizon => report.tally(Property::EventualGathering, true),
            _ => report.fail(Counterexample {
                property: Property::EventualGathering,
                seed: self.seed,
                run: self.run,
                round: trace.steps.len(),
                before: encode_conf(&self.initial),
                after: encode_conf(trace.last()),
                detail: match first {
                    Some(r) => format!("gathered at round {r}, past the horizon {}", self.horizon),
                    None => format!(
                        "not gathered within horizon {} ({})",
                        self.horizon,
                        self.strategy.kind.label()
                    ),
                },
            }),
        }
        let fair = match self.strategy.kind.declared_k(n) {
            Some(k) => check_k_fair(&trace.actions(), k),
            None => false,
        };
        if fair {
            report.tally(Property::Fairness, true);
        } else {
            report.fail(Counterexample {
                property: Property::Fairness,
                seed: self.seed,
                run: self.run,
                round: 0,
                before: encode_conf(&self.initial),
                after: encode_conf(trace.last()),
                detail: format!("{} demon is not k-fair", self.strategy.kind.label()),
            });
        }
        (report, trace)
    }
}

/// Outcome of a fuzz campaign; keeps the first failing run for replay.
pub struct FuzzOutcome<S> {
    pub report: CheckReport,
    pub first_failure: Option<(RunPlan<S>, Trace<S>)>,
}

/// Runs `cfg.runs` independent seeded simulations in parallel and merges
/// their reports in run order.
pub fn fuzz<S: Scalar>(cfg: &FuzzConfig) -> Result<FuzzOutcome<S>> {
    type RunResult<S> = Result<(CheckReport, Option<(RunPlan<S>, Trace<S>)>)>;
    let results: Vec<RunResult<S>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let plan = RunPlan::<S>::derive(cfg, run)?;
            let (report, trace) = plan.check();
            let failure = if report.passed() {
                None
            } else {
                Some((plan, trace))
            };
            Ok((report, failure))
        })
        .collect();
    let mut report = CheckReport::default();
    let mut first_failure = None;
    for r in results {
        let (run_report, failure) = r?;
        report.merge(run_report);
        if first_failure.is_none() {
            first_failure = failure;
        }
    }
    Ok(FuzzOutcome {
        report,
        first_failure,
    })
}

/// Floating-backend stress runs that start from near-isosceles triangles,
/// perturbed by less than `margin` relative to the side lengths. The
/// result characterizes tolerance behavior and is not an assertion.
pub fn stress_near_degenerate(runs: usize, margin: f64, seed: u64) -> Result<CheckReport> {
    let results: Vec<Result<CheckReport>> = (0..runs)
        .into_par_iter()
        .map(|run| {
            let run_seed = mix_seed(seed, run as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
            let half = rng.gen_range(1.0..5.0);
            let height = rng.gen_range(1.0..8.0);
            let wobble = margin * rng.gen_range(-1.0..1.0) * half;
            let a = Point::new(-half, 0.0);
            let b = Point::new(half + wobble, 0.0);
            let apex = Point::new(0.0, height);
            let n = rng.gen_range(3..=6);
            let mut locs = vec![a.clone(), b.clone(), apex.clone()];
            while locs.len() < n {
                locs.push([&a, &b, &apex][rng.gen_range(0..3)].clone());
            }
            let initial = Configuration::new(locs)?;
            if forbidden(&initial) {
                return Ok(CheckReport::default());
            }
            let kind = default_strategies()[rng.gen_range(0..5)].clone();
            let strategy = DemonStrategy {
                kind,
                frames: FramePolicy::default(),
                seed: rng.gen(),
            };
            let k = strategy.kind.declared_k(n).unwrap_or(2 * n);
            let plan = RunPlan::<f64> {
                run,
                seed: run_seed,
                strategy,
                initial,
                horizon: default_horizon(k, n),
                tail: k,
            };
            Ok(plan.check().0)
        })
        .collect();
    let mut report = CheckReport::default();
    for r in results {
        report.merge(r?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn conf(points: &[(i64, i64)]) -> Configuration<Q> {
        Configuration::new(
            points
                .iter()
                .map(|&(x, y)| Point::from_ints(x, y))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn strategies_are_k_fair() {
        let c = conf(&[(0, 0), (4, 0), (1, 3), (7, 7), (2, 9)]);
        for kind in default_strategies() {
            let mut demon = DemonStrategy::new(kind.clone(), 11).demon(5);
            let actions: Vec<DemonicAction<Q>> =
                (1..=60).map(|t| demon.next_action(t, &c)).collect();
            let k = kind.declared_k(5).unwrap();
            assert!(check_k_fair(&actions, k), "{kind:?}");
        }
    }

    #[test]
    fn explicit_script_fairness() {
        assert_eq!(explicit_fairness(&[vec![0], vec![1], vec![2]], 3), Some(3));
        assert_eq!(explicit_fairness(&[vec![1], vec![2]], 3), None);
        assert_eq!(explicit_fairness(&[vec![0, 1, 2]], 3), Some(1));
    }

    #[test]
    fn gen_initial_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let c: Configuration<Q> = gen_initial(3, &mut rng, &InitialSpec::default()).unwrap();
            assert!(!forbidden(&c));
        }
        let spec = InitialSpec {
            pool: Some(2),
            ..InitialSpec::default()
        };
        for _ in 0..50 {
            let c: Configuration<Q> = gen_initial(4, &mut rng, &spec).unwrap();
            assert!(!forbidden(&c));
        }
        let spec = InitialSpec {
            pool: Some(1),
            ..InitialSpec::default()
        };
        let c: Configuration<Q> = gen_initial(6, &mut rng, &spec).unwrap();
        assert!(gathering_point(&c).is_some());
        assert!(gen_initial::<Q, _>(2, &mut rng, &spec).is_err());
    }

    #[test]
    fn gathered_trace_passes() {
        let c = conf(&[(3, 3), (3, 3), (3, 3)]);
        let mut demon = DemonStrategy::new(StrategyKind::AllActive, 0).demon(3);
        let t = execute(&robogram(), &mut demon, c, 5, |_| false).unwrap();
        let report = check_trace(&t);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.moving_rounds, 0);
        assert_eq!(report.rounds_to_gather, vec![0]);
    }

    #[test]
    fn majority_trace_gathers_in_one_round() {
        let c = conf(&[(0, 0), (0, 0), (5, 2)]);
        let mut demon = DemonStrategy::new(StrategyKind::AllActive, 3).demon(3);
        let t = execute(&robogram(), &mut demon, c, 3, |_| false).unwrap();
        let report = check_trace(&t);
        assert!(report.passed(), "{}", report.summary());
        assert_eq!(report.rounds_to_gather, vec![1]);
    }

    #[test]
    fn teleport_breaks_chaining() {
        let c = conf(&[(0, 0), (0, 0), (5, 2), (1, 7)]);
        let mut demon = DemonStrategy::new(StrategyKind::RoundRobin, 3).demon(4);
        let mut t = execute(&robogram(), &mut demon, c, 4, |_| false).unwrap();
        let mut locs = t.steps[1].conf.locations().to_vec();
        locs[3] = Point::from_ints(40, -40);
        t.steps[1].conf = Configuration::new(locs).unwrap();
        let report = check_trace(&t);
        assert!(report.failures(Property::Chaining) > 0);
        assert_eq!(report.counterexample(Property::Chaining).unwrap().round, 2);
    }

    #[test]
    fn clean_general_square_gathers_off_graph() {
        let c = conf(&[(0, 0), (2, 0), (0, 2), (2, 2)]);
        assert_eq!(phase_and_measure(&c).unwrap().0, Phase::Gc);
        let mut demon = DemonStrategy::new(StrategyKind::AllActive, 0).demon(4);
        let t = execute(&robogram(), &mut demon, c, 2, |_| false).unwrap();
        assert_eq!(
            gathering_point(&t.steps[0].conf),
            Some(Point::from_ints(1, 1))
        );
        let report = check_trace(&t);
        assert!(report.passed(), "{}", report.summary());
        assert!(!transition_allowed(Phase::Gc, Phase::Gathered));
        assert_eq!(
            report.off_graph_transitions(),
            vec![((Phase::Gc, Phase::Gathered), 1)]
        );
        assert_eq!(report.phase_witnesses[0].round, 1);
    }

    #[test]
    fn fuzz_is_reproducible() {
        let cfg = FuzzConfig::new(24, 99);
        let a = fuzz::<Q>(&cfg).unwrap().report;
        let b = fuzz::<Q>(&cfg).unwrap().report;
        assert_eq!(a, b);
        assert_eq!(a.runs, 24);
        assert_eq!(a.failures(Property::EventualGathering), 0);
    }

    #[test]
    fn stress_mode_characterizes_without_asserting() {
        let report = stress_near_degenerate(12, 1e-10, 3).unwrap();
        assert!(report.rounds > 0);
    }

    #[test]
    fn equivalence_with_inactive_action() {
        let c = conf(&[(0, 0), (2, 1), (5, 2)]);
        assert!(check_equivalence(&c, &DemonicAction::inactive(3)));
    }

    #[test]
    fn report_merge_accumulates() {
        let mut a = CheckReport::default();
        a.tally(Property::Chaining, true);
        let mut b = CheckReport::default();
        b.tally(Property::Chaining, true);
        b.tally(Property::Fairness, false);
        a.merge(b);
        assert_eq!(a.checked(Property::Chaining), 2);
        assert_eq!(a.failures(Property::Fairness), 1);
        assert!(!a.passed());
    }
}
