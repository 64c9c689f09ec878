//! TOML scenario files: what to simulate, on which backend, against which demon.
//!
//! ```toml
//! backend = "exact"            # or "floating"
//! horizon = 120                # optional; default k * 7 * (n + 1)
//! eps_abs = 1e-9               # floating backend only
//! eps_rel = 1e-9
//! allow_forbidden = false      # negative tests only
//!
//! [initial]
//! points = [["0", "0"], ["0", "0"], ["3/2", 4]]
//! # or: generator = { n_robots = 6, bbox = 10, seed = 7 }
//!
//! [demon]
//! kind = "random_k_fair"       # round_robin | all_active | random_k_fair
//!                              # | single_mover | stall | explicit
//! k = 8
//! seed = 1
//! zoom_min = 0.1
//! zoom_max = 10.0
//! reflect_prob = 0.5
//! script = [[0, 1], [2]]       # explicit only
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gather2d::{forbidden, gathering_point, robogram};
use crate::geometry::Point;
use crate::model::{execute, Configuration, Trace, MIN_ROBOTS};
use crate::scalar::{Backend, Scalar, Tolerance};
use crate::trace_io::TraceMeta;
use crate::verify::{
    default_horizon, gen_initial, DemonStrategy, FramePolicy, InitialSpec, Script, StrategyKind,
};

/// A coordinate as written in a scenario: a TOML number or a string such
/// as `"-7/3"` or `"0.125"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Coord {
    pub fn to_scalar<S: Scalar>(&self) -> Result<S> {
        match self {
            Coord::Int(v) => Ok(S::from_i64(*v)),
            Coord::Float(v) if v.is_finite() => S::decode(&v.to_string()),
            Coord::Float(v) => Err(Error::Parse(format!("non-finite coordinate {v}"))),
            Coord::Text(t) => S::decode(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub n_robots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, flatten)]
    pub spec: InitialSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[Coord; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Generator>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemonKind {
    RoundRobin,
    AllActive,
    RandomKFair,
    SingleMover,
    Stall,
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemonSpec {
    pub kind: DemonKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<Vec<Vec<usize>>>,
    #[serde(default, flatten)]
    pub frames: FramePolicy,
}

impl Default for DemonSpec {
    fn default() -> Self {
        DemonSpec {
            kind: DemonKind::RoundRobin,
            k: None,
            seed: 0,
            script: None,
            frames: FramePolicy::default(),
        }
    }
}

impl DemonSpec {
    pub fn strategy(&self) -> Result<DemonStrategy> {
        let kind = match self.kind {
            DemonKind::RoundRobin => StrategyKind::RoundRobin,
            DemonKind::AllActive => StrategyKind::AllActive,
            DemonKind::RandomKFair => StrategyKind::RandomKFair(self.k),
            DemonKind::SingleMover => StrategyKind::SingleMover,
            DemonKind::Stall => StrategyKind::Adversarial(Script::Stall(self.k)),
            DemonKind::Explicit => match &self.script {
                Some(sets) if !sets.is_empty() => {
                    StrategyKind::Adversarial(Script::Explicit(sets.clone()))
                }
                _ => {
                    return Err(Error::Parse(
                        "explicit demon needs a non-empty `script`".into(),
                    ))
                }
            },
        };
        let f = &self.frames;
        if !(f.zoom_min > 0.0 && f.zoom_min <= f.zoom_max && f.zoom_max.is_finite()) {
            return Err(Error::Parse(format!(
                "bad zoom range [{}, {}]",
                f.zoom_min, f.zoom_max
            )));
        }
        if !(0.0..=1.0).contains(&f.reflect_prob) {
            return Err(Error::Parse(format!(
                "reflect_prob {} outside [0, 1]",
                f.reflect_prob
            )));
        }
        Ok(DemonStrategy {
            kind,
            frames: self.frames.clone(),
            seed: self.seed,
        })
    }

    /// Inverse of [`DemonSpec::strategy`].
    pub fn from_strategy(s: &DemonStrategy) -> Self {
        let (kind, k, script) = match &s.kind {
            StrategyKind::RoundRobin => (DemonKind::RoundRobin, None, None),
            StrategyKind::AllActive => (DemonKind::AllActive, None, None),
            StrategyKind::RandomKFair(k) => (DemonKind::RandomKFair, *k, None),
            StrategyKind::SingleMover => (DemonKind::SingleMover, None, None),
            StrategyKind::Adversarial(Script::Stall(k)) => (DemonKind::Stall, *k, None),
            StrategyKind::Adversarial(Script::Explicit(sets)) => {
                (DemonKind::Explicit, None, Some(sets.clone()))
            }
        };
        DemonSpec {
            kind,
            k,
            seed: s.seed,
            script,
            frames: s.frames.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_rel: Option<f64>,
    #[serde(default)]
    pub allow_forbidden: bool,
    pub initial: Initial,
    #[serde(default)]
    pub demon: DemonSpec,
}

/// Outcome of simulating a scenario.
#[derive(Clone, Debug)]
pub struct ScenarioRun<S> {
    pub trace: Trace<S>,
    pub meta: TraceMeta,
    pub gathered: bool,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn n_robots(&self) -> Result<usize> {
        match (&self.initial.points, &self.initial.generator) {
            (Some(p), None) => Ok(p.len()),
            (None, Some(g)) => Ok(g.n_robots),
            (Some(_), Some(_)) => Err(Error::Parse(
                "give either `initial.points` or `initial.generator`, not both".into(),
            )),
            (None, None) => Err(Error::Parse(
                "missing `initial.points` or `initial.generator`".into(),
            )),
        }
    }

    /// Structural checks that do not depend on the backend. Forbidden
    /// starts are rejected later, by [`Scenario::initial`].
    pub fn validate(&self) -> Result<()> {
        let n = self.n_robots()?;
        if n < MIN_ROBOTS {
            return Err(Error::TooFewRobots(n));
        }
        for eps in [self.eps_abs, self.eps_rel].into_iter().flatten() {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::Parse(format!("bad tolerance {eps}")));
            }
        }
        if let Some(g) = &self.initial.generator {
            if g.spec.bbox <= 0 || g.spec.resolution <= 0 {
                return Err(Error::Parse(
                    "generator bbox and resolution must be positive".into(),
                ));
            }
        }
        self.demon.strategy()?;
        Ok(())
    }

    /// Installs the scenario's floating-point tolerance, if any.
    pub fn install_tolerance(&self) {
        if self.eps_abs.is_some() || self.eps_rel.is_some() {
            let d = Tolerance::default();
            Tolerance {
                abs: self.eps_abs.unwrap_or(d.abs),
                rel: self.eps_rel.unwrap_or(d.rel),
            }
            .install();
        }
    }

    pub fn initial<S: Scalar>(&self) -> Result<Configuration<S>> {
        let conf = match (&self.initial.points, &self.initial.generator) {
            (Some(points), None) => {
                let pts = points
                    .iter()
                    .map(|[x, y]| Ok(Point::new(x.to_scalar()?, y.to_scalar()?)))
                    .collect::<Result<Vec<_>>>()?;
                Configuration::new(pts)?
            }
            (None, Some(g)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
                gen_initial(g.n_robots, &mut rng, &g.spec)?
            }
            _ => {
                return Err(Error::Parse(
                    "initial configuration must be given exactly once".into(),
                ))
            }
        };
        if forbidden(&conf) && !self.allow_forbidden {
            return Err(Error::Parse(
                "initial configuration is bivalent (set allow_forbidden to override)".into(),
            ));
        }
        Ok(conf)
    }

    /// Fairness bound of the demon for `n` robots, if it has one.
    pub fn declared_k(&self, n: usize) -> Result<Option<usize>> {
        Ok(self.demon.strategy()?.kind.declared_k(n))
    }

    pub fn horizon_for(&self, n: usize) -> Result<usize> {
        match self.horizon {
            Some(h) => Ok(h),
            None => Ok(default_horizon(self.declared_k(n)?.unwrap_or(2 * n), n)),
        }
    }

    /// Simulates until gathered or the horizon is exhausted.
    pub fn run<S: Scalar>(&self) -> Result<ScenarioRun<S>> {
        let conf: Configuration<S> = self.initial()?;
        let n = conf.n_robots();
        let strategy = self.demon.strategy()?;
        let horizon = self.horizon_for(n)?;
        let mut demon = strategy.demon(n);
        let trace = execute(&robogram(), &mut demon, conf, horizon, |c| {
            gathering_point(c).is_some()
        })?;
        let gathered = gathering_point(trace.last()).is_some();
        let meta = TraceMeta {
            seed: Some(strategy.seed),
            strategy: Some(strategy.kind.label()),
            k: strategy.kind.declared_k(n),
            horizon: Some(horizon),
        };
        Ok(ScenarioRun {
            trace,
            meta,
            gathered,
        })
    }

    /// A scenario replaying `initial` under `strategy` with explicit coordinates.
    pub fn replay<S: Scalar>(
        initial: &Configuration<S>,
        strategy: &DemonStrategy,
        horizon: usize,
    ) -> Self {
        let points = initial
            .locations()
            .iter()
            .map(|p| [Coord::Text(p.x.encode()), Coord::Text(p.y.encode())])
            .collect();
        let tol = Tolerance::current();
        let floating = S::BACKEND == Backend::Floating;
        Scenario {
            backend: S::BACKEND,
            horizon: Some(horizon),
            eps_abs: floating.then_some(tol.abs),
            eps_rel: floating.then_some(tol.rel),
            allow_forbidden: forbidden(initial),
            initial: Initial {
                points: Some(points),
                generator: None,
            },
            demon: DemonSpec::from_strategy(strategy),
        }
    }
}
