//! Line-delimited JSON trace files.
//!
//! A trace file holds one self-contained record per line, in round order,
//! starting with round 0 (the initial configuration, nobody activated).
//! Coordinates are strings: `num/den` on the exact backend and 17
//! significant digits on the floating backend, so replay is lossless.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gather2d::{forbidden, gathering_point, is_clean, phase_and_measure, Measure, Phase};
use crate::geometry::Point;
use crate::model::{
    check_k_fair, spectrum_of, Configuration, DemonicAction, FrameParams, RobotId, Step, Trace,
};
use crate::scalar::{Backend, Rational, Scalar};
use crate::verify::{
    check_trace_with, encode_conf, CheckReport, Counterexample, Property, RunInfo,
};

/// Run provenance carried by the round-0 record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    /// Declared fairness bound of the demon that produced the trace.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl TraceMeta {
    fn is_empty(&self) -> bool {
        *self == TraceMeta::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationRecord {
    pub id: usize,
    pub zoom: String,
    pub c: String,
    pub s: String,
    pub reflect: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: usize,
    pub backend: Backend,
    pub activated: Vec<ActivationRecord>,
    pub locations: Vec<[String; 2]>,
    pub phase: Option<Phase>,
    pub measure: Option<Measure>,
    pub moving: Vec<usize>,
    pub clean: bool,
    pub forbidden: bool,
    pub gathered: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<TraceMeta>,
}

impl TraceRecord {
    fn describe<S: Scalar>(
        round: usize,
        action: Option<&DemonicAction<S>>,
        conf: &Configuration<S>,
        moving: &[RobotId],
    ) -> Self {
        let activated = action
            .map(|da| {
                da.steps
                    .iter()
                    .enumerate()
                    .filter_map(|(id, f)| {
                        f.as_ref().map(|f| ActivationRecord {
                            id,
                            zoom: f.zoom.encode(),
                            c: f.c.encode(),
                            s: f.s.encode(),
                            reflect: f.reflect,
                        })
                    })
                    .collect()
            })
            .unwrap_or_default();
        let pm = phase_and_measure(conf).ok();
        TraceRecord {
            round,
            backend: S::BACKEND,
            activated,
            locations: encode_conf(conf),
            phase: pm.map(|(p, _)| p),
            measure: pm.map(|(_, m)| m),
            moving: moving.iter().map(|id| id.0).collect(),
            clean: is_clean(&spectrum_of(conf)).unwrap_or(false),
            forbidden: forbidden(conf),
            gathered: gathering_point(conf).is_some(),
            meta: None,
        }
    }
}

/// Records describing `trace`, round 0 first.
pub fn to_records<S: Scalar>(trace: &Trace<S>, meta: &TraceMeta) -> Vec<TraceRecord> {
    let mut out = Vec::with_capacity(trace.steps.len() + 1);
    let mut head = TraceRecord::describe::<S>(0, None, &trace.initial, &[]);
    if !meta.is_empty() {
        head.meta = Some(meta.clone());
    }
    out.push(head);
    for step in &trace.steps {
        out.push(TraceRecord::describe(
            step.round,
            Some(&step.action),
            &step.conf,
            &step.moving,
        ));
    }
    out
}

pub fn write_trace<S: Scalar, W: Write>(
    mut w: W,
    trace: &Trace<S>,
    meta: &TraceMeta,
) -> Result<()> {
    for rec in to_records(trace, meta) {
        let line = serde_json::to_string(&rec).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::Parse(format!("write failed: {e}")))?;
    }
    Ok(())
}

fn decode_locations<S: Scalar>(locs: &[[String; 2]]) -> Result<Configuration<S>> {
    let points = locs
        .iter()
        .map(|[x, y]| Ok(Point::new(S::decode(x)?, S::decode(y)?)))
        .collect::<Result<Vec<_>>>()?;
    Configuration::new(points)
}

/// Rebuilds a typed trace. Records must be for backend `S`, start at round
/// 0 and be consecutive.
pub fn from_records<S: Scalar>(records: &[TraceRecord]) -> Result<(Trace<S>, TraceMeta)> {
    let head = records
        .first()
        .ok_or_else(|| Error::Parse("empty trace".into()))?;
    if head.round != 0 {
        return Err(Error::Parse(format!(
            "trace starts at round {}, expected 0",
            head.round
        )));
    }
    let initial: Configuration<S> = decode_locations(&head.locations)?;
    let n = initial.n_robots();
    let mut steps = Vec::with_capacity(records.len() - 1);
    for (i, rec) in records.iter().enumerate() {
        if rec.backend != S::BACKEND {
            return Err(Error::Parse(format!(
                "record {i} is {}, expected {}",
                rec.backend.name(),
                S::BACKEND.name()
            )));
        }
        if rec.round != i {
            return Err(Error::Parse(format!("record {i} has round {}", rec.round)));
        }
        if i == 0 {
            continue;
        }
        let conf: Configuration<S> = decode_locations(&rec.locations)?;
        if conf.n_robots() != n {
            return Err(Error::Parse(format!(
                "round {i} has {} robots, expected {n}",
                conf.n_robots()
            )));
        }
        let mut action = DemonicAction::inactive(n);
        for a in &rec.activated {
            if a.id >= n {
                return Err(Error::Parse(format!(
                    "round {i} activates unknown robot {}",
                    a.id
                )));
            }
            action.steps[a.id] = Some(FrameParams {
                zoom: S::decode(&a.zoom)?,
                c: S::decode(&a.c)?,
                s: S::decode(&a.s)?,
                reflect: a.reflect,
            });
        }
        let moving = rec.moving.iter().map(|&id| RobotId(id)).collect();
        steps.push(Step {
            round: i,
            action,
            conf,
            moving,
        });
    }
    let meta = head.meta.clone().unwrap_or_default();
    Ok((
        Trace {
            initial,
            steps,
            stopped_early: false,
        },
        meta,
    ))
}

/// A parsed trace on whichever backend it was recorded with.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyTrace {
    Exact(Trace<Rational>),
    Floating(Trace<f64>),
}

impl AnyTrace {
    pub fn backend(&self) -> Backend {
        match self {
            AnyTrace::Exact(_) => Backend::Exact,
            AnyTrace::Floating(_) => Backend::Floating,
        }
    }

    /// Number of records (rounds plus the initial one).
    pub fn len(&self) -> usize {
        match self {
            AnyTrace::Exact(t) => t.steps.len() + 1,
            AnyTrace::Floating(t) => t.steps.len() + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check(&self, meta: &TraceMeta) -> CheckReport {
        match self {
            AnyTrace::Exact(t) => check_recorded(t, meta),
            AnyTrace::Floating(t) => check_recorded(t, meta),
        }
    }
}

pub fn parse_records(text: &str) -> Result<Vec<TraceRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn parse_trace(text: &str) -> Result<(AnyTrace, TraceMeta)> {
    let records = parse_records(text)?;
    let head = records
        .first()
        .ok_or_else(|| Error::Parse("empty trace".into()))?;
    match head.backend {
        Backend::Exact => from_records::<Rational>(&records).map(|(t, m)| (AnyTrace::Exact(t), m)),
        Backend::Floating => from_records::<f64>(&records).map(|(t, m)| (AnyTrace::Floating(t), m)),
    }
}

pub fn read_trace<R: BufRead>(mut r: R) -> Result<(AnyTrace, TraceMeta)> {
    let mut text = String::new();
    r.read_to_string(&mut text)
        .map_err(|e| Error::Parse(format!("read failed: {e}")))?;
    parse_trace(&text)
}

/// Per-round checks, plus eventual gathering when the horizon is known and
/// fairness when the demon's bound is known.
pub fn check_recorded<S: Scalar>(trace: &Trace<S>, meta: &TraceMeta) -> CheckReport {
    let info = RunInfo {
        seed: meta.seed.unwrap_or(0),
        run: 0,
    };
    let mut report = check_trace_with(trace, info);
    let whole_run = |property, detail: String| Counterexample {
        property,
        seed: info.seed,
        run: 0,
        round: 0,
        before: encode_conf(&trace.initial),
        after: encode_conf(trace.last()),
        detail,
    };
    if let Some(h) = meta.horizon {
        match report.rounds_to_gather.first().copied() {
            Some(r) if r <= h => report.tally(Property::EventualGathering, true),
            Some(r) => report.fail(whole_run(
                Property::EventualGathering,
                format!("gathered at round {r}, past the horizon {h}"),
            )),
            None => report.fail(whole_run(
                Property::EventualGathering,
                format!("not gathered within horizon {h}"),
            )),
        }
    }
    if let Some(k) = meta.k {
        if check_k_fair(&trace.actions(), k) {
            report.tally(Property::Fairness, true);
        } else {
            report.fail(whole_run(
                Property::Fairness,
                format!("activation stream is not {k}-fair"),
            ));
        }
    }
    report
}
