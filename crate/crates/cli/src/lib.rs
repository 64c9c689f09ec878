//! Subcommands of the `ssync` binary. Each returns a process exit code.

use std::fs;
use std::path::{Path, PathBuf};

use ssync_core::scenario::Scenario;
use ssync_core::trace_io::{parse_trace, write_trace, AnyTrace, TraceMeta};
use ssync_core::verify::{fuzz, FuzzConfig, InitialSpec, Script, StrategyKind};
use ssync_core::{render, Backend, Error, Rational, Scalar, Tolerance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_HORIZON: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

fn input_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_INPUT
}

/// Sets the floating-point tolerance, both absolute and relative.
pub fn install_eps(eps: Option<f64>) -> Result<(), String> {
    if let Some(e) = eps {
        if !(e.is_finite() && e >= 0.0) {
            return Err(format!("bad --eps {e}"));
        }
        Tolerance { abs: e, rel: e }.install();
    }
    Ok(())
}

/// Command-line overrides applied on top of a scenario file.
#[derive(Clone, Debug, Default)]
pub struct RunOverrides {
    pub backend: Option<Backend>,
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub eps: Option<f64>,
    pub allow_forbidden: bool,
}

fn run_typed<S: Scalar>(sc: &Scenario, out: &Path) -> Result<bool, Error> {
    let run = sc.run::<S>()?;
    let file =
        fs::File::create(out).map_err(|e| Error::Parse(format!("{}: {e}", out.display())))?;
    write_trace(std::io::BufWriter::new(file), &run.trace, &run.meta)?;
    let rounds = run.trace.steps.len();
    if run.gathered {
        println!(
            "gathered after {rounds} rounds; trace written to {}",
            out.display()
        );
    } else {
        println!(
            "horizon of {rounds} rounds exhausted without gathering; trace written to {}",
            out.display()
        );
    }
    Ok(run.gathered)
}

pub fn cmd_run(scenario: &Path, out: &Path, ov: &RunOverrides) -> i32 {
    let text = match fs::read_to_string(scenario) {
        Ok(t) => t,
        Err(e) => return input_error(format!("{}: {e}", scenario.display())),
    };
    let mut sc = match Scenario::parse(&text) {
        Ok(sc) => sc,
        Err(e) => return input_error(format!("{}: {e}", scenario.display())),
    };
    if let Some(b) = ov.backend {
        sc.backend = b;
    }
    if let Some(seed) = ov.seed {
        sc.demon.seed = seed;
        if let Some(g) = sc.initial.generator.as_mut() {
            g.seed = seed;
        }
    }
    if ov.horizon.is_some() {
        sc.horizon = ov.horizon;
    }
    if ov.eps.is_some() {
        sc.eps_abs = ov.eps;
        sc.eps_rel = ov.eps;
    }
    sc.allow_forbidden |= ov.allow_forbidden;
    if let Err(e) = sc.validate() {
        return input_error(e);
    }
    sc.install_tolerance();
    let gathered = match sc.backend {
        Backend::Exact => run_typed::<Rational>(&sc, out),
        Backend::Floating => run_typed::<f64>(&sc, out),
    };
    match gathered {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_HORIZON,
        Err(e) => input_error(e),
    }
}

fn load_trace(path: &Path) -> Result<(AnyTrace, TraceMeta), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_trace(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_check(trace: &Path, eps: Option<f64>) -> i32 {
    if let Err(e) = install_eps(eps) {
        return input_error(e);
    }
    let (t, meta) = match load_trace(trace) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let report = t.check(&meta);
    print!("{}", report.summary());
    if report.passed() {
        EXIT_OK
    } else {
        for cx in &report.counterexamples {
            eprintln!(
                "violation: {} at round {}: {}",
                cx.property, cx.round, cx.detail
            );
        }
        EXIT_VIOLATION
    }
}

/// Parameters of `ssync fuzz`.
#[derive(Clone, Debug)]
pub struct FuzzArgs {
    pub runs: usize,
    pub seed: u64,
    pub backend: Backend,
    pub n_min: usize,
    pub n_max: usize,
    pub strategies: Vec<String>,
    pub horizon: Option<usize>,
    pub eps: Option<f64>,
    /// Directory receiving `counterexample.toml` and `counterexample.jsonl`.
    pub out: PathBuf,
}

impl Default for FuzzArgs {
    fn default() -> Self {
        FuzzArgs {
            runs: 1000,
            seed: 0,
            backend: Backend::Exact,
            n_min: 3,
            n_max: 8,
            strategies: Vec::new(),
            horizon: None,
            eps: None,
            out: PathBuf::from("."),
        }
    }
}

/// Strategy names accepted by `--strategies`. `starve0` never activates
/// robot 0 and exists for negative tests.
pub fn parse_strategy(name: &str) -> Result<StrategyKind, String> {
    Ok(match name {
        "round_robin" => StrategyKind::RoundRobin,
        "all_active" => StrategyKind::AllActive,
        "random_k_fair" => StrategyKind::RandomKFair(None),
        "single_mover" => StrategyKind::SingleMover,
        "stall" => StrategyKind::Adversarial(Script::Stall(None)),
        "starve0" => {
            StrategyKind::Adversarial(Script::Explicit(vec![(1..usize::from(u8::MAX)).collect()]))
        }
        other => return Err(format!("unknown strategy `{other}`")),
    })
}

fn fuzz_typed<S: Scalar>(cfg: &FuzzConfig, out: &Path) -> Result<bool, String> {
    let outcome = fuzz::<S>(cfg).map_err(|e| e.to_string())?;
    print!("{}", outcome.report.summary());
    let Some((plan, trace)) = outcome.first_failure else {
        return Ok(true);
    };
    fs::create_dir_all(out).map_err(|e| format!("{}: {e}", out.display()))?;
    let scenario = Scenario::replay(&plan.initial, &plan.strategy, plan.horizon);
    let toml_path = out.join("counterexample.toml");
    let trace_path = out.join("counterexample.jsonl");
    let toml = scenario.to_toml().map_err(|e| e.to_string())?;
    fs::write(&toml_path, toml).map_err(|e| format!("{}: {e}", toml_path.display()))?;
    let n = plan.initial.n_robots();
    let meta = TraceMeta {
        seed: Some(plan.seed),
        strategy: Some(plan.strategy.kind.label()),
        k: plan.strategy.kind.declared_k(n),
        horizon: Some(plan.horizon),
    };
    let file =
        fs::File::create(&trace_path).map_err(|e| format!("{}: {e}", trace_path.display()))?;
    write_trace(std::io::BufWriter::new(file), &trace, &meta).map_err(|e| e.to_string())?;
    eprintln!(
        "counterexample (seed {}, run {}) written to {} and {}",
        plan.seed,
        plan.run,
        toml_path.display(),
        trace_path.display()
    );
    Ok(false)
}

pub fn cmd_fuzz(args: &FuzzArgs) -> i32 {
    if let Err(e) = install_eps(args.eps) {
        return input_error(e);
    }
    if args.n_min < 3 || args.n_max < args.n_min {
        return input_error(format!("bad robot range [{}, {}]", args.n_min, args.n_max));
    }
    let mut cfg = FuzzConfig::new(args.runs, args.seed);
    cfg.n_min = args.n_min;
    cfg.n_max = args.n_max;
    cfg.horizon = args.horizon;
    cfg.initial = InitialSpec::for_backend(args.backend);
    if !args.strategies.is_empty() {
        match args
            .strategies
            .iter()
            .map(|s| parse_strategy(s))
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(s) => cfg.strategies = s,
            Err(e) => return input_error(e),
        }
    }
    let ok = match args.backend {
        Backend::Exact => fuzz_typed::<Rational>(&cfg, &args.out),
        Backend::Floating => fuzz_typed::<f64>(&cfg, &args.out),
    };
    match ok {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VIOLATION,
        Err(e) => input_error(e),
    }
}

pub fn cmd_render(trace: &Path, out: &Path) -> i32 {
    let (t, _) = match load_trace(trace) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let svg = match &t {
        AnyTrace::Exact(t) => render::render_svg(t),
        AnyTrace::Floating(t) => render::render_svg(t),
    };
    match fs::write(out, svg) {
        Ok(()) => {
            println!("{} panels written to {}", t.len(), out.display());
            EXIT_OK
        }
        Err(e) => input_error(format!("{}: {e}", out.display())),
    }
}
