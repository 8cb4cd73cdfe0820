//! Storage sizing: grow the battery until the validated horizon is shed-free.
//!
//! The search logic is generic over a probe closure so it can run against
//! cheap synthetic verdicts as well as full plan-and-validate probes.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::PlanningContext;
use crate::model::{DispatchSolution, SizePins};
use crate::validation::{validate, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    Binary,
    FixedStep,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMethod::Binary => "binary",
            SearchMethod::FixedStep => "fixed_step",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub method: SearchMethod,
    /// Bisection stops once `ub - lb` is below this, in MWh.
    pub tolerance: f64,
    /// Relative growth per fixed step.
    pub step_frac: f64,
    pub max_iterations: usize,
    /// Growth factor applied while the candidate still sheds.
    pub ub_seed_factor: f64,
    /// Give up once the candidate exceeds this multiple of the start size.
    pub max_growth: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            method: SearchMethod::Binary,
            tolerance: 0.01,
            step_frac: 0.01,
            max_iterations: 1000,
            ub_seed_factor: 2.0,
            max_growth: 1024.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.into()));
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be > 0");
        }
        if !(self.step_frac > 0.0 && self.step_frac.is_finite()) {
            return bad("step fraction must be > 0");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be >= 1");
        }
        if !(self.ub_seed_factor > 1.0) {
            return bad("upper-bound seed factor must exceed 1");
        }
        if !(self.max_growth >= 1.0) {
            return bad("growth cap must be >= 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Doubling,
    Bisection,
    Stepping,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Doubling => "doubling",
            Phase::Bisection => "bisection",
            Phase::Stepping => "stepping",
        })
    }
}

/// Verdict of one probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOutcome {
    pub objective: f64,
    pub total_eue: f64,
    pub shed: bool,
}

/// One probe, with the bracket as it stands after the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub index: usize,
    pub phase: Phase,
    pub candidate_size: f64,
    pub objective: f64,
    pub total_eue: f64,
    pub shed: bool,
    pub lb: f64,
    /// `None` until a shed-free size is known.
    pub ub: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingResult {
    pub method: SearchMethod,
    pub initial_size: f64,
    /// Smallest probed size verified shed-free (the initial size when the
    /// search did not converge and nothing shed-free was found).
    pub final_size: f64,
    pub final_objective: f64,
    /// Centre of the last bracket; only informative for bisection.
    pub final_midpoint: Option<f64>,
    pub iterations: Vec<IterationRecord>,
    pub doubling_count: usize,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum SearchError<E: std::error::Error + 'static = crate::Error> {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "load still sheds at {size:.6} MWh ({factor}x the start size); storage cannot cure the shortfall"
    )]
    Unservable { size: f64, factor: f64 },
    #[error("probe at {size:.6} MWh failed: {source}")]
    Probe {
        size: f64,
        #[source]
        source: E,
    },
}

struct Log<'a, F> {
    probe: F,
    records: Vec<IterationRecord>,
    sink: &'a mut dyn FnMut(&IterationRecord),
}

impl<F, E> Log<'_, F>
where
    F: FnMut(f64) -> Result<ProbeOutcome, E>,
    E: std::error::Error + 'static,
{
    fn run(&mut self, size: f64) -> Result<ProbeOutcome, SearchError<E>> {
        (self.probe)(size).map_err(|source| SearchError::Probe { size, source })
    }

    fn push(&mut self, phase: Phase, size: f64, out: ProbeOutcome, lb: f64, ub: Option<f64>) {
        let rec = IterationRecord {
            index: self.records.len() + 1,
            phase,
            candidate_size: size,
            objective: out.objective,
            total_eue: out.total_eue,
            shed: out.shed,
            lb,
            ub,
        };
        (self.sink)(&rec);
        self.records.push(rec);
    }
}

/// Grow-then-bisect search. The start size is probed first; while it sheds
/// the size is multiplied by `ub_seed_factor`, the last shedding size
/// becoming the lower bound. The bracket is then halved until narrower than
/// the tolerance, and its upper end returned.
pub fn search_binary<F, E>(
    initial: f64,
    cfg: &SearchConfig,
    probe: F,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<SizingResult, SearchError<E>>
where
    F: FnMut(f64) -> Result<ProbeOutcome, E>,
    E: std::error::Error + 'static,
{
    cfg.validate().map_err(retype)?;
    let mut log = Log {
        probe,
        records: Vec::new(),
        sink: on_iteration,
    };
    let base = initial.max(cfg.tolerance);
    let mut lb = 0.0;
    let mut size = initial;
    let mut doublings = 0;
    let (mut ub, mut ub_objective) = loop {
        let out = log.run(size)?;
        if !out.shed {
            log.push(Phase::Doubling, size, out, lb, Some(size));
            break (size, out.objective);
        }
        lb = size;
        log.push(Phase::Doubling, size, out, lb, None);
        if log.records.len() >= cfg.max_iterations {
            return Ok(unfinished(
                SearchMethod::Binary,
                initial,
                log.records,
                doublings,
                lb,
                None,
            ));
        }
        let next = (size * cfg.ub_seed_factor).max(cfg.tolerance);
        if next > cfg.max_growth * base {
            return Err(SearchError::Unservable {
                size,
                factor: cfg.max_growth,
            });
        }
        size = next;
        doublings += 1;
    };

    while ub - lb >= cfg.tolerance {
        if log.records.len() >= cfg.max_iterations {
            return Ok(unfinished(
                SearchMethod::Binary,
                initial,
                log.records,
                doublings,
                lb,
                Some((ub, ub_objective)),
            ));
        }
        let mid = 0.5 * (lb + ub);
        let out = log.run(mid)?;
        if out.shed {
            lb = mid;
        } else {
            ub = mid;
            ub_objective = out.objective;
        }
        log.push(Phase::Bisection, mid, out, lb, Some(ub));
    }

    Ok(SizingResult {
        method: SearchMethod::Binary,
        initial_size: initial,
        final_size: ub,
        final_objective: ub_objective,
        final_midpoint: Some(0.5 * (lb + ub)),
        iterations: log.records,
        doubling_count: doublings,
        converged: true,
    })
}

/// Geometric stepping: probes `initial · (1 + step)^k` for k = 0, 1, ...
/// and stops at the first shed-free size. A zero start steps from the
/// tolerance instead.
pub fn search_fixed_step<F, E>(
    initial: f64,
    cfg: &SearchConfig,
    probe: F,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<SizingResult, SearchError<E>>
where
    F: FnMut(f64) -> Result<ProbeOutcome, E>,
    E: std::error::Error + 'static,
{
    cfg.validate().map_err(retype)?;
    let mut log = Log {
        probe,
        records: Vec::new(),
        sink: on_iteration,
    };
    let base = if initial > 0.0 {
        initial
    } else {
        cfg.tolerance
    };
    let mut lb = 0.0;
    for k in 0..cfg.max_iterations {
        let size = if k == 0 {
            initial
        } else {
            base * (1.0 + cfg.step_frac).powi(k as i32)
        };
        if size > cfg.max_growth * base {
            return Err(SearchError::Unservable {
                size,
                factor: cfg.max_growth,
            });
        }
        let out = log.run(size)?;
        if out.shed {
            lb = size;
            log.push(Phase::Stepping, size, out, lb, None);
        } else {
            log.push(Phase::Stepping, size, out, lb, Some(size));
            return Ok(SizingResult {
                method: SearchMethod::FixedStep,
                initial_size: initial,
                final_size: size,
                final_objective: out.objective,
                final_midpoint: None,
                iterations: log.records,
                doubling_count: 0,
                converged: true,
            });
        }
    }
    Ok(unfinished(
        SearchMethod::FixedStep,
        initial,
        log.records,
        0,
        lb,
        None,
    ))
}

fn retype<E: std::error::Error + 'static>(e: SearchError) -> SearchError<E> {
    match e {
        SearchError::InvalidConfig(m) => SearchError::InvalidConfig(m),
        _ => unreachable!("only configuration errors are retyped"),
    }
}

fn unfinished(
    method: SearchMethod,
    initial: f64,
    iterations: Vec<IterationRecord>,
    doubling_count: usize,
    lb: f64,
    ub: Option<(f64, f64)>,
) -> SizingResult {
    let (final_size, final_objective) = ub.unwrap_or((initial, f64::NAN));
    SizingResult {
        method,
        initial_size: initial,
        final_size,
        final_objective,
        final_midpoint: ub.map(|(u, _)| 0.5 * (lb + u)),
        iterations,
        doubling_count,
        converged: false,
    }
}

/// Artifacts of a full sizing run: the search log plus the plan and
/// validation at the returned size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingOutcome {
    pub result: SizingResult,
    pub plan: Option<DispatchSolution>,
    pub validation: Option<ValidationReport>,
}

/// Plans and validates at one storage size: the integrated model is
/// re-solved with the battery pinned (PV and generator re-optimized),
/// then the resulting investment is validated year by year.
pub fn probe_size(
    ctx: &PlanningContext,
    size: f64,
) -> Result<(DispatchSolution, ValidationReport), crate::Error> {
    let plan = ctx.solve_integrated(SizePins {
        bess: Some(size),
        ..SizePins::default()
    })?;
    let report = validate(ctx, plan.investment)?;
    Ok((plan, report))
}

/// Runs the configured search from `initial` MWh using full probes.
pub fn size_storage(
    ctx: &PlanningContext,
    initial: f64,
    cfg: &SearchConfig,
    on_iteration: &mut dyn FnMut(&IterationRecord),
) -> Result<SizingOutcome, SearchError> {
    let mut best: Option<(f64, DispatchSolution, ValidationReport)> = None;
    let probe = |size: f64| -> Result<ProbeOutcome, crate::Error> {
        let (plan, report) = probe_size(ctx, size)?;
        let shed = !report.shed_free();
        let out = ProbeOutcome {
            objective: plan.objective,
            total_eue: report.total_eue,
            shed,
        };
        log::info!(
            "probe {size:.6} MWh: objective {:.2}, EUE {:.6} MWh, {}",
            out.objective,
            out.total_eue,
            if shed { "sheds" } else { "shed-free" }
        );
        if !shed && best.as_ref().is_none_or(|b| size <= b.0) {
            best = Some((size, plan, report));
        }
        Ok(out)
    };
    let result = match cfg.method {
        SearchMethod::Binary => search_binary(initial, cfg, probe, on_iteration)?,
        SearchMethod::FixedStep => search_fixed_step(initial, cfg, probe, on_iteration)?,
    };
    let (plan, validation) = match best {
        Some((size, plan, report)) if size == result.final_size => (Some(plan), Some(report)),
        _ => (None, None),
    };
    Ok(SizingOutcome {
        result,
        plan,
        validation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Error)]
    #[error("never")]
    struct Never;

    fn threshold(s_star: f64) -> impl FnMut(f64) -> Result<ProbeOutcome, Never> {
        move |s| {
            Ok(ProbeOutcome {
                objective: s,
                total_eue: (s_star - s).max(0.0),
                shed: s < s_star,
            })
        }
    }

    #[test]
    fn binary_brackets_the_threshold() {
        let cfg = SearchConfig::default();
        let r = search_binary(1.0, &cfg, threshold(2.7), &mut |_| {}).unwrap();
        assert!(r.converged);
        assert!(r.final_size >= 2.7 && r.final_size < 2.7 + cfg.tolerance);
        assert_eq!(r.doubling_count, 2);
        assert!(!r.iterations.last().unwrap().shed || r.iterations.iter().any(|i| !i.shed));
    }

    #[test]
    fn shed_free_start_bisects_down() {
        let cfg = SearchConfig {
            tolerance: 1.0,
            ..SearchConfig::default()
        };
        let r = search_binary(0.8, &cfg, threshold(0.1), &mut |_| {}).unwrap();
        assert_eq!(r.doubling_count, 0);
        assert!(r.final_size <= 0.8);
        assert_eq!(r.iterations.len(), 1);
    }

    #[test]
    fn fixed_step_counts() {
        let cfg = SearchConfig {
            method: SearchMethod::FixedStep,
            ..SearchConfig::default()
        };
        let r = search_fixed_step(1.0, &cfg, threshold(1.5), &mut |_| {}).unwrap();
        let k = (1.5f64.ln() / 1.01f64.ln()).ceil() as usize;
        assert_eq!(r.iterations.len(), k + 1);
        assert!(r.final_size >= 1.5 && r.final_size < 1.5 * 1.01);
        let r = search_fixed_step(2.0, &cfg, threshold(1.5), &mut |_| {}).unwrap();
        assert_eq!(r.iterations.len(), 1);
        assert_eq!(r.final_size, 2.0);
    }

    #[test]
    fn unservable_load_is_reported() {
        let never = |_s: f64| -> Result<ProbeOutcome, Never> {
            Ok(ProbeOutcome {
                objective: 0.0,
                total_eue: 1.0,
                shed: true,
            })
        };
        let err = search_binary(1.0, &SearchConfig::default(), never, &mut |_| {}).unwrap_err();
        assert!(matches!(err, SearchError::Unservable { .. }));
    }

    #[test]
    fn iteration_cap_leaves_search_unconverged() {
        let cfg = SearchConfig {
            max_iterations: 3,
            tolerance: 1e-6,
            ..SearchConfig::default()
        };
        let r = search_binary(1.0, &cfg, threshold(1.3), &mut |_| {}).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations.len(), 3);
        assert_eq!(r.final_size, 1.5);
    }

    #[test]
    fn invalid_config() {
        let cfg = SearchConfig {
            tolerance: 0.0,
            ..SearchConfig::default()
        };
        assert!(matches!(
            search_binary(1.0, &cfg, threshold(1.0), &mut |_| {}),
            Err(SearchError::InvalidConfig(_))
        ));
    }
}
