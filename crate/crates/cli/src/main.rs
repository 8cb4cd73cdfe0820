//! `dbio`: plan, validate or size a microgrid from a scenario file.
//!
//! Progress goes to stderr (set `RUST_LOG` to change the level); results go
//! only to files in the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use dbio_core::model::{DispatchSolution, InvestmentDecision, SizePins};
use dbio_core::report::{emit_reports, ReportBundle};
use dbio_core::scenario::load_scenario;
use dbio_core::sizing::{size_storage, SearchConfig, SearchMethod};
use dbio_core::validation::validate;
use dbio_core::PlanningContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    /// Integrated multi-year sizing without degradation feedback.
    Plan,
    /// Year-by-year validation of a given investment.
    Validate,
    /// Plan, then grow the storage until validation is shed-free.
    Size,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Method {
    Binary,
    Fixed,
}

#[derive(Debug, Parser)]
#[command(name = "dbio", version, about)]
struct Args {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Size)]
    mode: Mode,
    /// Investment JSON (`s_pv`, `s_bess`, `p_cder_max`), a report.json, or
    /// the output directory of an earlier run.
    #[arg(long)]
    investment: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Binary)]
    method: Method,
    /// Search tolerance in MWh.
    #[arg(long)]
    tol: Option<f64>,
    /// Relative step of the fixed-step search.
    #[arg(long)]
    step: Option<f64>,
    /// Probe budget of the search.
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    mip_gap: Option<f64>,
    /// Solver time limit per solve, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Write every model as an LP file under `<out>/lp/`.
    #[arg(long)]
    dump_lp: bool,
    #[arg(long)]
    no_cyclic_soc: bool,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Running,
    Converged,
    NotConverged,
    Failed,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    mode: Mode,
    scenario: &'a Path,
    out: &'a Path,
    investment: Option<&'a Path>,
    solver: SolverOverrides,
    search: Option<SearchConfig>,
    timestamp: String,
    tool_version: &'static str,
    status: Status,
    error: Option<String>,
    files: Vec<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SolverOverrides {
    backend: Option<String>,
    mip_gap: Option<f64>,
    time_limit_s: Option<f64>,
    dump_lp: bool,
    cyclic_soc: bool,
}

impl<'a> Manifest<'a> {
    fn new(args: &'a Args) -> Self {
        Self {
            mode: args.mode,
            scenario: &args.scenario,
            out: &args.out,
            investment: args.investment.as_deref(),
            solver: SolverOverrides {
                backend: std::env::var(dbio_milp::SOLVER_ENV).ok(),
                mip_gap: args.mip_gap,
                time_limit_s: args.time_limit,
                dump_lp: args.dump_lp,
                cyclic_soc: !args.no_cyclic_soc,
            },
            search: None,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            tool_version: env!("CARGO_PKG_VERSION"),
            status: Status::Running,
            error: None,
            files: Vec::new(),
        }
    }

    fn write(&self) -> Result<PathBuf> {
        fs::create_dir_all(self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join("manifest.json");
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn search_config(args: &Args) -> Result<SearchConfig> {
    let mut cfg = SearchConfig {
        method: match args.method {
            Method::Binary => SearchMethod::Binary,
            Method::Fixed => SearchMethod::FixedStep,
        },
        ..SearchConfig::default()
    };
    if let Some(t) = args.tol {
        cfg.tolerance = t;
    }
    if let Some(s) = args.step {
        cfg.step_frac = s;
    }
    if let Some(n) = args.max_iterations {
        cfg.max_iterations = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn context(args: &Args) -> Result<PlanningContext> {
    let mut scenario = load_scenario(&args.scenario)?;
    if let Some(g) = args.mip_gap {
        scenario.solver.mip_gap = g;
    }
    if let Some(t) = args.time_limit {
        scenario.solver.time_limit_s = t;
    }
    if args.no_cyclic_soc {
        scenario.config.cyclic_soc = false;
    }
    let mut ctx = PlanningContext::with_env_backend(scenario)?;
    if args.dump_lp {
        ctx.dump_lp_dir = Some(args.out.join("lp"));
    }
    Ok(ctx)
}

/// Reads an investment from a bare decision, any JSON with an `investment`
/// key, or a directory holding such a `report.json`.
fn read_investment(path: &Path) -> Result<InvestmentDecision> {
    let file = if path.is_dir() {
        path.join("report.json")
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    let inner = match value.get("investment") {
        Some(v) if !v.is_null() => v.clone(),
        _ => value,
    };
    let inv: InvestmentDecision = serde_json::from_value(inner)
        .with_context(|| format!("{} holds no investment decision", file.display()))?;
    inv.validate()?;
    Ok(inv)
}

fn run(args: &Args, manifest: &mut Manifest) -> Result<Status> {
    let ctx = context(args)?;
    let mut status = Status::Converged;
    let files = match args.mode {
        Mode::Plan => {
            let plan = ctx.solve_integrated(SizePins::default())?;
            emit(&args.out, Some(&plan), None, None)?
        }
        Mode::Validate => {
            let Some(path) = &args.investment else {
                bail!("validate mode needs --investment");
            };
            let inv = read_investment(path)?;
            let report = validate(&ctx, inv)?;
            log::info!(
                "total EUE {:.6} MWh, {}",
                report.total_eue,
                if report.shed_free() {
                    "shed-free"
                } else {
                    "sheds"
                }
            );
            emit(&args.out, None, Some(&report), None)?
        }
        Mode::Size => {
            let cfg = search_config(args)?;
            manifest.search = Some(cfg);
            let plan = ctx.solve_integrated(SizePins::default())?;
            let initial = plan.investment.s_bess;
            log::info!("initial storage {initial:.6} MWh");
            let outcome = size_storage(&ctx, initial, &cfg, &mut |it| {
                log::info!(
                    "iteration {} ({}): {:.6} MWh {}",
                    it.index,
                    it.phase,
                    it.candidate_size,
                    if it.shed { "sheds" } else { "shed-free" }
                );
            })?;
            if !outcome.result.converged {
                status = Status::NotConverged;
            }
            let final_plan = outcome.plan.as_ref().unwrap_or(&plan);
            emit(
                &args.out,
                Some(final_plan),
                outcome.validation.as_ref(),
                Some(&outcome.result),
            )?
        }
    };
    manifest.files = files;
    Ok(status)
}

fn emit(
    out: &Path,
    plan: Option<&DispatchSolution>,
    validation: Option<&dbio_core::validation::ValidationReport>,
    sizing: Option<&dbio_core::sizing::SizingResult>,
) -> Result<Vec<PathBuf>> {
    let bundle = ReportBundle {
        plan,
        validation,
        sizing,
    };
    Ok(emit_reports(&bundle, out)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let args = Args::parse();
    let mut manifest = Manifest::new(&args);

    let result = run(&args, &mut manifest);
    let code = match &result {
        Ok(Status::Converged) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(_) => ExitCode::FAILURE,
    };
    manifest.status = match result {
        Ok(s) => s,
        Err(e) => {
            log::error!("{e:#}");
            manifest.error = Some(format!("{e:#}"));
            Status::Failed
        }
    };
    if let Err(e) = manifest.write() {
        log::error!("could not write manifest: {e:#}");
        return ExitCode::FAILURE;
    }
    code
}
