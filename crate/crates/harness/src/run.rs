//! Executes one [`ExperimentConfig`].

use std::path::Path;

use hessdamp_core::algorithms::{
    fista_run, igahd_run, igahd_sc_run, ipahd_run, ipahd_sc_run, IGAHDConfig, IPAHDConfig, MetricEnvelope, SCConfig,
    ScVariant, Schedule, Trace,
};
use hessdamp_core::dynamics::{integrate, Coefficient, DampedSystemSpec};
use hessdamp_core::problem::{make_quadratic, make_quadratic_in_basis, SmoothConvexProblem};
use hessdamp_core::{Matrix, Vector};
use serde::Serialize;

use crate::config::{AlgorithmSpec, CoefficientSpec, ExperimentConfig, Horizon, OutputKind, ProblemSpec};
use crate::error::{HarnessError, Result};
use crate::instances::{self, Reference, RlsInstance};
use crate::output::{emit_csv, emit_svg, write_file, Axes, Series};
use crate::rate::{above_floor, oscillation_count, rate_fit, RateMode, RateReport};

pub enum BuiltProblem {
    Smooth(SmoothConvexProblem),
    Rls(Box<RlsInstance>),
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub name: String,
    pub problem: String,
    pub algorithm: String,
    pub points: usize,
    pub final_gap: f64,
    pub rate: Option<RateReport>,
    /// Why the rate fit was not possible, when it was not.
    pub rate_error: Option<String>,
    pub oscillation_count: usize,
    pub reference: Option<Reference>,
    pub unchecked: bool,
    pub log: Vec<String>,
}

pub struct RunOutcome {
    pub series: Series,
    pub report: RunReport,
}

pub fn build_problem(spec: &ProblemSpec, seed: u64) -> Result<BuiltProblem> {
    Ok(match spec {
        ProblemSpec::Quadratic { eigenvalues, basis, shift } => {
            let n = eigenvalues.len();
            let shift = match shift {
                Some(s) if s.len() != n => return Err(HarnessError::Config(format!("shift has {} entries, expected {n}", s.len()))),
                Some(s) => Vector::from_column_slice(s),
                None => Vector::zeros(n),
            };
            let p = match basis {
                None => make_quadratic(eigenvalues, &shift)?,
                Some(rows) => {
                    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                        return Err(HarnessError::Config(format!("basis must be {n}×{n}")));
                    }
                    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                    make_quadratic_in_basis(eigenvalues, &Matrix::from_row_slice(n, n, &flat), &shift)?
                }
            };
            BuiltProblem::Smooth(p)
        }
        ProblemSpec::Lasso { m, n, sparsity, weight } => BuiltProblem::Rls(Box::new(instances::lasso(*m, *n, *sparsity, *weight, seed)?)),
        ProblemSpec::GroupLasso { m, n, group_size, active_groups, weight } => {
            BuiltProblem::Rls(Box::new(instances::group_lasso(*m, *n, *group_size, *active_groups, *weight, seed)?))
        }
        ProblemSpec::TvDenoise { n, jumps, weight } => BuiltProblem::Rls(Box::new(instances::tv_denoise(*n, *jumps, *weight, seed)?)),
        ProblemSpec::Nuclear { size, rank, measurements, weight } => {
            BuiltProblem::Rls(Box::new(instances::nuclear(*size, *rank, *measurements, *weight, seed)?))
        }
    })
}

fn coefficient(c: &CoefficientSpec) -> Coefficient {
    match *c {
        CoefficientSpec::Const(v) => Coefficient::Const(v),
        CoefficientSpec::Power { coef, exp } => Coefficient::Power { coef, exp },
        CoefficientSpec::ConstPlusInv { c, d } => Coefficient::ConstPlusInv { c, d },
    }
}

fn start(given: &Option<Vec<f64>>, n: usize, default: f64) -> Result<Vector> {
    match given {
        Some(v) if v.len() != n => Err(HarnessError::Config(format!("start point has {} entries, expected {n}", v.len()))),
        Some(v) => Ok(Vector::from_column_slice(v)),
        None => Ok(Vector::from_element(n, default)),
    }
}

fn smooth(built: &BuiltProblem) -> Result<&SmoothConvexProblem> {
    match built {
        BuiltProblem::Smooth(p) => Ok(p),
        BuiltProblem::Rls(_) => Err(HarnessError::Config("this algorithm needs a smooth problem".into())),
    }
}

fn step_size(s: Option<f64>, built: &BuiltProblem) -> Result<f64> {
    match (s, built) {
        (Some(s), _) => Ok(s),
        (None, BuiltProblem::Rls(_)) => Ok(1.0),
        (None, BuiltProblem::Smooth(p)) => p
            .lipschitz()
            .map(|l| 1.0 / l)
            .ok_or_else(|| HarnessError::Config("no step size given and no Lipschitz constant known".into())),
    }
}

/// Hypothesis checks only; nothing is run.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    let built = build_problem(&cfg.problem, cfg.seed)?;
    let lipschitz = match &built {
        BuiltProblem::Smooth(p) => p.lipschitz(),
        BuiltProblem::Rls(_) => Some(1.0),
    };
    match &cfg.algorithm {
        AlgorithmSpec::Igahd { alpha, beta, s, .. } => IGAHDConfig::new(*alpha, *beta, step_size(*s, &built)?, 1).validate(lipschitz)?,
        AlgorithmSpec::Fista { alpha, s, .. } => IGAHDConfig::new(*alpha, 0.0, step_size(*s, &built)?, 1).validate(lipschitz)?,
        AlgorithmSpec::Ipahd { alpha, beta, b, h, .. } => {
            IPAHDConfig::new(*alpha, Schedule::Constant(*beta), Schedule::Constant(*b), *h, 1).validate()?
        }
        AlgorithmSpec::IpahdSc { mu, beta, s, .. } => SCConfig::new(*mu, *beta, *s, ScVariant::Prox, 1).validate(lipschitz)?,
        AlgorithmSpec::IgahdSc { mu, beta, s, .. } => SCConfig::new(*mu, *beta, *s, ScVariant::Grad, 1).validate(lipschitz)?,
        AlgorithmSpec::DinAvd { alpha, beta, b, t0, .. } => {
            let Horizon::Time(t_end) = cfg.horizon else { unreachable!("checked at load") };
            let spec = DampedSystemSpec::new(*alpha, coefficient(beta), coefficient(b), smooth(&built)?.clone(), *t0)?;
            spec.validate_on(t_end)?;
        }
        AlgorithmSpec::DynSc { gamma, beta, .. } => {
            DampedSystemSpec::strongly_convex(*gamma, *beta, smooth(&built)?.clone(), 0.0)?;
        }
    }
    Ok(())
}

fn discrete_report(name: &str, problem: &str, algorithm: &str, trace: &Trace, mode: RateMode) -> (Series, RunReport) {
    let series = Series::from_trace(name, trace);
    let gaps = series.gap_series();
    let last = gaps.last().map(|p| p.0).unwrap_or(0.0);
    let first = gaps.first().map(|p| p.0).unwrap_or(0.0);
    let floor = 1e-14 * trace.iters.first().map(|it| it.f_gap.abs()).unwrap_or(1.0).max(1e-300);
    let lo = match mode {
        RateMode::Poly => (last / 10.0).max(first.max(1.0)),
        RateMode::Linear => first,
    };
    let fit = rate_fit(&above_floor(&gaps, floor), (lo, last), mode);
    let report = RunReport {
        name: name.into(),
        problem: problem.into(),
        algorithm: algorithm.into(),
        points: series.rows.len(),
        final_gap: trace.last().map(|it| it.f_gap).unwrap_or(f64::NAN),
        rate_error: fit.as_ref().err().map(|e| e.to_string()),
        rate: fit.ok(),
        oscillation_count: oscillation_count(&trace.f_gaps()),
        reference: None,
        unchecked: trace.unchecked,
        log: trace.log.clone(),
    };
    (series, report)
}

fn algorithm_tag(a: &AlgorithmSpec) -> &'static str {
    match a {
        AlgorithmSpec::Igahd { .. } => "igahd",
        AlgorithmSpec::Fista { .. } => "fista",
        AlgorithmSpec::Ipahd { .. } => "ipahd",
        AlgorithmSpec::IpahdSc { .. } => "ipahd-sc",
        AlgorithmSpec::IgahdSc { .. } => "igahd-sc",
        AlgorithmSpec::DinAvd { .. } => "din-avd",
        AlgorithmSpec::DynSc { .. } => "dyn-sc",
    }
}

fn problem_tag(p: &ProblemSpec) -> &'static str {
    match p {
        ProblemSpec::Quadratic { .. } => "quadratic",
        ProblemSpec::Lasso { .. } => "lasso",
        ProblemSpec::GroupLasso { .. } => "group-lasso",
        ProblemSpec::TvDenoise { .. } => "tv-denoise",
        ProblemSpec::Nuclear { .. } => "nuclear",
    }
}

/// Runs the experiment without writing anything.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let built = build_problem(&cfg.problem, cfg.seed)?;
    let (ptag, atag) = (problem_tag(&cfg.problem), algorithm_tag(&cfg.algorithm));
    let iterations = match cfg.horizon {
        Horizon::Iterations(n) => n,
        Horizon::Time(_) => 0,
    };
    if let BuiltProblem::Rls(inst) = &built {
        let env = MetricEnvelope::new(&inst.rls).with_reference(inst.reference.value, Some(inst.reference.point.clone()));
        let trace = match &cfg.algorithm {
            AlgorithmSpec::Igahd { alpha, beta, s, x0 } => {
                let x = start(x0, inst.rls.dim(), 0.0)?;
                igahd_run(&env, &IGAHDConfig::new(*alpha, *beta, s.unwrap_or(1.0), iterations), &x, &x)?
            }
            AlgorithmSpec::Fista { alpha, s, x0 } => {
                let x = start(x0, inst.rls.dim(), 0.0)?;
                fista_run(&env, *alpha, s.unwrap_or(1.0), &x, &x, iterations)?
            }
            _ => unreachable!("checked at load"),
        };
        let (series, mut report) = discrete_report(&cfg.name, ptag, atag, &trace, RateMode::Poly);
        report.reference = Some(inst.reference.clone());
        return Ok(RunOutcome { series, report });
    }
    let p = smooth(&built)?;
    let n = p.dim();
    let trace = match &cfg.algorithm {
        AlgorithmSpec::Igahd { alpha, beta, s, x0 } => {
            let x = start(x0, n, 1.0)?;
            igahd_run(p, &IGAHDConfig::new(*alpha, *beta, step_size(*s, &built)?, iterations), &x, &x)?
        }
        AlgorithmSpec::Fista { alpha, s, x0 } => {
            let x = start(x0, n, 1.0)?;
            fista_run(p, *alpha, step_size(*s, &built)?, &x, &x, iterations)?
        }
        AlgorithmSpec::Ipahd { alpha, beta, b, h, x0 } => {
            let x = start(x0, n, 1.0)?;
            ipahd_run(p, &IPAHDConfig::new(*alpha, Schedule::Constant(*beta), Schedule::Constant(*b), *h, iterations), &x, &x)?
        }
        AlgorithmSpec::IpahdSc { mu, beta, s, x0 } => {
            let x = start(x0, n, 1.0)?;
            ipahd_sc_run(p, &SCConfig::new(*mu, *beta, *s, ScVariant::Prox, iterations), &x, &x)?
        }
        AlgorithmSpec::IgahdSc { mu, beta, s, x0 } => {
            let x = start(x0, n, 1.0)?;
            igahd_sc_run(p, &SCConfig::new(*mu, *beta, *s, ScVariant::Grad, iterations), &x, &x)?
        }
        AlgorithmSpec::DinAvd { .. } | AlgorithmSpec::DynSc { .. } => return execute_continuous(cfg, p),
    };
    let mode = if matches!(cfg.algorithm, AlgorithmSpec::IpahdSc { .. } | AlgorithmSpec::IgahdSc { .. }) {
        RateMode::Linear
    } else {
        RateMode::Poly
    };
    let (series, report) = discrete_report(&cfg.name, ptag, atag, &trace, mode);
    Ok(RunOutcome { series, report })
}

fn execute_continuous(cfg: &ExperimentConfig, p: &SmoothConvexProblem) -> Result<RunOutcome> {
    let Horizon::Time(t_end) = cfg.horizon else { unreachable!("checked at load") };
    let n = p.dim();
    let (spec, x0, v0, tol, mode) = match &cfg.algorithm {
        AlgorithmSpec::DinAvd { alpha, beta, b, t0, x0, v0, tol } => {
            let spec = DampedSystemSpec::new(*alpha, coefficient(beta), coefficient(b), p.clone(), *t0)?;
            spec.validate_on(t_end)?;
            (spec, start(x0, n, 1.0)?, start(v0, n, 0.0)?, *tol, RateMode::Poly)
        }
        AlgorithmSpec::DynSc { gamma, beta, x0, v0, tol } => {
            let spec = DampedSystemSpec::strongly_convex(*gamma, *beta, p.clone(), 0.0)?;
            (spec, start(x0, n, 1.0)?, start(v0, n, 0.0)?, *tol, RateMode::Linear)
        }
        _ => unreachable!("only continuous systems reach here"),
    };
    let samples = integrate(&spec, &x0, &v0, t_end, tol)?;
    let series = Series::from_samples(&cfg.name, &samples);
    let gaps = series.gap_series();
    let floor = 1e-14 * samples[0].f_gap.abs().max(1e-300);
    let lo = match mode {
        RateMode::Poly => (t_end / 10.0).max(spec.t0),
        RateMode::Linear => spec.t0,
    };
    let fit = rate_fit(&above_floor(&gaps, floor), (lo, t_end), mode);
    let report = RunReport {
        name: cfg.name.clone(),
        problem: problem_tag(&cfg.problem).into(),
        algorithm: algorithm_tag(&cfg.algorithm).into(),
        points: samples.len(),
        final_gap: samples.last().map(|s| s.f_gap).unwrap_or(f64::NAN),
        rate_error: fit.as_ref().err().map(|e| e.to_string()),
        rate: fit.ok(),
        oscillation_count: oscillation_count(&series.rows.iter().map(|r| r.f_gap).collect::<Vec<_>>()),
        reference: None,
        unchecked: false,
        log: Vec::new(),
    };
    Ok(RunOutcome { series, report })
}

/// Runs the experiment and writes the requested outputs into `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let outcome = execute(cfg)?;
    for kind in &cfg.outputs {
        match kind {
            OutputKind::Csv => emit_csv(&outcome.series.rows, &out_dir.join(format!("{}.csv", cfg.name)))?,
            OutputKind::Svg => {
                let axes = match outcome.report.rate.as_ref().map(|r| r.mode) {
                    Some(RateMode::Linear) => Axes::SemiLog,
                    _ => Axes::LogLog,
                };
                emit_svg(std::slice::from_ref(&outcome.series), &cfg.name, axes, &out_dir.join(format!("{}.svg", cfg.name)))?
            }
            OutputKind::Report => {
                let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
                write_file(&out_dir.join(format!("{}.report.json", cfg.name)), text.as_bytes())?
            }
        }
    }
    Ok(outcome)
}
