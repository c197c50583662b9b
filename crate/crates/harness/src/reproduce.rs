//! Pinned reproduction targets: the ill-conditioned oscillation comparison,
//! the four time-scaling cases, and the regularized least-squares benchmarks.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hessdamp_core::algorithms::{fista_run, igahd_run, GapReference, IGAHDConfig, MetricEnvelope, Trace};
use hessdamp_core::dynamics::{
    check_growth_continuous, closed_form_state, energy_continuous, fit_closed_form_ic, integrate_at,
    rescaled_change_of_variable, w_and_delta, ClosedFormParams, Coefficient, DampedSystemSpec, IntegratorOptions,
    TrajectorySample,
};
use hessdamp_core::problem::{make_quadratic, make_quadratic_in_basis, rotation_2d, SmoothConvexProblem};
use hessdamp_core::Vector;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::instances::{self, Reference, RlsInstance};
use crate::output::{emit_csv, emit_svg, write_file, Axes, Series};
use crate::rate::{above_floor, oscillation_count, rate_fit, upper_envelope, window_sensitivity, RateMode, RateReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Fig1,
    Fig2Case4,
    RlsL1,
    RlsGroup,
    RlsTv,
    RlsNuclear,
}

impl Target {
    pub const ALL: [Target; 6] =
        [Target::Fig1, Target::Fig2Case4, Target::RlsL1, Target::RlsGroup, Target::RlsTv, Target::RlsNuclear];

    pub fn name(self) -> &'static str {
        match self {
            Target::Fig1 => "fig1",
            Target::Fig2Case4 => "fig2-case4",
            Target::RlsL1 => "rls-l1",
            Target::RlsGroup => "rls-group",
            Target::RlsTv => "rls-tv",
            Target::RlsNuclear => "rls-nuclear",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<_> = Target::ALL.iter().map(|t| t.name()).collect();
            HarnessError::Config(format!("unknown target {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

fn uniform(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
}

// ---------- oscillation comparison ----------

pub const FIG1_ALPHA: f64 = 3.1;
pub const FIG1_T_END: f64 = 30.0;
/// Uniform sampling step; the stiff mode has period 2π/√1000 ≈ 0.2.
pub const FIG1_SAMPLES: usize = 5800;

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Report {
    pub alpha: f64,
    pub window: (f64, f64),
    pub samples: usize,
    /// Strict local maxima of the gap without Hessian damping.
    pub avd_oscillations: usize,
    /// Strict local maxima of the gap with Hessian damping (β = 1).
    pub din_avd_oscillations: usize,
}

pub fn fig1_problem() -> Result<SmoothConvexProblem> {
    Ok(make_quadratic(&[1.0, 1000.0], &Vector::zeros(2))?)
}

pub fn fig1() -> Result<(Fig1Report, Vec<Series>)> {
    let times = uniform(1.0, FIG1_T_END, FIG1_SAMPLES);
    let opts = IntegratorOptions::with_tol(1e-10).atol(1e-14);
    let mut series = Vec::new();
    let mut counts = Vec::new();
    for (label, beta) in [("AVD (beta=0)", 0.0), ("DIN-AVD (beta=1)", 1.0)] {
        let spec = DampedSystemSpec::new(FIG1_ALPHA, Coefficient::Const(beta), Coefficient::Const(1.0), fig1_problem()?, 1.0)?;
        let out = integrate_at(&spec, &Vector::from_element(2, 1.0), &Vector::zeros(2), &times, &opts)?;
        counts.push(oscillation_count(&out.iter().map(|s| s.f_gap).collect::<Vec<_>>()));
        series.push(Series::from_samples(label, &out));
    }
    let report = Fig1Report {
        alpha: FIG1_ALPHA,
        window: (1.0, FIG1_T_END),
        samples: times.len(),
        avd_oscillations: counts[0],
        din_avd_oscillations: counts[1],
    };
    Ok((report, series))
}

// ---------- time-scaling cases ----------

pub const FIG2_ALPHA: f64 = 5.0;
pub const FIG2_T0: f64 = 2.0;
pub const FIG2_T_END: f64 = 100.0;
pub const FIG2_FIT: (f64, f64) = (10.0, 100.0);
/// Uniform sampling step, fine against the fastest oscillation (case 3, period ≈ 0.044 at t = 100).
pub const FIG2_SAMPLES: usize = 24_500;

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub evaluated_by: &'static str,
    /// Both growth conditions hold at every sample of the span.
    pub growth_holds: bool,
    /// `max δ(t)·f_gap(t) / E(t0)` over the span.
    pub certificate_ratio: f64,
    /// Fit of the running upper envelope `max_{s ≥ t} f_gap(s)`.
    pub rate: RateReport,
    pub window_sensitivity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig2Report {
    pub alpha: f64,
    pub t0: f64,
    pub cases: Vec<CaseReport>,
}

/// `(x1 + x2)²/2`: eigenvalue 2 along (1,1)/√2 and a flat direction.
pub fn fig2_problem() -> Result<SmoothConvexProblem> {
    Ok(make_quadratic_in_basis(&[2.0, 0.0], &rotation_2d(FRAC_PI_4), &Vector::zeros(2))?)
}

/// The four damping/scaling choices, in order.
pub fn fig2_specs() -> Result<Vec<(String, DampedSystemSpec)>> {
    let p = fig2_problem()?;
    let mk = |beta, b| DampedSystemSpec::new(FIG2_ALPHA, beta, b, p.clone(), FIG2_T0);
    Ok(vec![
        ("case 1: beta=1, b=1".into(), mk(Coefficient::Const(1.0), Coefficient::Const(1.0))?),
        ("case 2: beta=1, b=1+1/t".into(), mk(Coefficient::Const(1.0), Coefficient::ConstPlusInv { c: 1.0, d: 1.0 })?),
        ("case 3: beta=0, b=t^2".into(), mk(Coefficient::Const(0.0), Coefficient::Power { coef: 1.0, exp: 2.0 })?),
        (
            "case 4: beta=t^3, b=5t^2".into(),
            mk(Coefficient::Power { coef: 1.0, exp: 3.0 }, Coefficient::Power { coef: 5.0, exp: 2.0 })?,
        ),
    ])
}

/// Samples built from the scalar state of the eigenvalue-2 mode; the flat
/// mode starts at rest at 0 for x(t0) = (1,1) and stays there.
fn modal_samples(spec: &DampedSystemSpec, times: &[f64], state: impl Fn(f64) -> Result<(f64, f64)>) -> Result<Vec<TrajectorySample>> {
    let dir = Vector::from_element(2, std::f64::consts::FRAC_1_SQRT_2);
    times
        .iter()
        .map(|&t| {
            let (q, dq) = state(t)?;
            if !q.is_finite() || !dq.is_finite() {
                return Err(HarnessError::Numerical(format!("closed form is not finite at t = {t}")));
            }
            let x = &dir * q;
            let v = &dir * dq;
            let f_gap = spec.problem.value(&x);
            let grad_norm = spec.problem.gradient(&x).norm();
            Ok(TrajectorySample { t, x, v, f_gap, grad_norm, energy: None })
        })
        .collect()
}

pub fn fig2() -> Result<(Fig2Report, Vec<Series>)> {
    let times = uniform(FIG2_T0, FIG2_T_END, FIG2_SAMPLES);
    let x0 = Vector::from_element(2, 1.0);
    let q0 = 2f64.sqrt();
    let lambda = 2.0;
    let xstar = Vector::zeros(2);
    let mut cases = Vec::new();
    let mut series = Vec::new();
    for (i, (label, spec)) in fig2_specs()?.into_iter().enumerate() {
        let (evaluated_by, mut samples) = match i {
            0 | 1 => {
                let gamma = if i == 1 { 1.0 } else { 0.0 };
                let cf = fit_closed_form_ic(ClosedFormParams::new(lambda, FIG2_ALPHA, 1.0, 1.0, gamma)?, FIG2_T0, q0, 0.0)?;
                ("closed form", modal_samples(&spec, &times, |t| Ok(closed_form_state(&cf, t)?))?)
            }
            2 => {
                let opts = IntegratorOptions::with_tol(1e-10).atol(1e-16);
                ("integrator", integrate_at(&spec, &x0, &Vector::zeros(2), &times, &opts)?)
            }
            _ => {
                let rs = rescaled_change_of_variable(lambda, 3.0, 5.0, FIG2_ALPHA)?;
                let cf = rs.fit(FIG2_T0, q0, 0.0)?;
                ("rescaled closed form", modal_samples(&spec, &times, |t| Ok(rs.state(&cf, t)?))?)
            }
        };
        for s in &mut samples {
            s.energy = Some(energy_continuous(&spec, s, &xstar)?);
        }
        let growth_holds = times.iter().all(|&t| {
            let g = check_growth_continuous(&spec, t);
            g.g2 && g.g3
        });
        let e0 = samples[0].energy.expect("set above");
        let certificate_ratio = samples.iter().map(|s| w_and_delta(&spec, s.t).1 * s.f_gap / e0).fold(f64::MIN, f64::max);
        let envelope = upper_envelope(&samples.iter().map(|s| s.f_gap).collect::<Vec<_>>());
        let points: Vec<(f64, f64)> = samples.iter().zip(&envelope).map(|(s, e)| (s.t, *e)).collect();
        let rate = rate_fit(&points, FIG2_FIT, RateMode::Poly)?;
        let window_sensitivity = window_sensitivity(&points, FIG2_FIT, RateMode::Poly)?;
        cases.push(CaseReport { label: label.clone(), evaluated_by, growth_holds, certificate_ratio, rate, window_sensitivity });
        series.push(Series::from_samples(label, &samples));
    }
    Ok((Fig2Report { alpha: FIG2_ALPHA, t0: FIG2_T0, cases }, series))
}

// ---------- regularized least squares ----------

pub const RLS_ITERATIONS: usize = 2000;
pub const RLS_ALPHA: f64 = 3.0;
/// Hessian-damping coefficient of the metric run. With unit step in the
/// metric, this is the Euclidean choice 0.5·√s rescaled by 1/√s.
pub const RLS_BETA_METRIC: f64 = 0.5;
pub const RLS_FIT: (f64, f64) = (50.0, 2000.0);
pub const RLS_OSCILLATION_WINDOW: usize = 500;
/// Gaps below this fraction of the starting gap are rounding noise.
pub const RLS_NOISE_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct RlsRun {
    pub algorithm: &'static str,
    pub rate: Option<RateReport>,
    pub rate_error: Option<String>,
    pub window_sensitivity: Option<f64>,
    /// Strict local maxima of the gap over the first iterations, counted
    /// only while the gap stays above the noise floor.
    pub oscillations: usize,
    /// The same count including iterations at rounding level.
    pub oscillations_raw: usize,
    /// First iteration whose gap is below the noise floor, if any.
    pub floor_reached_at: Option<usize>,
    pub final_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RlsReport {
    pub target: String,
    pub instance: String,
    pub dimension: usize,
    pub seed: u64,
    pub step: f64,
    pub alpha: f64,
    pub beta_metric: f64,
    pub reference: Reference,
    /// Minimum actually used for the gaps: the reference, or a lower observed value.
    pub minimum_used: f64,
    pub noise_floor: f64,
    pub runs: Vec<RlsRun>,
}

/// Seed and shape of each pinned instance.
pub fn rls_instance(target: Target) -> Result<(u64, RlsInstance)> {
    Ok(match target {
        Target::RlsL1 => (20, instances::lasso(100, 256, 10, None, 20)?),
        Target::RlsGroup => (21, instances::group_lasso(100, 256, 8, 4, None, 21)?),
        Target::RlsTv => (22, instances::tv_denoise(256, 5, None, 22)?),
        Target::RlsNuclear => (23, instances::nuclear(16, 2, 200, None, 23)?),
        _ => return Err(HarnessError::Config(format!("{target} is not a least-squares target"))),
    })
}

fn rls_run(algorithm: &'static str, trace: &Trace, floor: f64) -> RlsRun {
    let gaps: Vec<(f64, f64)> = trace.iters.iter().map(|it| (it.k as f64, it.f_gap)).collect();
    let usable = above_floor(&gaps, floor);
    let fit = rate_fit(&usable, RLS_FIT, RateMode::Poly);
    let gaps_only = trace.f_gaps();
    let window = RLS_OSCILLATION_WINDOW.min(gaps_only.len());
    let floor_reached_at = trace.iters.iter().find(|it| it.f_gap < floor).map(|it| it.k);
    let measurable = gaps_only.iter().take(window).take_while(|g| **g >= floor).count();
    RlsRun {
        algorithm,
        window_sensitivity: fit.as_ref().ok().and_then(|_| window_sensitivity(&usable, RLS_FIT, RateMode::Poly).ok()),
        rate_error: fit.as_ref().err().map(|e| e.to_string()),
        rate: fit.ok(),
        oscillations: oscillation_count(&gaps_only[..measurable]),
        oscillations_raw: oscillation_count(&gaps_only[..window]),
        floor_reached_at,
        final_gap: trace.last().map(|it| it.f_gap).unwrap_or(f64::NAN),
    }
}

pub fn rls(target: Target) -> Result<(RlsReport, Vec<Series>)> {
    let (seed, inst) = rls_instance(target)?;
    let n = inst.rls.dim();
    let env = MetricEnvelope::new(&inst.rls).with_reference(inst.reference.value, Some(inst.reference.point.clone()));
    let x0 = Vector::zeros(n);
    let mut igahd = igahd_run(&env, &IGAHDConfig::new(RLS_ALPHA, RLS_BETA_METRIC, 1.0, RLS_ITERATIONS), &x0, &x0)?;
    let mut fista = fista_run(&env, RLS_ALPHA, 1.0, &x0, &x0, RLS_ITERATIONS)?;
    // Never report a negative gap: fall back to the best value observed.
    let lowest = igahd.iters.iter().chain(&fista.iters).map(|it| it.f_gap).fold(0.0, f64::min);
    let minimum_used = inst.reference.value + lowest;
    if lowest < 0.0 {
        igahd.rebase(minimum_used);
        fista.rebase(minimum_used);
    }
    debug_assert!(matches!(igahd.gap, GapReference::Exact(_) | GapReference::Empirical(_)));
    let start_gap = igahd.iters.first().map(|it| it.f_gap).unwrap_or(1.0);
    let floor = RLS_NOISE_FLOOR * start_gap.abs().max(minimum_used.abs());
    let report = RlsReport {
        target: target.name().into(),
        instance: inst.kind.into(),
        dimension: n,
        seed,
        step: inst.rls.s(),
        alpha: RLS_ALPHA,
        beta_metric: RLS_BETA_METRIC,
        reference: inst.reference.clone(),
        minimum_used,
        noise_floor: floor,
        runs: vec![rls_run("igahd", &igahd, floor), rls_run("fista", &fista, floor)],
    };
    Ok((report, vec![Series::from_trace("IGAHD", &igahd), Series::from_trace("FISTA", &fista)]))
}

// ---------- driver ----------

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TargetReport {
    Fig1(Fig1Report),
    Fig2(Fig2Report),
    Rls(Box<RlsReport>),
}

/// Computes a target without writing anything.
pub fn compute(target: Target) -> Result<(TargetReport, Vec<Series>, Axes)> {
    Ok(match target {
        Target::Fig1 => {
            let (r, s) = fig1()?;
            (TargetReport::Fig1(r), s, Axes::SemiLog)
        }
        Target::Fig2Case4 => {
            let (r, s) = fig2()?;
            (TargetReport::Fig2(r), s, Axes::LogLog)
        }
        _ => {
            let (r, s) = rls(target)?;
            (TargetReport::Rls(Box::new(r)), s, Axes::LogLog)
        }
    })
}

fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

/// Runs a target and writes `<target>-<series>.csv`, `<target>.svg` and
/// `<target>.report.json` into `out_dir`.
pub fn reproduce(target: Target, out_dir: &Path) -> Result<TargetReport> {
    let (report, series, axes) = compute(target)?;
    for s in &series {
        emit_csv(&s.rows, &out_dir.join(format!("{}-{}.csv", target.name(), slug(&s.label))))?;
    }
    emit_svg(&series, target.name(), axes, &out_dir.join(format!("{}.svg", target.name())))?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(&out_dir.join(format!("{}.report.json", target.name())), text.as_bytes())?;
    Ok(report)
}
