//! Inertial dynamics with viscous, Hessian-driven and time-scaled damping:
//!
//! `ẍ + γ(t) ẋ + β(t) ∇²f(x) ẋ + b(t) ∇f(x) = 0`, with `γ(t) = α/t` or a
//! constant.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{SmoothConvexProblem, Vector};

mod closed_form;
mod first_order;
mod integrator;

pub use closed_form::{
    asymptotic_rate, closed_form_eval, closed_form_state, fit_closed_form_ic, rescaled_change_of_variable,
    AsymptoticRate, ClosedFormBranch, ClosedFormParams, ClosedFormSpec, RescaledSystem,
};
pub use first_order::integrate_first_order;
pub use integrator::{geometric_grid, integrate, integrate_at, IntegratorOptions};

/// A scalar function of time with its first two derivatives.
#[derive(Clone)]
pub enum Coefficient {
    Const(f64),
    /// `coef · t^exp`.
    Power { coef: f64, exp: f64 },
    /// `c + d/t`.
    ConstPlusInv { c: f64, d: f64 },
    /// Derivatives by central differences with step `1e−6`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "Const({c})"),
            Coefficient::Power { coef, exp } => write!(f, "Power {{ coef: {coef}, exp: {exp} }}"),
            Coefficient::ConstPlusInv { c, d } => write!(f, "ConstPlusInv {{ c: {c}, d: {d} }}"),
            Coefficient::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

const FD_STEP: f64 = 1e-6;

impl Coefficient {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Power { coef, exp } => power(*coef, *exp, t),
            Coefficient::ConstPlusInv { c, d } => c + d / t,
            Coefficient::Custom(f) => f(t),
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match self {
            Coefficient::Const(_) => 0.0,
            Coefficient::Power { coef, exp } => power(coef * exp, exp - 1.0, t),
            Coefficient::ConstPlusInv { d, .. } => -d / (t * t),
            Coefficient::Custom(f) => (f(t + FD_STEP) - f(t - FD_STEP)) / (2.0 * FD_STEP),
        }
    }

    pub fn d2(&self, t: f64) -> f64 {
        match self {
            Coefficient::Const(_) => 0.0,
            Coefficient::Power { coef, exp } => power(coef * exp * (exp - 1.0), exp - 2.0, t),
            Coefficient::ConstPlusInv { d, .. } => 2.0 * d / (t * t * t),
            Coefficient::Custom(f) => {
                let h = 1e-4;
                (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h)
            }
        }
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self {
            Coefficient::Const(c) => Some(*c),
            Coefficient::Power { coef, exp } if *exp == 0.0 || *coef == 0.0 => Some(*coef),
            Coefficient::ConstPlusInv { c, d } if *d == 0.0 => Some(*c),
            _ => None,
        }
    }
}

fn power(coef: f64, exp: f64, t: f64) -> f64 {
    if coef == 0.0 {
        0.0
    } else if exp == 0.0 {
        coef
    } else {
        coef * t.powf(exp)
    }
}

/// The damped system on a smooth problem.
#[derive(Clone, Debug)]
pub struct DampedSystemSpec {
    pub alpha: f64,
    pub beta: Coefficient,
    pub b: Coefficient,
    pub problem: SmoothConvexProblem,
    pub t0: f64,
    /// Constant viscous coefficient replacing `α/t` (strongly convex form).
    pub gamma_const: Option<f64>,
}

impl DampedSystemSpec {
    pub fn new(alpha: f64, beta: Coefficient, b: Coefficient, problem: SmoothConvexProblem, t0: f64) -> Result<Self> {
        let spec = Self { alpha, beta, b, problem, t0, gamma_const: None };
        spec.check_start()?;
        Ok(spec)
    }

    /// `ẍ + γ ẋ + β ∇²f(x) ẋ + ∇f(x) = 0` with constant `γ` and `β`.
    pub fn strongly_convex(gamma: f64, beta: f64, problem: SmoothConvexProblem, t0: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("viscous coefficient must be nonnegative, got {gamma}")));
        }
        let spec = Self {
            alpha: 0.0,
            beta: Coefficient::Const(beta),
            b: Coefficient::Const(1.0),
            problem,
            t0,
            gamma_const: Some(gamma),
        };
        spec.check_start()?;
        Ok(spec)
    }

    fn check_start(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        let singular = self.gamma_const.is_none() && self.alpha > 0.0;
        if !self.t0.is_finite() || self.t0 < 0.0 || (singular && self.t0 == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t0 must be positive (zero only without the α/t term), got {}",
                self.t0
            )));
        }
        Ok(())
    }

    /// Checks `β ≥ 0` and `b ≥ 0` at 10³ points of `[t0, t_end]`.
    pub fn validate_on(&self, t_end: f64) -> Result<()> {
        if !(t_end > self.t0) {
            return Err(Error::InvalidParameter(format!("end time {t_end} must exceed t0 = {}", self.t0)));
        }
        for i in 0..=1000 {
            let t = self.t0 + (t_end - self.t0) * i as f64 / 1000.0;
            let (beta, b) = (self.beta.value(t), self.b.value(t));
            if !(beta >= 0.0) || !beta.is_finite() {
                return Err(Error::InvalidParameter(format!("beta({t}) = {beta} must be nonnegative")));
            }
            if !(b >= 0.0) || !b.is_finite() {
                return Err(Error::InvalidParameter(format!("b({t}) = {b} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Viscous coefficient at `t`.
    pub fn damping(&self, t: f64) -> f64 {
        match self.gamma_const {
            Some(g) => g,
            None if self.alpha == 0.0 => 0.0,
            None => self.alpha / t,
        }
    }

    /// Acceleration `ẍ` at the state `(x, v)`.
    pub fn acceleration(&self, t: f64, x: &Vector, v: &Vector) -> Vector {
        let mut a = self.problem.gradient(x) * (-self.b.value(t));
        a -= v * self.damping(t);
        let beta = self.beta.value(t);
        if beta != 0.0 {
            a -= self.problem.hess_vec(x, v) * beta;
        }
        a
    }
}

/// State along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: Vector,
    pub v: Vector,
    pub f_gap: f64,
    pub grad_norm: f64,
    /// Lyapunov energy, when the optimum is known.
    pub energy: Option<f64>,
}

/// `w(t) = b(t) − β'(t) − β(t)/t` and `δ(t) = t² w(t)`.
pub fn w_and_delta(spec: &DampedSystemSpec, t: f64) -> (f64, f64) {
    let w = spec.b.value(t) - spec.beta.d1(t) - spec.beta.value(t) / t;
    (w, t * t * w)
}

fn w_prime(spec: &DampedSystemSpec, t: f64) -> f64 {
    let beta = &spec.beta;
    spec.b.d1(t) - beta.d2(t) - beta.d1(t) / t + beta.value(t) / (t * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContinuousGrowth {
    pub g2: bool,
    pub g3: bool,
}

/// Growth conditions `b > β' + β/t` and `t w' ≤ (α − 3) w`; the second is
/// tested with a relative slack of `1e−12` so that identities hold.
pub fn check_growth_continuous(spec: &DampedSystemSpec, t: f64) -> ContinuousGrowth {
    let (w, _) = w_and_delta(spec, t);
    let lhs = t * w_prime(spec, t);
    let rhs = (spec.alpha - 3.0) * w;
    ContinuousGrowth { g2: w > 0.0, g3: lhs <= rhs + 1e-12 * (lhs.abs() + rhs.abs()) }
}

fn opt_value_at(problem: &SmoothConvexProblem, xstar: &Vector) -> f64 {
    problem.opt_value().unwrap_or_else(|| problem.value(xstar))
}

/// `E(t) = δ(t)(f(x) − f*) + ½‖(α−1)(x − x*) + t(ẋ + β(t)∇f(x))‖²`.
pub fn energy_continuous(spec: &DampedSystemSpec, sample: &TrajectorySample, xstar: &Vector) -> Result<f64> {
    let p = &spec.problem;
    p.check_point(&sample.x)?;
    p.check_point(xstar)?;
    let t = sample.t;
    let (_, delta) = w_and_delta(spec, t);
    let g = p.gradient(&sample.x);
    let u = (&sample.x - xstar) * (spec.alpha - 1.0) + (&sample.v + g * spec.beta.value(t)) * t;
    Ok(delta * (p.value(&sample.x) - opt_value_at(p, xstar)) + 0.5 * u.norm_squared())
}

/// `𝓔(t) = f(x) − f* + ½‖√μ(x − x*) + ẋ + β∇f(x)‖²`.
pub fn sc_energy_continuous(
    problem: &SmoothConvexProblem,
    beta: f64,
    sample: &TrajectorySample,
    xstar: &Vector,
) -> Result<f64> {
    let mu = problem.strong_modulus();
    if !(mu > 0.0) {
        return Err(Error::Missing("strong convexity modulus"));
    }
    problem.check_point(&sample.x)?;
    problem.check_point(xstar)?;
    let u = (&sample.x - xstar) * mu.sqrt() + &sample.v + problem.gradient(&sample.x) * beta;
    Ok(problem.value(&sample.x) - opt_value_at(problem, xstar) + 0.5 * u.norm_squared())
}

/// Trapezoid estimate of `∫ t² β(t) w(t) ‖∇f(x(t))‖² dt` over the samples.
pub fn weighted_gradient_integral(spec: &DampedSystemSpec, samples: &[TrajectorySample]) -> f64 {
    let integrand = |s: &TrajectorySample| {
        let (_, delta) = w_and_delta(spec, s.t);
        delta * spec.beta.value(s.t) * s.grad_norm * s.grad_norm
    };
    samples.windows(2).map(|p| 0.5 * (p[1].t - p[0].t) * (integrand(&p[0]) + integrand(&p[1]))).sum()
}

pub(crate) fn make_sample(spec: &DampedSystemSpec, t: f64, x: Vector, v: Vector) -> TrajectorySample {
    let p = &spec.problem;
    let g = p.gradient(&x);
    let value = p.value(&x);
    let f_gap = match p.opt_value() {
        Some(f) => value - f,
        None => value,
    };
    let mut sample = TrajectorySample { t, f_gap, grad_norm: g.norm(), x, v, energy: None };
    if let Some(xstar) = p.opt_point() {
        sample.energy = match spec.gamma_const {
            Some(_) if p.strong_modulus() > 0.0 => sc_energy_continuous(p, spec.beta.value(t), &sample, xstar).ok(),
            Some(_) => None,
            None => energy_continuous(spec, &sample, xstar).ok(),
        };
    }
    sample
}
