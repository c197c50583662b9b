use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{ProxFriendlyFunction, SmoothConvexProblem, Vector};

use super::{check_start, gap_of, gap_reference, is_finite, non_finite, IterTrace, Trace};

/// Index-dependent coefficient sequence.
#[derive(Clone)]
pub enum Schedule {
    Constant(f64),
    /// `1 + β/(h k)`.
    OnePlusOverHk { beta: f64, h: f64 },
    /// `slope · k + intercept`.
    Affine { slope: f64, intercept: f64 },
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Constant(c) => write!(f, "Constant({c})"),
            Schedule::OnePlusOverHk { beta, h } => write!(f, "OnePlusOverHk {{ beta: {beta}, h: {h} }}"),
            Schedule::Affine { slope, intercept } => write!(f, "Affine {{ slope: {slope}, intercept: {intercept} }}"),
            Schedule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Schedule {
    pub fn at(&self, k: usize) -> f64 {
        let kf = k as f64;
        match self {
            Schedule::Constant(c) => *c,
            Schedule::OnePlusOverHk { beta, h } => 1.0 + beta / (h * kf),
            Schedule::Affine { slope, intercept } => slope * kf + intercept,
            Schedule::Custom(f) => f(k),
        }
    }
}

/// Parameters of the inertial proximal method with Hessian damping.
#[derive(Clone, Debug)]
pub struct IPAHDConfig {
    pub alpha: f64,
    pub beta: Schedule,
    pub b: Schedule,
    pub h: f64,
    pub start_index: usize,
    pub max_iter: usize,
    pub unchecked: bool,
}

impl IPAHDConfig {
    pub fn new(alpha: f64, beta: Schedule, b: Schedule, h: f64, max_iter: usize) -> Self {
        Self { alpha, beta, b, h, start_index: 1, max_iter, unchecked: false }
    }

    pub fn unchecked(mut self) -> Self {
        self.unchecked = true;
        self
    }

    pub fn s(&self) -> f64 {
        self.h * self.h
    }

    /// Prox parameter `μ_k = (k/(k+α))(β_k √s + s b_k)`.
    pub fn mu(&self, k: usize) -> f64 {
        let kf = k as f64;
        kf / (kf + self.alpha) * (self.beta.at(k) * self.h + self.s() * self.b.at(k))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidParameter(format!("h must be positive, got {}", self.h)));
        }
        if self.start_index < 1 {
            return Err(Error::InvalidParameter("start index must be at least 1".into()));
        }
        if !self.unchecked && !(self.alpha >= 1.0) {
            return Err(Error::Hypothesis(format!("alpha ≥ 1 required, got {}", self.alpha)));
        }
        for k in self.start_index..=self.start_index + self.max_iter {
            let (beta, b) = (self.beta.at(k), self.b.at(k));
            if !(beta >= 0.0) || !beta.is_finite() {
                return Err(Error::InvalidParameter(format!("beta_{k} = {beta} must be nonnegative")));
            }
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidParameter(format!("b_{k} = {b} must be positive")));
            }
            let mu = self.mu(k);
            if !(mu > 0.0) {
                return Err(Error::InvalidParameter(format!("prox parameter mu_{k} = {mu} must be positive")));
            }
        }
        Ok(())
    }
}

/// `δ_k = h (b_k h k − β_{k+1} − k(β_{k+1} − β_k)) (k + 1)`.
pub fn ipahd_delta(cfg: &IPAHDConfig, k: usize) -> f64 {
    cfg.h * growth_margin(cfg, k) * (k as f64 + 1.0)
}

fn growth_margin(cfg: &IPAHDConfig, k: usize) -> f64 {
    let kf = k as f64;
    let (b0, b1) = (cfg.beta.at(k), cfg.beta.at(k + 1));
    cfg.b.at(k) * cfg.h * kf - b1 - kf * (b1 - b0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscreteGrowth {
    pub g2: bool,
    pub g3: bool,
}

pub fn check_growth_discrete(cfg: &IPAHDConfig, alpha: f64, k: usize) -> DiscreteGrowth {
    let d0 = ipahd_delta(cfg, k);
    let d1 = ipahd_delta(cfg, k + 1);
    DiscreteGrowth { g2: growth_margin(cfg, k) > 0.0, g3: d1 - d0 <= (alpha - 1.0) * d0 / (k as f64 + 1.0) }
}

/// Proximal step for a smooth problem: closed form when attached, otherwise
/// gradient descent on the strongly convex subproblem.
pub(super) fn smooth_prox(problem: &SmoothConvexProblem, y: &Vector, mu: f64, log: &mut Vec<String>, k: usize) -> Result<Vector> {
    if let Some(p) = problem.prox(y, mu) {
        return Ok(p);
    }
    let l = problem.lipschitz().ok_or(Error::Missing("closed-form prox or Lipschitz constant"))?;
    let step = 1.0 / (1.0 + mu * l);
    let tol = 1e-12 * (1.0 + y.norm());
    let mut z = y.clone();
    for it in 0..100_000 {
        let grad = problem.gradient(&z) * mu + (&z - y);
        let r = grad.norm();
        if r <= tol {
            if it > 0 && log.len() < 64 {
                log.push(format!("k={k}: inner prox solved in {it} steps (residual {r:.1e})"));
            }
            return Ok(z);
        }
        z -= grad * step;
    }
    let r = (problem.gradient(&z) * mu + (&z - y)).norm();
    log.push(format!("k={k}: inner prox stopped at residual {r:.1e}"));
    Ok(z)
}

/// Runs the proximal method on a smooth problem.
pub fn ipahd_run(problem: &SmoothConvexProblem, cfg: &IPAHDConfig, x0: &Vector, x1: &Vector) -> Result<Trace> {
    cfg.validate()?;
    check_start(problem.dim(), x0, x1)?;
    let gap = gap_reference(problem.opt_value());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let k0 = cfg.start_index;
    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    let g0 = problem.gradient(&x_prev);
    trace.iters.push(IterTrace {
        k: k0 - 1,
        x: x_prev.clone(),
        f_gap: gap_of(problem.value(&x_prev), gap),
        grad_norm: g0.norm(),
        energy: None,
        y: None,
    });
    let energy = |x_prev: &Vector, x: &Vector, g: &Vector, k: usize| -> Option<f64> {
        let fstar = problem.opt_value()?;
        let xstar = problem.opt_point()?;
        let v = (x - xstar) * (cfg.alpha - 1.0) + (x - x_prev + g * (cfg.beta.at(k) * cfg.h)) * k as f64;
        Some(ipahd_delta(cfg, k) * (problem.value(x) - fstar) + 0.5 * v.norm_squared())
    };
    for k in k0..=k0 + cfg.max_iter {
        let g = problem.gradient(&x);
        let e = energy(&x_prev, &x, &g, k);
        if ipahd_delta(cfg, k) <= 0.0 && trace.log.len() < 64 {
            trace.log.push(format!("k={k}: delta_k is not positive"));
        }
        let mut entry = IterTrace {
            k,
            x: x.clone(),
            f_gap: gap_of(problem.value(&x), gap),
            grad_norm: g.norm(),
            energy: e,
            y: None,
        };
        if k == k0 + cfg.max_iter {
            trace.iters.push(entry);
            break;
        }
        let kf = k as f64;
        let c = kf / (kf + cfg.alpha);
        let y = &x + (&x - &x_prev) * c + &g * (cfg.beta.at(k) * cfg.h * c);
        let x_next = smooth_prox(problem, &y, cfg.mu(k), &mut trace.log, k)?;
        entry.y = Some(y);
        trace.iters.push(entry);
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        x_prev = std::mem::replace(&mut x, x_next);
    }
    Ok(trace)
}

/// Runs the relaxed proximal method on a non-smooth function through its
/// Moreau envelope of parameter `lambda`.
pub fn ipahd_ns_run(
    f: &ProxFriendlyFunction,
    cfg: &IPAHDConfig,
    lambda: f64,
    x0: &Vector,
    x1: &Vector,
) -> Result<Trace> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    cfg.validate()?;
    check_start(f.dim(), x0, x1)?;
    let gap = gap_reference(f.opt_value());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let k0 = cfg.start_index;
    let s = cfg.s();
    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    let p0 = f.prox(&x_prev, lambda);
    trace.iters.push(IterTrace {
        k: k0 - 1,
        f_gap: gap_of(f.value(&p0), gap),
        grad_norm: (&x_prev - &p0).norm() / lambda,
        x: x_prev.clone(),
        energy: None,
        y: None,
    });
    for k in k0..=k0 + cfg.max_iter {
        let p = f.prox(&x, lambda);
        let fp = f.value(&p);
        let diff = &x - &p;
        let energy = match (f.opt_value(), f.opt_point()) {
            (Some(fstar), Some(xstar)) => {
                let env = fp + diff.norm_squared() / (2.0 * lambda);
                let v = (&x - xstar) * (cfg.alpha - 1.0)
                    + (&x - &x_prev + &diff * (cfg.beta.at(k) * cfg.h / lambda)) * k as f64;
                Some(ipahd_delta(cfg, k) * (env - fstar) + 0.5 * v.norm_squared())
            }
            _ => None,
        };
        let mut entry =
            IterTrace { k, x: x.clone(), f_gap: gap_of(fp, gap), grad_norm: diff.norm() / lambda, energy, y: None };
        if k == k0 + cfg.max_iter {
            trace.iters.push(entry);
            break;
        }
        let kf = k as f64;
        let c = kf / (kf + cfg.alpha);
        let y = &x + (&x - &x_prev) * c + &diff * (cfg.beta.at(k) * cfg.h * c / lambda);
        let lk = lambda * (kf + cfg.alpha);
        let mu = lk / (lk + kf * (cfg.beta.at(k) * cfg.h + s * cfg.b.at(k)));
        let x_next = &y * mu + f.prox(&y, lambda / mu) * (1.0 - mu);
        entry.y = Some(y);
        trace.iters.push(entry);
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        x_prev = std::mem::replace(&mut x, x_next);
    }
    Ok(trace)
}
