use crate::error::{Error, Result};
use crate::problem::{SmoothConvexProblem, Vector};

use super::{check_start, gap_of, gap_reference, is_finite, non_finite, GradientOracle, IterTrace, Trace};

/// Parameters of the inertial gradient method with Hessian damping.
#[derive(Clone, Debug, PartialEq)]
pub struct IGAHDConfig {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    pub start_index: usize,
    pub max_iter: usize,
    /// Skip the convergence-theory hypotheses (structural checks remain).
    pub unchecked: bool,
}

impl IGAHDConfig {
    pub fn new(alpha: f64, beta: f64, s: f64, max_iter: usize) -> Self {
        Self { alpha, beta, s, start_index: 1, max_iter, unchecked: false }
    }

    pub fn unchecked(mut self) -> Self {
        self.unchecked = true;
        self
    }

    /// Checks `α ≥ 3`, `0 ≤ β < 2√s` and `s ≤ 1/L`.
    pub fn validate(&self, lipschitz: Option<f64>) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("step must be positive, got {}", self.s)));
        }
        if self.start_index < 1 {
            return Err(Error::InvalidParameter("start index must be at least 1".into()));
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::InvalidParameter("alpha and beta must be finite".into()));
        }
        if self.unchecked {
            return Ok(());
        }
        if self.alpha < 3.0 {
            return Err(Error::Hypothesis(format!("alpha ≥ 3 required, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta < 2.0 * self.s.sqrt()) {
            return Err(Error::Hypothesis(format!(
                "0 ≤ beta < 2√s required, got beta = {}, 2√s = {}",
                self.beta,
                2.0 * self.s.sqrt()
            )));
        }
        let l = lipschitz.ok_or(Error::Missing("Lipschitz constant"))?;
        if self.s * l > 1.0 + 1e-12 {
            return Err(Error::Hypothesis(format!("s ≤ 1/L required, got s·L = {}", self.s * l)));
        }
        Ok(())
    }

    /// `t_k = (k − 1)/(α − 1)`.
    pub fn t(&self, k: usize) -> f64 {
        (k as f64 - 1.0) / (self.alpha - 1.0)
    }

    /// First index from which the energy provably stops increasing.
    ///
    /// The step `E_k → E_{k+1}` is nonincreasing once the gradient cross term
    /// is dominated: `(t r + 1)² ≤ t(t − 1)` with `t = t_{k+1}` and
    /// `r = β/√s − 1`. As `β → 2√s` the threshold grows without bound, so a
    /// fixed start such as `⌈α⌉` is not enough in general. Never below `⌈α⌉`.
    pub fn energy_decrease_from(&self) -> usize {
        let floor = self.alpha.ceil() as usize;
        let r = self.beta / self.s.sqrt() - 1.0;
        let (a, b) = (1.0 - r * r, 2.0 * r + 1.0);
        // Need a t² − b t − 1 ≥ 0; a = 0 only at β = 0, where it reads t ≥ 1.
        let t_min = if a > 0.0 {
            (b + (b * b + 4.0 * a).sqrt()) / (2.0 * a)
        } else if b < 0.0 {
            -1.0 / b
        } else {
            return usize::MAX;
        };
        // t_{k+1} = k/(α − 1).
        let k = (t_min.max(1.0) * (self.alpha - 1.0) - 1e-9).ceil() as usize;
        k.max(floor)
    }
}

/// Runs the method from `(x₀, x₁)` for `cfg.max_iter` steps.
pub fn igahd_run<O: GradientOracle + ?Sized>(
    oracle: &O,
    cfg: &IGAHDConfig,
    x0: &Vector,
    x1: &Vector,
) -> Result<Trace> {
    cfg.validate(oracle.lipschitz())?;
    check_start(oracle.dim(), x0, x1)?;
    let gap = gap_reference(oracle.report_opt());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let sqrt_s = cfg.s.sqrt();
    let damp = cfg.beta * sqrt_s;
    let k0 = cfg.start_index;

    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    let mut g_prev = oracle.gradient(&x_prev);
    let mut g = oracle.gradient(&x);
    push(&mut trace, oracle, k0 - 1, &x_prev, &g_prev, None, None);

    for k in k0..k0 + cfg.max_iter {
        let energy = energy_from(oracle, cfg, &x_prev, &x, &g_prev, &g, k);
        let momentum = 1.0 - cfg.alpha / k as f64;
        let mut y = &x + (&x - &x_prev) * momentum;
        if cfg.beta != 0.0 {
            y -= (&g - &g_prev) * damp;
            y -= &g_prev * (damp / k as f64);
        }
        let gy = oracle.gradient(&y);
        let x_next = &y - &gy * cfg.s;
        push(&mut trace, oracle, k, &x, &g, energy, Some(y));
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        let g_next = oracle.gradient(&x_next);
        x_prev = std::mem::replace(&mut x, x_next);
        g_prev = std::mem::replace(&mut g, g_next);
    }
    let k_last = k0 + cfg.max_iter;
    let energy = energy_from(oracle, cfg, &x_prev, &x, &g_prev, &g, k_last);
    push(&mut trace, oracle, k_last, &x, &g, energy, None);
    Ok(trace)
}

fn push<O: GradientOracle + ?Sized>(
    trace: &mut Trace,
    oracle: &O,
    k: usize,
    x: &Vector,
    g: &Vector,
    energy: Option<f64>,
    y: Option<Vector>,
) {
    let (value, grad_norm) = oracle.report(x, g);
    trace.iters.push(IterTrace { k, x: x.clone(), f_gap: gap_of(value, trace.gap), grad_norm, energy, y });
}

fn energy_from<O: GradientOracle + ?Sized>(
    oracle: &O,
    cfg: &IGAHDConfig,
    x_prev: &Vector,
    x: &Vector,
    g_prev: &Vector,
    g: &Vector,
    k: usize,
) -> Option<f64> {
    let fstar = oracle.opt_value()?;
    let xstar = oracle.opt_point()?;
    let t = cfg.t(k);
    let v = (x_prev - xstar) + (x - x_prev + g_prev * (cfg.beta * cfg.s.sqrt())) * t;
    Some(t * t * (oracle.value_with_gradient(x, g) - fstar) + oracle.norm_sq(&v) / (2.0 * cfg.s))
}

/// Lyapunov energy `E_k` of the gradient method at `(x_{k−1}, x_k)`.
pub fn igahd_energy(
    problem: &SmoothConvexProblem,
    cfg: &IGAHDConfig,
    x_prev: &Vector,
    x_cur: &Vector,
    k: usize,
) -> Result<f64> {
    problem.check_point(x_prev)?;
    problem.check_point(x_cur)?;
    if problem.opt_point().is_none() {
        return Err(Error::Missing("optimal point"));
    }
    if problem.opt_value().is_none() {
        return Err(Error::Missing("optimal value"));
    }
    let g_prev = problem.gradient(x_prev);
    let g = problem.gradient(x_cur);
    Ok(energy_from(problem, cfg, x_prev, x_cur, &g_prev, &g, k).expect("optimum checked"))
}

/// Nesterov/FISTA: the gradient method with `β = 0`.
pub fn fista_run<O: GradientOracle + ?Sized>(
    oracle: &O,
    alpha: f64,
    s: f64,
    x0: &Vector,
    x1: &Vector,
    max_iter: usize,
) -> Result<Trace> {
    igahd_run(oracle, &IGAHDConfig::new(alpha, 0.0, s, max_iter), x0, x1)
}

/// Slack of the reinforced descent inequality
/// `f(x) + ⟨∇f(y), y − x⟩ − (s/2)‖∇f(y)‖² − (s/2)‖∇f(x) − ∇f(y)‖² − f(y − s∇f(y))`,
/// nonnegative whenever `sL ≤ 1`.
pub fn descent_lemma_check(problem: &SmoothConvexProblem, x: &Vector, y: &Vector, s: f64) -> Result<f64> {
    problem.check_point(x)?;
    problem.check_point(y)?;
    let l = problem.lipschitz().ok_or(Error::Missing("Lipschitz constant"))?;
    if !(s > 0.0) || s * l > 1.0 + 1e-12 {
        return Err(Error::Hypothesis(format!("0 < s ≤ 1/L required, got s·L = {}", s * l)));
    }
    let gx = problem.gradient(x);
    let gy = problem.gradient(y);
    let step = y - &gy * s;
    Ok(problem.value(x) + gy.dot(&(y - x))
        - 0.5 * s * gy.norm_squared()
        - 0.5 * s * (&gx - &gy).norm_squared()
        - problem.value(&step))
}
