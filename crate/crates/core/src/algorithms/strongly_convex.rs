use crate::error::{Error, Result};
use crate::problem::{ProxFriendlyFunction, SmoothConvexProblem, Vector};
use crate::prox::envelope_strong_modulus;

use super::ipahd::smooth_prox;
use super::{check_start, gap_of, gap_reference, is_finite, non_finite, IterTrace, Trace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScVariant {
    Prox,
    ProxNs { lambda: f64 },
    Grad,
}

/// Parameters shared by the strongly convex variants.
#[derive(Clone, Debug, PartialEq)]
pub struct SCConfig {
    pub mu: f64,
    pub beta: f64,
    pub s: f64,
    pub variant: ScVariant,
    pub max_iter: usize,
    pub unchecked: bool,
}

impl SCConfig {
    pub fn new(mu: f64, beta: f64, s: f64, variant: ScVariant, max_iter: usize) -> Self {
        Self { mu, beta, s, variant, max_iter, unchecked: false }
    }

    pub fn unchecked(mut self) -> Self {
        self.unchecked = true;
        self
    }

    /// Modulus driving the coefficients: `μ`, or `μ/(1+λμ)` for the envelope variant.
    pub fn effective_mu(&self) -> f64 {
        match self.variant {
            ScVariant::ProxNs { lambda } => envelope_strong_modulus(self.mu, lambda),
            _ => self.mu,
        }
    }

    /// Linear rate `q = 1/(1 + ½√(μs))`.
    pub fn q(&self) -> f64 {
        1.0 / (1.0 + 0.5 * (self.effective_mu() * self.s).sqrt())
    }

    /// Gradient-sum weight `θ = 1/(1 + √(μs))`.
    pub fn theta(&self) -> f64 {
        1.0 / (1.0 + (self.effective_mu() * self.s).sqrt())
    }

    pub fn validate(&self, lipschitz: Option<f64>) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be positive, got {}", self.s)));
        }
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if let ScVariant::ProxNs { lambda } = self.variant {
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
            }
        }
        if self.unchecked {
            return Ok(());
        }
        let (mu, beta, s) = (self.mu, self.beta, self.s);
        let tol = 1e-12;
        match self.variant {
            ScVariant::Prox => {
                if beta > 1.0 / (2.0 * mu.sqrt()) * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("beta ≤ 1/(2√μ) violated: {beta} > {}", 0.5 / mu.sqrt())));
                }
                if s.sqrt() > beta * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("√s ≤ beta violated: {} > {beta}", s.sqrt())));
                }
            }
            ScVariant::ProxNs { lambda } => {
                let bound = 0.5 * (lambda + 1.0 / mu).sqrt();
                if beta > bound * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("beta ≤ ½√(λ + 1/μ) violated: {beta} > {bound}")));
                }
                if s.sqrt() > beta * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("√s ≤ beta violated: {} > {beta}", s.sqrt())));
                }
            }
            ScVariant::Grad => {
                if beta > 1.0 / mu.sqrt() * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("beta ≤ 1/√μ violated: {beta} > {}", 1.0 / mu.sqrt())));
                }
                let l = lipschitz.ok_or(Error::Missing("Lipschitz constant"))?;
                let first = if beta > 0.0 { mu.sqrt() / (8.0 * beta) } else { f64::INFINITY };
                if l > first * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!("L ≤ √μ/(8β) violated: {l} > {first}")));
                }
                let second = (mu.sqrt() / (2.0 * s) + mu / s.sqrt()) / (2.0 * beta * mu + 1.0 / s.sqrt() + 0.5 * mu.sqrt());
                if l > second * (1.0 + tol) {
                    return Err(Error::Hypothesis(format!(
                        "L ≤ (√μ/(2s) + μ/√s)/(2βμ + 1/√s + √μ/2) violated: {l} > {second}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn expect_variant(&self, want: &str) -> Result<()> {
        let ok = matches!(
            (self.variant, want),
            (ScVariant::Prox, "prox") | (ScVariant::ProxNs { .. }, "prox-ns") | (ScVariant::Grad, "grad")
        );
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("configuration variant {:?} does not match the {want} method", self.variant)))
        }
    }
}

/// Proximal method for strongly convex smooth problems.
pub fn ipahd_sc_run(problem: &SmoothConvexProblem, cfg: &SCConfig, x0: &Vector, x1: &Vector) -> Result<Trace> {
    cfg.expect_variant("prox")?;
    cfg.validate(problem.lipschitz())?;
    check_start(problem.dim(), x0, x1)?;
    let gap = gap_reference(problem.opt_value());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let (mu, beta, s) = (cfg.mu, cfg.beta, cfg.s);
    let (sqrt_mu, sqrt_s) = (mu.sqrt(), s.sqrt());
    let denom = 1.0 + 2.0 * (mu * s).sqrt();
    let keep = 1.0 / denom;
    let prox_param = (beta * sqrt_s + s) / denom;

    let g0 = problem.gradient(x0);
    trace.iters.push(IterTrace {
        k: 0,
        x: x0.clone(),
        f_gap: gap_of(problem.value(x0), gap),
        grad_norm: g0.norm(),
        energy: None,
        y: None,
    });
    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    for k in 1..=cfg.max_iter {
        let g = problem.gradient(&x);
        let energy = match (problem.opt_value(), problem.opt_point()) {
            (Some(fstar), Some(xstar)) => {
                let v = (&x - xstar) * sqrt_mu + (&x - &x_prev) / sqrt_s + &g * beta;
                Some(problem.value(&x) - fstar + 0.5 * v.norm_squared())
            }
            _ => None,
        };
        let mut entry =
            IterTrace { k, x: x.clone(), f_gap: gap_of(problem.value(&x), gap), grad_norm: g.norm(), energy, y: None };
        if k == cfg.max_iter {
            trace.iters.push(entry);
            break;
        }
        let y = &x + (&x - &x_prev) * keep + &g * (beta * sqrt_s * keep);
        let x_next = smooth_prox(problem, &y, prox_param, &mut trace.log, k)?;
        entry.y = Some(y);
        trace.iters.push(entry);
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        x_prev = std::mem::replace(&mut x, x_next);
    }
    Ok(trace)
}

/// Relaxed proximal method for a strongly convex non-smooth function,
/// driven by its Moreau envelope.
pub fn ipahd_ns_sc_run(f: &ProxFriendlyFunction, cfg: &SCConfig, x0: &Vector, x1: &Vector) -> Result<Trace> {
    cfg.expect_variant("prox-ns")?;
    let ScVariant::ProxNs { lambda } = cfg.variant else { unreachable!() };
    if !(f.strong_modulus() > 0.0) {
        return Err(Error::Hypothesis("function must be strongly convex".into()));
    }
    cfg.validate(None)?;
    check_start(f.dim(), x0, x1)?;
    let gap = gap_reference(f.opt_value());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let (beta, s) = (cfg.beta, cfg.s);
    let mu_eff = cfg.effective_mu();
    let sqrt_s = s.sqrt();
    let denom = 1.0 + 2.0 * (mu_eff * s).sqrt();
    let keep = 1.0 / denom;
    let theta = (beta * sqrt_s + s) / denom;
    let relax = lambda / (lambda + theta);

    let p0 = f.prox(x0, lambda);
    trace.iters.push(IterTrace {
        k: 0,
        x: x0.clone(),
        f_gap: gap_of(f.value(&p0), gap),
        grad_norm: (x0 - &p0).norm() / lambda,
        energy: None,
        y: None,
    });
    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    for k in 1..=cfg.max_iter {
        let p = f.prox(&x, lambda);
        let fp = f.value(&p);
        let diff = &x - &p;
        let energy = match (f.opt_value(), f.opt_point()) {
            (Some(fstar), Some(xstar)) => {
                let env = fp + diff.norm_squared() / (2.0 * lambda);
                let v = (&x - xstar) * mu_eff.sqrt() + (&x - &x_prev) / sqrt_s + &diff * (beta / lambda);
                Some(env - fstar + 0.5 * v.norm_squared())
            }
            _ => None,
        };
        let mut entry =
            IterTrace { k, x: x.clone(), f_gap: gap_of(fp, gap), grad_norm: diff.norm() / lambda, energy, y: None };
        if k == cfg.max_iter {
            trace.iters.push(entry);
            break;
        }
        let y = &x + (&x - &x_prev) * keep + &diff * (beta * sqrt_s * keep / lambda);
        let x_next = &y * relax + f.prox(&y, lambda + theta) * (1.0 - relax);
        entry.y = Some(y);
        trace.iters.push(entry);
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        x_prev = std::mem::replace(&mut x, x_next);
    }
    Ok(trace)
}

/// Gradient method for strongly convex smooth problems.
pub fn igahd_sc_run(problem: &SmoothConvexProblem, cfg: &SCConfig, x0: &Vector, x1: &Vector) -> Result<Trace> {
    cfg.expect_variant("grad")?;
    cfg.validate(problem.lipschitz())?;
    check_start(problem.dim(), x0, x1)?;
    let gap = gap_reference(problem.opt_value());
    let mut trace = Trace::new(gap, cfg.unchecked);
    let (mu, beta, s) = (cfg.mu, cfg.beta, cfg.s);
    let (sqrt_mu, sqrt_s) = (mu.sqrt(), s.sqrt());
    let denom = 1.0 + (mu * s).sqrt();
    let momentum = (1.0 - (mu * s).sqrt()) / denom;
    let damp = beta * sqrt_s / denom;
    let step = s / denom;

    let mut x_prev = x0.clone();
    let mut x = x1.clone();
    let mut g_prev = problem.gradient(&x_prev);
    trace.iters.push(IterTrace {
        k: 0,
        x: x_prev.clone(),
        f_gap: gap_of(problem.value(&x_prev), gap),
        grad_norm: g_prev.norm(),
        energy: None,
        y: None,
    });
    for k in 1..=cfg.max_iter {
        let g = problem.gradient(&x);
        let energy = match (problem.opt_value(), problem.opt_point()) {
            (Some(fstar), Some(xstar)) => {
                let v = (&x_prev - xstar) * sqrt_mu + (&x - &x_prev) / sqrt_s + &g_prev * beta;
                Some(problem.value(&x) - fstar + 0.5 * v.norm_squared())
            }
            _ => None,
        };
        trace.iters.push(IterTrace {
            k,
            x: x.clone(),
            f_gap: gap_of(problem.value(&x), gap),
            grad_norm: g.norm(),
            energy,
            y: None,
        });
        if k == cfg.max_iter {
            break;
        }
        let x_next = &x + (&x - &x_prev) * momentum - (&g - &g_prev) * damp - &g * step;
        if !is_finite(&x_next) {
            return Err(non_finite(k + 1, trace));
        }
        x_prev = std::mem::replace(&mut x, x_next);
        g_prev = g;
    }
    Ok(trace)
}

/// `S_k = θ^k Σ_{j ≤ k−2} θ^{−j} ‖∇f(x_j)‖²` for every trace entry, using the
/// recorded gradient norms.
pub fn theta_weighted_gradient_sum(trace: &Trace, theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0, 1), got {theta}")));
    }
    let mut out = Vec::with_capacity(trace.len());
    let mut sum = 0.0;
    for (i, _) in trace.iters.iter().enumerate() {
        // S_{k} = θ S_{k−1} + θ² g²_{k−2}
        sum *= theta;
        if i >= 2 {
            let g = trace.iters[i - 2].grad_norm;
            sum += theta * theta * g * g;
        }
        out.push(sum);
    }
    Ok(out)
}
