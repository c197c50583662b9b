//! Closed-form trajectories of one eigenmode of a quadratic,
//!
//! `ẍ + (α/t + βλ) ẋ + λ (b + γ/t) x = 0`,
//!
//! through Kummer functions (`β²λ² ≠ 4bλ`), Bessel functions (equality) or
//! elementary functions (`λ = 0`).
//!
//! Basis values are carried as a mantissa times `e^{s(t)}` with a real log
//! scale `s(t)`, so that modes decaying like `e^{−βλt}` stay representable.
//! Fitted coefficients are relative to the basis normalised at the fitting
//! time.

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::special::{
    bessel_j_complex, bessel_j_derivative_complex, bessel_y_complex, bessel_y_derivative_complex, kummer_m_scaled,
    kummer_u,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormParams {
    /// Eigenvalue of the mode.
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    /// Coefficient of the `1/t` part of the time scaling.
    pub gamma: f64,
}

impl ClosedFormParams {
    pub fn new(lambda: f64, alpha: f64, beta: f64, b: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("alpha", alpha), ("beta", beta), ("b", b)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma must be finite, got {gamma}")));
        }
        Ok(Self { lambda, alpha, beta, b, gamma })
    }

    /// `β²λ² − 4bλ`.
    pub fn discriminant(&self) -> f64 {
        let bl = self.beta * self.lambda;
        bl * bl - 4.0 * self.b * self.lambda
    }

    pub fn branch(&self) -> ClosedFormBranch {
        if self.lambda == 0.0 {
            return ClosedFormBranch::Kernel;
        }
        let bl = self.beta * self.lambda;
        let scale = (bl * bl).max(4.0 * self.b * self.lambda);
        if self.discriminant().abs() <= 1e-12 * scale {
            ClosedFormBranch::Bessel
        } else {
            ClosedFormBranch::Kummer
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedFormBranch {
    /// `e^{−(βλ+ξ)t/2} {M, U}(α/2 − κ, α, ξt)`.
    Kummer,
    /// `t^{−σ} e^{−βλt/2} {J, Y}_{α−1}(ζ√t)`.
    Bessel,
    /// `λ = 0`: `{1, t^{1−α}}` (or `{1, ln t}` at `α = 1`).
    Kernel,
}

/// A closed-form solution `x(t) = Re Σ c_j φ_j(t) e^{−log_ref_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormSpec {
    pub params: ClosedFormParams,
    pub branch: ClosedFormBranch,
    /// `√(β²λ² − 4bλ)`, zero on the Bessel branch.
    pub xi: C,
    /// `λ(γ − αβ/2)/ξ`, zero off the Kummer branch.
    pub kappa: C,
    /// `(α − 1)/2`.
    pub sigma: f64,
    /// `2√(λ(γ − αβ/2))`.
    pub zeta: C,
    pub c1: C,
    pub c2: C,
    /// Log scales dividing each basis function.
    pub log_ref: [f64; 2],
}

struct Basis {
    val: [C; 2],
    der: [C; 2],
    log: [f64; 2],
}

impl ClosedFormSpec {
    /// Solution data with both combination coefficients still zero.
    pub fn new(params: ClosedFormParams) -> Self {
        let branch = params.branch();
        let drift = params.lambda * (params.gamma - params.alpha * params.beta / 2.0);
        let (xi, kappa) = match branch {
            ClosedFormBranch::Kummer => {
                let xi = C::new(params.discriminant(), 0.0).sqrt();
                (xi, drift / xi)
            }
            _ => (C::new(0.0, 0.0), C::new(0.0, 0.0)),
        };
        Self {
            params,
            branch,
            xi,
            kappa,
            sigma: (params.alpha - 1.0) / 2.0,
            zeta: 2.0 * C::new(drift, 0.0).sqrt(),
            c1: C::new(0.0, 0.0),
            c2: C::new(0.0, 0.0),
            log_ref: [0.0, 0.0],
        }
    }

    /// Absolute coefficients on the unnormalised basis.
    pub fn with_coefficients(mut self, c1: C, c2: C) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.log_ref = [0.0, 0.0];
        self
    }

    /// Kummer parameter `α/2 − κ`.
    pub fn kummer_a(&self) -> C {
        self.params.alpha / 2.0 - self.kappa
    }

    fn basis(&self, t: f64) -> Result<Basis> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("closed form needs t > 0, got {t}")));
        }
        let p = &self.params;
        match self.branch {
            ClosedFormBranch::Kernel => {
                let one = C::new(1.0, 0.0);
                let zero = C::new(0.0, 0.0);
                let (v, d) = if p.alpha == 1.0 {
                    (t.ln(), 1.0 / t)
                } else {
                    (t.powf(1.0 - p.alpha), (1.0 - p.alpha) * t.powf(-p.alpha))
                };
                Ok(Basis { val: [one, C::new(v, 0.0)], der: [zero, C::new(d, 0.0)], log: [0.0, 0.0] })
            }
            ClosedFormBranch::Kummer => {
                let bl = p.beta * p.lambda;
                let xi = self.xi;
                let a = self.kummer_a();
                let bk = C::new(p.alpha, 0.0);
                let z = xi * t;
                let pref = (p.alpha / 2.0 * xi.ln()).exp();
                let e1 = -(bl - xi) * t / 2.0;
                let e2 = -(bl + xi) * t / 2.0;
                let ph1 = pref * C::new(0.0, e1.im).exp();
                let ph2 = pref * C::new(0.0, e2.im).exp();
                let drift = -(bl + xi) / 2.0;
                let m = kummer_m_scaled(a, bk, z)?;
                let m1 = kummer_m_scaled(a + 1.0, bk + 1.0, z)?;
                let u = kummer_u(a, bk, z)?;
                let u1 = kummer_u(a + 1.0, bk + 1.0, z)?;
                Ok(Basis {
                    val: [ph1 * m, ph2 * u],
                    der: [ph1 * (drift * m + xi * a / bk * m1), ph2 * (drift * u - xi * a * u1)],
                    log: [e1.re, e2.re],
                })
            }
            ClosedFormBranch::Bessel => {
                if self.zeta.norm() == 0.0 {
                    return Err(Error::Domain("Bessel branch with zero argument scale (γ = αβ/2)".into()));
                }
                let nu = p.alpha - 1.0;
                let s = t.sqrt();
                let w = self.zeta * s;
                let j = bessel_j_complex(nu, w)?;
                let y = bessel_y_complex(nu, w)?;
                let dj = bessel_j_derivative_complex(nu, w)?;
                let dy = bessel_y_derivative_complex(nu, w)?;
                let drift = -self.sigma / t - p.beta * p.lambda / 2.0;
                let chain = self.zeta / (2.0 * s);
                let log = -self.sigma * t.ln() - p.beta * p.lambda * t / 2.0;
                Ok(Basis { val: [j, y], der: [j * drift + dj * chain, y * drift + dy * chain], log: [log, log] })
            }
        }
    }

    fn combine(&self, t: f64, values: &[C; 2], log: &[f64; 2]) -> Result<f64> {
        let mut sum = C::new(0.0, 0.0);
        let mut size = 0.0;
        for (j, c) in [self.c1, self.c2].into_iter().enumerate() {
            if c == C::new(0.0, 0.0) {
                continue;
            }
            let term = c * values[j] * (log[j] - self.log_ref[j]).exp();
            if !(term.re.is_finite() && term.im.is_finite()) {
                return Err(Error::Domain(format!("closed form overflows at t = {t}")));
            }
            sum += term;
            size += term.norm();
        }
        if sum.im.abs() > 1e-8 * size {
            return Err(Error::ImaginaryResidue { t, residue: sum.im.abs() / size });
        }
        Ok(sum.re)
    }
}

/// `(x(t), ẋ(t))`.
pub fn closed_form_state(cf: &ClosedFormSpec, t: f64) -> Result<(f64, f64)> {
    let basis = cf.basis(t)?;
    Ok((cf.combine(t, &basis.val, &basis.log)?, cf.combine(t, &basis.der, &basis.log)?))
}

/// `x(t)`.
pub fn closed_form_eval(cf: &ClosedFormSpec, t: f64) -> Result<f64> {
    Ok(closed_form_state(cf, t)?.0)
}

/// Fits the coefficients to `x(t0) = x0`, `ẋ(t0) = xdot0`.
pub fn fit_closed_form_ic(params: ClosedFormParams, t0: f64, x0: f64, xdot0: f64) -> Result<ClosedFormSpec> {
    let mut cf = ClosedFormSpec::new(params);
    let basis = cf.basis(t0)?;
    let norms: Vec<f64> =
        (0..2).map(|j| (basis.val[j].norm_sqr() + basis.der[j].norm_sqr()).sqrt()).collect();
    if norms.iter().any(|n| !(*n > 0.0) || !n.is_finite()) {
        return Err(Error::IllConditioned { condition: f64::INFINITY });
    }
    let (a11, a12) = (basis.val[0] / norms[0], basis.val[1] / norms[1]);
    let (a21, a22) = (basis.der[0] / norms[0], basis.der[1] / norms[1]);
    let det = a11 * a22 - a12 * a21;
    let fro2 = a11.norm_sqr() + a12.norm_sqr() + a21.norm_sqr() + a22.norm_sqr();
    let smax = ((fro2 + (fro2 * fro2 - 4.0 * det.norm_sqr()).max(0.0).sqrt()) / 2.0).sqrt();
    let condition = if det.norm() == 0.0 { f64::INFINITY } else { smax * smax / det.norm() };
    if !(condition <= 1e10) {
        return Err(Error::IllConditioned { condition });
    }
    let (x0, xd) = (C::new(x0, 0.0), C::new(xdot0, 0.0));
    cf.c1 = (a22 * x0 - a12 * xd) / det / norms[0];
    cf.c2 = (a11 * xd - a21 * x0) / det / norms[1];
    cf.log_ref = basis.log;
    Ok(cf)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticRate {
    pub exp_rate: f64,
    pub poly_power: f64,
}

/// Dominant decay `|x(t)| ≈ t^{−poly_power} e^{−exp_rate·t}` with `γ = 0`.
///
/// In the overdamped case the slow Kummer mode decays at
/// `(βλ − ξ)/2 = 2bλ/(βλ + ξ)`, which tends to `b/β` for large `λ`.
pub fn asymptotic_rate(lambda: f64, alpha: f64, beta: f64, b: f64) -> AsymptoticRate {
    let params = ClosedFormParams { lambda, alpha, beta, b, gamma: 0.0 };
    let bl = beta * lambda;
    match params.branch() {
        ClosedFormBranch::Kummer if params.discriminant() > 0.0 => {
            let xi = params.discriminant().sqrt();
            let kappa = -alpha * bl / (2.0 * xi);
            AsymptoticRate { exp_rate: 2.0 * b * lambda / (bl + xi), poly_power: alpha / 2.0 - kappa.abs() }
        }
        ClosedFormBranch::Kummer => AsymptoticRate { exp_rate: bl / 2.0, poly_power: alpha / 2.0 },
        ClosedFormBranch::Bessel => AsymptoticRate { exp_rate: bl / 2.0, poly_power: (2.0 * alpha - 1.0) / 4.0 },
        ClosedFormBranch::Kernel => AsymptoticRate { exp_rate: 0.0, poly_power: 0.0 },
    }
}

/// A mode of `ẍ + (α/t) ẋ + t^p λ ẋ + c t^{p−1} λ x = 0` written in
/// `τ = t^{1+p}` as a constant-damping mode:
/// `y'' + (α'/τ + β'λ) y' + λ (γ'/τ) y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RescaledSystem {
    pub lambda: f64,
    pub beta_exp: f64,
    pub c: f64,
    pub alpha: f64,
    /// `(α + p)/(1 + p)`.
    pub alpha_prime: f64,
    /// `1/(1 + p)`.
    pub damping_prime: f64,
    /// `c/(1 + p)²`.
    pub gamma_prime: f64,
    /// `λ/(1 + p)`.
    pub xi: C,
    /// `(c − (α + p)/2)/(1 + p)`.
    pub kappa: C,
    /// `(α' − 1)/2`.
    pub sigma: f64,
}

impl RescaledSystem {
    pub fn params(&self) -> ClosedFormParams {
        ClosedFormParams {
            lambda: self.lambda,
            alpha: self.alpha_prime,
            beta: self.damping_prime,
            b: 0.0,
            gamma: self.gamma_prime,
        }
    }

    pub fn tau(&self, t: f64) -> f64 {
        t.powf(1.0 + self.beta_exp)
    }

    pub fn t_of_tau(&self, tau: f64) -> f64 {
        tau.powf(1.0 / (1.0 + self.beta_exp))
    }

    /// `dτ/dt`.
    pub fn tau_rate(&self, t: f64) -> f64 {
        (1.0 + self.beta_exp) * t.powf(self.beta_exp)
    }

    /// Fits to `x(t0) = x0`, `ẋ(t0) = xdot0` in the original time.
    pub fn fit(&self, t0: f64, x0: f64, xdot0: f64) -> Result<ClosedFormSpec> {
        if !(t0 > 0.0) {
            return Err(Error::Domain(format!("t0 must be positive, got {t0}")));
        }
        fit_closed_form_ic(self.params(), self.tau(t0), x0, xdot0 / self.tau_rate(t0))
    }

    /// `(x(t), ẋ(t))` in the original time.
    pub fn state(&self, cf: &ClosedFormSpec, t: f64) -> Result<(f64, f64)> {
        let (y, dy) = closed_form_state(cf, self.tau(t))?;
        Ok((y, dy * self.tau_rate(t)))
    }
}

pub fn rescaled_change_of_variable(lambda: f64, beta_exp: f64, c: f64, alpha: f64) -> Result<RescaledSystem> {
    if !(beta_exp >= 0.0) || !beta_exp.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent must be nonnegative, got {beta_exp}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if !(lambda >= 0.0) || !(alpha >= 0.0) {
        return Err(Error::InvalidParameter("lambda and alpha must be nonnegative".into()));
    }
    let q = 1.0 + beta_exp;
    let alpha_prime = (alpha + beta_exp) / q;
    let (xi, kappa) = if lambda > 0.0 {
        (C::new(lambda / q, 0.0), C::new((c - (alpha + beta_exp) / 2.0) / q, 0.0))
    } else {
        (C::new(0.0, 0.0), C::new(0.0, 0.0))
    };
    Ok(RescaledSystem {
        lambda,
        beta_exp,
        c,
        alpha,
        alpha_prime,
        damping_prime: 1.0 / q,
        gamma_prime: c / (q * q),
        xi,
        kappa,
        sigma: (alpha_prime - 1.0) / 2.0,
    })
}
