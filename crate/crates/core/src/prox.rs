//! Moreau envelope calculus and the standard proximal operators.

use nalgebra::SVD;

use crate::error::{check_dim, Error, Result};
use crate::problem::{Matrix, ProxFriendlyFunction, SmoothConvexProblem, Vector};

/// Moreau envelope `f_λ` of a prox-friendly function.
#[derive(Clone, Debug)]
pub struct EnvelopeView {
    base: ProxFriendlyFunction,
    lambda: f64,
}

impl EnvelopeView {
    pub fn new(base: ProxFriendlyFunction, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("envelope parameter must be positive, got {lambda}")));
        }
        Ok(Self { base, lambda })
    }

    pub fn base(&self) -> &ProxFriendlyFunction {
        &self.base
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let p = self.base.prox(x, self.lambda);
        self.base.value(&p) + (x - &p).norm_squared() / (2.0 * self.lambda)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        (x - self.base.prox(x, self.lambda)) / self.lambda
    }

    /// `prox_{θ f_λ}(x) = (λ/(λ+θ)) x + (θ/(λ+θ)) prox_{(λ+θ) f}(x)`.
    pub fn prox(&self, theta: f64, x: &Vector) -> Vector {
        if theta == 0.0 {
            return x.clone();
        }
        let lam = self.lambda;
        let total = lam + theta;
        x * (lam / total) + self.base.prox(x, total) * (theta / total)
    }

    pub fn lipschitz(&self) -> f64 {
        1.0 / self.lambda
    }

    pub fn strong_modulus(&self) -> f64 {
        envelope_strong_modulus(self.base.strong_modulus(), self.lambda)
    }

    /// The envelope as a prox-friendly function, so envelopes can be nested.
    pub fn as_prox_friendly(&self) -> ProxFriendlyFunction {
        let (ev, ep) = (self.clone(), self.clone());
        let mut out = ProxFriendlyFunction::new(
            format!("env[{}; {}]", self.base.tag(), self.lambda),
            self.dim(),
            move |x| ev.value(x),
            move |x, theta| ep.prox(theta, x),
        )
        .with_strong_modulus(self.strong_modulus());
        if let (Some(v), Some(p)) = (self.base.opt_value(), self.base.opt_point()) {
            out = out.with_minimizer(v, p.clone());
        }
        out
    }

    /// The envelope as a smooth problem with `L = 1/λ` and exact prox.
    pub fn to_smooth_problem(&self) -> SmoothConvexProblem {
        let (ev, eg, ep) = (self.clone(), self.clone(), self.clone());
        let mut p = SmoothConvexProblem::new(
            format!("env[{}; {}]", self.base.tag(), self.lambda),
            self.dim(),
            move |x| ev.value(x),
            move |x| eg.gradient(x),
        )
        .with_prox(move |x, theta| ep.prox(theta, x))
        .with_lipschitz(self.lipschitz())
        .with_strong_modulus(self.strong_modulus());
        if let Some(v) = self.base.opt_value() {
            p = p.with_optimum(v, self.base.opt_point().cloned());
        }
        p
    }
}

pub fn envelope_value(e: &EnvelopeView, x: &Vector) -> Result<f64> {
    check_dim(e.dim(), x.len())?;
    Ok(e.value(x))
}

pub fn envelope_gradient(e: &EnvelopeView, x: &Vector) -> Result<Vector> {
    check_dim(e.dim(), x.len())?;
    Ok(e.gradient(x))
}

pub fn prox_of_envelope(e: &EnvelopeView, theta: f64, x: &Vector) -> Result<Vector> {
    check_dim(e.dim(), x.len())?;
    if !(theta >= 0.0) {
        return Err(Error::InvalidParameter(format!("prox parameter must be nonnegative, got {theta}")));
    }
    Ok(e.prox(theta, x))
}

/// Strong-convexity modulus of `f_λ` when `f` has modulus `μ`.
pub fn envelope_strong_modulus(mu: f64, lambda: f64) -> f64 {
    mu / (1.0 + lambda * mu)
}

/// Soft thresholding.
pub fn prox_l1(x: &Vector, lambda: f64) -> Vector {
    x.map(|v| v.signum() * (v.abs() - lambda).max(0.0))
}

/// Partition of `{0, …, n−1}` into groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPartition {
    groups: Vec<Vec<usize>>,
    n: usize,
}

impl GroupPartition {
    pub fn new(groups: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        for g in &groups {
            for &i in g {
                if i >= n {
                    return Err(Error::InvalidParameter(format!("group index {i} out of range 0..{n}")));
                }
                if seen[i] {
                    return Err(Error::InvalidParameter(format!("index {i} appears in more than one group")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!("index {i} is not covered by any group")));
        }
        Ok(Self { groups, n })
    }

    /// Consecutive blocks of `size` (the last one may be shorter).
    pub fn contiguous(n: usize, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter("group size must be positive".into()));
        }
        let groups = (0..n).step_by(size).map(|s| (s..(s + size).min(n)).collect()).collect();
        Self::new(groups, n)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn dim(&self) -> usize {
        self.n
    }
}

/// Block soft thresholding for `Σ_g ‖x_g‖`.
pub fn prox_group_l1l2(x: &Vector, groups: &GroupPartition, lambda: f64) -> Result<Vector> {
    check_dim(groups.dim(), x.len())?;
    let mut out = x.clone();
    for g in groups.groups() {
        let norm = g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { (1.0 - lambda / norm).max(0.0) } else { 0.0 };
        for &i in g {
            out[i] = x[i] * scale;
        }
    }
    Ok(out)
}

/// Exact prox of `λ Σ|z_{i+1} − z_i|` by Condat's direct algorithm.
pub fn prox_tv1d(x: &Vector, lambda: f64) -> Vector {
    let n = x.len();
    let mut out = Vector::zeros(n);
    if n == 0 {
        return out;
    }
    if lambda <= 0.0 {
        return x.clone();
    }
    let input = x.as_slice();
    let o = out.as_mut_slice();
    let (mut k, mut k0, mut kplus, mut kminus) = (0usize, 0usize, 0usize, 0usize);
    let mut umin = lambda;
    let mut umax = -lambda;
    let mut vmin = input[0] - lambda;
    let mut vmax = input[0] + lambda;
    let two_lambda = 2.0 * lambda;
    loop {
        while k == n - 1 {
            if umin < 0.0 {
                loop {
                    o[k0] = vmin;
                    k0 += 1;
                    if k0 > kminus {
                        break;
                    }
                }
                k = k0;
                kminus = k0;
                vmin = input[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                loop {
                    o[k0] = vmax;
                    k0 += 1;
                    if k0 > kplus {
                        break;
                    }
                }
                k = k0;
                kplus = k0;
                vmax = input[k0];
                umax = -lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    o[k0] = vmin;
                    k0 += 1;
                }
                return out;
            }
        }
        umin += input[k + 1] - vmin;
        if umin < -lambda {
            loop {
                o[k0] = vmin;
                k0 += 1;
                if k0 > kminus {
                    break;
                }
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = input[k0];
            vmax = vmin + two_lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        umax += input[k + 1] - vmax;
        if umax > lambda {
            loop {
                o[k0] = vmax;
                k0 += 1;
                if k0 > kplus {
                    break;
                }
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmax = input[k0];
            vmin = vmax - two_lambda;
            umin = lambda;
            umax = -lambda;
        } else {
            k += 1;
            if umin >= lambda {
                kminus = k;
                vmin += (umin - lambda) / (k - k0 + 1) as f64;
                umin = lambda;
            }
            if umax <= -lambda {
                kplus = k;
                vmax += (umax + lambda) / (k - k0 + 1) as f64;
                umax = -lambda;
            }
        }
    }
}

/// Singular-value soft thresholding.
pub fn prox_nuclear(x: &Matrix, lambda: f64) -> Result<Matrix> {
    if x.is_empty() {
        return Ok(x.clone());
    }
    let svd = SVD::try_new(x.clone(), true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::LinearAlgebra("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested Vᵀ");
    let shrunk = svd.singular_values.map(|s| (s - lambda).max(0.0));
    Ok(u * Matrix::from_diagonal(&shrunk) * vt)
}

pub fn total_variation(x: &Vector) -> f64 {
    x.as_slice().windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

pub fn nuclear_norm_value(x: &Matrix) -> f64 {
    x.singular_values().sum()
}

/// `f ≡ 0`.
pub fn zero_function(dim: usize) -> ProxFriendlyFunction {
    ProxFriendlyFunction::new("zero", dim, |_| 0.0, |x, _| x.clone()).with_minimizer(0.0, Vector::zeros(dim))
}

/// `‖x‖₁`.
pub fn l1_norm(dim: usize) -> ProxFriendlyFunction {
    ProxFriendlyFunction::new("l1", dim, |x| x.lp_norm(1), prox_l1).with_minimizer(0.0, Vector::zeros(dim))
}

/// `(μ/2)‖x‖²`.
pub fn half_sq_norm(dim: usize, mu: f64) -> ProxFriendlyFunction {
    ProxFriendlyFunction::new(
        "half-sq",
        dim,
        move |x| 0.5 * mu * x.norm_squared(),
        move |x, lam| x / (1.0 + lam * mu),
    )
    .with_strong_modulus(mu)
    .with_minimizer(0.0, Vector::zeros(dim))
}

/// `‖x‖₁ + (μ/2)‖x‖²`.
pub fn l1_plus_half_sq(dim: usize, mu: f64) -> ProxFriendlyFunction {
    ProxFriendlyFunction::new(
        "l1+half-sq",
        dim,
        move |x| x.lp_norm(1) + 0.5 * mu * x.norm_squared(),
        move |x, lam| prox_l1(x, lam) / (1.0 + lam * mu),
    )
    .with_strong_modulus(mu)
    .with_minimizer(0.0, Vector::zeros(dim))
}

/// `Σ_g ‖x_g‖₂`.
pub fn group_norm(groups: GroupPartition) -> ProxFriendlyFunction {
    let dim = groups.dim();
    let gv = groups.clone();
    ProxFriendlyFunction::new(
        "group-l1l2",
        dim,
        move |x| {
            gv.groups().iter().map(|g| g.iter().map(|&i| x[i] * x[i]).sum::<f64>().sqrt()).sum()
        },
        move |x, lam| prox_group_l1l2(x, &groups, lam).expect("dimension checked by caller"),
    )
    .with_minimizer(0.0, Vector::zeros(dim))
}

/// One-dimensional total variation `Σ|x_{i+1} − x_i|`.
pub fn total_variation_1d(dim: usize) -> ProxFriendlyFunction {
    ProxFriendlyFunction::new("tv1d", dim, total_variation, prox_tv1d).with_minimizer(0.0, Vector::zeros(dim))
}

/// Nuclear norm of a `rows × cols` matrix stored column-major in a vector.
pub fn nuclear_norm(rows: usize, cols: usize) -> ProxFriendlyFunction {
    let dim = rows * cols;
    ProxFriendlyFunction::new(
        "nuclear",
        dim,
        move |x| nuclear_norm_value(&Matrix::from_column_slice(rows, cols, x.as_slice())),
        move |x, lam| {
            let m = Matrix::from_column_slice(rows, cols, x.as_slice());
            let p = prox_nuclear(&m, lam).unwrap_or_else(|_| {
                let svd = SVD::new(m, true, true);
                let shrunk = svd.singular_values.map(|s| (s - lam).max(0.0));
                svd.u.unwrap() * Matrix::from_diagonal(&shrunk) * svd.v_t.unwrap()
            });
            Vector::from_column_slice(p.as_slice())
        },
    )
    .with_minimizer(0.0, Vector::zeros(dim))
}

/// Look up one of the built-in prox-friendly functions by tag.
pub fn prox_function_by_tag(tag: &str, dim: usize, mu: f64) -> Result<ProxFriendlyFunction> {
    match tag {
        "zero" => Ok(zero_function(dim)),
        "l1" => Ok(l1_norm(dim)),
        "half-sq" => Ok(half_sq_norm(dim, mu)),
        "l1+half-sq" => Ok(l1_plus_half_sq(dim, mu)),
        "tv1d" => Ok(total_variation_1d(dim)),
        other => Err(Error::InvalidParameter(format!("unknown prox-friendly function `{other}`"))),
    }
}
