//! Objective abstractions, canonical test problems and the composite
//! regularized least-squares model with its induced metric.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{check_dim, Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub type ValueFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type HessVecFn = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;
pub type ProxFn = Arc<dyn Fn(&Vector, f64) -> Vector + Send + Sync>;

/// Smooth convex objective with optional curvature data and known optimum.
#[derive(Clone)]
pub struct SmoothConvexProblem {
    name: String,
    dim: usize,
    value: ValueFn,
    gradient: GradFn,
    hess_vec: Option<HessVecFn>,
    prox: Option<ProxFn>,
    lipschitz: Option<f64>,
    strong_modulus: f64,
    opt_value: Option<f64>,
    opt_point: Option<Vector>,
}

impl fmt::Debug for SmoothConvexProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothConvexProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("strong_modulus", &self.strong_modulus)
            .field("opt_value", &self.opt_value)
            .field("has_hess_vec", &self.hess_vec.is_some())
            .field("has_prox", &self.prox.is_some())
            .finish()
    }
}

impl SmoothConvexProblem {
    pub fn new<V, G>(name: impl Into<String>, dim: usize, value: V, gradient: G) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        G: Fn(&Vector) -> Vector + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hess_vec: None,
            prox: None,
            lipschitz: None,
            strong_modulus: 0.0,
            opt_value: None,
            opt_point: None,
        }
    }

    pub fn with_hess_vec<H>(mut self, hess_vec: H) -> Self
    where
        H: Fn(&Vector, &Vector) -> Vector + Send + Sync + 'static,
    {
        self.hess_vec = Some(Arc::new(hess_vec));
        self
    }

    /// Attach a closed-form proximal map `(x, λ) ↦ prox_{λf}(x)`.
    pub fn with_prox<P>(mut self, prox: P) -> Self
    where
        P: Fn(&Vector, f64) -> Vector + Send + Sync + 'static,
    {
        self.prox = Some(Arc::new(prox));
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Self {
        self.lipschitz = Some(lipschitz);
        self
    }

    pub fn with_strong_modulus(mut self, mu: f64) -> Self {
        self.strong_modulus = mu;
        self
    }

    pub fn with_optimum(mut self, value: f64, point: Option<Vector>) -> Self {
        self.opt_value = Some(value);
        self.opt_point = point;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_point(&self, x: &Vector) -> Result<()> {
        check_dim(self.dim, x.len())
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }

    /// Hessian-vector product; central differences of the gradient with
    /// step `1e-6 (1 + |x|)` along `v` when no exact product is attached.
    pub fn hess_vec(&self, x: &Vector, v: &Vector) -> Vector {
        if let Some(hv) = &self.hess_vec {
            return hv(x, v);
        }
        let nv = v.norm();
        if nv == 0.0 {
            return Vector::zeros(self.dim);
        }
        let h = 1e-6 * (1.0 + x.norm());
        let dir = v / nv;
        let gp = self.gradient(&(x + &dir * h));
        let gm = self.gradient(&(x - &dir * h));
        (gp - gm) * (nv / (2.0 * h))
    }

    pub fn has_exact_hess_vec(&self) -> bool {
        self.hess_vec.is_some()
    }

    pub fn prox(&self, x: &Vector, lambda: f64) -> Option<Vector> {
        if lambda == 0.0 {
            return Some(x.clone());
        }
        self.prox.as_ref().map(|p| p(x, lambda))
    }

    pub fn has_prox(&self) -> bool {
        self.prox.is_some()
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn strong_modulus(&self) -> f64 {
        self.strong_modulus
    }

    pub fn opt_value(&self) -> Option<f64> {
        self.opt_value
    }

    pub fn opt_point(&self) -> Option<&Vector> {
        self.opt_point.as_ref()
    }
}

/// `½⟨Q(x − shift), x − shift⟩` with `Q = B diag(λ) Bᵀ`.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    eigenvalues: Vec<f64>,
    basis: Option<Matrix>,
    shift: Vector,
}

impl QuadraticProblem {
    pub fn new(eigenvalues: &[f64], basis: Option<Matrix>, shift: Vector) -> Result<Self> {
        let n = eigenvalues.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty eigenvalue list".into()));
        }
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l >= 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eigenvalues must be finite and nonnegative, got {bad}"
            )));
        }
        check_dim(n, shift.len())?;
        if let Some(b) = &basis {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.nrows().max(b.ncols()) });
            }
            let defect = (b.transpose() * b - Matrix::identity(n, n)).amax();
            if defect > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "basis is not orthogonal (defect {defect:e})"
                )));
            }
        }
        Ok(Self { eigenvalues: eigenvalues.to_vec(), basis, shift })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> Matrix {
        self.basis.clone().unwrap_or_else(|| Matrix::identity(self.dim(), self.dim()))
    }

    pub fn shift(&self) -> &Vector {
        &self.shift
    }

    pub fn hessian(&self) -> Matrix {
        let b = self.basis();
        &b * Matrix::from_diagonal(&Vector::from_column_slice(&self.eigenvalues)) * b.transpose()
    }

    /// Eigen-coordinates `Bᵀ(x − shift)`.
    pub fn to_modal(&self, x: &Vector) -> Vector {
        let d = x - &self.shift;
        match &self.basis {
            Some(b) => b.tr_mul(&d),
            None => d,
        }
    }

    /// Inverse of [`to_modal`](Self::to_modal).
    pub fn from_modal(&self, m: &Vector) -> Vector {
        match &self.basis {
            Some(b) => b * m + &self.shift,
            None => m + &self.shift,
        }
    }

    /// Same as `from_modal` for a direction (no shift).
    pub fn direction_from_modal(&self, m: &Vector) -> Vector {
        match &self.basis {
            Some(b) => b * m,
            None => m.clone(),
        }
    }

    pub fn direction_to_modal(&self, v: &Vector) -> Vector {
        match &self.basis {
            Some(b) => b.tr_mul(v),
            None => v.clone(),
        }
    }

    pub fn value(&self, x: &Vector) -> f64 {
        let m = self.to_modal(x);
        0.5 * m.iter().zip(&self.eigenvalues).map(|(c, l)| l * c * c).sum::<f64>()
    }

    pub fn gradient(&self, x: &Vector) -> Vector {
        let mut m = self.to_modal(x);
        m.iter_mut().zip(&self.eigenvalues).for_each(|(c, l)| *c *= l);
        self.direction_from_modal(&m)
    }

    pub fn hess_vec(&self, v: &Vector) -> Vector {
        let mut m = self.direction_to_modal(v);
        m.iter_mut().zip(&self.eigenvalues).for_each(|(c, l)| *c *= l);
        self.direction_from_modal(&m)
    }

    /// `prox_{λf}(x) = shift + B diag(1/(1+λλ_i)) Bᵀ(x − shift)`.
    pub fn prox(&self, x: &Vector, lambda: f64) -> Vector {
        let mut m = self.to_modal(x);
        m.iter_mut().zip(&self.eigenvalues).for_each(|(c, l)| *c /= 1.0 + lambda * l);
        self.from_modal(&m)
    }

    pub fn into_problem(self) -> SmoothConvexProblem {
        let l = self.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let mu = self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let name = format!("quadratic{:?}", self.eigenvalues);
        let dim = self.dim();
        let shift = self.shift.clone();
        let q = Arc::new(self);
        let (qv, qg, qh, qp) = (q.clone(), q.clone(), q.clone(), q);
        let mut p = SmoothConvexProblem::new(name, dim, move |x| qv.value(x), move |x| qg.gradient(x))
            .with_hess_vec(move |_, v| qh.hess_vec(v))
            .with_prox(move |x, lam| qp.prox(x, lam))
            .with_strong_modulus(mu)
            .with_optimum(0.0, Some(shift));
        if l > 0.0 {
            p = p.with_lipschitz(l);
        }
        p
    }
}

pub fn make_quadratic(eigenvalues: &[f64], shift: &Vector) -> Result<SmoothConvexProblem> {
    Ok(QuadraticProblem::new(eigenvalues, None, shift.clone())?.into_problem())
}

pub fn make_quadratic_in_basis(
    eigenvalues: &[f64],
    basis: &Matrix,
    shift: &Vector,
) -> Result<SmoothConvexProblem> {
    Ok(QuadraticProblem::new(eigenvalues, Some(basis.clone()), shift.clone())?.into_problem())
}

/// Counter-clockwise rotation of the plane by `angle` radians.
pub fn rotation_2d(angle: f64) -> Matrix {
    let (s, c) = angle.sin_cos();
    Matrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Logistic loss `Σ log(1 + exp(−yᵢ⟨aᵢ, x⟩))`, smooth with `L = ‖A‖²/4`.
pub fn make_logistic(a: Matrix, labels: Vector) -> Result<SmoothConvexProblem> {
    check_dim(a.nrows(), labels.len())?;
    let l = spectral_norm_sq(&a)? / 4.0;
    let dim = a.ncols();
    let data = Arc::new((a, labels));
    let dv = data.clone();
    let dg = data;
    let softplus = |t: f64| if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    let sigmoid = |t: f64| if t >= 0.0 { 1.0 / (1.0 + (-t).exp()) } else { let e = t.exp(); e / (1.0 + e) };
    Ok(SmoothConvexProblem::new(
        "logistic",
        dim,
        move |x| {
            let (a, y) = &*dv;
            let z = a * x;
            z.iter().zip(y.iter()).map(|(zi, yi)| softplus(-yi * zi)).sum()
        },
        move |x| {
            let (a, y) = &*dg;
            let z = a * x;
            let w = Vector::from_iterator(
                y.len(),
                z.iter().zip(y.iter()).map(|(zi, yi)| -yi * sigmoid(-yi * zi)),
            );
            a.tr_mul(&w)
        },
    )
    .with_lipschitz(l.max(f64::MIN_POSITIVE)))
}

/// Largest eigenvalue of `AᵀA` by power iteration on the smaller Gram matrix.
pub fn spectral_norm_sq(a: &Matrix) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    const MAX_ITER: usize = 10_000;
    let wide = a.nrows() < a.ncols();
    let n = if wide { a.nrows() } else { a.ncols() };
    let apply = |v: &Vector| -> Vector {
        if wide {
            a * a.tr_mul(v)
        } else {
            a.tr_mul(&(a * v))
        }
    };
    let mut v = Vector::from_fn(n, |i, _| 1.0 + 0.37 * ((i as f64) * 0.71 + 0.3).sin());
    v /= v.norm();
    let mut rho = 0.0;
    let mut quiet = 0;
    for _ in 0..MAX_ITER {
        let w = apply(&v);
        let next = v.dot(&w);
        if next == 0.0 && w.norm() == 0.0 {
            return Ok(0.0);
        }
        let residual = (&w - &v * next).norm();
        if residual <= 1e-10 * next.abs() {
            return Ok(next);
        }
        if (next - rho).abs() <= 1e-15 * next.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(next);
            }
        } else {
            quiet = 0;
        }
        rho = next;
        v = &w / w.norm();
    }
    Err(Error::NonConvergence { what: "power iteration", iterations: MAX_ITER, best: rho })
}

/// Possibly non-smooth convex function exposing its proximal map.
#[derive(Clone)]
pub struct ProxFriendlyFunction {
    tag: String,
    dim: usize,
    value: ValueFn,
    prox: ProxFn,
    strong_modulus: f64,
    opt_value: Option<f64>,
    opt_point: Option<Vector>,
}

impl fmt::Debug for ProxFriendlyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProxFriendlyFunction")
            .field("tag", &self.tag)
            .field("dim", &self.dim)
            .field("strong_modulus", &self.strong_modulus)
            .field("opt_value", &self.opt_value)
            .finish()
    }
}

impl ProxFriendlyFunction {
    pub fn new<V, P>(tag: impl Into<String>, dim: usize, value: V, prox: P) -> Self
    where
        V: Fn(&Vector) -> f64 + Send + Sync + 'static,
        P: Fn(&Vector, f64) -> Vector + Send + Sync + 'static,
    {
        Self {
            tag: tag.into(),
            dim,
            value: Arc::new(value),
            prox: Arc::new(prox),
            strong_modulus: 0.0,
            opt_value: None,
            opt_point: None,
        }
    }

    pub fn with_strong_modulus(mut self, mu: f64) -> Self {
        self.strong_modulus = mu;
        self
    }

    pub fn with_minimizer(mut self, value: f64, point: Vector) -> Self {
        self.opt_value = Some(value);
        self.opt_point = Some(point);
        self
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    /// `prox_{λf}(x)`; the identity for `λ = 0`.
    pub fn prox(&self, x: &Vector, lambda: f64) -> Vector {
        if lambda == 0.0 {
            x.clone()
        } else {
            (self.prox)(x, lambda)
        }
    }

    pub fn strong_modulus(&self) -> f64 {
        self.strong_modulus
    }

    pub fn opt_value(&self) -> Option<f64> {
        self.opt_value
    }

    pub fn opt_point(&self) -> Option<&Vector> {
        self.opt_point.as_ref()
    }

    /// `weight · f`, whose prox is `prox_{(λ·weight) f}`.
    pub fn scaled(&self, weight: f64) -> Self {
        let (fv, fp) = (self.clone(), self.clone());
        let mut out = Self::new(
            format!("{}*{weight}", self.tag),
            self.dim,
            move |x| weight * fv.value(x),
            move |x, lam| fp.prox(x, lam * weight),
        )
        .with_strong_modulus(weight * self.strong_modulus);
        if let (Some(v), Some(p)) = (self.opt_value, self.opt_point.clone()) {
            out = out.with_minimizer(weight * v, p);
        }
        out
    }

    /// View of a smooth problem with closed-form prox as a prox-friendly function.
    pub fn from_smooth(problem: &SmoothConvexProblem) -> Result<Self> {
        if !problem.has_prox() {
            return Err(Error::Missing("closed-form prox"));
        }
        let (pv, pp) = (problem.clone(), problem.clone());
        let mut out = Self::new(
            problem.name().to_string(),
            problem.dim(),
            move |x| pv.value(x),
            move |x, lam| pp.prox(x, lam).expect("prox checked at construction"),
        )
        .with_strong_modulus(problem.strong_modulus());
        if let (Some(v), Some(p)) = (problem.opt_value(), problem.opt_point()) {
            out = out.with_minimizer(v, p.clone());
        }
        Ok(out)
    }
}

/// `½‖y − Ax‖² + g(x)` together with the metric `M = s⁻¹I − AᵀA`.
#[derive(Clone, Debug)]
pub struct CompositeRLS {
    a: Matrix,
    y: Vector,
    regularizer: ProxFriendlyFunction,
    s: f64,
    opnorm_sq: f64,
}

impl CompositeRLS {
    pub fn new(a: Matrix, y: Vector, regularizer: ProxFriendlyFunction, s: f64) -> Result<Self> {
        check_dim(a.nrows(), y.len())?;
        check_dim(a.ncols(), regularizer.dim())?;
        let opnorm_sq = spectral_norm_sq(&a)?;
        Self::with_opnorm(a, y, regularizer, s, opnorm_sq)
    }

    /// Step `s = fraction / ‖A‖²`.
    pub fn with_step_fraction(
        a: Matrix,
        y: Vector,
        regularizer: ProxFriendlyFunction,
        fraction: f64,
    ) -> Result<Self> {
        check_dim(a.nrows(), y.len())?;
        check_dim(a.ncols(), regularizer.dim())?;
        let opnorm_sq = spectral_norm_sq(&a)?;
        let s = if opnorm_sq > 0.0 { fraction / opnorm_sq } else { fraction };
        Self::with_opnorm(a, y, regularizer, s, opnorm_sq)
    }

    fn with_opnorm(
        a: Matrix,
        y: Vector,
        regularizer: ProxFriendlyFunction,
        s: f64,
        opnorm_sq: f64,
    ) -> Result<Self> {
        if !(s > 0.0) || !(s * opnorm_sq < 1.0) {
            return Err(Error::Hypothesis(format!(
                "metric requires 0 < s‖A‖² < 1, got s = {s}, ‖A‖² = {opnorm_sq}"
            )));
        }
        let n = a.ncols();
        if n <= 50 {
            let m = Matrix::identity(n, n) / s - a.tr_mul(&a);
            let lo = SymmetricEigen::new(m).eigenvalues.min();
            if !(lo > 0.0) {
                return Err(Error::Hypothesis(format!(
                    "metric is not positive definite (smallest eigenvalue {lo:e})"
                )));
            }
        }
        Ok(Self { a, y, regularizer, s, opnorm_sq })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn y(&self) -> &Vector {
        &self.y
    }

    pub fn regularizer(&self) -> &ProxFriendlyFunction {
        &self.regularizer
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn opnorm_sq(&self) -> f64 {
        self.opnorm_sq
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn smooth_value(&self, x: &Vector) -> f64 {
        0.5 * (&self.y - &self.a * x).norm_squared()
    }

    pub fn composite_value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.smooth_value(x) + self.regularizer.value(x))
    }

    /// `⟨Mv, v⟩ = ‖v‖²/s − ‖Av‖²`.
    pub fn metric_norm_sq(&self, v: &Vector) -> Result<f64> {
        check_dim(self.dim(), v.len())?;
        Ok(v.norm_squared() / self.s - (&self.a * v).norm_squared())
    }

    /// Forward (gradient) step `x + sAᵀ(y − Ax)`.
    pub fn forward_step(&self, x: &Vector) -> Vector {
        x + self.a.tr_mul(&(&self.y - &self.a * x)) * self.s
    }

    /// Metric proximal map: one forward-backward step.
    pub fn prox_metric_m(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.len())?;
        Ok(self.regularizer.prox(&self.forward_step(x), self.s))
    }

    /// Gradient of the metric envelope in the metric `M`: `x − prox^M(x)`.
    pub fn grad_fm(&self, x: &Vector) -> Result<Vector> {
        Ok(x - self.prox_metric_m(x)?)
    }

    /// Metric envelope `f(p) + ½‖x − p‖²_M` with `p = prox^M(x)`.
    pub fn metric_envelope_value(&self, x: &Vector) -> Result<f64> {
        let p = self.prox_metric_m(x)?;
        let d = x - &p;
        Ok(self.composite_value(&p)? + 0.5 * self.metric_norm_sq(&d)?)
    }
}
