//! Discrete inertial methods with Hessian-driven damping.
//!
//! Every run returns a [`Trace`] whose entries are indexed by the iteration
//! counter `k`, starting with the entry for the first supplied point.

mod igahd;
mod ipahd;
mod strongly_convex;

pub use igahd::{descent_lemma_check, fista_run, igahd_energy, igahd_run, IGAHDConfig};
pub use ipahd::{
    check_growth_discrete, ipahd_delta, ipahd_ns_run, ipahd_run, DiscreteGrowth, IPAHDConfig, Schedule,
};
pub use strongly_convex::{
    igahd_sc_run, ipahd_ns_sc_run, ipahd_sc_run, theta_weighted_gradient_sum, SCConfig, ScVariant,
};

use crate::error::{Error, Result};
use crate::problem::{CompositeRLS, SmoothConvexProblem, Vector};

/// One iteration record.
#[derive(Clone, Debug, PartialEq)]
pub struct IterTrace {
    pub k: usize,
    pub x: Vector,
    pub f_gap: f64,
    pub grad_norm: f64,
    pub energy: Option<f64>,
    pub y: Option<Vector>,
}

/// What `f_gap` is measured against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapReference {
    /// The problem's known optimal value.
    Exact(f64),
    /// Best value observed across an experiment (no known optimum).
    Empirical(f64),
    /// Raw objective values; no reference was available.
    Raw,
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub iters: Vec<IterTrace>,
    pub gap: GapReference,
    /// Set when hypothesis validation was bypassed.
    pub unchecked: bool,
    pub log: Vec<String>,
}

impl Trace {
    pub(crate) fn new(gap: GapReference, unchecked: bool) -> Self {
        Self { iters: Vec::new(), gap, unchecked, log: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.iters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iters.is_empty()
    }

    pub fn last(&self) -> Option<&IterTrace> {
        self.iters.last()
    }

    pub fn get_k(&self, k: usize) -> Option<&IterTrace> {
        let first = self.iters.first()?.k;
        self.iters.get(k.checked_sub(first)?)
    }

    pub fn f_gaps(&self) -> Vec<f64> {
        self.iters.iter().map(|t| t.f_gap).collect()
    }

    pub fn energies(&self) -> Vec<Option<f64>> {
        self.iters.iter().map(|t| t.energy).collect()
    }

    /// Re-express a raw trace against an empirical reference value.
    pub fn rebase(&mut self, reference: f64) {
        let offset = match self.gap {
            GapReference::Raw => 0.0,
            GapReference::Exact(v) | GapReference::Empirical(v) => v,
        };
        for it in &mut self.iters {
            it.f_gap = it.f_gap + offset - reference;
        }
        self.gap = GapReference::Empirical(reference);
    }
}

/// Smallest `k` from which the recorded energy never increases by more than
/// `slack` between consecutive entries.
pub fn energy_monotone_from(trace: &Trace, slack: f64) -> Option<usize> {
    let mut start = None;
    let mut prev: Option<(usize, f64)> = None;
    for it in &trace.iters {
        let Some(e) = it.energy else {
            prev = None;
            continue;
        };
        match prev {
            Some((_, pe)) if e <= pe + slack => {}
            _ => start = Some(it.k),
        }
        prev = Some((it.k, e));
    }
    start
}

/// First-order oracle consumed by the gradient methods.
///
/// The metric-aware hooks let the same loop run in the Euclidean geometry of a
/// smooth problem or in the metric of a composite least-squares model.
pub trait GradientOracle {
    fn dim(&self) -> usize;
    fn value(&self, x: &Vector) -> f64;
    fn gradient(&self, x: &Vector) -> Vector;
    fn lipschitz(&self) -> Option<f64>;
    fn opt_value(&self) -> Option<f64>;
    fn opt_point(&self) -> Option<&Vector>;

    fn norm_sq(&self, v: &Vector) -> f64 {
        v.norm_squared()
    }

    /// Objective value when the gradient at `x` is already known.
    fn value_with_gradient(&self, x: &Vector, _grad: &Vector) -> f64 {
        self.value(x)
    }

    /// Value and gradient norm written to the trace.
    fn report(&self, x: &Vector, grad: &Vector) -> (f64, f64) {
        (self.value_with_gradient(x, grad), self.norm_sq(grad).sqrt())
    }

    /// Optimal value matching [`report`](Self::report).
    fn report_opt(&self) -> Option<f64> {
        self.opt_value()
    }
}

impl GradientOracle for SmoothConvexProblem {
    fn dim(&self) -> usize {
        SmoothConvexProblem::dim(self)
    }
    fn value(&self, x: &Vector) -> f64 {
        SmoothConvexProblem::value(self, x)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        SmoothConvexProblem::gradient(self, x)
    }
    fn lipschitz(&self) -> Option<f64> {
        SmoothConvexProblem::lipschitz(self)
    }
    fn opt_value(&self) -> Option<f64> {
        SmoothConvexProblem::opt_value(self)
    }
    fn opt_point(&self) -> Option<&Vector> {
        SmoothConvexProblem::opt_point(self)
    }
}

/// The metric envelope `f_M` of a composite least-squares model.
///
/// Its gradient in the metric `M` is `x − prox^M(x)` and is 1-Lipschitz there,
/// so a unit step reproduces one forward-backward step. Traces report the
/// composite objective at `prox^M(x)`.
#[derive(Clone, Debug)]
pub struct MetricEnvelope<'a> {
    rls: &'a CompositeRLS,
    reference_min: Option<f64>,
    reference_point: Option<Vector>,
}

impl<'a> MetricEnvelope<'a> {
    pub fn new(rls: &'a CompositeRLS) -> Self {
        Self { rls, reference_min: None, reference_point: None }
    }

    pub fn with_reference(mut self, min: f64, point: Option<Vector>) -> Self {
        self.reference_min = Some(min);
        self.reference_point = point;
        self
    }

    pub fn rls(&self) -> &CompositeRLS {
        self.rls
    }

    fn prox(&self, x: &Vector) -> Vector {
        self.rls.regularizer().prox(&self.rls.forward_step(x), self.rls.s())
    }
}

impl GradientOracle for MetricEnvelope<'_> {
    fn dim(&self) -> usize {
        self.rls.dim()
    }
    fn value(&self, x: &Vector) -> f64 {
        let g = self.gradient(x);
        self.value_with_gradient(x, &g)
    }
    fn gradient(&self, x: &Vector) -> Vector {
        x - self.prox(x)
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
    fn opt_value(&self) -> Option<f64> {
        self.reference_min
    }
    fn opt_point(&self) -> Option<&Vector> {
        self.reference_point.as_ref()
    }
    fn norm_sq(&self, v: &Vector) -> f64 {
        v.norm_squared() / self.rls.s() - (self.rls.a() * v).norm_squared()
    }
    fn value_with_gradient(&self, x: &Vector, grad: &Vector) -> f64 {
        let p = x - grad;
        self.rls.smooth_value(&p) + self.rls.regularizer().value(&p) + 0.5 * self.norm_sq(grad)
    }
    fn report(&self, x: &Vector, grad: &Vector) -> (f64, f64) {
        let p = x - grad;
        (self.rls.smooth_value(&p) + self.rls.regularizer().value(&p), self.norm_sq(grad).sqrt())
    }
}

pub(crate) fn gap_reference(opt: Option<f64>) -> GapReference {
    match opt {
        Some(v) => GapReference::Exact(v),
        None => GapReference::Raw,
    }
}

pub(crate) fn gap_of(value: f64, gap: GapReference) -> f64 {
    match gap {
        GapReference::Exact(v) | GapReference::Empirical(v) => value - v,
        GapReference::Raw => value,
    }
}

pub(crate) fn check_start(dim: usize, x0: &Vector, x1: &Vector) -> Result<()> {
    crate::error::check_dim(dim, x0.len())?;
    crate::error::check_dim(dim, x1.len())?;
    if x0.iter().chain(x1.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("starting points must be finite".into()));
    }
    Ok(())
}

pub(crate) fn non_finite(k: usize, trace: Trace) -> Error {
    Error::NonFinite { k, prefix: Box::new(trace.iters) }
}

pub(crate) fn is_finite(v: &Vector) -> bool {
    v.iter().all(|c| c.is_finite())
}
