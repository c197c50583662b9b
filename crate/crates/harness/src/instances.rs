//! Seeded regularized least-squares instances and their reference optima.

use hessdamp_core::problem::{CompositeRLS, ProxFriendlyFunction};
use hessdamp_core::prox::{group_norm, l1_norm, nuclear_norm, total_variation_1d, GroupPartition};
use hessdamp_core::{Matrix, Vector};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::rng::Rng;

/// Step fraction: `s = STEP_FRACTION/‖A‖²`.
pub const STEP_FRACTION: f64 = 0.99;

/// Label attached to every reference optimum in reports.
pub const REFERENCE_LABEL: &str = "reference optimum, tol 1e-12";

#[derive(Clone, Debug, Serialize)]
pub struct Reference {
    pub label: &'static str,
    pub value: f64,
    /// `‖x − prox^M(x)‖/s` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    #[serde(skip)]
    pub point: Vector,
}

pub struct RlsInstance {
    pub kind: &'static str,
    pub rls: CompositeRLS,
    pub truth: Vector,
    pub weight: f64,
    pub reference: Reference,
}

/// Standard normal rows scaled to unit length.
fn row_normalized(rng: &mut Rng, m: usize, n: usize) -> Matrix {
    let mut a = rng.normal_matrix(m, n);
    for mut row in a.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    a
}

fn observe(rng: &mut Rng, a: &Matrix, truth: &Vector) -> Vector {
    let noise = rng.normal_vector(a.nrows());
    a * truth + noise * 0.01
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HarnessError::Config(msg()))
    }
}

fn finish(kind: &'static str, a: Matrix, y: Vector, reg: ProxFriendlyFunction, truth: Vector, weight: f64) -> Result<RlsInstance> {
    let rls = CompositeRLS::with_step_fraction(a, y, reg.scaled(weight), STEP_FRACTION)?;
    let reference = reference_optimum(&rls, 1e-12, 400_000);
    Ok(RlsInstance { kind, rls, truth, weight, reference })
}

/// Lasso: `sparsity` entries of `±1` in the ground truth, weight
/// `0.1‖Aᵀy‖_∞` unless given.
pub fn lasso(m: usize, n: usize, sparsity: usize, weight: Option<f64>, seed: u64) -> Result<RlsInstance> {
    check(m > 0 && n > 0 && sparsity <= n, || format!("lasso needs m, n > 0 and sparsity ≤ n (got {m}, {n}, {sparsity})"))?;
    let mut rng = Rng::new(seed);
    let a = row_normalized(&mut rng, m, n);
    let mut truth = Vector::zeros(n);
    for i in rng.choose(n, sparsity) {
        truth[i] = rng.sign();
    }
    let y = observe(&mut rng, &a, &truth);
    let weight = weight.unwrap_or_else(|| 0.1 * a.tr_mul(&y).amax());
    finish("lasso", a, y, l1_norm(n), truth, weight)
}

/// Group Lasso over contiguous groups; `active` groups carry `±1` entries.
pub fn group_lasso(m: usize, n: usize, group_size: usize, active: usize, weight: Option<f64>, seed: u64) -> Result<RlsInstance> {
    check(group_size > 0 && n.is_multiple_of(group_size), || format!("group size {group_size} must divide n = {n}"))?;
    let groups = n / group_size;
    check(m > 0 && active <= groups, || format!("at most {groups} active groups, got {active}"))?;
    let mut rng = Rng::new(seed);
    let a = row_normalized(&mut rng, m, n);
    let mut truth = Vector::zeros(n);
    for g in rng.choose(groups, active) {
        for i in g * group_size..(g + 1) * group_size {
            truth[i] = rng.sign();
        }
    }
    let y = observe(&mut rng, &a, &truth);
    let weight = weight.unwrap_or_else(|| {
        let c = a.tr_mul(&y);
        let top = (0..groups).map(|g| c.rows(g * group_size, group_size).norm()).fold(0.0, f64::max);
        0.1 * top
    });
    let partition = GroupPartition::contiguous(n, group_size)?;
    finish("group-lasso", a, y, group_norm(partition), truth, weight)
}

/// Deblurring a piecewise-constant signal under total variation. The blur
/// averages five neighbours (truncated at the ends).
pub fn tv_denoise(n: usize, jumps: usize, weight: Option<f64>, seed: u64) -> Result<RlsInstance> {
    check(n >= 2 && jumps < n, || format!("tv needs n ≥ 2 and jumps < n (got {n}, {jumps})"))?;
    let mut rng = Rng::new(seed);
    let a = Matrix::from_fn(n, n, |i, j| if i.abs_diff(j) <= 2 { 0.2 } else { 0.0 });
    let mut cuts = rng.choose(n - 1, jumps);
    cuts.sort_unstable();
    let mut truth = Vector::zeros(n);
    let mut level = rng.normal();
    let mut next = cuts.iter().peekable();
    for i in 0..n {
        truth[i] = level;
        if next.peek().is_some_and(|&&c| c == i) {
            next.next();
            level = rng.normal();
        }
    }
    let y = observe(&mut rng, &a, &truth);
    finish("tv-denoise", a, y, total_variation_1d(n), truth, weight.unwrap_or(0.02))
}

/// Low-rank matrix sensing: a `size × size` matrix of rank `rank` observed
/// through `measurements` normalized Gaussian functionals.
pub fn nuclear(size: usize, rank: usize, measurements: usize, weight: Option<f64>, seed: u64) -> Result<RlsInstance> {
    check(rank <= size && size > 0 && measurements > 0, || format!("nuclear needs 0 < rank ≤ size (got {rank}, {size})"))?;
    let mut rng = Rng::new(seed);
    let n = size * size;
    let a = row_normalized(&mut rng, measurements, n);
    let u = rng.normal_matrix(size, rank);
    let v = rng.normal_matrix(size, rank);
    let low = u * v.transpose() / (size as f64).sqrt();
    let truth = Vector::from_column_slice(low.as_slice());
    let y = observe(&mut rng, &a, &truth);
    let weight = weight.unwrap_or_else(|| {
        let c = a.tr_mul(&y);
        0.1 * Matrix::from_column_slice(size, size, c.as_slice()).singular_values().max()
    });
    finish("nuclear", a, y, nuclear_norm(size, size), truth, weight)
}

/// Accelerated forward-backward with gradient-mapping restart, stopped when
/// the gradient mapping `‖x − prox^M(x)‖/s` falls below `tol·max(1, ‖x‖)`.
pub fn reference_optimum(rls: &CompositeRLS, tol: f64, max_iter: usize) -> Reference {
    let s = rls.s();
    let n = rls.dim();
    let step = |z: &Vector| rls.regularizer().prox(&rls.forward_step(z), s);
    let value = |z: &Vector| rls.smooth_value(z) + rls.regularizer().value(z);
    let mut x = Vector::zeros(n);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut best = (value(&x), x.clone());
    let mut iterations = max_iter;
    for k in 0..max_iter {
        let next = step(&y);
        // Restart when the momentum points against the gradient mapping.
        let restart = (&y - &next).dot(&(&next - &x)) > 0.0;
        let t_next = if restart { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        y = if restart { next.clone() } else { &next + (&next - &x) * ((t - 1.0) / t_next) };
        x = next;
        t = t_next;
        let fx = value(&x);
        if fx < best.0 {
            best = (fx, x.clone());
        }
        if k % 50 == 0 && (&x - step(&x)).norm() / s <= tol * x.norm().max(1.0) {
            iterations = k + 1;
            break;
        }
    }
    // The last iterate passed the stopping test; earlier iterates with a
    // lower value differ from it only at rounding level.
    let point = x;
    let residual = (&point - step(&point)).norm() / s;
    Reference { label: REFERENCE_LABEL, value: value(&point).min(best.0), residual, iterations, point }
}
