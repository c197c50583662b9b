//! Hessian-free first-order form for constant `β > 0` and `b ≡ 1`:
//!
//! `ẋ + β∇f(x) − (1/β − α/t) x + y/β = 0`,
//! `ẏ − (1/β − α/t + αβ/t²) x + y/β = 0`.

use crate::error::{check_dim, Error, Result};
use crate::problem::Vector;

use super::integrator::dopri5;
use super::{make_sample, DampedSystemSpec, IntegratorOptions, TrajectorySample};

/// Integrates the `(x, y)` system and reports samples in the original
/// variables, with `ẋ` recovered from the first equation.
pub fn integrate_first_order(
    spec: &DampedSystemSpec,
    x0: &Vector,
    v0: &Vector,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<TrajectorySample>> {
    let beta = match spec.beta.is_constant() {
        Some(b) if b > 0.0 => b,
        _ => return Err(Error::InvalidParameter("first-order form needs a constant positive beta".into())),
    };
    if spec.b.is_constant() != Some(1.0) {
        return Err(Error::InvalidParameter("first-order form needs b ≡ 1".into()));
    }
    if spec.gamma_const.is_some() || !(spec.t0 > 0.0) {
        return Err(Error::InvalidParameter("first-order form needs the α/t damping with t0 > 0".into()));
    }
    let p = &spec.problem;
    let n = p.dim();
    check_dim(n, x0.len())?;
    check_dim(n, v0.len())?;
    let alpha = spec.alpha;
    let t0 = spec.t0;
    let y_init = -v0 * beta - p.gradient(x0) * (beta * beta) + x0 * (1.0 - alpha * beta / t0);
    let mut z0 = Vector::zeros(2 * n);
    z0.rows_mut(0, n).copy_from(x0);
    z0.rows_mut(n, n).copy_from(&y_init);
    let velocity = |t: f64, x: &Vector, y: &Vector| -> Vector {
        x * (1.0 / beta - alpha / t) - y / beta - p.gradient(x) * beta
    };
    let rhs = |t: f64, z: &Vector| -> Vector {
        let x = z.rows(0, n).into_owned();
        let y = z.rows(n, n).into_owned();
        let mut dz = Vector::zeros(2 * n);
        dz.rows_mut(0, n).copy_from(&velocity(t, &x, &y));
        let dy = &x * (1.0 / beta - alpha / t + alpha * beta / (t * t)) - &y / beta;
        dz.rows_mut(n, n).copy_from(&dy);
        dz
    };
    let states = dopri5(rhs, t0, &z0, times, opts)?;
    Ok(states
        .into_iter()
        .map(|(t, z)| {
            let x = z.rows(0, n).into_owned();
            let y = z.rows(n, n).into_owned();
            let v = velocity(t, &x, &y);
            make_sample(spec, t, x, v)
        })
        .collect())
}
