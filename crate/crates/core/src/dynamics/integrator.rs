//! Dormand–Prince 5(4) with step-size control. Steps are shortened to land
//! exactly on requested sample times.

use crate::error::{check_dim, Error, Result};
use crate::problem::Vector;

use super::{make_sample, DampedSystemSpec, TrajectorySample};

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Accepted steps below this size abort with [`Error::Stiffness`].
    pub min_step: f64,
    /// Disables error control and uses this step throughout.
    pub fixed_step: Option<f64>,
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, max_steps: 5_000_000, min_step: 1e-12, fixed_step: None }
    }

    pub fn fixed(h: f64) -> Self {
        Self { fixed_step: Some(h), ..Self::with_tol(1.0) }
    }

    pub fn atol(mut self, atol: f64) -> Self {
        self.atol = atol;
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(h) = self.fixed_step {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!("fixed step must be positive, got {h}")));
            }
            return Ok(());
        }
        if !(self.rtol > 0.0) || !(self.atol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be positive, got rtol {} atol {}",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::with_tol(1e-8)
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order ones.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn finite(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn scaled_rms(v: &Vector, y: &Vector, opts: &IntegratorOptions) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter().zip(y.iter()).map(|(a, b)| (a / (opts.atol + opts.rtol * b.abs())).powi(2)).sum::<f64>() / n).sqrt()
}

fn initial_step<F: FnMut(f64, &Vector) -> Vector>(
    f: &mut F,
    t0: f64,
    y0: &Vector,
    f0: &Vector,
    opts: &IntegratorOptions,
) -> f64 {
    let d0 = scaled_rms(y0, y0, opts);
    let d1 = scaled_rms(f0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = y0 + f0 * h0;
    let f1 = f(t0 + h0, &y1);
    let d2 = scaled_rms(&(f1 - f0), y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    (100.0 * h0).min(h1)
}

/// Integrates `ẏ = f(t, y)` from `(t0, y0)` and returns the state at each of
/// `times` (nondecreasing, `≥ t0`).
pub(crate) fn dopri5<F: FnMut(f64, &Vector) -> Vector>(
    mut f: F,
    t0: f64,
    y0: &Vector,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<(f64, Vector)>> {
    opts.validate()?;
    let mut t = t0;
    let mut y = y0.clone();
    let mut k = vec![f(t, &y)];
    if !finite(&y) || !finite(&k[0]) {
        return Err(Error::NonFiniteState { t });
    }
    let mut h = match opts.fixed_step {
        Some(h) => h,
        None => initial_step(&mut f, t, &y, &k[0], opts),
    };
    let mut out = Vec::with_capacity(times.len());
    let mut steps = 0usize;
    for &target in times {
        if !(target >= t) || !target.is_finite() {
            return Err(Error::InvalidParameter(format!("sample time {target} precedes {t}")));
        }
        while t < target {
            let remaining = target - t;
            let lands = h >= remaining * (1.0 - 1e-10);
            let step = if lands { remaining } else { h };
            k.truncate(1);
            for i in 1..7 {
                let mut yi = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[i][j] != 0.0 {
                        yi.axpy(step * A[i][j], kj, 1.0);
                    }
                }
                let ti = if i == 6 { t + step } else { t + C[i] * step };
                k.push(f(ti, &yi));
            }
            // The last stage is evaluated at the fifth-order solution.
            let mut y_new = y.clone();
            for (j, kj) in k.iter().enumerate().take(6) {
                if A[6][j] != 0.0 {
                    y_new.axpy(step * A[6][j], kj, 1.0);
                }
            }
            if !finite(&y_new) || !finite(&k[6]) {
                return Err(Error::NonFiniteState { t: t + step });
            }
            let accept = match opts.fixed_step {
                Some(_) => true,
                None => {
                    let mut err = Vector::zeros(y.len());
                    for (j, kj) in k.iter().enumerate() {
                        if E[j] != 0.0 {
                            err.axpy(step * E[j], kj, 1.0);
                        }
                    }
                    let size = y.abs().sup(&y_new.abs());
                    let e = scaled_rms(&err, &size, opts);
                    let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    if e <= 1.0 {
                        if !(lands && step < h && factor >= 1.0) {
                            h = step * factor;
                        }
                        true
                    } else {
                        h = step * factor;
                        if h < opts.min_step {
                            return Err(Error::Stiffness { t, h });
                        }
                        false
                    }
                }
            };
            if accept {
                t = if lands { target } else { t + step };
                y = y_new;
                let last = k.pop().expect("seven stages");
                k.clear();
                k.push(last);
                steps += 1;
                if steps > opts.max_steps {
                    return Err(Error::Stiffness { t, h });
                }
            }
        }
        out.push((target, y.clone()));
    }
    Ok(out)
}

/// `t0, t0·ratio, t0·ratio², …` capped by `t_end`, which is always included.
pub fn geometric_grid(t0: f64, t_end: f64, ratio: f64) -> Vec<f64> {
    let mut grid = vec![t0];
    let mut t = t0;
    loop {
        t *= ratio;
        if t >= t_end * (1.0 - 1e-12) {
            break;
        }
        grid.push(t);
    }
    grid.push(t_end);
    grid
}

/// Integrates on the geometric sample grid of ratio 1.02 (uniform with 10³
/// intervals when `t0 = 0`) with `rtol = atol = tol`.
pub fn integrate(
    spec: &DampedSystemSpec,
    x0: &Vector,
    v0: &Vector,
    t_end: f64,
    tol: f64,
) -> Result<Vec<TrajectorySample>> {
    if !(t_end > spec.t0) {
        return Err(Error::InvalidParameter(format!("end time {t_end} must exceed t0 = {}", spec.t0)));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let times = if spec.t0 > 0.0 {
        geometric_grid(spec.t0, t_end, 1.02)
    } else {
        (0..=1000).map(|i| t_end * i as f64 / 1000.0).collect()
    };
    integrate_at(spec, x0, v0, &times, &IntegratorOptions::with_tol(tol))
}

/// Integrates from `spec.t0` and samples at `times`.
pub fn integrate_at(
    spec: &DampedSystemSpec,
    x0: &Vector,
    v0: &Vector,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Vec<TrajectorySample>> {
    let n = spec.problem.dim();
    check_dim(n, x0.len())?;
    check_dim(n, v0.len())?;
    let mut y0 = Vector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from(x0);
    y0.rows_mut(n, n).copy_from(v0);
    let rhs = |t: f64, y: &Vector| -> Vector {
        let x = y.rows(0, n).into_owned();
        let v = y.rows(n, n).into_owned();
        let a = spec.acceleration(t, &x, &v);
        let mut dy = Vector::zeros(2 * n);
        dy.rows_mut(0, n).copy_from(&v);
        dy.rows_mut(n, n).copy_from(&a);
        dy
    };
    let states = dopri5(rhs, spec.t0, &y0, times, opts)?;
    Ok(states
        .into_iter()
        .map(|(t, y)| make_sample(spec, t, y.rows(0, n).into_owned(), y.rows(n, n).into_owned()))
        .collect())
}
