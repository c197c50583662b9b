//! Independent reference computations for the test suites.
//!
//! Nothing here depends on the library under test. Each oracle takes the
//! slowest obviously-correct route: exhaustive grids, scalar bisection,
//! textbook recurrences and optimality certificates.

#![allow(clippy::excessive_precision)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};

pub mod frozen;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Minimizer of `f` on a uniform grid over `[lo, hi]`, followed by one
/// refinement pass with step `step/100` over `±step` around the best point.
pub fn grid_argmin_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = (lo, f(lo));
    for i in 0..=n {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let center = best.0;
    let fine = step / 100.0;
    for i in -100i32..=100 {
        let x = center + fine * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    best.0
}

/// Two-dimensional version of [`grid_argmin_1d`] over `[lo, hi]²`.
pub fn grid_argmin_2d(f: impl Fn(f64, f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
    let n = ((hi - lo) / step).round() as usize;
    let mut best = ((lo, lo), f(lo, lo));
    for i in 0..=n {
        let a = lo + step * i as f64;
        for j in 0..=n {
            let b = lo + step * j as f64;
            let v = f(a, b);
            if v < best.1 {
                best = ((a, b), v);
            }
        }
    }
    let (ca, cb) = best.0;
    let fine = step / 100.0;
    for i in -100i32..=100 {
        for j in -100i32..=100 {
            let (a, b) = (ca + fine * i as f64, cb + fine * j as f64);
            let v = f(a, b);
            if v < best.1 {
                best = ((a, b), v);
            }
        }
    }
    best.0
}

/// Coarse-to-fine grid search for convex `f` on `R^n`, `n ≤ 3`.
///
/// Starts with `2·points+1` nodes per axis over `center ± radius`, then
/// repeatedly recentres on the best node and shrinks the box to two grid
/// steps until the step is below `tol`.
pub fn grid_argmin_nd(f: impl Fn(&[f64]) -> f64, center: &[f64], radius: f64, points: usize, tol: f64) -> Vec<f64> {
    let n = center.len();
    assert!((1..=3).contains(&n), "grid search supports 1 to 3 dimensions");
    let mut c = center.to_vec();
    let mut half = radius;
    loop {
        let step = half / points as f64;
        let m = 2 * points + 1;
        let mut best = (c.clone(), f(&c));
        let mut idx = vec![0usize; n];
        let mut z = vec![0.0; n];
        'grid: loop {
            for d in 0..n {
                z[d] = c[d] - half + step * idx[d] as f64;
            }
            let v = f(&z);
            if v < best.1 {
                best = (z.clone(), v);
            }
            for i in idx.iter_mut() {
                *i += 1;
                if *i < m {
                    continue 'grid;
                }
                *i = 0;
            }
            break;
        }
        c = best.0;
        if step <= tol {
            return c;
        }
        half = 2.0 * step;
    }
}

/// Root of a nondecreasing scalar function by bisection, to full precision.
pub fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    assert!(g(lo) <= 0.0 && g(hi) >= 0.0, "root not bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&Vector) -> f64, x: &Vector, h: f64) -> Vector {
    let mut g = Vector::zeros(x.len());
    for i in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(&xp) - f(&xm)) / (2.0 * h);
    }
    g
}

/// Ordinary least-squares slope and intercept of `ys` on `xs`.
pub fn ls_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `‖A‖²` from a dense symmetric eigendecomposition of `AᵀA`.
pub fn spectral_norm_sq_dense(a: &Matrix) -> f64 {
    SymmetricEigen::new(a.transpose() * a).eigenvalues.max()
}

/// Moreau envelope of `‖·‖₁` (Huber function, summed over coordinates).
pub fn huber_value(x: &Vector, lambda: f64) -> f64 {
    x.iter().map(|&v| if v.abs() <= lambda { v * v / (2.0 * lambda) } else { v.abs() - lambda / 2.0 }).sum()
}

/// Gradient of [`huber_value`]: `clamp(x/λ, −1, 1)`.
pub fn huber_gradient(x: &Vector, lambda: f64) -> Vector {
    x.map(|v| (v / lambda).clamp(-1.0, 1.0))
}

/// Moreau envelope of `‖·‖₁ + ½‖·‖²`, coordinatewise
/// `x²/(2λ)` for `|x| ≤ λ` and `|x| − λ/2 + (|x| − λ)²/(2(1+λ))` beyond.
pub fn l1_plus_half_sq_envelope(x: &Vector, lambda: f64) -> f64 {
    x.iter()
        .map(|&v| {
            let a = v.abs();
            if a <= lambda {
                v * v / (2.0 * lambda)
            } else {
                a - lambda / 2.0 + (a - lambda) * (a - lambda) / (2.0 * (1.0 + lambda))
            }
        })
        .sum()
}

/// Moreau envelope of `(μ/2)‖·‖²`: `μ‖x‖²/(2(1+λμ))`.
pub fn half_sq_envelope(x: &Vector, mu: f64, lambda: f64) -> f64 {
    mu * x.norm_squared() / (2.0 * (1.0 + lambda * mu))
}

/// Violation of the optimality conditions of `z = argmin ½‖w − x‖² + λ TV(w)`.
///
/// With `D` the forward difference, optimality holds iff `x − z = Dᵀu` for some
/// `u` with `|u_i| ≤ λ` and `u_i = λ sign(z_{i+1} − z_i)` wherever the jump is
/// nonzero. The multiplier is recovered by cumulative sums; the returned value
/// is the largest violation (zero for an exact prox).
pub fn tv_prox_certificate(x: &[f64], z: &[f64], lambda: f64) -> f64 {
    let n = x.len();
    assert_eq!(n, z.len());
    if n < 2 {
        return (x.iter().zip(z).map(|(a, b)| (a - b).abs()).sum::<f64>()).abs();
    }
    let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let jump_tol = 1e-9 * scale;
    let mut worst = 0.0f64;
    let mut u = 0.0;
    for i in 0..n - 1 {
        u -= x[i] - z[i];
        worst = worst.max(u.abs() - lambda);
        let jump = z[i + 1] - z[i];
        if jump.abs() > jump_tol {
            worst = worst.max((u - lambda * jump.signum()).abs());
        }
    }
    // The last residual must close the telescoping sum.
    worst.max((u - (x[n - 1] - z[n - 1])).abs())
}

/// Singular-value thresholding computed from the eigendecomposition of `XᵀX`
/// (no SVD): `Z = X V diag((1 − λ/σ_i)₊) Vᵀ`.
pub fn nuclear_prox_via_gram(x: &Matrix, lambda: f64) -> Matrix {
    let eig = SymmetricEigen::new(x.transpose() * x);
    let shrink = eig.eigenvalues.map(|e| {
        let s = e.max(0.0).sqrt();
        if s > lambda {
            1.0 - lambda / s
        } else {
            0.0
        }
    });
    let v = &eig.eigenvectors;
    x * v * Matrix::from_diagonal(&shrink) * v.transpose()
}

/// Nesterov's method written directly from its textbook form:
/// `y = x_k + (1 − α/k)(x_k − x_{k−1})`, `x_{k+1} = y − s∇f(y)`, starting at `k = 1`.
pub fn nesterov_reference(
    grad: impl Fn(&Vector) -> Vector,
    alpha: f64,
    s: f64,
    x0: &Vector,
    x1: &Vector,
    iters: usize,
) -> Vec<Vector> {
    let mut xs = vec![x0.clone(), x1.clone()];
    for k in 1..=iters {
        let (xp, x) = (&xs[k - 1], &xs[k]);
        let y = x + (x - xp) * (1.0 - alpha / k as f64);
        let next = &y - grad(&y) * s;
        xs.push(next);
    }
    xs
}

/// Implicit proximal step on a scalar problem: the unique `z` with
/// `z + μ f'(z) = y`, for nondecreasing `f'`.
pub fn implicit_step_1d(fprime: impl Fn(f64) -> f64, y: f64, mu: f64) -> f64 {
    let g = |z: f64| z + mu * fprime(z) - y;
    let mut width = 1.0 + y.abs();
    while g(y - width) > 0.0 || g(y + width) < 0.0 {
        width *= 2.0;
    }
    bisect(g, y - width, y + width)
}

/// Bessel `J_n(x)` for integer order from its integral representation
/// `(1/π)∫₀^π cos(nτ − x sin τ) dτ` (trapezoid, exponentially convergent).
pub fn bessel_j_integer(n: i32, x: f64) -> f64 {
    let m = 400;
    let h = std::f64::consts::PI / m as f64;
    let f = |tau: f64| (n as f64 * tau - x * tau.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for i in 1..m {
        sum += f(h * i as f64);
    }
    sum * h / std::f64::consts::PI
}

/// Solution of `ẍ + (4/t) ẋ + x = 0` regular at the origin with `x(0) = 1`:
/// `3(sin t − t cos t)/t³`, and its derivative.
pub fn radial_oscillator_5d(t: f64) -> (f64, f64) {
    let (s, c) = t.sin_cos();
    let x = 3.0 * (s - t * c) / t.powi(3);
    let dx = 3.0 * s / (t * t) - 3.0 * x / t;
    (x, dx)
}

/// Solution of `ẍ + (3/t) ẋ + x = 0` regular at the origin with `x(0) = 1`:
/// `2J₁(t)/t`, and its derivative `−2J₂(t)/t`.
pub fn radial_oscillator_4d(t: f64) -> (f64, f64) {
    (2.0 * bessel_j_integer(1, t) / t, -2.0 * bessel_j_integer(2, t) / t)
}

/// Strict interior local maxima.
pub fn count_strict_maxima(series: &[f64]) -> usize {
    series.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}
