mod common;

use std::f64::consts::{FRAC_PI_4, PI};

use common::Draws;
use hessdamp_core::dynamics::*;
use hessdamp_core::problem::*;
use hessdamp_core::Error;
use hessdamp_oracles::{count_strict_maxima, ls_line, radial_oscillator_4d, radial_oscillator_5d};
use num_complex::Complex64 as C;

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn mode(lambda: f64) -> SmoothConvexProblem {
    make_quadratic(&[lambda], &Vector::zeros(1)).unwrap()
}

fn constant(alpha: f64, beta: f64, b: f64, problem: SmoothConvexProblem, t0: f64) -> DampedSystemSpec {
    DampedSystemSpec::new(alpha, Coefficient::Const(beta), Coefficient::Const(b), problem, t0).unwrap()
}

fn tight() -> IntegratorOptions {
    IntegratorOptions::with_tol(1e-11).atol(1e-14)
}

fn uniform(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t0 + (t1 - t0) * i as f64 / n as f64).collect()
}

// ---------- integrator ----------

#[test]
fn harmonic_oscillator_half_period() {
    let spec = constant(0.0, 0.0, 1.0, mode(1.0), 0.0);
    let out = integrate_at(&spec, &v(&[1.0]), &v(&[0.0]), &[PI], &IntegratorOptions::with_tol(1e-10)).unwrap();
    assert!((out[0].x[0] + 1.0).abs() < 1e-6);
    let dense = integrate(&spec, &v(&[1.0]), &v(&[0.0]), 10.0, 1e-10).unwrap();
    for s in &dense {
        assert!((s.x[0] - s.t.cos()).abs() < 1e-7);
    }
}

#[test]
fn radial_oscillators_from_near_the_origin() {
    for (alpha, exact) in [(3.0, radial_oscillator_4d as fn(f64) -> (f64, f64)), (4.0, radial_oscillator_5d)] {
        let t0 = 0.1;
        let (x0, v0) = exact(t0);
        let spec = constant(alpha, 0.0, 1.0, mode(1.0), t0);
        let out = integrate_at(&spec, &v(&[x0]), &v(&[v0]), &uniform(t0, 20.0, 400), &tight()).unwrap();
        for s in &out {
            assert!((s.x[0] - exact(s.t).0).abs() <= 1e-5, "alpha={alpha}, t={}", s.t);
        }
    }
}

#[test]
fn free_motion_decays_by_the_damping_law() {
    let (alpha, t0, v0) = (3.0, 1.0, 0.7);
    let spec = constant(alpha, 0.5, 1.0, mode(0.0), t0);
    let out = integrate(&spec, &v(&[0.0]), &v(&[v0]), 10.0, 1e-12).unwrap();
    for s in &out {
        let want = v0 * (t0 / s.t).powf(alpha);
        assert!((s.v[0] - want).abs() <= 1e-8, "t={}", s.t);
    }
}

#[test]
fn fixed_step_halving_shows_high_order() {
    let spec = constant(0.0, 0.0, 1.0, mode(1.0), 0.0);
    let err = |h: f64| {
        let out = integrate_at(&spec, &v(&[1.0]), &v(&[0.0]), &[2.0], &IntegratorOptions::fixed(h)).unwrap();
        (out[0].x[0] - 2.0f64.cos()).abs()
    };
    let errs: Vec<f64> = [0.2, 0.1, 0.05, 0.025].iter().map(|&h| err(h)).collect();
    for w in errs.windows(2) {
        assert!(w[0] / w[1] >= 8.0, "{errs:?}");
    }
}

#[test]
fn integrator_errors() {
    let spec = constant(3.0, 0.0, 1.0, mode(1.0), 1.0);
    let x = v(&[1.0]);
    assert!(matches!(integrate(&spec, &x, &x, 0.5, 1e-8), Err(Error::InvalidParameter(_))));
    assert!(matches!(integrate(&spec, &x, &x, 2.0, 0.0), Err(Error::InvalidParameter(_))));
    assert!(integrate(&spec, &v(&[1.0, 2.0]), &x, 2.0, 1e-8).is_err());
    assert!(DampedSystemSpec::new(3.0, Coefficient::Const(0.0), Coefficient::Const(1.0), mode(1.0), 0.0).is_err());
    let blow_up = SmoothConvexProblem::new("nan", 1, |x| x[0], |x| if x[0] < 0.5 { v(&[f64::NAN]) } else { v(&[1.0]) });
    let spec = constant(0.0, 0.0, 1.0, blow_up, 0.0);
    assert!(matches!(integrate(&spec, &x, &v(&[0.0]), 5.0, 1e-8), Err(Error::NonFiniteState { .. })));
}

#[test]
fn geometric_grid_ratio() {
    let g = geometric_grid(1.0, 30.0, 1.02);
    assert_eq!(g[0], 1.0);
    assert_eq!(*g.last().unwrap(), 30.0);
    for w in g[..g.len() - 1].windows(2) {
        assert!((w[1] / w[0] - 1.02).abs() < 1e-12);
    }
}

// ---------- growth functions ----------

#[test]
fn weight_and_delta_examples() {
    let beta = 1.0;
    let c1 = constant(3.0, beta, 1.0, mode(1.0), 1.0);
    let (w, delta) = w_and_delta(&c1, 2.0);
    assert!((w - 0.5).abs() < 1e-15 && (delta - 2.0).abs() < 1e-15);
    let c2 = DampedSystemSpec::new(3.0, Coefficient::Const(0.7), Coefficient::ConstPlusInv { c: 1.0, d: 0.7 }, mode(1.0), 1.0)
        .unwrap();
    for t in [1.0, 2.5, 40.0] {
        assert!((w_and_delta(&c2, t).0 - 1.0).abs() < 1e-14);
    }
    let c3 = DampedSystemSpec::new(5.0, Coefficient::Const(0.0), Coefficient::Power { coef: 1.0, exp: 2.0 }, mode(1.0), 1.0)
        .unwrap();
    for t in [1.0, 3.0, 9.0] {
        assert_eq!(w_and_delta(&c3, t).0, t * t);
    }
}

#[test]
fn growth_condition_examples() {
    let time_scaled = |alpha: f64| {
        DampedSystemSpec::new(alpha, Coefficient::Const(0.0), Coefficient::Power { coef: 1.0, exp: 2.0 }, mode(1.0), 1.0)
            .unwrap()
    };
    let case4 = DampedSystemSpec::new(
        5.0,
        Coefficient::Power { coef: 1.0, exp: 3.0 },
        Coefficient::Power { coef: 5.0, exp: 2.0 },
        mode(1.0),
        1.0,
    )
    .unwrap();
    let plain = constant(3.0, 0.0, 1.0, mode(1.0), 1.0);
    for t in [1.0, 1.7, 5.0, 20.0, 100.0] {
        let g = check_growth_continuous(&time_scaled(5.0), t);
        assert!(g.g2 && g.g3, "t={t}");
        assert!(!check_growth_continuous(&time_scaled(4.0), t).g3, "t={t}");
        let g = check_growth_continuous(&case4, t);
        assert!(g.g2 && g.g3, "t={t}");
        let g = check_growth_continuous(&plain, t);
        assert!(g.g2 && g.g3, "t={t}");
    }
}

#[test]
fn custom_coefficients_use_numerical_derivatives() {
    let analytic = DampedSystemSpec::new(
        4.0,
        Coefficient::Power { coef: 0.5, exp: 1.5 },
        Coefficient::Power { coef: 3.0, exp: 1.0 },
        mode(1.0),
        1.0,
    )
    .unwrap();
    let custom = DampedSystemSpec::new(
        4.0,
        Coefficient::Custom(std::sync::Arc::new(|t: f64| 0.5 * t.powf(1.5))),
        Coefficient::Custom(std::sync::Arc::new(|t: f64| 3.0 * t)),
        mode(1.0),
        1.0,
    )
    .unwrap();
    for t in [1.5, 3.0, 8.0] {
        let (a, b) = (w_and_delta(&analytic, t).0, w_and_delta(&custom, t).0);
        assert!((a - b).abs() < 1e-6 * a.abs().max(1.0));
        assert_eq!(check_growth_continuous(&analytic, t), check_growth_continuous(&custom, t));
    }
}

// ---------- energies ----------

#[test]
fn energy_vanishes_at_rest_on_the_minimizer() {
    let p = make_quadratic(&[1.0, 1000.0], &v(&[0.5, -1.0])).unwrap();
    let xstar = v(&[0.5, -1.0]);
    let spec = constant(3.1, 1.0, 1.0, p.clone(), 1.0);
    let sample = TrajectorySample { t: 4.0, x: xstar.clone(), v: Vector::zeros(2), f_gap: 0.0, grad_norm: 0.0, energy: None };
    assert_eq!(energy_continuous(&spec, &sample, &xstar).unwrap(), 0.0);
    let sc = make_quadratic(&[1.0, 3.0], &xstar).unwrap();
    assert_eq!(sc_energy_continuous(&sc, 0.4, &sample, &xstar).unwrap(), 0.0);
    let flat = make_quadratic(&[0.0, 3.0], &xstar).unwrap();
    assert!(matches!(sc_energy_continuous(&flat, 0.4, &sample, &xstar), Err(Error::Missing(_))));
}

fn ill_conditioned() -> SmoothConvexProblem {
    make_quadratic(&[1.0, 1000.0], &Vector::zeros(2)).unwrap()
}

/// First sample time from which both growth conditions hold up to `t_end`.
fn growth_start(spec: &DampedSystemSpec, times: &[f64]) -> usize {
    (0..times.len())
        .find(|&i| {
            times[i..].iter().all(|&t| {
                let g = check_growth_continuous(spec, t);
                g.g2 && g.g3
            })
        })
        .expect("growth conditions eventually hold")
}

#[test]
fn hessian_damped_energy_certificates() {
    let spec = constant(3.1, 1.0, 1.0, ill_conditioned(), 1.0);
    let times = uniform(1.0, 30.0, 5800);
    let out = integrate_at(&spec, &v(&[1.0, 1.0]), &Vector::zeros(2), &times, &tight()).unwrap();
    let start = growth_start(&spec, &times);
    assert!((times[start] - 11.0).abs() < 0.01, "growth holds from t = {}", times[start]);
    let tail = &out[start..];
    let e0 = tail[0].energy.unwrap();
    for w in tail.windows(2) {
        assert!(w[1].energy.unwrap() <= w[0].energy.unwrap() + 1e-8, "t={}", w[1].t);
    }
    for s in tail {
        let (_, delta) = w_and_delta(&spec, s.t);
        assert!(delta * s.f_gap <= e0 * (1.0 + 1e-6));
    }
    assert!(weighted_gradient_integral(&spec, tail) <= e0 * (1.0 + 1e-3));
}

#[test]
fn energy_certificate_on_a_time_scaled_run() {
    let spec = DampedSystemSpec::new(
        5.0,
        Coefficient::Const(0.0),
        Coefficient::Power { coef: 1.0, exp: 2.0 },
        make_quadratic(&[0.3, 2.0], &v(&[1.0, 1.0])).unwrap(),
        1.0,
    )
    .unwrap();
    let times = uniform(1.0, 10.0, 2000);
    let out = integrate_at(&spec, &v(&[3.0, -1.0]), &v(&[0.5, 0.5]), &times, &tight()).unwrap();
    let e0 = out[0].energy.unwrap();
    for s in &out {
        let (_, delta) = w_and_delta(&spec, s.t);
        assert!(delta * s.f_gap <= e0 * (1.0 + 1e-6), "t={}", s.t);
    }
}

#[test]
fn strongly_convex_energy_decays_exponentially() {
    let spec = DampedSystemSpec::strongly_convex(2.0, 0.4, mode(1.0), 0.0).unwrap();
    let times = uniform(0.0, 20.0, 1000);
    let out = integrate_at(&spec, &v(&[1.0]), &v(&[0.0]), &times, &IntegratorOptions::with_tol(1e-10).atol(1e-16)).unwrap();
    let e0 = out[0].energy.unwrap();
    for s in &out {
        assert!(s.energy.unwrap() <= e0 * (-s.t / 2.0).exp() * (1.0 + 1e-6), "t={}", s.t);
    }
}

#[test]
fn critically_damped_run_without_hessian_term() {
    // With β = 0 and viscous coefficient 2 the solution is (1 + t)e^{−t}.
    let spec = DampedSystemSpec::strongly_convex(2.0, 0.0, mode(1.0), 0.0).unwrap();
    let times = uniform(0.0, 20.0, 1000);
    let out = integrate_at(&spec, &v(&[1.0]), &v(&[0.0]), &times, &IntegratorOptions::with_tol(1e-12).atol(1e-18)).unwrap();
    for s in &out {
        let x = (1.0 + s.t) * (-s.t).exp();
        assert!((s.x[0] - x).abs() <= 1e-8 * x.max(1e-10) + 1e-14, "t={}", s.t);
    }
    let c = out.iter().map(|s| s.f_gap * s.t.exp()).fold(0.0f64, f64::max);
    assert!(out.iter().all(|s| s.f_gap <= c * (-s.t).exp()));
    assert!(c.is_finite() && c <= 1.0);
}

// ---------- structural invariants ----------

fn random_basis(d: &mut Draws, n: usize) -> Matrix {
    d.matrix(n, n).qr().q()
}

#[test]
fn quadratic_modes_decouple() {
    let mut d = Draws::new(12);
    let basis = random_basis(&mut d, 3);
    let eig = [0.5, 2.0, 7.0];
    let full = make_quadratic_in_basis(&eig, &basis, &Vector::zeros(3)).unwrap();
    let (x0, v0) = (d.vector(3, 1.0), d.vector(3, 1.0));
    let times = uniform(1.0, 15.0, 140);
    let opts = IntegratorOptions::with_tol(1e-12).atol(1e-15);
    let joint = integrate_at(&constant(3.1, 0.3, 1.0, full, 1.0), &x0, &v0, &times, &opts).unwrap();
    let (m0, w0) = (basis.transpose() * &x0, basis.transpose() * &v0);
    let mut modal = vec![Vector::zeros(3); times.len()];
    for (j, &lambda) in eig.iter().enumerate() {
        let spec = constant(3.1, 0.3, 1.0, mode(lambda), 1.0);
        let out = integrate_at(&spec, &v(&[m0[j]]), &v(&[w0[j]]), &times, &opts).unwrap();
        for (i, s) in out.iter().enumerate() {
            modal[i][j] = s.x[0];
        }
    }
    for (s, m) in joint.iter().zip(&modal) {
        assert!((&s.x - &basis * m).amax() <= 1e-8, "t={}", s.t);
    }
}

#[test]
fn first_order_form_matches_second_order_form() {
    let p = make_quadratic_in_basis(&[0.5, 3.0], &rotation_2d(0.3), &v(&[0.2, 0.0])).unwrap();
    let spec = constant(3.1, 1.0, 1.0, p, 1.0);
    let times = uniform(1.0, 20.0, 190);
    let opts = IntegratorOptions::with_tol(1e-12).atol(1e-15);
    let (x0, v0) = (v(&[1.0, -1.0]), v(&[0.3, 0.1]));
    let a = integrate_at(&spec, &x0, &v0, &times, &opts).unwrap();
    let b = integrate_first_order(&spec, &x0, &v0, &times, &opts).unwrap();
    for (u, w) in a.iter().zip(&b) {
        assert!((&u.x - &w.x).amax() <= 1e-8, "t={}", u.t);
        assert!((&u.v - &w.v).amax() <= 1e-7, "t={}", u.t);
    }
    let varying = DampedSystemSpec::new(3.1, Coefficient::Power { coef: 1.0, exp: 1.0 }, Coefficient::Const(1.0), mode(1.0), 1.0)
        .unwrap();
    assert!(integrate_first_order(&varying, &v(&[1.0]), &v(&[0.0]), &times, &opts).is_err());
}

#[test]
fn hessian_damping_suppresses_oscillation() {
    let count = |beta: f64| {
        let spec = constant(3.1, beta, 1.0, ill_conditioned(), 1.0);
        let out = integrate_at(&spec, &v(&[1.0, 1.0]), &Vector::zeros(2), &uniform(1.0, 30.0, 2900), &tight()).unwrap();
        count_strict_maxima(&out.iter().map(|s| s.f_gap).collect::<Vec<_>>())
    };
    let (damped, plain) = (count(1.0), count(0.0));
    assert!(damped < plain, "damped {damped}, plain {plain}");
}

// ---------- closed forms ----------

fn fig1_mode(lambda: f64) -> ClosedFormParams {
    ClosedFormParams::new(lambda, 3.1, 1.0, 1.0, 0.0).unwrap()
}

#[test]
fn zero_coefficients_give_the_zero_trajectory() {
    let cf = ClosedFormSpec::new(fig1_mode(1.0));
    for t in [0.5, 1.0, 30.0] {
        assert_eq!(closed_form_eval(&cf, t).unwrap(), 0.0);
    }
    let fitted = fit_closed_form_ic(fig1_mode(1.0), 1.0, 0.0, 0.0).unwrap();
    assert_eq!((fitted.c1, fitted.c2), (C::new(0.0, 0.0), C::new(0.0, 0.0)));
    assert!(matches!(closed_form_eval(&cf, 0.0), Err(Error::Domain(_))));
}

#[test]
fn branch_selection_follows_the_discriminant() {
    assert_eq!(fig1_mode(1.0).branch(), ClosedFormBranch::Kummer);
    assert_eq!(ClosedFormParams::new(4.0, 5.0, 1.0, 1.0, 0.0).unwrap().branch(), ClosedFormBranch::Bessel);
    assert_eq!(ClosedFormParams::new(0.0, 3.0, 1.0, 1.0, 0.0).unwrap().branch(), ClosedFormBranch::Kernel);
    let under = ClosedFormSpec::new(fig1_mode(1.0));
    assert!(under.xi.re.abs() < 1e-15 && (under.xi.im.abs() - 3f64.sqrt()).abs() < 1e-14);
    assert!((under.sigma - 1.05).abs() < 1e-15);
    assert!(ClosedFormParams::new(-1.0, 3.0, 1.0, 1.0, 0.0).is_err());
}

#[test]
fn fit_round_trip() {
    let mut d = Draws::new(13);
    let cases = [
        ClosedFormParams::new(1.0, 3.1, 1.0, 1.0, 0.0).unwrap(),
        ClosedFormParams::new(1000.0, 3.1, 1.0, 1.0, 0.0).unwrap(),
        ClosedFormParams::new(2.0, 5.0, 1.0, 1.0, 1.0).unwrap(),
        ClosedFormParams::new(4.0, 5.0, 1.0, 1.0, 0.0).unwrap(),
        ClosedFormParams::new(0.0, 3.0, 1.0, 1.0, 0.0).unwrap(),
    ];
    for params in cases {
        for _ in 0..5 {
            let t0 = d.uniform(1.0, 3.0);
            let (x0, xd0) = (d.uniform(-2.0, 2.0), d.uniform(-2.0, 2.0));
            let cf = fit_closed_form_ic(params, t0, x0, xd0).unwrap();
            let (x, xd) = closed_form_state(&cf, t0).unwrap();
            assert!((x - x0).abs() <= 1e-8 && (xd - xd0).abs() <= 1e-8, "{params:?}: ({x}, {xd}) vs ({x0}, {xd0})");
        }
    }
}

/// `|a − b| / max_{s ≥ t} |b(s)|` over paired series.
fn tail_relative_deviation(closed: &[f64], reference: &[f64]) -> f64 {
    let mut envelope = 0.0f64;
    let mut worst = 0.0f64;
    for (a, b) in closed.iter().zip(reference).rev() {
        envelope = envelope.max(b.abs());
        worst = worst.max((a - b).abs() / envelope);
    }
    worst
}

#[test]
fn closed_forms_match_the_integrator_on_the_ill_conditioned_modes() {
    for (lambda, t_end, tol) in [(1.0, 20.0, 1e-5), (1000.0, 10.0, 1e-4)] {
        let cf = fit_closed_form_ic(fig1_mode(lambda), 1.0, 1.0, 0.0).unwrap();
        let times = uniform(1.0, t_end, 900);
        let out = integrate_at(&constant(3.1, 1.0, 1.0, mode(lambda), 1.0), &v(&[1.0]), &v(&[0.0]), &times, &tight()).unwrap();
        let closed: Vec<f64> = times.iter().map(|&t| closed_form_eval(&cf, t).unwrap()).collect();
        let reference: Vec<f64> = out.iter().map(|s| s.x[0]).collect();
        let abs = closed.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(abs <= tol, "lambda={lambda}: {abs:e}");
        assert!(tail_relative_deviation(&closed, &reference) <= 1e-4, "lambda={lambda}");
    }
}

#[test]
fn closed_form_residual_on_all_branches() {
    let cases = [
        (ClosedFormParams::new(1.0, 3.1, 1.0, 1.0, 0.0).unwrap(), 1.0, 20.0),
        (ClosedFormParams::new(2.0, 5.0, 1.0, 1.0, 1.0).unwrap(), 2.0, 10.0),
        (ClosedFormParams::new(4.0, 5.0, 1.0, 1.0, 0.0).unwrap(), 1.0, 10.0),
        (ClosedFormParams::new(4.0, 5.0, 1.0, 1.0, 12.0).unwrap(), 1.0, 10.0),
        (ClosedFormParams::new(10.0, 2.5, 1.0, 0.5, 0.3).unwrap(), 1.0, 10.0),
    ];
    for (p, t0, t1) in cases {
        let cf = fit_closed_form_ic(p, t0, 1.0, -0.5).unwrap();
        let h = 1e-2 / (1.0 + p.beta * p.lambda + p.lambda.sqrt());
        let xd = |t: f64| closed_form_state(&cf, t).unwrap().1;
        for i in 0..100 {
            let t = t0 + 0.01 + (t1 - t0 - 0.02) * i as f64 / 99.0;
            let (x, dx) = closed_form_state(&cf, t).unwrap();
            let ddx = (-xd(t + 2.0 * h) + 8.0 * xd(t + h) - 8.0 * xd(t - h) + xd(t - 2.0 * h)) / (12.0 * h);
            let res = ddx + (p.alpha / t + p.beta * p.lambda) * dx + p.lambda * (p.b + p.gamma / t) * x;
            assert!(res.abs() <= 1e-6 * x.abs().max(1.0), "{p:?} t={t}: {res:e}");
        }
    }
}

#[test]
fn asymptotic_rate_examples() {
    let r = asymptotic_rate(4.0, 5.0, 1.0, 1.0);
    assert!((r.exp_rate - 2.0).abs() < 1e-15 && (r.poly_power - 2.25).abs() < 1e-15);
    for alpha in [3.0, 4.5] {
        let r = asymptotic_rate(2.0, alpha, 0.0, 1.0);
        assert_eq!(r.exp_rate, 0.0);
        assert_eq!(r.poly_power, alpha / 2.0);
    }
    // Overdamped: the slow rate 2bλ/(βλ + ξ) tends to b/β.
    let r = asymptotic_rate(1e6, 3.1, 1.0, 1.0);
    assert!((r.exp_rate - 1.0).abs() < 1e-5);
}

#[test]
fn asymptotic_rate_matches_the_closed_form_decay() {
    for (lambda, alpha, beta, b) in [(10.0, 3.1, 1.0, 1.0), (1000.0, 3.1, 1.0, 1.0), (1.0, 3.1, 1.0, 1.0)] {
        let cf = fit_closed_form_ic(ClosedFormParams::new(lambda, alpha, beta, b, 0.0).unwrap(), 1.0, 1.0, 0.0).unwrap();
        // |x| ~ e^{−rt} t^{−p}: strip the predicted power, then fit the upper
        // envelope of what remains so that zero crossings do not matter.
        let predicted = asymptotic_rate(lambda, alpha, beta, b);
        let ts = uniform(20.0, 40.0, 400);
        let logs: Vec<f64> = ts
            .iter()
            .map(|&t| closed_form_eval(&cf, t).unwrap().abs().ln() + predicted.poly_power * t.ln())
            .collect();
        let mut env = logs.clone();
        for i in (0..env.len() - 1).rev() {
            env[i] = env[i].max(env[i + 1]);
        }
        let rate = -ls_line(&ts, &env).0;
        let want = predicted.exp_rate;
        assert!((rate - want).abs() <= 0.1 * want, "lambda={lambda}: fitted {rate}, predicted {want}");
    }
}

// ---------- time-rescaled systems ----------

#[test]
fn rescaling_without_growth_reduces_to_the_constant_case() {
    let (lambda, c, alpha) = (3.0, 2.0, 4.5);
    let rs = rescaled_change_of_variable(lambda, 0.0, c, alpha).unwrap();
    assert_eq!(rs.xi, C::new(lambda, 0.0));
    assert_eq!(rs.kappa, C::new(c - alpha / 2.0, 0.0));
    assert_eq!(rs.sigma, (alpha - 1.0) / 2.0);
    let direct = fit_closed_form_ic(ClosedFormParams::new(lambda, alpha, 1.0, 0.0, c).unwrap(), 1.5, 1.0, 0.2).unwrap();
    let mapped = rs.fit(1.5, 1.0, 0.2).unwrap();
    for t in [1.5, 2.0, 5.0, 9.0] {
        let (a, b) = (closed_form_eval(&direct, t).unwrap(), rs.state(&mapped, t).unwrap().0);
        assert!((a - b).abs() < 1e-13 * a.abs().max(1e-3));
    }
    assert!(rescaled_change_of_variable(1.0, -1.0, 1.0, 3.0).is_err());
    assert!(rescaled_change_of_variable(1.0, 1.0, 0.0, 3.0).is_err());
}

#[test]
fn rescaled_closed_form_tracks_the_time_scaled_system() {
    // Fast-growing damping and scaling on f = (x1 + x2)²/2: one mode of
    // eigenvalue 2 along (1,1)/√2 and a flat mode.
    let basis = rotation_2d(FRAC_PI_4);
    let p = make_quadratic_in_basis(&[2.0, 0.0], &basis, &Vector::zeros(2)).unwrap();
    let spec = DampedSystemSpec::new(
        5.0,
        Coefficient::Power { coef: 1.0, exp: 3.0 },
        Coefficient::Power { coef: 5.0, exp: 2.0 },
        p,
        1.0,
    )
    .unwrap();
    let times = uniform(1.0, 5.0, 400);
    let x0 = v(&[1.0, 1.0]);
    let out = integrate_at(&spec, &x0, &Vector::zeros(2), &times, &tight()).unwrap();
    let rs = rescaled_change_of_variable(2.0, 3.0, 5.0, 5.0).unwrap();
    let cf = rs.fit(1.0, 2f64.sqrt(), 0.0).unwrap();
    let flat_rs = rescaled_change_of_variable(0.0, 3.0, 5.0, 5.0).unwrap();
    let flat = flat_rs.fit(1.0, 0.0, 0.0).unwrap();
    for s in &out {
        let modal = basis.transpose() * &s.x;
        let (x, _) = rs.state(&cf, s.t).unwrap();
        assert!((modal[0] - x).abs() <= 1e-4, "t={}", s.t);
        assert_eq!(flat_rs.state(&flat, s.t).unwrap().0, 0.0);
        assert!(modal[1].abs() <= 1e-12);
    }
}

#[test]
fn flat_mode_is_constant_on_both_paths() {
    let rs = rescaled_change_of_variable(0.0, 2.0, 1.0, 3.0).unwrap();
    let cf = rs.fit(1.0, 0.75, 0.0).unwrap();
    let spec = DampedSystemSpec::new(
        3.0,
        Coefficient::Power { coef: 1.0, exp: 2.0 },
        Coefficient::Power { coef: 1.0, exp: 1.0 },
        mode(0.0),
        1.0,
    )
    .unwrap();
    let out = integrate_at(&spec, &v(&[0.75]), &v(&[0.0]), &uniform(1.0, 6.0, 50), &tight()).unwrap();
    for s in &out {
        assert_eq!(s.x[0], 0.75);
        assert_eq!(rs.state(&cf, s.t).unwrap().0, 0.75);
    }
}
