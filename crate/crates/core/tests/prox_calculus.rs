mod common;

use common::Draws;
use hessdamp_core::problem::*;
use hessdamp_core::prox::*;
use hessdamp_oracles::{
    grid_argmin_1d, grid_argmin_2d, grid_argmin_nd, huber_gradient, huber_value, nuclear_prox_via_gram,
    tv_prox_certificate,
};

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn abs1() -> ProxFriendlyFunction {
    l1_norm(1)
}

#[test]
fn envelope_value_examples() {
    let e = EnvelopeView::new(abs1(), 1.0).unwrap();
    let brute = {
        let z = grid_argmin_1d(|z| z.abs() + 0.5 * (z - 3.0) * (z - 3.0), -10.0, 10.0, 1e-3);
        z.abs() + 0.5 * (z - 3.0) * (z - 3.0)
    };
    assert!((envelope_value(&e, &v(&[3.0])).unwrap() - 2.5).abs() < 1e-15);
    assert!((brute - 2.5).abs() < 1e-8);

    let zero = EnvelopeView::new(zero_function(3), 0.7).unwrap();
    assert_eq!(envelope_value(&zero, &v(&[1.0, -4.0, 9.0])).unwrap(), 0.0);

    let sq = EnvelopeView::new(half_sq_norm(2, 1.0), 1.0).unwrap();
    let mut d = Draws::new(1);
    for _ in 0..10 {
        let x = d.vector(2, 5.0);
        assert!((envelope_value(&sq, &x).unwrap() - x.norm_squared() / 4.0).abs() < 1e-13);
    }
}

#[test]
fn envelope_gradient_examples() {
    let e = EnvelopeView::new(abs1(), 1.0).unwrap();
    assert_eq!(envelope_gradient(&e, &v(&[3.0])).unwrap()[0], 1.0);
    assert_eq!(envelope_gradient(&e, &v(&[0.0])).unwrap()[0], 0.0);
    let tv = EnvelopeView::new(total_variation_1d(4), 0.5).unwrap();
    assert_eq!(envelope_gradient(&tv, &v(&[2.0; 4])).unwrap().amax(), 0.0);
    let mut d = Draws::new(2);
    for f in [l1_norm(3), total_variation_1d(3), half_sq_norm(3, 2.0), l1_plus_half_sq(3, 1.0)] {
        let env = EnvelopeView::new(f, 0.8).unwrap();
        for _ in 0..20 {
            let x = d.vector(3, 4.0);
            let fd = hessdamp_oracles::fd_gradient(|z| env.value(z), &x, 1e-5);
            assert!((envelope_gradient(&env, &x).unwrap() - fd).amax() < 1e-4);
        }
    }
}

#[test]
fn envelope_prox_examples() {
    let zero = EnvelopeView::new(zero_function(2), 1.0).unwrap();
    let x = v(&[1.5, -2.0]);
    assert!((prox_of_envelope(&zero, 0.3, &x).unwrap() - &x).amax() < 1e-15);

    let e = EnvelopeView::new(abs1(), 1.0).unwrap();
    assert!((prox_of_envelope(&e, 1.0, &v(&[3.0])).unwrap()[0] - 2.0).abs() < 1e-15);

    // Definition check against a grid: argmin ½(z − x)² + θ f_λ(z).
    for &(x, theta, lambda) in &[(3.0, 1.0, 1.0), (-0.4, 2.0, 0.5), (7.0, 0.3, 2.0)] {
        let e = EnvelopeView::new(abs1(), lambda).unwrap();
        let brute = grid_argmin_1d(|z| 0.5 * (z - x) * (z - x) + theta * e.value(&v(&[z])), -10.0, 10.0, 1e-3);
        let got = prox_of_envelope(&e, theta, &v(&[x])).unwrap()[0];
        assert!((got - brute).abs() < 1e-4, "x={x}: {got} vs {brute}");
    }
    assert!(prox_of_envelope(&e, -1.0, &v(&[1.0])).is_err());
}

#[test]
fn envelope_modulus_examples() {
    assert_eq!(envelope_strong_modulus(1.0, 1.0), 0.5);
    assert_eq!(envelope_strong_modulus(0.0, 3.0), 0.0);
    assert!((envelope_strong_modulus(2.0, 0.25) - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn envelope_of_l1_is_huber() {
    let mut d = Draws::new(3);
    for _ in 0..100 {
        let lambda = d.uniform(0.05, 3.0);
        let x = d.vector(4, 5.0);
        let e = EnvelopeView::new(l1_norm(4), lambda).unwrap();
        assert!((e.value(&x) - huber_value(&x, lambda)).abs() < 1e-12);
        assert!((e.gradient(&x) - huber_gradient(&x, lambda)).amax() < 1e-12);
    }
}

#[test]
fn envelope_gradient_is_lipschitz() {
    let mut d = Draws::new(4);
    for f in [l1_norm(3), total_variation_1d(3), half_sq_norm(3, 1.0), l1_plus_half_sq(3, 1.0)] {
        let lambda = 0.6;
        let e = EnvelopeView::new(f, lambda).unwrap();
        for _ in 0..100 {
            let (x, z) = (d.vector(3, 5.0), d.vector(3, 5.0));
            let lhs = (e.gradient(&x) - e.gradient(&z)).norm();
            assert!(lhs <= (&x - &z).norm() / lambda * (1.0 + 1e-12));
        }
    }
}

#[test]
fn envelope_of_envelope_composes_parameters() {
    // (f_λ)_μ = f_{λ+μ}.
    let mut d = Draws::new(5);
    let inner = EnvelopeView::new(l1_norm(3), 0.4).unwrap();
    let outer = EnvelopeView::new(inner.as_prox_friendly(), 0.7).unwrap();
    let direct = EnvelopeView::new(l1_norm(3), 1.1).unwrap();
    for _ in 0..20 {
        let x = d.vector(3, 4.0);
        assert!((outer.value(&x) - direct.value(&x)).abs() < 1e-12);
    }
}

#[test]
fn minimizers_are_stationary_for_the_envelope() {
    for f in [l1_norm(3), total_variation_1d(3), half_sq_norm(3, 2.0), l1_plus_half_sq(3, 1.0), zero_function(3)] {
        let xstar = f.opt_point().unwrap().clone();
        let e = EnvelopeView::new(f, 0.9).unwrap();
        assert!(e.gradient(&xstar).amax() <= 1e-10);
    }
}

#[test]
fn soft_threshold_examples() {
    assert_eq!(prox_l1(&v(&[0.0]), 1.0), v(&[0.0]));
    assert_eq!(prox_l1(&v(&[3.0]), 1.0), v(&[2.0]));
    assert_eq!(prox_l1(&v(&[-0.5]), 1.0), v(&[0.0]));
    for &x in &[3.0, -0.5, -2.25] {
        let brute = grid_argmin_1d(|z| z.abs() + 0.5 * (z - x) * (z - x), -10.0, 10.0, 1e-3);
        assert!((prox_l1(&v(&[x]), 1.0)[0] - brute).abs() < 1e-4);
    }
}

#[test]
fn group_threshold_examples() {
    let one = GroupPartition::new(vec![vec![0, 1]], 2).unwrap();
    let p = prox_group_l1l2(&v(&[3.0, 4.0]), &one, 1.0).unwrap();
    assert!((p - v(&[2.4, 3.2])).amax() < 1e-15);
    let (a, b) = grid_argmin_2d(|a, b| (a * a + b * b).sqrt() + 0.5 * ((a - 3.0).powi(2) + (b - 4.0).powi(2)), -10.0, 10.0, 1e-2);
    assert!((a - 2.4).abs() < 1e-4 && (b - 3.2).abs() < 1e-4);

    let groups = GroupPartition::contiguous(5, 2).unwrap();
    let x = v(&[0.3, 0.4, 3.0, 0.0, -0.2]);
    let p = prox_group_l1l2(&x, &groups, 0.5).unwrap();
    assert_eq!(p[0], 0.0);
    assert_eq!(p[1], 0.0);
    assert_eq!(p[4], 0.0);
    assert_eq!(prox_group_l1l2(&x, &groups, 0.0).unwrap(), x);
}

#[test]
fn group_partition_validation() {
    assert!(GroupPartition::new(vec![vec![0, 1], vec![1, 2]], 3).is_err());
    assert!(GroupPartition::new(vec![vec![0]], 2).is_err());
    assert!(GroupPartition::new(vec![vec![0, 5]], 2).is_err());
    assert!(GroupPartition::contiguous(4, 0).is_err());
    let g = GroupPartition::contiguous(5, 2).unwrap();
    assert_eq!(g.groups(), &[vec![0, 1], vec![2, 3], vec![4]]);
}

#[test]
fn total_variation_prox_examples() {
    assert_eq!(prox_tv1d(&v(&[1.5; 6]), 2.0), v(&[1.5; 6]));
    let p = prox_tv1d(&v(&[4.0, 0.0]), 1.0);
    assert!((p - v(&[3.0, 1.0])).amax() < 1e-15);
    let (a, b) = grid_argmin_2d(|a, b| 0.5 * ((a - 4.0).powi(2) + b * b) + (a - b).abs(), -10.0, 10.0, 1e-2);
    assert!((a - 3.0).abs() < 1e-4 && (b - 1.0).abs() < 1e-4);
    let p = prox_tv1d(&v(&[1.0, 2.0, 1.0]), 10.0);
    assert!((p - v(&[4.0 / 3.0; 3])).amax() < 1e-15);
    let z = grid_argmin_nd(
        |z| 0.5 * ((z[0] - 1.0).powi(2) + (z[1] - 2.0).powi(2) + (z[2] - 1.0).powi(2)) + 10.0 * ((z[1] - z[0]).abs() + (z[2] - z[1]).abs()),
        &[0.0; 3],
        10.0,
        20,
        1e-7,
    );
    for zi in z {
        assert!((zi - 4.0 / 3.0).abs() < 1e-4);
    }
}

#[test]
fn total_variation_prox_satisfies_dual_certificate() {
    let mut d = Draws::new(6);
    for n in [1usize, 2, 3, 7, 50, 256] {
        for _ in 0..20 {
            let x = d.vector(n, 3.0);
            let lambda = d.uniform(0.0, 2.0);
            let z = prox_tv1d(&x, lambda);
            let viol = tv_prox_certificate(x.as_slice(), z.as_slice(), lambda);
            assert!(viol < 1e-10, "n={n}, λ={lambda}: violation {viol:e}");
        }
    }
}

#[test]
fn nuclear_prox_examples() {
    assert_eq!(prox_nuclear(&Matrix::zeros(2, 3), 1.0).unwrap(), Matrix::zeros(2, 3));
    let p = prox_nuclear(&Matrix::from_diagonal(&v(&[3.0, 1.0])), 1.0).unwrap();
    assert!((p - Matrix::from_diagonal(&v(&[2.0, 0.0]))).amax() < 1e-14);
    let mut d = Draws::new(7);
    let x = d.matrix(4, 3);
    let top = x.singular_values().max();
    assert!(prox_nuclear(&x, top * 1.0001).unwrap().amax() < 1e-12);
}

#[test]
fn nuclear_prox_agrees_with_gram_route() {
    let mut d = Draws::new(8);
    for (m, n) in [(3, 3), (5, 2), (2, 6), (8, 8)] {
        let x = d.matrix(m, n);
        let lambda = d.uniform(0.1, 1.5);
        let got = prox_nuclear(&x, lambda).unwrap();
        let want = nuclear_prox_via_gram(&x, lambda);
        assert!((got - want).amax() < 1e-9);
    }
}

fn firm_check(prox: &dyn Fn(&Vector) -> Vector, d: &mut Draws, n: usize) {
    for _ in 0..100 {
        let (x, z) = (d.vector(n, 5.0), d.vector(n, 5.0));
        let (px, pz) = (prox(&x), prox(&z));
        let diff = &px - &pz;
        assert!(diff.norm_squared() <= diff.dot(&(&x - &z)) + 1e-10);
    }
}

#[test]
fn every_prox_is_firmly_nonexpansive() {
    let mut d = Draws::new(9);
    let groups = GroupPartition::contiguous(6, 2).unwrap();
    firm_check(&|x| prox_l1(x, 0.7), &mut d, 6);
    firm_check(&|x| prox_group_l1l2(x, &groups, 0.7).unwrap(), &mut d, 6);
    firm_check(&|x| prox_tv1d(x, 0.7), &mut d, 6);
    firm_check(
        &|x| {
            let m = Matrix::from_column_slice(2, 3, x.as_slice());
            Vector::from_column_slice(prox_nuclear(&m, 0.7).unwrap().as_slice())
        },
        &mut d,
        6,
    );
    let sq = half_sq_norm(6, 2.0);
    firm_check(&|x| sq.prox(x, 0.7), &mut d, 6);
    let mix = l1_plus_half_sq(6, 1.0);
    firm_check(&|x| mix.prox(x, 0.7), &mut d, 6);
}

#[test]
fn prox_friendly_functions_minimize_their_subproblem_on_a_grid() {
    let mut d = Draws::new(10);
    for tag in ["l1", "half-sq", "l1+half-sq", "tv1d"] {
        let f = prox_function_by_tag(tag, 2, 1.5).unwrap();
        for _ in 0..3 {
            let x = d.vector(2, 3.0);
            let lambda = d.uniform(0.2, 2.0);
            let obj = |a: f64, b: f64| {
                let z = v(&[a, b]);
                0.5 * (&z - &x).norm_squared() + lambda * f.value(&z)
            };
            let (a, b) = grid_argmin_2d(obj, -10.0, 10.0, 1e-2);
            let p = f.prox(&x, lambda);
            assert!(obj(p[0], p[1]) <= obj(a, b) + 1e-4, "{tag}");
        }
    }
    assert!(prox_function_by_tag("nope", 2, 1.0).is_err());
}

#[test]
fn measured_envelope_modulus_dominates_formula() {
    let mut d = Draws::new(11);
    for _ in 0..200 {
        let mu = d.uniform(0.1, 5.0);
        let lambda = d.uniform(0.05, 3.0);
        let e = EnvelopeView::new(half_sq_norm(3, mu), lambda).unwrap();
        let (x, z) = (d.vector(3, 5.0), d.vector(3, 5.0));
        let mid = (&x + &z) / 2.0;
        let quotient = (e.value(&x) + e.value(&z) - 2.0 * e.value(&mid)) / (0.25 * (&x - &z).norm_squared());
        assert!(quotient >= envelope_strong_modulus(mu, lambda) - 1e-8);
        assert!((e.strong_modulus() - mu / (1.0 + lambda * mu)).abs() < 1e-15);
    }
}

fn lasso_2d(seed: u64) -> CompositeRLS {
    let mut d = Draws::new(seed);
    let a = d.matrix(1, 2);
    let y = d.vector(1, 2.0);
    CompositeRLS::with_step_fraction(a, y, l1_norm(2).scaled(0.3), 0.8).unwrap()
}

#[test]
fn metric_prox_examples() {
    let mut d = Draws::new(12);
    let a = d.matrix(3, 2);
    let y = d.vector(3, 1.0);
    let x = d.vector(2, 1.0);
    let smooth = CompositeRLS::with_step_fraction(a.clone(), y.clone(), zero_function(2), 0.5).unwrap();
    assert_eq!(smooth.prox_metric_m(&x).unwrap(), &x + a.tr_mul(&(&y - &a * &x)) * smooth.s());

    let decoupled = CompositeRLS::new(Matrix::zeros(3, 2), y, l1_norm(2), 0.5).unwrap();
    assert_eq!(decoupled.prox_metric_m(&x).unwrap(), prox_l1(&x, 0.5));

    let rls = lasso_2d(13);
    let x = v(&[0.8, -1.3]);
    let want = rls.prox_metric_m(&x).unwrap();
    let obj = |a: f64, b: f64| {
        let z = v(&[a, b]);
        0.5 * rls.metric_norm_sq(&(&z - &x)).unwrap() + rls.composite_value(&z).unwrap()
    };
    let (a, b) = grid_argmin_2d(obj, -10.0, 10.0, 1e-2);
    assert!((want[0] - a).abs() < 1e-4 && (want[1] - b).abs() < 1e-4, "{want:?} vs ({a}, {b})");
}

#[test]
fn metric_gradient_examples() {
    let rls = CompositeRLS::new(Matrix::zeros(2, 2), v(&[3.0, -1.0]), zero_function(2), 0.5).unwrap();
    assert_eq!(rls.grad_fm(&v(&[1.0, 2.0])).unwrap(), Vector::zeros(2));

    let mut d = Draws::new(14);
    let a = d.matrix(10, 6);
    let y = d.vector(10, 1.0);
    let rls = CompositeRLS::with_step_fraction(a, y, l1_norm(6).scaled(0.2), 0.99).unwrap();
    let mut x = Vector::zeros(6);
    for _ in 0..100_000 {
        x = rls.prox_metric_m(&x).unwrap();
    }
    assert!(rls.grad_fm(&x).unwrap().norm() <= 1e-6);
    // Firm nonexpansiveness of the forward-backward map gives a nonexpansive
    // residual in the metric.
    for _ in 0..100 {
        let (p, q) = (d.vector(6, 3.0), d.vector(6, 3.0));
        let lhs = rls.metric_norm_sq(&(rls.grad_fm(&p).unwrap() - rls.grad_fm(&q).unwrap())).unwrap();
        let rhs = rls.metric_norm_sq(&(&p - &q)).unwrap();
        assert!(lhs.sqrt() <= rhs.sqrt() * (1.0 + 1e-10));
    }
}

#[test]
fn metric_envelope_value_is_bounded_by_objective() {
    let mut d = Draws::new(15);
    let rls = lasso_2d(16);
    for _ in 0..50 {
        let x = d.vector(2, 3.0);
        let env = rls.metric_envelope_value(&x).unwrap();
        assert!(env <= rls.composite_value(&x).unwrap() + 1e-12);
    }
}
