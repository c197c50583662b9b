//! Bessel functions `J_ν` and `Y_ν` of real order and complex argument.
//!
//! Ascending series in double-double for moderate `|z|`; Hankel's expansion
//! once it converges to full precision (`|z| ≥ 25`).

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::dd::CDd;
use super::gamma::rgamma;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const HANKEL_RADIUS: f64 = 25.0;
const SERIES_RADIUS: f64 = 60.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0
}

fn j_series(nu: f64, z: C) -> Result<C> {
    let half = z / 2.0;
    let lead = (nu * half.ln()).exp() * rgamma(C::new(nu + 1.0, 0.0));
    let hd = CDd::from_c(half);
    let q = -(hd * hd);
    let mut term = CDd::from_c(lead);
    let mut sum = term;
    let mut quiet = 0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term = term * q / (CDd::real(kf) * (CDd::real(kf) + CDd::real(nu)));
        sum = sum + term;
        let tn = term.norm();
        if tn == 0.0 {
            return Ok(sum.to_c());
        }
        if tn < 1e-16 * sum.norm() {
            quiet += 1;
            if quiet >= 5 {
                return Ok(sum.to_c());
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Domain(format!("Bessel series did not converge at |z| = {}", z.norm())))
}

/// Hankel's `P`, `Q` sums; `None` if the expansion is not accurate here.
fn hankel_pq(nu: f64, z: C) -> Option<(C, C)> {
    let mu = 4.0 * nu * nu;
    let mut t = C::new(1.0, 0.0);
    let (mut p, mut q) = (t, C::new(0.0, 0.0));
    let mut prev = 1.0;
    for k in 1..200usize {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t = t * (mu - odd * odd) / (8.0 * kf * z);
        let tn = t.norm();
        let scale = p.norm() + q.norm();
        if tn == 0.0 {
            return Some((p, q));
        }
        if tn > prev {
            return (prev <= 1e-16 * scale).then_some((p, q));
        }
        // P = t0 − t2 + t4 − …, Q = t1 − t3 + …
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += t * sign;
        } else {
            q += t * sign;
        }
        prev = tn;
        if tn <= 1e-17 * scale {
            return Some((p, q));
        }
    }
    None
}

fn hankel(nu: f64, z: C) -> Option<(C, C)> {
    if z.norm() < HANKEL_RADIUS || z.re < 0.0 && z.im == 0.0 {
        return None;
    }
    let (p, q) = hankel_pq(nu, z)?;
    let w = z - (nu / 2.0 + 0.25) * PI;
    let amp = (2.0 / (PI * z)).sqrt();
    let (cw, sw) = (w.cos(), w.sin());
    Some((amp * (p * cw - q * sw), amp * (p * sw + q * cw)))
}

fn check_series_domain(z: C) -> Result<()> {
    if z.norm() > SERIES_RADIUS {
        Err(Error::Domain(format!("|z| = {} outside the series domain", z.norm())))
    } else {
        Ok(())
    }
}

/// `J_ν(z)` on the principal branch.
pub fn bessel_j_complex(nu: f64, z: C) -> Result<C> {
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("order {nu}")));
    }
    if z == C::new(0.0, 0.0) {
        return match nu {
            0.0 => Ok(C::new(1.0, 0.0)),
            n if n > 0.0 || is_integer(n) => Ok(C::new(0.0, 0.0)),
            _ => Err(Error::Domain(format!("J_{nu}(0) is unbounded"))),
        };
    }
    if nu < 0.0 && is_integer(nu) {
        let sign = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(bessel_j_complex(-nu, z)? * sign);
    }
    if let Some((j, _)) = hankel(nu, z) {
        return Ok(j);
    }
    check_series_domain(z)?;
    j_series(nu, z)
}

/// `Y_ν(z)` on the principal branch; integer orders use the logarithmic
/// series directly, avoiding the `0/0` of the reflection formula.
pub fn bessel_y_complex(nu: f64, z: C) -> Result<C> {
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("order {nu}")));
    }
    if z == C::new(0.0, 0.0) {
        return Err(Error::Domain("Y is singular at 0".into()));
    }
    if let Some((_, y)) = hankel(nu, z) {
        return Ok(y);
    }
    check_series_domain(z)?;
    if is_integer(nu) {
        let n = nu.abs() as u32;
        let sign = if nu < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        return Ok(y_integer_series(n, z)? * sign);
    }
    y_from_j(nu, z)
}

/// `π Y_n(z) = 2 ln(z/2) J_n(z) − Σ_{k<n} (n−k−1)!/k! (z/2)^{2k−n}
///   − Σ_k (ψ(k+1) + ψ(n+k+1)) (−z²/4)^k (z/2)^n / (k! (n+k)!)`.
fn y_integer_series(n: u32, z: C) -> Result<C> {
    let half = z / 2.0;
    let hd = CDd::from_c(half);
    let q = hd * hd;
    // Finite part, built from the k = n−1 end: (n−k−1)!/k! q^k.
    let mut finite = CDd::real(0.0);
    if n > 0 {
        let mut term = CDd::real(1.0);
        for _ in 0..n - 1 {
            term = term * q;
        }
        let mut fact = 1.0;
        for k in 1..n {
            fact *= k as f64;
        }
        term = term / CDd::real(fact);
        finite = term;
        for k in (0..n - 1).rev() {
            // term_k = term_{k+1} (k+1)(n−k−1) / q
            term = term * CDd::real(((k + 1) * (n - k - 1)) as f64) / q;
            finite = finite + term;
        }
        let mut pow = CDd::real(1.0);
        for _ in 0..n {
            pow = pow * hd;
        }
        finite = finite / pow;
    }
    // Digamma-weighted series.
    let mut lead = CDd::real(1.0);
    for k in 1..=n {
        lead = lead * hd / CDd::real(k as f64);
    }
    let mut psi_k = -EULER_GAMMA;
    let mut psi_nk = -EULER_GAMMA + (1..=n).map(|j| 1.0 / j as f64).sum::<f64>();
    let mut term = lead;
    let mut sum = term * CDd::real(psi_k + psi_nk);
    let mut quiet = 0;
    let mut converged = false;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term = -(term * q) / (CDd::real(kf) * CDd::real(kf + n as f64));
        psi_k += 1.0 / kf;
        psi_nk += 1.0 / (kf + n as f64);
        let add = term * CDd::real(psi_k + psi_nk);
        sum = sum + add;
        let tn = add.norm();
        if tn == 0.0 || tn < 1e-17 * sum.norm() {
            quiet += 1;
            if quiet >= 5 || tn == 0.0 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if !converged {
        return Err(Error::Domain(format!("Bessel series did not converge at |z| = {}", z.norm())));
    }
    let log_part = CDd::from_c(2.0 * half.ln()) * CDd::from_c(j_series(n as f64, z)?);
    Ok((log_part - finite - sum).to_c() / PI)
}

fn y_from_j(nu: f64, z: C) -> Result<C> {
    let (s, c) = (PI * nu).sin_cos();
    Ok((j_series(nu, z)? * c - j_series(-nu, z)?) / s)
}

/// `J'_ν(z) = (J_{ν−1}(z) − J_{ν+1}(z))/2`.
pub fn bessel_j_derivative_complex(nu: f64, z: C) -> Result<C> {
    Ok(0.5 * (bessel_j_complex(nu - 1.0, z)? - bessel_j_complex(nu + 1.0, z)?))
}

/// `Y'_ν(z) = (Y_{ν−1}(z) − Y_{ν+1}(z))/2`.
pub fn bessel_y_derivative_complex(nu: f64, z: C) -> Result<C> {
    Ok(0.5 * (bessel_y_complex(nu - 1.0, z)? - bessel_y_complex(nu + 1.0, z)?))
}

/// `J_ν(x)` for real `x` (`x ≥ 0` unless `ν` is an integer).
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        if !is_integer(nu) {
            return Err(Error::Domain(format!("J_{nu}({x}) is complex")));
        }
        let sign = if (nu as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * bessel_j(nu, -x)?);
    }
    Ok(bessel_j_complex(nu, C::new(x, 0.0))?.re)
}

/// `Y_ν(x)` for `x > 0`.
pub fn bessel_y(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("Y requires x > 0, got {x}")));
    }
    Ok(bessel_y_complex(nu, C::new(x, 0.0))?.re)
}

pub fn bessel_j_derivative(nu: f64, x: f64) -> Result<f64> {
    Ok(0.5 * (bessel_j(nu - 1.0, x)? - bessel_j(nu + 1.0, x)?))
}

pub fn bessel_y_derivative(nu: f64, x: f64) -> Result<f64> {
    Ok(0.5 * (bessel_y(nu - 1.0, x)? - bessel_y(nu + 1.0, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_closed_forms() {
        for x in [0.3, 2.0, 11.0, 24.0, 26.0, 45.0] {
            let amp = (2.0 / (PI * x)).sqrt();
            assert!((bessel_j(0.5, x).unwrap() - amp * x.sin()).abs() < 1e-14);
            assert!((bessel_y(0.5, x).unwrap() + amp * x.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn series_and_hankel_agree_near_switch() {
        for nu in [0.0, 1.0, 2.1, 3.5] {
            for z in [C::new(26.0, 0.0), C::new(5.0, 26.0), C::new(0.0, 30.0)] {
                let (j, _) = hankel(nu, z).unwrap();
                let s = j_series(nu, z).unwrap();
                assert!((j - s).norm() <= 1e-12 * s.norm().max(1e-3), "nu {nu} z {z}: {j} vs {s}");
            }
        }
    }

    #[test]
    fn negative_integer_order_reflects() {
        let a = bessel_j(-3.0, 4.2).unwrap();
        let b = bessel_j(3.0, 4.2).unwrap();
        assert!((a + b).abs() < 1e-15);
    }
}
