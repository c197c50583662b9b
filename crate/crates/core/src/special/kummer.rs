//! Confluent hypergeometric functions `M(a,b,z)` and `U(a,b,z)`.
//!
//! `M` is summed in double-double for `|z| < 35`, through the large-argument
//! expansion beyond when it converges to full precision, and by Kummer's
//! transformation on the left half-plane. `U` uses, in order of preference,
//! the large-argument expansion, the Laplace-type integral for `Re a > 0`
//! away from the negative axis (exp-sinh quadrature) and the connection
//! formula through `M`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;

use super::dd::CDd;
use super::gamma::{ln_gamma, rgamma};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const ASYMPTOTIC_RADIUS: f64 = 35.0;
const SERIES_RADIUS: f64 = 60.0;

pub(crate) fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn is_integer(z: C) -> bool {
    z.im == 0.0 && z.re.fract() == 0.0
}

fn check_b(b: C) -> Result<()> {
    if is_nonpositive_integer(b) {
        Err(Error::Pole(format!("M(a, b, z) with b = {}", b.re)))
    } else {
        Ok(())
    }
}

fn check_finite(name: &str, v: C) -> Result<C> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} overflows at this argument")))
    }
}

/// Ascending series; stops after five consecutive terms below `1e-16` of the sum.
fn m_series(a: C, b: C, z: C) -> Result<C> {
    let (ad, bd, zd) = (CDd::from_c(a), CDd::from_c(b), CDd::from_c(z));
    let mut term = CDd::real(1.0);
    let mut sum = term;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = CDd::real(n as f64);
        term = term * (ad + nf) * zd / ((bd + nf) * CDd::real(n as f64 + 1.0));
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
    Err(Error::Domain(format!("M series did not converge in {MAX_TERMS} terms at |z| = {}", z.norm())))
}

/// `Σ (p)_s (q)_s w^s / s!`, truncated at its smallest term. `None` when the
/// smallest term is not negligible at double precision.
fn asymptotic_sum(p: C, q: C, w: C) -> Option<C> {
    let mut term = C::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = 1.0;
    for s in 0..400 {
        let sf = s as f64;
        term = term * (p + sf) * (q + sf) * w / (sf + 1.0);
        let tn = term.norm();
        if tn == 0.0 {
            return Some(sum);
        }
        if tn > prev {
            return (prev <= 1e-16 * sum.norm()).then_some(sum);
        }
        sum += term;
        prev = tn;
        if tn <= 1e-17 * sum.norm() {
            return Some(sum);
        }
    }
    None
}

/// `Γ(num)/Γ(den)`, zero when `den` is a pole.
fn gamma_ratio(num: C, den: C) -> Result<C> {
    if is_nonpositive_integer(den) {
        return Ok(C::new(0.0, 0.0));
    }
    Ok((ln_gamma(num)? - ln_gamma(den)?).exp())
}

/// `U(a,b,z) ~ z^{−a} Σ (a)_s (a−b+1)_s (−z)^{−s}/s!`.
fn u_asymptotic(a: C, b: C, z: C) -> Option<C> {
    let s = asymptotic_sum(a, a - b + 1.0, -1.0 / z)?;
    Some((-a * z.ln()).exp() * s)
}

/// Large-argument expansion of `e^{−z} M(a,b,z)`, for `Re z ≥ 0`.
fn m_scaled_asymptotic(a: C, b: C, z: C) -> Result<Option<C>> {
    let Some(s1) = asymptotic_sum(1.0 - a, b - a, 1.0 / z) else {
        return Ok(None);
    };
    let Some(u) = u_asymptotic(a, b, z) else {
        return Ok(None);
    };
    let ipa = C::new(0.0, PI) * a;
    // The recessive term is multivalued across the real axis; on it the two
    // admissible choices are averaged so real data give real results.
    let phase = if z.im > 0.0 {
        ipa.exp()
    } else if z.im < 0.0 {
        (-ipa).exp()
    } else {
        0.5 * (ipa.exp() + (-ipa).exp())
    };
    let dominant = gamma_ratio(b, a)? * ((a - b) * z.ln()).exp() * s1;
    let recessive = gamma_ratio(b, b - a)? * phase * (-z).exp() * u;
    Ok(Some(dominant + recessive))
}

/// Kummer's function `M(a, b, z)`.
pub fn kummer_m(a: C, b: C, z: C) -> Result<C> {
    check_b(b)?;
    if z == C::new(0.0, 0.0) {
        return Ok(C::new(1.0, 0.0));
    }
    if z.re < 0.0 {
        return check_finite("M", z.exp() * kummer_m(b - a, b, -z)?);
    }
    if z.norm() >= ASYMPTOTIC_RADIUS {
        if let Some(ms) = m_scaled_asymptotic(a, b, z)? {
            return check_finite("M", z.exp() * ms);
        }
    }
    series_in_domain(a, b, z)
}

fn series_in_domain(a: C, b: C, z: C) -> Result<C> {
    // Near the positive axis the terms do not cancel, so the series stays
    // accurate until the result itself overflows.
    if z.norm() <= SERIES_RADIUS || (z.re >= 0.9 * z.norm() && z.re < 700.0) {
        m_series(a, b, z)
    } else {
        Err(Error::Domain(format!("M outside the supported domain at z = {z}")))
    }
}

/// `e^{−z} M(a, b, z)`, finite where `M` itself would overflow.
pub fn kummer_m_scaled(a: C, b: C, z: C) -> Result<C> {
    check_b(b)?;
    if z == C::new(0.0, 0.0) {
        return Ok(C::new(1.0, 0.0));
    }
    if z.re < 0.0 {
        // e^{−z} M(a,b,z) = M(b−a, b, −z)
        return kummer_m(b - a, b, -z);
    }
    if z.norm() >= ASYMPTOTIC_RADIUS {
        if let Some(ms) = m_scaled_asymptotic(a, b, z)? {
            return Ok(ms);
        }
    }
    Ok((-z).exp() * series_in_domain(a, b, z)?)
}

/// Tricomi's function `U(a, b, z)` on the principal branch.
///
/// Integer `b` is supported by the large-argument and integral branches; when
/// only the connection formula applies it yields [`Error::UnsupportedBranch`]
/// (see [`kummer_u_perturbed`]).
pub fn kummer_u(a: C, b: C, z: C) -> Result<C> {
    if z == C::new(0.0, 0.0) {
        return Err(Error::Domain("U(a, b, 0) is not defined".into()));
    }
    if z.norm() >= ASYMPTOTIC_RADIUS {
        if let Some(u) = u_asymptotic(a, b, z) {
            return Ok(u);
        }
    }
    // The rotated integral holds for |arg z| < π; stay clear of the cut.
    if z.re > -0.7 * z.norm() && a.re > 0.0 {
        if let Some(u) = u_integral(a, b, z)? {
            return Ok(u);
        }
    }
    if is_integer(b) {
        return Err(Error::UnsupportedBranch(format!("connection formula for U with integer b = {}", b.re)));
    }
    let first = gamma_ratio(1.0 - b, a - b + 1.0)? * kummer_m(a, b, z)?;
    let second = gamma_ratio(b - 1.0, a)? * ((1.0 - b) * z.ln()).exp() * kummer_m(a - b + 1.0, 2.0 - b, z)?;
    check_finite("U", first + second)
}

/// `U` with integer `b` on the connection-formula branch replaced by the
/// average of `b ± eps`.
pub fn kummer_u_perturbed(a: C, b: C, z: C, eps: f64) -> Result<C> {
    match kummer_u(a, b, z) {
        Err(Error::UnsupportedBranch(_)) => Ok(0.5 * (kummer_u(a, b + eps, z)? + kummer_u(a, b - eps, z)?)),
        other => other,
    }
}

/// `U = z^{−a}/Γ(a) ∫₀^∞ e^{−u} u^{a−1} (1 + u/z)^{b−a−1} du` by exp-sinh
/// quadrature with step halving. `None` if the refinement does not settle.
fn u_integral(a: C, b: C, z: C) -> Result<Option<C>> {
    let log_integrand = |tau: f64| -> Option<C> {
        let ln_u = FRAC_PI_2 * tau.sinh();
        if ln_u > 700.0 {
            return None;
        }
        let u = ln_u.exp();
        let tail = (b - a - 1.0) * (1.0 + u / z).ln();
        Some(C::new(-u, 0.0) + a * ln_u + tail + (FRAC_PI_2 * tau.cosh()).ln())
    };
    // Sums the nodes `offset + j·stride` (j ∈ Z) until the integrand is
    // negligible against the largest node value seen on each side.
    let sweep = |offset: f64, stride: f64| -> C {
        let mut total = C::new(0.0, 0.0);
        for dir in [1.0, -1.0] {
            let mut peak = f64::NEG_INFINITY;
            let mut j = if dir > 0.0 { 0.0 } else { -1.0 };
            loop {
                let tau = offset + j * stride;
                if tau.abs() > 12.0 {
                    break;
                }
                let Some(l) = log_integrand(tau) else { break };
                peak = peak.max(l.re);
                if l.re > -745.0 {
                    total += l.exp();
                }
                if l.re < peak - 48.0 && tau.abs() > 1.0 {
                    break;
                }
                j += dir;
            }
        }
        total
    };
    let mut h = 0.5;
    let mut sum = sweep(0.0, h);
    let mut estimate = sum * h;
    for _ in 0..8 {
        sum += sweep(h / 2.0, h);
        h /= 2.0;
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        if diff <= 1e-10 * estimate.norm() {
            return Ok(Some((-a * z.ln()).exp() * rgamma(a) * estimate));
        }
    }
    Ok(None)
}
