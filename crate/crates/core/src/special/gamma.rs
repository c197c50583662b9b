//! Log-gamma for complex arguments (Lanczos, g = 7, nine terms).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const G: f64 = 7.0;
const COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// `sin(πz)` with the integer part of `Re z` removed first, so that the
/// result keeps full relative accuracy next to the zeros.
fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = Complex64::new(z.re - n, z.im);
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// `ln Γ(z)` up to a multiple of `2πi`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("gamma at {}", z.re)));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1 − z) = π / sin(πz)
        Ok(Complex64::new(PI.ln(), 0.0) - sin_pi(z).ln() - ln_gamma_right(1.0 - z))
    } else {
        Ok(ln_gamma_right(z))
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// `1/Γ(z)`, entire; zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_and_half_integer_values() {
        let g5 = gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-12 && g5.im.abs() < 1e-12);
        let gh = gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((gh.re - PI.sqrt()).abs() < 1e-14);
        let gm = gamma(Complex64::new(-0.5, 0.0)).unwrap();
        assert!((gm.re + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn reflection_keeps_accuracy_next_to_poles() {
        // 1/Γ(−n + ε) = (−1)^n n! ε (1 − ε ψ(n+1) + O(ε²)).
        for (n, fact, psi) in [(2.0, 2.0, 1.5 - 0.577_215_664_901_532_9), (3.0, 6.0, 11.0 / 6.0 - 0.577_215_664_901_532_9)] {
            let eps = 2f64.powi(-23);
            let r = rgamma(Complex64::new(-n + eps, 0.0)).re;
            let sign = if n == 2.0 { 1.0 } else { -1.0 };
            let want = sign * fact * eps * (1.0 - psi * eps);
            assert!((r - want).abs() <= 1e-12 * want.abs(), "{r} vs {want}");
        }
    }

    #[test]
    fn poles_are_reported() {
        assert!(matches!(gamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(_))));
        assert_eq!(rgamma(Complex64::new(0.0, 0.0)).norm(), 0.0);
    }
}
