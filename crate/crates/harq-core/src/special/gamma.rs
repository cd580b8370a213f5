//! Complex log-gamma (Lanczos, g = 7, n = 9) with reflection.
//!
//! The returned imaginary part is not reduced to the principal branch; every
//! caller exponentiates the result.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_gamma(z.conj()).conj();
    }
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let t = z + (LANCZOS_G + 0.5);
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (z + 0.5) * t.ln() - t + a.ln() + LN_SQRT_2PI
}

/// `ln sin(πz)` for `Im z ≥ 0`, written so that large imaginary parts do not
/// overflow: `sin(πz) = e^{-iπz} (1 - e^{2iπz}) · i/2`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let e = (2.0 * PI * i * z).exp();
    -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Real log-gamma for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn integer_and_half_integer_values() {
        let mut fact = 1.0;
        for n in 1..20 {
            let g = gamma(Complex64::new(n as f64, 0.0));
            assert!(close(g, Complex64::new(fact, 0.0), 1e-13), "n = {n}");
            fact *= n as f64;
        }
        let g = gamma(Complex64::new(0.5, 0.0));
        assert!(close(g, Complex64::new(PI.sqrt(), 0.0), 1e-14));
        let g = gamma(Complex64::new(-0.5, 0.0));
        assert!(close(g, Complex64::new(-2.0 * PI.sqrt(), 0.0), 1e-13));
    }

    #[test]
    fn recurrence_off_axis() {
        for &(re, im) in &[(0.3, 2.0), (-3.7, 0.4), (5.5, -8.0), (-0.5, 30.0), (0.5, 120.0)] {
            let z = Complex64::new(re, im);
            let lhs = ln_gamma(z + 1.0).exp();
            let rhs = z * ln_gamma(z).exp();
            assert!(close(lhs, rhs, 1e-12), "z = {z}");
        }
    }

    #[test]
    fn modulus_on_critical_line() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for &t in &[0.0, 1.0, 5.0, 20.0] {
            let g = gamma(Complex64::new(0.5, t));
            let want = (PI / (PI * t).cosh()).sqrt();
            assert!((g.norm() - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(-2.3, 1.7);
        assert!(close(gamma(z.conj()), gamma(z).conj(), 1e-14));
    }
}
