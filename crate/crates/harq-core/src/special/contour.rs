//! Mellin–Barnes line integrals `(1/2πi) ∫_{c-i∞}^{c+i∞} f(s) ds`.
//!
//! Two schemes are provided. Integrands built from complete gamma functions
//! decay exponentially along the line and are summed with the trapezoid rule,
//! which converges geometrically for analytic integrands. Integrands with
//! incomplete gamma factors only decay algebraically; for those the line is
//! integrated by adaptive Gauss–Kronrod up to `±T` and the two tails are
//! rotated onto horizontal rays where the integrand decays exponentially.

use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_semi_infinite};

const DOUBLINGS: usize = 4;
const GK_MAX_SEGMENTS: usize = 4000;

/// Contour placement and truncation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    /// Real part `c` of the vertical contour. `None` places it between the
    /// pole sequences of the kernel at hand.
    pub abscissa: Option<f64>,
    /// Initial half extent `T` of the line in the imaginary direction.
    pub half_extent: f64,
    /// Trapezoid nodes over `[-T, T]` before the resolution bound is applied.
    pub step_points: usize,
    /// Absolute tolerance for the tail and step-halving tests.
    pub tail_tol: f64,
    /// Double `T` until the tail test passes (at most four times).
    pub adapt: bool,
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self { abscissa: None, half_extent: 16.0, step_points: 512, tail_tol: 1e-10, adapt: true }
    }
}

impl ContourConfig {
    pub fn with_abscissa(mut self, c: f64) -> Self {
        self.abscissa = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.abscissa {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("abscissa must be finite, got {c}")));
            }
        }
        if !(self.half_extent.is_finite() && self.half_extent > 0.0) {
            return Err(Error::InvalidParameter(format!("half_extent must be > 0, got {}", self.half_extent)));
        }
        if self.step_points < 8 {
            return Err(Error::InvalidParameter(format!("step_points must be >= 8, got {}", self.step_points)));
        }
        if !(self.tail_tol.is_finite() && self.tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail_tol must be > 0, got {}", self.tail_tol)));
        }
        Ok(())
    }
}

/// Raw line integral: real and imaginary parts plus `(1/2π)∫|f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LineIntegral {
    pub re: f64,
    pub im: f64,
    pub l1: f64,
}

impl LineIntegral {
    /// Conjugate-symmetric integrands give real results.
    pub fn check_residual(&self, tail_tol: f64) -> Result<()> {
        if self.im.abs() > 1e-6 * self.re.abs() + tail_tol {
            return Err(Error::ResidualImaginary { real: self.re, imag: self.im });
        }
        Ok(())
    }

    /// Rejects results that rounding noise alone could have produced.
    pub fn check_significant(&self) -> Result<()> {
        if self.re.abs() <= 256.0 * f64::EPSILON * self.l1 {
            return Err(Error::NonConvergence(format!(
                "result {:e} is below the rounding floor of the integrand (L1 = {:e})",
                self.re, self.l1
            )));
        }
        Ok(())
    }

    /// Absolute size of the rounding floor.
    pub fn noise(&self) -> f64 {
        256.0 * f64::EPSILON * self.l1
    }
}

/// Wraps a fallible integrand so quadrature loops can stay infallible; the
/// first failure is kept and reported afterwards.
struct Guard<F> {
    f: F,
    err: RefCell<Option<Error>>,
}

impl<F: Fn(Complex64) -> Result<Complex64>> Guard<F> {
    fn new(f: F) -> Self {
        Self { f, err: RefCell::new(None) }
    }

    fn eval(&self, s: Complex64) -> Complex64 {
        match (self.f)(s) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => v,
            Ok(v) => {
                self.err
                    .borrow_mut()
                    .get_or_insert(Error::NonConvergence(format!("integrand not finite at s = {s}: {v}")));
                Complex64::default()
            }
            Err(e) => {
                self.err.borrow_mut().get_or_insert(e);
                Complex64::default()
            }
        }
    }

    fn take(&self) -> Result<()> {
        match self.err.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Trapezoid step that resolves both the strip of analyticity (half width
/// `d`) and the oscillation `e^{-i t ln z}` to roughly `e^{-36}`.
fn trapezoid_step(cfg: &ContourConfig, d: f64, ln_z: f64) -> f64 {
    let d = d.clamp(0.05, 1.0);
    (2.0 * cfg.half_extent / cfg.step_points as f64).min(2.0 * PI * d / (d * ln_z.abs() + 36.0))
}

/// Trapezoid rule on `s = c + it`. `f` must already include `z^{-s}`.
pub(crate) fn trapezoid_line<F>(f: F, c: f64, d: f64, ln_z: f64, cfg: &ContourConfig) -> Result<LineIntegral>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    cfg.validate()?;
    let g = Guard::new(f);
    let h = trapezoid_step(cfg, d, ln_z);
    let at = |t: f64| g.eval(Complex64::new(c, t));

    let mut n = (cfg.half_extent / h).ceil() as i64;
    let f0 = at(0.0);
    let mut sum = f0;
    let mut l1 = f0.norm();
    let add_nodes = |from: i64, to: i64, sum: &mut Complex64, l1: &mut f64| {
        for j in from..=to {
            let t = j as f64 * h;
            let (a, b) = (at(t), at(-t));
            *sum += a + b;
            *l1 += a.norm() + b.norm();
        }
    };
    add_nodes(1, n, &mut sum, &mut l1);
    let scale = h / (2.0 * PI);
    let mut value = sum * scale;

    if cfg.adapt {
        let mut settled = false;
        for _ in 0..DOUBLINGS {
            add_nodes(n + 1, 2 * n, &mut sum, &mut l1);
            n *= 2;
            let next = sum * scale;
            let tol = cfg.tail_tol.max(64.0 * f64::EPSILON * l1 * scale);
            let diff = (next - value).norm();
            value = next;
            if diff <= tol {
                settled = true;
                break;
            }
        }
        g.take()?;
        if !settled {
            return Err(Error::NonConvergence(format!(
                "contour tail still moving after {DOUBLINGS} doublings of T (last T = {})",
                n as f64 * h
            )));
        }
        // step halving: add the midpoints of every panel
        let mut mids = Complex64::default();
        for j in 0..n {
            let t = (j as f64 + 0.5) * h;
            let (a, b) = (at(t), at(-t));
            mids += a + b;
            l1 += 0.5 * (a.norm() + b.norm());
        }
        let refined = (value + mids * scale) * 0.5;
        let tol = cfg.tail_tol.max(64.0 * f64::EPSILON * l1 * scale);
        if (refined - value).norm() > 10.0 * tol {
            g.take()?;
            return Err(Error::NonConvergence(format!(
                "halving the contour step moved the result by {:e}",
                (refined - value).norm()
            )));
        }
        value = refined;
    }
    g.take()?;
    Ok(LineIntegral { re: value.re, im: value.im, l1: l1 * scale })
}

/// Line integral for algebraically decaying integrands.
///
/// `full` is the integrand, `algebraic` its analytic continuation with the
/// exponentially small parts dropped; both include `z^{-s}`. For `ln z ≥ 0`
/// the tails beyond `±T` are moved onto rightward rays and integrated with
/// `algebraic`; for `ln z < 0` they go leftward with `full`. `t_min` is the
/// smallest `T` at which the dropped parts are negligible.
pub(crate) fn deformed_line<F, A>(
    full: F,
    algebraic: A,
    c: f64,
    t_min: f64,
    ln_z: f64,
    cfg: &ContourConfig,
) -> Result<LineIntegral>
where
    F: Fn(Complex64) -> Result<Complex64>,
    A: Fn(Complex64) -> Result<Complex64>,
{
    cfg.validate()?;
    let full = Guard::new(full);
    let alg = Guard::new(algebraic);
    let i = Complex64::i();
    // Tolerances follow the integrand scale: nothing below ~ε·L1 is
    // resolvable, and the caller accounts for that floor separately.
    let t0 = cfg.half_extent.max(t_min);
    let probe = integrate(|y: f64| full.eval(Complex64::new(c, y)), -t0, t0, 0.0, 1e-6, 64);
    full.take()?;
    let abs_tol = (1e-3 * cfg.tail_tol).max(4.0 * f64::EPSILON * probe.l1);

    let once = |t: f64| -> Result<(Complex64, f64)> {
        let center = integrate(|y: f64| full.eval(Complex64::new(c, y)), -t, t, abs_tol, 0.0, GK_MAX_SEGMENTS);
        let ell = if ln_z.abs() > 0.0 { (1.0 / ln_z.abs()).clamp(1.0, t) } else { t };
        let (up, lo) = if ln_z >= 0.0 {
            let up = integrate_semi_infinite(
                |r| alg.eval(Complex64::new(c + r, t)),
                0.0,
                ell,
                abs_tol,
                0.0,
                GK_MAX_SEGMENTS,
            );
            let lo = integrate_semi_infinite(
                |r| alg.eval(Complex64::new(c + r, -t)),
                0.0,
                ell,
                abs_tol,
                0.0,
                GK_MAX_SEGMENTS,
            );
            (up, lo)
        } else {
            let mut up = integrate_semi_infinite(
                |r| full.eval(Complex64::new(c - r, t)),
                0.0,
                ell,
                abs_tol,
                0.0,
                GK_MAX_SEGMENTS,
            );
            let mut lo = integrate_semi_infinite(
                |r| full.eval(Complex64::new(c - r, -t)),
                0.0,
                ell,
                abs_tol,
                0.0,
                GK_MAX_SEGMENTS,
            );
            up.value = -up.value;
            lo.value = -lo.value;
            (up, lo)
        };
        full.take()?;
        alg.take()?;
        let err = center.abs_err + up.abs_err + lo.abs_err;
        if err > cfg.tail_tol.max(64.0 * f64::EPSILON * (center.l1 + up.l1 + lo.l1)) {
            return Err(Error::NonConvergence(format!("Gauss–Kronrod error {err:e} on the deformed contour")));
        }
        let total = (i * center.value + up.value - lo.value) / (2.0 * PI * i);
        Ok((total, (center.l1 + up.l1 + lo.l1) / (2.0 * PI)))
    };

    let mut t = cfg.half_extent.max(t_min);
    let (mut value, mut l1) = once(t)?;
    if cfg.adapt {
        let mut settled = false;
        for _ in 0..DOUBLINGS {
            t *= 2.0;
            let (next, next_l1) = once(t)?;
            let diff = (next - value).norm();
            value = next;
            l1 = next_l1;
            if diff <= cfg.tail_tol.max(64.0 * f64::EPSILON * l1) {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(Error::NonConvergence(format!(
                "deformed contour still moving after {DOUBLINGS} doublings of T (last T = {t})"
            )));
        }
    }
    Ok(LineIntegral { re: value.re, im: value.im, l1 })
}

/// `(1/2π) ∫ f(c+it) z^{-(c+it)} dt` for an integrand that decays
/// exponentially along the line and is analytic within 1/4 of it.
///
/// The abscissa defaults to 0.5.
pub fn mellin_barnes_integrate<F>(integrand: F, config: &ContourConfig, z: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("Mellin–Barnes argument must be > 0, got {z}")));
    }
    let c = config.abscissa.unwrap_or(0.5);
    let ln_z = z.ln();
    let res = trapezoid_line(|s| Ok(integrand(s) * (-s * ln_z).exp()), c, 0.25, ln_z, config)?;
    res.check_residual(config.tail_tol)?;
    res.check_significant()?;
    Ok(res.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma::ln_gamma;

    #[test]
    fn gamma_kernel_gives_exponential() {
        let cfg = ContourConfig::default();
        for &z in &[0.1, 1.0, 5.0] {
            let v = mellin_barnes_integrate(|s| ln_gamma(s).exp(), &cfg, z).unwrap();
            assert!((v - (-z).exp()).abs() < 1e-12, "z = {z}: {v}");
        }
    }

    #[test]
    fn huge_argument_is_rejected() {
        let cfg = ContourConfig::default();
        let r = mellin_barnes_integrate(|s| ln_gamma(s).exp(), &cfg, 1e30);
        assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    }

    #[test]
    fn slow_tail_fails_the_doubling_test() {
        // 1/(s(1-s)) decays only quadratically: the truncated line keeps moving
        let cfg = ContourConfig { tail_tol: 1e-12, ..ContourConfig::default() };
        let r = mellin_barnes_integrate(|s| 1.0 / (s * (1.0 - s)), &cfg, 1.0);
        assert!(matches!(r, Err(Error::NonConvergence(_))), "{r:?}");
    }

    #[test]
    fn asymmetric_integrand_is_flagged() {
        let cfg = ContourConfig::default();
        let r = mellin_barnes_integrate(|s| Complex64::i() * ln_gamma(s).exp(), &cfg, 1.0);
        assert!(matches!(r, Err(Error::ResidualImaginary { .. })), "{r:?}");
    }

    #[test]
    fn config_validation() {
        let bad = ContourConfig { tail_tol: 0.0, ..ContourConfig::default() };
        assert!(bad.validate().is_err());
        let bad = ContourConfig { half_extent: -1.0, ..ContourConfig::default() };
        assert!(bad.validate().is_err());
    }
}
