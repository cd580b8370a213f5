//! Upper incomplete Fox H function
//!
//! ```text
//! H^{m,n}_{p,q}(z) = (1/2πi) ∫ Π_{j≤m} Γ(b_j + β_j s, B_j) Π_{i≤n} Γ(1 - a_i - α_i s, A_i)
//!                    / [Π_{j>m} Γ(1 - b_j - β_j s, B_j) Π_{i>n} Γ(a_i + α_i s, A_i)] z^{-s} ds
//! ```
//!
//! Factors with a zero third parameter are complete gamma functions. Factors
//! with a positive third parameter are supported in the `m` block (positive
//! slope); they are entire in `s`, and each is written as
//! `Γ(u, B) = e^{-B} B^u g(u, B)` so that `e^{-B} B^{b}` leaves the integral as
//! a log-scale and `B^{βs}` folds into `z`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::contour::{deformed_line, trapezoid_line, ContourConfig, LineIntegral};
use super::gamma::ln_gamma;
use super::incgamma::{lower_series, scaled_upper_gamma};
use crate::error::{Error, Result};

/// One `(a, α, A)` parameter triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoxTriple {
    pub offset: f64,
    pub slope: f64,
    /// Lower limit of the incomplete gamma; zero means complete.
    pub limit: f64,
}

impl FoxTriple {
    pub fn new(offset: f64, slope: f64, limit: f64) -> Self {
        Self { offset, slope, limit }
    }

    pub fn complete(offset: f64) -> Self {
        Self { offset, slope: 1.0, limit: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoxHSpec {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<FoxTriple>,
    pub lower: Vec<FoxTriple>,
}

impl FoxHSpec {
    pub fn new(m: usize, n: usize, upper: Vec<FoxTriple>, lower: Vec<FoxTriple>) -> Result<Self> {
        let s = Self { m, n, upper, lower };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.lower.len() || self.n > self.upper.len() {
            return Err(Error::InvalidParameter(format!(
                "H^{{{},{}}}_{{{},{}}}: counts exceed parameter lists",
                self.m,
                self.n,
                self.upper.len(),
                self.lower.len()
            )));
        }
        for t in self.upper.iter().chain(&self.lower) {
            if !(t.offset.is_finite() && t.slope.is_finite() && t.limit.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite triple {t:?}")));
            }
            if t.slope <= 0.0 {
                return Err(Error::InvalidParameter(format!("slope must be > 0 in {t:?}")));
            }
            if t.limit < 0.0 {
                return Err(Error::InvalidParameter(format!("third parameter must be >= 0 in {t:?}")));
            }
        }
        Ok(())
    }
}

/// `value · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub value: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn to_f64(self) -> f64 {
        self.value * self.log_scale.exp()
    }
}

/// A gamma argument `u = off + slope·s`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Arg {
    off: f64,
    slope: f64,
}

impl Arg {
    fn at(&self, s: Complex64) -> Complex64 {
        s * self.slope + self.off
    }

    /// Closest pole of `Γ(u)` (restricted to the first `count` poles) to `c`.
    fn pole_distance(&self, c: f64, count: Option<usize>) -> f64 {
        let step = 1.0 / self.slope.abs();
        let s0 = -self.off / self.slope;
        // poles at s0 - j·step (slope > 0) or s0 + j·step (slope < 0)
        let dir = if self.slope > 0.0 { -1.0 } else { 1.0 };
        let x = (c - s0) * dir / step;
        let last = count.map(|k| k.saturating_sub(1) as f64).unwrap_or(f64::INFINITY);
        let j = x.round().clamp(0.0, last);
        ((s0 + dir * j * step) - c).abs()
    }

    fn first_pole(&self) -> f64 {
        -self.off / self.slope
    }
}

/// Reduced Mellin–Barnes kernel.
#[derive(Debug, Clone)]
struct Kernel {
    /// Complete gamma factors with signed multiplicity.
    complete: Vec<(Arg, i32)>,
    /// Numerator incomplete factors `g(u, B)` with multiplicity.
    incomplete: Vec<(Arg, f64, i32)>,
    /// Divisors `(u)_k` left by `Γ(u)/Γ(u+k)` pairs.
    pochhammer: Vec<(Arg, usize)>,
    /// `Σ slope·ln B`, subtracted from `ln z`.
    shift: f64,
    log_scale: f64,
}

fn push_grouped<K: PartialEq + Copy>(v: &mut Vec<(K, i32)>, key: K, mult: i32) {
    match v.iter_mut().find(|(k, _)| *k == key) {
        Some((_, m)) => *m += mult,
        None => v.push((key, mult)),
    }
}

impl Kernel {
    fn build(spec: &FoxHSpec) -> Result<Self> {
        spec.validate()?;
        let mut num: Vec<Arg> = Vec::new();
        let mut den: Vec<Arg> = Vec::new();
        let mut inc: Vec<((Arg, u64), i32)> = Vec::new();
        let mut shift = 0.0;
        let mut log_scale = 0.0;

        let mut place = |arg: Arg, limit: f64, numerator: bool| -> Result<()> {
            if limit == 0.0 {
                if numerator {
                    num.push(arg)
                } else {
                    den.push(arg)
                }
                return Ok(());
            }
            if !numerator || arg.slope <= 0.0 {
                return Err(Error::Unsupported("incomplete gamma factors are only supported in the m block".into()));
            }
            let lb = limit.ln();
            shift += arg.slope * lb;
            log_scale += arg.off * lb - limit;
            push_grouped(&mut inc, (arg, limit.to_bits()), 1);
            Ok(())
        };
        for (j, t) in spec.lower.iter().enumerate() {
            if j < spec.m {
                place(Arg { off: t.offset, slope: t.slope }, t.limit, true)?;
            } else {
                place(Arg { off: 1.0 - t.offset, slope: -t.slope }, t.limit, false)?;
            }
        }
        for (i, t) in spec.upper.iter().enumerate() {
            if i < spec.n {
                place(Arg { off: 1.0 - t.offset, slope: -t.slope }, t.limit, true)?;
            } else {
                place(Arg { off: t.offset, slope: t.slope }, t.limit, false)?;
            }
        }

        // Γ(u)/Γ(u+k) = 1/(u)_k
        let mut pochhammer = Vec::new();
        let mut i = 0;
        while i < num.len() {
            let a = num[i];
            let hit = den.iter().position(|d| {
                let k = d.off - a.off;
                (d.slope - a.slope).abs() <= 1e-13 * a.slope.abs()
                    && (0.5..=64.5).contains(&k)
                    && (k - k.round()).abs() <= 1e-12
            });
            match hit {
                Some(j) => {
                    let k = (den[j].off - a.off).round() as usize;
                    den.swap_remove(j);
                    num.swap_remove(i);
                    pochhammer.push((a, k));
                }
                None => i += 1,
            }
        }

        let mut complete = Vec::new();
        for a in num {
            push_grouped(&mut complete, a, 1);
        }
        for a in den {
            push_grouped(&mut complete, a, -1);
        }
        complete.retain(|(_, m)| *m != 0);
        let incomplete = inc.into_iter().map(|((a, bits), m)| (a, f64::from_bits(bits), m)).collect();
        Ok(Self { complete, incomplete, pochhammer, shift, log_scale })
    }

    fn has_incomplete(&self) -> bool {
        !self.incomplete.is_empty()
    }

    /// Rightmost pole of the left sequence and leftmost of the right one.
    fn pole_bounds(&self) -> (Option<f64>, Option<f64>) {
        let mut left: Option<f64> = None;
        let mut right: Option<f64> = None;
        let numer = self
            .complete
            .iter()
            .filter(|(_, m)| *m > 0)
            .map(|(a, _)| *a)
            .chain(self.pochhammer.iter().map(|(a, _)| *a));
        for a in numer {
            let p = a.first_pole();
            if a.slope > 0.0 {
                left = Some(left.map_or(p, |l| l.max(p)));
            } else {
                right = Some(right.map_or(p, |r| r.min(p)));
            }
        }
        (left, right)
    }

    fn abscissa(&self, cfg: &ContourConfig) -> Result<f64> {
        let (left, right) = self.pole_bounds();
        if let (Some(l), Some(r)) = (left, right) {
            if l >= r {
                return Err(Error::Unsupported(format!(
                    "no vertical line separates the pole sequences (left {l}, right {r})"
                )));
            }
        }
        let c = match cfg.abscissa {
            Some(c) => c,
            None => match (left, right) {
                (Some(l), Some(r)) => 0.5 * (l + r),
                (Some(l), None) => l + 0.5,
                (None, Some(r)) => r - 0.5,
                (None, None) => 0.5,
            },
        };
        if self.strip(c) < 1e-9 {
            return Err(Error::Domain(format!("contour abscissa {c} lies on a pole")));
        }
        Ok(c)
    }

    /// Distance from the line `Re s = c` to the nearest pole.
    fn strip(&self, c: f64) -> f64 {
        let mut d = f64::INFINITY;
        for (a, m) in &self.complete {
            if *m > 0 {
                d = d.min(a.pole_distance(c, None));
            }
        }
        for (a, k) in &self.pochhammer {
            d = d.min(a.pole_distance(c, Some(*k)));
        }
        d
    }

    /// Algebraic decay order of the incomplete kernel along the line.
    fn decay_order(&self) -> i32 {
        self.incomplete.iter().map(|(_, _, m)| *m).sum::<i32>()
            + self.pochhammer.iter().map(|(_, k)| *k as i32).sum::<i32>()
    }

    /// Height beyond which `e^B B^{-u} Γ(u)` is negligible next to `g(u, B)`.
    fn exponential_height(&self, c: f64) -> f64 {
        let mut t_min: f64 = 0.0;
        for (a, b, _) in &self.incomplete {
            let re_u = a.off + a.slope * c;
            let mut t = 1.0;
            for _ in 0..4 {
                let growth = (re_u - 0.5).max(0.0) * (1.0 + a.slope * t).ln();
                t = 2.0 / (PI * a.slope) * (b + (re_u * b.ln()).abs() + growth + 45.0) + 2.0;
            }
            t_min = t_min.max(t);
        }
        t_min
    }

    fn pochhammer_factor(&self, s: Complex64) -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for (a, k) in &self.pochhammer {
            let u = a.at(s);
            for j in 0..*k {
                p *= u + j as f64;
            }
        }
        p
    }

    fn complete_log(&self, s: Complex64) -> Complex64 {
        self.complete.iter().map(|(a, m)| ln_gamma(a.at(s)) * (*m as f64)).sum()
    }

    fn full(&self, s: Complex64, ln_z: f64) -> Result<Complex64> {
        let mut v = (self.complete_log(s) - s * ln_z).exp();
        for (a, b, m) in &self.incomplete {
            v *= scaled_upper_gamma(a.at(s), *b)?.powi(*m);
        }
        Ok(v / self.pochhammer_factor(s))
    }

    /// `full` with each `g(u, B)` replaced by its algebraic part `-φ(u, B)`.
    fn algebraic(&self, s: Complex64, ln_z: f64) -> Result<Complex64> {
        let mut v = (self.complete_log(s) - s * ln_z).exp();
        for (a, b, m) in &self.incomplete {
            v *= (-lower_series(a.at(s), *b)?).powi(*m);
        }
        Ok(v / self.pochhammer_factor(s))
    }
}

/// Raw evaluation at `ln z`, with the incomplete-gamma scale kept apart.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HEval {
    pub line: LineIntegral,
    pub log_scale: f64,
}

pub(crate) fn fox_h_eval(spec: &FoxHSpec, ln_z: f64, cfg: &ContourConfig) -> Result<HEval> {
    cfg.validate()?;
    if !ln_z.is_finite() {
        return Err(Error::Domain(format!("Fox H argument must be finite and > 0 (ln z = {ln_z})")));
    }
    let k = Kernel::build(spec)?;
    let c = k.abscissa(cfg)?;
    let ln_eff = ln_z - k.shift;
    let line = if k.has_incomplete() {
        if !k.complete.is_empty() {
            return Err(Error::Unsupported("complete gamma factors alongside incomplete ones".into()));
        }
        if ln_eff.abs() < 1e-12 && k.decay_order() <= 1 {
            return Err(Error::Unsupported("kernel decays like 1/s and z sits on the jump of the transform".into()));
        }
        deformed_line(|s| k.full(s, ln_eff), |s| k.algebraic(s, ln_eff), c, k.exponential_height(c), ln_eff, cfg)?
    } else {
        trapezoid_line(|s| k.full(s, ln_eff), c, k.strip(c), ln_eff, cfg)?
    };
    line.check_residual(cfg.tail_tol)?;
    Ok(HEval { line, log_scale: k.log_scale })
}

/// `H^{m,n}_{p,q}(z)` split as `value · e^{log_scale}`.
pub fn fox_h_scaled(spec: &FoxHSpec, z: f64, cfg: &ContourConfig) -> Result<ScaledValue> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("Fox H argument must be > 0, got {z}")));
    }
    let h = fox_h_eval(spec, z.ln(), cfg)?;
    h.line.check_significant()?;
    Ok(ScaledValue { value: h.line.re, log_scale: h.log_scale })
}

pub fn fox_h(spec: &FoxHSpec, z: f64, cfg: &ContourConfig) -> Result<f64> {
    fox_h_scaled(spec, z, cfg).map(ScaledValue::to_f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ContourConfig {
        ContourConfig::default()
    }

    #[test]
    fn complete_reduces_to_exponential() {
        let spec = FoxHSpec::new(1, 0, vec![], vec![FoxTriple::complete(0.0)]).unwrap();
        for &z in &[0.1, 1.0, 5.0] {
            let v = fox_h(&spec, z, &cfg()).unwrap();
            assert!((v / (-z).exp() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn slope_two_kernel() {
        // (1/2πi)∫Γ(2s) z^{-s} ds = e^{-√z}/2
        let spec = FoxHSpec::new(1, 0, vec![], vec![FoxTriple::new(0.0, 2.0, 0.0)]).unwrap();
        let z = 2.0;
        let v = fox_h(&spec, z, &cfg()).unwrap();
        assert!((v - 0.5 * (-z.sqrt()).exp()).abs() < 1e-11, "{v}");
    }

    #[test]
    fn single_incomplete_factor_is_a_shifted_exponential() {
        // (1/2πi)∫Γ(s, B) z^{-s} ds = e^{-z} 1{z > B}
        let b = 0.8;
        let spec = FoxHSpec::new(1, 0, vec![], vec![FoxTriple::new(0.0, 1.0, b)]).unwrap();
        for &z in &[1.0, 2.5, 4.0] {
            let v = fox_h(&spec, z, &cfg()).unwrap();
            assert!((v - (-z).exp()).abs() < 1e-9, "z = {z}: {v}");
        }
    }

    #[test]
    fn incomplete_cdf_kernel() {
        // H^{1,1}_{1,2}(z | (1,1,0); (1,1,B),(0,1,0)) = ∫_B^z e^{-t} dt for z ≥ B
        let b = 0.6;
        let spec = FoxHSpec::new(
            1,
            1,
            vec![FoxTriple::complete(1.0)],
            vec![FoxTriple::new(1.0, 1.0, b), FoxTriple::complete(0.0)],
        )
        .unwrap();
        for &z in &[0.9, 1.7, 6.0] {
            let v = fox_h(&spec, z, &cfg()).unwrap();
            let want = (-b).exp() - (-z).exp();
            assert!((v - want).abs() < 1e-9, "z = {z}: {v} vs {want}");
        }
    }

    #[test]
    fn unsupported_structures() {
        let spec = FoxHSpec::new(0, 0, vec![], vec![FoxTriple::new(0.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(fox_h(&spec, 1.0, &cfg()), Err(Error::Unsupported(_))));
        let spec = FoxHSpec::new(2, 0, vec![], vec![FoxTriple::new(0.0, 1.0, 1.0), FoxTriple::complete(0.0)]).unwrap();
        assert!(matches!(fox_h(&spec, 2.0, &cfg()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn invalid_specs() {
        assert!(FoxHSpec::new(2, 0, vec![], vec![FoxTriple::complete(0.0)]).is_err());
        assert!(FoxHSpec::new(1, 0, vec![], vec![FoxTriple::new(0.0, -1.0, 0.0)]).is_err());
        assert!(FoxHSpec::new(1, 0, vec![], vec![FoxTriple::new(0.0, 1.0, -0.5)]).is_err());
    }

    #[test]
    fn pole_distance_lattice() {
        let a = Arg { off: 1.0, slope: 1.0 }; // poles at -1, -2, ...
        assert!((a.pole_distance(-0.5, None) - 0.5).abs() < 1e-15);
        assert!((a.pole_distance(-2.2, None) - 0.2).abs() < 1e-12);
        let b = Arg { off: 0.0, slope: -1.0 }; // poles at 0, 1, 2, ...
        assert!((b.pole_distance(-0.5, Some(1)) - 0.5).abs() < 1e-15);
        assert!((b.pole_distance(3.0, Some(1)) - 3.0).abs() < 1e-15);
    }
}
