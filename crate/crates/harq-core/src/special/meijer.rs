//! Meijer G function: the Fox H function with unit slopes and complete
//! gamma factors only.

use super::contour::ContourConfig;
use super::foxh::{fox_h_eval, FoxHSpec, FoxTriple, HEval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, upper: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        let s = Self { m, n, upper, lower };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m > self.lower.len() || self.n > self.upper.len() {
            return Err(Error::InvalidParameter(format!(
                "G^{{{},{}}}_{{{},{}}}: counts exceed parameter lists",
                self.m,
                self.n,
                self.upper.len(),
                self.lower.len()
            )));
        }
        if self.upper.iter().chain(&self.lower).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Meijer G parameter".into()));
        }
        Ok(())
    }

    pub fn to_fox(&self) -> FoxHSpec {
        FoxHSpec {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(|&a| FoxTriple::complete(a)).collect(),
            lower: self.lower.iter().map(|&b| FoxTriple::complete(b)).collect(),
        }
    }
}

pub(crate) fn meijer_g_eval(spec: &MeijerGSpec, ln_z: f64, cfg: &ContourConfig) -> Result<HEval> {
    spec.validate()?;
    fox_h_eval(&spec.to_fox(), ln_z, cfg)
}

/// `G^{m,n}_{p,q}(z)`.
pub fn meijer_g(spec: &MeijerGSpec, z: f64, cfg: &ContourConfig) -> Result<f64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("Meijer G argument must be > 0, got {z}")));
    }
    let h = meijer_g_eval(spec, z.ln(), cfg)?;
    h.line.check_significant()?;
    Ok(h.line.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_reduction() {
        let spec = MeijerGSpec::new(1, 0, vec![], vec![0.0]).unwrap();
        for &z in &[0.1, 1.0, 5.0] {
            let v = meijer_g(&spec, z, &ContourConfig::default()).unwrap();
            assert!((v / (-z).exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cdf_kernel() {
        let spec = MeijerGSpec::new(1, 1, vec![1.0], vec![1.0, 0.0]).unwrap();
        let v = meijer_g(&spec, 0.7, &ContourConfig::default()).unwrap();
        assert!((v - (1.0 - (-0.7f64).exp())).abs() < 1e-11);
    }

    #[test]
    fn power_times_exponential() {
        // G^{1,0}_{0,1}(z | -; b) = z^b e^{-z}
        let spec = MeijerGSpec::new(1, 0, vec![], vec![1.5]).unwrap();
        let z: f64 = 2.0;
        let v = meijer_g(&spec, z, &ContourConfig::default()).unwrap();
        assert!((v - z.powf(1.5) * (-z).exp()).abs() < 1e-11);
    }

    #[test]
    fn misplaced_abscissa_changes_the_value() {
        // moving the line across the pole at 0 subtracts its residue
        let spec = MeijerGSpec::new(1, 1, vec![1.0], vec![1.0, 0.0]).unwrap();
        let cfg = ContourConfig::default().with_abscissa(0.5);
        let v = meijer_g(&spec, 0.7, &cfg).unwrap();
        assert!((v - (-(-0.7f64).exp())).abs() < 1e-10, "{v}");
    }
}
