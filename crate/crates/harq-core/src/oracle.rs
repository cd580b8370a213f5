//! Recursive one-dimensional quadrature for the product distributions.
//!
//! `F_ξm(x) = ∫_1^x F_ξ(m-1)(x/z) p_γ(z - 1) dz` and
//! `F_ζm(x) = ∫_0^∞ F_ζ(m-1)(x/z) p_γ(z) dz`. Inner distributions of depth
//! two and more are tabulated once per call on a Chebyshev–Lobatto grid in
//! `ln y` and evaluated by barycentric interpolation, so the cost grows
//! linearly rather than exponentially with depth.

use std::f64::consts::PI;

use crate::channel::{BaselinePower, LinkProfile};
use crate::error::{Error, Result};
use crate::quad::integrate;

pub const MAX_DEPTH: usize = 4;

/// Accuracy controls for the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    /// Absolute error target of the returned probability.
    pub abs_tol: f64,
    /// Upper bound on Chebyshev nodes per tabulated level (`2^k + 1`).
    pub max_nodes: usize,
    /// Bisection budget of each adaptive integral.
    pub max_segments: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { abs_tol: 1e-7, max_nodes: 1025, max_segments: 2000 }
    }
}

impl QuadratureGrid {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol.is_finite() && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_nodes < 17 {
            return Err(Error::InvalidParameter("max_nodes must be >= 17".into()));
        }
        Ok(())
    }
}

/// Law of a single round's SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundLaw {
    /// `γ_SD + min(γ_SR, γ_RD)`.
    Relay { up: f64, sd: f64, c: f64 },
    /// Direct link only, exponential with the given mean.
    Direct { mean: f64 },
}

impl RoundLaw {
    pub fn relay(profile: &LinkProfile) -> Result<Self> {
        let c = profile.constant_c()?;
        Ok(RoundLaw::Relay { up: profile.eff_up(), sd: profile.eff_sd(), c })
    }

    pub fn pdf(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        match *self {
            RoundLaw::Relay { up, sd, c } => (-c * (-g / up).exp() * (-g * (1.0 / sd - 1.0 / up)).exp_m1()).max(0.0),
            RoundLaw::Direct { mean } => (-g / mean).exp() / mean,
        }
    }

    pub fn cdf(&self, g: f64) -> f64 {
        if g <= 0.0 {
            return 0.0;
        }
        match *self {
            RoundLaw::Relay { up, sd, c } => {
                let v = if g <= up.max(sd) {
                    c * (sd * (-g / sd).exp_m1() - up * (-g / up).exp_m1())
                } else {
                    1.0 - c * (up * (-g / up).exp() - sd * (-g / sd).exp())
                };
                v.clamp(0.0, 1.0)
            }
            RoundLaw::Direct { mean } => -(-g / mean).exp_m1(),
        }
    }

    /// Characteristic length used to place quadrature breakpoints.
    fn scale(&self) -> f64 {
        match *self {
            RoundLaw::Relay { up, sd, .. } => up.max(sd),
            RoundLaw::Direct { mean } => mean,
        }
    }

    /// Point beyond which the remaining mass is below `tau`.
    fn upper_quantile(&self, tau: f64) -> f64 {
        let mut g = self.scale();
        while 1.0 - self.cdf(g) > tau {
            g *= 2.0;
        }
        g
    }
}

/// Barycentric interpolant on Chebyshev–Lobatto nodes over `[lo, hi]`.
#[derive(Debug, Clone)]
struct Cheb {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl Cheb {
    fn node(n: usize, j: usize, lo: f64, hi: f64) -> f64 {
        let t = (PI * j as f64 / (n - 1) as f64).cos();
        0.5 * (lo + hi) + 0.5 * (hi - lo) * t
    }

    /// Doubles the node count until new nodes are predicted to `tol`.
    fn build<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64, max_nodes: usize) -> Result<Self> {
        let mut n = 17;
        let mut nodes: Vec<f64> = (0..n).map(|j| Self::node(n, j, lo, hi)).collect();
        let mut values = nodes.iter().map(|&u| f(u)).collect::<Result<Vec<_>>>()?;
        loop {
            let current = Cheb { lo, hi, nodes: nodes.clone(), values: values.clone() };
            let n2 = 2 * n - 1;
            if n2 > max_nodes {
                return Err(Error::NonConvergence(format!("inner distribution not resolved with {n} Chebyshev nodes")));
            }
            let mut new_nodes = Vec::with_capacity(n2);
            let mut new_values = Vec::with_capacity(n2);
            let mut err: f64 = 0.0;
            for j in 0..n2 {
                if j % 2 == 0 {
                    new_nodes.push(nodes[j / 2]);
                    new_values.push(values[j / 2]);
                } else {
                    let u = Self::node(n2, j, lo, hi);
                    let v = f(u)?;
                    err = err.max((current.eval(u) - v).abs());
                    new_nodes.push(u);
                    new_values.push(v);
                }
            }
            nodes = new_nodes;
            values = new_values;
            n = n2;
            if err <= tol {
                return Ok(Cheb { lo, hi, nodes, values });
            }
        }
    }

    fn eval(&self, u: f64) -> f64 {
        let u = u.clamp(self.lo.min(self.hi), self.hi.max(self.lo));
        let n = self.nodes.len();
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            let d = u - self.nodes[j];
            if d == 0.0 {
                return self.values[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                w *= 0.5;
            }
            let t = w / d;
            num += t * self.values[j];
            den += t;
        }
        num / den
    }
}

fn check_depth(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("depth must be >= 1".into()));
    }
    if m > MAX_DEPTH {
        return Err(Error::DepthExceeded(m));
    }
    Ok(())
}

fn integral<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, grid: &QuadratureGrid) -> Result<f64> {
    let r = integrate(f, a, b, tol, 0.0, grid.max_segments);
    if !r.converged {
        return Err(Error::NonConvergence(format!("oracle quadrature on [{a}, {b}] stopped at error {:e}", r.abs_err)));
    }
    Ok(r.value)
}

/// `Pr[Π_{l≤m} (1 + γ_l) ≤ x]` for i.i.d. rounds drawn from `law`.
pub fn shifted_product_cdf(law: &RoundLaw, m: usize, x: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_depth(m)?;
    grid.validate()?;
    if x.is_nan() {
        return Err(Error::Domain("shifted_product_cdf at NaN".into()));
    }
    if x <= 1.0 {
        return Ok(0.0);
    }
    if m == 1 {
        return Ok(law.cdf(x - 1.0));
    }
    let tol = grid.abs_tol / 10.0;
    let tau = grid.abs_tol / 100.0;
    let t_hi = law.upper_quantile(tau);
    let ln_x = x.ln();
    // outer step: F_m(y) = ∫_0^{y-1} F_{m-1}(y/(1+t)) p(t) dt
    let step = |inner: &dyn Fn(f64) -> f64, y: f64| -> Result<f64> {
        if y <= 1.0 {
            return Ok(0.0);
        }
        let top = (y - 1.0).min(t_hi);
        let f = |t: f64| inner(y / (1.0 + t)) * law.pdf(t);
        let edges = geometric_edges(0.0, top, law.scale());
        let mut v = 0.0;
        for w in edges.windows(2) {
            v += integral(f, w[0], w[1], tol / edges.len() as f64, grid)?;
        }
        Ok(v.clamp(0.0, 1.0))
    };
    let base = |y: f64| law.cdf(y - 1.0);
    if m == 2 {
        return step(&base, x);
    }
    // tabulate F_2 .. F_{m-1} on u = ln y ∈ [0, ln x], stopping early once
    // the level has saturated at 1
    let tabulate = |level: &dyn Fn(f64) -> Result<f64>| -> Result<Cheb> {
        let mut hi = ln_x;
        let mut u = ln_x.min(std::f64::consts::LN_2);
        while u < ln_x {
            if 1.0 - level(u.exp())? <= tau {
                hi = u;
                break;
            }
            u *= 2.0;
        }
        Cheb::build(|u| level(u.exp()), 0.0, hi, tol, grid.max_nodes)
    };
    let saturating = |t: Cheb| {
        move |y: f64| {
            if y <= 1.0 {
                0.0
            } else if y.ln() >= t.hi {
                if t.hi < ln_x {
                    1.0
                } else {
                    t.eval(t.hi)
                }
            } else {
                t.eval(y.ln()).clamp(0.0, 1.0)
            }
        }
    };
    let mut table = tabulate(&|y| step(&base, y))?;
    for _ in 3..m {
        let inner = saturating(table);
        table = tabulate(&|y| step(&inner, y))?;
    }
    step(&saturating(table), x)
}

/// Breakpoints on `[a, b]` at geometrically growing multiples of `scale`,
/// so a rapidly decaying density is never hidden inside one wide panel.
fn geometric_edges(a: f64, b: f64, scale: f64) -> Vec<f64> {
    let mut edges = vec![a];
    let mut e = a + scale;
    while e < b {
        edges.push(e);
        e = a + 4.0 * (e - a);
    }
    if b > a {
        edges.push(b);
    }
    edges
}

/// Tabulated distribution of `Π γ_l` over `[ln y_lo, ln y_hi]`, saturating
/// to 0 and 1 outside.
struct Tail {
    table: Cheb,
}

impl Tail {
    fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let u = y.ln();
        if u <= self.table.lo {
            0.0
        } else if u >= self.table.hi {
            1.0
        } else {
            self.table.eval(u).clamp(0.0, 1.0)
        }
    }
}

/// `Pr[Π_{l≤m} γ_l ≤ x]` for i.i.d. rounds drawn from `law`.
pub fn product_cdf(law: &RoundLaw, m: usize, x: f64, grid: &QuadratureGrid) -> Result<f64> {
    check_depth(m)?;
    grid.validate()?;
    if x.is_nan() {
        return Err(Error::Domain("product_cdf at NaN".into()));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if m == 1 {
        return Ok(law.cdf(x));
    }
    let tol = grid.abs_tol / 10.0;
    let tau = grid.abs_tol / 100.0;
    let z_hi = law.upper_quantile(tau);
    // F_m(y) = ∫_0^∞ F_{m-1}(y/z) p(z) dz, with F_{m-1} = 1 above y_hi and 0
    // below y_lo, so only z ∈ [y/y_hi, y/y_lo] needs quadrature.
    let step = |inner: &dyn Fn(f64) -> f64, y_lo: f64, y_hi: f64, y: f64| -> Result<f64> {
        let a = y / y_hi;
        let b = (y / y_lo).min(z_hi);
        let mut v = law.cdf(a);
        if b > a {
            let f = |z: f64| inner(y / z) * law.pdf(z);
            let mut edges = vec![a];
            let mut e = a.max(law.scale() * 1e-3);
            while e < b {
                if e > a {
                    edges.push(e);
                }
                e *= 8.0;
            }
            edges.push(b);
            for w in edges.windows(2) {
                v += integral(f, w[0], w[1], tol / edges.len() as f64, grid)?;
            }
        }
        Ok(v.clamp(0.0, 1.0))
    };
    // level 1 in closed form, with its own saturation points
    let base_lo = bracket(|y| Ok(law.cdf(y)), tau, true)?;
    let base_hi = bracket(|y| Ok(law.cdf(y)), tau, false)?;
    let base = |y: f64| law.cdf(y);
    let eval_at = |level: &dyn Fn(f64) -> f64, lo: f64, hi: f64, y: f64| step(level, lo, hi, y);
    if m == 2 {
        return eval_at(&base, base_lo, base_hi, x);
    }
    let mut inner_lo = base_lo;
    let mut inner_hi = base_hi;
    let mut current: Box<dyn Fn(f64) -> f64> = Box::new(base);
    for _ in 2..m {
        let level = |y: f64| step(&*current, inner_lo, inner_hi, y);
        let lo = bracket(level, tau, true)?;
        let hi = bracket(level, tau, false)?;
        let table = Cheb::build(|u| level(u.exp()), lo.ln(), hi.ln(), tol, grid.max_nodes)?;
        let tail = Tail { table };
        current = Box::new(move |y| tail.eval(y));
        inner_lo = lo;
        inner_hi = hi;
    }
    eval_at(&*current, inner_lo, inner_hi, x)
}

/// Finds `y` with `F(y) ≤ tau` (`low`) or `1 - F(y) ≤ tau` by decades.
fn bracket<F: Fn(f64) -> Result<f64>>(f: F, tau: f64, low: bool) -> Result<f64> {
    let mut y: f64 = 1.0;
    for _ in 0..200 {
        let v = f(y)?;
        if low && v <= tau {
            return Ok(y);
        }
        if !low && 1.0 - v <= tau {
            return Ok(y);
        }
        y = if low { y / 10.0 } else { y * 10.0 };
    }
    Err(Error::NonConvergence("could not bracket the product distribution".into()))
}

/// Recursive-quadrature `F_ξm(x)` for the relay channel.
pub fn cdf_xi_recursive(profile: &LinkProfile, m: usize, x: f64, grid: &QuadratureGrid) -> Result<f64> {
    shifted_product_cdf(&RoundLaw::relay(profile)?, m, x, grid)
}

/// Recursive-quadrature `F_ζm(x)` for the relay channel.
pub fn cdf_zeta_recursive(profile: &LinkProfile, m: usize, x: f64, grid: &QuadratureGrid) -> Result<f64> {
    product_cdf(&RoundLaw::relay(profile)?, m, x, grid)
}

/// Outage after `m` rounds when only the direct link is used, one slot per
/// round and threshold `2^{R₁}`.
pub fn outage_no_relay(
    profile: &LinkProfile,
    m: usize,
    r1: f64,
    baseline: BaselinePower,
    grid: &QuadratureGrid,
) -> Result<f64> {
    if !(r1.is_finite() && r1 > 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be > 0, got {r1}")));
    }
    let law = RoundLaw::Direct { mean: baseline.direct_mean(profile) };
    shifted_product_cdf(&law, m, r1.exp2(), grid)
}
