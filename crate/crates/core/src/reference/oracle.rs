//! Brute-force principal-value quadrature, independent of the spectral code.
//!
//! Folding the integral about `x` gives
//! `𝓗f(x) = (1/π) ∫_0^∞ (f(x − u) − f(x + u))/u du`, whose integrand is
//! bounded at `u = 0`. The half-line is covered by `[0, 1]` and geometric
//! chunks `[2^k, 2^{k+1}]`, each integrated by adaptive Gauss–Kronrod.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptions {
    /// Absolute tolerance on `𝓗f(x)`.
    pub tol: f64,
    /// Points where `f` or a derivative jumps.
    pub breakpoints: Vec<f64>,
    /// Evaluation budget.
    pub max_evals: usize,
}

impl OracleOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, breakpoints: Vec::new(), max_evals: 20_000_000 }
    }

    pub fn with_breakpoints(mut self, b: &[f64]) -> Self {
        self.breakpoints = b.to_vec();
        self
    }
}

fn gauss_kronrod(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c);
    let mut k = WGK[7] * fc;
    let mut gs = WG[3] * fc;
    for j in 0..7 {
        let d = h * XGK[j];
        let pair = g(c - d) + g(c + d);
        k += WGK[j] * pair;
        if j % 2 == 1 {
            gs += WG[j / 2] * pair;
        }
    }
    (k * h, ((k - gs) * h).abs())
}

struct Adaptive<'a, G: Fn(f64) -> f64> {
    g: &'a G,
    evals: usize,
    max_evals: usize,
}

impl<G: Fn(f64) -> f64> Adaptive<'_, G> {
    /// Integrates over `[a, b]` until the summed error estimate is below `tol`.
    fn integrate(&mut self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let mut stack = vec![(a, b, tol)];
        let mut total = 0.0;
        let mut err_total = 0.0;
        while let Some((lo, hi, t)) = stack.pop() {
            if self.evals >= self.max_evals {
                return Err(Error::OracleNoConvergence { estimate: err_total, evaluations: self.evals });
            }
            let (v, e) = gauss_kronrod(self.g, lo, hi);
            self.evals += 15;
            let mid = 0.5 * (lo + hi);
            if e <= t || mid <= lo || mid >= hi || (hi - lo) < 1e-14 * (b - a) {
                total += v;
                err_total += e;
            } else {
                stack.push((lo, mid, 0.5 * t));
                stack.push((mid, hi, 0.5 * t));
            }
        }
        Ok(total)
    }
}

/// `(1/π) PV∫ f(y)/(x − y) dy` to absolute tolerance `tol`.
pub fn pv_oracle<F: Fn(f64) -> f64>(f: F, x: f64, tol: f64) -> Result<f64> {
    pv_oracle_with(f, x, &OracleOptions::new(tol))
}

pub fn pv_oracle_with<F: Fn(f64) -> f64>(f: F, x: f64, opts: &OracleOptions) -> Result<f64> {
    if !x.is_finite() {
        return Ok(0.0);
    }
    let g = |u: f64| (f(x - u) - f(x + u)) / u;
    let target = opts.tol * PI;
    let mut cuts: Vec<f64> = opts.breakpoints.iter().map(|b| (x - b).abs()).filter(|&u| u > 0.0).collect();
    let reach = cuts.iter().fold(x.abs(), |m, &u| m.max(u));
    let mut edges = vec![0.0, 1.0];
    let mut k = 0;
    while edges.last().copied().unwrap() < 4.0 * reach.max(1.0) || k < 8 {
        k += 1;
        edges.push(2f64.powi(k));
    }
    edges.append(&mut cuts);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();
    let mut quad = Adaptive { g: &g, evals: 0, max_evals: opts.max_evals };
    let mut total = 0.0;
    let pieces = edges.len() - 1;
    for w in edges.windows(2) {
        total += quad.integrate(w[0], w[1], 0.25 * target / pieces as f64)?;
    }
    // tail chunks beyond every feature of f
    let mut quiet = 0;
    let mut lo = *edges.last().unwrap();
    let mut j = 1.0f64;
    while quiet < 4 {
        let hi = 2.0 * lo;
        let v = quad.integrate(lo, hi, 0.25 * target / (j * j))?;
        total += v;
        quiet = if v.abs() < 1e-3 * target { quiet + 1 } else { 0 };
        lo = hi;
        j += 1.0;
        if !lo.is_finite() {
            return Err(Error::OracleNoConvergence { estimate: v.abs(), evaluations: quad.evals });
        }
    }
    Ok(total / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentz_value() {
        let v = pv_oracle(|y| 1.0 / (1.0 + y * y), 1.0, 1e-10).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn even_at_zero() {
        let v = pv_oracle(|y: f64| (-y * y).exp(), 0.0, 1e-10).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn gaussian_value() {
        let v = pv_oracle(|y: f64| (-y * y).exp(), 1.0, 1e-11).unwrap();
        let want = 2.0 / PI.sqrt() * crate::reference::dawson(1.0);
        assert!((v - want).abs() < 1e-9);
        assert!((v - 0.607_157).abs() < 1e-6);
    }

    #[test]
    fn jump_needs_breakpoints() {
        // indicator of [-1, 1]: (1/π) ln|(x + 1)/(x − 1)|
        let f = |y: f64| if y.abs() <= 1.0 { 1.0 } else { 0.0 };
        let x = 0.3;
        let want = ((x + 1.0) / (x - 1.0f64)).abs().ln() / PI;
        let v = pv_oracle_with(f, x, &OracleOptions::new(1e-11).with_breakpoints(&[-1.0, 1.0])).unwrap();
        assert!((v - want).abs() < 1e-10);
    }

    #[test]
    fn budget_is_reported() {
        let mut opts = OracleOptions::new(1e-14);
        opts.max_evals = 100;
        let r = pv_oracle_with(|y: f64| (y * 50.0).sin() / (1.0 + y * y), 0.7, &opts);
        assert!(matches!(r, Err(Error::OracleNoConvergence { .. })));
    }
}
