//! Registered test functions with their exact transforms.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::{Domain, Evaluator, Partition, PiecewiseAnalyticFn, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::reference::special::{dawson, digamma, expint_y};

pub const EXAMPLE_IDS: [&str; 10] = [
    "lorentz_a1",
    "lorentz_a2",
    "quartic",
    "piecewise_cont",
    "piecewise_disc",
    "gauss",
    "sech",
    "abs_exp",
    "osc_quadratic",
    "osc_quartic",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `1/(a² + y²)`
    Lorentz {
        a: f64,
    },
    /// `1/(1 + y⁴)`
    Quartic,
    /// `1/(a₁² + y²)` on `|y| < 1`, `α/(a₂² + y²)` outside
    Piecewise {
        a1: f64,
        a2: f64,
        alpha: f64,
    },
    Gauss,
    Sech,
    AbsExp,
    /// `sin(y)/(1 + y²)`
    OscQuadratic,
    /// `sin(y)/(1 + y⁴)`
    OscQuartic,
}

/// A registered example with its recommended discretisation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSpec {
    pub id: &'static str,
    pub family: Family,
    pub breakpoints: Vec<f64>,
    pub wrap: bool,
    /// Degree per finite domain.
    pub n: usize,
    /// Degree of the infinite domain(s); `None` means the same as `n`.
    pub n_infinite: Option<usize>,
    /// Default Fourier size for the global method.
    pub nf: usize,
    /// Continuation limit for the finite pieces.
    pub continuation_limit: Option<f64>,
    /// Jump locations of `f`.
    pub jumps: Vec<f64>,
    /// Jumps and kinks, passed to the quadrature oracle.
    pub features: Vec<f64>,
}

pub fn example(id: &str) -> Result<ExampleSpec> {
    let base = |family, breakpoints: &[f64], n, nf| ExampleSpec {
        id: EXAMPLE_IDS.iter().find(|&&k| k == id).copied().unwrap_or(""),
        family,
        breakpoints: breakpoints.to_vec(),
        wrap: true,
        n,
        n_infinite: None,
        nf,
        continuation_limit: None,
        jumps: Vec::new(),
        features: Vec::new(),
    };
    let unit = [-1.0, 1.0];
    Ok(match id {
        "lorentz_a1" => base(Family::Lorentz { a: 1.0 }, &unit, 50, 64),
        "lorentz_a2" => base(Family::Lorentz { a: 2.0 }, &unit, 80, 100),
        "quartic" => base(Family::Quartic, &unit, 50, 100),
        "piecewise_cont" => ExampleSpec {
            features: unit.to_vec(),
            ..base(Family::Piecewise { a1: 1.0, a2: 2.0, alpha: 2.5 }, &unit, 120, 1000)
        },
        "piecewise_disc" => ExampleSpec {
            features: unit.to_vec(),
            jumps: unit.to_vec(),
            ..base(Family::Piecewise { a1: 1.0, a2: 2.0, alpha: 1.0 }, &unit, 120, 1000)
        },
        "gauss" => base(Family::Gauss, &[-6.0, 6.0], 100, 200),
        "sech" => ExampleSpec { n_infinite: Some(16), ..base(Family::Sech, &[-40.0, 40.0], 1000, 700) },
        "abs_exp" => ExampleSpec {
            wrap: false,
            n_infinite: Some(16),
            continuation_limit: Some(1.0),
            features: vec![0.0],
            ..base(Family::AbsExp, &[-40.0, 0.0, 40.0], 80, 1000)
        },
        "osc_quadratic" => base(Family::OscQuadratic, &unit, 50, 1000),
        "osc_quartic" => base(Family::OscQuartic, &unit, 50, 1000),
        other => return Err(Error::UnknownExample(other.to_string())),
    })
}

pub fn all_examples() -> Vec<ExampleSpec> {
    EXAMPLE_IDS.iter().map(|id| example(id).expect("registered")).collect()
}

fn piecewise_transform(a1: f64, a2: f64, alpha: f64, x: f64) -> f64 {
    let inner = 2.0 / a1 * (1.0 / a1).atan() * x / (a1 * a1 + x * x);
    let outer = 2.0 * alpha / a2 * a2.atan() * x / (a2 * a2 + x * x);
    let c = 1.0 / (a1 * a1 + x * x) - alpha / (a2 * a2 + x * x);
    let log = if c == 0.0 { 0.0 } else { c * ((1.0 + x) / (1.0 - x)).abs().ln() };
    (inner + outer + log) / PI
}

impl ExampleSpec {
    /// Whether the multi-domain method applies (the oscillatory examples
    /// are not analytic at infinity).
    pub fn md_supported(&self) -> bool {
        !matches!(self.family, Family::OscQuadratic | Family::OscQuartic)
    }

    pub fn contour_supported(&self) -> bool {
        !self.md_supported()
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    /// `f(y)`, with the limit value 0 at `±∞`.
    pub fn f(&self, y: f64) -> f64 {
        if y.is_infinite() {
            return 0.0;
        }
        match self.family {
            Family::Lorentz { a } => 1.0 / (a * a + y * y),
            Family::Quartic => 1.0 / (1.0 + y.powi(4)),
            Family::Piecewise { a1, a2, alpha } => {
                if y.abs() < 1.0 || (y.abs() == 1.0 && self.is_continuous()) {
                    1.0 / (a1 * a1 + y * y)
                } else {
                    alpha / (a2 * a2 + y * y)
                }
            }
            Family::Gauss => (-y * y).exp(),
            Family::Sech => 1.0 / y.cosh(),
            Family::AbsExp => (-y.abs()).exp(),
            Family::OscQuadratic => y.sin() / (1.0 + y * y),
            Family::OscQuartic => y.sin() / (1.0 + y.powi(4)),
        }
    }

    /// Exact `𝓗f(x)`; infinite at a jump of `f`.
    pub fn exact(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        match self.family {
            Family::Lorentz { a } => x / (a * (a * a + x * x)),
            Family::Quartic => x * (1.0 + x * x) / (SQRT_2 * (1.0 + x.powi(4))),
            Family::Piecewise { a1, a2, alpha } => piecewise_transform(a1, a2, alpha, x),
            Family::Gauss => 2.0 / PI.sqrt() * dawson(x),
            Family::Sech => {
                let psi = digamma(Complex64::new(0.25, x / (2.0 * PI))).expect("off the real axis");
                -x.tanh() + 2.0 / PI * psi.im
            }
            Family::AbsExp => {
                if x == 0.0 {
                    return 0.0;
                }
                let u = x.abs();
                let y = expint_y(u).expect("u > 0") - expint_y(-u).expect("u > 0");
                y.copysign(x) / PI
            }
            Family::OscQuadratic => -(x.cos() - (-1.0f64).exp()) / (1.0 + x * x),
            Family::OscQuartic => {
                let r = FRAC_1_SQRT_2;
                -(x.cos() - (-r).exp() * (r.cos() + r.sin() * x * x)) / (1.0 + x.powi(4))
            }
        }
    }

    pub fn degrees(&self, n: usize) -> Vec<usize> {
        let nf = self.breakpoints.len() - 1;
        let ni = self.n_infinite.unwrap_or(n);
        let mut d = vec![n; nf];
        d.extend(std::iter::repeat_n(ni, if self.wrap { 1 } else { 2 }));
        d
    }

    /// Recommended partition with degree `n` on the finite domains.
    pub fn partition(&self, n: usize) -> Result<Partition> {
        Partition::new(&self.breakpoints, self.wrap, &self.degrees(n), DEFAULT_MARGIN)
    }

    fn piece(&self, d: &Domain) -> Evaluator {
        let spec = self.clone();
        let mid = 0.5 * (d.lo + d.hi);
        match (self.family, d.is_infinite()) {
            (Family::Piecewise { a1, .. }, false) if mid.abs() < 1.0 => Arc::new(move |y| 1.0 / (a1 * a1 + y * y)),
            (Family::Piecewise { a2, alpha, .. }, false) => Arc::new(move |y| alpha / (a2 * a2 + y * y)),
            (Family::Piecewise { a2, alpha, .. }, true) => Arc::new(move |s| alpha * s * s / (a2 * a2 * s * s + 1.0)),
            (Family::AbsExp, false) if mid < 0.0 => Arc::new(|y: f64| y.exp()),
            (Family::AbsExp, false) => Arc::new(|y: f64| (-y).exp()),
            (Family::AbsExp, true) => Arc::new(|s: f64| if s == 0.0 { 0.0 } else { (-1.0 / s.abs()).exp() }),
            (_, false) => Arc::new(move |y| spec.f(y)),
            (_, true) => Arc::new(move |s: f64| if s == 0.0 { 0.0 } else { spec.f(1.0 / s) }),
        }
    }

    /// Analytic pieces on `partition`, with jump flags and continuation limits.
    pub fn pwf(&self, partition: &Partition) -> PiecewiseAnalyticFn {
        let pieces = partition.domains().iter().map(|d| self.piece(d)).collect();
        let mut f = PiecewiseAnalyticFn::new(pieces);
        for &j in &self.jumps {
            f = f.with_jump(j);
        }
        if let Some(l) = self.continuation_limit {
            for (k, d) in partition.domains().iter().enumerate() {
                if !d.is_infinite() {
                    f = f.with_continuation_limit(k, l);
                }
            }
        }
        f
    }
}

/// Exact transform of a registered example.
pub fn exact_hilbert(id: &str, x: f64) -> Result<f64> {
    Ok(example(id)?.exact(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::oracle::{pv_oracle_with, OracleOptions};

    #[test]
    fn spot_values() {
        assert!((exact_hilbert("lorentz_a1", 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((exact_hilbert("lorentz_a2", 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((exact_hilbert("quartic", 1.0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(exact_hilbert("gauss", 0.0).unwrap(), 0.0);
        assert!((exact_hilbert("osc_quadratic", 0.0).unwrap() + 1.0 - (-1.0f64).exp()).abs() < 1e-15);
        assert!((exact_hilbert("osc_quartic", 0.0).unwrap() + 0.625_147_191_379_617_7).abs() < 1e-15);
        assert!(matches!(exact_hilbert("nope", 0.0), Err(Error::UnknownExample(_))));
        for x in [0.3, 2.0, 17.0] {
            let a = exact_hilbert("abs_exp", x).unwrap();
            assert!((a + exact_hilbert("abs_exp", -x).unwrap()).abs() < 1e-15);
        }
        assert!(exact_hilbert("piecewise_disc", 1.0).unwrap().is_infinite());
        assert!(exact_hilbert("piecewise_cont", 1.0).unwrap().is_finite());
    }

    #[test]
    fn continuity_flags() {
        let c = example("piecewise_cont").unwrap();
        assert!((c.f(1.0 - 1e-15) - c.f(1.0 + 1e-15)).abs() < 1e-14);
        let d = example("piecewise_disc").unwrap();
        assert!((d.f(0.999_999) - d.f(1.000_001)).abs() > 0.2);
    }

    #[test]
    fn every_exact_transform_matches_the_oracle() {
        let xs = [-7.3, -2.2, -0.9, -0.35, 0.05, 0.6, 1.3, 3.7, 11.0, 29.0];
        for spec in all_examples() {
            let opts = OracleOptions::new(1e-11).with_breakpoints(&spec.features);
            for &x in &xs {
                let want = pv_oracle_with(|y| spec.f(y), x, &opts).unwrap();
                let got = spec.exact(x);
                assert!((got - want).abs() < 1e-8, "{} at {x}: {got} vs {want}", spec.id);
            }
        }
    }
}
