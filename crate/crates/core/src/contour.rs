//! `𝓗[sin(y) r(y)]` for rational `r` by contour deformation.
//!
//! Write `sin y = (e^{iy} − e^{−iy})/2i`. The `e^{iy}` half is integrated on
//! the V-shaped contour `iβ + e^{iα}t`, `iβ − e^{−iα}t` (`t ≥ 0`) above the
//! real axis, the `e^{−iy}` half on its mirror image, where both decay
//! exponentially. Lifting the contour over the pole at `y = x` costs
//! `∓iπ e^{±ix} r(x)`; together the two residue terms give `−cos(x) r(x)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::ChebGrid;

/// Rational factor of the oscillatory integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rational {
    /// `1/(1 + y²)`
    Quadratic,
    /// `1/(1 + y⁴)`
    Quartic,
}

impl Rational {
    pub fn eval(self, y: Complex64) -> Complex64 {
        match self {
            Rational::Quadratic => 1.0 / (1.0 + y * y),
            Rational::Quartic => 1.0 / (1.0 + y.powi(4)),
        }
    }

    pub fn poles(self) -> Vec<Complex64> {
        match self {
            Rational::Quadratic => vec![Complex64::i(), -Complex64::i()],
            Rational::Quartic => (0..4).map(|k| Complex64::from_polar(1.0, (2 * k + 1) as f64 * PI / 4.0)).collect(),
        }
    }
}

/// Contour parameters: rotation `α`, offset `β`, truncation `T` and degree
/// per Chebyshev segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformedContour {
    pub alpha: f64,
    pub beta: f64,
    pub t_max: f64,
    pub n: usize,
}

impl DeformedContour {
    pub fn new(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 0.5 * PI && beta > 0.0) {
            return Err(Error::InvalidConfig(format!("contour needs 0 < α < π/2 and β > 0, got {alpha}, {beta}")));
        }
        // |e^{iy}| = e^{−β − t sin α} < 1e−16 at the end of each ray
        let t_max = (16.0 * 10f64.ln() / alpha.sin()).max(1.0);
        Ok(Self { alpha, beta, t_max, n })
    }

    /// The rotation and offset used for each rational factor.
    pub fn standard(r: Rational, n: usize) -> Self {
        match r {
            Rational::Quadratic => Self::new(PI / 4.0, 0.5, n),
            Rational::Quartic => Self::new(PI / 8.0, 0.2, n),
        }
        .expect("valid parameters")
    }

    /// Smallest distance between the real axis and the contour.
    pub fn clearance(&self) -> f64 {
        self.beta * self.alpha.cos()
    }
}

/// Longest segment, a fraction of the oscillation period `2π/cos α`.
const MAX_SEGMENT: f64 = 2.0;

/// Adds cuts graded geometrically around the point of the ray closest to `p`
/// and returns the distance between the two.
fn grade(cuts: &mut Vec<f64>, vertex: Complex64, dir: Complex64, t_max: f64, p: Complex64) -> f64 {
    let t0 = ((p - vertex) * dir.conj()).re.clamp(0.0, t_max);
    let dist = (vertex + dir * t0 - p).norm();
    cuts.push(t0);
    let mut step = dist.min(MAX_SEGMENT);
    while t0 - step > 0.0 || t0 + step < t_max {
        cuts.push(t0 - step);
        cuts.push(t0 + step);
        step = (2.0 * step).min(step + MAX_SEGMENT);
    }
    dist
}

/// `∫_0^T F(v + d t) d dt`, segmented around `x` and the poles of `r`.
fn ray(
    grid: &ChebGrid,
    f: &impl Fn(Complex64) -> Complex64,
    r: Rational,
    vertex: Complex64,
    dir: Complex64,
    t_max: f64,
    x: f64,
) -> Result<Complex64> {
    let mut cuts = vec![0.0, t_max];
    let dist = grade(&mut cuts, vertex, dir, t_max, Complex64::new(x, 0.0));
    if dist < 1e-3 {
        return Err(Error::ContourTooClose { distance: dist });
    }
    for p in r.poles() {
        grade(&mut cuts, vertex, dir, t_max, p);
    }
    cuts.retain(|t| (0.0..=t_max).contains(t));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut total = Complex64::new(0.0, 0.0);
    for w in cuts.windows(2) {
        let hw = 0.5 * (w[1] - w[0]);
        for (&l, &wt) in grid.nodes().iter().zip(grid.cc_weights()) {
            let t = w[0] + hw * (1.0 + l);
            total += f(vertex + dir * t) * dir * (wt * hw);
        }
    }
    Ok(total)
}

/// Complex value of the assembled transform; the imaginary part is a
/// consistency check and vanishes for real input.
pub fn hilbert_oscillatory_complex(r: Rational, x: f64, contour: &DeformedContour) -> Result<Complex64> {
    if x.is_infinite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if contour.clearance() < 1e-3 {
        return Err(Error::ContourTooClose { distance: contour.clearance() });
    }
    let grid = ChebGrid::new(contour.n)?;
    let i = Complex64::i();
    let (a, b, t) = (contour.alpha, contour.beta, contour.t_max);
    let up = |y: Complex64| (i * y).exp() * r.eval(y) / (x - y);
    let down = |y: Complex64| (-i * y).exp() * r.eval(y) / (x - y);
    let e = Complex64::from_polar(1.0, a);
    // rays run outward from the vertex; the contour runs left to right
    let c_up = ray(&grid, &up, r, i * b, e, t, x)? - ray(&grid, &up, r, i * b, -e.conj(), t, x)?;
    // lower contour, mirror image
    let c_down = ray(&grid, &down, r, -i * b, e.conj(), t, x)? - ray(&grid, &down, r, -i * b, -e, t, x)?;
    let rx = r.eval(Complex64::new(x, 0.0));
    let i_plus = c_up - i * PI * (i * x).exp() * rx;
    let i_minus = c_down + i * PI * (-i * x).exp() * rx;
    Ok((i_plus - i_minus) / (2.0 * i) / PI)
}

/// `𝓗[sin(y) r(y)](x)`.
pub fn hilbert_oscillatory(r: Rational, x: f64, contour: &DeformedContour) -> Result<f64> {
    Ok(hilbert_oscillatory_complex(r, x, contour)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::example;

    #[test]
    fn quadratic_at_zero() {
        let c = DeformedContour::standard(Rational::Quadratic, 40);
        let v = hilbert_oscillatory(Rational::Quadratic, 0.0, &c).unwrap();
        assert!((v + 1.0 - (-1.0f64).exp()).abs() < 1e-13);
        assert_eq!(hilbert_oscillatory(Rational::Quadratic, f64::INFINITY, &c).unwrap(), 0.0);
    }

    #[test]
    fn quartic_at_zero() {
        let c = DeformedContour::standard(Rational::Quartic, 40);
        let v = hilbert_oscillatory(Rational::Quartic, 0.0, &c).unwrap();
        assert!((v + 0.625_147_191_379_617_7).abs() < 1e-13);
    }

    #[test]
    fn matches_exact_and_is_real() {
        for (r, id) in [(Rational::Quadratic, "osc_quadratic"), (Rational::Quartic, "osc_quartic")] {
            let spec = example(id).unwrap();
            let c = DeformedContour::standard(r, 24);
            for k in 0..30 {
                let x = -30.0 + 2.07 * k as f64;
                let v = hilbert_oscillatory_complex(r, x, &c).unwrap();
                assert!((v.re - spec.exact(x)).abs() < 1e-12, "{id} x = {x}");
                assert!(v.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_convergence() {
        let spec = example("osc_quartic").unwrap();
        let errs: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| {
                let c = DeformedContour::standard(Rational::Quartic, n);
                (hilbert_oscillatory(Rational::Quartic, 1.3, &c).unwrap() - spec.exact(1.3)).abs()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[3] < 1e-12);
    }

    #[test]
    fn deformation_independence() {
        for r in [Rational::Quadratic, Rational::Quartic] {
            let c = DeformedContour::standard(r, 24);
            let base = hilbert_oscillatory(r, 0.8, &c).unwrap();
            for f in [0.8, 1.2] {
                let moved = DeformedContour::new(c.alpha, c.beta * f, 24).unwrap();
                assert!((hilbert_oscillatory(r, 0.8, &moved).unwrap() - base).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn residue_term_against_quadrature() {
        for (r, x) in [(Rational::Quadratic, 0.4), (Rational::Quartic, -2.6)] {
            let f = |y: f64| y.sin() * r.eval(Complex64::new(y, 0.0)).re;
            let want = crate::reference::pv_oracle(f, x, 1e-11).unwrap();
            let c = DeformedContour::standard(r, 24);
            assert!((hilbert_oscillatory(r, x, &c).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_parameters() {
        assert!(DeformedContour::new(0.0, 0.5, 10).is_err());
        assert!(DeformedContour::new(0.3, -0.5, 10).is_err());
        let c = DeformedContour::new(0.3, 1e-4, 10).unwrap();
        assert!(matches!(hilbert_oscillatory(Rational::Quadratic, 0.0, &c), Err(Error::ContourTooClose { .. })));
    }
}
