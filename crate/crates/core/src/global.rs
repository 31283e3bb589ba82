//! Weideman's global method. With `y = tan(θ/2)` the rational functions
//! `φ_n(y) = (1 + iy)^n / (1 − iy)^{n+1} = e^{inθ}/(1 − iy)` are eigenfunctions
//! of the transform, `𝓗φ_n = −i sgn(n) φ_n` with `sgn(0) = 1`. The
//! coefficients of `f(y)(1 − iy) = Σ a_n e^{inθ}` come from one FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalOptions {
    /// Use `+i sgn(n)` as printed in the original formula instead of the
    /// `−i sgn(n)` that matches the kernel `1/(x − y)`.
    pub literal_sign: bool,
    /// Limit of `f(y)(1 − iy)` at `y = ∞`.
    pub value_at_infinity: Complex64,
}

impl Default for GlobalOptions {
    fn default() -> Self {
        Self { literal_sign: false, value_at_infinity: Complex64::new(0.0, 0.0) }
    }
}

/// Fourier data of `f(y)(1 − iy)` on `N_F` equispaced angles in `[−π, π)`.
#[derive(Debug, Clone)]
pub struct GlobalTransform {
    nf: usize,
    /// `a_n` for `n = −N_F/2, …, N_F/2 − 1`.
    coeffs: Vec<Complex64>,
    options: GlobalOptions,
}

pub fn theta_grid(nf: usize) -> Vec<f64> {
    (0..nf).map(|j| -PI + 2.0 * PI * j as f64 / nf as f64).collect()
}

/// `y_j = tan(θ_j/2)`; the first point is `y = ∞`.
pub fn y_grid(nf: usize) -> Vec<f64> {
    theta_grid(nf).into_iter().enumerate().map(|(j, t)| if j == 0 { f64::INFINITY } else { (0.5 * t).tan() }).collect()
}

fn check_size(nf: usize) -> Result<()> {
    if nf == 0 || nf % 2 == 1 {
        return Err(Error::OddFourierSize(nf));
    }
    Ok(())
}

fn index(n: i64, nf: usize) -> usize {
    (n + nf as i64 / 2) as usize
}

/// Coefficients of a real `f`.
pub fn weideman_coeffs(f: impl Fn(f64) -> f64, nf: usize) -> Result<GlobalTransform> {
    weideman_coeffs_with(|y| Complex64::new(f(y), 0.0), nf, GlobalOptions::default())
}

pub fn weideman_coeffs_with(
    f: impl Fn(f64) -> Complex64,
    nf: usize,
    options: GlobalOptions,
) -> Result<GlobalTransform> {
    check_size(nf)?;
    let mut data: Vec<Complex64> = y_grid(nf)
        .into_iter()
        .enumerate()
        .map(|(j, y)| if j == 0 { options.value_at_infinity } else { f(y) * Complex64::new(1.0, -y) })
        .collect();
    FftPlanner::new().plan_fft_forward(nf).process(&mut data);
    let half = nf as i64 / 2;
    let coeffs = (-half..half)
        .map(|n| {
            let k = n.rem_euclid(nf as i64) as usize;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            data[k] * sign / nf as f64
        })
        .collect();
    Ok(GlobalTransform { nf, coeffs, options })
}

impl GlobalTransform {
    pub fn size(&self) -> usize {
        self.nf
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        self.coeffs[index(n, self.nf)]
    }

    /// `(n, a_n)` for `n = −N_F/2, …, N_F/2 − 1`.
    pub fn coeffs(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let half = self.nf as i64 / 2;
        (-half..half).zip(self.coeffs.iter().copied())
    }

    fn symbol(&self, n: i64) -> Complex64 {
        let s = if n >= 0 { 1.0 } else { -1.0 };
        let sigma = if self.options.literal_sign { 1.0 } else { -1.0 };
        Complex64::new(0.0, sigma * s)
    }

    /// Complex value of the resummed transform at `x`.
    pub fn hilbert_complex(&self, x: f64) -> Complex64 {
        if x.is_infinite() {
            return Complex64::new(0.0, 0.0);
        }
        let theta = 2.0 * x.atan();
        let sum: Complex64 =
            self.coeffs().map(|(n, a)| self.symbol(n) * a * Complex64::from_polar(1.0, n as f64 * theta)).sum();
        sum / Complex64::new(1.0, -x)
    }

    pub fn hilbert(&self, x: f64) -> f64 {
        self.hilbert_complex(x).re
    }

    /// Transform at every grid point by an inverse FFT; entry 0 is `y = ∞`.
    pub fn hilbert_on_grid(&self) -> Vec<Complex64> {
        let nf = self.nf;
        let mut data = vec![Complex64::new(0.0, 0.0); nf];
        for (n, a) in self.coeffs() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            data[n.rem_euclid(nf as i64) as usize] = self.symbol(n) * a * sign;
        }
        FftPlanner::new().plan_fft_inverse(nf).process(&mut data);
        y_grid(nf)
            .into_iter()
            .zip(data)
            .map(|(y, v)| if y.is_infinite() { Complex64::new(0.0, 0.0) } else { v / Complex64::new(1.0, -y) })
            .collect()
    }
}

/// `𝓗f` at `xs` by the global method with `N_F` points.
pub fn weideman_hilbert(f: impl Fn(f64) -> f64, nf: usize, xs: &[f64]) -> Result<Vec<f64>> {
    let g = weideman_coeffs(f, nf)?;
    Ok(xs.iter().map(|&x| g.hilbert(x)).collect())
}
