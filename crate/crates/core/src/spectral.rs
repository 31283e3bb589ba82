//! Chebyshev–Lobatto primitives on the reference interval `[-1, 1]`.
//!
//! Nodes are stored in descending order, `l_0 = 1, ..., l_N = -1`, and every
//! vector or matrix in the crate that is indexed by nodes uses that order.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Chebyshev–Lobatto nodes `cos(m π / N)`, `m = 0..=N`.
pub fn cheb_nodes(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DegenerateGrid);
    }
    // sin form keeps the grid exactly antisymmetric with exact endpoints.
    let nf = n as f64;
    Ok((0..=n).map(|m| (PI * (nf - 2.0 * m as f64) / (2.0 * nf)).sin()).collect())
}

/// Even-extension DCT-I: `y_k = x_0 + (-1)^k x_N + 2 Σ_{n=1}^{N-1} x_n cos(π n k / N)`.
fn dct1_raw(x: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let len = 2 * n;
    let mut buf: Vec<Complex<f64>> =
        (0..len).map(|j| Complex::new(if j <= n { x[j] } else { x[len - j] }, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    buf.iter().take(n + 1).map(|c| c.re).collect()
}

/// Clenshaw–Curtis weights for the nodes returned by [`cheb_nodes`].
///
/// Built from the Chebyshev moments `∫ T_k = 2 / (1 - k²)` (even `k`) through
/// one cosine transform.
pub fn cc_weights(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DegenerateGrid);
    }
    let moments: Vec<f64> = (0..=n).map(|k| if k % 2 == 0 { 2.0 / (1.0 - (k * k) as f64) } else { 0.0 }).collect();
    let raw = dct1_raw(&moments);
    let nf = n as f64;
    let mut w: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(m, &r)| {
            let edge = if m == 0 || m == n { 0.5 } else { 1.0 };
            edge * r / nf
        })
        .collect();
    // enforce the exact mirror symmetry w_m = w_{N-m}
    for m in 0..=n / 2 {
        let avg = 0.5 * (w[m] + w[n - m]);
        w[m] = avg;
        w[n - m] = avg;
    }
    Ok(w)
}

/// Barycentric weights of the Chebyshev–Lobatto grid, `(-1)^j δ_j` with
/// `δ_0 = δ_N = 1/2`.
pub fn bary_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

/// Chebyshev differentiation matrix on the descending Lobatto grid.
///
/// Off-diagonal entries use the barycentric form; the diagonal is the negative
/// row sum so that constants are annihilated to rounding.
pub fn diff_matrix(n: usize) -> Result<DMatrix<f64>> {
    let x = cheb_nodes(n)?;
    let lam = bary_weights(n);
    let size = n + 1;
    let mut d = DMatrix::zeros(size, size);
    for i in 0..size {
        let mut row_sum = 0.0;
        for j in 0..size {
            if i != j {
                let v = (lam[j] / lam[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                row_sum += v;
            }
        }
        d[(i, i)] = -row_sum;
    }
    Ok(d)
}

/// Coefficients of `Σ c_n T_n(x)` interpolating samples on the Lobatto grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs {
    pub coeffs: Vec<f64>,
}

impl SpectralCoeffs {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw evaluation of the series at any real `x`.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    /// Values of the series at the Chebyshev–Lobatto nodes of the same degree.
    pub fn eval_at_nodes(&self) -> Vec<f64> {
        let n = self.degree();
        if n == 0 {
            return vec![self.coeffs[0]];
        }
        let mut y = self.coeffs.clone();
        y[0] *= 2.0;
        y[n] *= 2.0;
        dct1_raw(&y).into_iter().map(|v| 0.5 * v).collect()
    }
}

/// Chebyshev coefficients of the interpolant through `samples`, taken on
/// `cheb_nodes(samples.len() - 1)`, via one fast cosine transform.
pub fn cheb_coeffs(samples: &[f64]) -> Result<SpectralCoeffs> {
    if samples.len() < 2 {
        return Err(Error::DegenerateGrid);
    }
    let n = samples.len() - 1;
    let raw = dct1_raw(samples);
    let nf = n as f64;
    let coeffs = raw
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let edge = if k == 0 || k == n { 0.5 } else { 1.0 };
            edge * r / nf
        })
        .collect();
    Ok(SpectralCoeffs { coeffs })
}

/// Like [`cheb_coeffs`], with an explicit check against a grid's size.
pub fn cheb_coeffs_on(grid: &ChebGrid, samples: &[f64]) -> Result<SpectralCoeffs> {
    grid.check_len(samples.len())?;
    cheb_coeffs(samples)
}

/// Value of the degree-N interpolant at `x ∈ [-1, 1]`.
pub fn bary_eval(samples: &[f64], x: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::DegenerateGrid);
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(x));
    }
    let n = samples.len() - 1;
    Ok(bary_extrapolate(&cheb_nodes(n)?, &bary_weights(n), samples, x))
}

/// Second barycentric formula without the range check; outside `[-1, 1]`
/// this is the polynomial continuation of the interpolant.
pub(crate) fn bary_extrapolate(nodes: &[f64], lam: &[f64], samples: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in nodes.iter().zip(lam).zip(samples) {
        let d = x - xj;
        if d == 0.0 {
            return fj;
        }
        let t = wj / d;
        num += t * fj;
        den += t;
    }
    num / den
}

/// Row `r` with `Σ r_j f_j = p(x)` for the interpolant `p`.
pub(crate) fn bary_row(nodes: &[f64], lam: &[f64], x: f64) -> Vec<f64> {
    let mut row = vec![0.0; nodes.len()];
    if let Some(k) = nodes.iter().position(|&xj| xj == x) {
        row[k] = 1.0;
        return row;
    }
    let mut den = 0.0;
    for (j, (&xj, &wj)) in nodes.iter().zip(lam).enumerate() {
        let t = wj / (x - xj);
        row[j] = t;
        den += t;
    }
    row.iter_mut().for_each(|r| *r /= den);
    row
}

/// Divided difference `(p(x) - f_m) / (x - l_m)` of the interpolant, in
/// reference units, evaluated without cancellation for `x` near `l_m`.
/// At `x = l_m` this is `(D f)_m`.
#[cfg(test)]
pub(crate) fn divided_difference(nodes: &[f64], lam: &[f64], samples: &[f64], m: usize, x: f64) -> f64 {
    let fm = samples[m];
    let dx = x - nodes[m];
    let mut num = 0.0;
    let mut tail = 0.0;
    for (j, ((&xj, &wj), &fj)) in nodes.iter().zip(lam).zip(samples).enumerate() {
        if j == m {
            continue;
        }
        let t = wj / (x - xj);
        num += t * (fj - fm);
        tail += t;
    }
    num / (lam[m] + dx * tail)
}

/// Degree-N Chebyshev–Lobatto grid with its quadrature weights; the
/// differentiation matrix is built on first use.
#[derive(Debug)]
pub struct ChebGrid {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lam: Vec<f64>,
    diff: OnceLock<DMatrix<f64>>,
}

impl Clone for ChebGrid {
    fn clone(&self) -> Self {
        let diff = OnceLock::new();
        if let Some(d) = self.diff.get() {
            let _ = diff.set(d.clone());
        }
        Self {
            degree: self.degree,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            lam: self.lam.clone(),
            diff,
        }
    }
}

impl PartialEq for ChebGrid {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
    }
}

impl ChebGrid {
    pub fn new(degree: usize) -> Result<Self> {
        Ok(Self {
            degree,
            nodes: cheb_nodes(degree)?,
            weights: cc_weights(degree)?,
            lam: bary_weights(degree),
            diff: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cc_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bary_weights(&self) -> &[f64] {
        &self.lam
    }

    pub fn diff_matrix(&self) -> &DMatrix<f64> {
        self.diff.get_or_init(|| diff_matrix(self.degree).expect("degree checked at construction"))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: len });
        }
        Ok(())
    }

    /// Clenshaw–Curtis approximation of `∫_{-1}^{1} g` from node samples.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        self.check_len(samples.len())?;
        Ok(self.weights.iter().zip(samples).map(|(w, f)| w * f).sum())
    }

    pub fn interpolate(&self, samples: &[f64], x: f64) -> Result<f64> {
        self.check_len(samples.len())?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(x));
        }
        Ok(bary_extrapolate(&self.nodes, &self.lam, samples, x))
    }

    /// Polynomial continuation of the interpolant, valid for any real `x`.
    pub fn extrapolate(&self, samples: &[f64], x: f64) -> f64 {
        bary_extrapolate(&self.nodes, &self.lam, samples, x)
    }

    /// `D · samples`.
    pub fn differentiate(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.check_len(samples.len())?;
        let d = self.diff_matrix();
        Ok((0..self.len()).map(|i| (0..self.len()).map(|j| d[(i, j)] * samples[j]).sum()).collect())
    }

    pub(crate) fn bary_row(&self, x: f64) -> Vec<f64> {
        bary_row(&self.nodes, &self.lam, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn nodes_small_degrees() {
        assert_eq!(cheb_nodes(1).unwrap(), vec![1.0, -1.0]);
        let n2 = cheb_nodes(2).unwrap();
        assert_eq!(n2[0], 1.0);
        assert_eq!(n2[1], 0.0);
        assert_eq!(n2[2], -1.0);
        let n4 = cheb_nodes(4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in n4.iter().zip([1.0, r, 0.0, -r, -1.0]) {
            assert!(close(*a, b, 3e-16));
        }
        assert_eq!(cheb_nodes(0), Err(Error::DegenerateGrid));
    }

    #[test]
    fn nodes_match_cosine_and_decrease() {
        let n = 37;
        let x = cheb_nodes(n).unwrap();
        for m in 0..=n {
            assert!(close(x[m], (m as f64 * PI / n as f64).cos(), 5e-16));
        }
        assert!(x.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn weights_low_order() {
        let w1 = cc_weights(1).unwrap();
        assert!(close(w1[0], 1.0, 1e-15) && close(w1[1], 1.0, 1e-15));
        let w2 = cc_weights(2).unwrap();
        for (a, b) in w2.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert!(close(*a, b, 1e-15));
        }
        assert_eq!(cc_weights(0), Err(Error::DegenerateGrid));
    }

    #[test]
    fn weights_sum_to_two_and_symmetric() {
        for n in [1, 2, 3, 8, 17, 50, 101, 300, 1000] {
            let w = cc_weights(n).unwrap();
            let s: f64 = w.iter().sum();
            assert!(close(s, 2.0, 1e-14), "n={n} sum={s}");
            for m in 0..=n {
                assert_eq!(w[m], w[n - m]);
            }
        }
    }

    #[test]
    fn weights_match_exactness_solve() {
        // Independent route: solve the moment system V^T w = μ for N = 6.
        let n = 6;
        let x = cheb_nodes(n).unwrap();
        let v = DMatrix::from_fn(n + 1, n + 1, |k, m| x[m].powi(k as i32));
        let mu = nalgebra::DVector::from_fn(n + 1, |k, _| if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 });
        let w_ref = v.lu().solve(&mu).unwrap();
        let w = cc_weights(n).unwrap();
        for m in 0..=n {
            assert!(close(w[m], w_ref[m], 1e-13));
        }
    }

    #[test]
    fn diff_matrix_degree_one() {
        let d = diff_matrix(1).unwrap();
        assert!(close(d[(0, 0)], 0.5, 1e-15));
        assert!(close(d[(0, 1)], -0.5, 1e-15));
        assert!(close(d[(1, 0)], 0.5, 1e-15));
        assert!(close(d[(1, 1)], -0.5, 1e-15));
    }

    #[test]
    fn diff_matrix_monomials() {
        for n in [2, 5, 16, 40] {
            let g = ChebGrid::new(n).unwrap();
            let ones = vec![1.0; n + 1];
            let d1 = g.differentiate(&ones).unwrap();
            assert!(d1.iter().all(|v| v.abs() <= 1e-12));
            let dx = g.differentiate(g.nodes()).unwrap();
            assert!(dx.iter().all(|v| close(*v, 1.0, 1e-12)));
            let sq: Vec<f64> = g.nodes().iter().map(|x| x * x).collect();
            let dsq = g.differentiate(&sq).unwrap();
            for (a, x) in dsq.iter().zip(g.nodes()) {
                assert!(close(*a, 2.0 * x, 1e-12));
            }
        }
    }

    #[test]
    fn coeffs_basis_reproduction() {
        let x8 = cheb_nodes(8).unwrap();
        let t3: Vec<f64> = x8.iter().map(|x| 4.0 * x * x * x - 3.0 * x).collect();
        let c = cheb_coeffs(&t3).unwrap();
        for (k, v) in c.coeffs.iter().enumerate() {
            assert!(close(*v, if k == 3 { 1.0 } else { 0.0 }, 1e-15));
        }
        let c1 = cheb_coeffs(&[1.0; 9]).unwrap();
        assert!(close(c1.coeffs[0], 1.0, 1e-15));
        assert!(c1.coeffs[1..].iter().all(|v| v.abs() <= 1e-15));
        let x4 = cheb_nodes(4).unwrap();
        let cx = cheb_coeffs(&x4).unwrap();
        for (k, v) in cx.coeffs.iter().enumerate() {
            assert!(close(*v, if k == 1 { 1.0 } else { 0.0 }, 1e-15));
        }
    }

    #[test]
    fn coeffs_length_mismatch() {
        let g = ChebGrid::new(4).unwrap();
        assert_eq!(cheb_coeffs_on(&g, &[1.0; 3]), Err(Error::LengthMismatch { expected: 5, got: 3 }));
    }

    #[test]
    fn bary_examples() {
        let x3 = cheb_nodes(3).unwrap();
        let cube: Vec<f64> = x3.iter().map(|x| x * x * x).collect();
        assert!(close(bary_eval(&cube, 0.3).unwrap(), 0.027, 1e-15));
        assert_eq!(bary_eval(&cube, x3[1]).unwrap(), cube[1]);
        let x40 = cheb_nodes(40).unwrap();
        let f: Vec<f64> = x40.iter().map(|x| 1.0 / (2.0 - x)).collect();
        assert!(close(bary_eval(&f, 0.123).unwrap(), 1.0 / (2.0 - 0.123), 1e-13));
        assert_eq!(bary_eval(&f, 1.5), Err(Error::OutOfRange(1.5)));
    }

    #[test]
    fn divided_difference_matches_derivative_row() {
        let g = ChebGrid::new(20).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|x| (3.0 * x).sin()).collect();
        let df = g.differentiate(&f).unwrap();
        for m in [0, 3, 10, 20] {
            let dd = divided_difference(g.nodes(), g.bary_weights(), &f, m, g.nodes()[m]);
            assert!(close(dd, df[m], 1e-12));
            let x = g.nodes()[m] + 1e-9 * if m == 0 { -1.0 } else { 1.0 };
            let direct = (g.extrapolate(&f, x) - f[m]) / (x - g.nodes()[m]);
            assert!(close(divided_difference(g.nodes(), g.bary_weights(), &f, m, x), direct, 1e-5));
        }
    }

    #[test]
    fn spectral_decay() {
        let mut last = f64::INFINITY;
        for n in [8, 16, 24] {
            let x = cheb_nodes(n).unwrap();
            let f: Vec<f64> = x.iter().map(|x| 1.0 / (2.0 + x)).collect();
            let tail = cheb_coeffs(&f).unwrap().coeffs[n - 1].abs();
            assert!(tail < last * 1e-3);
            last = tail;
        }
    }
}
