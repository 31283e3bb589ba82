//! Special functions needed by the closed-form transforms.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::ChebGrid;

const DAWSON_SWITCH: f64 = 6.5;

/// Dawson's integral `D(x) = e^{-x²} ∫_0^x e^{t²} dt`.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= DAWSON_SWITCH { dawson_series(ax) } else { dawson_asymptotic(ax) };
    v.copysign(x)
}

// e^{-x²} Σ x^{2k+1} / (k! (2k+1)); every term is positive.
fn dawson_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= x2 / k;
        let t = term / (2.0 * k + 1.0);
        sum += t;
        if t <= 1e-17 * sum {
            break;
        }
    }
    sum * (-x2).exp()
}

// 1/(2x) Σ (2k−1)!! / (2x²)^k, truncated at the smallest term.
fn dawson_asymptotic(x: f64) -> f64 {
    let r = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let next = term * (2 * k - 1) as f64 * r;
        if next >= term || next < 1e-17 * sum {
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * x)
}

const BERNOULLI: [f64; 7] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];

/// Complex digamma `ψ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("{z}")));
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 8.0 {
        shift += 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        series += b / (2.0 * (k + 1) as f64) * p;
        p *= inv2;
    }
    Ok(z.ln() - 0.5 * inv - series - shift)
}

/// Layout of the collocation solve for `Y`: finite breakpoints (one finite
/// interval must contain 0 in its interior) and grid degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpintConfig {
    pub breakpoints: Vec<f64>,
    pub n_finite: usize,
    pub n_infinite: usize,
}

impl Default for ExpintConfig {
    fn default() -> Self {
        Self { breakpoints: vec![-10.0, -1.0, 1.0, 10.0], n_finite: 48, n_infinite: 48 }
    }
}

#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    grid: ChebGrid,
    infinite: bool,
    subtract: bool,
    values: Vec<f64>,
    deriv: Vec<f64>,
}

impl Piece {
    fn node(&self, j: usize) -> f64 {
        let l = self.grid.nodes()[j];
        0.5 * (self.hi * (1.0 + l) + self.lo * (1.0 - l))
    }

    fn hw(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    fn to_ref(&self, u: f64) -> f64 {
        ((2.0 * u - self.lo - self.hi) / (self.hi - self.lo)).clamp(-1.0, 1.0)
    }

    /// `e^{-x} ln|x|` added back on the interval containing 0.
    fn correction(&self, x: f64) -> f64 {
        if self.subtract {
            (-x).exp() * x.abs().ln()
        } else {
            0.0
        }
    }
}

/// `Y(x) = e^{-x} Ei(x)`, the solution of `Y′ + Y = 1/x` with `Y → 0` as
/// `x → −∞`, computed by Chebyshev collocation on `(−∞, a]`, the finite
/// intervals and `[b, ∞)`. The outer pieces use `s = 1/x`, where the
/// equation reads `−s² G′(s) + G = s`; on the interval containing 0 the
/// unknown is `Y − e^{-x} ln|x|`, which is smooth.
#[derive(Debug, Clone)]
pub struct ExpintSolver {
    pieces: Vec<Piece>,
}

impl ExpintSolver {
    pub fn new(config: &ExpintConfig) -> Result<Self> {
        let b = &config.breakpoints;
        if b.len() < 2 || b.windows(2).any(|w| w[0] >= w[1]) || b.contains(&0.0) {
            return Err(Error::InvalidConfig("expint breakpoints must increase and avoid 0".into()));
        }
        if !(b[0] < 0.0 && *b.last().unwrap() > 0.0) {
            return Err(Error::InvalidConfig("expint breakpoints must straddle 0".into()));
        }
        let mut pieces = vec![Piece {
            lo: 1.0 / b[0],
            hi: 0.0,
            grid: ChebGrid::new(config.n_infinite)?,
            infinite: true,
            subtract: false,
            values: Vec::new(),
            deriv: Vec::new(),
        }];
        for w in b.windows(2) {
            pieces.push(Piece {
                lo: w[0],
                hi: w[1],
                grid: ChebGrid::new(config.n_finite)?,
                infinite: false,
                subtract: w[0] < 0.0 && w[1] > 0.0,
                values: Vec::new(),
                deriv: Vec::new(),
            });
        }
        pieces.push(Piece {
            lo: 0.0,
            hi: 1.0 / b[b.len() - 1],
            grid: ChebGrid::new(config.n_infinite)?,
            infinite: true,
            subtract: false,
            values: Vec::new(),
            deriv: Vec::new(),
        });
        let offsets: Vec<usize> = pieces
            .iter()
            .scan(0, |acc, p| {
                let o = *acc;
                *acc += p.grid.len();
                Some(o)
            })
            .collect();
        let n: usize = pieces.iter().map(|p| p.grid.len()).sum();
        let mut a = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for (k, p) in pieces.iter().enumerate() {
            let off = offsets[k];
            let d = p.grid.diff_matrix();
            let len = p.grid.len();
            for i in 0..len {
                let u = p.node(i);
                for j in 0..len {
                    let dij = d[(i, j)] / p.hw();
                    a[(off + i, off + j)] = if p.infinite { -u * u * dij } else { dij };
                }
                a[(off + i, off + i)] += 1.0;
                rhs[off + i] = if p.infinite {
                    u
                } else if p.subtract {
                    if u == 0.0 {
                        1.0
                    } else {
                        -(-u).exp_m1() / u
                    }
                } else {
                    1.0 / u
                };
            }
            if k == 0 {
                continue;
            }
            // continuity with the previous piece at the shared point
            let prev = &pieces[k - 1];
            let x = b[k - 1];
            let (row, this_idx) = if p.infinite { (off, 0) } else { (off + len - 1, len - 1) };
            let prev_idx = if prev.infinite { offsets[k - 1] + prev.grid.len() - 1 } else { offsets[k - 1] };
            for j in 0..a.ncols() {
                a[(row, j)] = 0.0;
            }
            a[(row, off + this_idx)] = 1.0;
            a[(row, prev_idx)] = -1.0;
            rhs[row] = prev.correction(x) - p.correction(x);
        }
        let sol = a.lu().solve(&rhs).ok_or(Error::Singular { condition: f64::INFINITY })?;
        for (k, p) in pieces.iter_mut().enumerate() {
            p.values = sol.rows(offsets[k], p.grid.len()).iter().copied().collect();
            p.deriv = p.grid.differentiate(&p.values)?.iter().map(|v| v / p.hw()).collect();
        }
        Ok(Self { pieces })
    }

    fn locate(&self, x: f64) -> (&Piece, f64) {
        let last = self.pieces.len() - 1;
        if x <= 1.0 / self.pieces[0].lo {
            return (&self.pieces[0], 1.0 / x);
        }
        if x >= 1.0 / self.pieces[last].hi {
            return (&self.pieces[last], 1.0 / x);
        }
        let p = self.pieces[1..last].iter().find(|p| x <= p.hi).unwrap();
        (p, x)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x == 0.0 || x.is_nan() {
            return Err(Error::Pole("0".into()));
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let (p, u) = self.locate(x);
        Ok(p.grid.extrapolate(&p.values, p.to_ref(u)) + p.correction(x))
    }

    /// `Y′ + Y − 1/x` of the collocation solution, in the variable the
    /// piece is solved in.
    pub fn residual(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::Pole("0".into()));
        }
        let (p, u) = self.locate(x);
        let l = p.to_ref(u);
        let v = p.grid.extrapolate(&p.values, l);
        let dv = p.grid.extrapolate(&p.deriv, l);
        Ok(if p.infinite {
            -u * u * dv + v - u
        } else if p.subtract {
            dv + v + (-x).exp_m1() / x
        } else {
            dv + v - 1.0 / x
        })
    }
}

fn default_solver() -> &'static ExpintSolver {
    static SOLVER: OnceLock<ExpintSolver> = OnceLock::new();
    SOLVER.get_or_init(|| ExpintSolver::new(&ExpintConfig::default()).expect("default layout is valid"))
}

/// `Y(x) = e^{-x} Ei(x)`; for `u > 0`, `e^{u} E₁(u) = −Y(−u)` and
/// `e^{-u} Ei(u) = Y(u)`.
pub fn expint_y(x: f64) -> Result<f64> {
    default_solver().eval(x)
}

/// `Y′ + Y − 1/x` of the default solve.
pub fn expint_y_residual(x: f64) -> Result<f64> {
    default_solver().residual(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const EULER: f64 = 0.577_215_664_901_532_9;

    // e^{-x} Ei(x) for x > 0: positive power series, asymptotic beyond 40.
    fn ei_scaled(x: f64) -> f64 {
        if x > 40.0 {
            let (mut term, mut sum) = (1.0, 1.0);
            for k in 1..60 {
                term *= k as f64 / x;
                sum += term;
            }
            return sum / x;
        }
        let (mut t, mut sum) = (1.0, 0.0);
        for k in 1..400 {
            t *= x / k as f64;
            sum += t / k as f64;
            if t / (k as f64) < 1e-18 * sum {
                break;
            }
        }
        (EULER + x.ln() + sum) * (-x).exp()
    }

    // e^{u} E₁(u) for u > 0: continued fraction (modified Lentz) for u ≥ 1.
    fn e1_scaled(u: f64) -> f64 {
        if u < 1.0 {
            let (mut t, mut sum) = (1.0, 0.0);
            for k in 1..60 {
                t *= -u / k as f64;
                sum += t / k as f64;
            }
            return (-EULER - u.ln() - sum) * u.exp();
        }
        let tiny = 1e-300;
        let mut b = u + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }

    fn y_oracle(x: f64) -> f64 {
        if x > 0.0 {
            ei_scaled(x)
        } else {
            -e1_scaled(-x)
        }
    }

    #[test]
    fn dawson_values() {
        assert_eq!(dawson(0.0), 0.0);
        assert!((dawson(1.0) - 0.538_079_506_912_768_4).abs() < 1e-15);
        let h = 1e-5;
        assert!(((dawson(h) - dawson(-h)) / (2.0 * h) - 1.0).abs() < 1e-9);
        assert!((dawson(-2.0) + dawson(2.0)).abs() == 0.0);
        // large-x branch against 1/(2x) leading behaviour
        assert!((dawson(50.0) * 100.0 - 1.0).abs() < 3e-4);
    }

    #[test]
    fn dawson_branches_overlap() {
        for x in [6.0, 6.3, 6.5, 6.8, 7.5] {
            let a = dawson_series(x);
            let b = dawson_asymptotic(x);
            assert!((a - b).abs() < 1e-13, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn dawson_ode() {
        let h = 1e-5;
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let d = (dawson(x + h) - dawson(x - h)) / (2.0 * h);
            assert!((d - (1.0 - 2.0 * x * dawson(x))).abs() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn digamma_values() {
        let one = digamma(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re + EULER).abs() < 1e-14 && one.im == 0.0);
        let two = digamma(Complex64::new(2.0, 0.0)).unwrap();
        assert!((two.re - (1.0 - EULER)).abs() < 1e-14);
        assert!(matches!(digamma(Complex64::new(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(digamma(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn digamma_identities() {
        for k in 0..20 {
            let z = Complex64::new(-1.3 + 0.37 * k as f64, -2.0 + 0.25 * k as f64);
            let refl = digamma(1.0 - z).unwrap() - digamma(z).unwrap();
            let cot = (PI * z).cos() / (PI * z).sin() * PI;
            assert!((refl - cot).norm() < 1e-11 * (1.0 + cot.norm()), "z = {z}");
            let rec = digamma(z + 1.0).unwrap() - digamma(z).unwrap();
            assert!((rec - 1.0 / z).norm() < 1e-12 * (1.0 + (1.0 / z).norm()));
        }
        let z = Complex64::new(0.25, 0.3);
        let refl = digamma(1.0 - z).unwrap() - digamma(z).unwrap();
        assert!((refl - PI * (PI * z).cos() / (PI * z).sin()).norm() < 1e-11);
    }

    #[test]
    fn footnote_three_interval_layout_is_coarser() {
        let s =
            ExpintSolver::new(&ExpintConfig { breakpoints: vec![-1.0, 1.0], n_finite: 40, n_infinite: 120 }).unwrap();
        let err = (1..400)
            .map(|i| -200.0 + i as f64 + 0.01)
            .map(|x| (s.eval(x).unwrap() / y_oracle(x) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-7 && err > 1e-12, "{err:e}");
    }

    #[test]
    fn oracles_agree() {
        assert!((ei_scaled(1.0) - 1.895_117_816_355_936_8 / 1f64.exp()).abs() < 1e-15);
        let e1 = e1_scaled(1.0);
        assert!((e1 - 0.596_347_362_323_194_1).abs() < 5e-15, "{e1:e}");
        assert!((e1_scaled(0.99) - e1_scaled(1.0)).abs() < 1e-2);
    }

    #[test]
    fn expint_matches_series_oracle() {
        let mut worst = 0.0f64;
        for i in 0..400 {
            let x = -100.0 + 0.5 * i as f64 + 0.123;
            let got = expint_y(x).unwrap();
            let want = y_oracle(x);
            worst = worst.max(((got - want) / want).abs());
        }
        assert!(worst < 1e-12, "worst relative error {worst:e}");
        let y = expint_y(-100.0).unwrap();
        assert!(y < 0.0 && y.abs() <= 1.1e-2);
        assert!((expint_y(1.0).unwrap() - 0.697_174_883_235_066_5).abs() < 1e-12);
        assert!(expint_y(0.0).is_err());
    }

    #[test]
    fn expint_identities() {
        for u in [0.1, 0.5, 1.0, 3.0, 10.0, 35.0] {
            assert!((expint_y(-u).unwrap() + e1_scaled(u)).abs() < 1e-12 * e1_scaled(u).abs());
            let y = expint_y(u).unwrap();
            assert!((y - ei_scaled(u)).abs() < 1e-12 * ei_scaled(u).abs(), "u = {u}: {y} vs {}", ei_scaled(u));
        }
    }

    #[test]
    fn expint_collocation_residual() {
        for i in 0..20 {
            let x = -30.0 + 3.1 * i as f64 + 0.37;
            assert!(expint_y_residual(x).unwrap().abs() < 1e-11, "x = {x}");
        }
    }
}
