//! Solitary waves of the generalized Benjamin–Ono equation,
//! `−cQ − 𝓗Q′ + Q^m/m = 0`, by Newton iteration on the two-domain grid
//! `ξ ∈ [−1, 1]`, `1/ξ ∈ [−1, 1]`.
//!
//! The unknowns are `Q(ξ_j)` on the finite domain and `v(s_j) = yQ(y)` at
//! `y = 1/s_j` on the infinite one. `v` is exactly the sample the Hilbert
//! matrix expects there, so `ℍ` acts on the stacked vector directly.

use nalgebra::{DMatrix, DVector};

use crate::domain::{DomainKind, Partition, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::hilbert::hilbert_matrix;
use crate::spectral::cheb_coeffs_on;

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonProblem {
    pub m: u32,
    /// Wave speed.
    pub c: f64,
    /// Degree on each domain; must be even so that `ξ = 0` is a node.
    pub n: usize,
    /// Relaxation `μ ∈ (0, 1]`.
    pub mu: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Amplitude of the initial guess `A/(1 + ξ²)`.
    pub amplitude: f64,
}

impl SolitonProblem {
    pub fn new(m: u32, n: usize) -> Self {
        Self {
            m,
            c: 1.0,
            n,
            mu: if m == 2 { 1.0 } else { 0.5 },
            tol: 1e-10,
            max_iter: 60,
            amplitude: Self::default_amplitude(m),
        }
    }

    /// 3.5 for `m = 2`; otherwise the `A` for which `A/(1 + ξ²)` satisfies the
    /// equation at `ξ = 0`, `A^{m−1} = 2m`.
    pub fn default_amplitude(m: u32) -> f64 {
        if m == 2 {
            3.5
        } else {
            (2.0 * m as f64).powf(1.0 / (m as f64 - 1.0))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n % 2 == 1 || self.n < 2 {
            return Err(Error::InvalidConfig(format!("N must be even and at least 2, got {}", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidConfig(format!("m must be at least 2, got {}", self.m)));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::InvalidConfig(format!("μ must lie in (0, 1], got {}", self.mu)));
        }
        if !(self.amplitude > 0.0 && self.c > 0.0 && self.tol > 0.0) {
            return Err(Error::InvalidConfig("A, c and tol must be positive".into()));
        }
        Ok(())
    }
}

/// Discretized operator for one problem.
pub struct SolitonSystem {
    problem: SolitonProblem,
    partition: Partition,
    /// Offsets of the finite and infinite blocks in the stacked vector.
    fin: usize,
    inf: usize,
    /// Local coordinates of both blocks.
    xi: Vec<f64>,
    s: Vec<f64>,
    /// `S`: stacked unknowns to pointwise `Q`.
    scale: DVector<f64>,
    /// `𝔇ℍ`.
    linear: DMatrix<f64>,
    d_fin: DMatrix<f64>,
}

impl SolitonSystem {
    pub fn new(problem: &SolitonProblem) -> Result<Self> {
        problem.validate()?;
        let n = problem.n;
        let partition = Partition::new(&[-1.0, 1.0], true, &[n], DEFAULT_MARGIN)?;
        let offsets = partition.offsets();
        let pos = |kind: DomainKind| partition.domains().iter().position(|d| d.kind == kind).unwrap();
        let (kf, ki) = (pos(DomainKind::Finite), pos(DomainKind::InfiniteWrapped));
        let (df, di) = (&partition.domains()[kf], &partition.domains()[ki]);
        let (xi, s) = (df.local_nodes(), di.local_nodes());
        let total = partition.total_nodes();
        let (fin, inf) = (offsets[kf], offsets[ki]);

        let mut scale = DVector::from_element(total, 1.0);
        for (j, &sj) in s.iter().enumerate() {
            scale[inf + j] = sj;
        }
        // ∂ξ on the finite block, −s²∂s on the infinite block
        let d_fin = df.grid.diff_matrix() / df.half_width();
        let d_inf = di.grid.diff_matrix() / di.half_width();
        let mut deriv = DMatrix::zeros(total, total);
        for i in 0..=n {
            for j in 0..=n {
                deriv[(fin + i, fin + j)] = d_fin[(i, j)];
                deriv[(inf + i, inf + j)] = -s[i] * s[i] * d_inf[(i, j)];
            }
        }
        let linear = deriv * hilbert_matrix(&partition).native();
        Ok(Self { problem: problem.clone(), partition, fin, inf, xi, s, scale, linear, d_fin })
    }

    pub fn problem(&self) -> &SolitonProblem {
        &self.problem
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn len(&self) -> usize {
        self.scale.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scale.is_empty()
    }

    /// Stacked vector of `Q` given pointwise.
    pub fn stack(&self, q: impl Fn(f64) -> f64) -> DVector<f64> {
        let mut u = DVector::zeros(self.len());
        for (j, &x) in self.xi.iter().enumerate() {
            u[self.fin + j] = q(x);
        }
        for (j, &s) in self.s.iter().enumerate() {
            // v(s) = Q(1/s)/s, and v(0) = lim yQ(y)
            u[self.inf + j] = if s == 0.0 { 0.0 } else { q(1.0 / s) / s };
        }
        u
    }

    /// `A/(1 + ξ²)`, with `v = A s/(1 + s²)`.
    pub fn initial_guess(&self) -> DVector<f64> {
        let a = self.problem.amplitude;
        let mut u = self.stack(|x| a / (1.0 + x * x));
        for (j, &s) in self.s.iter().enumerate() {
            u[self.inf + j] = a * s / (1.0 + s * s);
        }
        u
    }

    fn pointwise(&self, u: &DVector<f64>) -> DVector<f64> {
        u.component_mul(&self.scale)
    }

    /// Stacked indices of the rows replaced by constraints: `s = 1`,
    /// `s = −1` and `s = 0`. The collocation row at `s = 0` vanishes
    /// identically since both `Q = sv` and `−s²∂s` do.
    pub fn tau_rows(&self) -> [usize; 3] {
        let n = self.problem.n;
        [self.inf, self.inf + n, self.inf + n / 2]
    }

    /// Values of the three constraints at `u`.
    pub fn constraints(&self, u: &DVector<f64>) -> [f64; 3] {
        let n = self.problem.n;
        let (f, i) = (self.fin, self.inf);
        let dq0: f64 = (0..=n).map(|j| self.d_fin[(n / 2, j)] * u[f + j]).sum();
        [u[f] - u[i], u[f + n] + u[i + n], dq0]
    }

    /// Collocation residual at every node, without constraints.
    pub fn collocation_residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let q = self.pointwise(u);
        let m = self.problem.m as i32;
        let nonlinear = q.map(|v| v.powi(m) / m as f64);
        -&q * self.problem.c - &self.linear * u + nonlinear
    }

    /// `F(U)` with the constraint rows substituted.
    pub fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        let mut f = self.collocation_residual(u);
        for (row, v) in self.tau_rows().into_iter().zip(self.constraints(u)) {
            f[row] = v;
        }
        f
    }

    /// Jacobian before the constraint rows are substituted.
    pub fn collocation_jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let q = self.pointwise(u);
        let m = self.problem.m as i32;
        let mut jac = -&self.linear;
        for k in 0..self.len() {
            jac[(k, k)] += (q[k].powi(m - 1) - self.problem.c) * self.scale[k];
        }
        jac
    }

    pub fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = self.collocation_jacobian(u);
        self.apply_tau(&mut jac);
        jac
    }

    /// Replaces the tau rows of `jac` by the linear constraint rows.
    pub fn apply_tau(&self, jac: &mut DMatrix<f64>) {
        let n = self.problem.n;
        let (f, i) = (self.fin, self.inf);
        let [r1, r2, r3] = self.tau_rows();
        for r in [r1, r2, r3] {
            jac.row_mut(r).fill(0.0);
        }
        jac[(r1, f)] = 1.0;
        jac[(r1, i)] = -1.0;
        jac[(r2, f + n)] = 1.0;
        jac[(r2, i + n)] = 1.0;
        for j in 0..=n {
            jac[(r3, f + j)] = self.d_fin[(n / 2, j)];
        }
    }

    fn profile(&self, u: DVector<f64>, iterations: usize, residual: f64) -> Result<SolitonProfile> {
        let n = self.problem.n;
        let q: Vec<f64> = u.rows(self.fin, n + 1).iter().copied().collect();
        let v: Vec<f64> = u.rows(self.inf, n + 1).iter().copied().collect();
        let sv: Vec<f64> = v.iter().zip(&self.s).map(|(v, s)| v * s).collect();
        let grid = &self.partition.domains()[0].grid;
        let coeffs_finite = cheb_coeffs_on(grid, &q)?.coeffs;
        let coeffs_infinite = cheb_coeffs_on(grid, &sv)?.coeffs;
        let sing = singular_values(self.jacobian(&u));
        let condition = sing.as_ref().map_or(f64::NAN, |s| s.max() / s.min());
        let pre = singular_values(self.collocation_jacobian(&u));
        let rank_defect = pre.map_or(0, |s| s.iter().filter(|&&x| x < 1e-10 * s.max()).count());
        Ok(SolitonProfile {
            xi: self.xi.clone(),
            s: self.s.clone(),
            q,
            v,
            iterations,
            residual,
            condition,
            rank_defect,
            coeffs_finite,
            coeffs_infinite,
        })
    }
}

fn singular_values(m: DMatrix<f64>) -> Option<DVector<f64>> {
    nalgebra::SVD::try_new(m, false, false, f64::EPSILON, 2000).map(|svd| svd.singular_values)
}

/// Converged profile and Newton diagnostics.
#[derive(Debug, Clone)]
pub struct SolitonProfile {
    pub xi: Vec<f64>,
    pub s: Vec<f64>,
    /// `Q(ξ_j)`
    pub q: Vec<f64>,
    /// `v(s_j) = yQ(y)`, `y = 1/s_j`
    pub v: Vec<f64>,
    pub iterations: usize,
    /// `‖F‖∞` at the returned iterate.
    pub residual: f64,
    /// Condition estimate of the final Jacobian (`NaN` if the SVD failed).
    pub condition: f64,
    /// Numerical rank defect of the Jacobian before the constraint rows are
    /// substituted.
    pub rank_defect: usize,
    /// Chebyshev coefficients of `Q` on the finite domain and of
    /// `Q(1/s) = s v(s)` on the infinite one.
    pub coeffs_finite: Vec<f64>,
    pub coeffs_infinite: Vec<f64>,
}

impl SolitonProfile {
    /// `Q` at the infinite-domain nodes, ordered like `s`.
    pub fn q_infinite(&self) -> Vec<f64> {
        self.v.iter().zip(&self.s).map(|(v, s)| v * s).collect()
    }

    /// `(domain, node coordinate, ξ, Q)` for every node.
    pub fn rows(&self) -> Vec<(&'static str, f64, f64, f64)> {
        let fin = self.xi.iter().zip(&self.q).map(|(&x, &q)| ("finite", x, x, q));
        let inf = self
            .s
            .iter()
            .zip(self.q_infinite())
            .map(|(&s, q)| ("infinite", s, if s == 0.0 { f64::INFINITY } else { 1.0 / s }, q));
        fin.chain(inf).collect()
    }

    /// Interpolated profile at any `ξ`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let grid = crate::spectral::ChebGrid::new(self.q.len() - 1)?;
        if x.abs() <= 1.0 {
            grid.interpolate(&self.q, x)
        } else if x.is_infinite() {
            Ok(0.0)
        } else {
            let s = 1.0 / x;
            Ok(s * grid.interpolate(&self.v, s)?)
        }
    }

    pub fn peak(&self) -> f64 {
        self.q.iter().fold(f64::MIN, |m, &v| m.max(v))
    }
}

/// Relaxed Newton iteration `U ← U − t Jac⁻¹ F` until `‖F‖∞ < tol`.
///
/// The step factor starts at `μ`. A step is accepted when the simplified
/// correction `Jac⁻¹ F(U − tΔ)` is shorter than `(1 − t/4)‖Δ‖`, otherwise `t`
/// is halved; after an accepted step it doubles again up to 1.
pub fn newton_solve(problem: &SolitonProblem) -> Result<SolitonProfile> {
    let system = SolitonSystem::new(problem)?;
    let mut u = system.initial_guess();
    let mut f = system.residual(&u);
    let mut t = problem.mu;
    for step in 0..problem.max_iter {
        let norm = f.amax();
        if !norm.is_finite() {
            return Err(Error::Diverged { step, residual: norm });
        }
        if norm < problem.tol {
            return system.profile(u, step, norm);
        }
        let lu = system.jacobian(&u).lu();
        let delta = lu.solve(&f).ok_or(Error::Singular { condition: f64::INFINITY })?;
        let size = delta.norm();
        loop {
            let trial = &u - &delta * t;
            let ft = system.residual(&trial);
            let simplified = lu.solve(&ft).map_or(f64::INFINITY, |d| d.norm());
            if simplified <= (1.0 - 0.25 * t) * size {
                u = trial;
                f = ft;
                break;
            }
            t *= 0.5;
            if t < 1e-4 {
                return Err(Error::Diverged { step: step + 1, residual: norm });
            }
        }
        t = (2.0 * t).min(1.0);
    }
    let norm = f.amax();
    if norm < problem.tol {
        return system.profile(u, problem.max_iter, norm);
    }
    Err(Error::MaxIterations { iterations: problem.max_iter, residual: norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(x: f64) -> f64 {
        4.0 / (1.0 + x * x)
    }

    fn exact_stack(sys: &SolitonSystem) -> DVector<f64> {
        let mut u = sys.stack(exact);
        for (j, &s) in sys.s.iter().enumerate() {
            u[sys.inf + j] = 4.0 * s / (1.0 + s * s);
        }
        u
    }

    #[test]
    fn exact_soliton_residual() {
        let sys = SolitonSystem::new(&SolitonProblem::new(2, 100)).unwrap();
        let u = exact_stack(&sys);
        assert!(sys.collocation_residual(&u).amax() <= 1e-10);
        for c in sys.constraints(&u) {
            assert!(c.abs() <= 1e-13);
        }
        assert_eq!(sys.residual(&DVector::zeros(sys.len())).amax(), 0.0);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for m in [2, 3] {
            let sys = SolitonSystem::new(&SolitonProblem::new(m, 40)).unwrap();
            let u = sys.initial_guess();
            let jac = sys.jacobian(&u);
            let eps = 1e-6;
            for j in (0..sys.len()).step_by(7) {
                let mut e = DVector::zeros(sys.len());
                e[j] = eps;
                let fd = (sys.residual(&(&u + &e)) - sys.residual(&(&u - &e))) / (2.0 * eps);
                assert!((fd - jac.column(j)).amax() <= 1e-6, "m = {m}, column {j}");
            }
        }
    }

    #[test]
    fn jacobian_at_zero_is_linear_part() {
        let sys = SolitonSystem::new(&SolitonProblem::new(3, 20)).unwrap();
        let jac = sys.jacobian(&DVector::zeros(sys.len()));
        let u = sys.initial_guess();
        let lin = -u.component_mul(&sys.scale) - &sys.linear * &u;
        let mut want = lin.clone();
        for (r, v) in sys.tau_rows().into_iter().zip(sys.constraints(&u)) {
            want[r] = v;
        }
        assert!((jac * &u - want).amax() < 1e-12);
    }

    #[test]
    fn constraints_measure_jumps() {
        let sys = SolitonSystem::new(&SolitonProblem::new(2, 16)).unwrap();
        let mut u = DVector::from_element(sys.len(), 1.0);
        for (j, &s) in sys.s.iter().enumerate() {
            u[sys.inf + j] = 0.25 * s;
        }
        let c = sys.constraints(&u);
        assert!((c[0] - 0.75).abs() < 1e-15 && (c[1] - 0.75).abs() < 1e-15);
        assert!(c[2].abs() < 1e-13);
    }

    #[test]
    fn odd_degree_rejected() {
        assert!(matches!(newton_solve(&SolitonProblem::new(2, 101)), Err(Error::InvalidConfig(_))));
        let mut p = SolitonProblem::new(2, 10);
        p.mu = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn quadratic_soliton() {
        let p = SolitonProblem::new(2, 100);
        let prof = newton_solve(&p).unwrap();
        assert!(prof.iterations <= 10);
        assert!(prof.residual < 1e-10);
        for (_, _, x, q) in prof.rows() {
            let want = if x.is_infinite() { 0.0 } else { exact(x) };
            assert!((q - want).abs() <= 1e-12, "ξ = {x}");
        }
        let other = newton_solve(&SolitonProblem { amplitude: 4.0, ..p }).unwrap();
        for (a, b) in prof.q.iter().zip(&other.q) {
            assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn scaling_invariance() {
        // Q_c(ξ) = c^{1/(m−1)} Q(cξ), which is cQ(cξ) for m = 2
        for (m, n) in [(2, 100), (3, 200)] {
            let prof = newton_solve(&SolitonProblem::new(m, n)).unwrap();
            let c = 2.0f64;
            let amp = c.powf(1.0 / (m as f64 - 1.0));
            let sys = SolitonSystem::new(&SolitonProblem { c, ..SolitonProblem::new(m, n) }).unwrap();
            let u = sys.stack(|x| amp * prof.eval(c * x).unwrap());
            assert!(sys.collocation_residual(&u).amax() <= 1e-8, "m = {m}");
        }
    }

    #[test]
    fn cubic_soliton_properties() {
        let prof = newton_solve(&SolitonProblem::new(3, 160)).unwrap();
        assert!(prof.residual < 1e-10);
        let peak = prof.peak();
        let n = prof.q.len() - 1;
        for j in 0..=n {
            assert!((prof.q[j] - prof.q[n - j]).abs() <= 1e-10 * peak);
            assert!(prof.q[j] > 0.0);
        }
        assert_eq!(prof.q[n / 2], peak);
        for coeffs in [&prof.coeffs_finite, &prof.coeffs_infinite] {
            for c in coeffs.iter().skip(1).step_by(2) {
                assert!(c.abs() <= 1e-10 * peak);
            }
        }
        assert!(prof.v[n / 2].abs() < 1e-9);
        // translation
        assert_eq!(prof.rank_defect, 1);
    }
}
