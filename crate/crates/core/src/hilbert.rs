//! Multi-domain Hilbert transform `𝓗f(x) = (1/π) PV∫ f(y)/(x − y) dy`.
//!
//! Each domain contributes `∫ f(y)/(x − y) dy` over its part of the line.
//! In local coordinates the contribution is a Cauchy integral of the
//! domain's *native* samples: `f` on finite domains and `h(s) = f(1/s)/s`
//! on infinite ones, where
//!
//! ```text
//! ∫_{|y| outside} f(y)/(x − y) dy = ∫ h(s)/(x s − 1) ds = −t ∫ h(s)/(t − s) ds,   t = 1/x.
//! ```
//!
//! Far from a domain the integrand is smooth and Clenshaw–Curtis applies
//! directly. Inside the enlarged domain the value `φ*` at the singular point
//! is subtracted, its integral `φ*·ln|(u* − lo)/(u* − hi)|` is added back, and
//! the integrand at a node that (nearly) coincides with `u*` is replaced by
//! minus the divided difference of the interpolant, which tends to `−φ′`.
//! Log terms that are singular at a junction are collected per junction and
//! cancel for continuous functions.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::domain::{Domain, MultiDomainField, Partition, PiecewiseAnalyticFn};
use crate::error::{Error, Result};

/// Reference-unit distance beyond an endpoint within which `φ*` is taken
/// from the interpolant instead of the analytic continuation.
const EDGE: f64 = 1e-3;
/// Reference-unit distance to a node below which the divided difference
/// replaces the raw quotient.
const NODE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Regular,
    Subtracted,
}

/// Local coordinate of `x` in `domain`, if it has one.
fn local_point(domain: &Domain, x: f64) -> Option<f64> {
    if domain.is_infinite() {
        (x != 0.0).then(|| domain.local_coord(x))
    } else {
        x.is_finite().then_some(x)
    }
}

fn distance_outside(domain: &Domain, u: f64) -> f64 {
    (domain.lo - u).max(u - domain.hi).max(0.0)
}

/// Path used for `(domain, x)` with margin `delta` (reference units) and an
/// optional continuation limit (local units).
pub fn classify(domain: &Domain, x: f64, limit: Option<f64>) -> Path {
    match local_point(domain, x) {
        Some(u) if domain.within_margin(u, domain.margin) && limit.is_none_or(|l| distance_outside(domain, u) <= l) => {
            Path::Subtracted
        }
        _ => Path::Regular,
    }
}

/// Per-(domain, x) classification for a list of evaluation points.
#[derive(Debug, Clone)]
pub struct HilbertEvalPlan {
    pub partition: Partition,
    pub points: Vec<f64>,
    /// `paths[k][i]` for domain `k` and point `i`.
    pub paths: Vec<Vec<Path>>,
}

impl HilbertEvalPlan {
    pub fn new(partition: &Partition, points: &[f64], limits: &[Option<f64>]) -> Self {
        let paths = partition
            .domains()
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let limit = limits.get(k).copied().flatten();
                points.iter().map(|&x| classify(d, x, limit)).collect()
            })
            .collect();
        Self { partition: partition.clone(), points: points.to_vec(), paths }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Star {
    None,
    /// Interpolant at this reference coordinate.
    Interp(f64),
    /// Analytic continuation at these local / reference coordinates.
    Continue(f64, f64),
}

#[derive(Debug, Clone, Copy)]
struct KernelLog {
    sign: f64,
    q: f64,
    p: f64,
}

/// Contribution `scale · (a·φ + b·φ* + Σ sign·φ*·ln|u* − q|)` as a linear
/// functional of native samples `φ` and the subtracted value `φ*`.
struct Kernel {
    a: Vec<f64>,
    b: f64,
    scale: f64,
    star: Star,
    logs: Vec<KernelLog>,
    u: f64,
    infinite: bool,
    /// `b` plus the log pieces, when `φ*` lies outside the domain.
    defect: Option<Defect>,
}

impl Kernel {
    fn new(domain: &Domain, x: f64, path: Path) -> Self {
        let hw = domain.half_width();
        let w = domain.grid.cc_weights();
        let nodes = domain.local_nodes();
        let infinite = domain.is_infinite();
        let mut k = Kernel {
            a: vec![0.0; nodes.len()],
            b: 0.0,
            scale: 1.0,
            star: Star::None,
            logs: Vec::new(),
            u: f64::NAN,
            infinite,
            defect: None,
        };
        let Some(u) = local_point(domain, x) else {
            // Finite domain at x = ∞ contributes nothing; infinite domain at x = 0
            // has the smooth integrand -h(s).
            if infinite {
                k.a.iter_mut().zip(w).for_each(|(a, wj)| *a = -hw * wj);
            }
            return k;
        };
        k.u = u;
        if path == Path::Regular {
            for ((a, &wj), &uj) in k.a.iter_mut().zip(w).zip(&nodes) {
                *a = if infinite { hw * wj / (x * uj - 1.0) } else { hw * wj / (x - uj) };
            }
            return k;
        }
        let l = domain.map_to_ref(u);
        k.star = if l.abs() <= 1.0 + EDGE { Star::Interp(l) } else { Star::Continue(u, l) };
        let ref_nodes = domain.grid.nodes();
        let near = match k.star {
            Star::Interp(l) => {
                let (m, d) = ref_nodes
                    .iter()
                    .map(|&lj| (l - lj).abs())
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (j, d)| if d < acc.1 { (j, d) } else { acc });
                (d < NODE).then_some(m)
            }
            _ => None,
        };
        let mut sum = 0.0;
        for (j, (a, (&wj, &uj))) in k.a.iter_mut().zip(w.iter().zip(&nodes)).enumerate() {
            if Some(j) == near {
                continue;
            }
            *a = hw * wj / (u - uj);
            sum += *a;
        }
        if let Some(m) = near {
            let row = dd_row(ref_nodes, domain.grid.bary_weights(), m, l);
            for (a, r) in k.a.iter_mut().zip(row) {
                *a -= w[m] * r;
            }
        }
        k.b = -sum;
        if l.abs() > 1.0 && near.is_none() {
            k.defect = Some(quadrature_defect(l, &domain.grid));
        }
        k.logs.push(KernelLog { sign: 1.0, q: domain.lo, p: domain.y_ends.0 });
        k.logs.push(KernelLog { sign: -1.0, q: domain.hi, p: domain.y_ends.1 });
        if infinite {
            k.scale = -u;
        }
        k
    }

    fn is_singular(&self, log: &KernelLog, x: f64) -> bool {
        x == log.p || (log.p.is_infinite() && x.is_infinite())
    }

    /// Coefficient of `φ*` other than the singular log pieces.
    fn star_coeff(&self, x: f64) -> f64 {
        if let Some(d) = self.defect {
            return d.value;
        }
        let mut b = self.b;
        for log in &self.logs {
            if self.is_singular(log, x) {
                // ln|t − 1/p| = ln|x − p| − ln|x| − ln|p| at x = p
                if self.infinite && log.p.is_finite() {
                    b -= log.sign * 2.0 * log.p.abs().ln();
                }
            } else if self.infinite && x.is_finite() {
                // u − q = (1 − qx)/x without rounding u = 1/x first
                b += log.sign * ((1.0 - log.q * x) / x).abs().ln();
            } else {
                b += log.sign * (self.u - log.q).abs().ln();
            }
        }
        b
    }

    /// Junction points at which a log piece is singular, with the sign.
    fn singular(&self, x: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.logs.iter().filter(move |log| self.is_singular(log, x)).map(|log| (log.sign, log.p))
    }
}

/// `E = ln|(l + 1)/(l − 1)| − Σ w_j/(l − l_j)` for `|l| > 1`, the
/// Clenshaw–Curtis error for `1/(l − u)`, together with `E·P(l)` where
/// `P(l)λ_j/(l − l_j)` is the barycentric row at `l`.
///
/// With `l = (w + 1/w)/2`, `1/(l − u) = 4/(w − 1/w) Σ' w^{−k} T_k(u)`; only
/// the aliased `T_k` with `k > N` contribute to `E`, so it is summed term by
/// term. `P(l) = (w − 1/w)(w^N − w^{−N})/4N` grows like `|w|^N` while `E`
/// decays like `|w|^{−N}`, and the product is formed without either factor.
#[derive(Debug, Clone, Copy)]
struct Defect {
    value: f64,
    scaled: f64,
}

fn quadrature_defect(l: f64, grid: &crate::spectral::ChebGrid) -> Defect {
    let n = grid.degree();
    let w = l + l.signum() * (l * l - 1.0).sqrt();
    let terms = (40.0 / w.abs().ln()).ceil();
    if !(terms < 2e5) {
        let direct: f64 = grid.cc_weights().iter().zip(grid.nodes()).map(|(wj, lj)| wj / (l - lj)).sum();
        let value = ((l + 1.0) / (l - 1.0)).abs().ln() - direct;
        let p = (w - 1.0 / w) * (w.powi(n as i32) - w.powi(-(n as i32))) / (4.0 * n as f64);
        return Defect { value, scaled: value * p };
    }
    let exact = |k: usize| if k % 2 == 1 { 0.0 } else { 2.0 / (1.0 - (k * k) as f64) };
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in n + 1..n + 1 + terms as usize {
        power /= w;
        let r = k % (2 * n);
        let alias = if r <= n { r } else { 2 * n - r };
        sum += power * (exact(k) - exact(alias));
    }
    let wn = w.powi(-(n as i32));
    Defect { value: 4.0 / (w - 1.0 / w) * wn * sum, scaled: (1.0 - wn * wn) * sum / n as f64 }
}

/// Row `r` with `Σ r_j f_j = (p(x) − f_m)/(x − x_m)` in reference units.
fn dd_row(nodes: &[f64], lam: &[f64], m: usize, x: f64) -> Vec<f64> {
    let dx = x - nodes[m];
    let mut row = vec![0.0; nodes.len()];
    let mut tail = 0.0;
    for (j, (&xj, &wj)) in nodes.iter().zip(lam).enumerate() {
        if j != m {
            let t = wj / (x - xj);
            row[j] = t;
            tail += t;
        }
    }
    let den = lam[m] + dx * tail;
    row[m] = -tail;
    row.iter_mut().for_each(|r| *r /= den);
    row
}

/// Native samples of an infinite domain: `h = g/s`, with `h(0) = g′(0)`.
pub fn native_samples(domain: &Domain, g: &[f64]) -> Result<Vec<f64>> {
    domain.grid.check_len(g.len())?;
    if !domain.is_infinite() {
        return Ok(g.to_vec());
    }
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let g0 = domain.grid.extrapolate(g, domain.map_to_ref(0.0));
    if g0.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NoDecay(0));
    }
    let nodes = domain.local_nodes();
    let mut h: Vec<f64> = g.iter().zip(&nodes).map(|(v, s)| v / s).collect();
    if let Some(m) = nodes.iter().position(|&s| s == 0.0) {
        let d = domain.grid.diff_matrix();
        h[m] = (0..g.len()).map(|j| d[(m, j)] * g[j]).sum::<f64>() / domain.half_width();
    }
    Ok(h)
}

/// One `φ*·ln|u* − q|` term of a segment, in the domain's local coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogTerm {
    pub coeff: f64,
    /// Endpoint in the local coordinate.
    pub endpoint: f64,
    /// Endpoint as a point of `ℝ ∪ {∞}`.
    pub point: f64,
}

impl LogTerm {
    /// Value at the local coordinate `u`; `±∞` at the endpoint.
    pub fn value(&self, u: f64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else {
            self.coeff * (u - self.endpoint).abs().ln()
        }
    }
}

/// Subtracted-path contribution split into quadrature and log parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub integral: f64,
    pub logs: Vec<LogTerm>,
    /// Local coordinate of the evaluation point.
    pub at: f64,
}

impl Segment {
    pub fn total(&self) -> f64 {
        self.integral + self.logs.iter().map(|l| l.value(self.at)).sum::<f64>()
    }
}

/// Clenshaw–Curtis value of the domain contribution `∫ f(y)/(x − y) dy`
/// for `x` outside the enlarged domain. `samples` are native samples.
pub fn segment_regular(samples: &[f64], domain: &Domain, x: f64) -> Result<f64> {
    domain.grid.check_len(samples.len())?;
    if classify(domain, x, None) == Path::Subtracted {
        return Err(Error::TooClose { domain: 0, x });
    }
    let k = Kernel::new(domain, x, Path::Regular);
    Ok(dot(&k.a, samples))
}

fn subtracted(samples: &[f64], domain: &Domain, x: f64, star: Option<f64>) -> Segment {
    let k = Kernel::new(domain, x, Path::Subtracted);
    let phi = match (star, k.star) {
        (Some(v), _) => v,
        (None, Star::Interp(l) | Star::Continue(_, l)) => domain.grid.extrapolate(samples, l),
        (None, Star::None) => 0.0,
    };
    let integral = k.scale * (dot(&k.a, samples) + k.b * phi);
    let logs =
        k.logs.iter().map(|log| LogTerm { coeff: k.scale * log.sign * phi, endpoint: log.q, point: log.p }).collect();
    Segment { integral, logs, at: k.u }
}

/// Subtracted-kernel contribution of a finite domain for `x` in its enlarged
/// interval: `∫ (f(y) − f(x))/(x − y) dy` plus `f(x)·ln|(x − a)/(x − b)|`.
/// `f(x)` is interpolated (or extrapolated) from the samples.
pub fn segment_pv_finite(samples: &[f64], domain: &Domain, x: f64) -> Result<Segment> {
    domain.grid.check_len(samples.len())?;
    if domain.is_infinite() {
        return Err(Error::InvalidPartition("expected a finite domain".into()));
    }
    if classify(domain, x, None) == Path::Regular {
        return Err(Error::TooFar { domain: 0, x });
    }
    Ok(subtracted(samples, domain, x, None))
}

/// Subtracted-kernel contribution of an infinite domain from samples of
/// `g(s) = f(1/s)`, for `1/x` in the enlarged domain:
/// `−t ∫ (h(s) − h(t))/(t − s) ds − f(x)·ln|(t − ã)/(t − b̃)|` with `t = 1/x`.
pub fn segment_pv_infinite(g: &[f64], domain: &Domain, x: f64) -> Result<Segment> {
    if !domain.is_infinite() {
        return Err(Error::InvalidPartition("expected an infinite domain".into()));
    }
    let h = native_samples(domain, g)?;
    if x == 0.0 || classify(domain, x, None) == Path::Regular {
        return Err(Error::TooFar { domain: 0, x });
    }
    Ok(subtracted(&h, domain, x, None))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Native samples of every domain of a sampled field.
pub fn native_field(partition: &Partition, field: &MultiDomainField) -> Result<Vec<Vec<f64>>> {
    field.check(partition)?;
    partition
        .domains()
        .iter()
        .zip(&field.values)
        .enumerate()
        .map(|(k, (d, v))| {
            native_samples(d, v).map_err(|e| match e {
                Error::NoDecay(_) => Error::NoDecay(k),
                e => e,
            })
        })
        .collect()
}

fn continued_value(pwf: &PiecewiseAnalyticFn, k: usize, domain: &Domain, native: &[f64], star: Star) -> f64 {
    match star {
        Star::None => 0.0,
        Star::Interp(l) => domain.grid.extrapolate(native, l),
        Star::Continue(u, l) => {
            let v = pwf.piece(k)(u);
            let v = if domain.is_infinite() { v / u } else { v };
            if v.is_finite() {
                v
            } else {
                domain.grid.extrapolate(native, l)
            }
        }
    }
}

/// `𝓗f` at each point of `xs` (`±∞` allowed).
///
/// At a junction where `f` is flagged discontinuous the transform diverges
/// logarithmically and the returned value is infinite.
pub fn hilbert_md(pwf: &PiecewiseAnalyticFn, partition: &Partition, xs: &[f64]) -> Result<Vec<f64>> {
    if !pwf.decays() && !partition.domains().is_empty() {
        let k = partition.finite_count();
        return Err(Error::NoDecay(k));
    }
    let field = partition.sample(pwf)?;
    let native = native_field(partition, &field)?;
    let domains = partition.domains();
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut total = 0.0;
        let mut buckets: Vec<(f64, f64, f64)> = Vec::new();
        for (k, d) in domains.iter().enumerate() {
            let kernel = Kernel::new(d, x, classify(d, x, pwf.continuation_limit(k)));
            let phi = continued_value(pwf, k, d, &native[k], kernel.star);
            total += kernel.scale * (dot(&kernel.a, &native[k]) + kernel.star_coeff(x) * phi);
            for (sign, p) in kernel.singular(x) {
                let c = kernel.scale * sign * phi;
                match buckets.iter_mut().find(|b| b.0 == p) {
                    Some(b) => {
                        b.1 += c;
                        b.2 += c.abs();
                    }
                    None => buckets.push((p, c, c.abs())),
                }
            }
        }
        for (p, c, size) in buckets {
            if !pwf.is_continuous_at(p) && c.abs() > 1e-14 * size {
                total = -c.signum() * f64::INFINITY;
            }
        }
        out.push(total / PI);
    }
    Ok(out)
}

/// Dense Hilbert matrix on the stacked nodes of a partition.
///
/// The native form acts on native samples (`f` on finite domains, `h = g/s`
/// on infinite ones) and returns `𝓗f` at every stacked node point. Singular
/// junction logs are cancelled, so the matrix assumes a continuous function.
#[derive(Debug, Clone)]
pub struct HilbertMatrix {
    partition: Partition,
    native: DMatrix<f64>,
}

pub fn hilbert_matrix(partition: &Partition) -> HilbertMatrix {
    let points = partition.node_points();
    let offsets = partition.offsets();
    let n = partition.total_nodes();
    let mut native = DMatrix::zeros(n, n);
    for (i, &x) in points.iter().enumerate() {
        for (d, &off) in partition.domains().iter().zip(&offsets) {
            let kernel = Kernel::new(d, x, classify(d, x, None));
            let b = kernel.star_coeff(x);
            let mut row = kernel.a.clone();
            match (kernel.star, kernel.defect) {
                (Star::Interp(l) | Star::Continue(_, l), Some(def)) => {
                    let lam = d.grid.bary_weights();
                    for ((r, &lj), &wj) in row.iter_mut().zip(d.grid.nodes()).zip(lam) {
                        *r += def.scaled * wj / (l - lj);
                    }
                }
                (Star::Interp(l) | Star::Continue(_, l), None) => {
                    for (r, s) in row.iter_mut().zip(d.grid.bary_row(l)) {
                        *r += b * s;
                    }
                }
                (Star::None, _) => {}
            }
            for (j, r) in row.into_iter().enumerate() {
                native[(i, off + j)] = kernel.scale * r / PI;
            }
        }
    }
    HilbertMatrix { partition: partition.clone(), native }
}

impl HilbertMatrix {
    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn native(&self) -> &DMatrix<f64> {
        &self.native
    }

    pub fn points(&self) -> Vec<f64> {
        self.partition.node_points()
    }

    pub fn apply_native(&self, native: &[f64]) -> Result<Vec<f64>> {
        if native.len() != self.native.ncols() {
            return Err(Error::LengthMismatch { expected: self.native.ncols(), got: native.len() });
        }
        Ok((0..self.native.nrows()).map(|i| self.native.row(i).iter().zip(native).map(|(a, b)| a * b).sum()).collect())
    }

    /// Applies the matrix to pointwise samples (`g` on infinite domains).
    pub fn apply(&self, field: &MultiDomainField) -> Result<Vec<f64>> {
        let native = native_field(&self.partition, field)?;
        self.apply_native(&native.concat())
    }

    pub fn apply_fn(&self, pwf: &PiecewiseAnalyticFn) -> Result<Vec<f64>> {
        if !pwf.is_continuous() {
            return Err(Error::Discontinuous("the Hilbert matrix assumes continuous data".into()));
        }
        self.apply(&self.partition.sample(pwf)?)
    }

    /// Map from pointwise samples to native samples.
    pub fn native_map(&self) -> DMatrix<f64> {
        let n = self.native.ncols();
        let mut t = DMatrix::zeros(n, n);
        for (d, off) in self.partition.domains().iter().zip(self.partition.offsets()) {
            let nodes = d.local_nodes();
            for (j, &s) in nodes.iter().enumerate() {
                if !d.is_infinite() {
                    t[(off + j, off + j)] = 1.0;
                } else if s != 0.0 {
                    t[(off + j, off + j)] = 1.0 / s;
                } else {
                    let dm = d.grid.diff_matrix();
                    for c in 0..nodes.len() {
                        t[(off + j, off + c)] = dm[(j, c)] / d.half_width();
                    }
                }
            }
        }
        t
    }

    /// Matrix acting on pointwise samples.
    pub fn pointwise(&self) -> DMatrix<f64> {
        &self.native * self.native_map()
    }
}
