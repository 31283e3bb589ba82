//! Experiment drivers: transforms of the registered examples, convergence
//! sweeps, coefficient dumps and soliton solves, each rendered as CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::contour::{hilbert_oscillatory, DeformedContour, Rational};
use crate::domain::{Partition, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::global::weideman_coeffs;
use crate::hilbert::hilbert_md;
use crate::reference::{example, ExampleSpec, Family};
use crate::soliton::{newton_solve, SolitonProblem, SolitonProfile};
use crate::spectral::cheb_coeffs;

/// Uniform points added per finite domain on the default evaluation grid.
pub const UNIFORM_PER_DOMAIN: usize = 401;

/// Clenshaw–Curtis degree per contour segment when none is given.
pub const CONTOUR_DEGREE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Multi-domain Chebyshev quadrature.
    Md,
    /// Weideman's rational FFT method.
    Global,
    /// Contour deformation, oscillatory examples only.
    Contour,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Md => "md",
            Method::Global => "global",
            Method::Contour => "contour",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" => Ok(Method::Md),
            "global" => Ok(Method::Global),
            "contour" => Ok(Method::Contour),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Points at which transforms are compared.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalGrid {
    /// Collocation nodes of the partition plus uniform points on each finite domain.
    Default,
    /// Collocation nodes only (including `±∞`).
    Nodes,
    Uniform {
        count: usize,
        lo: f64,
        hi: f64,
    },
}

/// Replacements for the example's recommended partition.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartitionOverride {
    pub breakpoints: Option<Vec<f64>>,
    pub wrap: Option<bool>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub example: String,
    pub method: Method,
    /// Degree per finite domain (md) or per contour segment.
    pub n: Option<usize>,
    /// Fourier size of the global method.
    pub nf: Option<usize>,
    /// Sizes of a convergence sweep: `N` for md and contour, `N_F` for global.
    pub n_list: Vec<usize>,
    pub partition: PartitionOverride,
    pub grid: EvalGrid,
    /// Points closer than this to a jump of `f` are left out of the error norms.
    pub exclude_jumps: f64,
}

impl RunConfig {
    pub fn new(example: &str, method: Method) -> Self {
        Self {
            example: example.to_string(),
            method,
            n: None,
            nf: None,
            n_list: Vec::new(),
            partition: PartitionOverride::default(),
            grid: EvalGrid::Default,
            exclude_jumps: 0.0,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_nf(mut self, nf: usize) -> Self {
        self.nf = Some(nf);
        self
    }

    pub fn with_n_list(mut self, list: &[usize]) -> Self {
        self.n_list = list.to_vec();
        self
    }

    pub fn with_exclusion(mut self, radius: f64) -> Self {
        self.exclude_jumps = radius;
        self
    }

    /// The example with the partition overrides applied.
    pub fn spec(&self) -> Result<ExampleSpec> {
        let mut spec = example(&self.example)?;
        if let Some(b) = &self.partition.breakpoints {
            spec.breakpoints = b.clone();
        }
        if let Some(w) = self.partition.wrap {
            spec.wrap = w;
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<ExampleSpec> {
        let spec = self.spec()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        match self.method {
            Method::Md if !spec.md_supported() => {
                return bad(format!("{} is not analytic at infinity; use --method contour or global", spec.id))
            }
            Method::Contour if !spec.contour_supported() => {
                return bad(format!("contour method only applies to osc_* examples, not {}", spec.id))
            }
            _ => {}
        }
        if self.n == Some(0) || self.n_list.contains(&0) {
            return bad("sizes must be positive".into());
        }
        if let EvalGrid::Uniform { count, lo, hi } = self.grid {
            if count == 0 || !(lo <= hi) {
                return bad(format!("bad uniform grid {count} on [{lo}, {hi}]"));
            }
        }
        self.partition_of(&spec, self.n.unwrap_or(spec.n))?;
        Ok(spec)
    }

    fn partition_of(&self, spec: &ExampleSpec, n: usize) -> Result<Partition> {
        let delta = self.partition.delta.unwrap_or(DEFAULT_MARGIN);
        Partition::new(&spec.breakpoints, spec.wrap, &spec.degrees(n), delta)
    }

    /// Partition with degree `n` on the finite domains.
    pub fn partition_for(&self, n: usize) -> Result<Partition> {
        self.partition_of(&self.spec()?, n)
    }
}

/// Sorted evaluation points for `partition`.
pub fn eval_points(grid: &EvalGrid, partition: &Partition) -> Vec<f64> {
    let mut xs = match *grid {
        EvalGrid::Uniform { count, lo, hi } => uniform(count, lo, hi),
        EvalGrid::Nodes | EvalGrid::Default => partition.node_points(),
    };
    if *grid == EvalGrid::Default {
        for d in partition.domains().iter().filter(|d| !d.is_infinite()) {
            xs.extend(uniform(UNIFORM_PER_DOMAIN, d.lo, d.hi));
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

fn uniform(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformRow {
    pub x: f64,
    pub numeric: f64,
    pub exact: f64,
}

impl TransformRow {
    /// `|numeric − exact|`; zero when both diverge the same way.
    pub fn abs_err(&self) -> f64 {
        if self.numeric == self.exact {
            0.0
        } else {
            (self.numeric - self.exact).abs()
        }
    }
}

/// Transform values with the error norms: `err` over all points, `err_finite`
/// on the finite domains and `err_infinite` on the rest of the line.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformReport {
    pub rows: Vec<TransformRow>,
    pub err: f64,
    pub err_finite: f64,
    pub err_infinite: f64,
}

impl TransformReport {
    fn new(rows: Vec<TransformRow>, spec: &ExampleSpec, exclude: f64) -> Self {
        let lo = spec.breakpoints[0];
        let hi = *spec.breakpoints.last().unwrap();
        let (mut fin, mut inf) = (0.0f64, 0.0f64);
        for r in &rows {
            if spec.jumps.iter().any(|&j| (r.x - j).abs() < exclude) {
                continue;
            }
            let e = r.abs_err();
            let e = if e.is_nan() { f64::INFINITY } else { e };
            if (lo..=hi).contains(&r.x) {
                fin = fin.max(e);
            } else {
                inf = inf.max(e);
            }
        }
        Self { rows, err: fin.max(inf), err_finite: fin, err_infinite: inf }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,H_numeric,H_exact,abs_err\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", num(r.x), num(r.numeric), num(r.exact), num(r.abs_err())).unwrap();
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn rational(spec: &ExampleSpec) -> Result<Rational> {
    match spec.family {
        Family::OscQuadratic => Ok(Rational::Quadratic),
        Family::OscQuartic => Ok(Rational::Quartic),
        _ => Err(Error::InvalidConfig(format!("no contour form for {}", spec.id))),
    }
}

/// One transform of size `size` (`N`, `N_F` or contour degree).
fn transform_at(cfg: &RunConfig, spec: &ExampleSpec, size: usize) -> Result<TransformReport> {
    let grid_n = if cfg.method == Method::Md { size } else { cfg.n.unwrap_or(spec.n) };
    let partition = cfg.partition_of(spec, if spec.md_supported() { grid_n } else { spec.n })?;
    let xs = eval_points(&cfg.grid, &partition);
    let numeric = match cfg.method {
        Method::Md => hilbert_md(&spec.pwf(&partition), &partition, &xs)?,
        Method::Global => {
            let g = weideman_coeffs(|y| spec.f(y), size)?;
            xs.iter().map(|&x| g.hilbert(x)).collect()
        }
        Method::Contour => {
            let contour = DeformedContour::standard(rational(spec)?, size);
            xs.iter().map(|&x| hilbert_oscillatory(rational(spec)?, x, &contour)).collect::<Result<_>>()?
        }
    };
    let rows = xs.iter().zip(numeric).map(|(&x, numeric)| TransformRow { x, numeric, exact: spec.exact(x) }).collect();
    Ok(TransformReport::new(rows, spec, cfg.exclude_jumps))
}

fn default_size(cfg: &RunConfig, spec: &ExampleSpec) -> usize {
    match cfg.method {
        Method::Md => cfg.n.unwrap_or(spec.n),
        Method::Global => cfg.nf.unwrap_or(spec.nf),
        Method::Contour => cfg.n.unwrap_or(CONTOUR_DEGREE),
    }
}

pub fn run_transform(cfg: &RunConfig) -> Result<TransformReport> {
    let spec = cfg.validate()?;
    transform_at(cfg, &spec, default_size(cfg, &spec))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub linf_err: f64,
    pub err_finite: f64,
    pub err_infinite: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub method: Method,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let md = self.method == Method::Md;
        let mut out = String::from(if md { "N,linf_err,err_finite,err_infinite\n" } else { "N,linf_err\n" });
        for r in &self.rows {
            if md {
                writeln!(out, "{},{},{},{}", r.n, num(r.linf_err), num(r.err_finite), num(r.err_infinite)).unwrap();
            } else {
                writeln!(out, "{},{}", r.n, num(r.linf_err)).unwrap();
            }
        }
        out
    }
}

/// Error against the exact transform for each size of `cfg.n_list`.
pub fn run_convergence(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let spec = cfg.validate()?;
    if cfg.n_list.is_empty() {
        return Err(Error::InvalidConfig("convergence needs a list of sizes".into()));
    }
    let spec = &spec;
    let rows = std::thread::scope(|scope| {
        let jobs: Vec<_> =
            cfg.n_list.iter().map(|&n| scope.spawn(move || transform_at(cfg, spec, n).map(|r| (n, r)))).collect();
        jobs.into_iter().map(|j| j.join().expect("sweep worker panicked")).collect::<Result<Vec<_>>>()
    })?;
    let rows = rows
        .into_iter()
        .map(|(n, r)| ConvergenceRow { n, linf_err: r.err, err_finite: r.err_finite, err_infinite: r.err_infinite })
        .collect();
    Ok(ConvergenceReport { method: cfg.method, rows })
}

/// Coefficient magnitudes: Chebyshev per domain (md) or Fourier (global).
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffTable {
    /// `|c_n|` of the sampled `f` (finite) or `g(s) = f(1/s)` (infinite) per domain.
    Chebyshev(Vec<Vec<f64>>),
    /// `(n, |a_n|)` of `f(y)(1 − iy)`.
    Fourier(Vec<(i64, f64)>),
}

impl CoeffTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            CoeffTable::Chebyshev(domains) => {
                out.push_str("domain,n,abs_coeff\n");
                for (k, c) in domains.iter().enumerate() {
                    for (n, v) in c.iter().enumerate() {
                        writeln!(out, "{k},{n},{}", num(*v)).unwrap();
                    }
                }
            }
            CoeffTable::Fourier(a) => {
                out.push_str("n,abs_a_n\n");
                for (n, v) in a {
                    writeln!(out, "{n},{}", num(*v)).unwrap();
                }
            }
        }
        out
    }

    /// First index from which every `|c_n|` of domain `k` stays below `tol`.
    pub fn decayed_from(&self, k: usize, tol: f64) -> Option<usize> {
        let CoeffTable::Chebyshev(d) = self else { return None };
        let c = d.get(k)?;
        let last_big = c.iter().rposition(|v| *v >= tol);
        match last_big {
            None => Some(0),
            Some(j) if j + 1 < c.len() => Some(j + 1),
            Some(_) => None,
        }
    }

    /// `|a_n|` of the Fourier table.
    pub fn fourier(&self, n: i64) -> Option<f64> {
        let CoeffTable::Fourier(a) = self else { return None };
        a.iter().find(|(k, _)| *k == n).map(|(_, v)| *v)
    }
}

pub fn run_coeffs(cfg: &RunConfig) -> Result<CoeffTable> {
    let spec = cfg.validate()?;
    match cfg.method {
        Method::Md => {
            let partition = cfg.partition_of(&spec, cfg.n.unwrap_or(spec.n))?;
            let field = partition.sample(&spec.pwf(&partition))?;
            let coeffs = field
                .values
                .iter()
                .map(|v| Ok(cheb_coeffs(v)?.coeffs.iter().map(|c| c.abs()).collect()))
                .collect::<Result<_>>()?;
            Ok(CoeffTable::Chebyshev(coeffs))
        }
        Method::Global => {
            let g = weideman_coeffs(|y| spec.f(y), cfg.nf.unwrap_or(spec.nf))?;
            Ok(CoeffTable::Fourier(g.coeffs().map(|(n, a)| (n, a.norm())).collect()))
        }
        Method::Contour => Err(Error::InvalidConfig("the contour method has no coefficients".into())),
    }
}

/// `Q(ξ) = 4c/(1 + c²ξ²)`, the exact `m = 2` solitary wave.
pub fn soliton_m2_exact(c: f64, xi: f64) -> f64 {
    if xi.is_infinite() {
        0.0
    } else {
        4.0 * c / (1.0 + c * c * xi * xi)
    }
}

pub fn run_soliton(problem: &SolitonProblem) -> Result<SolitonProfile> {
    newton_solve(problem)
}

/// Profile CSV; for `m = 2` with the exact profile and its error.
pub fn soliton_csv(profile: &SolitonProfile, problem: &SolitonProblem) -> String {
    let exact = problem.m == 2;
    let mut out = String::from("domain,node_coordinate,xi,Q");
    out.push_str(if exact { ",Q_exact,abs_err\n" } else { "\n" });
    for (domain, node, xi, q) in profile.rows() {
        write!(out, "{domain},{},{},{}", num(node), num(xi), num(q)).unwrap();
        if exact {
            let e = soliton_m2_exact(problem.c, xi);
            write!(out, ",{},{}", num(e), num((q - e).abs())).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn soliton_max_m2_error(profile: &SolitonProfile, c: f64) -> f64 {
    profile.rows().iter().map(|r| (r.3 - soliton_m2_exact(c, r.2)).abs()).fold(0.0, f64::max)
}

/// Plain-text diagnostics block of a converged profile.
pub fn soliton_diagnostics(profile: &SolitonProfile, problem: &SolitonProblem) -> String {
    let mut out = String::from("{\n");
    writeln!(out, "  \"m\": {},", problem.m).unwrap();
    writeln!(out, "  \"c\": {},", num(problem.c)).unwrap();
    writeln!(out, "  \"n\": {},", problem.n).unwrap();
    writeln!(out, "  \"iterations\": {},", profile.iterations).unwrap();
    writeln!(out, "  \"residual\": {},", num(profile.residual)).unwrap();
    writeln!(out, "  \"condition\": {},", num(profile.condition)).unwrap();
    writeln!(out, "  \"rank_defect\": {},", profile.rank_defect).unwrap();
    writeln!(out, "  \"peak\": {}", num(profile.peak())).unwrap();
    out.push_str("}\n");
    out
}

/// A runnable experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Transform(RunConfig),
    Convergence(RunConfig),
    Coeffs(RunConfig),
    Soliton(SolitonProblem),
}

/// CSV contract of a run plus the soliton diagnostics block.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub csv: String,
    pub diagnostics: Option<String>,
}

impl Job {
    pub fn run(&self) -> Result<Output> {
        let csv = |csv| Output { csv, diagnostics: None };
        Ok(match self {
            Job::Transform(c) => csv(run_transform(c)?.to_csv()),
            Job::Convergence(c) => csv(run_convergence(c)?.to_csv()),
            Job::Coeffs(c) => csv(run_coeffs(c)?.to_csv()),
            Job::Soliton(p) => {
                let profile = run_soliton(p)?;
                Output { csv: soliton_csv(&profile, p), diagnostics: Some(soliton_diagnostics(&profile, p)) }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub job: Job,
}

fn steps(from: usize, to: usize, by: usize) -> Vec<usize> {
    (from..=to).step_by(by).collect()
}

/// Named reproductions of the reference experiments.
pub fn presets() -> Vec<Preset> {
    use Job::*;
    use Method::*;
    let p = |name, description, job| Preset { name, description, job };
    vec![
        p(
            "fig-ex12err",
            "lorentz_a1, md, N = 50: error on nodes and a dense grid",
            Transform(RunConfig::new("lorentz_a1", Md).with_n(50)),
        ),
        p(
            "fig-lorentz2",
            "lorentz_a2, md: error against N",
            Convergence(RunConfig::new("lorentz_a2", Md).with_n_list(&steps(10, 100, 10))),
        ),
        p(
            "fig-quartic",
            "quartic, md: error against N",
            Convergence(RunConfig::new("quartic", Md).with_n_list(&steps(10, 60, 10))),
        ),
        p(
            "fig-coeff2",
            "lorentz_a2, md, N = 80: Chebyshev coefficients per domain",
            Coeffs(RunConfig::new("lorentz_a2", Md).with_n(80)),
        ),
        p(
            "fig-global",
            "lorentz_a2, global: error against N_F",
            Convergence(RunConfig::new("lorentz_a2", Global).with_n_list(&steps(20, 200, 20))),
        ),
        p(
            "fig-piecewise",
            "piecewise_cont, md: error against N",
            Convergence(RunConfig::new("piecewise_cont", Md).with_n_list(&steps(20, 160, 20))),
        ),
        p(
            "fig-piecewise-global",
            "piecewise_cont, global, N_F = 1000",
            Transform(RunConfig::new("piecewise_cont", Global).with_nf(1000)),
        ),
        p(
            "fig-disc",
            "piecewise_disc, md, N = 120 (rows at the jumps diverge)",
            Transform(RunConfig::new("piecewise_disc", Md).with_n(120)),
        ),
        p(
            "fig-disc-coeffs",
            "piecewise_disc, global: Fourier coefficients, N_F = 4096",
            Coeffs(RunConfig::new("piecewise_disc", Global).with_nf(4096)),
        ),
        p(
            "fig-gauss",
            "gauss, md: error against N",
            Convergence(RunConfig::new("gauss", Md).with_n_list(&steps(20, 120, 20))),
        ),
        p(
            "fig-gauss-global",
            "gauss, global: error against N_F",
            Convergence(RunConfig::new("gauss", Global).with_n_list(&steps(40, 240, 40))),
        ),
        p(
            "fig-sech",
            "sech, md: error against N",
            Convergence(RunConfig::new("sech", Md).with_n_list(&steps(200, 1000, 200))),
        ),
        p(
            "fig-sech-global",
            "sech, global: error against N_F",
            Convergence(RunConfig::new("sech", Global).with_n_list(&steps(100, 800, 100))),
        ),
        p(
            "fig-abserr",
            "abs_exp, md: error against N",
            Convergence(RunConfig::new("abs_exp", Md).with_n_list(&steps(10, 100, 10))),
        ),
        p(
            "fig-osc-quadratic",
            "osc_quadratic, contour: error against segment degree",
            Convergence(RunConfig::new("osc_quadratic", Contour).with_n_list(&steps(4, 32, 4))),
        ),
        p(
            "fig-osc-quartic",
            "osc_quartic, contour: error against segment degree",
            Convergence(RunConfig::new("osc_quartic", Contour).with_n_list(&steps(4, 32, 4))),
        ),
        p(
            "fig-osc-global",
            "osc_quartic, global, N_F = 1000",
            Transform(RunConfig::new("osc_quartic", Global).with_nf(1000)),
        ),
        p("fig-m2", "soliton m = 2, N = 100, A = 3.5", Soliton(SolitonProblem::new(2, 100))),
        p("fig-m3", "soliton m = 3, N = 300", Soliton(SolitonProblem::new(3, 300))),
        p("fig-m4", "soliton m = 4, N = 300", Soliton(SolitonProblem::new(4, 300))),
    ]
}

pub fn preset(name: &str) -> Result<Preset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown preset `{name}`")))
}
