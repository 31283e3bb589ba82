//! `mdhilbert`: transforms, convergence sweeps, coefficient dumps and
//! soliton solves from the command line. CSV goes to `--out` or stdout.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdhilbert::bench::{self, EvalGrid, Job, Method, Output, PartitionOverride, RunConfig};
use mdhilbert::reference::{all_examples, pv_oracle_with, OracleOptions};
use mdhilbert::soliton::SolitonProblem;
use mdhilbert::Error;

#[derive(Parser)]
#[command(name = "mdhilbert", version, about = "Multi-domain spectral Hilbert transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform of a registered example against its exact form.
    Transform(RunArgs),
    /// Error against N (md, contour) or N_F (global).
    Convergence(RunArgs),
    /// Chebyshev (md) or Fourier (global) coefficient magnitudes.
    Coeffs(RunArgs),
    /// Solitary wave of the generalized Benjamin–Ono equation.
    Soliton(SolitonArgs),
    /// Quick consistency checks.
    Selftest,
    /// Run a named reproduction; `--list` shows them.
    Preset(PresetArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    example: String,
    #[arg(long, default_value = "md")]
    method: String,
    /// Degree per finite domain (md) or per contour segment.
    #[arg(long)]
    n: Option<usize>,
    /// Fourier size of the global method.
    #[arg(long)]
    nf: Option<usize>,
    /// Sizes for a sweep: `10,20,40` or `from:to:step`.
    #[arg(long)]
    n_list: Option<String>,
    /// Comma-separated breakpoints, e.g. `-6,6`.
    #[arg(long, allow_hyphen_values = true)]
    breakpoints: Option<String>,
    #[arg(long, overrides_with = "no_wrap")]
    wrap: bool,
    #[arg(long, overrides_with = "wrap")]
    no_wrap: bool,
    /// Continuation margin in reference units.
    #[arg(long)]
    delta: Option<f64>,
    /// `default`, `nodes` or `uniform:count:lo:hi`.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    grid: String,
    /// Leave points this close to a jump out of the error norms.
    #[arg(long, default_value_t = 0.0)]
    exclude: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolitonArgs {
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    /// Wave speed.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PresetArgs {
    #[arg(required_unless_present = "list")]
    name: Option<String>,
    #[arg(long)]
    list: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::UnknownExample(_)
            | Error::InvalidPartition(_)
            | Error::OddFourierSize(_) => Failure::Usage(e.to_string()),
            e => Failure::Numerical(e.to_string()),
        }
    }
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    text.split(',').map(|t| t.trim().parse().map_err(|_| usage(format!("bad {what} `{t}`")))).collect()
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, Failure> {
    if !text.contains(':') {
        return parse_list(text, "size");
    }
    let range: Vec<usize> = text
        .split(':')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad range `{text}`")))?;
    match range[..] {
        [from, to, step] if step > 0 => Ok((from..=to).step_by(step).collect()),
        _ => Err(usage(format!("range must be from:to:step with step > 0, got `{text}`"))),
    }
}

fn parse_grid(text: &str) -> Result<EvalGrid, Failure> {
    match text {
        "default" => Ok(EvalGrid::Default),
        "nodes" => Ok(EvalGrid::Nodes),
        _ => {
            let bad = || usage(format!("bad grid `{text}`"));
            let rest = text.strip_prefix("uniform:").ok_or_else(bad)?;
            let p: Vec<&str> = rest.split(':').collect();
            if p.len() != 3 {
                return Err(bad());
            }
            Ok(EvalGrid::Uniform {
                count: p[0].parse().map_err(|_| bad())?,
                lo: p[1].parse().map_err(|_| bad())?,
                hi: p[2].parse().map_err(|_| bad())?,
            })
        }
    }
}

fn run_config(a: &RunArgs) -> Result<RunConfig, Failure> {
    let method: Method = a.method.parse()?;
    let mut cfg = RunConfig::new(&a.example, method);
    cfg.n = a.n;
    cfg.nf = a.nf;
    if let Some(l) = &a.n_list {
        cfg.n_list = parse_sizes(l)?;
    }
    cfg.partition = PartitionOverride {
        breakpoints: a.breakpoints.as_deref().map(|b| parse_list(b, "breakpoint")).transpose()?,
        wrap: if a.wrap {
            Some(true)
        } else if a.no_wrap {
            Some(false)
        } else {
            None
        },
        delta: a.delta,
    };
    cfg.grid = parse_grid(&a.grid)?;
    cfg.exclude_jumps = a.exclude;
    cfg.validate()?;
    Ok(cfg)
}

fn soliton_problem(a: &SolitonArgs) -> SolitonProblem {
    let mut p = SolitonProblem::new(a.m, a.n);
    p.c = a.c;
    p.mu = a.mu.unwrap_or(p.mu);
    p.tol = a.tol.unwrap_or(p.tol);
    p.amplitude = a.amplitude.unwrap_or(p.amplitude);
    p.max_iter = a.max_iter.unwrap_or(p.max_iter);
    p
}

/// Writes through a temporary file in the target directory.
fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Prints to stdout; a closed pipe is not an error.
fn print_out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(output: &Output, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            write_atomic(path, &output.csv).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            if let Some(d) = &output.diagnostics {
                print_out(d);
            }
        }
        None => {
            print_out(&output.csv);
            if let Some(d) = &output.diagnostics {
                eprint!("{d}");
            }
        }
    }
    Ok(())
}

fn selftest() -> Result<(), Failure> {
    let mut failed = 0;
    let mut check = |name: &str, value: f64, bound: f64| {
        let ok = value <= bound;
        println!("{} {name}: {value:.3e} (bound {bound:.0e})", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    };
    let md = bench::run_transform(&RunConfig::new("lorentz_a1", Method::Md).with_n(40))?;
    check("lorentz_a1 md N=40", md.err, 1e-12);
    let gl = bench::run_transform(&RunConfig::new("lorentz_a1", Method::Global).with_nf(8))?;
    check("lorentz_a1 global N_F=8", gl.err, 1e-13);
    let co = bench::run_transform(&RunConfig::new("osc_quadratic", Method::Contour).with_n(16))?;
    check("osc_quadratic contour", co.err, 1e-12);
    let mut oracle = 0.0f64;
    for spec in all_examples() {
        let opts = OracleOptions::new(1e-10).with_breakpoints(&spec.features);
        for x in [-2.3, 0.4] {
            let want = pv_oracle_with(|y| spec.f(y), x, &opts)?;
            oracle = oracle.max((want - spec.exact(x)).abs());
        }
    }
    check("exact forms against quadrature", oracle, 1e-8);
    let p = SolitonProblem::new(2, 40);
    let profile = bench::run_soliton(&p)?;
    check("soliton m=2 N=40", bench::soliton_max_m2_error(&profile, p.c), 1e-9);
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} selftest check(s) failed")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Transform(a) => emit(&Job::Transform(run_config(&a)?).run()?, a.out.as_deref()),
        Command::Convergence(a) => {
            let cfg = run_config(&a)?;
            if cfg.n_list.is_empty() {
                return Err(usage("convergence needs --n-list"));
            }
            emit(&Job::Convergence(cfg).run()?, a.out.as_deref())
        }
        Command::Coeffs(a) => emit(&Job::Coeffs(run_config(&a)?).run()?, a.out.as_deref()),
        Command::Soliton(a) => {
            let p = soliton_problem(&a);
            p.validate()?;
            emit(&Job::Soliton(p).run()?, a.out.as_deref())
        }
        Command::Selftest => selftest(),
        Command::Preset(a) => {
            if a.list {
                let list: String =
                    bench::presets().iter().map(|p| format!("{:<22} {}\n", p.name, p.description)).collect();
                print_out(&list);
                return Ok(());
            }
            let p = bench::preset(a.name.as_deref().unwrap_or_default())?;
            emit(&p.job.run()?, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}
