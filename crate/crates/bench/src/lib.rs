//! Tables and surface data for the two travelling-wave examples and for
//! problems read from a config file.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rkhsm::basis::{build_basis, generate_collocation_ordered, PointOrdering};
use rkhsm::error::Error as CoreError;
use rkhsm::problem::{parse_config, rescale_to_reference, ProblemSpec, TravelingWave};
use rkhsm::solver::{error_norms, solve_with, Solution, SolveOptions};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver failed for {context}: {source}")]
    Solver { context: String, source: CoreError },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Solver { .. } => 3,
            BenchError::Io { .. } => 4,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        BenchError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Problem-definition errors are config errors; the rest come from the solve.
fn classify(context: &str, err: CoreError) -> BenchError {
    match err {
        CoreError::Degenerate { .. } | CoreError::Divergence { .. } => BenchError::Solver {
            context: context.to_string(),
            source: err,
        },
        other => BenchError::Config(format!("{context}: {other}")),
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

/// `# key: value` header lines.
pub type Metadata = Vec<(String, String)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    Ex1,
    Ex2,
}

impl Example {
    pub fn wave(self) -> TravelingWave {
        match self {
            Example::Ex1 => TravelingWave::EXAMPLE1,
            Example::Ex2 => TravelingWave::EXAMPLE2,
        }
    }

    pub fn spec(self, alpha: f64) -> rkhsm::error::Result<ProblemSpec> {
        match self {
            Example::Ex1 => ProblemSpec::example1(alpha),
            Example::Ex2 => ProblemSpec::example2(alpha),
        }
    }
}

/// Closed-form solution of a built-in example on [0, 1]².
pub fn builtin_exact(example: Example, point: (f64, f64)) -> Result<f64> {
    let (z, t) = point;
    if !(0.0..=1.0).contains(&z) || !(0.0..=1.0).contains(&t) {
        return Err(BenchError::Config(format!("point ({z}, {t}) lies outside [0, 1]^2")));
    }
    if example == Example::Ex2 {
        let radicand = 0.5 - 0.5 * (z / 3.0 - 10.0 * t / 9.0).tanh();
        assert!(radicand >= 0.0, "negative radicand {radicand} at ({z}, {t})");
    }
    Ok(example.wave().value(z, t))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Builtin(Example),
    Config(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZetaGrid {
    /// `m` interior points `a + (b − a)·i/(m + 1)`.
    Count(usize),
    Points(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pretty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    /// Collocation points including the origin.
    pub n: usize,
    pub alpha: f64,
    pub taus: Vec<f64>,
    /// Defaults to `n − 1` interior points.
    pub zeta_grid: Option<ZetaGrid>,
    /// Interior grid `(n_zeta, n_tau)`; defaults to `(n − 1, 1)`.
    pub layout: Option<(usize, usize)>,
    pub ordering: PointOrdering,
    pub passes: usize,
    pub format: Format,
}

impl RunConfig {
    pub fn new(problem: Problem, n: usize, alpha: f64, taus: Vec<f64>) -> Self {
        Self {
            problem,
            n,
            alpha,
            taus,
            zeta_grid: None,
            layout: None,
            ordering: PointOrdering::TauMajor,
            passes: 1,
            format: Format::Csv,
        }
    }

    pub fn layout(&self) -> Result<(usize, usize)> {
        match self.layout {
            Some((nz, nt)) => {
                if nz == 0 || nt == 0 {
                    return Err(BenchError::Config(format!("layout {nz}x{nt} has an empty side")));
                }
                if nz * nt + 1 != self.n {
                    return Err(BenchError::Config(format!(
                        "layout {nz}x{nt} gives {} points with the origin, but n = {}",
                        nz * nt + 1,
                        self.n
                    )));
                }
                Ok((nz, nt))
            }
            None if self.n >= 2 => Ok((self.n - 1, 1)),
            None => Err(BenchError::Config(format!(
                "n = {} leaves no interior collocation point",
                self.n
            ))),
        }
    }

    pub fn spec(&self) -> Result<ProblemSpec> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(BenchError::Config(format!(
                "alpha = {} lies outside (0, 1]",
                self.alpha
            )));
        }
        match &self.problem {
            Problem::Builtin(ex) => ex.spec(self.alpha).map_err(|e| classify("problem", e)),
            Problem::Config(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
                // the command-line alpha wins over the file
                let text = format!("{text}\nalpha = {}\n", self.alpha);
                parse_config(&text).map_err(|e| classify(&path.display().to_string(), e))
            }
        }
    }

    fn zeta_points(&self, spec: &ProblemSpec) -> Result<Vec<f64>> {
        let d = spec.domain();
        let grid = self
            .zeta_grid
            .clone()
            .unwrap_or(ZetaGrid::Count(self.n.saturating_sub(1)));
        let points = match grid {
            ZetaGrid::Count(0) => return Err(BenchError::Config("zeta grid is empty".into())),
            ZetaGrid::Count(m) => (1..=m).map(|i| d.a + (d.b - d.a) * i as f64 / (m + 1) as f64).collect(),
            ZetaGrid::Points(p) if p.is_empty() => return Err(BenchError::Config("zeta grid is empty".into())),
            ZetaGrid::Points(p) => p,
        };
        if let Some(z) = points.iter().find(|&&z| !(d.a..=d.b).contains(&z)) {
            return Err(BenchError::Config(format!(
                "zeta = {z} lies outside [{}, {}]",
                d.a, d.b
            )));
        }
        Ok(points)
    }

    fn check_taus(&self, spec: &ProblemSpec) -> Result<()> {
        if self.taus.is_empty() {
            return Err(BenchError::Config("no tau values given".into()));
        }
        let t_max = spec.domain().t_max;
        match self.taus.iter().find(|&&t| !(0.0..=t_max).contains(&t)) {
            Some(t) => Err(BenchError::Config(format!("tau = {t} lies outside [0, {t_max}]"))),
            None => Ok(()),
        }
    }
}

/// Parses a real number or a fraction such as `5/6`.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.parse().map_err(|_| format!("{s:?} is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

pub fn parse_real_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_real).collect()
}

/// `"5"` is a count, `"0.1,0.5"` (or a single value with a point or slash) a list.
pub fn parse_grid(s: &str) -> std::result::Result<ZetaGrid, String> {
    match s.trim().parse::<usize>() {
        Ok(m) => Ok(ZetaGrid::Count(m)),
        Err(_) => parse_real_list(s).map(ZetaGrid::Points),
    }
}

/// `"5x1"` → `(5, 1)`.
pub fn parse_layout(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("layout {s:?} is not of the form NZxNT"))?;
    let nz = a.trim().parse().map_err(|_| format!("bad zeta count in {s:?}"))?;
    let nt = b.trim().parse().map_err(|_| format!("bad tau count in {s:?}"))?;
    Ok((nz, nt))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub zeta: f64,
    pub w_exact: f64,
    pub w_approx: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauTable {
    pub tau: f64,
    pub rows: Vec<TableRow>,
    pub l2: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub metadata: Metadata,
    pub tables: Vec<TauTable>,
}

pub struct Prepared {
    pub spec: ProblemSpec,
    pub scheme: String,
    pub layout: (usize, usize),
}

/// Validates the config and assembles everything short of solving.
pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let layout = cfg.layout()?;
    let spec = cfg.spec()?;
    let colloc =
        generate_collocation_ordered(layout.0, layout.1, cfg.ordering).map_err(|e| classify("collocation", e))?;
    Ok(Prepared {
        spec,
        scheme: colloc.scheme().to_string(),
        layout,
    })
}

pub fn metadata(cfg: &RunConfig, prepared: &Prepared) -> Metadata {
    let problem = match &cfg.problem {
        Problem::Builtin(_) => prepared.spec.name().to_string(),
        Problem::Config(path) => format!("{} ({})", prepared.spec.name(), path.display()),
    };
    vec![
        ("generator".into(), format!("tfbh-bench {VERSION}")),
        ("problem".into(), problem),
        ("n".into(), cfg.n.to_string()),
        ("alpha".into(), cfg.alpha.to_string()),
        ("collocation".into(), prepared.scheme.clone()),
        ("passes".into(), cfg.passes.to_string()),
        (
            "norms".into(),
            "one L2/Linf pair per tau over the zeta grid; L2 = sqrt(sum e_i^2)".into(),
        ),
    ]
}

pub fn solve_config(cfg: &RunConfig, prepared: &Prepared) -> Result<Solution> {
    let context = format!("{} n={} alpha={}", prepared.spec.name(), cfg.n, cfg.alpha);
    let hp = rescale_to_reference(&prepared.spec).map_err(|e| classify(&context, e))?;
    let colloc = generate_collocation_ordered(prepared.layout.0, prepared.layout.1, cfg.ordering)
        .map_err(|e| classify(&context, e))?;
    let basis = build_basis(&hp, colloc).map_err(|e| classify(&context, e))?;
    let options = SolveOptions { passes: cfg.passes };
    let (sol, _) = solve_with(&hp, basis, options).map_err(|e| classify(&context, e))?;
    Ok(sol)
}

fn exact_fn(cfg: &RunConfig, spec: &ProblemSpec) -> Result<Box<dyn Fn(f64, f64) -> f64>> {
    match cfg.problem {
        Problem::Builtin(ex) => Ok(Box::new(move |z, t| {
            builtin_exact(ex, (z, t)).expect("grid inside the unit square")
        })),
        Problem::Config(_) => {
            let exact = spec
                .exact()
                .cloned()
                .ok_or_else(|| BenchError::Config("the configured problem has no exact solution".into()))?;
            Ok(Box::new(move |z, t| exact(z, t)))
        }
    }
}

pub fn run_table(cfg: &RunConfig) -> Result<RunOutput> {
    let prepared = prepare(cfg)?;
    let zetas = cfg.zeta_points(&prepared.spec)?;
    cfg.check_taus(&prepared.spec)?;
    let exact = exact_fn(cfg, &prepared.spec)?;
    let sol = solve_config(cfg, &prepared)?;
    let mut tables = Vec::with_capacity(cfg.taus.len());
    for &tau in &cfg.taus {
        let norms = error_norms(&sol, &*exact, tau, &zetas).map_err(|e| classify("evaluation", e))?;
        let rows = zetas
            .iter()
            .map(|&zeta| {
                let w_exact = exact(zeta, tau);
                let w_approx = sol.evaluate(zeta, tau).map_err(|e| classify("evaluation", e))?;
                Ok(TableRow {
                    zeta,
                    w_exact,
                    w_approx,
                    abs_error: (w_exact - w_approx).abs(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(TauTable {
            tau,
            rows,
            l2: norms.l2,
            linf: norms.linf,
        });
    }
    Ok(RunOutput {
        metadata: metadata(cfg, &prepared),
        tables,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub zeta: f64,
    pub tau: f64,
    pub w_exact: f64,
    pub w_approx: f64,
    pub error: f64,
}

/// `density × density` samples including the domain edges; τ outer, ζ inner.
pub fn emit_surface(cfg: &RunConfig, density: usize) -> Result<(Metadata, Vec<SurfaceRow>)> {
    if density < 2 {
        return Err(BenchError::Config(format!(
            "surface density {density} must be at least 2"
        )));
    }
    let prepared = prepare(cfg)?;
    let exact = exact_fn(cfg, &prepared.spec)?;
    let sol = solve_config(cfg, &prepared)?;
    let d = *prepared.spec.domain();
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (density - 1) as f64;
    let mut rows = Vec::with_capacity(density * density);
    for j in 0..density {
        let tau = step(0.0, d.t_max, j);
        for i in 0..density {
            let zeta = step(d.a, d.b, i);
            let w_exact = exact(zeta, tau);
            let w_approx = sol.evaluate(zeta, tau).map_err(|e| classify("evaluation", e))?;
            rows.push(SurfaceRow {
                zeta,
                tau,
                w_exact,
                w_approx,
                error: (w_exact - w_approx).abs(),
            });
        }
    }
    let mut meta = metadata(cfg, &prepared);
    meta.push(("surface".into(), format!("{density}x{density}, tau outer, zeta inner")));
    Ok((meta, rows))
}

pub fn write_metadata(out: &mut impl Write, meta: &[(String, String)]) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

pub fn write_table(out: &mut impl Write, run: &RunOutput, format: Format) -> io::Result<()> {
    write_metadata(out, &run.metadata)?;
    match format {
        Format::Csv => {
            writeln!(out, "tau,zeta,w_exact,w_approx,abs_error")?;
            for t in &run.tables {
                for r in &t.rows {
                    writeln!(
                        out,
                        "{:.9},{:.9},{:.9},{:.9},{:.6e}",
                        t.tau, r.zeta, r.w_exact, r.w_approx, r.abs_error
                    )?;
                }
            }
        }
        Format::Pretty => {
            for t in &run.tables {
                writeln!(out)?;
                writeln!(out, "tau = {:.6}", t.tau)?;
                writeln!(
                    out,
                    "{:>10}  {:>12}  {:>12}  {:>12}",
                    "zeta", "exact", "approx", "abs error"
                )?;
                for r in &t.rows {
                    writeln!(
                        out,
                        "{:>10.6}  {:>12.6}  {:>12.6}  {:>12.5e}",
                        r.zeta, r.w_exact, r.w_approx, r.abs_error
                    )?;
                }
                writeln!(out, "L2 = {:.5e}  Linf = {:.5e}", t.l2, t.linf)?;
            }
        }
    }
    Ok(())
}

pub fn write_norms(out: &mut impl Write, run: &RunOutput) -> io::Result<()> {
    write_metadata(out, &run.metadata)?;
    writeln!(out, "tau,l2,linf")?;
    for t in &run.tables {
        writeln!(out, "{:.9},{:.6e},{:.6e}", t.tau, t.l2, t.linf)?;
    }
    Ok(())
}

pub fn write_surface(out: &mut impl Write, meta: &[(String, String)], rows: &[SurfaceRow]) -> io::Result<()> {
    write_metadata(out, meta)?;
    writeln!(out, "zeta,tau,w_exact,w_approx,error")?;
    for r in rows {
        writeln!(
            out,
            "{:.9},{:.9},{:.9},{:.9},{:.6e}",
            r.zeta, r.tau, r.w_exact, r.w_approx, r.error
        )?;
    }
    Ok(())
}

/// `out.csv` → `out.norms.csv`; `out` → `out.norms.csv`.
pub fn norms_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.norms.csv"))
}

/// Inserts `_alpha<value>` before the extension, for multi-α runs.
pub fn alpha_path(out: &Path, alpha: f64) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut name = String::new();
    let _ = write!(name, "{stem}_alpha{alpha}");
    if let Some(ext) = out.extension() {
        let _ = write!(name, ".{}", ext.to_string_lossy());
    }
    out.with_file_name(name)
}

pub fn write_file(path: &Path, render: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    render(&mut buf).map_err(|e| BenchError::io(path, e))?;
    std::fs::write(path, buf).map_err(|e| BenchError::io(path, e))
}
