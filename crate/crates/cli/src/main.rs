//! `divergent`: Borel resummation, optimal truncation and the unfolded
//! Euler equation from the command line.
//!
//! Exit status: 0 on success, 2 when an argument is rejected, 1 when a
//! computation fails (with a one-line diagnostic on stderr).

mod expr;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use divergent_core::axioms::{run_axiom_suite, AxiomConfig, AxiomReport};
use divergent_core::borel::{
    borel_sum, borel_sum_power_series, detect_stokes, stokes_jump, StokesJump, StokesReport, SummationResult,
};
use divergent_core::series::generalized_euler_coeffs;
use divergent_core::truncation::{
    optimal_k, superasymptotic_estimate, truncation_sweep, write_truncation_csv, TruncationReport,
};
use divergent_core::unfolding::{
    connection_coefficient_on, unfolding_sweep, write_sweep_csv, ApproachRule, ConnectionReport, PathSide, SweepRow,
    UnfoldingConfig,
};
use divergent_core::{euler_exact, euler_formal_coeffs, Error, EulerMethod, FormalSeries, Ray, Result};

use expr::Polynomial;

const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_ORDER: usize = 24;

#[derive(Parser, Debug)]
#[command(
    name = "divergent",
    version,
    about = "Summation of divergent series: the Euler series sum (-1)^n n! x^(n+1), \
             its Borel sum, optimal truncation and the unfolding (x^2 - eps) y' + y = g(x)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact solution of x^2 y' + y = x next to its optimally truncated and Borel-summed series.
    ///
    /// The exact value is computed twice: as e^(1/x) int_0^x e^(-1/t)/t dt and as the Laplace
    /// integral int_0^inf e^(-zeta/x)/(1+zeta) dzeta. The series sum (-1)^n n! x^(n+1) is
    /// truncated where k! x^(k+1) is smallest and, separately, Borel-summed along zeta > 0.
    EulerTable(EulerTableArgs),
    /// Partial sums f_k(x) = sum_{n<k} (-1)^n n! x^(n+1) against the bound |f - f_k| <= k! x^(k+1).
    ///
    /// Each row also carries the remainder R_k(x) = (-1)^k int_0^inf zeta^k e^(-zeta/x)/(1+zeta) dzeta,
    /// evaluated by its own quadrature.
    Truncate(TruncateArgs),
    /// Borel-Laplace sum S(x) = int_0^(inf e^(i theta)) B(zeta) e^(-zeta/x) dzeta.
    ///
    /// By default the summed series is the Euler series, the formal solution of x^2 y' + y = x.
    /// With --g it is the formal power-series solution of x^2 y' + y = g(x) with g(0) = 0.
    /// B is the Borel transform sum a_n zeta^n / n!, continued beyond its disc of convergence
    /// by a Pade approximant.
    BorelSum(BorelSumArgs),
    /// Singularities of the Borel transform and the exceptional directions through them.
    ///
    /// With --jump-x, also the difference S_(theta+)(x) - S_(theta-)(x) of the Borel sums on the
    /// two sides of the first exceptional direction; for the Euler series it is 2 pi i e^(1/x).
    Stokes(StokesArgs),
    /// Check the summation properties: agreement with convergent sums, linearity, absolute
    /// summability, products, the shift sum a_n = a_0 + x sum a_(n+1), and termwise derivatives.
    Axioms(AxiomsArgs),
    /// Connection coefficient of (x^2 - eps) y' + y = g(x) between x = sqrt(eps) and x = -sqrt(eps).
    ///
    /// The solution analytic at sqrt(eps) is continued to -sqrt(eps), where it equals the local
    /// analytic solution plus C2 exp((log(x + sqrt(eps)) - log(x - sqrt(eps))) / (2 sqrt(eps))).
    /// Fails when 1/(2 sqrt(eps)) is a positive integer and the local series at -sqrt(eps) does
    /// not exist.
    Unfold(UnfoldArgs),
    /// C2 of (x^2 - eps) y' + y = g(x) over a range of eps (g may contain eps).
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; "-" is standard output.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct EulerTableArgs {
    /// Smallest x.
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    x_min: f64,
    /// Largest x.
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    x_max: f64,
    /// Number of equally spaced points.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Coefficients used by the Borel sum.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TruncateArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Largest truncation index k.
    #[arg(long, default_value_t = 30)]
    k_max: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Forcing {
    /// Right-hand side g(x) as a sum of monomials, e.g. "x + x^2 - eps" or "1/3*x^2".
    #[arg(long, conflicts_with = "g_file")]
    g: Option<String>,
    /// Right-hand side as a JSON series {"offset": 0, "re": [...], "im": [...], "label": "..."}.
    #[arg(long)]
    g_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BorelSumArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Imaginary part of x.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    x_im: f64,
    /// Direction of the Laplace ray.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Number of series coefficients used.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    forcing: Forcing,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct StokesArgs {
    /// Number of series coefficients used.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Also compute the jump across the first exceptional direction at this x.
    #[arg(long, allow_negative_numbers = true)]
    jump_x: Option<f64>,
    /// Angular distance of the two rays from the exceptional direction.
    #[arg(long, default_value_t = 0.3)]
    half_width: f64,
    /// Quadrature tolerance of the jump.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    forcing: Forcing,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct AxiomsArgs {
    /// Random instances per property.
    #[arg(long, default_value_t = AxiomConfig::default().instances)]
    instances: usize,
    /// Number of terms of every series.
    #[arg(long, default_value_t = AxiomConfig::default().order)]
    order: usize,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = AxiomConfig::default().tol)]
    tol: f64,
    /// Seed of the random instances.
    #[arg(long, default_value_t = AxiomConfig::default().seed)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Below,
    Above,
}

#[derive(Args, Debug)]
struct UnfoldArgs {
    #[arg(long)]
    eps: f64,
    /// Order of the local series at +-sqrt(eps).
    #[arg(long, default_value_t = 60)]
    order: usize,
    /// Radius of the circle around -sqrt(eps) on which C2 is fitted: "c*sqrt(eps)" or a number.
    #[arg(long, default_value = "0.5*sqrt(eps)")]
    radius: String,
    /// Half-plane in which the path passes from sqrt(eps) to -sqrt(eps).
    #[arg(long, value_enum, default_value_t = Side::Below)]
    side: Side,
    /// Local error per unit length of the path integration.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    forcing: Forcing,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Explicit eps values, comma-separated (overrides the range).
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    eps_min: f64,
    #[arg(long, default_value_t = 0.2)]
    eps_max: f64,
    /// Number of equally spaced eps values.
    #[arg(long, default_value_t = 20)]
    steps: usize,
    /// Order of the local series.
    #[arg(long, default_value_t = 60)]
    order: usize,
    /// Radius rule around -sqrt(eps): "c*sqrt(eps)" or a number.
    #[arg(long, default_value = "0.5*sqrt(eps)")]
    radius: String,
    #[command(flatten)]
    forcing: Forcing,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::EulerTable(a) => euler_table(a),
        Command::Truncate(a) => truncate(a),
        Command::BorelSum(a) => borel_sum_cmd(a),
        Command::Stokes(a) => stokes(a),
        Command::Axioms(a) => axioms(a),
        Command::Unfold(a) => unfold(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn config(msg: String) -> Error {
    Error::Configuration(msg)
}

impl Output {
    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    /// Renders into memory first so that a failed computation never leaves a
    /// truncated file behind.
    fn emit(&self, render: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        render(&mut buf)?;
        if self.out == "-" {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(&buf).and_then(|_| lock.flush()).map_err(io_err)
        } else {
            let mut f = BufWriter::new(File::create(&self.out).map_err(|e| io_err(format!("{}: {e}", self.out)))?);
            f.write_all(&buf).and_then(|_| f.flush()).map_err(io_err)
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<()> {
        self.emit(|buf| {
            serde_json::to_writer_pretty(&mut *buf, value).map_err(io_err)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    fn csv<R: IntoIterator<Item = Vec<String>>>(&self, header: &[&str], rows: R) -> Result<()> {
        self.emit(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(header).map_err(io_err)?;
            for r in rows {
                w.write_record(&r).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        })
    }
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(config(format!("--tol must be positive, got {tol}")))
    }
}

/// The forcing as a polynomial (or fixed series) in x, evaluated at `eps`.
enum Rhs {
    Expr(Polynomial),
    File(FormalSeries),
}

impl Rhs {
    fn from(f: &Forcing) -> Result<Option<Rhs>> {
        match (&f.g, &f.g_file) {
            (Some(text), _) => Ok(Some(Rhs::Expr(Polynomial::parse(text)?))),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
                let s: FormalSeries =
                    serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))?;
                Ok(Some(Rhs::File(s)))
            }
            (None, None) => Ok(None),
        }
    }

    fn uses_eps(&self) -> bool {
        matches!(self, Rhs::Expr(p) if p.uses_eps())
    }

    /// Coefficients `g_0..g_order` (a file series is zero-padded; it must
    /// not be longer than needed with nonzero tail).
    fn series(&self, eps: f64, order: usize) -> Result<FormalSeries> {
        match self {
            Rhs::Expr(p) => p.series(eps, order),
            Rhs::File(s) => {
                if s.order() >= order {
                    Ok(s.clone())
                } else {
                    FormalSeries::polynomial(s.offset(), s.coeffs(), order, s.label())
                }
            }
        }
    }
}

/// The series solved in the Borel plane: Euler's by default, otherwise the
/// formal solution of `x^2 y' + y = g`.
fn formal_solution(forcing: &Forcing, order: usize) -> Result<Option<FormalSeries>> {
    match Rhs::from(forcing)? {
        None => Ok(None),
        Some(rhs) => {
            if rhs.uses_eps() {
                return Err(config(
                    "g may only contain eps in the unfold and sweep subcommands".into(),
                ));
            }
            let g = rhs.series(0.0, order)?;
            generalized_euler_coeffs(&g, order).map(Some)
        }
    }
}

#[derive(Serialize)]
struct EulerRow {
    x: f64,
    direct: f64,
    laplace: f64,
    optimal_k: usize,
    optimal_truncation: f64,
    truncation_error: f64,
    superasymptotic: f64,
    borel_sum: f64,
    borel_error: f64,
}

fn euler_table(a: EulerTableArgs) -> Result<()> {
    check_tol(a.tol)?;
    if a.steps == 0 || !(a.x_min > 0.0 && a.x_min <= a.x_max && a.x_max.is_finite()) {
        return Err(config(format!(
            "need 0 < x-min <= x-max and steps >= 1, got [{}, {}] with {} steps",
            a.x_min, a.x_max, a.steps
        )));
    }
    let s = euler_formal_coeffs(a.order)?;
    let xs: Vec<f64> = if a.steps == 1 {
        vec![a.x_min]
    } else {
        (0..a.steps)
            .map(|i| a.x_min + (a.x_max - a.x_min) * i as f64 / (a.steps - 1) as f64)
            .collect()
    };
    let mut rows = Vec::with_capacity(xs.len());
    for x in xs {
        let z = Complex64::new(x, 0.0);
        let direct = euler_exact(z, EulerMethod::Direct, a.tol)?.value.re;
        let laplace = euler_exact(z, EulerMethod::Laplace, a.tol)?.value.re;
        let k = optimal_k(x)?;
        let partial = euler_formal_coeffs(k)?.eval_partial_sum(z, k)?.re;
        let sum = borel_sum(&s, z, Ray::new(0.0), a.order, a.tol)?.value.re;
        rows.push(EulerRow {
            x,
            direct,
            laplace,
            optimal_k: k,
            optimal_truncation: partial,
            truncation_error: (partial - laplace).abs(),
            superasymptotic: superasymptotic_estimate(x)?,
            borel_sum: sum,
            borel_error: (sum - laplace).abs(),
        });
    }
    match a.output.format(Format::Csv) {
        Format::Json => a
            .output
            .json(&serde_json::json!({ "order": a.order, "tol": a.tol, "rows": rows })),
        Format::Csv => a.output.csv(
            &[
                "x",
                "direct",
                "laplace",
                "optimal_k",
                "optimal_truncation",
                "truncation_error",
                "superasymptotic",
                "borel_sum",
                "borel_error",
            ],
            rows.iter().map(|r| {
                vec![
                    sci(r.x),
                    sci(r.direct),
                    sci(r.laplace),
                    r.optimal_k.to_string(),
                    sci(r.optimal_truncation),
                    sci(r.truncation_error),
                    sci(r.superasymptotic),
                    sci(r.borel_sum),
                    sci(r.borel_error),
                ]
            }),
        ),
    }
}

#[derive(Serialize)]
struct TruncateOutput<'a> {
    x: f64,
    optimal_k: usize,
    rows: &'a [TruncationReport],
}

fn truncate(a: TruncateArgs) -> Result<()> {
    let rows = truncation_sweep(a.x, a.k_max)?;
    match a.output.format(Format::Csv) {
        Format::Csv => a.output.emit(|buf| write_truncation_csv(&rows, buf)),
        Format::Json => a.output.json(&TruncateOutput {
            x: a.x,
            optimal_k: optimal_k(a.x)?,
            rows: &rows,
        }),
    }
}

#[derive(Serialize)]
struct BorelSumOutput {
    series: String,
    #[serde(with = "pair")]
    x: Complex64,
    order: usize,
    tol: f64,
    #[serde(flatten)]
    result: SummationResult,
}

mod pair {
    use num_complex::Complex64;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&[z.re, z.im], s)
    }
}

fn borel_sum_cmd(a: BorelSumArgs) -> Result<()> {
    check_tol(a.tol)?;
    let x = Complex64::new(a.x, a.x_im);
    let ray = Ray::new(a.theta);
    let (series, result) = match formal_solution(&a.forcing, a.order)? {
        Some(s) => (
            s.label().to_string(),
            borel_sum_power_series(&s, x, ray, a.order, a.tol)?,
        ),
        None => {
            let s = euler_formal_coeffs(a.order)?;
            (s.label().to_string(), borel_sum(&s, x, ray, a.order, a.tol)?)
        }
    };
    let out = BorelSumOutput {
        series,
        x,
        order: a.order,
        tol: a.tol,
        result,
    };
    match a.output.format(Format::Json) {
        Format::Json => a.output.json(&out),
        Format::Csv => a.output.csv(
            &[
                "x_re",
                "x_im",
                "theta",
                "value_re",
                "value_im",
                "err_estimate",
                "pade_l",
                "pade_m",
            ],
            [vec![
                sci(x.re),
                sci(x.im),
                sci(out.result.direction.theta()),
                sci(out.result.value.re),
                sci(out.result.value.im),
                sci(out.result.err_estimate),
                out.result.pade_order.0.to_string(),
                out.result.pade_order.1.to_string(),
            ]],
        ),
    }
}

#[derive(Serialize)]
struct StokesOutput {
    series: String,
    order: usize,
    #[serde(flatten)]
    report: StokesReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    jump: Option<StokesJump>,
}

fn stokes(a: StokesArgs) -> Result<()> {
    let s = match formal_solution(&a.forcing, a.order)? {
        // the constant term does not enter the Borel transform
        Some(s) => FormalSeries::new(1, s.coeffs()[1..].to_vec(), s.label())?,
        None => euler_formal_coeffs(a.order)?,
    };
    let order = s.order().min(a.order);
    let report = detect_stokes(&s.borel_transform()?, order)?;
    let jump = match a.jump_x {
        None => None,
        Some(x) => {
            check_tol(a.tol)?;
            if !(a.half_width > 0.0 && a.half_width < std::f64::consts::PI) {
                return Err(config(format!(
                    "--half-width must lie in (0, pi), got {}",
                    a.half_width
                )));
            }
            let dir = report
                .exceptional_directions
                .first()
                .ok_or_else(|| Error::NotSummable("no exceptional direction to cross".into()))?;
            let (lo, hi) = (
                Ray::new(dir.theta() - a.half_width),
                Ray::new(dir.theta() + a.half_width),
            );
            Some(stokes_jump(&s, Complex64::new(x, 0.0), lo, hi, order, a.tol)?)
        }
    };
    let out = StokesOutput {
        series: s.label().to_string(),
        order,
        report,
        jump,
    };
    match a.output.format(Format::Csv) {
        Format::Json => a.output.json(&out),
        Format::Csv => {
            let mut header = vec!["re", "im", "theta"];
            if out.jump.is_some() {
                header.extend(["jump_re", "jump_im", "jump_err"]);
            }
            let rows = out.report.singularities.iter().enumerate().map(|(i, p)| {
                let mut row = vec![sci(p.re), sci(p.im), sci(Ray::through(*p).theta())];
                if let Some(j) = &out.jump {
                    if i == 0 {
                        row.extend([sci(j.value.re), sci(j.value.im), sci(j.err_estimate)]);
                    } else {
                        row.extend([String::new(), String::new(), String::new()]);
                    }
                }
                row
            });
            a.output.csv(&header, rows.collect::<Vec<_>>())
        }
    }
}

fn axioms(a: AxiomsArgs) -> Result<()> {
    let cfg = AxiomConfig {
        instances: a.instances,
        order: a.order,
        tol: a.tol,
        seed: a.seed,
    };
    let report: AxiomReport = run_axiom_suite(&cfg)?;
    match a.output.format(Format::Csv) {
        Format::Json => a.output.json(&report)?,
        Format::Csv => {
            let props = report.properties.iter().map(|p| {
                vec![
                    format!("({})", p.id),
                    p.name.clone(),
                    p.instances.to_string(),
                    sci(p.max_deviation),
                    sci(p.tolerance),
                    if p.pass { "pass" } else { "FAIL" }.into(),
                ]
            });
            let anchors = report.anchors.iter().map(|an| {
                vec![
                    "anchor".into(),
                    an.label.clone(),
                    "1".into(),
                    sci(an.deviation),
                    sci(an.tolerance),
                    if an.pass { "pass" } else { "FAIL" }.into(),
                ]
            });
            a.output.csv(
                &["property", "name", "instances", "max_deviation", "tolerance", "result"],
                props.chain(anchors).collect::<Vec<_>>(),
            )?;
        }
    }
    if report.all_pass {
        Ok(())
    } else {
        Err(Error::NotSummable(format!(
            "summation properties violated (seed {})",
            report.config.seed
        )))
    }
}

fn forcing_or_default(f: &Forcing) -> Result<Rhs> {
    Ok(Rhs::from(f)?.unwrap_or_else(|| Rhs::Expr(Polynomial::parse("x").expect("literal"))))
}

fn unfold(a: UnfoldArgs) -> Result<()> {
    check_tol(a.tol)?;
    let rule: ApproachRule = a.radius.parse()?;
    let rhs = forcing_or_default(&a.forcing)?;
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(Error::Precondition(format!("eps must be positive, got {}", a.eps)));
    }
    let mut cfg = UnfoldingConfig::new(a.eps, rhs.series(a.eps, 0)?)?.with_order(a.order);
    cfg.tol = a.tol;
    let side = match a.side {
        Side::Below => PathSide::Below,
        Side::Above => PathSide::Above,
    };
    let report: ConnectionReport = connection_coefficient_on(&cfg, rule.radius(a.eps), side)?;
    match a.output.format(Format::Json) {
        Format::Json => a.output.json(&report),
        Format::Csv => a.output.csv(
            &["eps", "C2_re", "C2_im", "abs_C2", "fit_residual", "approach_radius"],
            [vec![
                sci(report.eps),
                sci(report.c2.re),
                sci(report.c2.im),
                sci(report.c2.norm()),
                sci(report.fit_residual),
                sci(report.approach_radius),
            ]],
        ),
    }
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    g: String,
    radius: ApproachRule,
    order: usize,
    rows: &'a [SweepRow],
}

fn sweep(a: SweepArgs) -> Result<()> {
    let rule: ApproachRule = a.radius.parse()?;
    let rhs = forcing_or_default(&a.forcing)?;
    let eps: Vec<f64> = if !a.eps.is_empty() {
        a.eps.clone()
    } else {
        if a.steps == 0 || !(a.eps_min > 0.0 && a.eps_min <= a.eps_max && a.eps_max.is_finite()) {
            return Err(config(format!(
                "need 0 < eps-min <= eps-max and steps >= 1, got [{}, {}] with {} steps",
                a.eps_min, a.eps_max, a.steps
            )));
        }
        if a.steps == 1 {
            vec![a.eps_min]
        } else {
            (0..a.steps)
                .map(|i| a.eps_min + (a.eps_max - a.eps_min) * i as f64 / (a.steps - 1) as f64)
                .collect()
        }
    };
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Precondition(format!("eps must be positive, got {bad}")));
    }
    let label = rhs.series(0.0, 0)?.label().to_string();
    let rows = unfolding_sweep(|e| rhs.series(e, 0), &eps, rule, a.order);
    match a.output.format(Format::Csv) {
        Format::Csv => a.output.emit(|buf| write_sweep_csv(&rows, buf)),
        Format::Json => a.output.json(&SweepOutput {
            g: label,
            radius: rule,
            order: a.order,
            rows: &rows,
        }),
    }
}
