//! Command line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rodrigues_core::curves::{branch_points, saddle_curve, scaled_symbol_curve, symbol_curve};
use rodrigues_core::odes::limit_symbol;
use rodrigues_core::parse::{alpha_in_range, parse_poly, parse_rational};
use rodrigues_core::rootfind::{empirical_measure, hull_containment, RootFinderConfig};
use rodrigues_core::saddleflow::PhaseField;
use rodrigues_core::trace::{extract_support, Window};
use rodrigues_core::{Complex64, ExactPoly, Rational};
use serde_json::{json, Value};

use crate::format::{self, json_num, PointKind};
use crate::parallel::{self, set_workers};
use crate::svg;
use crate::verify::{self, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rodrigues", version, about = "Rodrigues descendants, their root asymptotics and verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Root finding is seeded by `--seed`, so every command is
/// deterministic given its flags.
#[derive(Args, Debug, Clone)]
struct Common {
    /// Polynomial: `z^2 - 1` or a coefficient list `[-1, 0, 1]`, low degree first
    #[arg(short = 'P', long = "poly")]
    poly: Option<String>,
    /// Exponent ratio as `p/q`
    #[arg(long)]
    alpha: Option<String>,
    #[arg(short = 'n', long = "n")]
    n: Option<u32>,
    #[arg(short = 'm', long = "m")]
    m: Option<usize>,
    /// `re_min,re_max,im_min,im_max`
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// `nx,ny`
    #[arg(long)]
    res: Option<String>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Initial working precision of the root finder in bits
    #[arg(long)]
    precision: Option<u32>,
    /// Directory for output files; without it the main output goes to stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: logical cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    Symbol,
    Scaled,
    Saddle,
    Limit,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Ode,
    Boutroux,
    Quadratic,
    Trace,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact coefficients of the m-th derivative of P^n
    Descend {
        #[command(flatten)]
        c: Common,
        /// Also find the roots
        #[arg(long)]
        roots: bool,
    },
    /// Roots of P, or of a descendant when -n/-m are given, as CSV
    Roots {
        #[command(flatten)]
        c: Common,
    },
    /// Union of the roots of all descendants m = 0..n·deg P - 1
    Shadow {
        #[command(flatten)]
        c: Common,
    },
    /// Symbol, scaled, saddle-point or limit curve as JSON
    Symbol {
        #[command(flatten)]
        c: Common,
        #[arg(long, value_enum, default_value_t = CurveKind::Symbol)]
        curve: CurveKind,
    },
    /// Branch points of the saddle-point curve
    BranchPoints {
        #[command(flatten)]
        c: Common,
    },
    /// Predicted potential and Cauchy transform on a grid
    Trace {
        #[command(flatten)]
        c: Common,
        /// Dump the classified saddle fiber at `re,im` instead of a grid
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Support of the limit measure as polylines and point masses
    Support {
        #[command(flatten)]
        c: Common,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        c: Common,
        /// Degree of the random polynomial for `ode` when -P is absent
        #[arg(long, default_value_t = 3)]
        deg: usize,
    },
    /// Render a CSV (points or field) or support JSON file as SVG
    Plot {
        #[command(flatten)]
        c: Common,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(s) | CliError::Numeric(s) | CliError::Io(s) => s,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

fn io(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

type Res<T> = Result<T, CliError>;

/// Output sink: stdout text plus files under `--out`.
pub struct Output<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

impl Common {
    fn poly(&self) -> Res<ExactPoly> {
        let s = self.poly.as_deref().ok_or_else(|| usage("missing -P <polynomial>"))?;
        let p = parse_poly(s).map_err(usage)?;
        if p.is_zero() {
            return Err(usage("P must be nonzero"));
        }
        Ok(p)
    }

    fn poly_deg(&self, min: usize) -> Res<(ExactPoly, usize)> {
        let p = self.poly()?;
        let d = p.degree().unwrap_or(0);
        if d < min {
            return Err(usage(format!("P must have degree at least {}", min)));
        }
        Ok((p, d))
    }

    fn alpha(&self, d: usize) -> Res<Rational> {
        let s = self.alpha.as_deref().ok_or_else(|| usage("missing --alpha p/q"))?;
        let a = parse_rational(s).map_err(usage)?;
        if !alpha_in_range(&a, d) {
            return Err(usage(format!("alpha must satisfy 0 < alpha < {}", d)));
        }
        Ok(a)
    }

    fn n(&self) -> Res<u32> {
        let n = self.n.ok_or_else(|| usage("missing -n"))?;
        if n == 0 {
            return Err(usage("n must be at least 1"));
        }
        Ok(n)
    }

    fn window(&self) -> Res<Option<Window>> {
        let s = match self.window.as_deref() {
            None => return Ok(None),
            Some(s) if s.trim().is_empty() => return Ok(None),
            Some(s) => s,
        };
        let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(usage)?;
        if v.len() != 4 || !v.iter().all(|x| x.is_finite()) || v[0] >= v[1] || v[2] >= v[3] {
            return Err(usage("--window expects re_min,re_max,im_min,im_max with min < max"));
        }
        Ok(Some(Window::new(v[0], v[1], v[2], v[3])))
    }

    fn res(&self, default: usize) -> Res<(usize, usize)> {
        let s = match self.res.as_deref() {
            None => return Ok((default, default)),
            Some(s) => s,
        };
        let v: Vec<usize> = s.split(',').map(|t| t.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(usage)?;
        match v.as_slice() {
            [nx, ny] if *nx >= 2 && *ny >= 2 => Ok((*nx, *ny)),
            _ => Err(usage("--res expects nx,ny with both at least 2")),
        }
    }

    fn root_config(&self) -> RootFinderConfig {
        let mut cfg = RootFinderConfig { seed: self.seed, ..RootFinderConfig::default() };
        if let Some(b) = self.precision {
            cfg.initial_bits = b.max(64);
            cfg.max_bits = cfg.max_bits.max(cfg.initial_bits);
        }
        cfg
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Res<()> {
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(name), text).map_err(io)
}

fn println(out: &mut Output<'_>, text: &str) -> Res<()> {
    out.stdout.write_all(text.as_bytes()).map_err(io)?;
    if !text.ends_with('\n') {
        out.stdout.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

/// Entry point; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut Output<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let sink = if e.use_stderr() { &mut *out.stderr } else { &mut *out.stdout };
            let _ = sink.write_all(text.as_bytes());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out.stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut Output<'_>) -> Res<i32> {
    let workers = match &cmd {
        Command::Descend { c, .. }
        | Command::Roots { c }
        | Command::Shadow { c }
        | Command::Symbol { c, .. }
        | Command::BranchPoints { c }
        | Command::Trace { c, .. }
        | Command::Support { c }
        | Command::Verify { c, .. }
        | Command::Plot { c, .. } => c.workers,
    };
    set_workers(workers);
    match cmd {
        Command::Descend { c, roots } => cmd_descend(&c, roots, out),
        Command::Roots { c } => cmd_roots(&c, out),
        Command::Shadow { c } => cmd_shadow(&c, out),
        Command::Symbol { c, curve } => cmd_symbol(&c, curve, out),
        Command::BranchPoints { c } => cmd_branch_points(&c, out),
        Command::Trace { c, at } => cmd_trace(&c, at.as_deref(), out),
        Command::Support { c } => cmd_support(&c, out),
        Command::Verify { suite, c, deg } => cmd_verify(suite, &c, deg, out),
        Command::Plot { c, input } => cmd_plot(&c, &input, out),
    }
}

fn cmd_descend(c: &Common, with_roots: bool, out: &mut Output<'_>) -> Res<i32> {
    let p = c.poly()?;
    let n = c.n()?;
    let m = c.m.unwrap_or(0);
    let r = parallel::descendant(&p, n, m);
    let mut doc = json!({"n": n, "m": m, "degree": r.degree(), "coeffs": format::poly_json(&r)["coeffs"].clone()});
    let mut files = Vec::new();
    if with_roots {
        let set = parallel::descendant_roots(&p, n, m, &c.root_config()).map_err(numeric)?;
        doc["roots"] = json!({
            "count": set.roots.len(),
            "residual_bound": json_num(set.residual_bound),
            "in_hull": hull_containment(&set, &p, verify::HULL_TOL),
        });
        let d = p.degree().unwrap_or(0);
        let a = Rational::new((m as i64).into(), (n as i64).into());
        let branch = if d >= 2 && alpha_in_range(&a, d) { branch_points(&p, &a).map_err(numeric)? } else { Vec::new() };
        let pts = format::points_csv(&points_with_p(&p, &set.roots, &branch)?);
        let back = format::read_points_csv(&pts).map_err(numeric)?;
        files.push(("roots.csv", format::roots_csv(&set.roots)));
        files.push(("roots.svg", svg::render_points(&back, c.window()?)));
        files.push(("points.csv", pts));
    }
    let text = pretty(&doc);
    if let Some(dir) = &c.out {
        write_file(dir, "descendant.json", &text)?;
        for (name, body) in &files {
            write_file(dir, name, body)?;
        }
    }
    println(out, &text)?;
    Ok(EXIT_OK)
}

/// Descendant roots tagged together with the roots of `P`, its centre of mass and the
/// given branch points.
fn points_with_p(p: &ExactPoly, roots: &[Complex64], branch: &[Complex64]) -> Res<Vec<(Complex64, PointKind)>> {
    let mut pts: Vec<(Complex64, PointKind)> = roots.iter().map(|z| (*z, PointKind::Descendant)).collect();
    pts.extend(branch.iter().map(|z| (*z, PointKind::Branch)));
    if p.degree().unwrap_or(0) >= 1 {
        let pr = rodrigues_core::rootfind::find_roots(p, 1e-14).map_err(numeric)?;
        pts.extend(pr.roots.iter().map(|z| (*z, PointKind::Root)));
    }
    if let Some(cm) = parallel::center_of_mass(p) {
        pts.push((cm, PointKind::Center));
    }
    Ok(pts)
}

fn cmd_roots(c: &Common, out: &mut Output<'_>) -> Res<i32> {
    let p = c.poly()?;
    let n = c.n.unwrap_or(1).max(1);
    let m = c.m.unwrap_or(0);
    let set = parallel::descendant_roots(&p, n, m, &c.root_config()).map_err(numeric)?;
    let csv = format::roots_csv(&set.roots);
    match &c.out {
        Some(dir) => {
            write_file(dir, "roots.csv", &csv)?;
            let pts = format::read_points_csv(&csv).map_err(numeric)?;
            write_file(dir, "roots.svg", &svg::render_points(&pts, c.window()?))?;
            let meas = empirical_measure(&set).map_err(numeric)?;
            write_file(dir, "measure.json", &pretty(&format::measure_json(&meas)))?;
            let _ = writeln!(out.stderr, "{} roots written to {}", set.roots.len(), dir.display());
        }
        None => println(out, &csv)?,
    }
    Ok(EXIT_OK)
}

fn cmd_shadow(c: &Common, out: &mut Output<'_>) -> Res<i32> {
    let (p, d) = c.poly_deg(1)?;
    let n = c.n()?;
    let sets = parallel::shadow_roots(&p, n, &c.root_config()).map_err(numeric)?;
    let all: Vec<Complex64> = sets.iter().flat_map(|s| s.roots.iter().copied()).collect();
    let mut branch = Vec::new();
    if d >= 2 {
        for m in 1..n as usize * d {
            let a = Rational::new((m as i64).into(), (n as i64).into());
            branch.extend(branch_points(&p, &a).map_err(numeric)?);
        }
    }
    let pts = points_with_p(&p, &all, &branch)?;
    let csv = format::points_csv(&pts);
    match &c.out {
        Some(dir) => {
            write_file(dir, "shadow.csv", &csv)?;
            let back = format::read_points_csv(&csv).map_err(numeric)?;
            write_file(dir, "shadow.svg", &svg::render_points(&back, c.window()?))?;
            let _ = writeln!(out.stderr, "{} descendant roots from {} descendants", all.len(), sets.len());
        }
        None => println(out, &csv)?,
    }
    Ok(EXIT_OK)
}

fn cmd_symbol(c: &Common, kind: CurveKind, out: &mut Output<'_>) -> Res<i32> {
    let (p, d) = c.poly_deg(2)?;
    let a = c.alpha(d)?;
    let curve = match kind {
        CurveKind::Symbol => symbol_curve(&p, &a).map_err(numeric)?,
        CurveKind::Scaled => scaled_symbol_curve(&p, &a).map_err(numeric)?,
        CurveKind::Saddle => saddle_curve(&p, &a).map_err(numeric)?,
        CurveKind::Limit => limit_symbol(&p, &a).map_err(numeric)?,
    };
    let text = pretty(&format::curve_json(&curve));
    if let Some(dir) = &c.out {
        write_file(dir, "curve.json", &text)?;
    }
    println(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_branch_points(c: &Common, out: &mut Output<'_>) -> Res<i32> {
    let (p, d) = c.poly_deg(2)?;
    let a = c.alpha(d)?;
    let bp = branch_points(&p, &a).map_err(numeric)?;
    let doc = json!({"alpha": format::rational_json(&a), "points": bp.iter().map(|z| format::complex_json(*z)).collect::<Vec<_>>()});
    let text = pretty(&doc);
    if let Some(dir) = &c.out {
        write_file(dir, "branch_points.json", &text)?;
        write_file(dir, "branch_points.csv", &format::roots_csv(&bp))?;
    }
    println(out, &text)?;
    Ok(EXIT_OK)
}

fn parse_point(s: &str) -> Res<Complex64> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(usage)?;
    match v.as_slice() {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(usage("expected re,im")),
    }
}

fn field_window(c: &Common, p: &ExactPoly) -> Res<Window> {
    match c.window()? {
        Some(w) => Ok(w),
        None => verify::default_window(p).map_err(numeric),
    }
}

fn cmd_trace(c: &Common, at: Option<&str>, out: &mut Output<'_>) -> Res<i32> {
    let (p, d) = c.poly_deg(2)?;
    let a = c.alpha(d)?;
    if let Some(s) = at {
        let z = parse_point(s)?;
        let pf = PhaseField::new(&p, &a).map_err(numeric)?;
        let fib = pf.classified_fiber(z).map_err(numeric)?;
        println(out, &pretty(&format::fiber_json(&fib)))?;
        return Ok(EXIT_OK);
    }
    let w = field_window(c, &p)?;
    let (nx, ny) = c.res(101)?;
    let field = parallel::build_field(&p, &a, w, nx, ny).map_err(numeric)?;
    let csv = format::field_csv(&field);
    match &c.out {
        Some(dir) => {
            write_file(dir, "field.csv", &csv)?;
            let table = format::read_field_csv(&csv).map_err(numeric)?;
            write_file(dir, "field.svg", &svg::render_field(&table))?;
            let res = field.curve_residuals();
            let good = res.iter().filter(|r| **r <= verify::TRACE_RESIDUAL).count();
            let summary = json!({
                "P": format::poly_json(&p),
                "alpha": format::rational_json(&a),
                "window": format::window_json(&w),
                "res": [nx, ny],
                "B": json_num(field.b),
                "flags": {
                    "ok": field.count(rodrigues_core::trace::CellFlag::Ok),
                    "near-delta": field.count(rodrigues_core::trace::CellFlag::NearDelta),
                    "near-branch": field.count(rodrigues_core::trace::CellFlag::NearBranch),
                    "pole": field.count(rodrigues_core::trace::CellFlag::PoleCell),
                },
                "residual_ok": good,
            });
            let text = pretty(&summary);
            write_file(dir, "summary.json", &text)?;
            println(out, &text)?;
        }
        None => println(out, &csv)?,
    }
    Ok(EXIT_OK)
}

fn cmd_support(c: &Common, out: &mut Output<'_>) -> Res<i32> {
    let (p, d) = c.poly_deg(2)?;
    let a = c.alpha(d)?;
    let w = field_window(c, &p)?;
    let (nx, ny) = c.res(101)?;
    let field = parallel::build_field(&p, &a, w, nx, ny).map_err(numeric)?;
    let s = extract_support(&field).map_err(numeric)?;
    let text = pretty(&format::support_json(&s, &w));
    match &c.out {
        Some(dir) => {
            write_file(dir, "support.json", &text)?;
            let (back, bw) = format::read_support_json(&text).map_err(numeric)?;
            write_file(dir, "support.svg", &svg::render_support(&back, bw))?;
            let _ = writeln!(out.stderr, "{} polylines, {} point masses", s.polylines.len(), s.point_masses.len());
        }
        None => println(out, &text)?,
    }
    Ok(EXIT_OK)
}

fn cmd_verify(suite: Suite, c: &Common, deg: usize, out: &mut Output<'_>) -> Res<i32> {
    let rep: Report = match suite {
        Suite::Ode => {
            let p = match c.poly {
                Some(_) => c.poly_deg(1)?.0,
                None if deg >= 1 => verify::random_strongly_generic(&mut verify::rng(c.seed), deg),
                None => return Err(usage("--deg must be at least 1")),
            };
            verify::ode_suite(&p, c.n.unwrap_or(3).max(1), c.seed)
        }
        Suite::Quadratic => {
            let a = c.alpha(2)?;
            verify::quadratic_suite(&a, c.n()?, &c.root_config()).map_err(numeric)?
        }
        Suite::Boutroux => {
            let (p, d) = c.poly_deg(2)?;
            verify::boutroux_suite(&p, &c.alpha(d)?)
        }
        Suite::Trace => {
            let (p, d) = c.poly_deg(2)?;
            let a = c.alpha(d)?;
            let w = field_window(c, &p)?;
            let (nx, ny) = c.res(101)?;
            verify::trace_suite(&p, &a, w, nx, ny).map_err(numeric)?
        }
    };
    let text = pretty(&rep.to_json());
    if let Some(dir) = &c.out {
        write_file(dir, &format!("verify_{}.json", rep.suite), &text)?;
    }
    println(out, &text)?;
    Ok(if rep.pass() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_plot(c: &Common, input: &Path, out: &mut Output<'_>) -> Res<i32> {
    let text = fs::read_to_string(input).map_err(io)?;
    let svg_text = if input.extension().and_then(|e| e.to_str()) == Some("json") {
        let (s, w) = format::read_support_json(&text).map_err(usage)?;
        svg::render_support(&s, c.window()?.unwrap_or(w))
    } else if text.starts_with(&format::FIELD_HEADER.join(",")) {
        svg::render_field(&format::read_field_csv(&text).map_err(usage)?)
    } else {
        svg::render_points(&format::read_points_csv(&text).map_err(usage)?, c.window()?)
    };
    match &c.out {
        Some(dir) => {
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
            write_file(dir, &format!("{}.svg", stem), &svg_text)?;
        }
        None => out.stdout.write_all(svg_text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}
