//! The predicted limit: logarithmic potential `B + H(z, u*)`, Cauchy transform
//! `1/(β(u* - z))`, density by a discrete Laplacian, and the support extracted from
//! switches of the maximal saddle.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::curves::{symbol_curve, BivariateCurve};
use crate::error::SaddleError;
use crate::exactpoly::{rat_to_f64, ExactPoly, Rational};
use crate::saddleflow::{PhaseField, SaddleFiber, TracerConfig};

/// `(β log β - (β+1) log(β+1)) / β` with `β = (d - α)/α`.
pub fn constant_b(d: usize, alpha: &Rational) -> f64 {
    let a = rat_to_f64(alpha);
    let beta = (d as f64 - a) / a;
    (beta * libm::log(beta) - (beta + 1.0) * libm::log(beta + 1.0)) / beta
}

/// `(1/d_n) log((m-1)! (nd-m+1)! / (nd)!)` with `m = [αn]` and `d_n = nd - m + 1`;
/// tends to [`constant_b`].
pub fn stirling_term(d: usize, alpha: &Rational, n: u64) -> f64 {
    let m = (alpha * Rational::from_integer(n.into())).floor();
    let m = rat_to_f64(&m);
    let nd = (n as f64) * d as f64;
    let dn = nd - m + 1.0;
    let lg = |x: f64| libm::lgamma(x + 1.0);
    (lg(m - 1.0) + lg(nd - m + 1.0) - lg(nd)) / dn
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub u: Complex64,
    pub potential: f64,
    pub cauchy: Complex64,
    pub fiber: SaddleFiber,
}

/// Potential and Cauchy transform from the maximally relevant saddle at `z`.
pub fn predict(pf: &PhaseField, z: Complex64) -> Result<Prediction, SaddleError> {
    let fiber = pf.classified_fiber(z)?;
    prediction_from(pf, fiber)
}

fn prediction_from(pf: &PhaseField, fiber: SaddleFiber) -> Result<Prediction, SaddleError> {
    let s = fiber.max_saddle().ok_or(SaddleError::AmbiguousClassification)?;
    let b = constant_b(pf.d, &pf.alpha_exact);
    let w = s.u - fiber.z;
    if w.norm() == 0.0 {
        return Err(SaddleError::PoleHit);
    }
    let u = s.u;
    let potential = b + s.h;
    let cauchy = (pf.beta() * w).inv();
    Ok(Prediction { u, potential, cauchy, fiber })
}

pub fn potential_at(p: &ExactPoly, alpha: &Rational, z: Complex64) -> Result<f64, SaddleError> {
    Ok(predict(&PhaseField::new(p, alpha)?, z)?.potential)
}

pub fn cauchy_pred(p: &ExactPoly, alpha: &Rational, z: Complex64) -> Result<Complex64, SaddleError> {
    Ok(predict(&PhaseField::new(p, alpha)?, z)?.cauchy)
}

/// `|Γ(z, C)|` relative to the sum of the magnitudes of its terms.
pub fn curve_residual(curve: &BivariateCurve, z: Complex64, c: Complex64) -> f64 {
    let (v, scale) = curve.eval_scaled(z, c);
    if scale == 0.0 {
        v.norm()
    } else {
        v.norm() / scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Window { re_min, re_max, im_min, im_max }
    }

    pub fn square(r: f64) -> Self {
        Window::new(-r, r, -r, r)
    }

    /// Grid steps; a single node along an axis gets step 0.
    pub fn steps(&self, nx: usize, ny: usize) -> (f64, f64) {
        let hx = if nx > 1 { (self.re_max - self.re_min) / (nx - 1) as f64 } else { 0.0 };
        let hy = if ny > 1 { (self.im_max - self.im_min) / (ny - 1) as f64 } else { 0.0 };
        (hx, hy)
    }

    pub fn node(&self, ix: usize, iy: usize, nx: usize, ny: usize) -> Complex64 {
        let (hx, hy) = self.steps(nx, ny);
        let x = if nx > 1 { self.re_min + ix as f64 * hx } else { 0.5 * (self.re_min + self.re_max) };
        let y = if ny > 1 { self.im_min + iy as f64 * hy } else { 0.5 * (self.im_min + self.im_max) };
        Complex64::new(x, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellFlag {
    Ok,
    NearDelta,
    NearBranch,
    PoleCell,
}

impl CellFlag {
    pub fn name(self) -> &'static str {
        match self {
            CellFlag::Ok => "ok",
            CellFlag::NearDelta => "near-delta",
            CellFlag::NearBranch => "near-branch",
            CellFlag::PoleCell => "pole",
        }
    }
}

/// Everything computed at one grid node, before branch labels are assigned.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub z: Complex64,
    pub flag: CellFlag,
    pub potential: f64,
    pub cauchy: Complex64,
    pub saddles: Vec<Complex64>,
    pub heights: Vec<f64>,
    pub max_index: Option<usize>,
}

impl CellResult {
    fn failed(z: Complex64, flag: CellFlag) -> Self {
        let nan = f64::NAN;
        CellResult { z, flag, potential: nan, cauchy: Complex64::new(nan, nan), saddles: Vec::new(), heights: Vec::new(), max_index: None }
    }
}

fn cell_from(pf: &PhaseField, z: Complex64, flag: CellFlag, fiber: SaddleFiber) -> CellResult {
    let saddles = fiber.saddles.iter().map(|s| s.u).collect();
    let heights = fiber.saddles.iter().map(|s| s.h).collect();
    let max_index = fiber.max_index;
    match prediction_from(pf, fiber) {
        Ok(pr) => CellResult { z, flag, potential: pr.potential, cauchy: pr.cauchy, saddles, heights, max_index },
        Err(_) => CellResult { saddles, heights, ..CellResult::failed(z, CellFlag::PoleCell) },
    }
}

/// Falls back to the highest saddle when tracing cannot separate the top two.
fn relaxed(pf: &PhaseField, z: Complex64, fiber: &SaddleFiber, flag: CellFlag) -> CellResult {
    let cfg = TracerConfig { near_delta: f64::NEG_INFINITY, ..pf.config.clone() };
    let cl = match pf.classify_with(fiber, &cfg) {
        Ok(f) => f,
        Err(_) => {
            let mut f = fiber.clone();
            f.max_index = (0..f.saddles.len()).max_by(|&a, &b| f.saddles[a].g.total_cmp(&f.saddles[b].g));
            f
        }
    };
    cell_from(pf, z, flag, cl)
}

pub fn compute_cell(pf: &PhaseField, z: Complex64) -> CellResult {
    let fiber = match pf.solve_fiber(z) {
        Ok(f) => f,
        Err(SaddleError::BranchPoint { .. }) => match pf.solve_fiber_unchecked(z, None) {
            Ok(f) => return relaxed(pf, z, &f, CellFlag::NearBranch),
            Err(_) => return CellResult::failed(z, CellFlag::NearBranch),
        },
        Err(_) => return CellResult::failed(z, CellFlag::PoleCell),
    };
    match pf.classify(&fiber) {
        Ok(f) => cell_from(pf, z, CellFlag::Ok, f),
        Err(SaddleError::NearDelta { .. }) | Err(SaddleError::AmbiguousClassification) => relaxed(pf, z, &fiber, CellFlag::NearDelta),
        Err(SaddleError::PoleHit) => CellResult::failed(z, CellFlag::PoleCell),
        Err(_) => relaxed(pf, z, &fiber, CellFlag::NearDelta),
    }
}

/// Predicted potential, Cauchy transform and branch labels on a grid; row-major with
/// `index = iy * nx + ix`.
#[derive(Clone, Debug)]
pub struct TraceField {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    /// The constant included in `potential`.
    pub b: f64,
    pub potential: Vec<f64>,
    pub cauchy: Vec<Complex64>,
    /// Label of the maximal saddle under continuation of the fiber through the grid, `-1` if unknown.
    pub branch_index: Vec<i32>,
    pub flags: Vec<CellFlag>,
    /// Fiber saddles in label order.
    pub saddles: Vec<Vec<Complex64>>,
    /// `H` of each saddle, in label order.
    pub heights: Vec<Vec<f64>>,
    pub poly: ExactPoly,
    pub alpha: Rational,
}

impl TraceField {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn node(&self, ix: usize, iy: usize) -> Complex64 {
        self.window.node(ix, iy, self.nx, self.ny)
    }

    pub fn steps(&self) -> (f64, f64) {
        self.window.steps(self.nx, self.ny)
    }

    /// The potential without the additive constant.
    pub fn potential_without_b(&self) -> Vec<f64> {
        self.potential.iter().map(|v| v - self.b).collect()
    }

    pub fn count(&self, flag: CellFlag) -> usize {
        self.flags.iter().filter(|f| **f == flag).count()
    }

    /// Relative residual of the symbol curve at `(z, cauchy)` on every OK cell.
    pub fn curve_residuals(&self) -> Vec<f64> {
        let curve = match symbol_curve(&self.poly, &self.alpha) {
            Ok(c) => c,
            Err(_) => return Vec::new(),
        };
        let mut out = Vec::new();
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                let k = self.index(ix, iy);
                if self.flags[k] == CellFlag::Ok {
                    out.push(curve_residual(&curve, self.node(ix, iy), self.cauchy[k]));
                }
            }
        }
        out
    }
}

/// Pairs `b[perm[i]]` with `a[i]`, greedily by increasing distance.
pub fn match_nearest(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    let n = a.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; b.len()];
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !used[j] {
            perm[i] = j;
            used[j] = true;
        }
    }
    perm
}

fn lex(a: &Complex64, b: &Complex64) -> core::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Assigns branch labels to independently computed cells, continuing the fiber row by
/// row from the left neighbour (or the one below when the left one is flagged).
pub fn assemble(poly: &ExactPoly, alpha: &Rational, window: Window, nx: usize, ny: usize, cells: Vec<CellResult>) -> TraceField {
    assert_eq!(cells.len(), nx * ny);
    let d = poly.degree().unwrap_or(0);
    let b = constant_b(d, alpha);
    let mut saddles: Vec<Vec<Complex64>> = vec![Vec::new(); nx * ny];
    let mut heights: Vec<Vec<f64>> = vec![Vec::new(); nx * ny];
    let mut branch_index = vec![-1i32; nx * ny];
    let mut flags = Vec::with_capacity(nx * ny);
    let mut potential = Vec::with_capacity(nx * ny);
    let mut cauchy = Vec::with_capacity(nx * ny);
    for c in &cells {
        flags.push(c.flag);
        potential.push(c.potential);
        cauchy.push(c.cauchy);
    }
    for iy in 0..ny {
        for ix in 0..nx {
            let k = iy * nx + ix;
            let cell = &cells[k];
            if cell.saddles.is_empty() {
                continue;
            }
            let left = (ix > 0).then(|| k - 1).filter(|&j| saddles[j].len() == cell.saddles.len());
            let below = (iy > 0).then(|| k - nx).filter(|&j| saddles[j].len() == cell.saddles.len());
            let good = |j: &usize| flags[*j] == CellFlag::Ok;
            let reference = left.filter(good).or(below.filter(good)).or(left).or(below);
            let order: Vec<usize> = match reference {
                Some(j) => match_nearest(&saddles[j], &cell.saddles),
                None => {
                    let mut o: Vec<usize> = (0..cell.saddles.len()).collect();
                    o.sort_by(|&p, &q| lex(&cell.saddles[p], &cell.saddles[q]));
                    o
                }
            };
            saddles[k] = order.iter().map(|&i| cell.saddles[i]).collect();
            heights[k] = order.iter().map(|&i| cell.heights[i]).collect();
            if let Some(mi) = cell.max_index {
                branch_index[k] = order.iter().position(|&i| i == mi).map_or(-1, |p| p as i32);
            }
        }
    }
    TraceField { window, nx, ny, b, potential, cauchy, branch_index, flags, saddles, heights, poly: poly.clone(), alpha: alpha.clone() }
}

/// Sequential field construction; the std companion fans the cells out over threads.
pub fn build_field(p: &ExactPoly, alpha: &Rational, window: Window, nx: usize, ny: usize) -> Result<TraceField, SaddleError> {
    let pf = PhaseField::new(p, alpha)?;
    let mut cells = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            cells.push(compute_cell(&pf, window.node(ix, iy, nx, ny)));
        }
    }
    Ok(assemble(p, alpha, window, nx, ny, cells))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub nx: usize,
    pub ny: usize,
    /// Clipped at zero; `NaN` on the border and wherever the stencil touches an
    /// undefined potential.
    pub values: Vec<f64>,
    /// Before clipping. Sums telescope to the discrete flux through the window border.
    pub raw: Vec<f64>,
    pub tolerance: f64,
    /// Cells below `-tolerance` before clipping.
    pub violations: usize,
    pub min_raw: f64,
}

impl DensityGrid {
    /// `Σ density · hx · hy` over the defined cells, after clipping.
    pub fn total(&self, hx: f64, hy: f64) -> f64 {
        self.values.iter().filter(|v| v.is_finite()).sum::<f64>() * hx * hy
    }

    pub fn total_raw(&self, hx: f64, hy: f64) -> f64 {
        self.raw.iter().filter(|v| v.is_finite()).sum::<f64>() * hx * hy
    }
}

/// Five-point Laplacian of the potential over `2π`. Values below `-tolerance` count as
/// violations; all negative values are clipped to zero.
pub fn measure_density_with(field: &TraceField, tolerance: f64) -> DensityGrid {
    let (nx, ny) = (field.nx, field.ny);
    let (hx, hy) = field.steps();
    let mut values = vec![f64::NAN; nx * ny];
    let mut raw = vec![f64::NAN; nx * ny];
    let mut violations = 0;
    let mut min_raw = f64::INFINITY;
    if nx >= 3 && ny >= 3 {
        let l = &field.potential;
        for iy in 1..ny - 1 {
            for ix in 1..nx - 1 {
                let k = iy * nx + ix;
                let lap = (l[k - 1] - 2.0 * l[k] + l[k + 1]) / (hx * hx) + (l[k - nx] - 2.0 * l[k] + l[k + nx]) / (hy * hy);
                let v = lap / (2.0 * PI);
                if !v.is_finite() {
                    continue;
                }
                min_raw = min_raw.min(v);
                if v < -tolerance {
                    violations += 1;
                }
                raw[k] = v;
                values[k] = v.max(0.0);
            }
        }
    }
    DensityGrid { nx, ny, values, raw, tolerance, violations, min_raw }
}

/// Default tolerance: a unit mass smeared over a cell is `1/(hx hy)`; allow a small
/// fraction of that for stencil error next to the support.
pub fn default_density_tolerance(field: &TraceField) -> f64 {
    let (hx, hy) = field.steps();
    0.02 / (hx * hy)
}

pub fn measure_density(field: &TraceField) -> DensityGrid {
    measure_density_with(field, default_density_tolerance(field))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportEstimate {
    pub polylines: Vec<Vec<Complex64>>,
    pub point_masses: Vec<(Complex64, f64)>,
}

#[derive(Clone, Debug)]
pub struct SupportConfig {
    /// Half-width, in cells, of the square whose flux gives the mass near a root.
    pub mass_radius: usize,
    /// A root carries an atom when the flux through its innermost ring reaches this;
    /// continuous mass passing nearby does not.
    pub min_mass: f64,
    pub bisection_steps: usize,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig { mass_radius: 5, min_mass: 0.02, bisection_steps: 30 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
enum EdgeKey {
    /// Between `(ix, iy)` and `(ix + 1, iy)`.
    H(usize, usize),
    /// Between `(ix, iy)` and `(ix, iy + 1)`.
    V(usize, usize),
}

/// Point on the segment `a → b` where the maximal saddle switches, by bisection on
/// `H_i - H_j` along the continued fiber.
fn edge_crossing(pf: &PhaseField, field: &TraceField, a: usize, b: usize, steps: usize) -> Option<Complex64> {
    let (sa, sb) = (&field.saddles[a], &field.saddles[b]);
    let (ha, hb) = (&field.heights[a], &field.heights[b]);
    if sa.is_empty() || sa.len() != sb.len() || field.branch_index[a] < 0 || field.branch_index[b] < 0 {
        return None;
    }
    let perm = match_nearest(sa, sb);
    let i = field.branch_index[a] as usize;
    let jb = field.branch_index[b] as usize;
    if perm[i] == jb {
        return None;
    }
    let j = perm.iter().position(|&q| q == jb)?;
    let f0 = ha[i] - ha[j];
    let f1 = hb[perm[i]] - hb[jb];
    if !(f0 >= 0.0 && f1 <= 0.0) {
        return None;
    }
    let za = cell_z(field, a);
    let zb = cell_z(field, b);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..steps {
        let t = 0.5 * (lo + hi);
        let z = za + (zb - za) * t;
        let guess: Vec<Complex64> = (0..sa.len()).map(|k| sa[k] + (sb[perm[k]] - sa[k]) * t).collect();
        let fib = match pf.solve_fiber_unchecked(z, Some(&guess)) {
            Ok(f) => f,
            Err(_) => break,
        };
        let us: Vec<Complex64> = fib.saddles.iter().map(|s| s.u).collect();
        let q = match_nearest(&guess, &us);
        let f = fib.saddles[q[i]].h - fib.saddles[q[j]].h;
        if !f.is_finite() {
            break;
        }
        if f >= 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }
    Some(za + (zb - za) * (0.5 * (lo + hi)))
}

fn cell_z(field: &TraceField, k: usize) -> Complex64 {
    field.node(k % field.nx, k / field.nx)
}

/// Discrete flux of the potential out of the square of half-width `r` cells around
/// node `(cx, cy)`, over `2π`: the sum of the five-point density inside it.
fn square_flux(field: &TraceField, cx: usize, cy: usize, r: usize) -> Option<f64> {
    let (nx, ny) = (field.nx, field.ny);
    if cx < r + 1 || cy < r + 1 || cx + r + 1 >= nx || cy + r + 1 >= ny {
        return None;
    }
    let (hx, hy) = field.steps();
    let l = |ix: usize, iy: usize| field.potential[iy * nx + ix];
    let mut flux = 0.0;
    for t in cy - r..=cy + r {
        flux += (l(cx + r + 1, t) - l(cx + r, t)) / hx * hy;
        flux += (l(cx - r - 1, t) - l(cx - r, t)) / hx * hy;
    }
    for s in cx - r..=cx + r {
        flux += (l(s, cy + r + 1) - l(s, cy + r)) / hy * hx;
        flux += (l(s, cy - r - 1) - l(s, cy - r)) / hy * hx;
    }
    let m = flux / (2.0 * PI);
    m.is_finite().then_some(m)
}

pub fn extract_support(field: &TraceField) -> Result<SupportEstimate, SaddleError> {
    extract_support_with(field, &SupportConfig::default())
}

pub fn extract_support_with(field: &TraceField, cfg: &SupportConfig) -> Result<SupportEstimate, SaddleError> {
    let pf = PhaseField::new(&field.poly, &field.alpha)?;
    let (nx, ny) = (field.nx, field.ny);
    let mut crossings: Vec<(EdgeKey, Complex64)> = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let k = iy * nx + ix;
            if ix + 1 < nx {
                if let Some(z) = edge_crossing(&pf, field, k, k + 1, cfg.bisection_steps) {
                    crossings.push((EdgeKey::H(ix, iy), z));
                }
            }
            if iy + 1 < ny {
                if let Some(z) = edge_crossing(&pf, field, k, k + nx, cfg.bisection_steps) {
                    crossings.push((EdgeKey::V(ix, iy), z));
                }
            }
        }
    }
    crossings.sort_by_key(|a| a.0);
    let lookup = |e: EdgeKey| crossings.binary_search_by(|c| c.0.cmp(&e)).ok();
    // marching squares: connect the crossings on the four edges of each square
    let mut segments: Vec<(usize, usize)> = Vec::new();
    for iy in 0..ny.saturating_sub(1) {
        for ix in 0..nx.saturating_sub(1) {
            let edges = [EdgeKey::H(ix, iy), EdgeKey::V(ix + 1, iy), EdgeKey::H(ix, iy + 1), EdgeKey::V(ix, iy)];
            let hit: Vec<usize> = edges.iter().filter_map(|e| lookup(*e)).collect();
            match hit.len() {
                2 => segments.push((hit[0], hit[1])),
                3 | 4 => {
                    let mut left = hit.clone();
                    while left.len() >= 2 {
                        let a = left.remove(0);
                        let (bi, _) = left
                            .iter()
                            .enumerate()
                            .map(|(q, &c)| (q, (crossings[c].1 - crossings[a].1).norm()))
                            .min_by(|x, y| x.1.total_cmp(&y.1))
                            .unwrap();
                        let b = left.remove(bi);
                        segments.push((a, b));
                    }
                }
                _ => {}
            }
        }
    }
    let polylines = chain(&segments, crossings.len()).into_iter().map(|ids| ids.iter().map(|&i| crossings[i].1).collect()).collect();

    let mut point_masses = Vec::new();
    let (hx, hy) = field.steps();
    if hx > 0.0 && hy > 0.0 {
        for r in &pf.roots {
            let fx = (r.re - field.window.re_min) / hx;
            let fy = (r.im - field.window.im_min) / hy;
            if fx < 0.0 || fy < 0.0 {
                continue;
            }
            let (cx, cy) = (libm::round(fx) as usize, libm::round(fy) as usize);
            let spike = square_flux(field, cx, cy, 1).is_some_and(|m| m >= cfg.min_mass);
            if let (true, Some(m)) = (spike, square_flux(field, cx, cy, cfg.mass_radius)) {
                point_masses.push((*r, m));
            }
        }
    }
    Ok(SupportEstimate { polylines, point_masses })
}

/// Joins segments sharing an endpoint into maximal chains.
fn chain(segments: &[(usize, usize)], n: usize) -> Vec<Vec<usize>> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj[a].push(s);
        adj[b].push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| {
        let mut path = vec![start];
        let mut cur = start;
        while let Some(&s) = adj[cur].iter().find(|&&s| !used[s]) {
            used[s] = true;
            let (a, b) = segments[s];
            cur = if a == cur { b } else { a };
            path.push(cur);
        }
        path
    };
    // open chains start at endpoints of odd degree
    for (v, edges) in adj.iter().enumerate().take(n) {
        if edges.len() % 2 == 1 && edges.iter().any(|&s| !used[s]) {
            out.push(walk(v, &mut used));
        }
    }
    for s in 0..segments.len() {
        if !used[s] {
            out.push(walk(segments[s].0, &mut used));
        }
    }
    out
}
