//! Residues of `W dz` on the rescaled symbol curve and of `α/((d-α)(u-z)) dz` on the
//! saddle point curve, computed by following the fiber around circles in the z-plane.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::curves::{branch_points, saddle_curve, scaled_symbol_curve, BivariateCurve};
use crate::error::{CurveError, ResidueError};
use crate::exactpoly::{rat_to_f64, ExactPoly, Rational};
use crate::numeric::{gauss_legendre, horner};
use crate::rootfind::{find_roots, solve_complex};
use crate::trace::match_nearest;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueEntry {
    pub label: String,
    /// Base point in the z-plane; `None` for points over infinity.
    pub location: Option<Complex64>,
    pub computed: Complex64,
    pub expected: f64,
    pub abs_error: f64,
    /// A second printed target, kept for comparison.
    pub alternative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidueReport {
    pub entries: Vec<ResidueEntry>,
    pub sum: Complex64,
    /// Largest change of any residue between two circle radii.
    pub radius_drift: f64,
}

impl ResidueReport {
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|e| e.computed.im.abs()).fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_error).fold(0.0, f64::max)
    }

    pub fn passes(&self, reality: f64, value: f64) -> bool {
        self.max_imag() <= reality && self.sum.norm() <= reality && self.max_error() <= value
    }
}

/// A fiber polynomial in the curve variable with coefficients polynomial in `z`.
struct Fiber {
    c: Vec<Vec<Complex64>>,
}

impl Fiber {
    fn new(curve: &BivariateCurve) -> Self {
        Fiber { c: curve.coeffs.iter().map(|p| p.to_complex64()).collect() }
    }

    fn at(&self, z: Complex64) -> Vec<Complex64> {
        self.c.iter().map(|p| horner(p, z)).collect()
    }

    fn solve(&self, z: Complex64, warm: Option<&[Complex64]>) -> Result<Vec<Complex64>, ResidueError> {
        solve_complex(&self.at(z), warm, 1e-14).map_err(|_| ResidueError::ContinuationFailure)
    }
}

fn nearest_other(v: &[Complex64], i: usize) -> f64 {
    v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, w)| (w - v[i]).norm()).fold(f64::INFINITY, f64::min)
}

/// Continues the whole fiber along `path`, keeping labels: `out[k][i]` is branch `i`
/// at `path[k]`. Fails when a step moves a root by more than a third of its distance
/// to the nearest other root.
fn continue_fiber(f: &Fiber, path: &[Complex64], start: &[Complex64]) -> Result<Vec<Vec<Complex64>>, ResidueError> {
    let mut out = Vec::with_capacity(path.len());
    let mut prev = start.to_vec();
    for z in path {
        let raw = f.solve(*z, Some(&prev))?;
        let perm = match_nearest(&prev, &raw);
        let next: Vec<Complex64> = perm.iter().map(|&j| raw[j]).collect();
        for i in 0..prev.len() {
            let gap = nearest_other(&prev, i).min(nearest_other(&next, i));
            if (prev[i] - next[i]).norm() > gap / 3.0 {
                return Err(ResidueError::ContinuationFailure);
            }
        }
        out.push(next.clone());
        prev = next;
    }
    Ok(out)
}

/// One cycle of branches over a circle: the branches it passes through at `θ = 0` and
/// the integral of `form` over all of its turns.
#[derive(Clone, Debug)]
struct Cycle {
    start: Vec<Complex64>,
    integral: Complex64,
}

fn circle_cycles<G: Fn(Complex64, Complex64) -> Complex64>(f: &Fiber, form: &G, center: Complex64, r: f64) -> Result<Vec<Cycle>, ResidueError> {
    let mut n = 256;
    loop {
        match circle_cycles_n(f, form, center, r, n) {
            Ok(c) => return Ok(c),
            Err(e) if n >= 1 << 15 => return Err(e),
            Err(_) => n *= 2,
        }
    }
}

fn circle_cycles_n<G: Fn(Complex64, Complex64) -> Complex64>(f: &Fiber, form: &G, center: Complex64, r: f64, n: usize) -> Result<Vec<Cycle>, ResidueError> {
    let pts: Vec<Complex64> = (0..=n).map(|k| center + Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect();
    let start = f.solve(pts[0], None)?;
    let vals = continue_fiber(f, &pts, &start)?;
    let m = start.len();
    // one-turn trapezoid integral of each branch, and where it lands
    let h = 2.0 * PI / n as f64;
    let mut turn = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        let dz = (pts[k] - center) * Complex64::new(0.0, h);
        for i in 0..m {
            turn[i] += form(pts[k], vals[k][i]) * dz;
        }
    }
    let landed = match_nearest(&vals[n], &start);
    let mut seen = vec![false; m];
    let mut cycles = Vec::new();
    for i in 0..m {
        if seen[i] {
            continue;
        }
        let mut members = Vec::new();
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            members.push(j);
            j = landed[j];
        }
        if j != i {
            return Err(ResidueError::ContinuationFailure);
        }
        let integral = members.iter().map(|&q| turn[q]).sum();
        let st = members.iter().map(|&q| start[q]).collect();
        cycles.push(Cycle { start: st, integral });
    }
    Ok(cycles)
}

struct Setup {
    d: usize,
    alpha: f64,
    roots: Vec<Complex64>,
    crit: Vec<Complex64>,
    singular: Vec<Complex64>,
}

fn setup(p: &ExactPoly, alpha: &Rational) -> Result<Setup, ResidueError> {
    let d = p.degree().ok_or(ResidueError::Curve(CurveError::DegreeTooLow))?;
    if d < 2 {
        return Err(ResidueError::Curve(CurveError::DegreeTooLow));
    }
    if !p.is_strongly_generic() {
        return Err(ResidueError::GenericityFailure);
    }
    let roots = find_roots(p, 1e-15)?.roots;
    let crit = find_roots(&p.derivative(1), 1e-15)?.roots;
    let mut singular = branch_points(p, alpha)?;
    singular.extend(roots.iter().copied());
    Ok(Setup { d, alpha: rat_to_f64(alpha), roots, crit, singular })
}

/// Radius around `c` clear of every other singular point.
fn local_radius(c: Complex64, singular: &[Complex64]) -> f64 {
    let near = singular.iter().map(|s| (s - c).norm()).filter(|&t| t > 1e-8 * (1.0 + c.norm())).fold(f64::INFINITY, f64::min);
    if near.is_finite() {
        0.25 * near
    } else {
        0.25 * (1.0 + c.norm())
    }
}

fn outer_radius(singular: &[Complex64]) -> f64 {
    2.0 * singular.iter().map(|s| s.norm()).fold(0.0, f64::max) + 1.0
}

fn entry(label: String, location: Option<Complex64>, computed: Complex64, expected: f64, alternative: Option<f64>) -> ResidueEntry {
    ResidueEntry { label, location, computed, expected, abs_error: (computed - expected).norm(), alternative }
}

fn residue(c: &Cycle) -> Complex64 {
    c.integral / Complex64::new(0.0, 2.0 * PI)
}

/// Residues on the rescaled symbol curve `Σ (α-k)/k! P^{(k)} W^{d-k} = 0`: the branch
/// with `W → ∞` over each root of `P`, then the `d` branches over `z = ∞`.
pub fn residues_scaled_curve(p: &ExactPoly, alpha: &Rational) -> Result<ResidueReport, ResidueError> {
    let s = setup(p, alpha)?;
    let f = Fiber::new(&scaled_symbol_curve(p, alpha)?);
    let form = |_z: Complex64, w: Complex64| w;
    let (d, a) = (s.d as f64, s.alpha);
    let mut entries = Vec::new();
    let mut drift = 0.0f64;
    let pick_pole = |cs: &[Cycle]| -> Cycle {
        cs.iter().max_by(|x, y| max_abs(&x.start).total_cmp(&max_abs(&y.start))).unwrap().clone()
    };
    for (i, z0) in s.roots.iter().enumerate() {
        let r = local_radius(*z0, &s.singular);
        let c1 = pick_pole(&circle_cycles(&f, &form, *z0, r)?);
        let c2 = pick_pole(&circle_cycles(&f, &form, *z0, 0.5 * r)?);
        drift = drift.max((residue(&c1) - residue(&c2)).norm());
        entries.push(entry(format!("root {}", i), Some(*z0), residue(&c1), (1.0 - a) / a, None));
    }
    let big = outer_radius(&s.singular);
    let at_inf = |r: f64| -> Result<Vec<(f64, Complex64)>, ResidueError> {
        let cs = circle_cycles(&f, &form, Complex64::new(0.0, 0.0), r)?;
        // z W at the start point identifies the slope class
        Ok(cs.iter().map(|c| ((c.start[0] * r).re, -residue(c))).collect())
    };
    let mut b1 = at_inf(big)?;
    let mut b2 = at_inf(2.0 * big)?;
    b1.sort_by(|x, y| x.0.total_cmp(&y.0));
    b2.sort_by(|x, y| x.0.total_cmp(&y.0));
    if b1.len() != s.d || b2.len() != s.d {
        return Err(ResidueError::ContinuationFailure);
    }
    for (k, ((slope, res), (_, res2))) in b1.iter().zip(&b2).enumerate() {
        drift = drift.max((res - res2).norm());
        if k + 1 == s.d {
            let _ = slope;
            entries.push(entry(String::from("infinity essential"), None, *res, (a - d) / a, Some((a - d) / d)));
        } else {
            entries.push(entry(format!("infinity slope -1 #{}", k), None, *res, 1.0, None));
        }
    }
    let sum = entries.iter().map(|e| e.computed).sum();
    Ok(ResidueReport { entries, sum, radius_drift: drift })
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Residues of `α/((d-α)(u-z)) dz` on the saddle point curve: at `(z_j, z_j)`, at
/// `(∞, q_i)` for the critical points `q_i`, and at `(∞, ∞)`.
pub fn residues_saddle_curve(p: &ExactPoly, alpha: &Rational) -> Result<ResidueReport, ResidueError> {
    let s = setup(p, alpha)?;
    let f = Fiber::new(&saddle_curve(p, alpha)?);
    let (d, a) = (s.d as f64, s.alpha);
    let k = a / (d - a);
    let form = |z: Complex64, u: Complex64| k / (u - z);
    let mut entries = Vec::new();
    let mut drift = 0.0f64;
    for (i, z0) in s.roots.iter().enumerate() {
        let r = local_radius(*z0, &s.singular);
        let pick = |cs: Vec<Cycle>, r: f64| -> Cycle {
            let z = *z0 + r;
            cs.into_iter().min_by(|x, y| min_dist(&x.start, z).total_cmp(&min_dist(&y.start, z))).unwrap()
        };
        let c1 = pick(circle_cycles(&f, &form, *z0, r)?, r);
        let c2 = pick(circle_cycles(&f, &form, *z0, 0.5 * r)?, 0.5 * r);
        drift = drift.max((residue(&c1) - residue(&c2)).norm());
        entries.push(entry(format!("({z}, {z}) root {i}", z = fmt_c(*z0), i = i), Some(*z0), residue(&c1), (1.0 - a) / (d - a), None));
    }
    let mut big = outer_radius(&s.singular);
    for q in &s.crit {
        big = big.max(2.0 * q.norm() + 1.0);
    }
    let at_inf = |r: f64| -> Result<Vec<Cycle>, ResidueError> { circle_cycles(&f, &form, Complex64::new(0.0, 0.0), r) };
    let c1 = at_inf(big)?;
    let c2 = at_inf(2.0 * big)?;
    if c1.len() != s.d || c2.len() != s.d {
        return Err(ResidueError::ContinuationFailure);
    }
    let by_crit = |cs: &[Cycle], q: Complex64| -> Complex64 {
        let c = cs.iter().min_by(|x, y| (x.start[0] - q).norm().total_cmp(&(y.start[0] - q).norm())).unwrap();
        -residue(c)
    };
    for (i, q) in s.crit.iter().enumerate() {
        let r1 = by_crit(&c1, *q);
        let r2 = by_crit(&c2, *q);
        drift = drift.max((r1 - r2).norm());
        entries.push(entry(format!("(inf, {}) critical {}", fmt_c(*q), i), None, r1, k, None));
    }
    let top = |cs: &[Cycle]| -> Complex64 { -residue(cs.iter().max_by(|x, y| x.start[0].norm().total_cmp(&y.start[0].norm())).unwrap()) };
    let (r1, r2) = (top(&c1), top(&c2));
    drift = drift.max((r1 - r2).norm());
    entries.push(entry(String::from("(inf, inf)"), None, r1, -1.0, None));
    let sum = entries.iter().map(|e| e.computed).sum();
    Ok(ResidueReport { entries, sum, radius_drift: drift })
}

fn min_dist(v: &[Complex64], z: Complex64) -> f64 {
    v.iter().map(|u| (u - z).norm()).fold(f64::INFINITY, f64::min)
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

/// A closed polygon in the z-plane and the starting branch of the rescaled symbol
/// curve, counted by decreasing `|W|` at the first vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSpec {
    pub vertices: Vec<Complex64>,
    pub branch: usize,
}

impl LoopSpec {
    pub fn circle(center: Complex64, r: f64, sides: usize, branch: usize) -> Self {
        let vertices = (0..sides).map(|k| center + Complex64::from_polar(r, 2.0 * PI * k as f64 / sides as f64)).collect();
        LoopSpec { vertices, branch }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodReport {
    pub periods: Vec<Complex64>,
    /// `max |Re ∮ W dz|`.
    pub max_real: f64,
}

/// `∮ W dz` along each loop, continuing the chosen branch. Residues are real, so every
/// period is `2πi` times a real number and the real parts measure the defect.
pub fn period_reality_check(p: &ExactPoly, alpha: &Rational, loops: &[LoopSpec]) -> Result<PeriodReport, ResidueError> {
    let curve = scaled_symbol_curve(p, alpha)?;
    let f = Fiber::new(&curve);
    let mut singular = branch_points(p, alpha)?;
    singular.extend(find_roots(p, 1e-15)?.roots);
    let (x, w) = gauss_legendre(8);
    let mut periods = Vec::with_capacity(loops.len());
    for lp in loops {
        let nv = lp.vertices.len();
        if nv < 2 {
            return Err(ResidueError::ContinuationFailure);
        }
        let mut path = Vec::new();
        let mut weights = Vec::new();
        let sub = 64;
        for e in 0..nv {
            let a = lp.vertices[e];
            let b = lp.vertices[(e + 1) % nv];
            let h = (b - a) / sub as f64;
            for s in 0..sub {
                let mid = a + h * (s as f64 + 0.5);
                for (xi, wi) in x.iter().zip(&w) {
                    path.push(mid + h * (0.5 * xi));
                    weights.push(h * (0.5 * wi));
                }
            }
        }
        let margin = path.iter().map(|z| singular.iter().map(|s| (s - z).norm()).fold(f64::INFINITY, f64::min)).fold(f64::INFINITY, f64::min);
        if margin < 1e-6 {
            return Err(ResidueError::ContinuationFailure);
        }
        let mut start = f.solve(path[0], None)?;
        start.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        if lp.branch >= start.len() {
            return Err(ResidueError::ContinuationFailure);
        }
        let vals = continue_fiber(&f, &path, &start)?;
        let per: Complex64 = vals.iter().zip(&weights).map(|(v, wt)| v[lp.branch] * wt).sum();
        periods.push(per);
    }
    let max_real = periods.iter().map(|p| p.re.abs()).fold(0.0, f64::max);
    Ok(PeriodReport { periods, max_real })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{int, rat};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check(rep: &ResidueReport) {
        assert!(rep.max_imag() < 1e-9, "{:?}", rep);
        assert!(rep.sum.norm() < 1e-9, "{:?}", rep);
        assert!(rep.max_error() < 1e-7, "{:?}", rep);
        assert!(rep.radius_drift < 1e-8, "{:?}", rep);
    }

    #[test]
    fn scaled_cubic_half() {
        let p = ExactPoly::from_i64s(&[0, -1, 0, 1]);
        let rep = residues_scaled_curve(&p, &rat(1, 2)).unwrap();
        check(&rep);
        let vals: Vec<f64> = rep.entries.iter().map(|e| e.computed.re).collect();
        for v in &vals[..5] {
            assert!((v - 1.0).abs() < 1e-9);
        }
        assert!((vals[5] + 5.0).abs() < 1e-9);
        assert_eq!(rep.entries[5].alternative, Some(-5.0 / 6.0));
    }

    #[test]
    fn scaled_quadratic_alpha_one_has_no_finite_poles() {
        let p = ExactPoly::from_i64s(&[-1, 0, 1]);
        let rep = residues_scaled_curve(&p, &int(1)).unwrap();
        check(&rep);
        assert!(rep.entries[0].computed.norm() < 1e-10 && rep.entries[1].computed.norm() < 1e-10);
    }

    #[test]
    fn saddle_cubic_half() {
        let p = ExactPoly::from_i64s(&[0, -1, 0, 1]);
        let rep = residues_saddle_curve(&p, &rat(1, 2)).unwrap();
        check(&rep);
        for e in &rep.entries[..5] {
            assert!((e.computed.re - 0.2).abs() < 1e-9);
        }
        assert!((rep.entries[5].computed.re + 1.0).abs() < 1e-9);
    }

    #[test]
    fn saddle_quadratic_alpha_one() {
        let p = ExactPoly::from_i64s(&[-1, 0, 1]);
        let rep = residues_saddle_curve(&p, &int(1)).unwrap();
        check(&rep);
        let want = [0.0, 0.0, 1.0, -1.0];
        for (e, w) in rep.entries.iter().zip(want) {
            assert!((e.computed.re - w).abs() < 1e-9, "{}", e.label);
        }
    }

    #[test]
    fn genericity() {
        let p = ExactPoly::from_i64s(&[0, 0, 1, 1]);
        assert_eq!(residues_scaled_curve(&p, &rat(1, 2)), Err(ResidueError::GenericityFailure));
        let p = &ExactPoly::from_i64s(&[0, 0, 0, 1]) - &ExactPoly::from_i64s(&[1]);
        // P' = 3z^2 has a double root
        assert_eq!(residues_saddle_curve(&p, &rat(1, 2)), Err(ResidueError::GenericityFailure));
        assert!(residues_saddle_curve(&ExactPoly::from_i64s(&[1, 1, 0, 1]), &rat(1, 2)).is_ok());
    }

    #[test]
    fn periods() {
        let p = ExactPoly::from_i64s(&[-1, 0, 1]);
        let a = rat(1, 2);
        let loops = [
            LoopSpec::circle(c(1.0, 0.0), 0.05, 24, 0),
            LoopSpec::circle(c(0.0, 1.5), 0.3, 24, 0),
            LoopSpec::circle(c(0.0, 0.0), 6.0, 48, 0),
        ];
        let rep = period_reality_check(&p, &a, &loops).unwrap();
        let tpi = c(0.0, 2.0 * PI);
        // (1-α)/α = 1 at the root; zero on a contractible loop
        assert!((rep.periods[0] - tpi).norm() < 1e-8, "{}", rep.periods[0]);
        assert!(rep.periods[1].norm() < 1e-8);
        // outside every finite pole: minus the residue of that branch at infinity
        let inf = residues_scaled_curve(&p, &a).unwrap();
        let on_big: Vec<f64> = inf.entries[2..].iter().map(|e| e.computed.re).collect();
        assert!(on_big.iter().any(|r| (rep.periods[2] + tpi * *r).norm() < 1e-8), "{} {:?}", rep.periods[2], on_big);
        assert!(rep.max_real < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn ensemble(deg in 2usize..5, seed in proptest::collection::vec(-5i64..6, 5), k in 0usize..5) {
            let mut co: Vec<i64> = seed[..deg].to_vec();
            co.push(1);
            let p = ExactPoly::from_i64s(&co);
            prop_assume!(p.is_strongly_generic());
            let d = deg as i64;
            let a = [rat(1, 4), rat(1, 2), int(1), rat(3, 2), rat(2 * d - 1, 2)][k].clone();
            let r = residues_scaled_curve(&p, &a).unwrap();
            prop_assert!(r.passes(1e-9, 1e-7), "{:?}", r);
            let r = residues_saddle_curve(&p, &a).unwrap();
            prop_assert!(r.passes(1e-9, 1e-7), "{:?}", r);
        }
    }
}
