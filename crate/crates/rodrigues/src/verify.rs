//! Verification suites behind `verify`; each returns a machine-readable report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rodrigues_core::boutroux::{residues_saddle_curve, residues_scaled_curve};
use rodrigues_core::exactpoly::{int, rat, ratfun_descendant, series_descendant, ComplexRational};
use rodrigues_core::odes::{build_ode_general, build_ode_poly, build_ode_rational, verify_ode, OdeInput};
use rodrigues_core::quadratic::{compare_empirical, quadratic_law};
use rodrigues_core::rootfind::{find_descendant_roots, find_roots, hull_containment, ComplexRootSet, RootFinderConfig};
use rodrigues_core::trace::Window;
use rodrigues_core::{ExactPoly, ExactRatFun, Rational, RootError, SaddleError};
use serde_json::{json, Map, Value};

use crate::format::{json_num, rational_json, residue_json};
use crate::parallel;

/// Reality and sum tolerance for residues.
pub const RESIDUE_REALITY: f64 = 1e-9;
/// Tolerance against the closed-form residues.
pub const RESIDUE_VALUE: f64 = 1e-7;
pub const TRACE_RESIDUAL: f64 = 1e-8;
pub const TRACE_FRACTION: f64 = 0.99;
pub const HULL_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub data: Map<String, Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, data: Value) -> Self {
        let data = match data {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        Check { name: name.into(), pass, data }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    pub info: Map<String, Value>,
}

impl Report {
    fn new(suite: &'static str) -> Self {
        Report { suite, checks: Vec::new(), info: Map::new() }
    }

    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("name".into(), Value::String(c.name.clone()));
                m.insert("pass".into(), Value::Bool(c.pass));
                m.extend(c.data.clone());
                Value::Object(m)
            })
            .collect();
        json!({"suite": self.suite, "pass": self.pass(), "info": self.info, "checks": checks})
    }
}

fn small_poly(rng: &mut ChaCha8Rng, deg: usize, bound: i64) -> ExactPoly {
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-bound..=bound)).collect();
    while c[deg] == 0 {
        c[deg] = rng.random_range(-bound..=bound);
    }
    ExactPoly::from_i64s(&c)
}

/// Random integer polynomial of exact degree `deg` that is squarefree with squarefree
/// derivative.
pub fn random_strongly_generic(rng: &mut ChaCha8Rng, deg: usize) -> ExactPoly {
    loop {
        let p = small_poly(rng, deg, 5);
        if p.is_strongly_generic() {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational strictly between 0 and `d` with denominator at most `max_den`.
pub fn random_alpha(rng: &mut ChaCha8Rng, d: usize, max_den: i64) -> Rational {
    let q = rng.random_range(1..=max_den);
    let p = rng.random_range(1..d as i64 * q);
    rat(p, q)
}

fn ode_check(name: String, r: Result<rodrigues_core::odes::OdeCheck, rodrigues_core::OdeError>) -> Check {
    match r {
        Ok(c) => Check::new(name.clone(), c.exact, json!({"case": name, "exact": c.exact, "residual": json_num(c.residual)})),
        Err(e) => Check::new(name.clone(), false, json!({"case": name, "exact": false, "error": e.to_string()})),
    }
}

/// Exact application of the built operators to exact descendants: the polynomial case for
/// every `n <= n_max` and `m < n·deg P`, a rational case and an exponential series case.
pub fn ode_suite(p: &ExactPoly, n_max: u32, seed: u64) -> Report {
    let mut rep = Report::new("ode");
    let d = p.degree().unwrap_or(0);
    rep.info.insert("P".into(), crate::format::poly_json(p));
    for n in 1..=n_max {
        for m in 0..n as usize * d {
            let y = parallel::descendant(p, n, m);
            rep.checks.push(ode_check(format!("poly n={} m={}", n, m), verify_ode(&build_ode_poly(p, n, m), OdeInput::Poly(&y))));
        }
    }
    let mut r = rng(seed ^ 0x0de);
    let (pr, qr) = loop {
        let (da, db) = (r.random_range(0..=3), r.random_range(1..=3));
        let a = small_poly(&mut r, da, 4);
        let b = small_poly(&mut r, db, 4);
        if let Ok(f) = ExactRatFun::new(a, b) {
            if f.den().degree().unwrap_or(0) >= 1 {
                break (f.num().clone(), f.den().clone());
            }
        }
    };
    let f = ExactRatFun::new(pr.clone(), qr.clone()).expect("nonzero denominator");
    for n in 1..=n_max.min(3) {
        for m in 0..=3 {
            let y = ratfun_descendant(&f, n, m);
            let ode = build_ode_rational(&pr, &qr, n, m);
            rep.checks.push(ode_check(format!("rational n={} m={}", n, m), verify_ode(&ode, OdeInput::Rational(&y))));
        }
    }
    let dt = r.random_range(1..=2);
    let t = small_poly(&mut r, dt, 3);
    let q = ExactPoly::from_i64s(&[r.random_range(2..=4), -1]);
    let center = ComplexRational::new(rat(1, 3), rat(1, 2));
    for n in 1..=n_max.min(2) {
        for m in 0..=2 {
            let ode = build_ode_general(p, &q, &t, n, m);
            let name = format!("series n={} m={}", n, m);
            let s = match series_descendant(p, &q, &t, n, m, &center, ode.order + 20) {
                Ok(s) => s,
                Err(e) => {
                    rep.checks.push(Check::new(name.clone(), false, json!({"case": name, "error": e.to_string()})));
                    continue;
                }
            };
            let res = ode.apply_series(&s);
            let vanishing = res.coeffs.iter().take_while(|c| c.is_zero()).count();
            let mut c = ode_check(name, verify_ode(&ode, OdeInput::Series(&s)));
            c.pass &= vanishing >= 20;
            c.data.insert("vanishing".into(), json!(vanishing));
            rep.checks.push(c);
        }
    }
    rep
}

/// Root counting measure of `R_{[αn],n}` for `z^2 - 1` against the closed-form law.
pub fn quadratic_suite(alpha: &Rational, n: u32, cfg: &RootFinderConfig) -> Result<Report, RootError> {
    quadratic_suite_with_roots(alpha, n, cfg).map(|r| r.0)
}

/// As [`quadratic_suite`], also handing back the roots.
pub fn quadratic_suite_with_roots(alpha: &Rational, n: u32, cfg: &RootFinderConfig) -> Result<(Report, ComplexRootSet), RootError> {
    let mut rep = Report::new("quadratic");
    let af = rodrigues_core::exactpoly::rat_to_f64(alpha);
    let p = ExactPoly::from_i64s(&[-1, 0, 1]);
    let m = (alpha * int(n as i64)).floor().to_integer();
    let m: usize = m.try_into().map_err(|_| RootError::DegreeTooLow)?;
    rep.info.insert("alpha".into(), rational_json(alpha));
    rep.info.insert("n".into(), json!(n));
    rep.info.insert("m".into(), json!(m));
    let roots = find_descendant_roots(&p, n, m, cfg)?;
    let law = match quadratic_law(af) {
        Ok(l) => l,
        Err(e) => {
            rep.checks.push(Check::new("law", false, json!({"error": e.to_string()})));
            return Ok((rep, roots));
        }
    };
    let cmp = match compare_empirical(&roots, af, 0.05) {
        Ok(c) => c,
        Err(e) => {
            rep.checks.push(Check::new("law", false, json!({"error": e.to_string()})));
            return Ok((rep, roots));
        }
    };
    let has_atoms = law.atom_mass > 0.0;
    let ks_max = if has_atoms { 0.07 } else { 0.05 };
    rep.checks.push(Check::new("ks", cmp.ks_distance <= ks_max, json!({"ks": json_num(cmp.ks_distance), "threshold": ks_max})));
    let (fm, fp) = cmp.atom_fractions;
    if has_atoms {
        let ok = (fm - law.atom_mass).abs() <= 0.05 && (fp - law.atom_mass).abs() <= 0.05;
        rep.checks.push(Check::new(
            "atoms",
            ok,
            json!({"fractions": [json_num(fm), json_num(fp)], "expected": json_num(law.atom_mass), "tolerance": 0.05}),
        ));
    } else {
        // continuous mass of the law itself within 0.05 of -1 and +1
        let (lm, lp) = (law.cdf(-0.95) - law.cdf(-1.0), law.cdf(1.0) - law.cdf(0.95));
        let ok = fm <= lm + 0.02 && fp <= lp + 0.02;
        rep.checks.push(Check::new(
            "no atoms",
            ok,
            json!({"fractions": [json_num(fm), json_num(fp)], "law_mass": [json_num(lm), json_num(lp)], "margin": 0.02}),
        ));
    }
    let b = law.b_plus;
    let (lo, hi) = cmp.support;
    let inside = if has_atoms { true } else { lo >= -b - 0.02 && hi <= b + 0.02 };
    rep.checks.push(Check::new("support", inside, json!({"extent": [json_num(lo), json_num(hi)], "b_plus": json_num(b), "margin": 0.02})));
    rep.checks.push(Check::new("real roots", cmp.max_imag <= 1e-6, json!({"max_imag": json_num(cmp.max_imag), "threshold": 1e-6})));
    rep.checks.push(Check::new("hull", hull_containment(&roots, &p, HULL_TOL), json!({"tolerance": HULL_TOL})));
    Ok((rep, roots))
}

/// Residues of the scaled symbol curve and of the saddle curve.
pub fn boutroux_suite(p: &ExactPoly, alpha: &Rational) -> Report {
    let mut rep = Report::new("boutroux");
    rep.info.insert("P".into(), crate::format::poly_json(p));
    rep.info.insert("alpha".into(), rational_json(alpha));
    for (name, r) in [("scaled curve", residues_scaled_curve(p, alpha)), ("saddle curve", residues_saddle_curve(p, alpha))] {
        match r {
            Ok(r) => {
                let reality = r.max_imag() <= RESIDUE_REALITY;
                let sum = r.sum.norm() <= RESIDUE_REALITY;
                let values = r.max_error() <= RESIDUE_VALUE;
                let mut data = residue_json(&r);
                data["tolerances"] = json!({"reality": RESIDUE_REALITY, "sum": RESIDUE_REALITY, "value": RESIDUE_VALUE});
                data["reality"] = json!(reality);
                data["sum_zero"] = json!(sum);
                data["values"] = json!(values);
                rep.checks.push(Check::new(name, reality && sum && values, data));
            }
            Err(e) => rep.checks.push(Check::new(name, false, json!({"error": e.to_string()}))),
        }
    }
    rep
}

/// A window around the roots of `P` with a margin of half the extent (at least 1).
pub fn default_window(p: &ExactPoly) -> Result<Window, RootError> {
    let roots = find_roots(p, 1e-14)?.roots;
    let w = crate::svg::fit_window(&roots);
    let (cx, cy) = (0.5 * (w.re_min + w.re_max), 0.5 * (w.im_min + w.im_max));
    let half = 0.5 * (w.re_max - w.re_min).max(w.im_max - w.im_min);
    let r = (half * 1.5).max(half + 1.0);
    Ok(Window::new(cx - r, cx + r, cy - r, cy + r))
}

/// Share of OK cells where the predicted Cauchy transform satisfies the symbol curve.
pub fn trace_suite(p: &ExactPoly, alpha: &Rational, window: Window, nx: usize, ny: usize) -> Result<Report, SaddleError> {
    let mut rep = Report::new("trace");
    rep.info.insert("P".into(), crate::format::poly_json(p));
    rep.info.insert("alpha".into(), rational_json(alpha));
    rep.info.insert("res".into(), json!([nx, ny]));
    let field = parallel::build_field(p, alpha, window, nx, ny)?;
    let res = field.curve_residuals();
    let good = res.iter().filter(|r| **r <= TRACE_RESIDUAL).count();
    let frac = if res.is_empty() { 0.0 } else { good as f64 / res.len() as f64 };
    let worst = res.iter().copied().fold(0.0, f64::max);
    rep.info.insert("cells".into(), json!(nx * ny));
    rep.checks.push(Check::new(
        "symbol curve residual",
        frac >= TRACE_FRACTION,
        json!({"ok_cells": res.len(), "fraction": json_num(frac), "threshold": TRACE_FRACTION, "residual_tol": TRACE_RESIDUAL, "max": json_num(worst)}),
    ));
    Ok(rep)
}
