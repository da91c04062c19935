//! All complex roots of exact polynomials of high degree, plus empirical root-counting
//! measures and their Cauchy transforms.
//!
//! The Newton ratio `p/p'` is evaluated by fixed-point Horner on the exact integer
//! coefficients, with a running error bound; the bit width grows whenever the bound
//! says cancellation ate the answer. Positions themselves stay in `f64`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::RootError;
use crate::exactpoly::{rodrigues_descendant, ExactPoly};
use crate::numeric::{bigint_to_f64_scaled, convex_hull, f64_to_fixed, horner2, hull_distance};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    pub roots: Vec<Complex64>,
    pub residual_bound: f64,
    pub source_degree: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub location: Complex64,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<Atom>,
    pub total_mass: f64,
}

impl EmpiricalMeasure {
    pub fn cauchy(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().map(|a| a.mass / (z - a.location)).sum()
    }

    /// `∫ log|z - t| dμ(t)`
    pub fn potential(&self, z: Complex64) -> f64 {
        self.atoms.iter().map(|a| a.mass * (z - a.location).norm().ln()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct RootFinderConfig {
    /// Accept a root once `|p/p'| <= tolerance * max(1, |z|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    pub initial_bits: u32,
    pub max_bits: u32,
}

impl Default for RootFinderConfig {
    fn default() -> Self {
        RootFinderConfig { tolerance: 1e-12, max_iterations: 2000, seed: 0x5eed, initial_bits: 96, max_bits: 1 << 15 }
    }
}

pub enum NewtonStep {
    Ratio(Complex64),
    /// The evaluation point is a root to the working precision.
    ExactRoot,
    /// `p'` vanished; move the point.
    Flat,
}

pub trait NewtonEval {
    fn degree(&self) -> usize;
    fn newton_ratio(&self, z: Complex64) -> NewtonStep;
}

/// Polynomial with integer coefficients evaluated in adaptive fixed point.
pub struct FixedPointPoly {
    coeffs: Vec<BigInt>,
    initial_bits: u32,
    max_bits: u32,
}

/// `(mantissa, e)` with value `mantissa * 2^e`.
fn scaled_c64(re: &BigInt, im: &BigInt, frac_bits: u32) -> (Complex64, i64) {
    let b = re.bits().max(im.bits()) as i64;
    let sh = (b - 60).max(0);
    let m = Complex64::new(bigint_to_f64_scaled(re, sh), bigint_to_f64_scaled(im, sh));
    (m, sh - frac_bits as i64)
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

pub struct FixedEval {
    pub p: (BigInt, BigInt),
    pub dp: (BigInt, BigInt),
    pub bits: u32,
    /// log2 of the absolute error bound, in units of 2^-bits.
    pub err_p: f64,
    pub err_dp: f64,
}

impl FixedPointPoly {
    pub fn new(p: &ExactPoly, cfg: &RootFinderConfig) -> Self {
        FixedPointPoly { coeffs: p.primitive_integer_coeffs(), initial_bits: cfg.initial_bits, max_bits: cfg.max_bits }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn eval_bits(&self, z: Complex64, bits: u32) -> FixedEval {
        let zr = f64_to_fixed(z.re, bits);
        let zi = f64_to_fixed(z.im, bits);
        let lz = z.norm().max(1e-300).log2();
        let n = self.coeffs.len() - 1;
        let mut pr = &self.coeffs[n] << bits as usize;
        let mut pi = BigInt::zero();
        let mut dr = BigInt::zero();
        let mut di = BigInt::zero();
        let mut ep = f64::NEG_INFINITY;
        let mut ed = f64::NEG_INFINITY;
        let b = bits as usize;
        for k in (0..n).rev() {
            let ndr = ((&dr * &zr - &di * &zi) >> b) + &pr;
            let ndi = ((&dr * &zi + &di * &zr) >> b) + &pi;
            ed = log2_add(log2_add(ed + lz, ep), 1.5);
            let npr = ((&pr * &zr - &pi * &zi) >> b) + (&self.coeffs[k] << b);
            let npi = (&pr * &zi + &pi * &zr) >> b;
            ep = log2_add(ep + lz, 1.5);
            pr = npr;
            pi = npi;
            dr = ndr;
            di = ndi;
        }
        FixedEval { p: (pr, pi), dp: (dr, di), bits, err_p: ep, err_dp: ed }
    }

    /// `p(z)` in double precision, through the adaptive evaluator.
    pub fn value(&self, z: Complex64) -> Complex64 {
        let (e, _) = self.eval_adaptive(z);
        let (m, ex) = scaled_c64(&e.p.0, &e.p.1, e.bits);
        Complex64::new(crate::numeric::scale2(m.re, ex), crate::numeric::scale2(m.im, ex))
    }

    /// Evaluates with enough bits that `p` and `p'` carry at least 40 correct bits.
    pub fn eval_adaptive(&self, z: Complex64) -> (FixedEval, bool) {
        let mut bits = self.initial_bits;
        loop {
            let e = self.eval_bits(z, bits);
            let lp = e.p.0.bits().max(e.p.1.bits()) as f64;
            let ld = e.dp.0.bits().max(e.dp.1.bits()) as f64;
            let ok = lp - e.err_p >= 40.0 && ld - e.err_dp >= 40.0;
            if ok || bits >= self.max_bits {
                return (e, ok);
            }
            bits = (bits * 2).min(self.max_bits);
        }
    }
}

impl NewtonEval for FixedPointPoly {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn newton_ratio(&self, z: Complex64) -> NewtonStep {
        let (e, ok) = self.eval_adaptive(z);
        let p_zero = e.p.0.is_zero() && e.p.1.is_zero();
        let lp = e.p.0.bits().max(e.p.1.bits()) as f64;
        if p_zero || (!ok && lp - e.err_p < 1.0) {
            return NewtonStep::ExactRoot;
        }
        if e.dp.0.is_zero() && e.dp.1.is_zero() {
            return NewtonStep::Flat;
        }
        let (pm, pe) = scaled_c64(&e.p.0, &e.p.1, e.bits);
        let (dm, de) = scaled_c64(&e.dp.0, &e.dp.1, e.bits);
        let r = pm / dm;
        let s = pe - de;
        NewtonStep::Ratio(Complex64::new(crate::numeric::scale2(r.re, s), crate::numeric::scale2(r.im, s)))
    }
}

/// Complex double-precision coefficients, for small auxiliary polynomials.
pub struct ComplexPoly {
    c: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(c: Vec<Complex64>) -> Self {
        let mut c = c;
        while c.len() > 1 && c.last().is_some_and(|v| *v == Complex64::new(0.0, 0.0)) {
            c.pop();
        }
        ComplexPoly { c }
    }
}

impl NewtonEval for ComplexPoly {
    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn newton_ratio(&self, z: Complex64) -> NewtonStep {
        let (p, dp) = horner2(&self.c, z);
        if p.norm() == 0.0 {
            return NewtonStep::ExactRoot;
        }
        if dp.norm() == 0.0 {
            return NewtonStep::Flat;
        }
        NewtonStep::Ratio(p / dp)
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Initial guesses on concentric circles read off the Newton polygon of `(k, log2|c_k|)`,
/// capped by the Fujiwara bound.
fn initial_guesses(log_c: &[f64], rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let n = log_c.len() - 1;
    let pts: Vec<(usize, f64)> = log_c.iter().enumerate().filter(|(_, l)| l.is_finite()).map(|(k, &l)| (k, l)).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let ln = log_c[n];
    let mut fuj = f64::NEG_INFINITY;
    for k in 1..=n {
        if log_c[n - k].is_finite() {
            let extra = if k == n { -1.0 } else { 0.0 };
            fuj = fuj.max((log_c[n - k] - ln + extra) / k as f64);
        }
    }
    let fuj = (fuj + 1.0).exp2();
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let cnt = k1 - k0;
        let r = ((l0 - l1) / cnt as f64).exp2().min(fuj);
        let off = 2.0 * PI * uniform(rng);
        for j in 0..cnt {
            let rr = r * (1.0 + 0.05 * (uniform(rng) - 0.5));
            let th = off + 2.0 * PI * (j as f64 + 0.25 * uniform(rng)) / cnt as f64;
            out.push(Complex64::from_polar(rr, th));
        }
    }
    out
}

pub struct AberthOutcome {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Simultaneous Aberth-Ehrlich iteration with Gauss-Seidel updates.
pub fn aberth<E: NewtonEval>(eval: &E, mut z: Vec<Complex64>, tol: f64, max_iter: usize) -> AberthOutcome {
    let n = z.len();
    let mut done = vec![false; n];
    let mut res = vec![f64::INFINITY; n];
    let mut it = 0;
    while it < max_iter && done.iter().any(|d| !d) {
        it += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            match eval.newton_ratio(z[k]) {
                NewtonStep::ExactRoot => {
                    done[k] = true;
                    res[k] = 0.0;
                }
                NewtonStep::Flat => {
                    let s = 1e-8 * z[k].norm().max(1.0);
                    z[k] += Complex64::new(s, s * 0.5);
                }
                NewtonStep::Ratio(r) => {
                    let scale = z[k].norm().max(1.0);
                    res[k] = r.norm();
                    if r.norm() <= tol * scale {
                        done[k] = true;
                        continue;
                    }
                    let mut s = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        if j != k {
                            let d = z[k] - z[j];
                            if d.norm() > 0.0 {
                                s += d.inv();
                            }
                        }
                    }
                    let denom = Complex64::new(1.0, 0.0) - r * s;
                    let w = if denom.norm() > 1e-300 && (r / denom).is_finite() { r / denom } else { r };
                    z[k] -= w;
                }
            }
        }
    }
    AberthOutcome { converged: done.iter().all(|d| *d), roots: z, residuals: res, iterations: it }
}

/// All roots of `p` with `|p/p'| <= target_precision * max(1,|root|)`.
pub fn find_roots(p: &ExactPoly, target_precision: f64) -> Result<ComplexRootSet, RootError> {
    find_roots_with(p, &RootFinderConfig { tolerance: target_precision, ..RootFinderConfig::default() })
}

pub fn find_roots_with(p: &ExactPoly, cfg: &RootFinderConfig) -> Result<ComplexRootSet, RootError> {
    let deg = p.degree().filter(|&d| d >= 1).ok_or(RootError::DegreeTooLow)?;
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let core = ExactPoly::new(p.coeffs()[zeros..].to_vec());
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut residual = 0.0f64;
    if core.degree().unwrap_or(0) >= 1 {
        let fp = FixedPointPoly::new(&core, cfg);
        let log_c: Vec<f64> = fp
            .coeffs()
            .iter()
            .map(|c| if c.is_zero() { f64::NEG_INFINITY } else { log2_abs(c) })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let init = initial_guesses(&log_c, &mut rng);
        let out = aberth(&fp, init, cfg.tolerance, cfg.max_iterations);
        if !out.converged {
            let r = out.residuals.iter().cloned().fold(0.0, f64::max);
            return Err(RootError::NoConvergence { iterations: out.iterations, residual: r });
        }
        residual = out.residuals.iter().cloned().fold(0.0, f64::max);
        roots.extend(out.roots);
    }
    Ok(ComplexRootSet { roots, residual_bound: residual, source_degree: deg })
}

fn log2_abs(c: &BigInt) -> f64 {
    let b = c.bits() as i64;
    let sh = (b - 60).max(0);
    bigint_to_f64_scaled(&c.abs(), sh).log2() + sh as f64
}

/// Roots of `R_{m,n,P}`. For `m < n` the exact factor `P^{n-m}` is split off first, so
/// the roots of `P` enter with multiplicity `n - m` and only the cofactor is iterated on.
pub fn find_descendant_roots(p: &ExactPoly, n: u32, m: usize, cfg: &RootFinderConfig) -> Result<ComplexRootSet, RootError> {
    let r = rodrigues_descendant(p, n, m).poly;
    let deg = r.degree().filter(|&d| d >= 1).ok_or(RootError::DegreeTooLow)?;
    if m >= n as usize {
        return find_roots_with(&r, cfg);
    }
    let k = n - m as u32;
    let s = r.div_exact(&p.pow(k)).map_err(|_| RootError::DegreeTooLow)?;
    let pr = find_roots_with(p, cfg)?;
    let mut roots = Vec::with_capacity(deg);
    for z in &pr.roots {
        for _ in 0..k {
            roots.push(*z);
        }
    }
    let mut residual = pr.residual_bound;
    if s.degree().unwrap_or(0) >= 1 {
        let sr = find_roots_with(&s, cfg)?;
        residual = residual.max(sr.residual_bound);
        roots.extend(sr.roots);
    }
    Ok(ComplexRootSet { roots, residual_bound: residual, source_degree: deg })
}

/// Roots of a polynomial with complex double coefficients, optionally warm-started.
pub fn solve_complex(c: &[Complex64], warm: Option<&[Complex64]>, tol: f64) -> Result<Vec<Complex64>, RootError> {
    let cp = ComplexPoly::new(c.to_vec());
    let n = cp.degree();
    if n == 0 {
        return Err(RootError::DegreeTooLow);
    }
    let init = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        _ => {
            let log_c: Vec<f64> = cp.c.iter().map(|v| if v.norm() == 0.0 { f64::NEG_INFINITY } else { v.norm().log2() }).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            initial_guesses(&log_c, &mut rng)
        }
    };
    let out = aberth(&cp, init, tol, 500);
    if !out.converged {
        let mut out2 = aberth(&cp, out.roots, tol * 1e3, 500);
        if !out2.converged {
            let r = out2.residuals.iter().cloned().fold(0.0, f64::max);
            return Err(RootError::NoConvergence { iterations: out2.iterations, residual: r });
        }
        polish(&cp, &mut out2.roots);
        return Ok(out2.roots);
    }
    let mut roots = out.roots;
    polish(&cp, &mut roots);
    Ok(roots)
}

fn polish(cp: &ComplexPoly, roots: &mut [Complex64]) {
    for z in roots.iter_mut() {
        for _ in 0..2 {
            if let NewtonStep::Ratio(r) = cp.newton_ratio(*z) {
                if r.is_finite() {
                    *z -= r;
                }
            }
        }
    }
}

pub fn empirical_measure(r: &ComplexRootSet) -> Result<EmpiricalMeasure, RootError> {
    if r.roots.is_empty() {
        return Err(RootError::EmptyRootSet);
    }
    let w = 1.0 / r.roots.len() as f64;
    let atoms: Vec<Atom> = r.roots.iter().map(|&z| Atom { location: z, mass: w }).collect();
    let total_mass = atoms.iter().map(|a| a.mass).sum();
    Ok(EmpiricalMeasure { atoms, total_mass })
}

/// `P'(z) / (deg P * P(z))` from the exact coefficients.
pub fn empirical_cauchy(p: &ExactPoly, z: Complex64) -> Result<Complex64, RootError> {
    let d = p.degree().filter(|&d| d >= 1).ok_or(RootError::DegreeTooLow)?;
    let fp = FixedPointPoly::new(p, &RootFinderConfig::default());
    match fp.newton_ratio(z) {
        NewtonStep::ExactRoot => Err(RootError::EvaluationAtRoot),
        NewtonStep::Flat => Ok(Complex64::new(0.0, 0.0)),
        NewtonStep::Ratio(r) => Ok(r.inv() / d as f64),
    }
}

/// Every root within `tol` of the convex hull of the roots of `P`.
pub fn hull_containment(roots: &ComplexRootSet, p: &ExactPoly, tol: f64) -> bool {
    let pr = match p.degree() {
        Some(0) | None => return roots.roots.is_empty(),
        _ => match find_roots(p, 1e-14) {
            Ok(r) => r,
            Err(_) => return false,
        },
    };
    let hull = convex_hull(&pr.roots);
    roots.roots.iter().all(|z| hull_distance(*z, &hull) <= tol)
}
