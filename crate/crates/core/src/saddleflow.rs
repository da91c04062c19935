//! Saddle points of `G(z,u) = (1/α) log|P(u)| - log|u-z|` in `u`, ascent paths and
//! relevance classification.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::curves::saddle_curve;
use crate::error::SaddleError;
use crate::exactpoly::{rat_to_f64, ExactPoly, Rational};
use crate::numeric::{horner, poly_derivative_c};
use crate::rootfind::{find_roots, solve_complex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relevance {
    NonRelevant,
    Relevant,
    MaximallyRelevant,
}

impl Relevance {
    pub fn name(self) -> &'static str {
        match self {
            Relevance::NonRelevant => "non-relevant",
            Relevance::Relevant => "relevant",
            Relevance::MaximallyRelevant => "maximally-relevant",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointClass {
    PolePlus,
    Infinity,
    Unresolved,
}

impl EndpointClass {
    pub fn name(self) -> &'static str {
        match self {
            EndpointClass::PolePlus => "pole",
            EndpointClass::Infinity => "infinity",
            EndpointClass::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Saddle {
    pub u: Complex64,
    pub g: f64,
    pub h: f64,
    pub second_deriv: Complex64,
    pub simple: bool,
    pub relevance: Option<Relevance>,
    pub endpoints: Option<[EndpointClass; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleFiber {
    pub z: Complex64,
    pub saddles: Vec<Saddle>,
    pub max_index: Option<usize>,
}

impl SaddleFiber {
    pub fn max_saddle(&self) -> Option<&Saddle> {
        self.max_index.map(|i| &self.saddles[i])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscentPath {
    pub points: Vec<Complex64>,
    pub endpoint_class: EndpointClass,
    pub arc_length: f64,
}

/// Tolerances of the ascent tracer.
#[derive(Clone, Debug)]
pub struct TracerConfig {
    pub min_step: f64,
    pub max_steps: usize,
    pub near_delta: f64,
    /// Stop tracing once the maximal candidate is found.
    pub early_exit: bool,
}

impl Default for TracerConfig {
    fn default() -> Self {
        TracerConfig { min_step: 1e-9, max_steps: 20000, near_delta: 1e-9, early_exit: true }
    }
}

/// Precomputed double-precision data for one `(P, α)`.
#[derive(Clone, Debug)]
pub struct PhaseField {
    pub alpha: f64,
    pub alpha_exact: Rational,
    pub d: usize,
    p: Vec<Complex64>,
    dp: Vec<Complex64>,
    ddp: Vec<Complex64>,
    pub roots: Vec<Complex64>,
    pub root_radius: f64,
    fiber_a: Vec<Complex64>,
    fiber_b: Vec<Complex64>,
    pub config: TracerConfig,
}

impl PhaseField {
    pub fn new(p: &ExactPoly, alpha: &Rational) -> Result<Self, SaddleError> {
        let curve = saddle_curve(p, alpha)?;
        let d = curve.base_degree;
        let pc = p.to_complex64();
        let dp = poly_derivative_c(&pc);
        let ddp = poly_derivative_c(&dp);
        let roots = find_roots(p, 1e-15).map_err(|e| SaddleError::Curve(e.into()))?.roots;
        let root_radius = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let fiber_a = curve.coeffs.iter().map(|c| Complex64::new(rat_to_f64(&c.coeff(0)), 0.0)).collect();
        let fiber_b = curve.coeffs.iter().map(|c| Complex64::new(rat_to_f64(&c.coeff(1)), 0.0)).collect();
        Ok(PhaseField {
            alpha: rat_to_f64(alpha),
            alpha_exact: alpha.clone(),
            d,
            p: pc,
            dp,
            ddp,
            roots,
            root_radius,
            fiber_a,
            fiber_b,
            config: TracerConfig::default(),
        })
    }

    /// `(d - α)/α`
    pub fn beta(&self) -> f64 {
        (self.d as f64 - self.alpha) / self.alpha
    }

    pub fn g_value(&self, z: Complex64, u: Complex64) -> Result<f64, SaddleError> {
        let pu = horner(&self.p, u);
        let w = u - z;
        if pu.norm() == 0.0 || w.norm() == 0.0 {
            return Err(SaddleError::PoleHit);
        }
        let g = pu.norm().ln() / self.alpha - w.norm().ln();
        if g.is_finite() {
            Ok(g)
        } else {
            Err(SaddleError::PoleHit)
        }
    }

    pub fn h_value(&self, z: Complex64, u: Complex64) -> Result<f64, SaddleError> {
        Ok(self.g_value(z, u)? / self.beta())
    }

    /// `∂k/∂u` for `k = (1/α) log P(u) - log(u - z)`.
    pub fn k_prime(&self, z: Complex64, u: Complex64) -> Complex64 {
        horner(&self.dp, u) / (self.alpha * horner(&self.p, u)) - (u - z).inv()
    }

    pub fn k_second(&self, z: Complex64, u: Complex64) -> Complex64 {
        let p = horner(&self.p, u);
        let dp = horner(&self.dp, u);
        let ddp = horner(&self.ddp, u);
        (ddp * p - dp * dp) / (self.alpha * p * p) + (u - z).powi(-2)
    }

    pub fn fiber_coeffs(&self, z: Complex64) -> Vec<Complex64> {
        self.fiber_a.iter().zip(&self.fiber_b).map(|(a, b)| a + b * z).collect()
    }

    pub fn pole_radius(&self, z: Complex64) -> f64 {
        1e-6 * (1.0 + z.norm())
    }

    pub fn escape_radius(&self, z: Complex64) -> f64 {
        10.0 * (1.0 + self.root_radius + z.norm())
    }

    /// Saddles at `z`, unclassified. `warm` seeds the polynomial solver.
    pub fn solve_fiber_warm(&self, z: Complex64, warm: Option<&[Complex64]>) -> Result<SaddleFiber, SaddleError> {
        let fiber = self.solve_fiber_unchecked(z, warm)?;
        let us: Vec<Complex64> = fiber.saddles.iter().map(|s| s.u).collect();
        let scale = 1.0 + us.iter().map(|u| u.norm()).fold(0.0, f64::max);
        let mut sep = f64::INFINITY;
        for i in 0..us.len() {
            for j in i + 1..us.len() {
                sep = sep.min((us[i] - us[j]).norm());
            }
        }
        if sep < 1e-7 * scale {
            return Err(SaddleError::BranchPoint { separation: sep });
        }
        Ok(fiber)
    }

    /// Like [`solve_fiber_warm`](Self::solve_fiber_warm) but accepts coalescing saddles.
    pub fn solve_fiber_unchecked(&self, z: Complex64, warm: Option<&[Complex64]>) -> Result<SaddleFiber, SaddleError> {
        let c = self.fiber_coeffs(z);
        let us = solve_complex(&c, warm, 1e-15).map_err(|e| SaddleError::Curve(e.into()))?;
        let scale = 1.0 + us.iter().map(|u| u.norm()).fold(0.0, f64::max);
        let mut saddles = Vec::with_capacity(us.len());
        for u in us {
            if (u - z).norm() < 1e-12 * scale {
                return Err(SaddleError::PoleHit);
            }
            let g = self.g_value(z, u)?;
            let k2 = self.k_second(z, u);
            let simple = k2.norm() * (u - z).norm_sqr() > 1e-8;
            saddles.push(Saddle { u, g, h: g / self.beta(), second_deriv: k2, simple, relevance: None, endpoints: None });
        }
        Ok(SaddleFiber { z, saddles, max_index: None })
    }

    pub fn solve_fiber(&self, z: Complex64) -> Result<SaddleFiber, SaddleError> {
        self.solve_fiber_warm(z, None)
    }

    /// Unit ascent eigendirection of the quadratic model at a saddle.
    pub fn ascent_direction(&self, k2: Complex64, dir: Direction) -> Complex64 {
        let v = Complex64::from_polar(1.0, -k2.arg() / 2.0);
        match dir {
            Direction::Plus => v,
            Direction::Minus => -v,
        }
    }

    /// Follows the gradient of `G(z, ·)` from the saddle `u0`.
    ///
    /// `others` are the remaining saddles of the fiber: a path that runs into one of
    /// them continues along that saddle's first ascent direction.
    pub fn trace_ascent(&self, z: Complex64, u0: Complex64, dir: Direction, others: &[Complex64]) -> Result<AscentPath, SaddleError> {
        let eps_pole = self.pole_radius(z);
        let r_esc = self.escape_radius(z);
        let max_step = 0.05 * r_esc;
        let min_step = self.config.min_step;
        let k2 = self.k_second(z, u0);
        let off = 10.0 * f64::EPSILON.sqrt() * (1.0 + u0.norm());
        let mut u = u0 + self.ascent_direction(k2, dir) * off;
        let mut g = self.g_value(z, u)?;
        let mut points = vec![u0, u];
        let mut arc = off;
        let mut step = off;
        let mut visited = vec![u0];
        for it in 0..self.config.max_steps {
            if (u - z).norm() < eps_pole {
                return Ok(AscentPath { points, endpoint_class: EndpointClass::PolePlus, arc_length: arc });
            }
            if u.norm() > r_esc {
                return Ok(AscentPath { points, endpoint_class: EndpointClass::Infinity, arc_length: arc });
            }
            let grad = self.k_prime(z, u).conj();
            let gn = grad.norm();
            let hop = |u: Complex64, radius: f64, visited: &[Complex64]| {
                others.iter().copied().find(|s| (u - s).norm() < radius * (1.0 + s.norm()) && visited.iter().all(|v| (v - s).norm() > 0.0))
            };
            if let Some(s) = hop(u, 1e-6, &visited) {
                let k2s = self.k_second(z, s);
                let nu = s + self.ascent_direction(k2s, Direction::Plus) * off;
                let ng = self.g_value(z, nu)?;
                if ng > g {
                    visited.push(s);
                    arc += (nu - u).norm();
                    points.push(s);
                    points.push(nu);
                    u = nu;
                    g = ng;
                    step = off;
                    continue;
                }
            }
            if gn.is_nan() || gn <= 0.0 || !gn.is_finite() {
                return Err(SaddleError::StepFailure { steps: it });
            }
            let dist_roots = self.roots.iter().map(|r| (u - r).norm()).fold(f64::INFINITY, f64::min);
            let local = 0.1 * (u - z).norm().min(dist_roots).min(1.0 + u.norm());
            step = (2.0 * step).min(local).min(max_step).max(min_step);
            let e = grad / gn;
            loop {
                let cand = u + e * step;
                match self.g_value(z, cand) {
                    Ok(gc) if gc > g => {
                        arc += step;
                        u = cand;
                        g = gc;
                        points.push(u);
                        break;
                    }
                    _ => {
                        step *= 0.5;
                        if step < min_step {
                            if let Some(s) = hop(u, 1e-4, &visited) {
                                let k2s = self.k_second(z, s);
                                let nu = s + self.ascent_direction(k2s, Direction::Plus) * off;
                                visited.push(s);
                                points.push(s);
                                u = nu;
                                g = self.g_value(z, nu)?;
                                points.push(u);
                                step = off;
                                break;
                            }
                            return Err(SaddleError::StepFailure { steps: it });
                        }
                    }
                }
            }
        }
        Ok(AscentPath { points, endpoint_class: EndpointClass::Unresolved, arc_length: arc })
    }

    /// Traces both ascent paths of every saddle, highest `G` first, and marks the
    /// maximally relevant one: the highest saddle joining the pole at `u = z` to infinity.
    pub fn classify(&self, fiber: &SaddleFiber) -> Result<SaddleFiber, SaddleError> {
        self.classify_with(fiber, &self.config)
    }

    pub fn classify_with(&self, fiber: &SaddleFiber, cfg: &TracerConfig) -> Result<SaddleFiber, SaddleError> {
        let mut out = fiber.clone();
        let n = out.saddles.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| out.saddles[b].g.total_cmp(&out.saddles[a].g));
        for w in order.windows(2) {
            let gap = out.saddles[w[0]].g - out.saddles[w[1]].g;
            if gap < cfg.near_delta {
                return Err(SaddleError::NearDelta { gap });
            }
        }
        let us: Vec<Complex64> = out.saddles.iter().map(|s| s.u).collect();
        let mut best: Option<usize> = None;
        for &i in &order {
            if best.is_some() && cfg.early_exit {
                break;
            }
            let others: Vec<Complex64> = us.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, u)| *u).collect();
            let mut ends = [EndpointClass::Unresolved; 2];
            for (k, dir) in [Direction::Plus, Direction::Minus].into_iter().enumerate() {
                ends[k] = match self.trace_ascent(fiber.z, us[i], dir, &others) {
                    Ok(p) => p.endpoint_class,
                    Err(_) => EndpointClass::Unresolved,
                };
            }
            out.saddles[i].endpoints = Some(ends);
            let distinct = matches!(
                ends,
                [EndpointClass::PolePlus, EndpointClass::Infinity] | [EndpointClass::Infinity, EndpointClass::PolePlus]
            );
            if distinct && best.is_none() {
                best = Some(i);
            }
        }
        let bi = best.ok_or(SaddleError::AmbiguousClassification)?;
        let gmax = out.saddles[bi].g;
        for (i, s) in out.saddles.iter_mut().enumerate() {
            s.relevance = Some(if i == bi {
                Relevance::MaximallyRelevant
            } else if s.g < gmax {
                Relevance::Relevant
            } else {
                Relevance::NonRelevant
            });
        }
        out.max_index = Some(bi);
        Ok(out)
    }

    /// Solve and classify in one go.
    pub fn classified_fiber(&self, z: Complex64) -> Result<SaddleFiber, SaddleError> {
        let f = self.solve_fiber(z)?;
        self.classify(&f)
    }
}

pub fn g_value(p: &ExactPoly, alpha: &Rational, z: Complex64, u: Complex64) -> Result<f64, SaddleError> {
    PhaseField::new(p, alpha)?.g_value(z, u)
}

pub fn h_value(p: &ExactPoly, alpha: &Rational, z: Complex64, u: Complex64) -> Result<f64, SaddleError> {
    PhaseField::new(p, alpha)?.h_value(z, u)
}

pub fn solve_fiber(p: &ExactPoly, alpha: &Rational, z: Complex64) -> Result<SaddleFiber, SaddleError> {
    PhaseField::new(p, alpha)?.solve_fiber(z)
}

pub fn trace_ascent(p: &ExactPoly, alpha: &Rational, z: Complex64, u0: Complex64, dir: Direction) -> Result<AscentPath, SaddleError> {
    let f = PhaseField::new(p, alpha)?;
    let fiber = f.solve_fiber(z)?;
    let others: Vec<Complex64> = fiber.saddles.iter().map(|s| s.u).filter(|u| (u - u0).norm() > 1e-9 * (1.0 + u0.norm())).collect();
    f.trace_ascent(z, u0, dir, &others)
}

pub fn classify_fiber(p: &ExactPoly, alpha: &Rational, fiber: &SaddleFiber) -> Result<SaddleFiber, SaddleError> {
    PhaseField::new(p, alpha)?.classify(fiber)
}
