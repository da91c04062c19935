//! The symbol curve in `(z, C)`, its rescaling in `(z, W)`, the saddle point curve
//! in `(z, u)`, branch points and slopes at infinity.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::{One, Signed};

use crate::error::CurveError;
use crate::exactpoly::{factorial, int, rat_to_f64, ExactPoly, Rational};
use crate::rootfind::find_roots;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveVariable {
    C,
    W,
    U,
}

impl CurveVariable {
    pub fn name(self) -> &'static str {
        match self {
            CurveVariable::C => "C",
            CurveVariable::W => "W",
            CurveVariable::U => "u",
        }
    }
}

/// `Σ_j coeffs[j](z) v^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateCurve {
    pub coeffs: Vec<ExactPoly>,
    pub variable: CurveVariable,
    pub alpha: Rational,
    pub base_degree: usize,
}

impl BivariateCurve {
    /// Coefficients in the curve variable at a fixed `z`.
    pub fn fiber_coeffs(&self, z: Complex64) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.eval_f64(z)).collect()
    }

    pub fn eval(&self, z: Complex64, v: Complex64) -> Complex64 {
        crate::numeric::horner(&self.fiber_coeffs(z), v)
    }

    /// Value and the sum of term magnitudes, for relative residuals.
    pub fn eval_scaled(&self, z: Complex64, v: Complex64) -> (Complex64, f64) {
        let mut val = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        let mut vp = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            let t = c.eval_f64(z) * vp;
            val += t;
            scale += t.norm();
            vp *= v;
        }
        (val, scale)
    }

    /// Substitutes `v = factor * v'`.
    pub fn substitute_scale(&self, factor: &Rational, variable: CurveVariable) -> BivariateCurve {
        let mut f = Rational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.scale(&f));
            f *= factor;
        }
        BivariateCurve { coeffs, variable, alpha: self.alpha.clone(), base_degree: self.base_degree }
    }

    pub fn scale(&self, c: &Rational) -> BivariateCurve {
        BivariateCurve { coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(), ..self.clone() }
    }

    /// Degree in the curve variable.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn check_alpha(p: &ExactPoly, alpha: &Rational) -> Result<usize, CurveError> {
    let d = p.degree().filter(|&d| d >= 1).ok_or(CurveError::DegreeTooLow)?;
    if !alpha.is_positive() || *alpha >= int(d as i64) {
        return Err(CurveError::BadAlpha);
    }
    Ok(d)
}

/// `Σ_k α^{k-1}(α-k)(d-α)^{d-k}/k! P^{(k)} C^{d-k}`, stored without any overall normalisation.
pub fn symbol_curve(p: &ExactPoly, alpha: &Rational) -> Result<BivariateCurve, CurveError> {
    let d = check_alpha(p, alpha)?;
    let dm = int(d as i64) - alpha;
    let mut coeffs = vec![ExactPoly::zero(); d + 1];
    for k in 0..=d {
        let c = alpha.pow(k as i32 - 1) * (alpha - int(k as i64)) * dm.pow((d - k) as i32)
            / Rational::from_integer(factorial(k));
        coeffs[d - k] = p.derivative(k).scale(&c);
    }
    Ok(BivariateCurve { coeffs, variable: CurveVariable::C, alpha: alpha.clone(), base_degree: d })
}

/// `Σ_k (α-k)/k! P^{(k)} W^{d-k}`.
pub fn scaled_symbol_curve(p: &ExactPoly, alpha: &Rational) -> Result<BivariateCurve, CurveError> {
    let d = check_alpha(p, alpha)?;
    let mut coeffs = vec![ExactPoly::zero(); d + 1];
    for k in 0..=d {
        let c = (alpha - int(k as i64)) / Rational::from_integer(factorial(k));
        coeffs[d - k] = p.derivative(k).scale(&c);
    }
    Ok(BivariateCurve { coeffs, variable: CurveVariable::W, alpha: alpha.clone(), base_degree: d })
}

/// `F(z,u) = P'(u)(u-z) - αP(u)` as a polynomial in `u` with coefficients affine in `z`.
pub fn saddle_curve(p: &ExactPoly, alpha: &Rational) -> Result<BivariateCurve, CurveError> {
    let d = check_alpha(p, alpha)?;
    let mut coeffs = Vec::with_capacity(d + 1);
    for j in 0..=d {
        let c0 = (int(j as i64) - alpha) * p.coeff(j);
        let c1 = -(int(j as i64 + 1) * p.coeff(j + 1));
        coeffs.push(ExactPoly::new(vec![c0, c1]));
    }
    Ok(BivariateCurve { coeffs, variable: CurveVariable::U, alpha: alpha.clone(), base_degree: d })
}

/// `C = α/((d-α)(u-z))`.
pub fn to_symbol_coords(z: Complex64, u: Complex64, alpha: f64, d: usize) -> Result<Complex64, CurveError> {
    let w = u - z;
    if w.norm() == 0.0 {
        return Err(CurveError::DegenerateInput);
    }
    Ok(alpha / ((d as f64 - alpha) * w))
}

/// `u = z + α/((d-α)C)`.
pub fn from_symbol_coords(z: Complex64, c: Complex64, alpha: f64, d: usize) -> Result<Complex64, CurveError> {
    if c.norm() == 0.0 {
        return Err(CurveError::DegenerateInput);
    }
    Ok(z + alpha / ((d as f64 - alpha) * c))
}

fn trim(v: &mut Vec<ExactPoly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Pseudo-remainder of `a` by `b` as polynomials over `Q[z]`.
fn prem(a: &[ExactPoly], b: &[ExactPoly]) -> Vec<ExactPoly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return r;
    }
    let mut e = (r.len() - 1) - db + 1;
    while r.len() >= b.len() {
        let k = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[j + k] = &r[j + k] - &(&lr * bc);
        }
        r.pop();
        trim(&mut r);
        e -= 1;
    }
    let f = lb.pow(e as u32);
    r.iter().map(|c| c * &f).collect()
}

/// Resultant in the outer variable of two polynomials with coefficients in `Q[z]`,
/// by the subresultant pseudo-remainder sequence.
pub fn resultant_qz(a: &[ExactPoly], b: &[ExactPoly]) -> ExactPoly {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return ExactPoly::zero();
    }
    let mut s = Rational::one();
    if a.len() < b.len() {
        core::mem::swap(&mut a, &mut b);
        if (a.len() - 1) % 2 == 1 && (b.len() - 1) % 2 == 1 {
            s = -s;
        }
    }
    let mut g = ExactPoly::one();
    let mut h = ExactPoly::one();
    while b.len() > 1 {
        let da = a.len() - 1;
        let db = b.len() - 1;
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let div = &g * &h.pow(delta as u32);
        b = r.iter().map(|c| c.div_exact(&div).expect("subresultant division is exact")).collect();
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta as u32).div_exact(&h.pow(delta as u32 - 1)).expect("exact")
        };
        if b.is_empty() {
            return ExactPoly::zero();
        }
    }
    let da = a.len() - 1;
    let lb = &b[0];
    let hh = if da == 0 {
        ExactPoly::one()
    } else {
        lb.pow(da as u32).div_exact(&h.pow(da as u32 - 1)).expect("exact")
    };
    hh.scale(&s)
}

/// The discriminant of `F(z,u)` in `u`, up to the nonzero constant `lc_u(F)`.
pub fn saddle_discriminant(p: &ExactPoly, alpha: &Rational) -> Result<ExactPoly, CurveError> {
    let f = saddle_curve(p, alpha)?;
    let fu: Vec<ExactPoly> = (1..f.coeffs.len()).map(|j| f.coeffs[j].scale(&int(j as i64))).collect();
    Ok(resultant_qz(&f.coeffs, &fu))
}

/// Points of the z-plane over which two saddles coalesce.
pub fn branch_points(p: &ExactPoly, alpha: &Rational) -> Result<Vec<Complex64>, CurveError> {
    let disc = saddle_discriminant(p, alpha)?;
    if disc.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(find_roots(&disc, 1e-15)?.roots)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlopeData {
    pub essential_slope: Rational,
    pub other_slope: Rational,
    pub other_multiplicity: usize,
}

pub fn slopes_at_infinity(d: usize, alpha: &Rational) -> Result<SlopeData, CurveError> {
    if !alpha.is_positive() || *alpha >= int(d as i64) {
        return Err(CurveError::BadAlpha);
    }
    Ok(SlopeData {
        essential_slope: int(d as i64) / alpha - int(1),
        other_slope: int(-1),
        other_multiplicity: d - 1,
    })
}

/// `P` and `P'` both have simple roots.
pub fn strongly_generic(p: &ExactPoly) -> bool {
    p.degree().is_some_and(|d| d >= 1) && p.is_strongly_generic()
}

pub fn alpha_f64(alpha: &Rational) -> f64 {
    rat_to_f64(alpha)
}

impl BivariateCurve {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn z2m1() -> ExactPoly {
        ExactPoly::from_i64s(&[-1, 0, 1])
    }

    #[test]
    fn symbol_quadratic_matches_display() {
        // divide by (d - α) to get the displayed form
        let a = int(1);
        let s = symbol_curve(&z2m1(), &a).unwrap().scale(&(int(2) - &a).recip());
        assert_eq!(s.coeffs, vec![ExactPoly::from_i64s(&[-1]), ExactPoly::zero(), z2m1()]);
        // general α, displayed form (2-α)[(2-α)P C^2 + (α-1)P' C - α]
        for (n, dd) in [(1, 3), (1, 2), (3, 2), (7, 4)] {
            let a = rat(n, dd);
            let s = symbol_curve(&z2m1(), &a).unwrap();
            let t = int(2) - &a;
            let want = [
                ExactPoly::constant(-&a).scale(&t),
                ExactPoly::from_i64s(&[0, 2]).scale(&((&a - int(1)) * &t)),
                z2m1().scale(&(&t * &t)),
            ];
            assert_eq!(s.coeffs, want);
        }
    }

    #[test]
    fn symbol_cubic_matches_display() {
        let p = ExactPoly::from_i64s(&[0, 0, 0, 1]);
        let s = symbol_curve(&p, &int(1)).unwrap().scale(&rat(1, 2));
        assert_eq!(s.coeffs, vec![ExactPoly::from_i64s(&[-1]), ExactPoly::from_i64s(&[0, -3]), ExactPoly::zero(), ExactPoly::from_i64s(&[0, 0, 0, 4])]);
        // top coefficient is a multiple of P
        let q = ExactPoly::from_i64s(&[3, -1, 2, 5]);
        let s = symbol_curve(&q, &rat(5, 4)).unwrap();
        assert!(s.coeffs[3].div_rem(&q).unwrap().1.is_zero());
    }

    #[test]
    fn scaled_examples() {
        let w = scaled_symbol_curve(&z2m1(), &int(1)).unwrap();
        assert_eq!(w.coeffs, vec![ExactPoly::from_i64s(&[-1]), ExactPoly::zero(), z2m1()]);
        let p = ExactPoly::from_i64s(&[1, 2, 0, -3]);
        let a = rat(2, 3);
        let w = scaled_symbol_curve(&p, &a).unwrap();
        assert_eq!(w.coeffs[0], ExactPoly::constant((&a - int(3)) * int(-3)));
    }

    #[test]
    fn saddle_examples() {
        for a in [rat(1, 4), int(1), rat(3, 2)] {
            let f = saddle_curve(&z2m1(), &a).unwrap();
            let want = vec![ExactPoly::constant(a.clone()), ExactPoly::from_i64s(&[0, -2]), ExactPoly::constant(int(2) - &a)];
            assert_eq!(f.coeffs, want);
        }
        let p = ExactPoly::from_i64s(&[2, -1, 0, 3]);
        let a = rat(4, 3);
        let f = saddle_curve(&p, &a).unwrap();
        assert_eq!(f.coeffs[3], ExactPoly::constant((int(3) - &a) * int(3)));
        // F(z, z) = -αP(z)
        let z = Complex64::new(0.3, -1.1);
        let v = f.eval(z, z);
        assert!((v + rat_to_f64(&a) * p.eval_f64(z)).norm() < 1e-12);
    }

    #[test]
    fn coords() {
        let z = Complex64::new(2.0, 0.0);
        let u = z + 3f64.sqrt();
        let c = to_symbol_coords(z, u, 1.0, 2).unwrap();
        assert!((c.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(from_symbol_coords(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), 1.0, 2).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(to_symbol_coords(z, z, 1.0, 2), Err(CurveError::DegenerateInput));
        assert_eq!(from_symbol_coords(z, Complex64::new(0.0, 0.0), 1.0, 2), Err(CurveError::DegenerateInput));
    }

    #[test]
    fn quadratic_branch_points() {
        for (n, d) in [(1, 4), (1, 2), (1, 1), (3, 2)] {
            let a = rat(n, d);
            let af = n as f64 / d as f64;
            let b = (af * (2.0 - af)).sqrt();
            let mut bp = branch_points(&z2m1(), &a).unwrap();
            bp.sort_by(|x, y| x.re.total_cmp(&y.re));
            assert_eq!(bp.len(), 2);
            assert!((bp[0] + b).norm() < 1e-12 && (bp[1] - b).norm() < 1e-12, "{:?}", bp);
        }
        let bp = branch_points(&z2m1(), &rat(1, 2)).unwrap();
        assert!(bp.iter().all(|z| (z.norm() - 0.75f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn slopes() {
        let s = slopes_at_infinity(3, &int(1)).unwrap();
        assert_eq!((s.essential_slope, s.other_slope, s.other_multiplicity), (int(2), int(-1), 2));
        let s = slopes_at_infinity(2, &int(1)).unwrap();
        assert_eq!((s.essential_slope, s.other_multiplicity), (int(1), 1));
        assert!(slopes_at_infinity(2, &int(2)).is_err());
        // roots of (s+1)^{d-1}(α(s+1)-d)
        let a = rat(5, 3);
        let s = slopes_at_infinity(4, &a).unwrap();
        assert!((&a * (&s.essential_slope + int(1)) - int(4)).is_zero());
    }

    fn univariate_resultant(f: &ExactPoly, g: &ExactPoly) -> Rational {
        // Res(f, g) = lc(f)^{deg g} Π g(roots of f) via Euclid over Q
        let (df, dg) = (f.degree().unwrap(), g.degree().unwrap());
        if dg == 0 {
            return g.coeff(0).pow(df as i32);
        }
        let r = f.div_rem(g).unwrap().1;
        let sign = if df % 2 == 1 && dg % 2 == 1 { int(-1) } else { int(1) };
        if r.is_zero() {
            return int(0);
        }
        let dr = r.degree().unwrap();
        sign * g.leading().unwrap().pow((df - dr) as i32) * univariate_resultant(g, &r)
    }

    #[test]
    fn subresultant_matches_euclid_resultant() {
        let p = ExactPoly::from_i64s(&[1, -2, 0, 1, 3]);
        let a = rat(3, 5);
        let f = saddle_curve(&p, &a).unwrap();
        let disc = saddle_discriminant(&p, &a).unwrap();
        for z in [rat(0, 1), rat(1, 3), rat(-7, 2), rat(5, 1)] {
            let fu = ExactPoly::new(f.coeffs.iter().map(|c| c.eval(&z)).collect());
            let dfu = fu.derivative(1);
            assert_eq!(disc.eval(&z), univariate_resultant(&fu, &dfu));
        }
    }

    #[test]
    fn branch_points_match_critical_value_oracle() {
        // F = A(u) - z B(u) with A = uP' - αP, B = P'; branches meet where (A/B)' = 0.
        let p = ExactPoly::from_i64s(&[2, -3, 1, 1]);
        let a = rat(2, 3);
        let bb = p.derivative(1);
        let aa = &(&ExactPoly::x() * &bb) - &p.scale(&a);
        let crit = &(&aa.derivative(1) * &bb) - &(&aa * &bb.derivative(1));
        let us = find_roots(&crit, 1e-15).unwrap().roots;
        let oracle: Vec<Complex64> = us.iter().map(|&u| aa.eval_f64(u) / bb.eval_f64(u)).collect();
        let bp = branch_points(&p, &a).unwrap();
        assert_eq!(bp.len(), oracle.len());
        for z in &oracle {
            let best = bp.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-9, "{} {:?}", z, bp);
        }
    }

    fn rand_poly() -> impl Strategy<Value = ExactPoly> {
        (2usize..6, proptest::collection::vec(-6i64..7, 6)).prop_map(|(d, c)| {
            let mut v: Vec<i64> = c[..=d].to_vec();
            if v[d] == 0 {
                v[d] = 1;
            }
            ExactPoly::from_i64s(&v)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn rescaling_reproduces_symbol(p in rand_poly(), num in 1i64..40, den in 1i64..9) {
            let d = p.degree().unwrap() as i64;
            let a = rat(num % (d * den - 1) + 1, den);
            prop_assume!(a < int(d));
            let w = scaled_symbol_curve(&p, &a).unwrap();
            let factor = (int(d) - &a) / &a;
            let sub = w.substitute_scale(&factor, CurveVariable::C).scale(&a.pow(d as i32 - 1));
            prop_assert_eq!(sub.coeffs, symbol_curve(&p, &a).unwrap().coeffs);
        }

        #[test]
        fn birational_link(p in rand_poly(), num in 1i64..40, den in 1i64..9, zr in -2.0f64..2.0, zi in -2.0f64..2.0) {
            let d = p.degree().unwrap();
            let a = rat(num % (d as i64 * den - 1) + 1, den);
            prop_assume!(a < int(d as i64));
            let af = rat_to_f64(&a);
            let f = saddle_curve(&p, &a).unwrap();
            let s = symbol_curve(&p, &a).unwrap();
            let z = Complex64::new(zr, zi);
            let us = crate::rootfind::solve_complex(&f.fiber_coeffs(z), None, 1e-15).unwrap();
            for u in us {
                prop_assume!((u - z).norm() > 1e-6);
                let c = to_symbol_coords(z, u, af, d).unwrap();
                let (v, sc) = s.eval_scaled(z, c);
                prop_assert!(v.norm() <= 1e-10 * sc.max(1.0));
                let back = from_symbol_coords(z, c, af, d).unwrap();
                prop_assert!((back - u).norm() <= 1e-12 * (1.0 + u.norm()));
            }
        }
    }
}
