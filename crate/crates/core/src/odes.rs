//! Linear differential operators annihilating Rodrigues descendants, the formal
//! `n → ∞` limit that turns them into the symbol curve, and the multiple
//! orthogonality integrals.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::curves::{BivariateCurve, CurveVariable};
use crate::error::OdeError;
use crate::exactpoly::{factorial, int, rat_to_f64, rodrigues_descendant, ExactPoly, ExactRatFun, Rational, TruncatedSeries};
use crate::numeric::segment_integral;
use crate::rootfind::{find_roots, FixedPointPoly, RootFinderConfig};

/// `Σ_i coeffs[i] y^{(order-i)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearODE {
    pub order: usize,
    pub coeffs: Vec<ExactPoly>,
}

impl LinearODE {
    /// Integer coefficients with no common factor; the first nonzero coefficient has
    /// positive leading term.
    pub fn new(coeffs: Vec<ExactPoly>) -> Self {
        let order = coeffs.len() - 1;
        let mut l = BigInt::one();
        let mut g = BigInt::zero();
        for c in coeffs.iter().flat_map(|p| p.coeffs()) {
            l = l.lcm(c.denom());
        }
        let lr = Rational::from_integer(l);
        let mut scaled: Vec<ExactPoly> = coeffs.iter().map(|p| p.scale(&lr)).collect();
        for c in scaled.iter().flat_map(|p| p.coeffs()) {
            g = g.gcd(c.numer());
        }
        if !g.is_zero() {
            let neg = scaled.iter().find(|p| !p.is_zero()).is_some_and(|p| p.leading().unwrap().is_negative());
            if neg {
                g = -g;
            }
            let gr = Rational::from_integer(g).recip();
            scaled = scaled.iter().map(|p| p.scale(&gr)).collect();
        }
        LinearODE { order, coeffs: scaled }
    }

    pub fn apply_poly(&self, y: &ExactPoly) -> ExactPoly {
        let mut acc = ExactPoly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = &acc + &(c * &y.derivative(self.order - i));
        }
        acc
    }

    pub fn apply_ratfun(&self, y: &ExactRatFun) -> ExactRatFun {
        let mut acc = ExactRatFun::from_poly(ExactPoly::zero());
        let mut der = y.clone();
        let mut ders = vec![y.clone()];
        for _ in 0..self.order {
            der = der.derivative(1);
            ders.push(der.clone());
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            acc = acc.add(&ders[self.order - i].scale_poly(c));
        }
        acc
    }

    /// Residual series; only its first `len - order` coefficients are meaningful.
    pub fn apply_series(&self, y: &TruncatedSeries) -> TruncatedSeries {
        let keep = y.order().saturating_sub(self.order);
        let mut ders = vec![y.clone()];
        for _ in 0..self.order {
            let next = ders.last().unwrap().derivative();
            ders.push(next);
        }
        let mut acc: Option<TruncatedSeries> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            let mut yd = ders[self.order - i].clone();
            yd.coeffs.truncate(keep);
            let cs = TruncatedSeries::from_poly(c, &y.center, keep);
            let t = cs.mul(&yd);
            acc = Some(match acc {
                None => t,
                Some(a) => TruncatedSeries {
                    center: a.center.clone(),
                    coeffs: a.coeffs.iter().zip(&t.coeffs).map(|(x, y)| x.add(y)).collect(),
                },
            });
        }
        acc.unwrap()
    }
}

fn fact_r(n: usize) -> Rational {
    Rational::from_integer(factorial(n))
}

fn deg0(p: &ExactPoly) -> usize {
    p.degree().unwrap_or(0)
}

/// Operator for `(P e^T / Q)^n` differentiated `m` times; order `deg P + deg Q + deg T`.
pub fn build_ode_general(p: &ExactPoly, q: &ExactPoly, t: &ExactPoly, n: u32, m: usize) -> LinearODE {
    let d = deg0(p) + deg0(q) + deg0(t);
    let n_r = int(n as i64);
    let pd: Vec<ExactPoly> = (0..=d).map(|k| p.derivative(k)).collect();
    let qd: Vec<ExactPoly> = (0..=d).map(|k| q.derivative(k)).collect();
    let td: Vec<ExactPoly> = (0..=d).map(|k| t.derivative(k)).collect();
    let mut coeffs = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut c = ExactPoly::zero();
        for j in 0..=i {
            for k in 0..=j {
                let denom = fact_r(m + d - i) * fact_r(i - j) * fact_r(j - k) * fact_r(k);
                let mut bracket = ExactPoly::zero();
                if k == 0 {
                    let v = int((m + d - i) as i64) + &n_r * int(2 * j as i64 - i as i64);
                    bracket = ExactPoly::constant(v);
                }
                bracket = &bracket - &td[k].scale(&(&n_r * int(k as i64)));
                if bracket.is_zero() {
                    continue;
                }
                let term = &(&bracket * &pd[i - j]) * &qd[j - k];
                c = &c + &term.scale(&denom.recip());
            }
        }
        coeffs.push(c);
    }
    LinearODE::new(coeffs)
}

/// Operator for `(P/Q)^n` differentiated `m` times; order `deg P + deg Q`.
pub fn build_ode_rational(p: &ExactPoly, q: &ExactPoly, n: u32, m: usize) -> LinearODE {
    let d = deg0(p) + deg0(q);
    let mut coeffs = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let mut c = ExactPoly::zero();
        for j in 0..=i {
            let num = int((m + d) as i64) + int(n as i64 - 1) * int(i as i64) - int(2 * n as i64 * j as i64);
            let denom = fact_r(m + d - i) * fact_r(i - j) * fact_r(j);
            let term = &p.derivative(j) * &q.derivative(i - j);
            c = &c + &term.scale(&(num / denom));
        }
        coeffs.push(c);
    }
    LinearODE::new(coeffs)
}

/// Operator of order `deg P` annihilating `R_{m,n,P}`.
pub fn build_ode_poly(p: &ExactPoly, n: u32, m: usize) -> LinearODE {
    let d = deg0(p);
    let (n_i, m_i, d_i) = (n as i64, m as i64, d as i64);
    let coeffs = (0..=d)
        .map(|i| {
            let num = int((m_i - n_i * d_i) - (i as i64 - d_i) * (n_i + 1));
            p.derivative(i).scale(&(num / (fact_r(d + m - i) * fact_r(i))))
        })
        .collect();
    LinearODE::new(coeffs)
}

/// The diagonal case `m = n`.
pub fn build_ode_diagonal(p: &ExactPoly, n: u32) -> LinearODE {
    build_ode_poly(p, n, n as usize)
}

/// Polynomial in two formal symbols, stored as `Σ_k c_k(n) m^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NmPoly {
    pub by_m: Vec<ExactPoly>,
}

impl NmPoly {
    pub fn constant(c: Rational) -> Self {
        NmPoly { by_m: vec![ExactPoly::constant(c)] }.trimmed()
    }

    /// `a m + b n + c`
    pub fn linear(a: i64, b: i64, c: i64) -> Self {
        NmPoly { by_m: vec![ExactPoly::from_i64s(&[c, b]), ExactPoly::from_i64s(&[a])] }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.by_m.last().is_some_and(|c| c.is_zero()) {
            self.by_m.pop();
        }
        self
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.by_m.is_empty() || o.by_m.is_empty() {
            return NmPoly { by_m: Vec::new() };
        }
        let mut v = vec![ExactPoly::zero(); self.by_m.len() + o.by_m.len() - 1];
        for (i, a) in self.by_m.iter().enumerate() {
            for (j, b) in o.by_m.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        NmPoly { by_m: v }.trimmed()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        NmPoly { by_m: self.by_m.iter().map(|p| p.scale(c)).collect() }.trimmed()
    }

    /// Exact quotient by `m + c`, if there is no remainder.
    pub fn div_m_plus(&self, c: i64) -> Option<Self> {
        if self.by_m.is_empty() {
            return Some(self.clone());
        }
        let k = self.by_m.len() - 1;
        let cr = ExactPoly::from_i64s(&[c]);
        let mut q = vec![ExactPoly::zero(); k];
        let mut carry = ExactPoly::zero();
        for i in (1..=k).rev() {
            let a = &self.by_m[i] - &(&cr * &carry);
            q[i - 1] = a.clone();
            carry = a;
        }
        let rem = &self.by_m[0] - &(&cr * &carry);
        if rem.is_zero() {
            Some(NmPoly { by_m: q }.trimmed())
        } else {
            None
        }
    }

    pub fn eval(&self, n: &Rational, m: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.by_m.iter().rev() {
            acc = acc * m + c.eval(n);
        }
        acc
    }

    /// Substitutes `m = α n`, leaving a polynomial in `n`.
    pub fn along_ray(&self, alpha: &Rational) -> ExactPoly {
        let an = ExactPoly::new(vec![Rational::zero(), alpha.clone()]);
        let mut acc = ExactPoly::zero();
        for c in self.by_m.iter().rev() {
            acc = &(&acc * &an) + c;
        }
        acc
    }
}

/// Family of operators with `n, m` left formal: coefficient of `y^{(d-i)}` is
/// `scalars[i](n,m) P^{(i)}(z)`, already multiplied through by `(m+d-1)!`.
#[derive(Clone, Debug)]
pub struct SymbolicOdeFamily {
    pub order: usize,
    pub base: ExactPoly,
    pub scalars: Vec<NmPoly>,
}

impl SymbolicOdeFamily {
    pub fn specialize(&self, n: u32, m: usize) -> LinearODE {
        let (nr, mr) = (int(n as i64), int(m as i64));
        LinearODE::new(
            self.scalars.iter().enumerate().map(|(i, s)| self.base.derivative(i).scale(&s.eval(&nr, &mr))).collect(),
        )
    }
}

pub fn symbolic_ode_poly(p: &ExactPoly) -> SymbolicOdeFamily {
    let d = deg0(p);
    let di = d as i64;
    let mut scalars = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let ii = i as i64;
        // (m - nd) - (i - d)(n + 1)
        let num = NmPoly::linear(1, -ii, di - ii);
        let s = if i == 0 {
            // (m+d-1)!/(m+d)! = 1/(m+d), and the numerator is exactly m+d
            num.div_m_plus(di).expect("numerator of the leading term is m + d")
        } else {
            let mut acc = num;
            for t in 1..i as i64 {
                acc = acc.mul(&NmPoly::linear(1, 0, di - t));
            }
            acc
        };
        scalars.push(s.scale(&fact_r(i).recip()));
    }
    SymbolicOdeFamily { order: d, base: p.clone(), scalars }
}

/// Formal limit of the descendant ODE along `m = αn`: substitute the ray, replace
/// `y^{(d-i)}/y` by `(n(d-α)C)^{d-i}`, divide by `n^d` and keep the top coefficient.
pub fn limit_symbol(p: &ExactPoly, alpha: &Rational) -> Result<BivariateCurve, OdeError> {
    let d = deg0(p);
    if !alpha.is_positive() || *alpha >= int(d as i64) {
        return Err(OdeError::BadAlpha);
    }
    let fam = symbolic_ode_poly(p);
    let dm = int(d as i64) - alpha;
    let mut coeffs = vec![ExactPoly::zero(); d + 1];
    for (i, s) in fam.scalars.iter().enumerate() {
        let along = s.along_ray(alpha);
        let g = &along * &ExactPoly::monomial(dm.pow((d - i) as i32), d - i);
        debug_assert!(g.degree().is_none_or(|k| k <= d));
        coeffs[d - i] = p.derivative(i).scale(&g.coeff(d));
    }
    Ok(BivariateCurve { coeffs, variable: CurveVariable::C, alpha: alpha.clone(), base_degree: d })
}

pub enum OdeInput<'a> {
    Poly(&'a ExactPoly),
    Rational(&'a ExactRatFun),
    Series(&'a TruncatedSeries),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OdeCheck {
    pub exact: bool,
    /// Largest residual coefficient in absolute value (0 when exact).
    pub residual: f64,
}

/// Series inputs must carry at least `order + margin` coefficients.
pub const SERIES_MARGIN: usize = 1;

pub fn verify_ode(ode: &LinearODE, y: OdeInput<'_>) -> Result<OdeCheck, OdeError> {
    let max_abs = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0f64, |a, b| a.max(b.abs()));
    match y {
        OdeInput::Poly(p) => {
            let r = ode.apply_poly(p);
            Ok(OdeCheck { exact: r.is_zero(), residual: max_abs(&mut r.coeffs().iter().map(rat_to_f64)) })
        }
        OdeInput::Rational(f) => {
            let r = ode.apply_ratfun(f);
            Ok(OdeCheck { exact: r.is_zero(), residual: max_abs(&mut r.num().coeffs().iter().map(rat_to_f64)) })
        }
        OdeInput::Series(s) => {
            let need = ode.order + SERIES_MARGIN;
            if s.order() < need {
                return Err(OdeError::InsufficientOrder { have: s.order(), need });
            }
            let r = ode.apply_series(s);
            let res = max_abs(&mut r.coeffs.iter().map(|c| c.to_c64().norm()));
            Ok(OdeCheck { exact: r.is_zero(), residual: res })
        }
    }
}

/// `|∫ z^k R_{n,n,P}(z) dz|` along the segment joining roots `i` and `j` of `P`, divided
/// by `max|integrand| * segment length`.
pub fn verify_multiple_orthogonality(p: &ExactPoly, n: u32, k: u32, i: usize, j: usize) -> Result<f64, OdeError> {
    if !p.gcd(&p.derivative(1)).is_constant() {
        return Err(OdeError::RepeatedRoots);
    }
    let roots = find_roots(p, 1e-15)?.roots;
    let (a, b) = match (roots.get(i), roots.get(j)) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(OdeError::RootIndex),
    };
    if (a - b).norm() == 0.0 {
        return Ok(0.0);
    }
    let r = rodrigues_descendant(p, n, n as usize).poly;
    let fp = FixedPointPoly::new(&r, &RootFinderConfig::default());
    let f = |z: Complex64| z.powu(k) * fp.value(z);
    let (val, fmax) = segment_integral(f, a, b, 1e-13);
    Ok(val.norm() / (fmax * (b - a).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::symbol_curve;
    use crate::exactpoly::{rat, ratfun_descendant, series_descendant, ComplexRational};
    use proptest::prelude::*;

    fn z2m1() -> ExactPoly {
        ExactPoly::from_i64s(&[-1, 0, 1])
    }

    #[test]
    fn legendre_operator() {
        for n in 1..8u32 {
            let ode = build_ode_poly(&z2m1(), n, n as usize);
            // (1 - z^2) y'' - 2z y' + n(n+1) y, up to scalar
            let leg = LinearODE::new(vec![
                ExactPoly::from_i64s(&[1, 0, -1]),
                ExactPoly::from_i64s(&[0, -2]),
                ExactPoly::from_i64s(&[(n * (n + 1)) as i64]),
            ]);
            assert_eq!(ode, leg);
            assert_eq!(build_ode_diagonal(&z2m1(), n), leg);
            let y = rodrigues_descendant(&z2m1(), n, n as usize).poly;
            assert!(verify_ode(&ode, OdeInput::Poly(&y)).unwrap().exact);
        }
    }

    #[test]
    fn poly_examples() {
        let ode = build_ode_poly(&z2m1(), 2, 2);
        assert!(verify_ode(&ode, OdeInput::Poly(&ExactPoly::from_i64s(&[-4, 0, 12]))).unwrap().exact);
        let c = ExactPoly::from_i64s(&[0, -1, 0, 1]);
        let ode = build_ode_poly(&c, 2, 3);
        let y = rodrigues_descendant(&c, 2, 3).poly;
        assert!(verify_ode(&ode, OdeInput::Poly(&y)).unwrap().exact);
        let bad = verify_ode(&ode, OdeInput::Poly(&ExactPoly::x())).unwrap();
        assert!(!bad.exact && bad.residual > 0.0);
        assert!(verify_ode(&ode, OdeInput::Poly(&ExactPoly::zero())).unwrap().exact);
    }

    #[test]
    fn general_reduces_to_poly_case() {
        for (n, m) in [(2u32, 1usize), (3, 3), (2, 4)] {
            let g = build_ode_general(&z2m1(), &ExactPoly::one(), &ExactPoly::zero(), n, m);
            assert_eq!(g, build_ode_poly(&z2m1(), n, m));
        }
        let g = build_ode_general(&z2m1(), &ExactPoly::one(), &ExactPoly::zero(), 3, 3);
        assert_eq!(g, build_ode_diagonal(&z2m1(), 3));
    }

    #[test]
    fn general_exponential() {
        let one = ExactPoly::one();
        let ode = build_ode_general(&one, &one, &ExactPoly::x(), 1, 0);
        assert_eq!(ode, LinearODE::new(vec![ExactPoly::one(), ExactPoly::from_i64s(&[-1])]));
        let s = series_descendant(&one, &one, &ExactPoly::x(), 1, 0, &ComplexRational::zero(), 10).unwrap();
        assert!(verify_ode(&ode, OdeInput::Series(&s)).unwrap().exact);
        let short = series_descendant(&one, &one, &ExactPoly::x(), 1, 0, &ComplexRational::zero(), 1).unwrap();
        assert_eq!(verify_ode(&ode, OdeInput::Series(&short)), Err(OdeError::InsufficientOrder { have: 1, need: 2 }));
    }

    #[test]
    fn rational_example() {
        let p = ExactPoly::x();
        let q = ExactPoly::from_i64s(&[-1, 1]);
        let ode = build_ode_rational(&p, &q, 2, 1);
        let f = ExactRatFun::new(p, q).unwrap();
        let y = ratfun_descendant(&f, 2, 1);
        assert!(verify_ode(&ode, OdeInput::Rational(&y)).unwrap().exact);
        let wrong = ratfun_descendant(&f, 2, 2);
        assert!(!verify_ode(&ode, OdeInput::Rational(&wrong)).unwrap().exact);
    }

    #[test]
    fn symbolic_family_specializes() {
        let p = ExactPoly::from_i64s(&[3, -1, 0, 2]);
        let fam = symbolic_ode_poly(&p);
        for (n, m) in [(1u32, 0usize), (2, 3), (4, 7), (5, 1)] {
            assert_eq!(fam.specialize(n, m), build_ode_poly(&p, n, m));
        }
    }

    #[test]
    fn limit_examples() {
        let a = int(1);
        let c = limit_symbol(&z2m1(), &a).unwrap().scale(&rat(1, 1));
        assert_eq!(c.coeffs, vec![ExactPoly::from_i64s(&[-1]), ExactPoly::zero(), z2m1()]);
        let cubic = ExactPoly::from_i64s(&[0, 0, 0, 1]);
        let c = limit_symbol(&cubic, &a).unwrap().scale(&rat(1, 2));
        assert_eq!(c.coeffs, vec![ExactPoly::from_i64s(&[-1]), ExactPoly::from_i64s(&[0, -3]), ExactPoly::zero(), ExactPoly::from_i64s(&[0, 0, 0, 4])]);
        assert_eq!(limit_symbol(&cubic, &int(3)), Err(OdeError::BadAlpha));
    }

    #[test]
    fn orthogonality_examples() {
        let p = z2m1();
        assert!(verify_multiple_orthogonality(&p, 1, 0, 0, 1).unwrap() < 1e-14);
        assert!(verify_multiple_orthogonality(&p, 2, 0, 0, 1).unwrap() < 1e-14);
        assert!(verify_multiple_orthogonality(&p, 2, 1, 0, 1).unwrap() < 1e-14);
        // k = n is not orthogonal
        assert!(verify_multiple_orthogonality(&p, 2, 2, 0, 1).unwrap() > 1e-3);
        let sq = ExactPoly::from_i64s(&[1, 2, 1]);
        assert_eq!(verify_multiple_orthogonality(&sq, 2, 0, 0, 1), Err(OdeError::RepeatedRoots));
    }

    #[test]
    fn orthogonality_cubic() {
        let p = ExactPoly::from_i64s(&[1, -3, 1, 2]);
        for n in 1..=8u32 {
            for k in 0..n {
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    let r = verify_multiple_orthogonality(&p, n, k, i, j).unwrap();
                    assert!(r <= 1e-10, "n={} k={} r={}", n, k, r);
                }
            }
        }
    }

    fn generic_poly() -> impl Strategy<Value = ExactPoly> {
        (2usize..6, proptest::collection::vec(-5i64..6, 6)).prop_filter_map("strongly generic", |(d, c)| {
            let mut v = c[..=d].to_vec();
            if v[d] == 0 {
                v[d] = 1;
            }
            let p = ExactPoly::from_i64s(&v);
            p.is_strongly_generic().then_some(p)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn descendants_satisfy_their_ode(p in generic_poly(), n in 1u32..5) {
            let d = p.degree().unwrap();
            for m in 0..(n as usize * d) {
                let y = rodrigues_descendant(&p, n, m).poly;
                prop_assert!(verify_ode(&build_ode_poly(&p, n, m), OdeInput::Poly(&y)).unwrap().exact);
            }
        }

        #[test]
        fn rational_descendants(pc in proptest::collection::vec(-4i64..5, 1..4), qc in proptest::collection::vec(-4i64..5, 2..4), n in 1u32..4, m in 0usize..5) {
            let p = ExactPoly::from_i64s(&pc);
            let q = ExactPoly::from_i64s(&qc);
            prop_assume!(!p.is_zero() && q.degree().unwrap_or(0) >= 1);
            let f = ExactRatFun::new(p, q).unwrap();
            let (p, q) = (f.num().clone(), f.den().clone());
            let y = ratfun_descendant(&f, n, m);
            prop_assert!(verify_ode(&build_ode_rational(&p, &q, n, m), OdeInput::Rational(&y)).unwrap().exact);
        }

        #[test]
        fn exponential_series(pc in proptest::collection::vec(-3i64..4, 1..3), tc in proptest::collection::vec(-3i64..4, 1..4), n in 1u32..3, m in 0usize..3) {
            let p = ExactPoly::from_i64s(&pc);
            prop_assume!(!p.is_zero());
            let q = ExactPoly::from_i64s(&[2, -1]);
            let t = ExactPoly::from_i64s(&tc);
            let c = ComplexRational::new(rat(1, 3), rat(1, 2));
            let d = deg0(&p) + deg0(&q) + deg0(&t);
            let s = series_descendant(&p, &q, &t, n, m, &c, d + 20).unwrap();
            prop_assert!(verify_ode(&build_ode_general(&p, &q, &t, n, m), OdeInput::Series(&s)).unwrap().exact);
        }

        #[test]
        fn limit_equals_symbol(p in generic_poly(), num in 1i64..200, den in 1i64..13) {
            let d = p.degree().unwrap() as i64;
            let a = rat(num % (d * den - 1) + 1, den);
            prop_assume!(a < int(d));
            prop_assert_eq!(limit_symbol(&p, &a).unwrap(), symbol_curve(&p, &a).unwrap());
        }
    }
}
