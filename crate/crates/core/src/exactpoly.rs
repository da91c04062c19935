//! Exact rational polynomials, rational functions and truncated power series.

use alloc::vec;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::PolyError;

/// Arbitrary precision rational, always stored in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    crate::numeric::ratio_to_f64(r.numer(), r.denom())
}

pub fn factorial(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    f
}

/// Polynomial with rational coefficients, low to high. The zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactPoly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly{:?}", self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>())
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{}", a)?,
                (_, true) => {}
                (_, false) if a.is_integer() => write!(f, "{}*", a)?,
                (_, false) => write!(f, "({})*", a)?,
            }
            match k {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{}", k)?,
            }
        }
        Ok(())
    }
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ExactPoly { coeffs }
    }

    pub fn zero() -> Self {
        ExactPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c z^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    /// The identity polynomial `z`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| int(v)).collect())
    }

    pub fn from_ints(c: &[BigInt]) -> Self {
        Self::new(c.iter().map(|v| Rational::from_integer(v.clone())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        ExactPoly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, x: &ComplexRational) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x);
            acc.re += c;
        }
        acc
    }

    /// Coefficients rounded to double precision.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    pub fn to_complex64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| Complex64::new(rat_to_f64(c), 0.0)).collect()
    }

    /// Horner evaluation in double precision.
    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        crate::numeric::horner(&self.to_complex64(), z)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= k {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - k);
        for j in k..self.coeffs.len() {
            // j (j-1) ... (j-k+1)
            let mut f = BigInt::one();
            for t in (j + 1 - k)..=j {
                f *= BigInt::from(t);
            }
            out.push(&self.coeffs[j] * Rational::from_integer(f));
        }
        Self::new(out)
    }

    /// Euclidean division: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &ExactPoly) -> Result<(ExactPoly, ExactPoly), PolyError> {
        let dd = d.degree().ok_or(PolyError::DivisionByZero)?;
        let lc = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn div_exact(&self, d: &ExactPoly) -> Result<ExactPoly, PolyError> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &ExactPoly) -> ExactPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    /// Scales to integer coefficients with gcd 1 and positive leading coefficient.
    pub fn primitive_part(&self) -> ExactPoly {
        Self::from_ints(&self.primitive_integer_coeffs())
    }

    /// Integer coefficients of the primitive part.
    pub fn primitive_integer_coeffs(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
        ints
    }

    /// Taylor coefficients `a_k` with `self(c + h) = Σ a_k h^k`.
    pub fn taylor_at(&self, c: &ComplexRational) -> Vec<ComplexRational> {
        let mut a: Vec<ComplexRational> = self.coeffs.iter().map(|r| ComplexRational::from_real(r.clone())).collect();
        let n = a.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = a[j + 1].mul(c);
                a[j] = a[j].add(&t);
            }
        }
        a
    }

    /// `self(a z + b)`.
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> ExactPoly {
        let lin = ExactPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = ExactPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &ExactPoly::constant(c.clone());
        }
        acc
    }

    /// Squarefree with squarefree derivative.
    pub fn is_strongly_generic(&self) -> bool {
        let d1 = self.derivative(1);
        let d2 = self.derivative(2);
        self.gcd(&d1).is_constant() && d1.gcd(&d2).is_constant()
    }
}

fn add_vecs(a: &[Rational], b: &[Rational], sign: bool) -> Vec<Rational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            let x = a.get(k).cloned().unwrap_or_else(Rational::zero);
            match b.get(k) {
                None => x,
                Some(y) if sign => x + y,
                Some(y) => x - y,
            }
        })
        .collect()
}

impl Add for &ExactPoly {
    type Output = ExactPoly;
    fn add(self, o: &ExactPoly) -> ExactPoly {
        ExactPoly::new(add_vecs(&self.coeffs, &o.coeffs, true))
    }
}

impl Sub for &ExactPoly {
    type Output = ExactPoly;
    fn sub(self, o: &ExactPoly) -> ExactPoly {
        ExactPoly::new(add_vecs(&self.coeffs, &o.coeffs, false))
    }
}

impl Mul for &ExactPoly {
    type Output = ExactPoly;
    fn mul(self, o: &ExactPoly) -> ExactPoly {
        if self.is_zero() || o.is_zero() {
            return ExactPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ExactPoly::new(out)
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_ops {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(ExactPoly, Add add, Sub sub, Mul mul);

pub fn poly_pow(p: &ExactPoly, n: u32) -> ExactPoly {
    p.pow(n)
}

pub fn derivative(p: &ExactPoly, k: usize) -> ExactPoly {
    p.derivative(k)
}

/// `d^m/dz^m (P^n)` with a flag telling whether it vanished because `m > n deg P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descendant {
    pub poly: ExactPoly,
    pub vanished: bool,
}

pub fn rodrigues_descendant(p: &ExactPoly, n: u32, m: usize) -> Descendant {
    let poly = p.pow(n).derivative(m);
    let vanished = poly.is_zero() && !p.is_zero();
    Descendant { poly, vanished }
}

/// Rational function `num/den` kept coprime, with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRatFun {
    num: ExactPoly,
    den: ExactPoly,
}

impl ExactRatFun {
    pub fn new(num: ExactPoly, den: ExactPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ExactRatFun { num, den: ExactPoly::one() });
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let lc = den.leading().unwrap().recip();
        num = num.scale(&lc);
        den = den.scale(&lc);
        Ok(ExactRatFun { num, den })
    }

    pub fn from_poly(p: ExactPoly) -> Self {
        ExactRatFun { num: p, den: ExactPoly::one() }
    }

    pub fn num(&self) -> &ExactPoly {
        &self.num
    }

    pub fn den(&self) -> &ExactPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den).expect("nonzero")
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&(&self.num * &o.den) - &(&o.num * &self.den), &self.den * &o.den).expect("nonzero")
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den).expect("nonzero")
    }

    pub fn div(&self, o: &Self) -> Result<Self, PolyError> {
        if o.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale_poly(&self, p: &ExactPoly) -> Self {
        Self::new(&self.num * p, self.den.clone()).expect("nonzero")
    }

    pub fn pow(&self, n: u32) -> Self {
        // coprime parts stay coprime
        ExactRatFun { num: self.num.pow(n), den: self.den.pow(n) }
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..k {
            let num = &(&f.num.derivative(1) * &f.den) - &(&f.num * &f.den.derivative(1));
            f = Self::new(num, &f.den * &f.den).expect("nonzero");
        }
        f
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }
}

pub fn ratfun_descendant(f: &ExactRatFun, n: u32, m: usize) -> ExactRatFun {
    f.pow(n).derivative(m)
}

/// Gaussian rational `re + i im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    pub fn from_real(re: Rational) -> Self {
        ComplexRational { re, im: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_real(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_real(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        ComplexRational { re: &self.re * r, im: &self.im * r }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(ComplexRational { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// Taylor coefficients at `center`, truncated to `coeffs.len()` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub center: ComplexRational,
    pub coeffs: Vec<ComplexRational>,
}

impl TruncatedSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn from_poly(p: &ExactPoly, center: &ComplexRational, order: usize) -> Self {
        let mut coeffs = p.taylor_at(center);
        coeffs.resize(order, ComplexRational::zero());
        TruncatedSeries { center: center.clone(), coeffs }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut c = vec![ComplexRational::zero(); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                c[i + j] = c[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
            }
        }
        TruncatedSeries { center: self.center.clone(), coeffs: c }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.order();
        let a0 = self.coeffs.first()?.inv()?;
        let mut b = vec![ComplexRational::zero(); n];
        b[0] = a0.clone();
        for k in 1..n {
            let mut s = ComplexRational::zero();
            for j in 1..=k {
                s = s.add(&self.coeffs[j].mul(&b[k - j]));
            }
            b[k] = ComplexRational::zero().sub(&s.mul(&a0));
        }
        Some(TruncatedSeries { center: self.center.clone(), coeffs: b })
    }

    /// `exp(s - s(0))`; the constant term is dropped so the result stays exact.
    pub fn exp_shifted(&self) -> Self {
        let n = self.order();
        let mut e = vec![ComplexRational::zero(); n];
        if n == 0 {
            return TruncatedSeries { center: self.center.clone(), coeffs: e };
        }
        e[0] = ComplexRational::one();
        // k e_k = Σ_{j=1}^k j s_j e_{k-j}
        for k in 1..n {
            let mut acc = ComplexRational::zero();
            for j in 1..=k {
                acc = acc.add(&self.coeffs[j].mul(&e[k - j]).scale(&int(j as i64)));
            }
            e[k] = acc.scale(&rat(1, k as i64));
        }
        TruncatedSeries { center: self.center.clone(), coeffs: e }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = TruncatedSeries {
            center: self.center.clone(),
            coeffs: {
                let mut v = vec![ComplexRational::zero(); self.order()];
                if !v.is_empty() {
                    v[0] = ComplexRational::one();
                }
                v
            },
        };
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Drops one coefficient.
    pub fn derivative(&self) -> Self {
        let coeffs = (1..self.order()).map(|k| self.coeffs[k].scale(&int(k as i64))).collect();
        TruncatedSeries { center: self.center.clone(), coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Taylor expansion of `d^m/dz^m (P e^T / Q)^n` at `center`, `order` coefficients.
///
/// The constant factor `e^{n T(center)}` is divided out so the coefficients stay rational;
/// the result is exact when `T(center) = 0`.
pub fn series_descendant(
    p: &ExactPoly,
    q: &ExactPoly,
    t: &ExactPoly,
    n: u32,
    m: usize,
    center: &ComplexRational,
    order: usize,
) -> Result<TruncatedSeries, PolyError> {
    let len = order + m;
    let qs = TruncatedSeries::from_poly(q, center, len);
    let qinv = qs.inv().ok_or(PolyError::CenterIsPole)?;
    let ps = TruncatedSeries::from_poly(p, center, len);
    let ts = TruncatedSeries::from_poly(&t.scale(&int(n as i64)), center, len);
    let mut s = ps.mul(&qinv).pow(n).mul(&ts.exp_shifted());
    for _ in 0..m {
        s = s.derivative();
    }
    Ok(s)
}

/// Numerator/denominator as 64-bit where it fits, for diagnostics.
pub fn rat_small(r: &Rational) -> Option<(i64, i64)> {
    Some((r.numer().to_i64()?, r.denom().to_i64()?))
}
