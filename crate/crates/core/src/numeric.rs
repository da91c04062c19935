//! Floating point helpers shared by the numerical modules.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Float, Signed, ToPrimitive, Zero};

/// `x 2^-shift` without overflowing the intermediate conversion.
pub fn bigint_to_f64_scaled(x: &BigInt, shift: i64) -> f64 {
    let b = x.bits() as i64;
    let (m, s) = if b > 64 { (x >> ((b - 64) as usize), shift - (b - 64)) } else { (x.clone(), shift) };
    scale2(m.to_f64().unwrap_or(0.0), -s)
}

/// `v 2^e` in two steps so that very small or very large `e` still lands correctly.
pub fn scale2(v: f64, e: i64) -> f64 {
    let e = e.clamp(-4000, 4000) as i32;
    let h = e / 2;
    libm::scalbn(libm::scalbn(v, h), e - h)
}

/// Correctly scaled `n / d` for huge integers.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if n.is_zero() {
        return 0.0;
    }
    let e = n.bits() as i64 - d.bits() as i64;
    let s = 64 - e;
    let q = if s >= 0 { (n << (s as usize)).div_floor(d) } else { n.div_floor(&(d << ((-s) as usize))) };
    bigint_to_f64_scaled(&q, s)
}

/// `v 2^bits` rounded toward zero.
pub fn f64_to_fixed(v: f64, bits: u32) -> BigInt {
    if v == 0.0 || !v.is_finite() {
        return BigInt::zero();
    }
    let (mant, exp, sign) = Float::integer_decode(v);
    let m = BigInt::from(mant);
    let e = exp as i64 + bits as i64;
    let r = if e >= 0 { m << (e as usize) } else { m >> ((-e) as usize) };
    if sign < 0 {
        -r
    } else {
        r
    }
}

pub fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

/// Value and first derivative.
pub fn horner2(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn poly_derivative_c(c: &[Complex64]) -> Vec<Complex64> {
    c.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect()
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x.push(t);
        w.push(2.0 / ((1.0 - t * t) * dp * dp));
    }
    (x, w)
}

/// Gauss-Legendre on the segment `[a, b]`, doubling the node count from 64 until two
/// estimates agree to `rel`. Returns the integral and the largest |f| seen.
pub fn segment_integral<F: Fn(Complex64) -> Complex64>(f: F, a: Complex64, b: Complex64, rel: f64) -> (Complex64, f64) {
    let mut n = 64;
    let mut prev: Option<Complex64> = None;
    let mut fmax = 0.0f64;
    loop {
        let (x, w) = gauss_legendre(n);
        let h = (b - a) * 0.5;
        let mid = (a + b) * 0.5;
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let v = f(mid + h * xi);
            fmax = fmax.max(v.norm());
            s += v * wi;
        }
        s *= h;
        if let Some(p) = prev {
            let scale = fmax * (b - a).norm();
            if (s - p).norm() <= rel * scale.max(s.norm()) || n >= 1024 {
                return (s, fmax);
            }
        }
        prev = Some(s);
        n *= 2;
    }
}

pub fn sign_bits(x: &BigInt) -> (bool, u64) {
    (x.is_negative(), x.bits())
}

/// Convex hull (counter-clockwise, no collinear points) of planar points.
pub fn convex_hull(pts: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = pts.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    p.dedup_by(|a, b| (*a - *b).norm() == 0.0);
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let mut h: Vec<Complex64> = Vec::with_capacity(2 * p.len());
    for &q in p.iter() {
        while h.len() >= 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
            h.pop();
        }
        h.push(q);
    }
    let lo = h.len() + 1;
    for &q in p.iter().rev().skip(1) {
        while h.len() >= lo && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
            h.pop();
        }
        h.push(q);
    }
    h.pop();
    h
}

pub fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / l2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the convex polygon `hull` (zero inside).
pub fn hull_distance(p: Complex64, hull: &[Complex64]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (p - hull[0]).norm(),
        2 => segment_distance(p, hull[0], hull[1]),
        n => {
            let mut inside = true;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                let c = (b.re - a.re) * (p.im - a.im) - (b.im - a.im) * (p.re - a.re);
                if c < 0.0 {
                    inside = false;
                }
                best = best.min(segment_distance(p, a, b));
            }
            if inside {
                0.0
            } else {
                best
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn big_ratio() {
        let n = BigInt::from(3u8) << 5000usize;
        let d = BigInt::from(2u8) << 5000usize;
        assert_eq!(ratio_to_f64(&n, &d), 1.5);
        assert_eq!(ratio_to_f64(&BigInt::from(-1), &BigInt::from(3)), -1.0 / 3.0);
        assert_eq!(bigint_to_f64_scaled(&f64_to_fixed(-0.3, 200), 200), -0.3);
    }

    #[test]
    fn hull() {
        let pts = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.2),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 3);
        assert_eq!(hull_distance(Complex64::new(0.0, 0.5), &h), 0.0);
        assert!((hull_distance(Complex64::new(0.0, -1.0), &h) - 1.0).abs() < 1e-15);
        let seg = convex_hull(&pts[..2]);
        assert!((hull_distance(Complex64::new(2.0, 0.0), &seg) - 1.0).abs() < 1e-15);
    }
}
