//! Closed forms for `P = z^2 - 1`: limit density, atoms at `±1`, Cauchy transform and
//! a comparison of root sets against them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::QuadraticError;
use crate::numeric::gauss_legendre;
use crate::rootfind::ComplexRootSet;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticLaw {
    pub alpha: f64,
    /// `√(α(2-α))`
    pub b_plus: f64,
    /// Mass at each of `±1`.
    pub atom_mass: f64,
}

pub fn quadratic_law(alpha: f64) -> Result<QuadraticLaw, QuadraticError> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(QuadraticError::AlphaOutOfRange);
    }
    let b_plus = libm::sqrt(alpha * (2.0 - alpha));
    let atom_mass = ((1.0 - alpha) / (2.0 - alpha)).max(0.0);
    Ok(QuadraticLaw { alpha, b_plus, atom_mass })
}

impl QuadraticLaw {
    /// `(1/((2-α)π)) √(b²-x²)/(1-x²)` on `[-b, b]`, zero elsewhere.
    pub fn density(&self, x: f64) -> f64 {
        let b = self.b_plus;
        if x.abs() >= b {
            return 0.0;
        }
        libm::sqrt(b * b - x * x) / (1.0 - x * x) / ((2.0 - self.alpha) * PI)
    }

    /// Antiderivative of `√(b²-x²)/(1-x²)` on `[-b, b]`.
    fn primitive(&self, x: f64) -> f64 {
        let b = self.b_plus;
        let k = (1.0 - self.alpha).abs();
        let x = x.clamp(-b, b);
        let r = libm::sqrt((b * b - x * x).max(0.0));
        let t = if r == 0.0 { x.signum() * PI / 2.0 } else { libm::atan(x * k / r) };
        libm::asin(x / b) - k * t
    }

    /// Mass of the continuous part below `x`.
    pub fn continuous_cdf(&self, x: f64) -> f64 {
        let b = self.b_plus;
        (self.primitive(x) - self.primitive(-b)) / ((2.0 - self.alpha) * PI)
    }

    /// `1 - 2 · atom_mass`.
    pub fn continuous_mass(&self) -> f64 {
        self.continuous_cdf(self.b_plus)
    }

    /// Full distribution function of the law restricted to the real line.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut f = self.continuous_cdf(x);
        if x >= -1.0 {
            f += self.atom_mass;
        }
        if x >= 1.0 {
            f += self.atom_mass;
        }
        f
    }

    /// `∫_a^b density` by Gauss-Legendre after `x = b₊ sin θ`, which removes the
    /// endpoint singularities.
    pub fn integrate_density(&self, lo: f64, hi: f64, nodes: usize) -> f64 {
        let b = self.b_plus;
        let t0 = libm::asin((lo / b).clamp(-1.0, 1.0));
        let t1 = libm::asin((hi / b).clamp(-1.0, 1.0));
        let (x, w) = gauss_legendre(nodes);
        let (h, m) = (0.5 * (t1 - t0), 0.5 * (t1 + t0));
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let t = m + h * xi;
            let (st, ct) = (libm::sin(t), libm::cos(t));
            s += wi * b * b * ct * ct / (1.0 - b * b * st * st);
        }
        s * h / ((2.0 - self.alpha) * PI)
    }

    pub fn branch_points(&self) -> [f64; 2] {
        [-self.b_plus, self.b_plus]
    }
}

/// `α/((α-1)z + √(z²-b²))` with the square root `~ z` at infinity, so that `C ~ 1/z`.
pub fn quadratic_cauchy(alpha: f64, z: Complex64) -> Result<Complex64, QuadraticError> {
    let law = quadratic_law(alpha)?;
    let b = law.b_plus;
    if z.im.abs() <= 1e-14 * (1.0 + z.re.abs()) && z.re.abs() <= b {
        return Err(QuadraticError::OnSupport);
    }
    Ok(alpha / ((alpha - 1.0) * z + sqrt_z2_minus(z, b)))
}

/// `z √(1 - b²/z²)`: the branch of `√(z²-b²)` cut along `[-b, b]`.
fn sqrt_z2_minus(z: Complex64, b: f64) -> Complex64 {
    z * (Complex64::new(1.0, 0.0) - b * b / (z * z)).sqrt()
}

/// The same expression with the prefactor `2α` in place of `α`.
pub fn printed_cauchy(alpha: f64, z: Complex64) -> Result<Complex64, QuadraticError> {
    let law = quadratic_law(alpha)?;
    Ok(2.0 * alpha / ((alpha - 1.0) * z + sqrt_z2_minus(z, law.b_plus)))
}

/// Ratio of the printed prefactor form to the symbol-curve root at `z`.
pub fn printed_cauchy_ratio(alpha: f64, z: Complex64) -> Result<Complex64, QuadraticError> {
    Ok(printed_cauchy(alpha, z)? / quadratic_cauchy(alpha, z)?)
}

/// `α/(2-α) + 2(1-α)/(2-α) zC + (1-z²)C²`.
pub fn cauchy_equation(alpha: f64, z: Complex64, c: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    alpha / (2.0 - alpha) + 2.0 * (1.0 - alpha) / (2.0 - alpha) * z * c + (one - z * z) * c * c
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalComparison {
    pub ks_distance: f64,
    /// Fractions of roots within `eps` of `-1` and `+1`.
    pub atom_fractions: (f64, f64),
    pub expected_atom: f64,
    pub max_imag: f64,
    /// Extent of the real parts of the roots entering the distance.
    pub support: (f64, f64),
    pub b_plus: f64,
    pub count: usize,
}

/// Projects the roots to the real axis and takes the Kolmogorov-Smirnov distance
/// against the normalised continuous part of the law. When the law has atoms, roots
/// within `eps` of `±1` are attributed to them and left out of the distance.
pub fn compare_empirical(roots: &ComplexRootSet, alpha: f64, eps: f64) -> Result<EmpiricalComparison, QuadraticError> {
    let law = quadratic_law(alpha)?;
    let n = roots.roots.len();
    let max_imag = roots.roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let mut near_minus = 0usize;
    let mut near_plus = 0usize;
    let mut rest: Vec<f64> = Vec::with_capacity(n);
    let has_atoms = law.atom_mass > 0.0;
    for z in &roots.roots {
        let (p, m) = ((z - 1.0).norm() <= eps, (z + 1.0).norm() <= eps);
        near_plus += p as usize;
        near_minus += m as usize;
        if !(has_atoms && (p || m)) {
            rest.push(z.re);
        }
    }
    rest.sort_by(f64::total_cmp);
    let cm = law.continuous_mass();
    let mut ks = 0.0f64;
    let m = rest.len();
    for (i, x) in rest.iter().enumerate() {
        let f = law.continuous_cdf(*x) / cm;
        let lo = i as f64 / m as f64;
        let hi = (i + 1) as f64 / m as f64;
        ks = ks.max((f - lo).abs()).max((f - hi).abs());
    }
    let support = if m == 0 { (0.0, 0.0) } else { (rest[0], rest[m - 1]) };
    let nf = n.max(1) as f64;
    Ok(EmpiricalComparison {
        ks_distance: ks,
        atom_fractions: (near_minus as f64 / nf, near_plus as f64 / nf),
        expected_atom: law.atom_mass,
        max_imag,
        support,
        b_plus: law.b_plus,
        count: n,
    })
}
