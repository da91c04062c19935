//! Thread fan-out for grids and descendant families.

use rayon::prelude::*;
use rodrigues_core::exactpoly::rodrigues_descendant;
use rodrigues_core::rootfind::{find_descendant_roots, find_roots_with, ComplexRootSet, RootFinderConfig};
use rodrigues_core::saddleflow::PhaseField;
use rodrigues_core::trace::{assemble, compute_cell, TraceField, Window};
use rodrigues_core::{Complex64, ExactPoly, Rational, RootError, SaddleError};

/// Runs `f` on a pool of `workers` threads, or on the global pool when `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}

/// Sizes the global pool once per process; later calls keep the first size.
pub fn set_workers(workers: Option<usize>) {
    if let Some(w) = workers {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
}

/// Same result as the sequential `build_field`; cells are independent.
pub fn build_field(p: &ExactPoly, alpha: &Rational, window: Window, nx: usize, ny: usize) -> Result<TraceField, SaddleError> {
    let pf = PhaseField::new(p, alpha)?;
    let cells = (0..nx * ny).into_par_iter().map(|k| compute_cell(&pf, window.node(k % nx, k / nx, nx, ny))).collect();
    Ok(assemble(p, alpha, window, nx, ny, cells))
}

/// Roots of `R_{m,n,P}` for every `m` in `0..n·deg P`, in order of `m`.
pub fn shadow_roots(p: &ExactPoly, n: u32, cfg: &RootFinderConfig) -> Result<Vec<ComplexRootSet>, RootError> {
    let d = p.degree().ok_or(RootError::DegreeTooLow)?;
    (0..n as usize * d).into_par_iter().map(|m| find_descendant_roots(p, n, m, cfg)).collect()
}

/// Roots of `R_{m,n,P}`; `n = 1, m = 0` gives the roots of `P`.
pub fn descendant_roots(p: &ExactPoly, n: u32, m: usize, cfg: &RootFinderConfig) -> Result<ComplexRootSet, RootError> {
    if n == 1 && m == 0 {
        find_roots_with(p, cfg)
    } else {
        find_descendant_roots(p, n, m, cfg)
    }
}

/// Mean of the roots of `P`, i.e. `-a_{d-1} / (d a_d)`.
pub fn center_of_mass(p: &ExactPoly) -> Option<Complex64> {
    let d = p.degree().filter(|&d| d >= 1)?;
    let c = p.to_f64();
    Some(Complex64::new(-c[d - 1] / (d as f64 * c[d]) + 0.0, 0.0))
}

/// Exact coefficients of `R_{m,n,P}`.
pub fn descendant(p: &ExactPoly, n: u32, m: usize) -> ExactPoly {
    rodrigues_descendant(p, n, m).poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use rodrigues_core::exactpoly::rat;

    #[test]
    fn parallel_matches_sequential() {
        let p = ExactPoly::from_i64s(&[0, -1, 0, 1]);
        let a = rat(1, 2);
        let w = Window::new(-1.5, 1.5, -1.2, 1.3);
        let par = with_workers(Some(3), || build_field(&p, &a, w, 13, 11)).unwrap();
        let seq = rodrigues_core::trace::build_field(&p, &a, w, 13, 11).unwrap();
        assert_eq!(par.flags, seq.flags);
        assert_eq!(par.branch_index, seq.branch_index);
        for (x, y) in par.potential.iter().zip(&seq.potential) {
            assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
        }
    }

    #[test]
    fn shadow_of_linear_power() {
        let p = ExactPoly::from_i64s(&[-1, 0, 1]);
        let sets = shadow_roots(&p, 1, &RootFinderConfig::default()).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[0].roots.len(), 2);
        assert_eq!(sets[1].roots.len(), 1);
        assert!(sets[1].roots[0].norm() < 1e-12);
        assert_eq!(center_of_mass(&p), Some(Complex64::new(0.0, 0.0)));
    }
}
