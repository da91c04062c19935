//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use rodrigues::parallel;
use rodrigues::verify::{self, HULL_TOL};
use rodrigues_core::curves::{branch_points, symbol_curve};
use rodrigues_core::exactpoly::{int, rat, rodrigues_descendant};
use rodrigues_core::odes::{limit_symbol, verify_multiple_orthogonality};
use rodrigues_core::rootfind::{empirical_cauchy, find_descendant_roots, hull_containment, ComplexRootSet, RootFinderConfig};
use rodrigues_core::saddleflow::PhaseField;
use rodrigues_core::trace::{cauchy_pred, constant_b, stirling_term};
use rodrigues_core::{Complex64, ExactPoly, Rational};

type Recorded = Mutex<Vec<(String, ExactPoly, ComplexRootSet)>>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn z2m1() -> ExactPoly {
    ExactPoly::from_i64s(&[-1, 0, 1])
}

fn legendre() -> Outcome {
    let mut prev = ExactPoly::one();
    let mut cur = ExactPoly::x();
    let mut worst = String::new();
    for n in 0..=10u32 {
        let leg = match n {
            0 => ExactPoly::one(),
            1 => ExactPoly::x(),
            _ => {
                // (k+1) P_{k+1} = (2k+1) z P_k - k P_{k-1}, k = n - 1
                let k = (n - 1) as i64;
                let next = (&(&ExactPoly::x() * &cur).scale(&int(2 * k + 1)) - &prev.scale(&int(k))).scale(&rat(1, k + 1));
                prev = cur.clone();
                cur = next.clone();
                next
            }
        };
        let scale = int(2).pow(n as i32) * Rational::from_integer(rodrigues_core::exactpoly::factorial(n as usize));
        let r = rodrigues_descendant(&z2m1(), n, n as usize).poly.scale(&scale.recip());
        if r != leg {
            worst = format!("mismatch at n={}", n);
            break;
        }
    }
    outcome(worst.is_empty(), if worst.is_empty() { "exact for n = 0..10".to_string() } else { worst })
}

fn ode_exactness() -> Outcome {
    let reports: Vec<_> = (0..10u64)
        .into_par_iter()
        .map(|i| {
            let d = 2 + (i as usize % 4);
            let p = verify::random_strongly_generic(&mut verify::rng(100 + i), d);
            verify::ode_suite(&p, 6, 100 + i)
        })
        .collect();
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: Vec<String> = reports.iter().flat_map(|r| r.failures().map(|c| c.name.clone())).collect();
    let series_min = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter_map(|c| c.data.get("vanishing").and_then(|v| v.as_u64())))
        .min()
        .unwrap_or(0);
    outcome(
        failed.is_empty() && series_min >= 20,
        format!("{} operator applications on 10 polynomials, {} failures, min vanishing series coefficients {}", total, failed.len(), series_min),
    )
}

fn limit_algorithm() -> Outcome {
    let mut r = verify::rng(300);
    let mut bad = 0;
    let mut count = 0;
    for d in 2..=5usize {
        for _ in 0..20 {
            let p = verify::random_strongly_generic(&mut r, d);
            let a = verify::random_alpha(&mut r, d, 12);
            count += 1;
            match (limit_symbol(&p, &a), symbol_curve(&p, &a)) {
                (Ok(x), Ok(y)) if x == y => {}
                _ => bad += 1,
            }
        }
    }
    outcome(bad == 0, format!("{} of {} (P, alpha) pairs differ", bad, count))
}

fn quadratic_law(rec: &Recorded) -> Outcome {
    let cfg = RootFinderConfig::default();
    let cases = [(int(1), 100u32), (rat(1, 2), 200), (rat(3, 2), 200)];
    let results: Vec<_> = cases.par_iter().map(|(a, n)| (a.clone(), *n, verify::quadratic_suite_with_roots(a, *n, &cfg))).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, n, r) in results {
        match r {
            Ok((rep, roots)) => {
                let ks = rep.checks.iter().find(|c| c.name == "ks").and_then(|c| c.data.get("ks").and_then(|v| v.as_f64())).unwrap_or(f64::NAN);
                pass &= rep.pass();
                let failing: Vec<_> = rep.failures().map(|c| c.name.clone()).collect();
                parts.push(format!("alpha={} n={}: ks={:.4}{}", a, n, ks, if failing.is_empty() { String::new() } else { format!(" failed {:?}", failing) }));
                rec.lock().unwrap().push((format!("quadratic alpha={} n={}", a, n), z2m1(), roots));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("alpha={} n={}: {}", a, n, e));
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn branch_point_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [rat(1, 4), rat(1, 2), int(1), rat(3, 2)] {
        let af = rodrigues_core::exactpoly::rat_to_f64(&a);
        let b = (af * (2.0 - af)).sqrt();
        let mut bp = match branch_points(&z2m1(), &a) {
            Ok(v) => v,
            Err(e) => return outcome(false, e.to_string()),
        };
        if bp.len() != 2 {
            return outcome(false, format!("alpha={}: {} branch points", a, bp.len()));
        }
        bp.sort_by(|x, y| x.re.total_cmp(&y.re));
        worst = worst.max((bp[0] + b).norm()).max((bp[1] - b).norm());
    }
    outcome(worst <= 1e-12, format!("max deviation from +-sqrt(alpha(2-alpha)) {:.2e}", worst))
}

fn boutroux() -> Outcome {
    let cases: Vec<(ExactPoly, Rational)> = (2..=4usize)
        .flat_map(|d| {
            let p = verify::random_strongly_generic(&mut verify::rng(600 + d as u64), d);
            (1..=5i64).map(move |k| (p.clone(), rat(k * d as i64, 6)))
        })
        .collect();
    let reps: Vec<_> = cases.par_iter().map(|(p, a)| verify::boutroux_suite(p, a)).collect();
    let failed: Vec<String> = reps
        .iter()
        .filter(|r| !r.pass())
        .map(|r| format!("P={} alpha={}", r.info["P"], r.info["alpha"]))
        .collect();
    outcome(failed.is_empty(), format!("{} of {} (P, alpha) cases fail {:?}", failed.len(), reps.len(), failed))
}

fn trace_residual() -> Outcome {
    let mut r = verify::rng(700);
    let mut pass = true;
    let mut parts = Vec::new();
    for _ in 0..3 {
        let p = verify::random_strongly_generic(&mut r, 3);
        let a = verify::random_alpha(&mut r, 3, 4);
        let w = match verify::default_window(&p) {
            Ok(w) => w,
            Err(e) => return outcome(false, e.to_string()),
        };
        match verify::trace_suite(&p, &a, w, 101, 101) {
            Ok(rep) => {
                pass &= rep.pass();
                let c = &rep.checks[0].data;
                parts.push(format!("alpha={}: {:.4} of {} ok cells", a, c["fraction"].as_f64().unwrap_or(0.0), c["ok_cells"]));
            }
            Err(e) => {
                pass = false;
                parts.push(e.to_string());
            }
        }
    }
    outcome(pass, parts.join("; "))
}

fn convergence() -> Outcome {
    let p = z2m1();
    let a = int(1);
    let samples: Vec<Complex64> = (0..25)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / 25.0;
            Complex64::new(1.5 * t.cos(), 0.8 * t.sin())
        })
        .collect();
    let mut sups = Vec::new();
    for n in [25u32, 50, 100, 200] {
        let r = rodrigues_descendant(&p, n, n as usize - 1).poly;
        let mut sup: f64 = 0.0;
        for z in &samples {
            match (empirical_cauchy(&r, *z), cauchy_pred(&p, &a, *z)) {
                (Ok(e), Ok(c)) => sup = sup.max((e - c).norm()),
                (x, y) => return outcome(false, format!("evaluation failed at {}: {:?} {:?}", z, x.err(), y.err())),
            }
        }
        sups.push(sup);
    }
    let mono = sups.windows(2).all(|w| w[1] <= w[0]);
    let last = sups[3];
    outcome(mono && last <= 0.05, format!("sup errors at n=25,50,100,200: {:?}", sups.iter().map(|s| format!("{:.4}", s)).collect::<Vec<_>>()))
}

fn stirling() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, a) in [(2usize, int(1)), (3, int(1)), (3, rat(3, 2))] {
        worst = worst.max((stirling_term(d, &a, 10_000) - constant_b(d, &a)).abs());
    }
    outcome(worst <= 0.01, format!("max |term - B| at n = 10^4: {:.2e}", worst))
}

fn gauss_lucas(rec: &Recorded) -> Outcome {
    let cfg = RootFinderConfig::default();
    let cubic = ExactPoly::from_i64s(&[0, -1, 0, 1]);
    match find_descendant_roots(&cubic, 60, 18, &cfg) {
        Ok(s) => {
            let count = s.roots.len();
            rec.lock().unwrap().push((format!("z^3-z n=60 m=18 ({} roots)", count), cubic.clone(), s));
        }
        Err(e) => return outcome(false, e.to_string()),
    }
    let quartic = verify::random_strongly_generic(&mut verify::rng(1000), 4);
    for (p, n) in [(cubic, 10u32), (quartic, 6)] {
        match parallel::shadow_roots(&p, n, &cfg) {
            Ok(sets) => {
                let mut g = rec.lock().unwrap();
                for (m, s) in sets.into_iter().enumerate() {
                    g.push((format!("shadow n={} m={}", n, m), p.clone(), s));
                }
            }
            Err(e) => return outcome(false, e.to_string()),
        }
    }
    let g = rec.lock().unwrap();
    let bad: Vec<&str> = g.iter().filter(|(_, p, s)| !hull_containment(s, p, HULL_TOL)).map(|(l, _, _)| l.as_str()).collect();
    let roots: usize = g.iter().map(|(_, _, s)| s.roots.len()).sum();
    outcome(bad.is_empty(), format!("{} root sets ({} roots), outside hull: {:?}", g.len(), roots, bad))
}

fn orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in [ExactPoly::from_i64s(&[1, -3, 1, 2]), ExactPoly::from_i64s(&[0, -1, 0, 1])] {
        let jobs: Vec<(u32, u32, usize, usize)> =
            (1..=8u32).flat_map(|n| (0..n).flat_map(move |k| [(0, 1), (0, 2), (1, 2)].into_iter().map(move |(i, j)| (n, k, i, j)))).collect();
        let rs: Vec<_> = jobs.par_iter().map(|&(n, k, i, j)| verify_multiple_orthogonality(&p, n, k, i, j)).collect();
        for r in rs {
            match r {
                Ok(v) => worst = worst.max(v),
                Err(e) => return outcome(false, e.to_string()),
            }
        }
    }
    outcome(worst <= 1e-10, format!("max relative residual {:.2e}", worst))
}

fn u_plus(alpha: f64, z: Complex64) -> Complex64 {
    let b2 = alpha * (2.0 - alpha);
    let s = z * (Complex64::new(1.0, 0.0) - b2 / (z * z)).sqrt();
    (z + s) / (2.0 - alpha)
}

fn classification() -> Outcome {
    let mut r = verify::rng(1200);
    let mut total = 0;
    let mut agree = 0;
    let mut first_miss = String::new();
    for (a, af) in [(rat(1, 4), 0.25f64), (rat(1, 2), 0.5), (int(1), 1.0), (rat(3, 2), 1.5), (rat(7, 4), 1.75)] {
        let b = (af * (2.0 - af)).sqrt();
        let pf = match PhaseField::new(&z2m1(), &a) {
            Ok(f) => f,
            Err(e) => return outcome(false, e.to_string()),
        };
        let mut zs = Vec::new();
        while zs.len() < 200 {
            let z = Complex64::new(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
            if z.im.abs() < 1e-3 && z.re.abs() <= b + 1e-3 {
                continue;
            }
            zs.push(z);
        }
        let hits: Vec<(Complex64, bool)> = zs
            .par_iter()
            .map(|z| {
                let ok = match pf.classified_fiber(*z) {
                    Ok(f) => f.max_saddle().map(|s| (s.u - u_plus(af, *z)).norm() <= 1e-8 * (1.0 + s.u.norm())).unwrap_or(false),
                    Err(_) => false,
                };
                (*z, ok)
            })
            .collect();
        for (z, ok) in hits {
            total += 1;
            if ok {
                agree += 1;
            } else if first_miss.is_empty() {
                first_miss = format!(", first miss alpha={} z={}", a, z);
            }
        }
    }
    outcome(agree == total, format!("{} of {} fibers select u+{}", agree, total, first_miss))
}

fn main() {
    let rec: Recorded = Mutex::new(Vec::new());
    type Crit<'a> = (usize, &'static str, Box<dyn Fn() -> Outcome + Sync + 'a>);
    let first: Vec<Crit> = vec![
        (1, "Legendre identity", Box::new(legendre)),
        (2, "ODE exactness", Box::new(ode_exactness)),
        (3, "limit algorithm equals symbol curve", Box::new(limit_algorithm)),
        (4, "quadratic law", Box::new(|| quadratic_law(&rec))),
        (5, "branch points of z^2-1", Box::new(branch_point_check)),
        (6, "residue certification", Box::new(boutroux)),
        (7, "trace residual on the symbol curve", Box::new(trace_residual)),
        (8, "empirical Cauchy transform convergence", Box::new(convergence)),
        (9, "Stirling constant", Box::new(stirling)),
        (11, "multiple orthogonality", Box::new(orthogonality)),
        (12, "saddle classification oracle", Box::new(classification)),
    ];
    let mut results: Vec<(usize, &str, Outcome, f64)> = first
        .par_iter()
        .map(|(id, name, f)| {
            let t = Instant::now();
            let o = f();
            (*id, *name, o, t.elapsed().as_secs_f64())
        })
        .collect();
    let t = Instant::now();
    let o = gauss_lucas(&rec);
    results.push((10, "Gauss-Lucas hull containment", o, t.elapsed().as_secs_f64()));
    results.sort_by_key(|r| r.0);
    let mut all = true;
    for (id, name, o, secs) in &results {
        all &= o.pass;
        println!("{} {:>2} {}: {} [{:.1} s]", if o.pass { "PASS" } else { "FAIL" }, id, name, o.detail, secs);
    }
    println!("acceptance: {} of {} criteria pass", results.iter().filter(|r| r.2.pass).count(), results.len());
    if !all {
        std::process::exit(1);
    }
}
