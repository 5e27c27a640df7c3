//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its pinned tolerance, and the test fails if any criterion fails.
//! Runs without the libtest harness so the lines are always shown.

use num_complex::Complex64 as C64;
use sdroots_core::curvature::fd::fd_battery;
use sdroots_core::fields::run_identity_suite;
use sdroots_core::indicial::{assemble_catalog, gluing_window, h2plus_predicate, type3_roots, CaseTag, RootCatalog};
use sdroots_core::oracle::pencil::check_mode;
use sdroots_core::oracle::{companion_roots, flat_mode_pencil, ode_suite};
use sdroots_core::spectra::{lens_scalar_multiplicity, parse_hyperbolic_spectrum, CrossSectionSpec, GroupAction, SphereQuotient};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

const TWO_PI: [f64; 3] = [2.0 * PI; 3];
const FD_SEED: u64 = 2024;
const IDENTITY_SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let pass = out.pass && in_time;
    let budget_s = budget.map(|b| format!(", budget {:.0}s", b.as_secs_f64())).unwrap_or_default();
    println!(
        "[{}] criterion {id:2}: {title}: {} ({:.3}s{budget_s})",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn near_int(x: f64, tol: f64) -> bool {
    (x - x.round()).abs() < tol
}

fn sphere_gap() -> Outcome {
    const TOL: f64 = 1e-9;
    let cat = assemble_catalog(&CrossSectionSpec::sphere(), 10).unwrap();
    let mut problems = Vec::new();
    let mut low: Vec<f64> = cat.roots.iter().filter(|r| r.value.re.abs() < 2.0 - TOL).map(|r| r.value.re).collect();
    if cat.roots.iter().any(|r| r.value.re.abs() < 2.0 - TOL && r.value.im.abs() > TOL) {
        problems.push("complex root with |Re| < 2".to_string());
    }
    low.sort_by(f64::total_cmp);
    low.dedup_by(|a, b| (*a - *b).abs() < TOL);
    let expected = [-1.0, 0.0, 1.0];
    if low.len() != 3 || low.iter().zip(expected).any(|(a, b)| (a - b).abs() > TOL) {
        problems.push(format!("low roots {low:?}"));
    }
    for r in &cat.roots {
        let v = r.value;
        let bad = match r.case_tag {
            CaseTag::Case2 | CaseTag::Case3 => v.im.abs() > TOL || !near_int(v.re, TOL) || v.re.abs() < 2.0 - TOL,
            CaseTag::Case4 => v.re.abs() <= 6f64.sqrt(),
            CaseTag::Case5 => v.im.abs() > TOL || v.re.abs() < 5f64.sqrt() - TOL,
            _ => false,
        };
        if bad {
            problems.push(format!("{:?} root {v}", r.case_tag));
        }
    }
    Outcome { pass: problems.is_empty(), detail: format!("{} roots, low set {low:?}, tol {TOL:e}, issues {problems:?}", cat.roots.len()) }
}

fn case2_integers() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    let mut ok = true;
    for j in 2..=10 {
        let jf = j as f64;
        let got: Vec<C64> = type3_roots(jf * jf + 2.0 * jf - 2.0, 1).unwrap().iter().map(|r| r.value).collect();
        let want = [-(jf + 2.0), -jf, jf, jf + 2.0];
        ok &= got.len() == 4;
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((g - C64::new(w, 0.0)).norm());
        }
    }
    Outcome { pass: ok && worst <= TOL, detail: format!("j = 2..10, max error {worst:e}, tol {TOL:e}") }
}

fn oracle_agreement() -> Outcome {
    let checks = ode_suite(48, 10);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    let worst = checks.iter().map(|c| c.max_mismatch).fold(0.0, f64::max);
    Outcome {
        pass: failed.is_empty() && checks.iter().all(|c| c.tolerance <= 1e-9),
        detail: format!("{} systems, max mismatch {worst:e}, tol 1e-9, failed {failed:?}", checks.len()),
    }
}

fn flat_dimension() -> Outcome {
    let mut dims = Vec::new();
    for lattice in [TWO_PI, [1.0, 1.7, 2.3], [3.0, 3.0, 0.5]] {
        let cat = assemble_catalog(&CrossSectionSpec::torus(lattice).unwrap(), 2).unwrap();
        dims.push((cat.kernel_dim_at_zero, cat.cokernel_dim_at_zero));
    }
    let pencil = companion_roots(&flat_mode_pencil([0, 0, 0], TWO_PI)).unwrap();
    let zero: usize = pencil.iter().filter(|r| r.value.norm() < 1e-9).map(|r| r.algebraic).sum();
    Outcome {
        pass: dims.iter().all(|&d| d == (14, 14)) && zero == 14,
        detail: format!("catalog (ker, coker) {dims:?}, pencil at xi=0 {zero}, exact"),
    }
}

fn flat_pencil() -> Outcome {
    const TOL: f64 = 1e-8;
    let mut modes = Vec::new();
    for a in -3i64..=3 {
        for b in -3i64..=3 {
            for c in -3i64..=3 {
                if a * a + b * b + c * c <= 9 {
                    modes.push([a, b, c]);
                }
            }
        }
    }
    let checks: Vec<_> = modes.iter().map(|&xi| check_mode(xi, TWO_PI)).collect();
    let worst = checks.iter().map(|c| c.max_mismatch).fold(0.0, f64::max);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    Outcome {
        pass: failed.is_empty() && worst <= TOL,
        detail: format!("{} modes, max mismatch {worst:e}, tol {TOL:e}, Jordan counts exact, failed {failed:?}", modes.len()),
    }
}

fn identity_suite() -> Outcome {
    let reps = run_identity_suite(TWO_PI, 8, IDENTITY_SEED);
    let worst = reps.iter().map(|r| r.residual).fold(0.0, f64::max);
    let failed: Vec<&str> = reps.iter().filter(|r| !r.pass).map(|r| r.identity_name.as_str()).collect();
    Outcome {
        pass: reps.len() == 11 && failed.is_empty() && worst < 1e-10,
        detail: format!("{} identities, N=8, seed {IDENTITY_SEED}, max residual {worst:e}, tol 1e-10, failed {failed:?}", reps.len()),
    }
}

fn fd_linearization() -> Outcome {
    match fd_battery(FD_SEED, 16, 1e-4) {
        Ok(cases) => {
            let worst = cases.iter().map(|c| c.report.rel_error).fold(0.0, f64::max);
            let min_ratio = cases.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
            let failed: Vec<&str> = cases.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            Outcome {
                pass: cases.len() == 10 && worst <= 1e-6 && min_ratio >= 3.5,
                detail: format!(
                    "{} cases, N=16, eps 1e-4, seed {FD_SEED}, max rel {worst:e} (tol 1e-6), min halving ratio {min_ratio:.3} (>= 3.5), failed {failed:?}",
                    cases.len()
                ),
            }
        }
        Err(e) => Outcome { pass: false, detail: format!("error: {e}") },
    }
}

const HYP_BASE: &str = "b1 2\nscalar 0 0 1\nscalar 1 5.5 3\noneform 0 0 2\noneform 1 4.2 4\n";

fn hyperbolic_predicates() -> Outcome {
    let with = format!("{HYP_BASE}codazzi 3\ntt 0 3 3\ntt 1 7.5 2\n");
    let without = format!("{HYP_BASE}codazzi 0\ntt 1 7.5 2\n");
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, text, vanishes) in [("with TT at 3", with, false), ("without TT at 3", without, true)] {
        let cs = CrossSectionSpec::hyperbolic(parse_hyperbolic_spectrum(&text, name).unwrap());
        let v = h2plus_predicate(&cs).unwrap();
        let cat = assemble_catalog(&cs, 0).unwrap();
        let formula = 1 + v.b1 + 2 * v.dim_codazzi;
        ok &= v.h2plus_vanishes == vanishes && v.cokernel_dim_at_zero == formula && cat.cokernel_dim_at_zero == formula;
        notes.push(format!(
            "{name}: H2+ vanishes {}, predicate {} catalog {} formula {formula}",
            v.h2plus_vanishes, v.cokernel_dim_at_zero, cat.cokernel_dim_at_zero
        ));
    }
    Outcome { pass: ok, detail: format!("{}, exact", notes.join("; ")) }
}

fn has_case1(cat: &RootCatalog) -> bool {
    let has = |s: f64| {
        cat.roots
            .iter()
            .any(|r| r.case_tag == CaseTag::Case1 && r.multiplicity > 0 && (r.value - C64::new(s, 0.0)).norm() < 1e-9)
    };
    has(1.0) && has(-1.0)
}

fn lens_multiplicities() -> Outcome {
    let g = GroupAction::new(2, 1, 1).unwrap();
    let q = SphereQuotient::Lens(g);
    let mut ok = true;
    let mut bad = Vec::new();
    for j in 0..=9u32 {
        let m = lens_scalar_multiplicity(&q, j);
        let want = if j % 2 == 1 { 0 } else { ((j + 1) * (j + 1)) as usize };
        if m != want {
            ok = false;
            bad.push((j, m, want));
        }
    }
    let trivial = has_case1(&assemble_catalog(&CrossSectionSpec::sphere(), 6).unwrap());
    let rp3 = has_case1(&assemble_catalog(&CrossSectionSpec::lens(g), 6).unwrap());
    Outcome {
        pass: ok && trivial && !rp3,
        detail: format!("RP3 j <= 9 mismatches {bad:?}, case-1 +-1 on S3 {trivial}, on RP3 {rp3}, exact"),
    }
}

fn gluing() -> Outcome {
    let mut specs = vec![("S3".to_string(), CrossSectionSpec::sphere())];
    for (p, q1, q2) in [(2, 1, 1), (3, 1, 1), (5, 1, 2), (7, 1, 3)] {
        specs.push((format!("L({p};{q1},{q2})"), CrossSectionSpec::lens(GroupAction::new(p, q1, q2).unwrap())));
    }
    let mut ok = true;
    let mut got = Vec::new();
    for (name, cs) in specs {
        match assemble_catalog(&cs, 8).and_then(|c| gluing_window(&c)) {
            Ok(w) => {
                ok &= w.lower == 0.0 && (w.upper - 2.0).abs() < 1e-9;
                got.push(format!("{name} ({}, {})", w.lower, w.upper));
            }
            Err(e) => {
                ok = false;
                got.push(format!("{name} error {e}"));
            }
        }
    }
    Outcome { pass: ok, detail: format!("{}, tol 1e-9", got.join(", ")) }
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "spherical root gap", Some(secs(1)), sphere_gap),
        run(2, "case-2 integer roots", None, case2_integers),
        run(3, "closed forms vs companion roots", Some(secs(5)), oracle_agreement),
        run(4, "flat dimension 14", None, flat_dimension),
        run(5, "flat mode pencil vs catalog", Some(secs(10)), flat_pencil),
        run(6, "operator identity suite", Some(secs(5)), identity_suite),
        run(7, "finite-difference linearization", Some(secs(60)), fd_linearization),
        run(8, "hyperbolic predicates", None, hyperbolic_predicates),
        run(9, "lens multiplicities", None, lens_multiplicities),
        run(10, "gluing window", None, gluing),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
