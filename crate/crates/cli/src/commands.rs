use serde::Serialize;
use serde_json::json;
use sdroots_core::curvature::fd::fd_battery;
use sdroots_core::fields::run_identity_suite;
use sdroots_core::indicial::{assemble_catalog, gluing_window, h2plus_predicate, spectral_gap, IndicialError, RootCatalog};
use sdroots_core::oracle::{ode_suite, pencil::pencil_suite};
use sdroots_core::spectra::{lens_scalar_multiplicity, CrossSectionSpec, GroupAction, SphereQuotient};
use std::f64::consts::PI;

use crate::args::{GeometryArgs, Suite};
use crate::output::{Report, RootRecord, SCHEMA};
use crate::CliError;

fn catalog(cs: &CrossSectionSpec, j_max: usize) -> Result<RootCatalog, CliError> {
    assemble_catalog(cs, j_max).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn roots(geometry: &GeometryArgs, j_max: usize, window: Option<(f64, f64)>) -> Result<Report<RootRecord>, CliError> {
    let (cs, label) = geometry.resolve()?;
    let cat = catalog(&cs, j_max)?;
    let rows: Vec<RootRecord> = cat
        .roots
        .iter()
        .filter(|r| window.is_none_or(|(a, b)| a <= r.value.re && r.value.re <= b))
        .map(RootRecord::from)
        .collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "roots",
        "cross_section": label,
        "kappa": cs.kappa(),
        "j_max": j_max,
        "window": window.map(|(a, b)| [a, b]),
        "kernel_dim_at_zero": cat.kernel_dim_at_zero,
        "cokernel_dim_at_zero": cat.cokernel_dim_at_zero,
        "complete_below": cat.complete_below,
        "caveats": cat.caveats,
        "notes": cat.notes,
        "roots": rows,
    });
    Ok(Report { json, rows })
}

#[derive(Debug, Serialize)]
pub struct GapRow {
    cross_section: String,
    gap: Option<f64>,
    gap_above_conformal_killing: Option<f64>,
    window_lower: Option<f64>,
    window_upper: Option<f64>,
    summary: String,
}

pub fn gap(geometry: &GeometryArgs, j_max: usize) -> Result<Report<GapRow>, CliError> {
    let (cs, label) = geometry.resolve()?;
    let cat = catalog(&cs, j_max)?;
    let g = spectral_gap(&cat);
    let (window, summary) = match gluing_window(&cat) {
        Ok(w) => {
            let s = format!("gluing window ({}, {})", w.lower, w.upper);
            (Some(w), s)
        }
        Err(IndicialError::WrongGeometry(_)) => (None, "gluing window defined for spherical cross-sections only".to_string()),
        Err(e) => return Err(CliError::Failed(format!("gluing window: {e}"))),
    };
    let row = GapRow {
        cross_section: label.clone(),
        gap: g.gap,
        gap_above_conformal_killing: g.gap_above_conformal_killing,
        window_lower: window.as_ref().map(|w| w.lower),
        window_upper: window.as_ref().map(|w| w.upper),
        summary: summary.clone(),
    };
    let json = json!({
        "schema": SCHEMA,
        "command": "gap",
        "cross_section": label,
        "j_max": j_max,
        "gap": g.gap,
        "gap_above_conformal_killing": g.gap_above_conformal_killing,
        "window": window.as_ref().map(|w| [w.lower, w.upper]),
        "caveats": window.map(|w| w.caveats).unwrap_or_default(),
        "summary": summary,
    });
    Ok(Report { json, rows: vec![row] })
}

#[derive(Debug, Serialize)]
pub struct KsRow {
    cross_section: String,
    h2plus_vanishes: bool,
    rational_homology_sphere: bool,
    b1: usize,
    dim_codazzi: usize,
    cokernel_dim_at_zero: usize,
    catalog_cokernel_dim_at_zero: usize,
    summary: String,
}

pub fn ks(geometry: &GeometryArgs) -> Result<Report<KsRow>, CliError> {
    let (cs, label) = geometry.resolve()?;
    let v = h2plus_predicate(&cs).map_err(|e| CliError::Usage(e.to_string()))?;
    let cat = catalog(&cs, 0)?;
    let summary = if v.h2plus_vanishes {
        "H2+ = 0".to_string()
    } else {
        format!("H2+ nonzero; cokernel dim at 0 = 1+b1+2·dimC = {}", v.cokernel_dim_at_zero)
    };
    let row = KsRow {
        cross_section: label,
        h2plus_vanishes: v.h2plus_vanishes,
        rational_homology_sphere: v.rational_homology_sphere,
        b1: v.b1,
        dim_codazzi: v.dim_codazzi,
        cokernel_dim_at_zero: v.cokernel_dim_at_zero,
        catalog_cokernel_dim_at_zero: cat.cokernel_dim_at_zero,
        summary,
    };
    let mut json = serde_json::to_value(&row).map_err(|e| CliError::Internal(e.to_string()))?;
    json["schema"] = json!(SCHEMA);
    json["command"] = json!("ks");
    Ok(Report { json, rows: vec![row] })
}

#[derive(Debug, Serialize)]
pub struct LensRow {
    j: u32,
    eigenvalue: u64,
    sphere_multiplicity: u64,
    multiplicity: usize,
}

pub fn lens(g: GroupAction, j_max: u32) -> Result<Report<LensRow>, CliError> {
    let q = SphereQuotient::Lens(g);
    let rows: Vec<LensRow> = (0..=j_max)
        .map(|j| {
            let jj = j as u64;
            LensRow { j, eigenvalue: jj * (jj + 2), sphere_multiplicity: (jj + 1) * (jj + 1), multiplicity: lens_scalar_multiplicity(&q, j) }
        })
        .collect();
    let (q1, q2) = g.q();
    let json = json!({
        "schema": SCHEMA,
        "command": "lens",
        "p": g.p(),
        "q": [q1, q2],
        "j_max": j_max,
        "multiplicities": rows,
    });
    Ok(Report { json, rows })
}

#[derive(Debug, Serialize)]
pub struct VerifyRow {
    suite: &'static str,
    name: String,
    residual: f64,
    tolerance: f64,
    halving_ratio: Option<f64>,
    pass: bool,
}

pub struct VerifyParams {
    pub n: usize,
    pub seed: u64,
    pub eps: f64,
    pub j_max: usize,
    pub lattice: Option<[f64; 3]>,
}

fn check_grid(n: usize) -> Result<(), CliError> {
    if n.is_power_of_two() && (2..=32).contains(&n) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--N must be a power of two between 2 and 32, got {n}")))
    }
}

/// Runs a suite. The report is returned even when checks fail; the caller
/// turns failures into the exit code.
pub fn verify(suite: Suite, p: &VerifyParams) -> Result<Report<VerifyRow>, CliError> {
    let lattice = p.lattice.unwrap_or([2.0 * PI; 3]);
    let (name, rows, results) = match suite {
        Suite::Identities => {
            check_grid(p.n)?;
            let reps = run_identity_suite(lattice, p.n, p.seed);
            let rows = reps
                .iter()
                .map(|r| VerifyRow { suite: "identities", name: r.identity_name.clone(), residual: r.residual, tolerance: r.tolerance, halving_ratio: None, pass: r.pass })
                .collect();
            ("identities", rows, serde_json::to_value(&reps))
        }
        Suite::Linearization => {
            check_grid(p.n)?;
            if !(1e-5..=1e-3).contains(&p.eps) {
                return Err(CliError::Usage(format!("--eps must lie in [1e-5, 1e-3], got {}", p.eps)));
            }
            if p.lattice.is_some() {
                return Err(CliError::Usage("the linearization battery runs on the 2π torus only".into()));
            }
            let cases = fd_battery(p.seed, p.n, p.eps).map_err(|e| CliError::Internal(e.to_string()))?;
            let rows = cases
                .iter()
                .map(|c| VerifyRow {
                    suite: "linearization",
                    name: c.name.clone(),
                    residual: c.report.rel_error,
                    tolerance: sdroots_core::curvature::fd::FD_TOL,
                    halving_ratio: Some(c.ratio),
                    pass: c.pass,
                })
                .collect();
            ("linearization", rows, serde_json::to_value(&cases))
        }
        Suite::Oracle => {
            let mut checks = ode_suite(48, p.j_max);
            checks.extend(pencil_suite(lattice, 2));
            let rows = checks
                .iter()
                .map(|c| VerifyRow { suite: "oracle", name: c.name.clone(), residual: c.max_mismatch, tolerance: c.tolerance, halving_ratio: None, pass: c.pass })
                .collect();
            ("oracle", rows, serde_json::to_value(&checks))
        }
    };
    let rows: Vec<VerifyRow> = rows;
    let results = results.map_err(|e| CliError::Internal(e.to_string()))?;
    let json = json!({
        "schema": SCHEMA,
        "command": "verify",
        "suite": name,
        "params": {"N": p.n, "seed": p.seed, "eps": p.eps, "j_max": p.j_max, "lattice": lattice},
        "pass": rows.iter().all(|r| r.pass),
        "results": results,
    });
    Ok(Report { json, rows })
}

/// Failure lines for stderr, naming each failed check and its residual.
pub fn failures(rows: &[VerifyRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| !r.pass)
        .map(|r| format!("FAIL {} {}: residual {:e} (tolerance {:e})", r.suite, r.name, r.residual, r.tolerance))
        .collect()
}
