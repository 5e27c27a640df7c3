//! Closed-form indicial roots and the assembled root catalogs.
//!
//! Each eigenvalue of the cross-section feeds four families of ODEs in t:
//! the tensor equation for Z (case 2), the 1-form equation for Z = fK(ω)
//! (case 3), and the two mixed systems obtained from □_K on
//! `c(t)φ dt + k(t) dφ` (case 4) and `m(t) η` (case 5). Conformal Killing
//! solutions are split off as cases 0 and 1.
//!
//! `multiplicity` counts independent solutions `e^{λt} p(y, t)` at the
//! given rate, so a Jordan root contributes both `B` and `tC`.

use std::cmp::Ordering;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectra::{
    self, lens_scalar_multiplicity, CrossSectionSpec, Geometry, OperatorKind, SpectraError, SpectrumEntry,
    SphereQuotient,
};

/// Relative tolerance for merging coincident roots.
pub const MERGE_TOL: f64 = 1e-9;
/// Real parts below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum IndicialError {
    #[error("eigenvalue {value} is below the bound {bound} for curvature {kappa}")]
    Bound { value: f64, bound: f64, kappa: i32 },
    #[error("eigenvalue must be nonnegative, got {0}")]
    Negative(f64),
    #[error("curvature sign must be -1, 0 or 1, got {0}")]
    BadKappa(i32),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("catalog has no roots")]
    EmptyCatalog,
    #[error("operation requires a {0} cross-section")]
    WrongGeometry(&'static str),
    #[error("gluing window upper end {0} is below 2")]
    WindowBelowTwo(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    Case0,
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
}

impl CaseTag {
    pub fn index(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Kernel,
    Cokernel,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionForm {
    ZOnly,
    OmegaOnly,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Origin {
    pub kind: OperatorKind,
    pub j: usize,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicialRoot {
    pub value: C64,
    pub case_tag: CaseTag,
    pub origin: Origin,
    pub side: Side,
    pub solution_form: SolutionForm,
    pub jordan: bool,
    pub conformal_killing: bool,
    pub multiplicity: usize,
}

/// A characteristic root of one scalar or matrix ODE; `order` is its
/// algebraic multiplicity as a root of the characteristic polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoot {
    pub value: C64,
    pub order: usize,
}

impl CharRoot {
    pub fn jordan(&self) -> bool {
        self.order > 1
    }
}

fn check_kappa(kappa: i32) -> Result<(), IndicialError> {
    if (-1..=1).contains(&kappa) {
        Ok(())
    } else {
        Err(IndicialError::BadKappa(kappa))
    }
}

fn clean(z: C64) -> C64 {
    let f = |x: f64| if x.abs() < 1e-14 { 0.0 } else { x };
    C64::new(f(z.re), f(z.im))
}

/// Groups values that agree to `MERGE_TOL`, summing orders.
fn collect(values: impl IntoIterator<Item = (C64, usize)>) -> Vec<CharRoot> {
    let mut out: Vec<CharRoot> = Vec::new();
    for (v, n) in values {
        let v = clean(v);
        match out.iter_mut().find(|r| (r.value - v).norm() < MERGE_TOL * r.value.norm().max(1.0)) {
            Some(r) => r.order += n,
            None => out.push(CharRoot { value: v, order: n }),
        }
    }
    sort_roots(&mut out);
    out
}

fn cmp_c(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn sort_roots(r: &mut [CharRoot]) {
    r.sort_by(|a, b| cmp_c(&a.value, &b.value));
}

/// Roots of −½f̈ ∓ βḟ − (κ + λ/2)f = 0 over both helicities: ±β ± √κ with
/// β = √(λ + 3κ).
pub fn type3_roots(lambda: f64, kappa: i32) -> Result<Vec<CharRoot>, IndicialError> {
    check_kappa(kappa)?;
    let bound = spectra::tt_lower_bound(kappa);
    if lambda < bound - ZERO_TOL {
        return Err(IndicialError::Bound { value: lambda, bound, kappa });
    }
    let beta = (lambda + 3.0 * kappa as f64).max(0.0).sqrt();
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let b = C64::new(beta, 0.0);
    Ok(match kappa {
        1 => collect([(b + one, 1), (b - one, 1), (-b + one, 1), (-b - one, 1)]),
        // β = 0: both helicities are the same equation f̈ + f = 0.
        -1 if beta == 0.0 => collect([(i, 1), (-i, 1)]),
        -1 => collect([(b + i, 1), (b - i, 1), (-b + i, 1), (-b - i, 1)]),
        _ if beta == 0.0 => collect([(b, 2)]),
        _ => collect([(b, 2), (-b, 2)]),
    })
}

/// Roots of f̈ − νf = 0 for Z = f K(ω) with ω a co-closed eigenform.
/// At ν = 0 only constants solve the first-order constraint.
pub fn type2_roots(nu: f64, kappa: i32) -> Result<Vec<CharRoot>, IndicialError> {
    check_kappa(kappa)?;
    if nu < 0.0 {
        return Err(IndicialError::Negative(nu));
    }
    if nu == 0.0 {
        return Ok(vec![CharRoot { value: C64::new(0.0, 0.0), order: 1 }]);
    }
    let s = nu.sqrt();
    Ok(collect([(C64::new(s, 0.0), 1), (C64::new(-s, 0.0), 1)]))
}

/// The pair α^±(μ) = √(μ − 2κ ± 2√(κ² − μκ/3)), principal branches.
pub fn alpha_pm(mu: f64, kappa: i32) -> (C64, C64) {
    let k = kappa as f64;
    let inner = C64::new(k * k - mu * k / 3.0, 0.0).sqrt();
    let base = C64::new(mu - 2.0 * k, 0.0);
    ((base + 2.0 * inner).sqrt(), (base - 2.0 * inner).sqrt())
}

/// Eigenvalues of the 4×4 type-(a) system: ±α^+(μ), ±α^-(μ).
pub fn mixed_a_roots(mu: f64, kappa: i32) -> Result<Vec<CharRoot>, IndicialError> {
    check_kappa(kappa)?;
    if mu < 0.0 {
        return Err(IndicialError::Negative(mu));
    }
    let (ap, am) = alpha_pm(mu, kappa);
    Ok(collect([(ap, 1), (-ap, 1), (am, 1), (-am, 1)]))
}

/// Roots of m̈ − νm + 4κm = 0: ±√(ν − 4κ).
pub fn mixed_b_roots(nu: f64, kappa: i32) -> Result<Vec<CharRoot>, IndicialError> {
    check_kappa(kappa)?;
    if nu < 0.0 {
        return Err(IndicialError::Negative(nu));
    }
    let s = C64::new(nu - 4.0 * kappa as f64, 0.0).sqrt();
    Ok(collect([(s, 1), (-s, 1)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootFamily {
    Type3,
    Type2,
    MixedA,
    MixedB,
}

/// A root with its classification but before multiplicities are assigned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedRoot {
    pub value: C64,
    pub order: usize,
    pub case_tag: CaseTag,
    pub solution_form: SolutionForm,
    pub conformal_killing: bool,
    pub jordan: bool,
}

fn tagged(r: &CharRoot, case_tag: CaseTag, form: SolutionForm) -> TaggedRoot {
    TaggedRoot {
        value: r.value,
        order: r.order,
        case_tag,
        solution_form: form,
        conformal_killing: false,
        jordan: r.jordan(),
    }
}

fn killing(value: C64, case_tag: CaseTag) -> TaggedRoot {
    TaggedRoot {
        value,
        order: 1,
        case_tag,
        solution_form: SolutionForm::OmegaOnly,
        conformal_killing: true,
        jordan: false,
    }
}

/// Splits off conformal Killing solutions and tags the rest.
///
/// Constant φ has dφ = 0, so only `c(t) dt` survives and the cokernel keeps
/// `(0, dt)` alone. On S³ the first nonconstant eigenfunctions give
/// `e^{±t}(φ dt ∓ dφ)`, and the ν = 4 forms are Killing. Parallel 1-forms on
/// a flat cross-section are Killing as well; there `K(ω) = 0`, so the
/// tensor equation contributes nothing.
pub fn apply_exclusions(kappa: i32, family: RootFamily, origin: &Origin, roots: &[CharRoot]) -> Vec<TaggedRoot> {
    let x = origin.eigenvalue;
    let near = |a: f64| (x - a).abs() <= ZERO_TOL * a.abs().max(1.0);
    match family {
        RootFamily::MixedA if near(0.0) => vec![killing(C64::new(0.0, 0.0), CaseTag::Case0)],
        RootFamily::MixedA if kappa == 1 && near(3.0) => vec![
            killing(C64::new(-1.0, 0.0), CaseTag::Case1),
            killing(C64::new(1.0, 0.0), CaseTag::Case1),
        ],
        RootFamily::MixedA => roots.iter().map(|r| tagged(r, CaseTag::Case4, SolutionForm::Mixed)).collect(),
        RootFamily::MixedB if (kappa == 1 && near(4.0)) || (kappa == 0 && near(0.0)) => {
            vec![killing(C64::new(0.0, 0.0), CaseTag::Case0)]
        }
        RootFamily::MixedB => roots.iter().map(|r| tagged(r, CaseTag::Case5, SolutionForm::Mixed)).collect(),
        RootFamily::Type2 if (kappa == 1 && near(4.0)) || (kappa == 0 && near(0.0)) => Vec::new(),
        RootFamily::Type2 => roots.iter().map(|r| tagged(r, CaseTag::Case3, SolutionForm::ZOnly)).collect(),
        RootFamily::Type3 => roots.iter().map(|r| tagged(r, CaseTag::Case2, SolutionForm::ZOnly)).collect(),
    }
}

/// Indicial roots contributed by one eigenspace of dimension `multiplicity`.
pub fn entry_roots(kappa: i32, entry: &SpectrumEntry) -> Result<Vec<IndicialRoot>, IndicialError> {
    let origin = Origin { kind: entry.kind, j: entry.j, eigenvalue: entry.eigenvalue };
    let m = entry.multiplicity;
    if m == 0 {
        return Ok(Vec::new());
    }
    let x = entry.eigenvalue;
    // Eigenspaces on which ḏ/ or *d has two signs split into halves; each
    // half yields half of the roots.
    let mut groups: Vec<(Vec<TaggedRoot>, usize)> = Vec::new();
    match entry.kind {
        OperatorKind::ScalarHodge => {
            let r = mixed_a_roots(x, kappa)?;
            groups.push((apply_exclusions(kappa, RootFamily::MixedA, &origin, &r), m));
        }
        OperatorKind::CoclosedOneFormHodge => {
            let r2 = type2_roots(x, kappa)?;
            let half = if x > 0.0 { m / 2 } else { m };
            groups.push((apply_exclusions(kappa, RootFamily::Type2, &origin, &r2), half));
            let rb = mixed_b_roots(x, kappa)?;
            groups.push((apply_exclusions(kappa, RootFamily::MixedB, &origin, &rb), m));
        }
        OperatorKind::DivFreeTTRough => {
            let r = type3_roots(x, kappa)?;
            let beta_zero = (x + 3.0 * kappa as f64).abs() <= ZERO_TOL;
            let half = if beta_zero { m } else { m / 2 };
            groups.push((apply_exclusions(kappa, RootFamily::Type3, &origin, &r), half));
        }
    }
    let mut out: Vec<IndicialRoot> = Vec::new();
    for (roots, per) in groups {
        for t in roots {
            let multiplicity = if t.conformal_killing { m } else { per * t.order };
            if multiplicity == 0 {
                continue;
            }
            out.push(IndicialRoot {
                value: t.value,
                case_tag: t.case_tag,
                origin,
                side: Side::Both,
                solution_form: t.solution_form,
                jordan: t.jordan,
                conformal_killing: t.conformal_killing,
                multiplicity,
            });
        }
    }
    if kappa == 0 && entry.kind == OperatorKind::CoclosedOneFormHodge && x > 0.0 {
        coalesce_flat_oneform(&mut out);
    }
    Ok(out)
}

/// On a flat cross-section the type-II rates ±√ν equal the mixed-(b) rates
/// ±√(ν − 4κ). In the helicity carrying the type-II root the two solutions
/// form a Jordan chain (B + tC), so that half of the mixed-(b) multiplicity
/// moves into the type-II root, which becomes Jordan with form Mixed.
fn coalesce_flat_oneform(roots: &mut [IndicialRoot]) {
    let tol = |a: C64, b: C64| (a - b).norm() <= MERGE_TOL * a.norm().max(1.0);
    for i in 0..roots.len() {
        if roots[i].case_tag != CaseTag::Case3 {
            continue;
        }
        let v = roots[i].value;
        let take = roots[i].multiplicity;
        if let Some(j) = (0..roots.len()).find(|&j| roots[j].case_tag == CaseTag::Case5 && tol(roots[j].value, v)) {
            roots[j].multiplicity -= take.min(roots[j].multiplicity);
            roots[i].multiplicity += take;
            roots[i].jordan = true;
            roots[i].solution_form = SolutionForm::Mixed;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootCatalog {
    pub cross_section: CrossSectionSpec,
    pub roots: Vec<IndicialRoot>,
    pub j_max: usize,
    pub kernel_dim_at_zero: usize,
    pub cokernel_dim_at_zero: usize,
    /// Every root with |Re| below this bound is present despite truncation.
    pub complete_below: Option<f64>,
    pub caveats: Vec<String>,
    pub notes: Vec<String>,
}

impl RootCatalog {
    /// Root values on the kernel side, with multiplicity.
    pub fn kernel_values(&self) -> Vec<(C64, usize)> {
        self.side_values(Side::Kernel)
    }

    pub fn cokernel_values(&self) -> Vec<(C64, usize)> {
        self.side_values(Side::Cokernel)
    }

    fn side_values(&self, side: Side) -> Vec<(C64, usize)> {
        self.roots
            .iter()
            .filter(|r| r.side == side || r.side == Side::Both)
            .map(|r| (r.value, r.multiplicity))
            .collect()
    }
}

pub const CASE4_NOTE: &str = "case-4 rates for mu = j(j+2) on S^3 have imaginary part \
    (2/3)*sqrt(3(j-1)(j+3)) inside the square root, as given by the characteristic polynomial \
    of the type-(a) system; a printed variant with coefficient (2/9)*sqrt((j+3)(j-1)) does not \
    satisfy that polynomial";

pub const DESCENT_CAVEAT: &str = "1-form and tensor multiplicities on S^3/Gamma were not supplied; \
    S^3 multiplicities are used, so case 2/3/5 roots are candidates only";

pub const KILLING_CAVEAT: &str = "Killing-field dimension of S^3/Gamma not supplied; using 6";

/// Spectrum entries used for a catalog truncated at `j_max`, plus caveats.
pub fn catalog_entries(
    cs: &CrossSectionSpec,
    j_max: usize,
) -> Result<(Vec<SpectrumEntry>, Vec<String>), IndicialError> {
    let mut caveats = Vec::new();
    let entries = match cs.geometry() {
        Geometry::Sphere { quotient, killing_dim, descent } => {
            let mut out = Vec::new();
            let mut descent_missing = false;
            for kind in OperatorKind::ALL {
                for j in spectra::sphere_min_index(kind)..=j_max {
                    let mut e = spectra::sphere_entry(kind, j)?;
                    match quotient {
                        SphereQuotient::Trivial => {}
                        SphereQuotient::Lens(_) if kind == OperatorKind::ScalarHodge => {
                            e.multiplicity = lens_scalar_multiplicity(quotient, j as u32);
                        }
                        SphereQuotient::Lens(_) => {
                            let supplied = descent.as_ref().and_then(|d| d.multiplicities.get(&(kind, j)).copied());
                            if kind == OperatorKind::CoclosedOneFormHodge && j == 1 {
                                // ν = 4: the Killing fields.
                                match killing_dim.or(supplied) {
                                    Some(n) => e.multiplicity = n,
                                    None => caveats.push(KILLING_CAVEAT.to_string()),
                                }
                            } else {
                                match supplied {
                                    Some(n) => e.multiplicity = n,
                                    None => descent_missing = true,
                                }
                            }
                        }
                    }
                    if let (SphereQuotient::Trivial, Some(n)) = (quotient, killing_dim) {
                        if kind == OperatorKind::CoclosedOneFormHodge && j == 1 {
                            e.multiplicity = *n;
                        }
                    }
                    out.push(e);
                }
            }
            if descent_missing {
                caveats.push(DESCENT_CAVEAT.to_string());
            }
            out
        }
        Geometry::Torus { lattice } => {
            let mut out = Vec::new();
            for kind in OperatorKind::ALL {
                out.extend(spectra::torus_shells(*lattice, kind, j_max + 1)?);
            }
            out
        }
        Geometry::Hyperbolic(h) => h.entries.iter().filter(|e| e.j <= j_max).cloned().collect(),
    };
    Ok((entries, caveats))
}

/// Entries just past the truncation, one per operator.
fn first_omitted(cs: &CrossSectionSpec, j_max: usize) -> Result<Option<Vec<SpectrumEntry>>, IndicialError> {
    Ok(match cs.geometry() {
        Geometry::Sphere { .. } => Some(
            OperatorKind::ALL
                .iter()
                .map(|k| spectra::sphere_entry(*k, (j_max + 1).max(spectra::sphere_min_index(*k))))
                .collect::<Result<_, _>>()?,
        ),
        Geometry::Torus { lattice } => {
            let mut out = Vec::new();
            for kind in OperatorKind::ALL {
                out.push(spectra::torus_shells(*lattice, kind, j_max + 2)?.pop().unwrap());
            }
            Some(out)
        }
        Geometry::Hyperbolic(_) => None,
    })
}

fn cmp_roots(a: &IndicialRoot, b: &IndicialRoot) -> Ordering {
    cmp_c(&a.value, &b.value)
        .then(a.case_tag.cmp(&b.case_tag))
        .then(a.origin.kind.cmp(&b.origin.kind))
        .then(a.origin.j.cmp(&b.origin.j))
}

/// Merges roots with the same case and origin whose values agree.
pub fn dedupe(mut roots: Vec<IndicialRoot>) -> Vec<IndicialRoot> {
    roots.sort_by(cmp_roots);
    let mut out: Vec<IndicialRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        let dup = out.iter_mut().rev().take(16).find(|q| {
            q.case_tag == r.case_tag
                && q.origin.kind == r.origin.kind
                && q.origin.j == r.origin.j
                && (q.value - r.value).norm() < MERGE_TOL * q.value.norm().max(1.0)
        });
        match dup {
            Some(q) => {
                q.multiplicity += r.multiplicity;
                q.jordan |= r.jordan;
            }
            None => out.push(r),
        }
    }
    out
}

pub fn assemble_catalog(cs: &CrossSectionSpec, j_max: usize) -> Result<RootCatalog, IndicialError> {
    let kappa = cs.kappa();
    let (entries, caveats) = catalog_entries(cs, j_max)?;
    let per_entry: Vec<Vec<IndicialRoot>> = entries
        .par_iter()
        .map(|e| entry_roots(kappa, e))
        .collect::<Result<_, _>>()?;
    let roots = dedupe(per_entry.into_iter().flatten().collect());
    let dim0: usize = roots.iter().filter(|r| r.value.re.abs() < ZERO_TOL).map(|r| r.multiplicity).sum();
    let complete_below = match first_omitted(cs, j_max)? {
        Some(next) => {
            let mut best = f64::INFINITY;
            for e in next {
                for r in entry_roots(kappa, &SpectrumEntry { multiplicity: 2, ..e })? {
                    best = best.min(r.value.re.abs());
                }
            }
            Some(best)
        }
        None => None,
    };
    let mut notes = Vec::new();
    if kappa == 1 {
        notes.push(CASE4_NOTE.to_string());
    }
    Ok(RootCatalog {
        cross_section: cs.clone(),
        roots,
        j_max,
        kernel_dim_at_zero: dim0,
        cokernel_dim_at_zero: dim0,
        complete_below,
        caveats,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGap {
    /// Smallest nonzero |Re λ|.
    pub gap: Option<f64>,
    /// Smallest nonzero |Re λ| over roots that are not conformal Killing.
    pub gap_above_conformal_killing: Option<f64>,
}

pub fn spectral_gap(catalog: &RootCatalog) -> SpectralGap {
    let min_re = |ck_ok: bool| {
        catalog
            .roots
            .iter()
            .filter(|r| r.value.re.abs() >= ZERO_TOL && (ck_ok || !r.conformal_killing))
            .map(|r| r.value.re.abs())
            .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.min(x))))
    };
    SpectralGap { gap: min_re(true), gap_above_conformal_killing: min_re(false) }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingWindow {
    pub lower: f64,
    pub upper: f64,
    pub caveats: Vec<String>,
}

/// Weights δ for which the linearized gluing operator is an isomorphism:
/// (0, g) with g the first non-conformal-Killing rate.
pub fn gluing_window(catalog: &RootCatalog) -> Result<GluingWindow, IndicialError> {
    if !catalog.cross_section.is_spherical() {
        return Err(IndicialError::WrongGeometry("spherical"));
    }
    if catalog.roots.is_empty() {
        return Err(IndicialError::EmptyCatalog);
    }
    let g = spectral_gap(catalog).gap_above_conformal_killing.ok_or(IndicialError::EmptyCatalog)?;
    if g < 2.0 - MERGE_TOL {
        return Err(IndicialError::WindowBelowTwo(g));
    }
    Ok(GluingWindow { lower: 0.0, upper: g, caveats: catalog.caveats.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsVerdict {
    /// True iff the space of (Z, 0) solutions with Re λ = 0 from trace-free
    /// Codazzi tensors is trivial.
    pub h2plus_vanishes: bool,
    pub rational_homology_sphere: bool,
    pub b1: usize,
    pub dim_codazzi: usize,
    pub cokernel_dim_at_zero: usize,
}

pub fn h2plus_predicate(cs: &CrossSectionSpec) -> Result<KsVerdict, IndicialError> {
    match cs.geometry() {
        Geometry::Hyperbolic(h) => Ok(KsVerdict {
            h2plus_vanishes: h.dim_codazzi == 0,
            rational_homology_sphere: h.b1 == 0,
            b1: h.b1,
            dim_codazzi: h.dim_codazzi,
            cokernel_dim_at_zero: 1 + h.b1 + 2 * h.dim_codazzi,
        }),
        _ => Err(IndicialError::WrongGeometry("hyperbolic")),
    }
}
