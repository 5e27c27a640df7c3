//! Eigenvalue catalogs of the cross-section Y.
//!
//! Three operators matter: the scalar Hodge Laplacian (eigenvalue μ), the
//! Hodge Laplacian on co-closed 1-forms (ν) and the rough Laplacian on
//! divergence-free trace-free symmetric 2-tensors (λ, sign convention
//! `-Δ h = λ h`).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod lens;

pub use lens::{harmonic_basis, lens_projector, lens_scalar_multiplicity};

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("index j = {j} is below the minimum {min} for {kind}")]
    IndexTooSmall { kind: OperatorKind, j: usize, min: usize },
    #[error("invalid group action: {0}")]
    InvalidGroup(String),
    #[error("lattice lengths must be positive, got {0:?}")]
    BadLattice([f64; 3]),
    #[error("curvature sign {kappa} does not match geometry {geometry}")]
    KappaMismatch { kappa: i32, geometry: &'static str },
    #[error("cutoff must be positive, got {0}")]
    BadCutoff(f64),
    #[error("cannot read spectrum file {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("entry {kind} j={j} eigenvalue {eigenvalue}: {msg}")]
    Bound { kind: OperatorKind, j: usize, eigenvalue: f64, msg: String },
    #[error("inconsistent spectrum: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    ScalarHodge,
    CoclosedOneFormHodge,
    DivFreeTTRough,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [
        OperatorKind::ScalarHodge,
        OperatorKind::CoclosedOneFormHodge,
        OperatorKind::DivFreeTTRough,
    ];

    /// Short name used in files and tables.
    pub fn short(self) -> &'static str {
        match self {
            OperatorKind::ScalarHodge => "scalar",
            OperatorKind::CoclosedOneFormHodge => "oneform",
            OperatorKind::DivFreeTTRough => "tt",
        }
    }

    pub fn from_short(s: &str) -> Option<Self> {
        match s {
            "scalar" => Some(OperatorKind::ScalarHodge),
            "oneform" => Some(OperatorKind::CoclosedOneFormHodge),
            "tt" => Some(OperatorKind::DivFreeTTRough),
            _ => None,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub kind: OperatorKind,
    pub j: usize,
    pub eigenvalue: f64,
    pub multiplicity: usize,
}

/// Cyclic group of order p acting on S³ ⊂ C² by rotating the two
/// coordinate planes through 2πq1/p and 2πq2/p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    p: u32,
    q1: u32,
    q2: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl GroupAction {
    pub fn new(p: u32, q1: u32, q2: u32) -> Result<Self, SpectraError> {
        if p < 2 {
            return Err(SpectraError::InvalidGroup(format!("order p = {p} must be at least 2")));
        }
        if gcd(q1 % p, p) != 1 || gcd(q2 % p, p) != 1 {
            return Err(SpectraError::InvalidGroup(format!(
                "action ({p}; {q1}, {q2}) is not free: need gcd(q, p) = 1"
            )));
        }
        Ok(GroupAction { p, q1, q2 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> (u32, u32) {
        (self.q1, self.q2)
    }

    /// Rotation angles of the k-th power of the generator.
    pub fn angles(&self, k: u32) -> (f64, f64) {
        let base = 2.0 * std::f64::consts::PI / self.p as f64;
        (
            base * ((self.q1 as u64 * k as u64) % self.p as u64) as f64,
            base * ((self.q2 as u64 * k as u64) % self.p as u64) as f64,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereQuotient {
    Trivial,
    Lens(GroupAction),
}

/// Optional multiplicities of 1-form and tensor eigenspaces on S³/Γ.
///
/// Keys are (kind, j). Missing keys fall back to the S³ multiplicity and
/// the catalog is marked with a caveat.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DescentData {
    pub multiplicities: BTreeMap<(OperatorKind, usize), usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicSpectrum {
    pub source: String,
    pub entries: Vec<SpectrumEntry>,
    pub b1: usize,
    pub dim_codazzi: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Sphere {
        quotient: SphereQuotient,
        killing_dim: Option<usize>,
        descent: Option<DescentData>,
    },
    Torus {
        lattice: [f64; 3],
    },
    Hyperbolic(HyperbolicSpectrum),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSectionSpec {
    kappa: i32,
    geometry: Geometry,
}

impl CrossSectionSpec {
    pub fn new(kappa: i32, geometry: Geometry) -> Result<Self, SpectraError> {
        let (want, name) = match &geometry {
            Geometry::Sphere { .. } => (1, "sphere"),
            Geometry::Torus { lattice } => {
                if lattice.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(SpectraError::BadLattice(*lattice));
                }
                (0, "torus")
            }
            Geometry::Hyperbolic(_) => (-1, "hyperbolic"),
        };
        if kappa != want {
            return Err(SpectraError::KappaMismatch { kappa, geometry: name });
        }
        Ok(CrossSectionSpec { kappa, geometry })
    }

    pub fn sphere() -> Self {
        CrossSectionSpec {
            kappa: 1,
            geometry: Geometry::Sphere {
                quotient: SphereQuotient::Trivial,
                killing_dim: None,
                descent: None,
            },
        }
    }

    pub fn lens(g: GroupAction) -> Self {
        CrossSectionSpec {
            kappa: 1,
            geometry: Geometry::Sphere {
                quotient: SphereQuotient::Lens(g),
                killing_dim: None,
                descent: None,
            },
        }
    }

    pub fn torus(lattice: [f64; 3]) -> Result<Self, SpectraError> {
        Self::new(0, Geometry::Torus { lattice })
    }

    pub fn cubic_torus() -> Self {
        let l = 2.0 * std::f64::consts::PI;
        CrossSectionSpec { kappa: 0, geometry: Geometry::Torus { lattice: [l, l, l] } }
    }

    pub fn hyperbolic(spectrum: HyperbolicSpectrum) -> Self {
        CrossSectionSpec { kappa: -1, geometry: Geometry::Hyperbolic(spectrum) }
    }

    pub fn kappa(&self) -> i32 {
        self.kappa
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn is_spherical(&self) -> bool {
        matches!(self.geometry, Geometry::Sphere { .. })
    }
}

pub fn sphere_scalar_eigenvalue(j: usize) -> f64 {
    (j * (j + 2)) as f64
}

pub fn sphere_coclosed_oneform_eigenvalue(j: usize) -> Result<f64, SpectraError> {
    if j < 1 {
        return Err(SpectraError::IndexTooSmall { kind: OperatorKind::CoclosedOneFormHodge, j, min: 1 });
    }
    Ok(((j + 1) * (j + 1)) as f64)
}

pub fn sphere_tt_eigenvalue(j: usize) -> Result<f64, SpectraError> {
    if j < 2 {
        return Err(SpectraError::IndexTooSmall { kind: OperatorKind::DivFreeTTRough, j, min: 2 });
    }
    Ok((j * j + 2 * j - 2) as f64)
}

/// Smallest admissible index on S³ for each operator.
pub fn sphere_min_index(kind: OperatorKind) -> usize {
    match kind {
        OperatorKind::ScalarHodge => 0,
        OperatorKind::CoclosedOneFormHodge => 1,
        OperatorKind::DivFreeTTRough => 2,
    }
}

/// Multiplicities on the round S³.
pub fn sphere_multiplicity(kind: OperatorKind, j: usize) -> usize {
    match kind {
        OperatorKind::ScalarHodge => (j + 1) * (j + 1),
        OperatorKind::CoclosedOneFormHodge if j >= 1 => 2 * j * (j + 2),
        OperatorKind::DivFreeTTRough if j >= 2 => 2 * (j - 1) * (j + 3),
        _ => 0,
    }
}

pub fn sphere_entry(kind: OperatorKind, j: usize) -> Result<SpectrumEntry, SpectraError> {
    let eigenvalue = match kind {
        OperatorKind::ScalarHodge => sphere_scalar_eigenvalue(j),
        OperatorKind::CoclosedOneFormHodge => sphere_coclosed_oneform_eigenvalue(j)?,
        OperatorKind::DivFreeTTRough => sphere_tt_eigenvalue(j)?,
    };
    Ok(SpectrumEntry { kind, j, eigenvalue, multiplicity: sphere_multiplicity(kind, j) })
}

/// Laplacian spectrum of the flat torus with the given side lengths.
///
/// Eigenvalues are |k|² with k_i = 2π n_i / L_i. Nonzero eigenvalues carry
/// one scalar mode, two transverse 1-form modes and two TT modes per
/// lattice vector.
pub fn torus_spectrum(
    lattice: [f64; 3],
    kind: OperatorKind,
    cutoff: f64,
) -> Result<Vec<SpectrumEntry>, SpectraError> {
    if lattice.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(SpectraError::BadLattice(lattice));
    }
    if !(cutoff > 0.0) {
        return Err(SpectraError::BadCutoff(cutoff));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let bound: Vec<i64> = lattice
        .iter()
        .map(|l| (l * cutoff.sqrt() / two_pi).floor() as i64 + 1)
        .collect();
    let mut values = Vec::new();
    for a in -bound[0]..=bound[0] {
        for b in -bound[1]..=bound[1] {
            for c in -bound[2]..=bound[2] {
                let k = [
                    two_pi * a as f64 / lattice[0],
                    two_pi * b as f64 / lattice[1],
                    two_pi * c as f64 / lattice[2],
                ];
                let s = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if s <= cutoff * (1.0 + 1e-12) {
                    values.push(s);
                }
            }
        }
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut shells: Vec<(f64, usize)> = Vec::new();
    for v in values {
        match shells.last_mut() {
            Some((s, n)) if (v - *s).abs() <= 1e-12 * s.max(1.0) => *n += 1,
            _ => shells.push((v, 1)),
        }
    }
    Ok(shells
        .into_iter()
        .enumerate()
        .map(|(j, (s, n))| {
            let multiplicity = match (kind, j) {
                (OperatorKind::ScalarHodge, _) => n,
                (OperatorKind::CoclosedOneFormHodge, 0) => 3,
                (OperatorKind::DivFreeTTRough, 0) => 5,
                _ => 2 * n,
            };
            SpectrumEntry { kind, j, eigenvalue: if j == 0 { 0.0 } else { s }, multiplicity }
        })
        .collect())
}

/// First `count` distinct torus eigenvalues for one operator.
pub fn torus_shells(
    lattice: [f64; 3],
    kind: OperatorKind,
    count: usize,
) -> Result<Vec<SpectrumEntry>, SpectraError> {
    let lmin = lattice.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut cutoff = (2.0 * std::f64::consts::PI / lmin).powi(2) * (count.max(1) as f64);
    loop {
        let entries = torus_spectrum(lattice, kind, cutoff)?;
        if entries.len() > count {
            return Ok(entries.into_iter().take(count).collect());
        }
        cutoff *= 2.0;
    }
}

/// Lower bound on the TT spectrum for the given curvature sign.
pub fn tt_lower_bound(kappa: i32) -> f64 {
    match kappa {
        1 => 6.0,
        -1 => 3.0,
        _ => 0.0,
    }
}

pub fn load_hyperbolic_spectrum(path: &Path) -> Result<HyperbolicSpectrum, SpectraError> {
    let text = std::fs::read_to_string(path).map_err(|e| SpectraError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_hyperbolic_spectrum(&text, &path.display().to_string())
}

/// Parses the line format `kind j eigenvalue multiplicity` with optional
/// `b1 n` and `codazzi n` header lines.
pub fn parse_hyperbolic_spectrum(text: &str, source: &str) -> Result<HyperbolicSpectrum, SpectraError> {
    let mut b1: Option<usize> = None;
    let mut codazzi: Option<usize> = None;
    let mut entries: Vec<SpectrumEntry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| SpectraError::Parse { line: line_no, msg };
        let uint = |s: &str| s.parse::<usize>().map_err(|_| perr(format!("expected a nonnegative integer, got {s:?}")));
        match parts[0] {
            "b1" | "codazzi" => {
                if parts.len() != 2 {
                    return Err(perr(format!("header {:?} takes one value", parts[0])));
                }
                let n = uint(parts[1])?;
                let slot = if parts[0] == "b1" { &mut b1 } else { &mut codazzi };
                if slot.is_some() {
                    return Err(perr(format!("duplicate header {:?}", parts[0])));
                }
                *slot = Some(n);
            }
            k => {
                let kind = OperatorKind::from_short(k)
                    .ok_or_else(|| perr(format!("unknown kind {k:?} (expected scalar, oneform or tt)")))?;
                if parts.len() != 4 {
                    return Err(perr("expected `kind j eigenvalue multiplicity`".into()));
                }
                let j = uint(parts[1])?;
                let eigenvalue: f64 = parts[2]
                    .parse()
                    .map_err(|_| perr(format!("bad eigenvalue {:?}", parts[2])))?;
                if !eigenvalue.is_finite() {
                    return Err(perr(format!("bad eigenvalue {:?}", parts[2])));
                }
                let multiplicity = uint(parts[3])?;
                entries.push(SpectrumEntry { kind, j, eigenvalue, multiplicity });
            }
        }
    }
    validate_hyperbolic(entries, b1, codazzi, source)
}

fn validate_hyperbolic(
    mut entries: Vec<SpectrumEntry>,
    b1: Option<usize>,
    codazzi: Option<usize>,
    source: &str,
) -> Result<HyperbolicSpectrum, SpectraError> {
    for e in &entries {
        let bound = |msg: &str| SpectraError::Bound {
            kind: e.kind,
            j: e.j,
            eigenvalue: e.eigenvalue,
            msg: msg.to_string(),
        };
        if e.eigenvalue < 0.0 {
            return Err(bound("eigenvalues must be nonnegative"));
        }
        if e.kind == OperatorKind::DivFreeTTRough && e.eigenvalue < 3.0 - 1e-12 {
            return Err(bound("TT eigenvalues on a hyperbolic cross-section are at least 3"));
        }
        // Helicity halves of these eigenspaces must balance for the roots
        // to come in ± pairs.
        let split = match e.kind {
            OperatorKind::DivFreeTTRough => (e.eigenvalue - 3.0).abs() > 1e-12,
            OperatorKind::CoclosedOneFormHodge => e.eigenvalue > 0.0,
            OperatorKind::ScalarHodge => false,
        };
        if split && e.multiplicity % 2 == 1 {
            return Err(bound("multiplicity must be even (equal helicity halves)"));
        }
        if e.kind == OperatorKind::ScalarHodge && e.eigenvalue == 0.0 && e.multiplicity != 1 {
            return Err(bound("a connected cross-section has one constant function"));
        }
    }
    for kind in OperatorKind::ALL {
        let mut of_kind: Vec<&SpectrumEntry> = entries.iter().filter(|e| e.kind == kind).collect();
        of_kind.sort_by_key(|e| e.j);
        for w in of_kind.windows(2) {
            if w[0].j == w[1].j {
                return Err(SpectraError::Inconsistent(format!("duplicate {kind} index j={}", w[0].j)));
            }
            if !(w[1].eigenvalue > w[0].eigenvalue) {
                return Err(SpectraError::Inconsistent(format!(
                    "{kind} eigenvalues must increase with j (j={} has {}, j={} has {})",
                    w[0].j, w[0].eigenvalue, w[1].j, w[1].eigenvalue
                )));
            }
        }
    }

    let at_three: usize = entries
        .iter()
        .filter(|e| e.kind == OperatorKind::DivFreeTTRough && (e.eigenvalue - 3.0).abs() <= 1e-12)
        .map(|e| e.multiplicity)
        .sum();
    let dim_codazzi = codazzi.unwrap_or(at_three);
    if dim_codazzi != at_three {
        return Err(SpectraError::Inconsistent(format!(
            "codazzi = {dim_codazzi} but the TT multiplicity at eigenvalue 3 is {at_three}"
        )));
    }
    let harmonic: Option<usize> = entries
        .iter()
        .find(|e| e.kind == OperatorKind::CoclosedOneFormHodge && e.eigenvalue == 0.0)
        .map(|e| e.multiplicity);
    let b1 = match (b1, harmonic) {
        (Some(b), Some(h)) if b != h => {
            return Err(SpectraError::Inconsistent(format!(
                "b1 = {b} but the 1-form multiplicity at eigenvalue 0 is {h}"
            )))
        }
        (Some(b), _) => b,
        (None, Some(h)) => h,
        (None, None) => 0,
    };

    // Constants and harmonic 1-forms are always part of the spectrum.
    if !entries.iter().any(|e| e.kind == OperatorKind::ScalarHodge && e.eigenvalue == 0.0) {
        if entries.iter().any(|e| e.kind == OperatorKind::ScalarHodge && e.j == 0) {
            return Err(SpectraError::Inconsistent("scalar j=0 must be the constant mode (eigenvalue 0)".into()));
        }
        entries.push(SpectrumEntry { kind: OperatorKind::ScalarHodge, j: 0, eigenvalue: 0.0, multiplicity: 1 });
    }
    if b1 > 0 && harmonic.is_none() {
        if entries.iter().any(|e| e.kind == OperatorKind::CoclosedOneFormHodge && e.j == 0) {
            return Err(SpectraError::Inconsistent("oneform j=0 must be the harmonic mode when b1 > 0".into()));
        }
        entries.push(SpectrumEntry {
            kind: OperatorKind::CoclosedOneFormHodge,
            j: 0,
            eigenvalue: 0.0,
            multiplicity: b1,
        });
    }
    entries.sort_by_key(|a| (a.kind, a.j));
    Ok(HyperbolicSpectrum { source: source.to_string(), entries, b1, dim_codazzi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_values() {
        assert_eq!(sphere_scalar_eigenvalue(0), 0.0);
        assert_eq!(sphere_scalar_eigenvalue(2), 8.0);
        assert_eq!(sphere_scalar_eigenvalue(3), 15.0);
        assert_eq!(sphere_coclosed_oneform_eigenvalue(1), Ok(4.0));
        assert_eq!(sphere_coclosed_oneform_eigenvalue(5), Ok(36.0));
        assert!(sphere_coclosed_oneform_eigenvalue(0).is_err());
        assert_eq!(sphere_tt_eigenvalue(2), Ok(6.0));
        assert_eq!(sphere_tt_eigenvalue(4), Ok(22.0));
        assert!(sphere_tt_eigenvalue(1).is_err());
    }

    #[test]
    fn tt_plus_three_is_square() {
        for j in 2..40 {
            assert_eq!(sphere_tt_eigenvalue(j).unwrap() + 3.0, ((j + 1) * (j + 1)) as f64);
        }
    }

    #[test]
    fn group_must_act_freely() {
        assert!(GroupAction::new(4, 2, 1).is_err());
        assert!(GroupAction::new(1, 1, 1).is_err());
        assert!(GroupAction::new(5, 1, 2).is_ok());
    }

    #[test]
    fn kappa_must_match() {
        assert!(CrossSectionSpec::new(0, Geometry::Torus { lattice: [1.0, 1.0, 1.0] }).is_ok());
        assert!(CrossSectionSpec::new(1, Geometry::Torus { lattice: [1.0, 1.0, 1.0] }).is_err());
        assert!(CrossSectionSpec::torus([1.0, -1.0, 1.0]).is_err());
    }

    #[test]
    fn parse_comments_and_headers() {
        let s = parse_hyperbolic_spectrum("# demo\nb1 2\ncodazzi 2\ntt 0 3 2 # borderline\ntt 1 4.5 4\n", "x").unwrap();
        assert_eq!(s.b1, 2);
        assert_eq!(s.dim_codazzi, 2);
        assert!(s.entries.iter().any(|e| e.kind == OperatorKind::CoclosedOneFormHodge && e.multiplicity == 2));
        assert!(s.entries.iter().any(|e| e.kind == OperatorKind::ScalarHodge && e.eigenvalue == 0.0));
    }

    #[test]
    fn parse_errors_name_the_line() {
        match parse_hyperbolic_spectrum("tt 0 3 2\nbogus 1 2 3\n", "x") {
            Err(SpectraError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
