//! Numerical ground truth for the closed-form roots.
//!
//! Every ODE family is written as a matrix polynomial Σ M_k d^k/dt^k and its
//! characteristic roots are found from a block-companion linearization with
//! a general eigenvalue solver. On the flat torus the full operator is
//! reduced on one Fourier mode (see [`pencil`]).

pub mod eig;
pub mod pencil;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eig::{cluster, eigenvalues, nullity, NoConvergence};
pub use pencil::flat_mode_pencil;

/// Clusters of numerical eigenvalues closer than this (relative) are one
/// root. Defective eigenvalues split by about √ε·‖A‖, far above 1e-9.
pub const CLUSTER_TOL: f64 = 1e-5;
/// Singular values below this (relative) count towards the nullity.
pub const NULLITY_TOL: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("leading coefficient is singular (smallest singular value {0:e})")]
    SingularLeading(f64),
    #[error("coefficient matrices must be square and of equal size")]
    Shape,
    #[error(transparent)]
    NoConvergence(#[from] NoConvergence),
}

/// Σ_k M_k d^k/dt^k acting on C^n-valued functions of t.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    coeffs: Vec<DMatrix<C64>>,
}

impl OdeSystem {
    pub fn new(coeffs: Vec<DMatrix<C64>>) -> Result<Self, OracleError> {
        let n = coeffs.first().map(|m| m.nrows()).ok_or(OracleError::Shape)?;
        if coeffs.len() < 2 || coeffs.iter().any(|m| m.nrows() != n || m.ncols() != n) {
            return Err(OracleError::Shape);
        }
        Ok(OdeSystem { coeffs })
    }

    pub fn from_real(coeffs: Vec<DMatrix<f64>>) -> Result<Self, OracleError> {
        Self::new(coeffs.into_iter().map(|m| m.map(|x| C64::new(x, 0.0))).collect())
    }

    /// Scalar ODE Σ c_k f^{(k)} = 0.
    pub fn scalar(c: &[f64]) -> Result<Self, OracleError> {
        Self::from_real(c.iter().map(|x| DMatrix::from_element(1, 1, *x)).collect())
    }

    /// First-order system ẋ = A x.
    pub fn first_order(a: DMatrix<C64>) -> Result<Self, OracleError> {
        let n = a.nrows();
        Self::new(vec![-a, DMatrix::identity(n, n)])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn coeffs(&self) -> &[DMatrix<C64>] {
        &self.coeffs
    }

    /// P(λ) = Σ M_k λ^k.
    pub fn symbol(&self, lambda: C64) -> DMatrix<C64> {
        let mut p = DMatrix::zeros(self.dim(), self.dim());
        let mut pow = C64::new(1.0, 0.0);
        for m in &self.coeffs {
            p += m * pow;
            pow *= lambda;
        }
        p
    }

    pub fn companion(&self) -> Result<DMatrix<C64>, OracleError> {
        let n = self.dim();
        let r = self.order();
        let lead = &self.coeffs[r];
        let sv = lead.clone().svd(false, false).singular_values;
        let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0f64), |(a, b), s| (a.min(*s), b.max(*s)));
        if !(smin > 1e-12 * smax.max(1.0)) {
            return Err(OracleError::SingularLeading(smin));
        }
        let inv = lead.clone().try_inverse().ok_or(OracleError::SingularLeading(smin))?;
        let mut c = DMatrix::zeros(n * r, n * r);
        for b in 0..r - 1 {
            for i in 0..n {
                c[(b * n + i, (b + 1) * n + i)] = C64::new(1.0, 0.0);
            }
        }
        for k in 0..r {
            let blk = -(&inv * &self.coeffs[k]);
            c.view_mut(((r - 1) * n, k * n), (n, n)).copy_from(&blk);
        }
        Ok(c)
    }
}

/// One numerically found characteristic root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleRoot {
    pub value: C64,
    /// Size of the eigenvalue cluster.
    pub algebraic: usize,
    /// Dimension of the null space of P(λ).
    pub geometric: usize,
}

impl OracleRoot {
    pub fn jordan(&self) -> bool {
        self.algebraic > self.geometric
    }
}

/// Characteristic roots of an ODE system with multiplicities.
pub fn companion_roots(ode: &OdeSystem) -> Result<Vec<OracleRoot>, OracleError> {
    let c = ode.companion()?;
    let raw = eigenvalues(&c)?;
    Ok(cluster(&raw, CLUSTER_TOL)
        .into_iter()
        .map(|(value, algebraic)| {
            let geometric = nullity(&ode.symbol(value), NULLITY_TOL);
            OracleRoot { value, algebraic, geometric }
        })
        .collect())
}

/// Roots expanded to a multiset.
pub fn expand(roots: &[OracleRoot]) -> Vec<C64> {
    roots.iter().flat_map(|r| std::iter::repeat_n(r.value, r.algebraic)).collect()
}

/// The 4×4 matrix of the type-(a) system for (c, ċ, k, k̇).
pub fn matrix_a_entries(mu: f64, kappa: i32) -> DMatrix<f64> {
    let k = kappa as f64;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 1.0, 0.0, 0.0, //
            2.0 * mu / 3.0, 0.0, 0.0, mu / 3.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, -0.5, 1.5 * mu - 4.0 * k, 0.0,
        ],
    )
}

pub fn matrix_a(mu: f64, kappa: i32) -> OdeSystem {
    OdeSystem::first_order(matrix_a_entries(mu, kappa).map(|x| C64::new(x, 0.0))).expect("4x4")
}

/// −½f̈ + sβḟ − (κ + λ/2)f = 0 with s = ±1 the helicity sign, β = √(λ+3κ).
pub fn tensor_ode(lambda: f64, kappa: i32, sign: f64) -> OdeSystem {
    let beta = (lambda + 3.0 * kappa as f64).max(0.0).sqrt();
    OdeSystem::scalar(&[-(kappa as f64 + lambda / 2.0), sign * beta, -0.5]).expect("scalar")
}

/// f̈ − νf = 0.
pub fn oneform_ode(nu: f64) -> OdeSystem {
    OdeSystem::scalar(&[-nu, 0.0, 1.0]).expect("scalar")
}

/// m̈ − νm + 4κm = 0.
pub fn mixed_b_ode(nu: f64, kappa: i32) -> OdeSystem {
    OdeSystem::scalar(&[4.0 * kappa as f64 - nu, 0.0, 1.0]).expect("scalar")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSetComparison {
    pub expected: Vec<C64>,
    pub actual: Vec<C64>,
    pub max_mismatch: f64,
    pub matched: bool,
}

/// Matches `expected` against `actual` within `tol`.
///
/// Candidate pairs are tried nearest-first and completed by augmenting
/// paths, so a perfect matching is found whenever one exists. Unmatched
/// actual roots are tolerated only if their modulus is at least
/// `truncation`.
pub fn compare_root_sets(expected: &[C64], actual: &[C64], tol: f64, truncation: Option<f64>) -> RootSetComparison {
    let ne = expected.len();
    let adj: Vec<Vec<usize>> = expected
        .iter()
        .map(|e| {
            let mut c: Vec<usize> = (0..actual.len()).filter(|&a| (actual[a] - e).norm() < tol).collect();
            c.sort_by(|&a, &b| (actual[a] - e).norm().total_cmp(&(actual[b] - e).norm()));
            c
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; actual.len()];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &a in &adj[u] {
            if seen[a] {
                continue;
            }
            seen[a] = true;
            if owner[a].is_none() || augment(owner[a].unwrap(), adj, seen, owner) {
                owner[a] = Some(u);
                return true;
            }
        }
        false
    }
    let mut all = true;
    for u in 0..ne {
        let mut seen = vec![false; actual.len()];
        if !augment(u, &adj, &mut seen, &mut owner) {
            all = false;
        }
    }
    let mut max_mismatch: f64 = 0.0;
    let mut spurious = false;
    for (a, o) in owner.iter().enumerate() {
        match o {
            Some(u) => max_mismatch = max_mismatch.max((actual[a] - expected[*u]).norm()),
            None => {
                if truncation.is_none_or(|t| actual[a].norm() < t) {
                    spurious = true;
                }
            }
        }
    }
    if !all {
        max_mismatch = f64::INFINITY;
    }
    RootSetComparison {
        expected: expected.to_vec(),
        actual: actual.to_vec(),
        max_mismatch,
        matched: all && !spurious,
    }
}

/// Expands closed-form roots to a multiset by algebraic order.
pub fn expand_char(roots: &[crate::indicial::CharRoot]) -> Vec<C64> {
    roots.iter().flat_map(|r| std::iter::repeat_n(r.value, r.order)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: String, cmp: &RootSetComparison, tol: f64) -> OracleCheck {
    OracleCheck { name, max_mismatch: cmp.max_mismatch, tolerance: tol, pass: cmp.matched }
}

/// Closed forms against companion roots: matrix A over the μ grid, the
/// tensor ODE for both helicities, and the two 1-form ODEs, for every κ.
pub fn ode_suite(mu_max: usize, j_max: usize) -> Vec<OracleCheck> {
    use crate::indicial::{mixed_a_roots, mixed_b_roots, type2_roots, type3_roots};
    use rayon::prelude::*;
    const TOL: f64 = 1e-9;
    let mut jobs: Vec<(i32, usize)> = Vec::new();
    for kappa in [-1, 0, 1] {
        for mu in 0..=mu_max {
            jobs.push((kappa, mu));
        }
    }
    let mut out: Vec<OracleCheck> = jobs
        .par_iter()
        .map(|&(kappa, mu)| {
            let mu = mu as f64;
            let want = expand_char(&mixed_a_roots(mu, kappa).unwrap());
            let got = companion_roots(&matrix_a(mu, kappa)).map(|r| expand(&r)).unwrap_or_default();
            check(format!("matrix A mu={mu} kappa={kappa}"), &compare_root_sets(&want, &got, TOL, None), TOL)
        })
        .collect();
    for kappa in [-1, 0, 1] {
        for j in 0..=j_max {
            // Admissible tensor eigenvalues, starting at the bound.
            let lambda = crate::spectra::tt_lower_bound(kappa) + (j * j) as f64 + if kappa == 1 { 2.0 * j as f64 } else { 0.0 };
            let want = expand_char(&type3_roots(lambda, kappa).unwrap());
            let mut got = Vec::new();
            // At β = 0 the two helicity equations coincide.
            let signs: &[f64] = if lambda + 3.0 * kappa as f64 == 0.0 { &[1.0] } else { &[1.0, -1.0] };
            for &s in signs {
                got.extend(expand(&companion_roots(&tensor_ode(lambda, kappa, s)).unwrap()));
            }
            let cmp = compare_root_sets(&want, &got, TOL, None);
            out.push(check(format!("tensor ode lambda={lambda} kappa={kappa}"), &cmp, TOL));

            let nu = (j * j) as f64;
            let want = expand_char(&mixed_b_roots(nu, kappa).unwrap());
            let got = expand(&companion_roots(&mixed_b_ode(nu, kappa)).unwrap());
            out.push(check(format!("mixed-b ode nu={nu} kappa={kappa}"), &compare_root_sets(&want, &got, TOL, None), TOL));

            if nu > 0.0 {
                let want = expand_char(&type2_roots(nu, kappa).unwrap());
                let got = expand(&companion_roots(&oneform_ode(nu)).unwrap());
                out.push(check(format!("one-form ode nu={nu} kappa={kappa}"), &compare_root_sets(&want, &got, TOL, None), TOL));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn scalar_examples() {
        let r = expand(&companion_roots(&OdeSystem::scalar(&[-9.0, 0.0, 1.0]).unwrap()).unwrap());
        assert!(compare_root_sets(&[c(3.0, 0.0), c(-3.0, 0.0)], &r, 1e-12, None).matched);
        // −½f̈ + 3ḟ − 4f = 0
        let r = expand(&companion_roots(&OdeSystem::scalar(&[-4.0, 3.0, -0.5]).unwrap()).unwrap());
        assert!(compare_root_sets(&[c(2.0, 0.0), c(4.0, 0.0)], &r, 1e-12, None).matched);
    }

    #[test]
    fn matrix_a_examples() {
        let r = companion_roots(&matrix_a(0.0, 1)).unwrap();
        let e = expand(&r);
        assert!(compare_root_sets(&[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0), c(0.0, -2.0)], &e, 1e-9, None).matched);
        let e = expand(&companion_roots(&matrix_a(3.0, 1)).unwrap());
        assert!(compare_root_sets(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)], &e, 1e-9, None).matched);
        let e = expand(&companion_roots(&matrix_a(8.0, 1)).unwrap());
        let w = expand_char(&crate::indicial::mixed_a_roots(8.0, 1).unwrap());
        assert!(compare_root_sets(&w, &e, 1e-9, None).matched);
    }

    #[test]
    fn singular_leading_block_rejected() {
        let ode = OdeSystem::scalar(&[1.0, 0.0]).unwrap();
        assert!(matches!(companion_roots(&ode), Err(OracleError::SingularLeading(_))));
    }

    #[test]
    fn comparison_examples() {
        assert!(compare_root_sets(&[c(2.0, 0.0), c(4.0, 0.0)], &[c(2.0 + 1e-12, 0.0), c(4.0 - 1e-12, 0.0)], 1e-9, None).matched);
        assert!(!compare_root_sets(&[c(2.0, 0.0)], &[c(2.0, 0.0), c(3.0, 0.0)], 1e-9, None).matched);
        assert!(compare_root_sets(&[c(2.0, 0.0)], &[c(2.0, 0.0), c(30.0, 0.0)], 1e-9, Some(10.0)).matched);
        let s5 = 5f64.sqrt();
        let mb = expand_char(&crate::indicial::mixed_b_roots(9.0, 1).unwrap());
        assert!(compare_root_sets(&[c(s5, 0.0), c(-s5, 0.0)], &mb, 1e-9, None).matched);
    }

    #[test]
    fn matching_finds_perfect_assignment() {
        // Nearest-first alone would give 0.45 to 0.8 and strand 0.
        let e = [c(0.8, 0.0), c(0.0, 0.0)];
        let a = [c(0.45, 0.0), c(1.2, 0.0)];
        assert!(compare_root_sets(&e, &a, 0.5, None).matched);
        let a = [c(0.45, 0.0), c(1.5, 0.0)];
        assert!(!compare_root_sets(&e, &a, 0.5, None).matched);
    }

    #[test]
    fn mixed_a_jordan_only_when_flat() {
        let r = companion_roots(&matrix_a(5.0, 0)).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.algebraic == 2 && x.jordan()));
        let r = companion_roots(&matrix_a(8.0, 1)).unwrap();
        assert!(r.iter().all(|x| !x.jordan()));
    }

    #[test]
    fn suite_passes() {
        let checks = ode_suite(48, 10);
        let bad: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(bad.is_empty(), "{bad:?}");
    }
}
