//! Curvature of a Riemannian 4-metric sampled on a periodic grid, and the
//! anti-self-dual Weyl curvature as a trace-free bilinear form on the
//! cross-section: W⁻ = Φ − Ψ + Ω.
//!
//! Derivatives of g are spectral, so for band-limited metrics the curvature
//! at grid points is exact up to rounding. Coordinates are (t, y¹, y², y³).

pub mod fd;
pub mod spectral;

use crate::fields::symbols::eps;
use crate::fields::FieldError;
use rayon::prelude::*;
use serde::Serialize;
use spectral::{derivative, strides};

pub use fd::{fd_battery, fd_linearization_check, FdCase, FdReport};

pub type M4 = [[f64; 4]; 4];
pub type M3 = [[f64; 3]; 3];
pub type Riemann = [[[[f64; 4]; 4]; 4]; 4];
/// Γ^γ_{αβ} indexed [γ][α][β].
pub type Christoffel = [[[f64; 4]; 4]; 4];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurvatureError {
    #[error("metric is not positive definite at grid point {0}")]
    NotPositiveDefinite(usize),
    #[error("expected {expected} metric samples, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("periods must be positive, got {0:?}")]
    BadPeriod([f64; 4]),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The 10 index pairs (μ ≤ ν) of a symmetric 4×4 tensor.
const PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

fn pair(a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    PAIRS.iter().position(|p| *p == (a, b)).unwrap()
}

/// Metric samples g_{μν} on an n[0] × n[1] × n[2] × n[3] periodic grid,
/// t-index slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGrid4D {
    n: [usize; 4],
    periods: [f64; 4],
    g: Vec<M4>,
}

/// Cholesky factor of a symmetric 4×4 matrix, or None if not positive definite.
fn cholesky(g: &M4) -> Option<M4> {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s: f64 = g[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Orthonormal frame F = L^{-T} (columns are frame vectors, F^T g F = I),
/// with e_0 along ∂_t.
fn frame_from_cholesky(l: &M4) -> M4 {
    // Solve L^T F = I by back substitution.
    let mut f = [[0.0; 4]; 4];
    for col in 0..4 {
        for i in (0..4).rev() {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..4).map(|k| l[k][i] * f[k][col]).sum();
            f[i][col] = (rhs - s) / l[i][i];
        }
    }
    f
}

impl MetricGrid4D {
    pub fn new(n: [usize; 4], periods: [f64; 4], g: Vec<M4>) -> Result<Self, CurvatureError> {
        if periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(CurvatureError::BadPeriod(periods));
        }
        let expected: usize = n.iter().product();
        if g.len() != expected {
            return Err(CurvatureError::Shape { expected, got: g.len() });
        }
        if let Some(bad) = g.iter().position(|m| cholesky(m).is_none()) {
            return Err(CurvatureError::NotPositiveDefinite(bad));
        }
        Ok(MetricGrid4D { n, periods, g })
    }

    pub fn from_fn(n: [usize; 4], periods: [f64; 4], f: impl Fn([f64; 4]) -> M4 + Sync) -> Result<Self, CurvatureError> {
        let total: usize = n.iter().product();
        let st = strides(n);
        let g = (0..total)
            .into_par_iter()
            .map(|i| f([0, 1, 2, 3].map(|a| ((i / st[a]) % n[a]) as f64 * periods[a] / n[a] as f64)))
            .collect();
        Self::new(n, periods, g)
    }

    pub fn flat(n: [usize; 4], periods: [f64; 4]) -> Self {
        let id = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];
        Self::new(n, periods, vec![id; n.iter().product()]).expect("identity metric")
    }

    pub fn dims(&self) -> [usize; 4] {
        self.n
    }

    pub fn periods(&self) -> [f64; 4] {
        self.periods
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    pub fn samples(&self) -> &[M4] {
        &self.g
    }

    pub fn coord(&self, idx: usize) -> [f64; 4] {
        let st = strides(self.n);
        [0, 1, 2, 3].map(|a| ((idx / st[a]) % self.n[a]) as f64 * self.periods[a] / self.n[a] as f64)
    }

    /// w·g for positive samples w = e^{2f}.
    pub fn conformal(&self, w: &[f64]) -> Result<Self, CurvatureError> {
        assert_eq!(w.len(), self.len());
        let g = self.g.iter().zip(w).map(|(m, s)| m.map(|r| r.map(|x| x * s))).collect();
        Self::new(self.n, self.periods, g)
    }
}

/// Spectral 1- and 2-jets of the metric components.
struct Jets {
    g: Vec<Vec<f64>>,
    d1: Vec<Vec<f64>>,
    d2: Vec<Vec<f64>>,
}

impl Jets {
    fn new(m: &MetricGrid4D) -> Self {
        let g: Vec<Vec<f64>> = PAIRS.iter().map(|&(a, b)| m.g.iter().map(|x| x[a][b]).collect()).collect();
        let jobs1: Vec<(usize, usize)> = (0..4).flat_map(|a| (0..10).map(move |c| (a, c))).collect();
        let d1: Vec<Vec<f64>> = jobs1.iter().map(|&(a, c)| derivative(&g[c], m.n, m.periods[a], a)).collect();
        let jobs2: Vec<(usize, usize)> = (0..10).flat_map(|p| (0..10).map(move |c| (p, c))).collect();
        let d2: Vec<Vec<f64>> = jobs2
            .iter()
            .map(|&(p, c)| {
                let (a, b) = PAIRS[p];
                derivative(&d1[a * 10 + c], m.n, m.periods[b], b)
            })
            .collect();
        Jets { g, d1, d2 }
    }

    fn g(&self, i: usize) -> M4 {
        let mut m = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] = self.g[pair(a, b)][i];
            }
        }
        m
    }

    /// ∂_a g_{μν}
    fn dg(&self, i: usize) -> [M4; 4] {
        let mut out = [[[0.0; 4]; 4]; 4];
        for (a, o) in out.iter_mut().enumerate() {
            for mu in 0..4 {
                for nu in 0..4 {
                    o[mu][nu] = self.d1[a * 10 + pair(mu, nu)][i];
                }
            }
        }
        out
    }

    /// ∂_a∂_b g_{μν}
    fn ddg(&self, i: usize) -> [[M4; 4]; 4] {
        let mut out = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                let p = pair(a, b);
                for mu in 0..4 {
                    for nu in 0..4 {
                        out[a][b][mu][nu] = self.d2[p * 10 + pair(mu, nu)][i];
                    }
                }
            }
        }
        out
    }
}

/// Curvature data at one point.
#[derive(Debug, Clone, Copy)]
pub struct PointCurvature {
    pub christoffel: Christoffel,
    pub riemann: Riemann,
    pub frame: M4,
}

fn point_curvature(j: &Jets, i: usize) -> Result<PointCurvature, CurvatureError> {
    let g = j.g(i);
    let l = cholesky(&g).ok_or(CurvatureError::NotPositiveDefinite(i))?;
    let f = frame_from_cholesky(&l);
    let mut ginv = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            ginv[a][b] = (0..4).map(|c| f[a][c] * f[b][c]).sum();
        }
    }
    let dg = j.dg(i);
    let dd = j.ddg(i);
    // Γ_{λ,σμ} = ½(g_{λσ,μ} + g_{λμ,σ} − g_{σμ,λ})
    let mut g1 = [[[0.0; 4]; 4]; 4];
    for la in 0..4 {
        for s in 0..4 {
            for m in 0..4 {
                g1[la][s][m] = 0.5 * (dg[m][la][s] + dg[s][la][m] - dg[la][s][m]);
            }
        }
    }
    let mut g2 = [[[0.0; 4]; 4]; 4];
    for la in 0..4 {
        for r in 0..4 {
            for n in 0..4 {
                g2[la][r][n] = (0..4).map(|k| ginv[la][k] * g1[k][r][n]).sum();
            }
        }
    }
    let mut rm = [[[[0.0; 4]; 4]; 4]; 4];
    for r in 0..4 {
        for s in r + 1..4 {
            for m in 0..4 {
                for n in m + 1..4 {
                    let lin = 0.5 * (dd[s][m][r][n] + dd[r][n][s][m] - dd[s][n][r][m] - dd[r][m][s][n]);
                    let quad: f64 = (0..4).map(|la| g1[la][s][m] * g2[la][r][n] - g1[la][s][n] * g2[la][r][m]).sum();
                    let v = lin + quad;
                    rm[r][s][m][n] = v;
                    rm[s][r][m][n] = -v;
                    rm[r][s][n][m] = -v;
                    rm[s][r][n][m] = v;
                }
            }
        }
    }
    Ok(PointCurvature { christoffel: g2, riemann: rm, frame: f })
}

/// Riemann tensor in the orthonormal frame.
pub fn frame_components(r: &Riemann, f: &M4) -> Riemann {
    // R acts on bivectors; transform the 6×6 block by the induced map of f.
    let bi: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut lam = [[0.0; 6]; 6];
    for (p, &(a, b)) in bi.iter().enumerate() {
        for (q, &(i, j)) in bi.iter().enumerate() {
            lam[p][q] = f[a][i] * f[b][j] - f[b][i] * f[a][j];
        }
    }
    let mut tmp = [[0.0; 6]; 6];
    for p in 0..6 {
        for q in 0..6 {
            let (c, d) = bi[q];
            tmp[p][q] = (0..6).map(|k| {
                let (a, b) = bi[k];
                lam[k][p] * r[a][b][c][d]
            }).sum();
        }
    }
    let mut out = [[[[0.0; 4]; 4]; 4]; 4];
    for p in 0..6 {
        let (i, j) = bi[p];
        for q in 0..6 {
            let (k, l) = bi[q];
            let v: f64 = (0..6).map(|m| tmp[p][m] * lam[m][q]).sum();
            out[i][j][k][l] = v;
            out[j][i][k][l] = -v;
            out[i][j][l][k] = -v;
            out[j][i][l][k] = v;
        }
    }
    out
}

fn tf3(m: &M3) -> M3 {
    let t = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let mut o = *m;
    for (i, row) in o.iter_mut().enumerate() {
        row[i] -= t;
    }
    o
}

/// Φ, Ψ, Ω and W⁻ at one point from frame components of Riemann.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylBlocks {
    pub phi: M3,
    pub psi: M3,
    pub omega: M3,
    /// Ω through the Ricci contraction of the spatial block.
    pub omega_shortcut: M3,
    pub wminus: M3,
}

pub fn weyl_blocks(r: &Riemann) -> WeylBlocks {
    let mut phi = [[0.0; 3]; 3];
    let mut psi_raw = [[0.0; 3]; 3];
    let mut omega = [[0.0; 3]; 3];
    let mut ric = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            phi[i][j] = r[0][i + 1][0][j + 1];
            let mut ps = 0.0;
            let mut om = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    let e = eps(i, k, l);
                    if e != 0.0 {
                        ps += e * r[0][j + 1][k + 1][l + 1];
                        for p in 0..3 {
                            for q in 0..3 {
                                let e2 = eps(j, p, q);
                                if e2 != 0.0 {
                                    om += e * e2 * r[k + 1][l + 1][p + 1][q + 1];
                                }
                            }
                        }
                    }
                }
            }
            psi_raw[i][j] = ps;
            omega[i][j] = 0.25 * om;
            ric[i][j] = (0..3).map(|k| r[k + 1][i + 1][k + 1][j + 1]).sum();
        }
    }
    let mut psi = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            psi[i][j] = 0.5 * (psi_raw[i][j] + psi_raw[j][i]);
        }
    }
    let phi = tf3(&phi);
    let psi = tf3(&psi);
    let omega = tf3(&omega);
    let scal = ric[0][0] + ric[1][1] + ric[2][2];
    let mut short = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            short[i][j] = -(ric[i][j] - if i == j { 0.5 * scal } else { 0.0 });
        }
    }
    let omega_shortcut = tf3(&short);
    let mut w = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            w[i][j] = phi[i][j] - psi[i][j] + omega[i][j];
        }
    }
    WeylBlocks { phi, psi, omega, omega_shortcut, wminus: w }
}

/// Christoffel symbols, Riemann tensor and orthonormal frame at every point.
#[derive(Debug, Clone)]
pub struct CurvatureGrid {
    pub n: [usize; 4],
    pub periods: [f64; 4],
    pub points: Vec<PointCurvature>,
}

pub fn christoffel_riemann(m: &MetricGrid4D) -> Result<CurvatureGrid, CurvatureError> {
    let j = Jets::new(m);
    let points = (0..m.len()).into_par_iter().map(|i| point_curvature(&j, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(CurvatureGrid { n: m.n, periods: m.periods, points })
}

/// W⁻ samples with the worst disagreement between the two Ω evaluations.
#[derive(Debug, Clone)]
pub struct WminusField {
    pub values: Vec<M3>,
    pub blocks: Vec<WeylBlocks>,
    pub omega_shortcut_residual: f64,
}

fn collect_wminus(blocks: Vec<WeylBlocks>) -> WminusField {
    let scale = blocks.iter().flat_map(|b| b.omega.iter().flatten()).fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let res = blocks
        .iter()
        .flat_map(|b| (0..9).map(move |k| (b.omega[k / 3][k % 3] - b.omega_shortcut[k / 3][k % 3]).abs()))
        .fold(0.0, f64::max)
        / scale;
    WminusField { values: blocks.iter().map(|b| b.wminus).collect(), blocks, omega_shortcut_residual: res }
}

pub fn wminus_bilinear(c: &CurvatureGrid) -> WminusField {
    collect_wminus(c.points.par_iter().map(|p| weyl_blocks(&frame_components(&p.riemann, &p.frame))).collect())
}

/// W⁻ directly from the metric without storing the curvature grid.
pub fn wminus_field(m: &MetricGrid4D) -> Result<WminusField, CurvatureError> {
    let j = Jets::new(m);
    let blocks = (0..m.len())
        .into_par_iter()
        .map(|i| point_curvature(&j, i).map(|p| weyl_blocks(&frame_components(&p.riemann, &p.frame))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_wminus(blocks))
}

/// Relative residuals of R_{abcd} = −R_{bacd}, R_{abcd} = R_{cdab} and the
/// first Bianchi identity, over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

pub fn symmetry_residuals(c: &CurvatureGrid) -> SymmetryResiduals {
    let scale = c.points.iter().flat_map(|p| p.riemann.iter().flatten().flatten().flatten()).fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut out = SymmetryResiduals { antisymmetry: 0.0, pair_symmetry: 0.0, bianchi: 0.0 };
    for p in &c.points {
        let r = &p.riemann;
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        out.antisymmetry = out.antisymmetry.max((r[a][b][cc][d] + r[b][a][cc][d]).abs() / scale);
                        out.antisymmetry = out.antisymmetry.max((r[a][b][cc][d] + r[a][b][d][cc]).abs() / scale);
                        out.pair_symmetry = out.pair_symmetry.max((r[a][b][cc][d] - r[cc][d][a][b]).abs() / scale);
                        out.bianchi = out.bianchi.max((r[a][b][cc][d] + r[a][cc][d][b] + r[a][d][b][cc]).abs() / scale);
                    }
                }
            }
        }
    }
    out
}
