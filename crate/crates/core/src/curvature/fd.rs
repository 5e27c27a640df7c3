//! Central finite differences of W⁻ along g̃ + εh̃ on the flat cylinder,
//! compared with the linearized operator D from the fields module.

use super::{wminus_field, CurvatureError, MetricGrid4D, M3, M4};
use crate::fields::cyl::{linearized_weyl, real_tensor, CylField, CylTensor, ExpTerm, Linear};
use crate::fields::{Fourier, FieldError, FourierSymTensor, ModeGrid};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative error bound at ε = 1e-4 and the minimal error ratio when ε halves.
pub const FD_TOL: f64 = 1e-6;
pub const FD_MIN_RATIO: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdReport {
    pub eps: f64,
    pub rel_error: f64,
    pub abs_error: f64,
    pub reference_norm: f64,
}

fn check_periodic<T: Linear>(f: &CylField<T>) -> Result<(), FieldError> {
    for t in &f.terms {
        let n = t.rate.im.round();
        if t.rate.re != 0.0 || (t.rate.im - n).abs() > 1e-12 || t.coeffs.iter().skip(1).any(|c| c.norm() != 0.0) {
            return Err(FieldError::NotPeriodic(t.rate));
        }
    }
    Ok(())
}

/// Samples of a t-periodic field on nt × n³ points (t period 2π), t slowest.
fn sample_terms<T: Linear, V: Copy + Default>(
    f: &CylField<T>,
    nt: usize,
    n: usize,
    spatial: impl Fn(&T, usize) -> Vec<V>,
    acc: impl Fn(&mut V, C64, &V),
) -> Result<Vec<V>, FieldError> {
    check_periodic(f)?;
    let n3 = n * n * n;
    let mut out = vec![V::default(); nt * n3];
    for term in &f.terms {
        let s = spatial(&term.coeffs[0], n);
        for p in 0..nt {
            let ph = (term.rate * (2.0 * PI * p as f64 / nt as f64)).exp();
            for q in 0..n3 {
                acc(&mut out[p * n3 + q], ph, &s[q]);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
struct C4([[C64; 4]; 4]);
#[derive(Debug, Clone, Copy, Default)]
struct C3([[C64; 3]; 3]);

/// Real samples of h̃ as a 4×4 symmetric matrix (g_{0i} = α_i).
pub fn sample_tensor(f: &CylField<CylTensor>, nt: usize, n: usize) -> Result<Vec<M4>, FieldError> {
    let raw = sample_terms(
        f,
        nt,
        n,
        |c: &CylTensor, n| {
            let h00 = c.h00.sample(n);
            let al = c.alpha.sample(n);
            let h = c.h.sample(n);
            (0..h00.len())
                .map(|q| {
                    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
                    m[0][0] = h00[q];
                    for i in 0..3 {
                        m[0][i + 1] = al[q][i];
                        m[i + 1][0] = al[q][i];
                        for j in 0..3 {
                            m[i + 1][j + 1] = h[q].get(i, j);
                        }
                    }
                    C4(m)
                })
                .collect()
        },
        |o: &mut C4, ph, v| {
            for a in 0..4 {
                for b in 0..4 {
                    o.0[a][b] += ph * v.0[a][b];
                }
            }
        },
    )?;
    Ok(raw.into_iter().map(|m| m.0.map(|r| r.map(|z| z.re))).collect())
}

pub fn sample_sym(f: &CylField<FourierSymTensor>, nt: usize, n: usize) -> Result<Vec<M3>, FieldError> {
    let raw = sample_terms(
        f,
        nt,
        n,
        |c: &FourierSymTensor, n| c.sample(n).into_iter().map(|s| C3(s.full())).collect(),
        |o: &mut C3, ph, v| {
            for a in 0..3 {
                for b in 0..3 {
                    o.0[a][b] += ph * v.0[a][b];
                }
            }
        },
    )?;
    Ok(raw.into_iter().map(|m| m.0.map(|r| r.map(|z| z.re))).collect())
}

fn perturbed(h: &[M4], s: f64, nt: usize, n: usize, lattice: [f64; 3]) -> Result<MetricGrid4D, CurvatureError> {
    let g = h
        .iter()
        .map(|m| {
            let mut g = *m;
            for (a, row) in g.iter_mut().enumerate() {
                for (b, x) in row.iter_mut().enumerate() {
                    *x = if a == b { 1.0 } else { 0.0 } + s * *x;
                }
            }
            g
        })
        .collect();
    MetricGrid4D::new([nt, n, n, n], [2.0 * PI, lattice[0], lattice[1], lattice[2]], g)
}

fn l2(v: &[M3]) -> f64 {
    v.iter().flatten().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative L² error of [W⁻(g̃+εh̃) − W⁻(g̃−εh̃)]/(2ε) against D(h̃) over an
/// n⁴ grid. If D(h̃) vanishes the absolute error is reported as the relative one.
pub fn fd_linearization_check(h: &CylField<CylTensor>, eps: f64, n: usize) -> Result<FdReport, CurvatureError> {
    let lattice = h.terms.first().map(|t| t.coeffs[0].h00.grid.lattice).unwrap_or([2.0 * PI; 3]);
    let hs = sample_tensor(h, n, n)?;
    let d = sample_sym(&linearized_weyl(h), n, n)?;
    let wp = wminus_field(&perturbed(&hs, eps, n, n, lattice)?)?;
    let wm = wminus_field(&perturbed(&hs, -eps, n, n, lattice)?)?;
    let diff: Vec<M3> = wp
        .values
        .iter()
        .zip(&wm.values)
        .zip(&d)
        .map(|((a, b), dd)| {
            let mut o = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    o[i][j] = (a[i][j] - b[i][j]) / (2.0 * eps) - dd[i][j];
                }
            }
            o
        })
        .collect();
    let abs = l2(&diff);
    let refn = l2(&d);
    let rel = if refn > 1e-12 * (d.len() as f64).sqrt() { abs / refn } else { abs };
    Ok(FdReport { eps, rel_error: rel, abs_error: abs, reference_norm: refn })
}

/// Which parts of h̃ a battery case varies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parts {
    pub h00: bool,
    pub alpha: bool,
    pub h: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FdCase {
    pub name: String,
    pub parts: Parts,
    pub report: FdReport,
    pub report_half: FdReport,
    pub ratio: f64,
    pub pass: bool,
}

/// Random real t-periodic h̃ on the 2π-torus with time frequencies |n| ≤ 1
/// and spatial modes |ξ|∞ ≤ 1, scaled to unit coefficient norm.
pub fn random_variation(parts: Parts, rng: &mut ChaCha8Rng) -> CylField<CylTensor> {
    let g = ModeGrid::new([2.0 * PI; 3], 1);
    let mut terms = Vec::new();
    for n in [0.0, 1.0] {
        let mut c = CylTensor::zeros(g);
        if parts.h00 {
            c.h00 = Fourier::random_complex(g, 1, rng);
        }
        if parts.alpha {
            c.alpha = Fourier::random_complex(g, 1, rng);
        }
        if parts.h {
            c.h = Fourier::random_complex(g, 1, rng);
        }
        terms.push(ExpTerm { rate: C64::new(0.0, n), coeffs: vec![c] });
    }
    let f = real_tensor(&CylField::new(terms));
    let s = f.coeff_norm();
    f.scale(C64::new(1.0 / s, 0.0))
}

pub const BATTERY: [(&str, Parts); 10] = [
    ("h00", Parts { h00: true, alpha: false, h: false }),
    ("alpha", Parts { h00: false, alpha: true, h: false }),
    ("h", Parts { h00: false, alpha: false, h: true }),
    ("h00+alpha", Parts { h00: true, alpha: true, h: false }),
    ("alpha+h", Parts { h00: false, alpha: true, h: true }),
    ("h00+h", Parts { h00: true, alpha: false, h: true }),
    ("all-1", Parts { h00: true, alpha: true, h: true }),
    ("all-2", Parts { h00: true, alpha: true, h: true }),
    ("all-3", Parts { h00: true, alpha: true, h: true }),
    ("all-4", Parts { h00: true, alpha: true, h: true }),
];

/// Ten fixed-seed variations, each checked at ε and ε/2.
pub fn fd_battery(seed: u64, n: usize, eps: f64) -> Result<Vec<FdCase>, CurvatureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (name, parts) in BATTERY {
        let h = random_variation(parts, &mut rng);
        let report = fd_linearization_check(&h, eps, n)?;
        let report_half = fd_linearization_check(&h, eps / 2.0, n)?;
        let ratio = report.rel_error / report_half.rel_error;
        let pass = report.rel_error <= FD_TOL && ratio >= FD_MIN_RATIO;
        out.push(FdCase { name: name.to_string(), parts, report, report_half, ratio, pass });
    }
    Ok(out)
}
