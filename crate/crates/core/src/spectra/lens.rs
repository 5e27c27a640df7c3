//! Γ-invariant harmonic polynomials on R⁴.
//!
//! A degree-j harmonic polynomial is determined by its reduction modulo
//! |x|², which has x4-degree at most 1. The harmonic projections of the
//! (j+1)² monomials with x4-exponent ≤ 1 therefore form a basis, and
//! coordinates in that basis are read off after reduction.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::SphereQuotient;

type Exp = [u32; 4];

trait Coeff: Clone + Zero + One + std::ops::Mul<Output = Self> + std::ops::Div<Output = Self> + std::ops::Neg<Output = Self> {
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for Ratio<i128> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap()
    }
}

type Poly<T> = HashMap<Exp, T>;

fn add_term<T: Coeff>(p: &mut Poly<T>, e: Exp, c: T) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(e).or_insert_with(T::zero);
    *slot = slot.clone() + c;
    if slot.is_zero() {
        p.remove(&e);
    }
}

fn laplacian<T: Coeff>(p: &Poly<T>) -> Poly<T> {
    let mut out = Poly::new();
    for (e, c) in p {
        for i in 0..4 {
            if e[i] >= 2 {
                let mut f = *e;
                f[i] -= 2;
                add_term(&mut out, f, c.clone() * T::from_i64((e[i] * (e[i] - 1)) as i64));
            }
        }
    }
    out
}

fn times_r2<T: Coeff>(p: &Poly<T>) -> Poly<T> {
    let mut out = Poly::new();
    for (e, c) in p {
        for i in 0..4 {
            let mut f = *e;
            f[i] += 2;
            add_term(&mut out, f, c.clone());
        }
    }
    out
}

/// Projection of a degree-j homogeneous polynomial onto its harmonic part:
/// Σ_k (−1)^k |x|^{2k} Δ^k f / (4^k k! Π_{i≤k} (j+1−i)).
fn harmonic_projection<T: Coeff>(f: &Poly<T>, j: u32) -> Poly<T> {
    let mut out = f.clone();
    let mut lap = f.clone();
    let mut denom: i64 = 1;
    for k in 1..=(j / 2) {
        lap = laplacian(&lap);
        if lap.is_empty() {
            break;
        }
        denom *= 4 * k as i64 * (j as i64 + 1 - k as i64);
        let mut term = lap.clone();
        for _ in 0..k {
            term = times_r2(&term);
        }
        let sign = if k % 2 == 1 { -T::one() } else { T::one() };
        let scale = sign / T::from_i64(denom);
        for (e, c) in term {
            add_term(&mut out, e, c * scale.clone());
        }
    }
    out
}

pub(crate) fn monomials(j: u32) -> Vec<Exp> {
    let mut out = Vec::new();
    for a in 0..=j {
        for b in 0..=(j - a) {
            for c in 0..=(j - a - b) {
                out.push([a, b, c, j - a - b - c]);
            }
        }
    }
    out
}

fn basis_monomials(j: u32) -> Vec<Exp> {
    monomials(j).into_iter().filter(|e| e[3] <= 1).collect()
}

fn project_all<T: Coeff>(j: u32) -> Vec<HashMap<Exp, f64>> {
    basis_monomials(j)
        .into_iter()
        .map(|e| {
            let mut m = Poly::<T>::new();
            m.insert(e, T::one());
            harmonic_projection(&m, j)
                .into_iter()
                .map(|(e, c)| (e, c.to_f64()))
                .collect()
        })
        .collect()
}

/// Basis of degree-j harmonic polynomials on R⁴ as (monomial list,
/// coefficient vectors over that list). Exact rational projection is used
/// for j ≤ 10.
pub fn harmonic_basis(j: u32) -> (Vec<Exp>, Vec<Vec<f64>>) {
    let mons = monomials(j);
    let index: HashMap<Exp, usize> = mons.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let sparse = if j <= 10 { project_all::<Ratio<i128>>(j) } else { project_all::<f64>(j) };
    let dense = sparse
        .into_iter()
        .map(|p| {
            let mut v = vec![0.0; mons.len()];
            for (e, c) in p {
                v[index[&e]] = c;
            }
            v
        })
        .collect();
    (mons, dense)
}

/// Coefficients of (c u − s v)^a (s u + c v)^b by powers of u.
fn plane_factor(a: u32, b: u32, c: f64, s: f64) -> Vec<f64> {
    let mut poly = vec![1.0];
    let mul = |poly: &Vec<f64>, lo: f64, hi: f64| {
        // multiply by (lo·v + hi·u), index = power of u
        let mut out = vec![0.0; poly.len() + 1];
        for (i, p) in poly.iter().enumerate() {
            out[i] += p * lo;
            out[i + 1] += p * hi;
        }
        out
    };
    for _ in 0..a {
        poly = mul(&poly, -s, c);
    }
    for _ in 0..b {
        poly = mul(&poly, c, s);
    }
    poly
}

fn act(mons: &[Exp], p: &[f64], angles: (f64, f64)) -> HashMap<Exp, f64> {
    let (c1, s1) = (angles.0.cos(), angles.0.sin());
    let (c2, s2) = (angles.1.cos(), angles.1.sin());
    let mut out: HashMap<Exp, f64> = HashMap::new();
    for (e, &v) in mons.iter().zip(p) {
        if v == 0.0 {
            continue;
        }
        let f1 = plane_factor(e[0], e[1], c1, s1);
        let f2 = plane_factor(e[2], e[3], c2, s2);
        let n1 = e[0] + e[1];
        let n2 = e[2] + e[3];
        for (u1, w1) in f1.iter().enumerate() {
            if *w1 == 0.0 {
                continue;
            }
            for (u2, w2) in f2.iter().enumerate() {
                let key = [u1 as u32, n1 - u1 as u32, u2 as u32, n2 - u2 as u32];
                *out.entry(key).or_insert(0.0) += v * w1 * w2;
            }
        }
    }
    out
}

/// Coordinates of a harmonic polynomial in the projected-monomial basis:
/// rewrite x4² = −(x1² + x2² + x3²) until the x4-degree is at most 1.
fn reduce(mut p: HashMap<Exp, f64>, j: u32, basis: &[Exp]) -> Vec<f64> {
    for d in (2..=j).rev() {
        let keys: Vec<Exp> = p.keys().filter(|e| e[3] == d).cloned().collect();
        for e in keys {
            let v = p.remove(&e).unwrap();
            for i in 0..3 {
                let mut f = e;
                f[3] -= 2;
                f[i] += 2;
                *p.entry(f).or_insert(0.0) -= v;
            }
        }
    }
    basis.iter().map(|e| p.get(e).copied().unwrap_or(0.0)).collect()
}

/// Matrix of the group-averaging projector on degree-j harmonics.
pub fn lens_projector(q: &SphereQuotient, j: u32) -> DMatrix<f64> {
    let basis = basis_monomials(j);
    let d = basis.len();
    let g = match q {
        SphereQuotient::Trivial => return DMatrix::identity(d, d),
        SphereQuotient::Lens(g) => *g,
    };
    let (mons, polys) = harmonic_basis(j);
    let p = g.p();
    let sum = (0..p)
        .into_par_iter()
        .map(|k| {
            let angles = g.angles(k);
            let mut m = DMatrix::<f64>::zeros(d, d);
            for (col, poly) in polys.iter().enumerate() {
                let coords = reduce(act(&mons, poly, angles), j, &basis);
                for (row, v) in coords.into_iter().enumerate() {
                    m[(row, col)] = v;
                }
            }
            m
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(DMatrix::<f64>::zeros(d, d), |a, b| a + b);
    sum / p as f64
}

/// Dimension of the Γ-invariant degree-j harmonic polynomials, i.e. the
/// multiplicity of μ_j = j(j+2) on S³/Γ.
pub fn lens_scalar_multiplicity(q: &SphereQuotient, j: u32) -> usize {
    let proj = lens_projector(q, j);
    let tr = proj.trace();
    let n = tr.round();
    debug_assert!((tr - n).abs() < 1e-9, "non-integral projector trace {tr}");
    n.max(0.0) as usize
}
