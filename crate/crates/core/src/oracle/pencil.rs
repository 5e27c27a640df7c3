//! The full flat-cylinder system F(h̃) = (Dh̃, 2 div h̃) = 0 for trace-free h̃,
//! restricted to one Fourier mode of T³ and written as a first-order system.
//!
//! With h00 = −tr h the unknowns are tf h (5), tr h (1), α (3), and tf ḣ (5).
//! The divergence gives d(tr h)/dt = δα and α̇ = −δh; D fixes tf ḧ.

use super::{companion_roots, OdeSystem, OracleCheck, OracleRoot};
use crate::fields::symbols::{self, TensorJet, M3};
use crate::indicial::entry_roots;
use crate::spectra::{OperatorKind, SpectrumEntry};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

pub const PENCIL_DIM: usize = 14;
/// Tolerance on root positions for the per-mode comparison.
pub const PENCIL_TOL: f64 = 1e-8;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Orthonormal basis of trace-free symmetric 3×3 matrices.
fn tf_basis() -> [M3; 5] {
    let mut b = [symbols::zero33(); 5];
    let s2 = 1.0 / 2f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    b[0][0][0] = c(s2);
    b[0][1][1] = c(-s2);
    b[1][0][0] = c(s6);
    b[1][1][1] = c(s6);
    b[1][2][2] = c(-2.0 * s6);
    for (n, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        b[2 + n][i][j] = c(s2);
        b[2 + n][j][i] = c(s2);
    }
    b
}

fn tf_coords(m: &M3, basis: &[M3; 5]) -> [C64; 5] {
    basis.map(|e| {
        let mut s = c(0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += e[i][j] * m[i][j];
            }
        }
        s
    })
}

fn tf_from(coords: &[C64], basis: &[M3; 5]) -> M3 {
    let mut m = symbols::zero33();
    for (a, e) in coords.iter().zip(basis) {
        m = symbols::add33(&m, &symbols::scale33(*a, e));
    }
    m
}

/// Generator A of ẋ = A x on the 14-dimensional mode state for wave vector k.
pub fn flat_mode_generator(k: [f64; 3]) -> DMatrix<C64> {
    let basis = tf_basis();
    let mut a = DMatrix::zeros(PENCIL_DIM, PENCIL_DIM);
    for col in 0..PENCIL_DIM {
        let mut x = [c(0.0); PENCIL_DIM];
        x[col] = c(1.0);
        let tfh = tf_from(&x[0..5], &basis);
        let trh = x[5];
        let alpha = [x[6], x[7], x[8]];
        let tfh_t = tf_from(&x[9..14], &basis);

        let h = symbols::add33(&tfh, &symbols::ident(trh / 3.0));
        let trh_t = symbols::div(k, &alpha);
        let alpha_t = symbols::scale3(c(-1.0), symbols::div_sym(k, &h));
        let h_t = symbols::add33(&tfh_t, &symbols::ident(trh_t / 3.0));
        let jet = TensorJet { h00: -trh, alpha, alpha_t, h, h_t, h_tt: symbols::zero33() };
        // D = −½ tf ḧ + R, so tf ḧ = 2R.
        let r = symbols::linearized_weyl(k, &jet);
        let tfh_tt = tf_coords(&symbols::scale33(c(2.0), &r), &basis);

        let mut dx = [c(0.0); PENCIL_DIM];
        dx[0..5].copy_from_slice(&x[9..14]);
        dx[5] = trh_t;
        dx[6..9].copy_from_slice(&alpha_t);
        dx[9..14].copy_from_slice(&tfh_tt);
        for (row, v) in dx.iter().enumerate() {
            a[(row, col)] = *v;
        }
    }
    a
}

/// Mode coefficients (h00, α, h) of a state vector.
pub fn state_tensor(x: &[C64]) -> (C64, [C64; 3], M3) {
    let basis = tf_basis();
    let h = symbols::add33(&tf_from(&x[0..5], &basis), &symbols::ident(x[5] / 3.0));
    (-x[5], [x[6], x[7], x[8]], h)
}

/// The mode pencil as an ODE system for ξ on the rectangular torus with sides `lattice`.
pub fn flat_mode_pencil(xi: [i64; 3], lattice: [f64; 3]) -> OdeSystem {
    let k = [0, 1, 2].map(|i| 2.0 * PI * xi[i] as f64 / lattice[i]);
    OdeSystem::first_order(flat_mode_generator(k)).expect("square generator")
}

/// Spectral entries carried by one Fourier mode: the scalar, two co-closed
/// 1-form directions and two TT directions (at ξ = 0: 1, 3 and 5).
pub fn mode_entries(xi: [i64; 3], lattice: [f64; 3]) -> Vec<SpectrumEntry> {
    let k2: f64 = (0..3).map(|i| (2.0 * PI * xi[i] as f64 / lattice[i]).powi(2)).sum();
    let zero = xi == [0, 0, 0];
    let e = |kind, multiplicity| SpectrumEntry { kind, j: 0, eigenvalue: k2, multiplicity };
    vec![
        e(OperatorKind::ScalarHodge, 1),
        e(OperatorKind::CoclosedOneFormHodge, if zero { 3 } else { 2 }),
        e(OperatorKind::DivFreeTTRough, if zero { 5 } else { 2 }),
    ]
}

/// Catalog prediction for one mode: (root, algebraic, geometric), merged by value.
pub fn predicted_mode_roots(xi: [i64; 3], lattice: [f64; 3]) -> Vec<OracleRoot> {
    let mut out: Vec<OracleRoot> = Vec::new();
    for e in mode_entries(xi, lattice) {
        for r in entry_roots(0, &e).expect("flat entries are admissible") {
            let geo = if r.jordan { r.multiplicity / 2 } else { r.multiplicity };
            match out.iter_mut().find(|o| (o.value - r.value).norm() < PENCIL_TOL) {
                Some(o) => {
                    o.algebraic += r.multiplicity;
                    o.geometric += geo;
                }
                None => out.push(OracleRoot { value: r.value, algebraic: r.multiplicity, geometric: geo }),
            }
        }
    }
    out.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    out
}

/// Compares pencil roots, with algebraic and geometric multiplicities, to the
/// catalog on one mode.
pub fn check_mode(xi: [i64; 3], lattice: [f64; 3]) -> OracleCheck {
    let want = predicted_mode_roots(xi, lattice);
    let name = format!("flat pencil xi={xi:?}");
    let got = match companion_roots(&flat_mode_pencil(xi, lattice)) {
        Ok(g) => g,
        Err(_) => return OracleCheck { name, max_mismatch: f64::INFINITY, tolerance: PENCIL_TOL, pass: false },
    };
    let mut worst = 0.0f64;
    let mut pass = got.len() == want.len();
    for w in &want {
        match got.iter().min_by(|a, b| (a.value - w.value).norm().total_cmp(&(b.value - w.value).norm())) {
            Some(g) => {
                let d = (g.value - w.value).norm() / w.value.norm().max(1.0);
                worst = worst.max(d);
                pass &= d < PENCIL_TOL && g.algebraic == w.algebraic && g.geometric == w.geometric;
            }
            None => pass = false,
        }
    }
    OracleCheck { name, max_mismatch: worst, tolerance: PENCIL_TOL, pass }
}

/// All modes with |ξ|∞ ≤ radius, up to the ξ ↦ −ξ symmetry.
pub fn pencil_suite(lattice: [f64; 3], radius: i64) -> Vec<OracleCheck> {
    let mut modes = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            for cc in -radius..=radius {
                if [a, b, cc] >= [0, 0, 0] {
                    modes.push([a, b, cc]);
                }
            }
        }
    }
    modes.par_iter().map(|&xi| check_mode(xi, lattice)).collect()
}
