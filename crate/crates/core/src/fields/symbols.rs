//! Operator symbols on a single Fourier mode e^{i⟨k, y⟩}, where ∂_j acts as
//! multiplication by i k_j. All spatial operators of the flat cross-section
//! are assembled from these.

use num_complex::Complex64 as C64;

pub type V3 = [C64; 3];
pub type M3 = [[C64; 3]; 3];

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Levi-Civita symbol with ε₁₂₃ = +1.
pub fn eps(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn zero3() -> V3 {
    [ZERO; 3]
}

pub fn zero33() -> M3 {
    [[ZERO; 3]; 3]
}

pub fn ident(u: C64) -> M3 {
    let mut m = zero33();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = u;
    }
    m
}

pub fn add3(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn scale3(s: C64, a: V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}

pub fn add33(a: &M3, b: &M3) -> M3 {
    let mut m = *a;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] += b[i][j];
        }
    }
    m
}

pub fn scale33(s: C64, a: &M3) -> M3 {
    let mut m = *a;
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    m
}

pub fn trace(h: &M3) -> C64 {
    h[0][0] + h[1][1] + h[2][2]
}

pub fn tf(h: &M3) -> M3 {
    add33(h, &ident(-trace(h) / 3.0))
}

pub fn sym(a: &M3) -> M3 {
    let mut m = zero33();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (a[i][j] + a[j][i]) * 0.5;
        }
    }
    m
}

pub fn ik(k: [f64; 3]) -> V3 {
    [I * k[0], I * k[1], I * k[2]]
}

pub fn grad(k: [f64; 3], u: C64) -> V3 {
    scale3(u, ik(k))
}

/// δω = ∇^i ω_i.
pub fn div(k: [f64; 3], w: &V3) -> C64 {
    let d = ik(k);
    d[0] * w[0] + d[1] * w[1] + d[2] * w[2]
}

pub fn lap_factor(k: [f64; 3]) -> f64 {
    -(k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
}

/// (*dω)_i = ε_ijk ∂_j ω_k.
pub fn curl(k: [f64; 3], w: &V3) -> V3 {
    let d = ik(k);
    let mut out = zero3();
    for (i, o) in out.iter_mut().enumerate() {
        for j in 0..3 {
            for l in 0..3 {
                let e = eps(i, j, l);
                if e != 0.0 {
                    *o += d[j] * w[l] * e;
                }
            }
        }
    }
    out
}

pub fn hess(k: [f64; 3], u: C64) -> M3 {
    let d = ik(k);
    let mut m = zero33();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = d[i] * d[j] * u;
        }
    }
    m
}

/// ∇̊²u = ∇²u − ⅓(Δu)g.
pub fn hess0(k: [f64; 3], u: C64) -> M3 {
    tf(&hess(k, u))
}

/// L(ω)_ij = ∇_i ω_j + ∇_j ω_i.
pub fn lie(k: [f64; 3], w: &V3) -> M3 {
    let d = ik(k);
    let mut m = zero33();
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = d[i] * w[j] + d[j] * w[i];
        }
    }
    m
}

/// K(ω) = L(ω) − ⅔(δω)g.
pub fn conf_killing(k: [f64; 3], w: &V3) -> M3 {
    add33(&lie(k, w), &ident(div(k, w) * (-2.0 / 3.0)))
}

/// (δh)_j = ∇^i h_ij.
pub fn div_sym(k: [f64; 3], h: &M3) -> V3 {
    let d = ik(k);
    let mut out = zero3();
    for (j, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            *o += d[i] * h[i][j];
        }
    }
    out
}

/// (ḏ/h)_ij = Sym_ij Σ_kl ε_ikl (∇_k h_lj − ∇_l h_kj).
pub fn slash_d(k: [f64; 3], h: &M3) -> M3 {
    let d = ik(k);
    let mut a = zero33();
    for i in 0..3 {
        for j in 0..3 {
            let mut s = ZERO;
            for kk in 0..3 {
                for l in 0..3 {
                    let e = eps(i, kk, l);
                    if e != 0.0 {
                        s += (d[kk] * h[l][j] - d[l] * h[kk][j]) * e;
                    }
                }
            }
            a[i][j] = s;
        }
    }
    sym(&a)
}

/// E′(h) = −½(Δ tf h + ∇̊² tr h) + ½K(δh) on a flat cross-section.
pub fn e_prime(k: [f64; 3], h: &M3) -> M3 {
    let lap = scale33(C64::new(lap_factor(k), 0.0), &tf(h));
    let a = add33(&lap, &hess0(k, trace(h)));
    add33(&scale33(C64::new(-0.5, 0.0), &a), &scale33(C64::new(0.5, 0.0), &conf_killing(k, &div_sym(k, h))))
}

/// Time-derivative jet of a cylinder tensor {h00, α, h} on one mode.
#[derive(Debug, Clone, Copy)]
pub struct TensorJet {
    pub h00: C64,
    pub alpha: V3,
    pub alpha_t: V3,
    pub h: M3,
    pub h_t: M3,
    pub h_tt: M3,
}

/// D(h00, α, h) for trace-free h̃ on a flat cross-section:
/// ½K(−½dh00 − δh + α̇ − *dα + ½d tr h) − ½tf(ḧ) + ½ḏ/ḣ + ½Δ tf(h).
pub fn linearized_weyl(k: [f64; 3], j: &TensorJet) -> M3 {
    let mut w = scale3(C64::new(-0.5, 0.0), grad(k, j.h00));
    w = add3(w, scale3(C64::new(-1.0, 0.0), div_sym(k, &j.h)));
    w = add3(w, j.alpha_t);
    w = add3(w, scale3(C64::new(-1.0, 0.0), curl(k, &j.alpha)));
    w = add3(w, scale3(C64::new(0.5, 0.0), grad(k, trace(&j.h))));
    let half = C64::new(0.5, 0.0);
    let mut out = scale33(half, &conf_killing(k, &w));
    out = add33(&out, &scale33(-half, &tf(&j.h_tt)));
    out = add33(&out, &scale33(half, &slash_d(k, &j.h_t)));
    add33(&out, &scale33(half * lap_factor(k), &tf(&j.h)))
}

/// The same operator written through E′:
/// ½K(−½dh00 + α̇ − *dα) − ½tf(ḧ) + ½ḏ/ḣ − E′(h).
pub fn linearized_weyl_ricci(k: [f64; 3], j: &TensorJet) -> M3 {
    let mut w = scale3(C64::new(-0.5, 0.0), grad(k, j.h00));
    w = add3(w, j.alpha_t);
    w = add3(w, scale3(C64::new(-1.0, 0.0), curl(k, &j.alpha)));
    let half = C64::new(0.5, 0.0);
    let mut out = scale33(half, &conf_killing(k, &w));
    out = add33(&out, &scale33(-half, &tf(&j.h_tt)));
    out = add33(&out, &scale33(half, &slash_d(k, &j.h_t)));
    add33(&out, &scale33(C64::new(-1.0, 0.0), &e_prime(k, &j.h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn curl_example() {
        // ω = e^{ix} dy → *dω = i e^{ix} dz
        let r = curl([1.0, 0.0, 0.0], &[c(0.0), c(1.0), c(0.0)]);
        assert_eq!(r, [c(0.0), c(0.0), I]);
    }

    #[test]
    fn slash_d_of_pure_trace_vanishes() {
        let k = [0.3, -1.2, 2.0];
        let h = ident(C64::new(0.4, -0.7));
        let r = slash_d(k, &h);
        assert!(r.iter().flatten().all(|x| x.norm() < 1e-15));
    }

    #[test]
    fn helicity_eigenvalues() {
        // TT modes with k = (1,0,0): h = e_y⊗e_y − e_z⊗e_z and e_y⊙e_z.
        let k = [1.0, 0.0, 0.0];
        let mut a = zero33();
        a[1][1] = c(1.0);
        a[2][2] = c(-1.0);
        let mut b = zero33();
        b[1][2] = c(1.0);
        b[2][1] = c(1.0);
        // ḏ/ restricted to span{a, b} as a 2×2 matrix.
        let coords = |m: &M3| (m[1][1], m[1][2]);
        let (sa, sb) = (slash_d(k, &a), slash_d(k, &b));
        let (a11, a21) = coords(&sa);
        let (a12, a22) = coords(&sb);
        // eigenvalues of [[a11, a12], [a21, a22]]
        let tr = a11 + a22;
        let det = a11 * a22 - a12 * a21;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let mut ev = [((tr + disc) / 2.0).re, ((tr - disc) / 2.0).re];
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 2.0).abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14, "{ev:?}");
    }
}
