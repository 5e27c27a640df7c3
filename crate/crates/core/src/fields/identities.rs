//! Randomized checks of the operator identities used by the flat analysis.

use super::cyl::{box_k, cyl_div, cyl_killing, deformation, deformation_adjoint, linearized_weyl, real_oneform, CylField, CylOneForm, CylTensor, ExpTerm, Linear};
use super::{
    coclosed_part, conf_killing, curl, div, div_sym, e_prime, grad, hess0, lap, lie, slash_d, times_metric, trace, trace_free, Fourier,
    FourierOneForm, FourierScalar, FourierSymTensor, ModeGrid, Sym, Component,
};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const IDENTITY_TOL: f64 = 1e-10;
/// Random coefficients are drawn on |ξ|∞ ≤ this radius.
pub const SUPPORT_RADIUS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_name: String,
    pub formula: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn report(name: &str, formula: &str, residual: f64) -> IdentityReport {
    IdentityReport {
        identity_name: name.to_string(),
        formula: formula.to_string(),
        residual,
        tolerance: IDENTITY_TOL,
        pass: residual.is_finite() && residual < IDENTITY_TOL,
    }
}

fn rel<T: Linear>(lhs: &T, rhs: &T) -> f64 {
    let d = lhs.axpy(C64::new(-1.0, 0.0), rhs).norm();
    d / lhs.norm().max(rhs.norm()).max(f64::MIN_POSITIVE)
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Runs all identities on random real fields with band `band`, seeded by `seed`.
pub fn run_identity_suite(lattice: [f64; 3], band: usize, seed: u64) -> Vec<IdentityReport> {
    let g = ModeGrid::new(lattice, band);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = SUPPORT_RADIUS;
    let h = FourierSymTensor::random_real(g, r, &mut rng);
    let k2 = FourierSymTensor::random_real(g, r, &mut rng);
    let w = FourierOneForm::random_real(g, r, &mut rng);
    let u = FourierScalar::random_real(g, r, &mut rng);
    let kmax = h.max_wave_number().max(1.0);
    let mut out = Vec::new();

    // 1
    let lhs = slash_d(&slash_d(&h));
    let rhs = lap(&trace_free(&h)).scale_re(-4.0).sub(&hess0(&trace(&h)).scale_re(2.0)).add(&conf_killing(&div_sym(&h)).scale_re(3.0));
    out.push(report("slash_d_squared", "ḏ/²h = −4Δ(tf h) − 2∇̊²(tr h) + 3K(δh)", rel(&lhs, &rhs)));

    // 2
    out.push(report("div_slash_d", "δ(ḏ/h) = *d(δh)", rel(&div_sym(&slash_d(&h)), &curl(&div_sym(&h)))));

    // 3
    out.push(report("slash_d_laplacian", "ḏ/Δh = Δḏ/h", rel(&slash_d(&lap(&h)), &lap(&slash_d(&h)))));

    // 4
    let a = rel(&div_sym(&conf_killing(&w)), &lap(&w).add(&grad(&div(&w)).scale_re(1.0 / 3.0)));
    let b = rel(&lap(&conf_killing(&w)), &conf_killing(&lap(&w)));
    out.push(report("div_conf_killing", "δK(ω) = Δω + ⅓dδω, ΔK(ω) = K(Δω)", a.max(b)));

    // 5
    let l = slash_d(&h).inner(&k2);
    let rr = h.inner(&slash_d(&k2));
    out.push(report("slash_d_self_adjoint", "⟨ḏ/h, k⟩ = ⟨h, ḏ/k⟩", (l - rr).norm() / (slash_d(&h).norm() * k2.norm())));

    // 6
    let sd = slash_d(&h);
    let a = trace(&sd).norm() / sd.norm();
    let ug = times_metric(&u);
    let b = slash_d(&ug).norm() / (ug.norm() * kmax);
    out.push(report("slash_d_trace", "tr(ḏ/h) = 0, ḏ/(ug) = 0", a.max(b)));

    // 7
    out.push(report("slash_d_lie", "ḏ/L(ω) = K(*dω)", rel(&slash_d(&lie(&w)), &conf_killing(&curl(&w)))));

    // 8
    let rhs = slash_d(&slash_d(&h)).scale_re(0.125).sub(&hess0(&trace(&h)).scale_re(0.25)).add(&conf_killing(&div_sym(&h)).scale_re(0.125));
    out.push(report("einstein_linearization", "E′(h) = ⅛ḏ/²h − ¼∇̊²(tr h) + ⅛K(δh)", rel(&e_prime(&h), &rhs)));

    // 9
    let wt = real_oneform(&CylField::new(vec![
        ExpTerm {
            rate: C64::new(0.7, 1.3),
            coeffs: vec![
                CylOneForm { f: Fourier::random_complex(g, r, &mut rng), w: Fourier::random_complex(g, r, &mut rng) },
                CylOneForm { f: Fourier::random_complex(g, r, &mut rng), w: Fourier::random_complex(g, r, &mut rng) },
            ],
        },
        ExpTerm { rate: re(-0.4), coeffs: vec![CylOneForm { f: Fourier::random_complex(g, r, &mut rng), w: Fourier::random_complex(g, r, &mut rng) }] },
    ]));
    let kg = cyl_killing(&wt);
    let a = linearized_weyl(&kg).coeff_norm() / (kg.coeff_norm() * (1.0 + kmax).powi(2));
    let b = {
        let l = box_k(&wt);
        let rr = cyl_div(&kg);
        l.sub(&rr).coeff_norm() / l.coeff_norm().max(rr.coeff_norm())
    };
    out.push(report("weyl_killing", "D∘K_g = 0, □_K = div∘K_g", a.max(b)));

    // 10
    let wc = coclosed_part(&w);
    out.push(report("curl_squared", "(*d)²ω = −Δω for δω = 0", rel(&curl(&curl(&wc)), &lap(&wc).scale_re(-1.0))));

    // 11
    out.push(report("flat_kernel_cokernel", "F(h̃) = 0 and F*(Z, ω̃) = 0 on the parallel kernel/cokernel basis", flat_kernel_residual(g, &mut rng)));

    out
}

fn flat_kernel_residual(g: ModeGrid, rng: &mut ChaCha8Rng) -> f64 {
    let zero_t = CylTensor::zeros(g);
    let origin = [0, 0, 0];
    let one = FourierScalar::mode(g, origin, re(1.0));
    let omega0 = FourierOneForm::mode(g, origin, [re(0.3), re(-1.1), re(0.5)]);
    let b = trace_free(&FourierSymTensor::mode(g, origin, Sym::random(rng)).real_part());
    let mut worst = 0.0f64;
    let mut check_f = |ht: CylField<CylTensor>| {
        let (d, v) = deformation(&ht);
        worst = worst.max((d.coeff_norm() + v.coeff_norm()) / ht.coeff_norm());
    };
    // 3dt² − g
    check_f(CylField::stationary(CylTensor { h00: one.scale_re(3.0), alpha: Fourier::zeros(g), h: times_metric(&one).scale_re(-1.0) }));
    // dt⊙ω0
    check_f(CylField::stationary(CylTensor { h00: Fourier::zeros(g), alpha: omega0.clone(), h: Fourier::zeros(g) }));
    // B and tB
    let bt = CylTensor { h: b.clone(), ..zero_t.clone() };
    check_f(CylField::stationary(bt.clone()));
    check_f(CylField::single(re(0.0), vec![zero_t.clone(), bt]));

    let zs = CylField::stationary(FourierSymTensor::zeros(g));
    let ws = CylField::stationary(CylOneForm::zeros(g));
    let mut check_adj = |z: CylField<FourierSymTensor>, w: CylField<CylOneForm>| {
        let scale = z.coeff_norm() + w.coeff_norm();
        match deformation_adjoint(&z, &w) {
            Ok(v) => worst = worst.max(v.coeff_norm() / scale),
            Err(_) => worst = f64::INFINITY,
        }
    };
    check_adj(zs.clone(), CylField::stationary(CylOneForm { f: one.clone(), w: Fourier::zeros(g) }));
    check_adj(zs.clone(), CylField::stationary(CylOneForm { f: Fourier::zeros(g), w: omega0 }));
    check_adj(CylField::stationary(b.clone()), ws.clone());
    check_adj(CylField::single(re(0.0), vec![b.zero_like(), b]), ws);
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn suite_passes_on_cubic_and_rectangular_tori() {
        for lattice in [[2.0 * PI; 3], [1.0, 1.7, 2.3]] {
            let reps = run_identity_suite(lattice, 4, 7);
            assert_eq!(reps.len(), 11);
            for r in &reps {
                assert!(r.pass, "{}: {:e}", r.identity_name, r.residual);
            }
        }
    }

    #[test]
    fn broken_identity_is_detected() {
        // Dropping the K(δh) term must fail the tolerance.
        let g = ModeGrid::new([2.0 * PI; 3], 4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = FourierSymTensor::random_real(g, 3, &mut rng);
        let lhs = slash_d(&slash_d(&h));
        let rhs = lap(&trace_free(&h)).scale_re(-4.0).sub(&hess0(&trace(&h)).scale_re(2.0));
        assert!(rel(&lhs, &rhs) > 1e-3);
    }
}
