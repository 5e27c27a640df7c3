//! Fields on the cylinder R × T³ as finite sums Σ e^{λt} p(t) with p polynomial
//! in t and Fourier coefficients in y. Time derivatives are exact.

use super::{
    conf_killing, curl, div, div_sym, grad, lap, lie, slash_d, trace, trace_free, times_metric, Component, FieldError,
    Fourier, FourierOneForm, FourierScalar, FourierSymTensor, ModeGrid,
};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Vector space operations shared by all coefficient types.
pub trait Linear: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    /// self + a·x
    fn axpy(&self, a: C64, x: &Self) -> Self;
    fn dot(&self, o: &Self) -> C64;
    fn norm(&self) -> f64 {
        self.dot(self).re.max(0.0).sqrt()
    }
    fn scale(&self, a: C64) -> Self {
        self.zero_like().axpy(a, self)
    }
}

impl<V: Component> Linear for Fourier<V> {
    fn zero_like(&self) -> Self {
        Fourier::zeros(self.grid)
    }
    fn axpy(&self, a: C64, x: &Self) -> Self {
        self.zip_modes(x, |_, p, q| p.add(q.scale(a)))
    }
    fn dot(&self, o: &Self) -> C64 {
        self.inner(o)
    }
}

/// h̃ = h00 dt² + 2 dt⊙α + h.
#[derive(Debug, Clone, PartialEq)]
pub struct CylTensor {
    pub h00: FourierScalar,
    pub alpha: FourierOneForm,
    pub h: FourierSymTensor,
}

impl CylTensor {
    pub fn zeros(grid: ModeGrid) -> Self {
        CylTensor { h00: Fourier::zeros(grid), alpha: Fourier::zeros(grid), h: Fourier::zeros(grid) }
    }

    /// Removes the 4D trace: h̃ − ¼(h00 + tr h)g̃.
    pub fn trace_free(&self) -> Self {
        let tau = self.h00.add(&trace(&self.h)).scale_re(0.25);
        CylTensor { h00: self.h00.sub(&tau), alpha: self.alpha.clone(), h: self.h.sub(&times_metric(&tau)) }
    }

    pub fn trace4(&self) -> FourierScalar {
        self.h00.add(&trace(&self.h))
    }
}

impl Linear for CylTensor {
    fn zero_like(&self) -> Self {
        CylTensor::zeros(self.h00.grid)
    }
    fn axpy(&self, a: C64, x: &Self) -> Self {
        CylTensor { h00: self.h00.axpy(a, &x.h00), alpha: self.alpha.axpy(a, &x.alpha), h: self.h.axpy(a, &x.h) }
    }
    /// h00·k00 + 2⟨α, β⟩ + ⟨h, k⟩
    fn dot(&self, o: &Self) -> C64 {
        self.h00.inner(&o.h00) + self.alpha.inner(&o.alpha) * 2.0 + self.h.inner(&o.h)
    }
}

/// ω̃ = f dt + ω.
#[derive(Debug, Clone, PartialEq)]
pub struct CylOneForm {
    pub f: FourierScalar,
    pub w: FourierOneForm,
}

impl CylOneForm {
    pub fn zeros(grid: ModeGrid) -> Self {
        CylOneForm { f: Fourier::zeros(grid), w: Fourier::zeros(grid) }
    }
}

impl Linear for CylOneForm {
    fn zero_like(&self) -> Self {
        CylOneForm::zeros(self.f.grid)
    }
    fn axpy(&self, a: C64, x: &Self) -> Self {
        CylOneForm { f: self.f.axpy(a, &x.f), w: self.w.axpy(a, &x.w) }
    }
    fn dot(&self, o: &Self) -> C64 {
        self.f.inner(&o.f) + self.w.inner(&o.w)
    }
}

/// e^{λt} Σ_k c_k t^k.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm<T> {
    pub rate: C64,
    pub coeffs: Vec<T>,
}

impl<T: Linear> ExpTerm<T> {
    /// d/dt: coefficients λc_k + (k+1)c_{k+1}.
    pub fn dt(&self) -> Self {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                let c = self.coeffs[k].scale(self.rate);
                if k + 1 < n {
                    c.axpy(C64::new((k + 1) as f64, 0.0), &self.coeffs[k + 1])
                } else {
                    c
                }
            })
            .collect();
        ExpTerm { rate: self.rate, coeffs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylField<T> {
    pub terms: Vec<ExpTerm<T>>,
}

impl<T: Linear> CylField<T> {
    pub fn new(terms: Vec<ExpTerm<T>>) -> Self {
        CylField { terms }
    }

    pub fn single(rate: C64, coeffs: Vec<T>) -> Self {
        CylField { terms: vec![ExpTerm { rate, coeffs }] }
    }

    /// A t-independent field.
    pub fn stationary(c: T) -> Self {
        Self::single(C64::new(0.0, 0.0), vec![c])
    }

    pub fn dt(&self) -> Self {
        CylField { terms: self.terms.iter().map(ExpTerm::dt).collect() }
    }

    /// Applies a t-independent linear map coefficientwise.
    pub fn map<U: Linear>(&self, f: impl Fn(&T) -> U) -> CylField<U> {
        CylField {
            terms: self.terms.iter().map(|t| ExpTerm { rate: t.rate, coeffs: t.coeffs.iter().map(&f).collect() }).collect(),
        }
    }

    /// Combines three fields with the same term structure (e.g. a field and
    /// its time derivatives) coefficientwise.
    pub fn zip3<U: Linear>(a: &Self, b: &Self, c: &Self, f: impl Fn(&T, &T, &T) -> U) -> CylField<U> {
        let terms = a
            .terms
            .iter()
            .zip(&b.terms)
            .zip(&c.terms)
            .map(|((x, y), z)| {
                assert_eq!(x.coeffs.len(), y.coeffs.len());
                assert_eq!(x.coeffs.len(), z.coeffs.len());
                ExpTerm { rate: x.rate, coeffs: (0..x.coeffs.len()).map(|k| f(&x.coeffs[k], &y.coeffs[k], &z.coeffs[k])).collect() }
            })
            .collect();
        CylField { terms }
    }

    pub fn scale(&self, a: C64) -> Self {
        self.map(|c| c.scale(a))
    }

    /// Sum with terms of equal rate merged.
    pub fn add(&self, o: &Self) -> Self {
        let mut terms: Vec<ExpTerm<T>> = self.terms.clone();
        for t in &o.terms {
            match terms.iter_mut().find(|s| s.rate == t.rate) {
                Some(s) => {
                    for (k, c) in t.coeffs.iter().enumerate() {
                        if k < s.coeffs.len() {
                            s.coeffs[k] = s.coeffs[k].axpy(C64::new(1.0, 0.0), c);
                        } else {
                            s.coeffs.push(c.clone());
                        }
                    }
                }
                None => terms.push(t.clone()),
            }
        }
        CylField { terms }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    /// Coefficient norm √(Σ_terms Σ_k ‖c_k‖²) after merging equal rates.
    pub fn coeff_norm(&self) -> f64 {
        let merged = CylField { terms: Vec::new() }.add(self);
        merged.terms.iter().flat_map(|t| t.coeffs.iter()).map(|c| c.norm().powi(2)).sum::<f64>().sqrt()
    }

    /// ∫₀^{2π} ⟨a, b⟩ dt over one period (spatial part without the volume factor).
    /// Every term must be t-polynomial of degree 0 with rate in iZ.
    pub fn periodic_inner(&self, o: &Self) -> Result<C64, FieldError> {
        for t in self.terms.iter().chain(&o.terms) {
            let n = t.rate.im.round();
            let degree_zero = t.coeffs.iter().skip(1).all(|c| c.norm() == 0.0);
            if t.rate.re != 0.0 || (t.rate.im - n).abs() > 1e-12 || !degree_zero {
                return Err(FieldError::NotPeriodic(t.rate));
            }
        }
        let mut s = C64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &o.terms {
                if (a.rate - b.rate).norm() < 1e-12 {
                    s += a.coeffs[0].dot(&b.coeffs[0]) * (2.0 * PI);
                }
            }
        }
        Ok(s)
    }
}

impl<T: Linear> CylField<T> {
    /// Term-by-term conjugate partner: rate λ ↦ λ̄, coefficients c ↦ conj(c(−ξ)).
    pub fn conj_with(&self, reflect: impl Fn(&T) -> T) -> Self {
        CylField {
            terms: self.terms.iter().map(|t| ExpTerm { rate: t.rate.conj(), coeffs: t.coeffs.iter().map(&reflect).collect() }).collect(),
        }
    }
}

impl CylTensor {
    pub fn reflect_conj(&self) -> Self {
        CylTensor { h00: self.h00.reflect_conj(), alpha: self.alpha.reflect_conj(), h: self.h.reflect_conj() }
    }
}

impl CylOneForm {
    pub fn reflect_conj(&self) -> Self {
        CylOneForm { f: self.f.reflect_conj(), w: self.w.reflect_conj() }
    }
}

/// Real part of a cylinder field: ½(F + conjugate partner of F).
pub fn real_tensor(f: &CylField<CylTensor>) -> CylField<CylTensor> {
    f.add(&f.conj_with(CylTensor::reflect_conj)).scale(C64::new(0.5, 0.0))
}

pub fn real_oneform(f: &CylField<CylOneForm>) -> CylField<CylOneForm> {
    f.add(&f.conj_with(CylOneForm::reflect_conj)).scale(C64::new(0.5, 0.0))
}

pub fn real_sym(f: &CylField<FourierSymTensor>) -> CylField<FourierSymTensor> {
    f.add(&f.conj_with(|c| c.reflect_conj())).scale(C64::new(0.5, 0.0))
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Linearized anti-self-dual Weyl map D on the flat cylinder. The 4D trace is
/// projected out first, so D(u g̃) = 0.
pub fn linearized_weyl(ht: &CylField<CylTensor>) -> CylField<FourierSymTensor> {
    let x = ht.map(CylTensor::trace_free);
    let xd = x.dt();
    let xdd = xd.dt();
    CylField::zip3(&x, &xd, &xdd, |c, d, dd| {
        let w = grad(&c.h00)
            .scale_re(-0.5)
            .sub(&div_sym(&c.h))
            .add(&d.alpha)
            .sub(&curl(&c.alpha))
            .add(&grad(&trace(&c.h)).scale_re(0.5));
        conf_killing(&w)
            .scale_re(0.5)
            .sub(&trace_free(&dd.h).scale_re(0.5))
            .add(&slash_d(&d.h).scale_re(0.5))
            .add(&lap(&trace_free(&c.h)).scale_re(0.5))
    })
}

/// The same map written through the linearized Einstein tensor E′ of the
/// cross-section, evaluated by mode-level symbols.
pub fn linearized_weyl_ricci(ht: &CylField<CylTensor>) -> CylField<FourierSymTensor> {
    use super::symbols::{linearized_weyl_ricci as sym_d, TensorJet};
    use super::Sym;
    let x = ht.map(CylTensor::trace_free);
    let xd = x.dt();
    let xdd = xd.dt();
    CylField::zip3(&x, &xd, &xdd, |c, d, dd| {
        let g = c.h00.grid;
        Fourier {
            grid: g,
            data: (0..g.len())
                .map(|i| {
                    let jet = TensorJet {
                        h00: c.h00.data[i],
                        alpha: c.alpha.data[i],
                        alpha_t: d.alpha.data[i],
                        h: c.h.data[i].full(),
                        h_t: d.h.data[i].full(),
                        h_tt: dd.h.data[i].full(),
                    };
                    Sym::from_full(&sym_d(g.k_of(i), &jet))
                })
                .collect(),
        }
    })
}

fn check_trace_free(z: &CylField<FourierSymTensor>) -> Result<(), FieldError> {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for t in &z.terms {
        for c in &t.coeffs {
            worst = worst.max(trace(c).norm());
            scale = scale.max(c.norm());
        }
    }
    if worst > 1e-12 * scale.max(1.0) {
        return Err(FieldError::NotTraceFree(worst));
    }
    Ok(())
}

/// Formal adjoint D* on trace-free Z:
/// {−½δ²Z, ½δŻ + ½*d(δZ), −½Z̈ − ½ḏ/Ż + ½ΔZ − ½L(δZ) + ½(δ²Z)g}.
pub fn weyl_adjoint(z: &CylField<FourierSymTensor>) -> Result<CylField<CylTensor>, FieldError> {
    check_trace_free(z)?;
    let zd = z.dt();
    let zdd = zd.dt();
    Ok(CylField::zip3(z, &zd, &zdd, |c, d, dd| {
        let dz = div_sym(c);
        let ddz = div(&dz);
        CylTensor {
            h00: ddz.scale_re(-0.5),
            alpha: div_sym(d).scale_re(0.5).add(&curl(&dz).scale_re(0.5)),
            h: dd
                .scale_re(-0.5)
                .sub(&slash_d(d).scale_re(0.5))
                .add(&lap(c).scale_re(0.5))
                .sub(&lie(&dz).scale_re(0.5))
                .add(&times_metric(&ddz).scale_re(0.5)),
        }
    }))
}

/// Conformal Killing operator of the cylinder (trace-free part of the Lie
/// derivative): {3/2 ḟ − ½δω, ω̇ + df, L(ω) − ½(ḟ + δω)g}.
pub fn cyl_killing(w: &CylField<CylOneForm>) -> CylField<CylTensor> {
    let wd = w.dt();
    CylField::zip3(w, &wd, &wd, |c, d, _| {
        let dw = div(&c.w);
        CylTensor {
            h00: d.f.scale_re(1.5).sub(&dw.scale_re(0.5)),
            alpha: d.w.add(&grad(&c.f)),
            h: lie(&c.w).sub(&times_metric(&d.f.add(&dw)).scale_re(0.5)),
        }
    })
}

/// Divergence {ḣ00 + δα, α̇ + δh}.
pub fn cyl_div(ht: &CylField<CylTensor>) -> CylField<CylOneForm> {
    let hd = ht.dt();
    CylField::zip3(ht, &hd, &hd, |c, d, _| CylOneForm { f: d.h00.add(&div(&c.alpha)), w: d.alpha.add(&div_sym(&c.h)) })
}

/// Conformal Killing Laplacian on the flat cylinder:
/// {3/2 f̈ + ½δω̇ + Δf, ω̈ + Δω + ½dδω + ½dḟ}.
pub fn box_k(w: &CylField<CylOneForm>) -> CylField<CylOneForm> {
    let wd = w.dt();
    let wdd = wd.dt();
    CylField::zip3(w, &wd, &wdd, |c, d, dd| CylOneForm {
        f: dd.f.scale_re(1.5).add(&div(&d.w).scale_re(0.5)).add(&lap(&c.f)),
        w: dd.w.add(&lap(&c.w)).add(&grad(&div(&c.w)).scale_re(0.5)).add(&grad(&d.f).scale_re(0.5)),
    })
}

/// Deformation operator F(h̃) = (Dh̃, 2 div h̃).
pub fn deformation(ht: &CylField<CylTensor>) -> (CylField<FourierSymTensor>, CylField<CylOneForm>) {
    (linearized_weyl(ht), cyl_div(ht).scale(re(2.0)))
}

/// Adjoint F*(Z, ω̃) = D*Z − K_g ω̃.
pub fn deformation_adjoint(z: &CylField<FourierSymTensor>, w: &CylField<CylOneForm>) -> Result<CylField<CylTensor>, FieldError> {
    Ok(weyl_adjoint(z)?.sub(&cyl_killing(w)))
}

#[cfg(test)]
mod tests {
    use super::super::symbols;
    use super::super::Sym;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> ModeGrid {
        ModeGrid::new([2.0 * PI, 2.0 * PI * 1.3, 2.0 * PI * 0.8], 3)
    }

    fn random_tensor(rng: &mut ChaCha8Rng) -> CylTensor {
        let g = grid();
        CylTensor { h00: Fourier::random_complex(g, 2, rng), alpha: Fourier::random_complex(g, 2, rng), h: Fourier::random_complex(g, 2, rng) }
    }

    fn random_tf(rng: &mut ChaCha8Rng) -> FourierSymTensor {
        trace_free(&Fourier::random_complex(grid(), 2, rng))
    }

    fn random_oneform(rng: &mut ChaCha8Rng) -> CylOneForm {
        let g = grid();
        CylOneForm { f: Fourier::random_complex(g, 2, rng), w: Fourier::random_complex(g, 2, rng) }
    }

    fn periodic<T: Linear>(mut mk: impl FnMut(i32) -> T) -> CylField<T> {
        CylField::new((-2..=2).map(|n| ExpTerm { rate: C64::new(0.0, n as f64), coeffs: vec![mk(n)] }).collect())
    }

    #[test]
    fn exact_time_derivative() {
        // d/dt (t e^{2t}) = e^{2t} + 2t e^{2t}
        let g = grid();
        let one = FourierScalar::mode(g, [0, 0, 0], re(1.0));
        let f = CylField::single(re(2.0), vec![one.zero_like(), one.clone()]);
        let d = f.dt();
        assert_eq!(d.terms[0].coeffs[0], one);
        assert_eq!(d.terms[0].coeffs[1], one.scale_re(2.0));
    }

    #[test]
    fn weyl_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = CylField::new(vec![
            ExpTerm { rate: C64::new(0.4, 1.1), coeffs: vec![random_tensor(&mut rng), random_tensor(&mut rng)] },
            ExpTerm { rate: re(-0.7), coeffs: vec![random_tensor(&mut rng)] },
        ]);
        let a = linearized_weyl(&f);
        let b = linearized_weyl_ricci(&f);
        assert!(a.sub(&b).coeff_norm() < 1e-12 * a.coeff_norm());
    }

    #[test]
    fn weyl_kills_pure_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = FourierScalar::random_complex(grid(), 2, &mut rng);
        let ht = CylTensor { h00: u.clone(), alpha: Fourier::zeros(grid()), h: times_metric(&u) };
        let f = CylField::single(C64::new(0.3, 0.2), vec![ht]);
        assert!(linearized_weyl(&f).coeff_norm() < 1e-13);
    }

    #[test]
    fn weyl_adjoint_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let h = periodic(|_| random_tensor(&mut rng).trace_free());
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let z = periodic(|_| random_tf(&mut rng));
        let lhs = linearized_weyl(&h).periodic_inner(&z).unwrap();
        let rhs = h.periodic_inner(&weyl_adjoint(&z).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn killing_is_minus_half_div_adjoint() {
        // ⟨2 div h̃, ω̃⟩ = −⟨h̃, K_g ω̃⟩ for trace-free h̃
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let h = periodic(|_| random_tensor(&mut rng).trace_free());
        let w = periodic(|_| random_oneform(&mut rng));
        let lhs = cyl_div(&h).scale(re(2.0)).periodic_inner(&w).unwrap();
        let rhs = -h.periodic_inner(&cyl_killing(&w)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm(), "{lhs} vs {rhs}");
    }

    #[test]
    fn adjoint_rejects_trace() {
        let z = CylField::stationary(times_metric(&FourierScalar::mode(grid(), [1, 0, 0], re(1.0))));
        assert!(matches!(weyl_adjoint(&z), Err(FieldError::NotTraceFree(_))));
    }

    #[test]
    fn cokernel_element_dt() {
        // F*(0, dt) = 0
        let g = grid();
        let z = CylField::stationary(FourierSymTensor::zeros(g));
        let w = CylField::stationary(CylOneForm { f: FourierScalar::mode(g, [0, 0, 0], re(1.0)), w: Fourier::zeros(g) });
        assert!(deformation_adjoint(&z, &w).unwrap().coeff_norm() == 0.0);
    }

    #[test]
    fn helicity_of_tt_mode() {
        // TT h on k = (1,0,0): ḏ/ has eigenvalues ±2 = ±2|k|.
        let g = ModeGrid::new([2.0 * PI; 3], 1);
        let mut m = symbols::zero33();
        m[1][1] = re(1.0);
        m[2][2] = re(-1.0);
        m[1][2] = C64::new(0.0, 1.0);
        m[2][1] = C64::new(0.0, 1.0);
        let h = FourierSymTensor::mode(g, [1, 0, 0], Sym::from_full(&m));
        let s = slash_d(&h);
        let plus = s.sub(&h.scale_re(2.0)).norm();
        let minus = s.add(&h.scale_re(2.0)).norm();
        assert!(plus.min(minus) < 1e-14, "{plus} {minus}");
    }
}
