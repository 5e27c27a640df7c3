//! Spectral tensor calculus on the flat cross-section T³ = R³/Λ (Λ rectangular)
//! and on the cylinder R × T³.
//!
//! Fields are truncated Fourier series over modes ξ ∈ [−N, N]³ with wave vector
//! k_i = 2πξ_i/L_i. Spatial operators act mode by mode through [`symbols`], so
//! all identities between constant-coefficient operators hold exactly up to
//! rounding.

pub mod cyl;
pub mod identities;
pub mod symbols;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

use symbols::{M3, V3};

pub use cyl::{CylField, CylOneForm, CylTensor, ExpTerm};
pub use identities::{run_identity_suite, IdentityReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("fields live on different mode grids")]
    GridMismatch,
    #[error("symmetric tensor is not trace-free (|tr| = {0:e})")]
    NotTraceFree(f64),
    #[error("time integral needs degree-0 terms with rates in iZ, got rate {0}")]
    NotPeriodic(C64),
}

/// Mode set ξ ∈ [−band, band]³ on the rectangular torus with side lengths `lattice`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGrid {
    pub lattice: [f64; 3],
    pub band: usize,
}

impl ModeGrid {
    pub fn new(lattice: [f64; 3], band: usize) -> Self {
        assert!(lattice.iter().all(|l| *l > 0.0 && l.is_finite()), "bad lattice {lattice:?}");
        ModeGrid { lattice, band }
    }

    pub fn side(&self) -> usize {
        2 * self.band + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, xi: [i64; 3]) -> Option<usize> {
        let b = self.band as i64;
        if xi.iter().any(|x| x.abs() > b) {
            return None;
        }
        let s = self.side();
        let c = |x: i64| (x + b) as usize;
        Some((c(xi[0]) * s + c(xi[1])) * s + c(xi[2]))
    }

    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let s = self.side();
        let b = self.band as i64;
        [(idx / (s * s)) as i64 - b, ((idx / s) % s) as i64 - b, (idx % s) as i64 - b]
    }

    pub fn wave_vector(&self, xi: [i64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|i| 2.0 * PI * xi[i] as f64 / self.lattice[i])
    }

    pub fn k_of(&self, idx: usize) -> [f64; 3] {
        self.wave_vector(self.mode(idx))
    }

    pub fn volume(&self) -> f64 {
        self.lattice.iter().product()
    }
}

/// Symmetric 3×3 tensor stored by its 6 independent components
/// (00, 01, 02, 11, 12, 22).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sym(pub [C64; 6]);

const SYM_IDX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];

impl Sym {
    pub fn from_full(m: &M3) -> Self {
        Sym([m[0][0], m[0][1], m[0][2], m[1][1], m[1][2], m[2][2]])
    }

    pub fn full(&self) -> M3 {
        let mut m = symbols::zero33();
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.0[SYM_IDX[i][j]];
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[SYM_IDX[i][j]]
    }
}

/// Pointwise value type of a Fourier field.
pub trait Component: Copy + Send + Sync + std::fmt::Debug + 'static {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, s: C64) -> Self;
    fn conj(self) -> Self;
    /// ⟨a, b⟩ = conj(a)·b, full double sum for tensors.
    fn dot(&self, o: &Self) -> C64;
    fn random<R: Rng>(rng: &mut R) -> Self;
}

fn rand_c<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

impl Component for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: C64) -> Self {
        self * s
    }
    fn conj(self) -> Self {
        C64::conj(&self)
    }
    fn dot(&self, o: &Self) -> C64 {
        C64::conj(self) * o
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        rand_c(rng)
    }
}

impl Component for V3 {
    fn zero() -> Self {
        symbols::zero3()
    }
    fn add(self, o: Self) -> Self {
        symbols::add3(self, o)
    }
    fn scale(self, s: C64) -> Self {
        symbols::scale3(s, self)
    }
    fn conj(self) -> Self {
        self.map(|z| z.conj())
    }
    fn dot(&self, o: &Self) -> C64 {
        (0..3).map(|i| self[i].conj() * o[i]).sum()
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        [rand_c(rng), rand_c(rng), rand_c(rng)]
    }
}

impl Component for Sym {
    fn zero() -> Self {
        Sym([C64::new(0.0, 0.0); 6])
    }
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a += b;
        }
        r
    }
    fn scale(self, s: C64) -> Self {
        Sym(self.0.map(|z| z * s))
    }
    fn conj(self) -> Self {
        Sym(self.0.map(|z| z.conj()))
    }
    fn dot(&self, o: &Self) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                s += self.get(i, j).conj() * o.get(i, j);
            }
        }
        s
    }
    fn random<R: Rng>(rng: &mut R) -> Self {
        Sym([0; 6].map(|_| rand_c(rng)))
    }
}

/// Truncated Fourier series Σ_ξ c_ξ e^{i⟨k(ξ), y⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct Fourier<V: Component> {
    pub grid: ModeGrid,
    pub data: Vec<V>,
}

pub type FourierScalar = Fourier<C64>;
pub type FourierOneForm = Fourier<V3>;
pub type FourierSymTensor = Fourier<Sym>;

impl<V: Component> Fourier<V> {
    pub fn zeros(grid: ModeGrid) -> Self {
        Fourier { grid, data: vec![V::zero(); grid.len()] }
    }

    pub fn from_fn(grid: ModeGrid, f: impl Fn([i64; 3]) -> V) -> Self {
        Fourier { grid, data: (0..grid.len()).map(|i| f(grid.mode(i))).collect() }
    }

    /// Single mode c·e^{i⟨k(ξ), y⟩}.
    pub fn mode(grid: ModeGrid, xi: [i64; 3], c: V) -> Self {
        let mut f = Self::zeros(grid);
        f.data[grid.index(xi).expect("mode outside band")] = c;
        f
    }

    pub fn get(&self, xi: [i64; 3]) -> V {
        self.grid.index(xi).map(|i| self.data[i]).unwrap_or_else(V::zero)
    }

    /// Apply a mode-level map c_ξ ↦ f(k(ξ), c_ξ).
    pub fn map_modes<W: Component>(&self, f: impl Fn([f64; 3], &V) -> W + Sync) -> Fourier<W> {
        let g = self.grid;
        Fourier { grid: g, data: self.data.par_iter().enumerate().map(|(i, c)| f(g.k_of(i), c)).collect() }
    }

    pub fn zip_modes<W: Component, U: Component>(
        &self,
        other: &Fourier<W>,
        f: impl Fn([f64; 3], &V, &W) -> U + Sync,
    ) -> Fourier<U> {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let g = self.grid;
        Fourier {
            grid: g,
            data: self.data.par_iter().zip(other.data.par_iter()).enumerate().map(|(i, (a, b))| f(g.k_of(i), a, b)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_modes(o, |_, a, b| a.add(*b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_modes(o, |_, a, b| a.add(b.scale(C64::new(-1.0, 0.0))))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_modes(|_, a| a.scale(s))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Σ_ξ ⟨a_ξ, b_ξ⟩ (the L² product up to the torus volume).
    pub fn inner(&self, o: &Self) -> C64 {
        assert_eq!(self.grid, o.grid, "grid mismatch");
        self.data.par_iter().zip(o.data.par_iter()).map(|(a, b)| a.dot(b)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// c_ξ ↦ conj(c_{−ξ}); the field is real iff it is fixed by this map.
    pub fn reflect_conj(&self) -> Self {
        Fourier::from_fn(self.grid, |xi| self.get([-xi[0], -xi[1], -xi[2]]).conj())
    }

    pub fn real_part(&self) -> Self {
        self.add(&self.reflect_conj()).scale_re(0.5)
    }

    /// Random real field supported on |ξ|∞ ≤ radius.
    pub fn random_real<R: Rng>(grid: ModeGrid, radius: usize, rng: &mut R) -> Self {
        Self::random_complex(grid, radius, rng).real_part()
    }

    /// Random complex field supported on |ξ|∞ ≤ radius.
    pub fn random_complex<R: Rng>(grid: ModeGrid, radius: usize, rng: &mut R) -> Self {
        let r = radius.min(grid.band) as i64;
        let mut f = Self::zeros(grid);
        for i in 0..grid.len() {
            if grid.mode(i).iter().all(|x| x.abs() <= r) {
                f.data[i] = V::random(rng);
            }
        }
        f
    }

    pub fn max_wave_number(&self) -> f64 {
        (0..self.grid.len())
            .filter(|i| self.data[*i].dot(&self.data[*i]).re > 0.0)
            .map(|i| self.grid.k_of(i).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Values on the uniform n³ point grid y_j = L·j/n, ordered as (x, y, z)
    /// with z fastest.
    pub fn sample(&self, n: usize) -> Vec<V> {
        let g = self.grid;
        let s = g.side();
        let b = g.band as i64;
        // phase[p * s + m] = e^{2πi (m − b) p / n}, shared by all axes
        let mut ph = Vec::with_capacity(n * s);
        for p in 0..n {
            for m in 0..s {
                ph.push(C64::from_polar(1.0, 2.0 * PI * (m as i64 - b) as f64 * p as f64 / n as f64));
            }
        }
        let (px, py, pz) = (&ph, &ph, &ph);
        // sum over z modes, then y, then x
        let mut stage1 = vec![V::zero(); s * s * n];
        for a in 0..s {
            for bb in 0..s {
                for p in 0..n {
                    let mut acc = V::zero();
                    for m in 0..s {
                        acc = acc.add(self.data[(a * s + bb) * s + m].scale(pz[p * s + m]));
                    }
                    stage1[(a * s + bb) * n + p] = acc;
                }
            }
        }
        let mut stage2 = vec![V::zero(); s * n * n];
        for a in 0..s {
            for q in 0..n {
                for p in 0..n {
                    let mut acc = V::zero();
                    for m in 0..s {
                        acc = acc.add(stage1[(a * s + m) * n + p].scale(py[q * s + m]));
                    }
                    stage2[(a * n + q) * n + p] = acc;
                }
            }
        }
        (0..n * n * n)
            .into_par_iter()
            .map(|idx| {
                let (r, q, p) = (idx / (n * n), (idx / n) % n, idx % n);
                let mut acc = V::zero();
                for m in 0..s {
                    acc = acc.add(stage2[(m * n + q) * n + p].scale(px[r * s + m]));
                }
                acc
            })
            .collect()
    }
}

// Spatial operators on whole fields.

pub fn grad(u: &FourierScalar) -> FourierOneForm {
    u.map_modes(|k, c| symbols::grad(k, *c))
}

pub fn div(w: &FourierOneForm) -> FourierScalar {
    w.map_modes(symbols::div)
}

pub fn curl(w: &FourierOneForm) -> FourierOneForm {
    w.map_modes(symbols::curl)
}

/// Rough Laplacian Δ = ∇^i∇_i (non-positive).
pub fn lap<V: Component>(f: &Fourier<V>) -> Fourier<V> {
    f.map_modes(|k, c| c.scale(C64::new(symbols::lap_factor(k), 0.0)))
}

pub fn hess(u: &FourierScalar) -> FourierSymTensor {
    u.map_modes(|k, c| Sym::from_full(&symbols::hess(k, *c)))
}

pub fn hess0(u: &FourierScalar) -> FourierSymTensor {
    u.map_modes(|k, c| Sym::from_full(&symbols::hess0(k, *c)))
}

pub fn lie(w: &FourierOneForm) -> FourierSymTensor {
    w.map_modes(|k, c| Sym::from_full(&symbols::lie(k, c)))
}

pub fn conf_killing(w: &FourierOneForm) -> FourierSymTensor {
    w.map_modes(|k, c| Sym::from_full(&symbols::conf_killing(k, c)))
}

pub fn div_sym(h: &FourierSymTensor) -> FourierOneForm {
    h.map_modes(|k, c| symbols::div_sym(k, &c.full()))
}

pub fn slash_d(h: &FourierSymTensor) -> FourierSymTensor {
    h.map_modes(|k, c| Sym::from_full(&symbols::slash_d(k, &c.full())))
}

pub fn e_prime(h: &FourierSymTensor) -> FourierSymTensor {
    h.map_modes(|k, c| Sym::from_full(&symbols::e_prime(k, &c.full())))
}

pub fn trace(h: &FourierSymTensor) -> FourierScalar {
    h.map_modes(|_, c| symbols::trace(&c.full()))
}

pub fn trace_free(h: &FourierSymTensor) -> FourierSymTensor {
    h.map_modes(|_, c| Sym::from_full(&symbols::tf(&c.full())))
}

/// u ↦ u·g.
pub fn times_metric(u: &FourierScalar) -> FourierSymTensor {
    u.map_modes(|_, c| Sym::from_full(&symbols::ident(*c)))
}

/// 3D conformal Killing Laplacian δd + (4/3)dδ, which on T³ equals Δ + ⅓dδ.
pub fn box_k3(w: &FourierOneForm) -> FourierOneForm {
    w.map_modes(|k, c| symbols::add3(symbols::scale3(C64::new(symbols::lap_factor(k), 0.0), *c), symbols::scale3(C64::new(1.0 / 3.0, 0.0), symbols::grad(k, symbols::div(k, c)))))
}

/// Projection of a 1-form onto its co-closed part.
pub fn coclosed_part(w: &FourierOneForm) -> FourierOneForm {
    w.map_modes(|k, c| {
        let kk: f64 = k.iter().map(|x| x * x).sum();
        if kk == 0.0 {
            return *c;
        }
        let kc: C64 = (0..3).map(|i| c[i] * k[i]).sum();
        [0, 1, 2].map(|i| c[i] - kc * (k[i] / kk))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn grid_index_roundtrip() {
        let g = ModeGrid::new([1.0, 2.0, 3.0], 3);
        for i in 0..g.len() {
            assert_eq!(g.index(g.mode(i)), Some(i));
        }
        assert_eq!(g.index([4, 0, 0]), None);
    }

    #[test]
    fn sym_storage_has_six_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = Sym::random(&mut rng);
        assert_eq!(s.0.len(), 6);
        assert_eq!(Sym::from_full(&s.full()), s);
        // full double sum counts off-diagonals twice
        let e01 = Sym::from_full(&{
            let mut m = symbols::zero33();
            m[0][1] = re(1.0);
            m[1][0] = re(1.0);
            m
        });
        assert_eq!(e01.dot(&e01), re(2.0));
    }

    #[test]
    fn e_prime_of_pure_trace() {
        // E′(u g) = −½∇̊²u
        let g = ModeGrid::new([2.0 * PI; 3], 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = FourierScalar::random_real(g, 2, &mut rng);
        let lhs = e_prime(&times_metric(&u));
        let rhs = hess0(&u).scale_re(-0.5);
        assert!(lhs.sub(&rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn conf_killing_of_gradient() {
        // K(dφ) = 2∇̊²φ
        let g = ModeGrid::new([1.0, 1.5, 2.5], 3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = FourierScalar::random_real(g, 3, &mut rng);
        let lhs = conf_killing(&grad(&u));
        let rhs = hess0(&u).scale_re(2.0);
        assert!(lhs.sub(&rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn box_k3_on_exact_forms() {
        // (δd + (4/3)dδ)(dφ) = −(4/3)μ dφ for Δφ = −μφ
        let g = ModeGrid::new([2.0 * PI; 3], 2);
        let u = FourierScalar::mode(g, [1, 1, 0], re(1.0));
        let mu = 2.0;
        let lhs = box_k3(&grad(&u));
        let rhs = grad(&u).scale_re(-4.0 / 3.0 * mu);
        assert!(lhs.sub(&rhs).norm() < 1e-12);
    }

    #[test]
    fn sample_matches_direct_sum() {
        let g = ModeGrid::new([2.0, 3.0, 5.0], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = FourierScalar::random_real(g, 2, &mut rng);
        let n = 6;
        let vals = u.sample(n);
        for &(r, q, p) in &[(0usize, 0usize, 0usize), (1, 2, 3), (5, 4, 1)] {
            let y = [r, q, p].map(|j| j as f64 / n as f64);
            let mut s = re(0.0);
            for i in 0..g.len() {
                let xi = g.mode(i);
                let ang: f64 = (0..3).map(|a| 2.0 * PI * xi[a] as f64 * y[a]).sum();
                s += u.data[i] * C64::from_polar(1.0, ang);
            }
            let got = vals[(r * n + q) * n + p];
            assert!((got - s).norm() < 1e-12, "{got} vs {s}");
            assert!(got.im.abs() < 1e-12);
        }
    }
}
