//! Dense complex eigenvalues by Hessenberg reduction and shifted QR.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use num_traits::Zero;

pub const MAX_ITER_PER_EIGENVALUE: usize = 500;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("QR iteration did not converge after {0} sweeps")]
pub struct NoConvergence(pub usize);

fn householder_hessenberg(h: &mut DMatrix<C64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H ← (I − 2vv*) H
        for j in 0..n {
            let mut dot = C64::zero();
            for (a, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + a, j)];
            }
            for (a, vi) in v.iter().enumerate() {
                h[(k + 1 + a, j)] -= 2.0 * vi * dot;
            }
        }
        // H ← H (I − 2vv*)
        for i in 0..n {
            let mut dot = C64::zero();
            for (a, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + a)] * vi;
            }
            for (a, vi) in v.iter().enumerate() {
                h[(i, k + 1 + a)] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
    }
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::zero());
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues of a square complex matrix.
pub fn eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>, NoConvergence> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix required");
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = m.clone();
    householder_hessenberg(&mut h);
    let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let s = if s == 0.0 { scale } else { s };
            if h[(l, l - 1)].norm() <= f64::EPSILON * s {
                h[(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(NoConvergence(total));
        }
        let mu = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].norm(), 0.25 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in l..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((c, s));
        }
        for (idx, k) in (l..hi).enumerate() {
            let (c, s) = rots[idx];
            for i in l..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + s.conj() * y;
                h[(i, k + 1)] = -s * x + y * c;
            }
        }
        for i in l..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

/// Single-linkage clusters of values closer than `tol·max(1, |z|)`,
/// reported by centroid and size.
pub fn cluster(values: &[C64], tol: f64) -> Vec<(C64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let nx = p[i];
            p[i] = r;
            i = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (values[i] - values[j]).norm();
            if d < tol * values[i].norm().max(values[j].norm()).max(1.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += values[i];
                g.2 += 1;
            }
            None => groups.push((r, values[i], 1)),
        }
    }
    let mut out: Vec<(C64, usize)> = groups.into_iter().map(|(_, s, k)| (s / k as f64, k)).collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Number of singular values below `tol` times the largest one (at least 1).
pub fn nullity(m: &DMatrix<C64>, tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(1.0, f64::max);
    sv.iter().filter(|s| **s < tol * top).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn matches_nalgebra_on_random_real_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 5, 9, 20] {
            let real = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let ours = sorted(eigenvalues(&real.map(|x| C64::new(x, 0.0))).unwrap());
            let theirs = sorted(real.complex_eigenvalues().iter().cloned().collect());
            let cmp = super::super::compare_root_sets(&theirs, &ours, 1e-9, None);
            assert!(cmp.matched, "n={n}: {ours:?} vs {theirs:?}");
        }
    }

    #[test]
    fn triangular_and_diagonal() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]).map(|x| C64::new(x, 0.0));
        let e = sorted(eigenvalues(&m).unwrap());
        assert_eq!(e, vec![C64::new(1.0, 0.0), C64::new(4.0, 0.0), C64::new(6.0, 0.0)]);
    }

    #[test]
    fn complex_entries() {
        // [[0, i], [i, 0]] has eigenvalues ±i.
        let i = C64::new(0.0, 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[C64::zero(), i, i, C64::zero()]);
        let e = sorted(eigenvalues(&m).unwrap());
        assert!((e[0] + i).norm() < 1e-14 && (e[1] - i).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_cluster_centroid() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]).map(|x| C64::new(x, 0.0));
        let c = cluster(&eigenvalues(&m).unwrap(), 1e-6);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].1, 2);
        assert!((c[0].0 - C64::new(2.0, 0.0)).norm() < 1e-14);
        let shifted = &m - DMatrix::identity(2, 2) * C64::new(2.0, 0.0);
        assert_eq!(nullity(&shifted, 1e-7), 1);
    }
}
